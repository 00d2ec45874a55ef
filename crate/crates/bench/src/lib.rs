//! Shared fixtures for the benchmarks: a small natural-language-shaped
//! grammar, deterministic sentence corpora, and a synthetic treebank.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use lep_core::{Grammar, Rule, Symbol};

pub fn tag(name: &str) -> Symbol {
    Symbol::terminal(name).unwrap()
}

fn nt(name: &str) -> Symbol {
    Symbol::nonterminal(name).unwrap()
}

/// An 11-rule grammar with recursive noun and prepositional phrases.
pub fn bench_grammar() -> Grammar {
    let (s, np, vp, pp) = (nt("S"), nt("NP"), nt("VP"), nt("PP"));
    Grammar::new(
        vec![
            Rule::new(1, s.clone(), vec![np.clone(), vp.clone()], 1).unwrap(),
            Rule::new(2, np.clone(), vec![tag("dt"), tag("nn")], 1).unwrap(),
            Rule::new(3, np.clone(), vec![tag("dt"), tag("jj"), tag("nn")], 1).unwrap(),
            Rule::new(4, np.clone(), vec![tag("dt"), tag("jj"), tag("jj"), tag("nn")], 1).unwrap(),
            Rule::new(5, np.clone(), vec![tag("pn")], 1).unwrap(),
            Rule::new(6, np.clone(), vec![np.clone(), pp.clone()], 1).unwrap(),
            Rule::new(7, vp.clone(), vec![tag("vb"), np.clone()], 1).unwrap(),
            Rule::new(8, vp.clone(), vec![tag("vb"), np.clone(), pp.clone()], 1).unwrap(),
            Rule::new(9, vp.clone(), vec![tag("vb")], 1).unwrap(),
            Rule::new(10, vp.clone(), vec![tag("md"), tag("vb"), np.clone()], 1).unwrap(),
            Rule::new(11, pp, vec![tag("in"), np], 1).unwrap(),
        ],
        s,
    )
    .unwrap()
}

pub fn tags(names: &str) -> Vec<Symbol> {
    names.split_whitespace().map(tag).collect()
}

/// Deterministic grammatical sentences of growing length.
pub fn grammatical_corpus() -> Vec<Vec<Symbol>> {
    vec![
        tags("pn vb"),
        tags("dt nn vb dt nn"),
        tags("dt jj nn vb dt nn in dt nn"),
        tags("dt nn in dt nn vb dt jj jj nn"),
        tags("dt jj nn in dt nn vb dt nn in dt jj nn"),
    ]
}

/// The grammatical corpus with one random corruption applied to each
/// sentence, deterministic across runs.
pub fn corrupted_corpus() -> Vec<Vec<Symbol>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pool = ["dt", "nn", "vb", "in", "jj", "comma", "rb"];
    grammatical_corpus()
        .into_iter()
        .map(|mut sent| {
            match rng.gen_range(0..4) {
                0 => {
                    let at = rng.gen_range(0..=sent.len());
                    sent.insert(at, tag(pool[rng.gen_range(0..pool.len())]));
                }
                1 => {
                    let at = rng.gen_range(0..sent.len());
                    sent.remove(at);
                }
                2 => {
                    let at = rng.gen_range(0..sent.len());
                    sent[at] = tag(pool[rng.gen_range(0..pool.len())]);
                }
                _ => {
                    let at = rng.gen_range(0..=sent.len());
                    sent.splice(
                        at..at,
                        [tag("comma"), tag(pool[rng.gen_range(0..pool.len())]), tag("comma")],
                    );
                }
            }
            sent
        })
        .collect()
}

/// A synthetic treebank in the bracketed text format.
pub fn synthetic_treebank(trees: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut out = String::new();
    for _ in 0..trees {
        let np = |rng: &mut ChaCha8Rng| -> String {
            if rng.gen_bool(0.5) {
                "(NP a/dt b/nn)".to_string()
            } else {
                "(NP a/dt c/jj b/nn)".to_string()
            }
        };
        let subject = np(&mut rng);
        let object = np(&mut rng);
        if rng.gen_bool(0.3) {
            out.push_str(&format!(
                "((S {subject} (VP v/vb {object} (PP p/in {}))))\n",
                np(&mut rng)
            ));
        } else {
            out.push_str(&format!("((S {subject} (VP v/vb {object})))\n"));
        }
    }
    out
}
