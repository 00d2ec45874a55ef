//! Seeded random grammars, sentences, and corruptions for the randomized
//! suites. Grammars are induced from sampled trees so every case has at
//! least one grammatical sentence.

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use lep_core::{
    brackets_of, induce_grammar, BracketedTree, Cost, CostParams, Grammar, Symbol, TreeChild,
};

const LABELS: &[&str] = &["S", "A", "B", "C"];
const TAGS: &[&str] = &["dt", "nn", "vb", "in", "jj", "rb", "comma", "lparen", "rparen"];

pub struct Case {
    pub grammar: Grammar,
    pub base: Vec<Symbol>,
    pub input: Vec<Symbol>,
    pub params: CostParams,
    pub corruptions: usize,
}

pub fn tag(name: &str) -> Symbol {
    Symbol::terminal(name).unwrap()
}

pub fn tags(names: &str) -> Vec<Symbol> {
    names.split_whitespace().map(tag).collect()
}

fn random_leaf(rng: &mut ChaCha8Rng, id: &mut u32) -> TreeChild {
    *id += 1;
    TreeChild::Leaf {
        word: format!("w{id}"),
        tag: tag(TAGS[rng.gen_range(0..TAGS.len())]),
    }
}

fn random_tree(rng: &mut ChaCha8Rng, label: &str, depth: usize, id: &mut u32) -> BracketedTree {
    let n_children = rng.gen_range(1..=3);
    let children = (0..n_children)
        .map(|_| {
            if depth == 0 || rng.gen_bool(0.6) {
                random_leaf(rng, id)
            } else {
                let label = LABELS[rng.gen_range(1..LABELS.len())];
                TreeChild::Node(random_tree(rng, label, depth - 1, id))
            }
        })
        .collect();
    BracketedTree { label: Symbol::nonterminal(label).unwrap(), children }
}

/// Draws a grammar (<= 15 rules) induced from one or two random trees,
/// with randomized fiducial and misused-terminal classes, plus the yield
/// of the first tree as a known-grammatical base sentence (<= 8 tags),
/// corrupted up to twice.
pub fn random_case(rng: &mut ChaCha8Rng) -> Case {
    random_case_with(rng, 2)
}

/// Like [`random_case`] with a caller-chosen corruption cap.
pub fn random_case_with(rng: &mut ChaCha8Rng, max_corruptions: usize) -> Case {
    loop {
        let mut id = 0;
        let n_trees = rng.gen_range(1..=2);
        let trees: Vec<BracketedTree> = (0..n_trees)
            .map(|_| random_tree(rng, "S", 2, &mut id))
            .collect();
        let base = trees[0].tag_yield();
        if base.len() > 8 {
            continue;
        }
        let Ok(grammar) = induce_grammar(&trees) else { continue };
        if grammar.rules().len() > 15 {
            continue;
        }
        let nts: Vec<Symbol> = grammar.nonterminals().iter().cloned().collect();
        let fiducials: BTreeSet<Symbol> = if rng.gen_bool(0.5) {
            BTreeSet::new()
        } else {
            [nts[rng.gen_range(0..nts.len())].clone()].into_iter().collect()
        };
        let mut misused: BTreeSet<Symbol> = [tag("comma"), tag("lparen"), tag("rparen")]
            .into_iter()
            .collect();
        if rng.gen_bool(0.3) {
            misused.insert(tag(TAGS[rng.gen_range(0..TAGS.len())]));
        }
        let grammar = grammar.with_fiducials(fiducials).with_misused_terminals(misused);

        let params = if rng.gen_bool(0.15) {
            let one = Cost::from_centi(100);
            CostParams {
                alpha_insertion: one,
                alpha_deletion: one,
                alpha_mutation: one,
                beta_insertion: one,
                beta_deletion: one,
                beta_mutation: None,
                delta_fiducial: Cost::ZERO,
                delta_misused: Cost::ZERO,
                delta_delimited: Cost::ZERO,
            }
        } else {
            CostParams::default()
        };

        let corruptions = rng.gen_range(0..=max_corruptions);
        let mut input = base.clone();
        for _ in 0..corruptions {
            corrupt(rng, &mut input, &trees[0]);
        }
        if input.is_empty() || input.len() > 8 {
            continue;
        }
        return Case { grammar, base, input, params, corruptions };
    }
}

fn corrupt(rng: &mut ChaCha8Rng, input: &mut Vec<Symbol>, source: &BracketedTree) {
    match rng.gen_range(0..6) {
        0 => {
            // terminal insertion
            let at = rng.gen_range(0..=input.len());
            input.insert(at, tag(TAGS[rng.gen_range(0..TAGS.len())]));
        }
        1 => {
            // terminal deletion
            if input.len() > 1 {
                let at = rng.gen_range(0..input.len());
                input.remove(at);
            }
        }
        2 => {
            // terminal mutation
            let at = rng.gen_range(0..input.len());
            input[at] = tag(TAGS[rng.gen_range(0..TAGS.len())]);
        }
        3 => {
            // phrase deletion: drop a gold constituent span, when the
            // input still matches the base yield closely enough.
            let spans: Vec<(usize, usize)> = brackets_of(source)
                .spans
                .iter()
                .map(|(_, a, b)| (*a, *b))
                .filter(|(a, b)| b - a < input.len() && *b <= input.len())
                .collect();
            if let Some(&(a, b)) = spans.as_slice().choose(rng) {
                input.drain(a..b);
            }
        }
        4 => {
            // delimited insertion
            let at = rng.gen_range(0..=input.len());
            let inner = TAGS[rng.gen_range(0..TAGS.len())];
            let (open, close) =
                if rng.gen_bool(0.5) { ("comma", "comma") } else { ("lparen", "rparen") };
            input.splice(at..at, [tag(open), tag(inner), tag(close)]);
        }
        _ => {
            // undelimited phrase insertion: splice in the yield of a
            // random gold constituent, so the cheapest repair can be a
            // phrase-level skip rather than per-token insertions.
            let spans: Vec<(usize, usize)> = brackets_of(source)
                .spans
                .iter()
                .map(|(_, a, b)| (*a, *b))
                .collect();
            let base = source.tag_yield();
            if let Some(&(a, b)) = spans.as_slice().choose(rng) {
                let at = rng.gen_range(0..=input.len());
                input.splice(at..at, base[a..b].iter().cloned());
            }
        }
    }
}

/// A random well-nested labeled bracketing over `n` tokens.
pub fn random_bracketing(rng: &mut ChaCha8Rng, n: usize) -> BracketedTree {
    assert!(n >= 1);
    let label = LABELS[rng.gen_range(0..LABELS.len())];
    let mut children = Vec::new();
    if n == 1 {
        children.push(random_leaf(rng, &mut 0));
    } else {
        // Random partition into 1..=n contiguous parts.
        let parts = rng.gen_range(1..=n.min(4));
        let mut cuts: Vec<usize> = (1..n).collect();
        cuts.shuffle(rng);
        let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
        cuts.sort_unstable();
        cuts.push(n);
        let mut prev = 0;
        for cut in cuts {
            let width = cut - prev;
            if width == 1 && rng.gen_bool(0.6) {
                children.push(random_leaf(rng, &mut 0));
            } else {
                children.push(TreeChild::Node(random_bracketing(rng, width)));
            }
            prev = cut;
        }
    }
    BracketedTree { label: Symbol::nonterminal(label).unwrap(), children }
}

/// Enumerates every tag yield derivable from the grammar with a derivation
/// tree of at most `depth` levels, root included.
pub fn yields_up_to_depth(grammar: &Grammar, depth: usize) -> Vec<Vec<Symbol>> {
    fn expand(grammar: &Grammar, sym: &Symbol, depth: usize) -> Vec<Vec<Symbol>> {
        if sym.is_terminal() {
            return vec![vec![sym.clone()]];
        }
        if depth <= 1 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for &rule_ix in grammar.rules_for(sym) {
            let rule = &grammar.rules()[rule_ix as usize];
            let mut partial: Vec<Vec<Symbol>> = vec![Vec::new()];
            for comp in &rule.rhs {
                let child = expand(grammar, comp, depth - 1);
                let mut next = Vec::new();
                for prefix in &partial {
                    for suffix in &child {
                        let mut row = prefix.clone();
                        row.extend(suffix.iter().cloned());
                        next.push(row);
                    }
                }
                partial = next;
            }
            out.extend(partial);
        }
        out
    }
    let mut yields = expand(grammar, grammar.start(), depth);
    yields.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    yields.dedup();
    yields
}
