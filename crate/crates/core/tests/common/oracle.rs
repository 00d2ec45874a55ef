//! Independent least-repair-cost oracle.
//!
//! Computes the minimum total hypothesis cost over all repair scripts
//! (terminal insertion/deletion/mutation, phrase insertion/deletion,
//! delimited substring skips) by an exhaustive span dynamic program
//! iterated to a fixpoint. It shares only the cost functions with the
//! engine; the search itself is a completely separate route, so agreement
//! between the two is a meaningful check.

use std::collections::BTreeMap;

use lep_core::{
    phrase_cost, terminal_cost, Cost, CostParams, Grammar, HypothesisContext, PhraseErrorKind,
    Symbol, TermErrorKind,
};

const INF: i64 = i64::MAX / 4;

pub struct Oracle<'a> {
    pub grammar: &'a Grammar,
    pub params: &'a CostParams,
    pub budget: Cost,
    pub phrase_mutation: Option<Cost>,
}

fn add(a: i64, b: i64, budget: i64) -> i64 {
    if a >= INF || b >= INF {
        return INF;
    }
    let v = a + b;
    if v > budget {
        INF
    } else {
        v
    }
}

/// Substring-skip spans: balanced matching for distinct open/close pairs,
/// every ordered occurrence pair for identical delimiters.
pub fn skip_spans(tags: &[Symbol], pairs: &[(Symbol, Symbol)]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (open, close) in pairs {
        if open == close {
            let at: Vec<usize> = (0..tags.len()).filter(|&i| tags[i] == *open).collect();
            for x in 0..at.len() {
                for y in x + 1..at.len() {
                    out.push((at[x], at[y]));
                }
            }
        } else {
            let mut stack = Vec::new();
            for (i, t) in tags.iter().enumerate() {
                if *t == *open {
                    stack.push(i);
                } else if *t == *close {
                    if let Some(a) = stack.pop() {
                        out.push((a, i));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

impl<'a> Oracle<'a> {
    pub fn min_cost(&self, tags: &[Symbol]) -> Option<Cost> {
        assert!(!tags.is_empty());
        let n = tags.len();
        let g = self.grammar;
        let budget = self.budget.centi();
        let idx = |i: usize, k: usize| i * (n + 1) + k;

        let nts: Vec<Symbol> = g
            .nonterminals()
            .iter()
            .filter(|nt| !g.rules_for(nt).is_empty())
            .cloned()
            .collect();
        let nt_index: BTreeMap<&Symbol, usize> =
            nts.iter().enumerate().map(|(i, s)| (s, i)).collect();

        let mut skips_from: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for (a, b) in skip_spans(tags, g.pair_delimiters()) {
            skips_from[a].push(b);
        }
        let delimited = |a: usize, b: usize| {
            b > a
                && g.pair_delimiters()
                    .iter()
                    .any(|(o, c)| *o == tags[a] && *c == tags[b - 1])
        };

        // Phrase table: best cost of accepting [i, k) as each nonterminal.
        let mut phrase: Vec<Vec<i64>> = vec![vec![INF; (n + 1) * (n + 1)]; nts.len()];

        let substr_cost = phrase_cost(
            PhraseErrorKind::Insertion,
            HypothesisContext { delimited: true, ..Default::default() },
            Cost::ZERO,
            self.params,
        )
        .centi();

        let mut rounds = 0;
        loop {
            rounds += 1;
            assert!(rounds <= 200, "oracle failed to converge");
            let mut changed = false;
            for rule in g.rules() {
                let fid = g.is_fiducial(&rule.lhs);
                let lhs_ix = nt_index[&rule.lhs];

                // Insertion blocks under this rule's fiducial context:
                // cheapest way to treat [i, k) as wholly inserted material.
                let mut ins = vec![INF; (n + 1) * (n + 1)];
                for i in 0..=n {
                    ins[idx(i, i)] = 0;
                }
                for w in 1..=n {
                    for i in 0..=n - w {
                        let k = i + w;
                        let mut best = INF;
                        let tok_cost = terminal_cost(
                            TermErrorKind::Insertion,
                            HypothesisContext {
                                within_fiducial: fid,
                                symbol_misused: g.is_misused(&tags[i]),
                                delimited: false,
                            },
                            self.params,
                        )
                        .centi();
                        best = best.min(add(tok_cost, ins[idx(i + 1, k)], budget));
                        for &b in &skips_from[i] {
                            if b < k {
                                best = best.min(add(substr_cost, ins[idx(b + 1, k)], budget));
                            }
                        }
                        for m in i + 1..=k {
                            for (nt_ix, _) in nts.iter().enumerate() {
                                let pv = phrase[nt_ix][idx(i, m)];
                                if pv >= INF {
                                    continue;
                                }
                                let pc = phrase_cost(
                                    PhraseErrorKind::Insertion,
                                    HypothesisContext {
                                        delimited: delimited(i, m),
                                        ..Default::default()
                                    },
                                    Cost::from_centi(pv),
                                    self.params,
                                )
                                .centi();
                                best = best.min(add(pc, ins[idx(m, k)], budget));
                            }
                        }
                        ins[idx(i, k)] = best;
                    }
                }

                // Component chain: r[i][k] covers [i, k) with the first j
                // components plus interleaved insertion blocks.
                let mut r = vec![INF; (n + 1) * (n + 1)];
                for i in 0..=n {
                    r[idx(i, i)] = 0;
                }
                for comp in &rule.rhs {
                    let mut tail = vec![INF; (n + 1) * (n + 1)];
                    for m in 0..=n {
                        for k in m..=n {
                            let mut best = INF;
                            for m2 in m..=k {
                                let block = ins[idx(m, m2)];
                                if block >= INF {
                                    continue;
                                }
                                let cc = self.component_cost(
                                    comp, m2, k, fid, tags, &nts, &nt_index, &phrase, idx,
                                );
                                best = best.min(add(block, cc, budget));
                            }
                            tail[idx(m, k)] = best;
                        }
                    }
                    let mut next = vec![INF; (n + 1) * (n + 1)];
                    for i in 0..=n {
                        for k in i..=n {
                            let mut best = INF;
                            for m in i..=k {
                                best = best.min(add(r[idx(i, m)], tail[idx(m, k)], budget));
                            }
                            next[idx(i, k)] = best;
                        }
                    }
                    r = next;
                }

                for i in 0..=n {
                    for k in i..=n {
                        let mut best = INF;
                        for m in i..=k {
                            best = best.min(add(r[idx(i, m)], ins[idx(m, k)], budget));
                        }
                        if best < phrase[lhs_ix][idx(i, k)] {
                            phrase[lhs_ix][idx(i, k)] = best;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }

        let start_ix = *nt_index.get(g.start())?;
        let best = phrase[start_ix][idx(0, n)];
        (best < INF).then(|| Cost::from_centi(best))
    }

    #[allow(clippy::too_many_arguments)]
    fn component_cost(
        &self,
        comp: &Symbol,
        m2: usize,
        k: usize,
        fid: bool,
        tags: &[Symbol],
        nts: &[Symbol],
        nt_index: &BTreeMap<&Symbol, usize>,
        phrase: &[Vec<i64>],
        idx: impl Fn(usize, usize) -> usize,
    ) -> i64 {
        if comp.is_terminal() {
            if k == m2 {
                terminal_cost(
                    TermErrorKind::Deletion,
                    HypothesisContext {
                        within_fiducial: fid,
                        symbol_misused: self.grammar.is_misused(comp),
                        delimited: false,
                    },
                    self.params,
                )
                .centi()
            } else if k == m2 + 1 {
                if tags[m2] == *comp {
                    0
                } else {
                    terminal_cost(
                        TermErrorKind::Mutation,
                        HypothesisContext {
                            within_fiducial: fid,
                            symbol_misused: self.grammar.is_misused(comp)
                                || self.grammar.is_misused(&tags[m2]),
                            delimited: false,
                        },
                        self.params,
                    )
                    .centi()
                }
            } else {
                INF
            }
        } else {
            let mut best = INF;
            if k == m2 {
                best = self.params.beta_deletion.centi().min(best);
            }
            if let Some(&aix) = nt_index.get(comp) {
                best = best.min(phrase[aix][idx(m2, k)]);
            }
            if let Some(beta_mut) = self.phrase_mutation {
                for (bix, b) in nts.iter().enumerate() {
                    if b == comp {
                        continue;
                    }
                    let pv = phrase[bix][idx(m2, k)];
                    if pv < INF {
                        best = best.min(beta_mut.centi().saturating_add(pv));
                    }
                }
            }
            best
        }
    }
}
