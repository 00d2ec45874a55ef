//! The shared parsing engine.
//!
//! Both passes run the same state machinery over a chart: the normal pass
//! admits only error-free causes (predict, perfect match, phrase
//! completion) under a zero budget, while the recovery pass additionally
//! hypothesizes terminal insertions, deletions and mutations, phrase
//! insertions and deletions, and delimited substring insertions, each
//! priced by the cost model.
//!
//! Processing is agenda-driven: a state is handled when popped, and every
//! admission that lowers a stored error value re-enqueues the key, so the
//! chart converges to per-key minima regardless of agenda discipline.

use std::collections::BTreeSet;

use crate::chart::{AdmitOutcome, Back, Cause, Chart, State, StateKey, StateRef, Strategy};
use crate::cost::{
    phrase_cost, terminal_cost, Cost, CostParams, CostParamsError, HypothesisContext,
    PhraseErrorKind, TermErrorKind,
};
use crate::grammar::{Grammar, Symbol};
use crate::tree::{Hyp, ParseTree, TreeNode, SUBSTRING_LABEL};

/// Search configuration knobs.
#[derive(Debug, Clone, Default)]
pub struct EngineOptions {
    /// Cap on admissible error values; `None` means three times the
    /// largest base cost.
    pub budget: Option<Cost>,
    pub strategy: Strategy,
    /// Keep the admission log (needed for chart dumps and audits).
    pub keep_log: bool,
    /// Enable the experimental phrase mutation hypothesis; requires
    /// `beta_mutation` to be set.
    pub phrase_mutation: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EngineError {
    EmptyInput,
    InvalidParams(CostParamsError),
    PhraseMutationWithoutCost,
}

impl std::fmt::Display for EngineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EngineError::EmptyInput => write!(f, "empty input"),
            EngineError::InvalidParams(e) => write!(f, "{e}"),
            EngineError::PhraseMutationWithoutCost => {
                write!(f, "phrase mutation enabled but beta_mutation is unset")
            }
        }
    }
}

impl std::error::Error for EngineError {}

impl From<CostParamsError> for EngineError {
    fn from(e: CostParamsError) -> EngineError {
        EngineError::InvalidParams(e)
    }
}

/// Matched delimiter spans of the input: `(open, close)` positions.
/// Distinct open/close symbols match like balanced brackets; identical
/// delimiters (commas) pair every earlier occurrence with every later one.
pub fn delimiter_spans(tags: &[Symbol], pairs: &[(Symbol, Symbol)]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (open, close) in pairs {
        if open == close {
            let positions: Vec<usize> =
                tags.iter().enumerate().filter(|(_, t)| *t == open).map(|(i, _)| i).collect();
            for (ix, &a) in positions.iter().enumerate() {
                for &b in &positions[ix + 1..] {
                    out.push((a, b));
                }
            }
        } else {
            let mut stack = Vec::new();
            for (i, t) in tags.iter().enumerate() {
                if t == open {
                    stack.push(i);
                } else if t == close {
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

pub(crate) struct Search<'a> {
    g: &'a Grammar,
    params: Option<&'a CostParams>,
    phrase_mutation: Option<Cost>,
    /// In the normal pass, predict only rules whose first symbol can make
    /// progress on the remaining input.
    bottom_up_filter: bool,
    chart: Chart,
    /// Substring-skip spans starting at each position.
    skips_from: Vec<Vec<usize>>,
    finals_by_origin: Vec<Vec<StateRef>>,
    indexed_finals: BTreeSet<StateRef>,
    goals: Vec<StateKey>,
    goal_set: BTreeSet<StateKey>,
}

impl<'a> Search<'a> {
    pub(crate) fn normal(g: &'a Grammar, tags: &[Symbol], keep_log: bool) -> Search<'a> {
        let chart = Chart::new(tags.to_vec(), Some(Cost::ZERO), Strategy::BestFirst, keep_log);
        let n = tags.len();
        Search {
            g,
            params: None,
            phrase_mutation: None,
            bottom_up_filter: true,
            chart,
            skips_from: vec![Vec::new(); n + 1],
            finals_by_origin: vec![Vec::new(); n + 1],
            indexed_finals: BTreeSet::new(),
            goals: Vec::new(),
            goal_set: BTreeSet::new(),
        }
    }

    pub(crate) fn robust(
        g: &'a Grammar,
        tags: &[Symbol],
        params: &'a CostParams,
        opts: &EngineOptions,
    ) -> Result<Search<'a>, EngineError> {
        params.validate()?;
        let phrase_mutation = if opts.phrase_mutation {
            Some(params.beta_mutation.ok_or(EngineError::PhraseMutationWithoutCost)?)
        } else {
            None
        };
        let budget = opts.budget.unwrap_or_else(|| params.default_budget());
        let chart = Chart::new(tags.to_vec(), Some(budget), opts.strategy, opts.keep_log);
        let n = tags.len();
        let mut skips_from = vec![Vec::new(); n + 1];
        for (a, b) in delimiter_spans(tags, g.pair_delimiters()) {
            skips_from[a].push(b);
        }
        Ok(Search {
            g,
            params: Some(params),
            phrase_mutation,
            bottom_up_filter: false,
            chart,
            skips_from,
            finals_by_origin: vec![Vec::new(); n + 1],
            indexed_finals: BTreeSet::new(),
            goals: Vec::new(),
            goal_set: BTreeSet::new(),
        })
    }

    fn admit(&mut self, set: usize, key: StateKey, error: Cost, back: Back) -> AdmitOutcome {
        self.chart
            .admit(set, State { key, error }, back)
            .expect("engine admissions stay in range")
    }

    fn predict(&mut self, nt: &Symbol, at: usize) {
        let n = self.chart.input_len();
        for &rule_ix in self.g.rules_for(nt) {
            if self.bottom_up_filter {
                let first = &self.g.rule(rule_ix).rhs[0];
                if first.is_terminal() && (at >= n || first != &self.chart.tags()[at]) {
                    continue;
                }
            }
            self.admit(
                at,
                StateKey { rule: rule_ix, dot: 0, origin: at as u32 },
                Cost::ZERO,
                Back::predict(),
            );
        }
    }

    /// The recovery pass predicts every rule at every position: phrase
    /// insertion (and mutation) hypotheses consume constituents no waiting
    /// state asked for, so every constituent must be buildable anywhere,
    /// the role the bottom-up first pass plays in the two-stage design.
    /// The normal pass keeps classic dot-driven prediction.
    fn seed_predictions(&mut self) {
        if self.params.is_some() {
            for at in 0..=self.chart.input_len() {
                for rule_ix in 0..self.g.rules().len() as u32 {
                    self.admit(
                        at,
                        StateKey { rule: rule_ix, dot: 0, origin: at as u32 },
                        Cost::ZERO,
                        Back::predict(),
                    );
                }
            }
        } else {
            let start = self.g.start().clone();
            self.predict(&start, 0);
        }
    }

    fn is_goal(&self, r: &StateRef) -> bool {
        let rule = self.g.rule(r.key.rule);
        r.set == self.chart.input_len()
            && r.key.origin == 0
            && r.key.dot as usize == rule.arity()
            && rule.lhs == *self.g.start()
    }

    /// Handles one popped state: scanning, predictions, error hypotheses,
    /// and completion pairing in both directions.
    fn process(&mut self, r: StateRef, error: Cost) {
        let i = r.set;
        let key = r.key;
        let rule = self.g.rule(key.rule);
        let rhs_len = rule.arity();
        let n = self.chart.input_len();
        let fiducial = self.g.is_fiducial(&rule.lhs);

        if (key.dot as usize) < rhs_len {
            let next = rule.rhs[key.dot as usize].clone();
            if next.is_nonterminal() {
                if self.params.is_none() {
                    self.predict(&next, i);
                }
                if let Some(params) = self.params {
                    let cost = phrase_cost(
                        PhraseErrorKind::Deletion,
                        HypothesisContext::default(),
                        Cost::ZERO,
                        params,
                    );
                    self.admit(
                        i,
                        StateKey { dot: key.dot + 1, ..key },
                        error + cost,
                        Back { cause: Cause::PhraseDel, pred: Some(r), child: None, hyp_cost: cost },
                    );
                }
            } else {
                // Scan the input token against the expected terminal.
                if i < n {
                    let tok = self.chart.tags()[i].clone();
                    if next == tok {
                        self.admit(
                            i + 1,
                            StateKey { dot: key.dot + 1, ..key },
                            error,
                            Back {
                                cause: Cause::PerfectMatch,
                                pred: Some(r),
                                child: None,
                                hyp_cost: Cost::ZERO,
                            },
                        );
                    } else if let Some(params) = self.params {
                        let ctx = HypothesisContext {
                            within_fiducial: fiducial,
                            symbol_misused: self.g.is_misused(&next) || self.g.is_misused(&tok),
                            delimited: false,
                        };
                        let cost = terminal_cost(TermErrorKind::Mutation, ctx, params);
                        self.admit(
                            i + 1,
                            StateKey { dot: key.dot + 1, ..key },
                            error + cost,
                            Back { cause: Cause::MutErr, pred: Some(r), child: None, hyp_cost: cost },
                        );
                    }
                }
                if let Some(params) = self.params {
                    let ctx = HypothesisContext {
                        within_fiducial: fiducial,
                        symbol_misused: self.g.is_misused(&next),
                        delimited: false,
                    };
                    let cost = terminal_cost(TermErrorKind::Deletion, ctx, params);
                    self.admit(
                        i,
                        StateKey { dot: key.dot + 1, ..key },
                        error + cost,
                        Back { cause: Cause::DelErr, pred: Some(r), child: None, hyp_cost: cost },
                    );
                }
            }
        } else {
            // A final state: substitute the recognized phrase into every
            // waiting analysis at its origin.
            if self.indexed_finals.insert(r) {
                self.finals_by_origin[key.origin as usize].push(r);
            }
            let lhs = rule.lhs.clone();
            let origin = key.origin as usize;
            let waiting: Vec<(StateKey, Cost)> = self
                .chart
                .stateset(origin)
                .map(|(k, entry)| (*k, entry.error))
                .collect();
            for (wkey, werror) in waiting {
                self.pair(
                    StateRef { set: origin, key: wkey },
                    werror,
                    r,
                    error,
                    &lhs,
                );
            }
        }

        // Hypotheses available to every state, final or not.
        if let Some(params) = self.params {
            if i < n {
                let tok = self.chart.tags()[i].clone();
                let ctx = HypothesisContext {
                    within_fiducial: fiducial,
                    symbol_misused: self.g.is_misused(&tok),
                    delimited: false,
                };
                let cost = terminal_cost(TermErrorKind::Insertion, ctx, params);
                self.admit(
                    i + 1,
                    key,
                    error + cost,
                    Back { cause: Cause::InsErr, pred: Some(r), child: None, hyp_cost: cost },
                );
            }
            if i < n && !self.skips_from[i].is_empty() {
                let closes = self.skips_from[i].clone();
                let cost = phrase_cost(
                    PhraseErrorKind::Insertion,
                    HypothesisContext { delimited: true, ..Default::default() },
                    Cost::ZERO,
                    params,
                );
                for close in closes {
                    self.admit(
                        close + 1,
                        key,
                        error + cost,
                        Back { cause: Cause::SubstrIns, pred: Some(r), child: None, hyp_cost: cost },
                    );
                }
            }
        }

        // Waiting-side completion: pair with every recognized phrase that
        // starts here.
        let finals = self.finals_by_origin[i].clone();
        for fref in finals {
            if fref == r {
                continue;
            }
            let ferror = self
                .chart
                .entry_at(&fref)
                .expect("indexed finals are admitted")
                .error;
            let flhs = self.g.rule(fref.key.rule).lhs.clone();
            self.pair(r, error, fref, ferror, &flhs);
        }
    }

    /// Substitutes final state `fref` (a recognized `child_lhs` phrase with
    /// error `ferror`) into waiting state `wref`, trying phrase perfect
    /// match, phrase insertion, and (when enabled) phrase mutation.
    fn pair(
        &mut self,
        wref: StateRef,
        werror: Cost,
        fref: StateRef,
        ferror: Cost,
        child_lhs: &Symbol,
    ) {
        let wkey = wref.key;
        let wrule = self.g.rule(wkey.rule);
        let into = fref.set;
        if (wkey.dot as usize) < wrule.arity() {
            let expected = &wrule.rhs[wkey.dot as usize];
            if expected == child_lhs {
                self.admit(
                    into,
                    StateKey { dot: wkey.dot + 1, ..wkey },
                    werror + ferror,
                    Back {
                        cause: Cause::PhraseComplete,
                        pred: Some(wref),
                        child: Some(fref),
                        hyp_cost: Cost::ZERO,
                    },
                );
            } else if expected.is_nonterminal() {
                if let Some(beta_mutation) = self.phrase_mutation {
                    self.admit(
                        into,
                        StateKey { dot: wkey.dot + 1, ..wkey },
                        werror + beta_mutation + ferror,
                        Back {
                            cause: Cause::PhraseMut,
                            pred: Some(wref),
                            child: Some(fref),
                            hyp_cost: beta_mutation,
                        },
                    );
                }
            }
        }
        if let Some(params) = self.params {
            let span_start = wref.set;
            let delimited = into > span_start && {
                let tags = self.chart.tags();
                self.g
                    .pair_delimiters()
                    .iter()
                    .any(|(o, c)| *o == tags[span_start] && *c == tags[into - 1])
            };
            let ctx = HypothesisContext { delimited, ..Default::default() };
            let hyp = phrase_cost(PhraseErrorKind::Insertion, ctx, Cost::ZERO, params);
            self.admit(
                into,
                wkey,
                werror + hyp + ferror,
                Back { cause: Cause::PhraseIns, pred: Some(wref), child: Some(fref), hyp_cost: hyp },
            );
        }
    }

    /// Runs the search. Under best-first the loop stops once `max_trees`
    /// analyses are extractable and every pending state is more expensive
    /// than the costliest goal found (so tied derivations are saturated);
    /// FIFO runs to exhaustion.
    pub(crate) fn run(&mut self, seed: Option<&Chart>, max_trees: usize) -> RunOutcome {
        self.seed_predictions();
        if let Some(seed_chart) = seed {
            self.chart.absorb(seed_chart);
        }
        let early_stop =
            max_trees != usize::MAX && matches!(self.strategy(), Strategy::BestFirst);
        let mut frozen_count: Option<(usize, usize)> = None;
        while let Some(min_pending) = self.chart.peek_min() {
            if early_stop && !self.goals.is_empty() {
                let worst_goal = self
                    .goals
                    .iter()
                    .map(|k| self.chart.entry(self.chart.input_len(), k).unwrap().error)
                    .max()
                    .unwrap();
                if min_pending > worst_goal {
                    let count = match frozen_count {
                        Some((glen, c)) if glen == self.goals.len() => c,
                        _ => {
                            let c = self.extract(max_trees).len();
                            frozen_count = Some((self.goals.len(), c));
                            c
                        }
                    };
                    if count >= max_trees {
                        break;
                    }
                }
            }
            let Some((r, error)) = self.chart.pop_min() else { break };
            if self.is_goal(&r) && self.goal_set.insert(r.key) {
                self.goals.push(r.key);
            }
            self.process(r, error);
        }
        let trees = self.extract(max_trees);
        RunOutcome { trees }
    }

    fn strategy(&self) -> Strategy {
        // The chart owns the agenda; recover the discipline from options
        // recorded at construction.
        self.chart.strategy()
    }

    fn extract(&self, max_trees: usize) -> Vec<ParseTree> {
        extract_trees(&self.chart, self.g, max_trees)
    }

    pub(crate) fn into_chart(self) -> Chart {
        self.chart
    }
}

pub(crate) struct RunOutcome {
    pub trees: Vec<ParseTree>,
}

/// Walks backpointers from every goal state and reconstructs analyses in
/// ascending error order, at most `max_trees` of them. Ties are broken by
/// stateset iteration order and a canonical backpointer ordering.
pub fn extract_trees(chart: &Chart, grammar: &Grammar, max_trees: usize) -> Vec<ParseTree> {
    if max_trees == 0 {
        return Vec::new();
    }
    let n = chart.input_len();
    let mut goals: Vec<(Cost, StateKey)> = chart
        .goal_keys(grammar)
        .into_iter()
        .map(|k| (chart.entry(n, &k).unwrap().error, k))
        .collect();
    goals.sort();
    let mut out: Vec<ParseTree> = Vec::new();
    let mut seen = BTreeSet::new();
    for (error, key) in goals {
        let mut active = Vec::new();
        let budget = max_trees - out.len();
        for root in phrase_variants(chart, grammar, StateRef { set: n, key }, budget, &mut active)
        {
            let tree = ParseTree { root, error };
            if seen.insert(tree.to_string()) {
                out.push(tree);
            }
            if out.len() >= max_trees {
                return out;
            }
        }
    }
    out
}

/// All derivations of a recognized phrase, as phrase nodes, capped.
fn phrase_variants(
    chart: &Chart,
    grammar: &Grammar,
    fref: StateRef,
    cap: usize,
    active: &mut Vec<StateRef>,
) -> Vec<TreeNode> {
    if cap == 0 || active.contains(&fref) {
        return Vec::new();
    }
    active.push(fref);
    let lists = item_variants(chart, grammar, fref, cap, active);
    active.pop();
    let label = grammar.rule(fref.key.rule).lhs.clone();
    lists
        .into_iter()
        .map(|children| TreeNode::Phrase { label: label.clone(), children, hyp: None })
        .collect()
}

/// All ways the first `dot` components of a state's rule (plus interleaved
/// hypothesis material) can have been built, as child-node lists.
fn item_variants(
    chart: &Chart,
    grammar: &Grammar,
    r: StateRef,
    cap: usize,
    active: &mut Vec<StateRef>,
) -> Vec<Vec<TreeNode>> {
    let entry = chart.entry_at(&r).expect("backpointers reference admitted states");
    let mut backs = entry.backs.clone();
    backs.sort();
    let rule = grammar.rule(r.key.rule);
    let mut out: Vec<Vec<TreeNode>> = Vec::new();
    for back in backs {
        if out.len() >= cap {
            break;
        }
        match back.cause {
            Cause::Predict => {
                debug_assert_eq!(r.key.dot, 0);
                out.push(Vec::new());
            }
            Cause::PerfectMatch => {
                let pred = back.pred.expect("scan causes have predecessors");
                let leaf = TreeNode::Leaf {
                    symbol: rule.rhs[r.key.dot as usize - 1].clone(),
                    hyp: None,
                };
                extend_with(chart, grammar, pred, leaf, cap, active, &mut out);
            }
            Cause::MutErr => {
                let pred = back.pred.expect("scan causes have predecessors");
                let leaf = TreeNode::Leaf {
                    symbol: chart.tags()[pred.set].clone(),
                    hyp: Some(Hyp::TermMut {
                        expected: rule.rhs[r.key.dot as usize - 1].clone(),
                        cost: back.hyp_cost,
                    }),
                };
                extend_with(chart, grammar, pred, leaf, cap, active, &mut out);
            }
            Cause::InsErr => {
                let pred = back.pred.expect("scan causes have predecessors");
                let leaf = TreeNode::Leaf {
                    symbol: chart.tags()[pred.set].clone(),
                    hyp: Some(Hyp::TermIns { cost: back.hyp_cost }),
                };
                extend_with(chart, grammar, pred, leaf, cap, active, &mut out);
            }
            Cause::DelErr => {
                let pred = back.pred.expect("scan causes have predecessors");
                let leaf = TreeNode::Leaf {
                    symbol: rule.rhs[r.key.dot as usize - 1].clone(),
                    hyp: Some(Hyp::TermDel { cost: back.hyp_cost }),
                };
                extend_with(chart, grammar, pred, leaf, cap, active, &mut out);
            }
            Cause::PhraseDel => {
                let pred = back.pred.expect("hypothesis causes have predecessors");
                let leaf = TreeNode::Leaf {
                    symbol: rule.rhs[r.key.dot as usize - 1].clone(),
                    hyp: Some(Hyp::PhraseDel { cost: back.hyp_cost }),
                };
                extend_with(chart, grammar, pred, leaf, cap, active, &mut out);
            }
            Cause::SubstrIns => {
                let pred = back.pred.expect("hypothesis causes have predecessors");
                let children: Vec<TreeNode> = chart.tags()[pred.set..r.set]
                    .iter()
                    .map(|t| TreeNode::Leaf { symbol: t.clone(), hyp: None })
                    .collect();
                let node = TreeNode::Phrase {
                    label: Symbol::nonterminal(SUBSTRING_LABEL).expect("valid label"),
                    children,
                    hyp: Some(Hyp::PhraseIns { cost: back.hyp_cost }),
                };
                extend_with(chart, grammar, pred, node, cap, active, &mut out);
            }
            Cause::PhraseComplete | Cause::PhraseIns | Cause::PhraseMut => {
                let pred = back.pred.expect("completion causes have predecessors");
                let child = back.child.expect("completion causes have children");
                let prefixes = item_variants(chart, grammar, pred, cap, active);
                let subtrees = phrase_variants(chart, grammar, child, cap, active);
                'outer: for prefix in &prefixes {
                    for subtree in &subtrees {
                        if out.len() >= cap {
                            break 'outer;
                        }
                        let mut subtree = subtree.clone();
                        if let TreeNode::Phrase { hyp, .. } = &mut subtree {
                            *hyp = match back.cause {
                                Cause::PhraseIns => Some(Hyp::PhraseIns { cost: back.hyp_cost }),
                                Cause::PhraseMut => Some(Hyp::PhraseMut {
                                    expected: rule.rhs[r.key.dot as usize - 1].clone(),
                                    cost: back.hyp_cost,
                                }),
                                _ => None,
                            };
                        }
                        let mut list = prefix.clone();
                        list.push(subtree);
                        out.push(list);
                    }
                }
            }
        }
    }
    out
}

fn extend_with(
    chart: &Chart,
    grammar: &Grammar,
    pred: StateRef,
    item: TreeNode,
    cap: usize,
    active: &mut Vec<StateRef>,
    out: &mut Vec<Vec<TreeNode>>,
) {
    for mut list in item_variants(chart, grammar, pred, cap, active) {
        list.push(item.clone());
        out.push(list);
        if out.len() >= cap {
            break;
        }
    }
}
