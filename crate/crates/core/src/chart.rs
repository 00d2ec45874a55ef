//! Chart machinery shared by the normal and recovery passes: statesets
//! with dominance filtering, provenance backpointers, and a cost-ordered
//! agenda.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, BTreeMap, VecDeque};
use std::fmt;

use crate::cost::Cost;
use crate::grammar::{Grammar, Symbol};

/// Dominance key of a state: rule index, dot position (symbols consumed),
/// and origin. At most one error value is stored per key per stateset.
///
/// The ordering is the stateset iteration order: descending origin, then
/// ascending rule, then ascending dot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateKey {
    pub rule: u32,
    pub dot: u32,
    pub origin: u32,
}

impl Ord for StateKey {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .origin
            .cmp(&self.origin)
            .then(self.rule.cmp(&other.rule))
            .then(self.dot.cmp(&other.dot))
    }
}

impl PartialOrd for StateKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A state to admit: key plus its error value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct State {
    pub key: StateKey,
    pub error: Cost,
}

/// Reference to an admitted state: stateset index plus key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateRef {
    pub set: usize,
    pub key: StateKey,
}

/// How a state came to be admitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cause {
    Predict,
    PerfectMatch,
    InsErr,
    DelErr,
    MutErr,
    PhraseComplete,
    PhraseIns,
    PhraseDel,
    PhraseMut,
    SubstrIns,
}

impl fmt::Display for Cause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Cause::Predict => "Predict",
            Cause::PerfectMatch => "PerfectMatch",
            Cause::InsErr => "InsErr",
            Cause::DelErr => "DelErr",
            Cause::MutErr => "MutErr",
            Cause::PhraseComplete => "PhraseComplete",
            Cause::PhraseIns => "PhraseIns",
            Cause::PhraseDel => "PhraseDel",
            Cause::PhraseMut => "PhraseMut",
            Cause::SubstrIns => "SubstrIns",
        };
        f.write_str(s)
    }
}

/// Provenance record: the cause, the predecessor state, the completed
/// child phrase where applicable, and the local hypothesis cost (zero for
/// error-free causes).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Back {
    pub cause: Cause,
    pub pred: Option<StateRef>,
    pub child: Option<StateRef>,
    pub hyp_cost: Cost,
}

impl Back {
    pub fn predict() -> Back {
        Back { cause: Cause::Predict, pred: None, child: None, hyp_cost: Cost::ZERO }
    }
}

/// Stored per (rule, dot, origin) key: the minimum error value ever
/// admitted and every backpointer achieving it.
#[derive(Debug, Clone)]
pub struct Entry {
    pub error: Cost,
    pub backs: Vec<Back>,
}

/// Outcome of an admission attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdmitOutcome {
    Admitted,
    ReplacedWorse,
    RejectedDominated,
    RejectedBudget,
}

/// Agenda discipline. Best-first realizes "plausible edges first"; FIFO
/// processes admissions in arrival order and must run to exhaustion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    BestFirst,
    Fifo,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct AgendaItem {
    error: Cost,
    set: usize,
    key: StateKey,
}

impl Ord for AgendaItem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .cmp(&other.error)
            .then(self.set.cmp(&other.set))
            .then(self.key.cmp(&other.key))
    }
}

impl PartialOrd for AgendaItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug)]
enum Agenda {
    BestFirst(BinaryHeap<std::cmp::Reverse<AgendaItem>>),
    Fifo(VecDeque<AgendaItem>),
}

impl Agenda {
    fn push(&mut self, item: AgendaItem) {
        match self {
            Agenda::BestFirst(h) => h.push(std::cmp::Reverse(item)),
            Agenda::Fifo(q) => q.push_back(item),
        }
    }

    fn pop(&mut self) -> Option<AgendaItem> {
        match self {
            Agenda::BestFirst(h) => h.pop().map(|r| r.0),
            Agenda::Fifo(q) => q.pop_front(),
        }
    }

    fn peek(&self) -> Option<&AgendaItem> {
        match self {
            Agenda::BestFirst(h) => h.peek().map(|r| &r.0),
            Agenda::Fifo(q) => q.front(),
        }
    }
}

/// One admission-log event, kept when logging is enabled.
#[derive(Debug, Clone)]
pub struct LogEvent {
    pub set: usize,
    pub state: State,
    pub cause: Cause,
    pub outcome: AdmitOutcome,
}

/// Admission and search counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub admitted: u64,
    pub replaced: u64,
    pub rejected_dominated: u64,
    pub rejected_budget: u64,
    pub popped: u64,
}

impl SearchStats {
    /// Successful admissions: new states plus replacements.
    pub fn admissions(&self) -> u64 {
        self.admitted + self.replaced
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartError {
    pub position: usize,
    pub len: usize,
}

impl fmt::Display for ChartError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "stateset index {} out of range (input length {})",
            self.position, self.len
        )
    }
}

impl std::error::Error for ChartError {}

/// The chart for one sentence: statesets over input positions 0..=n, the
/// agenda, and the optional error budget.
#[derive(Debug)]
pub struct Chart {
    tags: Vec<Symbol>,
    sets: Vec<BTreeMap<StateKey, Entry>>,
    agenda: Agenda,
    strategy: Strategy,
    budget: Option<Cost>,
    pub stats: SearchStats,
    log: Option<Vec<LogEvent>>,
}

impl Chart {
    pub fn new(tags: Vec<Symbol>, budget: Option<Cost>, strategy: Strategy, keep_log: bool) -> Chart {
        let n = tags.len();
        Chart {
            tags,
            sets: (0..=n).map(|_| BTreeMap::new()).collect(),
            agenda: match strategy {
                Strategy::BestFirst => Agenda::BestFirst(BinaryHeap::new()),
                Strategy::Fifo => Agenda::Fifo(VecDeque::new()),
            },
            strategy,
            budget,
            stats: SearchStats::default(),
            log: keep_log.then(Vec::new),
        }
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// Merges another chart's states into this one, keeping per-key minima
    /// and enqueueing everything taken over. Used to reuse the normal
    /// pass's chart as the starting point of the recovery pass; absorbed
    /// states are not counted as fresh admissions.
    pub fn absorb(&mut self, other: &Chart) {
        debug_assert_eq!(self.tags, other.tags);
        for (set, states) in other.sets.iter().enumerate() {
            for (key, entry) in states {
                if let Some(budget) = self.budget {
                    if entry.error > budget {
                        continue;
                    }
                }
                let slot = self.sets[set].entry(*key);
                match slot {
                    std::collections::btree_map::Entry::Occupied(mut occ) => {
                        let mine = occ.get_mut();
                        if entry.error < mine.error {
                            mine.error = entry.error;
                            mine.backs = entry.backs.clone();
                            self.agenda.push(AgendaItem { error: entry.error, set, key: *key });
                        } else if entry.error == mine.error {
                            for b in &entry.backs {
                                if !mine.backs.contains(b) {
                                    mine.backs.push(b.clone());
                                }
                            }
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(vac) => {
                        vac.insert(entry.clone());
                        self.agenda.push(AgendaItem { error: entry.error, set, key: *key });
                    }
                }
            }
        }
    }

    /// Input length n; statesets run 0..=n.
    pub fn input_len(&self) -> usize {
        self.tags.len()
    }

    pub fn tags(&self) -> &[Symbol] {
        &self.tags
    }

    pub fn budget(&self) -> Option<Cost> {
        self.budget
    }

    pub fn entry(&self, set: usize, key: &StateKey) -> Option<&Entry> {
        self.sets.get(set).and_then(|s| s.get(key))
    }

    pub fn entry_at(&self, r: &StateRef) -> Option<&Entry> {
        self.entry(r.set, &r.key)
    }

    /// Iterates stateset `i` in the canonical order (descending origin,
    /// ascending rule, ascending dot).
    pub fn stateset(&self, set: usize) -> impl Iterator<Item = (&StateKey, &Entry)> {
        self.sets[set].iter()
    }

    pub fn log(&self) -> Option<&[LogEvent]> {
        self.log.as_deref()
    }

    /// Admits `state` into stateset `set`, applying the dominance rule:
    /// an existing entry with error no greater than the candidate rejects
    /// it (ties contribute an extra backpointer); a worse entry is
    /// replaced and re-enqueued. Budget violations are rejected outright.
    pub fn admit(
        &mut self,
        set: usize,
        state: State,
        back: Back,
    ) -> Result<AdmitOutcome, ChartError> {
        if set >= self.sets.len() {
            return Err(ChartError { position: set, len: self.tags.len() });
        }
        let cause = back.cause;
        let outcome = self.admit_inner(set, state, back);
        match outcome {
            AdmitOutcome::Admitted => self.stats.admitted += 1,
            AdmitOutcome::ReplacedWorse => self.stats.replaced += 1,
            AdmitOutcome::RejectedDominated => self.stats.rejected_dominated += 1,
            AdmitOutcome::RejectedBudget => self.stats.rejected_budget += 1,
        }
        if let Some(log) = &mut self.log {
            log.push(LogEvent { set, state, cause, outcome });
        }
        Ok(outcome)
    }

    fn admit_inner(&mut self, set: usize, state: State, back: Back) -> AdmitOutcome {
        if let Some(budget) = self.budget {
            if state.error > budget {
                return AdmitOutcome::RejectedBudget;
            }
        }
        let slot = self.sets[set].entry(state.key);
        match slot {
            std::collections::btree_map::Entry::Occupied(mut occ) => {
                let entry = occ.get_mut();
                if entry.error < state.error {
                    AdmitOutcome::RejectedDominated
                } else if entry.error == state.error {
                    if !entry.backs.contains(&back) {
                        entry.backs.push(back);
                    }
                    AdmitOutcome::RejectedDominated
                } else {
                    entry.error = state.error;
                    entry.backs = vec![back];
                    self.agenda.push(AgendaItem { error: state.error, set, key: state.key });
                    AdmitOutcome::ReplacedWorse
                }
            }
            std::collections::btree_map::Entry::Vacant(vac) => {
                vac.insert(Entry { error: state.error, backs: vec![back] });
                self.agenda.push(AgendaItem { error: state.error, set, key: state.key });
                AdmitOutcome::Admitted
            }
        }
    }

    /// Pops the next pending state. Under best-first this is a state of
    /// globally minimal error value; stale agenda entries (superseded by a
    /// cheaper replacement) are skipped. Returns `None` when exhausted.
    pub fn pop_min(&mut self) -> Option<(StateRef, Cost)> {
        while let Some(item) = self.agenda.pop() {
            let current = self.sets[item.set]
                .get(&item.key)
                .expect("agenda items reference admitted states")
                .error;
            if current < item.error {
                continue; // stale
            }
            self.stats.popped += 1;
            return Some((StateRef { set: item.set, key: item.key }, item.error));
        }
        None
    }

    /// Error value of the next non-stale pending state, without popping it.
    pub fn peek_min(&mut self) -> Option<Cost> {
        loop {
            let item = self.agenda.peek()?.clone();
            let current = self.sets[item.set]
                .get(&item.key)
                .expect("agenda items reference admitted states")
                .error;
            if current < item.error {
                self.agenda.pop();
                continue;
            }
            return Some(item.error);
        }
    }

    /// Final states in S(n) that span the whole input from position 0 and
    /// expand the start symbol, in stateset order.
    pub fn goal_keys(&self, grammar: &Grammar) -> Vec<StateKey> {
        let n = self.tags.len();
        self.sets[n]
            .keys()
            .filter(|k| {
                let rule = grammar.rule(k.rule);
                k.origin == 0
                    && k.dot as usize == rule.arity()
                    && rule.lhs == *grammar.start()
            })
            .copied()
            .collect()
    }

    /// The admission log in the debug dump format: one line per admitted
    /// state, `i (p j f e cause)` with 1-based dot positions and rule ids.
    pub fn dump(&self, grammar: &Grammar) -> String {
        let mut out = String::new();
        if let Some(log) = &self.log {
            for ev in log {
                if matches!(ev.outcome, AdmitOutcome::Admitted | AdmitOutcome::ReplacedWorse) {
                    out.push_str(&format!(
                        "{} ({} {} {} {} {})\n",
                        ev.set,
                        grammar.rule(ev.state.key.rule).id,
                        ev.state.key.dot + 1,
                        ev.state.key.origin,
                        ev.state.error,
                        ev.cause,
                    ));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{Rule, Symbol};

    fn key(rule: u32, dot: u32, origin: u32) -> StateKey {
        StateKey { rule, dot, origin }
    }

    fn sym_tags(names: &[&str]) -> Vec<Symbol> {
        names.iter().map(|n| Symbol::terminal(n).unwrap()).collect()
    }

    #[test]
    fn admit_dominance_examples() {
        let mut chart = Chart::new(sym_tags(&["a", "b"]), None, Strategy::BestFirst, false);
        let k = key(0, 1, 0);
        let out = chart
            .admit(1, State { key: k, error: Cost::ZERO }, Back::predict())
            .unwrap();
        assert_eq!(out, AdmitOutcome::Admitted);

        let out = chart
            .admit(1, State { key: k, error: Cost::from_centi(1040) }, Back::predict())
            .unwrap();
        assert_eq!(out, AdmitOutcome::RejectedDominated);
        assert_eq!(chart.entry(1, &k).unwrap().error, Cost::ZERO);
    }

    #[test]
    fn admit_replaces_worse() {
        let mut chart = Chart::new(sym_tags(&["a", "b"]), None, Strategy::BestFirst, false);
        let k = key(0, 1, 0);
        chart
            .admit(1, State { key: k, error: Cost::from_centi(1040) }, Back::predict())
            .unwrap();
        let out = chart
            .admit(1, State { key: k, error: Cost::ZERO }, Back::predict())
            .unwrap();
        assert_eq!(out, AdmitOutcome::ReplacedWorse);
        assert_eq!(chart.entry(1, &k).unwrap().error, Cost::ZERO);
    }

    #[test]
    fn admit_rejects_over_budget() {
        let mut chart = Chart::new(
            sym_tags(&["a"]),
            Some(Cost::from_centi(500)),
            Strategy::BestFirst,
            false,
        );
        let out = chart
            .admit(0, State { key: key(0, 0, 0), error: Cost::from_centi(501) }, Back::predict())
            .unwrap();
        assert_eq!(out, AdmitOutcome::RejectedBudget);
        // At the budget exactly is admissible.
        let out = chart
            .admit(0, State { key: key(0, 0, 0), error: Cost::from_centi(500) }, Back::predict())
            .unwrap();
        assert_eq!(out, AdmitOutcome::Admitted);
    }

    #[test]
    fn admit_out_of_range_errors() {
        let mut chart = Chart::new(sym_tags(&["a"]), None, Strategy::BestFirst, false);
        let err = chart
            .admit(2, State { key: key(0, 0, 0), error: Cost::ZERO }, Back::predict())
            .unwrap_err();
        assert_eq!(err, ChartError { position: 2, len: 1 });
    }

    #[test]
    fn pop_min_returns_cheapest_and_exhausts() {
        let mut chart = Chart::new(sym_tags(&["a", "b"]), None, Strategy::BestFirst, false);
        chart
            .admit(0, State { key: key(0, 0, 0), error: Cost::from_centi(1020) }, Back::predict())
            .unwrap();
        chart
            .admit(1, State { key: key(1, 0, 0), error: Cost::from_centi(540) }, Back::predict())
            .unwrap();
        let (r, e) = chart.pop_min().unwrap();
        assert_eq!(e, Cost::from_centi(540));
        assert_eq!(r.key, key(1, 0, 0));
        assert!(chart.pop_min().is_some());
        assert!(chart.pop_min().is_none());
    }

    #[test]
    fn pop_min_skips_stale_entries() {
        let mut chart = Chart::new(sym_tags(&["a"]), None, Strategy::BestFirst, false);
        let k = key(0, 1, 0);
        chart
            .admit(1, State { key: k, error: Cost::from_centi(1040) }, Back::predict())
            .unwrap();
        chart
            .admit(1, State { key: k, error: Cost::ZERO }, Back::predict())
            .unwrap();
        let (r, e) = chart.pop_min().unwrap();
        assert_eq!((r.key, e), (k, Cost::ZERO));
        assert!(chart.pop_min().is_none(), "the stale 10.4 entry must be skipped");
    }

    #[test]
    fn equal_cost_admission_records_extra_back() {
        let mut chart = Chart::new(sym_tags(&["a"]), None, Strategy::BestFirst, false);
        let k = key(0, 1, 0);
        chart
            .admit(1, State { key: k, error: Cost::ZERO }, Back::predict())
            .unwrap();
        let other = Back {
            cause: Cause::PerfectMatch,
            pred: Some(StateRef { set: 0, key: key(0, 0, 0) }),
            child: None,
            hyp_cost: Cost::ZERO,
        };
        let out = chart.admit(1, State { key: k, error: Cost::ZERO }, other).unwrap();
        assert_eq!(out, AdmitOutcome::RejectedDominated);
        assert_eq!(chart.entry(1, &k).unwrap().backs.len(), 2);
    }

    #[test]
    fn stateset_iterates_in_canonical_order() {
        let mut chart = Chart::new(sym_tags(&["a", "b", "c"]), None, Strategy::BestFirst, false);
        for k in [key(1, 0, 0), key(0, 1, 2), key(0, 0, 2), key(2, 0, 1)] {
            chart.admit(3, State { key: k, error: Cost::ZERO }, Back::predict()).unwrap();
        }
        let order: Vec<StateKey> = chart.stateset(3).map(|(k, _)| *k).collect();
        // Descending origin, then rule, then dot.
        assert_eq!(order, vec![key(0, 0, 2), key(0, 1, 2), key(2, 0, 1), key(1, 0, 0)]);
    }

    #[test]
    fn goal_keys_filters_final_start_spanning_states() {
        let s = Symbol::nonterminal("S").unwrap();
        let a = Symbol::terminal("a").unwrap();
        let g = crate::grammar::Grammar::new(
            vec![
                Rule::new(1, s.clone(), vec![a.clone()], 1).unwrap(),
                Rule::new(2, Symbol::nonterminal("X").unwrap(), vec![a], 1).unwrap(),
            ],
            s,
        )
        .unwrap();
        let mut chart = Chart::new(sym_tags(&["a"]), None, Strategy::BestFirst, false);
        chart.admit(1, State { key: key(0, 1, 0), error: Cost::ZERO }, Back::predict()).unwrap();
        chart.admit(1, State { key: key(1, 1, 0), error: Cost::ZERO }, Back::predict()).unwrap(); // X, not start
        chart.admit(1, State { key: key(0, 0, 0), error: Cost::ZERO }, Back::predict()).unwrap(); // not final
        let goals = chart.goal_keys(&g);
        assert_eq!(goals, vec![key(0, 1, 0)]);
    }
}
