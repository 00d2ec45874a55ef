//! Symbols, rules, grammars, and grammar induction from bracketed trees.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::treebank::{BracketedTree, TreeChild};

/// Terminal (POS tag) or nonterminal (phrase label).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Terminal,
    Nonterminal,
}

/// A grammar symbol. Names are non-empty and contain no whitespace or
/// bracket characters; equality is over kind and name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    kind: SymbolKind,
    name: String,
}

/// An invalid symbol name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolError(pub String);

impl fmt::Display for SymbolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "invalid symbol name {:?}: must be non-empty with no whitespace or brackets",
            self.0
        )
    }
}

impl std::error::Error for SymbolError {}

impl Symbol {
    pub fn new(kind: SymbolKind, name: &str) -> Result<Symbol, SymbolError> {
        if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '(' || c == ')') {
            return Err(SymbolError(name.to_string()));
        }
        Ok(Symbol { kind, name: name.to_string() })
    }

    pub fn terminal(name: &str) -> Result<Symbol, SymbolError> {
        Symbol::new(SymbolKind::Terminal, name)
    }

    pub fn nonterminal(name: &str) -> Result<Symbol, SymbolError> {
        Symbol::new(SymbolKind::Nonterminal, name)
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_terminal(&self) -> bool {
        self.kind == SymbolKind::Terminal
    }

    pub fn is_nonterminal(&self) -> bool {
        self.kind == SymbolKind::Nonterminal
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A numbered production with a corpus frequency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: u32,
    pub lhs: Symbol,
    pub rhs: Vec<Symbol>,
    pub frequency: u32,
}

impl Rule {
    pub fn new(id: u32, lhs: Symbol, rhs: Vec<Symbol>, frequency: u32) -> Result<Rule, GrammarError> {
        if !lhs.is_nonterminal() {
            return Err(GrammarError::TerminalLhs { rule: id });
        }
        if rhs.is_empty() {
            return Err(GrammarError::EmptyRhs { rule: id });
        }
        if frequency == 0 {
            return Err(GrammarError::ZeroFrequency { rule: id });
        }
        Ok(Rule { id, lhs, rhs, frequency })
    }

    /// Number of components in the right-hand side.
    pub fn arity(&self) -> usize {
        self.rhs.len()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ->", self.lhs)?;
        for s in &self.rhs {
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GrammarError {
    NoRules,
    NoTrees,
    MalformedTree { index: usize, reason: String },
    TerminalLhs { rule: u32 },
    EmptyRhs { rule: u32 },
    ZeroFrequency { rule: u32 },
    DuplicateRuleId { rule: u32 },
    StartNotNonterminal,
    Format { line: usize, reason: String },
}

impl fmt::Display for GrammarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrammarError::NoRules => write!(f, "grammar has no rules"),
            GrammarError::NoTrees => write!(f, "no trees"),
            GrammarError::MalformedTree { index, reason } => {
                write!(f, "malformed tree at index {index}: {reason}")
            }
            GrammarError::TerminalLhs { rule } => {
                write!(f, "rule {rule}: left-hand side must be a nonterminal")
            }
            GrammarError::EmptyRhs { rule } => write!(f, "rule {rule}: empty right-hand side"),
            GrammarError::ZeroFrequency { rule } => write!(f, "rule {rule}: frequency must be >= 1"),
            GrammarError::DuplicateRuleId { rule } => write!(f, "duplicate rule id {rule}"),
            GrammarError::StartNotNonterminal => write!(f, "start symbol must be a nonterminal"),
            GrammarError::Format { line, reason } => write!(f, "line {line}: {reason}"),
        }
    }
}

impl std::error::Error for GrammarError {}

/// A validation diagnostic; all diagnostics are warnings, loading proceeds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "warning: {}", self.message)
    }
}

/// An immutable context-free grammar with frequencies and the symbol
/// classes the recovery heuristics consult.
#[derive(Debug, Clone)]
pub struct Grammar {
    rules: Vec<Rule>,
    start: Symbol,
    fiducials: BTreeSet<Symbol>,
    misused_terminals: BTreeSet<Symbol>,
    pair_delimiters: Vec<(Symbol, Symbol)>,
    by_lhs: BTreeMap<Symbol, Vec<u32>>,
    terminals: BTreeSet<Symbol>,
    nonterminals: BTreeSet<Symbol>,
}

fn default_fiducials() -> BTreeSet<Symbol> {
    [Symbol::nonterminal("NP").unwrap()].into_iter().collect()
}

fn default_misused() -> BTreeSet<Symbol> {
    ["comma", "period", "colon", "lparen", "rparen", "cc", "rp"]
        .iter()
        .map(|n| Symbol::terminal(n).unwrap())
        .collect()
}

fn default_pair_delimiters() -> Vec<(Symbol, Symbol)> {
    vec![
        (Symbol::terminal("comma").unwrap(), Symbol::terminal("comma").unwrap()),
        (Symbol::terminal("lparen").unwrap(), Symbol::terminal("rparen").unwrap()),
    ]
}

impl Grammar {
    /// Builds a grammar with the default heuristic symbol classes
    /// (fiducials `{NP}`, punctuation-class misused terminals, comma and
    /// parenthesis delimiter pairs).
    pub fn new(rules: Vec<Rule>, start: Symbol) -> Result<Grammar, GrammarError> {
        if rules.is_empty() {
            return Err(GrammarError::NoRules);
        }
        if !start.is_nonterminal() {
            return Err(GrammarError::StartNotNonterminal);
        }
        let mut seen = BTreeSet::new();
        for r in &rules {
            if !seen.insert(r.id) {
                return Err(GrammarError::DuplicateRuleId { rule: r.id });
            }
        }
        let mut by_lhs: BTreeMap<Symbol, Vec<u32>> = BTreeMap::new();
        let mut terminals = BTreeSet::new();
        let mut nonterminals = BTreeSet::new();
        for (ix, r) in rules.iter().enumerate() {
            by_lhs.entry(r.lhs.clone()).or_default().push(ix as u32);
            nonterminals.insert(r.lhs.clone());
            for s in &r.rhs {
                match s.kind() {
                    SymbolKind::Terminal => {
                        terminals.insert(s.clone());
                    }
                    SymbolKind::Nonterminal => {
                        nonterminals.insert(s.clone());
                    }
                }
            }
        }
        Ok(Grammar {
            rules,
            start,
            fiducials: default_fiducials(),
            misused_terminals: default_misused(),
            pair_delimiters: default_pair_delimiters(),
            by_lhs,
            terminals,
            nonterminals,
        })
    }

    pub fn with_fiducials(mut self, fiducials: BTreeSet<Symbol>) -> Grammar {
        self.fiducials = fiducials;
        self
    }

    pub fn with_misused_terminals(mut self, misused: BTreeSet<Symbol>) -> Grammar {
        self.misused_terminals = misused;
        self
    }

    pub fn with_pair_delimiters(mut self, pairs: Vec<(Symbol, Symbol)>) -> Grammar {
        self.pair_delimiters = pairs;
        self
    }

    pub fn with_start(mut self, start: Symbol) -> Result<Grammar, GrammarError> {
        if !start.is_nonterminal() {
            return Err(GrammarError::StartNotNonterminal);
        }
        self.start = start;
        Ok(self)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, ix: u32) -> &Rule {
        &self.rules[ix as usize]
    }

    pub fn start(&self) -> &Symbol {
        &self.start
    }

    pub fn fiducials(&self) -> &BTreeSet<Symbol> {
        &self.fiducials
    }

    pub fn misused_terminals(&self) -> &BTreeSet<Symbol> {
        &self.misused_terminals
    }

    pub fn pair_delimiters(&self) -> &[(Symbol, Symbol)] {
        &self.pair_delimiters
    }

    pub fn terminals(&self) -> &BTreeSet<Symbol> {
        &self.terminals
    }

    pub fn nonterminals(&self) -> &BTreeSet<Symbol> {
        &self.nonterminals
    }

    /// Rule indices (not ids) whose left-hand side is `lhs`.
    pub fn rules_for(&self, lhs: &Symbol) -> &[u32] {
        self.by_lhs.get(lhs).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_fiducial(&self, s: &Symbol) -> bool {
        self.fiducials.contains(s)
    }

    pub fn is_misused(&self, s: &Symbol) -> bool {
        self.misused_terminals.contains(s)
    }

    pub fn knows_terminal(&self, s: &Symbol) -> bool {
        self.terminals.contains(s)
    }

    /// Arithmetic mean of per-rule frequencies.
    pub fn mean_frequency(&self) -> f64 {
        let total: u64 = self.rules.iter().map(|r| u64::from(r.frequency)).sum();
        total as f64 / self.rules.len() as f64
    }

    /// Keeps exactly the rules whose frequency is at least the mean
    /// frequency; rule ids are preserved. The comparison is exact
    /// (`freq * count >= total`), not floating point.
    pub fn prune_by_average_frequency(&self) -> Grammar {
        let total: u64 = self.rules.iter().map(|r| u64::from(r.frequency)).sum();
        let count = self.rules.len() as u64;
        let kept: Vec<Rule> = self
            .rules
            .iter()
            .filter(|r| u64::from(r.frequency) * count >= total)
            .cloned()
            .collect();
        // The maximum-frequency rule always survives, so `kept` is non-empty.
        let mut g = Grammar::new(kept, self.start.clone()).expect("pruned grammar is non-empty");
        g.fiducials = self.fiducials.clone();
        g.misused_terminals = self.misused_terminals.clone();
        g.pair_delimiters = self.pair_delimiters.clone();
        g
    }

    /// Reports unreachable nonterminals, nonterminals with no expansion,
    /// and heuristic symbol classes absent from the grammar.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        for nt in &self.nonterminals {
            if !self.by_lhs.contains_key(nt) {
                diags.push(Diagnostic { message: format!("{nt} has no expansion") });
            }
        }
        // Reachability from the start symbol over rule right-hand sides.
        let mut reachable = BTreeSet::new();
        let mut queue = vec![self.start.clone()];
        while let Some(nt) = queue.pop() {
            if !reachable.insert(nt.clone()) {
                continue;
            }
            for &ix in self.rules_for(&nt) {
                for s in &self.rules[ix as usize].rhs {
                    if s.is_nonterminal() && !reachable.contains(s) {
                        queue.push(s.clone());
                    }
                }
            }
        }
        for nt in &self.nonterminals {
            if !reachable.contains(nt) {
                diags.push(Diagnostic { message: format!("{nt} is unreachable from {}", self.start) });
            }
        }
        for s in &self.fiducials {
            if !self.nonterminals.contains(s) {
                diags.push(Diagnostic { message: format!("fiducial {s} does not occur in the grammar") });
            }
        }
        for s in &self.misused_terminals {
            if !self.terminals.contains(s) {
                diags.push(Diagnostic {
                    message: format!("misused terminal {s} does not occur in the grammar"),
                });
            }
        }
        for (open, close) in &self.pair_delimiters {
            for s in [open, close] {
                if !self.terminals.contains(s) {
                    diags.push(Diagnostic {
                        message: format!("pair delimiter {s} does not occur in the grammar"),
                    });
                    break;
                }
            }
        }
        diags
    }

    /// Serializes as one rule per line: `<freq>\t<LHS> -> <sym> <sym> ...`,
    /// preceded by a `# start:` directive. Round-trips losslessly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# start: {}\n", self.start));
        for r in &self.rules {
            out.push_str(&format!("{}\t{}\n", r.frequency, r));
        }
        out
    }

    /// Parses the text format. Symbol kind is recovered from the case
    /// convention: a name starting with an ASCII uppercase letter is a
    /// nonterminal. Rule ids are assigned in file order starting at 1.
    pub fn from_text(text: &str) -> Result<Grammar, GrammarError> {
        let mut rules = Vec::new();
        let mut start: Option<Symbol> = None;
        let mut next_id = 1u32;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(name) = comment.trim().strip_prefix("start:") {
                    let name = name.trim();
                    start = Some(symbol_by_case(name).map_err(|e| GrammarError::Format {
                        line: lineno + 1,
                        reason: e.to_string(),
                    })?);
                }
                continue;
            }
            let (freq_part, rule_part) = line.split_once(char::is_whitespace).ok_or_else(|| {
                GrammarError::Format { line: lineno + 1, reason: "expected `<freq>\\t<LHS> -> ...`".into() }
            })?;
            let frequency: u32 = freq_part.parse().map_err(|_| GrammarError::Format {
                line: lineno + 1,
                reason: format!("bad frequency {freq_part:?}"),
            })?;
            let mut parts = rule_part.split_whitespace();
            let lhs_name = parts.next().ok_or_else(|| GrammarError::Format {
                line: lineno + 1,
                reason: "missing left-hand side".into(),
            })?;
            if parts.next() != Some("->") {
                return Err(GrammarError::Format { line: lineno + 1, reason: "missing `->`".into() });
            }
            let lhs = Symbol::nonterminal(lhs_name).map_err(|e| GrammarError::Format {
                line: lineno + 1,
                reason: e.to_string(),
            })?;
            let mut rhs = Vec::new();
            for name in parts {
                rhs.push(symbol_by_case(name).map_err(|e| GrammarError::Format {
                    line: lineno + 1,
                    reason: e.to_string(),
                })?);
            }
            if rhs.is_empty() {
                return Err(GrammarError::Format {
                    line: lineno + 1,
                    reason: "empty right-hand side".into(),
                });
            }
            rules.push(Rule::new(next_id, lhs, rhs, frequency)?);
            next_id += 1;
        }
        let start = match start {
            Some(s) => s,
            None => rules.first().map(|r| r.lhs.clone()).ok_or(GrammarError::NoRules)?,
        };
        Grammar::new(rules, start)
    }
}

fn symbol_by_case(name: &str) -> Result<Symbol, SymbolError> {
    if name.chars().next().is_some_and(|c| c.is_ascii_uppercase()) {
        Symbol::nonterminal(name)
    } else {
        Symbol::terminal(name)
    }
}

/// Extracts one rule per distinct `(lhs, rhs)` pair observed at the
/// internal nodes of the trees; terminals are the leaf POS tags, words are
/// discarded. Frequencies count occurrences; the start symbol is the most
/// frequent root label.
pub fn induce_grammar(trees: &[BracketedTree]) -> Result<Grammar, GrammarError> {
    if trees.is_empty() {
        return Err(GrammarError::NoTrees);
    }
    let mut counts: BTreeMap<(Symbol, Vec<Symbol>), u32> = BTreeMap::new();
    let mut order: Vec<(Symbol, Vec<Symbol>)> = Vec::new();
    let mut roots: BTreeMap<Symbol, u32> = BTreeMap::new();
    for (index, tree) in trees.iter().enumerate() {
        check_tree(tree, index)?;
        *roots.entry(tree.label.clone()).or_insert(0) += 1;
        collect_rules(tree, &mut counts, &mut order);
    }
    let rules: Vec<Rule> = order
        .iter()
        .enumerate()
        .map(|(ix, key)| {
            Rule::new(ix as u32 + 1, key.0.clone(), key.1.clone(), counts[key])
        })
        .collect::<Result<_, _>>()?;
    let start = roots
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
        .map(|(s, _)| s.clone())
        .expect("at least one tree");
    Grammar::new(rules, start)
}

fn check_tree(tree: &BracketedTree, index: usize) -> Result<(), GrammarError> {
    if tree.children.is_empty() {
        return Err(GrammarError::MalformedTree {
            index,
            reason: format!("node {} has no children", tree.label),
        });
    }
    for c in &tree.children {
        match c {
            TreeChild::Node(n) => check_tree(n, index)?,
            TreeChild::Leaf { word, tag } => {
                if word.is_empty() || !tag.is_terminal() {
                    return Err(GrammarError::MalformedTree {
                        index,
                        reason: "leaf is not a (word, tag) pair".into(),
                    });
                }
            }
        }
    }
    Ok(())
}

fn collect_rules(
    node: &BracketedTree,
    counts: &mut BTreeMap<(Symbol, Vec<Symbol>), u32>,
    order: &mut Vec<(Symbol, Vec<Symbol>)>,
) {
    let rhs: Vec<Symbol> = node
        .children
        .iter()
        .map(|c| match c {
            TreeChild::Node(n) => n.label.clone(),
            TreeChild::Leaf { tag, .. } => tag.clone(),
        })
        .collect();
    let key = (node.label.clone(), rhs);
    match counts.get_mut(&key) {
        Some(n) => *n += 1,
        None => {
            counts.insert(key.clone(), 1);
            order.push(key);
        }
    }
    for c in &node.children {
        if let TreeChild::Node(n) = c {
            collect_rules(n, counts, order);
        }
    }
}
