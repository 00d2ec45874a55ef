//! Annotated parse trees.
//!
//! The recovery pass produces labeled bracketings whose nodes may carry an
//! error-hypothesis annotation. The text form is a bracketed tree with
//! suffix markers:
//!
//! ```text
//! dt*INS(10.2)            inserted input token
//! nn*DEL(10.4)            deleted terminal (empty leaf)
//! vb*MUT(nn→vb,10.8)      grammar expected nn, input had vb
//! (NP ...)*PINS(NP,15)    inserted phrase
//! VP*PDEL(VP,20)          deleted phrase (empty leaf)
//! (B ...)*PMUT(A→B,12)    phrase in place of another (experimental)
//! ```
//!
//! A skipped delimited substring renders as a pseudo-phrase labeled
//! `SUBSTR` with a `*PINS` marker. Annotation costs are the local
//! hypothesis costs; a tree's error value is exactly their sum.

use std::fmt;

use crate::cost::Cost;
use crate::grammar::{Symbol, SymbolError};
use crate::treebank::Brackets;

pub const SUBSTRING_LABEL: &str = "SUBSTR";

/// Error-hypothesis annotation on a tree node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hyp {
    /// The input token under this leaf is hypothesized as inserted.
    TermIns { cost: Cost },
    /// The grammar terminal under this leaf is missing from the input.
    TermDel { cost: Cost },
    /// The grammar expected `expected`; the leaf shows the observed token.
    TermMut { expected: Symbol, cost: Cost },
    /// The whole phrase is hypothesized as inserted material.
    PhraseIns { cost: Cost },
    /// The nonterminal under this leaf is missing from the input.
    PhraseDel { cost: Cost },
    /// The grammar expected `expected`; the node shows the observed phrase.
    PhraseMut { expected: Symbol, cost: Cost },
}

impl Hyp {
    pub fn cost(&self) -> Cost {
        match self {
            Hyp::TermIns { cost }
            | Hyp::TermDel { cost }
            | Hyp::TermMut { cost, .. }
            | Hyp::PhraseIns { cost }
            | Hyp::PhraseDel { cost }
            | Hyp::PhraseMut { cost, .. } => *cost,
        }
    }
}

/// A node of an annotated parse tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeNode {
    Phrase {
        label: Symbol,
        children: Vec<TreeNode>,
        hyp: Option<Hyp>,
    },
    Leaf {
        /// The terminal occurrence (or, for phrase deletions, the deleted
        /// nonterminal).
        symbol: Symbol,
        hyp: Option<Hyp>,
    },
}

impl TreeNode {
    /// Number of input tokens this node covers. Deletion leaves cover none.
    pub fn width(&self) -> usize {
        match self {
            TreeNode::Leaf { hyp, .. } => match hyp {
                Some(Hyp::TermDel { .. }) | Some(Hyp::PhraseDel { .. }) => 0,
                _ => 1,
            },
            TreeNode::Phrase { children, .. } => children.iter().map(TreeNode::width).sum(),
        }
    }

    /// Sum of hypothesis costs over this subtree.
    pub fn hyp_cost_sum(&self) -> Cost {
        let own = match self {
            TreeNode::Leaf { hyp, .. } | TreeNode::Phrase { hyp, .. } => {
                hyp.as_ref().map_or(Cost::ZERO, Hyp::cost)
            }
        };
        match self {
            TreeNode::Leaf { .. } => own,
            TreeNode::Phrase { children, .. } => {
                own + children.iter().map(TreeNode::hyp_cost_sum).sum()
            }
        }
    }
}

/// A complete analysis: the root node plus its accumulated error value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTree {
    pub root: TreeNode,
    pub error: Cost,
}

impl ParseTree {
    /// Constituent spans in input-token offsets for crossing-bracket
    /// scoring. Zero-width nodes and nodes made purely of hypothesized
    /// insertion material contribute no span.
    pub fn brackets(&self) -> Brackets {
        let mut spans = std::collections::BTreeSet::new();
        let tokens = bracket_walk(&self.root, 0, &mut spans).0;
        Brackets { tokens, spans }
    }
}

/// Returns (end position, all-inserted flag). Spans are suppressed inside
/// hypothesized-insertion subtrees and for nodes that cover no real tokens.
fn bracket_walk(
    node: &TreeNode,
    start: usize,
    spans: &mut std::collections::BTreeSet<(String, usize, usize)>,
) -> (usize, bool) {
    walk_spans(node, start, spans, false)
}

fn walk_spans(
    node: &TreeNode,
    start: usize,
    spans: &mut std::collections::BTreeSet<(String, usize, usize)>,
    suppressed: bool,
) -> (usize, bool) {
    match node {
        TreeNode::Leaf { hyp, .. } => {
            let inserted = matches!(hyp, Some(Hyp::TermIns { .. }));
            (start + node.width(), inserted)
        }
        TreeNode::Phrase { label, children, hyp } => {
            let inserted_here = matches!(hyp, Some(Hyp::PhraseIns { .. }))
                || label.name() == SUBSTRING_LABEL;
            let suppress_below = suppressed || inserted_here;
            let mut pos = start;
            let mut all_inserted = true;
            let mut covered_any = false;
            for c in children {
                let (end, ins) = walk_spans(c, pos, spans, suppress_below);
                if end > pos {
                    covered_any = true;
                    all_inserted &= ins;
                }
                pos = end;
            }
            if !suppress_below && covered_any && !all_inserted {
                spans.insert((label.name().to_string(), start, pos));
            }
            (pos, inserted_here || !covered_any || all_inserted)
        }
    }
}

impl fmt::Display for TreeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeNode::Leaf { symbol, hyp } => {
                write!(f, "{symbol}")?;
                write_marker(f, symbol, hyp.as_ref())
            }
            TreeNode::Phrase { label, children, hyp } => {
                write!(f, "({label}")?;
                for c in children {
                    write!(f, " {c}")?;
                }
                write!(f, ")")?;
                write_marker(f, label, hyp.as_ref())
            }
        }
    }
}

fn write_marker(f: &mut fmt::Formatter<'_>, own: &Symbol, hyp: Option<&Hyp>) -> fmt::Result {
    match hyp {
        None => Ok(()),
        Some(Hyp::TermIns { cost }) => write!(f, "*INS({cost})"),
        Some(Hyp::TermDel { cost }) => write!(f, "*DEL({cost})"),
        Some(Hyp::TermMut { expected, cost }) => write!(f, "*MUT({expected}\u{2192}{own},{cost})"),
        Some(Hyp::PhraseIns { cost }) => write!(f, "*PINS({own},{cost})"),
        Some(Hyp::PhraseDel { cost }) => write!(f, "*PDEL({own},{cost})"),
        Some(Hyp::PhraseMut { expected, cost }) => write!(f, "*PMUT({expected}\u{2192}{own},{cost})"),
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)
    }
}

/// Errors from parsing the annotated tree text form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeParseError {
    Unbalanced,
    Empty,
    BadMarker(String),
    BadSymbol(SymbolError),
    Trailing(String),
}

impl fmt::Display for TreeParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeParseError::Unbalanced => write!(f, "unbalanced brackets"),
            TreeParseError::Empty => write!(f, "empty tree"),
            TreeParseError::BadMarker(m) => write!(f, "bad annotation marker {m:?}"),
            TreeParseError::BadSymbol(e) => write!(f, "{e}"),
            TreeParseError::Trailing(t) => write!(f, "trailing input {t:?}"),
        }
    }
}

impl std::error::Error for TreeParseError {}

struct TreeParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> TreeParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn text(&self, start: usize) -> &'a str {
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii boundaries")
    }

    fn atom(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.src.len() {
            let b = self.src[self.pos];
            if b.is_ascii_whitespace() || b == b'(' || b == b')' {
                break;
            }
            self.pos += 1;
        }
        self.text(start)
    }

    /// Reads a `*MARK(args)` suffix if present at the cursor.
    fn marker(&mut self) -> Result<Option<(String, String)>, TreeParseError> {
        if self.pos >= self.src.len() || self.src[self.pos] != b'*' {
            return Ok(None);
        }
        let save = self.pos;
        self.pos += 1;
        let name_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_uppercase() {
            self.pos += 1;
        }
        let name = self.text(name_start).to_string();
        if self.pos >= self.src.len() || self.src[self.pos] != b'(' {
            self.pos = save;
            return Ok(None);
        }
        self.pos += 1;
        let args_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos] != b')' {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Err(TreeParseError::BadMarker(
                String::from_utf8_lossy(&self.src[save..]).into_owned(),
            ));
        }
        let args = self.text(args_start).to_string();
        self.pos += 1; // consume ')'
        Ok(Some((name, args)))
    }

    fn node(&mut self) -> Result<TreeNode, TreeParseError> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Err(TreeParseError::Empty);
        }
        if self.src[self.pos] == b'(' {
            self.pos += 1;
            self.skip_ws();
            let label_name = self.atom();
            if label_name.is_empty() {
                return Err(TreeParseError::Empty);
            }
            let label =
                Symbol::nonterminal(label_name).map_err(TreeParseError::BadSymbol)?;
            let mut children = Vec::new();
            loop {
                self.skip_ws();
                if self.pos >= self.src.len() {
                    return Err(TreeParseError::Unbalanced);
                }
                if self.src[self.pos] == b')' {
                    self.pos += 1;
                    break;
                }
                children.push(self.node()?);
            }
            if children.is_empty() {
                return Err(TreeParseError::Empty);
            }
            let hyp = self.parse_marker_for(&label)?;
            Ok(TreeNode::Phrase { label, children, hyp })
        } else {
            let atom = self.atom();
            if atom.is_empty() {
                return Err(TreeParseError::Unbalanced);
            }
            // A marker is glued to its leaf: the atom scan stops at the
            // marker's '(' and leaves `nn*DEL` behind. Split the marker
            // name off and rewind so the marker parser sees the '*'.
            let mut name_part = atom;
            if self.pos < self.src.len() && self.src[self.pos] == b'(' {
                if let Some(star) = atom.rfind('*') {
                    let tail = &atom[star + 1..];
                    if !tail.is_empty() && tail.bytes().all(|b| b.is_ascii_uppercase()) {
                        name_part = &atom[..star];
                        self.pos -= atom.len() - star;
                    }
                }
            }
            if name_part.is_empty() {
                return Err(TreeParseError::BadMarker(atom.to_string()));
            }
            let symbol = leaf_symbol(name_part).map_err(TreeParseError::BadSymbol)?;
            let hyp = self.parse_marker_for(&symbol)?;
            let symbol = match &hyp {
                // Deleted-phrase leaves carry a nonterminal symbol.
                Some(Hyp::PhraseDel { .. }) => {
                    Symbol::nonterminal(name_part).map_err(TreeParseError::BadSymbol)?
                }
                _ => symbol,
            };
            Ok(TreeNode::Leaf { symbol, hyp })
        }
    }

    fn parse_marker_for(&mut self, own: &Symbol) -> Result<Option<Hyp>, TreeParseError> {
        let Some((name, args)) = self.marker()? else {
            return Ok(None);
        };
        let bad = || TreeParseError::BadMarker(format!("*{name}({args})"));
        let cost_of = |s: &str| s.parse::<Cost>().map_err(|_| bad());
        let hyp = match name.as_str() {
            "INS" => Hyp::TermIns { cost: cost_of(&args)? },
            "DEL" => Hyp::TermDel { cost: cost_of(&args)? },
            "MUT" | "PMUT" => {
                let (pair, cost) = args.rsplit_once(',').ok_or_else(bad)?;
                let (expected, observed) = pair.split_once('\u{2192}').ok_or_else(bad)?;
                if observed != own.name() {
                    return Err(bad());
                }
                if name == "MUT" {
                    Hyp::TermMut {
                        expected: Symbol::terminal(expected).map_err(TreeParseError::BadSymbol)?,
                        cost: cost_of(cost)?,
                    }
                } else {
                    Hyp::PhraseMut {
                        expected: Symbol::nonterminal(expected).map_err(TreeParseError::BadSymbol)?,
                        cost: cost_of(cost)?,
                    }
                }
            }
            "PINS" | "PDEL" => {
                let (label, cost) = args.rsplit_once(',').ok_or_else(bad)?;
                if label != own.name() {
                    return Err(bad());
                }
                if name == "PINS" {
                    Hyp::PhraseIns { cost: cost_of(cost)? }
                } else {
                    Hyp::PhraseDel { cost: cost_of(cost)? }
                }
            }
            _ => return Err(bad()),
        };
        Ok(Some(hyp))
    }
}

fn leaf_symbol(name: &str) -> Result<Symbol, SymbolError> {
    Symbol::terminal(name)
}

/// Parses one annotated tree from its text form.
pub fn parse_annotated(text: &str) -> Result<ParseTree, TreeParseError> {
    let mut p = TreeParser { src: text.as_bytes(), pos: 0 };
    let root = p.node()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(TreeParseError::Trailing(
            String::from_utf8_lossy(&p.src[p.pos..]).into_owned(),
        ));
    }
    let error = root.hyp_cost_sum();
    Ok(ParseTree { root, error })
}
