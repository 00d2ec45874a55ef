//! Bracketed-tree and tagged-sentence file formats.
//!
//! Trees are Penn-style labeled bracketings with `word/tag` leaves. Node
//! labels are normalized to uppercase and tags to lowercase; punctuation
//! tags are renamed to word forms (`,` becomes `comma`) so that symbol
//! names never contain brackets or separators.

use std::collections::BTreeSet;
use std::fmt;

use crate::grammar::{Symbol, SymbolError};

/// A node of a bracketed tree: a label over a non-empty child sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketedTree {
    pub label: Symbol,
    pub children: Vec<TreeChild>,
}

/// A child is either an inner node or a `word/tag` leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeChild {
    Node(BracketedTree),
    Leaf { word: String, tag: Symbol },
}

impl BracketedTree {
    /// Number of leaves under this node.
    pub fn leaf_count(&self) -> usize {
        self.children
            .iter()
            .map(|c| match c {
                TreeChild::Node(n) => n.leaf_count(),
                TreeChild::Leaf { .. } => 1,
            })
            .sum()
    }

    /// The tag sequence at the leaves, left to right.
    pub fn tag_yield(&self) -> Vec<Symbol> {
        let mut tags = Vec::new();
        self.collect_tags(&mut tags);
        tags
    }

    fn collect_tags(&self, out: &mut Vec<Symbol>) {
        for c in &self.children {
            match c {
                TreeChild::Node(n) => n.collect_tags(out),
                TreeChild::Leaf { tag, .. } => out.push(tag.clone()),
            }
        }
    }
}

impl fmt::Display for BracketedTree {
    /// Single-line bracketing with single spaces; the canonical written form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.label.name())?;
        for c in &self.children {
            match c {
                TreeChild::Node(n) => write!(f, " {n}")?,
                TreeChild::Leaf { word, tag } => write!(f, " {}/{}", word, tag.name())?,
            }
        }
        write!(f, ")")
    }
}

/// Result of reading a treebank text: the trees plus non-fatal warnings
/// (dropped trace leaves and the like).
#[derive(Debug, Clone, Default)]
pub struct TreebankFile {
    pub trees: Vec<BracketedTree>,
    pub warnings: Vec<String>,
}

/// A tagged input sentence: 1-based sentence number and its tag sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedSentence {
    pub id: usize,
    pub tags: Vec<Symbol>,
}

/// Errors raised by the readers, with 1-based line locations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreebankError {
    Unbalanced { line: usize },
    EmptyNode { line: usize },
    BadLeaf { line: usize, token: String },
    BadSymbol { line: usize, source: SymbolError },
    Trailing { line: usize },
}

impl fmt::Display for TreebankError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreebankError::Unbalanced { line } => write!(f, "unbalanced at line {line}"),
            TreebankError::EmptyNode { line } => write!(f, "empty node at line {line}"),
            TreebankError::BadLeaf { line, token } => {
                write!(f, "line {line}: leaf token {token:?} is not word/tag")
            }
            TreebankError::BadSymbol { line, source } => write!(f, "line {line}: {source}"),
            TreebankError::Trailing { line } => write!(f, "stray ')' at line {line}"),
        }
    }
}

impl std::error::Error for TreebankError {}

/// Canonical tag spelling: lowercase, with bracket- and separator-carrying
/// punctuation tags renamed to word forms.
pub fn normalize_tag(raw: &str) -> String {
    match raw {
        "," => "comma".to_string(),
        "." => "period".to_string(),
        ":" => "colon".to_string(),
        ";" => "semicolon".to_string(),
        "(" | "-LRB-" | "-lrb-" => "lparen".to_string(),
        ")" | "-RRB-" | "-rrb-" => "rparen".to_string(),
        other => other.to_lowercase(),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Atom(String),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer { src, pos: 0, line: 1 }
    }

    fn next_token(&mut self) -> Option<(Token, usize)> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() {
            let b = bytes[self.pos];
            if b == b'\n' {
                self.line += 1;
                self.pos += 1;
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos >= bytes.len() {
            return None;
        }
        let line = self.line;
        match bytes[self.pos] {
            b'(' => {
                self.pos += 1;
                Some((Token::Open, line))
            }
            b')' => {
                self.pos += 1;
                Some((Token::Close, line))
            }
            _ => {
                let start = self.pos;
                while self.pos < bytes.len()
                    && !bytes[self.pos].is_ascii_whitespace()
                    && bytes[self.pos] != b'('
                    && bytes[self.pos] != b')'
                {
                    self.pos += 1;
                }
                Some((Token::Atom(self.src[start..self.pos].to_string()), line))
            }
        }
    }

    fn peek(&mut self) -> Option<(Token, usize)> {
        let save = (self.pos, self.line);
        let t = self.next_token();
        (self.pos, self.line) = save;
        t
    }
}

struct TreeReader<'a> {
    lexer: Lexer<'a>,
    warnings: Vec<String>,
}

impl<'a> TreeReader<'a> {
    /// Parses one `( ... )` group that is already known to start at `Open`.
    /// Returns `None` when the whole group was dropped (trace material).
    fn read_group(&mut self) -> Result<Option<TreeChild>, TreebankError> {
        let (open, open_line) = self.lexer.next_token().ok_or(TreebankError::Unbalanced { line: self.lexer.line })?;
        debug_assert_eq!(open, Token::Open);

        let label = match self.lexer.peek() {
            Some((Token::Atom(a), _)) => {
                self.lexer.next_token();
                Some(a)
            }
            Some((Token::Open, _)) => None,
            Some((Token::Close, line)) => return Err(TreebankError::EmptyNode { line }),
            None => return Err(TreebankError::Unbalanced { line: open_line }),
        };

        let mut children = Vec::new();
        loop {
            match self.lexer.peek() {
                Some((Token::Open, _)) => {
                    if let Some(child) = self.read_group()? {
                        children.push(child);
                    }
                }
                Some((Token::Atom(_), line)) => {
                    let Some((Token::Atom(a), _)) = self.lexer.next_token() else {
                        unreachable!()
                    };
                    if let Some(leaf) = self.read_leaf(&a, line)? {
                        children.push(leaf);
                    }
                }
                Some((Token::Close, _)) => {
                    self.lexer.next_token();
                    break;
                }
                None => return Err(TreebankError::Unbalanced { line: open_line }),
            }
        }

        match label {
            Some(name) => {
                if children.is_empty() {
                    // All children were dropped traces; drop the node too.
                    self.warnings
                        .push(format!("line {open_line}: dropped empty node {name:?}"));
                    return Ok(None);
                }
                let label = Symbol::nonterminal(&name.to_uppercase())
                    .map_err(|source| TreebankError::BadSymbol { line: open_line, source })?;
                Ok(Some(TreeChild::Node(BracketedTree { label, children })))
            }
            None => {
                // Unlabeled wrapper group. A single inner node unwraps; a
                // multi-child wrapper gets the synthetic TOP label.
                if children.is_empty() {
                    return Err(TreebankError::EmptyNode { line: open_line });
                }
                if children.len() == 1 {
                    if let TreeChild::Node(_) = children[0] {
                        return Ok(Some(children.into_iter().next().unwrap()));
                    }
                }
                let label = Symbol::nonterminal("TOP").expect("TOP is a valid name");
                Ok(Some(TreeChild::Node(BracketedTree { label, children })))
            }
        }
    }

    fn read_leaf(&mut self, atom: &str, line: usize) -> Result<Option<TreeChild>, TreebankError> {
        let Some((word, raw_tag)) = atom.rsplit_once('/') else {
            return Err(TreebankError::BadLeaf { line, token: atom.to_string() });
        };
        if raw_tag.is_empty() {
            return Err(TreebankError::BadLeaf { line, token: atom.to_string() });
        }
        let tag_name = normalize_tag(raw_tag);
        if word.is_empty() || tag_name == "-none-" {
            self.warnings
                .push(format!("line {line}: dropped trace leaf {atom:?}"));
            return Ok(None);
        }
        let tag = Symbol::terminal(&tag_name)
            .map_err(|source| TreebankError::BadSymbol { line, source })?;
        Ok(Some(TreeChild::Leaf { word: word.to_string(), tag }))
    }
}

/// Reads a sequence of bracketed trees. Each tree may carry one extra outer
/// parenthesis pair, as treebank files conventionally do.
pub fn read_trees(text: &str) -> Result<TreebankFile, TreebankError> {
    let mut reader = TreeReader {
        lexer: Lexer::new(text),
        warnings: Vec::new(),
    };
    let mut trees = Vec::new();
    loop {
        match reader.lexer.peek() {
            None => break,
            Some((Token::Open, _)) => {
                if let Some(child) = reader.read_group()? {
                    match child {
                        TreeChild::Node(n) => trees.push(n),
                        TreeChild::Leaf { word, tag } => {
                            return Err(TreebankError::BadLeaf {
                                line: reader.lexer.line,
                                token: format!("{}/{}", word, tag.name()),
                            })
                        }
                    }
                }
            }
            Some((Token::Close, line)) => return Err(TreebankError::Trailing { line }),
            Some((Token::Atom(a), line)) => {
                return Err(TreebankError::BadLeaf { line, token: a })
            }
        }
    }
    Ok(TreebankFile { trees, warnings: reader.warnings })
}

/// Writes trees in the canonical single-line form, one tree per line.
pub fn write_trees(trees: &[BracketedTree]) -> String {
    let mut out = String::new();
    for t in trees {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

/// Reads tagged sentences: one sentence per line, `word/tag` tokens, blank
/// lines skipped. Sentence ids are 1-based over non-blank lines.
pub fn read_tagged(text: &str) -> Result<Vec<TaggedSentence>, TreebankError> {
    let mut sentences = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut tags = Vec::new();
        for token in line.split_whitespace() {
            let Some((word, raw_tag)) = token.rsplit_once('/') else {
                return Err(TreebankError::BadLeaf {
                    line: lineno + 1,
                    token: token.to_string(),
                });
            };
            if word.is_empty() || raw_tag.is_empty() {
                return Err(TreebankError::BadLeaf {
                    line: lineno + 1,
                    token: token.to_string(),
                });
            }
            let tag = Symbol::terminal(&normalize_tag(raw_tag))
                .map_err(|source| TreebankError::BadSymbol { line: lineno + 1, source })?;
            tags.push(tag);
        }
        sentences.push(TaggedSentence { id: sentences.len() + 1, tags });
    }
    Ok(sentences)
}

/// A labeled bracketing as a span set, for crossing-bracket scoring.
/// Spans are `(label, start, end)` in token offsets, end-exclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Brackets {
    pub tokens: usize,
    pub spans: BTreeSet<(String, usize, usize)>,
}

/// The span set of a tree: one span per internal node, leaves contribute
/// none.
pub fn brackets_of(tree: &BracketedTree) -> Brackets {
    let mut spans = BTreeSet::new();
    let tokens = collect_spans(tree, 0, &mut spans);
    Brackets { tokens, spans }
}

fn collect_spans(
    node: &BracketedTree,
    start: usize,
    spans: &mut BTreeSet<(String, usize, usize)>,
) -> usize {
    let mut pos = start;
    for c in &node.children {
        match c {
            TreeChild::Node(n) => pos = collect_spans(n, pos, spans),
            TreeChild::Leaf { .. } => pos += 1,
        }
    }
    spans.insert((node.label.name().to_string(), start, pos));
    pos
}
