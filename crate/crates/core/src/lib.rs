//! A robust context-free parsing toolkit that recovers extragrammatical
//! sentences by finding a least-errors analysis.
//!
//! The pipeline runs in two stages: an error-free chart parse first, and
//! on failure a best-first recovery pass that hypothesizes terminal and
//! phrase-level insertion, deletion, and mutation errors, priced by a
//! heuristic cost model. The toolkit also induces grammars with
//! frequencies from bracketed treebanks (with average-frequency pruning)
//! and scores analyses by crossing brackets.

pub mod chart;
pub mod config;
pub mod cost;
pub mod engine;
pub mod eval;
pub mod grammar;
pub mod normal;
pub mod recover;
pub mod tree;
pub mod treebank;

pub use chart::{AdmitOutcome, Back, Cause, Chart, Entry, SearchStats, State, StateKey, StateRef, Strategy};
pub use config::{RunConfig, ConfigError};
pub use cost::{
    phrase_cost, terminal_cost, Cost, CostParams, CostParamsError, HypothesisContext,
    PhraseErrorKind, TermErrorKind,
};
pub use engine::{delimiter_spans, extract_trees, EngineError, EngineOptions};
pub use eval::{accuracy, crossings, EvalError, Report, SentenceScore};
pub use grammar::{induce_grammar, Diagnostic, Grammar, GrammarError, Rule, Symbol, SymbolKind};
pub use normal::{parse_normal, parse_normal_logged, NormalOutcome};
pub use recover::{recover, recover_with, Recovery};
pub use tree::{parse_annotated, Hyp, ParseTree, TreeNode};
pub use treebank::{
    brackets_of, read_tagged, read_trees, write_trees, BracketedTree, Brackets, TaggedSentence,
    TreeChild, TreebankError, TreebankFile,
};
