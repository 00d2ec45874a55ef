//! The error-free first pass.

use crate::chart::Chart;
use crate::engine::{EngineError, Search};
use crate::grammar::{Grammar, Symbol};
use crate::tree::ParseTree;

/// Result of the normal pass. On failure the populated chart is returned
/// so the recovery pass can start from the edges already built.
#[derive(Debug)]
pub enum NormalOutcome {
    Success { trees: Vec<ParseTree>, chart: Chart },
    Failure { chart: Chart, diagnostics: Vec<String> },
}

impl NormalOutcome {
    pub fn chart(&self) -> &Chart {
        match self {
            NormalOutcome::Success { chart, .. } | NormalOutcome::Failure { chart, .. } => chart,
        }
    }

    pub fn is_success(&self) -> bool {
        matches!(self, NormalOutcome::Success { .. })
    }
}

/// Parses without error hypotheses under a zero budget. Every returned
/// tree has error value zero. Unknown input tags are recorded as failure
/// diagnostics; the pass still runs so its chart can seed recovery.
pub fn parse_normal(
    grammar: &Grammar,
    tags: &[Symbol],
) -> Result<NormalOutcome, EngineError> {
    parse_normal_logged(grammar, tags, false)
}

/// Like [`parse_normal`], optionally keeping the admission log.
pub fn parse_normal_logged(
    grammar: &Grammar,
    tags: &[Symbol],
    keep_log: bool,
) -> Result<NormalOutcome, EngineError> {
    if tags.is_empty() {
        return Err(EngineError::EmptyInput);
    }
    let mut diagnostics: Vec<String> = tags
        .iter()
        .filter(|t| !grammar.knows_terminal(t))
        .map(|t| format!("unknown terminal {:?}", t.name()))
        .collect();
    diagnostics.dedup();
    let mut search = Search::normal(grammar, tags, keep_log);
    let outcome = search.run(None, usize::MAX);
    let chart = search.into_chart();
    if outcome.trees.is_empty() || !diagnostics.is_empty() {
        if outcome.trees.is_empty() {
            diagnostics.push("no parse within grammar coverage".to_string());
        }
        Ok(NormalOutcome::Failure { chart, diagnostics })
    } else {
        Ok(NormalOutcome::Success { trees: outcome.trees, chart })
    }
}
