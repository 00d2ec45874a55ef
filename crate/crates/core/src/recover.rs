//! The least-errors recovery pass.

use crate::chart::{Chart, SearchStats};
use crate::cost::CostParams;
use crate::engine::{EngineError, EngineOptions, Search};
use crate::grammar::{Grammar, Symbol};
use crate::tree::ParseTree;

/// Result of a recovery run. `trees` is ordered by ascending error value
/// and empty when no analysis exists within the budget.
#[derive(Debug)]
pub struct Recovery {
    pub trees: Vec<ParseTree>,
    pub stats: SearchStats,
    pub chart: Chart,
    pub diagnostics: Vec<String>,
}

/// Runs best-first least-errors recognition with default options, seeding
/// the chart from a failed normal pass when one is supplied.
pub fn recover(
    grammar: &Grammar,
    tags: &[Symbol],
    params: &CostParams,
    seed: Option<&Chart>,
    max_trees: usize,
) -> Result<Recovery, EngineError> {
    recover_with(grammar, tags, params, seed, max_trees, &EngineOptions::default())
}

/// Recovery with explicit search options.
pub fn recover_with(
    grammar: &Grammar,
    tags: &[Symbol],
    params: &CostParams,
    seed: Option<&Chart>,
    max_trees: usize,
    opts: &EngineOptions,
) -> Result<Recovery, EngineError> {
    if tags.is_empty() {
        return Err(EngineError::EmptyInput);
    }
    let mut search = Search::robust(grammar, tags, params, opts)?;
    let outcome = search.run(seed, max_trees);
    let chart = search.into_chart();
    let mut diagnostics = Vec::new();
    if outcome.trees.is_empty() {
        diagnostics.push(format!(
            "no analysis within error budget {}",
            chart.budget().expect("recovery always runs budgeted")
        ));
    }
    Ok(Recovery { trees: outcome.trees, stats: chart.stats, chart, diagnostics })
}
