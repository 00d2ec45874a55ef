//! Flat `key = value` run configuration.
//!
//! Recognized keys are exactly the cost parameters plus the symbol-class
//! and search settings; unknown keys are errors so typos in experiment
//! configs fail loudly.
//!
//! ```text
//! alpha_insertion = 10.2
//! alpha_deletion  = 10.4
//! alpha_mutation  = 10.8
//! beta_insertion  = 15.0
//! beta_deletion   = 20.0
//! beta_mutation   = 12.0        # optional; enables phrase mutation
//! delta_fiducial  = 0.01
//! delta_misused   = 5.0
//! delta_delimited = 1.0
//! budget          = 60.0
//! start_symbol    = S
//! fiducials       = NP
//! misused_terminals = comma period colon lparen rparen cc rp
//! pair_delimiters = comma:comma lparen:rparen
//! ```

use std::collections::BTreeSet;
use std::fmt;

use crate::cost::{Cost, CostParams};
use crate::grammar::Symbol;

/// Parsed configuration: cost parameters plus grammar/search overrides.
/// `None` fields mean "keep the grammar's (or engine's) default".
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub params: CostParams,
    pub budget: Option<Cost>,
    pub start_symbol: Option<Symbol>,
    pub fiducials: Option<BTreeSet<Symbol>>,
    pub misused_terminals: Option<BTreeSet<Symbol>>,
    pub pair_delimiters: Option<Vec<(Symbol, Symbol)>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    UnknownKey { line: usize, key: String },
    BadValue { line: usize, key: String, value: String },
    BadSyntax { line: usize },
    DuplicateKey { line: usize, key: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::UnknownKey { line, key } => write!(f, "line {line}: unknown key {key:?}"),
            ConfigError::BadValue { line, key, value } => {
                write!(f, "line {line}: bad value {value:?} for {key}")
            }
            ConfigError::BadSyntax { line } => write!(f, "line {line}: expected `key = value`"),
            ConfigError::DuplicateKey { line, key } => {
                write!(f, "line {line}: duplicate key {key:?}")
            }
        }
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut seen = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = lineno + 1;
            let (key, value) = line
                .split_once('=')
                .ok_or(ConfigError::BadSyntax { line: lineno })?;
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::DuplicateKey { line: lineno, key: key.to_string() });
            }
            let bad = || ConfigError::BadValue {
                line: lineno,
                key: key.to_string(),
                value: value.to_string(),
            };
            let cost = |v: &str| v.parse::<Cost>().map_err(|_| bad());
            match key {
                "alpha_insertion" => cfg.params.alpha_insertion = cost(value)?,
                "alpha_deletion" => cfg.params.alpha_deletion = cost(value)?,
                "alpha_mutation" => cfg.params.alpha_mutation = cost(value)?,
                "beta_insertion" => cfg.params.beta_insertion = cost(value)?,
                "beta_deletion" => cfg.params.beta_deletion = cost(value)?,
                "beta_mutation" => cfg.params.beta_mutation = Some(cost(value)?),
                "delta_fiducial" => cfg.params.delta_fiducial = cost(value)?,
                "delta_misused" => cfg.params.delta_misused = cost(value)?,
                "delta_delimited" => cfg.params.delta_delimited = cost(value)?,
                "budget" => cfg.budget = Some(cost(value)?),
                "start_symbol" => {
                    cfg.start_symbol = Some(Symbol::nonterminal(value).map_err(|_| bad())?)
                }
                "fiducials" => {
                    cfg.fiducials = Some(
                        value
                            .split_whitespace()
                            .map(Symbol::nonterminal)
                            .collect::<Result<_, _>>()
                            .map_err(|_| bad())?,
                    )
                }
                "misused_terminals" => {
                    cfg.misused_terminals = Some(
                        value
                            .split_whitespace()
                            .map(Symbol::terminal)
                            .collect::<Result<_, _>>()
                            .map_err(|_| bad())?,
                    )
                }
                "pair_delimiters" => {
                    let mut pairs = Vec::new();
                    for item in value.split_whitespace() {
                        let (open, close) = item.split_once(':').ok_or_else(bad)?;
                        pairs.push((
                            Symbol::terminal(open).map_err(|_| bad())?,
                            Symbol::terminal(close).map_err(|_| bad())?,
                        ));
                    }
                    cfg.pair_delimiters = Some(pairs);
                }
                _ => {
                    return Err(ConfigError::UnknownKey { line: lineno, key: key.to_string() })
                }
            }
        }
        Ok(cfg)
    }

    /// Applies the symbol-class and start overrides to a grammar.
    pub fn apply_to(&self, grammar: crate::grammar::Grammar) -> Result<crate::grammar::Grammar, crate::grammar::GrammarError> {
        let mut g = grammar;
        if let Some(f) = &self.fiducials {
            g = g.with_fiducials(f.clone());
        }
        if let Some(m) = &self.misused_terminals {
            g = g.with_misused_terminals(m.clone());
        }
        if let Some(p) = &self.pair_delimiters {
            g = g.with_pair_delimiters(p.clone());
        }
        if let Some(s) = &self.start_symbol {
            g = g.with_start(s.clone())?;
        }
        Ok(g)
    }
}
