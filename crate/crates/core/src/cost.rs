//! Error values and the heuristic cost model.
//!
//! All error values are exact fixed-point numbers with two fractional
//! digits. The tuned cost parameters carry at most two decimals, so
//! fixed-point keeps dominance comparisons and best-first ordering free
//! of float noise.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Sub};
use std::str::FromStr;

/// An error value in hundredths. `Cost::from_centi(1040)` is `10.4`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cost(i64);

impl Cost {
    pub const ZERO: Cost = Cost(0);

    pub const fn from_centi(centi: i64) -> Cost {
        Cost(centi)
    }

    pub fn centi(self) -> i64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn saturating_mul(self, k: i64) -> Cost {
        Cost(self.0.saturating_mul(k))
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        Cost(self.0 + rhs.0)
    }
}

impl AddAssign for Cost {
    fn add_assign(&mut self, rhs: Cost) {
        self.0 += rhs.0;
    }
}

impl Sub for Cost {
    type Output = Cost;
    fn sub(self, rhs: Cost) -> Cost {
        Cost(self.0 - rhs.0)
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        Cost(iter.map(|c| c.0).sum())
    }
}

impl fmt::Display for Cost {
    /// Prints with the fewest digits that are exact: `0`, `5`, `10.4`, `0.01`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let whole = abs / 100;
        let frac = abs % 100;
        if frac == 0 {
            write!(f, "{sign}{whole}")
        } else if frac.is_multiple_of(10) {
            write!(f, "{sign}{whole}.{}", frac / 10)
        } else {
            write!(f, "{sign}{whole}.{frac:02}")
        }
    }
}

impl fmt::Debug for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cost({self})")
    }
}

/// Error produced when parsing a decimal cost string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseCostError(pub String);

impl fmt::Display for ParseCostError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid cost value {:?} (expected a non-negative decimal with at most 2 fractional digits)", self.0)
    }
}

impl std::error::Error for ParseCostError {}

impl FromStr for Cost {
    type Err = ParseCostError;

    fn from_str(s: &str) -> Result<Cost, ParseCostError> {
        let bad = || ParseCostError(s.to_string());
        let (whole, frac) = match s.split_once('.') {
            Some((w, f)) => (w, f),
            None => (s, ""),
        };
        if whole.is_empty() || frac.len() > 2 || !whole.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        if !frac.is_empty() && !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let whole: i64 = whole.parse().map_err(|_| bad())?;
        let frac: i64 = match frac.len() {
            0 => 0,
            1 => frac.parse::<i64>().map_err(|_| bad())? * 10,
            _ => frac.parse().map_err(|_| bad())?,
        };
        Ok(Cost(whole * 100 + frac))
    }
}

/// Terminal-level error hypothesis kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermErrorKind {
    Insertion,
    Deletion,
    Mutation,
}

/// Phrase-level error hypothesis kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhraseErrorKind {
    Insertion,
    Deletion,
}

/// Context flags for a single error hypothesis, derived from the state the
/// hypothesis attaches to and the input span it concerns.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HypothesisContext {
    /// The rule receiving the hypothesis has a fiducial left-hand side.
    pub within_fiducial: bool,
    /// The terminal involved is in the misused-terminal class.
    pub symbol_misused: bool,
    /// The inserted phrase span is flanked by a configured delimiter pair.
    pub delimited: bool,
}

/// Cost parameters for the recovery pass.
///
/// `beta_mutation` is reserved: phrase mutation hypotheses are disabled
/// unless a value is supplied and the engine is asked to use it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostParams {
    pub alpha_insertion: Cost,
    pub alpha_deletion: Cost,
    pub alpha_mutation: Cost,
    pub beta_insertion: Cost,
    pub beta_deletion: Cost,
    pub beta_mutation: Option<Cost>,
    /// Surcharge for hypotheses inside a fiducial nonterminal.
    pub delta_fiducial: Cost,
    /// Discount for hypotheses on misused terminal classes.
    pub delta_misused: Cost,
    /// Discount for phrase insertions flanked by delimiter pairs.
    pub delta_delimited: Cost,
}

impl Default for CostParams {
    fn default() -> CostParams {
        CostParams {
            alpha_insertion: Cost::from_centi(1020),
            alpha_deletion: Cost::from_centi(1040),
            alpha_mutation: Cost::from_centi(1080),
            beta_insertion: Cost::from_centi(1500),
            beta_deletion: Cost::from_centi(2000),
            beta_mutation: None,
            delta_fiducial: Cost::from_centi(1),
            delta_misused: Cost::from_centi(500),
            delta_delimited: Cost::from_centi(100),
        }
    }
}

/// A violated cost-parameter constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostParamsError {
    /// The inequality that failed, e.g. `"alpha_deletion - delta_misused > 0"`.
    pub violated: String,
}

impl fmt::Display for CostParamsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid cost parameters: {} is violated", self.violated)
    }
}

impl std::error::Error for CostParamsError {}

impl CostParams {
    /// Checks base-cost positivity and effective-cost positivity. Every
    /// effective per-hypothesis cost must be strictly positive or the
    /// best-first search loses its optimality guarantee.
    pub fn validate(&self) -> Result<(), CostParamsError> {
        let positive: [(&str, Cost); 5] = [
            ("alpha_insertion", self.alpha_insertion),
            ("alpha_deletion", self.alpha_deletion),
            ("alpha_mutation", self.alpha_mutation),
            ("beta_insertion", self.beta_insertion),
            ("beta_deletion", self.beta_deletion),
        ];
        for (name, v) in positive {
            if v <= Cost::ZERO {
                return Err(CostParamsError {
                    violated: format!("{name} > 0"),
                });
            }
        }
        if let Some(bm) = self.beta_mutation {
            if bm <= Cost::ZERO {
                return Err(CostParamsError {
                    violated: "beta_mutation > 0".to_string(),
                });
            }
        }
        let effective: [(&str, Cost, &str, Cost); 5] = [
            ("alpha_deletion", self.alpha_deletion, "delta_misused", self.delta_misused),
            ("alpha_insertion", self.alpha_insertion, "delta_misused", self.delta_misused),
            ("alpha_mutation", self.alpha_mutation, "delta_misused", self.delta_misused),
            ("beta_insertion", self.beta_insertion, "delta_delimited", self.delta_delimited),
            ("beta_deletion", self.beta_deletion, "delta_delimited", self.delta_delimited),
        ];
        for (base_name, base, delta_name, delta) in effective {
            if base - delta <= Cost::ZERO {
                return Err(CostParamsError {
                    violated: format!("{base_name} - {delta_name} > 0"),
                });
            }
        }
        if self.delta_fiducial < Cost::ZERO
            || self.delta_misused < Cost::ZERO
            || self.delta_delimited < Cost::ZERO
        {
            return Err(CostParamsError {
                violated: "delta values >= 0".to_string(),
            });
        }
        Ok(())
    }

    /// Non-fatal notices for configurations whose base costs do not follow
    /// the deletion < insertion < mutation ordering. The shipped defaults
    /// trigger the first notice; they are kept verbatim rather than
    /// silently reordered.
    pub fn ordering_notices(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if !(self.alpha_deletion < self.alpha_insertion && self.alpha_insertion < self.alpha_mutation) {
            notes.push(format!(
                "notice: terminal costs do not satisfy alpha_deletion < alpha_insertion < alpha_mutation ({} / {} / {})",
                self.alpha_deletion, self.alpha_insertion, self.alpha_mutation
            ));
        }
        if !(self.beta_deletion < self.beta_insertion) {
            notes.push(format!(
                "notice: phrase costs do not satisfy beta_deletion < beta_insertion ({} / {})",
                self.beta_deletion, self.beta_insertion
            ));
        }
        notes
    }

    /// Default search budget: three times the largest base cost.
    pub fn default_budget(&self) -> Cost {
        let mut m = self.alpha_insertion;
        for c in [
            self.alpha_deletion,
            self.alpha_mutation,
            self.beta_insertion,
            self.beta_deletion,
        ] {
            if c > m {
                m = c;
            }
        }
        m.saturating_mul(3)
    }
}

/// Cost of a terminal-level error hypothesis: the base cost for the kind,
/// surcharged inside fiducial nonterminals, discounted on misused terminals.
pub fn terminal_cost(kind: TermErrorKind, ctx: HypothesisContext, params: &CostParams) -> Cost {
    let base = match kind {
        TermErrorKind::Insertion => params.alpha_insertion,
        TermErrorKind::Deletion => params.alpha_deletion,
        TermErrorKind::Mutation => params.alpha_mutation,
    };
    let mut cost = base;
    if ctx.within_fiducial {
        cost += params.delta_fiducial;
    }
    if ctx.symbol_misused {
        cost = cost - params.delta_misused;
    }
    cost
}

/// Cost of a phrase-level error hypothesis. Insertions add the error value
/// of the inserted phrase itself and take the delimiter discount; deletions
/// are a flat base cost.
pub fn phrase_cost(
    kind: PhraseErrorKind,
    ctx: HypothesisContext,
    child_error: Cost,
    params: &CostParams,
) -> Cost {
    match kind {
        PhraseErrorKind::Insertion => {
            let mut cost = params.beta_insertion;
            if ctx.delimited {
                cost = cost - params.delta_delimited;
            }
            cost + child_error
        }
        PhraseErrorKind::Deletion => {
            debug_assert!(child_error.is_zero());
            params.beta_deletion
        }
    }
}
