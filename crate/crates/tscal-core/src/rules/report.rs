//! Machine-readable rule reports.
//!
//! The JSON shape is stable: field names as in the types, verdict and
//! status enums as uppercase strings, witnesses as `[t, value]`
//! coordinate pairs. Optional fields serialize as `null` rather than
//! disappearing, so consumers can rely on presence and ordering.

use serde::Serialize;

use super::MonotoneVerdict;

/// One `[t, value]` coordinate pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample(pub f64, pub f64);

/// Witness attached to a hypothesis check or verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// A single offending or supporting point.
    Point(Sample),
    /// An adjacent pair supporting a monotone verdict.
    Supporting([Sample; 2]),
    /// An increasing and a decreasing adjacent pair.
    Violation {
        increase: [Sample; 2],
        decrease: [Sample; 2],
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Passed on a sampled grid; not exhaustive (dense components).
    BestEffort,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub status: CheckStatus,
    pub witness: Option<Witness>,
    pub detail: Option<String>,
}

impl HypothesisCheck {
    pub fn new(name: &str, status: CheckStatus) -> HypothesisCheck {
        HypothesisCheck {
            name: name.to_string(),
            status,
            witness: None,
            detail: None,
        }
    }

    pub fn with_witness(mut self, w: Witness) -> HypothesisCheck {
        self.witness = Some(w);
        self
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> HypothesisCheck {
        self.detail = Some(d.into());
        self
    }
}

/// Expected monotonicity direction of a conclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Direction {
    Increasing,
    Decreasing,
    Constant,
}

impl Direction {
    pub fn flipped(self) -> Direction {
        match self {
            Direction::Increasing => Direction::Decreasing,
            Direction::Decreasing => Direction::Increasing,
            Direction::Constant => Direction::Constant,
        }
    }
}

/// Verified conclusion of a rule check.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Conclusion {
    /// Global monotonicity of the target function.
    Global {
        expected: Direction,
        verdict: MonotoneVerdict,
        holds: bool,
    },
    /// Split-point pattern: one direction up to `split_point`, the
    /// other after it.
    Split {
        split_point: f64,
        left_expected: Direction,
        right_expected: Direction,
        left: MonotoneVerdict,
        right: MonotoneVerdict,
        holds: bool,
    },
    /// A pointwise identity comparison over the valid grid.
    Identity {
        points_checked: usize,
        max_residual: f64,
        tolerance: f64,
        holds: bool,
    },
}

impl Conclusion {
    pub fn holds(&self) -> bool {
        match self {
            Conclusion::Global { holds, .. }
            | Conclusion::Split { holds, .. }
            | Conclusion::Identity { holds, .. } => *holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub description: String,
    pub witness: Witness,
}

/// Informational entry: printed-variant hypothesis statuses,
/// formula-vs-reference residuals, reading discrepancies. Never blocks
/// a conclusion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub name: String,
    pub status: Option<CheckStatus>,
    pub value: Option<f64>,
    pub detail: String,
}

/// Tolerances a check ran with; verdicts scale the relative ones by
/// `1 + max |value|` over the grid in question. Fine-grained verdict
/// classification uses `eq_tol_rel`; rule conclusions are judged at
/// `identity_tol_rel`, the documented slack for value comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Equality slack for verdict ties.
    pub eq_tol_rel: f64,
    /// Sign classification slack for hypothesis quantities.
    pub sign_tol_rel: f64,
    /// Formula-vs-direct identity comparisons.
    pub identity_tol_rel: f64,
    /// Dense-point derivative agreement.
    pub dense_deriv_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Tolerances {
        Tolerances {
            eq_tol_rel: 1e-12,
            sign_tol_rel: 1e-10,
            identity_tol_rel: 1e-9,
            dense_deriv_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleOutcome {
    Verified,
    HypothesisFailed,
    ConclusionFailed,
}

/// Per-rule record: hypothesis checks, verified conclusion,
/// counterexample and diagnostics. The conclusion is present exactly
/// when no blocking hypothesis failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleReport {
    pub rule_id: String,
    pub alpha: Option<f64>,
    pub hypothesis_checks: Vec<HypothesisCheck>,
    pub conclusion: Option<Conclusion>,
    pub counterexample: Option<Counterexample>,
    pub diagnostics: Vec<Diagnostic>,
    pub tolerances: Tolerances,
}

impl RuleReport {
    pub fn outcome(&self) -> RuleOutcome {
        if self
            .hypothesis_checks
            .iter()
            .any(|c| c.status == CheckStatus::Fail)
        {
            return RuleOutcome::HypothesisFailed;
        }
        match &self.conclusion {
            Some(c) if !c.holds() => RuleOutcome::ConclusionFailed,
            _ => RuleOutcome::Verified,
        }
    }

    pub fn verified(&self) -> bool {
        self.outcome() == RuleOutcome::Verified
    }
}

/// Incremental report assembly used by the checkers.
pub(crate) struct ReportBuilder {
    rule_id: String,
    alpha: Option<f64>,
    checks: Vec<HypothesisCheck>,
    diagnostics: Vec<Diagnostic>,
    tolerances: Tolerances,
}

impl ReportBuilder {
    pub fn new(rule_id: &str, alpha: Option<f64>, tolerances: Tolerances) -> ReportBuilder {
        ReportBuilder {
            rule_id: rule_id.to_string(),
            alpha,
            checks: Vec::new(),
            diagnostics: Vec::new(),
            tolerances,
        }
    }

    pub fn check(&mut self, c: HypothesisCheck) {
        self.checks.push(c);
    }

    pub fn diagnostic(&mut self, d: Diagnostic) {
        self.diagnostics.push(d);
    }

    pub fn any_failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == CheckStatus::Fail)
    }

    /// No blocking hypothesis passed; report without a conclusion.
    pub fn hypothesis_failed(self) -> RuleReport {
        RuleReport {
            rule_id: self.rule_id,
            alpha: self.alpha,
            hypothesis_checks: self.checks,
            conclusion: None,
            counterexample: None,
            diagnostics: self.diagnostics,
            tolerances: self.tolerances,
        }
    }

    pub fn conclude(
        self,
        conclusion: Conclusion,
        counterexample: Option<Counterexample>,
    ) -> RuleReport {
        RuleReport {
            rule_id: self.rule_id,
            alpha: self.alpha,
            hypothesis_checks: self.checks,
            conclusion: Some(conclusion),
            counterexample,
            diagnostics: self.diagnostics,
            tolerances: self.tolerances,
        }
    }
}

/// Counterexample helper: first violating adjacent pair of a verdict.
pub(crate) fn counterexample_from(
    verdict: &MonotoneVerdict,
    expected: Direction,
    what: &str,
) -> Option<Counterexample> {
    if verdict.class.satisfies_weak(expected) {
        return None;
    }
    let witness = verdict.witness.clone()?;
    Some(Counterexample {
        description: format!(
            "{what} expected {:?} but classified {:?}",
            expected, verdict.class
        ),
        witness,
    })
}
