//! Monotonicity classification and verification of the nabla and
//! diamond-alpha monotonicity rules on concrete scales.
//!
//! Every checker produces a [`RuleReport`]: named hypothesis checks
//! with pass/fail/best-effort status and witnesses, a conclusion
//! (global verdict or split-point pattern) verified by exhaustive grid
//! scan, counterexamples when the conclusion fails, and diagnostics for
//! the readings the source text leaves ambiguous. On purely discrete
//! scales checks are exact; scales with interval components are sampled
//! and labeled accordingly.

mod checks;
mod report;

pub use checks::{
    check_mr21, check_mr22, check_mr23, check_mr31, check_prop22, check_prop32, Anchor, CheckCtx,
    Mr22Case,
};
pub use report::{
    CheckStatus, Conclusion, Counterexample, Diagnostic, Direction, HypothesisCheck, RuleOutcome,
    RuleReport, Sample, Tolerances, Witness,
};

use crate::function::{CalcError, ScaleFunction};
use crate::scale::{Component, PointRef, TimeScale};

use serde::Serialize;

/// Monotonicity class of a function over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MonotoneClass {
    StrictlyIncreasing,
    WeaklyIncreasing,
    Constant,
    WeaklyDecreasing,
    StrictlyDecreasing,
    NonMonotone,
}

impl MonotoneClass {
    /// Whether the class is compatible with weak monotonicity in the
    /// given direction (constants qualify both ways).
    pub fn satisfies_weak(self, d: Direction) -> bool {
        use MonotoneClass::*;
        match d {
            Direction::Increasing => {
                matches!(self, StrictlyIncreasing | WeaklyIncreasing | Constant)
            }
            Direction::Decreasing => {
                matches!(self, StrictlyDecreasing | WeaklyDecreasing | Constant)
            }
            Direction::Constant => matches!(self, Constant),
        }
    }

    pub fn direction(self) -> Option<Direction> {
        use MonotoneClass::*;
        match self {
            StrictlyIncreasing | WeaklyIncreasing => Some(Direction::Increasing),
            StrictlyDecreasing | WeaklyDecreasing => Some(Direction::Decreasing),
            Constant => Some(Direction::Constant),
            NonMonotone => None,
        }
    }
}

/// Whether a verdict covers every scale point in range (purely
/// discrete) or only a sampled grid (interval components present).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Confidence {
    Exact,
    Sampled,
}

/// Classification result with an optional witness pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneVerdict {
    pub class: MonotoneClass,
    pub witness: Option<Witness>,
    pub confidence: Confidence,
}

/// Classifies sampled values by consecutive-difference signs.
///
/// `tau` is the absolute equality slack: differences within `tau`
/// count as ties. A non-monotone verdict always carries one increasing
/// and one decreasing adjacent pair as witness.
pub fn classify_values(samples: &[(f64, f64)], tau: f64, confidence: Confidence) -> MonotoneVerdict {
    let mut increase: Option<[Sample; 2]> = None;
    let mut decrease: Option<[Sample; 2]> = None;
    let mut ties = false;
    for w in samples.windows(2) {
        let d = w[1].1 - w[0].1;
        if d > tau {
            increase.get_or_insert([Sample(w[0].0, w[0].1), Sample(w[1].0, w[1].1)]);
        } else if d < -tau {
            decrease.get_or_insert([Sample(w[0].0, w[0].1), Sample(w[1].0, w[1].1)]);
        } else {
            ties = true;
        }
    }
    let (class, witness) = match (increase, decrease) {
        (Some(inc), Some(dec)) => (
            MonotoneClass::NonMonotone,
            Some(Witness::Violation {
                increase: inc,
                decrease: dec,
            }),
        ),
        (Some(inc), None) => (
            if ties {
                MonotoneClass::WeaklyIncreasing
            } else {
                MonotoneClass::StrictlyIncreasing
            },
            Some(Witness::Supporting(inc)),
        ),
        (None, Some(dec)) => (
            if ties {
                MonotoneClass::WeaklyDecreasing
            } else {
                MonotoneClass::StrictlyDecreasing
            },
            Some(Witness::Supporting(dec)),
        ),
        (None, None) => (MonotoneClass::Constant, None),
    };
    MonotoneVerdict {
        class,
        witness,
        confidence,
    }
}

/// Equality slack used by verdicts: `1e-12 * (1 + max |f|)`.
pub fn eq_slack(samples: &[(f64, f64)], eq_tol_rel: f64) -> f64 {
    let max_abs = samples.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs()));
    eq_tol_rel * (1.0 + max_abs)
}

/// Confidence of a check over `[va, vb]` on this scale.
pub fn range_confidence(ts: &TimeScale, va: f64, vb: f64) -> Confidence {
    for c in ts.components() {
        if let Component::Interval { lo, hi } = c {
            if *lo <= vb && *hi >= va && lo < hi {
                return Confidence::Sampled;
            }
        }
    }
    Confidence::Exact
}

/// Classifies the monotonicity of `f` over `[a, b]` on the grid with
/// `dense_samples` interior samples per dense segment.
pub fn classify_monotone(
    f: &ScaleFunction,
    ts: &TimeScale,
    a: PointRef,
    b: PointRef,
    dense_samples: usize,
    eq_tol_rel: f64,
) -> Result<MonotoneVerdict, CalcError> {
    let grid = ts.grid(a, b, dense_samples)?;
    let mut samples = Vec::with_capacity(grid.len());
    for &p in &grid {
        samples.push((ts.coord(p), f.eval_at(ts, p)?));
    }
    let tau = eq_slack(&samples, eq_tol_rel);
    let confidence = range_confidence(ts, ts.coord(a), ts.coord(b));
    Ok(classify_values(&samples, tau, confidence))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scale::TimeScale;

    fn lattice(lo: i64, hi: i64) -> TimeScale {
        TimeScale::from_points((lo..=hi).map(|i| i as f64).collect()).unwrap()
    }

    #[test]
    fn identity_is_strictly_increasing() {
        let ts = lattice(0, 5);
        let f = ScaleFunction::parse("x").unwrap();
        let v =
            classify_monotone(&f, &ts, ts.min_ref(), ts.max_ref(), 0, 1e-12).unwrap();
        assert_eq!(v.class, MonotoneClass::StrictlyIncreasing);
        assert_eq!(v.confidence, Confidence::Exact);
    }

    #[test]
    fn parabola_is_non_monotone_with_witnesses() {
        let ts = lattice(-2, 2);
        let f = ScaleFunction::parse("x^2").unwrap();
        let v =
            classify_monotone(&f, &ts, ts.min_ref(), ts.max_ref(), 0, 1e-12).unwrap();
        assert_eq!(v.class, MonotoneClass::NonMonotone);
        match v.witness {
            Some(Witness::Violation { increase, decrease }) => {
                // witnesses re-evaluate to the claimed violation
                assert!(increase[1].1 > increase[0].1);
                assert!(decrease[1].1 < decrease[0].1);
                assert_eq!(decrease[0].0, -2.0);
                assert_eq!(increase[0].0, 0.0);
                for s in increase.iter().chain(decrease.iter()) {
                    assert_eq!(f.eval_coord(s.0).unwrap(), s.1);
                }
            }
            other => panic!("expected violation witness, got {other:?}"),
        }
    }

    #[test]
    fn constants_classify_as_constant() {
        let ts = lattice(0, 4);
        let f = ScaleFunction::parse("3").unwrap();
        let v =
            classify_monotone(&f, &ts, ts.min_ref(), ts.max_ref(), 0, 1e-12).unwrap();
        assert_eq!(v.class, MonotoneClass::Constant);
        assert!(v.witness.is_none());
    }

    #[test]
    fn plateaus_weaken_the_class() {
        let samples = [(0.0, 0.0), (1.0, 1.0), (2.0, 1.0), (3.0, 2.0)];
        let v = classify_values(&samples, 1e-12, Confidence::Exact);
        assert_eq!(v.class, MonotoneClass::WeaklyIncreasing);
    }

    #[test]
    fn dense_ranges_are_sampled_confidence() {
        let ts = TimeScale::parse("interval(0,1)+points(2)").unwrap();
        let f = ScaleFunction::parse("x").unwrap();
        let v =
            classify_monotone(&f, &ts, ts.min_ref(), ts.max_ref(), 5, 1e-12).unwrap();
        assert_eq!(v.class, MonotoneClass::StrictlyIncreasing);
        assert_eq!(v.confidence, Confidence::Sampled);
    }
}
