//! The rule checkers: hypothesis verification, conclusion verification
//! by exhaustive grid scan, witnesses on failure.
//!
//! Math-domain failures inside a hypothesis (zero denominators,
//! undefined derivatives) surface as a failed check with a detail
//! message, never as an error; errors are reserved for malformed
//! requests (reversed ranges, non-discrete scales where tabulation is
//! required).

use crate::calculus::DerivKind;
use crate::function::CalcError;
use crate::scale::{PointRef, Side, TimeScale};
use crate::yfun::FunctionPair;

use super::report::{
    counterexample_from, CheckStatus, Conclusion, Counterexample, Diagnostic, Direction,
    HypothesisCheck, ReportBuilder, RuleReport, Sample, Tolerances, Witness,
};
use super::{classify_values, eq_slack, range_confidence, Confidence};

/// Shared settings for a rule check.
#[derive(Debug, Clone, Copy)]
pub struct CheckCtx {
    pub dense_samples: usize,
    pub tol: Tolerances,
}

impl Default for CheckCtx {
    fn default() -> CheckCtx {
        CheckCtx {
            dense_samples: 16,
            tol: Tolerances::default(),
        }
    }
}

/// Which endpoint anchors the difference quotient of the first rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    Alpha,
    Beta,
}

/// Printed case of the second nabla rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mr22Case {
    One,
    Two,
    Three,
    Four,
}

impl Mr22Case {
    pub fn from_index(i: u8) -> Option<Mr22Case> {
        match i {
            1 => Some(Mr22Case::One),
            2 => Some(Mr22Case::Two),
            3 => Some(Mr22Case::Three),
            4 => Some(Mr22Case::Four),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Mr22Case::One => 1,
            Mr22Case::Two => 2,
            Mr22Case::Three => 3,
            Mr22Case::Four => 4,
        }
    }
}

struct Grid {
    points: Vec<PointRef>,
    confidence: Confidence,
}

impl Grid {
    fn base_status(&self) -> CheckStatus {
        match self.confidence {
            Confidence::Exact => CheckStatus::Pass,
            Confidence::Sampled => CheckStatus::BestEffort,
        }
    }
}

fn prepare(
    ts: &TimeScale,
    a: PointRef,
    b: PointRef,
    ctx: &CheckCtx,
) -> Result<Grid, CalcError> {
    let points = ts.grid(a, b, ctx.dense_samples)?;
    let confidence = range_confidence(ts, ts.coord(a), ts.coord(b));
    Ok(Grid { points, confidence })
}

/// Grid points where the derivative kind is defined (drops a
/// right-scattered minimum for nabla, a left-scattered maximum for
/// delta, both for diamond).
fn kappa_points(ts: &TimeScale, points: &[PointRef], k: DerivKind) -> Vec<PointRef> {
    let min = ts.min();
    let max = ts.max();
    let min_scattered = ts.classify(ts.min_ref()).right == Side::Scattered;
    let max_scattered = ts.classify(ts.max_ref()).left == Side::Scattered;
    points
        .iter()
        .copied()
        .filter(|&p| {
            let t = ts.coord(p);
            let drop_min = t == min && min_scattered;
            let drop_max = t == max && max_scattered;
            match k {
                DerivKind::Nabla => !drop_min,
                DerivKind::Delta => !drop_max,
                DerivKind::Diamond(_) => !drop_min && !drop_max,
            }
        })
        .collect()
}

type Samples = Vec<(f64, f64)>;

fn eval_samples(
    ts: &TimeScale,
    points: &[PointRef],
    mut f: impl FnMut(PointRef) -> Result<f64, CalcError>,
) -> Result<Samples, (f64, CalcError)> {
    let mut out = Vec::with_capacity(points.len());
    for &p in points {
        let t = ts.coord(p);
        match f(p) {
            Ok(v) => out.push((t, v)),
            Err(e) => return Err((t, e)),
        }
    }
    Ok(out)
}

fn fail_eval(name: &str, t: f64, e: CalcError) -> HypothesisCheck {
    HypothesisCheck::new(name, CheckStatus::Fail).with_detail(format!("at t = {t}: {e}"))
}

fn sign_slack(samples: &Samples, rel: f64) -> f64 {
    let max_abs = samples.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs()));
    rel * (1.0 + max_abs)
}

struct Signs {
    pos: Option<Sample>,
    neg: Option<Sample>,
    zero: Option<Sample>,
}

impl Signs {
    fn of(samples: &Samples, tau: f64) -> Signs {
        let mut s = Signs {
            pos: None,
            neg: None,
            zero: None,
        };
        for &(t, v) in samples {
            if v > tau {
                s.pos.get_or_insert(Sample(t, v));
            } else if v < -tau {
                s.neg.get_or_insert(Sample(t, v));
            } else {
                s.zero.get_or_insert(Sample(t, v));
            }
        }
        s
    }

    /// +1 / -1 when every sample is strictly positive / negative.
    fn strict(&self) -> Option<i8> {
        match (&self.pos, &self.neg, &self.zero) {
            (Some(_), None, None) => Some(1),
            (None, Some(_), None) => Some(-1),
            _ => None,
        }
    }

    /// +1 when nothing is negative, -1 when nothing is positive,
    /// 0 when everything is a tie; `None` on mixed strict signs.
    fn weak(&self) -> Option<i8> {
        match (&self.pos, &self.neg) {
            (Some(_), Some(_)) => None,
            (Some(_), None) => Some(1),
            (None, Some(_)) => Some(-1),
            (None, None) => Some(0),
        }
    }

    fn offending(&self) -> Option<Witness> {
        self.zero
            .or(self.neg)
            .or(self.pos)
            .map(Witness::Point)
    }
}

/// Sign-constancy hypothesis over samples; strict means zeros fail too.
fn sign_check(
    name: &str,
    samples: &Samples,
    tau: f64,
    strict: bool,
    base: CheckStatus,
) -> (HypothesisCheck, Option<i8>) {
    let signs = Signs::of(samples, tau);
    let verdict = if strict { signs.strict() } else { signs.weak() };
    match verdict {
        Some(s) => (HypothesisCheck::new(name, base), Some(s)),
        None => {
            let mut c = HypothesisCheck::new(name, CheckStatus::Fail)
                .with_detail("sign is not constant over the grid");
            if let Some(w) = signs.offending() {
                c = c.with_witness(w);
            }
            (c, None)
        }
    }
}

/// Splits rising sign data: the last coordinate of the nonpositive
/// regime, with zero plateaus resolving to their leftmost point.
///
/// `key` holds `(t, k)` where the sign of `k` at `t` controls the step
/// of the monitored quotient into `t`; `prev_coords` are the quotient
/// grid coordinates (superset of the key coordinates, including the
/// point before the first key).
fn locate_split_rising(prev_coords: &[f64], key: &Samples, tau: f64) -> f64 {
    let j = match key.iter().position(|&(_, k)| k > tau) {
        None => return *prev_coords.last().unwrap(),
        Some(j) => j,
    };
    // zero plateau immediately before the first strictly positive key
    let mut z = j;
    while z > 0 && key[z - 1].1.abs() <= tau {
        z -= 1;
    }
    if z < j {
        return key[z].0;
    }
    let t = key[j].0;
    match prev_coords.iter().position(|&c| c == t) {
        Some(0) | None => t,
        Some(pos) => prev_coords[pos - 1],
    }
}

struct SplitVerdict {
    split: f64,
    left: super::MonotoneVerdict,
    right: super::MonotoneVerdict,
    holds: bool,
}

/// Locates the split from the key signs and verifies the two-piece
/// pattern on the quotient samples.
#[allow(clippy::too_many_arguments)]
fn verify_split(
    q: &Samples,
    key: &Samples,
    key_tau: f64,
    rising: bool,
    left_dir: Direction,
    right_dir: Direction,
    eq_tol_rel: f64,
    confidence: Confidence,
) -> SplitVerdict {
    let prev_coords: Vec<f64> = q.iter().map(|&(t, _)| t).collect();
    let flipped: Samples;
    let key_view = if rising {
        key
    } else {
        flipped = key.iter().map(|&(t, k)| (t, -k)).collect();
        &flipped
    };
    let split = locate_split_rising(&prev_coords, key_view, key_tau);
    let left_samples: Samples = q.iter().copied().filter(|&(t, _)| t <= split).collect();
    let right_samples: Samples = q.iter().copied().filter(|&(t, _)| t >= split).collect();
    let tau = eq_slack(q, eq_tol_rel);
    let left = classify_values(&left_samples, tau, confidence);
    let right = classify_values(&right_samples, tau, confidence);
    let holds = left.class.satisfies_weak(left_dir) && right.class.satisfies_weak(right_dir);
    SplitVerdict {
        split,
        left,
        right,
        holds,
    }
}

fn split_counterexample(v: &SplitVerdict, left_dir: Direction, right_dir: Direction) -> Option<Counterexample> {
    counterexample_from(&v.left, left_dir, "left segment of phi/psi")
        .or_else(|| counterexample_from(&v.right, right_dir, "right segment of phi/psi"))
}

/// First L'Hospital-type nabla rule: a monotone derivative ratio makes
/// the anchored difference quotient monotone the same way.
pub fn check_mr21(
    pair: &FunctionPair,
    a: PointRef,
    b: PointRef,
    anchor: Anchor,
    ctx: &CheckCtx,
) -> Result<RuleReport, CalcError> {
    let ts = &pair.scale;
    let g = prepare(ts, a, b, ctx)?;
    let base = g.base_status();
    let mut rb = ReportBuilder::new("MR2.1", None, ctx.tol);
    let nw = kappa_points(ts, &g.points, DerivKind::Nabla);

    let mut ratio_dir: Option<Direction> = None;
    match eval_samples(ts, &nw, |p| pair.psi_deriv(p, DerivKind::Nabla)) {
        Err((t, e)) => rb.check(fail_eval("psi_nabla_sign_constant", t, e)),
        Ok(vals) => {
            let tau = sign_slack(&vals, ctx.tol.sign_tol_rel);
            let (check, _) = sign_check("psi_nabla_sign_constant", &vals, tau, true, base);
            rb.check(check);
        }
    }

    match eval_samples(ts, &nw, |p| pair.ratio(p, DerivKind::Nabla)) {
        Err((t, e)) => rb.check(fail_eval("ratio_monotone", t, e)),
        Ok(vals) => {
            let tau = eq_slack(&vals, ctx.tol.identity_tol_rel);
            let v = classify_values(&vals, tau, g.confidence);
            match v.class.direction() {
                Some(d) => {
                    ratio_dir = Some(d);
                    rb.check(
                        HypothesisCheck::new("ratio_monotone", base)
                            .with_detail(format!("{:?}", v.class)),
                    );
                }
                None => {
                    let mut c = HypothesisCheck::new("ratio_monotone", CheckStatus::Fail)
                        .with_detail("derivative ratio is not monotone");
                    if let Some(w) = v.witness {
                        c = c.with_witness(w);
                    }
                    rb.check(c);
                }
            }
        }
    }

    // anchored denominator psi(s) - psi(b0) must not vanish off the anchor
    let b0 = match anchor {
        Anchor::Alpha => a,
        Anchor::Beta => b,
    };
    let t0 = ts.coord(b0);
    let mut q_samples: Samples = Vec::new();
    match pair.psi_at(b0) {
        Err(e) => rb.check(fail_eval("anchored_denominator_nonzero", t0, e)),
        Ok(psi0) => {
            let phi0 = match pair.phi_at(b0) {
                Ok(v) => v,
                Err(e) => {
                    rb.check(fail_eval("anchored_denominator_nonzero", t0, e));
                    f64::NAN
                }
            };
            let mut bad: Option<Sample> = None;
            for &p in &g.points {
                let t = ts.coord(p);
                if t == t0 {
                    continue;
                }
                match (pair.psi_at(p), pair.phi_at(p)) {
                    (Ok(psi), Ok(phi)) => {
                        let den = psi - psi0;
                        if den == 0.0 {
                            bad.get_or_insert(Sample(t, psi));
                        } else if phi0.is_finite() {
                            q_samples.push((t, (phi - phi0) / den));
                        }
                    }
                    (Err(e), _) | (_, Err(e)) => {
                        rb.check(fail_eval("anchored_denominator_nonzero", t, e));
                        break;
                    }
                }
            }
            match bad {
                Some(w) => rb.check(
                    HypothesisCheck::new("anchored_denominator_nonzero", CheckStatus::Fail)
                        .with_detail("psi(s) equals psi at the anchor")
                        .with_witness(Witness::Point(w)),
                ),
                None => rb.check(HypothesisCheck::new("anchored_denominator_nonzero", base)),
            }
        }
    }

    // printed hypothesis, reported but not blocking: sign of psi itself
    if let Ok(vals) = eval_samples(ts, &g.points, |p| pair.psi_at(p)) {
        let tau = sign_slack(&vals, ctx.tol.sign_tol_rel);
        let status = match Signs::of(&vals, tau).weak() {
            Some(_) => CheckStatus::Pass,
            None => CheckStatus::Fail,
        };
        rb.diagnostic(Diagnostic {
            name: "printed_psi_sign_constant".into(),
            status: Some(status),
            value: None,
            detail: "hypothesis as printed (sign of psi itself); the effective check is \
                     sign constancy of psi nabla plus nonvanishing anchored denominators"
                .into(),
        });
    }
    if anchor == Anchor::Beta {
        rb.diagnostic(Diagnostic {
            name: "beta_anchor".into(),
            status: None,
            value: None,
            detail: "beta-anchored quotient; direction claim verified empirically, \
                     anomalies surface as counterexamples"
                .into(),
        });
    }

    if rb.any_failed() {
        return Ok(rb.hypothesis_failed());
    }

    let expected = ratio_dir.expect("ratio direction recorded on pass");
    let tau = eq_slack(&q_samples, ctx.tol.identity_tol_rel);
    let verdict = classify_values(&q_samples, tau, g.confidence);
    let holds = verdict.class.satisfies_weak(expected);
    let counterexample = counterexample_from(&verdict, expected, "anchored quotient");
    Ok(rb.conclude(
        Conclusion::Global {
            expected,
            verdict,
            holds,
        },
        counterexample,
    ))
}

/// Monotonicity of the Y-function itself from the ratio direction and
/// the sign of `psi at rho`.
pub fn check_prop22(
    pair: &FunctionPair,
    a: PointRef,
    b: PointRef,
    ctx: &CheckCtx,
) -> Result<RuleReport, CalcError> {
    let ts = &pair.scale;
    let g = prepare(ts, a, b, ctx)?;
    let base = g.base_status();
    let mut rb = ReportBuilder::new("Prop2.2", None, ctx.tol);
    let nw = kappa_points(ts, &g.points, DerivKind::Nabla);

    match eval_samples(ts, &nw, |p| pair.psi_deriv(p, DerivKind::Nabla)) {
        Err((t, e)) => rb.check(fail_eval("psi_nabla_nonvanishing", t, e)),
        Ok(vals) => match vals.iter().find(|&&(_, v)| v == 0.0) {
            Some(&(t, v)) => rb.check(
                HypothesisCheck::new("psi_nabla_nonvanishing", CheckStatus::Fail)
                    .with_witness(Witness::Point(Sample(t, v))),
            ),
            None => rb.check(HypothesisCheck::new("psi_nabla_nonvanishing", base)),
        },
    }

    let mut rho_sign = 1i8;
    match eval_samples(ts, &nw, |p| pair.psi.eval_at(ts, ts.rho(p))) {
        Err((t, e)) => rb.check(fail_eval("psi_rho_sign_constant", t, e)),
        Ok(vals) => {
            let tau = sign_slack(&vals, ctx.tol.sign_tol_rel);
            let (check, s) = sign_check("psi_rho_sign_constant", &vals, tau, false, base);
            rb.check(check);
            if let Some(s) = s {
                if s < 0 {
                    rho_sign = -1;
                }
            }
        }
    }

    let mut ratio_dir: Option<Direction> = None;
    match eval_samples(ts, &nw, |p| pair.ratio(p, DerivKind::Nabla)) {
        Err((t, e)) => rb.check(fail_eval("ratio_monotone", t, e)),
        Ok(vals) => {
            let tau = eq_slack(&vals, ctx.tol.identity_tol_rel);
            let v = classify_values(&vals, tau, g.confidence);
            match v.class.direction() {
                Some(d) => {
                    ratio_dir = Some(d);
                    rb.check(
                        HypothesisCheck::new("ratio_monotone", base)
                            .with_detail(format!("{:?}", v.class)),
                    );
                }
                None => {
                    let mut c = HypothesisCheck::new("ratio_monotone", CheckStatus::Fail)
                        .with_detail("derivative ratio is not monotone");
                    if let Some(w) = v.witness {
                        c = c.with_witness(w);
                    }
                    rb.check(c);
                }
            }
        }
    }

    let y_samples = match eval_samples(ts, &nw, |p| pair.y_nabla(p)) {
        Err((t, e)) => {
            rb.check(fail_eval("y_defined", t, e));
            Vec::new()
        }
        Ok(vals) => vals,
    };

    if rb.any_failed() {
        return Ok(rb.hypothesis_failed());
    }

    let dir = ratio_dir.unwrap();
    let expected = if rho_sign >= 0 { dir } else { dir.flipped() };
    let tau = eq_slack(&y_samples, ctx.tol.identity_tol_rel);
    let verdict = classify_values(&y_samples, tau, g.confidence);
    let holds = verdict.class.satisfies_weak(expected);
    let counterexample = counterexample_from(&verdict, expected, "Y-function");
    Ok(rb.conclude(
        Conclusion::Global {
            expected,
            verdict,
            holds,
        },
        counterexample,
    ))
}

/// Second nabla rule: endpoint signs of the Y-function pin the global
/// or split-point behavior of the plain quotient.
pub fn check_mr22(
    pair: &FunctionPair,
    a: PointRef,
    b: PointRef,
    case: Mr22Case,
    ctx: &CheckCtx,
) -> Result<RuleReport, CalcError> {
    let ts = &pair.scale;
    let g = prepare(ts, a, b, ctx)?;
    let base = g.base_status();
    let rule_id = format!("MR2.2({})", case.index());
    let mut rb = ReportBuilder::new(&rule_id, None, ctx.tol);
    let nw = kappa_points(ts, &g.points, DerivKind::Nabla);

    // psi strictly positive everywhere on the grid
    let psi_samples = match eval_samples(ts, &g.points, |p| pair.psi_at(p)) {
        Err((t, e)) => {
            rb.check(fail_eval("psi_positive", t, e));
            return Ok(rb.hypothesis_failed());
        }
        Ok(vals) => vals,
    };
    match psi_samples.iter().find(|&&(_, v)| v <= 0.0) {
        Some(&(t, v)) => rb.check(
            HypothesisCheck::new("psi_positive", CheckStatus::Fail)
                .with_witness(Witness::Point(Sample(t, v))),
        ),
        None => rb.check(HypothesisCheck::new("psi_positive", base)),
    }

    let mut s_sign = 0i8;
    match eval_samples(ts, &nw, |p| pair.psi_deriv(p, DerivKind::Nabla)) {
        Err((t, e)) => rb.check(fail_eval("psi_nabla_sign_constant", t, e)),
        Ok(vals) => {
            let tau = sign_slack(&vals, ctx.tol.sign_tol_rel);
            let (check, s) = sign_check("psi_nabla_sign_constant", &vals, tau, true, base);
            rb.check(check);
            s_sign = s.unwrap_or(0);
        }
    }

    let mut ratio_dir = Direction::Increasing;
    match eval_samples(ts, &nw, |p| pair.ratio(p, DerivKind::Nabla)) {
        Err((t, e)) => rb.check(fail_eval("ratio_monotone", t, e)),
        Ok(vals) => {
            let tau = eq_slack(&vals, ctx.tol.identity_tol_rel);
            let v = classify_values(&vals, tau, g.confidence);
            let required = match case {
                Mr22Case::Three => Some(Direction::Increasing),
                Mr22Case::Four => Some(Direction::Decreasing),
                _ => None,
            };
            let ok = match (v.class.direction(), required) {
                (None, _) => false,
                (Some(_), Some(req)) => v.class.satisfies_weak(req),
                (Some(_), None) => true,
            };
            if ok {
                ratio_dir = v.class.direction().unwrap();
                rb.check(
                    HypothesisCheck::new("ratio_monotone", base)
                        .with_detail(format!("{:?}", v.class)),
                );
            } else {
                let mut c = HypothesisCheck::new("ratio_monotone", CheckStatus::Fail)
                    .with_detail(format!(
                        "classified {:?}, case requires {:?}",
                        v.class,
                        required.unwrap_or(Direction::Increasing)
                    ));
                if let Some(w) = v.witness {
                    c = c.with_witness(w);
                }
                rb.check(c);
            }
        }
    }

    let y_samples = match eval_samples(ts, &nw, |p| pair.y_nabla(p)) {
        Err((t, e)) => {
            rb.check(fail_eval("y_defined", t, e));
            Vec::new()
        }
        Ok(vals) => vals,
    };

    if !y_samples.is_empty() {
        let tau_y = sign_slack(&y_samples, ctx.tol.sign_tol_rel);
        let first = *y_samples.first().unwrap();
        let last = *y_samples.last().unwrap();
        // endpoint carrying the claimed global sign depends on the
        // ratio (hence Y) direction for the global cases
        let conditions: Vec<(Sample, bool)> = match case {
            Mr22Case::One => {
                let e = if ratio_dir == Direction::Decreasing { last } else { first };
                vec![(Sample(e.0, e.1), e.1 >= -tau_y)]
            }
            Mr22Case::Two => {
                let e = if ratio_dir == Direction::Decreasing { first } else { last };
                vec![(Sample(e.0, e.1), e.1 <= tau_y)]
            }
            Mr22Case::Three => vec![
                (Sample(first.0, first.1), first.1 <= tau_y),
                (Sample(last.0, last.1), last.1 >= -tau_y),
            ],
            Mr22Case::Four => vec![
                (Sample(first.0, first.1), first.1 >= -tau_y),
                (Sample(last.0, last.1), last.1 <= tau_y),
            ],
        };
        match conditions.iter().find(|(_, ok)| !ok) {
            Some((w, _)) => rb.check(
                HypothesisCheck::new("y_endpoint_sign", CheckStatus::Fail)
                    .with_detail("endpoint sign condition of the case is not met")
                    .with_witness(Witness::Point(*w)),
            ),
            None => rb.check(HypothesisCheck::new("y_endpoint_sign", base)),
        }
    }

    if rb.any_failed() {
        return Ok(rb.hypothesis_failed());
    }

    let q_samples: Samples = g
        .points
        .iter()
        .zip(psi_samples.iter())
        .map(|(&p, &(t, psi))| {
            let phi = pair.phi_at(p).expect("phi evaluated on this grid");
            (t, phi / psi)
        })
        .collect();

    match case {
        Mr22Case::One | Mr22Case::Two => {
            let up = s_sign > 0;
            let expected = match case {
                Mr22Case::One => {
                    if up {
                        Direction::Increasing
                    } else {
                        Direction::Decreasing
                    }
                }
                _ => {
                    if up {
                        Direction::Decreasing
                    } else {
                        Direction::Increasing
                    }
                }
            };
            let tau = eq_slack(&q_samples, ctx.tol.identity_tol_rel);
            let verdict = classify_values(&q_samples, tau, g.confidence);
            let holds = verdict.class.satisfies_weak(expected);
            let counterexample = counterexample_from(&verdict, expected, "phi/psi");
            Ok(rb.conclude(
                Conclusion::Global {
                    expected,
                    verdict,
                    holds,
                },
                counterexample,
            ))
        }
        Mr22Case::Three | Mr22Case::Four => {
            let rising = case == Mr22Case::Three;
            let dec_then_inc = (case == Mr22Case::Three) == (s_sign > 0);
            let (left_dir, right_dir) = if dec_then_inc {
                (Direction::Decreasing, Direction::Increasing)
            } else {
                (Direction::Increasing, Direction::Decreasing)
            };
            let tau_y = sign_slack(&y_samples, ctx.tol.sign_tol_rel);
            let v = verify_split(
                &q_samples,
                &y_samples,
                tau_y,
                rising,
                left_dir,
                right_dir,
                ctx.tol.identity_tol_rel,
                g.confidence,
            );
            let counterexample = split_counterexample(&v, left_dir, right_dir);
            let holds = v.holds;
            Ok(rb.conclude(
                Conclusion::Split {
                    split_point: v.split,
                    left_expected: left_dir,
                    right_expected: right_dir,
                    left: v.left,
                    right: v.right,
                    holds,
                },
                counterexample,
            ))
        }
    }
}

/// Third nabla rule: zero boundary values and a unimodal derivative
/// ratio; the sign agreement of the weight and the terminal Y-value
/// picks one of four quotient patterns.
pub fn check_mr23(
    pair: &FunctionPair,
    a: PointRef,
    b: PointRef,
    p_split: PointRef,
    ctx: &CheckCtx,
) -> Result<RuleReport, CalcError> {
    let ts = &pair.scale;
    let g = prepare(ts, a, b, ctx)?;
    let base = g.base_status();
    let mut rb = ReportBuilder::new("MR2.3", None, ctx.tol);
    let nw = kappa_points(ts, &g.points, DerivKind::Nabla);
    let t_split = ts.coord(p_split);
    let ta = ts.coord(a);

    let phi_samples = match eval_samples(ts, &g.points, |p| pair.phi_at(p)) {
        Err((t, e)) => {
            rb.check(fail_eval("boundary_values_zero", t, e));
            return Ok(rb.hypothesis_failed());
        }
        Ok(v) => v,
    };
    let psi_samples = match eval_samples(ts, &g.points, |p| pair.psi_at(p)) {
        Err((t, e)) => {
            rb.check(fail_eval("boundary_values_zero", t, e));
            return Ok(rb.hypothesis_failed());
        }
        Ok(v) => v,
    };

    let tau_zero = sign_slack(&phi_samples, ctx.tol.sign_tol_rel)
        .max(sign_slack(&psi_samples, ctx.tol.sign_tol_rel));
    let phi_a = phi_samples[0].1;
    let psi_a = psi_samples[0].1;
    if phi_a.abs() <= tau_zero && psi_a.abs() <= tau_zero {
        rb.check(HypothesisCheck::new("boundary_values_zero", base));
    } else {
        rb.check(
            HypothesisCheck::new("boundary_values_zero", CheckStatus::Fail)
                .with_detail("phi and psi must vanish at the left endpoint")
                .with_witness(Witness::Point(Sample(ta, if phi_a.abs() > tau_zero {
                    phi_a
                } else {
                    psi_a
                }))),
        );
    }

    match psi_samples
        .iter()
        .find(|&&(t, v)| t > ta && v == 0.0)
    {
        Some(&(t, v)) => rb.check(
            HypothesisCheck::new("psi_nonzero_after_start", CheckStatus::Fail)
                .with_witness(Witness::Point(Sample(t, v))),
        ),
        None => rb.check(HypothesisCheck::new("psi_nonzero_after_start", base)),
    }

    // ratio monotone up to the split, then reversed
    let mut pattern_a = true; // increasing then decreasing
    match eval_samples(ts, &nw, |p| pair.ratio(p, DerivKind::Nabla)) {
        Err((t, e)) => rb.check(fail_eval("ratio_unimodal", t, e)),
        Ok(vals) => {
            let tau = eq_slack(&vals, ctx.tol.identity_tol_rel);
            let seg1: Samples = vals.iter().copied().filter(|&(t, _)| t <= t_split).collect();
            let seg2: Samples = vals.iter().copied().filter(|&(t, _)| t >= t_split).collect();
            let v1 = classify_values(&seg1, tau, g.confidence);
            let v2 = classify_values(&seg2, tau, g.confidence);
            let a_ok = v1.class.satisfies_weak(Direction::Increasing)
                && v2.class.satisfies_weak(Direction::Decreasing);
            let b_ok = v1.class.satisfies_weak(Direction::Decreasing)
                && v2.class.satisfies_weak(Direction::Increasing);
            if a_ok || b_ok {
                pattern_a = a_ok;
                rb.check(HypothesisCheck::new("ratio_unimodal", base).with_detail(format!(
                    "{:?} then {:?} around t = {t_split}",
                    v1.class, v2.class
                )));
            } else {
                let mut c = HypothesisCheck::new("ratio_unimodal", CheckStatus::Fail)
                    .with_detail(format!(
                        "ratio is {:?} then {:?}, neither unimodal pattern",
                        v1.class, v2.class
                    ));
                if let Some(w) = v1.witness.or(v2.witness) {
                    c = c.with_witness(w);
                }
                rb.check(c);
            }
        }
    }

    // weight psi^nabla / (psi * psi^rho), where defined
    let weight_points: Vec<PointRef> = nw
        .iter()
        .copied()
        .filter(|&p| {
            let psi = pair.psi_at(p).unwrap_or(0.0);
            let psi_rho = pair.psi.eval_at(ts, ts.rho(p)).unwrap_or(0.0);
            psi != 0.0 && psi_rho != 0.0
        })
        .collect();
    let mut w_sign = 0i8;
    if weight_points.is_empty() {
        rb.check(
            HypothesisCheck::new("weight_sign_constant", CheckStatus::Fail)
                .with_detail("no points where psi * psi^rho is nonzero"),
        );
    } else {
        match eval_samples(ts, &weight_points, |p| {
            let psi = pair.psi_at(p)?;
            let psi_rho = pair.psi.eval_at(ts, ts.rho(p))?;
            let dpsi = pair.psi_deriv(p, DerivKind::Nabla)?;
            Ok(dpsi / (psi * psi_rho))
        }) {
            Err((t, e)) => rb.check(fail_eval("weight_sign_constant", t, e)),
            Ok(vals) => {
                let tau = sign_slack(&vals, ctx.tol.sign_tol_rel);
                let (check, s) = sign_check("weight_sign_constant", &vals, tau, true, base);
                rb.check(check);
                w_sign = s.unwrap_or(0);
            }
        }
    }

    let y_samples = match eval_samples(ts, &nw, |p| pair.y_nabla(p)) {
        Err((t, e)) => {
            rb.check(fail_eval("y_defined", t, e));
            Vec::new()
        }
        Ok(v) => v,
    };

    rb.diagnostic(Diagnostic {
        name: "second_segment_reading".into(),
        status: None,
        value: None,
        detail: "the source states the ratio increases on both segments; the checker \
                 follows the proof's increasing-then-decreasing reading"
            .into(),
    });

    if rb.any_failed() {
        return Ok(rb.hypothesis_failed());
    }

    let tau_y = sign_slack(&y_samples, ctx.tol.sign_tol_rel);
    let y_beta = y_samples.last().unwrap().1;
    let agree = if w_sign > 0 {
        y_beta >= -tau_y
    } else {
        y_beta <= tau_y
    };
    let statement = match (pattern_a, agree) {
        (true, true) => "i",
        (true, false) => "ii",
        (false, true) => "iii",
        (false, false) => "iv",
    };
    rb.diagnostic(Diagnostic {
        name: "statement".into(),
        status: None,
        value: Some(y_beta),
        detail: format!("statement ({statement}) applies; terminal Y value recorded"),
    });

    // quotient defined strictly after the left endpoint
    let q_samples: Samples = g
        .points
        .iter()
        .zip(psi_samples.iter())
        .zip(phi_samples.iter())
        .filter(|((_, &(t, _)), _)| t > ta)
        .map(|((_, &(t, psi)), &(_, phi))| (t, phi / psi))
        .collect();

    match statement {
        "i" | "iv" => {
            let expected = if statement == "i" {
                Direction::Increasing
            } else {
                Direction::Decreasing
            };
            let tau = eq_slack(&q_samples, ctx.tol.identity_tol_rel);
            let verdict = classify_values(&q_samples, tau, g.confidence);
            let holds = verdict.class.satisfies_weak(expected);
            let counterexample = counterexample_from(&verdict, expected, "phi/psi");
            Ok(rb.conclude(
                Conclusion::Global {
                    expected,
                    verdict,
                    holds,
                },
                counterexample,
            ))
        }
        _ => {
            // (ii): increasing then decreasing; (iii): decreasing then increasing
            let (left_dir, right_dir, rising) = if statement == "ii" {
                (Direction::Increasing, Direction::Decreasing, false)
            } else {
                (Direction::Decreasing, Direction::Increasing, true)
            };
            // key sign: w * Y controls the local slope of the quotient
            let key: Samples = y_samples
                .iter()
                .map(|&(t, y)| (t, if w_sign > 0 { y } else { -y }))
                .collect();
            let v = verify_split(
                &q_samples,
                &key,
                tau_y,
                rising,
                left_dir,
                right_dir,
                ctx.tol.identity_tol_rel,
                g.confidence,
            );
            let counterexample = split_counterexample(&v, left_dir, right_dir);
            let holds = v.holds;
            Ok(rb.conclude(
                Conclusion::Split {
                    split_point: v.split,
                    left_expected: left_dir,
                    right_expected: right_dir,
                    left: v.left,
                    right: v.right,
                    holds,
                },
                counterexample,
            ))
        }
    }
}

/// Diamond-alpha quotient direction from the pointwise sign of the
/// quotient-rule numerator against the triple product.
pub fn check_prop32(
    pair: &FunctionPair,
    alpha: f64,
    a: PointRef,
    b: PointRef,
    ctx: &CheckCtx,
) -> Result<RuleReport, CalcError> {
    DerivKind::Diamond(alpha).validate()?;
    let ts = &pair.scale;
    let g = prepare(ts, a, b, ctx)?;
    let base = g.base_status();
    let mut rb = ReportBuilder::new("Prop3.2", Some(alpha), ctx.tol);
    let dw = kappa_points(ts, &g.points, DerivKind::Diamond(alpha));

    let mut d_sign = 0i8;
    match eval_samples(ts, &dw, |p| {
        let psi = pair.psi_at(p)?;
        let psi_s = pair.psi.eval_at(ts, ts.sigma(p))?;
        let psi_r = pair.psi.eval_at(ts, ts.rho(p))?;
        Ok(psi * psi_s * psi_r)
    }) {
        Err((t, e)) => rb.check(fail_eval("triple_product_sign_constant", t, e)),
        Ok(vals) => {
            let tau = sign_slack(&vals, ctx.tol.sign_tol_rel);
            let (check, s) = sign_check("triple_product_sign_constant", &vals, tau, true, base);
            rb.check(check);
            d_sign = s.unwrap_or(0);
        }
    }

    let mut n_sign = 0i8;
    match eval_samples(ts, &dw, |p| {
        let psi_s = pair.psi.eval_at(ts, ts.sigma(p))?;
        let psi_r = pair.psi.eval_at(ts, ts.rho(p))?;
        let phi_s = pair.phi.eval_at(ts, ts.sigma(p))?;
        let phi_r = pair.phi.eval_at(ts, ts.rho(p))?;
        let phi_dia = pair.phi_deriv(p, DerivKind::Diamond(alpha))?;
        let psi_d = pair.psi_deriv(p, DerivKind::Delta)?;
        let psi_n = pair.psi_deriv(p, DerivKind::Nabla)?;
        Ok(phi_dia * psi_s * psi_r
            - alpha * phi_s * psi_r * psi_d
            - (1.0 - alpha) * phi_r * psi_s * psi_n)
    }) {
        Err((t, e)) => rb.check(fail_eval("inequality_direction_uniform", t, e)),
        Ok(vals) => {
            let tau = sign_slack(&vals, ctx.tol.sign_tol_rel);
            let (check, s) = sign_check("inequality_direction_uniform", &vals, tau, false, base);
            rb.check(check);
            n_sign = s.unwrap_or(0);
        }
    }

    let q_samples = match eval_samples(ts, &g.points, |p| {
        let psi = pair.psi_at(p)?;
        if psi == 0.0 {
            return Err(CalcError::ZeroDenominator {
                t: ts.coord(p),
                what: "psi",
            });
        }
        Ok(pair.phi_at(p)? / psi)
    }) {
        Err((t, e)) => {
            rb.check(fail_eval("quotient_defined", t, e));
            Vec::new()
        }
        Ok(v) => v,
    };

    if rb.any_failed() {
        return Ok(rb.hypothesis_failed());
    }

    let expected = if n_sign == 0 {
        Direction::Constant
    } else if (n_sign > 0) == (d_sign > 0) {
        Direction::Increasing
    } else {
        Direction::Decreasing
    };
    let tau = eq_slack(&q_samples, ctx.tol.identity_tol_rel);
    let verdict = classify_values(&q_samples, tau, g.confidence);
    let holds = verdict.class.satisfies_weak(expected);
    let counterexample = counterexample_from(&verdict, expected, "phi/psi");
    Ok(rb.conclude(
        Conclusion::Global {
            expected,
            verdict,
            holds,
        },
        counterexample,
    ))
}

/// Diamond-alpha rule for the ratio of diamond derivatives. The
/// conclusion keys on an independent reference derivative of the
/// tabulated ratio; the printed expansion is evaluated alongside and
/// its residual reported. Purely discrete scales.
pub fn check_mr31(
    pair: &FunctionPair,
    alpha: f64,
    a: PointRef,
    b: PointRef,
    ctx: &CheckCtx,
) -> Result<RuleReport, CalcError> {
    DerivKind::Diamond(alpha).validate()?;
    let ts = &pair.scale;
    if !ts.is_discrete() {
        return Err(CalcError::RequiresDiscreteScale { op: "check_mr31" });
    }
    let _g = prepare(ts, a, b, ctx)?;
    let mut rb = ReportBuilder::new("MR3.1", Some(alpha), ctx.tol);
    let dia = DerivKind::Diamond(alpha);
    let (va, vb) = (ts.coord(a), ts.coord(b));

    // tabulate the diamond-derivative ratio over the interior window
    let tabulated = pair.tabulate_diamond_ratio(alpha);
    let (sub, ratio_table) = match tabulated {
        Err(e) => {
            rb.check(
                HypothesisCheck::new("psi_dia_nonvanishing", CheckStatus::Fail)
                    .with_detail(e.to_string()),
            );
            return Ok(rb.hypothesis_failed());
        }
        Ok(v) => {
            rb.check(HypothesisCheck::new("psi_dia_nonvanishing", CheckStatus::Pass));
            v
        }
    };

    let ratio_samples: Samples = ratio_table
        .as_table()
        .unwrap()
        .entries()
        .iter()
        .copied()
        .filter(|&(t, _)| va <= t && t <= vb)
        .collect();

    // reference derivative at the doubly-reduced points in range
    let sub_refs = sub.discrete_refs().unwrap();
    let inner: Vec<PointRef> = if sub_refs.len() >= 3 {
        sub_refs[1..sub_refs.len() - 1]
            .iter()
            .copied()
            .filter(|&p| {
                let t = sub.coord(p);
                va <= t && t <= vb
            })
            .collect()
    } else {
        Vec::new()
    };
    if inner.is_empty() {
        rb.check(
            HypothesisCheck::new("reference_sign_uniform", CheckStatus::Fail)
                .with_detail("scale too small for the doubly-reduced window"),
        );
        return Ok(rb.hypothesis_failed());
    }

    let mut ref_samples: Samples = Vec::with_capacity(inner.len());
    let mut printed_residual: f64 = 0.0;
    let mut printed_sign_matches = true;
    for &p in &inner {
        let t = sub.coord(p);
        let reference = match crate::calculus::deriv(&ratio_table, &sub, p, dia) {
            Ok(v) => v,
            Err(e) => {
                rb.check(fail_eval("reference_sign_uniform", t, e));
                return Ok(rb.hypothesis_failed());
            }
        };
        ref_samples.push((t, reference));
        if let Ok(printed) = pair.diamond_ratio_deriv_printed(alpha, ts.locate(t)?) {
            printed_residual = printed_residual.max((printed - reference).abs());
            if printed.signum() != reference.signum()
                && (printed - reference).abs() > ctx.tol.identity_tol_rel * (1.0 + reference.abs())
            {
                printed_sign_matches = false;
            }
        }
    }

    let tau = sign_slack(&ref_samples, ctx.tol.sign_tol_rel);
    let (check, r_sign) = sign_check(
        "reference_sign_uniform",
        &ref_samples,
        tau,
        false,
        CheckStatus::Pass,
    );
    rb.check(check);

    rb.diagnostic(Diagnostic {
        name: "printed_formula_max_residual".into(),
        status: None,
        value: Some(printed_residual),
        detail: "max |printed expansion - reference derivative| over the window".into(),
    });
    rb.diagnostic(Diagnostic {
        name: "printed_sign_matches_reference".into(),
        status: Some(if printed_sign_matches {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }),
        value: None,
        detail: "whether the printed expansion orders the rule the same way as the reference"
            .into(),
    });

    if rb.any_failed() {
        return Ok(rb.hypothesis_failed());
    }

    let expected = match r_sign.unwrap() {
        0 => Direction::Constant,
        s if s > 0 => Direction::Increasing,
        _ => Direction::Decreasing,
    };
    let tau_q = eq_slack(&ratio_samples, ctx.tol.identity_tol_rel);
    let verdict = classify_values(&ratio_samples, tau_q, Confidence::Exact);
    let holds = verdict.class.satisfies_weak(expected);
    let counterexample = counterexample_from(&verdict, expected, "phi^dia / psi^dia");
    Ok(rb.conclude(
        Conclusion::Global {
            expected,
            verdict,
            holds,
        },
        counterexample,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::ScaleFunction;
    use crate::rules::{MonotoneClass, RuleOutcome};

    fn lattice(lo: i64, hi: i64) -> TimeScale {
        TimeScale::from_points((lo..=hi).map(|i| i as f64).collect()).unwrap()
    }

    fn pair(ts: &TimeScale, phi: &str, psi: &str) -> FunctionPair {
        FunctionPair::new(
            ScaleFunction::parse(phi).unwrap(),
            ScaleFunction::parse(psi).unwrap(),
            ts.clone(),
        )
    }

    fn ctx() -> CheckCtx {
        CheckCtx::default()
    }

    #[test]
    fn mr21_square_over_identity_passes() {
        // ratio 2t-1 strictly increasing, quotient (t^2-0)/(t-0) = t
        let ts = lattice(0, 3);
        let pr = pair(&ts, "x^2", "x");
        let r = check_mr21(&pr, ts.min_ref(), ts.max_ref(), Anchor::Alpha, &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::Verified, "{r:?}");
        match r.conclusion.unwrap() {
            Conclusion::Global {
                expected, verdict, ..
            } => {
                assert_eq!(expected, Direction::Increasing);
                assert_eq!(verdict.class, MonotoneClass::StrictlyIncreasing);
            }
            other => panic!("expected global conclusion, got {other:?}"),
        }
    }

    #[test]
    fn mr21_constant_ratio_gives_constant_quotient() {
        let ts = lattice(0, 4);
        let pr = pair(&ts, "3*x", "x");
        let r = check_mr21(&pr, ts.min_ref(), ts.max_ref(), Anchor::Alpha, &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::Verified);
        match r.conclusion.unwrap() {
            Conclusion::Global {
                expected, verdict, ..
            } => {
                assert_eq!(expected, Direction::Constant);
                assert_eq!(verdict.class, MonotoneClass::Constant);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mr21_beta_anchor_passes() {
        let ts = lattice(0, 4);
        let pr = pair(&ts, "x^2", "x");
        let r = check_mr21(&pr, ts.min_ref(), ts.max_ref(), Anchor::Beta, &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::Verified, "{r:?}");
    }

    #[test]
    fn mr21_degenerate_anchor_is_hypothesis_fail() {
        // psi = (x-1)^2 on {0,1,2}: psi(2) = psi(0), and psi^nabla
        // changes sign; the anchored denominator check must fail
        let ts = lattice(0, 2);
        let pr = pair(&ts, "x", "(x-1)^2");
        let r = check_mr21(&pr, ts.min_ref(), ts.max_ref(), Anchor::Alpha, &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::HypothesisFailed);
        assert!(r.conclusion.is_none());
        let denom = r
            .hypothesis_checks
            .iter()
            .find(|c| c.name == "anchored_denominator_nonzero")
            .unwrap();
        assert_eq!(denom.status, CheckStatus::Fail);
    }

    #[test]
    fn mr21_printed_psi_hypothesis_reported_both_ways() {
        let ts = lattice(0, 3);
        // psi = x - 1.5 changes sign but psi^nabla = 1 is sign-constant
        let pr = pair(&ts, "x^2", "x-1.5");
        let r = check_mr21(&pr, ts.min_ref(), ts.max_ref(), Anchor::Alpha, &ctx()).unwrap();
        let printed = r
            .diagnostics
            .iter()
            .find(|d| d.name == "printed_psi_sign_constant")
            .unwrap();
        assert_eq!(printed.status, Some(CheckStatus::Fail));
        // effective hypotheses pass, so the conclusion is still checked
        assert!(r.conclusion.is_some());
        assert_eq!(r.outcome(), RuleOutcome::Verified, "{r:?}");
    }

    #[test]
    fn mr21_direction_coherence_under_negation() {
        let ts = lattice(0, 5);
        let pr = pair(&ts, "x^2", "x");
        let r = check_mr21(&pr, ts.min_ref(), ts.max_ref(), Anchor::Alpha, &ctx()).unwrap();
        // negating phi flips the quotient direction
        let neg = pr.with_negated_phi();
        let rn = check_mr21(&neg, ts.min_ref(), ts.max_ref(), Anchor::Alpha, &ctx()).unwrap();
        assert_eq!(rn.outcome(), RuleOutcome::Verified);
        let dir = |rep: &RuleReport| match rep.conclusion.as_ref().unwrap() {
            Conclusion::Global { expected, .. } => *expected,
            _ => unreachable!(),
        };
        assert_eq!(dir(&r), Direction::Increasing);
        assert_eq!(dir(&rn), Direction::Decreasing);
        // negating both leaves the anchored quotient unchanged
        let both = neg.with_negated_psi();
        let rb2 = check_mr21(&both, ts.min_ref(), ts.max_ref(), Anchor::Alpha, &ctx()).unwrap();
        assert_eq!(dir(&rb2), Direction::Increasing);
        assert_eq!(rb2.outcome(), RuleOutcome::Verified);
    }

    #[test]
    fn mr21_classical_interval_case_is_sampled_best_effort() {
        // the continuous case: ratio 3x^2 increasing on [1,2], anchored
        // quotient verified on a sampled grid
        let ts = TimeScale::interval(1.0, 2.0).unwrap();
        let pr = pair(&ts, "x^3", "x");
        let r = check_mr21(&pr, ts.min_ref(), ts.max_ref(), Anchor::Alpha, &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::Verified, "{r:?}");
        for c in &r.hypothesis_checks {
            assert_eq!(c.status, CheckStatus::BestEffort, "{c:?}");
        }
        match r.conclusion.unwrap() {
            Conclusion::Global { verdict, .. } => {
                assert_eq!(verdict.confidence, crate::rules::Confidence::Sampled);
                assert_eq!(verdict.class, MonotoneClass::StrictlyIncreasing);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn prop22_square_over_identity() {
        // Y = t^2 - t increasing on {2..5}
        let ts = lattice(1, 5);
        let pr = pair(&ts, "x^2", "x");
        let r = check_prop22(&pr, ts.min_ref(), ts.max_ref(), &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::Verified, "{r:?}");
        match r.conclusion.unwrap() {
            Conclusion::Global {
                expected, verdict, ..
            } => {
                assert_eq!(expected, Direction::Increasing);
                assert!(matches!(
                    verdict.class,
                    MonotoneClass::StrictlyIncreasing | MonotoneClass::WeaklyIncreasing
                ));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn prop22_negated_psi_flips_consistently() {
        // psi -> -psi: Y unchanged, psi^rho < 0, ratio flips direction
        let ts = lattice(1, 5);
        let pr = pair(&ts, "x^2", "x").with_negated_psi();
        let r = check_prop22(&pr, ts.min_ref(), ts.max_ref(), &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::Verified, "{r:?}");
        match r.conclusion.unwrap() {
            Conclusion::Global { expected, .. } => assert_eq!(expected, Direction::Increasing),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn prop22_constant_ratio_gives_constant_y() {
        let ts = lattice(1, 5);
        let pr = pair(&ts, "2*x+7", "x");
        let r = check_prop22(&pr, ts.min_ref(), ts.max_ref(), &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::Verified);
        match r.conclusion.unwrap() {
            Conclusion::Global { verdict, .. } => {
                assert_eq!(verdict.class, MonotoneClass::Constant)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mr22_case1_passes() {
        // ratio increasing, psi^nabla > 0, Y(first) = 2 >= 0
        let ts = lattice(1, 5);
        let pr = pair(&ts, "x^2", "x");
        let r = check_mr22(&pr, ts.min_ref(), ts.max_ref(), Mr22Case::One, &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::Verified, "{r:?}");
        match r.conclusion.unwrap() {
            Conclusion::Global { expected, .. } => assert_eq!(expected, Direction::Increasing),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mr22_case2_negated_phi_passes() {
        // phi -> -phi of case 1: Y flips sign, ratio flips direction,
        // quotient decreasing
        let ts = lattice(1, 5);
        let pr = pair(&ts, "x^2", "x").with_negated_phi();
        let r = check_mr22(&pr, ts.min_ref(), ts.max_ref(), Mr22Case::Two, &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::Verified, "{r:?}");
        match r.conclusion.unwrap() {
            Conclusion::Global { expected, .. } => assert_eq!(expected, Direction::Decreasing),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mr22_psi_not_positive_is_hypothesis_fail() {
        let ts = lattice(1, 5);
        let pr = pair(&ts, "x^2", "x-3");
        let r = check_mr22(&pr, ts.min_ref(), ts.max_ref(), Mr22Case::One, &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::HypothesisFailed);
        let psi_check = r
            .hypothesis_checks
            .iter()
            .find(|c| c.name == "psi_positive")
            .unwrap();
        assert_eq!(psi_check.status, CheckStatus::Fail);
        assert!(psi_check.witness.is_some());
    }

    #[test]
    fn mr22_case3_split_located_and_verified() {
        // phi = t^2 - 6t: ratio = 2t - 7 increasing; Y = t^2 - t + C with
        // phi shift; construct Y(first) <= 0 <= Y(last): phi = x^2 - 4x
        // on {1..5}: Y(t) = (2t-5)t - (t^2-4t) = t^2 - t; shift phi by +4
        // so Y = t^2 - t - 4: Y(2) = -2 < 0, Y(5) = 16 > 0
        let ts = lattice(1, 5);
        let pr = pair(&ts, "x^2-4*x+4", "x");
        let r = check_mr22(&pr, ts.min_ref(), ts.max_ref(), Mr22Case::Three, &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::Verified, "{r:?}");
        match r.conclusion.unwrap() {
            Conclusion::Split {
                split_point,
                left_expected,
                right_expected,
                holds,
                ..
            } => {
                assert!(holds);
                assert_eq!(left_expected, Direction::Decreasing);
                assert_eq!(right_expected, Direction::Increasing);
                // Y = t^2 - t - 4 on {2..5}: -2, 2, 8, 16 -> first
                // positive at t=3, split at rho(3) = 2
                assert_eq!(split_point, 2.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mr23_unimodal_instance_statements() {
        // phi(1)=psi(1)=0, psi = t-1 so psi^nabla = 1 > 0; build a
        // tent ratio by hand via a table for phi
        let ts = lattice(1, 7);
        // ratio r on window {2..7}: 1,2,3,2,1,0 (peak at 4)
        let r_vals = [1.0, 2.0, 3.0, 2.0, 1.0, 0.0];
        let psi = ScaleFunction::parse("x-1").unwrap();
        let mut phi_entries = vec![(1.0, 0.0)];
        let mut acc = 0.0;
        for (i, t) in (2..=7).enumerate() {
            let t = t as f64;
            acc += r_vals[i] * 1.0; // psi steps are 1
            phi_entries.push((t, acc));
        }
        let phi = ScaleFunction::table(ts.clone(), phi_entries).unwrap();
        let pr = FunctionPair::new(phi, psi, ts.clone());
        let p_split = ts.locate(4.0).unwrap();
        let r = check_mr23(&pr, ts.min_ref(), ts.max_ref(), p_split, &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::Verified, "{r:?}");
        // statement is recorded in diagnostics
        assert!(r.diagnostics.iter().any(|d| d.name == "statement"));
    }

    #[test]
    fn mr23_negated_phi_flips_statement() {
        let ts = lattice(1, 7);
        let r_vals = [1.0, 2.0, 3.0, 2.0, 1.0, 0.0];
        let psi = ScaleFunction::parse("x-1").unwrap();
        let mut phi_entries = vec![(1.0, 0.0)];
        let mut acc = 0.0;
        for (i, t) in (2..=7).enumerate() {
            acc += r_vals[i];
            phi_entries.push((t as f64, acc));
        }
        let phi = ScaleFunction::table(ts.clone(), phi_entries).unwrap();
        let pr = FunctionPair::new(phi, psi, ts.clone()).with_negated_phi();
        let p_split = ts.locate(4.0).unwrap();
        let r = check_mr23(&pr, ts.min_ref(), ts.max_ref(), p_split, &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::Verified, "{r:?}");
    }

    #[test]
    fn prop32_square_over_identity() {
        let ts = lattice(1, 5);
        let pr = pair(&ts, "x^2", "x");
        let r = check_prop32(&pr, 0.5, ts.min_ref(), ts.max_ref(), &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::Verified, "{r:?}");
        match r.conclusion.unwrap() {
            Conclusion::Global { expected, .. } => assert_eq!(expected, Direction::Increasing),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn prop32_proportional_pair_is_constant() {
        let ts = lattice(1, 5);
        let pr = pair(&ts, "3*x", "x");
        let r = check_prop32(&pr, 0.25, ts.min_ref(), ts.max_ref(), &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::Verified);
        match r.conclusion.unwrap() {
            Conclusion::Global {
                expected, verdict, ..
            } => {
                assert_eq!(expected, Direction::Constant);
                assert_eq!(verdict.class, MonotoneClass::Constant);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn prop32_negated_psi_flips_direction() {
        let ts = lattice(1, 5);
        let pr = pair(&ts, "x^2", "x").with_negated_psi();
        let r = check_prop32(&pr, 0.5, ts.min_ref(), ts.max_ref(), &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::Verified, "{r:?}");
        match r.conclusion.unwrap() {
            Conclusion::Global { expected, .. } => assert_eq!(expected, Direction::Decreasing),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mr31_cubic_over_identity_alpha_zero() {
        // ratio of nabla derivatives is 3t^2-3t+1, increasing on {0..6}
        let ts = lattice(0, 6);
        let pr = pair(&ts, "x^3", "x");
        let r = check_mr31(&pr, 0.0, ts.min_ref(), ts.max_ref(), &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::Verified, "{r:?}");
        match r.conclusion.unwrap() {
            Conclusion::Global {
                expected, verdict, ..
            } => {
                assert_eq!(expected, Direction::Increasing);
                assert_eq!(verdict.class, MonotoneClass::StrictlyIncreasing);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mr31_proportional_pair_constant_reference_zero() {
        let ts = lattice(0, 6);
        let pr = pair(&ts, "5*x", "x");
        let r = check_mr31(&pr, 0.5, ts.min_ref(), ts.max_ref(), &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::Verified);
        match r.conclusion.unwrap() {
            Conclusion::Global { verdict, .. } => {
                assert_eq!(verdict.class, MonotoneClass::Constant)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mr31_residual_diagnostic_present() {
        let ts = lattice(0, 7);
        let pr = pair(&ts, "x^3", "x^2+1");
        let r = check_mr31(&pr, 0.25, ts.min_ref(), ts.max_ref(), &ctx()).unwrap();
        let d = r
            .diagnostics
            .iter()
            .find(|d| d.name == "printed_formula_max_residual")
            .unwrap();
        assert!(d.value.is_some());
    }

    #[test]
    fn prop32_mixed_sign_hypothesis_witness_reproduces() {
        // psi constant: the numerator reduces to phi^dia, built with
        // genuinely mixed sign (slopes 2, -5, 10)
        let ts = lattice(0, 3);
        let phi = ScaleFunction::table(
            ts.clone(),
            vec![(0.0, 0.0), (1.0, 2.0), (2.0, -3.0), (3.0, 7.0)],
        )
        .unwrap();
        let psi = ScaleFunction::parse("1").unwrap();
        let pr = FunctionPair::new(phi.clone(), psi, ts.clone());
        let r = check_prop32(&pr, 0.5, ts.min_ref(), ts.max_ref(), &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::HypothesisFailed);
        let failed = r
            .hypothesis_checks
            .iter()
            .find(|c| c.name == "inequality_direction_uniform")
            .unwrap();
        match &failed.witness {
            Some(Witness::Point(s)) => {
                // the witness point re-evaluates to the recorded value
                let p = ts.locate(s.0).unwrap();
                let got = crate::calculus::deriv(&phi, &ts, p, DerivKind::Diamond(0.5)).unwrap();
                assert_eq!(got, s.1);
            }
            other => panic!("expected point witness, got {other:?}"),
        }
    }

    #[test]
    fn prop32_mixed_alpha_zigzag_yields_honest_counterexample() {
        // slopes 2, -1, 2: the half-weighted diamond derivative is
        // positive at both interior points, yet the quotient zigzags.
        // The checker must report the conclusion failure with a
        // violation witness that re-evaluates.
        let ts = lattice(0, 3);
        let phi = ScaleFunction::table(
            ts.clone(),
            vec![(0.0, 0.0), (1.0, 2.0), (2.0, 1.0), (3.0, 3.0)],
        )
        .unwrap();
        let psi = ScaleFunction::parse("1").unwrap();
        let pr = FunctionPair::new(phi.clone(), psi, ts.clone());
        let r = check_prop32(&pr, 0.5, ts.min_ref(), ts.max_ref(), &ctx()).unwrap();
        assert_eq!(r.outcome(), RuleOutcome::ConclusionFailed);
        let ce = r.counterexample.expect("counterexample recorded");
        match ce.witness {
            Witness::Violation { increase, decrease } => {
                for s in increase.iter().chain(decrease.iter()) {
                    assert_eq!(phi.eval_coord(s.0).unwrap(), s.1);
                }
            }
            other => panic!("expected violation witness, got {other:?}"),
        }
    }
}
