//! Batch verification suites: seeded random instances driven through
//! the identities and rule checkers, with residual summaries. Shared by
//! the CLI falsification mode and the acceptance tests.

use serde::Serialize;

use crate::calculus::{deriv, DerivKind};
use crate::function::CalcError;
use crate::gen::{
    gen_finite_scale_with, gen_pair_with_ratio, gen_unimodal_ratio_pair, make_psi, make_ratio,
    PsiProfile, RatioProfile, SplitMix64,
};
use crate::instance::InstanceSpec;
use crate::rules::{
    check_mr21, check_mr22, check_mr23, check_mr31, check_prop22, check_prop32, Anchor, CheckCtx,
    Mr22Case, RuleOutcome,
};

use crate::yfun::FunctionPair;

pub const ALPHAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Relative tolerance of the identity protocols:
/// `|lhs - rhs| <= IDENTITY_TOL * (1 + |rhs|)`.
pub const IDENTITY_TOL: f64 = 1e-9;

/// Consistency gate for the amended second-derivative reading against
/// its reference (one extra division by a grid gap, hence looser).
pub const SECOND_ORDER_TOL: f64 = 1e-7;

/// Outcome of one suite run.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub name: String,
    pub seed: u64,
    pub instances: usize,
    pub points_checked: usize,
    pub failures: usize,
    /// Largest normalized residual `|lhs - rhs| / (1 + |rhs|)` of the
    /// gated comparison, when the suite gates on one.
    pub max_residual: f64,
    pub tolerance: f64,
    /// Residual of the expansion exactly as printed against the
    /// independent reference (reported, never gated).
    pub printed_max_residual: Option<f64>,
    /// Residual of the amended reading against the reference.
    pub corrected_max_residual: Option<f64>,
    pub notes: Vec<String>,
    pub first_failure: Option<String>,
}

impl SuiteSummary {
    fn new(name: &str, seed: u64, tolerance: f64) -> SuiteSummary {
        SuiteSummary {
            name: name.to_string(),
            seed,
            instances: 0,
            points_checked: 0,
            failures: 0,
            max_residual: 0.0,
            tolerance,
            printed_max_residual: None,
            corrected_max_residual: None,
            notes: Vec::new(),
            first_failure: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn fail(&mut self, pair: &FunctionPair, detail: String) {
        self.failures += 1;
        if self.first_failure.is_none() {
            let spec = InstanceSpec::of(pair);
            let inst = serde_json::to_string(&spec).unwrap_or_default();
            self.first_failure = Some(format!("{detail}; instance: {inst}"));
        }
    }

    pub fn one_line(&self) -> String {
        format!(
            "{}: {} over {} instances, {} points, max residual {:.3e} (tol {:.1e}){}",
            self.name,
            if self.passed() {
                "PASS"
            } else {
                "FAIL"
            },
            self.instances,
            self.points_checked,
            self.max_residual,
            self.tolerance,
            match self.printed_max_residual {
                Some(r) => format!(", printed-vs-reference {r:.3e}"),
                None => String::new(),
            }
        )
    }
}

fn psi_profile_cycle(i: usize) -> PsiProfile {
    match i % 3 {
        0 => PsiProfile::PositiveIncreasing,
        1 => PsiProfile::PositiveDecreasing,
        _ => PsiProfile::SignedIncreasing,
    }
}

fn ratio_profile_cycle(i: usize) -> RatioProfile {
    match (i / 3) % 3 {
        0 => RatioProfile::Increasing,
        1 => RatioProfile::Decreasing,
        _ => RatioProfile::Constant,
    }
}

/// Random pair with nonvanishing monotone psi and a known ratio shape;
/// the workhorse of the identity suites.
fn identity_instance(rng: &mut SplitMix64, i: usize, min_points: usize) -> FunctionPair {
    loop {
        let ts = gen_finite_scale_with(rng, (min_points, 50), (0.0, 10.0));
        let psi = make_psi(rng, psi_profile_cycle(i), ts.min(), ts.max());
        let ratio = make_ratio(rng, ratio_profile_cycle(i), &ts);
        let phi0 = rng.uniform(-5.0, 5.0);
        match gen_pair_with_ratio(&ts, &ratio, &psi, phi0) {
            Ok(pair) => return pair,
            Err(_) => continue, // psi step collapsed; redraw
        }
    }
}

fn residual(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / (1.0 + rhs.abs())
}

/// Nabla Y-derivative identity: formula vs direct nabla of the
/// tabulated Y-function, at every valid point.
pub fn suite_eq23(seed: u64, instances: usize) -> SuiteSummary {
    let mut s = SuiteSummary::new("Eq2.3", seed, IDENTITY_TOL);
    let mut rng = SplitMix64::new(seed);
    for i in 0..instances {
        let pair = identity_instance(&mut rng, i, 5);
        s.instances += 1;
        let ts = &pair.scale;
        let (sub, y_table) = match pair.tabulate_y(DerivKind::Nabla) {
            Ok(v) => v,
            Err(e) => {
                s.fail(&pair, format!("tabulation failed: {e}"));
                continue;
            }
        };
        let refs = ts.discrete_refs().unwrap();
        for &p in &refs[2..] {
            let formula = match pair.y_nabla_deriv_formula(p) {
                Ok(v) => v,
                Err(CalcError::ZeroDenominator { .. }) => continue,
                Err(e) => {
                    s.fail(&pair, format!("formula failed at t={}: {e}", ts.coord(p)));
                    continue;
                }
            };
            let p_sub = sub.locate(ts.coord(p)).unwrap();
            let direct = deriv(&y_table, &sub, p_sub, DerivKind::Nabla).unwrap();
            let r = residual(formula, direct);
            s.max_residual = s.max_residual.max(r);
            s.points_checked += 1;
            if r > IDENTITY_TOL {
                s.fail(
                    &pair,
                    format!(
                        "identity violated at t={}: formula {formula} vs direct {direct}",
                        ts.coord(p)
                    ),
                );
            }
        }
    }
    s
}

/// Nabla quotient identity: `(psi^nabla / (psi psi^rho)) Y` vs the
/// direct nabla quotient rule.
pub fn suite_eq24(seed: u64, instances: usize) -> SuiteSummary {
    let mut s = SuiteSummary::new("Eq2.4", seed, IDENTITY_TOL);
    let mut rng = SplitMix64::new(seed);
    for i in 0..instances {
        let pair = identity_instance(&mut rng, i, 5);
        s.instances += 1;
        let ts = &pair.scale;
        let refs = ts.discrete_refs().unwrap();
        for &p in &refs[1..] {
            let formula = match pair.quotient_nabla_via_y(p) {
                Ok(v) => v,
                Err(CalcError::ZeroDenominator { .. }) => continue,
                Err(e) => {
                    s.fail(&pair, format!("formula failed at t={}: {e}", ts.coord(p)));
                    continue;
                }
            };
            let direct = match pair.nabla_quotient_rule(p) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let r = residual(formula, direct);
            s.max_residual = s.max_residual.max(r);
            s.points_checked += 1;
            if r > IDENTITY_TOL {
                s.fail(
                    &pair,
                    format!(
                        "identity violated at t={}: formula {formula} vs direct {direct}",
                        ts.coord(p)
                    ),
                );
            }
        }
    }
    s
}

/// Diamond quotient identity: the printed quotient-rule expansion vs
/// the direct convex combination of difference quotients of `phi/psi`.
pub fn suite_prop31iii(seed: u64, instances: usize) -> SuiteSummary {
    let mut s = SuiteSummary::new("Prop3.1(iii)", seed, IDENTITY_TOL);
    let mut rng = SplitMix64::new(seed);
    for i in 0..instances {
        let pair = identity_instance(&mut rng, i, 5);
        let alpha = ALPHAS[i % ALPHAS.len()];
        s.instances += 1;
        let ts = &pair.scale;
        let refs = ts.discrete_refs().unwrap();
        for &p in &refs[1..refs.len() - 1] {
            let formula = match pair.diamond_quotient_formula(alpha, p) {
                Ok(v) => v,
                Err(CalcError::ZeroDenominator { .. }) => continue,
                Err(e) => {
                    s.fail(&pair, format!("formula failed at t={}: {e}", ts.coord(p)));
                    continue;
                }
            };
            let direct = match pair.quotient_deriv_direct(DerivKind::Diamond(alpha), p) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let r = residual(formula, direct);
            s.max_residual = s.max_residual.max(r);
            s.points_checked += 1;
            if r > IDENTITY_TOL {
                s.fail(
                    &pair,
                    format!(
                        "identity violated at t={} alpha={alpha}: formula {formula} vs direct {direct}",
                        ts.coord(p)
                    ),
                );
            }
        }
    }
    s
}

/// Diamond Y-derivative expansion: residuals of the verbatim printed
/// text and of the amended reading against the independent reference.
/// Gates only on the amended reading (machinery consistency); the
/// printed residual is reported for the record.
pub fn suite_prop31ii(seed: u64, instances: usize) -> SuiteSummary {
    let mut s = SuiteSummary::new("Prop3.1(ii)", seed, SECOND_ORDER_TOL);
    let mut rng = SplitMix64::new(seed);
    let mut printed_max: f64 = 0.0;
    let mut corrected_max: f64 = 0.0;
    let mut printed_sign_flips = 0usize;
    for i in 0..instances {
        let pair = identity_instance(&mut rng, i, 6);
        let alpha = ALPHAS[i % ALPHAS.len()];
        s.instances += 1;
        let ts = &pair.scale;
        let (sub, y_table) = match pair.tabulate_y(DerivKind::Diamond(alpha)) {
            Ok(v) => v,
            Err(e) => {
                s.fail(&pair, format!("tabulation failed: {e}"));
                continue;
            }
        };
        let refs = ts.discrete_refs().unwrap();
        for &p in &refs[2..refs.len() - 2] {
            let (printed, corrected) = match pair.y_diamond_deriv_formulas(alpha, p) {
                Ok(v) => v,
                Err(CalcError::ZeroDenominator { .. }) => continue,
                Err(e) => {
                    s.fail(&pair, format!("formulas failed at t={}: {e}", ts.coord(p)));
                    continue;
                }
            };
            let p_sub = sub.locate(ts.coord(p)).unwrap();
            let reference = deriv(&y_table, &sub, p_sub, DerivKind::Diamond(alpha)).unwrap();
            let rp = residual(printed, reference);
            let rc = residual(corrected, reference);
            printed_max = printed_max.max(rp);
            corrected_max = corrected_max.max(rc);
            if printed.signum() != reference.signum() && rp > IDENTITY_TOL {
                printed_sign_flips += 1;
            }
            s.max_residual = s.max_residual.max(rc);
            s.points_checked += 1;
            if rc > SECOND_ORDER_TOL {
                s.fail(
                    &pair,
                    format!(
                        "amended reading off reference at t={} alpha={alpha}: {corrected} vs {reference}",
                        ts.coord(p)
                    ),
                );
            }
        }
    }
    s.printed_max_residual = Some(printed_max);
    s.corrected_max_residual = Some(corrected_max);
    s.notes.push(format!(
        "printed expansion: max normalized residual {printed_max:.3e}, sign disagreements at {printed_sign_flips} points; \
         amended reading (phi-diamond times psi-nabla in the second block): max residual {corrected_max:.3e}"
    ));
    s
}

/// Sign-symmetry relations of the Y-function, exact (bit-level negation
/// symmetry). Also tallies the printed middle equality, which the
/// derivable relations contradict except at zeros of Y.
pub fn suite_symmetry(seed: u64, instances: usize) -> SuiteSummary {
    let mut s = SuiteSummary::new("Prop2.1(1)/3.1(i)", seed, 0.0);
    let mut rng = SplitMix64::new(seed);
    let mut printed_middle_holds = 0usize;
    let mut y_zero_points = 0usize;
    for i in 0..instances {
        let pair = identity_instance(&mut rng, i, 5);
        s.instances += 1;
        let ts = &pair.scale;
        let refs = ts.discrete_refs().unwrap();
        let kinds = [DerivKind::Nabla, DerivKind::Diamond(0.5)];
        for (ki, &k) in kinds.iter().enumerate() {
            let window = match k {
                DerivKind::Nabla => &refs[1..],
                _ => &refs[1..refs.len() - 1],
            };
            for &p in window {
                let quad = match pair.y_symmetry(k, p) {
                    Ok(q) => q,
                    Err(CalcError::ZeroDenominator { .. }) => continue,
                    Err(e) => {
                        s.fail(&pair, format!("symmetry eval failed: {e}"));
                        continue;
                    }
                };
                s.points_checked += 1;
                if !quad.derivable_hold_exactly() {
                    s.fail(
                        &pair,
                        format!(
                            "derivable symmetry broken at t={} (kind {ki}): {quad:?}",
                            ts.coord(p)
                        ),
                    );
                }
                if quad.printed_middle_holds() {
                    printed_middle_holds += 1;
                }
                if quad.base == 0.0 {
                    y_zero_points += 1;
                }
            }
        }
    }
    s.notes.push(format!(
        "printed middle equality Y[phi,psi] = Y[-phi,psi] held at {printed_middle_holds} of {} points \
         (exactly the {y_zero_points} zeros of Y); the derivable relation carries a minus sign",
        s.points_checked
    ));
    s
}

/// First nabla rule: anchored quotients follow the ratio direction, for
/// both anchors, over increasing and decreasing ratio profiles.
pub fn suite_mr21(seed: u64, instances: usize) -> SuiteSummary {
    let mut s = SuiteSummary::new("MR2.1", seed, 0.0);
    let mut rng = SplitMix64::new(seed);
    let ctx = CheckCtx::default();
    let mut beta_anomalies = 0usize;
    for i in 0..instances {
        let ts = gen_finite_scale_with(&mut rng, (5, 50), (0.0, 10.0));
        let psi = make_psi(
            &mut rng,
            if i % 2 == 0 {
                PsiProfile::PositiveIncreasing
            } else {
                PsiProfile::PositiveDecreasing
            },
            ts.min(),
            ts.max(),
        );
        let profile = if (i / 2) % 2 == 0 {
            RatioProfile::Increasing
        } else {
            RatioProfile::Decreasing
        };
        let ratio = make_ratio(&mut rng, profile, &ts);
        let pair = match gen_pair_with_ratio(&ts, &ratio, &psi, rng.uniform(-5.0, 5.0)) {
            Ok(p) => p,
            Err(e) => {
                s.instances += 1;
                s.notes.push(format!("instance {i} skipped: {e}"));
                continue;
            }
        };
        s.instances += 1;
        for anchor in [Anchor::Alpha, Anchor::Beta] {
            let report = match check_mr21(&pair, ts.min_ref(), ts.max_ref(), anchor, &ctx) {
                Ok(r) => r,
                Err(e) => {
                    s.fail(&pair, format!("check errored: {e}"));
                    continue;
                }
            };
            s.points_checked += 1;
            if report.outcome() != RuleOutcome::Verified {
                if anchor == Anchor::Beta && report.outcome() == RuleOutcome::ConclusionFailed {
                    beta_anomalies += 1;
                }
                s.fail(
                    &pair,
                    format!(
                        "MR2.1 {:?} anchor not verified: {}",
                        anchor,
                        serde_json::to_string(&report).unwrap_or_default()
                    ),
                );
            }
        }
    }
    s.notes.push(format!(
        "beta-anchor direction anomalies: {beta_anomalies} (claim follows the ratio direction for both anchors)"
    ));
    s
}

/// Y-function monotonicity from the ratio direction and the sign of
/// `psi at rho`, including negated-psi variants.
pub fn suite_prop22(seed: u64, instances: usize) -> SuiteSummary {
    let mut s = SuiteSummary::new("Prop2.2", seed, 0.0);
    let mut rng = SplitMix64::new(seed);
    let ctx = CheckCtx::default();
    for i in 0..instances {
        let ts = gen_finite_scale_with(&mut rng, (5, 50), (0.0, 10.0));
        let psi = make_psi(
            &mut rng,
            if i % 2 == 0 {
                PsiProfile::PositiveIncreasing
            } else {
                PsiProfile::PositiveDecreasing
            },
            ts.min(),
            ts.max(),
        );
        let ratio = make_ratio(&mut rng, ratio_profile_cycle(i), &ts);
        let base = match gen_pair_with_ratio(&ts, &ratio, &psi, rng.uniform(-5.0, 5.0)) {
            Ok(p) => p,
            Err(e) => {
                s.instances += 1;
                s.notes.push(format!("instance {i} skipped: {e}"));
                continue;
            }
        };
        let pair = if i % 3 == 2 { base.with_negated_psi() } else { base };
        s.instances += 1;
        let report = match check_prop22(&pair, ts.min_ref(), ts.max_ref(), &ctx) {
            Ok(r) => r,
            Err(e) => {
                s.fail(&pair, format!("check errored: {e}"));
                continue;
            }
        };
        s.points_checked += 1;
        if report.outcome() != RuleOutcome::Verified {
            s.fail(
                &pair,
                format!(
                    "Prop2.2 not verified: {}",
                    serde_json::to_string(&report).unwrap_or_default()
                ),
            );
        }
    }
    s
}

/// Second nabla rule, one case: endpoint conditions enforced by
/// shifting phi, both signs of `psi^nabla`.
pub fn suite_mr22(seed: u64, instances: usize, case: Mr22Case) -> SuiteSummary {
    let mut s = SuiteSummary::new(&format!("MR2.2({})", case.index()), seed, 0.0);
    let mut rng = SplitMix64::new(seed);
    let ctx = CheckCtx::default();
    for i in 0..instances {
        let ts = gen_finite_scale_with(&mut rng, (5, 50), (0.0, 10.0));
        let s_positive = i % 2 == 0;
        let psi = make_psi(
            &mut rng,
            if s_positive {
                PsiProfile::PositiveIncreasing
            } else {
                PsiProfile::PositiveDecreasing
            },
            ts.min(),
            ts.max(),
        );
        let profile = match case {
            Mr22Case::Three => RatioProfile::Increasing,
            Mr22Case::Four => RatioProfile::Decreasing,
            _ => {
                if s_positive {
                    RatioProfile::Increasing
                } else {
                    RatioProfile::Decreasing
                }
            }
        };
        let ratio = make_ratio(&mut rng, profile, &ts);
        let base = match gen_pair_with_ratio(&ts, &ratio, &psi, 0.0) {
            Ok(p) => p,
            Err(e) => {
                s.instances += 1;
                s.notes.push(format!("instance {i} skipped: {e}"));
                continue;
            }
        };
        // endpoint conditions via a constant shift of phi:
        // phi -> phi + c shifts Y by -c
        let refs = ts.discrete_refs().unwrap();
        let y_first = base.y_nabla(refs[1]).unwrap();
        let y_last = base.y_nabla(*refs.last().unwrap()).unwrap();
        let margin = rng.uniform(0.0, 3.0);
        let ratio_decreasing = profile == RatioProfile::Decreasing;
        let shift = match case {
            Mr22Case::One => {
                let e = if ratio_decreasing { y_last } else { y_first };
                e - margin
            }
            Mr22Case::Two => {
                let e = if ratio_decreasing { y_first } else { y_last };
                e + margin
            }
            Mr22Case::Three => {
                let u = rng.next_f64();
                y_first + u * (y_last - y_first)
            }
            Mr22Case::Four => {
                let u = rng.next_f64();
                y_last + u * (y_first - y_last)
            }
        };
        let pair = FunctionPair::new(base.phi.plus_const(shift), base.psi, base.scale);
        s.instances += 1;
        let report = match check_mr22(&pair, ts.min_ref(), ts.max_ref(), case, &ctx) {
            Ok(r) => r,
            Err(e) => {
                s.fail(&pair, format!("check errored: {e}"));
                continue;
            }
        };
        s.points_checked += 1;
        if report.outcome() != RuleOutcome::Verified {
            s.fail(
                &pair,
                format!(
                    "MR2.2({}) not verified: {}",
                    case.index(),
                    serde_json::to_string(&report).unwrap_or_default()
                ),
            );
        }
    }
    s
}

/// Third nabla rule: unimodal ratio pairs with zero boundary values;
/// negated variants exercise the mirrored statements.
pub fn suite_mr23(seed: u64, instances: usize) -> SuiteSummary {
    let mut s = SuiteSummary::new("MR2.3", seed, 0.0);
    let mut rng = SplitMix64::new(seed);
    let ctx = CheckCtx::default();
    let mut statements = [0usize; 4];
    for i in 0..instances {
        let ts = gen_finite_scale_with(&mut rng, (6, 50), (0.0, 10.0));
        let refs = ts.discrete_refs().unwrap();
        let peak_idx = rng.usize_in(1, refs.len() - 2);
        let (base, _r) = match gen_unimodal_ratio_pair(&ts, refs[peak_idx], &mut rng) {
            Ok(v) => v,
            Err(e) => {
                s.instances += 1;
                s.notes.push(format!("instance {i} skipped: {e}"));
                continue;
            }
        };
        let pair = if i % 2 == 1 { base.with_negated_phi() } else { base };
        s.instances += 1;
        let report = match check_mr23(&pair, ts.min_ref(), ts.max_ref(), refs[peak_idx], &ctx) {
            Ok(r) => r,
            Err(e) => {
                s.fail(&pair, format!("check errored: {e}"));
                continue;
            }
        };
        s.points_checked += 1;
        if let Some(d) = report.diagnostics.iter().find(|d| d.name == "statement") {
            for (j, tag) in ["(i)", "(ii)", "(iii)", "(iv)"].iter().enumerate() {
                if d.detail.contains(tag) {
                    statements[j] += 1;
                }
            }
        }
        if report.outcome() != RuleOutcome::Verified {
            s.fail(
                &pair,
                format!(
                    "MR2.3 not verified: {}",
                    serde_json::to_string(&report).unwrap_or_default()
                ),
            );
        }
    }
    s.notes.push(format!(
        "statement coverage (i)-(iv): {statements:?}; checker uses the increasing-then-decreasing reading"
    ));
    s
}

/// Diamond quotient direction rule: quotient built monotone by
/// construction (`phi = q * psi` with a monotone table `q`).
pub fn suite_prop32(seed: u64, instances: usize) -> SuiteSummary {
    let mut s = SuiteSummary::new("Prop3.2", seed, 0.0);
    let mut rng = SplitMix64::new(seed);
    let ctx = CheckCtx::default();
    for i in 0..instances {
        let ts = gen_finite_scale_with(&mut rng, (5, 50), (0.0, 10.0));
        let coords = ts.discrete_coords().unwrap();
        let psi = make_psi(
            &mut rng,
            if i % 2 == 0 {
                PsiProfile::PositiveIncreasing
            } else {
                PsiProfile::PositiveDecreasing
            },
            ts.min(),
            ts.max(),
        );
        let up = (i / 2) % 2 == 0;
        let mut q = rng.uniform(-3.0, 3.0);
        let mut phi_entries = Vec::with_capacity(coords.len());
        for (j, &t) in coords.iter().enumerate() {
            if j > 0 {
                let step = if rng.chance(0.2) {
                    0.0
                } else {
                    rng.uniform(0.1, 1.0)
                };
                q += if up { step } else { -step };
            }
            let psi_v = psi.eval_coord(t).unwrap();
            phi_entries.push((t, q * psi_v));
        }
        let phi = crate::function::ScaleFunction::table(ts.clone(), phi_entries).unwrap();
        let base = FunctionPair::new(phi, psi, ts.clone());
        let pair = if i % 4 == 3 { base.with_negated_psi() } else { base };
        let alpha = ALPHAS[i % ALPHAS.len()];
        s.instances += 1;
        let report = match check_prop32(&pair, alpha, ts.min_ref(), ts.max_ref(), &ctx) {
            Ok(r) => r,
            Err(e) => {
                s.fail(&pair, format!("check errored: {e}"));
                continue;
            }
        };
        s.points_checked += 1;
        if report.outcome() != RuleOutcome::Verified {
            s.fail(
                &pair,
                format!(
                    "Prop3.2 not verified: {}",
                    serde_json::to_string(&report).unwrap_or_default()
                ),
            );
        }
    }
    s
}

/// Diamond ratio rule: affine psi keeps the diamond-derivative ratio
/// monotone for every alpha; a quadratic-psi batch (alpha in {0, 1})
/// quantifies the printed-formula residual.
pub fn suite_mr31(seed: u64, instances: usize) -> SuiteSummary {
    let mut s = SuiteSummary::new("MR3.1", seed, 0.0);
    let mut rng = SplitMix64::new(seed);
    let ctx = CheckCtx::default();
    let mut printed_max: f64 = 0.0;
    for i in 0..instances {
        let ts = gen_finite_scale_with(&mut rng, (6, 50), (0.0, 10.0));
        let quadratic_batch = i % 3 == 2;
        let (psi, alpha) = if quadratic_batch {
            // psi = 0.25 (x - lo)^2 + b: positive, increasing, curved
            let b = rng.uniform(0.5, 2.0);
            let lo = ts.min();
            let e = crate::expr::Expr::parse(&format!("0.25*(x-{lo})^2+{b}"))
                .expect("generated expression parses");
            (
                crate::function::ScaleFunction::Expr(e),
                if i % 2 == 0 { 0.0 } else { 1.0 },
            )
        } else {
            (
                make_psi(
                    &mut rng,
                    if i % 2 == 0 {
                        PsiProfile::PositiveIncreasing
                    } else {
                        PsiProfile::PositiveDecreasing
                    },
                    ts.min(),
                    ts.max(),
                ),
                ALPHAS[i % ALPHAS.len()],
            )
        };
        let profile = if (i / 2) % 2 == 0 {
            RatioProfile::Increasing
        } else {
            RatioProfile::Decreasing
        };
        let ratio = make_ratio(&mut rng, profile, &ts);
        let pair = match gen_pair_with_ratio(&ts, &ratio, &psi, rng.uniform(-5.0, 5.0)) {
            Ok(p) => p,
            Err(e) => {
                s.instances += 1;
                s.notes.push(format!("instance {i} skipped: {e}"));
                continue;
            }
        };
        s.instances += 1;
        let report = match check_mr31(&pair, alpha, ts.min_ref(), ts.max_ref(), &ctx) {
            Ok(r) => r,
            Err(e) => {
                s.fail(&pair, format!("check errored: {e}"));
                continue;
            }
        };
        s.points_checked += 1;
        if let Some(d) = report
            .diagnostics
            .iter()
            .find(|d| d.name == "printed_formula_max_residual")
        {
            if let Some(v) = d.value {
                printed_max = printed_max.max(v);
            }
        }
        if report.outcome() != RuleOutcome::Verified {
            s.fail(
                &pair,
                format!(
                    "MR3.1 not verified: {}",
                    serde_json::to_string(&report).unwrap_or_default()
                ),
            );
        }
    }
    s.printed_max_residual = Some(printed_max);
    s.notes.push(format!(
        "printed expansion max residual {printed_max:.3e} (nonzero on curved psi: the nabla-side \
         factor lacks an alpha on the delta-nabla term); conclusions key on the reference derivative"
    ));
    s
}
