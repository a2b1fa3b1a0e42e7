//! Seeded construction of random discrete scales and function pairs
//! with exactly known derivative-ratio structure. These are the oracles
//! of the property suites: the pair is built so that
//! `phi^nabla / psi^nabla` reproduces a requested ratio function.
//!
//! Instances are reproducible across platforms: the generator is a
//! fixed 64-bit splitmix written out below, not a library RNG.

use crate::expr::Expr;
use crate::function::{CalcError, ScaleFunction};
use crate::scale::{PointRef, TimeScale};
use crate::yfun::FunctionPair;

/// SplitMix64. The state transition and output mix are pinned so
/// instances are portable across implementations:
///
/// ```text
/// state += 0x9E3779B97F4A7C15                 (wrapping)
/// z = state
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9    (wrapping)
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB    (wrapping)
/// output = z ^ (z >> 31)
/// ```
///
/// `next_f64` uses the top 53 bits: `(output >> 11) * 2^-53`.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random mantissa bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn usize_in(&mut self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi);
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}

/// Requested shape of the derivative ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioProfile {
    Increasing,
    Decreasing,
    Constant,
    UnimodalUp,
    UnimodalDown,
}

/// Requested shape of psi. Affine closed forms keep the sign of
/// `psi^nabla` certifiable rather than sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiProfile {
    PositiveIncreasing,
    PositiveDecreasing,
    SignedIncreasing,
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub seed: u64,
    /// inclusive range for the number of points, at least 3
    pub n_points: (usize, usize),
    pub coord_range: (f64, f64),
    pub ratio_profile: RatioProfile,
    pub psi_profile: PsiProfile,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            seed: 0,
            n_points: (5, 50),
            coord_range: (0.0, 10.0),
            ratio_profile: RatioProfile::Increasing,
            psi_profile: PsiProfile::PositiveIncreasing,
        }
    }
}

/// Rounds to 12 significant decimal digits.
fn round_sig12(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let d = x.abs().log10().floor();
    let scale = 10f64.powi(11 - d as i32);
    (x * scale).round() / scale
}

/// Draws a purely discrete scale: `n` coordinates uniform in the range,
/// rounded to 12 significant digits. Coordinates closer than
/// `width / 4096` to an existing one count as collisions and are
/// redrawn, keeping difference quotients well conditioned.
pub fn gen_finite_scale(cfg: &GenConfig) -> TimeScale {
    let mut rng = SplitMix64::new(cfg.seed);
    gen_finite_scale_with(&mut rng, cfg.n_points, cfg.coord_range)
}

pub fn gen_finite_scale_with(
    rng: &mut SplitMix64,
    n_points: (usize, usize),
    coord_range: (f64, f64),
) -> TimeScale {
    assert!(n_points.0 >= 3 && n_points.0 <= n_points.1);
    let (lo, hi) = coord_range;
    assert!(lo < hi && lo.is_finite() && hi.is_finite());
    let n = rng.usize_in(n_points.0, n_points.1);
    let min_sep = (hi - lo) / 4096.0;
    let mut coords: Vec<f64> = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while coords.len() < n {
        attempts += 1;
        assert!(attempts < 1_000_000, "coordinate drawing did not terminate");
        let c = round_sig12(rng.uniform(lo, hi));
        if coords.iter().all(|&x| (x - c).abs() >= min_sep) {
            coords.push(c);
        }
    }
    TimeScale::from_points(coords).expect("nonempty distinct coordinates")
}

/// Closed-form psi for a profile over `[lo, hi]`.
pub fn make_psi(rng: &mut SplitMix64, profile: PsiProfile, lo: f64, hi: f64) -> ScaleFunction {
    let c = rng.uniform(0.5, 2.0);
    let b = rng.uniform(0.5, 2.0);
    let expr = match profile {
        // c (x - lo) + b
        PsiProfile::PositiveIncreasing => Expr::Add(
            Box::new(Expr::Mul(
                Box::new(Expr::Const(c)),
                Box::new(Expr::Sub(Box::new(Expr::Var), Box::new(Expr::Const(lo)))),
            )),
            Box::new(Expr::Const(b)),
        ),
        // c (hi - x) + b
        PsiProfile::PositiveDecreasing => Expr::Add(
            Box::new(Expr::Mul(
                Box::new(Expr::Const(c)),
                Box::new(Expr::Sub(Box::new(Expr::Const(hi)), Box::new(Expr::Var))),
            )),
            Box::new(Expr::Const(b)),
        ),
        // c (x - mid): crosses zero inside the range
        PsiProfile::SignedIncreasing => {
            let w = hi - lo;
            let mid = rng.uniform(lo + 0.25 * w, hi - 0.25 * w);
            Expr::Mul(
                Box::new(Expr::Const(c)),
                Box::new(Expr::Sub(Box::new(Expr::Var), Box::new(Expr::Const(mid)))),
            )
        }
    };
    ScaleFunction::Expr(expr)
}

/// Affine or constant ratio for the monotone profiles; tent-shaped
/// tables for the unimodal ones (the peak is drawn among interior
/// points).
pub fn make_ratio(rng: &mut SplitMix64, profile: RatioProfile, ts: &TimeScale) -> ScaleFunction {
    let lo = ts.min();
    match profile {
        RatioProfile::Increasing | RatioProfile::Decreasing => {
            let s = rng.uniform(0.5, 2.0);
            let a = rng.uniform(-3.0, 3.0);
            let slope = if profile == RatioProfile::Increasing {
                s
            } else {
                -s
            };
            ScaleFunction::Expr(Expr::Add(
                Box::new(Expr::Mul(
                    Box::new(Expr::Const(slope)),
                    Box::new(Expr::Sub(Box::new(Expr::Var), Box::new(Expr::Const(lo)))),
                )),
                Box::new(Expr::Const(a)),
            ))
        }
        RatioProfile::Constant => ScaleFunction::Expr(Expr::Const(rng.uniform(-3.0, 3.0))),
        RatioProfile::UnimodalUp | RatioProfile::UnimodalDown => {
            let coords = ts.discrete_coords().expect("discrete scale");
            let peak_idx = rng.usize_in(1, coords.len() - 2);
            let h = rng.uniform(1.0, 4.0);
            let s = rng.uniform(0.5, 2.0);
            let sign = if profile == RatioProfile::UnimodalUp {
                1.0
            } else {
                -1.0
            };
            let entries = coords
                .iter()
                .map(|&t| (t, sign * (h - s * (t - coords[peak_idx]).abs())))
                .collect();
            ScaleFunction::table(ts.clone(), entries).expect("table over own scale")
        }
    }
}

/// Builds `phi` as the cumulative sum `phi(t_i) = phi(t_{i-1}) +
/// r(t_i) * (psi(t_i) - psi(t_{i-1}))`, so the nabla-derivative ratio
/// of the pair reproduces `r` at every interior point (the same
/// multiply-accumulate path both when generating and when checking).
pub fn gen_pair_with_ratio(
    ts: &TimeScale,
    r: &ScaleFunction,
    psi: &ScaleFunction,
    phi_at_min: f64,
) -> Result<FunctionPair, CalcError> {
    let refs = ts
        .discrete_refs()
        .ok_or(CalcError::RequiresDiscreteScale {
            op: "gen_pair_with_ratio",
        })?;
    let coords = ts.discrete_coords().unwrap();
    let mut psi_vals = Vec::with_capacity(refs.len());
    for &p in &refs {
        psi_vals.push(psi.eval_at(ts, p)?);
    }
    let mut entries = Vec::with_capacity(refs.len());
    entries.push((coords[0], phi_at_min));
    let mut acc = phi_at_min;
    for i in 1..refs.len() {
        let dpsi = psi_vals[i] - psi_vals[i - 1];
        if dpsi == 0.0 {
            return Err(CalcError::ZeroDenominator {
                t: coords[i],
                what: "psi nabla",
            });
        }
        acc += r.eval_at(ts, refs[i])? * dpsi;
        entries.push((coords[i], acc));
    }
    Ok(FunctionPair::new(
        ScaleFunction::table(ts.clone(), entries)?,
        psi.clone(),
        ts.clone(),
    ))
}

/// Tent-shaped ratio with explicit parameters: `r(t) = h - s |t - peak|`.
pub fn tent_ratio(ts: &TimeScale, peak: PointRef, h: f64, s: f64) -> ScaleFunction {
    let coords = ts.discrete_coords().expect("discrete scale");
    let tp = ts.coord(peak);
    let entries = coords.iter().map(|&t| (t, h - s * (t - tp).abs())).collect();
    ScaleFunction::table(ts.clone(), entries).expect("table over own scale")
}

/// Pair for the unimodal-ratio rule: `phi(min) = psi(min) = 0`,
/// `psi^nabla > 0`, ratio strictly increasing before the peak and
/// strictly decreasing after it.
pub fn gen_unimodal_ratio_pair(
    ts: &TimeScale,
    peak: PointRef,
    rng: &mut SplitMix64,
) -> Result<(FunctionPair, ScaleFunction), CalcError> {
    let lo = ts.min();
    let c = rng.uniform(0.5, 2.0);
    let psi = ScaleFunction::Expr(Expr::Mul(
        Box::new(Expr::Const(c)),
        Box::new(Expr::Sub(Box::new(Expr::Var), Box::new(Expr::Const(lo)))),
    ));
    let h = rng.uniform(1.0, 4.0);
    let s = rng.uniform(0.5, 2.0);
    let r = tent_ratio(ts, peak, h, s);
    let pair = gen_pair_with_ratio(ts, &r, &psi, 0.0)?;
    Ok((pair, r))
}
