//! Nabla and diamond-alpha Y-functions of a pair `(phi, psi)` and the
//! derivative / quotient identities built on them.
//!
//! Every identity is computable two independent ways: a closed formula
//! in first/second derivatives of the pair, and a direct difference
//! quotient of a tabulated quantity. The verification suites compare
//! the two.
//!
//! The second-derivative expansion of the diamond-alpha Y-function and
//! the expansion used by the diamond ratio rule are evaluated verbatim
//! as printed in their source, alongside an amended reading (one factor
//! swapped) and an independent reference; callers get all values and
//! can quantify the gap instead of trusting either transcription.

use crate::calculus::{deriv, deriv2, field_deriv, DerivKind, Field};
use crate::expr::Expr;
use crate::function::{CalcError, ScaleFunction};
use crate::scale::{PointRef, TimeScale};

/// A pair of functions on a shared scale, the subject of every
/// Y-function identity and monotonicity rule.
#[derive(Debug, Clone)]
pub struct FunctionPair {
    pub phi: ScaleFunction,
    pub psi: ScaleFunction,
    pub scale: TimeScale,
}

/// The four sign variants of a Y-function at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryQuad {
    /// Y[phi, psi]
    pub base: f64,
    /// Y[phi, -psi]
    pub neg_psi: f64,
    /// Y[-phi, psi]
    pub neg_phi: f64,
    /// Y[-phi, -psi]
    pub neg_both: f64,
}

impl SymmetryQuad {
    /// The relations forced by the definition: even in psi, odd in phi.
    pub fn derivable_hold_exactly(&self) -> bool {
        self.neg_psi == self.base && self.neg_phi == -self.base && self.neg_both == -self.base
    }

    /// The printed middle equality `Y[phi,psi] = Y[-phi,psi]`, which
    /// contradicts oddness in phi except at zeros of Y. Reported, never
    /// asserted.
    pub fn printed_middle_holds(&self) -> bool {
        self.neg_phi == self.base
    }
}

/// Verbatim-vs-amended-vs-reference values for the diamond-alpha
/// Y-function derivative expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YDiamondDeriv {
    /// The two-block expansion exactly as printed.
    pub printed: f64,
    /// The same expansion with the suspect `psi-diamond * psi-nabla`
    /// term of the second block read as `phi-diamond * psi-nabla`.
    pub corrected: f64,
    /// Diamond-alpha difference quotient of the tabulated Y-function.
    pub reference: f64,
}

/// Verbatim-vs-reference values for the printed expansion of
/// `(phi-diamond / psi-diamond)` differentiated diamond-alpha.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiamondRatioDeriv {
    pub printed: f64,
    pub reference: f64,
}

impl FunctionPair {
    pub fn new(phi: ScaleFunction, psi: ScaleFunction, scale: TimeScale) -> FunctionPair {
        FunctionPair { phi, psi, scale }
    }

    pub fn with_negated_phi(&self) -> FunctionPair {
        FunctionPair {
            phi: self.phi.negated(),
            psi: self.psi.clone(),
            scale: self.scale.clone(),
        }
    }

    pub fn with_negated_psi(&self) -> FunctionPair {
        FunctionPair {
            phi: self.phi.clone(),
            psi: self.psi.negated(),
            scale: self.scale.clone(),
        }
    }

    fn ts(&self) -> &TimeScale {
        &self.scale
    }

    pub fn phi_at(&self, p: PointRef) -> Result<f64, CalcError> {
        self.phi.eval_at(self.ts(), p)
    }

    pub fn psi_at(&self, p: PointRef) -> Result<f64, CalcError> {
        self.psi.eval_at(self.ts(), p)
    }

    pub fn phi_deriv(&self, p: PointRef, k: DerivKind) -> Result<f64, CalcError> {
        deriv(&self.phi, self.ts(), p, k)
    }

    pub fn psi_deriv(&self, p: PointRef, k: DerivKind) -> Result<f64, CalcError> {
        deriv(&self.psi, self.ts(), p, k)
    }

    /// Derivative ratio `phi^k / psi^k` at a point.
    pub fn ratio(&self, p: PointRef, k: DerivKind) -> Result<f64, CalcError> {
        let dpsi = self.psi_deriv(p, k)?;
        if dpsi == 0.0 {
            return Err(CalcError::ZeroDenominator {
                t: self.ts().coord(p),
                what: "psi derivative",
            });
        }
        Ok(self.phi_deriv(p, k)? / dpsi)
    }

    /// The Y-function for derivative kind `k`:
    /// `(phi^k / psi^k) * psi - phi`.
    pub fn y_value(&self, k: DerivKind, p: PointRef) -> Result<f64, CalcError> {
        let r = self.ratio(p, k)?;
        Ok(r * self.psi_at(p)? - self.phi_at(p)?)
    }

    pub fn y_nabla(&self, p: PointRef) -> Result<f64, CalcError> {
        self.y_value(DerivKind::Nabla, p)
    }

    pub fn y_delta(&self, p: PointRef) -> Result<f64, CalcError> {
        self.y_value(DerivKind::Delta, p)
    }

    pub fn y_diamond(&self, alpha: f64, p: PointRef) -> Result<f64, CalcError> {
        self.y_value(DerivKind::Diamond(alpha), p)
    }

    /// All four sign variants of the Y-function at `p`.
    pub fn y_symmetry(&self, k: DerivKind, p: PointRef) -> Result<SymmetryQuad, CalcError> {
        let neg_phi_pair = self.with_negated_phi();
        let neg_psi_pair = self.with_negated_psi();
        let neg_both_pair = neg_phi_pair.with_negated_psi();
        Ok(SymmetryQuad {
            base: self.y_value(k, p)?,
            neg_psi: neg_psi_pair.y_value(k, p)?,
            neg_phi: neg_phi_pair.y_value(k, p)?,
            neg_both: neg_both_pair.y_value(k, p)?,
        })
    }

    /// Right side of the nabla Y-derivative identity:
    /// `(phi^nabla / psi^nabla)^nabla * psi^rho`.
    ///
    /// Cross-checkable against the direct nabla of the tabulated
    /// Y-function.
    pub fn y_nabla_deriv_formula(&self, p: PointRef) -> Result<f64, CalcError> {
        let ts = self.ts();
        let eval = |q: PointRef| self.ratio(q, DerivKind::Nabla);
        let sym = self.ratio_sym_expr(DerivKind::Nabla).map(|e| e.diff());
        let field = Field::with_sym(&eval, sym);
        let ratio_nabla = field_deriv(ts, p, DerivKind::Nabla, &field)?;
        let psi_rho = self.psi.eval_at(ts, ts.rho(p))?;
        Ok(ratio_nabla * psi_rho)
    }

    /// Symbolic form of the derivative ratio when both functions are
    /// expression-backed; drives the classical limits on dense points.
    fn ratio_sym_expr(&self, _k: DerivKind) -> Option<Expr> {
        match (self.phi.as_expr(), self.psi.as_expr()) {
            (Some(f), Some(g)) => Some(Expr::Div(Box::new(f.diff()), Box::new(g.diff()))),
            _ => None,
        }
    }

    /// Right side of the nabla quotient identity:
    /// `(psi^nabla / (psi * psi^rho)) * Y`.
    pub fn quotient_nabla_via_y(&self, p: PointRef) -> Result<f64, CalcError> {
        let ts = self.ts();
        let t = ts.coord(p);
        let psi = self.psi_at(p)?;
        let psi_rho = self.psi.eval_at(ts, ts.rho(p))?;
        if psi == 0.0 {
            return Err(CalcError::ZeroDenominator { t, what: "psi" });
        }
        if psi_rho == 0.0 {
            return Err(CalcError::ZeroDenominator {
                t,
                what: "psi at rho",
            });
        }
        let dpsi = self.psi_deriv(p, DerivKind::Nabla)?;
        let y = self.y_nabla(p)?;
        Ok(dpsi / (psi * psi_rho) * y)
    }

    /// The nabla quotient rule evaluated directly:
    /// `(phi^nabla * psi - phi * psi^nabla) / (psi^rho * psi)`.
    pub fn nabla_quotient_rule(&self, p: PointRef) -> Result<f64, CalcError> {
        let ts = self.ts();
        let t = ts.coord(p);
        let psi = self.psi_at(p)?;
        let psi_rho = self.psi.eval_at(ts, ts.rho(p))?;
        if psi == 0.0 || psi_rho == 0.0 {
            return Err(CalcError::ZeroDenominator {
                t,
                what: "psi * psi^rho",
            });
        }
        let dphi = self.phi_deriv(p, DerivKind::Nabla)?;
        let dpsi = self.psi_deriv(p, DerivKind::Nabla)?;
        let phi = self.phi_at(p)?;
        Ok((dphi * psi - phi * dpsi) / (psi_rho * psi))
    }

    /// Direct `k`-derivative of the plain quotient `phi / psi`,
    /// computed from difference quotients (or the classical derivative
    /// on dense points) of the quotient itself.
    pub fn quotient_deriv_direct(&self, k: DerivKind, p: PointRef) -> Result<f64, CalcError> {
        let ts = self.ts();
        let eval = |q: PointRef| -> Result<f64, CalcError> {
            let d = self.psi_at(q)?;
            if d == 0.0 {
                return Err(CalcError::ZeroDenominator {
                    t: ts.coord(q),
                    what: "psi",
                });
            }
            Ok(self.phi_at(q)? / d)
        };
        let sym = match (self.phi.as_expr(), self.psi.as_expr()) {
            (Some(f), Some(g)) => Some(
                Expr::Div(Box::new(f.clone()), Box::new(g.clone())).diff(),
            ),
            _ => None,
        };
        let field = Field::with_sym(&eval, sym);
        field_deriv(ts, p, k, &field)
    }

    /// The diamond-alpha quotient rule:
    /// `(phi^dia * psi^sigma * psi^rho - alpha * phi^sigma * psi^rho * psi^delta
    ///   - (1-alpha) * phi^rho * psi^sigma * psi^nabla) / (psi * psi^sigma * psi^rho)`.
    pub fn diamond_quotient_formula(&self, alpha: f64, p: PointRef) -> Result<f64, CalcError> {
        DerivKind::Diamond(alpha).validate()?;
        let ts = self.ts();
        let t = ts.coord(p);
        let s = ts.sigma(p);
        let r = ts.rho(p);
        let psi = self.psi_at(p)?;
        let psi_s = self.psi.eval_at(ts, s)?;
        let psi_r = self.psi.eval_at(ts, r)?;
        let denom = psi * psi_s * psi_r;
        if denom == 0.0 {
            return Err(CalcError::ZeroDenominator {
                t,
                what: "psi * psi^sigma * psi^rho",
            });
        }
        let phi_dia = self.phi_deriv(p, DerivKind::Diamond(alpha))?;
        let phi_s = self.phi.eval_at(ts, s)?;
        let phi_r = self.phi.eval_at(ts, r)?;
        let psi_d = self.psi_deriv(p, DerivKind::Delta)?;
        let psi_n = self.psi_deriv(p, DerivKind::Nabla)?;
        let num = phi_dia * psi_s * psi_r
            - alpha * phi_s * psi_r * psi_d
            - (1.0 - alpha) * phi_r * psi_s * psi_n;
        Ok(num / denom)
    }

    /// Scale points where the Y-function of kind `k` is defined, on a
    /// purely discrete scale: the kappa window.
    pub fn y_window(&self, k: DerivKind) -> Result<Vec<PointRef>, CalcError> {
        let refs = self
            .ts()
            .discrete_refs()
            .ok_or(CalcError::RequiresDiscreteScale { op: "y_window" })?;
        let n = refs.len();
        Ok(match k {
            DerivKind::Nabla => refs[1..].to_vec(),
            DerivKind::Delta => refs[..n - 1].to_vec(),
            DerivKind::Diamond(_) => refs[1..n - 1].to_vec(),
        })
    }

    /// Tabulates the Y-function of kind `k` over its window of a purely
    /// discrete scale. Returns the sub-scale and the table.
    pub fn tabulate_y(&self, k: DerivKind) -> Result<(TimeScale, ScaleFunction), CalcError> {
        let window = self.y_window(k)?;
        let mut entries = Vec::with_capacity(window.len());
        for &p in &window {
            entries.push((self.ts().coord(p), self.y_value(k, p)?));
        }
        let sub = TimeScale::from_points(entries.iter().map(|e| e.0).collect())?;
        let table = ScaleFunction::table(sub.clone(), entries)?;
        Ok((sub, table))
    }

    /// Tabulates the ratio of diamond derivatives
    /// `phi^dia / psi^dia` over the interior window.
    pub fn tabulate_diamond_ratio(
        &self,
        alpha: f64,
    ) -> Result<(TimeScale, ScaleFunction), CalcError> {
        let window = self.y_window(DerivKind::Diamond(alpha))?;
        let mut entries = Vec::with_capacity(window.len());
        for &p in &window {
            entries.push((self.ts().coord(p), self.ratio(p, DerivKind::Diamond(alpha))?));
        }
        let sub = TimeScale::from_points(entries.iter().map(|e| e.0).collect())?;
        let table = ScaleFunction::table(sub.clone(), entries)?;
        Ok((sub, table))
    }

    /// The printed two-block expansion of the diamond-alpha derivative
    /// of the Y-function and its amended reading, evaluated pointwise.
    pub fn y_diamond_deriv_formulas(
        &self,
        alpha: f64,
        p: PointRef,
    ) -> Result<(f64, f64), CalcError> {
        DerivKind::Diamond(alpha).validate()?;
        let ts = self.ts();
        let t = ts.coord(p);
        let a = alpha;
        let dia = DerivKind::Diamond(alpha);
        let s = ts.sigma(p);
        let r = ts.rho(p);

        let psi_dia = self.psi_deriv(p, dia)?;
        let psi_dia_s = self.psi_deriv(s, dia)?;
        let psi_dia_r = self.psi_deriv(r, dia)?;
        for (v, what) in [
            (psi_dia, "psi^dia"),
            (psi_dia_s, "psi^dia at sigma"),
            (psi_dia_r, "psi^dia at rho"),
        ] {
            if v == 0.0 {
                return Err(CalcError::ZeroDenominator { t, what });
            }
        }

        let phi_dia = self.phi_deriv(p, dia)?;
        let phi_d = self.phi_deriv(p, DerivKind::Delta)?;
        let phi_n = self.phi_deriv(p, DerivKind::Nabla)?;
        let psi_d = self.psi_deriv(p, DerivKind::Delta)?;
        let psi_n = self.psi_deriv(p, DerivKind::Nabla)?;
        let psi = self.psi_at(p)?;
        let psi_s = self.psi.eval_at(ts, s)?;
        let psi_r = self.psi.eval_at(ts, r)?;

        let d2 = |f: &ScaleFunction, k1: DerivKind, k2: DerivKind| deriv2(f, ts, p, k1, k2);
        use DerivKind::{Delta as D, Nabla as N};
        let phi_dd = d2(&self.phi, D, D)?;
        let phi_nd = d2(&self.phi, N, D)?;
        let phi_dn = d2(&self.phi, D, N)?;
        let phi_nn = d2(&self.phi, N, N)?;
        let psi_dd = d2(&self.psi, D, D)?;
        let psi_nd = d2(&self.psi, N, D)?;
        let psi_dn = d2(&self.psi, D, N)?;
        let psi_nn = d2(&self.psi, N, N)?;

        let block1 = ((a * phi_dd + (1.0 - a) * phi_nd) * psi_s + phi_dia * psi_d) * psi_dia
            - (a * psi_dd + (1.0 - a) * psi_nd) * phi_dia * psi
            - phi_d * psi_dia * psi_dia_s;
        // second block as printed: `psi^dia * psi^nabla` inside the
        // first parenthesis
        let block2_printed = ((a * phi_dn + (1.0 - a) * phi_nn) * psi_r + psi_dia * psi_n)
            * psi_dia
            - (a * psi_dn + (1.0 - a) * psi_nn) * phi_dia * psi
            - phi_n * psi_dia * psi_dia_r;
        // amended reading: `phi^dia * psi^nabla`
        let block2_corrected = ((a * phi_dn + (1.0 - a) * phi_nn) * psi_r + phi_dia * psi_n)
            * psi_dia
            - (a * psi_dn + (1.0 - a) * psi_nn) * phi_dia * psi
            - phi_n * psi_dia * psi_dia_r;

        let term1 = a / (psi_dia * psi_dia_s) * block1;
        let printed = term1 + (1.0 - a) / (psi_dia * psi_dia_r) * block2_printed;
        let corrected = term1 + (1.0 - a) / (psi_dia * psi_dia_r) * block2_corrected;
        Ok((printed, corrected))
    }

    /// Both printed readings of the diamond-alpha Y-derivative together
    /// with the independent reference (diamond-alpha difference
    /// quotient of the tabulated Y-function). Purely discrete scales.
    pub fn y_diamond_deriv(&self, alpha: f64, p: PointRef) -> Result<YDiamondDeriv, CalcError> {
        DerivKind::Diamond(alpha).validate()?;
        let ts = self.ts();
        if !ts.is_discrete() {
            return Err(CalcError::RequiresDiscreteScale {
                op: "y_diamond_deriv",
            });
        }
        let (printed, corrected) = self.y_diamond_deriv_formulas(alpha, p)?;
        let dia = DerivKind::Diamond(alpha);
        let (sub, y_table) = self.tabulate_y(dia)?;
        let p_sub = sub.locate(ts.coord(p))?;
        let reference = deriv(&y_table, &sub, p_sub, dia)?;
        Ok(YDiamondDeriv {
            printed,
            corrected,
            reference,
        })
    }

    /// The printed expansion of `(phi^dia / psi^dia)^dia` alone.
    /// Pointwise; works wherever the shifted diamond derivatives and
    /// the mixed second derivatives exist.
    pub fn diamond_ratio_deriv_printed(&self, alpha: f64, p: PointRef) -> Result<f64, CalcError> {
        DerivKind::Diamond(alpha).validate()?;
        let ts = self.ts();
        let t = ts.coord(p);
        let a = alpha;
        let dia = DerivKind::Diamond(alpha);
        let s = ts.sigma(p);
        let r = ts.rho(p);

        let psi_dia = self.psi_deriv(p, dia)?;
        let psi_dia_s = self.psi_deriv(s, dia)?;
        let psi_dia_r = self.psi_deriv(r, dia)?;
        if psi_dia == 0.0 || psi_dia * psi_dia_s * psi_dia_r == 0.0 {
            return Err(CalcError::ZeroDenominator {
                t,
                what: "psi^dia * psi^dia(sigma) * psi^dia(rho)",
            });
        }
        let phi_dia_s = self.phi_deriv(s, dia)?;
        let phi_dia_r = self.phi_deriv(r, dia)?;
        let phi_dia_dia = deriv2(&self.phi, ts, p, dia, dia)?;
        use DerivKind::{Delta as D, Nabla as N};
        let psi_dd = deriv2(&self.psi, ts, p, D, D)?;
        let psi_nd = deriv2(&self.psi, ts, p, N, D)?;
        let psi_dn = deriv2(&self.psi, ts, p, D, N)?;
        let psi_nn = deriv2(&self.psi, ts, p, N, N)?;

        // verbatim: the nabla-side factor reads
        // `(psi^dn + (1-alpha) psi^nn)` with no alpha on psi^dn
        Ok((phi_dia_dia * psi_dia_s * psi_dia_r
            - a * phi_dia_s * psi_dia_r * (a * psi_dd + (1.0 - a) * psi_nd)
            - (1.0 - a) * phi_dia_r * psi_dia_s * (psi_dn + (1.0 - a) * psi_nn))
            / (psi_dia * psi_dia_s * psi_dia_r))
    }

    /// The printed expansion of `(phi^dia / psi^dia)^dia` and the
    /// independent reference (diamond-alpha difference quotient of the
    /// tabulated derivative ratio). Purely discrete scales.
    pub fn diamond_ratio_deriv(
        &self,
        alpha: f64,
        p: PointRef,
    ) -> Result<DiamondRatioDeriv, CalcError> {
        DerivKind::Diamond(alpha).validate()?;
        let ts = self.ts();
        if !ts.is_discrete() {
            return Err(CalcError::RequiresDiscreteScale {
                op: "diamond_ratio_deriv",
            });
        }
        let printed = self.diamond_ratio_deriv_printed(alpha, p)?;
        let (sub, ratio_table) = self.tabulate_diamond_ratio(alpha)?;
        let p_sub = sub.locate(ts.coord(p))?;
        let reference = deriv(&ratio_table, &sub, p_sub, DerivKind::Diamond(alpha))?;
        Ok(DiamondRatioDeriv { printed, reference })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice(n: usize) -> TimeScale {
        TimeScale::from_points((0..n).map(|i| i as f64).collect()).unwrap()
    }

    fn pair(ts: &TimeScale, phi: &str, psi: &str) -> FunctionPair {
        FunctionPair::new(
            ScaleFunction::parse(phi).unwrap(),
            ScaleFunction::parse(psi).unwrap(),
            ts.clone(),
        )
    }

    fn at(ts: &TimeScale, t: f64) -> PointRef {
        ts.locate(t).unwrap()
    }

    #[test]
    fn y_nabla_on_lattice() {
        // oracle: hand backward differences; Y(t) = (2t-1) t - t^2 = t^2 - t
        let ts = lattice(6);
        let pr = pair(&ts, "x^2", "x");
        assert_eq!(pr.y_nabla(at(&ts, 3.0)).unwrap(), 6.0);
    }

    #[test]
    fn y_collapses_when_phi_equals_psi() {
        let ts = lattice(6);
        let pr = pair(&ts, "x^2+1", "x^2+1");
        for t in [1.0, 2.0, 3.0, 4.0, 5.0] {
            assert_eq!(pr.y_nabla(at(&ts, t)).unwrap(), 0.0);
        }
    }

    #[test]
    fn y_nabla_reduces_to_classical_on_interval() {
        let ts = TimeScale::interval(1.0, 2.0).unwrap();
        let pr = pair(&ts, "x^2", "x");
        let got = pr.y_nabla(at(&ts, 1.5)).unwrap();
        assert!((got - 2.25).abs() <= 1e-8);
    }

    #[test]
    fn y_zero_denominator_reported() {
        let ts = lattice(6);
        let pr = pair(&ts, "x^2", "1");
        assert!(matches!(
            pr.y_nabla(at(&ts, 3.0)),
            Err(CalcError::ZeroDenominator { .. })
        ));
    }

    #[test]
    fn y_diamond_examples() {
        let ts = lattice(6);
        let pr = pair(&ts, "x^2", "x");
        // phi-dia = 6, psi-dia = 1 at t = 3 with alpha = 0.5
        assert_eq!(pr.y_diamond(0.5, at(&ts, 3.0)).unwrap(), 9.0);
        // endpoint alphas reduce bit-for-bit on the shared window
        for t in [1.0, 2.0, 3.0, 4.0] {
            let p = at(&ts, t);
            assert_eq!(
                pr.y_diamond(0.0, p).unwrap().to_bits(),
                pr.y_nabla(p).unwrap().to_bits()
            );
            assert_eq!(
                pr.y_diamond(1.0, p).unwrap().to_bits(),
                pr.y_delta(p).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn y_nabla_deriv_formula_matches_direct() {
        // ratio = 2t-1, its nabla = 2, psi^rho = 2 at t = 3 -> 4
        let ts = lattice(6);
        let pr = pair(&ts, "x^2", "x");
        let p = at(&ts, 3.0);
        let formula = pr.y_nabla_deriv_formula(p).unwrap();
        assert_eq!(formula, 4.0);
        // direct nabla of tabulated Y = t^2 - t: (6 - 2) / 1
        let (sub, y) = pr.tabulate_y(DerivKind::Nabla).unwrap();
        let direct = deriv(&y, &sub, sub.locate(3.0).unwrap(), DerivKind::Nabla).unwrap();
        assert_eq!(direct, 4.0);
    }

    #[test]
    fn y_deriv_formula_zero_for_affine_relation() {
        // phi = c psi + d has constant ratio, so the formula gives 0
        let ts = lattice(6);
        let pr = pair(&ts, "2*x+3", "x");
        for t in [2.0, 3.0, 4.0, 5.0] {
            assert_eq!(pr.y_nabla_deriv_formula(at(&ts, t)).unwrap(), 0.0);
            assert_eq!(pr.y_nabla(at(&ts, t)).unwrap(), -3.0);
        }
    }

    #[test]
    fn y_deriv_formula_classical_case() {
        // oracle: (f'/g')' g with f = x^3, g = x is 6x * x = 6x^2
        let ts = TimeScale::interval(1.0, 2.0).unwrap();
        let pr = pair(&ts, "x^3", "x");
        for t in [1.1, 1.5, 1.9] {
            let got = pr.y_nabla_deriv_formula(at(&ts, t)).unwrap();
            let want = 6.0 * t * t;
            assert!((got - want).abs() <= 1e-8 * (1.0 + want.abs()), "{got} vs {want}");
        }
    }

    #[test]
    fn quotient_identity_on_lattice() {
        // ts = {1..5}, phi = t^2, psi = t at t = 3:
        // rhs = (1/(3*2)) * 6 = 1 and (phi/psi) = t has nabla 1
        let ts = TimeScale::from_points(vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let pr = pair(&ts, "x^2", "x");
        let p = at(&ts, 3.0);
        assert_eq!(pr.quotient_nabla_via_y(p).unwrap(), 1.0);
        assert_eq!(pr.nabla_quotient_rule(p).unwrap(), 1.0);
        assert_eq!(
            pr.quotient_deriv_direct(DerivKind::Nabla, p).unwrap(),
            1.0
        );
    }

    #[test]
    fn quotient_identity_classical_case() {
        let ts = TimeScale::interval(1.0, 2.0).unwrap();
        let pr = pair(&ts, "exp(x)", "x");
        for t in [1.25, 1.75] {
            let p = at(&ts, t);
            let via_y = pr.quotient_nabla_via_y(p).unwrap();
            let classical = (t.exp() * t - t.exp()) / (t * t);
            assert!((via_y - classical).abs() <= 1e-8 * (1.0 + classical.abs()));
        }
    }

    #[test]
    fn diamond_quotient_formula_examples() {
        let ts = TimeScale::from_points(vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let pr = pair(&ts, "x^2", "x");
        let p = at(&ts, 3.0);
        // direct diamond derivative of phi/psi = t is 1
        assert_eq!(pr.diamond_quotient_formula(0.5, p).unwrap(), 1.0);
        // endpoint alphas collapse to the one-sided quotient rules
        for t in [2.0, 3.0, 4.0] {
            let q = at(&ts, t);
            let d1 = pr.diamond_quotient_formula(1.0, q).unwrap();
            let d0 = pr.diamond_quotient_formula(0.0, q).unwrap();
            let delta_direct = pr.quotient_deriv_direct(DerivKind::Delta, q).unwrap();
            let nabla_direct = pr.quotient_deriv_direct(DerivKind::Nabla, q).unwrap();
            assert!((d1 - delta_direct).abs() <= 1e-12 * (1.0 + delta_direct.abs()));
            assert!((d0 - nabla_direct).abs() <= 1e-12 * (1.0 + nabla_direct.abs()));
        }
        // constant ratio: formula yields 0
        let cr = pair(&ts, "3*x", "x");
        assert_eq!(cr.diamond_quotient_formula(0.5, p).unwrap(), 0.0);
    }

    #[test]
    fn symmetry_quad_values() {
        // oracle: direct evaluation of each definition
        let ts = lattice(6);
        let pr = pair(&ts, "x^2", "x");
        let q = pr.y_symmetry(DerivKind::Nabla, at(&ts, 3.0)).unwrap();
        assert_eq!((q.base, q.neg_psi, q.neg_phi, q.neg_both), (6.0, 6.0, -6.0, -6.0));
        assert!(q.derivable_hold_exactly());
        assert!(!q.printed_middle_holds());
    }

    #[test]
    fn symmetry_with_zero_phi() {
        let ts = lattice(6);
        let pr = pair(&ts, "0", "x");
        let q = pr.y_symmetry(DerivKind::Nabla, at(&ts, 3.0)).unwrap();
        assert_eq!((q.base, q.neg_psi, q.neg_phi, q.neg_both), (0.0, 0.0, 0.0, 0.0));
        assert!(q.printed_middle_holds());
    }

    #[test]
    fn y_diamond_deriv_alpha_zero_matches_nabla_formula() {
        let ts = lattice(7);
        let pr = pair(&ts, "x^2", "x");
        for t in [2.0, 3.0, 4.0] {
            let p = at(&ts, t);
            let v = pr.y_diamond_deriv(0.0, p).unwrap();
            let nabla_formula = pr.y_nabla_deriv_formula(p).unwrap();
            assert!(
                (v.reference - nabla_formula).abs() <= 1e-9 * (1.0 + nabla_formula.abs()),
                "reference {} vs nabla formula {}",
                v.reference,
                nabla_formula
            );
            // the amended reading reproduces the reference
            assert!((v.corrected - v.reference).abs() <= 1e-9 * (1.0 + v.reference.abs()));
        }
    }

    #[test]
    fn y_diamond_deriv_zero_when_phi_equals_psi() {
        let ts = lattice(7);
        let pr = pair(&ts, "x", "x");
        for t in [2.0, 3.0, 4.0] {
            let v = pr.y_diamond_deriv(0.5, at(&ts, t)).unwrap();
            assert_eq!(v.reference, 0.0);
        }
    }

    #[test]
    fn y_diamond_deriv_printed_vs_corrected_gap() {
        // integer lattice keeps the arithmetic exact: the amended
        // reading equals the reference, the verbatim one does not
        let ts = lattice(7);
        let pr = pair(&ts, "x^3", "x");
        let p = at(&ts, 3.0);
        let v = pr.y_diamond_deriv(0.5, p).unwrap();
        assert_eq!(v.corrected, v.reference);
        assert!(
            (v.printed - v.reference).abs() > 1e-6,
            "expected a visible transcription gap, got printed {} vs reference {}",
            v.printed,
            v.reference
        );
    }

    #[test]
    fn diamond_ratio_deriv_affine_psi_exact() {
        // with affine psi every second derivative of psi vanishes and
        // the printed expansion agrees with the reference exactly
        let ts = lattice(8);
        let pr = pair(&ts, "x^3", "2*x+1");
        for t in [2.0, 3.0, 4.0] {
            let v = pr.diamond_ratio_deriv(0.5, at(&ts, t)).unwrap();
            assert!(
                (v.printed - v.reference).abs() <= 1e-12 * (1.0 + v.reference.abs()),
                "printed {} vs reference {}",
                v.printed,
                v.reference
            );
        }
    }

    #[test]
    fn diamond_ratio_deriv_alpha_zero_on_cubic() {
        // oracle: tabulate 3t^2 - 3t + 1 (nabla of t^3 over nabla of t)
        // and scan: the nabla reference at t is the backward difference
        let ts = lattice(7);
        let pr = pair(&ts, "x^3", "x");
        let p = at(&ts, 3.0);
        let v = pr.diamond_ratio_deriv(0.0, p).unwrap();
        let ratio = |t: f64| 3.0 * t * t - 3.0 * t + 1.0;
        let want = ratio(3.0) - ratio(2.0);
        assert_eq!(v.reference, want);
    }
}
