//! Real-valued functions on a time scale: expression-backed (total
//! wherever the expression is defined) or table-backed (purely discrete
//! scales only, exact lookup, no interpolation).

use crate::expr::{Expr, EvalError};
use crate::scale::{Location, PointRef, ScaleError, TimeScale};

use thiserror::Error;

/// Errors from the calculus layer. Evaluation-domain problems carry the
/// offending coordinate so reports and CLI messages can name the point.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CalcError {
    #[error(transparent)]
    Scale(#[from] ScaleError),
    #[error(transparent)]
    Domain(#[from] EvalError),
    #[error("table has no sample at t = {t}")]
    MissingSample { t: f64 },
    #[error("table-backed function queried at dense point t = {t}")]
    TableOnDense { t: f64 },
    #[error("{kind} derivative undefined at t = {t} (outside kappa domain)")]
    OutsideKappaDomain { t: f64, kind: &'static str },
    #[error("one-sided numeric limit did not converge at t = {t}")]
    NumericLimitFailure { t: f64 },
    #[error("quadrature did not converge on [{lo}, {hi}]")]
    QuadratureFailure { lo: f64, hi: f64 },
    #[error("zero denominator: {what} vanishes at t = {t}")]
    ZeroDenominator { t: f64, what: &'static str },
    #[error("{op} requires a purely discrete scale")]
    RequiresDiscreteScale { op: &'static str },
    #[error("diamond-alpha weight {alpha} outside [0, 1]")]
    InvalidAlpha { alpha: f64 },
}

/// Table of exact samples over a purely discrete scale.
#[derive(Debug, Clone, PartialEq)]
pub struct FnTable {
    scale: TimeScale,
    entries: Vec<(f64, f64)>, // sorted by coordinate, exact keys
}

impl FnTable {
    /// Builds a table over `scale`. Rejected if the scale has interval
    /// components; entry coordinates must lie on the scale.
    pub fn new(scale: TimeScale, mut entries: Vec<(f64, f64)>) -> Result<FnTable, CalcError> {
        if !scale.is_discrete() {
            return Err(CalcError::TableOnDense { t: f64::NAN });
        }
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        entries.dedup_by(|a, b| a.0 == b.0);
        for &(t, _) in &entries {
            scale.locate(t)?;
        }
        Ok(FnTable { scale, entries })
    }

    pub fn scale(&self) -> &TimeScale {
        &self.scale
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn lookup(&self, t: f64) -> Result<f64, CalcError> {
        let t = t + 0.0;
        self.entries
            .binary_search_by(|e| e.0.total_cmp(&t))
            .map(|i| self.entries[i].1)
            .map_err(|_| CalcError::MissingSample { t })
    }
}

/// A function usable on a scale: either an expression in `x` or a table
/// of samples.
#[derive(Debug, Clone, PartialEq)]
pub enum ScaleFunction {
    Expr(Expr),
    Table(FnTable),
}

impl ScaleFunction {
    pub fn parse(src: &str) -> Result<ScaleFunction, crate::expr::ParseError> {
        Ok(ScaleFunction::Expr(Expr::parse(src)?))
    }

    pub fn from_expr(e: Expr) -> ScaleFunction {
        ScaleFunction::Expr(e)
    }

    pub fn table(scale: TimeScale, entries: Vec<(f64, f64)>) -> Result<ScaleFunction, CalcError> {
        Ok(ScaleFunction::Table(FnTable::new(scale, entries)?))
    }

    pub fn as_expr(&self) -> Option<&Expr> {
        match self {
            ScaleFunction::Expr(e) => Some(e),
            ScaleFunction::Table(_) => None,
        }
    }

    pub fn as_table(&self) -> Option<&FnTable> {
        match self {
            ScaleFunction::Table(t) => Some(t),
            ScaleFunction::Expr(_) => None,
        }
    }

    /// Value at a scale point.
    pub fn eval_at(&self, ts: &TimeScale, p: PointRef) -> Result<f64, CalcError> {
        match self {
            ScaleFunction::Expr(e) => Ok(e.eval(ts.coord(p))?),
            ScaleFunction::Table(tab) => match p.location {
                Location::Discrete(_) => tab.lookup(ts.coord(p)),
                Location::Interior(t) => Err(CalcError::TableOnDense { t }),
            },
        }
    }

    /// Value at a raw coordinate (tables: exact lookup).
    pub fn eval_coord(&self, t: f64) -> Result<f64, CalcError> {
        match self {
            ScaleFunction::Expr(e) => Ok(e.eval(t)?),
            ScaleFunction::Table(tab) => tab.lookup(t),
        }
    }

    /// Pointwise negation. Exact: every value is the IEEE negation of
    /// the original, so sign-symmetry identities hold bit-for-bit.
    pub fn negated(&self) -> ScaleFunction {
        match self {
            ScaleFunction::Expr(e) => match e {
                Expr::Const(c) => ScaleFunction::Expr(Expr::Const(-c)),
                Expr::Neg(inner) => ScaleFunction::Expr((**inner).clone()),
                other => ScaleFunction::Expr(Expr::Neg(Box::new(other.clone()))),
            },
            ScaleFunction::Table(tab) => ScaleFunction::Table(FnTable {
                scale: tab.scale.clone(),
                entries: tab.entries.iter().map(|&(t, v)| (t, -v)).collect(),
            }),
        }
    }

    /// Pointwise shift by a constant.
    pub fn plus_const(&self, c: f64) -> ScaleFunction {
        if c == 0.0 {
            return self.clone();
        }
        match self {
            ScaleFunction::Expr(e) => ScaleFunction::Expr(Expr::Add(
                Box::new(e.clone()),
                Box::new(Expr::Const(c)),
            )),
            ScaleFunction::Table(tab) => ScaleFunction::Table(FnTable {
                scale: tab.scale.clone(),
                entries: tab.entries.iter().map(|&(t, v)| (t, v + c)).collect(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expr_form_examples() {
        let f = ScaleFunction::parse("x^2+3*x").unwrap();
        let ts = TimeScale::from_points(vec![0.0, 2.0]).unwrap();
        let p = ts.locate(2.0).unwrap();
        assert_eq!(f.eval_at(&ts, p).unwrap(), 10.0);

        let g = ScaleFunction::parse("1/x").unwrap();
        let ts = TimeScale::from_points(vec![0.0, 1.0]).unwrap();
        let p0 = ts.locate(0.0).unwrap();
        assert!(matches!(g.eval_at(&ts, p0), Err(CalcError::Domain(_))));
    }

    #[test]
    fn table_form_lookup_and_gaps() {
        let ts = TimeScale::from_points(vec![0.0, 1.0, 2.0]).unwrap();
        let f = ScaleFunction::table(ts.clone(), vec![(0.0, 1.0), (1.0, 4.0), (2.0, 9.0)]).unwrap();
        let p = ts.locate(1.0).unwrap();
        assert_eq!(f.eval_at(&ts, p).unwrap(), 4.0);

        let partial = ScaleFunction::table(ts.clone(), vec![(0.0, 1.0)]).unwrap();
        let p2 = ts.locate(2.0).unwrap();
        assert_eq!(
            partial.eval_at(&ts, p2),
            Err(CalcError::MissingSample { t: 2.0 })
        );
    }

    #[test]
    fn tables_rejected_on_dense_scales() {
        let ts = TimeScale::interval(0.0, 1.0).unwrap();
        assert!(matches!(
            ScaleFunction::table(ts, vec![(0.0, 1.0)]),
            Err(CalcError::TableOnDense { .. })
        ));
    }

    #[test]
    fn negation_is_exact() {
        let ts = TimeScale::from_points(vec![0.0, 1.0]).unwrap();
        let f = ScaleFunction::table(ts.clone(), vec![(0.0, 0.1), (1.0, -3.7)]).unwrap();
        let g = f.negated();
        for t in [0.0, 1.0] {
            let p = ts.locate(t).unwrap();
            assert_eq!(
                g.eval_at(&ts, p).unwrap().to_bits(),
                (-f.eval_at(&ts, p).unwrap()).to_bits()
            );
        }
    }
}
