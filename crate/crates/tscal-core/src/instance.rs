//! The JSON instance schema shared by the generators and the CLI: a
//! scale literal plus expression- or table-backed function sources.

use serde::{Deserialize, Serialize};

use crate::expr::Expr;
use crate::function::{CalcError, ScaleFunction};
use crate::scale::{ScaleError, TimeScale};
use crate::yfun::FunctionPair;

/// Function source: `{"expr": "x^2"}` or `{"table": [[t, v], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionSpec {
    Expr(String),
    Table(Vec<(f64, f64)>),
}

/// A complete check input: scale literal and the two functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub scale: String,
    pub phi: FunctionSpec,
    pub psi: FunctionSpec,
}

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error(transparent)]
    Scale(#[from] ScaleError),
    #[error("expression: {0}")]
    Expr(#[from] crate::expr::ParseError),
    #[error(transparent)]
    Calc(#[from] CalcError),
}

impl FunctionSpec {
    pub fn build(&self, ts: &TimeScale) -> Result<ScaleFunction, InstanceError> {
        match self {
            FunctionSpec::Expr(src) => Ok(ScaleFunction::Expr(Expr::parse(src)?)),
            FunctionSpec::Table(entries) => {
                Ok(ScaleFunction::table(ts.clone(), entries.clone())?)
            }
        }
    }

    pub fn of(f: &ScaleFunction) -> FunctionSpec {
        match f {
            ScaleFunction::Expr(e) => FunctionSpec::Expr(e.pretty()),
            ScaleFunction::Table(t) => FunctionSpec::Table(t.entries().to_vec()),
        }
    }
}

impl InstanceSpec {
    pub fn of(pair: &FunctionPair) -> InstanceSpec {
        InstanceSpec {
            scale: pair.scale.to_string(),
            phi: FunctionSpec::of(&pair.phi),
            psi: FunctionSpec::of(&pair.psi),
        }
    }

    pub fn build(&self) -> Result<FunctionPair, InstanceError> {
        let ts = TimeScale::parse(&self.scale)?;
        let phi = self.phi.build(&ts)?;
        let psi = self.psi.build(&ts)?;
        Ok(FunctionPair::new(phi, psi, ts))
    }
}
