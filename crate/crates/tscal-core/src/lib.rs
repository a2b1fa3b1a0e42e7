//! Calculus on time scales with nabla and diamond-alpha derivatives,
//! the associated Y-functions, and verification of L'Hospital-type
//! monotonicity rules on concrete scales.
//!
//! The crate is organized bottom-up:
//!
//! - [`scale`]: time scales, jump operators, grids
//! - [`expr`]: the univariate expression language
//! - [`function`]: expression- or table-backed functions on a scale
//! - [`calculus`]: delta / nabla / diamond-alpha derivatives and integrals
//! - [`yfun`]: Y-functions and their derivative/quotient identities
//! - [`rules`]: monotonicity classification and rule checkers
//! - [`gen`]: seeded instance generators with known ratio structure
//! - [`instance`]: the JSON instance schema shared with the CLI
//! - [`verify`]: batch suites driving the checkers over generated instances
//! - [`cli`]: the `tscal` command-line front end

pub mod calculus;
pub mod cli;
pub mod expr;
pub mod function;
pub mod gen;
pub mod instance;
pub mod rules;
pub mod scale;
pub mod verify;
pub mod yfun;

pub use calculus::{deriv, deriv2, integral, nabla_antiderivative, DerivKind};
pub use expr::Expr;
pub use function::{CalcError, FnTable, ScaleFunction};
pub use scale::{
    Component, Location, PointClass, PointRef, RawComponent, ScaleError, Side, TimeScale,
};
pub use yfun::{DiamondRatioDeriv, FunctionPair, SymmetryQuad, YDiamondDeriv};
