//! Exact noncommutative algebra of momenta and position functions.

mod expr;
mod factor;
mod scalar;
pub mod text;

pub use expr::{NormalWord, OperatorExpr, OperatorTerm, Primitive};
pub use factor::{Axis, Coord, FactorKind, LinearForm, PositionFactor, PositionMonomial};
pub use scalar::{
    parse_rational, rat, rat_int, rat_to_f64, Bindings, Coefficient, GaussRational,
    ParameterMonomial, Powers, Rational, HBAR, LIGHT_SPEED,
};
