//! Exact arithmetic: rationals, cyclotomic numbers, and truncated q- and (q, ζ)-series.

pub mod coeff;
pub mod cyclotomic;
pub mod jacobi;
pub mod numtheory;
pub mod rational;
pub mod series;

pub use coeff::Coeff;
pub use cyclotomic::Cyclotomic;
pub use jacobi::{JacobiSeries, Laurent, QJacobi};
pub use rational::{fmt_q, parse_q, q, qi, Q};
pub use series::{CSeries, FracSeries, QSeries};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("leading coefficient is zero or not invertible")]
    ZeroLeadingCoefficient,
    #[error("exp requires strictly positive valuation")]
    NonpositiveValuation,
    #[error("log requires constant term 1")]
    NotUnitConstant,
    #[error("operation needs a truncation order but the series is exact")]
    UnboundedPrecision,
    #[error("leading q-row is not a single ζ-monomial")]
    NonMonomialLeadingRow,
}

/// Reduces a cyclotomic number to a rational when it lies in ℚ.
pub fn cyclo_reduce(x: &Cyclotomic) -> Result<Q, Cyclotomic> {
    x.to_rational().ok_or_else(|| x.clone())
}
