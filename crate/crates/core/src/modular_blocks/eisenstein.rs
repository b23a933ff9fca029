//! E₂ and the weight-2 forms E₂^(N)(τ) = (N·E₂(Nτ) − E₂(τ))/(N − 1).

use crate::exact_algebra::numtheory::sigma1;
use crate::exact_algebra::rational::{q, qi};
use crate::exact_algebra::{FracSeries, QSeries, Q};
use num_traits::ToPrimitive;

/// E₂(τ) = 1 − 24 Σ σ₁(n) qⁿ, known below q^trunc.
pub fn e2_series(trunc: &Q) -> QSeries {
    let nmax = trunc.ceil().to_integer().to_i64().unwrap();
    FracSeries::from_terms(
        1,
        (0..nmax).map(|n| {
            (
                n,
                if n == 0 {
                    qi(1)
                } else {
                    qi(-24 * sigma1(n as u64) as i64)
                },
            )
        }),
        Some(trunc.clone()),
    )
}

/// E₂^(N)(scale·τ), known below q^trunc.
pub fn e2n_series(level: u64, scale: u64, trunc: &Q) -> QSeries {
    assert!(level >= 2);
    let s = qi(scale as i64);
    let big = e2_series(&(trunc / qi((level * scale) as i64))).substitute(&qi((level * scale) as i64));
    let small = e2_series(&(trunc / &s)).substitute(&s);
    big.scale(&qi(level as i64))
        .sub(&small)
        .scale(&q(1, level as i64 - 1))
}
