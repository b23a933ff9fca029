//! Index-raising Hecke operators T₋^{(D)}(m) and the additive lift.

use super::{FJExpansion, LiftError};
use crate::exact_algebra::numtheory::{divisors, gcd, kronecker};
use crate::exact_algebra::rational::qi;
use crate::exact_algebra::{QJacobi, Q};
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// A Dirichlet character mod D, either trivial or a Kronecker symbol (disc/·).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeckeCharacter {
    Trivial,
    Kronecker(i64),
}

impl HeckeCharacter {
    pub fn eval(&self, a: i64) -> i64 {
        match self {
            HeckeCharacter::Trivial => 1,
            HeckeCharacter::Kronecker(d) => kronecker(*d, a),
        }
    }
}

fn int_pow(a: i64, k: i64) -> Q {
    if k >= 0 {
        Q::from_integer(num_bigint::BigInt::from(a).pow(k as u32))
    } else {
        Q::one() / Q::from_integer(num_bigint::BigInt::from(a).pow((-k) as u32))
    }
}

fn known_rows(phi: &QJacobi) -> i64 {
    phi.trunc()
        .map(|t| t.ceil().to_integer().to_i64().unwrap())
        .expect("Hecke operators need a truncated input")
}

/// φ|_{k,t} T₋^{(D)}(m): the coefficient of qⁿζ^r is Σ_{a | (n, r, m), (a, D) = 1} a^{k−1}χ(a)c(nm/a², r/a).
/// Known below q^{⌈T/m⌉} when φ is known below q^T.
pub fn hecke_tm(phi: &QJacobi, k: i64, m: u64, level: u64, chi: HeckeCharacter) -> QJacobi {
    assert!(m >= 1);
    let rows = known_rows(phi);
    let m = m as i64;
    // nm ≤ rows − 1
    let out_rows = (rows - 1) / m + 1;
    let mut terms = Vec::new();
    for a in divisors(m as u64).into_iter().map(|a| a as i64) {
        if gcd(a, level as i64) != 1 {
            continue;
        }
        let w = int_pow(a, k - 1) * qi(chi.eval(a));
        if w.is_zero() {
            continue;
        }
        for (n0, r0, c) in phi.terms() {
            // n·m/a² = n0 with a | n
            let n0 = n0.to_integer().to_i64().expect("integral q-exponents");
            let r0 = r0.to_integer().to_i64().expect("integral ζ-exponents");
            if (n0 * a * a) % m != 0 {
                continue;
            }
            let n = n0 * a * a / m;
            if n % a != 0 || n >= out_rows {
                continue;
            }
            terms.push((n, r0 * a, c * &w));
        }
    }
    let index = &phi.index * qi(m);
    QJacobi::from_terms(1, 1, terms, Some(qi(out_rows))).with_meta(phi.weight.clone(), index, level)
}

/// φ|T₋^{(D)}(0) in the only case the moonshine path meets: every c(0, r) vanishes and the result is 0.
pub fn hecke_t0(phi: &QJacobi, k: i64) -> Result<QJacobi, LiftError> {
    if k < 0 {
        return Err(LiftError::NegativeWeight(k));
    }
    let row = phi.row(&qi(0));
    if row.values().any(|v| !v.is_zero()) {
        return Err(LiftError::IndexZeroConstant);
    }
    Ok(QJacobi::zero_to(phi.trunc().cloned()).with_meta(qi(k), qi(0), phi.level))
}

/// G(φ) = Σ_m φ|T₋^{(D)}(m) s^{mt} for 0 ≤ m ≤ s_max, each coefficient known through q^{q_max}.
pub fn gritsenko_lift(
    phi: &QJacobi,
    k: i64,
    level: u64,
    chi: HeckeCharacter,
    q_max: i64,
    s_max: i64,
) -> Result<FJExpansion, LiftError> {
    if k < 1 {
        return Err(LiftError::NegativeWeight(k));
    }
    let need = (q_max * s_max.max(1) + 1).max(q_max + 1);
    if known_rows(phi) < need {
        return Err(LiftError::Truncation { needed: need, available: known_rows(phi) });
    }
    let t = phi.index.to_integer().to_i64().unwrap_or(1);
    let mut coeffs = BTreeMap::new();
    coeffs.insert(0, hecke_t0(phi, k)?.truncate(&qi(q_max + 1)));
    for m in 1..=s_max / t {
        coeffs.insert(m * t, hecke_tm(phi, k, m as u64, level, chi).truncate(&qi(q_max + 1)));
    }
    coeffs.retain(|_, v| !v.is_empty());
    Ok(FJExpansion {
        t: t as u64,
        n: level,
        q_max,
        s_max,
        coeffs,
        weyl: (Q::zero(), Q::zero(), Q::zero()),
        weight: qi(k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular_blocks::{eta_power, phi_m2};

    fn igusa_input(rows: i64) -> QJacobi {
        phi_m2(rows).mul_scalar(&eta_power(1, 24, &qi(rows))).truncate(&qi(rows))
    }

    #[test]
    fn t1_is_identity() {
        let f = igusa_input(6);
        assert!(hecke_tm(&f, 10, 1, 1, HeckeCharacter::Trivial).same_terms(&f));
    }

    #[test]
    fn t2_weight_ten_sum() {
        let f = igusa_input(9);
        let g = hecke_tm(&f, 10, 2, 1, HeckeCharacter::Trivial);
        assert_eq!(g.c(2, 0), f.c(4, 0) + qi(512) * f.c(1, 0));
        assert_eq!(g.c(1, 1), f.c(2, 1));
        assert_eq!(g.c(3, 2), f.c(6, 2));
        assert_eq!(g.c(4, 2), f.c(8, 2) + qi(512) * f.c(2, 1));
    }

    #[test]
    fn level_excludes_divisors() {
        let f = igusa_input(9);
        let g = hecke_tm(&f, 10, 2, 2, HeckeCharacter::Trivial);
        assert_eq!(g.c(2, 0), f.c(4, 0));
    }

    #[test]
    fn t0_zero_case_and_error() {
        assert!(hecke_t0(&igusa_input(3), 10).unwrap().is_empty());
        assert_eq!(hecke_t0(&phi_m2(3), 0), Err(LiftError::IndexZeroConstant));
    }

    #[test]
    fn lift_is_symmetric_in_q_and_s() {
        let g = gritsenko_lift(&igusa_input(10), 10, 1, HeckeCharacter::Trivial, 3, 3).unwrap();
        for n in 0..=3 {
            for m in 0..=3 {
                for r in -4..=4 {
                    assert_eq!(g.coeff(n, r, m), g.coeff(m, r, n), "({n},{r},{m})");
                }
            }
        }
        assert!(g.coeffs[&1].same_terms(&igusa_input(4)));
    }
}
