//! Hecke operators, the additive lift, Borcherds products in product, Fourier–Jacobi and
//! exponential form, Weyl vectors, divisors on Humbert surfaces and the quasi-pullback.

pub mod bivariate;
pub mod divisors;
pub mod hecke;
pub mod product;

pub use bivariate::Bivariate;
pub use divisors::{
    divisors, duality_d0, hecke_identity_defect, leading_form, quasi_pullback, HumbertEntry, PullbackSeries,
};
pub use hecke::{gritsenko_lift, hecke_t0, hecke_tm, HeckeCharacter};
pub use product::{borcherds_product, mult, mult_and_weyl, mult_d, MultData, ProductMode};

use crate::exact_algebra::numtheory::gcd;
use crate::exact_algebra::rational::{fmt_q, q_zero, qi};
use crate::exact_algebra::{QJacobi, Q};
use crate::m24_classes::ClassRecord;
use crate::modular_blocks::BlockError;
use crate::twisted_genera::{genus_family, GenusError};
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum LiftError {
    #[error("T₋(0) of a form with nonzero c(0, r) needs the constant c_φ, which is not implemented")]
    IndexZeroConstant,
    #[error("weight {0} is outside the range of this lift")]
    NegativeWeight(i64),
    #[error("input known below q^{available}, need q^{needed}")]
    Truncation { needed: i64, available: i64 },
    #[error("exponent mult({n}, {r}, {m}) = {value} is not an integer")]
    NonIntegral { n: i64, r: i64, m: i64, value: String },
    #[error("Weyl vector component {0} is not an integer")]
    WeylNotIntegral(String),
    #[error("the n = m = 0 factor (1 − ζ^{r})^{exponent} is not a polynomial")]
    ZetaSeries { r: i64, exponent: String },
    #[error("coefficients outside the exact ζ-window: {0}")]
    ZetaOverflow(String),
    #[error("input has negative q-powers; only weak families are supported here")]
    Poles,
    #[error("quasi-pullback: q^{n} s^{m} coefficient does not vanish to order two at z = 0")]
    NoDoubleZero { n: i64, m: i64 },
    #[error(transparent)]
    Genus(#[from] GenusError),
    #[error(transparent)]
    Block(#[from] BlockError),
}

/// Inputs φ_d for d | N (absent members are zero), each with integral exponents.
#[derive(Clone, Debug)]
pub struct LiftFamily {
    pub name: String,
    pub n: u64,
    pub t: u64,
    pub members: BTreeMap<u64, Arc<QJacobi>>,
}

impl LiftFamily {
    /// (φ_{g^d})_{d | N_g}, each known below q^rows.
    pub fn from_class(rec: &ClassRecord, rows: i64) -> Result<Self, LiftError> {
        let fam = genus_family(rec, rows)?;
        Ok(LiftFamily {
            name: rec.name.clone(),
            n: rec.level,
            t: 1,
            members: fam.members.into_iter().map(|(d, (_, phi))| (d, phi)).collect(),
        })
    }

    /// φ₁ = phi, φ_d = 0 for d > 1.
    pub fn single(name: &str, phi: QJacobi, n: u64) -> Self {
        LiftFamily { name: name.to_string(), n, t: 1, members: BTreeMap::from([(1, Arc::new(phi))]) }
    }

    /// Rows every member is known below.
    pub fn rows(&self) -> i64 {
        self.members
            .values()
            .filter_map(|m| m.trunc())
            .map(|t| t.ceil().to_integer().to_i64().unwrap())
            .min()
            .unwrap_or(i64::MAX)
    }

    /// c_d(n, r); zero for absent members.
    pub fn c(&self, d: u64, n: i64, r: i64) -> Q {
        match self.members.get(&d) {
            Some(phi) => phi.c(n, r),
            None => q_zero(),
        }
    }

    /// φ_a = φ_{gcd(a, N)}.
    pub fn c_extended(&self, a: u64, n: i64, r: i64) -> Q {
        self.c(gcd(a as i64, self.n as i64) as u64, n, r)
    }

    /// Largest |r| with c_d(n, r) ≠ 0 over all members.
    pub fn r_extent(&self, n: i64) -> i64 {
        self.members
            .values()
            .flat_map(|phi| phi.row(&qi(n)).into_iter().filter(|(_, v)| !num_traits::Zero::is_zero(v)).map(|(r, _)| r.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn is_weak(&self) -> bool {
        self.members.values().all(|m| m.valuation().is_none_or(|v| v >= qi(0)))
    }
}

/// Σ_m φ_m(τ, z) s^m with every φ_m known through q^{q_max}, for m ≤ s_max.
#[derive(Clone, Debug, PartialEq)]
pub struct FJExpansion {
    pub t: u64,
    pub n: u64,
    pub q_max: i64,
    pub s_max: i64,
    pub coeffs: BTreeMap<i64, QJacobi>,
    pub weyl: (Q, Q, Q),
    pub weight: Q,
}

impl FJExpansion {
    pub fn from_bivariate(b: &Bivariate, t: u64, n: u64, weyl: (Q, Q, Q), weight: Q) -> Self {
        let mut coeffs = BTreeMap::new();
        for m in 0..=b.s_max {
            let phi = b.fj_coefficient(m);
            if !phi.is_empty() {
                coeffs.insert(m, phi);
            }
        }
        FJExpansion { t, n, q_max: b.q_max, s_max: b.s_max, coeffs, weyl, weight }
    }

    pub fn to_bivariate(&self) -> Bivariate {
        Bivariate::from_fj(&self.coeffs, self.q_max, self.s_max)
    }

    /// c(n, r, m).
    pub fn coeff(&self, n: i64, r: i64, m: i64) -> Q {
        assert!(n <= self.q_max && m <= self.s_max, "({n}, {m}) is outside the truncation box");
        self.coeffs.get(&m).map(|phi| phi.c(n, r)).unwrap_or_else(q_zero)
    }

    /// Coefficientwise product, truncated to the smaller box.
    pub fn mul(&self, other: &Self) -> Self {
        let b = self.to_bivariate().mul(&other.to_bivariate());
        let weyl = (&self.weyl.0 + &other.weyl.0, &self.weyl.1 + &other.weyl.1, &self.weyl.2 + &other.weyl.2);
        FJExpansion::from_bivariate(&b, self.t, self.n, weyl, &self.weight + &other.weight)
    }

    /// Same coefficients in the common box.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let (qm, sm) = (self.q_max.min(other.q_max), self.s_max.min(other.s_max));
        self.to_bivariate().restrict(qm, sm) == other.to_bivariate().restrict(qm, sm)
    }

    /// (n, r, m) with c(n, r, m) ≠ c(m, r, n) inside the square part of the box.
    pub fn duality_defects(&self) -> Vec<(i64, i64, i64)> {
        let b = self.to_bivariate();
        let k = self.q_max.min(self.s_max);
        let sq = b.restrict(k, k);
        let mut bad = Vec::new();
        for (&(n, m), row) in sq.cells() {
            for (r, v) in row {
                if sq.coeff(m, *r, n) != *v {
                    bad.push((n, *r, m));
                }
            }
        }
        for (&(n, m), row) in sq.cells() {
            for r in row.keys() {
                if sq.row(m, n).get(r).is_none() {
                    bad.push((m, *r, n));
                }
            }
        }
        bad.sort();
        bad.dedup();
        bad
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .to_bivariate()
            .cells()
            .flat_map(|(&(n, m), row)| row.iter().map(move |(r, v)| json!([n, r, m, fmt_q(v)])))
            .collect();
        json!({
            "t": self.t,
            "level": self.n,
            "q_max": self.q_max,
            "s_max": self.s_max,
            "weight": fmt_q(&self.weight),
            "weyl_vector": [fmt_q(&self.weyl.0), fmt_q(&self.weyl.1), fmt_q(&self.weyl.2)],
            "coefficients": coeffs,
        })
    }
}
