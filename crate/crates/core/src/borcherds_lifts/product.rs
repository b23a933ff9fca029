//! Multiplicities, Weyl vector and the three expansions of B((φ_d)_{d | N}).

use super::bivariate::Bivariate;
use super::hecke::{hecke_tm, HeckeCharacter};
use super::{FJExpansion, LiftError, LiftFamily};
use crate::exact_algebra::jacobi::{laurent_add, laurent_mul, Laurent};
use crate::exact_algebra::numtheory::{divisors, gcd, moebius};
use crate::exact_algebra::rational::{fmt_q, q, q_zero, qi};
use crate::exact_algebra::Q;
use crate::modular_blocks::theta_block;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProductMode {
    /// q^Aζ^Bs^C ∏_{(n,r,m)>0} (1 − qⁿζ^r s^{tm})^{mult(n,r,m)}.
    Product,
    /// Θ(τ,z)s^C exp(−Σ_d d⁻¹ G(φ_d)(dZ)), with the m = 0 part of G absorbed in Θ.
    FourierJacobi,
    /// q^Aζ^Bs^C ∏ exp(−Σ_a c_a(nm, r)(qⁿζ^r s^{tm})^a/a), φ_a = φ_{gcd(a,N)}.
    Exponential,
}

impl std::str::FromStr for ProductMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "product" => Ok(ProductMode::Product),
            "fj" => Ok(ProductMode::FourierJacobi),
            "exp" => Ok(ProductMode::Exponential),
            _ => Err(format!("unknown mode {s}; expected product, fj or exp")),
        }
    }
}

/// mult(n, r, m) = Σ_{bd | (n, r, m, N)} μ(b)/(bd)·c_d(nm/b²d², r/bd).
pub fn mult(fam: &LiftFamily, n: i64, r: i64, m: i64) -> Q {
    let g = [n, r, m].iter().fold(fam.n as i64, |acc, x| gcd(acc, *x)) as u64;
    let mut out = q_zero();
    for e in divisors(g) {
        for d in divisors(e) {
            let b = e / d;
            let mu = moebius(b);
            if mu == 0 {
                continue;
            }
            let e = e as i64;
            out += q(mu, e) * fam.c(d, n * m / (e * e), r / e);
        }
    }
    out
}

/// mult_d(n, r) = Σ_{t | d} μ(d/t)/d·c_t(n, r).
pub fn mult_d(fam: &LiftFamily, d: u64, n: i64, r: i64) -> Q {
    divisors(d)
        .into_iter()
        .map(|t| q(moebius(d / t), d as i64) * fam.c(t, n, r))
        .sum()
}

/// Weyl vector, weight and the q⁰ multiplicities that shape the theta block.
#[derive(Clone, Debug, PartialEq)]
pub struct MultData {
    pub weyl: (Q, Q, Q),
    pub weight: Q,
    /// d ↦ r ↦ mult_d(0, r) for r ≥ 0, nonzero entries only.
    pub theta_exponents: BTreeMap<u64, BTreeMap<i64, Q>>,
}

pub fn mult_and_weyl(fam: &LiftFamily) -> MultData {
    let top = fam.c_row0(fam.n);
    let a: Q = top.values().sum::<Q>() / qi(24);
    let b: Q = top.iter().filter(|(r, _)| **r > 0).map(|(r, v)| v * qi(*r)).sum::<Q>() / qi(2);
    let c: Q = top.iter().map(|(r, v)| v * qi(r * r)).sum::<Q>() / qi(4);
    let mut theta_exponents = BTreeMap::new();
    let mut weight = q_zero();
    for d in divisors(fam.n) {
        let mut row = BTreeMap::new();
        for r in 0..=fam.r_extent(0) {
            let v = mult_d(fam, d, 0, r);
            if !v.is_zero() {
                row.insert(r, v);
            }
        }
        weight += row.get(&0).cloned().unwrap_or_else(q_zero);
        if !row.is_empty() {
            theta_exponents.insert(d, row);
        }
    }
    MultData { weyl: (a, b, c), weight: weight / qi(2), theta_exponents }
}

impl LiftFamily {
    fn c_row0(&self, d: u64) -> BTreeMap<i64, Q> {
        match self.members.get(&d) {
            Some(phi) => phi.row(&qi(0)).into_iter().filter(|(_, v)| !v.is_zero()).collect(),
            None => BTreeMap::new(),
        }
    }
}

fn to_int(v: &Q, what: &str) -> Result<i64, LiftError> {
    if !v.is_integer() {
        return Err(LiftError::WeylNotIntegral(format!("{what} = {}", fmt_q(v))));
    }
    Ok(v.to_integer().to_i64().unwrap())
}

/// Bound on |r| with mult(n, r, m) ≠ 0 or c_a(nm, r) ≠ 0.
fn r_bound(fam: &LiftFamily, n: i64, m: i64) -> i64 {
    let g = gcd(gcd(n, m), fam.n as i64).max(1);
    let mut best = 0;
    for e in divisors(g as u64).into_iter().map(|e| e as i64) {
        if (n * m) % (e * e) == 0 {
            best = best.max(e * fam.r_extent(n * m / (e * e)));
        }
    }
    best
}

/// Φ = B((φ_d)) with coefficients through q^{q_max} s^{s_max}.
pub fn borcherds_product(fam: &LiftFamily, mode: ProductMode, q_max: i64, s_max: i64) -> Result<FJExpansion, LiftError> {
    if !fam.is_weak() {
        return Err(LiftError::Poles);
    }
    let data = mult_and_weyl(fam);
    let a = to_int(&data.weyl.0, "A")?;
    let b = to_int(&data.weyl.1, "B")?;
    let c = to_int(&data.weyl.2, "C")?;
    if a < 0 || c < 0 {
        return Err(LiftError::WeylNotIntegral(format!("negative Weyl vector ({a}, {b}, {c})")));
    }
    let (qp, sp) = (q_max - a, s_max - c);
    let needed = (qp.max(0) * sp.max(0) + 1).max(qp + 1);
    if fam.rows() < needed {
        return Err(LiftError::Truncation { needed, available: fam.rows() });
    }
    let t = fam.t;
    let body = if qp < 0 || sp < 0 {
        Bivariate::zero(q_max, s_max)
    } else {
        match mode {
            ProductMode::Product => product_form(fam, qp, sp)?.restrict(q_max, s_max).shift(a, b, c),
            ProductMode::Exponential => exponential_form(fam, qp, sp, b)?.restrict(q_max, s_max).shift(a, 0, c),
            ProductMode::FourierJacobi => fourier_jacobi_form(fam, &data, a, q_max, sp)?.restrict(q_max, s_max).shift(0, 0, c),
        }
    };
    Ok(FJExpansion::from_bivariate(&body, t, fam.n, data.weyl, data.weight))
}

/// The n = m = 0 factor ∏_{r<0} (1 − ζ^r)^{mult(0,r,0)} as a Laurent polynomial.
fn zeta_factor(fam: &LiftFamily) -> Result<Laurent<Q>, LiftError> {
    let mut poly: Laurent<Q> = BTreeMap::from([(0, Q::one())]);
    let reach = fam.n as i64 * fam.r_extent(0);
    for r in -reach..0 {
        let e = mult(fam, 0, r, 0);
        if e.is_zero() {
            continue;
        }
        if !e.is_integer() || e < q_zero() {
            return Err(LiftError::ZetaSeries { r, exponent: fmt_q(&e) });
        }
        let base: Laurent<Q> = BTreeMap::from([(0, Q::one()), (r, -Q::one())]);
        for _ in 0..e.to_integer().to_i64().unwrap() {
            poly = laurent_mul(&poly, &base);
        }
    }
    Ok(poly)
}

fn product_form(fam: &LiftFamily, qp: i64, sp: i64) -> Result<Bivariate, LiftError> {
    let cells: Vec<(i64, i64)> =
        (0..=qp).flat_map(|n| (0..=sp).map(move |m| (n, m))).filter(|&(n, m)| n + m > 0).collect();
    // exponents are pure functions of the family; collect them in parallel, multiply in order
    let factors: Vec<Vec<(i64, i64, i64, Q)>> = cells
        .par_iter()
        .map(|&(n, m)| {
            let rb = r_bound(fam, n, m);
            (-rb..=rb)
                .map(|r| (n, r, m, mult(fam, n, r, m)))
                .filter(|f| !f.3.is_zero())
                .collect()
        })
        .collect();
    let mut p = Bivariate::one(qp, sp).mul_laurent(&zeta_factor(fam)?);
    for (n, r, m, e) in factors.into_iter().flatten() {
        if !e.is_integer() {
            return Err(LiftError::NonIntegral { n, r, m, value: fmt_q(&e) });
        }
        p = p.mul_binomial(n, r, m, &e);
    }
    Ok(p)
}

fn exponential_form(fam: &LiftFamily, qp: i64, sp: i64, b: i64) -> Result<Bivariate, LiftError> {
    let mut log = Bivariate::zero(qp, sp);
    for n in 0..=qp {
        for m in 0..=sp {
            if n + m == 0 {
                continue;
            }
            let rb = fam.r_extent(n * m);
            for r in -rb..=rb {
                let mut a = 1i64;
                while a * n <= qp && a * m <= sp {
                    let v = fam.c_extended(a as u64, n * m, r);
                    if !v.is_zero() {
                        log.add_term(a * n, a * r, a * m, -v / qi(a));
                    }
                    a += 1;
                }
            }
        }
    }
    let rest = log.exp();
    // exp(−Σ_{r<0} Σ_a c_a(0, r)ζ^{ra}/a) is a power series in ζ⁻¹; keep enough of it that
    // every coefficient in the symmetric window [−W, W], W = B + max r of the rest, is exact.
    let pmax = rest.max_r().unwrap_or(0);
    let window = b + pmax;
    let depth = window + pmax + 1;
    let z0 = zeta_exp_series(fam, depth);
    let full = rest.mul_laurent(&z0).shift(0, b, 0);
    let clipped = full.clip_r(-window, window);
    if !clipped.parity_defects(1).is_empty() && !clipped.parity_defects(-1).is_empty() {
        return Err(LiftError::ZetaOverflow(format!("{:?}", &clipped.parity_defects(1)[..1])));
    }
    Ok(clipped)
}

/// exp(−Σ_{r<0} Σ_{a≥1} c_a(0, r) ζ^{ra}/a) through ζ^{−depth}.
fn zeta_exp_series(fam: &LiftFamily, depth: i64) -> Laurent<Q> {
    // L as a power series in x = ζ⁻¹
    let mut l = vec![q_zero(); depth as usize + 1];
    for r in 1..=fam.r_extent(0) {
        let mut a = 1;
        while a * r <= depth {
            l[(a * r) as usize] -= fam.c_extended(a as u64, 0, -r) / qi(a);
            a += 1;
        }
    }
    // E' = E·L'
    let mut e = vec![q_zero(); depth as usize + 1];
    e[0] = Q::one();
    for k in 1..=depth as usize {
        let mut acc = q_zero();
        for j in 1..=k {
            if !l[j].is_zero() {
                acc += qi(j as i64) * &l[j] * &e[k - j];
            }
        }
        e[k] = acc / qi(k as i64);
    }
    let mut out = BTreeMap::new();
    for (k, v) in e.into_iter().enumerate() {
        if !v.is_zero() {
            laurent_add(&mut out, &BTreeMap::from([(-(k as i64), v)]), None);
        }
    }
    out
}

fn fourier_jacobi_form(fam: &LiftFamily, data: &MultData, a: i64, q_max: i64, sp: i64) -> Result<Bivariate, LiftError> {
    let mut exps = BTreeMap::new();
    for (d, row) in &data.theta_exponents {
        let mut ints = BTreeMap::new();
        for (r, v) in row {
            if !v.is_integer() {
                return Err(LiftError::NonIntegral { n: 0, r: *r, m: 0, value: fmt_q(v) });
            }
            ints.insert(*r, v.to_integer().to_i64().unwrap());
        }
        exps.insert(*d, ints);
    }
    let theta = theta_block(&exps, &qi(q_max + 1))?;
    let mut theta_b = Bivariate::zero(q_max, sp);
    for (n, r, c) in theta.terms() {
        if !n.is_integer() || !r.is_integer() {
            return Err(LiftError::WeylNotIntegral(format!("theta block exponent q^{} ζ^{}", fmt_q(&n), fmt_q(&r))));
        }
        theta_b.add_term(n.to_integer().to_i64().unwrap(), r.to_integer().to_i64().unwrap(), 0, c);
    }
    let qp = q_max - a;
    let mut e = Bivariate::zero(qp, sp);
    for d in divisors(fam.n) {
        let Some(phi) = fam.members.get(&d) else { continue };
        let di = d as i64;
        for m in 1..=sp / di {
            let h = hecke_tm(phi, 0, m as u64, fam.n / d, HeckeCharacter::Trivial);
            for (n, r, c) in h.terms() {
                let n = n.to_integer().to_i64().unwrap();
                let r = r.to_integer().to_i64().unwrap();
                if n * di <= qp {
                    e.add_term(n * di, r * di, m * di, -c / qi(di));
                }
            }
        }
    }
    if theta.valuation().is_some_and(|v| v < qi(a)) {
        return Err(LiftError::WeylNotIntegral("theta block starts below q^A".into()));
    }
    // Θ starts at q^A, so exp(E) is only needed through q^{q_max − A}
    Ok(theta_b.mul(&e.exp().enlarge(q_max, sp)))
}
