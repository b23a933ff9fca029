//! Elements of ℚ(ζ_n) in a sparse canonical basis.
//!
//! ℚ(ζ_n) is the tensor product of ℚ(ζ_q) over the prime powers q ∥ n. With
//! ω_q = ζ_n^{n/q}, the basis is ∏ ω_q^{e_q} with 0 ≤ e_q < φ(q). A power
//! ω^{φ(q)+s} (0 ≤ s < q/p) reduces to −Σ_{t<p−1} ω^{s+t·q/p}, so a root of
//! unity expands into at most ∏(p−1) basis elements. Lifting from conductor m
//! to a multiple n maps basis elements to basis elements.

use super::numtheory::{factorize, gcd, mod_inverse, modp};
use super::rational::{q, Q};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Debug)]
struct Factor {
    q: u64,
    phi: u64,
    stride: u64,
    // (n/q)^{-1} mod q
    cofactor_inv: u64,
    p: u64,
}

#[derive(Debug)]
struct Ctx {
    phi: usize,
    // basis index → exponent j of ζ_n
    basis_exp: Vec<u64>,
    // j → expansion as (basis index, ±1)
    expand: Vec<Vec<(u32, i8)>>,
}

impl Ctx {
    fn build(n: u64) -> Ctx {
        let mut factors = Vec::new();
        let mut stride = 1;
        for (p, e) in factorize(n) {
            let qq = p.pow(e);
            let phi = qq - qq / p;
            let cof = n / qq;
            let cofactor_inv = mod_inverse(cof as i64, qq as i64).unwrap() as u64;
            factors.push(Factor {
                q: qq,
                phi,
                stride,
                cofactor_inv,
                p,
            });
            stride *= phi;
        }
        let phi = stride as usize;
        let mut basis_exp = vec![0u64; phi];
        for (idx, slot) in basis_exp.iter_mut().enumerate() {
            let mut j = 0;
            for f in &factors {
                let e = (idx as u64 / f.stride) % f.phi;
                j = (j + e * (n / f.q)) % n;
            }
            *slot = j;
        }
        let mut expand = Vec::with_capacity(n as usize);
        for j in 0..n {
            let mut terms: Vec<(u64, i8)> = vec![(0, 1)];
            for f in &factors {
                let e = (j % f.q) * f.cofactor_inv % f.q;
                let local: Vec<(u64, i8)> = if e < f.phi {
                    vec![(e, 1)]
                } else {
                    let s = e - f.phi;
                    (0..f.p - 1).map(|t| (s + t * (f.q / f.p), -1)).collect()
                };
                let mut next = Vec::with_capacity(terms.len() * local.len());
                for &(idx, sg) in &terms {
                    for &(le, ls) in &local {
                        next.push((idx + le * f.stride, sg * ls));
                    }
                }
                terms = next;
            }
            let mut terms: Vec<(u32, i8)> = terms.into_iter().map(|(i, s)| (i as u32, s)).collect();
            terms.sort_unstable();
            expand.push(terms);
        }
        Ctx {
            phi,
            basis_exp,
            expand,
        }
    }
}

fn ctx(n: u64) -> Arc<Ctx> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Ctx>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(&n) {
        return c.clone();
    }
    let built = Arc::new(Ctx::build(n));
    cache.lock().unwrap().entry(n).or_insert(built).clone()
}

/// An element of ℚ(ζ_n). Rational elements always carry conductor 1.
#[derive(Clone)]
pub struct Cyclotomic {
    n: u64,
    terms: Vec<(u32, Q)>,
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Cyclotomic {
            n: 1,
            terms: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::from_q(Q::one())
    }

    pub fn from_q(x: Q) -> Self {
        if x.is_zero() {
            Self::zero()
        } else {
            Cyclotomic {
                n: 1,
                terms: vec![(0, x)],
            }
        }
    }

    pub fn from_int(x: i64) -> Self {
        Self::from_q(Q::from_integer(BigInt::from(x)))
    }

    /// ζ_m^k.
    pub fn root(k: i64, m: u64) -> Self {
        assert!(m >= 1);
        let g = gcd(k, m as i64).unsigned_abs().max(1);
        let m2 = m / g;
        let k2 = modp(k / g as i64, m2 as i64) as u64;
        if m2 == 1 {
            return Self::one();
        }
        let c = ctx(m2);
        let terms = c.expand[k2 as usize]
            .iter()
            .map(|&(i, s)| (i, Q::from_integer(BigInt::from(s))))
            .collect();
        Self::normalized(m2, terms)
    }

    /// e(x) = exp(2πi x) for rational x.
    pub fn e(x: &Q) -> Self {
        let den = x.denom().clone();
        let num = x.numer() % &den;
        let den: u64 = den.try_into().expect("phase denominator fits in u64");
        let num: i64 = num.try_into().expect("phase numerator fits in i64");
        Self::root(num, den)
    }

    pub fn conductor(&self) -> u64 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Basis index 0 is the element 1, and coordinates are unique, so an element is rational
    /// exactly when no other index occurs.
    pub fn is_rational(&self) -> bool {
        self.terms.iter().all(|t| t.0 == 0)
    }

    /// The rational value if the element lies in ℚ.
    pub fn to_rational(&self) -> Option<Q> {
        if self.is_rational() {
            Some(self.terms.first().map(|t| t.1.clone()).unwrap_or_else(Q::zero))
        } else {
            None
        }
    }

    fn normalized(n: u64, terms: Vec<(u32, Q)>) -> Self {
        if terms.is_empty() {
            return Self::zero();
        }
        if terms.len() == 1 && terms[0].0 == 0 {
            return Cyclotomic { n: 1, terms };
        }
        Cyclotomic { n, terms }
    }

    /// Re-expresses the element with conductor `m`, a multiple of the current one.
    pub fn lift(&self, m: u64) -> Self {
        assert!(m % self.n == 0, "conductor {} does not divide {}", self.n, m);
        if m == self.n || self.terms.is_empty() {
            return self.clone();
        }
        let src = ctx(self.n);
        let dst = ctx(m);
        let scale = m / self.n;
        let mut terms: Vec<(u32, Q)> = self
            .terms
            .iter()
            .map(|(i, c)| {
                let j = src.basis_exp[*i as usize] * scale % m;
                let e = &dst.expand[j as usize];
                debug_assert!(e.len() == 1 && e[0].1 == 1);
                (e[0].0, c.clone())
            })
            .collect();
        terms.sort_by_key(|t| t.0);
        Cyclotomic { n: m, terms }
    }

    fn common(a: &Self, b: &Self) -> (u64, Self, Self) {
        let m = num_integer::lcm(a.n, b.n);
        (m, a.lift(m), b.lift(m))
    }

    pub fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let (m, a, b) = Self::common(self, other);
        let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < a.terms.len() || j < b.terms.len() {
            if j == b.terms.len() || (i < a.terms.len() && a.terms[i].0 < b.terms[j].0) {
                out.push(a.terms[i].clone());
                i += 1;
            } else if i == a.terms.len() || b.terms[j].0 < a.terms[i].0 {
                out.push(b.terms[j].clone());
                j += 1;
            } else {
                let s = &a.terms[i].1 + &b.terms[j].1;
                if !s.is_zero() {
                    out.push((a.terms[i].0, s));
                }
                i += 1;
                j += 1;
            }
        }
        Self::normalized(m, out)
    }

    pub fn neg(&self) -> Self {
        Cyclotomic {
            n: self.n,
            terms: self.terms.iter().map(|(i, c)| (*i, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, x: &Q) -> Self {
        if x.is_zero() {
            return Self::zero();
        }
        Cyclotomic {
            n: self.n,
            terms: self.terms.iter().map(|(i, c)| (*i, c * x)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if let Some(x) = self.to_rational() {
            return other.scale(&x);
        }
        if let Some(x) = other.to_rational() {
            return self.scale(&x);
        }
        let (m, a, b) = Self::common(self, other);
        let c = ctx(m);
        let mut acc: BTreeMap<u32, Q> = BTreeMap::new();
        for (i1, c1) in &a.terms {
            let j1 = c.basis_exp[*i1 as usize];
            for (i2, c2) in &b.terms {
                let j = (j1 + c.basis_exp[*i2 as usize]) % m;
                let prod = c1 * c2;
                for &(idx, s) in &c.expand[j as usize] {
                    let slot = acc.entry(idx).or_insert_with(Q::zero);
                    if s > 0 {
                        *slot += &prod;
                    } else {
                        *slot -= &prod;
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Self::normalized(m, terms)
    }

    /// Multiplication by ζ_m^k.
    pub fn mul_root(&self, k: i64, m: u64) -> Self {
        self.mul(&Self::root(k, m))
    }

    /// The Galois automorphism ζ ↦ ζ^u, gcd(u, n) = 1.
    pub fn galois(&self, u: i64) -> Self {
        if self.n == 1 {
            return self.clone();
        }
        let n = self.n;
        assert_eq!(gcd(u, n as i64), 1);
        let c = ctx(n);
        let u = modp(u, n as i64) as u64;
        let mut acc: BTreeMap<u32, Q> = BTreeMap::new();
        for (i, v) in &self.terms {
            let j = c.basis_exp[*i as usize] * u % n;
            for &(idx, s) in &c.expand[j as usize] {
                let slot = acc.entry(idx).or_insert_with(Q::zero);
                if s > 0 {
                    *slot += v;
                } else {
                    *slot -= v;
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Self::normalized(n, terms)
    }

    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// If the element is c·ζ_n^j for rational c, returns (c, j).
    pub fn as_scaled_root(&self) -> Option<(Q, u64)> {
        if self.terms.len() == 1 {
            let c = ctx(self.n);
            let (i, v) = &self.terms[0];
            let j = c.basis_exp[*i as usize];
            return Some((v.clone(), j));
        }
        None
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(x) = self.to_rational() {
            return Some(Self::from_q(Q::one() / x));
        }
        if let Some((v, j)) = self.as_scaled_root() {
            return Some(Self::root(-(j as i64), self.n).scale(&(Q::one() / v)));
        }
        // x⁻¹ = (∏_{σ≠1} σ(x)) / N(x)
        let n = self.n;
        let mut others = Self::one();
        for u in 2..n as i64 {
            if gcd(u, n as i64) == 1 {
                others = others.mul(&self.galois(u));
            }
        }
        let norm = self.mul(&others);
        let norm = norm.to_rational().expect("norm is rational");
        Some(others.scale(&(Q::one() / norm)))
    }

    /// √m for a nonnegative integer m, built from Gauss sums.
    pub fn sqrt_int(m: u64) -> Self {
        if m == 0 {
            return Self::zero();
        }
        let mut square = 1i64;
        let mut out = Self::one();
        for (p, e) in factorize(m) {
            square *= (p as i64).pow(e / 2);
            if e % 2 == 1 {
                out = out.mul(&sqrt_prime(p));
            }
        }
        out.scale(&Q::from_integer(BigInt::from(square)))
    }

    /// √x for a nonnegative rational x.
    pub fn sqrt_q(x: &Q) -> Self {
        assert!(!x.is_negative());
        let n: u64 = x.numer().try_into().expect("numerator fits");
        let d: u64 = x.denom().try_into().expect("denominator fits");
        Self::sqrt_int(n * d).scale(&q(1, d as i64))
    }

    /// Dense coordinates in the canonical basis, length φ(n).
    pub fn coords(&self) -> Vec<Q> {
        let phi = if self.n == 1 { 1 } else { ctx(self.n).phi };
        let mut v = vec![Q::zero(); phi];
        for (i, c) in &self.terms {
            v[*i as usize] = c.clone();
        }
        v
    }

    /// Terms as (j, c) meaning c·ζ_n^j; the basis elements are distinct roots of unity.
    pub fn root_terms(&self) -> Vec<(u64, Q)> {
        if self.n == 1 {
            return self.terms.iter().map(|(_, c)| (0, c.clone())).collect();
        }
        let c = ctx(self.n);
        self.terms
            .iter()
            .map(|(i, v)| (c.basis_exp[*i as usize], v.clone()))
            .collect()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }
}

fn sqrt_prime(p: u64) -> Cyclotomic {
    if p == 2 {
        return Cyclotomic::root(1, 8).add(&Cyclotomic::root(-1, 8));
    }
    let mut g = Cyclotomic::zero();
    for a in 1..p as i64 {
        let s = super::numtheory::kronecker(a, p as i64);
        let r = Cyclotomic::root(a, p);
        g = if s > 0 { g.add(&r) } else { g.sub(&r) };
    }
    if p % 4 == 1 {
        g
    } else {
        // g² = −p, so √p = −i·g
        g.mul(&Cyclotomic::root(3, 4))
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.n == other.n {
            return self.terms == other.terms;
        }
        let (_, a, b) = Self::common(self, other);
        a.terms == b.terms
    }
}

impl Eq for Cyclotomic {}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(x) = self.to_rational() {
            return write!(f, "{}", super::rational::fmt_q(&x));
        }
        let parts: Vec<String> = self
            .root_terms()
            .iter()
            .map(|(j, c)| format!("({})·ζ{}^{}", super::rational::fmt_q(c), self.n, j))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rational::qi;

    #[test]
    fn i_squared_is_minus_one() {
        let i = Cyclotomic::root(1, 4);
        assert_eq!(i.mul(&i).to_rational(), Some(qi(-1)));
    }

    #[test]
    fn primitive_ninth_roots_sum_to_ramanujan_value() {
        let mut s = Cyclotomic::zero();
        for a in [1, 2, 4, 5, 7, 8] {
            s = s.add(&Cyclotomic::root(a, 9));
        }
        assert_eq!(s.to_rational(), Some(qi(0)));
    }

    #[test]
    fn sixth_root_plus_inverse_is_one() {
        let s = Cyclotomic::root(1, 6).add(&Cyclotomic::root(-1, 6));
        assert_eq!(s.to_rational(), Some(qi(1)));
    }

    #[test]
    fn all_roots_of_unity_sum_to_zero() {
        for n in [2u64, 3, 4, 8, 12, 30, 36, 144] {
            let mut s = Cyclotomic::zero();
            for k in 0..n as i64 {
                s = s.add(&Cyclotomic::root(k, n));
            }
            assert!(s.is_zero(), "n = {n}");
        }
    }

    #[test]
    fn roots_multiply_by_exponent_addition() {
        for n in [5u64, 9, 12, 20, 36, 72] {
            for a in 0..n as i64 {
                for b in [1i64, 7, n as i64 - 1] {
                    let lhs = Cyclotomic::root(a, n).mul(&Cyclotomic::root(b, n));
                    assert_eq!(lhs, Cyclotomic::root(a + b, n));
                }
            }
        }
    }

    #[test]
    fn lifting_preserves_arithmetic() {
        let x = Cyclotomic::root(1, 3).add(&Cyclotomic::from_int(2));
        let y = Cyclotomic::root(1, 4);
        let prod = x.mul(&y);
        assert_eq!(prod.conductor(), 12);
        assert_eq!(prod, x.lift(12).mul(&y.lift(12)));
        assert_eq!(x.lift(36), x);
    }

    #[test]
    fn square_roots_square_correctly() {
        for m in [2u64, 3, 5, 6, 7, 8, 12, 23, 46, 144] {
            let r = Cyclotomic::sqrt_int(m);
            assert_eq!(r.mul(&r).to_rational(), Some(qi(m as i64)), "m = {m}");
            // positive real: fixed by complex conjugation
            assert_eq!(r.conj(), r);
        }
        let r = Cyclotomic::sqrt_q(&q(1, 3));
        assert_eq!(r.mul(&r).to_rational(), Some(q(1, 3)));
    }

    #[test]
    fn general_inverse() {
        let x = Cyclotomic::root(1, 7)
            .add(&Cyclotomic::from_int(3))
            .add(&Cyclotomic::root(3, 7).scale(&q(1, 2)));
        let inv = x.inverse().unwrap();
        assert_eq!(x.mul(&inv), Cyclotomic::one());
    }

    #[test]
    fn coords_have_phi_length() {
        let x = Cyclotomic::root(5, 36);
        assert_eq!(x.coords().len(), 12);
        assert_eq!(Cyclotomic::from_int(4).coords(), vec![qi(4)]);
    }
}
