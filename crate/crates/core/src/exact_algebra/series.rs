//! Truncated power series in q with exponents in (1/D)ℤ.

use super::coeff::Coeff;
use super::cyclotomic::Cyclotomic;
use super::rational::{fmt_q, q, q_zero, Q};
use super::AlgebraError;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;

/// Σ c_k q^{k/D}, known for exponents below `trunc` (all exponents when `trunc` is None).
#[derive(Clone)]
pub struct FracSeries<C: Coeff> {
    den: u64,
    terms: BTreeMap<i64, C>,
    trunc: Option<Q>,
}

pub type QSeries = FracSeries<Q>;
pub type CSeries = FracSeries<Cyclotomic>;

fn qd(k: i64, den: u64) -> Q {
    q(k, den as i64)
}

/// Smallest integer k with k/den ≥ x.
fn ceil_units(x: &Q, den: u64) -> i64 {
    let y = x * Q::from_integer(BigInt::from(den));
    y.ceil().to_integer().to_i64().expect("exponent index fits in i64")
}

fn min_opt(a: Option<Q>, b: Option<Q>) -> Option<Q> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if x < y { x } else { y }),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

impl<C: Coeff> FracSeries<C> {
    pub fn zero_to(trunc: Option<Q>) -> Self {
        FracSeries {
            den: 1,
            terms: BTreeMap::new(),
            trunc,
        }
    }

    /// The exact zero series.
    pub fn zero() -> Self {
        Self::zero_to(None)
    }

    pub fn one() -> Self {
        Self::monomial(&q_zero(), C::one())
    }

    /// The exact series c·q^e.
    pub fn monomial(e: &Q, c: C) -> Self {
        let den = e.denom().to_u64().expect("denominator fits");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e.numer().to_i64().expect("numerator fits"), c);
        }
        FracSeries {
            den,
            terms,
            trunc: None,
        }
    }

    /// Builds a series from (k, c) pairs meaning c·q^{k/den}; terms at or above `trunc` are dropped.
    pub fn from_terms<I: IntoIterator<Item = (i64, C)>>(den: u64, items: I, trunc: Option<Q>) -> Self {
        let mut s = FracSeries {
            den,
            terms: BTreeMap::new(),
            trunc,
        };
        for (k, c) in items {
            s.add_term(k, &c);
        }
        s.prune();
        s
    }

    fn add_term(&mut self, k: i64, c: &C) {
        if c.is_zero() {
            return;
        }
        if let Some(t) = &self.trunc {
            if qd(k, self.den) >= *t {
                return;
            }
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                v.add_assign(c);
                if v.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c.clone());
            }
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|_, v| !v.is_zero());
        // Reduce the exponent denominator when possible so equal series compare equal structurally.
        let mut g = self.den as i64;
        for k in self.terms.keys() {
            g = g.gcd(k);
            if g == 1 {
                return;
            }
        }
        if g > 1 && !self.terms.is_empty() {
            let g = g as u64;
            self.den /= g;
            self.terms = std::mem::take(&mut self.terms)
                .into_iter()
                .map(|(k, v)| (k / g as i64, v))
                .collect();
        } else if self.terms.is_empty() {
            self.den = 1;
        }
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn trunc(&self) -> Option<&Q> {
        self.trunc.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Terms as (exponent, coefficient) in increasing exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (Q, &C)> + '_ {
        self.terms.iter().map(move |(k, v)| (qd(*k, self.den), v))
    }

    /// Raw (k, c) pairs meaning c·q^{k/den}.
    pub fn raw_terms(&self) -> &BTreeMap<i64, C> {
        &self.terms
    }

    /// Coefficient of q^e; None if e is at or beyond the truncation order.
    pub fn coeff(&self, e: &Q) -> Option<C> {
        if let Some(t) = &self.trunc {
            if e >= t {
                return None;
            }
        }
        let y = e * Q::from_integer(BigInt::from(self.den));
        if !y.is_integer() {
            return Some(C::zero());
        }
        let k = y.to_integer().to_i64()?;
        Some(self.terms.get(&k).cloned().unwrap_or_else(C::zero))
    }

    pub fn valuation(&self) -> Option<Q> {
        self.terms.keys().next().map(|k| qd(*k, self.den))
    }

    pub fn leading(&self) -> Option<(Q, &C)> {
        self.terms.iter().next().map(|(k, v)| (qd(*k, self.den), v))
    }

    /// Lowest exponent that may carry a nonzero coefficient; None for the exact zero series.
    fn lower(&self) -> Option<Q> {
        self.valuation().or_else(|| self.trunc.clone())
    }

    pub fn with_den(&self, den: u64) -> Self {
        assert!(den % self.den == 0, "denominator {} does not divide {}", self.den, den);
        let f = (den / self.den) as i64;
        FracSeries {
            den,
            terms: self.terms.iter().map(|(k, v)| (k * f, v.clone())).collect(),
            trunc: self.trunc.clone(),
        }
    }

    /// Drops everything at or above `order` and lowers the truncation claim accordingly.
    pub fn truncate(&self, order: &Q) -> Self {
        let trunc = min_opt(self.trunc.clone(), Some(order.clone()));
        let t = trunc.clone().unwrap();
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| qd(**k, self.den) < t)
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        let mut s = FracSeries {
            den: self.den,
            terms,
            trunc,
        };
        s.prune();
        s
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let den = self.den.lcm(&other.den);
        let a = self.with_den(den);
        let b = other.with_den(den);
        let trunc = min_opt(self.trunc.clone(), other.trunc.clone());
        let mut out = FracSeries {
            den,
            terms: BTreeMap::new(),
            trunc,
        };
        for (k, v) in &a.terms {
            out.add_term(*k, v);
        }
        for (k, v) in &b.terms {
            if negate {
                out.add_term(*k, &v.neg());
            } else {
                out.add_term(*k, v);
            }
        }
        out.prune();
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    pub fn neg(&self) -> Self {
        FracSeries {
            den: self.den,
            terms: self.terms.iter().map(|(k, v)| (*k, v.neg())).collect(),
            trunc: self.trunc.clone(),
        }
    }

    pub fn scale(&self, x: &Q) -> Self {
        let mut s = FracSeries {
            den: self.den,
            terms: self.terms.iter().map(|(k, v)| (*k, v.scale(x))).collect(),
            trunc: self.trunc.clone(),
        };
        s.prune();
        s
    }

    pub fn scale_by(&self, c: &C) -> Self {
        let mut s = FracSeries {
            den: self.den,
            terms: self.terms.iter().map(|(k, v)| (*k, v.mul(c))).collect(),
            trunc: self.trunc.clone(),
        };
        s.prune();
        s
    }

    /// Multiplication by q^e.
    pub fn shift(&self, e: &Q) -> Self {
        let ed = e.denom().to_u64().unwrap();
        let den = self.den.lcm(&ed);
        let a = self.with_den(den);
        let off = (e * Q::from_integer(BigInt::from(den))).to_integer().to_i64().unwrap();
        let mut s = FracSeries {
            den,
            terms: a.terms.into_iter().map(|(k, v)| (k + off, v)).collect(),
            trunc: self.trunc.as_ref().map(|t| t + e),
        };
        s.prune();
        s
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (la, lb) = match (self.lower(), other.lower()) {
            (Some(x), Some(y)) => (x, y),
            _ => return Self::zero(),
        };
        let ta = self.trunc.as_ref().map(|t| t + &lb);
        let tb = other.trunc.as_ref().map(|t| t + &la);
        let trunc = min_opt(ta, tb);
        let den = self.den.lcm(&other.den);
        let a = self.with_den(den);
        let b = other.with_den(den);
        let limit = trunc.as_ref().map(|t| ceil_units(t, den));
        let mut acc: BTreeMap<i64, C> = BTreeMap::new();
        for (ka, va) in &a.terms {
            for (kb, vb) in &b.terms {
                let k = ka + kb;
                if let Some(l) = limit {
                    if k >= l {
                        break;
                    }
                }
                let p = va.mul(vb);
                match acc.get_mut(&k) {
                    Some(x) => x.add_assign(&p),
                    None => {
                        acc.insert(k, p);
                    }
                }
            }
        }
        let mut s = FracSeries {
            den,
            terms: acc,
            trunc,
        };
        s.prune();
        s
    }

    pub fn pow(&self, n: i64) -> Result<Self, AlgebraError> {
        if n < 0 {
            return self.invert()?.pow(-n);
        }
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    /// Splits off the leading term: self = c·q^v·(1 + u). Returns (v, c, 1 + u as raw index map, relative precision).
    fn normalize_leading(&self) -> Result<(Q, C, C, BTreeMap<i64, C>), AlgebraError> {
        let (k0, c) = self
            .terms
            .iter()
            .next()
            .map(|(k, v)| (*k, v.clone()))
            .ok_or(AlgebraError::ZeroLeadingCoefficient)?;
        let cinv = c.inverse().ok_or(AlgebraError::ZeroLeadingCoefficient)?;
        let rel: BTreeMap<i64, C> = self
            .terms
            .iter()
            .map(|(k, v)| (k - k0, v.mul(&cinv)))
            .collect();
        Ok((qd(k0, self.den), c, cinv, rel))
    }

    /// Multiplicative inverse; the input must be truncated or a monomial.
    pub fn invert(&self) -> Result<Self, AlgebraError> {
        match &self.trunc {
            Some(_) => self.invert_inner(None),
            None if self.terms.len() == 1 => self.invert_inner(None),
            None => Err(AlgebraError::UnboundedPrecision),
        }
    }

    /// Inverse computed to absolute order `order` (needed when the input is an exact polynomial).
    pub fn invert_to(&self, order: &Q) -> Result<Self, AlgebraError> {
        self.invert_inner(Some(order.clone()))
    }

    fn invert_inner(&self, order: Option<Q>) -> Result<Self, AlgebraError> {
        let (v, _c, cinv, rel) = self.normalize_leading()?;
        let den = self.den;
        // relative precision in units of 1/den
        let rel_trunc: Option<Q> = match (&self.trunc, &order) {
            (Some(t), Some(o)) => Some(std::cmp::min(t - &v, o + &v)),
            (Some(t), None) => Some(t - &v),
            (None, Some(o)) => Some(o + &v),
            (None, None) => None,
        };
        let rel_trunc = match rel_trunc {
            None => {
                // exact monomial
                return Ok(Self::monomial(&(-v), cinv));
            }
            Some(r) => r,
        };
        let kmax = ceil_units(&rel_trunc, den);
        let mut x: Vec<C> = Vec::with_capacity(kmax.max(0) as usize);
        let others: Vec<(i64, &C)> = rel.iter().filter(|(k, _)| **k > 0).map(|(k, v)| (*k, v)).collect();
        for k in 0..kmax {
            if k == 0 {
                x.push(C::one());
                continue;
            }
            let mut acc = C::zero();
            for (i, b) in &others {
                if *i > k {
                    break;
                }
                let xi = &x[(k - i) as usize];
                if !xi.is_zero() {
                    acc.add_assign(&b.mul(xi));
                }
            }
            x.push(acc.neg());
        }
        let body = FracSeries::from_terms(
            den,
            x.into_iter().enumerate().map(|(k, c)| (k as i64, c.mul(&cinv))),
            Some(rel_trunc),
        );
        Ok(body.shift(&(-v)))
    }

    /// exp of a truncated series with strictly positive valuation.
    pub fn exp(&self) -> Result<Self, AlgebraError> {
        if let Some(v) = self.valuation() {
            if !v.is_positive() {
                return Err(AlgebraError::NonpositiveValuation);
            }
        }
        let t = match &self.trunc {
            Some(t) => t.clone(),
            None if self.terms.is_empty() => return Ok(Self::one()),
            None => return Err(AlgebraError::UnboundedPrecision),
        };
        let den = self.den;
        let kmax = ceil_units(&t, den);
        let a: Vec<(i64, &C)> = self.terms.iter().map(|(k, v)| (*k, v)).collect();
        let mut f: Vec<C> = Vec::with_capacity(kmax.max(1) as usize);
        f.push(C::one());
        for k in 1..kmax {
            let mut acc = C::zero();
            for (i, ai) in &a {
                if *i > k {
                    break;
                }
                let fk = &f[(k - i) as usize];
                if !fk.is_zero() {
                    acc.add_assign(&ai.mul(fk).scale(&Q::from_integer(BigInt::from(*i))));
                }
            }
            f.push(acc.scale(&q(1, k)));
        }
        Ok(FracSeries::from_terms(
            den,
            f.into_iter().enumerate().map(|(k, c)| (k as i64, c)),
            Some(t.min(qd(kmax.max(1), den))),
        ))
    }

    /// log of a truncated series with constant term 1 and no negative exponents.
    pub fn log(&self) -> Result<Self, AlgebraError> {
        let t = self.trunc.clone().ok_or(AlgebraError::UnboundedPrecision)?;
        match self.terms.iter().next() {
            Some((0, c)) if *c == C::one() => {}
            _ => return Err(AlgebraError::NotUnitConstant),
        }
        let den = self.den;
        let kmax = ceil_units(&t, den);
        let f: Vec<(i64, &C)> = self.terms.iter().filter(|(k, _)| **k > 0).map(|(k, v)| (*k, v)).collect();
        let fk = |k: i64| self.terms.get(&k);
        let mut g: Vec<C> = vec![C::zero()];
        for k in 1..kmax {
            let mut acc = fk(k).cloned().unwrap_or_else(C::zero).scale(&Q::from_integer(BigInt::from(k)));
            for (i, fi) in &f {
                if *i >= k {
                    break;
                }
                let gi = &g[(k - i) as usize];
                if !gi.is_zero() {
                    acc = acc.sub(&gi.mul(fi).scale(&Q::from_integer(BigInt::from(k - i))));
                }
            }
            g.push(acc.scale(&q(1, k)));
        }
        Ok(FracSeries::from_terms(
            den,
            g.into_iter().enumerate().map(|(k, c)| (k as i64, c)),
            Some(t),
        ))
    }

    /// Substitution q ↦ q^k for rational k > 0.
    pub fn substitute(&self, k: &Q) -> Self {
        assert!(k.is_positive());
        let kn = k.numer().to_i64().unwrap();
        let kd = k.denom().to_u64().unwrap();
        let mut s = FracSeries {
            den: self.den * kd,
            terms: self.terms.iter().map(|(e, v)| (e * kn, v.clone())).collect(),
            trunc: self.trunc.as_ref().map(|t| t * k),
        };
        s.prune();
        s
    }

    pub fn map<D: Coeff, F: Fn(&C) -> D>(&self, f: F) -> FracSeries<D> {
        let mut s = FracSeries {
            den: self.den,
            terms: self.terms.iter().map(|(k, v)| (*k, f(v))).collect(),
            trunc: self.trunc.clone(),
        };
        s.prune();
        s
    }

    pub fn to_cyclotomic(&self) -> CSeries {
        self.map(|c| c.to_cyclotomic())
    }

    /// The same series over ℚ, if every coefficient is rational.
    pub fn to_rational(&self) -> Option<QSeries> {
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            terms.insert(*k, v.rational()?);
        }
        Some(FracSeries {
            den: self.den,
            terms,
            trunc: self.trunc.clone(),
        })
    }

    /// Multiplies the coefficient of q^e by e(e·x).
    pub fn twist(&self, x: &Q) -> CSeries {
        let mut s = FracSeries {
            den: self.den,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (*k, v.to_cyclotomic().mul(&Cyclotomic::e(&(qd(*k, self.den) * x)))))
                .collect(),
            trunc: self.trunc.clone(),
        };
        s.prune();
        s
    }

    /// Equality of all coefficients below `order` (both series must be known there).
    pub fn agrees_below(&self, other: &Self, order: &Q) -> bool {
        for s in [self, other] {
            if let Some(t) = &s.trunc {
                if t < order {
                    return false;
                }
            }
        }
        self.truncate(order) == other.truncate(order)
    }

    /// JSON document {expDenom, truncNum, truncDen, terms:[[expNum, conductor, coords…]]}.
    pub fn to_json(&self) -> Value {
        let (tn, td) = match &self.trunc {
            Some(t) => (json!(t.numer().to_string()), json!(t.denom().to_string())),
            None => (Value::Null, Value::Null),
        };
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(k, v)| {
                let c = v.to_cyclotomic();
                let mut row = vec![json!(k), json!(c.conductor())];
                row.extend(c.coords().iter().map(|x| json!(fmt_q(x))));
                Value::Array(row)
            })
            .collect();
        json!({"expDenom": self.den, "truncNum": tn, "truncDen": td, "terms": terms})
    }
}

impl<C: Coeff> PartialEq for FracSeries<C> {
    fn eq(&self, other: &Self) -> bool {
        if self.trunc != other.trunc {
            return false;
        }
        if self.den == other.den {
            return self.terms == other.terms;
        }
        let den = self.den.lcm(&other.den);
        self.with_den(den).terms == other.with_den(den).terms
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for FracSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .iter()
            .map(|(e, c)| {
                if Zero::is_zero(&e) {
                    format!("{c}")
                } else {
                    format!("({c})·q^{}", fmt_q(&e))
                }
            })
            .collect();
        if parts.is_empty() {
            parts.push("0".into());
        }
        match &self.trunc {
            Some(t) => write!(f, "{} + O(q^{})", parts.join(" + "), fmt_q(t)),
            None => write!(f, "{}", parts.join(" + ")),
        }
    }
}

impl<C: Coeff> fmt::Debug for FracSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(e, c)| format!("{:?}q^{}", c, fmt_q(&e))).collect();
        write!(f, "[{}; O(q^{:?})]", parts.join(", "), self.trunc.as_ref().map(fmt_q))
    }
}

/// Σ c_k q^k over ℚ with integer exponents from a coefficient slice, truncated at len.
pub fn qseries_from_ints(coeffs: &[i64]) -> QSeries {
    FracSeries::from_terms(
        1,
        coeffs.iter().enumerate().map(|(k, c)| (k as i64, Q::from_integer(BigInt::from(*c)))),
        Some(Q::from_integer(BigInt::from(coeffs.len() as i64))),
    )
}

/// Checks that the truncation order is an integer multiple of 1/den and returns the unit count.
pub fn units_below(order: &Q, den: u64) -> i64 {
    ceil_units(order, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rational::qi;

    fn poly(cs: &[i64]) -> QSeries {
        FracSeries::from_terms(1, cs.iter().enumerate().map(|(k, c)| (k as i64, qi(*c))), None)
    }

    #[test]
    fn product_of_exact_polynomials() {
        let a = poly(&[1, -1]);
        let b = poly(&[1, 1, 1]);
        assert_eq!(a.mul(&b), poly(&[1, 0, 0, -1]));
        let bt = b.truncate(&qi(3));
        let p = a.mul(&bt);
        assert_eq!(p.trunc(), Some(&qi(3)));
        assert_eq!(p, poly(&[1]).truncate(&qi(3)));
    }

    #[test]
    fn pentagonal_product() {
        let mut p = QSeries::one().truncate(&qi(13));
        for n in 1..=12 {
            p = p.mul(&FracSeries::from_terms(1, [(0, qi(1)), (n, qi(-1))], None));
        }
        let expect = FracSeries::from_terms(
            1,
            [(0, qi(1)), (1, qi(-1)), (2, qi(-1)), (5, qi(1)), (7, qi(1)), (12, qi(-1))],
            Some(qi(13)),
        );
        assert_eq!(p, expect);
    }

    #[test]
    fn fractional_exponents_add() {
        let a = QSeries::monomial(&q(1, 24), qi(1));
        let b = QSeries::monomial(&q(1, 8), qi(1));
        let c = a.mul(&b);
        assert_eq!(c.valuation(), Some(q(1, 6)));
        assert_eq!(c.with_den(24).den(), 24);
    }

    #[test]
    fn geometric_inverse() {
        let a = poly(&[1, -1]).truncate(&qi(6));
        let inv = a.invert().unwrap();
        assert_eq!(inv, poly(&[1, 1, 1, 1, 1, 1]).truncate(&qi(6)));
        assert_eq!(a.mul(&inv), QSeries::one().truncate(&qi(6)));
    }

    #[test]
    fn exp_taylor() {
        let x = QSeries::monomial(&qi(1), qi(1)).truncate(&qi(4));
        let e = x.exp().unwrap();
        let expect = FracSeries::from_terms(
            1,
            [(0, qi(1)), (1, qi(1)), (2, q(1, 2)), (3, q(1, 6))],
            Some(qi(4)),
        );
        assert_eq!(e, expect);
        assert_eq!(QSeries::zero().exp().unwrap(), QSeries::one());
    }

    #[test]
    fn exp_of_minus_log_series_is_one_minus_x() {
        let order = qi(9);
        let mut s = QSeries::zero_to(Some(order.clone()));
        for a in 1..9 {
            s = s.add(&QSeries::monomial(&qi(a), q(-1, a)));
        }
        let e = s.exp().unwrap();
        assert_eq!(e, poly(&[1, -1]).truncate(&order));
    }

    #[test]
    fn log_inverts_exp() {
        let x = FracSeries::from_terms(3, [(1, q(2, 3)), (2, qi(-5)), (7, qi(1))], Some(qi(4)));
        let back = x.exp().unwrap().log().unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn substitution_and_shift() {
        let a = poly(&[1, 2]).truncate(&qi(5));
        let b = a.substitute(&qi(3)).shift(&q(1, 8));
        assert_eq!(b.coeff(&(qi(3) + q(1, 8))), Some(qi(2)));
        assert_eq!(b.trunc(), Some(&(qi(15) + q(1, 8))));
    }

    #[test]
    fn json_is_stable() {
        let a = FracSeries::from_terms(24, [(1, qi(1)), (25, qi(-1))], Some(q(49, 24)));
        let j = a.to_json().to_string();
        assert_eq!(
            j,
            r#"{"expDenom":24,"terms":[[1,1,"1"],[25,1,"-1"]],"truncDen":"24","truncNum":"49"}"#
        );
    }
}
