//! Truncated series in q whose coefficients are Laurent polynomials in ζ.

use super::coeff::Coeff;
use super::cyclotomic::Cyclotomic;
use super::rational::{fmt_q, q, q_zero, Q};
use super::series::FracSeries;
use super::AlgebraError;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;

pub type Laurent<C> = BTreeMap<i64, C>;

pub fn laurent_add<C: Coeff>(acc: &mut Laurent<C>, other: &Laurent<C>, factor: Option<&C>) {
    for (r, v) in other {
        let term = match factor {
            Some(f) => v.mul(f),
            None => v.clone(),
        };
        match acc.get_mut(r) {
            Some(x) => {
                x.add_assign(&term);
                if x.is_zero() {
                    acc.remove(r);
                }
            }
            None => {
                if !term.is_zero() {
                    acc.insert(*r, term);
                }
            }
        }
    }
}

pub fn laurent_mul<C: Coeff>(a: &Laurent<C>, b: &Laurent<C>) -> Laurent<C> {
    let mut out: Laurent<C> = BTreeMap::new();
    for (ra, va) in a {
        for (rb, vb) in b {
            let p = va.mul(vb);
            match out.get_mut(&(ra + rb)) {
                Some(x) => x.add_assign(&p),
                None => {
                    out.insert(ra + rb, p);
                }
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Σ_n Σ_r c(n, r) q^{n/qden} ζ^{r/zden}, known for q-exponents below `trunc`.
#[derive(Clone)]
pub struct JacobiSeries<C: Coeff> {
    qden: u64,
    zden: u64,
    rows: BTreeMap<i64, Laurent<C>>,
    trunc: Option<Q>,
    pub weight: Q,
    pub index: Q,
    pub level: u64,
}

pub type QJacobi = JacobiSeries<Q>;

fn qd(k: i64, den: u64) -> Q {
    q(k, den as i64)
}

fn ceil_units(x: &Q, den: u64) -> i64 {
    (x * Q::from_integer(BigInt::from(den))).ceil().to_integer().to_i64().unwrap()
}

fn min_opt(a: Option<Q>, b: Option<Q>) -> Option<Q> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

impl<C: Coeff> JacobiSeries<C> {
    pub fn zero_to(trunc: Option<Q>) -> Self {
        JacobiSeries {
            qden: 1,
            zden: 1,
            rows: BTreeMap::new(),
            trunc,
            weight: q_zero(),
            index: q_zero(),
            level: 1,
        }
    }

    pub fn one() -> Self {
        Self::monomial(&q_zero(), &q_zero(), C::one())
    }

    /// Exact c·q^n·ζ^r.
    pub fn monomial(n: &Q, r: &Q, c: C) -> Self {
        let mut s = Self::zero_to(None);
        s.qden = n.denom().to_u64().unwrap();
        s.zden = r.denom().to_u64().unwrap();
        if !c.is_zero() {
            let mut row = BTreeMap::new();
            row.insert(r.numer().to_i64().unwrap(), c);
            s.rows.insert(n.numer().to_i64().unwrap(), row);
        }
        s
    }

    /// Builds from (qk, zk, c) triples with the given denominators.
    pub fn from_terms<I: IntoIterator<Item = (i64, i64, C)>>(
        qden: u64,
        zden: u64,
        items: I,
        trunc: Option<Q>,
    ) -> Self {
        let mut s = Self::zero_to(trunc);
        s.qden = qden;
        s.zden = zden;
        for (n, r, c) in items {
            s.add_term(n, r, c);
        }
        s.prune();
        s
    }

    /// A series in q only (ζ-exponent zero).
    pub fn from_scalar(f: &FracSeries<C>) -> Self {
        Self::from_terms(
            f.den(),
            1,
            f.raw_terms().iter().map(|(k, v)| (*k, 0, v.clone())),
            f.trunc().cloned(),
        )
    }

    pub fn with_meta(mut self, weight: Q, index: Q, level: u64) -> Self {
        self.weight = weight;
        self.index = index;
        self.level = level;
        self
    }

    fn add_term(&mut self, n: i64, r: i64, c: C) {
        if c.is_zero() {
            return;
        }
        if let Some(t) = &self.trunc {
            if qd(n, self.qden) >= *t {
                return;
            }
        }
        let row = self.rows.entry(n).or_default();
        match row.get_mut(&r) {
            Some(x) => x.add_assign(&c),
            None => {
                row.insert(r, c);
            }
        }
    }

    fn prune(&mut self) {
        for row in self.rows.values_mut() {
            row.retain(|_, v| !v.is_zero());
        }
        self.rows.retain(|_, row| !row.is_empty());
        let mut gq = self.qden as i64;
        let mut gz = self.zden as i64;
        for (n, row) in &self.rows {
            gq = gq.gcd(n);
            for r in row.keys() {
                gz = gz.gcd(r);
            }
        }
        if self.rows.is_empty() {
            self.qden = 1;
            self.zden = 1;
            return;
        }
        if gq > 1 || gz > 1 {
            self.qden /= gq as u64;
            self.zden /= gz as u64;
            self.rows = std::mem::take(&mut self.rows)
                .into_iter()
                .map(|(n, row)| (n / gq, row.into_iter().map(|(r, v)| (r / gz, v)).collect()))
                .collect();
        }
    }

    pub fn qden(&self) -> u64 {
        self.qden
    }

    pub fn zden(&self) -> u64 {
        self.zden
    }

    pub fn trunc(&self) -> Option<&Q> {
        self.trunc.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows as (q-exponent, map ζ-exponent → coefficient), with ζ-exponents as rationals.
    pub fn rows(&self) -> impl Iterator<Item = (Q, Vec<(Q, &C)>)> + '_ {
        self.rows.iter().map(move |(n, row)| {
            (
                qd(*n, self.qden),
                row.iter().map(|(r, v)| (qd(*r, self.zden), v)).collect(),
            )
        })
    }

    /// Raw rows keyed by n·qden with inner keys r·zden.
    pub fn raw_rows(&self) -> &BTreeMap<i64, Laurent<C>> {
        &self.rows
    }

    /// All terms (n, r, c) with rational exponents.
    pub fn terms(&self) -> Vec<(Q, Q, C)> {
        let mut out = Vec::new();
        for (n, row) in &self.rows {
            for (r, v) in row {
                out.push((qd(*n, self.qden), qd(*r, self.zden), v.clone()));
            }
        }
        out
    }

    pub fn coeff(&self, n: &Q, r: &Q) -> Option<C> {
        if let Some(t) = &self.trunc {
            if n >= t {
                return None;
            }
        }
        let nn = n * Q::from_integer(BigInt::from(self.qden));
        let rr = r * Q::from_integer(BigInt::from(self.zden));
        if !nn.is_integer() || !rr.is_integer() {
            return Some(C::zero());
        }
        let nk = nn.to_integer().to_i64()?;
        let rk = rr.to_integer().to_i64()?;
        Some(
            self.rows
                .get(&nk)
                .and_then(|row| row.get(&rk))
                .cloned()
                .unwrap_or_else(C::zero),
        )
    }

    /// Integer-exponent accessor; panics if exponents are fractional in this series.
    pub fn c(&self, n: i64, r: i64) -> C {
        self.coeff(&Q::from_integer(n.into()), &Q::from_integer(r.into()))
            .unwrap_or_else(|| panic!("coefficient ({n},{r}) is beyond the truncation order"))
    }

    pub fn valuation(&self) -> Option<Q> {
        self.rows.keys().next().map(|n| qd(*n, self.qden))
    }

    fn lower(&self) -> Option<Q> {
        self.valuation().or_else(|| self.trunc.clone())
    }

    pub fn with_dens(&self, qden: u64, zden: u64) -> Self {
        assert!(qden % self.qden == 0 && zden % self.zden == 0);
        let fq = (qden / self.qden) as i64;
        let fz = (zden / self.zden) as i64;
        let mut s = self.clone();
        s.qden = qden;
        s.zden = zden;
        s.rows = self
            .rows
            .iter()
            .map(|(n, row)| (n * fq, row.iter().map(|(r, v)| (r * fz, v.clone())).collect()))
            .collect();
        s
    }

    fn meta_from(mut self, other: &Self) -> Self {
        self.weight = other.weight.clone();
        self.index = other.index.clone();
        self.level = other.level;
        self
    }

    pub fn truncate(&self, order: &Q) -> Self {
        let trunc = min_opt(self.trunc.clone(), Some(order.clone()));
        let t = trunc.clone().unwrap();
        let mut s = self.clone();
        s.rows.retain(|n, _| qd(*n, self.qden) < t);
        s.trunc = trunc;
        s.prune();
        s
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let qden = self.qden.lcm(&other.qden);
        let zden = self.zden.lcm(&other.zden);
        let a = self.with_dens(qden, zden);
        let b = other.with_dens(qden, zden);
        let mut out = JacobiSeries {
            qden,
            zden,
            rows: BTreeMap::new(),
            trunc: min_opt(self.trunc.clone(), other.trunc.clone()),
            weight: self.weight.clone(),
            index: self.index.clone(),
            level: self.level.lcm(&other.level),
        };
        for (n, row) in &a.rows {
            for (r, v) in row {
                out.add_term(*n, *r, v.clone());
            }
        }
        for (n, row) in &b.rows {
            for (r, v) in row {
                out.add_term(*n, *r, if negate { v.neg() } else { v.clone() });
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
        self.scale(&Q::from_integer((-1).into()))
    }

    pub fn scale(&self, x: &Q) -> Self {
        let mut s = self.clone();
        for row in s.rows.values_mut() {
            for v in row.values_mut() {
                *v = v.scale(x);
            }
        }
        s.prune();
        s
    }

    pub fn scale_by(&self, c: &C) -> Self {
        let mut s = self.clone();
        for row in s.rows.values_mut() {
            for v in row.values_mut() {
                *v = v.mul(c);
            }
        }
        s.prune();
        s
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (la, lb) = match (self.lower(), other.lower()) {
            (Some(x), Some(y)) => (x, y),
            _ => {
                return Self::zero_to(None);
            }
        };
        let trunc = min_opt(
            self.trunc.as_ref().map(|t| t + &lb),
            other.trunc.as_ref().map(|t| t + &la),
        );
        let qden = self.qden.lcm(&other.qden);
        let zden = self.zden.lcm(&other.zden);
        let a = self.with_dens(qden, zden);
        let b = other.with_dens(qden, zden);
        let limit = trunc.as_ref().map(|t| ceil_units(t, qden));
        let mut rows: BTreeMap<i64, Laurent<C>> = BTreeMap::new();
        for (na, ra) in &a.rows {
            for (nb, rb) in &b.rows {
                let n = na + nb;
                if let Some(l) = limit {
                    if n >= l {
                        break;
                    }
                }
                let p = laurent_mul(ra, rb);
                laurent_add(rows.entry(n).or_default(), &p, None);
            }
        }
        let mut s = JacobiSeries {
            qden,
            zden,
            rows,
            trunc,
            weight: &self.weight + &other.weight,
            index: &self.index + &other.index,
            level: self.level.lcm(&other.level),
        };
        s.prune();
        s
    }

    /// Product with a series in q alone; weights add.
    pub fn mul_scalar(&self, f: &FracSeries<C>) -> Self {
        let mut g = Self::from_scalar(f);
        g.weight = q_zero();
        g.index = q_zero();
        self.mul(&g).meta_from(self).with_weight_added(&q_zero())
    }

    fn with_weight_added(mut self, w: &Q) -> Self {
        self.weight += w;
        self
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Inverse when the leading q-row is a single ζ-monomial.
    pub fn invert(&self) -> Result<Self, AlgebraError> {
        let t = self.trunc.clone().ok_or(AlgebraError::UnboundedPrecision)?;
        let (&n0, row0) = self.rows.iter().next().ok_or(AlgebraError::ZeroLeadingCoefficient)?;
        if row0.len() != 1 {
            return Err(AlgebraError::NonMonomialLeadingRow);
        }
        let (&r0, c0) = row0.iter().next().unwrap();
        let cinv = c0.inverse().ok_or(AlgebraError::ZeroLeadingCoefficient)?;
        // self = c0 q^{n0} ζ^{r0} (1 + u)
        let mut u: BTreeMap<i64, Laurent<C>> = BTreeMap::new();
        for (n, row) in &self.rows {
            let shifted: Laurent<C> = row.iter().map(|(r, v)| (r - r0, v.mul(&cinv))).collect();
            u.insert(n - n0, shifted);
        }
        let v = qd(n0, self.qden);
        let rel = &t - &v;
        let kmax = ceil_units(&rel, self.qden);
        let mut x: Vec<Laurent<C>> = Vec::new();
        for k in 0..kmax {
            if k == 0 {
                let mut one = BTreeMap::new();
                one.insert(0, C::one());
                x.push(one);
                continue;
            }
            let mut acc: Laurent<C> = BTreeMap::new();
            for (i, ui) in u.range(1..=k) {
                let p = laurent_mul(ui, &x[(k - i) as usize]);
                laurent_add(&mut acc, &p, None);
            }
            let negated: Laurent<C> = acc.into_iter().map(|(r, v)| (r, v.neg())).collect();
            x.push(negated);
        }
        let mut out = JacobiSeries {
            qden: self.qden,
            zden: self.zden,
            rows: BTreeMap::new(),
            trunc: Some(&rel - &v),
            weight: -self.weight.clone(),
            index: -self.index.clone(),
            level: self.level,
        };
        for (k, row) in x.into_iter().enumerate() {
            for (r, c) in row {
                out.add_term(k as i64 - n0, r - r0, c.mul(&cinv));
            }
        }
        out.prune();
        Ok(out)
    }

    /// Substitution z ↦ k·z.
    pub fn scale_z(&self, k: i64) -> Self {
        let mut s = self.clone();
        s.rows = self
            .rows
            .iter()
            .map(|(n, row)| (*n, row.iter().map(|(r, v)| (r * k, v.clone())).collect()))
            .collect();
        s.index = &self.index * Q::from_integer((k * k).into());
        s.prune();
        s
    }

    /// Substitution τ ↦ k·τ for a positive integer k.
    pub fn scale_q(&self, k: i64) -> Self {
        let mut s = self.clone();
        s.rows = self.rows.iter().map(|(n, row)| (n * k, row.clone())).collect();
        s.trunc = self.trunc.as_ref().map(|t| t * Q::from_integer(k.into()));
        s.prune();
        s
    }

    /// Multiplication by q^a ζ^b.
    pub fn shift(&self, a: &Q, b: &Q) -> Self {
        let qden = self.qden.lcm(&a.denom().to_u64().unwrap());
        let zden = self.zden.lcm(&b.denom().to_u64().unwrap());
        let s = self.with_dens(qden, zden);
        let da = (a * Q::from_integer(qden.into())).to_integer().to_i64().unwrap();
        let db = (b * Q::from_integer(zden.into())).to_integer().to_i64().unwrap();
        let mut out = s.clone();
        out.rows = s
            .rows
            .into_iter()
            .map(|(n, row)| (n + da, row.into_iter().map(|(r, v)| (r + db, v)).collect()))
            .collect();
        out.trunc = self.trunc.as_ref().map(|t| t + a);
        out.prune();
        out
    }

    pub fn map<D: Coeff, F: Fn(&C) -> D>(&self, f: F) -> JacobiSeries<D> {
        let mut s = JacobiSeries {
            qden: self.qden,
            zden: self.zden,
            rows: self
                .rows
                .iter()
                .map(|(n, row)| (*n, row.iter().map(|(r, v)| (*r, f(v))).collect()))
                .collect(),
            trunc: self.trunc.clone(),
            weight: self.weight.clone(),
            index: self.index.clone(),
            level: self.level,
        };
        s.prune();
        s
    }

    pub fn to_cyclotomic(&self) -> JacobiSeries<Cyclotomic> {
        self.map(|c| c.to_cyclotomic())
    }

    pub fn to_rational(&self) -> Option<QJacobi> {
        let mut rows = BTreeMap::new();
        for (n, row) in &self.rows {
            let mut out = BTreeMap::new();
            for (r, v) in row {
                out.insert(*r, v.rational()?);
            }
            rows.insert(*n, out);
        }
        Some(JacobiSeries {
            qden: self.qden,
            zden: self.zden,
            rows,
            trunc: self.trunc.clone(),
            weight: self.weight.clone(),
            index: self.index.clone(),
            level: self.level,
        })
    }

    /// Coefficientwise equality below `order`, ignoring metadata.
    pub fn agrees_below(&self, other: &Self, order: &Q) -> bool {
        for s in [self, other] {
            if let Some(t) = &s.trunc {
                if t < order {
                    return false;
                }
            }
        }
        let a = self.truncate(order);
        let b = other.truncate(order);
        a.same_terms(&b)
    }

    pub fn same_terms(&self, other: &Self) -> bool {
        let qden = self.qden.lcm(&other.qden);
        let zden = self.zden.lcm(&other.zden);
        self.with_dens(qden, zden).rows == other.with_dens(qden, zden).rows
    }

    /// The q^n row as a Laurent polynomial in ζ keyed by r·zden.
    pub fn row(&self, n: &Q) -> Laurent<C> {
        let nn = n * Q::from_integer(self.qden.into());
        if !nn.is_integer() {
            return BTreeMap::new();
        }
        self.rows
            .get(&nn.to_integer().to_i64().unwrap())
            .cloned()
            .unwrap_or_default()
    }

    pub fn to_json(&self) -> Value {
        let (tn, td) = match &self.trunc {
            Some(t) => (json!(t.numer().to_string()), json!(t.denom().to_string())),
            None => (Value::Null, Value::Null),
        };
        let mut terms = Vec::new();
        for (n, row) in &self.rows {
            for (r, v) in row {
                let c = v.to_cyclotomic();
                let mut t = vec![json!(n), json!(r), json!(c.conductor())];
                t.extend(c.coords().iter().map(|x| json!(fmt_q(x))));
                terms.push(Value::Array(t));
            }
        }
        json!({
            "qDenom": self.qden,
            "zDenom": self.zden,
            "truncNum": tn,
            "truncDen": td,
            "weight": fmt_q(&self.weight),
            "index": fmt_q(&self.index),
            "level": self.level,
            "terms": terms,
        })
    }
}

impl<C: Coeff> PartialEq for JacobiSeries<C> {
    fn eq(&self, other: &Self) -> bool {
        self.trunc == other.trunc && self.same_terms(other)
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for JacobiSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, row) in self.rows() {
            let parts: Vec<String> = row
                .iter()
                .map(|(r, c)| format!("({c})ζ^{}", fmt_q(r)))
                .collect();
            writeln!(f, "q^{}: {}", fmt_q(&n), parts.join(" + "))?;
        }
        if let Some(t) = &self.trunc {
            write!(f, "O(q^{})", fmt_q(t))?;
        }
        Ok(())
    }
}

impl<C: Coeff> fmt::Debug for JacobiSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, row) in self.rows() {
            let parts: Vec<String> = row.iter().map(|(r, c)| format!("{c:?}ζ^{}", fmt_q(r))).collect();
            writeln!(f, "q^{}: {}", fmt_q(&n), parts.join(" + "))?;
        }
        write!(f, "O(q^{:?})", self.trunc.as_ref().map(fmt_q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rational::qi;

    #[test]
    fn monomial_products() {
        let a = QJacobi::monomial(&q(1, 8), &q(1, 2), qi(1));
        let b = QJacobi::monomial(&q(1, 8), &q(-1, 2), qi(-1));
        let p = a.mul(&b);
        assert_eq!(p.c(0, 0), qi(0));
        assert_eq!(p.coeff(&q(1, 4), &qi(0)), Some(qi(-1)));
    }

    #[test]
    fn inverse_with_monomial_leading_row() {
        // 1 − qζ, truncated at q^5
        let a = QJacobi::from_terms(1, 1, [(0, 0, qi(1)), (1, 1, qi(-1))], Some(qi(5)));
        let inv = a.invert().unwrap();
        for k in 0..5 {
            assert_eq!(inv.c(k, k), qi(1));
        }
        assert!(a.mul(&inv).agrees_below(&QJacobi::one(), &qi(5)));
    }
}
