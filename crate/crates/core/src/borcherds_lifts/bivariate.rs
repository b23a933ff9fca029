//! Truncated series Σ c(n, r, m) qⁿ ζ^r s^m with 0 ≤ n ≤ q_max and 0 ≤ m ≤ s_max.

use crate::exact_algebra::jacobi::{laurent_add, laurent_mul, Laurent};
use crate::exact_algebra::rational::{q_zero, qi};
use crate::exact_algebra::{QJacobi, Q};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bivariate {
    pub q_max: i64,
    pub s_max: i64,
    cells: BTreeMap<(i64, i64), Laurent<Q>>,
}

impl Bivariate {
    pub fn zero(q_max: i64, s_max: i64) -> Self {
        Bivariate { q_max, s_max, cells: BTreeMap::new() }
    }

    pub fn one(q_max: i64, s_max: i64) -> Self {
        let mut b = Self::zero(q_max, s_max);
        b.add_term(0, 0, 0, Q::one());
        b
    }

    fn in_range(&self, n: i64, m: i64) -> bool {
        (0..=self.q_max).contains(&n) && (0..=self.s_max).contains(&m)
    }

    /// Adds c·qⁿζ^r s^m; terms outside the box are dropped.
    pub fn add_term(&mut self, n: i64, r: i64, m: i64, c: Q) {
        if c.is_zero() || !self.in_range(n, m) {
            return;
        }
        let row = BTreeMap::from([(r, c)]);
        self.add_row(n, m, &row, None);
    }

    fn add_row(&mut self, n: i64, m: i64, row: &Laurent<Q>, factor: Option<&Q>) {
        if !self.in_range(n, m) {
            return;
        }
        let cell = self.cells.entry((n, m)).or_default();
        laurent_add(cell, row, factor);
        if cell.is_empty() {
            self.cells.remove(&(n, m));
        }
    }

    /// Coefficient of qⁿζ^r s^m; panics outside the box.
    pub fn coeff(&self, n: i64, r: i64, m: i64) -> Q {
        assert!(self.in_range(n, m), "({n}, {m}) is outside the truncation box");
        self.cells.get(&(n, m)).and_then(|row| row.get(&r)).cloned().unwrap_or_else(q_zero)
    }

    pub fn row(&self, n: i64, m: i64) -> Laurent<Q> {
        self.cells.get(&(n, m)).cloned().unwrap_or_default()
    }

    pub fn cells(&self) -> impl Iterator<Item = (&(i64, i64), &Laurent<Q>)> {
        self.cells.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.cells.is_empty()
    }

    /// Largest ζ-exponent present.
    pub fn max_r(&self) -> Option<i64> {
        self.cells.values().filter_map(|row| row.keys().next_back().copied()).max()
    }

    pub fn min_r(&self) -> Option<i64> {
        self.cells.values().filter_map(|row| row.keys().next().copied()).min()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.restrict(self.q_max.min(other.q_max), self.s_max.min(other.s_max));
        for (&(n, m), row) in &other.cells {
            out.add_row(n, m, row, None);
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero(self.q_max, self.s_max);
        for (&(n, m), row) in &self.cells {
            out.add_row(n, m, row, Some(c));
        }
        out
    }

    /// Shrinks the box.
    pub fn restrict(&self, q_max: i64, s_max: i64) -> Self {
        let mut out = Self::zero(q_max, s_max);
        out.cells = self.cells.iter().filter(|(k, _)| out.in_range(k.0, k.1)).map(|(k, v)| (*k, v.clone())).collect();
        out
    }

    /// Widens the box without adding cells; the caller vouches that the new cells are not needed.
    pub fn enlarge(&self, q_max: i64, s_max: i64) -> Self {
        assert!(q_max >= self.q_max && s_max >= self.s_max);
        Bivariate { q_max, s_max, cells: self.cells.clone() }
    }

    /// Multiplies by q^a ζ^b s^c, keeping the box.
    pub fn shift(&self, a: i64, b: i64, c: i64) -> Self {
        let mut out = Self::zero(self.q_max, self.s_max);
        for (&(n, m), row) in &self.cells {
            let moved: Laurent<Q> = row.iter().map(|(r, v)| (r + b, v.clone())).collect();
            out.add_row(n + a, m + c, &moved, None);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.q_max.min(other.q_max), self.s_max.min(other.s_max));
        for (&(n1, m1), r1) in &self.cells {
            for (&(n2, m2), r2) in &other.cells {
                if out.in_range(n1 + n2, m1 + m2) {
                    out.add_row(n1 + n2, m1 + m2, &laurent_mul(r1, r2), None);
                }
            }
        }
        out
    }

    /// Multiplies every cell by a Laurent polynomial in ζ.
    pub fn mul_laurent(&self, p: &Laurent<Q>) -> Self {
        let mut out = Self::zero(self.q_max, self.s_max);
        for (&(n, m), row) in &self.cells {
            out.add_row(n, m, &laurent_mul(row, p), None);
        }
        out
    }

    /// Multiplies by (1 − qⁿζ^r s^m)^e for (n, m) ≠ (0, 0) through the binomial series.
    pub fn mul_binomial(&self, n: i64, r: i64, m: i64, e: &Q) -> Self {
        assert!(n >= 0 && m >= 0 && n + m > 0);
        let kmax = [(n, self.q_max), (m, self.s_max)]
            .iter()
            .filter(|(step, _)| *step > 0)
            .map(|(step, max)| max / step)
            .min()
            .unwrap();
        let mut out = self.clone();
        let mut binom = Q::one();
        for k in 1..=kmax {
            // binom(e, k)·(−1)^k
            binom = binom * (e - qi(k - 1)) / qi(k);
            let c = if k % 2 == 0 { binom.clone() } else { -binom.clone() };
            if c.is_zero() {
                break;
            }
            out = out.add(&self.shift(k * n, k * r, k * m).scale(&c));
        }
        out
    }

    /// exp of a series without q⁰s⁰ term, from D(exp L) = exp L · D(L) with D(qⁿs^m) = (n + m)qⁿs^m.
    pub fn exp(&self) -> Self {
        assert!(!self.cells.contains_key(&(0, 0)), "exp needs a series without constant cell");
        let mut out = Self::one(self.q_max, self.s_max);
        let mut order: Vec<(i64, i64)> =
            (0..=self.q_max).flat_map(|n| (0..=self.s_max).map(move |m| (n, m))).collect();
        order.sort_by_key(|&(n, m)| (n + m, n));
        for &(n, m) in order.iter().skip(1) {
            let mut acc: Laurent<Q> = BTreeMap::new();
            for (&(n1, m1), l) in &self.cells {
                if n1 <= n && m1 <= m {
                    if let Some(e) = out.cells.get(&(n - n1, m - m1)) {
                        laurent_add(&mut acc, &laurent_mul(l, e), Some(&qi(n1 + m1)));
                    }
                }
            }
            let inv = Q::one() / qi(n + m);
            out.add_row(n, m, &acc, Some(&inv));
        }
        out
    }

    /// Drops every ζ^r with r outside [lo, hi].
    pub fn clip_r(&self, lo: i64, hi: i64) -> Self {
        let mut out = self.clone();
        for row in out.cells.values_mut() {
            row.retain(|r, _| (lo..=hi).contains(r));
        }
        out.cells.retain(|_, row| !row.is_empty());
        out
    }

    /// Coefficients with non-integral values.
    pub fn non_integral(&self) -> Vec<(i64, i64, i64)> {
        let mut bad = Vec::new();
        for (&(n, m), row) in &self.cells {
            for (r, v) in row {
                if !v.is_integer() {
                    bad.push((n, *r, m));
                }
            }
        }
        bad
    }

    /// The Jacobi series Σ_n c(n, r, m) qⁿζ^r for fixed m, known below q^{q_max+1}.
    pub fn fj_coefficient(&self, m: i64) -> QJacobi {
        let terms = self
            .cells
            .iter()
            .filter(|((_, mm), _)| *mm == m)
            .flat_map(|(&(n, _), row)| row.iter().map(move |(r, v)| (n, *r, v.clone())));
        QJacobi::from_terms(1, 1, terms, Some(qi(self.q_max + 1)))
    }

    /// Builds from Jacobi series: m ↦ φ_m placed at s^m.
    pub fn from_fj(coeffs: &BTreeMap<i64, QJacobi>, q_max: i64, s_max: i64) -> Self {
        let mut out = Self::zero(q_max, s_max);
        for (&m, phi) in coeffs {
            for (n, r, c) in phi.terms() {
                assert!(n.is_integer() && r.is_integer(), "integral exponents expected");
                let n = n.to_integer().try_into().unwrap();
                let r = r.to_integer().try_into().unwrap();
                out.add_term(n, r, m, c);
            }
        }
        out
    }

    /// Coefficients where r ↦ −r symmetry (with sign ±1) fails.
    pub fn parity_defects(&self, sign: i64) -> Vec<(i64, i64, i64)> {
        let mut bad = Vec::new();
        for (&(n, m), row) in &self.cells {
            for (r, v) in row {
                let w = row.get(&-r).cloned().unwrap_or_else(q_zero);
                if *v != w * qi(sign) {
                    bad.push((n, *r, m));
                }
            }
        }
        bad
    }

    /// Largest |coefficient| numerator, a crude size measure for reports.
    pub fn height(&self) -> Q {
        self.cells.values().flat_map(|row| row.values()).map(|v| v.abs()).max().unwrap_or_else(q_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_inverts() {
        let one = Bivariate::one(4, 3);
        let a = one.mul_binomial(1, 2, 1, &qi(3));
        let b = a.mul_binomial(1, 2, 1, &qi(-3));
        assert_eq!(b, one);
        assert_eq!(a.coeff(2, 4, 2), qi(3));
    }

    #[test]
    fn exp_of_log_one_minus() {
        // exp(−Σ_k x^k/k) = 1 − x for x = qζs⁰
        let mut l = Bivariate::zero(5, 2);
        for k in 1..=5 {
            l.add_term(k, k, 0, -Q::one() / qi(k));
        }
        let want = Bivariate::one(5, 2).mul_binomial(1, 1, 0, &qi(1));
        assert_eq!(l.exp(), want);
    }

    #[test]
    fn exp_mixed_directions() {
        let mut l = Bivariate::zero(3, 3);
        l.add_term(0, 1, 1, qi(2));
        l.add_term(1, -1, 0, qi(1));
        let e = l.exp();
        // coefficient of q s ζ⁰: 2·1 from (2ζs)(q ζ⁻¹)
        assert_eq!(e.coeff(1, 0, 1), qi(2));
        assert_eq!(e.coeff(0, 2, 2), qi(2));
        assert_eq!(e.coeff(2, -2, 0), Q::one() / qi(2));
    }
}
