//! Dedekind η, its powers, and eta quotients.

use crate::exact_algebra::numtheory::chi12;
use crate::exact_algebra::rational::{fmt_q, q, qi};
use crate::exact_algebra::{FracSeries, QSeries, Q};
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// η(scale·τ) = Σ_{n≥1} (12/n) q^{scale·n²/24}.
pub fn eta_series(scale: u64, trunc: &Q) -> QSeries {
    assert!(trunc.is_positive());
    let mut terms = Vec::new();
    let mut n = 1i64;
    loop {
        let e = q(scale as i64 * n * n, 24);
        if e >= *trunc {
            break;
        }
        let c = chi12(n);
        if c != 0 {
            terms.push((scale as i64 * n * n, qi(c)));
        }
        n += 1;
    }
    FracSeries::from_terms(24, terms, Some(trunc.clone()))
}

/// P_b(x) = ∏_{n≥1} (1 − xⁿ)^b as a power series in x, known below x^len.
pub fn euler_power(b: i64, len: usize) -> Arc<QSeries> {
    static CACHE: OnceLock<Mutex<HashMap<(i64, usize), Arc<QSeries>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().unwrap().get(&(b, len)) {
        return s.clone();
    }
    let built = Arc::new(euler_power_uncached(b, len));
    cache.lock().unwrap().entry((b, len)).or_insert(built).clone()
}

fn euler_power_uncached(b: i64, len: usize) -> QSeries {
    let order = qi(len as i64);
    if len == 0 {
        return QSeries::zero_to(Some(order));
    }
    // pentagonal expansion of ∏(1 − xⁿ)
    let mut terms = Vec::new();
    let mut k = 0i64;
    loop {
        let mut any = false;
        for kk in if k == 0 { vec![0] } else { vec![k, -k] } {
            let e = kk * (3 * kk - 1) / 2;
            if (e as usize) < len {
                any = true;
                terms.push((e, qi(if kk % 2 == 0 { 1 } else { -1 })));
            }
        }
        if !any {
            break;
        }
        k += 1;
    }
    let base = FracSeries::from_terms(1, terms, Some(order));
    base.pow(b).expect("Euler product is a unit")
}

/// η(scale·τ)^b known below q^trunc.
pub fn eta_power(scale: u64, b: i64, trunc: &Q) -> QSeries {
    let lead = q(scale as i64 * b, 24);
    if *trunc <= lead {
        return QSeries::zero_to(Some(trunc.clone()));
    }
    let len = ((trunc - &lead) / qi(scale as i64)).ceil().to_integer().to_usize().unwrap();
    euler_power(b, len)
        .substitute(&qi(scale as i64))
        .shift(&lead)
        .truncate(trunc)
}

/// ∏_k η(kτ)^{b_k} times a rational prefactor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EtaQuotient {
    pub factors: Vec<(u64, i64)>,
    pub prefactor: Q,
}

impl EtaQuotient {
    pub fn new(mut factors: Vec<(u64, i64)>, prefactor: Q) -> Self {
        factors.retain(|f| f.1 != 0);
        factors.sort_unstable();
        for w in factors.windows(2) {
            assert!(w[0].0 < w[1].0, "eta quotient scales must be distinct");
        }
        EtaQuotient { factors, prefactor }
    }

    /// Weight ½Σ b_k.
    pub fn weight(&self) -> Q {
        q(self.factors.iter().map(|f| f.1).sum(), 2)
    }

    /// Order at ∞: (1/24)Σ k·b_k.
    pub fn leading_exponent(&self) -> Q {
        q(self.factors.iter().map(|f| f.0 as i64 * f.1).sum(), 24)
    }

    pub fn scales_lcm(&self) -> u64 {
        self.factors.iter().fold(1, |a, f| num_integer::lcm(a, f.0))
    }

    /// Expansion at ∞ known below q^trunc.
    pub fn series(&self, trunc: &Q) -> QSeries {
        let lead = self.leading_exponent();
        if *trunc <= lead {
            return QSeries::zero_to(Some(trunc.clone()));
        }
        let rel = trunc - &lead;
        let mut out = QSeries::one();
        for &(k, b) in &self.factors {
            // η(kτ)^b / q^{kb/24} known below rel
            let own = q(k as i64 * b, 24);
            let f = eta_power(k, b, &(&rel + &own)).shift(&(-own));
            out = out.mul(&f);
        }
        out.shift(&lead).scale(&self.prefactor)
    }

    pub fn describe(&self) -> String {
        let mut s = if self.prefactor == qi(1) {
            String::new()
        } else {
            format!("{}·", fmt_q(&self.prefactor))
        };
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(k, b)| {
                let base = if *k == 1 { "η(τ)".to_string() } else { format!("η({k}τ)") };
                if *b == 1 {
                    base
                } else {
                    format!("{base}^{b}")
                }
            })
            .collect();
        s.push_str(&parts.join(""));
        if self.factors.is_empty() {
            s.push('1');
        }
        s
    }

    /// The quadratic character of an eta quotient on Γ₀(N): d ↦ ((−1)^k ∏ k^{b_k} / d), k the weight.
    pub fn character_discriminant(&self) -> i64 {
        let w = self.weight();
        assert!(w.is_integer(), "character is defined for integral weight");
        let k = w.to_integer().to_i64().unwrap();
        let mut s: i64 = if k % 2 == 0 { 1 } else { -1 };
        for &(t, b) in &self.factors {
            if b.abs() % 2 == 1 {
                s *= t as i64;
            }
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.prefactor.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::series::qseries_from_ints;

    #[test]
    fn eta_matches_pentagonal_numbers() {
        let e = eta_series(1, &qi(6)).shift(&q(-1, 24));
        let p = qseries_from_ints(&[1, -1, -1, 0, 0, 1]);
        assert!(e.agrees_below(&p, &qi(5)));
        assert_eq!(e.coeff(&qi(7)), None);
    }

    #[test]
    fn eta_product_form_agrees_with_sum_form() {
        let t = qi(12);
        assert_eq!(eta_series(1, &t), eta_power(1, 1, &t));
        assert_eq!(eta_series(3, &t), eta_power(3, 1, &t));
    }

    #[test]
    fn eta_three_tau_to_the_eighth() {
        let s = eta_power(3, 8, &qi(8));
        assert_eq!(s.valuation(), Some(qi(1)));
        assert_eq!(s.coeff(&qi(1)), Some(qi(1)));
        assert_eq!(s.coeff(&qi(4)), Some(qi(-8)));
        assert_eq!(s.coeff(&qi(7)), Some(qi(20)));
        assert_eq!(s.coeff(&qi(2)), Some(qi(0)));
    }

    #[test]
    fn delta_coefficients() {
        let d = eta_power(1, 24, &qi(5));
        for (n, c) in [(1, 1), (2, -24), (3, 252), (4, -1472)] {
            assert_eq!(d.coeff(&qi(n)), Some(qi(c)));
        }
    }

    #[test]
    fn eta_quotient_leading_terms() {
        let e2a = EtaQuotient::new(vec![(1, 8), (2, 8)], qi(1));
        assert_eq!(e2a.leading_exponent(), qi(1));
        assert_eq!(e2a.weight(), qi(8));
        let s = e2a.series(&qi(3));
        assert_eq!(s.coeff(&qi(1)), Some(qi(1)));
        assert_eq!(s.coeff(&qi(2)), Some(qi(-8)));
        let f4c = EtaQuotient::new(vec![(2, 4), (4, -4), (8, 4)], qi(16));
        let s = f4c.series(&qi(3));
        assert_eq!(s.valuation(), Some(qi(1)));
        assert_eq!(s.coeff(&qi(1)), Some(qi(16)));
        let f3b = EtaQuotient::new(vec![(1, 3), (3, -2), (9, 3)], qi(18));
        assert_eq!(f3b.series(&qi(2)).coeff(&qi(1)), Some(qi(18)));
    }

    #[test]
    fn negative_powers_invert() {
        let t = qi(10);
        let a = eta_power(1, 6, &t);
        let b = eta_power(1, -6, &(t.clone() - qi(1) / qi(2)));
        let p = a.mul(&b);
        assert!(p.agrees_below(&QSeries::one(), &qi(9)));
    }
}
