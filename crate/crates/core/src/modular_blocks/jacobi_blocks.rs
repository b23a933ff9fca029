//! ϑ, the weak Jacobi forms φ₋₂,₁ and φ₀,₁, and generalized theta blocks.

use super::eta::{eta_power, euler_power};
use crate::exact_algebra::numtheory::{chi4, divisors};
use crate::exact_algebra::rational::{q, qi};
use crate::exact_algebra::{QJacobi, Q};
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum BlockError {
    #[error("{name} failed anchor validation at q^{n}: {detail}")]
    AnchorMismatch { name: &'static str, n: i64, detail: String },
    #[error("theta block exponent for scale {0} is not integral")]
    NonIntegralExponent(u64),
}

/// ϑ(τ, z) = Σ_{n≥1} (−4/n) q^{n²/8} (ζ^{n/2} − ζ^{−n/2}).
pub fn theta_series(trunc: &Q) -> QJacobi {
    assert!(trunc.is_positive());
    let mut terms = Vec::new();
    let mut n = 1i64;
    while q(n * n, 8) < *trunc {
        let c = chi4(n);
        if c != 0 {
            terms.push((n * n, n, qi(c)));
            terms.push((n * n, -n, qi(-c)));
        }
        n += 1;
    }
    QJacobi::from_terms(8, 2, terms, Some(trunc.clone())).with_meta(q(1, 2), q(1, 2), 1)
}

/// ϑ from its product form q^{1/8}(ζ^{1/2} − ζ^{−1/2}) ∏ (1 − qⁿ)(1 − qⁿζ)(1 − qⁿζ⁻¹).
pub fn theta_product(trunc: &Q) -> QJacobi {
    let rel = trunc - q(1, 8);
    let nmax = rel.ceil().to_integer().to_i64().unwrap().max(0);
    let mut p = QJacobi::one().truncate(&rel);
    for n in 1..nmax {
        for r in [0, 1, -1] {
            let f = QJacobi::from_terms(1, 1, [(0, 0, qi(1)), (n, r, qi(-1))], None);
            p = p.mul(&f);
        }
    }
    let lead = QJacobi::from_terms(8, 2, [(1, 1, qi(1)), (1, -1, qi(-1))], None);
    lead.mul(&p).with_meta(q(1, 2), q(1, 2), 1)
}

/// ∏_{n≥1} (1 − qⁿζ)²(1 − qⁿζ⁻¹)²/(1 − qⁿ)⁴ known below q^trunc.
fn phi_product_part(trunc: i64) -> QJacobi {
    let t = qi(trunc);
    let mut p = QJacobi::one().truncate(&t);
    for n in 1..trunc {
        for r in [1, -1] {
            let f = QJacobi::from_terms(1, 1, [(0, 0, qi(1)), (n, r, qi(-1))], None);
            p = p.mul(&f).mul(&f);
        }
    }
    let inv_eta = QJacobi::from_scalar(&euler_power(-4, trunc as usize));
    p.mul(&inv_eta)
}

fn cached(kind: u8, trunc: i64, build: impl FnOnce() -> QJacobi) -> Arc<QJacobi> {
    static CACHE: OnceLock<Mutex<HashMap<(u8, i64), Arc<QJacobi>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().unwrap().get(&(kind, trunc)) {
        return s.clone();
    }
    let built = Arc::new(build());
    cache.lock().unwrap().entry((kind, trunc)).or_insert(built).clone()
}

/// φ₋₂,₁ = ϑ²/η⁶ known below q^trunc.
pub fn phi_m2(trunc: i64) -> Arc<QJacobi> {
    cached(0, trunc, || {
        let t = qi(trunc);
        let th = theta_series(&(&t + q(1, 4)));
        let inv = eta_power(1, -6, &(&t - q(1, 4)));
        th.mul(&th)
            .mul_scalar(&inv)
            .to_rational()
            .unwrap()
            .truncate(&t)
            .with_meta(qi(-2), qi(1), 1)
    })
}

/// φ₀,₁ known below q^trunc, validated against its q⁰–q² anchors and the index-1 symmetry.
///
/// Built from the ℘-function: φ₀,₁ = P·[(ζ − 2 + ζ⁻¹)(1 + 12S) + 12] with
/// P = ∏(1 − qⁿζ)²(1 − qⁿζ⁻¹)²/(1 − qⁿ)⁴ and S = Σ_n Σ_{d|n} d(ζ^d − 2 + ζ^{−d}) qⁿ.
pub fn phi_0(trunc: i64) -> Arc<QJacobi> {
    cached(1, trunc, || {
        let s = build_phi_0(trunc);
        validate_phi_0(&s).expect("φ₀,₁ construction failed validation");
        s
    })
}

fn build_phi_0(trunc: i64) -> QJacobi {
    let t = qi(trunc);
    let p = phi_product_part(trunc);
    let mut sterms = Vec::new();
    for n in 1..trunc {
        for d in divisors(n as u64) {
            let d = d as i64;
            sterms.push((n, d, qi(d)));
            sterms.push((n, 0, qi(-2 * d)));
            sterms.push((n, -d, qi(d)));
        }
    }
    let s = QJacobi::from_terms(1, 1, sterms, Some(t.clone()));
    let b0 = QJacobi::from_terms(1, 1, [(0, 1, qi(1)), (0, 0, qi(-2)), (0, -1, qi(1))], None);
    let bracket = b0
        .mul(&QJacobi::one().add(&s.scale(&qi(12))))
        .add(&QJacobi::one().scale(&qi(12)));
    p.mul(&bracket).truncate(&t).with_meta(qi(0), qi(1), 1)
}

/// Anchors: q⁰ row ζ + 10 + ζ⁻¹, q¹ row 10ζ^{±2} − 64ζ^{±1} + 108, q² row ζ^{±3} + 108ζ^{±2} − 513ζ^{±1} + 808.
pub fn validate_phi_0(s: &QJacobi) -> Result<(), BlockError> {
    let anchors: [(i64, &[(i64, i64)]); 3] = [
        (0, &[(1, 1), (0, 10)]),
        (1, &[(2, 10), (1, -64), (0, 108)]),
        (2, &[(3, 1), (2, 108), (1, -513), (0, 808)]),
    ];
    for (n, row) in anchors {
        if s.trunc().map(|t| *t <= qi(n)).unwrap_or(false) {
            break;
        }
        for &(r, c) in row {
            for rr in [r, -r] {
                let got = s.c(n, rr);
                if got != qi(c) {
                    return Err(BlockError::AnchorMismatch {
                        name: "φ₀,₁",
                        n,
                        detail: format!("ζ^{rr}: expected {c}, got {got}"),
                    });
                }
            }
        }
    }
    check_index_one(s).map_err(|detail| BlockError::AnchorMismatch {
        name: "φ₀,₁",
        n: -1,
        detail,
    })
}

/// c(n, r) depends only on 4n − r² (and r mod 2) for an index-1 form.
pub fn check_index_one(s: &QJacobi) -> Result<(), String> {
    let mut seen: BTreeMap<i64, Q> = BTreeMap::new();
    for (n, r, c) in s.terms() {
        if !n.is_integer() || !r.is_integer() {
            return Err(format!("fractional exponent q^{n} ζ^{r}"));
        }
        let n = n.to_integer().to_i64().unwrap();
        let r = r.to_integer().to_i64().unwrap();
        let other = s.c(n, -r);
        if other != c {
            return Err(format!("c({n},{r}) ≠ c({n},{})", -r));
        }
        let disc = 4 * n - r * r;
        if let Some(prev) = seen.get(&disc) {
            if *prev != c {
                return Err(format!("c({n},{r}) = {c} but another coefficient at 4n−r² = {disc} is {prev}"));
            }
        } else {
            seen.insert(disc, c);
        }
    }
    Ok(())
}

/// Generalized theta block ∏_d η(dτ)^{m_d(0)} ∏_{r>0} (ϑ(dτ, d·r·z)/η(dτ))^{m_d(r)}.
pub fn theta_block(mult: &BTreeMap<u64, BTreeMap<i64, i64>>, trunc: &Q) -> Result<QJacobi, BlockError> {
    // Total leading exponent, so each factor is computed to the right relative order.
    let mut lead = Q::zero();
    let mut factors: Vec<(u64, i64, i64)> = Vec::new(); // (d, r, exponent); r = 0 means η
    for (&d, row) in mult {
        let mut eta_exp = row.get(&0).copied().unwrap_or(0);
        for (&r, &m) in row {
            if r > 0 && m != 0 {
                factors.push((d, r, m));
                eta_exp -= m;
            }
        }
        if eta_exp != 0 {
            factors.push((d, 0, eta_exp));
        }
    }
    for &(d, r, m) in &factors {
        lead += if r == 0 { q(d as i64 * m, 24) } else { q(d as i64 * m, 8) };
    }
    if *trunc <= lead {
        return Ok(QJacobi::zero_to(Some(trunc.clone())));
    }
    let rel = trunc - &lead;
    let mut out = QJacobi::one();
    for &(d, r, m) in &factors {
        let own = if r == 0 { q(d as i64 * m, 24) } else { q(d as i64 * m, 8) };
        let f = if r == 0 {
            QJacobi::from_scalar(&eta_power(d, m, &(&rel + &own)))
        } else {
            let th = theta_series(&((&rel + &own) / qi(d as i64) + qi(1)))
                .scale_q(d as i64)
                .scale_z(d as i64 * r);
            let th = th.truncate(&(&rel + q(d as i64, 8)));
            if m > 0 {
                th.pow(m as u32)
            } else {
                // leading row of ϑ is not a ζ-monomial; divide the monomial-free body instead
                return Err(BlockError::NonIntegralExponent(d));
            }
        };
        out = out.mul(&f.shift(&(-own.clone()), &Q::zero()));
    }
    Ok(out.shift(&lead, &Q::zero()).truncate(trunc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_sum_form_values() {
        let t = theta_series(&qi(11));
        assert_eq!(t.coeff(&q(1, 8), &q(1, 2)), Some(qi(1)));
        assert_eq!(t.coeff(&q(9, 8), &q(3, 2)), Some(qi(-1)));
    }

    #[test]
    fn theta_product_and_sum_forms_agree() {
        let t = qi(10);
        assert!(theta_series(&t).agrees_below(&theta_product(&t), &t));
    }

    #[test]
    fn phi_m2_leading_rows() {
        let p = phi_m2(4);
        assert_eq!(p.c(0, 1), qi(1));
        assert_eq!(p.c(0, 0), qi(-2));
        assert_eq!(p.c(0, -1), qi(1));
        for (r, c) in [(2, -2), (1, 8), (0, -12)] {
            assert_eq!(p.c(1, r), qi(c));
        }
        for (r, c) in [(3, 1), (2, -12), (1, 39), (0, -56)] {
            assert_eq!(p.c(2, r), qi(c));
        }
        check_index_one(&p).unwrap();
    }

    #[test]
    fn phi_m2_equals_product_form() {
        let p = phi_m2(6);
        let b0 = QJacobi::from_terms(1, 1, [(0, 1, qi(1)), (0, 0, qi(-2)), (0, -1, qi(1))], None);
        let direct = b0.mul(&phi_product_part(6));
        assert!(p.agrees_below(&direct, &qi(6)));
    }

    #[test]
    fn phi_0_anchors_and_symmetry() {
        let p = phi_0(8);
        validate_phi_0(&p).unwrap();
        check_index_one(&p).unwrap();
    }

    #[test]
    fn corrupted_phi_0_is_rejected() {
        let p = phi_0(4);
        let bad = p.add(&QJacobi::monomial(&qi(1), &qi(0), qi(1)));
        assert!(validate_phi_0(&bad).is_err());
    }

    #[test]
    fn theta_block_for_1a_is_eta18_theta2() {
        let mut m = BTreeMap::new();
        m.insert(1u64, BTreeMap::from([(0i64, 20i64), (1, 2)]));
        let t = qi(5);
        let tb = theta_block(&m, &t).unwrap();
        let expect = phi_m2(5).mul_scalar(&eta_power(1, 24, &qi(5)));
        assert!(tb.agrees_below(&expect, &t));
    }

    #[test]
    fn theta_block_for_2a() {
        let mut m = BTreeMap::new();
        m.insert(1u64, BTreeMap::from([(0i64, 4i64), (1, 2)]));
        m.insert(2u64, BTreeMap::from([(0i64, 8i64)]));
        let t = qi(5);
        let tb = theta_block(&m, &t).unwrap();
        let eta_g = eta_power(1, 8, &t).mul(&eta_power(2, 8, &t));
        let expect = phi_m2(5).mul_scalar(&eta_g);
        assert!(tb.agrees_below(&expect, &t));
    }

    #[test]
    fn empty_theta_block_is_one() {
        let tb = theta_block(&BTreeMap::new(), &qi(3)).unwrap();
        assert!(tb.agrees_below(&QJacobi::one(), &qi(3)));
    }
}
