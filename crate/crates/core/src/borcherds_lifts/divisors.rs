//! Divisors on Humbert surfaces, the duality sign, the quasi-pullback to z = 0, and the
//! Hecke identity relating φ_g to its leading Fourier–Jacobi coefficient.

use super::hecke::{hecke_tm, HeckeCharacter};
use super::{FJExpansion, LiftError, LiftFamily};
use crate::exact_algebra::numtheory::{divisors as divisors_of, totient};
use crate::exact_algebra::rational::{fmt_q, q, q_zero, qi};
use crate::exact_algebra::{QJacobi, Q};
use crate::m24_classes::ClassRecord;
use crate::modular_blocks::{phi_m2, EtaQuotient};
use crate::weil_lift::{DiscElement, PrincipalPart};
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};

/// One Humbert surface H(a, n, r, m, b) up to the action fixing its discriminant-group class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HumbertEntry {
    /// (a, n, r, m, b) with gcd 1.
    pub data: (i64, i64, i64, i64, i64),
    pub class: DiscElement,
    pub discriminant: Q,
    pub multiplicity: Q,
}

impl HumbertEntry {
    pub fn to_json(&self, n: u64, t: u64) -> Value {
        let (a, nn, r, m, b) = self.data;
        json!({
            "data": [a, nn, r, m, b],
            "class": self.class.label(n, t),
            "discriminant": fmt_q(&self.discriminant),
            "multiplicity": fmt_q(&self.multiplicity),
        })
    }
}

/// Every class (γ, δ) with 0 < δ ≤ δ_max and Σ_λ α(−λ²δ, λγ) ≠ 0; γ and −γ give the same surface.
pub fn divisors(pp: &PrincipalPart, delta_max: &Q) -> Vec<HumbertEntry> {
    let (n, t) = (pp.n, pp.t);
    let (ni, ti) = (n as i64, t as i64);
    // candidate discriminants δ₀/λ²; every δ lies in (1/4tN)ℤ
    let unit = q(1, 4 * ti * ni);
    let mut deltas = BTreeSet::new();
    for (_, e) in pp.entries.keys() {
        let d0 = -e.clone();
        let mut lambda = 1i64;
        loop {
            let d = &d0 / qi(lambda * lambda);
            if d < unit {
                break;
            }
            if d <= *delta_max && (&d / &unit).is_integer() {
                deltas.insert(d);
            }
            lambda += 1;
        }
    }
    let lookup = |g: &DiscElement, e: &Q| pp.entries.get(&(*g, e.clone())).cloned().unwrap_or_else(q_zero);
    let mut out = Vec::new();
    for x in 0..ni {
        for r in 0..2 * ti {
            for y in 0..ni {
                let g = DiscElement { x, r, y };
                let neg = DiscElement::new(-x, -r, -y, n, t);
                if neg < g {
                    continue;
                }
                let norm = g.norm(n, t);
                for d in &deltas {
                    if !(d - &norm).is_integer() {
                        continue;
                    }
                    let mut total = q_zero();
                    let mut lambda = 1i64;
                    while qi(lambda * lambda) * d <= -pp_min_exponent(pp) {
                        let lg = DiscElement::new(lambda * x, lambda * r, lambda * y, n, t);
                        total += lookup(&lg, &(-qi(lambda * lambda) * d));
                        lambda += 1;
                    }
                    if !total.is_zero() {
                        // m = 1 makes the data primitive; n then fixes δ = ab/N − nm + r²/4t
                        let nn = q(x * y, ni) + q(r * r, 4 * ti) - d;
                        out.push(HumbertEntry {
                            data: (x, nn.to_integer().to_i64().unwrap(), r, 1, y),
                            class: g,
                            discriminant: d.clone(),
                            multiplicity: total,
                        });
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| (&a.discriminant, a.class).cmp(&(&b.discriminant, b.class)));
    out
}

fn pp_min_exponent(pp: &PrincipalPart) -> Q {
    pp.entries.keys().map(|(_, e)| e.clone()).min().unwrap_or_else(q_zero)
}

/// D₀ = (1/N) Σ_{d | N} Σ_{λ ≥ 1} φ(N/d)·c_d(−λ², 0).
pub fn duality_d0(fam: &LiftFamily) -> Q {
    let mut total = q_zero();
    for d in divisors_of(fam.n) {
        let Some(phi) = fam.members.get(&d) else { continue };
        let Some(v) = phi.valuation() else { continue };
        let mut lambda = 1i64;
        while qi(-lambda * lambda) >= v {
            total += qi(totient(fam.n / d) as i64) * phi.c(-lambda * lambda, 0);
            lambda += 1;
        }
    }
    total / qi(fam.n as i64)
}

/// Σ p(n, m) qⁿ s^m for 0 ≤ n ≤ q_max, 0 ≤ m ≤ s_max.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackSeries {
    pub q_max: i64,
    pub s_max: i64,
    pub coeffs: BTreeMap<(i64, i64), Q>,
}

impl PullbackSeries {
    pub fn coeff(&self, n: i64, m: i64) -> Q {
        self.coeffs.get(&(n, m)).cloned().unwrap_or_else(q_zero)
    }

    /// f(q)·f(s) for a one-variable series given by its coefficients from q⁰.
    pub fn outer_square(f: &[Q], q_max: i64, s_max: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        for n in 0..=q_max {
            for m in 0..=s_max {
                let v = f.get(n as usize).cloned().unwrap_or_else(q_zero) * f.get(m as usize).cloned().unwrap_or_else(q_zero);
                if !v.is_zero() {
                    coeffs.insert((n, m), v);
                }
            }
        }
        PullbackSeries { q_max, s_max, coeffs }
    }
}

/// lim_{z→0} Φ/(2πiz)²: with ζ^r = 1 + 2πirz + (2πirz)²/2 + …, the (n, m) coefficient is ½Σ_r r²c(n, r, m)
/// once Σ_r c and Σ_r r·c vanish.
pub fn quasi_pullback(phi: &FJExpansion) -> Result<PullbackSeries, LiftError> {
    let mut coeffs = BTreeMap::new();
    for (&(n, m), row) in phi.to_bivariate().cells() {
        let s0: Q = row.values().sum();
        let s1: Q = row.iter().map(|(r, v)| v * qi(*r)).sum();
        if !s0.is_zero() || !s1.is_zero() {
            return Err(LiftError::NoDoubleZero { n, m });
        }
        let s2: Q = row.iter().map(|(r, v)| v * qi(r * r)).sum::<Q>() / qi(2);
        if !s2.is_zero() {
            coeffs.insert((n, m), s2);
        }
    }
    Ok(PullbackSeries { q_max: phi.q_max, s_max: phi.s_max, coeffs })
}

/// η_g·φ₋₂,₁ below q^rows, with its weight, level and character.
pub fn leading_form(rec: &ClassRecord, rows: i64) -> (QJacobi, i64, HeckeCharacter) {
    let eta = rec.eta_product();
    let k = (eta.weight() - qi(2)).to_integer().to_i64().unwrap();
    let phi = phi_m2(rows)
        .mul_scalar(&eta.series(&qi(rows)))
        .truncate(&qi(rows))
        .with_meta(qi(k), qi(1), rec.level);
    (phi, k, eta_character(&eta))
}

/// Character d ↦ ((−1)^k ∏ δ^{b_δ} / d) of an eta quotient of integral weight k.
pub fn eta_character(eta: &EtaQuotient) -> HeckeCharacter {
    match eta.character_discriminant() {
        1 => HeckeCharacter::Trivial,
        d => HeckeCharacter::Kronecker(d),
    }
}

/// φ_g·ψ + ψ|T₋^{(N_g)}(2) + f_g·ψ for ψ = η_gφ₋₂,₁; zero when the identity holds.
pub fn hecke_identity_defect(rec: &ClassRecord, f_g: Option<&QJacobi>, phi_g: &QJacobi, rows: i64) -> QJacobi {
    let (psi, k, chi) = leading_form(rec, 2 * rows);
    let hecke = hecke_tm(&psi, k, 2, rec.level, chi).truncate(&qi(rows));
    let psi = psi.truncate(&qi(rows));
    let mut total = phi_g.mul(&psi).add(&hecke);
    if let Some(f) = f_g {
        total = total.add(&f.mul(&psi));
    }
    total.truncate(&qi(rows))
}

/// Whether every entry of a divisor list has nonnegative (resp. even) multiplicity.
pub fn all_multiplicities(entries: &[HumbertEntry], pred: impl Fn(&Q) -> bool) -> bool {
    entries.iter().all(|e| pred(&e.multiplicity))
}

pub fn is_even(v: &Q) -> bool {
    (v / qi(2)).is_integer()
}

pub fn is_nonnegative(v: &Q) -> bool {
    !v.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::m24_classes::find_class;
    use crate::weil_lift::{jmap, principal_part, JInput};

    fn pp(name: &str) -> PrincipalPart {
        let rec = find_class(name).unwrap();
        principal_part(&jmap(&JInput::from_class(rec).unwrap(), &q(1, 4)).unwrap())
    }

    #[test]
    fn igusa_double_zero_on_the_diagonal() {
        let d = divisors(&pp("1A"), &qi(4));
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].discriminant, q(1, 4));
        assert_eq!(d[0].multiplicity, qi(2));
        assert_eq!(d[0].class, DiscElement { x: 0, r: 1, y: 0 });
    }

    #[test]
    fn class_2b_is_holomorphic() {
        let d = divisors(&pp("2B"), &qi(4));
        assert_eq!(d.len(), 2);
        assert!(d.iter().all(|e| e.multiplicity == qi(2) && e.discriminant == q(1, 4)));
    }

    #[test]
    fn class_3b_has_even_poles() {
        let d = divisors(&pp("3B"), &qi(4));
        assert!(d.iter().any(|e| e.discriminant == q(1, 36) && e.multiplicity == qi(-6)));
        assert!(all_multiplicities(&d, is_even));
        assert!(!all_multiplicities(&d, is_nonnegative));
    }

    #[test]
    fn duality_sign_on_synthetic_families() {
        let mut phi = QJacobi::from_terms(1, 1, [(-1, 0, qi(1))], Some(qi(2)));
        assert_eq!(duality_d0(&LiftFamily::single("x", phi.clone(), 1)), qi(1));
        phi = phi.scale(&qi(2));
        assert_eq!(duality_d0(&LiftFamily::single("x", phi, 2)), qi(1));
        let fam = LiftFamily::from_class(find_class("6A").unwrap(), 2).unwrap();
        assert_eq!(duality_d0(&fam), qi(0));
    }

    #[test]
    fn hecke_identity_for_2a() {
        let rec = find_class("2A").unwrap();
        let phi = crate::twisted_genera::genus(rec, 4).unwrap();
        assert!(hecke_identity_defect(rec, None, &phi, 4).is_empty());
    }
}
