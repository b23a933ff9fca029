//! Fourier expansions at arbitrary cusps: eta quotients and E₂^(N) under SL₂(ℤ), and
//! index-one Jacobi forms X·φ₀,₁ + Y·φ₋₂,₁ whose scalar parts carry the level.

use crate::exact_algebra::numtheory::{dedekind_sum, gcd, gcd3, mod_inverse, modp, units};
use crate::exact_algebra::rational::{fmt_q, q, qi};
use crate::exact_algebra::{CSeries, Cyclotomic, JacobiSeries, QJacobi, Q};
use crate::m24_classes::ClassRecord;
use crate::modular_blocks::{e2_series, eta_power, phi_0, phi_m2, AtomKind, EtaQuotient, TTildeAtom};
use num_traits::{ToPrimitive, Zero};
use std::fmt;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CuspError {
    #[error("E₂ correction terms do not cancel (residual {0})")]
    E2Correction(Q),
    #[error("slash action needs integral weight, got {0}")]
    NonIntegralWeight(Q),
    #[error("mixed weights {0} and {1} in one scalar form")]
    MixedWeight(i64, i64),
}

/// An integral matrix (a b; c d) with ad − bc = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SL2Matrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl SL2Matrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        assert_eq!(a * d - b * c, 1, "determinant of ({a} {b}; {c} {d}) is not 1");
        SL2Matrix { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    pub fn s() -> Self {
        Self::new(0, -1, 1, 0)
    }

    pub fn t(k: i64) -> Self {
        Self::new(1, k, 0, 1)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.a, -self.b, -self.c, -self.d)
    }

    /// A·(x, y)ᵀ.
    pub fn apply(&self, x: i64, y: i64) -> (i64, i64) {
        (self.a * x + self.b * y, self.c * x + self.d * y)
    }

    pub fn in_gamma0(&self, n: u64) -> bool {
        self.c % n as i64 == 0
    }

    /// Same matrix with c > 0, or c = 0 and d > 0; the flag says whether it was negated.
    pub fn normalized(&self) -> (Self, bool) {
        if self.c < 0 || (self.c == 0 && self.d < 0) {
            (self.neg(), true)
        } else {
            (*self, false)
        }
    }

    /// Parses "a,b,c,d".
    pub fn parse(s: &str) -> Option<Self> {
        let v: Vec<i64> = s.split(',').map(|x| x.trim().parse().ok()).collect::<Option<_>>()?;
        if v.len() != 4 || v[0] * v[3] - v[1] * v[2] != 1 {
            return None;
        }
        Some(Self::new(v[0], v[1], v[2], v[3]))
    }
}

impl fmt::Display for SL2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// A matrix A with A·(a, b)ᵀ ≡ (gcd(a, b, N), 0)ᵀ mod N and bottom row proportional to (−b, a).
pub fn choose_a_ab(a: i64, b: i64, n: u64) -> SL2Matrix {
    let n = n as i64;
    let d = gcd3(a, b, n);
    let a0 = modp(a, n);
    let mut bp = modp(b, n);
    let mut ap = a0;
    if bp == 0 {
        if a0 == d {
            ap = d;
        } else {
            bp = n;
        }
    }
    if bp != 0 {
        while gcd(ap, bp) != d {
            ap += n;
        }
    }
    let (x, y) = (ap / d, bp / d);
    if y == 0 {
        debug_assert_eq!(x, 1);
        return SL2Matrix::identity();
    }
    let u = if y == 1 { 0 } else { mod_inverse(x, y).expect("coprime") };
    let v = (1 - u * x) / y;
    SL2Matrix::new(u, v, -y, x)
}

/// A second valid choice, used to check that results do not depend on the choice.
pub fn choose_a_ab_alt(a: i64, b: i64, n: u64) -> SL2Matrix {
    let m = n as i64;
    let g = SL2Matrix::new(1, 0, m, 1);
    g.mul(&SL2Matrix::t(m)).mul(&choose_a_ab(a, b, n)).mul(&g)
}

/// Canonical representative of the coset Γ₀(M)·A: the key is the least λ·(c, d) mod M over
/// units λ, and the matrix has that bottom row.
pub fn coset_representative(a: &SL2Matrix, m: u64) -> ((i64, i64), SL2Matrix) {
    let mi = m as i64;
    if m == 1 {
        return ((0, 0), SL2Matrix::identity());
    }
    let key = units(m)
        .into_iter()
        .map(|l| (modp(l as i64 * a.c, mi), modp(l as i64 * a.d, mi)))
        .min()
        .unwrap();
    let (c0, d0) = key;
    // lift to a coprime pair (c1, d1) ≡ (c0, d0)
    let mut d1 = if d0 == 0 { mi } else { d0 };
    let c1 = if c0 == 0 { mi } else { c0 };
    while gcd(c1, d1) != 1 {
        d1 += mi;
    }
    // (x y; c1 d1) with x·d1 − y·c1 = 1
    let x = mod_inverse(d1, c1).unwrap_or(0);
    let y = (x * d1 - 1) / c1;
    (key, SL2Matrix::new(x, y, c1, d1))
}

/// (k 0; 0 1)·A = A′·U with A′ ∈ SL₂(ℤ) and U = (a′ b′; 0 d′). A must be normalized.
fn split(k: u64, m: &SL2Matrix) -> (SL2Matrix, i64, i64, i64) {
    let k = k as i64;
    let ap = gcd(k, m.c);
    let alpha = k * m.a / ap;
    let gamma = m.c / ap;
    let (beta, delta) = if gamma == 0 {
        (0, 1)
    } else {
        let delta = mod_inverse(modp(alpha, gamma), gamma).unwrap();
        ((alpha * delta - 1) / gamma, delta)
    };
    let big = SL2Matrix::new(alpha, beta, gamma, delta);
    let bp = delta * k * m.b - beta * m.d;
    let dp = -gamma * k * m.b + alpha * m.d;
    debug_assert_eq!(dp, k / ap);
    (big, ap, bp, dp)
}

/// η(Aτ) = e(phase)·(cτ + d)^{1/2}·η(τ) for normalized A.
fn eta_phase(m: &SL2Matrix) -> Q {
    if m.c == 0 {
        return q(m.b, 24);
    }
    let (sn, sd) = dedekind_sum(m.d, m.c);
    q(m.a + m.d, 24 * m.c) - q(sn, 2 * sd) - q(1, 8)
}

/// (∏ η(kτ)^{b_k})|_w A below q^trunc, w the weight, with (cτ + d)^w on the principal branch.
/// Half-integral weight is accepted only when c > 0, or c = 0 and d > 0.
pub fn eta_quotient_at_cusp(eq: &EtaQuotient, a: &SL2Matrix, trunc: &Q) -> Result<CSeries, CuspError> {
    let w = eq.weight();
    let (m, negated) = a.normalized();
    if negated && !w.is_integer() {
        return Err(CuspError::NonIntegralWeight(w));
    }
    let parts: Vec<_> = eq.factors.iter().map(|&(k, b)| (k, b, split(k, &m))).collect();
    let lead: Q = parts.iter().map(|(_, b, (_, ap, _, dp))| q(ap * b, 24 * dp)).sum();
    let mut phase = qi(0);
    let mut dprod = qi(1);
    let mut out = CSeries::one();
    for (_, b, (big, ap, bp, dp)) in &parts {
        phase += eta_phase(big) * qi(*b);
        dprod *= Q::from_integer((*dp).into()).pow(*b as i32);
        if *trunc <= lead {
            continue;
        }
        let own = q(ap * b, 24 * dp);
        // η(τ)^b known below own·dp/ap + (trunc − lead)·dp/ap, then τ ↦ (a′τ + b′)/d′
        let t = (&own + trunc - &lead) * q(*dp, *ap);
        let f = eta_power(1, *b, &t).twist(&q(*bp, *dp)).substitute(&q(*ap, *dp));
        out = out.mul(&f);
    }
    if *trunc <= lead {
        out = CSeries::zero_to(Some(trunc.clone()));
    }
    let mut c = Cyclotomic::e(&phase).mul(&Cyclotomic::sqrt_q(&(qi(1) / dprod))).scale(&eq.prefactor);
    if negated && w.to_integer().to_i64().unwrap() % 2 != 0 {
        c = c.neg();
    }
    Ok(out.scale_by(&c).truncate(trunc))
}

/// E₂(kτ)|₂A as (holomorphic part, c/k) where the non-holomorphic remainder is
/// (6/πi)·(c/k)/(cτ + d).
fn e2_scaled_at_cusp(k: u64, m: &SL2Matrix, trunc: &Q) -> (CSeries, Q) {
    let (_, ap, bp, dp) = split(k, m);
    let t = trunc * q(dp, ap);
    let s = e2_series(&t).twist(&q(bp, dp)).substitute(&q(ap, dp)).scale(&q(1, dp * dp));
    (s, q(m.c, k as i64))
}

/// E₂^(level)(scale·τ)|₂A below q^trunc; the quasimodular corrections must cancel.
pub fn e2n_at_cusp(level: u64, scale: u64, a: &SL2Matrix, trunc: &Q) -> Result<CSeries, CuspError> {
    let (m, _) = a.normalized();
    let (big, cb) = e2_scaled_at_cusp(level * scale, &m, trunc);
    let (small, cs) = e2_scaled_at_cusp(scale, &m, trunc);
    let lvl = qi(level as i64);
    let residual = (&lvl * cb - cs) / (&lvl - qi(1));
    if !residual.is_zero() {
        return Err(CuspError::E2Correction(residual));
    }
    Ok(big.scale(&lvl).sub(&small).scale(&(qi(1) / (lvl - qi(1)))))
}

/// A scalar modular form Σ coeff·atom of integral weight.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarForm {
    pub weight: i64,
    pub terms: Vec<(Q, Atom)>,
    /// A level M with the form on Γ₀(M).
    pub level: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    One,
    Eta(EtaQuotient),
    E2N { level: u64, scale: u64 },
}

impl ScalarForm {
    pub fn zero(weight: i64) -> Self {
        ScalarForm { weight, terms: vec![], level: 1 }
    }

    pub fn constant(c: Q) -> Self {
        ScalarForm { weight: 0, terms: vec![(c, Atom::One)], level: 1 }
    }

    pub fn eta(eq: EtaQuotient, level: u64) -> Result<Self, CuspError> {
        let w = eq.weight();
        if !w.is_integer() {
            return Err(CuspError::NonIntegralWeight(w));
        }
        let c = eq.prefactor.clone();
        let e = EtaQuotient::new(eq.factors, qi(1));
        Ok(ScalarForm { weight: w.to_integer().to_i64().unwrap(), terms: vec![(c, Atom::Eta(e))], level })
    }

    /// Weight-2 form from T̃ atoms on Γ₀(level).
    pub fn from_atoms(atoms: &[TTildeAtom], level: u64) -> Result<Self, CuspError> {
        let mut terms = Vec::new();
        for at in atoms {
            let w = at.weight();
            if w != qi(2) {
                return Err(CuspError::NonIntegralWeight(w));
            }
            terms.push((
                at.coeff.clone(),
                match &at.kind {
                    AtomKind::Eta(e) => Atom::Eta(e.clone()),
                    AtomKind::E2N { level, scale } => Atom::E2N { level: *level, scale: *scale },
                },
            ));
        }
        Ok(ScalarForm { weight: 2, terms, level })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.0.is_zero())
    }

    /// Whether f|γ = f for γ ∈ Γ₀(level): even weight and every eta character trivial.
    pub fn has_trivial_character(&self) -> bool {
        self.weight % 2 == 0
            && self.terms.iter().all(|(_, a)| match a {
                Atom::Eta(e) => {
                    let d = e.character_discriminant();
                    d > 0 && {
                        let r = (d as f64).sqrt().round() as i64;
                        r * r == d
                    }
                }
                _ => true,
            })
    }

    /// Expansion at ∞.
    pub fn series(&self, trunc: &Q) -> CSeries {
        self.at_cusp(&SL2Matrix::identity(), trunc).expect("identity slash")
    }

    /// f|_w A below q^trunc.
    pub fn at_cusp(&self, a: &SL2Matrix, trunc: &Q) -> Result<CSeries, CuspError> {
        let mut out = CSeries::zero_to(Some(trunc.clone()));
        for (c, atom) in &self.terms {
            let s = match atom {
                Atom::One => {
                    if self.weight != 0 {
                        return Err(CuspError::MixedWeight(self.weight, 0));
                    }
                    CSeries::one().truncate(trunc)
                }
                Atom::Eta(e) => {
                    let w = e.weight().to_integer().to_i64().unwrap_or(i64::MIN);
                    if w != self.weight {
                        return Err(CuspError::MixedWeight(self.weight, w));
                    }
                    eta_quotient_at_cusp(e, a, trunc)?
                }
                Atom::E2N { level, scale } => {
                    if self.weight != 2 {
                        return Err(CuspError::MixedWeight(self.weight, 2));
                    }
                    e2n_at_cusp(*level, *scale, a, trunc)?
                }
            };
            out = out.add(&s.scale(c));
        }
        Ok(out)
    }

    pub fn describe(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(c, a)| {
                let body = match a {
                    Atom::One => "1".to_string(),
                    Atom::Eta(e) => e.describe(),
                    Atom::E2N { level, scale: 1 } => format!("E₂^({level})(τ)"),
                    Atom::E2N { level, scale } => format!("E₂^({level})({scale}τ)"),
                };
                format!("{}·{}", fmt_q(c), body)
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// X·φ₀,₁ + Y·φ₋₂,₁ with scalar forms X (weight k) and Y (weight k + 2). Both φ's are
/// Jacobi forms on the full group, so slashing acts on X and Y alone.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexOneForm {
    pub name: String,
    pub x: ScalarForm,
    pub y: ScalarForm,
}

impl IndexOneForm {
    /// φ_g = (χ(g)/12)·φ₀,₁ + T̃_g·φ₋₂,₁.
    pub fn genus(rec: &ClassRecord) -> Result<Self, CuspError> {
        let chi = rec.chi();
        Ok(IndexOneForm {
            name: rec.name.clone(),
            x: if chi == 0 { ScalarForm::zero(0) } else { ScalarForm::constant(q(chi, 12)) },
            y: ScalarForm::from_atoms(&rec.ttilde, rec.level)?,
        })
    }

    /// eq·φ₋₂,₁ for an eta quotient on Γ₀(level).
    pub fn eta_times_phi_m2(name: &str, eq: EtaQuotient, level: u64) -> Result<Self, CuspError> {
        let y = ScalarForm::eta(eq, level)?;
        Ok(IndexOneForm { name: name.to_string(), x: ScalarForm::zero(y.weight - 2), y })
    }

    pub fn zero(weight: i64) -> Self {
        IndexOneForm { name: "0".into(), x: ScalarForm::zero(weight), y: ScalarForm::zero(weight + 2) }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn weight(&self) -> i64 {
        self.y.weight - 2
    }

    /// (X|A, Y|A) below q^trunc.
    pub fn parts_at(&self, a: &SL2Matrix, trunc: &Q) -> Result<(CSeries, CSeries), CuspError> {
        Ok((self.x.at_cusp(a, trunc)?, self.y.at_cusp(a, trunc)?))
    }

    /// φ|_{k,1}A below q^trunc.
    pub fn at_cusp(&self, a: &SL2Matrix, trunc: &Q) -> Result<JacobiSeries<Cyclotomic>, CuspError> {
        let n = trunc.ceil().to_integer().to_i64().unwrap().max(0) + 1;
        let (x, y) = self.parts_at(a, trunc)?;
        let p0 = phi_0(n).to_cyclotomic();
        let pm2 = phi_m2(n).to_cyclotomic();
        Ok(p0
            .mul_scalar(&x)
            .add(&pm2.mul_scalar(&y))
            .truncate(trunc)
            .with_meta(qi(self.weight()), qi(1), self.y.level))
    }

    /// Expansion at ∞ with rational coefficients.
    pub fn at_infinity(&self, trunc: i64) -> QJacobi {
        self.at_cusp(&SL2Matrix::identity(), &qi(trunc))
            .expect("identity slash")
            .to_rational()
            .expect("expansion at ∞ is rational")
    }
}

/// φ_{g^d}|A for the class of g^{gcd(d, n_g)}.
pub fn genus_at_cusp(
    rec: &ClassRecord,
    d: u64,
    a: &SL2Matrix,
    trunc: &Q,
) -> Result<JacobiSeries<Cyclotomic>, crate::twisted_genera::GenusError> {
    let p = crate::m24_classes::power_class(crate::m24_classes::class_table(), rec, gcd(d as i64, rec.order as i64) as u64)
        .map_err(|e| crate::twisted_genera::GenusError::NotWeakJacobi { class: rec.name.clone(), detail: e.to_string() })?;
    crate::twisted_genera::load_ttilde(p, &qi(1))?;
    let f = IndexOneForm::genus(p)
        .and_then(|f| f.at_cusp(a, trunc))
        .map_err(|e| crate::twisted_genera::GenusError::NotWeakJacobi { class: p.name.clone(), detail: e.to_string() })?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::m24_classes::find_class;
    use crate::modular_blocks::e2n_series;

    fn cs(terms: &[(i64, i64, i64, i64)], trunc: Q) -> CSeries {
        // (exp num, exp den, coeff num, coeff den)
        let mut s = CSeries::zero_to(Some(trunc));
        for &(en, ed, cn, cd) in terms {
            s = s.add(&CSeries::monomial(&q(en, ed), Cyclotomic::from_q(q(cn, cd))));
        }
        s
    }

    #[test]
    fn choices_of_a_ab() {
        assert_eq!(choose_a_ab(1, 0, 7), SL2Matrix::identity());
        assert_eq!(choose_a_ab(2, 3, 6), SL2Matrix::new(2, -1, -3, 2));
        let s = choose_a_ab(0, 1, 5);
        assert_eq!(s, SL2Matrix::new(0, 1, -1, 0));
        for n in [1u64, 2, 4, 6, 9, 12, 16] {
            let ni = n as i64;
            for a in 0..ni {
                for b in 0..ni {
                    let d = gcd3(a, b, ni);
                    for m in [choose_a_ab(a, b, n), choose_a_ab_alt(a, b, n)] {
                        let (x, y) = m.apply(a, b);
                        assert_eq!((modp(x - d, ni), modp(y, ni)), (0, 0), "{a} {b} {n} {m}");
                    }
                }
            }
        }
    }

    #[test]
    fn coset_representatives() {
        for m in [4u64, 9, 12] {
            for a in [SL2Matrix::s(), SL2Matrix::new(2, -1, -3, 2), SL2Matrix::new(1, 0, 2, 1)] {
                let (_, rep) = coset_representative(&a, m);
                assert!(a.mul(&rep.inverse()).in_gamma0(m));
            }
        }
    }

    #[test]
    fn eta_cube_of_3tau_at_s() {
        let e = EtaQuotient::new(vec![(3, 8)], qi(1));
        let s = eta_quotient_at_cusp(&e, &SL2Matrix::s(), &q(1, 2)).unwrap();
        assert_eq!(s, cs(&[(1, 9, 1, 81), (4, 9, -8, 81)], q(1, 2)));
    }

    #[test]
    fn eta_under_t_and_delta_invariance() {
        let e = EtaQuotient::new(vec![(1, 1)], qi(1));
        let s = eta_quotient_at_cusp(&e, &SL2Matrix::t(1), &q(25, 24)).unwrap();
        let expect = CSeries::monomial(&q(1, 24), Cyclotomic::e(&q(1, 24)));
        assert_eq!(s, expect.truncate(&q(25, 24)));
        let d = EtaQuotient::new(vec![(1, 24)], qi(1));
        let inf = d.series(&qi(5)).to_cyclotomic();
        for m in [SL2Matrix::s(), SL2Matrix::new(2, -1, -3, 2), SL2Matrix::new(-5, 2, -3, 1)] {
            assert_eq!(eta_quotient_at_cusp(&d, &m, &qi(5)).unwrap(), inf);
        }
    }

    #[test]
    fn e2n_at_cusps() {
        let s = e2n_at_cusp(2, 1, &SL2Matrix::s(), &qi(2)).unwrap();
        let expect = e2n_series(2, 1, &qi(1)).substitute(&q(1, 2)).scale(&q(-1, 2)).to_cyclotomic();
        assert_eq!(s.truncate(&q(1, 2)), expect.truncate(&q(1, 2)));
        assert_eq!(s.coeff(&q(1, 2)), Some(Cyclotomic::from_int(-12)));
        let g = SL2Matrix::new(1, 0, 4, 1);
        assert_eq!(e2n_at_cusp(4, 1, &g, &qi(4)).unwrap(), e2n_series(4, 1, &qi(4)).to_cyclotomic());
        assert_eq!(
            e2n_at_cusp(3, 1, &SL2Matrix::t(1), &qi(4)).unwrap(),
            e2n_series(3, 1, &qi(4)).to_cyclotomic()
        );
    }

    #[test]
    fn genus_1a_is_invariant() {
        let r = find_class("1A").unwrap();
        let f = IndexOneForm::genus(r).unwrap();
        let inf = f.at_infinity(3).to_cyclotomic();
        for m in [SL2Matrix::s(), SL2Matrix::new(2, -1, -3, 2)] {
            assert!(f.at_cusp(&m, &qi(3)).unwrap().same_terms(&inf));
        }
    }

    #[test]
    fn gamma0_invariance_of_every_ttilde() {
        for rec in crate::m24_classes::class_table() {
            let f = ScalarForm::from_atoms(&rec.ttilde, rec.level).unwrap();
            assert!(f.has_trivial_character(), "{}", rec.name);
            let n = rec.level as i64;
            for a in [SL2Matrix::s(), SL2Matrix::new(1, 1, 2, 3)] {
                let base = f.at_cusp(&a, &qi(1)).unwrap();
                for g in [SL2Matrix::new(1, 0, n, 1), SL2Matrix::new(1 + n, 1, n, 1), SL2Matrix::new(2 * n + 1, -1, -2 * n, 1)] {
                    let moved = f.at_cusp(&g.mul(&a), &qi(1)).unwrap();
                    assert_eq!(moved, base, "{} γ={g} A={a}", rec.name);
                }
            }
        }
    }
}
