//! The discriminant form of U(N) ⊕ A₁(t), the map Ĵ from families (φ_d)_{d | N} of Jacobi forms
//! to vector-valued modular forms, principal parts, and the theta-decomposition route.

use crate::cusp_transform::{choose_a_ab, choose_a_ab_alt, coset_representative, CuspError, IndexOneForm, SL2Matrix};
use crate::data::{SumKind, TableClass};
use crate::exact_algebra::numtheory::{divisors, gcd, gcd3, mod_inverse, modp, units};
use crate::exact_algebra::rational::{fmt_q, frac, parse_q, q, qi};
use crate::exact_algebra::{CSeries, Cyclotomic, QJacobi, QSeries, Q};
use crate::m24_classes::{power_class, ClassRecord};
use crate::modular_blocks::{phi_m2, EtaQuotient};
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum WeilError {
    #[error(transparent)]
    Cusp(#[from] CuspError),
    #[error("coefficient of q^{exp} at {label} is not rational: {value}")]
    NonRational { label: String, exp: Q, value: String },
    #[error("expansion at A_({a},{b}) depends on the matrix choice (exponent {exp})")]
    ChoiceDependent { a: i64, b: i64, exp: Q },
    #[error("c({n}, {r}) differs from the value forced by 4tn − r² and r mod 2t")]
    DependenceViolation { n: Q, r: Q },
    #[error("table entry {class}: {detail}")]
    Table { class: String, detail: String },
    #[error("theta route needs an input with no φ₀,₁ part")]
    NotThetaInput,
}

/// The element (x/N, r/2t, y/N) of the discriminant group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiscElement {
    pub x: i64,
    pub r: i64,
    pub y: i64,
}

impl DiscElement {
    pub fn new(x: i64, r: i64, y: i64, n: u64, t: u64) -> Self {
        DiscElement { x: modp(x, n as i64), r: modp(r, 2 * t as i64), y: modp(y, n as i64) }
    }

    pub fn zero() -> Self {
        DiscElement { x: 0, r: 0, y: 0 }
    }

    /// Q(γ) = r²/4t + xy/N mod 1.
    pub fn norm(&self, n: u64, t: u64) -> Q {
        frac(&(q(self.r * self.r, 4 * t as i64) + q(self.x * self.y, n as i64)))
    }

    pub fn label(&self, n: u64, t: u64) -> String {
        format!(
            "({}, {}, {})",
            fmt_q(&q(self.x, n as i64)),
            fmt_q(&q(self.r, 2 * t as i64)),
            fmt_q(&q(self.y, n as i64))
        )
    }
}

/// A vector-valued form Σ_γ f_γ 𝔢_γ for the lattice U(N) ⊕ A₁(t).
#[derive(Clone, Debug, PartialEq)]
pub struct VVForm {
    pub n: u64,
    pub t: u64,
    pub weight: Q,
    pub components: BTreeMap<DiscElement, QSeries>,
    /// Every component is known below q^trunc.
    pub trunc: Q,
}

impl VVForm {
    pub fn component(&self, g: &DiscElement) -> QSeries {
        self.components
            .get(g)
            .cloned()
            .unwrap_or_else(|| QSeries::zero_to(Some(self.trunc.clone())))
    }

    pub fn coeff(&self, g: &DiscElement, e: &Q) -> Q {
        self.components.get(g).and_then(|s| s.coeff(e)).unwrap_or_else(Q::zero)
    }

    /// Checks that every component's exponents lie in −Q(γ) + ℤ.
    pub fn exponents_consistent(&self) -> bool {
        self.components.iter().all(|(g, s)| {
            let want = -g.norm(self.n, self.t);
            s.iter().all(|(e, _)| (&e - &want).is_integer())
        })
    }
}

/// Entries of negative exponent together with the 𝔢₀ constant term.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrincipalPart {
    pub n: u64,
    pub t: u64,
    pub constant: Q,
    pub entries: BTreeMap<(DiscElement, Q), Q>,
}

impl PrincipalPart {
    pub fn is_holomorphic(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn all_integral(&self) -> bool {
        self.constant.is_integer() && self.entries.values().all(|v| v.is_integer())
    }

    pub fn all_even(&self) -> bool {
        let even = |v: &Q| (v / qi(2)).is_integer();
        even(&self.constant) && self.entries.values().all(even)
    }

    pub fn all_nonnegative(&self) -> bool {
        self.entries.values().all(|v| !v.is_negative())
    }

    fn add(&mut self, g: DiscElement, e: Q, c: Q) {
        let v = self.entries.entry((g, e.clone())).or_insert_with(Q::zero);
        *v += c;
        if v.is_zero() {
            self.entries.remove(&(g, e));
        }
    }

    /// Entries present in one part but not the other, as readable lines.
    pub fn diff(&self, other: &PrincipalPart) -> Vec<String> {
        let mut out = Vec::new();
        if self.constant != other.constant {
            out.push(format!("constant: {} vs {}", fmt_q(&self.constant), fmt_q(&other.constant)));
        }
        let keys: std::collections::BTreeSet<_> = self.entries.keys().chain(other.entries.keys()).collect();
        for k in keys {
            let a = self.entries.get(k).cloned().unwrap_or_else(Q::zero);
            let b = other.entries.get(k).cloned().unwrap_or_else(Q::zero);
            if a != b {
                out.push(format!(
                    "q^{} 𝔢{}: {} vs {}",
                    fmt_q(&k.1),
                    k.0.label(self.n, self.t),
                    fmt_q(&a),
                    fmt_q(&b)
                ));
            }
        }
        out
    }

    /// Groups entries into (ℤ/N)^×-orbits (x, y) ↦ (ux, u⁻¹y) with a common coefficient.
    pub fn orbits(&self) -> Vec<(Q, Q, DiscElement, usize)> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        let ni = self.n as i64;
        for ((g, e), c) in &self.entries {
            if seen.contains(&(*g, e.clone())) {
                continue;
            }
            let mut orbit = std::collections::BTreeSet::new();
            for u in units(self.n) {
                let u = u as i64;
                let ui = mod_inverse(u, ni).unwrap();
                orbit.insert(DiscElement::new(g.x * u, g.r, g.y * ui, self.n, self.t));
            }
            let uniform = orbit.iter().all(|h| self.entries.get(&(*h, e.clone())) == Some(c));
            if uniform {
                for h in &orbit {
                    seen.insert((*h, e.clone()));
                }
                out.push((c.clone(), e.clone(), *g, orbit.len()));
            } else {
                seen.insert((*g, e.clone()));
                out.push((c.clone(), e.clone(), *g, 1));
            }
        }
        out
    }
}

impl fmt::Display for PrincipalPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} 𝔢(0, 0, 0)", fmt_q(&self.constant))?;
        for (c, e, g, size) in self.orbits() {
            let sum = if size > 1 { format!("Σ_u[{size}] ") } else { String::new() };
            writeln!(f, "{} q^{} {}𝔢{}", fmt_q(&c), fmt_q(&e), sum, g.label(self.n, self.t))?;
        }
        Ok(())
    }
}

/// The input of Ĵ: a form φ_d for every d dividing N (absent members are zero).
#[derive(Clone, Debug)]
pub struct JInput {
    pub name: String,
    pub n: u64,
    pub members: BTreeMap<u64, IndexOneForm>,
}

impl JInput {
    /// The genus family (φ_{g^d})_{d | N_g}.
    pub fn from_class(rec: &ClassRecord) -> Result<Self, WeilError> {
        let table = crate::m24_classes::class_table();
        let mut members = BTreeMap::new();
        for d in divisors(rec.level) {
            let e = gcd(d as i64, rec.order as i64) as u64;
            let p = power_class(table, rec, e).expect("power classes are in the table");
            members.insert(d, IndexOneForm::genus(p)?);
        }
        Ok(JInput { name: rec.name.clone(), n: rec.level, members })
    }

    /// φ₁ = eq·φ₋₂,₁ and φ_d = 0 for d > 1.
    pub fn eta_input(name: &str, eq: EtaQuotient, n: u64) -> Result<Self, WeilError> {
        let f = IndexOneForm::eta_times_phi_m2(name, eq, n)?;
        Ok(JInput { name: name.to_string(), n, members: BTreeMap::from([(1, f)]) })
    }

    pub fn weight(&self) -> i64 {
        self.members.values().next().map(|m| m.weight()).unwrap_or(0)
    }
}

/// How the (a, b) sum of Ĵ is organized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// One expansion per T-orbit {(a₀ + kb, b)}; the sum over k is a geometric series.
    Orbit,
    /// Every (a, b) ∈ (ℤ/N)² separately.
    Direct,
}

/// Which A_{a,b} to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixChoice {
    Standard,
    Alternate,
}

type Scalars = (CSeries, CSeries);

struct Expander<'a> {
    input: &'a JInput,
    trunc: Q,
    choice: MatrixChoice,
    cache: Mutex<HashMap<(u64, (i64, i64)), Scalars>>,
}

impl Expander<'_> {
    fn matrix(&self, a: i64, b: i64) -> SL2Matrix {
        match self.choice {
            MatrixChoice::Standard => choose_a_ab(a, b, self.input.n),
            MatrixChoice::Alternate => choose_a_ab_alt(a, b, self.input.n),
        }
    }

    /// (X|A, Y|A) for member d, reusing a coset representative when the character is trivial.
    fn scalars(&self, d: u64, m: &SL2Matrix) -> Result<Scalars, WeilError> {
        let f = &self.input.members[&d];
        if !(f.x.has_trivial_character() && f.y.has_trivial_character()) {
            return Ok(f.parts_at(m, &self.trunc)?);
        }
        let level = num_integer::lcm(f.x.level, f.y.level);
        let (key, rep) = coset_representative(m, level);
        if let Some(s) = self.cache.lock().unwrap().get(&(d, key)) {
            return Ok(s.clone());
        }
        let s = f.parts_at(&rep, &self.trunc)?;
        self.cache.lock().unwrap().insert((d, key), s.clone());
        Ok(s)
    }

    /// Theta components h_r(τ) = Σ_n c(n, r) q^{n − r²/4} of φ_d|A, read off the full
    /// two-variable expansion.
    fn components(&self, d: u64, m: &SL2Matrix, out_trunc: &Q) -> Result<[CSeries; 2], WeilError> {
        let (x, y) = self.scalars(d, m)?;
        let n = self.trunc.ceil().to_integer().to_i64().unwrap() + 1;
        let full = phi_0_c(n).mul_scalar(&x).add(&phi_m2_c(n).mul_scalar(&y)).truncate(&self.trunc);
        let mut h: [Vec<(Q, Cyclotomic)>; 2] = [Vec::new(), Vec::new()];
        for (nn, rr, c) in full.terms() {
            let r = rr.to_integer().to_i64().unwrap();
            if r == 0 || r == 1 {
                let e = &nn - q(r * r, 4);
                if &e < out_trunc {
                    h[r as usize].push((e, c));
                }
            }
        }
        Ok(h.map(|terms| {
            terms.into_iter().fold(CSeries::zero_to(Some(out_trunc.clone())), |acc, (e, c)| {
                acc.add(&CSeries::monomial(&e, c))
            })
        }))
    }
}

fn phi_0_c(n: i64) -> crate::exact_algebra::JacobiSeries<Cyclotomic> {
    crate::modular_blocks::phi_0(n).to_cyclotomic()
}

fn phi_m2_c(n: i64) -> crate::exact_algebra::JacobiSeries<Cyclotomic> {
    phi_m2(n).to_cyclotomic()
}

type Acc = BTreeMap<(DiscElement, Q), Cyclotomic>;

fn accumulate(acc: &mut Acc, g: DiscElement, e: Q, v: Cyclotomic) {
    match acc.entry((g, e)) {
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let s = o.get().add(&v);
            *o.get_mut() = s;
        }
        std::collections::btree_map::Entry::Vacant(x) => {
            x.insert(v);
        }
    }
}

fn finish(acc: Acc, n: u64, t: u64, weight: Q, trunc: Q) -> Result<VVForm, WeilError> {
    let mut comps: BTreeMap<DiscElement, Vec<(Q, Q)>> = BTreeMap::new();
    for ((g, e), v) in acc {
        let r = v.to_rational().ok_or_else(|| WeilError::NonRational {
            label: g.label(n, t),
            exp: e.clone(),
            value: format!("{v}"),
        })?;
        if !r.is_zero() {
            comps.entry(g).or_default().push((e, r));
        }
    }
    let components = comps
        .into_iter()
        .map(|(g, terms)| {
            let s = terms
                .into_iter()
                .fold(QSeries::zero_to(Some(trunc.clone())), |acc, (e, c)| acc.add(&QSeries::monomial(&e, c)));
            (g, s)
        })
        .collect();
    Ok(VVForm { n, t, weight, components, trunc })
}

/// Ĵ((φ_d)_{d | N}) = (1/N) Σ_{a,b,c} e(−ac/N) Σ_{n,r} c_{a,b}(n, r) q^{n − r²/4} 𝔢_{(c/N, r/2, b/N)},
/// where c_{a,b} are the coefficients of φ_{gcd(a,b,N)}|A_{a,b}. Components are known below q^trunc.
pub fn jmap(input: &JInput, trunc: &Q) -> Result<VVForm, WeilError> {
    jmap_with(input, trunc, Strategy::Orbit, MatrixChoice::Standard)
}

pub fn jmap_with(input: &JInput, trunc: &Q, strategy: Strategy, choice: MatrixChoice) -> Result<VVForm, WeilError> {
    let n = input.n;
    let ni = n as i64;
    let t = 1u64;
    let ex = Expander { input, trunc: trunc + q(1, 4), choice, cache: Mutex::new(HashMap::new()) };
    let per_b = |b: i64| -> Result<Acc, WeilError> {
        let mut acc = Acc::new();
        let g = gcd(b, ni);
        let a_range: Vec<i64> = match strategy {
            Strategy::Orbit => (0..g).collect(),
            Strategy::Direct => (0..ni).collect(),
        };
        for a in a_range {
            let d = gcd3(a, b, ni) as u64;
            let Some(f) = input.members.get(&d) else { continue };
            if f.is_zero() {
                continue;
            }
            let m = ex.matrix(a, b);
            let h = ex.components(d, &m, trunc)?;
            for (r, hr) in h.iter().enumerate() {
                let r = r as i64;
                for (e, coef) in hr.iter() {
                    let nn = &e + q(r * r, 4);
                    for c in 0..ni {
                        let w = match strategy {
                            Strategy::Orbit => {
                                // Σ_{k < N/g} e(−k(bc/N + n)) over the orbit a + kb
                                let x = q(b * c, ni) + &nn;
                                if !(&x * qi(ni / g)).is_integer() {
                                    return Err(WeilError::ChoiceDependent { a, b, exp: e.clone() });
                                }
                                if !x.is_integer() {
                                    continue;
                                }
                                q(1, g)
                            }
                            Strategy::Direct => q(1, ni),
                        };
                        let v = coef.mul(&Cyclotomic::e(&q(-a * c, ni))).scale(&w);
                        accumulate(&mut acc, DiscElement::new(c, r, b, n, t), e.clone(), v);
                    }
                }
            }
        }
        Ok(acc)
    };
    let parts: Vec<Acc> = (0..ni).into_par_iter().map(per_b).collect::<Result<_, _>>()?;
    let mut acc = Acc::new();
    for p in parts {
        for ((g, e), v) in p {
            accumulate(&mut acc, g, e, v);
        }
    }
    finish(acc, n, t, qi(input.weight()) - q(1, 2), trunc.clone())
}

/// Components h_r of an index-t form with φ = Σ_r h_r θ_{t,r}: h_r(τ) = Σ_n c(n, r) q^{n − r²/4t}
/// for r in (−t, t]. Fails if c(n, r) is not determined by 4tn − r² and r mod 2t.
pub fn theta_decompose(phi: &QJacobi, t: u64) -> Result<BTreeMap<i64, QSeries>, WeilError> {
    let ti = t as i64;
    let k = phi.trunc().cloned().expect("theta decomposition needs a truncated series");
    let mut out: BTreeMap<i64, QSeries> = BTreeMap::new();
    for r in (-ti + 1)..=ti {
        let shift = q(r * r, 4 * ti);
        let tr = &k - &shift;
        let mut s = QSeries::zero_to(Some(tr.clone()));
        for (nn, rr, c) in phi.terms() {
            if rr == qi(r) {
                s = s.add(&QSeries::monomial(&(&nn - &shift), c));
            }
        }
        out.insert(modp(r, 2 * ti), s);
    }
    for (nn, rr, c) in phi.terms() {
        if !rr.is_integer() {
            return Err(WeilError::DependenceViolation { n: nn, r: rr });
        }
        let r = rr.to_integer().to_i64().unwrap();
        let e = &nn - q(r * r, 4 * ti);
        if let Some(v) = out[&modp(r, 2 * ti)].coeff(&e) {
            if v != c {
                return Err(WeilError::DependenceViolation { n: nn, r: rr });
            }
        }
    }
    Ok(out)
}

/// Ĵ(η·φ₋₂,₁) through the theta decomposition φ₋₂,₁ = f₀θ₀ + f_{1/2}θ₁ and the scalar transform
/// Ψ_{c,b} = (1/N)Σ_{a : gcd(a,b,N)=1} e(−ac/N)·(η|A_{a,b}): F_{(c/N, μ, b/N)} = Ψ_{c,b}·f_μ.
pub fn jmap_theta_route(input: &JInput, trunc: &Q) -> Result<VVForm, WeilError> {
    let f = &input.members[&1];
    if !f.x.is_zero() || input.members.iter().any(|(d, m)| *d != 1 && !m.is_zero()) {
        return Err(WeilError::NotThetaInput);
    }
    let n = input.n;
    let ni = n as i64;
    let strunc = trunc + q(1, 4);
    let k = strunc.ceil().to_integer().to_i64().unwrap() + 1;
    let theta = theta_decompose(&phi_m2(k), 1)?;
    let per_b = |b: i64| -> Result<Acc, WeilError> {
        let mut psi: BTreeMap<i64, CSeries> = BTreeMap::new();
        for a in 0..ni {
            if gcd3(a, b, ni) != 1 {
                continue;
            }
            let y = f.y.at_cusp(&choose_a_ab(a, b, n), &strunc)?;
            for c in 0..ni {
                let term = y.scale_by(&Cyclotomic::e(&q(-a * c, ni))).scale(&q(1, ni));
                let slot = psi.entry(c).or_insert_with(|| CSeries::zero_to(Some(strunc.clone())));
                *slot = slot.add(&term);
            }
        }
        let mut acc = Acc::new();
        for (c, s) in psi {
            for (r, fr) in &theta {
                let prod = s.mul(&fr.to_cyclotomic()).truncate(trunc);
                for (e, v) in prod.iter() {
                    accumulate(&mut acc, DiscElement::new(c, *r, b, n, 1), e, v.clone());
                }
            }
        }
        Ok(acc)
    };
    let parts: Vec<Acc> = (0..ni).into_par_iter().map(per_b).collect::<Result<_, _>>()?;
    let mut acc = Acc::new();
    for p in parts {
        for ((g, e), v) in p {
            accumulate(&mut acc, g, e, v);
        }
    }
    finish(acc, n, 1, qi(input.weight()) - q(1, 2), trunc.clone())
}

/// Negative-exponent coefficients and the coefficient of q⁰𝔢₀.
pub fn principal_part(f: &VVForm) -> PrincipalPart {
    let mut p = PrincipalPart { n: f.n, t: f.t, constant: constant_term(f), entries: BTreeMap::new() };
    for (g, s) in &f.components {
        for (e, c) in s.iter() {
            if e.is_negative() {
                p.add(*g, e, c.clone());
            }
        }
    }
    p
}

pub fn constant_term(f: &VVForm) -> Q {
    f.coeff(&DiscElement::zero(), &qi(0))
}

/// f_{(x, r, y)} = f_{(ux, r, u⁻¹y)} for every unit u, on all computed coefficients.
pub fn symmetry_check(f: &VVForm) -> bool {
    let ni = f.n as i64;
    for (g, s) in &f.components {
        for u in units(f.n) {
            let u = u as i64;
            let ui = mod_inverse(u, ni).unwrap();
            let h = DiscElement::new(g.x * u, g.r, g.y * ui, f.n, f.t);
            if f.component(&h) != *s {
                return false;
            }
        }
    }
    true
}

/// Evaluates a label expression such as "a/9", "-2ainv/9", "1/3" or "c/36".
fn eval_label(s: &str, a: i64, ainv: i64, c: i64) -> Option<Q> {
    let s = s.trim();
    for (sym, val) in [("ainv", ainv), ("a", a), ("c", c)] {
        if let Some(pos) = s.find(sym) {
            let (head, tail) = (&s[..pos], &s[pos + sym.len()..]);
            let coef: i64 = match head {
                "" => 1,
                "-" => -1,
                h => h.parse().ok()?,
            };
            let den: i64 = tail.strip_prefix('/')?.parse().ok()?;
            return Some(q(coef * val, den));
        }
    }
    parse_q(s)
}

/// The principal part listed by a table entry, checking each exponent against −Q(γ) + ℤ.
pub fn table_principal_part(entry: &TableClass, n: u64) -> Result<PrincipalPart, WeilError> {
    let t = 1u64;
    let fail = |detail: String| WeilError::Table { class: entry.name.clone(), detail };
    let mut p = PrincipalPart { n, t, constant: qi(entry.constant), entries: BTreeMap::new() };
    for term in &entry.term {
        let coeff = parse_q(&term.coeff).ok_or_else(|| fail(format!("bad coefficient {}", term.coeff)))?;
        let exp = parse_q(&term.exp).ok_or_else(|| fail(format!("bad exponent {}", term.exp)))?;
        let m = term.modulus.unwrap_or(1) as i64;
        let mut params: Vec<(i64, i64, i64)> = Vec::new();
        match term.sum {
            SumKind::Single => params.push((0, 0, 0)),
            SumKind::Units => {
                for a in units(m as u64) {
                    let a = a as i64;
                    params.push((a, mod_inverse(a, m).unwrap(), 0));
                }
            }
            SumKind::All => params.extend((0..m).map(|a| (a, 0, 0))),
            SumKind::Pairs => {
                for a in 0..m {
                    for c in 0..m {
                        if gcd3(a, c, m) == 1 && term.products.contains(&modp(a * c, m)) {
                            params.push((a, 0, c));
                        }
                    }
                }
            }
        }
        for (a, ainv, c) in params {
            let mut coords = Vec::new();
            for (i, s) in term.label.iter().enumerate() {
                let v = eval_label(s, a, ainv, c).ok_or_else(|| fail(format!("bad label {s}")))?;
                let scale = if i == 1 { 2 * t as i64 } else { n as i64 };
                let k = &v * qi(scale);
                if !k.is_integer() {
                    return Err(fail(format!("label {s} is not in (1/{scale})ℤ")));
                }
                coords.push(k.to_integer().to_i64().unwrap());
            }
            let g = DiscElement::new(coords[0], coords[1], coords[2], n, t);
            if !(&exp + g.norm(n, t)).is_integer() {
                return Err(fail(format!(
                    "q^{} at {} is outside −Q(γ) + ℤ",
                    fmt_q(&exp),
                    g.label(n, t)
                )));
            }
            if !exp.is_negative() {
                return Err(fail(format!("exponent {} is not negative", fmt_q(&exp))));
            }
            p.add(g, exp.clone(), coeff.clone());
        }
    }
    Ok(p)
}

/// Level-raised input of a table entry: coeff·∏η(kτ)^b·φ₋₂,₁ on Γ₀(N).
pub fn table_input(entry: &TableClass, n: u64) -> Result<JInput, WeilError> {
    let raw = entry
        .input
        .as_ref()
        .ok_or_else(|| WeilError::Table { class: entry.name.clone(), detail: "no input form".into() })?;
    let c = parse_q(&raw.coeff)
        .ok_or_else(|| WeilError::Table { class: entry.name.clone(), detail: "bad coefficient".into() })?;
    JInput::eta_input(&entry.name, EtaQuotient::new(raw.factors.clone(), c), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::builtin;
    use crate::m24_classes::find_class;
    use crate::modular_blocks::phi_0;

    fn jclass(name: &str) -> (JInput, &'static ClassRecord) {
        let r = find_class(name).unwrap();
        (JInput::from_class(r).unwrap(), r)
    }

    #[test]
    fn norms() {
        let g = DiscElement::new(1, 1, 8, 9, 1);
        assert_eq!(g.norm(9, 1), frac(&(q(1, 4) + q(8, 9))));
        assert_eq!(DiscElement::zero().norm(5, 1), qi(0));
    }

    #[test]
    fn theta_components_of_weak_forms() {
        let h = theta_decompose(&phi_m2(4), 1).unwrap();
        assert_eq!(h[&0].coeff(&qi(0)), Some(qi(-2)));
        assert_eq!(h[&0].coeff(&qi(1)), Some(qi(-12)));
        assert_eq!(h[&1].coeff(&q(-1, 4)), Some(qi(1)));
        let h = theta_decompose(&phi_0(4), 1).unwrap();
        for (e, v) in [(0, 10), (1, 108), (2, 808), (3, 4016)] {
            assert_eq!(h[&0].coeff(&qi(e)), Some(qi(v)));
        }
        for (e, v) in [(q(-1, 4), 1), (q(3, 4), -64), (q(7, 4), -513), (q(11, 4), -2752)] {
            assert_eq!(h[&1].coeff(&e), Some(qi(v)));
        }
        let bad = phi_0(3).add(&QJacobi::monomial(&qi(1), &qi(3), qi(1)));
        assert!(theta_decompose(&bad, 1).is_err());
    }

    #[test]
    fn principal_parts_of_small_classes() {
        let (j, _) = jclass("1A");
        let f = jmap(&j, &qi(1)).unwrap();
        let p = principal_part(&f);
        assert_eq!(p.constant, qi(20));
        assert_eq!(p.entries.len(), 1);
        assert_eq!(p.entries[&(DiscElement::new(0, 1, 0, 1, 1), q(-1, 4))], qi(2));
        for name in ["2B", "3B", "4A"] {
            let (j, r) = jclass(name);
            let f = jmap(&j, &q(1, 4)).unwrap();
            let want = table_principal_part(builtin().appendix_a_class(name).unwrap(), r.level).unwrap();
            let got = principal_part(&f);
            assert_eq!(got.diff(&want), Vec::<String>::new(), "{name}");
            assert!(symmetry_check(&f));
            assert!(f.exponents_consistent());
        }
    }

    #[test]
    fn strategies_and_choices_agree() {
        for name in ["2B", "4C", "6A"] {
            let (j, _) = jclass(name);
            let t = q(1, 2);
            let a = jmap_with(&j, &t, Strategy::Orbit, MatrixChoice::Standard).unwrap();
            let b = jmap_with(&j, &t, Strategy::Direct, MatrixChoice::Standard).unwrap();
            let c = jmap_with(&j, &t, Strategy::Orbit, MatrixChoice::Alternate).unwrap();
            assert_eq!(a, b, "{name}");
            assert_eq!(a, c, "{name}");
        }
    }

    #[test]
    fn theta_route_for_3b() {
        let r = find_class("3B").unwrap();
        let j = JInput::eta_input("3B", r.eta_product(), 9).unwrap();
        let f = jmap_theta_route(&j, &q(1, 2)).unwrap();
        for a in units(9) {
            let a = a as i64;
            let ai = mod_inverse(a, 9).unwrap();
            let g = |r: i64, y: i64| DiscElement::new(a, r, y, 9, 1);
            assert_eq!(f.coeff(&g(1, -ai), &q(-5, 36)), q(1, 81));
            assert_eq!(f.coeff(&g(0, -ai), &q(1, 9)), q(-2, 81));
            assert_eq!(f.coeff(&g(1, 5 * ai), &q(7, 36)), q(-8, 81));
            assert_eq!(f.coeff(&g(0, 5 * ai), &q(4, 9)), q(16, 81));
        }
        assert_eq!(f, jmap(&j, &q(1, 2)).unwrap());
    }

    #[test]
    fn scrambled_form_fails_symmetry() {
        let (j, _) = jclass("3B");
        let mut f = jmap(&j, &q(1, 4)).unwrap();
        let key = *f.components.keys().find(|g| g.x == 1).unwrap();
        let s = f.components[&key].scale(&qi(2));
        f.components.insert(key, s);
        assert!(!symmetry_check(&f));
    }

    #[test]
    fn table_typo_is_caught() {
        let mut e = builtin().appendix_b_class("4C").unwrap().clone();
        let i = e.term.iter().position(|t| t.exp == "-3/16").unwrap();
        e.term[i].exp = "3/16".into();
        assert!(matches!(table_principal_part(&e, 16), Err(WeilError::Table { .. })));
    }
}
