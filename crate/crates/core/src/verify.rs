//! Verification suites: every exact identity the library is expected to reproduce, run per class
//! and collected into a deterministic report.

use crate::borcherds_lifts::{
    borcherds_product, divisors, duality_d0, hecke_identity_defect, gritsenko_lift, leading_form, mult_and_weyl,
    quasi_pullback, FJExpansion, LiftError, LiftFamily, ProductMode, PullbackSeries,
};
use crate::cusp_transform::{eta_quotient_at_cusp, SL2Matrix};
use crate::data::builtin;
use crate::exact_algebra::rational::{fmt_q, q, qi};
use crate::exact_algebra::{QJacobi, Q};
use crate::m24_classes::{class_table, find_class, ClassRecord};
use crate::modular_blocks::EtaQuotient;
use crate::twisted_genera::{genus, genus_family, validate_against_appendix_a};
use crate::weil_lift::{
    constant_term, jmap, jmap_theta_route, principal_part, symmetry_check, table_input, table_principal_part,
    DiscElement, JInput, PrincipalPart, VVForm,
};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

/// Classes whose Borcherds product is holomorphic.
pub const HOLOMORPHIC: [&str; 5] = ["1A", "2A", "2B", "3A", "4B"];
/// Classes whose principal part is even, so that Φ_g has a square root.
pub const EVEN: [&str; 13] = ["1A", "2A", "2B", "3A", "3B", "4A", "4B", "4C", "5A", "6A", "6B", "10A", "11A"];
/// Classes with Φ_g an additive lift of η_gφ₋₂,₁.
pub const ADDITIVE: [&str; 10] = ["1A", "2A", "2B", "3A", "4A", "4B", "5A", "6A", "7AB", "8A"];
/// Classes where a weight-zero correction product is needed.
pub const CORRECTED: [&str; 2] = ["3B", "4C"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    AppendixA,
    AppendixB,
    Weights,
    Weyl,
    Classification,
    ThreeModes,
    LeadingCoefficient,
    Duality,
    Pullback,
    AdditiveLift,
    HeckeIdentity,
    CuspAnchors,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::AppendixA,
        Suite::AppendixB,
        Suite::Weights,
        Suite::Weyl,
        Suite::Classification,
        Suite::ThreeModes,
        Suite::LeadingCoefficient,
        Suite::Duality,
        Suite::Pullback,
        Suite::AdditiveLift,
        Suite::HeckeIdentity,
        Suite::CuspAnchors,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::AppendixA => "appendix-a",
            Suite::AppendixB => "appendix-b",
            Suite::Weights => "weights",
            Suite::Weyl => "weyl",
            Suite::Classification => "classification",
            Suite::ThreeModes => "modes",
            Suite::LeadingCoefficient => "leading",
            Suite::Duality => "duality",
            Suite::Pullback => "pullback",
            Suite::AdditiveLift => "additive-lift",
            Suite::HeckeIdentity => "hecke-identity",
            Suite::CuspAnchors => "cusp",
        }
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        // short names kept for scripts written against the original interface
        let s = match s {
            "thm13" => "classification",
            "thm14" => "additive-lift",
            other => other,
        };
        Suite::ALL
            .iter()
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

/// Truncation orders used by the suites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orders {
    /// Box for three-mode agreement on small levels, and the level bound.
    pub modes_small: (i64, i64),
    pub modes_small_level: u64,
    /// Box for three-mode agreement on every class.
    pub modes_all: (i64, i64),
    /// q-order of the leading Fourier–Jacobi coefficient.
    pub leading_q: i64,
    /// Box for duality and the quasi-pullback.
    pub pullback: (i64, i64),
    pub additive: (i64, i64),
    pub corrected: (i64, i64),
    /// Last q-power of the Hecke identity for φ_g.
    pub hecke_identity_q: i64,
}

impl Default for Orders {
    fn default() -> Self {
        Orders {
            modes_small: (3, 3),
            modes_small_level: 16,
            modes_all: (2, 2),
            leading_q: 8,
            pullback: (4, 4),
            additive: (3, 3),
            corrected: (2, 2),
            hecke_identity_q: 3,
        }
    }
}

/// One check: a named comparison for one class (or "*" for cross-class checks).
#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub suite: Suite,
    pub name: String,
    pub class: String,
    pub passed: bool,
    pub expected: String,
    pub actual: String,
    pub runtime: Duration,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn suite_passed(&self, suite: Suite) -> bool {
        self.checks.iter().filter(|c| c.suite == suite).all(|c| c.passed)
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.sort();
    }

    fn sort(&mut self) {
        self.checks.sort_by(|a, b| (a.suite, class_key(&a.class), &a.name).cmp(&(b.suite, class_key(&b.class), &b.name)));
    }

    /// Runtimes are left out unless asked for, so that two runs give identical JSON.
    pub fn to_json(&self, timings: bool) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let mut v = json!({
                    "suite": c.suite.name(),
                    "name": c.name,
                    "class": c.class,
                    "status": if c.passed { "pass" } else { "fail" },
                    "expected": c.expected,
                    "actual": c.actual,
                });
                if timings {
                    v["runtime_ms"] = json!(c.runtime.as_millis() as u64);
                }
                v
            })
            .collect();
        json!({ "status": if self.passed() { "pass" } else { "fail" }, "checks": checks })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            let _ = write!(out, "{status}  {:<14} {:<5} {}", c.suite.name(), c.class, c.name);
            if !c.passed {
                let _ = write!(out, "\n      expected {}\n      actual   {}", c.expected, c.actual);
            }
            let _ = writeln!(out, "  ({:.2?})", c.runtime);
        }
        let failed = self.failures().count();
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), failed);
        out
    }
}

/// Table order of a class name; "*" sorts first.
fn class_key(name: &str) -> usize {
    class_table().iter().position(|c| c.name == name).map(|i| i + 1).unwrap_or(0)
}

/// Memoized per-class objects shared between suites.
#[derive(Default)]
pub struct Workspace {
    pub orders: Orders,
    lifts: Mutex<BTreeMap<String, Arc<VVForm>>>,
    families: Mutex<BTreeMap<String, Arc<LiftFamily>>>,
}

impl Workspace {
    pub fn new(orders: Orders) -> Self {
        Workspace { orders, ..Default::default() }
    }

    /// Ĵ of the genus family, known below q^{1/4}.
    pub fn lift(&self, rec: &ClassRecord) -> Result<Arc<VVForm>, String> {
        if let Some(f) = self.lifts.lock().unwrap().get(&rec.name) {
            return Ok(f.clone());
        }
        let input = JInput::from_class(rec).map_err(|e| e.to_string())?;
        let f = Arc::new(jmap(&input, &q(1, 4)).map_err(|e| e.to_string())?);
        self.lifts.lock().unwrap().insert(rec.name.clone(), f.clone());
        Ok(f)
    }

    fn family_rows(&self) -> i64 {
        let o = &self.orders;
        // the product needs q^{(q_max − 1)(s_max − 1)}
        [o.modes_small, o.modes_all, o.pullback, o.additive, o.corrected]
            .iter()
            .map(|&(a, b)| (a - 1).max(0) * (b - 1).max(0) + 1)
            .max()
            .unwrap()
    }

    pub fn family(&self, rec: &ClassRecord) -> Result<Arc<LiftFamily>, String> {
        if let Some(f) = self.families.lock().unwrap().get(&rec.name) {
            return Ok(f.clone());
        }
        let fam = Arc::new(LiftFamily::from_class(rec, self.family_rows()).map_err(|e| e.to_string())?);
        self.families.lock().unwrap().insert(rec.name.clone(), fam.clone());
        Ok(fam)
    }

    pub fn product(&self, rec: &ClassRecord, mode: ProductMode, q_max: i64, s_max: i64) -> Result<FJExpansion, String> {
        borcherds_product(&*self.family(rec)?, mode, q_max, s_max).map_err(|e| e.to_string())
    }
}

fn timed(suite: Suite, class: &str, name: &str, f: impl FnOnce() -> Result<(String, String), String>) -> CheckRecord {
    let start = Instant::now();
    let (passed, expected, actual) = match f() {
        Ok((e, a)) => (e == a, e, a),
        Err(err) => (false, "no error".to_string(), format!("error: {err}")),
    };
    CheckRecord {
        suite,
        name: name.to_string(),
        class: class.to_string(),
        passed,
        expected,
        actual,
        runtime: start.elapsed(),
    }
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

fn set_string<'a>(names: impl IntoIterator<Item = &'a str>) -> String {
    format!("{{{}}}", names.into_iter().collect::<Vec<_>>().join(", "))
}

fn selected(classes: Option<&[String]>, keep: impl Fn(&ClassRecord) -> bool) -> Result<Vec<&'static ClassRecord>, String> {
    match classes {
        None => Ok(class_table().iter().filter(|c| keep(c)).collect()),
        Some(names) => names
            .iter()
            .map(|n| find_class(n).ok_or_else(|| format!("unknown class {n}")))
            .filter(|r| r.as_ref().map_or(true, |c| keep(c)))
            .collect(),
    }
}

/// Runs one suite on the given classes (all relevant classes when `classes` is None).
pub fn run_suite(ws: &Workspace, suite: Suite, classes: Option<&[String]>) -> Result<VerificationReport, String> {
    let o = ws.orders.clone();
    let per_class = |keep: &dyn Fn(&ClassRecord) -> bool,
                     check: &(dyn Fn(&ClassRecord) -> Vec<CheckRecord> + Sync)|
     -> Result<Vec<CheckRecord>, String> {
        let recs = selected(classes, keep)?;
        Ok(recs.par_iter().flat_map(|r| check(r)).collect())
    };
    let checks = match suite {
        Suite::AppendixA => per_class(&|_| true, &|rec| vec![check_appendix_a(ws, rec)])?,
        Suite::AppendixB => per_class(&|c| CORRECTED.contains(&c.name.as_str()), &|rec| check_appendix_b(rec))?,
        Suite::Weights => per_class(&|_| true, &|rec| vec![check_weights(ws, rec)])?,
        Suite::Weyl => per_class(&|_| true, &|rec| vec![check_weyl(ws, rec)])?,
        Suite::Classification => check_classification(ws, classes)?,
        Suite::ThreeModes => per_class(&|_| true, &|rec| {
            let mut v = vec![check_modes(ws, rec, o.modes_all)];
            if rec.level <= o.modes_small_level {
                v.push(check_modes(ws, rec, o.modes_small));
            }
            v
        })?,
        Suite::LeadingCoefficient => per_class(&|_| true, &|rec| vec![check_leading(ws, rec, o.leading_q)])?,
        Suite::Duality => per_class(&|_| true, &|rec| check_duality(ws, rec, o.pullback))?,
        Suite::Pullback => per_class(&|_| true, &|rec| vec![check_pullback(ws, rec, o.pullback)])?,
        Suite::AdditiveLift => per_class(
            &|c| ADDITIVE.contains(&c.name.as_str()) || CORRECTED.contains(&c.name.as_str()),
            &|rec| check_additive(ws, rec),
        )?,
        Suite::HeckeIdentity => {
            per_class(&|c| c.weight() > qi(0), &|rec| vec![check_hecke_identity(rec, o.hecke_identity_q)])?
        }
        Suite::CuspAnchors => check_cusp_anchors(),
    };
    let mut report = VerificationReport { checks };
    report.sort();
    Ok(report)
}

pub fn run_suites(ws: &Workspace, suites: &[Suite], classes: Option<&[String]>) -> Result<VerificationReport, String> {
    let mut report = VerificationReport::default();
    for s in suites {
        report.merge(run_suite(ws, *s, classes)?);
    }
    Ok(report)
}

fn check_appendix_a(ws: &Workspace, rec: &ClassRecord) -> CheckRecord {
    timed(Suite::AppendixA, &rec.name, "principal part of Ĵ matches the table", || {
        let f = ws.lift(rec)?;
        let got = principal_part(&f);
        let entry = builtin().appendix_a_class(&rec.name).ok_or("no table entry")?;
        let want = table_principal_part(entry, rec.level).map_err(|e| e.to_string())?;
        let family = genus_family(rec, 3).map_err(|e| e.to_string())?;
        validate_against_appendix_a(&family).map_err(|e| e.to_string())?;
        let mut problems = got.diff(&want);
        if !got.all_integral() {
            problems.push("non-integral entry".into());
        }
        if !symmetry_check(&f) {
            problems.push("unit symmetry fails".into());
        }
        // a longer truncation must not change the principal part
        let deeper = jmap(&JInput::from_class(rec).map_err(|e| e.to_string())?, &q(3, 4)).map_err(|e| e.to_string())?;
        if !principal_part(&deeper).diff(&got).is_empty() {
            problems.push("principal part moves when truncated at q^(3/4)".into());
        }
        Ok((format!("{} orbits, integral", want.orbits().len()), describe_pp(&got, problems)))
    })
}

fn describe_pp(p: &PrincipalPart, problems: Vec<String>) -> String {
    if problems.is_empty() {
        format!("{} orbits, integral", p.orbits().len())
    } else {
        problems.join("; ")
    }
}

fn check_appendix_b(rec: &ClassRecord) -> Vec<CheckRecord> {
    let pp = timed(Suite::AppendixB, &rec.name, "principal part of Ĵ(f_g) matches the table", || {
        let entry = builtin().appendix_b_class(&rec.name).ok_or("no table entry")?;
        let input = table_input(entry, rec.level).map_err(|e| e.to_string())?;
        let f = jmap(&input, &q(1, 4)).map_err(|e| e.to_string())?;
        let want = table_principal_part(entry, rec.level).map_err(|e| e.to_string())?;
        let got = principal_part(&f);
        Ok((format!("{} orbits, integral", want.orbits().len()), describe_pp(&got, got.diff(&want))))
    });
    let rows = timed(Suite::AppendixB, &rec.name, "f_g agrees with the listed rows", || {
        let entry = builtin().appendix_b_class(&rec.name).ok_or("no table entry")?;
        let input = table_input(entry, rec.level).map_err(|e| e.to_string())?;
        let want = crate::twisted_genera::table_rows_series(&entry.rows);
        let got = input.members[&1].at_infinity(entry.rows.len() as i64);
        Ok((yes_no(true), yes_no(got.same_terms(&want))))
    });
    vec![pp, rows]
}

fn check_weights(ws: &Workspace, rec: &ClassRecord) -> CheckRecord {
    timed(Suite::Weights, &rec.name, "α(0,0)/2 = ½Σ mult_d(0,0) = ½Σb − 2", || {
        let alpha = constant_term(&*ws.lift(rec)?) / qi(2);
        let mults = mult_and_weyl(&*ws.family(rec)?).weight;
        let shape = rec.weight();
        Ok((
            format!("{0}, {0}, {0}", fmt_q(&shape)),
            format!("{}, {}, {}", fmt_q(&alpha), fmt_q(&mults), fmt_q(&shape)),
        ))
    })
}

fn check_weyl(ws: &Workspace, rec: &ClassRecord) -> CheckRecord {
    timed(Suite::Weyl, &rec.name, "Weyl vector (A, B, C)", || {
        let (a, b, c) = mult_and_weyl(&*ws.family(rec)?).weyl;
        Ok(("(1, 1, 1)".into(), format!("({}, {}, {})", fmt_q(&a), fmt_q(&b), fmt_q(&c))))
    })
}

/// Whether every divisor of Φ_g has nonnegative multiplicity, and whether the principal part is even.
pub fn classify(ws: &Workspace, rec: &ClassRecord) -> Result<(bool, bool), String> {
    let pp = principal_part(&*ws.lift(rec)?);
    let deepest = pp.entries.keys().map(|(_, e)| -e.clone()).max().unwrap_or_else(|| qi(0));
    let divs = divisors(&pp, &deepest);
    Ok((divs.iter().all(|d| d.multiplicity >= qi(0)), pp.all_even()))
}

fn check_classification(ws: &Workspace, classes: Option<&[String]>) -> Result<Vec<CheckRecord>, String> {
    let recs = selected(classes, |_| true)?;
    let start = Instant::now();
    let flags: Vec<Result<(bool, bool), String>> = recs.par_iter().map(|r| classify(ws, r)).collect();
    let elapsed = start.elapsed();
    let mut out = Vec::new();
    let mut holo = Vec::new();
    let mut even = Vec::new();
    let mut error = None;
    for (r, f) in recs.iter().zip(flags) {
        match f {
            Ok((h, e)) => {
                if h {
                    holo.push(r.name.as_str());
                }
                if e {
                    even.push(r.name.as_str());
                }
            }
            Err(e) => error = Some(format!("{}: {e}", r.name)),
        }
    }
    let in_scope = |list: &[&'static str]| -> Vec<&str> {
        recs.iter().map(|r| r.name.as_str()).filter(|n| list.contains(n)).collect()
    };
    for (name, want, got) in [
        ("holomorphic products", in_scope(&HOLOMORPHIC), holo),
        ("even principal parts", in_scope(&EVEN), even),
    ] {
        let actual = match &error {
            Some(e) => format!("error: {e}"),
            None => set_string(got),
        };
        let expected = set_string(want);
        out.push(CheckRecord {
            suite: Suite::Classification,
            name: name.into(),
            class: "*".into(),
            passed: expected == actual,
            expected,
            actual,
            runtime: elapsed,
        });
    }
    Ok(out)
}

fn check_modes(ws: &Workspace, rec: &ClassRecord, (q_max, s_max): (i64, i64)) -> CheckRecord {
    timed(Suite::ThreeModes, &rec.name, &format!("product = fj = exp to ({q_max}, {s_max})"), || {
        let p = ws.product(rec, ProductMode::Product, q_max, s_max)?;
        let f = ws.product(rec, ProductMode::FourierJacobi, q_max, s_max)?;
        let e = ws.product(rec, ProductMode::Exponential, q_max, s_max)?;
        let n = p.to_bivariate().cells().map(|(_, r)| r.len()).sum::<usize>();
        Ok((
            format!("agree on {n} coefficients"),
            if p.agrees_with(&f) && p.agrees_with(&e) {
                format!("agree on {n} coefficients")
            } else {
                format!("product/fj {}, product/exp {}", yes_no(p.agrees_with(&f)), yes_no(p.agrees_with(&e)))
            },
        ))
    })
}

fn check_leading(ws: &Workspace, rec: &ClassRecord, q_order: i64) -> CheckRecord {
    timed(Suite::LeadingCoefficient, &rec.name, &format!("s¹ coefficient = η_gφ₋₂,₁ to q^{q_order}"), || {
        let phi = ws.product(rec, ProductMode::Product, q_order, 1)?;
        let (psi, _, _) = leading_form(rec, q_order + 1);
        let got = phi.coeffs.get(&1).cloned().unwrap_or_else(|| QJacobi::zero_to(Some(qi(q_order + 1))));
        let terms = psi.terms().len();
        Ok((format!("{terms} terms equal"), if got.same_terms(&psi) { format!("{terms} terms equal") } else { first_difference(&got, &psi) }))
    })
}

fn first_difference(a: &QJacobi, b: &QJacobi) -> String {
    let d = a.add(&b.scale(&qi(-1)));
    match d.terms().first() {
        Some((n, r, c)) => format!("differs at q^{} ζ^{} by {}", fmt_q(n), fmt_q(r), fmt_q(c)),
        None => "equal".into(),
    }
}

fn check_duality(ws: &Workspace, rec: &ClassRecord, (q_max, s_max): (i64, i64)) -> Vec<CheckRecord> {
    let d0 = timed(Suite::Duality, &rec.name, "D₀", || Ok(("0".into(), fmt_q(&duality_d0(&*ws.family(rec)?)))));
    let sym = timed(Suite::Duality, &rec.name, &format!("c(n,r,m) = c(m,r,n) to ({q_max}, {s_max})"), || {
        let phi = ws.product(rec, ProductMode::Product, q_max, s_max)?;
        let bad = phi.duality_defects();
        Ok(("no defects".into(), if bad.is_empty() { "no defects".into() } else { format!("defects at {bad:?}") }))
    });
    vec![d0, sym]
}

fn check_pullback(ws: &Workspace, rec: &ClassRecord, (q_max, s_max): (i64, i64)) -> CheckRecord {
    timed(Suite::Pullback, &rec.name, &format!("quasi-pullback = η_g(τ)η_g(ω) to ({q_max}, {s_max})"), || {
        let phi = ws.product(rec, ProductMode::Product, q_max, s_max)?;
        let got = quasi_pullback(&phi).map_err(|e| e.to_string())?;
        let eta = rec.eta_product().series(&qi(q_max.max(s_max) + 1));
        let f: Vec<Q> = (0..=q_max.max(s_max)).map(|n| eta.coeff(&qi(n)).unwrap_or_else(|| qi(0))).collect();
        let want = PullbackSeries::outer_square(&f, q_max, s_max);
        let n = want.coeffs.len();
        Ok((format!("{n} coefficients equal"), if got == want { format!("{n} coefficients equal") } else { pullback_difference(&got, &want) }))
    })
}

fn pullback_difference(a: &PullbackSeries, b: &PullbackSeries) -> String {
    for n in 0..=a.q_max {
        for m in 0..=a.s_max {
            if a.coeff(n, m) != b.coeff(n, m) {
                return format!("(n, m) = ({n}, {m}): {} vs {}", fmt_q(&a.coeff(n, m)), fmt_q(&b.coeff(n, m)));
            }
        }
    }
    "equal".into()
}

/// G(η_gφ₋₂,₁) through q^{q_max} s^{s_max}.
pub fn additive_lift(rec: &ClassRecord, q_max: i64, s_max: i64) -> Result<FJExpansion, LiftError> {
    let (psi, k, chi) = leading_form(rec, q_max * s_max.max(1) + 1);
    gritsenko_lift(&psi, k, rec.level, chi, q_max, s_max)
}

/// The family (f_g; 0, …) on Γ₀(N_g) for the classes with a correction term.
pub fn correction_family(rec: &ClassRecord, rows: i64) -> Result<LiftFamily, String> {
    let entry = builtin().appendix_b_class(&rec.name).ok_or("no correction form for this class")?;
    let input = table_input(entry, rec.level).map_err(|e| e.to_string())?;
    Ok(LiftFamily::single(&format!("{}-correction", rec.name), input.members[&1].at_infinity(rows), rec.level))
}

fn check_additive(ws: &Workspace, rec: &ClassRecord) -> Vec<CheckRecord> {
    let o = &ws.orders;
    if ADDITIVE.contains(&rec.name.as_str()) {
        let (q_max, s_max) = o.additive;
        vec![timed(Suite::AdditiveLift, &rec.name, &format!("Φ_g = G(η_gφ₋₂,₁) to ({q_max}, {s_max})"), || {
            let phi = ws.product(rec, ProductMode::Product, q_max, s_max)?;
            let g = additive_lift(rec, q_max, s_max).map_err(|e| e.to_string())?;
            Ok((yes_no(true), yes_no(phi.agrees_with(&g))))
        })]
    } else {
        let (q_max, s_max) = o.corrected;
        let correction = || -> Result<FJExpansion, String> {
            let fam = correction_family(rec, q_max * s_max + 1)?;
            borcherds_product(&fam, ProductMode::Product, q_max, s_max).map_err(|e| e.to_string())
        };
        let weight = timed(Suite::AdditiveLift, &rec.name, "B(F̂_g) has weight 0 and Weyl vector 0", || {
            let fam = correction_family(rec, 2)?;
            let m = mult_and_weyl(&fam);
            Ok((
                "0; (0, 0, 0)".into(),
                format!("{}; ({}, {}, {})", fmt_q(&m.weight), fmt_q(&m.weyl.0), fmt_q(&m.weyl.1), fmt_q(&m.weyl.2)),
            ))
        });
        let identity = timed(Suite::AdditiveLift, &rec.name, &format!("Φ_g·B(F̂_g) = G(η_gφ₋₂,₁) to ({q_max}, {s_max})"), || {
            let phi = ws.product(rec, ProductMode::Product, q_max, s_max)?;
            let lhs = phi.mul(&correction()?);
            let g = additive_lift(rec, q_max, s_max).map_err(|e| e.to_string())?;
            Ok((yes_no(true), yes_no(lhs.agrees_with(&g))))
        });
        let uncorrected = timed(Suite::AdditiveLift, &rec.name, &format!("Φ_g ≠ G(η_gφ₋₂,₁) to ({q_max}, {s_max})"), || {
            let phi = ws.product(rec, ProductMode::Product, q_max, s_max)?;
            let g = additive_lift(rec, q_max, s_max).map_err(|e| e.to_string())?;
            Ok((yes_no(false), yes_no(phi.agrees_with(&g))))
        });
        vec![weight, identity, uncorrected]
    }
}

fn check_hecke_identity(rec: &ClassRecord, q_order: i64) -> CheckRecord {
    timed(Suite::HeckeIdentity, &rec.name, &format!("φ_gψ + ψ|T(2) + f_gψ = 0 to q^{q_order}"), || {
        let rows = q_order + 1;
        let phi = genus(rec, rows).map_err(|e| e.to_string())?;
        let f = match builtin().appendix_b_class(&rec.name) {
            Some(entry) => {
                let input = table_input(entry, rec.level).map_err(|e| e.to_string())?;
                Some(input.members[&1].at_infinity(rows))
            }
            None => None,
        };
        let defect = hecke_identity_defect(rec, f.as_ref(), &phi, rows);
        Ok(("0".into(), if defect.is_empty() { "0".into() } else { format!("{} nonzero terms", defect.terms().len()) }))
    })
}

fn check_cusp_anchors() -> Vec<CheckRecord> {
    let eta = timed(Suite::CuspAnchors, "*", "η(3τ)⁸ under S", || {
        let s = eta_quotient_at_cusp(&EtaQuotient::new(vec![(3, 8)], qi(1)), &SL2Matrix::s(), &q(1, 2))
            .map_err(|e| e.to_string())?;
        let terms: Vec<String> = s
            .iter()
            .map(|(e, c)| format!("{}·q^{}", c.to_rational().map(|v| fmt_q(&v)).unwrap_or_else(|| "irrational".into()), fmt_q(&e)))
            .collect();
        Ok(("1/81·q^1/9 -8/81·q^4/9".into(), terms.join(" ")))
    });
    let theta = timed(Suite::CuspAnchors, "3B", "theta route: leading terms of Ĵ(η_gφ₋₂,₁)", || {
        let rec = find_class("3B").ok_or("3B missing")?;
        let input = JInput::eta_input("3B", rec.eta_product(), 9).map_err(|e| e.to_string())?;
        let f = jmap_theta_route(&input, &q(1, 2)).map_err(|e| e.to_string())?;
        let mut got = Vec::new();
        for a in [1i64, 2, 4, 5, 7, 8] {
            let ai = (1..9).find(|b| (a * b) % 9 == 1).unwrap();
            let g = |r: i64, y: i64| DiscElement::new(a, r, y, 9, 1);
            got.push([
                f.coeff(&g(1, -ai), &q(-5, 36)),
                f.coeff(&g(0, -ai), &q(1, 9)),
                f.coeff(&g(1, 5 * ai), &q(7, 36)),
                f.coeff(&g(0, 5 * ai), &q(4, 9)),
            ]);
        }
        let want = [q(1, 81), q(-2, 81), q(-8, 81), q(16, 81)];
        let show = |v: &[Q; 4]| v.iter().map(fmt_q).collect::<Vec<_>>().join(", ");
        let actual = if got.iter().all(|v| *v == want) { show(&want) } else { show(got.iter().find(|v| **v != want).unwrap()) };
        Ok((show(&want), actual))
    });
    vec![eta, theta]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn report_json_is_sorted_and_timing_free() {
        let ws = Workspace::new(Orders::default());
        let classes = vec!["2A".to_string(), "1A".to_string()];
        let r = run_suite(&ws, Suite::Weyl, Some(&classes)).unwrap();
        assert!(r.passed());
        assert_eq!(r.checks[0].class, "1A");
        let j = r.to_json(false);
        assert!(j["checks"][0].get("runtime_ms").is_none());
        assert_eq!(j, run_suite(&ws, Suite::Weyl, Some(&classes)).unwrap().to_json(false));
    }

    #[test]
    fn failing_check_is_reported_not_raised() {
        let rec = find_class("1A").unwrap();
        let c = timed(Suite::Weyl, &rec.name, "x", || Err("boom".into()));
        assert!(!c.passed);
        assert!(c.actual.contains("boom"));
    }
}
