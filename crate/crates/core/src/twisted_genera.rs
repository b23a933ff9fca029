//! Twisted elliptic genera φ_g = (χ(g)/12)·φ₀,₁ + T̃_g·φ₋₂,₁ and their families (φ_{g^d})_{d | N_g}.

use crate::data::{self, TableClass};
use crate::exact_algebra::numtheory::{divisors, gcd};
use crate::exact_algebra::rational::{q, qi};
use crate::exact_algebra::{QJacobi, QSeries, Q};
use crate::m24_classes::{class_table, power_class, ClassRecord};
use crate::modular_blocks::{atoms_series, check_index_one, phi_0, phi_m2};
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum GenusError {
    #[error("class {class}: no table entry")]
    MissingEntry { class: String },
    #[error("class {class}: coefficient of q^{n} ζ^{r} is {got}, table has {expected}")]
    Mismatch { class: String, n: i64, r: i64, expected: Q, got: Q },
    #[error("class {class}: family member φ_{d} is {got}, table has {expected}")]
    FamilyMismatch { class: String, d: u64, expected: String, got: String },
    #[error("q^{n} row is not a multiple of ζ − 2 + ζ⁻¹")]
    NonExactDivision { n: i64 },
    #[error("class {class}: {detail}")]
    NotWeakJacobi { class: String, detail: String },
}

/// The forms φ_{g^d} for every d dividing N_g.
#[derive(Clone, Debug)]
pub struct GenusFamily {
    pub class: ClassRecord,
    /// d ↦ (class of g^d, φ_{g^d}).
    pub members: BTreeMap<u64, (String, Arc<QJacobi>)>,
}

impl GenusFamily {
    pub fn member(&self, d: u64) -> &QJacobi {
        &self.members[&d].1
    }
}

/// Rows q⁰..q^{len−1} of a table entry as a Jacobi series with integer exponents.
pub fn table_rows_series(rows: &[Vec<i64>]) -> QJacobi {
    let mut terms = Vec::new();
    for (n, row) in rows.iter().enumerate() {
        let kmax = row.len() as i64 - 1;
        for (i, &c) in row.iter().enumerate() {
            let k = kmax - i as i64;
            terms.push((n as i64, k, qi(c)));
            if k != 0 {
                terms.push((n as i64, -k, qi(c)));
            }
        }
    }
    QJacobi::from_terms(1, 1, terms, Some(qi(rows.len() as i64)))
}

/// T̃ expansion from its atoms, below q^trunc. Not checked against any table.
pub fn ttilde_series(rec: &ClassRecord, trunc: &Q) -> QSeries {
    atoms_series(&rec.ttilde, trunc)
}

/// T̃ expansion after confirming its first coefficients against the genus table.
pub fn load_ttilde(rec: &ClassRecord, trunc: &Q) -> Result<QSeries, GenusError> {
    check_ttilde(rec)?;
    Ok(ttilde_series(rec, trunc))
}

fn check_ttilde(rec: &ClassRecord) -> Result<(), GenusError> {
    static DONE: OnceLock<Mutex<HashMap<String, Result<(), GenusError>>>> = OnceLock::new();
    let memo = DONE.get_or_init(Default::default);
    if let Some(r) = memo.lock().unwrap().get(&rec.name) {
        return r.clone();
    }
    let r = (|| {
        let t = data::builtin()
            .appendix_a_class(&rec.name)
            .ok_or_else(|| GenusError::MissingEntry { class: rec.name.clone() })?;
        let k = t.rows.len() as i64 - 1;
        let want = recover_ttilde_coeffs(&table_rows_series(&t.rows), rec.chi(), k)?;
        let have = ttilde_series(rec, &qi(k + 1));
        for (n, w) in want.iter().enumerate() {
            let g = have.coeff(&qi(n as i64)).unwrap();
            if &g != w {
                return Err(GenusError::Mismatch {
                    class: rec.name.clone(),
                    n: n as i64,
                    r: 0,
                    expected: w.clone(),
                    got: g,
                });
            }
        }
        Ok(())
    })();
    memo.lock().unwrap().insert(rec.name.clone(), r.clone());
    r
}

/// Solves P_n = (χ/12)A_n + Σ_{j ≤ n} t_j B_{n−j} for t₀..t_K, where P, A, B are
/// the q-rows of φ_g, φ₀,₁, φ₋₂,₁.
pub fn recover_ttilde_coeffs(phi: &QJacobi, chi: i64, k: i64) -> Result<Vec<Q>, GenusError> {
    let a = phi_0(k + 1);
    let b = phi_m2(k + 1);
    let c = q(chi, 12);
    let mut t: Vec<Q> = Vec::new();
    for n in 0..=k {
        // residual R = P_n − (χ/12)A_n − Σ_{j<n} t_j B_{n−j}, must equal t_n·(ζ − 2 + ζ⁻¹)
        let mut res: BTreeMap<i64, Q> = BTreeMap::new();
        let mut add = |r: i64, v: Q| *res.entry(r).or_insert_with(Q::zero) += v;
        for (r, v) in phi.row(&qi(n)) {
            add(r, v);
        }
        for (r, v) in a.row(&qi(n)) {
            add(r, -(&c * v));
        }
        for (j, tj) in t.iter().enumerate() {
            for (r, v) in b.row(&qi(n - j as i64)) {
                add(r, -(tj * v));
            }
        }
        res.retain(|_, v| !v.is_zero());
        let tn = res.get(&1).cloned().unwrap_or_else(Q::zero);
        let mut expect = BTreeMap::new();
        if !tn.is_zero() {
            expect.insert(1, tn.clone());
            expect.insert(0, -qi(2) * &tn);
            expect.insert(-1, tn.clone());
        }
        if res != expect {
            return Err(GenusError::NonExactDivision { n });
        }
        t.push(tn);
    }
    Ok(t)
}

/// φ_g below q^trunc.
pub fn genus(rec: &ClassRecord, trunc: i64) -> Result<Arc<QJacobi>, GenusError> {
    static CACHE: OnceLock<Mutex<HashMap<(String, i64), Arc<QJacobi>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (rec.name.clone(), trunc);
    if let Some(s) = cache.lock().unwrap().get(&key) {
        return Ok(s.clone());
    }
    let tt = load_ttilde(rec, &qi(trunc))?;
    let s = phi_0(trunc)
        .scale(&q(rec.chi(), 12))
        .add(&phi_m2(trunc).mul_scalar(&tt))
        .truncate(&qi(trunc))
        .with_meta(qi(0), qi(1), rec.level);
    check_weak_index_one(rec, &s)?;
    let s = Arc::new(s);
    cache.lock().unwrap().entry(key).or_insert(s.clone());
    Ok(s)
}

fn check_weak_index_one(rec: &ClassRecord, s: &QJacobi) -> Result<(), GenusError> {
    let fail = |detail: String| GenusError::NotWeakJacobi { class: rec.name.clone(), detail };
    check_index_one(s).map_err(fail)?;
    if s.valuation().is_some_and(|v| v < qi(0)) {
        return Err(fail("negative q-exponent".into()));
    }
    let row0 = s.row(&qi(0));
    let want = BTreeMap::from([(-1, qi(2)), (0, qi(rec.chi() - 4)), (1, qi(2))]);
    let got: BTreeMap<i64, Q> = row0.into_iter().filter(|e| !e.1.is_zero()).collect();
    let want: BTreeMap<i64, Q> = want.into_iter().filter(|e| !e.1.is_zero()).collect();
    if got != want {
        return Err(fail("q⁰ row is not 2ζ^{±1} + (χ − 4)".into()));
    }
    Ok(())
}

/// Member d is the genus of the class of g^{gcd(d, n_g)}.
pub fn genus_family(rec: &ClassRecord, trunc: i64) -> Result<GenusFamily, GenusError> {
    let table = class_table();
    let mut members = BTreeMap::new();
    for d in divisors(rec.level) {
        let e = gcd(d as i64, rec.order as i64) as u64;
        let p = power_class(table, rec, e).map_err(|err| GenusError::NotWeakJacobi {
            class: rec.name.clone(),
            detail: err.to_string(),
        })?;
        members.insert(d, (p.name.clone(), genus(p, trunc)?));
    }
    Ok(GenusFamily { class: rec.clone(), members })
}

/// Counts of what a table comparison covered.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenusReport {
    pub class: String,
    pub coefficients_checked: usize,
    pub family_members_checked: usize,
}

/// Compares the family against a table entry: the φ_d class list and every listed coefficient of φ₁.
pub fn validate_against_table(family: &GenusFamily, entry: &TableClass) -> Result<GenusReport, GenusError> {
    let class = family.class.name.clone();
    let mut report = GenusReport { class: class.clone(), ..Default::default() };
    for (d, expected) in &entry.family {
        let d: u64 = d.parse().map_err(|_| GenusError::MissingEntry { class: class.clone() })?;
        let got = family
            .members
            .get(&d)
            .map(|m| m.0.clone())
            .unwrap_or_else(|| "nothing".into());
        if &got != expected {
            return Err(GenusError::FamilyMismatch { class, d, expected: expected.clone(), got });
        }
        report.family_members_checked += 1;
    }
    let phi = family.member(1);
    for (n, row) in entry.rows.iter().enumerate() {
        let kmax = row.len() as i64 - 1;
        for (i, &c) in row.iter().enumerate() {
            let k = kmax - i as i64;
            for r in if k == 0 { vec![0] } else { vec![k, -k] } {
                let got = phi.c(n as i64, r);
                if got != qi(c) {
                    return Err(GenusError::Mismatch { class, n: n as i64, r, expected: qi(c), got });
                }
                report.coefficients_checked += 1;
            }
        }
        // nothing outside the listed ζ-range
        for (r, v) in phi.row(&qi(n as i64)) {
            if r.abs() > kmax && !v.is_zero() {
                return Err(GenusError::Mismatch { class, n: n as i64, r, expected: qi(0), got: v });
            }
        }
    }
    Ok(report)
}

/// Validates the family of every class against the embedded genus table.
pub fn validate_against_appendix_a(family: &GenusFamily) -> Result<GenusReport, GenusError> {
    let entry = data::builtin()
        .appendix_a_class(&family.class.name)
        .ok_or_else(|| GenusError::MissingEntry { class: family.class.name.clone() })?;
    validate_against_table(family, entry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::m24_classes::find_class;

    fn rec(n: &str) -> &'static ClassRecord {
        find_class(n).unwrap()
    }

    #[test]
    fn recover_from_table_rows() {
        let rows = |n: &str| table_rows_series(&data::builtin().appendix_a_class(n).unwrap().rows);
        assert_eq!(recover_ttilde_coeffs(&rows("1A"), 24, 2).unwrap(), vec![qi(0); 3]);
        assert_eq!(recover_ttilde_coeffs(&rows("3B"), 0, 0).unwrap()[0], qi(2));
        assert_eq!(recover_ttilde_coeffs(&rows("2B"), 0, 2).unwrap(), vec![qi(2), qi(-16), qi(48)]);
        assert_eq!(recover_ttilde_coeffs(&rows("2A"), 8, 2).unwrap(), vec![q(4, 3), qi(32), qi(32)]);
        let mut bad = data::builtin().appendix_a_class("2A").unwrap().rows.clone();
        bad[1][0] += 1;
        assert_eq!(
            recover_ttilde_coeffs(&table_rows_series(&bad), 8, 2),
            Err(GenusError::NonExactDivision { n: 1 })
        );
    }

    #[test]
    fn genus_1a_is_twice_phi0() {
        let g = genus(rec("1A"), 6).unwrap();
        assert!(g.same_terms(&phi_0(6).scale(&qi(2))));
    }

    #[test]
    fn rows_of_selected_classes() {
        let g = genus(rec("7AB"), 3).unwrap();
        assert_eq!((g.c(1, 2), g.c(1, 1), g.c(1, 0)), (qi(-1), qi(5), qi(-8)));
        let g = genus(rec("4C"), 3).unwrap();
        assert_eq!((g.c(2, 3), g.c(2, 2), g.c(2, 1), g.c(2, 0)), (qi(2), qi(-8), qi(14), qi(-16)));
        let g = genus(rec("6A"), 3).unwrap();
        assert_eq!((g.c(1, 2), g.c(1, 1), g.c(1, 0)), (qi(-2), qi(6), qi(-8)));
    }

    #[test]
    fn families() {
        let f = genus_family(rec("2B"), 3).unwrap();
        let names: Vec<_> = f.members.iter().map(|(d, m)| (*d, m.0.as_str())).collect();
        assert_eq!(names, vec![(1, "2B"), (2, "1A"), (4, "1A")]);
        let f = genus_family(rec("12B"), 3).unwrap();
        for (d, want) in [(2, "6B"), (3, "4C"), (9, "4C"), (4, "3B"), (8, "3B"), (16, "3B"), (6, "2B"), (18, "2B")] {
            assert_eq!(f.members[&d].0, want);
        }
        for d in [12, 24, 36, 48, 72, 144] {
            assert_eq!(f.members[&d].0, "1A");
        }
        assert!(f.member(144).same_terms(&phi_0(3).scale(&qi(2))));
    }

    #[test]
    fn all_classes_match_the_table() {
        for c in class_table() {
            let f = genus_family(c, 3).unwrap();
            let r = validate_against_appendix_a(&f).unwrap();
            assert!(r.coefficients_checked == 15, "{}", c.name);
            assert!(f.member(c.level).same_terms(&phi_0(3).scale(&qi(2))));
            // the atoms of every member live on Γ₀(N_g/d); the 23AB cusp form is a
            // combination of level-46 eta quotients whose Γ₀(23)-invariance is a slash test
            for (d, (name, _)) in f.members.iter().filter(|m| m.1 .0 != "23AB") {
                for a in &find_class(name).unwrap().ttilde {
                    assert_eq!((c.level / d) % a.level(), 0, "{} d={d} {}", c.name, a.describe());
                }
            }
        }
    }

    #[test]
    fn corrupt_atom_is_rejected() {
        let mut r = rec("3A").clone();
        r.name = "3A".into();
        r.ttilde[0].coeff = q(5, 3);
        let t = data::builtin().appendix_a_class("3A").unwrap();
        let fam = GenusFamily {
            class: r.clone(),
            members: BTreeMap::from([(
                1,
                (
                    "3A".to_string(),
                    Arc::new(
                        phi_0(3)
                            .scale(&q(1, 2))
                            .add(&phi_m2(3).mul_scalar(&ttilde_series(&r, &qi(3))))
                            .truncate(&qi(3)),
                    ),
                ),
            )]),
        };
        let mut entry = t.clone();
        entry.family.clear();
        assert!(matches!(validate_against_table(&fam, &entry), Err(GenusError::Mismatch { n: 0, .. })));
    }
}
