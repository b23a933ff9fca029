//! The 21 cycle shapes of M₂₄: power maps, traces, eta products and weights.

use crate::data::{self, DataSet};
use crate::exact_algebra::numtheory::{divisors, gcd, moebius};
use crate::exact_algebra::rational::{q, qi};
use crate::exact_algebra::Q;
use crate::modular_blocks::{EtaQuotient, TTildeAtom};
use std::collections::BTreeMap;
use std::sync::OnceLock;

/// A cycle shape ∏ k^{b_k} as (k, b_k) pairs with k increasing and b_k ≠ 0.
pub type Shape = Vec<(u64, i64)>;

#[derive(Debug, thiserror::Error)]
pub enum ClassError {
    #[error("trace for g^{0} is missing")]
    MissingTrace(u64),
    #[error("traces give a non-integral exponent b_{0}")]
    NonIntegralExponent(u64),
    #[error("class {name}: {detail}")]
    Invariant { name: String, detail: String },
    #[error("no class has cycle shape {0}")]
    UnknownShape(String),
    #[error(transparent)]
    Data(#[from] data::DataError),
}

#[derive(Clone, Debug)]
pub struct ClassRecord {
    pub name: String,
    pub shape: Shape,
    pub order: u64,
    pub level: u64,
    pub ttilde: Vec<TTildeAtom>,
    pub ttilde_source: String,
}

impl ClassRecord {
    /// χ(g) = b₁.
    pub fn chi(&self) -> i64 {
        chi_power(&self.shape, 1)
    }

    pub fn eta_product(&self) -> EtaQuotient {
        eta_product(self)
    }

    pub fn weight(&self) -> Q {
        weight_kg(self)
    }

    pub fn shape_string(&self) -> String {
        shape_string(&self.shape)
    }

    fn check(&self) -> Result<(), ClassError> {
        let fail = |detail: String| ClassError::Invariant { name: self.name.clone(), detail };
        let deg: i64 = self.shape.iter().map(|&(k, b)| k as i64 * b).sum();
        if deg != 24 {
            return Err(fail(format!("Σ k·b_k = {deg}, expected 24")));
        }
        if self.shape.iter().any(|&(_, b)| b <= 0) {
            return Err(fail("cycle counts must be positive".into()));
        }
        let n = self.shape.iter().map(|s| s.0).max().unwrap_or(1);
        let kmin = self.shape.iter().map(|s| s.0).min().unwrap_or(1);
        if n != self.order {
            return Err(fail(format!("order {} but largest cycle {n}", self.order)));
        }
        if n * kmin != self.level {
            return Err(fail(format!("level {} but n·min k = {}", self.level, n * kmin)));
        }
        for a in &self.ttilde {
            if a.weight() != qi(2) {
                return Err(fail(format!("T̃ atom {} has weight {}", a.describe(), a.weight())));
            }
        }
        Ok(())
    }
}

/// Builds and checks the class table from a data set.
pub fn class_table_from(data: &DataSet) -> Result<Vec<ClassRecord>, ClassError> {
    let mut out = Vec::new();
    for raw in &data.classes {
        let entry = data.ttilde.get(&raw.name).ok_or_else(|| ClassError::Invariant {
            name: raw.name.clone(),
            detail: "no T̃ entry".into(),
        })?;
        let rec = ClassRecord {
            name: raw.name.clone(),
            shape: normalize(raw.shape.clone()),
            order: raw.order,
            level: raw.level,
            ttilde: entry.atoms.clone(),
            ttilde_source: entry.source.clone(),
        };
        rec.check()?;
        out.push(rec);
    }
    Ok(out)
}

/// The embedded table of all 21 classes.
pub fn class_table() -> &'static [ClassRecord] {
    static TABLE: OnceLock<Vec<ClassRecord>> = OnceLock::new();
    TABLE.get_or_init(|| class_table_from(data::builtin()).expect("embedded class data is consistent"))
}

pub fn find_class(name: &str) -> Option<&'static ClassRecord> {
    class_table().iter().find(|c| c.name.eq_ignore_ascii_case(name))
}

/// Name of the class with the given cycle shape.
pub fn class_of_shape<'a>(table: &'a [ClassRecord], shape: &Shape) -> Result<&'a ClassRecord, ClassError> {
    let s = normalize(shape.clone());
    table
        .iter()
        .find(|c| c.shape == s)
        .ok_or_else(|| ClassError::UnknownShape(shape_string(&s)))
}

/// The class of g^d.
pub fn power_class<'a>(table: &'a [ClassRecord], rec: &ClassRecord, d: u64) -> Result<&'a ClassRecord, ClassError> {
    class_of_shape(table, &power_shape(&rec.shape, d))
}

fn normalize(shape: Shape) -> Shape {
    let mut m: BTreeMap<u64, i64> = BTreeMap::new();
    for (k, b) in shape {
        *m.entry(k).or_default() += b;
    }
    m.into_iter().filter(|e| e.1 != 0).collect()
}

/// Cycle shape of g^d: each k-cycle splits into gcd(k, d) cycles of length k/gcd(k, d).
pub fn power_shape(shape: &Shape, d: u64) -> Shape {
    normalize(
        shape
            .iter()
            .map(|&(k, b)| {
                let g = gcd(k as i64, d as i64) as u64;
                (k / g, g as i64 * b)
            })
            .collect(),
    )
}

/// χ(g^d) = Σ_{k | d} k·b_k, the number of fixed points of g^d.
pub fn chi_power(shape: &Shape, d: u64) -> i64 {
    shape.iter().filter(|s| d % s.0 == 0).map(|&(k, b)| k as i64 * b).sum()
}

/// χ(g^d) for every d dividing n.
pub fn traces(shape: &Shape, n: u64) -> BTreeMap<u64, i64> {
    divisors(n).into_iter().map(|d| (d, chi_power(shape, d))).collect()
}

/// Möbius inversion: b_m = (1/m)Σ_{d | m} μ(m/d) χ(g^d), for each m in the key set.
pub fn exponents_from_traces(traces: &BTreeMap<u64, i64>) -> Result<Shape, ClassError> {
    let mut out = Vec::new();
    for &m in traces.keys() {
        let mut s = 0i64;
        for d in divisors(m) {
            let t = traces.get(&d).ok_or(ClassError::MissingTrace(d))?;
            s += moebius(m / d) * t;
        }
        if s % m as i64 != 0 {
            return Err(ClassError::NonIntegralExponent(m));
        }
        if s != 0 {
            out.push((m, s / m as i64));
        }
    }
    Ok(out)
}

/// η_g(τ) = ∏ η(kτ)^{b_k}.
pub fn eta_product(rec: &ClassRecord) -> EtaQuotient {
    EtaQuotient::new(rec.shape.clone(), qi(1))
}

/// k_g = ½Σ b_k − 2, the weight of Φ_g.
pub fn weight_kg(rec: &ClassRecord) -> Q {
    q(rec.shape.iter().map(|s| s.1).sum(), 2) - qi(2)
}

pub fn shape_string(shape: &Shape) -> String {
    shape
        .iter()
        .map(|&(k, b)| if b == 1 { format!("{k}") } else { format!("{k}^{b}") })
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(name: &str) -> &'static ClassRecord {
        find_class(name).unwrap()
    }

    #[test]
    fn table_records() {
        assert_eq!(class_table().len(), 21);
        let a = rec("1A");
        assert_eq!((a.shape.clone(), a.order, a.level), (vec![(1, 24)], 1, 1));
        let b = rec("12B");
        assert_eq!((b.shape.clone(), b.order, b.level), (vec![(12, 2)], 12, 144));
        let c = rec("23AB");
        assert_eq!((c.shape.clone(), c.order, c.level), (vec![(1, 1), (23, 1)], 23, 23));
    }

    #[test]
    fn power_shapes() {
        assert_eq!(power_shape(&vec![(1, 8), (2, 8)], 2), vec![(1, 24)]);
        assert_eq!(power_shape(&vec![(3, 8)], 3), vec![(1, 24)]);
        assert_eq!(power_shape(&vec![(2, 4), (4, 4)], 2), vec![(1, 8), (2, 8)]);
        let t = class_table();
        assert_eq!(power_class(t, rec("4A"), 2).unwrap().name, "2A");
        assert_eq!(power_class(t, rec("12B"), 3).unwrap().name, "4C");
    }

    #[test]
    fn traces_and_inversion() {
        let t = BTreeMap::from([(1, 8), (2, 24)]);
        assert_eq!(exponents_from_traces(&t).unwrap(), vec![(1, 8), (2, 8)]);
        assert_eq!(exponents_from_traces(&BTreeMap::from([(1, 24)])).unwrap(), vec![(1, 24)]);
        let tb = traces(&vec![(12, 2)], 12);
        for d in [1, 2, 3, 4, 6] {
            assert_eq!(tb[&d], 0);
        }
        assert_eq!(tb[&12], 24);
        assert!(matches!(
            exponents_from_traces(&BTreeMap::from([(1, 8), (2, 23)])),
            Err(ClassError::NonIntegralExponent(2))
        ));
        assert!(matches!(exponents_from_traces(&BTreeMap::from([(2, 8)])), Err(ClassError::MissingTrace(1))));
    }

    #[test]
    fn round_trips_for_every_class() {
        for c in class_table() {
            for d in divisors(c.order) {
                let s = power_shape(&c.shape, d);
                assert_eq!(s.iter().map(|&(k, b)| k as i64 * b).sum::<i64>(), 24);
                let n = s.iter().map(|x| x.0).max().unwrap();
                assert_eq!(exponents_from_traces(&traces(&s, n)).unwrap(), s);
                // the level of g^d divides N_g/d
                let p = power_class(class_table(), c, d).unwrap();
                assert_eq!((c.level / d) % p.level, 0, "{} d={d}", c.name);
            }
        }
    }

    #[test]
    fn weights() {
        assert_eq!(weight_kg(rec("1A")), qi(10));
        assert_eq!(weight_kg(rec("2B")), qi(4));
        assert_eq!(weight_kg(rec("23AB")), qi(-1));
        assert_eq!(eta_product(rec("2B")).factors, vec![(2, 12)]);
        assert_eq!(rec("7AB").chi(), 3);
        for c in class_table() {
            let a = data::builtin().appendix_a_class(&c.name).unwrap();
            assert_eq!(qi(a.constant), weight_kg(c) * qi(2), "{}", c.name);
            assert_eq!(a.chi, Some(c.chi()));
        }
    }
}
