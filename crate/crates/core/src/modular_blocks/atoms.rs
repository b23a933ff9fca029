//! Weight-2 forms given as rational combinations of eta quotients and E₂^(N).

use super::eisenstein::e2n_series;
use super::eta::EtaQuotient;
use crate::exact_algebra::rational::{fmt_q, qi};
use crate::exact_algebra::{QSeries, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AtomKind {
    /// An eta quotient with prefactor 1.
    Eta(EtaQuotient),
    /// E₂^(level)(scale·τ).
    E2N { level: u64, scale: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TTildeAtom {
    pub kind: AtomKind,
    pub coeff: Q,
}

impl TTildeAtom {
    pub fn eta(factors: Vec<(u64, i64)>, coeff: Q) -> Self {
        TTildeAtom { kind: AtomKind::Eta(EtaQuotient::new(factors, qi(1))), coeff }
    }

    pub fn e2n(level: u64, scale: u64, coeff: Q) -> Self {
        assert!(level >= 2, "E2N level must be at least 2");
        TTildeAtom { kind: AtomKind::E2N { level, scale }, coeff }
    }

    pub fn weight(&self) -> Q {
        match &self.kind {
            AtomKind::Eta(e) => e.weight(),
            AtomKind::E2N { .. } => qi(2),
        }
    }

    /// The smallest N such that the atom lives on Γ₀(N).
    pub fn level(&self) -> u64 {
        match &self.kind {
            AtomKind::Eta(e) => eta_level(e),
            AtomKind::E2N { level, scale } => level * scale,
        }
    }

    pub fn series(&self, trunc: &Q) -> QSeries {
        match &self.kind {
            AtomKind::Eta(e) => e.series(trunc),
            AtomKind::E2N { level, scale } => e2n_series(*level, *scale, trunc),
        }
        .scale(&self.coeff)
    }

    pub fn describe(&self) -> String {
        let body = match &self.kind {
            AtomKind::Eta(e) => e.describe(),
            AtomKind::E2N { level, scale: 1 } => format!("E₂^({level})(τ)"),
            AtomKind::E2N { level, scale } => format!("E₂^({level})({scale}τ)"),
        };
        format!("{}·{}", fmt_q(&self.coeff), body)
    }
}

/// Level of an eta quotient with the standard conditions: the least multiple N of
/// every scale with N·Σ b_k/k ≡ 0 mod 24.
pub fn eta_level(e: &EtaQuotient) -> u64 {
    let base = e.scales_lcm();
    let mut n = base;
    loop {
        let s: Q = e.factors.iter().map(|&(k, b)| Q::new((n as i64 * b).into(), (k as i64).into())).sum();
        if (s / qi(24)).is_integer() {
            return n;
        }
        n += base;
    }
}

/// Σ of the atoms' expansions at ∞.
pub fn atoms_series(atoms: &[TTildeAtom], trunc: &Q) -> QSeries {
    atoms
        .iter()
        .fold(QSeries::zero_to(Some(trunc.clone())), |acc, a| acc.add(&a.series(trunc)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::series::qseries_from_ints;

    #[test]
    fn levels() {
        assert_eq!(TTildeAtom::eta(vec![(1, 8), (2, -4)], qi(2)).level(), 4);
        assert_eq!(TTildeAtom::eta(vec![(1, 6), (3, -2)], qi(2)).level(), 9);
        assert_eq!(TTildeAtom::eta(vec![(1, 2), (11, 2)], qi(1)).level(), 11);
        assert_eq!(TTildeAtom::e2n(4, 2, qi(1)).level(), 8);
    }

    #[test]
    fn combination() {
        // 2η(τ)⁸/η(2τ)⁴ = 2 − 16q + 48q² + ...
        let a = [TTildeAtom::eta(vec![(1, 8), (2, -4)], qi(2))];
        let s = atoms_series(&a, &qi(3));
        assert_eq!(s, qseries_from_ints(&[2, -16, 48]).truncate(&qi(3)));
        assert_eq!(a[0].weight(), qi(2));
    }
}
