//! Ĵ of a genus family is fixed by S: F(i) = ρ*(S) F(i) for weight −1/2 and signature 1.

use m24_core::exact_algebra::rational::qi;
use m24_core::m24_classes::find_class;
use m24_core::weil_lift::{jmap, DiscElement, JInput, VVForm};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use std::f64::consts::PI;

fn values_at_i(f: &VVForm) -> Vec<(DiscElement, f64)> {
    f.components
        .iter()
        .map(|(g, s)| {
            let v = s
                .iter()
                .map(|(e, c)| c.to_f64().unwrap() * (-2.0 * PI * e.to_f64().unwrap()).exp())
                .sum();
            (*g, v)
        })
        .collect()
}

/// Largest |F_γ(i) − (ρ*(S)F(i))_γ|.
fn s_defect(vals: &[(DiscElement, f64)], n: i64) -> f64 {
    let size = (2 * n * n) as f64;
    let mut worst = 0.0f64;
    for (g, v) in vals {
        let mut s = Complex64::new(0.0, 0.0);
        for (h, w) in vals {
            let phase = (g.x * h.y + g.y * h.x) as f64 / n as f64 + (g.r * h.r) as f64 / 2.0;
            s += Complex64::from_polar(*w, 2.0 * PI * phase);
        }
        worst = worst.max((s / size.sqrt() - v).norm());
    }
    worst
}

#[test]
fn genus_lifts_are_s_invariant() {
    for name in ["2B", "4C", "6B", "21AB"] {
        let rec = find_class(name).unwrap();
        let f = jmap(&JInput::from_class(rec).unwrap(), &qi(3)).unwrap();
        let defect = s_defect(&values_at_i(&f), f.n as i64);
        assert!(defect < 1e-3, "{name}: {defect}");
    }
}

#[test]
fn dropping_a_principal_orbit_breaks_s_invariance() {
    // removes −2 Σ_{a ∈ (ℤ/18)^×} q^{−1/36} 𝔢(a/18, ½, 7a⁻¹/18) from the 6B form
    let f = jmap(&JInput::from_class(find_class("6B").unwrap()).unwrap(), &qi(3)).unwrap();
    let mut vals = values_at_i(&f);
    let mut touched = 0;
    for (g, v) in vals.iter_mut() {
        let (a, c) = (g.x / 2, g.y / 2);
        if g.r == 1 && g.x % 2 == 0 && g.y % 2 == 0 && num_integer::gcd(a, 18) == 1 && (a * c) % 18 == 7 {
            *v += 2.0 * (2.0 * PI / 36.0).exp();
            touched += 1;
        }
    }
    assert_eq!(touched, 6);
    assert!(s_defect(&vals, 36) > 1.0);
}
