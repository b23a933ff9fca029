//! Exact cusp expansions evaluated numerically against direct evaluation of the products.

use m24_core::cusp_transform::{eta_quotient_at_cusp, ScalarForm, SL2Matrix};
use m24_core::exact_algebra::rational::qi;
use m24_core::exact_algebra::{CSeries, Cyclotomic};
use m24_core::modular_blocks::EtaQuotient;
use m24_core::class_table;
use num_complex::Complex64 as C;
use num_traits::ToPrimitive;
use std::f64::consts::PI;

fn cyc(x: &Cyclotomic) -> C {
    let n = x.conductor() as f64;
    x.root_terms()
        .into_iter()
        .map(|(j, c)| C::from_polar(c.to_f64().unwrap(), 2.0 * PI * j as f64 / n))
        .sum()
}

fn eval(s: &CSeries, tau: C) -> C {
    s.iter()
        .map(|(e, c)| cyc(c) * (C::i() * 2.0 * PI * e.to_f64().unwrap() * tau).exp())
        .sum()
}

fn qexp(tau: C) -> C {
    (C::i() * 2.0 * PI * tau).exp()
}

fn eta(tau: C) -> C {
    let q = qexp(tau);
    let mut p = (C::i() * 2.0 * PI * tau / 24.0).exp();
    let mut qn = q;
    while qn.norm() > 1e-18 {
        p *= C::new(1.0, 0.0) - qn;
        qn *= q;
    }
    p
}

fn e2(tau: C) -> C {
    let q = qexp(tau);
    let mut s = C::new(1.0, 0.0);
    let mut n = 1.0;
    let mut qn = q;
    while qn.norm() > 1e-20 {
        s -= 24.0 * n * qn / (C::new(1.0, 0.0) - qn);
        qn *= q;
        n += 1.0;
    }
    s
}

fn mobius(m: &SL2Matrix, tau: C) -> C {
    (tau * m.a as f64 + m.b as f64) / (tau * m.c as f64 + m.d as f64)
}

fn eta_quotient_direct(e: &EtaQuotient, tau: C) -> C {
    e.factors
        .iter()
        .map(|&(k, b)| eta(tau * k as f64).powi(b as i32))
        .product::<C>()
        * e.prefactor.to_f64().unwrap()
}

fn slash_direct(w: f64, m: &SL2Matrix, f: impl Fn(C) -> C, tau: C) -> C {
    let j = tau * m.c as f64 + m.d as f64;
    // principal branch (cτ + d)^{−w}
    (-w * j.ln()).exp() * f(mobius(m, tau))
}

fn matrices() -> Vec<SL2Matrix> {
    vec![
        SL2Matrix::s(),
        SL2Matrix::new(2, -1, -3, 2),
        SL2Matrix::new(1, 0, 3, 1),
        SL2Matrix::new(5, 2, 7, 3),
        SL2Matrix::new(1, 0, 4, 1),
        SL2Matrix::new(-1, 0, -2, -1),
    ]
}

const TAU: C = C::new(0.137, 1.3);

fn close(a: C, b: C) -> bool {
    (a - b).norm() <= 1e-9 * (1.0 + b.norm())
}

#[test]
fn eta_quotients_match_direct_evaluation() {
    let forms = [
        EtaQuotient::new(vec![(3, 8)], qi(1)),
        EtaQuotient::new(vec![(4, 6)], qi(1)),
        EtaQuotient::new(vec![(1, 4), (2, 2), (4, 4)], qi(1)),
        EtaQuotient::new(vec![(2, 4), (4, -4), (8, 4)], qi(16)),
        EtaQuotient::new(vec![(1, 3), (3, -2), (9, 3)], qi(18)),
        EtaQuotient::new(vec![(1, 1)], qi(1)),
    ];
    for e in &forms {
        let w = e.weight().to_f64().unwrap();
        for m in matrices() {
            let Ok(s) = eta_quotient_at_cusp(e, &m, &qi(8)) else {
                assert!(!e.weight().is_integer() && m.c < 0);
                continue;
            };
            let exact = eval(&s, TAU);
            let direct = slash_direct(w, &m, |t| eta_quotient_direct(e, t), TAU);
            assert!(close(exact, direct), "{} at {m}: {exact} vs {direct}", e.describe());
        }
    }
}

#[test]
fn ttilde_forms_match_direct_evaluation() {
    for rec in class_table() {
        let f = ScalarForm::from_atoms(&rec.ttilde, rec.level).unwrap();
        let direct_f = |t: C| -> C {
            rec.ttilde
                .iter()
                .map(|a| {
                    let v = match &a.kind {
                        m24_core::modular_blocks::AtomKind::Eta(e) => eta_quotient_direct(e, t),
                        m24_core::modular_blocks::AtomKind::E2N { level, scale } => {
                            let n = *level as f64;
                            let s = *scale as f64;
                            (e2(t * n * s) * n - e2(t * s)) / (n - 1.0)
                        }
                    };
                    v * a.coeff.to_f64().unwrap()
                })
                .sum()
        };
        for m in matrices() {
            let s = f.at_cusp(&m, &qi(8)).unwrap();
            let exact = eval(&s, TAU);
            let direct = slash_direct(2.0, &m, direct_f, TAU);
            assert!(close(exact, direct), "{} at {m}: {exact} vs {direct}", rec.name);
        }
    }
}
