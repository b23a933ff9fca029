use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use m24_bench::{class, family, jinput};
use m24_core::borcherds_lifts::{borcherds_product, ProductMode};
use m24_core::exact_algebra::rational::q;
use m24_core::modular_blocks::{phi_0, phi_m2, theta_series};
use m24_core::verify::additive_lift;
use m24_core::weil_lift::{jmap, jmap_theta_route, JInput};

fn series(c: &mut Criterion) {
    c.bench_function("theta series to q^20", |b| b.iter(|| theta_series(&q(20, 1))));
    let (a, z) = (phi_0(12), phi_m2(12));
    c.bench_function("phi_0 * phi_m2 rows 12", |b| b.iter(|| a.mul(&z)));
}

fn vector_valued(c: &mut Criterion) {
    let mut g = c.benchmark_group("jmap");
    g.sample_size(10);
    for name in ["2A", "6B", "21AB"] {
        let input = jinput(name);
        g.bench_with_input(BenchmarkId::new("direct", name), &input, |b, i| b.iter(|| jmap(i, &q(1, 4)).unwrap()));
    }
    // the theta route takes a single η-quotient input
    let input = JInput::eta_input("3B", class("3B").eta_product(), 9).unwrap();
    g.bench_function("theta route 3B", |b| b.iter(|| jmap_theta_route(&input, &q(1, 4)).unwrap()));
    g.finish();
}

fn products(c: &mut Criterion) {
    let mut g = c.benchmark_group("borcherds (4,4)");
    g.sample_size(10);
    for name in ["1A", "4C", "12B"] {
        let fam = family(name, 10);
        for (label, mode) in [("product", ProductMode::Product), ("fj", ProductMode::FourierJacobi), ("exp", ProductMode::Exponential)] {
            g.bench_with_input(BenchmarkId::new(label, name), &fam, |b, f| b.iter(|| borcherds_product(f, mode, 4, 4).unwrap()));
        }
    }
    g.finish();
    c.bench_function("additive lift 2A (4,4)", |b| b.iter(|| additive_lift(class("2A"), 4, 4).unwrap()));
}

criterion_group!(benches, series, vector_valued, products);
criterion_main!(benches);
