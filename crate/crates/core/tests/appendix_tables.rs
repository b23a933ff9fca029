//! Principal parts of Ĵ for every class against the shipped tables.

use m24_core::data::builtin;
use m24_core::exact_algebra::rational::{q, qi};
use m24_core::m24_classes::{class_table, find_class};
use m24_core::weil_lift::{jmap, jmap_theta_route, principal_part, symmetry_check, table_input, table_principal_part, JInput};
use std::time::Instant;

fn check_class(name: &str) {
    let rec = find_class(name).unwrap();
    let start = Instant::now();
    let f = jmap(&JInput::from_class(rec).unwrap(), &q(1, 4)).unwrap();
    let got = principal_part(&f);
    let want = table_principal_part(builtin().appendix_a_class(name).unwrap(), rec.level).unwrap();
    assert_eq!(got.diff(&want), Vec::<String>::new(), "{name}");
    assert!(got.all_integral());
    assert!(symmetry_check(&f), "{name}");
    assert!(f.exponents_consistent(), "{name}");
    assert_eq!(got.constant, rec.weight() * qi(2));
    eprintln!("{name}: N = {}, {:?}", rec.level, start.elapsed());
}

#[test]
fn appendix_a_all_levels_below_144() {
    for c in class_table().iter().filter(|c| c.level < 144) {
        check_class(&c.name);
    }
}

#[test]
fn appendix_a_12b() {
    check_class("12B");
}

#[test]
fn appendix_b() {
    for name in ["3B", "4C"] {
        let rec = find_class(name).unwrap();
        let entry = builtin().appendix_b_class(name).unwrap();
        let input = table_input(entry, rec.level).unwrap();
        let f = jmap(&input, &q(1, 4)).unwrap();
        let want = table_principal_part(entry, rec.level).unwrap();
        assert_eq!(principal_part(&f).diff(&want), Vec::<String>::new(), "{name}");
        assert_eq!(f, jmap_theta_route(&input, &q(1, 4)).unwrap(), "{name}");
        // the input rows match the table
        let phi = input.members[&1].at_infinity(3);
        let rows = m24_core::twisted_genera::table_rows_series(&entry.rows);
        assert!(phi.same_terms(&rows), "{name}");
    }
}
