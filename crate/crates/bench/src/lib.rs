//! Fixtures shared by the criterion benchmarks in `benches/`.

use m24_core::borcherds_lifts::LiftFamily;
use m24_core::weil_lift::JInput;
use m24_core::{find_class, ClassRecord};

pub fn class(name: &str) -> &'static ClassRecord {
    find_class(name).unwrap_or_else(|| panic!("unknown class {name}"))
}

/// The genus family of a class, known below q^rows.
pub fn family(name: &str, rows: i64) -> LiftFamily {
    LiftFamily::from_class(class(name), rows).expect("genus family")
}

pub fn jinput(name: &str) -> JInput {
    JInput::from_class(class(name)).expect("input of Ĵ")
}
