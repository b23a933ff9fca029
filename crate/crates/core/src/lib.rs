//! Exact construction of the Mathieu-moonshine Borcherds products Φ_g and their input data.

pub mod borcherds_lifts;
pub mod cusp_transform;
pub mod data;
pub mod exact_algebra;
pub mod m24_classes;
pub mod modular_blocks;
pub mod twisted_genera;
pub mod verify;
pub mod weil_lift;

pub use exact_algebra::{Coeff, Cyclotomic, FracSeries, JacobiSeries, Q};
pub use m24_classes::{class_table, find_class, ClassRecord};
