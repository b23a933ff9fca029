//! Exact expansions of the classical building blocks at ∞.

pub mod atoms;
pub mod eisenstein;
pub mod eta;
pub mod jacobi_blocks;

pub use atoms::{atoms_series, eta_level, AtomKind, TTildeAtom};
pub use eisenstein::{e2_series, e2n_series};
pub use eta::{eta_power, eta_series, euler_power, EtaQuotient};
pub use jacobi_blocks::{
    check_index_one, phi_0, phi_m2, theta_block, theta_product, theta_series, validate_phi_0, BlockError,
};
