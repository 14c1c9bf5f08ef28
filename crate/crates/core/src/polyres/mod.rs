//! Residues of polynomial values: attainable sets, hit counts, CRT
//! composition, and the closed forms for squares.

mod poly;
mod profile;
mod squares;

pub use poly::PolynomialSpec;
pub use profile::{
    albis_bound_check, crt_compose, interval_count_bounds, residue_profile, residue_profile_brute,
    rho_count, rho_max_table, IntervalBounds, ResidueProfile,
};
pub use squares::{
    psi_tilde_closed, square_profile_prime_power, square_psi_closed, square_rho_closed,
    tilde_bounds_check, tilde_residues, TildeResidues,
};
