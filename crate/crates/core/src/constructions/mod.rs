//! Stage-wise counterexample builders, the bounded-holes family, and the
//! per-stage condition validators.

mod bounded;
mod build;
mod certificate;
mod config;
mod prime_style;
mod squares;
mod validate;

pub use bounded::{build_bounded_holes, build_bounded_holes_seeded};
pub use build::Build;
pub use certificate::{certificates_to_json_lines, ConditionRecord, StageCertificate};
pub use config::{beta_for_support, parse_list, BuildConfig, FillPolicy, Theorem};
pub use prime_style::{build_spnt_counterexample, build_theorem_a};
pub use squares::{build_squares_counterexample, square_scale_value};
pub use validate::{
    constructive_stage_count, gamma, holed_squares, square_residue_mask, validate_all,
    validate_stage, validate_stage_with,
};
