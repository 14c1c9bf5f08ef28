pub mod acceptance;
pub mod arith;
pub mod averaging;
pub mod constructions;
pub mod error;
pub mod numeric;
pub mod polyres;
pub mod sturmian;
pub mod toeplitz;

pub use arith::PrimeTable;
pub use averaging::{AverageReport, IndexSet, ObservableSpec};
pub use constructions::{Build, BuildConfig, StageCertificate, Theorem};
pub use error::{Error, Result};
pub use polyres::PolynomialSpec;
pub use sturmian::RotationSpec;
pub use toeplitz::ToeplitzSkeleton;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
