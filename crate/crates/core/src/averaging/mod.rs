//! Orbit averages along primes, semiprimes and polynomial times, the limits
//! predicted from one stage of a skeleton, and stage-scale oscillation.

mod engine;
mod observable;
mod predicted;
mod report;
mod witness;

pub use engine::{
    poly_average, poly_histogram, prime_average, prime_histogram, semiprime_average,
    semiprime_histogram, AverageReport, IndexHistogram, IndexSet,
};
pub use observable::ObservableSpec;
pub use predicted::{predicted_poly_limit, predicted_prime_limit, Prediction};
pub use report::write_reports_csv;
pub use witness::{oscillation_witness, WitnessPoint};
