//! Fixtures shared by the benchmarks.

use toeplitz_pnt::constructions::build_bounded_holes_seeded;
use toeplitz_pnt::ToeplitzSkeleton;

/// Bounded-holes skeleton with periods up to 30030.
pub fn bounded_skeleton() -> ToeplitzSkeleton {
    build_bounded_holes_seeded(2, &[2, 6, 30, 210, 2310, 30030], 1, 0).expect("nested periods")
}
