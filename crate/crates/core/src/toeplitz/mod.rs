//! Toeplitz skeletons: staged periodic words with holes, hole statistics,
//! tower diameters and sliding-window recoding.

mod holes;
mod random;
mod skeleton;
mod window;

pub use holes::{hole_report, tower_diameter, Dyadic, HoleReport, StageHoles};
pub use random::{random_skeleton, RandomSkeletonConfig};
pub use skeleton::{parse_word, Completion, Stage, ToeplitzSkeleton, HOLE, HOLE_GLYPH};
pub use window::{window, window_alphabet_size, window_code};
