//! Exact combinatorial and statistical verification toolkit.
//!
//! The crate builds two barycentric subdivisions of a sphere boundary,
//! constructs and exactly verifies antipodal-free covers of them, colors
//! subset lattices under the disjointness constraint with brute-force
//! lower-bound search, and runs seeded replication experiments for finite
//! concept classes. All probability and loss computations use exact big
//! rationals; randomness appears only in sampling and is reproducible from
//! explicit seeds.

pub mod caps;
pub mod covers;
pub mod gamma;
pub mod kneser;
pub mod learning;
pub mod ratio;
pub mod simplicial;
pub mod subsets;

pub use caps::Caps;
pub use ratio::Ratio;
pub use subsets::{Chain, Subset};
