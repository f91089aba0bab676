//! Permutation-group computation toolkit.
//!
//! The crate provides exact permutation arithmetic, deterministic
//! Schreier–Sims stabilizer chains (order, membership, canonical enumeration,
//! uniform random elements, point stabilizers), fast two-generation testing,
//! spread computation for small groups (kill sets, exact spread via a minimal
//! hitting set search, mateless-set search), and the full M23 case: the
//! Sylow-23 copy table of the 40,320 Frobenius subgroups 23:11, the
//! element-to-copies cover map, a cover-guided mate-finding algorithm for
//! challenge sets of up to 8,064 elements, and exhaustive structural
//! verification of every ingredient that the mate argument rests on.
//!
//! Composition is left-to-right everywhere: `compose(p, q)` applies `p`
//! first. Points are 0-based in memory and 1-based in all text formats.

pub mod catalog;
pub mod generation;
pub mod group;
pub mod m23;
pub mod perm;
pub mod scan;
pub mod spread;

pub use generation::{GenerationConfig, PairResult, Spectrum};
pub use group::{GeneratorSet, GroupHandle, StabilizerChain};
pub use perm::{CycleType, Permutation, Point};
pub use spread::{ChallengeSet, KillSet, MateReport, SpreadKind, SpreadResult};
