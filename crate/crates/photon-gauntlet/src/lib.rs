//! Counting statistics for photons crossing a chain of single-capacity
//! absorbers.
//!
//! The model: an omnidirectional source sits at the centre of a nest of
//! concentric spherical shells. Each shell hosts one point absorber that
//! captures at most one photon and never re-emits; a detector sits outside
//! the outermost shell. A photon crossing the shell at radius `r` interacts
//! with an absorber of effective cross-section `a` with probability
//! `q = a / (4 pi r^2)`, so each surface reduces to a single interaction
//! probability and a scenario reduces to a vector `(q_1 .. q_A, q_D)`.
//!
//! Two emission disciplines are compared:
//!
//! * **separate**: photons are emitted one at a time, far enough apart that
//!   every absorber has relaxed back to its ground state. Each photon faces
//!   the full chain independently and is detected with probability
//!   `P = q_D * prod_j (1 - q_j)`; detected counts over `K` emissions are
//!   `Binomial(K, P)`.
//! * **bunched**: all `K` photons traverse the chain together. A shell can
//!   capture at most one photon out of the bunch, so at most `A` photons are
//!   lost in total and at least `K - A` always reach the detector. Bunching
//!   reshapes the detected-count distribution upward: for the count
//!   `M = max(1, K - A)` the detection probability strictly exceeds the
//!   separate-stream value and is bounded above by the no-absorber value.
//!
//! Crate layout:
//!
//! * [`scenario`]: TOML experiment descriptions, geometry reduction, and
//!   validation.
//! * [`analytic`]: closed forms in `f64` (per-shell fates, detected-count
//!   and survivor distributions, the inequality verdict).
//! * [`oracle`]: the same quantities by exhaustive enumeration in exact
//!   rational arithmetic, plus a cross-check against [`analytic`].
//! * [`montecarlo`]: counter-seeded trial simulation with reproducible
//!   parallel tallies.
//! * [`stats`]: moments, Wilson intervals, z/chi-square agreement tests,
//!   and the bunching amplification ratio.
//! * [`cli`]: the `photon-gauntlet` command line (analytic, simulate,
//!   oracle, compare, sweep).

pub mod analytic;
pub mod cli;
pub mod montecarlo;
pub mod oracle;
pub mod scenario;
pub mod stats;
