//! Self-interacting nearest-neighbour random walks on `Z` pushed by a linear
//! combination of their own edge local times.
//!
//! * [`walk`]: the free and force-confined walks and their trajectory logs.
//! * [`profile`]: trapping thresholds, the limiting local-time profile and
//!   the boundary streams that decide escape versus confinement.
//! * [`paths`]: deterministic diagnostics over recorded paths (upstream
//!   jumps, stream appearances, confinement checks).
//! * [`experiments`]: seeded, parallel Monte Carlo measurements.
//! * [`cli`]: the `trapwalk` command line.

pub mod cli;
pub mod experiments;
pub mod format;
pub mod paths;
pub mod profile;
pub mod rng;
pub mod walk;
