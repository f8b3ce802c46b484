//! # relent
//!
//! Quantum relative entropy machinery for finite-dimensional systems, and an
//! engine that evaluates relative-entropy inequalities as signed slacks.
//!
//! The crate covers:
//!
//! - **linalg**: dense complex matrices, Hermitian eigendecomposition with
//!   deterministic tie-breaking, spectral functions, Kronecker products and
//!   partial traces.
//! - **entropy**: von Neumann entropy, quantum relative entropy (with the
//!   `+inf` branch when supports are not nested) and the classical divergence.
//! - **channels**: Kraus sets, Stinespring isometries, complementary channels,
//!   pinchings, partial-trace channels, canonical (Gibbs-like) states and the
//!   Petz recovery map.
//! - **states**: the two explicit counterexample pairs for superadditivity,
//!   Hilbert–Schmidt random states, Haar unitaries and pinching pairs.
//! - **inequalities**: superadditivity, channel/complement, recovery,
//!   uniform-monotonicity and weak-superadditivity slacks, unitary-orbit
//!   extrema and seeded violation searches.
//! - **cli**: the `relent` command-line driver.
//!
//! All values are immutable after construction and every operation is a pure
//! function, so everything here is `Send + Sync`.
//!
//! ```
//! use relent_core::{inequalities, states};
//!
//! let pair = states::example2_states();
//! let report = inequalities::superadditivity_gap(&pair).unwrap();
//! assert!(report.verdict.is_violated());
//! ```

#![forbid(unsafe_code)]

pub mod channels;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod inequalities;
pub mod json;
pub mod linalg;
pub mod states;

pub use channels::{CanonicalSpec, Isometry, KrausSet};
pub use entropy::{ExtendedReal, LogBase, ProbabilityVector};
pub use error::{Error, Result};
pub use inequalities::{GapReport, InequalityId, OrbitExtrema, Verdict};
pub use linalg::{c64, ComplexMatrix, DensityMatrix, HermitianMatrix, SpectralDecomposition, Subsystem};
pub use states::{SeededGenerator, StatePair};
