//! Computational companion for the Hofer geometry of an A₃-configuration of
//! Lagrangian spheres.
//!
//! The crate works entirely inside the local model: a disk cotangent bundle of
//! the round sphere with two preferred fibers `L₀ = T*_x Sⁿ` and `L₂ = T*_y Sⁿ`.
//! Everything is reduced to the great circle through `x` and `y`, where the
//! reparametrized cogeodesic flows `φ_v` and the model Dehn twists `τ_i` act by
//! explicit rotations.
//!
//! Layout:
//!
//! - [`persistence`]: barcodes, δ-matchings, bottleneck distance, boundary depth.
//! - [`filtered_complex`]: F₂ filtered chain complexes and their barcodes.
//! - [`local_model`]: radial shells, the bump profile `θ`, the twist profile `ρ`.
//! - [`chords`]: intersection points, Maslov indices and actions.
//! - [`floer`]: Floer complexes, spectral invariants `a_i(v)`, boundary depth.
//! - [`quasiflat`]: Hofer upper/lower bounds and sandwich reports.
//! - [`oracles`]: brute-force reference implementations used by the test suites.

pub mod chords;
pub mod exec;
pub mod filtered_complex;
pub mod floer;
pub mod local_model;
pub mod oracles;
pub mod persistence;
pub mod quasiflat;
pub mod selftest;
pub mod testkit;

mod error;

pub use error::Error;

pub use chords::{Branch, Chord, ChordError, Region, Sector, Side};
pub use exec::Execution;
pub use filtered_complex::{ComplexError, FilteredComplex, Generator, Reduction, Violation};
pub use floer::{DifferentialRule, FloerComplex, FloerError, FloerScenario};
pub use local_model::{AmbientOffset, ConfigFile, ModelConfig, ModelError, RadialPartition};
pub use persistence::{Bar, Barcode, Matching, PersistenceError};
pub use quasiflat::{QuasiflatError, QuasiflatReport, SandwichOptions};
