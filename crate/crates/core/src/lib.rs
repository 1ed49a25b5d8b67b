//! Semiclassical electron spin dynamics driven by hidden-momentum couplings.
//!
//! The crate builds the chain from the hidden position of a spinning particle
//! to the spin-orbit, Hehl-Ni and spin/field-angular-momentum (`σ·(E×A)`)
//! energy terms, and co-evolves a classical trajectory with a Pauli spinor in
//! closed-form electromagnetic fields.
//!
//! Module map:
//!
//! * [`math`]: 3-vectors, spinors, SU(2) rotations, Levi-Civita symbol and
//!   antisymmetric rank-2 tensors.
//! * [`covariant`]: hidden position/momentum and the spin tensor duality with
//!   the Møller and Dirac supplementary conditions.
//! * [`fields`]: Coulomb-gauge field families and finite-difference checks.
//! * [`hamiltonian`]: base Hamiltonian and every spin correction term.
//! * [`dynamics`]: trajectory + spinor propagation.
//! * [`scenario`] and [`output`]: scenario files and trajectory serialization.
//! * [`verify`]: self-contained identity suites used by the CLI.

pub mod covariant;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod hamiltonian;
pub mod math;
pub mod output;
pub mod scenario;
pub mod verify;

pub use covariant::{Constants, SscKind};
pub use error::{Error, Result};
pub use fields::{FieldConfiguration, FieldSample};
pub use hamiltonian::{ParticleState, TermBreakdown, TermMask};
pub use math::{AntisymTensor4, FourVector, Spinor, Vec3};
