//! Fixed-size linear algebra used throughout the crate.

mod spinor;
pub(crate) mod tensor;
mod vec3;

pub use spinor::{pauli_expectation, su2_rotate, Spinor};
pub use tensor::{levi_civita4, AntisymTensor4, FourVector, METRIC};
pub use vec3::Vec3;
