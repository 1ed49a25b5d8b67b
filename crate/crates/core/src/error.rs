use crate::math::Vec3;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A spinor or Bloch vector that should be normalized is not.
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// Physical domain violated, e.g. |v| >= c or an unnormalized 4-velocity.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular point at r = ({:?}, {:?}, {:?})", .0.x, .0.y, .0.z)]
    SingularPoint(Vec3),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}
