//! Bounded functional encryption with certified everlasting deletion:
//! the 1-bounded non-adaptive scheme, its adaptive wrapper, and the
//! q-bounded scheme for low-degree polynomial functionality.

use thiserror::Error;

use crate::cd::CdError;
use crate::garble::GarbleError;

pub mod adaptive;
pub mod bounded;
pub mod one_bounded;

pub use adaptive::{FeadCiphertext, FeadMpk, FeadMsk, FeadScheme, FeadSkF, FeadVk};
pub use bounded::{collision_diag, CollisionDiag, FeqParams, FeqScheme};
pub use one_bounded::{Fe1Ciphertext, Fe1Mpk, Fe1Msk, Fe1Profile, Fe1Scheme, Fe1SkF, Fe1Vk};

#[derive(Debug, Error)]
pub enum FeError {
    #[error("key/ciphertext arity {got}, expected {want}")]
    KeyLength { want: usize, got: usize },
    #[error("quantum layout length {got}, expected {want}")]
    LayoutLength { want: usize, got: usize },
    #[error("parameter error: {0}")]
    Params(String),
    #[error(transparent)]
    Garble(#[from] GarbleError),
    #[error(transparent)]
    Cd(#[from] CdError),
}
