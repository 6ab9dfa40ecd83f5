//! Certified-deletion and certified-everlasting encryption.
//!
//! Three layers:
//! - [`onetime`]: one-time SKE with certified deletion over BB84 states,
//!   the base primitive every other scheme wraps.
//! - [`qrom`]: the random-oracle construction, generic over an SKE or PKE
//!   classical backend. Certificates are classical bit strings.
//! - [`css`]: the coding-theory construction over a nested CSS pair, same
//!   backend genericity. Certificates are quantum registers.
//!
//! The deletion-certificate type therefore differs per variant: the syntax
//! declares a quantum certificate space, the QROM construction emits
//! classical certificates, and this module types each variant as built.

use thiserror::Error;

use crate::base::BaseError;
use crate::gf2::Gf2Error;
use crate::qsim::QsimError;

pub mod css;
pub mod onetime;
pub mod qrom;

#[derive(Debug, Error)]
pub enum CdError {
    #[error("message length {got} incompatible: expected {want}")]
    MessageLength { want: usize, got: usize },
    #[error("basis weight {w} must not exceed key length {n}")]
    BadWeight { n: usize, w: usize },
    #[error("certificate length {got}, expected {want}")]
    CertLength { want: usize, got: usize },
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error(transparent)]
    Base(#[from] BaseError),
}

/// Classical backend selector for the certified-everlasting wrappers:
/// the encryption side.
#[derive(Clone, Copy)]
pub enum BackendEncKey<'a> {
    Ske(&'a crate::base::SkeKey),
    Pke(&'a crate::base::LwePublicKey),
}

/// The decryption side.
#[derive(Clone, Copy)]
pub enum BackendDecKey<'a> {
    Ske(&'a crate::base::SkeKey),
    Pke(&'a crate::base::LweSecretKey),
}

/// Backend ciphertext, tagged by origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BackendCiphertext {
    Ske(crate::base::SkeCiphertext),
    Pke(Vec<crate::base::LweCiphertext>),
}

impl BackendEncKey<'_> {
    pub fn encrypt<R: rand::Rng + ?Sized>(&self, m: &[u8], rng: &mut R) -> BackendCiphertext {
        match self {
            BackendEncKey::Ske(k) => BackendCiphertext::Ske(crate::base::ske_enc(k, m, rng)),
            BackendEncKey::Pke(pk) => {
                BackendCiphertext::Pke(crate::base::lwe_enc_bytes(pk, m, rng))
            }
        }
    }
}

impl BackendDecKey<'_> {
    /// `None` is the backend's ⊥ (special correctness for the SKE path).
    pub fn decrypt(&self, ct: &BackendCiphertext) -> Option<Vec<u8>> {
        match (self, ct) {
            (BackendDecKey::Ske(k), BackendCiphertext::Ske(c)) => crate::base::ske_dec(k, c),
            (BackendDecKey::Pke(sk), BackendCiphertext::Pke(c)) => {
                crate::base::lwe_dec_bytes(sk, c).ok()
            }
            _ => None,
        }
    }
}
