//! Certified everlasting encryption in the (simulated) random-oracle model.
//!
//! One wrapper serves both the secret-key and the public-key scheme; only
//! the classical backend differs. Encryption hides a fresh one-time
//! certified-deletion key behind `h = H(R) ⊕ cd.sk` with `R` encrypted by
//! the backend; the verification key is the one-time key itself, and
//! deletion certificates stay classical.

use rand::Rng;

use crate::base::Qrom;
use crate::bits::BitVec;
use crate::qsim::{PauliMask, QuantumRegister};

use super::onetime::{self, CdKey};
use super::{BackendCiphertext, BackendDecKey, BackendEncKey, CdError};

/// Sizing knobs for the wrapper: Hadamard-check count `w` and the byte
/// length of the oracle preimage `R`. The default profile is `λ = 128`:
/// `w = λ` checks and a λ-bit `R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QromProfile {
    pub w: usize,
    pub r_bytes: usize,
}

impl QromProfile {
    pub fn default_lambda128() -> Self {
        Self { w: 128, r_bytes: 16 }
    }

    /// Desk profile for high-volume tests.
    pub fn test_profile() -> Self {
        Self { w: 8, r_bytes: 8 }
    }

    pub fn cd_n(&self, message_bits: usize) -> usize {
        message_bits + self.w
    }

    /// Oracle output bytes needed for a given message length.
    pub fn oracle_bytes(&self, message_bits: usize) -> usize {
        CdKey::byte_len(self.cd_n(message_bits))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QromVk {
    pub cd_key: CdKey,
}

/// Classical part `(h, backend ct)` plus the BB84 register.
pub struct QromCiphertext {
    pub h: Vec<u8>,
    pub backend: BackendCiphertext,
    pub quantum: QuantumRegister,
    pub profile: QromProfile,
}

fn xor_bytes(a: &[u8], b: &[u8]) -> Vec<u8> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

pub fn enc<R: Rng + ?Sized>(
    backend: BackendEncKey<'_>,
    profile: QromProfile,
    m: &BitVec,
    oracle: &mut Qrom,
    rng: &mut R,
) -> Result<(QromVk, QromCiphertext), CdError> {
    let n = profile.cd_n(m.len());
    let cd_key = onetime::keygen(n, profile.w, rng)?;
    let mut r_val = vec![0u8; profile.r_bytes];
    rng.fill_bytes(&mut r_val);
    let backend_ct = backend.encrypt(&r_val, rng);
    let h = xor_bytes(
        &oracle.query_prefix(&r_val, CdKey::byte_len(n))?,
        &cd_key.to_bytes(),
    );
    let quantum = onetime::enc(&cd_key, m)?;
    Ok((
        QromVk { cd_key },
        QromCiphertext {
            h,
            backend: backend_ct,
            quantum,
            profile,
        },
    ))
}

/// `None` is ⊥: backend failure or an implausible recovered key. Honest
/// decryptions are gentle on the register.
pub fn dec<R: Rng + ?Sized>(
    backend: BackendDecKey<'_>,
    ct: &mut QromCiphertext,
    oracle: &mut Qrom,
    rng: &mut R,
) -> Result<Option<BitVec>, CdError> {
    let Some(r_val) = backend.decrypt(&ct.backend) else {
        return Ok(None);
    };
    let n = ct.quantum.n();
    if ct.h.len() != CdKey::byte_len(n) {
        return Ok(None);
    }
    let key_bytes = xor_bytes(&oracle.query_prefix(&r_val, ct.h.len())?, &ct.h);
    let Some(cd_key) = CdKey::from_bytes(n, ct.profile.w, &key_bytes) else {
        return Ok(None);
    };
    Ok(Some(onetime::dec(&cd_key, &mut ct.quantum, rng)?))
}

/// Classical deletion certificate; the register is spent.
pub fn del<R: Rng + ?Sized>(ct: QromCiphertext, rng: &mut R) -> Result<BitVec, CdError> {
    onetime::del(ct.quantum, rng)
}

pub fn vrfy(vk: &QromVk, cert: &BitVec) -> Result<bool, CdError> {
    onetime::vrfy(&vk.cd_key, cert)
}

pub fn modify(mask: &PauliMask, cert: &BitVec) -> Result<BitVec, CdError> {
    onetime::modify(mask, cert)
}
