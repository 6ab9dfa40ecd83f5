//! One-time SKE with certified deletion over BB84 states.
//!
//! The key fixes a basis mask θ of exact Hamming weight w and a payload
//! string r. Computational positions (θ_i = 0) carry the message XOR-masked
//! by the one-time pad read off r; Hadamard positions carry r_i in the
//! conjugate basis and serve as the deletion check. Deleting means
//! measuring everything in the Hadamard basis; verification compares the
//! certificate against r on the θ positions, so an adversary who collapsed
//! the state computationally passes with probability `2^-w`.

use rand::Rng;

use crate::bits::BitVec;
use crate::qsim::{MeasureBasis, PauliMask, QuantumRegister};

use super::CdError;

/// Key for the one-time scheme: basis mask of exact weight `w` plus the
/// n-bit payload. The message one-time pad is the restriction of `r` to
/// computational positions.
#[derive(Clone, PartialEq, Eq)]
pub struct CdKey {
    theta: BitVec,
    r: BitVec,
}

impl std::fmt::Debug for CdKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CdKey(n={}, w={})", self.n(), self.w())
    }
}

impl CdKey {
    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn w(&self) -> usize {
        self.theta.weight()
    }

    pub fn message_len(&self) -> usize {
        self.n() - self.w()
    }

    pub fn theta(&self) -> &BitVec {
        &self.theta
    }

    pub fn r(&self) -> &BitVec {
        &self.r
    }

    /// One-time pad: `r` restricted to computational positions, ascending.
    pub fn otp(&self) -> BitVec {
        let bits: Vec<bool> = (0..self.n())
            .filter(|&i| !self.theta.get(i))
            .map(|i| self.r.get(i))
            .collect();
        BitVec::from_bools(&bits)
    }

    /// Packed encoding θ || r, fixed width for a given n.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.theta.to_bytes();
        out.extend_from_slice(&self.r.to_bytes());
        out
    }

    pub fn byte_len(n: usize) -> usize {
        2 * n.div_ceil(8)
    }

    /// Decode and validate; `None` when the basis weight is wrong, which
    /// downstream layers treat as ⊥.
    pub fn from_bytes(n: usize, w: usize, bytes: &[u8]) -> Option<CdKey> {
        if bytes.len() != Self::byte_len(n) {
            return None;
        }
        let half = n.div_ceil(8);
        let theta = BitVec::from_bytes(&bytes[..half], n);
        let r = BitVec::from_bytes(&bytes[half..], n);
        if theta.weight() != w {
            return None;
        }
        Some(CdKey { theta, r })
    }
}

pub fn keygen<R: Rng + ?Sized>(n: usize, w: usize, rng: &mut R) -> Result<CdKey, CdError> {
    if w > n {
        return Err(CdError::BadWeight { n, w });
    }
    Ok(CdKey {
        theta: BitVec::random_with_weight(n, w, rng),
        r: BitVec::random(n, rng),
    })
}

/// Encrypt `|m| = n - w` bits into an n-qubit BB84 ciphertext.
pub fn enc(key: &CdKey, m: &BitVec) -> Result<QuantumRegister, CdError> {
    if m.len() != key.message_len() {
        return Err(CdError::MessageLength {
            want: key.message_len(),
            got: m.len(),
        });
    }
    let n = key.n();
    let mut bits = BitVec::zeros(n);
    let mut mi = 0usize;
    for i in 0..n {
        if key.theta.get(i) {
            bits.set(i, key.r.get(i));
        } else {
            bits.set(i, key.r.get(i) ^ m.get(mi));
            mi += 1;
        }
    }
    Ok(QuantumRegister::prepare_bb84(&bits, &key.theta)?)
}

/// Measure the computational positions and unmask. Deterministic on honest
/// ciphertexts, hence state-preserving.
pub fn dec<R: Rng + ?Sized>(
    key: &CdKey,
    reg: &mut QuantumRegister,
    rng: &mut R,
) -> Result<BitVec, CdError> {
    if reg.n() != key.n() {
        return Err(CdError::MessageLength {
            want: key.n(),
            got: reg.n(),
        });
    }
    let positions: Vec<usize> = (0..key.n()).filter(|&i| !key.theta.get(i)).collect();
    let bases = vec![MeasureBasis::Computational; positions.len()];
    let raw = reg.measure(&positions, &bases, rng)?;
    Ok(raw.xor(&key.otp()))
}

/// Measure every position in the Hadamard basis; the register is spent.
pub fn del<R: Rng + ?Sized>(mut reg: QuantumRegister, rng: &mut R) -> Result<BitVec, CdError> {
    let cert = reg.measure_all(MeasureBasis::Hadamard, rng)?;
    reg.consume();
    Ok(cert)
}

/// Accept iff the certificate agrees with `r` on every Hadamard position.
pub fn vrfy(key: &CdKey, cert: &BitVec) -> Result<bool, CdError> {
    if cert.len() != key.n() {
        return Err(CdError::CertLength {
            want: key.n(),
            got: cert.len(),
        });
    }
    Ok((0..key.n())
        .filter(|&i| key.theta.get(i))
        .all(|i| cert.get(i) == key.r.get(i)))
}

/// Correct a certificate produced from a Pauli-twirled ciphertext:
/// `Z^b` flips Hadamard-basis values, `X^a` is invisible there, so
/// `cert* = cert ⊕ b`.
pub fn modify(mask: &PauliMask, cert: &BitVec) -> Result<BitVec, CdError> {
    if cert.len() != mask.len() {
        return Err(CdError::CertLength {
            want: mask.len(),
            got: cert.len(),
        });
    }
    Ok(cert.xor(&mask.z_bits))
}
