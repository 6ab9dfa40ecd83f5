//! Certified everlasting encryption from a nested CSS code pair, without a
//! random oracle.
//!
//! One instance carries `k1 - k2` plaintext bits; longer messages run as
//! independent parallel instances (blocks) over one register, with keys,
//! verification data and certificates concatenated in block order. Each
//! block hides a `C1/C2` coset representative inside a BB84-style state of
//! `p + q` qubits: `p` check qubits at secret positions `Q` in secret bases
//! `B`, and `q` data qubits carrying `x ⊕ w ⊕ u`. Deletion hands back the
//! register itself; verification re-measures the check qubits in their
//! preparation bases.

use rand::Rng;

use crate::bits::BitVec;
use crate::gf2::{CosetSpace, CssPair};
use crate::qsim::{MeasureBasis, PauliMask, QuantumRegister};

use super::{BackendCiphertext, BackendDecKey, BackendEncKey, CdError};

/// CSS-variant sizing: the code pair plus the check-qubit count `p`.
#[derive(Clone)]
pub struct CssProfile {
    pub pair: CssPair,
    pub p: usize,
}

impl CssProfile {
    /// Steane defaults: `p = q = 7`, `t = 1`, one message bit per block.
    pub fn steane() -> Self {
        Self {
            pair: crate::gf2::steane_pair(),
            p: 7,
        }
    }

    pub fn block_qubits(&self) -> usize {
        self.p + self.pair.length()
    }

    pub fn message_bits_per_block(&self) -> usize {
        self.pair.message_bits()
    }
}

/// Per-block verification data `(B, Q, r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssVkBlock {
    pub b_mask: BitVec,
    pub q_set: Vec<usize>,
    pub r: BitVec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssVk {
    pub blocks: Vec<CssVkBlock>,
}

/// Per-block classical part `(backend ct, u, h)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssClassicalBlock {
    pub backend: BackendCiphertext,
    pub u: BitVec,
    pub h: BitVec,
}

pub struct CssCiphertext {
    pub blocks: Vec<CssClassicalBlock>,
    pub quantum: QuantumRegister,
    pub p: usize,
    pub code_len: usize,
}

/// Quantum deletion certificate: the ciphertext register itself.
pub struct CssCert {
    pub quantum: QuantumRegister,
}

/// Pack `(B, Q, r, y)` for the classical backend.
fn pack_vk_payload(b_mask: &BitVec, q_set: &[usize], r: &BitVec, y: &BitVec) -> Vec<u8> {
    let mut out = b_mask.to_bytes();
    for &pos in q_set {
        out.extend_from_slice(&(pos as u16).to_le_bytes());
    }
    out.extend_from_slice(&r.to_bytes());
    out.extend_from_slice(&y.to_bytes());
    out
}

fn unpack_vk_payload(
    bytes: &[u8],
    p: usize,
    code_len: usize,
) -> Option<(BitVec, Vec<usize>, BitVec, BitVec)> {
    let pb = p.div_ceil(8);
    let qb = code_len.div_ceil(8);
    let want = pb + 2 * p + pb + qb;
    if bytes.len() != want {
        return None;
    }
    let b_mask = BitVec::from_bytes(&bytes[..pb], p);
    let mut q_set = Vec::with_capacity(p);
    let total = p + code_len;
    for i in 0..p {
        let off = pb + 2 * i;
        let v = u16::from_le_bytes([bytes[off], bytes[off + 1]]) as usize;
        if v >= total {
            return None;
        }
        q_set.push(v);
    }
    let mut seen = vec![false; total];
    for &v in &q_set {
        if seen[v] {
            return None;
        }
        seen[v] = true;
    }
    let r = BitVec::from_bytes(&bytes[pb + 2 * p..pb + 2 * p + pb], p);
    let y = BitVec::from_bytes(&bytes[pb + 2 * p + pb..], code_len);
    Some((b_mask, q_set, r, y))
}

/// Sorted uniform size-`p` subset of `[total]`.
fn sample_subset<R: Rng + ?Sized>(total: usize, p: usize, rng: &mut R) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..total).collect();
    for i in 0..p {
        let j = rng.gen_range(i..total);
        idx.swap(i, j);
    }
    let mut q_set: Vec<usize> = idx[..p].to_vec();
    q_set.sort_unstable();
    q_set
}

/// Encrypt `|m|` bits (a multiple of `k1 - k2`) as parallel blocks.
pub fn enc<R: Rng + ?Sized>(
    backend: BackendEncKey<'_>,
    profile: &CssProfile,
    m: &BitVec,
    rng: &mut R,
) -> Result<(CssVk, CssCiphertext), CdError> {
    let mb = profile.message_bits_per_block();
    if m.is_empty() || !m.len().is_multiple_of(mb) {
        return Err(CdError::MessageLength {
            want: mb,
            got: m.len(),
        });
    }
    let n_blocks = m.len() / mb;
    let p = profile.p;
    let code_len = profile.pair.length();
    let block_len = p + code_len;
    let mut bits = BitVec::zeros(n_blocks * block_len);
    let mut basis = BitVec::zeros(n_blocks * block_len);
    let mut vk_blocks = Vec::with_capacity(n_blocks);
    let mut ct_blocks = Vec::with_capacity(n_blocks);
    for blk in 0..n_blocks {
        let pair = &profile.pair;
        let b_mask = BitVec::random(p, rng);
        let q_set = sample_subset(block_len, p, rng);
        let y = pair.sample_coset_space(CosetSpace::C1ModC2, rng);
        let u = pair.sample_coset_space(CosetSpace::FullModC1, rng);
        let r = BitVec::random(p, rng);
        let x = pair.sample_coset_space(CosetSpace::C1ModC2, rng);
        let w = pair.sample_coset_space(CosetSpace::C2, rng);
        let backend_ct = backend.encrypt(&pack_vk_payload(&b_mask, &q_set, &r, &y), rng);
        let data = x.xor(&w).xor(&u);
        // Check qubits at the Q positions in bases B, data qubits at the
        // complement in the computational basis: this is
        // U_Q†(H^B ⊗ I)(|r> ⊗ |x ⊕ w ⊕ u>) assembled in place.
        let offset = blk * block_len;
        let mut in_q = vec![false; block_len];
        for (j, &pos) in q_set.iter().enumerate() {
            in_q[pos] = true;
            bits.set(offset + pos, r.get(j));
            basis.set(offset + pos, b_mask.get(j));
        }
        let mut dj = 0usize;
        for (pos, &checked) in in_q.iter().enumerate() {
            if !checked {
                bits.set(offset + pos, data.get(dj));
                dj += 1;
            }
        }
        let m_block = m.slice(blk * mb, mb);
        let m_rep = pair.message_to_coset(&m_block)?;
        let h = m_rep.xor(&x).xor(&y);
        vk_blocks.push(CssVkBlock { b_mask, q_set, r });
        ct_blocks.push(CssClassicalBlock {
            backend: backend_ct,
            u,
            h,
        });
    }
    let quantum = QuantumRegister::prepare_bb84(&bits, &basis)?;
    Ok((
        CssVk { blocks: vk_blocks },
        CssCiphertext {
            blocks: ct_blocks,
            quantum,
            p,
            code_len,
        },
    ))
}

/// Measure the data qubits of every block and unmask; `None` is ⊥ (backend
/// failure or implausible plaintext). Honest decryption is deterministic,
/// so the register is left exactly as it was.
pub fn dec<R: Rng + ?Sized>(
    backend: BackendDecKey<'_>,
    profile: &CssProfile,
    ct: &mut CssCiphertext,
    rng: &mut R,
) -> Result<Option<BitVec>, CdError> {
    let pair = &profile.pair;
    let block_len = ct.p + ct.code_len;
    let mut message = BitVec::zeros(ct.blocks.len() * pair.message_bits());
    for (blk, cblk) in ct.blocks.iter().enumerate() {
        let Some(payload) = backend.decrypt(&cblk.backend) else {
            return Ok(None);
        };
        let Some((_b_mask, q_set, _r, y)) = unpack_vk_payload(&payload, ct.p, ct.code_len) else {
            return Ok(None);
        };
        let offset = blk * block_len;
        let mut in_q = vec![false; block_len];
        for &pos in &q_set {
            in_q[pos] = true;
        }
        let data_positions: Vec<usize> = (0..block_len)
            .filter(|&pos| !in_q[pos])
            .map(|pos| offset + pos)
            .collect();
        let bases = vec![MeasureBasis::Computational; data_positions.len()];
        let gamma = ct.quantum.measure(&data_positions, &bases, rng)?;
        let x = pair.c2().mod_c(&gamma.xor(&cblk.u))?;
        let m_rep = cblk.h.xor(&x).xor(&y);
        // An implausible representative (wrong backend key on the PKE path)
        // surfaces as ⊥ rather than garbage bits.
        if pair.c2().mod_c(&m_rep)? != m_rep || !pair.c1().contains(&m_rep)? {
            return Ok(None);
        }
        let m_block = pair.coset_to_message(&m_rep)?;
        for (i, bit) in m_block.iter().enumerate() {
            message.set(blk * pair.message_bits() + i, bit);
        }
    }
    Ok(Some(message))
}

/// The deletion certificate is the quantum register itself.
pub fn del(ct: CssCiphertext) -> CssCert {
    CssCert {
        quantum: ct.quantum,
    }
}

/// Re-measure every block's check qubits in their preparation bases and
/// compare against `r`. Consumes the certificate.
pub fn vrfy<R: Rng + ?Sized>(vk: &CssVk, cert: CssCert, rng: &mut R) -> Result<bool, CdError> {
    let mut cert = cert;
    let n = cert.quantum.n();
    if vk.blocks.is_empty() {
        return Ok(false);
    }
    let block_len = n / vk.blocks.len();
    for (blk, vkb) in vk.blocks.iter().enumerate() {
        let offset = blk * block_len;
        let positions: Vec<usize> = vkb.q_set.iter().map(|&pos| offset + pos).collect();
        let bases: Vec<MeasureBasis> = vkb
            .b_mask
            .iter()
            .map(|b| {
                if b {
                    MeasureBasis::Hadamard
                } else {
                    MeasureBasis::Computational
                }
            })
            .collect();
        let r_prime = cert.quantum.measure(&positions, &bases, rng)?;
        if r_prime != vkb.r {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Undo a Pauli twirl on the quantum certificate (up to global phase).
pub fn modify(mask: &PauliMask, cert: &mut CssCert) -> Result<(), CdError> {
    cert.quantum.apply_pauli(mask)?;
    Ok(())
}
