//! 1-bounded functional encryption with non-adaptive security.
//!
//! Encryption garbles the universal circuit with the message hardwired and
//! encrypts each input-wire label under a per-position key pair; a function
//! key selects one column per position, opening exactly the labels for
//! `encode_key(f)`, and evaluation yields `f(m)`. Deletion, verification
//! and Pauli routing aggregate over the garbled circuit followed by the
//! `2s` label components in i-major, column-minor order.

use rand::Rng;

use crate::base::{lwe_keygen, LweParams, LwePublicKey, LweSecretKey, Qrom, SkeKey};
use crate::bits::BitVec;
use crate::cd::qrom::{self, QromCiphertext, QromVk};
use crate::cd::{BackendDecKey, BackendEncKey};
use crate::garble::scheme::{self, GcCert, GcProfile, GcVk, GarbledCircuit};
use crate::garble::FunctionFamily;
use crate::qsim::PauliMask;

use super::FeError;

#[derive(Clone, Copy)]
pub struct Fe1Profile {
    pub gc: GcProfile,
    pub lwe: LweParams,
}

impl Fe1Profile {
    pub fn default_lambda128() -> Self {
        Self {
            gc: GcProfile::default_lambda128(),
            lwe: LweParams::default_profile(),
        }
    }

    pub fn test_profile() -> Self {
        Self {
            gc: GcProfile::test_profile(),
            lwe: LweParams::test_profile(),
        }
    }

    pub fn oracle_bytes(&self) -> usize {
        self.gc.oracle_bytes()
    }
}

pub struct Fe1Scheme<F: FunctionFamily> {
    pub family: F,
    pub profile: Fe1Profile,
}

pub struct Fe1Mpk {
    pub columns: Vec<[LwePublicKey; 2]>,
}

pub struct Fe1Msk {
    pub columns: Vec<[LweSecretKey; 2]>,
}

/// `(f, {sk_{i, f[i]}})`.
pub struct Fe1SkF {
    pub f_bits: BitVec,
    pub keys: Vec<LweSecretKey>,
}

pub struct Fe1Ciphertext {
    pub gc: GarbledCircuit,
    /// `2s` label ciphertexts, index `2i + α`.
    pub label_cts: Vec<QromCiphertext>,
}

pub struct Fe1Vk {
    pub gc_vk: GcVk,
    pub label_vks: Vec<QromVk>,
}

pub struct Fe1Cert {
    pub gc_cert: GcCert,
    pub label_certs: Vec<BitVec>,
}

impl<F: FunctionFamily> Fe1Scheme<F> {
    pub fn new(family: F, profile: Fe1Profile) -> Self {
        Self { family, profile }
    }

    pub fn key_len(&self) -> usize {
        self.family.key_len()
    }

    /// Gate count of the hardwired circuit; the families used here produce
    /// one fixed shape per family, independent of the message.
    pub fn circuit_gates(&self) -> Result<usize, FeError> {
        let zero = BitVec::zeros(self.family.message_len());
        Ok(self.family.hardwire(&zero)?.gates.len())
    }

    /// Qubits in a full ciphertext's quantum layout: the garbled circuit's
    /// components followed by the label components.
    pub fn quantum_len(&self) -> Result<usize, FeError> {
        let comp = self.profile.gc.component_qubits();
        Ok(self.circuit_gates()? * 8 * comp + 2 * self.key_len() * comp)
    }

    pub fn setup<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Fe1Mpk, Fe1Msk), FeError> {
        let s = self.key_len();
        let mut pks = Vec::with_capacity(s);
        let mut sks = Vec::with_capacity(s);
        for _ in 0..s {
            let (pk0, sk0) = lwe_keygen(self.profile.lwe, rng).map_err(crate::cd::CdError::from)?;
            let (pk1, sk1) = lwe_keygen(self.profile.lwe, rng).map_err(crate::cd::CdError::from)?;
            pks.push([pk0, pk1]);
            sks.push([sk0, sk1]);
        }
        Ok((Fe1Mpk { columns: pks }, Fe1Msk { columns: sks }))
    }

    pub fn keygen(&self, msk: &Fe1Msk, f: &F::Function) -> Result<Fe1SkF, FeError> {
        let f_bits = self.family.encode_key(f)?;
        if f_bits.len() != msk.columns.len() {
            return Err(FeError::KeyLength {
                want: msk.columns.len(),
                got: f_bits.len(),
            });
        }
        let keys = (0..f_bits.len())
            .map(|i| msk.columns[i][usize::from(f_bits.get(i))].clone())
            .collect();
        Ok(Fe1SkF { f_bits, keys })
    }

    pub fn enc<R: Rng + ?Sized>(
        &self,
        mpk: &Fe1Mpk,
        m: &BitVec,
        oracle: &mut Qrom,
        rng: &mut R,
    ) -> Result<(Fe1Vk, Fe1Ciphertext), FeError> {
        let s = self.key_len();
        if mpk.columns.len() != s {
            return Err(FeError::KeyLength {
                want: s,
                got: mpk.columns.len(),
            });
        }
        let circuit = self.family.hardwire(m)?;
        let labels = scheme::samp(s, self.profile.gc, rng);
        let (gc, gc_vk) = scheme::grbl(&circuit, &labels, self.profile.gc, oracle, rng)?;
        let mut label_vks = Vec::with_capacity(2 * s);
        let mut label_cts = Vec::with_capacity(2 * s);
        for i in 0..s {
            for alpha in 0..2usize {
                let label = &labels.pairs[i][alpha];
                let bits = BitVec::from_bytes(&label.0, label.0.len() * 8);
                let (vk, ct) = qrom::enc(
                    BackendEncKey::Pke(&mpk.columns[i][alpha]),
                    self.profile.gc.qrom,
                    &bits,
                    oracle,
                    rng,
                )?;
                label_vks.push(vk);
                label_cts.push(ct);
            }
        }
        Ok((
            Fe1Vk { gc_vk, label_vks },
            Fe1Ciphertext { gc, label_cts },
        ))
    }

    /// Recover the labels at `(i, f[i])` and evaluate; `None` propagates ⊥
    /// from any layer. Honest decryption leaves the ciphertext reusable.
    pub fn dec<R: Rng + ?Sized>(
        &self,
        skf: &Fe1SkF,
        ct: &mut Fe1Ciphertext,
        oracle: &mut Qrom,
        rng: &mut R,
    ) -> Result<Option<BitVec>, FeError> {
        let s = skf.f_bits.len();
        if ct.label_cts.len() != 2 * s {
            return Err(FeError::KeyLength {
                want: 2 * s,
                got: ct.label_cts.len(),
            });
        }
        let mut labels = Vec::with_capacity(s);
        for i in 0..s {
            let idx = 2 * i + usize::from(skf.f_bits.get(i));
            let out = qrom::dec(
                BackendDecKey::Pke(&skf.keys[i]),
                &mut ct.label_cts[idx],
                oracle,
                rng,
            )?;
            match out {
                Some(bits) => labels.push(SkeKey(bits.to_bytes())),
                None => return Ok(None),
            }
        }
        Ok(scheme::eval(&mut ct.gc, &labels, oracle, rng)?)
    }

    pub fn del<R: Rng + ?Sized>(&self, ct: Fe1Ciphertext, rng: &mut R) -> Result<Fe1Cert, FeError> {
        let gc_cert = scheme::del(ct.gc, rng)?;
        let mut label_certs = Vec::with_capacity(ct.label_cts.len());
        for c in ct.label_cts {
            label_certs.push(qrom::del(c, rng)?);
        }
        Ok(Fe1Cert {
            gc_cert,
            label_certs,
        })
    }

    pub fn vrfy(&self, vk: &Fe1Vk, cert: &Fe1Cert) -> Result<bool, FeError> {
        if !scheme::vrfy(&vk.gc_vk, &cert.gc_cert)? {
            return Ok(false);
        }
        if vk.label_vks.len() != cert.label_certs.len() {
            return Err(FeError::KeyLength {
                want: vk.label_vks.len(),
                got: cert.label_certs.len(),
            });
        }
        for (v, c) in vk.label_vks.iter().zip(&cert.label_certs) {
            if !qrom::vrfy(v, c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Apply a Pauli layer over the full ciphertext layout (adaptive twirl).
    pub fn apply_pauli_layout(
        &self,
        ct: &mut Fe1Ciphertext,
        mask: &PauliMask,
    ) -> Result<(), FeError> {
        let comp = self.profile.gc.component_qubits();
        let gc_len = scheme::quantum_len(&ct.gc);
        let total = gc_len + ct.label_cts.len() * comp;
        if mask.len() != total {
            return Err(FeError::LayoutLength {
                want: total,
                got: mask.len(),
            });
        }
        let gc_mask = PauliMask::new(mask.x_bits.slice(0, gc_len), mask.z_bits.slice(0, gc_len));
        scheme::apply_pauli_layout(&mut ct.gc, &gc_mask)?;
        let mut off = gc_len;
        for c in ct.label_cts.iter_mut() {
            let sub = PauliMask::new(mask.x_bits.slice(off, comp), mask.z_bits.slice(off, comp));
            c.quantum
                .apply_pauli(&sub)
                .map_err(crate::cd::CdError::from)?;
            off += comp;
        }
        Ok(())
    }

    /// Slice a full-layout Pauli mask down to per-component certificate
    /// corrections.
    pub fn modify(&self, mask: &PauliMask, cert: &Fe1Cert) -> Result<Fe1Cert, FeError> {
        let comp = self.profile.gc.component_qubits();
        let gc_len = cert.gc_cert.gates.len() * 8 * comp;
        let total = gc_len + cert.label_certs.len() * comp;
        if mask.len() != total {
            return Err(FeError::LayoutLength {
                want: total,
                got: mask.len(),
            });
        }
        let gc_mask = PauliMask::new(mask.x_bits.slice(0, gc_len), mask.z_bits.slice(0, gc_len));
        let gc_cert = scheme::modify(&gc_mask, &cert.gc_cert, comp)?;
        let mut off = gc_len;
        let mut label_certs = Vec::with_capacity(cert.label_certs.len());
        for c in &cert.label_certs {
            let sub = PauliMask::new(mask.x_bits.slice(off, comp), mask.z_bits.slice(off, comp));
            label_certs.push(qrom::modify(&sub, c)?);
            off += comp;
        }
        Ok(Fe1Cert {
            gc_cert,
            label_certs,
        })
    }
}
