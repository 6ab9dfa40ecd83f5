//! 1-bounded functional encryption with adaptive security: the
//! non-adaptive ciphertext's quantum layout is hidden under a uniform Pauli
//! twirl whose mask is itself encrypted with receiver non-committing
//! encryption.
//!
//! Decryption recovers `(a, c)`, untwirls, runs the inner decryption, and
//! re-applies the twirl so the stored ciphertext stays intact.
//! Verification corrects the inner certificate with `Modify(a, c, ·)`
//! before checking it, alongside the RNCE certificate.

use rand::Rng;

use crate::base::Qrom;
use crate::bits::BitVec;
use crate::garble::FunctionFamily;
use crate::qsim::PauliMask;
use crate::rnce::{self, RnceCert, RnceCiphertext, RnceMsk, RncePk, RnceProfile, RnceSk, RnceVk};

use super::one_bounded::{Fe1Cert, Fe1Ciphertext, Fe1Mpk, Fe1Msk, Fe1Scheme, Fe1SkF, Fe1Vk};
use super::FeError;

pub struct FeadScheme<F: FunctionFamily> {
    pub nad: Fe1Scheme<F>,
    pub rnce_profile: RnceProfile,
}

pub struct FeadMpk {
    pub nad: Fe1Mpk,
    pub nce: RncePk,
}

pub struct FeadMsk {
    pub nad: Fe1Msk,
    pub nce: RnceMsk,
}

pub struct FeadSkF {
    pub nad: Fe1SkF,
    pub nce: RnceSk,
}

pub struct FeadCiphertext {
    /// The twirled inner ciphertext.
    pub nad: Fe1Ciphertext,
    pub nce: RnceCiphertext,
}

pub struct FeadVk {
    pub nad: Fe1Vk,
    pub nce: RnceVk,
    pub x_mask: BitVec,
    pub z_mask: BitVec,
}

pub struct FeadCert {
    pub nad: Fe1Cert,
    pub nce: RnceCert,
}

impl<F: FunctionFamily> FeadScheme<F> {
    pub fn new(nad: Fe1Scheme<F>, rnce_profile: RnceProfile) -> Self {
        Self { nad, rnce_profile }
    }

    /// Oracle sizing: the inner scheme's components dominate (1-bit RNCE
    /// components need strictly fewer bytes).
    pub fn oracle_bytes(&self) -> usize {
        self.nad
            .profile
            .oracle_bytes()
            .max(self.rnce_profile.oracle_bytes())
    }

    pub fn setup<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(FeadMpk, FeadMsk), FeError> {
        let (nad_mpk, nad_msk) = self.nad.setup(rng)?;
        let qlen = self.nad.quantum_len()?;
        let (nce_pk, nce_msk) = rnce::setup(2 * qlen, self.rnce_profile, rng)?;
        Ok((
            FeadMpk {
                nad: nad_mpk,
                nce: nce_pk,
            },
            FeadMsk {
                nad: nad_msk,
                nce: nce_msk,
            },
        ))
    }

    pub fn keygen<R: Rng + ?Sized>(
        &self,
        msk: &FeadMsk,
        f: &F::Function,
        rng: &mut R,
    ) -> Result<FeadSkF, FeError> {
        Ok(FeadSkF {
            nad: self.nad.keygen(&msk.nad, f)?,
            nce: rnce::keygen(&msk.nce, rng),
        })
    }

    pub fn enc<R: Rng + ?Sized>(
        &self,
        mpk: &FeadMpk,
        m: &BitVec,
        oracle: &mut Qrom,
        rng: &mut R,
    ) -> Result<(FeadVk, FeadCiphertext), FeError> {
        let (nad_vk, mut nad_ct) = self.nad.enc(&mpk.nad, m, oracle, rng)?;
        let qlen = self.nad.quantum_len()?;
        let x_mask = BitVec::random(qlen, rng);
        let z_mask = BitVec::random(qlen, rng);
        self.nad
            .apply_pauli_layout(&mut nad_ct, &PauliMask::new(x_mask.clone(), z_mask.clone()))?;
        let (nce_vk, nce_ct) = rnce::enc(&mpk.nce, &x_mask.concat(&z_mask), oracle, rng)?;
        Ok((
            FeadVk {
                nad: nad_vk,
                nce: nce_vk,
                x_mask,
                z_mask,
            },
            FeadCiphertext {
                nad: nad_ct,
                nce: nce_ct,
            },
        ))
    }

    pub fn dec<R: Rng + ?Sized>(
        &self,
        skf: &FeadSkF,
        ct: &mut FeadCiphertext,
        oracle: &mut Qrom,
        rng: &mut R,
    ) -> Result<Option<BitVec>, FeError> {
        let Some(masks) = rnce::dec(&skf.nce, &mut ct.nce, oracle, rng)? else {
            return Ok(None);
        };
        let qlen = masks.len() / 2;
        let mask = PauliMask::new(masks.slice(0, qlen), masks.slice(qlen, qlen));
        self.nad.apply_pauli_layout(&mut ct.nad, &mask)?;
        let out = self.nad.dec(&skf.nad, &mut ct.nad, oracle, rng)?;
        // Restore the stored (twirled) form so the ciphertext keeps its
        // public shape for later decryptions or deletion.
        self.nad.apply_pauli_layout(&mut ct.nad, &mask)?;
        Ok(out)
    }

    pub fn del<R: Rng + ?Sized>(&self, ct: FeadCiphertext, rng: &mut R) -> Result<FeadCert, FeError> {
        Ok(FeadCert {
            nad: self.nad.del(ct.nad, rng)?,
            nce: rnce::del(ct.nce, rng)?,
        })
    }

    pub fn vrfy(&self, vk: &FeadVk, cert: &FeadCert) -> Result<bool, FeError> {
        if !rnce::vrfy(&vk.nce, &cert.nce)? {
            return Ok(false);
        }
        let mask = PauliMask::new(vk.x_mask.clone(), vk.z_mask.clone());
        let fixed = self.nad.modify(&mask, &cert.nad)?;
        self.nad.vrfy(&vk.nad, &fixed)
    }
}
