//! Certified everlasting receiver non-committing encryption, built bitwise
//! from the QROM-variant certified everlasting PKE.
//!
//! Both columns `(i, 0)` and `(i, 1)` of a real ciphertext encrypt bit
//! `m[i]`; a decryption key holds one secret key per position, selected by
//! a random string `x`. The fake path instead encrypts `0` at column
//! `x*[i]` and `1` at the other column, so revealing the selector `x* ⊕ m`
//! later makes the fake ciphertext open to any `m`. Using the QROM backend
//! keeps certificates classical, which is what the adaptive-FE layer needs
//! when routing Modify.
//!
//! Component order everywhere is i-major, column-minor: index `2i + α`.

use rand::Rng;

use crate::base::{lwe_keygen, LweParams, LwePublicKey, LweSecretKey, Qrom};
use crate::bits::BitVec;
use crate::cd::qrom::{self, QromCiphertext, QromProfile, QromVk};
use crate::cd::{BackendDecKey, BackendEncKey, CdError};

#[derive(Clone, Copy)]
pub struct RnceProfile {
    pub lwe: LweParams,
    pub qrom: QromProfile,
}

impl RnceProfile {
    pub fn test_profile() -> Self {
        Self {
            lwe: LweParams::test_profile(),
            qrom: QromProfile::test_profile(),
        }
    }

    /// Oracle bytes needed by the 1-bit components.
    pub fn oracle_bytes(&self) -> usize {
        self.qrom.oracle_bytes(1)
    }
}

pub struct RncePk {
    pub profile: RnceProfile,
    pub columns: Vec<[LwePublicKey; 2]>,
}

pub struct RnceMsk {
    pub columns: Vec<[LweSecretKey; 2]>,
}

/// `(x, {sk_{i, x[i]}})`.
pub struct RnceSk {
    pub selector: BitVec,
    pub keys: Vec<LweSecretKey>,
}

pub struct RnceVk {
    pub components: Vec<QromVk>,
}

pub struct RnceCiphertext {
    pub components: Vec<QromCiphertext>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RnceCert {
    pub components: Vec<BitVec>,
}

/// Fake-encryption auxiliary state: the pivot selector `x*`.
pub struct RnceAux {
    pub x_star: BitVec,
}

impl RnceCiphertext {
    pub fn message_len(&self) -> usize {
        self.components.len() / 2
    }
}

pub fn setup<R: Rng + ?Sized>(
    n: usize,
    profile: RnceProfile,
    rng: &mut R,
) -> Result<(RncePk, RnceMsk), CdError> {
    let mut pks = Vec::with_capacity(n);
    let mut sks = Vec::with_capacity(n);
    for _ in 0..n {
        let (pk0, sk0) = lwe_keygen(profile.lwe, rng)?;
        let (pk1, sk1) = lwe_keygen(profile.lwe, rng)?;
        pks.push([pk0, pk1]);
        sks.push([sk0, sk1]);
    }
    Ok((
        RncePk {
            profile,
            columns: pks,
        },
        RnceMsk { columns: sks },
    ))
}

pub fn keygen<R: Rng + ?Sized>(msk: &RnceMsk, rng: &mut R) -> RnceSk {
    let n = msk.columns.len();
    let selector = BitVec::random(n, rng);
    let keys = (0..n)
        .map(|i| msk.columns[i][usize::from(selector.get(i))].clone())
        .collect();
    RnceSk { selector, keys }
}

pub fn enc<R: Rng + ?Sized>(
    pk: &RncePk,
    m: &BitVec,
    oracle: &mut Qrom,
    rng: &mut R,
) -> Result<(RnceVk, RnceCiphertext), CdError> {
    let n = pk.columns.len();
    if m.len() != n {
        return Err(CdError::MessageLength {
            want: n,
            got: m.len(),
        });
    }
    let mut vks = Vec::with_capacity(2 * n);
    let mut cts = Vec::with_capacity(2 * n);
    for i in 0..n {
        for alpha in 0..2 {
            let bit = BitVec::from_bools(&[m.get(i)]);
            let (vk, ct) = qrom::enc(
                BackendEncKey::Pke(&pk.columns[i][alpha]),
                pk.profile.qrom,
                &bit,
                oracle,
                rng,
            )?;
            vks.push(vk);
            cts.push(ct);
        }
    }
    Ok((RnceVk { components: vks }, RnceCiphertext { components: cts }))
}

/// Decrypt column `x[i]` of every position; `None` propagates a component ⊥.
pub fn dec<R: Rng + ?Sized>(
    sk: &RnceSk,
    ct: &mut RnceCiphertext,
    oracle: &mut Qrom,
    rng: &mut R,
) -> Result<Option<BitVec>, CdError> {
    let n = sk.selector.len();
    if ct.components.len() != 2 * n {
        return Err(CdError::MessageLength {
            want: 2 * n,
            got: ct.components.len(),
        });
    }
    let mut m = BitVec::zeros(n);
    for i in 0..n {
        let idx = 2 * i + usize::from(sk.selector.get(i));
        let out = qrom::dec(
            BackendDecKey::Pke(&sk.keys[i]),
            &mut ct.components[idx],
            oracle,
            rng,
        )?;
        match out {
            Some(bit) => m.set(i, bit.get(0)),
            None => return Ok(None),
        }
    }
    Ok(Some(m))
}

/// Fake ciphertext: column `x*[i]` encrypts 0, the other column 1.
pub fn fake<R: Rng + ?Sized>(
    pk: &RncePk,
    oracle: &mut Qrom,
    rng: &mut R,
) -> Result<(RnceVk, RnceCiphertext, RnceAux), CdError> {
    let n = pk.columns.len();
    let x_star = BitVec::random(n, rng);
    let mut vks = Vec::with_capacity(2 * n);
    let mut cts = Vec::with_capacity(2 * n);
    for i in 0..n {
        for alpha in 0..2 {
            let bit = alpha != usize::from(x_star.get(i));
            let (vk, ct) = qrom::enc(
                BackendEncKey::Pke(&pk.columns[i][alpha]),
                pk.profile.qrom,
                &BitVec::from_bools(&[bit]),
                oracle,
                rng,
            )?;
            vks.push(vk);
            cts.push(ct);
        }
    }
    Ok((
        RnceVk { components: vks },
        RnceCiphertext { components: cts },
        RnceAux { x_star },
    ))
}

/// Open the fake ciphertext to `m`: selector `x* ⊕ m` with matching keys.
pub fn reveal(msk: &RnceMsk, aux: &RnceAux, m: &BitVec) -> Result<RnceSk, CdError> {
    let n = msk.columns.len();
    if m.len() != n || aux.x_star.len() != n {
        return Err(CdError::MessageLength {
            want: n,
            got: m.len(),
        });
    }
    let selector = aux.x_star.xor(m);
    let keys = (0..n)
        .map(|i| msk.columns[i][usize::from(selector.get(i))].clone())
        .collect();
    Ok(RnceSk { selector, keys })
}

/// Delete every component; certificates aggregate in component order.
pub fn del<R: Rng + ?Sized>(ct: RnceCiphertext, rng: &mut R) -> Result<RnceCert, CdError> {
    let mut certs = Vec::with_capacity(ct.components.len());
    for c in ct.components {
        certs.push(qrom::del(c, rng)?);
    }
    Ok(RnceCert { components: certs })
}

/// Conjunction over all component verdicts.
pub fn vrfy(vk: &RnceVk, cert: &RnceCert) -> Result<bool, CdError> {
    if vk.components.len() != cert.components.len() {
        return Err(CdError::CertLength {
            want: vk.components.len(),
            got: cert.components.len(),
        });
    }
    for (v, c) in vk.components.iter().zip(&cert.components) {
        if !qrom::vrfy(v, c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    fn small_setup(n: usize, seed: u64) -> (RncePk, RnceMsk, Qrom, ChaCha12Rng) {
        let mut r = rng(seed);
        let profile = RnceProfile::test_profile();
        let (pk, msk) = setup(n, profile, &mut r).unwrap();
        let oracle = Qrom::new(profile.oracle_bytes(), seed ^ 0x5eed);
        (pk, msk, oracle, r)
    }

    #[test]
    fn real_roundtrip_random_selectors() {
        let (pk, msk, mut oracle, mut r) = small_setup(6, 1);
        for _ in 0..200 {
            let m = BitVec::random(6, &mut r);
            let (_vk, mut ct) = enc(&pk, &m, &mut oracle, &mut r).unwrap();
            let sk = keygen(&msk, &mut r);
            assert_eq!(dec(&sk, &mut ct, &mut oracle, &mut r).unwrap(), Some(m));
        }
    }

    #[test]
    fn two_keys_agree_on_one_ciphertext() {
        // Both columns carry m[i], so independent keygen calls decrypt the
        // same ciphertext identically.
        let (pk, msk, mut oracle, mut r) = small_setup(5, 2);
        for _ in 0..100 {
            let m = BitVec::random(5, &mut r);
            let (_vk, mut ct) = enc(&pk, &m, &mut oracle, &mut r).unwrap();
            let sk1 = keygen(&msk, &mut r);
            let sk2 = keygen(&msk, &mut r);
            let d1 = dec(&sk1, &mut ct, &mut oracle, &mut r).unwrap();
            let d2 = dec(&sk2, &mut ct, &mut oracle, &mut r).unwrap();
            assert_eq!(d1, Some(m.clone()));
            assert_eq!(d1, d2);
        }
    }

    #[test]
    fn deletion_and_single_corruption() {
        let (pk, _msk, mut oracle, mut r) = small_setup(4, 3);
        let m = BitVec::random(4, &mut r);
        let (vk, ct) = enc(&pk, &m, &mut oracle, &mut r).unwrap();
        let mut cert = del(ct, &mut r).unwrap();
        assert!(vrfy(&vk, &cert).unwrap());
        // One flipped certificate bit at a checked position must refuse.
        let vk0 = &vk.components[0];
        let checked = (0..cert.components[0].len())
            .find(|&i| vk0.cd_key.theta().get(i))
            .unwrap();
        cert.components[0].flip(checked);
        assert!(!vrfy(&vk, &cert).unwrap());
    }

    #[test]
    fn fake_reveal_opens_to_any_message() {
        let (pk, msk, mut oracle, mut r) = small_setup(6, 4);
        // m = 0 reveals the pivot selector itself.
        let (_vk, mut fct, aux) = fake(&pk, &mut oracle, &mut r).unwrap();
        let sk = reveal(&msk, &aux, &BitVec::zeros(6)).unwrap();
        assert_eq!(sk.selector, aux.x_star);
        assert_eq!(
            dec(&sk, &mut fct, &mut oracle, &mut r).unwrap(),
            Some(BitVec::zeros(6))
        );
        // Random messages: dec(fake ct, revealed sk) = m.
        for _ in 0..100 {
            let m = BitVec::random(6, &mut r);
            let (_vk, mut fct, aux) = fake(&pk, &mut oracle, &mut r).unwrap();
            let sk = reveal(&msk, &aux, &m).unwrap();
            assert_eq!(dec(&sk, &mut fct, &mut oracle, &mut r).unwrap(), Some(m));
        }
    }

    #[test]
    fn fake_deletion_verifies() {
        // Fake reuses honest component encryption, so deletion verifies.
        let (pk, _msk, mut oracle, mut r) = small_setup(4, 5);
        for _ in 0..50 {
            let (vk, fct, _aux) = fake(&pk, &mut oracle, &mut r).unwrap();
            let cert = del(fct, &mut r).unwrap();
            assert!(vrfy(&vk, &cert).unwrap());
        }
    }

    #[test]
    fn revealed_selector_uniform_per_bit() {
        // Fresh x* each time makes the revealed selector uniform; chi^2 per
        // bit over 2000 draws (the selector is x* ⊕ m with x* uniform).
        let (pk, msk, mut oracle, mut r) = small_setup(4, 6);
        let m = BitVec::random(4, &mut r);
        let trials = 2000;
        let mut ones = [0usize; 4];
        for _ in 0..trials {
            let (_vk, _fct, aux) = fake(&pk, &mut oracle, &mut r).unwrap();
            let sk = reveal(&msk, &aux, &m).unwrap();
            for (i, c) in ones.iter_mut().enumerate() {
                if sk.selector.get(i) {
                    *c += 1;
                }
            }
        }
        let sigma = (trials as f64 * 0.25).sqrt();
        for &c in &ones {
            assert!((c as f64 - trials as f64 / 2.0).abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn real_and_fake_paths_functionally_consistent() {
        // The observable content of RNC security that is testable without
        // an unbounded adversary: both paths decrypt to the same m.
        let (pk, msk, mut oracle, mut r) = small_setup(5, 7);
        for _ in 0..50 {
            let m = BitVec::random(5, &mut r);
            let (_v1, mut real_ct) = enc(&pk, &m, &mut oracle, &mut r).unwrap();
            let real_sk = keygen(&msk, &mut r);
            let (_v2, mut fake_ct, aux) = fake(&pk, &mut oracle, &mut r).unwrap();
            let fake_sk = reveal(&msk, &aux, &m).unwrap();
            let real_out = dec(&real_sk, &mut real_ct, &mut oracle, &mut r).unwrap();
            let fake_out = dec(&fake_sk, &mut fake_ct, &mut oracle, &mut r).unwrap();
            assert_eq!(real_out, Some(m.clone()));
            assert_eq!(real_out, fake_out);
        }
    }
}
