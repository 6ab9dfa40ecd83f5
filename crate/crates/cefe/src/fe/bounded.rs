//! q-bounded functional encryption for low-degree polynomial functionality
//! over GF(2^k): N parallel 1-bounded instances share the plaintext through
//! degree-t polynomials, function keys evaluate the re-randomized
//! functionality `C(x) + Σ_{i∈Δ} Z_i` on a random index set Γ of size
//! `tD + 1`, and decryption interpolates the degree-Dt result polynomial at
//! zero.
//!
//! The honest algorithms never branch on key-query order, so a single code
//! path serves both the adaptive and non-adaptive readings; the 1-bounded
//! layer underneath is the non-adaptive scheme.

use std::collections::BTreeSet;

use rand::Rng;

use crate::base::Qrom;
use crate::field::{interpolate_at, random_poly_with_constant, FieldElem};
use crate::garble::{LinearFunction, LinearGf2kFamily};
use crate::stats::binomial_ci95;

use super::one_bounded::{Fe1Cert, Fe1Ciphertext, Fe1Mpk, Fe1Msk, Fe1Profile, Fe1Scheme, Fe1SkF, Fe1Vk};
use super::FeError;

/// Parameter bundle. The constructor implements the asymptotic regime with
/// concrete constants (`t = q²λ`, `N = next power of two ≥ D²q²t` capped
/// below by `tD+1`, `v = λ`, `S = 4vq²`); every field can also be pinned
/// directly, which is how the desk profile is defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FeqParams {
    pub q_bound: usize,
    pub lambda_desk: usize,
    pub degree_d: usize,
    pub ell: usize,
    pub t: usize,
    pub n_instances: usize,
    pub v: usize,
    pub s_pads: usize,
    pub field_k: u8,
}

impl FeqParams {
    pub fn from_theta(
        q_bound: usize,
        lambda_desk: usize,
        degree_d: usize,
        ell: usize,
    ) -> Result<Self, FeError> {
        let t = q_bound * q_bound * lambda_desk;
        let floor = degree_d * degree_d * q_bound * q_bound * t;
        let mut n_instances = 1usize;
        while n_instances < floor.max(t * degree_d + 1) {
            n_instances *= 2;
        }
        let v = lambda_desk;
        let s_pads = 4 * v * q_bound * q_bound;
        let field_k = [3u8, 6, 8]
            .into_iter()
            .find(|&k| (1usize << k) > n_instances)
            .ok_or_else(|| FeError::Params("no supported field larger than N".into()))?;
        let p = Self {
            q_bound,
            lambda_desk,
            degree_d,
            ell,
            t,
            n_instances,
            v,
            s_pads,
            field_k,
        };
        p.validate()?;
        Ok(p)
    }

    /// The desk profile: q=1, λ=2, D=2, ℓ=2, t=2 (so tD+1 = 5), N=16, v=4,
    /// S=16 over GF(64).
    pub fn desk_profile() -> Self {
        Self {
            q_bound: 1,
            lambda_desk: 2,
            degree_d: 2,
            ell: 2,
            t: 2,
            n_instances: 16,
            v: 4,
            s_pads: 16,
            field_k: 6,
        }
    }

    /// Minimal profile for high-volume correctness trials: t=1, tD+1 = 3,
    /// N=4, v=1, S=4 over GF(8).
    pub fn micro_profile() -> Self {
        Self {
            q_bound: 1,
            lambda_desk: 1,
            degree_d: 2,
            ell: 2,
            t: 1,
            n_instances: 4,
            v: 1,
            s_pads: 4,
            field_k: 3,
        }
    }

    /// Small two-key profile exercising q = 2 flows at desk scale.
    pub fn q2_test_profile() -> Self {
        Self {
            q_bound: 2,
            lambda_desk: 2,
            degree_d: 2,
            ell: 2,
            t: 2,
            n_instances: 16,
            v: 2,
            s_pads: 8,
            field_k: 6,
        }
    }

    /// Number of evaluation points per key.
    pub fn gamma_size(&self) -> usize {
        self.t * self.degree_d + 1
    }

    pub fn validate(&self) -> Result<(), FeError> {
        if self.gamma_size() > self.n_instances {
            return Err(FeError::Params(format!(
                "tD+1 = {} exceeds N = {}",
                self.gamma_size(),
                self.n_instances
            )));
        }
        if (1usize << self.field_k) <= self.n_instances {
            return Err(FeError::Params(format!(
                "field 2^{} too small for N = {} nonzero indices",
                self.field_k, self.n_instances
            )));
        }
        if self.v > self.s_pads {
            return Err(FeError::Params(format!(
                "v = {} exceeds S = {}",
                self.v, self.s_pads
            )));
        }
        if self.v == 0 || self.ell == 0 || self.q_bound == 0 {
            return Err(FeError::Params("counts must be positive".into()));
        }
        Ok(())
    }

    /// Parse the key=value text format (keys: q, lambda, d, ell, t, n, v,
    /// s, k); omitted keys fall back to the Θ-rule over (q, lambda, d, ell).
    pub fn parse(text: &str) -> Result<Self, FeError> {
        let mut kv = std::collections::HashMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| FeError::Params(format!("expected key=value, got {line:?}")))?;
            let v: usize = v
                .trim()
                .parse()
                .map_err(|_| FeError::Params(format!("bad value in {line:?}")))?;
            kv.insert(k.trim().to_string(), v);
        }
        let grab = |key: &str, default: usize| kv.get(key).copied().unwrap_or(default);
        let q = grab("q", 1);
        let lambda = grab("lambda", 2);
        let d = grab("d", 2);
        let ell = grab("ell", 2);
        let mut p = Self::from_theta(q, lambda, d, ell)?;
        if let Some(&t) = kv.get("t") {
            p.t = t;
        }
        if let Some(&n) = kv.get("n") {
            p.n_instances = n;
        }
        if let Some(&v) = kv.get("v") {
            p.v = v;
        }
        if let Some(&s) = kv.get("s") {
            p.s_pads = s;
        }
        if let Some(&k) = kv.get("k") {
            p.field_k = k as u8;
        }
        p.validate()?;
        Ok(p)
    }
}

pub struct FeqScheme {
    pub params: FeqParams,
    pub one: Fe1Scheme<LinearGf2kFamily>,
}

pub struct FeqMpk {
    pub instances: Vec<Fe1Mpk>,
}

pub struct FeqMsk {
    pub instances: Vec<Fe1Msk>,
}

/// `(Γ, Δ, {sk_i}_{i∈Γ})`.
pub struct FeqSkC {
    pub gamma: Vec<usize>,
    pub delta: BTreeSet<usize>,
    pub keys: Vec<Fe1SkF>,
}

pub struct FeqCiphertext {
    pub instances: Vec<Fe1Ciphertext>,
}

pub struct FeqVk {
    pub instances: Vec<Fe1Vk>,
}

pub struct FeqCert {
    pub instances: Vec<Fe1Cert>,
}

fn sample_subset<R: Rng + ?Sized>(total: usize, size: usize, rng: &mut R) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..total).collect();
    for i in 0..size {
        let j = rng.gen_range(i..total);
        idx.swap(i, j);
    }
    let mut out: Vec<usize> = idx[..size].to_vec();
    out.sort_unstable();
    out
}

impl FeqScheme {
    pub fn new(params: FeqParams, profile: Fe1Profile) -> Result<Self, FeError> {
        params.validate()?;
        let family = LinearGf2kFamily::new(
            params.ell,
            params.degree_d,
            params.s_pads,
            params.field_k,
        )?;
        Ok(Self {
            params,
            one: Fe1Scheme::new(family, profile),
        })
    }

    pub fn monomial_count(&self) -> usize {
        self.one.family.monomials().len()
    }

    pub fn oracle_bytes(&self) -> usize {
        self.one.profile.oracle_bytes()
    }

    pub fn setup<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(FeqMpk, FeqMsk), FeError> {
        let mut mpks = Vec::with_capacity(self.params.n_instances);
        let mut msks = Vec::with_capacity(self.params.n_instances);
        for _ in 0..self.params.n_instances {
            let (mpk, msk) = self.one.setup(rng)?;
            mpks.push(mpk);
            msks.push(msk);
        }
        Ok((FeqMpk { instances: mpks }, FeqMsk { instances: msks }))
    }

    /// Key for a circuit given as its graded-lex coefficient vector.
    pub fn keygen<R: Rng + ?Sized>(
        &self,
        msk: &FeqMsk,
        coeffs: &[FieldElem],
        rng: &mut R,
    ) -> Result<FeqSkC, FeError> {
        let gamma = sample_subset(self.params.n_instances, self.params.gamma_size(), rng);
        let delta: BTreeSet<usize> =
            sample_subset(self.params.s_pads, self.params.v, rng).into_iter().collect();
        self.keygen_with_sets(msk, coeffs, gamma, delta)
    }

    /// Deterministic-set variant (tests and reproducible transcripts).
    pub fn keygen_with_sets(
        &self,
        msk: &FeqMsk,
        coeffs: &[FieldElem],
        gamma: Vec<usize>,
        delta: BTreeSet<usize>,
    ) -> Result<FeqSkC, FeError> {
        if gamma.len() != self.params.gamma_size() {
            return Err(FeError::Params(format!(
                "gamma size {} != tD+1 = {}",
                gamma.len(),
                self.params.gamma_size()
            )));
        }
        if coeffs.len() != self.monomial_count() {
            return Err(FeError::KeyLength {
                want: self.monomial_count(),
                got: coeffs.len(),
            });
        }
        let f = LinearFunction {
            coeffs: coeffs.to_vec(),
            delta: delta.clone(),
        };
        let keys = gamma
            .iter()
            .map(|&i| self.one.keygen(&msk.instances[i], &f))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FeqSkC { gamma, delta, keys })
    }

    pub fn enc<R: Rng + ?Sized>(
        &self,
        mpk: &FeqMpk,
        x: &[FieldElem],
        oracle: &mut Qrom,
        rng: &mut R,
    ) -> Result<(FeqVk, FeqCiphertext), FeError> {
        let p = &self.params;
        if x.len() != p.ell {
            return Err(FeError::KeyLength {
                want: p.ell,
                got: x.len(),
            });
        }
        let mu: Vec<_> = x
            .iter()
            .map(|xi| random_poly_with_constant(*xi, p.t, rng))
            .collect();
        let zero = FieldElem::zero(p.field_k).map_err(|e| FeError::Params(e.to_string()))?;
        let xi_polys: Vec<_> = (0..p.s_pads)
            .map(|_| random_poly_with_constant(zero, p.degree_d * p.t, rng))
            .collect();
        let mut vks = Vec::with_capacity(p.n_instances);
        let mut cts = Vec::with_capacity(p.n_instances);
        for i in 1..=p.n_instances {
            let point = FieldElem::new(p.field_k, i as u16)
                .map_err(|e| FeError::Params(e.to_string()))?;
            let mu_vals: Vec<FieldElem> = mu
                .iter()
                .map(|poly| poly.eval(&point))
                .collect::<Result<_, _>>()
                .map_err(|e| FeError::Params(e.to_string()))?;
            let xi_vals: Vec<FieldElem> = xi_polys
                .iter()
                .map(|poly| poly.eval(&point))
                .collect::<Result<_, _>>()
                .map_err(|e| FeError::Params(e.to_string()))?;
            let m = self.one.family.encode_message(&mu_vals, &xi_vals)?;
            let (vk, ct) = self.one.enc(&mpk.instances[i - 1], &m, oracle, rng)?;
            vks.push(vk);
            cts.push(ct);
        }
        Ok((FeqVk { instances: vks }, FeqCiphertext { instances: cts }))
    }

    /// Decrypt the Γ instances and interpolate the share polynomial at 0.
    pub fn dec<R: Rng + ?Sized>(
        &self,
        sk: &FeqSkC,
        ct: &mut FeqCiphertext,
        oracle: &mut Qrom,
        rng: &mut R,
    ) -> Result<Option<FieldElem>, FeError> {
        let mut points = Vec::with_capacity(sk.gamma.len());
        for (skf, &i) in sk.keys.iter().zip(&sk.gamma) {
            let Some(bits) = self.one.dec(skf, &mut ct.instances[i], oracle, rng)? else {
                return Ok(None);
            };
            let eta = self.one.family.decode_output(&bits)?;
            let point = FieldElem::new(self.params.field_k, (i + 1) as u16)
                .map_err(|e| FeError::Params(e.to_string()))?;
            points.push((point, eta));
        }
        let zero = FieldElem::zero(self.params.field_k).unwrap();
        let value = interpolate_at(&points, &zero).map_err(|e| FeError::Params(e.to_string()))?;
        Ok(Some(value))
    }

    pub fn del<R: Rng + ?Sized>(&self, ct: FeqCiphertext, rng: &mut R) -> Result<FeqCert, FeError> {
        let mut certs = Vec::with_capacity(ct.instances.len());
        for c in ct.instances {
            certs.push(self.one.del(c, rng)?);
        }
        Ok(FeqCert { instances: certs })
    }

    pub fn vrfy(&self, vk: &FeqVk, cert: &FeqCert) -> Result<bool, FeError> {
        if vk.instances.len() != cert.instances.len() {
            return Err(FeError::KeyLength {
                want: vk.instances.len(),
                got: cert.instances.len(),
            });
        }
        for (v, c) in vk.instances.iter().zip(&cert.instances) {
            if !self.one.vrfy(v, c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Direct polynomial evaluation of `C(x)`: the decryption oracle.
    pub fn eval_function(
        &self,
        coeffs: &[FieldElem],
        x: &[FieldElem],
    ) -> Result<FieldElem, FeError> {
        let f = LinearFunction {
            coeffs: coeffs.to_vec(),
            delta: BTreeSet::new(),
        };
        let zero = FieldElem::zero(self.params.field_k).unwrap();
        let pads = vec![zero; self.params.s_pads];
        Ok(self.one.family.eval_direct(&f, x, &pads)?)
    }
}

/// Empirical estimate of the two bad events behind the q-bounded security
/// argument, with 95% Wilson intervals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollisionDiag {
    pub trials: u64,
    pub gamma_overlap_events: u64,
    pub gamma_overlap_rate: f64,
    pub gamma_ci: (f64, f64),
    pub delta_covered_events: u64,
    pub delta_covered_rate: f64,
    pub delta_ci: (f64, f64),
}

/// Sample `q` fresh key index sets per trial and count how often the
/// pairwise Γ-overlap union exceeds `t`, and how often some Δ is covered by
/// the union of the others.
pub fn collision_diag<R: Rng + ?Sized>(
    params: &FeqParams,
    trials: u64,
    rng: &mut R,
) -> Result<CollisionDiag, FeError> {
    params.validate()?;
    if trials == 0 {
        return Err(FeError::Params("trials must be positive".into()));
    }
    let mut gamma_bad = 0u64;
    let mut delta_bad = 0u64;
    for _ in 0..trials {
        let gammas: Vec<Vec<usize>> = (0..params.q_bound)
            .map(|_| sample_subset(params.n_instances, params.gamma_size(), rng))
            .collect();
        let mut union: BTreeSet<usize> = BTreeSet::new();
        for i in 0..gammas.len() {
            for j in 0..gammas.len() {
                if i == j {
                    continue;
                }
                let a: BTreeSet<usize> = gammas[i].iter().copied().collect();
                for v in &gammas[j] {
                    if a.contains(v) {
                        union.insert(*v);
                    }
                }
            }
        }
        if union.len() > params.t {
            gamma_bad += 1;
        }
        let deltas: Vec<BTreeSet<usize>> = (0..params.q_bound)
            .map(|_| sample_subset(params.s_pads, params.v, rng).into_iter().collect())
            .collect();
        let covered = (0..deltas.len()).any(|i| {
            deltas[i].iter().all(|v| {
                deltas
                    .iter()
                    .enumerate()
                    .any(|(j, other)| j != i && other.contains(v))
            })
        });
        if covered {
            delta_bad += 1;
        }
    }
    let (g_lo, g_hi) = binomial_ci95(gamma_bad, trials);
    let (d_lo, d_hi) = binomial_ci95(delta_bad, trials);
    Ok(CollisionDiag {
        trials,
        gamma_overlap_events: gamma_bad,
        gamma_overlap_rate: gamma_bad as f64 / trials as f64,
        gamma_ci: (g_lo, g_hi),
        delta_covered_events: delta_bad,
        delta_covered_rate: delta_bad as f64 / trials as f64,
        delta_ci: (d_lo, d_hi),
    })
}
