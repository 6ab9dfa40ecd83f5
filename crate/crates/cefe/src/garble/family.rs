//! Function families: a key encoding plus a message-hardwired circuit
//! builder, standing in for the universal circuit of the functional
//! encryption layers.
//!
//! Two plugins: a multiplexer family for demos and tests (the function is a
//! truth table, the hardwired message selects one table bit), and a
//! GF(2^k)-linear family for bounded FE. Hardwiring the message makes each
//! monomial a field constant, and multiplying a key coefficient by a field
//! constant is GF(2)-linear in the coefficient bits, so the whole circuit
//! collapses to per-output-bit XOR trees over key bits masked by constants.

use std::collections::BTreeSet;

use crate::bits::BitVec;
use crate::field::{fe_mul, FieldElem};

use super::circuit::{CircuitBuilder, LeveledCircuit};
use super::GarbleError;

pub trait FunctionFamily {
    type Function;

    /// Key-encoding length `s` in bits.
    fn key_len(&self) -> usize;
    /// Hardwired-message length in bits.
    fn message_len(&self) -> usize;
    fn output_len(&self) -> usize;
    fn encode_key(&self, f: &Self::Function) -> Result<BitVec, GarbleError>;
    /// Circuit with `key_len` inputs computing `f(m)` on `encode_key(f)`.
    fn hardwire(&self, m: &BitVec) -> Result<LeveledCircuit, GarbleError>;
}

/// Truth-table lookup: `f` is a table over `k`-bit inputs, the hardwired
/// message is the lookup index (first message bit is the most significant
/// index bit).
pub struct MuxFamily {
    k: usize,
}

impl MuxFamily {
    pub fn new(k: usize) -> Result<Self, GarbleError> {
        if k == 0 || k > 8 {
            return Err(GarbleError::DomainBound(format!(
                "mux domain bits {k} outside 1..=8"
            )));
        }
        Ok(Self { k })
    }

    pub fn index_of(&self, m: &BitVec) -> usize {
        let mut idx = 0usize;
        for i in 0..m.len() {
            idx = idx << 1 | usize::from(m.get(i));
        }
        idx
    }
}

impl FunctionFamily for MuxFamily {
    type Function = BitVec;

    fn key_len(&self) -> usize {
        1 << self.k
    }

    fn message_len(&self) -> usize {
        self.k
    }

    fn output_len(&self) -> usize {
        1
    }

    fn encode_key(&self, f: &BitVec) -> Result<BitVec, GarbleError> {
        if f.len() != self.key_len() {
            return Err(GarbleError::InputLength {
                want: self.key_len(),
                got: f.len(),
            });
        }
        Ok(f.clone())
    }

    fn hardwire(&self, m: &BitVec) -> Result<LeveledCircuit, GarbleError> {
        if m.len() != self.k {
            return Err(GarbleError::InputLength {
                want: self.k,
                got: m.len(),
            });
        }
        // With m fixed, the multiplexer tree folds down to a single
        // pass-through of the selected table bit.
        let mut b = CircuitBuilder::new(self.key_len());
        let out = b.and_const(self.index_of(m), true);
        b.finish(vec![out])
    }
}

/// Exponent vectors of total degree at most `d` over `ell` variables in
/// graded lexicographic order (by total degree, then lex descending).
pub fn graded_lex_monomials(ell: usize, d: usize) -> Vec<Vec<u8>> {
    fn fill(out: &mut Vec<Vec<u8>>, prefix: &mut Vec<u8>, vars_left: usize, total_left: usize) {
        if vars_left == 0 {
            if total_left == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for e in (0..=total_left).rev() {
            prefix.push(e as u8);
            fill(out, prefix, vars_left - 1, total_left - e);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for total in 0..=d {
        let mut prefix = Vec::new();
        fill(&mut out, &mut prefix, ell, total);
    }
    out
}

/// The re-randomized functionality of the bounded-FE layer:
/// `(x, Z_1..Z_S) ↦ C(x) + Σ_{i∈Δ} Z_i` with `C` given as a graded-lex
/// coefficient vector of total degree at most `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearFunction {
    pub coeffs: Vec<FieldElem>,
    pub delta: BTreeSet<usize>,
}

pub struct LinearGf2kFamily {
    ell: usize,
    s_pads: usize,
    k: u8,
    monomials: Vec<Vec<u8>>,
}

impl LinearGf2kFamily {
    pub fn new(ell: usize, degree_d: usize, s_pads: usize, k: u8) -> Result<Self, GarbleError> {
        FieldElem::zero(k).map_err(|e| GarbleError::DomainBound(e.to_string()))?;
        let monomials = graded_lex_monomials(ell, degree_d);
        Ok(Self {
            ell,
            s_pads,
            k,
            monomials,
        })
    }

    pub fn monomials(&self) -> &[Vec<u8>] {
        &self.monomials
    }

    pub fn field_degree(&self) -> u8 {
        self.k
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn s_pads(&self) -> usize {
        self.s_pads
    }

    fn felem_bits(&self, v: FieldElem, out: &mut BitVec, offset: usize) {
        for bit in 0..self.k as usize {
            out.set(offset + bit, v.value() >> bit & 1 == 1);
        }
    }

    fn parse_felem(&self, bits: &BitVec, offset: usize) -> FieldElem {
        let mut v = 0u16;
        for bit in 0..self.k as usize {
            if bits.get(offset + bit) {
                v |= 1 << bit;
            }
        }
        FieldElem::new(self.k, v).expect("k validated at construction")
    }

    /// Encode a message point `(μ values, ξ values)` as hardwire input bits.
    pub fn encode_message(&self, mu: &[FieldElem], xi: &[FieldElem]) -> Result<BitVec, GarbleError> {
        if mu.len() != self.ell || xi.len() != self.s_pads {
            return Err(GarbleError::InputLength {
                want: self.message_len(),
                got: (mu.len() + xi.len()) * self.k as usize,
            });
        }
        let mut out = BitVec::zeros(self.message_len());
        for (i, v) in mu.iter().chain(xi.iter()).enumerate() {
            self.felem_bits(*v, &mut out, i * self.k as usize);
        }
        Ok(out)
    }

    /// Decode a circuit output back into a field element.
    pub fn decode_output(&self, bits: &BitVec) -> Result<FieldElem, GarbleError> {
        if bits.len() != self.k as usize {
            return Err(GarbleError::InputLength {
                want: self.k as usize,
                got: bits.len(),
            });
        }
        Ok(self.parse_felem(bits, 0))
    }

    /// Direct field-arithmetic evaluation of `G_{C,Δ}`: the oracle the
    /// constant-folded circuit is tested against.
    pub fn eval_direct(
        &self,
        f: &LinearFunction,
        mu: &[FieldElem],
        xi: &[FieldElem],
    ) -> Result<FieldElem, GarbleError> {
        let mut acc = FieldElem::zero(self.k).unwrap();
        for (coeff, expo) in f.coeffs.iter().zip(&self.monomials) {
            let mut term = *coeff;
            for (var, &e) in mu.iter().zip(expo) {
                for _ in 0..e {
                    term = fe_mul(&term, var).map_err(|e| GarbleError::DomainBound(e.to_string()))?;
                }
            }
            acc = acc.add(&term).unwrap();
        }
        for &i in &f.delta {
            acc = acc.add(&xi[i]).unwrap();
        }
        Ok(acc)
    }
}

impl FunctionFamily for LinearGf2kFamily {
    type Function = LinearFunction;

    fn key_len(&self) -> usize {
        self.monomials.len() * self.k as usize + self.s_pads
    }

    fn message_len(&self) -> usize {
        (self.ell + self.s_pads) * self.k as usize
    }

    fn output_len(&self) -> usize {
        self.k as usize
    }

    fn encode_key(&self, f: &LinearFunction) -> Result<BitVec, GarbleError> {
        if f.coeffs.len() != self.monomials.len() {
            return Err(GarbleError::InputLength {
                want: self.monomials.len(),
                got: f.coeffs.len(),
            });
        }
        if f.delta.iter().any(|&i| i >= self.s_pads) {
            return Err(GarbleError::DomainBound("delta index out of range".into()));
        }
        let mut out = BitVec::zeros(self.key_len());
        for (j, c) in f.coeffs.iter().enumerate() {
            self.felem_bits(*c, &mut out, j * self.k as usize);
        }
        let base = self.monomials.len() * self.k as usize;
        for &i in &f.delta {
            out.set(base + i, true);
        }
        Ok(out)
    }

    /// With `m` hardwired, every monomial evaluates to a constant `v_j`, so
    /// output bit γ is the XOR over key bits masked by constants:
    /// coefficient bit `(j, β)` contributes iff bit γ of `x^β·v_j` is set,
    /// and Δ-indicator bit `i` contributes iff bit γ of `ξ_i` is set. The
    /// circuit shape depends only on the family, never on `m`.
    fn hardwire(&self, m: &BitVec) -> Result<LeveledCircuit, GarbleError> {
        if m.len() != self.message_len() {
            return Err(GarbleError::InputLength {
                want: self.message_len(),
                got: m.len(),
            });
        }
        let k = self.k as usize;
        let mu: Vec<FieldElem> = (0..self.ell).map(|i| self.parse_felem(m, i * k)).collect();
        let xi: Vec<FieldElem> = (0..self.s_pads)
            .map(|i| self.parse_felem(m, (self.ell + i) * k))
            .collect();
        // Constant per monomial: v_j = Π μ_i^{e_i}.
        let mono_vals: Vec<FieldElem> = self
            .monomials
            .iter()
            .map(|expo| {
                let mut v = FieldElem::one(self.k).unwrap();
                for (var, &e) in mu.iter().zip(expo) {
                    for _ in 0..e {
                        v = fe_mul(&v, var).unwrap();
                    }
                }
                v
            })
            .collect();
        let mut b = CircuitBuilder::new(self.key_len());
        let delta_base = self.monomials.len() * k;
        let mut out_wires = Vec::with_capacity(k);
        for gamma in 0..k {
            let mut leaves = Vec::with_capacity(self.key_len());
            for (j, vj) in mono_vals.iter().enumerate() {
                for beta in 0..k {
                    let basis = FieldElem::new(self.k, 1 << beta).unwrap();
                    let prod = fe_mul(&basis, vj).unwrap();
                    let mask_bit = prod.value() >> gamma & 1 == 1;
                    leaves.push(b.and_const(j * k + beta, mask_bit));
                }
            }
            for (i, zi) in xi.iter().enumerate() {
                let mask_bit = zi.value() >> gamma & 1 == 1;
                leaves.push(b.and_const(delta_base + i, mask_bit));
            }
            out_wires.push(b.xor_many(&leaves));
        }
        b.finish(out_wires)
    }
}
