//! GF(2) linear algebra, classical linear codes, and nested CSS code pairs.
//!
//! The CSS layer of the encryption stack works with two binary codes
//! `C2 ⊆ C1` and the three coset spaces `C1/C2`, `{0,1}^q/C1` and
//! `{0,1}^q/C2⊥`. A coset space is always handled through a canonical
//! representative map (`mod_c`) obtained by eliminating against the pivot
//! columns of the code's row-reduced generator, which makes the map linear,
//! idempotent, and constant on cosets.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::bits::BitVec;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("vector length {got} does not match code length {want}")]
    LengthMismatch { want: usize, got: usize },
    #[error("generator rows are linearly dependent (rank {rank} < {rows})")]
    RankDeficient { rank: usize, rows: usize },
    #[error("row {0} of the inner code lies outside the outer code")]
    NotNested(usize),
    #[error("inner dimension {k2} must be smaller than outer dimension {k1}")]
    DimensionOrder { k1: usize, k2: usize },
    #[error("minimum distance {found} of {side} is below required {required}")]
    Distance {
        side: &'static str,
        found: usize,
        required: usize,
    },
    #[error("distance verification by enumeration is limited to length {max}, got {got}")]
    TooLongToVerify { max: usize, got: usize },
    #[error("no codeword within distance {t} of the received word")]
    DecodeFailure { t: usize },
    #[error("malformed code file: {0}")]
    BadCodeFile(String),
}

/// Dense GF(2) matrix, one packed [`BitVec`] per row.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].set(i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<BitVec>) -> Self {
        let cols = rows.first().map_or(0, BitVec::len);
        assert!(rows.iter().all(|r| r.len() == cols));
        Self {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.data[i]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.data[r].set(c, v);
    }

    /// `x · selfᵀ` viewing `x` as a row vector: one output bit per row.
    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.cols);
        let mut out = BitVec::zeros(self.rows);
        for (i, row) in self.data.iter().enumerate() {
            out.set(i, row.dot(x));
        }
        out
    }

    /// Linear combination of rows selected by `coeffs`.
    pub fn combine_rows(&self, coeffs: &BitVec) -> BitVec {
        assert_eq!(coeffs.len(), self.rows);
        let mut out = BitVec::zeros(self.cols);
        for i in 0..self.rows {
            if coeffs.get(i) {
                out.xor_assign(&self.data[i]);
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Reduced row-echelon form over GF(2) together with the pivot columns.
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(sel) = (r..m.rows).find(|&i| m.data[i].get(c)) else {
                continue;
            };
            m.data.swap(r, sel);
            let pivot_row = m.data[r].clone();
            for (i, row) in m.data.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Basis of the right kernel `{x : self · xᵀ = 0}`, one row per basis vector.
    pub fn kernel_basis(&self) -> BitMatrix {
        let (rref, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = BitVec::zeros(self.cols);
            v.set(f, true);
            for (r, &p) in pivots.iter().enumerate() {
                if rref.get(r, f) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        BitMatrix {
            rows: basis.len(),
            cols: self.cols,
            data: basis,
        }
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.data {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// A `[q, k]` binary linear code held as a full-rank generator plus the
/// matching parity check.
#[derive(Clone, Debug)]
pub struct LinearCode {
    length: usize,
    dimension: usize,
    generator: BitMatrix,
    parity_check: BitMatrix,
    rref_generator: BitMatrix,
    pivots: Vec<usize>,
}

impl LinearCode {
    pub fn from_generator(generator: BitMatrix) -> Result<Self, Gf2Error> {
        let (rref, pivots) = generator.rref();
        if pivots.len() != generator.rows() {
            return Err(Gf2Error::RankDeficient {
                rank: pivots.len(),
                rows: generator.rows(),
            });
        }
        let parity_check = generator.kernel_basis();
        Ok(Self {
            length: generator.cols(),
            dimension: generator.rows(),
            rref_generator: rref,
            pivots,
            generator,
            parity_check,
        })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn parity_check(&self) -> &BitMatrix {
        &self.parity_check
    }

    /// The dual code `C⊥`, generated by the parity-check rows.
    pub fn dual(&self) -> Result<LinearCode, Gf2Error> {
        LinearCode::from_generator(self.parity_check.clone())
    }

    pub fn syndrome(&self, x: &BitVec) -> Result<BitVec, Gf2Error> {
        if x.len() != self.length {
            return Err(Gf2Error::LengthMismatch {
                want: self.length,
                got: x.len(),
            });
        }
        Ok(self.parity_check.mul_vec(x))
    }

    pub fn contains(&self, x: &BitVec) -> Result<bool, Gf2Error> {
        Ok(self.syndrome(x)?.is_zero())
    }

    pub fn encode(&self, message: &BitVec) -> BitVec {
        self.generator.combine_rows(message)
    }

    /// Canonical coset representative: eliminate the support of `x` on the
    /// pivot columns of the row-reduced generator. The result is the unique
    /// member of `x + C` that vanishes on every pivot column, so the map is
    /// linear, idempotent, and constant exactly on cosets of `C`.
    pub fn mod_c(&self, x: &BitVec) -> Result<BitVec, Gf2Error> {
        if x.len() != self.length {
            return Err(Gf2Error::LengthMismatch {
                want: self.length,
                got: x.len(),
            });
        }
        let mut out = x.clone();
        for (r, &p) in self.pivots.iter().enumerate() {
            if out.get(p) {
                out.xor_assign(self.rref_generator.row(r));
            }
        }
        Ok(out)
    }

    pub fn random_codeword<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVec {
        let coeffs = BitVec::random(self.dimension, rng);
        self.generator.combine_rows(&coeffs)
    }

    /// Minimum distance by enumerating all `2^k - 1` nonzero codewords.
    pub fn min_distance_exhaustive(&self, max_length: usize) -> Result<usize, Gf2Error> {
        if self.length > max_length {
            return Err(Gf2Error::TooLongToVerify {
                max: max_length,
                got: self.length,
            });
        }
        let k = self.dimension;
        assert!(k < 26, "enumeration over 2^{k} codewords is unreasonable");
        let mut best = self.length + 1;
        for m in 1u64..(1 << k) {
            let coeffs = BitVec::from_u64(m, k);
            let w = self.generator.combine_rows(&coeffs).weight();
            best = best.min(w);
        }
        Ok(best)
    }
}

/// Which space [`CssPair::sample_coset_space`] draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CosetSpace {
    /// Codewords of `C2` (the code itself, not a quotient).
    C2,
    /// Representatives of `C1 / C2` (the plaintext space).
    C1ModC2,
    /// Representatives of `{0,1}^q / C1`.
    FullModC1,
    /// Representatives of `{0,1}^q / C2⊥`.
    FullModC2Dual,
}

/// Nested pair `C2 ⊆ C1` with error budget `t`, plus the machinery for the
/// plaintext isomorphism `C1/C2 ≅ {0,1}^{k1-k2}`.
#[derive(Clone, Debug)]
pub struct CssPair {
    c1: LinearCode,
    c2: LinearCode,
    c2_dual: LinearCode,
    t: usize,
    /// Rows of `C1` completing a basis of `C2`; their `mod C2` images span the
    /// representative space of `C1/C2`.
    coset_basis: Vec<BitVec>,
    distance_verified: bool,
}

/// Largest code length for which distances are verified by enumeration.
pub const DISTANCE_ENUM_LIMIT: usize = 24;

impl CssPair {
    /// Build a pair and verify both distance conditions by brute force
    /// (lengths up to [`DISTANCE_ENUM_LIMIT`] only).
    pub fn verified(c1: LinearCode, c2: LinearCode, t: usize) -> Result<Self, Gf2Error> {
        let pair = Self::with_asserted_distance(c1, c2, t)?;
        let required = 2 * t + 1;
        let d1 = pair.c1.min_distance_exhaustive(DISTANCE_ENUM_LIMIT)?;
        if d1 < required {
            return Err(Gf2Error::Distance {
                side: "C1",
                found: d1,
                required,
            });
        }
        let d2d = pair.c2_dual.min_distance_exhaustive(DISTANCE_ENUM_LIMIT)?;
        if d2d < required {
            return Err(Gf2Error::Distance {
                side: "C2-dual",
                found: d2d,
                required,
            });
        }
        Ok(Self {
            distance_verified: true,
            ..pair
        })
    }

    /// Build a pair checking only nesting and dimensions; the caller asserts
    /// that both `C1` and `C2⊥` correct `t` errors.
    pub fn with_asserted_distance(
        c1: LinearCode,
        c2: LinearCode,
        t: usize,
    ) -> Result<Self, Gf2Error> {
        if c1.length() != c2.length() {
            return Err(Gf2Error::LengthMismatch {
                want: c1.length(),
                got: c2.length(),
            });
        }
        if c2.dimension() >= c1.dimension() {
            return Err(Gf2Error::DimensionOrder {
                k1: c1.dimension(),
                k2: c2.dimension(),
            });
        }
        for i in 0..c2.dimension() {
            if !c1.contains(c2.generator().row(i))? {
                return Err(Gf2Error::NotNested(i));
            }
        }
        // Greedily extend C2's basis with rows of C1's generator.
        let mut stack: Vec<BitVec> = (0..c2.dimension())
            .map(|i| c2.generator().row(i).clone())
            .collect();
        let mut coset_basis = Vec::new();
        let mut rank = BitMatrix::from_rows(stack.clone()).rank();
        for i in 0..c1.dimension() {
            let candidate = c1.generator().row(i).clone();
            stack.push(candidate.clone());
            let new_rank = BitMatrix::from_rows(stack.clone()).rank();
            if new_rank > rank {
                rank = new_rank;
                coset_basis.push(candidate);
            } else {
                stack.pop();
            }
        }
        debug_assert_eq!(coset_basis.len(), c1.dimension() - c2.dimension());
        let c2_dual = c2.dual()?;
        Ok(Self {
            c1,
            c2,
            c2_dual,
            t,
            coset_basis,
            distance_verified: false,
        })
    }

    pub fn c1(&self) -> &LinearCode {
        &self.c1
    }

    pub fn c2(&self) -> &LinearCode {
        &self.c2
    }

    pub fn c2_dual(&self) -> &LinearCode {
        &self.c2_dual
    }

    pub fn length(&self) -> usize {
        self.c1.length()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn k1(&self) -> usize {
        self.c1.dimension()
    }

    pub fn k2(&self) -> usize {
        self.c2.dimension()
    }

    /// Bits carried per codeword, `k1 - k2`.
    pub fn message_bits(&self) -> usize {
        self.k1() - self.k2()
    }

    pub fn distance_verified(&self) -> bool {
        self.distance_verified
    }

    /// Encode `k1 - k2` message bits as the canonical representative of a
    /// `C1/C2` coset.
    pub fn message_to_coset(&self, m: &BitVec) -> Result<BitVec, Gf2Error> {
        if m.len() != self.message_bits() {
            return Err(Gf2Error::LengthMismatch {
                want: self.message_bits(),
                got: m.len(),
            });
        }
        let mut acc = BitVec::zeros(self.length());
        for (i, b) in self.coset_basis.iter().enumerate() {
            if m.get(i) {
                acc.xor_assign(b);
            }
        }
        self.c2.mod_c(&acc)
    }

    /// Invert [`Self::message_to_coset`]; `rep` must be a canonical `C1/C2`
    /// representative. Solves the k×q system over the images of the coset
    /// basis by elimination on an augmented matrix.
    pub fn coset_to_message(&self, rep: &BitVec) -> Result<BitVec, Gf2Error> {
        let images: Vec<BitVec> = self
            .coset_basis
            .iter()
            .map(|b| self.c2.mod_c(b))
            .collect::<Result<_, _>>()?;
        let kk = self.message_bits();
        let mut aug: Vec<(BitVec, BitVec)> = images
            .iter()
            .enumerate()
            .map(|(i, img)| {
                let mut e = BitVec::zeros(kk);
                e.set(i, true);
                (img.clone(), e)
            })
            .collect();
        let mut target = rep.clone();
        let mut solution = BitVec::zeros(kk);
        for col in 0..self.length() {
            let Some(sel) = aug.iter().position(|(img, _)| img.get(col)) else {
                continue;
            };
            let (pivot_img, pivot_coef) = aug[sel].clone();
            for (j, (img, coef)) in aug.iter_mut().enumerate() {
                if j != sel && img.get(col) {
                    img.xor_assign(&pivot_img);
                    coef.xor_assign(&pivot_coef);
                }
            }
            if target.get(col) {
                target.xor_assign(&pivot_img);
                solution.xor_assign(&pivot_coef);
            }
            aug.remove(sel);
            if aug.is_empty() {
                break;
            }
        }
        debug_assert!(target.is_zero(), "input was not a coset representative");
        Ok(solution)
    }

    /// Uniform sample from the named coset space, returned as the canonical
    /// representative (a codeword, for [`CosetSpace::C2`]).
    pub fn sample_coset_space<R: Rng + ?Sized>(
        &self,
        which: CosetSpace,
        rng: &mut R,
    ) -> BitVec {
        match which {
            CosetSpace::C2 => self.c2.random_codeword(rng),
            CosetSpace::C1ModC2 => {
                let c = self.c1.random_codeword(rng);
                self.c2.mod_c(&c).expect("length fixed by construction")
            }
            CosetSpace::FullModC1 => {
                let x = BitVec::random(self.length(), rng);
                self.c1.mod_c(&x).expect("length fixed by construction")
            }
            CosetSpace::FullModC2Dual => {
                let x = BitVec::random(self.length(), rng);
                self.c2_dual
                    .mod_c(&x)
                    .expect("length fixed by construction")
            }
        }
    }

    /// Decode `y = c ⊕ e` with `weight(e) ≤ t` to `c` in the chosen code,
    /// table-driven over all error patterns of weight up to `t`.
    pub fn syndrome_decode(&self, y: &BitVec, side: DecodeSide) -> Result<BitVec, Gf2Error> {
        let code = match side {
            DecodeSide::C1 => &self.c1,
            DecodeSide::C2Dual => &self.c2_dual,
        };
        let syndrome = code.syndrome(y)?;
        if syndrome.is_zero() {
            return Ok(y.clone());
        }
        let q = self.length();
        let mut pattern: Vec<usize> = Vec::new();
        if self.t >= 1 {
            for i in 0..q {
                pattern.clear();
                pattern.push(i);
                if let Some(c) = try_error(code, y, &syndrome, &pattern) {
                    return Ok(c);
                }
            }
        }
        if self.t >= 2 {
            for i in 0..q {
                for j in i + 1..q {
                    if let Some(c) = try_error(code, y, &syndrome, &[i, j]) {
                        return Ok(c);
                    }
                }
            }
        }
        if self.t >= 3 {
            for i in 0..q {
                for j in i + 1..q {
                    for k in j + 1..q {
                        if let Some(c) = try_error(code, y, &syndrome, &[i, j, k]) {
                            return Ok(c);
                        }
                    }
                }
            }
        }
        Err(Gf2Error::DecodeFailure { t: self.t })
    }
}

fn try_error(
    code: &LinearCode,
    y: &BitVec,
    syndrome: &BitVec,
    positions: &[usize],
) -> Option<BitVec> {
    let mut e = BitVec::zeros(y.len());
    for &p in positions {
        e.set(p, true);
    }
    if &code.syndrome(&e).expect("length matches") == syndrome {
        Some(y.xor(&e))
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeSide {
    C1,
    C2Dual,
}

/// `t·p/(p+q) − 4(k1−k2)·ln 2`, the quantity that must be superlogarithmic
/// for the CSS-variant schemes; the CLI refuses non-positive values unless
/// forced.
pub fn security_margin(p: usize, q: usize, t: usize, k1: usize, k2: usize) -> f64 {
    assert!(k1 > k2, "k1 must exceed k2");
    let tp = t as f64 * p as f64;
    tp / (p as f64 + q as f64) - 4.0 * (k1 - k2) as f64 * std::f64::consts::LN_2
}

/// The `[7,4]` Hamming code.
pub fn hamming74() -> LinearCode {
    let rows = ["1000110", "0100101", "0010011", "0001111"]
        .iter()
        .map(|s| BitVec::from_str01(s).unwrap())
        .collect();
    LinearCode::from_generator(BitMatrix::from_rows(rows)).expect("full rank")
}

/// The Steane pair: `C1 = [7,4]` Hamming, `C2 = C1⊥`, `t = 1`. The smallest
/// pair satisfying every constraint; carries one message bit.
pub fn steane_pair() -> CssPair {
    let c1 = hamming74();
    let c2 = c1.dual().expect("dual of full-rank code");
    CssPair::verified(c1, c2, 1).expect("Steane pair verifies")
}

/// `C1 = [15,11]` Hamming, `C2 = C1⊥` (the `[15,4]` simplex), `t = 1`;
/// carries seven message bits. The Hamming code contains its dual because
/// the parity-check rows are pairwise orthogonal and of even weight.
pub fn hamming15_pair() -> CssPair {
    // Parity check: column j holds the binary expansion of j + 1, so the
    // columns run over all 15 nonzero 4-bit vectors.
    let mut h = BitMatrix::zeros(4, 15);
    for col in 0..15usize {
        let v = col + 1;
        for bit in 0..4 {
            if v >> bit & 1 == 1 {
                h.set(bit, col, true);
            }
        }
    }
    let c1 = LinearCode::from_generator(h.kernel_basis()).expect("full rank");
    let c2 = c1.dual().expect("dual");
    CssPair::verified(c1, c2, 1).expect("Hamming-15 pair verifies")
}

/// Generator matrix of a cyclic code from its generator polynomial
/// (coefficients constant-first): rows are the cyclic shifts `x^i g(x)`.
fn cyclic_generator(gen_poly: &[u8], length: usize) -> BitMatrix {
    let k = length - (gen_poly.len() - 1);
    let mut rows = Vec::with_capacity(k);
    for i in 0..k {
        let mut row = BitVec::zeros(length);
        for (j, &c) in gen_poly.iter().enumerate() {
            if c == 1 {
                row.set((i + j) % length, true);
            }
        }
        rows.push(row);
    }
    BitMatrix::from_rows(rows)
}

/// Nested BCH pair of length 15: `C1` the designed-distance-3 code
/// (generator x^4+x+1, the `[15,11]` Hamming code) containing `C2`, the
/// designed-distance-5 code (generator (x^4+x+1)(x^4+x^3+x^2+x+1)).
/// Nesting holds because one generator polynomial divides the other;
/// distances (3 and 4 for the dual) are enumerated at construction, so
/// `t = 1` and four message bits per block.
pub fn bch15_nested_pair() -> CssPair {
    let c1 = LinearCode::from_generator(cyclic_generator(&[1, 1, 0, 0, 1], 15)).expect("full rank");
    let c2 = LinearCode::from_generator(cyclic_generator(
        &[1, 0, 0, 0, 1, 0, 1, 1, 1],
        15,
    ))
    .expect("full rank");
    CssPair::verified(c1, c2, 1).expect("BCH-15 nested pair verifies")
}

/// Parse the plain-text code format: first line `q k`, then `k` generator
/// rows as 0/1 strings.
pub fn parse_code_file(text: &str) -> Result<LinearCode, Gf2Error> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Gf2Error::BadCodeFile("empty file".into()))?;
    let mut parts = header.split_whitespace();
    let q: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Gf2Error::BadCodeFile("bad header".into()))?;
    let k: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Gf2Error::BadCodeFile("bad header".into()))?;
    let mut rows = Vec::with_capacity(k);
    for _ in 0..k {
        let line = lines
            .next()
            .ok_or_else(|| Gf2Error::BadCodeFile("missing generator row".into()))?;
        let row = BitVec::from_str01(line.trim())
            .ok_or_else(|| Gf2Error::BadCodeFile(format!("bad row {line:?}")))?;
        if row.len() != q {
            return Err(Gf2Error::BadCodeFile(format!(
                "row length {} does not match q = {q}",
                row.len()
            )));
        }
        rows.push(row);
    }
    LinearCode::from_generator(BitMatrix::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    /// Membership oracle independent of mod_c: solve the generator system.
    fn in_code(code: &LinearCode, x: &BitVec) -> bool {
        code.contains(x).unwrap()
    }

    #[test]
    fn rref_identity() {
        let id = BitMatrix::identity(3);
        let (r, pivots) = id.rref();
        assert_eq!(r, id);
        assert_eq!(pivots, vec![0, 1, 2]);
    }

    #[test]
    fn rref_zero() {
        let z = BitMatrix::zeros(2, 4);
        let (r, pivots) = z.rref();
        assert_eq!(r, z);
        assert!(pivots.is_empty());
    }

    #[test]
    fn rref_dependent_rows() {
        // [[1,1],[1,1]] -> [[1,1],[0,0]], pivots [0]; cross-checked by hand
        // row-reduction and, below, by exhaustive 2x2 enumeration.
        let m = BitMatrix::from_rows(vec![
            BitVec::from_str01("11").unwrap(),
            BitVec::from_str01("11").unwrap(),
        ]);
        let (r, pivots) = m.rref();
        assert_eq!(r.row(0), &BitVec::from_str01("11").unwrap());
        assert_eq!(r.row(1), &BitVec::from_str01("00").unwrap());
        assert_eq!(pivots, vec![0]);
    }

    #[test]
    fn rref_exhaustive_2x2() {
        // Oracle: for every 2x2 matrix, rank equals the size of a maximal
        // independent row subset found by enumeration, rref is idempotent,
        // and the row space is preserved.
        for bits in 0u64..16 {
            let m = BitMatrix::from_rows(vec![
                BitVec::from_u64(bits & 3, 2),
                BitVec::from_u64(bits >> 2 & 3, 2),
            ]);
            let (r, pivots) = m.rref();
            let span_of = |mat: &BitMatrix| -> std::collections::BTreeSet<u64> {
                let mut s = std::collections::BTreeSet::new();
                for c in 0u64..4 {
                    let coeffs = BitVec::from_u64(c, 2);
                    s.insert(mat.combine_rows(&coeffs).as_u64());
                }
                s
            };
            assert_eq!(span_of(&m), span_of(&r), "row space changed for {bits:04b}");
            let expected_rank = span_of(&m).len().trailing_zeros() as usize;
            assert_eq!(pivots.len(), expected_rank);
            let (rr, _) = r.rref();
            assert_eq!(rr, r, "rref not idempotent for {bits:04b}");
        }
    }

    #[test]
    fn mod_c_of_zero_and_codewords() {
        let code = hamming74();
        let zero = BitVec::zeros(7);
        assert_eq!(code.mod_c(&zero).unwrap(), zero);
        // Every codeword maps to zero (membership checked by the oracle).
        for m in 0u64..16 {
            let cw = code.encode(&BitVec::from_u64(m, 4));
            assert!(in_code(&code, &cw));
            assert!(code.mod_c(&cw).unwrap().is_zero());
        }
    }

    #[test]
    fn mod_c_constant_on_cosets_exhaustive() {
        // mod_c(x ⊕ c) = mod_c(x) for every codeword c of the [7,4] Hamming
        // code, exhaustively over all 16 codewords and 128 vectors x.
        let code = hamming74();
        for xv in 0u64..128 {
            let x = BitVec::from_u64(xv, 7);
            let rep = code.mod_c(&x).unwrap();
            for m in 0u64..16 {
                let cw = code.encode(&BitVec::from_u64(m, 4));
                assert_eq!(code.mod_c(&x.xor(&cw)).unwrap(), rep);
            }
            // Idempotence and the iff-law.
            assert_eq!(code.mod_c(&rep).unwrap(), rep);
            assert!(in_code(&code, &x.xor(&rep)));
        }
    }

    #[test]
    fn mod_c_equality_iff_coset_exhaustive() {
        let code = hamming74();
        for xv in 0u64..128 {
            for yv in 0u64..128 {
                let x = BitVec::from_u64(xv, 7);
                let y = BitVec::from_u64(yv, 7);
                let same_rep = code.mod_c(&x).unwrap() == code.mod_c(&y).unwrap();
                assert_eq!(same_rep, in_code(&code, &x.xor(&y)));
            }
        }
    }

    #[test]
    fn mod_c_length_mismatch() {
        let code = hamming74();
        assert!(matches!(
            code.mod_c(&BitVec::zeros(6)),
            Err(Gf2Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn steane_pair_parameters() {
        let pair = steane_pair();
        assert_eq!(pair.length(), 7);
        assert_eq!(pair.k1(), 4);
        assert_eq!(pair.k2(), 3);
        assert_eq!(pair.message_bits(), 1);
        assert!(pair.distance_verified());
    }

    #[test]
    fn steane_coset_space_sizes() {
        // C1/C2 for the Steane pair has exactly 2 representatives; C2 has 8
        // codewords. Sizes derived by enumerating the spans.
        let pair = steane_pair();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let mut c1c2 = std::collections::BTreeSet::new();
        let mut c2 = std::collections::BTreeSet::new();
        for _ in 0..400 {
            c1c2.insert(
                pair.sample_coset_space(CosetSpace::C1ModC2, &mut rng)
                    .as_u64(),
            );
            c2.insert(pair.sample_coset_space(CosetSpace::C2, &mut rng).as_u64());
        }
        assert_eq!(c1c2.len(), 2);
        assert_eq!(c2.len(), 8);
        // Every C2 sample is really a codeword of C2.
        for v in &c2 {
            assert!(in_code(pair.c2(), &BitVec::from_u64(*v, 7)));
        }
    }

    #[test]
    fn coset_sampling_uniform_and_seeded() {
        let pair = steane_pair();
        // Determinism under a fixed seed.
        let a = pair.sample_coset_space(CosetSpace::FullModC1, &mut ChaCha12Rng::seed_from_u64(5));
        let b = pair.sample_coset_space(CosetSpace::FullModC1, &mut ChaCha12Rng::seed_from_u64(5));
        assert_eq!(a, b);
        // {0,1}^7/C1 has 2^(7-4) = 8 representatives; check the sampler hits
        // all of them and roughly uniformly.
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let mut counts = std::collections::HashMap::new();
        let trials = 8000;
        for _ in 0..trials {
            let v = pair.sample_coset_space(CosetSpace::FullModC1, &mut rng);
            *counts.entry(v.as_u64()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 8);
        for &c in counts.values() {
            let expected = trials as f64 / 8.0;
            assert!((c as f64 - expected).abs() < 5.0 * expected.sqrt());
        }
    }

    #[test]
    fn message_coset_roundtrip() {
        let pair = hamming15_pair();
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        for _ in 0..200 {
            let m = BitVec::random(pair.message_bits(), &mut rng);
            let rep = pair.message_to_coset(&m).unwrap();
            assert!(in_code(pair.c1(), &rep));
            assert_eq!(pair.c2().mod_c(&rep).unwrap(), rep);
            assert_eq!(pair.coset_to_message(&rep).unwrap(), m);
        }
    }

    #[test]
    fn syndrome_decode_all_single_errors() {
        // Brute force over every codeword and every 1-bit error.
        let pair = steane_pair();
        for m in 0u64..16 {
            let cw = pair.c1().encode(&BitVec::from_u64(m, 4));
            assert_eq!(pair.syndrome_decode(&cw, DecodeSide::C1).unwrap(), cw);
            for e in 0..7 {
                let mut y = cw.clone();
                y.flip(e);
                assert_eq!(pair.syndrome_decode(&y, DecodeSide::C1).unwrap(), cw);
            }
        }
    }

    #[test]
    fn syndrome_decode_weight_two_behaviour() {
        // Weight-2 errors on a t=1 code: every syndrome of the [7,4] Hamming
        // code is matched by some single-bit error, so decoding "succeeds"
        // but returns a codeword different from the sent one (exhaustive
        // check). Unmatched syndromes would be flagged as DecodeFailure.
        let pair = steane_pair();
        for m in 0u64..16 {
            let cw = pair.c1().encode(&BitVec::from_u64(m, 4));
            for e1 in 0..7 {
                for e2 in e1 + 1..7 {
                    let mut y = cw.clone();
                    y.flip(e1);
                    y.flip(e2);
                    match pair.syndrome_decode(&y, DecodeSide::C1) {
                        Ok(decoded) => assert_ne!(decoded, cw),
                        Err(Gf2Error::DecodeFailure { .. }) => {}
                        Err(e) => panic!("unexpected error {e}"),
                    }
                }
            }
        }
    }

    #[test]
    fn css_rejects_non_nested() {
        // Mutation test: tamper one generator row of C2 so it leaves C1.
        let c1 = hamming74();
        let mut g2 = c1.dual().unwrap().generator().clone();
        g2.set(0, 0, !g2.get(0, 0));
        let c2 = LinearCode::from_generator(g2).unwrap();
        match CssPair::with_asserted_distance(c1, c2, 1) {
            Err(Gf2Error::NotNested(_)) => {}
            other => panic!("expected NotNested, got {other:?}"),
        }
    }

    #[test]
    fn css_rejects_bad_distance() {
        // C1 = whole space [4,3] ⊋ C2 = repetition [4,1]: C1 has distance 1.
        let c1 = LinearCode::from_generator(BitMatrix::from_rows(vec![
            BitVec::from_str01("1000").unwrap(),
            BitVec::from_str01("0100").unwrap(),
            BitVec::from_str01("0011").unwrap(),
        ]))
        .unwrap();
        let c2 = LinearCode::from_generator(BitMatrix::from_rows(vec![
            BitVec::from_str01("1111").unwrap(),
        ]))
        .unwrap();
        assert!(matches!(
            CssPair::verified(c1, c2, 1),
            Err(Gf2Error::Distance { .. })
        ));
    }

    #[test]
    fn security_margin_values() {
        // p=q=128, t=32, k1-k2=1: 16 - 4 ln 2, by direct arithmetic.
        let m = security_margin(128, 128, 32, 4, 3);
        assert!((m - (16.0 - 4.0 * std::f64::consts::LN_2)).abs() < 1e-12);
        assert!((m - 13.227).abs() < 1e-3);
        // t = 0 is always negative.
        assert!(security_margin(16, 16, 0, 2, 1) < 0.0);
        // Linearity in t: +Δ raises the margin by Δp/(p+q).
        let base = security_margin(10, 30, 5, 3, 1);
        let bumped = security_margin(10, 30, 8, 3, 1);
        assert!((bumped - base - 3.0 * 10.0 / 40.0).abs() < 1e-12);
    }

    #[test]
    fn code_file_roundtrip() {
        let code = hamming74();
        let mut text = format!("{} {}\n", code.length(), code.dimension());
        for i in 0..code.dimension() {
            text.push_str(&format!("{}\n", code.generator().row(i)));
        }
        let parsed = parse_code_file(&text).unwrap();
        assert_eq!(parsed.generator(), code.generator());
        assert!(parse_code_file("7\n").is_err());
        assert!(parse_code_file("7 1\n01x0110\n").is_err());
    }

    #[test]
    fn hamming15_pair_verifies() {
        let pair = hamming15_pair();
        assert_eq!(pair.length(), 15);
        assert_eq!(pair.k1(), 11);
        assert_eq!(pair.k2(), 4);
        assert_eq!(pair.message_bits(), 7);
        assert!(pair.distance_verified());
    }

    #[test]
    fn bch15_nested_pair_verifies() {
        let pair = bch15_nested_pair();
        assert_eq!(pair.length(), 15);
        assert_eq!(pair.k1(), 11);
        assert_eq!(pair.k2(), 7);
        assert_eq!(pair.message_bits(), 4);
        assert!(pair.distance_verified());
        // The two codes really are distinct nested BCH codes.
        assert_eq!(pair.c1().min_distance_exhaustive(24).unwrap(), 3);
        assert_eq!(pair.c2().min_distance_exhaustive(24).unwrap(), 5);
        assert_eq!(pair.c2_dual().min_distance_exhaustive(24).unwrap(), 4);
    }

    #[test]
    fn mod_c_randomized_larger_code() {
        let pair = hamming15_pair();
        let code = pair.c1();
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for _ in 0..500 {
            let x = BitVec::random(15, &mut rng);
            let c = code.random_codeword(&mut rng);
            assert_eq!(code.mod_c(&x.xor(&c)).unwrap(), code.mod_c(&x).unwrap());
            let rep = code.mod_c(&x).unwrap();
            assert_eq!(code.mod_c(&rep).unwrap(), rep);
            assert!(in_code(code, &x.xor(&rep)));
        }
    }
}
