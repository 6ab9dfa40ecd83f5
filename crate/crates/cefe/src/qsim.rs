//! Classical simulation of every quantum object in the stack: BB84 product
//! states, Pauli twirls, Hadamard masks, qubit permutations, Bell pairs,
//! teleportation, and projective measurement.
//!
//! States are stabilizer tableaus in the Aaronson-Gottesman representation
//! (destabilizer rows, stabilizer rows, one scratch row; packed bits with an
//! i-exponent phase per row). Every honest operation in the protocol stack
//! is Clifford plus Pauli-basis measurement, which is exactly what the
//! tableau supports; non-Clifford requests cannot be expressed through this
//! API.
//!
//! No-cloning is an API contract: a [`QuantumRegister`] is single-owner,
//! destructive operations consume it, and only the test harness (behind an
//! explicit privilege flag) may duplicate the classical descriptor.

use std::sync::{Arc, Mutex, MutexGuard};

use rand::Rng;
use thiserror::Error;

use crate::bits::BitVec;

/// Hard cap on simulated register width.
pub const MAX_QUBITS: usize = 4096;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QsimError {
    #[error("register has been consumed")]
    Consumed,
    #[error("register width {got} does not match expected {want}")]
    SizeMismatch { want: usize, got: usize },
    #[error("register width {0} exceeds the simulator cap {MAX_QUBITS}")]
    TooLarge(usize),
    #[error("duplicate position {0} in measurement request")]
    DuplicatePosition(usize),
    #[error("position {0} out of range")]
    PositionOutOfRange(usize),
    #[error("permutation is not a bijection")]
    NotAPermutation,
    #[error("register duplication requires the test-harness privilege flag")]
    DuplicationForbidden,
    #[error("operation requires sole ownership of the underlying state")]
    SharedState,
    #[error("register does not cover its full underlying state")]
    PartialCoverage,
    #[error("subsystem is entangled with qubits outside the register")]
    EntangledSubsystem,
}

/// Test-harness privilege gate for [`QuantumRegister::duplicate_for_test`].
/// The flag is per-thread so that concurrent harness workers and tests do
/// not leak privilege into each other.
pub mod harness {
    use std::cell::Cell;

    thread_local! {
        static DUPLICATION_ALLOWED: Cell<bool> = const { Cell::new(false) };
    }

    /// Enable or disable register duplication on the current thread. Only
    /// test code and the attack harness flip this; protocol code never does.
    pub fn allow_duplication(allow: bool) {
        DUPLICATION_ALLOWED.with(|f| f.set(allow));
    }

    pub(super) fn duplication_allowed() -> bool {
        DUPLICATION_ALLOWED.with(Cell::get)
    }
}

/// `X^a Z^b` layer addressed positionwise over a register.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliMask {
    pub x_bits: BitVec,
    pub z_bits: BitVec,
}

impl PauliMask {
    pub fn new(x_bits: BitVec, z_bits: BitVec) -> Self {
        assert_eq!(x_bits.len(), z_bits.len());
        Self { x_bits, z_bits }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self {
            x_bits: BitVec::random(n, rng),
            z_bits: BitVec::random(n, rng),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            x_bits: BitVec::zeros(n),
            z_bits: BitVec::zeros(n),
        }
    }

    pub fn len(&self) -> usize {
        self.x_bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_bits.is_empty()
    }
}

/// A relabeling of register positions: the qubit at position `i` moves to
/// position `image[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitPermutation {
    image: Vec<usize>,
}

impl QubitPermutation {
    pub fn new(image: Vec<usize>) -> Result<Self, QsimError> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &t in &image {
            if t >= n || seen[t] {
                return Err(QsimError::NotAPermutation);
            }
            seen[t] = true;
        }
        Ok(Self { image })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n).collect(),
        }
    }

    /// The permutation that moves the listed positions (in the given order)
    /// to the front and keeps the remaining positions in ascending order
    /// behind them.
    pub fn moving_to_front(front: &[usize], n: usize) -> Result<Self, QsimError> {
        let mut image = vec![usize::MAX; n];
        let mut next = 0usize;
        for &p in front {
            if p >= n || image[p] != usize::MAX {
                return Err(QsimError::NotAPermutation);
            }
            image[p] = next;
            next += 1;
        }
        for slot in image.iter_mut() {
            if *slot == usize::MAX {
                *slot = next;
                next += 1;
            }
        }
        Self::new(image)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0usize; self.image.len()];
        for (i, &t) in self.image.iter().enumerate() {
            inv[t] = i;
        }
        Self { image: inv }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn compose_after(&self, first: &Self) -> Self {
        assert_eq!(self.len(), first.len());
        let image = (0..self.len()).map(|i| self.image[first.image[i]]).collect();
        Self { image }
    }
}

/// Measurement basis per position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureBasis {
    Computational,
    Hadamard,
}

/// Aaronson-Gottesman tableau: rows `0..n` destabilizers, `n..2n`
/// stabilizers, row `2n` scratch. Phases are exponents of `i` modulo 4.
#[derive(Clone)]
pub(crate) struct Tableau {
    n: usize,
    wpr: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    r: Vec<u8>,
}

impl Tableau {
    fn new_zero_state(n: usize) -> Self {
        let wpr = n.div_ceil(64).max(1);
        let rows = 2 * n + 1;
        let mut t = Self {
            n,
            wpr,
            x: vec![0; rows * wpr],
            z: vec![0; rows * wpr],
            r: vec![0; rows],
        };
        for i in 0..n {
            t.set_x(i, i, true);
            t.set_z(n + i, i, true);
        }
        t
    }

    #[inline]
    fn get_x(&self, row: usize, col: usize) -> bool {
        self.x[row * self.wpr + col / 64] >> (col % 64) & 1 == 1
    }

    #[inline]
    fn get_z(&self, row: usize, col: usize) -> bool {
        self.z[row * self.wpr + col / 64] >> (col % 64) & 1 == 1
    }

    #[inline]
    fn set_x(&mut self, row: usize, col: usize, v: bool) {
        let w = &mut self.x[row * self.wpr + col / 64];
        let m = 1u64 << (col % 64);
        if v {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    #[inline]
    fn set_z(&mut self, row: usize, col: usize, v: bool) {
        let w = &mut self.z[row * self.wpr + col / 64];
        let m = 1u64 << (col % 64);
        if v {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    fn apply_h(&mut self, k: usize) {
        let w = k / 64;
        let m = 1u64 << (k % 64);
        for row in 0..2 * self.n {
            let xi = row * self.wpr + w;
            let xv = self.x[xi] & m;
            let zv = self.z[xi] & m;
            self.x[xi] ^= xv ^ zv;
            self.z[xi] ^= zv ^ xv;
            if self.x[xi] & m != 0 && self.z[xi] & m != 0 {
                self.r[row] = (self.r[row] + 2) % 4;
            }
        }
    }

    fn apply_s(&mut self, k: usize) {
        let w = k / 64;
        let m = 1u64 << (k % 64);
        for row in 0..2 * self.n {
            let i = row * self.wpr + w;
            if self.x[i] & m != 0 && self.z[i] & m != 0 {
                self.r[row] = (self.r[row] + 2) % 4;
            }
            self.z[i] ^= self.x[i] & m;
        }
    }

    fn apply_x(&mut self, k: usize) {
        let w = k / 64;
        let m = 1u64 << (k % 64);
        for row in 0..2 * self.n {
            if self.z[row * self.wpr + w] & m != 0 {
                self.r[row] = (self.r[row] + 2) % 4;
            }
        }
    }

    fn apply_z(&mut self, k: usize) {
        let w = k / 64;
        let m = 1u64 << (k % 64);
        for row in 0..2 * self.n {
            if self.x[row * self.wpr + w] & m != 0 {
                self.r[row] = (self.r[row] + 2) % 4;
            }
        }
    }

    fn apply_cnot(&mut self, a: usize, b: usize) {
        assert_ne!(a, b);
        let (wa, ma) = (a / 64, 1u64 << (a % 64));
        let (wb, mb) = (b / 64, 1u64 << (b % 64));
        for row in 0..2 * self.n {
            let base = row * self.wpr;
            if self.x[base + wa] & ma != 0 {
                self.x[base + wb] ^= mb;
            }
            if self.z[base + wb] & mb != 0 {
                self.z[base + wa] ^= ma;
            }
            let xa = self.x[base + wa] & ma != 0;
            let zb = self.z[base + wb] & mb != 0;
            let xb = self.x[base + wb] & mb != 0;
            let za = self.z[base + wa] & ma != 0;
            if xa && zb && (xb == za) {
                self.r[row] = (self.r[row] + 2) % 4;
            }
        }
    }

    /// Phase exponent of `(row a operator) · (row b operator)`.
    fn row_mul_phase(&self, a: usize, b: usize) -> u8 {
        let mut e: i32 = 0;
        let ba = a * self.wpr;
        let bb = b * self.wpr;
        for w in 0..self.wpr {
            let (xa, za) = (self.x[ba + w], self.z[ba + w]);
            let (xb, zb) = (self.x[bb + w], self.z[bb + w]);
            let mut active = xa | za;
            while active != 0 {
                let m = active & active.wrapping_neg();
                active ^= m;
                let (x1, z1) = (xa & m != 0, za & m != 0);
                let (x2, z2) = (xb & m != 0, zb & m != 0);
                match (x1, z1) {
                    (true, false) => {
                        // X · Y = iZ, X · Z = -iY
                        if x2 && z2 {
                            e += 1;
                        } else if !x2 && z2 {
                            e -= 1;
                        }
                    }
                    (true, true) => {
                        // Y · Z = iX, Y · X = -iZ
                        if !x2 && z2 {
                            e += 1;
                        } else if x2 && !z2 {
                            e -= 1;
                        }
                    }
                    (false, true) => {
                        // Z · X = iY, Z · Y = -iX
                        if x2 && !z2 {
                            e += 1;
                        } else if x2 && z2 {
                            e -= 1;
                        }
                    }
                    (false, false) => unreachable!(),
                }
            }
        }
        (e + i32::from(self.r[a]) + i32::from(self.r[b])).rem_euclid(4) as u8
    }

    /// Row b <- (row a) · (row b).
    fn row_mul(&mut self, a: usize, b: usize) {
        self.r[b] = self.row_mul_phase(a, b);
        let (ba, bb) = (a * self.wpr, b * self.wpr);
        for w in 0..self.wpr {
            self.x[bb + w] ^= self.x[ba + w];
            self.z[bb + w] ^= self.z[ba + w];
        }
    }

    fn row_copy(&mut self, src: usize, dst: usize) {
        let (bs, bd) = (src * self.wpr, dst * self.wpr);
        for w in 0..self.wpr {
            self.x[bd + w] = self.x[bs + w];
            self.z[bd + w] = self.z[bs + w];
        }
        self.r[dst] = self.r[src];
    }

    /// Set row `dst` to the observable `Z_k` (sign +1).
    fn row_set_z(&mut self, dst: usize, k: usize) {
        let bd = dst * self.wpr;
        for w in 0..self.wpr {
            self.x[bd + w] = 0;
            self.z[bd + w] = 0;
        }
        self.r[dst] = 0;
        self.set_z(dst, k, true);
    }

    /// `H` on every qubit at once: swap the X and Z parts wholesale, with a
    /// phase bump per row for every Y (both bits set).
    fn apply_h_all(&mut self) {
        for row in 0..2 * self.n {
            let base = row * self.wpr;
            let mut ys = 0u32;
            for w in 0..self.wpr {
                ys += (self.x[base + w] & self.z[base + w]).count_ones();
            }
            if ys % 2 == 1 {
                self.r[row] = (self.r[row] + 2) % 4;
            }
        }
        std::mem::swap(&mut self.x, &mut self.z);
    }

    /// Z-basis measurement of qubit `k`; returns (outcome, deterministic).
    fn measure_z<R: Rng + ?Sized>(&mut self, k: usize, rng: &mut R) -> (bool, bool) {
        let n = self.n;
        let pivot = (n..2 * n).find(|&row| self.get_x(row, k));
        if let Some(p) = pivot {
            // Random outcome: the state has a stabilizer anticommuting with Z_k.
            for row in 0..2 * n {
                if row != p && self.get_x(row, k) {
                    self.row_mul(p, row);
                }
            }
            self.row_copy(p, p - n);
            self.row_set_z(p, k);
            let outcome = rng.gen::<bool>();
            self.r[p] = if outcome { 2 } else { 0 };
            (outcome, false)
        } else {
            // Deterministic: accumulate into the scratch row the product of
            // stabilizers whose destabilizer partners anticommute with Z_k.
            let scratch = 2 * n;
            let bs = scratch * self.wpr;
            for w in 0..self.wpr {
                self.x[bs + w] = 0;
                self.z[bs + w] = 0;
            }
            self.r[scratch] = 0;
            for row in 0..n {
                if self.get_x(row, k) {
                    self.row_mul(row + n, scratch);
                }
            }
            (self.r[scratch] == 2, true)
        }
    }

    /// Canonical (RREF with phase tracking) stabilizer generators restricted
    /// to `qubits`, or `None` if the subsystem is entangled with the rest.
    ///
    /// Column order inside the canonical form follows the order of `qubits`,
    /// X block first.
    fn canonical_on(&self, qubits: &[usize]) -> Option<(Vec<BitVec>, Vec<u8>)> {
        let n = self.n;
        let mut work = self.clone();
        let in_subset = {
            let mut v = vec![false; n];
            for &q in qubits {
                v[q] = true;
            }
            v
        };
        let complement: Vec<usize> = (0..n).filter(|&q| !in_subset[q]).collect();

        // Echelonize the stabilizer rows over complement columns (X then Z);
        // pivot rows carry all complement support, the rest generate the
        // subgroup local to `qubits`.
        let mut local_rows: Vec<usize> = (n..2 * n).collect();
        for &c in &complement {
            for pass in 0..2 {
                let hit = local_rows.iter().position(|&row| {
                    if pass == 0 {
                        work.get_x(row, c)
                    } else {
                        work.get_z(row, c)
                    }
                });
                let Some(sel_idx) = hit else { continue };
                let pivot_row = local_rows[sel_idx];
                for &row in &local_rows {
                    if row != pivot_row {
                        let has = if pass == 0 {
                            work.get_x(row, c)
                        } else {
                            work.get_z(row, c)
                        };
                        if has {
                            work.row_mul(pivot_row, row);
                        }
                    }
                }
                local_rows.remove(sel_idx);
            }
        }
        // Remaining rows must have no complement support at all.
        for &row in &local_rows {
            for &c in &complement {
                if work.get_x(row, c) || work.get_z(row, c) {
                    return None;
                }
            }
        }
        if local_rows.len() != qubits.len() {
            return None;
        }

        // RREF over the subset columns in register order, X block then Z.
        let m = qubits.len();
        let col_of = |j: usize| -> (usize, bool) {
            if j < m {
                (qubits[j], true)
            } else {
                (qubits[j - m], false)
            }
        };
        let mut rows = local_rows;
        let mut pivot_at = 0usize;
        for j in 0..2 * m {
            let (q, is_x) = col_of(j);
            let hit = (pivot_at..rows.len()).find(|&idx| {
                let row = rows[idx];
                if is_x {
                    work.get_x(row, q)
                } else {
                    work.get_z(row, q)
                }
            });
            let Some(sel) = hit else { continue };
            rows.swap(pivot_at, sel);
            let pr = rows[pivot_at];
            for (idx, &row) in rows.iter().enumerate() {
                if idx != pivot_at {
                    let has = if is_x {
                        work.get_x(row, q)
                    } else {
                        work.get_z(row, q)
                    };
                    if has {
                        work.row_mul(pr, row);
                    }
                }
            }
            pivot_at += 1;
            if pivot_at == rows.len() {
                break;
            }
        }

        let mut bits_out = Vec::with_capacity(m);
        let mut phases = Vec::with_capacity(m);
        for &row in &rows {
            let mut v = BitVec::zeros(2 * m);
            for (j, &q) in qubits.iter().enumerate() {
                v.set(j, work.get_x(row, q));
                v.set(m + j, work.get_z(row, q));
            }
            bits_out.push(v);
            phases.push(work.r[row]);
        }
        Some((bits_out, phases))
    }

    /// Block-diagonal direct sum `self ⊕ other`.
    fn direct_sum(&self, other: &Tableau) -> Tableau {
        let n1 = self.n;
        let n2 = other.n;
        let n = n1 + n2;
        let mut t = Tableau::new_zero_state(n);
        // Overwrite the fresh rows with the source content.
        let copy_row = |t: &mut Tableau, dst: usize, src_tab: &Tableau, src: usize, off: usize| {
            let base = dst * t.wpr;
            for w in 0..t.wpr {
                t.x[base + w] = 0;
                t.z[base + w] = 0;
            }
            for c in 0..src_tab.n {
                t.set_x(dst, off + c, src_tab.get_x(src, c));
                t.set_z(dst, off + c, src_tab.get_z(src, c));
            }
            t.r[dst] = src_tab.r[src];
        };
        for i in 0..n1 {
            copy_row(&mut t, i, self, i, 0);
            copy_row(&mut t, n + i, self, n1 + i, 0);
        }
        for i in 0..n2 {
            copy_row(&mut t, n1 + i, other, i, n1);
            copy_row(&mut t, n + n1 + i, other, n2 + i, n1);
        }
        t
    }
}

/// Handle to a (possibly shared) simulated quantum state. Registers sharing
/// one tableau (halves of Bell pairs) stay linked through an `Arc`; the
/// handle itself is single-owner.
pub struct QuantumRegister {
    shared: Arc<Mutex<Tableau>>,
    qubits: Vec<usize>,
    consumed: bool,
}

impl QuantumRegister {
    /// `|0...0>` on `n` fresh qubits.
    pub fn zeros(n: usize) -> Result<Self, QsimError> {
        if n > MAX_QUBITS {
            return Err(QsimError::TooLarge(n));
        }
        Ok(Self {
            shared: Arc::new(Mutex::new(Tableau::new_zero_state(n))),
            qubits: (0..n).collect(),
            consumed: false,
        })
    }

    /// BB84 product state: qubit `i` is `|bits_i>` when `basis_i = 0` and
    /// `H|bits_i>` when `basis_i = 1`.
    pub fn prepare_bb84(bits: &BitVec, basis: &BitVec) -> Result<Self, QsimError> {
        if bits.len() != basis.len() {
            return Err(QsimError::SizeMismatch {
                want: bits.len(),
                got: basis.len(),
            });
        }
        // Product state assembled row by row: for a computational qubit the
        // stabilizer is (-1)^bit Z_i with destabilizer X_i; a Hadamard basis
        // choice swaps the X/Z parts of both rows.
        let reg = Self::zeros(bits.len())?;
        {
            let n = bits.len();
            let mut t = reg.shared.lock().unwrap();
            for i in 0..n {
                if basis.get(i) {
                    t.set_x(i, i, false);
                    t.set_z(i, i, true);
                    t.set_x(n + i, i, true);
                    t.set_z(n + i, i, false);
                }
                if bits.get(i) {
                    t.r[n + i] = 2;
                }
            }
        }
        Ok(reg)
    }

    /// `n` Bell pairs as two linked halves over one tableau: half A holds
    /// qubits `0..n`, half B holds `n..2n`, jointly in
    /// `2^{-n/2} Σ_s |s>_A |s>_B`.
    pub fn make_bell_pairs(n: usize) -> Result<(Self, Self), QsimError> {
        if 2 * n > MAX_QUBITS {
            return Err(QsimError::TooLarge(2 * n));
        }
        let shared = Arc::new(Mutex::new(Tableau::new_zero_state(2 * n)));
        {
            let mut t = shared.lock().unwrap();
            for j in 0..n {
                t.apply_h(j);
                t.apply_cnot(j, n + j);
            }
        }
        let a = Self {
            shared: Arc::clone(&shared),
            qubits: (0..n).collect(),
            consumed: false,
        };
        let b = Self {
            shared,
            qubits: (n..2 * n).collect(),
            consumed: false,
        };
        Ok((a, b))
    }

    /// Random pure stabilizer state from a random Clifford circuit on `|0^n>`.
    pub fn random_stabilizer<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self, QsimError> {
        let reg = Self::zeros(n)?;
        {
            let mut t = reg.shared.lock().unwrap();
            let gates = (2 * n * n).max(16);
            for _ in 0..gates {
                match rng.gen_range(0..3) {
                    0 => t.apply_h(rng.gen_range(0..n)),
                    1 => t.apply_s(rng.gen_range(0..n)),
                    _ => {
                        if n >= 2 {
                            let a = rng.gen_range(0..n);
                            let mut b = rng.gen_range(0..n - 1);
                            if b >= a {
                                b += 1;
                            }
                            t.apply_cnot(a, b);
                        }
                    }
                }
            }
        }
        Ok(reg)
    }

    pub fn n(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    /// Mark the register destroyed; later operations error.
    pub fn consume(&mut self) {
        self.consumed = true;
    }

    fn live(&self) -> Result<(), QsimError> {
        if self.consumed {
            Err(QsimError::Consumed)
        } else {
            Ok(())
        }
    }

    fn lock(&self) -> MutexGuard<'_, Tableau> {
        self.shared.lock().unwrap()
    }

    /// Apply the Pauli layer `X^a Z^b` (conjugation order is immaterial for
    /// the state). An involution.
    pub fn apply_pauli(&mut self, mask: &PauliMask) -> Result<(), QsimError> {
        self.live()?;
        if mask.len() != self.n() {
            return Err(QsimError::SizeMismatch {
                want: self.n(),
                got: mask.len(),
            });
        }
        let mut t = self.lock();
        for i in 0..self.qubits.len() {
            if mask.x_bits.get(i) {
                t.apply_x(self.qubits[i]);
            }
            if mask.z_bits.get(i) {
                t.apply_z(self.qubits[i]);
            }
        }
        Ok(())
    }

    /// Apply `H` at every set position. An involution.
    pub fn apply_hadamard_mask(&mut self, mask: &BitVec) -> Result<(), QsimError> {
        self.live()?;
        if mask.len() != self.n() {
            return Err(QsimError::SizeMismatch {
                want: self.n(),
                got: mask.len(),
            });
        }
        let mut t = self.lock();
        for i in 0..self.qubits.len() {
            if mask.get(i) {
                t.apply_h(self.qubits[i]);
            }
        }
        Ok(())
    }

    /// Relabel positions: exact and free of tableau work.
    pub fn apply_permutation(&mut self, perm: &QubitPermutation) -> Result<(), QsimError> {
        self.live()?;
        if perm.len() != self.n() {
            return Err(QsimError::SizeMismatch {
                want: self.n(),
                got: perm.len(),
            });
        }
        let old = self.qubits.clone();
        for (i, &target) in perm.image().iter().enumerate() {
            self.qubits[target] = old[i];
        }
        Ok(())
    }

    /// Projectively measure the listed positions in the given per-position
    /// bases. Deterministic outcomes leave the state unchanged; random ones
    /// collapse it in place.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        positions: &[usize],
        bases: &[MeasureBasis],
        rng: &mut R,
    ) -> Result<BitVec, QsimError> {
        self.live()?;
        assert_eq!(positions.len(), bases.len());
        let mut seen = vec![false; self.n()];
        for &p in positions {
            if p >= self.n() {
                return Err(QsimError::PositionOutOfRange(p));
            }
            if seen[p] {
                return Err(QsimError::DuplicatePosition(p));
            }
            seen[p] = true;
        }
        let mut out = BitVec::zeros(positions.len());
        let mut t = self.lock();
        for (i, (&p, &basis)) in positions.iter().zip(bases).enumerate() {
            let q = self.qubits[p];
            let outcome = match basis {
                MeasureBasis::Computational => t.measure_z(q, rng).0,
                MeasureBasis::Hadamard => {
                    t.apply_h(q);
                    let o = t.measure_z(q, rng).0;
                    t.apply_h(q);
                    o
                }
            };
            out.set(i, outcome);
        }
        Ok(out)
    }

    /// Measure every position in one basis. All-Hadamard measurement of a
    /// register covering its whole tableau takes a fast path: one global
    /// basis change, Z measurements, change back.
    pub fn measure_all<R: Rng + ?Sized>(
        &mut self,
        basis: MeasureBasis,
        rng: &mut R,
    ) -> Result<BitVec, QsimError> {
        self.live()?;
        if basis == MeasureBasis::Hadamard {
            let mut t = self.lock();
            if self.qubits.len() == t.n {
                t.apply_h_all();
                let mut out = BitVec::zeros(self.qubits.len());
                for (i, &q) in self.qubits.iter().enumerate() {
                    out.set(i, t.measure_z(q, rng).0);
                }
                t.apply_h_all();
                return Ok(out);
            }
        }
        let positions: Vec<usize> = (0..self.n()).collect();
        let bases = vec![basis; positions.len()];
        self.measure(&positions, &bases, rng)
    }

    /// Bell-measure `(payload_j, epr_a_j)` for every `j`, consuming both
    /// registers; returns the `(x, z)` correction bits. The linked B half
    /// afterwards holds `X^x Z^z ρ Z^z X^x`.
    pub fn teleport<R: Rng + ?Sized>(
        payload: QuantumRegister,
        epr_a: QuantumRegister,
        rng: &mut R,
    ) -> Result<(BitVec, BitVec), QsimError> {
        payload.live()?;
        epr_a.live()?;
        let n = payload.n();
        if epr_a.n() != n {
            return Err(QsimError::SizeMismatch {
                want: n,
                got: epr_a.n(),
            });
        }
        if Arc::ptr_eq(&payload.shared, &epr_a.shared) {
            return Err(QsimError::SharedState);
        }
        // Move the payload state into the EPR tableau so that the B half's
        // handle stays valid. The payload must own its state outright.
        {
            let t = payload.lock();
            if payload.qubits.len() != t.n {
                return Err(QsimError::PartialCoverage);
            }
        }
        if Arc::strong_count(&payload.shared) != 1 {
            return Err(QsimError::SharedState);
        }
        let payload_tab = Arc::try_unwrap(payload.shared)
            .map_err(|_| QsimError::SharedState)?
            .into_inner()
            .unwrap();
        let mut x_out = BitVec::zeros(n);
        let mut z_out = BitVec::zeros(n);
        {
            let mut t = epr_a.lock();
            let offset = t.n;
            let merged = t.direct_sum(&payload_tab);
            *t = merged;
            for j in 0..n {
                let c = offset + payload.qubits[j];
                let a = epr_a.qubits[j];
                t.apply_cnot(c, a);
                t.apply_h(c);
                let (z_j, _) = t.measure_z(c, rng);
                let (x_j, _) = t.measure_z(a, rng);
                x_out.set(j, x_j);
                z_out.set(j, z_j);
            }
        }
        Ok((x_out, z_out))
    }

    /// State equality up to global phase, by comparing canonical stabilizer
    /// forms. Both registers must be pure subsystems of their tableaus.
    pub fn canonical_equal(a: &QuantumRegister, b: &QuantumRegister) -> Result<bool, QsimError> {
        a.live()?;
        b.live()?;
        if a.n() != b.n() {
            return Err(QsimError::SizeMismatch {
                want: a.n(),
                got: b.n(),
            });
        }
        let form_a = a
            .lock()
            .canonical_on(&a.qubits)
            .ok_or(QsimError::EntangledSubsystem)?;
        let form_b = if Arc::ptr_eq(&a.shared, &b.shared) {
            a.lock()
                .canonical_on(&b.qubits)
                .ok_or(QsimError::EntangledSubsystem)?
        } else {
            b.lock()
                .canonical_on(&b.qubits)
                .ok_or(QsimError::EntangledSubsystem)?
        };
        Ok(form_a == form_b)
    }

    /// Clone the classical descriptor. Forbidden outside the test harness to
    /// preserve the no-cloning discipline; see [`harness::allow_duplication`].
    pub fn duplicate_for_test(&self) -> Result<QuantumRegister, QsimError> {
        self.live()?;
        if !harness::duplication_allowed() {
            return Err(QsimError::DuplicationForbidden);
        }
        let t = self.lock();
        Ok(QuantumRegister {
            shared: Arc::new(Mutex::new(t.clone())),
            qubits: self.qubits.clone(),
            consumed: false,
        })
    }

    /// Snapshot for serialization. Requires sole ownership of a fully
    /// covered tableau (protocol bundles always satisfy both).
    pub fn export(&self) -> Result<TableauSnapshot, QsimError> {
        self.live()?;
        if Arc::strong_count(&self.shared) != 1 {
            return Err(QsimError::SharedState);
        }
        let t = self.lock();
        if self.qubits.len() != t.n {
            return Err(QsimError::PartialCoverage);
        }
        Ok(TableauSnapshot {
            n: t.n,
            x: t.x.clone(),
            z: t.z.clone(),
            r: t.r.clone(),
            order: self.qubits.clone(),
        })
    }

    pub fn import(snap: TableauSnapshot) -> Result<QuantumRegister, QsimError> {
        if snap.n > MAX_QUBITS {
            return Err(QsimError::TooLarge(snap.n));
        }
        let wpr = snap.n.div_ceil(64).max(1);
        let rows = 2 * snap.n + 1;
        if snap.x.len() != rows * wpr || snap.z.len() != rows * wpr || snap.r.len() != rows {
            return Err(QsimError::SizeMismatch {
                want: rows * wpr,
                got: snap.x.len(),
            });
        }
        let mut seen = vec![false; snap.n];
        for &q in &snap.order {
            if q >= snap.n || seen[q] {
                return Err(QsimError::NotAPermutation);
            }
            seen[q] = true;
        }
        Ok(QuantumRegister {
            shared: Arc::new(Mutex::new(Tableau {
                n: snap.n,
                wpr,
                x: snap.x,
                z: snap.z,
                r: snap.r,
            })),
            qubits: snap.order,
            consumed: false,
        })
    }
}

/// Raw tableau content for the serialization envelope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableauSnapshot {
    pub n: usize,
    pub x: Vec<u64>,
    pub z: Vec<u64>,
    pub r: Vec<u8>,
    pub order: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{chi2_crit95, chi2_stat};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    fn comp(n: usize) -> Vec<MeasureBasis> {
        vec![MeasureBasis::Computational; n]
    }

    fn had(n: usize) -> Vec<MeasureBasis> {
        vec![MeasureBasis::Hadamard; n]
    }

    #[test]
    fn bb84_deterministic_bases() {
        let mut r = rng(1);
        // |0> measured computationally is always 0.
        let mut reg =
            QuantumRegister::prepare_bb84(&BitVec::zeros(4), &BitVec::zeros(4)).unwrap();
        assert!(reg.measure(&[0, 1, 2, 3], &comp(4), &mut r).unwrap().is_zero());
        // |+> measured in the Hadamard basis is always 0.
        let mut reg =
            QuantumRegister::prepare_bb84(&BitVec::zeros(4), &BitVec::ones(4)).unwrap();
        assert!(reg.measure(&[0, 1, 2, 3], &had(4), &mut r).unwrap().is_zero());
        // |1> in the Hadamard basis (|->) measured in Hadamard basis gives 1.
        let mut reg = QuantumRegister::prepare_bb84(&BitVec::ones(2), &BitVec::ones(2)).unwrap();
        let out = reg.measure(&[0, 1], &had(2), &mut r).unwrap();
        assert_eq!(out, BitVec::ones(2));
    }

    #[test]
    fn born_rule_on_minus_state() {
        // |-> measured computationally: 0/1 each at rate 0.5 ± 0.02 over 10^4.
        let mut r = rng(2);
        let mut ones = 0usize;
        let trials = 10_000;
        for _ in 0..trials {
            let mut reg =
                QuantumRegister::prepare_bb84(&BitVec::ones(1), &BitVec::ones(1)).unwrap();
            if reg.measure(&[0], &comp(1), &mut r).unwrap().get(0) {
                ones += 1;
            }
        }
        let rate = ones as f64 / trials as f64;
        assert!((rate - 0.5).abs() < 0.02, "rate = {rate}");
    }

    #[test]
    fn plus_state_born_rule() {
        let mut r = rng(3);
        let mut ones = 0usize;
        let trials = 10_000;
        for _ in 0..trials {
            let mut reg =
                QuantumRegister::prepare_bb84(&BitVec::zeros(1), &BitVec::ones(1)).unwrap();
            if reg.measure(&[0], &comp(1), &mut r).unwrap().get(0) {
                ones += 1;
            }
        }
        let rate = ones as f64 / trials as f64;
        assert!((rate - 0.5).abs() < 0.02, "rate = {rate}");
    }

    #[test]
    fn pauli_gates_flip_outcomes() {
        let mut r = rng(4);
        // X on |0> then computational measurement -> 1.
        let mut reg = QuantumRegister::zeros(1).unwrap();
        let mask = PauliMask::new(BitVec::ones(1), BitVec::zeros(1));
        reg.apply_pauli(&mask).unwrap();
        assert!(reg.measure(&[0], &comp(1), &mut r).unwrap().get(0));
        // Z on |+> then Hadamard measurement -> 1.
        let mut reg = QuantumRegister::prepare_bb84(&BitVec::zeros(1), &BitVec::ones(1)).unwrap();
        let mask = PauliMask::new(BitVec::zeros(1), BitVec::ones(1));
        reg.apply_pauli(&mask).unwrap();
        assert!(reg.measure(&[0], &had(1), &mut r).unwrap().get(0));
    }

    #[test]
    fn pauli_and_hadamard_are_involutions() {
        let mut r = rng(5);
        for _ in 0..200 {
            let n = 5;
            let reg = QuantumRegister::random_stabilizer(n, &mut r).unwrap();
            harness::allow_duplication(true);
            let mut probe = reg.duplicate_for_test().unwrap();
            harness::allow_duplication(false);
            let mask = PauliMask::random(n, &mut r);
            probe.apply_pauli(&mask).unwrap();
            probe.apply_pauli(&mask).unwrap();
            assert!(QuantumRegister::canonical_equal(&reg, &probe).unwrap());
            let hmask = BitVec::random(n, &mut r);
            probe.apply_hadamard_mask(&hmask).unwrap();
            probe.apply_hadamard_mask(&hmask).unwrap();
            assert!(QuantumRegister::canonical_equal(&reg, &probe).unwrap());
        }
    }

    #[test]
    fn twirl_then_inverse_restores_canonical_state() {
        // Random twirl then the same twirl again (conjugation is an
        // involution) leaves the canonical tableau equal to the original;
        // 10^3 random cases.
        let mut r = rng(6);
        harness::allow_duplication(true);
        for _ in 0..1000 {
            let n = 4;
            let reg = QuantumRegister::random_stabilizer(n, &mut r).unwrap();
            let mut probe = reg.duplicate_for_test().unwrap();
            let mask = PauliMask::random(n, &mut r);
            probe.apply_pauli(&mask).unwrap();
            probe.apply_pauli(&mask).unwrap();
            assert!(QuantumRegister::canonical_equal(&reg, &probe).unwrap());
        }
        harness::allow_duplication(false);
    }

    #[test]
    fn permutations_compose_and_relabel() {
        let mut r = rng(7);
        let bits = BitVec::from_str01("1100").unwrap();
        let mut reg = QuantumRegister::prepare_bb84(&bits, &BitVec::zeros(4)).unwrap();
        let perm = QubitPermutation::moving_to_front(&[2, 3], 4).unwrap();
        reg.apply_permutation(&perm).unwrap();
        // Positions 2,3 (holding 0,0) moved to the front.
        let out = reg.measure(&[0, 1, 2, 3], &comp(4), &mut r).unwrap();
        assert_eq!(out, BitVec::from_str01("0011").unwrap());
        // Associativity of composition.
        let p1 = QubitPermutation::new(vec![1, 2, 0, 3]).unwrap();
        let p2 = QubitPermutation::new(vec![3, 0, 2, 1]).unwrap();
        let p3 = QubitPermutation::new(vec![0, 3, 1, 2]).unwrap();
        let left = p3.compose_after(&p2).compose_after(&p1);
        let right = p3.compose_after(&p2.compose_after(&p1));
        assert_eq!(left, right);
        // Inverse really inverts.
        let id = p1.inverse().compose_after(&p1);
        assert_eq!(id, QubitPermutation::identity(4));
    }

    #[test]
    fn deterministic_measurement_is_gentle() {
        // Measuring a deterministic outcome never changes the canonical
        // tableau (the gentle-measurement rendering).
        let mut r = rng(8);
        let bits = BitVec::from_str01("10110").unwrap();
        let basis = BitVec::from_str01("01010").unwrap();
        let reg = QuantumRegister::prepare_bb84(&bits, &basis).unwrap();
        harness::allow_duplication(true);
        let mut probe = reg.duplicate_for_test().unwrap();
        harness::allow_duplication(false);
        let bases: Vec<MeasureBasis> = basis
            .iter()
            .map(|b| if b { MeasureBasis::Hadamard } else { MeasureBasis::Computational })
            .collect();
        let out = probe.measure(&[0, 1, 2, 3, 4], &bases, &mut r).unwrap();
        assert_eq!(out, bits);
        assert!(QuantumRegister::canonical_equal(&reg, &probe).unwrap());
    }

    #[test]
    fn bell_pair_correlations() {
        let mut r = rng(9);
        // Computational outcomes of the two halves agree, 10^4 shots.
        for _ in 0..10_000 {
            let (mut a, mut b) = QuantumRegister::make_bell_pairs(1).unwrap();
            let oa = a.measure(&[0], &comp(1), &mut r).unwrap();
            let ob = b.measure(&[0], &comp(1), &mut r).unwrap();
            assert_eq!(oa, ob);
        }
        // Hadamard-basis outcomes agree as well (stabilizers XX and ZZ).
        for _ in 0..2000 {
            let (mut a, mut b) = QuantumRegister::make_bell_pairs(1).unwrap();
            let oa = a.measure(&[0], &had(1), &mut r).unwrap();
            let ob = b.measure(&[0], &had(1), &mut r).unwrap();
            assert_eq!(oa, ob);
        }
    }

    #[test]
    fn bell_half_outcomes_uniform() {
        // Marginal of A is maximally mixed: single-qubit outcomes uniform
        // within 3 sigma at n = 3.
        let mut r = rng(10);
        let trials = 6000;
        let mut ones = [0usize; 3];
        for _ in 0..trials {
            let (mut a, _b) = QuantumRegister::make_bell_pairs(3).unwrap();
            let out = a.measure(&[0, 1, 2], &comp(3), &mut r).unwrap();
            for (i, o) in out.iter().enumerate() {
                if o {
                    ones[i] += 1;
                }
            }
        }
        let sigma = (trials as f64 * 0.25).sqrt();
        for &c in &ones {
            assert!((c as f64 - trials as f64 / 2.0).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn teleport_zero_payload_branches() {
        // Payload |0>: B ends in |x> for the reported x, over many runs all
        // four (x, z) branches occur and the rule holds every time.
        let mut r = rng(11);
        let mut branch_seen = [false; 4];
        for _ in 0..200 {
            let payload = QuantumRegister::zeros(1).unwrap();
            let (a, mut b) = QuantumRegister::make_bell_pairs(1).unwrap();
            let (x, z) = QuantumRegister::teleport(payload, a, &mut r).unwrap();
            branch_seen[(x.as_u64() * 2 + z.as_u64()) as usize] = true;
            let out = b.measure(&[0], &comp(1), &mut r).unwrap();
            assert_eq!(out.get(0), x.get(0), "B must be |x>");
        }
        assert!(branch_seen.iter().all(|&s| s));
    }

    #[test]
    fn teleport_outcomes_uniform_chi2() {
        // (x, z) uniform over {0,1}^2 at the 5% level, 10^4 runs.
        let mut r = rng(12);
        let trials = 10_000usize;
        let mut counts = [0f64; 4];
        for _ in 0..trials {
            let payload = QuantumRegister::zeros(1).unwrap();
            let (a, _b) = QuantumRegister::make_bell_pairs(1).unwrap();
            let (x, z) = QuantumRegister::teleport(payload, a, &mut r).unwrap();
            counts[(x.as_u64() * 2 + z.as_u64()) as usize] += 1.0;
        }
        let expected = [trials as f64 / 4.0; 4];
        let chi2 = chi2_stat(&counts, &expected);
        assert!(chi2 < chi2_crit95(3), "chi2 = {chi2}");
    }

    #[test]
    fn teleport_identity_with_correction() {
        // Teleport then apply the inverse Pauli: canonical state equals the
        // original payload, 10^3 random 4-qubit stabilizer payloads.
        let mut r = rng(13);
        harness::allow_duplication(true);
        for _ in 0..1000 {
            let n = 4;
            let payload = QuantumRegister::random_stabilizer(n, &mut r).unwrap();
            let reference = payload.duplicate_for_test().unwrap();
            let (a, mut b) = QuantumRegister::make_bell_pairs(n).unwrap();
            let (x, z) = QuantumRegister::teleport(payload, a, &mut r).unwrap();
            // B = X^x Z^z rho Z^z X^x; undo with the same mask.
            b.apply_pauli(&PauliMask::new(x, z)).unwrap();
            assert!(QuantumRegister::canonical_equal(&reference, &b).unwrap());
        }
        harness::allow_duplication(false);
    }

    #[test]
    fn teleport_requires_matching_sizes_and_live_handles() {
        let mut r = rng(14);
        let payload = QuantumRegister::zeros(2).unwrap();
        let (a, _b) = QuantumRegister::make_bell_pairs(1).unwrap();
        assert!(matches!(
            QuantumRegister::teleport(payload, a, &mut r),
            Err(QsimError::SizeMismatch { .. })
        ));
        let mut payload = QuantumRegister::zeros(1).unwrap();
        payload.consume();
        let (a, _b) = QuantumRegister::make_bell_pairs(1).unwrap();
        assert!(matches!(
            QuantumRegister::teleport(payload, a, &mut r),
            Err(QsimError::Consumed)
        ));
    }

    #[test]
    fn canonical_equal_basics() {
        let zero = QuantumRegister::zeros(1).unwrap();
        let zero2 = QuantumRegister::zeros(1).unwrap();
        assert!(QuantumRegister::canonical_equal(&zero, &zero).unwrap());
        assert!(QuantumRegister::canonical_equal(&zero, &zero2).unwrap());
        let plus = QuantumRegister::prepare_bb84(&BitVec::zeros(1), &BitVec::ones(1)).unwrap();
        assert!(!QuantumRegister::canonical_equal(&zero, &plus).unwrap());
    }

    #[test]
    fn canonical_equal_ignores_global_phase() {
        // X Z |psi> and -Z X |psi> are the same state: applying the Paulis in
        // either order must give canonically equal registers.
        let mut r = rng(15);
        for _ in 0..100 {
            let n = 3;
            harness::allow_duplication(true);
            let base = QuantumRegister::random_stabilizer(n, &mut r).unwrap();
            let mut xz = base.duplicate_for_test().unwrap();
            let mut zx = base.duplicate_for_test().unwrap();
            harness::allow_duplication(false);
            let xs = BitVec::random(n, &mut r);
            let zs = BitVec::random(n, &mut r);
            // X layer then Z layer.
            xz.apply_pauli(&PauliMask::new(xs.clone(), BitVec::zeros(n))).unwrap();
            xz.apply_pauli(&PauliMask::new(BitVec::zeros(n), zs.clone())).unwrap();
            // Z layer then X layer.
            zx.apply_pauli(&PauliMask::new(BitVec::zeros(n), zs)).unwrap();
            zx.apply_pauli(&PauliMask::new(xs, BitVec::zeros(n))).unwrap();
            assert!(QuantumRegister::canonical_equal(&xz, &zx).unwrap());
        }
    }

    #[test]
    fn duplication_needs_privilege() {
        harness::allow_duplication(false);
        let reg = QuantumRegister::zeros(2).unwrap();
        assert!(matches!(
            reg.duplicate_for_test(),
            Err(QsimError::DuplicationForbidden)
        ));
    }

    #[test]
    fn consumed_register_rejects_operations() {
        let mut r = rng(16);
        let mut reg = QuantumRegister::zeros(2).unwrap();
        reg.consume();
        assert!(matches!(
            reg.measure(&[0], &comp(1), &mut r),
            Err(QsimError::Consumed)
        ));
        assert!(matches!(
            reg.apply_pauli(&PauliMask::identity(2)),
            Err(QsimError::Consumed)
        ));
    }

    #[test]
    fn export_import_roundtrip() {
        let mut r = rng(17);
        let reg = QuantumRegister::random_stabilizer(5, &mut r).unwrap();
        harness::allow_duplication(true);
        let reference = reg.duplicate_for_test().unwrap();
        harness::allow_duplication(false);
        let snap = reg.export().unwrap();
        let back = QuantumRegister::import(snap).unwrap();
        assert!(QuantumRegister::canonical_equal(&reference, &back).unwrap());
    }

    #[test]
    fn export_rejects_shared_or_partial() {
        let (a, _b) = QuantumRegister::make_bell_pairs(2).unwrap();
        assert!(a.export().is_err());
    }

    #[test]
    fn size_cap_enforced() {
        assert!(matches!(
            QuantumRegister::zeros(MAX_QUBITS + 1),
            Err(QsimError::TooLarge(_))
        ));
    }
}
