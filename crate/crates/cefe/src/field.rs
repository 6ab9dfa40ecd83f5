//! GF(2^k) arithmetic and univariate polynomials.
//!
//! Addition is XOR; multiplication is carry-less polynomial multiplication
//! reduced modulo a fixed irreducible per extension degree. Working in
//! characteristic 2 lets the bounded-FE layer constant-fold its field
//! arithmetic into XOR circuits.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("unsupported extension degree {0} (supported: 3, 6, 8)")]
    UnsupportedDegree(u8),
    #[error("extension degree mismatch: {0} vs {1}")]
    DegreeMismatch(u8, u8),
    #[error("duplicate abscissa in interpolation")]
    DuplicateAbscissa,
    #[error("division by zero")]
    DivisionByZero,
    #[error("not enough points: have {have}, need {need}")]
    NotEnoughPoints { have: usize, need: usize },
}

/// Irreducible modulus for each supported degree, coefficient bits with the
/// leading term included: x³+x+1, x⁶+x+1, x⁸+x⁴+x³+x+1.
fn modulus(k: u8) -> Result<u16, FieldError> {
    match k {
        3 => Ok(0b1011),
        6 => Ok(0b100_0011),
        8 => Ok(0b1_0001_1011),
        other => Err(FieldError::UnsupportedDegree(other)),
    }
}

/// An element of GF(2^k), `value` holding the k coefficient bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElem {
    k: u8,
    value: u16,
}

impl FieldElem {
    pub fn new(k: u8, value: u16) -> Result<Self, FieldError> {
        modulus(k)?;
        assert!(value < 1 << k, "value {value} out of range for GF(2^{k})");
        Ok(Self { k, value })
    }

    pub fn zero(k: u8) -> Result<Self, FieldError> {
        Self::new(k, 0)
    }

    pub fn one(k: u8) -> Result<Self, FieldError> {
        Self::new(k, 1)
    }

    pub fn random<R: Rng + ?Sized>(k: u8, rng: &mut R) -> Result<Self, FieldError> {
        modulus(k)?;
        Ok(Self {
            k,
            value: rng.gen_range(0..1u16 << k),
        })
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn value(&self) -> u16 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Field addition (XOR; characteristic 2).
    pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
        if self.k != other.k {
            return Err(FieldError::DegreeMismatch(self.k, other.k));
        }
        Ok(Self {
            k: self.k,
            value: self.value ^ other.value,
        })
    }
}

/// Field multiplication: schoolbook polynomial product reduced modulo the
/// fixed irreducible for the common degree.
pub fn fe_mul(a: &FieldElem, b: &FieldElem) -> Result<FieldElem, FieldError> {
    if a.k != b.k {
        return Err(FieldError::DegreeMismatch(a.k, b.k));
    }
    let k = a.k;
    let modp = modulus(k)? as u32;
    let mut prod: u32 = 0;
    for i in 0..k {
        if a.value >> i & 1 == 1 {
            prod ^= (b.value as u32) << i;
        }
    }
    for deg in (k..2 * k).rev() {
        if prod >> deg & 1 == 1 {
            prod ^= modp << (deg - k);
        }
    }
    Ok(FieldElem {
        k,
        value: prod as u16,
    })
}

/// Multiplicative inverse via a^(2^k - 2); errors on zero.
pub fn fe_inv(a: &FieldElem) -> Result<FieldElem, FieldError> {
    if a.is_zero() {
        return Err(FieldError::DivisionByZero);
    }
    let mut acc = FieldElem::one(a.k)?;
    let mut base = *a;
    let mut exp = (1u32 << a.k) - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = fe_mul(&acc, &base)?;
        }
        base = fe_mul(&base, &base)?;
        exp >>= 1;
    }
    Ok(acc)
}

pub fn fe_div(a: &FieldElem, b: &FieldElem) -> Result<FieldElem, FieldError> {
    fe_mul(a, &fe_inv(b)?)
}

/// Univariate polynomial over GF(2^k), constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    k: u8,
    coeffs: Vec<FieldElem>,
}

impl UniPoly {
    pub fn new(coeffs: Vec<FieldElem>) -> Self {
        assert!(!coeffs.is_empty());
        let k = coeffs[0].k;
        assert!(coeffs.iter().all(|c| c.k == k));
        Self { k, coeffs }
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> FieldElem {
        self.coeffs[0]
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &FieldElem) -> Result<FieldElem, FieldError> {
        let mut acc = FieldElem::zero(self.k)?;
        for c in self.coeffs.iter().rev() {
            acc = fe_mul(&acc, x)?.add(c)?;
        }
        Ok(acc)
    }
}

/// Random polynomial of degree bound `d` with the constant term pinned to
/// `c0` and coefficients 1..=d uniform.
pub fn random_poly_with_constant<R: Rng + ?Sized>(
    c0: FieldElem,
    d: usize,
    rng: &mut R,
) -> UniPoly {
    let mut coeffs = Vec::with_capacity(d + 1);
    coeffs.push(c0);
    for _ in 0..d {
        coeffs.push(FieldElem::random(c0.k, rng).expect("degree already validated"));
    }
    UniPoly::new(coeffs)
}

/// Lagrange evaluation at `x0` of the unique interpolant through `points`.
/// Abscissae must be pairwise distinct.
pub fn interpolate_at(points: &[(FieldElem, FieldElem)], x0: &FieldElem) -> Result<FieldElem, FieldError> {
    if points.is_empty() {
        return Err(FieldError::NotEnoughPoints { have: 0, need: 1 });
    }
    let k = x0.k;
    for (i, (xi, _)) in points.iter().enumerate() {
        for (xj, _) in points.iter().skip(i + 1) {
            if xi == xj {
                return Err(FieldError::DuplicateAbscissa);
            }
        }
    }
    let mut acc = FieldElem::zero(k)?;
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut num = FieldElem::one(k)?;
        let mut den = FieldElem::one(k)?;
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            num = fe_mul(&num, &x0.add(xj)?)?;
            den = fe_mul(&den, &xi.add(xj)?)?;
        }
        let term = fe_mul(yi, &fe_div(&num, &den)?)?;
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

impl std::fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "gf{}:{}", 1u32 << self.k, self.value)
    }
}
