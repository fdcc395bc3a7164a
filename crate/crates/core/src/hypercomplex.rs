//! Quaternion and octonion vector algebra.
//!
//! A hypercomplex *vector* of dimension `k` is stored as `N` parallel real
//! coordinate vectors (`N = 4` for quaternions, `N = 8` for octonions), one per
//! basis unit. Every operation is applied dimension-wise, so the product of two
//! quaternion vectors is `k` independent Hamilton products.
//!
//! Both algebras use the basis `e0 = 1, e1, .., e(N-1)` in which the product of
//! two units is always `±e(i xor j)`. Only the signs need a table. For
//! quaternions `e1, e2, e3` are `i, j, k`.
//!
//! The octonion table is the one obtained by reading each coefficient row of
//! the Fano-plane product by its `x0 * y_n` term; with it `e1 e2 = e3` and the
//! quaternion table is its `{1, e1, e2, e3}` sub-block.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Default guard for normalisation: norms at or below this are degenerate.
pub const DEFAULT_EPS: f64 = 1e-12;

/// Sign table of a Cayley-Dickson style algebra with `N` units.
///
/// `signs[i][j]` is the sign of `e_i * e_j`, whose unit is `e_(i ^ j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MulTable<const N: usize> {
    signs: [[i8; N]; N],
}

/// Hamilton's rules: `i² = j² = k² = ijk = -1`.
pub const HAMILTON: MulTable<4> = MulTable {
    signs: [
        [1, 1, 1, 1],
        [1, -1, 1, -1],
        [1, -1, -1, 1],
        [1, 1, -1, -1],
    ],
};

/// Octonion (Cayley algebra) multiplication signs.
pub const CAYLEY: MulTable<8> = MulTable {
    signs: [
        [1, 1, 1, 1, 1, 1, 1, 1],
        [1, -1, 1, -1, 1, -1, -1, 1],
        [1, -1, -1, 1, 1, 1, -1, -1],
        [1, 1, -1, -1, 1, -1, 1, -1],
        [1, -1, -1, -1, -1, 1, 1, 1],
        [1, 1, -1, 1, -1, -1, -1, 1],
        [1, 1, 1, -1, -1, 1, -1, -1],
        [1, -1, 1, 1, -1, -1, 1, -1],
    ],
};

impl<const N: usize> MulTable<N> {
    /// `e_i * e_j` as `(sign, unit index)`.
    #[inline]
    pub fn unit_product(&self, i: usize, j: usize) -> (f64, usize) {
        (f64::from(self.signs[i][j]), i ^ j)
    }

    /// Product of two single hypercomplex numbers.
    #[inline]
    pub fn mul(&self, x: &[f64; N], y: &[f64; N]) -> [f64; N] {
        let mut out = [0.0; N];
        for i in 0..N {
            for j in 0..N {
                out[i ^ j] += f64::from(self.signs[i][j]) * x[i] * y[j];
            }
        }
        out
    }

    /// Gradient of `g · (x ⊗ y)` with respect to `x`.
    #[inline]
    pub fn left_grad(&self, y: &[f64; N], g: &[f64; N]) -> [f64; N] {
        let mut out = [0.0; N];
        for i in 0..N {
            let mut acc = 0.0;
            for j in 0..N {
                acc += f64::from(self.signs[i][j]) * y[j] * g[i ^ j];
            }
            out[i] = acc;
        }
        out
    }

    /// Gradient of `g · (x ⊗ y)` with respect to `y`.
    #[inline]
    pub fn right_grad(&self, x: &[f64; N], g: &[f64; N]) -> [f64; N] {
        let mut out = [0.0; N];
        for j in 0..N {
            let mut acc = 0.0;
            for i in 0..N {
                acc += f64::from(self.signs[i][j]) * x[i] * g[i ^ j];
            }
            out[j] = acc;
        }
        out
    }
}

#[inline]
pub fn dot<const N: usize>(x: &[f64; N], y: &[f64; N]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[inline]
pub fn modulus<const N: usize>(x: &[f64; N]) -> f64 {
    libm::sqrt(dot(x, x))
}

#[inline]
pub fn conj<const N: usize>(x: &[f64; N]) -> [f64; N] {
    let mut out = [0.0; N];
    out[0] = x[0];
    for c in 1..N {
        out[c] = -x[c];
    }
    out
}

/// `N` parallel coordinate vectors sharing one dimension `k >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperVector<const N: usize> {
    parts: [Vec<f64>; N],
}

pub type QuaternionVector = HyperVector<4>;
pub type OctonionVector = HyperVector<8>;

impl<const N: usize> HyperVector<N> {
    pub fn new(parts: [Vec<f64>; N]) -> Result<Self> {
        let k = parts[0].len();
        if k == 0 {
            return Err(Error::EmptyVector);
        }
        for (unit, part) in parts.iter().enumerate() {
            if part.len() != k {
                return Err(Error::RaggedParts {
                    expected: k,
                    found: part.len(),
                });
            }
            if let Some(dimension) = part.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteCoordinate { unit, dimension });
            }
        }
        Ok(Self { parts })
    }

    /// Builds a vector from per-dimension hypercomplex numbers.
    pub fn from_elements(elements: &[[f64; N]]) -> Result<Self> {
        let parts = core::array::from_fn(|c| elements.iter().map(|e| e[c]).collect());
        Self::new(parts)
    }

    /// A `k = 1` vector holding a single hypercomplex number.
    pub fn scalar(element: [f64; N]) -> Result<Self> {
        Self::from_elements(&[element])
    }

    pub fn dim(&self) -> usize {
        self.parts[0].len()
    }

    pub fn part(&self, unit: usize) -> &[f64] {
        &self.parts[unit]
    }

    pub fn parts(&self) -> &[Vec<f64>; N] {
        &self.parts
    }

    pub fn into_parts(self) -> [Vec<f64>; N] {
        self.parts
    }

    /// The hypercomplex number stored at dimension `d`.
    #[inline]
    pub fn element(&self, d: usize) -> [f64; N] {
        core::array::from_fn(|c| self.parts[c][d])
    }

    pub fn elements(&self) -> impl Iterator<Item = [f64; N]> + '_ {
        (0..self.dim()).map(move |d| self.element(d))
    }

    fn from_fn_unchecked(k: usize, mut f: impl FnMut(usize) -> [f64; N]) -> Self {
        let mut parts: [Vec<f64>; N] = core::array::from_fn(|_| Vec::with_capacity(k));
        for d in 0..k {
            let e = f(d);
            for c in 0..N {
                parts[c].push(e[c]);
            }
        }
        Self { parts }
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    /// Dimension-wise product under the given multiplication table.
    pub fn product(&self, other: &Self, table: &MulTable<N>) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self::from_fn_unchecked(self.dim(), |d| {
            table.mul(&self.element(d), &other.element(d))
        }))
    }

    pub fn conjugate(&self) -> Self {
        let mut parts = self.parts.clone();
        for part in parts.iter_mut().skip(1) {
            part.iter_mut().for_each(|v| *v = -*v);
        }
        Self { parts }
    }

    /// Per-dimension modulus.
    pub fn norms(&self) -> Vec<f64> {
        self.elements().map(|e| modulus(&e)).collect()
    }

    /// Divides every dimension by its modulus.
    ///
    /// Fails on the first dimension whose modulus is `<= eps`.
    pub fn normalized(&self, eps: f64) -> Result<Self> {
        let norms = self.norms();
        if let Some((dimension, &norm)) = norms.iter().enumerate().find(|(_, &n)| n <= eps) {
            return Err(Error::Degenerate { dimension, norm });
        }
        let mut parts = self.parts.clone();
        for part in parts.iter_mut() {
            part.iter_mut().zip(&norms).for_each(|(v, n)| *v /= n);
        }
        Ok(Self { parts })
    }

    /// Sum of the `N` coordinate-wise inner products.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_same_dim(other)?;
        Ok(self
            .parts
            .iter()
            .zip(&other.parts)
            .map(|(x, y)| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>())
            .sum())
    }
}

impl QuaternionVector {
    /// Dimension-wise Hamilton product `self ⊗ rhs`.
    pub fn hamilton(&self, rhs: &Self) -> Result<Self> {
        self.check_same_dim(rhs)?;
        let [a1, b1, c1, d1] = &self.parts;
        let [a2, b2, c2, d2] = &rhs.parts;
        let k = self.dim();
        let mut out: [Vec<f64>; 4] = core::array::from_fn(|_| Vec::with_capacity(k));
        for n in 0..k {
            out[0].push(a1[n] * a2[n] - b1[n] * b2[n] - c1[n] * c2[n] - d1[n] * d2[n]);
            out[1].push(a1[n] * b2[n] + b1[n] * a2[n] + c1[n] * d2[n] - d1[n] * c2[n]);
            out[2].push(a1[n] * c2[n] - b1[n] * d2[n] + c1[n] * a2[n] + d1[n] * b2[n]);
            out[3].push(a1[n] * d2[n] + b1[n] * c2[n] - c1[n] * b2[n] + d1[n] * a2[n]);
        }
        Ok(Self { parts: out })
    }
}

pub fn hamilton_product(q1: &QuaternionVector, q2: &QuaternionVector) -> Result<QuaternionVector> {
    q1.hamilton(q2)
}

pub fn conjugate(q: &QuaternionVector) -> QuaternionVector {
    q.conjugate()
}

pub fn qnorm(q: &QuaternionVector) -> Vec<f64> {
    q.norms()
}

pub fn normalize(q: &QuaternionVector, eps: f64) -> Result<QuaternionVector> {
    q.normalized(eps)
}

pub fn quat_inner(q1: &QuaternionVector, q2: &QuaternionVector) -> Result<f64> {
    q1.inner(q2)
}

pub fn octonion_product(o1: &OctonionVector, o2: &OctonionVector) -> Result<OctonionVector> {
    o1.product(o2, &CAYLEY)
}

pub fn octonion_conjugate(o: &OctonionVector) -> OctonionVector {
    o.conjugate()
}

pub fn octonion_norm(o: &OctonionVector) -> Vec<f64> {
    o.norms()
}

pub fn octonion_normalize(o: &OctonionVector, eps: f64) -> Result<OctonionVector> {
    o.normalized(eps)
}
