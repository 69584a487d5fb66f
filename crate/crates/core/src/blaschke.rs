//! Finite Blaschke products `B(z) = λ ∏ (|a_j|/-a_j) (z - a_j)/(1 - ā_j z)`.
//!
//! Products are always evaluated factor by factor; expanded polynomial
//! coefficients only appear in the Frostman-shift root finder.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{pseudo_distance, CirclePoint, DiskPoint};

/// Two zeros closer than this (pseudohyperbolically) count as one.
pub const DUPLICATE_TOL: f64 = 1e-13;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// An ordered list of pairwise distinct disk points, at least one long.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<DiskPoint>", into = "Vec<DiskPoint>")]
pub struct ZeroSequence(Vec<DiskPoint>);

impl ZeroSequence {
    pub fn new(points: Vec<DiskPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some((first, second, distance)) = closest_pair_below(&points, DUPLICATE_TOL) {
            return Err(Error::DuplicatePoint {
                first,
                second,
                distance,
            });
        }
        Ok(ZeroSequence(points))
    }

    pub fn from_complex(points: &[Complex64]) -> Result<Self> {
        let pts = points
            .iter()
            .map(|&z| DiskPoint::from_complex(z))
            .collect::<Result<Vec<_>>>()?;
        Self::new(pts)
    }

    pub fn points(&self) -> &[DiskPoint] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> Option<DiskPoint> {
        self.0.get(i).copied()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = DiskPoint> + '_ {
        self.0.iter().copied()
    }

    /// First `n` points (or all of them when `n` is larger).
    pub fn truncate(&self, n: usize) -> Result<Self> {
        Self::new(self.0[..n.min(self.0.len())].to_vec())
    }

    /// `inf_{j≠k} ρ(a_j, a_k)`; 1 for a single point.
    pub fn self_separation(&self) -> f64 {
        let mut best = 1.0_f64;
        for (j, &a) in self.0.iter().enumerate() {
            for &b in &self.0[j + 1..] {
                best = best.min(pseudo_distance(a.z(), b.z()));
            }
        }
        best
    }
}

impl TryFrom<Vec<DiskPoint>> for ZeroSequence {
    type Error = Error;

    fn try_from(points: Vec<DiskPoint>) -> Result<Self> {
        ZeroSequence::new(points)
    }
}

impl From<ZeroSequence> for Vec<DiskPoint> {
    fn from(seq: ZeroSequence) -> Self {
        seq.0
    }
}

fn closest_pair_below(points: &[DiskPoint], tol: f64) -> Option<(usize, usize, f64)> {
    for (j, &a) in points.iter().enumerate() {
        for (k, &b) in points.iter().enumerate().skip(j + 1) {
            let d = pseudo_distance(a.z(), b.z());
            if d < tol {
                return Some((j, k, d));
            }
        }
    }
    None
}

/// The unimodular constant `|a|/(-a)` of a Blaschke factor (1 at the origin).
#[inline]
pub fn factor_phase(a: DiskPoint) -> Complex64 {
    if a.modulus() == 0.0 {
        ONE
    } else {
        -a.unit_direction().conj()
    }
}

/// Single factor `b_a(z) = (|a|/-a)(z - a)/(1 - āz)`.
#[inline]
pub fn blaschke_factor(a: DiskPoint, z: Complex64) -> Complex64 {
    let az = a.z();
    factor_phase(a) * (z - az) / (ONE - az.conj() * z)
}

/// Cauchy kernel `k_a(z) = (1 - |a|²)/(1 - āz)`.
#[inline]
pub fn cauchy_kernel(a: DiskPoint, z: Complex64) -> Complex64 {
    a.one_minus_mod_sq() / (ONE - a.z().conj() * z)
}

/// A finite Blaschke product with rotation `λ ∈ 𝕋`. The zero list may be
/// empty, in which case the product is the constant `λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeProduct {
    zeros: Vec<DiskPoint>,
    rotation: CirclePoint,
}

/// Per-zero Carleson quantities `(1 - |a_n|²)|B'(a_n)|` and their infimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlesonReport {
    pub per_zero: Vec<(usize, f64)>,
    pub delta: f64,
}

impl BlaschkeProduct {
    pub fn new(zeros: ZeroSequence) -> Self {
        Self::with_rotation(zeros, CirclePoint::ONE)
    }

    pub fn with_rotation(zeros: ZeroSequence, rotation: CirclePoint) -> Self {
        BlaschkeProduct {
            zeros: zeros.0,
            rotation,
        }
    }

    pub fn from_points(points: &[Complex64]) -> Result<Self> {
        Ok(Self::new(ZeroSequence::from_complex(points)?))
    }

    pub fn zeros(&self) -> &[DiskPoint] {
        &self.zeros
    }

    /// The zero list as a sequence; `None` for the constant product.
    pub fn zero_sequence(&self) -> Option<ZeroSequence> {
        if self.zeros.is_empty() {
            None
        } else {
            Some(ZeroSequence(self.zeros.clone()))
        }
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn rotation(&self) -> CirclePoint {
        self.rotation
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.zeros
            .iter()
            .fold(self.rotation.z(), |acc, &a| acc * blaschke_factor(a, z))
    }

    /// All factor values `b_k(z)` at once.
    pub fn factors(&self, z: Complex64) -> Vec<Complex64> {
        self.zeros.iter().map(|&a| blaschke_factor(a, z)).collect()
    }

    /// `B_j(z) = B(z)/b_j(z)` for every `j`, via prefix/suffix products so the
    /// result is exact even when `z` is a zero.
    pub fn cofactor_values(&self, z: Complex64) -> Vec<Complex64> {
        cofactor_products(&self.factors(z), self.rotation.z())
    }

    /// Value of the `j`-th cofactor at `z`.
    pub fn cofactor_value(&self, j: usize, z: Complex64) -> Result<Complex64> {
        self.check_index(j)?;
        Ok(self
            .zeros
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .fold(self.rotation.z(), |acc, (_, &a)| {
                acc * blaschke_factor(a, z)
            }))
    }

    /// The product `B_j` with zero `j` removed and the same rotation.
    pub fn cofactor(&self, j: usize) -> Result<BlaschkeProduct> {
        self.check_index(j)?;
        let mut zeros = self.zeros.clone();
        zeros.remove(j);
        Ok(BlaschkeProduct {
            zeros,
            rotation: self.rotation,
        })
    }

    /// `B'(z)`.
    ///
    /// Away from the zeros this is the logarithmic-derivative sum
    /// `B Σ b_k'/b_k`. At `z = a_j` the caller must pass `exclude = Some(j)`,
    /// and the closed form `b_j'(a_j) B_j(a_j)` is used.
    pub fn derivative(&self, z: Complex64, exclude: Option<usize>) -> Result<Complex64> {
        if let Some(j) = exclude {
            self.check_index(j)?;
            let a = self.zeros[j];
            if pseudo_distance(a.z(), z) < DUPLICATE_TOL {
                let dbj = factor_phase(a) / a.one_minus_mod_sq();
                return Ok(dbj * self.cofactor_value(j, a.z())?);
            }
        }
        if let Some(index) = self
            .zeros
            .iter()
            .position(|&a| pseudo_distance(a.z(), z) < DUPLICATE_TOL)
        {
            return Err(Error::EvaluationAtZero { index });
        }
        let log_derivative: Complex64 = self
            .zeros
            .iter()
            .map(|&a| a.one_minus_mod_sq() / ((z - a.z()) * (ONE - a.z().conj() * z)))
            .sum();
        Ok(self.evaluate(z) * log_derivative)
    }

    /// `B'(a_j)` by the cofactor formula.
    pub fn derivative_at_zero(&self, j: usize) -> Result<Complex64> {
        self.check_index(j)?;
        self.derivative(self.zeros[j].z(), Some(j))
    }

    pub fn carleson(&self) -> CarlesonReport {
        let per_zero: Vec<(usize, f64)> = (0..self.degree())
            .map(|j| {
                let d = self.derivative_at_zero(j).expect("index in range");
                (j, self.zeros[j].one_minus_mod_sq() * d.norm())
            })
            .collect();
        let delta = per_zero.iter().map(|&(_, q)| q).fold(1.0_f64, f64::min);
        CarlesonReport { per_zero, delta }
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j >= self.zeros.len() {
            return Err(Error::IndexOutOfRange {
                index: j,
                len: self.zeros.len(),
            });
        }
        Ok(())
    }
}

/// `scale · ∏_{k≠j} values[k]` for every `j`.
pub(crate) fn cofactor_products(values: &[Complex64], scale: Complex64) -> Vec<Complex64> {
    let n = values.len();
    let mut out = vec![scale; n];
    let mut prefix = ONE;
    for j in 0..n {
        out[j] *= prefix;
        prefix *= values[j];
    }
    let mut suffix = ONE;
    for j in (0..n).rev() {
        out[j] *= suffix;
        suffix *= values[j];
    }
    out
}
