//! Pseudohyperbolic geometry of the unit disk.
//!
//! All formulas are written to avoid cancellation near the boundary:
//! `1 - |z|²` is always formed as `(1 - |z|)(1 + |z|)` and `1 - ρ²` is taken
//! from the product identity rather than from `ρ` itself.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points with modulus at or beyond `1 - BOUNDARY_GUARD` are rejected.
pub const BOUNDARY_GUARD: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct RawPoint {
    re: f64,
    im: f64,
}

/// A point of the open unit disk, kept strictly away from the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint", into = "RawPoint")]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint(Complex64::new(0.0, 0.0));

    pub fn new(re: f64, im: f64) -> Result<Self> {
        Self::from_complex(Complex64::new(re, im))
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() >= 1.0 - BOUNDARY_GUARD {
            return Err(Error::OutsideDisk { re: z.re, im: z.im });
        }
        Ok(DiskPoint(z))
    }

    /// Real point `x` of the disk.
    pub fn real(x: f64) -> Result<Self> {
        Self::new(x, 0.0)
    }

    pub fn polar(modulus: f64, arg: f64) -> Result<Self> {
        Self::from_complex(Complex64::from_polar(modulus, arg))
    }

    #[inline]
    pub fn z(self) -> Complex64 {
        self.0
    }

    #[inline]
    pub fn re(self) -> f64 {
        self.0.re
    }

    #[inline]
    pub fn im(self) -> f64 {
        self.0.im
    }

    #[inline]
    pub fn modulus(self) -> f64 {
        self.0.norm()
    }

    /// `1 - |z|²`, computed without cancellation.
    #[inline]
    pub fn one_minus_mod_sq(self) -> f64 {
        one_minus_mod_sq(self.0)
    }

    /// The unimodular factor `|z|/z`, taken to be 1 at the origin.
    pub fn unit_direction(self) -> Complex64 {
        let m = self.modulus();
        if m == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            self.0 / m
        }
    }
}

impl TryFrom<RawPoint> for DiskPoint {
    type Error = Error;

    fn try_from(raw: RawPoint) -> Result<Self> {
        DiskPoint::new(raw.re, raw.im)
    }
}

impl From<DiskPoint> for RawPoint {
    fn from(p: DiskPoint) -> Self {
        RawPoint {
            re: p.re(),
            im: p.im(),
        }
    }
}

impl From<DiskPoint> for Complex64 {
    fn from(p: DiskPoint) -> Self {
        p.0
    }
}

/// A point of the unit circle, stored by its argument in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirclePoint {
    arg: f64,
}

impl CirclePoint {
    pub const ONE: CirclePoint = CirclePoint { arg: 0.0 };

    pub fn new(arg: f64) -> Self {
        let mut arg = arg.rem_euclid(TAU);
        // rem_euclid can round up to exactly 2π for tiny negative inputs
        if arg >= TAU {
            arg = 0.0;
        }
        CirclePoint { arg }
    }

    #[inline]
    pub fn arg(self) -> f64 {
        self.arg
    }

    #[inline]
    pub fn z(self) -> Complex64 {
        let (s, c) = self.arg.sin_cos();
        Complex64::new(c, s)
    }
}

impl Default for CirclePoint {
    fn default() -> Self {
        CirclePoint::ONE
    }
}

/// A Euclidean disk `D(center, radius)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EuclideanDisk {
    pub center: Complex64,
    pub radius: f64,
}

impl EuclideanDisk {
    /// Boundary point at angle `t`.
    pub fn boundary_point(&self, t: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, t)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() <= self.radius
    }
}

/// `1 - |z|²` without cancellation.
#[inline]
pub fn one_minus_mod_sq(z: Complex64) -> f64 {
    let m = z.norm();
    (1.0 - m) * (1.0 + m)
}

/// Pseudohyperbolic distance for raw complex numbers.
#[inline]
pub fn pseudo_distance(a: Complex64, z: Complex64) -> f64 {
    let den = (Complex64::new(1.0, 0.0) - a.conj() * z).norm();
    ((z - a).norm() / den).min(1.0)
}

/// `1 - ρ(a, z)²` from the identity `(1-|a|²)(1-|z|²)/|1-āz|²`.
#[inline]
pub fn one_minus_pseudo_sq(a: Complex64, z: Complex64) -> f64 {
    let den = (Complex64::new(1.0, 0.0) - a.conj() * z).norm_sqr();
    one_minus_mod_sq(a) * one_minus_mod_sq(z) / den
}

/// `ρ(a, z) = |(z - a)/(1 - āz)|`.
pub fn rho(a: DiskPoint, z: DiskPoint) -> f64 {
    pseudo_distance(a.0, z.0)
}

/// `1 - ρ(a, z)`, stable when the points are far apart.
pub fn one_minus_rho(a: DiskPoint, z: DiskPoint) -> f64 {
    let r = rho(a, z);
    one_minus_pseudo_sq(a.0, z.0) / (1.0 + r)
}

/// Hyperbolic distance `½ log((1+ρ)/(1-ρ)) = artanh ρ`.
pub fn beta(a: DiskPoint, z: DiskPoint) -> f64 {
    let r = rho(a, z);
    // (1+ρ)/(1-ρ) = (1+ρ)²/(1-ρ²)
    let one_minus = one_minus_pseudo_sq(a.0, z.0);
    if one_minus <= 0.0 {
        return f64::INFINITY;
    }
    0.5 * ((1.0 + r) * (1.0 + r) / one_minus).ln()
}

/// The involutive automorphism `φ_a(z) = (a - z)/(1 - āz)`.
pub fn mobius(a: DiskPoint, z: DiskPoint) -> DiskPoint {
    let w = mobius_c(a.0, z.0);
    // φ_a maps 𝔻 onto 𝔻; rounding can only push |w| up by an ulp
    DiskPoint::from_complex(w).unwrap_or_else(|_| {
        let m = w.norm();
        DiskPoint(w * ((1.0 - 2.0 * BOUNDARY_GUARD) / m))
    })
}

#[inline]
pub(crate) fn mobius_c(a: Complex64, z: Complex64) -> Complex64 {
    (a - z) / (Complex64::new(1.0, 0.0) - a.conj() * z)
}

/// Euclidean image of the pseudohyperbolic disk `{w : ρ(c, w) < r}`.
///
/// For `c = t ≥ 0` the center is `(1-r²)t/(1-r²t²)` and the radius
/// `r(1-t²)/(1-r²t²)`; general centers are handled by rotating through
/// `c/|c|`, which preserves `ρ`.
pub fn pseudo_disk_to_euclidean(c: DiskPoint, r: f64) -> Result<EuclideanDisk> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "pseudohyperbolic radius must lie in (0, 1), got {r}"
        )));
    }
    let t = c.modulus();
    let r2 = r * r;
    let den = 1.0 - r2 * t * t;
    let p = (1.0 - r2) * t / den;
    let radius = r * c.one_minus_mod_sq() / den;
    let dir = if t == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        c.0 / t
    };
    Ok(EuclideanDisk {
        center: dir * p,
        radius,
    })
}

/// Worst slacks of the kernel-size estimates for a pair of sequences whose
/// mutual hyperbolic distances are bounded by `r`.
///
/// Slacks are relative (`(rhs - lhs) / max(1, |rhs|)`), so a negative entry
/// means the inequality failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelBoundsReport {
    pub s: f64,
    /// `1 - s ≤ (1 - s|z_k|)/(1 - |z_k|²)`
    pub lower_z: f64,
    /// `(1 - s|z_k|)/(1 - |z_k|²) ≤ 1/|1 - ā_j z_k|`
    pub upper_z: f64,
    /// `(1 - s|a_j|)/(1 - |a_j|²) ≤ 1/|1 - ā_j z_k|`
    pub upper_a: f64,
    /// `(1 - |z_k|²)/|1 - ā_j z_k| ≥ 1 - s`
    pub kernel_z: f64,
    /// `(1 - |a_j|²)/|1 - ā_j z_k| ≥ 1 - s`
    pub kernel_a: f64,
}

impl KernelBoundsReport {
    pub fn worst(&self) -> f64 {
        self.lower_z
            .min(self.upper_z)
            .min(self.upper_a)
            .min(self.kernel_z)
            .min(self.kernel_a)
    }
}

const KERNEL_BOUNDS_TOL: f64 = 1e-12;

pub fn kernel_bounds_check(a: &[DiskPoint], z: &[DiskPoint], r: f64) -> Result<KernelBoundsReport> {
    if a.is_empty() || z.is_empty() {
        return Err(Error::EmptySequence);
    }
    let sup_beta = a
        .iter()
        .flat_map(|&aj| z.iter().map(move |&zk| beta(aj, zk)))
        .fold(0.0_f64, f64::max);
    if sup_beta > r * (1.0 + 1e-12) + 1e-15 {
        return Err(Error::InvalidArgument(format!(
            "sup of hyperbolic distances {sup_beta} exceeds r = {r}"
        )));
    }
    let s = r.tanh();
    let slack = |lhs: f64, rhs: f64| (rhs - lhs) / rhs.abs().max(1.0);

    let mut report = KernelBoundsReport {
        s,
        lower_z: f64::INFINITY,
        upper_z: f64::INFINITY,
        upper_a: f64::INFINITY,
        kernel_z: f64::INFINITY,
        kernel_a: f64::INFINITY,
    };
    for &aj in a {
        let a_term = (1.0 - s * aj.modulus()) / aj.one_minus_mod_sq();
        for &zk in z {
            let cross = (Complex64::new(1.0, 0.0) - aj.z().conj() * zk.z()).norm();
            let z_term = (1.0 - s * zk.modulus()) / zk.one_minus_mod_sq();
            report.lower_z = report.lower_z.min(slack(1.0 - s, z_term));
            report.upper_z = report.upper_z.min(slack(z_term, 1.0 / cross));
            report.upper_a = report.upper_a.min(slack(a_term, 1.0 / cross));
            report.kernel_z = report
                .kernel_z
                .min(slack(1.0 - s, zk.one_minus_mod_sq() / cross));
            report.kernel_a = report
                .kernel_a
                .min(slack(1.0 - s, aj.one_minus_mod_sq() / cross));
        }
    }
    let worst = report.worst();
    if worst < -KERNEL_BOUNDS_TOL {
        return Err(Error::PrecisionViolation {
            what: "kernel size estimates".into(),
            excess: -worst,
        });
    }
    Ok(report)
}
