//! Interpolation on the union of the zero sets of two Blaschke products.
//!
//! With `A = zeros(B)` and `Z = zeros(C)`, the interpolant in `K_{BC}` is
//! assembled as `G = G₁ + G₂`, where
//!
//! ```text
//! G₁(z) = Σ_j conj(γ̃_{2j-1}) · c_j · B_j(z) · C(z) · k_{a_j}(z)
//! G₂(z) = Σ_j conj(γ̃_{2j})   · d_j · C_j(z) · B(z) · k_{z_j}(z)
//! ```
//!
//! `c_j, d_j` are the factor phases of `a_j, z_j` and
//! `γ̃_{2j-1} = c_j · conj(α_j′)/conj(B_j(a_j))` with `α_j′ = α_j/C(a_j)`
//! (similarly for `β`). `G₁` carries the factor `C` and vanishes on `Z`;
//! `G₂` carries `B` and vanishes on `A`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DiskFunction, TargetVector};
use crate::blaschke::{cauchy_kernel, factor_phase, BlaschkeProduct, DUPLICATE_TOL};
use crate::error::{Error, Result};
use crate::geometry::{pseudo_distance, DiskPoint};

/// Below this cross separation the normalization by `C(a_j)` and `B(z_j)`
/// loses all precision.
pub const MIN_UNION_SEPARATION: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnionConstruction {
    b: BlaschkeProduct,
    c: BlaschkeProduct,
    alpha: TargetVector,
    beta: TargetVector,
    /// `[γ̃₁, γ̃₂, …]`, odd positions paired with `a_j`, even with `z_j`.
    tilde_gamma: Vec<Complex64>,
    separation: f64,
}

pub fn interpolate_union(
    b: &BlaschkeProduct,
    c: &BlaschkeProduct,
    alpha: &TargetVector,
    beta: &TargetVector,
) -> Result<UnionConstruction> {
    let n = b.degree();
    if n == 0 || c.degree() == 0 {
        return Err(Error::EmptySequence);
    }
    if c.degree() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: c.degree(),
        });
    }
    for t in [alpha, beta] {
        if t.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: t.len(),
            });
        }
    }

    let mut separation = f64::INFINITY;
    for (j, a) in b.zeros().iter().enumerate() {
        for z in c.zeros() {
            let d = pseudo_distance(a.z(), z.z());
            if d < DUPLICATE_TOL {
                return Err(Error::ZeroCollision { index: j });
            }
            separation = separation.min(d);
        }
    }
    if separation < MIN_UNION_SEPARATION {
        return Err(Error::SeparationTooSmall { separation });
    }

    let mut tilde_gamma = Vec::with_capacity(2 * n);
    for j in 0..n {
        let (a, z) = (b.zeros()[j], c.zeros()[j]);
        let alpha_n = alpha.values()[j] / c.evaluate(a.z());
        let beta_n = beta.values()[j] / b.evaluate(z.z());
        tilde_gamma.push(tilde(a, alpha_n, b.cofactor_value(j, a.z())?));
        tilde_gamma.push(tilde(z, beta_n, c.cofactor_value(j, z.z())?));
    }

    Ok(UnionConstruction {
        b: b.clone(),
        c: c.clone(),
        alpha: alpha.clone(),
        beta: beta.clone(),
        tilde_gamma,
        separation,
    })
}

fn tilde(p: DiskPoint, gamma: Complex64, cofactor_at_node: Complex64) -> Complex64 {
    factor_phase(p) * gamma.conj() / cofactor_at_node.conj()
}

/// `Σ_j conj(γ̃_j) · phase_j · P_j(z) · k_{p_j}(z)` over one half of `γ̃`.
fn half_sum(
    p: &BlaschkeProduct,
    tilde: impl Iterator<Item = Complex64>,
    z: Complex64,
) -> Complex64 {
    p.cofactor_values(z)
        .into_iter()
        .zip(p.zeros())
        .zip(tilde)
        .map(|((cof, &q), t)| t.conj() * factor_phase(q) * cof * cauchy_kernel(q, z))
        .sum()
}

impl UnionConstruction {
    pub fn b(&self) -> &BlaschkeProduct {
        &self.b
    }

    pub fn c(&self) -> &BlaschkeProduct {
        &self.c
    }

    pub fn alpha(&self) -> &TargetVector {
        &self.alpha
    }

    pub fn beta(&self) -> &TargetVector {
        &self.beta
    }

    pub fn tilde_gamma(&self) -> &[Complex64] {
        &self.tilde_gamma
    }

    /// `inf_{j,k} ρ(a_j, z_k)`.
    pub fn separation(&self) -> f64 {
        self.separation
    }

    /// `sup_j |γ_j|` over both target vectors.
    pub fn target_norm(&self) -> f64 {
        self.alpha.sup_norm().max(self.beta.sup_norm())
    }

    pub fn g1(&self, z: Complex64) -> Complex64 {
        let tilde = self.tilde_gamma.iter().step_by(2).copied();
        self.c.evaluate(z) * half_sum(&self.b, tilde, z)
    }

    pub fn g2(&self, z: Complex64) -> Complex64 {
        let tilde = self.tilde_gamma.iter().skip(1).step_by(2).copied();
        self.b.evaluate(z) * half_sum(&self.c, tilde, z)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.g1(z) + self.g2(z)
    }

    /// The product `BC` with zeros interleaved as `[a₁, z₁, a₂, z₂, …]`.
    pub fn merged_product(&self) -> Result<BlaschkeProduct> {
        let points: Vec<Complex64> = self
            .b
            .zeros()
            .iter()
            .zip(self.c.zeros())
            .flat_map(|(a, z)| [a.z(), z.z()])
            .collect();
        BlaschkeProduct::from_points(&points)
    }
}

impl DiskFunction for UnionConstruction {
    fn eval(&self, z: Complex64) -> Complex64 {
        UnionConstruction::eval(self, z)
    }

    fn hint_args(&self) -> Vec<f64> {
        self.b
            .zeros()
            .iter()
            .chain(self.c.zeros())
            .map(|p| p.z().arg())
            .collect()
    }
}
