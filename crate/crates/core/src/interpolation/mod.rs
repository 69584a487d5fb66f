//! Interpolation in the model space `K_B` of a finite Blaschke product.
//!
//! For `B` of degree `N` with distinct zeros, `K_B` is spanned by the Cauchy
//! kernels `k_{a_j}` and the interpolant of any target vector is unique. It
//! is built in Lagrange form
//!
//! ```text
//! f(z) = Σ_j α_j · B_j(z)/B_j(a_j) · (1 - |a_j|²)/(1 - ā_j z)
//! ```
//!
//! and cross-checked against the kernel expansion `Σ c_j k_{a_j}` obtained
//! from a dense linear solve.

mod nearby;
mod shift;
mod union;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::{blaschke_factor, cauchy_kernel, cofactor_products, BlaschkeProduct};
use crate::criteria::{circle_sup, CircleGrid};
use crate::error::{Error, Result};
use crate::geometry::DiskPoint;

pub use nearby::{nearby_iterate, nearby_iterate_with_grid, IterationTrace};
pub use shift::{frostman_shift_zeros, SHIFT_DEGREE_CAP};
pub use union::{interpolate_union, UnionConstruction, MIN_UNION_SEPARATION};

/// Relative residual above which the kernel cross-check is abandoned.
pub const KERNEL_RESIDUAL_TOL: f64 = 1e-6;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Interpolation targets, index-aligned with a zero sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TargetVector(Vec<Complex64>);

impl TargetVector {
    pub fn new(values: Vec<Complex64>) -> Self {
        TargetVector(values)
    }

    pub fn real(values: &[f64]) -> Self {
        TargetVector(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn constant(value: Complex64, len: usize) -> Self {
        TargetVector(vec![value; len])
    }

    /// The `j`-th unit vector of length `len`.
    pub fn basis(j: usize, len: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); len];
        v[j] = ONE;
        TargetVector(v)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `max_j |α_j|` (0 for an empty vector).
    pub fn sup_norm(&self) -> f64 {
        self.0.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        TargetVector(self.0.iter().map(|&v| v * c).collect())
    }
}

impl From<Vec<Complex64>> for TargetVector {
    fn from(values: Vec<Complex64>) -> Self {
        TargetVector(values)
    }
}

/// Something that can be evaluated on the closed disk.
pub trait DiskFunction {
    fn eval(&self, z: Complex64) -> Complex64;

    /// Circle arguments where the modulus is likely to peak.
    fn hint_args(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Lagrange basis `L_j = B_j/B_j(a_j) · k_{a_j}` of `K_B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct LagrangeBasis {
    zeros: Vec<DiskPoint>,
    /// `1/B_j(a_j)` with the rotation left out; it cancels in `L_j`.
    inv_cofactor_at_node: Vec<Complex64>,
}

impl LagrangeBasis {
    pub(crate) fn new(b: &BlaschkeProduct) -> Result<Self> {
        if b.degree() == 0 {
            return Err(Error::EmptySequence);
        }
        let zeros = b.zeros().to_vec();
        let inv_cofactor_at_node = zeros
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let factors: Vec<Complex64> =
                    zeros.iter().map(|&q| blaschke_factor(q, a.z())).collect();
                ONE / cofactor_products(&factors, ONE)[j]
            })
            .collect();
        Ok(LagrangeBasis {
            zeros,
            inv_cofactor_at_node,
        })
    }

    /// `[L_1(z), …, L_N(z)]`.
    pub(crate) fn values(&self, z: Complex64) -> Vec<Complex64> {
        let factors: Vec<Complex64> = self.zeros.iter().map(|&a| blaschke_factor(a, z)).collect();
        let cof = cofactor_products(&factors, ONE);
        self.zeros
            .iter()
            .zip(cof)
            .zip(&self.inv_cofactor_at_node)
            .map(|((&a, c), &inv)| c * inv * cauchy_kernel(a, z))
            .collect()
    }

    pub(crate) fn combine(&self, coeffs: &[Complex64], z: Complex64) -> Complex64 {
        self.values(z).iter().zip(coeffs).map(|(l, c)| l * c).sum()
    }
}

/// The unique `f ∈ K_B` with prescribed values at the zeros of `B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolantRep {
    space: BlaschkeProduct,
    lagrange_coeffs: TargetVector,
    kernel_coeffs: Option<Vec<Complex64>>,
    kernel_residual: f64,
    #[serde(skip_serializing, default = "empty_basis")]
    basis: Option<LagrangeBasis>,
}

fn empty_basis() -> Option<LagrangeBasis> {
    None
}

impl InterpolantRep {
    pub(crate) fn lagrange_only(
        space: BlaschkeProduct,
        basis: LagrangeBasis,
        alpha: TargetVector,
    ) -> Self {
        InterpolantRep {
            space,
            lagrange_coeffs: alpha,
            kernel_coeffs: None,
            kernel_residual: f64::NAN,
            basis: Some(basis),
        }
    }

    pub fn space(&self) -> &BlaschkeProduct {
        &self.space
    }

    /// Values at the zeros of `B` (the Lagrange coefficients).
    pub fn lagrange_coeffs(&self) -> &TargetVector {
        &self.lagrange_coeffs
    }

    /// Coefficients `c_j` of `Σ c_j k_{a_j}`, when the cross-check ran.
    pub fn kernel_coeffs(&self) -> Option<&[Complex64]> {
        self.kernel_coeffs.as_deref()
    }

    /// Max-norm residual of the kernel system (NaN when it was not solved).
    pub fn kernel_residual(&self) -> f64 {
        self.kernel_residual
    }

    pub fn is_ill_conditioned(&self) -> bool {
        self.kernel_coeffs.is_none()
    }

    /// The kernel coefficients, or `IllConditioned` when the cross-check was
    /// skipped.
    pub fn cross_check(&self) -> Result<&[Complex64]> {
        self.kernel_coeffs.as_deref().ok_or(Error::IllConditioned {
            residual: self.kernel_residual,
        })
    }

    fn basis(&self) -> LagrangeBasis {
        match &self.basis {
            Some(b) => b.clone(),
            None => LagrangeBasis::new(&self.space).expect("interpolant space has zeros"),
        }
    }

    /// Lagrange-form value at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match &self.basis {
            Some(b) => b.combine(self.lagrange_coeffs.values(), z),
            None => self.basis().combine(self.lagrange_coeffs.values(), z),
        }
    }

    /// Kernel-form value at `z`, when available.
    pub fn eval_kernel(&self, z: Complex64) -> Option<Complex64> {
        let c = self.kernel_coeffs.as_ref()?;
        Some(
            self.space
                .zeros()
                .iter()
                .zip(c)
                .map(|(&a, &cj)| cj * cauchy_kernel(a, z))
                .sum(),
        )
    }

    pub fn eval_many(&self, zs: &[Complex64]) -> Vec<Complex64> {
        let basis = self.basis();
        zs.iter()
            .map(|&z| basis.combine(self.lagrange_coeffs.values(), z))
            .collect()
    }
}

impl DiskFunction for InterpolantRep {
    fn eval(&self, z: Complex64) -> Complex64 {
        InterpolantRep::eval(self, z)
    }

    fn hint_args(&self) -> Vec<f64> {
        self.space.zeros().iter().map(|a| a.z().arg()).collect()
    }
}

/// Build the `K_B` interpolant of `alpha` in Lagrange form, and solve the
/// kernel system `Σ_j c_j (1-|a_j|²)/(1-ā_j a_k) = α_k` as a cross-check.
pub fn solve_kb(b: &BlaschkeProduct, alpha: &TargetVector) -> Result<InterpolantRep> {
    let n = b.degree();
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    if alpha.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: alpha.len(),
        });
    }
    let basis = LagrangeBasis::new(b)?;
    let mut rep = InterpolantRep::lagrange_only(b.clone(), basis, alpha.clone());

    let zeros = b.zeros();
    let kernel = DMatrix::from_fn(n, n, |k, j| cauchy_kernel(zeros[j], zeros[k].z()));
    let rhs = nalgebra::DVector::from_column_slice(alpha.values());
    if let Some(c) = kernel.clone().lu().solve(&rhs) {
        let residual = (&kernel * &c - &rhs)
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        rep.kernel_residual = residual;
        if residual.is_finite() && residual <= KERNEL_RESIDUAL_TOL * alpha.sup_norm() {
            rep.kernel_coeffs = Some(c.iter().copied().collect());
        }
    } else {
        rep.kernel_residual = f64::INFINITY;
    }
    Ok(rep)
}

/// Grid-refined estimate of `sup_{ζ∈𝕋} |f(ζ)|`.
pub fn sup_norm<F: DiskFunction + Sync>(f: &F, grid: &CircleGrid) -> Result<f64> {
    grid.validate()?;
    let grid = grid.with_extra_args(f.hint_args());
    Ok(circle_sup(|t| f.eval(Complex64::from_polar(1.0, t)).norm(), &grid).value)
}

/// `M = sup_{ζ∈𝕋} Σ_j |L_j(ζ)|`, the norm of the interpolation map
/// `ℓ∞ → (K_B, ‖·‖_∞)`, clamped below at 1.
pub fn lebesgue_constant(b: &BlaschkeProduct, grid: &CircleGrid) -> Result<f64> {
    grid.validate()?;
    let basis = LagrangeBasis::new(b)?;
    let grid = grid.with_extra_args(b.zeros().iter().map(|a| a.z().arg()));
    let m = circle_sup(
        |t| {
            basis
                .values(Complex64::from_polar(1.0, t))
                .iter()
                .map(|l| l.norm())
                .sum()
        },
        &grid,
    );
    Ok(m.value.max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::ZeroSequence;
    use crate::geometry::rho;
    use crate::sequences::{random_sequence, RngSeed};
    use proptest::prelude::*;
    use rand::Rng;
    use std::f64::consts::TAU;

    fn product(points: &[(f64, f64)]) -> BlaschkeProduct {
        let pts: Vec<Complex64> = points.iter().map(|&(x, y)| Complex64::new(x, y)).collect();
        BlaschkeProduct::from_points(&pts).unwrap()
    }

    fn circle(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64))
            .collect()
    }

    fn random_targets(n: usize, seed: u64) -> TargetVector {
        let mut rng = RngSeed(seed).rng();
        TargetVector::new(
            (0..n)
                .map(|_| {
                    Complex64::new(
                        rng.random::<f64>() * 2.0 - 1.0,
                        rng.random::<f64>() * 2.0 - 1.0,
                    )
                })
                .collect(),
        )
    }

    #[test]
    fn degree_one_at_origin_gives_constants() {
        let b = product(&[(0.0, 0.0)]);
        let c = Complex64::new(0.3, -2.0);
        let f = solve_kb(&b, &TargetVector::new(vec![c])).unwrap();
        for z in circle(16) {
            assert!((f.eval(z) - c).norm() < 1e-15);
            assert!((f.eval(z * 0.5) - c).norm() < 1e-15);
        }
    }

    #[test]
    fn two_point_example_matches_linear_solve() {
        let b = product(&[(0.0, 0.0), (0.5, 0.0)]);
        let f = solve_kb(&b, &TargetVector::real(&[1.0, 0.0])).unwrap();
        assert!((f.eval(Complex64::new(0.0, 0.0)) - ONE).norm() < 1e-15);
        assert!(f.eval(Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!(!f.is_ill_conditioned());
        for z in circle(256) {
            assert!((f.eval(z) - f.eval_kernel(z).unwrap()).norm() < 1e-8);
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let b = product(&[(0.0, 0.0), (0.5, 0.0)]);
        assert!(matches!(
            solve_kb(&b, &TargetVector::real(&[1.0])),
            Err(Error::LengthMismatch {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn zero_targets_pass_cross_check() {
        let b = product(&[(0.0, 0.0), (0.5, 0.0)]);
        let f = solve_kb(&b, &TargetVector::real(&[0.0, 0.0])).unwrap();
        assert!(f.cross_check().is_ok());
        assert_eq!(f.eval(Complex64::new(0.2, 0.2)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn sup_norm_examples() {
        let b = product(&[(0.5, 0.0)]);
        let c = Complex64::new(0.0, 2.5);
        let grid = CircleGrid::default();
        let f = solve_kb(&product(&[(0.0, 0.0)]), &TargetVector::new(vec![c])).unwrap();
        assert!((sup_norm(&f, &grid).unwrap() - 2.5).abs() < 1e-15);

        // the normalized kernel at a = 0.5 peaks at ζ = 1 with 0.75/0.5
        let k = solve_kb(&b, &TargetVector::real(&[1.0])).unwrap();
        assert!(
            (k.eval(Complex64::new(0.1, 0.2))
                - cauchy_kernel(b.zeros()[0], Complex64::new(0.1, 0.2)))
            .norm()
                < 1e-15
        );
        assert!((sup_norm(&k, &grid).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn lebesgue_examples() {
        let grid = CircleGrid::default();
        assert_eq!(
            lebesgue_constant(&product(&[(0.0, 0.0)]), &grid).unwrap(),
            1.0
        );

        let b = product(&[(0.0, 0.0), (0.5, 0.0)]);
        let m = lebesgue_constant(&b, &grid).unwrap();
        assert!(m >= 1.0);
        // random unit-phase targets approach M from below
        let mut rng = RngSeed(5).rng();
        let mut best = 0.0_f64;
        for _ in 0..2000 {
            let alpha = TargetVector::new(
                (0..2)
                    .map(|_| Complex64::from_polar(1.0, TAU * rng.random::<f64>()))
                    .collect(),
            );
            let f = solve_kb(&b, &alpha).unwrap();
            let s = sup_norm(&f, &CircleGrid::new(512, 1).unwrap()).unwrap();
            assert!(s <= m + 1e-9);
            best = best.max(s);
        }
        assert!(best > 0.98 * m, "{best} vs {m}");
    }

    #[test]
    fn lebesgue_rotation_invariant() {
        let grid = CircleGrid::default();
        let a = random_sequence(6, 0.3, 0.85, RngSeed(11)).unwrap();
        let m = lebesgue_constant(&BlaschkeProduct::new(a.clone()), &grid).unwrap();
        for t in [0.3, 1.7, 4.0] {
            let lam = Complex64::from_polar(1.0, t);
            let rotated: Vec<Complex64> = a.iter().map(|p| p.z() * lam).collect();
            let mr =
                lebesgue_constant(&BlaschkeProduct::from_points(&rotated).unwrap(), &grid).unwrap();
            assert!((m - mr).abs() < 1e-8 * m, "{m} vs {mr}");
        }
    }

    #[test]
    fn schwarz_step_on_normalized_interpolant() {
        let a = random_sequence(8, 0.3, 0.9, RngSeed(21)).unwrap();
        let b = BlaschkeProduct::new(a.clone());
        let f0 = solve_kb(&b, &random_targets(8, 3)).unwrap();
        let norm = sup_norm(&f0, &CircleGrid::default()).unwrap();
        let z = crate::sequences::perturb_sample(&a, 0.3, RngSeed(8), 0.05).unwrap();
        for (an, zn) in a.iter().zip(z.z().iter()) {
            let fa = f0.eval(an.z()) / (norm * (1.0 + 1e-9));
            let fz = f0.eval(zn.z()) / (norm * (1.0 + 1e-9));
            let lhs = crate::geometry::pseudo_distance(fa, fz);
            assert!(lhs <= rho(an, zn) + 1e-10, "{lhs} > {}", rho(an, zn));
        }
    }

    fn separated_instance() -> impl Strategy<Value = (BlaschkeProduct, TargetVector, TargetVector)>
    {
        (1usize..=20, any::<u64>()).prop_filter_map("carleson δ ≥ 0.3", |(n, seed)| {
            let a: ZeroSequence = random_sequence(n, 0.5, 0.9, RngSeed(seed)).ok()?;
            let b = BlaschkeProduct::new(a);
            (b.carleson().delta >= 0.3)
                .then(|| (b, random_targets(n, seed ^ 1), random_targets(n, seed ^ 2)))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn interpolates_and_forms_agree((b, alpha, _) in separated_instance()) {
            let f = solve_kb(&b, &alpha).unwrap();
            let tol = 1e-9 * (1.0 + alpha.sup_norm());
            for (a, &v) in b.zeros().iter().zip(alpha.values()) {
                prop_assert!((f.eval(a.z()) - v).norm() <= tol);
            }
            prop_assert!(!f.is_ill_conditioned());
            for z in circle(256) {
                prop_assert!((f.eval(z) - f.eval_kernel(z).unwrap()).norm() <= 1e-6);
            }
        }

        #[test]
        fn solve_is_linear((b, alpha, beta) in separated_instance()) {
            let sum = TargetVector::new(alpha.values().iter().zip(beta.values()).map(|(x, y)| x + y).collect());
            let fs = solve_kb(&b, &sum).unwrap();
            let fa = solve_kb(&b, &alpha).unwrap();
            let fb = solve_kb(&b, &beta).unwrap();
            for z in circle(64) {
                prop_assert!((fs.eval(z) - fa.eval(z) - fb.eval(z)).norm() <= 1e-10);
            }
        }

        #[test]
        fn sup_norm_dominates_targets((b, alpha, _) in separated_instance()) {
            let f = solve_kb(&b, &alpha).unwrap();
            let s = sup_norm(&f, &CircleGrid::new(1024, 2).unwrap()).unwrap();
            prop_assert!(s >= alpha.sup_norm() * (1.0 - 1e-9));
        }
    }
}
