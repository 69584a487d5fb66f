//! Zeros of the Frostman shift `φ_a ∘ B`, i.e. the solutions of `B(z) = a`.
//!
//! Writing `B = p/q` with `p(z) = λ Π c_j (z - a_j)` and
//! `q(z) = Π (1 - ā_j z)`, the solutions are the roots of `p - a q`. These
//! are estimated as eigenvalues of the companion matrix and then polished by
//! Newton steps on the factored form of `B - a`. If polishing merges two
//! estimates, an Aberth sweep from the eigenvalue estimates separates them.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::blaschke::{BlaschkeProduct, ZeroSequence};
use crate::error::{Error, Result};
use crate::geometry::DiskPoint;

/// Largest degree for which the expanded polynomial is formed.
pub const SHIFT_DEGREE_CAP: usize = 40;
/// Bound on `|B(root) - a|` for an accepted root, raised to the rounding
/// level `|B'(root)|·ε` for roots too close to the circle to reach it.
pub const SHIFT_RESIDUAL_TOL: f64 = 1e-8;
const ROUNDING_SLACK: f64 = 64.0;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const NEWTON_STEPS: usize = 60;
const ABERTH_SWEEPS: usize = 500;

pub fn frostman_shift_zeros(b: &BlaschkeProduct, a: DiskPoint) -> Result<ZeroSequence> {
    let n = b.degree();
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    if n > SHIFT_DEGREE_CAP {
        return Err(Error::DegreeCapExceeded {
            degree: n,
            cap: SHIFT_DEGREE_CAP,
        });
    }
    if a.modulus() == 0.0 {
        return Ok(b.zero_sequence().expect("degree is positive"));
    }
    let target = a.z();
    let estimates = companion_roots(b, target)?;

    let polished: Vec<Complex64> = estimates
        .iter()
        .map(|&z0| newton_polish(b, target, z0))
        .collect();
    let roots = match verify(b, target, &polished) {
        Ok(()) => polished,
        Err(_) => {
            let roots = aberth(b, target, estimates);
            verify(b, target, &roots)?;
            roots
        }
    };
    ZeroSequence::from_complex(&roots).map_err(|_| Error::RootVerificationFailed {
        index: 0,
        residual: f64::NAN,
    })
}

/// Ascending coefficients of `Π (x - r_k)` scaled by `lead`.
fn expand(roots: impl Iterator<Item = Complex64>, lead: Complex64) -> Vec<Complex64> {
    let mut c = vec![lead];
    for r in roots {
        c.push(Complex64::new(0.0, 0.0));
        for i in (1..c.len()).rev() {
            c[i] = c[i - 1] - r * c[i];
        }
        c[0] *= -r;
    }
    c
}

fn companion_roots(b: &BlaschkeProduct, a: Complex64) -> Result<Vec<Complex64>> {
    let n = b.degree();
    let phase: Complex64 = b
        .zeros()
        .iter()
        .map(|&p| crate::blaschke::factor_phase(p))
        .product();
    let p = expand(b.zeros().iter().map(|z| z.z()), b.rotation().z() * phase);
    // Π (1 - ā_j x) = Π(-ā_j) · Π (x - 1/ā_j) is formed directly to avoid 1/ā_j
    let mut q = vec![ONE];
    for z in b.zeros() {
        let c = -z.z().conj();
        q.push(Complex64::new(0.0, 0.0));
        for i in (1..q.len()).rev() {
            let prev = q[i - 1];
            q[i] += c * prev;
        }
    }
    let r: Vec<Complex64> = p.iter().zip(&q).map(|(pi, qi)| pi - a * qi).collect();
    let lead = r[n];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = ONE;
    }
    for i in 0..n {
        m[(i, n - 1)] = -r[i] / lead;
    }
    let schur = m
        .try_schur(f64::EPSILON, 100_000)
        .ok_or(Error::RootVerificationFailed {
            index: 0,
            residual: f64::INFINITY,
        })?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// `(B(z) - a) / B'(z)`, or `None` where the derivative is unusable.
fn newton_step(b: &BlaschkeProduct, a: Complex64, z: Complex64) -> Option<(Complex64, f64)> {
    let f = b.evaluate(z) - a;
    let d = b.derivative(z, None).ok()?;
    if d == Complex64::new(0.0, 0.0) || !d.is_finite() {
        return None;
    }
    Some((f / d, f.norm()))
}

fn newton_polish(b: &BlaschkeProduct, a: Complex64, z0: Complex64) -> Complex64 {
    let mut z = z0;
    let mut best = (z0, (b.evaluate(z0) - a).norm());
    for _ in 0..NEWTON_STEPS {
        let Some((step, _)) = newton_step(b, a, z) else {
            break;
        };
        let next = z - step;
        if !next.is_finite() || next.norm() >= 1.0 {
            break;
        }
        z = next;
        let res = (b.evaluate(z) - a).norm();
        if res < best.1 {
            best = (z, res);
        }
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    best.0
}

/// Simultaneous Aberth iteration on the numerator `p - a q`, using
/// `(p - aq)'/(p - aq) = B'/(B - a) + q'/q`.
fn aberth(b: &BlaschkeProduct, a: Complex64, mut z: Vec<Complex64>) -> Vec<Complex64> {
    let n = z.len();
    for _ in 0..ABERTH_SWEEPS {
        let mut largest = 0.0_f64;
        for i in 0..n {
            let zi = z[i];
            let Ok(d) = b.derivative(zi, None) else {
                continue;
            };
            let f = b.evaluate(zi) - a;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            let q_log: Complex64 = b
                .zeros()
                .iter()
                .map(|p| -p.z().conj() / (ONE - p.z().conj() * zi))
                .sum();
            let newton = ONE / (d / f + q_log);
            let repulsion: Complex64 = (0..n).filter(|&k| k != i).map(|k| ONE / (zi - z[k])).sum();
            let w = newton / (ONE - newton * repulsion);
            if w.is_finite() {
                z[i] = zi - w;
                largest = largest.max(w.norm());
            }
        }
        if largest <= 1e-16 {
            break;
        }
    }
    z.into_iter().map(|z0| newton_polish(b, a, z0)).collect()
}

fn verify(b: &BlaschkeProduct, a: Complex64, roots: &[Complex64]) -> Result<()> {
    for (i, &r) in roots.iter().enumerate() {
        let residual = (b.evaluate(r) - a).norm();
        let slope = b.derivative(r, None).map_or(0.0, |d| d.norm());
        let tol = SHIFT_RESIDUAL_TOL.max(ROUNDING_SLACK * f64::EPSILON * slope);
        if !(r.norm() < 1.0) || !(residual <= tol) {
            return Err(Error::RootVerificationFailed { index: i, residual });
        }
        for &s in &roots[..i] {
            if (r - s).norm() <= 1e-10 * (1.0 + r.norm()) {
                return Err(Error::RootVerificationFailed { index: i, residual });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{frostman_sum, CircleGrid};
    use crate::sequences::{frostman_example, random_sequence, RngSeed};
    use std::f64::consts::TAU;

    /// Number of solutions of `B = a` in the disk, by winding number of
    /// `B - a` along the circle.
    fn winding_count(b: &BlaschkeProduct, a: Complex64) -> i64 {
        let steps = 1 << 14;
        let mut total = 0.0;
        let mut prev = b.evaluate(ONE) - a;
        for k in 1..=steps {
            let cur = b.evaluate(Complex64::from_polar(1.0, TAU * k as f64 / steps as f64)) - a;
            total += (cur / prev).arg();
            prev = cur;
        }
        (total / TAU).round() as i64
    }

    #[test]
    fn degree_one() {
        let b = BlaschkeProduct::from_points(&[Complex64::new(0.0, 0.0)]).unwrap();
        let roots = frostman_shift_zeros(&b, DiskPoint::real(0.5).unwrap()).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots.points()[0].z() - 0.5).norm() < 1e-15);
    }

    #[test]
    fn zero_shift_returns_zeros() {
        let a = random_sequence(7, 0.2, 0.9, RngSeed(1)).unwrap();
        let b = BlaschkeProduct::new(a.clone());
        assert_eq!(frostman_shift_zeros(&b, DiskPoint::ORIGIN).unwrap(), a);
    }

    #[test]
    fn expansion_matches_product() {
        let roots = [
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.5, 0.2),
            Complex64::new(0.0, -0.7),
        ];
        let c = expand(roots.iter().copied(), Complex64::new(0.0, 2.0));
        let x = Complex64::new(0.4, -1.3);
        let horner = c
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &ci| acc * x + ci);
        let direct: Complex64 =
            roots.iter().map(|&r| x - r).product::<Complex64>() * Complex64::new(0.0, 2.0);
        assert!((horner - direct).norm() < 1e-14);
    }

    #[test]
    fn degree_five_random() {
        for seed in 0..10 {
            let b = BlaschkeProduct::new(random_sequence(5, 0.1, 0.9, RngSeed(seed)).unwrap());
            let a = DiskPoint::real(0.3).unwrap();
            let roots = frostman_shift_zeros(&b, a).unwrap();
            assert_eq!(roots.len(), 5);
            assert_eq!(winding_count(&b, a.z()), 5);
            for r in roots.iter() {
                assert!(r.modulus() < 1.0);
                assert!((b.evaluate(r.z()) - a.z()).norm() <= 1e-8);
            }
        }
    }

    #[test]
    fn degree_cap() {
        let b = BlaschkeProduct::new(random_sequence(41, 0.01, 0.95, RngSeed(2)).unwrap());
        assert!(matches!(
            frostman_shift_zeros(&b, DiskPoint::real(0.1).unwrap()),
            Err(Error::DegreeCapExceeded {
                degree: 41,
                cap: 40
            })
        ));
    }

    #[test]
    fn shift_keeps_frostman_sum_comparable() {
        let grid = CircleGrid::new(2048, 2).unwrap();
        for n in [5, 10, 15, 20] {
            let a = frostman_example(n).unwrap();
            let s = frostman_sum(&a, &grid).unwrap().value;
            let b = BlaschkeProduct::new(a);
            for w in [
                DiskPoint::real(0.3).unwrap(),
                DiskPoint::polar(0.6, 2.0).unwrap(),
            ] {
                let shifted = frostman_shift_zeros(&b, w).unwrap();
                let t = frostman_sum(&shifted, &grid).unwrap().value;
                assert!(t <= 10.0 * s && s <= 10.0 * t, "N={n}: {t} vs {s}");
            }
        }
    }

    #[test]
    fn zeros_near_the_circle_are_found() {
        for n in [30, 40] {
            let b = BlaschkeProduct::new(frostman_example(n).unwrap());
            let a = DiskPoint::new(0.2, -0.1).unwrap();
            let roots = frostman_shift_zeros(&b, a).unwrap();
            assert_eq!(roots.len(), n);
            let pts = roots.points();
            for (i, r) in pts.iter().enumerate() {
                assert!(pts[..i].iter().all(|p| p.z() != r.z()));
                let slope = b.derivative(r.z(), None).unwrap().norm();
                let res = (b.evaluate(r.z()) - a.z()).norm();
                assert!(res <= 1e-8_f64.max(1e-13 * slope), "N={n}: {res:e}");
            }
        }
    }
}
