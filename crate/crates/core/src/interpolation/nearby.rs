//! Interpolation on a sequence `(z_n)` close to the zeros `(a_n)` of `B`.
//!
//! Starting from `f₀ = solve_kb(B, α)`, each step interpolates the current
//! defect on `(z_n)` at the nodes `(a_n)`:
//!
//! ```text
//! r_m(n)   = α_n − Σ_{i≤m} f_i(z_n)
//! f_{m+1}  = solve_kb(B, r_m)
//! ```
//!
//! With nearness `ν < 1/(2M)` the defect contracts by `2Mν` per step.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{lebesgue_constant, solve_kb, InterpolantRep, LagrangeBasis, TargetVector};
use crate::blaschke::{BlaschkeProduct, ZeroSequence};
use crate::criteria::CircleGrid;
use crate::error::{Error, Result};
use crate::sequences::PairedSequences;

/// Nearness beyond `1/(2M)` is attempted up to this multiple, without the
/// bound-curve guarantee.
pub const WARNING_FACTOR: f64 = 1.5;
/// Slack on the bound-curve comparison.
pub const DOMINANCE_SLACK: f64 = 1.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    /// `sup_n |r_m(n)|` for `m = 0, 1, …`.
    pub residual_sup: Vec<f64>,
    /// `‖α‖_∞ · (2M(1-ε))^m` with `1 - ε` the nearness.
    pub bound_curve: Vec<f64>,
    pub m_used: f64,
    pub epsilon_used: f64,
    pub nearness: f64,
    /// `1/(2M)`.
    pub threshold: f64,
    /// Set when the nearness lies in `[1/(2M), 1.5/(2M))` and the bound
    /// curve carries no guarantee.
    pub warning: bool,
    pub converged: bool,
}

impl IterationTrace {
    pub fn ratio(&self) -> f64 {
        2.0 * self.m_used * self.nearness
    }

    /// Whether every recorded residual lies below `1.1 ×` the bound curve,
    /// up to a rounding floor.
    pub fn dominated(&self, floor: f64) -> bool {
        self.residual_sup
            .iter()
            .zip(&self.bound_curve)
            .all(|(&r, &b)| r <= DOMINANCE_SLACK * b + floor)
    }

    pub fn steps(&self) -> usize {
        self.residual_sup.len()
    }
}

/// [`nearby_iterate_with_grid`] on the default circle grid.
pub fn nearby_iterate(
    b: &BlaschkeProduct,
    z: &ZeroSequence,
    alpha: &TargetVector,
    max_iter: usize,
    tol: f64,
) -> Result<(InterpolantRep, IterationTrace)> {
    nearby_iterate_with_grid(b, z, alpha, max_iter, tol, &CircleGrid::default())
}

/// Run the correction iteration for at most `max_iter` corrections after
/// `f₀`. The returned interpolant is `Σ f_m`, stored by its values at the
/// zeros of `B`.
pub fn nearby_iterate_with_grid(
    b: &BlaschkeProduct,
    z: &ZeroSequence,
    alpha: &TargetVector,
    max_iter: usize,
    tol: f64,
    grid: &CircleGrid,
) -> Result<(InterpolantRep, IterationTrace)> {
    let zeros = b.zero_sequence().ok_or(Error::EmptySequence)?;
    let n = zeros.len();
    if z.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: z.len(),
        });
    }
    if alpha.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: alpha.len(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }

    let nearness = PairedSequences::new(zeros, z.clone())?.nearness();
    let m = lebesgue_constant(b, grid)?;
    let threshold = 1.0 / (2.0 * m);
    if nearness >= WARNING_FACTOR * threshold {
        return Err(Error::ContractionViolated {
            nearness,
            threshold,
        });
    }
    let warning = nearness >= threshold;

    // E[n][j] = L_j(z_n): one application of "interpolate at a, evaluate at z"
    let basis = LagrangeBasis::new(b)?;
    let at_z: Vec<Vec<Complex64>> = z.iter().map(|p| basis.values(p.z())).collect();
    let apply = |coeffs: &[Complex64]| -> Vec<Complex64> {
        at_z.iter()
            .map(|row| row.iter().zip(coeffs).map(|(l, c)| l * c).sum())
            .collect()
    };
    let sup = |v: &[Complex64]| v.iter().map(|x| x.norm()).fold(0.0, f64::max);

    let norm = alpha.sup_norm();
    let ratio = 2.0 * m * nearness;
    let mut trace = IterationTrace {
        residual_sup: Vec::new(),
        bound_curve: Vec::new(),
        m_used: m,
        epsilon_used: 1.0 - nearness,
        nearness,
        threshold,
        warning,
        converged: false,
    };

    // accumulated values of Σ f_i at the nodes a_n, and the defect r_m
    let mut total: Vec<Complex64> = alpha.values().to_vec();
    let mut fz = apply(&total);
    let mut residual: Vec<Complex64> = alpha.values().iter().zip(&fz).map(|(a, f)| a - f).collect();
    for step in 0..=max_iter {
        let r = sup(&residual);
        trace.residual_sup.push(r);
        trace.bound_curve.push(norm * ratio.powi(step as i32));
        if !warning && r > DOMINANCE_SLACK * trace.bound_curve[step] + rounding_floor(norm, n) {
            return Err(Error::PrecisionViolation {
                what: format!("residual above bound curve at step {step}"),
                excess: r - DOMINANCE_SLACK * trace.bound_curve[step],
            });
        }
        if r <= tol {
            trace.converged = true;
            break;
        }
        if step == max_iter {
            break;
        }
        // f_{m+1} = solve_kb(B, r_m); its values on (z_n) are E·r_m
        let correction = apply(&residual);
        for (t, r) in total.iter_mut().zip(&residual) {
            *t += r;
        }
        for (f, c) in fz.iter_mut().zip(&correction) {
            *f += c;
        }
        residual = alpha.values().iter().zip(&fz).map(|(a, f)| a - f).collect();
    }

    if !trace.converged {
        return Err(Error::MaxIterExceeded {
            iterations: max_iter,
            residual: *trace.residual_sup.last().expect("at least one step"),
        });
    }
    let f = solve_kb(b, &TargetVector::new(total))?;
    Ok((f, trace))
}

/// Absolute allowance for rounding when the bound curve itself is tiny.
pub fn rounding_floor(norm: f64, n: usize) -> f64 {
    1e-13 * (1.0 + norm) * n as f64
}
