//! Empirical check of the estimates that carry the Frostman property from a
//! sequence `(a_n)` to a pseudohyperbolically nearby `(z_n)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{frostman_at, frostman_sum, CircleGrid, Witness};
use crate::error::{Error, Result};
use crate::geometry::{one_minus_pseudo_sq, one_minus_rho, DiskPoint};
use crate::sequences::PairedSequences;

/// Slack allowed on every hard inequality.
pub const HARD_SLACK: f64 = 1e-12;

/// Envelope constants observed on one pair of finite sequences.
///
/// `empirical_*` values are extremes over the data at hand, not the
/// constants whose existence the estimates assert.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub radius: f64,
    /// `(1 + r)/(1 - r)`
    pub c_r: f64,
    /// min / max over `j < k` of `(1 - ρ²(z_j, z_k)) / (1 - ρ²(a_j, a_k))`.
    pub empirical_c1: f64,
    pub empirical_c2: f64,
    /// min / max over `n` of `(1 - |z_n|²)/(1 - |a_n|²)`.
    pub empirical_d1: f64,
    pub empirical_d2: f64,
    /// min over `j` and circle samples of `|1 - z̄_j ζ| / |1 - ā_j ζ|`.
    pub empirical_c3: f64,
    /// `C₃/D₂`: lower envelope of the kernel ratio
    /// `[(1-|a_j|²)/|1-ā_jζ|] / [(1-|z_j|²)/|1-z̄_jζ|]`.
    pub empirical_c4: f64,
    pub frostman_a: f64,
    pub frostman_z: f64,
    /// Frostman sum of `(a_n)` evaluated where the sum of `(z_n)` peaks.
    pub frostman_a_at_z_peak: f64,
    /// `frostman_z ≤ (2/C₄)·frostman_a_at_z_peak`; the 2 converts `1 - |a|²`
    /// weights back to `1 - |a|`.
    pub frostman_envelope_ok: bool,
    /// Failures of `1 - |z_n|² ≤ C_r(1 - |a_n|²)` and of its mirror image.
    pub violations: usize,
    /// Failures of `1 - ρ(a_j, a_k) ≤ C_r²(1 - ρ(z_j, z_k))`.
    pub pseudo_violations: usize,
}

pub fn perturbation_report(
    p: &PairedSequences,
    r: f64,
    grid: &CircleGrid,
) -> Result<PerturbationReport> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "radius must lie in (0, 1), got {r}"
        )));
    }
    if p.nearness() > r {
        return Err(Error::NearnessExceeded {
            nearness: p.nearness(),
            radius: r,
        });
    }
    grid.validate()?;
    let a = p.a().points();
    let z = p.z().points();
    let n = a.len();
    let c_r = (1.0 + r) / (1.0 - r);

    let mut violations = 0;
    let (mut d1, mut d2) = (f64::INFINITY, 0.0_f64);
    for (an, zn) in a.iter().zip(z) {
        let (wa, wz) = (an.one_minus_mod_sq(), zn.one_minus_mod_sq());
        if wz > c_r * wa + HARD_SLACK {
            violations += 1;
        }
        if wa > c_r * wz + HARD_SLACK {
            violations += 1;
        }
        let ratio = wz / wa;
        d1 = d1.min(ratio);
        d2 = d2.max(ratio);
    }

    let mut pseudo_violations = 0;
    let (mut c1, mut c2) = (f64::INFINITY, 0.0_f64);
    for j in 0..n {
        for k in j + 1..n {
            let ratio =
                one_minus_pseudo_sq(z[j].z(), z[k].z()) / one_minus_pseudo_sq(a[j].z(), a[k].z());
            c1 = c1.min(ratio);
            c2 = c2.max(ratio);
            if one_minus_rho(a[j], a[k]) > c_r * c_r * one_minus_rho(z[j], z[k]) + HARD_SLACK {
                pseudo_violations += 1;
            }
        }
    }
    if n < 2 {
        c1 = 1.0;
        c2 = 1.0;
    }

    let rep_a = frostman_sum(p.a(), grid)?;
    let rep_z = frostman_sum(p.z(), grid)?;
    let z_peak = match rep_z.witness {
        Witness::Circle(c) => c,
        _ => unreachable!("frostman reports carry a circle witness"),
    };
    let frostman_a_at_z_peak = frostman_at(p.a(), z_peak);

    let mut args = grid
        .with_extra_args(a.iter().chain(z).map(|q| q.z().arg()))
        .args();
    args.push(z_peak.arg());
    if let Witness::Circle(c) = rep_a.witness {
        args.push(c.arg());
    }
    let c3 = args
        .iter()
        .map(|&t| {
            let zeta = Complex64::from_polar(1.0, t);
            a.iter()
                .zip(z)
                .map(|(aj, zj)| kernel_denominator(*zj, zeta) / kernel_denominator(*aj, zeta))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min);
    let c4 = c3 / d2;

    let frostman_envelope_ok = rep_z.value <= (2.0 / c4) * frostman_a_at_z_peak * (1.0 + 1e-12);

    Ok(PerturbationReport {
        radius: r,
        c_r,
        empirical_c1: c1,
        empirical_c2: c2,
        empirical_d1: d1,
        empirical_d2: d2,
        empirical_c3: c3,
        empirical_c4: c4,
        frostman_a: rep_a.value,
        frostman_z: rep_z.value,
        frostman_a_at_z_peak,
        frostman_envelope_ok,
        violations,
        pseudo_violations,
    })
}

fn kernel_denominator(p: DiskPoint, zeta: Complex64) -> f64 {
    (Complex64::new(1.0, 0.0) - p.z().conj() * zeta).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{frostman_example, perturb_sample, RngSeed, DEFAULT_MIN_SEP};

    #[test]
    fn identity_perturbation() {
        let a = frostman_example(12).unwrap();
        let p = PairedSequences::new(a.clone(), a).unwrap();
        let rep = perturbation_report(&p, 0.5, &CircleGrid::default()).unwrap();
        assert_eq!(rep.violations, 0);
        assert_eq!(rep.pseudo_violations, 0);
        for v in [
            rep.empirical_c1,
            rep.empirical_c2,
            rep.empirical_d1,
            rep.empirical_d2,
            rep.empirical_c3,
        ] {
            assert_eq!(v, 1.0);
        }
        assert_eq!(rep.frostman_a, rep.frostman_z);
        assert!(rep.frostman_envelope_ok);
    }

    #[test]
    fn nearness_beyond_radius_rejected() {
        let a = frostman_example(10).unwrap();
        let p = perturb_sample(&a, 0.6, RngSeed(2), DEFAULT_MIN_SEP).unwrap();
        let err = perturbation_report(&p, p.nearness() * 0.5, &CircleGrid::default()).unwrap_err();
        assert!(matches!(err, Error::NearnessExceeded { .. }));
    }

    #[test]
    fn random_perturbations_respect_envelopes() {
        let a = frostman_example(20).unwrap();
        let grid = CircleGrid::new(1024, 2).unwrap();
        for seed in 0..40 {
            let p = perturb_sample(&a, 0.5, RngSeed(seed), DEFAULT_MIN_SEP).unwrap();
            let rep = perturbation_report(&p, 0.5, &grid).unwrap();
            assert_eq!(rep.violations, 0);
            assert_eq!(rep.pseudo_violations, 0);
            assert!(rep.empirical_c1 <= rep.empirical_c2);
            assert!(rep.empirical_d1 <= rep.empirical_d2);
            assert!(rep.empirical_d1 >= 1.0 / rep.c_r - 1e-12);
            assert!(rep.empirical_d2 <= rep.c_r + 1e-12);
            assert!(rep.frostman_envelope_ok, "{rep:?}");
        }
    }
}
