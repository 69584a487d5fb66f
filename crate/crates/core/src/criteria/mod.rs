//! Sequence criteria: Carleson, Frostman, Cohn, Dyakonov, Vasyunin,
//! cross-modulus, separation and nearness.
//!
//! Circle suprema are estimates (grid scan plus refinement with the sequence
//! arguments injected). Whether a criterion stays bounded can only be read
//! off as a trend across truncation depths; no report claims finiteness.

mod grid;
mod perturbation;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::{BlaschkeProduct, ZeroSequence, DUPLICATE_TOL};
use crate::error::{Error, Result};
use crate::geometry::{pseudo_distance, CirclePoint};
use crate::interpolation::TargetVector;
use crate::sequences::PairedSequences;

pub use grid::{
    circle_sup, CircleGrid, CircleMax, DEFAULT_BASE_COUNT, DEFAULT_REFINEMENT_ROUNDS,
    MIN_BASE_COUNT,
};
pub use perturbation::{perturbation_report, PerturbationReport, HARD_SLACK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionName {
    Carleson,
    Frostman,
    Cohn,
    Dyakonov,
    Vasyunin,
    CrossModulus,
    Separation,
    Nearness,
}

impl CriterionName {
    pub fn as_str(self) -> &'static str {
        match self {
            CriterionName::Carleson => "carleson",
            CriterionName::Frostman => "frostman",
            CriterionName::Cohn => "cohn",
            CriterionName::Dyakonov => "dyakonov",
            CriterionName::Vasyunin => "vasyunin",
            CriterionName::CrossModulus => "cross_modulus",
            CriterionName::Separation => "separation",
            CriterionName::Nearness => "nearness",
        }
    }
}

/// Where the extremum of a criterion is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Index(usize),
    Pair(usize, usize),
    Circle(CirclePoint),
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub name: CriterionName,
    pub value: f64,
    pub witness: Witness,
    pub per_index: Vec<f64>,
    pub grid: Option<CircleGrid>,
}

impl CriterionReport {
    fn from_per_index(name: CriterionName, per_index: Vec<f64>, maximize: bool) -> Self {
        let mut best = 0;
        for (i, &v) in per_index.iter().enumerate() {
            let better = if maximize {
                v > per_index[best]
            } else {
                v < per_index[best]
            };
            if better {
                best = i;
            }
        }
        CriterionReport {
            name,
            value: per_index[best],
            witness: Witness::Index(best),
            per_index,
            grid: None,
        }
    }
}

/// Carleson quantities `(1 - |a_n|²)|B'(a_n)|` and their infimum `δ`.
pub fn carleson(b: &BlaschkeProduct) -> Result<CriterionReport> {
    if b.degree() == 0 {
        return Err(Error::EmptySequence);
    }
    let per_index = b.carleson().per_zero.into_iter().map(|(_, q)| q).collect();
    Ok(CriterionReport::from_per_index(
        CriterionName::Carleson,
        per_index,
        false,
    ))
}

fn frostman_terms(a: &ZeroSequence, t: f64) -> impl Iterator<Item = f64> + '_ {
    let (s, c) = t.sin_cos();
    let zeta = Complex64::new(c, s);
    a.iter()
        .map(move |p| (1.0 - p.modulus()) / (zeta - p.z()).norm())
}

/// `Σ_j (1 - |a_j|)/|ζ - a_j|` at a single circle point.
pub fn frostman_at(a: &ZeroSequence, zeta: CirclePoint) -> f64 {
    frostman_terms(a, zeta.arg()).sum()
}

/// Estimate of `sup_{ζ∈𝕋} Σ_j (1 - |a_j|)/|ζ - a_j|`. The arguments of the
/// points are always added to the grid. `per_index` holds the individual
/// terms at the maximizing `ζ`.
pub fn frostman_sum(a: &ZeroSequence, grid: &CircleGrid) -> Result<CriterionReport> {
    grid.validate()?;
    let grid = grid.with_extra_args(a.iter().map(|p| p.z().arg()));
    let m = circle_sup(|t| frostman_terms(a, t).sum(), &grid);
    let per_index: Vec<f64> = frostman_terms(a, m.raw_arg).collect();
    Ok(CriterionReport {
        name: CriterionName::Frostman,
        value: m.value,
        witness: Witness::Circle(m.at),
        per_index,
        grid: Some(grid),
    })
}

/// `sup_n Σ_k (1 - |a_k|)/|1 - ā_k a_n|`; `per_index[n]` is the `n`-th row sum.
pub fn cohn_sum(a: &ZeroSequence) -> CriterionReport {
    let per_index = a
        .iter()
        .map(|an| {
            a.iter()
                .map(|ak| {
                    (1.0 - ak.modulus())
                        / (Complex64::new(1.0, 0.0) - ak.z().conj() * an.z()).norm()
                })
                .sum()
        })
        .collect();
    CriterionReport::from_per_index(CriterionName::Cohn, per_index, true)
}

/// `sup_k |Σ_j α_j / (B'(a_j)(1 - a_j ā_k))|`, with the conjugate on `a_k`.
pub fn dyakonov_sup(b: &BlaschkeProduct, alpha: &TargetVector) -> Result<CriterionReport> {
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
    let weights = (0..n)
        .map(|j| Ok(alpha.values()[j] / b.derivative_at_zero(j)?))
        .collect::<Result<Vec<Complex64>>>()?;
    let zeros = b.zeros();
    let per_index = zeros
        .iter()
        .map(|ak| {
            zeros
                .iter()
                .zip(&weights)
                .map(|(aj, &w)| w / (Complex64::new(1.0, 0.0) - aj.z() * ak.z().conj()))
                .sum::<Complex64>()
                .norm()
        })
        .collect();
    Ok(CriterionReport::from_per_index(
        CriterionName::Dyakonov,
        per_index,
        true,
    ))
}

/// Truncated `Σ (1 - |a_n|) log(1/(1 - |a_n|))`.
pub fn vasyunin_sum(a: &ZeroSequence) -> f64 {
    a.iter()
        .map(|p| {
            let d = 1.0 - p.modulus();
            -d * d.ln()
        })
        .sum()
}

/// `inf_j |B(z_j)|`.
pub fn cross_modulus(b: &BlaschkeProduct, z: &ZeroSequence) -> Result<CriterionReport> {
    for (index, zj) in z.iter().enumerate() {
        if b.zeros()
            .iter()
            .any(|a| pseudo_distance(a.z(), zj.z()) < DUPLICATE_TOL)
        {
            return Err(Error::ZeroCollision { index });
        }
    }
    let per_index = z.iter().map(|zj| b.evaluate(zj.z()).norm()).collect();
    Ok(CriterionReport::from_per_index(
        CriterionName::CrossModulus,
        per_index,
        false,
    ))
}

/// `inf_{j,k} ρ(a_j, z_k)`; `per_index[j] = min_k ρ(a_j, z_k)`.
pub fn separation(p: &PairedSequences) -> CriterionReport {
    let per_index: Vec<f64> = p
        .a()
        .iter()
        .map(|aj| {
            p.z()
                .iter()
                .map(|zk| pseudo_distance(aj.z(), zk.z()))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mut report = CriterionReport::from_per_index(CriterionName::Separation, per_index, false);
    report.witness = Witness::Pair(p.separation_pair().0, p.separation_pair().1);
    report
}

/// `sup_j ρ(a_j, z_j)`.
pub fn nearness(p: &PairedSequences) -> CriterionReport {
    let per_index = p
        .a()
        .iter()
        .zip(p.z().iter())
        .map(|(a, z)| pseudo_distance(a.z(), z.z()))
        .collect();
    CriterionReport::from_per_index(CriterionName::Nearness, per_index, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::blaschke_factor;
    use crate::geometry::{rho, DiskPoint};
    use crate::sequences::{
        frostman_example, perturb_sample, radial_sequence, random_sequence, RngSeed,
    };
    use proptest::prelude::*;

    fn seq(points: &[(f64, f64)]) -> ZeroSequence {
        let pts: Vec<Complex64> = points.iter().map(|&(x, y)| Complex64::new(x, y)).collect();
        ZeroSequence::from_complex(&pts).unwrap()
    }

    fn targets(values: &[f64]) -> TargetVector {
        TargetVector::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    #[test]
    fn frostman_single_origin_point() {
        let rep = frostman_sum(&seq(&[(0.0, 0.0)]), &CircleGrid::default()).unwrap();
        assert!((rep.value - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn frostman_radial_equals_depth() {
        let a = radial_sequence(0.5, 30, 0.0).unwrap();
        let rep = frostman_sum(&a, &CircleGrid::default()).unwrap();
        assert!((rep.value - 30.0).abs() <= 1e-9, "{}", rep.value);
        match rep.witness {
            Witness::Circle(c) => assert!(c.arg() < 1e-9 || c.arg() > std::f64::consts::TAU - 1e-9),
            w => panic!("unexpected witness {w:?}"),
        }
        assert_eq!(rep.value, rep.per_index.iter().sum::<f64>());
    }

    #[test]
    fn frostman_example_plateaus() {
        let grid = CircleGrid::default();
        let s20 = frostman_sum(&frostman_example(20).unwrap(), &grid)
            .unwrap()
            .value;
        let s40 = frostman_sum(&frostman_example(40).unwrap(), &grid)
            .unwrap()
            .value;
        assert!((s40 - s20).abs() <= 0.05 * s20, "{s20} {s40}");
    }

    #[test]
    fn frostman_matches_dense_brute_force() {
        // independent dense scan at 2^20 points
        let a = frostman_example(12).unwrap();
        let n = 1 << 20;
        let mut brute = 0.0_f64;
        for k in 0..n {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            let zeta = Complex64::from_polar(1.0, t);
            let s: f64 = a
                .iter()
                .map(|p| (1.0 - p.modulus()) / (zeta - p.z()).norm())
                .sum();
            brute = brute.max(s);
        }
        let rep = frostman_sum(&a, &CircleGrid::default()).unwrap();
        assert!(rep.value >= brute - 1e-9, "{} < {brute}", rep.value);
        assert!(rep.value <= brute * 1.001);
    }

    #[test]
    fn frostman_monotone_under_appending() {
        let grid = CircleGrid::default();
        let mut prev = 0.0;
        for n in [1, 2, 5, 10, 20] {
            let v = frostman_sum(&frostman_example(n).unwrap(), &grid)
                .unwrap()
                .value;
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn cohn_examples() {
        assert_eq!(cohn_sum(&seq(&[(0.0, 0.0)])).value, 1.0);
        let rep = cohn_sum(&seq(&[(0.0, 0.0), (0.5, 0.0)]));
        let row_half = 1.0 + 0.5 / 0.75;
        assert!((rep.per_index[1] - row_half).abs() < 1e-15);
        assert!((rep.per_index[0] - 1.5).abs() < 1e-15);
        assert_eq!(rep.value, rep.per_index[0].max(rep.per_index[1]));
    }

    #[test]
    fn cohn_bounded_by_twice_frostman() {
        let grid = CircleGrid::default();
        for n in [10, 20, 40] {
            for a in [
                frostman_example(n).unwrap(),
                radial_sequence(0.5, n, 0.0).unwrap(),
            ] {
                let c = cohn_sum(&a).value;
                let f = frostman_sum(&a, &grid).unwrap().value;
                assert!(c <= 2.0 * f, "{c} vs {f}");
            }
        }
        // both grow for the radial sequence and both plateau for the example
        let c_radial: Vec<f64> = [10, 20, 40]
            .iter()
            .map(|&n| cohn_sum(&radial_sequence(0.5, n, 0.0).unwrap()).value)
            .collect();
        assert!(c_radial[2] > c_radial[1] + 5.0 && c_radial[1] > c_radial[0] + 5.0);
        let c_ex: Vec<f64> = [20, 40]
            .iter()
            .map(|&n| cohn_sum(&frostman_example(n).unwrap()).value)
            .collect();
        assert!((c_ex[1] - c_ex[0]).abs() < 0.05 * c_ex[0]);
    }

    #[test]
    fn dyakonov_examples() {
        let b = BlaschkeProduct::new(seq(&[(0.0, 0.0)]));
        assert_eq!(dyakonov_sup(&b, &targets(&[1.0])).unwrap().value, 1.0);

        let b = BlaschkeProduct::new(seq(&[(0.0, 0.0), (0.5, 0.0)]));
        let rep = dyakonov_sup(&b, &targets(&[1.0, 1.0])).unwrap();
        // four-term brute force with finite-difference derivatives
        let zeros = [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)];
        let h = 1e-7;
        let deriv: Vec<Complex64> = zeros
            .iter()
            .map(|&a| (b.evaluate(a + h) - b.evaluate(a - h)) / (2.0 * h))
            .collect();
        let mut brute = 0.0_f64;
        for k in 0..2 {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..2 {
                s += 1.0 / (deriv[j] * (1.0 - zeros[j] * zeros[k].conj()));
            }
            brute = brute.max(s.norm());
        }
        assert!((rep.value - brute).abs() < 1e-6 * brute);

        let scaled =
            dyakonov_sup(&b, &TargetVector::new(vec![Complex64::new(0.0, 3.0); 2])).unwrap();
        assert!((scaled.value - 3.0 * rep.value).abs() < 1e-12);
        assert!(matches!(
            dyakonov_sup(&b, &targets(&[1.0])),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn dyakonov_basis_vector() {
        let a = random_sequence(8, 0.3, 0.9, RngSeed(4)).unwrap();
        let b = BlaschkeProduct::new(a.clone());
        for j in 0..a.len() {
            let mut e = vec![Complex64::new(0.0, 0.0); a.len()];
            e[j] = Complex64::new(1.0, 0.0);
            let rep = dyakonov_sup(&b, &TargetVector::new(e)).unwrap();
            let dj = b.derivative_at_zero(j).unwrap().norm();
            let expected = a
                .iter()
                .map(|ak| 1.0 / (dj * (1.0 - a.points()[j].z() * ak.z().conj()).norm()))
                .fold(0.0, f64::max);
            assert!((rep.value - expected).abs() <= 1e-12 * expected);
        }
    }

    #[test]
    fn vasyunin_examples() {
        assert_eq!(vasyunin_sum(&seq(&[(0.0, 0.0)])), 0.0);
        let mut prev = 0.0;
        for n in 1..40 {
            let v = vasyunin_sum(&radial_sequence(0.5, n, 0.0).unwrap());
            let oracle: f64 = (1..=n)
                .map(|k| 0.5f64.powi(k as i32) * k as f64 * 2f64.ln())
                .sum();
            assert!((v - oracle).abs() < 1e-12);
            assert!(v >= prev && v < 2.0 * 2f64.ln());
            prev = v;
        }
    }

    #[test]
    fn cross_modulus_examples() {
        let b = BlaschkeProduct::new(seq(&[(0.0, 0.0)]));
        let rep = cross_modulus(&b, &seq(&[(0.5, 0.0)])).unwrap();
        assert_eq!(rep.value, 0.5);
        assert_eq!(
            cross_modulus(&b, &seq(&[(0.5, 0.0), (0.0, 0.0)])),
            Err(Error::ZeroCollision { index: 1 })
        );

        // η shrinks as Z approaches the zeros
        let b = BlaschkeProduct::new(seq(&[(0.3, 0.2), (-0.5, 0.1)]));
        let mut prev = f64::INFINITY;
        for eps in [0.3, 0.1, 0.03, 0.01, 0.001] {
            let z = seq(&[(0.3 + eps, 0.2), (-0.5, 0.1 + eps)]);
            let v = cross_modulus(&b, &z).unwrap().value;
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn separation_and_nearness_examples() {
        let a = seq(&[(0.0, 0.0)]);
        let p = PairedSequences::new(a.clone(), seq(&[(0.5, 0.0)])).unwrap();
        assert_eq!(separation(&p).value, 0.5);
        assert_eq!(separation(&p).witness, Witness::Pair(0, 0));
        let same = PairedSequences::new(a.clone(), a).unwrap();
        assert_eq!(nearness(&same).value, 0.0);

        let base = frostman_example(15).unwrap();
        for seed in 0..20 {
            let p = perturb_sample(&base, 0.4, RngSeed(seed), 0.1).unwrap();
            assert!(nearness(&p).value <= 0.4);
            assert_eq!(nearness(&p).value, p.nearness());
            assert_eq!(separation(&p).value, p.separation());
        }
    }

    #[test]
    fn carleson_report_is_min() {
        let b = BlaschkeProduct::new(seq(&[(0.0, 0.0), (0.5, 0.0), (0.0, 0.7)]));
        let rep = carleson(&b).unwrap();
        assert_eq!(
            rep.value,
            rep.per_index.iter().copied().fold(f64::INFINITY, f64::min)
        );
    }

    fn separated_pair(n: usize, seed: u64) -> Option<(ZeroSequence, ZeroSequence)> {
        let merged = random_sequence(2 * n, 0.4, 0.9, RngSeed(seed)).ok()?;
        let a = ZeroSequence::new(merged.points()[..n].to_vec()).ok()?;
        let z = ZeroSequence::new(merged.points()[n..].to_vec()).ok()?;
        Some((a, z))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cross_modulus_factorizes(n in 1usize..15, seed in any::<u64>()) {
            if let Some((a, z)) = separated_pair(n, seed) {
                let b = BlaschkeProduct::new(a.clone());
                let rep = cross_modulus(&b, &z).unwrap();
                prop_assert!(rep.value >= 0.4f64.powi(n as i32));
                let Witness::Index(j) = rep.witness else { unreachable!() };
                let product: f64 = a.iter().map(|ak| rho(ak, z.points()[j])).product();
                prop_assert!((rep.value - product).abs() <= 1e-12);
                let direct: f64 = a.iter().map(|ak| blaschke_factor(ak, z.points()[j].z()).norm()).product();
                prop_assert!((direct - product).abs() <= 1e-12);
            }
        }

        #[test]
        fn frostman_deterministic(n in 1usize..20) {
            let a = frostman_example(n).unwrap();
            let g = CircleGrid::new(512, 2).unwrap();
            prop_assert_eq!(frostman_sum(&a, &g).unwrap(), frostman_sum(&a, &g).unwrap());
        }

        #[test]
        fn frostman_at_matches_report(m in 0.0..0.99f64, t in 0.0..std::f64::consts::TAU) {
            let a = ZeroSequence::new(vec![DiskPoint::polar(m, t).unwrap()]).unwrap();
            let rep = frostman_sum(&a, &CircleGrid::new(256, 3).unwrap()).unwrap();
            // single term peaks at ζ = a/|a| with value (1-|a|)/(1-|a|) = 1
            prop_assert!((rep.value - 1.0).abs() < 1e-12);
        }
    }
}
