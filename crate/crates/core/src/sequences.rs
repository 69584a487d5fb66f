//! Named zero sequences, interlaced unions and seeded perturbations.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blaschke::ZeroSequence;
use crate::error::{Error, Result};
use crate::geometry::{pseudo_disk_to_euclidean, pseudo_distance, DiskPoint};
use crate::interpolation::TargetVector;

/// Deepest truncation of `frostman_example` accepted by the API.
pub const FROSTMAN_EXAMPLE_MAX_DEPTH: usize = 60;

/// Default `ρ`-separation demanded of perturbed sequences.
pub const DEFAULT_MIN_SEP: f64 = 0.1;

/// Resampling rounds before `perturb_sample` gives up.
pub const MAX_SAMPLING_ROUNDS: usize = 1000;

/// Seed for every randomized generator in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent seed for sub-stream `index` (trial numbers etc.).
    pub fn derive(self, index: u64) -> RngSeed {
        // splitmix64 finalizer
        let mut x = self.0 ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        RngSeed(x ^ (x >> 31))
    }
}

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        RngSeed(seed)
    }
}

/// `a_n = (1 - 2⁻ⁿ) exp(i (2/3)ⁿ)`, `n = 1..=N`: a Frostman sequence
/// accumulating at `ζ = 1`.
pub fn frostman_example(n: usize) -> Result<ZeroSequence> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "truncation depth must be positive".into(),
        ));
    }
    if n > FROSTMAN_EXAMPLE_MAX_DEPTH {
        return Err(Error::TruncationTooDeep {
            n,
            max: FROSTMAN_EXAMPLE_MAX_DEPTH,
        });
    }
    let points = (1..=n as i32)
        .map(|k| {
            let modulus = 1.0 - 0.5f64.powi(k);
            let arg = (2.0f64 / 3.0).powi(k);
            DiskPoint::polar(modulus, arg).map_err(|_| Error::TruncationTooDeep {
                n,
                max: k as usize - 1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ZeroSequence::new(points)
}

/// Radial points `(1 - qⁿ) e^{i·arg}`, `n = 1..=N`.
pub fn radial_sequence(q: f64, n: usize, arg: f64) -> Result<ZeroSequence> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "ratio q must lie in (0, 1), got {q}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument(
            "truncation depth must be positive".into(),
        ));
    }
    let points = (1..=n as i32)
        .map(|k| {
            let modulus = 1.0 - q.powi(k);
            DiskPoint::polar(modulus, arg).map_err(|_| Error::TruncationTooDeep {
                n,
                max: k as usize - 1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ZeroSequence::new(points)
}

/// `n` points drawn uniformly from the disk of radius `max_modulus`, with
/// pairwise `ρ ≥ min_sep`.
pub fn random_sequence(
    n: usize,
    min_sep: f64,
    max_modulus: f64,
    seed: RngSeed,
) -> Result<ZeroSequence> {
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    if !(max_modulus > 0.0 && max_modulus < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "max modulus must lie in (0, 1), got {max_modulus}"
        )));
    }
    let mut rng = seed.rng();
    let mut points: Vec<DiskPoint> = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while points.len() < n {
        attempts += 1;
        if attempts > 10_000 * n {
            return Err(Error::SamplingExhausted { rounds: attempts });
        }
        let m = max_modulus * rng.random::<f64>().sqrt();
        let t = TAU * rng.random::<f64>();
        let p = DiskPoint::polar(m, t)?;
        if points
            .iter()
            .all(|q| pseudo_distance(q.z(), p.z()) >= min_sep)
        {
            points.push(p);
        }
    }
    ZeroSequence::new(points)
}

/// Full interleave `[a₁, z₁, a₂, z₂, …]`.
pub fn interlace(a: &ZeroSequence, z: &ZeroSequence) -> Result<ZeroSequence> {
    if a.len() != z.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: z.len(),
        });
    }
    let merged = a.iter().zip(z.iter()).flat_map(|(p, q)| [p, q]).collect();
    ZeroSequence::new(merged)
}

/// Inverse of [`interlace`].
pub fn deinterlace(x: &ZeroSequence) -> Result<(ZeroSequence, ZeroSequence)> {
    if !x.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument(
            "interlaced sequence has odd length".into(),
        ));
    }
    let a = x.iter().step_by(2).collect();
    let z = x.iter().skip(1).step_by(2).collect();
    Ok((ZeroSequence::new(a)?, ZeroSequence::new(z)?))
}

/// Targets interleaved like [`interlace`]: `γ_{2j-1} = α_j`, `γ_{2j} = β_j`.
pub fn interlace_targets(alpha: &TargetVector, beta: &TargetVector) -> Result<TargetVector> {
    if alpha.len() != beta.len() {
        return Err(Error::LengthMismatch {
            expected: alpha.len(),
            found: beta.len(),
        });
    }
    Ok(TargetVector::new(
        alpha
            .values()
            .iter()
            .zip(beta.values())
            .flat_map(|(&p, &q)| [p, q])
            .collect(),
    ))
}

/// Two index-aligned sequences with their separation statistics.
///
/// The statistics are computed once at construction; the struct is
/// immutable afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSequences {
    a: ZeroSequence,
    z: ZeroSequence,
    nearness: f64,
    nearness_index: usize,
    separation: f64,
    separation_pair: (usize, usize),
    z_self_separation: f64,
}

impl PairedSequences {
    pub fn new(a: ZeroSequence, z: ZeroSequence) -> Result<Self> {
        if a.len() != z.len() {
            return Err(Error::LengthMismatch {
                expected: a.len(),
                found: z.len(),
            });
        }
        let (mut nearness, mut nearness_index) = (0.0_f64, 0);
        for (j, (p, q)) in a.iter().zip(z.iter()).enumerate() {
            let d = pseudo_distance(p.z(), q.z());
            if d > nearness {
                nearness = d;
                nearness_index = j;
            }
        }
        let (mut separation, mut separation_pair) = (f64::INFINITY, (0, 0));
        for (j, p) in a.iter().enumerate() {
            for (k, q) in z.iter().enumerate() {
                let d = pseudo_distance(p.z(), q.z());
                if d < separation {
                    separation = d;
                    separation_pair = (j, k);
                }
            }
        }
        let z_self_separation = z.self_separation();
        Ok(PairedSequences {
            a,
            z,
            nearness,
            nearness_index,
            separation,
            separation_pair,
            z_self_separation,
        })
    }

    pub fn a(&self) -> &ZeroSequence {
        &self.a
    }

    pub fn z(&self) -> &ZeroSequence {
        &self.z
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `sup_j ρ(a_j, z_j)`.
    pub fn nearness(&self) -> f64 {
        self.nearness
    }

    pub fn nearness_index(&self) -> usize {
        self.nearness_index
    }

    /// `inf_{j,k} ρ(a_j, z_k)`.
    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn separation_pair(&self) -> (usize, usize) {
        self.separation_pair
    }

    /// `inf_{j≠k} ρ(z_j, z_k)`.
    pub fn z_self_separation(&self) -> f64 {
        self.z_self_separation
    }
}

/// Move every `a_n` to a random point of the pseudohyperbolic disk
/// `D_ρ(a_n, r)`, uniformly with respect to area on its Euclidean image, and
/// resample until the new points are `min_sep`-separated.
pub fn perturb_sample(
    a: &ZeroSequence,
    r: f64,
    seed: RngSeed,
    min_sep: f64,
) -> Result<PairedSequences> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::InvalidArgument(format!(
            "perturbation radius must lie in [0, 1), got {r}"
        )));
    }
    let own_sep = a.self_separation();
    if a.len() > 1 && min_sep >= own_sep {
        return Err(Error::InvalidArgument(format!(
            "min_sep {min_sep} is not below the self-separation {own_sep} of the input"
        )));
    }
    if r == 0.0 {
        return PairedSequences::new(a.clone(), a.clone());
    }

    let disks = a
        .iter()
        .map(|p| pseudo_disk_to_euclidean(p, r))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = seed.rng();
    let draw = |n: usize, rng: &mut ChaCha8Rng| -> DiskPoint {
        loop {
            let rad = disks[n].radius * rng.random::<f64>().sqrt();
            let t = TAU * rng.random::<f64>();
            let w = disks[n].center + Complex64::from_polar(rad, t);
            if let Ok(p) = DiskPoint::from_complex(w) {
                if pseudo_distance(a.points()[n].z(), w) <= r {
                    return p;
                }
            }
        }
    };

    let mut z: Vec<DiskPoint> = (0..a.len()).map(|n| draw(n, &mut rng)).collect();
    for _ in 0..MAX_SAMPLING_ROUNDS {
        let mut offenders = Vec::new();
        for j in 0..z.len() {
            for k in j + 1..z.len() {
                if pseudo_distance(z[j].z(), z[k].z()) < min_sep {
                    offenders.push(k);
                }
            }
        }
        if offenders.is_empty() {
            let paired = PairedSequences::new(a.clone(), ZeroSequence::new(z)?)?;
            debug_assert!(paired.nearness() <= r);
            return Ok(paired);
        }
        offenders.sort_unstable();
        offenders.dedup();
        for k in offenders {
            z[k] = draw(k, &mut rng);
        }
    }
    Err(Error::SamplingExhausted {
        rounds: MAX_SAMPLING_ROUNDS,
    })
}
