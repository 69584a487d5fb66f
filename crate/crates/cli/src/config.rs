//! Sequence files and experiment configurations.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use blaschke_lab::sequences::{
    frostman_example, radial_sequence, random_sequence, DEFAULT_MIN_SEP,
};
use blaschke_lab::{CircleGrid, Complex64, DiskPoint, RngSeed, TargetVector, ZeroSequence};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Length used by generators when neither the source nor a schedule fixes it.
pub const DEFAULT_LENGTH: usize = 20;

/// A zero sequence on disk, with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceFile {
    pub points: Vec<DiskPoint>,
    pub meta: SequenceMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceMeta {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<BTreeMap<String, f64>>,
}

impl SequenceFile {
    pub fn from_sequence(seq: &ZeroSequence, meta: SequenceMeta) -> Self {
        SequenceFile {
            points: seq.points().to_vec(),
            meta,
        }
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("sequence files always serialize");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        fs::write(path, self.to_json()).map_err(|e| CliError::io(path, e))
    }

    pub fn sequence(&self) -> CliResult<ZeroSequence> {
        Ok(ZeroSequence::new(self.points.clone())?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Criteria,
    Interpolate,
    Union,
    Nearby,
    Perturb,
    Shift,
}

/// Where a zero sequence comes from: a file or an inline generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceSource {
    File {
        path: PathBuf,
    },
    FrostmanExample {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
    },
    Radial {
        q: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(default)]
        arg: f64,
    },
    Random {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(default = "default_min_sep")]
        min_sep: f64,
        #[serde(default = "default_max_modulus")]
        max_modulus: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Points {
        points: Vec<DiskPoint>,
    },
}

fn default_min_sep() -> f64 {
    DEFAULT_MIN_SEP
}

fn default_max_modulus() -> f64 {
    0.9
}

impl SequenceSource {
    fn name(&self) -> &'static str {
        match self {
            SequenceSource::File { .. } => "file",
            SequenceSource::FrostmanExample { .. } => "frostman_example",
            SequenceSource::Radial { .. } => "radial",
            SequenceSource::Random { .. } => "random",
            SequenceSource::Points { .. } => "points",
        }
    }

    /// Fill in the length and seed, so the echoed config reproduces the run.
    pub fn resolved(&self, length: usize, seed: RngSeed) -> SequenceSource {
        let mut out = self.clone();
        match &mut out {
            SequenceSource::FrostmanExample { n } | SequenceSource::Radial { n, .. } => {
                n.get_or_insert(length);
            }
            SequenceSource::Random { n, seed: s, .. } => {
                n.get_or_insert(length);
                s.get_or_insert(seed.0);
            }
            SequenceSource::File { .. } | SequenceSource::Points { .. } => {}
        }
        out
    }

    /// Load or generate the sequence. `base` resolves relative file paths.
    pub fn load(&self, base: &Path, length: usize, seed: RngSeed) -> CliResult<ZeroSequence> {
        let seq = match self.resolved(length, seed) {
            SequenceSource::File { path } => SequenceFile::read(&base.join(path))?.sequence()?,
            SequenceSource::FrostmanExample { n } => frostman_example(n.expect("resolved"))?,
            SequenceSource::Radial { q, n, arg } => radial_sequence(q, n.expect("resolved"), arg)?,
            SequenceSource::Random {
                n,
                min_sep,
                max_modulus,
                seed,
            } => random_sequence(
                n.expect("resolved"),
                min_sep,
                max_modulus,
                RngSeed(seed.expect("resolved")),
            )?,
            SequenceSource::Points { points } => ZeroSequence::new(points)?,
        };
        Ok(seq)
    }

    /// Explicit length of the source, if it has one.
    pub fn fixed_length(&self) -> Option<usize> {
        match self {
            SequenceSource::FrostmanExample { n }
            | SequenceSource::Radial { n, .. }
            | SequenceSource::Random { n, .. } => *n,
            SequenceSource::Points { points } => Some(points.len()),
            SequenceSource::File { .. } => None,
        }
    }

    pub fn meta(&self) -> SequenceMeta {
        let mut params = BTreeMap::new();
        match self {
            SequenceSource::FrostmanExample { n } => {
                if let Some(n) = n {
                    params.insert("n".to_string(), *n as f64);
                }
            }
            SequenceSource::Radial { q, n, arg } => {
                params.insert("q".to_string(), *q);
                params.insert("arg".to_string(), *arg);
                if let Some(n) = n {
                    params.insert("n".to_string(), *n as f64);
                }
            }
            SequenceSource::Random {
                n,
                min_sep,
                max_modulus,
                seed,
            } => {
                params.insert("min_sep".to_string(), *min_sep);
                params.insert("max_modulus".to_string(), *max_modulus);
                if let Some(n) = n {
                    params.insert("n".to_string(), *n as f64);
                }
                if let Some(s) = seed {
                    params.insert("seed".to_string(), *s as f64);
                }
            }
            SequenceSource::File { .. } | SequenceSource::Points { .. } => {}
        }
        SequenceMeta {
            name: self.name().to_string(),
            generator: Some(self.name().to_string()),
            params: (!params.is_empty()).then_some(params),
        }
    }
}

/// Interpolation targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    Constant {
        #[serde(default = "one")]
        re: f64,
        #[serde(default)]
        im: f64,
    },
    Values {
        values: Vec<Complex64>,
    },
    /// Independent uniform phases on the unit circle.
    RandomUnit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Independent uniform samples from the square `[-1, 1]²`.
    RandomBox {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

fn one() -> f64 {
    1.0
}

impl Default for TargetSpec {
    fn default() -> Self {
        TargetSpec::Constant { re: 1.0, im: 0.0 }
    }
}

impl TargetSpec {
    pub fn resolved(&self, seed: RngSeed) -> TargetSpec {
        let mut out = self.clone();
        if let TargetSpec::RandomUnit { seed: s } | TargetSpec::RandomBox { seed: s } = &mut out {
            s.get_or_insert(seed.0);
        }
        out
    }

    pub fn build(&self, len: usize, seed: RngSeed) -> CliResult<TargetVector> {
        let values = match self.resolved(seed) {
            TargetSpec::Constant { re, im } => vec![Complex64::new(re, im); len],
            TargetSpec::Values { values } => {
                if values.len() != len {
                    return Err(CliError::config(format!(
                        "target vector has {} values but the sequence has {len} points",
                        values.len()
                    )));
                }
                values
            }
            TargetSpec::RandomUnit { seed } => {
                let mut rng = RngSeed(seed.expect("resolved")).rng();
                (0..len)
                    .map(|_| {
                        Complex64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>())
                    })
                    .collect()
            }
            TargetSpec::RandomBox { seed } => {
                let mut rng = RngSeed(seed.expect("resolved")).rng();
                (0..len)
                    .map(|_| {
                        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                    })
                    .collect()
            }
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CliError::config("target values must be finite"));
        }
        Ok(TargetVector::new(values))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<SequenceSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<SequenceSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<TargetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<TargetSpec>,
    /// The point `a` of a Frostman shift `φ_a ∘ B`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<DiskPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed `|f(a_j) - α_j|`, relative to `1 + ‖α‖`.
    #[serde(default = "default_interpolation_tol")]
    pub interpolation: f64,
    /// Residual at which the nearby iteration stops.
    #[serde(default = "default_nearby_tol")]
    pub nearby: f64,
}

fn default_interpolation_tol() -> f64 {
    1e-8
}

fn default_nearby_tol() -> f64 {
    1e-10
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            interpolation: default_interpolation_tol(),
            nearby: default_nearby_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Monte Carlo trials per radius (`perturb`).
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Perturbation radii (`perturb`).
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    /// Minimum self-separation of sampled perturbations.
    #[serde(default = "default_min_sep")]
    pub min_sep: f64,
    /// Correction steps after the first solve (`nearby`).
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// When `nearby` has no `z` input, perturb `a` with radius
    /// `nearness_fraction / (2M)`.
    #[serde(default = "default_nearness_fraction")]
    pub nearness_fraction: f64,
    /// Circle samples in plot series.
    #[serde(default = "default_plot_samples")]
    pub plot_samples: usize,
}

fn default_trials() -> usize {
    100
}

fn default_radii() -> Vec<f64> {
    vec![0.3, 0.5, 0.7]
}

fn default_max_iter() -> usize {
    60
}

fn default_nearness_fraction() -> f64 {
    0.5
}

fn default_plot_samples() -> usize {
    512
}

impl Default for Params {
    fn default() -> Self {
        Params {
            trials: default_trials(),
            radii: default_radii(),
            min_sep: default_min_sep(),
            max_iter: default_max_iter(),
            nearness_fraction: default_nearness_fraction(),
            plot_samples: default_plot_samples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default)]
    pub inputs: Inputs,
    #[serde(default)]
    pub grid: CircleGrid,
    #[serde(default)]
    pub seed: RngSeed,
    #[serde(default)]
    pub n_schedule: Vec<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub params: Params,
}

impl ExperimentConfig {
    pub fn new(kind: Kind) -> Self {
        ExperimentConfig {
            kind,
            inputs: Inputs::default(),
            grid: CircleGrid::default(),
            seed: RngSeed::default(),
            n_schedule: Vec::new(),
            tolerances: Tolerances::default(),
            params: Params::default(),
        }
    }

    /// Parse TOML, or JSON when the text starts with `{`.
    pub fn parse(text: &str) -> CliResult<Self> {
        let config: ExperimentConfig = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| CliError::config(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| CliError::config(e.to_string()))?
        };
        config.validate()?;
        Ok(config)
    }

    /// Read a config file. Returns the config and the directory relative
    /// file inputs are resolved against.
    pub fn read(path: &Path) -> CliResult<(Self, PathBuf)> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let config = Self::parse(&text).map_err(|e| match e {
            CliError::ConfigInvalid(m) => CliError::config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((config, base))
    }

    pub fn validate(&self) -> CliResult<()> {
        self.grid
            .validate()
            .map_err(|e| CliError::config(e.to_string()))?;
        if self.inputs.a.is_none() {
            return Err(CliError::config("inputs.a is required"));
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::config(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        positive("tolerances.interpolation", self.tolerances.interpolation)?;
        positive("tolerances.nearby", self.tolerances.nearby)?;
        if !(0.0..1.0).contains(&self.params.min_sep) {
            return Err(CliError::config("params.min_sep must lie in [0, 1)"));
        }
        if self.params.plot_samples < 2 {
            return Err(CliError::config("params.plot_samples must be at least 2"));
        }
        match self.kind {
            Kind::Criteria => {
                if self.n_schedule.is_empty() {
                    return Err(CliError::config(
                        "criteria runs need a non-empty n_schedule",
                    ));
                }
                if self.n_schedule.contains(&0) {
                    return Err(CliError::config("n_schedule entries must be positive"));
                }
                let max = *self.n_schedule.iter().max().expect("non-empty");
                for (name, src) in [("a", &self.inputs.a), ("z", &self.inputs.z)] {
                    if let Some(n) = src.as_ref().and_then(SequenceSource::fixed_length) {
                        if n < max {
                            return Err(CliError::config(format!(
                                "inputs.{name} has {n} points but n_schedule reaches {max}"
                            )));
                        }
                    }
                }
            }
            Kind::Union => {
                if self.inputs.z.is_none() {
                    return Err(CliError::config("union runs need inputs.z"));
                }
            }
            Kind::Nearby => {
                positive("params.nearness_fraction", self.params.nearness_fraction)?;
            }
            Kind::Perturb => {
                if self.params.trials == 0 {
                    return Err(CliError::config("params.trials must be positive"));
                }
                if self.params.radii.is_empty()
                    || self.params.radii.iter().any(|r| !(*r > 0.0 && *r < 1.0))
                {
                    return Err(CliError::config(
                        "params.radii must be non-empty with entries in (0, 1)",
                    ));
                }
            }
            Kind::Interpolate | Kind::Shift => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_toml_fills_defaults() {
        let c = ExperimentConfig::parse(
            r#"
kind = "criteria"
n_schedule = [10, 20]
[inputs.a]
generator = "frostman_example"
"#,
        )
        .unwrap();
        assert_eq!(c.grid, CircleGrid::default());
        assert_eq!(c.params, Params::default());
        assert_eq!(c.seed, RngSeed(0));
    }

    #[test]
    fn unknown_keys_rejected() {
        for text in [
            "kind = \"shift\"\nbogus = 1\n[inputs.a]\ngenerator = \"frostman_example\"\n",
            "kind = \"shift\"\n[inputs.a]\ngenerator = \"frostman_example\"\nq = 0.5\n",
            "kind = \"shift\"\n[grid]\nbase_count = 512\nrefinement_rounds = 1\nextra = 3\n[inputs.a]\ngenerator = \"frostman_example\"\n",
        ] {
            assert!(matches!(ExperimentConfig::parse(text), Err(CliError::ConfigInvalid(_))), "{text}");
        }
    }

    #[test]
    fn empty_schedule_rejected() {
        let err = ExperimentConfig::parse(
            "kind = \"criteria\"\n[inputs.a]\ngenerator = \"frostman_example\"\n",
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn sequence_file_round_trip_is_exact() {
        let seq = random_sequence(25, 0.05, 0.999, RngSeed(3)).unwrap();
        let file = SequenceFile::from_sequence(
            &seq,
            SequenceMeta {
                name: "t".into(),
                generator: None,
                params: None,
            },
        );
        let back = SequenceFile::parse(&file.to_json()).unwrap();
        assert_eq!(back, file);
        for (p, q) in back.points.iter().zip(seq.points()) {
            assert_eq!(p.re().to_bits(), q.re().to_bits());
            assert_eq!(p.im().to_bits(), q.im().to_bits());
        }
    }

    #[test]
    fn points_outside_disk_rejected() {
        let text = r#"{"points":[{"re":0.5,"im":0.0},{"re":1.0,"im":0.0}],"meta":{"name":"bad"}}"#;
        assert!(SequenceFile::parse(text).is_err());
    }
}
