//! Supremum estimation over the unit circle.
//!
//! A uniform grid (plus caller-supplied arguments) is scanned, the best
//! local maxima are refined by golden-section search, and the largest value
//! ever evaluated is reported. Refinement only adds candidates, so the
//! estimate never drops below the plain grid maximum.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::CirclePoint;

pub const DEFAULT_BASE_COUNT: usize = 4096;
pub const DEFAULT_REFINEMENT_ROUNDS: usize = 3;
pub const MIN_BASE_COUNT: usize = 256;

/// Number of local maxima handed to the refinement stage.
const REFINED_CANDIDATES: usize = 8;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleGrid {
    pub base_count: usize,
    pub refinement_rounds: usize,
    #[serde(default)]
    pub extra_args: Vec<f64>,
}

impl Default for CircleGrid {
    fn default() -> Self {
        CircleGrid {
            base_count: DEFAULT_BASE_COUNT,
            refinement_rounds: DEFAULT_REFINEMENT_ROUNDS,
            extra_args: Vec::new(),
        }
    }
}

impl CircleGrid {
    pub fn new(base_count: usize, refinement_rounds: usize) -> Result<Self> {
        let grid = CircleGrid {
            base_count,
            refinement_rounds,
            extra_args: Vec::new(),
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_count < MIN_BASE_COUNT {
            return Err(Error::InvalidArgument(format!(
                "grid base_count must be at least {MIN_BASE_COUNT}, got {}",
                self.base_count
            )));
        }
        if self.extra_args.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument(
                "grid extra_args must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Copy of the grid with additional arguments injected.
    pub fn with_extra_args(&self, args: impl IntoIterator<Item = f64>) -> CircleGrid {
        let mut grid = self.clone();
        grid.extra_args
            .extend(args.into_iter().map(|t| CirclePoint::new(t).arg()));
        grid.extra_args.sort_by(f64::total_cmp);
        grid.extra_args.dedup();
        grid
    }

    pub fn step(&self) -> f64 {
        TAU / self.base_count as f64
    }

    /// All scan arguments in increasing order, duplicates removed.
    pub fn args(&self) -> Vec<f64> {
        let mut args: Vec<f64> = (0..self.base_count)
            .map(|k| TAU * k as f64 / self.base_count as f64)
            .chain(self.extra_args.iter().map(|&t| CirclePoint::new(t).arg()))
            .collect();
        args.sort_by(f64::total_cmp);
        args.dedup();
        args
    }
}

/// Result of a circle supremum scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleMax {
    pub value: f64,
    pub at: CirclePoint,
    /// Argument at which `value` was evaluated, before normalization.
    pub raw_arg: f64,
    pub grid_value: f64,
    pub evaluations: usize,
}

/// Estimate `sup_{θ} f(θ)` for a `2π`-periodic `f`.
pub fn circle_sup<F>(f: F, grid: &CircleGrid) -> CircleMax
where
    F: Fn(f64) -> f64 + Sync,
{
    let args = grid.args();
    let values: Vec<f64> = args.par_iter().map(|&t| f(t)).collect();
    let n = args.len();

    let (mut best_t, mut best_v) = (args[0], values[0]);
    for (&t, &v) in args.iter().zip(&values) {
        if v > best_v {
            best_t = t;
            best_v = v;
        }
    }
    let grid_value = best_v;
    let mut evaluations = n;

    // local maxima of the cyclic scan, best first, ties broken by position
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&i| {
            let prev = values[(i + n - 1) % n];
            let next = values[(i + 1) % n];
            values[i] >= prev && values[i] >= next
        })
        .collect();
    peaks.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    peaks.truncate(REFINED_CANDIDATES);

    let refined: Vec<(f64, f64, usize)> = peaks
        .par_iter()
        .map(|&i| {
            let lo = if i == 0 {
                args[n - 1] - TAU
            } else {
                args[i - 1]
            };
            let hi = if i + 1 == n {
                args[0] + TAU
            } else {
                args[i + 1]
            };
            refine_peak(&f, args[i], values[i], lo, hi, grid.refinement_rounds)
        })
        .collect();
    for (t, v, evals) in refined {
        evaluations += evals;
        if v > best_v {
            best_t = t;
            best_v = v;
        }
    }

    CircleMax {
        value: best_v,
        at: CirclePoint::new(best_t),
        raw_arg: best_t,
        grid_value,
        evaluations,
    }
}

/// Golden-section refinement of one grid peak. Each round restarts from the
/// best point so far with a bracket shrunk by a factor of four.
fn refine_peak<F: Fn(f64) -> f64>(
    f: &F,
    t0: f64,
    v0: f64,
    lo: f64,
    hi: f64,
    rounds: usize,
) -> (f64, f64, usize) {
    let (mut best_t, mut best_v) = (t0, v0);
    let mut evals = 0;
    let mut half = 0.5 * (hi - lo);
    let (mut a, mut b) = (lo, hi);
    for _ in 0..rounds {
        let (t, v, e) = golden_max(f, a, b);
        evals += e;
        if v > best_v {
            best_t = t;
            best_v = v;
        }
        half *= 0.25;
        a = best_t - half;
        b = best_t + half;
    }
    (best_t, best_v, evals)
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> (f64, f64, usize) {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let (mut best_t, mut best_v) = if fc >= fd { (c, fc) } else { (d, fd) };
    let mut evals = 2;
    while b - a > 1e-15 * (1.0 + a.abs().max(b.abs())) && evals < 200 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
            if fc > best_v {
                best_t = c;
                best_v = fc;
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
            if fd > best_v {
                best_t = d;
                best_v = fd;
            }
        }
        evals += 1;
    }
    (best_t, best_v, evals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(CircleGrid::new(128, 3).is_err());
        assert!(CircleGrid::new(256, 0).is_ok());
        let g = CircleGrid::default().with_extra_args([0.1, -0.1, 0.1]);
        assert_eq!(g.extra_args.len(), 2);
        assert_eq!(g.args().len(), 4096 + 2);
    }

    #[test]
    fn finds_off_grid_peak() {
        let peak = 1.234_567_89;
        let f = |t: f64| (t - peak).cos() - 1.0;
        let grid = CircleGrid::new(256, 3).unwrap();
        let m = circle_sup(f, &grid);
        assert!(m.value >= m.grid_value);
        assert!((m.at.arg() - peak).abs() < 1e-7, "{}", m.at.arg());
        assert!(m.value > -1e-14);
    }

    #[test]
    fn refinement_never_decreases() {
        let f = |t: f64| (3.0 * t).cos() + 0.3 * (7.0 * t).sin();
        let mut grid = CircleGrid::new(256, 0).unwrap();
        let base = circle_sup(f, &grid);
        for rounds in 1..5 {
            grid.refinement_rounds = rounds;
            let m = circle_sup(f, &grid);
            assert!(m.value >= base.value);
            assert_eq!(m.grid_value, base.grid_value);
        }
    }

    #[test]
    fn peak_at_wraparound() {
        let f = |t: f64| (t - 1e-4).cos();
        let m = circle_sup(f, &CircleGrid::new(256, 3).unwrap());
        assert!((m.value - 1.0).abs() < 1e-15);
    }
}
