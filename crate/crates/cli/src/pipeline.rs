//! Experiment dispatch: config in, report bundle out.

use std::f64::consts::TAU;
use std::path::Path;

use blaschke_lab::criteria::{
    carleson, cohn_sum, cross_modulus, dyakonov_sup, frostman_sum, nearness, perturbation_report,
    separation, vasyunin_sum, HARD_SLACK,
};
use blaschke_lab::interpolation::{
    frostman_shift_zeros, interpolate_union, lebesgue_constant, nearby_iterate_with_grid, solve_kb,
    sup_norm,
};
use blaschke_lab::sequences::{interlace_targets, perturb_sample};
use blaschke_lab::{
    BlaschkeProduct, CircleGrid, Complex64, DiskPoint, PairedSequences, RngSeed, Witness,
    ZeroSequence,
};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Kind, SequenceSource, DEFAULT_LENGTH};
use crate::error::{CliError, CliResult};
use crate::report::*;

/// Default Frostman shift point.
pub const DEFAULT_SHIFT: f64 = 0.3;

const STREAM_A: u64 = 0;
const STREAM_Z: u64 = 1;
const STREAM_ALPHA: u64 = 2;
const STREAM_BETA: u64 = 3;
const STREAM_PERTURB: u64 = 4;
const TRIAL_STRIDE: u64 = 1 << 32;

pub fn run(config: &ExperimentConfig, base: &Path) -> CliResult<ReportBundle> {
    config.validate()?;
    let mut ctx = Context::new(config, base);
    let (results, tables, series) = match config.kind {
        Kind::Criteria => ctx.criteria()?,
        Kind::Interpolate => ctx.interpolate()?,
        Kind::Union => ctx.union()?,
        Kind::Nearby => ctx.nearby()?,
        Kind::Perturb => ctx.perturb()?,
        Kind::Shift => ctx.shift()?,
    };
    Ok(ReportBundle {
        config: ctx.echo,
        results,
        tables,
        series,
    })
}

type Output = (Results, Vec<Table>, Vec<Series>);

struct Context<'a> {
    config: &'a ExperimentConfig,
    base: &'a Path,
    /// The config with resolved inputs, echoed into the bundle.
    echo: ExperimentConfig,
}

impl<'a> Context<'a> {
    fn new(config: &'a ExperimentConfig, base: &'a Path) -> Self {
        Context {
            config,
            base,
            echo: config.clone(),
        }
    }

    fn seed(&self, stream: u64) -> RngSeed {
        self.config.seed.derive(stream)
    }

    fn length(&self, src: &SequenceSource) -> usize {
        match self.config.kind {
            Kind::Criteria => *self.config.n_schedule.iter().max().expect("validated"),
            _ => src.fixed_length().unwrap_or(DEFAULT_LENGTH),
        }
    }

    fn sequence_a(&mut self) -> CliResult<ZeroSequence> {
        let src = self.config.inputs.a.clone().expect("validated");
        let (len, seed) = (self.length(&src), self.seed(STREAM_A));
        self.echo.inputs.a = Some(src.resolved(len, seed));
        src.load(self.base, len, seed)
    }

    fn sequence_z(&mut self, len: usize) -> CliResult<Option<ZeroSequence>> {
        let Some(src) = self.config.inputs.z.clone() else {
            return Ok(None);
        };
        let seed = self.seed(STREAM_Z);
        let len = src.fixed_length().unwrap_or(len);
        self.echo.inputs.z = Some(src.resolved(len, seed));
        let z = src.load(self.base, len, seed)?;
        Ok(Some(z))
    }

    fn targets(&mut self, beta: bool, len: usize) -> CliResult<blaschke_lab::TargetVector> {
        let (spec, seed) = if beta {
            (
                self.config.inputs.beta.clone().unwrap_or_default(),
                self.seed(STREAM_BETA),
            )
        } else {
            (
                self.config.inputs.alpha.clone().unwrap_or_default(),
                self.seed(STREAM_ALPHA),
            )
        };
        let resolved = spec.resolved(seed);
        if beta {
            self.echo.inputs.beta = Some(resolved.clone());
        } else {
            self.echo.inputs.alpha = Some(resolved.clone());
        }
        resolved.build(len, seed)
    }

    fn circle_samples(&self) -> Vec<f64> {
        let n = self.config.params.plot_samples;
        (0..n).map(|k| TAU * k as f64 / n as f64).collect()
    }

    fn grid(&self) -> &CircleGrid {
        &self.config.grid
    }

    fn criteria(&mut self) -> CliResult<Output> {
        let a_full = self.sequence_a()?;
        let max = *self.config.n_schedule.iter().max().expect("validated");
        if a_full.len() < max {
            return Err(CliError::config(format!(
                "inputs.a has {} points but n_schedule reaches {max}",
                a_full.len()
            )));
        }
        let z_full = self.sequence_z(max)?;
        if let Some(z) = &z_full {
            if z.len() < max {
                return Err(CliError::config(format!(
                    "inputs.z has {} points but n_schedule reaches {max}",
                    z.len()
                )));
            }
        }

        let mut rows = Vec::new();
        let mut reports = Vec::new();
        for &n in &self.config.n_schedule {
            let a = a_full.truncate(n)?;
            let b = BlaschkeProduct::new(a.clone());
            let alpha = self.targets(false, n)?;
            let car = carleson(&b)?;
            let fro = frostman_sum(&a, self.grid())?;
            let coh = cohn_sum(&a);
            let dya = dyakonov_sup(&b, &alpha)?;
            let mut row = CriteriaRow {
                n,
                carleson: car.value,
                frostman: fro.value,
                frostman_arg: match fro.witness {
                    Witness::Circle(c) => c.arg(),
                    _ => 0.0,
                },
                cohn: coh.value,
                vasyunin: vasyunin_sum(&a),
                dyakonov: dya.value,
                cross_modulus: None,
                separation: None,
                nearness: None,
            };
            let mut extra = Vec::new();
            if let Some(z_full) = &z_full {
                let z = z_full.truncate(n)?;
                let cm = cross_modulus(&b, &z)?;
                let pair = PairedSequences::new(a.clone(), z)?;
                let sep = separation(&pair);
                let near = nearness(&pair);
                row.cross_modulus = Some(cm.value);
                row.separation = Some(sep.value);
                row.nearness = Some(near.value);
                extra = vec![cm, sep, near];
            }
            rows.push(row);
            if n == max {
                reports = vec![car, fro, coh, dya];
                reports.extend(extra);
            }
        }

        let mut trend = Table::new(
            "criteria",
            &[
                "n",
                "carleson",
                "frostman",
                "frostman_arg",
                "cohn",
                "vasyunin",
                "dyakonov",
                "cross_modulus",
                "separation",
                "nearness",
            ],
        );
        for r in &rows {
            trend.push(vec![
                r.n.into(),
                r.carleson.into(),
                r.frostman.into(),
                r.frostman_arg.into(),
                r.cohn.into(),
                r.vasyunin.into(),
                r.dyakonov.into(),
                r.cross_modulus.into(),
                r.separation.into(),
                r.nearness.into(),
            ]);
        }
        let mut tables = vec![trend];
        tables.extend(reports.iter().map(Table::from_report));

        let column = |f: fn(&CriteriaRow) -> f64| {
            rows.iter().map(|r| (r.n as f64, f(r))).collect::<Vec<_>>()
        };
        let series = vec![
            Series::new("carleson_vs_n", "n", "carleson", column(|r| r.carleson)),
            Series::new("frostman_vs_n", "n", "frostman", column(|r| r.frostman)),
            Series::new("cohn_vs_n", "n", "cohn", column(|r| r.cohn)),
            Series::new("vasyunin_vs_n", "n", "vasyunin", column(|r| r.vasyunin)),
            Series::new("dyakonov_vs_n", "n", "dyakonov", column(|r| r.dyakonov)),
        ];
        Ok((
            Results::Criteria(CriteriaResults { rows, reports }),
            tables,
            series,
        ))
    }

    fn interpolate(&mut self) -> CliResult<Output> {
        let a = self.sequence_a()?;
        let n = a.len();
        let b = BlaschkeProduct::new(a.clone());
        let alpha = self.targets(false, n)?;
        let f = solve_kb(&b, &alpha)?;
        let values: Vec<Complex64> = a.iter().map(|p| f.eval(p.z())).collect();
        let errors: Vec<f64> = values
            .iter()
            .zip(alpha.values())
            .map(|(v, t)| (v - t).norm())
            .collect();
        let max_node_error = errors.iter().copied().fold(0.0, f64::max);
        let results = InterpolateResults {
            n,
            points: a.points().to_vec(),
            targets: alpha.values().to_vec(),
            values_at_nodes: values.clone(),
            max_node_error,
            within_tolerance: max_node_error
                <= self.config.tolerances.interpolation * (1.0 + alpha.sup_norm()),
            kernel_coeffs: f.kernel_coeffs().map(<[Complex64]>::to_vec),
            kernel_residual: Some(f.kernel_residual()).filter(|r| r.is_finite()),
            sup_norm: sup_norm(&f, self.grid())?,
            lebesgue_constant: lebesgue_constant(&b, self.grid())?,
            dyakonov: dyakonov_sup(&b, &alpha)?.value,
        };

        let mut nodes = Table::new(
            "nodes",
            &[
                "index",
                "a_re",
                "a_im",
                "target_re",
                "target_im",
                "value_re",
                "value_im",
                "error",
            ],
        );
        for (j, p) in a.iter().enumerate() {
            let (t, v) = (alpha.values()[j], values[j]);
            nodes.push(vec![
                j.into(),
                p.re().into(),
                p.im().into(),
                t.re.into(),
                t.im.into(),
                v.re.into(),
                v.im.into(),
                errors[j].into(),
            ]);
        }
        let mut summary = Table::new("summary", &["quantity", "value"]);
        summary.push(vec!["max_node_error".into(), results.max_node_error.into()]);
        summary.push(vec!["sup_norm".into(), results.sup_norm.into()]);
        summary.push(vec![
            "lebesgue_constant".into(),
            results.lebesgue_constant.into(),
        ]);
        summary.push(vec!["dyakonov".into(), results.dyakonov.into()]);
        summary.push(vec![
            "kernel_residual".into(),
            results.kernel_residual.into(),
        ]);

        let modulus = self
            .circle_samples()
            .into_iter()
            .map(|t| (t, f.eval(Complex64::from_polar(1.0, t)).norm()))
            .collect();
        let series = vec![Series::new(
            "interpolant_modulus",
            "theta",
            "abs_f",
            modulus,
        )];
        Ok((Results::Interpolate(results), vec![nodes, summary], series))
    }

    fn union(&mut self) -> CliResult<Output> {
        let a = self.sequence_a()?;
        let n = a.len();
        let z = self.sequence_z(n)?.expect("validated");
        let (b, c) = (
            BlaschkeProduct::new(a.clone()),
            BlaschkeProduct::new(z.clone()),
        );
        let alpha = self.targets(false, n)?;
        let beta = self.targets(true, z.len())?;
        let g = interpolate_union(&b, &c, &alpha, &beta)?;

        let values_at_a: Vec<Complex64> = a.iter().map(|p| g.eval(p.z())).collect();
        let values_at_z: Vec<Complex64> = z.iter().map(|p| g.eval(p.z())).collect();
        let g2_at_a: Vec<f64> = a.iter().map(|p| g.g2(p.z()).norm()).collect();
        let g1_at_z: Vec<f64> = z.iter().map(|p| g.g1(p.z()).norm()).collect();
        let err_a: Vec<f64> = values_at_a
            .iter()
            .zip(alpha.values())
            .map(|(v, t)| (v - t).norm())
            .collect();
        let err_z: Vec<f64> = values_at_z
            .iter()
            .zip(beta.values())
            .map(|(v, t)| (v - t).norm())
            .collect();
        let max_node_error = err_a.iter().chain(&err_z).copied().fold(0.0, f64::max);

        let merged = solve_kb(&g.merged_product()?, &interlace_targets(&alpha, &beta)?)?;
        let samples = self.circle_samples();
        let merged_difference = samples
            .iter()
            .map(|&t| {
                let w = Complex64::from_polar(1.0, t);
                (g.eval(w) - merged.eval(w)).norm()
            })
            .fold(0.0, f64::max);

        let results = UnionResults {
            n,
            separation: g.separation(),
            tilde_gamma: g.tilde_gamma().to_vec(),
            values_at_a: values_at_a.clone(),
            values_at_z: values_at_z.clone(),
            g2_at_a: g2_at_a.clone(),
            g1_at_z: g1_at_z.clone(),
            max_node_error,
            within_tolerance: max_node_error
                <= 10.0 * self.config.tolerances.interpolation * (1.0 + g.target_norm()),
            merged_difference,
            sup_norm: sup_norm(&g, self.grid())?,
        };

        let mut nodes = Table::new(
            "nodes",
            &[
                "index",
                "set",
                "re",
                "im",
                "target_re",
                "target_im",
                "value_re",
                "value_im",
                "error",
                "other_part",
            ],
        );
        for j in 0..n {
            for (set, p, t, v, e, o) in [
                (
                    "a",
                    a.points()[j],
                    alpha.values()[j],
                    values_at_a[j],
                    err_a[j],
                    g2_at_a[j],
                ),
                (
                    "z",
                    z.points()[j],
                    beta.values()[j],
                    values_at_z[j],
                    err_z[j],
                    g1_at_z[j],
                ),
            ] {
                nodes.push(vec![
                    j.into(),
                    set.into(),
                    p.re().into(),
                    p.im().into(),
                    t.re.into(),
                    t.im.into(),
                    v.re.into(),
                    v.im.into(),
                    e.into(),
                    o.into(),
                ]);
            }
        }
        let mut summary = Table::new("summary", &["quantity", "value"]);
        summary.push(vec!["separation".into(), results.separation.into()]);
        summary.push(vec!["max_node_error".into(), results.max_node_error.into()]);
        summary.push(vec![
            "merged_difference".into(),
            results.merged_difference.into(),
        ]);
        summary.push(vec!["sup_norm".into(), results.sup_norm.into()]);

        let modulus = samples
            .iter()
            .map(|&t| (t, g.eval(Complex64::from_polar(1.0, t)).norm()))
            .collect();
        let series = vec![Series::new("union_modulus", "theta", "abs_g", modulus)];
        Ok((Results::Union(results), vec![nodes, summary], series))
    }

    fn nearby(&mut self) -> CliResult<Output> {
        let a = self.sequence_a()?;
        let n = a.len();
        let b = BlaschkeProduct::new(a.clone());
        let z = match self.sequence_z(n)? {
            Some(z) => z,
            None => {
                let m = lebesgue_constant(&b, self.grid())?;
                let r = self.config.params.nearness_fraction / (2.0 * m);
                if r >= 1.0 {
                    return Err(CliError::config(format!(
                        "perturbation radius {r} is not below 1"
                    )));
                }
                let seed = self.seed(STREAM_Z);
                let p = perturb_sample(
                    &a,
                    r,
                    seed,
                    self.config.params.min_sep.min(0.5 * a.self_separation()),
                )?;
                self.echo.inputs.z = Some(SequenceSource::Points {
                    points: p.z().points().to_vec(),
                });
                p.z().clone()
            }
        };
        let alpha = self.targets(false, n)?;
        let (f, trace) = nearby_iterate_with_grid(
            &b,
            &z,
            &alpha,
            self.config.params.max_iter,
            self.config.tolerances.nearby,
            self.grid(),
        )?;
        let values_at_z: Vec<Complex64> = z.iter().map(|p| f.eval(p.z())).collect();
        let max_node_error = values_at_z
            .iter()
            .zip(alpha.values())
            .map(|(v, t)| (v - t).norm())
            .fold(0.0, f64::max);

        let mut table = Table::new("trace", &["step", "residual_sup", "bound"]);
        for (m, (r, bnd)) in trace
            .residual_sup
            .iter()
            .zip(&trace.bound_curve)
            .enumerate()
        {
            table.push(vec![m.into(), (*r).into(), (*bnd).into()]);
        }
        let mut summary = Table::new("summary", &["quantity", "value"]);
        summary.push(vec!["lebesgue_constant".into(), trace.m_used.into()]);
        summary.push(vec!["nearness".into(), trace.nearness.into()]);
        summary.push(vec!["threshold".into(), trace.threshold.into()]);
        summary.push(vec!["ratio".into(), trace.ratio().into()]);
        summary.push(vec!["warning".into(), trace.warning.into()]);
        summary.push(vec!["converged".into(), trace.converged.into()]);
        summary.push(vec!["max_node_error".into(), max_node_error.into()]);

        let indexed = |v: &[f64]| {
            v.iter()
                .enumerate()
                .map(|(m, &x)| (m as f64, x))
                .collect::<Vec<_>>()
        };
        let series = vec![
            Series::new(
                "residual",
                "step",
                "residual_sup",
                indexed(&trace.residual_sup),
            ),
            Series::new("bound", "step", "bound", indexed(&trace.bound_curve)),
        ];
        let results = NearbyResults {
            n,
            z: z.points().to_vec(),
            values_at_z,
            max_node_error,
            sup_norm: sup_norm(&f, self.grid())?,
            trace,
        };
        Ok((Results::Nearby(results), vec![table, summary], series))
    }

    fn perturb(&mut self) -> CliResult<Output> {
        let a = self.sequence_a()?;
        let n = a.len();
        let params = &self.config.params;
        let min_sep = params.min_sep.min(0.5 * a.self_separation());
        let frostman_a = frostman_sum(&a, self.grid())?.value;
        let base_seed = self.seed(STREAM_PERTURB);
        let grid = self.grid().clone();

        let mut trials = Vec::new();
        let mut summaries = Vec::new();
        for (ri, &r) in params.radii.iter().enumerate() {
            let batch = (0..params.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = base_seed.derive(ri as u64 * TRIAL_STRIDE + t as u64);
                    let p = perturb_sample(&a, r, seed, min_sep)?;
                    let report = perturbation_report(&p, r, &grid)?;
                    Ok(PerturbTrial {
                        radius: r,
                        trial: t,
                        seed: seed.0,
                        nearness: p.nearness(),
                        report,
                    })
                })
                .collect::<blaschke_lab::Result<Vec<_>>>()?;
            summaries.push(summarize(r, &batch));
            trials.extend(batch);
        }

        let mut summary = Table::new(
            "summary",
            &[
                "radius",
                "c_r",
                "trials",
                "violations",
                "pseudo_violations",
                "envelope_failures",
                "min_d1",
                "max_d2",
                "min_c1",
                "max_c2",
                "min_c3",
                "min_c4",
                "max_frostman_z",
                "d_bounds_hold",
            ],
        );
        for s in &summaries {
            summary.push(vec![
                s.radius.into(),
                s.c_r.into(),
                s.trials.into(),
                s.violations.into(),
                s.pseudo_violations.into(),
                s.envelope_failures.into(),
                s.min_d1.into(),
                s.max_d2.into(),
                s.min_c1.into(),
                s.max_c2.into(),
                s.min_c3.into(),
                s.min_c4.into(),
                s.max_frostman_z.into(),
                s.d_bounds_hold.into(),
            ]);
        }
        let mut per_trial = Table::new(
            "trials",
            &[
                "radius",
                "trial",
                "nearness",
                "d1",
                "d2",
                "c1",
                "c2",
                "c4",
                "frostman_z",
                "violations",
                "pseudo_violations",
                "envelope_ok",
            ],
        );
        for t in &trials {
            let rep = &t.report;
            per_trial.push(vec![
                t.radius.into(),
                t.trial.into(),
                t.nearness.into(),
                rep.empirical_d1.into(),
                rep.empirical_d2.into(),
                rep.empirical_c1.into(),
                rep.empirical_c2.into(),
                rep.empirical_c4.into(),
                rep.frostman_z.into(),
                rep.violations.into(),
                rep.pseudo_violations.into(),
                rep.frostman_envelope_ok.into(),
            ]);
        }
        let series = summaries
            .iter()
            .map(|s| {
                let points = trials
                    .iter()
                    .filter(|t| t.radius == s.radius)
                    .map(|t| (t.trial as f64, t.report.frostman_z))
                    .collect();
                Series::new(
                    format!("frostman_z_r{}", s.radius),
                    "trial",
                    "frostman_z",
                    points,
                )
            })
            .collect();
        let results = PerturbResults {
            n,
            frostman_a,
            summaries,
            trials,
        };
        Ok((Results::Perturb(results), vec![summary, per_trial], series))
    }

    fn shift(&mut self) -> CliResult<Output> {
        let a = self.sequence_a()?;
        let n = a.len();
        let shift = match self.config.inputs.shift {
            Some(w) => w,
            None => DiskPoint::real(DEFAULT_SHIFT)?,
        };
        self.echo.inputs.shift = Some(shift);
        let b = BlaschkeProduct::new(a.clone());
        let roots = frostman_shift_zeros(&b, shift)?;
        let residuals: Vec<f64> = roots
            .iter()
            .map(|r| (b.evaluate(r.z()) - shift.z()).norm())
            .collect();
        let results = ShiftResults {
            n,
            shift,
            roots: roots.points().to_vec(),
            max_residual: residuals.iter().copied().fold(0.0, f64::max),
            residuals: residuals.clone(),
            frostman_before: frostman_sum(&a, self.grid())?.value,
            frostman_after: frostman_sum(&roots, self.grid())?.value,
        };
        let mut table = Table::new("roots", &["index", "re", "im", "modulus", "residual"]);
        for (j, r) in roots.iter().enumerate() {
            table.push(vec![
                j.into(),
                r.re().into(),
                r.im().into(),
                r.modulus().into(),
                residuals[j].into(),
            ]);
        }
        let mut summary = Table::new("summary", &["quantity", "value"]);
        summary.push(vec!["max_residual".into(), results.max_residual.into()]);
        summary.push(vec![
            "frostman_before".into(),
            results.frostman_before.into(),
        ]);
        summary.push(vec!["frostman_after".into(), results.frostman_after.into()]);
        let series = vec![Series::new(
            "roots",
            "re",
            "im",
            roots.iter().map(|r| (r.re(), r.im())).collect(),
        )];
        Ok((Results::Shift(results), vec![table, summary], series))
    }
}

fn summarize(radius: f64, batch: &[PerturbTrial]) -> PerturbSummary {
    let c_r = (1.0 + radius) / (1.0 - radius);
    let fold_min = |f: fn(&PerturbTrial) -> f64| batch.iter().map(f).fold(f64::INFINITY, f64::min);
    let fold_max = |f: fn(&PerturbTrial) -> f64| batch.iter().map(f).fold(0.0, f64::max);
    let min_d1 = fold_min(|t| t.report.empirical_d1);
    let max_d2 = fold_max(|t| t.report.empirical_d2);
    PerturbSummary {
        radius,
        c_r,
        trials: batch.len(),
        violations: batch.iter().map(|t| t.report.violations).sum(),
        pseudo_violations: batch.iter().map(|t| t.report.pseudo_violations).sum(),
        envelope_failures: batch
            .iter()
            .filter(|t| !t.report.frostman_envelope_ok)
            .count(),
        min_d1,
        max_d2,
        min_c1: fold_min(|t| t.report.empirical_c1),
        max_c2: fold_max(|t| t.report.empirical_c2),
        min_c3: fold_min(|t| t.report.empirical_c3),
        min_c4: fold_min(|t| t.report.empirical_c4),
        max_frostman_z: fold_max(|t| t.report.frostman_z),
        d_bounds_hold: min_d1 >= 1.0 / c_r - HARD_SLACK && max_d2 <= c_r + HARD_SLACK,
    }
}
