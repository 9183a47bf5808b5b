//! Experiment runner: builds logistic-regression instances from a grid, runs
//! the selected solvers, and writes traces, a summary, a comparison table and
//! a diagnostics report.
//!
//! Output layout under `output_dir`:
//!
//! ```text
//! traces/<instance_id>__<solver>.csv
//! summary.csv
//! comparison.csv
//! report.txt
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::{experiment_grid, generate_logistic_dataset, GridBase, GridInstance, GridSetting};
use crate::diagnostics::{rate_diagnostics, AdaptationMeta, Diagnostics, RateMeta};
use crate::domain::{SmoothnessParams, Trace};
use crate::error::{Error, Result};
use crate::io::{read_summary_csv, read_trace_csv, write_summary_csv, write_trace_csv, SummaryRow};
use crate::objectives::LogisticRegression;
use crate::problem::Problem;
use crate::solvers::{self, SolverConfig, SolverKind};

/// One grid setting, or every setting with its default sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SettingChoice {
    All,
    One(GridSetting),
}

impl SettingChoice {
    pub fn parse(s: &str) -> Result<Self> {
        if s == "all" {
            Ok(SettingChoice::All)
        } else {
            GridSetting::parse(s).map(SettingChoice::One)
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SettingChoice::All => "all",
            SettingChoice::One(s) => s.as_str(),
        }
    }
}

impl Serialize for SettingChoice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for SettingChoice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        SettingChoice::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Sizes swept by each setting when none are given.
pub fn default_sizes(setting: GridSetting) -> Vec<usize> {
    match setting {
        GridSetting::L2ballNpoints => vec![200, 500, 1000],
        GridSetting::L2ballDim | GridSetting::SimplexDim | GridSetting::BoxDim => vec![5, 10, 15],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub setting: SettingChoice,
    /// Overrides [`default_sizes`] for every selected setting.
    pub sizes: Option<Vec<usize>>,
    pub solvers: Vec<SolverKind>,
    pub solver: SolverConfig,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub base: GridBase,
    pub threads: Option<usize>,
    /// Budget multiplier of the adaptive reference run used to bound `f*`;
    /// 0 disables it.
    pub reference_factor: usize,
    /// Write measured wall times; `false` writes 0 so summaries are reproducible.
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            setting: SettingChoice::All,
            sizes: None,
            solvers: SolverKind::ALL.to_vec(),
            solver: SolverConfig::default(),
            master_seed: 0,
            output_dir: PathBuf::from("results"),
            base: GridBase::default(),
            threads: None,
            reference_factor: 10,
            record_timing: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.solvers.is_empty() {
            return Err(Error::invalid("at least one solver is required"));
        }
        if matches!(&self.sizes, Some(s) if s.is_empty()) {
            return Err(Error::invalid("sizes must be non-empty"));
        }
        self.solver.validate()
    }

    pub fn instances(&self) -> Result<Vec<GridInstance>> {
        let settings: Vec<GridSetting> = match self.setting {
            SettingChoice::All => GridSetting::ALL.to_vec(),
            SettingChoice::One(s) => vec![s],
        };
        let mut out = Vec::new();
        for s in settings {
            let sizes = self.sizes.clone().unwrap_or_else(|| default_sizes(s));
            out.extend(experiment_grid(s, &sizes, self.master_seed, &self.base)?);
        }
        Ok(out)
    }
}

/// The logistic problem of a grid instance, started from the set's default point.
pub fn build_problem(instance: &GridInstance) -> Result<Problem> {
    let data = generate_logistic_dataset(&instance.data)?;
    let objective = LogisticRegression::new(data.matrix, data.labels)?;
    let set = instance.set.build(instance.data.n_features)?;
    Problem::new(Arc::new(objective), Arc::from(set))
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub solver: SolverKind,
    pub trace: Trace,
    pub diagnostics: Diagnostics,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone)]
pub struct InstanceResult {
    pub instance: GridInstance,
    pub smoothness: SmoothnessParams,
    pub f_star: f64,
    pub runs: Vec<RunResult>,
}

impl InstanceResult {
    pub fn run(&self, kind: SolverKind) -> Option<&RunResult> {
        self.runs.iter().find(|r| r.solver == kind)
    }
}

pub struct ExperimentOutput {
    pub instances: Vec<InstanceResult>,
    pub summary: Vec<SummaryRow>,
    pub files: Vec<PathBuf>,
}

/// Best valid lower bound on `f*` from a set of runs: `f(x) - gap(x)` at each
/// run's final iterate.
pub fn f_star_lower_bound<'a>(traces: impl IntoIterator<Item = &'a Trace>) -> f64 {
    traces
        .into_iter()
        .map(|t| t.last().f_value - t.last().fw_gap)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Rate metadata for a run of `kind` on `problem`.
pub fn rate_meta(problem: &Problem, config: &SolverConfig, kind: SolverKind, trace: &Trace, f_star: f64) -> RateMeta {
    let adaptation = match (kind, config.smoothness) {
        (SolverKind::AdaptL0l1, Some(s)) => Some(AdaptationMeta {
            rho: config.adaptive.rho,
            l0_init: config.adaptive.l0_0,
            l1_init: config.adaptive.l1_0,
            l0_max: config.adaptive.l0_max,
            l1_max: config.adaptive.l1_max,
            true_l0: s.l0,
            true_l1: s.l1,
        }),
        _ => None,
    };
    RateMeta {
        diameter: problem.set.diameter(),
        f_star,
        lambda: problem.set.strong_convexity(),
        mu: problem.meta.mu,
        interior_radius: problem.meta.interior_radius,
        adaptation,
        total_inner_checks: Some(trace.total_inner_checks),
        steps: Some(trace.steps),
    }
}

fn run_instance(instance: &GridInstance, config: &ExperimentConfig) -> Result<InstanceResult> {
    let wrap = |solver: &str, e: Error| Error::Run {
        instance: instance.id.clone(),
        solver: solver.to_string(),
        source: Box::new(e),
    };
    let problem = build_problem(instance).map_err(|e| wrap("-", e))?;
    let solver_config = config
        .solver
        .clone()
        .with_problem_constants(&problem)
        .map_err(|e| wrap("-", e))?;
    let smoothness = solver_config.smoothness.expect("filled from the objective");

    let mut timed = Vec::new();
    for &kind in &config.solvers {
        let start = Instant::now();
        let trace = solvers::run(kind, &problem, &solver_config).map_err(|e| wrap(kind.as_str(), e))?;
        let ms = if config.record_timing {
            start.elapsed().as_millis() as u64
        } else {
            0
        };
        timed.push((kind, trace, ms));
    }

    let reference = if config.reference_factor > 0 {
        let ref_config = SolverConfig {
            max_iter: solver_config.max_iter.saturating_mul(config.reference_factor),
            gap_tol: solver_config.gap_tol * 1e-3,
            record_stride: usize::MAX,
            ..solver_config.clone()
        };
        Some(solvers::run(SolverKind::AdaptL0l1, &problem, &ref_config).map_err(|e| wrap("reference", e))?)
    } else {
        None
    };
    let f_star = problem
        .meta
        .f_star
        .unwrap_or_else(|| f_star_lower_bound(timed.iter().map(|(_, t, _)| t).chain(reference.as_ref())));

    let runs = timed
        .into_iter()
        .map(|(solver, trace, wall_time_ms)| {
            let meta = rate_meta(&problem, &solver_config, solver, &trace, f_star);
            let diagnostics = rate_diagnostics(&trace.records, &meta);
            RunResult {
                solver,
                trace,
                diagnostics,
                wall_time_ms,
            }
        })
        .collect();
    Ok(InstanceResult {
        instance: instance.clone(),
        smoothness,
        f_star,
        runs,
    })
}

pub fn trace_file_name(instance_id: &str, solver: SolverKind) -> String {
    format!("{instance_id}__{}.csv", solver.as_str())
}

/// Runs every (instance, solver) pair and writes all outputs.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let instances = config.instances()?;
    let trace_dir = config.output_dir.join("traces");
    fs::create_dir_all(&trace_dir)?;

    let results: Vec<InstanceResult> = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(|| {
                instances
                    .par_iter()
                    .map(|i| run_instance(i, config))
                    .collect::<Result<_>>()
            })?,
        None => instances
            .par_iter()
            .map(|i| run_instance(i, config))
            .collect::<Result<_>>()?,
    };

    let tol = config.solver.gap_tol;
    let mut files = Vec::new();
    let mut summary = Vec::new();
    for res in &results {
        for run in &res.runs {
            let path = trace_dir.join(trace_file_name(&res.instance.id, run.solver));
            write_trace_csv(&run.trace.records, BufWriter::new(File::create(&path)?))?;
            files.push(path);
            let last = run.trace.last();
            summary.push(SummaryRow {
                instance_id: res.instance.id.clone(),
                setting: res.instance.setting.as_str().to_string(),
                n: res.instance.data.n_samples,
                d: res.instance.data.n_features,
                solver: run.solver.as_str().to_string(),
                iters_to_tol: run.trace.iters_to_gap(tol),
                final_gap: last.fw_gap,
                final_f: last.f_value,
                total_inner_checks: run.trace.total_inner_checks,
                wall_time_ms: run.wall_time_ms,
            });
        }
    }

    let summary_path = config.output_dir.join("summary.csv");
    write_summary_csv(&summary, BufWriter::new(File::create(&summary_path)?))?;
    files.push(summary_path.clone());

    let comparison_path = config.output_dir.join("comparison.csv");
    write_comparison(&results, &config.solvers, tol, &comparison_path)?;
    files.push(comparison_path);

    let report_path = config.output_dir.join("report.txt");
    fs::write(&report_path, render_report(config, &results))?;
    files.push(report_path.clone());

    // every emitted file must parse back
    for f in files.iter().filter(|p| p.starts_with(&trace_dir)) {
        read_trace_csv(f)?;
    }
    read_summary_csv(&summary_path)?;
    parse_report(&report_path)?;

    Ok(ExperimentOutput {
        instances: results,
        summary,
        files,
    })
}

fn write_comparison(results: &[InstanceResult], solvers: &[SolverKind], tol: f64, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["instance_id".to_string(), "setting".into(), "n".into(), "d".into()];
    header.extend(solvers.iter().map(|s| format!("iters_{}", s.as_str())));
    header.push("best".into());
    w.write_record(&header)?;
    for res in results {
        let counts: Vec<Option<usize>> = solvers
            .iter()
            .map(|&s| res.run(s).and_then(|r| r.trace.iters_to_gap(tol)))
            .collect();
        let best = solvers
            .iter()
            .zip(&counts)
            .filter_map(|(s, c)| c.map(|c| (c, *s)))
            .min()
            .map(|(_, s)| s.as_str())
            .unwrap_or("");
        let mut row = vec![
            res.instance.id.clone(),
            res.instance.setting.as_str().to_string(),
            res.instance.data.n_samples.to_string(),
            res.instance.data.n_features.to_string(),
        ];
        row.extend(counts.iter().map(|c| c.map(|c| c.to_string()).unwrap_or_default()));
        row.push(best.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn render_report(config: &ExperimentConfig, results: &[InstanceResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "master_seed={}", config.master_seed);
    let _ = writeln!(out, "gap_tol={:.16e}", config.solver.gap_tol);
    let _ = writeln!(out, "max_iter={}", config.solver.max_iter);
    let _ = writeln!(out, "rho={:.16e}", config.solver.adaptive.rho);
    let _ = writeln!(out, "instances={}", results.len());
    for res in results {
        let id = &res.instance.id;
        let _ = writeln!(out, "{id}.f_star={:.16e}", res.f_star);
        let _ = writeln!(out, "{id}.l0={:.16e}", res.smoothness.l0);
        let _ = writeln!(out, "{id}.l1={:.16e}", res.smoothness.l1);
        if let Some(l) = res.smoothness.classic_l {
            let _ = writeln!(out, "{id}.classic_l={l:.16e}");
        }
        for run in &res.runs {
            let p = format!("{id}.{}", run.solver.as_str());
            let _ = writeln!(out, "{p}.termination={}", run.trace.termination.as_str());
            let _ = writeln!(out, "{p}.steps={}", run.trace.steps);
            let iters = run.trace.iters_to_gap(config.solver.gap_tol);
            let _ = writeln!(
                out,
                "{p}.iters_to_tol={}",
                iters.map(|k| k.to_string()).unwrap_or_default()
            );
            let _ = writeln!(out, "{p}.all_passed={}", run.diagnostics.all_passed());
            out.push_str(&run.diagnostics.to_kv_lines(&p));
        }
    }
    out
}

/// Reads a `key=value` report.
pub fn parse_report(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Malformed {
            what: "report",
            path: path.to_path_buf(),
            msg: format!("line {}: missing `=`", i + 1),
        })?;
        map.insert(k.to_string(), v.to_string());
    }
    Ok(map)
}
