//! Command-line front end for [`crate::harness::run_experiment`].

use std::path::PathBuf;

use clap::Parser;

use crate::error::Result;
use crate::harness::{run_experiment, ExperimentConfig, SettingChoice};
use crate::solvers::SolverKind;

#[derive(Debug, Parser)]
#[command(
    name = "genfw",
    about = "Run Frank-Wolfe benchmarks on synthetic logistic regression"
)]
pub struct Args {
    /// Grid setting: l2ball_npoints, l2ball_dim, simplex_dim, box_dim or all.
    #[arg(long)]
    pub setting: Option<String>,
    /// Comma-separated instance sizes (n for l2ball_npoints, d otherwise).
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Comma-separated solver names, or `all`.
    #[arg(long)]
    pub solvers: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub gap_tol: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub l0_init: Option<f64>,
    #[arg(long)]
    pub l1_init: Option<f64>,
    /// JSON experiment config; explicit flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

pub fn parse_solvers(list: &str) -> Result<Vec<SolverKind>> {
    if list == "all" {
        return Ok(SolverKind::ALL.to_vec());
    }
    list.split(',').map(|s| SolverKind::parse(s.trim())).collect()
}

impl Args {
    pub fn into_config(self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = &self.setting {
            cfg.setting = SettingChoice::parse(s)?;
        }
        if let Some(s) = self.sizes {
            cfg.sizes = Some(s);
        }
        if let Some(s) = &self.solvers {
            cfg.solvers = parse_solvers(s)?;
        }
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if let Some(o) = self.out {
            cfg.output_dir = o;
        }
        if let Some(m) = self.max_iter {
            cfg.solver.max_iter = m;
        }
        if let Some(t) = self.gap_tol {
            cfg.solver.gap_tol = t;
        }
        if let Some(r) = self.rho {
            cfg.solver.adaptive.rho = r;
        }
        if let Some(v) = self.l0_init {
            cfg.solver.adaptive.l0_0 = v;
        }
        if let Some(v) = self.l1_init {
            cfg.solver.adaptive.l1_0 = v;
        }
        if let Some(t) = self.threads {
            cfg.threads = Some(t);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `args` (program name first), runs the experiment and returns the
/// process exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let cfg = match args.into_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!(
                "usage: genfw [--setting S] [--sizes N,..] [--solvers all|a,b] [--seed K] [--out DIR] [--config FILE]"
            );
            return 2;
        }
    };
    match run_experiment(&cfg) {
        Ok(out) => {
            for row in &out.summary {
                let iters = row.iters_to_tol.map(|k| k.to_string()).unwrap_or_else(|| "-".into());
                println!(
                    "{} {} iters_to_tol={} final_gap={:.3e}",
                    row.instance_id, row.solver, iters, row.final_gap
                );
            }
            println!("wrote {} files to {}", out.files.len(), cfg.output_dir.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
