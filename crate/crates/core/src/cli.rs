//! Command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::adaptivity::AdaptiveHistory;
use crate::benchmarks::{run_experiment, side_condition_diagnostic, WeightMode};
use crate::config::{parse_linear_solver, ExperimentConfig};
use crate::error::{Error, Result};
use crate::mesh::{build_initial_mesh, write_dump, DomainKind, DomainSpec};
use crate::scheme::SolverPath;
use crate::verify::run_suites;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "DLSFEM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "dlsfem", version, about = "Discontinuous least-squares FEM for the Poisson problem")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one adaptive experiment and write its CSV.
    Run(RunArgs),
    /// Run the cartesian product of ell, degree and weight lists, one CSV each.
    Sweep(SweepArgs),
    /// Side-condition diagnostic on uniformly refined meshes.
    DiagnoseSideCondition(DiagnoseArgs),
    /// Run the built-in invariant suites.
    Verify(VerifyArgs),
}

/// Flags shared by `run` and `sweep`.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// key=value configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub domain: Option<DomainKind>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<i32>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub max_ndof: Option<usize>,
    #[arg(long)]
    pub max_levels: Option<usize>,
    /// spd, saddle or both.
    #[arg(long)]
    pub solver: Option<SolverPath>,
    /// direct or cg.
    #[arg(long)]
    pub linear_solver: Option<String>,
    /// Assemble element contributions in parallel.
    #[arg(long)]
    pub parallel: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub ell: Option<f64>,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub weight: Option<WeightMode>,
    /// CSV output path.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Also write the final mesh in the plain-text dump format.
    #[arg(long)]
    pub dump_mesh: Option<PathBuf>,
    #[arg(long, short)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated list.
    #[arg(long, value_delimiter = ',')]
    pub ell: Vec<f64>,
    /// Comma-separated list.
    #[arg(long, value_delimiter = ',')]
    pub degree: Vec<usize>,
    /// Comma-separated list.
    #[arg(long, value_delimiter = ',')]
    pub weight: Vec<WeightMode>,
    /// Directory receiving one CSV per combination.
    #[arg(long, short, default_value = "sweep")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DiagnoseArgs {
    #[arg(long, default_value = "square")]
    pub domain: DomainKind,
    #[arg(long, default_value_t = 1.0)]
    pub ell: f64,
    /// Number of uniform refinements after the initial mesh.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl CommonArgs {
    /// Defaults, then the config file, then these flags.
    fn base_config(&self) -> Result<ExperimentConfig> {
        let mut config = ExperimentConfig::default();
        if let Some(path) = &self.config {
            config.apply_file(path)?;
        }
        if let Some(v) = self.domain {
            config.domain = v;
        }
        if let Some(v) = self.alpha {
            config.alpha = v;
        }
        if let Some(v) = self.theta {
            config.theta = v;
        }
        if let Some(v) = self.max_ndof {
            config.max_ndof = v;
        }
        if let Some(v) = self.max_levels {
            config.max_levels = Some(v);
        }
        if let Some(v) = self.solver {
            config.solver = v;
        }
        if let Some(v) = &self.linear_solver {
            config.linear_solver = parse_linear_solver(v)?;
        }
        if self.parallel {
            config.parallel = true;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        Ok(config)
    }
}

impl RunArgs {
    pub fn to_config(&self) -> Result<ExperimentConfig> {
        let mut config = self.common.base_config()?;
        if let Some(v) = self.ell {
            config.ell = v;
        }
        if let Some(v) = self.degree {
            config.k = v;
        }
        if let Some(v) = self.weight {
            config.weight = v;
        }
        if let Some(v) = &self.output {
            config.output = v.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

impl SweepArgs {
    /// One validated config per (ell, degree, weight) combination.
    pub fn to_configs(&self) -> Result<Vec<ExperimentConfig>> {
        let base = self.common.base_config()?;
        let ells = if self.ell.is_empty() { vec![base.ell] } else { self.ell.clone() };
        let degrees = if self.degree.is_empty() { vec![base.k] } else { self.degree.clone() };
        let weights = if self.weight.is_empty() { vec![base.weight] } else { self.weight.clone() };
        let mut configs = Vec::new();
        for &ell in &ells {
            for &k in &degrees {
                for &weight in &weights {
                    let mut c = base.clone();
                    c.ell = ell;
                    c.k = k;
                    c.weight = weight;
                    c.output = self.output.join(sweep_file_name(&c));
                    c.validate()?;
                    configs.push(c);
                }
            }
        }
        Ok(configs)
    }
}

/// `{domain}_ell{ell}_k{k}_{weight}_alpha{±1}.csv`
pub fn sweep_file_name(c: &ExperimentConfig) -> String {
    format!(
        "{}_ell{}_k{}_{}_alpha{}.csv",
        c.domain,
        c.ell,
        c.k,
        c.weight.as_str(),
        if c.alpha > 0 { "+1" } else { "-1" }
    )
}

/// Parses `argv` (including the program name) into an experiment config for `run`.
pub fn parse_config<I, T>(argv: I) -> Result<ExperimentConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::config("arguments", e.to_string()))?;
    match cli.command {
        Command::Run(args) => args.to_config(),
        _ => Err(Error::config("arguments", "expected the run subcommand")),
    }
}

fn print_history(out: &mut impl Write, history: &AdaptiveHistory) -> std::io::Result<()> {
    writeln!(
        out,
        "{:>5} {:>9} {:>9} {:>13} {:>13} {:>13} {:>10}",
        "level", "ndof", "ntri", "estimator", "err_rel", "err_weighted", "efficiency"
    )?;
    for r in &history.records {
        writeln!(
            out,
            "{:>5} {:>9} {:>9} {:>13.6e} {:>13.6e} {:>13.6e} {:>10.4}{}",
            r.level,
            r.ndof,
            r.ntriangles,
            r.estimator,
            r.err_energy_rel,
            r.err_weighted,
            r.efficiency,
            if r.unreliable { "  unreliable" } else { "" }
        )?;
    }
    Ok(())
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::config(THREADS_ENV, format!("expected a positive integer, got '{value}'")))?;
    // A pool that already exists (e.g. inside tests) is left alone.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn write_mesh(path: &Path, history: &AdaptiveHistory) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_dump(&history.final_mesh, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

/// Runs a parsed command, writing human-readable output to `out`.
pub fn dispatch(cli: &Cli, out: &mut impl Write) -> Result<()> {
    configure_threads()?;
    let io = |e| Error::io("<stdout>", e);
    match &cli.command {
        Command::Run(args) => {
            let config = args.to_config()?;
            let history = run_experiment(&config)?;
            if !args.quiet {
                print_history(out, &history).map_err(io)?;
            }
            writeln!(out, "wrote {} ({} levels)", config.output.display(), history.records.len()).map_err(io)?;
            if let Some(path) = &args.dump_mesh {
                write_mesh(path, &history)?;
            }
        }
        Command::Sweep(args) => {
            let configs = args.to_configs()?;
            let results: Vec<Result<usize>> = configs
                .par_iter()
                .map(|c| run_experiment(c).map(|h| h.records.len()))
                .collect();
            let mut failures = Vec::new();
            for (c, r) in configs.iter().zip(results) {
                match r {
                    Ok(levels) => writeln!(out, "wrote {} ({levels} levels)", c.output.display()).map_err(io)?,
                    Err(e) => failures.push(format!("{}: {e}", c.output.display())),
                }
            }
            if !failures.is_empty() {
                return Err(Error::config("sweep", failures.join("; ")));
            }
        }
        Command::DiagnoseSideCondition(args) => {
            let domain = DomainSpec::new(args.domain, args.ell)?;
            let mut mesh = build_initial_mesh(&domain)?;
            writeln!(out, "{:>5} {:>9} {:>14} {:>14}", "level", "ntri", "lhs", "rhs").map_err(io)?;
            for level in 0..=args.levels {
                if level > 0 {
                    mesh = mesh.refine_uniform()?;
                }
                let d = side_condition_diagnostic(&mesh);
                writeln!(out, "{:>5} {:>9} {:>14.6e} {:>14.6e}", level, mesh.num_triangles(), d.lhs, d.rhs)
                    .map_err(io)?;
            }
        }
        Command::Verify(args) => {
            let suites = run_suites(args.seed);
            let mut failed = 0;
            for s in &suites {
                writeln!(out, "{:<12} {}/{} passed", s.name, s.passed, s.total).map_err(io)?;
                for f in &s.failures {
                    writeln!(out, "  FAIL {f}").map_err(io)?;
                }
                failed += s.total - s.passed;
            }
            if failed > 0 {
                return Err(Error::config("verify", format!("{failed} checks failed")));
            }
        }
    }
    Ok(())
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match dispatch(&cli, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_flags() {
        let c = parse_config(["dlsfem", "run", "--domain", "square", "--ell", "10", "--degree", "0", "--theta", "1"])
            .unwrap();
        assert_eq!((c.domain, c.ell, c.k, c.theta), (DomainKind::Square, 10.0, 0, 1.0));
        assert_eq!(c.alpha, 1);
    }

    #[test]
    fn theta_zero_is_rejected() {
        let e = parse_config(["dlsfem", "run", "--theta", "0"]).unwrap_err();
        assert!(e.to_string().contains("theta must lie in (0, 1]"));
    }

    #[test]
    fn over_penalized_saddle_is_rejected() {
        let e = parse_config(["dlsfem", "run", "--alpha", "-1", "--solver", "saddle"]).unwrap_err();
        assert!(e.to_string().contains("solver"), "{e}");
    }

    #[test]
    fn unknown_flag() {
        assert!(parse_config(["dlsfem", "run", "--bogus", "1"]).is_err());
    }

    #[test]
    fn sweep_product() {
        let cli = Cli::try_parse_from(["dlsfem", "sweep", "--ell", "1,10,100", "--weight", "one,friedrichs"]).unwrap();
        let Command::Sweep(args) = cli.command else { panic!() };
        let configs = args.to_configs().unwrap();
        assert_eq!(configs.len(), 6);
        let mut names: Vec<_> = configs.iter().map(|c| c.output.clone()).collect();
        names.dedup();
        assert_eq!(names.len(), 6);
    }
}
