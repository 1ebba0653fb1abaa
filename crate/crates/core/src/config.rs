//! Experiment configuration and the `key = value` config file format.

use std::path::{Path, PathBuf};

use crate::assembly::PenaltyRegime;
use crate::benchmarks::{weight, WeightMode};
use crate::error::{Error, Result};
use crate::mesh::{DomainKind, DomainSpec};
use crate::scheme::{SolveOptions, SolverPath};
use crate::solver::LinearSolver;

pub const MAX_DEGREE: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub domain: DomainKind,
    pub ell: f64,
    /// Flux degree `k`; the primal degree is `k + 1`.
    pub k: usize,
    pub alpha: i32,
    pub weight: WeightMode,
    pub theta: f64,
    pub max_ndof: usize,
    pub max_levels: Option<usize>,
    pub solver: SolverPath,
    pub linear_solver: LinearSolver,
    pub parallel: bool,
    pub output: PathBuf,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            domain: DomainKind::Square,
            ell: 1.0,
            k: 0,
            alpha: 1,
            weight: WeightMode::Friedrichs,
            theta: 0.5,
            max_ndof: 200_000,
            max_levels: None,
            solver: SolverPath::Spd,
            linear_solver: LinearSolver::Direct,
            parallel: false,
            output: PathBuf::from("dlsfem.csv"),
            seed: 0,
        }
    }
}

fn parse<T: std::str::FromStr>(field: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e: T::Err| Error::config(field, format!("cannot parse '{}': {e}", value.trim())))
}

fn str_err(field: &'static str) -> impl Fn(String) -> Error {
    move |e| Error::config(field, e)
}

fn parse_bool(field: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => Err(Error::config(field, format!("expected a boolean, got '{other}'"))),
    }
}

pub fn parse_linear_solver(value: &str) -> Result<LinearSolver> {
    match value.trim().to_ascii_lowercase().as_str() {
        "direct" => Ok(LinearSolver::Direct),
        "cg" | "pcg" => Ok(LinearSolver::ConjugateGradient),
        other => Err(Error::config(
            "linear_solver",
            format!("unknown linear solver '{other}' (expected direct or cg)"),
        )),
    }
}

impl ExperimentConfig {
    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
                match key.as_str() {
            "domain" => self.domain = value.trim().parse().map_err(str_err("domain"))?,
            "ell" => self.ell = parse("ell", value)?,
            "degree" | "k" => self.k = parse("degree", value)?,
            "alpha" => self.alpha = parse("alpha", value)?,
            "weight" | "weight_mode" => self.weight = value.trim().parse().map_err(str_err("weight"))?,
            "theta" => self.theta = parse("theta", value)?,
            "max_ndof" => self.max_ndof = parse("max_ndof", value)?,
            "max_levels" => self.max_levels = Some(parse("max_levels", value)?),
            "solver" => self.solver = value.trim().parse().map_err(str_err("solver"))?,
            "linear_solver" => self.linear_solver = parse_linear_solver(value)?,
            "parallel" => self.parallel = parse_bool("parallel", value)?,
            "output" => self.output = PathBuf::from(value.trim()),
            "seed" => self.seed = parse("seed", value)?,
            other => return Err(Error::config(other, "unknown configuration key")),
        }
        Ok(())
    }

    /// Applies `key = value` lines; blank lines and `#` comments are ignored.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("line {}", n + 1), format!("expected key = value, got '{line}'"))
            })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        DomainSpec::new(self.domain, self.ell).map_err(|e| Error::config("ell", e.to_string()))?;
        if self.k > MAX_DEGREE {
            return Err(Error::config("degree", format!("must lie in 0..={MAX_DEGREE}, got {}", self.k)));
        }
        if self.alpha != 1 && self.alpha != -1 {
            return Err(Error::config("alpha", format!("must be 1 or -1, got {}", self.alpha)));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::config("theta", "theta must lie in (0, 1]"));
        }
        if self.max_ndof == 0 {
            return Err(Error::config("max_ndof", "must be positive"));
        }
        if self.max_levels == Some(0) {
            return Err(Error::config("max_levels", "must be positive"));
        }
        if self.alpha == -1 && self.solver != SolverPath::Spd {
            return Err(Error::config(
                "solver",
                "the over-penalized scheme (alpha = -1) has no constraint block; use solver = spd",
            ));
        }
        Ok(())
    }

    pub fn domain_spec(&self) -> Result<DomainSpec> {
        DomainSpec::new(self.domain, self.ell)
    }

    pub fn c_omega(&self) -> Result<f64> {
        Ok(weight(self.weight, &self.domain_spec()?))
    }

    pub fn regime(&self) -> Result<PenaltyRegime> {
        PenaltyRegime::new(self.alpha, self.c_omega()?)
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            path: self.solver,
            linear: self.linear_solver,
            parallel: self.parallel,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = ExperimentConfig::default();
        assert_eq!((c.k, c.alpha, c.theta, c.max_ndof), (0, 1, 0.5, 200_000));
        assert_eq!(c.weight, WeightMode::Friedrichs);
        c.validate().unwrap();
    }

    #[test]
    fn file_format() {
        let mut c = ExperimentConfig::default();
        c.apply_str("# comment\ndomain = lshape\n\nell=2 # trailing\ndegree = 1\nalpha=-1\n").unwrap();
        assert_eq!(c.domain, DomainKind::LShape);
        assert_eq!((c.ell, c.k, c.alpha), (2.0, 1, -1));
        assert!(c.apply_str("bogus = 1").is_err());
        assert!(c.apply_str("ell 2").is_err());
    }

    #[test]
    fn range_errors_name_the_field() {
        let mut c = ExperimentConfig {
            theta: 0.0,
            ..Default::default()
        };
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("theta must lie in (0, 1]"), "{msg}");
        c.theta = 0.5;
        c.alpha = -1;
        c.solver = SolverPath::Saddle;
        assert!(c.validate().unwrap_err().to_string().contains("solver"));
        c.solver = SolverPath::Spd;
        c.k = 4;
        assert!(c.validate().unwrap_err().to_string().contains("degree"));
    }
}
