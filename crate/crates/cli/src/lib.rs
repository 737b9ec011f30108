//! Command-line reports over the `ergstab` library.
//!
//! A [`RunConfig`] is parsed and checked in full by [`RunConfig::resolve`]
//! before anything runs, so malformed input never produces partial output.

mod commands;
mod report;

use std::path::PathBuf;

use ergstab::erg::{CircuitSource, ErgPlan};
use ergstab::lattice::{Boundary, LatticeSpec};
use ergstab::models::{parse_instance, ModelSpec};
use ergstab::Limits;

pub use commands::{
    cmd_coarse_verify, cmd_erg_circuit, cmd_erg_classify, cmd_erg_verify, cmd_model_build, cmd_model_dualize,
    cmd_model_gsd, cmd_scan_fit,
};
pub use report::{Format, Report};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error at position {pos}: {msg}\n  {input}\n  {caret}^", caret = " ".repeat(*.pos))]
    Parse { input: String, pos: usize, msg: String },
    #[error("invalid {flag}: {msg}")]
    Usage { flag: &'static str, msg: String },
    #[error(transparent)]
    Core(#[from] ergstab::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// Process exit status: 2 for bad input, 3 for an exceeded cap, 4 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Usage { .. } => 2,
            CliError::Core(ergstab::Error::Parse { .. }) => 2,
            CliError::Core(ergstab::Error::Resource(_)) => 3,
            _ => 4,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn in_input(input: &str, offset: usize) -> impl Fn(ergstab::Error) -> CliError + '_ {
    move |e| match e {
        ergstab::Error::Parse { pos, msg } => CliError::Parse { input: input.to_string(), pos: offset + pos, msg },
        other => CliError::Core(other),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    ModelBuild,
    ModelGsd,
    ModelDualize,
    Scan,
    ErgVerify,
    ErgCircuit,
    ErgClassify,
    CoarseVerify,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    /// `"[dn,ds,dl,D]"` or `"[dn,ds,dl,D]@L1x...xLD:bc"`.
    pub instance: Option<String>,
    pub sizes: Option<String>,
    /// 1-based; defaults to the last axis.
    pub axis: Option<usize>,
    pub circuit: CircuitSource,
    pub coarse_l: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub limits: Limits,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            instance: None,
            sizes: None,
            axis: None,
            circuit: CircuitSource::Paper,
            coarse_l: None,
            format: Format::Json,
            out: None,
            limits: Limits::default(),
        }
    }
}

/// A fully validated unit of work.
#[derive(Debug, Clone)]
pub enum Job {
    Model { command: Command, spec: ModelSpec, lattice: LatticeSpec },
    Scan { spec: ModelSpec, sizes: Vec<Vec<usize>> },
    Erg { command: Command, plan: ErgPlan },
    Coarse { l: usize },
}

impl RunConfig {
    pub fn resolve(&self) -> CliResult<Job> {
        match self.command {
            Command::ModelBuild | Command::ModelGsd | Command::ModelDualize => {
                let (spec, lattice) = self.instance_with_lattice()?;
                Ok(Job::Model { command: self.command, spec, lattice })
            }
            Command::Scan => {
                let input = self.required_instance()?;
                let (spec, lattice) = parse_instance(input, true).map_err(in_input(input, 0))?;
                if lattice.is_some() {
                    return Err(CliError::Parse {
                        input: input.to_string(),
                        pos: input.find('@').unwrap_or(0),
                        msg: "scan takes a bare model spec; give sizes with --sizes".into(),
                    });
                }
                let sizes = self
                    .sizes
                    .as_deref()
                    .ok_or(CliError::Usage { flag: "--sizes", msg: "scan needs a size range such as 2..4".into() })?;
                Ok(Job::Scan { spec, sizes: parse_sizes(sizes, spec.dim)? })
            }
            Command::ErgVerify | Command::ErgCircuit | Command::ErgClassify => {
                let (spec, lattice) = self.instance_with_lattice()?;
                if lattice.bc() != Boundary::Periodic {
                    return Err(CliError::Usage { flag: "lattice", msg: "renormalization steps need :pbc".into() });
                }
                let axis = match self.axis {
                    None => spec.dim,
                    Some(a) if (1..=spec.dim).contains(&a) => a,
                    Some(a) => {
                        return Err(CliError::Usage { flag: "--axis", msg: format!("{a} is not in 1..={}", spec.dim) })
                    }
                };
                let plan = ErgPlan::new(spec, lattice.dims(), self.circuit)?.with_axis(axis - 1)?;
                Ok(Job::Erg { command: self.command, plan })
            }
            Command::CoarseVerify => {
                let l = self.coarse_l.ok_or(CliError::Usage { flag: "--L", msg: "missing linear size".into() })?;
                Ok(Job::Coarse { l })
            }
        }
    }

    fn required_instance(&self) -> CliResult<&str> {
        self.instance.as_deref().ok_or(CliError::Usage { flag: "model", msg: "missing model spec".into() })
    }

    fn instance_with_lattice(&self) -> CliResult<(ModelSpec, LatticeSpec)> {
        let input = self.required_instance()?;
        let (spec, lattice) = parse_instance(input, false).map_err(in_input(input, 0))?;
        Ok((spec, lattice.expect("lattice is required")))
    }
}

/// Parses `a..b` (inclusive), `a,b,c` or `a`, applied to every axis, or one
/// such item per axis joined by `x`; returns the Cartesian product.
pub fn parse_sizes(input: &str, dim: usize) -> CliResult<Vec<Vec<usize>>> {
    let err = |pos: usize, msg: String| CliError::Parse { input: input.to_string(), pos, msg };
    let mut per_axis = Vec::new();
    let mut pos = 0;
    for part in input.split('x') {
        per_axis.push(parse_size_set(part).map_err(|(p, m)| err(pos + p, m))?);
        pos += part.len() + 1;
    }
    let per_axis = match per_axis.len() {
        1 => vec![per_axis[0].clone(); dim],
        n if n == dim => per_axis,
        n => return Err(err(0, format!("expected 1 or {dim} size sets, found {n}"))),
    };
    let mut out = vec![Vec::new()];
    for values in &per_axis {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    Ok(out)
}

fn parse_size_set(s: &str) -> Result<Vec<usize>, (usize, String)> {
    let num = |t: &str, at: usize| -> Result<usize, (usize, String)> {
        match t.trim().parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v),
            _ => Err((at, format!("expected a positive size, found '{t}'"))),
        }
    };
    if let Some(dots) = s.find("..") {
        let (lo, hi) = (num(&s[..dots], 0)?, num(&s[dots + 2..], dots + 2)?);
        if lo > hi {
            return Err((0, format!("empty range {lo}..{hi}")));
        }
        return Ok((lo..=hi).collect());
    }
    let mut vals = Vec::new();
    let mut at = 0;
    for t in s.split(',') {
        vals.push(num(t, at)?);
        at += t.len() + 1;
    }
    vals.sort_unstable();
    vals.dedup();
    Ok(vals)
}

/// Resolves and runs the configuration.
pub fn run(cfg: &RunConfig) -> CliResult<Report> {
    let job = cfg.resolve()?;
    match (&job, cfg.command) {
        (Job::Model { .. }, Command::ModelBuild) => cmd_model_build(&job, &cfg.limits),
        (Job::Model { .. }, Command::ModelGsd) => cmd_model_gsd(&job, &cfg.limits),
        (Job::Model { .. }, _) => cmd_model_dualize(&job, &cfg.limits),
        (Job::Scan { .. }, _) => cmd_scan_fit(&job, &cfg.limits),
        (Job::Erg { .. }, Command::ErgVerify) => cmd_erg_verify(&job, &cfg.limits),
        (Job::Erg { .. }, Command::ErgCircuit) => cmd_erg_circuit(&job, &cfg.limits),
        (Job::Erg { .. }, _) => cmd_erg_classify(&job, &cfg.limits),
        (Job::Coarse { .. }, _) => cmd_coarse_verify(&job, &cfg.limits),
    }
}

/// Runs the configuration and writes the rendered report to `--out` or
/// stdout; returns whether every check passed.
pub fn run_and_write(cfg: &RunConfig) -> CliResult<bool> {
    let report = run(cfg)?;
    let text = report.render(cfg.format)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source })?,
        None => print!("{text}"),
    }
    Ok(report.ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_ranges() {
        assert_eq!(parse_sizes("2..3", 2).unwrap(), vec![vec![2, 2], vec![2, 3], vec![3, 2], vec![3, 3]]);
        assert_eq!(parse_sizes("3,2,3", 1).unwrap(), vec![vec![2], vec![3]]);
        assert_eq!(parse_sizes("2x3..4", 2).unwrap(), vec![vec![2, 3], vec![2, 4]]);
        assert_eq!(parse_sizes("2..4", 3).unwrap().len(), 27);
    }

    #[test]
    fn size_errors_carry_positions() {
        for (input, want) in [("2..x", 3), ("2,a", 2), ("2x2x0", 4), ("4..2", 0)] {
            match parse_sizes(input, 3) {
                Err(CliError::Parse { pos, .. }) => assert_eq!(pos, want, "{input}"),
                other => panic!("{input}: {other:?}"),
            }
        }
        assert!(matches!(parse_sizes("2x2", 3), Err(CliError::Parse { pos: 0, .. })));
    }

    #[test]
    fn invalid_instances_are_rejected_before_running() {
        let mut cfg = RunConfig::new(Command::ModelGsd);
        cfg.instance = Some("[0,1,2,3]@3x3:pbc".into());
        let e = cfg.resolve().unwrap_err();
        assert_eq!(e.exit_code(), 2);
        cfg.instance = Some("[0,1,2,3]@3x3xq:pbc".into());
        match cfg.resolve().unwrap_err() {
            CliError::Parse { pos, .. } => assert_eq!(pos, 14),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn erg_axis_is_one_based() {
        let mut cfg = RunConfig::new(Command::ErgVerify);
        cfg.instance = Some("[0,1,2,3]@2x3x2:pbc".into());
        cfg.axis = Some(2);
        match cfg.resolve().unwrap() {
            Job::Erg { plan, .. } => assert_eq!(plan.axis, 1),
            other => panic!("{other:?}"),
        }
        cfg.axis = Some(4);
        assert!(matches!(cfg.resolve(), Err(CliError::Usage { flag: "--axis", .. })));
        cfg.axis = None;
        cfg.instance = Some("[0,1,2,3]@2x3x2:obc".into());
        assert!(cfg.resolve().is_err());
    }

    #[test]
    fn scan_rejects_a_lattice() {
        let mut cfg = RunConfig::new(Command::Scan);
        cfg.instance = Some("[0,1,2,3]@2x2x2:pbc".into());
        cfg.sizes = Some("2..3".into());
        assert!(matches!(cfg.resolve(), Err(CliError::Parse { pos: 9, .. })));
    }
}
