//! Argument parsing, configuration layering and report assembly for the `string2g` binary.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use string2g::cocycle::{run_request, CocycleError, CocycleRequest, SystemKind};
use string2g::cover::{
    containing_patches, describe, filler_checks, minimal_patch, phi1, random_cover_point, simplicial_identities_check,
};
use string2g::linfty::{Trilinear, TwoTermLInfty};
use string2g::report::{all_passed, Check};
use string2g::sampling::{substream, RNG_NAME};
use string2g::sds::{gauge_growth, sds_verify, Reading, SdsConfig, Solution};
use string2g::sm::{generate_coboundary_cocycle, is_sm_cocycle, nilpotency_checks, random_normalized_cochain};
use string2g::superdiff::{dual_route_checks, equivalence_checks};
use string2g::twogroup::{check_law, Law, WeakTwoGroup};
use string2g::{Algebra, Su2};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const THREADS_ENV: &str = "STRING2G_THREADS";

/// Every public checker of the kernel, each reachable from exactly one subcommand.
pub const CHECKERS: &[&str] = &[
    "cover::simplicial_identities_check",
    "cover::filler_checks",
    "sm::nilpotency_checks",
    "sm::is_sm_cocycle",
    "twogroup::check_law",
    "cocycle::run_request",
    "superdiff::dual_route_checks",
    "superdiff::equivalence_checks",
    "linfty::homotopy_jacobi",
    "sds::sds_verify",
    "sds::gauge_growth",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Cocycle(#[from] CocycleError),
    #[error("csv export failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Kernel(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "string2g", version, about = "Numeric checks for the weak string 2-group and its differentiation")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// key=value configuration file; command-line flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// master RNG seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// number of random samples per check
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// pass tolerance on the maximum residual
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// finite-difference step
    #[arg(long = "h-fd", global = true)]
    pub h_fd: Option<f64>,
    /// level of the trilinear term
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// write the report here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// also write the checks as CSV
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// The eight-patch cover of SU(2) and its nerve
    Cover {
        #[command(subcommand)]
        action: CoverAction,
    },
    /// Circle-valued cochains on the nerve and their differentials
    Sm {
        #[command(subcommand)]
        action: SmAction,
    },
    /// Laws of the weak string 2-group
    Twogroup {
        #[command(subcommand)]
        action: TwoGroupAction,
    },
    /// Cech and Deligne cocycle systems on S^3
    Cocycle {
        #[command(subcommand)]
        action: CocycleAction,
    },
    /// Grassmann differentiation of the 2-group
    Diff {
        #[command(subcommand)]
        action: DiffAction,
    },
    /// Homotopy Jacobi identities of two-term L-infinity algebras
    Linfty {
        #[command(subcommand)]
        action: LinftyAction,
    },
    /// Self-dual string field configurations
    Sds {
        #[command(subcommand)]
        action: SdsAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum CoverAction {
    /// Print the patch table and per-patch sample counts
    Build,
    /// Patches containing a given unit quaternion
    Inspect {
        /// x,y,z,w
        #[arg(long, default_value = "1,0,0,0", allow_hyphen_values = true)]
        element: String,
    },
    /// Simplicial identities and horn filler faces
    Check,
}

#[derive(Subcommand, Debug)]
pub enum SmAction {
    /// Nilpotency of the differentials and the cocycle gate
    Check,
}

#[derive(Subcommand, Debug)]
pub enum TwoGroupAction {
    /// Check one coherence law on random objects
    Check {
        #[arg(long, value_enum)]
        law: LawArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum LawArg {
    Pentagon,
    Interchange,
    Groupoid,
}

impl From<LawArg> for Law {
    fn from(l: LawArg) -> Law {
        match l {
            LawArg::Pentagon => Law::Pentagon,
            LawArg::Interchange => Law::Interchange,
            LawArg::Groupoid => Law::Groupoid,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum CocycleAction {
    /// Validate the cocycle system described by a JSON request
    Validate {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KindArg {
    Ordinary,
    Strict,
    Weak,
    Deligne,
}

impl From<KindArg> for SystemKind {
    fn from(k: KindArg) -> SystemKind {
        match k {
            KindArg::Ordinary => SystemKind::Ordinary,
            KindArg::Strict => SystemKind::Strict,
            KindArg::Weak => SystemKind::Weak,
            KindArg::Deligne => SystemKind::Deligne,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum DiffAction {
    /// Dual-route differentiation and the equivalence moduli relations
    Demo,
}

#[derive(Subcommand, Debug)]
pub enum LinftyAction {
    /// Jacobiator checks for the string algebras and perturbed brackets
    Check,
}

#[derive(Subcommand, Debug)]
pub enum SdsAction {
    /// Field equations, convergence order and gauge growth of a solution
    Verify {
        #[arg(long, default_value_t = 1)]
        solution: u8,
        /// finite-difference step (same as --h-fd)
        #[arg(long)]
        h: Option<f64>,
        #[arg(long, value_enum, default_value = "literal")]
        reading: ReadingArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ReadingArg {
    Literal,
    Normalized,
}

impl From<ReadingArg> for Reading {
    fn from(r: ReadingArg) -> Reading {
        match r {
            ReadingArg::Literal => Reading::Literal,
            ReadingArg::Normalized => Reading::Normalized,
        }
    }
}

/// Effective run configuration after layering defaults, the config file and flags.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub h_fd: f64,
    pub k: f64,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    fn defaults(samples: usize) -> Self {
        RunConfig {
            seed: 0,
            samples,
            tol: 1e-9,
            h_fd: 1e-3,
            k: 1.0,
            output: None,
            format: Format::Json,
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let bad = |e: &dyn std::fmt::Display| CliError::Usage(format!("config key {key}: {e}"));
        match key {
            "seed" => self.seed = value.parse().map_err(|e| bad(&e))?,
            "samples" => self.samples = value.parse().map_err(|e| bad(&e))?,
            "tol" => self.tol = value.parse().map_err(|e| bad(&e))?,
            "h_fd" => self.h_fd = value.parse().map_err(|e| bad(&e))?,
            "k" => self.k = value.parse().map_err(|e| bad(&e))?,
            "output" => self.output = Some(PathBuf::from(value)),
            "format" => self.format = Format::from_str(value, true).map_err(|e| bad(&e))?,
            _ => return Err(CliError::Usage(format!("unknown config key {key}"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines; blank lines and lines starting with `#` are skipped.
    pub fn apply_file(&mut self, text: &str) -> Result<(), CliError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", n + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn resolve(common: &CommonArgs, default_samples: usize) -> Result<Self, CliError> {
        let mut c = RunConfig::defaults(default_samples);
        if let Some(path) = &common.config {
            c.apply_file(&read(path)?)?;
        }
        if let Some(v) = common.seed {
            c.seed = v;
        }
        if let Some(v) = common.samples {
            c.samples = v;
        }
        if let Some(v) = common.tol {
            c.tol = v;
        }
        if let Some(v) = common.h_fd {
            c.h_fd = v;
        }
        if let Some(v) = common.k {
            c.k = v;
        }
        if let Some(v) = &common.output {
            c.output = Some(v.clone());
        }
        if let Some(v) = common.format {
            c.format = v;
        }
        Ok(c)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// The document printed by every subcommand.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub version: &'static str,
    pub rng: &'static str,
    pub config: RunConfig,
    pub checkers: Vec<&'static str>,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl Report {
    fn new(command: &str, config: RunConfig, checkers: Vec<&'static str>, checks: Vec<Check>, details: Value) -> Self {
        Report {
            command: command.to_string(),
            version: VERSION,
            rng: RNG_NAME,
            passed: all_passed(&checks),
            config,
            checkers,
            checks,
            details,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} (string2g {})\n", self.command, self.version);
        for c in &self.checks {
            s += &format!(
                "{} {}  max={:.3e} mean={:.3e} p99={:.3e} tol={:.1e} n={}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.stats.max,
                c.stats.mean,
                c.stats.p99,
                c.tol,
                c.stats.count
            );
            if let Some(n) = &c.note {
                s += &format!("  ({n})");
            }
            s.push('\n');
        }
        s += if self.passed { "overall PASS\n" } else { "overall FAIL\n" };
        s
    }

    pub fn render(&self) -> String {
        match self.config.format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["name", "passed", "tol", "count", "max", "mean", "p99"])?;
        for c in &self.checks {
            w.write_record([
                c.name.clone(),
                c.passed.to_string(),
                c.tol.to_string(),
                c.stats.count.to_string(),
                c.stats.max.to_string(),
                c.stats.mean.to_string(),
                c.stats.p99.to_string(),
            ])?;
        }
        w.flush().map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

fn prefixed(prefix: &str, checks: Vec<Check>) -> Vec<Check> {
    checks
        .into_iter()
        .map(|mut c| {
            c.name = format!("{prefix}.{}", c.name);
            c
        })
        .collect()
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn cover_report(action: &CoverAction, common: &CommonArgs) -> Result<Report, CliError> {
    let cfg = RunConfig::resolve(common, 200)?;
    match action {
        CoverAction::Build => {
            let mut rng = substream(cfg.seed, 0xB111);
            let mut counts = [0usize; 8];
            for _ in 0..cfg.samples {
                for p in containing_patches(&random_cover_point(&mut rng, 1).element()) {
                    counts[usize::from(p.get() - 1)] += 1;
                }
            }
            let details = serde_json::json!({ "cover": to_value(&describe()), "samples_per_patch": counts });
            Ok(Report::new("cover build", cfg, vec![], vec![], details))
        }
        CoverAction::Inspect { element } => {
            let c: Vec<f64> = element
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Usage(format!("--element: {e}")))?;
            let [x, y, z, w] = c[..] else {
                return Err(CliError::Usage("--element needs four comma-separated numbers".into()));
            };
            let g = Su2::new(x, y, z, w).map_err(|e| CliError::Usage(format!("--element: {e}")))?;
            let labels: Vec<u8> = containing_patches(&g).iter().map(|p| p.get()).collect();
            let details = serde_json::json!({
                "element": [x, y, z, w],
                "containing_patches": labels,
                "minimal_patch": minimal_patch(&g).get(),
                "phi1_label": phi1(g).labels()[0].get(),
            });
            Ok(Report::new("cover inspect", cfg, vec![], vec![], details))
        }
        CoverAction::Check => {
            let mut rng = substream(cfg.seed, 0xC4EC);
            let ids = simplicial_identities_check(&mut rng, cfg.samples, cfg.tol);
            let mut checks = vec![ids.to_check(cfg.tol)];
            checks.extend(filler_checks(&mut rng, cfg.samples, cfg.tol));
            Ok(Report::new(
                "cover check",
                cfg,
                vec!["cover::simplicial_identities_check", "cover::filler_checks"],
                checks,
                Value::Null,
            ))
        }
    }
}

fn sm_report(common: &CommonArgs) -> Result<Report, CliError> {
    let cfg = RunConfig::resolve(common, 1000)?;
    let mut checks = prefixed("nilpotency", nilpotency_checks(cfg.seed, cfg.samples, cfg.tol));
    let l = generate_coboundary_cocycle(cfg.seed);
    checks.extend(prefixed("gate.generated", is_sm_cocycle(&l, cfg.seed, cfg.samples, cfg.tol)));
    let bumped = l.with_lambda03(l.lambda03.plus(&random_normalized_cochain(cfg.seed ^ 0xBAD, 0, 3)));
    let rejected = !all_passed(&is_sm_cocycle(&bumped, cfg.seed, cfg.samples, cfg.tol));
    checks.push(
        Check::from_residuals("gate.perturbed_rejected", &[if rejected { 0.0 } else { 1.0 }], 0.5)
            .with_note("residual 0 when the perturbed cocycle fails the gate"),
    );
    Ok(Report::new(
        "sm check",
        cfg,
        vec!["sm::nilpotency_checks", "sm::is_sm_cocycle"],
        checks,
        Value::Null,
    ))
}

fn twogroup_report(law: LawArg, common: &CommonArgs) -> Result<Report, CliError> {
    let cfg = RunConfig::resolve(common, 1000)?;
    let tg = WeakTwoGroup::new(generate_coboundary_cocycle(cfg.seed));
    let checks = check_law(&tg, law.into(), cfg.seed, cfg.samples, cfg.tol);
    Ok(Report::new("twogroup check", cfg, vec!["twogroup::check_law"], checks, Value::Null))
}

/// Reads a request document; `--kind` and any explicit flags override its fields.
pub fn load_request(kind: KindArg, input: &Path, common: &CommonArgs) -> Result<CocycleRequest, CliError> {
    let text = read(input)?;
    let mut v: Value = serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: input.to_path_buf(),
        source,
    })?;
    let obj = v
        .as_object_mut()
        .ok_or_else(|| CliError::Usage(format!("{}: expected a JSON object", input.display())))?;
    obj.insert("kind".into(), to_value(&SystemKind::from(kind)));
    if let Some(s) = common.seed {
        obj.insert("seed".into(), s.into());
    }
    if let Some(s) = common.samples {
        obj.insert("samples".into(), s.into());
    }
    if let Some(t) = common.tol {
        obj.insert("tol".into(), t.into());
    }
    if let Some(h) = common.h_fd {
        obj.insert("h".into(), h.into());
    }
    if let Some(k) = common.k {
        obj.insert("k".into(), k.into());
    }
    serde_json::from_value(v).map_err(|source| CliError::Json {
        path: input.to_path_buf(),
        source,
    })
}

fn cocycle_report(kind: KindArg, input: &Path, common: &CommonArgs) -> Result<Report, CliError> {
    let req = load_request(kind, input, common)?;
    let mut cfg = RunConfig::resolve(common, req.samples)?;
    cfg.seed = req.seed;
    cfg.samples = req.samples;
    cfg.tol = req.tol;
    cfg.h_fd = req.h;
    cfg.k = req.k;
    let rep = run_request(&req)?;
    let details = serde_json::json!({ "request": to_value(&rep.request), "overlaps": to_value(&rep.overlaps) });
    Ok(Report::new("cocycle validate", cfg, vec!["cocycle::run_request"], rep.checks, details))
}

fn diff_report(common: &CommonArgs) -> Result<Report, CliError> {
    let cfg = RunConfig::resolve(common, 1000)?;
    let t = Trilinear::new(cfg.k);
    let mut checks = prefixed("dual_route", dual_route_checks(cfg.seed, cfg.samples, &t, cfg.tol));
    let eq = equivalence_checks(cfg.seed, cfg.samples, &t, cfg.tol).map_err(|e| CliError::Kernel(e.to_string()))?;
    checks.extend(prefixed("equivalence", eq));
    Ok(Report::new(
        "diff demo",
        cfg,
        vec!["superdiff::dual_route_checks", "superdiff::equivalence_checks"],
        checks,
        Value::Null,
    ))
}

fn linfty_report(common: &CommonArgs) -> Result<Report, CliError> {
    let cfg = RunConfig::resolve(common, 1)?;
    let t = Trilinear::new(cfg.k);
    let mut checks = Vec::new();
    for algebra in [Algebra::Su2, Algebra::Spin4] {
        let string = TwoTermLInfty::string(algebra, &t);
        checks.extend(prefixed(&format!("string.{algebra}"), string.homotopy_jacobi().checks(cfg.tol)));
        let strict = TwoTermLInfty::strict(algebra, 2);
        checks.extend(prefixed(&format!("strict.{algebra}"), strict.homotopy_jacobi().checks(cfg.tol)));
        let inner = TwoTermLInfty::inner_derivations(algebra);
        checks.extend(prefixed(&format!("inner.{algebra}"), inner.homotopy_jacobi().checks(cfg.tol)));
        let bad = string.perturbed(0, 1, 0, 0.1).homotopy_jacobi().max();
        checks.push(
            Check::from_residuals(format!("perturbed.{algebra}.rejected"), &[if bad > cfg.tol { 0.0 } else { 1.0 }], 0.5)
                .with_note(format!("perturbed Jacobiator {bad:.3e}")),
        );
    }
    Ok(Report::new("linfty check", cfg, vec!["linfty::homotopy_jacobi"], checks, Value::Null))
}

fn sds_report(solution: u8, h: Option<f64>, reading: ReadingArg, common: &CommonArgs) -> Result<Report, CliError> {
    let mut cfg = RunConfig::resolve(common, 512)?;
    if let Some(h) = h {
        cfg.h_fd = h;
    }
    let solution = Solution::try_from(solution).map_err(|e| CliError::Usage(e.to_string()))?;
    let sc = SdsConfig {
        solution,
        reading: reading.into(),
        h: cfg.h_fd,
        samples: cfg.samples,
        seed: cfg.seed,
        k: cfg.k,
    };
    let rep = sds_verify(&sc);
    let mut checks = rep.checks.clone();
    let growth = gauge_growth(cfg.seed, cfg.samples.min(16), cfg.k, cfg.h_fd);
    checks.push(
        Check::from_residuals("gauge_slope", &[(1.9 - growth.slope).max(0.0)], 1e-300)
            .with_note(format!("fitted slope {:.3}, required >= 1.9", growth.slope)),
    );
    let details = serde_json::json!({
        "solution": to_value(&sc.solution),
        "reading": to_value(&sc.reading),
        "ratio_mean": rep.ratio_mean,
        "excluded_samples": rep.excluded_samples,
        "convergence_order": to_value(&rep.convergence_order),
        "gauge_growth": to_value(&growth),
    });
    Ok(Report::new(
        "sds verify",
        cfg,
        vec!["sds::sds_verify", "sds::gauge_growth"],
        checks,
        details,
    ))
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let c = &cli.common;
    match &cli.command {
        Command::Cover { action } => cover_report(action, c),
        Command::Sm { action: SmAction::Check } => sm_report(c),
        Command::Twogroup {
            action: TwoGroupAction::Check { law },
        } => twogroup_report(*law, c),
        Command::Cocycle {
            action: CocycleAction::Validate { kind, input },
        } => cocycle_report(*kind, input, c),
        Command::Diff { action: DiffAction::Demo } => diff_report(c),
        Command::Linfty { action: LinftyAction::Check } => linfty_report(c),
        Command::Sds {
            action: SdsAction::Verify { solution, h, reading },
        } => sds_report(*solution, *h, *reading, c),
    }
}

/// Caps the global thread pool from `STRING2G_THREADS` when it is set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(CliError::Usage(format!("{THREADS_ENV} must be positive")));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Kernel(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_then_flags() {
        let mut c = RunConfig::defaults(10);
        c.apply_file("# comment\nseed = 7\n\ntol=1e-6\nformat=text\n").unwrap();
        assert_eq!((c.seed, c.tol, c.format), (7, 1e-6, Format::Text));
        assert!(c.apply_file("bogus=1").is_err());
        assert!(c.apply_file("seed").is_err());
    }

    #[test]
    fn checkers_are_unique() {
        let mut v = CHECKERS.to_vec();
        v.sort_unstable();
        v.dedup();
        assert_eq!(v.len(), CHECKERS.len());
    }
}
