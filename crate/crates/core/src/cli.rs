//! Batch front end: TOML experiment configs, dispatch to the harnesses, and
//! report emission.
//!
//! Exit status:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | every gating check passed |
//! | 1 | config or parameter error |
//! | 2 | refusal: a structural condition failed (condition report emitted) |
//! | 3 | infeasible run (memory budget) |
//! | 4 | the harness ran and at least one gating check failed |

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::conditions::{ScheduleSpec, TimeChangeB, WeightC};
use crate::measures::PathFunctional;
use crate::model::{LevyModel, ModelSpec};
use crate::theorems::{self, AscltParams, CfParams, FcltParams, IntegralParams, MomentAuditParams, TheoremReport};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Fclt,
    Asclt,
    IntegralAsclt,
    MomentAudit,
    CfCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Numeric knobs. Unset optional knobs take the per-experiment default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Knobs {
    /// Time scale (fclt default 10⁴, cf-check default 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub n: usize,
    pub s: f64,
    pub dt: f64,
    pub m: usize,
    /// Independent records per check.
    pub records: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xs: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(usize, usize)>>,
    pub functional: PathFunctional,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks_threshold: Option<f64>,
}

impl Default for Knobs {
    fn default() -> Self {
        Knobs {
            t: None,
            n: 10_000,
            s: 1e4,
            dt: 0.1,
            m: 1000,
            records: 2000,
            xs: None,
            u_grid: None,
            pairs: None,
            functional: PathFunctional::Endpoint,
            ks_threshold: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Seeds {
    pub master: u64,
    /// Master-seed replicas for the almost sure experiments.
    pub panel: usize,
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds { master: 0, panel: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    /// Report file; stdout when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub format: Format,
    pub verbosity: u8,
}

impl Default for Output {
    fn default() -> Self {
        Output {
            path: None,
            format: Format::Json,
            verbosity: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub model: ModelSpec,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    #[serde(default)]
    pub time_change: TimeChangeB,
    #[serde(default)]
    pub weight: WeightC,
    #[serde(default)]
    pub knobs: Knobs,
    #[serde(default)]
    pub seeds: Seeds,
    #[serde(default)]
    pub output: Output,
}

impl ExperimentConfig {
    /// Defaults with the unit-jump centered Poisson model.
    pub fn with_defaults(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            model: LevyModel::centered_poisson().spec(),
            schedule: ScheduleSpec::default(),
            time_change: TimeChangeB::default(),
            weight: WeightC::default(),
            knobs: Knobs::default(),
            seeds: Seeds::default(),
            output: Output::default(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialize to TOML")
    }
}

/// Parses and validates a TOML experiment config, filling defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    LevyModel::from_spec(&config.model).map_err(|e| Error::Config(format!("model: {e}")))?;
    config
        .knobs
        .functional
        .validate()
        .map_err(|e| Error::Config(format!("knobs.functional: {e}")))?;
    Ok(config)
}

/// Runs the harness named by `config` on the current rayon pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<TheoremReport> {
    let model = LevyModel::from_spec(&config.model)?;
    let k = &config.knobs;
    let seed = config.seeds.master;
    let mut report = match config.experiment {
        ExperimentKind::Fclt => {
            let base = FcltParams::default();
            let params = FcltParams {
                t: k.t.unwrap_or(base.t),
                xs: k.xs.clone().unwrap_or(base.xs),
                m: k.m,
                records: k.records,
                ks_threshold: k.ks_threshold.unwrap_or(base.ks_threshold),
                ..base
            };
            theorems::run_fclt_test(&model, &params, seed)?
        }
        ExperimentKind::Asclt => {
            let base = AscltParams::default();
            let params = AscltParams {
                n: k.n,
                functional: k.functional,
                m: k.m,
                panel: config.seeds.panel,
                ks_threshold: k.ks_threshold.unwrap_or(base.ks_threshold),
                checkpoints: None,
            };
            theorems::run_asclt(&model, &config.schedule, &params, seed)?
        }
        ExperimentKind::IntegralAsclt => {
            let base = IntegralParams::default();
            let params = IntegralParams {
                s: k.s,
                dt: k.dt,
                functional: k.functional,
                m: k.m,
                panel: config.seeds.panel,
                ks_threshold: k.ks_threshold.unwrap_or(base.ks_threshold),
                ..base
            };
            theorems::run_integral_asclt(&model, &config.time_change, &config.weight, &params, seed)?
        }
        ExperimentKind::MomentAudit => {
            let base = MomentAuditParams::default();
            let params = MomentAuditParams {
                pairs: k.pairs.clone().unwrap_or(base.pairs),
                records: k.records,
                m: k.m,
            };
            theorems::audit_moment_bound(&model, &config.schedule, &params, seed)?
        }
        ExperimentKind::CfCheck => {
            let base = CfParams::default();
            let params = CfParams {
                t: k.t.unwrap_or(base.t),
                u_grid: k.u_grid.clone().unwrap_or(base.u_grid),
                records: k.records,
                ..base
            };
            theorems::run_cf_check(&model, &params, seed)?
        }
    };
    report.effective_config = Some(serde_json::to_value(config).expect("configs serialize"));
    Ok(report)
}

/// Result of [`execute`].
#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: Option<TheoremReport>,
    /// Text written to the output path (or stdout).
    pub emitted: String,
    pub error: Option<Error>,
}

pub fn exit_code_for(error: &Error) -> i32 {
    match error {
        Error::ConditionFailed(_) => 2,
        Error::Infeasible { .. } => 3,
        _ => 1,
    }
}

/// Runs `config` on a pool of `threads` workers (0: machine parallelism) and
/// writes the report (or condition report on refusal) atomically to the
/// configured path, or to stdout.
pub fn execute(config: &ExperimentConfig, threads: usize) -> Outcome {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => return failure(Error::Config(format!("thread pool: {e}")), String::new()),
    };
    match pool.install(|| run_experiment(config)) {
        Ok(report) => {
            let text = match config.output.format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            if let Err(e) = emit(config.output.path.as_deref(), &text) {
                return failure(e, text);
            }
            Outcome {
                exit_code: if report.passed { 0 } else { 4 },
                report: Some(report),
                emitted: text,
                error: None,
            }
        }
        Err(Error::ConditionFailed(cond)) => {
            let text = serde_json::to_string_pretty(&cond).expect("condition reports serialize");
            let write = emit(config.output.path.as_deref(), &text);
            let mut out = failure(Error::ConditionFailed(cond), text);
            if let Err(e) = write {
                out.error = Some(e);
            }
            out
        }
        Err(e) => failure(e, String::new()),
    }
}

fn failure(error: Error, emitted: String) -> Outcome {
    Outcome {
        exit_code: exit_code_for(&error),
        report: None,
        emitted,
        error: Some(error),
    }
}

/// Writes via a temporary file in the target directory and a rename.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.write_all(b"\n")?;
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(text.as_bytes())?;
            tmp.write_all(b"\n")?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| Error::Io(e.error))?;
            Ok(())
        }
    }
}

/// Command-line arguments. Flags override the config file, which overrides
/// the built-in defaults.
#[derive(Debug, clap::Parser)]
#[command(
    name = "levy-invariance",
    version,
    about = "Simulation checks of the functional limit theorem for scaled compound-Poisson processes and its almost sure versions"
)]
pub struct Args {
    /// Experiment to run.
    #[arg(value_enum)]
    pub experiment: ExperimentKind,
    /// TOML experiment config; without it the unit-jump centered Poisson model and defaults are used.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = machine parallelism). Never changes results.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Upper limit S of the integral average.
    #[arg(long = "s")]
    pub s: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Independent records N.
    #[arg(long)]
    pub records: Option<usize>,
    #[arg(long)]
    pub panel: Option<usize>,
    #[arg(long)]
    pub ks_threshold: Option<f64>,
}

impl Args {
    /// Effective config: defaults, then the file, then flags.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
                let mut c = parse_config(&text)?;
                c.experiment = self.experiment;
                c
            }
            None => ExperimentConfig::with_defaults(self.experiment),
        };
        if let Some(v) = self.seed {
            config.seeds.master = v;
        }
        if let Some(v) = &self.out {
            config.output.path = Some(v.clone());
        }
        if let Some(v) = self.format {
            config.output.format = v;
        }
        let k = &mut config.knobs;
        if self.t.is_some() {
            k.t = self.t;
        }
        if let Some(v) = self.n {
            k.n = v;
        }
        if let Some(v) = self.s {
            k.s = v;
        }
        if let Some(v) = self.dt {
            k.dt = v;
        }
        if let Some(v) = self.m {
            k.m = v;
        }
        if let Some(v) = self.records {
            k.records = v;
        }
        if self.ks_threshold.is_some() {
            k.ks_threshold = self.ks_threshold;
        }
        if let Some(v) = self.panel {
            config.seeds.panel = v;
        }
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::JumpLaw;

    const MINIMAL: &str = r#"
experiment = "fclt"
[model]
jump_law = { kind = "degenerate", value = 1.0 }
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.experiment, ExperimentKind::Fclt);
        assert_eq!(c.model, LevyModel::centered_poisson().spec());
        assert_eq!(c.knobs.m, 1000);
        assert_eq!(c.knobs.records, 2000);
        assert_eq!(c.knobs.dt, 0.1);
        assert_eq!(c.seeds.panel, 20);
        assert_eq!(c.schedule, ScheduleSpec::default());
        assert_eq!(c.weight, WeightC::InverseLinear { c: 2.0 });
        assert_eq!(c.time_change, TimeChangeB::default());
    }

    #[test]
    fn unknown_keys_are_named() {
        let text = MINIMAL.replace("[model]", "[modle]");
        match parse_config(&text) {
            Err(Error::Config(msg)) => assert!(msg.contains("modle"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let text = format!("{MINIMAL}\n[knobs]\nrecords = \"many\"\n");
        match parse_config(&text) {
            Err(Error::Config(msg)) => assert!(msg.contains("records") && msg.contains("usize"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weight_in_schedule_block_is_a_schema_error() {
        let text = r#"
experiment = "asclt"
[model]
jump_law = { kind = "degenerate", value = 1.0 }
[schedule]
kind = "inverse_linear"
c = 1.0
"#;
        let err = parse_config(text).unwrap_err();
        assert_eq!(exit_code_for(&err), 1);
        let text = r#"
experiment = "asclt"
[model]
jump_law = { kind = "degenerate", value = 1.0 }
[schedule]
beta = 1.0
sequence = { kind = "inverse_linear", c = 1.0 }
"#;
        assert!(matches!(parse_config(text), Err(Error::Config(_))));
    }

    #[test]
    fn invalid_models_are_config_errors() {
        let text = r#"
experiment = "asclt"
[model]
jump_law = { kind = "degenerate", value = 0.0 }
"#;
        assert!(matches!(parse_config(text), Err(Error::Config(msg)) if msg.contains("degenerate")));
    }

    #[test]
    fn config_round_trips() {
        let mut c = ExperimentConfig::with_defaults(ExperimentKind::MomentAudit);
        c.model = ModelSpec {
            jump_law: JumpLaw::Uniform { lo: -1.0, hi: 2.5 },
            rate: 3.0,
            diffusion_sd: 0.25,
        };
        c.knobs.pairs = Some(vec![(1, 4), (3, 9)]);
        c.knobs.functional = PathFunctional::ValueAt { x0: 0.5 };
        c.output.path = Some("out/report.json".into());
        let text = c.to_toml();
        let back = parse_config(&text).unwrap();
        assert_eq!(back, c);
        let again = parse_config(&back.to_toml()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn flags_override_file() {
        use clap::Parser;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, format!("{MINIMAL}\n[seeds]\nmaster = 5\n[knobs]\nm = 50\n")).unwrap();
        let args = Args::parse_from([
            "levy-invariance",
            "fclt",
            "--config",
            path.to_str().unwrap(),
            "--m",
            "80",
            "--records",
            "300",
        ]);
        let c = args.resolve().unwrap();
        assert_eq!(c.seeds.master, 5);
        assert_eq!(c.knobs.m, 80);
        assert_eq!(c.knobs.records, 300);
    }
}
