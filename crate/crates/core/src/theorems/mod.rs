//! Simulation harnesses, one per limit statement.
//!
//! Each harness is a deterministic function of its inputs and master seed.
//! Replicas draw from [`SeedStream::replica`] streams and are aggregated in
//! replica order, so the worker count never changes a report.
//!
//! Almost sure statements are checked on a panel of master-seed replicas:
//! each replica is one realization `ω`, and the report gives the median
//! distance across the panel together with the fraction of replicas below
//! the threshold. Finite-n thresholds for those statements are engineering
//! choices (no convergence rate is known) and are marked as such.

mod asclt;
mod audit;
mod fclt;

use serde::{Deserialize, Serialize};

use crate::measures::{PathFunctional, TargetLaw};
use crate::model::LevyModel;
use crate::seed::{SeedStream, StreamTag};
use crate::simulate::{sample_jumps, JumpRecord};
use crate::{Error, Result};

pub use asclt::{run_asclt, run_integral_asclt, AscltParams, IntegralParams};
pub use audit::{audit_moment_bound, run_cf_check, CfParams, MomentAuditParams};
pub use fclt::{run_fclt_on_paths, run_fclt_test, run_wiener_oracle, FcltParams};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest expected jump count of a single record a harness will allocate.
pub const JUMP_BUDGET: u64 = 50_000_000;
/// Bytes held per jump by a [`JumpRecord`] (time, size, cumulative sum, two
/// running suprema).
const BYTES_PER_JUMP: u64 = 40;

/// Replica seeds a statistic was computed from: replicas
/// `first..first + count` of `stream_tag` under `master`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSet {
    pub master: u64,
    pub stream_tag: StreamTag,
    pub first: u64,
    pub count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// statistic < threshold
    Below,
    /// statistic ≤ threshold
    AtMost,
    /// statistic > threshold
    Above,
}

impl Comparison {
    fn holds(self, statistic: f64, threshold: f64) -> bool {
        match self {
            Comparison::Below => statistic < threshold,
            Comparison::AtMost => statistic <= threshold,
            Comparison::Above => statistic > threshold,
        }
    }
}

/// One statistic with its threshold and verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
    /// Non-gating checks are reported but do not affect the verdict.
    pub gating: bool,
    pub seeds: SeedSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, statistic: f64, threshold: f64, comparison: Comparison, seeds: SeedSet) -> Self {
        Check {
            name: name.into(),
            statistic,
            threshold,
            comparison,
            passed: comparison.holds(statistic, threshold),
            gating: true,
            seeds,
            note: None,
        }
    }

    fn informational(mut self) -> Self {
        self.gating = false;
        self
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// A statistic tracked along a sequence of checkpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub name: String,
    pub checkpoints: Vec<f64>,
    /// `values[replica][checkpoint]`.
    pub values: Vec<Vec<f64>>,
    /// Median over replicas per checkpoint.
    pub median: Vec<f64>,
}

/// Identity of the single realization a replica used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordDigest {
    pub replica: u64,
    pub seed: SeedStream,
    pub horizon: f64,
    pub jumps: usize,
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub schema_version: u32,
    pub experiment: String,
    pub statement: String,
    /// Harness inputs (model, knobs).
    pub config: serde_json::Value,
    /// Full effective experiment config, filled in by the CLI.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effective_config: Option<serde_json::Value>,
    pub master_seed: u64,
    pub stream_tag: StreamTag,
    pub checks: Vec<Check>,
    pub traces: Vec<Trace>,
    pub records: Vec<RecordDigest>,
    pub notes: Vec<String>,
    pub passed: bool,
    pub duration_secs: f64,
}

impl TheoremReport {
    fn new(
        experiment: &str,
        statement: &str,
        config: serde_json::Value,
        master_seed: u64,
        stream_tag: StreamTag,
    ) -> Self {
        TheoremReport {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.into(),
            statement: statement.into(),
            config,
            effective_config: None,
            master_seed,
            stream_tag,
            checks: Vec::new(),
            traces: Vec::new(),
            records: Vec::new(),
            notes: Vec::new(),
            passed: false,
            duration_secs: 0.0,
        }
    }

    fn finish(mut self, started: std::time::Instant) -> Self {
        self.passed = self.checks.iter().filter(|c| c.gating).all(|c| c.passed);
        self.duration_secs = started.elapsed().as_secs_f64();
        self
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn trace(&self, name: &str) -> Option<&Trace> {
        self.traces.iter().find(|t| t.name == name)
    }

    /// Canonical JSON (struct field order).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// The report with the wall-clock field zeroed, for reproducibility
    /// comparisons.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.duration_secs = 0.0;
        r
    }

    /// Flat `check,statistic,threshold,verdict` table.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,statistic,threshold,verdict\n");
        for c in &self.checks {
            let verdict = match (c.passed, c.gating) {
                (true, _) => "pass",
                (false, true) => "fail",
                (false, false) => "fail-informational",
            };
            out.push_str(&format!(
                "{},{},{},{}\n",
                csv_field(&c.name),
                c.statistic,
                c.threshold,
                verdict
            ));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Fails with [`Error::Infeasible`] if a record of this horizon would exceed
/// [`JUMP_BUDGET`].
pub fn check_feasible(model: &LevyModel, horizon: f64) -> Result<()> {
    let jumps = (model.poisson_rate() * horizon).ceil();
    if !(jumps.is_finite() && jumps <= JUMP_BUDGET as f64) {
        let required = if jumps.is_finite() { jumps as u64 } else { u64::MAX };
        return Err(Error::Infeasible {
            required_jumps: required,
            required_bytes: required.saturating_mul(BYTES_PER_JUMP),
            budget_jumps: JUMP_BUDGET,
        });
    }
    Ok(())
}

fn sample_replica(model: &LevyModel, horizon: f64, master: u64, tag: StreamTag, replica: u64) -> Result<JumpRecord> {
    sample_jumps(model, horizon, SeedStream::replica(master, tag, replica))
}

/// Value of `functional` on `X_t = V(t·)/√t` as the grid path of
/// `record.scale_path(t, m)` would give it, except that suprema of pure-jump
/// paths are exact.
pub fn scaled_functional(record: &JumpRecord, t: f64, functional: &PathFunctional, m: usize) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("time scale must be > 0, got {t}")));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("grid needs m >= 1 subintervals".into()));
    }
    match *functional {
        PathFunctional::Endpoint => Ok(record.eval_v(t)? / t.sqrt()),
        PathFunctional::ValueAt { x0 } => {
            functional.validate()?;
            let j = PathFunctional::grid_index(x0, m);
            Ok(record.eval_v(t * (j as f64 / m as f64))? / t.sqrt())
        }
        PathFunctional::Supremum if !record.has_diffusion() => record.exact_sup(t),
        PathFunctional::Supremum => Ok(crate::measures::apply_functional(&record.scale_path(t, m)?, functional)),
    }
}

/// Law of `functional(σW)` on an `m`-interval grid.
pub fn functional_target(functional: &PathFunctional, sigma: f64, m: usize) -> Result<TargetLaw> {
    functional.validate()?;
    match *functional {
        PathFunctional::Endpoint => TargetLaw::gaussian(sigma),
        PathFunctional::Supremum => TargetLaw::wiener_sup(sigma),
        PathFunctional::ValueAt { x0 } => {
            let x = PathFunctional::grid_index(x0, m) as f64 / m as f64;
            if x == 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "value_at({x0}) reads the grid point x = 0, where every path is 0"
                )));
            }
            TargetLaw::gaussian(sigma * x.sqrt())
        }
    }
}

fn require_sigma(model: &LevyModel) -> Result<f64> {
    let sigma = model.sigma_v();
    if sigma > 0.0 && sigma.is_finite() {
        Ok(sigma)
    } else {
        Err(Error::InvalidParameter(format!(
            "sigma_V = {sigma}; limit law is degenerate"
        )))
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub(crate) fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub(crate) fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Sample covariance and its standard error (from the spread of the
/// centered products).
pub(crate) fn covariance_with_se(a: &[f64], b: &[f64]) -> (f64, f64) {
    let (ma, mb) = (mean(a), mean(b));
    let prods: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).collect();
    let n = a.len() as f64;
    let cov = prods.iter().sum::<f64>() / (n - 1.0);
    (cov, (variance(&prods) / n).sqrt())
}

/// Pearson correlation.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let (cov, _) = covariance_with_se(a, b);
    cov / (variance(a) * variance(b)).sqrt()
}
