use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{check_feasible, mean, require_sigma, sample_replica, variance, Check, Comparison, SeedSet, TheoremReport};
use crate::conditions::{check_condition_a, ScheduleA, ScheduleSpec};
use crate::model::{empirical_cf, LevyModel};
use crate::seed::StreamTag;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentAuditParams {
    /// Index pairs `(l, k)` with `l < k`.
    pub pairs: Vec<(usize, usize)>,
    /// Records per pair.
    pub records: usize,
    /// Grid used for the grid-versus-exact consistency check.
    pub m: usize,
}

impl Default for MomentAuditParams {
    fn default() -> Self {
        MomentAuditParams {
            pairs: vec![(1, 10), (2, 20), (5, 50)],
            records: 500,
            m: 1000,
        }
    }
}

/// Estimates `E sup_x |Y_k(x) − Y_kl(x)|` for each pair from exact path
/// evaluation, and checks `estimate + 3·stderr ≤ 5·σ_V·(l/k)^{β/2}`.
pub fn audit_moment_bound(
    model: &LevyModel,
    schedule: &ScheduleSpec,
    params: &MomentAuditParams,
    master_seed: u64,
) -> Result<TheoremReport> {
    let started = Instant::now();
    let sigma = require_sigma(model)?;
    if params.pairs.is_empty() {
        return Err(Error::InvalidParameter("no (l, k) pairs".into()));
    }
    if params.records < 2 {
        return Err(Error::InvalidParameter("need at least two records per pair".into()));
    }
    if params.m == 0 {
        return Err(Error::InvalidParameter("grid needs m >= 1 subintervals".into()));
    }
    for &(l, k) in &params.pairs {
        if l == 0 || l >= k {
            return Err(Error::Domain(format!("pairs need 1 <= l < k, got ({l}, {k})")));
        }
    }
    let n_max = params.pairs.iter().map(|p| p.1).max().unwrap().max(2);
    let sched = ScheduleA::new(schedule, n_max);
    let condition = check_condition_a(&sched)?;
    if !condition.passed {
        return Err(Error::ConditionFailed(Box::new(condition)));
    }

    let mut report = TheoremReport::new(
        "moment-audit",
        "E sup|Y_k − Y_kl| ≤ 5·σ_V·(l/k)^{β/2} for the coupled path Y_kl",
        json!({ "model": model.spec(), "schedule": schedule, "params": params }),
        master_seed,
        StreamTag::MomentAudit,
    );
    let n = params.records;
    for (p, &(l, k)) in params.pairs.iter().enumerate() {
        let (s_l, s_k) = (sched.s(l)?, sched.s(k)?);
        check_feasible(model, s_k)?;
        let first = (p * n) as u64;
        let rows: Vec<(f64, f64)> = (first..first + n as u64)
            .into_par_iter()
            .map(|r| {
                let record = sample_replica(model, s_k, master_seed, StreamTag::MomentAudit, r)?;
                let exact = record.coupling_distance(s_l, s_k)?;
                let y_k = record.scale_path(s_k, params.m)?;
                let y_kl = record.build_coupled_path(s_l, s_k, params.m)?;
                let grid = y_k
                    .values()
                    .iter()
                    .zip(y_kl.values())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                Ok((exact, grid))
            })
            .collect::<Result<_>>()?;
        let exact: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let estimate = mean(&exact);
        let stderr = (variance(&exact) / n as f64).sqrt();
        let bound = 5.0 * sigma * (l as f64 / k as f64).powf(sched.beta / 2.0);
        let seeds = SeedSet {
            master: master_seed,
            stream_tag: StreamTag::MomentAudit,
            first,
            count: n as u64,
        };
        report.checks.push(
            Check::new(
                format!("moment_bound[{l},{k}]"),
                estimate + 3.0 * stderr,
                bound,
                Comparison::AtMost,
                seeds,
            )
            .with_note(format!(
                "estimate {estimate}, stderr {stderr}, s_l = {s_l}, s_k = {s_k}"
            )),
        );
        // A grid can only see part of the exact supremum.
        let overshoot = rows.iter().map(|(e, g)| g - e).fold(f64::NEG_INFINITY, f64::max);
        report.checks.push(
            Check::new(
                format!("grid_below_exact[{l},{k}]"),
                overshoot,
                1e-12,
                Comparison::AtMost,
                seeds,
            )
            .with_note("largest grid sup-distance minus exact sup-distance over the records"),
        );
    }
    report
        .notes
        .push("sup-distance measured in the uniform norm, exactly at jump points".into());
    Ok(report.finish(started))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfParams {
    pub t: f64,
    pub u_grid: Vec<f64>,
    pub records: usize,
    /// Added as `offset·t` to every sampled `V(t)`, simulating a miscentered
    /// sampler. Only for power checks of the harness; 0 in every real run.
    #[serde(skip)]
    #[doc(hidden)]
    pub sample_drift_offset: f64,
}

impl Default for CfParams {
    fn default() -> Self {
        CfParams {
            t: 1.0,
            u_grid: (-6..=6).map(|i| i as f64 * 0.5).collect(),
            records: 10_000,
            sample_drift_offset: 0.0,
        }
    }
}

/// Compares the empirical characteristic function of `N` simulated `V(t)`
/// with the closed form at each `u`; passes iff every deviation is at most
/// `3/√N + 0.01`.
pub fn run_cf_check(model: &LevyModel, params: &CfParams, master_seed: u64) -> Result<TheoremReport> {
    let started = Instant::now();
    if params.records < 1000 {
        return Err(Error::InvalidParameter(format!(
            "need N >= 1000 records, got {}",
            params.records
        )));
    }
    if !(params.t > 0.0 && params.t.is_finite()) {
        return Err(Error::InvalidParameter(format!("t must be > 0, got {}", params.t)));
    }
    if params.u_grid.is_empty() {
        return Err(Error::InvalidParameter("empty u grid".into()));
    }
    check_feasible(model, params.t)?;
    let t = params.t;
    let samples: Vec<f64> = (0..params.records as u64)
        .into_par_iter()
        .map(|r| {
            let record = sample_replica(model, t, master_seed, StreamTag::CfCheck, r)?;
            Ok(record.eval_v(t)? + params.sample_drift_offset * t)
        })
        .collect::<Result<_>>()?;

    let seeds = SeedSet {
        master: master_seed,
        stream_tag: StreamTag::CfCheck,
        first: 0,
        count: params.records as u64,
    };
    let threshold = 3.0 / (params.records as f64).sqrt() + 0.01;
    let mut report = TheoremReport::new(
        "cf-check",
        "E exp(iuV(t)) = exp(t·[rate·(φ_ξ(u) − 1) + iu·drift − diffusion_sd²·u²/2])",
        json!({ "model": model.spec(), "params": params }),
        master_seed,
        StreamTag::CfCheck,
    );
    for &u in &params.u_grid {
        let deviation = (empirical_cf(&samples, u)? - model.theoretical_cf(t, u)?).norm();
        report.checks.push(Check::new(
            format!("cf_deviation[{u}]"),
            deviation,
            threshold,
            Comparison::AtMost,
            seeds,
        ));
    }
    Ok(report.finish(started))
}
