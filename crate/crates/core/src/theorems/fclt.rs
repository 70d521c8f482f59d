use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{
    check_feasible, covariance_with_se, mean, require_sigma, sample_replica, scaled_functional, variance, Check,
    Comparison, SeedSet, TheoremReport,
};
use crate::measures::{apply_functional, weighted_ks, PathFunctional, TargetLaw, WeightedSample};
use crate::model::LevyModel;
use crate::seed::StreamTag;
use crate::simulate::{simulate_wiener, PathGrid};
use crate::{Error, Result};

/// Knobs of the finite-dimensional and covariance checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FcltParams {
    /// Time scale of `X_t`.
    pub t: f64,
    /// Points in `(0, 1]` where marginals are tested.
    pub xs: Vec<f64>,
    pub m: usize,
    /// Independent records `N`.
    pub records: usize,
    pub ks_threshold: f64,
    /// Threshold for the KS distance of `sup_x X_t(x)` to `sup σ_V·W`.
    pub sup_ks_threshold: f64,
    /// Covariance and second-moment deviations may reach this many standard
    /// errors.
    pub se_multiplier: f64,
    /// Multiplies every Gaussian target sd. Only for power checks of the
    /// battery itself; 1 in every real run.
    #[serde(skip)]
    #[doc(hidden)]
    pub target_scale: f64,
}

impl Default for FcltParams {
    fn default() -> Self {
        FcltParams {
            t: 1e4,
            xs: vec![0.25, 0.5, 0.75, 1.0],
            m: 1000,
            records: 2000,
            ks_threshold: 0.05,
            sup_ks_threshold: 0.06,
            se_multiplier: 5.0,
            target_scale: 1.0,
        }
    }
}

impl FcltParams {
    /// Grid indices of `xs`, validated.
    fn grid_indices(&self) -> Result<Vec<usize>> {
        if self.m == 0 {
            return Err(Error::InvalidParameter("grid needs m >= 1 subintervals".into()));
        }
        if self.records < 100 {
            return Err(Error::InvalidParameter(format!(
                "need N >= 100 records, got {}",
                self.records
            )));
        }
        if self.xs.is_empty() {
            return Err(Error::InvalidParameter("no test points xs".into()));
        }
        let mut idx = Vec::with_capacity(self.xs.len());
        for &x in &self.xs {
            if !(x > 0.0 && x <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "test points must lie in (0, 1], got {x}"
                )));
            }
            let j = PathFunctional::grid_index(x, self.m);
            if j == 0 {
                return Err(Error::InvalidParameter(format!(
                    "x = {x} rounds to grid point 0 at m = {}",
                    self.m
                )));
            }
            if idx.last().is_some_and(|&prev| prev >= j) {
                return Err(Error::InvalidParameter(
                    "test points must be increasing and distinct on the grid".into(),
                ));
            }
            idx.push(j);
        }
        Ok(idx)
    }
}

/// Simulates `N` independent records on `[0, t]` and checks the marginals,
/// increments, covariances and increment second moments of `X_t` against
/// those of `σ_V·W`.
pub fn run_fclt_test(model: &LevyModel, params: &FcltParams, master_seed: u64) -> Result<TheoremReport> {
    let started = Instant::now();
    let sigma = require_sigma(model)?;
    let indices = params.grid_indices()?;
    if !(params.t > 0.0 && params.t.is_finite()) {
        return Err(Error::InvalidParameter(format!("t must be > 0, got {}", params.t)));
    }
    check_feasible(model, params.t)?;

    let rows: Vec<(Vec<f64>, f64)> = (0..params.records as u64)
        .into_par_iter()
        .map(|r| {
            let record = sample_replica(model, params.t, master_seed, StreamTag::Fclt, r)?;
            let path = record.scale_path(params.t, params.m)?;
            let sup = scaled_functional(&record, params.t, &PathFunctional::Supremum, params.m)?;
            Ok((indices.iter().map(|&j| path.values()[j]).collect(), sup))
        })
        .collect::<Result<_>>()?;
    let (rows, sups): (Vec<Vec<f64>>, Vec<f64>) = rows.into_iter().unzip();

    let seeds = SeedSet {
        master: master_seed,
        stream_tag: StreamTag::Fclt,
        first: 0,
        count: params.records as u64,
    };
    let mut report = TheoremReport::new(
        "fclt",
        "X_t = V(t·)/√t converges in distribution to σ_V·W; finite-dimensional and second-moment structure",
        json!({ "model": model.spec(), "params": params }),
        master_seed,
        StreamTag::Fclt,
    );
    report.checks = battery(&rows, &sups, &indices, params, sigma, seeds)?;
    report.checks.push(
        Check::new(
            "target_sd_matches_closed_form",
            (sigma * sigma - model.sigma_v_squared()).abs(),
            1e-12,
            Comparison::AtMost,
            seeds,
        )
        .with_note("sd of the endpoint target squared against rate·E[ξ²] + diffusion_sd²"),
    );
    report
        .notes
        .push("value_at reads the grid point floor(x·m)/m; targets use that grid point".into());
    if !model.is_pure_jump() {
        report
            .notes
            .push("with a diffusion part the supremum is the grid maximum, biased slightly low".into());
    }
    Ok(report.finish(started))
}

/// The same battery applied to given paths of `σW`; calibrates the checks
/// independently of the jump-process simulator.
pub fn run_fclt_on_paths(paths: &[PathGrid], sigma: f64, params: &FcltParams, seeds: SeedSet) -> Result<TheoremReport> {
    let started = Instant::now();
    let indices = FcltParams {
        records: paths.len(),
        ..params.clone()
    }
    .grid_indices()?;
    if let Some(p) = paths.iter().find(|p| p.m() != params.m) {
        return Err(Error::InvalidParameter(format!(
            "path has m = {}, params say {}",
            p.m(),
            params.m
        )));
    }
    let rows: Vec<Vec<f64>> = paths
        .iter()
        .map(|p| indices.iter().map(|&j| p.values()[j]).collect())
        .collect();
    let sups: Vec<f64> = paths
        .iter()
        .map(|p| apply_functional(p, &PathFunctional::Supremum))
        .collect();
    let mut report = TheoremReport::new(
        "wiener-oracle",
        "the check battery accepts exact σW paths",
        json!({ "sigma": sigma, "params": params, "paths": paths.len() }),
        seeds.master,
        seeds.stream_tag,
    );
    report.checks = battery(&rows, &sups, &indices, params, sigma, seeds)?;
    report
        .notes
        .push("supremum read off the grid, biased slightly low".into());
    Ok(report.finish(started))
}

/// [`run_fclt_on_paths`] on `N` fresh paths from [`simulate_wiener`].
pub fn run_wiener_oracle(sigma: f64, params: &FcltParams, master_seed: u64) -> Result<TheoremReport> {
    let paths = simulate_wiener(sigma, params.m, params.records, master_seed)?;
    let seeds = SeedSet {
        master: master_seed,
        stream_tag: StreamTag::Wiener,
        first: 0,
        count: params.records as u64,
    };
    run_fclt_on_paths(&paths, sigma, params, seeds)
}

fn fmt_x(x: f64) -> String {
    format!("{x}")
}

/// `rows[replica][i]` holds the path value at grid index `indices[i]`;
/// `sups[replica]` the path supremum.
fn battery(
    rows: &[Vec<f64>],
    sups: &[f64],
    indices: &[usize],
    params: &FcltParams,
    sigma: f64,
    seeds: SeedSet,
) -> Result<Vec<Check>> {
    let m = params.m as f64;
    let xs: Vec<f64> = indices.iter().map(|&j| j as f64 / m).collect();
    let column = |i: usize| -> Vec<f64> { rows.iter().map(|r| r[i]).collect() };
    let cols: Vec<Vec<f64>> = (0..indices.len()).map(column).collect();
    let var = sigma * sigma;
    let mut checks = Vec::new();

    for (i, &x) in xs.iter().enumerate() {
        let sd = sigma * x.sqrt() * params.target_scale;
        let ks = weighted_ks(&WeightedSample::equal_weights(&cols[i])?, &TargetLaw::gaussian(sd)?)?;
        checks.push(Check::new(
            format!("ks_marginal[{}]", fmt_x(x)),
            ks,
            params.ks_threshold,
            Comparison::Below,
            seeds,
        ));
    }

    for i in 1..xs.len() {
        let inc: Vec<f64> = cols[i].iter().zip(&cols[i - 1]).map(|(b, a)| b - a).collect();
        let sd = sigma * (xs[i] - xs[i - 1]).sqrt() * params.target_scale;
        let ks = weighted_ks(&WeightedSample::equal_weights(&inc)?, &TargetLaw::gaussian(sd)?)?;
        checks.push(Check::new(
            format!("ks_increment[{},{}]", fmt_x(xs[i - 1]), fmt_x(xs[i])),
            ks,
            params.ks_threshold,
            Comparison::Below,
            seeds,
        ));
    }

    for i in 0..xs.len() {
        for j in i..xs.len() {
            let (cov, se) = covariance_with_se(&cols[i], &cols[j]);
            let expected = var * xs[i].min(xs[j]);
            checks.push(
                Check::new(
                    format!("covariance[{},{}]", fmt_x(xs[i]), fmt_x(xs[j])),
                    (cov - expected).abs() / se,
                    params.se_multiplier,
                    Comparison::AtMost,
                    seeds,
                )
                .with_note(format!(
                    "|cov − σ²·min| in standard errors; cov = {cov}, expected {expected}"
                )),
            );
        }
    }

    // Increment second moments over consecutive points, starting from X(0) = 0.
    for i in 0..xs.len() {
        let (prev_x, sq): (f64, Vec<f64>) = if i == 0 {
            (0.0, cols[0].iter().map(|v| v * v).collect())
        } else {
            (
                xs[i - 1],
                cols[i]
                    .iter()
                    .zip(&cols[i - 1])
                    .map(|(b, a)| (b - a) * (b - a))
                    .collect(),
            )
        };
        let est = mean(&sq);
        let se = (variance(&sq) / sq.len() as f64).sqrt();
        let expected = var * (xs[i] - prev_x);
        checks.push(
            Check::new(
                format!("second_moment[{},{}]", fmt_x(prev_x), fmt_x(xs[i])),
                (est - expected).abs() / se,
                params.se_multiplier,
                Comparison::AtMost,
                seeds,
            )
            .with_note(format!(
                "|E|ΔX|² − σ²|Δx|| in standard errors; estimate {est}, expected {expected}"
            )),
        );
    }
    let ks = weighted_ks(
        &WeightedSample::equal_weights(sups)?,
        &TargetLaw::wiener_sup(sigma * params.target_scale)?,
    )?;
    checks.push(Check::new(
        "ks_supremum",
        ks,
        params.sup_ks_threshold,
        Comparison::Below,
        seeds,
    ));
    Ok(checks)
}
