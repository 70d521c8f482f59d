//! Validators for the structural hypotheses of the almost sure theorems.
//!
//! * (A) `s_k / k^β` nondecreasing for the schedule `s_k`.
//! * (B) `f(x) / x^β` nondecreasing for the time change `f`.
//! * (C) `d` positive and nonincreasing, `∫_k^{k+1} d ≤ ½·ln((k+1)/k)` for
//!   every `k`, and `∫_1^∞ d = ∞`.
//!
//! "Increasing" is read as nondecreasing so the canonical schedule `s_k = k`
//! with `β = 1` passes. Every check runs on a finite range that is recorded in
//! the report; a pass means "verified on range".

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative slack when comparing consecutive ratios; absorbs `powf` rounding.
const RATIO_REL_TOL: f64 = 1e-12;
/// Absolute tolerance of the per-interval quadrature in condition (C).
pub const QUADRATURE_TOL: f64 = 1e-10;
/// An interval integral may exceed its bound by at most this much.
pub const INTERVAL_SLACK: f64 = 1e-9;

/// `s_k` for `k = 1, 2, …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Sequence {
    /// `s_k = c·k^p`.
    Power { c: f64, p: f64 },
    /// `s_k = values[k-1]`.
    Table { values: Vec<f64> },
}

impl Sequence {
    pub fn value(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Err(Error::Domain("sequences are indexed from k = 1".into()));
        }
        match self {
            Sequence::Power { c, p } => Ok(c * (k as f64).powf(*p)),
            Sequence::Table { values } => values.get(k - 1).copied().ok_or_else(|| {
                Error::Domain(format!(
                    "table sequence has {} entries, asked for k = {k}",
                    values.len()
                ))
            }),
        }
    }
}

/// Schedule with its exponent, as written in configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub sequence: Sequence,
    pub beta: f64,
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        ScheduleSpec {
            sequence: Sequence::Power { c: 1.0, p: 1.0 },
            beta: 1.0,
        }
    }
}

/// A schedule checked on `k = 1..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleA {
    pub sequence: Sequence,
    pub beta: f64,
    pub n_max: usize,
}

impl ScheduleA {
    pub fn new(spec: &ScheduleSpec, n_max: usize) -> Self {
        ScheduleA {
            sequence: spec.sequence.clone(),
            beta: spec.beta,
            n_max,
        }
    }

    /// `s_k = k`, `β = 1`.
    pub fn canonical(n_max: usize) -> Self {
        Self::new(&ScheduleSpec::default(), n_max)
    }

    pub fn s(&self, k: usize) -> Result<f64> {
        self.sequence.value(k)
    }
}

/// A positive function on `[1, ∞)` (or on a table's range).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Function {
    /// `c·x^p`.
    Power { c: f64, p: f64 },
    /// Piecewise-linear interpolation through `(xs[i], ys[i])`.
    Table { xs: Vec<f64>, ys: Vec<f64> },
}

impl Function {
    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            Function::Power { c, p } => Ok(c * x.powf(*p)),
            Function::Table { xs, ys } => interpolate(xs, ys, x),
        }
    }
}

fn validate_table(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return Err(Error::InvalidParameter(format!(
            "table needs >= 2 points and matching lengths, got {} xs and {} ys",
            xs.len(),
            ys.len()
        )));
    }
    if !xs.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter(
            "table abscissae must be strictly increasing".into(),
        ));
    }
    Ok(())
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> Result<f64> {
    validate_table(xs, ys)?;
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    if !(x >= lo && x <= hi) {
        return Err(Error::Domain(format!("{x} outside table range [{lo}, {hi}]")));
    }
    let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
    let w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    Ok(ys[i - 1] + w * (ys[i] - ys[i - 1]))
}

/// Time change `f` with its exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeChangeB {
    pub f: Function,
    pub beta: f64,
}

impl Default for TimeChangeB {
    /// `f(t) = t`, `β = 1`.
    fn default() -> Self {
        TimeChangeB {
            f: Function::Power { c: 1.0, p: 1.0 },
            beta: 1.0,
        }
    }
}

/// Weight function `d` and its accumulator `D(S) = ∫_1^S d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightC {
    /// `d(s) = 1/(c·s)`.
    InverseLinear { c: f64 },
    /// Piecewise-linear `d` through `(xs[i], ys[i])`.
    Table { xs: Vec<f64>, ys: Vec<f64> },
}

impl Default for WeightC {
    /// `d(s) = 1/(2s)`, `D(S) = ½·ln S`.
    fn default() -> Self {
        WeightC::InverseLinear { c: 2.0 }
    }
}

impl WeightC {
    pub fn d(&self, s: f64) -> Result<f64> {
        match self {
            WeightC::InverseLinear { c } => {
                if *c == 0.0 || !c.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "weight 1/(c·s) needs finite c != 0, got {c}"
                    )));
                }
                Ok(1.0 / (c * s))
            }
            WeightC::Table { xs, ys } => interpolate(xs, ys, s),
        }
    }

    /// `D(S) = ∫_1^S d(s) ds`.
    pub fn accumulated(&self, s: f64) -> Result<f64> {
        match self {
            WeightC::InverseLinear { c } => {
                self.d(1.0)?;
                Ok(s.ln() / c)
            }
            WeightC::Table { .. } => {
                self.d(s)?;
                let mut err = None;
                let v = adaptive_simpson(
                    &mut |x| match self.d(x) {
                        Ok(v) => v,
                        Err(e) => {
                            err.get_or_insert(e);
                            0.0
                        }
                    },
                    1.0,
                    s,
                    QUADRATURE_TOL,
                );
                match err {
                    Some(e) => Err(e),
                    None => Ok(v),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    A,
    B,
    C,
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Condition::A => "A",
            Condition::B => "B",
            Condition::C => "C",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Divergence {
    /// `∫_1^∞ d = ∞`, shown analytically.
    Diverges,
    /// `∫_1^∞ d < ∞`, shown analytically.
    Converges,
    /// Tabulated weights only cover a finite range.
    Unverifiable,
}

/// Outcome of one condition check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub passed: bool,
    /// Inclusive range the check ran on (indices for (A), points for (B),
    /// `[1, k_max + 1]` for (C)).
    pub checked_range: [f64; 2],
    /// First index (A), point (B) or interval start `k` (C) where the
    /// monotone-ratio or interval-integral test fails.
    pub first_violation: Option<f64>,
    /// (A), (B): relative change of consecutive ratios. (C): bound minus
    /// interval integral, one entry per `k`.
    pub margins: Vec<f64>,
    /// (C) only: first sampled point where `d` is nonpositive or increasing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape_violation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence: Option<Divergence>,
    pub note: String,
}

fn monotone_ratio_report(
    condition: Condition,
    range: [f64; 2],
    points: &[f64],
    ratios: &[f64],
    note: String,
) -> ConditionReport {
    let mut margins = Vec::with_capacity(ratios.len().saturating_sub(1));
    let mut first_violation = None;
    for (i, w) in ratios.windows(2).enumerate() {
        let rel = (w[1] - w[0]) / w[0].abs();
        margins.push(rel);
        if first_violation.is_none() && w[1] < w[0] * (1.0 - RATIO_REL_TOL) {
            first_violation = Some(points[i + 1]);
        }
    }
    ConditionReport {
        condition,
        passed: first_violation.is_none(),
        checked_range: range,
        first_violation,
        margins,
        shape_violation: None,
        divergence: None,
        note,
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "beta must be finite and > 0, got {beta}"
        )))
    }
}

/// (A): `s_k/k^β` nondecreasing on `k = 1..=n_max`.
pub fn check_condition_a(schedule: &ScheduleA) -> Result<ConditionReport> {
    if schedule.n_max < 2 {
        return Err(Error::InvalidParameter(format!(
            "n_max must be >= 2, got {}",
            schedule.n_max
        )));
    }
    check_beta(schedule.beta)?;
    let mut points = Vec::with_capacity(schedule.n_max);
    let mut ratios = Vec::with_capacity(schedule.n_max);
    for k in 1..=schedule.n_max {
        let s = schedule.s(k)?;
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Domain(format!("s_{k} = {s} is not positive")));
        }
        points.push(k as f64);
        ratios.push(s / (k as f64).powf(schedule.beta));
    }
    Ok(monotone_ratio_report(
        Condition::A,
        [1.0, schedule.n_max as f64],
        &points,
        &ratios,
        format!("verified on k = 1..={}", schedule.n_max),
    ))
}

/// (B): `f(x)/x^β` nondecreasing along `x_points`.
pub fn check_condition_b(tc: &TimeChangeB, x_points: &[f64]) -> Result<ConditionReport> {
    check_beta(tc.beta)?;
    if x_points.is_empty() {
        return Err(Error::InvalidParameter("no evaluation points".into()));
    }
    if !x_points.windows(2).all(|w| w[0] < w[1]) || !(x_points[0] > 0.0) {
        return Err(Error::InvalidParameter(
            "evaluation points must be positive and strictly increasing".into(),
        ));
    }
    let mut ratios = Vec::with_capacity(x_points.len());
    for &x in x_points {
        let fx = tc.f.eval(x)?;
        if !(fx > 0.0 && fx.is_finite()) {
            return Err(Error::Domain(format!("f({x}) = {fx} is not positive")));
        }
        ratios.push(fx / x.powf(tc.beta));
    }
    let range = [x_points[0], x_points[x_points.len() - 1]];
    Ok(monotone_ratio_report(
        Condition::B,
        range,
        x_points,
        &ratios,
        format!("verified at {} points in [{}, {}]", x_points.len(), range[0], range[1]),
    ))
}

/// (C) on intervals `[k, k+1]`, `k = 1..=k_max`.
pub fn check_condition_c(w: &WeightC, k_max: usize) -> Result<ConditionReport> {
    if k_max < 1 {
        return Err(Error::InvalidParameter("k_max must be >= 1".into()));
    }
    if let WeightC::Table { xs, ys } = w {
        validate_table(xs, ys)?;
    }

    // Shape: positive and nonincreasing at integers and midpoints.
    let mut shape_violation = None;
    let mut prev = f64::INFINITY;
    for i in 0..=2 * k_max {
        let s = 1.0 + 0.5 * i as f64;
        let d = w.d(s)?;
        if !(d > 0.0) || d > prev {
            shape_violation = Some(s);
            break;
        }
        prev = d;
    }

    let mut margins = Vec::with_capacity(k_max);
    let mut first_violation = None;
    for k in 1..=k_max {
        let a = k as f64;
        let mut err = None;
        let integral = adaptive_simpson(
            &mut |s| match w.d(s) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            a,
            a + 1.0,
            QUADRATURE_TOL,
        );
        if let Some(e) = err {
            return Err(e);
        }
        let bound = 0.5 * (1.0 / a).ln_1p();
        let margin = bound - integral;
        if first_violation.is_none() && margin < -INTERVAL_SLACK {
            first_violation = Some(a);
        }
        margins.push(margin);
    }

    let divergence = match w {
        WeightC::InverseLinear { c } if *c > 0.0 => Divergence::Diverges,
        WeightC::InverseLinear { .. } => Divergence::Converges,
        WeightC::Table { .. } => Divergence::Unverifiable,
    };
    let passed = first_violation.is_none() && shape_violation.is_none() && divergence != Divergence::Converges;
    let note = match divergence {
        Divergence::Unverifiable => format!(
            "verified on k = 1..={k_max}; divergence of the total integral cannot be checked for tabulated weights"
        ),
        _ => format!("verified on k = 1..={k_max}; divergence decided analytically"),
    };
    Ok(ConditionReport {
        condition: Condition::C,
        passed,
        checked_range: [1.0, (k_max + 1) as f64],
        first_violation,
        margins,
        shape_violation,
        divergence: Some(divergence),
        note,
    })
}

/// Adaptive Simpson quadrature to absolute tolerance `eps`.
fn adaptive_simpson(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &mut impl FnMut(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, b, fa, fm, fb, whole, eps, 48)
}

/// `n` points log-spaced on `[lo, hi]`, both ends included.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    let mut pts: Vec<f64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect();
    pts[0] = lo;
    pts[n - 1] = hi;
    pts
}
