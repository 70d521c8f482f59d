//! Exact realizations of `V` and the scaled processes built from them.
//!
//! A [`JumpRecord`] stores every jump of one realization over `(0, horizon]`.
//! Between jumps a pure-jump path is linear with slope `drift`, so values,
//! suprema and coupled differences are computed exactly from the record. One
//! record serves any number of time scales `t ≤ horizon` by prefix
//! evaluation, which is what the almost sure harnesses rely on.

use std::io::Write;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::LevyModel;
use crate::seed::{SeedStream, StreamTag};
use crate::{Error, Result};

/// Diffusion cells per unit of time; the Brownian component is linearly
/// interpolated between cell boundaries.
pub const DIFFUSION_CELLS_PER_UNIT: f64 = 16.0;
const MIN_DIFFUSION_CELLS: usize = 1024;

/// Pre-sampled `diffusion_sd·B` on a uniform grid of `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
struct DiffusionGrid {
    step: f64,
    values: Vec<f64>,
}

impl DiffusionGrid {
    fn sample(sd: f64, horizon: f64, rng: &mut ChaCha8Rng) -> Self {
        let cells = ((horizon * DIFFUSION_CELLS_PER_UNIT).ceil() as usize).max(MIN_DIFFUSION_CELLS);
        let step = horizon / cells as f64;
        let scale = sd * step.sqrt();
        let mut values = Vec::with_capacity(cells + 1);
        let mut acc = 0.0;
        values.push(acc);
        for _ in 0..cells {
            let z: f64 = StandardNormal.sample(rng);
            acc += scale * z;
            values.push(acc);
        }
        DiffusionGrid { step, values }
    }

    fn eval(&self, t: f64) -> f64 {
        let pos = t / self.step;
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let frac = pos - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }
}

/// One realization of `V` on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpRecord {
    horizon: f64,
    jump_times: Vec<f64>,
    jump_sizes: Vec<f64>,
    model: LevyModel,
    diffusion: Option<DiffusionGrid>,
    provenance: Option<SeedStream>,
    /// `cumulative[i]` = sum of the first `i` jump sizes.
    cumulative: Vec<f64>,
    /// `prefix_sup[i]` = sup of `V` over `[0, τ_i]`, left limits included.
    /// Empty when the record carries a diffusion component.
    prefix_sup: Vec<f64>,
    prefix_abs_sup: Vec<f64>,
}

/// Draws a realization of `V` over `(0, horizon]`: a Poisson(rate·horizon)
/// jump count, sorted uniform jump times, i.i.d. jump sizes, and (when the
/// model has one) the Brownian component on a fine grid.
pub fn sample_jumps(model: &LevyModel, horizon: f64, seed: SeedStream) -> Result<JumpRecord> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Domain(format!("horizon must be finite and > 0, got {horizon}")));
    }
    let mut rng = seed.rng();
    let lambda = model.poisson_rate() * horizon;
    let count = Poisson::new(lambda)
        .map_err(|e| Error::InvalidParameter(format!("poisson mean {lambda}: {e}")))?
        .sample(&mut rng) as usize;

    let mut jump_times = Vec::with_capacity(count);
    loop {
        jump_times.clear();
        // 1 − U with U uniform on [0, 1) lands in (0, 1].
        jump_times.extend((0..count).map(|_| horizon * (1.0 - rng.random::<f64>())));
        jump_times.sort_unstable_by(f64::total_cmp);
        if jump_times.windows(2).all(|w| w[0] < w[1]) {
            break;
        }
    }
    let law = *model.jump_law();
    let jump_sizes: Vec<f64> = (0..count).map(|_| law.sample(&mut rng)).collect();
    let diffusion = (!model.is_pure_jump()).then(|| DiffusionGrid::sample(model.diffusion_sd(), horizon, &mut rng));

    Ok(JumpRecord::assemble(
        model.clone(),
        horizon,
        jump_times,
        jump_sizes,
        diffusion,
        Some(seed),
    ))
}

impl JumpRecord {
    /// Builds a record from explicit jumps, for audits and tests. The model
    /// must be pure-jump; its drift is used between jumps, and the sizes are
    /// not checked against its jump law.
    pub fn from_jumps(model: &LevyModel, horizon: f64, jump_times: Vec<f64>, jump_sizes: Vec<f64>) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Domain(format!("horizon must be finite and > 0, got {horizon}")));
        }
        if !model.is_pure_jump() {
            return Err(Error::Unsupported(
                "explicit jump records cannot carry a diffusion component".into(),
            ));
        }
        if jump_times.len() != jump_sizes.len() {
            return Err(Error::InvalidParameter(format!(
                "{} jump times but {} jump sizes",
                jump_times.len(),
                jump_sizes.len()
            )));
        }
        if !jump_times.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter("jump times must be strictly increasing".into()));
        }
        if let Some(bad) = jump_times.iter().find(|&&t| !(t > 0.0 && t <= horizon)) {
            return Err(Error::Domain(format!("jump time {bad} outside (0, {horizon}]")));
        }
        if let Some(bad) = jump_sizes.iter().find(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter(format!("jump size {bad} is not finite")));
        }
        Ok(Self::assemble(
            model.clone(),
            horizon,
            jump_times,
            jump_sizes,
            None,
            None,
        ))
    }

    fn assemble(
        model: LevyModel,
        horizon: f64,
        jump_times: Vec<f64>,
        jump_sizes: Vec<f64>,
        diffusion: Option<DiffusionGrid>,
        provenance: Option<SeedStream>,
    ) -> Self {
        let mut cumulative = Vec::with_capacity(jump_sizes.len() + 1);
        let mut acc = 0.0;
        cumulative.push(acc);
        for s in &jump_sizes {
            acc += s;
            cumulative.push(acc);
        }

        let (mut prefix_sup, mut prefix_abs_sup) = (Vec::new(), Vec::new());
        if diffusion.is_none() {
            let drift = model.drift();
            prefix_sup.reserve(jump_times.len() + 1);
            prefix_abs_sup.reserve(jump_times.len() + 1);
            let (mut sup, mut abs_sup) = (0.0f64, 0.0f64);
            prefix_sup.push(sup);
            prefix_abs_sup.push(abs_sup);
            for (i, &tau) in jump_times.iter().enumerate() {
                let before = cumulative[i] + drift * tau;
                let after = cumulative[i + 1] + drift * tau;
                sup = sup.max(before).max(after);
                abs_sup = abs_sup.max(before.abs()).max(after.abs());
                prefix_sup.push(sup);
                prefix_abs_sup.push(abs_sup);
            }
        }

        JumpRecord {
            horizon,
            jump_times,
            jump_sizes,
            model,
            diffusion,
            provenance,
            cumulative,
            prefix_sup,
            prefix_abs_sup,
        }
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn jump_sizes(&self) -> &[f64] {
        &self.jump_sizes
    }

    pub fn model(&self) -> &LevyModel {
        &self.model
    }

    pub fn provenance(&self) -> Option<SeedStream> {
        self.provenance
    }

    pub fn has_diffusion(&self) -> bool {
        self.diffusion.is_some()
    }

    /// Number of jumps in `[0, t]`.
    fn jumps_up_to(&self, t: f64) -> usize {
        self.jump_times.partition_point(|&tau| tau <= t)
    }

    fn value_with_count(&self, count: usize, t: f64) -> f64 {
        let mut v = self.cumulative[count] + self.model.drift() * t;
        if let Some(d) = &self.diffusion {
            v += d.eval(t);
        }
        v
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t >= 0.0 && t <= self.horizon {
            Ok(())
        } else {
            Err(Error::Domain(format!("time {t} outside [0, {}]", self.horizon)))
        }
    }

    /// `V(t)`, right-continuous: a jump at exactly `t` is included.
    pub fn eval_v(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.value_with_count(self.jumps_up_to(t), t))
    }

    /// `X_t` on the grid `x_j = j/m`: `values[j] = V(t·j/m)/√t`.
    pub fn scale_path(&self, t: f64, m: usize) -> Result<PathGrid> {
        self.check_scale(t)?;
        if m == 0 {
            return Err(Error::InvalidParameter("grid needs m >= 1 subintervals".into()));
        }
        let root = t.sqrt();
        let mut values = Vec::with_capacity(m + 1);
        let mut count = 0;
        for j in 0..=m {
            let s = t * (j as f64 / m as f64);
            while count < self.jump_times.len() && self.jump_times[count] <= s {
                count += 1;
            }
            values.push(self.value_with_count(count, s) / root);
        }
        Ok(PathGrid { values })
    }

    fn check_scale(&self, t: f64) -> Result<()> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("time scale must be > 0, got {t}")));
        }
        if t > self.horizon {
            return Err(Error::Domain(format!(
                "time scale {t} needs a record with horizon >= {t}, this one ends at {}",
                self.horizon
            )));
        }
        Ok(())
    }

    /// Exact `sup_{x∈[0,1]} X_t(x)` for pure-jump paths.
    ///
    /// The path is linear between jumps, so the supremum is attained at
    /// `x = 0`, `x = 1`, or a jump point (either side).
    pub fn exact_sup(&self, t: f64) -> Result<f64> {
        if self.diffusion.is_some() {
            return Err(Error::Unsupported(
                "exact suprema need a pure-jump path; use a dense grid for diffusion models".into(),
            ));
        }
        self.check_scale(t)?;
        let count = self.jumps_up_to(t);
        let end = self.value_with_count(count, t);
        Ok(self.prefix_sup[count].max(end) / t.sqrt())
    }

    /// Exact `sup_{u∈[0,t]} |V(u)|` (unscaled), left limits included.
    pub fn exact_abs_sup_v(&self, t: f64) -> Result<f64> {
        if self.diffusion.is_some() {
            return Err(Error::Unsupported(
                "exact suprema need a pure-jump path; use a dense grid for diffusion models".into(),
            ));
        }
        self.check_time(t)?;
        let count = self.jumps_up_to(t);
        let end = self.value_with_count(count, t);
        Ok(self.prefix_abs_sup[count].max(end.abs()))
    }

    /// The coupled path `Y_kl`, which vanishes before `s_l/s_k` and is
    /// `Y_k(x) − V(s_l)/√s_k` from there on. It is independent of the prefix
    /// path `Y_l`.
    pub fn build_coupled_path(&self, s_l: f64, s_k: f64, m: usize) -> Result<PathGrid> {
        if !(s_l > 0.0) {
            return Err(Error::Domain(format!("s_l must be > 0, got {s_l}")));
        }
        if s_l >= s_k {
            return Err(Error::Domain(format!("coupling needs s_l < s_k, got {s_l} >= {s_k}")));
        }
        let full = self.scale_path(s_k, m)?;
        let offset = self.eval_v(s_l)? / s_k.sqrt();
        let cut = s_l / s_k;
        let values = full
            .values
            .iter()
            .enumerate()
            .map(|(j, &y)| if (j as f64 / m as f64) < cut { 0.0 } else { y - offset })
            .collect();
        Ok(PathGrid { values })
    }

    /// Exact `sup_x |Y_k(x) − Y_kl(x)|`: the difference is `Y_k` before
    /// `s_l/s_k` and the constant `V(s_l)/√s_k` after, so it equals
    /// `sup_{[0, s_l]} |V| / √s_k`.
    pub fn coupling_distance(&self, s_l: f64, s_k: f64) -> Result<f64> {
        if !(s_l > 0.0) || s_l >= s_k {
            return Err(Error::Domain(format!("coupling needs 0 < s_l < s_k, got {s_l}, {s_k}")));
        }
        self.check_scale(s_k)?;
        Ok(self.exact_abs_sup_v(s_l)? / s_k.sqrt())
    }

    /// SHA-256 over the horizon, jumps and diffusion grid.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.horizon.to_le_bytes());
        for (t, s) in self.jump_times.iter().zip(&self.jump_sizes) {
            h.update(t.to_le_bytes());
            h.update(s.to_le_bytes());
        }
        if let Some(d) = &self.diffusion {
            for v in &d.values {
                h.update(v.to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }

    /// Two-column `time,size` CSV preceded by one `#` metadata line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let law = serde_json::to_string(self.model.jump_law()).expect("jump law serializes");
        let (master, stream) = match self.provenance {
            Some(s) => (s.master.to_string(), s.stream.to_string()),
            None => ("none".into(), "none".into()),
        };
        writeln!(
            out,
            "# horizon={} rate={} drift={} diffusion_sd={} jump_law={} seed={} stream={} digest={}",
            self.horizon,
            self.model.poisson_rate(),
            self.model.drift(),
            self.model.diffusion_sd(),
            law,
            master,
            stream,
            self.digest()
        )?;
        writeln!(out, "time,size")?;
        for (t, s) in self.jump_times.iter().zip(&self.jump_sizes) {
            writeln!(out, "{t},{s}")?;
        }
        Ok(())
    }
}

/// A path sampled at `x_j = j/m`, `j = 0..=m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathGrid {
    values: Vec<f64>,
}

impl PathGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidParameter("a path grid needs at least two points".into()));
        }
        Ok(PathGrid { values })
    }

    /// Number of subintervals.
    pub fn m(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `count` paths of `σW` on the grid `j/m` with independent
/// `N(0, σ²/m)` increments. Path `i` uses replica stream `i` under `master`.
pub fn simulate_wiener(sigma: f64, m: usize, count: usize, master: u64) -> Result<Vec<PathGrid>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be > 0, got {sigma}")));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("grid needs m >= 1 subintervals".into()));
    }
    if count == 0 {
        return Err(Error::InvalidParameter("need at least one path".into()));
    }
    let scale = sigma / (m as f64).sqrt();
    Ok((0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = SeedStream::replica(master, StreamTag::Wiener, i).rng();
            let mut values = Vec::with_capacity(m + 1);
            let mut acc = 0.0;
            values.push(acc);
            for _ in 0..m {
                let z: f64 = StandardNormal.sample(&mut rng);
                acc += scale * z;
                values.push(acc);
            }
            PathGrid { values }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::JumpLaw;
    use approx::assert_abs_diff_eq;

    fn unit_model() -> LevyModel {
        LevyModel::centered_poisson()
    }

    fn zero_mean_model() -> LevyModel {
        LevyModel::random_sums(JumpLaw::Gaussian { mean: 0.0, sd: 1.0 }).unwrap()
    }

    #[test]
    fn same_seed_same_record() {
        let m = LevyModel::random_sums(JumpLaw::Exponential { rate: 1.0 }).unwrap();
        let s = SeedStream::replica(11, StreamTag::Custom(0), 5);
        let a = sample_jumps(&m, 500.0, s).unwrap();
        let b = sample_jumps(&m, 500.0, s).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.digest(), b.digest());
        let c = sample_jumps(&m, 500.0, SeedStream::replica(11, StreamTag::Custom(0), 6)).unwrap();
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn record_invariants() {
        let m = LevyModel::new(JumpLaw::Uniform { lo: -1.0, hi: 2.0 }, 3.0, 0.0).unwrap();
        let r = sample_jumps(&m, 50.0, SeedStream::new(1, 2)).unwrap();
        assert!(r.jump_times().windows(2).all(|w| w[0] < w[1]));
        assert!(r.jump_times().iter().all(|&t| t > 0.0 && t <= 50.0));
        assert_eq!(r.jump_times().len(), r.jump_sizes().len());
        assert!(r.jump_sizes().iter().all(|&s| (-1.0..2.0).contains(&s)));
    }

    #[test]
    fn degenerate_law_gives_unit_jumps() {
        let r = sample_jumps(&unit_model(), 200.0, SeedStream::new(3, 0)).unwrap();
        assert!(!r.jump_sizes().is_empty());
        assert!(r.jump_sizes().iter().all(|&s| s == 1.0));
    }

    #[test]
    fn bad_horizons_rejected() {
        for h in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                sample_jumps(&unit_model(), h, SeedStream::new(0, 0)),
                Err(Error::Domain(_))
            ));
        }
    }

    #[test]
    fn eval_v_examples() {
        let m = unit_model();
        let r = JumpRecord::from_jumps(&m, 2.0, vec![0.5], vec![2.0]).unwrap();
        assert_eq!(r.eval_v(0.0).unwrap(), 0.0);
        assert_eq!(r.eval_v(1.0).unwrap(), 1.0);

        let r = JumpRecord::from_jumps(&m, 1.0, vec![0.3, 0.7], vec![1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(r.eval_v(0.7).unwrap(), 1.3, epsilon = 1e-15);
        assert_abs_diff_eq!(r.eval_v(0.6999999).unwrap(), 1.0 - 0.6999999, epsilon = 1e-15);
        assert!(matches!(r.eval_v(1.5), Err(Error::Domain(_))));
        assert!(matches!(r.eval_v(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn from_jumps_validation() {
        let m = unit_model();
        assert!(JumpRecord::from_jumps(&m, 1.0, vec![0.5, 0.5], vec![1.0, 1.0]).is_err());
        assert!(JumpRecord::from_jumps(&m, 1.0, vec![0.0], vec![1.0]).is_err());
        assert!(JumpRecord::from_jumps(&m, 1.0, vec![1.5], vec![1.0]).is_err());
        assert!(JumpRecord::from_jumps(&m, 1.0, vec![0.5], vec![]).is_err());
        let diff = LevyModel::new(JumpLaw::Degenerate { value: 1.0 }, 1.0, 1.0).unwrap();
        assert!(matches!(
            JumpRecord::from_jumps(&diff, 1.0, vec![], vec![]),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn scale_path_examples() {
        let r = JumpRecord::from_jumps(&zero_mean_model(), 4.0, vec![2.0], vec![1.0]).unwrap();
        let p = r.scale_path(4.0, 2).unwrap();
        assert_eq!(p.values(), &[0.0, 0.5, 0.5]);

        let p = r.scale_path(1.0, 4).unwrap();
        for (j, &v) in p.values().iter().enumerate() {
            assert_eq!(v, r.eval_v(j as f64 / 4.0).unwrap());
        }
        assert!(matches!(r.scale_path(5.0, 4), Err(Error::Domain(msg)) if msg.contains("horizon >= 5")));
        assert!(r.scale_path(2.0, 0).is_err());
        assert!(r.scale_path(0.0, 2).is_err());
    }

    #[test]
    fn exact_sup_examples() {
        let m = unit_model();
        let r = JumpRecord::from_jumps(&m, 10.0, vec![], vec![]).unwrap();
        assert_eq!(r.exact_sup(10.0).unwrap(), 0.0);

        let r = JumpRecord::from_jumps(&zero_mean_model(), 16.0, vec![8.0], vec![1.0]).unwrap();
        assert_eq!(r.exact_sup(16.0).unwrap(), 0.25);

        let diff = LevyModel::new(JumpLaw::Degenerate { value: 1.0 }, 1.0, 0.5).unwrap();
        let r = sample_jumps(&diff, 10.0, SeedStream::new(0, 0)).unwrap();
        assert!(matches!(r.exact_sup(5.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn exact_sup_sees_left_limits() {
        // Positive drift (negative mean): the path climbs to 0.9 just before
        // the jump at 0.9 and never again.
        let m = LevyModel::random_sums(JumpLaw::Degenerate { value: -1.0 }).unwrap();
        let r = JumpRecord::from_jumps(&m, 1.0, vec![0.9], vec![-1.0]).unwrap();
        assert_abs_diff_eq!(r.exact_sup(1.0).unwrap(), 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(r.exact_abs_sup_v(1.0).unwrap(), 0.9, epsilon = 1e-15);
    }

    #[test]
    fn coupled_path_examples() {
        let r = sample_jumps(&unit_model(), 40.0, SeedStream::new(9, 1)).unwrap();
        let (s_l, s_k, m) = (10.0, 40.0, 8);
        let y = r.build_coupled_path(s_l, s_k, m).unwrap();
        let full = r.scale_path(s_k, m).unwrap();
        for j in 0..=m {
            if (j as f64 / m as f64) < 0.25 {
                assert_eq!(y.values()[j], 0.0);
            }
        }
        let expected_end = full.values()[m] - r.eval_v(s_l).unwrap() / s_k.sqrt();
        assert_eq!(y.values()[m], expected_end);
        assert!(matches!(r.build_coupled_path(10.0, 10.0, m), Err(Error::Domain(_))));
        assert!(matches!(r.build_coupled_path(20.0, 10.0, m), Err(Error::Domain(_))));
    }

    #[test]
    fn coupling_distance_bounds_grid_distance() {
        let r = sample_jumps(&unit_model(), 50.0, SeedStream::new(4, 4)).unwrap();
        let (s_l, s_k, m) = (5.0, 50.0, 1000);
        let y_k = r.scale_path(s_k, m).unwrap();
        let y_kl = r.build_coupled_path(s_l, s_k, m).unwrap();
        let grid = y_k
            .values()
            .iter()
            .zip(y_kl.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let exact = r.coupling_distance(s_l, s_k).unwrap();
        assert!(grid <= exact + 1e-12);
        // The dense grid misses at most one drift step of size 1/m·s_k/√s_k.
        assert!(exact - grid <= s_k / m as f64 / s_k.sqrt() + 1e-12);
    }

    #[test]
    fn diffusion_records_are_continuous_between_jumps() {
        let m = LevyModel::new(JumpLaw::Degenerate { value: 0.0 }, 1.0, 2.0).unwrap();
        let r = sample_jumps(&m, 10.0, SeedStream::new(5, 5)).unwrap();
        assert!(r.has_diffusion());
        assert_eq!(r.eval_v(0.0).unwrap(), 0.0);
        let a = r.eval_v(3.0).unwrap();
        let b = r.eval_v(3.0 + 1e-9).unwrap();
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn csv_export_lists_every_jump() {
        let r = sample_jumps(&unit_model(), 30.0, SeedStream::new(2, 2)).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let meta = lines.next().unwrap();
        assert!(meta.starts_with("# horizon=30 rate=1 drift=-1"));
        assert!(meta.contains(&r.digest()));
        assert_eq!(lines.next(), Some("time,size"));
        let rows: Vec<(f64, f64)> = lines
            .map(|l| {
                let (t, s) = l.split_once(',').unwrap();
                (t.parse().unwrap(), s.parse().unwrap())
            })
            .collect();
        assert_eq!(rows.len(), r.jump_times().len());
        for ((t, s), (et, es)) in rows.iter().zip(r.jump_times().iter().zip(r.jump_sizes())) {
            assert_eq!(t, et);
            assert_eq!(s, es);
        }
    }

    #[test]
    fn wiener_paths_start_at_zero() {
        let paths = simulate_wiener(1.5, 16, 10, 3).unwrap();
        assert_eq!(paths.len(), 10);
        assert!(paths.iter().all(|p| p.values()[0] == 0.0 && p.m() == 16));
        assert!(simulate_wiener(0.0, 16, 10, 3).is_err());
        assert!(simulate_wiener(1.0, 0, 10, 3).is_err());
        assert!(simulate_wiener(1.0, 16, 0, 3).is_err());
    }
}
