//! Weighted empirical measures, path functionals and target laws.
//!
//! Weak convergence in `D[0,1]` is tested through a panel of continuous
//! functionals (endpoint, supremum, value at a point): each pushes the
//! measure on paths down to a measure on the line, which is then compared
//! with the matching Wiener-functional law by a weighted KS distance.

use serde::{Deserialize, Serialize};

use crate::conditions::WeightC;
use crate::simulate::PathGrid;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub value: f64,
    pub weight: f64,
}

/// A finite measure `Σ w_i δ_{v_i}`, possibly unnormalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSample {
    atoms: Vec<Atom>,
    total_weight: f64,
    /// Prefactor the source construction divides by (`ln n` for the
    /// logarithmic average, `D(S)` for the integral average). CDF
    /// comparisons normalize by `total_weight` instead.
    #[serde(skip_serializing_if = "Option::is_none")]
    normalizer: Option<f64>,
}

impl WeightedSample {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let mut total = 0.0;
        for a in &atoms {
            if !a.value.is_finite() {
                return Err(Error::InvalidParameter(format!("atom value {} is not finite", a.value)));
            }
            if !(a.weight >= 0.0 && a.weight.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "atom weight {} must be finite and >= 0",
                    a.weight
                )));
            }
            total += a.weight;
        }
        if !atoms.is_empty() && !(total > 0.0) {
            return Err(Error::InvalidParameter("all atom weights are zero".into()));
        }
        Ok(WeightedSample {
            atoms,
            total_weight: total,
            normalizer: None,
        })
    }

    pub fn equal_weights(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&value| Atom { value, weight: 1.0 }).collect())
    }

    pub fn with_normalizer(mut self, normalizer: f64) -> Self {
        self.normalizer = Some(normalizer);
        self
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn normalizer(&self) -> Option<f64> {
        self.normalizer
    }

    /// `total_weight / normalizer`: the mass of the measure as the source
    /// construction writes it.
    pub fn normalized_mass(&self) -> Option<f64> {
        self.normalizer.map(|n| self.total_weight / n)
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Distinct values in increasing order with the normalized CDF just
    /// after each one.
    fn steps(&self) -> Vec<(f64, f64)> {
        let mut sorted: Vec<Atom> = self.atoms.clone();
        sorted.sort_by(|a, b| a.value.total_cmp(&b.value));
        let mut steps: Vec<(f64, f64)> = Vec::new();
        let mut acc = 0.0;
        for a in sorted {
            acc += a.weight;
            match steps.last_mut() {
                Some(last) if last.0 == a.value => last.1 = acc,
                _ => steps.push((a.value, acc)),
            }
        }
        for s in &mut steps {
            s.1 = (s.1 / self.total_weight).min(1.0);
        }
        if let Some(last) = steps.last_mut() {
            last.1 = 1.0;
        }
        steps
    }

    /// Normalized CDF `F̂(v)` (right-continuous).
    pub fn cdf(&self, v: f64) -> f64 {
        let steps = self.steps();
        let i = steps.partition_point(|s| s.0 <= v);
        if i == 0 {
            0.0
        } else {
            steps[i - 1].1
        }
    }
}

/// A continuous functional on paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathFunctional {
    /// Path value at `x = 1`.
    Endpoint,
    /// `sup_{x∈[0,1]}` of the path.
    Supremum,
    /// Path value at `x0 ∈ [0, 1]`.
    ValueAt { x0: f64 },
}

impl PathFunctional {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PathFunctional::ValueAt { x0 } if !(0.0..=1.0).contains(&x0) => Err(Error::InvalidParameter(format!(
                "value_at needs x0 in [0, 1], got {x0}"
            ))),
            _ => Ok(()),
        }
    }

    /// Grid index read by `value_at` on an `m`-interval grid: the largest
    /// `j` with `j/m ≤ x0`.
    pub fn grid_index(x0: f64, m: usize) -> usize {
        ((x0 * m as f64).floor() as usize).min(m)
    }
}

/// Evaluates `f` on a sampled path. The supremum is the grid maximum, which
/// can only under-estimate the true supremum of a jump path.
pub fn apply_functional(path: &PathGrid, f: &PathFunctional) -> f64 {
    let v = path.values();
    match *f {
        PathFunctional::Endpoint => v[v.len() - 1],
        PathFunctional::Supremum => v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        PathFunctional::ValueAt { x0 } => v[PathFunctional::grid_index(x0, path.m())],
    }
}

/// Law of a Wiener functional used as a comparison target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetLaw {
    /// `N(0, sd²)`.
    Gaussian { sd: f64 },
    /// `sup_{[0,1]} σW`, with CDF `2Φ(v/σ) − 1` for `v ≥ 0`.
    WienerSup { sigma: f64 },
    /// Normalized empirical law of oracle atoms.
    EmpiricalOracle { sample: WeightedSample },
}

impl TargetLaw {
    pub fn gaussian(sd: f64) -> Result<Self> {
        if !(sd > 0.0 && sd.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gaussian target needs sd > 0, got {sd}"
            )));
        }
        Ok(TargetLaw::Gaussian { sd })
    }

    pub fn wiener_sup(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "wiener_sup target needs sigma > 0, got {sigma}"
            )));
        }
        Ok(TargetLaw::WienerSup { sigma })
    }

    pub fn empirical(sample: WeightedSample) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::NoData("empirical oracle without atoms"));
        }
        Ok(TargetLaw::EmpiricalOracle { sample })
    }

    /// Unit mass at `c`.
    pub fn point_mass(c: f64) -> Result<Self> {
        Self::empirical(WeightedSample::new(vec![Atom { value: c, weight: 1.0 }])?)
    }

    fn is_continuous(&self) -> bool {
        !matches!(self, TargetLaw::EmpiricalOracle { .. })
    }
}

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

pub fn target_cdf(law: &TargetLaw, v: f64) -> f64 {
    match law {
        TargetLaw::Gaussian { sd } => std_normal_cdf(v / sd),
        TargetLaw::WienerSup { sigma } => {
            if v < 0.0 {
                0.0
            } else {
                (2.0 * std_normal_cdf(v / sigma) - 1.0).max(0.0)
            }
        }
        TargetLaw::EmpiricalOracle { sample } => sample.cdf(v),
    }
}

/// Weighted Kolmogorov–Smirnov distance `sup_v |F̂(v) − F(v)|` between the
/// weight-normalized sample and `law`. Both one-sided limits are checked at
/// every jump of either CDF.
pub fn weighted_ks(sample: &WeightedSample, law: &TargetLaw) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::NoData("weighted KS of an empty sample"));
    }
    let own = sample.steps();
    if law.is_continuous() {
        let mut d: f64 = 0.0;
        let mut below = 0.0;
        for &(v, after) in &own {
            let f = target_cdf(law, v);
            d = d.max((after - f).abs()).max((below - f).abs());
            below = after;
        }
        return Ok(d);
    }

    let TargetLaw::EmpiricalOracle { sample: oracle } = law else {
        unreachable!()
    };
    let other = oracle.steps();
    // Merge-walk over the union of jump points.
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb): (f64, f64) = (0.0, 0.0);
    let mut d: f64 = 0.0;
    while i < own.len() || j < other.len() {
        let va = own.get(i).map_or(f64::INFINITY, |s| s.0);
        let vb = other.get(j).map_or(f64::INFINITY, |s| s.0);
        let v = va.min(vb);
        // Left limits at v are the current values.
        d = d.max((fa - fb).abs());
        if va == v {
            fa = own[i].1;
            i += 1;
        }
        if vb == v {
            fb = other[j].1;
            j += 1;
        }
        d = d.max((fa - fb).abs());
    }
    Ok(d)
}

/// Logarithmic average `Σ_{k=1}^n (1/k) δ_{values[k-1]}`, with `ln n`
/// recorded as the normalizer.
pub fn log_average_measure(values: &[f64]) -> Result<WeightedSample> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "logarithmic average needs n >= 2 (ln 1 = 0), got {n}"
        )));
    }
    let atoms = values
        .iter()
        .enumerate()
        .map(|(i, &value)| Atom {
            value,
            weight: 1.0 / (i + 1) as f64,
        })
        .collect();
    Ok(WeightedSample::new(atoms)?.with_normalizer((n as f64).ln()))
}

/// Same atoms as [`log_average_measure`] with equal weights.
pub fn uniform_average_measure(values: &[f64]) -> Result<WeightedSample> {
    WeightedSample::equal_weights(values)
}

/// Midpoint-rule discretization of `∫_1^S δ_{value(t)} d(t) dt`: atoms at
/// the midpoints of `[1, S]` cut into steps of `dt` (the last cell may be
/// shorter), weighted by `d(t_j)·width_j`. `D(S)` is recorded as the
/// normalizer.
pub fn integral_average_measure<F>(mut value_fn: F, w: &WeightC, s: f64, dt: f64) -> Result<WeightedSample>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(s > 1.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "integral average needs S > 1, got {s}"
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("step dt must be > 0, got {dt}")));
    }
    let span = s - 1.0;
    let full = (span / dt).floor() as usize;
    let mut cells: Vec<(f64, f64)> = (0..full).map(|j| (1.0 + (j as f64 + 0.5) * dt, dt)).collect();
    let rest = span - full as f64 * dt;
    // Skip a remainder that is only rounding noise of an exact multiple.
    if rest > 1e-9 * dt {
        let start = 1.0 + full as f64 * dt;
        cells.push((start + 0.5 * rest, rest));
    }
    let mut atoms = Vec::with_capacity(cells.len());
    for (t, width) in cells {
        atoms.push(Atom {
            value: value_fn(t)?,
            weight: w.d(t)? * width,
        });
    }
    Ok(WeightedSample::new(atoms)?.with_normalizer(w.accumulated(s)?))
}
