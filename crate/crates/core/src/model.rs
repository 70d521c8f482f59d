//! The centered compound-Poisson-plus-diffusion family `V`.
//!
//! A [`LevyModel`] is `V(x) = Σ_{i ≤ π(x)} ξ_i + drift·x + diffusion_sd·B(x)`
//! where `π` is a Poisson process of rate `poisson_rate`, `ξ_i` are i.i.d.
//! draws from a [`JumpLaw`], `B` is a standard Brownian motion, and the drift
//! is always the compensator `-poisson_rate·E[ξ]`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Law of a single jump size. Every kind has a closed-form characteristic
/// function, mean and second moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum JumpLaw {
    Degenerate { value: f64 },
    Gaussian { mean: f64, sd: f64 },
    Exponential { rate: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl JumpLaw {
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "jump law {name} must be finite, got {v}"
                )))
            }
        };
        match *self {
            JumpLaw::Degenerate { value } => finite("value", value),
            JumpLaw::Gaussian { mean, sd } => {
                finite("mean", mean)?;
                finite("sd", sd)?;
                if sd <= 0.0 {
                    return Err(Error::InvalidParameter(format!("gaussian sd must be > 0, got {sd}")));
                }
                Ok(())
            }
            JumpLaw::Exponential { rate } => {
                finite("rate", rate)?;
                if rate <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "exponential rate must be > 0, got {rate}"
                    )));
                }
                Ok(())
            }
            JumpLaw::Uniform { lo, hi } => {
                finite("lo", lo)?;
                finite("hi", hi)?;
                if lo >= hi {
                    return Err(Error::InvalidParameter(format!(
                        "uniform needs lo < hi, got [{lo}, {hi}]"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            JumpLaw::Degenerate { value } => value,
            JumpLaw::Gaussian { mean, .. } => mean,
            JumpLaw::Exponential { rate } => 1.0 / rate,
            JumpLaw::Uniform { lo, hi } => 0.5 * (lo + hi),
        }
    }

    /// `E[ξ²]`.
    pub fn second_moment(&self) -> f64 {
        match *self {
            JumpLaw::Degenerate { value } => value * value,
            JumpLaw::Gaussian { mean, sd } => mean * mean + sd * sd,
            JumpLaw::Exponential { rate } => 2.0 / (rate * rate),
            JumpLaw::Uniform { lo, hi } => (lo * lo + lo * hi + hi * hi) / 3.0,
        }
    }

    /// Characteristic function `E[e^{iuξ}]`.
    pub fn cf(&self, u: f64) -> Complex64 {
        match *self {
            JumpLaw::Degenerate { value } => Complex64::from_polar(1.0, u * value),
            JumpLaw::Gaussian { mean, sd } => Complex64::from_polar((-0.5 * sd * sd * u * u).exp(), u * mean),
            JumpLaw::Exponential { rate } => Complex64::new(rate, 0.0) / Complex64::new(rate, -u),
            JumpLaw::Uniform { lo, hi } => {
                let mid = 0.5 * (lo + hi);
                let half = 0.5 * (hi - lo);
                Complex64::from_polar(sinc(u * half), u * mid)
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // Parameters are validated at model construction, so the rand_distr
        // constructors below cannot fail.
        match *self {
            JumpLaw::Degenerate { value } => value,
            JumpLaw::Gaussian { mean, sd } => Normal::new(mean, sd).unwrap().sample(rng),
            JumpLaw::Exponential { rate } => Exp::new(rate).unwrap().sample(rng),
            JumpLaw::Uniform { lo, hi } => Uniform::new(lo, hi).unwrap().sample(rng),
        }
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        // Taylor series; the direct quotient loses digits near zero.
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// A centered homogeneous process with independent increments.
///
/// The drift is derived from the jump law and rate and cannot be set
/// directly, so every constructed model satisfies
/// `poisson_rate·E[ξ] + drift = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevyModel {
    jump_law: JumpLaw,
    poisson_rate: f64,
    diffusion_sd: f64,
    drift: f64,
}

/// User-facing description of a model; the drift is not part of it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub jump_law: JumpLaw,
    #[serde(default = "default_rate")]
    pub rate: f64,
    #[serde(default)]
    pub diffusion_sd: f64,
}

fn default_rate() -> f64 {
    1.0
}

impl LevyModel {
    pub fn new(jump_law: JumpLaw, poisson_rate: f64, diffusion_sd: f64) -> Result<Self> {
        jump_law.validate()?;
        if !(poisson_rate.is_finite() && poisson_rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "poisson rate must be finite and > 0, got {poisson_rate}"
            )));
        }
        if !(diffusion_sd.is_finite() && diffusion_sd >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "diffusion sd must be finite and >= 0, got {diffusion_sd}"
            )));
        }
        let model = LevyModel {
            jump_law,
            poisson_rate,
            diffusion_sd,
            drift: -poisson_rate * jump_law.mean(),
        };
        let s2 = model.sigma_v_squared();
        if !(s2 > 0.0 && s2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "model has Var V(1) = {s2}; the limit process would be degenerate"
            )));
        }
        Ok(model)
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        Self::new(spec.jump_law, spec.rate, spec.diffusion_sd)
    }

    pub fn spec(&self) -> ModelSpec {
        ModelSpec {
            jump_law: self.jump_law,
            rate: self.poisson_rate,
            diffusion_sd: self.diffusion_sd,
        }
    }

    /// `(π(x) − x)`: unit jumps at rate 1, limit is a standard Wiener process.
    pub fn centered_poisson() -> Self {
        Self::new(JumpLaw::Degenerate { value: 1.0 }, 1.0, 0.0).expect("valid preset")
    }

    /// Random sums `Σ_{i ≤ π(x)} ξ_i − a·x` with rate-1 Poisson arrivals.
    pub fn random_sums(jump_law: JumpLaw) -> Result<Self> {
        Self::new(jump_law, 1.0, 0.0)
    }

    pub fn jump_law(&self) -> &JumpLaw {
        &self.jump_law
    }

    pub fn poisson_rate(&self) -> f64 {
        self.poisson_rate
    }

    pub fn diffusion_sd(&self) -> f64 {
        self.diffusion_sd
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn is_pure_jump(&self) -> bool {
        self.diffusion_sd == 0.0
    }

    /// `Var V(1) = rate·E[ξ²] + diffusion_sd²`, the squared scale of the
    /// limiting Wiener process.
    pub fn sigma_v_squared(&self) -> f64 {
        self.poisson_rate * self.jump_law.second_moment() + self.diffusion_sd * self.diffusion_sd
    }

    pub fn sigma_v(&self) -> f64 {
        self.sigma_v_squared().sqrt()
    }

    /// Characteristic function of `V(t)`:
    /// `exp(t·[rate·(φ_ξ(u) − 1) + i·u·drift − diffusion_sd²·u²/2])`.
    pub fn theoretical_cf(&self, t: f64, u: f64) -> Result<Complex64> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
        }
        Ok(self.log_cf(u).scale(t).exp())
    }

    fn log_cf(&self, u: f64) -> Complex64 {
        let jump = (self.jump_law.cf(u) - 1.0) * self.poisson_rate;
        let drift = Complex64::new(0.0, u * self.drift);
        let diffusion = Complex64::new(-0.5 * self.diffusion_sd * self.diffusion_sd * u * u, 0.0);
        jump + drift + diffusion
    }
}

impl<'de> Deserialize<'de> for LevyModel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let spec = ModelSpec::deserialize(deserializer)?;
        LevyModel::from_spec(&spec).map_err(serde::de::Error::custom)
    }
}

/// Sample mean of `e^{iuv}` over `samples`.
pub fn empirical_cf(samples: &[f64], u: f64) -> Result<Complex64> {
    if samples.is_empty() {
        return Err(Error::NoData("empirical characteristic function of an empty sample"));
    }
    let sum: Complex64 = samples.iter().map(|&v| Complex64::from_polar(1.0, u * v)).sum();
    Ok(sum / samples.len() as f64)
}
