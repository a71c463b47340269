//! Experiment configuration: a flat JSON object with defaults.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::sde::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dimension {
    #[serde(rename = "1d")]
    One,
    #[serde(rename = "2d")]
    Two,
}

/// Named problem with a known exact solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    /// Travelling-wave solutions scaled by `exp(W_t - t/2)`.
    Manufactured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// Each field drives its own noise: `f = v, g = u` (1D) or
    /// `f = E, g = S, r = T` (2D).
    Multiplicative,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    /// Global projection pair (1D) or tensor Radau projections (2D).
    Projection,
    L2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub dimension: Dimension,
    pub problem: ProblemKind,
    pub noise: NoiseKind,
    pub nx: usize,
    /// Defaults to `nx`.
    pub ny: Option<usize>,
    pub degree: usize,
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Defaults to 0.5 in 1D and 0.1 in 2D.
    pub t_final: Option<f64>,
    pub nt: usize,
    /// Defaults to 200 in 1D and 100 in 2D.
    pub samples: Option<usize>,
    pub seed: u64,
    pub scheme: Scheme,
    /// Brownian sub-increments per time step.
    pub substeps: usize,
    pub init: InitKind,
    /// Number of levels in a convergence ladder (each doubles nx, ny, nt).
    pub levels: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dimension: Dimension::One,
            problem: ProblemKind::Manufactured,
            noise: NoiseKind::Multiplicative,
            nx: 20,
            ny: None,
            degree: 1,
            alpha: 0.5,
            beta1: 0.0,
            beta2: 0.0,
            alpha1: 0.5,
            alpha2: 0.5,
            t_final: None,
            nt: 200,
            samples: None,
            seed: 1,
            scheme: Scheme::Taylor2,
            substeps: 100,
            init: InitKind::Projection,
            levels: 3,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn t_final(&self) -> f64 {
        self.t_final.unwrap_or(match self.dimension {
            Dimension::One => 0.5,
            Dimension::Two => 0.1,
        })
    }

    pub fn ny(&self) -> usize {
        self.ny.unwrap_or(self.nx)
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(match self.dimension {
            Dimension::One => 200,
            Dimension::Two => 100,
        })
    }

    /// Copy with every optional field resolved, for echoing.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        c.t_final = Some(self.t_final());
        c.samples = Some(self.samples());
        if self.dimension == Dimension::Two {
            c.ny = Some(self.ny());
        }
        c
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("nx", self.nx),
            ("ny", self.ny()),
            ("nt", self.nt),
            ("samples", self.samples()),
            ("substeps", self.substeps),
            ("levels", self.levels),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        let t = self.t_final();
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Config(format!("t_final must be positive and finite (got {t})")));
        }
        for (name, v) in [("alpha", self.alpha), ("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        if self.degree > 10 {
            return Err(Error::Config(format!("degree {} is above the supported maximum 10", self.degree)));
        }
        if self.dimension == Dimension::One {
            if !(self.beta1 >= 0.0 && self.beta2 >= 0.0) {
                return Err(Error::Config(format!(
                    "energy law requires beta1, beta2 >= 0 (got beta1 = {}, beta2 = {})",
                    self.beta1, self.beta2
                )));
            }
            if self.init == InitKind::Projection && self.alpha * self.alpha + self.beta1 * self.beta2 == 0.0 {
                return Err(Error::WellPosedness(format!(
                    "projection initialization requires alpha^2 + beta1*beta2 != 0 (alpha = {}, beta1 = {}, beta2 = {}); \
                     use \"init\": \"l2\" or change the flux",
                    self.alpha, self.beta1, self.beta2
                )));
            }
        } else if self.beta1 != 0.0 || self.beta2 != 0.0 {
            return Err(Error::Config("beta1/beta2 apply to 1D runs only".into()));
        }
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the resolved config as JSON.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(&self.resolved()).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
