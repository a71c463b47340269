//! Convergence ladders, energy histories and their CSV forms.

use std::fmt::Write;

use serde::Serialize;

use super::{Dimension, Experiment, ExperimentConfig, MonteCarloResult};
use crate::error::{Error, Result};

/// One rung of a refinement ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Level {
    pub nx: usize,
    pub ny: usize,
    pub nt: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelResult {
    pub level: Level,
    pub rms: Vec<f64>,
    pub rms_se: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub dimension: Dimension,
    pub fields: Vec<&'static str>,
    pub levels: Vec<LevelResult>,
    /// `rates[l][f] = log2(rms[l][f] / rms[l+1][f])`.
    pub rates: Vec<Vec<f64>>,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub times: Vec<f64>,
    pub mean_energy: Vec<f64>,
    pub reference: Option<Vec<f64>>,
    pub samples: usize,
    pub seed: u64,
}

/// `config.levels` rungs starting from the configured sizes, doubling
/// every count (time steps scale with the mesh).
pub fn ladder(config: &ExperimentConfig) -> Vec<Level> {
    (0..config.levels)
        .map(|l| Level {
            nx: config.nx << l,
            ny: config.ny() << l,
            nt: config.nt << l,
        })
        .collect()
}

pub fn convergence_study(config: &ExperimentConfig, levels: &[Level]) -> Result<ConvergenceReport> {
    if levels.len() < 2 {
        return Err(Error::Config("a convergence study needs at least two levels".into()));
    }
    let mut results = Vec::with_capacity(levels.len());
    let mut fields = Vec::new();
    for lv in levels {
        let cfg = ExperimentConfig {
            nx: lv.nx,
            ny: Some(lv.ny),
            nt: lv.nt,
            ..config.clone()
        };
        let exp = Experiment::new(&cfg)?;
        fields = exp.fields();
        let mc = exp.monte_carlo()?;
        results.push(LevelResult {
            level: *lv,
            rms: mc.rms,
            rms_se: mc.rms_se,
        });
    }
    let rates = results
        .windows(2)
        .map(|w| w[0].rms.iter().zip(&w[1].rms).map(|(a, b)| (a / b).log2()).collect())
        .collect();
    Ok(ConvergenceReport {
        dimension: config.dimension,
        fields,
        levels: results,
        rates,
        samples: config.samples(),
        seed: config.seed,
    })
}

pub fn energy_history(config: &ExperimentConfig) -> Result<EnergyReport> {
    Ok(EnergyReport::from(Experiment::new(config)?.monte_carlo()?))
}

impl From<MonteCarloResult> for EnergyReport {
    fn from(mc: MonteCarloResult) -> Self {
        Self {
            times: mc.times,
            mean_energy: mc.mean_energy,
            reference: mc.reference,
            samples: mc.samples,
            seed: mc.seed,
        }
    }
}

/// Fixed scientific notation with six significant digits.
pub(crate) fn sci(v: f64) -> String {
    format!("{v:.5e}")
}

pub(crate) fn header_line(config_hash: &str, seed: u64) -> String {
    format!("# config_hash={config_hash} seed={seed}\n")
}

impl ConvergenceReport {
    pub fn to_csv(&self, config_hash: &str) -> String {
        let mut out = header_line(config_hash, self.seed);
        let mut cols = vec!["Nx".to_string()];
        if self.dimension == Dimension::Two {
            cols.push("Ny".into());
        }
        cols.push("Nt".into());
        for f in &self.fields {
            cols.push(format!("rms_e_{f}"));
            cols.push(format!("rate_{f}"));
        }
        out.push_str(&cols.join(","));
        out.push('\n');
        for (l, r) in self.levels.iter().enumerate() {
            let mut row = vec![r.level.nx.to_string()];
            if self.dimension == Dimension::Two {
                row.push(r.level.ny.to_string());
            }
            row.push(r.level.nt.to_string());
            for f in 0..self.fields.len() {
                row.push(sci(r.rms[f]));
                row.push(if l == 0 { String::new() } else { sci(self.rates[l - 1][f]) });
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

impl EnergyReport {
    pub fn to_csv(&self, config_hash: &str) -> String {
        let mut out = header_line(config_hash, self.seed);
        out.push_str("t,mean_energy,reference\n");
        for (k, (t, e)) in self.times.iter().zip(&self.mean_energy).enumerate() {
            let r = self.reference.as_ref().map(|r| sci(r[k])).unwrap_or_default();
            writeln!(out, "{},{},{}", sci(*t), sci(*e), r).expect("writing to a String");
        }
        out
    }

    /// Largest `|mean / reference - 1|` over the recorded times.
    pub fn max_relative_deviation(&self) -> Option<f64> {
        self.reference.as_ref().map(|r| {
            self.mean_energy
                .iter()
                .zip(r)
                .map(|(m, r)| (m / r - 1.0).abs())
                .fold(0.0, f64::max)
        })
    }
}
