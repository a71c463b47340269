//! Strong-order measurement on scalar geometric Brownian motion
//! `dX = a X dt + b X dW`, `X_T = X_0 exp((a - b^2/2) T + b W_T)`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::{integrate_observed, sample_rng, BrownianPath, Diffusion, SDESystem, Scheme};
use crate::error::{Error, Result};
use crate::sparse::ScaledIdentity;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GbmProblem {
    pub a: f64,
    pub b: f64,
    pub x0: f64,
    pub t_final: f64,
}

impl Default for GbmProblem {
    fn default() -> Self {
        Self {
            a: 0.5,
            b: 0.5,
            x0: 1.0,
            t_final: 1.0,
        }
    }
}

/// Mean absolute endpoint error per step count and the least-squares
/// slope of `log(error)` against `log(tau)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderStudy {
    pub scheme: Scheme,
    pub steps: Vec<usize>,
    pub errors: Vec<f64>,
    pub slope: f64,
    pub samples: usize,
}

/// Least-squares slope of `ys` against `xs`.
pub(crate) fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Every level integrates the same Brownian path per sample, resolved by
/// `substeps` sub-increments per step of the finest level.
pub fn gbm_strong_order(
    problem: &GbmProblem,
    scheme: Scheme,
    steps: &[usize],
    samples: usize,
    substeps: usize,
    root_seed: u64,
) -> Result<OrderStudy> {
    if steps.len() < 2 || samples == 0 || substeps == 0 {
        return Err(Error::Config("order study needs >= 2 levels, samples >= 1 and substeps >= 1".into()));
    }
    let finest = *steps.iter().max().expect("non-empty");
    if steps.iter().any(|&n| n == 0 || finest % n != 0) {
        return Err(Error::Config(format!("step counts {steps:?} must divide the finest level")));
    }
    let sys = SDESystem::new(
        Arc::new(ScaledIdentity { dim: 1, scale: problem.a }),
        Diffusion::Linear(Arc::new(ScaledIdentity { dim: 1, scale: problem.b })),
    )?;
    let per_sample: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = sample_rng(root_seed, s as u64);
            let path = BrownianPath::sample(problem.t_final, finest * substeps, &mut rng)?;
            let w = path.w_final();
            let exact = problem.x0 * ((problem.a - 0.5 * problem.b * problem.b) * problem.t_final + problem.b * w).exp();
            steps
                .iter()
                .map(|&n| {
                    let (x, _) = integrate_observed(&[problem.x0], &sys, scheme, path.increments(n)?, |_, _, _, _| {})?;
                    Ok((x[0] - exact).abs())
                })
                .collect::<Result<Vec<f64>>>()
                .map_err(|e| e.with_sample(s, root_seed))
        })
        .collect::<Result<_>>()?;
    let errors: Vec<f64> = (0..steps.len())
        .map(|l| per_sample.iter().map(|e| e[l]).sum::<f64>() / samples as f64)
        .collect();
    let lt: Vec<f64> = steps.iter().map(|&n| (problem.t_final / n as f64).ln()).collect();
    let le: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    Ok(OrderStudy {
        scheme,
        steps: steps.to_vec(),
        errors,
        slope: fit_slope(&lt, &le),
        samples,
    })
}
