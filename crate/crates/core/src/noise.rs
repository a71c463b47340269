//! Shared machinery for multiplicative-noise specifications.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::{LinearOperator, ScaledIdentity, TripletBuilder};

/// Declared structure of the noise coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseStructure {
    /// Exactly linear in the state with time-independent coefficients,
    /// so the diffusion is `b(X) = B X`.
    LinearInState,
    General,
}

const LINEARITY_TOL: f64 = 1e-10;

/// Probe a coefficient `q(position, t, state)` for linearity in `state`.
pub(crate) fn check_linear_sampled(
    name: &str,
    positions: &[Vec<f64>],
    n_fields: usize,
    q: &dyn Fn(&[f64], f64, &[f64]) -> f64,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_11ea);
    let zero = vec![0.0; n_fields];
    for p in positions {
        let t1 = rng.random_range(0.0..2.0);
        let t2 = rng.random_range(0.0..2.0);
        let s1: Vec<f64> = (0..n_fields).map(|_| rng.random_range(-2.0..2.0)).collect();
        let s2: Vec<f64> = (0..n_fields).map(|_| rng.random_range(-2.0..2.0)).collect();
        let (a, b) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let mix: Vec<f64> = s1.iter().zip(&s2).map(|(x, y)| a * x + b * y).collect();
        let q1 = q(p, t1, &s1);
        let q2 = q(p, t1, &s2);
        let scale = 1.0 + q1.abs() + q2.abs();
        let offset = q(p, t1, &zero);
        if offset.abs() > LINEARITY_TOL * scale {
            return Err(Error::Config(format!(
                "noise {name} declared linear but has offset {offset:e} at {p:?}"
            )));
        }
        let lin = q(p, t1, &mix) - (a * q1 + b * q2);
        if lin.abs() > LINEARITY_TOL * scale * (1.0 + a.abs() + b.abs()) {
            return Err(Error::Config(format!(
                "noise {name} declared linear but is not linear in the state at {p:?}"
            )));
        }
        let drift = q(p, t2, &s1) - q1;
        if drift.abs() > LINEARITY_TOL * scale {
            return Err(Error::Config(format!(
                "noise {name} declared linear but depends on time at {p:?}"
            )));
        }
    }
    Ok(())
}

/// Build the cell-local operator `P(C(x) X)` for `F` coupled fields.
///
/// `weights` and `table` describe a reference-cell rule under which the
/// basis is orthonormal: `sum_q w_q table[q][m] table[q][l] = delta_ml`.
/// `coupling(cell, q)[row][col]` is the coefficient of field `col` in the
/// noise of field `row`.
pub(crate) fn block_diagonal_operator<const F: usize>(
    n_cells: usize,
    n_modes: usize,
    weights: &[f64],
    table: &[Vec<f64>],
    coupling: impl Fn(usize, usize) -> [[f64; F]; F],
) -> Arc<dyn LinearOperator> {
    let dim = F * n_cells * n_modes;
    let first = coupling(0, 0);
    let uniform = (0..n_cells).all(|c| (0..weights.len()).all(|q| coupling(c, q) == first));
    if uniform {
        let c = first[0][0];
        let scaled_identity = (0..F).all(|a| (0..F).all(|b| first[a][b] == if a == b { c } else { 0.0 }));
        if scaled_identity {
            return Arc::new(ScaledIdentity { dim, scale: c });
        }
    }
    let mut t = TripletBuilder::new(dim);
    let block = n_cells * n_modes;
    for cell in 0..n_cells {
        let cq: Vec<[[f64; F]; F]> = (0..weights.len()).map(|q| coupling(cell, q)).collect();
        for a in 0..F {
            for b in 0..F {
                let constant = cq.iter().all(|m| m[a][b] == cq[0][a][b]);
                if constant {
                    let c = cq[0][a][b];
                    for m in 0..n_modes {
                        t.push(a * block + cell * n_modes + m, b * block + cell * n_modes + m, c);
                    }
                    continue;
                }
                for m in 0..n_modes {
                    for l in 0..n_modes {
                        let v: f64 = (0..weights.len())
                            .map(|q| weights[q] * cq[q][a][b] * table[q][m] * table[q][l])
                            .sum();
                        t.push(a * block + cell * n_modes + m, b * block + cell * n_modes + l, v);
                    }
                }
            }
        }
    }
    Arc::new(t.build())
}
