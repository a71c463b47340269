//! Strong time integration of `dX = A X dt + b(X, t) dW` with a single
//! scalar Brownian motion: the order 2.0 Taylor scheme for linear
//! diffusion `b = B X` and an Euler-Maruyama baseline.

mod increments;
mod order;

pub use increments::{sample_increments, sample_rng, BrownianPath, PathIncrements};
pub use order::{gbm_strong_order, GbmProblem, OrderStudy};

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::LinearOperator;

/// Diffusion evaluated as `out = b(x, t)`.
pub type DiffusionFn = Arc<dyn Fn(&[f64], f64, &mut [f64]) + Send + Sync>;

#[derive(Clone)]
pub enum Diffusion {
    Linear(Arc<dyn LinearOperator>),
    General(DiffusionFn),
}

impl fmt::Debug for Diffusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diffusion::Linear(b) => f.debug_tuple("Linear").field(b).finish(),
            Diffusion::General(_) => f.write_str("General(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SDESystem {
    pub drift: Arc<dyn LinearOperator>,
    pub diffusion: Diffusion,
}

impl SDESystem {
    pub fn new(drift: Arc<dyn LinearOperator>, diffusion: Diffusion) -> Result<Self> {
        if let Diffusion::Linear(b) = &diffusion {
            if b.dim() != drift.dim() {
                return Err(Error::Structural(format!(
                    "drift has dimension {} but diffusion has {}",
                    drift.dim(),
                    b.dim()
                )));
            }
        }
        Ok(Self { drift, diffusion })
    }

    pub fn dim(&self) -> usize {
        self.drift.dim()
    }

    pub fn eval_diffusion(&self, x: &[f64], t: f64, out: &mut [f64]) {
        match &self.diffusion {
            Diffusion::Linear(b) => b.apply(x, out),
            Diffusion::General(g) => g(x, t, out),
        }
    }

    /// Sampled check of `b(0) = 0` and `b(c x) = c b(x)`.
    pub fn diffusion_is_homogeneous<R: Rng + ?Sized>(&self, rng: &mut R, trials: usize) -> bool {
        let n = self.dim();
        let mut out = vec![0.0; n];
        self.eval_diffusion(&vec![0.0; n], 0.0, &mut out);
        if out.iter().any(|v| *v != 0.0) {
            return false;
        }
        let mut scaled = vec![0.0; n];
        for _ in 0..trials {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let c = rng.random_range(-3.0..3.0);
            let cx: Vec<f64> = x.iter().map(|v| c * v).collect();
            self.eval_diffusion(&x, 0.0, &mut out);
            self.eval_diffusion(&cx, 0.0, &mut scaled);
            let scale = 1.0 + out.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if out.iter().zip(&scaled).any(|(b, s)| (c * b - s).abs() > 1e-10 * scale * (1.0 + c.abs())) {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Taylor2,
    EulerMaruyama,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Taylor2 => "taylor2",
            Scheme::EulerMaruyama => "euler_maruyama",
        })
    }
}

/// Reusable buffers for repeated steps of one system.
#[derive(Debug)]
pub struct Stepper<'a> {
    sys: &'a SDESystem,
    scheme: Scheme,
    buf: Vec<Vec<f64>>,
}

impl<'a> Stepper<'a> {
    pub fn new(sys: &'a SDESystem, scheme: Scheme) -> Result<Self> {
        let n_buf = match scheme {
            Scheme::Taylor2 => {
                if !matches!(sys.diffusion, Diffusion::Linear(_)) {
                    return Err(Error::UnsupportedScheme(
                        "the Taylor 2.0 scheme is implemented for linear diffusion b(X) = B X only; \
                         use euler_maruyama for general noise"
                            .into(),
                    ));
                }
                11
            }
            Scheme::EulerMaruyama => 2,
        };
        Ok(Self {
            sys,
            scheme,
            buf: vec![vec![0.0; sys.dim()]; n_buf],
        })
    }

    /// Advance `x` in place from time `t` by one step.
    pub fn step(&mut self, x: &mut [f64], inc: &PathIncrements, t: f64) -> Result<()> {
        if x.len() != self.sys.dim() {
            return Err(Error::Structural(format!(
                "state has length {}, system dimension is {}",
                x.len(),
                self.sys.dim()
            )));
        }
        match self.scheme {
            Scheme::Taylor2 => self.taylor2(x, inc),
            Scheme::EulerMaruyama => self.euler(x, inc, t),
        }
        Ok(())
    }

    fn euler(&mut self, x: &mut [f64], inc: &PathIncrements, t: f64) {
        let [ax, bx] = &mut self.buf[..] else { unreachable!() };
        self.sys.drift.apply(x, ax);
        self.sys.eval_diffusion(x, t, bx);
        for i in 0..x.len() {
            x[i] += inc.tau * ax[i] + inc.dw * bx[i];
        }
    }

    fn taylor2(&mut self, x: &mut [f64], inc: &PathIncrements) {
        let Diffusion::Linear(b) = &self.sys.diffusion else { unreachable!() };
        let a = &self.sys.drift;
        let [ax, bx, a2x, abx, bax, b2x, b3x, babx, ab2x, b2ax, b4x] = &mut self.buf[..] else {
            unreachable!()
        };
        a.apply(x, ax);
        b.apply(x, bx);
        a.apply(ax, a2x);
        a.apply(bx, abx);
        b.apply(ax, bax);
        b.apply(bx, b2x);
        b.apply(b2x, b3x);
        b.apply(abx, babx);
        a.apply(b2x, ab2x);
        b.apply(bax, b2ax);
        b.apply(b3x, b4x);

        let PathIncrements { tau, dw, dz, du, .. } = *inc;
        let (w2, t2) = (dw * dw, tau * tau);
        let c = [
            tau,                                         // a
            dw,                                          // b
            0.5 * t2,                                    // L0 a
            dz,                                          // L1 a
            dw * tau - dz,                               // L0 b
            0.5 * (w2 - tau),                            // L1 b
            (w2 - 3.0 * tau) * dw / 6.0,                 // L1 L1 b
            dw * dz - du,                                // L1 L0 b
            0.5 * du - 0.25 * t2,                        // L1 L1 a
            0.5 * du - dw * dz + 0.5 * w2 * tau - 0.25 * t2, // L0 L1 b
            (w2 * w2 - 6.0 * w2 * tau + 3.0 * t2) / 24.0, // L1 L1 L1 b
        ];
        for i in 0..x.len() {
            x[i] += c[0] * ax[i]
                + c[1] * bx[i]
                + c[2] * a2x[i]
                + c[3] * abx[i]
                + c[4] * bax[i]
                + c[5] * b2x[i]
                + c[6] * b3x[i]
                + c[7] * babx[i]
                + c[8] * ab2x[i]
                + c[9] * b2ax[i]
                + c[10] * b4x[i];
        }
    }
}

pub fn taylor2_step(x: &[f64], sys: &SDESystem, inc: &PathIncrements) -> Result<Vec<f64>> {
    let mut out = x.to_vec();
    Stepper::new(sys, Scheme::Taylor2)?.step(&mut out, inc, 0.0)?;
    Ok(out)
}

pub fn euler_maruyama_step(x: &[f64], sys: &SDESystem, inc: &PathIncrements, t: f64) -> Result<Vec<f64>> {
    let mut out = x.to_vec();
    Stepper::new(sys, Scheme::EulerMaruyama)?.step(&mut out, inc, t)?;
    Ok(out)
}

/// Integrate from `t = 0` using the given per-step increments. After every
/// step `observe(step, t, x, w)` sees the new state and the running
/// Brownian value. Returns the final state and `W_T`.
pub fn integrate_observed(
    x0: &[f64],
    sys: &SDESystem,
    scheme: Scheme,
    increments: impl IntoIterator<Item = PathIncrements>,
    mut observe: impl FnMut(usize, f64, &[f64], f64),
) -> Result<(Vec<f64>, f64)> {
    let mut stepper = Stepper::new(sys, scheme)?;
    let mut x = x0.to_vec();
    let (mut t, mut w) = (0.0, 0.0);
    for (n, inc) in increments.into_iter().enumerate() {
        stepper.step(&mut x, &inc, t)?;
        // summing step sizes drifts from n * tau; use the product
        t = (n + 1) as f64 * inc.tau;
        w += inc.dw;
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::Divergence {
                step: n + 1,
                time: t,
                context: format!(" (component {i} is {})", x[i]),
            });
        }
        observe(n + 1, t, &x, w);
    }
    Ok((x, w))
}

/// Full trajectory on `n_steps` uniform steps of `[0, t_final]` with `m`
/// substeps per increment. Returns the states `X_0..X_N` and `W_{t_0..t_N}`.
#[allow(clippy::too_many_arguments)]
pub fn integrate_path<R: Rng + ?Sized>(
    x0: &[f64],
    sys: &SDESystem,
    t_final: f64,
    n_steps: usize,
    scheme: Scheme,
    m: usize,
    rng: &mut R,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    if n_steps == 0 || !(t_final > 0.0) {
        return Err(Error::Config("integration needs n_steps >= 1 and T > 0".into()));
    }
    let tau = t_final / n_steps as f64;
    let incs = (0..n_steps)
        .map(|_| sample_increments(tau, m, rng))
        .collect::<Result<Vec<_>>>()?;
    let mut traj = vec![x0.to_vec()];
    let mut ws = vec![0.0];
    integrate_observed(x0, sys, scheme, incs, |_, _, x, w| {
        traj.push(x.to_vec());
        ws.push(w);
    })?;
    Ok((traj, ws))
}
