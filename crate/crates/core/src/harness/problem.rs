//! Problems with known exact solutions along a Brownian path.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::config::NoiseKind;
use crate::dg1d::NoiseSpec1D;
use crate::dg2d::NoiseSpec2D;

/// `(x, t, W_t) -> [u, v]`.
pub type Exact1D = Arc<dyn Fn(f64, f64, f64) -> [f64; 2] + Send + Sync>;
/// `(x, y, t, W_t) -> [E, S, T]`.
pub type Exact2D = Arc<dyn Fn(f64, f64, f64, f64) -> [f64; 3] + Send + Sync>;

#[derive(Clone)]
pub struct Problem1D {
    pub domain: (f64, f64),
    pub noise: NoiseSpec1D,
    pub exact: Exact1D,
    /// Mean energy grows as `M(0) exp(rate t)` when known.
    pub energy_rate: Option<f64>,
}

#[derive(Clone)]
pub struct Problem2D {
    pub domain_x: (f64, f64),
    pub domain_y: (f64, f64),
    pub noise: NoiseSpec2D,
    pub exact: Exact2D,
    pub energy_rate: Option<f64>,
}

impl fmt::Debug for Problem1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem1D")
            .field("domain", &self.domain)
            .field("noise", &self.noise)
            .field("energy_rate", &self.energy_rate)
            .finish_non_exhaustive()
    }
}

impl fmt::Debug for Problem2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem2D")
            .field("domain_x", &self.domain_x)
            .field("domain_y", &self.domain_y)
            .field("noise", &self.noise)
            .field("energy_rate", &self.energy_rate)
            .finish_non_exhaustive()
    }
}

/// Path factor `exp(W_t - t/2)`, or 1 without noise.
fn path_factor(noise: NoiseKind) -> fn(f64, f64) -> f64 {
    match noise {
        NoiseKind::Multiplicative => |t, w| (w - 0.5 * t).exp(),
        NoiseKind::None => |_, _| 1.0,
    }
}

impl Problem1D {
    /// `dv = -u_x dt + v dW`, `du = -v_x dt + u dW` on `[0, 2 pi]` with
    /// `v = (sin(x-t) + cos(x+t)) e^{W-t/2}`, `u = (sin(x-t) - cos(x+t)) e^{W-t/2}`.
    pub fn manufactured(noise: NoiseKind) -> Self {
        let factor = path_factor(noise);
        Self {
            domain: (0.0, 2.0 * PI),
            noise: match noise {
                NoiseKind::Multiplicative => NoiseSpec1D::unit_coupling(),
                NoiseKind::None => NoiseSpec1D::zero(),
            },
            exact: Arc::new(move |x, t, w| {
                let s = factor(t, w);
                let (a, b) = ((x - t).sin(), (x + t).cos());
                [(a - b) * s, (a + b) * s]
            }),
            energy_rate: Some(match noise {
                NoiseKind::Multiplicative => 1.0,
                NoiseKind::None => 0.0,
            }),
        }
    }
}

impl Problem2D {
    /// `dE - T_x dt + S_y dt = E dW`, `dS + E_y dt = S dW`, `dT - E_x dt = T dW`
    /// on `[0, 2 pi]^2` with `E = (sin(x+t) - cos(y+t)) e^{W-t/2}`,
    /// `S = cos(y+t) e^{W-t/2}`, `T = sin(x+t) e^{W-t/2}`.
    pub fn manufactured(noise: NoiseKind) -> Self {
        let factor = path_factor(noise);
        Self {
            domain_x: (0.0, 2.0 * PI),
            domain_y: (0.0, 2.0 * PI),
            noise: match noise {
                NoiseKind::Multiplicative => NoiseSpec2D::unit_coupling(),
                NoiseKind::None => NoiseSpec2D::zero(),
            },
            exact: Arc::new(move |x, y, t, w| {
                let s = factor(t, w);
                let (a, b) = ((x + t).sin(), (y + t).cos());
                [(a - b) * s, b * s, a * s]
            }),
            energy_rate: Some(match noise {
                NoiseKind::Multiplicative => 1.0,
                NoiseKind::None => 0.0,
            }),
        }
    }
}
