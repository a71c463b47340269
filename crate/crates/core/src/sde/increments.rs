//! Brownian increments `dW`, `dZ = int (W_s - W_n) ds`, `dU = int (W_s - W_n)^2 ds`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Per-sample generator: ChaCha8 keyed by the root seed, with the sample
/// index selecting the stream.
pub fn sample_rng(root_seed: u64, sample: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(sample);
    rng
}

/// Increments over one step of size `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathIncrements {
    pub tau: f64,
    pub dw: f64,
    pub dz: f64,
    pub du: f64,
    pub fine_path: Vec<f64>,
}

impl PathIncrements {
    /// Build from equally spaced sub-increments; `dZ` and `dU` are
    /// trapezoidal sums over the substeps.
    pub fn from_fine_path(tau: f64, fine_path: Vec<f64>) -> Result<Self> {
        if !(tau > 0.0) || fine_path.is_empty() {
            return Err(Error::Config(format!(
                "increments need tau > 0 and at least one substep (tau = {tau}, substeps = {})",
                fine_path.len()
            )));
        }
        let h = tau / fine_path.len() as f64;
        let (mut w, mut z, mut u) = (0.0f64, 0.0, 0.0);
        for &d in &fine_path {
            let next = w + d;
            z += 0.5 * h * (w + next);
            u += 0.5 * h * (w * w + next * next);
            w = next;
        }
        Ok(Self {
            tau,
            dw: w,
            dz: z,
            du: u,
            fine_path,
        })
    }

    /// All-zero increments of size `tau` with `m` substeps.
    pub fn zero(tau: f64, m: usize) -> Result<Self> {
        Self::from_fine_path(tau, vec![0.0; m])
    }
}

/// Draw `m` i.i.d. `N(0, tau/m)` sub-increments and aggregate them.
pub fn sample_increments<R: Rng + ?Sized>(tau: f64, m: usize, rng: &mut R) -> Result<PathIncrements> {
    if m == 0 {
        return Err(Error::Config("substep count M must be at least 1".into()));
    }
    let sd = (tau / m as f64).sqrt();
    let fine = (0..m).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect();
    PathIncrements::from_fine_path(tau, fine)
}

/// A Brownian path on `[0, T]` stored as `n_fine` equal sub-increments so
/// that coarser step sizes see the same realization.
#[derive(Debug, Clone)]
pub struct BrownianPath {
    t_final: f64,
    subs: Vec<f64>,
}

impl BrownianPath {
    pub fn sample<R: Rng + ?Sized>(t_final: f64, n_fine: usize, rng: &mut R) -> Result<Self> {
        if !(t_final > 0.0) || n_fine == 0 {
            return Err(Error::Config("Brownian path needs T > 0 and at least one substep".into()));
        }
        let sd = (t_final / n_fine as f64).sqrt();
        Ok(Self {
            t_final,
            subs: (0..n_fine).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect(),
        })
    }

    pub fn w_final(&self) -> f64 {
        self.subs.iter().sum()
    }

    /// Increments for `n_steps` equal steps; `n_steps` must divide the
    /// number of stored sub-increments.
    pub fn increments(&self, n_steps: usize) -> Result<Vec<PathIncrements>> {
        if n_steps == 0 || self.subs.len() % n_steps != 0 {
            return Err(Error::Config(format!(
                "{} sub-increments cannot be split into {n_steps} steps",
                self.subs.len()
            )));
        }
        let per = self.subs.len() / n_steps;
        let tau = self.t_final / n_steps as f64;
        self.subs
            .chunks(per)
            .map(|c| PathIncrements::from_fine_path(tau, c.to_vec()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_draws_give_zero_increments() {
        let p = PathIncrements::zero(0.3, 50).unwrap();
        assert_eq!((p.dw, p.dz, p.du), (0.0, 0.0, 0.0));
    }

    #[test]
    fn single_linear_substep() {
        // path W_s = d s / tau on [0, tau]
        let p = PathIncrements::from_fine_path(2.0, vec![3.0]).unwrap();
        assert_eq!(p.dw, 3.0);
        assert!((p.dz - 3.0).abs() < 1e-15);
        // trapezoid of s -> (1.5 s)^2 on [0, 2] over one panel
        assert!((p.du - 9.0).abs() < 1e-15);
    }

    #[test]
    fn seed_reproduces_bits() {
        let a = sample_increments(0.01, 100, &mut sample_rng(7, 3)).unwrap();
        let b = sample_increments(0.01, 100, &mut sample_rng(7, 3)).unwrap();
        let c = sample_increments(0.01, 100, &mut sample_rng(7, 4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.dw, c.dw);
    }

    #[test]
    fn dw_is_sum_and_du_nonnegative() {
        let mut rng = sample_rng(1, 0);
        for _ in 0..100 {
            let p = sample_increments(0.1, 37, &mut rng).unwrap();
            let s: f64 = p.fine_path.iter().sum();
            assert!((p.dw - s).abs() < 1e-12);
            assert!(p.du >= 0.0);
        }
        assert!(sample_increments(0.1, 0, &mut rng).is_err());
    }

    #[test]
    fn coarse_steps_share_the_fine_path() {
        let path = BrownianPath::sample(1.0, 64, &mut sample_rng(2, 0)).unwrap();
        for n in [1, 2, 8, 64] {
            let inc = path.increments(n).unwrap();
            let w: f64 = inc.iter().map(|p| p.dw).sum();
            assert!((w - path.w_final()).abs() < 1e-12);
        }
        // dZ over two half steps: Z = Z1 + Z2 + (tau/2) W1
        let full = &path.increments(1).unwrap()[0];
        let half = path.increments(2).unwrap();
        let z = half[0].dz + half[1].dz + 0.5 * half[0].dw;
        assert!((z - full.dz).abs() < 1e-12);
        assert!(path.increments(3).is_err());
    }
}
