//! Solver for periodic bidiagonal circulant systems
//! `diag * a_j + upper * a_{j+1 mod n} = rhs_j`, diagonalized by the DFT.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CirculantBidiagonal {
    n: usize,
    inv_eigs: Vec<Complex64>,
}

impl CirculantBidiagonal {
    /// Fails when some eigenvalue `diag + upper * exp(2 pi i m / n)`
    /// is negligible relative to the largest.
    pub fn new(n: usize, diag: f64, upper: f64) -> Result<Self> {
        let eigs: Vec<Complex64> = (0..n)
            .map(|m| {
                let theta = 2.0 * std::f64::consts::PI * m as f64 / n as f64;
                Complex64::new(diag, 0.0) + upper * Complex64::from_polar(1.0, theta)
            })
            .collect();
        let max = eigs.iter().map(|e| e.norm()).fold(0.0, f64::max);
        let min = eigs.iter().map(|e| e.norm()).fold(f64::INFINITY, f64::min);
        if !(max > 0.0) || min <= 1e-12 * max {
            return Err(Error::WellPosedness(format!(
                "circulant interface system is singular (|lambda|min/max = {:.3e})",
                if max > 0.0 { min / max } else { 0.0 }
            )));
        }
        Ok(Self {
            n,
            inv_eigs: eigs.iter().map(|e| 1.0 / e).collect(),
        })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(self.n);
        let inv = planner.plan_fft_inverse(self.n);
        let mut buf: Vec<Complex64> = rhs.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        fwd.process(&mut buf);
        for (b, ie) in buf.iter_mut().zip(&self.inv_eigs) {
            *b *= ie;
        }
        inv.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_against_direct_residual() {
        let n = 11;
        let (d, u) = (0.3, -1.7);
        let rhs: Vec<f64> = (0..n).map(|j| (j as f64 * 0.7).sin()).collect();
        let a = CirculantBidiagonal::new(n, d, u).unwrap().solve(&rhs);
        for j in 0..n {
            let r = d * a[j] + u * a[(j + 1) % n] - rhs[j];
            assert!(r.abs() < 1e-13);
        }
    }

    #[test]
    fn singular_system_rejected() {
        // d + u * 1 = 0 at m = 0
        assert!(CirculantBidiagonal::new(8, 1.0, -1.0).is_err());
        // d - u = 0 at m = n/2 for even n
        assert!(CirculantBidiagonal::new(8, 1.0, 1.0).is_err());
        assert!(CirculantBidiagonal::new(7, 1.0, 1.0).is_ok());
    }
}
