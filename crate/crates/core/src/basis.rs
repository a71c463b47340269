//! L2-orthonormal Legendre basis on the reference cell [-1, 1].
//!
//! Mode `l` is `sqrt((2l+1)/2) P_l(xi)`. On a physical cell of width `h`
//! the basis is scaled by `sqrt(2/h)` so it stays orthonormal, which makes
//! every mass matrix the identity.

use crate::error::{Error, Result};
use crate::quadrature::{gauss_quadrature, Quadrature};

const REFERENCE_SLACK: f64 = 1e-12;

/// Value and derivative of the l-th orthonormal Legendre polynomial.
///
/// Coordinates outside the reference cell are rejected.
pub fn legendre_eval(l: usize, xi: f64) -> Result<(f64, f64)> {
    if !(xi.abs() <= 1.0 + REFERENCE_SLACK) {
        return Err(Error::OutsideReferenceCell(xi));
    }
    Ok(legendre_unchecked(l, xi))
}

pub(crate) fn legendre_unchecked(l: usize, xi: f64) -> (f64, f64) {
    // P_{n+1} = ((2n+1) xi P_n - n P_{n-1}) / (n+1)
    // P'_{n+1} = P'_{n-1} + (2n+1) P_n
    let (mut p_prev, mut p) = (1.0, xi);
    let (mut d_prev, mut d) = (0.0, 1.0);
    let (value, deriv) = if l == 0 {
        (1.0, 0.0)
    } else {
        for n in 1..l {
            let nf = n as f64;
            let p_next = ((2.0 * nf + 1.0) * xi * p - nf * p_prev) / (nf + 1.0);
            let d_next = d_prev + (2.0 * nf + 1.0) * p;
            p_prev = p;
            p = p_next;
            d_prev = d;
            d = d_next;
        }
        (p, d)
    };
    let scale = ((2 * l + 1) as f64 / 2.0).sqrt();
    (scale * value, scale * deriv)
}

/// Degree-k orthonormal Legendre basis with precomputed reference tables.
#[derive(Debug, Clone)]
pub struct Basis {
    degree: usize,
    /// phi_l(-1)
    left: Vec<f64>,
    /// phi_l(+1)
    right: Vec<f64>,
    /// stiffness[l][m] = integral of phi_l * phi_m' over [-1, 1]
    stiffness: Vec<Vec<f64>>,
}

impl Basis {
    pub fn new(degree: usize) -> Self {
        let n = degree + 1;
        let left = (0..n).map(|l| legendre_unchecked(l, -1.0).0).collect();
        let right = (0..n).map(|l| legendre_unchecked(l, 1.0).0).collect();
        let quad = gauss_quadrature(n + 1);
        let stiffness = (0..n)
            .map(|l| {
                (0..n)
                    .map(|m| {
                        quad.integrate(|x| legendre_unchecked(l, x).0 * legendre_unchecked(m, x).1)
                    })
                    .collect()
            })
            .collect();
        Self {
            degree,
            left,
            right,
            stiffness,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_modes(&self) -> usize {
        self.degree + 1
    }

    pub fn left(&self) -> &[f64] {
        &self.left
    }

    pub fn right(&self) -> &[f64] {
        &self.right
    }

    pub fn stiffness(&self, l: usize, m: usize) -> f64 {
        self.stiffness[l][m]
    }

    /// Rule used for projecting coefficient functions (k+2 points).
    pub fn projection_quadrature(&self) -> Quadrature {
        gauss_quadrature(self.degree + 2)
    }

    /// Rule used for error norms (k+3 points).
    pub fn error_quadrature(&self) -> Quadrature {
        gauss_quadrature(self.degree + 3)
    }

    /// Values of every mode at each node: `table[q][l]`.
    pub fn tabulate(&self, nodes: &[f64]) -> Vec<Vec<f64>> {
        nodes
            .iter()
            .map(|&x| (0..self.n_modes()).map(|l| legendre_unchecked(l, x).0).collect())
            .collect()
    }

    /// Evaluate a reference-cell expansion at `xi`.
    pub fn eval_expansion(&self, coeffs: &[f64], xi: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (l, c) in coeffs.iter().enumerate() {
            acc += c * legendre_eval(l, xi)?.0;
        }
        Ok(acc)
    }
}
