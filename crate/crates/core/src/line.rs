//! Periodic 1D flux-form kernels shared by the 1D and 2D operators.
//!
//! A "line" is a periodic sequence of cells along one direction; `index`
//! maps (cell along the line, mode) to a position in the coefficient vector
//! so 2D operators can walk x- or y-lines of a tensor field.

use crate::basis::Basis;

/// Accumulate `scale * A(p, phi_m; alpha)` for every cell and mode of a line:
///
/// `A(p, phi; alpha) = int p phi' - (p_hat phi^-)_{i+1/2} + (p_hat phi^+)_{i-1/2}`
/// with `p_hat = {p} + alpha [p]`.
pub(crate) fn add_flux_form(
    widths: &[f64],
    basis: &Basis,
    alpha: f64,
    scale: f64,
    p: &[f64],
    out: &mut [f64],
    index: impl Fn(usize, usize) -> usize,
) {
    let n = widths.len();
    let nm = basis.n_modes();
    let (right, left) = (basis.right(), basis.left());
    let trace = |i: usize, vals: &[f64]| -> f64 {
        let s = (2.0 / widths[i]).sqrt();
        s * (0..nm).map(|l| p[index(i, l)] * vals[l]).sum::<f64>()
    };
    // p_hat at the right edge of each cell.
    let hat: Vec<f64> = (0..n)
        .map(|i| {
            let ip = (i + 1) % n;
            (0.5 - alpha) * trace(i, right) + (0.5 + alpha) * trace(ip, left)
        })
        .collect();
    for i in 0..n {
        let h = widths[i];
        let s = (2.0 / h).sqrt();
        let im = (i + n - 1) % n;
        for m in 0..nm {
            let mut vol = 0.0;
            for l in 0..nm {
                vol += p[index(i, l)] * basis.stiffness(l, m);
            }
            let val = 2.0 / h * vol - hat[i] * s * right[m] + hat[im] * s * left[m];
            out[index(i, m)] += scale * val;
        }
    }
}

/// Accumulate `scale * ([p]_{i+1/2} phi_m^- - [p]_{i-1/2} phi_m^+)`.
pub(crate) fn add_jump_penalty(
    widths: &[f64],
    basis: &Basis,
    scale: f64,
    p: &[f64],
    out: &mut [f64],
    index: impl Fn(usize, usize) -> usize,
) {
    let n = widths.len();
    let nm = basis.n_modes();
    let (right, left) = (basis.right(), basis.left());
    let trace = |i: usize, vals: &[f64]| -> f64 {
        let s = (2.0 / widths[i]).sqrt();
        s * (0..nm).map(|l| p[index(i, l)] * vals[l]).sum::<f64>()
    };
    let jump: Vec<f64> = (0..n)
        .map(|i| trace((i + 1) % n, left) - trace(i, right))
        .collect();
    for i in 0..n {
        let s = (2.0 / widths[i]).sqrt();
        let im = (i + n - 1) % n;
        for m in 0..nm {
            out[index(i, m)] += scale * (jump[i] * s * right[m] - jump[im] * s * left[m]);
        }
    }
}
