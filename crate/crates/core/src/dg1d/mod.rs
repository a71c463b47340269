//! Semi-discrete DG scheme for the 1D system
//! `dv = -u_x dt + f dW`, `du = -v_x dt + g dW` on a periodic interval,
//! with the generalized fluxes
//! `u_hat = {u} + alpha [u] - beta1 [v]`, `v_hat = {v} - alpha [v] - beta2 [u]`.
//!
//! State vectors stack the coefficients as `[u; v]`.

mod noise;
mod projection;

pub use noise::{assemble_noise_1d, NoiseFn1D, NoiseSpec1D};
pub(crate) use projection::ProjectionData;
pub use projection::{
    global_projection_pair_1d, interface_residuals_1d, GlobalProjectionPair1D,
    RadauProjection1D,
};

use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::field::{l2_distance_1d, FieldCoeffs};
use crate::line::{add_flux_form, add_jump_penalty};
use crate::mesh::Mesh1D;
use crate::sparse::{CsrMatrix, TripletBuilder};

/// Flux parameters `(alpha, beta1, beta2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxParams1D {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl FluxParams1D {
    /// Rejects negative or non-finite penalty coefficients.
    pub fn new(alpha: f64, beta1: f64, beta2: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta1.is_finite() && beta2.is_finite()) {
            return Err(Error::Config("flux parameters must be finite".into()));
        }
        if beta1 < 0.0 || beta2 < 0.0 {
            return Err(Error::Config(format!(
                "energy law requires beta1, beta2 >= 0 (got beta1 = {beta1}, beta2 = {beta2})"
            )));
        }
        Ok(Self { alpha, beta1, beta2 })
    }

    /// `alpha^2 + beta1 * beta2 != 0`: the global projection pair exists.
    pub fn projection_well_posed(&self) -> bool {
        self.alpha * self.alpha + self.beta1 * self.beta2 != 0.0
    }
}

/// DG solution `(u_h, v_h)` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct State1D {
    pub u: FieldCoeffs,
    pub v: FieldCoeffs,
    pub t: f64,
}

impl State1D {
    pub fn new(u: FieldCoeffs, v: FieldCoeffs, t: f64) -> Result<Self> {
        if !u.same_shape(&v) {
            return Err(Error::Structural("u and v have different mesh or degree".into()));
        }
        Ok(Self { u, v, t })
    }

    pub fn zeros(n_cells: usize, n_modes: usize) -> Self {
        Self {
            u: FieldCoeffs::zeros(n_cells, n_modes),
            v: FieldCoeffs::zeros(n_cells, n_modes),
            t: 0.0,
        }
    }

    pub fn to_vector(&self) -> Vec<f64> {
        let mut x = self.u.as_slice().to_vec();
        x.extend_from_slice(self.v.as_slice());
        x
    }

    pub fn from_vector(n_cells: usize, n_modes: usize, x: &[f64], t: f64) -> Result<Self> {
        let n = n_cells * n_modes;
        if x.len() != 2 * n {
            return Err(Error::Structural(format!(
                "state vector has length {}, expected {}",
                x.len(),
                2 * n
            )));
        }
        Ok(Self {
            u: FieldCoeffs::from_vec(n_cells, n_modes, x[..n].to_vec())?,
            v: FieldCoeffs::from_vec(n_cells, n_modes, x[n..].to_vec())?,
            t,
        })
    }
}

fn check_state(state: &State1D, mesh: &Mesh1D, basis: &Basis) -> Result<()> {
    let ok = state.u.same_shape(&state.v)
        && state.u.n_cells() == mesh.n_cells()
        && state.u.n_modes() == basis.n_modes();
    if ok {
        Ok(())
    } else {
        Err(Error::Structural(format!(
            "state shape ({} x {}, {} x {}) does not match mesh/basis ({} x {})",
            state.u.n_cells(),
            state.u.n_modes(),
            state.v.n_cells(),
            state.v.n_modes(),
            mesh.n_cells(),
            basis.n_modes()
        )))
    }
}

/// Deterministic right-hand side `(du/dt, dv/dt)` of the DG scheme.
pub fn assemble_drift_1d(
    state: &State1D,
    mesh: &Mesh1D,
    basis: &Basis,
    flux: &FluxParams1D,
) -> Result<(FieldCoeffs, FieldCoeffs)> {
    check_state(state, mesh, basis)?;
    let widths = mesh.widths();
    let nm = basis.n_modes();
    let idx = |i: usize, l: usize| i * nm + l;
    let (u, v) = (state.u.as_slice(), state.v.as_slice());
    let mut du = FieldCoeffs::zeros(mesh.n_cells(), nm);
    let mut dv = FieldCoeffs::zeros(mesh.n_cells(), nm);
    add_flux_form(&widths, basis, flux.alpha, 1.0, u, dv.as_mut_slice(), idx);
    add_jump_penalty(&widths, basis, flux.beta1, v, dv.as_mut_slice(), idx);
    add_flux_form(&widths, basis, -flux.alpha, 1.0, v, du.as_mut_slice(), idx);
    add_jump_penalty(&widths, basis, flux.beta2, u, du.as_mut_slice(), idx);
    Ok((du, dv))
}

/// Sparse matrix of the drift acting on stacked `[u; v]` coefficients.
///
/// Built from per-edge coupling blocks, independently of the matrix-free
/// kernel used by [`assemble_drift_1d`].
pub fn drift_matrix_1d(mesh: &Mesh1D, basis: &Basis, flux: &FluxParams1D) -> CsrMatrix {
    let n = mesh.n_cells();
    let nm = basis.n_modes();
    let off_v = n * nm;
    let mut t = TripletBuilder::new(2 * n * nm);
    let (right, left) = (basis.right(), basis.left());
    let FluxParams1D { alpha, beta1, beta2 } = *flux;

    for j in 0..n {
        let h = mesh.width(j);
        // Volume: dv_j^m += (2/h) sum_l u_j^l S_lm, du likewise from v.
        for m in 0..nm {
            for l in 0..nm {
                let k = 2.0 / h * basis.stiffness(l, m);
                t.push(off_v + j * nm + m, j * nm + l, k);
                t.push(j * nm + m, off_v + j * nm + l, k);
            }
        }
    }

    // Edge e sits between cell j (minus side) and jp (plus side).
    for j in 0..n {
        let jp = (j + 1) % n;
        let sm = (2.0 / mesh.width(j)).sqrt();
        let sp = (2.0 / mesh.width(jp)).sqrt();
        // Trace functionals: minus trace uses right values of cell j.
        let minus: Vec<f64> = right.iter().map(|r| sm * r).collect();
        let plus: Vec<f64> = left.iter().map(|l| sp * l).collect();
        // u_hat = (1/2 - a) u^- + (1/2 + a) u^+ - b1 (v^+ - v^-)
        // v_hat = (1/2 + a) v^- + (1/2 - a) v^+ - b2 (u^+ - u^-)
        let u_hat: Vec<(usize, f64)> = (0..nm)
            .flat_map(|l| {
                [
                    (j * nm + l, (0.5 - alpha) * minus[l]),
                    (jp * nm + l, (0.5 + alpha) * plus[l]),
                    (off_v + jp * nm + l, -beta1 * plus[l]),
                    (off_v + j * nm + l, beta1 * minus[l]),
                ]
            })
            .collect();
        let v_hat: Vec<(usize, f64)> = (0..nm)
            .flat_map(|l| {
                [
                    (off_v + j * nm + l, (0.5 + alpha) * minus[l]),
                    (off_v + jp * nm + l, (0.5 - alpha) * plus[l]),
                    (jp * nm + l, -beta2 * plus[l]),
                    (j * nm + l, beta2 * minus[l]),
                ]
            })
            .collect();
        for m in 0..nm {
            // -(hat phi^-) on cell j, +(hat phi^+) on cell jp
            for &(c, w) in &u_hat {
                t.push(off_v + j * nm + m, c, -w * minus[m]);
                t.push(off_v + jp * nm + m, c, w * plus[m]);
            }
            for &(c, w) in &v_hat {
                t.push(j * nm + m, c, -w * minus[m]);
                t.push(jp * nm + m, c, w * plus[m]);
            }
        }
    }
    t.build()
}

/// `||u_h||^2 + ||v_h||^2`.
pub fn discrete_energy_1d(state: &State1D) -> f64 {
    state.u.norm_sq() + state.v.norm_sq()
}

/// L2 errors `(||u - u_h||, ||v - v_h||)` with (k+3)-point over-integration.
pub fn l2_error_1d(
    state: &State1D,
    mesh: &Mesh1D,
    basis: &Basis,
    exact_u: &dyn Fn(f64) -> f64,
    exact_v: &dyn Fn(f64) -> f64,
) -> Result<(f64, f64)> {
    check_state(state, mesh, basis)?;
    let q = basis.error_quadrature();
    Ok((
        l2_distance_1d(&state.u, mesh, exact_u, &q),
        l2_distance_1d(&state.v, mesh, exact_v, &q),
    ))
}
