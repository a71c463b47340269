//! DG scheme on rectangular periodic meshes for the 2D system
//! `dE - T_x dt + S_y dt = f dW`, `dS + E_y dt = g dW`, `dT - E_x dt = r dW`
//! with per-direction fluxes `q_hat = {q} + alpha [q]`.
//!
//! State vectors stack the coefficients as `[E; S; T]`; see [`crate::field`]
//! for the cell and mode ordering.

mod noise;
mod projection;

pub use noise::{assemble_noise_2d, NoiseFn2D, NoiseSpec2D};
pub use projection::{
    radau_projection_2d, superconvergence_functional, RadauVariant, TensorProjection2D,
};

use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::field::{l2_distance_2d, FieldCoeffs};
use crate::line::add_flux_form;
use crate::mesh::TensorMesh2D;
use crate::sparse::{CsrMatrix, TripletBuilder};

/// Flux parameters in x (`alpha1`) and y (`alpha2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxParams2D {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl FluxParams2D {
    pub fn new(alpha1: f64, alpha2: f64) -> Result<Self> {
        if !(alpha1.is_finite() && alpha2.is_finite()) {
            return Err(Error::Config("flux parameters must be finite".into()));
        }
        Ok(Self { alpha1, alpha2 })
    }

    /// Both parameters nonzero: the tensor Radau projections exist.
    pub fn projection_well_posed(&self) -> bool {
        self.alpha1 != 0.0 && self.alpha2 != 0.0
    }
}

/// DG solution `(E_h, S_h, T_h)` at time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct State2D {
    pub e: FieldCoeffs,
    pub s: FieldCoeffs,
    pub t: FieldCoeffs,
    pub time: f64,
}

impl State2D {
    pub fn new(e: FieldCoeffs, s: FieldCoeffs, t: FieldCoeffs, time: f64) -> Result<Self> {
        if !(e.same_shape(&s) && e.same_shape(&t)) {
            return Err(Error::Structural("E, S and T have different mesh or degree".into()));
        }
        Ok(Self { e, s, t, time })
    }

    pub fn zeros(n_cells: usize, n_modes: usize) -> Self {
        Self {
            e: FieldCoeffs::zeros(n_cells, n_modes),
            s: FieldCoeffs::zeros(n_cells, n_modes),
            t: FieldCoeffs::zeros(n_cells, n_modes),
            time: 0.0,
        }
    }

    pub fn to_vector(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(3 * self.e.len());
        x.extend_from_slice(self.e.as_slice());
        x.extend_from_slice(self.s.as_slice());
        x.extend_from_slice(self.t.as_slice());
        x
    }

    pub fn from_vector(n_cells: usize, n_modes: usize, x: &[f64], time: f64) -> Result<Self> {
        let n = n_cells * n_modes;
        if x.len() != 3 * n {
            return Err(Error::Structural(format!(
                "state vector has length {}, expected {}",
                x.len(),
                3 * n
            )));
        }
        Ok(Self {
            e: FieldCoeffs::from_vec(n_cells, n_modes, x[..n].to_vec())?,
            s: FieldCoeffs::from_vec(n_cells, n_modes, x[n..2 * n].to_vec())?,
            t: FieldCoeffs::from_vec(n_cells, n_modes, x[2 * n..].to_vec())?,
            time,
        })
    }
}

fn check_state(state: &State2D, mesh: &TensorMesh2D, basis: &Basis) -> Result<()> {
    let nm = basis.n_modes();
    let ok = state.e.same_shape(&state.s)
        && state.e.same_shape(&state.t)
        && state.e.n_cells() == mesh.n_cells()
        && state.e.n_modes() == nm * nm;
    if ok {
        Ok(())
    } else {
        Err(Error::Structural("2D state does not match mesh/basis".into()))
    }
}

/// Apply `scale * A_I(p, .; alpha)` along every x-line (one per y-cell and y-mode).
pub(crate) fn add_x_form(mesh: &TensorMesh2D, basis: &Basis, alpha: f64, scale: f64, p: &[f64], out: &mut [f64]) {
    let nm = basis.n_modes();
    let widths = mesh.mesh_x.widths();
    for j in 0..mesh.ny() {
        for my in 0..nm {
            let idx = |i: usize, lx: usize| mesh.cell_index(i, j) * nm * nm + lx * nm + my;
            add_flux_form(&widths, basis, alpha, scale, p, out, idx);
        }
    }
}

/// Apply `scale * A_J(p, .; alpha)` along every y-line.
pub(crate) fn add_y_form(mesh: &TensorMesh2D, basis: &Basis, alpha: f64, scale: f64, p: &[f64], out: &mut [f64]) {
    let nm = basis.n_modes();
    let widths = mesh.mesh_y.widths();
    for i in 0..mesh.nx() {
        for mx in 0..nm {
            let idx = |j: usize, ly: usize| mesh.cell_index(i, j) * nm * nm + mx * nm + ly;
            add_flux_form(&widths, basis, alpha, scale, p, out, idx);
        }
    }
}

/// Deterministic right-hand side `(dE/dt, dS/dt, dT/dt)`:
/// `dE = -A_I(T; a1) + A_J(S; -a2)`, `dS = A_J(E; a2)`, `dT = -A_I(E; -a1)`.
pub fn assemble_drift_2d(
    state: &State2D,
    mesh: &TensorMesh2D,
    basis: &Basis,
    flux: &FluxParams2D,
) -> Result<(FieldCoeffs, FieldCoeffs, FieldCoeffs)> {
    check_state(state, mesh, basis)?;
    let (nc, nm2) = (state.e.n_cells(), state.e.n_modes());
    let mut de = FieldCoeffs::zeros(nc, nm2);
    let mut ds = FieldCoeffs::zeros(nc, nm2);
    let mut dt = FieldCoeffs::zeros(nc, nm2);
    add_x_form(mesh, basis, flux.alpha1, -1.0, state.t.as_slice(), de.as_mut_slice());
    add_y_form(mesh, basis, -flux.alpha2, 1.0, state.s.as_slice(), de.as_mut_slice());
    add_y_form(mesh, basis, flux.alpha2, 1.0, state.e.as_slice(), ds.as_mut_slice());
    add_x_form(mesh, basis, -flux.alpha1, -1.0, state.e.as_slice(), dt.as_mut_slice());
    Ok((de, ds, dt))
}

/// Triplets `(row, col, value)` of the 1D form `A(p, phi_m; alpha)` on a
/// periodic line, in line-local `(cell * n_modes + mode)` indexing.
fn line_form_entries(widths: &[f64], basis: &Basis, alpha: f64) -> Vec<(usize, usize, f64)> {
    let n = widths.len();
    let nm = basis.n_modes();
    let mut out = Vec::new();
    for i in 0..n {
        let h = widths[i];
        for m in 0..nm {
            for l in 0..nm {
                out.push((i * nm + m, i * nm + l, 2.0 / h * basis.stiffness(l, m)));
            }
        }
    }
    for i in 0..n {
        let ip = (i + 1) % n;
        let (sm, sp) = ((2.0 / widths[i]).sqrt(), (2.0 / widths[ip]).sqrt());
        for m in 0..nm {
            let test_minus = sm * basis.right()[m];
            let test_plus = sp * basis.left()[m];
            for l in 0..nm {
                let wm = (0.5 - alpha) * sm * basis.right()[l];
                let wp = (0.5 + alpha) * sp * basis.left()[l];
                out.push((i * nm + m, i * nm + l, -wm * test_minus));
                out.push((i * nm + m, ip * nm + l, -wp * test_minus));
                out.push((ip * nm + m, i * nm + l, wm * test_plus));
                out.push((ip * nm + m, ip * nm + l, wp * test_plus));
            }
        }
    }
    out
}

/// Sparse matrix of the 2D drift acting on stacked `[E; S; T]`.
pub fn drift_matrix_2d(mesh: &TensorMesh2D, basis: &Basis, flux: &FluxParams2D) -> CsrMatrix {
    let nm = basis.n_modes();
    let nm2 = nm * nm;
    let block = mesh.n_cells() * nm2;
    let (e_off, s_off, t_off) = (0, block, 2 * block);
    let mut t = TripletBuilder::new(3 * block);
    let wx = mesh.mesh_x.widths();
    let wy = mesh.mesh_y.widths();

    // x-direction couplings: rows/cols share (j, y-mode).
    let x_line = |alpha: f64| line_form_entries(&wx, basis, alpha);
    let y_line = |alpha: f64| line_form_entries(&wy, basis, alpha);
    let x_pos = |i: usize, lx: usize, j: usize, my: usize| mesh.cell_index(i, j) * nm2 + lx * nm + my;
    let y_pos = |j: usize, ly: usize, i: usize, mx: usize| mesh.cell_index(i, j) * nm2 + mx * nm + ly;

    for (row_off, col_off, alpha, scale) in [(e_off, t_off, flux.alpha1, -1.0), (t_off, e_off, -flux.alpha1, -1.0)] {
        for (r, c, v) in x_line(alpha) {
            let (ri, rl) = (r / nm, r % nm);
            let (ci, cl) = (c / nm, c % nm);
            for j in 0..mesh.ny() {
                for my in 0..nm {
                    t.push(row_off + x_pos(ri, rl, j, my), col_off + x_pos(ci, cl, j, my), scale * v);
                }
            }
        }
    }
    for (row_off, col_off, alpha) in [(e_off, s_off, -flux.alpha2), (s_off, e_off, flux.alpha2)] {
        for (r, c, v) in y_line(alpha) {
            let (rj, rl) = (r / nm, r % nm);
            let (cj, cl) = (c / nm, c % nm);
            for i in 0..mesh.nx() {
                for mx in 0..nm {
                    t.push(row_off + y_pos(rj, rl, i, mx), col_off + y_pos(cj, cl, i, mx), v);
                }
            }
        }
    }
    t.build()
}

/// `||E_h||^2 + ||S_h||^2 + ||T_h||^2`.
pub fn discrete_energy_2d(state: &State2D) -> f64 {
    state.e.norm_sq() + state.s.norm_sq() + state.t.norm_sq()
}

/// Exact field `(x, y) -> value`.
pub type ExactFn2D<'a> = &'a dyn Fn(f64, f64) -> f64;

/// L2 errors `(e_E, e_S, e_T)` with (k+3)^2-point tensor over-integration.
pub fn l2_error_2d(
    state: &State2D,
    mesh: &TensorMesh2D,
    basis: &Basis,
    exact_e: ExactFn2D,
    exact_s: ExactFn2D,
    exact_t: ExactFn2D,
) -> Result<(f64, f64, f64)> {
    check_state(state, mesh, basis)?;
    let q = basis.error_quadrature();
    Ok((
        l2_distance_2d(&state.e, mesh, exact_e, &q),
        l2_distance_2d(&state.s, mesh, exact_s, &q),
        l2_distance_2d(&state.t, mesh, exact_t, &q),
    ))
}
