//! Modal DG fields and L2 projection.
//!
//! 1D layout: `data[j * (k+1) + l]` for cell `j`, mode `l`.
//! 2D layout: cell index `i * ny + j` (x-major), and inside a cell the
//! mode index `l_x * (k+1) + l_y`, so `data[cell * (k+1)^2 + mode]`.

use crate::basis::{legendre_unchecked, Basis};
use crate::error::{Error, Result};
use crate::mesh::{Mesh1D, TensorMesh2D};

/// Per-cell modal coefficients of a DG field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldCoeffs {
    n_cells: usize,
    n_modes: usize,
    data: Vec<f64>,
}

impl FieldCoeffs {
    pub fn zeros(n_cells: usize, n_modes: usize) -> Self {
        Self {
            n_cells,
            n_modes,
            data: vec![0.0; n_cells * n_modes],
        }
    }

    pub fn from_vec(n_cells: usize, n_modes: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_cells * n_modes {
            return Err(Error::Structural(format!(
                "expected {} coefficients, got {}",
                n_cells * n_modes,
                data.len()
            )));
        }
        Ok(Self {
            n_cells,
            n_modes,
            data,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn cell(&self, c: usize) -> &[f64] {
        &self.data[c * self.n_modes..(c + 1) * self.n_modes]
    }

    pub fn cell_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.data[c * self.n_modes..(c + 1) * self.n_modes]
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.n_cells == other.n_cells && self.n_modes == other.n_modes
    }

    /// Squared L2 norm; the basis is orthonormal so this is the
    /// Euclidean norm of the coefficients.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|c| c * c).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// L2 projection of `f` onto the degree-k DG space of `mesh`.
pub fn l2_project(f: impl Fn(f64) -> f64, mesh: &Mesh1D, basis: &Basis) -> FieldCoeffs {
    let quad = basis.projection_quadrature();
    let table = basis.tabulate(&quad.nodes);
    let nm = basis.n_modes();
    let mut out = FieldCoeffs::zeros(mesh.n_cells(), nm);
    for j in 0..mesh.n_cells() {
        let h = mesh.width(j);
        // integral of f * sqrt(2/h) phi_l over the cell = sqrt(h/2) * sum w f phi_l
        let s = (0.5 * h).sqrt();
        let cell = out.cell_mut(j);
        for (q, (&xi, &w)) in quad.nodes.iter().zip(&quad.weights).enumerate() {
            let fx = f(mesh.to_physical(j, xi));
            for l in 0..nm {
                cell[l] += s * w * fx * table[q][l];
            }
        }
    }
    out
}

/// Value of a 1D field at reference point `xi` of cell `j`.
pub fn eval_cell_1d(field: &FieldCoeffs, mesh: &Mesh1D, j: usize, xi: f64) -> f64 {
    let s = (2.0 / mesh.width(j)).sqrt();
    field
        .cell(j)
        .iter()
        .enumerate()
        .map(|(l, c)| c * legendre_unchecked(l, xi).0)
        .sum::<f64>()
        * s
}

/// Value of a 1D field at physical point `x`.
pub fn eval_1d(field: &FieldCoeffs, mesh: &Mesh1D, x: f64) -> Result<f64> {
    let (j, xi) = mesh
        .locate(x)
        .ok_or_else(|| Error::Structural(format!("point {x} outside the mesh")))?;
    Ok(eval_cell_1d(field, mesh, j, xi))
}

/// L2 projection of `f(x, y)` onto the tensor-product DG space `Q^k`.
pub fn l2_project_2d(f: impl Fn(f64, f64) -> f64, mesh: &TensorMesh2D, basis: &Basis) -> FieldCoeffs {
    let quad = basis.projection_quadrature();
    let table = basis.tabulate(&quad.nodes);
    let nm = basis.n_modes();
    let mut out = FieldCoeffs::zeros(mesh.n_cells(), nm * nm);
    for i in 0..mesh.nx() {
        let hx = mesh.mesh_x.width(i);
        for j in 0..mesh.ny() {
            let hy = mesh.mesh_y.width(j);
            let s = (0.25 * hx * hy).sqrt();
            let cell = out.cell_mut(mesh.cell_index(i, j));
            for (qx, (&xi, &wx)) in quad.nodes.iter().zip(&quad.weights).enumerate() {
                let x = mesh.mesh_x.to_physical(i, xi);
                for (qy, (&eta, &wy)) in quad.nodes.iter().zip(&quad.weights).enumerate() {
                    let fxy = s * wx * wy * f(x, mesh.mesh_y.to_physical(j, eta));
                    for lx in 0..nm {
                        for ly in 0..nm {
                            cell[lx * nm + ly] += fxy * table[qx][lx] * table[qy][ly];
                        }
                    }
                }
            }
        }
    }
    out
}

/// Value of a 2D field at reference point `(xi, eta)` of cell `(i, j)`.
pub fn eval_cell_2d(field: &FieldCoeffs, mesh: &TensorMesh2D, i: usize, j: usize, xi: f64, eta: f64) -> f64 {
    let nm = (field.n_modes() as f64).sqrt().round() as usize;
    let s = (4.0 / (mesh.mesh_x.width(i) * mesh.mesh_y.width(j))).sqrt();
    let px: Vec<f64> = (0..nm).map(|l| legendre_unchecked(l, xi).0).collect();
    let py: Vec<f64> = (0..nm).map(|l| legendre_unchecked(l, eta).0).collect();
    let cell = field.cell(mesh.cell_index(i, j));
    let mut acc = 0.0;
    for lx in 0..nm {
        for ly in 0..nm {
            acc += cell[lx * nm + ly] * px[lx] * py[ly];
        }
    }
    acc * s
}

/// Value of a 2D field at physical point `(x, y)`.
pub fn eval_2d(field: &FieldCoeffs, mesh: &TensorMesh2D, x: f64, y: f64) -> Result<f64> {
    let (i, xi) = mesh
        .mesh_x
        .locate(x)
        .ok_or_else(|| Error::Structural(format!("x = {x} outside the mesh")))?;
    let (j, eta) = mesh
        .mesh_y
        .locate(y)
        .ok_or_else(|| Error::Structural(format!("y = {y} outside the mesh")))?;
    Ok(eval_cell_2d(field, mesh, i, j, xi, eta))
}

/// L2 distance between a 1D field and `exact`, by `quad` on every cell.
pub(crate) fn l2_distance_1d(
    field: &FieldCoeffs,
    mesh: &Mesh1D,
    exact: &dyn Fn(f64) -> f64,
    quad: &crate::quadrature::Quadrature,
) -> f64 {
    let mut acc = 0.0;
    for j in 0..mesh.n_cells() {
        let h = mesh.width(j);
        for (&xi, &w) in quad.nodes.iter().zip(&quad.weights) {
            let d = exact(mesh.to_physical(j, xi)) - eval_cell_1d(field, mesh, j, xi);
            acc += 0.5 * h * w * d * d;
        }
    }
    acc.sqrt()
}

/// L2 distance between a 2D field and `exact` by tensor quadrature.
pub(crate) fn l2_distance_2d(
    field: &FieldCoeffs,
    mesh: &TensorMesh2D,
    exact: &dyn Fn(f64, f64) -> f64,
    quad: &crate::quadrature::Quadrature,
) -> f64 {
    let nm = (field.n_modes() as f64).sqrt().round() as usize;
    let table: Vec<Vec<f64>> = quad
        .nodes
        .iter()
        .map(|&x| (0..nm).map(|l| legendre_unchecked(l, x).0).collect())
        .collect();
    let mut acc = 0.0;
    for i in 0..mesh.nx() {
        let hx = mesh.mesh_x.width(i);
        for j in 0..mesh.ny() {
            let hy = mesh.mesh_y.width(j);
            let s = (4.0 / (hx * hy)).sqrt();
            let cell = field.cell(mesh.cell_index(i, j));
            for (qx, (&xi, &wx)) in quad.nodes.iter().zip(&quad.weights).enumerate() {
                let x = mesh.mesh_x.to_physical(i, xi);
                for (qy, (&eta, &wy)) in quad.nodes.iter().zip(&quad.weights).enumerate() {
                    let mut uh = 0.0;
                    for lx in 0..nm {
                        for ly in 0..nm {
                            uh += cell[lx * nm + ly] * table[qx][lx] * table[qy][ly];
                        }
                    }
                    let d = exact(x, mesh.mesh_y.to_physical(j, eta)) - s * uh;
                    acc += 0.25 * hx * hy * wx * wy * d * d;
                }
            }
        }
    }
    acc.sqrt()
}
