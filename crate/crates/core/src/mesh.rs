//! One-dimensional meshes and their tensor products.

use crate::error::{Error, Result};

/// A partition of [a, b] into cells `I_j = [x_{j-1/2}, x_{j+1/2}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    edges: Vec<f64>,
}

/// Uniform mesh of `n` cells on [a, b].
pub fn build_mesh_1d(a: f64, b: f64, n: usize) -> Result<Mesh1D> {
    if n == 0 {
        return Err(Error::Config("mesh needs at least one cell".into()));
    }
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::Config(format!("degenerate interval [{a}, {b}]")));
    }
    let h = (b - a) / n as f64;
    let mut edges: Vec<f64> = (0..=n).map(|j| a + h * j as f64).collect();
    edges[n] = b;
    Ok(Mesh1D { edges })
}

impl Mesh1D {
    /// Mesh from explicit, strictly increasing edge coordinates.
    pub fn from_edges(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::Config("mesh needs at least two edges".into()));
        }
        if edges.iter().any(|x| !x.is_finite()) || edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("mesh edges must be finite and strictly increasing".into()));
        }
        Ok(Self { edges })
    }

    pub fn n_cells(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.edges[0], self.edges[self.n_cells()])
    }

    pub fn length(&self) -> f64 {
        let (a, b) = self.domain();
        b - a
    }

    pub fn width(&self, j: usize) -> f64 {
        self.edges[j + 1] - self.edges[j]
    }

    pub fn widths(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn center(&self, j: usize) -> f64 {
        0.5 * (self.edges[j] + self.edges[j + 1])
    }

    /// Maximum cell width.
    pub fn h(&self) -> f64 {
        self.edges.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Ratio of the largest to the smallest cell width.
    pub fn quasi_uniformity(&self) -> f64 {
        let min = self.edges.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        self.h() / min
    }

    /// Physical coordinate of reference point `xi` in cell `j`.
    pub fn to_physical(&self, j: usize, xi: f64) -> f64 {
        self.center(j) + 0.5 * self.width(j) * xi
    }

    /// Cell containing `x` (right-closed on the last cell) and the
    /// reference coordinate of `x` inside it.
    pub fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let (a, b) = self.domain();
        if !(x >= a && x <= b) {
            return None;
        }
        let j = match self.edges.binary_search_by(|e| e.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.n_cells() - 1),
            Err(i) => i - 1,
        };
        let xi = (2.0 * (x - self.center(j)) / self.width(j)).clamp(-1.0, 1.0);
        Some((j, xi))
    }

    pub fn is_uniform(&self, rel_tol: f64) -> bool {
        let h0 = self.width(0);
        self.widths().iter().all(|h| (h - h0).abs() <= rel_tol * h0)
    }
}

/// Rectangular partition with cells `I_i x J_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorMesh2D {
    pub mesh_x: Mesh1D,
    pub mesh_y: Mesh1D,
}

impl TensorMesh2D {
    pub fn new(mesh_x: Mesh1D, mesh_y: Mesh1D) -> Self {
        Self { mesh_x, mesh_y }
    }

    pub fn nx(&self) -> usize {
        self.mesh_x.n_cells()
    }

    pub fn ny(&self) -> usize {
        self.mesh_y.n_cells()
    }

    pub fn n_cells(&self) -> usize {
        self.nx() * self.ny()
    }

    /// Linear cell index, x-major: `i * ny + j`.
    pub fn cell_index(&self, i: usize, j: usize) -> usize {
        i * self.ny() + j
    }

    pub fn h(&self) -> f64 {
        self.mesh_x.h().max(self.mesh_y.h())
    }
}
