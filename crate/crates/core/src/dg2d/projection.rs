//! Tensor products of 1D generalized Radau and L2 projections.

use super::FluxParams2D;
use crate::basis::{legendre_unchecked, Basis};
use crate::dg1d::{ProjectionData, RadauProjection1D};
use crate::error::Result;
use crate::field::FieldCoeffs;
use crate::mesh::{Mesh1D, TensorMesh2D};
use crate::quadrature::gauss_quadrature;

/// Which directions use a generalized Radau projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadauVariant {
    /// `P_x^{alpha,0} (x) P_y`
    X { alpha: f64 },
    /// `P_x (x) P_y^{beta,0}`
    Y { beta: f64 },
    /// `P_x^{alpha,0} (x) P_y^{beta,0}`
    XY { alpha: f64, beta: f64 },
}

#[derive(Debug)]
enum Direction {
    L2,
    Radau(RadauProjection1D),
}

impl Direction {
    fn new(mesh: &Mesh1D, basis: &Basis, alpha: Option<f64>) -> Result<Self> {
        Ok(match alpha {
            None => Direction::L2,
            Some(a) => Direction::Radau(RadauProjection1D::new(mesh, basis, a)?),
        })
    }

    fn apply(&self, data: &ProjectionData) -> FieldCoeffs {
        match self {
            Direction::L2 => data.moments.clone(),
            Direction::Radau(r) => r.project_data(data),
        }
    }
}

/// Reusable tensor projection; `None` in a direction means L2 there.
#[derive(Debug)]
pub struct TensorProjection2D {
    mesh: TensorMesh2D,
    basis: Basis,
    x: Direction,
    y: Direction,
}

/// Sample points of one direction: the (k+2) quadrature nodes of every cell
/// followed by its right edge.
fn sample_points(mesh: &Mesh1D, nodes: &[f64]) -> Vec<f64> {
    let mut pts = Vec::with_capacity(mesh.n_cells() * (nodes.len() + 1));
    for j in 0..mesh.n_cells() {
        pts.extend(nodes.iter().map(|&xi| mesh.to_physical(j, xi)));
        pts.push(mesh.edges()[j + 1]);
    }
    pts
}

/// Projection data of a 1D function given at [`sample_points`].
fn data_from_samples(mesh: &Mesh1D, basis: &Basis, weights: &[f64], table: &[Vec<f64>], vals: impl Fn(usize) -> f64) -> ProjectionData {
    let nq = weights.len();
    let nm = basis.n_modes();
    let n = mesh.n_cells();
    let mut moments = FieldCoeffs::zeros(n, nm);
    let mut edges = Vec::with_capacity(n);
    for j in 0..n {
        let inv_s = (0.5 * mesh.width(j)).sqrt();
        let cell = moments.cell_mut(j);
        for q in 0..nq {
            let v = inv_s * weights[q] * vals(j * (nq + 1) + q);
            for l in 0..nm {
                cell[l] += v * table[q][l];
            }
        }
        edges.push(vals(j * (nq + 1) + nq));
    }
    ProjectionData { moments, edges }
}

impl TensorProjection2D {
    pub fn new(mesh: &TensorMesh2D, basis: &Basis, alpha_x: Option<f64>, alpha_y: Option<f64>) -> Result<Self> {
        Ok(Self {
            mesh: mesh.clone(),
            basis: basis.clone(),
            x: Direction::new(&mesh.mesh_x, basis, alpha_x)?,
            y: Direction::new(&mesh.mesh_y, basis, alpha_y)?,
        })
    }

    pub fn from_variant(mesh: &TensorMesh2D, basis: &Basis, variant: RadauVariant) -> Result<Self> {
        match variant {
            RadauVariant::X { alpha } => Self::new(mesh, basis, Some(alpha), None),
            RadauVariant::Y { beta } => Self::new(mesh, basis, None, Some(beta)),
            RadauVariant::XY { alpha, beta } => Self::new(mesh, basis, Some(alpha), Some(beta)),
        }
    }

    /// Projections used to initialize `(E, S, T)`:
    /// `P^{-alpha1, alpha2}`, `P_y^{-alpha2}` and `P_x^{alpha1}`.
    /// A zero parameter falls back to L2 in that direction; the returned
    /// note says so.
    pub fn initial_set(mesh: &TensorMesh2D, basis: &Basis, flux: &FluxParams2D) -> Result<([Self; 3], Option<String>)> {
        let nz = |a: f64| if a != 0.0 { Some(a) } else { None };
        let (a1, a2) = (flux.alpha1, flux.alpha2);
        let note = if flux.projection_well_posed() {
            None
        } else {
            Some(format!(
                "flux parameter zero (alpha1 = {a1}, alpha2 = {a2}); L2 projection used in that direction"
            ))
        };
        Ok((
            [
                Self::new(mesh, basis, nz(-a1), nz(a2))?,
                Self::new(mesh, basis, None, nz(-a2))?,
                Self::new(mesh, basis, nz(a1), None)?,
            ],
            note,
        ))
    }

    pub fn project(&self, w: &dyn Fn(f64, f64) -> f64) -> FieldCoeffs {
        let (mx, my) = (&self.mesh.mesh_x, &self.mesh.mesh_y);
        let quad = self.basis.projection_quadrature();
        let table = self.basis.tabulate(&quad.nodes);
        let nm = self.basis.n_modes();
        let xs = sample_points(mx, &quad.nodes);
        let ys = sample_points(my, &quad.nodes);

        // x-projection along every sampled y.
        let cx: Vec<FieldCoeffs> = ys
            .iter()
            .map(|&y| {
                let data = data_from_samples(mx, &self.basis, &quad.weights, &table, |p| w(xs[p], y));
                self.x.apply(&data)
            })
            .collect();

        let mut out = FieldCoeffs::zeros(self.mesh.n_cells(), nm * nm);
        for i in 0..mx.n_cells() {
            for lx in 0..nm {
                let data = data_from_samples(my, &self.basis, &quad.weights, &table, |p| cx[p].cell(i)[lx]);
                let cy = self.y.apply(&data);
                for j in 0..my.n_cells() {
                    let c = self.mesh.cell_index(i, j);
                    for ly in 0..nm {
                        out.cell_mut(c)[lx * nm + ly] = cy.cell(j)[ly];
                    }
                }
            }
        }
        out
    }
}

/// One-shot tensor projection of `w`.
pub fn radau_projection_2d(
    w: &dyn Fn(f64, f64) -> f64,
    variant: RadauVariant,
    mesh: &TensorMesh2D,
    basis: &Basis,
) -> Result<FieldCoeffs> {
    Ok(TensorProjection2D::from_variant(mesh, basis, variant)?.project(w))
}

/// Dual norm over `phi` in the DG space of
/// `phi -> sum_{i,j} int_J A_I(P^{alpha,beta} w - w, phi; alpha) dy`,
/// i.e. the Euclidean norm of the functional's coefficient vector.
pub fn superconvergence_functional(
    w: &dyn Fn(f64, f64) -> f64,
    mesh: &TensorMesh2D,
    basis: &Basis,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    let pw = TensorProjection2D::new(mesh, basis, Some(alpha), Some(beta))?.project(w);
    let nm = basis.n_modes();
    let mut f = vec![0.0; pw.len()];
    super::add_x_form(mesh, basis, alpha, 1.0, pw.as_slice(), &mut f);

    // A_I(w, phi) for continuous w, where w_hat = w on every edge.
    let quad = gauss_quadrature(basis.degree() + 5);
    let vals: Vec<(f64, f64)> = quad
        .nodes
        .iter()
        .flat_map(|&x| (0..nm).map(move |l| legendre_unchecked(l, x)))
        .collect();
    let tab = |q: usize, l: usize| vals[q * nm + l];
    for i in 0..mesh.nx() {
        let hx = mesh.mesh_x.width(i);
        let sx = (2.0 / hx).sqrt();
        let (xl, xr) = (mesh.mesh_x.edges()[i], mesh.mesh_x.edges()[i + 1]);
        for j in 0..mesh.ny() {
            let hy = mesh.mesh_y.width(j);
            let sy = (2.0 / hy).sqrt();
            let c = mesh.cell_index(i, j);
            for (qy, (&eta, &wy)) in quad.nodes.iter().zip(&quad.weights).enumerate() {
                let y = mesh.mesh_y.to_physical(j, eta);
                let dy = 0.5 * hy * wy;
                let (w_right, w_left) = (w(xr, y), w(xl, y));
                for my in 0..nm {
                    let psi = sy * tab(qy, my).0;
                    for mx in 0..nm {
                        let edge = -w_right * sx * basis.right()[mx] + w_left * sx * basis.left()[mx];
                        f[c * nm * nm + mx * nm + my] -= dy * psi * edge;
                    }
                }
                for (qx, (&xi, &wx)) in quad.nodes.iter().zip(&quad.weights).enumerate() {
                    let x = mesh.mesh_x.to_physical(i, xi);
                    // dx * d/dx = (h/2) * (2/h) d/dxi
                    let wv = wx * dy * w(x, y);
                    for my in 0..nm {
                        let psi = sy * tab(qy, my).0;
                        for mx in 0..nm {
                            f[c * nm * nm + mx * nm + my] -= wv * psi * sx * tab(qx, mx).1;
                        }
                    }
                }
            }
        }
    }
    Ok(f.iter().map(|v| v * v).sum::<f64>().sqrt())
}
