//! Global projections matching cell moments and flux-weighted interface values.
//!
//! With an orthonormal basis the moment conditions against `P^{k-1}` fix
//! modes `0..k` of each cell to the L2 projection, so only the top mode of
//! each cell is coupled through the interface conditions.

use nalgebra::{DMatrix, DVector, LU, Dyn};

use super::FluxParams1D;
use crate::basis::Basis;
use crate::circulant::CirculantBidiagonal;
use crate::error::{Error, Result};
use crate::field::{l2_project, FieldCoeffs};
use crate::mesh::Mesh1D;

/// Inputs of a projection: L2 moments (top mode ignored) and point values
/// at the right edge of every cell.
#[derive(Debug, Clone)]
pub(crate) struct ProjectionData {
    pub moments: FieldCoeffs,
    pub edges: Vec<f64>,
}

impl ProjectionData {
    pub(crate) fn from_fn(q: &dyn Fn(f64) -> f64, mesh: &Mesh1D, basis: &Basis) -> Self {
        Self {
            moments: l2_project(q, mesh, basis),
            edges: (0..mesh.n_cells()).map(|j| q(mesh.edges()[j + 1])).collect(),
        }
    }
}

/// Right and left traces of the lower modes plus the top-mode trace weights.
struct Traces {
    known_right: Vec<f64>,
    known_left: Vec<f64>,
    top_right: Vec<f64>,
    top_left: Vec<f64>,
}

fn traces(mesh: &Mesh1D, basis: &Basis, moments: &FieldCoeffs) -> Traces {
    let k = basis.degree();
    let n = mesh.n_cells();
    let mut t = Traces {
        known_right: vec![0.0; n],
        known_left: vec![0.0; n],
        top_right: vec![0.0; n],
        top_left: vec![0.0; n],
    };
    for j in 0..n {
        let s = (2.0 / mesh.width(j)).sqrt();
        let c = moments.cell(j);
        t.known_right[j] = s * (0..k).map(|l| c[l] * basis.right()[l]).sum::<f64>();
        t.known_left[j] = s * (0..k).map(|l| c[l] * basis.left()[l]).sum::<f64>();
        t.top_right[j] = s * basis.right()[k];
        t.top_left[j] = s * basis.left()[k];
    }
    t
}

fn assemble_field(moments: &FieldCoeffs, top: &[f64], k: usize) -> FieldCoeffs {
    let mut out = moments.clone();
    for (j, &a) in top.iter().enumerate() {
        out.cell_mut(j)[k] = a;
    }
    out
}

fn factor(m: DMatrix<f64>, what: &str) -> Result<LU<f64, Dyn, Dyn>> {
    let lu = m.lu();
    let u = lu.u();
    let diag: Vec<f64> = (0..u.nrows()).map(|i| u[(i, i)].abs()).collect();
    let max = diag.iter().cloned().fold(0.0, f64::max);
    let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || min <= 1e-12 * max {
        return Err(Error::WellPosedness(format!("{what}: interface system is singular")));
    }
    Ok(lu)
}

/// The coupled pair `(P^{alpha,beta1} q, P^{-alpha,beta2} r)`:
///
/// `({Pq} + alpha [Pq] - beta1 [Pr])_{j+1/2} = q(x_{j+1/2})`,
/// `({Pr} - alpha [Pr] - beta2 [Pq])_{j+1/2} = r(x_{j+1/2})`,
/// plus moment conditions against `P^{k-1}` on every cell.
#[derive(Debug)]
pub struct GlobalProjectionPair1D {
    mesh: Mesh1D,
    basis: Basis,
    flux: FluxParams1D,
    lu: LU<f64, Dyn, Dyn>,
}

impl GlobalProjectionPair1D {
    pub fn new(mesh: &Mesh1D, basis: &Basis, flux: &FluxParams1D) -> Result<Self> {
        if !flux.projection_well_posed() {
            return Err(Error::WellPosedness(format!(
                "global projection requires alpha^2 + beta1*beta2 != 0 (alpha = {}, beta1 = {}, beta2 = {})",
                flux.alpha, flux.beta1, flux.beta2
            )));
        }
        let n = mesh.n_cells();
        let t = traces(mesh, basis, &FieldCoeffs::zeros(n, basis.n_modes()));
        let FluxParams1D { alpha, beta1, beta2 } = *flux;
        // unknowns: a_j (top of Pq) at j, b_j (top of Pr) at n + j
        let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for j in 0..n {
            let jp = (j + 1) % n;
            let (rm, lp) = (t.top_right[j], t.top_left[jp]);
            m[(j, j)] += (0.5 - alpha) * rm;
            m[(j, jp)] += (0.5 + alpha) * lp;
            m[(j, n + jp)] += -beta1 * lp;
            m[(j, n + j)] += beta1 * rm;

            m[(n + j, n + j)] += (0.5 + alpha) * rm;
            m[(n + j, n + jp)] += (0.5 - alpha) * lp;
            m[(n + j, jp)] += -beta2 * lp;
            m[(n + j, j)] += beta2 * rm;
        }
        let lu = factor(m, "global projection pair")?;
        Ok(Self {
            mesh: mesh.clone(),
            basis: basis.clone(),
            flux: *flux,
            lu,
        })
    }

    pub fn project(&self, q: &dyn Fn(f64) -> f64, r: &dyn Fn(f64) -> f64) -> (FieldCoeffs, FieldCoeffs) {
        let qd = ProjectionData::from_fn(q, &self.mesh, &self.basis);
        let rd = ProjectionData::from_fn(r, &self.mesh, &self.basis);
        self.project_data(&qd, &rd)
    }

    pub(crate) fn project_data(&self, qd: &ProjectionData, rd: &ProjectionData) -> (FieldCoeffs, FieldCoeffs) {
        let n = self.mesh.n_cells();
        let k = self.basis.degree();
        let tq = traces(&self.mesh, &self.basis, &qd.moments);
        let tr = traces(&self.mesh, &self.basis, &rd.moments);
        let FluxParams1D { alpha, beta1, beta2 } = self.flux;
        let mut rhs = DVector::<f64>::zeros(2 * n);
        for j in 0..n {
            let jp = (j + 1) % n;
            let known_q = (0.5 - alpha) * tq.known_right[j] + (0.5 + alpha) * tq.known_left[jp]
                - beta1 * (tr.known_left[jp] - tr.known_right[j]);
            let known_r = (0.5 + alpha) * tr.known_right[j] + (0.5 - alpha) * tr.known_left[jp]
                - beta2 * (tq.known_left[jp] - tq.known_right[j]);
            rhs[j] = qd.edges[j] - known_q;
            rhs[n + j] = rd.edges[j] - known_r;
        }
        let sol = self.lu.solve(&rhs).expect("factorization checked at construction");
        let (a, b) = sol.as_slice().split_at(n);
        (assemble_field(&qd.moments, a, k), assemble_field(&rd.moments, b, k))
    }
}

/// One-shot form of [`GlobalProjectionPair1D`].
pub fn global_projection_pair_1d(
    q: &dyn Fn(f64) -> f64,
    r: &dyn Fn(f64) -> f64,
    mesh: &Mesh1D,
    basis: &Basis,
    flux: &FluxParams1D,
) -> Result<(FieldCoeffs, FieldCoeffs)> {
    Ok(GlobalProjectionPair1D::new(mesh, basis, flux)?.project(q, r))
}

/// Maximum residual of the two interface conditions over all edges.
pub fn interface_residuals_1d(
    pq: &FieldCoeffs,
    pr: &FieldCoeffs,
    q: &dyn Fn(f64) -> f64,
    r: &dyn Fn(f64) -> f64,
    mesh: &Mesh1D,
    basis: &Basis,
    flux: &FluxParams1D,
) -> f64 {
    let n = mesh.n_cells();
    let trace = |f: &FieldCoeffs, j: usize, vals: &[f64]| -> f64 {
        let s = (2.0 / mesh.width(j)).sqrt();
        s * f.cell(j).iter().zip(vals).map(|(c, v)| c * v).sum::<f64>()
    };
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let jp = (j + 1) % n;
        let (qm, qp) = (trace(pq, j, basis.right()), trace(pq, jp, basis.left()));
        let (rm, rp) = (trace(pr, j, basis.right()), trace(pr, jp, basis.left()));
        let x = mesh.edges()[j + 1];
        let res_q = 0.5 * (qm + qp) + flux.alpha * (qp - qm) - flux.beta1 * (rp - rm) - q(x);
        let res_r = 0.5 * (rm + rp) - flux.alpha * (rp - rm) - flux.beta2 * (qp - qm) - r(x);
        worst = worst.max(res_q.abs()).max(res_r.abs());
    }
    worst
}

#[derive(Debug)]
enum RadauSolver {
    Circulant(CirculantBidiagonal),
    Dense(LU<f64, Dyn, Dyn>),
}

/// Single-field generalized Radau projection `P^{alpha,0}`:
/// `({Pq} + alpha [Pq])_{j+1/2} = q(x_{j+1/2})` plus moment conditions.
///
/// Uniform meshes use a DFT-diagonalized circulant solve; non-uniform
/// meshes fall back to a dense factorization.
#[derive(Debug)]
pub struct RadauProjection1D {
    mesh: Mesh1D,
    basis: Basis,
    alpha: f64,
    solver: RadauSolver,
}

impl RadauProjection1D {
    pub fn new(mesh: &Mesh1D, basis: &Basis, alpha: f64) -> Result<Self> {
        if alpha == 0.0 || !alpha.is_finite() {
            return Err(Error::WellPosedness(format!(
                "generalized Radau projection requires a nonzero flux parameter (got {alpha})"
            )));
        }
        let n = mesh.n_cells();
        let t = traces(mesh, basis, &FieldCoeffs::zeros(n, basis.n_modes()));
        let solver = if mesh.is_uniform(1e-12) {
            RadauSolver::Circulant(CirculantBidiagonal::new(
                n,
                (0.5 - alpha) * t.top_right[0],
                (0.5 + alpha) * t.top_left[0],
            )?)
        } else {
            let mut m = DMatrix::<f64>::zeros(n, n);
            for j in 0..n {
                let jp = (j + 1) % n;
                m[(j, j)] += (0.5 - alpha) * t.top_right[j];
                m[(j, jp)] += (0.5 + alpha) * t.top_left[jp];
            }
            RadauSolver::Dense(factor(m, "Radau projection")?)
        };
        Ok(Self {
            mesh: mesh.clone(),
            basis: basis.clone(),
            alpha,
            solver,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn project(&self, q: &dyn Fn(f64) -> f64) -> FieldCoeffs {
        self.project_data(&ProjectionData::from_fn(q, &self.mesh, &self.basis))
    }

    pub(crate) fn project_data(&self, qd: &ProjectionData) -> FieldCoeffs {
        let n = self.mesh.n_cells();
        let tq = traces(&self.mesh, &self.basis, &qd.moments);
        let rhs: Vec<f64> = (0..n)
            .map(|j| {
                let jp = (j + 1) % n;
                qd.edges[j] - (0.5 - self.alpha) * tq.known_right[j] - (0.5 + self.alpha) * tq.known_left[jp]
            })
            .collect();
        let top = match &self.solver {
            RadauSolver::Circulant(c) => c.solve(&rhs),
            RadauSolver::Dense(lu) => lu
                .solve(&DVector::from_vec(rhs))
                .expect("factorization checked at construction")
                .as_slice()
                .to_vec(),
        };
        assemble_field(&qd.moments, &top, self.basis.degree())
    }
}
