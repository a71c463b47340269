use std::fmt;
use std::sync::Arc;

use super::{check_state, State2D};
use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::field::FieldCoeffs;
use crate::mesh::TensorMesh2D;
use crate::noise::{self, NoiseStructure};
use crate::sparse::LinearOperator;

/// Noise coefficient `(x, y, t, E, S, T) -> value`.
pub type NoiseFn2D = Arc<dyn Fn(f64, f64, f64, f64, f64, f64) -> f64 + Send + Sync>;

/// Multiplicative noise `f`, `g`, `r` driving `E`, `S`, `T`.
#[derive(Clone)]
pub struct NoiseSpec2D {
    pub f: NoiseFn2D,
    pub g: NoiseFn2D,
    pub r: NoiseFn2D,
    pub structure: NoiseStructure,
}

impl fmt::Debug for NoiseSpec2D {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("NoiseSpec2D")
            .field("structure", &self.structure)
            .finish_non_exhaustive()
    }
}

impl NoiseSpec2D {
    pub fn zero() -> Self {
        Self::linear(|_, _| [[0.0; 3]; 3])
    }

    /// `f = E`, `g = S`, `r = T`.
    pub fn unit_coupling() -> Self {
        Self::linear(|_, _| [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    /// Row `i` of `c(x, y)` holds the coefficients of `(E, S, T)` in the
    /// i-th noise function `(f, g, r)`.
    pub fn linear(coeffs: impl Fn(f64, f64) -> [[f64; 3]; 3] + Send + Sync + 'static) -> Self {
        let c = Arc::new(coeffs);
        let row = |i: usize| -> NoiseFn2D {
            let c = c.clone();
            Arc::new(move |x, y, _, e, s, t| {
                let m = c(x, y);
                m[i][0] * e + m[i][1] * s + m[i][2] * t
            })
        };
        Self {
            f: row(0),
            g: row(1),
            r: row(2),
            structure: NoiseStructure::LinearInState,
        }
    }

    pub fn general(
        f: impl Fn(f64, f64, f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64, f64, f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
        r: impl Fn(f64, f64, f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            f: Arc::new(f),
            g: Arc::new(g),
            r: Arc::new(r),
            structure: NoiseStructure::General,
        }
    }

    /// Closures tagged as linear; see [`NoiseSpec2D::verify_linear`].
    pub fn declared_linear(
        f: impl Fn(f64, f64, f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64, f64, f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
        r: impl Fn(f64, f64, f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            structure: NoiseStructure::LinearInState,
            ..Self::general(f, g, r)
        }
    }

    /// Check a linear declaration by sampling the rectangle `[a, b] x [c, d]`.
    pub fn verify_linear(&self, (a, b): (f64, f64), (c, d): (f64, f64)) -> Result<()> {
        if self.structure != NoiseStructure::LinearInState {
            return Ok(());
        }
        let positions: Vec<Vec<f64>> = (0..16)
            .map(|i| {
                let (s, t) = ((i % 4) as f64 + 0.37, (i / 4) as f64 + 0.61);
                vec![a + (b - a) * s / 4.0, c + (d - c) * t / 4.0]
            })
            .collect();
        for (name, q) in [("f", &self.f), ("g", &self.g), ("r", &self.r)] {
            noise::check_linear_sampled(name, &positions, 3, &|p, t, s| q(p[0], p[1], t, s[0], s[1], s[2]))?;
        }
        Ok(())
    }

    /// Matrix `B` with `b(X) = B X` for stacked `[E; S; T]`.
    pub fn linear_operator(&self, mesh: &TensorMesh2D, basis: &Basis) -> Result<Arc<dyn LinearOperator>> {
        if self.structure != NoiseStructure::LinearInState {
            return Err(Error::UnsupportedScheme(
                "general noise has no linear diffusion operator".into(),
            ));
        }
        self.verify_linear(mesh.mesh_x.domain(), mesh.mesh_y.domain())?;
        let (weights, table, points) = tensor_rule(basis);
        let coupling = |x: f64, y: f64| -> [[f64; 3]; 3] {
            let unit = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
            let mut m = [[0.0; 3]; 3];
            for (i, q) in [&self.f, &self.g, &self.r].into_iter().enumerate() {
                for (j, u) in unit.iter().enumerate() {
                    m[i][j] = q(x, y, 0.0, u[0], u[1], u[2]);
                }
            }
            m
        };
        let nodes: Vec<Vec<[[f64; 3]; 3]>> = (0..mesh.nx())
            .flat_map(|i| (0..mesh.ny()).map(move |j| (i, j)))
            .map(|(i, j)| {
                points
                    .iter()
                    .map(|&(xi, eta)| coupling(mesh.mesh_x.to_physical(i, xi), mesh.mesh_y.to_physical(j, eta)))
                    .collect()
            })
            .collect();
        let nm = basis.n_modes();
        Ok(noise::block_diagonal_operator::<3>(
            mesh.n_cells(),
            nm * nm,
            &weights,
            &table,
            |cell, q| nodes[cell][q],
        ))
    }
}

/// (k+2)^2 tensor Gauss rule on the reference square: weights, basis table
/// `table[q][lx * nm + ly]` and reference points.
fn tensor_rule(basis: &Basis) -> (Vec<f64>, Vec<Vec<f64>>, Vec<(f64, f64)>) {
    let quad = basis.projection_quadrature();
    let t1 = basis.tabulate(&quad.nodes);
    let nm = basis.n_modes();
    let mut weights = Vec::new();
    let mut table = Vec::new();
    let mut points = Vec::new();
    for (qx, (&xi, &wx)) in quad.nodes.iter().zip(&quad.weights).enumerate() {
        for (qy, (&eta, &wy)) in quad.nodes.iter().zip(&quad.weights).enumerate() {
            weights.push(wx * wy);
            points.push((xi, eta));
            table.push((0..nm * nm).map(|m| t1[qx][m / nm] * t1[qy][m % nm]).collect());
        }
    }
    (weights, table, points)
}

/// Projected diffusion coefficients `(P f, P g, P r)` at the state time.
pub fn assemble_noise_2d(
    state: &State2D,
    mesh: &TensorMesh2D,
    basis: &Basis,
    noise: &NoiseSpec2D,
) -> Result<(FieldCoeffs, FieldCoeffs, FieldCoeffs)> {
    check_state(state, mesh, basis)?;
    let (weights, table, points) = tensor_rule(basis);
    let nm2 = basis.n_modes().pow(2);
    let nc = mesh.n_cells();
    let mut out = [
        FieldCoeffs::zeros(nc, nm2),
        FieldCoeffs::zeros(nc, nm2),
        FieldCoeffs::zeros(nc, nm2),
    ];
    for i in 0..mesh.nx() {
        for j in 0..mesh.ny() {
            let c = mesh.cell_index(i, j);
            let s = (4.0 / (mesh.mesh_x.width(i) * mesh.mesh_y.width(j))).sqrt();
            let fields = [state.e.cell(c), state.s.cell(c), state.t.cell(c)];
            for (q, &(xi, eta)) in points.iter().enumerate() {
                let vals: Vec<f64> = fields
                    .iter()
                    .map(|f| s * (0..nm2).map(|l| f[l] * table[q][l]).sum::<f64>())
                    .collect();
                let (x, y) = (mesh.mesh_x.to_physical(i, xi), mesh.mesh_y.to_physical(j, eta));
                for (o, fun) in out.iter_mut().zip([&noise.f, &noise.g, &noise.r]) {
                    let v = weights[q] * fun(x, y, state.time, vals[0], vals[1], vals[2]) / s;
                    let cell = o.cell_mut(c);
                    for l in 0..nm2 {
                        cell[l] += v * table[q][l];
                    }
                }
            }
        }
    }
    let [pf, pg, pr] = out;
    Ok((pf, pg, pr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::l2_project_2d;
    use crate::mesh::build_mesh_1d;

    fn setup() -> (TensorMesh2D, Basis, State2D) {
        let m = TensorMesh2D::new(build_mesh_1d(0.0, 2.0, 3).unwrap(), build_mesh_1d(-1.0, 1.0, 4).unwrap());
        let basis = Basis::new(2);
        let st = State2D::new(
            l2_project_2d(|x, y| x.sin() * y, &m, &basis),
            l2_project_2d(|x, y| (x + y).cos(), &m, &basis),
            l2_project_2d(|x, _| x * x, &m, &basis),
            0.1,
        )
        .unwrap();
        (m, basis, st)
    }

    #[test]
    fn unit_coupling_is_identity() {
        let (m, basis, st) = setup();
        let (pf, pg, pr) = assemble_noise_2d(&st, &m, &basis, &NoiseSpec2D::unit_coupling()).unwrap();
        assert!(pf.max_abs_diff(&st.e) < 1e-13);
        assert!(pg.max_abs_diff(&st.s) < 1e-13);
        assert!(pr.max_abs_diff(&st.t) < 1e-13);
        let b = NoiseSpec2D::unit_coupling().linear_operator(&m, &basis).unwrap();
        let x = st.to_vector();
        assert_eq!(b.apply_vec(&x), x);
    }

    #[test]
    fn variable_operator_matches_assembly() {
        let (m, basis, st) = setup();
        let noise = NoiseSpec2D::linear(|x, y| [[1.0, x, 0.0], [0.0, 2.0, y * y], [0.5, 0.0, 1.0 + x * y]]);
        let b = noise.linear_operator(&m, &basis).unwrap();
        let (pf, pg, pr) = assemble_noise_2d(&st, &m, &basis, &noise).unwrap();
        let want: Vec<f64> = [pf, pg, pr].into_iter().flat_map(|f| f.into_vec()).collect();
        for (g, w) in b.apply_vec(&st.to_vector()).iter().zip(&want) {
            assert!((g - w).abs() < 1e-13);
        }
    }

    #[test]
    fn nonlinear_declaration_rejected() {
        let (m, basis, _) = setup();
        let bad = NoiseSpec2D::declared_linear(|_, _, _, e, _, _| e * e, |_, _, _, _, s, _| s, |_, _, _, _, _, t| t);
        assert!(bad.linear_operator(&m, &basis).is_err());
        let general = NoiseSpec2D::general(|_, _, _, e, _, _| e, |_, _, _, _, s, _| s, |_, _, _, _, _, t| t);
        assert!(matches!(general.linear_operator(&m, &basis), Err(Error::UnsupportedScheme(_))));
    }
}
