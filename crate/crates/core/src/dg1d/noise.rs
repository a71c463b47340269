use std::fmt;
use std::sync::Arc;

use super::State1D;
use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::field::FieldCoeffs;
use crate::mesh::Mesh1D;
use crate::noise::{self, NoiseStructure};
use crate::sparse::LinearOperator;

/// Noise coefficient `(x, t, u, v) -> value`.
pub type NoiseFn1D = Arc<dyn Fn(f64, f64, f64, f64) -> f64 + Send + Sync>;

/// Multiplicative noise `f` (driving `v`) and `g` (driving `u`).
#[derive(Clone)]
pub struct NoiseSpec1D {
    pub f: NoiseFn1D,
    pub g: NoiseFn1D,
    pub structure: NoiseStructure,
}

impl fmt::Debug for NoiseSpec1D {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("NoiseSpec1D")
            .field("structure", &self.structure)
            .finish_non_exhaustive()
    }
}

impl NoiseSpec1D {
    pub fn zero() -> Self {
        Self::linear(|_| [[0.0, 0.0], [0.0, 0.0]])
    }

    /// `f = v`, `g = u`.
    pub fn unit_coupling() -> Self {
        Self::linear(|_| [[0.0, 1.0], [1.0, 0.0]])
    }

    /// `f = c[0][0](x) u + c[0][1](x) v`, `g = c[1][0](x) u + c[1][1](x) v`.
    pub fn linear(coeffs: impl Fn(f64) -> [[f64; 2]; 2] + Send + Sync + 'static) -> Self {
        let c = Arc::new(coeffs);
        let c2 = c.clone();
        Self {
            f: Arc::new(move |x, _, u, v| {
                let m = c(x);
                m[0][0] * u + m[0][1] * v
            }),
            g: Arc::new(move |x, _, u, v| {
                let m = c2(x);
                m[1][0] * u + m[1][1] * v
            }),
            structure: NoiseStructure::LinearInState,
        }
    }

    pub fn general(
        f: impl Fn(f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            f: Arc::new(f),
            g: Arc::new(g),
            structure: NoiseStructure::General,
        }
    }

    /// Closures tagged as linear even though nothing guarantees it;
    /// call [`NoiseSpec1D::verify_linear`] before trusting the tag.
    pub fn declared_linear(
        f: impl Fn(f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            structure: NoiseStructure::LinearInState,
            ..Self::general(f, g)
        }
    }

    /// Sample f and g on `[a, b]` and check that a linear declaration holds:
    /// no affine offset, additivity, homogeneity and time independence.
    pub fn verify_linear(&self, a: f64, b: f64) -> Result<()> {
        if self.structure != NoiseStructure::LinearInState {
            return Ok(());
        }
        let positions: Vec<Vec<f64>> = (0..16).map(|i| vec![a + (b - a) * (i as f64 + 0.37) / 16.0]).collect();
        for (name, q) in [("f", &self.f), ("g", &self.g)] {
            noise::check_linear_sampled(name, &positions, 2, &|p, t, s| q(p[0], t, s[0], s[1]))?;
        }
        Ok(())
    }

    /// Matrix `B` with `b(X) = B X` for stacked `[u; v]`, i.e. rows of `u`
    /// hold `P(g)` and rows of `v` hold `P(f)`.
    pub fn linear_operator(&self, mesh: &Mesh1D, basis: &Basis) -> Result<Arc<dyn LinearOperator>> {
        if self.structure != NoiseStructure::LinearInState {
            return Err(Error::UnsupportedScheme(
                "general noise has no linear diffusion operator".into(),
            ));
        }
        let (a, b) = mesh.domain();
        self.verify_linear(a, b)?;
        let quad = basis.projection_quadrature();
        let table = basis.tabulate(&quad.nodes);
        let n = mesh.n_cells();
        // coupling[row_field][col_field](x) with fields ordered (u, v)
        let coupling = |x: f64| -> [[f64; 2]; 2] {
            [
                [(self.g)(x, 0.0, 1.0, 0.0), (self.g)(x, 0.0, 0.0, 1.0)],
                [(self.f)(x, 0.0, 1.0, 0.0), (self.f)(x, 0.0, 0.0, 1.0)],
            ]
        };
        let nodes: Vec<Vec<f64>> = (0..n)
            .map(|j| quad.nodes.iter().map(|&xi| mesh.to_physical(j, xi)).collect())
            .collect();
        Ok(noise::block_diagonal_operator::<2>(
            n,
            basis.n_modes(),
            &quad.weights,
            &table,
            |cell, q| coupling(nodes[cell][q]),
        ))
    }
}

/// Diffusion coefficient `(P(g(u_h, v_h)), P(f(u_h, v_h)))` at time `t`,
/// evaluated at (k+2)-point quadrature nodes and projected.
pub fn assemble_noise_1d(
    state: &State1D,
    mesh: &Mesh1D,
    basis: &Basis,
    noise: &NoiseSpec1D,
) -> Result<(FieldCoeffs, FieldCoeffs)> {
    let nm = basis.n_modes();
    if state.u.n_cells() != mesh.n_cells() || state.u.n_modes() != nm || !state.u.same_shape(&state.v) {
        return Err(Error::Structural("state does not match mesh/basis".into()));
    }
    let quad = basis.projection_quadrature();
    let table = basis.tabulate(&quad.nodes);
    let mut gu = FieldCoeffs::zeros(mesh.n_cells(), nm);
    let mut fv = FieldCoeffs::zeros(mesh.n_cells(), nm);
    for j in 0..mesh.n_cells() {
        let s = (2.0 / mesh.width(j)).sqrt();
        let (uc, vc) = (state.u.cell(j), state.v.cell(j));
        let mut pg = vec![0.0; nm];
        let mut pf = vec![0.0; nm];
        for (q, (&xi, &w)) in quad.nodes.iter().zip(&quad.weights).enumerate() {
            let uq = s * (0..nm).map(|l| uc[l] * table[q][l]).sum::<f64>();
            let vq = s * (0..nm).map(|l| vc[l] * table[q][l]).sum::<f64>();
            let x = mesh.to_physical(j, xi);
            let fq = (noise.f)(x, state.t, uq, vq);
            let gq = (noise.g)(x, state.t, uq, vq);
            // (h/2) * sqrt(2/h) = 1/s
            for l in 0..nm {
                pf[l] += w * fq * table[q][l] / s;
                pg[l] += w * gq * table[q][l] / s;
            }
        }
        gu.cell_mut(j).copy_from_slice(&pg);
        fv.cell_mut(j).copy_from_slice(&pf);
    }
    Ok((gu, fv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::l2_project;
    use crate::mesh::build_mesh_1d;

    use std::f64::consts::PI;

    fn smooth_state(mesh: &Mesh1D, basis: &Basis) -> State1D {
        State1D::new(
            l2_project(|x| x.sin() + 0.3, mesh, basis),
            l2_project(|x| (2.0 * x).cos(), mesh, basis),
            0.25,
        )
        .unwrap()
    }

    #[test]
    fn unit_coupling_swaps_blocks() {
        let mesh = build_mesh_1d(0.0, 2.0 * PI, 6).unwrap();
        let basis = Basis::new(2);
        let st = smooth_state(&mesh, &basis);
        let (gu, fv) = assemble_noise_1d(&st, &mesh, &basis, &NoiseSpec1D::unit_coupling()).unwrap();
        assert!(gu.max_abs_diff(&st.u) < 1e-13);
        assert!(fv.max_abs_diff(&st.v) < 1e-13);
        let b = NoiseSpec1D::unit_coupling().linear_operator(&mesh, &basis).unwrap();
        let x = st.to_vector();
        assert_eq!(b.apply_vec(&x), x);
    }

    #[test]
    fn zero_noise_gives_zero() {
        let mesh = build_mesh_1d(0.0, 1.0, 3).unwrap();
        let basis = Basis::new(1);
        let st = smooth_state(&mesh, &basis);
        let (gu, fv) = assemble_noise_1d(&st, &mesh, &basis, &NoiseSpec1D::zero()).unwrap();
        assert_eq!(gu.norm_sq() + fv.norm_sq(), 0.0);
    }

    #[test]
    fn space_only_noise_is_direct_projection() {
        let mesh = build_mesh_1d(0.0, 2.0, 5).unwrap();
        let basis = Basis::new(2);
        let st = smooth_state(&mesh, &basis);
        let noise = NoiseSpec1D::general(|x, _, _, _| x * x, |x, _, _, _| (3.0 * x).sin());
        let (gu, fv) = assemble_noise_1d(&st, &mesh, &basis, &noise).unwrap();
        assert!(fv.max_abs_diff(&l2_project(|x| x * x, &mesh, &basis)) < 1e-14);
        assert!(gu.max_abs_diff(&l2_project(|x| (3.0 * x).sin(), &mesh, &basis)) < 1e-14);
    }

    #[test]
    fn variable_linear_operator_matches_assembly() {
        let mesh = build_mesh_1d(0.0, 2.0 * PI, 5).unwrap();
        let basis = Basis::new(2);
        let noise = NoiseSpec1D::linear(|x| [[x.cos(), 0.5], [1.0, 2.0 + x.sin()]]);
        let st = smooth_state(&mesh, &basis);
        let b = noise.linear_operator(&mesh, &basis).unwrap();
        let (gu, fv) = assemble_noise_1d(&st, &mesh, &basis, &noise).unwrap();
        let mut want = gu.into_vec();
        want.extend(fv.into_vec());
        let got = b.apply_vec(&st.to_vector());
        for (a, w) in got.iter().zip(&want) {
            assert!((a - w).abs() < 1e-13);
        }
    }

    #[test]
    fn false_linear_declaration_detected() {
        let affine = NoiseSpec1D::declared_linear(|_, _, _, v| v + 1.0, |_, _, u, _| u);
        assert!(affine.verify_linear(0.0, 1.0).is_err());
        let quadratic = NoiseSpec1D::declared_linear(|_, _, _, v| v * v, |_, _, u, _| u);
        assert!(quadratic.verify_linear(0.0, 1.0).is_err());
        let timed = NoiseSpec1D::declared_linear(|_, t, _, v| (1.0 + t) * v, |_, _, u, _| u);
        assert!(timed.verify_linear(0.0, 1.0).is_err());
        assert!(NoiseSpec1D::unit_coupling().verify_linear(0.0, 1.0).is_ok());
        let mesh = build_mesh_1d(0.0, 1.0, 2).unwrap();
        assert!(NoiseSpec1D::general(|_, _, _, v| v, |_, _, u, _| u)
            .linear_operator(&mesh, &Basis::new(1))
            .is_err());
    }
}
