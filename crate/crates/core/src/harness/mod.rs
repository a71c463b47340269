//! Monte Carlo driver: per-sample simulation along a seeded Brownian path,
//! exact-solution errors with the realized `W_T`, RMS aggregation,
//! convergence ladders and averaged energy histories.
//!
//! Sample `i` draws its increments from ChaCha8 seeded with the root seed
//! on stream `i`, so results do not depend on scheduling.

mod config;
mod problem;
mod report;

pub use config::{Dimension, ExperimentConfig, InitKind, NoiseKind, ProblemKind};
pub use problem::{Exact1D, Exact2D, Problem1D, Problem2D};
pub use report::{
    convergence_study, energy_history, ladder, ConvergenceReport, EnergyReport, Level, LevelResult,
};
pub(crate) use report::{header_line as report_header, sci};

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::Basis;
use crate::dg1d::{
    assemble_noise_1d, drift_matrix_1d, l2_error_1d, FluxParams1D, GlobalProjectionPair1D, State1D,
};
use crate::dg2d::{
    assemble_noise_2d, drift_matrix_2d, l2_error_2d, FluxParams2D, State2D, TensorProjection2D,
};
use crate::error::{Error, Result};
use crate::field::{l2_project, l2_project_2d};
use crate::mesh::{build_mesh_1d, Mesh1D, TensorMesh2D};
use crate::noise::NoiseStructure;
use crate::sde::{integrate_observed, sample_increments, sample_rng, Diffusion, PathIncrements, SDESystem};

/// Source of the Gaussian draws of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Draws {
    Random,
    /// Every draw forced to zero, so `W_t = 0`.
    Zero,
}

#[derive(Debug)]
enum Setup {
    One {
        mesh: Mesh1D,
        basis: Basis,
        problem: Problem1D,
    },
    Two {
        mesh: TensorMesh2D,
        basis: Basis,
        problem: Problem2D,
    },
}

/// Operators, initial state and error evaluation for one configuration.
#[derive(Debug)]
pub struct Experiment {
    config: ExperimentConfig,
    setup: Setup,
    sys: SDESystem,
    x0: Vec<f64>,
    notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleResult {
    pub index: usize,
    /// L2 error per field at the final time.
    pub errors: Vec<f64>,
    /// Discrete energy at every step, starting at t = 0.
    pub energy: Vec<f64>,
    pub w_final: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloResult {
    pub fields: Vec<&'static str>,
    pub rms: Vec<f64>,
    /// Bootstrap standard error of each RMS value.
    pub rms_se: Vec<f64>,
    pub times: Vec<f64>,
    pub mean_energy: Vec<f64>,
    pub reference: Option<Vec<f64>>,
    pub samples: usize,
    pub seed: u64,
    /// Squared errors per sample and field, ordered by sample index.
    pub squared_errors: Vec<Vec<f64>>,
}

const BOOTSTRAP_RESAMPLES: usize = 200;

impl Experiment {
    /// Build the named problem of the configuration.
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        match (config.dimension, config.problem) {
            (Dimension::One, ProblemKind::Manufactured) => {
                Self::with_problem_1d(config, Problem1D::manufactured(config.noise))
            }
            (Dimension::Two, ProblemKind::Manufactured) => {
                Self::with_problem_2d(config, Problem2D::manufactured(config.noise))
            }
        }
    }

    pub fn with_problem_1d(config: &ExperimentConfig, problem: Problem1D) -> Result<Self> {
        config.validate()?;
        if config.dimension != Dimension::One {
            return Err(Error::Config("1D problem given for a 2D configuration".into()));
        }
        let mesh = build_mesh_1d(problem.domain.0, problem.domain.1, config.nx)?;
        let basis = Basis::new(config.degree);
        let flux = FluxParams1D::new(config.alpha, config.beta1, config.beta2)?;
        let drift = Arc::new(drift_matrix_1d(&mesh, &basis, &flux));
        let diffusion = match problem.noise.structure {
            NoiseStructure::LinearInState => Diffusion::Linear(problem.noise.linear_operator(&mesh, &basis)?),
            NoiseStructure::General => {
                let (mesh, basis, noise) = (mesh.clone(), basis.clone(), problem.noise.clone());
                let n = mesh.n_cells();
                Diffusion::General(Arc::new(move |x: &[f64], t: f64, out: &mut [f64]| {
                    let st = State1D::from_vector(n, basis.n_modes(), x, t).expect("state length checked by stepper");
                    let (gu, fv) = assemble_noise_1d(&st, &mesh, &basis, &noise).expect("shapes match");
                    let half = out.len() / 2;
                    out[..half].copy_from_slice(gu.as_slice());
                    out[half..].copy_from_slice(fv.as_slice());
                }))
            }
        };
        let sys = SDESystem::new(drift, diffusion)?;
        let ex = problem.exact.clone();
        let u0 = |x: f64| ex(x, 0.0, 0.0)[0];
        let v0 = |x: f64| ex(x, 0.0, 0.0)[1];
        let (u, v) = match config.init {
            InitKind::Projection => GlobalProjectionPair1D::new(&mesh, &basis, &flux)?.project(&u0, &v0),
            InitKind::L2 => (l2_project(u0, &mesh, &basis), l2_project(v0, &mesh, &basis)),
        };
        let x0 = State1D::new(u, v, 0.0)?.to_vector();
        Ok(Self {
            config: config.resolved(),
            setup: Setup::One { mesh, basis, problem },
            sys,
            x0,
            notes: Vec::new(),
        })
    }

    pub fn with_problem_2d(config: &ExperimentConfig, problem: Problem2D) -> Result<Self> {
        config.validate()?;
        if config.dimension != Dimension::Two {
            return Err(Error::Config("2D problem given for a 1D configuration".into()));
        }
        let mesh = TensorMesh2D::new(
            build_mesh_1d(problem.domain_x.0, problem.domain_x.1, config.nx)?,
            build_mesh_1d(problem.domain_y.0, problem.domain_y.1, config.ny())?,
        );
        let basis = Basis::new(config.degree);
        let flux = FluxParams2D::new(config.alpha1, config.alpha2)?;
        let drift = Arc::new(drift_matrix_2d(&mesh, &basis, &flux));
        let diffusion = match problem.noise.structure {
            NoiseStructure::LinearInState => Diffusion::Linear(problem.noise.linear_operator(&mesh, &basis)?),
            NoiseStructure::General => {
                let (mesh, basis, noise) = (mesh.clone(), basis.clone(), problem.noise.clone());
                Diffusion::General(Arc::new(move |x: &[f64], t: f64, out: &mut [f64]| {
                    let nm2 = basis.n_modes().pow(2);
                    let st = State2D::from_vector(mesh.n_cells(), nm2, x, t).expect("state length checked by stepper");
                    let (pf, pg, pr) = assemble_noise_2d(&st, &mesh, &basis, &noise).expect("shapes match");
                    let n = out.len() / 3;
                    out[..n].copy_from_slice(pf.as_slice());
                    out[n..2 * n].copy_from_slice(pg.as_slice());
                    out[2 * n..].copy_from_slice(pr.as_slice());
                }))
            }
        };
        let sys = SDESystem::new(drift, diffusion)?;
        let ex = problem.exact.clone();
        let field = |i: usize| {
            let ex = ex.clone();
            move |x: f64, y: f64| ex(x, y, 0.0, 0.0)[i]
        };
        let mut notes = Vec::new();
        let (e, s, t) = match config.init {
            InitKind::Projection => {
                let ([pe, ps, pt], note) = TensorProjection2D::initial_set(&mesh, &basis, &flux)?;
                notes.extend(note);
                (pe.project(&field(0)), ps.project(&field(1)), pt.project(&field(2)))
            }
            InitKind::L2 => (
                l2_project_2d(field(0), &mesh, &basis),
                l2_project_2d(field(1), &mesh, &basis),
                l2_project_2d(field(2), &mesh, &basis),
            ),
        };
        let x0 = State2D::new(e, s, t, 0.0)?.to_vector();
        Ok(Self {
            config: config.resolved(),
            setup: Setup::Two { mesh, basis, problem },
            sys,
            x0,
            notes,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn system(&self) -> &SDESystem {
        &self.sys
    }

    pub fn initial_state(&self) -> &[f64] {
        &self.x0
    }

    /// Diagnostics such as projection fallbacks.
    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn fields(&self) -> Vec<&'static str> {
        match self.setup {
            Setup::One { .. } => vec!["u", "v"],
            Setup::Two { .. } => vec!["E", "S", "T"],
        }
    }

    pub fn tau(&self) -> f64 {
        self.config.t_final() / self.config.nt as f64
    }

    /// Recording times `t_0 = 0, ..., t_N = T`.
    pub fn times(&self) -> Vec<f64> {
        (0..=self.config.nt).map(|n| n as f64 * self.tau()).collect()
    }

    fn energy_rate(&self) -> Option<f64> {
        match &self.setup {
            Setup::One { problem, .. } => problem.energy_rate,
            Setup::Two { problem, .. } => problem.energy_rate,
        }
    }

    /// `M(0) exp(rate t)` at the recording times, when the problem has one.
    pub fn energy_reference(&self) -> Option<Vec<f64>> {
        let m0: f64 = self.x0.iter().map(|v| v * v).sum();
        self.energy_rate()
            .map(|r| self.times().iter().map(|t| m0 * (r * t).exp()).collect())
    }

    /// L2 errors per field of the stacked state `x` against the exact
    /// solution at time `t` with Brownian value `w`.
    pub fn errors(&self, x: &[f64], t: f64, w: f64) -> Result<Vec<f64>> {
        match &self.setup {
            Setup::One { mesh, basis, problem } => {
                let st = State1D::from_vector(mesh.n_cells(), basis.n_modes(), x, t)?;
                let ex = &problem.exact;
                let (eu, ev) = l2_error_1d(&st, mesh, basis, &|x| ex(x, t, w)[0], &|x| ex(x, t, w)[1])?;
                Ok(vec![eu, ev])
            }
            Setup::Two { mesh, basis, problem } => {
                let st = State2D::from_vector(mesh.n_cells(), basis.n_modes().pow(2), x, t)?;
                let ex = &problem.exact;
                let (ee, es, et) = l2_error_2d(
                    &st,
                    mesh,
                    basis,
                    &|x, y| ex(x, y, t, w)[0],
                    &|x, y| ex(x, y, t, w)[1],
                    &|x, y| ex(x, y, t, w)[2],
                )?;
                Ok(vec![ee, es, et])
            }
        }
    }

    /// Integrate one sample and return its final state alongside the result.
    pub fn simulate(&self, index: usize, draws: Draws) -> Result<(Vec<f64>, SampleResult)> {
        let (tau, m) = (self.tau(), self.config.substeps);
        let mut rng = sample_rng(self.config.seed, index as u64);
        let incs = (0..self.config.nt).map(|_| -> Result<PathIncrements> {
            match draws {
                Draws::Random => sample_increments(tau, m, &mut rng),
                Draws::Zero => PathIncrements::zero(tau, m),
            }
        });
        let incs = incs.collect::<Result<Vec<_>>>()?;
        let mut energy = Vec::with_capacity(self.config.nt + 1);
        energy.push(self.x0.iter().map(|v| v * v).sum());
        let (x, w) = integrate_observed(&self.x0, &self.sys, self.config.scheme, incs, |_, _, x, _| {
            energy.push(x.iter().map(|v| v * v).sum());
        })
        .map_err(|e| e.with_sample(index, self.config.seed))?;
        let errors = self.errors(&x, self.config.t_final(), w)?;
        Ok((
            x,
            SampleResult {
                index,
                errors,
                energy,
                w_final: w,
            },
        ))
    }

    pub fn run_sample(&self, index: usize) -> Result<SampleResult> {
        Ok(self.simulate(index, Draws::Random)?.1)
    }

    /// Run every sample (in parallel) and reduce in sample order.
    pub fn monte_carlo(&self) -> Result<MonteCarloResult> {
        let n = self.config.samples();
        let results: Vec<SampleResult> = (0..n)
            .into_par_iter()
            .map(|i| self.run_sample(i))
            .collect::<Result<_>>()?;
        Ok(self.aggregate(&results))
    }

    /// Reduce per-sample results, ordered by index, into RMS values and the
    /// mean energy history.
    pub fn aggregate(&self, results: &[SampleResult]) -> MonteCarloResult {
        let n = results.len();
        let n_fields = self.fields().len();
        let squared: Vec<Vec<f64>> = results
            .iter()
            .map(|r| r.errors.iter().map(|e| e * e).collect())
            .collect();
        let rms: Vec<f64> = (0..n_fields)
            .map(|f| (squared.iter().map(|s| s[f]).sum::<f64>() / n as f64).sqrt())
            .collect();
        let rms_se = bootstrap_rms_se(&squared, n_fields, self.config.seed);
        let steps = self.config.nt + 1;
        let mean_energy = (0..steps)
            .map(|k| results.iter().map(|r| r.energy[k]).sum::<f64>() / n as f64)
            .collect();
        MonteCarloResult {
            fields: self.fields(),
            rms,
            rms_se,
            times: self.times(),
            mean_energy,
            reference: self.energy_reference(),
            samples: n,
            seed: self.config.seed,
            squared_errors: squared,
        }
    }
}

/// Standard deviation of the RMS over bootstrap resamples of the samples.
fn bootstrap_rms_se(squared: &[Vec<f64>], n_fields: usize, seed: u64) -> Vec<f64> {
    let n = squared.len();
    if n < 2 {
        return vec![0.0; n_fields];
    }
    let mut rng = sample_rng(seed, u64::MAX);
    let mut stats = vec![Vec::with_capacity(BOOTSTRAP_RESAMPLES); n_fields];
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let mut acc = vec![0.0; n_fields];
        for _ in 0..n {
            let s = &squared[rng.random_range(0..n)];
            for f in 0..n_fields {
                acc[f] += s[f];
            }
        }
        for f in 0..n_fields {
            stats[f].push((acc[f] / n as f64).sqrt());
        }
    }
    stats
        .iter()
        .map(|v| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
        })
        .collect()
}

/// Build the configured experiment and run one sample.
pub fn run_sample(config: &ExperimentConfig, index: usize) -> Result<SampleResult> {
    Experiment::new(config)?.run_sample(index)
}

pub fn monte_carlo(config: &ExperimentConfig) -> Result<MonteCarloResult> {
    Experiment::new(config)?.monte_carlo()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_1d() -> ExperimentConfig {
        ExperimentConfig {
            nx: 10,
            nt: 20,
            samples: Some(6),
            substeps: 10,
            ..Default::default()
        }
    }

    #[test]
    fn one_sample_rms_is_its_error() {
        let cfg = ExperimentConfig { samples: Some(1), ..small_1d() };
        let exp = Experiment::new(&cfg).unwrap();
        let mc = exp.monte_carlo().unwrap();
        let s = exp.run_sample(0).unwrap();
        assert_eq!(mc.rms, s.errors);
        assert_eq!(mc.mean_energy, s.energy);
    }

    #[test]
    fn zero_draws_match_deterministic_run() {
        // with W = 0 the noisy solution is the deterministic one times
        // exp(-t/2); the discrete runs differ only by time-stepping error
        let diff = |nt: usize| {
            let cfg = ExperimentConfig { nt, ..small_1d() };
            let exp = Experiment::new(&cfg).unwrap();
            let det = Experiment::new(&ExperimentConfig { noise: NoiseKind::None, ..cfg }).unwrap();
            let (x, r) = exp.simulate(0, Draws::Zero).unwrap();
            let (y, _) = det.simulate(0, Draws::Random).unwrap();
            assert_eq!(r.w_final, 0.0);
            let f = (-0.25f64).exp();
            x.iter().zip(&y).map(|(a, b)| (a - f * b).abs()).fold(0.0, f64::max)
        };
        let (d1, d2) = (diff(20), diff(40));
        assert!(d1 < 1e-3);
        assert!(d1 / d2 > 3.5, "{d1} {d2}");
    }

    #[test]
    fn partition_identity_for_rms() {
        let exp = Experiment::new(&small_1d()).unwrap();
        let all: Vec<SampleResult> = (0..6).map(|i| exp.run_sample(i).unwrap()).collect();
        let whole = exp.aggregate(&all).rms;
        let a = exp.aggregate(&all[..2]).rms;
        let b = exp.aggregate(&all[2..]).rms;
        for f in 0..2 {
            let q = ((2.0 * a[f] * a[f] + 4.0 * b[f] * b[f]) / 6.0).sqrt();
            assert!((q - whole[f]).abs() < 1e-14);
        }
    }

    #[test]
    fn energy_is_finite_and_positive() {
        let exp = Experiment::new(&small_1d()).unwrap();
        let mc = exp.monte_carlo().unwrap();
        assert_eq!(mc.mean_energy.len(), 21);
        assert!(mc.mean_energy.iter().all(|e| e.is_finite() && *e > 0.0));
        assert_eq!(mc.reference.as_ref().unwrap()[0], mc.mean_energy[0]);
        assert!(mc.rms_se.iter().all(|s| *s > 0.0));
    }

    #[test]
    fn two_d_zero_alpha_falls_back_with_note() {
        let cfg = ExperimentConfig {
            dimension: Dimension::Two,
            nx: 4,
            nt: 2,
            alpha1: 0.0,
            samples: Some(1),
            ..Default::default()
        };
        let exp = Experiment::new(&cfg).unwrap();
        assert_eq!(exp.notes().len(), 1);
        assert!(exp.run_sample(0).unwrap().errors.iter().all(|e| e.is_finite()));
    }

    #[test]
    fn general_noise_requires_euler() {
        let mut p = Problem1D::manufactured(NoiseKind::Multiplicative);
        p.noise = crate::dg1d::NoiseSpec1D::general(|_, _, _, v| v.sin(), |_, _, u, _| u);
        let cfg = small_1d();
        let exp = Experiment::with_problem_1d(&cfg, p.clone()).unwrap();
        assert!(matches!(exp.run_sample(0), Err(Error::UnsupportedScheme(_))));
        let cfg = ExperimentConfig { scheme: crate::sde::Scheme::EulerMaruyama, ..small_1d() };
        let exp = Experiment::with_problem_1d(&cfg, p).unwrap();
        assert!(exp.run_sample(0).is_ok());
    }
}
