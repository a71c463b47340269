//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use smdg::basis::Basis;
use smdg::dg1d::{
    assemble_drift_1d, drift_matrix_1d, global_projection_pair_1d, interface_residuals_1d, FluxParams1D,
    NoiseSpec1D, RadauProjection1D, State1D,
};
use smdg::dg2d::{
    radau_projection_2d, superconvergence_functional, NoiseSpec2D, RadauVariant,
};
use smdg::field::{eval_cell_1d, eval_cell_2d, l2_project, l2_project_2d, FieldCoeffs};
use smdg::harness::{
    convergence_study, ladder, Dimension, Draws, Experiment, ExperimentConfig, InitKind, NoiseKind, Problem1D,
    Problem2D,
};
use smdg::mesh::{build_mesh_1d, Mesh1D, TensorMesh2D};
use smdg::quadrature::gauss_quadrature;
use smdg::sparse::LinearOperator;
use smdg::sde::{gbm_strong_order, sample_increments, sample_rng, GbmProblem, Scheme};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rates_within(rates: &[Vec<f64>], lo: f64, hi: f64) -> bool {
    rates.iter().flatten().all(|r| (lo..=hi).contains(r))
}

fn fmt_rates(fields: &[&str], rates: &[Vec<f64>]) -> String {
    fields
        .iter()
        .enumerate()
        .map(|(f, name)| {
            let r: Vec<String> = rates.iter().map(|lvl| format!("{:.3}", lvl[f])).collect();
            format!("{name} [{}]", r.join(", "))
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn slope(hs: &[f64], es: &[f64]) -> f64 {
    let n = hs.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = hs.iter().zip(es).map(|(h, e)| (h.ln(), e.ln())).unzip();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

fn l2_err_1d(p: &FieldCoeffs, mesh: &Mesh1D, f: &dyn Fn(f64) -> f64, k: usize) -> f64 {
    let q = gauss_quadrature(k + 4);
    let mut acc = 0.0;
    for j in 0..mesh.n_cells() {
        for (&xi, &w) in q.nodes.iter().zip(&q.weights) {
            let d = eval_cell_1d(p, mesh, j, xi) - f(mesh.to_physical(j, xi));
            acc += 0.5 * mesh.width(j) * w * d * d;
        }
    }
    acc.sqrt()
}

fn l2_err_2d(p: &FieldCoeffs, mesh: &TensorMesh2D, f: &dyn Fn(f64, f64) -> f64, k: usize) -> f64 {
    let q = gauss_quadrature(k + 3);
    let mut acc = 0.0;
    for i in 0..mesh.nx() {
        for j in 0..mesh.ny() {
            let area = 0.25 * mesh.mesh_x.width(i) * mesh.mesh_y.width(j);
            for (&xi, &wx) in q.nodes.iter().zip(&q.weights) {
                for (&eta, &wy) in q.nodes.iter().zip(&q.weights) {
                    let x = mesh.mesh_x.to_physical(i, xi);
                    let y = mesh.mesh_y.to_physical(j, eta);
                    let d = eval_cell_2d(p, mesh, i, j, xi, eta) - f(x, y);
                    acc += area * wx * wy * d * d;
                }
            }
        }
    }
    acc.sqrt()
}

fn square(n: usize) -> TensorMesh2D {
    TensorMesh2D::new(build_mesh_1d(0.0, 2.0 * PI, n).unwrap(), build_mesh_1d(0.0, 2.0 * PI, n).unwrap())
}

fn convergence_1d(degree: usize, lo: f64, hi: f64, published: Option<[[f64; 3]; 2]>) -> Outcome {
    let cfg = ExperimentConfig {
        nx: 20,
        nt: 200,
        degree,
        samples: Some(200),
        ..Default::default()
    };
    let rep = convergence_study(&cfg, &ladder(&cfg)).unwrap();
    let mut pass = rates_within(&rep.rates, lo, hi);
    let mut detail = format!("rates {}", fmt_rates(&rep.fields, &rep.rates));
    if let Some(published) = published {
        let mut worst: f64 = 1.0;
        for (l, lvl) in rep.levels.iter().enumerate() {
            for f in 0..2 {
                let ratio = lvl.rms[f] / published[f][l];
                worst = worst.max(ratio.max(1.0 / ratio));
            }
        }
        pass &= worst <= 2.0;
        detail += &format!("; worst magnitude ratio to published errors {worst:.3} (limit 2)");
    }
    outcome(pass, detail)
}

fn criterion_1() -> Outcome {
    convergence_1d(1, 1.7, 2.3, Some([[0.02537, 6.407e-3, 1.567e-3], [7.855e-3, 1.978e-3, 4.837e-4]]))
}

fn criterion_2() -> Outcome {
    convergence_1d(2, 2.6, 3.3, Some([[6.254e-4, 7.970e-5, 9.808e-6], [2.073e-4, 2.383e-5, 3.127e-6]]))
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (degree, lo, hi) in [(1, 1.7, 2.3), (2, 2.6, 3.3)] {
        let cfg = ExperimentConfig {
            dimension: Dimension::Two,
            nx: 20,
            nt: 20,
            degree,
            samples: Some(100),
            ..Default::default()
        };
        let rep = convergence_study(&cfg, &ladder(&cfg)).unwrap();
        pass &= rates_within(&rep.rates, lo, hi);
        detail.push(format!("k={degree}: {}", fmt_rates(&rep.fields, &rep.rates)));
    }
    outcome(pass, detail.join(" | "))
}

fn criterion_4() -> Outcome {
    // The per-sample energy has relative spread near 2.5 at T = 0.5, so the
    // sample count is set by the 5% tolerance rather than the minimum of 500.
    let base = ExperimentConfig {
        nx: 40,
        nt: 200,
        degree: 1,
        samples: Some(40_000),
        ..Default::default()
    };
    let exp = Experiment::new(&base).unwrap();
    let mc = exp.monte_carlo().unwrap();
    let reference = mc.reference.clone().unwrap();
    let dev = mc
        .mean_energy
        .iter()
        .zip(&reference)
        .map(|(m, r)| ((m - r) / r).abs())
        .fold(0.0, f64::max);
    let end_dev = (mc.mean_energy.last().unwrap() / reference.last().unwrap() - 1.0).abs();

    let coupled = |beta: f64| {
        let cfg = ExperimentConfig {
            beta1: beta,
            beta2: beta,
            init: InitKind::L2,
            samples: Some(500),
            ..base.clone()
        };
        Experiment::new(&cfg).unwrap().monte_carlo().unwrap().mean_energy
    };
    let (free, damped) = (coupled(0.0), coupled(0.1));
    let ordered = damped.iter().zip(&free).all(|(d, f)| *d <= *f);
    let gap = damped.last().unwrap() / free.last().unwrap() - 1.0;
    outcome(
        dev <= 0.05 && ordered,
        format!(
            "max relative deviation from M(0)e^t {dev:.4} (at T {end_dev:.4}, limit 0.05, {} samples); beta=0.1 mean energy <= beta=0 at all {} times: {ordered} (relative gap at T {gap:.3e})",
            mc.samples,
            free.len()
        ),
    )
}

fn criterion_5() -> Outcome {
    let cfg = ExperimentConfig {
        nx: 20,
        degree: 1,
        nt: 1000,
        t_final: Some(1.0),
        noise: NoiseKind::None,
        samples: Some(1),
        ..Default::default()
    };
    let exp = Experiment::new(&cfg).unwrap();
    let (_, r) = exp.simulate(0, Draws::Random).unwrap();
    let e0 = r.energy[0];
    let drift = r.energy.iter().map(|e| ((e - e0) / e0).abs()).fold(0.0, f64::max);
    outcome(drift <= 1e-8, format!("max relative energy drift {drift:.3e} over {} steps (limit 1e-8)", cfg.nt))
}

fn criterion_6() -> Outcome {
    let q = |x: f64| (x).sin() + 0.5 * (2.0 * x).cos();
    let r = |x: f64| (3.0 * x).cos() - 0.3 * x.sin();
    let w = |x: f64, y: f64| (x + 2.0 * y).sin() + 0.5 * (x - y).cos();
    let mut pass = true;
    let mut worst_slope = f64::INFINITY;
    let mut worst_slope_at = String::new();
    let mut worst_interface: f64 = 0.0;
    let mut worst_const: f64 = 0.0;
    let mut note_slope = |s: f64, k: usize, what: String| {
        if s - k as f64 - 0.9 < worst_slope - 0.9 {
            worst_slope = s - k as f64;
            worst_slope_at = what;
        }
        s >= k as f64 + 0.9
    };

    let flux_cases = [(0.5, 0.0, 0.0), (-0.3, 0.2, 0.4), (0.25, 1.0, 0.5)];
    for k in 0..=3 {
        let basis = Basis::new(k);
        for &(a, b1, b2) in &flux_cases {
            let flux = FluxParams1D::new(a, b1, b2).unwrap();
            let ns = [40, 80, 160, 320, 640];
            let (mut hs, mut eq, mut er) = (vec![], vec![], vec![]);
            for &n in &ns {
                let mesh = build_mesh_1d(0.0, 2.0 * PI, n).unwrap();
                let (pq, pr) = global_projection_pair_1d(&q, &r, &mesh, &basis, &flux).unwrap();
                hs.push(mesh.h());
                eq.push(l2_err_1d(&pq, &mesh, &q, k));
                er.push(l2_err_1d(&pr, &mesh, &r, k));
                worst_interface = worst_interface.max(interface_residuals_1d(&pq, &pr, &q, &r, &mesh, &basis, &flux));
                let c = 1.7;
                let (cq, cr) = global_projection_pair_1d(&|_| c, &|_| -c, &mesh, &basis, &flux).unwrap();
                let lq = l2_project(|_| c, &mesh, &basis);
                let lr = l2_project(|_| -c, &mesh, &basis);
                worst_const = worst_const.max(cq.max_abs_diff(&lq)).max(cr.max_abs_diff(&lr));
            }
            pass &= note_slope(slope(&hs, &eq), k, format!("1D k={k} flux {a},{b1},{b2} q"));
            pass &= note_slope(slope(&hs, &er), k, format!("1D k={k} flux {a},{b1},{b2} r"));
        }
        // Non-uniform mesh: interface conditions and constants only.
        let edges: Vec<f64> = (0..=12).map(|i| (i as f64 / 12.0 * PI).sin().mul_add(0.3, i as f64 * 0.5)).collect();
        let mesh = Mesh1D::from_edges(edges).unwrap();
        let flux = FluxParams1D::new(0.3, 0.2, 0.1).unwrap();
        let (pq, pr) = global_projection_pair_1d(&q, &r, &mesh, &basis, &flux).unwrap();
        worst_interface = worst_interface.max(interface_residuals_1d(&pq, &pr, &q, &r, &mesh, &basis, &flux));
    }

    let variants = [
        RadauVariant::X { alpha: 0.5 },
        RadauVariant::Y { beta: -0.5 },
        RadauVariant::XY { alpha: -0.5, beta: 0.5 },
        RadauVariant::XY { alpha: 0.3, beta: 0.7 },
    ];
    for k in 0..=2 {
        let basis = Basis::new(k);
        for v in variants {
            let ns = [8, 16, 32, 64, 128];
            let (mut hs, mut es) = (vec![], vec![]);
            for &n in &ns {
                let m = square(n);
                let p = radau_projection_2d(&w, v, &m, &basis).unwrap();
                hs.push(m.h());
                es.push(l2_err_2d(&p, &m, &w, k));
                if n == 8 {
                    let c = radau_projection_2d(&|_, _| 1.7, v, &m, &basis).unwrap();
                    worst_const = worst_const.max(c.max_abs_diff(&l2_project_2d(|_, _| 1.7, &m, &basis)));
                    worst_interface = worst_interface.max(tensor_interface_residual(&p, &m, &basis, v, &w));
                }
            }
            pass &= note_slope(slope(&hs, &es), k, format!("2D k={k} {v:?}"));
        }
    }
    pass &= worst_interface <= 1e-10 && worst_const <= 1e-12;
    outcome(
        pass,
        format!(
            "min slope - k = {worst_slope:.3} ({worst_slope_at}); interface residual {worst_interface:.2e} (limit 1e-10); constant error {worst_const:.2e} (limit 1e-12)"
        ),
    )
}

/// Residual of the x- and y-interface conditions of a tensor projection,
/// each tested against the transverse modes by quadrature. The transverse
/// factor is the L2 or Radau projection of the edge trace.
fn tensor_interface_residual(
    p: &FieldCoeffs,
    m: &TensorMesh2D,
    basis: &Basis,
    v: RadauVariant,
    w: &dyn Fn(f64, f64) -> f64,
) -> f64 {
    let (ax, ay) = match v {
        RadauVariant::X { alpha } => (Some(alpha), None),
        RadauVariant::Y { beta } => (None, Some(beta)),
        RadauVariant::XY { alpha, beta } => (Some(alpha), Some(beta)),
    };
    let nm = basis.n_modes();
    let trace = |edge_vals: &[f64], cell: &[f64], dir_x: bool, other_mode: usize| -> f64 {
        (0..nm)
            .map(|l| {
                let mode = if dir_x { l * nm + other_mode } else { other_mode * nm + l };
                cell[mode] * edge_vals[l]
            })
            .sum()
    };
    let mut worst: f64 = 0.0;
    for (dir_x, alpha, other) in [(true, ax, ay), (false, ay, ax)] {
        let Some(alpha) = alpha else { continue };
        let (along, across) = if dir_x { (&m.mesh_x, &m.mesh_y) } else { (&m.mesh_y, &m.mesh_x) };
        let n = along.n_cells();
        for i in 0..n {
            let ip = (i + 1) % n;
            let edge = along.edges()[i + 1];
            let (sl, sr) = ((2.0 / along.width(i)).sqrt(), (2.0 / along.width(ip)).sqrt());
            // transverse projection of the edge trace
            let tr = |s: f64| if dir_x { w(edge, s) } else { w(s, edge) };
            let target = match other {
                None => l2_project(tr, across, basis),
                Some(b) => RadauProjection1D::new(across, basis, b).unwrap().project(&tr),
            };
            for j in 0..across.n_cells() {
                let (c_minus, c_plus) = if dir_x {
                    (m.cell_index(i, j), m.cell_index(ip, j))
                } else {
                    (m.cell_index(j, i), m.cell_index(j, ip))
                };
                for mo in 0..nm {
                    let minus = sl * trace(basis.right(), p.cell(c_minus), dir_x, mo);
                    let plus = sr * trace(basis.left(), p.cell(c_plus), dir_x, mo);
                    let hat = (0.5 - alpha) * minus + (0.5 + alpha) * plus;
                    worst = worst.max((hat - target.cell(j)[mo]).abs());
                }
            }
        }
    }
    worst
}

fn criterion_7() -> Outcome {
    let w = |x: f64, y: f64| (x + 2.0 * y).sin() * x.cos().exp();
    let ns = [16, 32, 64, 128];
    let mut pass = true;
    let mut parts = Vec::new();
    for k in 0..=3 {
        let basis = Basis::new(k);
        for (a, b) in [(0.5, 0.5), (-0.3, 0.8)] {
            let (mut hs, mut fs) = (vec![], vec![]);
            for &n in &ns {
                let m = square(n);
                hs.push(m.h());
                fs.push(superconvergence_functional(&w, &m, &basis, a, b).unwrap());
            }
            let s = slope(&hs, &fs);
            pass &= s >= k as f64 + 0.9;
            parts.push(format!("k={k} ({a},{b}) {s:.3}"));
        }
    }
    outcome(pass, format!("functional slopes (need k+0.9): {}", parts.join(", ")))
}

fn criterion_8() -> Outcome {
    let p = GbmProblem::default();
    let steps = [8, 16, 32, 64, 128];
    let t = gbm_strong_order(&p, Scheme::Taylor2, &steps, 1000, 100, 7).unwrap();
    let e = gbm_strong_order(&p, Scheme::EulerMaruyama, &steps, 1000, 100, 7).unwrap();
    outcome(
        t.slope >= 1.8 && (0.4..=0.7).contains(&e.slope),
        format!(
            "GBM a={} b={}: Taylor 2.0 slope {:.3} (need >= 1.8), Euler-Maruyama slope {:.3} (need [0.4, 0.7])",
            p.a, p.b, t.slope, e.slope
        ),
    )
}

fn criterion_9() -> Outcome {
    let (n, m, tau) = (100_000usize, 100usize, 0.01f64);
    let draws: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            let inc = sample_increments(tau, m, &mut sample_rng(11, i as u64)).unwrap();
            [inc.dw, inc.dz, inc.du]
        })
        .collect();
    let stats = |idx: &dyn Fn(usize) -> usize| -> [f64; 4] {
        let nf = n as f64;
        let (mut w2, mut z, mut z2, mut wz, mut u) = (0.0, 0.0, 0.0, 0.0, 0.0);
        let mut wsum = 0.0;
        for s in 0..n {
            let [dw, dz, du] = draws[idx(s)];
            w2 += dw * dw;
            wsum += dw;
            z += dz;
            z2 += dz * dz;
            wz += dw * dz;
            u += du;
        }
        let (mw, mz) = (wsum / nf, z / nf);
        [
            w2 / nf,
            (z2 / nf - mz * mz) * nf / (nf - 1.0),
            (wz / nf - mw * mz) * nf / (nf - 1.0),
            u / nf,
        ]
    };
    let est = stats(&|s| s);
    let mut rng = sample_rng(12, 0);
    let boots: Vec<[f64; 4]> = (0..200)
        .map(|_| {
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            stats(&|s| idx[s])
        })
        .collect();
    let names = ["E[dW^2]", "Var[dZ]", "Cov[dW,dZ]", "E[dU]"];
    let want = [tau, tau.powi(3) / 3.0, tau * tau / 2.0, tau * tau / 2.0];
    let mut pass = true;
    let mut parts = Vec::new();
    for s in 0..4 {
        let mean = boots.iter().map(|b| b[s]).sum::<f64>() / 200.0;
        let se = (boots.iter().map(|b| (b[s] - mean).powi(2)).sum::<f64>() / 199.0).sqrt();
        let z = (est[s] - want[s]) / se;
        pass &= z.abs() <= 3.0;
        parts.push(format!("{} z={z:+.2}", names[s]));
    }
    outcome(pass, format!("{n} samples, M={m}: {} (limit |z| <= 3)", parts.join(", ")))
}

fn criterion_10() -> Outcome {
    // k = 0 with alpha = 1/2 against the first-order upwind stencil.
    let n = 16;
    let mesh = build_mesh_1d(0.0, 2.0, n).unwrap();
    let h = mesh.h();
    let basis = Basis::new(0);
    let mut rng = sample_rng(5, 0);
    let mut stencil_err: f64 = 0.0;
    for (b1, b2) in [(0.0, 0.0), (0.2, 0.7)] {
        let flux = FluxParams1D::new(0.5, b1, b2).unwrap();
        let u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let st = State1D::new(
            FieldCoeffs::from_vec(n, 1, u.clone()).unwrap(),
            FieldCoeffs::from_vec(n, 1, v.clone()).unwrap(),
            0.0,
        )
        .unwrap();
        let (du, dv) = assemble_drift_1d(&st, &mesh, &basis, &flux).unwrap();
        let a = drift_matrix_1d(&mesh, &basis, &flux).apply_vec(&st.to_vector());
        for j in 0..n {
            let (jp, jm) = ((j + 1) % n, (j + n - 1) % n);
            // u_hat = u^+ - b1 [v], v_hat = v^- - b2 [u]
            let uh = |e: usize, ep: usize| u[ep] - b1 * (v[ep] - v[e]);
            let vh = |e: usize, ep: usize| v[e] - b2 * (u[ep] - u[e]);
            let want_v = -(uh(j, jp) - uh(jm, j)) / h;
            let want_u = -(vh(j, jp) - vh(jm, j)) / h;
            stencil_err = stencil_err
                .max((dv.as_slice()[j] - want_v).abs())
                .max((du.as_slice()[j] - want_u).abs())
                .max((a[j] - want_u).abs())
                .max((a[n + j] - want_v).abs());
        }
    }

    // y-independent 2D runs against 1D runs on the same Brownian path.
    let s = |t: f64, w: f64| (w - 0.5 * t).exp();
    let p1 = Problem1D {
        domain: (0.0, 2.0 * PI),
        noise: NoiseSpec1D::unit_coupling(),
        exact: Arc::new(move |x, t, w| [-(x + t).sin() * s(t, w), (x + t).sin() * s(t, w)]),
        energy_rate: Some(1.0),
    };
    let p2 = Problem2D {
        domain_x: (0.0, 2.0 * PI),
        domain_y: (0.0, 1.0),
        noise: NoiseSpec2D::unit_coupling(),
        exact: Arc::new(move |x, _, t, w| [(x + t).sin() * s(t, w), 0.0, (x + t).sin() * s(t, w)]),
        energy_rate: Some(1.0),
    };
    let mut run_err: f64 = 0.0;
    for k in [1, 2] {
        let c1 = ExperimentConfig {
            nx: 12,
            nt: 30,
            degree: k,
            alpha: 0.5,
            t_final: Some(0.3),
            samples: Some(2),
            ..Default::default()
        };
        let c2 = ExperimentConfig {
            dimension: Dimension::Two,
            ny: Some(3),
            alpha1: 0.5,
            alpha2: 0.3,
            ..c1.clone()
        };
        let e1 = Experiment::with_problem_1d(&c1, p1.clone()).unwrap();
        let e2 = Experiment::with_problem_2d(&c2, p2.clone()).unwrap();
        let nm = k + 1;
        let sy = (1.0f64 / 3.0).sqrt();
        for sample in 0..2 {
            let (x1, r1) = e1.simulate(sample, Draws::Random).unwrap();
            let (x2, r2) = e2.simulate(sample, Draws::Random).unwrap();
            assert_eq!(r1.w_final, r2.w_final);
            let (n1, n2) = (12 * nm, 12 * 3 * nm * nm);
            let (u, v) = x1.split_at(n1);
            let (e, rest) = x2.split_at(n2);
            let (sf, t) = rest.split_at(n2);
            for i in 0..12 {
                for j in 0..3 {
                    for lx in 0..nm {
                        for ly in 0..nm {
                            let idx = (i * 3 + j) * nm * nm + lx * nm + ly;
                            let (we, wt) = if ly == 0 { (v[i * nm + lx] * sy, -u[i * nm + lx] * sy) } else { (0.0, 0.0) };
                            run_err = run_err.max((e[idx] - we).abs()).max((t[idx] - wt).abs()).max(sf[idx].abs());
                        }
                    }
                }
            }
        }
    }

    // beta = 0 global projection against decoupled Radau projections.
    let q = |x: f64| x.sin() + 0.3 * (2.0 * x).cos();
    let r = |x: f64| x.cos() * x.cos();
    let mut proj_err: f64 = 0.0;
    for k in 0..=3 {
        let basis = Basis::new(k);
        let edges: Vec<f64> = (0..=10).map(|i| i as f64 * 0.6 + 0.05 * (i as f64).sin()).collect();
        for mesh in [build_mesh_1d(0.0, 2.0 * PI, 16).unwrap(), Mesh1D::from_edges(edges).unwrap()] {
            for alpha in [0.5, -0.35, 1.2] {
                let flux = FluxParams1D::new(alpha, 0.0, 0.0).unwrap();
                let (pq, pr) = global_projection_pair_1d(&q, &r, &mesh, &basis, &flux).unwrap();
                let dq = RadauProjection1D::new(&mesh, &basis, alpha).unwrap().project(&q);
                let dr = RadauProjection1D::new(&mesh, &basis, -alpha).unwrap().project(&r);
                proj_err = proj_err.max(pq.max_abs_diff(&dq)).max(pr.max_abs_diff(&dr));
            }
        }
    }
    outcome(
        stencil_err <= 1e-12 && run_err <= 1e-10 && proj_err <= 1e-12,
        format!(
            "upwind stencil {stencil_err:.2e} (limit 1e-12); 2D vs 1D runs {run_err:.2e} (limit 1e-10); coupled vs decoupled projection {proj_err:.2e} (limit 1e-12)"
        ),
    )
}

fn run_cli(args: &[&str], out: &Path) -> bool {
    Command::new(env!("CARGO_BIN_EXE_smdg"))
        .args(args)
        .arg("--out")
        .arg(out)
        .stdout(std::process::Stdio::null())
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

fn criterion_11() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg1 = dir.path().join("c1.json");
    std::fs::write(&cfg1, r#"{"nx": 10, "nt": 40, "samples": 16, "levels": 2, "seed": 4}"#).unwrap();
    let cfg2 = dir.path().join("c2.json");
    std::fs::write(&cfg2, r#"{"dimension": "2d", "nx": 6, "nt": 6, "samples": 8, "levels": 2, "seed": 4}"#).unwrap();
    let mut identical = true;
    let mut compared = 0;
    for (cmd, cfg, files) in [
        ("convergence", &cfg1, &["table.csv"][..]),
        ("convergence", &cfg2, &["table.csv"][..]),
        ("run1d", &cfg1, &["table.csv", "energy.csv"][..]),
        ("energy", &cfg2, &["energy.csv"][..]),
    ] {
        let runs: Vec<_> = [("a", "1"), ("b", "1"), ("c", "4")]
            .iter()
            .map(|(tag, threads)| {
                let out = dir.path().join(format!("{cmd}-{tag}"));
                let c = cfg.to_str().unwrap();
                assert!(run_cli(&[cmd, "--config", c, "--threads", threads], &out), "{cmd} failed");
                out
            })
            .collect();
        for f in files {
            let a = std::fs::read(runs[0].join(f)).unwrap();
            for other in &runs[1..] {
                identical &= a == std::fs::read(other.join(f)).unwrap();
                compared += 1;
            }
        }
    }

    let cfg = ExperimentConfig {
        nx: 10,
        nt: 40,
        samples: Some(24),
        ..Default::default()
    };
    let exp = Experiment::new(&cfg).unwrap();
    let serial = exp.aggregate(&(0..24).map(|i| exp.run_sample(i).unwrap()).collect::<Vec<_>>());
    let pooled = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(|| exp.monte_carlo().unwrap())
    };
    let parallel_ok = serial == pooled(1) && serial == pooled(4);
    outcome(
        identical && parallel_ok,
        format!("{compared} CSV pairs byte-identical across reruns and thread counts: {identical}; serial loop equals 1- and 4-thread pools: {parallel_ok}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("1D convergence, k=1", criterion_1),
        ("1D convergence, k=2", criterion_2),
        ("2D convergence, k=1 and k=2", criterion_3),
        ("semi-discrete energy law", criterion_4),
        ("zero-noise conservation", criterion_5),
        ("projection properties", criterion_6),
        ("superconvergence functional", criterion_7),
        ("strong order of the time integrators", criterion_8),
        ("increment moments", criterion_9),
        ("oracle equivalences", criterion_10),
        ("reproducibility", criterion_11),
    ];
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {tag} {name}: {} [{:.1}s]", o.detail, start.elapsed().as_secs_f64());
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
