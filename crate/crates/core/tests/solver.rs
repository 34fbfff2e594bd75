use std::sync::Arc;

use nlgreen::experiments::ExperimentPlan;
use nlgreen::kernels::{KernelConfig, KernelKind};
use nlgreen::solver::{
    comparison_test, kato_check, picard_solve, weak_dual_residual, AffineProblem, Nonlinearity, SolveConfig,
};
use nlgreen::verify::vertex_dirac;
use nlgreen::{build_mesh, DomainSpec, Error, GreenOperator, GridFunction, Kernel, RadonMeasure};

fn op(n: usize) -> GreenOperator<f64> {
    let spec = DomainSpec::unit(1, 0.25, 0.25).unwrap();
    let mesh = Arc::new(build_mesh(&spec, n, 2.0).unwrap());
    GreenOperator::assemble_default(Arc::new(Kernel::rfl(spec).unwrap()), mesh).unwrap()
}

/// Plain Gaussian elimination with partial pivoting.
fn gauss_solve(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap()).unwrap();
        m.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| m[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / m[r][r];
    }
    x
}

#[test]
fn linear_solve_matches_elimination() {
    let op = op(48);
    let mesh = op.mesh().clone();
    let n = mesh.len();
    let f = GridFunction::from_fn(mesh.clone(), |x, _| (3.0 * x[0]).cos());
    let a = op.matrix();
    let m: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a[(i, j)] + if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let rhs: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[(i, j)] * f.values()[j]).sum()).collect();
    let want = gauss_solve(m, rhs);
    let cfg = SolveConfig { tol: 1e-14, ..SolveConfig::default() };
    let (u, _) = picard_solve(&op, &Nonlinearity::linear(), &RadonMeasure::from_density(f), &cfg).unwrap();
    let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (a, b) in u.values().iter().zip(&want) {
        assert!((a - b).abs() <= 1e-10 * scale, "{a} {b}");
    }
}

#[test]
fn cubic_dirac_solution_satisfies_the_equation() {
    let op = op(128);
    let mesh = op.mesh().clone();
    let mu = vertex_dirac(&mesh, -0.3, 2.0).unwrap();
    let g = Nonlinearity::power(3.0).unwrap();
    let (u, rep) = picard_solve(&op, &g, &mu, &SolveConfig::default()).unwrap();
    assert!(rep.final_residual() <= 1e-10);
    // independent residual: u + A u³ − 𝔾[μ], with 𝔾[μ] from the kernel itself
    let a = op.matrix();
    let n = mesh.len();
    let atom = &mu.atoms()[0];
    let kernel = op.kernel();
    let mut worst = 0.0f64;
    for i in 0..n {
        let b = atom.weight * kernel.green(mesh.node(i), &atom.location).unwrap();
        let au3: f64 = (0..n).map(|j| a[(i, j)] * u.values()[j].powi(3)).sum();
        worst = worst.max((u.values()[i] + au3 - b).abs() / b);
    }
    assert!(worst < 1e-8, "{worst}");
    // 0 ≤ u ≤ 𝔾[μ]
    let prob = AffineProblem::from_measure(&op, &g, &mu).unwrap();
    assert_eq!(prob.sandwich_violation(u.values()), 0.0);
    let family: Vec<GridFunction<f64>> =
        (1..4).map(|k| GridFunction::from_fn(mesh.clone(), move |x, d| d.powf(0.25) * (k as f64 * x[0]).cos().abs())).collect();
    let r = weak_dual_residual(&op, &u, &g, &prob.forcing, &family).unwrap();
    assert!(r < 1e-9, "{r}");
}

#[test]
fn kato_inequalities_hold_for_signed_data() {
    let op = op(96);
    let mesh = op.mesh().clone();
    let f = GridFunction::from_fn(mesh.clone(), |x, _| (5.0 * x[0]).sin());
    let mu = vertex_dirac(&mesh, 0.4, 1.0).unwrap().difference(&vertex_dirac(&mesh, -0.2, 0.7).unwrap()).unwrap();
    for k in 0..3 {
        let xi = GridFunction::from_fn(mesh.clone(), move |x, d| d.powf(0.25) * (1.0 + (k as f64 * x[0]).cos()));
        let r = kato_check(&op, &f, &mu, &xi).unwrap();
        assert!(r.min_slack() >= -1e-12 * r.scale, "{r:?}");
    }
}

#[test]
fn negative_dirac_needs_the_total_variation() {
    // μ = −δ_z, f = 0: ∫|u|ξ > 0 while ∫𝔾[ξ]dμ⁺ = 0, so the bound needs |μ|.
    let op = op(64);
    let mesh = op.mesh().clone();
    let mu = vertex_dirac(&mesh, 0.1, 1.0).unwrap().scaled(-1.0);
    let f = GridFunction::zeros(mesh.clone());
    let xi = GridFunction::from_fn(mesh.clone(), |_, d| d.powf(0.25));
    let u = op.apply_measure(&mu).unwrap();
    let lhs: f64 = (0..mesh.len()).map(|i| u.values()[i].abs() * xi.values()[i] * mesh.weights()[i]).sum();
    assert!(lhs > 0.0);
    let r = kato_check(&op, &f, &mu, &xi).unwrap();
    assert!(r.abs2 >= -1e-12 * r.scale);
    assert!((r.abs2).abs() <= 1e-12 * r.scale, "equality expected for a single atom: {r:?}");
}

#[test]
fn comparison_rejects_unordered_data() {
    let op = op(32);
    let mesh = op.mesh().clone();
    let g = Nonlinearity::power(2.0).unwrap();
    let a = vertex_dirac(&mesh, 0.1, 2.0).unwrap();
    let b = vertex_dirac(&mesh, 0.1, 1.0).unwrap();
    let err = comparison_test(&op, &g, &a, &b, &SolveConfig::default()).unwrap_err();
    assert!(matches!(err, Error::Unordered(_)));
    assert!(comparison_test(&op, &g, &b, &a, &SolveConfig::default()).unwrap().passed);
}

#[test]
fn iteration_budget_reports_divergence() {
    let op = op(32);
    let mesh = op.mesh().clone();
    let mu = vertex_dirac(&mesh, 0.1, 5.0).unwrap();
    let g = Nonlinearity::power(3.0).unwrap();
    let cfg = SolveConfig { max_iter: 2, ..SolveConfig::default() };
    match picard_solve(&op, &g, &mu, &cfg) {
        Err(Error::Divergence { iterations, history, .. }) => {
            assert_eq!(iterations, 2);
            assert!(!history.is_empty());
        }
        other => panic!("expected divergence, got {other:?}"),
    }
}

#[test]
fn nonlinearity_validation() {
    assert!(Nonlinearity::<f64>::power(0.5).is_err());
    assert!(Nonlinearity::<f64>::table(vec![0.0, 1.0, 0.5], vec![0.0, 1.0, 2.0]).is_err());
    let t = Nonlinearity::table(vec![-1.0, 0.0, 1.0, 2.0], vec![-1.0, 0.0, 1.0, 8.0]).unwrap();
    assert_eq!(t.eval(0.0), 0.0);
    assert!(t.eval(0.5) > 0.0 && t.eval(0.5) < 1.0);
    assert!(t.validate().is_ok());
    assert!(SolveConfig { damping: 0.0, ..SolveConfig::default() }.validate().is_err());
}

#[test]
fn supercritical_power_is_refused() {
    let cfg: KernelConfig = serde_json::from_str(r#"{"kernel":"rfl","s":0.25}"#).unwrap();
    assert_eq!(cfg.kernel, KernelKind::RflBall);
    let mut plan = ExperimentPlan::new(cfg);
    // p* = (1 + 1/4)/(1 + 1/4 − 1/2) = 5/3
    plan.p = 1.7;
    assert!(matches!(plan.validate(), Err(Error::Supercritical { .. })));
    plan.p = 1.6;
    assert!(plan.validate().is_ok());
}
