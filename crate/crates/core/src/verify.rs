//! Preset configurations and the umbrella property suite: kernel envelope,
//! operator symmetry, duality pairing, Kato inequalities, sandwich bounds and
//! Marcinkiewicz equivalence.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{Mesh, MeshOptions};
use crate::error::{Error, Result};
use crate::experiments::{nearest_vertex, Table, Verdict};
use crate::greenop::{GreenOperator, TestFunction};
use crate::kernels::{estimate_band, Kernel, KernelConfig, KernelKind};
use crate::measures::RadonMeasure;
use crate::real::norm;
use crate::solver::{
    convex_kato_check, convex_kato_limit, kato_check, weak_dual_residual, AffineProblem, ConvexProfile, Nonlinearity,
    SolveConfig,
};
use crate::spaces::{marcinkiewicz_norm, marcinkiewicz_quasinorm, GridFunction};

pub const PRESETS: [&str; 4] = ["rfl-interval-s025", "rfl-disk-s05", "sfl-interval-s025", "cfl-disk-s075"];

/// Kernel block and default resolution of a named preset.
pub fn preset(name: &str) -> Result<(KernelConfig, usize)> {
    let (kernel, dim, s, gamma, res) = match name {
        "rfl-interval-s025" => (KernelKind::RflBall, 1, 0.25, None, 256),
        "rfl-disk-s05" => (KernelKind::RflBall, 2, 0.5, None, 24),
        "sfl-interval-s025" => (KernelKind::SflInterval, 1, 0.25, None, 256),
        "cfl-disk-s075" => (KernelKind::CflSurrogate, 2, 0.75, Some(0.5), 24),
        "cfl-interval-s075" => {
            return Err(Error::Config(
                "preset cfl-interval-s075 needs N > 2s, which fails for N = 1, s = 0.75; use cfl-disk-s075".into(),
            ))
        }
        other => return Err(Error::Config(format!("unknown preset {other:?}; known: {}", PRESETS.join(", ")))),
    };
    let cfg = KernelConfig { kernel, dim, radius: 1.0, s, gamma, c0: None, truncation: None };
    Ok((cfg.resolved(), res))
}

fn default_grading() -> f64 {
    2.0
}
fn default_draws() -> usize {
    100
}
fn default_pairs() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub kernel: KernelConfig,
    pub resolution: usize,
    #[serde(default = "default_grading")]
    pub grading: f64,
    #[serde(default)]
    pub solver: SolveConfig,
    #[serde(default = "default_pairs")]
    pub envelope_pairs: usize,
    /// Random subsets per weak-norm audit.
    #[serde(default = "default_draws")]
    pub draws: usize,
    #[serde(default)]
    pub seed: u64,
}

impl VerifyConfig {
    pub fn from_preset(name: &str) -> Result<Self> {
        let (kernel, resolution) = preset(name)?;
        Ok(VerifyConfig {
            kernel,
            resolution,
            grading: default_grading(),
            solver: SolveConfig::default(),
            envelope_pairs: default_pairs(),
            draws: default_draws(),
            seed: 0,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub verdict: Verdict,
    pub metrics: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub verdict: Verdict,
    pub suites: Vec<SuiteResult>,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

/// Eight bounded factors w, all nonnegative, so that ξ = δ^γ w has 𝔾[ξ] ≥ 0.
pub fn test_functions(mesh: &Arc<Mesh<f64>>) -> Vec<TestFunction<f64>> {
    let r = mesh.spec().radius;
    let pi = std::f64::consts::PI;
    let fs: Vec<(&str, Box<dyn Fn(&[f64]) -> f64>)> = vec![
        ("one", Box::new(|_| 1.0)),
        ("cos", Box::new(move |x| 1.0 + 0.5 * (pi * norm(x) / r).cos())),
        ("parabola", Box::new(move |x| 1.0 - norm(x).powi(2) / (r * r))),
        ("gauss", Box::new(move |x| (-4.0 * norm(x).powi(2) / (r * r)).exp())),
        ("tilt", Box::new(move |x| 1.0 + 0.9 * x[0] / r)),
        ("bump", Box::new(move |x| {
            let d = ((x[0] - 0.3 * r).powi(2) + x[1..].iter().map(|v| v * v).sum::<f64>()).sqrt() / (0.5 * r);
            (1.0 - d * d).max(0.0).powi(2)
        })),
        ("wave", Box::new(move |x| 2.0 + (3.0 * pi * x[0] / r).sin())),
        ("step", Box::new(move |x| if x[0] < 0.0 { 1.0 } else { 0.25 })),
    ];
    fs.into_iter()
        .map(|(name, f)| TestFunction::new(GridFunction::from_fn(mesh.clone(), |x, _| f(x)).with_label(name)))
        .collect()
}

/// Twelve profiles for the weak-norm equivalence audit.
pub fn weak_norm_corpus(mesh: &Arc<Mesh<f64>>) -> Vec<GridFunction<f64>> {
    let r = mesh.spec().radius;
    let pi = std::f64::consts::PI;
    let mut rng = 0x9e37_79b9_7f4a_7c15u64;
    let mut noise = move || {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        (rng >> 11) as f64 / (1u64 << 53) as f64
    };
    let noise_vals: Vec<f64> = (0..mesh.len()).map(|_| 2.0 * noise() - 1.0).collect();
    let mk = |name: &str, f: &dyn Fn(&[f64], f64) -> f64| GridFunction::from_fn(mesh.clone(), f).with_label(name);
    vec![
        mk("constant", &|_, _| 1.0),
        mk("constant-neg", &|_, _| -2.5),
        mk("radial-0.3", &|x, _| (norm(x) / r).max(1e-12).powf(-0.3)),
        mk("radial-0.6", &|x, _| (norm(x) / r).max(1e-12).powf(-0.6)),
        mk("delta-0.2", &|_, d| (d / r).powf(-0.2)),
        mk("delta+0.5", &|_, d| (d / r).powf(0.5)),
        mk("sine", &|x, _| (pi * x[0] / r).sin()),
        mk("step", &|x, _| if x[0] > 0.2 * r { 3.0 } else { 0.5 }),
        mk("spike", &|x, _| 1.0 / (0.01 + norm(x).powi(2))),
        mk("linear", &|x, _| x[0] / r),
        GridFunction::new(mesh.clone(), noise_vals).expect("sized").with_label("noise"),
        mk("zero", &|_, _| 0.0),
    ]
}

fn suite(name: &str, verdict: Verdict, metrics: serde_json::Value) -> SuiteResult {
    SuiteResult { suite: name.into(), verdict, metrics }
}

/// Measured band of G/E over quasi-random pairs at least R/64 apart.
pub fn envelope_suite(kernel: &Kernel<f64>, pairs: usize) -> (SuiteResult, Table) {
    let band = estimate_band(kernel, pairs, kernel.spec().radius / 64.0);
    let ok = if kernel.kind().estimate_class() { band.ratio() <= 1.0 + 1e-12 } else { band.ratio() <= 50.0 };
    let mut t = Table::new("envelope", &["pairs", "c1", "c2", "ratio"]);
    t.push(vec![band.pairs as f64, band.c1, band.c2, band.ratio()]);
    (suite("envelope", Verdict::from_bool(ok), serde_json::to_value(band).unwrap()), t)
}

pub fn operator_suite(op: &GreenOperator<f64>) -> (SuiteResult, Table) {
    let asym = op.weighted_asymmetry();
    let min = op.min_entry();
    let mut t = Table::new("operator", &["nodes", "weighted_asymmetry", "min_entry"]);
    t.push(vec![op.len() as f64, asym, min]);
    let metrics = serde_json::json!({ "asymmetry": asym, "min_entry": min, "assembly": op.report() });
    (suite("operator", Verdict::from_bool(asym <= 1e-12 && min >= 0.0), metrics), t)
}

/// Diracs at the mesh vertices nearest to x₁ = t·R.
pub fn vertex_dirac(mesh: &Mesh<f64>, t: f64, weight: f64) -> Result<RadonMeasure<f64>> {
    let spec = mesh.spec();
    let mut p = vec![0.0; spec.dim];
    p[0] = t * spec.radius;
    RadonMeasure::dirac(spec, nearest_vertex(mesh, &p), weight)
}

/// Worst relative gap |∫𝔾[μ]ξ − ∫𝔾[ξ]dμ| / scale.
pub fn duality_suite(op: &GreenOperator<f64>) -> Result<(SuiteResult, Table)> {
    let mesh = op.mesh();
    let xis = test_functions(mesh);
    let mut t = Table::new("duality", &["atom", "test_function", "lhs", "rhs", "relative_gap"]);
    let mut worst = 0.0f64;
    for (a, &tx) in [0.0, 0.37, -0.61].iter().enumerate() {
        let mu = vertex_dirac(mesh, tx, 1.0)?;
        for (k, xi) in xis.iter().enumerate().take(3) {
            let g = op.duality_gap(&mu, &xi.realize())?;
            let rel = g.gap / g.scale;
            worst = worst.max(rel);
            t.push(vec![a as f64, k as f64, g.lhs, g.rhs, rel]);
        }
    }
    Ok((suite("duality", Verdict::from_bool(worst <= 1e-3), serde_json::json!({ "max_relative_gap": worst })), t))
}

/// The four Kato inequalities over eight test functions and four data sets,
/// the p_k family and its k → ∞ limit.
pub fn kato_suite(op: &GreenOperator<f64>) -> Result<(SuiteResult, Vec<Table>)> {
    let mesh = op.mesh();
    let spec = *mesh.spec();
    let r = spec.radius;
    let pi = std::f64::consts::PI;
    let xis = test_functions(mesh);
    let f_pos = GridFunction::from_fn(mesh.clone(), |x, _| 1.0 + (x[0] / r).powi(2));
    let f_mixed = GridFunction::from_fn(mesh.clone(), |x, _| (pi * x[0] / r).sin() + 0.2);
    let pair = vertex_dirac(mesh, 0.3, 1.0)?.difference(&vertex_dirac(mesh, -0.45, 1.0)?)?;
    let zero = RadonMeasure::zero(&spec);
    let zf = GridFunction::zeros(mesh.clone());
    let data: [(&GridFunction<f64>, &RadonMeasure<f64>); 4] =
        [(&f_pos, &zero), (&f_mixed, &zero), (&zf, &pair), (&f_mixed, &pair)];
    let mut t = Table::new("kato", &["data", "test_function", "abs", "main", "main2", "abs2", "scale"]);
    let mut tk = Table::new("kato_convex", &["data", "test_function", "k", "slack"]);
    let mut kato_worst = f64::INFINITY;
    let mut convex_worst = f64::INFINITY;
    let mut limit_gap = 0.0f64;
    for (d, (f, mu)) in data.iter().enumerate() {
        for (k, xi) in xis.iter().enumerate() {
            let x = xi.realize();
            let rep = kato_check(op, f, mu, &x)?;
            kato_worst = kato_worst.min(rep.min_slack() / rep.scale.max(f64::MIN_POSITIVE));
            t.push(vec![d as f64, k as f64, rep.abs, rep.main, rep.main2, rep.abs2, rep.scale]);
            if mu.is_zero() {
                for kk in [1.0, 2.0, 4.0, 8.0] {
                    let s = convex_kato_check(op, f, &ConvexProfile::Pk(kk), &x)?;
                    convex_worst = convex_worst.min(s / rep.scale);
                    tk.push(vec![d as f64, k as f64, kk, s]);
                }
                let lim = convex_kato_limit(op, f, &x)?;
                limit_gap = limit_gap.max((lim - rep.abs).abs() / rep.scale);
                tk.push(vec![d as f64, k as f64, f64::INFINITY, lim]);
            }
        }
    }
    let ok = kato_worst >= -1e-8 && convex_worst >= -1e-8 && limit_gap <= 1e-6;
    let metrics =
        serde_json::json!({ "min_relative_slack": kato_worst, "min_convex_slack": convex_worst, "limit_gap": limit_gap });
    Ok((suite("kato", Verdict::from_bool(ok), metrics), vec![t, tk]))
}

/// u³ absorption with a Dirac and a signed Dirac pair: residual, envelope and weak-dual checks.
pub fn sandwich_suite(op: &GreenOperator<f64>, cfg: &SolveConfig) -> Result<(SuiteResult, Table)> {
    let mesh = op.mesh();
    let cube = Nonlinearity::power(3.0)?;
    let family: Vec<GridFunction<f64>> = test_functions(mesh).iter().map(|x| x.realize()).collect();
    let pair = vertex_dirac(mesh, 0.3, 1.0)?.difference(&vertex_dirac(mesh, -0.45, 1.0)?)?;
    let data = [vertex_dirac(mesh, 0.1, 1.0)?, pair];
    let mut t = Table::new("sandwich", &["datum", "residual", "sandwich_violation", "weak_dual_residual", "iterations"]);
    let mut ok = true;
    let mut worst_violation = 0.0f64;
    for (d, mu) in data.iter().enumerate() {
        let prob = AffineProblem::from_measure(op, &cube, mu)?;
        let (lo, hi, _) = prob.monotone(cfg)?;
        let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let (u, rep) = prob.picard(Some(&mid), cfg)?;
        let ug = GridFunction::new(mesh.clone(), u)?;
        let wd = weak_dual_residual(op, &ug, &cube, &prob.forcing, &family)?;
        ok &= rep.sandwich_violation <= 1e-8 && rep.final_residual() <= cfg.tol;
        worst_violation = worst_violation.max(rep.sandwich_violation);
        t.push(vec![d as f64, rep.final_residual(), rep.sandwich_violation, wd, rep.iterations as f64]);
    }
    Ok((suite("sandwich", Verdict::from_bool(ok), serde_json::json!({ "max_violation": worst_violation })), t))
}

/// ⦀u⦀ ≤ ‖u‖ ≤ q/(q−1)⦀u⦀ on the twelve-profile corpus.
pub fn marcinkiewicz_suite(mesh: &Arc<Mesh<f64>>, draws: usize, seed: u64) -> Result<(SuiteResult, Table)> {
    let gamma = mesh.spec().gamma;
    let mut t = Table::new("marcinkiewicz", &["function", "q", "alpha", "quasinorm", "norm", "upper"]);
    let mut ok = true;
    for (k, u) in weak_norm_corpus(mesh).iter().enumerate() {
        for q in [1.5, 2.0, 3.0] {
            for alpha in [0.0, gamma] {
                let qn = marcinkiewicz_quasinorm(u, q, alpha)?;
                let wn = marcinkiewicz_norm(u, q, alpha, draws, seed.wrapping_add(k as u64))?;
                let upper = q / (q - 1.0) * qn;
                ok &= qn <= wn.value && wn.value <= upper;
                t.push(vec![k as f64, q, alpha, qn, wn.value, upper]);
            }
        }
    }
    Ok((suite("marcinkiewicz", Verdict::from_bool(ok), serde_json::json!({ "profiles": 12 })), t))
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyOutcome> {
    cfg.solver.validate()?;
    let kernel = Arc::new(cfg.kernel.build::<f64>()?);
    let mesh = Arc::new(Mesh::build(kernel.spec(), &MeshOptions::new(cfg.resolution, cfg.grading))?);
    let op = GreenOperator::assemble_default(kernel.clone(), mesh.clone())?;
    let mut suites = Vec::new();
    let mut tables = Vec::new();
    let (s, t) = envelope_suite(&kernel, cfg.envelope_pairs);
    suites.push(s);
    tables.push(t);
    let (s, t) = operator_suite(&op);
    suites.push(s);
    tables.push(t);
    let (s, t) = duality_suite(&op)?;
    suites.push(s);
    tables.push(t);
    let (s, ts) = kato_suite(&op)?;
    suites.push(s);
    tables.extend(ts);
    let (s, t) = sandwich_suite(&op, &cfg.solver)?;
    suites.push(s);
    tables.push(t);
    let (s, t) = marcinkiewicz_suite(&mesh, cfg.draws, cfg.seed)?;
    suites.push(s);
    tables.push(t);
    let verdict = suites.iter().fold(Verdict::Pass, |v, s| v.and(s.verdict));
    Ok(VerifyOutcome { verdict, suites, tables })
}
