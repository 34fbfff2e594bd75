use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use nlgreen::experiments::{
    boundary_singularity_run, criticality_sweep, format_number, nearest_vertex, stability_run, ExperimentPlan,
    ExperimentRecord, StabilityPlan, SweepPlan, Table, Verdict,
};
use nlgreen::measures::{AtomLiteral, Coord};
use nlgreen::solver::{monotone_solve, picard_solve};
use nlgreen::spaces::{
    lq_norm, marcinkiewicz_norm, marcinkiewicz_quasinorm, p_star, subcritical_check, GridFunction, Subcriticality,
};
use nlgreen::verify::{envelope_suite, kato_suite, operator_suite, run_verify, weak_norm_corpus, VerifyConfig};
use nlgreen::{Error, GreenOperator, Mesh, MeshOptions};
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use crate::config::{hash, version, Method, Resolved};
use crate::{expr, CliError};

/// What a command hands back for emission.
pub struct Outcome {
    pub experiment: String,
    pub verdict: Verdict,
    pub metrics: Value,
    pub tables: Vec<Table>,
    /// Extra files (name, contents) written next to the tables.
    pub files: Vec<(String, String)>,
    pub config: Map<String, Value>,
}

pub fn dispatch(cfg: &Resolved) -> Result<Outcome, CliError> {
    match cfg.command.as_str() {
        "kernel-check" => kernel_check(cfg),
        "norms" => norms(cfg),
        "solve" => solve(cfg),
        "kato" => kato(cfg),
        "boundary" => {
            let (plan, config) = plan::<ExperimentPlan>(cfg, true)?;
            Ok(record(boundary_singularity_run(&plan)?, config))
        }
        "sweep" => {
            let (plan, config) = plan::<SweepPlan>(cfg, false)?;
            Ok(record(criticality_sweep(&plan)?, config))
        }
        "stability" => {
            let (plan, config) = plan::<StabilityPlan>(cfg, true)?;
            Ok(record(stability_run(&plan)?, config))
        }
        "verify" => verify(cfg),
        other => Err(CliError::Usage(format!("unknown command {other:?}"))),
    }
}

/// Writes every table, the extra files and `<command>.json`.
pub fn emit(cfg: &Resolved, out: &Outcome) -> Result<(), CliError> {
    let dir = &cfg.output;
    std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
    for t in &out.tables {
        t.write(dir)?;
    }
    for (name, body) in &out.files {
        write_file(&dir.join(name), body)?;
    }
    let mut config = out.config.clone();
    config.insert("threads".into(), Value::from(rayon::current_num_threads()));
    let doc = json!({
        "experiment": out.experiment,
        "config_hash": hash(&out.config),
        "verdict": out.verdict,
        "metrics": out.metrics,
        "version": version(),
        "seed": cfg.seed,
        "config": config,
        "tables": out.tables.iter().map(|t| format!("{}.csv", t.name)).collect::<Vec<_>>(),
    });
    let body = serde_json::to_string_pretty(&doc).expect("json serializes") + "\n";
    write_file(&dir.join(format!("{}.json", cfg.command)), &body)
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    let io = |e| Error::Io { path: path.to_path_buf(), source: e };
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(body.as_bytes()).map_err(io)?;
    Ok(())
}

fn operator(cfg: &Resolved) -> Result<GreenOperator<f64>, CliError> {
    let kernel = Arc::new(cfg.kernel()?.build::<f64>()?);
    let mesh = Arc::new(Mesh::build(kernel.spec(), &MeshOptions::new(cfg.resolution()?, cfg.grading))?);
    Ok(GreenOperator::assemble_default(kernel, mesh)?)
}

fn record(r: ExperimentRecord, config: Map<String, Value>) -> Outcome {
    Outcome { experiment: r.experiment, verdict: r.verdict, metrics: r.metrics, tables: r.tables, files: vec![], config }
}

/// Experiment block with the kernel and mesh filled in, parsed into its plan type.
fn plan<P: DeserializeOwned + serde::Serialize>(cfg: &Resolved, meshed: bool) -> Result<(P, Map<String, Value>), CliError> {
    let mut block = cfg.raw.experiment.clone().unwrap_or_default();
    if !block.contains_key("kernel") {
        block.insert("kernel".into(), serde_json::to_value(cfg.kernel()?).expect("kernel serializes"));
    }
    if let Some(m) = &cfg.raw.mesh {
        if meshed && !block.contains_key("resolution") {
            if let Some(n) = m.resolution {
                block.insert("resolution".into(), Value::from(n));
            }
        }
        if !block.contains_key("grading") {
            if let Some(g) = m.grading {
                block.insert("grading".into(), Value::from(g));
            }
        }
    }
    let plan: P =
        serde_json::from_value(Value::Object(block)).map_err(|e| CliError::Usage(format!("experiment block: {e}")))?;
    let mut config = Map::new();
    config.insert("command".into(), Value::from(cfg.command.clone()));
    config.insert("experiment".into(), serde_json::to_value(&plan).expect("plan serializes"));
    config.insert("seed".into(), Value::from(cfg.seed));
    Ok((plan, config))
}

fn kernel_check(cfg: &Resolved) -> Result<Outcome, CliError> {
    let op = operator(cfg)?;
    let pairs = cfg.raw.pairs.unwrap_or(10_000);
    let (env, t_env) = envelope_suite(op.kernel(), pairs);
    let (ops, t_op) = operator_suite(&op);
    let mut config = cfg.base_json();
    config.insert("pairs".into(), Value::from(pairs));
    Ok(Outcome {
        experiment: "kernel-check".into(),
        verdict: env.verdict.and(ops.verdict),
        metrics: json!({ "suites": [env, ops] }),
        tables: vec![t_env, t_op],
        files: vec![],
        config,
    })
}

fn csv_name(name: &str) -> Result<&str, CliError> {
    if name.is_empty() || name.contains([',', '"', '\n', '\r']) {
        return Err(CliError::Usage(format!("profile name {name:?} must be non-empty without commas, quotes or newlines")));
    }
    Ok(name)
}

fn norms(cfg: &Resolved) -> Result<Outcome, CliError> {
    let kernel = cfg.kernel()?;
    let spec = kernel.build::<f64>()?;
    let mesh = Arc::new(Mesh::build(spec.spec(), &MeshOptions::new(cfg.resolution()?, cfg.grading))?);
    let gamma = spec.spec().gamma;
    let qs = cfg.raw.q.clone().unwrap_or_else(|| vec![1.5, 2.0, 3.0]);
    let alphas = cfg.raw.alpha.clone().unwrap_or_else(|| vec![0.0, gamma]);
    let draws = cfg.raw.draws.unwrap_or(100);
    let mut profiles: Vec<(String, GridFunction<f64>)> = weak_norm_corpus(&mesh)
        .into_iter()
        .map(|u| (u.label().unwrap_or("profile").to_string(), u))
        .collect();
    let extra = cfg.raw.profiles.clone().unwrap_or_default();
    for (name, e) in &extra {
        csv_name(name)?;
        profiles.push((name.clone(), GridFunction::new(mesh.clone(), expr::profile(e, &mesh)?)?));
    }
    let mut csv = String::from("name,q,alpha,lq,weak_quasi,weak_norm\n");
    let mut worst = 0.0f64;
    let mut rows = 0usize;
    for (name, u) in &profiles {
        for &q in &qs {
            for &alpha in &alphas {
                let lq = lq_norm(u, q, alpha)?;
                let quasi = marcinkiewicz_quasinorm(u, q, alpha)?;
                let weak = marcinkiewicz_norm(u, q, alpha, draws, cfg.seed)?;
                // ‖u‖_{q,∞} ≤ weak ≤ q/(q−1)‖u‖_{q,∞} and ‖u‖_{q,∞} ≤ ‖u‖_q
                let scale = lq.max(weak.value).max(f64::MIN_POSITIVE);
                let excess =
                    (quasi - weak.value).max(weak.value - q / (q - 1.0) * quasi).max(quasi - lq).max(0.0) / scale;
                worst = worst.max(excess);
                rows += 1;
                let cells: Vec<String> = [q, alpha, lq, quasi, weak.value].iter().map(|v| format_number(*v)).collect();
                csv.push_str(&format!("{name},{}\n", cells.join(",")));
            }
        }
    }
    let mut config = cfg.base_json();
    config.insert("q".into(), json!(qs));
    config.insert("alpha".into(), json!(alphas));
    config.insert("draws".into(), Value::from(draws));
    config.insert("profiles".into(), json!(extra));
    Ok(Outcome {
        experiment: "norms".into(),
        verdict: Verdict::from_bool(worst <= 1e-12),
        metrics: json!({ "rows": rows, "max_relative_excess": worst }),
        tables: vec![],
        files: vec![("norms.csv".into(), csv)],
        config,
    })
}

fn solve(cfg: &Resolved) -> Result<Outcome, CliError> {
    let gspec = cfg.raw.g.clone().ok_or_else(|| CliError::Usage("solve needs a g block".into()))?;
    let lit = cfg.raw.mu.clone().ok_or_else(|| CliError::Usage("solve needs a mu block".into()))?;
    cfg.solver.validate()?;
    let g = gspec.build()?;
    let op = operator(cfg)?;
    let mesh = op.mesh().clone();
    let spec = *mesh.spec();
    let ps = p_star(spec.n(), spec.s, spec.gamma)?;
    let sub = subcritical_check(&g, ps)?;
    if !lit.atoms.is_empty() && sub.verdict == Subcriticality::CriticalOrSuper {
        return Err(Error::GoodMeasure(format!(
            "goodmeasure: g is not subcritical at p* = {ps}, so g(G[mu]) is not integrable against delta^gamma near the atoms"
        ))
        .into());
    }
    // atoms sit on cell faces so that 𝔾[δ_z] is exact at every node
    let mut snapped = lit.clone();
    for a in &mut snapped.atoms {
        let z = a.x.to_vec();
        if z.len() != spec.dim {
            return Err(CliError::Usage(format!("atom has {} coordinates in dimension {}", z.len(), spec.dim)));
        }
        let v = nearest_vertex(&mesh, &z);
        *a = AtomLiteral { x: if v.len() == 1 { Coord::Scalar(v[0]) } else { Coord::Point(v) }, w: a.w };
    }
    let mu = snapped.build(&mesh, expr::profile)?;
    let (u, report) = match cfg.method {
        Method::Picard => picard_solve(&op, &g, &mu, &cfg.solver)?,
        Method::Monotone => {
            let (lo, hi, rep) = monotone_solve(&op, &g, &mu, &cfg.solver)?;
            let mid = lo.values().iter().zip(hi.values()).map(|(a, b)| 0.5 * (a + b)).collect();
            (GridFunction::new(mesh.clone(), mid)?, rep)
        }
    };
    let b = op.apply_measure(&mu)?;
    let gu: Vec<f64> = u.values().iter().map(|&v| g.eval(v)).collect();
    let agu = op.apply_values(&gu);
    let mut header: Vec<&str> = if spec.dim == 1 { vec!["x"] } else { vec!["x", "y"] };
    header.extend(["delta", "u", "g_u", "residual"]);
    let mut t = Table::new("solution", &header);
    for i in 0..mesh.len() {
        let mut row = mesh.node(i).to_vec();
        let ui = u.values()[i];
        row.extend([mesh.delta()[i], ui, gu[i], ui + agu[i] - b.values()[i]]);
        t.push(row);
    }
    let sup = u.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let ok = report.final_residual() <= cfg.solver.tol && report.sandwich_violation <= 1e-10 * sup;
    let mut config = cfg.base_json();
    config.insert("g".into(), serde_json::to_value(&gspec).expect("g serializes"));
    config.insert("mu".into(), serde_json::to_value(&lit).expect("mu serializes"));
    config.insert("solver".into(), json!({ "tol": cfg.solver.tol, "max_iter": cfg.solver.max_iter, "damping": cfg.solver.damping, "method": cfg.method }));
    Ok(Outcome {
        experiment: "solve".into(),
        verdict: Verdict::from_bool(ok),
        metrics: json!({
            "report": report,
            "p_star": ps,
            "subcriticality": sub,
            "atoms": snapped.atoms,
        }),
        tables: vec![t],
        files: vec![],
        config,
    })
}

fn kato(cfg: &Resolved) -> Result<Outcome, CliError> {
    let op = operator(cfg)?;
    let (s, tables) = kato_suite(&op)?;
    Ok(Outcome {
        experiment: "kato".into(),
        verdict: s.verdict,
        metrics: json!({ "suites": [s] }),
        tables,
        files: vec![],
        config: cfg.base_json(),
    })
}

fn verify(cfg: &Resolved) -> Result<Outcome, CliError> {
    let v = VerifyConfig {
        kernel: cfg.kernel()?,
        resolution: cfg.resolution()?,
        grading: cfg.grading,
        solver: cfg.solver,
        envelope_pairs: cfg.raw.pairs.unwrap_or(10_000),
        draws: cfg.raw.draws.unwrap_or(100),
        seed: cfg.seed,
    };
    let out = run_verify(&v)?;
    let mut config = Map::new();
    config.insert("command".into(), Value::from("verify"));
    if let Some(p) = &cfg.raw.preset {
        config.insert("preset".into(), Value::from(p.clone()));
    }
    config.insert("verify".into(), serde_json::to_value(&v).expect("verify config serializes"));
    config.insert("seed".into(), Value::from(cfg.seed));
    Ok(Outcome {
        experiment: "verify".into(),
        verdict: out.verdict,
        metrics: json!({ "suites": out.suites }),
        tables: out.tables,
        files: vec![],
        config,
    })
}
