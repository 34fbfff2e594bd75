//! Scripted runs for the limit theorems: boundary blow-up profiles, decay of
//! 𝔾[M^p]/M, weak-convergence stability, the criticality sweep and the
//! compactness proxies. Every run returns raw tables plus a verdict.

use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::domain::{distance_to_boundary, Cell, Mesh, MeshOptions};
use crate::error::{Error, Result};
use crate::greenop::GreenOperator;
use crate::kernels::{halton_point, near_field_mass, Kernel, KernelConfig, RegularizedSplit};
use crate::measures::RadonMeasure;
use crate::real::norm;
use crate::solver::{weighted_l1_distance, AffineProblem, Nonlinearity, SolveConfig, SolveReport};
use crate::spaces::{p_star, GridFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Fail dominates, then indeterminate.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Indeterminate, _) | (_, Verdict::Indeterminate) => Verdict::Indeterminate,
            _ => Verdict::Pass,
        }
    }
}

/// A named numeric table written as CSV with 17 significant digits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(format!("{}.csv", self.name));
        let io = |e| Error::Io { path: path.clone(), source: e };
        std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })?;
        let mut f = std::fs::File::create(&path).map_err(io)?;
        f.write_all(self.to_csv().as_bytes()).map_err(io)
    }
}

/// 17 significant digits, '.' decimal separator.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// sha256 of the canonical JSON of any serializable config.
pub fn config_hash<C: Serialize>(cfg: &C) -> String {
    let bytes = serde_json::to_vec(cfg).expect("config serializes");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub config_hash: String,
    pub verdict: Verdict,
    pub metrics: serde_json::Value,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

fn default_p() -> f64 {
    1.3
}
fn default_steps() -> usize {
    6
}
fn default_resolution() -> usize {
    512
}
fn default_grading() -> f64 {
    2.0
}
fn default_ray_start() -> f64 {
    0.2
}
fn default_admissible() -> f64 {
    8.0
}

/// Approach z_n = (1 − 2^{−n−1})·z toward a boundary point, n = 1..steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub kernel: KernelConfig,
    #[serde(default = "default_p")]
    pub p: f64,
    /// Boundary point; defaults to (R, 0, …).
    #[serde(default)]
    pub z: Option<Vec<f64>>,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_grading")]
    pub grading: f64,
    /// First ray distance from z; later ones halve.
    #[serde(default = "default_ray_start")]
    pub ray_start: f64,
    /// Closest ray point in units of the boundary cell width.
    #[serde(default = "default_admissible")]
    pub admissible_cells: f64,
    #[serde(default)]
    pub solver: SolveConfig,
}

impl ExperimentPlan {
    pub fn new(kernel: KernelConfig) -> Self {
        ExperimentPlan {
            kernel,
            p: default_p(),
            z: None,
            steps: default_steps(),
            resolution: default_resolution(),
            grading: default_grading(),
            ray_start: default_ray_start(),
            admissible_cells: default_admissible(),
            solver: SolveConfig::default(),
        }
    }

    pub fn boundary_point(&self) -> Vec<f64> {
        self.z.clone().unwrap_or_else(|| {
            let mut z = vec![0.0; self.kernel.dim];
            z[0] = self.kernel.radius;
            z
        })
    }

    pub fn approach(&self) -> Vec<Vec<f64>> {
        let z = self.boundary_point();
        (1..=self.steps).map(|n| z.iter().map(|c| (1.0 - 0.5f64.powi(n as i32 + 1)) * c).collect()).collect()
    }

    /// Boundary point, exponent range and solver block; p ≥ p* is refused.
    pub fn validate(&self) -> Result<()> {
        self.validate_with(&self.kernel.build::<f64>()?)
    }

    fn validate_with(&self, kernel: &Kernel<f64>) -> Result<()> {
        let spec = kernel.spec();
        let z = self.boundary_point();
        if z.len() != spec.dim || (norm(&z) - spec.radius).abs() > 1e-12 * spec.radius {
            return Err(Error::NotBoundaryPoint { norm: norm(&z), radius: spec.radius });
        }
        let ps = p_star(spec.n(), spec.s, spec.gamma)?;
        if !(self.p > 1.0) {
            return Err(Error::InvalidExponent(format!("boundary runs need p > 1, got {}", self.p)));
        }
        if self.p >= ps {
            return Err(Error::Supercritical { p: self.p, p_star: ps });
        }
        self.solver.validate()
    }

    fn build(&self) -> Result<(Arc<Kernel<f64>>, Arc<Mesh<f64>>, GreenOperator<f64>)> {
        let kernel = Arc::new(self.kernel.build::<f64>()?);
        self.validate_with(&kernel)?;
        // atoms on the approach ray sit on cell faces, never on nodes
        let pins: Vec<f64> = self.approach().iter().map(|p| norm(p)).collect();
        let mesh = Arc::new(Mesh::build(kernel.spec(), &MeshOptions::new(self.resolution, self.grading).pinned(pins))?);
        let op = GreenOperator::assemble_default(kernel.clone(), mesh.clone())?;
        Ok((kernel, mesh, op))
    }

    /// Inward ray points z − d·z/|z| at d = ray_start·2^{−k}, down to the closest admissible distance.
    pub fn ray(&self, mesh: &Mesh<f64>) -> Vec<(f64, Vec<f64>)> {
        let z = self.boundary_point();
        let r = norm(&z);
        let edge = (0..mesh.len()).map(|i| mesh.radial_width(i)).fold(f64::INFINITY, f64::min);
        let closest = self.admissible_cells * edge;
        let mut out = Vec::new();
        let mut d = self.ray_start;
        while d >= closest {
            out.push((d, z.iter().map(|c| c * (1.0 - d / r)).collect()));
            d *= 0.5;
        }
        out
    }
}

/// Solves u + A g(u) = b: monotone bracketing, then Picard from the midpoint.
fn solve_forced(prob: &AffineProblem<'_, f64>, cfg: &SolveConfig) -> Result<(Vec<f64>, SolveReport)> {
    let (lo, hi, _) = prob.monotone(cfg)?;
    let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    prob.picard(Some(&mid), cfg)
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn nondecreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0])
}

/// 𝔾[M(·,z)^p](x)/M(x,z) at the ray points.
pub fn martin_source_decay(plan: &ExperimentPlan) -> Result<ExperimentRecord> {
    let (kernel, mesh, op) = plan.build()?;
    let z = plan.boundary_point();
    let m: Vec<f64> = (0..mesh.len()).map(|i| kernel.martin_unchecked(mesh.node(i), &z)).collect();
    decay_record(plan, &kernel, &mesh, &op, &m)
}

fn decay_table(plan: &ExperimentPlan, kernel: &Kernel<f64>, mesh: &Mesh<f64>, op: &GreenOperator<f64>, m: &[f64]) -> Table {
    let z = plan.boundary_point();
    let mp: Vec<f64> = m.iter().map(|v| v.powf(plan.p)).collect();
    let mut t = Table::new("martin_decay", &["distance", "martin", "green_of_martin_p", "ratio"]);
    for (d, x) in plan.ray(mesh) {
        let mx = kernel.martin_unchecked(&x, &z);
        let g = op.kernel_integral_at(&x, &mp);
        t.push(vec![d, mx, g, g / mx]);
    }
    t
}

fn decay_record(
    plan: &ExperimentPlan,
    kernel: &Kernel<f64>,
    mesh: &Mesh<f64>,
    op: &GreenOperator<f64>,
    m: &[f64],
) -> Result<ExperimentRecord> {
    let t = decay_table(plan, kernel, mesh, op, m);
    let ratios: Vec<f64> = t.rows.iter().map(|r| r[3]).collect();
    let terminal = ratios.last().copied().unwrap_or(f64::NAN);
    let verdict = Verdict::from_bool(strictly_decreasing(&ratios) && terminal < 0.2);
    Ok(ExperimentRecord {
        experiment: "martin_source_decay".into(),
        config_hash: config_hash(plan),
        verdict,
        metrics: serde_json::json!({ "terminal_ratio": terminal, "points": ratios.len() }),
        tables: vec![t],
    })
}

/// Solves along μ_n = δ(z_n)^{−γ}δ_{z_n} and the Martin-forced limit problem.
pub fn boundary_singularity_run(plan: &ExperimentPlan) -> Result<ExperimentRecord> {
    let (kernel, mesh, op) = plan.build()?;
    let spec = *kernel.spec();
    let z = plan.boundary_point();
    let g = Nonlinearity::power(plan.p)?;

    let m: Vec<f64> = (0..mesh.len()).map(|i| kernel.martin_unchecked(mesh.node(i), &z)).collect();
    let limit = AffineProblem::from_profile(&op, &g, m.clone())?;
    let (u, limit_report) = solve_forced(&limit, &plan.solver)?;
    let u_grid = GridFunction::new(mesh.clone(), u.clone())?;
    let above_m = u.iter().zip(&m).fold(0.0f64, |a, (x, y)| a.max(x - y));

    // a second start for the limit problem
    let (u0, _) = limit.picard(Some(&m), &plan.solver)?;
    let limit_spread = weighted_l1_distance(&u_grid, &GridFunction::new(mesh.clone(), u0)?)?;

    let mut seq = Table::new("boundary_sequence", &["n", "distance", "l1_error", "residual", "iterations"]);
    let mut errors = Vec::new();
    for (n, zn) in plan.approach().iter().enumerate() {
        let mu = RadonMeasure::unit_weighted_dirac(&spec, zn.clone())?;
        let prob = AffineProblem::from_measure(&op, &g, &mu)?;
        let (un, rep) = solve_forced(&prob, &plan.solver)?;
        let e = weighted_l1_distance(&GridFunction::new(mesh.clone(), un)?, &u_grid)?;
        errors.push(e);
        seq.push(vec![(n + 1) as f64, distance_to_boundary(&spec, zn)?, e, rep.final_residual(), rep.iterations as f64]);
    }

    let mut prof = Table::new("boundary_profile", &["distance", "u", "martin", "ratio"]);
    let mut ratios = Vec::new();
    for (d, x) in plan.ray(&mesh) {
        let ux = mesh.interpolate(&u, &x);
        let mx = kernel.martin_unchecked(&x, &z);
        ratios.push(ux / mx);
        prof.push(vec![d, ux, mx, ux / mx]);
    }
    let decay = decay_record(plan, &kernel, &mesh, &op, &m)?;
    let terminal = ratios.last().copied().unwrap_or(f64::NAN);
    let decay_terminal = decay.metrics["terminal_ratio"].as_f64().unwrap_or(f64::NAN);

    let errors_ok = strictly_decreasing(&errors);
    let ratio_ok = nondecreasing(&ratios) && (0.85..=1.0).contains(&terminal);
    let verdict = Verdict::from_bool(errors_ok && ratio_ok).and(decay.verdict);
    let mut tables = vec![seq, prof];
    tables.extend(decay.tables);
    Ok(ExperimentRecord {
        experiment: "boundary_singularity".into(),
        config_hash: config_hash(plan),
        verdict,
        metrics: serde_json::json!({
            "l1_errors": errors,
            "errors_strictly_decreasing": errors_ok,
            "terminal_u_over_m": terminal,
            "u_over_m_monotone": nondecreasing(&ratios),
            "terminal_green_mp_over_m": decay_terminal,
            "limit_residual": limit_report.final_residual(),
            "limit_two_start_spread": limit_spread,
            "max_u_minus_m": above_m,
        }),
        tables,
    })
}

/// Nearest cell vertex to `target`: a point that is never a node.
pub fn nearest_vertex(mesh: &Mesh<f64>, target: &[f64]) -> Vec<f64> {
    let mut best = (f64::INFINITY, target.to_vec());
    for c in mesh.cells() {
        let cand: Vec<Vec<f64>> = match *c {
            Cell::Interval { a, b } => vec![vec![a], vec![b]],
            Cell::Sector { r0, r1, t0, t1 } => {
                vec![vec![r0 * t0.cos(), r0 * t0.sin()], vec![r1 * t0.cos(), r1 * t0.sin()], vec![r1 * t1.cos(), r1 * t1.sin()]]
            }
        };
        for p in cand {
            if norm(&p) >= mesh.spec().radius || (mesh.dim() == 2 && norm(&p) == 0.0) {
                continue;
            }
            let d = crate::real::dist(&p, target);
            if d < best.0 {
                best = (d, p);
            }
        }
    }
    best.1
}

fn default_ladder() -> Vec<usize> {
    vec![16, 128, 1024]
}
fn default_sweep_p() -> Vec<f64> {
    vec![1.3, 2.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub kernel: KernelConfig,
    #[serde(default = "default_sweep_p")]
    pub p: Vec<f64>,
    #[serde(default = "default_ladder")]
    pub ladder: Vec<usize>,
    #[serde(default = "default_grading")]
    pub grading: f64,
}

/// ∫ g(𝔾[μ⁺]) δ^γ for a unit-weighted Dirac at the last interior face before
/// the boundary cell, along a refinement ladder.
pub fn criticality_sweep(plan: &SweepPlan) -> Result<ExperimentRecord> {
    let kernel = Arc::new(plan.kernel.build::<f64>()?);
    let spec = *kernel.spec();
    let ps = p_star(spec.n(), spec.s, spec.gamma)?;
    let mut t = Table::new("criticality_sweep", &["p", "resolution", "atom_distance", "envelope_mass"]);
    let mut masses = vec![Vec::new(); plan.p.len()];
    for &n in &plan.ladder {
        let mesh = Arc::new(Mesh::build(&spec, &MeshOptions::new(n, plan.grading))?);
        let op = GreenOperator::assemble_default(kernel.clone(), mesh.clone())?;
        let atom = boundary_adjacent_face(&mesh);
        let mu = RadonMeasure::unit_weighted_dirac(&spec, atom.clone())?;
        let v = op.apply_measure(&mu)?;
        for (k, &p) in plan.p.iter().enumerate() {
            let g = Nonlinearity::power(p)?;
            let gv: Vec<f64> = v.values().iter().map(|&x| g.eval(x)).collect();
            let mass = mesh.weighted_sum(&gv, spec.gamma);
            masses[k].push(mass);
            t.push(vec![p, n as f64, distance_to_boundary(&spec, &atom)?, mass]);
        }
    }
    let mut growth = Vec::new();
    let mut verdict = Verdict::Pass;
    for (k, &p) in plan.p.iter().enumerate() {
        let ratio = masses[k].last().unwrap() / masses[k][0];
        let v = if p < ps {
            Verdict::from_bool(ratio < 3.0)
        } else if p > ps {
            Verdict::from_bool(ratio > 10.0)
        } else {
            Verdict::Indeterminate
        };
        verdict = verdict.and(v);
        growth.push(serde_json::json!({ "p": p, "last_over_first": ratio, "subcritical": p < ps }));
    }
    Ok(ExperimentRecord {
        experiment: "criticality_sweep".into(),
        config_hash: config_hash(plan),
        verdict,
        metrics: serde_json::json!({ "p_star": ps, "growth": growth }),
        tables: vec![t],
    })
}

/// Inner face of the outermost cell on the positive axis.
pub fn boundary_adjacent_face(mesh: &Mesh<f64>) -> Vec<f64> {
    match mesh.dim() {
        1 => match mesh.cells()[mesh.len() - 1] {
            Cell::Interval { a, .. } => vec![a],
            _ => unreachable!(),
        },
        _ => {
            let ring = mesh.rings().last().expect("disk mesh has rings");
            vec![ring.r0, 0.0]
        }
    }
}

fn default_scales() -> Vec<f64> {
    (0..8).map(|k| 0.4 * 0.5f64.powi(k)).collect()
}
fn default_stability_res() -> usize {
    512
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityPlan {
    pub kernel: KernelConfig,
    /// Interior atom; snapped to the nearest cell vertex.
    #[serde(default)]
    pub z0: Option<Vec<f64>>,
    #[serde(default = "default_scales")]
    pub scales: Vec<f64>,
    #[serde(default = "default_stability_res")]
    pub resolution: usize,
    #[serde(default = "default_grading")]
    pub grading: f64,
    /// Scales below this many local cell diameters are at the quadrature floor.
    #[serde(default = "default_floor_cells")]
    pub floor_cells: f64,
}

fn default_floor_cells() -> f64 {
    4.0
}

/// ‖𝔾[μ_scale] − 𝔾[δ_{z0}]‖_{L¹(δ^γ)} for bump mollifications of a Dirac.
pub fn stability_run(plan: &StabilityPlan) -> Result<ExperimentRecord> {
    if plan.scales.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Unordered("mollifier scales must decrease".into()));
    }
    let kernel = Arc::new(plan.kernel.build::<f64>()?);
    let spec = *kernel.spec();
    let mesh = Arc::new(Mesh::build(&spec, &MeshOptions::new(plan.resolution, plan.grading))?);
    let op = GreenOperator::assemble_default(kernel, mesh.clone())?;
    let target = plan.z0.clone().unwrap_or_else(|| vec![0.0; spec.dim]);
    let z0 = nearest_vertex(&mesh, &target);
    let dirac = RadonMeasure::dirac(&spec, z0.clone(), 1.0)?;
    let exact = op.apply_measure(&dirac)?;
    let local = (0..mesh.len())
        .filter(|&i| crate::real::dist(mesh.node(i), &z0) < 2.0 * mesh.diameters()[i])
        .map(|i| mesh.diameters()[i])
        .fold(0.0f64, f64::max);
    let floor_scale = plan.floor_cells * local;
    let mut t = Table::new("stability", &["scale", "l1_error", "above_floor"]);
    let mut resolved = Vec::new();
    for &s in &plan.scales {
        let above = s >= floor_scale;
        let mol = match dirac.mollify(&mesh, s) {
            Ok(m) => m,
            // no node inside the bump: below the floor by construction
            Err(Error::ScaleBelowMesh { .. }) if !above => {
                t.push(vec![s, f64::NAN, 0.0]);
                continue;
            }
            Err(e) => return Err(e),
        };
        let e = weighted_l1_distance(&op.apply_measure(&mol)?, &exact)?;
        if above {
            resolved.push(e);
        }
        t.push(vec![s, e, if above { 1.0 } else { 0.0 }]);
    }
    let verdict = if resolved.len() < 2 { Verdict::Indeterminate } else { Verdict::from_bool(strictly_decreasing(&resolved)) };
    Ok(ExperimentRecord {
        experiment: "stability".into(),
        config_hash: config_hash(plan),
        verdict,
        metrics: serde_json::json!({ "atom": z0, "floor_scale": floor_scale, "resolved_errors": resolved }),
        tables: vec![t],
    })
}

/// Translation, singular-value and near-field scaling proxies for compactness.
#[derive(Debug, Clone, Serialize)]
pub struct CompactnessReport {
    pub translation: [f64; 2],
    pub translation_parts: [[f64; 3]; 2],
    pub sigma_ratio: f64,
    pub singular_values: Vec<f64>,
    pub near_field_ratio: f64,
    pub near_field_window: (f64, f64),
}

/// `family` unit-mass Diracs at quasi-random vertices inside the window,
/// shifts h and h/2 along the first axis.
pub fn compactness_run(op: &GreenOperator<f64>, family: usize, h: f64, window: f64, alpha: f64) -> Result<CompactnessReport> {
    let mesh = op.mesh();
    let spec = *mesh.spec();
    let mut atoms = Vec::new();
    let mut k = 1;
    while atoms.len() < family {
        let p: Vec<f64> = halton_point(&spec, k, (2, 3)).iter().map(|c| c * window / spec.radius).collect();
        k += 1;
        let v = nearest_vertex(mesh, &p);
        if norm(&v) < window && !atoms.contains(&v) {
            atoms.push(v);
        }
    }
    let fam: Vec<RadonMeasure<f64>> =
        atoms.into_iter().map(|a| RadonMeasure::dirac(&spec, a, 1.0)).collect::<Result<_>>()?;
    let mut shift = vec![0.0; spec.dim];
    shift[0] = h;
    let a = op.translation_equicontinuity(&fam, &shift, window)?;
    shift[0] = 0.5 * h;
    let b = op.translation_equicontinuity(&fam, &shift, window)?;
    let sv = op.singular_value_decay(alpha)?;
    let sigma_ratio = sv.get(19).copied().unwrap_or(0.0) / sv[0];

    let kernel = op.kernel();
    let eps = op.split().eps;
    let full = RegularizedSplit::with_default_beta(&spec, eps)?;
    let half = RegularizedSplit::with_default_beta(&spec, 0.5 * eps)?;
    let y = vec![0.0; spec.dim];
    let ratio = near_field_mass(kernel, &full, &y) / near_field_mass(kernel, &half, &y);
    let e = 2f64.powf(2.0 * spec.s);
    Ok(CompactnessReport {
        translation: [a.value, b.value],
        translation_parts: [[a.j1, a.j2, a.j3], [b.j1, b.j2, b.j3]],
        sigma_ratio,
        singular_values: sv.into_iter().take(40).collect(),
        near_field_ratio: ratio,
        near_field_window: (e / 2.0, 2.0 * e),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_format() {
        let mut t = Table::new("x", &["a", "b"]);
        assert_eq!(t.to_csv(), "a,b\n");
        t.push(vec![0.1, -2.0]);
        assert_eq!(t.to_csv(), "a,b\n1.0000000000000001e-1,-2.0000000000000000e0\n");
    }

    #[test]
    fn verdict_combination() {
        assert_eq!(Verdict::Pass.and(Verdict::Indeterminate), Verdict::Indeterminate);
        assert_eq!(Verdict::Indeterminate.and(Verdict::Fail), Verdict::Fail);
    }

    #[test]
    fn approach_sequence() {
        let cfg: KernelConfig = serde_json::from_str(r#"{"kernel":"rfl","s":0.25}"#).unwrap();
        let plan = ExperimentPlan::new(cfg);
        let z = plan.approach();
        assert_eq!(z[0], vec![0.75]);
        assert_eq!(z[5], vec![1.0 - 1.0 / 128.0]);
        let mut bad = plan.clone();
        bad.p = 1.7;
        assert!(matches!(bad.build(), Err(Error::Supercritical { .. })));
    }
}
