//! Dense discrete Green operator with singular-head product integration.
//!
//! Entries are `A[i][j] = Ĝ[i][j]·w_j` with Ĝ symmetric. Beyond the split
//! radius ε, Ĝ is the kernel at the node pair. Inside it, the near-field part
//! uses the cell average of G, with the singular head c|x−y|^{2s−N}
//! integrated along rays from x.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Cell, Mesh};
use crate::error::{Error, Result};
use crate::kernels::{Kernel, RegularizedSplit};
use crate::linalg::{singular_values, Matrix};
use crate::measures::RadonMeasure;
use crate::real::{dist, norm};
use crate::spaces::{lq_norm, GridFunction};
use crate::special::GaussRule;
use crate::Real;

/// Default split radius as a fraction of R.
pub const DEFAULT_EPS_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssemblyReport {
    pub method: String,
    pub eps: f64,
    pub beta: f64,
    pub near_pairs: usize,
    /// Largest relative asymmetry of the cell-averaged table before symmetrization.
    pub raw_asymmetry: f64,
}

#[derive(Debug, Clone)]
pub struct GreenOperator<T> {
    mesh: Arc<Mesh<T>>,
    kernel: Arc<Kernel<T>>,
    split: RegularizedSplit<T>,
    /// Symmetric kernel-level table Ĝ, row-major.
    table: Matrix<T>,
    report: AssemblyReport,
}

/// ∫_a^b |x−y|^{2s−1} dy in closed form.
fn head_interval<T: Real>(p: T, x: T, a: T, b: T) -> T {
    let f = |t: T| t.signum() * t.abs().powf(p) / p;
    f(b - x) - f(a - x)
}

/// Intervals of t ≥ 0 for which x + t·e lies in the annular sector.
fn ray_pieces<T: Real>(x: [T; 2], e: [T; 2], r0: T, r1: T, t0: T, t1: T) -> [(T, T); 2] {
    let zero = T::zero();
    let empty = [(zero, zero), (zero, zero)];
    let b = x[0] * e[0] + x[1] * e[1];
    let c = x[0] * x[0] + x[1] * x[1];
    let disc = b * b - c + r1 * r1;
    if disc <= zero {
        return empty;
    }
    let sq = disc.sqrt();
    let mut lo = (-b - sq).max(zero);
    let mut hi = -b + sq;
    for (t, sign) in [(t0, T::one()), (t1, -T::one())] {
        // sign·(y·n) ≥ 0 with n the left normal of the ray at angle t
        let n = [-t.sin(), t.cos()];
        let a = sign * (x[0] * n[0] + x[1] * n[1]);
        let d = sign * (e[0] * n[0] + e[1] * n[1]);
        if d > zero {
            lo = lo.max(-a / d);
        } else if d < zero {
            hi = hi.min(-a / d);
        } else if a < zero {
            return empty;
        }
    }
    if hi <= lo {
        return empty;
    }
    if r0 > zero {
        let d0 = b * b - c + r0 * r0;
        if d0 > zero {
            let s0 = d0.sqrt();
            let (ea, eb) = (-b - s0, -b + s0);
            if eb > lo && ea < hi {
                return [(lo, ea.max(lo)), (eb.min(hi), hi)];
            }
        }
    }
    [(lo, hi), (zero, zero)]
}

fn angle_norm<T: Real>(t: T) -> T {
    let two_pi = T::c(2.0) * T::PI();
    let r = t % two_pi;
    if r < T::zero() {
        r + two_pi
    } else {
        r
    }
}

/// Factor multiplying the head inside a cell integral, or `None` for 1.
type Factor<'a, T> = Option<&'a (dyn Fn([T; 2]) -> T + Sync)>;

/// ∫_a^b t^{p−1} φ(x + t·e) dt. With u = t^p/p the weight disappears; the
/// u-range is cut where t crosses scale·4^k/2 so that φ is resolved near ∂Ω.
fn ray_integral<T: Real>(p: T, x: [T; 2], e: [T; 2], a: T, b: T, scale: T, phi: Factor<T>, rule: &GaussRule<T>) -> T {
    let Some(phi) = phi else {
        return (b.powf(p) - a.powf(p)) / p;
    };
    let mut cuts = vec![a];
    let mut t = scale * T::c(0.5);
    while t < b {
        if t > a {
            cuts.push(t);
        }
        t = t * T::c(4.0);
    }
    cuts.push(b);
    let inv = T::one() / p;
    cuts.windows(2)
        .map(|w| {
            rule.integrate(w[0].powf(p) * inv, w[1].powf(p) * inv, |u| {
                let t = (p * u).powf(inv);
                phi([x[0] + t * e[0], x[1] + t * e[1]])
            })
        })
        .sum()
}

/// ∫_cell |x−y|^{p−2} φ(y) dy over an annular sector in polar coordinates about x.
fn head_sector_polar<T: Real>(
    p: T,
    x: [T; 2],
    (r0, r1, t0, t1): (T, T, T, T),
    phi: Factor<T>,
    scale: T,
    rule: &GaussRule<T>,
    ray: &GaussRule<T>,
) -> T {
    let two_pi = T::c(2.0) * T::PI();
    let mut cuts = vec![T::zero(), two_pi];
    let mut corner = |q: [T; 2]| {
        let d = [q[0] - x[0], q[1] - x[1]];
        if d[0] != T::zero() || d[1] != T::zero() {
            cuts.push(angle_norm(d[1].atan2(d[0])));
        }
    };
    for r in [r0, r1] {
        for t in [t0, t1] {
            corner([r * t.cos(), r * t.sin()]);
        }
    }
    for t in [t0, t1] {
        cuts.push(angle_norm(t));
        cuts.push(angle_norm(t + T::PI()));
    }
    let rx = norm(&x);
    let tx = x[1].atan2(x[0]);
    for r in [r0, r1] {
        if r > T::zero() && rx > r {
            let a = (r / rx).asin();
            cuts.push(angle_norm(tx + a));
            cuts.push(angle_norm(tx - a));
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut total = T::zero();
    for w in cuts.windows(2) {
        if w[1] - w[0] <= T::epsilon() {
            continue;
        }
        total = total
            + rule.integrate(w[0], w[1], |th| {
                let e = [th.cos(), th.sin()];
                ray_pieces(x, e, r0, r1, t0, t1)
                    .iter()
                    .map(|&(a, b)| if b > a { ray_integral(p, x, e, a, b, scale, phi, ray) } else { T::zero() })
                    .sum()
            });
    }
    total
}

/// Tensor Gauss rule on the sector in (r, θ).
fn head_sector_gauss<T: Real>(p: T, x: [T; 2], (r0, r1, t0, t1): (T, T, T, T), phi: Factor<T>, rule: &GaussRule<T>) -> T {
    let e = p - T::c(2.0);
    rule.integrate(r0, r1, |r| {
        r * rule.integrate(t0, t1, |t| {
            let y = [r * t.cos(), r * t.sin()];
            let dx = y[0] - x[0];
            let dy = y[1] - x[1];
            let f = phi.map_or(T::one(), |f| f(y));
            (dx * dx + dy * dy).powf(e * T::c(0.5)) * f
        })
    })
}

struct HeadRules<T> {
    polar: GaussRule<T>,
    ray: GaussRule<T>,
    near: GaussRule<T>,
    mid: GaussRule<T>,
    far: GaussRule<T>,
}

impl<T: Real> HeadRules<T> {
    fn new() -> Self {
        HeadRules {
            polar: GaussRule::new(10),
            ray: GaussRule::new(4),
            near: GaussRule::new(6),
            mid: GaussRule::new(3),
            far: GaussRule::new(2),
        }
    }
}

/// ∫_cell G(x, y) dy. The head is integrated exactly. When the cell is small
/// against δ(x) and δ(x_j) the regular part is taken at the node; otherwise
/// (2D boundary-layer sectors are much wider than δ) G is integrated as
/// c|x−y|^{2s−N}·φ with φ sampled inside the cell.
fn cell_integral<T: Real>(kernel: &Kernel<T>, mesh: &Mesh<T>, j: usize, x: &[T], rules: &HeadRules<T>) -> T {
    let spec = mesh.spec();
    let s2 = spec.s + spec.s;
    let c = kernel.singular_coefficient();
    match mesh.cells()[j] {
        Cell::Interval { a, b } => {
            c * head_interval(s2, x[0], a, b) + kernel.regular_part(x, mesh.node(j)) * mesh.weights()[j]
        }
        Cell::Sector { r0, r1, t0, t1 } => {
            let xx = [x[0], x[1]];
            let sector = (r0, r1, t0, t1);
            let f = |y: [T; 2]| kernel.head_factor(x, &y);
            let dx = spec.radius - norm(x);
            let resolved = mesh.diameters()[j] <= T::c(0.5) * dx.min(mesh.delta()[j]);
            let phi: Factor<T> = if resolved { None } else { Some(&f) };
            let nodal = if resolved { kernel.regular_part(x, mesh.node(j)) * mesh.weights()[j] } else { T::zero() };
            let ratio = dist(x, mesh.node(j)) / mesh.diameters()[j];
            let v = if ratio < T::c(2.5) {
                head_sector_polar(s2, xx, sector, phi, dx, &rules.polar, &rules.ray)
            } else if ratio < T::c(6.0) {
                head_sector_gauss(s2, xx, sector, phi, &rules.near)
            } else if ratio < T::c(15.0) {
                head_sector_gauss(s2, xx, sector, phi, &rules.mid)
            } else {
                head_sector_gauss(s2, xx, sector, phi, &rules.far)
            };
            c * v + nodal
        }
    }
}

/// Which part of G a table entry uses, by distance.
enum Zone<T> {
    Far,
    Near(T),
}

impl<T: Real> GreenOperator<T> {
    /// Assembles with ε = R/2 and the default β.
    pub fn assemble_default(kernel: Arc<Kernel<T>>, mesh: Arc<Mesh<T>>) -> Result<Self> {
        let split = RegularizedSplit::with_default_beta(mesh.spec(), T::c(DEFAULT_EPS_FRACTION) * mesh.spec().radius)?;
        Self::assemble(kernel, mesh, split)
    }

    pub fn assemble(kernel: Arc<Kernel<T>>, mesh: Arc<Mesh<T>>, split: RegularizedSplit<T>) -> Result<Self> {
        if kernel.spec() != mesh.spec() {
            return Err(Error::InvalidKernel(format!(
                "kernel {} does not match mesh spec {:?}",
                kernel.describe(),
                mesh.spec()
            )));
        }
        let n = mesh.len();
        let rules = HeadRules::new();
        let rows: Vec<(Vec<T>, usize)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let xi = mesh.node(i);
                let mut near = 0;
                let row = (0..n)
                    .map(|j| match Self::zone(&split, xi, mesh.node(j)) {
                        Zone::Far => kernel.green_unchecked(xi, mesh.node(j)),
                        Zone::Near(k) => {
                            near += 1;
                            Self::blend(&kernel, &mesh, &rules, xi, j, k)
                        }
                    })
                    .collect();
                (row, near)
            })
            .collect();
        let near_pairs = rows.iter().map(|r| r.1).sum();
        let mut data = Vec::with_capacity(n * n);
        for (r, _) in &rows {
            data.extend_from_slice(r);
        }
        let mut table = Matrix::from_vec(n, n, data);
        let mut raw = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (table[(i, j)], table[(j, i)]);
                let m = T::c(0.5) * (a + b);
                if m != T::zero() {
                    raw = raw.max(((a - b) / m).abs());
                }
                table[(i, j)] = m;
                table[(j, i)] = m;
            }
        }
        let report = AssemblyReport {
            method: "head-product-integration+symmetrized".into(),
            eps: split.eps.f64(),
            beta: split.beta.f64(),
            near_pairs,
            raw_asymmetry: raw.f64(),
        };
        Ok(GreenOperator { mesh, kernel, split, table, report })
    }

    fn zone(split: &RegularizedSplit<T>, x: &[T], y: &[T]) -> Zone<T> {
        let r = dist(x, y);
        if r >= split.eps {
            Zone::Far
        } else {
            Zone::Near(split.cutoff(r))
        }
    }

    /// G^ε(x, x_j) + (1 − K)·(cell average of G over cell j).
    fn blend(kernel: &Kernel<T>, mesh: &Mesh<T>, rules: &HeadRules<T>, x: &[T], j: usize, k: T) -> T {
        let xj = mesh.node(j);
        let avg = cell_integral(kernel, mesh, j, x, rules) / mesh.weights()[j];
        let far = if k > T::zero() { kernel.green_unchecked(x, xj) * k } else { T::zero() };
        far + (T::one() - k) * avg
    }

    pub fn mesh(&self) -> &Arc<Mesh<T>> {
        &self.mesh
    }

    pub fn kernel(&self) -> &Arc<Kernel<T>> {
        &self.kernel
    }

    pub fn split(&self) -> &RegularizedSplit<T> {
        &self.split
    }

    pub fn report(&self) -> &AssemblyReport {
        &self.report
    }

    pub fn len(&self) -> usize {
        self.mesh.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mesh.is_empty()
    }

    /// Kernel-level symmetric table Ĝ.
    pub fn kernel_table(&self) -> &Matrix<T> {
        &self.table
    }

    /// A[i][j] = Ĝ[i][j]·w_j.
    pub fn entry(&self, i: usize, j: usize) -> T {
        self.table[(i, j)] * self.mesh.weights()[j]
    }

    /// The full weighted matrix A.
    pub fn matrix(&self) -> Matrix<T> {
        let n = self.len();
        let w = self.mesh.weights();
        let data = (0..n * n).map(|k| self.table.data()[k] * w[k % n]).collect();
        Matrix::from_vec(n, n, data)
    }

    fn check(&self, f: &GridFunction<T>) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::MeshMismatch { expected: self.len(), got: f.len() });
        }
        Ok(())
    }

    /// Raw A·v on node values.
    pub fn apply_values(&self, v: &[T]) -> Vec<T> {
        let wv: Vec<T> = v.iter().zip(self.mesh.weights()).map(|(&a, &w)| a * w).collect();
        self.table.matvec(&wv)
    }

    /// 𝔾[f] at the nodes.
    pub fn apply_density(&self, f: &GridFunction<T>) -> Result<GridFunction<T>> {
        self.check(f)?;
        GridFunction::new(self.mesh.clone(), self.apply_values(f.values()))
    }

    /// Refuses atoms closer to a node than that node's cell radius.
    pub fn check_atoms(&self, mu: &RadonMeasure<T>) -> Result<()> {
        let slack = T::one() - T::c(1e-9);
        for a in mu.atoms() {
            for i in 0..self.len() {
                if dist(self.mesh.node(i), &a.location) < self.mesh.cell_radii()[i] * slack {
                    return Err(Error::AtomCollision { location: a.location.iter().map(|v| v.f64()).collect(), node: i });
                }
            }
        }
        Ok(())
    }

    /// 𝔾[μ] at the nodes: exact kernel columns for atoms plus 𝔾 of the density.
    pub fn apply_measure(&self, mu: &RadonMeasure<T>) -> Result<GridFunction<T>> {
        self.check_atoms(mu)?;
        let n = self.len();
        let mut out = match mu.density() {
            Some(f) => {
                self.check(f)?;
                self.apply_values(f.values())
            }
            None => vec![T::zero(); n],
        };
        for a in mu.atoms() {
            let col: Vec<T> = (0..n)
                .into_par_iter()
                .map(|i| self.kernel.green_unchecked(self.mesh.node(i), &a.location))
                .collect();
            for (o, g) in out.iter_mut().zip(col) {
                *o = *o + a.weight * g;
            }
        }
        GridFunction::new(self.mesh.clone(), out)
    }

    /// ∫ G(y, x) v(x) dx with G integrated over each cell and v piecewise constant.
    pub fn kernel_integral_at(&self, y: &[T], v: &[T]) -> T {
        let rules = HeadRules::new();
        let m = &self.mesh;
        (0..self.len())
            .into_par_iter()
            .map(|j| cell_integral(&self.kernel, m, j, y, &rules) * v[j])
            .collect::<Vec<T>>()
            .into_iter()
            .sum()
    }

    /// ∫ 𝔾[μ] ξ: atoms through [`kernel_integral_at`](Self::kernel_integral_at),
    /// the density part through the table.
    pub fn pair_measure_with(&self, mu: &RadonMeasure<T>, xi: &GridFunction<T>) -> Result<T> {
        self.check(xi)?;
        let mut total = T::zero();
        for a in mu.atoms() {
            self.kernel.spec();
            crate::domain::distance_to_boundary(self.mesh.spec(), &a.location)?;
            total = total + a.weight * self.kernel_integral_at(&a.location, xi.values());
        }
        if let Some(f) = mu.density() {
            self.check(f)?;
            let gf = self.apply_values(f.values());
            total = total + self.mesh.weighted_sum(&gf.iter().zip(xi.values()).map(|(&a, &b)| a * b).collect::<Vec<_>>(), T::zero());
        }
        Ok(total)
    }

    /// ∫ 𝔾[ξ] dμ with 𝔾[ξ] taken from the nodal table and interpolated at atoms.
    pub fn pair_with_measure(&self, xi: &GridFunction<T>, mu: &RadonMeasure<T>) -> Result<T> {
        self.check(xi)?;
        let gx = self.apply_values(xi.values());
        let mut total = T::zero();
        for a in mu.atoms() {
            total = total + a.weight * self.mesh.interpolate(&gx, &a.location);
        }
        if let Some(f) = mu.density() {
            self.check(f)?;
            total = total + self.mesh.weighted_sum(&gx.iter().zip(f.values()).map(|(&a, &b)| a * b).collect::<Vec<_>>(), T::zero());
        }
        Ok(total)
    }

    pub fn duality_gap(&self, mu: &RadonMeasure<T>, xi: &GridFunction<T>) -> Result<DualityGap<T>> {
        let lhs = self.pair_measure_with(mu, xi)?;
        let rhs = self.pair_with_measure(xi, mu)?;
        Ok(DualityGap { lhs, rhs, gap: (lhs - rhs).abs(), scale: lhs.abs().max(rhs.abs()) })
    }

    /// ‖𝔾[f]‖_∞ / ‖f‖_{L^r(δ^γ)} and the largest jump of 𝔾[f] between neighbouring nodes.
    pub fn sup_bound_check(&self, f: &GridFunction<T>, r: T) -> Result<SupBoundReport<T>> {
        self.check(f)?;
        let spec = self.mesh.spec();
        let threshold = (spec.n() + spec.gamma) / (spec.s + spec.s);
        let u = self.apply_values(f.values());
        let sup = u.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
        let denom = lq_norm(f, r, spec.gamma)?;
        let ratio = if denom > T::zero() { sup / denom } else { T::zero() };
        let mut jump = T::zero();
        match spec.dim {
            1 => {
                for w in u.windows(2) {
                    jump = jump.max((w[1] - w[0]).abs());
                }
            }
            _ => {
                for ring in self.mesh.rings() {
                    for k in 0..ring.count {
                        let a = ring.first + k;
                        let b = ring.first + (k + 1) % ring.count;
                        jump = jump.max((u[a] - u[b]).abs());
                    }
                }
                for pair in self.mesh.rings().windows(2) {
                    for k in 0..pair[1].count {
                        let b = pair[1].first + k;
                        let kk = k * pair[0].count / pair[1].count;
                        jump = jump.max((u[pair[0].first + kk] - u[b]).abs());
                    }
                }
            }
        }
        Ok(SupBoundReport { ratio, sup, lr_norm: denom, max_jump: jump, below_threshold: r <= threshold, threshold })
    }

    /// sup over the family of ∫_K |𝔾[μ](x+h) − 𝔾[μ](x)| dx with K the ball of
    /// radius `window` about the origin, by direct kernel evaluation on a fine grid.
    pub fn translation_equicontinuity(&self, family: &[RadonMeasure<T>], h: &[T], window: T) -> Result<Equicontinuity<T>> {
        let spec = self.mesh.spec();
        if window + norm(h) >= spec.radius {
            return Err(Error::WindowViolation);
        }
        let (points, cell) = window_grid(spec.dim, window);
        let kernel = &self.kernel;
        let split = &self.split;
        let mut best = Equicontinuity { value: T::zero(), j1: T::zero(), j2: T::zero(), j3: T::zero() };
        for mu in family {
            let parts: Vec<[T; 4]> = points
                .par_iter()
                .map(|x| {
                    let xh: Vec<T> = x.iter().zip(h).map(|(&a, &b)| a + b).collect();
                    let (mut d, mut h0, mut h1, mut g) = (T::zero(), T::zero(), T::zero(), T::zero());
                    for a in mu.atoms() {
                        let r0 = dist(x, &a.location);
                        let r1 = dist(&xh, &a.location);
                        let g0 = kernel.green_unchecked(x, &a.location);
                        let g1 = kernel.green_unchecked(&xh, &a.location);
                        d = d + a.weight * (g1 - g0);
                        let (k0, k1) = (split.cutoff(r0), split.cutoff(r1));
                        h0 = h0 + a.weight * g0 * (T::one() - k0);
                        h1 = h1 + a.weight * g1 * (T::one() - k1);
                        g = g + a.weight * (g1 * k1 - g0 * k0);
                    }
                    [d.abs(), h0.abs(), h1.abs(), g.abs()]
                })
                .collect();
            let mut sums = [T::zero(); 4];
            for p in &parts {
                for k in 0..4 {
                    sums[k] = sums[k] + p[k] * cell;
                }
            }
            if sums[0] > best.value {
                best = Equicontinuity { value: sums[0], j1: sums[1], j2: sums[2], j3: sums[3] };
            }
        }
        Ok(best)
    }

    /// Singular values of v ↦ m^{1/2} A (m^{−1/2} v) with m = δ^α w, i.e. of 𝔾
    /// acting on L²(Ω, δ^α).
    pub fn singular_value_decay(&self, alpha: T) -> Result<Vec<T>> {
        let n = self.len();
        if n > 4000 {
            return Err(Error::SizeGuard(n));
        }
        let m: Vec<T> = self
            .mesh
            .delta()
            .iter()
            .zip(self.mesh.weights())
            .map(|(&d, &w)| (d.powf(alpha) * w).sqrt())
            .collect();
        let mut b = self.matrix();
        for i in 0..n {
            for j in 0..n {
                b[(i, j)] = m[i] * b[(i, j)] / m[j];
            }
        }
        Ok(singular_values(&b))
    }

    /// Largest relative asymmetry |A_ij/w_j − A_ji/w_i| / |A_ij/w_j| off the diagonal.
    pub fn weighted_asymmetry(&self) -> T {
        let n = self.len();
        let w = self.mesh.weights();
        let mut worst = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                let a = self.entry(i, j) / w[j];
                let b = self.entry(j, i) / w[i];
                if a != T::zero() {
                    worst = worst.max(((a - b) / a).abs());
                }
            }
        }
        worst
    }

    pub fn min_entry(&self) -> T {
        self.table.data().iter().fold(T::infinity(), |a, &b| a.min(b))
    }

    /// Writes `NLGOP1\n`, a little-endian u64 header length, the JSON header and
    /// the row-major table of A as little-endian f64.
    pub fn export(&self, path: &Path) -> Result<()> {
        let header = OperatorHeader {
            mesh_hash: self.mesh.hash(),
            nodes: self.len(),
            backend: self.kernel.describe(),
            eps: self.split.eps.f64(),
            beta: self.split.beta.f64(),
            method: self.report.method.clone(),
        };
        let head = serde_json::to_vec(&header).expect("header serializes");
        let io = |e| Error::Io { path: path.to_path_buf(), source: e };
        let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
        f.write_all(b"NLGOP1\n").map_err(io)?;
        f.write_all(&(head.len() as u64).to_le_bytes()).map_err(io)?;
        f.write_all(&head).map_err(io)?;
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                f.write_all(&self.entry(i, j).f64().to_le_bytes()).map_err(io)?;
            }
        }
        f.flush().map_err(io)
    }

    /// Reads an exported table back, checking the mesh hash.
    pub fn import(path: &Path, kernel: Arc<Kernel<T>>, mesh: Arc<Mesh<T>>, split: RegularizedSplit<T>) -> Result<Self> {
        let io = |e| Error::Io { path: path.to_path_buf(), source: e };
        let mut f = std::io::BufReader::new(std::fs::File::open(path).map_err(io)?);
        let mut magic = [0u8; 7];
        f.read_exact(&mut magic).map_err(io)?;
        if &magic != b"NLGOP1\n" {
            return Err(Error::Config(format!("{}: not an operator file", path.display())));
        }
        let mut len = [0u8; 8];
        f.read_exact(&mut len).map_err(io)?;
        let mut head = vec![0u8; u64::from_le_bytes(len) as usize];
        f.read_exact(&mut head).map_err(io)?;
        let header: OperatorHeader =
            serde_json::from_slice(&head).map_err(|e| Error::Config(format!("{}: bad header: {e}", path.display())))?;
        if header.mesh_hash != mesh.hash() || header.nodes != mesh.len() {
            return Err(Error::Config(format!("{}: mesh hash mismatch", path.display())));
        }
        let n = mesh.len();
        let mut data = Vec::with_capacity(n * n);
        let mut buf = [0u8; 8];
        for k in 0..n * n {
            f.read_exact(&mut buf).map_err(io)?;
            data.push(T::c(f64::from_le_bytes(buf)) / mesh.weights()[k % n]);
        }
        let report = AssemblyReport {
            method: header.method,
            eps: header.eps,
            beta: header.beta,
            near_pairs: 0,
            raw_asymmetry: 0.0,
        };
        Ok(GreenOperator { mesh, kernel, split, table: Matrix::from_vec(n, n, data), report })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorHeader {
    pub mesh_hash: String,
    pub nodes: usize,
    pub backend: String,
    pub eps: f64,
    pub beta: f64,
    pub method: String,
}

/// Midpoint grid on the ball of the given radius with cell volume.
fn window_grid<T: Real>(dim: usize, window: T) -> (Vec<Vec<T>>, T) {
    // irrational offset keeps samples off atoms placed at simple fractions
    let offset = T::c(0.318_309_886_183_790_7);
    match dim {
        1 => {
            let m = 8192;
            let h = T::c(2.0) * window / T::n(m);
            ((0..m).map(|k| vec![-window + h * (T::n(k) + offset)]).collect(), h)
        }
        _ => {
            let m = 240;
            let h = T::c(2.0) * window / T::n(m);
            let mut pts = Vec::new();
            for a in 0..m {
                for b in 0..m {
                    let p = vec![-window + h * (T::n(a) + offset), -window + h * (T::n(b) + offset)];
                    if norm(&p) < window {
                        pts.push(p);
                    }
                }
            }
            (pts, h * h)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityGap<T> {
    pub lhs: T,
    pub rhs: T,
    pub gap: T,
    pub scale: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupBoundReport<T> {
    pub ratio: T,
    pub sup: T,
    pub lr_norm: T,
    pub max_jump: T,
    /// r at or below (N+γ)/(2s): the bound is not guaranteed.
    pub below_threshold: bool,
    pub threshold: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equicontinuity<T> {
    pub value: T,
    /// Near-field parts at x and x+h, and the cut-off far-field difference.
    pub j1: T,
    pub j2: T,
    pub j3: T,
}

/// ξ = δ^γ·w with w bounded.
#[derive(Debug, Clone)]
pub struct TestFunction<T> {
    pub bounded: GridFunction<T>,
}

impl<T: Real> TestFunction<T> {
    pub fn new(bounded: GridFunction<T>) -> Self {
        TestFunction { bounded }
    }

    pub fn realize(&self) -> GridFunction<T> {
        let g = self.bounded.mesh().spec().gamma;
        let d = self.bounded.mesh().delta().to_vec();
        let vals = self.bounded.values().iter().zip(&d).map(|(&w, &d)| w * d.powf(g)).collect();
        GridFunction::new(self.bounded.mesh().clone(), vals).expect("same mesh").with_label(self.bounded.label().unwrap_or("xi").to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_mesh, DomainSpec};

    fn op(n: usize) -> GreenOperator<f64> {
        let spec = DomainSpec::unit(1, 0.25, 0.25).unwrap();
        let k = Arc::new(Kernel::rfl(spec).unwrap());
        let m = Arc::new(build_mesh(&spec, n, 2.0).unwrap());
        GreenOperator::assemble_default(k, m).unwrap()
    }

    #[test]
    fn head_interval_integral() {
        // ∫_{-1}^{2} |y|^{-1/2} dy = 2 + 2√2
        let v = head_interval(0.5f64, 0.0, -1.0, 2.0);
        assert!((v - (2.0 + 2.0 * 2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn sector_polar_matches_gauss() {
        let rule = GaussRule::new(10);
        let fine = GaussRule::new(40);
        let (r0, r1, t0, t1) = (0.4, 0.5, 0.2, 0.6);
        // far point: polar rays and plain Gauss agree
        let x = [-0.3, 0.1];
        let a: f64 = head_sector_polar(1.0, x, (r0, r1, t0, t1), None, 1.0, &rule, &rule);
        let b = head_sector_gauss(1.0, x, (r0, r1, t0, t1), None, &fine);
        assert!((a - b).abs() < 1e-10 * b, "{a} {b}");
        // p = 2 gives the area for any point
        let area = 0.5 * (t1 - t0) * (r1 * r1 - r0 * r0);
        let inside = [0.45 * 0.4f64.cos(), 0.45 * 0.4f64.sin()];
        let c = head_sector_polar(2.0, inside, (r0, r1, t0, t1), None, 1.0, &rule, &rule);
        assert!((c - area).abs() < 1e-10, "{c} {area}");
        let d = head_sector_polar(2.0, [0.0, 0.0], (0.0, r1, t0, t1), None, 1.0, &rule, &rule);
        assert!((d - 0.5 * (t1 - t0) * r1 * r1).abs() < 1e-10);
    }

    #[test]
    fn operator_invariants() {
        let g = op(128);
        assert!(g.min_entry() > 0.0);
        assert!(g.weighted_asymmetry() <= 1e-12);
        let one = GridFunction::constant(g.mesh().clone(), 1.0);
        let u = g.apply_density(&one).unwrap();
        assert!(u.values().iter().all(|v| v.is_finite() && *v > 0.0));
        let zero = g.apply_density(&GridFunction::zeros(g.mesh().clone())).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dirac_column_is_exact() {
        let g = op(64);
        let spec = *g.mesh().spec();
        let y = 0.0; // a face of the even uniform-centre mesh
        let mu = RadonMeasure::dirac(&spec, vec![y], 1.0).unwrap();
        let u = g.apply_measure(&mu).unwrap();
        for i in 0..g.len() {
            assert_eq!(u.values()[i], g.kernel().green(g.mesh().node(i), &[y]).unwrap());
        }
        let bad = RadonMeasure::dirac(&spec, g.mesh().node(5).to_vec(), 1.0).unwrap();
        assert!(matches!(g.apply_measure(&bad), Err(Error::AtomCollision { .. })));
    }

    #[test]
    fn export_roundtrip() {
        let g = op(16);
        let dir = std::env::temp_dir().join(format!("nlgreen-op-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("op.bin");
        g.export(&p).unwrap();
        let back = GreenOperator::import(&p, g.kernel().clone(), g.mesh().clone(), *g.split()).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                assert!((back.entry(i, j) - g.entry(i, j)).abs() <= 1e-15 * g.entry(i, j));
            }
        }
        std::fs::remove_dir_all(dir).ok();
    }
}
