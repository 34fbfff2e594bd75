//! Balls, boundary distance and graded quadrature meshes.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::real::norm;
use crate::special::gamma;
use crate::Real;

/// The ball B_R ⊂ ℝ^N together with the operator order `s` and boundary exponent `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DomainSpec<T> {
    pub dim: usize,
    pub radius: T,
    pub s: T,
    pub gamma: T,
}

impl<T: Real> DomainSpec<T> {
    pub fn new(dim: usize, radius: T, s: T, gamma: T) -> Result<Self> {
        let (zero, one) = (T::zero(), T::one());
        if dim == 0 {
            return Err(Error::InvalidDomain("dimension must be positive".into()));
        }
        if !(radius > zero) || !radius.is_finite() {
            return Err(Error::InvalidDomain(format!("radius {radius} must be positive")));
        }
        if !(s > zero && s < one) {
            return Err(Error::InvalidDomain(format!("s = {s} must lie in (0,1)")));
        }
        if !(gamma > zero && gamma <= one) {
            return Err(Error::InvalidDomain(format!("gamma = {gamma} must lie in (0,1]")));
        }
        if !(T::n(dim) > s + s) {
            return Err(Error::InvalidDomain(format!("N = {dim} must exceed 2s = {}", s + s)));
        }
        Ok(DomainSpec { dim, radius, s, gamma })
    }

    pub fn unit(dim: usize, s: T, gamma: T) -> Result<Self> {
        Self::new(dim, T::one(), s, gamma)
    }

    pub fn n(&self) -> T {
        T::n(self.dim)
    }

    /// Lebesgue measure of the ball.
    pub fn volume(&self) -> T {
        let half_n = self.n() * T::c(0.5);
        T::PI().powf(half_n) * self.radius.powf(self.n()) / gamma(half_n + T::one())
    }

    /// ∫_Ω δ(x)^α dx in closed form for N ∈ {1, 2}.
    pub fn weight_integral(&self, alpha: T) -> T {
        let one = T::one();
        let r = self.radius;
        match self.dim {
            1 => T::c(2.0) * r.powf(one + alpha) / (one + alpha),
            2 => {
                T::c(2.0) * T::PI() * r.powf(alpha + T::c(2.0))
                    / ((alpha + one) * (alpha + T::c(2.0)))
            }
            _ => {
                // surface measure times ∫₀^R (R−r)^α r^{N−1} dr, a Beta integral
                let n = self.n();
                let surface = T::c(2.0) * T::PI().powf(n * T::c(0.5)) / gamma(n * T::c(0.5));
                surface * r.powf(alpha + n) * crate::special::beta(alpha + one, n)
            }
        }
    }

    pub fn contains(&self, x: &[T]) -> bool {
        norm(x) < self.radius
    }
}

/// δ(x) = R − |x|; a point on or outside the boundary is an error.
pub fn distance_to_boundary<T: Real>(spec: &DomainSpec<T>, x: &[T]) -> Result<T> {
    if x.len() != spec.dim {
        return Err(Error::InvalidDomain(format!(
            "point of dimension {} in a {}-dimensional domain",
            x.len(),
            spec.dim
        )));
    }
    let d = spec.radius - norm(x);
    if d > T::zero() {
        Ok(d)
    } else {
        Err(Error::OutsideDomain(d.f64()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Cell<T> {
    Interval { a: T, b: T },
    /// Annular sector r0 ≤ r ≤ r1, t0 ≤ θ ≤ t1.
    Sector { r0: T, r1: T, t0: T, t1: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ring<T> {
    pub r0: T,
    pub r1: T,
    pub centroid_radius: T,
    pub first: usize,
    pub count: usize,
}

#[derive(Debug, Clone)]
pub struct MeshOptions<T> {
    pub resolution: usize,
    pub grading: T,
    /// Radii forced to coincide with cell faces (mirrored to ±r on the interval).
    pub pins: Vec<T>,
}

impl<T: Real> MeshOptions<T> {
    pub fn new(resolution: usize, grading: T) -> Self {
        MeshOptions { resolution, grading, pins: Vec::new() }
    }

    pub fn pinned(mut self, pins: Vec<T>) -> Self {
        self.pins = pins;
        self
    }
}

/// Midpoint-rule mesh: one node per cell, node = cell centroid, weight = cell volume.
#[derive(Debug, Clone)]
pub struct Mesh<T> {
    spec: DomainSpec<T>,
    resolution: usize,
    grading: T,
    nodes: Vec<T>,
    weights: Vec<T>,
    delta: Vec<T>,
    diameters: Vec<T>,
    radii: Vec<T>,
    boundary_layer: Vec<bool>,
    cells: Vec<Cell<T>>,
    rings: Vec<Ring<T>>,
}

/// Nodes closer to the boundary than this fraction of R are flagged as boundary layer.
pub const LAYER_FRACTION: f64 = 0.1;

pub fn build_mesh<T: Real>(spec: &DomainSpec<T>, resolution: usize, grading: T) -> Result<Mesh<T>> {
    Mesh::build(spec, &MeshOptions::new(resolution, grading))
}

fn graded<T: Real>(t: T, grading: T) -> T {
    T::one() - (T::one() - t).powf(grading)
}

fn apply_pins<T: Real>(faces: &mut [T], pins: &[T], radius: T) -> Result<()> {
    for &p in pins {
        if !(p > T::zero() && p < radius) {
            return Err(Error::InvalidMesh(format!("pinned radius {p} outside (0, R)")));
        }
        let mut best = None;
        for (k, &f) in faces.iter().enumerate() {
            if f > T::zero() && f < radius {
                let d = (f - p).abs();
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((k, d));
                }
            }
        }
        let (k, _) = best.ok_or_else(|| Error::InvalidMesh("no interior face to pin".into()))?;
        faces[k] = p;
    }
    Ok(())
}

impl<T: Real> Mesh<T> {
    pub fn build(spec: &DomainSpec<T>, opts: &MeshOptions<T>) -> Result<Self> {
        if opts.resolution < 4 {
            return Err(Error::InvalidMesh(format!("resolution {} below 4", opts.resolution)));
        }
        if !(opts.grading >= T::one()) {
            return Err(Error::InvalidMesh(format!("grading {} below 1", opts.grading)));
        }
        if !(spec.n() > spec.s + spec.s) {
            return Err(Error::InvalidDomain("N must exceed 2s".into()));
        }
        match spec.dim {
            1 => Self::build_interval(spec, opts),
            2 => Self::build_disk(spec, opts),
            d => Err(Error::InvalidMesh(format!("meshes exist for N = 1, 2 only, got {d}"))),
        }
    }

    fn build_interval(spec: &DomainSpec<T>, opts: &MeshOptions<T>) -> Result<Self> {
        let n = opts.resolution;
        let r = spec.radius;
        let mut faces: Vec<T> = (0..=n)
            .map(|k| {
                let t = T::c(-1.0) + T::c(2.0) * T::n(k) / T::n(n);
                r * t.signum() * graded(t.abs(), opts.grading)
            })
            .collect();
        faces[0] = -r;
        faces[n] = r;
        if n % 2 == 0 {
            faces[n / 2] = T::zero();
        }
        // pin the positive half and mirror it
        let mut right: Vec<T> = faces[n / 2..].to_vec();
        apply_pins(&mut right, &opts.pins, r)?;
        for (k, &f) in right.iter().enumerate() {
            faces[n / 2 + k] = f;
            faces[n - (n / 2 + k)] = -f;
        }
        if faces.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidMesh("pinning produced a degenerate cell".into()));
        }
        let mut mesh = Mesh::empty(spec, opts);
        for w in faces.windows(2) {
            let (a, b) = (w[0], w[1]);
            let x = T::c(0.5) * (a + b);
            mesh.push(&[x], b - a, b - a, T::c(0.5) * (b - a), Cell::Interval { a, b });
        }
        mesh.finish();
        Ok(mesh)
    }

    fn build_disk(spec: &DomainSpec<T>, opts: &MeshOptions<T>) -> Result<Self> {
        let m = opts.resolution;
        let r = spec.radius;
        let mut faces: Vec<T> = (0..=m).map(|k| r * graded(T::n(k) / T::n(m), opts.grading)).collect();
        faces[m] = r;
        apply_pins(&mut faces, &opts.pins, r)?;
        if faces.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidMesh("pinning produced a degenerate ring".into()));
        }
        let mut mesh = Mesh::empty(spec, opts);
        let two_pi = T::c(2.0) * T::PI();
        for w in faces.windows(2) {
            let (r0, r1) = (w[0], w[1]);
            let mid = T::c(0.5) * (r0 + r1);
            let count = (two_pi * mid * T::n(m) / r).ceil().to_usize().unwrap_or(4).max(4);
            let dt = two_pi / T::n(count);
            let half = T::c(0.5) * dt;
            let rc = T::c(2.0 / 3.0) * (r1 * r1 * r1 - r0 * r0 * r0) / (r1 * r1 - r0 * r0)
                * half.sin()
                / half;
            let area = half * (r1 * r1 - r0 * r0);
            let chord = T::c(2.0) * r1 * half.sin();
            let diameter = (r1 - r0).max(chord);
            let radius = T::c(0.5) * (r1 - r0).min(rc * dt);
            let first = mesh.len();
            for k in 0..count {
                let t0 = dt * T::n(k);
                let t1 = dt * T::n(k + 1);
                let tm = t0 + half;
                mesh.push(
                    &[rc * tm.cos(), rc * tm.sin()],
                    area,
                    diameter,
                    radius,
                    Cell::Sector { r0, r1, t0, t1 },
                );
            }
            mesh.rings.push(Ring { r0, r1, centroid_radius: rc, first, count });
        }
        mesh.finish();
        Ok(mesh)
    }

    fn empty(spec: &DomainSpec<T>, opts: &MeshOptions<T>) -> Self {
        Mesh {
            spec: *spec,
            resolution: opts.resolution,
            grading: opts.grading,
            nodes: Vec::new(),
            weights: Vec::new(),
            delta: Vec::new(),
            diameters: Vec::new(),
            radii: Vec::new(),
            boundary_layer: Vec::new(),
            cells: Vec::new(),
            rings: Vec::new(),
        }
    }

    fn push(&mut self, x: &[T], weight: T, diameter: T, radius: T, cell: Cell<T>) {
        self.nodes.extend_from_slice(x);
        self.weights.push(weight);
        self.delta.push(self.spec.radius - norm(x));
        self.diameters.push(diameter);
        self.radii.push(radius);
        self.cells.push(cell);
    }

    fn finish(&mut self) {
        let layer = T::c(LAYER_FRACTION) * self.spec.radius;
        self.boundary_layer = self.delta.iter().map(|&d| d < layer).collect();
    }

    pub fn spec(&self) -> &DomainSpec<T> {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn grading(&self) -> T {
        self.grading
    }

    pub fn node(&self, i: usize) -> &[T] {
        let d = self.spec.dim;
        &self.nodes[i * d..(i + 1) * d]
    }

    pub fn nodes_flat(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn delta(&self) -> &[T] {
        &self.delta
    }

    pub fn diameters(&self) -> &[T] {
        &self.diameters
    }

    /// Half of the smallest cell extent; atoms must stay this far from nodes.
    pub fn cell_radii(&self) -> &[T] {
        &self.radii
    }

    pub fn boundary_layer(&self) -> &[bool] {
        &self.boundary_layer
    }

    pub fn cells(&self) -> &[Cell<T>] {
        &self.cells
    }

    pub fn rings(&self) -> &[Ring<T>] {
        &self.rings
    }

    /// Σ_i v_i δ_i^α w_i.
    pub fn weighted_sum(&self, values: &[T], alpha: T) -> T {
        values
            .iter()
            .zip(&self.delta)
            .zip(&self.weights)
            .map(|((&v, &d), &w)| v * d.powf(alpha) * w)
            .sum()
    }

    /// Node-index pair bracketing the largest interior cell, used by refinement checks.
    pub fn max_interior_diameter(&self) -> T {
        self.diameters
            .iter()
            .zip(&self.boundary_layer)
            .filter(|(_, &b)| !b)
            .map(|(&d, _)| d)
            .fold(T::zero(), T::max)
    }

    /// Radial width of the cell, the extent that resolves δ.
    pub fn radial_width(&self, i: usize) -> T {
        match self.cells[i] {
            Cell::Interval { a, b } => b - a,
            Cell::Sector { r0, r1, .. } => r1 - r0,
        }
    }

    /// Hex SHA-256 over the node coordinates and weights.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.spec.dim as u64).to_le_bytes());
        for v in self.nodes.iter().chain(&self.weights) {
            h.update(v.f64().to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nodes: Vec<Vec<f64>> = (0..self.len())
            .map(|i| self.node(i).iter().map(|v| v.f64()).collect())
            .collect();
        serde_json::json!({
            "nodes": nodes,
            "weights": self.weights.iter().map(|v| v.f64()).collect::<Vec<_>>(),
            "delta": self.delta.iter().map(|v| v.f64()).collect::<Vec<_>>(),
        })
    }

    /// Piecewise-linear interpolation of nodal values at an arbitrary interior point.
    pub fn interpolate(&self, values: &[T], p: &[T]) -> T {
        match self.spec.dim {
            1 => {
                let x = p[0];
                let n = self.len();
                let mut j = self.nodes.partition_point(|&v| v <= x);
                j = j.clamp(1, n - 1);
                let (x0, x1) = (self.nodes[j - 1], self.nodes[j]);
                let t = (x - x0) / (x1 - x0);
                values[j - 1] + t * (values[j] - values[j - 1])
            }
            _ => {
                let rho = norm(p);
                let theta = p[1].atan2(p[0]);
                let k = self.rings.partition_point(|r| r.centroid_radius <= rho);
                if k == 0 {
                    return self.ring_value(&self.rings[0], values, theta);
                }
                let k = k.min(self.rings.len() - 1);
                let (a, b) = (&self.rings[k - 1], &self.rings[k]);
                let t = (rho - a.centroid_radius) / (b.centroid_radius - a.centroid_radius);
                let va = self.ring_value(a, values, theta);
                let vb = self.ring_value(b, values, theta);
                va + t * (vb - va)
            }
        }
    }

    fn ring_value(&self, ring: &Ring<T>, values: &[T], theta: T) -> T {
        let two_pi = T::c(2.0) * T::PI();
        let dt = two_pi / T::n(ring.count);
        let mut th = theta;
        if th < T::zero() {
            th = th + two_pi;
        }
        // node k sits at (k + ½)·dt
        let u = th / dt - T::c(0.5);
        let fl = u.floor();
        let t = u - fl;
        let k0 = fl.to_isize().unwrap_or(0).rem_euclid(ring.count as isize) as usize;
        let k1 = (k0 + 1) % ring.count;
        let v0 = values[ring.first + k0];
        let v1 = values[ring.first + k1];
        v0 + t * (v1 - v0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec1() -> DomainSpec<f64> {
        DomainSpec::unit(1, 0.25, 0.25).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(DomainSpec::unit(1, 0.5, 0.5).is_err());
        assert!(DomainSpec::unit(1, 0.25, 0.0).is_err());
        assert!(DomainSpec::unit(2, 1.0, 0.5).is_err());
        assert!(DomainSpec::unit(1, 0.4, 1.0).is_ok());
    }

    #[test]
    fn distance_examples() {
        let s = spec1();
        assert_eq!(distance_to_boundary(&s, &[0.0]).unwrap(), 1.0);
        assert_eq!(distance_to_boundary(&s, &[0.75]).unwrap(), 0.25);
        let d2 = DomainSpec::<f64>::unit(2, 0.5, 0.5).unwrap();
        let d = distance_to_boundary(&d2, &[0.3, 0.4]).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
        assert!(matches!(distance_to_boundary(&s, &[1.0]), Err(Error::OutsideDomain(_))));
    }

    #[test]
    fn uniform_interval() {
        let m = build_mesh(&spec1(), 8, 1.0).unwrap();
        assert_eq!(m.len(), 8);
        for &w in m.weights() {
            assert!((w - 0.25).abs() < 1e-15);
        }
        assert!((m.weights().iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn disk_area() {
        let d2 = DomainSpec::unit(2, 0.5, 0.5).unwrap();
        let m = build_mesh(&d2, 8, 1.0).unwrap();
        let a: f64 = m.weights().iter().sum();
        assert!((a - std::f64::consts::PI).abs() < 1e-6 * std::f64::consts::PI);
        assert!(m.delta().iter().all(|&d| d > 0.0));
    }

    #[test]
    fn graded_boundary_cells() {
        let m = build_mesh(&spec1(), 64, 2.0).unwrap();
        let w = m.weights();
        let smallest = w[0].min(w[63]);
        let largest = w.iter().cloned().fold(0.0, f64::max);
        assert!(smallest <= 0.25 * largest);
        // layer refinement
        let interior = m.max_interior_diameter();
        for i in 0..m.len() {
            if m.boundary_layer()[i] {
                assert!(m.diameters()[i] <= 0.5 * interior);
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build_mesh(&spec1(), 3, 1.0).is_err());
        assert!(build_mesh(&spec1(), 8, 0.5).is_err());
        let d3 = DomainSpec::unit(3, 0.5, 0.5).unwrap();
        assert!(build_mesh(&d3, 8, 1.0).is_err());
    }

    #[test]
    fn pins_become_faces() {
        let opts = MeshOptions::new(64, 2.0).pinned(vec![0.75, 0.875]);
        let m = Mesh::build(&spec1(), &opts).unwrap();
        let mut faces = Vec::new();
        for c in m.cells() {
            if let Cell::Interval { a, b } = *c {
                faces.push(a);
                faces.push(b);
            }
        }
        assert!(faces.contains(&0.75) && faces.contains(&-0.875));
        let area: f64 = m.weights().iter().sum();
        assert!((area - 2.0).abs() < 1e-14);
    }

    #[test]
    fn weight_integral_converges() {
        for dim in [1usize, 2] {
            let spec = DomainSpec::unit(dim, 0.25, 0.25).unwrap();
            let alpha = 0.25;
            let exact: f64 = spec.weight_integral(alpha);
            let errs: Vec<f64> = [16usize, 32, 64]
                .iter()
                .map(|&n| {
                    let m = build_mesh(&spec, n, 2.0).unwrap();
                    (m.weighted_sum(&vec![1.0; m.len()], alpha) - exact).abs()
                })
                .collect();
            let order = (errs[1] / errs[2]).log2();
            assert!(order >= 1.0, "dim {dim}: errors {errs:?}");
        }
    }

    #[test]
    fn deterministic() {
        let a = build_mesh(&spec1(), 100, 2.0).unwrap();
        let b = build_mesh(&spec1(), 100, 2.0).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.nodes_flat(), b.nodes_flat());
    }

    #[test]
    fn interpolation_reproduces_linear_data() {
        let m = build_mesh(&spec1(), 40, 2.0).unwrap();
        let v: Vec<f64> = (0..m.len()).map(|i| 3.0 * m.node(i)[0] - 1.0).collect();
        let got = m.interpolate(&v, &[0.3217]);
        assert!((got - (3.0 * 0.3217 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn single_precision_mesh() {
        let spec = DomainSpec::<f32>::unit(1, 0.25, 0.25).unwrap();
        let m = build_mesh(&spec, 16, 2.0).unwrap();
        assert!((m.weights().iter().sum::<f32>() - 2.0).abs() < 1e-5);
    }
}
