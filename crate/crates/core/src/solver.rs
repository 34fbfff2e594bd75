//! Weak-dual semilinear solves u + 𝔾[g(u)] = 𝔾[μ], truncation by the
//! envelope (−𝔾[μ⁻], 𝔾[μ⁺]), and Kato-inequality audits.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greenop::GreenOperator;
use crate::linalg::{Lu, Matrix};
use crate::measures::RadonMeasure;
use crate::spaces::GridFunction;
use crate::Real;

#[derive(Debug, Clone, PartialEq)]
enum Kind<T> {
    Power(T),
    /// Knots, values and Fritsch–Carlson slopes.
    Table(Vec<T>, Vec<T>, Vec<T>),
    Saturating(T, T),
}

/// Nondecreasing absorption g with g(0) = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinearity<T> {
    kind: Kind<T>,
}

impl<T: Real> Nonlinearity<T> {
    /// g(t) = |t|^{p−1} t.
    pub fn power(p: T) -> Result<Self> {
        if !(p >= T::one()) || !p.is_finite() {
            return Err(Error::InvalidExponent(format!("power nonlinearity needs p >= 1, got {p}")));
        }
        Ok(Nonlinearity { kind: Kind::Power(p) })
    }

    pub fn linear() -> Self {
        Nonlinearity { kind: Kind::Power(T::one()) }
    }

    /// g(t) = a·tanh(t/scale).
    pub fn saturating(a: T, scale: T) -> Result<Self> {
        if !(a > T::zero() && scale > T::zero()) {
            return Err(Error::InvalidExponent(format!("saturating g needs a, scale > 0, got {a}, {scale}")));
        }
        Ok(Nonlinearity { kind: Kind::Saturating(a, scale) })
    }

    /// Monotone piecewise-cubic interpolant through (t_k, v_k), extended linearly.
    pub fn table(t: Vec<T>, v: Vec<T>) -> Result<Self> {
        if t.len() != v.len() || t.len() < 2 {
            return Err(Error::NonMonotone("table needs at least two matching knots".into()));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::NonMonotone("table knots must increase strictly".into()));
        }
        if v.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::NonMonotone("table values must be nondecreasing".into()));
        }
        let n = t.len();
        let sec: Vec<T> = (0..n - 1).map(|k| (v[k + 1] - v[k]) / (t[k + 1] - t[k])).collect();
        let mut d = vec![T::zero(); n];
        d[0] = sec[0];
        d[n - 1] = sec[n - 2];
        for k in 1..n - 1 {
            let (a, b) = (sec[k - 1], sec[k]);
            if a > T::zero() && b > T::zero() {
                let (h0, h1) = (t[k] - t[k - 1], t[k + 1] - t[k]);
                let (w0, w1) = (h0 + h1 + h1, h0 + h0 + h1);
                d[k] = (w0 + w1) / (w0 / a + w1 / b);
            }
        }
        let g = Nonlinearity { kind: Kind::Table(t, v, d) };
        g.validate()?;
        Ok(g)
    }

    pub fn power_exponent(&self) -> Option<T> {
        match self.kind {
            Kind::Power(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_linear(&self) -> bool {
        self.power_exponent() == Some(T::one())
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            Kind::Power(p) => format!("power(p={p})"),
            Kind::Table(t, _, _) => format!("table({} knots)", t.len()),
            Kind::Saturating(a, s) => format!("saturating(a={a}, scale={s})"),
        }
    }

    pub fn eval(&self, x: T) -> T {
        match &self.kind {
            Kind::Power(p) => {
                if *p == T::one() {
                    x
                } else {
                    x.signum() * x.abs().powf(*p)
                }
            }
            Kind::Saturating(a, s) => *a * (x / *s).tanh(),
            Kind::Table(t, v, d) => {
                let n = t.len();
                if x <= t[0] {
                    return v[0] + d[0] * (x - t[0]);
                }
                if x >= t[n - 1] {
                    return v[n - 1] + d[n - 1] * (x - t[n - 1]);
                }
                let k = t.partition_point(|&s| s <= x) - 1;
                let h = t[k + 1] - t[k];
                let u = (x - t[k]) / h;
                let (u2, u3) = (u * u, u * u * u);
                let two = T::c(2.0);
                let three = T::c(3.0);
                v[k] * (two * u3 - three * u2 + T::one())
                    + h * d[k] * (u3 - two * u2 + u)
                    + v[k + 1] * (three * u2 - two * u3)
                    + h * d[k + 1] * (u3 - u2)
            }
        }
    }

    /// Upper bound of the slope of g on [lo, hi].
    pub fn max_slope(&self, lo: T, hi: T) -> T {
        match &self.kind {
            Kind::Power(p) => *p * lo.abs().max(hi.abs()).powf(*p - T::one()),
            Kind::Saturating(a, s) => *a / *s,
            Kind::Table(t, v, d) => {
                let n = t.len();
                let mut m = T::zero();
                if lo < t[0] {
                    m = m.max(d[0]);
                }
                if hi > t[n - 1] {
                    m = m.max(d[n - 1]);
                }
                for k in 0..n - 1 {
                    if t[k + 1] >= lo && t[k] <= hi {
                        let sec = (v[k + 1] - v[k]) / (t[k + 1] - t[k]);
                        // monotone cubic Hermite slopes stay below 3× the secant
                        m = m.max(T::c(3.0) * sec).max(d[k]).max(d[k + 1]);
                    }
                }
                m
            }
        }
    }

    /// Checks g(0) = 0 and monotonicity on a sign-spanning sample.
    pub fn validate(&self) -> Result<()> {
        let z = self.eval(T::zero());
        if z.abs() > T::c(1e-12) {
            return Err(Error::NonMonotone(format!("g(0) = {z}, expected 0")));
        }
        let mut prev = self.eval(-T::c(1e6));
        for k in 1..=4000 {
            let u = T::n(k) / T::c(2000.0) - T::one();
            let x = if u == T::zero() { u } else { u.signum() * T::c(10.0).powf(T::c(12.0) * u.abs() - T::c(6.0)) };
            let g = self.eval(x);
            if !g.is_finite() || g < prev - T::c(1e-12) * prev.abs().max(T::one()) {
                return Err(Error::NonMonotone(format!("g decreases near t = {x}")));
            }
            prev = g;
        }
        Ok(())
    }
}

/// V⁻ = −𝔾[μ⁻] and V⁺ = 𝔾[μ⁺] at the nodes.
#[derive(Debug, Clone)]
pub struct TruncationEnvelope<T> {
    pub lower: GridFunction<T>,
    pub upper: GridFunction<T>,
}

impl<T: Real> TruncationEnvelope<T> {
    pub fn new(op: &GreenOperator<T>, mu: &RadonMeasure<T>) -> Result<Self> {
        let (plus, minus) = mu.split_signs();
        let upper = op.apply_measure(&plus)?;
        let lower = op.apply_measure(&minus)?.map(|v| -v);
        Ok(TruncationEnvelope { lower, upper })
    }

    /// ∫ (|g(V⁺)| + |g(V⁻)|) δ^γ over the mesh; fails when not finite.
    pub fn good_measure_mass(&self, g: &Nonlinearity<T>) -> Result<T> {
        let mesh = self.upper.mesh();
        let vals: Vec<T> = self
            .upper
            .values()
            .iter()
            .zip(self.lower.values())
            .map(|(&p, &m)| g.eval(p).abs() + g.eval(m).abs())
            .collect();
        let mass = mesh.weighted_sum(&vals, mesh.spec().gamma);
        if !mass.is_finite() {
            return Err(Error::GoodMeasure(format!("envelope integral of g is {mass}")));
        }
        Ok(mass)
    }
}

/// h(v): g(V⁺) above the envelope, g(V⁻) below it, g(v) inside.
pub fn truncate_h<T: Real>(g: &Nonlinearity<T>, v: &[T], env: &TruncationEnvelope<T>) -> Vec<T> {
    v.iter()
        .zip(env.lower.values().iter().zip(env.upper.values()))
        .map(|(&x, (&lo, &hi))| g.eval(x.max(lo).min(hi)))
        .collect()
}

fn default_tol() -> f64 {
    1e-10
}
fn default_iter() -> usize {
    500
}
fn default_damping() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_iter")]
    pub max_iter: usize,
    #[serde(default = "default_damping")]
    pub damping: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { tol: default_tol(), max_iter: default_iter(), damping: default_damping() }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 || !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Config(format!("invalid solver block {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub method: String,
    pub iterations: usize,
    /// L¹(δ^γ) residual of every iterate.
    pub residuals: Vec<f64>,
    pub damping: f64,
    pub sandwich_violation: f64,
    /// ‖u_high − u_low‖ in L¹(δ^γ), monotone scheme only.
    pub gap: Option<f64>,
    pub wall_time: f64,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(f64::NAN)
    }
}

/// u + 𝔾[g(u)] = b with b a nodal forcing profile and envelope bounds.
pub struct AffineProblem<'a, T> {
    pub op: &'a GreenOperator<T>,
    pub g: &'a Nonlinearity<T>,
    pub forcing: Vec<T>,
    pub env: TruncationEnvelope<T>,
}

impl<'a, T: Real> AffineProblem<'a, T> {
    pub fn from_measure(op: &'a GreenOperator<T>, g: &'a Nonlinearity<T>, mu: &RadonMeasure<T>) -> Result<Self> {
        let forcing = op.apply_measure(mu)?.into_values();
        let env = TruncationEnvelope::new(op, mu)?;
        env.good_measure_mass(g)?;
        Ok(AffineProblem { op, g, forcing, env })
    }

    /// Forcing by a nonnegative profile such as a Martin kernel, with envelope (0, b).
    pub fn from_profile(op: &'a GreenOperator<T>, g: &'a Nonlinearity<T>, forcing: Vec<T>) -> Result<Self> {
        let mesh = op.mesh().clone();
        if forcing.iter().any(|&v| v < T::zero()) {
            return Err(Error::GoodMeasure("forcing profile must be nonnegative".into()));
        }
        let upper = GridFunction::new(mesh.clone(), forcing.clone())?;
        let env = TruncationEnvelope { lower: GridFunction::zeros(mesh), upper };
        env.good_measure_mass(g)?;
        Ok(AffineProblem { op, g, forcing, env })
    }

    fn weighted_l1(&self, v: &[T]) -> T {
        let mesh = self.op.mesh();
        mesh.weighted_sum(&v.iter().map(|x| x.abs()).collect::<Vec<_>>(), mesh.spec().gamma)
    }

    /// u + A h(u) − b.
    fn residual_vec(&self, u: &[T], truncated: bool) -> Vec<T> {
        let gu = if truncated { truncate_h(self.g, u, &self.env) } else { u.iter().map(|&x| self.g.eval(x)).collect() };
        let agu = self.op.apply_values(&gu);
        u.iter().zip(&agu).zip(&self.forcing).map(|((&a, &b), &c)| a + b - c).collect()
    }

    pub fn residual(&self, u: &[T]) -> T {
        self.weighted_l1(&self.residual_vec(u, false))
    }

    pub fn sandwich_violation(&self, u: &[T]) -> T {
        u.iter()
            .zip(self.env.lower.values().iter().zip(self.env.upper.values()))
            .fold(T::zero(), |m, (&x, (&lo, &hi))| m.max(lo - x).max(x - hi))
    }

    /// Damped iteration u ← (1−θ)u + θ(b − A h(u)); θ halves whenever the residual grows.
    pub fn picard(&self, init: Option<&[T]>, cfg: &SolveConfig) -> Result<(Vec<T>, SolveReport)> {
        cfg.validate()?;
        let start = Instant::now();
        let n = self.forcing.len();
        let tol = T::c(cfg.tol);
        let mut u = init.map(|v| v.to_vec()).unwrap_or_else(|| vec![T::zero(); n]);
        let mut r = self.residual_vec(&u, true);
        let mut res = self.weighted_l1(&r);
        let mut theta = T::c(cfg.damping);
        let mut history = vec![res.f64()];
        let mut iterations = 0;
        while res > tol {
            if iterations >= cfg.max_iter || theta < T::c(1e-8) {
                return Err(Error::Divergence { iterations, residual: res.f64(), history });
            }
            iterations += 1;
            let trial: Vec<T> = u.iter().zip(&r).map(|(&x, &ri)| x - theta * ri).collect();
            let rt = self.residual_vec(&trial, true);
            let rest = self.weighted_l1(&rt);
            history.push(rest.f64());
            if rest < res {
                u = trial;
                r = rt;
                res = rest;
            } else {
                theta = theta * T::c(0.5);
            }
        }
        self.finish(u, "picard", iterations, history, theta.f64(), None, start)
    }

    fn finish(
        &self,
        u: Vec<T>,
        method: &str,
        iterations: usize,
        mut residuals: Vec<f64>,
        damping: f64,
        gap: Option<f64>,
        start: Instant,
    ) -> Result<(Vec<T>, SolveReport)> {
        // h(u) = g(u) requires u inside the envelope
        let viol = self.sandwich_violation(&u);
        let scale = u.iter().fold(T::one(), |m, &x| m.max(x.abs()));
        if viol > T::c(1e-8) * scale {
            return Err(Error::GoodMeasure(format!("converged iterate leaves the envelope by {viol}")));
        }
        let res = self.residual(&u);
        if let Some(last) = residuals.last_mut() {
            *last = last.max(res.f64());
        }
        let report = SolveReport {
            method: method.into(),
            iterations,
            residuals,
            damping,
            sandwich_violation: viol.f64(),
            gap,
            wall_time: start.elapsed().as_secs_f64(),
        };
        Ok((u, report))
    }

    /// Two monotone sequences from V⁻ and V⁺ under S(u) = u + (I + AC)⁻¹(b − u − A h(u)).
    /// C is the largest slope of g over the envelope, so S is order preserving.
    pub fn monotone(&self, cfg: &SolveConfig) -> Result<(Vec<T>, Vec<T>, SolveReport)> {
        cfg.validate()?;
        let start = Instant::now();
        let n = self.forcing.len();
        let c: Vec<T> = self
            .env
            .lower
            .values()
            .iter()
            .zip(self.env.upper.values())
            .map(|(&lo, &hi)| self.g.max_slope(lo, hi))
            .collect();
        let a = self.op.matrix();
        let mut m = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = m[(i, j)] + a[(i, j)] * c[j];
            }
        }
        let lu = Lu::new(m)?;
        let tol = T::c(cfg.tol);
        let mut lo = self.env.lower.values().to_vec();
        let mut hi = self.env.upper.values().to_vec();
        let mut history = Vec::new();
        let mut iterations = 0;
        loop {
            let rl = self.residual_vec(&lo, true);
            let rh = self.residual_vec(&hi, true);
            let res = self.weighted_l1(&rl).max(self.weighted_l1(&rh));
            history.push(res.f64());
            if res <= tol {
                break;
            }
            if iterations >= cfg.max_iter {
                return Err(Error::Divergence { iterations, residual: res.f64(), history });
            }
            iterations += 1;
            let dl = lu.solve(&rl);
            let dh = lu.solve(&rh);
            let scale = hi.iter().chain(&lo).fold(T::one(), |m, &x| m.max(x.abs()));
            let slack = T::c(1e-10) * scale;
            for i in 0..n {
                let (nl, nh) = (lo[i] - dl[i], hi[i] - dh[i]);
                let broken = (lo[i] - nl).max(nh - hi[i]).max(nl - nh);
                if broken > slack {
                    return Err(Error::MonotonicityBroken(broken.f64()));
                }
                lo[i] = nl;
                hi[i] = nh;
            }
        }
        let diff: Vec<T> = hi.iter().zip(&lo).map(|(&a, &b)| a - b).collect();
        let gap = self.weighted_l1(&diff).f64();
        let mid: Vec<T> = lo.iter().zip(&hi).map(|(&a, &b)| T::c(0.5) * (a + b)).collect();
        let (_, report) = self.finish(mid, "monotone", iterations, history, 1.0, Some(gap), start)?;
        Ok((lo, hi, report))
    }
}

fn grid<T: Real>(op: &GreenOperator<T>, v: Vec<T>) -> GridFunction<T> {
    GridFunction::new(op.mesh().clone(), v).expect("operator-sized vector")
}

pub fn picard_solve<T: Real>(
    op: &GreenOperator<T>,
    g: &Nonlinearity<T>,
    mu: &RadonMeasure<T>,
    cfg: &SolveConfig,
) -> Result<(GridFunction<T>, SolveReport)> {
    let prob = AffineProblem::from_measure(op, g, mu)?;
    let (u, rep) = prob.picard(None, cfg)?;
    Ok((grid(op, u), rep))
}

pub fn monotone_solve<T: Real>(
    op: &GreenOperator<T>,
    g: &Nonlinearity<T>,
    mu: &RadonMeasure<T>,
    cfg: &SolveConfig,
) -> Result<(GridFunction<T>, GridFunction<T>, SolveReport)> {
    let prob = AffineProblem::from_measure(op, g, mu)?;
    let (lo, hi, rep) = prob.monotone(cfg)?;
    Ok((grid(op, lo), grid(op, hi), rep))
}

/// Dense solve of (I + A) u = A f, the g(u) = u case.
pub fn linear_direct<T: Real>(op: &GreenOperator<T>, f: &GridFunction<T>) -> Result<GridFunction<T>> {
    let n = op.len();
    let mut m = op.matrix();
    for i in 0..n {
        m[(i, i)] = m[(i, i)] + T::one();
    }
    let rhs = op.apply_values(f.values());
    Ok(grid(op, Lu::new(m)?.solve(&rhs)))
}

/// L¹(δ^γ) distance.
pub fn weighted_l1_distance<T: Real>(a: &GridFunction<T>, b: &GridFunction<T>) -> Result<T> {
    a.check_same(b)?;
    let mesh = a.mesh();
    let d: Vec<T> = a.values().iter().zip(b.values()).map(|(&x, &y)| (x - y).abs()).collect();
    Ok(mesh.weighted_sum(&d, mesh.spec().gamma))
}

fn sum3<T: Real>(w: &[T], a: &[T], b: &[T]) -> T {
    w.iter().zip(a).zip(b).map(|((&w, &a), &b)| w * a * b).sum()
}

/// max over ξ of |∫uξ + ∫g(u)𝔾[ξ] − ∫𝔾[ξ]dμ| / scale, with ∫𝔾[ξ]dμ paired
/// through the nodal values of 𝔾[μ].
pub fn weak_dual_residual<T: Real>(
    op: &GreenOperator<T>,
    u: &GridFunction<T>,
    g: &Nonlinearity<T>,
    forcing: &[T],
    family: &[GridFunction<T>],
) -> Result<T> {
    let w = op.mesh().weights();
    let gu: Vec<T> = u.values().iter().map(|&x| g.eval(x)).collect();
    let mut worst = T::zero();
    for xi in family {
        u.check_same(xi)?;
        let gxi = op.apply_values(xi.values());
        let a = sum3(w, u.values(), xi.values());
        let b = sum3(w, &gu, &gxi);
        let c = sum3(w, forcing, xi.values());
        let scale = a.abs().max(b.abs()).max(c.abs());
        if scale > T::zero() {
            worst = worst.max((a + b - c).abs() / scale);
        }
    }
    Ok(worst)
}

/// rhs − lhs of each Kato inequality; nonnegative when it holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KatoReport<T> {
    /// ∫|u|ξ ≤ ∫sgn(u) f 𝔾[ξ], u = 𝔾[f].
    pub abs: T,
    /// ∫u⁺ξ ≤ ∫sgn⁺(u) f 𝔾[ξ], u = 𝔾[f].
    pub main: T,
    /// ∫u⁺ξ ≤ ∫sgn⁺(u) f 𝔾[ξ] + ∫𝔾[ξ]dμ⁺, u = 𝔾[f] + 𝔾[μ].
    pub main2: T,
    /// ∫|u|ξ ≤ ∫sgn(u) f 𝔾[ξ] + ∫𝔾[ξ]d|μ|, u = 𝔾[f] + 𝔾[μ].
    pub abs2: T,
    pub scale: T,
}

impl<T: Real> KatoReport<T> {
    pub fn min_slack(&self) -> T {
        self.abs.min(self.main).min(self.main2).min(self.abs2)
    }
}

fn sgn<T: Real>(t: T) -> T {
    if t > T::zero() {
        T::one()
    } else if t < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

fn sgn_plus<T: Real>(t: T) -> T {
    if t > T::zero() {
        T::one()
    } else {
        T::zero()
    }
}

/// 𝔾[ξ] at the nodes, refusing ξ with a negative potential.
pub fn checked_potential<T: Real>(op: &GreenOperator<T>, xi: &GridFunction<T>) -> Result<Vec<T>> {
    let gxi = op.apply_values(xi.values());
    let scale = gxi.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    if gxi.iter().any(|&v| v < -T::c(1e-13) * scale) {
        return Err(Error::InvalidTestFunction("G[xi] takes negative values".into()));
    }
    Ok(gxi)
}

pub fn kato_check<T: Real>(
    op: &GreenOperator<T>,
    f: &GridFunction<T>,
    mu: &RadonMeasure<T>,
    xi: &GridFunction<T>,
) -> Result<KatoReport<T>> {
    f.check_same(xi)?;
    let gxi = checked_potential(op, xi)?;
    let w = op.mesh().weights();
    let x = xi.values();
    let uf = op.apply_values(f.values());
    let (plus, minus) = mu.split_signs();
    let bp = op.apply_measure(&plus)?.into_values();
    let bm = op.apply_measure(&minus)?.into_values();
    let u: Vec<T> = (0..uf.len()).map(|i| uf[i] + bp[i] - bm[i]).collect();

    let fg: Vec<T> = f.values().iter().zip(&gxi).map(|(&a, &b)| a * b).collect();
    let side = |v: &[T], s: fn(T) -> T| -> T { v.iter().zip(&fg).zip(w).map(|((&v, &a), &w)| s(v) * a * w).sum() };
    let lhs = |v: &[T], s: fn(T) -> T| -> T { v.iter().zip(x).zip(w).map(|((&v, &a), &w)| s(v) * a * w).sum() };
    let abs = |t: T| t.abs();
    let pos = |t: T| t.max(T::zero());
    let mplus = sum3(w, &bp, x);
    let mabs = mplus + sum3(w, &bm, x);

    let terms = [lhs(&uf, abs), side(&uf, sgn), lhs(&u, abs), mabs];
    let scale = terms.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    Ok(KatoReport {
        abs: side(&uf, sgn) - lhs(&uf, abs),
        main: side(&uf, sgn_plus) - lhs(&uf, pos),
        main2: side(&u, sgn_plus) + mplus - lhs(&u, pos),
        abs2: side(&u, sgn) + mabs - lhs(&u, abs),
        scale,
    })
}

/// Convex p with p(0) = p′(0) = 0 and |p′| ≤ 1.
#[derive(Clone)]
pub enum ConvexProfile<T> {
    Zero,
    /// p_k(t) = |t| − 1/(2k) for |t| ≥ 1/k, kt²/2 otherwise.
    Pk(T),
    Custom(Arc<dyn Fn(T) -> (T, T) + Send + Sync>),
}

impl<T: Real> ConvexProfile<T> {
    /// (p(t), p′(t)).
    pub fn eval(&self, t: T) -> (T, T) {
        match self {
            ConvexProfile::Zero => (T::zero(), T::zero()),
            ConvexProfile::Pk(k) => {
                let inv = T::one() / *k;
                if t.abs() >= inv {
                    (t.abs() - T::c(0.5) * inv, sgn(t))
                } else {
                    (T::c(0.5) * *k * t * t, *k * t)
                }
            }
            ConvexProfile::Custom(f) => f(t),
        }
    }

    /// Samples p on [−10, 10] for p(0) = p′(0) = 0, |p′| ≤ 1 and nondecreasing p′.
    pub fn audit(&self) -> Result<()> {
        let (p0, d0) = self.eval(T::zero());
        if p0.abs() > T::c(1e-14) || d0.abs() > T::c(1e-14) {
            return Err(Error::InvalidTestFunction("convex profile must vanish to first order at 0".into()));
        }
        let mut prev = -T::infinity();
        for k in 0..=20000 {
            let t = T::n(k) / T::c(1000.0) - T::c(10.0);
            let (_, d) = self.eval(t);
            if d.abs() > T::one() + T::c(1e-14) || d < prev - T::c(1e-14) {
                return Err(Error::InvalidTestFunction(format!("convex profile audit fails at t = {t}")));
            }
            prev = d;
        }
        Ok(())
    }
}

/// ∫f p′(u)𝔾[ξ] − ∫p(u)ξ for u = 𝔾[f].
pub fn convex_kato_check<T: Real>(
    op: &GreenOperator<T>,
    f: &GridFunction<T>,
    p: &ConvexProfile<T>,
    xi: &GridFunction<T>,
) -> Result<T> {
    p.audit()?;
    f.check_same(xi)?;
    let gxi = checked_potential(op, xi)?;
    let u = op.apply_values(f.values());
    Ok(convex_slack(op, &u, f.values(), &gxi, xi.values(), p))
}

fn convex_slack<T: Real>(op: &GreenOperator<T>, u: &[T], f: &[T], gxi: &[T], xi: &[T], p: &ConvexProfile<T>) -> T {
    let w = op.mesh().weights();
    (0..u.len())
        .map(|i| {
            let (pv, dp) = p.eval(u[i]);
            (f[i] * dp * gxi[i] - pv * xi[i]) * w[i]
        })
        .sum()
}

/// k → ∞ limit of the p_k slack by Richardson extrapolation in 1/k over k = 8, 16, ….
pub fn convex_kato_limit<T: Real>(op: &GreenOperator<T>, f: &GridFunction<T>, xi: &GridFunction<T>) -> Result<T> {
    f.check_same(xi)?;
    let gxi = checked_potential(op, xi)?;
    let u = op.apply_values(f.values());
    let slack = |k: T| convex_slack(op, &u, f.values(), &gxi, xi.values(), &ConvexProfile::Pk(k));
    let mut k = T::c(8.0);
    let mut prev_slack = slack(k);
    let mut prev_ext = T::nan();
    for _ in 0..40 {
        let k2 = k + k;
        let s2 = slack(k2);
        let ext = s2 + s2 - prev_slack;
        if (ext - prev_ext).abs() <= T::c(1e-14) * ext.abs().max(T::one()) {
            return Ok(ext);
        }
        prev_ext = ext;
        prev_slack = s2;
        k = k2;
    }
    Ok(prev_ext)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonReport {
    /// max(u₁ − u₂) over nodes.
    pub max_violation: f64,
    pub passed: bool,
}

/// Solves for μ₁ ≤ μ₂ and checks u₁ ≤ u₂ + 10⁻⁸ nodewise.
pub fn comparison_test<T: Real>(
    op: &GreenOperator<T>,
    g: &Nonlinearity<T>,
    mu1: &RadonMeasure<T>,
    mu2: &RadonMeasure<T>,
    cfg: &SolveConfig,
) -> Result<ComparisonReport> {
    if !mu2.difference(mu1)?.is_nonnegative() {
        return Err(Error::Unordered("second measure does not dominate the first".into()));
    }
    let solve = |mu: &RadonMeasure<T>| -> Result<Vec<T>> {
        let prob = AffineProblem::from_measure(op, g, mu)?;
        let (lo, hi, _) = prob.monotone(cfg)?;
        let mid: Vec<T> = lo.iter().zip(&hi).map(|(&a, &b)| T::c(0.5) * (a + b)).collect();
        Ok(prob.picard(Some(&mid), cfg)?.0)
    };
    let (u1, u2) = (solve(mu1)?, solve(mu2)?);
    let v = u1.iter().zip(&u2).fold(f64::NEG_INFINITY, |m, (&a, &b)| m.max((a - b).f64()));
    Ok(ComparisonReport { max_violation: v, passed: v <= 1e-8 })
}

/// Picard from V⁻, V⁺, 0, their midpoint and 𝔾[μ]; largest pairwise L¹(δ^γ) distance.
pub fn uniqueness_proxy<T: Real>(
    op: &GreenOperator<T>,
    g: &Nonlinearity<T>,
    mu: &RadonMeasure<T>,
    cfg: &SolveConfig,
) -> Result<T> {
    let prob = AffineProblem::from_measure(op, g, mu)?;
    let lo = prob.env.lower.values().to_vec();
    let hi = prob.env.upper.values().to_vec();
    let mid: Vec<T> = lo.iter().zip(&hi).map(|(&a, &b)| T::c(0.5) * (a + b)).collect();
    let starts = [lo, hi, vec![T::zero(); op.len()], mid, prob.forcing.clone()];
    let sols = starts
        .iter()
        .map(|s| prob.picard(Some(s), cfg).map(|r| grid(op, r.0)))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = T::zero();
    for i in 0..sols.len() {
        for j in i + 1..sols.len() {
            worst = worst.max(weighted_l1_distance(&sols[i], &sols[j])?);
        }
    }
    Ok(worst)
}
