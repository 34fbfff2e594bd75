//! Green and Martin kernels of the restricted, spectral and censored fractional
//! Laplacians on balls, the two-sided envelope, and the regularized split.
//!
//! Every backend is written as `G(x,y) = c·|x−y|^{2s−N} + regular(x,y)`; the
//! singular head is what the operator assembly integrates exactly.

use serde::{Deserialize, Serialize};

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::real::{dist, norm, norm2};
use crate::special::{
    adaptive_integrate, beta, cosine_prefactor, gamma, hurwitz_zeta, inc_beta_pair, GaussRule,
};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// Restricted fractional Laplacian on the ball (closed form).
    #[serde(rename = "rfl")]
    RflBall,
    /// Spectral fractional Laplacian on the interval.
    #[serde(rename = "sfl")]
    SflInterval,
    /// Surrogate realizing the censored two-sided estimate with equality.
    #[serde(rename = "cfl")]
    CflSurrogate,
    #[serde(rename = "envelope")]
    Envelope,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::RflBall => "rfl",
            KernelKind::SflInterval => "sfl",
            KernelKind::CflSurrogate => "cfl",
            KernelKind::Envelope => "envelope",
        }
    }

    /// Solutions computed with a surrogate only carry estimate-level meaning.
    pub fn estimate_class(self) -> bool {
        matches!(self, KernelKind::CflSurrogate | KernelKind::Envelope)
    }
}

/// JSON kernel block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub kernel: KernelKind,
    #[serde(default = "one_dim")]
    pub dim: usize,
    #[serde(default = "unit")]
    pub radius: f64,
    pub s: f64,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub c0: Option<f64>,
    #[serde(rename = "K", default)]
    pub truncation: Option<usize>,
}

fn one_dim() -> usize {
    1
}

fn unit() -> f64 {
    1.0
}

impl KernelConfig {
    /// γ implied by the kernel when the config leaves it out.
    pub fn resolved_gamma(&self) -> f64 {
        self.gamma.unwrap_or(match self.kernel {
            KernelKind::RflBall => self.s,
            KernelKind::SflInterval => 1.0,
            KernelKind::CflSurrogate => 2.0 * self.s - 1.0,
            KernelKind::Envelope => self.s,
        })
    }

    pub fn resolved(&self) -> KernelConfig {
        let mut c = self.clone();
        c.gamma = Some(self.resolved_gamma());
        if matches!(self.kernel, KernelKind::CflSurrogate | KernelKind::Envelope) {
            c.c0 = Some(self.c0.unwrap_or(1.0));
        }
        c
    }

    pub fn build<T: Real>(&self) -> Result<Kernel<T>> {
        let spec = DomainSpec::new(
            self.dim,
            T::c(self.radius),
            T::c(self.s),
            T::c(self.resolved_gamma()),
        )?;
        match self.kernel {
            KernelKind::RflBall => Kernel::rfl(spec),
            KernelKind::SflInterval => match self.truncation {
                Some(k) => Kernel::sfl_truncated(spec, k),
                None => Kernel::sfl(spec),
            },
            KernelKind::CflSurrogate => Kernel::cfl(spec, T::c(self.c0.unwrap_or(1.0))),
            KernelKind::Envelope => Kernel::envelope(spec, T::c(self.c0.unwrap_or(1.0))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Kernel<T> {
    kind: KernelKind,
    spec: DomainSpec<T>,
    c0: T,
    truncation: Option<usize>,
    head: T,
    kappa: T,
    beta_ab: T,
    sfl_pref: T,
    sfl_k: T,
}

/// κ(N,s) = Γ(N/2) / (4^s π^{N/2} Γ(s)²).
pub fn rfl_kappa<T: Real>(n: T, s: T) -> T {
    let half_n = n * T::c(0.5);
    gamma(half_n) / (T::c(4.0).powf(s) * T::PI().powf(half_n) * gamma(s) * gamma(s))
}

/// ∫₀^{r₀} t^{s−1}(1+t)^{−N/2} dt by adaptive quadrature after t = v^{1/s}.
pub fn rfl_inner_integral_quadrature<T: Real>(n: T, s: T, r0: T) -> T {
    let half_n = n * T::c(0.5);
    let inv = T::one() / s;
    let top = r0.powf(s);
    let (v, _) = adaptive_integrate(
        |v: T| inv * (T::one() + v.powf(inv)).powf(-half_n),
        T::zero(),
        top,
        T::c(1e-14) * top.max(T::c(1e-300)),
    );
    v
}

impl<T: Real> Kernel<T> {
    fn base(kind: KernelKind, spec: DomainSpec<T>) -> Self {
        Kernel {
            kind,
            spec,
            c0: T::one(),
            truncation: None,
            head: T::zero(),
            kappa: T::zero(),
            beta_ab: T::zero(),
            sfl_pref: T::zero(),
            sfl_k: T::zero(),
        }
    }

    pub fn rfl(spec: DomainSpec<T>) -> Result<Self> {
        if (spec.gamma - spec.s).abs() > T::c(1e-12) {
            return Err(Error::InvalidKernel(format!(
                "restricted kernel needs gamma = s, got gamma = {} and s = {}",
                spec.gamma, spec.s
            )));
        }
        let mut k = Self::base(KernelKind::RflBall, spec);
        let n = spec.n();
        k.kappa = rfl_kappa(n, spec.s);
        k.beta_ab = beta(spec.s, n * T::c(0.5) - spec.s);
        k.head = k.kappa * k.beta_ab;
        Ok(k)
    }

    fn check_sfl(spec: &DomainSpec<T>) -> Result<()> {
        if spec.dim != 1 {
            return Err(Error::InvalidKernel("spectral kernel is implemented on the interval only".into()));
        }
        if spec.gamma != T::one() {
            return Err(Error::InvalidKernel(format!("spectral kernel needs gamma = 1, got {}", spec.gamma)));
        }
        if !(spec.s < T::c(0.5)) {
            return Err(Error::InvalidKernel(format!("spectral kernel on the interval needs s < 1/2, got {}", spec.s)));
        }
        Ok(())
    }

    /// Spectral kernel summed in closed form through the periodic zeta function.
    pub fn sfl(spec: DomainSpec<T>) -> Result<Self> {
        Self::check_sfl(&spec)?;
        let mut k = Self::base(KernelKind::SflInterval, spec);
        let r = spec.radius;
        let sigma = spec.s + spec.s;
        k.sfl_pref = (T::c(2.0) * r / T::PI()).powf(sigma) / (T::c(2.0) * r);
        k.sfl_k = cosine_prefactor(sigma);
        k.head = k.sfl_pref * k.sfl_k * (T::c(4.0) * r).powf(T::one() - sigma);
        Ok(k)
    }

    /// Spectral kernel truncated to its first `terms` eigenpairs; bounded, so
    /// the whole kernel is treated as regular.
    pub fn sfl_truncated(spec: DomainSpec<T>, terms: usize) -> Result<Self> {
        Self::check_sfl(&spec)?;
        if terms == 0 {
            return Err(Error::InvalidKernel("truncation K must be positive".into()));
        }
        let mut k = Self::base(KernelKind::SflInterval, spec);
        k.truncation = Some(terms);
        Ok(k)
    }

    pub fn cfl(spec: DomainSpec<T>, c0: T) -> Result<Self> {
        if !(spec.s > T::c(0.5)) {
            return Err(Error::InvalidKernel(format!("censored kernel needs s > 1/2, got {}", spec.s)));
        }
        let expect = spec.s + spec.s - T::one();
        if (spec.gamma - expect).abs() > T::c(1e-12) {
            return Err(Error::InvalidKernel(format!(
                "censored kernel needs gamma = 2s - 1 = {expect}, got {}",
                spec.gamma
            )));
        }
        Self::surrogate(KernelKind::CflSurrogate, spec, c0)
    }

    pub fn envelope(spec: DomainSpec<T>, c0: T) -> Result<Self> {
        Self::surrogate(KernelKind::Envelope, spec, c0)
    }

    fn surrogate(kind: KernelKind, spec: DomainSpec<T>, c0: T) -> Result<Self> {
        if !(c0 > T::zero()) {
            return Err(Error::InvalidKernel(format!("c0 = {c0} must be positive")));
        }
        let mut k = Self::base(kind, spec);
        k.c0 = c0;
        k.head = c0;
        Ok(k)
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn spec(&self) -> &DomainSpec<T> {
        &self.spec
    }

    pub fn c0(&self) -> T {
        self.c0
    }

    pub fn truncation(&self) -> Option<usize> {
        self.truncation
    }

    pub fn describe(&self) -> String {
        let mut d = format!(
            "{} N={} R={} s={} gamma={}",
            self.kind.name(),
            self.spec.dim,
            self.spec.radius,
            self.spec.s,
            self.spec.gamma
        );
        if self.kind.estimate_class() {
            d.push_str(&format!(" c0={} (estimate-class)", self.c0));
        }
        if let Some(k) = self.truncation {
            d.push_str(&format!(" K={k}"));
        }
        d
    }

    /// Coefficient c of the singular head c·|x−y|^{2s−N}.
    pub fn singular_coefficient(&self) -> T {
        self.head
    }

    fn check_point(&self, x: &[T]) -> Result<T> {
        crate::domain::distance_to_boundary(&self.spec, x)
    }

    pub fn green(&self, x: &[T], y: &[T]) -> Result<T> {
        self.check_point(x)?;
        self.check_point(y)?;
        if dist(x, y) == T::zero() {
            return Err(Error::DiagonalSingularity);
        }
        Ok(self.green_unchecked(x, y))
    }

    /// G(x,y) for interior x ≠ y without validation.
    pub fn green_unchecked(&self, x: &[T], y: &[T]) -> T {
        let r = dist(x, y);
        match self.kind {
            KernelKind::RflBall => {
                let (z, w) = self.rfl_z(x, y, r);
                let (i, _) = inc_beta_pair(self.spec.s, self.rfl_b(), z, w);
                self.kappa * r.powf(self.sing_exp()) * self.beta_ab * i
            }
            KernelKind::SflInterval => match self.truncation {
                Some(k) => self.sfl_series(x[0], y[0], k),
                None => {
                    let (a, b) = self.sfl_args(x[0], y[0]);
                    self.sfl_pref * (self.cos_sum(a) - self.cos_sum(b))
                }
            },
            KernelKind::CflSurrogate | KernelKind::Envelope => self.c0 * envelope_shape_at(&self.spec, x, y),
        }
    }

    /// G(x,y) − c|x−y|^{2s−N}, finite and continuous up to the diagonal.
    pub fn regular_part(&self, x: &[T], y: &[T]) -> T {
        let r = dist(x, y);
        match self.kind {
            KernelKind::RflBall => {
                let r2 = self.spec.radius * self.spec.radius;
                let b = self.rfl_b();
                if r == T::zero() {
                    let p = (r2 - norm2(x)) * (r2 - norm2(y));
                    return -self.kappa * (r2 / p).powf(b) / b;
                }
                let (z, w) = self.rfl_z(x, y, r);
                let (_, comp) = inc_beta_pair(self.spec.s, b, z, w);
                -self.kappa * r.powf(self.sing_exp()) * self.beta_ab * comp
            }
            KernelKind::SflInterval => match self.truncation {
                Some(k) => self.sfl_series(x[0], y[0], k),
                None => {
                    let (a, b) = self.sfl_args(x[0], y[0]);
                    let one = T::one();
                    let e = one - (self.spec.s + self.spec.s);
                    let near = self.sfl_k * (hurwitz_zeta(e, one + a) + hurwitz_zeta(e, one - a));
                    self.sfl_pref * (near - self.cos_sum(b))
                }
            },
            KernelKind::CflSurrogate | KernelKind::Envelope => {
                if r == T::zero() {
                    return T::zero();
                }
                let (mx, my) = clamps(&self.spec, x, y, r);
                self.c0 * r.powf(self.sing_exp()) * (mx * my - T::one())
            }
        }
    }

    /// φ = G/(c|x−y|^{2s−N}), with φ(x, x) = 1.
    pub fn head_factor(&self, x: &[T], y: &[T]) -> T {
        let r = dist(x, y);
        if r == T::zero() {
            return T::one();
        }
        self.green_unchecked(x, y) / (self.head * r.powf(self.sing_exp()))
    }

    fn sing_exp(&self) -> T {
        self.spec.s + self.spec.s - self.spec.n()
    }

    fn rfl_b(&self) -> T {
        self.spec.n() * T::c(0.5) - self.spec.s
    }

    /// z = r₀/(1+r₀) and 1 − z, both formed without cancellation.
    fn rfl_z(&self, x: &[T], y: &[T], r: T) -> (T, T) {
        let r2 = self.spec.radius * self.spec.radius;
        let p = (r2 - norm2(x)) * (r2 - norm2(y));
        let q = r2 * r * r;
        (p / (p + q), q / (p + q))
    }

    fn sfl_args(&self, x: T, y: T) -> (T, T) {
        let four_r = T::c(4.0) * self.spec.radius;
        ((x - y).abs() / four_r, (x + y + T::c(2.0) * self.spec.radius) / four_r)
    }

    fn cos_sum(&self, a: T) -> T {
        let one = T::one();
        let e = one - (self.spec.s + self.spec.s);
        self.sfl_k * (hurwitz_zeta(e, a) + hurwitz_zeta(e, one - a))
    }

    /// Eigenvalue λ_k^{−s} of the spectral Green operator.
    /// λ_k = (kπ/(2R))².
    pub fn sfl_eigenvalue(&self, k: usize) -> T {
        let w = T::n(k) * T::PI() / (T::c(2.0) * self.spec.radius);
        w * w
    }

    /// Normalized Dirichlet sine eigenfunction φ_k on (−R, R).
    pub fn sfl_eigenfunction(&self, k: usize, x: T) -> T {
        let r = self.spec.radius;
        (T::n(k) * T::PI() * (x + r) / (T::c(2.0) * r)).sin() / r.sqrt()
    }

    fn sfl_series(&self, x: T, y: T, terms: usize) -> T {
        (1..=terms)
            .map(|k| self.sfl_eigenvalue(k).powf(-self.spec.s) * self.sfl_eigenfunction(k, x) * self.sfl_eigenfunction(k, y))
            .sum()
    }

    /// M(x,z) = lim_{y→z} G(x,y)/δ(y)^γ for a boundary point z.
    pub fn martin(&self, x: &[T], z: &[T]) -> Result<T> {
        self.check_point(x)?;
        let nz = norm(z);
        if z.len() != self.spec.dim || (nz - self.spec.radius).abs() > T::c(1e-10) * self.spec.radius {
            return Err(Error::NotBoundaryPoint { norm: nz.f64(), radius: self.spec.radius.f64() });
        }
        Ok(self.martin_unchecked(x, z))
    }

    pub fn martin_unchecked(&self, x: &[T], z: &[T]) -> T {
        let s = self.spec.s;
        let r = self.spec.radius;
        let d = dist(x, z);
        match self.kind {
            KernelKind::RflBall => {
                T::c(2.0).powf(s) * self.kappa / s * (r * r - norm2(x)).powf(s) * r.powf(-s)
                    * d.powf(-self.spec.n())
            }
            KernelKind::SflInterval => match self.truncation {
                Some(terms) => {
                    let side = z[0] > T::zero();
                    (1..=terms)
                        .map(|k| {
                            let kf = T::n(k);
                            let sign = if side && k % 2 == 0 { -T::one() } else { T::one() };
                            let slope = sign * kf * T::PI() / (T::c(2.0) * r) / r.sqrt();
                            self.sfl_eigenvalue(k).powf(-s) * self.sfl_eigenfunction(k, x[0]) * slope
                        })
                        .sum()
                }
                None => {
                    let one = T::one();
                    let sigma = s + s;
                    let a = d / (T::c(4.0) * r);
                    let e = T::c(2.0) - sigma;
                    self.sfl_pref * self.sfl_k * (one - sigma) / (T::c(2.0) * r)
                        * (hurwitz_zeta(e, a) - hurwitz_zeta(e, one - a))
                }
            },
            KernelKind::CflSurrogate | KernelKind::Envelope => {
                let g = self.spec.gamma;
                let delta = r - norm(x);
                self.c0 * delta.powf(g) * d.powf(-(self.spec.n() - s - s + g + g))
            }
        }
    }
}

fn clamps<T: Real>(spec: &DomainSpec<T>, x: &[T], y: &[T], r: T) -> (T, T) {
    let dx = spec.radius - norm(x);
    let dy = spec.radius - norm(y);
    let one = T::one();
    ((dx / r).min(one).powf(spec.gamma), (dy / r).min(one).powf(spec.gamma))
}

fn envelope_shape_at<T: Real>(spec: &DomainSpec<T>, x: &[T], y: &[T]) -> T {
    let r = dist(x, y);
    let (mx, my) = clamps(spec, x, y, r);
    r.powf(spec.s + spec.s - spec.n()) * mx * my
}

/// E(x,y) = |x−y|^{2s−N} (δ(x)/|x−y| ∧ 1)^γ (δ(y)/|x−y| ∧ 1)^γ.
pub fn envelope_shape<T: Real>(spec: &DomainSpec<T>, x: &[T], y: &[T]) -> Result<T> {
    crate::domain::distance_to_boundary(spec, x)?;
    crate::domain::distance_to_boundary(spec, y)?;
    if dist(x, y) == T::zero() {
        return Err(Error::DiagonalSingularity);
    }
    Ok(envelope_shape_at(spec, x, y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeBounds<T> {
    pub shape: T,
    pub lower: T,
    pub upper: T,
    /// The one-sided majorants r^{2s−N}, (δy/δx)^γ r^{2s−N}, δy^γ r^{−(N−2s+γ)}
    /// and δx^γ δy^γ r^{−(N−2s+2γ)}.
    pub majorants: [T; 4],
}

/// Two-sided bounds `band.0·E ≤ G ≤ band.1·E` and the one-sided majorants of E.
pub fn envelope_bounds<T: Real>(spec: &DomainSpec<T>, x: &[T], y: &[T], band: (T, T)) -> Result<EnvelopeBounds<T>> {
    let shape = envelope_shape(spec, x, y)?;
    let r = dist(x, y);
    let g = spec.gamma;
    let dx = spec.radius - norm(x);
    let dy = spec.radius - norm(y);
    let base = r.powf(spec.s + spec.s - spec.n());
    Ok(EnvelopeBounds {
        shape,
        lower: band.0 * shape,
        upper: band.1 * shape,
        majorants: [
            base,
            (dy / dx).powf(g) * base,
            dy.powf(g) * base / r.powf(g),
            dx.powf(g) * dy.powf(g) * base / r.powf(g + g),
        ],
    })
}

/// Cutoff pair (ε, β) defining K^ε_β(t) = 1 ∧ (t/ε)^β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularizedSplit<T> {
    pub eps: T,
    pub beta: T,
}

impl<T: Real> RegularizedSplit<T> {
    pub fn new(spec: &DomainSpec<T>, eps: T, beta: T) -> Result<Self> {
        let bound = Self::beta_bound(spec);
        if !(beta > bound) {
            return Err(Error::InvalidSplit { beta: beta.f64(), bound: bound.f64() });
        }
        if !(eps > T::zero()) {
            return Err(Error::InvalidKernel(format!("split radius eps = {eps} must be positive")));
        }
        Ok(RegularizedSplit { eps, beta })
    }

    /// β = N − 2s + 2γ + 1.
    pub fn with_default_beta(spec: &DomainSpec<T>, eps: T) -> Result<Self> {
        Self::new(spec, eps, Self::beta_bound(spec) + T::one())
    }

    pub fn beta_bound(spec: &DomainSpec<T>) -> T {
        spec.n() - spec.s - spec.s + spec.gamma + spec.gamma
    }

    pub fn cutoff(&self, t: T) -> T {
        if t >= self.eps {
            T::one()
        } else {
            (t / self.eps).powf(self.beta)
        }
    }
}

/// (G^ε, H^ε) = (G·K^ε_β(|x−y|), G − G^ε).
pub fn kernel_split<T: Real>(kernel: &Kernel<T>, split: &RegularizedSplit<T>, x: &[T], y: &[T]) -> Result<(T, T)> {
    let g = kernel.green(x, y)?;
    let ge = g * split.cutoff(dist(x, y));
    Ok((ge, g - ge))
}

/// ∫_Ω H^ε(x, y) dx at fixed y, in polar coordinates around y.
pub fn near_field_mass<T: Real>(kernel: &Kernel<T>, split: &RegularizedSplit<T>, y: &[T]) -> T {
    let spec = kernel.spec();
    let s2 = spec.s + spec.s;
    let n = spec.n();
    let eps = split.eps;
    let dirs: Vec<(Vec<T>, T)> = match spec.dim {
        1 => vec![(vec![T::one()], T::one()), (vec![-T::one()], T::one())],
        _ => {
            let rule = GaussRule::<T>::new(48);
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&t, &w)| {
                    let th = T::PI() * (t + T::one());
                    (vec![th.cos(), th.sin()], w * T::PI())
                })
                .collect()
        }
    };
    let mut total = T::zero();
    for (e, wdir) in &dirs {
        // r = ε u^{1/(2s)} turns r^{2s−1} dr into ε^{2s}/(2s) du
        let integrand = |u: T| {
            if u <= T::zero() {
                return T::zero();
            }
            let r = eps * u.powf(T::one() / s2);
            let x: Vec<T> = y.iter().zip(e).map(|(&yi, &ei)| yi + r * ei).collect();
            if !spec.contains(&x) {
                return T::zero();
            }
            let g = kernel.green_unchecked(&x, y);
            g * (T::one() - split.cutoff(r)) * r.powf(n - s2) * eps.powf(s2) / s2
        };
        let (v, _) = adaptive_integrate(integrand, T::zero(), T::one(), T::c(1e-10) * eps.powf(s2));
        total = total + *wdir * v;
    }
    total
}

/// Radical inverse of `index` in `base`.
pub fn halton<T: Real>(mut index: usize, base: usize) -> T {
    let mut f = T::one();
    let mut r = T::zero();
    let b = T::n(base);
    while index > 0 {
        f = f / b;
        r = r + f * T::n(index % base);
        index /= base;
    }
    r
}

/// Quasi-random points of the ball from consecutive Halton indices.
pub fn halton_point<T: Real>(spec: &DomainSpec<T>, index: usize, bases: (usize, usize)) -> Vec<T> {
    let u: T = halton(index, bases.0);
    let v: T = halton(index, bases.1);
    match spec.dim {
        1 => vec![spec.radius * (T::c(2.0) * u - T::one())],
        _ => {
            let r = spec.radius * u.sqrt();
            let th = T::c(2.0) * T::PI() * v;
            vec![r * th.cos(), r * th.sin()]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandReport<T> {
    pub c1: T,
    pub c2: T,
    pub pairs: usize,
}

impl<T: Real> BandReport<T> {
    pub fn ratio(&self) -> T {
        self.c2 / self.c1
    }
}

/// Measured band c₁ ≤ G/E ≤ c₂ over quasi-random pairs with |x−y| ≥ cutoff.
pub fn estimate_band<T: Real>(kernel: &Kernel<T>, pairs: usize, cutoff: T) -> BandReport<T> {
    let spec = kernel.spec();
    let mut c1 = T::infinity();
    let mut c2 = T::zero();
    let mut count = 0;
    let mut idx = 1;
    let floor = T::c(1e-9) * spec.radius;
    while count < pairs {
        let x = halton_point(spec, idx, (2, 3));
        let y = halton_point(spec, idx, (5, 7));
        idx += 1;
        if spec.radius - norm(&x) < floor || spec.radius - norm(&y) < floor || dist(&x, &y) < cutoff {
            continue;
        }
        let ratio = kernel.green_unchecked(&x, &y) / envelope_shape_at(spec, &x, &y);
        c1 = c1.min(ratio);
        c2 = c2.max(ratio);
        count += 1;
    }
    BandReport { c1, c2, pairs: count }
}
