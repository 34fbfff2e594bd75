//! Weighted Lebesgue and Marcinkiewicz norms, critical exponents and the
//! subcritical integral test.

use std::sync::Arc;

use num_traits::{FromPrimitive, Num};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::Mesh;
use crate::error::{Error, Result};
use crate::solver::Nonlinearity;
use crate::special::adaptive_integrate;
use crate::Real;

/// Node values on a mesh.
#[derive(Debug, Clone)]
pub struct GridFunction<T> {
    mesh: Arc<Mesh<T>>,
    values: Vec<T>,
    label: Option<String>,
}

impl<T: Real> GridFunction<T> {
    pub fn new(mesh: Arc<Mesh<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(Error::MeshMismatch { expected: mesh.len(), got: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMesh(format!("non-finite value at node {i}")));
        }
        Ok(GridFunction { mesh, values, label: None })
    }

    pub fn zeros(mesh: Arc<Mesh<T>>) -> Self {
        let n = mesh.len();
        GridFunction { mesh, values: vec![T::zero(); n], label: None }
    }

    pub fn constant(mesh: Arc<Mesh<T>>, c: T) -> Self {
        let n = mesh.len();
        GridFunction { mesh, values: vec![c; n], label: None }
    }

    /// Samples `f(x, δ(x))` at every node.
    pub fn from_fn<F: Fn(&[T], T) -> T>(mesh: Arc<Mesh<T>>, f: F) -> Self {
        let values = (0..mesh.len()).map(|i| f(mesh.node(i), mesh.delta()[i])).collect();
        GridFunction { mesh, values, label: None }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn mesh(&self) -> &Arc<Mesh<T>> {
        &self.mesh
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<F: Fn(T) -> T>(&self, f: F) -> Self {
        GridFunction {
            mesh: self.mesh.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            label: None,
        }
    }

    pub fn zip_with<F: Fn(T, T) -> T>(&self, other: &Self, f: F) -> Result<Self> {
        self.check_same(other)?;
        Ok(GridFunction {
            mesh: self.mesh.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
            label: None,
        })
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.mesh, &other.mesh) && self.mesh.len() != other.mesh.len() {
            return Err(Error::MeshMismatch { expected: self.mesh.len(), got: other.mesh.len() });
        }
        Ok(())
    }

    /// ∫ u v δ^α, the weighted pairing.
    pub fn pairing(&self, other: &Self, alpha: T) -> T {
        let m = &self.mesh;
        (0..m.len())
            .map(|i| self.values[i] * other.values[i] * m.delta()[i].powf(alpha) * m.weights()[i])
            .sum()
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &v| a.max(v.abs()))
    }
}

fn node_masses<T: Real>(mesh: &Mesh<T>, alpha: T) -> Vec<T> {
    mesh.delta().iter().zip(mesh.weights()).map(|(&d, &w)| d.powf(alpha) * w).collect()
}

/// (Σ |u_i|^q δ_i^α w_i)^{1/q}.
pub fn lq_norm<T: Real>(u: &GridFunction<T>, q: T, alpha: T) -> Result<T> {
    if !(q >= T::one()) {
        return Err(Error::InvalidExponent(format!("q = {q} below 1")));
    }
    let m = node_masses(u.mesh(), alpha);
    let s: T = u.values().iter().zip(&m).map(|(&v, &w)| v.abs().powf(q) * w).sum();
    Ok(s.powf(T::one() / q))
}

/// Nodes sorted by |u| descending with cumulative masses and cumulative ∫|u|.
struct Superlevel<T> {
    abs: Vec<T>,
    mass: Vec<T>,
    integral: Vec<T>,
}

fn superlevel<T: Real>(u: &GridFunction<T>, alpha: T) -> Superlevel<T> {
    let m = node_masses(u.mesh(), alpha);
    let mut order: Vec<usize> = (0..u.len()).collect();
    let v = u.values();
    order.sort_by(|&a, &b| v[b].abs().partial_cmp(&v[a].abs()).unwrap().then(a.cmp(&b)));
    let mut mass = Vec::with_capacity(order.len());
    let mut integral = Vec::with_capacity(order.len());
    let (mut cm, mut ci) = (T::zero(), T::zero());
    for &i in &order {
        cm = cm + m[i];
        ci = ci + v[i].abs() * m[i];
        mass.push(cm);
        integral.push(ci);
    }
    let abs = order.iter().map(|&i| v[i].abs()).collect();
    Superlevel { abs, mass, integral }
}

/// sup_λ λ·(∫_{|u|>λ} δ^α)^{1/q}, attained as λ increases to a node value.
pub fn marcinkiewicz_quasinorm<T: Real>(u: &GridFunction<T>, q: T, alpha: T) -> Result<T> {
    if !(q >= T::one()) {
        return Err(Error::InvalidExponent(format!("q = {q} below 1")));
    }
    let sl = superlevel(u, alpha);
    let inv = T::one() / q;
    let mut best = T::zero();
    for k in 0..sl.abs.len() {
        // only the last node of a tie group closes a superlevel set
        if k + 1 < sl.abs.len() && sl.abs[k + 1] == sl.abs[k] {
            continue;
        }
        if sl.abs[k] > T::zero() {
            best = best.max(sl.abs[k] * sl.mass[k].powf(inv));
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeakNorm<T> {
    pub value: T,
    pub superlevel_sup: T,
    pub random_sup: T,
    pub draws: usize,
}

/// sup_A ∫_A |u| δ^α / (∫_A δ^α)^{1−1/q} over superlevel sets of |u| and
/// `draws` seeded random node subsets.
pub fn marcinkiewicz_norm<T: Real>(u: &GridFunction<T>, q: T, alpha: T, draws: usize, seed: u64) -> Result<WeakNorm<T>> {
    if !(q > T::one()) {
        return Err(Error::InvalidExponent(format!("weak norm needs q > 1, got {q}")));
    }
    let sl = superlevel(u, alpha);
    let inv = T::one() / q;
    let co = T::one() - inv;
    let mut sup_level = T::zero();
    for k in 0..sl.abs.len() {
        let (v, m) = (sl.abs[k], sl.mass[k]);
        if m <= T::zero() {
            continue;
        }
        // ∫_A |u| = v·m + Σ_A (|u_i| − v) μ_i, the excess being nonnegative
        let excess = (sl.integral[k] - v * m).max(T::zero());
        sup_level = sup_level.max(v * m.powf(inv) + excess / m.powf(co));
    }
    let masses = node_masses(u.mesh(), alpha);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sup_rand = T::zero();
    for _ in 0..draws {
        let p: f64 = rng.gen_range(0.02..1.0);
        let (mut num, mut den) = (T::zero(), T::zero());
        for (i, &mi) in masses.iter().enumerate() {
            if rng.gen_bool(p) {
                num = num + u.values()[i].abs() * mi;
                den = den + mi;
            }
        }
        if den > T::zero() {
            sup_rand = sup_rand.max(num / den.powf(co));
        }
    }
    Ok(WeakNorm { value: sup_level.max(sup_rand), superlevel_sup: sup_level, random_sup: sup_rand, draws })
}

/// p*_{β,α} = (N+α)/(N+β−2s), generic so that rational arithmetic gives exact values.
pub fn critical_exponent<T>(n: T, s: T, beta: T, alpha: T) -> Result<T>
where
    T: Num + Copy + PartialOrd + std::fmt::Debug,
{
    let zero = T::zero();
    let two = T::one() + T::one();
    if beta < zero {
        return Err(Error::InvalidExponent(format!("beta = {beta:?} negative")));
    }
    if alpha < beta - two * s {
        return Err(Error::InvalidExponent(format!("alpha = {alpha:?} below beta - 2s")));
    }
    let den = n + beta - two * s;
    if den <= zero {
        return Err(Error::InvalidExponent(format!("denominator N + beta - 2s = {den:?} not positive")));
    }
    Ok((n + alpha) / den)
}

/// p* = (N+γ)/(N+γ−2s).
pub fn p_star<T>(n: T, s: T, gamma: T) -> Result<T>
where
    T: Num + Copy + PartialOrd + std::fmt::Debug,
{
    critical_exponent(n, s, gamma, gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentTable<T> {
    pub n: T,
    pub s: T,
    pub beta: T,
    pub alpha: T,
    pub p_beta_alpha: T,
    pub p_star: T,
}

impl<T: Real> ExponentTable<T> {
    pub fn new(n: T, s: T, gamma: T, beta: T, alpha: T) -> Result<Self> {
        Ok(ExponentTable {
            n,
            s,
            beta,
            alpha,
            p_beta_alpha: critical_exponent(n, s, beta, alpha)?,
            p_star: p_star(n, s, gamma)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmissibleRange<T> {
    pub low: T,
    pub high: T,
}

impl<T: Real> AdmissibleRange<T> {
    pub fn is_empty(&self) -> bool {
        self.low >= self.high
    }

    pub fn contains(&self, alpha: T) -> bool {
        alpha > self.low && alpha < self.high
    }
}

/// Range of weights α for which 𝔾 maps 𝓜(Ω, δ^{γ′}) compactly into L^q(Ω, δ^α).
pub fn admissible_range<T: Real + FromPrimitive>(n: T, s: T, gp: T) -> AdmissibleRange<T> {
    let one = T::one();
    let low = (-gp - one).max(gp - s - s).max(-gp * n / (n - s - s + gp));
    let high = gp * n / (n - s - s);
    // −0·N/… yields −0; report a clean zero
    AdmissibleRange { low: low + T::zero(), high: high + T::zero() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcriticality {
    Subcritical,
    CriticalOrSuper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubcriticalReport<T> {
    pub verdict: Subcriticality,
    /// ∫₁^∞ [g(t) − g(−t)] t^{−1−p*} dt when finite, else the partial value up to 2^40.
    pub estimate: T,
    pub closed_form: bool,
}

/// Checks ∫₁^∞ [g(t) − g(−t)] t^{−1−p*} dt < ∞.
pub fn subcritical_check<T: Real>(g: &Nonlinearity<T>, p_star: T) -> Result<SubcriticalReport<T>> {
    g.validate()?;
    if let Some(p) = g.power_exponent() {
        let two = T::c(2.0);
        return Ok(if p < p_star {
            SubcriticalReport { verdict: Subcriticality::Subcritical, estimate: two / (p_star - p), closed_form: true }
        } else {
            SubcriticalReport { verdict: Subcriticality::CriticalOrSuper, estimate: T::infinity(), closed_form: true }
        });
    }
    // dyadic blocks in log variable: ∫_{2^k}^{2^{k+1}} F(t) dt = ∫ F(e^v) e^v dv
    let ln2 = T::LN_2();
    let blocks: Vec<T> = (0..40)
        .map(|k| {
            let a = ln2 * T::n(k);
            let (v, _) = adaptive_integrate(
                |v: T| {
                    let t = v.exp();
                    (g.eval(t) - g.eval(-t)) * t.powf(-p_star)
                },
                a,
                a + ln2,
                T::c(1e-13),
            );
            v
        })
        .collect();
    let partial: T = blocks.iter().copied().sum();
    let last = blocks[39];
    let prev = blocks[38];
    if last == T::zero() {
        return Ok(SubcriticalReport { verdict: Subcriticality::Subcritical, estimate: partial, closed_form: false });
    }
    let ratio = last / prev;
    if ratio < T::one() - T::c(1e-8) {
        // geometric tail extrapolation of the block sequence
        let tail = last * ratio / (T::one() - ratio);
        Ok(SubcriticalReport { verdict: Subcriticality::Subcritical, estimate: partial + tail, closed_form: false })
    } else {
        Ok(SubcriticalReport { verdict: Subcriticality::CriticalOrSuper, estimate: partial, closed_form: false })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_mesh, DomainSpec};
    use num_rational::Ratio;

    fn mesh(n: usize) -> Arc<Mesh<f64>> {
        Arc::new(build_mesh(&DomainSpec::unit(1, 0.25, 0.25).unwrap(), n, 2.0).unwrap())
    }

    #[test]
    fn lq_examples() {
        let m = mesh(256);
        let one = GridFunction::constant(m.clone(), 1.0);
        assert!((lq_norm(&one, 1.0, 0.0).unwrap() - 2.0).abs() < 1e-13);
        assert!((lq_norm(&one, 1.0, 0.5).unwrap() - 4.0 / 3.0).abs() < 1e-4);
        let u = GridFunction::from_fn(m.clone(), |_, d| d.powf(-0.2));
        assert!((lq_norm(&u, 1.0, 0.5).unwrap() - 2.0 / 1.3).abs() < 1e-3);
        assert!(lq_norm(&one, 0.5, 0.0).is_err());
    }

    #[test]
    fn quasinorm_examples() {
        let m = mesh(512);
        let one = GridFunction::constant(m.clone(), 1.0);
        let q = marcinkiewicz_quasinorm(&one, 2.0, 0.5).unwrap();
        assert!((q - (4.0f64 / 3.0).sqrt()).abs() < 1e-4);
        assert_eq!(marcinkiewicz_quasinorm(&GridFunction::zeros(m.clone()), 2.0, 0.5).unwrap(), 0.0);
        let u = GridFunction::from_fn(m.clone(), |x, _| x[0].abs().powf(-0.3));
        assert!(marcinkiewicz_quasinorm(&u, 2.0, 0.0).unwrap() <= lq_norm(&u, 2.0, 0.0).unwrap());
    }

    #[test]
    fn weak_norm_of_constant() {
        let m = mesh(128);
        let c = GridFunction::constant(m.clone(), 3.0);
        let w = marcinkiewicz_norm(&c, 2.0, 0.25, 50, 7).unwrap();
        let expect = 3.0 * m.weighted_sum(&vec![1.0; m.len()], 0.25).sqrt();
        assert!((w.value - expect).abs() < 1e-12 * expect);
        assert!(marcinkiewicz_norm(&c, 1.0, 0.0, 1, 0).is_err());
    }

    #[test]
    fn exponents() {
        let r = |a: i64, b: i64| Ratio::new(a, b);
        assert_eq!(critical_exponent(r(2, 1), r(1, 2), r(1, 2), r(1, 2)).unwrap(), r(5, 3));
        assert_eq!(critical_exponent(r(3, 1), r(1, 1), r(1, 1), r(0, 1)).unwrap(), r(3, 2));
        assert_eq!(critical_exponent(r(2, 1), r(1, 2), r(1, 2), r(0, 1)).unwrap(), r(4, 3));
        assert_eq!(critical_exponent(2.0, 0.5, 0.5, 0.5).unwrap(), 5.0 / 3.0);
        assert!(critical_exponent(1.0, 0.75, 0.0, 0.0).is_err());
    }

    #[test]
    fn admissible_examples() {
        let a = admissible_range(2.0f64, 0.5, 0.5);
        assert!((a.low + 0.5).abs() < 1e-15 && (a.high - 1.0).abs() < 1e-15);
        let b = admissible_range(2.0, 0.5, 0.0);
        assert_eq!((b.low, b.high), (0.0, 0.0));
        assert!(b.is_empty());
        let c = admissible_range(3.0f64, 0.25, 0.4);
        assert!((c.low + 0.1).abs() < 1e-12 && (c.high - 0.48).abs() < 1e-12);
    }

    #[test]
    fn subcritical_examples() {
        let ps = 5.0 / 3.0;
        let a = subcritical_check(&Nonlinearity::power(1.5).unwrap(), ps).unwrap();
        assert_eq!(a.verdict, Subcriticality::Subcritical);
        let b = subcritical_check(&Nonlinearity::power(ps).unwrap(), ps).unwrap();
        assert_eq!(b.verdict, Subcriticality::CriticalOrSuper);
        let c = subcritical_check(&Nonlinearity::saturating(1.0, 1.0).unwrap(), ps).unwrap();
        assert_eq!(c.verdict, Subcriticality::Subcritical);
        // a table reproducing t^{5/3} on [0, 2^41] must be flagged critical numerically
        let knots: Vec<f64> = (0..=82).map(|k| if k == 0 { 0.0 } else { 2f64.powf(k as f64 / 2.0 - 0.5) }).collect();
        let mut t: Vec<f64> = knots.iter().rev().map(|&x| -x).collect();
        t.extend(knots.iter().skip(1));
        let v: Vec<f64> = t.iter().map(|&x: &f64| x.signum() * x.abs().powf(ps)).collect();
        let tab = Nonlinearity::table(t, v).unwrap();
        assert_eq!(subcritical_check(&tab, ps).unwrap().verdict, Subcriticality::CriticalOrSuper);
    }
}
