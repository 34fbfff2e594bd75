//! Radon measures: Dirac atoms plus a mesh density.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{DomainSpec, Mesh};
use crate::error::{Error, Result};
use crate::real::{dist, norm};
use crate::spaces::GridFunction;
use crate::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom<T> {
    pub location: Vec<T>,
    pub weight: T,
}

#[derive(Debug, Clone)]
pub struct RadonMeasure<T> {
    spec: DomainSpec<T>,
    atoms: Vec<Atom<T>>,
    density: Option<GridFunction<T>>,
}

impl<T: Real> RadonMeasure<T> {
    pub fn zero(spec: &DomainSpec<T>) -> Self {
        RadonMeasure { spec: *spec, atoms: Vec::new(), density: None }
    }

    pub fn new(spec: &DomainSpec<T>, atoms: Vec<Atom<T>>, density: Option<GridFunction<T>>) -> Result<Self> {
        for a in &atoms {
            crate::domain::distance_to_boundary(spec, &a.location)?;
            if !a.weight.is_finite() {
                return Err(Error::InvalidDomain("non-finite atom weight".into()));
            }
        }
        Ok(RadonMeasure { spec: *spec, atoms, density })
    }

    pub fn dirac(spec: &DomainSpec<T>, at: Vec<T>, weight: T) -> Result<Self> {
        Self::new(spec, vec![Atom { location: at, weight }], None)
    }

    /// δ(z)^{−γ} δ_z, the Dirac of unit δ^γ-weighted mass.
    pub fn unit_weighted_dirac(spec: &DomainSpec<T>, at: Vec<T>) -> Result<Self> {
        let d = crate::domain::distance_to_boundary(spec, &at)?;
        Self::dirac(spec, at, d.powf(-spec.gamma))
    }

    pub fn from_density(f: GridFunction<T>) -> Self {
        RadonMeasure { spec: *f.mesh().spec(), atoms: Vec::new(), density: Some(f) }
    }

    pub fn spec(&self) -> &DomainSpec<T> {
        &self.spec
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&GridFunction<T>> {
        self.density.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.iter().all(|a| a.weight == T::zero())
            && self.density.as_ref().is_none_or(|f| f.values().iter().all(|&v| v == T::zero()))
    }

    /// Σ |w_k| δ(x_k)^α + ∫ |f| δ^α.
    pub fn weighted_total_variation(&self, alpha: T) -> Result<T> {
        if alpha < T::zero() {
            return Err(Error::InvalidExponent(format!("alpha = {alpha} negative")));
        }
        let atoms: T = self
            .atoms
            .iter()
            .map(|a| a.weight.abs() * (self.spec.radius - norm(&a.location)).powf(alpha))
            .sum();
        let dens = match &self.density {
            Some(f) => {
                let abs: Vec<T> = f.values().iter().map(|v| v.abs()).collect();
                f.mesh().weighted_sum(&abs, alpha)
            }
            None => T::zero(),
        };
        Ok(atoms + dens)
    }

    /// Atoms sharing a location combined into one.
    pub fn merged_atoms(&self) -> Vec<Atom<T>> {
        let mut out: Vec<Atom<T>> = Vec::new();
        for a in &self.atoms {
            match out.iter_mut().find(|b| b.location == a.location) {
                Some(b) => b.weight = b.weight + a.weight,
                None => out.push(a.clone()),
            }
        }
        out
    }

    /// Jordan decomposition μ = μ⁺ − μ⁻.
    pub fn split_signs(&self) -> (Self, Self) {
        let merged = self.merged_atoms();
        let pos = merged.iter().filter(|a| a.weight > T::zero()).cloned().collect();
        let neg = merged
            .iter()
            .filter(|a| a.weight < T::zero())
            .map(|a| Atom { location: a.location.clone(), weight: -a.weight })
            .collect();
        let (dp, dn) = match &self.density {
            Some(f) => (Some(f.map(|v| v.max(T::zero()))), Some(f.map(|v| (-v).max(T::zero())))),
            None => (None, None),
        };
        (
            RadonMeasure { spec: self.spec, atoms: pos, density: dp },
            RadonMeasure { spec: self.spec, atoms: neg, density: dn },
        )
    }

    pub fn scaled(&self, c: T) -> Self {
        RadonMeasure {
            spec: self.spec,
            atoms: self.atoms.iter().map(|a| Atom { location: a.location.clone(), weight: c * a.weight }).collect(),
            density: self.density.as_ref().map(|f| f.map(|v| c * v)),
        }
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        let density = match (&self.density, &other.density) {
            (Some(a), Some(b)) => Some(a.zip_with(b, |x, y| x + y)?),
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (None, None) => None,
        };
        Ok(RadonMeasure { spec: self.spec, atoms, density })
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.sum(&other.scaled(-T::one()))
    }

    /// True when every merged atom and every density value is ≥ 0.
    pub fn is_nonnegative(&self) -> bool {
        self.merged_atoms().iter().all(|a| a.weight >= T::zero())
            && self.density.as_ref().is_none_or(|f| f.values().iter().all(|&v| v >= T::zero()))
    }

    /// Replaces each atom by a normalized C² bump of radius `scale` on the mesh.
    pub fn mollify(&self, mesh: &Arc<Mesh<T>>, scale: T) -> Result<Self> {
        if !(scale > T::zero()) {
            return Err(Error::InvalidExponent(format!("mollifier scale {scale} must be positive")));
        }
        let n = mesh.len();
        let mut values = match &self.density {
            Some(f) => f.values().to_vec(),
            None => vec![T::zero(); n],
        };
        for a in &self.atoms {
            let d = self.spec.radius - norm(&a.location);
            if scale >= d {
                return Err(Error::ScaleTooLarge { scale: scale.f64(), delta: d.f64() });
            }
            let bump: Vec<T> = (0..n)
                .map(|i| {
                    let rho = dist(mesh.node(i), &a.location) / scale;
                    if rho < T::one() {
                        let t = T::one() - rho * rho;
                        t * t * t
                    } else {
                        T::zero()
                    }
                })
                .collect();
            let mass: T = bump.iter().zip(mesh.weights()).map(|(&b, &w)| b * w).sum();
            if mass <= T::zero() {
                return Err(Error::ScaleBelowMesh { scale: scale.f64() });
            }
            for (v, b) in values.iter_mut().zip(&bump) {
                *v = *v + a.weight * *b / mass;
            }
        }
        let f = GridFunction::new(mesh.clone(), values)?;
        Ok(RadonMeasure { spec: self.spec, atoms: Vec::new(), density: Some(f) })
    }

    /// Unweighted total mass Σ w_k + ∫ f.
    pub fn total_mass(&self) -> T {
        let atoms: T = self.atoms.iter().map(|a| a.weight).sum();
        let dens = self.density.as_ref().map_or(T::zero(), |f| f.mesh().weighted_sum(f.values(), T::zero()));
        atoms + dens
    }
}

/// JSON measure literal `{ "atoms": [{"x": …, "w": …}], "density": "…" }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct MeasureLiteral {
    #[serde(default)]
    pub atoms: Vec<AtomLiteral>,
    #[serde(default)]
    pub density: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomLiteral {
    pub x: Coord,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Scalar(f64),
    Point(Vec<f64>),
}

impl Coord {
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            Coord::Scalar(x) => vec![*x],
            Coord::Point(p) => p.clone(),
        }
    }
}

impl MeasureLiteral {
    /// Builds the measure; `density` turns the density string into node values.
    pub fn build<T: Real, F>(&self, mesh: &Arc<Mesh<T>>, density: F) -> Result<RadonMeasure<T>>
    where
        F: FnOnce(&str, &Arc<Mesh<T>>) -> Result<Vec<T>>,
    {
        let spec = mesh.spec();
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                let loc: Vec<T> = a.x.to_vec().into_iter().map(T::c).collect();
                if loc.len() != spec.dim {
                    return Err(Error::Config(format!("atom has {} coordinates in dimension {}", loc.len(), spec.dim)));
                }
                Ok(Atom { location: loc, weight: T::c(a.w) })
            })
            .collect::<Result<Vec<_>>>()?;
        let dens = match &self.density {
            Some(expr) => Some(GridFunction::new(mesh.clone(), density(expr, mesh)?)?),
            None => None,
        };
        RadonMeasure::new(spec, atoms, dens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::build_mesh;

    fn spec() -> DomainSpec<f64> {
        DomainSpec::unit(1, 0.25, 0.25).unwrap()
    }

    #[test]
    fn total_variation_examples() {
        let s = spec();
        let d = RadonMeasure::dirac(&s, vec![0.0], 1.0).unwrap();
        assert_eq!(d.weighted_total_variation(0.5).unwrap(), 1.0);
        let u = RadonMeasure::unit_weighted_dirac(&s, vec![0.9]).unwrap();
        assert!((u.weighted_total_variation(0.25).unwrap() - 1.0).abs() < 1e-14);
        let m = Arc::new(build_mesh(&s, 16, 1.0).unwrap());
        let one = RadonMeasure::from_density(GridFunction::constant(m, 1.0));
        assert!((one.weighted_total_variation(0.0).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sign_split() {
        let s = spec();
        let mu = RadonMeasure::new(
            &s,
            vec![Atom { location: vec![0.0], weight: 2.0 }, Atom { location: vec![0.5], weight: -1.0 }],
            None,
        )
        .unwrap();
        let (p, n) = mu.split_signs();
        assert_eq!(p.atoms(), &[Atom { location: vec![0.0], weight: 2.0 }]);
        assert_eq!(n.atoms(), &[Atom { location: vec![0.5], weight: 1.0 }]);
        let tv = mu.weighted_total_variation(0.25).unwrap();
        let sum = p.weighted_total_variation(0.25).unwrap() + n.weighted_total_variation(0.25).unwrap();
        assert!((tv - sum).abs() < 1e-15);
        let (_, none) = p.split_signs();
        assert!(none.is_zero());
    }

    #[test]
    fn mollify_preserves_mass() {
        let s = spec();
        let m = Arc::new(build_mesh(&s, 256, 2.0).unwrap());
        let d = RadonMeasure::dirac(&s, vec![0.0], 1.0).unwrap();
        let f = d.mollify(&m, 0.1).unwrap();
        assert!((f.total_mass() - 1.0).abs() < 1e-12);
        assert!(matches!(
            RadonMeasure::dirac(&s, vec![0.95], 1.0).unwrap().mollify(&m, 0.1),
            Err(Error::ScaleTooLarge { .. })
        ));
        assert!(RadonMeasure::zero(&s).mollify(&m, 0.1).unwrap().is_zero());
    }

    #[test]
    fn literal_parsing() {
        let lit: MeasureLiteral = serde_json::from_str(r#"{"atoms":[{"x":0.25,"w":1.5}]}"#).unwrap();
        let m = Arc::new(build_mesh(&spec(), 16, 1.0).unwrap());
        let mu = lit.build(&m, |_, _| unreachable!()).unwrap();
        assert_eq!(mu.atoms()[0].weight, 1.5);
        assert!(serde_json::from_str::<MeasureLiteral>(r#"{"atom":[]}"#).is_err());
    }
}
