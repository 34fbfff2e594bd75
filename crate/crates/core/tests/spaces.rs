use std::sync::Arc;

use nlgreen::spaces::{
    admissible_range, critical_exponent, lq_norm, marcinkiewicz_norm, marcinkiewicz_quasinorm, p_star, ExponentTable,
};
use nlgreen::{build_mesh, DomainSpec, GridFunction, Mesh, RadonMeasure};
use num_rational::Ratio;

fn mesh(dim: usize, n: usize) -> Arc<Mesh<f64>> {
    let s = if dim == 1 { 0.25 } else { 0.5 };
    let spec = DomainSpec::unit(dim, s, s).unwrap();
    Arc::new(build_mesh(&spec, n, 2.0).unwrap())
}

#[test]
fn exact_critical_exponents() {
    let r = |a: i64, b: i64| Ratio::new(a, b);
    assert_eq!(p_star(r(2, 1), r(1, 2), r(1, 2)).unwrap(), r(5, 3));
    assert_eq!(critical_exponent(r(3, 1), r(1, 1), r(1, 1), r(0, 1)).unwrap(), r(3, 2));
    // N = 1, s = γ = 1/4
    assert_eq!(p_star(r(1, 1), r(1, 4), r(1, 4)).unwrap(), r(5, 3));
    assert!(critical_exponent(r(1, 1), r(3, 4), r(0, 1), r(0, 1)).is_err());
}

#[test]
fn exponent_table_and_admissible_weights() {
    let t = ExponentTable::new(2.0f64, 0.5, 0.5, 0.5, 0.5).unwrap();
    assert!((t.p_star - 5.0 / 3.0).abs() < 1e-15);
    assert_eq!(t.p_beta_alpha, t.p_star);
    let a = admissible_range(1.0f64, 0.25, 0.25);
    assert!(!a.is_empty());
    assert!(a.contains(0.0));
    assert!((a.high - 0.5).abs() < 1e-15);
}

#[test]
fn mesh_weights_integrate_the_distance_weight() {
    for (dim, n) in [(1, 256), (2, 24)] {
        let m = mesh(dim, n);
        let spec = *m.spec();
        let vol: f64 = m.weights().iter().sum();
        assert!((vol - spec.volume()).abs() < 1e-12 * spec.volume(), "{dim}: {vol}");
        for alpha in [0.0, 0.5, 1.0] {
            let ones = vec![1.0; m.len()];
            let got = m.weighted_sum(&ones, alpha);
            let want = spec.weight_integral(alpha);
            assert!(((got - want) / want).abs() < 2e-3, "{dim} {alpha}: {got} {want}");
        }
    }
}

#[test]
fn weak_norm_dominated_by_strong_norm() {
    let m = mesh(1, 256);
    let fs: Vec<GridFunction<f64>> = vec![
        GridFunction::from_fn(m.clone(), |x, _| 1.0 + x[0]),
        GridFunction::from_fn(m.clone(), |_, d| d.powf(-0.4)),
        GridFunction::from_fn(m.clone(), |x, _| (7.0 * x[0]).sin()),
    ];
    for u in &fs {
        for q in [1.5, 2.0, 3.0] {
            let strong = lq_norm(u, q, 0.5).unwrap();
            let quasi = marcinkiewicz_quasinorm(u, q, 0.5).unwrap();
            let weak = marcinkiewicz_norm(u, q, 0.5, 50, 3).unwrap();
            assert!(quasi <= strong * (1.0 + 1e-12), "{quasi} {strong}");
            // ‖·‖_{q,∞} ≤ weak ≤ q/(q−1)·‖·‖_{q,∞}
            assert!(quasi <= weak.value * (1.0 + 1e-12));
            assert!(weak.value <= q / (q - 1.0) * quasi * (1.0 + 1e-12));
        }
    }
}

#[test]
fn quasinorm_of_a_constant() {
    let m = mesh(2, 12);
    let u = GridFunction::constant(m.clone(), 3.0);
    let mass = m.weighted_sum(&vec![1.0; m.len()], 0.0);
    let got = marcinkiewicz_quasinorm(&u, 2.0, 0.0).unwrap();
    assert!((got - 3.0 * mass.sqrt()).abs() < 1e-13);
}

#[test]
fn measure_operations() {
    let m = mesh(1, 128);
    let spec = *m.spec();
    let a = RadonMeasure::dirac(&spec, vec![0.3], 2.0).unwrap();
    assert!((a.weighted_total_variation(0.5).unwrap() - 2.0 * 0.7f64.sqrt()).abs() < 1e-15);
    let mixed = a.difference(&RadonMeasure::dirac(&spec, vec![-0.4], 1.5).unwrap()).unwrap();
    let (p, n) = mixed.split_signs();
    assert!(p.is_nonnegative() && n.is_nonnegative());
    assert_eq!(p.total_mass(), 2.0);
    assert_eq!(n.total_mass(), 1.5);
    assert!(RadonMeasure::dirac(&spec, vec![1.0], 1.0).is_err());
    // mollification keeps the unweighted mass
    let mol = a.mollify(&m, 0.1).unwrap();
    assert!((mol.total_mass() - 2.0).abs() < 1e-13);
    assert!(a.mollify(&m, 0.8).is_err());
}
