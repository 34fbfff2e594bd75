//! Node profiles from expression strings. Variables: `x`, `y` (0 in 1D),
//! `r` = |x|, `d` = distance to the boundary, `pi`.

use std::sync::Arc;

use evalexpr::{ContextWithMutableVariables, HashMapContext, Value};
use nlgreen::Mesh;

pub fn profile(expr: &str, mesh: &Arc<Mesh<f64>>) -> nlgreen::Result<Vec<f64>> {
    let bad = |e: evalexpr::EvalexprError| nlgreen::Error::Config(format!("expression {expr:?}: {e}"));
    let tree = evalexpr::build_operator_tree(expr).map_err(bad)?;
    let mut ctx = HashMapContext::new();
    let mut out = Vec::with_capacity(mesh.len());
    for i in 0..mesh.len() {
        let x = mesh.node(i);
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let vars = [("x", x[0]), ("y", x.get(1).copied().unwrap_or(0.0)), ("r", r), ("d", mesh.delta()[i]), ("pi", std::f64::consts::PI)];
        for (k, v) in vars {
            ctx.set_value(k.into(), Value::Float(v)).map_err(bad)?;
        }
        let v = tree.eval_number_with_context(&ctx).map_err(bad)?;
        if !v.is_finite() {
            return Err(nlgreen::Error::Config(format!("expression {expr:?} is not finite at node {i}")));
        }
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nlgreen::{build_mesh, DomainSpec};

    #[test]
    fn evaluates_on_nodes() {
        let spec = DomainSpec::unit(1, 0.25, 0.25).unwrap();
        let mesh = Arc::new(build_mesh(&spec, 16, 2.0).unwrap());
        let v = profile("2 * x + d", &mesh).unwrap();
        for i in 0..mesh.len() {
            assert!((v[i] - 2.0 * mesh.node(i)[0] - mesh.delta()[i]).abs() < 1e-15);
        }
        assert!(profile("x +", &mesh).is_err());
        assert!(profile("1 / (x - x)", &mesh).is_err());
    }
}
