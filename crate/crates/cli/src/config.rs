use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nlgreen::experiments::config_hash;
use nlgreen::kernels::KernelConfig;
use nlgreen::measures::MeasureLiteral;
use nlgreen::verify::preset;
use nlgreen::{Nonlinearity, SolveConfig};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

pub const OUT_ENV: &str = "NLGREEN_OUT";

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshBlock {
    pub resolution: Option<usize>,
    pub grading: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub damping: Option<f64>,
    pub method: Option<Method>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Picard,
    Monotone,
}

/// `"linear"`, `{"power": p}`, `{"saturating": {"a": …, "scale": …}}` or `{"table": {"t": […], "v": […]}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum GSpec {
    Linear,
    Power(f64),
    Saturating { a: f64, scale: f64 },
    Table { t: Vec<f64>, v: Vec<f64> },
}

impl GSpec {
    pub fn build(&self) -> nlgreen::Result<Nonlinearity<f64>> {
        match self {
            GSpec::Linear => Ok(Nonlinearity::linear()),
            GSpec::Power(p) => Nonlinearity::power(*p),
            GSpec::Saturating { a, scale } => Nonlinearity::saturating(*a, *scale),
            GSpec::Table { t, v } => Nonlinearity::table(t.clone(), v.clone()),
        }
    }
}

/// The JSON run file. Every block is optional; what a command needs and
/// does not find is a config error.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub preset: Option<String>,
    pub kernel: Option<KernelConfig>,
    pub mesh: Option<MeshBlock>,
    pub solver: Option<SolverBlock>,
    pub g: Option<GSpec>,
    pub mu: Option<MeasureLiteral>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub damping: Option<f64>,
    /// Extra `norms` profiles, name → expression in x, y, r, d.
    pub profiles: Option<BTreeMap<String, String>>,
    pub q: Option<Vec<f64>>,
    pub alpha: Option<Vec<f64>>,
    pub draws: Option<usize>,
    pub pairs: Option<usize>,
    pub experiment: Option<Map<String, Value>>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text).map_err(|e| CliError::Usage(format!("{}:{e}", path.display())))
}

/// `line:column: message` on failure.
pub fn parse(text: &str) -> Result<RunConfig, String> {
    serde_json::from_str(text).map_err(|e| format!("{}:{}: {e}", e.line(), e.column()))
}

/// Command-line overrides; they win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub resolution: Option<usize>,
    pub threads: Option<usize>,
}

/// Everything a command runs on, defaults filled in.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub command: String,
    pub raw: RunConfig,
    pub kernel: Option<KernelConfig>,
    pub resolution: Option<usize>,
    pub grading: f64,
    pub solver: SolveConfig,
    pub method: Method,
    pub seed: u64,
    pub output: PathBuf,
    pub threads: Option<usize>,
}

impl Resolved {
    pub fn new(command: &str, mut raw: RunConfig, ov: Overrides) -> Result<Self, CliError> {
        if let Some(c) = &raw.command {
            if c != command {
                return Err(CliError::Usage(format!("config is for command {c:?}, not {command:?}")));
            }
        }
        if ov.preset.is_some() {
            raw.preset = ov.preset;
        }
        let from_preset = match &raw.preset {
            Some(p) => Some(preset(p)?),
            None => None,
        };
        let kernel = match (&raw.kernel, &from_preset) {
            (Some(k), _) => Some(k.resolved()),
            (None, Some((k, _))) => Some(k.clone()),
            (None, None) => None,
        };
        let mesh = raw.mesh.clone().unwrap_or_default();
        let resolution = ov.resolution.or(mesh.resolution).or(from_preset.as_ref().map(|p| p.1)).or_else(|| {
            kernel.as_ref().map(|k| if k.dim == 1 { 256 } else { 24 })
        });
        let block = raw.solver.clone().unwrap_or_default();
        let d = SolveConfig::default();
        let solver = SolveConfig {
            tol: raw.tol.or(block.tol).unwrap_or(d.tol),
            max_iter: raw.max_iter.or(block.max_iter).unwrap_or(d.max_iter),
            damping: raw.damping.or(block.damping).unwrap_or(d.damping),
        };
        let output = ov
            .out
            .or(raw.output.clone())
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("nlgreen-out"));
        Ok(Resolved {
            command: command.into(),
            kernel,
            resolution,
            grading: mesh.grading.unwrap_or(2.0),
            solver,
            method: block.method.unwrap_or_default(),
            seed: ov.seed.or(raw.seed).unwrap_or(0),
            output,
            threads: ov.threads.or(raw.threads),
            raw,
        })
    }

    pub fn kernel(&self) -> Result<KernelConfig, CliError> {
        self.kernel.clone().ok_or_else(|| CliError::Usage("no kernel: give a kernel block or a preset".into()))
    }

    pub fn resolution(&self) -> Result<usize, CliError> {
        self.resolution.ok_or_else(|| CliError::Usage("no mesh resolution".into()))
    }

    /// Common part of the embedded config.
    pub fn base_json(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("command".into(), Value::from(self.command.clone()));
        if let Some(p) = &self.raw.preset {
            m.insert("preset".into(), Value::from(p.clone()));
        }
        if let Some(k) = &self.kernel {
            m.insert("kernel".into(), serde_json::to_value(k).expect("kernel serializes"));
        }
        if let Some(n) = self.resolution {
            m.insert("mesh".into(), serde_json::json!({ "resolution": n, "grading": self.grading }));
        }
        m.insert("seed".into(), Value::from(self.seed));
        m
    }
}

/// Hash over the resolved config; output directory and thread count are left out.
pub fn hash(config: &Map<String, Value>) -> String {
    let mut c = config.clone();
    c.remove("threads");
    c.remove("output");
    config_hash(&c)
}

pub fn version() -> String {
    format!("nlgreen {} ({})", env!("CARGO_PKG_VERSION"), env!("NLGREEN_DESCRIBE"))
}
