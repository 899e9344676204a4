//! Experiment configuration: INI-style `key = value` text with optional
//! `[section]` headers. Sections only group keys; every key name is unique.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::{Ini, ParseOption};

use crate::error::{Error, Result};
use crate::fields::{FieldId, HarmonicNorm};
use crate::kernels::KernelFamily;
use crate::par::ExecMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HMode {
    /// Covering-grid mesh norm of the node set.
    Measured,
    /// `N^{-1/2}`.
    Proxy,
}

impl fmt::Display for HMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HMode::Measured => "measured",
            HMode::Proxy => "proxy",
        })
    }
}

impl FromStr for HMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "measured" => Ok(HMode::Measured),
            "proxy" => Ok(HMode::Proxy),
            _ => Err(Error::Config(format!("h_mode must be measured or proxy, got '{s}'"))),
        }
    }
}

/// Where node sets come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    /// Symmetric spherical t-design files `ssTTT.NNNNN`.
    Std,
    /// Maximum-determinant files `mdTTT.NNNNN`.
    Md,
    Fibonacci,
    Random,
}

impl PointKind {
    pub fn file_prefix(self) -> Option<&'static str> {
        match self {
            PointKind::Std => Some("ss"),
            PointKind::Md => Some("md"),
            _ => None,
        }
    }

    pub fn default_sizes(self) -> Vec<usize> {
        match self {
            PointKind::Md => vec![1600, 2500, 4900, 10000, 22500],
            _ => vec![1434, 2852, 5780, 12092, 24978],
        }
    }
}

impl fmt::Display for PointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointKind::Std => "std",
            PointKind::Md => "md",
            PointKind::Fibonacci => "fibonacci",
            PointKind::Random => "random",
        })
    }
}

impl FromStr for PointKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "std" => Ok(PointKind::Std),
            "md" => Ok(PointKind::Md),
            "fibonacci" => Ok(PointKind::Fibonacci),
            "random" => Ok(PointKind::Random),
            _ => Err(Error::Config(format!("unknown point kind '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Qi,
    Sbf,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Qi => "qi",
            Method::Sbf => "sbf",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qi" => Ok(Method::Qi),
            "sbf" => Ok(Method::Sbf),
            _ => Err(Error::Config(format!("unknown method '{s}' (expected qi or sbf)"))),
        }
    }
}

/// `ρ = c_m · h^p` constants for orders 2, 4, 6, 8.
pub fn default_rho_constants(family: KernelFamily) -> [f64; 4] {
    match family {
        KernelFamily::Gaussian | KernelFamily::Poisson => [0.4, 0.75, 1.0, 1.25],
        KernelFamily::WE31 | KernelFamily::WE32 => [1.6, 3.2, 4.3, 6.4],
    }
}

pub const DEFAULT_EVAL_GRID: usize = 52978;
pub const POINTS_DIR_ENV: &str = "SVQI_POINTS_DIR";

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub field: FieldId,
    pub harmonic_norm: HarmonicNorm,
    pub family: KernelFamily,
    pub orders: Vec<u32>,
    /// One constant per entry of `orders`; `None` takes the family defaults.
    pub rho_c: Option<Vec<f64>>,
    pub rho_p: f64,
    pub h_mode: HMode,
    /// Mesh-norm probes per node when `h_mode = measured`.
    pub mesh_probes: usize,
    pub points: PointKind,
    pub sizes: Vec<usize>,
    pub points_dir: Option<PathBuf>,
    /// Substitute Fibonacci nodes when a point file is missing.
    pub fallback: bool,
    pub eval_grid: usize,
    pub deltas: Vec<f64>,
    pub realizations: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    /// Node counts for the SBF baseline; `None` uses `sizes`.
    pub sbf_sizes: Option<Vec<usize>>,
    /// Kernel order for the SBF baseline; `None` uses the QI order.
    pub sbf_order: Option<u32>,
    pub repeats: usize,
    pub warmup: usize,
    pub target_error: f64,
    pub exec: ExecMode,
    pub cell_parallel: bool,
    pub record_time: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            field: FieldId::Field1,
            harmonic_norm: HarmonicNorm::Orthonormal,
            family: KernelFamily::Gaussian,
            orders: vec![2, 4, 6, 8],
            rho_c: None,
            rho_p: 0.5,
            h_mode: HMode::Proxy,
            mesh_probes: 10,
            points: PointKind::Std,
            sizes: PointKind::Std.default_sizes(),
            points_dir: None,
            fallback: false,
            eval_grid: DEFAULT_EVAL_GRID,
            deltas: vec![0.001, 0.01, 0.1, 0.5],
            realizations: 30,
            seed: 1,
            methods: vec![Method::Qi, Method::Sbf],
            sbf_sizes: None,
            sbf_order: None,
            repeats: 5,
            warmup: 1,
            target_error: 1e-3,
            exec: ExecMode::Parallel,
            cell_parallel: false,
            record_time: false,
        }
    }
}

/// Every recognized key, in the order they are documented.
pub const KEYS: &[&str] = &[
    "field",
    "harmonic_norm",
    "family",
    "orders",
    "rho_c",
    "rho_p",
    "h_mode",
    "mesh_probes",
    "points",
    "sizes",
    "points_dir",
    "fallback",
    "eval_grid",
    "deltas",
    "realizations",
    "seed",
    "methods",
    "sbf_sizes",
    "sbf_order",
    "repeats",
    "warmup",
    "target_error",
    "exec",
    "cell_parallel",
    "record_time",
];

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| parse(key, s)).collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected a boolean, got '{v}'"))),
    }
}

impl ExperimentConfig {
    /// Sets one key. Unknown keys are config errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "field" => self.field = v.parse()?,
            "harmonic_norm" => self.harmonic_norm = v.parse()?,
            "family" => self.family = v.parse()?,
            "orders" => self.orders = parse_list(key, v)?,
            "rho_c" => self.rho_c = Some(parse_list(key, v)?),
            "rho_p" => self.rho_p = parse(key, v)?,
            "h_mode" => self.h_mode = v.parse()?,
            "mesh_probes" => self.mesh_probes = parse(key, v)?,
            "points" => {
                let kind: PointKind = v.parse()?;
                if kind.default_sizes() != self.points.default_sizes() && self.sizes == self.points.default_sizes() {
                    self.sizes = kind.default_sizes();
                }
                self.points = kind;
            }
            "sizes" => self.sizes = parse_list(key, v)?,
            "points_dir" => self.points_dir = Some(PathBuf::from(v)),
            "fallback" => self.fallback = parse_bool(key, v)?,
            "eval_grid" => self.eval_grid = parse(key, v)?,
            "deltas" => self.deltas = parse_list(key, v)?,
            "realizations" => self.realizations = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            "methods" => self.methods = parse_list(key, v)?,
            "sbf_sizes" => self.sbf_sizes = Some(parse_list(key, v)?),
            "sbf_order" => self.sbf_order = Some(parse(key, v)?),
            "repeats" => self.repeats = parse(key, v)?,
            "warmup" => self.warmup = parse(key, v)?,
            "target_error" => self.target_error = parse(key, v)?,
            "exec" => self.exec = v.parse()?,
            "cell_parallel" => self.cell_parallel = parse_bool(key, v)?,
            "record_time" => self.record_time = parse_bool(key, v)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines. `#` and `;` start comments, also after
    /// whitespace at the end of a line.
    pub fn apply_text(&mut self, text: &str, origin: &Path) -> Result<()> {
        let opts = ParseOption { enabled_escape: false, ..Default::default() };
        let ini = Ini::load_from_str_opt(text, opts)
            .map_err(|e| Error::Config(format!("{}:{}: {}", origin.display(), e.line + 1, e.msg)))?;
        for (section, props) in ini.iter() {
            for (k, v) in props.iter() {
                self.set(k, v).map_err(|e| {
                    let at = section.map(|s| format!("[{s}] ")).unwrap_or_default();
                    let msg = match e {
                        Error::Config(m) => m,
                        other => other.to_string(),
                    };
                    Error::Config(format!("{}: {at}{msg}", origin.display()))
                })?;
            }
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(&text, path)?;
        Ok(cfg)
    }

    /// The ρ constant for `order`.
    pub fn rho_constant(&self, order: u32) -> Result<f64> {
        if let Some(cs) = &self.rho_c {
            let i = self.orders.iter().position(|&m| m == order).ok_or_else(|| Error::Config(format!("order {order} not configured")))?;
            return cs.get(i).copied().ok_or_else(|| Error::Config("rho_c needs one constant per order".into()));
        }
        let d = default_rho_constants(self.family);
        Ok(match order {
            1 | 2 => d[0],
            4 => d[1],
            6 => d[2],
            _ => d[3],
        })
    }

    pub fn rho_rule(&self, order: u32, h: f64) -> Result<f64> {
        Ok(self.rho_constant(order)? * h.powf(self.rho_p))
    }

    pub fn points_dir(&self) -> PathBuf {
        self.points_dir
            .clone()
            .or_else(|| std::env::var_os(POINTS_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("points"))
    }

    pub fn sbf_sizes(&self) -> &[usize] {
        self.sbf_sizes.as_deref().unwrap_or(&self.sizes)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.orders.is_empty() {
            return bad("orders must not be empty".into());
        }
        if let Some(cs) = &self.rho_c {
            if cs.len() != self.orders.len() {
                return bad(format!("rho_c has {} entries for {} orders", cs.len(), self.orders.len()));
            }
            if cs.iter().any(|c| !(*c > 0.0)) {
                return bad("rho_c entries must be positive".into());
            }
        }
        if !self.rho_p.is_finite() {
            return bad("rho_p must be finite".into());
        }
        if self.sizes.is_empty() || self.sizes.contains(&0) || self.sbf_sizes().contains(&0) {
            return bad("sizes must be positive".into());
        }
        if self.realizations == 0 {
            return bad("realizations must be at least 1".into());
        }
        if self.eval_grid == 0 || self.repeats == 0 || self.mesh_probes == 0 {
            return bad("eval_grid, repeats and mesh_probes must be positive".into());
        }
        if self.deltas.iter().any(|d| !(*d >= 0.0)) {
            return bad("noise levels must be non-negative".into());
        }
        if !(self.target_error > 0.0) {
            return bad("target_error must be positive".into());
        }
        Ok(())
    }

    /// One `key=value` per line; parses back to the same config.
    pub fn render(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
        let ulist = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut out = vec![
            format!("field={}", self.field),
            format!("harmonic_norm={}", self.harmonic_norm),
            format!("family={}", self.family),
            format!("orders={}", self.orders.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",")),
        ];
        if let Some(c) = &self.rho_c {
            out.push(format!("rho_c={}", list(c)));
        }
        out.extend([
            format!("rho_p={}", self.rho_p),
            format!("h_mode={}", self.h_mode),
            format!("mesh_probes={}", self.mesh_probes),
            format!("points={}", self.points),
            format!("sizes={}", ulist(&self.sizes)),
        ]);
        if let Some(d) = &self.points_dir {
            out.push(format!("points_dir={}", d.display()));
        }
        out.extend([
            format!("fallback={}", self.fallback),
            format!("eval_grid={}", self.eval_grid),
            format!("deltas={}", list(&self.deltas)),
            format!("realizations={}", self.realizations),
            format!("seed={}", self.seed),
            format!("methods={}", self.methods.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",")),
        ]);
        if let Some(s) = &self.sbf_sizes {
            out.push(format!("sbf_sizes={}", ulist(s)));
        }
        if let Some(o) = self.sbf_order {
            out.push(format!("sbf_order={o}"));
        }
        out.extend([
            format!("repeats={}", self.repeats),
            format!("warmup={}", self.warmup),
            format!("target_error={}", self.target_error),
            format!("exec={}", self.exec),
            format!("cell_parallel={}", self.cell_parallel),
            format!("record_time={}", self.record_time),
        ]);
        out.join("\n") + "\n"
    }
}
