//! Run configuration: flat `key=value` text, one entry per line, `#` comments.
//! List-valued keys may be repeated (`alpha=1` then `alpha=2`) or given as
//! comma lists. Command-line flags go through the same setters.

use std::path::PathBuf;

use hypercat_core::kerr::GridSpec;
use hypercat_core::states::Preset;
use hypercat_core::{Complex64, ModelParams};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{}{field}: {msg}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub msg: String,
}

fn err(field: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError { line: None, field: field.into(), msg: msg.into() }
}

/// `min:max:steps`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XGrid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl XGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.steps <= 1 {
            return vec![self.min];
        }
        (0..self.steps).map(|i| self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub preset: Option<(String, Option<f64>)>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub k: Vec<usize>,
    pub j: Option<usize>,
    pub z: Option<Complex64>,
    pub x_grid: Option<XGrid>,
    pub dim: Option<usize>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub max_terms: Option<usize>,
    pub window: Option<[f64; 4]>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub kappa: Option<u32>,
}

fn float(field: &str, s: &str) -> Result<f64, ConfigError> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(err(field, format!("expected a finite number, got {s:?}"))),
    }
}

fn uint(field: &str, s: &str) -> Result<usize, ConfigError> {
    s.trim().parse().map_err(|_| err(field, format!("expected a nonnegative integer, got {s:?}")))
}

fn floats(field: &str, s: &str) -> Result<Vec<f64>, ConfigError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|t| float(field, t)).collect()
}

fn positive(field: &str, v: usize) -> Result<usize, ConfigError> {
    if v == 0 {
        Err(err(field, "must be at least 1"))
    } else {
        Ok(v)
    }
}

/// `name` or `name:s=value`.
pub fn parse_preset(s: &str) -> Result<(String, Option<f64>), ConfigError> {
    match s.split_once(':') {
        None => Ok((s.trim().to_string(), None)),
        Some((name, rest)) => {
            let v = rest.trim().strip_prefix("s=").ok_or_else(|| err("preset", "expected name:s=value"))?;
            Ok((name.trim().to_string(), Some(float("preset", v)?)))
        }
    }
}

/// `re` or `re,im`.
pub fn parse_z(s: &str) -> Result<Complex64, ConfigError> {
    let v = floats("z", s)?;
    match v[..] {
        [re] => Ok(Complex64::new(re, 0.0)),
        [re, im] => Ok(Complex64::new(re, im)),
        _ => Err(err("z", "expected re or re,im")),
    }
}

pub fn parse_x_grid(s: &str) -> Result<XGrid, ConfigError> {
    let f: Vec<&str> = s.split(':').collect();
    let [a, b, n] = f[..] else {
        return Err(err("x-grid", "expected min:max:steps"));
    };
    let g = XGrid { min: float("x-grid", a)?, max: float("x-grid", b)?, steps: uint("x-grid", n)? };
    if g.steps == 0 || g.min > g.max || g.min < 0.0 {
        return Err(err("x-grid", "need 0 ≤ min ≤ max and steps ≥ 1"));
    }
    Ok(g)
}

impl RunConfig {
    /// Applies one `key=value` entry; list keys accumulate.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "preset" => self.preset = Some(parse_preset(v)?),
            "alpha" => self.alpha.extend(floats(key, v)?),
            "beta" => self.beta.extend(floats(key, v)?),
            "k" => {
                for t in v.split(',') {
                    self.k.push(positive(key, uint(key, t)?)?);
                }
            }
            "j" => self.j = Some(uint(key, v)?),
            "z" => self.z = Some(parse_z(v)?),
            "x-grid" | "x_grid" => self.x_grid = Some(parse_x_grid(v)?),
            "dim" => self.dim = Some(positive(key, uint(key, v)?)?),
            "out" => self.out = Some(PathBuf::from(v)),
            "tol" => {
                let t = float(key, v)?;
                if !(t > 0.0 && t < 1.0) {
                    return Err(err(key, "must lie in (0, 1)"));
                }
                self.tol = Some(t);
            }
            "max-terms" | "max_terms" => self.max_terms = Some(positive(key, uint(key, v)?)?),
            "window" => {
                let f = v.split(':').map(|t| float(key, t)).collect::<Result<Vec<_>, _>>()?;
                let [a, b, c, d] = f[..] else {
                    return Err(err(key, "expected xmin:xmax:ymin:ymax"));
                };
                if !(a < b && c < d) {
                    return Err(err(key, "empty window"));
                }
                self.window = Some([a, b, c, d]);
            }
            "nx" => self.nx = Some(positive(key, uint(key, v)?)?),
            "ny" => self.ny = Some(positive(key, uint(key, v)?)?),
            "kappa" => {
                let k = positive(key, uint(key, v)?)?;
                self.kappa = Some(u32::try_from(k).map_err(|_| err(key, "too large"))?);
            }
            _ => return Err(err(key, "unknown key")),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError { line: Some(i + 1), field: line.into(), msg: "expected key=value".into() });
            };
            cfg.set(k.trim(), v).map_err(|e| ConfigError { line: Some(i + 1), ..e })?;
        }
        Ok(cfg)
    }

    /// Family name and parameters; canonical when nothing was given.
    pub fn family(&self) -> Result<(String, ModelParams), FamilyError> {
        match (&self.preset, self.alpha.is_empty() && self.beta.is_empty()) {
            (Some(_), false) => Err(FamilyError::Config(err("preset", "give either a preset or alpha/beta lists"))),
            (Some((name, spin)), true) => {
                let p = Preset::lookup(name, *spin).map_err(|e| match e {
                    hypercat_core::Error::Precondition(m) => FamilyError::Config(err("preset", format!("{m}: {name}"))),
                    e => FamilyError::Domain(e),
                })?;
                let label = match spin {
                    Some(s) => format!("{name}:s={s}"),
                    None => name.clone(),
                };
                Ok((label, p.params))
            }
            (None, true) => Ok(("canonical".into(), ModelParams::canonical())),
            (None, false) => {
                let p = ModelParams::new(&self.alpha, &self.beta).map_err(FamilyError::Domain)?;
                Ok((explicit_label(&p), p))
            }
        }
    }

    pub fn single_k(&self) -> Result<Option<usize>, ConfigError> {
        match self.k[..] {
            [] => Ok(None),
            [k] => Ok(Some(k)),
            _ => Err(err("k", "a single value is expected here")),
        }
    }

    pub fn grid_spec(&self) -> GridSpec {
        let mut g = GridSpec::default_window();
        if let Some([a, b, c, d]) = self.window {
            (g.x_min, g.x_max, g.y_min, g.y_max) = (a, b, c, d);
        }
        g.nx = self.nx.unwrap_or(g.nx);
        g.ny = self.ny.unwrap_or(g.ny);
        g
    }
}

fn explicit_label(p: &ModelParams) -> String {
    let j = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    format!("{}F{}[{};{}]", p.p(), p.q(), j(p.alpha()), j(p.beta()))
}

#[derive(Debug, thiserror::Error)]
pub enum FamilyError {
    #[error(transparent)]
    Config(ConfigError),
    #[error(transparent)]
    Domain(hypercat_core::Error),
}
