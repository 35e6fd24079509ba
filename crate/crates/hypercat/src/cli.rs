//! Command-line front end. Exit codes: 0 ok, 1 usage, 2 domain error,
//! 3 verification failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hypercat_core::hyperfunc::{self, kitten_norm, norm_series};
use hypercat_core::identity;
use hypercat_core::kerr::{self, component_layout, KerrParams};
use hypercat_core::kittens::{kitten_fock, KittenSpec};
use hypercat_core::states::{hcs, CoherentLabel};
use hypercat_core::stats::{self, mandel, mandel_nf, photon_pdf};
use hypercat_core::{Complex64, ModelParams};

use crate::config::{ConfigError, FamilyError, RunConfig};
use crate::figures::{self, FigureError};
use crate::io::{self as csv, fmt, StatRow};
use crate::{par, verify};

pub const ENV_MAX_TERMS: &str = "HYPERCAT_MAX_TERMS";

/// Flags shared by every subcommand; values are parsed by [`RunConfig::set`].
#[derive(Args, Debug, Default, Clone)]
pub struct Common {
    /// key=value file read before the flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Preset family, `name` or `name:s=value`
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Upper parameters, comma separated
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Lower parameters, comma separated
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Number of components (kittens, stats) or revival fraction τ/k (kerr, husimi)
    #[arg(long, global = true)]
    pub k: Option<String>,
    /// Sector index
    #[arg(long, global = true)]
    pub j: Option<String>,
    /// Label `re` or `re,im`
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Grid of x = |z|², `min:max:steps`
    #[arg(long = "x-grid", global = true)]
    pub x_grid: Option<String>,
    /// Fock dimension (default: automatic)
    #[arg(long, global = true)]
    pub dim: Option<String>,
    /// Output file (directory for `figures`); stdout when absent
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Series stopping tolerance
    #[arg(long, global = true)]
    pub tol: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Coherent state amplitudes
    State,
    /// k-hypercat amplitudes
    Kitten,
    /// Mean, deviation and Mandel parameter over an x grid
    Stats {
        /// Emit photon probabilities for these photon numbers instead
        #[arg(long, value_delimiter = ',')]
        pdf: Vec<usize>,
    },
    /// Mandel parameter over an x grid
    Mandel {
        /// Use the deformed number operator a_f† a_f
        #[arg(long)]
        nf: bool,
    },
    /// Critical displacement z_c for each k
    Critical,
    /// Kerr evolution to t = τ/k
    Kerr {
        #[arg(long)]
        kappa: Option<String>,
    },
    /// Husimi function of the Kerr state at t = τ/k
    Husimi {
        /// xmin:xmax:ymin:ymax
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[arg(long)]
        nx: Option<String>,
        #[arg(long)]
        ny: Option<String>,
    },
    /// Data files for a figure id, or `all`
    Figures { id: String },
    /// Run a verification suite
    Verify {
        suite: String,
        /// Also write the moment-problem report (family,n,residual,status) here
        #[arg(long)]
        identity_csv: Option<PathBuf>,
    },
}

#[derive(Parser, Debug)]
#[command(name = "hypercat", version, about = "Hypergeometric coherent states, k-hypercats and Kerr revivals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] hypercat_core::Error),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0} verification check(s) failed")]
    Verification(usize),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::Config(c) => c.into(),
            FamilyError::Domain(d) => CliError::Domain(d),
        }
    }
}

impl From<FigureError> for CliError {
    fn from(e: FigureError) -> Self {
        match e {
            FigureError::Unknown(_) => CliError::Usage(e.to_string()),
            FigureError::Domain(d) => CliError::Domain(d),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn build_config(common: &Common, extra: &[(&str, &Option<String>)]) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::parse(&fs::read_to_string(p)?)?,
        None => RunConfig::default(),
    };
    if common.preset.is_some() && (common.alpha.is_some() || common.beta.is_some()) {
        return Err(CliError::Usage("give either --preset or --alpha/--beta".into()));
    }
    // flags replace config-file values instead of extending them
    let flags = [
        ("preset", &common.preset),
        ("alpha", &common.alpha),
        ("beta", &common.beta),
        ("k", &common.k),
        ("j", &common.j),
        ("z", &common.z),
        ("x-grid", &common.x_grid),
        ("dim", &common.dim),
        ("out", &common.out),
        ("tol", &common.tol),
    ];
    for (key, value) in flags.iter().chain(extra) {
        if let Some(v) = value {
            match *key {
                "alpha" => cfg.alpha.clear(),
                "beta" => cfg.beta.clear(),
                "k" => cfg.k.clear(),
                "preset" => {
                    cfg.alpha.clear();
                    cfg.beta.clear();
                }
                _ => {}
            }
            if matches!(*key, "alpha" | "beta") {
                cfg.preset = None;
            }
            cfg.set(key, v)?;
        }
    }
    if let Ok(v) = std::env::var(ENV_MAX_TERMS) {
        cfg.set("max-terms", &v).map_err(|e| CliError::Usage(format!("{ENV_MAX_TERMS}: {}", e.msg)))?;
    }
    if let Some(t) = cfg.tol {
        hyperfunc::set_tolerance(t);
    }
    if let Some(n) = cfg.max_terms {
        hyperfunc::set_max_terms(n);
    }
    Ok(cfg)
}

fn output(cfg: &RunConfig, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match &cfg.out {
        Some(p) => {
            let mut w = io::BufWriter::new(fs::File::create(p)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required")))
}

fn family_meta(name: &str, params: &ModelParams) -> Vec<(String, String)> {
    let mut m = vec![("family".to_string(), name.to_string())];
    m.extend(csv::params_header(params));
    m
}

fn cmd_state(cfg: &RunConfig) -> Result<()> {
    let (name, params) = cfg.family()?;
    let z = need(cfg.z, "z")?;
    let label = CoherentLabel::new(z, params.clone());
    let v = hcs(&label, cfg.dim)?;
    let mut meta = family_meta(&name, &params);
    meta.push(("z".into(), csv::complex(z)));
    meta.push(("norm".into(), fmt(norm_series(&params, label.x())?)));
    output(cfg, |w| csv::write_fock(w, &meta, &v))
}

fn cmd_kitten(cfg: &RunConfig) -> Result<()> {
    let (name, params) = cfg.family()?;
    let z = need(cfg.z, "z")?;
    let k = need(cfg.single_k()?, "k")?;
    let j = need(cfg.j, "j")?;
    let spec = KittenSpec::new(k, j, z, params.clone());
    let v = kitten_fock(&spec, cfg.dim)?;
    let mut meta = family_meta(&name, &params);
    meta.push(("z".into(), csv::complex(z)));
    meta.push(("k".into(), k.to_string()));
    meta.push(("j".into(), j.to_string()));
    meta.push(("norm".into(), fmt(kitten_norm(&params, k, j, spec.x())?)));
    output(cfg, |w| csv::write_fock(w, &meta, &v))
}

fn xs(cfg: &RunConfig) -> Result<Vec<f64>> {
    Ok(need(cfg.x_grid, "x-grid")?.points())
}

/// `--j` when given, otherwise every sector.
fn sectors(cfg: &RunConfig, k: usize) -> Vec<usize> {
    match cfg.j {
        Some(j) => vec![j],
        None => (0..k).collect(),
    }
}

fn cmd_stats(cfg: &RunConfig, pdf: &[usize], nf: bool) -> Result<()> {
    let (name, params) = cfg.family()?;
    let k = cfg.single_k()?.unwrap_or(1);
    let xs = xs(cfg)?;
    let meta = family_meta(&name, &params);
    if !pdf.is_empty() {
        let mut rows = Vec::new();
        for &x in &xs {
            for &m in pdf {
                let spec = KittenSpec::new(k, m % k, Complex64::new(x.sqrt(), 0.0), params.clone());
                rows.push((x, m, photon_pdf(&spec, m)?));
            }
        }
        return output(cfg, |w| {
            for (k, v) in &meta {
                writeln!(w, "# {k}={v}")?;
            }
            writeln!(w, "# k={k}")?;
            writeln!(w, "x,m,probability")?;
            for (x, m, p) in &rows {
                writeln!(w, "{},{m},{}", fmt(*x), fmt(*p))?;
            }
            Ok(())
        });
    }
    let mut rows = Vec::new();
    for j in sectors(cfg, k) {
        for &x in &xs {
            let report = if nf { mandel_nf(&params, k, j, x)? } else { mandel(&params, k, j, x)? };
            rows.push(StatRow { family: name.clone(), k, j, x, report });
        }
    }
    let mut meta = meta;
    meta.push(("operator".into(), if nf { "n_f" } else { "n" }.into()));
    output(cfg, |w| csv::write_stats(w, &meta, &rows))
}

fn cmd_critical(cfg: &RunConfig) -> Result<()> {
    let (name, params) = cfg.family()?;
    let ks = if cfg.k.is_empty() { vec![2, 3, 4, 5, 6, 7, 8] } else { cfg.k.clone() };
    let mut rows = Vec::new();
    for k in ks {
        let z = stats::critical_z(&params, k)?;
        rows.push((k, z));
    }
    let meta = family_meta(&name, &params);
    output(cfg, |w| {
        for (k, v) in &meta {
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "k,zc,zc2")?;
        for (k, z) in &rows {
            writeln!(w, "{k},{},{}", fmt(*z), fmt(z * z))?;
        }
        Ok(())
    })
}

fn cmd_kerr(cfg: &RunConfig) -> Result<()> {
    let (name, params) = cfg.family()?;
    let z = need(cfg.z, "z")?;
    let k = need(cfg.single_k()?, "k")?;
    let kappa = cfg.kappa.unwrap_or(2);
    let label = CoherentLabel::new(z, params.clone());
    let kp = KerrParams::fraction(1, k as u64, kappa)?;
    let v = kerr::kerr_evolve(&label, &kp, cfg.dim)?;
    let mut meta = family_meta(&name, &params);
    meta.push(("z0".into(), csv::complex(z)));
    meta.push(("t_k".into(), format!("1/{k}")));
    meta.push(("kappa".into(), kappa.to_string()));
    if kappa == 2 {
        let lay = component_layout(k);
        meta.push(("components".into(), lay.m.to_string()));
        meta.push(("rotation_offset".into(), fmt(lay.rotation_offset)));
        let a = kerr::reconstruct_from_kittens(&label, k, v.dim())?;
        let b = kerr::reconstruct_from_circle(&label, k, v.dim())?;
        meta.push(("kitten_residual".into(), fmt(v.distance(&a))));
        meta.push(("circle_residual".into(), fmt(v.distance(&b))));
        for (j, c) in kerr::kitten_decomposition(&label, k)?.into_iter().enumerate() {
            meta.push((format!("kitten_coeff[{j}]"), csv::complex(c)));
        }
        for (l, w) in kerr::circle_superposition_form(&label, k)?.into_iter().enumerate() {
            meta.push((format!("circle_weight[{l}]"), csv::complex(w)));
        }
    }
    output(cfg, |w| csv::write_fock(w, &meta, &v))
}

fn cmd_husimi(cfg: &RunConfig) -> Result<()> {
    let (name, params) = cfg.family()?;
    let z = need(cfg.z, "z")?;
    let k = cfg.single_k()?.unwrap_or(1);
    let label = CoherentLabel::new(z, params.clone());
    let spec = cfg.grid_spec();
    let grid = par::husimi_kerr(&label, k, &spec)?;
    let mut meta = family_meta(&name, &params);
    meta.push(("z0".into(), csv::complex(z)));
    meta.push(("t_k".into(), format!("1/{k}")));
    output(cfg, |w| csv::write_husimi(w, &meta, &grid))
}

fn cmd_figures(cfg: &RunConfig, id: &str) -> Result<()> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let ids: Vec<&str> = if id == "all" { figures::FIGURE_IDS.to_vec() } else { vec![id] };
    let only_k = cfg.single_k()?;
    for id in ids {
        for f in figures::figure(id, only_k)? {
            let path = dir.join(&f.name);
            fs::write(&path, f.contents)?;
            writeln!(io::stdout(), "{}", path.display())?;
        }
    }
    Ok(())
}

fn cmd_verify(cfg: &RunConfig, suite: &str) -> Result<()> {
    let checks = verify::run_suite(suite)
        .ok_or_else(|| CliError::Usage(format!("unknown suite {suite:?}; expected one of {} or all", verify::SUITES.join(", "))))?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    output(cfg, |w| {
        writeln!(w, "{:<9} {:<52} {:>12} {:>10}  status", "suite", "check", "measured", "threshold")?;
        for c in &checks {
            writeln!(w, "{c}")?;
        }
        writeln!(w, "{} checks, {} failed", checks.len(), failed)
    })?;
    if failed > 0 {
        Err(CliError::Verification(failed))
    } else {
        Ok(())
    }
}

fn dispatch(command: &Command, common: &Common) -> Result<()> {
    match command {
        Command::State => cmd_state(&build_config(common, &[])?),
        Command::Kitten => cmd_kitten(&build_config(common, &[])?),
        Command::Stats { pdf } => cmd_stats(&build_config(common, &[])?, pdf, false),
        Command::Mandel { nf } => cmd_stats(&build_config(common, &[])?, &[], *nf),
        Command::Critical => cmd_critical(&build_config(common, &[])?),
        Command::Kerr { kappa } => cmd_kerr(&build_config(common, &[("kappa", kappa)])?),
        Command::Husimi { window, nx, ny } => cmd_husimi(&build_config(common, &[("window", window), ("nx", nx), ("ny", ny)])?),
        Command::Figures { id } => cmd_figures(&build_config(common, &[])?, id),
        Command::Verify { suite, identity_csv } => {
            if let Some(p) = identity_csv {
                let rows = identity::identity_report(identity::DEFAULT_MAX_N);
                let mut w = io::BufWriter::new(fs::File::create(p)?);
                csv::write_identity(&mut w, &rows)?;
                w.flush()?;
            }
            cmd_verify(&build_config(common, &[])?, suite)
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let full = match Cli::try_parse_from(args) {
        Ok(f) => f,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&full.command, &full.common) {
        Ok(()) => ExitCode::SUCCESS,
        // a reader that hung up early (`| head`) is not a failure
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

/// Reads a Fock CSV written by `state`, `kitten` or `kerr`.
pub fn load_fock(path: &Path) -> std::result::Result<csv::FockCsv, csv::ReadError> {
    csv::read_fock(io::BufReader::new(fs::File::open(path)?))
}
