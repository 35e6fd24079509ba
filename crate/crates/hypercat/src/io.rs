//! CSV formats. Every float is written with 17 significant digits so that
//! files round-trip and compare byte for byte between runs.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use hypercat_core::identity::IdentityRow;
use hypercat_core::kerr::{GridSpec, HusimiGrid};
use hypercat_core::stats::StatReport;
use hypercat_core::{Complex64, FockVector, ModelParams, PhaseRule};

pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| fmt(*x)).collect::<Vec<_>>().join(",")
}

pub fn phase_name(p: PhaseRule) -> &'static str {
    match p {
        PhaseRule::One => "one",
        PhaseRule::IPow => "i^n",
        PhaseRule::SignPow => "(-1)^n",
    }
}

/// `# key=value` lines describing a family.
pub fn params_header(params: &ModelParams) -> Vec<(String, String)> {
    vec![
        ("p".into(), params.p().to_string()),
        ("q".into(), params.q().to_string()),
        ("alpha".into(), list(params.alpha())),
        ("beta".into(), list(params.beta())),
        ("phase".into(), phase_name(params.phase()).into()),
    ]
}

pub fn complex(z: Complex64) -> String {
    format!("{},{}", fmt(z.re), fmt(z.im))
}

fn write_meta<W: Write + ?Sized>(w: &mut W, meta: &[(String, String)]) -> io::Result<()> {
    for (k, v) in meta {
        writeln!(w, "# {k}={v}")?;
    }
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
}

fn bad(line: usize, msg: impl Into<String>) -> ReadError {
    ReadError::Format { line, msg: msg.into() }
}

type Meta = Vec<(String, String)>;

/// Header metadata plus the numbered data lines of a file.
fn split(r: impl BufRead) -> Result<(Meta, Vec<(usize, String)>), ReadError> {
    let mut meta = Vec::new();
    let mut data = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if let Some(m) = line.strip_prefix('#') {
            let m = m.trim();
            match m.split_once('=') {
                Some((k, v)) => meta.push((k.trim().to_string(), v.trim().to_string())),
                None => meta.push((m.to_string(), String::new())),
            }
        } else if !line.trim().is_empty() {
            data.push((i + 1, line));
        }
    }
    Ok((meta, data))
}

fn num(line: usize, s: &str) -> Result<f64, ReadError> {
    s.trim().parse().map_err(|_| bad(line, format!("not a number: {s:?}")))
}

/// A Fock vector with its header.
#[derive(Debug, Clone, PartialEq)]
pub struct FockCsv {
    pub meta: Vec<(String, String)>,
    pub vector: FockVector,
}

impl FockCsv {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub const FOCK_COLUMNS: &str = "n,re_amp,im_amp";

pub fn write_fock<W: Write + ?Sized>(w: &mut W, meta: &[(String, String)], v: &FockVector) -> io::Result<()> {
    write_meta(w, meta)?;
    writeln!(w, "{FOCK_COLUMNS}")?;
    for (n, a) in v.amplitudes().iter().enumerate() {
        writeln!(w, "{n},{},{}", fmt(a.re), fmt(a.im))?;
    }
    Ok(())
}

pub fn read_fock(r: impl BufRead) -> Result<FockCsv, ReadError> {
    let (meta, data) = split(r)?;
    let mut amp = Vec::new();
    let mut rows = data.into_iter();
    match rows.next() {
        Some((_, h)) if h.trim() == FOCK_COLUMNS => {}
        Some((line, h)) => return Err(bad(line, format!("expected header {FOCK_COLUMNS:?}, found {h:?}"))),
        None => return Err(bad(0, "empty file")),
    }
    for (line, row) in rows {
        let f: Vec<&str> = row.split(',').collect();
        if f.len() != 3 {
            return Err(bad(line, "expected 3 fields"));
        }
        let n: usize = f[0].trim().parse().map_err(|_| bad(line, "bad index"))?;
        if n != amp.len() {
            return Err(bad(line, format!("index {n} out of sequence")));
        }
        amp.push(Complex64::new(num(line, f[1])?, num(line, f[2])?));
    }
    let vector = FockVector::new(amp).map_err(|e| bad(0, e.to_string()))?;
    Ok(FockCsv { meta, vector })
}

/// One line of a statistics sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct StatRow {
    pub family: String,
    pub k: usize,
    pub j: usize,
    pub x: f64,
    pub report: StatReport,
}

pub const STAT_COLUMNS: &str = "family,k,j,x,mean,std,Q,F,class";

pub fn write_stats<W: Write + ?Sized>(w: &mut W, meta: &[(String, String)], rows: &[StatRow]) -> io::Result<()> {
    write_meta(w, meta)?;
    writeln!(w, "{STAT_COLUMNS}")?;
    for r in rows {
        let s = &r.report;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.family,
            r.k,
            r.j,
            fmt(r.x),
            fmt(s.mean_n),
            fmt(s.std_n),
            fmt(s.mandel_q),
            fmt(s.fano),
            s.classification.as_str()
        )?;
    }
    Ok(())
}

pub fn grid_header(spec: &GridSpec) -> Vec<(String, String)> {
    vec![
        ("window".into(), format!("{},{},{},{}", fmt(spec.x_min), fmt(spec.x_max), fmt(spec.y_min), fmt(spec.y_max))),
        ("nx".into(), spec.nx.to_string()),
        ("ny".into(), spec.ny.to_string()),
    ]
}

/// Header (window, nx, ny and the caller's extra keys), then `ny` rows of `nx`
/// values with `y` increasing; out-of-domain cells are empty fields.
pub fn write_husimi<W: Write + ?Sized>(w: &mut W, extra: &[(String, String)], grid: &HusimiGrid) -> io::Result<()> {
    write_meta(w, &grid_header(&grid.spec))?;
    write_meta(w, extra)?;
    if let Some(s) = grid.spot_check {
        writeln!(w, "# spot_check={}", fmt(s))?;
    }
    let mut line = String::new();
    for iy in 0..grid.spec.ny {
        line.clear();
        for ix in 0..grid.spec.nx {
            if ix > 0 {
                line.push(',');
            }
            if let Some(v) = grid.get(ix, iy) {
                let _ = write!(line, "{}", fmt(v));
            }
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_husimi(r: impl BufRead) -> Result<(Vec<(String, String)>, HusimiGrid), ReadError> {
    let (meta, data) = split(r)?;
    let get = |k: &str| meta.iter().find(|(a, _)| a == k).map(|(_, v)| v.clone()).ok_or_else(|| bad(0, format!("missing {k}")));
    let win: Vec<f64> = get("window")?.split(',').map(|s| num(0, s)).collect::<Result<_, _>>()?;
    if win.len() != 4 {
        return Err(bad(0, "window needs 4 numbers"));
    }
    let nx: usize = get("nx")?.parse().map_err(|_| bad(0, "bad nx"))?;
    let ny: usize = get("ny")?.parse().map_err(|_| bad(0, "bad ny"))?;
    let spec = GridSpec { x_min: win[0], x_max: win[1], y_min: win[2], y_max: win[3], nx, ny };
    if data.len() != ny {
        return Err(bad(0, format!("expected {ny} rows, found {}", data.len())));
    }
    let mut values = Vec::with_capacity(nx * ny);
    for (line, row) in &data {
        let f: Vec<&str> = row.split(',').collect();
        if f.len() != nx {
            return Err(bad(*line, format!("expected {nx} fields")));
        }
        for s in f {
            values.push(if s.trim().is_empty() { None } else { Some(num(*line, s)?) });
        }
    }
    let spot_check = meta.iter().find(|(k, _)| k == "spot_check").map(|(_, v)| num(0, v)).transpose()?;
    Ok((meta, HusimiGrid { spec, values, spot_check }))
}

pub const IDENTITY_COLUMNS: &str = "family,n,residual,status";

pub fn write_identity<W: Write + ?Sized>(w: &mut W, rows: &[IdentityRow]) -> io::Result<()> {
    writeln!(w, "{IDENTITY_COLUMNS}")?;
    for r in rows {
        let n = r.n.map(|n| n.to_string()).unwrap_or_default();
        let res = r.residual.map(fmt).unwrap_or_default();
        writeln!(w, "{},{n},{res},{}", r.family, r.status.as_str())?;
    }
    Ok(())
}
