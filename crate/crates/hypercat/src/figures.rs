//! Data behind each figure: curves as `curve,x,value` tables, Husimi panels
//! as grids. Parameters and gridline markers travel in `#` header lines.

use std::fmt::Write as _;

use hypercat_core::kerr::{component_layout, max_distinguishable, predicted_centers, width_sigma, GridSpec, HusimiGrid};
use hypercat_core::kittens::KittenSpec;
use hypercat_core::states::{CoherentLabel, Preset};
use hypercat_core::stats::{critical_z, mandel, mean_n, photon_pdf, std_n};
use hypercat_core::{Complex64, Error, ModelParams, Result};

use crate::io::{self, fmt};
use crate::par;

pub const FIGURE_IDS: &[&str] =
    &["fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig3a", "fig3b", "fig4", "fig5a", "fig5b", "fig5c", "fig6a", "fig6b", "fig6c"];

/// Rows of the Husimi figure: super-, plain and sub-Poissonian confluent families.
pub const FIG6_ROWS: [(&str, f64, f64); 3] = [("fig6a", 1.0, 3.0), ("fig6b", 1.0, 1.0), ("fig6c", 3.0, 1.0)];
/// Columns, left to right; `k = 1` is the full revival.
pub const FIG6_K: [usize; 8] = [1, 15, 8, 6, 5, 4, 3, 2];
pub const FIG6_Z0: f64 = 2.0;
/// Local maxima below this fraction of the global maximum are ignored.
pub const PEAK_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct FigureFile {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, thiserror::Error)]
pub enum FigureError {
    #[error("unknown figure id {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Domain(#[from] Error),
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

struct Table {
    meta: Vec<(String, String)>,
    rows: Vec<(String, f64, f64)>,
}

impl Table {
    fn new(title: &str, family: &str, params: &ModelParams) -> Self {
        let mut meta = vec![("figure".into(), title.into()), ("family".into(), family.into())];
        meta.extend(io::params_header(params));
        Table { meta, rows: Vec::new() }
    }

    fn meta(&mut self, k: &str, v: impl ToString) {
        self.meta.push((k.into(), v.to_string()));
    }

    fn marker(&mut self, name: &str, source: &str, x: f64) {
        self.meta.push(("marker".into(), format!("{name},{source},{}", fmt(x))));
    }

    fn curve(&mut self, label: &str, xs: &[f64], mut f: impl FnMut(f64) -> Result<f64>) -> Result<()> {
        for &x in xs {
            self.rows.push((label.into(), x, f(x)?));
        }
        Ok(())
    }

    /// Position of the largest value of one curve.
    fn argmax(&self, label: &str) -> f64 {
        let mut best = (f64::NAN, f64::NEG_INFINITY);
        for (l, x, v) in &self.rows {
            if l == label && *v > best.1 {
                best = (*x, *v);
            }
        }
        best.0
    }

    fn render(&self, name: &str) -> FigureFile {
        let mut s = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k}={v}");
        }
        s.push_str("curve,x,value\n");
        for (l, x, v) in &self.rows {
            let _ = writeln!(s, "{l},{},{}", fmt(*x), fmt(*v));
        }
        FigureFile { name: format!("{name}.csv"), contents: s }
    }
}

fn pdf(params: &ModelParams, k: usize, m: usize, x: f64) -> Result<f64> {
    photon_pdf(&KittenSpec::new(k, m % k, Complex64::new(x.sqrt(), 0.0), params.clone()), m)
}

const K: usize = 5;

fn zc_markers(t: &mut Table, params: &ModelParams, reference: f64) -> Result<()> {
    t.marker("zc2", "reference", reference);
    let zc = critical_z(params, K)?;
    t.marker("zc2", "computed", zc * zc);
    Ok(())
}

fn fig1_top(id: &str, preset: Preset, xs: &[f64], reference_zc2: f64) -> Result<FigureFile> {
    let p = &preset.params;
    let mut t = Table::new("photon probability P(j; x) of the k-hypercats, m = j", &preset.name, p);
    t.meta("k", K);
    for j in 0..K {
        t.curve(&format!("j={j}"), xs, |x| pdf(p, K, j, x))?;
    }
    zc_markers(&mut t, p, reference_zc2)?;
    Ok(t.render(id))
}

fn fig1_bottom(id: &str, preset: Preset, xs: &[f64], reference: impl Fn(usize) -> f64) -> Result<FigureFile> {
    let p = &preset.params;
    let mut t = Table::new("photon probability P(m; x) for m = nu k", &preset.name, p);
    t.meta("k", K);
    for nu in 1..=5 {
        let m = nu * K;
        t.curve(&format!("nu={nu}"), xs, |x| pdf(p, K, m, x))?;
    }
    for nu in 1..=5 {
        t.marker(&format!("xmax(nu={nu})"), "reference", reference(nu * K));
        let am = t.argmax(&format!("nu={nu}"));
        t.marker(&format!("xmax(nu={nu})"), "grid-argmax", am);
    }
    Ok(t.render(id))
}

fn fig_moments(
    id: &str,
    title: &str,
    preset: Preset,
    xs: &[f64],
    zc2: Option<f64>,
    f: fn(&ModelParams, usize, usize, f64) -> Result<f64>,
) -> Result<FigureFile> {
    let p = &preset.params;
    let mut t = Table::new(title, &preset.name, p);
    t.meta("k", K);
    for j in 0..K {
        t.curve(&format!("j={j}"), xs, |x| f(p, K, j, x))?;
    }
    t.curve("k=1", xs, |x| f(p, 1, 0, x))?;
    if let Some(c) = zc2 {
        zc_markers(&mut t, p, c)?;
    }
    Ok(t.render(id))
}

fn fig_mandel(id: &str, alpha: f64, beta: f64) -> Result<FigureFile> {
    let p = Preset::confluent(alpha, beta)?.params;
    let mut t = Table::new("Mandel parameter of confluent k-hypercats", "confluent", &p);
    t.meta("k", K);
    let xs = grid(0.0, 10.0, 201);
    for j in 0..K {
        t.curve(&format!("j={j}"), &xs, |x| Ok(mandel(&p, K, j, x)?.mandel_q))?;
    }
    Ok(t.render(id))
}

fn fig4() -> Result<FigureFile> {
    let can = ModelParams::canonical();
    let mut t = Table::new("Mandel parameter of confluent coherent states", "confluent", &can);
    t.meta.retain(|(k, _)| k == "figure" || k == "family");
    let xs = grid(0.0, 10.0, 201);
    for (a, b) in [(1.0, 2.0), (1.0, 4.0), (2.0, 1.0), (4.0, 1.0)] {
        let p = Preset::confluent(a, b)?.params;
        t.curve(&format!("alpha={a};beta={b}"), &xs, |x| Ok(mandel(&p, 1, 0, x)?.mandel_q))?;
    }
    Ok(t.render("fig4"))
}

/// One Husimi panel of the Kerr-evolved confluent state.
#[derive(Debug, Clone)]
pub struct Panel {
    pub alpha: f64,
    pub beta: f64,
    pub k: usize,
    pub sigma: f64,
    /// Components predicted by the circle decomposition.
    pub m: usize,
    /// `floor(2πr/3σ)`.
    pub m_max: usize,
    pub grid: HusimiGrid,
}

impl Panel {
    pub fn distinguishable(&self) -> bool {
        self.m <= self.m_max
    }

    pub fn label(&self) -> CoherentLabel {
        CoherentLabel::new(Complex64::new(FIG6_Z0, 0.0), Preset::confluent(self.alpha, self.beta).expect("valid").params)
    }
}

pub fn fig6_panel(alpha: f64, beta: f64, k: usize, spec: &GridSpec) -> Result<Panel> {
    let label = CoherentLabel::new(Complex64::new(FIG6_Z0, 0.0), Preset::confluent(alpha, beta)?.params);
    let sigma = width_sigma(alpha, beta)?;
    let grid = par::husimi_kerr(&label, k, spec)?;
    Ok(Panel { alpha, beta, k, sigma, m: component_layout(k).m, m_max: max_distinguishable(FIG6_Z0, sigma), grid })
}

/// How the `m` dominant local maxima of a panel sit against the predicted
/// component centres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakGeometry {
    /// Worst Chebyshev distance, in cells, from a centre to its nearest peak.
    pub cells: usize,
    /// Worst angular distance from a centre to its nearest peak, radians.
    pub angle: f64,
    /// Every centre has a different nearest peak.
    pub one_to_one: bool,
}

impl PeakGeometry {
    /// Each peak lies in its own angular sector, closer than a quarter
    /// spacing to its centre.
    pub fn sectors_match(&self, m: usize) -> bool {
        self.one_to_one && self.angle < core::f64::consts::PI / (2.0 * m as f64)
    }
}

/// `None` when fewer than `m` maxima exist.
pub fn peak_geometry(panel: &Panel) -> Option<PeakGeometry> {
    let g = &panel.grid;
    let s = g.spec;
    let peaks: Vec<_> = g.local_maxima(PEAK_FRACTION).into_iter().take(panel.m).collect();
    if peaks.len() < panel.m {
        return None;
    }
    let mut out = PeakGeometry { cells: 0, angle: 0.0, one_to_one: true };
    let mut used = vec![false; peaks.len()];
    for c in predicted_centers(Complex64::new(FIG6_Z0, 0.0), panel.k) {
        let cx = ((c.re - s.x_min) / s.dx()).round() as i64;
        let cy = ((c.im - s.y_min) / s.dy()).round() as i64;
        let (i, d) = peaks
            .iter()
            .map(|(ix, iy, _)| (*ix as i64 - cx).abs().max((*iy as i64 - cy).abs()) as usize)
            .enumerate()
            .min_by_key(|(_, d)| *d)?;
        out.cells = out.cells.max(d);
        out.one_to_one &= !std::mem::replace(&mut used[i], true);
        let (ix, iy, _) = peaks[i];
        let a = (s.point(ix, iy) / c).arg().abs();
        out.angle = out.angle.max(a);
    }
    Some(out)
}

fn fig6(id: &str, alpha: f64, beta: f64, only_k: Option<usize>) -> Result<Vec<FigureFile>> {
    let spec = GridSpec::default_window();
    let mut out = Vec::new();
    for k in FIG6_K.into_iter().filter(|k| only_k.is_none_or(|o| o == *k)) {
        let panel = fig6_panel(alpha, beta, k, &spec)?;
        let lay = component_layout(k);
        let mut meta = vec![("figure".to_string(), "Husimi function of the Kerr state at t = tau/k".to_string())];
        meta.extend(io::params_header(&panel.label().params));
        meta.push(("z0".into(), io::complex(Complex64::new(FIG6_Z0, 0.0))));
        meta.push(("t_k".into(), format!("1/{k}")));
        meta.push(("components".into(), lay.m.to_string()));
        meta.push(("rotation_offset".into(), fmt(lay.rotation_offset)));
        meta.push(("sigma".into(), fmt(panel.sigma)));
        meta.push(("max_distinguishable".into(), panel.m_max.to_string()));
        meta.push(("distinguishable".into(), panel.distinguishable().to_string()));
        for c in predicted_centers(Complex64::new(FIG6_Z0, 0.0), k) {
            meta.push(("marker".into(), format!("center,{}", io::complex(c))));
        }
        if let Some(g) = peak_geometry(&panel) {
            meta.push(("peak_offset_cells".into(), g.cells.to_string()));
            meta.push(("peak_offset_angle".into(), fmt(g.angle)));
        }
        let mut buf = Vec::new();
        io::write_husimi(&mut buf, &meta, &panel.grid).expect("writing to memory");
        out.push(FigureFile { name: format!("{id}_k{k}.csv"), contents: String::from_utf8(buf).expect("ascii") });
    }
    if out.is_empty() {
        return Err(Error::Precondition("no panel of this figure has the requested k"));
    }
    Ok(out)
}

/// Files for one figure id; `only_k` selects a single Husimi panel.
pub fn figure(id: &str, only_k: Option<usize>) -> std::result::Result<Vec<FigureFile>, FigureError> {
    let can = Preset::canonical;
    let per = |s: f64| Preset::perelomov_su11(s).expect("positive spin");
    let disk = grid(0.0, 0.99, 199);
    let plane = grid(0.0, 12.0, 241);
    let f = match id {
        "fig1a" => fig1_top(id, can(), &plane, 5.0)?,
        "fig1b" => fig1_top(id, per(3.0), &disk, 4.0 / 9.0)?,
        "fig1c" => fig1_bottom(id, can(), &grid(0.0, 40.0, 801), |m| m as f64)?,
        "fig1d" => fig1_bottom(id, per(3.0), &disk, |m| (m as f64 - 1.0) / (m as f64 + 4.0))?,
        "fig2a" => fig_moments(id, "mean photon number", can(), &plane, Some(5.0), mean_n)?,
        "fig2b" => fig_moments(id, "mean photon number", per(1.0), &disk, Some(0.8), mean_n)?,
        "fig3a" => fig_moments(id, "photon number standard deviation", can(), &plane, None, std_n)?,
        "fig3b" => fig_moments(id, "photon number standard deviation", per(3.0), &disk, None, std_n)?,
        "fig4" => fig4()?,
        "fig5a" => fig_mandel(id, 1.0, 4.0)?,
        "fig5b" => fig_mandel(id, 1.0, 1.0)?,
        "fig5c" => fig_mandel(id, 4.0, 1.0)?,
        _ => {
            let (_, a, b) = FIG6_ROWS.iter().find(|r| r.0 == id).ok_or_else(|| FigureError::Unknown(id.into()))?;
            return Ok(fig6(id, *a, *b, only_k)?);
        }
    };
    Ok(vec![f])
}
