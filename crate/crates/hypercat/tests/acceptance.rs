//! Acceptance criteria, one line each. Criteria listed in `KNOWN_FAILURES`
//! are expected to print FAIL; the target fails when the set of failing
//! criteria differs from that list in either direction.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hypercat::figures::{self, FIG6_K, FIG6_ROWS};
use hypercat::hyperfunc::{self, kitten_norm, kitten_norm_appendix};
use hypercat::identity::{self, Status};
use hypercat::kerr::{self, circle_weights, component_layout, GridSpec, KerrParams};
use hypercat::kittens::{self, kitten_dft, kitten_fock, KittenSpec};
use hypercat::states::{self, CoherentLabel, Preset};
use hypercat::stats::{self, mandel, mandel_nf, mean_n, photon_pdf, std_n, Classification};
use hypercat::{Complex64, ModelParams, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Canonical critical displacement (the inflection sits at x = k − 1) and
/// Husimi peaks displaced by interference on the 281² grid.
const KNOWN_FAILURES: &[u32] = &[6, 9];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Worst value of a fallible sweep; the first error wins.
fn worst(it: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut m: f64 = 0.0;
    for v in it {
        m = m.max(v?);
    }
    Ok(m)
}

fn below(name: &str, v: Result<f64>, tol: f64) -> Outcome {
    match v {
        Ok(v) => outcome(v < tol, format!("{name} {v:.2e} (< {tol:.0e})")),
        Err(e) => outcome(false, format!("{name}: {e}")),
    }
}

/// Random untruncated parameters with `p, q ≤ 2` and a nonempty domain,
/// plus the largest `x` worth sampling.
fn random_family(rng: &mut ChaCha8Rng) -> (ModelParams, f64) {
    loop {
        let p = rng.random_range(0..=2);
        let q = rng.random_range(0..=2);
        if p > q + 1 {
            continue;
        }
        let alpha: Vec<f64> = (0..p).map(|_| rng.random_range(0.5..4.0)).collect();
        let beta: Vec<f64> = (0..q).map(|_| rng.random_range(0.5..4.0)).collect();
        let params = ModelParams::new(&alpha, &beta).expect("positive parameters");
        let xmax = if p == q + 1 { 0.9 } else { 8.0 };
        return (params, xmax);
    }
}

fn c1_closed_forms() -> Outcome {
    let can = ModelParams::canonical();
    let sg = Preset::susskind_glogower().params;
    let a = worst((1..=200).map(|i| {
        let x = 0.1 * i as f64;
        Ok(rel(kitten_norm(&can, 2, 0, x)?, x.cosh()).max(rel(kitten_norm(&can, 2, 1, x)?, x.sinh())))
    }));
    let b = worst((1..=8).flat_map(|k| (0..k).map(move |j| (k, j))).flat_map(|(k, j)| {
        let sg = sg.clone();
        (1..=99).map(move |i| {
            let x = 0.01 * i as f64;
            Ok(rel(kitten_norm(&sg, k, j, x)?, x.powi(j as i32) / (1.0 - x.powi(k as i32))))
        })
    }));
    below("worst relative error", a.and_then(|a| b.map(|b| a.max(b))), 1e-12)
}

fn c2_appendix() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let v = worst((0..200).map(|_| {
        let (p, xmax) = random_family(&mut rng);
        let k = rng.random_range(1..=5);
        let j = rng.random_range(0..k);
        let x = rng.random_range(0.01..xmax);
        Ok(rel(kitten_norm_appendix(&p, k, j, x)?, kitten_norm(&p, k, j, x)?))
    }));
    below("200 cases, worst relative difference", v, 1e-10)
}

/// Every preset; the truncated SU(2) ones get `N + 1 = 2k` so that `k | N + 1`.
fn presets_for(k: usize) -> Vec<Preset> {
    let spin = (2 * k - 1) as f64 / 2.0;
    vec![
        Preset::canonical(),
        Preset::perelomov_su11(1.5).expect("valid"),
        Preset::barut_girardello_su11(1.0).expect("valid"),
        Preset::susskind_glogower(),
        Preset::dual_susskind_glogower(),
        Preset::dual_inverse_bosonic(),
        Preset::hydrogen(),
        Preset::gilmore_perelomov_su2(spin).expect("valid"),
        Preset::barut_girardello_su2(spin).expect("valid"),
    ]
}

fn c3_dft_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cases = 0;
    let mut sweep = Vec::new();
    for k in [2usize, 3, 5, 8] {
        for p in presets_for(k) {
            let xmax = hyperfunc::convergence_domain(&p.params).edge().min(6.0) * 0.9;
            for _ in 0..5 {
                let r = rng.random_range(0.0..xmax).sqrt();
                let t = rng.random_range(0.0..std::f64::consts::TAU);
                let spec = KittenSpec::new(k, rng.random_range(0..k), c(r * t.cos(), r * t.sin()), p.params.clone());
                cases += 1;
                sweep.push((|| Ok(kitten_dft(&spec, None)?.gauge_distance(&kitten_fock(&spec, None)?)))());
            }
        }
    }
    below(&format!("{cases} cases, worst vector residual"), worst(sweep), 1e-10)
}

fn c4_discrete_circle() -> Outcome {
    let mut sweep = Vec::new();
    let mut cases = 0;
    for twice in 1..=12 {
        let spin = twice as f64 / 2.0;
        for p in [Preset::gilmore_perelomov_su2(spin), Preset::barut_girardello_su2(spin)] {
            let p = p.expect("valid").params;
            for r in [0.2, 1.0, 5.0] {
                for n in 0..=twice {
                    cases += 1;
                    sweep.push(kittens::circle_number_state_discrete(&p, n, r).map(|v| 1.0 - kittens::number_state_fidelity(&v, n)));
                }
            }
        }
    }
    below(&format!("{cases} levels, worst 1 - fidelity"), worst(sweep), 1e-10)
}

fn c5_residual_bound() -> Outcome {
    let (mut gap, mut headroom, mut ok) = (0.0f64, f64::INFINITY, true);
    for z in [0.3, 0.5, 0.9] {
        for spin in 1..=6 {
            let p = Preset::barut_girardello_su2(spin as f64).expect("valid").params;
            match states::eigen_residual(&CoherentLabel::new(c(z, 0.0), p), 1) {
                Ok(r) => {
                    let direct = r.residual * r.residual;
                    gap = gap.max((direct - r.closed_form_sq).abs());
                    headroom = headroom.min(r.bound / r.closed_form_sq);
                    ok &= r.closed_form_sq < r.bound && direct < r.bound + hypercat::verify::RESIDUAL_FLOOR;
                }
                Err(e) => return outcome(false, format!("s={spin} z={z}: {e}")),
            }
        }
    }
    outcome(ok && gap < 1e-12, format!("residual^2 vs closed form {gap:.2e} (< 1e-12), smallest bound/residual^2 {headroom:.4}"))
}

fn c6_critical_z() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let can = (2..=8).map(|k| Ok((stats::critical_z(&ModelParams::canonical(), k)? - (k as f64).sqrt()).abs()));
    match worst(can) {
        Ok(v) => {
            ok &= v < 1e-6;
            lines.push(format!("canonical vs sqrt(k) {v:.2e}"));
        }
        Err(e) => return outcome(false, format!("canonical: {e}")),
    }
    let per = [1.0, 3.0].into_iter().flat_map(|s| {
        (2..=8).map(move |k| {
            let zc = stats::critical_z(&Preset::perelomov_su11(s)?.params, k)?;
            Ok((zc - ((k as f64 - 1.0) / (k as f64 + 2.0 * s - 2.0)).sqrt()).abs())
        })
    });
    match worst(per) {
        Ok(v) => {
            ok &= v < 1e-6;
            lines.push(format!("Perelomov {v:.2e}"));
        }
        Err(e) => return outcome(false, format!("Perelomov: {e}")),
    }
    let reference = (|| {
        let a = stats::critical_z(&ModelParams::canonical(), 5)?.powi(2);
        let b = stats::critical_z(&Preset::perelomov_su11(3.0)?.params, 5)?.powi(2);
        Ok::<_, hypercat::Error>((a, b))
    })();
    match reference {
        Ok((a, b)) => {
            ok &= (a - 5.0).abs() < 1e-6 && (b - 4.0 / 9.0).abs() < 1e-6;
            lines.push(format!("k=5 z_c^2 = {a:.9} (reference 5), {b:.9} (reference 4/9)"));
        }
        Err(e) => return outcome(false, format!("reference values: {e}")),
    }
    outcome(ok, lines.join("; "))
}

fn c7_mandel() -> Outcome {
    let families = [
        ModelParams::canonical(),
        Preset::perelomov_su11(3.0).expect("valid").params,
        Preset::confluent(1.0, 4.0).expect("valid").params,
        Preset::confluent(4.0, 1.0).expect("valid").params,
    ];
    let limits = worst(families.iter().flat_map(|p| {
        (1..=8).flat_map(move |k| {
            (0..k).filter(move |&j| k > 1 || j > 0).map(move |j| {
                let want = if j == 0 { k as f64 - 1.0 } else { -1.0 };
                Ok((mandel(p, k, j, 0.0)?.mandel_q - want).abs())
            })
        })
    }));
    let Ok(limits) = limits else {
        return outcome(false, "small-x limits failed to evaluate");
    };
    let signs = (|| {
        for (a, b) in [(1.0, 2.0), (1.0, 4.0), (2.0, 1.0), (4.0, 1.0)] {
            let p = Preset::confluent(a, b)?.params;
            let want = if a < b { Classification::Super } else { Classification::Sub };
            for i in 1..=200 {
                if mandel(&p, 1, 0, 0.05 * i as f64)?.classification != want {
                    return Ok(false);
                }
            }
            for j in 0..5 {
                for i in 0..=60 {
                    if mandel(&p, 5, j, 10.0 + 0.5 * i as f64)?.classification != want {
                        return Ok(false);
                    }
                }
            }
        }
        Ok::<_, hypercat::Error>(true)
    })();
    let signs = signs.unwrap_or(false);
    outcome(limits < 1e-10 && signs, format!("limits {limits:.2e} (< 1e-10), confluent signs {}", if signs { "match" } else { "differ" }))
}

fn c8_kerr_identity() -> Outcome {
    let sweep = FIG6_ROWS.iter().flat_map(|(_, a, b)| {
        let l = CoherentLabel::new(c(2.0, 0.0), Preset::confluent(*a, *b).expect("valid").params);
        [2usize, 3, 4, 5, 6, 8, 15].into_iter().map(move |k| {
            let e = kerr::kerr_evolve(&l, &KerrParams::fraction(1, k as u64, 2)?, None)?;
            let ks = kerr::reconstruct_from_kittens(&l, k, e.dim())?;
            let cs = kerr::reconstruct_from_circle(&l, k, e.dim())?;
            Ok(e.distance(&ks).max(e.distance(&cs)))
        })
    });
    below("21 states, worst residual", worst(sweep.collect::<Vec<_>>()), 1e-10)
}

fn c9_layout() -> Outcome {
    let lay = component_layout;
    let counts = [1usize, 2, 3, 4, 5, 6, 8, 15]
        .iter()
        .all(|&k| circle_weights(k).iter().filter(|w| w.norm() > kerr::WEIGHT_EPS).count() == lay(k).m);
    let layout = counts
        && lay(15).m == 15
        && lay(8).m == 4
        && lay(6).m == 3
        && lay(3).m == 3
        && (lay(6).rotation_offset - lay(3).rotation_offset - std::f64::consts::PI / 3.0).abs() < 1e-15;
    let spec = GridSpec::default_window();
    let mut offsets = Vec::new();
    let mut geometry = true;
    for (id, a, b) in FIG6_ROWS {
        for k in FIG6_K {
            let panel = match figures::fig6_panel(a, b, k, &spec) {
                Ok(p) => p,
                Err(e) => return outcome(false, format!("{id} k={k}: {e}")),
            };
            if !panel.distinguishable() {
                continue;
            }
            match figures::peak_geometry(&panel) {
                Some(g) => {
                    geometry &= g.one_to_one && g.cells <= 1;
                    if g.cells > 1 {
                        offsets.push(format!("{id} k={k}: {} cells", g.cells));
                    }
                }
                None => {
                    geometry = false;
                    offsets.push(format!("{id} k={k}: fewer than {} maxima", panel.m));
                }
            }
        }
    }
    let peaks = if offsets.is_empty() { "all peaks within one cell".to_string() } else { offsets.join(", ") };
    outcome(layout && geometry, format!("layouts {}; {peaks}", if layout { "match" } else { "differ" }))
}

fn c10_widths() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (a, b, want, m) in [(1.0, 1.0, 1.00, 4), (1.0, 3.0, 1.32, 3), (3.0, 1.0, 0.75, 5)] {
        match kerr::width_sigma(a, b) {
            Ok(s) => {
                let got = kerr::max_distinguishable(2.0, s);
                ok &= (s - want).abs() <= 0.01 && got == m;
                parts.push(format!("sigma({a},{b}) = {s:.4} m = {got}"));
            }
            Err(e) => return outcome(false, format!("sigma({a},{b}): {e}")),
        }
    }
    outcome(ok, parts.join(", "))
}

fn c11_moments() -> Outcome {
    let rows = identity::identity_report(identity::DEFAULT_MAX_N);
    let verified: Vec<_> =
        rows.iter().filter(|r| r.n.is_some() && r.status != Status::ExpectedFail && r.status != Status::UnexpectedPass).collect();
    let worst = verified.iter().filter_map(|r| r.residual).fold(0.0, f64::max);
    let all = !verified.is_empty() && verified.iter().all(|r| r.status == Status::Verified);
    let control = rows.iter().any(|r| r.status == Status::ExpectedFail) && !rows.iter().any(|r| r.status == Status::UnexpectedPass);
    outcome(
        all && control,
        format!("{} moments, worst {worst:.2e} (< 1e-8); negative control {}", verified.len(), if control { "fails" } else { "passes" }),
    )
}

/// Brute-force `(⟨n⟩, ⟨n(n−1)⟩, ⟨n_f⟩, ⟨a_f†² a_f²⟩)` from the pdf.
fn pdf_sums(spec: &KittenSpec) -> Result<[f64; 4]> {
    let p = &spec.params;
    let mut acc = [0.0; 4];
    let mut total = 0.0;
    let mut prev_nf = 0.0;
    for m in 0..6000 {
        let nf = if m == 0 { 0.0 } else { m as f64 * hyperfunc::f_factor(p, m)?.powi(2) };
        let w = photon_pdf(spec, m)?;
        total += w;
        acc[0] += m as f64 * w;
        acc[1] += (m * m.saturating_sub(1)) as f64 * w;
        acc[2] += nf * w;
        acc[3] += nf * prev_nf * w;
        prev_nf = nf;
    }
    Ok(acc.map(|a| a / total))
}

fn c12_statistics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut nf_cases = 0;
    let sweep: Vec<Result<f64>> = (0..100)
        .map(|_| {
            let (p, xmax) = random_family(&mut rng);
            let k = rng.random_range(1..=6);
            let j = rng.random_range(0..k);
            let x = rng.random_range(0.05..xmax);
            let spec = KittenSpec::new(k, j, c(x.sqrt(), 0.0), p.clone());
            let [m1, f2, nf1, nf2] = pdf_sums(&spec)?;
            let sd = (f2 + m1 - m1 * m1).max(0.0).sqrt();
            let mut err = ((mean_n(&p, k, j, x)? - m1).abs() / (1.0 + m1)).max((std_n(&p, k, j, x)? - sd).abs() / (1.0 + sd));
            if m1 > 0.0 && f2 > 0.0 {
                err = err.max((mandel(&p, k, j, x)?.mandel_q - (f2 / m1 - m1)).abs());
            }
            if k >= 3 {
                nf_cases += 1;
                let r = mandel_nf(&p, k, j, x)?;
                err = err.max((r.mean_n - nf1).abs() / (1.0 + nf1)).max((r.mandel_q - (nf2 / nf1 - nf1)).abs());
            }
            Ok(err)
        })
        .collect();
    below(&format!("100 specs ({nf_cases} with n_f), worst difference"), worst(sweep), 1e-9)
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let criteria: [Criterion; 12] = [
        (1, "closed-form norms", s(1), c1_closed_forms),
        (2, "appendix sector series", s(10), c2_appendix),
        (3, "DFT and Fock kittens agree", s(30), c3_dft_equivalence),
        (4, "exact discrete circle representation", s(10), c4_discrete_circle),
        (5, "truncated eigen-residual bound", s(5), c5_residual_bound),
        (6, "critical displacements", s(5), c6_critical_z),
        (7, "Mandel limits and confluent signs", s(5), c7_mandel),
        (8, "Kerr state, kitten and circle forms agree", s(60), c8_kerr_identity),
        (9, "component layout and Husimi peaks", s(300), c9_layout),
        (10, "widths and distinguishable counts", s(5), c10_widths),
        (11, "moment problem", s(5), c11_moments),
        (12, "statistics against pdf sums", s(30), c12_statistics),
    ];
    // the acceptance runtimes assume the default term cap and tolerance
    assert!(hyperfunc::max_terms() == 10_000);
    let mut failed = Vec::new();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let pass = o.pass && took < limit;
        if !pass {
            failed.push(id);
        }
        let known = if !pass && KNOWN_FAILURES.contains(&id) { " [known]" } else { "" };
        println!(
            "[{}] {id:>2} {name}: {} ({:.2} s of {} s){known}",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    let unexpected: Vec<_> = failed.iter().filter(|i| !KNOWN_FAILURES.contains(i)).collect();
    let fixed: Vec<_> = KNOWN_FAILURES.iter().filter(|i| !failed.contains(i)).collect();
    println!("{} of 12 criteria pass", 12 - failed.len());
    if !unexpected.is_empty() || !fixed.is_empty() {
        println!("unexpected failures {unexpected:?}, known failures now passing {fixed:?}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
