//! Study runners. Each command computes a [`Report`] in memory (in
//! parallel where it sweeps parameters) and a single writer emits it.

use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use planar_ortho::kernel::{scaled_ratio, scaling_predictor};
use planar_ortho::moments::{moments, MomentOptions, MomentTable};
use planar_ortho::ortho::{kappa_asymptotic, orthonormalize, OrthoPolySet};
use planar_ortho::process::{
    disk_gap_product, empirical_r1, gap_probability, radial_cdf, sample_disk_stream, scaled_r1, scaled_r2,
    sine_corr, GapNodes,
};
use planar_ortho::{DomainSpec, ExteriorMap, C64};
use rayon::prelude::*;

use crate::config::StudyConfig;
use crate::domain::format_complex;
use crate::error::CliError;
use crate::formats::{num, write_histogram_csv, write_moments_csv, write_samples_csv, Csv, MomentCache};

/// Relative errors at or below this are rounding noise and are left out of
/// rate fits.
const FIT_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&'static str]) -> Self {
        Table { name: name.into(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn write_to<W: Write>(&self, out: W) -> io::Result<()> {
        let mut csv = Csv::new(out, &self.header)?;
        for r in &self.rows {
            csv.row(r)?;
        }
        csv.finish().map(drop)
    }

    /// Column by header name, parsed as numbers (empty fields become NaN).
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| r[idx].parse().unwrap_or(f64::NAN)).collect())
    }
}

/// Output of one command. The first table is the primary one and is what
/// goes to stdout when no output directory is set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub tables: Vec<Table>,
    /// Non-tabular files such as SVG plots: (file name, contents).
    pub files: Vec<(String, String)>,
    /// One-line remarks for stderr.
    pub notes: Vec<String>,
}

impl Report {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Writes every table and file into `dir`, or the primary table to
    /// `stdout` when `dir` is `None`.
    pub fn write(&self, dir: Option<&Path>, stdout: impl Write) -> io::Result<()> {
        match dir {
            None => match self.tables.first() {
                Some(t) => t.write_to(stdout),
                None => Ok(()),
            },
            Some(dir) => {
                fs::create_dir_all(dir)?;
                for t in &self.tables {
                    t.write_to(io::BufWriter::new(fs::File::create(dir.join(&t.name))?))?;
                }
                for (name, body) in &self.files {
                    fs::write(dir.join(name), body)?;
                }
                Ok(())
            }
        }
    }
}

fn moment_options(cfg: &StudyConfig) -> MomentOptions {
    let d = MomentOptions::default();
    MomentOptions {
        angular_nodes: cfg.nodes_angular.unwrap_or(d.angular_nodes),
        verify: true,
        tol: cfg.tol.unwrap_or(d.tol),
    }
}

fn gap_nodes(cfg: &StudyConfig) -> GapNodes {
    let d = GapNodes::default();
    GapNodes {
        angular: cfg.nodes_angular.unwrap_or(d.angular),
        radial: cfg.nodes_radial.unwrap_or(d.radial),
        panels: d.panels,
    }
}

/// Moment table through the optional on-disk cache.
pub fn moment_table(cfg: &StudyConfig, map: &ExteriorMap, n_max: usize, s: f64) -> Result<MomentTable, CliError> {
    let opts = moment_options(cfg);
    let Some(dir) = &cfg.cache else {
        return Ok(moments(map, n_max, s, &opts)?);
    };
    let cache = MomentCache::new(dir);
    let key = MomentCache::key(&cfg.domain, n_max, s, &opts);
    if let Some(t) = cache.load(&key)? {
        return Ok(t);
    }
    let t = moments(map, n_max, s, &opts)?;
    cache.store(&key, &t)?;
    Ok(t)
}

pub fn poly_set(cfg: &StudyConfig, map: &ExteriorMap, n_max: usize, s: f64) -> Result<(OrthoPolySet, MomentTable), CliError> {
    let table = moment_table(cfg, map, n_max, s)?;
    let set = orthonormalize(map, &table)?;
    Ok((set, table))
}

/// Least-squares slope of `ln y` against `x`.
fn log_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y.ln()));
    let (mx, my) = (sx / m, sy / m);
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in points {
        num += (x - mx) * (y.ln() - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// Leading coefficients against their asymptotic prediction.
pub fn cmd_poly(cfg: &StudyConfig) -> Result<Report, CliError> {
    let nmax = cfg.nmax.ok_or_else(|| CliError::config("poly needs nmax"))?;
    let map = cfg.domain.exterior_map()?;
    let degrees: Vec<usize> = (cfg.nmin..=nmax).collect();

    // One factorisation serves every degree when s does not depend on n.
    let shared = cfg.srule.s_for(0) == cfg.srule.s_for(1);
    let sets: Vec<(usize, f64, OrthoPolySet, MomentTable)> = if shared {
        let s = cfg.srule.s_for(nmax);
        let (set, table) = poly_set(cfg, &map, nmax, s)?;
        degrees.iter().map(|&n| (n, s, set.clone(), table.clone())).collect()
    } else {
        degrees
            .par_iter()
            .map(|&n| {
                let s = cfg.srule.s_for(n);
                poly_set(cfg, &map, n, s).map(|(set, t)| (n, s, set, t))
            })
            .collect::<Result<_, _>>()?
    };

    let mut poly = Table::new("poly.csv", &["n", "kappa_exact", "kappa_pred", "rel_err", "fitted_rate"]);
    let mut coeffs = Table::new("poly_coeffs.csv", &["n", "k", "re", "im"]);
    let mut fit = Vec::new();
    let mut doubling: f64 = 0.0;
    for (n, s, set, table) in &sets {
        let exact = set.kappa(*n);
        let pred = kappa_asymptotic(*n, *s, &map);
        let rel = (exact / pred - 1.0).abs();
        if rel > FIT_FLOOR {
            fit.push((*n as f64, rel));
        }
        let rate = if fit.len() >= 2 { log_slope(&fit) } else { f64::NAN };
        poly.rows.push(vec![n.to_string(), num(exact), num(pred), num(rel), num(rate)]);
        for (k, c) in set.mono_coeffs(*n).iter().enumerate() {
            coeffs.rows.push(vec![n.to_string(), k.to_string(), num(c.re), num(c.im)]);
        }
        doubling = doubling.max(table.doubling_change);
    }
    let mut moments_csv = Vec::new();
    if let Some((_, _, _, table)) = sets.last() {
        write_moments_csv(&mut moments_csv, table)?;
    }
    let moments_table = csv_to_table("moments.csv", &moments_csv, &["row", "col", "re", "im"]);

    let mut report = Report { tables: vec![poly, coeffs, moments_table], ..Default::default() };
    report.notes.push(format!("largest moment change under node doubling: {doubling:e}"));
    Ok(report)
}

fn csv_to_table(name: &str, bytes: &[u8], header: &[&'static str]) -> Table {
    let text = String::from_utf8_lossy(bytes);
    let mut t = Table::new(name, header);
    t.rows = text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    t
}

fn require_sizes(cfg: &StudyConfig, cmd: &str) -> Result<(), CliError> {
    if cfg.sizes.is_empty() {
        return Err(CliError::config(format!("{cmd} needs at least one N")));
    }
    Ok(())
}

/// Scaled kernel ratios at boundary points against the `H_ℓ` predictor.
pub fn cmd_scaling(cfg: &StudyConfig) -> Result<Report, CliError> {
    require_sizes(cfg, "scaling")?;
    let map = cfg.domain.exterior_map()?;
    let blocks: Vec<Vec<Vec<String>>> = cfg
        .sizes
        .par_iter()
        .map(|&n| -> Result<_, CliError> {
            let s = cfg.srule.s_for(n);
            let ell = cfg.ell_for(n)?;
            let (set, _) = poly_set(cfg, &map, n - 1, s)?;
            let mut rows = Vec::new();
            for &theta in &cfg.theta {
                for &a in &cfg.a {
                    for &b in &cfg.b {
                        let ratio = scaled_ratio(&set, n, theta, a, b, cfg.weighted)?;
                        let pred = scaling_predictor(&map, theta, a, b, ell, cfg.weighted).value();
                        let p = pred.unwrap_or(C64::new(f64::NAN, f64::NAN));
                        let err = pred.map_or(f64::NAN, |p| (ratio - p).norm());
                        rows.push(vec![
                            n.to_string(),
                            num(theta),
                            format_complex(a),
                            format_complex(b),
                            num(ratio.re),
                            num(ratio.im),
                            num(p.re),
                            num(p.im),
                            num(err),
                        ]);
                    }
                }
            }
            Ok(rows)
        })
        .collect::<Result<_, _>>()?;
    let mut t = Table::new(
        "scaling.csv",
        &["N", "theta", "a", "b", "ratio_re", "ratio_im", "predictor_re", "predictor_im", "abs_err"],
    );
    t.rows = blocks.into_iter().flatten().collect();
    Ok(Report { tables: vec![t], ..Default::default() })
}

fn grid(extent: f64, points: usize) -> Vec<f64> {
    (0..points).map(|k| -extent + 2.0 * extent * k as f64 / (points - 1) as f64).collect()
}

/// Data for the scaled correlation plots: tangent and normal directions
/// and the real `(a, b)` surface.
pub fn cmd_corr(cfg: &StudyConfig) -> Result<Report, CliError> {
    let map = cfg.domain.exterior_map()?;
    let ts = grid(cfg.extent, cfg.grid);
    let ells = cfg.ell_list();
    let mut tangent = Table::new("corr_tangent.csv", &["theta", "ell", "t", "r1", "r2", "r2_sin"]);
    let mut normal = Table::new("corr_normal.csv", &["theta", "ell", "t", "r1"]);
    let mut surface = Table::new("corr_surface.csv", &["theta", "ell", "a", "b", "r2"]);
    for &theta in &cfg.theta {
        for &ell in &ells {
            for &t in &ts {
                // a = 0 and b = −it give t = −i(a + conj b).
                let r1 = scaled_r1(&map, theta, ell, C64::new(0.0, t));
                let r2 = scaled_r2(&map, theta, ell, C64::new(0.0, 0.0), C64::new(0.0, -t));
                tangent.rows.push(vec![num(theta), num(ell), num(t), num(r1), num(r2), num(sine_corr(t, 0.0))]);
                let r1n = scaled_r1(&map, theta, ell, C64::new(-t, 0.0));
                normal.rows.push(vec![num(theta), num(ell), num(t), num(r1n)]);
            }
            let rows: Vec<Vec<String>> = ts
                .par_iter()
                .flat_map_iter(|&a| {
                    let map = &map;
                    ts.iter().map(move |&b| {
                        let r2 = scaled_r2(map, theta, ell, C64::new(a, 0.0), C64::new(b, 0.0));
                        vec![num(theta), num(ell), num(a), num(b), num(r2)]
                    })
                })
                .collect();
            surface.rows.extend(rows);
        }
    }
    Ok(Report { tables: vec![tangent, normal, surface], ..Default::default() })
}

/// Level lines `P_K = c`, i.e. the curves `φ(c·e^{iθ})`.
pub fn cmd_levelsets(cfg: &StudyConfig) -> Result<Report, CliError> {
    let map = cfg.domain.exterior_map()?;
    let mut t = Table::new("levelsets.csv", &["level", "k", "re", "im"]);
    let mut lines = Vec::new();
    for &c in &cfg.levels {
        let mut line = Vec::with_capacity(cfg.grid + 1);
        // Closed polyline: the last vertex repeats the first.
        for k in 0..=cfg.grid {
            let theta = 2.0 * PI * (k % cfg.grid) as f64 / cfg.grid as f64;
            let z = map.phi(C64::from_polar(c, theta))?;
            t.rows.push(vec![num(c), k.to_string(), num(z.re), num(z.im)]);
            line.push(z);
        }
        lines.push(line);
    }
    let svg = polyline_svg(&lines);
    Ok(Report { tables: vec![t], files: vec![("levelsets.svg".into(), svg)], ..Default::default() })
}

fn polyline_svg(lines: &[Vec<C64>]) -> String {
    let pts = lines.iter().flatten();
    let (mut lo, mut hi) = (C64::new(f64::INFINITY, f64::INFINITY), C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in pts {
        lo = C64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = C64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let span = (hi.re - lo.re).max(hi.im - lo.im).max(1e-12);
    let size = 480.0;
    let pad = 10.0;
    let scale = (size - 2.0 * pad) / span;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    );
    for line in lines {
        let coords: Vec<String> = line
            .iter()
            // SVG's y axis points down.
            .map(|p| format!("{:.3},{:.3}", pad + (p.re - lo.re) * scale, size - pad - (p.im - lo.im) * scale))
            .collect();
        svg.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"{}\"/>\n",
            coords.join(" ")
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Gap probabilities of disks `|λ − center| < r`, with the disk product
/// oracle when it applies.
pub fn cmd_gap(cfg: &StudyConfig) -> Result<Report, CliError> {
    require_sizes(cfg, "gap")?;
    let map = cfg.domain.exterior_map()?;
    let nodes = gap_nodes(cfg);
    let oracle_applies = cfg.domain == DomainSpec::Disk && cfg.center == C64::new(0.0, 0.0);
    type Rows = Vec<Vec<String>>;
    let blocks: Vec<(Rows, Rows, usize)> = cfg
        .sizes
        .par_iter()
        .map(|&n| -> Result<_, CliError> {
            let s = cfg.srule.s_for(n);
            let (set, _) = poly_set(cfg, &map, n - 1, s)?;
            let mut rows = Vec::new();
            let mut terms = Vec::new();
            let mut warnings = 0;
            for &r in &cfg.radius {
                let rep = gap_probability(&set, n, cfg.center, r, nodes)?;
                let oracle = if oracle_applies { disk_gap_product(n, s, r) } else { f64::NAN };
                warnings += usize::from(rep.warning.is_some());
                rows.push(vec![
                    n.to_string(),
                    num(s),
                    num(r),
                    num(rep.value),
                    num(rep.refined),
                    num(rep.determinant),
                    num(oracle),
                    num((rep.value - oracle).abs()),
                    rep.warning.is_some().to_string(),
                ]);
                for (k, term) in rep.terms.iter().enumerate() {
                    terms.push(vec![n.to_string(), num(r), k.to_string(), num(*term)]);
                }
            }
            Ok((rows, terms, warnings))
        })
        .collect::<Result<_, _>>()?;
    let mut gap = Table::new(
        "gap.csv",
        &["N", "s", "radius", "value", "refined", "determinant", "oracle", "abs_err", "refine_warning"],
    );
    let mut terms = Table::new("gap_terms.csv", &["N", "radius", "k", "term"]);
    let mut warnings = 0;
    for (rows, t, w) in blocks {
        gap.rows.extend(rows);
        terms.rows.extend(t);
        warnings += w;
    }
    let mut report = Report { tables: vec![gap, terms], ..Default::default() };
    if warnings > 0 {
        report.notes.push(format!("{warnings} gap value(s) moved under node refinement; see refine_warning"));
    }
    Ok(report)
}

/// Exact disk-ensemble draws and their radial histogram.
pub fn cmd_sample(cfg: &StudyConfig) -> Result<Report, CliError> {
    if cfg.domain != DomainSpec::Disk {
        return Err(CliError::config("sample supports the disk domain only"));
    }
    let &[n] = cfg.sizes.as_slice() else {
        return Err(CliError::config("sample takes exactly one N"));
    };
    let s = cfg.srule.s_for(n);
    // One ChaCha stream per configuration, so the result does not depend on
    // the thread schedule.
    let draws = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| sample_disk_stream(n, s, cfg.seed, i))
        .collect::<Result<Vec<_>, _>>()?;
    let edges: Vec<f64> = (0..=cfg.bins).map(|k| cfg.rmax * k as f64 / cfg.bins as f64).collect();
    let hist = empirical_r1(&draws, &edges)?;

    let mut hist_csv = Vec::new();
    write_histogram_csv(&mut hist_csv, &hist)?;
    let mut samples_csv = Vec::new();
    write_samples_csv(&mut samples_csv, &draws)?;
    let expected: f64 = (0..n).map(|k| 1.0 - radial_cdf(k, s, 1.0)).sum();
    let mut summary = Table::new("sample_summary.csv", &["samples", "outside_mean", "outside_stderr", "outside_expected"]);
    summary.rows.push(vec![
        cfg.samples.to_string(),
        num(hist.outside_unit.mean),
        num(hist.outside_unit.stderr),
        num(expected),
    ]);
    Ok(Report {
        tables: vec![
            csv_to_table("histogram.csv", &hist_csv, &["bin_lo", "bin_hi", "density", "stderr"]),
            summary,
            csv_to_table("samples.csv", &samples_csv, &["index", "re", "im"]),
        ],
        ..Default::default()
    })
}
