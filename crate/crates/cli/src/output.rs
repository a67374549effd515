//! Artifact rendering: points CSV, islands JSON and the region SVG.
//!
//! Everything here is a pure function of the scan result, so repeated runs
//! produce identical bytes.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use qm_bootstrap::scanner::Island;
use qm_bootstrap::FeasibleRegion;
use serde::Serialize;

use crate::error::CliError;

/// Columns: axis names in schema order, `min_eigenvalue`, `feasible`,
/// `error`.
pub fn points_csv(region: &FeasibleRegion<f64>) -> Result<Vec<u8>, CliError> {
    let csv_err = |e: csv::Error| CliError::io("points.csv", std::io::Error::other(e.to_string()));
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = region.axes.iter().map(|a| a.name.to_string()).collect();
    header.extend(["min_eigenvalue", "feasible", "error"].map(String::from));
    w.write_record(&header).map_err(csv_err)?;
    for p in &region.points {
        let mut row: Vec<String> = p.coords.iter().map(|c| c.to_string()).collect();
        match &p.verdict {
            Ok(v) => {
                row.push(v.min_eigenvalue.to_string());
                row.push(if v.feasible { "1" } else { "0" }.to_string());
                row.push(String::new());
            }
            Err(e) => {
                row.push(String::new());
                row.push("0".to_string());
                row.push(e.code().to_string());
            }
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| CliError::io("points.csv", std::io::Error::other(e.to_string())))
}

#[derive(Serialize)]
struct IslandsDoc<'a> {
    kind: String,
    depth: usize,
    tol: f64,
    axes: &'a [qm_bootstrap::GridAxis<f64>],
    total_points: usize,
    feasible_points: usize,
    error_points: usize,
    islands: &'a [Island<f64>],
}

pub fn islands_json(region: &FeasibleRegion<f64>, islands: &[Island<f64>], tol: f64) -> Vec<u8> {
    let doc = IslandsDoc {
        kind: region.kind.to_string(),
        depth: region.depth,
        tol,
        axes: &region.axes,
        total_points: region.points.len(),
        feasible_points: region.feasible_count(),
        error_points: region.points.iter().filter(|p| p.verdict.is_err()).count(),
        islands,
    };
    pretty(&doc)
}

pub fn pretty<S: Serialize>(value: &S) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable artifact");
    out.push(b'\n');
    out
}

const W: f64 = 720.0;
const MARGIN: f64 = 60.0;

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    (0..=5).map(|i| lo + (hi - lo) * i as f64 / 5.0).collect()
}

fn header(h: f64, title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{h}\" viewBox=\"0 0 {W} {h}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{W}\" height=\"{h}\" fill=\"white\"/>\n\
         <text x=\"{MARGIN}\" y=\"24\" font-size=\"14\">{title}</text>\n"
    )
}

/// 1D: feasible intervals on the axis. 2D and up: feasible cells projected
/// onto the first two axes.
pub fn region_svg(region: &FeasibleRegion<f64>, islands: &[Island<f64>]) -> String {
    let title = format!("{} K={}: {} island(s)", region.kind, region.depth, islands.len());
    if region.axes.len() == 1 {
        one_axis(region, islands, &title)
    } else {
        two_axes(region, islands, &title)
    }
}

fn one_axis(region: &FeasibleRegion<f64>, islands: &[Island<f64>], title: &str) -> String {
    let h = 160.0;
    let axis = &region.axes[0];
    let (lo, hi) = (axis.lo, axis.value(axis.count() - 1));
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let sx = |x: f64| MARGIN + (x.clamp(lo, hi) - lo) / span * (W - 2.0 * MARGIN);
    let y = 110.0;
    let mut s = header(h, title);
    let _ = writeln!(s, "<line x1=\"{MARGIN}\" y1=\"{y}\" x2=\"{:.2}\" y2=\"{y}\" stroke=\"black\"/>", W - MARGIN);
    for t in ticks(lo, hi) {
        let x = sx(t);
        let _ = writeln!(
            s,
            "<line x1=\"{x:.2}\" y1=\"{y}\" x2=\"{x:.2}\" y2=\"{:.1}\" stroke=\"black\"/><text x=\"{x:.2}\" y=\"{:.1}\" text-anchor=\"middle\">{t:.4}</text>",
            y + 5.0,
            y + 20.0
        );
    }
    let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>", W / 2.0, y + 40.0, axis.name);
    for isl in islands {
        let e = &isl.extent[0];
        let (x0, x1) = (sx(e.lo.bound), sx(e.hi.bound));
        let width = (x1 - x0).max(1.5);
        let _ = writeln!(
            s,
            "<rect x=\"{x0:.2}\" y=\"{:.1}\" width=\"{width:.2}\" height=\"20\" fill=\"steelblue\"/><text x=\"{:.2}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            y - 30.0,
            x0 + width / 2.0,
            y - 36.0,
            isl.label
        );
    }
    s.push_str("</svg>\n");
    s
}

fn two_axes(region: &FeasibleRegion<f64>, islands: &[Island<f64>], title: &str) -> String {
    let h = 520.0;
    let (ax, ay) = (&region.axes[0], &region.axes[1]);
    let (nx, ny) = (ax.count(), ay.count());
    let (pw, ph) = (W - 2.0 * MARGIN, h - 2.0 * MARGIN);
    let (cw, ch) = (pw / nx as f64, ph / ny as f64);
    let px = |i: usize| MARGIN + i as f64 * cw;
    let py = |j: usize| h - MARGIN - (j + 1) as f64 * ch;
    let mut s = header(h, title);
    let _ = writeln!(
        s,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{pw:.2}\" height=\"{ph:.2}\" fill=\"none\" stroke=\"black\"/>"
    );
    let (xlo, xhi) = (ax.lo, ax.value(nx - 1));
    let (ylo, yhi) = (ay.lo, ay.value(ny - 1));
    for t in ticks(xlo, xhi) {
        let x = MARGIN + (t - xlo) / (xhi - xlo).max(f64::MIN_POSITIVE) * pw;
        let _ = writeln!(s, "<text x=\"{x:.2}\" y=\"{:.1}\" text-anchor=\"middle\">{t:.4}</text>", h - MARGIN + 18.0);
    }
    for t in ticks(ylo, yhi) {
        let y = h - MARGIN - (t - ylo) / (yhi - ylo).max(f64::MIN_POSITIVE) * ph;
        let _ = writeln!(s, "<text x=\"{:.1}\" y=\"{y:.2}\" text-anchor=\"end\">{t:.4}</text>", MARGIN - 6.0);
    }
    let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>", W / 2.0, h - 12.0, ax.name);
    let _ = writeln!(s, "<text x=\"14\" y=\"{:.2}\">{}</text>", h / 2.0, ay.name);
    let cells: BTreeSet<(usize, usize)> = region
        .points
        .iter()
        .filter(|p| p.feasible())
        .map(|p| (p.index[0], p.index[1]))
        .collect();
    for (i, j) in &cells {
        let _ = writeln!(
            s,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"steelblue\"/>",
            px(*i),
            py(*j),
            cw.max(0.5),
            ch.max(0.5)
        );
    }
    for isl in islands {
        let n = isl.points.len().max(1) as f64;
        let (mut ci, mut cj) = (0.0, 0.0);
        for &p in &isl.points {
            ci += region.points[p].index[0] as f64;
            cj += region.points[p].index[1] as f64;
        }
        let x = MARGIN + (ci / n + 0.5) * cw;
        let y = h - MARGIN - (cj / n + 0.5) * ch;
        let _ = writeln!(s, "<text x=\"{x:.2}\" y=\"{:.2}\" fill=\"darkred\">{}</text>", y - 4.0, isl.label);
    }
    s.push_str("</svg>\n");
    s
}
