//! Single-panel SVG line chart of `geo_mean_ratio` against `pass`.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};

use crate::experiment::ExperimentOutput;

pub const GENERATOR: &str = concat!("seglab ", env!("CARGO_PKG_VERSION"));

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub method: String,
    pub points: Vec<(f64, f64)>,
}

/// Reads aggregate CSVs; every file must carry the `pass,method,geo_mean_ratio`
/// header. Series keep their first-seen order.
pub fn read_series(paths: &[impl AsRef<Path>]) -> Result<Vec<Series>> {
    if paths.is_empty() {
        bail!("no input files");
    }
    let expected: Vec<&str> = ExperimentOutput::AGGREGATE_HEADER.split(',').collect();
    let mut series: Vec<Series> = Vec::new();
    for path in paths {
        let path = path.as_ref();
        let mut reader = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
        let header: Vec<String> = reader
            .headers()
            .with_context(|| format!("reading header of {}", path.display()))?
            .iter()
            .map(str::to_string)
            .collect();
        if header != expected {
            bail!("{}: header {:?} does not match {:?}", path.display(), header, expected);
        }
        for (line, row) in reader.records().enumerate() {
            let row = row.with_context(|| format!("{} row {}", path.display(), line + 2))?;
            let pass: f64 = row[0].parse().with_context(|| format!("{} row {}: pass", path.display(), line + 2))?;
            let ratio: f64 = row[2]
                .parse()
                .with_context(|| format!("{} row {}: geo_mean_ratio", path.display(), line + 2))?;
            let method = &row[1];
            match series.iter_mut().find(|s| s.method == method) {
                Some(s) => s.points.push((pass, ratio)),
                None => series.push(Series {
                    method: method.to_string(),
                    points: vec![(pass, ratio)],
                }),
            }
        }
    }
    if series.is_empty() {
        bail!("input has no data rows");
    }
    Ok(series)
}

fn nice_decades(lo: f64, hi: f64) -> (i32, i32) {
    let a = lo.log10().floor() as i32;
    let b = hi.log10().ceil() as i32;
    if a == b {
        (a, a + 1)
    } else {
        (a, b)
    }
}

/// Log-scaled y axis; non-finite and nonpositive values are not drawn.
pub fn render_svg(series: &[Series], title: &str) -> String {
    let (w, h) = (800.0, 500.0);
    let (left, right, top, bottom) = (80.0, 170.0, 40.0, 60.0);
    let drawable = |p: &&(f64, f64)| p.0.is_finite() && p.1.is_finite() && p.1 > 0.0;
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().filter(drawable).copied()).collect();
    let (xmin, xmax) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (ymin, ymax) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let (xmin, xmax) = if all.is_empty() { (0.0, 1.0) } else if xmax > xmin { (xmin, xmax) } else { (xmin, xmin + 1.0) };
    let (d0, d1) = if all.is_empty() { (0, 1) } else { nice_decades(ymin, ymax) };
    let pw = w - left - right;
    let ph = h - top - bottom;
    let sx = |x: f64| left + (x - xmin) / (xmax - xmin) * pw;
    let sy = |y: f64| top + (f64::from(d1) - y.log10()) / f64::from(d1 - d0) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, "<!-- generator: {GENERATOR} -->");
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, left + pw / 2.0, escape(title));
    let _ = writeln!(
        out,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let step = ((d1 - d0) as f64 / 10.0).ceil().max(1.0) as i32;
    let mut d = d0;
    while d <= d1 {
        let y = sy(10f64.powi(d));
        let _ = writeln!(
            out,
            r##"<line x1="{left}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"##,
            left + pw,
            left - 6.0,
            y + 4.0
        );
        d += step;
    }
    for k in 0..=4 {
        let x = xmin + (xmax - xmin) * f64::from(k) / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(x),
            top + ph + 18.0,
            x.round()
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">passes</text>"#,
        left + pw / 2.0,
        h - 16.0
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">geo-mean ratio</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(drawable)
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline data-method="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            escape(&s.method),
            pts.join(" ")
        );
        let ly = top + 16.0 + 18.0 * i as f64;
        let lx = left + pw + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&s.method)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
