use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::record::{sort_records, SweepRecord};
use super::summary::SeedBand;
use crate::error::{Error, Result};

const PANEL_W: f64 = 280.0;
const PANEL_H: f64 = 210.0;
const LEFT: f64 = 48.0;
const RIGHT: f64 = 12.0;
const TOP: f64 = 28.0;
const BOTTOM: f64 = 36.0;

struct Panel {
    d: usize,
    n: usize,
    /// (c, seed band of the risk), sorted by c.
    points: Vec<(f64, SeedBand)>,
}

fn panels(records: &[SweepRecord]) -> Result<Vec<Panel>> {
    let mut groups: BTreeMap<(usize, usize), Vec<(f64, Vec<f64>)>> = BTreeMap::new();
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    for r in sorted.iter().filter(|r| r.is_clean()) {
        let Some(risk) = r.risk_mean else { continue };
        let cols = groups.entry((r.d, r.n)).or_default();
        match cols.iter_mut().find(|(c, _)| *c == r.c) {
            Some((_, vs)) => vs.push(risk),
            None => cols.push((r.c, vec![risk])),
        }
    }
    if groups.is_empty() {
        return Err(Error::InvalidInput("no usable records to plot".into()));
    }
    let mut out = Vec::new();
    for ((d, n), mut cols) in groups {
        if cols.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "d={d} n={n}: a risk curve needs at least two bandwidths"
            )));
        }
        cols.sort_by(|a, b| a.0.total_cmp(&b.0));
        let points = cols
            .into_iter()
            .map(|(c, vs)| (c, SeedBand::from_values(&vs)))
            .collect();
        out.push(Panel { d, n, points });
    }
    Ok(out)
}

fn nice_ceiling(v: f64) -> f64 {
    if v <= 0.0 {
        return 1.0;
    }
    let step = 10f64.powf(v.log10().floor());
    (v / step).ceil() * step
}

/// Mean risk against c (log axis), one panel per (d, n), seed min–max band
/// shaded. Output depends only on the records.
pub fn render_risk_curves(records: &[SweepRecord]) -> Result<String> {
    let panels = panels(records)?;
    let mut ds: Vec<usize> = panels.iter().map(|p| p.d).collect();
    ds.dedup();
    let cols = ds
        .iter()
        .map(|d| panels.iter().filter(|p| p.d == *d).count())
        .max()
        .unwrap_or(1);
    let width = cols as f64 * PANEL_W;
    let height = ds.len() as f64 * PANEL_H;
    let y_max = nice_ceiling(
        panels
            .iter()
            .flat_map(|p| p.points.iter().map(|(_, b)| b.max))
            .fold(0.0, f64::max),
    );

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (row, d) in ds.iter().enumerate() {
        for (col, p) in panels.iter().filter(|p| p.d == *d).enumerate() {
            let x0 = col as f64 * PANEL_W + LEFT;
            let y0 = row as f64 * PANEL_H + TOP;
            draw_panel(&mut s, p, x0, y0, y_max);
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn draw_panel(s: &mut String, p: &Panel, x0: f64, y0: f64, y_max: f64) {
    let w = PANEL_W - LEFT - RIGHT;
    let h = PANEL_H - TOP - BOTTOM;
    let lo = p.points[0].0.log10();
    let hi = p.points[p.points.len() - 1].0.log10();
    let span = (hi - lo).max(1e-12);
    let px = |c: f64| x0 + (c.log10() - lo) / span * w;
    let py = |v: f64| y0 + h - v.clamp(0.0, y_max) / y_max * h;

    let _ = writeln!(s, r#"<g>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11">d = {}, n = {}</text>"#,
        x0 + w / 2.0,
        y0 - 10.0,
        p.d,
        p.n
    );
    let _ = writeln!(
        s,
        r##"<rect x="{x0:.2}" y="{y0:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="#444"/>"##
    );
    for i in 0..=4 {
        let v = y_max * i as f64 / 4.0;
        let y = py(v);
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="#444"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            x0 - 4.0,
            x0 - 6.0,
            y + 3.0,
            trim(v)
        );
    }
    for (c, _) in &p.points {
        let x = px(*c);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#444"/><text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="8">{}</text>"##,
            y0 + h,
            y0 + h + 4.0,
            y0 + h + 13.0,
            trim(*c)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">c</text>"#,
        x0 + w / 2.0,
        y0 + h + 28.0
    );

    let mut band = String::new();
    for (c, b) in &p.points {
        let _ = write!(band, "{:.2},{:.2} ", px(*c), py(b.max));
    }
    for (c, b) in p.points.iter().rev() {
        let _ = write!(band, "{:.2},{:.2} ", px(*c), py(b.min));
    }
    let _ = writeln!(
        s,
        r##"<polygon points="{}" fill="#4a7ab5" fill-opacity="0.25" stroke="none"/>"##,
        band.trim_end()
    );
    let line: Vec<String> = p
        .points
        .iter()
        .map(|(c, b)| format!("{:.2},{:.2}", px(*c), py(b.mean)))
        .collect();
    let _ = writeln!(
        s,
        r##"<polyline points="{}" fill="none" stroke="#1f4e8c" stroke-width="1.5"/>"##,
        line.join(" ")
    );
    for (c, b) in &p.points {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="#1f4e8c"/>"##,
            px(*c),
            py(b.mean)
        );
    }
    let _ = writeln!(s, "</g>");
}

/// Compact tick label: up to four significant digits, no trailing zeros.
fn trim(v: f64) -> String {
    let digits = if v == 0.0 { 0 } else { (3 - v.abs().log10().floor() as i32).max(0) as usize };
    let t = format!("{v:.digits$}");
    if t.contains('.') {
        t.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        t
    }
}

pub fn plot_risk_curves(records: &[SweepRecord], path: &Path) -> Result<()> {
    let svg = render_risk_curves(records)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::record::sample_record;

    fn records() -> Vec<SweepRecord> {
        let mut out = Vec::new();
        for d in [1, 3] {
            for c in [0.5, 2.0, 8.0] {
                for seed in 1..=2 {
                    out.push(SweepRecord {
                        d,
                        c,
                        seed,
                        risk_mean: Some(0.2 + 0.1 * seed as f64 + c / 40.0),
                        ..sample_record()
                    });
                }
            }
        }
        out
    }

    #[test]
    fn svg_is_deterministic_and_well_formed() {
        let a = render_risk_curves(&records()).unwrap();
        let mut shuffled = records();
        shuffled.reverse();
        assert_eq!(a, render_risk_curves(&shuffled).unwrap());
        assert!(a.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(a.contains("viewBox=\"0 0 280 420\""));
        assert_eq!(a.matches("<g>").count(), 2);
        assert_eq!(a.matches("<g>").count(), a.matches("</g>").count());
        assert!(a.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn single_bandwidth_is_rejected() {
        let one: Vec<_> = records().into_iter().filter(|r| r.c == 2.0).collect();
        let err = render_risk_curves(&one).unwrap_err();
        assert!(err.to_string().contains("at least two bandwidths"));
    }

    #[test]
    fn tick_labels() {
        assert_eq!(trim(0.0), "0");
        assert_eq!(trim(0.25), "0.25");
        assert_eq!(trim(32.0), "32");
        assert_eq!(trim(1280.0), "1280");
        assert_eq!(trim(0.123456), "0.1235");
    }
}
