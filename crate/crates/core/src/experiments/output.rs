//! CSV and SVG serialization of run results.

use std::fmt::Write as _;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{KdnlsError, Result};

pub const TRAJECTORY_COLUMNS: [&str; 7] = [
    "t",
    "l2_sq",
    "h1",
    "hs",
    "dissipation_integrand",
    "l2_identity_residual",
    "tail_fraction",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Table cell: numbers in round-trip precision, everything else verbatim.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Text(x.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_f64(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

pub fn table_csv(headers: &[&str], rows: &[Vec<Cell>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| KdnlsError::Serialization(e.to_string());
    w.write_record(headers).map_err(err)?;
    for row in rows {
        if row.len() != headers.len() {
            return Err(KdnlsError::Serialization(format!(
                "row has {} cells, header has {}",
                row.len(),
                headers.len()
            )));
        }
        w.write_record(row.iter().map(Cell::render)).map_err(err)?;
    }
    w.into_inner()
        .map_err(|e| KdnlsError::Serialization(e.to_string()))
}

/// Trajectory CSV; the `hs` column is the first configured Sobolev index.
pub fn trajectory_csv(record: &DiagnosticsRecord) -> Result<Vec<u8>> {
    let hs = record.hs_norm.first().ok_or_else(|| {
        KdnlsError::Serialization("diagnostics record carries no H^s series".into())
    })?;
    let rows: Vec<Vec<Cell>> = (0..record.len())
        .map(|j| {
            vec![
                record.times[j].into(),
                record.l2_sq[j].into(),
                record.h1_norm[j].into(),
                hs[j].into(),
                record.dissipation_integrand[j].into(),
                record.l2_identity_residual[j].into(),
                record.tail_fraction[j].into(),
            ]
        })
        .collect();
    table_csv(&TRAJECTORY_COLUMNS, &rows)
}

/// Minimal SVG line chart. Convenience output only.
pub fn line_plot_svg(title: &str, x_label: &str, x: &[f64], series: &[(&str, &[f64])]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 50.0;
    const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let finite = |v: &&f64| v.is_finite();
    let (x_lo, x_hi) = bounds(x.iter().filter(finite).copied());
    let (y_lo, y_hi) = bounds(series.iter().flat_map(|(_, ys)| ys.iter().filter(finite).copied()));
    let sx = |v: f64| PAD + (v - x_lo) / (x_hi - x_lo) * (W - 2.0 * PAD);
    let sy = |v: f64| H - PAD - (v - y_lo) / (y_hi - y_lo) * (H - 2.0 * PAD);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="20" text-anchor="middle">{title}</text>"#, W / 2.0);
    let _ = writeln!(
        svg,
        r#"<path d="M{PAD} {PAD} V{} H{}" stroke="black" fill="none"/>"#,
        H - PAD,
        W - PAD
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#, W / 2.0, H - 15.0);
    let _ = writeln!(svg, r#"<text x="{PAD}" y="{}" text-anchor="middle">{}</text>"#, H - PAD + 15.0, short(x_lo));
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W - PAD, H - PAD + 15.0, short(x_hi));
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, PAD - 4.0, H - PAD, short(y_lo));
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, PAD - 4.0, PAD + 4.0, short(y_hi));
    for (i, (name, ys)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> = x
            .iter()
            .zip(ys.iter())
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(&a, &b)| format!("{:.2},{:.2}", sx(a), sy(b)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            points.join(" ")
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" fill="{color}">{name}</text>"#,
            W - PAD - 120.0,
            PAD + 15.0 * (i as f64 + 1.0)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn short(x: f64) -> String {
    format!("{x:.3e}")
}
