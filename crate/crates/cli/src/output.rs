//! CSV and SVG emission of sweep tables.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use ringabs_core::table::{Axis, Cell, SweepTable, ValueKind};

use crate::error::CliError;

pub const UNITS_LINE: &str = "# units: rates in Gamma0, lengths in lambda0";
pub const DIVERGENT: &str = "divergent";

pub fn number(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_string(table: &SweepTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# table: {}", table.name);
    out.push_str(UNITS_LINE);
    out.push('\n');
    for (k, v) in &table.metadata {
        let _ = writeln!(out, "# {k}: {v}");
    }
    let mut header: Vec<&str> = table.key_columns.iter().map(String::as_str).collect();
    header.push(&table.value_column);
    out.push_str(&header.join(","));
    out.push('\n');
    for row in &table.rows {
        let mut fields: Vec<String> = row.keys.iter().map(|&k| number(k)).collect();
        fields.push(match &row.value {
            Cell::Value(v) => number(*v),
            Cell::Divergent(_) => DIVERGENT.to_string(),
        });
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    }
    let mut f = fs::File::create(path)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn emit_csv(table: &SweepTable, path: &Path) -> Result<(), CliError> {
    write_file(path, &csv_string(table))
}

pub fn emit_heatmap(table: &SweepTable, path: &Path) -> Result<(), CliError> {
    let svg = heatmap_svg(table)
        .ok_or_else(|| CliError::Usage(format!("table {} is not a 2-D grid", table.name)))?;
    write_file(path, &svg)
}

const VIRIDIS: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

/// Colour for t in [0, 1] (clamped).
pub fn colour(t: f64) -> String {
    let t = if t.is_finite() {
        t.clamp(0.0, 1.0)
    } else {
        0.0
    };
    let x = t * (VIRIDIS.len() - 1) as f64;
    let i = (x.floor() as usize).min(VIRIDIS.len() - 2);
    let f = x - i as f64;
    let (a, b) = (VIRIDIS[i], VIRIDIS[i + 1]);
    let mix = |p: f64, q: f64| (p + f * (q - p)).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(a.0, b.0),
        mix(a.1, b.1),
        mix(a.2, b.2)
    )
}

pub fn colour_range(table: &SweepTable) -> (f64, f64) {
    match table.kind {
        ValueKind::CoherentAbsorption => (0.0, 0.25),
        ValueKind::IncoherentAbsorption => (0.0, 1.0),
        ValueKind::Ratio | ValueKind::Other => {
            let (lo, hi) = table
                .values()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
                    (l.min(v), h.max(v))
                });
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if hi > lo {
                (lo, hi)
            } else {
                (lo, lo + 1.0)
            }
        }
    }
}

const PLOT: f64 = 400.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 30.0;

/// Offset of grid value `v` along an axis of `len` pixels, cell centres at
/// (i + 1/2)/n.
fn axis_position(axis: &Axis, v: f64, len: f64) -> f64 {
    let n = axis.values.len();
    let (a, b) = (axis.values[0], axis.values[n - 1]);
    let frac = if n == 1 || a == b {
        0.0
    } else if axis.log {
        (v.log10() - a.log10()) / (b.log10() - a.log10())
    } else {
        (v - a) / (b - a)
    };
    (0.5 + frac * (n - 1) as f64) / n as f64 * len
}

fn ticks(axis: &Axis) -> Vec<f64> {
    let n = axis.values.len();
    let (a, b) = (axis.values[0], axis.values[n - 1]);
    if axis.log && a > 0.0 {
        let (lo, hi) = (a.log10().ceil() as i32, b.log10().floor() as i32);
        (lo..=hi).map(|k| 10f64.powi(k)).collect()
    } else if n > 1 {
        vec![a, 0.5 * (a + b), b]
    } else {
        vec![a]
    }
}

fn label(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e3) {
        format!("1e{}", v.log10().round() as i32)
    } else {
        format!("{}", (v * 1e4).round() / 1e4)
    }
}

pub fn heatmap_svg(table: &SweepTable) -> Option<String> {
    let (a1, a2) = table.grid.as_ref()?;
    let (n1, n2) = (a1.values.len(), a2.values.len());
    if n1 == 0 || n2 == 0 || table.rows.len() != n1 * n2 {
        return None;
    }
    let (lo, hi) = colour_range(table);
    let (cw, ch) = (PLOT / n1 as f64, PLOT / n2 as f64);
    let mut s = String::new();
    let width = LEFT + PLOT + 110.0;
    let height = TOP + PLOT + 60.0;
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    s.push_str(
        r##"<defs><pattern id="hatch" width="6" height="6" patternUnits="userSpaceOnUse" patternTransform="rotate(45)"><rect width="6" height="6" fill="#ffffff"/><line x1="0" y1="0" x2="0" y2="6" stroke="#d00000" stroke-width="2"/></pattern></defs>"##,
    );
    s.push('\n');
    let _ = writeln!(
        s,
        r#"<text x="{}" y="18" text-anchor="middle">{}</text>"#,
        LEFT + PLOT / 2.0,
        table.name
    );
    for i in 0..n1 {
        for j in 0..n2 {
            let x = LEFT + i as f64 * cw;
            let y = TOP + PLOT - (j + 1) as f64 * ch;
            let fill = match table.at(i, j)? {
                Cell::Value(v) => colour((v - lo) / (hi - lo)),
                Cell::Divergent(_) => "url(#hatch)".to_string(),
            };
            let _ = writeln!(
                s,
                r#"<rect x="{x:.3}" y="{y:.3}" width="{:.3}" height="{:.3}" fill="{fill}"/>"#,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{PLOT}" height="{PLOT}" fill="none" stroke="black"/>"#
    );
    for t in ticks(a1) {
        let x = LEFT + axis_position(a1, t, PLOT);
        let y = TOP + PLOT;
        let _ = writeln!(
            s,
            r#"<line x1="{x:.3}" y1="{y}" x2="{x:.3}" y2="{}" stroke="black"/><text x="{x:.3}" y="{}" text-anchor="middle">{}</text>"#,
            y + 5.0,
            y + 18.0,
            label(t)
        );
    }
    for t in ticks(a2) {
        let y = TOP + PLOT - axis_position(a2, t, PLOT);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y:.3}" x2="{LEFT}" y2="{y:.3}" stroke="black"/><text x="{}" y="{:.3}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            label(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + PLOT / 2.0,
        TOP + PLOT + 40.0,
        a1.name
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>"#,
        TOP + PLOT / 2.0,
        TOP + PLOT / 2.0,
        a2.name
    );
    let bar_x = LEFT + PLOT + 25.0;
    let steps = 50;
    for k in 0..steps {
        let t = (k as f64 + 0.5) / steps as f64;
        let y = TOP + PLOT * (1.0 - (k + 1) as f64 / steps as f64);
        let _ = writeln!(
            s,
            r#"<rect x="{bar_x}" y="{y:.3}" width="18" height="{:.3}" fill="{}"/>"#,
            PLOT / steps as f64 + 0.05,
            colour(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}">{}</text><text x="{}" y="{}">{}</text><text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        bar_x + 22.0,
        TOP + PLOT,
        label(lo),
        bar_x + 22.0,
        TOP + 10.0,
        label(hi),
        bar_x + 9.0,
        TOP + PLOT + 40.0,
        table.value_column
    );
    s.push_str("</svg>\n");
    Some(s)
}
