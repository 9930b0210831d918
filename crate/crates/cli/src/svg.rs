//! Minimal SVG 1.1 output: heatmaps for tables, scatter plots for projections.

use std::collections::BTreeMap;
use std::fmt::Write;

use ent2vec::metrics::format_sig;
use ent2vec::{AnalysisTable, Entity, Projection2D, TableKind};

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn header(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">
<rect width="100%" height="100%" fill="white"/>"#
    );
}

/// White-to-blue ramp; `t` in [0, 1].
fn ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let channel = |lo: f64, hi: f64| (lo + (hi - lo) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", channel(247.0, 8.0), channel(251.0, 48.0), channel(255.0, 107.0))
}

/// Colored cell grid with row/column labels and the value printed in each
/// cell. Missing cells are grey and left blank.
pub fn heatmap(table: &AnalysisTable, title: &str) -> String {
    const CELL_W: f64 = 64.0;
    const CELL_H: f64 = 24.0;
    const LEFT: f64 = 110.0;
    const TOP: f64 = 60.0;
    let (rows, cols) = (table.rows(), table.cols());
    let width = LEFT + CELL_W * cols as f64 + 20.0;
    let height = TOP + CELL_H * rows as f64 + 20.0;

    let present: Vec<f64> = table.values().iter().flatten().copied().collect();
    let lo = present.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = present.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };

    let mut out = String::new();
    header(&mut out, width, height);
    let _ = writeln!(out, r#"<text x="{LEFT}" y="20" font-size="14">{}</text>"#, escape(title));
    for (c, label) in table.col_labels.iter().enumerate() {
        let x = LEFT + CELL_W * (c as f64 + 0.5);
        let _ = writeln!(
            out,
            r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#,
            TOP - 8.0,
            escape(label)
        );
    }
    for (r, label) in table.row_labels.iter().enumerate() {
        let y = TOP + CELL_H * r as f64;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + CELL_H * 0.65,
            escape(label)
        );
        for c in 0..cols {
            let x = LEFT + CELL_W * c as f64;
            match table.get(r, c) {
                Some(v) => {
                    let t = (v - lo) / span;
                    let ink = if t > 0.6 { "white" } else { "black" };
                    let text = if table.kind == TableKind::PreferenceRank {
                        format!("{}", v as i64)
                    } else {
                        format_sig(v, 3)
                    };
                    let _ = writeln!(
                        out,
                        r#"<rect x="{x}" y="{y}" width="{CELL_W}" height="{CELL_H}" fill="{}" stroke="white"/><text x="{}" y="{}" text-anchor="middle" fill="{ink}">{text}</text>"#,
                        ramp(t),
                        x + CELL_W / 2.0,
                        y + CELL_H * 0.65
                    );
                }
                None => {
                    let _ = writeln!(
                        out,
                        r##"<rect x="{x}" y="{y}" width="{CELL_W}" height="{CELL_H}" fill="#dddddd" stroke="white"/>"##
                    );
                }
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Languages as squares, task-years as circles colored by category and
/// labelled with their year.
pub fn scatter(projection: &Projection2D, title: &str) -> String {
    const SIZE: f64 = 640.0;
    const MARGIN: f64 = 40.0;
    let xs = projection.points.iter().map(|p| p[0]);
    let ys = projection.points.iter().map(|p| p[1]);
    let (x0, x1) = (xs.clone().fold(f64::INFINITY, f64::min), xs.fold(f64::NEG_INFINITY, f64::max));
    let (y0, y1) = (ys.clone().fold(f64::INFINITY, f64::min), ys.fold(f64::NEG_INFINITY, f64::max));
    let scale = (SIZE - 2.0 * MARGIN) / (x1 - x0).max(y1 - y0).max(1e-12);
    let map = |p: [f64; 2]| (MARGIN + (p[0] - x0) * scale, SIZE - MARGIN - (p[1] - y0) * scale);

    let entities: Vec<Option<Entity>> = projection.labels.iter().map(|l| Entity::parse(l)).collect();
    let colors: BTreeMap<&str, &str> = {
        let mut cats: Vec<&str> = entities
            .iter()
            .filter_map(|e| match e {
                Some(Entity::TaskYear { category, .. }) => Some(category.as_str()),
                _ => None,
            })
            .collect();
        cats.sort_unstable();
        cats.dedup();
        cats.into_iter().zip(PALETTE.iter().cycle().copied()).collect()
    };

    let mut out = String::new();
    header(&mut out, SIZE, SIZE + 20.0 * (colors.len() as f64 / 4.0).ceil());
    let _ = writeln!(out, r#"<text x="{MARGIN}" y="20" font-size="14">{}</text>"#, escape(title));
    for ((point, label), entity) in projection.points.iter().zip(&projection.labels).zip(&entities) {
        let (x, y) = map(*point);
        match entity {
            Some(Entity::TaskYear { category, year }) => {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="{}"><title>{}</title></circle><text x="{:.2}" y="{:.2}" font-size="9">{year}</text>"#,
                    colors[category.as_str()],
                    escape(label),
                    x + 6.0,
                    y + 3.0
                );
            }
            _ => {
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="black"><title>{}</title></rect><text x="{:.2}" y="{:.2}" font-weight="bold">{}</text>"#,
                    x - 5.0,
                    y - 5.0,
                    escape(label),
                    x + 7.0,
                    y + 4.0,
                    escape(label)
                );
            }
        }
    }
    for (i, (cat, color)) in colors.iter().enumerate() {
        let x = MARGIN + 150.0 * (i % 4) as f64;
        let y = SIZE + 20.0 * (i / 4) as f64;
        let _ = writeln!(
            out,
            r#"<circle cx="{x}" cy="{}" r="5" fill="{color}"/><text x="{}" y="{y}">{}</text>"#,
            y - 4.0,
            x + 9.0,
            escape(cat)
        );
    }
    out.push_str("</svg>\n");
    out
}
