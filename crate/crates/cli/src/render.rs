//! SVG mosaics of ellipse triples projected onto the XY plane.

use std::fmt::Write;

use elliptic_links::{Ellipse, PairTag, TripleReport, TripleVerdict, Result};
use elliptic_links::triple::PAIRS;

#[derive(Debug, Clone)]
pub struct MosaicStyle {
    pub cols: usize,
    pub tile: f64,
    pub stroke_width: f64,
    /// Samples per ellipse outline.
    pub points: usize,
    pub unlinked: &'static str,
    pub hopf: &'static str,
    pub borromean: &'static str,
    pub degenerate: &'static str,
}

pub const MIN_POINTS: usize = 90;

impl MosaicStyle {
    pub fn for_count(count: usize) -> Self {
        MosaicStyle {
            cols: (count as f64).sqrt().ceil().max(1.0) as usize,
            tile: 100.0,
            stroke_width: 1.0,
            points: 120,
            unlinked: "#000000",
            hopf: "#d62728",
            borromean: "#1f5fbf",
            degenerate: "#999999",
        }
    }
}

/// Outline colors for the three ellipses of a classified triple.
pub fn colors<'a>(style: &'a MosaicStyle, outcome: &Result<TripleReport>) -> [&'a str; 3] {
    let report = match outcome {
        Ok(r) => r,
        Err(_) => return [style.degenerate; 3],
    };
    if report.verdict == TripleVerdict::Borromean {
        return [style.borromean; 3];
    }
    let mut out = [style.unlinked; 3];
    for (pair, class) in PAIRS.iter().zip(report.pairs.iter()) {
        if class.tag == PairTag::Hopf {
            out[pair.0] = style.hopf;
            out[pair.1] = style.hopf;
        }
    }
    out
}

/// Renders one tile per triple, row-major, with a shared scale so tiles are
/// comparable.
pub fn render(triples: &[[Ellipse; 3]], outcomes: &[Result<TripleReport>], style: &MosaicStyle) -> String {
    let outlines: Vec<[Vec<(f64, f64)>; 3]> = triples
        .iter()
        .map(|t| t.each_ref().map(|e| outline(e, style.points)))
        .collect();
    let extent = outlines
        .iter()
        .flatten()
        .flatten()
        .fold(1e-12f64, |m, (x, y)| m.max(x.abs()).max(y.abs()));
    let scale = 0.45 * style.tile / extent;

    let cols = style.cols.max(1);
    let rows = triples.len().div_ceil(cols).max(1);
    let (width, height) = (cols as f64 * style.tile, rows as f64 * style.tile);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    for (k, (shapes, outcome)) in outlines.iter().zip(outcomes).enumerate() {
        let cx = (k % cols) as f64 * style.tile + 0.5 * style.tile;
        let cy = (k / cols) as f64 * style.tile + 0.5 * style.tile;
        let _ = writeln!(svg, r#"<g id="tile-{k}">"#);
        for (shape, color) in shapes.iter().zip(colors(style, outcome)) {
            let mut d = String::new();
            for (i, (x, y)) in shape.iter().enumerate() {
                let cmd = if i == 0 { 'M' } else { 'L' };
                // SVG y grows downwards.
                let _ = write!(d, "{cmd}{:.3} {:.3} ", cx + scale * x, cy - scale * y);
            }
            d.push('Z');
            let _ = writeln!(
                svg,
                r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="{}"/>"#,
                style.stroke_width
            );
        }
        let _ = writeln!(svg, "</g>");
    }
    svg.push_str("</svg>\n");
    svg
}

fn outline(e: &Ellipse, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|k| {
            let p = e.point_at(std::f64::consts::TAU * k as f64 / n as f64);
            (p.x, p.y)
        })
        .collect()
}
