//! Deterministic SVG pictures of tilings.
//!
//! A path-plane point `(t, h)` is drawn at `(t * sqrt(3)/2, top - (h - t/2))`
//! times the scale, which turns unit squares and their diagonals into
//! equilateral triangles. Coordinates are printed with three decimals.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoxDims, PathFamily};
use crate::tiling::{to_lozenges, LozengeKind};

/// Above this many lozenges along either axis the picture is coarse-grained.
pub const DEFAULT_MAX_CELLS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Palette {
    #[default]
    Classic,
    Gray,
}

impl Palette {
    /// Fills for horizontal, flat and rising lozenges.
    pub fn fills(self) -> [[u8; 3]; 3] {
        match self {
            Palette::Classic => [[0xe8, 0xc5, 0x47], [0x3b, 0x6e, 0xa8], [0xc8, 0x4b, 0x31]],
            Palette::Gray => [[0xf0, 0xf0, 0xf0], [0x90, 0x90, 0x90], [0x40, 0x40, 0x40]],
        }
    }
}

impl FromStr for Palette {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classic" => Ok(Palette::Classic),
            "gray" | "grey" => Ok(Palette::Gray),
            other => Err(Error::Domain(format!("unknown palette {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderOptions {
    /// Length of a lozenge side in SVG units.
    pub scale: f64,
    pub palette: Palette,
    /// Draw the non-intersecting paths over the tiling.
    pub paths: bool,
    pub max_cells: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            scale: 10.0,
            palette: Palette::Classic,
            paths: false,
            max_cells: DEFAULT_MAX_CELLS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub svg: String,
    /// Side of the coarse-graining cell; `1` when every lozenge is drawn.
    pub downsample: usize,
}

struct Canvas {
    scale: f64,
    top: f64,
}

impl Canvas {
    fn new(dims: BoxDims, scale: f64) -> Self {
        Canvas {
            scale,
            top: dims.n as f64 + dims.s as f64 / 2.0,
        }
    }

    fn point(&self, t: f64, h: f64) -> (f64, f64) {
        let x = t * 3f64.sqrt() / 2.0 * self.scale;
        let y = (self.top - (h - t / 2.0)) * self.scale;
        (x, y)
    }

    fn size(&self, dims: BoxDims) -> (f64, f64) {
        let (w, _) = self.point(dims.t as f64, 0.0);
        let (_, h) = self.point((dims.t - dims.s) as f64, 0.0);
        (w, h)
    }
}

fn hex(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn push_polygon(d: &mut String, canvas: &Canvas, corners: &[(f64, f64)]) {
    for (i, &(t, h)) in corners.iter().enumerate() {
        let (x, y) = canvas.point(t, h);
        let _ = write!(d, "{}{x:.3} {y:.3}", if i == 0 { "M" } else { "L" });
    }
    d.push('Z');
}

fn kind_index(k: LozengeKind) -> usize {
    match k {
        LozengeKind::Horizontal => 0,
        LozengeKind::Flat => 1,
        LozengeKind::Rising => 2,
    }
}

/// Hexagon boundary in the path plane, counter-clockwise from the origin.
pub fn hexagon_corners(dims: BoxDims) -> [(i64, i64); 6] {
    let (a, b, c) = dims.sides();
    [(0, 0), (a, 0), (a + b, b), (a + b, b + c), (b, b + c), (0, c)]
}

/// SVG picture of the tiling of `pf`.
pub fn render_svg(pf: &PathFamily, opts: &RenderOptions) -> Result<Rendered> {
    if !(opts.scale.is_finite() && opts.scale > 0.0) {
        return Err(Error::Domain(format!("scale must be positive, got {}", opts.scale)));
    }
    if opts.max_cells == 0 {
        return Err(Error::Domain("max_cells must be positive".into()));
    }
    let tiling = to_lozenges(pf)?;
    let dims = tiling.dims;
    let canvas = Canvas::new(dims, opts.scale);
    let (w, h) = canvas.size(dims);
    let fills = opts.palette.fills();
    let extent = dims.t.max(dims.n + dims.s) as usize;
    let k = extent.div_ceil(opts.max_cells).max(1);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.3}\" height=\"{h:.3}\" viewBox=\"0 0 {w:.3} {h:.3}\">"
    );
    let stroke = (opts.scale / 20.0).max(0.01);
    if k == 1 {
        let mut paths = [String::new(), String::new(), String::new()];
        for l in &tiling.lozenges {
            let corners = l.corners().map(|(t, h)| (t as f64, h as f64));
            push_polygon(&mut paths[kind_index(l.kind)], &canvas, &corners);
        }
        for (d, (fill, name)) in paths.iter().zip(fills.iter().zip(["horizontal", "flat", "rising"])) {
            if d.is_empty() {
                continue;
            }
            let _ = writeln!(
                svg,
                "<path class=\"{name}\" fill=\"{}\" stroke=\"#000000\" stroke-width=\"{stroke:.3}\" d=\"{d}\"/>",
                hex(*fill)
            );
        }
    } else {
        let cols = (dims.t as usize).div_ceil(k);
        let rows = ((dims.n + dims.s) as usize).div_ceil(k) + 1;
        let mut counts = vec![[0u32; 3]; cols.max(1) * rows];
        for l in &tiling.lozenges {
            let c = (l.t.max(0) as usize / k).min(cols.saturating_sub(1));
            let r = (l.x.max(0) as usize / k).min(rows - 1);
            counts[r * cols.max(1) + c][kind_index(l.kind)] += 1;
        }
        for r in 0..rows {
            for c in 0..cols {
                let n = counts[r * cols + c];
                let total: u32 = n.iter().sum();
                if total == 0 {
                    continue;
                }
                let mut rgb = [0u8; 3];
                for (ch, v) in rgb.iter_mut().enumerate() {
                    let s: u32 = (0..3).map(|i| n[i] * u32::from(fills[i][ch])).sum();
                    *v = ((s + total / 2) / total) as u8;
                }
                let (t0, h0, kf) = ((c * k) as f64, (r * k) as f64, k as f64);
                let mut d = String::new();
                push_polygon(&mut d, &canvas, &[(t0, h0), (t0 + kf, h0), (t0 + kf, h0 + kf), (t0, h0 + kf)]);
                let _ = writeln!(svg, "<path fill=\"{}\" d=\"{d}\"/>", hex(rgb));
            }
        }
    }
    let mut outline = String::new();
    push_polygon(
        &mut outline,
        &canvas,
        &hexagon_corners(dims).map(|(t, h)| (t as f64, h as f64)),
    );
    let _ = writeln!(
        svg,
        "<path class=\"outline\" fill=\"none\" stroke=\"#000000\" stroke-width=\"{:.3}\" d=\"{outline}\"/>",
        2.0 * stroke
    );
    if opts.paths {
        let step = k as i64;
        for i in 0..dims.n as usize {
            let mut pts = String::new();
            let mut time = 0;
            loop {
                let x = pf.section(time as usize)[i];
                let (px, py) = canvas.point(time as f64, x as f64 + 0.5);
                let _ = write!(pts, "{}{px:.3},{py:.3}", if time == 0 { "" } else { " " });
                if time == dims.t {
                    break;
                }
                time = (time + step).min(dims.t);
            }
            let _ = writeln!(
                svg,
                "<polyline class=\"path\" fill=\"none\" stroke=\"#ffffff\" stroke-width=\"{:.3}\" points=\"{pts}\"/>",
                2.0 * stroke
            );
        }
    }
    svg.push_str("</svg>\n");
    Ok(Rendered { svg, downsample: k })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_box_has_only_flat_lozenges() {
        let pf = PathFamily::flat(2, 3).unwrap();
        let r = render_svg(&pf, &RenderOptions::default()).unwrap();
        assert_eq!(r.downsample, 1);
        assert!(r.svg.contains("class=\"flat\""));
        assert!(!r.svg.contains("class=\"rising\""));
        assert!(!r.svg.contains("class=\"horizontal\""));
        assert_eq!(r.svg.matches('Z').count(), 6 + 1);
    }

    #[test]
    fn regular_hexagon_outline() {
        let dims = BoxDims::new(1, 2, 1).unwrap();
        let canvas = Canvas::new(dims, 1.0);
        let pts: Vec<(f64, f64)> = hexagon_corners(dims)
            .iter()
            .map(|&(t, h)| canvas.point(t as f64, h as f64))
            .collect();
        for i in 0..6 {
            let (a, b) = (pts[i], pts[(i + 1) % 6]);
            let len = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
            assert!((len - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn coarse_grains_large_boxes() {
        let pf = PathFamily::lowest(BoxDims::new(6, 10, 4).unwrap()).unwrap();
        let opts = RenderOptions {
            max_cells: 4,
            paths: true,
            ..RenderOptions::default()
        };
        let r = render_svg(&pf, &opts).unwrap();
        assert_eq!(r.downsample, 3);
        assert_eq!(r.svg, render_svg(&pf, &opts).unwrap().svg);
    }

    #[test]
    fn rejects_bad_scale() {
        let pf = PathFamily::flat(1, 1).unwrap();
        let opts = RenderOptions {
            scale: 0.0,
            ..RenderOptions::default()
        };
        assert!(render_svg(&pf, &opts).is_err());
    }
}
