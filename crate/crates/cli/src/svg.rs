//! SVG emission. Coordinates are printed at fixed precision so output is
//! byte-stable.

use std::fmt::Write;

use num_complex::Complex64;
use yoccoz_core::dynamics::QuadraticMap;
use yoccoz_core::puzzle::{Puzzle, PuzzleError};
use yoccoz_core::renorm::PrincipalNest;

use crate::molecule::Component;

const DEPTH_COLORS: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf"];
const BANDS: [&str; 9] = ["#000000", "#f7fbff", "#deebf7", "#c6dbef", "#9ecae1", "#6baed6", "#4292c6", "#2171b5", "#084594"];

/// A view window `[lo, hi]` rendered on a square pixel grid.
#[derive(Debug, Clone, Copy)]
pub struct View {
    pub lo: Complex64,
    pub hi: Complex64,
    pub pixels: usize,
}

impl View {
    pub fn square(center: Complex64, half: f64, pixels: usize) -> Self {
        let h = Complex64::new(half, half);
        View { lo: center - h, hi: center + h, pixels }
    }

    fn step(&self) -> (f64, f64) {
        ((self.hi.re - self.lo.re) / self.pixels as f64, (self.hi.im - self.lo.im) / self.pixels as f64)
    }
}

fn num(x: f64) -> String {
    let s = format!("{x:.5}");
    if s == "-0.00000" {
        "0.00000".into()
    } else {
        s
    }
}

fn header(v: &View, title: &str) -> String {
    let mut s = String::new();
    let (w, h) = (v.hi.re - v.lo.re, v.hi.im - v.lo.im);
    writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"{}\" height=\"{}\">",
        num(v.lo.re),
        num(-v.hi.im),
        num(w),
        num(h),
        v.pixels,
        v.pixels,
    )
    .unwrap();
    writeln!(s, "<title>{title}</title>").unwrap();
    s
}

/// Escape-time bands; 0 is the non-escaping set.
fn band(z0: Complex64, c: Complex64, max_iter: usize) -> usize {
    let mut z = z0;
    for i in 0..max_iter {
        if z.norm_sqr() > 4.0 {
            return 1 + ((i + 1) as f64).log2().floor().min(7.0) as usize;
        }
        z = z * z + c;
    }
    0
}

/// Rows of equal-band runs as `<rect>`s.
fn raster(v: &View, f: impl Fn(Complex64) -> usize) -> String {
    let (dx, dy) = v.step();
    let mut s = String::from("<g shape-rendering=\"crispEdges\">\n");
    for row in 0..v.pixels {
        let im = v.hi.im - (row as f64 + 0.5) * dy;
        let mut col = 0;
        while col < v.pixels {
            let b = f(Complex64::new(v.lo.re + (col as f64 + 0.5) * dx, im));
            let mut end = col + 1;
            while end < v.pixels && f(Complex64::new(v.lo.re + (end as f64 + 0.5) * dx, im)) == b {
                end += 1;
            }
            if b != 1 {
                writeln!(
                    s,
                    "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
                    num(v.lo.re + col as f64 * dx),
                    num(-(v.hi.im - row as f64 * dy)),
                    num((end - col) as f64 * dx),
                    num(dy),
                    BANDS[b]
                )
                .unwrap();
            }
            col = end;
        }
    }
    s.push_str("</g>\n");
    s
}

fn background(v: &View) -> String {
    format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
        num(v.lo.re),
        num(-v.hi.im),
        num(v.hi.re - v.lo.re),
        num(v.hi.im - v.lo.im),
        BANDS[1]
    )
}

fn path(points: &[Complex64], closed: bool) -> String {
    let mut d = String::new();
    for (i, p) in points.iter().enumerate() {
        write!(d, "{}{} {} ", if i == 0 { 'M' } else { 'L' }, num(p.re), num(-p.im)).unwrap();
    }
    if closed {
        d.push('Z');
    }
    d.trim_end().to_string()
}

fn marker(s: &mut String, z: Complex64, r: f64, fill: &str, label: &str) {
    writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{fill}\"><title>{label}</title></circle>", num(z.re), num(-z.im), num(r))
        .unwrap();
}

/// What to overlay on a Julia render.
pub struct Overlay<'a> {
    pub puzzle: &'a Puzzle,
    pub depth: usize,
    /// Points marked as `α`; their negatives are marked as `α′`.
    pub alpha: Vec<Complex64>,
    pub nest: Option<&'a PrincipalNest>,
}

/// Escape-time render of the filled Julia set with an optional puzzle.
pub fn julia(map: &QuadraticMap, view: &View, overlay: Option<&Overlay>) -> Result<String, PuzzleError> {
    let c = map.c;
    let mut s = header(view, &format!("Julia set of z^2 + ({}, {})", num(c.re), num(c.im)));
    s.push_str(&background(view));
    s.push_str(&raster(view, |z| band(z, c, 256)));
    let stroke = (view.hi.re - view.lo.re) / 400.0;
    if let Some(o) = overlay {
        let pz = o.puzzle;
        // stars of α at depth 1
        if pz.max_depth() >= 1 {
            for &a in &o.alpha {
                if let Some(v) = pz.find_vertex(a, 0) {
                    for i in pz.pieces_at_vertex(1, v) {
                        let poly = pz.polygon(1, i)?;
                        writeln!(s, "<path class=\"star\" d=\"{}\" fill=\"#ffd700\" fill-opacity=\"0.12\" stroke=\"none\"/>", path(&poly.points, true))
                            .unwrap();
                    }
                }
            }
        }
        for depth in 0..=o.depth.min(pz.max_depth()) {
            let color = DEPTH_COLORS[depth % DEPTH_COLORS.len()];
            writeln!(s, "<g class=\"depth-{depth}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{}\">", num(stroke)).unwrap();
            for i in 0..pz.piece_count(depth) {
                let poly = pz.polygon(depth, i)?;
                writeln!(s, "<path d=\"{}\"/>", path(&poly.points, true)).unwrap();
            }
            s.push_str("</g>\n");
        }
        if let Some(nest) = o.nest {
            writeln!(s, "<g class=\"nest\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"{}\">", num(3.0 * stroke)).unwrap();
            for level in &nest.levels {
                let d = level.depth();
                if d > pz.max_depth() {
                    continue;
                }
                let idx = pz.critical_index(d).expect("critical piece");
                writeln!(s, "<path d=\"{}\"/>", path(&pz.polygon(d, idx)?.points, true)).unwrap();
            }
            s.push_str("</g>\n");
        }
        for &a in &o.alpha {
            marker(&mut s, a, 3.0 * stroke, "#d62728", "alpha");
            marker(&mut s, -a, 3.0 * stroke, "#2ca02c", "alpha'");
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Escape-time render of the parameter plane with the component skeleton.
pub fn molecule(view: &View, components: &[Component]) -> String {
    let mut s = header(view, "Satellite chains of the main cardioid");
    s.push_str(&background(view));
    s.push_str(&raster(view, |c| band(Complex64::new(0.0, 0.0), c, 256)));
    let stroke = (view.hi.re - view.lo.re) / 500.0;
    for (i, comp) in components.iter().enumerate() {
        let color = DEPTH_COLORS[(comp.period - 1) % DEPTH_COLORS.len()];
        writeln!(s, "<g class=\"component\" id=\"component-{i}\" data-period=\"{}\">", comp.period).unwrap();
        writeln!(
            s,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{}\" stroke-dasharray=\"{} {}\"/>",
            num(comp.center.re),
            num(-comp.center.im),
            num(comp.radius),
            num(stroke),
            num(2.0 * stroke),
            num(2.0 * stroke)
        )
        .unwrap();
        writeln!(s, "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{}\"/>", path(&comp.boundary, true), num(stroke))
            .unwrap();
        marker(&mut s, comp.center, 1.5 * stroke, color, &format!("period {}", comp.period));
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_merge() {
        let v = View::square(Complex64::new(0.0, 0.0), 1.0, 8);
        let s = raster(&v, |z| if z.re < 0.0 { 0 } else { 1 });
        // one black run per row, the background band is not drawn
        assert_eq!(s.matches("<rect").count(), 8);
    }

    #[test]
    fn negative_zero_is_normalised() {
        assert_eq!(num(-0.0), "0.00000");
        assert_eq!(num(-1e-9), "0.00000");
    }
}
