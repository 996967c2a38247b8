//! Planar polygons approximating puzzle pieces.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const CHUNK: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub points: Vec<Complex64>,
    /// Bounding boxes of runs of `CHUNK` consecutive edges.
    #[serde(skip)]
    chunks: Vec<(Complex64, Complex64)>,
}

impl Polygon {
    pub fn new(points: Vec<Complex64>) -> Self {
        let n = points.len();
        let chunks = (0..n.div_ceil(CHUNK))
            .map(|c| {
                let end = ((c + 1) * CHUNK).min(n);
                let mut run: Vec<Complex64> = points[c * CHUNK..end].to_vec();
                run.push(points[end % n]);
                bbox(&run)
            })
            .collect();
        Polygon { points, chunks }
    }

    fn edge_runs(&self) -> Vec<(usize, usize, Option<(Complex64, Complex64)>)> {
        let n = self.points.len();
        if self.chunks.is_empty() {
            return vec![(0, n, None)];
        }
        self.chunks.iter().enumerate().map(|(c, b)| (c * CHUNK, ((c + 1) * CHUNK).min(n), Some(*b))).collect()
    }

    /// Even-odd crossing test.
    pub fn contains(&self, z: Complex64) -> bool {
        let pts = &self.points;
        let n = pts.len();
        let mut inside = false;
        for (start, end, b) in self.edge_runs() {
            if let Some((lo, hi)) = b {
                if z.im < lo.im || z.im > hi.im {
                    continue;
                }
            }
            for i in start..end {
                let (a, b) = (pts[i], pts[(i + 1) % n]);
                if (a.im > z.im) != (b.im > z.im) {
                    let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
                    if z.re < x {
                        inside = !inside;
                    }
                }
            }
        }
        inside
    }

    /// Distance from `z` to the boundary.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        let n = self.points.len();
        let mut best = f64::INFINITY;
        for (start, end, b) in self.edge_runs() {
            if let Some((lo, hi)) = b {
                let dx = (lo.re - z.re).max(z.re - hi.re).max(0.0);
                let dy = (lo.im - z.im).max(z.im - hi.im).max(0.0);
                if dx.hypot(dy) >= best {
                    continue;
                }
            }
            for i in start..end {
                best = best.min(segment_distance(z, self.points[i], self.points[(i + 1) % n]));
            }
        }
        best
    }

    pub fn bbox(&self) -> (Complex64, Complex64) {
        bbox(&self.points)
    }

    /// Signed area (positive for counterclockwise boundaries).
    pub fn signed_area(&self) -> f64 {
        let n = self.points.len();
        let mut s = 0.0;
        for i in 0..n {
            let (a, b) = (self.points[i], self.points[(i + 1) % n]);
            s += a.re * b.im - b.re * a.im;
        }
        s / 2.0
    }

    pub fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let n = self.points.len();
        (0..n).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }
}

pub fn bbox(points: &[Complex64]) -> (Complex64, Complex64) {
    let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo.re = lo.re.min(p.re);
        lo.im = lo.im.min(p.im);
        hi.re = hi.re.max(p.re);
        hi.im = hi.im.max(p.im);
    }
    (lo, hi)
}

pub fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn segments_cross(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let cross = |o: Complex64, p: Complex64, q: Complex64| (p - o).re * (q - o).im - (p - o).im * (q - o).re;
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0)
}

fn segment_segment_distance(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> f64 {
    if segments_cross(a, b, c, d) {
        return 0.0;
    }
    segment_distance(a, c, d)
        .min(segment_distance(b, c, d))
        .min(segment_distance(c, a, b))
        .min(segment_distance(d, a, b))
}

/// Minimal distance between two closed polygon boundaries.
pub fn boundary_gap(p: &Polygon, q: &Polygon) -> f64 {
    let qs: Vec<(Complex64, Complex64, Complex64, Complex64)> = q
        .segments()
        .map(|(c, d)| {
            let (lo, hi) = bbox(&[c, d]);
            (c, d, lo, hi)
        })
        .collect();
    let mut best = f64::INFINITY;
    for (a, b) in p.segments() {
        let (lo, hi) = bbox(&[a, b]);
        for &(c, d, lo2, hi2) in &qs {
            // box separation is a lower bound for the segment distance
            let dx = (lo2.re - hi.re).max(lo.re - hi2.re).max(0.0);
            let dy = (lo2.im - hi.im).max(lo.im - hi2.im).max(0.0);
            if dx.hypot(dy) >= best {
                continue;
            }
            best = best.min(segment_segment_distance(a, b, c, d));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(s: f64, off: f64) -> Polygon {
        Polygon::new(vec![
            Complex64::new(off, off),
            Complex64::new(off + s, off),
            Complex64::new(off + s, off + s),
            Complex64::new(off, off + s),
        ])
    }

    #[test]
    fn containment_and_distance() {
        let p = square(2.0, -1.0);
        assert!(p.contains(Complex64::new(0.0, 0.0)));
        assert!(!p.contains(Complex64::new(1.5, 0.0)));
        assert!((p.boundary_distance(Complex64::new(0.0, 0.5)) - 0.5).abs() < 1e-15);
        assert!((p.signed_area() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn gaps() {
        let outer = square(4.0, -2.0);
        let inner = square(2.0, -1.0);
        assert!((boundary_gap(&outer, &inner) - 1.0).abs() < 1e-12);
        let shifted = square(2.0, 1.0);
        assert_eq!(boundary_gap(&outer, &shifted), 0.0);
    }

    #[test]
    fn chunked_circle() {
        let n = 1000;
        let pts = (0..n)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64))
            .collect();
        let p = Polygon::new(pts);
        for k in 0..200 {
            let z = Complex64::from_polar(0.01 * k as f64, 0.37 * k as f64);
            assert_eq!(p.contains(z), z.norm() < 1.0, "{z}");
            assert!((p.boundary_distance(z) - (1.0 - z.norm()).abs()).abs() < 1e-4, "{z}");
        }
    }
}
