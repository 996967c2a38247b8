//! Analytic and polygonal domain shapes.

use num_complex::Complex64;

use super::{Cell, DomainShape};
use crate::puzzle::geometry::{bbox, Polygon};

/// Parameter `s ∈ [0, 1]` where the segment `a → b` meets the circle `|z − c| = r`,
/// closest to `a`.
fn circle_hit(a: Complex64, b: Complex64, c: Complex64, r: f64) -> Option<f64> {
    let d = b - a;
    let f = a - c;
    let (qa, qb, qc) = (d.norm_sqr(), 2.0 * (f.re * d.re + f.im * d.im), f.norm_sqr() - r * r);
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 || qa == 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)].into_iter().filter(|s| (0.0..=1.0).contains(s)).reduce(f64::min)
}

/// `inner < |z − center| < outer`.
#[derive(Debug, Clone, Copy)]
pub struct RoundAnnulus {
    pub center: Complex64,
    pub inner: f64,
    pub outer: f64,
}

impl RoundAnnulus {
    pub fn new(center: Complex64, inner: f64, outer: f64) -> Self {
        RoundAnnulus { center, inner, outer }
    }

    pub fn exact_modulus(&self) -> f64 {
        (self.outer / self.inner).ln() / (2.0 * std::f64::consts::PI)
    }
}

impl DomainShape for RoundAnnulus {
    fn bbox(&self) -> (Complex64, Complex64) {
        let r = Complex64::new(self.outer, self.outer);
        (self.center - r, self.center + r)
    }
    fn classify(&self, z: Complex64) -> Cell {
        let d = (z - self.center).norm();
        if d <= self.inner {
            Cell::A
        } else if d >= self.outer {
            Cell::B
        } else {
            Cell::Interior
        }
    }
    fn crossing(&self, from: Complex64, to: Complex64) -> f64 {
        let r = if (to - self.center).norm() <= self.inner { self.inner } else { self.outer };
        circle_hit(from, to, self.center, r).unwrap_or(1.0)
    }
    fn label(&self) -> String {
        format!("round annulus {}<|z|<{}", self.inner, self.outer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `A` is the left side, `B` the right side.
    Horizontal,
    /// `A` is the bottom side, `B` the top side.
    Vertical,
}

/// `[0, width] × [0, height]` with two opposite sides as `A` and `B`.
#[derive(Debug, Clone, Copy)]
pub struct Rectangle {
    pub width: f64,
    pub height: f64,
    pub direction: Direction,
}

impl Rectangle {
    pub fn new(width: f64, height: f64, direction: Direction) -> Self {
        Rectangle { width, height, direction }
    }

    pub fn exact_distance(&self) -> f64 {
        match self.direction {
            Direction::Horizontal => self.width / self.height,
            Direction::Vertical => self.height / self.width,
        }
    }
}

impl DomainShape for Rectangle {
    fn bbox(&self) -> (Complex64, Complex64) {
        (Complex64::new(0.0, 0.0), Complex64::new(self.width, self.height))
    }
    fn classify(&self, z: Complex64) -> Cell {
        let (along, across, len, span) = match self.direction {
            Direction::Horizontal => (z.re, z.im, self.width, self.height),
            Direction::Vertical => (z.im, z.re, self.height, self.width),
        };
        if !(0.0..=span).contains(&across) {
            Cell::Excluded
        } else if along < 0.0 {
            Cell::A
        } else if along > len {
            Cell::B
        } else {
            Cell::Interior
        }
    }
    fn crossing(&self, from: Complex64, to: Complex64) -> f64 {
        let (a, b, len) = match self.direction {
            Direction::Horizontal => (from.re, to.re, self.width),
            Direction::Vertical => (from.im, to.im, self.height),
        };
        let edge = if b < 0.0 { 0.0 } else { len };
        ((edge - a) / (b - a)).clamp(0.0, 1.0)
    }
    fn label(&self) -> String {
        format!("rectangle {}x{}", self.width, self.height)
    }
}

/// Disjoint closed disks `K_i` (together `A`) inside the disk `V` (outside is `B`).
#[derive(Debug, Clone)]
pub struct DiskConfiguration {
    pub center: Complex64,
    pub radius: f64,
    pub disks: Vec<(Complex64, f64)>,
}

impl DiskConfiguration {
    /// Modulus of `V ∖ K_i` for a single disk, from the inversive distance of
    /// the two circles.
    pub fn single_modulus(&self, i: usize) -> f64 {
        let (c, r) = self.disks[i];
        let d = (c - self.center).norm();
        let x = (self.radius * self.radius + r * r - d * d) / (2.0 * self.radius * r);
        x.acosh() / (2.0 * std::f64::consts::PI)
    }

    pub fn only(&self, i: usize) -> DiskConfiguration {
        DiskConfiguration { disks: vec![self.disks[i]], ..self.clone() }
    }
}

impl DomainShape for DiskConfiguration {
    fn bbox(&self) -> (Complex64, Complex64) {
        let r = Complex64::new(self.radius, self.radius);
        (self.center - r, self.center + r)
    }
    fn classify(&self, z: Complex64) -> Cell {
        if (z - self.center).norm() >= self.radius {
            Cell::B
        } else if self.disks.iter().any(|&(c, r)| (z - c).norm() <= r) {
            Cell::A
        } else {
            Cell::Interior
        }
    }
    fn crossing(&self, from: Complex64, to: Complex64) -> f64 {
        let mut best = circle_hit(from, to, self.center, self.radius).unwrap_or(1.0);
        for &(c, r) in &self.disks {
            if let Some(s) = circle_hit(from, to, c, r) {
                best = best.min(s);
            }
        }
        best
    }
    fn label(&self) -> String {
        format!("{} disks in a disk of radius {}", self.disks.len(), self.radius)
    }
}

/// `Z ∖ Y` for polygons `Y ⊂ Z`: `A` is the filled `Y`, `B` the outside of `Z`.
#[derive(Debug, Clone)]
pub struct PolygonAnnulus {
    pub outer: Polygon,
    pub inner: Polygon,
    pub label: String,
}

impl DomainShape for PolygonAnnulus {
    fn bbox(&self) -> (Complex64, Complex64) {
        bbox(&self.outer.points)
    }
    fn classify(&self, z: Complex64) -> Cell {
        if !self.outer.contains(z) {
            Cell::B
        } else if self.inner.contains(z) {
            Cell::A
        } else {
            Cell::Interior
        }
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

/// A polygon whose boundary parts near two points `v` and `w` are joined:
/// `A` and `B` are the disks of radius `radius` about them. The interior is
/// clipped to the disk of radius `window` about `(v + w)/2`; everything else
/// is excluded.
#[derive(Debug, Clone)]
pub struct Bigon {
    pub piece: Polygon,
    pub v: Complex64,
    pub w: Complex64,
    pub radius: f64,
    pub window: f64,
    pub label: String,
}

impl Bigon {
    fn mid(&self) -> Complex64 {
        (self.v + self.w) * 0.5
    }
}

impl DomainShape for Bigon {
    fn bbox(&self) -> (Complex64, Complex64) {
        let (lo, hi) = bbox(&self.piece.points);
        let r = Complex64::new(self.radius, self.radius);
        let win = Complex64::new(self.window, self.window);
        let (a, b) = bbox(&[self.v - r, self.v + r, self.w - r, self.w + r]);
        let (c, d) = (self.mid() - win, self.mid() + win);
        let lo = Complex64::new(lo.re.max(c.re).min(a.re), lo.im.max(c.im).min(a.im));
        let hi = Complex64::new(hi.re.min(d.re).max(b.re), hi.im.min(d.im).max(b.im));
        (lo, hi)
    }
    fn classify(&self, z: Complex64) -> Cell {
        if (z - self.v).norm() <= self.radius {
            Cell::A
        } else if (z - self.w).norm() <= self.radius {
            Cell::B
        } else if (z - self.mid()).norm() < self.window && self.piece.contains(z) {
            Cell::Interior
        } else {
            Cell::Excluded
        }
    }
    fn crossing(&self, from: Complex64, to: Complex64) -> f64 {
        let c = if (to - self.v).norm() <= self.radius { self.v } else { self.w };
        circle_hit(from, to, c, self.radius).unwrap_or(1.0)
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Preimage of a shape under `z ↦ z^degree`.
#[derive(Debug, Clone)]
pub struct Pullback<S> {
    pub base: S,
    pub degree: u32,
}

impl<S: DomainShape> DomainShape for Pullback<S> {
    fn bbox(&self) -> (Complex64, Complex64) {
        let (lo, hi) = self.base.bbox();
        let r = [lo, hi, Complex64::new(lo.re, hi.im), Complex64::new(hi.re, lo.im)]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            .powf(1.0 / self.degree as f64);
        (Complex64::new(-r, -r), Complex64::new(r, r))
    }
    fn classify(&self, z: Complex64) -> Cell {
        self.base.classify(z.powu(self.degree))
    }
    fn label(&self) -> String {
        format!("degree-{} pullback of {}", self.degree, self.base.label())
    }
}

/// The same shape with the roles of `A` and `B` exchanged.
#[derive(Debug, Clone)]
pub struct Swapped<S>(pub S);

impl<S: DomainShape> DomainShape for Swapped<S> {
    fn bbox(&self) -> (Complex64, Complex64) {
        self.0.bbox()
    }
    fn classify(&self, z: Complex64) -> Cell {
        match self.0.classify(z) {
            Cell::A => Cell::B,
            Cell::B => Cell::A,
            c => c,
        }
    }
    fn crossing(&self, from: Complex64, to: Complex64) -> f64 {
        self.0.crossing(from, to)
    }
    fn label(&self) -> String {
        format!("swapped {}", self.0.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_hits() {
        let s = circle_hit(Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0), 1.0);
        assert!((s.unwrap() - 0.5).abs() < 1e-15);
        assert!(circle_hit(Complex64::new(0.0, 2.0), Complex64::new(1.0, 2.0), Complex64::new(0.0, 0.0), 1.0).is_none());
    }

    #[test]
    fn concentric_disk_matches_round_annulus() {
        let cfg = DiskConfiguration { center: Complex64::new(0.0, 0.0), radius: 2.0, disks: vec![(Complex64::new(0.0, 0.0), 0.5)] };
        let round = RoundAnnulus::new(Complex64::new(0.0, 0.0), 0.5, 2.0);
        assert!((cfg.single_modulus(0) - round.exact_modulus()).abs() < 1e-12);
    }

    #[test]
    fn default_crossing_bisects() {
        let p = PolygonAnnulus {
            outer: Polygon::new(vec![
                Complex64::new(-2.0, -2.0),
                Complex64::new(2.0, -2.0),
                Complex64::new(2.0, 2.0),
                Complex64::new(-2.0, 2.0),
            ]),
            inner: Polygon::new(vec![
                Complex64::new(-1.0, -1.0),
                Complex64::new(1.0, -1.0),
                Complex64::new(1.0, 1.0),
                Complex64::new(-1.0, 1.0),
            ]),
            label: "squares".into(),
        };
        let s = p.crossing(Complex64::new(1.5, 0.0), Complex64::new(0.5, 0.0));
        assert!((s - 0.5).abs() < 1e-8);
    }
}
