//! Iteration of `z -> z^2 + c`: Green's function, external rays and their
//! landing points, periodic points and numerical ray portraits.
//!
//! Everything here is double precision. Rays are traced by following
//! potential levels `G0 * 2^(-k/8)` downward and solving
//! `f^n(z) = exp(2^n (G + 2 pi i theta))` by Newton's method at each level,
//! with `n` large enough that the Böttcher coordinate is the identity to
//! machine precision.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angles::Angle;

/// `log` of the radius beyond which the Böttcher map is treated as the
/// identity when solving for ray points.
const LOG_BOTTCHER_RADIUS: f64 = 46.0;
/// Potential steps per halving of the potential.
pub const STEPS_PER_OCTAVE: usize = 8;
const MAX_SUBDIVISIONS: u32 = 12;
/// Rays that have not landed by this potential are reported as slow.
const MIN_LANDING_POTENTIAL: f64 = 1e-250;
const GREEN_BAILOUT: f64 = 1e100;

#[derive(Debug, Error, Clone)]
pub enum DynamicsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("Newton correction diverged on ray {angle} at potential {potential:e}")]
    NewtonDivergence { angle: String, potential: f64, partial: Box<RayTrace> },
    #[error("ray {angle} did not land before potential {potential:e}")]
    SlowLanding { angle: String, potential: f64, partial: Box<RayTrace> },
    #[error("Newton iteration did not converge after {0} steps")]
    NoConvergence(usize),
    #[error("periodic point at {location} is superattracting (multiplier {multiplier})")]
    Superattracting { location: Complex64, multiplier: Complex64 },
}

/// A quadratic polynomial `z^2 + c` with the numerical policy used for it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticMap {
    pub c: Complex64,
    pub escape_radius: f64,
    pub max_iter: usize,
    pub newton_tol: f64,
    pub landing_tol: f64,
    pub cluster_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Green {
    pub value: f64,
    /// The orbit did not escape within `max_iter` steps.
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayTrace {
    pub angle: Angle,
    pub points: Vec<Complex64>,
    pub potentials: Vec<f64>,
    pub landed: bool,
    pub landing_point: Option<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPoint {
    pub location: Complex64,
    pub period: usize,
    pub multiplier: Complex64,
    pub dividing: Option<bool>,
    pub landing_angles: Option<Vec<Angle>>,
}

impl PeriodicPoint {
    pub fn is_repelling(&self) -> bool {
        self.multiplier.norm() > 1.0
    }
}

/// One class of a numerical ray portrait.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandingClass {
    pub angles: Vec<Angle>,
    pub landing_point: Option<Complex64>,
    pub unresolved: bool,
}

impl QuadraticMap {
    pub fn new(c: Complex64) -> Self {
        QuadraticMap {
            c,
            escape_radius: 1e3_f64.max(2.0 + c.norm()),
            max_iter: 5000,
            newton_tol: 1e-12,
            landing_tol: 1e-8,
            cluster_tol: 1e-6,
        }
    }

    pub fn with_escape_radius(mut self, r: f64) -> Result<Self, DynamicsError> {
        if !(r >= 2.0 + self.c.norm()) {
            return Err(DynamicsError::InvalidArgument(format!(
                "escape radius {r} must be at least 2 + |c| = {}",
                2.0 + self.c.norm()
            )));
        }
        self.escape_radius = r;
        Ok(self)
    }

    #[inline]
    pub fn f(&self, z: Complex64) -> Complex64 {
        z * z + self.c
    }

    pub fn iterate(&self, mut z: Complex64, n: usize) -> Complex64 {
        for _ in 0..n {
            z = z * z + self.c;
        }
        z
    }

    /// `f^n(z)` together with `(f^n)'(z)`.
    pub fn iterate_with_derivative(&self, mut z: Complex64, n: usize) -> (Complex64, Complex64) {
        let mut d = Complex64::new(1.0, 0.0);
        for _ in 0..n {
            d = 2.0 * z * d;
            z = z * z + self.c;
        }
        (z, d)
    }

    pub fn orbit(&self, z: Complex64, n: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(n + 1);
        let mut w = z;
        out.push(w);
        for _ in 0..n {
            w = self.f(w);
            out.push(w);
        }
        out
    }

    /// `log` of the escape radius; the potential of the depth-zero equipotential.
    pub fn base_potential(&self) -> f64 {
        self.escape_radius.ln()
    }

    /// Potential of the depth-`m` equipotential.
    pub fn depth_potential(&self, m: usize) -> f64 {
        self.base_potential() / 2f64.powi(m as i32)
    }
}

/// `G(z) = lim 2^-n log|f^n(z)|`.
pub fn green(map: &QuadraticMap, z: Complex64) -> Green {
    let mut w = z;
    let mut scale = 1.0_f64;
    for _ in 0..map.max_iter {
        let r = w.norm();
        if r > GREEN_BAILOUT {
            return Green { value: scale * r.ln(), censored: false };
        }
        w = map.f(w);
        scale *= 0.5;
    }
    let r = w.norm();
    if r > map.escape_radius {
        return Green { value: scale * r.ln(), censored: false };
    }
    Green { value: 0.0, censored: true }
}

/// Forward doubling orbit of an angle as floats, extended on demand with
/// exact integer arithmetic.
struct AngleOrbit {
    numerators: Vec<BigInt>,
    denominator: BigInt,
    values: Vec<f64>,
}

impl AngleOrbit {
    fn new(a: &Angle) -> Self {
        AngleOrbit {
            numerators: vec![a.numerator().clone()],
            denominator: a.denominator().clone(),
            values: vec![a.to_f64()],
        }
    }

    fn at(&mut self, n: usize) -> f64 {
        while self.values.len() <= n {
            let last = self.numerators.last().expect("nonempty");
            let mut next: BigInt = last << 1usize;
            if next >= self.denominator {
                next -= &self.denominator;
            }
            let v = BigRational::new(next.clone(), self.denominator.clone()).to_f64().unwrap_or(0.0);
            self.numerators.push(next);
            self.values.push(v);
        }
        self.values[n]
    }
}

fn level_for(potential: f64) -> usize {
    let mut n = 0usize;
    let mut g = potential;
    while g < LOG_BOTTCHER_RADIUS {
        g *= 2.0;
        n += 1;
    }
    n
}

/// Newton solve of `f^n(z) = w(potential, theta)` starting from `z0`.
pub(crate) fn newton_to_target(
    map: &QuadraticMap,
    z0: Complex64,
    n: usize,
    w: Complex64,
) -> Option<Complex64> {
    let mut z = z0;
    let mut last_step = f64::INFINITY;
    for _ in 0..64 {
        let (zn, dn) = map.iterate_with_derivative(z, n);
        if !zn.is_finite() || !dn.is_finite() || dn.norm() == 0.0 {
            return None;
        }
        let dz = (zn - w) / dn;
        z -= dz;
        let step = dz.norm();
        if !z.is_finite() {
            return None;
        }
        if step <= 4e-16 * (1e-3 + z.norm()) {
            return Some(z);
        }
        if step >= last_step && step < 1e-10 * (1.0 + z.norm()) {
            // rounding floor reached
            return Some(z);
        }
        last_step = step;
    }
    if last_step < map.newton_tol * (1.0 + z.norm()) {
        Some(z)
    } else {
        None
    }
}

struct Tracer<'a> {
    map: &'a QuadraticMap,
    orbit: AngleOrbit,
    trace: RayTrace,
    /// Index in `trace.points` of every grid level `G0 * 2^(-k/8)` reached.
    grid: Vec<usize>,
    similar: Option<Similar<'a>>,
}

/// Deep grid points of a rational ray solve `f^iters(z) = w`, where `w` is
/// the grid point `k - offset` of the periodic image ray (`source`, or the
/// ray itself when `None`). This avoids Newton on very high iterates.
struct Similar<'a> {
    start: usize,
    offset: usize,
    iters: usize,
    source: Option<Box<Tracer<'a>>>,
}

const SIMILAR_START: usize = 4 * STEPS_PER_OCTAVE;

impl<'a> Tracer<'a> {
    fn new(map: &'a QuadraticMap, angle: &Angle) -> Result<Self, DynamicsError> {
        let mut orbit = AngleOrbit::new(angle);
        let g0 = map.base_potential();
        let n = level_for(g0);
        let theta = orbit.at(0);
        let guess = Complex64::from_polar(g0.exp(), TAU * theta);
        let w = target_point(&mut orbit, g0, n);
        let mut trace =
            RayTrace { angle: angle.clone(), points: vec![], potentials: vec![], landed: false, landing_point: None };
        match newton_to_target(map, guess, n, w) {
            Some(z) => {
                trace.points.push(z);
                trace.potentials.push(g0);
            }
            None => {
                return Err(DynamicsError::NewtonDivergence {
                    angle: angle.to_string(),
                    potential: g0,
                    partial: Box::new(trace),
                })
            }
        }
        let orb = angle.orbit();
        let similar = if orb.preperiod == 0 {
            let offset = STEPS_PER_OCTAVE * orb.period;
            Some(Similar { start: offset.max(SIMILAR_START), offset, iters: orb.period, source: None })
        } else {
            let offset = STEPS_PER_OCTAVE * orb.preperiod;
            let image = angle.double_n(orb.preperiod as u32);
            let source = Tracer::new(map, &image)?;
            Some(Similar { start: offset.max(SIMILAR_START), offset, iters: orb.preperiod, source: Some(Box::new(source)) })
        };
        Ok(Tracer { map, orbit, trace, grid: vec![0], similar })
    }

    fn similar_point(&mut self, k: usize) -> Result<Option<Complex64>, DynamicsError> {
        let Some(sim) = self.similar.as_mut() else { return Ok(None) };
        if k < sim.start {
            return Ok(None);
        }
        let j = k - sim.offset;
        let w = match sim.source.as_mut() {
            Some(src) => {
                while src.grid.len() <= j {
                    src.step_grid()?;
                }
                src.trace.points[src.grid[j]]
            }
            None => self.trace.points[self.grid[j]],
        };
        let iters = sim.iters;
        let (from, _) = self.last();
        let Some(z) = newton_to_target(self.map, from, iters, w) else { return Ok(None) };
        if let Some(seg) = self.last_segment() {
            if (z - from).norm() > 8.0 * seg + 1e-12 {
                return Ok(None);
            }
        }
        Ok(Some(z))
    }

    fn last(&self) -> (Complex64, f64) {
        let i = self.trace.points.len() - 1;
        (self.trace.points[i], self.trace.potentials[i])
    }

    fn last_segment(&self) -> Option<f64> {
        let p = &self.trace.points;
        (p.len() >= 2).then(|| (p[p.len() - 1] - p[p.len() - 2]).norm())
    }

    fn try_point(&mut self, from: Complex64, g: f64) -> Option<Complex64> {
        let n = level_for(g);
        let w = target_point(&mut self.orbit, g, n);
        let z = newton_to_target(self.map, from, n, w)?;
        if let Some(seg) = self.last_segment() {
            // guard against Newton hopping to a neighbouring ray
            if (z - from).norm() > 8.0 * seg + 1e-12 {
                return None;
            }
        }
        Some(z)
    }

    /// Advances from the current point to potential `g`, subdividing the
    /// potential step when Newton fails.
    fn advance(&mut self, g: f64, depth: u32) -> bool {
        let (z, g_cur) = self.last();
        if let Some(w) = self.try_point(z, g) {
            self.trace.points.push(w);
            self.trace.potentials.push(g);
            return true;
        }
        if depth >= MAX_SUBDIVISIONS {
            return false;
        }
        let mid = (g_cur * g).sqrt();
        self.advance(mid, depth + 1) && self.advance(g, depth + 1)
    }

    fn grid_potential(&self, k: usize) -> f64 {
        self.map.base_potential() * 2f64.powf(-(k as f64) / STEPS_PER_OCTAVE as f64)
    }

    fn step_grid(&mut self) -> Result<(), DynamicsError> {
        let k = self.grid.len();
        let g = self.grid_potential(k);
        if let Some(z) = self.similar_point(k)? {
            self.trace.points.push(z);
            self.trace.potentials.push(g);
            self.grid.push(self.trace.points.len() - 1);
            return Ok(());
        }
        if self.advance(g, 0) {
            self.grid.push(self.trace.points.len() - 1);
            Ok(())
        } else {
            Err(self.divergence(g))
        }
    }

    fn divergence(&self, g: f64) -> DynamicsError {
        DynamicsError::NewtonDivergence {
            angle: self.trace.angle.to_string(),
            potential: g,
            partial: Box::new(self.trace.clone()),
        }
    }
}

fn target_point(orbit: &mut AngleOrbit, g: f64, n: usize) -> Complex64 {
    let theta_n = orbit.at(n);
    let radius = (g * 2f64.powi(n as i32)).exp();
    Complex64::from_polar(radius, TAU * theta_n)
}

/// Traces the external ray of angle `angle` from the base equipotential
/// down to `target_potential`.
pub fn trace_ray(map: &QuadraticMap, angle: &Angle, target_potential: f64) -> Result<RayTrace, DynamicsError> {
    if !(target_potential > 0.0) {
        return Err(DynamicsError::InvalidArgument("target potential must be positive".into()));
    }
    let mut tr = Tracer::new(map, angle)?;
    if target_potential >= map.base_potential() {
        return Ok(tr.trace);
    }
    loop {
        let k = tr.grid.len();
        let g = tr.grid_potential(k);
        if g <= target_potential * (1.0 + 1e-12) {
            if !tr.advance(target_potential, 0) {
                return Err(tr.divergence(target_potential));
            }
            return Ok(tr.trace);
        }
        tr.step_grid()?;
    }
}

fn diameter(points: &[Complex64]) -> f64 {
    let mut d = 0.0_f64;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            d = d.max((points[i] - points[j]).norm());
        }
    }
    d
}

/// Traces a rational ray until its tail over one halving of the potential
/// has diameter below `landing_tol`, and estimates the landing point.
pub fn land_ray(map: &QuadraticMap, angle: &Angle, landing_tol: f64) -> Result<RayTrace, DynamicsError> {
    if !(landing_tol > 0.0) {
        return Err(DynamicsError::InvalidArgument("landing tolerance must be positive".into()));
    }
    let orbit = angle.orbit();
    let period = orbit.period;
    let mut tr = Tracer::new(map, angle)?;
    loop {
        tr.step_grid()?;
        let k = tr.grid.len() - 1;
        if k >= STEPS_PER_OCTAVE {
            let tail_start = tr.grid[k - STEPS_PER_OCTAVE];
            let tail = &tr.trace.points[tail_start..];
            if diameter(tail) < landing_tol {
                let point = landing_estimate(map, &tr, period, orbit.preperiod == 0, landing_tol);
                tr.trace.landed = true;
                tr.trace.landing_point = Some(point);
                return Ok(tr.trace);
            }
        }
        if tr.grid_potential(k) < MIN_LANDING_POTENTIAL {
            return Err(DynamicsError::SlowLanding {
                angle: angle.to_string(),
                potential: tr.grid_potential(k),
                partial: Box::new(tr.trace),
            });
        }
    }
}

fn landing_estimate(map: &QuadraticMap, tr: &Tracer<'_>, period: usize, periodic: bool, tol: f64) -> Complex64 {
    let k = tr.grid.len() - 1;
    let pts = &tr.trace.points;
    let last = pts[tr.grid[k]];
    let tail = &pts[tr.grid[k - STEPS_PER_OCTAVE]..];
    let centroid = tail.iter().sum::<Complex64>() / tail.len() as f64;
    let mut estimate = centroid;
    // Points one ray period apart approach the landing point geometrically.
    let span = STEPS_PER_OCTAVE * period;
    if k >= 2 * span {
        let (z0, z1, z2) = (pts[tr.grid[k - 2 * span]], pts[tr.grid[k - span]], last);
        let denom = (z2 - z1) - (z1 - z0);
        if denom.norm() > 0.0 {
            let a = z2 - (z2 - z1) * (z2 - z1) / denom;
            if a.is_finite() && (a - last).norm() < 10.0 * tol {
                estimate = a;
            }
        }
    }
    if periodic {
        // polish on f^p(z) = z
        let mut z = estimate;
        for _ in 0..20 {
            let (zp, dp) = map.iterate_with_derivative(z, period);
            let d = dp - 1.0;
            if d.norm() == 0.0 {
                break;
            }
            let step = (zp - z) / d;
            z -= step;
            if step.norm() < 1e-15 * (1.0 + z.norm()) {
                break;
            }
        }
        if z.is_finite() && (z - last).norm() < 10.0 * tol {
            return z;
        }
    }
    estimate
}

/// Newton on `f^p(z) = z` from `seed`.
pub fn find_periodic_point(map: &QuadraticMap, period: usize, seed: Complex64) -> Result<PeriodicPoint, DynamicsError> {
    if period == 0 {
        return Err(DynamicsError::InvalidArgument("period must be positive".into()));
    }
    if !(seed.norm() <= map.escape_radius) {
        return Err(DynamicsError::InvalidArgument("seed lies outside the escape radius".into()));
    }
    let iters = map.max_iter.min(500);
    let mut z = seed;
    let mut converged = false;
    for _ in 0..iters {
        let (zp, dp) = map.iterate_with_derivative(z, period);
        let denom = dp - 1.0;
        if !zp.is_finite() || denom.norm() == 0.0 {
            break;
        }
        let step = (zp - z) / denom;
        z -= step;
        if !z.is_finite() {
            break;
        }
        if step.norm() <= map.newton_tol * (1.0 + z.norm()) * 1e-2 {
            converged = true;
            break;
        }
    }
    if !converged {
        let (zp, _) = map.iterate_with_derivative(z, period);
        if !(z.is_finite() && (zp - z).norm() < map.newton_tol) {
            return Err(DynamicsError::NoConvergence(iters));
        }
    }
    let exact = exact_period(map, z, period);
    let (_, multiplier) = map.iterate_with_derivative(z, exact);
    if multiplier.norm() < 1e-8 {
        return Err(DynamicsError::Superattracting { location: z, multiplier });
    }
    Ok(PeriodicPoint { location: z, period: exact, multiplier, dividing: None, landing_angles: None })
}

fn exact_period(map: &QuadraticMap, z: Complex64, period: usize) -> usize {
    let scale = 1e-9 * (1.0 + z.norm());
    (1..=period)
        .filter(|d| period % d == 0)
        .find(|&d| (map.iterate(z, d) - z).norm() < scale)
        .unwrap_or(period)
}

/// Lands all rays (in parallel) and groups them by landing point.
pub fn cluster_landings(map: &QuadraticMap, angles: &[Angle], cluster_tol: f64) -> Vec<LandingClass> {
    let landings: Vec<(Angle, Option<Complex64>)> = angles
        .par_iter()
        .map(|a| {
            let p = land_ray(map, a, map.landing_tol).ok().and_then(|t| t.landing_point);
            (a.clone(), p)
        })
        .collect();
    let mut classes: Vec<LandingClass> = Vec::new();
    for (a, p) in landings {
        match p {
            None => classes.push(LandingClass { angles: vec![a], landing_point: None, unresolved: true }),
            Some(z) => {
                let hit = classes
                    .iter_mut()
                    .find(|c| c.landing_point.map_or(false, |w| (w - z).norm() < cluster_tol));
                match hit {
                    Some(c) => c.angles.push(a),
                    None => classes.push(LandingClass { angles: vec![a], landing_point: Some(z), unresolved: false }),
                }
            }
        }
    }
    for c in &mut classes {
        c.angles.sort();
    }
    classes.sort_by(|x, y| x.angles[0].cmp(&y.angles[0]));
    classes
}

/// Points of the equipotential `G = level` at `samples` equally spaced angles.
pub fn equipotential(map: &QuadraticMap, level: f64, samples: usize) -> Result<Vec<Complex64>, DynamicsError> {
    if samples < 3 || !(level > 0.0) {
        return Err(DynamicsError::InvalidArgument("need level > 0 and at least 3 samples".into()));
    }
    (0..samples)
        .into_par_iter()
        .map(|k| {
            let a = Angle::new(k as u64, samples as u64).expect("positive denominator");
            trace_ray(map, &a, level).map(|t| *t.points.last().expect("nonempty trace"))
        })
        .collect()
}

/// Newton solve of `f^m(z) = target` from `seed`.
pub fn solve_preimage(map: &QuadraticMap, m: usize, target: Complex64, seed: Complex64) -> Option<Complex64> {
    let mut z = seed;
    for _ in 0..100 {
        let (zm, dm) = map.iterate_with_derivative(z, m);
        if !zm.is_finite() || dm.norm() == 0.0 {
            return None;
        }
        let step = (zm - target) / dm;
        z -= step;
        if step.norm() < 1e-15 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    let (zm, _) = map.iterate_with_derivative(z, m);
    ((zm - target).norm() < 1e-10).then_some(z)
}

/// Winding number of a closed polyline about `p`.
pub fn winding_number(poly: &[Complex64], p: Complex64) -> i64 {
    let mut total = 0.0;
    for i in 0..poly.len() {
        let a = poly[i] - p;
        let b = poly[(i + 1) % poly.len()] - p;
        total += (b / a).arg();
    }
    (total / TAU).round() as i64
}

/// Critical-orbit parameters: roots of `f_c^p(0) = 0` near `seed` by Newton in `c`.
pub fn find_center(period: usize, seed: Complex64) -> Option<Complex64> {
    let mut c = seed;
    for _ in 0..200 {
        let mut z = Complex64::zero();
        let mut dz = Complex64::zero();
        for _ in 0..period {
            dz = 2.0 * z * dz + 1.0;
            z = z * z + c;
        }
        if dz.norm() == 0.0 {
            return None;
        }
        let step = z / dz;
        c -= step;
        if step.norm() < 1e-15 {
            return Some(c);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ang(s: &str) -> Angle {
        s.parse().unwrap()
    }

    fn map(re: f64, im: f64) -> QuadraticMap {
        QuadraticMap::new(Complex64::new(re, im))
    }

    #[test]
    fn green_examples() {
        let g = green(&map(0.0, 0.0), Complex64::new(2f64.exp(), 0.0));
        assert!((g.value - 2.0).abs() < 1e-12 && !g.censored);
        let g = green(&map(0.0, 0.0), Complex64::new(0.5, 0.0));
        assert!(g.censored && g.value == 0.0);
    }

    #[test]
    fn rays_of_the_circle_map() {
        let m = map(0.0, 0.0);
        let t = trace_ray(&m, &ang("1/4"), 0.01).unwrap();
        for z in &t.points {
            assert!(z.re.abs() < 1e-9 && z.im > 1.0);
        }
        assert!((t.potentials.last().unwrap() - 0.01).abs() < 1e-15);
        let t = land_ray(&m, &ang("1/3"), 1e-8).unwrap();
        let expect = Complex64::from_polar(1.0, TAU / 3.0);
        assert!((t.landing_point.unwrap() - expect).norm() < 1e-8);
    }

    #[test]
    fn potentials_decrease() {
        let t = trace_ray(&map(-1.0, 0.0), &ang("1/3"), 1e-3).unwrap();
        assert!(t.potentials.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(t.points.len(), t.potentials.len());
    }

    #[test]
    fn periodic_points() {
        let p = find_periodic_point(&map(0.0, 0.0), 1, Complex64::new(0.9, 0.0)).unwrap();
        assert!((p.location - 1.0).norm() < 1e-12);
        assert!((p.multiplier - 2.0).norm() < 1e-12);
        let p = find_periodic_point(&map(-1.0, 0.0), 1, Complex64::new(-0.5, 0.0)).unwrap();
        assert!((p.location.re - (1.0 - 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!(p.is_repelling());
        assert!(matches!(
            find_periodic_point(&map(-1.0, 0.0), 2, Complex64::new(0.1, 0.0)),
            Err(DynamicsError::Superattracting { .. })
        ));
    }

    #[test]
    fn escape_radius_invariant() {
        assert!(map(0.0, 0.0).with_escape_radius(1.5).is_err());
        assert!(map(0.0, 0.0).with_escape_radius(4.0).is_ok());
    }

    #[test]
    fn winding() {
        let sq = [
            Complex64::new(1.0, 1.0),
            Complex64::new(-1.0, 1.0),
            Complex64::new(-1.0, -1.0),
            Complex64::new(1.0, -1.0),
        ];
        assert_eq!(winding_number(&sq, Complex64::zero()), 1);
        assert_eq!(winding_number(&sq, Complex64::new(3.0, 0.0)), 0);
    }
}
