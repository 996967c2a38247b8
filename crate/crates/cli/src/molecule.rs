//! Satellite chains of hyperbolic components grown from the main cardioid.
//!
//! A component of period `n` is traced by following the solution `(z, c)` of
//! `f_c^n(z) = z`, `(f_c^n)'(z) = λ` as the multiplier `λ` moves, starting
//! from the centre where `λ = 0`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

/// Samples of the boundary circle `λ = e^{is}`.
pub const BOUNDARY_SAMPLES: usize = 512;

#[derive(Debug, Clone, Serialize)]
pub struct Component {
    pub period: usize,
    pub center: Complex64,
    /// `1/|dμ/dc|` at the centre.
    pub radius: f64,
    /// Index of the parent component and the internal angle `p/q` of the root.
    pub parent: Option<(usize, usize, usize)>,
    pub root: Complex64,
    pub boundary: Vec<Complex64>,
    /// Largest `||μ| − 1|` over the boundary samples.
    pub boundary_residual: f64,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `f^n(z) − z`, `(f^n)'(z)` and their partials in `z` and `c`.
struct Jet {
    f: Complex64,
    fz: Complex64,
    fc: Complex64,
    d: Complex64,
    dz: Complex64,
    dc: Complex64,
}

fn jet(n: usize, z0: Complex64, c: Complex64) -> Jet {
    let one = Complex64::new(1.0, 0.0);
    let (mut z, mut zz, mut zc) = (z0, one, Complex64::new(0.0, 0.0));
    let (mut d, mut dz, mut dc) = (one, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for _ in 0..n {
        let (nd, ndz, ndc) = (2.0 * z * d, 2.0 * (zz * d + z * dz), 2.0 * (zc * d + z * dc));
        let (nz, nzz, nzc) = (z * z + c, 2.0 * z * zz, 2.0 * z * zc + 1.0);
        (z, zz, zc, d, dz, dc) = (nz, nzz, nzc, nd, ndz, ndc);
    }
    Jet { f: z - z0, fz: zz - 1.0, fc: zc, d, dz, dc }
}

/// Newton on the cycle/multiplier system from `(z, c)`.
fn solve(n: usize, lambda: Complex64, mut z: Complex64, mut c: Complex64) -> Option<(Complex64, Complex64)> {
    for _ in 0..60 {
        let j = jet(n, z, c);
        let (g1, g2) = (j.f, j.d - lambda);
        let det = j.fz * j.dc - j.fc * j.dz;
        if det.norm() < 1e-300 || !det.is_finite() {
            return None;
        }
        let dz = (g1 * j.dc - j.fc * g2) / det;
        let dcc = (j.fz * g2 - g1 * j.dz) / det;
        z -= dz;
        c -= dcc;
        if !(z.is_finite() && c.is_finite()) {
            return None;
        }
        if dz.norm() + dcc.norm() < 1e-14 * (1.0 + c.norm()) {
            return Some((z, c));
        }
    }
    let j = jet(n, z, c);
    (j.f.norm() + (j.d - lambda).norm() < 1e-9).then_some((z, c))
}

/// `z` is not a point of lower period dividing `n`.
fn primitive(n: usize, z: Complex64, c: Complex64) -> bool {
    let mut w = z;
    for d in 1..n {
        w = w * w + c;
        if n % d == 0 && (w - z).norm() < 1e-7 * (1.0 + z.norm()) {
            return false;
        }
    }
    true
}

/// Moves from `state` at `from` to `to`, halving the step when Newton fails
/// or lands on a cycle of lower period.
fn step(n: usize, state: (Complex64, Complex64), from: Complex64, to: Complex64, depth: u32) -> Option<(Complex64, Complex64)> {
    // tangent predictor: J (dz, dc) = (0, dλ)
    let j = jet(n, state.0, state.1);
    let det = j.fz * j.dc - j.fc * j.dz;
    let dl = to - from;
    let (pz, pc) = (-j.fc * dl / det, j.fz * dl / det);
    if det.is_finite() && det.norm() > 0.0 {
        let guess = (state.0 + pz, state.1 + pc);
        if let Some(next) = solve(n, to, guess.0, guess.1) {
            let drift = (next.0 - guess.0).norm() + (next.1 - guess.1).norm();
            if primitive(n, next.0, next.1) && drift <= 0.5 * (pz.norm() + pc.norm()) + 1e-10 {
                return Some(next);
            }
        }
    }
    if depth == 0 {
        return None;
    }
    let mid = (from + to) * 0.5;
    let half = step(n, state, from, mid, depth - 1)?;
    step(n, half, mid, to, depth - 1)
}

/// Follows `λ` along `path` from the centre, where `z = 0` and `λ = 0`.
fn follow(n: usize, center: Complex64, path: impl IntoIterator<Item = Complex64>) -> Option<Vec<(Complex64, Complex64)>> {
    let mut state = (Complex64::new(0.0, 0.0), center);
    let mut at = Complex64::new(0.0, 0.0);
    let mut out = Vec::new();
    for lambda in path {
        state = step(n, state, at, lambda, 12)?;
        at = lambda;
        out.push(state);
    }
    Some(out)
}

fn radial(angle: f64, to: f64, steps: usize) -> impl Iterator<Item = Complex64> {
    (1..=steps).map(move |k| Complex64::from_polar(to * k as f64 / steps as f64, angle))
}

/// `dμ/dc` at a centre: `2^n ∂_c f_c^n(0) ∏ f^j(0)` over `0 < j < n`.
pub fn multiplier_derivative(n: usize, center: Complex64) -> Complex64 {
    let (mut z, mut zc) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let mut prod = Complex64::new(1.0, 0.0);
    for j in 0..n {
        if j > 0 {
            prod *= z;
        }
        zc = 2.0 * z * zc + 1.0;
        z = z * z + center;
    }
    2f64.powi(n as i32) * zc * prod
}

/// Newton for `f_c^n(0) = 0`.
fn center_near(n: usize, seed: Complex64) -> Option<Complex64> {
    let mut c = seed;
    for _ in 0..100 {
        let (mut z, mut dz) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for _ in 0..n {
            dz = 2.0 * z * dz + 1.0;
            z = z * z + c;
        }
        if dz.norm() == 0.0 || !z.is_finite() {
            return None;
        }
        let step = z / dz;
        c -= step;
        if step.norm() < 1e-15 {
            break;
        }
    }
    exact_period(c, n).then_some(c)
}

/// The critical orbit of `c` returns to 0 first at `n`.
fn exact_period(c: Complex64, n: usize) -> bool {
    let mut z = Complex64::new(0.0, 0.0);
    for j in 1..=n {
        z = z * z + c;
        if z.norm() < 1e-9 {
            return j == n;
        }
    }
    false
}

fn boundary(n: usize, center: Complex64) -> Option<(Vec<Complex64>, f64)> {
    // start just off λ = 1 to avoid the collision with the parent cycle
    let s0 = std::f64::consts::PI / BOUNDARY_SAMPLES as f64;
    let mut path: Vec<Complex64> = radial(s0, 1.0, 64).collect();
    path.extend((1..=BOUNDARY_SAMPLES).map(|k| Complex64::from_polar(1.0, s0 + TAU * k as f64 / BOUNDARY_SAMPLES as f64)));
    let pts = follow(n, center, path)?;
    let ring: Vec<(Complex64, Complex64)> = pts[63..].to_vec();
    let residual = ring.iter().map(|&(z, c)| (jet(n, z, c).d.norm() - 1.0).abs()).fold(0.0, f64::max);
    Some((ring.into_iter().map(|(_, c)| c).collect(), residual))
}

fn component(period: usize, center: Complex64, parent: Option<(usize, usize, usize)>, root: Complex64) -> Option<Component> {
    let (boundary, boundary_residual) = boundary(period, center)?;
    Some(Component {
        period,
        center,
        radius: 1.0 / multiplier_derivative(period, center).norm(),
        parent,
        root,
        boundary,
        boundary_residual,
    })
}

/// The child of `parent` at internal angle `p/q`.
fn satellite(parent: &Component, pi: usize, p: usize, q: usize) -> Option<Component> {
    let m = parent.period;
    let theta = TAU * p as f64 / q as f64;
    let pts = follow(m, parent.center, radial(theta, 1.0, 200))?;
    let (z0, root) = *pts.last()?;
    // dc/dλ at the root gives the outward direction and the local scale
    let j = jet(m, z0, root);
    let det = j.fz * j.dc - j.fc * j.dz;
    let dc_dl = j.fz / det;
    let outward = dc_dl * Complex64::from_polar(1.0, theta);
    let n = m * q;
    for scale in [1.0, 0.5, 2.0, 0.25, 4.0] {
        let seed = root + outward * (scale / (q * q) as f64);
        let Some(center) = center_near(n, seed) else { continue };
        // the child's multiplier path must end at the root
        let Some(path) = follow(n, center, radial(0.0, 0.99, 100)) else { continue };
        let end = path.last()?.1;
        if (end - root).norm() < 0.2 * (center - root).norm() {
            return component(n, center, Some((pi, p, q)), root);
        }
    }
    None
}

/// All components of the satellite chains with period at most `bound`.
pub fn skeleton(bound: usize) -> Vec<Component> {
    let zero = Complex64::new(0.0, 0.0);
    let mut out = Vec::new();
    if bound == 0 {
        return out;
    }
    out.extend(component(1, zero, None, Complex64::new(0.25, 0.0)));
    let mut i = 0;
    while i < out.len() {
        let m = out[i].period;
        for q in 2..=bound / m {
            for p in (1..q).filter(|&p| gcd(p, q) == 1) {
                if let Some(c) = satellite(&out[i], i, p, q) {
                    out.push(c);
                }
            }
        }
        i += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_two_disk() {
        let s = skeleton(2);
        assert_eq!(s.len(), 2);
        let b = &s[1];
        assert!((b.center - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((b.radius - 0.25).abs() < 1e-12);
        assert!((b.root - Complex64::new(-0.75, 0.0)).norm() < 1e-9);
        // the boundary is exactly the circle |c + 1| = 1/4
        for c in &b.boundary {
            assert!(((c + 1.0).norm() - 0.25).abs() < 1e-9, "{c} {}", b.boundary_residual);
        }
    }

    #[test]
    fn cardioid_boundary() {
        let s = skeleton(1);
        // c = λ/2 − λ²/4
        for c in &s[0].boundary {
            let lambda = 1.0 - (1.0 - 4.0 * c).sqrt();
            assert!((lambda.norm() - 1.0).abs() < 1e-8);
        }
        assert!((s[0].radius - 0.5).abs() < 1e-12);
    }
}
