//! Renormalization combinatorics: dividing cycles, the `(r, q, n)`
//! parameters of the molecule condition, primitive/satellite
//! classification and the principal nest.
//!
//! Conventions fixed here:
//! - `r = 1` stands for the case where `γ` is the non-dividing fixed point
//!   `β` (landing point of the ray 0); then `α` is the dividing fixed
//!   point and the central domain of `γ` is the whole puzzle domain;
//! - the central domain of `C \ (R(x) ∪ R(x'))` is the critical depth-1
//!   piece of the puzzle built on the cycle of `x`;
//! - a renormalization is looked for with respect to a portrait of ray
//!   period `p`, with `f^p : Y^{p+1} -> Y^1` as the return map;
//! - among admissible `(r, q, n)` triples the lexicographically first is
//!   returned.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angles::{angles_of_exact_period, validate_portrait, Angle, OrbitPortrait};
use crate::dynamics::{cluster_landings, find_periodic_point, land_ray, DynamicsError, PeriodicPoint, QuadraticMap};
use crate::puzzle::{build_puzzle, Puzzle, PuzzleError, PuzzlePiece};

/// Default number of return iterates checked for renormalizability.
pub const DEFAULT_M_MAX: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    NoDividingCycle,
    AlphaMissing,
    AlphaNotRepelling,
    AlphaNotDividing,
    ValenceExceeded,
    OrbitEscapes,
    EscapeTimeExceeded,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::NoDividingCycle => "no dividing cycle within bounds",
            Stage::AlphaMissing => "no fixed point of f^r in the central domain",
            Stage::AlphaNotRepelling => "alpha non-repelling",
            Stage::AlphaNotDividing => "alpha is not dividing",
            Stage::ValenceExceeded => "q exceeds its bound",
            Stage::OrbitEscapes => "orbit escapes early",
            Stage::EscapeTimeExceeded => "n exceeds its bound",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone)]
pub enum RenormError {
    #[error("molecule condition not satisfied: {stage} ({detail})")]
    NotSatisfied { stage: Stage, detail: String },
    #[error(transparent)]
    Puzzle(#[from] PuzzleError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("time budget of {0} iterates exceeded")]
    TimeBudgetExceeded(usize),
    #[error("critical orbit comes within resolution of the skeleton: {0}")]
    SkeletonProximity(String),
    #[error("return map of nest level {0} is not of degree two")]
    NotDegreeTwo(usize),
}

impl RenormError {
    fn not_satisfied(stage: Stage, detail: impl Into<String>) -> Self {
        RenormError::NotSatisfied { stage, detail: detail.into() }
    }
}

/// A repelling dividing cycle together with its ray portrait.
#[derive(Debug, Clone, Serialize)]
pub struct DividingCycle {
    /// The cycle point where the rays of `portrait.classes()[0]` land.
    pub point: PeriodicPoint,
    pub cycle: Vec<Complex64>,
    pub portrait: OrbitPortrait,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CycleSearch {
    pub cycles: Vec<DividingCycle>,
    /// Classes that were dropped, with the reason.
    pub excluded: Vec<String>,
}

/// Repelling dividing cycles whose rays have period at most `max_period`.
pub fn find_dividing_cycles(map: &QuadraticMap, max_period: usize) -> Result<CycleSearch, RenormError> {
    if max_period > 16 {
        return Err(DynamicsError::InvalidArgument("ray period bound above 16".into()).into());
    }
    let mut out = CycleSearch::default();
    for rho in 1..=max_period as u32 {
        let angles = angles_of_exact_period(rho).expect("positive period");
        let classes = cluster_landings(map, &angles, map.cluster_tol);
        let mut resolved = Vec::new();
        for c in classes {
            if c.unresolved {
                out.excluded.push(format!("ray {} did not land", c.angles[0]));
            } else if c.angles.len() >= 2 {
                resolved.push(c);
            }
        }
        let owner = |a: &Angle| resolved.iter().position(|c| c.angles.contains(a));
        let mut done = vec![false; resolved.len()];
        for start in 0..resolved.len() {
            if done[start] {
                continue;
            }
            let mut orbit = vec![start];
            let mut cur = start;
            let closed = loop {
                done[cur] = true;
                match owner(&resolved[cur].angles[0].double()) {
                    Some(next) if next == start => break true,
                    Some(next) if !done[next] => {
                        orbit.push(next);
                        cur = next;
                    }
                    _ => break false,
                }
            };
            let label = resolved[start].angles[0].to_string();
            if !closed {
                out.excluded.push(format!("landing classes through {label} do not form a cycle"));
                continue;
            }
            let cls: Vec<Vec<Angle>> = orbit.iter().map(|&i| resolved[i].angles.clone()).collect();
            let portrait = match validate_portrait(&cls) {
                Ok(p) => p,
                Err(e) => {
                    out.excluded.push(format!("classes through {label}: {e}"));
                    continue;
                }
            };
            let first = &portrait.classes()[0][0];
            let seed = orbit
                .iter()
                .find(|&&i| resolved[i].angles.contains(first))
                .and_then(|&i| resolved[i].landing_point)
                .expect("class of the portrait");
            let mut point = match find_periodic_point(map, portrait.period_t(), seed) {
                Ok(p) => p,
                Err(e) => {
                    out.excluded.push(format!("cycle through {label}: {e}"));
                    continue;
                }
            };
            if !point.is_repelling() {
                out.excluded.push(format!("cycle through {label} is not repelling"));
                continue;
            }
            point.dividing = Some(true);
            point.landing_angles = Some(portrait.classes()[0].clone());
            let cycle = map.orbit(point.location, portrait.period_t() - 1);
            out.cycles.push(DividingCycle { point, cycle, portrait });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RenormKind {
    Primitive,
    Satellite,
    /// Satellite renormalization about the dividing fixed point.
    Immediate,
    None,
}

impl RenormKind {
    pub fn is_satellite(self) -> bool {
        matches!(self, RenormKind::Satellite | RenormKind::Immediate)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Classification {
    pub kind: RenormKind,
    /// Return period `p` when renormalizable.
    pub period: Option<usize>,
    pub portrait: Option<OrbitPortrait>,
    /// Number of return iterates verified.
    pub verified_up_to: usize,
}

impl Classification {
    fn none(m_max: usize) -> Self {
        Classification { kind: RenormKind::None, period: None, portrait: None, verified_up_to: m_max }
    }
}

/// Decides renormalizability with combinatorics `portrait` for `m <= m_max`
/// return iterates.
pub fn classify_renormalization(
    map: &QuadraticMap,
    portrait: &OrbitPortrait,
    m_max: usize,
) -> Result<Classification, RenormError> {
    let p = portrait.ray_period();
    let pz = match build_puzzle(map, portrait, p + 1) {
        Ok(pz) => pz,
        Err(PuzzleError::PortraitMismatch { .. } | PuzzleError::NotRepelling(_)) => {
            return Ok(Classification::none(m_max))
        }
        Err(e) => return Err(proximity(e)),
    };
    classify_in(&pz, m_max)
}

fn proximity(e: PuzzleError) -> RenormError {
    match e {
        PuzzleError::OnBoundary { .. } | PuzzleError::Inconclusive(_) => RenormError::SkeletonProximity(e.to_string()),
        e => e.into(),
    }
}

/// Classification against the puzzle's own portrait (depth at least `p + 1`).
pub fn classify_in(pz: &Puzzle, m_max: usize) -> Result<Classification, RenormError> {
    let portrait = pz.portrait();
    let p = portrait.ray_period();
    let x0 = pz.critical_value_piece()?;
    let Some(xp) = attached_piece(pz, &x0, p) else { return Ok(Classification::none(m_max)) };
    if pz.critical_value_index(p) != xp {
        return Ok(Classification::none(m_max));
    }
    let crit = pz.critical_index(p + 1).expect("critical piece");
    for m in 0..=m_max {
        let here = pz.orbit_piece(p + 1, p * m).map_err(proximity)?;
        if here != crit {
            return Ok(Classification::none(m_max));
        }
        if let Some(per) = pz.critical_period() {
            // the memo repeats once p*m runs through all residues
            if m >= per {
                break;
            }
        }
    }
    let images: Vec<PuzzlePiece> = (0..p)
        .map(|j| {
            let idx = pz.image_k(p + 1, crit, j);
            pz.piece(p + 1 - j, idx)
        })
        .collect();
    let mut touching = false;
    for i in 0..p {
        for j in (i + 1)..p {
            touching |= images[i].shares_vertex(&images[j]);
        }
    }
    let kind = match (touching, portrait.period_t()) {
        (false, _) => RenormKind::Primitive,
        (true, 1) => RenormKind::Immediate,
        (true, _) => RenormKind::Satellite,
    };
    Ok(Classification { kind, period: Some(p), portrait: Some(portrait.clone()), verified_up_to: m_max })
}

/// The depth-`m` piece inside `X^0` attached to its vertex.
fn attached_piece(pz: &Puzzle, x0: &PuzzlePiece, m: usize) -> Option<usize> {
    let v = x0.vertices[0];
    pz.pieces_at_vertex(m, v).into_iter().find(|&i| pz.piece(m, i).arcs_inside(x0))
}

/// The combinatorial data `(r, q, n)` and everything derived from it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RenormData {
    pub r: usize,
    pub q: usize,
    pub n: usize,
    pub k: usize,
    pub lambda: usize,
    pub period_p: Option<usize>,
    pub kind: RenormKind,
    /// `None` when `γ = β` (`r = 1`).
    pub gamma_portrait: Option<OrbitPortrait>,
    pub gamma_point: PeriodicPoint,
    pub alpha_portrait: OrbitPortrait,
    pub alpha_point: PeriodicPoint,
    pub verified_up_to: usize,
}

impl RenormData {
    /// `ζ = f^k(0)`.
    pub fn zeta(&self, map: &QuadraticMap) -> Complex64 {
        map.iterate(Complex64::zero(), self.k)
    }

    /// Depth of `E^0 = Y^{k+r}`.
    pub fn e0_depth(&self) -> usize {
        self.k + self.r
    }

    /// Depth of `P = Y^{r q (n-1) + 1}`.
    pub fn p_depth(&self) -> usize {
        self.r * self.q * (self.n - 1) + 1
    }

    /// Depth of the buffers `Q^v`.
    pub fn buffer_depth(&self) -> usize {
        self.r * (2 * self.n - 1) * self.q + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub r: usize,
    pub q: usize,
    pub n: usize,
}

impl Bounds {
    pub fn new(r: usize, q: usize, n: usize) -> Self {
        Bounds { r, q, n }
    }

    pub fn admits(&self, r: usize, q: usize, n: usize) -> bool {
        r <= self.r && q <= self.q && n <= self.n
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RenormOptions {
    /// Ray-period bound for the portraits tried by the classification.
    pub period_bound: usize,
    pub m_max: usize,
    /// Seeds per side of the Newton grid locating `α`.
    pub seed_grid: usize,
}

impl Default for RenormOptions {
    fn default() -> Self {
        RenormOptions { period_bound: 6, m_max: DEFAULT_M_MAX, seed_grid: 16 }
    }
}

/// Outcome of trying one choice of `γ`.
#[derive(Debug, Clone)]
pub struct Candidate {
    /// `None` for `γ = β`.
    pub gamma: Option<DividingCycle>,
    pub beta: Complex64,
    pub result: Result<(usize, usize, usize, PeriodicPoint, OrbitPortrait), RenormError>,
}

/// All `γ` candidates up to `bounds`, evaluated once; answers for smaller
/// bounds are read off without recomputation.
pub struct RenormSearch {
    map: QuadraticMap,
    bounds: Bounds,
    options: RenormOptions,
    pub candidates: Vec<Candidate>,
    pub excluded: Vec<String>,
    class: OnceLock<Result<Classification, RenormError>>,
}

impl RenormSearch {
    pub fn new(map: &QuadraticMap, bounds: Bounds, options: RenormOptions) -> Result<Self, RenormError> {
        let mut search =
            RenormSearch {
            map: *map,
            bounds,
            options,
            candidates: Vec::new(),
            excluded: Vec::new(),
            class: OnceLock::new(),
        };
        if bounds.r == 0 || bounds.q == 0 || bounds.n == 0 {
            return Ok(search);
        }
        let found = find_dividing_cycles(map, bounds.r.max(bounds.q))?;
        search.excluded = found.excluded;
        let beta = beta_point(map)?;
        if let Some(fixed) = found.cycles.iter().find(|c| c.portrait.period_t() == 1) {
            let result = beta_data(map, fixed, bounds);
            search.candidates.push(Candidate { gamma: None, beta, result });
        }
        let mut cycles: Vec<DividingCycle> =
            found.cycles.into_iter().filter(|c| c.portrait.ray_count_r() <= bounds.r).collect();
        cycles.sort_by_key(|c| (c.portrait.ray_count_r(), c.portrait.period_t()));
        for gamma in cycles {
            let result = alpha_data(map, &gamma, bounds, &options);
            search.candidates.push(Candidate { gamma: Some(gamma), beta, result });
        }
        Ok(search)
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    /// Lexicographically first admissible triple within `bounds`
    /// (componentwise at most the search bounds).
    pub fn best(&self, bounds: Bounds) -> Result<RenormData, RenormError> {
        let mut first_failure: Option<RenormError> = None;
        let mut best: Option<(&Candidate, (usize, usize, usize))> = None;
        for c in &self.candidates {
            match &c.result {
                Ok((r, q, n, _, _)) if bounds.admits(*r, *q, *n) => {
                    if best.map_or(true, |(_, t)| (*r, *q, *n) < t) {
                        best = Some((c, (*r, *q, *n)));
                    }
                }
                Ok((r, q, n, _, _)) => {
                    let stage = if *r > bounds.r {
                        Stage::NoDividingCycle
                    } else if *q > bounds.q {
                        Stage::ValenceExceeded
                    } else {
                        Stage::EscapeTimeExceeded
                    };
                    first_failure.get_or_insert(RenormError::not_satisfied(stage, format!("(r,q,n)=({r},{q},{n})")));
                }
                Err(e) => {
                    if c.gamma.as_ref().map_or(1, |g| g.portrait.ray_count_r()) <= bounds.r {
                        first_failure.get_or_insert(e.clone());
                    }
                }
            }
        }
        match best {
            Some((c, _)) => self.finish(c),
            None => Err(first_failure.unwrap_or_else(|| {
                RenormError::not_satisfied(Stage::NoDividingCycle, format!("r <= {}", bounds.r))
            })),
        }
    }

    fn finish(&self, c: &Candidate) -> Result<RenormData, RenormError> {
        let (r, q, n, alpha_point, alpha_portrait) = c.result.clone().expect("admissible candidate");
        let k = r * q * n;
        let class = self
            .class
            .get_or_init(|| classify_first(&self.map, self.options.period_bound, self.options.m_max))
            .clone()?;
        let gamma_point = match &c.gamma {
            Some(g) => g.point.clone(),
            None => find_periodic_point(&self.map, 1, c.beta)?,
        };
        Ok(RenormData {
            r,
            q,
            n,
            k,
            lambda: k + 1 + 2 * r,
            period_p: class.period,
            kind: class.kind,
            gamma_portrait: c.gamma.as_ref().map(|g| g.portrait.clone()),
            gamma_point,
            alpha_portrait,
            alpha_point,
            verified_up_to: class.verified_up_to,
        })
    }
}

/// Shortest-period renormalization among dividing cycles of ray period at
/// most `period_bound` (primitive preferred on ties).
pub fn classify_first(map: &QuadraticMap, period_bound: usize, m_max: usize) -> Result<Classification, RenormError> {
    let cycles = find_dividing_cycles(map, period_bound)?;
    let mut best: Option<Classification> = None;
    for c in &cycles.cycles {
        let cl = classify_renormalization(map, &c.portrait, m_max)?;
        if cl.kind == RenormKind::None {
            continue;
        }
        let key = |x: &Classification| (x.period, x.kind != RenormKind::Primitive);
        if best.as_ref().map_or(true, |b| key(&cl) < key(b)) {
            best = Some(cl);
        }
    }
    Ok(best.unwrap_or_else(|| Classification::none(m_max)))
}

/// The landing point of the ray 0.
fn beta_point(map: &QuadraticMap) -> Result<Complex64, RenormError> {
    let tr = land_ray(map, &Angle::zero(), map.landing_tol)?;
    let seed = tr.landing_point.expect("landed ray");
    Ok(find_periodic_point(map, 1, seed)?.location)
}

/// Escape time of `f^{rqm}(0)` from the critical depth-1 piece of `apz`.
fn escape_time(apz: &Puzzle, r: usize, q: usize, bound: usize) -> Result<usize, RenormError> {
    let central = apz.critical_index(1).expect("critical piece");
    for m in 1..=bound {
        if apz.orbit_piece(1, r * q * m).map_err(proximity)? != central {
            return Ok(m);
        }
    }
    Err(RenormError::not_satisfied(
        Stage::EscapeTimeExceeded,
        format!("f^(rqm)(0) stays in the central domain for m <= {bound}"),
    ))
}

/// `γ = β`, `r = 1`: `α` is the dividing fixed point.
fn beta_data(
    map: &QuadraticMap,
    fixed: &DividingCycle,
    bounds: Bounds,
) -> Result<(usize, usize, usize, PeriodicPoint, OrbitPortrait), RenormError> {
    let q = fixed.portrait.valence_s();
    if q > bounds.q {
        return Err(RenormError::not_satisfied(Stage::ValenceExceeded, format!("q = {q}")));
    }
    let apz = build_puzzle(map, &fixed.portrait, 1)?;
    let n = escape_time(&apz, 1, q, bounds.n)?;
    Ok((1, q, n, fixed.point.clone(), fixed.portrait.clone()))
}

/// `(r, q, n)` obtained from `γ`, or the stage at which it fails.
fn alpha_data(
    map: &QuadraticMap,
    gamma: &DividingCycle,
    bounds: Bounds,
    options: &RenormOptions,
) -> Result<(usize, usize, usize, PeriodicPoint, OrbitPortrait), RenormError> {
    let r = gamma.portrait.ray_count_r();
    let gpz = build_puzzle(map, &gamma.portrait, 1)?;
    let alpha = find_alpha(map, &gpz, r, options.seed_grid)?;
    if !alpha.is_repelling() {
        return Err(RenormError::not_satisfied(
            Stage::AlphaNotRepelling,
            format!("|multiplier| = {:.6}", alpha.multiplier.norm()),
        ));
    }
    let alpha_portrait = alpha_rays(map, &gpz, &alpha, bounds.q)?;
    let q = alpha_portrait.valence_s();
    let apz = build_puzzle(map, &alpha_portrait, 1)?;
    let n = escape_time(&apz, r, q, bounds.n)?;
    let gcrit = gpz.critical_index(1).expect("critical piece");
    for j in 1..q * n {
        if gpz.orbit_piece(1, r * j).map_err(proximity)? != gcrit {
            return Err(RenormError::not_satisfied(Stage::OrbitEscapes, format!("f^{}(0) left Y^1", r * j)));
        }
    }
    let mut point = apz.cycle_points()[0].clone();
    point.dividing = Some(true);
    Ok((r, q, n, point, alpha_portrait))
}

/// The fixed point of `f^r` in the critical depth-1 piece of `pz`.
fn find_alpha(map: &QuadraticMap, pz: &Puzzle, r: usize, grid: usize) -> Result<PeriodicPoint, RenormError> {
    let crit = pz.critical_index(1).expect("critical piece");
    let poly = pz.polygon(1, crit)?;
    let (lo, hi) = poly.bbox();
    let mut seeds = Vec::new();
    let g = grid.max(2);
    for i in 0..g {
        for j in 0..g {
            let x = lo.re + (hi.re - lo.re) * (i as f64 + 0.5) / g as f64;
            let y = lo.im + (hi.im - lo.im) * (j as f64 + 0.5) / g as f64;
            let z = Complex64::new(x, y);
            if poly.contains(z) {
                seeds.push(z);
            }
        }
    }
    seeds.extend((0..8).map(|j| map.iterate(Complex64::zero(), r * j)));
    let found: Vec<PeriodicPoint> = seeds
        .par_iter()
        .filter_map(|&s| match find_periodic_point(map, r, s) {
            Ok(p) => Some(p),
            Err(DynamicsError::Superattracting { location, multiplier }) => Some(PeriodicPoint {
                location,
                period: exact_period(map, location, r),
                multiplier,
                dividing: None,
                landing_angles: None,
            }),
            Err(_) => None,
        })
        .collect();
    let mut distinct: Vec<PeriodicPoint> = Vec::new();
    for p in found {
        if distinct.iter().all(|d| (d.location - p.location).norm() > 1e-7) {
            distinct.push(p);
        }
    }
    let inside: Vec<PeriodicPoint> =
        distinct.into_iter().filter(|p| matches!(pz.locate(1, p.location), Ok(i) if i == crit)).collect();
    match inside.len() {
        1 => Ok(inside.into_iter().next().expect("one point")),
        0 => Err(RenormError::not_satisfied(Stage::AlphaMissing, format!("r = {r}"))),
        k => Err(RenormError::SkeletonProximity(format!("{k} fixed points of f^{r} located in the central domain"))),
    }
}

fn exact_period(map: &QuadraticMap, z: Complex64, period: usize) -> usize {
    (1..=period)
        .filter(|d| period % d == 0)
        .find(|&d| (map.iterate(z, d) - z).norm() < 1e-9 * (1.0 + z.norm()))
        .unwrap_or(period)
}

/// Portrait of the cycle of `alpha`, from the rays of period at most
/// `period(alpha) * q_bound` whose itinerary through the depth-0 pieces of
/// `pz` is that of `alpha`.
fn alpha_rays(map: &QuadraticMap, pz: &Puzzle, alpha: &PeriodicPoint, q_bound: usize) -> Result<OrbitPortrait, RenormError> {
    let t = alpha.period;
    let orbit = map.orbit(alpha.location, t - 1);
    let mut itinerary = Vec::with_capacity(t);
    for &z in &orbit {
        let idx = pz.locate(0, z).map_err(proximity)?;
        itinerary.push(pz.piece(0, idx).arcs);
    }
    for j in 1..=q_bound {
        let rho = t * j;
        if rho > 62 {
            break;
        }
        let cands = itinerary_angles(&itinerary, rho as u32);
        let landed: Vec<Option<Complex64>> = cands
            .par_iter()
            .map(|a| land_ray(map, a, map.landing_tol).ok().and_then(|tr| tr.landing_point))
            .collect();
        let at_alpha: Vec<Angle> = cands
            .iter()
            .zip(&landed)
            .filter(|(_, p)| p.map_or(false, |p| (p - alpha.location).norm() < map.cluster_tol))
            .map(|(a, _)| a.clone())
            .collect();
        if at_alpha.is_empty() {
            continue;
        }
        if at_alpha.len() < 2 {
            return Err(RenormError::not_satisfied(Stage::AlphaNotDividing, format!("one ray {}", at_alpha[0])));
        }
        let classes: Vec<Vec<Angle>> =
            (0..t).map(|i| at_alpha.iter().map(|a| a.double_n(i as u32)).collect()).collect();
        return validate_portrait(&classes).map_err(|e| {
            RenormError::not_satisfied(Stage::AlphaNotDividing, format!("rays at alpha do not form a portrait: {e}"))
        });
    }
    Err(RenormError::not_satisfied(
        Stage::ValenceExceeded,
        format!("no rays of period <= {} land at alpha", t * q_bound),
    ))
}

/// Angles `θ` of exact period `rho` with `2^i θ` in `arcs[i mod len]` for
/// every `i`, found by a search over binary digits pruned with intervals.
pub fn itinerary_angles(arcs: &[Vec<(Angle, Angle)>], rho: u32) -> Vec<Angle> {
    let float: Vec<Vec<(f64, f64)>> = arcs
        .iter()
        .map(|a| a.iter().map(|(x, y)| (x.to_f64(), fraction(&x.ccw_distance(y)))).collect())
        .collect();
    let mut out = BTreeSet::new();
    let mut stack: Vec<(u64, u32)> = vec![(0, 0)];
    let den = (1u64 << rho) - 1;
    while let Some((bits, len)) = stack.pop() {
        if len == rho {
            if bits == 0 || bits == den {
                continue;
            }
            let a = Angle::new(bits, den).expect("positive denominator");
            if a.period() != Some(rho as usize) {
                continue;
            }
            let ok = (0..rho as usize).all(|i| {
                let b = a.double_n(i as u32);
                arcs[i % arcs.len()].iter().any(|(x, y)| b.in_open_arc(x, y))
            });
            if ok {
                out.insert(a);
            }
            continue;
        }
        for bit in [0u64, 1] {
            let nb = (bits << 1) | bit;
            let nl = len + 1;
            let feasible = (0..nl).all(|i| {
                let width = nl - i;
                let prefix = nb & ((1u64 << width) - 1);
                let lo = prefix as f64 / (1u64 << width) as f64;
                let hi = lo + 1.0 / (1u64 << width) as f64;
                meets(&float[i as usize % float.len()], lo, hi)
            });
            if feasible {
                stack.push((nb, nl));
            }
        }
    }
    out.into_iter().collect()
}

fn fraction(r: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(0.0)
}

/// Whether `[lo, hi]` meets one of the arcs `(start, length)` (with slack).
fn meets(arcs: &[(f64, f64)], lo: f64, hi: f64) -> bool {
    const EPS: f64 = 1e-12;
    arcs.iter().any(|&(s, len)| {
        let d = (lo - s).rem_euclid(1.0);
        let e = (s - lo).rem_euclid(1.0);
        d < len + EPS || e <= hi - lo + EPS || d > 1.0 - EPS
    })
}

/// `(r̄, q̄, n̄)`-molecule condition with witness.
pub fn molecule_check(map: &QuadraticMap, bounds: Bounds) -> (bool, Option<RenormData>) {
    match renorm_params(map, bounds) {
        Ok(d) => (true, Some(d)),
        Err(_) => (false, None),
    }
}

pub fn renorm_params(map: &QuadraticMap, bounds: Bounds) -> Result<RenormData, RenormError> {
    renorm_params_with(map, bounds, RenormOptions::default())
}

pub fn renorm_params_with(map: &QuadraticMap, bounds: Bounds, options: RenormOptions) -> Result<RenormData, RenormError> {
    RenormSearch::new(map, bounds, options)?.best(bounds)
}

/// `E^0 ⋑ E^1 ⋑ ...` in the α-puzzle.
#[derive(Debug, Clone, Serialize)]
pub struct PrincipalNest {
    pub levels: Vec<PuzzlePiece>,
    /// `l_n` with `g_n = f^{l_n} : E^n -> E^{n-1}`.
    pub return_times: Vec<usize>,
    pub height_chi: usize,
    pub terminated: bool,
}

impl PrincipalNest {
    pub fn depths(&self) -> Vec<usize> {
        self.levels.iter().map(|p| p.depth()).collect()
    }
}

/// First return time of the critical orbit to the critical piece of
/// `depth`, searched up to `max_time`.
fn first_return(pz: &Puzzle, depth: usize, max_time: usize) -> Result<usize, RenormError> {
    let crit = pz.critical_index(depth).expect("critical piece");
    for l in 1..=max_time {
        if pz.orbit_piece(depth, l).map_err(proximity)? == crit {
            return Ok(l);
        }
    }
    Err(RenormError::TimeBudgetExceeded(max_time))
}

/// Builds the nest by first returns of the critical orbit. `alpha` is the
/// α-puzzle; it is deepened as needed.
pub fn build_nest(
    alpha: &mut Puzzle,
    data: &RenormData,
    max_levels: usize,
    max_time: usize,
) -> Result<PrincipalNest, RenormError> {
    let mut depth = data.e0_depth();
    alpha.extend_to(depth)?;
    let mut levels = vec![alpha.piece(depth, alpha.critical_index(depth).expect("critical piece"))];
    let mut return_times = Vec::new();
    let mut terminated = false;
    let mut budget = max_time;
    while levels.len() <= max_levels {
        let l = first_return(alpha, depth, budget)?;
        budget = budget.saturating_sub(l);
        let next = depth + l;
        alpha.extend_to(next)?;
        let crit = alpha.critical_index(next).expect("critical piece");
        // degree two: the intermediate images avoid the critical point
        for j in 1..l {
            let img = alpha.image_k(next, crit, j);
            if alpha.critical_index(next - j) == Some(img) {
                return Err(RenormError::NotDegreeTwo(levels.len()));
            }
        }
        if alpha.image_k(next, crit, l) != alpha.critical_index(depth).expect("critical piece") {
            return Err(RenormError::NotDegreeTwo(levels.len()));
        }
        levels.push(alpha.piece(next, crit));
        return_times.push(l);
        depth = next;
        // the return map's critical orbit never leaves E^n
        let reps = match alpha.critical_period() {
            Some(per) => per,
            None => (budget / l).min(64),
        };
        let mut stays = true;
        for m in 1..=reps {
            if alpha.orbit_piece(depth, l * m).map_err(proximity)? != crit {
                stays = false;
                break;
            }
        }
        if stays {
            terminated = true;
            break;
        }
    }
    Ok(PrincipalNest { height_chi: levels.len() - 1, levels, return_times, terminated })
}

/// Cached α-puzzle and nest for a parameter satisfying the molecule
/// condition.
pub struct RenormContext {
    pub data: RenormData,
    /// `None` when `γ = β`.
    pub gamma: Option<Puzzle>,
    pub alpha: Puzzle,
}

impl RenormContext {
    pub fn new(map: &QuadraticMap, data: RenormData, depth: usize) -> Result<Self, RenormError> {
        let gamma = match &data.gamma_portrait {
            Some(p) => Some(build_puzzle(map, p, 1)?),
            None => None,
        };
        let alpha = build_puzzle(map, &data.alpha_portrait, depth)?;
        Ok(RenormContext { data, gamma, alpha })
    }
}
