//! The Yoccoz puzzle of a dividing cycle.
//!
//! Pieces are combinatorial objects (see [`comb`]): a depth-`m` piece is a
//! cyclically ordered list of open arcs of the circle at infinity whose end
//! rays are preimages of the cycle's rays. The only numerical input needed
//! to build the combinatorics is, at every depth, which piece contains the
//! critical value. Planar polygons are materialized lazily from traced rays
//! whenever a point has to be located.

pub mod comb;
pub mod checks;
pub mod geometry;

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angles::{Angle, OrbitPortrait};
use crate::dynamics::{
    cluster_landings, find_periodic_point, land_ray, solve_preimage, trace_ray, DynamicsError, PeriodicPoint,
    QuadraticMap, RayTrace,
};
use comb::{Level, Vertex};
use geometry::{boundary_gap, Polygon};

#[derive(Debug, Error, Clone)]
pub enum PuzzleError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("rays of class {class} do not land together (numerical classes {found:?})")]
    PortraitMismatch { class: usize, found: Vec<Vec<String>> },
    #[error("cycle point {0} is not repelling")]
    NotRepelling(usize),
    #[error("point {point} lies within {tol:e} of the depth-{depth} skeleton")]
    OnBoundary { depth: usize, point: Complex64, tol: f64 },
    #[error("point {0} is outside the depth-0 equipotential")]
    OutsideDomain(Complex64),
    #[error("depth {depth} exceeds the puzzle's maximal depth {max}")]
    DepthExceeded { depth: usize, max: usize },
    #[error("critical value piece has {0} vertices, expected 1")]
    VertexCountViolation(usize),
    #[error("{0} is not a vertex of the depth-{1} puzzle")]
    NotAVertex(Complex64, usize),
    #[error("buffers {0} and {1} overlap")]
    BufferOverlap(usize, usize),
    #[error("buffer at vertex {0} is not a univalent pullback")]
    NonUnivalentPullback(usize),
    #[error("{0}")]
    Inconclusive(String),
}

/// A (possibly geometric) puzzle piece.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PuzzlePiece {
    /// (ray depth, equipotential depth).
    pub bidepth: (usize, usize),
    /// Indices of the ordinary pieces of ray depth `bidepth.0` making it up.
    pub members: Vec<usize>,
    /// Open counterclockwise arcs at infinity, sorted by start angle.
    pub arcs: Vec<(Angle, Angle)>,
    pub boundary_angles: Vec<Angle>,
    /// Pairs of consecutive boundary rays meeting at a vertex.
    pub vertex_angles: Vec<(Angle, Angle)>,
    /// Vertex ids in boundary order.
    pub vertices: Vec<usize>,
    pub is_critical: bool,
    pub component_count: usize,
}

impl PuzzlePiece {
    pub fn depth(&self) -> usize {
        self.bidepth.0
    }

    /// Counterclockwise length of the arcs at infinity.
    pub fn total_length(&self) -> BigRational {
        self.arcs.iter().fold(BigRational::zero(), |acc, (x, y)| acc + x.ccw_distance(y))
    }

    /// Whether every closed arc of `self` lies in an open arc of `other`.
    pub fn arcs_compactly_inside(&self, other: &PuzzlePiece) -> bool {
        self.arcs.iter().all(|(x, y)| {
            other.arcs.iter().any(|(a, b)| {
                x.in_open_arc(a, b) && y.in_open_arc(a, b) && a.ccw_distance(x) < a.ccw_distance(y)
            })
        })
    }

    /// Whether every open arc of `self` lies in a closed arc of `other`.
    pub fn arcs_inside(&self, other: &PuzzlePiece) -> bool {
        self.arcs.iter().all(|(x, y)| {
            other.arcs.iter().any(|(a, b)| {
                let len = a.ccw_distance(b);
                let dx = a.ccw_distance(x);
                let dy = if y == b { len.clone() } else { a.ccw_distance(y) };
                (x == a || x.in_open_arc(a, b)) && dy <= len && dx < dy
            })
        })
    }

    pub fn contains_angle(&self, t: &Angle) -> bool {
        self.arcs.iter().any(|(x, y)| t.in_open_arc(x, y))
    }

    pub fn shares_vertex(&self, other: &PuzzlePiece) -> bool {
        self.vertices.iter().any(|v| other.vertices.contains(v))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PuzzleSummary {
    pub portrait: OrbitPortrait,
    pub cycle: Vec<Complex64>,
    pub max_depth: usize,
    pub equipotential_depth0: f64,
    pub pieces: Vec<PieceRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PieceRecord {
    pub depth: usize,
    pub angles: Vec<Angle>,
    pub arcs: Vec<(Angle, Angle)>,
    pub vertices: Vec<usize>,
    pub critical: bool,
    pub critical_value: bool,
}

/// Result of the exact structural checks at one depth.
#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub depth: usize,
    pub piece_count: usize,
    pub tiling: bool,
    pub refinement: bool,
    pub covering: bool,
    pub symmetric_critical: bool,
}

pub struct Puzzle {
    map: QuadraticMap,
    portrait: OrbitPortrait,
    cycle_points: Vec<PeriodicPoint>,
    max_depth: usize,
    levels: Vec<Level>,
    vertices: Vec<Vertex>,
    critical_value: Vec<usize>,
    orbit_period: Option<usize>,
    resolution: f64,
    rays: RwLock<HashMap<Angle, Arc<RayTrace>>>,
    polygons: RwLock<HashMap<(usize, usize), Arc<Polygon>>>,
    orbit_memo: RwLock<HashMap<(usize, usize), usize>>,
    orbit_cache: RwLock<OrbitCache>,
    vertex_points: RwLock<HashMap<usize, Complex64>>,
}

/// Builds the puzzle of the dividing cycle whose rays form `portrait`.
pub fn build_puzzle(map: &QuadraticMap, portrait: &OrbitPortrait, max_depth: usize) -> Result<Puzzle, PuzzleError> {
    let angles = portrait.angles();
    let classes = cluster_landings(map, &angles, map.cluster_tol);
    if let Some(bad) = classes.iter().find(|c| c.unresolved) {
        let a = &bad.angles[0];
        return Err(land_ray(map, a, map.landing_tol).err().map(PuzzleError::from).unwrap_or_else(|| {
            PuzzleError::Inconclusive(format!("ray {a} did not land"))
        }));
    }
    let found = || classes.iter().map(|c| c.angles.iter().map(|a| a.to_string()).collect()).collect();
    let mut cycle_points = Vec::new();
    for (j, class) in portrait.classes().iter().enumerate() {
        let hit = classes.iter().find(|c| c.angles.contains(&class[0]));
        let landing = match hit {
            Some(c) if &c.angles == class => c.landing_point.expect("resolved class"),
            _ => return Err(PuzzleError::PortraitMismatch { class: j, found: found() }),
        };
        let mut p = find_periodic_point(map, portrait.period_t(), landing)?;
        if !p.is_repelling() {
            return Err(PuzzleError::NotRepelling(j));
        }
        p.dividing = Some(true);
        p.landing_angles = Some(class.clone());
        cycle_points.push(p);
    }
    let orbit_period = (1..=2000).find(|&n| map.iterate(Complex64::zero(), n).norm() < 1e-12);
    let (l0, vertices) = comb::depth_zero(portrait);
    let resolution = (10.0 * map.landing_tol).max(1e-9);
    let mut puzzle = Puzzle {
        map: *map,
        portrait: portrait.clone(),
        cycle_points,
        max_depth,
        levels: vec![l0],
        vertices,
        critical_value: Vec::new(),
        orbit_period,
        resolution,
        rays: RwLock::new(HashMap::new()),
        polygons: RwLock::new(HashMap::new()),
        orbit_memo: RwLock::new(HashMap::new()),
        orbit_cache: RwLock::new(OrbitCache::new()),
        vertex_points: RwLock::new(HashMap::new()),
    };
    let x0 = puzzle.locate_orbit(0, 1)?;
    puzzle.critical_value.push(x0);
    puzzle.max_depth = 0;
    puzzle.extend_to(max_depth)?;
    Ok(puzzle)
}

/// The critical orbit as computed in floating point.
#[derive(Debug)]
struct OrbitCache {
    points: Vec<Complex64>,
    seen: HashMap<(u64, u64), usize>,
    /// `(start, period)` once a point repeats exactly.
    cycle: Option<(usize, usize)>,
}

impl OrbitCache {
    fn new() -> Self {
        let z = Complex64::zero();
        OrbitCache { points: vec![z], seen: HashMap::from([((z.re.to_bits(), z.im.to_bits()), 0)]), cycle: None }
    }

    fn key(&self, i: usize) -> Option<usize> {
        match self.cycle {
            Some((s, p)) if i >= s => Some(s + (i - s) % p),
            _ if i < self.points.len() => Some(i),
            _ => None,
        }
    }

    fn extend(&mut self, map: &QuadraticMap, i: usize) {
        while self.cycle.is_none() && self.points.len() <= i {
            let z = map.f(*self.points.last().expect("nonempty"));
            let n = self.points.len();
            match self.seen.get(&(z.re.to_bits(), z.im.to_bits())) {
                Some(&s) => self.cycle = Some((s, n - s)),
                None => {
                    self.seen.insert((z.re.to_bits(), z.im.to_bits()), n);
                    self.points.push(z);
                }
            }
        }
    }
}

impl Puzzle {
    pub fn map(&self) -> &QuadraticMap {
        &self.map
    }
    pub fn portrait(&self) -> &OrbitPortrait {
        &self.portrait
    }
    pub fn cycle_points(&self) -> &[PeriodicPoint] {
        &self.cycle_points
    }
    pub fn max_depth(&self) -> usize {
        self.max_depth
    }
    pub fn equipotential_depth0(&self) -> f64 {
        self.map.base_potential()
    }
    /// Distance below which a point counts as lying on the skeleton.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }
    /// Period of the critical orbit when it is (numerically) periodic.
    pub fn critical_period(&self) -> Option<usize> {
        self.orbit_period
    }

    /// Adds levels up to `depth`, keeping the ray and polygon caches.
    pub fn extend_to(&mut self, depth: usize) -> Result<(), PuzzleError> {
        while self.max_depth < depth {
            let m = self.max_depth;
            let pivot = self.levels[m].pieces[self.critical_value[m]].interior_angle();
            let known = self.vertices.len();
            let next = comb::next_level(&self.levels[m], &mut self.vertices, &pivot);
            self.levels.push(next);
            self.max_depth = m + 1;
            match self.locate_orbit(m + 1, 1) {
                Ok(xm) => self.critical_value.push(xm),
                Err(e) => {
                    self.levels.pop();
                    self.vertices.truncate(known);
                    self.max_depth = m;
                    return Err(e);
                }
            }
        }
        Ok(())
    }

    /// Ordinary depth-`m` pieces having vertex `v`.
    pub fn pieces_at_vertex(&self, depth: usize, v: usize) -> Vec<usize> {
        self.levels[depth].pieces_at_vertex(v)
    }

    /// Index of the depth-`target` piece containing piece `(depth, index)`.
    pub fn ancestor(&self, depth: usize, index: usize, target: usize) -> usize {
        let a = self.levels[depth].pieces[index].interior_angle();
        self.levels[target].piece_of_angle(&a).expect("interior angle")
    }

    pub fn piece_count(&self, depth: usize) -> usize {
        self.levels[depth].pieces.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_angles(&self, v: usize) -> &[Angle] {
        &self.vertices[v].angles
    }

    pub fn vertex_depth(&self, v: usize) -> usize {
        self.vertices[v].born
    }

    pub fn vertex_image(&self, v: usize) -> usize {
        self.vertices[v].image
    }

    /// Id of the vertex where ray `a` lands, if `a` is a ray of some level.
    pub fn vertex_of_angle(&self, a: &Angle) -> Option<usize> {
        self.levels.last().and_then(|l| l.vertex_of.get(a).copied())
    }

    fn check_depth(&self, depth: usize) -> Result<(), PuzzleError> {
        if depth > self.max_depth {
            Err(PuzzleError::DepthExceeded { depth, max: self.max_depth })
        } else {
            Ok(())
        }
    }

    pub fn piece(&self, depth: usize, index: usize) -> PuzzlePiece {
        let level = &self.levels[depth];
        let p = &level.pieces[index];
        let n = p.arcs.len();
        let vertex_angles = (0..n).map(|i| (p.arcs[i].1.clone(), p.arcs[(i + 1) % n].0.clone())).collect();
        let mut arcs = p.arcs.clone();
        arcs.sort();
        PuzzlePiece {
            bidepth: (depth, depth),
            members: vec![index],
            arcs,
            boundary_angles: p.boundary_angles(),
            vertex_angles,
            vertices: p.vertices.clone(),
            is_critical: level.critical == Some(index),
            component_count: 1,
        }
    }

    pub fn pieces(&self, depth: usize) -> Vec<PuzzlePiece> {
        (0..self.piece_count(depth)).map(|i| self.piece(depth, i)).collect()
    }

    /// Index of the critical piece `Y^m`, `m >= 1`.
    pub fn critical_index(&self, depth: usize) -> Option<usize> {
        self.levels.get(depth).and_then(|l| l.critical)
    }

    /// Index of the depth-`m` piece containing the critical value.
    pub fn critical_value_index(&self, depth: usize) -> usize {
        self.critical_value[depth]
    }

    /// Ordinary piece containing the ray angle `a` at `depth`.
    pub fn piece_of_angle(&self, depth: usize, a: &Angle) -> Option<usize> {
        self.levels[depth].piece_of_angle(a)
    }

    /// Image of a depth-`m` piece (`m >= 1`) under `f`.
    pub fn image_index(&self, depth: usize, index: usize) -> usize {
        let a = self.levels[depth].pieces[index].interior_angle().double();
        self.levels[depth - 1].piece_of_angle(&a).expect("interior angle")
    }

    /// Image of a piece under `f^k`.
    pub fn image_k(&self, depth: usize, index: usize, k: usize) -> usize {
        let a = self.levels[depth].pieces[index].interior_angle().double_n(k as u32);
        self.levels[depth - k].piece_of_angle(&a).expect("interior angle")
    }

    /// The one or two depth-`m+1` pullbacks of a depth-`m` piece.
    pub fn preimage_indices(&self, depth: usize, index: usize) -> Vec<usize> {
        let (p, q) = self.levels[depth].pieces[index].interior_angle().halves();
        let level = &self.levels[depth + 1];
        let a = level.piece_of_angle(&p).expect("interior angle");
        let b = level.piece_of_angle(&q).expect("interior angle");
        if a == b {
            vec![a]
        } else {
            vec![a, b]
        }
    }

    /// The critical value piece `X^0` with the single-vertex check.
    pub fn critical_value_piece(&self) -> Result<PuzzlePiece, PuzzleError> {
        let p = self.piece(0, self.critical_value[0]);
        if p.vertices.len() != 1 {
            return Err(PuzzleError::VertexCountViolation(p.vertices.len()));
        }
        Ok(p)
    }

    /// `f^i(0)`, reduced modulo the period when the critical orbit is periodic.
    pub fn orbit_point(&self, i: usize) -> Complex64 {
        let i = self.orbit_key(i);
        self.orbit_cache.read().expect("orbit lock").points[i]
    }

    /// Reduces `i` modulo the orbit period, or modulo the cycle the
    /// floating-point orbit falls into.
    fn orbit_key(&self, i: usize) -> usize {
        let i = self.orbit_period.map_or(i, |p| i % p);
        {
            let cache = self.orbit_cache.read().expect("orbit lock");
            if let Some(k) = cache.key(i) {
                return k;
            }
        }
        let mut cache = self.orbit_cache.write().expect("orbit lock");
        cache.extend(&self.map, i);
        cache.key(i).expect("extended")
    }

    /// Index of `Y^m(f^i(0))`.
    pub fn orbit_piece(&self, depth: usize, i: usize) -> Result<usize, PuzzleError> {
        self.check_depth(depth)?;
        self.locate_orbit(depth, i)
    }

    fn locate_orbit(&self, depth: usize, i: usize) -> Result<usize, PuzzleError> {
        let key = (depth, self.orbit_key(i));
        if let Some(&v) = self.orbit_memo.read().expect("memo lock").get(&key) {
            return Ok(v);
        }
        let z = self.orbit_point(i);
        let idx = if depth == 0 {
            self.locate_depth0(z)?
        } else {
            let q = self.locate_orbit(depth - 1, i + 1)?;
            self.choose_pullback(depth, q, z)?
        };
        self.orbit_memo.write().expect("memo lock").insert(key, idx);
        Ok(idx)
    }

    fn choose_pullback(&self, depth: usize, image: usize, z: Complex64) -> Result<usize, PuzzleError> {
        let cands = self.preimage_indices(depth - 1, image);
        if cands.len() == 1 {
            return Ok(cands[0]);
        }
        let mut inside = Vec::new();
        for &c in &cands {
            let poly = self.polygon(depth, c)?;
            if poly.boundary_distance(z) < self.resolution {
                return Err(PuzzleError::OnBoundary { depth, point: z, tol: self.resolution });
            }
            if poly.contains(z) {
                inside.push(c);
            }
        }
        match inside.as_slice() {
            [one] => Ok(*one),
            _ => Err(PuzzleError::Inconclusive(format!(
                "point {z} found in {} of the two depth-{depth} pullback candidates",
                inside.len()
            ))),
        }
    }

    fn locate_depth0(&self, z: Complex64) -> Result<usize, PuzzleError> {
        let mut inside = Vec::new();
        for i in 0..self.piece_count(0) {
            let poly = self.polygon(0, i)?;
            if poly.boundary_distance(z) < self.resolution {
                return Err(PuzzleError::OnBoundary { depth: 0, point: z, tol: self.resolution });
            }
            if poly.contains(z) {
                inside.push(i);
            }
        }
        match inside.as_slice() {
            [one] => Ok(*one),
            [] => Err(PuzzleError::OutsideDomain(z)),
            _ => Err(PuzzleError::Inconclusive(format!("point {z} lies in several depth-0 pieces"))),
        }
    }

    /// Index of `Y^m(z)`.
    pub fn locate(&self, depth: usize, z: Complex64) -> Result<usize, PuzzleError> {
        self.check_depth(depth)?;
        let orbit = self.map.orbit(z, depth);
        let mut idx = self.locate_depth0(orbit[depth])?;
        for m in 1..=depth {
            let w = orbit[depth - m];
            idx = if idx == self.critical_value[m - 1] {
                self.critical_index(m).expect("critical piece")
            } else {
                self.choose_pullback(m, idx, w)?
            };
        }
        Ok(idx)
    }

    /// `Y^m(z)`.
    pub fn piece_at(&self, depth: usize, z: Complex64) -> Result<PuzzlePiece, PuzzleError> {
        Ok(self.piece(depth, self.locate(depth, z)?))
    }

    fn ray(&self, a: &Angle) -> Result<Arc<RayTrace>, PuzzleError> {
        if let Some(r) = self.rays.read().expect("ray lock").get(a) {
            return Ok(r.clone());
        }
        let t = Arc::new(land_ray(&self.map, a, self.map.landing_tol)?);
        self.rays.write().expect("ray lock").insert(a.clone(), t.clone());
        Ok(t)
    }

    fn prefetch_rays(&self, angles: &[Angle]) -> Result<(), PuzzleError> {
        let missing: Vec<Angle> = {
            let cache = self.rays.read().expect("ray lock");
            angles.iter().filter(|a| !cache.contains_key(*a)).cloned().collect()
        };
        let traced: Vec<Result<(Angle, RayTrace), DynamicsError>> = missing
            .par_iter()
            .map(|a| land_ray(&self.map, a, self.map.landing_tol).map(|t| (a.clone(), t)))
            .collect();
        let mut cache = self.rays.write().expect("ray lock");
        for r in traced {
            let (a, t) = r?;
            cache.insert(a, Arc::new(t));
        }
        Ok(())
    }

    /// Landed ray of angle `a` (memoized).
    pub fn ray_trace(&self, a: &Angle) -> Result<Arc<RayTrace>, PuzzleError> {
        self.ray(a)
    }

    /// Position of vertex `v`.
    pub fn vertex_point(&self, v: usize) -> Result<Complex64, PuzzleError> {
        if let Some(&z) = self.vertex_points.read().expect("vertex lock").get(&v) {
            return Ok(z);
        }
        let vert = &self.vertices[v];
        let z = if vert.born == 0 {
            self.cycle_points[v].location
        } else {
            let mut target = v;
            for _ in 0..vert.born {
                target = self.vertices[target].image;
            }
            let seed = self.ray(&vert.angles[0])?.landing_point.expect("landed ray");
            let w = self.cycle_points[target].location;
            solve_preimage(&self.map, vert.born, w, seed).unwrap_or(seed)
        };
        self.vertex_points.write().expect("vertex lock").insert(v, z);
        Ok(z)
    }

    /// Vertex id located within the puzzle resolution (times 100) of `z`
    /// among vertices of depth at most `depth`.
    pub fn find_vertex(&self, z: Complex64, depth: usize) -> Option<usize> {
        let tol = 100.0 * self.resolution;
        (0..self.vertices.len()).filter(|&v| self.vertices[v].born <= depth).find(|&v| {
            // forward image must hit the cycle before the exact position is computed
            let born = self.vertices[v].born;
            let mut target = v;
            for _ in 0..born {
                target = self.vertices[target].image;
            }
            let (w, dw) = self.map.iterate_with_derivative(z, born);
            let near = (w - self.cycle_points[target].location).norm() < tol * dw.norm().max(1.0);
            near && self.vertex_point(v).map_or(false, |p| (p - z).norm() < tol)
        })
    }

    fn ray_tail(&self, a: &Angle, potential: f64) -> Result<Vec<Complex64>, PuzzleError> {
        let t = self.ray(a)?;
        let start = t.potentials.iter().position(|&g| g <= potential * (1.0 + 1e-12)).unwrap_or(0);
        Ok(t.points[start..].to_vec())
    }

    /// Planar polygon of the depth-`m` piece `index` (memoized).
    pub fn polygon(&self, depth: usize, index: usize) -> Result<Arc<Polygon>, PuzzleError> {
        if let Some(p) = self.polygons.read().expect("polygon lock").get(&(depth, index)) {
            return Ok(p.clone());
        }
        let piece = &self.levels[depth].pieces[index];
        let g = self.map.depth_potential(depth);
        self.prefetch_rays(&piece.boundary_angles())?;
        let n = piece.arcs.len();
        let mut pts = Vec::new();
        for i in 0..n {
            let (x, y) = &piece.arcs[i];
            let len = x.ccw_distance(y);
            let samples = (len.clone() * BigRational::from_integer(64.into()))
                .ceil()
                .to_integer()
                .try_into()
                .unwrap_or(64usize)
                .max(2);
            let tail_x = self.ray_tail(x, g)?;
            pts.push(tail_x[0]);
            let inner: Vec<Angle> = (1..samples)
                .map(|j| x.add(&(len.clone() * BigRational::new(BigInt::from(j), BigInt::from(samples)))))
                .collect();
            let equi: Vec<Result<Complex64, DynamicsError>> = inner
                .par_iter()
                .map(|a| trace_ray(&self.map, a, g).map(|t| *t.points.last().expect("nonempty")))
                .collect();
            for p in equi {
                pts.push(p?);
            }
            let tail_y = self.ray_tail(y, g)?;
            pts.extend_from_slice(&tail_y);
            pts.push(self.vertex_point(piece.vertices[i])?);
            let (next_x, _) = &piece.arcs[(i + 1) % n];
            let mut up = self.ray_tail(next_x, g)?;
            up.reverse();
            up.pop();
            pts.extend(up);
        }
        let poly = Arc::new(Polygon::new(pts));
        self.polygons.write().expect("polygon lock").insert((depth, index), poly.clone());
        Ok(poly)
    }

    /// Union of the depth-`n` pieces attached to vertex `v`.
    pub fn star_of_vertex(&self, v: usize, depth: usize) -> Result<PuzzlePiece, PuzzleError> {
        self.check_depth(depth)?;
        let members = self.levels[depth].pieces_at_vertex(v);
        if members.is_empty() {
            return Err(PuzzleError::NotAVertex(self.vertex_point(v).unwrap_or_default(), depth));
        }
        Ok(self.union(depth, &members))
    }

    /// The star `S^n(v)` of a vertex given by its position.
    pub fn star(&self, v: Complex64, depth: usize) -> Result<PuzzlePiece, PuzzleError> {
        self.check_depth(depth)?;
        let id = self.find_vertex(v, depth).ok_or(PuzzleError::NotAVertex(v, depth))?;
        self.star_of_vertex(id, depth)
    }

    /// Geometric piece formed by several ordinary pieces of one depth.
    pub fn union(&self, depth: usize, members: &[usize]) -> PuzzlePiece {
        let mut members: Vec<usize> = members.to_vec();
        members.sort();
        members.dedup();
        let mut raw: Vec<(Angle, Angle)> =
            members.iter().flat_map(|&i| self.levels[depth].pieces[i].arcs.clone()).collect();
        raw.sort();
        // merge arcs sharing an end ray: that ray is interior to the union
        let starts: HashMap<Angle, usize> = raw.iter().enumerate().map(|(i, (x, _))| (x.clone(), i)).collect();
        let mut used = vec![false; raw.len()];
        let mut arcs = Vec::new();
        for i in 0..raw.len() {
            let entered = raw.iter().any(|(_, y)| *y == raw[i].0);
            if used[i] || entered {
                continue;
            }
            let mut j = i;
            used[j] = true;
            let start = raw[i].0.clone();
            while let Some(&k) = starts.get(&raw[j].1) {
                if used[k] {
                    break;
                }
                used[k] = true;
                j = k;
            }
            arcs.push((start, raw[j].1.clone()));
        }
        // closed chains (every arc preceded by another) are left as they were
        for i in 0..raw.len() {
            if !used[i] {
                arcs.push(raw[i].clone());
            }
        }
        arcs.sort();
        let mut vset = BTreeSet::new();
        let mut vertices = Vec::new();
        let mut vertex_angles = Vec::new();
        for &m in &members {
            let p = self.piece(depth, m);
            for (k, v) in p.vertices.iter().enumerate() {
                if vset.insert(*v) {
                    vertices.push(*v);
                }
                vertex_angles.push(p.vertex_angles[k].clone());
            }
        }
        let mut boundary: Vec<Angle> = arcs.iter().flat_map(|(x, y)| [x.clone(), y.clone()]).collect();
        boundary.sort();
        boundary.dedup();
        let critical = self.levels[depth].critical;
        PuzzlePiece {
            bidepth: (depth, depth),
            members: members.clone(),
            arcs,
            boundary_angles: boundary,
            vertex_angles,
            vertices,
            is_critical: critical.map_or(false, |c| members.contains(&c)),
            component_count: members.len(),
        }
    }

    /// Numeric minimal distance between the boundaries of two ordinary pieces.
    pub fn boundary_gap(&self, a: (usize, usize), b: (usize, usize)) -> Result<f64, PuzzleError> {
        let pa = self.polygon(a.0, a.1)?;
        let pb = self.polygon(b.0, b.1)?;
        Ok(boundary_gap(&pa, &pb))
    }

    /// Whether any depth-0 cycle vertex is a vertex of the piece.
    pub fn touches_cycle(&self, piece: &PuzzlePiece) -> bool {
        piece.vertices.iter().any(|&v| self.vertices[v].born == 0)
    }

    /// Exact tiling, refinement, covering and symmetry checks at `depth`.
    pub fn structure_report(&self, depth: usize) -> StructureReport {
        let level = &self.levels[depth];
        let n = level.angles.len();
        let mut seen = vec![0usize; n];
        for p in &level.pieces {
            for (x, _) in &p.arcs {
                let i = level.angles.binary_search(x).expect("ray angle");
                seen[i] += 1;
            }
        }
        let tiling = seen.iter().all(|&k| k == 1)
            && level.pieces.iter().all(|p| p.arcs.len() == p.vertices.len());
        let mut refinement = true;
        let mut covering = true;
        let mut symmetric = true;
        if depth >= 1 {
            let parent_level = &self.levels[depth - 1];
            for (i, p) in level.pieces.iter().enumerate() {
                let parents: BTreeSet<usize> = p
                    .arcs
                    .iter()
                    .map(|(x, y)| {
                        let mid = x.add(&(x.ccw_distance(y) / BigRational::from_integer(2.into())));
                        parent_level.piece_of_angle(&mid).expect("interior")
                    })
                    .collect();
                let parent = *parents.iter().next().expect("nonempty");
                let inside = parents.len() == 1 && {
                    let child = self.piece(depth, i);
                    child.arcs_inside(&self.piece(depth - 1, parent))
                };
                refinement &= inside;
                // covering: doubled arcs are whole arcs of the image piece
                let img = self.image_index(depth, i);
                let img_piece = &parent_level.pieces[img];
                let deg = if level.critical == Some(i) { 2 } else { 1 };
                let doubled: BTreeSet<(Angle, Angle)> =
                    p.arcs.iter().map(|(x, y)| (x.double(), y.double())).collect();
                let target: BTreeSet<(Angle, Angle)> = img_piece.arcs.iter().cloned().collect();
                let two = BigRational::from_integer(2.into());
                covering &= doubled == target
                    && p.total_length() * two == img_piece.total_length() * BigRational::from_integer(deg.into());
                covering &= (img == self.critical_value[depth - 1]) == (deg == 2);
            }
            if let Some(c) = level.critical {
                let arcs: BTreeSet<(Angle, Angle)> = level.pieces[c].arcs.iter().cloned().collect();
                let neg: BTreeSet<(Angle, Angle)> =
                    arcs.iter().map(|(x, y)| (x.antipode(), y.antipode())).collect();
                symmetric = arcs == neg;
            }
        }
        StructureReport {
            depth,
            piece_count: level.pieces.len(),
            tiling,
            refinement,
            covering,
            symmetric_critical: symmetric,
        }
    }

    /// Depth-`m` piece index containing `z`, found by testing every polygon.
    /// Returns all matches; used to check the tiling numerically.
    pub fn brute_force_pieces(&self, depth: usize, z: Complex64) -> Result<Vec<usize>, PuzzleError> {
        let mut out = Vec::new();
        for i in 0..self.piece_count(depth) {
            if self.polygon(depth, i)?.contains(z) {
                out.push(i);
            }
        }
        Ok(out)
    }

    pub fn summary(&self) -> PuzzleSummary {
        let mut pieces = Vec::new();
        for m in 0..=self.max_depth {
            for i in 0..self.piece_count(m) {
                let p = self.piece(m, i);
                pieces.push(PieceRecord {
                    depth: m,
                    angles: p.boundary_angles.clone(),
                    arcs: p.arcs.clone(),
                    vertices: p.vertices.clone(),
                    critical: p.is_critical,
                    critical_value: self.critical_value[m] == i,
                });
            }
        }
        pieces.sort_by(|a, b| (a.depth, &a.angles).cmp(&(b.depth, &b.angles)));
        PuzzleSummary {
            portrait: self.portrait.clone(),
            cycle: self.cycle_points.iter().map(|p| p.location).collect(),
            max_depth: self.max_depth,
            equipotential_depth0: self.equipotential_depth0(),
            pieces,
        }
    }
}
