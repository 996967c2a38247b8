//! Conformal moduli and extremal lengths on grid discretizations.
//!
//! A [`DomainShape`] classifies points of the plane into the interior, an
//! excluded part and the two boundary sets `A` and `B`. It is rasterized on
//! an `N × N` grid of cell centres padded by one cell on each side, so that
//! Neumann sides of the shape's bounding box fall on cell faces. The discrete
//! Dirichlet problem (`u = 0` on `A`, `u = 1` on `B`, natural conditions on
//! excluded cells) uses the five-point stencil; an edge cut by a Dirichlet
//! boundary at fraction `θ` gets conductance `w/θ`. With `E` the discrete
//! Dirichlet energy, the modulus of an annulus and the extremal distance
//! from `A` to `B` are `1/E`, and the extremal width is `E`.
//!
//! Moduli of dynamical pieces are computed for the planar domains bounded by
//! traced rays and equipotentials and are labeled as planar approximations.

pub mod reports;
pub mod shapes;
pub mod solver;

use std::collections::VecDeque;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use reports::*;
pub use shapes::*;
pub use solver::{CsrMatrix, LinearSolver, SolveStats, SolverRegistry};

/// Smallest admissible cut fraction of a boundary edge.
const MIN_CUT: f64 = 1e-2;

pub const DEFAULT_RESOLUTION: usize = 512;
pub const BUMP_RESOLUTION: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModulusError {
    #[error("no interior path joins A and B")]
    Disconnected,
    #[error("boundary set {0} is empty")]
    EmptyBoundary(char),
    #[error("solver {solver} stalled after {iterations} iterations at residual {residual:e}")]
    SolverStall { solver: String, iterations: usize, residual: f64 },
    #[error("unknown solver {0}")]
    UnknownSolver(String),
    #[error("resolution {0} is below 16")]
    Resolution(usize),
    #[error("containment not certified: {0}")]
    InconclusiveContainment(String),
    #[error("piece has {0} vertices, a bigon has 2")]
    NotABigon(usize),
    #[error("hypothesis '{bullet}' fails: {detail}")]
    HypothesisFailure { bullet: String, detail: String },
    #[error("puzzle: {0}")]
    Puzzle(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cell {
    Interior,
    Excluded,
    A,
    B,
}

pub trait DomainShape: Send + Sync {
    /// Corners `(min, max)` of a box containing the interior.
    fn bbox(&self) -> (Complex64, Complex64);
    fn classify(&self, z: Complex64) -> Cell;

    /// Fraction of the segment from the interior point `from` to `to` at which
    /// the class changes.
    fn crossing(&self, from: Complex64, to: Complex64) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..30 {
            let mid = 0.5 * (lo + hi);
            if self.classify(from + (to - from) * mid) == Cell::Interior {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn label(&self) -> String {
        "domain".into()
    }
}

/// A shape rasterized at resolution `N`.
#[derive(Clone)]
pub struct GridDomain {
    shape: Arc<dyn DomainShape>,
    pub resolution: usize,
    /// Centre of cell `(0, 0)`.
    pub origin: Complex64,
    pub hx: f64,
    pub hy: f64,
    pub cells: Vec<Cell>,
}

impl std::fmt::Debug for GridDomain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridDomain")
            .field("shape", &self.shape.label())
            .field("resolution", &self.resolution)
            .field("hx", &self.hx)
            .field("hy", &self.hy)
            .finish()
    }
}

impl GridDomain {
    pub fn new(shape: Arc<dyn DomainShape>, resolution: usize) -> Result<Self, ModulusError> {
        if resolution < 16 {
            return Err(ModulusError::Resolution(resolution));
        }
        let (lo, hi) = shape.bbox();
        let hx = (hi.re - lo.re) / (resolution - 2) as f64;
        let hy = (hi.im - lo.im) / (resolution - 2) as f64;
        let origin = Complex64::new(lo.re - 0.5 * hx, lo.im - 0.5 * hy);
        let n = resolution;
        let mut cells = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                cells.push(shape.classify(origin + Complex64::new(i as f64 * hx, j as f64 * hy)));
            }
        }
        let d = GridDomain { shape, resolution, origin, hx, hy, cells };
        if d.count(Cell::A) == 0 {
            return Err(ModulusError::EmptyBoundary('A'));
        }
        if d.count(Cell::B) == 0 {
            return Err(ModulusError::EmptyBoundary('B'));
        }
        Ok(d)
    }

    pub fn from_shape(shape: impl DomainShape + 'static, resolution: usize) -> Result<Self, ModulusError> {
        GridDomain::new(Arc::new(shape), resolution)
    }

    pub fn shape(&self) -> &dyn DomainShape {
        self.shape.as_ref()
    }

    pub fn at_resolution(&self, resolution: usize) -> Result<Self, ModulusError> {
        GridDomain::new(self.shape.clone(), resolution)
    }

    pub fn center(&self, i: usize, j: usize) -> Complex64 {
        self.origin + Complex64::new(i as f64 * self.hx, j as f64 * self.hy)
    }

    pub fn cell(&self, i: usize, j: usize) -> Cell {
        self.cells[j * self.resolution + i]
    }

    pub fn count(&self, c: Cell) -> usize {
        self.cells.iter().filter(|&&x| x == c).count()
    }

    /// Edge neighbours with their conductances.
    fn neighbours(&self, c: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let n = self.resolution;
        let (i, j) = (c % n, c / n);
        let (wx, wy) = (self.hy / self.hx, self.hx / self.hy);
        [
            (i > 0).then(|| (c - 1, wx)),
            (i + 1 < n).then(|| (c + 1, wx)),
            (j > 0).then(|| (c - n, wy)),
            (j + 1 < n).then(|| (c + n, wy)),
        ]
        .into_iter()
        .flatten()
    }

    fn point(&self, c: usize) -> Complex64 {
        self.center(c % self.resolution, c / self.resolution)
    }

    /// Interior components that touch both `A` and `B`.
    fn active_cells(&self) -> Result<Vec<bool>, ModulusError> {
        let total = self.cells.len();
        let mut comp = vec![usize::MAX; total];
        let mut active = vec![false; total];
        let mut any = false;
        for s in 0..total {
            if self.cells[s] != Cell::Interior || comp[s] != usize::MAX {
                continue;
            }
            let mut members = vec![s];
            comp[s] = s;
            let (mut ta, mut tb) = (false, false);
            let mut queue = VecDeque::from([s]);
            while let Some(c) = queue.pop_front() {
                for (nb, _) in self.neighbours(c) {
                    match self.cells[nb] {
                        Cell::Interior if comp[nb] == usize::MAX => {
                            comp[nb] = s;
                            members.push(nb);
                            queue.push_back(nb);
                        }
                        Cell::A => ta = true,
                        Cell::B => tb = true,
                        _ => {}
                    }
                }
            }
            if ta && tb {
                any = true;
                for m in members {
                    active[m] = true;
                }
            }
        }
        // A and B touching is a degenerate configuration
        for (c, &cell) in self.cells.iter().enumerate() {
            if cell == Cell::A && self.neighbours(c).any(|(nb, _)| self.cells[nb] == Cell::B) {
                return Err(ModulusError::Disconnected);
            }
        }
        if any {
            Ok(active)
        } else {
            Err(ModulusError::Disconnected)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusOptions {
    pub solver: String,
    pub tol: f64,
    pub max_iter: usize,
    /// Re-solve at [`BUMP_RESOLUTION`] when the refinement delta exceeds
    /// `bump_threshold` times the value.
    pub auto_bump: bool,
    pub bump_threshold: f64,
}

impl Default for ModulusOptions {
    fn default() -> Self {
        ModulusOptions { solver: "ssor-cg".into(), tol: 1e-10, max_iter: 200_000, auto_bump: true, bump_threshold: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    AnnulusModulus,
    ExtremalDistance,
    ExtremalWidth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusEstimate {
    pub value: f64,
    pub resolution: usize,
    /// `|value_N − value_{N/2}|`.
    pub refinement_delta: f64,
    pub kind: EstimateKind,
    pub solver: String,
    pub iterations: usize,
    pub residual: f64,
    pub label: String,
}

/// Dirichlet energy of the discrete harmonic function on `domain`.
#[derive(Debug, Clone)]
pub struct GridSolution {
    pub energy: f64,
    pub stats: SolveStats,
    /// Potential per cell; `NaN` outside the active interior.
    pub potential: Vec<f64>,
}

pub fn solve_grid(domain: &GridDomain, opts: &ModulusOptions) -> Result<GridSolution, ModulusError> {
    let registry = SolverRegistry::standard();
    let solver = registry.get(&opts.solver).ok_or_else(|| ModulusError::UnknownSolver(opts.solver.clone()))?;
    let active = domain.active_cells()?;
    let total = domain.cells.len();
    let mut index = vec![usize::MAX; total];
    let mut nodes = Vec::new();
    for c in 0..total {
        if active[c] {
            index[c] = nodes.len();
            nodes.push(c);
        }
    }
    let shape = domain.shape();
    let value = |cell: Cell| if cell == Cell::B { 1.0 } else { 0.0 };
    let mut diag = vec![0.0; nodes.len()];
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nodes.len()];
    let mut rhs = vec![0.0; nodes.len()];
    // boundary edges: (node, conductance, boundary value)
    let mut cut = Vec::new();
    for (k, &c) in nodes.iter().enumerate() {
        for (nb, w) in domain.neighbours(c) {
            match domain.cells[nb] {
                Cell::Interior => {
                    diag[k] += w;
                    rows[k].push((index[nb], -w));
                }
                cell @ (Cell::A | Cell::B) => {
                    let theta = shape.crossing(domain.point(c), domain.point(nb)).clamp(MIN_CUT, 1.0);
                    diag[k] += w / theta;
                    rhs[k] += w / theta * value(cell);
                    cut.push((k, w / theta, value(cell)));
                }
                Cell::Excluded => {}
            }
        }
    }
    let a = CsrMatrix::from_rows(diag, &rows);
    let mut u = vec![0.5; nodes.len()];
    let stats = solver.solve(&a, &rhs, &mut u, opts.tol, opts.max_iter).map_err(|s| ModulusError::SolverStall {
        solver: opts.solver.clone(),
        iterations: s.iterations,
        residual: s.residual,
    })?;
    let mut energy = 0.0;
    for (k, row) in rows.iter().enumerate() {
        for &(j, w) in row {
            if j > k {
                energy += -w * (u[k] - u[j]).powi(2);
            }
        }
    }
    for &(k, w, g) in &cut {
        energy += w * (u[k] - g).powi(2);
    }
    let mut potential = vec![f64::NAN; total];
    for (k, &c) in nodes.iter().enumerate() {
        potential[c] = u[k];
    }
    Ok(GridSolution { energy, stats, potential })
}

fn measure(domain: &GridDomain, kind: EstimateKind, opts: &ModulusOptions) -> Result<ModulusEstimate, ModulusError> {
    let value_of = |s: &GridSolution| match kind {
        EstimateKind::ExtremalWidth => s.energy,
        _ => 1.0 / s.energy,
    };
    let half = domain.at_resolution(domain.resolution / 2)?;
    let (fine, coarse) = rayon::join(|| solve_grid(domain, opts), || solve_grid(&half, opts));
    let (fine, coarse) = (fine?, coarse?);
    let value = value_of(&fine);
    Ok(ModulusEstimate {
        value,
        resolution: domain.resolution,
        refinement_delta: (value - value_of(&coarse)).abs(),
        kind,
        solver: opts.solver.clone(),
        iterations: fine.stats.iterations,
        residual: fine.stats.residual,
        label: domain.shape().label(),
    })
}

fn estimate(domain: &GridDomain, kind: EstimateKind, opts: &ModulusOptions) -> Result<ModulusEstimate, ModulusError> {
    let est = measure(domain, kind, opts)?;
    if opts.auto_bump && domain.resolution < BUMP_RESOLUTION && est.refinement_delta > opts.bump_threshold * est.value {
        return measure(&domain.at_resolution(BUMP_RESOLUTION)?, kind, opts);
    }
    Ok(est)
}

/// Modulus of the annulus between `A` (inner continuum) and `B` (outside).
pub fn grid_modulus(domain: &GridDomain, opts: &ModulusOptions) -> Result<ModulusEstimate, ModulusError> {
    estimate(domain, EstimateKind::AnnulusModulus, opts)
}

/// Extremal distance between `A` and `B` with Neumann conditions elsewhere.
pub fn extremal_distance(domain: &GridDomain, opts: &ModulusOptions) -> Result<ModulusEstimate, ModulusError> {
    estimate(domain, EstimateKind::ExtremalDistance, opts)
}

/// Extremal width of the curve family joining `A` to `B`.
pub fn extremal_width(domain: &GridDomain, opts: &ModulusOptions) -> Result<ModulusEstimate, ModulusError> {
    estimate(domain, EstimateKind::ExtremalWidth, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    fn fast() -> ModulusOptions {
        ModulusOptions { auto_bump: false, ..Default::default() }
    }

    #[test]
    fn coarse_annulus() {
        let d = GridDomain::from_shape(RoundAnnulus::new(Complex64::new(0.0, 0.0), 1.0, E), 128).unwrap();
        let m = grid_modulus(&d, &fast()).unwrap();
        assert!((m.value - 1.0 / (2.0 * PI)).abs() / (1.0 / (2.0 * PI)) < 0.02, "{m:?}");
        assert!(m.residual < 1e-10);
    }

    #[test]
    fn rectangle_is_exact() {
        // the discrete solution is linear on an aligned rectangle
        let d = GridDomain::from_shape(Rectangle::new(2.0, 1.0, Direction::Horizontal), 64).unwrap();
        let m = extremal_distance(&d, &fast()).unwrap();
        assert!((m.value - 2.0).abs() < 1e-8, "{m:?}");
    }

    #[test]
    fn touching_sets_are_disconnected() {
        let d = GridDomain::from_shape(RoundAnnulus::new(Complex64::new(0.0, 0.0), 1.0, 1.0001), 64);
        assert!(matches!(d.and_then(|d| grid_modulus(&d, &fast())), Err(ModulusError::Disconnected)));
    }

    #[test]
    fn unknown_solver() {
        let d = GridDomain::from_shape(Rectangle::new(1.0, 1.0, Direction::Horizontal), 32).unwrap();
        let opts = ModulusOptions { solver: "gauss".into(), ..fast() };
        assert!(matches!(grid_modulus(&d, &opts), Err(ModulusError::UnknownSolver(_))));
    }

    #[test]
    fn small_resolution_rejected() {
        let r = GridDomain::from_shape(Rectangle::new(1.0, 1.0, Direction::Horizontal), 8);
        assert!(matches!(r, Err(ModulusError::Resolution(8))));
    }
}
