//! Moduli of puzzle pieces and numerical harnesses for the inequalities
//! relating them.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    extremal_distance, grid_modulus, Bigon, DiskConfiguration, DomainShape, GridDomain, ModulusError, ModulusEstimate,
    ModulusOptions, PolygonAnnulus,
};
use crate::puzzle::checks::{compact_containment, Verdict};
use crate::puzzle::{Puzzle, PuzzleError};
use crate::renorm::{PrincipalNest, RenormData};

pub const PLANAR_LABEL: &str = "planar approximation of the ψ-modulus";

impl From<PuzzleError> for ModulusError {
    fn from(e: PuzzleError) -> Self {
        ModulusError::Puzzle(e.to_string())
    }
}

/// Values at successive resolutions, for judging convergence.
pub fn refinement_series(
    shape: Arc<dyn DomainShape>,
    resolutions: &[usize],
    opts: &ModulusOptions,
) -> Result<Vec<(usize, f64)>, ModulusError> {
    let opts = ModulusOptions { auto_bump: false, ..opts.clone() };
    resolutions
        .iter()
        .map(|&n| Ok((n, super::solve_grid(&GridDomain::new(shape.clone(), n)?, &opts)?.energy.recip())))
        .collect()
}

/// `mod(Z, Y)` for pieces `Y ⋐ Z` given as `(depth, index)`.
pub fn piece_modulus(
    pz: &Puzzle,
    outer: (usize, usize),
    inner: (usize, usize),
    resolution: usize,
    opts: &ModulusOptions,
) -> Result<ModulusEstimate, ModulusError> {
    let c = compact_containment(pz, inner, outer)?;
    if c.verdict != Verdict::Pass {
        return Err(ModulusError::InconclusiveContainment(format!(
            "{inner:?} in {outer:?}: arcs nested {}, gap {:e}",
            c.exact, c.gap
        )));
    }
    let shape = PolygonAnnulus {
        outer: (*pz.polygon(outer.0, outer.1)?).clone(),
        inner: (*pz.polygon(inner.0, inner.1)?).clone(),
        label: PLANAR_LABEL.into(),
    };
    grid_modulus(&GridDomain::from_shape(shape, resolution)?, opts)
}

/// Extremal distance inside the bigon `(depth, index)` between the parts of
/// its boundary near its two vertices. These parts are approximated by disks
/// about the vertices of radius `neighborhood · |v − w|`, and the piece is
/// clipped to the disk of radius `2|v − w|` about the midpoint of the vertices.
pub fn bigon_distance(
    pz: &Puzzle,
    piece: (usize, usize),
    neighborhood: f64,
    resolution: usize,
    opts: &ModulusOptions,
) -> Result<ModulusEstimate, ModulusError> {
    let p = pz.piece(piece.0, piece.1);
    if p.vertices.len() != 2 {
        return Err(ModulusError::NotABigon(p.vertices.len()));
    }
    let v = pz.vertex_point(p.vertices[0])?;
    let w = pz.vertex_point(p.vertices[1])?;
    let shape = Bigon {
        piece: (*pz.polygon(piece.0, piece.1)?).clone(),
        v,
        w,
        radius: neighborhood * (v - w).norm(),
        window: 2.0 * (v - w).norm(),
        label: PLANAR_LABEL.into(),
    };
    extremal_distance(&GridDomain::from_shape(shape, resolution)?, opts)
}

/// Synthetic configuration for the Quasi-Additivity Law: disks `K_i` in a
/// disk `V`, with round collars `ρ_i < |z − c_i| < collar_i`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QaConfig {
    pub center: Complex64,
    pub radius: f64,
    pub disks: Vec<(Complex64, f64)>,
    pub collars: Vec<f64>,
    pub eta: f64,
    pub delta: f64,
}

impl QaConfig {
    /// `m` disks of radius `rho` on the circle of radius `ring`, centred in
    /// the unit disk, with collars of outer radius `collar`.
    pub fn symmetric(m: usize, ring: f64, rho: f64, collar: f64, eta: f64, delta: f64) -> Self {
        let disks = (0..m)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
                (Complex64::from_polar(if m == 1 { 0.0 } else { ring }, t), rho)
            })
            .collect();
        QaConfig { center: Complex64::new(0.0, 0.0), radius: 1.0, disks, collars: vec![collar; m], eta, delta }
    }

    fn shape(&self) -> DiskConfiguration {
        DiskConfiguration { center: self.center, radius: self.radius, disks: self.disks.clone() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QaRow {
    pub m: usize,
    pub eta: f64,
    pub delta: f64,
    /// `log r_i` of the collars.
    pub collar_logs: Vec<f64>,
    /// `mod(V, K_i)` from the inversive distance.
    pub single_exact: Vec<f64>,
    pub single_measured: Vec<f64>,
    /// `mod(V, ∪K_i)`.
    pub lhs: f64,
    pub lhs_delta: f64,
    /// `2η⁻¹δ/m`.
    pub rhs: f64,
    pub hypothesis_met: bool,
    pub hypothesis: String,
    pub conclusion_holds: bool,
}

/// Evaluates both sides of the Quasi-Additivity inequality.
pub fn quasi_additivity_report(cfg: &QaConfig, resolution: usize, opts: &ModulusOptions) -> Result<QaRow, ModulusError> {
    let shape = cfg.shape();
    let m = cfg.disks.len();
    let lhs = grid_modulus(&GridDomain::from_shape(shape.clone(), resolution)?, opts)?;
    let mut single_measured = Vec::with_capacity(m);
    for i in 0..m {
        single_measured.push(grid_modulus(&GridDomain::from_shape(shape.only(i), resolution)?, opts)?.value);
    }
    let single_exact: Vec<f64> = (0..m).map(|i| shape.single_modulus(i)).collect();
    let collar_logs: Vec<f64> = cfg.disks.iter().zip(&cfg.collars).map(|(&(_, r), &c)| (c / r).ln()).collect();
    let mut problems = Vec::new();
    if single_exact.iter().any(|&x| x >= cfg.delta) {
        problems.push("mod(V, K_i) < δ".to_string());
    }
    let need = 2.0 * std::f64::consts::PI * cfg.eta * cfg.delta;
    if collar_logs.iter().any(|&l| l <= need) {
        problems.push("log r_i > 2πηδ".to_string());
    }
    // the collars lie in V and avoid the other disks
    for (i, (&(c, _), &outer)) in cfg.disks.iter().zip(&cfg.collars).enumerate() {
        let inside = (c - cfg.center).norm() + outer < cfg.radius;
        let clear = cfg.disks.iter().enumerate().all(|(j, &(cj, rj))| j == i || (c - cj).norm() > outer + rj);
        if !(inside && clear) {
            problems.push(format!("collar {i} embedded"));
        }
    }
    let rhs = 2.0 * cfg.delta / (cfg.eta * m as f64);
    Ok(QaRow {
        m,
        eta: cfg.eta,
        delta: cfg.delta,
        collar_logs,
        single_exact,
        single_measured,
        lhs: lhs.value,
        lhs_delta: lhs.refinement_delta,
        rhs,
        hypothesis_met: problems.is_empty(),
        hypothesis: if problems.is_empty() { "met".into() } else { format!("hypothesis not met: {}", problems.join(", ")) },
        conclusion_holds: lhs.value < rhs,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferOptions {
    /// The absolute constant `C`.
    pub constant: f64,
    /// Degree bound `D`.
    pub degree_bound: usize,
    pub resolution: usize,
    pub modulus: ModulusOptions,
}

impl Default for TransferOptions {
    fn default() -> Self {
        TransferOptions {
            constant: 32768.0,
            degree_bound: 4,
            resolution: super::DEFAULT_RESOLUTION,
            modulus: ModulusOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferRow {
    pub z: (usize, usize),
    pub y: (usize, usize),
    pub times: Vec<usize>,
    pub period: usize,
    pub chi: usize,
    pub degrees: Vec<usize>,
    pub mod_zy: ModulusEstimate,
    /// `mod(E^χ, 𝒦)` with `𝒦` replaced by the next critical piece `E^{χ+1}`.
    pub mod_chi: ModulusEstimate,
    pub ratio: f64,
    /// `C/m`.
    pub bound: f64,
    pub label: String,
}

fn hypothesis(bullet: &str, detail: String) -> ModulusError {
    ModulusError::HypothesisFailure { bullet: bullet.into(), detail }
}

/// Checks the hypotheses of the Transfer Principle combinatorially and
/// measures `mod(Z, Y)` against `mod(E^χ, 𝒦)`.
pub fn transfer_report(
    pz: &mut Puzzle,
    data: &RenormData,
    nest: &PrincipalNest,
    z: (usize, usize),
    y: (usize, usize),
    times: &[usize],
    opts: &TransferOptions,
) -> Result<TransferRow, ModulusError> {
    let chi = nest.height_chi;
    if !nest.terminated || chi == 0 {
        return Err(hypothesis("renormalization", format!("nest of height {chi} is not terminated")));
    }
    let p = data.period_p.ok_or_else(|| hypothesis("renormalization", "no renormalization period".into()))?;
    let ecm1 = nest.levels[chi - 1].depth();
    if z.0 >= ecm1 {
        return Err(hypothesis("depth Z < depth E^(χ-1)", format!("{} ≥ {ecm1}", z.0)));
    }
    if times.is_empty() || times[0] == 0 || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(hypothesis("0 < t_1 < ... < t_m", format!("{times:?}")));
    }
    let (t1, tm) = (times[0], *times.last().unwrap());
    if tm - t1 >= p {
        return Err(hypothesis("t_m − t_1 < p", format!("{tm} − {t1} ≥ {p}")));
    }
    if tm >= 2 * p {
        return Err(hypothesis("t_m < 2p", format!("{tm} ≥ {}", 2 * p)));
    }
    let dchi = nest.levels[chi].depth();
    pz.extend_to((dchi + p).max(z.0 + tm).max(y.0))?;
    let c = compact_containment(pz, y, z)?;
    if c.verdict != Verdict::Pass {
        return Err(hypothesis("Y ⋐ Z", format!("verdict {:?}, gap {:e}", c.verdict, c.gap)));
    }
    let mut degrees = Vec::new();
    for &t in times {
        // 𝒦 contains 0, and f^t(𝒦) sits in one depth-d piece with f^t(0)
        if pz.orbit_piece(y.0, t)? != y.1 {
            return Err(hypothesis("f^(t_i)(𝒦) ⊂ Y", format!("f^{t}(0) is not in Y")));
        }
        let d = z.0 + t;
        let ups = pz.critical_index(d).expect("critical piece");
        if pz.image_k(d, ups, t) != z.1 {
            return Err(hypothesis("f^(t_i)(Υ_i) = Z", format!("t = {t}")));
        }
        if d < ecm1 {
            return Err(hypothesis("Υ_i ⊂ E^(χ-1)", format!("depth {d} < {ecm1} at t = {t}")));
        }
        let mut crit = 0;
        let mut idx = ups;
        for j in 0..t {
            if pz.critical_index(d - j) == Some(idx) {
                crit += 1;
            }
            idx = pz.image_index(d - j, idx);
        }
        let deg = 1usize << crit;
        if deg > opts.degree_bound {
            return Err(hypothesis("deg ≤ D", format!("degree {deg} > {} at t = {t}", opts.degree_bound)));
        }
        degrees.push(deg);
    }
    let mod_zy = piece_modulus(pz, z, y, opts.resolution, &opts.modulus)?;
    let e = (dchi, pz.critical_index(dchi).expect("critical piece"));
    let k = (dchi + p, pz.critical_index(dchi + p).expect("critical piece"));
    let mod_chi = piece_modulus(pz, e, k, opts.resolution, &opts.modulus)?;
    let m = times.len();
    Ok(TransferRow {
        z,
        y,
        times: times.to_vec(),
        period: p,
        chi,
        degrees,
        ratio: mod_zy.value / mod_chi.value,
        bound: opts.constant / m as f64,
        mod_zy,
        mod_chi,
        label: PLANAR_LABEL.into(),
    })
}
