//! Structural statements about pieces, checked exactly on angles and
//! numerically on polygons.

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{Puzzle, PuzzleError, PuzzlePiece};
use crate::renorm::RenormData;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Exempt,
    Inconclusive,
}

impl Verdict {
    /// `Fail` dominates, then `Inconclusive`; `Exempt` only if everything is.
    pub fn combine(items: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut out = Verdict::Exempt;
        for v in items {
            out = match (out, v) {
                (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
                (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
                (Verdict::Pass, _) | (_, Verdict::Pass) => Verdict::Pass,
                _ => Verdict::Exempt,
            };
        }
        out
    }
}

/// Compact containment is certified when the angle arcs nest strictly and
/// the polygon boundaries stay more than ten resolutions apart.
pub fn containment_verdict(exact: bool, gap: f64, resolution: f64) -> Verdict {
    if !exact {
        Verdict::Fail
    } else if gap > 10.0 * resolution {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Containment {
    pub inner: (usize, usize),
    pub outer: (usize, usize),
    pub exact: bool,
    pub gap: f64,
    pub verdict: Verdict,
}

/// Whether ordinary piece `inner` is compactly inside `outer`.
pub fn compact_containment(
    pz: &Puzzle,
    inner: (usize, usize),
    outer: (usize, usize),
) -> Result<Containment, PuzzleError> {
    let exact = pz.piece(inner.0, inner.1).arcs_compactly_inside(&pz.piece(outer.0, outer.1));
    let gap = pz.boundary_gap(inner, outer)?;
    Ok(Containment { inner, outer, exact, gap, verdict: containment_verdict(exact, gap, pz.resolution()) })
}

/// `Y^n(z) ⋐ Y^0(z)` for a piece avoiding the cycle; `Exempt` when the piece
/// touches the cycle or has depth 0.
pub fn check_subset_lemma(pz: &Puzzle, depth: usize, index: usize) -> Result<Containment, PuzzleError> {
    pz.check_depth(depth)?;
    let outer = (0, pz.ancestor(depth, index, 0));
    if depth == 0 || pz.touches_cycle(&pz.piece(depth, index)) {
        return Ok(Containment { inner: (depth, index), outer, exact: false, gap: 0.0, verdict: Verdict::Exempt });
    }
    compact_containment(pz, (depth, index), outer)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Buffer {
    /// Vertex of `P` the buffer is attached to.
    pub vertex: usize,
    pub depth: usize,
    pub index: usize,
    pub piece: PuzzlePiece,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BufferReport {
    pub p_depth: usize,
    pub buffers: Vec<Buffer>,
    /// Smallest boundary distance between two buffers.
    pub min_gap: f64,
}

/// Whether `f^k` maps piece `(depth, index)` univalently onto `(depth - k, target)`.
fn univalent_onto(pz: &Puzzle, depth: usize, index: usize, k: usize, target: usize) -> bool {
    let mut idx = index;
    for j in 0..k {
        if pz.critical_index(depth - j) == Some(idx) {
            return false;
        }
        idx = pz.image_index(depth - j, idx);
    }
    idx == target
}

/// The buffers `Q^v ⊂ P = Y^{rq(n-1)+1}`, one per vertex `v` of `P`, of depth
/// `r(2n-1)q+1`, each mapped onto `P` univalently by `f^k`.
pub fn buffers(pz: &Puzzle, data: &RenormData) -> Result<BufferReport, PuzzleError> {
    let (pd, bd) = (data.p_depth(), data.buffer_depth());
    pz.check_depth(bd)?;
    let p_idx = pz.critical_index(pd).expect("critical piece");
    let p = pz.piece(pd, p_idx);
    let mut out: Vec<Buffer> = Vec::new();
    for &v in &p.vertices {
        let at_v = |i: &usize| {
            let q = pz.piece(bd, *i);
            // attached along the rays of P at v
            q.boundary_angles.iter().any(|a| p.boundary_angles.contains(a) && pz.vertex_of_angle(a) == Some(v))
        };
        let found = pz
            .pieces_at_vertex(bd, v)
            .into_iter()
            .filter(|&i| pz.ancestor(bd, i, pd) == p_idx)
            .filter(at_v)
            .find(|&i| univalent_onto(pz, bd, i, data.k, p_idx));
        let Some(index) = found else { return Err(PuzzleError::NonUnivalentPullback(v)) };
        out.push(Buffer { vertex: v, depth: bd, index, piece: pz.piece(bd, index) });
    }
    let mut min_gap = f64::INFINITY;
    for a in 0..out.len() {
        for b in (a + 1)..out.len() {
            let gap = pz.boundary_gap((bd, out[a].index), (bd, out[b].index))?;
            if out[a].index == out[b].index || out[a].piece.shares_vertex(&out[b].piece) || gap == 0.0 {
                return Err(PuzzleError::BufferOverlap(out[a].vertex, out[b].vertex));
            }
            min_gap = min_gap.min(gap);
        }
    }
    Ok(BufferReport { p_depth: pd, buffers: out, min_gap })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StarReport {
    pub depth: usize,
    pub vertices: Vec<usize>,
    /// Two stars share a piece or a vertex.
    pub overlap: bool,
    pub contains_critical: bool,
    /// Smallest boundary distance between pieces of different stars.
    pub min_gap: f64,
    /// Smallest distance from 0 to a star boundary.
    pub critical_distance: f64,
    pub verdict: Verdict,
}

/// Pairwise disjointness of the stars `S^depth(v)` and their avoidance of 0.
pub fn star_separation(pz: &Puzzle, vertices: &[usize], depth: usize) -> Result<StarReport, PuzzleError> {
    pz.check_depth(depth)?;
    let stars: Vec<PuzzlePiece> =
        vertices.iter().map(|&v| pz.star_of_vertex(v, depth)).collect::<Result<_, _>>()?;
    let crit = pz.critical_index(depth);
    let contains_critical = stars.iter().any(|s| crit.is_some_and(|c| s.members.contains(&c)));
    let mut overlap = false;
    let mut min_gap = f64::INFINITY;
    for a in 0..stars.len() {
        for b in (a + 1)..stars.len() {
            overlap |= stars[a].members.iter().any(|m| stars[b].members.contains(m));
            overlap |= stars[a].shares_vertex(&stars[b]);
            for &x in &stars[a].members {
                for &y in &stars[b].members {
                    min_gap = min_gap.min(pz.boundary_gap((depth, x), (depth, y))?);
                }
            }
        }
    }
    let mut critical_distance = f64::INFINITY;
    for s in &stars {
        for &m in &s.members {
            critical_distance = critical_distance.min(pz.polygon(depth, m)?.boundary_distance(Complex64::zero()));
        }
    }
    let tol = 10.0 * pz.resolution();
    let verdict = if overlap || contains_critical {
        Verdict::Fail
    } else if min_gap > tol && critical_distance > tol {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    Ok(StarReport { depth, vertices: vertices.to_vec(), overlap, contains_critical, min_gap, critical_distance, verdict })
}
