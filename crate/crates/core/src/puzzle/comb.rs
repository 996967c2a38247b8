//! Exact combinatorics of puzzle levels: ray angles of depth `m`, their
//! landing classes, and the pieces cut out by them.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::angles::{complementary_arc_index, Angle, OrbitPortrait};

/// A landing point of depth-`born` rays; ids are stable across depths.
#[derive(Debug, Clone)]
pub struct Vertex {
    pub born: usize,
    /// Sorted angles of all rays landing at the vertex.
    pub angles: Vec<Angle>,
    /// Id of the image vertex under `f`.
    pub image: usize,
}

#[derive(Debug, Clone)]
pub struct PieceComb {
    /// Open counterclockwise arcs in boundary order, rotated so that the
    /// arc with the smallest start comes first.
    pub arcs: Vec<(Angle, Angle)>,
    /// Vertex at the end of each arc (where the boundary leaves the
    /// equipotential along the arc's end ray).
    pub vertices: Vec<usize>,
}

impl PieceComb {
    /// An angle strictly inside the first arc.
    pub fn interior_angle(&self) -> Angle {
        let (x, y) = &self.arcs[0];
        x.add(&(x.ccw_distance(y) / BigRational::from_integer(2.into())))
    }

    pub fn total_length(&self) -> BigRational {
        self.arcs.iter().fold(BigRational::zero(), |acc, (x, y)| acc + x.ccw_distance(y))
    }

    /// Sorted list of all boundary ray angles.
    pub fn boundary_angles(&self) -> Vec<Angle> {
        let mut v: Vec<Angle> = self.arcs.iter().flat_map(|(x, y)| [x.clone(), y.clone()]).collect();
        v.sort();
        v.dedup();
        v
    }
}

#[derive(Debug, Clone)]
pub struct Level {
    pub depth: usize,
    pub angles: Vec<Angle>,
    pub vertex_of: HashMap<Angle, usize>,
    pub gap_piece: Vec<usize>,
    pub pieces: Vec<PieceComb>,
    /// The critical piece (depth >= 1).
    pub critical: Option<usize>,
}

impl Level {
    /// Piece whose arcs contain `a` (which must not be a ray angle).
    pub fn piece_of_angle(&self, a: &Angle) -> Option<usize> {
        if self.vertex_of.contains_key(a) {
            return None;
        }
        Some(self.gap_piece[complementary_arc_index(&self.angles, a)])
    }

    /// Pieces having `v` as a vertex.
    pub fn pieces_at_vertex(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> =
            (0..self.pieces.len()).filter(|&i| self.pieces[i].vertices.contains(&v)).collect();
        out.dedup();
        out
    }
}

pub fn depth_zero(portrait: &OrbitPortrait) -> (Level, Vec<Vertex>) {
    let t = portrait.period_t();
    let vertices: Vec<Vertex> = portrait
        .classes()
        .iter()
        .enumerate()
        .map(|(i, c)| Vertex { born: 0, angles: c.clone(), image: (i + 1) % t })
        .collect();
    let mut vertex_of = HashMap::new();
    for (i, v) in vertices.iter().enumerate() {
        for a in &v.angles {
            vertex_of.insert(a.clone(), i);
        }
    }
    let level = assemble(0, vertex_of, &vertices);
    (level, vertices)
}

/// Builds depth `m + 1` from depth `m`. `pivot` is any angle inside an arc
/// of the critical-value piece of depth `m`; the diameter through its two
/// halves separates the two univalent pullbacks of every other piece.
pub fn next_level(prev: &Level, vertices: &mut Vec<Vertex>, pivot: &Angle) -> Level {
    let (h, _) = pivot.halves();
    let half = BigRational::new(One::one(), 2.into());
    let h_end = h.add(&half);
    let mut vertex_of: HashMap<Angle, usize> = HashMap::new();
    let mut ids: Vec<usize> = prev.vertex_of.values().copied().collect();
    ids.sort();
    ids.dedup();
    for id in ids {
        let mut side_a = Vec::new();
        let mut side_b = Vec::new();
        for a in &vertices[id].angles {
            let (p, q) = a.halves();
            for x in [p, q] {
                if x.in_open_arc(&h, &h_end) {
                    side_a.push(x);
                } else {
                    side_b.push(x);
                }
            }
        }
        for mut class in [side_a, side_b] {
            class.sort();
            let vid = match prev.vertex_of.get(&class[0]) {
                Some(&existing) => existing,
                None => {
                    vertices.push(Vertex { born: prev.depth + 1, angles: class.clone(), image: id });
                    vertices.len() - 1
                }
            };
            for a in class {
                vertex_of.insert(a, vid);
            }
        }
    }
    let mut level = assemble(prev.depth + 1, vertex_of, vertices);
    let (p, q) = pivot.halves();
    let a = level.piece_of_angle(&p).expect("pivot half is not a ray angle");
    let b = level.piece_of_angle(&q).expect("pivot half is not a ray angle");
    debug_assert_eq!(a, b, "critical pullback must be connected");
    level.critical = Some(a);
    level
}

fn assemble(depth: usize, vertex_of: HashMap<Angle, usize>, vertices: &[Vertex]) -> Level {
    let mut angles: Vec<Angle> = vertex_of.keys().cloned().collect();
    angles.sort();
    let n = angles.len();
    let pos: HashMap<&Angle, usize> = angles.iter().enumerate().map(|(i, a)| (a, i)).collect();
    // Gap i runs from angles[i] to angles[i + 1]. Leaving it through the end
    // ray, the boundary returns to the equipotential along the previous ray
    // (clockwise) landing at the same vertex.
    let next: Vec<usize> = (0..n)
        .map(|i| {
            let end = &angles[(i + 1) % n];
            let class = &vertices[vertex_of[end]].angles;
            let k = class.binary_search(end).expect("angle in its class");
            let pred = &class[(k + class.len() - 1) % class.len()];
            pos[pred]
        })
        .collect();
    let mut gap_piece = vec![usize::MAX; n];
    let mut pieces = Vec::new();
    for start in 0..n {
        if gap_piece[start] != usize::MAX {
            continue;
        }
        let mut cycle = Vec::new();
        let mut g = start;
        while gap_piece[g] == usize::MAX {
            gap_piece[g] = pieces.len();
            cycle.push(g);
            g = next[g];
        }
        let arcs = cycle.iter().map(|&g| (angles[g].clone(), angles[(g + 1) % n].clone())).collect();
        let verts = cycle.iter().map(|&g| vertex_of[&angles[(g + 1) % n]]).collect();
        pieces.push(PieceComb { arcs, vertices: verts });
    }
    Level { depth, angles, vertex_of, gap_piece, pieces, critical: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angles::validate_portrait;

    fn a(s: &str) -> Angle {
        s.parse().unwrap()
    }

    fn basilica() -> OrbitPortrait {
        validate_portrait(&[vec![a("1/3"), a("2/3")]]).unwrap()
    }

    #[test]
    fn basilica_levels() {
        let (l0, mut vs) = depth_zero(&basilica());
        assert_eq!(l0.pieces.len(), 2);
        let x0 = l0.piece_of_angle(&a("1/2")).unwrap();
        assert_eq!(l0.pieces[x0].arcs, vec![(a("1/3"), a("2/3"))]);
        let l1 = next_level(&l0, &mut vs, &a("1/2"));
        assert_eq!(l1.pieces.len(), 3);
        let crit = &l1.pieces[l1.critical.unwrap()];
        assert_eq!(crit.arcs.len(), 2);
        assert_eq!(vs.len(), 2);
        assert_eq!(vs[1].angles, vec![a("1/6"), a("5/6")]);
    }
}
