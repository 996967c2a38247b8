use num_complex::Complex64;
use yoccoz_core::angles::{validate_portrait, Angle};
use yoccoz_core::dynamics::{find_center, QuadraticMap};
use yoccoz_core::puzzle::checks::*;
use yoccoz_core::puzzle::{build_puzzle, Puzzle};
use yoccoz_core::renorm::*;

fn ang(p: u64, q: u64) -> Angle {
    Angle::new(p, q).unwrap()
}

fn basilica(depth: usize) -> Puzzle {
    let map = QuadraticMap::new(Complex64::new(-1.0, 0.0));
    let portrait = validate_portrait(&[vec![ang(1, 3), ang(2, 3)]]).unwrap();
    build_puzzle(&map, &portrait, depth).unwrap()
}

fn centre(p: usize, re: f64, im: f64) -> QuadraticMap {
    QuadraticMap::new(find_center(p, Complex64::new(re, im)).unwrap())
}

fn alpha_puzzle(map: &QuadraticMap) -> (RenormData, Puzzle) {
    let d = renorm_params(map, Bounds::new(4, 4, 4)).unwrap();
    let depth = d.lambda.max(d.buffer_depth());
    let pz = build_puzzle(map, &d.alpha_portrait, depth).unwrap();
    (d, pz)
}

#[test]
fn basilica_subset_lemma() {
    let pz = basilica(2);
    let y1 = pz.critical_index(1).unwrap();
    assert_eq!(check_subset_lemma(&pz, 1, y1).unwrap().verdict, Verdict::Exempt);
    let mut checked = 0;
    for i in 0..pz.piece_count(2) {
        let c = check_subset_lemma(&pz, 2, i).unwrap();
        if c.verdict != Verdict::Exempt {
            assert_eq!(c.verdict, Verdict::Pass, "piece {i}: gap {}", c.gap);
            assert!(c.exact);
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn airplane_e0_construction() {
    let map = centre(3, -1.75, 0.0);
    let (d, pz) = alpha_puzzle(&map);
    let inner = (d.e0_depth(), pz.critical_index(d.e0_depth()).unwrap());
    let outer = (d.k, pz.critical_index(d.k).unwrap());
    let c = compact_containment(&pz, inner, outer).unwrap();
    assert_eq!(c.verdict, Verdict::Pass, "gap {}", c.gap);
}

#[test]
fn airplane_buffers() {
    let map = centre(3, -1.75, 0.0);
    let (d, pz) = alpha_puzzle(&map);
    let report = buffers(&pz, &d).unwrap();
    assert_eq!(report.buffers.len(), 2);
    assert!(report.buffers.iter().all(|b| b.depth == d.r * (2 * d.n - 1) * d.q + 1));
    let alpha = pz.find_vertex(d.alpha_point.location, 0).unwrap();
    let alpha_co = pz.find_vertex(-d.alpha_point.location, 1).unwrap();
    let q_l = report.buffers.iter().find(|b| b.vertex == alpha).expect("buffer at α");
    let q_r = report.buffers.iter().find(|b| b.vertex == alpha_co).expect("buffer at α'");
    assert!(q_l.piece.vertices.contains(&alpha));
    assert!(q_r.piece.vertices.contains(&alpha_co));
    assert!(!q_l.piece.shares_vertex(&q_r.piece));
    assert!(report.min_gap > 10.0 * pz.resolution());
    // f^k is univalent on each buffer and lands on P
    let p = pz.critical_index(d.p_depth()).unwrap();
    for b in &report.buffers {
        assert_eq!(pz.image_k(b.depth, b.index, d.k), p);
    }
}

#[test]
fn stars_at_lambda_separate() {
    for map in [centre(3, -1.75, 0.0), centre(4, -0.1565, 1.0323), centre(5, -1.9854, 0.0)] {
        let (d, pz) = alpha_puzzle(&map);
        let t = pz.portrait().period_t();
        let mut vs: Vec<usize> = (0..t).collect();
        for j in 0..t {
            vs.push(pz.find_vertex(-pz.vertex_point(j).unwrap(), 1).unwrap());
        }
        let r = star_separation(&pz, &vs, d.lambda).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{}: {r:?}", map.c);
    }
}

#[test]
fn buffers_need_depth() {
    let map = centre(3, -1.75, 0.0);
    let d = renorm_params(&map, Bounds::new(4, 4, 4)).unwrap();
    let pz = build_puzzle(&map, &d.alpha_portrait, 1).unwrap();
    assert!(buffers(&pz, &d).is_err());
}
