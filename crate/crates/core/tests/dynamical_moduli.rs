use num_complex::Complex64;
use yoccoz_core::angles::{validate_portrait, Angle};
use yoccoz_core::dynamics::{find_center, QuadraticMap};
use yoccoz_core::modulus::*;
use yoccoz_core::puzzle::{build_puzzle, Puzzle};
use yoccoz_core::renorm::*;

fn opts() -> ModulusOptions {
    ModulusOptions::default()
}

fn airplane() -> (RenormData, Puzzle, PrincipalNest) {
    let map = QuadraticMap::new(find_center(3, Complex64::new(-1.75, 0.0)).unwrap());
    let d = renorm_params(&map, Bounds::new(4, 4, 4)).unwrap();
    let mut pz = build_puzzle(&map, &d.alpha_portrait, d.e0_depth()).unwrap();
    let nest = build_nest(&mut pz, &d, 6, 600).unwrap();
    (d, pz, nest)
}

fn crit(pz: &Puzzle, depth: usize) -> (usize, usize) {
    (depth, pz.critical_index(depth).unwrap())
}

#[test]
fn airplane_nest_annulus_is_non_degenerate() {
    let (_, pz, nest) = airplane();
    let e0 = crit(&pz, nest.levels[0].depth());
    let e1 = crit(&pz, nest.levels[1].depth());
    let m = piece_modulus(&pz, e0, e1, 256, &opts()).unwrap();
    assert!(m.value > 0.0 && m.value.is_finite(), "{m:?}");
    assert_eq!(m.label, PLANAR_LABEL);
}

#[test]
fn nested_pieces_are_monotone() {
    let (d, pz, nest) = airplane();
    // W = E^1 ⊂ Z = E^0 ⊂ Y = Y^k
    let w = crit(&pz, nest.levels[1].depth());
    let z = crit(&pz, nest.levels[0].depth());
    let y = crit(&pz, d.k);
    let yw = piece_modulus(&pz, y, w, 256, &opts()).unwrap();
    let zw = piece_modulus(&pz, z, w, 256, &opts()).unwrap();
    let yz = piece_modulus(&pz, y, z, 256, &opts()).unwrap();
    assert!(yw.value >= zw.value - zw.refinement_delta);
    assert!(yw.value >= yz.value + zw.value - 2.0 * (yz.refinement_delta + zw.refinement_delta));
}

#[test]
fn basilica_bigon_distance() {
    let map = QuadraticMap::new(Complex64::new(-1.0, 0.0));
    let thirds = vec![Angle::new(1u64, 3u64).unwrap(), Angle::new(2u64, 3u64).unwrap()];
    let pz = build_puzzle(&map, &validate_portrait(&[thirds]).unwrap(), 1).unwrap();
    let y1 = crit(&pz, 1);
    let m = bigon_distance(&pz, y1, 0.1, 256, &opts()).unwrap();
    assert!(m.value > 0.0 && m.value.is_finite(), "{m:?}");
    // the configuration is symmetric under z ↦ −z
    let p = pz.piece(1, y1.1);
    let (v, w) = (pz.vertex_point(p.vertices[0]).unwrap(), pz.vertex_point(p.vertices[1]).unwrap());
    assert!((v + w).norm() < 1e-8);
    let poly = (*pz.polygon(1, y1.1).unwrap()).clone();
    let shape = Bigon { piece: poly, v: w, w: v, radius: 0.1 * (v - w).norm(), window: 2.0 * (v - w).norm(), label: String::new() };
    let swapped = extremal_distance(&GridDomain::from_shape(shape, 256).unwrap(), &opts()).unwrap();
    assert!((swapped.value - m.value).abs() <= m.refinement_delta.max(1e-9) + swapped.refinement_delta);
    // depth-0 pieces of the basilica have one vertex
    assert!(matches!(bigon_distance(&pz, (0, 0), 0.1, 64, &opts()), Err(ModulusError::NotABigon(1))));
}

#[test]
fn transfer_principle_row() {
    let (d, mut pz, nest) = airplane();
    let p = d.period_p.unwrap();
    let z = crit(&pz, d.k);
    let y = crit(&pz, d.k + d.r);
    let row = transfer_report(&mut pz, &d, &nest, z, y, &[p], &TransferOptions { resolution: 256, ..Default::default() })
        .unwrap();
    assert_eq!(row.degrees, vec![2]);
    assert!(row.ratio > 0.0 && row.ratio.is_finite());
    assert_eq!(row.bound, 32768.0);
}

#[test]
fn transfer_hypotheses_are_enforced() {
    let (d, mut pz, nest) = airplane();
    let p = d.period_p.unwrap();
    let z = crit(&pz, d.k);
    let y = crit(&pz, d.k + d.r);
    let o = TransferOptions { resolution: 64, ..Default::default() };
    let bullet = |r: Result<TransferRow, ModulusError>| match r {
        Err(ModulusError::HypothesisFailure { bullet, .. }) => bullet,
        other => panic!("{other:?}"),
    };
    assert_eq!(bullet(transfer_report(&mut pz, &d, &nest, z, y, &[p, 2 * p], &o)), "t_m − t_1 < p");
    assert_eq!(bullet(transfer_report(&mut pz, &d, &nest, z, y, &[2 * p], &o)), "t_m < 2p");
    let tight = TransferOptions { degree_bound: 1, ..o.clone() };
    assert_eq!(bullet(transfer_report(&mut pz, &d, &nest, z, y, &[p], &tight)), "deg ≤ D");
    let deep = crit(&pz, nest.levels[0].depth());
    assert!(bullet(transfer_report(&mut pz, &d, &nest, deep, y, &[p], &o)).starts_with("depth Z"));
}
