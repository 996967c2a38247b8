use num_complex::Complex64;
use yoccoz_core::angles::Angle;
use yoccoz_core::dynamics::{find_center, QuadraticMap};
use yoccoz_core::puzzle::build_puzzle;
use yoccoz_core::renorm::*;

fn centre(p: usize, re: f64, im: f64) -> QuadraticMap {
    QuadraticMap::new(find_center(p, Complex64::new(re, im)).unwrap())
}

fn airplane() -> QuadraticMap {
    centre(3, -1.75, 0.0)
}

fn thirds() -> Vec<Angle> {
    vec![Angle::new(1u64, 3u64).unwrap(), Angle::new(2u64, 3u64).unwrap()]
}

#[test]
fn basilica_and_chebyshev_fixed_points_divide() {
    for (c, point) in [(-1.0, None), (-2.0, Some(-1.0))] {
        let map = QuadraticMap::new(Complex64::new(c, 0.0));
        let found = find_dividing_cycles(&map, 3).unwrap();
        let fixed: Vec<_> = found.cycles.iter().filter(|cy| cy.portrait.period_t() == 1).collect();
        assert_eq!(fixed.len(), 1, "c = {c}");
        let mut angles: Vec<Angle> = fixed[0].portrait.classes()[0].clone();
        angles.sort();
        assert_eq!(angles, thirds());
        if let Some(x) = point {
            assert!((fixed[0].point.location - Complex64::new(x, 0.0)).norm() < 1e-10);
        }
    }
}

#[test]
fn main_cardioid_has_no_dividing_cycle() {
    let map = QuadraticMap::new(Complex64::new(0.2, 0.0));
    assert!(find_dividing_cycles(&map, 4).unwrap().cycles.is_empty());
    match renorm_params(&map, Bounds::new(4, 4, 4)) {
        Err(RenormError::NotSatisfied { stage: Stage::NoDividingCycle, .. }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn airplane_triple() {
    let map = airplane();
    let d = renorm_params(&map, Bounds::new(4, 4, 4)).unwrap();
    assert_eq!((d.r, d.q, d.n), (1, 2, 1));
    assert_eq!(d.k, d.r * d.q * d.n);
    assert_eq!(d.lambda, d.k + 1 + 2 * d.r);
    assert_eq!(d.kind, RenormKind::Primitive);
    assert_eq!(d.period_p, Some(3));
    let mut a = d.alpha_portrait.classes()[0].clone();
    a.sort();
    assert_eq!(a, thirds());
    // ζ = f^k(0) lies beyond the co-fixed point
    let zeta = d.zeta(&map);
    assert!(zeta.re > -d.alpha_point.location.re);
}

#[test]
fn basilica_fails_at_escape_stage() {
    let map = QuadraticMap::new(Complex64::new(-1.0, 0.0));
    match renorm_params(&map, Bounds::new(4, 4, 4)) {
        Err(RenormError::NotSatisfied { stage: Stage::EscapeTimeExceeded, .. }) => {}
        other => panic!("{other:?}"),
    }
    assert!(!molecule_check(&map, Bounds::new(4, 4, 4)).0);
}

#[test]
fn basilica_is_immediately_renormalizable() {
    let map = QuadraticMap::new(Complex64::new(-1.0, 0.0));
    let portrait = yoccoz_core::angles::validate_portrait(&[thirds()]).unwrap();
    let cl = classify_renormalization(&map, &portrait, 32).unwrap();
    assert_eq!(cl.kind, RenormKind::Immediate);
    assert_eq!(cl.period, Some(2));
    assert!(cl.kind.is_satellite());
}

#[test]
fn origin_is_not_renormalizable() {
    let map = QuadraticMap::new(Complex64::new(0.0, 0.0));
    let cl = classify_first(&map, 4, 32).unwrap();
    assert_eq!(cl.kind, RenormKind::None);
    assert_eq!(cl.period, None);
}

#[test]
fn primitive_centres() {
    for (map, p) in [(airplane(), 3), (centre(4, -0.1565, 1.0323), 4), (centre(4, -1.9408, 0.0), 4)] {
        let cl = classify_first(&map, 4, 32).unwrap();
        assert_eq!(cl.kind, RenormKind::Primitive, "{}", map.c);
        assert_eq!(cl.period, Some(p));
    }
}

#[test]
fn zero_bounds_never_satisfy() {
    let map = airplane();
    for b in [Bounds::new(0, 4, 4), Bounds::new(4, 0, 4), Bounds::new(4, 4, 0)] {
        assert!(!molecule_check(&map, b).0);
    }
}

#[test]
fn admissibility_is_monotone_in_bounds() {
    let params = [
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.2, 0.0),
        Complex64::new(-0.12, 0.75),
        Complex64::new(-1.3, 0.0),
        Complex64::new(-1.77, 0.0),
        find_center(3, Complex64::new(-1.75, 0.0)).unwrap(),
        find_center(4, Complex64::new(-0.1565, 1.0323)).unwrap(),
        find_center(4, Complex64::new(-1.9408, 0.0)).unwrap(),
        find_center(5, Complex64::new(-1.9854, 0.0)).unwrap(),
        find_center(5, Complex64::new(-1.6254, 0.0)).unwrap(),
    ];
    for c in params {
        let map = QuadraticMap::new(c);
        let search = RenormSearch::new(&map, Bounds::new(5, 5, 5), RenormOptions::default()).unwrap();
        let ok = |r, q, n| search.best(Bounds::new(r, q, n)).is_ok();
        for r in 1..=5 {
            for q in 1..=5 {
                for n in 1..=5 {
                    if ok(r, q, n) {
                        assert!(r == 5 || ok(r + 1, q, n), "{c} {r} {q} {n}");
                        assert!(q == 5 || ok(r, q + 1, n), "{c} {r} {q} {n}");
                        assert!(n == 5 || ok(r, q, n + 1), "{c} {r} {q} {n}");
                    }
                }
            }
        }
    }
}

#[test]
fn principal_nests_are_nested() {
    let cases = [
        (airplane(), vec![3, 6]),
        (centre(4, -0.1565, 1.0323), vec![4, 8]),
        (centre(5, -1.9854, 0.0), vec![3, 8]),
        (centre(4, -1.9408, 0.0), vec![3, 7]),
    ];
    for (map, depths) in cases {
        let d = renorm_params(&map, Bounds::new(4, 4, 4)).unwrap();
        let mut pz = build_puzzle(&map, &d.alpha_portrait, 1).unwrap();
        let nest = build_nest(&mut pz, &d, 6, 600).unwrap();
        assert!(nest.terminated);
        assert_eq!(nest.depths(), depths, "{}", map.c);
        assert_eq!(nest.levels[0].depth(), d.e0_depth());
        assert!(nest.return_times.iter().all(|&l| l >= d.r));
        let (e0, e1) = (&nest.levels[0], &nest.levels[1]);
        assert!(e1.arcs_compactly_inside(e0));
        let gap = pz.boundary_gap((e0.depth(), e0.members[0]), (e1.depth(), e1.members[0])).unwrap();
        assert!(gap > 10.0 * pz.resolution(), "{}: gap {gap}", map.c);
    }
}
