//! Admissibility of ray portraits checked against a brute-force model that
//! works with integer numerators over `2^n - 1` and crossing chords.

use std::collections::BTreeSet;

use proptest::prelude::*;
use yoccoz_core::angles::{angles_of_exact_period, validate_portrait, Angle};

struct Model {
    n_den: u64,
}

impl Model {
    fn dbl(&self, k: u64) -> u64 {
        (2 * k) % self.n_den
    }

    fn between(a: u64, b: u64, x: u64) -> bool {
        // x strictly inside the ccw arc a -> b
        if a < b {
            a < x && x < b
        } else {
            x > a || x < b
        }
    }

    fn chords_cross(&self, (a, b): (u64, u64), (c, d): (u64, u64)) -> bool {
        Self::between(a, b, c) != Self::between(a, b, d)
    }

    fn orientation(a: u64, b: u64, c: u64) -> bool {
        // true when a, b, c appear in ccw order
        Self::between(a, c, b)
    }

    /// Returns (t, s, shortest arc) when admissible.
    fn admissible(&self, classes: &[Vec<u64>]) -> Option<(usize, usize, (u64, u64))> {
        let t = classes.len();
        if t == 0 {
            return None;
        }
        let sets: Vec<BTreeSet<u64>> = classes.iter().map(|c| c.iter().copied().collect()).collect();
        let total: usize = classes.iter().map(|c| c.len()).sum();
        let union: BTreeSet<u64> = sets.iter().flatten().copied().collect();
        if union.len() != total {
            return None;
        }
        let s = sets[0].len();
        if s < 2 || sets.iter().any(|c| c.len() != s) {
            return None;
        }
        // every angle periodic: for numerators over 2^n - 1 this always holds
        let mut image = vec![usize::MAX; t];
        for (i, c) in sets.iter().enumerate() {
            let img: BTreeSet<u64> = c.iter().map(|&k| self.dbl(k)).collect();
            image[i] = sets.iter().position(|d| *d == img)?;
        }
        let mut seen = vec![false; t];
        let mut cur = 0;
        for _ in 0..t {
            if seen[cur] {
                return None;
            }
            seen[cur] = true;
            cur = image[cur];
        }
        if cur != 0 {
            return None;
        }
        for i in 0..t {
            for j in (i + 1)..t {
                for &a in &sets[i] {
                    for &b in &sets[i] {
                        for &c in &sets[j] {
                            for &d in &sets[j] {
                                if a < b && c < d && self.chords_cross((a, b), (c, d)) {
                                    return None;
                                }
                            }
                        }
                    }
                }
            }
        }
        for c in &sets {
            for &x in c {
                for &y in c {
                    for &z in c {
                        if x != y && y != z && x != z
                            && Self::orientation(x, y, z) != Self::orientation(self.dbl(x), self.dbl(y), self.dbl(z))
                        {
                            return None;
                        }
                    }
                }
            }
        }
        let mut best: Option<(u64, (u64, u64))> = None;
        for c in &sets {
            let v: Vec<u64> = c.iter().copied().collect();
            for i in 0..v.len() {
                let a = v[i];
                let b = v[(i + 1) % v.len()];
                let len = (b + self.n_den - a) % self.n_den;
                if best.map_or(true, |(l, _)| len < l) {
                    best = Some((len, (a, b)));
                }
            }
        }
        Some((t, s, best.unwrap().1))
    }
}

fn to_angles(n_den: u64, classes: &[Vec<u64>]) -> Vec<Vec<Angle>> {
    classes
        .iter()
        .map(|c| c.iter().map(|&k| Angle::new(k, n_den).unwrap()).collect())
        .collect()
}

fn orbit_classes(model: &Model, c0: &[u64], max: usize) -> Vec<Vec<u64>> {
    let start: BTreeSet<u64> = c0.iter().copied().collect();
    let mut out = vec![start.iter().copied().collect::<Vec<_>>()];
    let mut cur = start.clone();
    for _ in 0..max {
        cur = cur.iter().map(|&k| model.dbl(k)).collect();
        if cur == start {
            break;
        }
        out.push(cur.iter().copied().collect());
    }
    out
}

fn compare(n: u32, classes: &[Vec<u64>]) {
    let n_den = (1u64 << n) - 1;
    let model = Model { n_den };
    let expect = model.admissible(classes);
    let got = validate_portrait(&to_angles(n_den, classes));
    match (expect, got) {
        (None, Err(_)) => {}
        (Some((t, s, (a, b))), Ok(p)) => {
            assert_eq!(p.period_t(), t, "{classes:?}");
            assert_eq!(p.valence_s(), s, "{classes:?}");
            assert_eq!(p.ray_count_r(), t * s);
            let arc = p.characteristic_arc();
            assert_eq!(arc, (Angle::new(a, n_den).unwrap(), Angle::new(b, n_den).unwrap()), "{classes:?}");
        }
        (e, g) => panic!("disagreement on {classes:?} over {n_den}: model {e:?}, implementation {g:?}"),
    }
}

#[test]
fn exhaustive_orbit_candidates_agree_with_model() {
    let mut admissible = 0;
    for n in 1..=6u32 {
        let n_den = (1u64 << n) - 1;
        let model = Model { n_den };
        let exact: Vec<u64> = angles_of_exact_period(n)
            .unwrap()
            .iter()
            .map(|a| a.numerator().try_into().unwrap())
            .collect();
        let m = exact.len();
        for i in 0..m {
            compare(n, &orbit_classes(&model, &[exact[i]], 8));
            for j in (i + 1)..m {
                let cl = orbit_classes(&model, &[exact[i], exact[j]], 8);
                if model.admissible(&cl).is_some() {
                    admissible += 1;
                }
                compare(n, &cl);
                for k in (j + 1)..m {
                    compare(n, &orbit_classes(&model, &[exact[i], exact[j], exact[k]], 8));
                }
            }
        }
    }
    assert!(admissible > 10);
}

proptest! {
    #[test]
    fn random_partitions_agree_with_model(
        n in 1u32..=6,
        raw in proptest::collection::vec(proptest::collection::vec(0u64..63, 1..4), 1..4),
    ) {
        let n_den = (1u64 << n) - 1;
        let classes: Vec<Vec<u64>> = raw.iter().map(|c| c.iter().map(|k| k % n_den).collect()).collect();
        compare(n, &classes);
    }
}
