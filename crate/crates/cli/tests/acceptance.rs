//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::collections::BTreeSet;
use std::f64::consts::{E, TAU};
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use serde_json::Value;
use yoccoz_core::angles::{angles_of_exact_period, periodic_angles, validate_portrait, Angle, OrbitPortrait};
use yoccoz_core::dynamics::{cluster_landings, find_center, green, land_ray, trace_ray, QuadraticMap};
use yoccoz_core::lemmas::{LemmaRegistry, VerifyContext};
use yoccoz_core::modulus::*;
use yoccoz_core::puzzle::build_puzzle;
use yoccoz_core::puzzle::checks::Verdict;
use yoccoz_core::renorm::*;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn angle(s: &str) -> Angle {
    s.parse().unwrap()
}

fn portrait(classes: &[&[&str]]) -> OrbitPortrait {
    validate_portrait(&classes.iter().map(|c| c.iter().map(|s| angle(s)).collect()).collect::<Vec<_>>()).unwrap()
}

fn centre(p: usize, re: f64, im: f64) -> QuadraticMap {
    QuadraticMap::new(find_center(p, Complex64::new(re, im)).unwrap())
}

fn airplane() -> QuadraticMap {
    centre(3, -1.75, 0.0)
}

// ---------------------------------------------------------------- 1

/// Portraits over numerators mod `2^n − 1`, checked by brute force on chords.
struct Model {
    den: u64,
}

impl Model {
    fn dbl(&self, k: u64) -> u64 {
        (2 * k) % self.den
    }

    fn between(a: u64, b: u64, x: u64) -> bool {
        if a < b {
            a < x && x < b
        } else {
            x > a || x < b
        }
    }

    fn admissible(&self, classes: &[Vec<u64>]) -> bool {
        let sets: Vec<BTreeSet<u64>> = classes.iter().map(|c| c.iter().copied().collect()).collect();
        let total: usize = classes.iter().map(Vec::len).sum();
        if sets.is_empty() || sets.iter().flatten().collect::<BTreeSet<_>>().len() != total {
            return false;
        }
        let s = sets[0].len();
        if s < 2 || sets.iter().any(|c| c.len() != s) {
            return false;
        }
        let mut image = Vec::new();
        for c in &sets {
            let img: BTreeSet<u64> = c.iter().map(|&k| self.dbl(k)).collect();
            match sets.iter().position(|d| *d == img) {
                Some(j) => image.push(j),
                None => return false,
            }
        }
        // one cycle through every class
        let mut cur = 0;
        for step in 1..=sets.len() {
            cur = image[cur];
            if cur == 0 && step < sets.len() {
                return false;
            }
        }
        if cur != 0 {
            return false;
        }
        for (i, a) in sets.iter().enumerate() {
            for b in &sets[i + 1..] {
                for &x in a {
                    for &y in a {
                        for &u in b {
                            for &v in b {
                                if x < y && u < v && Self::between(x, y, u) != Self::between(x, y, v) {
                                    return false;
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
                            && Self::between(x, z, y) != Self::between(self.dbl(x), self.dbl(z), self.dbl(y))
                        {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn orbit(&self, seed: &[u64]) -> Vec<Vec<u64>> {
        let start: BTreeSet<u64> = seed.iter().copied().collect();
        let mut out = vec![start.iter().copied().collect::<Vec<_>>()];
        let mut cur = start.clone();
        loop {
            cur = cur.iter().map(|&k| self.dbl(k)).collect();
            if cur == start || out.len() > 8 {
                break;
            }
            out.push(cur.iter().copied().collect());
        }
        out
    }
}

fn angle_engine() -> Outcome {
    for n in 1..=10u32 {
        let got = periodic_angles(n).map_err(|e| e.to_string())?.len();
        ensure(got == (1usize << n) - 1, || format!("|periodic_angles({n})| = {got}"))?;
    }
    let mut checked = 0;
    let mut admissible = 0;
    for n in 1..=6u32 {
        let model = Model { den: (1u64 << n) - 1 };
        let exact: Vec<u64> = angles_of_exact_period(n)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|a| a.numerator().try_into().unwrap())
            .collect();
        let m = exact.len();
        let mut seeds: Vec<Vec<u64>> = Vec::new();
        for i in 0..m {
            seeds.push(vec![exact[i]]);
            for j in i + 1..m {
                seeds.push(vec![exact[i], exact[j]]);
                for k in j + 1..m {
                    seeds.push(vec![exact[i], exact[j], exact[k]]);
                }
            }
        }
        for seed in seeds {
            let classes = model.orbit(&seed);
            let angles: Vec<Vec<Angle>> =
                classes.iter().map(|c| c.iter().map(|&k| Angle::new(k, model.den).unwrap()).collect()).collect();
            let expect = model.admissible(&classes);
            let got = validate_portrait(&angles).is_ok();
            ensure(expect == got, || format!("disagreement on {classes:?} over {}", model.den))?;
            checked += 1;
            admissible += expect as usize;
        }
    }
    Ok(format!("2^n - 1 angles for n <= 10; {checked} portraits agree with the oracle ({admissible} admissible)"))
}

// ---------------------------------------------------------------- 2

fn ray_calibration() -> Outcome {
    let map = QuadraticMap::new(Complex64::new(0.0, 0.0));
    let mut worst: f64 = 0.0;
    for k in 0..64u64 {
        let a = Angle::new(k, 64u64).unwrap();
        let t = trace_ray(&map, &a, 1e-3).map_err(|e| e.to_string())?;
        let dir = Complex64::from_polar(1.0, -TAU * a.to_f64());
        for p in &t.points {
            let w = p * dir;
            ensure(w.re > 0.0, || format!("ray {a} leaves its half line at {p}"))?;
            worst = worst.max(w.im.abs());
        }
        let end = t.points.last().unwrap().norm().ln();
        ensure((end - 1e-3).abs() < 1e-9, || format!("ray {a} ends at potential {end}"))?;
    }
    ensure(worst < 1e-9, || format!("radial deviation {worst:e}"))?;
    // Böttcher functional equation G(f(z)) = 2 G(z) on escaping points
    let mut residual: f64 = 0.0;
    let mut count = 0;
    let mut i = 0u64;
    while count < 1000 {
        i += 1;
        // additive recurrence over (c, z)
        let frac = |x: f64| x - x.floor();
        let (u, v, w, s) = (frac(i as f64 * 0.618_033_988_75), frac(i as f64 * 0.754_877_666_25), frac(i as f64 * 0.569_840_290_99), frac(i as f64 * 0.419_643_377_6));
        let map = QuadraticMap::new(Complex64::new(-2.0 + 2.5 * u, -1.2 + 2.4 * v));
        let z = Complex64::from_polar(0.2 + 4.0 * w, TAU * s);
        let (g, gf) = (green(&map, z), green(&map, map.f(z)));
        if g.censored || gf.censored || g.value <= 0.0 {
            continue;
        }
        residual = residual.max((gf.value - 2.0 * g.value).abs());
        count += 1;
    }
    ensure(residual < 1e-8, || format!("Böttcher residual {residual:e}"))?;
    Ok(format!("64 rays within {worst:.1e} of radial lines; G(f(z)) - 2G(z) <= {residual:.1e} on {count} points"))
}

// ---------------------------------------------------------------- 3

fn landing() -> Outcome {
    let map = QuadraticMap::new(Complex64::new(-1.0, 0.0));
    let golden = (1.0 - 5f64.sqrt()) / 2.0;
    let mut ends = Vec::new();
    for s in ["1/3", "2/3"] {
        let t = land_ray(&map, &angle(s), map.landing_tol).map_err(|e| e.to_string())?;
        let z = t.landing_point.ok_or(format!("ray {s} did not land"))?;
        ensure((z - golden).norm() < 1e-6, || format!("ray {s} lands at {z}"))?;
        ends.push(z);
    }
    ensure((ends[0] - ends[1]).norm() < 1e-6, || "rays 1/3 and 2/3 land apart".into())?;
    let rabbit = centre(3, -0.12, 0.74);
    let cl = cluster_landings(&rabbit, &[angle("1/7"), angle("2/7"), angle("4/7")], rabbit.cluster_tol);
    ensure(cl.len() == 1 && cl[0].angles.len() == 3, || format!("rabbit classes {cl:?}"))?;
    Ok(format!("1/3, 2/3 land within {:.1e} of (1-√5)/2; rabbit rays form one class", (ends[0] - golden).norm()))
}

// ---------------------------------------------------------------- 4

fn puzzle_structure() -> Outcome {
    let basilica = QuadraticMap::new(Complex64::new(-1.0, 0.0));
    let rabbit = centre(3, -0.12, 0.74);
    let mut notes = Vec::new();
    for (name, map, p) in [("basilica", basilica, portrait(&[&["1/3", "2/3"]])), ("rabbit", rabbit, portrait(&[&["1/7", "2/7", "4/7"]]))] {
        let pz = build_puzzle(&map, &p, 6).map_err(|e| e.to_string())?;
        let (t, s) = (p.period_t(), p.valence_s());
        ensure(pz.piece_count(0) == t * (s - 1) + 1, || format!("{name}: {} depth-0 pieces", pz.piece_count(0)))?;
        for m in 0..=6 {
            let rep = pz.structure_report(m);
            ensure(rep.tiling && rep.refinement && rep.covering && rep.symmetric_critical, || format!("{name}: {rep:?}"))?;
        }
        notes.push(format!("{name} {}", pz.piece_count(0)));
    }
    Ok(format!("depth-0 counts {}; tiling, refinement and covering hold to depth 6", notes.join(", ")))
}

// ---------------------------------------------------------------- 5

fn lemma_registry() -> Outcome {
    let registry = LemmaRegistry::standard();
    let params = [airplane(), centre(4, -0.1565, 1.0323), centre(5, -1.9854, 0.0)];
    for map in params {
        let ctx = VerifyContext::new(&map, Bounds::new(4, 4, 4), RenormOptions::default());
        let d = ctx.data.as_ref().ok_or(format!("{}: {:?}", map.c, ctx.renorm_failure))?;
        ensure(d.kind == RenormKind::Primitive, || format!("{}: {:?}", map.c, d.kind))?;
        for id in ["cv_pp", "single_point", "qv", "non_degenerate_annulus"] {
            let entry = registry.run_one(registry.get(id).unwrap(), &ctx);
            ensure(entry.status == Verdict::Pass, || format!("{id} at {}: {:?} {}", map.c, entry.status, entry.detail))?;
        }
    }
    Ok("cv_pp, single_point, qv, non_degenerate_annulus pass at the airplane and the p = 4, 5 centres".into())
}

// ---------------------------------------------------------------- 6

fn modulus_calibration() -> Outcome {
    let opts = ModulusOptions { auto_bump: false, ..Default::default() };
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let mut worst_round: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    for ratio in [E, E * E, 10.0] {
        let start = Instant::now();
        let d = GridDomain::from_shape(RoundAnnulus::new(Complex64::new(0.0, 0.0), 1.0, ratio), 512).map_err(|e| e.to_string())?;
        let m = grid_modulus(&d, &opts).map_err(|e| e.to_string())?;
        let secs = start.elapsed().as_secs_f64();
        let err = rel(m.value, ratio.ln() / TAU);
        ensure(err < 0.02 && secs < 60.0, || format!("R/r = {ratio}: error {err:.3e} in {secs:.1} s"))?;
        worst_round = worst_round.max(err);
        slowest = slowest.max(secs);
    }
    let dist = |w: f64, h: f64, dir| -> Result<f64, String> {
        let d = GridDomain::from_shape(Rectangle::new(w, h, dir), 256).map_err(|e| e.to_string())?;
        Ok(extremal_distance(&d, &opts).map_err(|e| e.to_string())?.value)
    };
    let width = |w: f64, h: f64| -> Result<f64, String> {
        let d = GridDomain::from_shape(Rectangle::new(w, h, Direction::Horizontal), 256).map_err(|e| e.to_string())?;
        Ok(extremal_width(&d, &opts).map_err(|e| e.to_string())?.value)
    };
    let mut worst_rect: f64 = 0.0;
    for (w, h, dir, exact) in [(1.0, 1.0, Direction::Horizontal, 1.0), (2.0, 1.0, Direction::Horizontal, 2.0), (2.0, 1.0, Direction::Vertical, 0.5)] {
        let err = rel(dist(w, h, dir)?, exact);
        ensure(err < 0.01, || format!("{w}x{h} {dir:?}: error {err:.3e}"))?;
        worst_rect = worst_rect.max(err);
    }
    let series = rel(dist(3.0, 1.0, Direction::Horizontal)?, dist(1.0, 1.0, Direction::Horizontal)? + dist(2.0, 1.0, Direction::Horizontal)?);
    let parallel = rel(width(1.0, 1.5)?, width(1.0, 1.0)? + width(1.0, 0.5)?);
    ensure(series < 0.03 && parallel < 0.03, || format!("series {series:.3e}, parallel {parallel:.3e}"))?;
    Ok(format!(
        "round annuli within {:.3}% (slowest {slowest:.1} s); rectangles within {:.3}%; series {:.3}%, parallel {:.3}%",
        100.0 * worst_round,
        100.0 * worst_rect,
        100.0 * series,
        100.0 * parallel
    ))
}

// ---------------------------------------------------------------- 7

fn molecule_decisions() -> Outcome {
    ensure(molecule_check(&airplane(), Bounds::new(4, 4, 4)).0, || "airplane fails (4,4,4)".into())?;
    let basilica = QuadraticMap::new(Complex64::new(-1.0, 0.0));
    ensure(!molecule_check(&basilica, Bounds::new(10, 10, 10)).0, || "c = -1 passes (10,10,10)".into())?;
    let params = [
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.2, 0.0),
        Complex64::new(-0.12, 0.75),
        Complex64::new(-1.3, 0.0),
        Complex64::new(-1.77, 0.0),
        airplane().c,
        centre(4, -0.1565, 1.0323).c,
        centre(4, -1.9408, 0.0).c,
        centre(5, -1.9854, 0.0).c,
        centre(5, -1.6254, 0.0).c,
    ];
    let mut satisfied = 0;
    for c in params {
        let map = QuadraticMap::new(c);
        let search = RenormSearch::new(&map, Bounds::new(5, 5, 5), RenormOptions::default()).map_err(|e| e.to_string())?;
        let ok = |r, q, n| search.best(Bounds::new(r, q, n)).is_ok();
        for r in 1..=5 {
            for q in 1..=5 {
                for n in 1..=5 {
                    if ok(r, q, n) {
                        satisfied += 1;
                        let up = [(r < 5).then(|| (r + 1, q, n)), (q < 5).then(|| (r, q + 1, n)), (n < 5).then(|| (r, q, n + 1))];
                        for (a, b, d) in up.into_iter().flatten() {
                            ensure(ok(a, b, d), || format!("{c}: true at ({r},{q},{n}), false at ({a},{b},{d})"))?;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("airplane true, c = -1 false; monotone over 10 parameters x 125 bounds ({satisfied} true)"))
}

// ---------------------------------------------------------------- 8

fn run_moduli(dir: &std::path::Path, extra: &[&str]) -> Result<Value, String> {
    let c = format!("{:?}", airplane().c.re);
    let out = dir.to_string_lossy().into_owned();
    let mut args = vec!["moduli", "--c", &c, "--resolution", "64", "--out", &out];
    args.extend_from_slice(extra);
    let o = Command::new(env!("CARGO_BIN_EXE_yoccoz")).args(&args).output().map_err(|e| e.to_string())?;
    ensure(o.status.code() == Some(0), || String::from_utf8_lossy(&o.stderr).into_owned())?;
    serde_json::from_str(&std::fs::read_to_string(dir.join("moduli.json")).map_err(|e| e.to_string())?).map_err(|e| e.to_string())
}

fn moduli_table() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = run_moduli(&tmp.path().join("a"), &[])?;
    run_moduli(&tmp.path().join("b"), &[])?;
    // schema
    ensure(a["schema"] == "yoccoz.moduli/1", || format!("schema {}", a["schema"]))?;
    for key in ["metadata", "molecule", "label", "nest_depths", "return_times", "rows"] {
        ensure(!a[key].is_null(), || format!("missing {key}"))?;
    }
    let rows = a["rows"].as_array().ok_or("rows")?;
    let keys = [
        "kind", "name", "outer", "inner", "value", "refinement_delta", "resolution", "solver", "iterations", "residual", "times",
        "degrees", "mod_chi", "mod_chi_delta", "ratio", "bound", "status",
    ];
    for r in rows {
        let obj = r.as_object().ok_or("row")?;
        ensure(obj.len() == keys.len() && keys.iter().all(|k| obj.contains_key(*k)), || format!("row keys {:?}", obj.keys()))?;
        ensure(r["status"] == "ok", || format!("row {r}"))?;
        ensure(r["value"].as_f64().map_or(false, |v| v > 0.0), || format!("row {r}"))?;
        ensure(r["refinement_delta"].as_f64().is_some(), || format!("row {r}"))?;
    }
    let nest = rows.iter().find(|r| r["kind"] == "nest").ok_or("no nest row")?;
    ensure(nest["name"] == "mod(E^0, E^1)", || format!("{}", nest["name"]))?;
    // determinism
    for f in ["moduli.json", "moduli.csv"] {
        let x = std::fs::read(tmp.path().join("a").join(f)).map_err(|e| e.to_string())?;
        let y = std::fs::read(tmp.path().join("b").join(f)).map_err(|e| e.to_string())?;
        ensure(x == y, || format!("{f} differs between identical runs"))?;
    }
    // gating through the table
    let bad = run_moduli(&tmp.path().join("c"), &["--times", "3,6"])?;
    let status = bad["rows"][1]["status"].as_str().unwrap_or("").to_string();
    ensure(status.starts_with("hypothesis not met: t_m − t_1 < p"), || status.clone())?;
    // gating in the library, one bullet at a time
    let map = airplane();
    let d = renorm_params(&map, Bounds::new(4, 4, 4)).map_err(|e| e.to_string())?;
    let mut pz = build_puzzle(&map, &d.alpha_portrait, d.e0_depth()).map_err(|e| e.to_string())?;
    let nest = build_nest(&mut pz, &d, 6, 600).map_err(|e| e.to_string())?;
    let p = d.period_p.ok_or("no period")?;
    let z = (d.k, pz.critical_index(d.k).unwrap());
    let y = (d.k + d.r, pz.critical_index(d.k + d.r).unwrap());
    let o = TransferOptions { resolution: 64, ..Default::default() };
    let deep = (nest.levels[0].depth(), pz.critical_index(nest.levels[0].depth()).unwrap());
    let cases: [(&[usize], (usize, usize), usize, &str); 4] = [
        (&[p, 2 * p], z, 4, "t_m − t_1 < p"),
        (&[2 * p], z, 4, "t_m < 2p"),
        (&[p], z, 1, "deg ≤ D"),
        (&[p], deep, 4, "depth Z < depth E^(χ-1)"),
    ];
    for (times, zz, bound, bullet) in cases {
        let opts = TransferOptions { degree_bound: bound, ..o.clone() };
        match transfer_report(&mut pz, &d, &nest, zz, y, times, &opts) {
            Err(ModulusError::HypothesisFailure { bullet: b, .. }) if b == bullet => {}
            other => return Err(format!("{bullet}: {other:?}")),
        }
    }
    ensure(transfer_report(&mut pz, &d, &nest, z, y, &[p], &o).is_ok(), || "admissible row rejected".into())?;
    Ok(format!("{} rows with full schema; byte-identical reruns; 4 transfer hypotheses enforced", rows.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, f64); 8] = [
        ("angle engine exactness", angle_engine, 10.0),
        ("ray tracing calibration", ray_calibration, f64::INFINITY),
        ("landing correctness", landing, 30.0),
        ("puzzle structure", puzzle_structure, f64::INFINITY),
        ("lemma registry", lemma_registry, 300.0),
        ("modulus solver calibration", modulus_calibration, f64::INFINITY),
        ("molecule decision regression", molecule_decisions, f64::INFINITY),
        ("observational moduli table", moduli_table, f64::INFINITY),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        let result = match result {
            Ok(msg) if secs >= *budget => Err(format!("{msg}; took {secs:.1} s, budget {budget} s")),
            r => r,
        };
        match result {
            Ok(msg) => println!("criterion {} PASS {name}: {msg} ({secs:.1} s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {msg} ({secs:.1} s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
