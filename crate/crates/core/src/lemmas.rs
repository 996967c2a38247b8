//! Registry of lemma checks, looked up by id.
//!
//! Each check reads a shared [`VerifyContext`] and reports a [`Verdict`]
//! with the measured quantities. Checks that need a dividing cycle or the
//! renormalization data are exempt when these are unavailable.

use std::collections::{BTreeMap, VecDeque};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angles::{complementary_arc_index, Angle};
use crate::dynamics::{land_ray, QuadraticMap};
use crate::puzzle::checks::{
    buffers, check_subset_lemma, compact_containment, star_separation, containment_verdict, Verdict,
};
use crate::puzzle::{build_puzzle, Puzzle, PuzzleError, PuzzlePiece};
use crate::renorm::{
    build_nest, find_dividing_cycles, Bounds, DividingCycle, PrincipalNest, RenormData, RenormOptions, RenormSearch,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Requirement {
    DividingCycle,
    Renormalization,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Outcome {
    pub status: Option<Verdict>,
    pub measured: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub detail: String,
}

impl Outcome {
    fn new(status: Verdict) -> Self {
        Outcome { status: Some(status), ..Default::default() }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.measured.insert(key.into(), value);
        self
    }

    fn tol(mut self, key: &str, value: f64) -> Self {
        self.tolerances.insert(key.into(), value);
        self
    }

    fn note(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LemmaEntry {
    pub id: String,
    pub statement: String,
    pub status: Verdict,
    pub measured: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub detail: String,
}

pub trait LemmaCheck: Send + Sync {
    fn id(&self) -> &'static str;
    fn statement(&self) -> &'static str;
    fn requires(&self) -> Requirement;
    fn check(&self, ctx: &VerifyContext) -> Result<Outcome, PuzzleError>;
}

/// Everything the checks share: the dividing cycles, the renormalization
/// data and the puzzle of `α` deep enough for every check.
pub struct VerifyContext {
    pub map: QuadraticMap,
    pub bounds: Bounds,
    pub cycles: Vec<DividingCycle>,
    pub data: Option<RenormData>,
    /// Why `data` is missing.
    pub renorm_failure: Option<String>,
    pub puzzle: Option<Puzzle>,
    pub nest: Option<PrincipalNest>,
    /// Cells per side of the separation raster.
    pub raster: usize,
}

impl VerifyContext {
    pub fn new(map: &QuadraticMap, bounds: Bounds, options: RenormOptions) -> Self {
        let mut ctx = VerifyContext {
            map: *map,
            bounds,
            cycles: Vec::new(),
            data: None,
            renorm_failure: None,
            puzzle: None,
            nest: None,
            raster: 1024,
        };
        match find_dividing_cycles(map, bounds.r.max(bounds.q).clamp(1, 16)) {
            Ok(found) => ctx.cycles = found.cycles,
            Err(e) => ctx.renorm_failure = Some(e.to_string()),
        }
        let data = RenormSearch::new(map, bounds, options).and_then(|s| s.best(bounds));
        match data {
            Ok(d) => {
                let depth = d.lambda.max(d.buffer_depth()).max(d.k + 1).max(d.e0_depth());
                match build_puzzle(map, &d.alpha_portrait, depth) {
                    Ok(mut pz) => {
                        match build_nest(&mut pz, &d, 6, 600) {
                            Ok(nest) => ctx.nest = Some(nest),
                            Err(e) => ctx.renorm_failure = Some(format!("nest: {e}")),
                        }
                        ctx.puzzle = Some(pz);
                        ctx.data = Some(d);
                    }
                    Err(e) => ctx.renorm_failure = Some(e.to_string()),
                }
            }
            Err(e) => ctx.renorm_failure = Some(e.to_string()),
        }
        if ctx.puzzle.is_none() {
            let mut cycles: Vec<&DividingCycle> = ctx.cycles.iter().collect();
            cycles.sort_by_key(|c| c.portrait.ray_count_r());
            ctx.puzzle = cycles.first().and_then(|c| build_puzzle(map, &c.portrait, 2).ok());
        }
        ctx
    }

    fn renorm(&self) -> Option<(&RenormData, &Puzzle)> {
        Some((self.data.as_ref()?, self.puzzle.as_ref()?))
    }

    /// Vertex ids of `α` and `α'` in the puzzle of `α`.
    fn alpha_vertices(&self) -> Result<(usize, usize), PuzzleError> {
        let (d, pz) = self.renorm().expect("renormalization data");
        let a = d.alpha_point.location;
        let alpha = pz.find_vertex(a, 0).ok_or(PuzzleError::NotAVertex(a, 0))?;
        let co = pz.find_vertex(-a, 1).ok_or(PuzzleError::NotAVertex(-a, 1))?;
        Ok((alpha, co))
    }
}

#[derive(Default)]
pub struct LemmaRegistry {
    checks: Vec<Box<dyn LemmaCheck>>,
}

impl LemmaRegistry {
    pub fn new() -> Self {
        LemmaRegistry::default()
    }

    pub fn standard() -> Self {
        let mut r = LemmaRegistry::new();
        r.register(Box::new(CvPp));
        r.register(Box::new(Subset));
        r.register(Box::new(Separation));
        r.register(Box::new(Zeta));
        r.register(Box::new(SinglePoint));
        r.register(Box::new(Qv));
        r.register(Box::new(QnPullbacks));
        r.register(Box::new(NonDegenerateAnnulus));
        r
    }

    /// Replaces any check with the same id.
    pub fn register(&mut self, check: Box<dyn LemmaCheck>) {
        self.checks.retain(|c| c.id() != check.id());
        self.checks.push(check);
    }

    pub fn ids(&self) -> Vec<&'static str> {
        self.checks.iter().map(|c| c.id()).collect()
    }

    pub fn get(&self, id: &str) -> Option<&dyn LemmaCheck> {
        self.checks.iter().find(|c| c.id() == id).map(|c| c.as_ref())
    }

    pub fn run_one(&self, check: &dyn LemmaCheck, ctx: &VerifyContext) -> LemmaEntry {
        let missing = match check.requires() {
            Requirement::DividingCycle if ctx.puzzle.is_none() => Some("no dividing cycle".to_string()),
            Requirement::Renormalization if ctx.renorm().is_none() || ctx.nest.is_none() => Some(format!(
                "renormalization data unavailable: {}",
                ctx.renorm_failure.as_deref().unwrap_or("unknown")
            )),
            _ => None,
        };
        let outcome = match missing {
            Some(why) => Outcome::new(Verdict::Exempt).note(why),
            None => check.check(ctx).unwrap_or_else(|e| Outcome::new(Verdict::Inconclusive).note(e.to_string())),
        };
        LemmaEntry {
            id: check.id().into(),
            statement: check.statement().into(),
            status: outcome.status.unwrap_or(Verdict::Inconclusive),
            measured: outcome.measured,
            tolerances: outcome.tolerances,
            detail: outcome.detail,
        }
    }

    pub fn run(&self, ctx: &VerifyContext) -> Vec<LemmaEntry> {
        self.checks.iter().map(|c| self.run_one(c.as_ref(), ctx)).collect()
    }
}

fn mid_angle(piece: &PuzzlePiece) -> Angle {
    let (x, y) = &piece.arcs[0];
    x.add(&(x.ccw_distance(y) / num_rational::BigRational::from_integer(2.into())))
}

struct CvPp;

impl LemmaCheck for CvPp {
    fn id(&self) -> &'static str {
        "cv_pp"
    }
    fn statement(&self) -> &'static str {
        "the depth-0 piece containing the critical value has only one vertex"
    }
    fn requires(&self) -> Requirement {
        Requirement::DividingCycle
    }
    fn check(&self, ctx: &VerifyContext) -> Result<Outcome, PuzzleError> {
        let mut worst = 0usize;
        let mut checked = 0usize;
        let mut puzzles: Vec<Puzzle> = Vec::new();
        for c in ctx.cycles.iter().filter(|c| c.portrait.ray_count_r() <= 8) {
            puzzles.push(build_puzzle(&ctx.map, &c.portrait, 0)?);
        }
        let own = ctx.puzzle.as_ref().into_iter();
        for pz in own.chain(puzzles.iter()) {
            let idx = pz.critical_value_index(0);
            let x0 = pz.piece(0, idx);
            worst = worst.max(x0.vertices.len());
            // numeric confirmation of the combinatorial location
            if !pz.polygon(0, idx)?.contains(ctx.map.c) {
                return Ok(Outcome::new(Verdict::Fail).note("critical value outside its polygon"));
            }
            checked += 1;
        }
        let status = if worst == 1 { Verdict::Pass } else { Verdict::Fail };
        Ok(Outcome::new(status).with("puzzles", checked as f64).with("max_vertices", worst as f64).tol("vertices", 1.0))
    }
}

struct Subset;

impl LemmaCheck for Subset {
    fn id(&self) -> &'static str {
        "subset"
    }
    fn statement(&self) -> &'static str {
        "a piece not touching the cycle is compactly contained in its depth-0 piece"
    }
    fn requires(&self) -> Requirement {
        Requirement::DividingCycle
    }
    fn check(&self, ctx: &VerifyContext) -> Result<Outcome, PuzzleError> {
        let pz = ctx.puzzle.as_ref().expect("puzzle");
        let mut verdicts = Vec::new();
        let mut min_gap = f64::INFINITY;
        let mut count = 0;
        for depth in 1..=2.min(pz.max_depth()) {
            for i in 0..pz.piece_count(depth) {
                let c = check_subset_lemma(pz, depth, i)?;
                if c.verdict != Verdict::Exempt {
                    min_gap = min_gap.min(c.gap);
                    count += 1;
                }
                verdicts.push(c.verdict);
            }
        }
        let mut out = Outcome::default().with("pieces", count as f64).tol("gap", 10.0 * pz.resolution());
        if count > 0 {
            out = out.with("min_gap", min_gap);
        }
        if let Some(d) = &ctx.data {
            let e0 = (d.e0_depth(), pz.critical_index(d.e0_depth()).expect("critical"));
            let yk = (d.k, pz.critical_index(d.k).expect("critical"));
            let c = compact_containment(pz, e0, yk)?;
            out = out.with("e0_gap", c.gap);
            verdicts.push(c.verdict);
        }
        out.status = Some(Verdict::combine(verdicts));
        Ok(out)
    }
}

struct Separation;

impl Separation {
    /// The pairs of rays `f^{-tm}(C')`, `m < s`, and the point `γ`.
    fn curves(ctx: &VerifyContext) -> Result<(Complex64, Vec<(Angle, Angle)>), PuzzleError> {
        let (d, pz) = ctx.renorm().expect("renormalization data");
        let (_, co) = ctx.alpha_vertices()?;
        let y1 = pz.piece(1, pz.critical_index(1).expect("critical"));
        let k = y1.vertices.iter().position(|&v| v == co).ok_or(PuzzleError::VertexCountViolation(0))?;
        let c_prime = y1.vertex_angles[k].clone();
        let Some(gp) = &d.gamma_portrait else {
            return Ok((d.gamma_point.location, vec![c_prime]));
        };
        let (t, s) = (gp.period_t(), gp.valence_s());
        let gpz = build_puzzle(&ctx.map, gp, t * (s - 1) + 1)?;
        let g1 = gpz.critical_index(1).expect("critical");
        let gamma = gpz.piece(1, g1).vertices.into_iter().find(|&v| gpz.vertex_depth(v) == 0).expect("cycle vertex");
        let mut pairs = Vec::new();
        for m in 0..s {
            let depth = t * m + 1;
            let z = gpz
                .pieces_at_vertex(depth, gamma)
                .into_iter()
                .find(|&i| gpz.image_k(depth, i, t * m) == g1)
                .ok_or(PuzzleError::NonUnivalentPullback(gamma))?;
            let piece = gpz.piece(depth, z);
            let lift = |a: &Angle| -> Result<Angle, PuzzleError> {
                let n = num_bigint::BigInt::from(1u64) << (t * m);
                (0..(1u64 << (t * m)))
                    .map(|j| Angle::from_ratio((a.ratio() + num_rational::BigRational::from_integer(j.into())) / num_rational::BigRational::from_integer(n.clone())))
                    .find(|b| piece.contains_angle(b))
                    .ok_or(PuzzleError::NonUnivalentPullback(gamma))
            };
            pairs.push((lift(&c_prime.0)?, lift(&c_prime.1)?));
        }
        Ok((gpz.vertex_point(gamma)?, pairs))
    }
}

/// Flood-fill raster over the square `[-w, w]^2`.
struct Raster {
    n: usize,
    w: f64,
    wall: Vec<bool>,
}

impl Raster {
    fn new(n: usize, w: f64) -> Self {
        Raster { n, w, wall: vec![false; n * n] }
    }

    fn cell(&self, z: Complex64) -> Option<usize> {
        let h = 2.0 * self.w / self.n as f64;
        let i = ((z.re + self.w) / h).floor();
        let j = ((z.im + self.w) / h).floor();
        if i < 0.0 || j < 0.0 || i >= self.n as f64 || j >= self.n as f64 {
            return None;
        }
        Some(j as usize * self.n + i as usize)
    }

    fn draw(&mut self, pts: &[Complex64]) {
        let h = 2.0 * self.w / self.n as f64;
        for s in pts.windows(2) {
            let steps = ((s[1] - s[0]).norm() / (0.25 * h)).ceil().max(1.0) as usize;
            for k in 0..=steps {
                let z = s[0] + (s[1] - s[0]) * (k as f64 / steps as f64);
                if let Some(c) = self.cell(z) {
                    self.wall[c] = true;
                }
            }
        }
    }

    /// Cells 4-connected to `seed` avoiding walls.
    fn fill(&self, seed: usize) -> Vec<bool> {
        let n = self.n;
        let mut seen = vec![false; n * n];
        let mut queue = VecDeque::from([seed]);
        seen[seed] = true;
        while let Some(c) = queue.pop_front() {
            let (i, j) = (c % n, c / n);
            let mut nb = Vec::with_capacity(4);
            if i > 0 {
                nb.push(c - 1);
            }
            if i + 1 < n {
                nb.push(c + 1);
            }
            if j > 0 {
                nb.push(c - n);
            }
            if j + 1 < n {
                nb.push(c + n);
            }
            for x in nb {
                if !seen[x] && !self.wall[x] {
                    seen[x] = true;
                    queue.push_back(x);
                }
            }
        }
        seen
    }
}

impl LemmaCheck for Separation {
    fn id(&self) -> &'static str {
        "separation"
    }
    fn statement(&self) -> &'static str {
        "the arcs f^-tm(C'), m < s, separate γ from the cycle α and the co-cycle α' (apart from α' on C')"
    }
    fn requires(&self) -> Requirement {
        Requirement::Renormalization
    }
    fn check(&self, ctx: &VerifyContext) -> Result<Outcome, PuzzleError> {
        let (_, pz) = ctx.renorm().expect("renormalization data");
        let (gamma, pairs) = Self::curves(ctx)?;
        let mut traces = Vec::new();
        for (a, b) in &pairs {
            for x in [a, b] {
                let t = land_ray(&ctx.map, x, ctx.map.landing_tol)?;
                let mut pts = t.points.clone();
                pts.extend(t.landing_point);
                traces.push(pts);
            }
        }
        let start = traces.iter().map(|p| p[0].norm()).fold(f64::INFINITY, f64::min);
        let radius = 0.5 + (0.25 + ctx.map.c.norm()).sqrt();
        let w = (1.5 * radius).min(0.99 * start / 2f64.sqrt());
        let mut raster = Raster::new(ctx.raster, w);
        for p in &traces {
            raster.draw(p);
        }
        let h = 2.0 * w / ctx.raster as f64;
        let out = Outcome::default().with("raster", ctx.raster as f64).with("cell", h).with("curves", pairs.len() as f64);
        let Some(seed) = raster.cell(gamma).filter(|&c| !raster.wall[c]) else {
            return Ok(Outcome { status: Some(Verdict::Inconclusive), ..out }.note("γ lies on a drawn curve"));
        };
        let reached = raster.fill(seed);
        let (_, co) = ctx.alpha_vertices()?;
        let co_point = pz.vertex_point(co)?;
        let mut targets: Vec<Complex64> = Vec::new();
        for v in (0..pz.vertex_count()).filter(|&v| pz.vertex_depth(v) == 0) {
            let a = pz.vertex_point(v)?;
            targets.push(a);
            if (-a - co_point).norm() > 1e-9 {
                targets.push(-a);
            }
        }
        let mut status = Verdict::Pass;
        let mut detail = String::new();
        for z in &targets {
            match raster.cell(*z) {
                Some(c) if raster.wall[c] => {
                    status = Verdict::combine([status, Verdict::Inconclusive]);
                    detail = format!("cycle point {z} lies on a drawn curve");
                }
                Some(c) if reached[c] => {
                    status = Verdict::Fail;
                    detail = format!("cycle point {z} is reached from γ");
                }
                Some(_) => {}
                None => {
                    status = Verdict::combine([status, Verdict::Inconclusive]);
                    detail = format!("cycle point {z} outside the raster");
                }
            }
        }
        Ok(Outcome { status: Some(status), ..out.with("targets", targets.len() as f64) }.note(detail))
    }
}

struct Zeta;

impl LemmaCheck for Zeta {
    fn id(&self) -> &'static str {
        "zeta"
    }
    fn statement(&self) -> &'static str {
        "ζ = f^k(0) is separated from α and 0 by the rays landing at α'"
    }
    fn requires(&self) -> Requirement {
        Requirement::Renormalization
    }
    fn check(&self, ctx: &VerifyContext) -> Result<Outcome, PuzzleError> {
        let (d, pz) = ctx.renorm().expect("renormalization data");
        let (alpha, co) = ctx.alpha_vertices()?;
        let rays = pz.vertex_angles(co).to_vec();
        let zeta_piece = pz.piece(1, pz.orbit_piece(1, d.k)?);
        let y1 = pz.piece(1, pz.critical_index(1).expect("critical"));
        let sector = |a: &Angle| complementary_arc_index(&rays, a);
        let s_zeta = sector(&mid_angle(&zeta_piece));
        let s_zero = sector(&mid_angle(&y1));
        // α is reached through the rays at α that bound Y^1
        let s_alpha = pz.vertex_angles(alpha).iter().map(sector).collect::<Vec<_>>();
        let alpha_with_zero = s_alpha.iter().all(|&s| s == s_zero);
        let status = if s_zeta != s_zero && alpha_with_zero { Verdict::Pass } else { Verdict::Fail };
        Ok(Outcome::new(status)
            .with("sector_zeta", s_zeta as f64)
            .with("sector_zero", s_zero as f64)
            .with("zeta_re", d.zeta(&ctx.map).re)
            .with("zeta_im", d.zeta(&ctx.map).im))
    }
}

struct SinglePoint;

impl LemmaCheck for SinglePoint {
    fn id(&self) -> &'static str {
        "single_point"
    }
    fn statement(&self) -> &'static str {
        "for λ = k+1+2r the stars S^λ(α_j) do not overlap and do not contain the critical point"
    }
    fn requires(&self) -> Requirement {
        Requirement::Renormalization
    }
    fn check(&self, ctx: &VerifyContext) -> Result<Outcome, PuzzleError> {
        let (d, pz) = ctx.renorm().expect("renormalization data");
        let mut vs = Vec::new();
        for v in (0..pz.vertex_count()).filter(|&v| pz.vertex_depth(v) == 0) {
            vs.push(v);
            let a = pz.vertex_point(v)?;
            vs.push(pz.find_vertex(-a, 1).ok_or(PuzzleError::NotAVertex(-a, 1))?);
        }
        let r = star_separation(pz, &vs, d.lambda)?;
        Ok(Outcome::new(r.verdict)
            .with("lambda", d.lambda as f64)
            .with("stars", vs.len() as f64)
            .with("min_gap", r.min_gap)
            .with("critical_distance", r.critical_distance)
            .tol("gap", 10.0 * pz.resolution()))
    }
}

struct Qv;

impl LemmaCheck for Qv {
    fn id(&self) -> &'static str {
        "qv"
    }
    fn statement(&self) -> &'static str {
        "each vertex v of P carries a buffer Q^v, a univalent f^k-pullback of P, and the buffers are pairwise disjoint"
    }
    fn requires(&self) -> Requirement {
        Requirement::Renormalization
    }
    fn check(&self, ctx: &VerifyContext) -> Result<Outcome, PuzzleError> {
        let (d, pz) = ctx.renorm().expect("renormalization data");
        let tol = 10.0 * pz.resolution();
        match buffers(pz, d) {
            Ok(r) => {
                let status = if r.min_gap > tol { Verdict::Pass } else { Verdict::Inconclusive };
                Ok(Outcome::new(status)
                    .with("buffers", r.buffers.len() as f64)
                    .with("depth", d.buffer_depth() as f64)
                    .with("min_gap", r.min_gap)
                    .tol("gap", tol))
            }
            Err(e @ (PuzzleError::BufferOverlap(..) | PuzzleError::NonUnivalentPullback(_))) => {
                Ok(Outcome::new(Verdict::Fail).note(e.to_string()))
            }
            Err(e) => Err(e),
        }
    }
}

struct QnPullbacks;

impl LemmaCheck for QnPullbacks {
    fn id(&self) -> &'static str {
        "qn_pullbacks"
    }
    fn statement(&self) -> &'static str {
        "an f^k-pullback of S^1(α) through a point of S^1(α) ∪ S^1(α') lies in S^1(α) or in S^1(α')"
    }
    fn requires(&self) -> Requirement {
        Requirement::Renormalization
    }
    fn check(&self, ctx: &VerifyContext) -> Result<Outcome, PuzzleError> {
        let (d, pz) = ctx.renorm().expect("renormalization data");
        let (alpha, co) = ctx.alpha_vertices()?;
        let s_alpha = pz.star_of_vertex(alpha, 1)?.members;
        let s_co = pz.star_of_vertex(co, 1)?.members;
        let depth = d.k + 1;
        let maps_in = |i: usize| s_alpha.contains(&pz.image_k(depth, i, d.k));
        let to_alpha = |v: usize| {
            let mut w = v;
            for _ in 0..d.k {
                w = pz.vertex_image(w);
            }
            w == alpha
        };
        let n = pz.piece_count(depth);
        let mut component = vec![usize::MAX; n];
        let mut failures = 0;
        let mut checked = 0;
        for start in 0..n {
            let anc = pz.ancestor(depth, start, 1);
            if component[start] != usize::MAX || !maps_in(start) || !(s_alpha.contains(&anc) || s_co.contains(&anc)) {
                continue;
            }
            // the pullback through `start`: pieces glued at preimages of α
            let mut members = vec![start];
            component[start] = start;
            let mut k = 0;
            while k < members.len() {
                let p = pz.piece(depth, members[k]);
                for &v in p.vertices.iter().filter(|&&v| to_alpha(v)) {
                    for j in pz.pieces_at_vertex(depth, v) {
                        if component[j] == usize::MAX && maps_in(j) {
                            component[j] = start;
                            members.push(j);
                        }
                    }
                }
                k += 1;
            }
            let ancestors: Vec<usize> = members.iter().map(|&m| pz.ancestor(depth, m, 1)).collect();
            let inside = ancestors.iter().all(|a| s_alpha.contains(a)) || ancestors.iter().all(|a| s_co.contains(a));
            checked += 1;
            if !inside {
                failures += 1;
            }
        }
        let status = if failures == 0 { Verdict::Pass } else { Verdict::Fail };
        Ok(Outcome::new(status).with("pullbacks", checked as f64).with("failures", failures as f64))
    }
}

struct NonDegenerateAnnulus;

impl LemmaCheck for NonDegenerateAnnulus {
    fn id(&self) -> &'static str {
        "non_degenerate_annulus"
    }
    fn statement(&self) -> &'static str {
        "E^1 is compactly contained in E^0"
    }
    fn requires(&self) -> Requirement {
        Requirement::Renormalization
    }
    fn check(&self, ctx: &VerifyContext) -> Result<Outcome, PuzzleError> {
        let (d, pz) = ctx.renorm().expect("renormalization data");
        let nest = ctx.nest.as_ref().expect("nest");
        if nest.levels.len() < 2 {
            return Ok(Outcome::new(Verdict::Inconclusive).note("nest has a single level"));
        }
        let (e0, e1) = (&nest.levels[0], &nest.levels[1]);
        let l = nest.return_times[0];
        let gap = pz.boundary_gap((e1.depth(), e1.members[0]), (e0.depth(), e0.members[0]))?;
        let mut status = containment_verdict(e1.arcs_compactly_inside(e0), gap, pz.resolution());
        if l < d.r {
            status = Verdict::Fail;
        }
        Ok(Outcome::new(status)
            .with("gap", gap)
            .with("return_time", l as f64)
            .with("e0_depth", e0.depth() as f64)
            .with("e1_depth", e1.depth() as f64)
            .tol("gap", 10.0 * pz.resolution()))
    }
}
