//! The subcommands. Each returns the text for stdout; files go under the
//! output directory together with a `manifest.json`.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};
use yoccoz_core::angles::{periodic_angles, validate_portrait, Angle, OrbitPortrait};
use yoccoz_core::dynamics::{cluster_landings, QuadraticMap};
use yoccoz_core::lemmas::{LemmaEntry, LemmaRegistry, VerifyContext};
use yoccoz_core::modulus::{
    bigon_distance, piece_modulus, transfer_report, ModulusError, ModulusEstimate, ModulusOptions, TransferOptions,
    DEFAULT_RESOLUTION, PLANAR_LABEL,
};
use yoccoz_core::puzzle::{build_puzzle, Puzzle};
use yoccoz_core::renorm::{
    build_nest, find_dividing_cycles, renorm_params_with, PrincipalNest, RenormData, RenormError, RenormKind,
};

use crate::config::RunConfig;
use crate::molecule::{skeleton, Component};
use crate::svg::{self, Overlay, View};
use crate::{json, CliError};

pub const VERIFY_SCHEMA: &str = "yoccoz.verification/1";
pub const MODULI_SCHEMA: &str = "yoccoz.moduli/1";
pub const MOLECULE_SCHEMA: &str = "yoccoz.molecule/1";

/// Variant name of an error's `Debug` form.
fn variant<E: std::fmt::Debug>(e: &E) -> String {
    format!("{e:?}").chars().take_while(|c| c.is_alphanumeric() || *c == '_').collect()
}

fn numeric<E: std::fmt::Debug + std::fmt::Display>(e: E) -> CliError {
    CliError::numeric(variant(&e), e.to_string())
}

fn sha256(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config_hash: String,
    files: BTreeMap<String, String>,
    wall_time_seconds: f64,
}

/// Writes `files` and the manifest into `dir`.
fn persist(dir: &Path, command: &str, cfg: &RunConfig, files: &[(String, String)], start: Instant) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::numeric("Io", format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut hashes = BTreeMap::new();
    for (name, text) in files {
        std::fs::write(dir.join(name), text).map_err(io)?;
        hashes.insert(name.clone(), sha256(text.as_bytes()));
    }
    let manifest = Manifest {
        command,
        config_hash: cfg.hash(),
        files: hashes,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    std::fs::write(dir.join("manifest.json"), json::to_string(&manifest)).map_err(io)
}

#[derive(Serialize)]
struct Metadata {
    config_hash: String,
    config: serde_json::Value,
    versions: BTreeMap<&'static str, &'static str>,
}

fn metadata(cfg: &RunConfig) -> Metadata {
    let versions = BTreeMap::from([("yoccoz-cli", env!("CARGO_PKG_VERSION")), ("yoccoz-core", yoccoz_core::VERSION)]);
    Metadata { config_hash: cfg.hash(), config: cfg.canonical(), versions }
}

/// The molecule-condition summary for a parameter.
#[derive(Serialize)]
pub struct MoleculeReport {
    c: [f64; 2],
    bounds: [usize; 3],
    satisfied: bool,
    r: Option<usize>,
    q: Option<usize>,
    n: Option<usize>,
    k: Option<usize>,
    lambda: Option<usize>,
    kind: Option<RenormKind>,
    p: Option<usize>,
    verified_up_to: Option<usize>,
    reason: Option<String>,
}

fn molecule_report(cfg: &RunConfig, data: Option<&RenormData>, reason: Option<&str>) -> MoleculeReport {
    MoleculeReport {
        c: cfg.c,
        bounds: cfg.bounds,
        satisfied: data.is_some(),
        r: data.map(|d| d.r),
        q: data.map(|d| d.q),
        n: data.map(|d| d.n),
        k: data.map(|d| d.k),
        lambda: data.map(|d| d.lambda),
        kind: data.map(|d| d.kind),
        p: data.and_then(|d| d.period_p),
        verified_up_to: data.map(|d| d.verified_up_to),
        reason: if data.is_some() { None } else { reason.map(str::to_string) },
    }
}

// ---------------------------------------------------------------- portrait

pub enum PortraitInput {
    /// Classes separated by `;`, angles by `,`.
    Angles(String),
    Landing { c: [f64; 2], period: usize, max_ray_period: u32 },
}

#[derive(Serialize)]
struct PortraitOut {
    portrait: OrbitPortrait,
    ray_period: usize,
}

#[derive(Serialize)]
struct LandingOut {
    c: [f64; 2],
    period: usize,
    max_ray_period: u32,
    classes: Vec<LandingClassOut>,
}

#[derive(Serialize)]
struct LandingClassOut {
    angles: Vec<Angle>,
    landing_point: Complex64,
    dividing: bool,
}

fn parse_classes(text: &str) -> Result<Vec<Vec<Angle>>, CliError> {
    text.split(';')
        .map(|class| {
            class
                .split(',')
                .map(|a| a.trim().parse::<Angle>().map_err(|e| CliError::usage_kind(variant(&e), e.to_string())))
                .collect()
        })
        .collect()
}

/// Whether `z` has exact period `n`.
fn has_period(map: &QuadraticMap, z: Complex64, n: usize) -> bool {
    let close = |m: usize| (map.iterate(z, m) - z).norm() < 1e-6 * (1.0 + z.norm());
    close(n) && (1..n).filter(|d| n % d == 0).all(|d| !close(d))
}

pub fn portrait(input: &PortraitInput) -> Result<String, CliError> {
    match input {
        PortraitInput::Angles(text) => {
            let classes = parse_classes(text)?;
            let p = validate_portrait(&classes).map_err(|e| CliError::usage_kind(variant(&e), e.to_string()))?;
            Ok(json::to_string(&PortraitOut { ray_period: p.ray_period(), portrait: p }))
        }
        &PortraitInput::Landing { c, period, max_ray_period } => {
            if period == 0 || max_ray_period == 0 || max_ray_period > 12 {
                return Err(CliError::usage("need period ≥ 1 and 1 ≤ max-ray-period ≤ 12"));
            }
            let map = QuadraticMap::new(Complex64::new(c[0], c[1]));
            let angles: Vec<Angle> = periodic_angles(max_ray_period)
                .map_err(numeric)?
                .into_iter()
                .filter(|a| a.period().map_or(false, |q| q % period == 0))
                .collect();
            let found = cluster_landings(&map, &angles, map.cluster_tol);
            let mut classes = Vec::new();
            let mut unresolved = Vec::new();
            for class in found {
                match class.landing_point {
                    Some(z) if has_period(&map, z, period) => classes.push(LandingClassOut {
                        dividing: class.angles.len() >= 2,
                        angles: class.angles,
                        landing_point: z,
                    }),
                    Some(_) => {}
                    None => unresolved.extend(class.angles),
                }
            }
            if !unresolved.is_empty() {
                let list: Vec<String> = unresolved.iter().map(|a| a.to_string()).collect();
                return Err(CliError::numeric("NoLanding", format!("rays {} did not land", list.join(","))));
            }
            Ok(json::to_string(&LandingOut { c, period, max_ray_period, classes }))
        }
    }
}

// ------------------------------------------------------------------ verify

#[derive(Serialize)]
pub struct VerificationReport {
    schema: &'static str,
    metadata: Metadata,
    molecule: MoleculeReport,
    entries: Vec<LemmaEntry>,
}

fn alpha_marks(data: Option<&RenormData>, pz: &Puzzle) -> Vec<Complex64> {
    match data {
        Some(d) => vec![d.alpha_point.location],
        None => pz.cycle_points().iter().map(|p| p.location).collect(),
    }
}

pub fn verify(cfg: &RunConfig) -> Result<String, CliError> {
    let start = Instant::now();
    let map = cfg.map();
    let ctx = VerifyContext::new(&map, cfg.bounds(), cfg.renorm_options());
    let registry = LemmaRegistry::standard();
    let entries = registry.run(&ctx);
    let mut summary = String::new();
    for e in &entries {
        summary.push_str(&format!("{:<24} {}\n", e.id, json::to_string(&e.status).trim().trim_matches('"')));
    }
    let report = VerificationReport {
        schema: VERIFY_SCHEMA,
        metadata: metadata(cfg),
        molecule: molecule_report(cfg, ctx.data.as_ref(), ctx.renorm_failure.as_deref()),
        entries,
    };
    let mut files = vec![("verification.json".to_string(), json::to_string(&report))];
    if let Some(pz) = &ctx.puzzle {
        let overlay = Overlay {
            puzzle: pz,
            depth: cfg.max_depth.min(3),
            alpha: alpha_marks(ctx.data.as_ref(), pz),
            nest: ctx.nest.as_ref(),
        };
        let text = svg::julia(&map, &View::square(Complex64::new(0.0, 0.0), 2.2, 400), Some(&overlay)).map_err(numeric)?;
        files.push(("puzzle.svg".into(), text));
    }
    persist(&cfg.output_dir, "verify", cfg, &files, start)?;
    Ok(summary)
}

// ------------------------------------------------------------------ moduli

#[derive(Debug, Clone, Default, Serialize)]
pub struct ModuliRow {
    pub kind: String,
    pub name: String,
    pub outer: Option<(usize, usize)>,
    pub inner: Option<(usize, usize)>,
    pub value: Option<f64>,
    pub refinement_delta: Option<f64>,
    pub resolution: Option<usize>,
    pub solver: Option<String>,
    pub iterations: Option<usize>,
    pub residual: Option<f64>,
    pub times: Option<Vec<usize>>,
    pub degrees: Option<Vec<usize>>,
    pub mod_chi: Option<f64>,
    pub mod_chi_delta: Option<f64>,
    pub ratio: Option<f64>,
    pub bound: Option<f64>,
    /// `ok`, or the diagnostic for this row.
    pub status: String,
}

impl ModuliRow {
    fn new(kind: &str, name: String, outer: Option<(usize, usize)>, inner: Option<(usize, usize)>) -> Self {
        ModuliRow { kind: kind.into(), name, outer, inner, status: "ok".into(), ..Default::default() }
    }

    fn fill(mut self, r: Result<ModulusEstimate, ModulusError>) -> Self {
        match r {
            Ok(m) => {
                self.value = Some(m.value);
                self.refinement_delta = Some(m.refinement_delta);
                self.resolution = Some(m.resolution);
                self.solver = Some(m.solver);
                self.iterations = Some(m.iterations);
                self.residual = Some(m.residual);
            }
            Err(e) => self.status = diagnostic(&e),
        }
        self
    }
}

fn diagnostic(e: &ModulusError) -> String {
    match e {
        ModulusError::HypothesisFailure { bullet, detail } => format!("hypothesis not met: {bullet}: {detail}"),
        other => format!("{}: {other}", variant(other)),
    }
}

#[derive(Serialize)]
struct ModuliTable {
    schema: &'static str,
    metadata: Metadata,
    molecule: MoleculeReport,
    label: &'static str,
    nest_depths: Vec<usize>,
    return_times: Vec<usize>,
    rows: Vec<ModuliRow>,
}

pub const CSV_COLUMNS: [&str; 18] = [
    "kind",
    "name",
    "outer_depth",
    "outer_index",
    "inner_depth",
    "inner_index",
    "value",
    "refinement_delta",
    "resolution",
    "solver",
    "iterations",
    "residual",
    "times",
    "degrees",
    "mod_chi",
    "ratio",
    "bound",
    "status",
];

fn csv_table(rows: &[ModuliRow]) -> Result<String, CliError> {
    let f = |x: Option<f64>| x.map(json::format_float).unwrap_or_default();
    let u = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
    let list = |x: &Option<Vec<usize>>| {
        x.as_ref().map(|v| v.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(";")).unwrap_or_default()
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::numeric("Csv", e.to_string());
    w.write_record(CSV_COLUMNS).map_err(err)?;
    for r in rows {
        w.write_record([
            r.kind.clone(),
            r.name.clone(),
            u(r.outer.map(|p| p.0)),
            u(r.outer.map(|p| p.1)),
            u(r.inner.map(|p| p.0)),
            u(r.inner.map(|p| p.1)),
            f(r.value),
            f(r.refinement_delta),
            u(r.resolution),
            r.solver.clone().unwrap_or_default(),
            u(r.iterations),
            f(r.residual),
            list(&r.times),
            list(&r.degrees),
            f(r.mod_chi),
            f(r.ratio),
            f(r.bound),
            r.status.clone(),
        ])
        .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::numeric("Csv", e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

fn renorm_failure(e: RenormError) -> CliError {
    match e {
        RenormError::NotSatisfied { .. } | RenormError::TimeBudgetExceeded(_) => CliError::hypothesis(e.to_string()),
        other => numeric(other),
    }
}

fn crit(pz: &Puzzle, depth: usize) -> (usize, usize) {
    (depth, pz.critical_index(depth).expect("critical piece"))
}

pub struct ModuliArgs {
    /// Return times for the transfer row; `[p]` when absent.
    pub times: Option<Vec<usize>>,
    /// Vertex-disk radius of the bigon row relative to the vertex distance.
    pub neighborhood: f64,
}

pub fn moduli(cfg: &RunConfig, args: &ModuliArgs) -> Result<String, CliError> {
    let start = Instant::now();
    let map = cfg.map();
    let data = renorm_params_with(&map, cfg.bounds(), cfg.renorm_options()).map_err(renorm_failure)?;
    let mut pz = build_puzzle(&map, &data.alpha_portrait, data.e0_depth().max(2)).map_err(numeric)?;
    let nest = build_nest(&mut pz, &data, 6, 600).map_err(renorm_failure)?;
    let opts = ModulusOptions { auto_bump: cfg.resolution >= DEFAULT_RESOLUTION, ..Default::default() };
    let mut rows = Vec::new();

    let depths: Vec<usize> = nest.depths().into_iter().filter(|&d| d <= cfg.max_depth).collect();
    for (i, pair) in depths.windows(2).enumerate() {
        let (outer, inner) = (crit(&pz, pair[0]), crit(&pz, pair[1]));
        let row = ModuliRow::new("nest", format!("mod(E^{i}, E^{})", i + 1), Some(outer), Some(inner));
        rows.push(row.fill(piece_modulus(&pz, outer, inner, cfg.resolution, &opts)));
    }

    let (z, y) = (crit(&pz, data.k), crit(&pz, data.k + data.r));
    let mut row = ModuliRow::new("transfer", "mod(Y^k, Y^(k+r)) vs mod(E^chi, K)".into(), Some(z), Some(y));
    match args.times.clone().or(data.period_p.map(|p| vec![p])) {
        None => row.status = "hypothesis not met: renormalization: no return period".into(),
        Some(times) => {
            row.times = Some(times.clone());
            let topts = TransferOptions { resolution: cfg.resolution, modulus: opts.clone(), ..Default::default() };
            match transfer_report(&mut pz, &data, &nest, z, y, &times, &topts) {
                Ok(t) => {
                    row.degrees = Some(t.degrees);
                    row.mod_chi = Some(t.mod_chi.value);
                    row.mod_chi_delta = Some(t.mod_chi.refinement_delta);
                    row.ratio = Some(t.ratio);
                    row.bound = Some(t.bound);
                    row = row.fill(Ok(t.mod_zy));
                }
                Err(e) => row.status = diagnostic(&e),
            }
        }
    }
    rows.push(row);

    let bigon = (1..=2.min(pz.max_depth()))
        .flat_map(|d| (0..pz.piece_count(d)).map(move |i| (d, i)))
        .find(|&(d, i)| pz.piece(d, i).vertices.len() == 2);
    let mut row = ModuliRow::new("bigon", "extremal distance between vertex neighbourhoods".into(), bigon, None);
    row = match bigon {
        Some(b) => row.fill(bigon_distance(&pz, b, args.neighborhood, cfg.resolution, &opts)),
        None => ModuliRow { status: "no bigon at depth 1 or 2".into(), ..row },
    };
    rows.push(row);

    let mut summary = String::new();
    for r in &rows {
        let v = r.value.map(json::format_float).unwrap_or_else(|| "-".into());
        summary.push_str(&format!("{:<9} {:<40} {:>24}  {}\n", r.kind, r.name, v, r.status));
    }
    let table = ModuliTable {
        schema: MODULI_SCHEMA,
        metadata: metadata(cfg),
        molecule: molecule_report(cfg, Some(&data), None),
        label: PLANAR_LABEL,
        nest_depths: nest.depths(),
        return_times: nest.return_times.clone(),
        rows,
    };
    let files = vec![("moduli.json".to_string(), json::to_string(&table)), ("moduli.csv".to_string(), csv_table(&table.rows)?)];
    persist(&cfg.output_dir, "moduli", cfg, &files, start)?;
    Ok(summary)
}

// -------------------------------------------------------------------- plot

pub struct PlotArgs {
    pub julia: bool,
    pub molecule: bool,
    pub puzzle_depth: usize,
    pub period_bound: usize,
    pub pixels: usize,
}

/// The α-puzzle when the molecule condition holds, else the puzzle of the
/// dividing cycle with fewest rays.
fn plot_puzzle(cfg: &RunConfig, depth: usize) -> Result<Option<(Puzzle, Option<RenormData>, Option<PrincipalNest>)>, CliError> {
    let map = cfg.map();
    if let Ok(d) = renorm_params_with(&map, cfg.bounds(), cfg.renorm_options()) {
        let mut pz = build_puzzle(&map, &d.alpha_portrait, depth).map_err(numeric)?;
        let nest = build_nest(&mut pz, &d, 6, 600).ok();
        return Ok(Some((pz, Some(d), nest)));
    }
    let b = cfg.bounds();
    let cycles = find_dividing_cycles(&map, b.r.max(b.q).clamp(1, 16)).map_err(numeric)?.cycles;
    match cycles.iter().min_by_key(|c| c.portrait.ray_count_r()) {
        Some(c) => Ok(Some((build_puzzle(&map, &c.portrait, depth).map_err(numeric)?, None, None))),
        None => Ok(None),
    }
}

#[derive(Serialize)]
struct MoleculeOut<'a> {
    schema: &'static str,
    period_bound: usize,
    components: &'a [Component],
}

pub fn plot(cfg: &RunConfig, args: &PlotArgs) -> Result<String, CliError> {
    if !args.julia && !args.molecule {
        return Err(CliError::usage("plot needs --julia or --molecule"));
    }
    if !(16..=2048).contains(&args.pixels) {
        return Err(CliError::usage("pixels must be in 16..=2048"));
    }
    if args.period_bound == 0 || args.period_bound > 10 {
        return Err(CliError::usage("period-bound must be in 1..=10"));
    }
    let start = Instant::now();
    let mut files = Vec::new();
    let mut summary = String::new();
    if args.julia {
        let map = cfg.map();
        let view = View::square(Complex64::new(0.0, 0.0), 2.2, args.pixels);
        let found = plot_puzzle(cfg, args.puzzle_depth)?;
        let text = match &found {
            Some((pz, d, nest)) => {
                let overlay = Overlay { puzzle: pz, depth: args.puzzle_depth, alpha: alpha_marks(d.as_ref(), pz), nest: nest.as_ref() };
                svg::julia(&map, &view, Some(&overlay))
            }
            None => svg::julia(&map, &view, None),
        }
        .map_err(numeric)?;
        summary.push_str(&format!("julia.svg {}\n", sha256(text.as_bytes())));
        files.push(("julia.svg".to_string(), text));
    }
    if args.molecule {
        let comps = skeleton(args.period_bound);
        let view = View { lo: Complex64::new(-2.1, -1.35), hi: Complex64::new(0.6, 1.35), pixels: args.pixels };
        let text = svg::molecule(&view, &comps);
        let data = MoleculeOut { schema: MOLECULE_SCHEMA, period_bound: args.period_bound, components: &comps };
        summary.push_str(&format!("molecule.svg {} ({} components)\n", sha256(text.as_bytes()), comps.len()));
        files.push(("molecule.json".to_string(), json::to_string(&data)));
        files.push(("molecule.svg".to_string(), text));
    }
    persist(&cfg.output_dir, "plot", cfg, &files, start)?;
    Ok(summary)
}

