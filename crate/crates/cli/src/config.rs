//! Run configuration from a `key = value` file, overridden by flags.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use yoccoz_core::dynamics::QuadraticMap;
use yoccoz_core::renorm::{Bounds, RenormOptions};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// `[re, im]`.
    pub c: [f64; 2],
    /// `[r, q, n]`.
    pub bounds: [usize; 3],
    pub max_depth: usize,
    pub resolution: usize,
    pub landing_tol: f64,
    pub cluster_tol: f64,
    pub newton_tol: f64,
    pub seed_grid: usize,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let map = QuadraticMap::new(Complex64::new(0.0, 0.0));
        RunConfig {
            c: [0.0, 0.0],
            bounds: [4, 4, 4],
            max_depth: 8,
            resolution: 512,
            landing_tol: map.landing_tol,
            cluster_tol: map.cluster_tol,
            newton_tol: map.newton_tol,
            seed_grid: RenormOptions::default().seed_grid,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Flag values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub c: Option<String>,
    pub bounds: Option<String>,
    pub max_depth: Option<usize>,
    pub resolution: Option<usize>,
    pub out: Option<PathBuf>,
    pub config: Option<PathBuf>,
}

pub fn parse_complex(s: &str) -> Result<[f64; 2], CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| CliError::usage(format!("cannot parse `{s}` as RE[,IM]")));
    match parts.as_slice() {
        [re] => Ok([num(re)?, 0.0]),
        [re, im] => Ok([num(re)?, num(im)?]),
        _ => Err(CliError::usage(format!("cannot parse `{s}` as RE[,IM]"))),
    }
}

pub fn parse_bounds(s: &str) -> Result<[usize; 3], CliError> {
    let parts: Result<Vec<usize>, _> = s.split(',').map(|t| t.trim().parse::<usize>()).collect();
    match parts.as_deref() {
        Ok([r, q, n]) => Ok([*r, *q, *n]),
        _ => Err(CliError::usage(format!("cannot parse `{s}` as R,Q,N"))),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn resolve(o: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match &o.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(c) = &o.c {
            cfg.c = parse_complex(c)?;
        }
        if let Some(b) = &o.bounds {
            cfg.bounds = parse_bounds(b)?;
        }
        if let Some(d) = o.max_depth {
            cfg.max_depth = d;
        }
        if let Some(r) = o.resolution {
            cfg.resolution = r;
        }
        if let Some(out) = &o.out {
            cfg.output_dir = out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [("landing_tol", self.landing_tol), ("cluster_tol", self.cluster_tol), ("newton_tol", self.newton_tol)]
        {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::usage(format!("{name} must be positive")));
            }
        }
        if !self.resolution.is_power_of_two() || !(64..=4096).contains(&self.resolution) {
            return Err(CliError::usage(format!("resolution {} must be a power of two in 64..=4096", self.resolution)));
        }
        if !self.c.iter().all(|x| x.is_finite()) {
            return Err(CliError::usage("c must be finite"));
        }
        Ok(())
    }

    pub fn map(&self) -> QuadraticMap {
        let mut m = QuadraticMap::new(Complex64::new(self.c[0], self.c[1]));
        m.landing_tol = self.landing_tol;
        m.cluster_tol = self.cluster_tol;
        m.newton_tol = self.newton_tol;
        m
    }

    pub fn bounds(&self) -> Bounds {
        Bounds::new(self.bounds[0], self.bounds[1], self.bounds[2])
    }

    pub fn renorm_options(&self) -> RenormOptions {
        RenormOptions { seed_grid: self.seed_grid, ..RenormOptions::default() }
    }

    /// The configuration without its output directory.
    pub fn canonical(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("serializable");
        v.as_object_mut().expect("object").remove("output_dir");
        v
    }

    /// SHA-256 of [`RunConfig::canonical`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(crate::json::to_string(&self.canonical()).as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("yoccoz-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.toml");
        std::fs::write(&path, "c = [-1.0, 0.0]\nbounds = [3, 3, 3]\nresolution = 128\n").unwrap();
        let o = Overrides { config: Some(path.clone()), bounds: Some("5,5,5".into()), ..Default::default() };
        let cfg = RunConfig::resolve(&o).unwrap();
        assert_eq!(cfg.c, [-1.0, 0.0]);
        assert_eq!(cfg.bounds, [5, 5, 5]);
        assert_eq!(cfg.resolution, 128);
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn invalid_values() {
        let bad = |o: Overrides| RunConfig::resolve(&o).unwrap_err().code;
        assert_eq!(bad(Overrides { resolution: Some(100), ..Default::default() }), 2);
        assert_eq!(bad(Overrides { resolution: Some(8192), ..Default::default() }), 2);
        assert_eq!(bad(Overrides { c: Some("a,b".into()), ..Default::default() }), 2);
        assert_eq!(bad(Overrides { bounds: Some("1,2".into()), ..Default::default() }), 2);
    }

    #[test]
    fn hash_ignores_output_dir() {
        let a = RunConfig::default();
        let b = RunConfig { output_dir: "elsewhere".into(), ..a.clone() };
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig { c: [-1.0, 0.0], ..a.clone() };
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("-1").unwrap(), [-1.0, 0.0]);
        assert_eq!(parse_complex("-0.12, 0.75").unwrap(), [-0.12, 0.75]);
    }
}
