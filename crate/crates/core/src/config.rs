//! Pipeline configuration: a flat key = value text format with dotted
//! section prefixes, parsed into a validated [`PipelineConfig`]. The
//! canonical serialization (sorted keys) feeds the manifest hash that every
//! output file carries.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ite::ViteConfig;
use crate::simulator::AnsatzFamily;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing required key {0}")]
    MissingKey(String),
    #[error("unknown key {0}")]
    UnknownKey(String),
    #[error("invalid value for {key}: {message}")]
    InvalidValue { key: String, message: String },
}

/// Hamiltonian source: a built-in chain builder or a serialized term file.
#[derive(Clone, Debug, PartialEq)]
pub enum HamiltonianSpec {
    Heisenberg { n: usize, jx: f64, jy: f64, jz: f64, h: f64, field_all_sites: bool },
    File { path: String },
}

/// Uniform drift grid over [start, stop].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    /// Grid points start, start + step, .. up to stop (inclusive within
    /// rounding slack).
    pub fn points(&self) -> Vec<f64> {
        let mut points = Vec::new();
        let slack = self.step * 1e-9;
        let mut i = 0usize;
        loop {
            let s = self.start + self.step * i as f64;
            if s > self.stop + slack {
                break;
            }
            points.push(s);
            i += 1;
        }
        points
    }

    pub fn window(&self) -> (f64, f64) {
        (self.start, self.stop)
    }
}

/// Depolarizing noise levels applied during the sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub p1: f64,
    pub p2: f64,
}

/// Clustering stage tuning.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClusterSpec {
    pub k_min: usize,
    /// Upper candidate k; clamped to N - 1 at run time.
    pub k_max: usize,
    pub restarts: usize,
    pub hopkins_repeats: usize,
    pub hopkins_fraction: f64,
    pub iqr_multiplier: f64,
}

impl Default for ClusterSpec {
    fn default() -> Self {
        Self {
            k_min: 2,
            k_max: 12,
            restarts: 50,
            hopkins_repeats: 100,
            hopkins_fraction: 0.5,
            iqr_multiplier: 1.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefineMethod {
    ExactInverse,
    PolyInverse,
}

impl RefineMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            RefineMethod::ExactInverse => "exact_inverse",
            RefineMethod::PolyInverse => "poly_inverse",
        }
    }
}

/// Refinement stage tuning.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefineSpec {
    pub method: RefineMethod,
    pub degree: usize,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for RefineSpec {
    fn default() -> Self {
        Self {
            method: RefineMethod::ExactInverse,
            degree: 31,
            tol: crate::refine::DEFAULT_TOL,
            max_iters: crate::refine::DEFAULT_MAX_ITERS,
        }
    }
}

/// Noise-study schedule: two-qubit levels swept at fixed p1, optionally
/// prefixed by a p2 = 0 baseline so the trend series has enough points.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseStudySpec {
    pub p1: f64,
    pub p2_levels: Vec<f64>,
    pub include_baseline: bool,
}

impl Default for NoiseStudySpec {
    fn default() -> Self {
        Self { p1: 0.001, p2_levels: vec![0.005, 0.010, 0.030], include_baseline: true }
    }
}

/// Everything a pipeline run needs, resolved and validated.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub hamiltonian: HamiltonianSpec,
    pub ansatz_family: AnsatzFamily,
    pub layers: usize,
    pub grid: GridSpec,
    pub vite: ViteConfig,
    pub noise: Option<NoiseSpec>,
    pub clustering: ClusterSpec,
    pub refine: RefineSpec,
    pub noise_study: NoiseStudySpec,
    pub base_seed: u64,
    pub output_dir: String,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| ConfigError::InvalidValue {
        key: key.to_string(),
        message: format!("{e}"),
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ConfigError::InvalidValue {
            key: key.to_string(),
            message: format!("expected true or false, got {value}"),
        }),
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    value
        .split(',')
        .map(|part| parse_num::<f64>(key, part.trim()))
        .collect()
}

impl PipelineConfig {
    /// Parses the flat key = value format. Unknown keys are rejected so
    /// typos surface immediately.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Parse {
                    line: i + 1,
                    message: format!("expected key = value, got {line}"),
                });
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if pairs.iter().any(|(k, _)| *k == key) {
                return Err(ConfigError::Parse {
                    line: i + 1,
                    message: format!("duplicate key {key}"),
                });
            }
            pairs.push((key, value));
        }
        Self::from_pairs(&pairs)
    }

    fn from_pairs(pairs: &[(String, String)]) -> Result<Self, ConfigError> {
        let get = |key: &str| pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let require = |key: &str| get(key).ok_or_else(|| ConfigError::MissingKey(key.into()));

        const KNOWN: &[&str] = &[
            "hamiltonian.kind",
            "hamiltonian.n",
            "hamiltonian.jx",
            "hamiltonian.jy",
            "hamiltonian.jz",
            "hamiltonian.h",
            "hamiltonian.field_all_sites",
            "hamiltonian.path",
            "ansatz.family",
            "ansatz.layers",
            "grid.start",
            "grid.stop",
            "grid.step",
            "vite.dt",
            "vite.steps",
            "vite.lambda_reg",
            "vite.record_at",
            "noise.p1",
            "noise.p2",
            "clustering.k_min",
            "clustering.k_max",
            "clustering.restarts",
            "clustering.hopkins_repeats",
            "clustering.hopkins_fraction",
            "clustering.iqr_multiplier",
            "refine.method",
            "refine.degree",
            "refine.tol",
            "refine.max_iters",
            "noise_study.p1",
            "noise_study.p2_levels",
            "noise_study.include_baseline",
            "seed",
            "output_dir",
        ];
        for (key, _) in pairs {
            if !KNOWN.contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey(key.clone()));
            }
        }

        let hamiltonian = match require("hamiltonian.kind")? {
            "heisenberg" => HamiltonianSpec::Heisenberg {
                n: parse_num("hamiltonian.n", require("hamiltonian.n")?)?,
                jx: parse_num("hamiltonian.jx", get("hamiltonian.jx").unwrap_or("0.5"))?,
                jy: parse_num("hamiltonian.jy", get("hamiltonian.jy").unwrap_or("0.5"))?,
                jz: parse_num("hamiltonian.jz", get("hamiltonian.jz").unwrap_or("0.6"))?,
                h: parse_num("hamiltonian.h", get("hamiltonian.h").unwrap_or("1"))?,
                field_all_sites: parse_bool(
                    "hamiltonian.field_all_sites",
                    get("hamiltonian.field_all_sites").unwrap_or("false"),
                )?,
            },
            "file" => HamiltonianSpec::File { path: require("hamiltonian.path")?.to_string() },
            other => {
                return Err(ConfigError::InvalidValue {
                    key: "hamiltonian.kind".into(),
                    message: format!("expected heisenberg or file, got {other}"),
                })
            }
        };

        let family: AnsatzFamily =
            require("ansatz.family")?.parse().map_err(|e: String| ConfigError::InvalidValue {
                key: "ansatz.family".into(),
                message: e,
            })?;

        let grid = GridSpec {
            start: parse_num("grid.start", require("grid.start")?)?,
            stop: parse_num("grid.stop", require("grid.stop")?)?,
            step: parse_num("grid.step", require("grid.step")?)?,
        };

        let defaults = ViteConfig::default();
        let record_at = match get("vite.record_at") {
            Some(v) => parse_list("vite.record_at", v)?
                .into_iter()
                .map(|x| x as usize)
                .collect(),
            None => defaults.record_at.clone(),
        };
        let vite = ViteConfig {
            dt: parse_num("vite.dt", get("vite.dt").unwrap_or("0.1"))?,
            steps: parse_num("vite.steps", get("vite.steps").unwrap_or("25"))?,
            lambda_reg: parse_num("vite.lambda_reg", get("vite.lambda_reg").unwrap_or("1e-6"))?,
            record_at,
        };

        let noise = match (get("noise.p1"), get("noise.p2")) {
            (None, None) => None,
            (p1, p2) => Some(NoiseSpec {
                p1: parse_num("noise.p1", p1.unwrap_or("0"))?,
                p2: parse_num("noise.p2", p2.unwrap_or("0"))?,
            }),
        };

        let cd = ClusterSpec::default();
        let clustering = ClusterSpec {
            k_min: parse_num("clustering.k_min", get("clustering.k_min").unwrap_or("2"))?,
            k_max: parse_num("clustering.k_max", get("clustering.k_max").unwrap_or("12"))?,
            restarts: parse_num(
                "clustering.restarts",
                get("clustering.restarts").unwrap_or("50"),
            )?,
            hopkins_repeats: parse_num(
                "clustering.hopkins_repeats",
                get("clustering.hopkins_repeats").unwrap_or("100"),
            )?,
            hopkins_fraction: match get("clustering.hopkins_fraction") {
                Some(v) => parse_num("clustering.hopkins_fraction", v)?,
                None => cd.hopkins_fraction,
            },
            iqr_multiplier: match get("clustering.iqr_multiplier") {
                Some(v) => parse_num("clustering.iqr_multiplier", v)?,
                None => cd.iqr_multiplier,
            },
        };

        let rd = RefineSpec::default();
        let refine = RefineSpec {
            method: match get("refine.method").unwrap_or("exact_inverse") {
                "exact_inverse" => RefineMethod::ExactInverse,
                "poly_inverse" => RefineMethod::PolyInverse,
                other => {
                    return Err(ConfigError::InvalidValue {
                        key: "refine.method".into(),
                        message: format!("expected exact_inverse or poly_inverse, got {other}"),
                    })
                }
            },
            degree: parse_num("refine.degree", get("refine.degree").unwrap_or("31"))?,
            tol: match get("refine.tol") {
                Some(v) => parse_num("refine.tol", v)?,
                None => rd.tol,
            },
            max_iters: parse_num(
                "refine.max_iters",
                get("refine.max_iters").unwrap_or("500"),
            )?,
        };

        let nd = NoiseStudySpec::default();
        let noise_study = NoiseStudySpec {
            p1: match get("noise_study.p1") {
                Some(v) => parse_num("noise_study.p1", v)?,
                None => nd.p1,
            },
            p2_levels: match get("noise_study.p2_levels") {
                Some(v) => parse_list("noise_study.p2_levels", v)?,
                None => nd.p2_levels.clone(),
            },
            include_baseline: parse_bool(
                "noise_study.include_baseline",
                get("noise_study.include_baseline").unwrap_or("true"),
            )?,
        };

        let config = Self {
            hamiltonian,
            ansatz_family: family,
            layers: parse_num("ansatz.layers", get("ansatz.layers").unwrap_or("1"))?,
            grid,
            vite,
            noise,
            clustering,
            refine,
            noise_study,
            base_seed: parse_num("seed", get("seed").unwrap_or("1"))?,
            output_dir: get("output_dir").unwrap_or("out").to_string(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, message: String| {
            Err(ConfigError::InvalidValue { key: key.into(), message })
        };
        if !(self.grid.step > 0.0) {
            return bad("grid.step", format!("step {} must be positive", self.grid.step));
        }
        if !(self.grid.start < self.grid.stop) {
            return bad(
                "grid.start",
                format!("start {} must be below stop {}", self.grid.start, self.grid.stop),
            );
        }
        if self.layers == 0 {
            return bad("ansatz.layers", "at least one layer required".into());
        }
        self.vite.validate().map_err(|e| ConfigError::InvalidValue {
            key: "vite".into(),
            message: e.to_string(),
        })?;
        if let Some(noise) = &self.noise {
            for (key, p) in [("noise.p1", noise.p1), ("noise.p2", noise.p2)] {
                if !(0.0..=1.0).contains(&p) {
                    return bad(key, format!("probability {p} outside [0, 1]"));
                }
            }
        }
        if self.clustering.k_min < 2 {
            return bad("clustering.k_min", "must be at least 2".into());
        }
        if self.clustering.k_max < self.clustering.k_min {
            return bad("clustering.k_max", "must be at least k_min".into());
        }
        if self.clustering.restarts == 0 {
            return bad("clustering.restarts", "must be positive".into());
        }
        if !(self.clustering.hopkins_fraction > 0.0 && self.clustering.hopkins_fraction <= 0.5) {
            return bad(
                "clustering.hopkins_fraction",
                format!("{} outside (0, 0.5]", self.clustering.hopkins_fraction),
            );
        }
        if !(self.clustering.iqr_multiplier > 0.0) {
            return bad("clustering.iqr_multiplier", "must be positive".into());
        }
        if self.refine.degree % 2 == 0 {
            return bad("refine.degree", format!("{} must be odd", self.refine.degree));
        }
        for &p2 in &self.noise_study.p2_levels {
            if !(0.0..=1.0).contains(&p2) {
                return bad("noise_study.p2_levels", format!("level {p2} outside [0, 1]"));
            }
        }
        Ok(())
    }

    /// Canonical serialization: every effective key sorted alphabetically,
    /// one `key = value` per line. Identical configs produce identical
    /// text, which is what the manifest hash digests.
    pub fn canonical_text(&self) -> String {
        let mut lines: Vec<String> = Vec::new();
        match &self.hamiltonian {
            HamiltonianSpec::Heisenberg { n, jx, jy, jz, h, field_all_sites } => {
                lines.push(format!("hamiltonian.field_all_sites = {field_all_sites}"));
                lines.push(format!("hamiltonian.h = {h}"));
                lines.push(format!("hamiltonian.jx = {jx}"));
                lines.push(format!("hamiltonian.jy = {jy}"));
                lines.push(format!("hamiltonian.jz = {jz}"));
                lines.push(format!("hamiltonian.kind = heisenberg"));
                lines.push(format!("hamiltonian.n = {n}"));
            }
            HamiltonianSpec::File { path } => {
                lines.push("hamiltonian.kind = file".to_string());
                lines.push(format!("hamiltonian.path = {path}"));
            }
        }
        lines.push(format!("ansatz.family = {}", self.ansatz_family));
        lines.push(format!("ansatz.layers = {}", self.layers));
        lines.push(format!("grid.start = {}", self.grid.start));
        lines.push(format!("grid.step = {}", self.grid.step));
        lines.push(format!("grid.stop = {}", self.grid.stop));
        lines.push(format!("vite.dt = {}", self.vite.dt));
        lines.push(format!("vite.lambda_reg = {}", self.vite.lambda_reg));
        let record_at: Vec<String> =
            self.vite.record_at.iter().map(|s| s.to_string()).collect();
        lines.push(format!("vite.record_at = {}", record_at.join(",")));
        lines.push(format!("vite.steps = {}", self.vite.steps));
        if let Some(noise) = &self.noise {
            lines.push(format!("noise.p1 = {}", noise.p1));
            lines.push(format!("noise.p2 = {}", noise.p2));
        }
        lines.push(format!("clustering.hopkins_fraction = {}", self.clustering.hopkins_fraction));
        lines.push(format!("clustering.hopkins_repeats = {}", self.clustering.hopkins_repeats));
        lines.push(format!("clustering.iqr_multiplier = {}", self.clustering.iqr_multiplier));
        lines.push(format!("clustering.k_max = {}", self.clustering.k_max));
        lines.push(format!("clustering.k_min = {}", self.clustering.k_min));
        lines.push(format!("clustering.restarts = {}", self.clustering.restarts));
        lines.push(format!("refine.degree = {}", self.refine.degree));
        lines.push(format!("refine.max_iters = {}", self.refine.max_iters));
        lines.push(format!("refine.method = {}", self.refine.method.tag()));
        lines.push(format!("refine.tol = {}", self.refine.tol));
        lines.push(format!("noise_study.include_baseline = {}", self.noise_study.include_baseline));
        lines.push(format!("noise_study.p1 = {}", self.noise_study.p1));
        let levels: Vec<String> =
            self.noise_study.p2_levels.iter().map(|p| p.to_string()).collect();
        lines.push(format!("noise_study.p2_levels = {}", levels.join(",")));
        lines.push(format!("output_dir = {}", self.output_dir));
        lines.push(format!("seed = {}", self.base_seed));
        lines.sort();
        let mut out = String::new();
        for line in lines {
            let _ = writeln!(out, "{line}");
        }
        out
    }

    /// SHA-256 of the canonical text, hex-encoded. Stamped into every
    /// output file this config produces.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_text().as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            let _ = write!(hex, "{byte:02x}");
        }
        hex
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
hamiltonian.kind = heisenberg
hamiltonian.n = 4
ansatz.family = c0
grid.start = -2.65
grid.stop = -0.4
grid.step = 0.25
";

    #[test]
    fn minimal_config_fills_defaults() {
        let config = PipelineConfig::parse(MINIMAL).unwrap();
        assert_eq!(
            config.hamiltonian,
            HamiltonianSpec::Heisenberg {
                n: 4,
                jx: 0.5,
                jy: 0.5,
                jz: 0.6,
                h: 1.0,
                field_all_sites: false
            }
        );
        assert_eq!(config.ansatz_family, AnsatzFamily::C0);
        assert_eq!(config.layers, 1);
        assert_eq!(config.vite.steps, 25);
        assert_eq!(config.vite.record_at, vec![5, 10, 15, 20, 25]);
        assert!(config.noise.is_none());
        assert_eq!(config.clustering.restarts, 50);
        assert_eq!(config.refine.method, RefineMethod::ExactInverse);
        assert_eq!(config.noise_study.p2_levels, vec![0.005, 0.010, 0.030]);
        assert!(config.noise_study.include_baseline);
        assert_eq!(config.base_seed, 1);
        assert_eq!(config.output_dir, "out");
    }

    #[test]
    fn grid_points_inclusive_of_stop() {
        let config = PipelineConfig::parse(MINIMAL).unwrap();
        let points = config.grid.points();
        assert_eq!(points.len(), 10);
        assert!((points[0] + 2.65).abs() < 1e-12);
        assert!((points[9] + 0.4).abs() < 1e-9);
    }

    #[test]
    fn overrides_and_comments_parsed() {
        let text = format!(
            "{MINIMAL}\n# comment line\nvite.dt = 0.15\nnoise.p1 = 0.001\nnoise.p2 = 0.01\nseed = 42\nclustering.k_min = 4\nrefine.method = poly_inverse\nvite.record_at = 5, 10, 25\n"
        );
        let config = PipelineConfig::parse(&text).unwrap();
        assert_eq!(config.vite.dt, 0.15);
        assert_eq!(config.noise, Some(NoiseSpec { p1: 0.001, p2: 0.01 }));
        assert_eq!(config.base_seed, 42);
        assert_eq!(config.clustering.k_min, 4);
        assert_eq!(config.refine.method, RefineMethod::PolyInverse);
        assert_eq!(config.vite.record_at, vec![5, 10, 25]);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let unknown = format!("{MINIMAL}grid.sep = 1\n");
        assert!(matches!(
            PipelineConfig::parse(&unknown),
            Err(ConfigError::UnknownKey(_))
        ));
        let duplicate = format!("{MINIMAL}seed = 1\nseed = 2\n");
        assert!(matches!(
            PipelineConfig::parse(&duplicate),
            Err(ConfigError::Parse { .. })
        ));
        let junk = format!("{MINIMAL}not a pair\n");
        assert!(matches!(
            PipelineConfig::parse(&junk),
            Err(ConfigError::Parse { .. })
        ));
    }

    #[test]
    fn rejects_missing_required_keys() {
        assert!(matches!(
            PipelineConfig::parse("ansatz.family = c0\n"),
            Err(ConfigError::MissingKey(_))
        ));
        let no_n = "hamiltonian.kind = heisenberg\nansatz.family = c0\ngrid.start = 0\ngrid.stop = 1\ngrid.step = 0.5\n";
        assert!(matches!(
            PipelineConfig::parse(no_n),
            Err(ConfigError::MissingKey(_))
        ));
    }

    #[test]
    fn validation_catches_bad_values() {
        let bad_step = MINIMAL.replace("grid.step = 0.25", "grid.step = -1");
        assert!(PipelineConfig::parse(&bad_step).is_err());
        let bad_order = MINIMAL.replace("grid.stop = -0.4", "grid.stop = -3.0");
        assert!(PipelineConfig::parse(&bad_order).is_err());
        let bad_family = MINIMAL.replace("ansatz.family = c0", "ansatz.family = c9");
        assert!(PipelineConfig::parse(&bad_family).is_err());
        let bad_degree = format!("{MINIMAL}refine.degree = 20\n");
        assert!(PipelineConfig::parse(&bad_degree).is_err());
        let bad_fraction = format!("{MINIMAL}clustering.hopkins_fraction = 0.9\n");
        assert!(PipelineConfig::parse(&bad_fraction).is_err());
    }

    #[test]
    fn canonical_text_round_trips_and_hashes_stably() {
        let config = PipelineConfig::parse(MINIMAL).unwrap();
        let canonical = config.canonical_text();
        let reparsed = PipelineConfig::parse(&canonical).unwrap();
        assert_eq!(config, reparsed);
        assert_eq!(config.hash(), reparsed.hash());
        assert_eq!(config.hash().len(), 64);

        // Key order and comments must not affect the hash.
        let shuffled = format!(
            "# leading comment\ngrid.step = 0.25\ngrid.stop = -0.4\ngrid.start = -2.65\nansatz.family = c0\nhamiltonian.n = 4\nhamiltonian.kind = heisenberg\n"
        );
        assert_eq!(PipelineConfig::parse(&shuffled).unwrap().hash(), config.hash());

        // Any value change must change the hash.
        let other = PipelineConfig::parse(&format!("{MINIMAL}seed = 2\n")).unwrap();
        assert_ne!(other.hash(), config.hash());
    }

    #[test]
    fn file_sourced_hamiltonian_spec() {
        let text = "hamiltonian.kind = file\nhamiltonian.path = ham.txt\nansatz.family = c0_hat\ngrid.start = 0\ngrid.stop = 1\ngrid.step = 0.5\n";
        let config = PipelineConfig::parse(text).unwrap();
        assert_eq!(config.hamiltonian, HamiltonianSpec::File { path: "ham.txt".into() });
        assert_eq!(config.ansatz_family, AnsatzFamily::C0Hat);
    }
}
