//! Experiment configuration: parsing, defaults and validation.
//!
//! A config is either `key = value` lines (`#` starts a comment) or a single
//! JSON object. Lists are comma separated in the line format and arrays in
//! JSON. Keys are case sensitive.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use oscillab_core::hermite::DEFAULT_DEGREE_CAP;
use oscillab_core::lab::Ensemble;
use oscillab_core::nls::Scheme;
use oscillab_core::PWord;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` appears more than once")]
    Duplicate(String),
    #[error("key `{key}` does not apply to experiment `{experiment}`")]
    NotApplicable { key: String, experiment: Experiment },
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("key `{key}`: {message}")]
    Invalid { key: String, message: String },
}

fn bad(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.to_string(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    IdentityK1,
    Orthogonality,
    Bilinear,
    BilinearDerivative,
    Bernstein,
    EnergyIncrement,
    NormGrowth,
    Conservation,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::IdentityK1,
        Experiment::Orthogonality,
        Experiment::Bilinear,
        Experiment::BilinearDerivative,
        Experiment::Bernstein,
        Experiment::EnergyIncrement,
        Experiment::NormGrowth,
        Experiment::Conservation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::IdentityK1 => "identity_k1",
            Experiment::Orthogonality => "orthogonality",
            Experiment::Bilinear => "bilinear",
            Experiment::BilinearDerivative => "bilinear_derivative",
            Experiment::Bernstein => "bernstein",
            Experiment::EnergyIncrement => "energy_increment",
            Experiment::NormGrowth => "norm_growth",
            Experiment::Conservation => "conservation",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Experiment::IdentityK1 => "first-order quadrilinear identity on eigenspace quadruples",
            Experiment::Orthogonality => "decay of |L0| as one eigenvalue dominates",
            Experiment::Bilinear => "space-time norm of products of localized linear flows",
            Experiment::BilinearDerivative => "bilinear norm with operator words on each factor",
            Experiment::Bernstein => "operator-word norms on dyadic blocks",
            Experiment::EnergyIncrement => "modified-energy increment over the local window",
            Experiment::NormGrowth => "running maximum of a Sobolev norm over a long run",
            Experiment::Conservation => "mass, energy and modified energy along a trajectory",
        }
    }

    /// CSV header of the experiment's results table.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Experiment::IdentityK1 => {
                &["mu1_sq", "mu2_sq", "mu3_sq", "mu4_sq", "resonant", "l0", "rhs", "residual"]
            }
            Experiment::Orthogonality => &["mu1_sq", "lambda1", "max_abs_l0"],
            Experiment::Bilinear | Experiment::BilinearDerivative => {
                &["N", "M", "ratio", "raw", "normalizer"]
            }
            Experiment::Bernstein => &["word", "order", "N", "ratio"],
            Experiment::EnergyIncrement => &["N", "delta", "initial_energy", "increment"],
            Experiment::NormGrowth => &["t", "hs_norm", "running_max"],
            Experiment::Conservation => &["t", "mass", "energy", "modified_energy", "hs_norm_s"],
        }
    }

    /// Keys the experiment reads, with their default (`None`: required).
    fn keys(self) -> &'static [(&'static str, Option<&'static str>)] {
        const PI: &str = "3.141592653589793";
        match self {
            Experiment::IdentityK1 => &[("d", None), ("K", None), ("trials", Some("64"))],
            Experiment::Orthogonality => {
                &[("d", None), ("K", None), ("c0", Some("4")), ("trials", Some("1"))]
            }
            Experiment::Bilinear => &[
                ("d", None),
                ("N_list", None),
                ("M_list", None),
                ("T", Some(PI)),
                ("trials", Some("32")),
                ("data", Some("beam")),
                ("transverse_cap", Some("0")),
            ],
            Experiment::BilinearDerivative => &[
                ("d", None),
                ("N_list", None),
                ("M_list", None),
                ("T", Some(PI)),
                ("trials", Some("32")),
                ("data", Some("beam")),
                ("transverse_cap", Some("0")),
                ("word_a", None),
                ("word_b", Some("")),
            ],
            Experiment::Bernstein => {
                &[("d", None), ("N_list", None), ("words", Some("order<=2")), ("trials", Some("16"))]
            }
            Experiment::EnergyIncrement => &[
                ("d", None),
                ("K", None),
                ("s", None),
                ("N_list", None),
                ("dt", None),
                ("data", Some("power_law")),
                ("decay", Some("3")),
                ("amplitude", Some("1")),
                ("coupling", Some("1")),
            ],
            Experiment::NormGrowth => &[
                ("d", None),
                ("K", None),
                ("s", None),
                ("dt", None),
                ("T", None),
                ("record_every", Some("100")),
                ("data", Some("mixed")),
                ("decay", Some("3")),
                ("amplitude", Some("0.5")),
                ("coupling", Some("1")),
            ],
            Experiment::Conservation => &[
                ("d", None),
                ("K", None),
                ("dt", None),
                ("T", None),
                ("s", Some("2")),
                ("N_list", Some("8")),
                ("record_every", Some("10")),
                ("scheme", Some("strang")),
                ("data", Some("mixed")),
                ("decay", Some("3")),
                ("amplitude", Some("1")),
                ("coupling", Some("1")),
            ],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
            bad("experiment", format!("`{s}` is not one of {}", names.join(", ")))
        })
    }
}

/// Keys accepted by every experiment.
const COMMON_KEYS: [&str; 3] = ["experiment", "seed", "output_dir"];

const ALL_KEYS: [&str; 22] = [
    "experiment",
    "seed",
    "output_dir",
    "d",
    "K",
    "s",
    "N_list",
    "M_list",
    "dt",
    "T",
    "trials",
    "word_a",
    "word_b",
    "words",
    "data",
    "decay",
    "amplitude",
    "record_every",
    "coupling",
    "transverse_cap",
    "c0",
    "scheme",
];

/// Initial data for the dynamics experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    /// Fixed four-mode state scaled by `amplitude`.
    Mixed,
    /// Random coefficients decaying like `λ^{−decay}` with `L²` norm
    /// `amplitude`, drawn from the run's seed.
    PowerLaw,
}

/// Fully resolved configuration. Fields not read by the experiment keep
/// neutral values and are left out of the manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub d: usize,
    pub k: usize,
    pub s: f64,
    pub n_list: Vec<u64>,
    pub m_list: Vec<u64>,
    pub dt: f64,
    pub t: f64,
    pub trials: usize,
    pub word_a: PWord,
    pub word_b: PWord,
    pub words: Vec<PWord>,
    pub ensemble: Ensemble,
    pub initial_data: InitialData,
    pub decay: f64,
    pub amplitude: f64,
    pub record_every: usize,
    pub coupling: f64,
    pub c0: f64,
    pub scheme: Scheme,
    /// Every key the experiment reads with its resolved value.
    pub resolved: BTreeMap<String, Value>,
}

/// Raw text of the config and the format it was read in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceFormat {
    KeyValue,
    Json,
}

fn parse_key_value(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            message: format!("expected `key = value`, found `{line}`"),
        })?;
        let k = k.trim();
        if k.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1, message: "empty key".into() });
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn json_scalar(key: &str, v: &Value) -> Result<String, ConfigError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        _ => Err(bad(key, "expected a string, number or boolean")),
    }
}

fn parse_json(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Json(e.to_string()))?;
    let obj = value.as_object().ok_or_else(|| ConfigError::Json("top level must be an object".into()))?;
    let mut out = Vec::new();
    for (k, v) in obj {
        let text = match v {
            Value::Array(items) => items
                .iter()
                .map(|x| json_scalar(k, x))
                .collect::<Result<Vec<_>, _>>()?
                .join(if k == "words" { ";" } else { "," }),
            other => json_scalar(k, other)?,
        };
        out.push((k.clone(), text));
    }
    Ok(out)
}

/// Detects the format: text whose first non-blank character is `{` is JSON.
pub fn source_format(text: &str) -> SourceFormat {
    if text.trim_start().starts_with('{') {
        SourceFormat::Json
    } else {
        SourceFormat::KeyValue
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| bad(key, format!("`{v}` is not a valid {}", std::any::type_name::<T>())))
}

fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = parse_num(key, v)?;
    if !x.is_finite() {
        return Err(bad(key, "must be finite"));
    }
    Ok(x)
}

fn parse_list(key: &str, v: &str) -> Result<Vec<u64>, ConfigError> {
    let inner = v.trim();
    let inner = inner.strip_prefix('[').and_then(|x| x.strip_suffix(']')).unwrap_or(inner);
    let items: Vec<u64> = inner
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| parse_num(key, x))
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(bad(key, "list is empty"));
    }
    if items.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad(key, "values must be strictly increasing"));
    }
    Ok(items)
}

fn parse_dyadic_list(key: &str, v: &str) -> Result<Vec<u64>, ConfigError> {
    let items = parse_list(key, v)?;
    if let Some(x) = items.iter().find(|x| !x.is_power_of_two()) {
        return Err(bad(key, format!("{x} is not a power of two")));
    }
    Ok(items)
}

fn parse_word(key: &str, v: &str) -> Result<PWord, ConfigError> {
    v.parse().map_err(|e| bad(key, format!("{e}")))
}

fn parse_words(key: &str, v: &str) -> Result<Vec<PWord>, ConfigError> {
    v.split(';').map(|w| parse_word(key, w.trim())).collect()
}

/// `order<=k` expands to every word of order at most `k` on `d` axes.
fn expand_words(key: &str, v: &str, d: usize) -> Result<Vec<PWord>, ConfigError> {
    if let Some(k) = v.trim().strip_prefix("order<=") {
        let k: usize = parse_num(key, k.trim())?;
        let mut out = Vec::new();
        for order in 0..=k {
            out.extend(PWord::all_of_order(order, d).map_err(|e| bad(key, e.to_string()))?);
        }
        return Ok(out);
    }
    parse_words(key, v)
}

/// Parses a config without overrides.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    parse_config_with(text, None)
}

/// Parses a config; `seed_override` replaces (or supplies) the seed.
pub fn parse_config_with(text: &str, seed_override: Option<u64>) -> Result<ExperimentConfig, ConfigError> {
    let pairs = match source_format(text) {
        SourceFormat::Json => parse_json(text)?,
        SourceFormat::KeyValue => parse_key_value(text)?,
    };
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    for (k, v) in pairs {
        if !ALL_KEYS.contains(&k.as_str()) {
            return Err(ConfigError::UnknownKey(k));
        }
        if map.insert(k.clone(), v).is_some() {
            return Err(ConfigError::Duplicate(k));
        }
    }
    let experiment: Experiment = map
        .get("experiment")
        .ok_or_else(|| ConfigError::Missing("experiment".into()))?
        .parse()?;
    let keys = experiment.keys();
    let known: HashSet<&str> = keys.iter().map(|(k, _)| *k).chain(COMMON_KEYS).collect();
    if let Some(k) = map.keys().find(|k| !known.contains(k.as_str())) {
        return Err(ConfigError::NotApplicable { key: k.clone(), experiment });
    }
    let seed = match seed_override {
        Some(s) => s,
        None => parse_num("seed", map.get("seed").ok_or_else(|| ConfigError::Missing("seed".into()))?)?,
    };
    let mut values: BTreeMap<&str, String> = BTreeMap::new();
    for (k, default) in keys {
        let v = match (map.get(*k), default) {
            (Some(v), _) => v.clone(),
            (None, Some(d)) => d.to_string(),
            (None, None) => return Err(ConfigError::Missing(k.to_string())),
        };
        values.insert(k, v);
    }

    let mut cfg = ExperimentConfig {
        experiment,
        seed,
        output_dir: map.get("output_dir").map(PathBuf::from),
        d: 1,
        k: 1,
        s: 2.0,
        n_list: Vec::new(),
        m_list: Vec::new(),
        dt: 0.01,
        t: 1.0,
        trials: 1,
        word_a: PWord::identity(),
        word_b: PWord::identity(),
        words: Vec::new(),
        ensemble: Ensemble::default(),
        initial_data: InitialData::Mixed,
        decay: 3.0,
        amplitude: 1.0,
        record_every: 1,
        coupling: 1.0,
        c0: 4.0,
        scheme: Scheme::Strang,
        resolved: BTreeMap::new(),
    };
    let mut resolved = BTreeMap::new();
    resolved.insert("experiment".to_string(), json!(experiment.name()));
    resolved.insert("seed".to_string(), json!(seed));

    // `d` first: word parsing depends on it.
    if let Some(v) = values.get("d") {
        let d: usize = parse_num("d", v)?;
        if !(1..=3).contains(&d) {
            return Err(bad("d", format!("{d} is outside 1..=3")));
        }
        cfg.d = d;
        resolved.insert("d".into(), json!(d));
    }
    let mut transverse_cap = 0usize;
    let mut data_name = String::new();
    for (&k, v) in &values {
        match k {
            "d" => {}
            "K" => {
                let x: usize = parse_num(k, v)?;
                if x < 1 {
                    return Err(bad(k, "must be at least 1"));
                }
                if x + 8 > DEFAULT_DEGREE_CAP {
                    return Err(bad(k, format!("must be at most {}", DEFAULT_DEGREE_CAP - 8)));
                }
                cfg.k = x;
                resolved.insert(k.into(), json!(x));
            }
            "s" => {
                cfg.s = parse_f64(k, v)?;
                resolved.insert(k.into(), json!(cfg.s));
            }
            "N_list" => {
                cfg.n_list = match experiment {
                    Experiment::Bilinear | Experiment::BilinearDerivative | Experiment::Bernstein => {
                        parse_dyadic_list(k, v)?
                    }
                    _ => parse_list(k, v)?,
                };
                if cfg.n_list[0] == 0 {
                    return Err(bad(k, "values must be positive"));
                }
                resolved.insert(k.into(), json!(cfg.n_list));
            }
            "M_list" => {
                cfg.m_list = parse_dyadic_list(k, v)?;
                resolved.insert(k.into(), json!(cfg.m_list));
            }
            "dt" => {
                cfg.dt = parse_f64(k, v)?;
                if cfg.dt <= 0.0 {
                    return Err(bad(k, "must be positive"));
                }
                resolved.insert(k.into(), json!(cfg.dt));
            }
            "T" => {
                cfg.t = parse_f64(k, v)?;
                if cfg.t <= 0.0 {
                    return Err(bad(k, "must be positive"));
                }
                resolved.insert(k.into(), json!(cfg.t));
            }
            "trials" => {
                cfg.trials = parse_num(k, v)?;
                if cfg.trials == 0 {
                    return Err(bad(k, "must be at least 1"));
                }
                resolved.insert(k.into(), json!(cfg.trials));
            }
            "word_a" | "word_b" => {
                let w = parse_word(k, v)?;
                w.check_axes(cfg.d).map_err(|e| bad(k, e.to_string()))?;
                resolved.insert(k.into(), json!(w.to_string()));
                if k == "word_a" {
                    cfg.word_a = w;
                } else {
                    cfg.word_b = w;
                }
            }
            "words" => {
                cfg.words = expand_words(k, v, cfg.d)?;
                for w in &cfg.words {
                    w.check_axes(cfg.d).map_err(|e| bad(k, e.to_string()))?;
                }
                resolved.insert(k.into(), json!(cfg.words.iter().map(|w| w.to_string()).collect::<Vec<_>>()));
            }
            "data" => {
                data_name = v.clone();
                resolved.insert(k.into(), json!(v));
            }
            "decay" => {
                cfg.decay = parse_f64(k, v)?;
                resolved.insert(k.into(), json!(cfg.decay));
            }
            "amplitude" => {
                cfg.amplitude = parse_f64(k, v)?;
                if cfg.amplitude < 0.0 {
                    return Err(bad(k, "must be nonnegative"));
                }
                resolved.insert(k.into(), json!(cfg.amplitude));
            }
            "record_every" => {
                cfg.record_every = parse_num(k, v)?;
                if cfg.record_every == 0 {
                    return Err(bad(k, "must be at least 1"));
                }
                resolved.insert(k.into(), json!(cfg.record_every));
            }
            "coupling" => {
                cfg.coupling = parse_f64(k, v)?;
                resolved.insert(k.into(), json!(cfg.coupling));
            }
            "transverse_cap" => {
                transverse_cap = parse_num(k, v)?;
                resolved.insert(k.into(), json!(transverse_cap));
            }
            "c0" => {
                cfg.c0 = parse_f64(k, v)?;
                if cfg.c0 <= 0.0 {
                    return Err(bad(k, "must be positive"));
                }
                resolved.insert(k.into(), json!(cfg.c0));
            }
            "scheme" => {
                cfg.scheme = match v.as_str() {
                    "strang" => Scheme::Strang,
                    "lie" => Scheme::Lie,
                    other => return Err(bad(k, format!("`{other}` is not `strang` or `lie`"))),
                };
                resolved.insert(k.into(), json!(v));
            }
            other => unreachable!("key table lists `{other}`"),
        }
    }
    match experiment {
        Experiment::Bilinear | Experiment::BilinearDerivative => {
            cfg.ensemble = match data_name.as_str() {
                "beam" => Ensemble::Beam { transverse_cap },
                "isotropic" => Ensemble::Isotropic,
                other => return Err(bad("data", format!("`{other}` is not `beam` or `isotropic`"))),
            };
            if cfg.t > std::f64::consts::PI {
                return Err(bad("T", "must not exceed one revival period (pi)"));
            }
        }
        Experiment::EnergyIncrement | Experiment::NormGrowth | Experiment::Conservation => {
            cfg.initial_data = match data_name.as_str() {
                "mixed" => InitialData::Mixed,
                "power_law" => InitialData::PowerLaw,
                other => return Err(bad("data", format!("`{other}` is not `mixed` or `power_law`"))),
            };
            if matches!(experiment, Experiment::NormGrowth | Experiment::Conservation) && cfg.t < cfg.dt {
                return Err(bad("T", "must be at least dt"));
            }
        }
        _ => {}
    }
    if matches!(experiment, Experiment::EnergyIncrement | Experiment::Conservation) && cfg.s <= 1.0 {
        return Err(bad("s", "must exceed 1"));
    }
    if experiment == Experiment::Conservation && cfg.n_list.len() != 1 {
        return Err(bad("N_list", "conservation takes a single cutoff N"));
    }
    if let Some(dir) = &cfg.output_dir {
        resolved.insert("output_dir".into(), json!(dir.display().to_string()));
    }
    cfg.resolved = resolved;
    Ok(cfg)
}
