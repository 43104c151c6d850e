//! Experiment execution and output files.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use oscillab_core::hermite::GridKind;
use oscillab_core::lab::{
    almost_orthogonality_scan, derivative_bilinear_ratio, energy_increment_scan, exhaustive_identity_scan_1d,
    last_step_change, mixed_modes, norm_growth_experiment, random_identity_checks, BilinearConfig, ScalingFit,
    TIME_NODES,
};
use oscillab_core::nls::{evolve, SolverConfig};
use oscillab_core::random::{power_law_field, trial_rng};
use oscillab_core::spectral::bernstein_ratio;
use oscillab_core::{HermiteBasis, IOperatorSpec, MultiIndex, SpectralField};
use serde_json::{json, Map, Value};

use crate::config::{source_format, Experiment, ExperimentConfig, InitialData, SourceFormat};

/// Shortest decimal string that reads back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Rows and diagnostics produced by one experiment.
struct Outcome {
    rows: Vec<Vec<String>>,
    derived: Map<String, Value>,
    tainted: bool,
    max_spillage: Option<f64>,
}

impl Outcome {
    fn clean(rows: Vec<Vec<String>>, derived: Map<String, Value>) -> Self {
        Outcome { rows, derived, tainted: false, max_spillage: None }
    }
}

/// What a finished run wrote.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub output_dir: PathBuf,
    pub tainted: bool,
    pub rows: usize,
    pub manifest: Value,
}

impl RunReport {
    /// 0 for a clean run, 2 when some step exceeded the spill tolerance.
    pub fn exit_code(&self) -> i32 {
        if self.tainted {
            2
        } else {
            0
        }
    }
}

fn fit_json(fit: &ScalingFit) -> Value {
    json!({ "slope": fit.slope, "intercept": fit.intercept, "residual": fit.residual })
}

fn grid_json(basis: &HermiteBasis) -> Value {
    json!({
        "transform_nodes_per_axis": basis.grid(GridKind::Transform).len(),
        "product_nodes_per_axis": basis.grid(GridKind::Product).len(),
        "tabulated_degree": basis.k_eval(),
    })
}

fn initial_data(cfg: &ExperimentConfig, basis: &HermiteBasis) -> Result<SpectralField> {
    let shape = basis.shape();
    Ok(match cfg.initial_data {
        InitialData::Mixed => mixed_modes(&shape, cfg.amplitude)?,
        InitialData::PowerLaw => power_law_field(&shape, cfg.decay, cfg.amplitude, &mut trial_rng(cfg.seed, 0)),
    })
}

fn solver(cfg: &ExperimentConfig) -> SolverConfig {
    SolverConfig {
        dt: cfg.dt,
        t_final: cfg.t,
        scheme: cfg.scheme,
        record_every: cfg.record_every,
        coupling: cfg.coupling,
        ..SolverConfig::default()
    }
}

fn identity_k1(cfg: &ExperimentConfig) -> Result<Outcome> {
    let d = cfg.d as u64;
    let mut derived = Map::new();
    let rows_in: Vec<([u64; 4], Option<_>)> = if cfg.d == 1 {
        let scan = exhaustive_identity_scan_1d(cfg.k)?;
        derived.insert("mode".into(), json!("exhaustive"));
        scan.rows.into_iter().map(|(m, c)| (m.map(|x| 2 * x as u64 + 1), c)).collect()
    } else {
        derived.insert("mode".into(), json!("random"));
        random_identity_checks(cfg.d, 2 * cfg.k as u64 + d, cfg.trials, cfg.seed)?
    };
    let mut checked = 0usize;
    let mut resonant = 0usize;
    let mut worst: Option<([u64; 4], f64)> = None;
    let mut rows = Vec::with_capacity(rows_in.len());
    for (mu, check) in rows_in {
        let mut row: Vec<String> = mu.iter().map(u64::to_string).collect();
        match check {
            None => {
                resonant += 1;
                row.extend(["true".into(), String::new(), String::new(), String::new()]);
            }
            Some(c) => {
                checked += 1;
                if worst.map_or(true, |w| c.residual > w.1) {
                    worst = Some((mu, c.residual));
                }
                row.extend(["false".into(), num(c.l0), num(c.rhs), num(c.residual)]);
            }
        }
        rows.push(row);
    }
    derived.insert("checked".into(), json!(checked));
    derived.insert("resonant".into(), json!(resonant));
    if let Some((mu, r)) = worst {
        derived.insert("max_residual".into(), json!(r));
        derived.insert("worst_mu_sq".into(), json!(mu));
    }
    Ok(Outcome::clean(rows, derived))
}

fn orthogonality(cfg: &ExperimentConfig) -> Result<Outcome> {
    let basis = HermiteBasis::new(cfg.d, cfg.k)?;
    let shape = basis.shape();
    let ground = SpectralField::mode(&shape, &MultiIndex::new(vec![0; cfg.d])?, 1.0.into())?;
    let d = cfg.d as u64;
    let threshold = cfg.c0 * (3 * d) as f64;
    let mu1: Vec<u64> = (0..=cfg.k as u64).map(|j| 2 * j + d).filter(|&m| m as f64 >= threshold).collect();
    let scan =
        almost_orthogonality_scan(&basis, &mu1, [&ground; 3], [d; 3], cfg.c0, cfg.trials, cfg.seed)?;
    let rows = scan
        .rows
        .iter()
        .map(|&(mu, l0)| vec![mu.to_string(), num((mu as f64).sqrt()), num(l0)])
        .collect();
    let mut derived = Map::new();
    derived.insert("fixed_mu_sq".into(), json!(vec![d; 3]));
    derived.insert("fit_skipped".into(), json!(scan.skipped));
    if let Some(fit) = &scan.fit {
        derived.insert("fit".into(), fit_json(fit));
    }
    derived.insert("quadrature".into(), grid_json(&basis));
    Ok(Outcome::clean(rows, derived))
}

fn bilinear(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut cells = Vec::new();
    for &m in &cfg.m_list {
        for &n in cfg.n_list.iter().filter(|&&n| n >= m) {
            let bc = BilinearConfig {
                d: cfg.d,
                n,
                m,
                t_final: cfg.t,
                trials: cfg.trials,
                seed: cfg.seed,
                ensemble: cfg.ensemble,
            };
            cells.push((n, m, derivative_bilinear_ratio(&cfg.word_a, &cfg.word_b, &bc)?));
        }
    }
    if cells.is_empty() {
        anyhow::bail!("key `M_list`: no cell has M <= N");
    }
    let rows = cells
        .iter()
        .map(|(n, m, r)| vec![n.to_string(), m.to_string(), num(r.ratio), num(r.raw), num(r.normalizer)])
        .collect();
    let mut per_m = Vec::new();
    for &m in &cfg.m_list {
        let sel: Vec<_> = cells.iter().filter(|c| c.1 == m).collect();
        if sel.is_empty() {
            continue;
        }
        let ratios: Vec<f64> = sel.iter().map(|c| c.2.ratio).collect();
        let mut entry = Map::new();
        entry.insert("M".into(), json!(m));
        entry.insert("max_ratio".into(), json!(ratios.iter().cloned().fold(0.0, f64::max)));
        entry.insert("last_step_change".into(), json!(last_step_change(&ratios)));
        if sel.len() >= 2 {
            let xs: Vec<f64> = sel.iter().map(|c| c.0 as f64).collect();
            let ys: Vec<f64> = sel.iter().map(|c| c.2.raw).collect();
            entry.insert("raw_fit".into(), fit_json(&ScalingFit::fit(&xs, &ys)?));
        }
        per_m.push(Value::Object(entry));
    }
    let mut derived = Map::new();
    derived.insert("by_M".into(), Value::Array(per_m));
    derived.insert("time_nodes".into(), json!(TIME_NODES));
    Ok(Outcome::clean(rows, derived))
}

fn bernstein(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut per_word = Vec::new();
    for w in &cfg.words {
        let ratios = cfg
            .n_list
            .iter()
            .map(|&n| bernstein_ratio(w, n, cfg.d, cfg.trials, cfg.seed))
            .collect::<oscillab_core::Result<Vec<f64>>>()?;
        for (&n, &r) in cfg.n_list.iter().zip(&ratios) {
            rows.push(vec![w.to_string(), w.order().to_string(), n.to_string(), num(r)]);
        }
        per_word.push(json!({
            "word": w.to_string(),
            "max_ratio": ratios.iter().cloned().fold(0.0, f64::max),
            "last_step_change": last_step_change(&ratios),
        }));
    }
    let mut derived = Map::new();
    derived.insert("by_word".into(), Value::Array(per_word));
    Ok(Outcome::clean(rows, derived))
}

fn energy_increment(cfg: &ExperimentConfig) -> Result<Outcome> {
    let basis = HermiteBasis::new(cfg.d, cfg.k)?;
    let u0 = initial_data(cfg, &basis)?;
    let ns: Vec<f64> = cfg.n_list.iter().map(|&n| n as f64).collect();
    let scan = energy_increment_scan(&basis, &u0, cfg.s, &ns, &solver(cfg))?;
    let rows = scan
        .rows
        .iter()
        .map(|r| vec![num(r.n), num(r.delta), num(r.initial_energy), num(r.increment)])
        .collect();
    let mut derived = Map::new();
    derived.insert("delta".into(), json!(scan.rows.iter().map(|r| r.delta).collect::<Vec<_>>()));
    derived.insert("strictly_decreasing".into(), json!(scan.strictly_decreasing));
    derived.insert("alpha".into(), json!(scan.alpha()));
    if let Some(fit) = &scan.fit {
        derived.insert("fit".into(), fit_json(fit));
    }
    derived.insert("quadrature".into(), grid_json(&basis));
    Ok(Outcome { rows, derived, tainted: scan.tainted, max_spillage: Some(scan.max_spillage) })
}

fn norm_growth(cfg: &ExperimentConfig) -> Result<Outcome> {
    let basis = HermiteBasis::new(cfg.d, cfg.k)?;
    let u0 = initial_data(cfg, &basis)?;
    let run = norm_growth_experiment(&basis, &u0, cfg.s, &solver(cfg))?;
    let rows = run.samples.iter().map(|&(t, v, m)| vec![num(t), num(v), num(m)]).collect();
    let mut derived = Map::new();
    derived.insert("exponent".into(), json!(run.exponent()));
    derived.insert("fit".into(), fit_json(&run.fit));
    derived.insert("bound".into(), json!(run.bound));
    derived.insert("consistent".into(), json!(run.consistent));
    derived.insert("steps".into(), json!(solver(cfg).steps()));
    derived.insert("quadrature".into(), grid_json(&basis));
    Ok(Outcome { rows, derived, tainted: run.tainted, max_spillage: Some(run.max_spillage) })
}

fn conservation(cfg: &ExperimentConfig) -> Result<Outcome> {
    let basis = HermiteBasis::new(cfg.d, cfg.k)?;
    let u0 = initial_data(cfg, &basis)?;
    let spec = IOperatorSpec::new(cfg.n_list[0] as f64, cfg.s)?;
    let sc = SolverConfig { hs_exponents: vec![cfg.s], ..solver(cfg) };
    let ev = evolve(&basis, &u0, &sc, &spec)?;
    let rows = ev
        .reports
        .iter()
        .map(|r| vec![num(r.t), num(r.mass), num(r.energy), num(r.modified_energy), num(r.hs_norms[0].1)])
        .collect();
    let first = &ev.reports[0];
    let rel = |a: f64, b: f64| if b == 0.0 { (a - b).abs() } else { ((a - b) / b).abs() };
    let mass_drift = ev.reports.iter().map(|r| rel(r.mass, first.mass)).fold(0.0, f64::max);
    let energy_drift = ev.reports.iter().map(|r| rel(r.energy, first.energy)).fold(0.0, f64::max);
    let mod_drift = ev
        .reports
        .iter()
        .map(|r| (r.modified_energy - first.modified_energy).abs())
        .fold(0.0, f64::max);
    let mut derived = Map::new();
    derived.insert("max_relative_mass_drift".into(), json!(mass_drift));
    derived.insert("max_relative_energy_drift".into(), json!(energy_drift));
    derived.insert("max_modified_energy_change".into(), json!(mod_drift));
    derived.insert("steps".into(), json!(sc.steps()));
    derived.insert("quadrature".into(), grid_json(&basis));
    Ok(Outcome { rows, derived, tainted: ev.tainted, max_spillage: Some(ev.max_spillage) })
}

fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.experiment {
        Experiment::IdentityK1 => identity_k1(cfg),
        Experiment::Orthogonality => orthogonality(cfg),
        Experiment::Bilinear | Experiment::BilinearDerivative => bilinear(cfg),
        Experiment::Bernstein => bernstein(cfg),
        Experiment::EnergyIncrement => energy_increment(cfg),
        Experiment::NormGrowth => norm_growth(cfg),
        Experiment::Conservation => conservation(cfg),
    }
}

/// Writes the results table as LF-terminated CSV.
pub fn write_csv(path: &Path, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(columns)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the experiment and writes `results.csv` and `manifest.json` into
/// `output_dir`. `source` is the config text exactly as read.
pub fn run(cfg: &ExperimentConfig, source: &str, output_dir: &Path) -> Result<RunReport> {
    fs::create_dir_all(output_dir).with_context(|| format!("cannot create {}", output_dir.display()))?;
    let start = Instant::now();
    let out = execute(cfg)?;
    let wall = start.elapsed().as_secs_f64();
    let columns = cfg.experiment.columns();
    write_csv(&output_dir.join("results.csv"), columns, &out.rows)?;

    let mut taint = Map::new();
    taint.insert("tainted".into(), json!(out.tainted));
    if let Some(s) = out.max_spillage {
        taint.insert("max_spillage".into(), json!(s));
        taint.insert("spill_tolerance".into(), json!(SolverConfig::default().spill_tolerance));
    }
    let manifest = json!({
        "config": {
            "format": match source_format(source) {
                SourceFormat::Json => "json",
                SourceFormat::KeyValue => "key_value",
            },
            "text": source,
        },
        "columns": columns,
        "derived": Value::Object(out.derived),
        "experiment": cfg.experiment.name(),
        "parameters": Value::Object(cfg.resolved.clone().into_iter().collect()),
        "rows": out.rows.len(),
        "software": { "name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION") },
        "taint": Value::Object(taint),
        "threads": rayon::current_num_threads(),
        "wall_time_seconds": wall,
    });
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    let path = output_dir.join("manifest.json");
    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(RunReport { output_dir: output_dir.to_path_buf(), tainted: out.tainted, rows: out.rows.len(), manifest })
}
