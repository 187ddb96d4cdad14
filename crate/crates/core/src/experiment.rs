//! Simulation harness: random traces, dropped-count injection, and
//! detection statistics.
//!
//! Output files:
//!
//! * `curves.csv`: `property,rho,eta,length,traces,violating,detected,detection_pct,events_kept_pct,false_positives`,
//!   one row per trace length.
//! * `results.csv`: `property,rho,eta,length,violating,detected,detection_pct,events_kept_pct,false_positives`,
//!   one row per length bucket (`5-10`, `10-15`, `15-20`, `all`).
//! * `traces.csv` when `trace_log` is set.
//!
//! `detection_pct` is `nan` when no trace violated.

use std::fs;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automata::{Dfa, SymbolId};
use crate::injector::{inject_with, rng_for, subseed, RngDraws};
use crate::lossmodel::LossModel;
use crate::runtime::{Monitor, Verdict};
use crate::specio::load_property;
use crate::synthesis::{synthesize, MonitorMode, SynthesisOptions};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `builtin:NAME` or a path to a property spec.
    pub properties: Vec<String>,
    pub rho_values: Vec<f64>,
    pub eta_values: Vec<f64>,
    pub min_length: usize,
    pub max_length: usize,
    pub traces_per_length: usize,
    pub bound_n: u32,
    pub seed: u64,
    pub mode: MonitorMode,
    pub trace_log: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            properties: vec!["builtin:safeiter".into(), "builtin:hasnext".into(), "builtin:file".into()],
            rho_values: vec![0.1, 0.3],
            eta_values: vec![3.0, 6.0],
            min_length: 3,
            max_length: 25,
            traces_per_length: 1000,
            bound_n: 5,
            seed: 0,
            mode: MonitorMode::Complete,
            trace_log: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::Config(format!("at `{}`: {}", e.path(), e.inner())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.properties.is_empty() {
            return Err(Error::Config("no properties".into()));
        }
        if self.traces_per_length == 0 {
            return Err(Error::Config("traces_per_length must be at least 1".into()));
        }
        if self.min_length == 0 || self.min_length > self.max_length {
            return Err(Error::Config("lengths must satisfy 1 <= min_length <= max_length".into()));
        }
        if self.rho_values.is_empty() || self.eta_values.is_empty() {
            return Err(Error::Config("rho_values and eta_values must be non-empty".into()));
        }
        for &rho in &self.rho_values {
            if !(0.0..=1.0).contains(&rho) {
                return Err(Error::Config(format!("rho {rho} outside [0, 1]")));
            }
        }
        for &eta in &self.eta_values {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(Error::Config(format!("eta {eta} must be positive")));
            }
        }
        if self.bound_n == 0 {
            return Err(Error::Config("bound_n must be at least 1".into()));
        }
        Ok(())
    }
}

/// A random trace: the first event from `creation` and the rest from the
/// other events when `creation` is non-empty, otherwise uniform over Σ.
pub fn generate_trace<R: Rng + ?Sized>(
    sigma_len: usize,
    creation: &[SymbolId],
    length: usize,
    rng: &mut R,
) -> Result<Vec<SymbolId>> {
    if length == 0 {
        return Err(Error::Config("trace length must be at least 1".into()));
    }
    if creation.is_empty() {
        return Ok((0..length).map(|_| rng.gen_range(0..sigma_len)).collect());
    }
    let rest: Vec<SymbolId> = (0..sigma_len).filter(|a| !creation.contains(a)).collect();
    if rest.is_empty() {
        return Err(Error::Config("every event is a creation event".into()));
    }
    let mut trace = Vec::with_capacity(length);
    trace.push(creation[rng.gen_range(0..creation.len())]);
    trace.extend((1..length).map(|_| rest[rng.gen_range(0..rest.len())]));
    Ok(trace)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub property: String,
    pub rho: f64,
    pub eta: f64,
    pub length: usize,
    pub traces: usize,
    pub violating: usize,
    pub detected: usize,
    pub detection_pct: String,
    pub events_kept_pct: String,
    pub false_positives: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub property: String,
    pub rho: f64,
    pub eta: f64,
    /// Bucket name.
    pub length: String,
    pub violating: usize,
    pub detected: usize,
    pub detection_pct: String,
    pub events_kept_pct: String,
    pub false_positives: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub property: String,
    pub rho: f64,
    pub eta: f64,
    pub length: usize,
    pub index: usize,
    pub violating: bool,
    pub detected: bool,
    pub kept: usize,
    pub skipped: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CellStats {
    pub traces: usize,
    pub violating: usize,
    pub detected: usize,
    pub false_positives: usize,
    pub kept_events: usize,
    pub total_events: usize,
}

impl CellStats {
    fn add(&mut self, o: &CellStats) {
        self.traces += o.traces;
        self.violating += o.violating;
        self.detected += o.detected;
        self.false_positives += o.false_positives;
        self.kept_events += o.kept_events;
        self.total_events += o.total_events;
    }

    /// Detected violations as a percentage of violating traces.
    pub fn detection_pct(&self) -> Option<f64> {
        (self.violating > 0).then(|| 100.0 * self.detected as f64 / self.violating as f64)
    }

    pub fn events_kept_pct(&self) -> f64 {
        if self.total_events == 0 {
            100.0
        } else {
            100.0 * self.kept_events as f64 / self.total_events as f64
        }
    }
}

fn pct(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), |v| format!("{v:.2}"))
}

/// Length buckets of the summary table, inclusive.
pub const BUCKETS: [(&str, usize, usize); 3] = [("5-10", 5, 10), ("10-15", 11, 15), ("15-20", 16, 20)];

#[derive(Clone, Debug, Default)]
pub struct ExperimentResults {
    pub curves: Vec<CurveRow>,
    pub results: Vec<ResultRow>,
    pub traces: Vec<TraceRecord>,
    pub warnings: Vec<String>,
    /// Per-length statistics, parallel to `curves`.
    pub cells: Vec<CellStats>,
}

struct PreparedProperty {
    name: String,
    dfa: Dfa,
    creation: Vec<SymbolId>,
    primary: Monitor,
    alternate: Monitor,
}

fn prepare(source: &str, cfg: &ExperimentConfig) -> Result<(PreparedProperty, Option<String>)> {
    let loaded = load_property(source)?;
    let dfa = loaded.dfa()?.clone();
    let model = LossModel::dropped_count(dfa.alphabet(), cfg.bound_n)?;
    let monitor = synthesize(&dfa, &model, cfg.mode, SynthesisOptions::default())?;
    let warning = loaded.trivial.then(|| format!("property `{}` is trivial", loaded.name));
    Ok((
        PreparedProperty {
            name: loaded.name.clone(),
            creation: loaded.creation.clone(),
            primary: Monitor::from_property(&dfa),
            alternate: Monitor::from_alternate(&monitor),
            dfa,
        },
        warning,
    ))
}

/// Seed of trace `index` of length `length` for property number `p`.
pub fn trace_seed(seed: u64, p: usize, length: usize, index: usize) -> u64 {
    subseed(subseed(subseed(seed, p as u64), length as u64), index as u64)
}

fn run_cell(
    prop: &PreparedProperty,
    p: usize,
    rho: f64,
    eta: f64,
    combo: usize,
    length: usize,
    cfg: &ExperimentConfig,
) -> Result<(CellStats, Vec<TraceRecord>)> {
    let k = prop.dfa.alphabet().len();
    let mut stats = CellStats::default();
    let mut log = Vec::new();
    for index in 0..cfg.traces_per_length {
        let seed = trace_seed(cfg.seed, p, length, index);
        let trace = generate_trace(k, &prop.creation, length, &mut rng_for(seed))?;
        let prefix = usize::from(!prop.creation.is_empty());
        let mut draws = RngDraws(rng_for(subseed(seed, 1 + combo as u64)));
        let injected = inject_with(&trace, prefix, rho, eta, cfg.bound_n, &mut draws);
        let violating = prop.primary.run(&trace)?.verdict == Verdict::False;
        let detected = prop.alternate.run(&injected.to_gamma(k))?.verdict == Verdict::False;
        stats.traces += 1;
        stats.violating += violating as usize;
        stats.detected += (violating && detected) as usize;
        stats.false_positives += (!violating && detected) as usize;
        stats.kept_events += injected.stats.creation + injected.stats.kept;
        stats.total_events += length;
        if cfg.trace_log {
            log.push(TraceRecord {
                property: prop.name.clone(),
                rho,
                eta,
                length,
                index,
                violating,
                detected,
                kept: injected.stats.creation + injected.stats.kept,
                skipped: injected.stats.skipped,
            });
        }
    }
    Ok((stats, log))
}

/// Runs the full matrix. On failure, returns what was computed for the
/// properties before the failing one together with the error.
pub fn run_experiment_partial(cfg: &ExperimentConfig) -> (ExperimentResults, Option<Error>) {
    let mut out = ExperimentResults::default();
    if let Err(e) = cfg.validate() {
        return (out, Some(e));
    }
    let combos: Vec<(f64, f64)> =
        cfg.rho_values.iter().flat_map(|&r| cfg.eta_values.iter().map(move |&e| (r, e))).collect();
    let lengths: Vec<usize> = (cfg.min_length..=cfg.max_length).collect();
    for (p, source) in cfg.properties.iter().enumerate() {
        let prop = match prepare(source, cfg) {
            Ok((prop, warning)) => {
                out.warnings.extend(warning);
                prop
            }
            Err(e) => return (out, Some(e)),
        };
        let jobs: Vec<(usize, usize)> =
            (0..combos.len()).flat_map(|c| lengths.iter().map(move |&l| (c, l))).collect();
        let cells: Result<Vec<_>> = jobs
            .par_iter()
            .map(|&(c, l)| run_cell(&prop, p, combos[c].0, combos[c].1, c, l, cfg))
            .collect();
        let cells = match cells {
            Ok(c) => c,
            Err(e) => return (out, Some(e)),
        };
        for (c, &(rho, eta)) in combos.iter().enumerate() {
            let mine: Vec<(usize, &CellStats)> = jobs
                .iter()
                .zip(&cells)
                .filter(|((jc, _), _)| *jc == c)
                .map(|((_, l), (s, _))| (*l, s))
                .collect();
            for &(length, s) in &mine {
                out.curves.push(CurveRow {
                    property: prop.name.clone(),
                    rho,
                    eta,
                    length,
                    traces: s.traces,
                    violating: s.violating,
                    detected: s.detected,
                    detection_pct: pct(s.detection_pct()),
                    events_kept_pct: format!("{:.2}", s.events_kept_pct()),
                    false_positives: s.false_positives,
                });
                out.cells.push(*s);
            }
            let buckets = BUCKETS.iter().copied().chain([("all", cfg.min_length, cfg.max_length)]);
            for (name, lo, hi) in buckets {
                let mut agg = CellStats::default();
                for &(length, s) in &mine {
                    if (lo..=hi).contains(&length) {
                        agg.add(s);
                    }
                }
                if agg.traces == 0 {
                    continue;
                }
                out.results.push(ResultRow {
                    property: prop.name.clone(),
                    rho,
                    eta,
                    length: name.to_string(),
                    violating: agg.violating,
                    detected: agg.detected,
                    detection_pct: pct(agg.detection_pct()),
                    events_kept_pct: format!("{:.2}", agg.events_kept_pct()),
                    false_positives: agg.false_positives,
                });
            }
        }
        out.traces.extend(cells.into_iter().flat_map(|(_, log)| log));
    }
    (out, None)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResults> {
    match run_experiment_partial(cfg) {
        (out, None) => Ok(out),
        (_, Some(e)) => Err(e),
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the CSV files and `status.txt` (`ok`, or `failed: <error>`).
pub fn write_outputs(results: &ExperimentResults, failure: Option<&Error>, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    write_csv(&out_dir.join("results.csv"), &results.results)?;
    write_csv(&out_dir.join("curves.csv"), &results.curves)?;
    if !results.traces.is_empty() {
        write_csv(&out_dir.join("traces.csv"), &results.traces)?;
    }
    let status = match failure {
        None => "ok\n".to_string(),
        Some(e) => format!("failed: {e}\n"),
    };
    fs::write(out_dir.join("status.txt"), status)?;
    Ok(())
}

/// Runs the experiment and writes its outputs, flushing partial results on
/// failure.
pub fn run_and_write(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentResults> {
    let (results, failure) = run_experiment_partial(cfg);
    write_outputs(&results, failure.as_ref(), out_dir)?;
    match failure {
        None => Ok(results),
        Some(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            properties: vec!["builtin:safeiter".into()],
            traces_per_length: 50,
            min_length: 3,
            max_length: 12,
            seed: 5,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn trace_shape() {
        let mut rng = rng_for(1);
        let t = generate_trace(3, &[0], 5, &mut rng).unwrap();
        assert_eq!(t[0], 0);
        assert!(t[1..].iter().all(|&a| a != 0));
        assert!(generate_trace(1, &[0], 3, &mut rng).is_err());
        let t = generate_trace(3, &[], 100, &mut rng).unwrap();
        assert!(t.contains(&0));
    }

    #[test]
    fn deterministic_and_free_of_false_positives() {
        let a = run_experiment(&small()).unwrap();
        let b = run_experiment(&small()).unwrap();
        assert_eq!(a.curves, b.curves);
        assert!(a.curves.iter().all(|r| r.false_positives == 0));
        assert_eq!(a.curves.len(), 4 * 10);
        assert_eq!(a.results.iter().filter(|r| r.length == "all").count(), 4);
    }

    #[test]
    fn rho_zero_detects_everything() {
        let cfg = ExperimentConfig { rho_values: vec![0.0], eta_values: vec![3.0], ..small() };
        let r = run_experiment(&cfg).unwrap();
        for row in &r.curves {
            assert_eq!(row.detected, row.violating);
            assert_eq!(row.events_kept_pct, "100.00");
        }
    }

    #[test]
    fn config_defaults_and_errors() {
        let cfg = ExperimentConfig::from_json(r#"{"traces_per_length": 10}"#).unwrap();
        assert_eq!(cfg.rho_values, vec![0.1, 0.3]);
        assert!(ExperimentConfig::from_json(r#"{"traces_per_length": 0}"#).is_err());
        let err = ExperimentConfig::from_json(r#"{"rho": 1}"#).unwrap_err().to_string();
        assert!(err.contains("unknown field"), "{err}");
    }

    #[test]
    fn failure_keeps_partial_results() {
        let cfg = ExperimentConfig {
            properties: vec!["builtin:safeiter".into(), "builtin:nope".into()],
            ..small()
        };
        let dir = tempfile::tempdir().unwrap();
        assert!(run_and_write(&cfg, dir.path()).is_err());
        let status = std::fs::read_to_string(dir.path().join("status.txt")).unwrap();
        assert!(status.starts_with("failed:"));
        let curves = std::fs::read_to_string(dir.path().join("curves.csv")).unwrap();
        assert!(curves.lines().count() > 1);
    }
}
