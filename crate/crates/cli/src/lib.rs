//! Experiment configuration, dispatch and report emission for the `mixscope` binary.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use mixscope::cycle::{
    alternating_decomposition, analyze_cycle, chain_gap, chebyshev_time, check_red_dominance_with_sets,
    color_separation_series, compute_k, decomposition_start, exists_alternating_partition, is_alternating_partition,
    max_gap, midpoints, pair_midpoints, AlternatingSet, Coloring,
};
use mixscope::dist::{evolve, push_forward, separation_distance, total_variation, Distribution};
use mixscope::rational::{self, Rational};
use mixscope::shuffle::{
    inverse_riffle_kernel, random_to_top_kernel, stationary_statistic_distribution, walk1_kernel, Deck,
    StatisticKind,
};
use mixscope::sst::{
    check_strong_stationarity, counterexample, sample_strong_stationarity, ChainFamily, CheckOptions,
    PredicateKind, SampleOptions,
};
use mixscope::{Exec, DEFAULT_BUDGET};
use serde::Serialize;
use serde_json::{json, Value};

/// Environment variable overriding the enumeration budget.
pub const BUDGET_VAR: &str = "MIXSCOPE_BUDGET";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Capacity(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Capacity(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Capacity(_) => "capacity",
            CliError::Internal(_) => "internal",
        }
    }

    /// The error as a one-line JSON object.
    pub fn to_json(&self) -> String {
        json!({ "error": { "kind": self.kind(), "message": self.to_string() } }).to_string()
    }
}

impl From<mixscope::Error> for CliError {
    fn from(e: mixscope::Error) -> Self {
        use mixscope::Error as E;
        match e {
            e if e.is_capacity() => CliError::Capacity(e.to_string()),
            e @ (E::InvalidParameter(_)
            | E::Parse(_)
            | E::UnbalancedColoring { .. }
            | E::PredicateNeverSatisfied
            | E::ProbabilityOutOfRange(_)) => CliError::Usage(e.to_string()),
            e => CliError::Internal(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?}; expected json or csv")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum RunMode {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum Experiment {
    StatMix {
        chain: ChainFamily,
        n: usize,
        t: usize,
        statistic: StatisticKind,
    },
    SstCheck {
        chain: ChainFamily,
        n: usize,
        t: usize,
        statistic: StatisticKind,
        predicate: PredicateKind,
        #[serde(skip_serializing_if = "Option::is_none")]
        start: Option<Deck>,
        /// Statistic values (in display form) to restrict the conditional law to.
        #[serde(skip_serializing_if = "Option::is_none")]
        restrict: Option<Vec<String>>,
    },
    Cycle {
        coloring: Coloring,
        x0: usize,
        horizon: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        sets: Option<Vec<Vec<usize>>>,
        chebyshev: Vec<f64>,
        dominance: bool,
    },
    Decompose {
        coloring: Coloring,
        minimality: bool,
    },
    Counterexample {
        n: usize,
        t: usize,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub experiment: Experiment,
    #[serde(flatten)]
    pub mode: RunMode,
    pub format: Format,
    pub budget: u64,
    pub float: bool,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            mode: RunMode::Exact,
            format: Format::Json,
            budget: DEFAULT_BUDGET,
            float: false,
            out: None,
            timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let RunMode::MonteCarlo { samples, .. } = self.mode {
            if !matches!(self.experiment, Experiment::SstCheck { .. }) {
                return Err(CliError::Usage("Monte-Carlo mode is only available for sst-check".into()));
            }
            if samples == 0 {
                return Err(CliError::Usage("--samples must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Reads the budget override, falling back to the default.
pub fn budget_from_env() -> Result<u64> {
    match std::env::var(BUDGET_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{BUDGET_VAR}={v:?} is not a nonnegative integer"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: ExperimentConfig,
    pub results: Value,
    /// Named pass/fail flags for the bounds the experiment checks.
    pub checks: BTreeMap<String, bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<f64>,
}

impl Report {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.values().all(|&b| b)
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Internal(e.to_string()))
}

/// Runs one experiment.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let clock = Instant::now();
    let mut checks = BTreeMap::new();
    let results = match &config.experiment {
        Experiment::StatMix { chain, n, t, statistic } => stat_mix(*chain, *n, *t, statistic)?,
        Experiment::SstCheck { chain, n, t, statistic, predicate, start, restrict } => match config.mode {
            RunMode::Exact => {
                let opts = CheckOptions { start: start.clone(), budget: config.budget, exec: Exec::Parallel };
                let report = check_strong_stationarity(*chain, *n, *t, predicate, statistic, &opts)?;
                checks.insert("certified".into(), report.is_strongly_stationary);
                checks.insert("predicate_stable".into(), report.predicate_stable);
                let mut v = to_value(&report)?;
                if let Some(keep) = restrict {
                    let r = report.restricted(|val| keep.iter().any(|k| *k == val.to_string()))?;
                    checks.insert("restricted_uniform".into(), r.is_uniform);
                    v["restriction"] = to_value(&r)?;
                }
                v
            }
            RunMode::MonteCarlo { samples, seed } => {
                if restrict.is_some() {
                    return Err(CliError::Usage("--restrict needs exact mode".into()));
                }
                let opts = SampleOptions { samples, seed, start: start.clone(), exec: Exec::Parallel };
                let report = sample_strong_stationarity(*chain, *n, *t, predicate, statistic, &opts)?;
                if let Some(ok) = report.consistent_with_target {
                    checks.insert("consistent_with_target".into(), ok);
                }
                to_value(&report)?
            }
        },
        Experiment::Cycle { coloring, x0, horizon, sets, chebyshev, dominance } => {
            cycle(coloring, *x0, *horizon, sets.as_deref(), chebyshev, *dominance, &mut checks)?
        }
        Experiment::Decompose { coloring, minimality } => decompose(coloring, *minimality, &mut checks)?,
        Experiment::Counterexample { n, t } => {
            let r = counterexample(*n, *t)?;
            checks.insert("claim_refuted".into(), r.claim_refuted);
            checks.insert("reflection_bound_holds".into(), r.reflection_bound_holds);
            to_value(&r)?
        }
    };
    Ok(Report {
        tool: "mixscope",
        version: env!("CARGO_PKG_VERSION"),
        config: config.clone(),
        results,
        checks,
        duration_ms: config.timing.then(|| clock.elapsed().as_secs_f64() * 1000.0),
    })
}

fn stat_mix(chain: ChainFamily, n: usize, horizon: usize, statistic: &StatisticKind) -> Result<Value> {
    statistic.validate(n)?;
    let kernel = match chain {
        ChainFamily::RandomToTop => random_to_top_kernel(n, Exec::Parallel),
        ChainFamily::Walk1 => walk1_kernel(n, Exec::Parallel),
        ChainFamily::InverseRiffle => inverse_riffle_kernel(n, Exec::Parallel),
    }?;
    let target = stationary_statistic_distribution(n, statistic, Exec::Parallel)?;
    let mut law = Distribution::point_mass(Deck::identity(n)?.rank(), 0..kernel.len())?;
    let mut rows = Vec::with_capacity(horizon + 1);
    let mut pushed = push_forward(&law, &statistic.on_ranks(n))?;
    for t in 0..=horizon {
        if t > 0 {
            law = evolve(&kernel, &law, 1, Exec::Parallel)?;
            pushed = push_forward(&law, &statistic.on_ranks(n))?;
        }
        rows.push(json!({
            "t": t,
            "separation": rational::format(&separation_distance(&pushed, &target)?),
            "total_variation": rational::format(&total_variation(&pushed, &target)),
        }));
    }
    Ok(json!({ "rows": rows, "final_law": to_value(&pushed)?, "target": to_value(&target)? }))
}

fn explicit_sets(c: &Coloring, sets: &[Vec<usize>]) -> Result<Vec<AlternatingSet>> {
    let sets = sets
        .iter()
        .map(|s| AlternatingSet::from_vertices(c, s.iter().copied()))
        .collect::<mixscope::Result<Vec<_>>>()?;
    if !is_alternating_partition(c, &sets) {
        return Err(CliError::Usage("--sets must partition the cycle into alternating sets".into()));
    }
    Ok(sets)
}

fn cycle(
    c: &Coloring,
    x0: usize,
    horizon: usize,
    sets: Option<&[Vec<usize>]>,
    chebyshev: &[f64],
    dominance: bool,
    checks: &mut BTreeMap<String, bool>,
) -> Result<Value> {
    let sets = match sets {
        Some(s) => explicit_sets(c, s)?,
        None => alternating_decomposition(c),
    };
    let analysis = analyze_cycle(c, x0, horizon, Some(sets.clone()))?;
    checks.insert("separation_le_coverage_tail".into(), analysis.coverage_bound_holds);
    checks.insert("separation_le_paired_tail".into(), analysis.paired_bound_holds);
    let mut v = to_value(&analysis)?;

    if !chebyshev.is_empty() {
        let k = compute_k(c) as u64;
        let mut rows = Vec::new();
        for &cc in chebyshev {
            let time = chebyshev_time(k, cc)?;
            let step = time.ceil() as usize;
            let sep = color_separation_series(c, x0, step)?.pop().unwrap_or_default();
            let bound = Rational::from_float(1.0 / (cc * cc))
                .ok_or_else(|| CliError::Usage(format!("bad Chebyshev constant {cc}")))?;
            let holds = sep <= bound;
            checks.insert(format!("chebyshev_c{cc}"), holds);
            rows.push(json!({
                "c": cc,
                "time": time,
                "step": step,
                "separation": rational::format(&sep),
                "bound": 1.0 / (cc * cc),
                "holds": holds,
            }));
        }
        v["chebyshev"] = Value::Array(rows);
    }
    if dominance {
        let r = check_red_dominance_with_sets(c, x0, &sets, horizon)?;
        checks.insert("dominance_precondition".into(), r.precondition_holds);
        if let Some(ok) = r.dominance_holds {
            checks.insert("red_dominance".into(), ok);
        }
        v["dominance"] = to_value(&r)?;
    }
    Ok(v)
}

fn decompose(c: &Coloring, minimality: bool, checks: &mut BTreeMap<String, bool>) -> Result<Value> {
    let k = compute_k(c);
    let sets = alternating_decomposition(c);
    let size = c.size();
    let summaries: Vec<Value> = sets
        .iter()
        .map(|s| {
            json!({
                "vertices": s.vertices,
                "chain": s.chain,
                "max_gap": max_gap(s, size),
                "chain_gap": chain_gap(s, size),
                "midpoints": midpoints(s, size),
                "pair_midpoints": pair_midpoints(s, size),
            })
        })
        .collect();
    checks.insert("k_sets".into(), sets.len() == k);
    checks.insert("alternating_partition".into(), is_alternating_partition(c, &sets));
    checks.insert("gap_le_2k_minus_1".into(), sets.iter().all(|s| max_gap(s, size) < 2 * k));
    checks.insert("chain_gap_le_2k_minus_1".into(), sets.iter().all(|s| chain_gap(s, size) < 2 * k));
    let mut v = json!({
        "coloring": c,
        "size": size,
        "k": k,
        "start": decomposition_start(c),
        "sets": summaries,
    });
    if minimality {
        if size > 16 {
            return Err(CliError::Capacity(format!(
                "minimality search is limited to cycles of at most 16 vertices, got {size}"
            )));
        }
        let minimal = k == 1 || !exists_alternating_partition(c, k - 1, None);
        checks.insert("minimal".into(), minimal);
        v["minimal"] = json!(minimal);
    }
    Ok(v)
}

fn rational_to_float(v: &mut Value) {
    match v {
        Value::String(s) => {
            if let Some((a, b)) = s.split_once('/') {
                let digits = |x: &str| !x.is_empty() && x.trim_start_matches('-').chars().all(|c| c.is_ascii_digit());
                if digits(a) && digits(b) {
                    if let Ok(r) = rational::parse(s) {
                        if let Some(n) = serde_json::Number::from_f64(rational::to_f64(&r)) {
                            *v = Value::Number(n);
                        }
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(rational_to_float),
        Value::Object(map) => {
            map.values_mut().for_each(rational_to_float);
            if map.contains_key("weights") && map.get("mode") == Some(&json!("exact")) {
                map.insert("mode".into(), json!("float"));
            }
        }
        _ => {}
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn flatten(path: &str, v: &Value, rows: &mut Vec<[String; 3]>) {
    match v {
        Value::Object(map) => {
            if let (Some(Value::Array(support)), Some(Value::Array(weights))) = (map.get("support"), map.get("weights")) {
                for (s, w) in support.iter().zip(weights) {
                    rows.push([path.to_string(), cell(s), cell(w)]);
                }
                return;
            }
            for (k, x) in map {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                flatten(&p, x, rows);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            for (i, x) in items.iter().enumerate() {
                rows.push([path.to_string(), i.to_string(), cell(x)]);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{path}[{i}]"), x, rows);
            }
        }
        other => rows.push([path.to_string(), String::new(), cell(other)]),
    }
}

/// Renders the report; `float` turns `"num/den"` strings into numbers.
///
/// CSV output has columns `section,key,value`; distributions become one
/// row per `(value, weight)` pair.
pub fn render(report: &Report, format: Format, float: bool) -> Result<String> {
    let mut v = to_value(report)?;
    if float {
        rational_to_float(&mut v);
    }
    match format {
        Format::Json => serde_json::to_string_pretty(&v)
            .map(|s| s + "\n")
            .map_err(|e| CliError::Internal(e.to_string())),
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", &v, &mut rows);
            let mut w = csv::Writer::from_writer(Vec::new());
            let fail = |e: csv::Error| CliError::Internal(e.to_string());
            w.write_record(["section", "key", "value"]).map_err(fail)?;
            for r in rows {
                w.write_record(&r).map_err(fail)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
        }
    }
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Internal(format!("writing {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_conversion_only_touches_ratios() {
        let mut v = json!({"a": "1/4", "b": "(2,1)", "c": ["3/2", "x/y"], "d": "RRBB"});
        rational_to_float(&mut v);
        assert_eq!(v, json!({"a": 0.25, "b": "(2,1)", "c": [1.5, "x/y"], "d": "RRBB"}));
        let mut law = json!({"support": [0], "weights": ["1/1"], "mode": "exact"});
        rational_to_float(&mut law);
        assert_eq!(law, json!({"support": [0], "weights": [1.0], "mode": "float"}));
    }

    #[test]
    fn csv_flattens_distributions() {
        let v = json!({"law": {"support": ["a", "b"], "weights": ["1/2", "1/2"], "mode": "exact"}, "k": 2});
        let mut rows = Vec::new();
        flatten("", &v, &mut rows);
        assert_eq!(rows[0], ["k".to_string(), String::new(), "2".to_string()]);
        assert_eq!(rows[1], ["law".to_string(), "a".to_string(), "1/2".to_string()]);
    }

    #[test]
    fn monte_carlo_only_for_sst() {
        let mut cfg = ExperimentConfig::new(Experiment::Counterexample { n: 52, t: 10 });
        cfg.mode = RunMode::MonteCarlo { samples: 10, seed: 1 };
        assert_eq!(run_experiment(&cfg).unwrap_err().exit_code(), 2);
    }
}
