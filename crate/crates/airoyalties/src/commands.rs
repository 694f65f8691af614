//! The CLI subcommands as plain functions returning their stdout.

use std::fmt::Write;
use std::path::Path;

use airoyalties_core::histogram::{histogram, HistogramError};
use airoyalties_core::metric::{clip_metric, MetricError};
use airoyalties_core::rulings::{
    calibrate, class_stats, classify, evaluate, metric_for_pair, uncontested_pairs, CasePair,
    MetricSource, RulingLabel, RulingsError, Thresholds, Verdict,
};
use airoyalties_core::schemes::{run_scenario, SchemeError};
use airoyalties_core::EmbeddingStore;
use thiserror::Error;

use crate::cases::{load_cases, CasesError};
use crate::config::{load_scenarios, ConfigError};
use crate::embedstore::{load_store, write_store, LoadError};
use crate::report::{reports_csv, reports_table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Store(#[from] LoadError),
    #[error(transparent)]
    Cases(#[from] CasesError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Rulings(#[from] RulingsError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Histogram(#[from] HistogramError),
    #[error("{0}")]
    Scheme(SchemeError),
    #[error("--source computed needs --store")]
    NeedsStore,
    #[error("writing {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl From<SchemeError> for CliError {
    fn from(e: SchemeError) -> Self {
        match e {
            SchemeError::Invariant(_) => CliError::Internal(e.to_string()),
            other => CliError::Scheme(other),
        }
    }
}

impl CliError {
    /// 1 for bad input, 2 for a broken internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Table,
}

fn fmt3(x: f64) -> String {
    // keep "-0.000" out of golden files
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

pub fn ingest(store_path: &Path, out: Option<&Path>) -> Result<String, CliError> {
    let store = load_store(store_path)?;
    if let Some(out) = out {
        let write_err = |source| CliError::Write {
            path: out.display().to_string(),
            source,
        };
        let file = std::fs::File::create(out).map_err(write_err)?;
        let mut w = std::io::BufWriter::new(file);
        write_store(&store, &mut w).map_err(write_err)?;
        std::io::Write::flush(&mut w).map_err(write_err)?;
    }
    let mut s = String::from("key,value\n");
    let _ = writeln!(s, "records,{}", store.len());
    let _ = writeln!(s, "model_id,{}", store.model_id().unwrap_or(""));
    let _ = writeln!(
        s,
        "dim,{}",
        store.dim().map_or(String::new(), |d| d.to_string())
    );
    Ok(s)
}

fn maybe_store(path: Option<&Path>) -> Result<Option<EmbeddingStore>, CliError> {
    path.map(load_store).transpose().map_err(Into::into)
}

/// Contested pairs with their metric from `source`, followed by every
/// uncontested cross-pair computed from the store when one is given.
pub fn labelled_values(
    cases: &[CasePair],
    store: Option<&EmbeddingStore>,
    source: MetricSource,
) -> Result<(Vec<CasePair>, Vec<f64>), CliError> {
    let empty = EmbeddingStore::new();
    if source == MetricSource::Computed && store.is_none() {
        return Err(CliError::NeedsStore);
    }
    let lookup = store.unwrap_or(&empty);
    let mut pairs = cases.to_vec();
    let mut values = cases
        .iter()
        .map(|p| metric_for_pair(p, lookup, source))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(store) = store {
        for pair in uncontested_pairs(store, cases) {
            values.push(metric_for_pair(&pair, store, MetricSource::Computed)?);
            pairs.push(pair);
        }
    }
    Ok((pairs, values))
}

fn load_labelled(
    cases_path: &Path,
    store_path: Option<&Path>,
    source: MetricSource,
) -> Result<(Vec<CasePair>, Vec<f64>), CliError> {
    let cases = load_cases(cases_path)?;
    let store = maybe_store(store_path)?;
    labelled_values(&cases, store.as_ref(), source)
}

pub fn stats(
    cases_path: &Path,
    store_path: Option<&Path>,
    source: MetricSource,
) -> Result<String, CliError> {
    let (pairs, values) = load_labelled(cases_path, store_path, source)?;
    let mut s = String::from("label,count,mean,std_dev\n");
    for c in class_stats(&pairs, &values)? {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            c.label,
            c.count,
            fmt3(c.mean),
            c.std_dev.map(fmt3).unwrap_or_default()
        );
    }
    Ok(s)
}

pub fn classify_pair(
    store_path: &Path,
    id_a: &str,
    id_b: &str,
    thresholds: &Thresholds,
) -> Result<String, CliError> {
    let store = load_store(store_path)?;
    let a = store.get(id_a).map_err(MetricError::from)?;
    let b = store.get(id_b).map_err(MetricError::from)?;
    let m = clip_metric(a, b)?;
    let verdict = classify(m.value(), thresholds)?;
    Ok(format!("{} {}\n", fmt3(m.value()), verdict))
}

pub fn calibrate_cmd(
    cases_path: &Path,
    store_path: Option<&Path>,
    source: MetricSource,
) -> Result<String, CliError> {
    let (pairs, values) = load_labelled(cases_path, store_path, source)?;
    let c = calibrate(&pairs, &values)?;
    let mut s = String::from("parameter,value\n");
    let _ = writeln!(s, "fair_use_mean,{}", fmt3(c.fair_use_mean));
    let _ = writeln!(s, "not_fair_use_mean,{}", fmt3(c.not_fair_use_mean));
    let _ = writeln!(
        s,
        "uncontested_mean,{}",
        c.uncontested_mean.map(fmt3).unwrap_or_default()
    );
    let _ = writeln!(s, "safe_max,{:.2}", c.thresholds.safe_max());
    let _ = writeln!(s, "fair_use_max,{:.2}", c.thresholds.fair_use_max());
    Ok(s)
}

pub fn evaluate_cmd(
    cases_path: &Path,
    store_path: Option<&Path>,
    source: MetricSource,
    thresholds: &Thresholds,
) -> Result<String, CliError> {
    let (pairs, values) = load_labelled(cases_path, store_path, source)?;
    let e = evaluate(&pairs, &values, thresholds)?;
    let mut s = String::from("label");
    for v in Verdict::ALL {
        let _ = write!(s, ",{v}");
    }
    s.push('\n');
    for label in RulingLabel::ALL {
        if !e.counts.contains_key(&label) {
            continue;
        }
        let _ = write!(s, "{label}");
        for v in Verdict::ALL {
            let _ = write!(s, ",{}", e.count(label, v));
        }
        s.push('\n');
    }
    let _ = writeln!(
        s,
        "accuracy,{}/{},{}",
        e.correct,
        e.contested,
        e.accuracy().map(fmt3).unwrap_or_default()
    );
    Ok(s)
}

pub fn histogram_cmd(
    cases_path: &Path,
    store_path: Option<&Path>,
    source: MetricSource,
    bin_width: f64,
) -> Result<String, CliError> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(HistogramError::InvalidWidth(bin_width).into());
    }
    let (pairs, values) = load_labelled(cases_path, store_path, source)?;
    let labelled: Vec<(RulingLabel, f64)> = pairs.iter().map(|p| p.label).zip(values).collect();
    let bins = histogram(&labelled, bin_width)?;
    let mut s = String::from("bin_start,bin_end");
    for l in RulingLabel::ALL {
        let _ = write!(s, ",{l}");
    }
    s.push('\n');
    for b in bins {
        let _ = write!(s, "{},{}", fmt3(b.start), fmt3(b.end));
        for c in b.counts {
            let _ = write!(s, ",{c}");
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn simulate(config_path: &Path, format: OutputFormat) -> Result<String, CliError> {
    let scenarios = load_scenarios(config_path)?;
    let runs = scenarios
        .into_iter()
        .map(|cfg| {
            let report = run_scenario(&cfg)?;
            Ok((cfg, report))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(match format {
        OutputFormat::Csv => reports_csv(&runs),
        OutputFormat::Table => reports_table(&runs),
    })
}
