//! Scenario config files (TOML).
//!
//! ```toml
//! [scheme]
//! name = "pay_to_train"          # one scenario, or:
//! # [[scheme.rows]]              # several, each optionally overriding
//! # label = "..."                # fame weights
//! # scheme = "ai_royalties"
//! # fame = { monet = 100.0 }
//!
//! [[holders]]
//! id = "monet"
//! work_count = 2000
//! fame_weight = 1.0
//!
//! [params.pay_to_train]
//! total_revenue_cents = 100_000_000_000
//! ai_revenue_fraction = 0.9
//! d_c = 0.55
//! dataset_size = 1_000_000_000
//! ```
//!
//! Money is always integer cents (`*_cents` keys); fractions are decimals in
//! `[0, 1]`. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use airoyalties_core::money::{Cents, Fraction, FractionError};
use airoyalties_core::schemes::{
    AiRoyaltyParams, Bracket, ClauseRate, InspireParams, OutputRecord, PayToTrainParams,
    Rightsholder, ScenarioConfig, SchemeError, SchemeKind, WindfallParams,
};
use serde::Deserialize;
use thiserror::Error;

use crate::influence_csv::{read_influence, InfluenceCsvError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config file {0} not found")]
    MissingFile(PathBuf),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Malformed(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("{key}: {source}")]
    Fraction {
        key: &'static str,
        source: FractionError,
    },
    #[error("influence file {path}: {source}")]
    Influence {
        path: PathBuf,
        source: InfluenceCsvError,
    },
    #[error("fame override names unknown holder {0}")]
    UnknownHolder(String),
    #[error("[scheme] needs exactly one of `name` or `rows`")]
    SchemeSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    scheme: SchemeSection,
    #[serde(default)]
    holders: Vec<HolderEntry>,
    #[serde(default)]
    params: ParamsSection,
    #[serde(default)]
    outputs: Vec<OutputEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeSection {
    name: Option<String>,
    label: Option<String>,
    rows: Option<Vec<RowEntry>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RowEntry {
    label: String,
    scheme: String,
    #[serde(default)]
    fame: BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HolderEntry {
    id: String,
    work_count: Option<u64>,
    #[serde(default)]
    fame_weight: f64,
    #[serde(default)]
    holdings: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputEntry {
    id: String,
    revenue_cents: i64,
    #[serde(default)]
    condition: String,
    #[serde(default)]
    model_id: String,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsSection {
    windfall: Option<WindfallEntry>,
    pay_to_train: Option<PayToTrainEntry>,
    pay_to_train_and_inspire: Option<InspireEntry>,
    ai_royalties: Option<RoyaltiesEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WindfallEntry {
    gdp_cents: i64,
    ai_profit_fraction: f64,
    clause_rate: Option<f64>,
    brackets: Option<Vec<BracketEntry>>,
    workforce: u64,
    displacement_rate: f64,
    displaced: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BracketEntry {
    from: f64,
    rate: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PayToTrainEntry {
    total_revenue_cents: i64,
    ai_revenue_fraction: f64,
    d_c: f64,
    dataset_size: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InspireEntry {
    payout_pool_cents: i64,
    influence: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoyaltiesEntry {
    ai_revenue_cents: i64,
    #[serde(default = "half")]
    training_pool_fraction: f64,
    #[serde(default = "half")]
    dedicated_pool_fraction: f64,
    d_c: f64,
    dataset_size: u64,
    dedicated_budget_cents: Option<i64>,
}

fn half() -> f64 {
    0.5
}

fn fraction(key: &'static str, value: f64) -> Result<Fraction, ConfigError> {
    Fraction::from_f64(value).map_err(|source| ConfigError::Fraction { key, source })
}

/// Reads every scenario in a config file. Relative paths inside it resolve
/// against the file's directory.
pub fn load_scenarios(path: &Path) -> Result<Vec<ScenarioConfig>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => ConfigError::MissingFile(path.to_path_buf()),
        _ => ConfigError::Io {
            path: path.to_path_buf(),
            source: e,
        },
    })?;
    parse_scenarios(&text, path.parent().unwrap_or(Path::new(".")))
}

pub fn parse_scenarios(text: &str, base_dir: &Path) -> Result<Vec<ScenarioConfig>, ConfigError> {
    let file: ConfigFile =
        toml::from_str(text).map_err(|e| ConfigError::Malformed(e.to_string()))?;

    let holders = file
        .holders
        .iter()
        .map(|h| {
            let mut holder = if h.holdings.is_empty() {
                Rightsholder::new(h.id.clone(), h.work_count.unwrap_or(0), h.fame_weight)
            } else {
                Rightsholder::with_holdings(h.id.clone(), h.holdings.clone(), h.fame_weight)
            };
            if let Some(n) = h.work_count {
                holder.work_count = n;
            }
            holder.validate()?;
            Ok(holder)
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;

    let windfall = file.params.windfall.map(windfall_params).transpose()?;
    let pay_to_train = file
        .params
        .pay_to_train
        .map(pay_to_train_params)
        .transpose()?;
    let ai_royalties = file.params.ai_royalties.map(royalty_params).transpose()?;
    let inspire = file
        .params
        .pay_to_train_and_inspire
        .map(|p| inspire_params(p, &file.outputs, base_dir))
        .transpose()?;

    let base = ScenarioConfig {
        label: String::new(),
        scheme: SchemeKind::Windfall,
        holders,
        windfall,
        pay_to_train,
        inspire,
        ai_royalties,
    };

    match (file.scheme.name, file.scheme.rows) {
        (Some(name), None) => {
            let scheme: SchemeKind = name.parse()?;
            Ok(vec![ScenarioConfig {
                label: file.scheme.label.unwrap_or_else(|| scheme.to_string()),
                scheme,
                ..base
            }])
        }
        (None, Some(rows)) => rows
            .into_iter()
            .map(|row| {
                let mut cfg = ScenarioConfig {
                    label: row.label,
                    scheme: row.scheme.parse()?,
                    ..base.clone()
                };
                for (id, weight) in row.fame {
                    let holder = cfg
                        .holders
                        .iter_mut()
                        .find(|h| h.holder_id == id)
                        .ok_or_else(|| ConfigError::UnknownHolder(id.clone()))?;
                    holder.fame_weight = weight;
                    holder.validate()?;
                }
                Ok(cfg)
            })
            .collect(),
        _ => Err(ConfigError::SchemeSection),
    }
}

fn windfall_params(w: WindfallEntry) -> Result<WindfallParams, ConfigError> {
    let clause = match (w.clause_rate, w.brackets) {
        (Some(rate), None) => ClauseRate::Flat(fraction("clause_rate", rate)?),
        (None, Some(brackets)) => ClauseRate::Schedule(
            brackets
                .into_iter()
                .map(|b| {
                    Ok(Bracket {
                        from: fraction("brackets.from", b.from)?,
                        rate: fraction("brackets.rate", b.rate)?,
                    })
                })
                .collect::<Result<_, ConfigError>>()?,
        ),
        _ => {
            return Err(ConfigError::Malformed(
                "windfall needs exactly one of clause_rate or brackets".into(),
            ))
        }
    };
    let params = WindfallParams {
        gdp: Cents(w.gdp_cents),
        ai_profit_fraction: fraction("ai_profit_fraction", w.ai_profit_fraction)?,
        clause,
        workforce: w.workforce,
        displacement_rate: fraction("displacement_rate", w.displacement_rate)?,
        displaced: w.displaced,
    };
    params.validate()?;
    Ok(params)
}

fn pay_to_train_params(p: PayToTrainEntry) -> Result<PayToTrainParams, ConfigError> {
    let params = PayToTrainParams {
        total_revenue: Cents(p.total_revenue_cents),
        ai_revenue_fraction: fraction("ai_revenue_fraction", p.ai_revenue_fraction)?,
        d_c: fraction("d_c", p.d_c)?,
        dataset_size: p.dataset_size,
    };
    params.validate()?;
    Ok(params)
}

fn royalty_params(p: RoyaltiesEntry) -> Result<AiRoyaltyParams, ConfigError> {
    let params = AiRoyaltyParams {
        ai_revenue: Cents(p.ai_revenue_cents),
        training_pool_fraction: fraction("training_pool_fraction", p.training_pool_fraction)?,
        dedicated_pool_fraction: fraction("dedicated_pool_fraction", p.dedicated_pool_fraction)?,
        d_c: fraction("d_c", p.d_c)?,
        dataset_size: p.dataset_size,
        dedicated_budget: p.dedicated_budget_cents.map(Cents),
    };
    params.validate()?;
    Ok(params)
}

fn inspire_params(
    p: InspireEntry,
    outputs: &[OutputEntry],
    base_dir: &Path,
) -> Result<InspireParams, ConfigError> {
    let path = base_dir.join(&p.influence);
    let file = File::open(&path).map_err(|e| ConfigError::Influence {
        path: path.clone(),
        source: InfluenceCsvError::Csv(e.into()),
    })?;
    let influence = read_influence(file).map_err(|source| ConfigError::Influence {
        path: path.clone(),
        source,
    })?;
    let outputs = outputs
        .iter()
        .map(|o| OutputRecord {
            output_id: o.id.clone(),
            condition_tag: o.condition.clone(),
            revenue: Cents(o.revenue_cents),
            model_id: o.model_id.clone(),
        })
        .collect();
    Ok(InspireParams {
        outputs,
        influence,
        payout_pool: Cents(p.payout_pool_cents),
    })
}
