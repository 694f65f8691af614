//! Compensation frameworks for rightsholders whose work trains, or is
//! imitated by, a generative model.
//!
//! - **Windfall**: AI firms donate a share of profits, split evenly across
//!   displaced workers. Nobody is paid for their data specifically.
//! - **Pay-to-train**: a fraction `d_c` of AI revenue goes to dataset
//!   contributors pro rata to the number of images they contributed.
//! - **Pay-to-train-and-inspire**: a payout pool is split by
//!   `sum_y r(y) * sum_{x in X_A} f(x; y, c)`, i.e. revenue-weighted
//!   influence of each holder's items on each output.
//! - **AI royalties**: a training component (pay-to-train over a share of the
//!   contributor pool) plus a fame component drawn from a budget for
//!   dedicated, licensed models, split by fame weight.
//!
//! Amounts are integer [`Cents`]; fractions are exact billionths, so pro-rata
//! payouts round exactly once.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::influence::InfluenceMatrix;
use crate::money::{div_round, Cents, Fraction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemeError {
    #[error("unknown scheme {0:?}")]
    UnknownScheme(String),
    #[error("scheme {0} selected but its parameters are missing")]
    MissingParams(SchemeKind),
    #[error("invalid parameter: {0}")]
    InvalidParam(&'static str),
    #[error("no displaced workers to pay")]
    ZeroDisplaced,
    #[error("holder {holder} has {work_count} works but the dataset only has {dataset_size}")]
    HoldingsExceedDataset {
        holder: String,
        work_count: u64,
        dataset_size: u64,
    },
    #[error("output {0} has no influence row")]
    InfluenceOutputMismatch(String),
    #[error("holder {holder} owns {item}, which is not a training item")]
    UnknownTrainingItem { holder: String, item: String },
    #[error("no holder has any revenue-weighted influence")]
    ZeroTotalRaw,
    #[error("fame weights sum to zero but the dedicated budget is positive")]
    ZeroFameTotal,
    #[error("holder {holder}: {reason}")]
    InvalidHolder {
        holder: String,
        reason: &'static str,
    },
    #[error("arithmetic overflow")]
    Overflow,
    #[error("report invariant violated: {0}")]
    Invariant(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Windfall,
    PayToTrain,
    PayToTrainAndInspire,
    AiRoyalties,
}

impl SchemeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::Windfall => "windfall",
            SchemeKind::PayToTrain => "pay_to_train",
            SchemeKind::PayToTrainAndInspire => "pay_to_train_and_inspire",
            SchemeKind::AiRoyalties => "ai_royalties",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeKind {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "windfall" => SchemeKind::Windfall,
            "pay_to_train" | "compensate_to_train" => SchemeKind::PayToTrain,
            "pay_to_train_and_inspire" => SchemeKind::PayToTrainAndInspire,
            "ai_royalties" => SchemeKind::AiRoyalties,
            other => return Err(SchemeError::UnknownScheme(other.into())),
        })
    }
}

// ---------------------------------------------------------------------------
// Windfall

/// One step of a windfall schedule: at profits of at least `from` (as a
/// fraction of GDP), `rate` of profits is donated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub from: Fraction,
    pub rate: Fraction,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClauseRate {
    Flat(Fraction),
    /// The rate of the highest bracket whose threshold the profit level
    /// reaches applies to all profits. Below every bracket nothing is owed.
    Schedule(Vec<Bracket>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindfallParams {
    pub gdp: Cents,
    pub ai_profit_fraction: Fraction,
    pub clause: ClauseRate,
    pub workforce: u64,
    pub displacement_rate: Fraction,
    /// Overrides `workforce * displacement_rate` with a rounded head count.
    pub displaced: Option<u64>,
}

impl WindfallParams {
    pub fn validate(&self) -> Result<(), SchemeError> {
        if self.gdp.0 <= 0 {
            return Err(SchemeError::InvalidParam("gdp must be positive"));
        }
        if self.workforce == 0 {
            return Err(SchemeError::InvalidParam("workforce must be positive"));
        }
        Ok(())
    }

    pub fn clause_rate(&self) -> Fraction {
        match &self.clause {
            ClauseRate::Flat(rate) => *rate,
            ClauseRate::Schedule(brackets) => brackets
                .iter()
                .filter(|b| b.from <= self.ai_profit_fraction)
                .max_by_key(|b| b.from)
                .map_or(Fraction::ZERO, |b| b.rate),
        }
    }

    /// Displaced head count in billionths of a person.
    fn displaced_billionths(&self) -> u128 {
        match self.displaced {
            Some(n) => u128::from(n) * u128::from(Fraction::SCALE),
            None => u128::from(self.workforce) * u128::from(self.displacement_rate.billionths()),
        }
    }

    /// Total donation per year.
    pub fn donation(&self) -> Cents {
        let num = i128::from(self.gdp.0)
            * i128::from(self.ai_profit_fraction.billionths())
            * i128::from(self.clause_rate().billionths());
        Cents::from_i128(div_round(num, SCALE2))
    }
}

const SCALE: i128 = Fraction::SCALE as i128;
const SCALE2: i128 = SCALE * SCALE;

/// `gdp * profit fraction * clause rate / displaced workers`, per year.
pub fn windfall_per_worker(p: &WindfallParams) -> Result<Cents, SchemeError> {
    p.validate()?;
    let displaced = p.displaced_billionths();
    if displaced == 0 {
        return Err(SchemeError::ZeroDisplaced);
    }
    let num = i128::from(p.gdp.0)
        .checked_mul(i128::from(p.ai_profit_fraction.billionths()))
        .and_then(|x| x.checked_mul(i128::from(p.clause_rate().billionths())))
        .ok_or(SchemeError::Overflow)?;
    let den = i128::try_from(displaced)
        .ok()
        .and_then(|d| d.checked_mul(SCALE))
        .ok_or(SchemeError::Overflow)?;
    Ok(Cents::from_i128(div_round(num, den)))
}

// ---------------------------------------------------------------------------
// Pay-to-train

#[derive(Debug, Clone, PartialEq)]
pub struct PayToTrainParams {
    pub total_revenue: Cents,
    pub ai_revenue_fraction: Fraction,
    pub d_c: Fraction,
    pub dataset_size: u64,
}

impl PayToTrainParams {
    pub fn validate(&self) -> Result<(), SchemeError> {
        if self.total_revenue.0 < 0 {
            return Err(SchemeError::InvalidParam("revenue must be non-negative"));
        }
        if self.dataset_size == 0 {
            return Err(SchemeError::InvalidParam("dataset_size must be positive"));
        }
        Ok(())
    }

    /// `total_revenue * ai_revenue_fraction * d_c`, the money set aside for
    /// the whole dataset.
    pub fn contributor_pool(&self) -> Cents {
        Cents::from_i128(div_round(self.pool_numerator(), SCALE2))
    }

    fn pool_numerator(&self) -> i128 {
        i128::from(self.total_revenue.0)
            * i128::from(self.ai_revenue_fraction.billionths())
            * i128::from(self.d_c.billionths())
    }

    /// Per-image rate in dollars. Display only; payouts use
    /// [`Self::payout_for`].
    pub fn rate_per_image_dollars(&self) -> f64 {
        self.pool_numerator() as f64 / SCALE2 as f64 / self.dataset_size as f64 / 100.0
    }

    /// `rate * work_count`, rounded once.
    pub fn payout_for(&self, work_count: u64) -> Result<Cents, SchemeError> {
        pro_rata(self.pool_numerator(), SCALE2, work_count, self.dataset_size)
    }
}

/// `(pool_num / pool_den) * share / of`, rounded to a cent.
fn pro_rata(pool_num: i128, pool_den: i128, share: u64, of: u64) -> Result<Cents, SchemeError> {
    let num = pool_num
        .checked_mul(i128::from(share))
        .ok_or(SchemeError::Overflow)?;
    let den = pool_den
        .checked_mul(i128::from(of))
        .ok_or(SchemeError::Overflow)?;
    Ok(Cents::from_i128(div_round(num, den)))
}

/// A contributor's payout when a `pool` is shared pro rata across
/// `dataset_size` items.
pub fn pro_rata_share(
    pool: Cents,
    work_count: u64,
    dataset_size: u64,
) -> Result<Cents, SchemeError> {
    if dataset_size == 0 {
        return Err(SchemeError::InvalidParam("dataset_size must be positive"));
    }
    pro_rata(i128::from(pool.0), 1, work_count, dataset_size)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rightsholder {
    pub holder_id: String,
    /// Training item ids owned. May be empty when only a count is known.
    pub holdings: Vec<String>,
    pub work_count: u64,
    pub fame_weight: f64,
}

impl Rightsholder {
    pub fn new(holder_id: impl Into<String>, work_count: u64, fame_weight: f64) -> Self {
        Self {
            holder_id: holder_id.into(),
            holdings: Vec::new(),
            work_count,
            fame_weight,
        }
    }

    pub fn with_holdings(
        holder_id: impl Into<String>,
        holdings: Vec<String>,
        fame_weight: f64,
    ) -> Self {
        Self {
            holder_id: holder_id.into(),
            work_count: holdings.len() as u64,
            holdings,
            fame_weight,
        }
    }

    pub fn validate(&self) -> Result<(), SchemeError> {
        let bad = |reason| SchemeError::InvalidHolder {
            holder: self.holder_id.clone(),
            reason,
        };
        if self.holder_id.is_empty() {
            return Err(bad("holder_id must not be empty"));
        }
        if !(self.fame_weight >= 0.0 && self.fame_weight.is_finite()) {
            return Err(bad("fame_weight must be finite and non-negative"));
        }
        if !self.holdings.is_empty() && self.holdings.len() as u64 != self.work_count {
            return Err(bad("work_count disagrees with enumerated holdings"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    Windfall,
    Training,
    Influence,
    Fame,
}

impl Component {
    pub fn as_str(self) -> &'static str {
        match self {
            Component::Windfall => "windfall",
            Component::Training => "training",
            Component::Influence => "influence",
            Component::Fame => "fame",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderPayout {
    pub holder_id: String,
    pub components: Vec<(Component, Cents)>,
    pub total: Cents,
}

impl HolderPayout {
    fn new(holder_id: &str, components: Vec<(Component, Cents)>) -> Self {
        let total = components.iter().map(|(_, c)| *c).sum();
        Self {
            holder_id: holder_id.into(),
            components,
            total,
        }
    }

    pub fn component(&self, which: Component) -> Option<Cents> {
        self.components
            .iter()
            .find(|(c, _)| *c == which)
            .map(|(_, amount)| *amount)
    }
}

/// Yearly payouts per holder, in holder order, with their components.
#[derive(Debug, Clone, PartialEq)]
pub struct CompensationReport {
    pub scheme: SchemeKind,
    pub payouts: Vec<HolderPayout>,
    pub total_distributed: Cents,
}

impl CompensationReport {
    fn new(scheme: SchemeKind, payouts: Vec<HolderPayout>) -> Self {
        let total_distributed = payouts.iter().map(|p| p.total).sum();
        Self {
            scheme,
            payouts,
            total_distributed,
        }
    }

    pub fn per_holder(&self, holder_id: &str) -> Option<Cents> {
        self.payouts
            .iter()
            .find(|p| p.holder_id == holder_id)
            .map(|p| p.total)
    }

    /// Totals add up and nobody is charged.
    pub fn check(&self) -> Result<(), SchemeError> {
        for p in &self.payouts {
            if p.components.iter().any(|(_, c)| c.0 < 0) {
                return Err(SchemeError::Invariant("negative payout"));
            }
            if p.components.iter().map(|(_, c)| *c).sum::<Cents>() != p.total {
                return Err(SchemeError::Invariant("components do not add up"));
            }
        }
        if self.payouts.iter().map(|p| p.total).sum::<Cents>() != self.total_distributed {
            return Err(SchemeError::Invariant("total_distributed mismatch"));
        }
        Ok(())
    }
}

fn validate_holders(holders: &[Rightsholder]) -> Result<(), SchemeError> {
    holders.iter().try_for_each(Rightsholder::validate)
}

/// Every holder, being a potential displaced worker, receives the same
/// per-worker windfall.
pub fn windfall(
    p: &WindfallParams,
    holders: &[Rightsholder],
) -> Result<CompensationReport, SchemeError> {
    validate_holders(holders)?;
    let each = windfall_per_worker(p)?;
    let payouts = holders
        .iter()
        .map(|h| HolderPayout::new(&h.holder_id, alloc::vec![(Component::Windfall, each)]))
        .collect();
    Ok(CompensationReport::new(SchemeKind::Windfall, payouts))
}

pub fn pay_to_train(
    p: &PayToTrainParams,
    holders: &[Rightsholder],
) -> Result<CompensationReport, SchemeError> {
    p.validate()?;
    validate_holders(holders)?;
    let payouts = holders
        .iter()
        .map(|h| {
            check_dataset(h, p.dataset_size)?;
            let amount = p.payout_for(h.work_count)?;
            Ok(HolderPayout::new(
                &h.holder_id,
                alloc::vec![(Component::Training, amount)],
            ))
        })
        .collect::<Result<_, SchemeError>>()?;
    Ok(CompensationReport::new(SchemeKind::PayToTrain, payouts))
}

fn check_dataset(h: &Rightsholder, dataset_size: u64) -> Result<(), SchemeError> {
    if h.work_count > dataset_size {
        return Err(SchemeError::HoldingsExceedDataset {
            holder: h.holder_id.clone(),
            work_count: h.work_count,
            dataset_size,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Pay-to-train-and-inspire

/// A generated output and the revenue it earned.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputRecord {
    pub output_id: String,
    /// Prompt and conditions, carried but not attributed.
    pub condition_tag: String,
    pub revenue: Cents,
    /// Identifier of the generating model.
    pub model_id: String,
}

impl OutputRecord {
    pub fn new(output_id: impl Into<String>, revenue: Cents) -> Self {
        Self {
            output_id: output_id.into(),
            condition_tag: String::new(),
            revenue,
            model_id: String::new(),
        }
    }
}

/// Revenue-weighted influence per holder, in dollars:
/// `raw_A = sum_y r(y) * sum_{x_i in X_A} f(x_i; y, c)`.
pub fn inspire_raw(
    outputs: &[OutputRecord],
    infl: &InfluenceMatrix,
    holders: &[Rightsholder],
) -> Result<Vec<f64>, SchemeError> {
    let columns: Vec<Vec<usize>> = holders
        .iter()
        .map(|h| {
            h.holdings
                .iter()
                .map(|item| {
                    infl.training_ids()
                        .iter()
                        .position(|t| t == item)
                        .ok_or_else(|| SchemeError::UnknownTrainingItem {
                            holder: h.holder_id.clone(),
                            item: item.clone(),
                        })
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;

    let mut raw = alloc::vec![0.0; holders.len()];
    for y in outputs {
        if y.revenue.0 < 0 {
            return Err(SchemeError::InvalidParam(
                "output revenue must be non-negative",
            ));
        }
        let row = infl
            .row_for(&y.output_id)
            .ok_or_else(|| SchemeError::InfluenceOutputMismatch(y.output_id.clone()))?;
        let r = y.revenue.as_dollars_f64();
        for (acc, cols) in raw.iter_mut().zip(&columns) {
            *acc += r * cols.iter().map(|&i| row[i]).sum::<f64>();
        }
    }
    Ok(raw)
}

pub fn pay_to_train_and_inspire(
    outputs: &[OutputRecord],
    infl: &InfluenceMatrix,
    holders: &[Rightsholder],
    payout_pool: Cents,
) -> Result<CompensationReport, SchemeError> {
    validate_holders(holders)?;
    if payout_pool.0 < 0 {
        return Err(SchemeError::InvalidParam(
            "payout pool must be non-negative",
        ));
    }
    let raw = inspire_raw(outputs, infl, holders)?;
    let total: f64 = raw.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(SchemeError::ZeroTotalRaw);
    }
    let pool = payout_pool.0 as f64;
    let payouts = holders
        .iter()
        .zip(&raw)
        .map(|(h, r)| {
            let amount = Cents(libm::round(pool * r / total) as i64);
            HolderPayout::new(&h.holder_id, alloc::vec![(Component::Influence, amount)])
        })
        .collect();
    Ok(CompensationReport::new(
        SchemeKind::PayToTrainAndInspire,
        payouts,
    ))
}

// ---------------------------------------------------------------------------
// AI royalties

#[derive(Debug, Clone, PartialEq)]
pub struct AiRoyaltyParams {
    /// Revenue attributable to AI outputs, per year.
    pub ai_revenue: Cents,
    pub training_pool_fraction: Fraction,
    pub dedicated_pool_fraction: Fraction,
    pub d_c: Fraction,
    pub dataset_size: u64,
    /// Money shared by fame weight across the modelled holders' dedicated
    /// models. Defaults to `ai_revenue * dedicated_pool_fraction * d_c`.
    pub dedicated_budget: Option<Cents>,
}

impl AiRoyaltyParams {
    pub fn validate(&self) -> Result<(), SchemeError> {
        if self.training_pool_fraction.billionths() + self.dedicated_pool_fraction.billionths()
            != Fraction::SCALE
        {
            return Err(SchemeError::InvalidParam(
                "training and dedicated pool fractions must sum to 1",
            ));
        }
        if self.ai_revenue.0 < 0 {
            return Err(SchemeError::InvalidParam("revenue must be non-negative"));
        }
        if self.dataset_size == 0 {
            return Err(SchemeError::InvalidParam("dataset_size must be positive"));
        }
        if self.dedicated_budget.is_some_and(|b| b.0 < 0) {
            return Err(SchemeError::InvalidParam(
                "dedicated budget must be non-negative",
            ));
        }
        Ok(())
    }

    pub fn dedicated_budget(&self) -> Cents {
        self.dedicated_budget.unwrap_or_else(|| {
            let num = i128::from(self.ai_revenue.0)
                * i128::from(self.dedicated_pool_fraction.billionths())
                * i128::from(self.d_c.billionths());
            Cents::from_i128(div_round(num, SCALE2))
        })
    }

    fn training_numerator(&self) -> i128 {
        i128::from(self.ai_revenue.0)
            * i128::from(self.training_pool_fraction.billionths())
            * i128::from(self.d_c.billionths())
    }
}

pub fn ai_royalties(
    p: &AiRoyaltyParams,
    holders: &[Rightsholder],
) -> Result<CompensationReport, SchemeError> {
    p.validate()?;
    validate_holders(holders)?;
    let budget = p.dedicated_budget();
    let fame_total = order_free_sum(holders.iter().map(|h| h.fame_weight));
    if budget.0 > 0 && (fame_total.is_nan() || fame_total <= 0.0) {
        return Err(SchemeError::ZeroFameTotal);
    }
    let payouts = holders
        .iter()
        .map(|h| {
            check_dataset(h, p.dataset_size)?;
            let training = pro_rata(p.training_numerator(), SCALE2, h.work_count, p.dataset_size)?;
            let fame = if fame_total > 0.0 {
                Cents(libm::round(budget.0 as f64 * h.fame_weight / fame_total) as i64)
            } else {
                Cents::ZERO
            };
            Ok(HolderPayout::new(
                &h.holder_id,
                alloc::vec![(Component::Training, training), (Component::Fame, fame)],
            ))
        })
        .collect::<Result<_, SchemeError>>()?;
    Ok(CompensationReport::new(SchemeKind::AiRoyalties, payouts))
}

/// Sum that does not depend on the order of its terms, so permuting fame
/// weights permutes the fame components bit for bit.
fn order_free_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.into_iter().sum()
}

// ---------------------------------------------------------------------------
// Scenarios

#[derive(Debug, Clone, PartialEq)]
pub struct InspireParams {
    pub outputs: Vec<OutputRecord>,
    pub influence: InfluenceMatrix,
    pub payout_pool: Cents,
}

/// One simulation: a scheme, the holders, and whichever parameter blocks
/// were supplied. Only the block for `scheme` is required.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub label: String,
    pub scheme: SchemeKind,
    pub holders: Vec<Rightsholder>,
    pub windfall: Option<WindfallParams>,
    pub pay_to_train: Option<PayToTrainParams>,
    pub inspire: Option<InspireParams>,
    pub ai_royalties: Option<AiRoyaltyParams>,
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<CompensationReport, SchemeError> {
    let missing = || SchemeError::MissingParams(config.scheme);
    let report = match config.scheme {
        SchemeKind::Windfall => windfall(
            config.windfall.as_ref().ok_or_else(missing)?,
            &config.holders,
        ),
        SchemeKind::PayToTrain => pay_to_train(
            config.pay_to_train.as_ref().ok_or_else(missing)?,
            &config.holders,
        ),
        SchemeKind::PayToTrainAndInspire => {
            let p = config.inspire.as_ref().ok_or_else(missing)?;
            pay_to_train_and_inspire(&p.outputs, &p.influence, &config.holders, p.payout_pool)
        }
        SchemeKind::AiRoyalties => ai_royalties(
            config.ai_royalties.as_ref().ok_or_else(missing)?,
            &config.holders,
        ),
    }?;
    report.check()?;
    Ok(report)
}
