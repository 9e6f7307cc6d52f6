//! Comparison estimators: BIC and the naive flat-spot rule, plus a chain on
//! which the flat-spot rule fails.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::methods::MethodConfig;
use crate::recurrence::default_k_cap;
use crate::report::{CandidateRecord, EstimationReport, Method};
use crate::seqcore::{Alphabet, BlockStats, Sequence};
use crate::simulate::{MarkovModel, DEFAULT_BUDGET};

pub const BIC_PENALTY: &str = "|A|^k (|A|-1) / 2 * ln n";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BicConfig {
    pub k_max: usize,
    /// Largest `|A|^{k_max}` accepted.
    pub budget: u64,
}

impl Default for BicConfig {
    fn default() -> Self {
        BicConfig {
            k_max: 5,
            budget: DEFAULT_BUDGET as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BicScore {
    pub k: usize,
    /// `-log P_ML(k) = (n-k) ĥ_k(n)`.
    pub neg_log_likelihood: f64,
    pub penalty: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BicReport {
    pub chosen_order: usize,
    pub sample_size: usize,
    pub config: BicConfig,
    pub per_candidate: Vec<BicScore>,
    pub penalty_formula: String,
}

impl BicReport {
    /// The same result as a generic report: the minimizer is the only
    /// candidate marked as passed, and no threshold is recorded.
    pub fn to_estimation_report(&self) -> EstimationReport {
        let records = self
            .per_candidate
            .iter()
            .map(|s| CandidateRecord {
                candidate: s.k,
                statistic: s.score,
                threshold: None,
                passed: s.k == self.chosen_order,
                flags: Vec::new(),
            })
            .collect();
        EstimationReport::from_candidates(
            Method::Bic,
            self.sample_size,
            MethodConfig::Bic(self.config.clone()),
            records,
        )
    }
}

impl From<BicReport> for EstimationReport {
    fn from(r: BicReport) -> Self {
        r.to_estimation_report()
    }
}

/// `argmin_{0<=k<=k_max} (n-k) ĥ_k(n) + |A|^k (|A|-1)/2 · ln n`, ties to the
/// smaller `k`.
pub fn bic_order(x: &Sequence, k_max: usize) -> Result<BicReport> {
    bic_order_with(
        x,
        &BicConfig {
            k_max,
            ..Default::default()
        },
        Execution::default(),
    )
}

pub fn bic_order_with(x: &Sequence, cfg: &BicConfig, exec: Execution) -> Result<BicReport> {
    let n = x.len();
    let k_max = cfg.k_max;
    if k_max + 1 > n {
        return Err(Error::InsufficientData { needed: k_max + 1, n });
    }
    let size = x.alphabet().size();
    let contexts = x.alphabet().pow(k_max);
    if contexts > cfg.budget as u128 {
        return Err(Error::MemoryBudget {
            what: format!("|A|^{k_max} = {size}^{k_max} BIC contexts"),
            size: contexts,
            budget: cfg.budget as u128,
        });
    }
    let stats = BlockStats::new(x, k_max + 1);
    stats.prefetch(0..=k_max + 1, exec);
    let ln_n = (n as f64).ln();
    let mut scores = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let nll = (n - k) as f64 * stats.cond_entropy(k)?;
        let penalty = x.alphabet().pow(k) as f64 * (size - 1) as f64 / 2.0 * ln_n;
        scores.push(BicScore {
            k,
            neg_log_likelihood: nll,
            penalty,
            score: nll + penalty,
        });
    }
    // Strict comparison keeps the first (smallest) minimizer.
    let chosen = scores
        .iter()
        .fold(&scores[0], |best, s| if s.score < best.score { s } else { best })
        .k;
    Ok(BicReport {
        chosen_order: chosen,
        sample_size: n,
        config: cfg.clone(),
        per_candidate: scores,
        penalty_formula: BIC_PENALTY.into(),
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlatspotConfig {
    /// Largest candidate; `None` uses the same default cap as the entropy
    /// method.
    pub k_cap: Option<usize>,
}

/// The naive rule `min{k : ĥ_k(n) - ĥ_{k+1}(n) < n^{-1/4}}`.
///
/// Not consistent: it stops at the first flat spot of the conditional
/// entropy curve even when the curve drops again later (see
/// [`build_flatspot_chain`]). Kept as a baseline.
pub fn naive_flatspot_order(x: &Sequence, cfg: &FlatspotConfig) -> Result<EstimationReport> {
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, n });
    }
    let cap = cfg
        .k_cap
        .unwrap_or_else(|| default_k_cap(n, x.alphabet().size()))
        .min(n - 2);
    let threshold = (n as f64).powf(-0.25);
    let stats = BlockStats::new(x, cap + 2);
    let mut records = Vec::new();
    let mut prev = stats.cond_entropy(0)?;
    for k in 0..=cap {
        let next = stats.cond_entropy(k + 1)?;
        let drop = prev - next;
        let passed = drop < threshold;
        records.push(CandidateRecord {
            candidate: k,
            statistic: drop,
            threshold: Some(threshold),
            passed,
            flags: Vec::new(),
        });
        if passed {
            break;
        }
        prev = next;
    }
    let config = FlatspotConfig { k_cap: Some(cap) };
    let mut report = EstimationReport::from_candidates(Method::Flatspot, n, MethodConfig::Flatspot(config), records);
    if report.sentinel {
        if let Some(last) = report.per_candidate.last_mut() {
            last.flags.push("k_cap_reached".into());
        }
    }
    Ok(report)
}

/// Binary chain of order `lag` with `P(x_t = x_{t-lag}) = stay_prob`,
/// whatever the symbols in between.
///
/// The chain interleaves `lag` independent two-state chains, so
/// `H_0 = ... = H_{lag-1} = log 2 > H_lag`: the conditional entropy is flat
/// until it drops at the true order.
pub fn build_flatspot_chain(lag: usize, stay_prob: f64) -> Result<MarkovModel> {
    if lag < 2 {
        return Err(Error::Precondition(format!("lag must be at least 2, got {lag}")));
    }
    if !(stay_prob > 0.0 && stay_prob < 1.0) {
        return Err(Error::InvalidModel(format!(
            "stay probability {stay_prob} outside (0, 1)"
        )));
    }
    if stay_prob == 0.5 {
        return Err(Error::InvalidModel("stay probability 1/2 gives an i.i.d. chain".into()));
    }
    let rows = (0..1usize << lag)
        .map(|ctx| {
            // Oldest symbol is the most significant bit.
            if ctx >> (lag - 1) == 0 {
                vec![stay_prob, 1.0 - stay_prob]
            } else {
                vec![1.0 - stay_prob, stay_prob]
            }
        })
        .collect();
    MarkovModel::new(Alphabet::new(2)?, lag, rows)
}
