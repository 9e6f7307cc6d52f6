//! Maximal-fluctuation order estimation.
//!
//! `δ_m(a_1^k)` compares the count of `a_1^k` with the count predicted from
//! its context `a_1^{k-1}` and the `m`-truncated conditional
//! `P̂_n(a_k | a_{k-m}^{k-1})`. Below the true order some block makes this
//! discrepancy grow linearly in `n`; at the true order it is a martingale
//! fluctuation of size `O(n^{1/2+ε})`. `φ_m` is the largest discrepancy over a
//! window of block lengths, and the estimate is the first `m` with
//! `φ_m < scale · n^{exponent}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::methods::MethodConfig;
use crate::report::{CandidateRecord, EstimationReport, Method};
use crate::seqcore::{occurrences, BlockStats, Sequence, Symbol};

/// The block-length window `k < f(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Window {
    /// `f(n) = log log n`.
    LogLog,
    /// `f(n) = k_max + 1`, i.e. block lengths up to `k_max`.
    Fixed { k_max: usize },
}

impl Window {
    /// `f(n)` as a real number.
    pub fn bound(self, n: usize) -> f64 {
        match self {
            Window::LogLog => (n as f64).ln().ln(),
            Window::Fixed { k_max } => k_max as f64 + 1.0,
        }
    }

    /// Largest integer `k` with `k < f(n)` (zero when there is none), never
    /// above `n - 1`.
    pub fn max_k(self, n: usize) -> usize {
        let k = match self {
            Window::LogLog => {
                let f = self.bound(n);
                if f.is_finite() && f > 1.0 {
                    f.ceil() as usize - 1
                } else {
                    0
                }
            }
            Window::Fixed { k_max } => k_max,
        };
        k.min(n.saturating_sub(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FluctuationConfig {
    pub window: Window,
    pub threshold_exponent: f64,
    pub threshold_scale: f64,
}

impl Default for FluctuationConfig {
    fn default() -> Self {
        FluctuationConfig {
            window: Window::Fixed { k_max: 6 },
            threshold_exponent: 0.75,
            threshold_scale: 1.0,
        }
    }
}

impl FluctuationConfig {
    pub fn with_k_max(k_max: usize) -> Self {
        FluctuationConfig {
            window: Window::Fixed { k_max },
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.threshold_exponent > 0.5 && self.threshold_exponent < 1.0) {
            return Err(Error::Precondition(format!(
                "threshold exponent {} outside (1/2, 1)",
                self.threshold_exponent
            )));
        }
        if !(self.threshold_scale > 0.0 && self.threshold_scale.is_finite()) {
            return Err(Error::Precondition(format!(
                "threshold scale {} must be positive",
                self.threshold_scale
            )));
        }
        Ok(())
    }

    pub fn threshold(&self, n: usize) -> f64 {
        self.threshold_scale * (n as f64).powf(self.threshold_exponent)
    }
}

/// `δ_m` from precomputed counts. Zero when the suffix context never occurs.
fn delta_from_stats(stats: &BlockStats<'_>, m: usize, a: &[Symbol]) -> Result<f64> {
    let k = a.len();
    let full = stats.full(k)?.count(a);
    let context = stats.trimmed(k - 1)?.count(&a[..k - 1]);
    let suffix = &a[k - 1 - m..];
    let suffix_context = stats.trimmed(m)?.count(&suffix[..m]);
    if suffix_context == 0 {
        return Ok(0.0);
    }
    let suffix_full = stats.full(m + 1)?.count(suffix);
    Ok(full as f64 - context as f64 * (suffix_full as f64 / suffix_context as f64))
}

/// `δ_m(a_1^k | x_1^n) = N_n(a_1^k) - N_{n-1}(a_1^{k-1}) P̂_n(a_k | a_{k-m}^{k-1})`.
pub fn delta(x: &Sequence, m: usize, a: &[Symbol]) -> Result<f64> {
    let k = a.len();
    if k <= m || k + 1 > x.len() {
        return Err(Error::Precondition(format!(
            "need m < k <= n-1, got m={m}, k={k}, n={}",
            x.len()
        )));
    }
    let sym = x.symbols();
    let trimmed = &sym[..sym.len() - 1];
    let suffix = &a[k - 1 - m..];
    let suffix_context = occurrences(trimmed, &suffix[..m]);
    if suffix_context == 0 {
        return Ok(0.0);
    }
    let full = occurrences(sym, a) as f64;
    let context = occurrences(trimmed, &a[..k - 1]) as f64;
    let suffix_full = occurrences(sym, suffix) as f64;
    Ok(full - context * suffix_full / suffix_context as f64)
}

/// `φ_m` over block lengths `m < k <= max_k` using shared tables.
///
/// Only observed `k`-blocks are scanned. An unobserved block has
/// `N_n(a_1^k) = 0`, so its `δ` is zero or negative; and for every observed
/// context the `δ` values of its continuations sum to zero, so the maximum
/// over observed blocks is already nonnegative and equals the maximum over
/// all of `A^k`.
pub fn phi_from_stats(stats: &BlockStats<'_>, m: usize, max_k: usize) -> Result<f64> {
    let mut best = 0.0f64;
    for k in (m + 1)..=max_k {
        let mut err = None;
        stats
            .full(k)?
            .for_each(|block, _| match delta_from_stats(stats, m, block) {
                Ok(d) => best = best.max(d),
                Err(e) => err = Some(e),
            });
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(best)
}

/// `φ_m(x_1^n) = max_{m<k<f(n)} max_{a_1^k} δ_m(a_1^k | x_1^n)`.
pub fn phi(x: &Sequence, m: usize, cfg: &FluctuationConfig) -> Result<f64> {
    if x.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, n: x.len() });
    }
    let max_k = cfg.window.max_k(x.len());
    let stats = BlockStats::new(x, max_k);
    phi_from_stats(&stats, m, max_k)
}

/// `M# = min{m < n - f(n) : φ_m < threshold(n)}`, or `n` when no candidate
/// passes.
pub fn estimate_order_fluctuation(x: &Sequence, cfg: &FluctuationConfig) -> Result<EstimationReport> {
    estimate_order_fluctuation_with(x, cfg, Execution::default())
}

pub fn estimate_order_fluctuation_with(
    x: &Sequence,
    cfg: &FluctuationConfig,
    exec: Execution,
) -> Result<EstimationReport> {
    cfg.validate()?;
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, n });
    }
    let max_k = cfg.window.max_k(n);
    let threshold = cfg.threshold(n);
    let limit = n as f64 - cfg.window.bound(n);
    let stats = BlockStats::new(x, max_k);
    stats.prefetch(0..=max_k, exec);

    let mut records = Vec::new();
    let mut m = 0;
    while (m as f64) < limit {
        let exhausted = m + 1 > max_k;
        let value = phi_from_stats(&stats, m, max_k)?;
        let passed = value < threshold;
        records.push(CandidateRecord {
            candidate: m,
            statistic: value,
            threshold: Some(threshold),
            passed,
            flags: if exhausted {
                vec!["window_exhausted".into()]
            } else {
                Vec::new()
            },
        });
        if passed {
            break;
        }
        m += 1;
    }
    Ok(
        EstimationReport::from_candidates(Method::Fluctuation, n, MethodConfig::Fluctuation(cfg.clone()), records)
            .with_diagnostic("max_block_length", max_k as f64),
    )
}
