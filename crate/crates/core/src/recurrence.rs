//! Recurrence times of the opening block, the longest repeated prefix
//! `ℓ(n)`, and the entropy-threshold order estimators built on them.
//!
//! The estimator accepts the least `k` whose conditional empirical entropy
//! falls under an entropy estimate plus a slack that absorbs the estimate's
//! underestimation. Any [`EntropyEstimator`] with a vanishing
//! underestimation bound can be plugged in.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::methods::MethodConfig;
use crate::report::{CandidateRecord, EstimationReport, Method};
use crate::seqcore::{BlockStats, Sequence, Symbol};

/// Z-function: `z[i]` is the length of the longest common prefix of `s` and
/// `s[i..]`, with `z[0] = s.len()`.
pub fn z_array(s: &[Symbol]) -> Vec<usize> {
    let n = s.len();
    let mut z = vec![0; n];
    if n == 0 {
        return z;
    }
    z[0] = n;
    let (mut l, mut r) = (0, 0);
    for i in 1..n {
        if i < r {
            z[i] = (r - i).min(z[i - l]);
        }
        while i + z[i] < n && s[z[i]] == s[i + z[i]] {
            z[i] += 1;
        }
        if i + z[i] > r {
            l = i;
            r = i + z[i];
        }
    }
    z
}

/// `R_m(x)`: the least `r >= m` with `x_{r+1}^{r+m} = x_1^m`, if such a
/// recurrence lies inside `x_1^n`.
pub fn recurrence_time(x: &Sequence, m: usize) -> Result<Option<usize>> {
    if m == 0 || m > x.len() {
        return Err(Error::Precondition(format!("prefix length {m} not in 1..={}", x.len())));
    }
    let z = z_array(x.symbols());
    Ok((m..x.len()).find(|&r| z[r] >= m))
}

/// `ℓ(n) = max{k : R_k <= n}`, the length of the longest opening block that
/// recurs (without overlapping itself) inside `x_1^n`. Zero if even the first
/// symbol never recurs.
///
/// Linear time: a recurrence starting at 0-based offset `s` witnesses every
/// `k <= min(z[s], s)`.
pub fn longest_repeated_prefix(x: &Sequence) -> usize {
    let z = z_array(x.symbols());
    z.iter()
        .enumerate()
        .skip(1)
        .map(|(s, &len)| len.min(s))
        .max()
        .unwrap_or(0)
}

/// `log(n) / ℓ(n)` in nats.
pub fn recurrence_entropy(x: &Sequence) -> Result<f64> {
    let ell = longest_repeated_prefix(x);
    if ell == 0 {
        return Err(Error::DegenerateSample(
            "no repeated prefix; sample too short for recurrence estimation".into(),
        ));
    }
    Ok((x.len() as f64).ln() / ell as f64)
}

/// An entropy estimate with a known rate `u(n) -> 0` such that the estimate
/// is eventually at least `H - u(n)`.
pub trait EntropyEstimator: Sync {
    fn name(&self) -> &str;
    fn estimate(&self, x: &Sequence) -> Result<f64>;
    fn underestimation_bound(&self, n: usize) -> f64;

    /// The configuration to record in reports.
    fn choice(&self) -> EstimatorChoice {
        EstimatorChoice::Custom {
            name: self.name().to_owned(),
        }
    }
}

/// `log(n)/ℓ(n)` with bound `(log n)^{-1/4}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RecurrenceEstimator;

impl EntropyEstimator for RecurrenceEstimator {
    fn name(&self) -> &str {
        "recurrence"
    }

    fn estimate(&self, x: &Sequence) -> Result<f64> {
        recurrence_entropy(x)
    }

    fn underestimation_bound(&self, n: usize) -> f64 {
        (n as f64).ln().powf(-0.25)
    }

    fn choice(&self) -> EstimatorChoice {
        EstimatorChoice::Recurrence
    }
}

/// `ĥ_{f(n)}(n)` with `f(n) = max(1, floor(log log n / log |A|))` and bound
/// `C (log n)^2 / n`.
#[derive(Debug, Clone, Copy)]
pub struct EmpiricalEntropyEstimator {
    pub c: f64,
}

impl Default for EmpiricalEntropyEstimator {
    fn default() -> Self {
        EmpiricalEntropyEstimator { c: 1.0 }
    }
}

/// The empirical-entropy estimator with `C = 1`.
pub fn empirical_entropy_estimator() -> EmpiricalEntropyEstimator {
    EmpiricalEntropyEstimator::default()
}

impl EmpiricalEntropyEstimator {
    pub fn context_length(n: usize, alphabet_size: usize) -> usize {
        let n = n as f64;
        let raw = (n.ln().ln() / (alphabet_size as f64).ln()).floor();
        if raw.is_finite() && raw > 1.0 {
            raw as usize
        } else {
            1
        }
    }
}

impl EntropyEstimator for EmpiricalEntropyEstimator {
    fn name(&self) -> &str {
        "empirical"
    }

    fn estimate(&self, x: &Sequence) -> Result<f64> {
        let k = Self::context_length(x.len(), x.alphabet().size());
        if k + 1 > x.len() {
            return Err(Error::InsufficientData {
                needed: k + 1,
                n: x.len(),
            });
        }
        BlockStats::new(x, k + 1).cond_entropy(k)
    }

    fn underestimation_bound(&self, n: usize) -> f64 {
        let ln = (n as f64).ln();
        self.c * ln * ln / n as f64
    }

    fn choice(&self) -> EstimatorChoice {
        EstimatorChoice::Empirical { c: self.c }
    }
}

/// Returns a fixed value, e.g. the true entropy of a simulated source.
#[derive(Debug, Clone, Copy)]
pub struct FixedEntropy {
    pub value: f64,
    pub bound: f64,
}

impl EntropyEstimator for FixedEntropy {
    fn name(&self) -> &str {
        "fixed"
    }

    fn estimate(&self, _x: &Sequence) -> Result<f64> {
        Ok(self.value)
    }

    fn underestimation_bound(&self, _n: usize) -> f64 {
        self.bound
    }

    fn choice(&self) -> EstimatorChoice {
        EstimatorChoice::Fixed {
            value: self.value,
            bound: self.bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimatorChoice {
    Recurrence,
    Empirical {
        c: f64,
    },
    Fixed {
        value: f64,
        bound: f64,
    },
    /// A user-supplied estimator; recorded by name, cannot be rebuilt.
    Custom {
        name: String,
    },
}

impl EstimatorChoice {
    pub fn build(&self) -> Result<Box<dyn EntropyEstimator>> {
        Ok(match *self {
            EstimatorChoice::Recurrence => Box::new(RecurrenceEstimator),
            EstimatorChoice::Empirical { c } => Box::new(EmpiricalEntropyEstimator { c }),
            EstimatorChoice::Fixed { value, bound } => Box::new(FixedEntropy { value, bound }),
            EstimatorChoice::Custom { ref name } => {
                return Err(Error::Precondition(format!(
                    "custom estimator '{name}' cannot be rebuilt from a config"
                )))
            }
        })
    }
}

/// Which acceptance rule to apply to `ĥ_k(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdRule {
    /// `ĥ_k <= log(n)/ℓ(n) + 2 (log n)^{-1/4}`; the estimator field is ignored.
    #[default]
    Recurrence,
    /// `ĥ_k < Ĥ + |u(n)| + log(n)/n` for the configured estimator.
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EntropyConfig {
    pub rule: ThresholdRule,
    pub estimator: EstimatorChoice,
    /// Largest candidate order; `None` means `floor(log n / log |A|)`.
    pub k_cap: Option<usize>,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        EntropyConfig {
            rule: ThresholdRule::Recurrence,
            estimator: EstimatorChoice::Recurrence,
            k_cap: None,
        }
    }
}

/// Default candidate cap `floor(log n / log |A|)`, never above `n - 1`.
pub fn default_k_cap(n: usize, alphabet_size: usize) -> usize {
    let cap = ((n as f64).ln() / (alphabet_size as f64).ln()).floor();
    let cap = if cap.is_finite() && cap > 0.0 { cap as usize } else { 0 };
    cap.min(n.saturating_sub(1))
}

fn resolve_cap(x: &Sequence, k_cap: Option<usize>) -> usize {
    k_cap
        .unwrap_or_else(|| default_k_cap(x.len(), x.alphabet().size()))
        .min(x.len() - 1)
}

fn check_estimable(x: &Sequence) -> Result<()> {
    x.alphabet().require_estimable()?;
    if x.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, n: x.len() });
    }
    Ok(())
}

/// Scans `k = 0..=cap`, stopping at the first `k` accepted by `accept`.
fn scan(x: &Sequence, cap: usize, threshold: f64, accept: impl Fn(f64) -> bool) -> Result<Vec<CandidateRecord>> {
    let stats = BlockStats::new(x, cap + 1);
    let mut records = Vec::new();
    for k in 0..=cap {
        let h = stats.cond_entropy(k)?;
        let passed = accept(h);
        records.push(CandidateRecord {
            candidate: k,
            statistic: h,
            threshold: Some(threshold),
            passed,
            flags: Vec::new(),
        });
        if passed {
            break;
        }
    }
    Ok(records)
}

fn finish(x: &Sequence, config: EntropyConfig, records: Vec<CandidateRecord>) -> EstimationReport {
    let mut report =
        EstimationReport::from_candidates(Method::Entropy, x.len(), MethodConfig::Entropy(config), records);
    if report.sentinel {
        if let Some(last) = report.per_candidate.last_mut() {
            last.flags.push("k_cap_reached".into());
        }
    }
    report
}

/// `M* = min{k : ĥ_k(n) <= log(n)/ℓ(n) + 2 (log n)^{-1/4}}`, scanning
/// `k <= k_cap`.
pub fn estimate_order_entropy(x: &Sequence, k_cap: Option<usize>) -> Result<EstimationReport> {
    check_estimable(x)?;
    let ell = longest_repeated_prefix(x);
    let entropy = recurrence_entropy(x)?;
    let ln_n = (x.len() as f64).ln();
    let slack = 2.0 * ln_n.powf(-0.25);
    let threshold = entropy + slack;
    let cap = resolve_cap(x, k_cap);
    let records = scan(x, cap, threshold, |h| h <= threshold)?;
    let config = EntropyConfig {
        rule: ThresholdRule::Recurrence,
        estimator: EstimatorChoice::Recurrence,
        k_cap: Some(cap),
    };
    Ok(finish(x, config, records)
        .with_diagnostic("entropy_estimate", entropy)
        .with_diagnostic("longest_repeated_prefix", ell as f64)
        .with_diagnostic("slack", slack))
}

/// `min{k : ĥ_k(n) < Ĥ(x) + |u(n)| + log(n)/n}` for any entropy estimator.
pub fn estimate_order_general(
    x: &Sequence,
    est: &dyn EntropyEstimator,
    k_cap: Option<usize>,
) -> Result<EstimationReport> {
    check_estimable(x)?;
    let n = x.len();
    let entropy = est.estimate(x)?;
    let bound = est.underestimation_bound(n).abs();
    let slack = bound + (n as f64).ln() / n as f64;
    let threshold = entropy + slack;
    let cap = resolve_cap(x, k_cap);
    let records = scan(x, cap, threshold, |h| h < threshold)?;
    let config = EntropyConfig {
        rule: ThresholdRule::General,
        estimator: est.choice(),
        k_cap: Some(cap),
    };
    Ok(finish(x, config, records)
        .with_diagnostic("entropy_estimate", entropy)
        .with_diagnostic("underestimation_bound", bound)
        .with_diagnostic("slack", slack))
}

impl EntropyConfig {
    pub fn run(&self, x: &Sequence) -> Result<EstimationReport> {
        match self.rule {
            ThresholdRule::Recurrence => estimate_order_entropy(x, self.k_cap),
            ThresholdRule::General => estimate_order_general(x, self.estimator.build()?.as_ref(), self.k_cap),
        }
    }
}
