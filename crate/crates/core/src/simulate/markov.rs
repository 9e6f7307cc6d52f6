use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqcore::{Alphabet, Sequence, Symbol};

/// Largest number of kernel rows (contexts) a model may have.
pub const DEFAULT_BUDGET: u128 = 1 << 22;

const ROW_TOLERANCE: f64 = 1e-12;
const STATIONARY_TOLERANCE: f64 = 1e-12;
const STATIONARY_RESIDUAL: f64 = 1e-9;
const MAX_POWER_ITERATIONS: usize = 500_000;

/// A finite-order Markov kernel `P(a | context)`, one row per context in
/// `A^order`. Contexts are indexed base `|A|` with the oldest symbol most
/// significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovModel {
    alphabet: Alphabet,
    order: usize,
    kernel: Vec<f64>,
}

fn check_budget(what: &str, size: u128, budget: u128) -> Result<()> {
    if size > budget {
        return Err(Error::MemoryBudget {
            what: what.into(),
            size,
            budget,
        });
    }
    Ok(())
}

impl MarkovModel {
    pub fn new(alphabet: Alphabet, order: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        let contexts = alphabet.pow(order);
        check_budget(&format!("|A|^{order} kernel rows"), contexts, DEFAULT_BUDGET)?;
        if rows.len() as u128 != contexts {
            return Err(Error::InvalidModel(format!(
                "order {order} over {} symbols needs {contexts} rows, got {}",
                alphabet.size(),
                rows.len()
            )));
        }
        let size = alphabet.size();
        let mut kernel = Vec::with_capacity(rows.len() * size);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != size {
                return Err(Error::InvalidModel(format!(
                    "row {i} has {} entries, expected {size}",
                    row.len()
                )));
            }
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::InvalidModel(format!(
                    "row {i} has a negative or non-finite entry"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_TOLERANCE {
                return Err(Error::InvalidModel(format!("row {i} sums to {sum}")));
            }
            kernel.extend(row);
        }
        Ok(MarkovModel {
            alphabet,
            order,
            kernel,
        })
    }

    /// Order-0 model drawing each symbol from `probs`.
    pub fn iid(probs: Vec<f64>) -> Result<Self> {
        let alphabet = Alphabet::new(probs.len())?;
        MarkovModel::new(alphabet, 0, vec![probs])
    }

    /// Two-state chain flipping 0→1 with probability `p` and 1→0 with `q`.
    pub fn two_state(p: f64, q: f64) -> Result<Self> {
        MarkovModel::new(Alphabet::new(2)?, 1, vec![vec![1.0 - p, p], vec![q, 1.0 - q]])
    }

    /// Order-1 chain that moves to `(a + 1) mod |A|` with probability `stay`
    /// and otherwise to one of the other symbols uniformly.
    pub fn cyclic_shift(size: usize, stay: f64) -> Result<Self> {
        let alphabet = Alphabet::new(size)?;
        alphabet.require_estimable()?;
        let other = (1.0 - stay) / (size - 1) as f64;
        let rows = (0..size)
            .map(|a| {
                (0..size)
                    .map(|b| if b == (a + 1) % size { stay } else { other })
                    .collect()
            })
            .collect();
        MarkovModel::new(alphabet, 1, rows)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn num_contexts(&self) -> usize {
        self.kernel.len() / self.alphabet.size()
    }

    pub fn row(&self, context: usize) -> &[f64] {
        let size = self.alphabet.size();
        &self.kernel[context * size..(context + 1) * size]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.kernel.chunks(self.alphabet.size())
    }

    /// Index of a context given oldest-first.
    pub fn context_index(&self, context: &[Symbol]) -> usize {
        let size = self.alphabet.size();
        context.iter().fold(0, |acc, &s| acc * size + s as usize)
    }

    /// Smallest `j <= order` such that every row depends only on the last `j`
    /// context symbols (exact comparison).
    pub fn effective_order(&self) -> usize {
        let size = self.alphabet.size();
        (0..=self.order)
            .find(|&j| {
                let tail = size.pow(j as u32);
                (0..self.num_contexts()).all(|c| self.row(c) == self.row(c % tail))
            })
            .unwrap_or(self.order)
    }

    fn successor(&self, context: usize, symbol: usize) -> usize {
        (context * self.alphabet.size() + symbol) % self.num_contexts()
    }
}

/// Counts closed communicating classes of the context chain (iterative
/// Kosaraju).
fn closed_classes(model: &MarkovModel) -> Vec<usize> {
    let s = model.num_contexts();
    let size = model.alphabet().size();
    let succ = |c: usize| {
        (0..size)
            .filter(move |&b| model.row(c)[b] > 0.0)
            .map(move |b| model.successor(c, b))
    };
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); s];
    for c in 0..s {
        for d in succ(c) {
            pred[d].push(c);
        }
    }

    let mut order = Vec::with_capacity(s);
    let mut seen = vec![false; s];
    for start in 0..s {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![(start, succ(start).collect::<Vec<_>>().into_iter())];
        while let Some((node, iter)) = stack.last_mut() {
            if let Some(next) = iter.next() {
                if !seen[next] {
                    seen[next] = true;
                    stack.push((next, succ(next).collect::<Vec<_>>().into_iter()));
                }
            } else {
                order.push(*node);
                stack.pop();
            }
        }
    }

    let mut comp = vec![usize::MAX; s];
    let mut ncomp = 0;
    for &root in order.iter().rev() {
        if comp[root] != usize::MAX {
            continue;
        }
        comp[root] = ncomp;
        let mut stack = vec![root];
        while let Some(node) = stack.pop() {
            for &p in &pred[node] {
                if comp[p] == usize::MAX {
                    comp[p] = ncomp;
                    stack.push(p);
                }
            }
        }
        ncomp += 1;
    }

    let mut open = vec![false; ncomp];
    for c in 0..s {
        if succ(c).any(|d| comp[d] != comp[c]) {
            open[comp[c]] = true;
        }
    }
    // One representative context per closed class.
    (0..ncomp)
        .filter(|&k| !open[k])
        .map(|k| comp.iter().position(|&x| x == k).unwrap())
        .collect()
}

fn format_context(model: &MarkovModel, mut c: usize) -> String {
    let size = model.alphabet().size();
    let mut out = vec![0; model.order()];
    for slot in out.iter_mut().rev() {
        *slot = c % size;
        c /= size;
    }
    out.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
}

/// Stationary law of the context chain on `A^order` (for order 0, the
/// model's single row).
///
/// The chain must have exactly one closed communicating class. Periodic
/// chains are fine: iteration uses the lazy kernel `(I + P)/2`, which has
/// the same fixed point and converges whenever the fixed point is unique.
pub fn stationary_distribution(model: &MarkovModel) -> Result<Vec<f64>> {
    if model.order() == 0 {
        return Ok(model.row(0).to_vec());
    }
    let closed = closed_classes(model);
    if closed.len() > 1 {
        let examples: Vec<String> = closed
            .iter()
            .take(3)
            .map(|&c| format!("[{}]", format_context(model, c)))
            .collect();
        return Err(Error::NonErgodic(format!(
            "context chain is reducible with {} closed classes, containing contexts {}",
            closed.len(),
            examples.join(" and ")
        )));
    }

    let s = model.num_contexts();
    let size = model.alphabet().size();
    let step = |pi: &[f64], out: &mut Vec<f64>| {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (c, &mass) in pi.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let row = model.row(c);
            for b in 0..size {
                out[model.successor(c, b)] += mass * row[b];
            }
        }
    };
    let mut pi = vec![1.0 / s as f64; s];
    let mut moved = vec![0.0; s];
    let mut next = vec![0.0; s];
    let mut diff = f64::INFINITY;
    for _ in 0..MAX_POWER_ITERATIONS {
        step(&pi, &mut moved);
        diff = 0.0;
        for c in 0..s {
            next[c] = 0.5 * (pi[c] + moved[c]);
            diff += (next[c] - pi[c]).abs();
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        std::mem::swap(&mut pi, &mut next);
        if 0.5 * diff < STATIONARY_TOLERANCE {
            break;
        }
    }
    step(&pi, &mut moved);
    let residual = 0.5 * pi.iter().zip(&moved).map(|(a, b)| (a - b).abs()).sum::<f64>();
    if residual > STATIONARY_RESIDUAL {
        return Err(Error::NoConvergence {
            iterations: MAX_POWER_ITERATIONS,
            residual: residual.max(0.5 * diff),
        });
    }
    Ok(pi)
}

fn entropy_of(p: impl IntoIterator<Item = f64>) -> f64 {
    -p.into_iter().filter(|&v| v > 0.0).map(|v| v * v.ln()).sum::<f64>()
}

/// Exact conditional entropies `H_k = H(X_{k+1} | X_1^k)`, `k = 0..=k_max`,
/// in nats.
///
/// Below the order they come from the stationary block law; from the order
/// on they all equal `Σ_c π(c) H(P(.|c))`.
pub fn theoretical_entropies(model: &MarkovModel, k_max: usize) -> Result<Vec<f64>> {
    let alphabet = model.alphabet();
    let longest = k_max.min(model.order()) + 1;
    check_budget(
        &format!("|A|^{longest} block probabilities"),
        alphabet.pow(longest),
        DEFAULT_BUDGET,
    )?;
    let pi = stationary_distribution(model)?;
    let m = model.order();
    if m == 0 {
        return Ok(vec![entropy_of(pi.iter().copied()); k_max + 1]);
    }
    let size = alphabet.size();
    // Entropy of the stationary j-block law, j <= m, by marginalizing π.
    let block_entropy = |j: usize| {
        let group = size.pow((m - j) as u32);
        let mut marg = vec![0.0; size.pow(j as u32)];
        for (c, &p) in pi.iter().enumerate() {
            marg[c / group] += p;
        }
        entropy_of(marg)
    };
    let limit: f64 = pi
        .iter()
        .enumerate()
        .map(|(c, &p)| p * entropy_of(model.row(c).iter().copied()))
        .sum();
    let mut out = Vec::with_capacity(k_max + 1);
    let mut prev = 0.0;
    for k in 0..=k_max {
        if k >= m {
            out.push(limit);
        } else {
            let cur = block_entropy(k + 1);
            out.push(cur - prev);
            prev = cur;
        }
    }
    Ok(out)
}

/// Rows drawn from a symmetric Dirichlet law, or the uniform limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Concentration {
    /// The infinite-concentration limit: every row uniform.
    Uniform,
    Dirichlet {
        alpha: f64,
    },
}

/// A random order-`order` kernel: each row is an independent normalized
/// vector of `Gamma(alpha, 1)` variates drawn from a ChaCha8 stream seeded
/// with `seed`, rows in context-index order.
pub fn random_kernel(order: usize, alphabet: Alphabet, concentration: Concentration, seed: u64) -> Result<MarkovModel> {
    check_budget(&format!("|A|^{order} kernel rows"), alphabet.pow(order), DEFAULT_BUDGET)?;
    let rows_n = alphabet.pow(order) as usize;
    let size = alphabet.size();
    let rows = match concentration {
        Concentration::Uniform => vec![vec![1.0 / size as f64; size]; rows_n],
        Concentration::Dirichlet { alpha } => {
            let gamma =
                Gamma::new(alpha, 1.0).map_err(|e| Error::InvalidModel(format!("concentration {alpha}: {e}")))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rows = Vec::with_capacity(rows_n);
            for _ in 0..rows_n {
                let mut row = Vec::new();
                for _attempt in 0..64 {
                    let draw: Vec<f64> = (0..size).map(|_| gamma.sample(&mut rng)).collect();
                    let sum: f64 = draw.iter().sum();
                    if sum > 0.0 && sum.is_finite() {
                        row = draw.into_iter().map(|g| g / sum).collect();
                        break;
                    }
                }
                if row.is_empty() {
                    return Err(Error::InvalidModel(format!(
                        "concentration {alpha} too small: gamma draws underflow"
                    )));
                }
                // Push the rounding residue into the largest entry so the row
                // sums to one within tolerance.
                let residue = 1.0 - row.iter().sum::<f64>();
                let top = (0..size).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap();
                row[top] += residue;
                rows.push(row);
            }
            rows
        }
    };
    MarkovModel::new(alphabet, order, rows)
}

fn cumulative(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    p.iter()
        .map(|&v| {
            acc += v;
            acc
        })
        .collect()
}

/// Inverse-CDF draw; `u` in [0, 1).
fn draw(cum: &[f64], u: f64) -> usize {
    let i = cum.partition_point(|&c| c <= u);
    if i < cum.len() {
        return i;
    }
    // Rounding left u above the last partial sum: take the last symbol with
    // positive mass.
    (1..cum.len()).rev().find(|&j| cum[j] > cum[j - 1]).unwrap_or(0)
}

/// A stationary sample `x_1^n`.
///
/// One ChaCha8 stream seeded with `seed` drives everything: the opening
/// context is drawn from the stationary law by inverse CDF over context
/// indices, then each symbol by inverse CDF over its row, one `f64` per
/// draw.
pub fn sample_markov(model: &MarkovModel, n: usize, seed: u64) -> Result<Sequence> {
    if n == 0 {
        return Err(Error::Precondition("sample length must be positive".into()));
    }
    let pi = stationary_distribution(model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = model.alphabet().size();
    let m = model.order();
    let rows: Vec<Vec<f64>> = model.rows().map(cumulative).collect();
    let mut data = Vec::with_capacity(n);

    let mut context = 0usize;
    if m > 0 {
        context = draw(&cumulative(&pi), rng.random());
        let mut opening = vec![0; m];
        let mut c = context;
        for slot in opening.iter_mut().rev() {
            *slot = (c % size) as Symbol;
            c /= size;
        }
        data.extend(opening.into_iter().take(n));
    }
    let contexts = model.num_contexts();
    while data.len() < n {
        let s = draw(&rows[context], rng.random());
        data.push(s as Symbol);
        context = (context * size + s) % contexts;
    }
    Sequence::new(model.alphabet(), data)
}
