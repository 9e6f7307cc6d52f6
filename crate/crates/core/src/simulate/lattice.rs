use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mrf::LatticeConfiguration;
use crate::seqcore::{Alphabet, Symbol};

fn default_alphabet() -> usize {
    2
}

fn default_sweeps() -> usize {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatticeModel {
    /// Independent sites drawn from `probs`; range 0.
    Iid { probs: Vec<f64> },
    /// Nearest-neighbour Potts field on the torus,
    /// `P(x_v = a | rest) ∝ exp(2 · coupling · #{w ~ v : x_w = a})`.
    /// With two symbols this is the Ising model at inverse temperature
    /// `coupling`. Sampled by raster-order single-site Gibbs sweeps, so the
    /// output only approximates the field.
    NearestNeighborGibbs {
        #[serde(default = "default_alphabet")]
        alphabet: usize,
        coupling: f64,
        #[serde(default = "default_sweeps")]
        sweeps: usize,
    },
}

impl LatticeModel {
    pub fn alphabet(&self) -> Result<Alphabet> {
        match self {
            LatticeModel::Iid { probs } => Alphabet::new(probs.len()),
            LatticeModel::NearestNeighborGibbs { alphabet, .. } => Alphabet::new(*alphabet),
        }
    }

    pub fn declared_range(&self) -> usize {
        match self {
            LatticeModel::Iid { .. } => 0,
            LatticeModel::NearestNeighborGibbs { coupling, .. } => usize::from(*coupling != 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LatticeModel::Iid { probs } => {
                let sum: f64 = probs.iter().sum();
                if probs.is_empty() || probs.iter().any(|p| !p.is_finite() || *p < 0.0) || (sum - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidModel(format!("site law {probs:?} is not a distribution")));
                }
            }
            LatticeModel::NearestNeighborGibbs {
                alphabet,
                coupling,
                sweeps,
            } => {
                if *alphabet < 2 {
                    return Err(Error::InvalidModel("gibbs field needs at least two symbols".into()));
                }
                if !coupling.is_finite() {
                    return Err(Error::InvalidModel("coupling must be finite".into()));
                }
                if *sweeps == 0 {
                    return Err(Error::InvalidModel("at least one sweep is required".into()));
                }
            }
        }
        Ok(())
    }
}

/// Samples an `n × n` configuration from a ChaCha8 stream seeded with `seed`.
pub fn sample_lattice(model: &LatticeModel, n: usize, seed: u64) -> Result<LatticeConfiguration> {
    if n < 8 {
        return Err(Error::Precondition(format!("lattice side {n} below 8")));
    }
    model.validate()?;
    let alphabet = model.alphabet()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = match model {
        LatticeModel::Iid { probs } => {
            let mut acc = 0.0;
            let cum: Vec<f64> = probs
                .iter()
                .map(|p| {
                    acc += p;
                    acc
                })
                .collect();
            (0..n * n)
                .map(|_| {
                    let u: f64 = rng.random();
                    let i = cum.partition_point(|&c| c <= u).min(cum.len() - 1);
                    // Never emit a zero-probability symbol because of rounding.
                    let i = (0..=i)
                        .rev()
                        .find(|&j| probs[j] > 0.0)
                        .unwrap_or_else(|| probs.iter().position(|&p| p > 0.0).unwrap());
                    i as Symbol
                })
                .collect()
        }
        &LatticeModel::NearestNeighborGibbs {
            alphabet: size,
            coupling,
            sweeps,
        } => gibbs(n, size, coupling, sweeps, &mut rng),
    };
    LatticeConfiguration::new(alphabet, n, grid)
}

fn gibbs(n: usize, size: usize, coupling: f64, sweeps: usize, rng: &mut ChaCha8Rng) -> Vec<Symbol> {
    let mut grid: Vec<Symbol> = (0..n * n).map(|_| rng.random_range(0..size as Symbol)).collect();
    // weight[c] = exp(2 J c) for c agreeing neighbours.
    let weight: Vec<f64> = (0..=4).map(|c| (2.0 * coupling * c as f64).exp()).collect();
    // Binary fast path: P(1 | c ones among 4 neighbours).
    let p_one: Vec<f64> = (0..=4).map(|c| weight[c] / (weight[c] + weight[4 - c])).collect();
    let mut agree = vec![0usize; size];
    let mut w = vec![0.0; size];
    for _ in 0..sweeps {
        for i in 0..n {
            let up = (i + n - 1) % n * n;
            let down = (i + 1) % n * n;
            let row = i * n;
            for j in 0..n {
                let left = (j + n - 1) % n;
                let right = (j + 1) % n;
                let nbrs = [grid[up + j], grid[down + j], grid[row + left], grid[row + right]];
                let u: f64 = rng.random();
                grid[row + j] = if size == 2 {
                    let ones = nbrs.iter().filter(|&&s| s == 1).count();
                    Symbol::from(u < p_one[ones])
                } else {
                    agree.iter_mut().for_each(|a| *a = 0);
                    for &s in &nbrs {
                        agree[s as usize] += 1;
                    }
                    let mut total = 0.0;
                    for a in 0..size {
                        w[a] = weight[agree[a]];
                        total += w[a];
                    }
                    let mut target = u * total;
                    let mut pick = size - 1;
                    for (a, &wa) in w.iter().enumerate() {
                        if target < wa {
                            pick = a;
                            break;
                        }
                        target -= wa;
                    }
                    pick as Symbol
                };
            }
        }
    }
    grid
}
