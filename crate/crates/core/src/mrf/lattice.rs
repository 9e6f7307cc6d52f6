use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqcore::{Alphabet, Symbol};

/// An `n × n` configuration `x(Λ_n)`, stored row-major with 0-based
/// indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeConfiguration {
    alphabet: Alphabet,
    side: usize,
    grid: Vec<Symbol>,
}

impl LatticeConfiguration {
    pub fn new(alphabet: Alphabet, side: usize, grid: Vec<Symbol>) -> Result<Self> {
        if side == 0 || grid.len() != side * side {
            return Err(Error::Precondition(format!(
                "grid of {} sites is not a nonempty {side}×{side} square",
                grid.len()
            )));
        }
        if let Some(pos) = grid.iter().position(|&s| s as usize >= alphabet.size()) {
            return Err(Error::SymbolOutOfRange {
                symbol: grid[pos],
                position: pos,
                size: alphabet.size(),
            });
        }
        Ok(LatticeConfiguration { alphabet, side, grid })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn grid(&self) -> &[Symbol] {
        &self.grid
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Symbol {
        self.grid[row * self.side + col]
    }

    fn map_sites(&self, f: impl Fn(usize, usize) -> (usize, usize)) -> Self {
        let n = self.side;
        let mut grid = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                let (a, b) = f(i, j);
                grid[a * n + b] = self.get(i, j);
            }
        }
        LatticeConfiguration {
            alphabet: self.alphabet,
            side: n,
            grid,
        }
    }

    /// Quarter turn clockwise.
    pub fn rotate90(&self) -> Self {
        let n = self.side;
        self.map_sites(|i, j| (j, n - 1 - i))
    }

    pub fn transpose(&self) -> Self {
        self.map_sites(|i, j| (j, i))
    }

    /// Fraction of horizontally or vertically adjacent pairs (on the torus)
    /// holding equal symbols.
    pub fn neighbor_agreement(&self) -> f64 {
        let n = self.side;
        let mut same = 0usize;
        for i in 0..n {
            for j in 0..n {
                let s = self.get(i, j);
                same += usize::from(s == self.get(i, (j + 1) % n));
                same += usize::from(s == self.get((i + 1) % n, j));
            }
        }
        same as f64 / (2 * n * n) as f64
    }
}
