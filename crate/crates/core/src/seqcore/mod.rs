//! Sequences over a finite alphabet, overlapping block counts and the
//! empirical (conditional) probabilities and entropies built on them.
//!
//! Positions follow the usual 1-indexed convention in the docs: `x_1^n` is
//! the whole sequence and `N_n(a_1^k)` counts the windows
//! `i in [0, n-k]` with `x_{i+1}^{i+k} = a_1^k`. Storage is 0-indexed.

mod blocks;
mod entropy;

pub use blocks::{count_blocks, BlockCountTable, BlockStats};
pub use entropy::{cond_empirical_entropy, empirical_cond_prob, empirical_prob, occurrences};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Symbol = u32;

/// A finite alphabet `{0, .., size-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size > u32::MAX as usize {
            return Err(Error::Alphabet { size, min: 1 });
        }
        Ok(Alphabet(size))
    }

    pub fn size(self) -> usize {
        self.0
    }

    /// Bits needed to store one symbol (at least one).
    pub fn bits_per_symbol(self) -> u32 {
        let bits = usize::BITS - (self.0 - 1).leading_zeros();
        bits.max(1)
    }

    /// Estimators need at least two symbols to say anything.
    pub fn require_estimable(self) -> Result<()> {
        if self.0 < 2 {
            return Err(Error::Alphabet { size: self.0, min: 2 });
        }
        Ok(())
    }

    /// `size^exp`, saturating, for memory-budget checks.
    pub fn pow(self, exp: usize) -> u128 {
        let mut acc: u128 = 1;
        for _ in 0..exp {
            acc = acc.saturating_mul(self.0 as u128);
        }
        acc
    }
}

/// The observed string `x_1^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sequence {
    alphabet: Alphabet,
    data: Vec<Symbol>,
}

impl Sequence {
    pub fn new(alphabet: Alphabet, data: Vec<Symbol>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some((position, &symbol)) = data.iter().enumerate().find(|(_, &s)| s as usize >= alphabet.size()) {
            return Err(Error::SymbolOutOfRange {
                symbol,
                position,
                size: alphabet.size(),
            });
        }
        Ok(Sequence { alphabet, data })
    }

    /// Maps textual labels to dense symbols in order of first appearance.
    /// Returns the sequence and the label of each symbol.
    pub fn from_labels<I, S>(labels: I) -> Result<(Self, Vec<String>)>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut index = std::collections::HashMap::new();
        let mut names = Vec::new();
        let mut data = Vec::new();
        for label in labels {
            let label = label.as_ref();
            let next = names.len() as Symbol;
            let sym = *index.entry(label.to_owned()).or_insert_with(|| {
                names.push(label.to_owned());
                next
            });
            data.push(sym);
        }
        let alphabet = Alphabet::new(names.len().max(1))?;
        Ok((Sequence::new(alphabet, data)?, names))
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.data
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.data
    }

    /// `x_1^m` as a new sequence.
    pub fn prefix(&self, m: usize) -> Result<Sequence> {
        if m == 0 || m > self.len() {
            return Err(Error::Precondition(format!(
                "prefix length {m} not in 1..={}",
                self.len()
            )));
        }
        Ok(Sequence {
            alphabet: self.alphabet,
            data: self.data[..m].to_vec(),
        })
    }

    /// Applies the symbol permutation `perm` (symbol `s` becomes `perm[s]`).
    pub fn relabel(&self, perm: &[Symbol]) -> Result<Sequence> {
        check_permutation(perm, self.alphabet.size())?;
        let data = self.data.iter().map(|&s| perm[s as usize]).collect();
        Ok(Sequence {
            alphabet: self.alphabet,
            data,
        })
    }
}

pub(crate) fn check_permutation(perm: &[Symbol], size: usize) -> Result<()> {
    if perm.len() != size {
        return Err(Error::Precondition(format!(
            "permutation has {} entries for alphabet of size {size}",
            perm.len()
        )));
    }
    let mut seen = vec![false; size];
    for &p in perm {
        let p = p as usize;
        if p >= size || seen[p] {
            return Err(Error::Precondition("not a permutation".into()));
        }
        seen[p] = true;
    }
    Ok(())
}
