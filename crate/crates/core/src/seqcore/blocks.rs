use std::sync::OnceLock;

use rustc_hash::FxHashMap;

use super::{Alphabet, Sequence, Symbol};
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Packed tables at or below this many key bits are counted into a dense
/// array first.
const DENSE_KEY_BITS: u32 = 16;

#[derive(Debug, Clone)]
enum Store {
    /// Blocks packed base-2^bits into a `u64`, first symbol most significant.
    Packed(FxHashMap<u64, u64>),
    Wide(FxHashMap<Box<[Symbol]>, u64>),
}

/// Overlapping counts `N_m(a_1^k)` of every observed `k`-block in `x_1^m`,
/// where `m` is the table's `window_end`.
///
/// Unobserved blocks are absent. Iteration order is deterministic for a given
/// input.
#[derive(Debug, Clone)]
pub struct BlockCountTable {
    k: usize,
    window_end: usize,
    bits: u32,
    store: Store,
}

/// `N_n(a_1^k)` over the whole sequence.
///
/// `k = 0` is accepted and counts the empty block, which occurs `n + 1` times.
pub fn count_blocks(x: &Sequence, k: usize) -> Result<BlockCountTable> {
    BlockCountTable::over_prefix(x, k, x.len())
}

impl BlockCountTable {
    /// Counts `k`-blocks of `x_1^{window_end}`.
    pub fn over_prefix(x: &Sequence, k: usize, window_end: usize) -> Result<Self> {
        if window_end > x.len() {
            return Err(Error::Precondition(format!(
                "window end {window_end} beyond sequence length {}",
                x.len()
            )));
        }
        if k > window_end {
            return Err(Error::EmptyTable { k, n: window_end });
        }
        Ok(Self::build(&x.symbols()[..window_end], x.alphabet(), k))
    }

    fn build(data: &[Symbol], alphabet: Alphabet, k: usize) -> Self {
        let bits = alphabet.bits_per_symbol();
        let window_end = data.len();
        let key_bits = k as u64 * bits as u64;
        let store = if k == 0 {
            let mut map = FxHashMap::default();
            map.insert(0, window_end as u64 + 1);
            Store::Packed(map)
        } else if key_bits <= DENSE_KEY_BITS as u64 {
            Store::Packed(count_dense(data, k, bits))
        } else if key_bits <= 64 {
            Store::Packed(count_packed(data, k, bits))
        } else {
            let mut map: FxHashMap<Box<[Symbol]>, u64> = FxHashMap::default();
            for w in data.windows(k) {
                match map.get_mut(w) {
                    Some(c) => *c += 1,
                    None => {
                        map.insert(w.into(), 1);
                    }
                }
            }
            Store::Wide(map)
        };
        BlockCountTable {
            k,
            window_end,
            bits,
            store,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The `m` in `N_m`: counts cover windows inside `x_1^m`.
    pub fn window_end(&self) -> usize {
        self.window_end
    }

    /// Number of windows, `m - k + 1`; equals the sum of all counts.
    pub fn windows(&self) -> usize {
        self.window_end - self.k + 1
    }

    /// Number of distinct observed blocks.
    pub fn distinct(&self) -> usize {
        match &self.store {
            Store::Packed(m) => m.len(),
            Store::Wide(m) => m.len(),
        }
    }

    /// Count of `block`; zero when unobserved or of the wrong length.
    pub fn count(&self, block: &[Symbol]) -> u64 {
        if block.len() != self.k {
            return 0;
        }
        match &self.store {
            Store::Packed(m) => m.get(&pack(block, self.bits)).copied().unwrap_or(0),
            Store::Wide(m) => m.get(block).copied().unwrap_or(0),
        }
    }

    /// Visits every observed block with its count.
    pub fn for_each<F: FnMut(&[Symbol], u64)>(&self, mut f: F) {
        match &self.store {
            Store::Packed(m) => {
                let mut buf = vec![0; self.k];
                for (&key, &c) in m {
                    unpack_into(key, self.bits, &mut buf);
                    f(&buf, c);
                }
            }
            Store::Wide(m) => {
                for (block, &c) in m {
                    f(block, c);
                }
            }
        }
    }

    /// Observed blocks with counts, sorted lexicographically.
    pub fn to_sorted_vec(&self) -> Vec<(Vec<Symbol>, u64)> {
        let mut out = Vec::with_capacity(self.distinct());
        self.for_each(|b, c| out.push((b.to_vec(), c)));
        out.sort_unstable();
        out
    }
}

fn pack(block: &[Symbol], bits: u32) -> u64 {
    block.iter().fold(0u64, |key, &s| (key << bits) | s as u64)
}

fn unpack_into(key: u64, bits: u32, out: &mut [Symbol]) {
    let mask = (1u64 << bits) - 1;
    let k = out.len();
    for (j, slot) in out.iter_mut().enumerate() {
        let shift = bits as usize * (k - 1 - j);
        *slot = ((key >> shift) & mask) as Symbol;
    }
}

fn key_mask(k: usize, bits: u32) -> u64 {
    let total = k as u32 * bits;
    if total >= 64 {
        u64::MAX
    } else {
        (1u64 << total) - 1
    }
}

/// Rolling keys over all windows; `f` sees each window's key.
fn for_each_key<F: FnMut(u64)>(data: &[Symbol], k: usize, bits: u32, mut f: F) {
    if data.len() < k {
        return;
    }
    let mask = key_mask(k, bits);
    let mut key = pack(&data[..k - 1], bits);
    for &s in &data[k - 1..] {
        key = ((key << bits) | s as u64) & mask;
        f(key);
    }
}

fn count_dense(data: &[Symbol], k: usize, bits: u32) -> FxHashMap<u64, u64> {
    let mut dense = vec![0u64; 1usize << (k as u32 * bits)];
    for_each_key(data, k, bits, |key| dense[key as usize] += 1);
    dense
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(key, &c)| (key as u64, c))
        .collect()
}

fn count_packed(data: &[Symbol], k: usize, bits: u32) -> FxHashMap<u64, u64> {
    let mut map = FxHashMap::default();
    for_each_key(data, k, bits, |key| *map.entry(key).or_insert(0) += 1);
    map
}

/// Lazily built block tables for one sequence, for block lengths
/// `0..=max_len`.
///
/// `full(j)` holds `N_n` over `x_1^n`; `trimmed(j)` holds `N_{n-1}` over
/// `x_1^{n-1}`, the denominators of the empirical conditional probabilities.
/// Tables are built at most once and may be shared across threads.
pub struct BlockStats<'a> {
    seq: &'a Sequence,
    full: Vec<OnceLock<BlockCountTable>>,
    trimmed: Vec<OnceLock<BlockCountTable>>,
}

impl<'a> BlockStats<'a> {
    pub fn new(seq: &'a Sequence, max_len: usize) -> Self {
        let max_len = max_len.min(seq.len());
        BlockStats {
            seq,
            full: (0..=max_len).map(|_| OnceLock::new()).collect(),
            trimmed: (0..=max_len).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn sequence(&self) -> &'a Sequence {
        self.seq
    }

    pub fn n(&self) -> usize {
        self.seq.len()
    }

    pub fn max_len(&self) -> usize {
        self.full.len() - 1
    }

    fn slot(&self, j: usize, trimmed: bool) -> Result<&BlockCountTable> {
        let end = if trimmed { self.n() - 1 } else { self.n() };
        let cells = if trimmed { &self.trimmed } else { &self.full };
        let cell = cells.get(j).ok_or_else(|| {
            Error::Precondition(format!(
                "block length {j} beyond the prepared maximum {}",
                self.max_len()
            ))
        })?;
        if j > end {
            return Err(Error::EmptyTable { k: j, n: end });
        }
        Ok(cell.get_or_init(|| BlockCountTable::build(&self.seq.symbols()[..end], self.seq.alphabet(), j)))
    }

    /// `N_n(.)` for blocks of length `j`.
    pub fn full(&self, j: usize) -> Result<&BlockCountTable> {
        self.slot(j, false)
    }

    /// `N_{n-1}(.)` for blocks of length `j`.
    pub fn trimmed(&self, j: usize) -> Result<&BlockCountTable> {
        self.slot(j, true)
    }

    /// Builds the listed tables up front, in parallel when requested.
    pub fn prefetch(&self, lengths: std::ops::RangeInclusive<usize>, exec: Execution) {
        let jobs: Vec<(usize, bool)> = lengths.flat_map(|j| [(j, false), (j, true)]).collect();
        exec.map(jobs, |(j, trimmed)| {
            let _ = self.slot(j, trimmed);
        });
    }

    /// `ĥ_k(n)`, the k-step conditional empirical entropy in nats.
    pub fn cond_entropy(&self, k: usize) -> Result<f64> {
        let n = self.n();
        if k + 1 > n {
            return Err(Error::InsufficientData { needed: k + 1, n });
        }
        let joint = self.full(k + 1)?;
        let context = self.trimmed(k)?;
        let norm = (n - k) as f64;
        let mut h = 0.0;
        joint.for_each(|block, c| {
            let denom = context.count(&block[..k]);
            debug_assert!(denom >= c);
            let c = c as f64;
            h -= c / norm * (c / denom as f64).ln();
        });
        // Clamp away rounding noise; the exact value lies in [0, log|A|].
        Ok(h.max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(size: usize, data: &[u32]) -> Sequence {
        Sequence::new(Alphabet::new(size).unwrap(), data.to_vec()).unwrap()
    }

    #[test]
    fn abab_pairs() {
        let t = count_blocks(&seq(2, &[0, 1, 0, 1]), 2).unwrap();
        assert_eq!(t.to_sorted_vec(), vec![(vec![0, 1], 2), (vec![1, 0], 1)]);
        assert_eq!(t.windows(), 3);
    }

    #[test]
    fn constant_singletons() {
        let t = count_blocks(&seq(2, &[0, 0, 0, 0]), 1).unwrap();
        assert_eq!(t.to_sorted_vec(), vec![(vec![0], 4)]);
    }

    #[test]
    fn empty_block_counts_all_windows() {
        let t = count_blocks(&seq(2, &[0, 1, 1]), 0).unwrap();
        assert_eq!(t.count(&[]), 4);
        assert_eq!(t.windows(), 4);
    }

    #[test]
    fn too_long_block_is_an_error() {
        assert!(matches!(
            count_blocks(&seq(2, &[0, 1]), 3),
            Err(Error::EmptyTable { k: 3, n: 2 })
        ));
    }

    #[test]
    fn all_storage_paths_agree() {
        // 3 bits per symbol: k=5 dense, k=10 packed, k=30 wide.
        let data: Vec<u32> = (0..400u32).map(|i| (i * i + i / 7) % 5).collect();
        let x = seq(5, &data);
        for k in [5, 10, 21, 22, 30] {
            let t = count_blocks(&x, k).unwrap();
            let mut naive = std::collections::BTreeMap::new();
            for w in data.windows(k) {
                *naive.entry(w.to_vec()).or_insert(0u64) += 1;
            }
            assert_eq!(t.to_sorted_vec(), naive.into_iter().collect::<Vec<_>>(), "k={k}");
        }
    }

    #[test]
    fn stats_respect_bounds() {
        let x = seq(2, &[0, 1, 1]);
        let stats = BlockStats::new(&x, 3);
        assert!(stats.full(3).is_ok());
        assert!(matches!(stats.trimmed(3), Err(Error::EmptyTable { .. })));
        assert!(matches!(stats.cond_entropy(3), Err(Error::InsufficientData { .. })));
    }
}
