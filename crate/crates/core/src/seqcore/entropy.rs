use super::{BlockStats, Sequence, Symbol};
use crate::error::{Error, Result};

/// `N_m(block)` over `x_1^m`, by direct scan.
pub fn occurrences(symbols: &[Symbol], block: &[Symbol]) -> u64 {
    if block.is_empty() {
        return symbols.len() as u64 + 1;
    }
    symbols.windows(block.len()).filter(|w| *w == block).count() as u64
}

fn check_block(x: &Sequence, a: &[Symbol]) -> Result<()> {
    if a.is_empty() || a.len() > x.len() {
        return Err(Error::Precondition(format!(
            "block length {} not in 1..={}",
            a.len(),
            x.len()
        )));
    }
    if let Some(&s) = a.iter().find(|&&s| s as usize >= x.alphabet().size()) {
        return Err(Error::SymbolOutOfRange {
            symbol: s,
            position: 0,
            size: x.alphabet().size(),
        });
    }
    Ok(())
}

/// `P̂_n(a_1^{k+1}) = N_n(a_1^{k+1}) / (n - k)` for a block `a` of length `k+1`.
pub fn empirical_prob(x: &Sequence, a: &[Symbol]) -> Result<f64> {
    check_block(x, a)?;
    let k = a.len() - 1;
    Ok(occurrences(x.symbols(), a) as f64 / (x.len() - k) as f64)
}

/// `P̂_n(a_{k+1} | a_1^k) = N_n(a_1^{k+1}) / N_{n-1}(a_1^k)`.
///
/// `None` when the context never occurs in `x_1^{n-1}`; callers decide what
/// an undefined conditional means for them.
pub fn empirical_cond_prob(x: &Sequence, a: &[Symbol]) -> Result<Option<f64>> {
    check_block(x, a)?;
    let k = a.len() - 1;
    let denom = occurrences(&x.symbols()[..x.len() - 1], &a[..k]);
    if denom == 0 {
        return Ok(None);
    }
    Ok(Some(occurrences(x.symbols(), a) as f64 / denom as f64))
}

/// `ĥ_k(n) = -Σ P̂_n(a_1^{k+1}) log P̂_n(a_{k+1} | a_1^k)` in nats, summed over
/// observed blocks only.
pub fn cond_empirical_entropy(x: &Sequence, k: usize) -> Result<f64> {
    if k + 1 > x.len() {
        return Err(Error::InsufficientData {
            needed: k + 1,
            n: x.len(),
        });
    }
    BlockStats::new(x, k + 1).cond_entropy(k)
}
