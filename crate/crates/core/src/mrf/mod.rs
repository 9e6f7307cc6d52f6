//! Range estimation for 2-d Markov random fields.
//!
//! The lattice is cut into non-overlapping cells of width `2k+1`
//! (`k = ℓ + r + t`), one partition per translate. Within each partition the
//! cell contents are counted, and the 2-d test statistic compares the count
//! of a full configuration on `S_k` with the count predicted by assuming the
//! inner square `S_ℓ` is independent of the outer annulus given the
//! annulus `S_{ℓ+r} ∖ S_ℓ`. The range estimate is the least `r` whose
//! statistic stays below the threshold.

mod geometry;
mod lattice;

pub use geometry::{annulus, cell_centers, cells_per_side, square, translate_shifts, Offset, SquareSpec};
pub use lattice::LatticeConfiguration;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::methods::MethodConfig;
use crate::report::{CandidateRecord, EstimationReport, Method};
use crate::seqcore::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MrfMode {
    /// `ℓ = floor(log log n)`, `0 < t < log log n`, threshold `n^{3/2}`.
    Paper,
    /// User-chosen `ℓ` and `t` values, threshold `scale · (T²)^{3/4}` with
    /// `T²` the number of cells per partition.
    #[default]
    Practical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MrfConfig {
    pub mode: MrfMode,
    /// Inner half-widths to scan (practical mode).
    pub ell: Vec<usize>,
    /// Outer thicknesses to scan (practical mode).
    pub t: Vec<usize>,
    /// Threshold multiplier (practical mode).
    pub scale: f64,
    pub r_max: usize,
}

impl Default for MrfConfig {
    fn default() -> Self {
        MrfConfig {
            mode: MrfMode::Practical,
            ell: vec![1],
            t: vec![1],
            scale: 1.0,
            r_max: 2,
        }
    }
}

impl MrfConfig {
    pub fn paper(r_max: usize) -> Self {
        MrfConfig {
            mode: MrfMode::Paper,
            r_max,
            ..Default::default()
        }
    }

    /// The `(ℓ, t)` pairs scanned on a side-`n` lattice.
    pub fn grid(&self, n: usize) -> Vec<(usize, usize)> {
        match self.mode {
            MrfMode::Paper => {
                let ll = (n as f64).ln().ln();
                let ell = if ll > 0.0 { ll.floor() as usize } else { 0 };
                let t_max = if ll > 1.0 { ll.ceil() as usize - 1 } else { 0 };
                (1..=t_max).map(|t| (ell, t)).collect()
            }
            MrfMode::Practical => self
                .ell
                .iter()
                .flat_map(|&l| self.t.iter().map(move |&t| (l, t)))
                .collect(),
        }
    }

    pub fn threshold(&self, n: usize, k: usize) -> f64 {
        match self.mode {
            MrfMode::Paper => (n as f64).powf(1.5),
            MrfMode::Practical => {
                let cells = cells_per_side(n, k) as f64;
                self.scale * (cells * cells).powf(0.75)
            }
        }
    }

    /// Candidates `r` examined: `0..=r_max`, further limited in paper mode
    /// to `r < n - 3 log log n`.
    pub fn r_limit(&self, n: usize) -> usize {
        match self.mode {
            MrfMode::Practical => self.r_max,
            MrfMode::Paper => {
                let bound = n as f64 - 3.0 * (n as f64).ln().ln();
                let below = if bound > 0.0 { bound.ceil() as usize - 1 } else { 0 };
                self.r_max.min(below)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == MrfMode::Practical {
            if self.ell.is_empty() || self.t.is_empty() {
                return Err(Error::Precondition("practical mode needs ell and t values".into()));
            }
            if self.t.contains(&0) {
                return Err(Error::Precondition("outer thickness t must be at least 1".into()));
            }
            if !(self.scale > 0.0 && self.scale.is_finite()) {
                return Err(Error::Precondition(format!("scale {} must be positive", self.scale)));
            }
        }
        Ok(())
    }
}

fn shift_of(x: &LatticeConfiguration, k: usize, translate: (usize, usize)) -> Result<(usize, usize)> {
    let (vi, vj) = translate;
    if vi == 0 || vj == 0 {
        return Err(Error::Precondition(format!("translate ({vi},{vj}) is not 1-based")));
    }
    let shift = (vi - 1, vj - 1);
    if !translate_shifts(x.side(), k)?.contains(&shift) {
        return Err(Error::Precondition(format!(
            "partition translated by ({vi},{vj}) leaves the lattice"
        )));
    }
    Ok(shift)
}

fn read(x: &LatticeConfiguration, center: (usize, usize), sites: &[Offset], out: &mut Vec<Symbol>) {
    out.clear();
    out.extend(
        sites
            .iter()
            .map(|&(di, dj)| x.get((center.0 as i32 + di) as usize, (center.1 as i32 + dj) as usize)),
    );
}

/// `N_v̄(a(Λ))`: cells of the partition translated by `translate` whose
/// contents on `Λ` match `pattern`. The translate is 1-based and may be any
/// offset that keeps the partition inside the lattice. `Λ` must be a
/// centrally symmetric subset of `S_k`.
pub fn partition_translate_count(
    x: &LatticeConfiguration,
    k: usize,
    translate: (usize, usize),
    pattern: &[(Offset, Symbol)],
) -> Result<u64> {
    let kk = k as i32;
    for &((i, j), _) in pattern {
        if i.abs() > kk || j.abs() > kk {
            return Err(Error::Precondition(format!("site ({i},{j}) outside S_{k}")));
        }
        if !pattern.iter().any(|&(w, _)| w == (-i, -j)) {
            return Err(Error::Precondition("pattern support is not centrally symmetric".into()));
        }
    }
    let shift = shift_of(x, k, translate)?;
    let sites: Vec<Offset> = pattern.iter().map(|&(w, _)| w).collect();
    let values: Vec<Symbol> = pattern.iter().map(|&(_, s)| s).collect();
    let mut buf = Vec::new();
    Ok(cell_centers(x.side(), k, shift)
        .filter(|&c| {
            read(x, c, &sites, &mut buf);
            buf == values
        })
        .count() as u64)
}

/// The 2-d statistic for one configuration `a` on `S_k` (given in the raster
/// order of [`square`]`(k)`):
/// `N(a(S_k)) - N(a(S_k∖S_ℓ)) · N(a(S_{ℓ+r})) / N(a(S_{ℓ+r}∖S_ℓ))`,
/// zero when the last count vanishes.
pub fn delta2d(x: &LatticeConfiguration, spec: SquareSpec, translate: (usize, usize), a: &[Symbol]) -> Result<f64> {
    if spec.t == 0 {
        return Err(Error::Precondition("outer thickness t must be at least 1".into()));
    }
    let k = spec.k();
    let sites = square(k);
    if a.len() != sites.len() {
        return Err(Error::Precondition(format!(
            "configuration has {} sites, S_{k} has {}",
            a.len(),
            sites.len()
        )));
    }
    let restrict = |keep: &dyn Fn(Offset) -> bool| -> Vec<(Offset, Symbol)> {
        sites
            .iter()
            .zip(a)
            .filter(|(&w, _)| keep(w))
            .map(|(&w, &s)| (w, s))
            .collect()
    };
    let inside = |w: Offset, t: usize| w.0.unsigned_abs() as usize <= t && w.1.unsigned_abs() as usize <= t;
    let (ell, mid) = (spec.ell, spec.ell + spec.r);
    let count = |p: &[(Offset, Symbol)]| partition_translate_count(x, k, translate, p);
    let denom = count(&restrict(&|w| inside(w, mid) && !inside(w, ell)))?;
    if denom == 0 {
        return Ok(0.0);
    }
    let full = count(&restrict(&|_| true))?;
    let outer = count(&restrict(&|w| !inside(w, ell)))?;
    let middle = count(&restrict(&|w| inside(w, mid)))?;
    Ok(full as f64 - outer as f64 * middle as f64 / denom as f64)
}

/// Largest `δ` over all configurations, for one translate.
///
/// Only observed full configurations are visited: an unobserved one has
/// `N(a(S_k)) = 0` and hence `δ <= 0`, while for each observed outer
/// configuration the `δ` values over inner fillings sum to zero, so the
/// observed maximum is nonnegative and is the overall maximum.
fn translate_max(x: &LatticeConfiguration, spec: SquareSpec, shift: (usize, usize)) -> f64 {
    let n = x.side();
    let k = spec.k();
    let regions = spec.regions();
    let mut interners: [FxHashMap<Vec<Symbol>, u32>; 3] = Default::default();
    let mut full: FxHashMap<[u32; 3], u64> = FxHashMap::default();
    let mut outer: FxHashMap<[u32; 2], u64> = FxHashMap::default();
    let mut middle: FxHashMap<[u32; 2], u64> = FxHashMap::default();
    let mut annulus_counts: FxHashMap<u32, u64> = FxHashMap::default();
    let mut buf = Vec::new();
    for center in cell_centers(n, k, shift) {
        let mut ids = [0u32; 3];
        for (r, sites) in regions.iter().enumerate() {
            read(x, center, sites, &mut buf);
            let next = interners[r].len() as u32;
            ids[r] = match interners[r].get(buf.as_slice()) {
                Some(&id) => id,
                None => {
                    interners[r].insert(buf.clone(), next);
                    next
                }
            };
        }
        let [inner, mid, out] = ids;
        *full.entry(ids).or_default() += 1;
        *outer.entry([mid, out]).or_default() += 1;
        *middle.entry([inner, mid]).or_default() += 1;
        *annulus_counts.entry(mid).or_default() += 1;
    }
    full.iter()
        .map(|(&[inner, mid, out], &c)| {
            c as f64 - outer[&[mid, out]] as f64 * middle[&[inner, mid]] as f64 / annulus_counts[&mid] as f64
        })
        .fold(0.0, f64::max)
}

/// `δ_{ℓ,r,t}`: the 2-d statistic maximized over configurations and
/// translates.
pub fn delta_max(x: &LatticeConfiguration, spec: SquareSpec, exec: Execution) -> Result<f64> {
    let shifts = translate_shifts(x.side(), spec.k())?;
    Ok(exec
        .map(shifts, |s| translate_max(x, spec, s))
        .into_iter()
        .fold(0.0, f64::max))
}

/// One `(ℓ, t)` term of `φ_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiTerm {
    pub spec: SquareSpec,
    pub cells_per_side: usize,
    pub value: f64,
    pub threshold: f64,
}

/// Every `(ℓ, t)` term of `φ_r` with its threshold.
pub fn phi2d_terms(x: &LatticeConfiguration, r: usize, cfg: &MrfConfig, exec: Execution) -> Result<Vec<PhiTerm>> {
    cfg.validate()?;
    let n = x.side();
    cfg.grid(n)
        .into_iter()
        .map(|(ell, t)| {
            let spec = SquareSpec::new(ell, r, t);
            let k = spec.k();
            Ok(PhiTerm {
                spec,
                cells_per_side: cells_per_side(n, k),
                value: delta_max(x, spec, exec)?,
                threshold: cfg.threshold(n, k),
            })
        })
        .collect()
}

/// `φ_r`: the largest `δ_{ℓ,r,t}` over the configured `(ℓ, t)` grid; zero
/// when the grid is empty.
pub fn phi2d(x: &LatticeConfiguration, r: usize, cfg: &MrfConfig) -> Result<f64> {
    Ok(phi2d_terms(x, r, cfg, Execution::default())?
        .iter()
        .map(|t| t.value)
        .fold(0.0, f64::max))
}

/// `R* = min{r <= r_max : φ_r <= threshold}`, or the side length when no
/// candidate passes.
///
/// A candidate passes when every `(ℓ, t)` term is within its own threshold.
/// The record shows the term closest to (or furthest past) its threshold.
pub fn estimate_range(x: &LatticeConfiguration, cfg: &MrfConfig) -> Result<EstimationReport> {
    estimate_range_with(x, cfg, Execution::default())
}

pub fn estimate_range_with(x: &LatticeConfiguration, cfg: &MrfConfig, exec: Execution) -> Result<EstimationReport> {
    cfg.validate()?;
    let n = x.side();
    let mut records = Vec::new();
    for r in 0..=cfg.r_limit(n) {
        let terms = phi2d_terms(x, r, cfg, exec)?;
        let record = match terms
            .iter()
            .max_by(|a, b| (a.value / a.threshold).total_cmp(&(b.value / b.threshold)))
        {
            Some(binding) => CandidateRecord {
                candidate: r,
                statistic: binding.value,
                threshold: Some(binding.threshold),
                passed: terms.iter().all(|t| t.value <= t.threshold),
                flags: Vec::new(),
            },
            None => CandidateRecord {
                candidate: r,
                statistic: 0.0,
                threshold: Some(cfg.threshold(n, r)),
                passed: true,
                flags: vec!["empty_t_range".into()],
            },
        };
        let passed = record.passed;
        records.push(record);
        if passed {
            break;
        }
    }
    Ok(EstimationReport::from_candidates(
        Method::Mrf,
        n,
        MethodConfig::Mrf(cfg.clone()),
        records,
    ))
}
