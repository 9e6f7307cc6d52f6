//! Integer geometry: centred squares `S_t` of width `2t+1`, square annuli,
//! and the translated partitions of a sub-square into cells of width `2k+1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Offset from a cell centre, `(row, column)`.
pub type Offset = (i32, i32);

/// `S_t`, in raster order.
pub fn square(t: usize) -> Vec<Offset> {
    let t = t as i32;
    (-t..=t).flat_map(|i| (-t..=t).map(move |j| (i, j))).collect()
}

/// `S_outer ∖ S_inner`, in raster order. Empty when `outer <= inner`.
pub fn annulus(inner: usize, outer: usize) -> Vec<Offset> {
    let inner = inner as i32;
    square(outer)
        .into_iter()
        .filter(|&(i, j)| i.abs() > inner || j.abs() > inner)
        .collect()
}

/// Nested squares `S_ℓ ⊆ S_{ℓ+r} ⊆ S_k` with `k = ℓ + r + t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareSpec {
    pub ell: usize,
    pub r: usize,
    pub t: usize,
}

impl SquareSpec {
    pub fn new(ell: usize, r: usize, t: usize) -> Self {
        SquareSpec { ell, r, t }
    }

    pub fn k(&self) -> usize {
        self.ell + self.r + self.t
    }

    /// The three disjoint pieces of `S_k`: inner square, the annulus of
    /// thickness `r` around it, and the outer annulus of thickness `t`.
    pub fn regions(&self) -> [Vec<Offset>; 3] {
        let mid = self.ell + self.r;
        [square(self.ell), annulus(self.ell, mid), annulus(mid, self.k())]
    }
}

/// `T = ceil(n / (2k+1)) - 1`, the number of cells per side.
pub fn cells_per_side(n: usize, k: usize) -> usize {
    let width = 2 * k + 1;
    n.div_ceil(width).saturating_sub(1)
}

/// The translated partitions available for width `2k+1` on a side-`n`
/// lattice: 0-based shifts `o` per axis with the whole partition of
/// `Λ_{(2k+1)T}`, shifted by `o`, inside the lattice, i.e.
/// `0 <= o <= n - (2k+1)T`. The set is closed under reflection.
pub fn translate_shifts(n: usize, k: usize) -> Result<Vec<(usize, usize)>> {
    let width = 2 * k + 1;
    let t = cells_per_side(n, k);
    if t == 0 {
        return Err(Error::LatticeTooSmall { side: n, width });
    }
    let span = n - width * t;
    Ok((0..=span).flat_map(|a| (0..=span).map(move |b| (a, b))).collect())
}

/// 0-based centres of the `T²` cells of the partition shifted by `shift`.
pub fn cell_centers(n: usize, k: usize, shift: (usize, usize)) -> impl Iterator<Item = (usize, usize)> {
    let width = 2 * k + 1;
    let t = cells_per_side(n, k);
    (0..t).flat_map(move |a| (0..t).map(move |b| (shift.0 + a * width + k, shift.1 + b * width + k)))
}
