//! Suprema over intervals containing each cell.
//!
//! Every maximal operator in the crate has the shape
//! `Mf(x) = sup_{Q ∋ x} V(Q)` for some interval functional `V`. The drivers
//! here enumerate the admissible intervals for a [`IntervalMode`] and fold
//! the values into the per-cell supremum without materializing the
//! `O(n²)` table.

use serde::{Deserialize, Serialize};

use crate::grid::CellRange;

/// Family of intervals a supremum ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntervalMode {
    /// Every grid-aligned run of cells.
    #[serde(rename = "all-intervals")]
    AllIntervals,
    /// Nodes of the dyadic tree.
    #[serde(rename = "dyadic")]
    Dyadic,
}

/// Largest grid for which [`IntervalMode::default_for`] picks all intervals.
pub const ALL_INTERVALS_MAX_CELLS: usize = 1 << 10;

impl IntervalMode {
    pub fn default_for(n: usize) -> Self {
        if n <= ALL_INTERVALS_MAX_CELLS {
            IntervalMode::AllIntervals
        } else {
            IntervalMode::Dyadic
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            IntervalMode::AllIntervals => "all-intervals",
            IntervalMode::Dyadic => "dyadic",
        }
    }
}

impl std::fmt::Display for IntervalMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for IntervalMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all-intervals" | "all" => Ok(IntervalMode::AllIntervals),
            "dyadic" => Ok(IntervalMode::Dyadic),
            other => Err(format!("unknown interval mode {other:?} (expected all-intervals or dyadic)")),
        }
    }
}

/// `out[x] = max_{Q ∋ x, Q ∩ window ≠ ∅} value(Q)` for `x` in `window`
/// (other cells are left at `-∞`). `value` receives half-open cell ranges.
///
/// In all-intervals mode the calls for a fixed start arrive with increasing
/// end, which lets callers keep running state per row.
pub(crate) fn sup_containing(
    n: usize,
    mode: IntervalMode,
    window: CellRange,
    mut value: impl FnMut(CellRange) -> f64,
) -> Vec<f64> {
    let mut out = vec![f64::NEG_INFINITY; n];
    match mode {
        IntervalMode::AllIntervals => {
            let mut row = vec![f64::NEG_INFINITY; n];
            for start in 0..window.end {
                let first_last = start.max(window.start);
                for last in first_last..n {
                    row[last] = value(CellRange::new(start, last + 1));
                }
                fold_row(&mut out, &row, start, window);
            }
        }
        IntervalMode::Dyadic => {
            let depth = n.trailing_zeros();
            for gen in 0..=depth {
                let width = n >> gen;
                for idx in 0..(1usize << gen) {
                    let r = CellRange::new(idx * width, (idx + 1) * width);
                    if r.end <= window.start || r.start >= window.end {
                        continue;
                    }
                    let v = value(r);
                    for x in r.start.max(window.start)..r.end.min(window.end) {
                        if v > out[x] {
                            out[x] = v;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Folds one all-intervals row (`row[last]` = value of `start..=last`) into
/// the running per-cell supremum via a suffix maximum.
pub(crate) fn fold_row(out: &mut [f64], row: &[f64], start: usize, window: CellRange) {
    let n = out.len();
    let first_last = start.max(window.start);
    let mut best = f64::NEG_INFINITY;
    for x in (first_last..n).rev() {
        if row[x] > best {
            best = row[x];
        }
        if x < window.end && best > out[x] {
            out[x] = best;
        }
    }
}
