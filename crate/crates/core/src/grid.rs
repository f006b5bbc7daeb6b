//! Uniform grids on `[a, b)`, piecewise-constant grid functions, and the
//! dyadic tree of subintervals.
//!
//! A grid with `n = 2^J` cells carries samples at the cell midpoints
//! `a + (i + ½) h`. Every integral is the exact sum `Σ values[i]·h` over
//! cells, so a grid function is identified with the step function it
//! samples.

use std::io::{Read, Write};
use std::ops::Range;

use crate::error::{CzError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid1D {
    a: f64,
    b: f64,
    n: usize,
}

impl UniformGrid1D {
    /// Grid on `[a, b)` with `n` cells; `n` must be a power of two, `n ≥ 2`.
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(CzError::Config(format!("grid needs finite a < b, got [{a}, {b})")));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(CzError::Config(format!("cell count must be a power of two >= 2, got {n}")));
        }
        Ok(Self { a, b, n })
    }

    pub fn with_levels(a: f64, b: f64, levels: u32) -> Result<Self> {
        if levels == 0 || levels > 30 {
            return Err(CzError::Config(format!("grid depth must be in 1..=30, got {levels}")));
        }
        Self::new(a, b, 1usize << levels)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Depth `J` of the dyadic tree (`n = 2^J`).
    pub fn levels(&self) -> u32 {
        self.n.trailing_zeros()
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self, i: usize) -> f64 {
        self.a + (i as f64 + 0.5) * self.h()
    }

    pub fn midpoints(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.midpoint(i)).collect()
    }

    /// Index of the cell containing `x`, clamped to the grid.
    pub fn cell_of(&self, x: f64) -> usize {
        let k = ((x - self.a) / self.h()).floor();
        if k < 0.0 {
            0
        } else {
            (k as usize).min(self.n - 1)
        }
    }

    /// Cells whose midpoints lie in `[lo, hi)`.
    pub fn cells_in(&self, lo: f64, hi: f64) -> CellRange {
        let h = self.h();
        let first = ((lo - self.a) / h - 0.5).ceil().max(0.0) as usize;
        let end = (((hi - self.a) / h - 0.5).ceil().max(0.0) as usize).min(self.n);
        CellRange::new(first.min(end), end)
    }

    pub fn root(&self) -> DyadicInterval {
        DyadicInterval { gen: 0, idx: 0 }
    }

    pub fn full_range(&self) -> CellRange {
        CellRange::new(0, self.n)
    }

    pub fn same_as(&self, other: &UniformGrid1D) -> bool {
        self == other
    }
}

/// A grid-aligned half-open run of cells `start..end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellRange {
    pub start: usize,
    pub end: usize,
}

impl CellRange {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn contains(&self, i: usize) -> bool {
        self.start <= i && i < self.end
    }

    pub fn as_range(&self) -> Range<usize> {
        self.start..self.end
    }

    pub fn measure(&self, grid: &UniformGrid1D) -> f64 {
        self.len() as f64 * grid.h()
    }
}

/// Node `(gen, idx)` of the dyadic tree over the grid domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct DyadicInterval {
    pub gen: u32,
    pub idx: usize,
}

/// Result of [`DyadicInterval::dilate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dilation {
    pub cells: CellRange,
    pub clamped: bool,
}

impl DyadicInterval {
    pub fn new(gen: u32, idx: usize) -> Result<Self> {
        if gen >= usize::BITS || idx >= (1usize << gen) {
            return Err(CzError::Domain(format!("index {idx} out of range for generation {gen}")));
        }
        Ok(Self { gen, idx })
    }

    fn check(&self, grid: &UniformGrid1D) -> Result<()> {
        if self.gen > grid.levels() {
            return Err(CzError::Resolution { gen: self.gen, depth: grid.levels() });
        }
        Ok(())
    }

    /// Cells covered by this interval.
    pub fn cells(&self, grid: &UniformGrid1D) -> Result<CellRange> {
        self.check(grid)?;
        let width = grid.len() >> self.gen;
        Ok(CellRange::new(self.idx * width, (self.idx + 1) * width))
    }

    /// Endpoints `[lo, hi)` in domain coordinates.
    pub fn bounds(&self, grid: &UniformGrid1D) -> (f64, f64) {
        let w = grid.length() / (1u64 << self.gen) as f64;
        (grid.a() + self.idx as f64 * w, grid.a() + (self.idx + 1) as f64 * w)
    }

    pub fn children(&self) -> (DyadicInterval, DyadicInterval) {
        (
            DyadicInterval { gen: self.gen + 1, idx: 2 * self.idx },
            DyadicInterval { gen: self.gen + 1, idx: 2 * self.idx + 1 },
        )
    }

    pub fn parent(&self) -> Option<DyadicInterval> {
        (self.gen > 0).then(|| DyadicInterval { gen: self.gen - 1, idx: self.idx / 2 })
    }

    pub fn is_leaf(&self, grid: &UniformGrid1D) -> bool {
        self.gen == grid.levels()
    }

    /// Smallest run of cells containing the concentric `factor`-fold dilate,
    /// clamped to the domain.
    pub fn dilate(&self, grid: &UniformGrid1D, factor: f64) -> Result<Dilation> {
        self.check(grid)?;
        if !(factor >= 1.0) {
            return Err(CzError::Domain(format!("dilation factor must be >= 1, got {factor}")));
        }
        let c = self.cells(grid)?;
        // cell units: center and half-width of the dilate
        let center = 0.5 * (c.start + c.end) as f64;
        let half = 0.5 * factor * c.len() as f64;
        let lo = (center - half).floor();
        let hi = (center + half).ceil();
        let clamped = lo < 0.0 || hi > grid.len() as f64;
        let start = lo.max(0.0) as usize;
        let end = (hi.min(grid.len() as f64)) as usize;
        Ok(Dilation { cells: CellRange::new(start, end), clamped })
    }

    /// All dyadic intervals of the tree, root first, by generation.
    pub fn all(grid: &UniformGrid1D) -> impl Iterator<Item = DyadicInterval> {
        let depth = grid.levels();
        (0..=depth).flat_map(|gen| (0..(1usize << gen)).map(move |idx| DyadicInterval { gen, idx }))
    }
}

/// Real samples on a [`UniformGrid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: UniformGrid1D,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: UniformGrid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(CzError::GridMismatch(format!("{} values for {} cells", values.len(), grid.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(CzError::Domain(format!("non-finite value {} at cell {i}", values[i])));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: UniformGrid1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.midpoint(i))).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: UniformGrid1D, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.len()])
    }

    pub fn zeros(grid: UniformGrid1D) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    /// Indicator of the cells whose midpoints lie in `[lo, hi)`.
    pub fn indicator(grid: UniformGrid1D, lo: f64, hi: f64) -> Self {
        let r = grid.cells_in(lo, hi);
        let values = (0..grid.len()).map(|i| if r.contains(i) { 1.0 } else { 0.0 }).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &UniformGrid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn abs(&self) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v.abs()).collect() }
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(CzError::GridMismatch("operands live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&x, &y)| f(x, y)).collect();
        Self::new(self.grid, values)
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn mul(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |x, y| x * y)
    }

    pub fn div(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |x, y| x / y)
    }

    /// Exact midpoint-rule integral over a run of cells.
    pub fn integral_over(&self, r: CellRange) -> f64 {
        self.values[r.as_range()].iter().sum::<f64>() * self.grid.h()
    }

    pub fn integral(&self) -> f64 {
        self.integral_over(self.grid.full_range())
    }

    /// Signed average over a run of cells.
    pub fn average_over(&self, r: CellRange) -> f64 {
        if r.is_empty() {
            return 0.0;
        }
        self.values[r.as_range()].iter().sum::<f64>() / r.len() as f64
    }

    /// Signed average over a dyadic interval.
    pub fn average(&self, q: DyadicInterval) -> Result<f64> {
        Ok(self.average_over(q.cells(&self.grid)?))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(Σ |f|^p · weight · h)^{1/p}`; `weight = None` is Lebesgue measure.
    pub fn lp_norm(&self, p: f64, weight: Option<&GridFunction>) -> f64 {
        let h = self.grid.h();
        let s: f64 = match weight {
            Some(w) => self.values.iter().zip(w.values()).map(|(v, wv)| v.abs().powf(p) * wv).sum(),
            None => self.values.iter().map(|v| v.abs().powf(p)).sum(),
        };
        (s * h).powf(1.0 / p)
    }

    /// Linear interpolation between midpoints (constant beyond the outer ones).
    pub fn interpolate(&self, x: f64) -> f64 {
        let h = self.grid.h();
        let s = (x - self.grid.a()) / h - 0.5;
        if s <= 0.0 {
            return self.values[0];
        }
        let last = self.len() - 1;
        if s >= last as f64 {
            return self.values[last];
        }
        let i = s.floor() as usize;
        let frac = s - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    /// CSV with header `x,value`, one row per cell midpoint.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "value"])?;
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([format_float(self.grid.midpoint(i)), format_float(*v)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the `x,value` CSV format. The grid is reconstructed from the
    /// midpoints, so the rows must be equally spaced and a power of two long.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "value" {
            return Err(CzError::Io(format!("expected header `x,value`, got {:?}", headers)));
        }
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| CzError::Io(format!("bad number {s:?}: {e}")));
            xs.push(parse(&rec[0])?);
            vs.push(parse(&rec[1])?);
        }
        if xs.len() < 2 {
            return Err(CzError::Io("need at least two rows".into()));
        }
        let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        for (i, x) in xs.iter().enumerate() {
            if (x - (xs[0] + i as f64 * h)).abs() > 1e-9 * h.abs().max(1.0) {
                return Err(CzError::Io(format!("row {i}: abscissae are not equally spaced")));
            }
        }
        let grid = UniformGrid1D::new(xs[0] - 0.5 * h, xs[xs.len() - 1] + 0.5 * h, xs.len())?;
        Self::new(grid, vs)
    }
}

/// Shortest round-trip decimal representation.
pub fn format_float(v: f64) -> String {
    format!("{v:?}")
}

/// Prefix sums of a sequence, for O(1) interval sums.
#[derive(Debug, Clone)]
pub struct PrefixSums {
    acc: Vec<f64>,
}

impl PrefixSums {
    pub fn new(values: &[f64]) -> Self {
        let mut acc = Vec::with_capacity(values.len() + 1);
        let mut s = 0.0;
        acc.push(0.0);
        for v in values {
            s += v;
            acc.push(s);
        }
        Self { acc }
    }

    /// Sum over `start..end`.
    #[inline]
    pub fn sum(&self, start: usize, end: usize) -> f64 {
        self.acc[end] - self.acc[start]
    }

    #[inline]
    pub fn mean(&self, start: usize, end: usize) -> f64 {
        self.sum(start, end) / (end - start) as f64
    }
}
