//! Occupancy grids, target regions and seeded random instances.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Occupancy of the stationary trap array.
///
/// `moved` marks atoms that have already been transported by an earlier
/// move; it is only ever set on occupied sites.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OccupancyGrid {
    rows: usize,
    cols: usize,
    occupied: Vec<bool>,
    moved: Vec<bool>,
}

impl OccupancyGrid {
    pub fn empty(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Grid(format!("grid must be at least 1x1, got {rows}x{cols}")));
        }
        Ok(Self {
            rows,
            cols,
            occupied: vec![false; rows * cols],
            moved: vec![false; rows * cols],
        })
    }

    pub fn full(rows: usize, cols: usize) -> Result<Self> {
        let mut grid = Self::empty(rows, cols)?;
        grid.occupied.fill(true);
        Ok(grid)
    }

    /// Builds a grid from nested rows. All rows must have equal, non-zero length.
    pub fn from_rows<R: AsRef<[bool]>>(rows: &[R]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut grid = Self::empty(height, width)?;
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != width {
                return Err(Error::Grid(format!(
                    "row {r} has {} entries, expected {width}",
                    row.len()
                )));
            }
            for (c, &v) in row.iter().enumerate() {
                grid.occupied[r * width + c] = v;
            }
        }
        Ok(grid)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_occupied(&self, row: usize, col: usize) -> bool {
        self.occupied[row * self.cols + col]
    }

    #[inline]
    pub fn is_moved(&self, row: usize, col: usize) -> bool {
        self.moved[row * self.cols + col]
    }

    pub fn set_occupied(&mut self, row: usize, col: usize, value: bool) {
        let i = row * self.cols + col;
        self.occupied[i] = value;
        if !value {
            self.moved[i] = false;
        }
    }

    /// Marks an occupied site as already transported.
    ///
    /// # Panics
    /// If the site is empty.
    pub fn mark_moved(&mut self, row: usize, col: usize) {
        let i = row * self.cols + col;
        assert!(self.occupied[i], "cannot mark empty site ({row},{col}) as moved");
        self.moved[i] = true;
    }

    pub(crate) fn place_moved_atom(&mut self, row: usize, col: usize) {
        let i = row * self.cols + col;
        self.occupied[i] = true;
        self.moved[i] = true;
    }

    pub fn total_atoms(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    pub fn row_iter(&self, row: usize) -> impl Iterator<Item = bool> + '_ {
        self.occupied[row * self.cols..(row + 1) * self.cols].iter().copied()
    }

    /// Rows and columns swapped; the moved marks travel with their atoms.
    pub fn transposed(&self) -> Self {
        let mut out = Self {
            rows: self.cols,
            cols: self.rows,
            occupied: vec![false; self.occupied.len()],
            moved: vec![false; self.moved.len()],
        };
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.occupied[c * self.rows + r] = self.occupied[r * self.cols + c];
                out.moved[c * self.rows + r] = self.moved[r * self.cols + c];
            }
        }
        out
    }
}

/// Returns the number of occupied sites.
pub fn total_atoms(grid: &OccupancyGrid) -> usize {
    grid.total_atoms()
}

/// Rectangular subarray that has to end up fully occupied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TargetRegion {
    pub row_offset: usize,
    pub col_offset: usize,
    pub height: usize,
    pub width: usize,
}

impl TargetRegion {
    pub fn new(row_offset: usize, col_offset: usize, height: usize, width: usize) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Config(format!(
                "target region must be at least 1x1, got {height}x{width}"
            )));
        }
        Ok(Self { row_offset, col_offset, height, width })
    }

    /// Region of the given size centred in a grid; odd slack leans towards lower indices.
    pub fn centered(rows: usize, cols: usize, height: usize, width: usize) -> Result<Self> {
        let region = Self::new(
            rows.saturating_sub(height) / 2,
            cols.saturating_sub(width) / 2,
            height,
            width,
        )?;
        region.check_fits(rows, cols)?;
        Ok(region)
    }

    pub fn check_fits(&self, rows: usize, cols: usize) -> Result<()> {
        if self.row_offset + self.height > rows || self.col_offset + self.width > cols {
            return Err(Error::RegionOutOfBounds {
                row_offset: self.row_offset,
                col_offset: self.col_offset,
                height: self.height,
                width: self.width,
                rows,
                cols,
            });
        }
        Ok(())
    }

    #[inline]
    pub fn area(&self) -> usize {
        self.height * self.width
    }

    #[inline]
    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.contains_row(row) && self.contains_col(col)
    }

    #[inline]
    pub fn contains_row(&self, row: usize) -> bool {
        row >= self.row_offset && row < self.row_offset + self.height
    }

    #[inline]
    pub fn contains_col(&self, col: usize) -> bool {
        col >= self.col_offset && col < self.col_offset + self.width
    }

    pub fn row_range(&self) -> std::ops::Range<usize> {
        self.row_offset..self.row_offset + self.height
    }

    pub fn col_range(&self) -> std::ops::Range<usize> {
        self.col_offset..self.col_offset + self.width
    }

    pub fn transposed(&self) -> Self {
        Self {
            row_offset: self.col_offset,
            col_offset: self.row_offset,
            height: self.width,
            width: self.height,
        }
    }
}

/// Number of empty sites inside `region`.
pub fn count_target_vacancies(grid: &OccupancyGrid, region: &TargetRegion) -> usize {
    region
        .row_range()
        .map(|r| region.col_range().filter(|&c| !grid.is_occupied(r, c)).count())
        .sum()
}

/// Parameters of one square benchmark instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    /// Number of target sites.
    pub target_atoms: usize,
    /// Ratio between total and target side length.
    pub ratio: f64,
    /// Per-site loading probability.
    pub fill: f64,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(target_atoms: usize, ratio: f64, fill: f64, seed: u64) -> Result<Self> {
        let spec = Self { target_atoms, ratio, fill, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_atoms == 0 {
            return Err(Error::Config("target atom count must be positive".into()));
        }
        if self.ratio.is_nan() || self.ratio < 1.0 || !self.ratio.is_finite() {
            return Err(Error::Config(format!("ratio must be a finite value >= 1, got {}", self.ratio)));
        }
        if !(0.0..=1.0).contains(&self.fill) {
            return Err(Error::Config(format!("fill ratio must lie in [0, 1], got {}", self.fill)));
        }
        Ok(())
    }

    /// ⌈√n_t⌉, computed in integers.
    pub fn target_side(&self) -> usize {
        ceil_sqrt(self.target_atoms)
    }

    /// ⌈√n_t · r⌉.
    pub fn total_side(&self) -> usize {
        total_side(self.target_atoms, self.ratio)
    }
}

pub(crate) fn ceil_sqrt(n: usize) -> usize {
    let mut s = (n as f64).sqrt() as usize;
    while s * s > n {
        s -= 1;
    }
    while s * s < n {
        s += 1;
    }
    s
}

/// ⌈√n · ratio⌉ with a small guard so products like `10 * 1.1` are not
/// pushed past an integer by rounding error.
pub fn total_side(target_atoms: usize, ratio: f64) -> usize {
    let exact = (target_atoms as f64).sqrt() * ratio;
    let side = (exact - 1e-9).ceil().max(1.0) as usize;
    side.max(ceil_sqrt(target_atoms))
}

/// Maps a 64-bit draw onto [0, 1) using its top 53 bits.
#[inline]
pub(crate) fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws a square instance. Sites are filled row-major, one ChaCha8 draw per
/// site, occupied iff the draw is below the fill ratio.
pub fn random_grid(spec: &InstanceSpec) -> Result<(OccupancyGrid, TargetRegion)> {
    spec.validate()?;
    let side = spec.total_side();
    let target = spec.target_side();
    let mut grid = OccupancyGrid::empty(side, side)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for r in 0..side {
        for c in 0..side {
            if unit_f64(rng.next_u64()) < spec.fill {
                grid.set_occupied(r, c, true);
            }
        }
    }
    let region = TargetRegion::centered(side, side, target, target)?;
    Ok((grid, region))
}
