//! Adaptive dyadic quadrature over boxes with hard exclusion of a sublevel
//! tube around the variety.
//!
//! Midpoint rule on the included cells. Cells whose corners straddle the
//! tube boundary are refined down to the depth limit and then excluded, so
//! integrals of nonnegative weights are under-estimates near the tube —
//! conservative for one-sided inequality checks.

use crate::error::{Error, Result};
use crate::scalar::{r, Real};
use crate::strata::TubeSpec;

pub const MAX_CELLS: usize = 1 << 22;
pub const MAX_DEPTH: u32 = 12;
pub const MAX_DIM: usize = 4;
/// Uniform subdivision floor; refinement beyond it is driven by the tube
/// boundary or by integrand variation, up to `depth`.
pub const BASE_LEVEL: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    Included,
    Excluded,
    Refined,
}

#[derive(Debug, Clone)]
pub struct Cell<R: Real> {
    pub center: Vec<R>,
    pub half: Vec<R>,
    pub status: CellStatus,
}

impl<R: Real> Cell<R> {
    pub fn volume(&self) -> R {
        self.half
            .iter()
            .fold(r::<R>(1.0), |acc, &h| acc * (h + h))
    }

    fn corners(&self) -> Vec<Vec<R>> {
        let n = self.center.len();
        (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|d| {
                        if mask >> d & 1 == 1 {
                            self.center[d] + self.half[d]
                        } else {
                            self.center[d] - self.half[d]
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct QuadratureGrid<R: Real> {
    pub bounds: Vec<(R, R)>,
    pub depth: u32,
    cells: Vec<Cell<R>>,
    exclusion: Option<TubeSpec<R>>,
}

/// Builds the grid. Cells fully inside the exclusion tube are dropped;
/// cells crossing its boundary are refined to `depth` and then dropped.
/// When `variation` is given, cells where the integrand varies more than
/// the threshold are refined as well (and kept at max depth).
pub fn build_grid<R: Real>(
    bounds: &[(R, R)],
    exclusion: Option<&TubeSpec<R>>,
    depth: u32,
    variation: Option<(R, &dyn Fn(&[R]) -> R)>,
) -> Result<QuadratureGrid<R>> {
    build_grid_near(bounds, exclusion, depth, variation, None)
}

/// `build_grid` with an extra refinement driver: cells straddling the
/// `refine_near` tube boundary are subdivided to `depth` but kept, so thin
/// transition slivers are resolved without being excluded.
pub fn build_grid_near<R: Real>(
    bounds: &[(R, R)],
    exclusion: Option<&TubeSpec<R>>,
    depth: u32,
    variation: Option<(R, &dyn Fn(&[R]) -> R)>,
    refine_near: Option<&TubeSpec<R>>,
) -> Result<QuadratureGrid<R>> {
    if bounds.len() > MAX_DIM {
        return Err(Error::Invalid(format!(
            "dimension {} exceeds the cap {MAX_DIM}",
            bounds.len()
        )));
    }
    if depth > MAX_DEPTH {
        return Err(Error::Invalid(format!(
            "depth {depth} exceeds the cap {MAX_DEPTH}"
        )));
    }
    let root = Cell {
        center: bounds
            .iter()
            .map(|&(lo, hi)| (lo + hi) / r(2.0))
            .collect(),
        half: bounds
            .iter()
            .map(|&(lo, hi)| (hi - lo) / r(2.0))
            .collect(),
        status: CellStatus::Included,
    };
    let mut grid = QuadratureGrid {
        bounds: bounds.to_vec(),
        depth,
        cells: Vec::new(),
        exclusion: exclusion.cloned(),
    };
    subdivide(&mut grid, root, 0, exclusion, depth, &variation, refine_near)?;
    Ok(grid)
}

enum TubeClass {
    Inside,
    Outside,
    Mixed,
}

fn classify_tube<R: Real>(cell: &Cell<R>, tube: &TubeSpec<R>) -> TubeClass {
    let mut inside = 0usize;
    let mut total = 1usize;
    if tube.contains(&cell.center) {
        inside += 1;
    }
    for corner in cell.corners() {
        total += 1;
        if tube.contains(&corner) {
            inside += 1;
        }
    }
    if inside == 0 {
        TubeClass::Outside
    } else if inside == total {
        TubeClass::Inside
    } else {
        TubeClass::Mixed
    }
}

#[allow(clippy::too_many_arguments)]
fn subdivide<R: Real>(
    grid: &mut QuadratureGrid<R>,
    cell: Cell<R>,
    level: u32,
    exclusion: Option<&TubeSpec<R>>,
    depth: u32,
    variation: &Option<(R, &dyn Fn(&[R]) -> R)>,
    refine_near: Option<&TubeSpec<R>>,
) -> Result<()> {
    if grid.cells.len() >= MAX_CELLS {
        return Err(Error::CellBudget {
            cells: grid.cells.len(),
            depth: level,
        });
    }
    let tube_class = match exclusion {
        Some(tube) => classify_tube(&cell, tube),
        None => TubeClass::Outside,
    };
    match tube_class {
        TubeClass::Inside => {
            grid.cells.push(Cell {
                status: CellStatus::Excluded,
                ..cell
            });
            return Ok(());
        }
        TubeClass::Mixed => {
            if level >= depth {
                // Conservative: boundary cells are dropped, never counted.
                grid.cells.push(Cell {
                    status: CellStatus::Excluded,
                    ..cell
                });
                return Ok(());
            }
            return split(grid, cell, level, exclusion, depth, variation, refine_near);
        }
        TubeClass::Outside => {}
    }
    if level < depth.min(BASE_LEVEL) {
        return split(grid, cell, level, exclusion, depth, variation, refine_near);
    }
    if level < depth {
        if let Some(near) = refine_near {
            if matches!(classify_tube(&cell, near), TubeClass::Mixed | TubeClass::Inside) {
                return split(grid, cell, level, exclusion, depth, variation, refine_near);
            }
        }
        if let Some((threshold, f)) = variation {
            let mut lo = f(&cell.center);
            let mut hi = lo;
            for corner in cell.corners() {
                let v = f(&corner);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if hi - lo > *threshold {
                return split(grid, cell, level, exclusion, depth, variation, refine_near);
            }
        }
    }
    grid.cells.push(Cell {
        status: CellStatus::Included,
        ..cell
    });
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn split<R: Real>(
    grid: &mut QuadratureGrid<R>,
    cell: Cell<R>,
    level: u32,
    exclusion: Option<&TubeSpec<R>>,
    depth: u32,
    variation: &Option<(R, &dyn Fn(&[R]) -> R)>,
    refine_near: Option<&TubeSpec<R>>,
) -> Result<()> {
    let n = cell.center.len();
    let children: Vec<Cell<R>> = (0..1usize << n)
        .map(|mask| {
            let half: Vec<R> = cell.half.iter().map(|&h| h / r(2.0)).collect();
            let center: Vec<R> = (0..n)
                .map(|d| {
                    if mask >> d & 1 == 1 {
                        cell.center[d] + half[d]
                    } else {
                        cell.center[d] - half[d]
                    }
                })
                .collect();
            Cell {
                center,
                half,
                status: CellStatus::Included,
            }
        })
        .collect();
    grid.cells.push(Cell {
        status: CellStatus::Refined,
        ..cell
    });
    for child in children {
        subdivide(grid, child, level + 1, exclusion, depth, variation, refine_near)?;
    }
    Ok(())
}

impl<R: Real> QuadratureGrid<R> {
    pub fn cells(&self) -> &[Cell<R>] {
        &self.cells
    }

    pub fn included_cells(&self) -> impl Iterator<Item = &Cell<R>> {
        self.cells
            .iter()
            .filter(|c| c.status == CellStatus::Included)
    }

    pub fn included_volume(&self) -> R {
        self.included_cells()
            .fold(r::<R>(0.0), |acc, c| acc + c.volume())
    }

    pub fn exclusion(&self) -> Option<&TubeSpec<R>> {
        self.exclusion.as_ref()
    }

    /// Same box and depth, no exclusion tube, no adaptive refinement.
    pub fn without_exclusion(&self) -> QuadratureGrid<R> {
        build_grid(&self.bounds, None, self.depth, None)
            .expect("plain rebuild keeps the budget")
    }

    /// Midpoint-rule integral of `f` over the included cells.
    pub fn integrate(&self, f: &dyn Fn(&[R]) -> R) -> Result<R> {
        let mut acc = r::<R>(0.0);
        for cell in self.included_cells() {
            let v = f(&cell.center);
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand(format!("{:?}", cell.center)));
            }
            acc = acc + v * cell.volume();
        }
        Ok(acc)
    }

    /// Debug dump: one line per cell.
    pub fn dump_cells_csv(&self) -> String {
        let mut out = String::from("status,center,half\n");
        for c in &self.cells {
            let status = match c.status {
                CellStatus::Included => "included",
                CellStatus::Excluded => "excluded",
                CellStatus::Refined => "refined",
            };
            let fmt = |v: &[R]| {
                v.iter()
                    .map(|x| format!("{x}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            out.push_str(&format!("{status},{},{}\n", fmt(&c.center), fmt(&c.half)));
        }
        out
    }
}
