//! Grid scans over free initial data, island extraction and boundary
//! refinement.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::feasibility::{is_feasible, FeasibilityError, FeasibilityVerdict};
use crate::matrices::{build, MatrixError, MatrixKind};
use crate::potentials::{free_initial_schema, InitialName, PotentialError, ValidatedPotential};
use crate::recursion::{gen_one_var, gen_two_var, InitialData, RecursionError};
use crate::scalar::{usize_to, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScanError {
    #[error("invalid scan configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("could not build worker pool: {0}")]
    WorkerPool(String),
}

/// Why a single grid point has no verdict.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PointError {
    #[error(transparent)]
    Recursion(#[from] RecursionError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
}

impl PointError {
    /// Short stable code for tabular output.
    pub fn code(&self) -> &'static str {
        match self {
            PointError::Recursion(RecursionError::Overflow { .. }) => "overflow",
            PointError::Recursion(RecursionError::DegenerateRecursion(_)) => "degenerate",
            PointError::Recursion(_) => "recursion",
            PointError::Matrix(_) => "matrix",
            PointError::Feasibility(_) => "numerical-failure",
        }
    }
}

/// One scan axis: `lo, lo + step, …` up to `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis<T> {
    pub name: InitialName,
    pub lo: T,
    pub hi: T,
    pub step: T,
}

impl<T: Real> GridAxis<T> {
    pub fn new(name: InitialName, lo: T, hi: T, step: T) -> Self {
        Self { name, lo, hi, step }
    }

    /// Number of grid values, `floor((hi - lo) / step) + 1` with a small
    /// allowance so that `hi` itself is included when it sits on the grid.
    pub fn count(&self) -> usize {
        let span = (self.hi - self.lo) / self.step;
        (span + T::lit(1e-9)).floor().to_usize().unwrap_or(0) + 1
    }

    pub fn value(&self, i: usize) -> T {
        self.lo + usize_to::<T>(i) * self.step
    }
}

impl<T: Real> Serialize for GridAxis<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("GridAxis", 5)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("lo", &self.lo.to_f64_lossy())?;
        st.serialize_field("hi", &self.hi.to_f64_lossy())?;
        st.serialize_field("step", &self.step.to_f64_lossy())?;
        st.serialize_field("count", &self.count())?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig<T> {
    pub potential: ValidatedPotential<T>,
    pub matrix_kind: MatrixKind,
    pub depth: usize,
    pub grid: Vec<GridAxis<T>>,
    pub tol: T,
    /// Bisection iterations per island face; `None` disables refinement.
    pub refine_iters: Option<u32>,
}

/// Points beyond this count are refused rather than silently scanned.
pub const MAX_GRID_POINTS: usize = 50_000_000;

impl<T: Real> ScanConfig<T> {
    /// Scan config with the default tolerance and no refinement.
    pub fn new(
        potential: ValidatedPotential<T>,
        matrix_kind: MatrixKind,
        depth: usize,
        grid: Vec<GridAxis<T>>,
    ) -> Self {
        Self {
            potential,
            matrix_kind,
            depth,
            grid,
            tol: T::lit(crate::feasibility::DEFAULT_TOL),
            refine_iters: None,
        }
    }

    pub fn validate(&self) -> Result<(), ScanError> {
        let schema = free_initial_schema(&self.potential);
        schema.require_scannable(self.potential.family())?;
        let bad = |msg: String| Err(ScanError::InvalidConfig(msg));
        if !self.potential.matrix_kinds().contains(&self.matrix_kind) {
            return bad(format!(
                "matrix kind {} is not available for the {} family",
                self.matrix_kind,
                self.potential.family()
            ));
        }
        if self.grid.len() != schema.entries.len() {
            return bad(format!(
                "grid has {} axes but the family has {} free initial data",
                self.grid.len(),
                schema.entries.len()
            ));
        }
        for (axis, entry) in self.grid.iter().zip(&schema.entries) {
            if axis.name != entry.name {
                return bad(format!("axis `{}` given where `{}` was expected", axis.name, entry.name));
            }
            if !(axis.step > T::zero()) || !axis.step.is_finite() {
                return bad(format!("axis `{}`: step must be positive", axis.name));
            }
            if !(axis.lo < axis.hi) || !axis.hi.is_finite() || !axis.lo.is_finite() {
                return bad(format!("axis `{}`: need lo < hi", axis.name));
            }
        }
        if !(self.tol > T::zero()) {
            return bad("tolerance must be positive".to_string());
        }
        if self.depth == 0 || self.depth > 10 {
            return bad(format!("depth {} outside 1..=10", self.depth));
        }
        let total = self
            .grid
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.count()));
        match total {
            Some(t) if t <= MAX_GRID_POINTS => Ok(()),
            _ => bad("grid is too large".to_string()),
        }
    }

    pub fn shape(&self) -> Vec<usize> {
        self.grid.iter().map(GridAxis::count).collect()
    }

    pub fn names(&self) -> Vec<InitialName> {
        self.grid.iter().map(|a| a.name).collect()
    }

    /// Recursion → matrix → positivity at one point of initial data.
    pub fn evaluate(&self, coords: &[T]) -> Result<FeasibilityVerdict<T>, PointError> {
        let init = InitialData::from_coords(&self.names(), coords);
        let k = self.depth;
        let table = if self.matrix_kind.is_two_op() {
            gen_two_var(&self.potential, &init, k)?
        } else {
            gen_one_var(&self.potential, &init, 2 * k as i32)?
        };
        let m = build(&table, self.matrix_kind, k)?;
        Ok(is_feasible(&m, self.tol)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord<T> {
    pub index: Vec<usize>,
    pub coords: Vec<T>,
    pub verdict: Result<FeasibilityVerdict<T>, PointError>,
}

impl<T: Real> PointRecord<T> {
    pub fn feasible(&self) -> bool {
        matches!(&self.verdict, Ok(v) if v.feasible)
    }
}

/// Status of one island face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaceStatus {
    /// Bound at grid resolution.
    Grid,
    /// Tightened by bisection.
    Refined,
    /// The island reaches the end of the scan window on this face.
    UnboundedAtGridEdge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Face<T> {
    /// Bound value; the outer end of the bracket around the boundary.
    pub bound: T,
    /// Width of the bracket that contains the boundary.
    pub bracket: T,
    pub status: FaceStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisExtent<T> {
    /// Smallest and largest feasible grid coordinate.
    pub min_point: T,
    pub max_point: T,
    pub lo: Face<T>,
    pub hi: Face<T>,
}

impl<T: Real> AxisExtent<T> {
    pub fn width(&self) -> T {
        self.hi.bound - self.lo.bound
    }

    pub fn contains(&self, x: T) -> bool {
        self.lo.bound <= x && x <= self.hi.bound
    }
}

/// Connected component of feasible grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct Island<T> {
    /// Ordinal by ascending minimum of the first axis; not an energy level.
    pub label: usize,
    /// Flat indices of the member points, ascending.
    pub points: Vec<usize>,
    pub extent: Vec<AxisExtent<T>>,
    /// Width exceeds ten times the median island width along the first axis.
    pub may_contain_multiple_levels: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleRegion<T> {
    pub kind: MatrixKind,
    pub depth: usize,
    pub axes: Vec<GridAxis<T>>,
    /// Every grid point in row-major order (last axis fastest).
    pub points: Vec<PointRecord<T>>,
    pub islands: Vec<Island<T>>,
}

impl<T: Real> FeasibleRegion<T> {
    pub fn feasible_count(&self) -> usize {
        self.points.iter().filter(|p| p.feasible()).count()
    }

    pub fn feasible_mask(&self) -> Vec<bool> {
        self.points.iter().map(PointRecord::feasible).collect()
    }
}

fn unflatten(mut flat: usize, shape: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for a in (0..shape.len()).rev() {
        idx[a] = flat % shape[a];
        flat /= shape[a];
    }
    idx
}

fn flatten(idx: &[usize], shape: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (&i, &n)| acc * n + i)
}

/// Evaluates every grid point. With `workers = Some(n)` the scan runs on a
/// dedicated pool of `n` threads; otherwise on the global rayon pool. The
/// result is independent of the worker count.
pub fn scan<T: Real>(config: &ScanConfig<T>, workers: Option<usize>) -> Result<FeasibleRegion<T>, ScanError> {
    config.validate()?;
    let shape = config.shape();
    let total: usize = shape.iter().product();
    let eval = |flat: usize| {
        let index = unflatten(flat, &shape);
        let coords: Vec<T> = index
            .iter()
            .zip(&config.grid)
            .map(|(&i, axis)| axis.value(i))
            .collect();
        let verdict = config.evaluate(&coords);
        PointRecord {
            index,
            coords,
            verdict,
        }
    };
    let points: Vec<PointRecord<T>> = match workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| ScanError::WorkerPool(e.to_string()))?;
            pool.install(|| (0..total).into_par_iter().map(eval).collect())
        }
        None => (0..total).into_par_iter().map(eval).collect(),
    };
    let islands = extract_islands(&config.grid, &points);
    Ok(FeasibleRegion {
        kind: config.matrix_kind,
        depth: config.depth,
        axes: config.grid.clone(),
        points,
        islands,
    })
}

/// Groups feasible points into components under axis-aligned adjacency and
/// labels them by ascending minimum first-axis coordinate.
pub fn extract_islands<T: Real>(axes: &[GridAxis<T>], points: &[PointRecord<T>]) -> Vec<Island<T>> {
    let shape: Vec<usize> = axes.iter().map(GridAxis::count).collect();
    let mask: Vec<bool> = points.iter().map(PointRecord::feasible).collect();
    if mask.len() != shape.iter().product::<usize>() {
        return Vec::new();
    }
    let mut seen = vec![false; mask.len()];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut members = Vec::new();
        while let Some(p) = queue.pop_front() {
            members.push(p);
            let idx = unflatten(p, &shape);
            for a in 0..shape.len() {
                for up in [false, true] {
                    let mut nb = idx.clone();
                    if up {
                        if nb[a] + 1 >= shape[a] {
                            continue;
                        }
                        nb[a] += 1;
                    } else {
                        if nb[a] == 0 {
                            continue;
                        }
                        nb[a] -= 1;
                    }
                    let f = flatten(&nb, &shape);
                    if mask[f] && !seen[f] {
                        seen[f] = true;
                        queue.push_back(f);
                    }
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    let min_first = |c: &Vec<usize>| c.iter().map(|&p| unflatten(p, &shape)[0]).min().unwrap_or(0);
    components.sort_by_key(|c| (min_first(c), c[0]));

    let half = T::lit(0.5);
    let mut islands: Vec<Island<T>> = components
        .into_iter()
        .enumerate()
        .map(|(label, members)| {
            let extent = (0..shape.len())
                .map(|a| {
                    let (lo_i, hi_i) = members.iter().fold((usize::MAX, 0), |(lo, hi), &p| {
                        let i = unflatten(p, &shape)[a];
                        (lo.min(i), hi.max(i))
                    });
                    let axis = &axes[a];
                    let face = |i: usize, sign: T, at_edge: bool| Face {
                        bound: axis.value(i) + sign * half * axis.step,
                        bracket: axis.step,
                        status: if at_edge {
                            FaceStatus::UnboundedAtGridEdge
                        } else {
                            FaceStatus::Grid
                        },
                    };
                    AxisExtent {
                        min_point: axis.value(lo_i),
                        max_point: axis.value(hi_i),
                        lo: face(lo_i, -T::one(), lo_i == 0),
                        hi: face(hi_i, T::one(), hi_i + 1 == shape[a]),
                    }
                })
                .collect();
            Island {
                label,
                points: members,
                extent,
                may_contain_multiple_levels: false,
            }
        })
        .collect();

    if islands.len() >= 2 {
        let mut widths: Vec<T> = islands.iter().map(|i| i.extent[0].width()).collect();
        widths.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let median = widths[widths.len() / 2];
        for island in &mut islands {
            island.may_contain_multiple_levels = island.extent[0].width() > T::lit(10.0) * median;
        }
    }
    islands
}

/// Tightens every face of `island` by bisecting between its outermost
/// feasible point and the infeasible neighbour beyond it, holding the other
/// coordinates fixed. Faces at the grid edge are left marked as such; a face
/// whose bisection hits an evaluation error keeps its grid bound.
pub fn refine_boundary<T: Real>(
    config: &ScanConfig<T>,
    region: &FeasibleRegion<T>,
    island: &Island<T>,
) -> Island<T> {
    let iters = config.refine_iters.unwrap_or(0);
    let shape: Vec<usize> = region.axes.iter().map(GridAxis::count).collect();
    let mut out = island.clone();
    if iters == 0 {
        return out;
    }
    let half = T::lit(0.5);
    for a in 0..shape.len() {
        for upper in [false, true] {
            let face = if upper { out.extent[a].hi } else { out.extent[a].lo };
            if face.status == FaceStatus::UnboundedAtGridEdge {
                continue;
            }
            // outermost member along this axis, lowest flat index on ties
            let pick = island
                .points
                .iter()
                .copied()
                .map(|p| (p, unflatten(p, &shape)))
                .fold(None::<(usize, Vec<usize>)>, |best, (p, idx)| match best {
                    None => Some((p, idx)),
                    Some((bp, bidx)) => {
                        let better = if upper { idx[a] > bidx[a] } else { idx[a] < bidx[a] };
                        if better {
                            Some((p, idx))
                        } else {
                            Some((bp, bidx))
                        }
                    }
                });
            let Some((p, _)) = pick else { continue };
            let base = region.points[p].coords.clone();
            let step = region.axes[a].step;
            let mut inside = base[a];
            let mut outside = if upper { inside + step } else { inside - step };
            let mut ok = true;
            for _ in 0..iters {
                let mid = (inside + outside) * half;
                let mut coords = base.clone();
                coords[a] = mid;
                match config.evaluate(&coords) {
                    Ok(v) if v.feasible => inside = mid,
                    Ok(_) => outside = mid,
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let refined = Face {
                    bound: outside,
                    bracket: (outside - inside).abs(),
                    status: FaceStatus::Refined,
                };
                if upper {
                    out.extent[a].hi = refined;
                } else {
                    out.extent[a].lo = refined;
                }
            }
        }
    }
    out
}

impl<T: Real> Serialize for Face<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Face", 3)?;
        st.serialize_field("bound", &self.bound.to_f64_lossy())?;
        st.serialize_field("bracket", &self.bracket.to_f64_lossy())?;
        st.serialize_field("status", &self.status)?;
        st.end()
    }
}

impl<T: Real> Serialize for AxisExtent<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("AxisExtent", 5)?;
        st.serialize_field("min_point", &self.min_point.to_f64_lossy())?;
        st.serialize_field("max_point", &self.max_point.to_f64_lossy())?;
        st.serialize_field("lo", &self.lo)?;
        st.serialize_field("hi", &self.hi)?;
        st.serialize_field("width", &self.width().to_f64_lossy())?;
        st.end()
    }
}

impl<T: Real> Serialize for Island<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Island", 4)?;
        st.serialize_field("label", &self.label)?;
        st.serialize_field("point_count", &self.points.len())?;
        st.serialize_field("extent", &self.extent)?;
        st.serialize_field("may_contain_multiple_levels", &self.may_contain_multiple_levels)?;
        st.end()
    }
}
