//! Grid evidence for obstructions to linearizability: components of
//! preimages and fixed sets, branch counts of planar level sets, and
//! critical points.
//!
//! A cell is marked when its center `c` satisfies, for every component,
//!
//! ```text
//! |f_i(c) − t_i| ≤ tol · (1 + ‖∇f_i(c)‖₁) · h
//! ```
//!
//! where `h` is the largest cell edge. For a locally linear `f_i` the level
//! set crosses the cell only if `|f_i(c) − t_i| ≤ ½ Σ_j |∂_j f_i| h_j`, so
//! `tol = 1` keeps a margin of two cells on steep sets while the `1 +` term
//! covers flat ones. Marked cells are joined across shared faces only.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::sync::Arc;

use serde::Serialize;

use crate::expr::{grad, EvalError, Expression, GradMode, Gradient};
use crate::map::{CompiledMap, MapError, MapSpec};
use crate::sampling::Window;

/// Default marking factor.
pub const DEFAULT_MARK_TOL: f64 = 1.0;
/// Upper bound on cells per grid; `80⁴` in four dimensions.
pub const MAX_GRID_CELLS: u64 = 80 * 80 * 80 * 80;
const MIN_CELLS: usize = 8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ObstructionError {
    #[error("axis {axis}: need lo < hi, got [{lo}, {hi}]")]
    InvertedAxis { axis: usize, lo: f64, hi: f64 },
    #[error("axis {axis}: {cells} cells, at least {MIN_CELLS} required")]
    TooFewCells { axis: usize, cells: usize },
    #[error("{axes} axes but {cells} cell counts")]
    CellCountLength { axes: usize, cells: usize },
    #[error("grid of {0} cells exceeds the limit of {MAX_GRID_CELLS}")]
    GridTooLarge(u64),
    #[error("dimension {0} unsupported (1 to 4)")]
    UnsupportedDimension(usize),
    #[error("map has dimension {map}, grid and target have {grid} and {target}")]
    DimensionMismatch {
        map: usize,
        grid: usize,
        target: usize,
    },
    #[error("expected a scalar function of two variables, got {0} variables")]
    NotPlanar(usize),
    #[error("point {point:?} is not on the level set: g = {value}")]
    NotOnLevelSet { point: Vec<f64>, value: f64 },
    #[error("radius must be positive and finite, got {0}")]
    Radius(f64),
    #[error("evaluation failed at {point:?}: {source}")]
    Eval { point: Vec<f64>, source: EvalError },
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A box cut into a regular grid of cells.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridWindow {
    axes: Vec<[f64; 2]>,
    cells: Vec<usize>,
}

impl GridWindow {
    pub fn new(axes: Vec<[f64; 2]>, cells: Vec<usize>) -> Result<Self, ObstructionError> {
        if axes.len() != cells.len() {
            return Err(ObstructionError::CellCountLength {
                axes: axes.len(),
                cells: cells.len(),
            });
        }
        for (axis, (&[lo, hi], &n)) in axes.iter().zip(&cells).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(ObstructionError::InvertedAxis { axis, lo, hi });
            }
            if n < MIN_CELLS {
                return Err(ObstructionError::TooFewCells { axis, cells: n });
            }
        }
        let grid = GridWindow { axes, cells };
        if grid.total() > MAX_GRID_CELLS {
            return Err(ObstructionError::GridTooLarge(grid.total()));
        }
        Ok(grid)
    }

    /// `n` cells along every axis of `window`.
    pub fn uniform(window: &Window, n: usize) -> Result<Self, ObstructionError> {
        GridWindow::new(window.axes().to_vec(), vec![n; window.dim()])
    }

    /// `[lo, hi]^m` with `n` cells per axis.
    pub fn cube(m: usize, lo: f64, hi: f64, n: usize) -> Result<Self, ObstructionError> {
        GridWindow::new(vec![[lo, hi]; m], vec![n; m])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[[f64; 2]] {
        &self.axes
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().map(|&n| n as u64).product()
    }

    pub fn cell_size(&self, axis: usize) -> f64 {
        let [lo, hi] = self.axes[axis];
        (hi - lo) / self.cells[axis] as f64
    }

    pub fn max_cell_size(&self) -> f64 {
        (0..self.dim())
            .map(|a| self.cell_size(a))
            .fold(0.0, f64::max)
    }

    /// Per-axis indices of a linear cell index; axis 0 varies slowest.
    pub fn unravel(&self, mut index: u64) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            let n = self.cells[a] as u64;
            out[a] = (index % n) as usize;
            index /= n;
        }
        out
    }

    pub fn ravel(&self, idx: &[usize]) -> u64 {
        idx.iter()
            .zip(&self.cells)
            .fold(0, |acc, (&i, &n)| acc * n as u64 + i as u64)
    }

    pub fn center(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(a, &i)| self.axes[a][0] + (i as f64 + 0.5) * self.cell_size(a))
            .collect()
    }

    /// The cell containing `x`, if `x` lies in the box.
    pub fn locate(&self, x: &[f64]) -> Option<Vec<usize>> {
        x.iter()
            .enumerate()
            .map(|(a, &v)| {
                let [lo, hi] = self.axes[a];
                if !(lo..=hi).contains(&v) {
                    return None;
                }
                let i = ((v - lo) / self.cell_size(a)).floor() as usize;
                Some(i.min(self.cells[a] - 1))
            })
            .collect()
    }

    /// Doubles every axis, within [`MAX_GRID_CELLS`].
    pub fn refined(&self) -> GridWindow {
        let cap = (MAX_GRID_CELLS as f64)
            .powf(1.0 / self.dim() as f64)
            .floor() as usize;
        let cells = self
            .cells
            .iter()
            .map(|&n| (2 * n).min(cap.max(n)))
            .collect();
        GridWindow {
            axes: self.axes.clone(),
            cells,
        }
    }
}

/// Marks cells for which `keep` holds, evaluating on all available threads.
/// The result is sorted.
fn mark_cells<F>(grid: &GridWindow, keep: F) -> Vec<u64>
where
    F: Fn(&[f64]) -> bool + Sync,
{
    let total = grid.total();
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()) as u64;
    let chunk = total.div_ceil(threads).max(1);
    let keep = &keep;
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                scope.spawn(move || {
                    let mut out = Vec::new();
                    for index in t * chunk..((t + 1) * chunk).min(total) {
                        if keep(&grid.center(&grid.unravel(index))) {
                            out.push(index);
                        }
                    }
                    out
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("grid worker panicked"))
            .collect()
    })
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // the smaller root wins so labels follow index order
        if ra < rb {
            self.parent[rb] = ra;
        } else {
            self.parent[ra] = rb;
        }
    }
}

/// Component label (numbered by first cell) of every sorted marked cell,
/// joining cells that share a face.
fn label_components(grid: &GridWindow, marked: &[u64]) -> Vec<usize> {
    let mut uf = UnionFind::new(marked.len());
    for (pos, &index) in marked.iter().enumerate() {
        let idx = grid.unravel(index);
        for a in 0..grid.dim() {
            if idx[a] + 1 < grid.cells[a] {
                let mut next = idx.clone();
                next[a] += 1;
                if let Ok(other) = marked.binary_search(&grid.ravel(&next)) {
                    uf.union(pos, other);
                }
            }
        }
    }
    let mut labels = BTreeMap::new();
    (0..marked.len())
        .map(|pos| {
            let root = uf.find(pos);
            let next = labels.len();
            *labels.entry(root).or_insert(next)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentReport {
    pub count: usize,
    /// Per component, the center of the cell with the smallest residual.
    pub representatives: Vec<Vec<f64>>,
    pub resolution: Vec<usize>,
    pub marked: usize,
    pub tol: f64,
    pub refined_resolution: Vec<usize>,
    pub refined_count: usize,
    /// Same count after one refinement.
    pub stable: bool,
    #[serde(skip)]
    grid: GridWindow,
    #[serde(skip)]
    cells: Vec<(u64, usize)>,
}

impl ComponentReport {
    /// Marked cells of the base grid as `index, center..., component`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let coords: Vec<String> = (1..=self.grid.dim()).map(|a| format!("x{a}")).collect();
        writeln!(out, "cell,{},component", coords.join(","))?;
        for &(index, label) in &self.cells {
            let c = self.grid.center(&self.grid.unravel(index));
            let c: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{index},{},{label}", c.join(","))?;
        }
        Ok(())
    }

    /// Component containing the cell at `x`, if that cell is marked.
    pub fn component_at(&self, x: &[f64]) -> Option<usize> {
        let index = self.grid.ravel(&self.grid.locate(x)?);
        self.cells
            .binary_search_by_key(&index, |&(i, _)| i)
            .ok()
            .map(|pos| self.cells[pos].1)
    }
}

fn marks_for_target(f: &CompiledMap, target: &[f64], grid: &GridWindow, tol: f64) -> Vec<u64> {
    let h = grid.max_cell_size();
    mark_cells(grid, |c| {
        (0..f.dim()).all(|i| {
            let Ok(v) = f.component(i, c) else {
                return false;
            };
            let gap = (v - target[i]).abs();
            // cheap rejection needs the gradient, so only skip it on an easy accept
            if gap <= tol * h {
                return true;
            }
            match f.gradient(i, c) {
                Ok(g) => gap <= tol * (1.0 + g.iter().map(|d| d.abs()).sum::<f64>()) * h,
                Err(_) => false,
            }
        })
    })
}

fn components_on(
    f: &CompiledMap,
    target: &[f64],
    grid: &GridWindow,
    tol: f64,
) -> (Vec<u64>, Vec<usize>) {
    let marked = marks_for_target(f, target, grid, tol);
    let labels = label_components(grid, &marked);
    (marked, labels)
}

/// Connected components of `{z : f(z) = target}` as seen on the grid, with
/// a stability check at doubled resolution.
pub fn preimage_components(
    f: &MapSpec,
    target: &[f64],
    grid: &GridWindow,
    tol: f64,
) -> Result<ComponentReport, ObstructionError> {
    let m = f.dim();
    if !(1..=4).contains(&m) {
        return Err(ObstructionError::UnsupportedDimension(m));
    }
    if grid.dim() != m || target.len() != m {
        return Err(ObstructionError::DimensionMismatch {
            map: m,
            grid: grid.dim(),
            target: target.len(),
        });
    }
    let compiled = f.compile();
    let (marked, labels) = components_on(&compiled, target, grid, tol);
    let count = labels.iter().max().map_or(0, |&l| l + 1);
    let mut best = vec![(f64::INFINITY, Vec::new()); count];
    for (&index, &label) in marked.iter().zip(&labels) {
        let c = grid.center(&grid.unravel(index));
        let r = compiled.eval(&c).map_or(f64::INFINITY, |v| {
            v.iter()
                .zip(target)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        });
        if r < best[label].0 || best[label].1.is_empty() {
            best[label] = (r, c);
        }
    }
    let representatives = best.into_iter().map(|(_, c)| c).collect();
    let fine = grid.refined();
    let (_, fine_labels) = components_on(&compiled, target, &fine, tol);
    let refined_count = fine_labels.iter().max().map_or(0, |&l| l + 1);
    Ok(ComponentReport {
        count,
        representatives,
        resolution: grid.cells.clone(),
        marked: marked.len(),
        tol,
        refined_resolution: fine.cells.clone(),
        refined_count,
        stable: refined_count == count,
        grid: grid.clone(),
        cells: marked.into_iter().zip(labels).collect(),
    })
}

/// Components of the fixed set `{z : f(z) = z}`, by the same marking
/// applied to the displacement `f − Id`.
pub fn fixed_point_sample(
    f: &MapSpec,
    grid: &GridWindow,
    tol: f64,
) -> Result<ComponentReport, ObstructionError> {
    let vars = Arc::clone(f.vars());
    let displacement = f
        .components()
        .iter()
        .enumerate()
        .map(|(i, c)| c - &Expression::var(i, Arc::clone(&vars)).expect("index within arity"))
        .collect();
    let d = MapSpec::new(vars, displacement)?;
    preimage_components(&d, &vec![0.0; f.dim()], grid, tol)
}

/// Half the number of sign changes of `g` on the circle of radius `radius`
/// around `point`: 1 where the zero set is locally a curve, 2 at a
/// transverse crossing.
pub fn local_branch_count(
    g: &Expression,
    point: &[f64],
    radius: f64,
    circle_samples: usize,
    tol: f64,
) -> Result<usize, ObstructionError> {
    if g.arity() != 2 || point.len() != 2 {
        return Err(ObstructionError::NotPlanar(g.arity()));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(ObstructionError::Radius(radius));
    }
    let eval = |p: &[f64]| {
        g.eval(p).map_err(|source| ObstructionError::Eval {
            point: p.to_vec(),
            source,
        })
    };
    let value = eval(point)?;
    if value.abs() > tol {
        return Err(ObstructionError::NotOnLevelSet {
            point: point.to_vec(),
            value,
        });
    }
    let n = circle_samples.max(8);
    let mut signs = Vec::with_capacity(n);
    for j in 0..n {
        // half-step offset keeps samples off the coordinate axes
        let theta = std::f64::consts::TAU * (j as f64 + 0.5) / n as f64;
        let p = [
            point[0] + radius * theta.cos(),
            point[1] + radius * theta.sin(),
        ];
        let v = eval(&p)?;
        if v != 0.0 {
            signs.push(v > 0.0);
        }
    }
    let changes = signs
        .iter()
        .zip(signs.iter().cycle().skip(1))
        .filter(|(a, b)| a != b)
        .count();
    Ok(changes / 2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VanishCell {
    pub center: Vec<f64>,
    /// Local minimizer of `‖∇g‖` inside the cell.
    pub refined: Vec<f64>,
    pub grad_norm: f64,
    pub value: f64,
    pub cluster: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientScan {
    pub cells: Vec<VanishCell>,
    pub clusters: usize,
    pub resolution: Vec<usize>,
    pub candidates: usize,
    pub tol: f64,
    pub symbolic: bool,
}

const NUMERIC_GRAD_STEP: f64 = 1e-6;

fn sup(v: &[f64]) -> f64 {
    v.iter().map(|d| d.abs()).fold(0.0, f64::max)
}

fn refine_critical(gradient: &Gradient, lo: &[f64], hi: &[f64], start: &[f64]) -> Vec<f64> {
    let m = start.len();
    let norm2 = |x: &[f64]| {
        gradient
            .eval(x)
            .map_or(f64::INFINITY, |g| g.iter().map(|d| d * d).sum::<f64>())
    };
    let clamp = |x: &mut Vec<f64>| {
        for a in 0..m {
            x[a] = x[a].clamp(lo[a], hi[a]);
        }
    };
    let mut best = start.to_vec();
    let mut best_val = norm2(&best);

    // Newton steps on ∇g = 0 with a finite-difference Hessian
    let mut x = start.to_vec();
    for _ in 0..50 {
        let Ok(g) = gradient.eval(&x) else { break };
        let mut hess = nalgebra::DMatrix::zeros(m, m);
        for j in 0..m {
            let step = 1e-6 * (1.0 + x[j].abs());
            let mut up = x.clone();
            up[j] += step;
            let mut down = x.clone();
            down[j] -= step;
            let (Ok(gu), Ok(gd)) = (gradient.eval(&up), gradient.eval(&down)) else {
                break;
            };
            for i in 0..m {
                hess[(i, j)] = (gu[i] - gd[i]) / (2.0 * step);
            }
        }
        let Some(delta) = hess.lu().solve(&nalgebra::DVector::from_vec(g)) else {
            break;
        };
        let mut next: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, d)| a - d).collect();
        clamp(&mut next);
        let v = norm2(&next);
        if v < best_val {
            best_val = v;
            best = next.clone();
        }
        if next == x {
            break;
        }
        x = next;
    }

    // compass search polishes what Newton cannot reach
    let mut step: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (b - a) / 4.0).collect();
    while step
        .iter()
        .any(|&s| s > 1e-13 * (1.0 + best.iter().map(|v| v.abs()).fold(0.0, f64::max)))
    {
        let mut improved = false;
        for a in 0..m {
            for dir in [1.0, -1.0] {
                let mut trial = best.clone();
                trial[a] += dir * step[a];
                clamp(&mut trial);
                let v = norm2(&trial);
                if v < best_val {
                    best_val = v;
                    best = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step.iter_mut().for_each(|s| *s *= 0.5);
        }
    }
    best
}

/// Cells of the grid on which `∇g` vanishes to within `tol`.
///
/// A cell is a candidate when `‖∇g‖∞` at its center is within `tol` plus the
/// variation of `∇g` over half a cell; each candidate is refined by local
/// minimization of `‖∇g‖` over the closed cell and kept if the minimum is
/// at most `tol`.
pub fn gradient_vanish_scan(
    g: &Expression,
    grid: &GridWindow,
    tol: f64,
) -> Result<GradientScan, ObstructionError> {
    let m = g.arity();
    if !(1..=4).contains(&m) {
        return Err(ObstructionError::UnsupportedDimension(m));
    }
    if grid.dim() != m {
        return Err(ObstructionError::DimensionMismatch {
            map: m,
            grid: grid.dim(),
            target: m,
        });
    }
    let (gradient, symbolic) = match grad(g, GradMode::Symbolic) {
        Ok(gr) => (gr, true),
        Err(_) => (
            grad(g, GradMode::Numeric(NUMERIC_GRAD_STEP)).expect("numeric gradient always builds"),
            false,
        ),
    };
    let half: Vec<f64> = (0..m).map(|a| grid.cell_size(a) / 2.0).collect();
    let candidates = mark_cells(grid, |c| {
        let Ok(g0) = gradient.eval(c) else {
            return false;
        };
        let mut slack = 0.0;
        for a in 0..m {
            for dir in [1.0, -1.0] {
                let mut p = c.to_vec();
                p[a] += dir * half[a];
                let Ok(gp) = gradient.eval(&p) else {
                    return false;
                };
                let var: Vec<f64> = gp.iter().zip(&g0).map(|(u, v)| u - v).collect();
                slack += sup(&var);
            }
        }
        sup(&g0) <= tol + slack
    });

    let mut kept = Vec::new();
    let mut cells = Vec::new();
    for &index in &candidates {
        let idx = grid.unravel(index);
        let center = grid.center(&idx);
        let lo: Vec<f64> = center.iter().zip(&half).map(|(c, h)| c - h).collect();
        let hi: Vec<f64> = center.iter().zip(&half).map(|(c, h)| c + h).collect();
        let refined = refine_critical(&gradient, &lo, &hi, &center);
        let gv = gradient
            .eval(&refined)
            .map_err(|source| ObstructionError::Eval {
                point: refined.clone(),
                source,
            })?;
        if sup(&gv) <= tol {
            let value = g.eval(&refined).map_err(|source| ObstructionError::Eval {
                point: refined.clone(),
                source,
            })?;
            kept.push(index);
            cells.push(VanishCell {
                center,
                refined,
                grad_norm: sup(&gv),
                value,
                cluster: 0,
            });
        }
    }
    let labels = label_components(grid, &kept);
    for (cell, label) in cells.iter_mut().zip(&labels) {
        cell.cluster = *label;
    }
    Ok(GradientScan {
        clusters: labels.iter().max().map_or(0, |&l| l + 1),
        cells,
        resolution: grid.cells.clone(),
        candidates: candidates.len(),
        tol,
        symbolic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{builtin_map, BuiltinParams};

    fn map(vars: &[&str], comps: &[&str]) -> MapSpec {
        MapSpec::parse(vars, comps).unwrap()
    }

    fn builtin(text: &str) -> MapSpec {
        builtin_map(&text.parse::<BuiltinParams>().unwrap()).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(
            GridWindow::cube(2, 1.0, 0.0, 10),
            Err(ObstructionError::InvertedAxis { .. })
        ));
        assert!(matches!(
            GridWindow::cube(2, 0.0, 1.0, 7),
            Err(ObstructionError::TooFewCells { .. })
        ));
        assert!(matches!(
            GridWindow::cube(4, 0.0, 1.0, 81),
            Err(ObstructionError::GridTooLarge(_))
        ));
        let g = GridWindow::new(vec![[0.0, 1.0], [-2.0, 2.0]], vec![10, 8]).unwrap();
        assert_eq!(g.center(&[0, 0]), vec![0.05, -1.75]);
        assert_eq!(g.unravel(g.ravel(&[3, 5])), vec![3, 5]);
        assert_eq!(g.locate(&[1.0, 2.0]), Some(vec![9, 7]));
        assert_eq!(g.refined().cells(), &[20, 16]);
        assert_eq!(
            GridWindow::cube(4, 0.0, 1.0, 60).unwrap().refined().cells(),
            &[80; 4]
        );
    }

    #[test]
    fn diagonal_touching_cells_stay_apart() {
        // two cells meeting only at a corner are separate components
        let g = GridWindow::cube(2, 0.0, 1.0, 8).unwrap();
        let marked = vec![g.ravel(&[2, 2]), g.ravel(&[3, 3])];
        assert_eq!(label_components(&g, &marked), vec![0, 1]);
        let marked = vec![g.ravel(&[2, 2]), g.ravel(&[2, 3]), g.ravel(&[3, 3])];
        assert_eq!(label_components(&g, &marked), vec![0, 0, 0]);
    }

    #[test]
    fn diagonal_line_is_one_component() {
        // the marking margin keeps a diagonal set face-connected
        let f = map(&["x", "y"], &["x - y", "0"]);
        let r = preimage_components(
            &f,
            &[0.0, 0.0],
            &GridWindow::cube(2, -1.0, 1.0, 64).unwrap(),
            1.0,
        )
        .unwrap();
        assert_eq!(r.count, 1);
        assert!(r.stable);
    }

    #[test]
    fn preimage_of_hyperbola_and_axis() {
        let f = map(&["x", "y"], &["x + y*x^2", "0"]);
        let grid = GridWindow::cube(2, -3.0, 3.0, 120).unwrap();
        let r = preimage_components(&f, &[0.0, 0.0], &grid, DEFAULT_MARK_TOL).unwrap();
        assert_eq!((r.count, r.refined_count), (3, 3));
        assert!(r.stable);
        let axis = r.component_at(&[0.0, 2.5]).unwrap();
        let upper = r.component_at(&[-1.0, 1.0]).unwrap();
        let lower = r.component_at(&[1.0, -1.0]).unwrap();
        assert!(axis != upper && axis != lower && upper != lower);
    }

    #[test]
    fn trivial_preimages() {
        let id = map(&["x", "y"], &["x", "y"]);
        let grid = GridWindow::cube(2, -1.0, 1.0, 40).unwrap();
        let r = preimage_components(&id, &[0.0, 0.0], &grid, 1.0).unwrap();
        assert_eq!(r.count, 1);
        assert!(r.representatives[0].iter().all(|v| v.abs() < 0.1));
        let r = preimage_components(&id, &[5.0, 0.0], &grid, 1.0).unwrap();
        assert_eq!((r.count, r.stable), (0, true));
        let line = map(&["x"], &["x^2"]);
        let r = preimage_components(
            &line,
            &[1.0],
            &GridWindow::cube(1, -2.0, 2.0, 100).unwrap(),
            1.0,
        )
        .unwrap();
        assert_eq!(r.count, 2);
    }

    #[test]
    fn poly_family_zero_sets_are_connected() {
        for i in 1..=3 {
            let f = builtin(&format!("builtin:poly_family?i={i}"));
            let r = i as f64 + 2.0;
            let grid = GridWindow::cube(2, -r, r, 100).unwrap();
            let rep = preimage_components(&f, &[0.0, 0.0], &grid, DEFAULT_MARK_TOL).unwrap();
            assert_eq!(rep.count, 1, "i = {i}");
            assert!(rep.stable);
        }
    }

    #[test]
    fn csv_lists_marked_cells() {
        let f = map(&["x"], &["x"]);
        let r = preimage_components(
            &f,
            &[0.0],
            &GridWindow::cube(1, -1.0, 1.0, 10).unwrap(),
            1.0,
        )
        .unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "cell,x1,component\n3,-0.29999999999999993,0\n4,-0.09999999999999998,0\n5,0.10000000000000009,0\n6,0.30000000000000004,0\n"
        );
    }

    #[test]
    fn branch_counts() {
        let p1 = Expression::parse("x*(1 - y)", &["x", "y"]).unwrap();
        assert_eq!(
            local_branch_count(&p1, &[0.0, 1.0], 0.1, 64, 1e-9).unwrap(),
            2
        );
        assert_eq!(
            local_branch_count(&p1, &[0.0, -2.0], 0.1, 64, 1e-9).unwrap(),
            1
        );
        let g = Expression::parse("x + y*x^2", &["x", "y"]).unwrap();
        assert_eq!(
            local_branch_count(&g, &[0.0, 5.0], 0.1, 64, 1e-9).unwrap(),
            1
        );
        let x = Expression::parse("x", &["x", "y"]).unwrap();
        assert_eq!(
            local_branch_count(&x, &[0.0, 0.0], 0.1, 64, 1e-9).unwrap(),
            1
        );
        assert!(matches!(
            local_branch_count(&x, &[1.0, 0.0], 0.1, 64, 1e-9),
            Err(ObstructionError::NotOnLevelSet { .. })
        ));
    }

    #[test]
    fn gradient_scans() {
        let grid = GridWindow::cube(2, -5.0, 5.0, 100).unwrap();
        let g = Expression::parse("x + y*x^2", &["x", "y"]).unwrap();
        assert!(gradient_vanish_scan(&g, &grid, 1e-6)
            .unwrap()
            .cells
            .is_empty());
        let x = Expression::parse("x", &["x", "y"]).unwrap();
        assert!(gradient_vanish_scan(&x, &grid, 1e-6)
            .unwrap()
            .cells
            .is_empty());

        let p1 = Expression::parse("x*(1 - y)", &["x", "y"]).unwrap();
        let scan = gradient_vanish_scan(&p1, &grid, 1e-6).unwrap();
        assert_eq!(scan.clusters, 1);
        assert!(!scan.cells.is_empty());
        for c in &scan.cells {
            assert!(c.refined[0].abs() <= 1e-6 && (c.refined[1] - 1.0).abs() <= 1e-6);
        }
    }

    #[test]
    fn fixed_sets() {
        let hw = builtin("builtin:hw_simple?k=2");
        let r = fixed_point_sample(&hw, &GridWindow::cube(2, 0.0, 1.0, 100).unwrap(), 1.0).unwrap();
        assert_eq!(r.count, 1);
        for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
            assert_eq!(
                r.component_at(&[p * p, 2.0 * p * (1.0 - p)]),
                Some(0),
                "p = {p}"
            );
        }
        let f = map(&["x", "y"], &["x + y*x^2", "0"]);
        let r = fixed_point_sample(&f, &GridWindow::cube(2, -3.0, 3.0, 60).unwrap(), 1.0).unwrap();
        assert_eq!(r.count, 1);
        assert!(r.component_at(&[2.9, 0.0]).is_some() && r.component_at(&[0.0, 1.0]).is_none());
        let neg = map(&["x", "y"], &["-x", "-y"]);
        let r =
            fixed_point_sample(&neg, &GridWindow::cube(2, -1.0, 1.0, 40).unwrap(), 1.0).unwrap();
        assert_eq!(r.count, 1);
        assert!(r.marked <= 16);
    }
}
