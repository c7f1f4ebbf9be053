//! Crossing counts, derivative sup-norms, and the smoothed (Kac) counter.
//!
//! Counting scans a uniform grid for sign changes of `X − u` and refines each
//! bracket by bisection. Cells without a sign change whose values are small
//! relative to the local derivative are subdivided (up to 8 levels) before
//! being declared rootless; the residual risk is surfaced through
//! `undercount_flag`, never silently. Tangencies (touch without sign change)
//! are not counted.

use thiserror::Error;

use crate::simulate::field::{Field, SphereField};
use crate::simulate::{PathSample, Trajectory};
use crate::taylor;

/// Maximum subdivision depth for suspicious cells.
const MAX_SUBDIVISION: u32 = 8;

#[derive(Debug, Error)]
pub enum CrossingsError {
    #[error("offset |y| = {dist} is not inside the ball of radius {radius}")]
    OffsetOutsideBall { dist: f64, radius: f64 },
    #[error("great-circle plane must be an orthonormal pair (|<e1,e2>| = {dot}, |e1| = {n1}, |e2| = {n2})")]
    NonOrthonormalPlane { dot: f64, n1: f64, n2: f64 },
}

/// Result of a crossing scan.
#[derive(Debug, Clone)]
pub struct CrossingCount {
    pub count: usize,
    /// Refined root locations, strictly increasing.
    pub refined_roots: Vec<f64>,
    /// Grid step actually used.
    pub resolution: f64,
    /// Set when a cell stayed suspicious at the subdivision limit or two
    /// roots are closer than twice the resolution.
    pub undercount_flag: bool,
}

fn bisect_root(path: &dyn Trajectory, u: f64, mut lo: f64, mut hi: f64, mut f_lo: f64, tol: f64) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = path.eval(0, mid) - u;
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Recursive scan of a no-sign-change cell: subdivide while the values are
/// within reach of zero given the local derivative scale.
#[allow(clippy::too_many_arguments)]
fn scan_cell(
    path: &dyn Trajectory,
    u: f64,
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
    depth: u32,
    refine_tol: f64,
    roots: &mut Vec<f64>,
    undercount: &mut bool,
) {
    if f_lo != 0.0 && f_hi != 0.0 && f_lo.signum() != f_hi.signum() {
        roots.push(bisect_root(path, u, lo, hi, f_lo, refine_tol));
        return;
    }
    let width = hi - lo;
    let mid = 0.5 * (lo + hi);
    let f_mid = path.eval(0, mid) - u;
    let d_scale = path
        .eval(1, lo)
        .abs()
        .max(path.eval(1, mid).abs())
        .max(path.eval(1, hi).abs());
    let reach = 0.5 * width * d_scale;
    let closest = f_lo.abs().min(f_mid.abs()).min(f_hi.abs());
    if closest >= reach {
        return; // safely away from the level
    }
    if depth >= MAX_SUBDIVISION {
        *undercount = true;
        return;
    }
    scan_cell(path, u, lo, mid, f_lo, f_mid, depth + 1, refine_tol, roots, undercount);
    scan_cell(path, u, mid, hi, f_mid, f_hi, depth + 1, refine_tol, roots, undercount);
}

/// Counts sign-change crossings of `X − u` on `interval`.
///
/// The path must expose a first derivative (used only to size the safe bound
/// of the adaptive subdivision). Roots exactly on grid nodes are counted
/// once.
pub fn count_crossings(
    path: &dyn Trajectory,
    interval: (f64, f64),
    u: f64,
    base_step: f64,
    refine_tol: f64,
) -> CrossingCount {
    let (lo, hi) = interval;
    assert!(hi > lo && base_step > 0.0);
    // Short intervals (e.g. near-tangent chords) collapse to a single cell.
    let n_cells = ((hi - lo) / base_step).ceil().max(1.0) as usize;
    let step = (hi - lo) / n_cells as f64;
    let values: Vec<f64> = (0..=n_cells)
        .map(|i| path.eval(0, lo + i as f64 * step) - u)
        .collect();
    let slopes: Vec<f64> = (0..=n_cells)
        .map(|i| path.eval(1, lo + i as f64 * step).abs())
        .collect();

    let mut roots = Vec::new();
    let mut undercount = false;
    for i in 0..n_cells {
        let (a, b) = (lo + i as f64 * step, lo + (i + 1) as f64 * step);
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 {
            // Node root, counted once (the previous cell saw it as its right
            // endpoint and did not bisect across it).
            if roots.last().is_none_or(|r| (a - r) > refine_tol) {
                roots.push(a);
            }
            continue;
        }
        if fb != 0.0 && fa.signum() != fb.signum() {
            roots.push(bisect_root(path, u, a, b, fa, refine_tol));
        } else if fa.abs().min(fb.abs()) < 0.5 * step * slopes[i].max(slopes[i + 1]) {
            // Within reach of the level given the node slopes: look closer.
            scan_cell(path, u, a, b, fa, fb, 0, refine_tol, &mut roots, &mut undercount);
        }
    }
    if *values.last().unwrap() == 0.0 && roots.last().is_none_or(|r| (hi - r) > refine_tol) {
        roots.push(hi);
    }

    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= refine_tol);
    if roots.windows(2).any(|w| w[1] - w[0] < 2.0 * step) {
        undercount = true;
    }
    CrossingCount {
        count: roots.len(),
        refined_roots: roots,
        resolution: step,
        undercount_flag: undercount,
    }
}

/// Certified (or best-effort) upper bound on `|X^(k)|_inf` from a grid sample.
#[derive(Debug, Clone, Copy)]
pub struct SupNormBound {
    pub value: f64,
    /// True when an order-(k+1) row allowed the Lipschitz correction
    /// `(step/2)·max|X^(k+1)|`; otherwise the value is the raw grid max.
    pub certified: bool,
}

pub fn sup_norm_derivative(sample: &PathSample, k: u32) -> SupNormBound {
    let grid_max = |row: &[f64]| row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let base = grid_max(&sample.derivatives[k as usize]);
    if sample.order() > k {
        let next = grid_max(&sample.derivatives[k as usize + 1]);
        SupNormBound {
            value: base + 0.5 * sample.grid.step() * next,
            certified: true,
        }
    } else {
        SupNormBound {
            value: base,
            certified: false,
        }
    }
}

/// Smoothed crossing counter `(1/2δ)∫_I |X'|·1{|X−u|<=δ} dt`.
///
/// Composite quadrature at step `min(quad_step, δ/4)`: cells safely on one
/// side of the indicator boundary integrate `|X'|` by Simpson; cells that may
/// straddle the boundary are subdivided recursively until the boundary is
/// resolved, so neither the boundary location nor the step size limits
/// accuracy.
pub fn kac_counter(
    path: &dyn Trajectory,
    interval: (f64, f64),
    u: f64,
    delta: f64,
    quad_step: f64,
) -> f64 {
    assert!(delta > 0.0 && quad_step > 0.0);
    let (lo, hi) = interval;
    let step = quad_step.min(delta / 4.0);
    let n_cells = ((hi - lo) / step).ceil().max(1.0) as usize;
    let step = (hi - lo) / n_cells as f64;
    let min_width = step * 1e-10;

    let mut integral = 0.0;
    for i in 0..n_cells {
        let a = lo + i as f64 * step;
        let b = lo + (i + 1) as f64 * step;
        integral += kac_cell(path, u, delta, a, b, min_width);
    }
    integral / (2.0 * delta)
}

fn kac_cell(path: &dyn Trajectory, u: f64, delta: f64, a: f64, b: f64, min_width: f64) -> f64 {
    let width = b - a;
    let mid = 0.5 * (a + b);
    let va = (path.eval(0, a) - u).abs();
    let vm = (path.eval(0, mid) - u).abs();
    let vb = (path.eval(0, b) - u).abs();
    let inside_m = vm <= delta;
    if width <= min_width {
        return if inside_m {
            width * path.eval(1, mid).abs()
        } else {
            0.0
        };
    }
    let same_side = (va <= delta) == inside_m && (vb <= delta) == inside_m;
    if same_side {
        let da = path.eval(1, a).abs();
        let dm = path.eval(1, mid).abs();
        let db = path.eval(1, b).abs();
        // Could the |X−u| = δ boundary still cut through this cell?
        let d_scale = da.max(dm).max(db);
        let margin = (va - delta)
            .abs()
            .min((vm - delta).abs())
            .min((vb - delta).abs());
        if margin > 0.5 * width * d_scale {
            return if inside_m {
                width * (da + 4.0 * dm + db) / 6.0
            } else {
                0.0
            };
        }
    }
    kac_cell(path, u, delta, a, mid, min_width) + kac_cell(path, u, delta, mid, b, min_width)
}

/// A field restricted to the line `base + t·dir`.
pub struct LineRestriction<'a> {
    pub field: &'a dyn Field,
    pub base: Vec<f64>,
    pub dir: Vec<f64>,
}

impl Trajectory for LineRestriction<'_> {
    fn max_order(&self) -> u32 {
        8
    }
    fn eval(&self, order: u32, t: f64) -> f64 {
        let shifted: Vec<f64> = self
            .base
            .iter()
            .zip(&self.dir)
            .map(|(b, d)| b + t * d)
            .collect();
        match order {
            0 => self.field.eval(&shifted),
            1 => self.field.line_derivative(&shifted, &self.dir),
            _ => {
                let series = self.field.line_taylor(&shifted, &self.dir, order as usize);
                taylor::derivatives(&series)[order as usize]
            }
        }
    }
}

/// A sphere field restricted to the great circle `cos θ·e1 + sin θ·e2`.
pub struct CircleRestriction<'a> {
    pub field: &'a dyn SphereField,
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
}

impl Trajectory for CircleRestriction<'_> {
    fn max_order(&self) -> u32 {
        8
    }
    fn eval(&self, order: u32, theta: f64) -> f64 {
        match order {
            0 => {
                let point: Vec<f64> = self
                    .e1
                    .iter()
                    .zip(&self.e2)
                    .map(|(a, b)| a * theta.cos() + b * theta.sin())
                    .collect();
                self.field.eval(&point)
            }
            1 => self.field.circle_derivative(&self.e1, &self.e2, theta),
            _ => {
                let series = self
                    .field
                    .circle_taylor(&self.e1, &self.e2, theta, order as usize);
                taylor::derivatives(&series)[order as usize]
            }
        }
    }
}

/// Crossings of the field restricted to the chord `y + t·v` inside the ball
/// of radius `a`; `y` must satisfy `|y| < a`.
pub fn crossings_along_line(
    field: &dyn Field,
    dir: &[f64],
    offset: &[f64],
    radius: f64,
    u: f64,
    base_step: f64,
    refine_tol: f64,
) -> Result<CrossingCount, CrossingsError> {
    let dist = offset.iter().map(|x| x * x).sum::<f64>().sqrt();
    if dist >= radius {
        return Err(CrossingsError::OffsetOutsideBall { dist, radius });
    }
    let half = (radius * radius - dist * dist).sqrt();
    if half < 1e-12 {
        // Degenerate tangent chord: no interior to scan.
        return Ok(CrossingCount {
            count: 0,
            refined_roots: Vec::new(),
            resolution: base_step,
            undercount_flag: false,
        });
    }
    let path = LineRestriction {
        field,
        base: offset.to_vec(),
        dir: dir.to_vec(),
    };
    Ok(count_crossings(&path, (-half, half), u, base_step, refine_tol))
}

/// Outcome of a great-circle probe: the whole circle sitting on the level is
/// flagged instead of producing an unbounded count.
#[derive(Debug, Clone)]
pub enum CircleCrossings {
    Degenerate,
    Counted(CrossingCount),
}

/// Counts crossings of `θ ↦ X(cos θ·e1 + sin θ·e2) − u` over one period,
/// treating the circle as periodic (no endpoint double count).
pub fn crossings_along_great_circle(
    field: &dyn SphereField,
    e1: &[f64],
    e2: &[f64],
    u: f64,
    base_step: f64,
    refine_tol: f64,
) -> Result<CircleCrossings, CrossingsError> {
    let n1 = e1.iter().map(|x| x * x).sum::<f64>().sqrt();
    let n2 = e2.iter().map(|x| x * x).sum::<f64>().sqrt();
    let dot: f64 = e1.iter().zip(e2).map(|(a, b)| a * b).sum();
    if (n1 - 1.0).abs() > 1e-9 || (n2 - 1.0).abs() > 1e-9 || dot.abs() > 1e-9 {
        return Err(CrossingsError::NonOrthonormalPlane { dot, n1, n2 });
    }
    let path = CircleRestriction {
        field,
        e1: e1.to_vec(),
        e2: e2.to_vec(),
    };
    let two_pi = 2.0 * std::f64::consts::PI;
    let n_cells = (two_pi / base_step).ceil() as usize;
    let step = two_pi / n_cells as f64;
    let values: Vec<f64> = (0..n_cells)
        .map(|i| path.eval(0, i as f64 * step) - u)
        .collect();
    if values.iter().all(|v| v.abs() < 1e-12) {
        return Ok(CircleCrossings::Degenerate);
    }
    let slopes: Vec<f64> = (0..n_cells)
        .map(|i| path.eval(1, i as f64 * step).abs())
        .collect();

    let mut roots = Vec::new();
    let mut undercount = false;
    for i in 0..n_cells {
        let a = i as f64 * step;
        let b = (i + 1) as f64 * step;
        let fa = values[i];
        let fb = values[(i + 1) % n_cells]; // periodic wrap
        if fa == 0.0 {
            if roots.last().is_none_or(|r| (a - r) > refine_tol) {
                roots.push(a);
            }
            continue;
        }
        if fb != 0.0 && fa.signum() != fb.signum() {
            roots.push(bisect_root(&path, u, a, b, fa, refine_tol));
        } else if fa.abs().min(fb.abs()) < 0.5 * step * slopes[i].max(slopes[(i + 1) % n_cells]) {
            scan_cell(&path, u, a, b, fa, fb, 0, refine_tol, &mut roots, &mut undercount);
        }
    }
    // A root refined into the wrap cell may alias the node root at 0.
    if roots.len() >= 2 {
        let first = roots[0];
        let last = *roots.last().unwrap();
        if (last - two_pi) + first <= refine_tol && last >= two_pi - refine_tol {
            roots.pop();
        }
    }
    if roots.windows(2).any(|w| w[1] - w[0] < 2.0 * step) {
        undercount = true;
    }
    Ok(CircleCrossings::Counted(CrossingCount {
        count: roots.len(),
        refined_roots: roots,
        resolution: step,
        undercount_flag: undercount,
    }))
}
