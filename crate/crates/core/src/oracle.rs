//! Brute-force verification engine.
//!
//! Maximizes an objective over the full strategy box `[0, P]^2 x [0, 1]^2` by
//! exhaustive grid evaluation followed by zoom-in refinement around the
//! incumbent. It only calls [`secrecy_rates`]; none of the closed forms in
//! [`crate::optima`] are consulted.
//!
//! Grid order is lexicographic in `(p1, p2, lambda1, lambda2)` with every axis
//! ascending, and the argmax scan keeps the first strict maximum, so ties go to
//! the lexicographically smallest strategy. Values are written into a buffer
//! indexed by grid position, which makes the result independent of how many
//! worker threads fill it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{secrecy_rates, ChannelParams, PowerConstraint, Strategy, User};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n_power: usize,
    n_lambda: usize,
    refine_rounds: usize,
    zoom_factor: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { n_power: 25, n_lambda: 25, refine_rounds: 4, zoom_factor: 0.2 }
    }
}

impl GridSpec {
    pub fn new(n_power: usize, n_lambda: usize, refine_rounds: usize, zoom_factor: f64) -> Result<Self> {
        if n_power < 2 || n_lambda < 2 {
            return Err(Error::domain(format!(
                "grid needs at least 2 samples per axis (power {n_power}, lambda {n_lambda})"
            )));
        }
        if !(zoom_factor > 0.0 && zoom_factor < 1.0) {
            return Err(Error::domain(format!("zoom factor must lie in (0, 1), got {zoom_factor}")));
        }
        Ok(Self { n_power, n_lambda, refine_rounds, zoom_factor })
    }

    pub fn n_power(&self) -> usize {
        self.n_power
    }

    pub fn n_lambda(&self) -> usize {
        self.n_lambda
    }

    pub fn refine_rounds(&self) -> usize {
        self.refine_rounds
    }

    pub fn zoom_factor(&self) -> f64 {
        self.zoom_factor
    }

    pub fn with_refine_rounds(self, refine_rounds: usize) -> Self {
        Self { refine_rounds, ..self }
    }
}

/// What the oracle maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// `min(r1_raw, r2_raw)`.
    MaxMin,
    /// The chosen user's raw rate.
    SingleUser(User),
    /// `r1 + r2` on clamped rates.
    MaxSum,
}

impl Objective {
    pub fn evaluate(self, ch: &ChannelParams, s: &Strategy) -> f64 {
        let r = secrecy_rates(ch, s);
        match self {
            Objective::MaxMin => r.r1_raw().min(r.r2_raw()),
            Objective::SingleUser(user) => r.raw(user),
            Objective::MaxSum => r.sum(),
        }
    }
}

/// Incumbent and error bar after one pass over the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub best_value: f64,
    pub resolution_bound: f64,
    pub spacing: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub objective: Objective,
    pub best_strategy: Strategy,
    pub best_value: f64,
    /// Estimated half-width of the bracket `[best_value, best_value + bound]`
    /// around the continuous optimum (see [`search`]).
    pub resolution_bound: f64,
    /// Grid spacing of the final pass, per coordinate.
    pub spacing: [f64; 4],
    pub evaluations: usize,
    /// One record per pass: the initial grid then each refinement.
    pub history: Vec<RoundRecord>,
}

pub fn oracle_maxmin(ch: &ChannelParams, power: PowerConstraint, grid: &GridSpec) -> OracleResult {
    search(ch, power, grid, Objective::MaxMin)
}

/// Maximizes one user's rate over the whole box; the other user's behavior is
/// left free.
pub fn oracle_single_user(ch: &ChannelParams, power: PowerConstraint, user: User, grid: &GridSpec) -> OracleResult {
    search(ch, power, grid, Objective::SingleUser(user))
}

pub fn oracle_max_sum(ch: &ChannelParams, power: PowerConstraint, grid: &GridSpec) -> OracleResult {
    search(ch, power, grid, Objective::MaxSum)
}

#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    domain: f64,
    n: usize,
}

impl Axis {
    fn full(domain: f64, n: usize) -> Self {
        Self { lo: 0.0, hi: domain, domain, n }
    }

    fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    fn at(&self, k: usize) -> f64 {
        if k + 1 == self.n {
            self.hi
        } else {
            self.lo + k as f64 * self.step()
        }
    }

    /// Box of `zoom` times the current width centred on `center`, shifted to
    /// stay inside `[0, domain]`.
    fn zoomed(&self, center: f64, zoom: f64) -> Self {
        let width = (self.hi - self.lo) * zoom;
        let mut lo = center - width / 2.0;
        let mut hi = center + width / 2.0;
        if lo < 0.0 {
            lo = 0.0;
            hi = width.min(self.domain);
        }
        if hi > self.domain {
            hi = self.domain;
            lo = (self.domain - width).max(0.0);
        }
        Self { lo, hi, domain: self.domain, n: self.n }
    }
}

fn lex_less(x: &[f64; 4], y: &[f64; 4]) -> bool {
    for (a, b) in x.iter().zip(y) {
        if a < b {
            return true;
        }
        if a > b {
            return false;
        }
    }
    false
}

fn eval_point(ch: &ChannelParams, objective: Objective, x: [f64; 4]) -> f64 {
    let s = Strategy::from_array(x).expect("grid point inside the strategy box");
    let v = objective.evaluate(ch, &s);
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Runs the grid search with refinement.
///
/// The resolution bound of a pass is a local Lipschitz bracket. For each
/// coordinate `i`, `L_i` is the largest finite-difference slope along `i`
/// between adjacent samples of the current grid. Assuming the continuous
/// maximizer lies within one grid step of the incumbent `x` (the premise of
/// zooming in around it), an `L_i`-Lipschitz function on the segment from `x`
/// (value `f0`) to its neighbour `x +- h_i e_i` (value `f1`) can exceed `f0` by
/// at most `(f1 - f0 + L_i h_i) / 2`. The bound sums the worse side of each
/// coordinate, plus a few ulps of `f0` for rounding. Neighbours outside the
/// strategy box are skipped, so an incumbent on an active constraint is only
/// charged for the feasible side.
pub fn search(ch: &ChannelParams, power: PowerConstraint, grid: &GridSpec, objective: Objective) -> OracleResult {
    let peak = power.peak();
    let mut axes = [
        Axis::full(peak, grid.n_power),
        Axis::full(peak, grid.n_power),
        Axis::full(1.0, grid.n_lambda),
        Axis::full(1.0, grid.n_lambda),
    ];

    let mut best: Option<([f64; 4], f64)> = None;
    let mut history = Vec::with_capacity(grid.refine_rounds + 1);
    let mut evaluations = 0;

    for round in 0..=grid.refine_rounds {
        if round > 0 {
            let (x, _) = best.expect("incumbent after first pass");
            for (axis, c) in axes.iter_mut().zip(x) {
                *axis = axis.zoomed(c, grid.zoom_factor);
            }
        }

        let values = evaluate_grid(ch, objective, &axes);
        evaluations += values.len();

        let mut idx_best = None;
        let mut v_best = f64::NEG_INFINITY;
        for (idx, &v) in values.iter().enumerate() {
            if idx_best.is_none() || v > v_best {
                idx_best = Some(idx);
                v_best = v;
            }
        }
        let x_round = decode(&axes, idx_best.expect("non-empty grid"));

        best = Some(match best {
            Some((x_old, v_old)) if v_old > v_best || (v_old == v_best && lex_less(&x_old, &x_round)) => (x_old, v_old),
            _ => (x_round, v_best),
        });

        let (x, f0) = best.unwrap();
        let slopes = axis_slopes(&axes, &values);
        let spacing = axes.map(|a| a.step());
        let (bound, extra) = local_bracket(ch, objective, &axes, x, f0, &slopes);
        evaluations += extra;
        history.push(RoundRecord { best_value: f0, resolution_bound: bound, spacing });
    }

    let (x, best_value) = best.unwrap();
    let last = *history.last().unwrap();
    OracleResult {
        objective,
        best_strategy: Strategy::from_array(x).expect("incumbent inside the strategy box"),
        best_value,
        resolution_bound: last.resolution_bound,
        spacing: last.spacing,
        evaluations,
        history,
    }
}

fn strides(axes: &[Axis; 4]) -> [usize; 4] {
    [axes[1].n * axes[2].n * axes[3].n, axes[2].n * axes[3].n, axes[3].n, 1]
}

fn decode(axes: &[Axis; 4], idx: usize) -> [f64; 4] {
    let st = strides(axes);
    let mut x = [0.0; 4];
    for i in 0..4 {
        x[i] = axes[i].at((idx / st[i]) % axes[i].n);
    }
    x
}

fn evaluate_grid(ch: &ChannelParams, objective: Objective, axes: &[Axis; 4]) -> Vec<f64> {
    let coords: Vec<Vec<f64>> = axes.iter().map(|a| (0..a.n).map(|k| a.at(k)).collect()).collect();
    let chunk = strides(axes)[0];
    let mut values = vec![0.0; chunk * axes[0].n];
    values.par_chunks_mut(chunk).enumerate().for_each(|(i0, out)| {
        let p1 = coords[0][i0];
        let mut k = 0;
        for &p2 in &coords[1] {
            for &l1 in &coords[2] {
                for &l2 in &coords[3] {
                    out[k] = eval_point(ch, objective, [p1, p2, l1, l2]);
                    k += 1;
                }
            }
        }
    });
    values
}

/// Largest |finite difference| / spacing along each axis over the grid.
fn axis_slopes(axes: &[Axis; 4], values: &[f64]) -> [f64; 4] {
    let st = strides(axes);
    let mut slopes = [0.0f64; 4];
    for i in 0..4 {
        let h = axes[i].step();
        if h <= 0.0 {
            continue;
        }
        let mut max_diff = 0.0f64;
        for idx in 0..values.len() {
            if (idx / st[i]) % axes[i].n + 1 < axes[i].n {
                let d = (values[idx + st[i]] - values[idx]).abs();
                if d.is_finite() {
                    max_diff = max_diff.max(d);
                }
            }
        }
        slopes[i] = max_diff / h;
    }
    slopes
}

fn local_bracket(
    ch: &ChannelParams,
    objective: Objective,
    axes: &[Axis; 4],
    x: [f64; 4],
    f0: f64,
    slopes: &[f64; 4],
) -> (f64, usize) {
    let mut bound = 16.0 * f64::EPSILON * f0.abs().max(1.0);
    let mut evaluations = 0;
    for i in 0..4 {
        let h = axes[i].step();
        if h <= 0.0 {
            continue;
        }
        let mut worst = 0.0f64;
        for sign in [-1.0, 1.0] {
            let target = (x[i] + sign * h).clamp(0.0, axes[i].domain);
            let dist = (target - x[i]).abs();
            if dist == 0.0 {
                continue;
            }
            let mut y = x;
            y[i] = target;
            let f1 = eval_point(ch, objective, y);
            evaluations += 1;
            if !f1.is_finite() {
                continue;
            }
            let lipschitz = slopes[i].max((f1 - f0).abs() / dist);
            worst = worst.max((f1 - f0 + lipschitz * dist) / 2.0);
        }
        bound += worst.max(0.0);
    }
    (bound, evaluations)
}
