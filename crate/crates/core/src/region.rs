//! Achievable secrecy-rate regions: grid sampling, Pareto frontier and the
//! time-sharing convex hull.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{secrecy_rates, ChannelParams, PowerConstraint, RatePair, Strategy, User};
use crate::optima::single_user_point;
use crate::oracle::GridSpec;

/// Cross products at or below this magnitude count as collinear.
pub const COLLINEAR_TOLERANCE: f64 = 1e-12;

/// A Pareto-maximal sample and the strategy that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub strategy: Strategy,
    pub rates: RatePair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexSource {
    Origin,
    AxisIntercept,
    Frontier,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HullVertex {
    pub r1: f64,
    pub r2: f64,
    pub source: VertexSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionParameters {
    pub channel: ChannelParams,
    pub power: PowerConstraint,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionEstimate {
    /// Sorted by `r1` ascending; no sample dominates another.
    pub frontier: Vec<FrontierPoint>,
    /// Counterclockwise from the origin.
    pub hull: Vec<HullVertex>,
    pub with_artificial_noise: bool,
    pub parameters: RegionParameters,
}

fn axis(n: usize, hi: f64) -> Vec<f64> {
    (0..n).map(|k| if k + 1 == n { hi } else { hi * k as f64 / (n - 1) as f64 }).collect()
}

/// Samples the rate region on a uniform strategy grid.
///
/// Power axes use `grid.n_power()` points on `[0, P]`; split axes use
/// `grid.n_lambda()` points on `[0, 1]`, or are pinned at zero without
/// artificial noise. Refinement settings are ignored. With artificial noise
/// the axis intercepts come from the exact single-user points; otherwise they
/// are the largest sampled rates.
pub fn sample_region(
    ch: &ChannelParams,
    power: PowerConstraint,
    grid: &GridSpec,
    allow_artificial_noise: bool,
) -> RegionEstimate {
    let powers = axis(grid.n_power(), power.peak());
    let splits = if allow_artificial_noise { axis(grid.n_lambda(), 1.0) } else { vec![0.0] };

    let per_p1 = powers.len() * splits.len() * splits.len();
    let mut samples = vec![RatePair::from_raw(0.0, 0.0); powers.len() * per_p1];
    samples.par_chunks_mut(per_p1).enumerate().for_each(|(i, out)| {
        let mut k = 0;
        for &p2 in &powers {
            for &l1 in &splits {
                for &l2 in &splits {
                    let s = Strategy::new(powers[i], p2, l1, l2).expect("grid strategy");
                    out[k] = secrecy_rates(ch, &s);
                    k += 1;
                }
            }
        }
    });

    let strategy_at = |idx: usize| {
        let n_l = splits.len();
        let (i, rest) = (idx / per_p1, idx % per_p1);
        let (j, rest) = (rest / (n_l * n_l), rest % (n_l * n_l));
        Strategy::new(powers[i], powers[j], splits[rest / n_l], splits[rest % n_l]).expect("grid strategy")
    };

    let frontier: Vec<FrontierPoint> = pareto_indices(&samples)
        .into_iter()
        .map(|idx| FrontierPoint { strategy: strategy_at(idx), rates: samples[idx] })
        .collect();

    let mut intercept1 = frontier.iter().map(|f| f.rates.r1()).fold(0.0, f64::max);
    let mut intercept2 = frontier.iter().map(|f| f.rates.r2()).fold(0.0, f64::max);
    if allow_artificial_noise && ch.has_secrecy() {
        // the grid undersamples the sharp single-user corner
        if let Ok(su) = single_user_point(ch, power, User::One) {
            intercept1 = intercept1.max(su.r_su_star.max(0.0));
            intercept2 = intercept2.max(su.r_su_star.max(0.0));
        }
    }

    // anchors first so they win over coincident frontier samples
    let mut points = vec![
        HullVertex { r1: 0.0, r2: 0.0, source: VertexSource::Origin },
        HullVertex { r1: intercept1, r2: 0.0, source: VertexSource::AxisIntercept },
        HullVertex { r1: 0.0, r2: intercept2, source: VertexSource::AxisIntercept },
    ];
    points.extend(frontier.iter().map(|f| HullVertex {
        r1: f.rates.r1(),
        r2: f.rates.r2(),
        source: VertexSource::Frontier,
    }));

    RegionEstimate {
        frontier,
        hull: convex_hull(points),
        with_artificial_noise: allow_artificial_noise,
        parameters: RegionParameters { channel: *ch, power, grid: *grid },
    }
}

/// Indices of the Pareto-maximal clamped pairs, ordered by `r1` ascending.
///
/// Sorts by `r1` descending (then `r2` descending, then index) and keeps every
/// pair whose `r2` strictly exceeds all pairs before it. Exact duplicates keep
/// the lowest index.
pub fn pareto_indices(samples: &[RatePair]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&samples[i], &samples[j]);
        b.r1().total_cmp(&a.r1()).then(b.r2().total_cmp(&a.r2())).then(i.cmp(&j))
    });
    let mut kept = Vec::new();
    let mut best_r2 = f64::NEG_INFINITY;
    for idx in order {
        if samples[idx].r2() > best_r2 {
            best_r2 = samples[idx].r2();
            kept.push(idx);
        }
    }
    kept.reverse();
    kept
}

fn cross(o: &HullVertex, a: &HullVertex, b: &HullVertex) -> f64 {
    (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1)
}

/// Andrew's monotone chain. Returns vertices counterclockwise starting from the
/// lowest-leftmost point, dropping collinear points. When two input points
/// coincide the one listed first wins.
pub fn convex_hull(mut points: Vec<HullVertex>) -> Vec<HullVertex> {
    // stable sort keeps the earlier source on exact duplicates
    points.sort_by(|a, b| a.r1.total_cmp(&b.r1).then(a.r2.total_cmp(&b.r2)));
    points.dedup_by(|b, a| a.r1 == b.r1 && a.r2 == b.r2);
    if points.len() < 3 {
        return points;
    }

    let mut lower: Vec<HullVertex> = Vec::new();
    for p in &points {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= COLLINEAR_TOLERANCE {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<HullVertex> = Vec::new();
    for p in points.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= COLLINEAR_TOLERANCE {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Coordinate-wise convex combination `(1 - fraction) a + fraction b` of the
/// achieved (clamped) rates. The result carries those rates as its raw values,
/// since a negative bound only ever contributes rate zero to a time share.
pub fn timeshare(point_a: &RatePair, point_b: &RatePair, fraction: f64) -> Result<RatePair> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::domain(format!("time-sharing fraction must lie in [0, 1], got {fraction}")));
    }
    let mix = |x: f64, y: f64| (1.0 - fraction) * x + fraction * y;
    Ok(RatePair::from_raw(mix(point_a.r1(), point_b.r1()), mix(point_a.r2(), point_b.r2())))
}

fn segment_distance(p: (f64, f64), a: &HullVertex, b: &HullVertex) -> f64 {
    let (dx, dy) = (b.r1 - a.r1, b.r2 - a.r2);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { (((p.0 - a.r1) * dx + (p.1 - a.r2) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p.0 - (a.r1 + t * dx)).hypot(p.1 - (a.r2 + t * dy))
}

/// Euclidean distance from `(r1, r2)` to the hull polygon (zero inside).
pub fn hull_distance(hull: &[HullVertex], r1: f64, r2: f64) -> f64 {
    let p = (r1, r2);
    match hull.len() {
        0 => f64::INFINITY,
        1 => (r1 - hull[0].r1).hypot(r2 - hull[0].r2),
        2 => segment_distance(p, &hull[0], &hull[1]),
        n => {
            let probe = HullVertex { r1, r2, source: VertexSource::Frontier };
            let inside = (0..n).all(|k| cross(&hull[k], &hull[(k + 1) % n], &probe) >= 0.0);
            if inside {
                0.0
            } else {
                (0..n).map(|k| segment_distance(p, &hull[k], &hull[(k + 1) % n])).fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// Whether the clamped pair lies within `tol` of the region's hull.
pub fn hull_contains(region: &RegionEstimate, point: &RatePair, tol: f64) -> bool {
    hull_distance(&region.hull, point.r1(), point.r2()) <= tol
}
