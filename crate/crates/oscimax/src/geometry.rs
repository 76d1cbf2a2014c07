//! Approach geometries: vertical lines, tangential power curves, the
//! exponential-order tangential curve, line fields over direction sets,
//! middle-removal Cantor sets with box-counting dimension, and the model
//! alpha-dimensional measure |x|^{alpha-1} dx.

use crate::error::{Error, Result};
use crate::point::Point;
use crate::quad::{adaptive_smooth, ols_slope, GaussRule};

/// Direction sets indexing a line field.
#[derive(Debug, Clone, PartialEq)]
pub enum DirectionSet {
    Singleton(f64),
    Interval(f64, f64),
    Cantor { r: f64, k: u32 },
    /// Dimension-2 product of two one-dimensional sets.
    Product(Box<DirectionSet>, Box<DirectionSet>),
}

impl DirectionSet {
    /// Finite sample used for the sup in direction: all 2^{k+1}
    /// generation-k endpoints for Cantor sets, a uniform grid for
    /// intervals.
    pub fn sample(&self, grid: usize) -> Result<Vec<Point>> {
        Ok(match self {
            DirectionSet::Singleton(v) => vec![Point::D1(*v)],
            DirectionSet::Interval(a, b) => {
                let n = grid.max(2);
                (0..n)
                    .map(|i| Point::D1(a + (b - a) * i as f64 / (n - 1) as f64))
                    .collect()
            }
            DirectionSet::Cantor { r, k } => {
                let set = cantor_intervals(*r, *k)?;
                let mut out = Vec::with_capacity(2 * set.intervals.len());
                for (lo, hi) in &set.intervals {
                    out.push(Point::D1(*lo));
                    out.push(Point::D1(*hi));
                }
                out
            }
            DirectionSet::Product(a, b) => {
                let sa = a.sample(grid)?;
                let sb = b.sample(grid)?;
                let mut out = Vec::with_capacity(sa.len() * sb.len());
                for pa in &sa {
                    for pb in &sb {
                        out.push(Point::D2([pa.scalar(), pb.scalar()]));
                    }
                }
                out
            }
        })
    }
}

/// The approach path feeding the propagator's spatial argument.
#[derive(Debug, Clone, PartialEq)]
pub enum PathSpec {
    Vertical,
    /// x - t^kappa, tangential for kappa < 1.
    PowerCurve { kappa: f64 },
    /// x - (log 1/t)^{-1}, tangential of exponential order.
    ExpTangential,
    /// x + t theta over a direction set.
    LineField { directions: DirectionSet },
}

/// Path output at (x, t), with theta required for line fields.
pub fn path_point(path: &PathSpec, x: Point, t: f64, theta: Option<Point>) -> Result<Point> {
    match path {
        PathSpec::Vertical => Ok(x),
        PathSpec::PowerCurve { kappa } => {
            if !(*kappa > 0.0 && *kappa <= 1.0) {
                return Err(Error::InvalidRequest(format!("kappa {kappa} outside (0,1]")));
            }
            if t < 0.0 {
                return Err(Error::InvalidTime(t));
            }
            Ok(x.map(|c| c - t.powf(*kappa)))
        }
        PathSpec::ExpTangential => {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidTime(t));
            }
            let shift = 1.0 / (1.0 / t).ln();
            Ok(x.map(|c| c - shift))
        }
        PathSpec::LineField { .. } => {
            let theta = theta.ok_or(Error::MissingDirection)?;
            Ok(match (x, theta) {
                (Point::D1(x), Point::D1(th)) => Point::D1(x + t * th),
                (Point::D2([x0, x1]), Point::D2([t0, t1])) => {
                    Point::D2([x0 + t * t0, x1 + t * t1])
                }
                _ => return Err(Error::InvalidRequest("x/theta dimension mismatch".into())),
            })
        }
    }
}

/// Generation-k pre-Cantor set: 2^k closed intervals of length r^k in
/// [0, 1], ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct CantorSet {
    pub r: f64,
    pub k: u32,
    pub intervals: Vec<(f64, f64)>,
}

/// Middle-removal recursion starting from [0, 1]: each interval keeps its
/// two r-scaled ends.
pub fn cantor_intervals(r: f64, k: u32) -> Result<CantorSet> {
    if !(r > 0.0 && r < 0.5) {
        return Err(Error::InvalidRequest(format!("cantor ratio r = {r} outside (0, 1/2)")));
    }
    if k > 24 {
        return Err(Error::TooManyIntervals(1u64 << k));
    }
    let mut intervals = vec![(0.0, 1.0)];
    for _ in 0..k {
        let mut next = Vec::with_capacity(intervals.len() * 2);
        for (lo, hi) in intervals {
            let len = hi - lo;
            next.push((lo, lo + r * len));
            next.push((hi - r * len, hi));
        }
        intervals = next;
    }
    Ok(CantorSet { r, k, intervals })
}

impl CantorSet {
    pub fn interval_len(&self) -> f64 {
        self.r.powi(self.k as i32)
    }

    pub fn total_len(&self) -> f64 {
        (2.0 * self.r).powi(self.k as i32)
    }

    /// Index of the interval containing y, if any.
    pub fn containing_interval(&self, y: f64) -> Option<usize> {
        let idx = self.intervals.partition_point(|(lo, _)| *lo <= y);
        if idx == 0 {
            return None;
        }
        let (lo, hi) = self.intervals[idx - 1];
        (y >= lo && y <= hi).then_some(idx - 1)
    }
}

/// Nearer endpoint theta(y) of the interval containing y; midpoint ties
/// break toward the left endpoint.
pub fn nearest_cantor_endpoint(y: f64, set: &CantorSet) -> Result<f64> {
    let idx = set.containing_interval(y).ok_or(Error::NotInSet(y))?;
    let (lo, hi) = set.intervals[idx];
    Ok(if y - lo <= hi - y { lo } else { hi })
}

/// Box-counting report: per-delta covering counts and the fitted slope of
/// log N_delta against log 1/delta.
#[derive(Debug, Clone)]
pub struct BoxCountReport {
    /// (j, delta = r^j, N_delta)
    pub counts: Vec<(u32, f64, usize)>,
    pub slope: f64,
    pub stderr: f64,
}

/// Smallest number of length-delta intervals covering the union, by the
/// greedy left-to-right placement (optimal in one dimension).
pub fn covering_number(intervals: &[(f64, f64)], delta: f64) -> usize {
    let tol = delta * 1e-9;
    let mut covered = f64::NEG_INFINITY;
    let mut n = 0;
    for (lo, hi) in intervals {
        let mut pos = lo.max(covered);
        while pos < hi - tol {
            n += 1;
            covered = pos + delta;
            pos = covered;
        }
    }
    n
}

/// Minkowski-dimension estimate for the r-Cantor set: count coverings at
/// the natural ladder delta = r^j, j = 1..k_max, and fit the log-log slope.
pub fn minkowski_dim_estimate(r: f64, k_max: u32) -> Result<BoxCountReport> {
    if k_max < 4 {
        return Err(Error::InvalidRequest(format!("k_max = {k_max} must be >= 4")));
    }
    let set = cantor_intervals(r, k_max)?;
    let mut counts = Vec::with_capacity(k_max as usize);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for j in 1..=k_max {
        let delta = r.powi(j as i32);
        let n = covering_number(&set.intervals, delta);
        counts.push((j, delta, n));
        xs.push((1.0 / delta).ln());
        ys.push((n as f64).ln());
    }
    let (slope, _, stderr) = ols_slope(&xs, &ys);
    Ok(BoxCountReport { counts, slope, stderr })
}

/// The model alpha-dimensional measure |x|^{alpha-1} dx.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaMeasure {
    pub alpha: f64,
}

impl AlphaMeasure {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidRequest(format!("alpha = {alpha} outside (0, 1]")));
        }
        Ok(AlphaMeasure { alpha })
    }

    /// Signed antiderivative of the weight: integral_0^v |u|^{alpha-1} du.
    pub fn primitive(&self, v: f64) -> f64 {
        v.signum() * v.abs().powf(self.alpha) / self.alpha
    }

    /// mu([a, b]) in closed form.
    pub fn interval_mass(&self, a: f64, b: f64) -> f64 {
        self.primitive(b) - self.primitive(a)
    }
}

/// integral_a^b g(x) |x|^{alpha-1} dx on [a, b] in [0, 1]: the substitution
/// u = x^alpha removes the singularity near 0, plain Gauss-Legendre covers
/// the rest.
pub fn alpha_measure_integral<F: Fn(f64) -> f64>(
    g: F,
    measure: &AlphaMeasure,
    a: f64,
    b: f64,
) -> f64 {
    if a >= b {
        return 0.0;
    }
    let alpha = measure.alpha;
    let split = b.min(0.1);
    let mut total = 0.0;
    if a < split {
        // integral g(x) x^{alpha-1} dx = (1/alpha) integral g(u^{1/alpha}) du
        let ua = a.powf(alpha);
        let ub = split.powf(alpha);
        total += adaptive_smooth(ua, ub, 1e-10, |u| g(u.powf(1.0 / alpha))) / alpha;
    }
    if b > split && split > a {
        total += adaptive_smooth(split, b, 1e-10, |x| g(x) * x.powf(alpha - 1.0));
    } else if split <= a {
        total += adaptive_smooth(a, b, 1e-10, |x| g(x) * x.powf(alpha - 1.0));
    }
    total
}

/// Quadrature nodes and weights for integrating against mu over [a, b]
/// in [0, 1]: Gauss-Legendre in the u = x^alpha variable, so weights stay
/// positive, sum to mu([a,b]) exactly, and the rule is exact for
/// integrands constant on the interval.
pub fn alpha_measure_nodes(
    measure: &AlphaMeasure,
    a: f64,
    b: f64,
    n_nodes: usize,
) -> Vec<(f64, f64)> {
    let alpha = measure.alpha;
    let rule = GaussRule::legendre(n_nodes.max(2));
    let ua = a.powf(alpha);
    let ub = b.powf(alpha);
    let half = 0.5 * (ub - ua);
    let mid = 0.5 * (ua + ub);
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(x, w)| {
            let u = mid + half * x;
            (u.powf(1.0 / alpha), w * half / alpha)
        })
        .collect()
}

/// max over samples of mu(B(x, radius)) / radius^alpha.
pub fn frostman_ratio(measure: &AlphaMeasure, samples: &[(f64, f64)]) -> f64 {
    samples
        .iter()
        .map(|(x, rad)| measure.interval_mass(x - rad, x + rad) / rad.powf(measure.alpha))
        .fold(0.0, f64::max)
}
