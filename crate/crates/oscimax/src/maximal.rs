//! Grid estimation of sup-in-time (and sup-in-direction) of the evolved
//! data along a path, and the mixed norm L^q_x(d mu) L^inf_t L^inf_theta.
//!
//! The time sup is a scan over a log-spaced coarse grid refined around the
//! running argmax; by construction the returned value is a lower bound of
//! the true sup and never decreases under refinement. Witness times and
//! directions supplied by a scenario are injected into the grid so the
//! analytic lower bounds are attained by the numeric sup.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    alpha_measure_nodes, path_point, AlphaMeasure, CantorSet, DirectionSet, PathSpec,
};
use crate::point::Point;
use crate::propagator::{evaluate, quick_upper_bound, EvalRequest, DEFAULT_PANEL_BUDGET};
use crate::quad::GaussRule;
use crate::spectral::SpectralProfile;

/// Default theta-grid size for interval direction sets (Cantor sets
/// contribute their generation endpoints instead); product axes use a
/// smaller grid.
const THETA_GRID: usize = 17;
const THETA_GRID_PRODUCT: usize = 5;

/// Spatial measure of the mixed norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureKind {
    Lebesgue,
    Alpha(f64),
}

/// One axis of the spatial domain.
#[derive(Debug, Clone, PartialEq)]
pub enum AxisDomain {
    Interval { lo: f64, hi: f64 },
    Cantor(CantorSet),
}

impl AxisDomain {
    fn pieces(&self) -> Vec<(f64, f64)> {
        match self {
            AxisDomain::Interval { lo, hi } => vec![(*lo, *hi)],
            AxisDomain::Cantor(set) => set.intervals.clone(),
        }
    }
}

/// Spatial domain: a line segment / pre-Cantor set, or a 2D product.
/// `negate` evaluates the integrand at -x (measures here are symmetric),
/// matching the sign convention of the witness constructions.
#[derive(Debug, Clone, PartialEq)]
pub enum XDomain {
    Line { axis: AxisDomain, negate: bool },
    Plane { axes: [AxisDomain; 2], negate: bool },
}

/// Time-grid shape: log-spaced coarse scan plus local refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TGrid {
    pub coarse_size: usize,
    pub refine_levels: u32,
    pub refine_factor: usize,
}

impl Default for TGrid {
    fn default() -> Self {
        TGrid { coarse_size: 64, refine_levels: 3, refine_factor: 8 }
    }
}

/// Mixed-norm specification.
#[derive(Debug, Clone)]
pub struct MixedNormSpec {
    pub q: f64,
    pub measure: MeasureKind,
    pub x_domain: XDomain,
    /// Scan window, contained in (0, 1]. Injected witness times may sit
    /// outside the window (the sup contract is over the full unit
    /// interval) but must be positive.
    pub t_window: (f64, f64),
    /// Overrides the path's own direction set when present.
    pub direction_set: Option<DirectionSet>,
    /// Quadrature nodes per interval (per axis in dimension 2).
    pub x_nodes: usize,
    pub t_grid: TGrid,
    /// Propagator tolerance for each grid evaluation.
    pub eval_rel_tol: f64,
    pub allow_large_support: bool,
    /// Grid size for interval direction sets; None uses the default.
    pub theta_grid: Option<usize>,
}

impl MixedNormSpec {
    pub fn new(q: f64, measure: MeasureKind, x_domain: XDomain, t_window: (f64, f64)) -> Self {
        MixedNormSpec {
            q,
            measure,
            x_domain,
            t_window,
            direction_set: None,
            x_nodes: 4,
            t_grid: TGrid::default(),
            eval_rel_tol: 1e-7,
            allow_large_support: false,
            theta_grid: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.q >= 1.0 && self.q <= 64.0) {
            return Err(Error::SpecOutOfRange(format!("q = {} outside [1, 64]", self.q)));
        }
        let (t0, t1) = self.t_window;
        if !(t0 > 0.0 && t0 <= t1 && t1 <= 1.0) {
            return Err(Error::SpecOutOfRange(format!(
                "t window ({t0}, {t1}) not inside (0, 1]"
            )));
        }
        if let MeasureKind::Alpha(alpha) = self.measure {
            AlphaMeasure::new(alpha)?;
            if matches!(self.x_domain, XDomain::Plane { .. }) {
                return Err(Error::SpecOutOfRange(
                    "alpha measures are one-dimensional here; use Lebesgue in the plane".into(),
                ));
            }
        }
        if self.t_grid.coarse_size < 64 {
            return Err(Error::SpecOutOfRange(format!(
                "coarse t-grid size {} below the 64-point floor",
                self.t_grid.coarse_size
            )));
        }
        Ok(())
    }
}

/// Witness data injected into the scan at one spatial point.
#[derive(Debug, Clone, Copy)]
pub struct WitnessPoint {
    pub t: f64,
    pub theta: Option<Point>,
}

/// Map from a spatial point to its witness time/direction.
pub type WitnessMap = dyn Fn(Point) -> WitnessPoint + Sync;

fn log_spaced(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    if t0 == t1 || n < 2 {
        return vec![t0];
    }
    let (l0, l1) = (t0.ln(), t1.ln());
    (0..n)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn theta_samples(path: &PathSpec, spec: &MixedNormSpec) -> Result<Vec<Option<Point>>> {
    let set = match (&spec.direction_set, path) {
        (Some(set), _) => Some(set),
        (None, PathSpec::LineField { directions }) => Some(directions),
        _ => None,
    };
    Ok(match set {
        None => vec![None],
        Some(set) => {
            let grid = spec.theta_grid.unwrap_or(match set {
                DirectionSet::Product(_, _) => THETA_GRID_PRODUCT,
                _ => THETA_GRID,
            });
            set.sample(grid)?.into_iter().map(Some).collect()
        }
    })
}

/// sup over the scanned (t, theta) grid of |S_t^m f(path(x, t, theta))|.
/// Lower bound of the true sup; nondecreasing in refinement depth.
pub fn maximal_in_time(
    profile: &SpectralProfile,
    m: f64,
    path: &PathSpec,
    x: Point,
    spec: &MixedNormSpec,
    witness: Option<WitnessPoint>,
) -> Result<f64> {
    spec.validate()?;
    let mut thetas = theta_samples(path, spec)?;
    if let Some(w) = witness {
        if let Some(th) = w.theta {
            thetas.push(Some(th));
        }
    }

    // running_best lets the direction scan skip provably non-competitive
    // (t, theta) pairs via the integration-by-parts upper bound; skipped
    // values are strictly below the returned maximum, so the lower-bound
    // contract is intact.
    let value_at = |t: f64, running_best: f64| -> Result<f64> {
        let mut best: f64 = 0.0;
        for theta in &thetas {
            let pos = path_point(path, x, t, *theta)?;
            let mut req = EvalRequest::new(profile, m, pos, t);
            req.rel_tol = spec.eval_rel_tol;
            req.panel_budget = DEFAULT_PANEL_BUDGET;
            req.allow_large_support = spec.allow_large_support;
            if quick_upper_bound(&req) < best.max(running_best) {
                continue;
            }
            best = best.max(evaluate(&req)?.norm());
        }
        Ok(best)
    };

    let mut ts = log_spaced(spec.t_window.0, spec.t_window.1, spec.t_grid.coarse_size);
    if let Some(w) = witness {
        if w.t > 0.0 && w.t <= 1.0 {
            ts.push(w.t);
        }
    }
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup();

    // seed the scan with the witness pair so its value is never pruned
    let mut seed_best: f64 = 0.0;
    if let Some(w) = witness {
        let pos = path_point(path, x, w.t, w.theta)?;
        let mut req = EvalRequest::new(profile, m, pos, w.t);
        req.rel_tol = spec.eval_rel_tol;
        req.allow_large_support = spec.allow_large_support;
        seed_best = evaluate(&req)?.norm();
    }

    let mut values = Vec::with_capacity(ts.len());
    for &t in &ts {
        values.push(value_at(t, seed_best)?);
    }
    let mut best_idx = 0;
    let mut best = values[0];
    for (i, v) in values.iter().enumerate() {
        if *v > best {
            best = *v;
            best_idx = i;
        }
    }
    best = best.max(seed_best);

    // refine around the running argmax
    let mut bracket = (
        if best_idx == 0 { ts[0] } else { ts[best_idx - 1] },
        ts[best_idx],
        if best_idx + 1 == ts.len() { ts[best_idx] } else { ts[best_idx + 1] },
    );
    for _ in 0..spec.t_grid.refine_levels {
        let (lo, mid, hi) = bracket;
        if hi - lo <= f64::EPSILON * mid.abs() {
            break;
        }
        let n = spec.t_grid.refine_factor.max(2);
        let mut local: Vec<f64> = (0..=n)
            .map(|i| lo + (hi - lo) * i as f64 / n as f64)
            .collect();
        local.push(mid);
        local.sort_by(|a, b| a.partial_cmp(b).unwrap());
        local.dedup();
        let mut loc_best = best;
        let mut loc_idx = local.iter().position(|&t| t == mid).unwrap_or(0);
        for (i, &t) in local.iter().enumerate() {
            let v = value_at(t, loc_best)?;
            if v > loc_best {
                loc_best = v;
                loc_idx = i;
            }
        }
        best = loc_best;
        bracket = (
            if loc_idx == 0 { local[0] } else { local[loc_idx - 1] },
            local[loc_idx],
            if loc_idx + 1 == local.len() { local[loc_idx] } else { local[loc_idx + 1] },
        );
    }
    Ok(best)
}

/// Quadrature nodes (point, weight) covering the spatial domain so that
/// sum of weights equals mu(domain) exactly and weights stay positive.
fn domain_nodes(spec: &MixedNormSpec) -> Result<Vec<(Point, f64)>> {
    let axis_nodes = |axis: &AxisDomain, measure: &MeasureKind, n: usize| -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for (lo, hi) in axis.pieces() {
            match measure {
                MeasureKind::Lebesgue => {
                    let rule = GaussRule::legendre(n.max(2));
                    let half = 0.5 * (hi - lo);
                    let mid = 0.5 * (lo + hi);
                    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                        out.push((mid + half * x, w * half));
                    }
                }
                MeasureKind::Alpha(alpha) => {
                    let mu = AlphaMeasure::new(*alpha).expect("validated");
                    out.extend(alpha_measure_nodes(&mu, lo, hi, n));
                }
            }
        }
        out
    };

    Ok(match &spec.x_domain {
        XDomain::Line { axis, negate } => {
            let sign = if *negate { -1.0 } else { 1.0 };
            axis_nodes(axis, &spec.measure, spec.x_nodes)
                .into_iter()
                .map(|(x, w)| (Point::D1(sign * x), w))
                .collect()
        }
        XDomain::Plane { axes, negate } => {
            let sign = if *negate { -1.0 } else { 1.0 };
            let a = axis_nodes(&axes[0], &spec.measure, spec.x_nodes);
            let b = axis_nodes(&axes[1], &spec.measure, spec.x_nodes);
            let mut out = Vec::with_capacity(a.len() * b.len());
            for (xa, wa) in &a {
                for (xb, wb) in &b {
                    out.push((Point::D2([sign * xa, sign * xb]), wa * wb));
                }
            }
            out
        }
    })
}

/// ( integral over the domain of maximal_in_time(x)^q d mu(x) )^{1/q}.
/// Spatial nodes evaluate in parallel; the power sum is reduced in
/// ascending node order so results are identical across thread counts.
pub fn mixed_norm(
    profile: &SpectralProfile,
    m: f64,
    path: &PathSpec,
    spec: &MixedNormSpec,
    witness: Option<&WitnessMap>,
) -> Result<f64> {
    spec.validate()?;
    let nodes = domain_nodes(spec)?;
    let values: Vec<Result<f64>> = nodes
        .par_iter()
        .map(|(x, _)| {
            let w = witness.map(|wit| wit(*x));
            maximal_in_time(profile, m, path, *x, spec, w)
        })
        .collect();
    let mut acc = 0.0;
    for ((_, weight), value) in nodes.iter().zip(values) {
        acc += weight * value?.powf(spec.q);
    }
    Ok(acc.powf(1.0 / spec.q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_profile, Band, PhaseKind};
    use approx::assert_relative_eq;

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    fn tiny_band() -> SpectralProfile {
        // narrow symmetric band: |S_t f| is constant to ~1e-13 over the
        // domains below, which makes the norm's measure bookkeeping exact
        make_profile(1, vec![Band::line(-5e-5, 5e-5, 1.0, PhaseKind::None)]).unwrap()
    }

    #[test]
    fn degenerate_window_is_single_evaluation() {
        let p = make_profile(1, vec![Band::line(0.0, TAU, 1.0, PhaseKind::None)]).unwrap();
        let spec = MixedNormSpec::new(
            2.0,
            MeasureKind::Lebesgue,
            XDomain::Line { axis: AxisDomain::Interval { lo: 0.0, hi: 1.0 }, negate: false },
            (0.5, 0.5),
        );
        let v = maximal_in_time(&p, 2.0, &PathSpec::Vertical, Point::D1(0.3), &spec, None).unwrap();
        let req = EvalRequest::new(&p, 2.0, Point::D1(0.3), 0.5);
        assert_relative_eq!(v, evaluate(&req).unwrap().norm(), max_relative = 1e-12);
    }

    #[test]
    fn refinement_is_monotone() {
        let p = make_profile(1, vec![Band::line(0.0, 12.0, 1.0, PhaseKind::None)]).unwrap();
        let mut spec = MixedNormSpec::new(
            2.0,
            MeasureKind::Lebesgue,
            XDomain::Line { axis: AxisDomain::Interval { lo: 0.0, hi: 1.0 }, negate: false },
            (1e-3, 1.0),
        );
        let x = Point::D1(0.21);
        let mut prev = 0.0;
        for levels in [0u32, 1, 2, 4] {
            spec.t_grid.refine_levels = levels;
            let v = maximal_in_time(&p, 2.0, &PathSpec::Vertical, x, &spec, None).unwrap();
            assert!(v >= prev - 1e-15, "levels={levels}: {v} < {prev}");
            prev = v;
        }
    }

    #[test]
    fn constant_integrand_matches_measure_power() {
        // c * L^{1/q} for constant integrand c over a domain of measure L
        let p = tiny_band();
        let c = 1e-4 / TAU;
        for q in [1.0, 2.0, 4.0] {
            let spec = MixedNormSpec::new(
                q,
                MeasureKind::Lebesgue,
                XDomain::Line { axis: AxisDomain::Interval { lo: -0.01, hi: 0.01 }, negate: false },
                (0.9, 1.0),
            );
            let v = mixed_norm(&p, 2.0, &PathSpec::Vertical, &spec, None).unwrap();
            assert_relative_eq!(v, c * (0.02f64).powf(1.0 / q), max_relative = 1e-8);
        }
    }

    #[test]
    fn constant_integrand_alpha_measure() {
        let p = tiny_band();
        let c = 1e-4 / TAU;
        let alpha = 0.5;
        let spec = MixedNormSpec::new(
            2.0,
            MeasureKind::Alpha(alpha),
            XDomain::Line { axis: AxisDomain::Interval { lo: 0.0, hi: 0.04 }, negate: false },
            (0.9, 1.0),
        );
        let v = mixed_norm(&p, 2.0, &PathSpec::Vertical, &spec, None).unwrap();
        let mass = (0.04f64).powf(alpha) / alpha;
        assert_relative_eq!(v, c * mass.sqrt(), max_relative = 1e-8);
    }

    #[test]
    fn cantor_domain_measure_bookkeeping() {
        let p = tiny_band();
        let c = 1e-4 / TAU;
        let set = crate::geometry::cantor_intervals(0.2, 4).unwrap();
        let total = set.total_len();
        let spec = MixedNormSpec::new(
            4.0,
            MeasureKind::Lebesgue,
            XDomain::Line { axis: AxisDomain::Cantor(set), negate: true },
            (0.9, 1.0),
        );
        let v = mixed_norm(&p, 2.0, &PathSpec::Vertical, &spec, None).unwrap();
        assert_relative_eq!(v, c * total.powf(0.25), max_relative = 1e-8);
    }

    #[test]
    fn amplitude_homogeneity() {
        let p = make_profile(1, vec![Band::line(0.0, 8.0, 1.0, PhaseKind::None)]).unwrap();
        let spec = MixedNormSpec::new(
            2.0,
            MeasureKind::Lebesgue,
            XDomain::Line { axis: AxisDomain::Interval { lo: 0.0, hi: 0.5 }, negate: false },
            (0.01, 1.0),
        );
        let n1 = mixed_norm(&p, 2.0, &PathSpec::Vertical, &spec, None).unwrap();
        let n3 = mixed_norm(&p.scaled(3.0), 2.0, &PathSpec::Vertical, &spec, None).unwrap();
        assert_relative_eq!(n3, 3.0 * n1, max_relative = 1e-10);
    }

    #[test]
    fn q_out_of_range_rejected() {
        let p = tiny_band();
        let spec = MixedNormSpec::new(
            65.0,
            MeasureKind::Lebesgue,
            XDomain::Line { axis: AxisDomain::Interval { lo: 0.0, hi: 1.0 }, negate: false },
            (0.5, 1.0),
        );
        assert!(matches!(
            mixed_norm(&p, 2.0, &PathSpec::Vertical, &spec, None),
            Err(Error::SpecOutOfRange(_))
        ));
    }

    #[test]
    fn witness_injection_reaches_analytic_floor() {
        // the fractal-lines configuration at one rung: without injection a
        // coarse grid over the window could miss the witness time; with it
        // the small-phase floor must be met at every node
        let r: f64 = 0.2;
        let k = 3u32;
        let lambda = r.powi(-(k as i32));
        let c = 0.125;
        let m = 2.0;
        let p = make_profile(
            1,
            vec![Band::line(0.0, c * lambda, 1.0, PhaseKind::NegativeDispersion { m })],
        )
        .unwrap();
        let set = crate::geometry::cantor_intervals(r, k).unwrap();
        let tau = 0.5 * lambda.powf(-m);
        let path = PathSpec::LineField { directions: DirectionSet::Cantor { r, k } };
        let mut spec = MixedNormSpec::new(
            4.0,
            MeasureKind::Lebesgue,
            XDomain::Line { axis: AxisDomain::Cantor(set.clone()), negate: true },
            (1.0 - lambda.powf(-m), 1.0 - 1e-3 * lambda.powf(-m)),
        );
        spec.x_nodes = 2;
        let witness = move |x: Point| {
            let y = -x.scalar();
            let theta = crate::geometry::nearest_cantor_endpoint(y, &set).unwrap();
            WitnessPoint { t: 1.0 - tau, theta: Some(Point::D1(theta)) }
        };
        let norm = mixed_norm(&p, m, &path, &spec, Some(&witness)).unwrap();
        let floor = (0.5f64).cos() * (c * lambda / TAU) * (2.0 * r).powi(k as i32).powf(0.25);
        assert!(norm >= floor, "norm {norm} < floor {floor}");
        // and the triangle-inequality ceiling
        let ceil = (c * lambda / TAU) * (2.0 * r).powi(k as i32).powf(0.25);
        assert!(norm <= ceil * (1.0 + 1e-6), "norm {norm} > ceil {ceil}");
    }
}
