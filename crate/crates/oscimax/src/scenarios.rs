//! Counterexample constructions as runnable scenarios: band-limited data,
//! approach path, spatial domain, witness map, and a small-phase
//! certificate checked at build time. Ladders over the frequency scale
//! produce log-log slope fits that are compared against the closed-form
//! blow-up exponents.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    cantor_intervals, nearest_cantor_endpoint, path_point, AlphaMeasure, DirectionSet, PathSpec,
};
use crate::maximal::{
    mixed_norm, AxisDomain, MeasureKind, MixedNormSpec, TGrid, WitnessPoint, XDomain,
};
use crate::point::Point;
use crate::propagator::{phase_bound, EvalRequest};
use crate::quad::ols_slope;
use crate::rng::stream_rng;
use crate::spectral::{make_profile, sobolev_norm, Band, PhaseKind, SpectralProfile};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// The encoded constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    /// Curve row with data on [lambda, lambda + 1/lambda]; witness time
    /// solved numerically. Exploratory: no phase certificate.
    TangentialRow1,
    /// Curve row showing the (1 - alpha)/2 threshold.
    TangentialRow2,
    /// Curve row showing the (1 - m alpha kappa)/2 threshold.
    TangentialRow3,
    /// Tangential approach of exponential order.
    ExpTangential,
    /// Line field over a Cantor direction set, d = 1.
    FractalLines1D,
    /// d = 2, directions C(r) x {0}.
    FractalLines2DLow,
    /// d = 2, directions C(r) x [0, 1].
    FractalLines2DHigh,
    /// Cantor line field against the alpha-dimensional measure.
    AlphaFractalRemark,
    /// Randomized probe of the sufficiency bound for frequency-localized
    /// data. No certificate; the bound is an upper-bound check.
    SufficiencyProbe,
}

impl ScenarioId {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioId::TangentialRow1 => "tangential-row1",
            ScenarioId::TangentialRow2 => "tangential-row2",
            ScenarioId::TangentialRow3 => "tangential-row3",
            ScenarioId::ExpTangential => "exp-tangential",
            ScenarioId::FractalLines1D => "fractal-lines-1d",
            ScenarioId::FractalLines2DLow => "fractal-lines-2d-low",
            ScenarioId::FractalLines2DHigh => "fractal-lines-2d-high",
            ScenarioId::AlphaFractalRemark => "alpha-fractal-remark",
            ScenarioId::SufficiencyProbe => "sufficiency-probe",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "tangential-row1" => ScenarioId::TangentialRow1,
            "tangential-row2" => ScenarioId::TangentialRow2,
            "tangential-row3" => ScenarioId::TangentialRow3,
            "exp-tangential" => ScenarioId::ExpTangential,
            "fractal-lines-1d" => ScenarioId::FractalLines1D,
            "fractal-lines-2d-low" => ScenarioId::FractalLines2DLow,
            "fractal-lines-2d-high" => ScenarioId::FractalLines2DHigh,
            "alpha-fractal-remark" => ScenarioId::AlphaFractalRemark,
            "sufficiency-probe" => ScenarioId::SufficiencyProbe,
            other => return Err(Error::InvalidParams(format!("unknown scenario '{other}'"))),
        })
    }

    /// Ladders over k mean lambda = r^{-k} for Cantor scenarios and
    /// lambda = 2^k otherwise.
    pub fn uses_cantor_ladder(&self) -> bool {
        matches!(
            self,
            ScenarioId::FractalLines1D
                | ScenarioId::FractalLines2DLow
                | ScenarioId::FractalLines2DHigh
                | ScenarioId::AlphaFractalRemark
        )
    }
}

/// Direction set used by the fractal-lines family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionMode {
    /// The r-Cantor set (generation-k endpoints as witnesses).
    Cantor,
    /// Theta = {0}: the vertical-line degenerate case, beta = 0.
    Origin,
    /// Theta = [0, 1]: full-dimensional case, beta = 1, theta(y) = y.
    UnitInterval,
}

/// Scenario parameters; unused fields are ignored per id.
#[derive(Debug, Clone, Copy)]
pub struct ScenarioParams {
    pub m: f64,
    pub kappa: f64,
    pub q: f64,
    /// None means Lebesgue spatial measure.
    pub alpha: Option<f64>,
    /// Regularity used for the Sobolev column of the ratio.
    pub s: f64,
    /// Cantor ratio.
    pub r: f64,
    /// Band constant for D_1 = [0, c lambda] and D_2 = [0, c lambda]^2.
    pub c: f64,
    pub seed: u64,
    /// Random profiles per rung of the sufficiency probe.
    pub trials: usize,
    pub direction: DirectionMode,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            m: 2.0,
            kappa: 0.5,
            q: 2.0,
            alpha: None,
            s: 0.0,
            r: 0.2,
            c: 0.125,
            seed: 0,
            trials: 20,
            direction: DirectionMode::Cantor,
        }
    }
}

impl ScenarioParams {
    fn validate(&self) -> Result<()> {
        if !(self.m > 1.0) {
            return Err(Error::InvalidParams(format!("m = {} must be > 1", self.m)));
        }
        if !(self.kappa > 0.0 && self.kappa <= 1.0) {
            return Err(Error::InvalidParams(format!("kappa = {} outside (0,1]", self.kappa)));
        }
        if !(self.q >= 1.0) {
            return Err(Error::InvalidParams(format!("q = {} must be >= 1", self.q)));
        }
        if let Some(alpha) = self.alpha {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::InvalidParams(format!("alpha = {alpha} outside (0,1]")));
            }
        }
        if !(self.r > 0.0 && self.r < 0.5) {
            return Err(Error::InvalidParams(format!("r = {} outside (0, 1/2)", self.r)));
        }
        if !(self.c > 0.0 && self.c <= 0.125) {
            return Err(Error::InvalidParams(format!(
                "band constant c = {} outside (0, 1/8] needed by the phase certificate",
                self.c
            )));
        }
        Ok(())
    }

    fn measure(&self) -> MeasureKind {
        match self.alpha {
            Some(a) if a < 1.0 => MeasureKind::Alpha(a),
            _ => MeasureKind::Lebesgue,
        }
    }

    fn alpha_value(&self) -> f64 {
        self.alpha.unwrap_or(1.0)
    }
}

type WitnessFn = Box<dyn Fn(Point) -> WitnessPoint + Send + Sync>;

/// A fully specified rung: profile, path, norm spec and witness map.
pub struct ScenarioInstance {
    pub id: ScenarioId,
    pub params: ScenarioParams,
    pub lambda: f64,
    pub k: Option<u32>,
    pub m: f64,
    pub profile: SpectralProfile,
    pub path: PathSpec,
    pub norm_spec: MixedNormSpec,
    pub witness: Option<WitnessFn>,
    /// Per-trial profiles for the sufficiency probe.
    pub trial_profiles: Vec<SpectralProfile>,
    pub exploratory: bool,
}

impl ScenarioInstance {
    /// Closed-form floor cos(1/2) (2 pi)^{-d} (band mass) mu(domain)^{1/q}
    /// that a certified witness a guarantees for the mixed norm.
    pub fn guaranteed_lower_bound(&self) -> Option<f64> {
        if self.exploratory {
            return None;
        }
        let d = self.profile.dimension() as i32;
        let mass = self.profile.band_mass() * TAU.powi(-d);
        Some(0.5f64.cos() * mass * self.domain_mass().powf(1.0 / self.norm_spec.q))
    }

    /// mu(x_domain) in closed form.
    pub fn domain_mass(&self) -> f64 {
        let axis_mass = |axis: &AxisDomain, measure: &MeasureKind| -> f64 {
            let pieces = match axis {
                AxisDomain::Interval { lo, hi } => vec![(*lo, *hi)],
                AxisDomain::Cantor(set) => set.intervals.clone(),
            };
            pieces
                .iter()
                .map(|(lo, hi)| match measure {
                    MeasureKind::Lebesgue => hi - lo,
                    MeasureKind::Alpha(a) => {
                        AlphaMeasure::new(*a).expect("validated").interval_mass(*lo, *hi)
                    }
                })
                .sum()
        };
        match &self.norm_spec.x_domain {
            XDomain::Line { axis, .. } => axis_mass(axis, &self.norm_spec.measure),
            XDomain::Plane { axes, .. } => {
                axis_mass(&axes[0], &self.norm_spec.measure)
                    * axis_mass(&axes[1], &self.norm_spec.measure)
            }
        }
    }
}

/// Points the build-time certificate checks: interval midpoints of every
/// domain piece (the worst case for the endpoint-witness distance).
fn certificate_points(domain: &XDomain) -> Vec<Point> {
    let axis_mids = |axis: &AxisDomain| -> Vec<f64> {
        match axis {
            AxisDomain::Interval { lo, hi } => {
                (1..=7).map(|i| lo + (hi - lo) * i as f64 / 8.0).collect()
            }
            AxisDomain::Cantor(set) => {
                set.intervals.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect()
            }
        }
    };
    match domain {
        XDomain::Line { axis, negate } => {
            let sign = if *negate { -1.0 } else { 1.0 };
            axis_mids(axis).into_iter().map(|x| Point::D1(sign * x)).collect()
        }
        XDomain::Plane { axes, negate } => {
            let sign = if *negate { -1.0 } else { 1.0 };
            let a = axis_mids(&axes[0]);
            let b = axis_mids(&axes[1]);
            let b_thin: Vec<f64> = b.iter().step_by((b.len() / 3).max(1)).copied().collect();
            let mut out = Vec::new();
            for xa in &a {
                for xb in &b_thin {
                    out.push(Point::D2([sign * xa, sign * xb]));
                }
            }
            out
        }
    }
}

/// Verifies phase_bound <= 1/2 at the witness of every certificate point.
fn run_phase_certificate(instance: &ScenarioInstance) -> Result<()> {
    let witness = instance.witness.as_ref().expect("certified scenarios carry a witness");
    for x in certificate_points(&instance.norm_spec.x_domain) {
        let w = witness(x);
        let pos = path_point(&instance.path, x, w.t, w.theta)?;
        let mut req = EvalRequest::new(&instance.profile, instance.m, pos, w.t);
        req.allow_large_support = instance.norm_spec.allow_large_support;
        let bound = phase_bound(&req)?;
        if bound > 0.5 {
            return Err(Error::PhaseCertificateFailed(format!(
                "witness phase {bound:.6} > 1/2 at x = {x:?} (lambda = {})",
                instance.lambda
            )));
        }
    }
    Ok(())
}

fn indicator_profile(dim: usize, hi: f64, phase: PhaseKind) -> Result<SpectralProfile> {
    match dim {
        1 => make_profile(1, vec![Band::line(0.0, hi, 1.0, phase)]),
        2 => make_profile(2, vec![Band::rect([0.0, 0.0], [hi, hi], 1.0, phase)]),
        _ => unreachable!(),
    }
}

/// Builds one rung. `k` is the ladder index: lambda = r^{-k} for Cantor
/// scenarios, lambda = 2^k otherwise.
pub fn build_scenario(id: ScenarioId, params: &ScenarioParams, k: u32) -> Result<ScenarioInstance> {
    params.validate()?;
    let lambda = if id.uses_cantor_ladder() {
        params.r.powi(-(k as i32))
    } else {
        (2.0f64).powi(k as i32)
    };
    let m = params.m;
    let q = params.q;

    let mut instance = match id {
        ScenarioId::TangentialRow2 => {
            let hi = lambda.powf(1.0 / m) / 100.0;
            let profile = indicator_profile(1, hi, PhaseKind::None)?;
            let x_hi = lambda.powf(-1.0 / m) / 100.0;
            let kappa = params.kappa;
            let t_cap = lambda.recip() / 100.0;
            let witness: WitnessFn = Box::new(move |x: Point| {
                let t = x.scalar().powf(1.0 / kappa).min(t_cap / 2.0);
                WitnessPoint { t, theta: None }
            });
            let mut spec = MixedNormSpec::new(
                q,
                params.measure(),
                XDomain::Line { axis: AxisDomain::Interval { lo: 0.0, hi: x_hi }, negate: false },
                (t_cap * 1e-4, t_cap),
            );
            spec.x_nodes = 6;
            ScenarioInstance {
                id,
                params: *params,
                lambda,
                k: Some(k),
                m,
                profile,
                path: PathSpec::PowerCurve { kappa },
                norm_spec: spec,
                witness: Some(witness),
                trial_profiles: Vec::new(),
                exploratory: false,
            }
        }
        ScenarioId::TangentialRow3 => {
            if m * params.kappa > 1.0 {
                return Err(Error::PhaseCertificateFailed(format!(
                    "row 3 needs m*kappa <= 1 (got {}): the witness phase t(x) sup|xi|^m \
                     grows like lambda^(1 - 1/(m kappa))",
                    m * params.kappa
                )));
            }
            let hi = lambda.powf(1.0 / m) / 100.0;
            let profile = indicator_profile(1, hi, PhaseKind::None)?;
            let kappa = params.kappa;
            // widened kappa-dependent range: t(x) = x^{1/kappa} then keeps
            // t |xi|^m <= 1/4 right up to the edge
            let x_hi = (100f64.powf(m) / (4.0 * lambda)).powf(kappa);
            if x_hi.powf(1.0 / kappa) > 1.0 {
                return Err(Error::InvalidParams(format!(
                    "lambda = {lambda} too small: witness time exceeds the unit window"
                )));
            }
            let witness: WitnessFn = Box::new(move |x: Point| WitnessPoint {
                t: x.scalar().powf(1.0 / kappa),
                theta: None,
            });
            let t_hi = x_hi.powf(1.0 / kappa);
            let mut spec = MixedNormSpec::new(
                q,
                params.measure(),
                XDomain::Line { axis: AxisDomain::Interval { lo: 0.0, hi: x_hi }, negate: false },
                (t_hi * 1e-4, t_hi),
            );
            spec.x_nodes = 6;
            ScenarioInstance {
                id,
                params: *params,
                lambda,
                k: Some(k),
                m,
                profile,
                path: PathSpec::PowerCurve { kappa },
                norm_spec: spec,
                witness: Some(witness),
                trial_profiles: Vec::new(),
                exploratory: false,
            }
        }
        ScenarioId::TangentialRow1 => {
            let profile = make_profile(
                1,
                vec![Band::line(lambda, lambda + lambda.recip(), lambda.recip(), PhaseKind::None)],
            )?;
            let kappa = params.kappa;
            let x_hi = 1.0 / (100.0 * (m - 1.0));
            // witness time from the stated relation x = t^kappa + m lambda^{2m-2} t,
            // solved by bisection (monotone in t)
            let coef = m * lambda.powf(2.0 * m - 2.0);
            let witness: WitnessFn = Box::new(move |x: Point| {
                let target = x.scalar();
                let mut lo = 0.0f64;
                let mut hi = 1.0f64;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid.powf(kappa) + coef * mid < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                WitnessPoint { t: 0.5 * (lo + hi), theta: None }
            });
            let mut spec = MixedNormSpec::new(
                q,
                params.measure(),
                XDomain::Line { axis: AxisDomain::Interval { lo: 0.0, hi: x_hi }, negate: false },
                ((x_hi / coef) * 1e-3, 1.0),
            );
            spec.x_nodes = 6;
            spec.t_grid = TGrid { coarse_size: 128, refine_levels: 4, refine_factor: 8 };
            ScenarioInstance {
                id,
                params: *params,
                lambda,
                k: Some(k),
                m,
                profile,
                path: PathSpec::PowerCurve { kappa },
                norm_spec: spec,
                witness: Some(witness),
                trial_profiles: Vec::new(),
                exploratory: true,
            }
        }
        ScenarioId::ExpTangential => {
            let hi = lambda.powf(1.0 / m) / 100.0;
            let profile = indicator_profile(1, hi, PhaseKind::None)?;
            let x_hi = lambda.ln().recip();
            let witness: WitnessFn =
                Box::new(move |x: Point| WitnessPoint { t: (-1.0 / x.scalar()).exp(), theta: None });
            let mut spec = MixedNormSpec::new(
                q,
                params.measure(),
                XDomain::Line { axis: AxisDomain::Interval { lo: 0.0, hi: x_hi }, negate: false },
                (1e-3 / lambda, 0.9),
            );
            spec.x_nodes = 6;
            ScenarioInstance {
                id,
                params: *params,
                lambda,
                k: Some(k),
                m,
                profile,
                path: PathSpec::ExpTangential,
                norm_spec: spec,
                witness: Some(witness),
                trial_profiles: Vec::new(),
                exploratory: false,
            }
        }
        ScenarioId::FractalLines1D | ScenarioId::AlphaFractalRemark => {
            let c = params.c;
            let profile =
                indicator_profile(1, c * lambda, PhaseKind::NegativeDispersion { m })?;
            let tau = 0.5 * lambda.powf(-m);
            let set = cantor_intervals(params.r, k)?;
            let (directions, domain_axis, witness): (DirectionSet, AxisDomain, WitnessFn) =
                match params.direction {
                    DirectionMode::Cantor => {
                        let wset = set.clone();
                        (
                            DirectionSet::Cantor { r: params.r, k },
                            AxisDomain::Cantor(set),
                            Box::new(move |x: Point| {
                                let y = -x.scalar();
                                let theta = nearest_cantor_endpoint(y, &wset)
                                    .expect("domain nodes lie inside the set");
                                WitnessPoint { t: 1.0 - tau, theta: Some(Point::D1(theta)) }
                            }),
                        )
                    }
                    DirectionMode::Origin => (
                        DirectionSet::Singleton(0.0),
                        AxisDomain::Interval { lo: 0.0, hi: lambda.recip() },
                        Box::new(move |_x: Point| WitnessPoint {
                            t: 1.0 - tau,
                            theta: Some(Point::D1(0.0)),
                        }),
                    ),
                    DirectionMode::UnitInterval => (
                        DirectionSet::Interval(0.0, 1.0),
                        AxisDomain::Interval { lo: 0.0, hi: 1.0 },
                        Box::new(move |x: Point| WitnessPoint {
                            t: 1.0 - tau,
                            theta: Some(Point::D1(-x.scalar())),
                        }),
                    ),
                };
            let measure = if id == ScenarioId::AlphaFractalRemark {
                params.measure()
            } else {
                MeasureKind::Lebesgue
            };
            let mut spec = MixedNormSpec::new(
                q,
                measure,
                XDomain::Line { axis: domain_axis, negate: true },
                (1.0 - lambda.powf(-m), 1.0 - 1e-3 * lambda.powf(-m)),
            );
            spec.x_nodes = 4;
            ScenarioInstance {
                id,
                params: *params,
                lambda,
                k: Some(k),
                m,
                profile,
                path: PathSpec::LineField { directions },
                norm_spec: spec,
                witness: Some(witness),
                trial_profiles: Vec::new(),
                exploratory: false,
            }
        }
        ScenarioId::FractalLines2DLow | ScenarioId::FractalLines2DHigh => {
            let c = params.c;
            let profile =
                indicator_profile(2, c * lambda, PhaseKind::NegativeDispersion { m })?;
            let tau = 0.5 * lambda.powf(-m);
            let set = cantor_intervals(params.r, k)?;
            let wset = set.clone();
            let high = id == ScenarioId::FractalLines2DHigh;
            let witness: WitnessFn = Box::new(move |x: Point| {
                let [x0, x1] = x.coords();
                let (y0, y1) = (-x0, -x1);
                let th0 = nearest_cantor_endpoint(y0, &wset)
                    .expect("domain nodes lie inside the set");
                let th1 = if high { y1 } else { 0.0 };
                WitnessPoint { t: 1.0 - tau, theta: Some(Point::D2([th0, th1])) }
            });
            let directions = DirectionSet::Product(
                Box::new(DirectionSet::Cantor { r: params.r, k }),
                Box::new(if high {
                    DirectionSet::Interval(0.0, 1.0)
                } else {
                    DirectionSet::Singleton(0.0)
                }),
            );
            let second_axis = if high {
                AxisDomain::Interval { lo: 0.0, hi: 1.0 }
            } else {
                AxisDomain::Interval { lo: 0.0, hi: lambda.recip() }
            };
            let mut spec = MixedNormSpec::new(
                q,
                MeasureKind::Lebesgue,
                XDomain::Plane { axes: [AxisDomain::Cantor(set), second_axis], negate: true },
                (1.0 - lambda.powf(-m), 1.0 - 1e-3 * lambda.powf(-m)),
            );
            spec.x_nodes = 2;
            ScenarioInstance {
                id,
                params: *params,
                lambda,
                k: Some(k),
                m,
                profile,
                path: PathSpec::LineField { directions },
                norm_spec: spec,
                witness: Some(witness),
                trial_profiles: Vec::new(),
                exploratory: false,
            }
        }
        ScenarioId::SufficiencyProbe => {
            let alpha = params.alpha_value();
            let s_star = 0.25f64.min(alpha / q);
            let omega_len = lambda.powf(-q * s_star / alpha);
            let trial_profiles: Vec<SpectralProfile> = (0..params.trials.max(1))
                .map(|trial| {
                    let mut rng = stream_rng(params.seed, trial as u64);
                    let n_sub = 64;
                    let lo = lambda / 2.0;
                    let w = (2.0 * lambda - lo) / n_sub as f64;
                    let bands = (0..n_sub)
                        .map(|i| {
                            Band::line(
                                lo + i as f64 * w,
                                lo + (i + 1) as f64 * w,
                                rng.random_range(0.0..1.0),
                                PhaseKind::None,
                            )
                        })
                        .collect();
                    make_profile(1, bands).expect("sub-bands are disjoint")
                })
                .collect();
            let profile = trial_profiles[0].clone();
            let mut spec = MixedNormSpec::new(
                q,
                params.measure(),
                XDomain::Line { axis: AxisDomain::Interval { lo: -1.0, hi: 1.0 }, negate: false },
                (0.01 * lambda.powf(-m), lambda.recip()),
            );
            spec.x_nodes = 12;
            spec.t_grid = TGrid { coarse_size: 64, refine_levels: 2, refine_factor: 6 };
            spec.eval_rel_tol = 1e-6;
            // Omega has length lambda^{-q s_*/alpha}; t theta shifts the
            // phase by at most that, so a tiny grid suffices
            spec.theta_grid = Some(3);
            // the measure on (-1,1) with a one-sided weight needs Lebesgue here
            if alpha < 1.0 {
                return Err(Error::InvalidParams(
                    "sufficiency probe runs against Lebesgue measure (alpha = 1)".into(),
                ));
            }
            ScenarioInstance {
                id,
                params: *params,
                lambda,
                k: Some(k),
                m,
                profile,
                path: PathSpec::LineField { directions: DirectionSet::Interval(0.0, omega_len) },
                norm_spec: spec,
                witness: None,
                trial_profiles,
                exploratory: true,
            }
        }
    };

    // alpha measures only make sense for domains in [0, 1]
    if let MeasureKind::Alpha(_) = instance.norm_spec.measure {
        if instance.profile.dimension() == 2 {
            return Err(Error::InvalidParams("alpha measure with a 2D domain".into()));
        }
    }

    if !instance.exploratory {
        run_phase_certificate(&instance)?;
    }
    instance.norm_spec.q = q;
    Ok(instance)
}

/// Mixed norm of the instance with its witness map injected.
pub fn witness_norm(instance: &ScenarioInstance) -> Result<f64> {
    let witness = instance.witness.as_ref().map(|w| w.as_ref() as &crate::maximal::WitnessMap);
    mixed_norm(&instance.profile, instance.m, &instance.path, &instance.norm_spec, witness)
}

/// One rung of a scaling report.
#[derive(Debug, Clone, Copy)]
pub struct ScalingRow {
    pub lambda: f64,
    pub k: u32,
    pub norm: f64,
    pub sobolev: f64,
    pub ratio: f64,
}

/// Ladder results with the fitted and closed-form slopes.
#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub scenario: ScenarioId,
    pub rows: Vec<ScalingRow>,
    pub fitted_slope: f64,
    pub stderr: f64,
    pub theoretical_slope: f64,
    pub seed: u64,
}

/// Least-squares slope of (log lambda, log value) with its standard error.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(Error::DegenerateAbscissae);
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let spread = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - xs.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(spread > 0.0) {
        return Err(Error::DegenerateAbscissae);
    }
    let (slope, _, stderr) = ols_slope(&xs, &ys);
    Ok((slope, stderr))
}

/// Closed-form blow-up exponent of the norm/Sobolev ratio per scenario.
pub fn theoretical_exponent(id: ScenarioId, params: &ScenarioParams) -> f64 {
    let q = params.q;
    let s = params.s;
    let m = params.m;
    let alpha = params.alpha_value();
    let beta = match params.direction {
        DirectionMode::Cantor => (2f64).ln() / (1.0 / params.r).ln(),
        DirectionMode::Origin => 0.0,
        DirectionMode::UnitInterval => 1.0,
    };
    match id {
        // nominal quarter-regularity threshold; exploratory
        ScenarioId::TangentialRow1 => 0.25 - s,
        ScenarioId::TangentialRow2 => (0.5 - alpha / q - s) / m,
        ScenarioId::TangentialRow3 => 0.5 / m - alpha * params.kappa / q - s / m,
        ScenarioId::ExpTangential => 1.0 / m - (s + 0.5) / m,
        ScenarioId::FractalLines1D => 0.5 - 1.0 / q + beta / q - s,
        ScenarioId::FractalLines2DLow => 1.0 - 2.0 / q + beta / q - s,
        ScenarioId::FractalLines2DHigh => 1.0 - 2.0 / q + (beta + 1.0) / q - s,
        ScenarioId::AlphaFractalRemark => 0.5 + (beta - 1.0) / q - s,
        ScenarioId::SufficiencyProbe => {
            let s_star = 0.25f64.min(alpha / q);
            0.5 - s_star
        }
    }
}

/// Runs a k-ladder: build, witness norm, Sobolev norm, ratio per rung,
/// then fits the log-log slope. Rungs run concurrently; rows are ordered
/// by lambda regardless of completion order. For the exponential
/// tangential scenario the fit removes the known (log lambda)^{alpha/2}
/// factor; for the sufficiency probe the per-rung value is the max ratio
/// over the seeded trials.
pub fn run_scaling(id: ScenarioId, params: &ScenarioParams, ks: &[u32]) -> Result<ScalingReport> {
    if ks.len() < 3 {
        return Err(Error::InvalidParams("ladder needs >= 3 rungs".into()));
    }
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    let rows: Vec<Result<ScalingRow>> = ks
        .par_iter()
        .map(|&k| {
            let instance = build_scenario(id, params, k)?;
            if id == ScenarioId::SufficiencyProbe {
                let mut best: Option<ScalingRow> = None;
                for profile in &instance.trial_profiles {
                    let norm = mixed_norm(
                        profile,
                        instance.m,
                        &instance.path,
                        &instance.norm_spec,
                        None,
                    )?;
                    let sob = sobolev_norm(profile, params.s);
                    let ratio = norm / sob;
                    if best.map_or(true, |b| ratio > b.ratio) {
                        best = Some(ScalingRow {
                            lambda: instance.lambda,
                            k,
                            norm,
                            sobolev: sob,
                            ratio,
                        });
                    }
                }
                Ok(best.expect("at least one trial"))
            } else {
                let norm = witness_norm(&instance)?;
                let sob = sobolev_norm(&instance.profile, params.s);
                Ok(ScalingRow { lambda: instance.lambda, k, norm, sobolev: sob, ratio: norm / sob })
            }
        })
        .collect();
    let rows: Vec<ScalingRow> = rows.into_iter().collect::<Result<_>>()?;

    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|row| {
            let mut y = row.ratio.ln();
            if id == ScenarioId::ExpTangential {
                y += 0.5 * params.alpha_value() * row.lambda.ln().ln();
            }
            (row.lambda.ln(), y)
        })
        .collect();
    let (fitted_slope, stderr) = fit_exponent(&points)?;
    Ok(ScalingReport {
        scenario: id,
        rows,
        fitted_slope,
        stderr,
        theoretical_slope: theoretical_exponent(id, params),
        seed: params.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn fit_exponent_exact_power_law() {
        let points: Vec<(f64, f64)> = (10..=20)
            .map(|e| {
                let lambda = (2f64).powi(e);
                (lambda.ln(), 0.8577 * lambda.ln())
            })
            .collect();
        let (slope, stderr) = fit_exponent(&points).unwrap();
        assert_abs_diff_eq!(slope, 0.8577, epsilon = 1e-12);
        assert!(stderr < 1e-12);
    }

    #[test]
    fn fit_exponent_constant_data() {
        let points: Vec<(f64, f64)> = (10..=16)
            .map(|e| ((2f64).powi(e).ln(), 3.7f64.ln()))
            .collect();
        let (slope, _) = fit_exponent(&points).unwrap();
        assert_abs_diff_eq!(slope, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn fit_exponent_log_factor_bias() {
        // lambda^{1/2} (log lambda)^{-1/4} over 2^10..2^20 fits inside
        // (0.45, 0.50): the bias the exp-tangential correction removes
        let points: Vec<(f64, f64)> = (10..=20)
            .map(|e| {
                let l = (2f64).powi(e);
                (l.ln(), (l.sqrt() * l.ln().powf(-0.25)).ln())
            })
            .collect();
        let (slope, _) = fit_exponent(&points).unwrap();
        assert!(slope > 0.45 && slope < 0.50, "slope = {slope}");
    }

    #[test]
    fn fit_exponent_rejects_degenerate() {
        assert!(matches!(fit_exponent(&[(1.0, 2.0), (1.0, 3.0)]), Err(Error::DegenerateAbscissae)));
        assert!(matches!(
            fit_exponent(&[(1.0, 2.0), (1.0, 3.0), (1.0, 4.0)]),
            Err(Error::DegenerateAbscissae)
        ));
    }

    #[test]
    fn theoretical_exponents_reference_values() {
        let mut p = ScenarioParams { q: 3.0, r: 0.2, ..Default::default() };
        // d = 2 low set, q = 3, s = 0, r = 1/5
        let beta = (2f64).ln() / (5f64).ln();
        assert_relative_eq!(
            theoretical_exponent(ScenarioId::FractalLines2DLow, &p),
            1.0 - 2.0 / 3.0 + beta / 3.0,
            max_relative = 1e-12
        );
        assert_abs_diff_eq!(
            theoretical_exponent(ScenarioId::FractalLines2DLow, &p),
            0.4769,
            epsilon = 5e-4
        );
        // beta -> 1 degenerate line field at q = 4
        p.q = 4.0;
        p.direction = DirectionMode::UnitInterval;
        assert_relative_eq!(
            theoretical_exponent(ScenarioId::FractalLines1D, &p),
            0.5,
            max_relative = 1e-12
        );
        // exponential tangential with m = 2, s = 0
        let p2 = ScenarioParams::default();
        assert_relative_eq!(
            theoretical_exponent(ScenarioId::ExpTangential, &p2),
            0.25,
            max_relative = 1e-12
        );
        // row 2 acceptance configuration
        let p3 = ScenarioParams { alpha: Some(0.5), ..Default::default() };
        assert_relative_eq!(
            theoretical_exponent(ScenarioId::TangentialRow2, &p3),
            0.125,
            max_relative = 1e-12
        );
        // row 3 acceptance configuration
        let p4 = ScenarioParams { kappa: 0.25, alpha: Some(1.0), ..Default::default() };
        assert_relative_eq!(
            theoretical_exponent(ScenarioId::TangentialRow3, &p4),
            0.125,
            max_relative = 1e-12
        );
    }

    #[test]
    fn fractal_lines_build_certifies_and_bounds() {
        let params = ScenarioParams { q: 4.0, r: 0.2, ..Default::default() };
        let instance = build_scenario(ScenarioId::FractalLines1D, &params, 4).unwrap();
        assert_relative_eq!(instance.lambda, 625.0, max_relative = 1e-12);
        // witness phase at every midpoint stays below 3c:
        // |y - theta| c lambda + tau theta c lambda + tau (c lambda)^m
        let set = cantor_intervals(0.2, 4).unwrap();
        let witness = instance.witness.as_ref().unwrap();
        for (lo, hi) in &set.intervals {
            let x = Point::D1(-0.5 * (lo + hi));
            let w = witness(x);
            let pos = path_point(&instance.path, x, w.t, w.theta).unwrap();
            let req = EvalRequest::new(&instance.profile, instance.m, pos, w.t);
            let bound = crate::propagator::phase_bound(&req).unwrap();
            assert!(bound <= 3.0 * params.c, "phase {bound} above 3c");
        }
        let norm = witness_norm(&instance).unwrap();
        let floor = instance.guaranteed_lower_bound().unwrap();
        assert!(norm >= floor, "{norm} < {floor}");
        // spec-level closed form for the floor
        let expect = 0.5f64.cos() * (0.125 * 625.0 / TAU) * (0.4f64).powi(4).powf(0.25);
        assert_relative_eq!(floor, expect, max_relative = 1e-12);
    }

    #[test]
    fn row3_rejects_steep_kappa() {
        let params = ScenarioParams { kappa: 0.75, ..Default::default() };
        assert!(matches!(
            build_scenario(ScenarioId::TangentialRow3, &params, 14),
            Err(Error::PhaseCertificateFailed(_))
        ));
    }

    #[test]
    fn exp_tangential_witness_certified() {
        let params = ScenarioParams { q: 2.0, alpha: Some(1.0), ..Default::default() };
        let instance = build_scenario(ScenarioId::ExpTangential, &params, 16).unwrap();
        let norm = witness_norm(&instance).unwrap();
        let floor = instance.guaranteed_lower_bound().unwrap();
        assert!(norm >= floor);
        // floor here is cos(1/2) (lambda^{1/2}/100)/(2 pi) (log lambda)^{-1/2}
        let lambda = (2f64).powi(16);
        let expect = 0.5f64.cos() * (lambda.sqrt() / 100.0 / TAU) * lambda.ln().recip().sqrt();
        assert_relative_eq!(floor, expect, max_relative = 1e-12);
    }

    #[test]
    fn zero_amplitude_norm_is_zero() {
        let params = ScenarioParams { q: 4.0, ..Default::default() };
        let mut instance = build_scenario(ScenarioId::FractalLines1D, &params, 3).unwrap();
        instance.profile = instance.profile.scaled(0.0);
        assert_abs_diff_eq!(witness_norm(&instance).unwrap(), 0.0, epsilon = 1e-300);
    }

    #[test]
    fn scaling_slope_invariant_under_amplitude_rescale() {
        let params = ScenarioParams { q: 4.0, r: 0.2, ..Default::default() };
        let report = run_scaling(ScenarioId::FractalLines1D, &params, &[3, 4, 5]).unwrap();
        // ratio = norm/sobolev is amplitude-free; rebuild with scaled data
        for row in &report.rows {
            let instance = build_scenario(ScenarioId::FractalLines1D, &params, row.k).unwrap();
            let scaled = ScenarioInstance {
                profile: instance.profile.scaled(7.0),
                ..instance
            };
            let n = witness_norm(&scaled).unwrap();
            let s = sobolev_norm(&scaled.profile, params.s);
            assert_relative_eq!(n / s, row.ratio, max_relative = 1e-9);
        }
    }
}
