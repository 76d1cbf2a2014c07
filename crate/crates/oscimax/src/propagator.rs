//! Evaluation of S_t^m f(x) = (2 pi)^{-d} integral e^{i(x.xi + t|xi|^m)}
//! fhat(xi) d xi by phase-aware panel quadrature, with a midpoint Riemann
//! oracle as the independent verification path.
//!
//! Panels are sized so the total phase varies by at most pi/2 on each one;
//! a 16-point Gauss-Legendre rule then resolves the integrand to ~1e-12
//! per panel. Panels are bisected globally until the running total settles
//! below the requested tolerance.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::point::Point;
use crate::quad::GL16;
use crate::spectral::{make_profile, Band, PhaseKind, SpectralProfile, Support};

/// Default panel budget per evaluation.
pub const DEFAULT_PANEL_BUDGET: usize = 1 << 22;
/// Dimension-2 frequency cap without the explicit override.
pub const FREQ_CAP_2D: f64 = 256.0;

const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

/// One propagator evaluation request.
#[derive(Debug, Clone)]
pub struct EvalRequest<'a> {
    pub profile: &'a SpectralProfile,
    /// Dispersion order, > 1.
    pub m: f64,
    /// Spatial point (typically a path output).
    pub position: Point,
    pub t: f64,
    pub rel_tol: f64,
    pub panel_budget: usize,
    /// Lifts the dimension-2 frequency cap.
    pub allow_large_support: bool,
}

impl<'a> EvalRequest<'a> {
    pub fn new(profile: &'a SpectralProfile, m: f64, position: Point, t: f64) -> Self {
        EvalRequest {
            profile,
            m,
            position,
            t,
            rel_tol: 1e-8,
            panel_budget: DEFAULT_PANEL_BUDGET,
            allow_large_support: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.m > 1.0) {
            return Err(Error::InvalidRequest(format!("dispersion order m = {} must be > 1", self.m)));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(Error::InvalidRequest(format!(
                "rel_tol {} outside (0, 1e-2]",
                self.rel_tol
            )));
        }
        if self.position.dimension() != self.profile.dimension() {
            return Err(Error::InvalidRequest(
                "position dimension does not match profile".into(),
            ));
        }
        if !self.t.is_finite() {
            return Err(Error::InvalidRequest("t must be finite".into()));
        }
        if self.profile.dimension() == 2
            && !self.allow_large_support
            && self.profile.max_freq() > FREQ_CAP_2D
        {
            return Err(Error::FrequencyCapExceeded {
                max_freq: self.profile.max_freq(),
                cap: FREQ_CAP_2D,
            });
        }
        Ok(())
    }
}

/// x^e with fast paths for the exponents that dominate in practice.
#[inline]
fn fpow(x: f64, e: f64) -> f64 {
    if e == 2.0 {
        x * x
    } else if e == 1.0 {
        x
    } else if e == 0.5 {
        x.sqrt()
    } else if e == 3.0 {
        x * x * x
    } else {
        x.powf(e)
    }
}

/// Total phase of one band: linear . xi + sum_i coef_i |xi|^{exp_i}.
/// Radial terms with equal exponents are merged at construction, which is
/// what keeps panel counts small when a dispersion twist nearly cancels
/// the propagator phase.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BandPhase {
    linear: [f64; 2],
    terms: [(f64, f64); 2],
    n_terms: usize,
}

impl BandPhase {
    pub(crate) fn new(position: Point, t: f64, m: f64, phase: PhaseKind) -> Self {
        let mut linear = position.coords();
        let mut terms = [(0.0, 0.0); 2];
        let mut n_terms = 0;
        let push = |terms: &mut [(f64, f64); 2], n: &mut usize, coef: f64, exp: f64| {
            if coef == 0.0 {
                return;
            }
            for slot in terms.iter_mut().take(*n) {
                if slot.1 == exp {
                    slot.0 += coef;
                    return;
                }
            }
            terms[*n] = (coef, exp);
            *n += 1;
        };
        push(&mut terms, &mut n_terms, t, m);
        match phase {
            PhaseKind::None => {}
            PhaseKind::NegativeDispersion { m: m2 } => push(&mut terms, &mut n_terms, -1.0, m2),
            PhaseKind::Linear { c } => {
                linear[0] += c;
                linear[1] += c;
            }
        }
        // drop merged-to-zero terms
        let mut compact = [(0.0, 0.0); 2];
        let mut k = 0;
        for i in 0..n_terms {
            if terms[i].0 != 0.0 {
                compact[k] = terms[i];
                k += 1;
            }
        }
        BandPhase { linear, terms: compact, n_terms: k }
    }

    #[inline]
    pub(crate) fn eval1(&self, xi: f64) -> f64 {
        let mut p = self.linear[0] * xi;
        let a = xi.abs();
        for (coef, exp) in &self.terms[..self.n_terms] {
            p += coef * fpow(a, *exp);
        }
        p
    }

    #[inline]
    fn deriv1(&self, xi: f64) -> f64 {
        let mut d = self.linear[0];
        let a = xi.abs();
        let s = if xi >= 0.0 { 1.0 } else { -1.0 };
        for (coef, exp) in &self.terms[..self.n_terms] {
            d += s * coef * exp * fpow(a, exp - 1.0);
        }
        d
    }

    #[inline]
    pub(crate) fn eval2(&self, xi: [f64; 2]) -> f64 {
        let mut p = self.linear[0] * xi[0] + self.linear[1] * xi[1];
        let r2 = xi[0] * xi[0] + xi[1] * xi[1];
        for (coef, exp) in &self.terms[..self.n_terms] {
            let half = exp * 0.5;
            p += coef * if half == 1.0 { r2 } else { r2.powf(half) };
        }
        p
    }

    /// sup over [p, q] (0 <= p <= q) of |d/dxi of the radial part + linear|.
    /// The derivative has at most one interior extremum (two power terms),
    /// so endpoints plus that critical point are exhaustive.
    fn sup_abs_deriv_pos(&self, p: f64, q: f64) -> f64 {
        let mut best = self.deriv1(p).abs().max(self.deriv1(q).abs());
        if self.n_terms == 2 {
            let (c1, e1) = self.terms[0];
            let (c2, e2) = self.terms[1];
            let a1 = c1 * e1 * (e1 - 1.0);
            let a2 = c2 * e2 * (e2 - 1.0);
            // root of a1 xi^{e1-2} + a2 xi^{e2-2} = 0
            if a1 != 0.0 && a2 != 0.0 && e1 != e2 {
                let ratio = -a2 / a1;
                if ratio > 0.0 {
                    let xi = ratio.powf(1.0 / (e1 - e2));
                    if xi > p && xi < q {
                        best = best.max(self.deriv1(xi).abs());
                    }
                }
            }
        }
        best
    }

    fn sup_abs_deriv(&self, a: f64, b: f64) -> f64 {
        if a >= 0.0 {
            self.sup_abs_deriv_pos(a, b)
        } else {
            // mirror: phase(-eta) has flipped linear coefficient
            let mirrored = BandPhase {
                linear: [-self.linear[0], -self.linear[1]],
                terms: self.terms,
                n_terms: self.n_terms,
            };
            debug_assert!(b <= 0.0);
            mirrored.sup_abs_deriv_pos(-b, -a)
        }
    }

    /// Per-axis derivative bound over a rectangle with max |xi| = r_max.
    fn axis_deriv_bound(&self, axis: usize, r_max: f64) -> f64 {
        let mut d = self.linear[axis].abs();
        for (coef, exp) in &self.terms[..self.n_terms] {
            d += coef.abs() * exp * fpow(r_max, exp - 1.0);
        }
        d
    }
}

/// Amplitude profile along a band: constant for spectral data, or a smooth
/// window (the kernel module's bump) with a width hint that caps panels.
pub(crate) enum Amplitude<'f> {
    Const,
    Smooth { f: &'f (dyn Fn(f64) -> f64 + Sync), max_width: f64 },
}

impl Amplitude<'_> {
    #[inline]
    fn at(&self, xi: f64) -> f64 {
        match self {
            Amplitude::Const => 1.0,
            Amplitude::Smooth { f, .. } => f(xi),
        }
    }

    fn width_cap(&self, band_len: f64) -> f64 {
        match self {
            Amplitude::Const => band_len,
            Amplitude::Smooth { max_width, .. } => *max_width,
        }
    }
}

fn panel_integral(phase: &BandPhase, amp: &Amplitude, a: f64, b: f64) -> Complex64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, w) in GL16.nodes.iter().zip(&GL16.weights) {
        let xi = mid + half * x;
        let (s, c) = phase.eval1(xi).sin_cos();
        let av = amp.at(xi);
        re += w * av * c;
        im += w * av * s;
    }
    Complex64::new(re * half, im * half)
}

/// Greedy panel construction on [a, b] (not straddling 0): each panel
/// satisfies sup|phase'| * width <= pi/2.
fn build_panels(
    phase: &BandPhase,
    a: f64,
    b: f64,
    width_cap: f64,
    budget_left: usize,
) -> Result<Vec<(f64, f64)>> {
    let mut panels = Vec::new();
    let mut pos = a;
    let len = b - a;
    while pos < b {
        let remaining = b - pos;
        let d0 = phase.sup_abs_deriv(pos, pos).max(1e-300);
        let mut w = (HALF_PI / d0).min(remaining).min(width_cap);
        for _ in 0..200 {
            let sup = phase.sup_abs_deriv(pos, pos + w);
            if sup * w <= HALF_PI * (1.0 + 1e-9) || w <= len * 1e-15 {
                break;
            }
            w = HALF_PI / sup;
        }
        w = w.min(remaining);
        panels.push((pos, pos + w));
        if panels.len() > budget_left {
            return Err(Error::ToleranceNotReached { budget: budget_left });
        }
        // guard against width underflow at the far end
        if w < remaining && w < len * 1e-15 {
            return Err(Error::ToleranceNotReached { budget: budget_left });
        }
        pos += w;
    }
    Ok(panels)
}

fn split_at_zero(lo: f64, hi: f64) -> Vec<(f64, f64)> {
    if lo < 0.0 && hi > 0.0 {
        vec![(lo, 0.0), (0.0, hi)]
    } else {
        vec![(lo, hi)]
    }
}

/// Shared 1D engine: integrates e^{i phase} * amp over each band segment,
/// refining globally until the relative change drops below rel_tol.
pub(crate) fn oscillatory_sum_1d(
    segments: &[(BandPhase, f64, f64, f64)], // (phase, amplitude, lo, hi)
    amp: &Amplitude,
    rel_tol: f64,
    budget: usize,
    mass_scale: f64,
) -> Result<Complex64> {
    let mut band_panels: Vec<(usize, Vec<(f64, f64)>)> = Vec::with_capacity(segments.len());
    let mut used = 0usize;
    for (idx, (phase, _, lo, hi)) in segments.iter().enumerate() {
        for (a, b) in split_at_zero(*lo, *hi) {
            let cap = amp.width_cap(b - a);
            let panels = build_panels(phase, a, b, cap, budget - used)?;
            used += panels.len();
            band_panels.push((idx, panels));
        }
    }

    let total = |parts: &[(usize, Vec<(f64, f64)>)]| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, panels) in parts {
            let (phase, amp_coef, _, _) = &segments[*idx];
            let mut band_acc = Complex64::new(0.0, 0.0);
            for (a, b) in panels {
                band_acc += panel_integral(phase, amp, *a, *b);
            }
            acc += band_acc * *amp_coef;
        }
        acc
    };

    let mut prev = total(&band_panels);
    for _ in 0..30 {
        let count: usize = band_panels.iter().map(|(_, p)| p.len()).sum();
        if count * 2 > budget {
            return Err(Error::ToleranceNotReached { budget });
        }
        for (_, panels) in band_panels.iter_mut() {
            let mut refined = Vec::with_capacity(panels.len() * 2);
            for (a, b) in panels.iter() {
                let mid = 0.5 * (a + b);
                refined.push((*a, mid));
                refined.push((mid, *b));
            }
            *panels = refined;
        }
        let cur = total(&band_panels);
        let scale = cur.norm().max(1e-3 * mass_scale).max(f64::MIN_POSITIVE);
        let done = (cur - prev).norm() <= rel_tol * scale;
        prev = cur;
        if done {
            return Ok(prev);
        }
    }
    Err(Error::ToleranceNotReached { budget })
}

/// Explicit phase for the panel engine: linear * xi + sum coef |xi|^exp.
/// Used by callers whose phase is not assembled from a spectral band
/// (e.g. kernel and decay probes).
#[derive(Debug, Clone)]
pub struct PhaseSpec {
    pub linear: f64,
    pub radial: Vec<(f64, f64)>,
}

/// integral over the segments of e^{i Phi(xi)} amp(xi) d xi with the same
/// panel rules as `evaluate` (no (2 pi)^{-d} normalization).
pub(crate) fn oscillatory_sum_phase(
    spec: &PhaseSpec,
    segments: &[(f64, f64)],
    amp: &(dyn Fn(f64) -> f64 + Sync),
    amp_max_width: f64,
    rel_tol: f64,
    budget: usize,
    mass_scale: f64,
) -> Result<Complex64> {
    if spec.radial.len() > 2 {
        return Err(Error::InvalidRequest("at most two radial phase terms".into()));
    }
    let mut phase = BandPhase {
        linear: [spec.linear, 0.0],
        terms: [(0.0, 0.0); 2],
        n_terms: 0,
    };
    for (coef, exp) in &spec.radial {
        if *coef != 0.0 {
            phase.terms[phase.n_terms] = (*coef, *exp);
            phase.n_terms += 1;
        }
    }
    let parts: Vec<(BandPhase, f64, f64, f64)> =
        segments.iter().map(|(a, b)| (phase, 1.0, *a, *b)).collect();
    let amp = Amplitude::Smooth { f: amp, max_width: amp_max_width };
    oscillatory_sum_1d(&parts, &amp, rel_tol, budget, mass_scale)
}

/// S_t^m f at one space-time point.
pub fn evaluate(req: &EvalRequest) -> Result<Complex64> {
    req.validate()?;
    match req.profile.dimension() {
        1 => evaluate_1d(req),
        2 => evaluate_2d(req),
        _ => unreachable!(),
    }
}

fn evaluate_1d(req: &EvalRequest) -> Result<Complex64> {
    let mut segments = Vec::with_capacity(req.profile.bands().len());
    for band in req.profile.bands() {
        let Support::Line { lo, hi } = band.support else { unreachable!() };
        let phase = BandPhase::new(req.position, req.t, req.m, band.phase);
        segments.push((phase, band.amplitude, lo, hi));
    }
    let norm = 1.0 / (2.0 * std::f64::consts::PI);
    let mass = req.profile.band_mass() * norm;
    let v = oscillatory_sum_1d(&segments, &Amplitude::Const, req.rel_tol, req.panel_budget, mass)?;
    Ok(v * norm)
}

fn evaluate_2d(req: &EvalRequest) -> Result<Complex64> {
    let norm = (2.0 * std::f64::consts::PI).powi(-2);
    let mass = req.profile.band_mass() * norm;
    let mut acc = Complex64::new(0.0, 0.0);
    for band in req.profile.bands() {
        let Support::Rect { lo, hi } = band.support else { unreachable!() };
        let phase = BandPhase::new(req.position, req.t, req.m, band.phase);
        acc += band.amplitude
            * rect_integral(&phase, lo, hi, req.rel_tol, req.panel_budget, mass / norm)?;
    }
    Ok(acc * norm)
}

/// Tensor-panel integration of e^{i phase} over a rectangle; per-axis
/// widths follow the same pi/2 phase-variation rule, both axes bisected
/// per refinement round.
fn rect_integral(
    phase: &BandPhase,
    lo: [f64; 2],
    hi: [f64; 2],
    rel_tol: f64,
    budget: usize,
    mass_scale: f64,
) -> Result<Complex64> {
    let r_max = {
        let mx = lo[0].abs().max(hi[0].abs());
        let my = lo[1].abs().max(hi[1].abs());
        mx.hypot(my)
    };
    let mut n = [0usize; 2];
    for ax in 0..2 {
        let bound = phase.axis_deriv_bound(ax, r_max).max(1e-300);
        let len = hi[ax] - lo[ax];
        n[ax] = ((len * bound / HALF_PI).ceil() as usize).max(1);
    }
    if n[0].saturating_mul(n[1]) > budget {
        return Err(Error::ToleranceNotReached { budget });
    }

    let grid_sum = |nx: usize, ny: usize| -> Complex64 {
        let hx = (hi[0] - lo[0]) / nx as f64;
        let hy = (hi[1] - lo[1]) / ny as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..nx {
            let ax = lo[0] + i as f64 * hx;
            for j in 0..ny {
                let ay = lo[1] + j as f64 * hy;
                acc += cell_integral(phase, ax, ax + hx, ay, ay + hy);
            }
        }
        acc
    };

    let mut prev = grid_sum(n[0], n[1]);
    for _ in 0..12 {
        if n[0] * 2 * n[1] * 2 > budget {
            return Err(Error::ToleranceNotReached { budget });
        }
        n = [n[0] * 2, n[1] * 2];
        let cur = grid_sum(n[0], n[1]);
        let scale = cur.norm().max(1e-3 * mass_scale).max(f64::MIN_POSITIVE);
        let done = (cur - prev).norm() <= rel_tol * scale;
        prev = cur;
        if done {
            return Ok(prev);
        }
    }
    Err(Error::ToleranceNotReached { budget })
}

fn cell_integral(phase: &BandPhase, ax: f64, bx: f64, ay: f64, by: f64) -> Complex64 {
    let half_x = 0.5 * (bx - ax);
    let mid_x = 0.5 * (ax + bx);
    let half_y = 0.5 * (by - ay);
    let mid_y = 0.5 * (ay + by);
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, wx) in GL16.nodes.iter().zip(&GL16.weights) {
        let xi0 = mid_x + half_x * x;
        for (y, wy) in GL16.nodes.iter().zip(&GL16.weights) {
            let xi1 = mid_y + half_y * y;
            let (s, c) = phase.eval2([xi0, xi1]).sin_cos();
            let w = wx * wy;
            re += w * c;
            im += w * s;
        }
    }
    Complex64::new(re * half_x * half_y, im * half_x * half_y)
}

/// Uniform midpoint Riemann sum with n nodes per band per axis;
/// deterministic ascending summation.
pub fn evaluate_oracle(req: &EvalRequest, n: usize) -> Result<Complex64> {
    req.validate()?;
    if n < 1 << 10 {
        return Err(Error::InvalidRequest(format!("oracle needs n >= 2^10, got {n}")));
    }
    let d = req.profile.dimension();
    let norm = (2.0 * std::f64::consts::PI).powi(-(d as i32));
    let mut acc = Complex64::new(0.0, 0.0);
    for band in req.profile.bands() {
        let phase = BandPhase::new(req.position, req.t, req.m, band.phase);
        let mut band_acc = Complex64::new(0.0, 0.0);
        match band.support {
            Support::Line { lo, hi } => {
                let h = (hi - lo) / n as f64;
                for i in 0..n {
                    let xi = lo + (i as f64 + 0.5) * h;
                    let (s, c) = phase.eval1(xi).sin_cos();
                    band_acc += Complex64::new(c, s);
                }
                band_acc *= h;
            }
            Support::Rect { lo, hi } => {
                let hx = (hi[0] - lo[0]) / n as f64;
                let hy = (hi[1] - lo[1]) / n as f64;
                for i in 0..n {
                    let xi0 = lo[0] + (i as f64 + 0.5) * hx;
                    for j in 0..n {
                        let xi1 = lo[1] + (j as f64 + 0.5) * hy;
                        let (s, c) = phase.eval2([xi0, xi1]).sin_cos();
                        band_acc += Complex64::new(c, s);
                    }
                }
                band_acc *= hx * hy;
            }
        }
        acc += band_acc * band.amplitude;
    }
    Ok(acc * norm)
}

impl BandPhase {
    /// min over [a, b] of |Phi'|, from the same candidate set as the sup;
    /// returns 0 when Phi' changes sign inside.
    fn min_abs_deriv(&self, a: f64, b: f64) -> f64 {
        let (phase, p, q) = if a >= 0.0 {
            (*self, a, b)
        } else {
            let mirrored = BandPhase {
                linear: [-self.linear[0], -self.linear[1]],
                terms: self.terms,
                n_terms: self.n_terms,
            };
            (mirrored, -b, -a)
        };
        let mut candidates = vec![phase.deriv1(p), phase.deriv1(q)];
        if phase.n_terms == 2 {
            let (c1, e1) = phase.terms[0];
            let (c2, e2) = phase.terms[1];
            let a1 = c1 * e1 * (e1 - 1.0);
            let a2 = c2 * e2 * (e2 - 1.0);
            if a1 != 0.0 && a2 != 0.0 && e1 != e2 {
                let ratio = -a2 / a1;
                if ratio > 0.0 {
                    let xi = ratio.powf(1.0 / (e1 - e2));
                    if xi > p && xi < q {
                        candidates.push(phase.deriv1(xi));
                    }
                }
            }
        }
        let any_pos = candidates.iter().any(|v| *v > 0.0);
        let any_neg = candidates.iter().any(|v| *v < 0.0);
        if any_pos && any_neg {
            return 0.0;
        }
        candidates.into_iter().map(f64::abs).fold(f64::INFINITY, f64::min)
    }

    /// Whether Phi'' keeps one sign on xi > 0, which is what the
    /// integration-by-parts bound below needs (Phi' monotone).
    fn second_deriv_single_signed(&self) -> bool {
        match self.n_terms {
            0 | 1 => true,
            _ => {
                let s1 = self.terms[0].0 * self.terms[0].1 * (self.terms[0].1 - 1.0);
                let s2 = self.terms[1].0 * self.terms[1].1 * (self.terms[1].1 - 1.0);
                s1 * s2 >= 0.0
            }
        }
    }
}

/// Cheap rigorous upper bound for |evaluate(req)|: per band,
/// min(band length, 3 / min|Phi'|) when Phi' is monotone and nonvanishing
/// (one integration by parts), else the band length. In dimension 2 the
/// bound is applied along each axis separately; with a single merged
/// radial term the per-line phase derivative is monotone on every
/// axis-parallel line, so the 1D bound holds line by line. Lets sup scans
/// skip directions that provably cannot beat a running maximum.
pub fn quick_upper_bound(req: &EvalRequest) -> f64 {
    let d = req.profile.dimension();
    let norm = (2.0 * std::f64::consts::PI).powi(-(d as i32));
    let mut total = 0.0;
    for band in req.profile.bands() {
        let phase = BandPhase::new(req.position, req.t, req.m, band.phase);
        let bound = match band.support {
            Support::Line { lo, hi } => {
                let mut bound = hi - lo;
                if phase.second_deriv_single_signed() {
                    let mut ibp: f64 = 0.0;
                    for (a, b) in split_at_zero(lo, hi) {
                        let dmin = phase.min_abs_deriv(a, b);
                        let piece = if dmin > 0.0 { (3.0 / dmin).min(b - a) } else { b - a };
                        ibp += piece;
                    }
                    bound = bound.min(ibp);
                }
                bound
            }
            Support::Rect { lo, hi } => {
                let area = (hi[0] - lo[0]) * (hi[1] - lo[1]);
                let mut bound = area;
                if phase.n_terms <= 1 {
                    let r_max = {
                        let mx = lo[0].abs().max(hi[0].abs());
                        let my = lo[1].abs().max(hi[1].abs());
                        mx.hypot(my)
                    };
                    let radial: f64 = phase.terms[..phase.n_terms]
                        .iter()
                        .map(|(coef, exp)| coef.abs() * exp * fpow(r_max, exp - 1.0))
                        .sum();
                    for ax in 0..2 {
                        let dmin = phase.linear[ax].abs() - radial;
                        if dmin > 0.0 {
                            let other = hi[1 - ax] - lo[1 - ax];
                            bound = bound.min(other * (3.0 / dmin).min(hi[ax] - lo[ax]));
                        }
                    }
                }
                bound
            }
        };
        total += band.amplitude * bound;
    }
    total * norm
}

/// Seeded random 1D request for oracle-equivalence checks. Band supports
/// stay below lambda <= 200 and |t| is drawn inside the window where the
/// 2^20-node midpoint oracle resolves the integrand to well under 1e-6
/// relative, so the comparison measures the adaptive path and not the
/// oracle's own discretization error.
pub fn random_oracle_request(
    rng: &mut impl rand::Rng,
) -> (SpectralProfile, f64, f64, f64) {
    let lambda: f64 = rng.random_range(20.0..200.0);
    let m: f64 = rng.random_range(1.5..2.0);
    let n_bands = rng.random_range(1..=3usize);
    let slot = lambda / n_bands as f64;
    let mut bands = Vec::with_capacity(n_bands);
    for i in 0..n_bands {
        let w = rng.random_range(0.5..(40.0 / n_bands as f64).min(slot * 0.9));
        let lo = i as f64 * slot + rng.random_range(0.0..(slot - w));
        let amp = rng.random_range(0.5..2.0);
        let phase = if rng.random_bool(0.5) {
            PhaseKind::None
        } else {
            PhaseKind::Linear { c: rng.random_range(-1.0..1.0) }
        };
        bands.push(Band::line(lo, lo + w, amp, phase));
    }
    let x = rng.random_range(-1.0..1.0);
    let t = rng.random_range(-1.0..1.0) * 8.0 / lambda;
    (make_profile(1, bands).expect("generated bands are disjoint"), m, x, t)
}

/// sup over the band supports of the total phase magnitude |Phi(xi)|,
/// from panel-endpoint samples plus interior critical points of Phi
/// (roots of Phi' by safeguarded bisection per subpanel).
pub fn phase_bound(req: &EvalRequest) -> Result<f64> {
    req.validate()?;
    let mut best: f64 = 0.0;
    for band in req.profile.bands() {
        if band.amplitude == 0.0 {
            continue;
        }
        let phase = BandPhase::new(req.position, req.t, req.m, band.phase);
        match band.support {
            Support::Line { lo, hi } => {
                for (a, b) in split_at_zero(lo, hi) {
                    best = best.max(sup_abs_phase_1d(&phase, a, b));
                }
            }
            Support::Rect { lo, hi } => {
                best = best.max(sup_abs_phase_2d(&phase, lo, hi));
            }
        }
    }
    Ok(best)
}

fn sup_abs_phase_1d(phase: &BandPhase, a: f64, b: f64) -> f64 {
    const SUBPANELS: usize = 512;
    let h = (b - a) / SUBPANELS as f64;
    let mut best: f64 = 0.0;
    let mut prev_x = a;
    let mut prev_d = phase.deriv1(a);
    best = best.max(phase.eval1(a).abs());
    for i in 1..=SUBPANELS {
        let x = a + i as f64 * h;
        let d = phase.deriv1(x);
        best = best.max(phase.eval1(x).abs());
        if prev_d == 0.0 {
            best = best.max(phase.eval1(prev_x).abs());
        } else if prev_d * d < 0.0 {
            // safeguarded bisection on Phi' within the subpanel
            let (mut l, mut r) = (prev_x, x);
            let mut dl = prev_d;
            for _ in 0..80 {
                let mid = 0.5 * (l + r);
                let dm = phase.deriv1(mid);
                if dm == 0.0 {
                    l = mid;
                    break;
                }
                if dl * dm < 0.0 {
                    r = mid;
                } else {
                    l = mid;
                    dl = dm;
                }
            }
            best = best.max(phase.eval1(0.5 * (l + r)).abs());
        }
        prev_x = x;
        prev_d = d;
    }
    best
}

fn sup_abs_phase_2d(phase: &BandPhase, lo: [f64; 2], hi: [f64; 2]) -> f64 {
    // dense lattice plus one local refinement pass around the maximizer
    const N: usize = 128;
    let mut best: f64 = 0.0;
    let mut arg = [lo[0], lo[1]];
    let hx = (hi[0] - lo[0]) / N as f64;
    let hy = (hi[1] - lo[1]) / N as f64;
    for i in 0..=N {
        let x = lo[0] + i as f64 * hx;
        for j in 0..=N {
            let y = lo[1] + j as f64 * hy;
            let v = phase.eval2([x, y]).abs();
            if v > best {
                best = v;
                arg = [x, y];
            }
        }
    }
    // refine on a shrinking 9x9 stencil
    let mut step = [hx, hy];
    for _ in 0..40 {
        let mut improved = false;
        for di in -4i32..=4 {
            for dj in -4i32..=4 {
                let x = (arg[0] + di as f64 * step[0] * 0.25).clamp(lo[0], hi[0]);
                let y = (arg[1] + dj as f64 * step[1] * 0.25).clamp(lo[1], hi[1]);
                let v = phase.eval2([x, y]).abs();
                if v > best {
                    best = v;
                    arg = [x, y];
                    improved = true;
                }
            }
        }
        step = [step[0] * 0.5, step[1] * 0.5];
        if !improved && step[0] < hx * 1e-6 {
            break;
        }
    }
    best
}
