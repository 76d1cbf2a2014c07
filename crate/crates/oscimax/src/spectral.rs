//! Band-limited initial data, represented on the frequency side: each band
//! is an interval (or axis-aligned rectangle in dimension 2) carrying a
//! constant amplitude and an optional unimodular phase twist.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::adaptive_smooth;

/// Phase twist multiplying the indicator of a band.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseKind {
    #[default]
    None,
    /// e^{-i |xi|^m} with the Euclidean norm of xi.
    NegativeDispersion { m: f64 },
    /// e^{i c xi} (componentwise sum in dimension 2).
    Linear { c: f64 },
}

/// Frequency support of one band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Line { lo: f64, hi: f64 },
    Rect { lo: [f64; 2], hi: [f64; 2] },
}

impl Support {
    pub fn dimension(&self) -> usize {
        match self {
            Support::Line { .. } => 1,
            Support::Rect { .. } => 2,
        }
    }

    /// Length (1D) or area (2D).
    pub fn measure(&self) -> f64 {
        match self {
            Support::Line { lo, hi } => hi - lo,
            Support::Rect { lo, hi } => (hi[0] - lo[0]) * (hi[1] - lo[1]),
        }
    }

    /// Largest Euclidean frequency magnitude on the band.
    pub fn max_freq(&self) -> f64 {
        match self {
            Support::Line { lo, hi } => lo.abs().max(hi.abs()),
            Support::Rect { lo, hi } => {
                let mx = lo[0].abs().max(hi[0].abs());
                let my = lo[1].abs().max(hi[1].abs());
                mx.hypot(my)
            }
        }
    }

    fn is_valid(&self) -> Result<()> {
        match self {
            Support::Line { lo, hi } => {
                if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::InvertedInterval { lo: *lo, hi: *hi });
                }
            }
            Support::Rect { lo, hi } => {
                for ax in 0..2 {
                    if !(lo[ax] < hi[ax]) || !lo[ax].is_finite() || !hi[ax].is_finite() {
                        return Err(Error::InvertedInterval { lo: lo[ax], hi: hi[ax] });
                    }
                }
            }
        }
        Ok(())
    }

    fn overlaps(&self, other: &Support) -> bool {
        match (self, other) {
            (Support::Line { lo: a, hi: b }, Support::Line { lo: c, hi: d }) => a < d && c < b,
            (Support::Rect { lo: a, hi: b }, Support::Rect { lo: c, hi: d }) => {
                (0..2).all(|ax| a[ax] < d[ax] && c[ax] < b[ax])
            }
            _ => false,
        }
    }
}

/// One constant-amplitude piece of the Fourier data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub support: Support,
    pub amplitude: f64,
    pub phase: PhaseKind,
}

impl Band {
    pub fn line(lo: f64, hi: f64, amplitude: f64, phase: PhaseKind) -> Self {
        Band { support: Support::Line { lo, hi }, amplitude, phase }
    }

    pub fn rect(lo: [f64; 2], hi: [f64; 2], amplitude: f64, phase: PhaseKind) -> Self {
        Band { support: Support::Rect { lo, hi }, amplitude, phase }
    }
}

/// Validated band-limited profile.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProfile {
    dimension: usize,
    bands: Vec<Band>,
}

/// Builds a profile, rejecting empty data, inverted intervals, overlapping
/// band interiors, non-finite amplitudes and dispersion orders m <= 1.
pub fn make_profile(dimension: usize, bands: Vec<Band>) -> Result<SpectralProfile> {
    if !(dimension == 1 || dimension == 2) {
        return Err(Error::InvalidRequest(format!("dimension {dimension} not in {{1,2}}")));
    }
    if bands.is_empty() {
        return Err(Error::EmptyProfile);
    }
    for band in &bands {
        band.support.is_valid()?;
        if band.support.dimension() != dimension {
            return Err(Error::InvalidRequest(
                "band support dimension does not match profile dimension".into(),
            ));
        }
        if !band.amplitude.is_finite() || band.amplitude < 0.0 {
            return Err(Error::InvalidRequest(format!(
                "amplitude {} must be finite and >= 0",
                band.amplitude
            )));
        }
        if let PhaseKind::NegativeDispersion { m } = band.phase {
            if !(m > 1.0) {
                return Err(Error::InvalidRequest(format!(
                    "negative-dispersion order m = {m} must exceed 1"
                )));
            }
        }
    }
    for i in 0..bands.len() {
        for j in i + 1..bands.len() {
            if bands[i].support.overlaps(&bands[j].support) {
                return Err(Error::OverlappingBands(
                    format!("{:?}", bands[i].support),
                    format!("{:?}", bands[j].support),
                ));
            }
        }
    }
    Ok(SpectralProfile { dimension, bands })
}

impl SpectralProfile {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    /// Total variation of the Fourier data: sum of amplitude x |band|.
    /// (2 pi)^{-d} times this bounds |S_t f| pointwise.
    pub fn band_mass(&self) -> f64 {
        self.bands.iter().map(|b| b.amplitude * b.support.measure()).sum()
    }

    pub fn max_freq(&self) -> f64 {
        self.bands.iter().map(|b| b.support.max_freq()).fold(0.0, f64::max)
    }

    /// Same profile with all amplitudes scaled by |a|.
    pub fn scaled(&self, a: f64) -> SpectralProfile {
        let mut bands = self.bands.clone();
        for band in &mut bands {
            band.amplitude *= a.abs();
        }
        SpectralProfile { dimension: self.dimension, bands }
    }
}

/// H^s norm of the profile:
/// (2 pi)^{-d/2} ( integral (1+|xi|^2)^s |fhat|^2 )^{1/2}.
/// Phase twists are unimodular, so only amplitudes enter.
pub fn sobolev_norm(profile: &SpectralProfile, s: f64) -> f64 {
    let d = profile.dimension as f64;
    let mut total = 0.0;
    for band in &profile.bands {
        let a2 = band.amplitude * band.amplitude;
        if a2 == 0.0 {
            continue;
        }
        let contrib = match band.support {
            Support::Line { lo, hi } => {
                if s == 0.0 {
                    hi - lo
                } else {
                    adaptive_smooth(lo, hi, 1e-12, |xi| (1.0 + xi * xi).powf(s))
                }
            }
            Support::Rect { lo, hi } => {
                if s == 0.0 {
                    (hi[0] - lo[0]) * (hi[1] - lo[1])
                } else {
                    adaptive_smooth(lo[0], hi[0], 1e-12, |x| {
                        adaptive_smooth(lo[1], hi[1], 1e-12, |y| {
                            (1.0 + x * x + y * y).powf(s)
                        })
                    })
                }
            }
        };
        total += a2 * contrib;
    }
    (2.0 * std::f64::consts::PI).powf(-d / 2.0) * total.sqrt()
}

// --- JSON schema ------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Extent {
    One(f64),
    Two([f64; 2]),
}

#[derive(Serialize, Deserialize)]
struct BandJson {
    lo: Extent,
    hi: Extent,
    amplitude: f64,
    #[serde(default)]
    phase: PhaseKind,
}

#[derive(Serialize, Deserialize)]
struct ProfileJson {
    dimension: usize,
    bands: Vec<BandJson>,
}

/// Parses the profile JSON schema, e.g.
/// `{"dimension":1,"bands":[{"lo":0.0,"hi":100.0,"amplitude":1.0,
///   "phase":{"kind":"negative_dispersion","m":2.0}}]}`.
pub fn profile_from_json(text: &str) -> Result<SpectralProfile> {
    let parsed: ProfileJson = serde_json::from_str(text)
        .map_err(|e| Error::InvalidRequest(format!("profile JSON: {e}")))?;
    let mut bands = Vec::with_capacity(parsed.bands.len());
    for bj in parsed.bands {
        let support = match (bj.lo, bj.hi) {
            (Extent::One(lo), Extent::One(hi)) => Support::Line { lo, hi },
            (Extent::Two(lo), Extent::Two(hi)) => Support::Rect { lo, hi },
            _ => {
                return Err(Error::InvalidRequest(
                    "band lo/hi must both be scalars or both be pairs".into(),
                ))
            }
        };
        bands.push(Band { support, amplitude: bj.amplitude, phase: bj.phase });
    }
    make_profile(parsed.dimension, bands)
}

pub fn profile_to_json(profile: &SpectralProfile) -> String {
    let bands = profile
        .bands
        .iter()
        .map(|b| {
            let (lo, hi) = match b.support {
                Support::Line { lo, hi } => (Extent::One(lo), Extent::One(hi)),
                Support::Rect { lo, hi } => (Extent::Two(lo), Extent::Two(hi)),
            };
            BandJson { lo, hi, amplitude: b.amplitude, phase: b.phase }
        })
        .collect();
    serde_json::to_string(&ProfileJson { dimension: profile.dimension, bands })
        .expect("profile serialization cannot fail")
}
