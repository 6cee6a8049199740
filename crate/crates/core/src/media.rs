//! Refraction ratios per spectral line, the two dispersion laws, and the
//! chained-media construction.
//!
//! A medium refracts each of the three categorical rays (red, mean, violet)
//! with its own ratio. Measurements supply the mean ratio and at most one
//! per-line ratio for a reference medium; a [`DispersionLaw`] extends that
//! anchor to every other medium. Two laws are supported:
//!
//! * linear proportion: `m-1 : n-1 :: m-M : n-N`, so the per-line gap scales
//!   with the mean refraction;
//! * power law: `n = m^a` and `N = M^a`, so the exponent `a` carries over.
//!
//! Both laws agree to first order in `m - 1`; everything in this crate that
//! separates them is a second-order effect made observable elsewhere.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// The three categorical rays, ordered by refrangibility (red bends least).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpectralLine {
    Red,
    Mean,
    Violet,
}

impl SpectralLine {
    pub const ALL: [SpectralLine; 3] =
        [SpectralLine::Red, SpectralLine::Mean, SpectralLine::Violet];
}

impl fmt::Display for SpectralLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpectralLine::Red => "red",
            SpectralLine::Mean => "mean",
            SpectralLine::Violet => "violet",
        };
        f.write_str(s)
    }
}

impl FromStr for SpectralLine {
    type Err = MediaError;

    fn from_str(s: &str) -> Result<Self, MediaError> {
        match s {
            "red" => Ok(SpectralLine::Red),
            "mean" => Ok(SpectralLine::Mean),
            "violet" => Ok(SpectralLine::Violet),
            other => Err(MediaError::UnknownLine(other.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MediaError {
    /// The reference pair's mean ratio equals 1, so neither law can anchor
    /// to it (both need the gap or the logarithm of the mean ratio).
    #[error("degenerate reference: mean ratio must differ from 1")]
    DegenerateReference,
    /// A ratio or parameter fell outside the physical domain of the call.
    #[error("value {0} is outside the supported domain")]
    OutOfDomain(f64),
    #[error("unknown spectral line `{0}` (expected red, mean or violet)")]
    UnknownLine(String),
    #[error("medium `{name}`: {reason}")]
    InvalidMedium { name: String, reason: String },
}

/// A measured (mean, line) ratio pair for one medium, the anchor of a law.
///
/// The pair does not record which non-mean line it measures; the caller
/// pairs laws with lines. For a red anchor `line_ratio < mean_ratio`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefractionPair {
    pub mean_ratio: f64,
    pub line_ratio: f64,
}

impl RefractionPair {
    pub fn new(mean_ratio: f64, line_ratio: f64) -> Result<Self, MediaError> {
        if !(mean_ratio > 1.0) {
            return Err(MediaError::OutOfDomain(mean_ratio));
        }
        if !(line_ratio > 1.0) {
            return Err(MediaError::OutOfDomain(line_ratio));
        }
        Ok(RefractionPair {
            mean_ratio,
            line_ratio,
        })
    }
}

/// Which derivation rule a [`DispersionLaw`] applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LawKind {
    Linear,
    Power,
}

impl fmt::Display for LawKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LawKind::Linear => "linear",
            LawKind::Power => "power",
        })
    }
}

impl FromStr for LawKind {
    type Err = MediaError;

    fn from_str(s: &str) -> Result<Self, MediaError> {
        match s {
            "linear" => Ok(LawKind::Linear),
            "power" => Ok(LawKind::Power),
            other => Err(MediaError::InvalidMedium {
                name: other.to_string(),
                reason: "unknown law kind (expected linear or power)".to_string(),
            }),
        }
    }
}

/// A dispersion law anchored to one measured reference pair.
///
/// The instance derives ratios for whatever line its reference measures;
/// anchoring the same kind to a violet pair yields the violet law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersionLaw {
    pub kind: LawKind,
    pub reference: RefractionPair,
}

impl DispersionLaw {
    pub fn new(kind: LawKind, reference: RefractionPair) -> Result<Self, MediaError> {
        if reference.mean_ratio == 1.0 {
            return Err(MediaError::DegenerateReference);
        }
        Ok(DispersionLaw { kind, reference })
    }

    /// Derive the line ratio of a medium with the given mean ratio.
    pub fn derive(&self, target_mean: f64) -> Result<f64, MediaError> {
        match self.kind {
            LawKind::Linear => derive_line_ratio_linear(target_mean, &self.reference),
            LawKind::Power => {
                derive_line_ratio_power(target_mean, &self.reference).map(|d| d.line_ratio)
            }
        }
    }
}

/// A named medium: a mean ratio plus optional measured per-line overrides.
#[derive(Clone, Debug, PartialEq)]
pub struct OpticalMedium {
    pub name: String,
    pub mean_ratio: f64,
    /// Measured per-line ratios; an entry here wins over any law.
    pub explicit_lines: BTreeMap<SpectralLine, f64>,
}

impl OpticalMedium {
    pub fn new(name: impl Into<String>, mean_ratio: f64) -> Self {
        OpticalMedium {
            name: name.into(),
            mean_ratio,
            explicit_lines: BTreeMap::new(),
        }
    }

    pub fn with_line(mut self, line: SpectralLine, ratio: f64) -> Self {
        self.explicit_lines.insert(line, ratio);
        self
    }

    pub fn validate(&self) -> Result<(), MediaError> {
        if !(self.mean_ratio >= 1.0) {
            return Err(MediaError::InvalidMedium {
                name: self.name.clone(),
                reason: format!("mean ratio {} must be at least 1", self.mean_ratio),
            });
        }
        for (line, ratio) in &self.explicit_lines {
            if !(*ratio > 0.0) {
                return Err(MediaError::InvalidMedium {
                    name: self.name.clone(),
                    reason: format!("{line} ratio {ratio} must be positive"),
                });
            }
            if *line == SpectralLine::Red && *ratio > self.mean_ratio {
                return Err(MediaError::InvalidMedium {
                    name: self.name.clone(),
                    reason: format!(
                        "red ratio {ratio} exceeds mean ratio {} (red refracts less)",
                        self.mean_ratio
                    ),
                });
            }
        }
        Ok(())
    }
}

/// A chain of equally spaced media: each step refracts red by `step_red : 1`
/// and violet by `step_violet : 1`; the chain composes `steps` of them.
///
/// The chain exponent is its own integer field; it never overloads the
/// symbol used for a medium's mean ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainSpec {
    pub step_red: f64,
    pub step_violet: f64,
    pub steps: u32,
}

/// Linear proportion: `N = n - (n - 1) * (m - M) / (m - 1)` for a target
/// mean ratio `n` and reference pair `(m, M)`.
///
/// Exact when evaluated in rational arithmetic on rational inputs; see
/// [`crate::exact::derive_line_ratio_linear`]. The division is grouped as
/// `(n - 1)/(m - 1)` so a target equal to the reference mean inherits the
/// reference line ratio bit for bit (ratios below 2 subtract exactly).
pub fn derive_line_ratio_linear(
    target_mean: f64,
    reference: &RefractionPair,
) -> Result<f64, MediaError> {
    let m = reference.mean_ratio;
    let big_m = reference.line_ratio;
    if m == 1.0 {
        return Err(MediaError::DegenerateReference);
    }
    Ok(target_mean - (target_mean - 1.0) / (m - 1.0) * (m - big_m))
}

/// Result of a power-law derivation; the exponent is exposed alongside the
/// ratio because the solver's conditioning report needs it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLawDerivation {
    pub line_ratio: f64,
    pub exponent: f64,
}

/// Power law: `a = log(n) / log(m)`, `N = M^a` for a target mean ratio `n`
/// and reference pair `(m, M)`.
pub fn derive_line_ratio_power(
    target_mean: f64,
    reference: &RefractionPair,
) -> Result<PowerLawDerivation, MediaError> {
    let m = reference.mean_ratio;
    let big_m = reference.line_ratio;
    if m == 1.0 {
        return Err(MediaError::DegenerateReference);
    }
    if !(target_mean >= 1.0) {
        return Err(MediaError::OutOfDomain(target_mean));
    }
    let exponent = target_mean.ln() / m.ln();
    Ok(PowerLawDerivation {
        line_ratio: big_m.powf(exponent),
        exponent,
    })
}

/// The ratio `(m - m^alpha) / (m - 1)` and its small-gap limit `1 - alpha`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioGap {
    pub ratio: f64,
    pub limit: f64,
}

/// Evaluates how nearly constant the dispersion fraction is under the power
/// law: the returned `ratio` approaches `limit = 1 - alpha` as the mean
/// ratio approaches 1, with an `O(m - 1)` gap.
pub fn euler_ratio_gap(mean_ratio: f64, alpha: f64) -> Result<RatioGap, MediaError> {
    if !(mean_ratio > 1.0) {
        return Err(MediaError::OutOfDomain(mean_ratio));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(MediaError::OutOfDomain(alpha));
    }
    Ok(RatioGap {
        ratio: (mean_ratio - mean_ratio.powf(alpha)) / (mean_ratio - 1.0),
        limit: 1.0 - alpha,
    })
}

/// Composite red and violet ratios of a chain: `(r^steps, v^steps)`.
///
/// Satisfies `log(R) : log(r) = log(V) : log(v)` whenever the logs are
/// nonzero; an empty chain returns `(1, 1)`.
pub fn chain_media(spec: &ChainSpec) -> (f64, f64) {
    let mut red = 1.0;
    let mut violet = 1.0;
    for _ in 0..spec.steps {
        red *= spec.step_red;
        violet *= spec.step_violet;
    }
    (red, violet)
}

/// The ratio a medium applies to one line: the mean line returns the mean
/// ratio, an explicit measured value wins, otherwise the law derives it.
pub fn line_ratio(
    medium: &OpticalMedium,
    line: SpectralLine,
    law: &DispersionLaw,
) -> Result<f64, MediaError> {
    if line == SpectralLine::Mean {
        return Ok(medium.mean_ratio);
    }
    if let Some(ratio) = medium.explicit_lines.get(&line) {
        return Ok(*ratio);
    }
    law.derive(medium.mean_ratio)
}

/// Measured constants bundled with the crate: glass refracts mean rays at
/// 31/20 and red rays at 77/50; water refracts mean rays at 4/3. Every
/// law in the reports is anchored to the glass pair.
pub mod bundled {
    use super::*;

    pub const GLASS_MEAN: f64 = 31.0 / 20.0;
    pub const GLASS_RED: f64 = 77.0 / 50.0;
    pub const WATER_MEAN: f64 = 4.0 / 3.0;

    pub fn glass() -> OpticalMedium {
        OpticalMedium::new("glass", GLASS_MEAN)
    }

    pub fn water() -> OpticalMedium {
        OpticalMedium::new("water", WATER_MEAN)
    }

    /// The measured glass (mean, red) pair that anchors both laws.
    pub fn glass_red_pair() -> RefractionPair {
        RefractionPair {
            mean_ratio: GLASS_MEAN,
            line_ratio: GLASS_RED,
        }
    }

    pub fn linear_law() -> DispersionLaw {
        DispersionLaw {
            kind: LawKind::Linear,
            reference: glass_red_pair(),
        }
    }

    pub fn power_law() -> DispersionLaw {
        DispersionLaw {
            kind: LawKind::Power,
            reference: glass_red_pair(),
        }
    }
}
