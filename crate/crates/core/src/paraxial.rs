//! First-order optics: surface powers, the closed-form focal distance of
//! the four-surface glass/water objective, and a general surface-by-surface
//! paraxial recursion that serves as the independent route for the closed
//! form.
//!
//! Sign conventions: curvature is positive when the center of curvature
//! lies on the image side; object distance is entered positive; image
//! distance is positive on the image side. A zero-power objective at a
//! finite conjugate therefore images at `-a` — the image coincides with the
//! object.

use thiserror::Error;

use crate::media::{self, DispersionLaw, MediaError, OpticalMedium, SpectralLine};

/// Relative scale below which a focal denominator counts as zero.
pub const AFOCAL_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParaxialError {
    #[error(transparent)]
    Media(#[from] MediaError),
    /// The focal denominator vanished: emergent rays are parallel to the
    /// incident ones (or the conjugate sits at infinity). Carries the
    /// system power for diagnosis.
    #[error("afocal or conjugate at infinity (system power {power:e})")]
    AfocalOrConjugateAtInfinity { power: f64 },
    #[error("a paraxial system needs at least one surface")]
    EmptySystem,
    #[error("surface {surface}: refractive indices must be positive")]
    NonPositiveIndex { surface: usize },
    #[error("object distance must be positive, got {0}")]
    NonPositiveObjectDistance(f64),
}

/// Axial object position: a positive distance in front of the first
/// surface, or the distinguished infinite value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ObjectDistance {
    Infinite,
    Finite(f64),
}

impl ObjectDistance {
    pub fn finite(distance: f64) -> Result<Self, ParaxialError> {
        if distance > 0.0 && distance.is_finite() {
            Ok(ObjectDistance::Finite(distance))
        } else {
            Err(ParaxialError::NonPositiveObjectDistance(distance))
        }
    }

    /// 1/a, with the infinite object contributing exactly zero.
    pub fn reciprocal(&self) -> f64 {
        match self {
            ObjectDistance::Infinite => 0.0,
            ObjectDistance::Finite(a) => 1.0 / a,
        }
    }
}

/// The four signed curvatures of the glass/water compound objective, in
/// surface order air->glass, glass->water, water->glass, glass->air.
/// A flat face is curvature zero.
#[derive(Clone, Debug, PartialEq)]
pub struct CompoundObjective {
    pub c_f: f64,
    pub c_g: f64,
    pub c_h: f64,
    pub c_k: f64,
    pub glass: OpticalMedium,
    pub water: OpticalMedium,
}

/// What to image through a [`CompoundObjective`].
#[derive(Clone, Debug)]
pub struct ImagingQuery {
    pub object_distance: ObjectDistance,
    pub line: SpectralLine,
    pub law: DispersionLaw,
}

impl CompoundObjective {
    pub fn new(
        curvatures: [f64; 4],
        glass: OpticalMedium,
        water: OpticalMedium,
    ) -> Result<Self, MediaError> {
        glass.validate()?;
        water.validate()?;
        let [c_f, c_g, c_h, c_k] = curvatures;
        Ok(CompoundObjective {
            c_f,
            c_g,
            c_h,
            c_k,
            glass,
            water,
        })
    }

    /// The two aggregate curvature combinations `x = c_g - c_h` and
    /// `y = c_f - c_g + c_h - c_k`; `x + y = c_f - c_k` exactly.
    pub fn aggregates(&self) -> (f64, f64) {
        let x = self.c_g - self.c_h;
        let y = self.c_f - self.c_g + self.c_h - self.c_k;
        (x, y)
    }

    /// Glass and water ratios for one line under the law.
    pub fn line_ratios(
        &self,
        line: SpectralLine,
        law: &DispersionLaw,
    ) -> Result<(f64, f64), MediaError> {
        let glass = media::line_ratio(&self.glass, line, law)?;
        let water = media::line_ratio(&self.water, line, law)?;
        Ok((glass, water))
    }

    /// System power `P = (n_line - 1) x + (m_line - 1) y` in 1/length,
    /// where `m` is the glass ratio and `n` the water ratio for the line.
    pub fn system_power(&self, line: SpectralLine, law: &DispersionLaw) -> Result<f64, MediaError> {
        let (glass, water) = self.line_ratios(line, law)?;
        let (x, y) = self.aggregates();
        Ok((water - 1.0) * x + (glass - 1.0) * y)
    }

    /// Closed-form focal distance `1 / (P - 1/a)`.
    ///
    /// For an infinite object this is the focal length `1/P`; for a
    /// zero-power objective at finite `a` it is `-a`, the image at the
    /// object.
    pub fn euler_focal_distance(&self, query: &ImagingQuery) -> Result<f64, ParaxialError> {
        let power = self.system_power(query.line, &query.law)?;
        let denom = power - query.object_distance.reciprocal();
        let scale = 1.0_f64.max(self.c_f.abs() + self.c_g.abs() + self.c_h.abs() + self.c_k.abs());
        if denom.abs() <= AFOCAL_EPS * scale {
            return Err(ParaxialError::AfocalOrConjugateAtInfinity { power });
        }
        Ok(1.0 / denom)
    }

    /// Mean-minus-anchored-line power difference, zero exactly when the
    /// achromatic condition holds.
    pub fn chromatic_focal_shift(
        &self,
        law: &DispersionLaw,
        line: SpectralLine,
    ) -> Result<f64, MediaError> {
        let mean = self.system_power(SpectralLine::Mean, law)?;
        let other = self.system_power(line, law)?;
        Ok(mean - other)
    }

    /// The equivalent zero-thickness surface stack for one line, the input
    /// to [`paraxial_trace`].
    pub fn thin_stack(
        &self,
        line: SpectralLine,
        law: &DispersionLaw,
    ) -> Result<Vec<ParaxialSurface>, MediaError> {
        let (glass, water) = self.line_ratios(line, law)?;
        Ok(vec![
            ParaxialSurface::thin(self.c_f, 1.0, glass),
            ParaxialSurface::thin(self.c_g, glass, water),
            ParaxialSurface::thin(self.c_h, water, glass),
            ParaxialSurface::thin(self.c_k, glass, 1.0),
        ])
    }
}

/// One refracting surface of a general paraxial system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParaxialSurface {
    pub curvature: f64,
    pub index_before: f64,
    pub index_after: f64,
    /// Axial gap to the next surface (meters); zero for thin stacks.
    pub thickness_after: f64,
}

impl ParaxialSurface {
    pub fn thin(curvature: f64, index_before: f64, index_after: f64) -> Self {
        ParaxialSurface {
            curvature,
            index_before,
            index_after,
            thickness_after: 0.0,
        }
    }
}

/// Surface-by-surface paraxial recursion: refraction
/// `n2 u' = n1 u - h c (n2 - n1)` and transfer `h' = h + t u'`.
///
/// Returns the image distance after the last surface for a paraxial ray
/// from the axial object point. Independent of the closed form above; on
/// zero-thickness four-surface stacks the two agree to machine precision.
pub fn paraxial_trace(
    surfaces: &[ParaxialSurface],
    object_distance: ObjectDistance,
) -> Result<f64, ParaxialError> {
    if surfaces.is_empty() {
        return Err(ParaxialError::EmptySystem);
    }
    for (i, s) in surfaces.iter().enumerate() {
        if !(s.index_before > 0.0 && s.index_after > 0.0) {
            return Err(ParaxialError::NonPositiveIndex { surface: i });
        }
    }

    let mut height = 1.0;
    let mut slope = object_distance.reciprocal();
    let mut scale: f64 = 1.0;
    for s in surfaces {
        let reduced =
            s.index_before * slope - height * s.curvature * (s.index_after - s.index_before);
        slope = reduced / s.index_after;
        height += s.thickness_after * slope;
        scale = scale.max(slope.abs()).max(height.abs());
    }
    if slope.abs() <= AFOCAL_EPS * scale {
        return Err(ParaxialError::AfocalOrConjugateAtInfinity {
            power: -slope / height,
        });
    }
    Ok(-height / slope)
}
