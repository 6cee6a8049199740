//! Exact meridional ray tracing through spherical surfaces.
//!
//! The paraxial model of the sibling modules hides everything that depends
//! on ray height; this tracer restores it. Rays live in the meridional
//! plane as position `(z, y)` plus a unit direction with positive axial
//! component. Each surface is the cap of a sphere (or a plane for zero
//! curvature) centered on the axis; tracing alternates exact
//! sphere-intersection and Snell refraction.
//!
//! Surfaces may sit at zero axial separation, matching the thin model of
//! the paraxial closed form, so an intersection parameter is allowed to be
//! slightly negative where zero-thickness surfaces interpenetrate off axis.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::media::{self, DispersionLaw, MediaError, OpticalMedium, SpectralLine};
use crate::paraxial::{self, ObjectDistance, ParaxialError, ParaxialSurface};

/// Reserved name of the ambient medium (index exactly 1).
pub const AMBIENT: &str = "air";

/// Deviations below this count as an exact paraxial match in
/// [`paraxial_limit_check`].
const EXACT_DEVIATION_FLOOR: f64 = 1e-11;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error(transparent)]
    Media(#[from] MediaError),
    #[error(transparent)]
    Paraxial(#[from] ParaxialError),
    #[error("surface {surface} refers to undefined medium `{name}`")]
    UnknownMedium { surface: usize, name: String },
    #[error("a prescription needs at least one surface")]
    EmptyPrescription,
    #[error("surface {surface}: {reason}")]
    InvalidSurface { surface: usize, reason: String },
    #[error("ray height {height} exceeds the first semi-aperture {semi_aperture}")]
    HeightBeyondFirstAperture { height: f64, semi_aperture: f64 },
    #[error("scan heights must be positive and strictly ascending")]
    BadHeights,
    #[error("a scan needs at least one spectral line")]
    NoLines,
    #[error(
        "a scan derives at most one non-mean line from its law; the others need explicit \
         per-medium ratios"
    )]
    AmbiguousScanLines,
    #[error("ray failed at a probe height: {status}")]
    RayFailure { status: TraceStatus },
}

/// A ray in the meridional plane: position and a unit direction with
/// positive axial component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeridionalRay {
    pub z: f64,
    pub y: f64,
    pub dz: f64,
    pub dy: f64,
}

impl MeridionalRay {
    /// Normalizes the direction; the axial component must be positive.
    pub fn new(z: f64, y: f64, dz: f64, dy: f64) -> Result<Self, TraceError> {
        let norm = dz.hypot(dy);
        if !(norm > 0.0) || !(dz > 0.0) {
            return Err(TraceError::InvalidSurface {
                surface: 0,
                reason: "ray direction must be forward (dz > 0)".to_string(),
            });
        }
        Ok(MeridionalRay {
            z,
            y,
            dz: dz / norm,
            dy: dy / norm,
        })
    }

    fn at(&self, t: f64) -> (f64, f64) {
        (self.z + t * self.dz, self.y + t * self.dy)
    }

    /// |1 - |direction||, the normalization drift.
    pub fn direction_drift(&self) -> f64 {
        (self.dz.hypot(self.dy) - 1.0).abs()
    }
}

/// One surface of a [`Prescription`].
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceSpec {
    /// 1/meters; zero encodes a flat face.
    pub curvature: f64,
    /// Axial gap to the next surface, meters, non-negative.
    pub thickness_after: f64,
    /// Medium behind the surface; `air` is the ambient and needs no entry
    /// in the media table.
    pub medium_after: String,
    /// Clear semi-diameter of the surface, meters, positive.
    pub semi_aperture: f64,
}

/// An ordered surface list with its media table and object position.
/// The space in front of the first surface is always the ambient.
#[derive(Clone, Debug, PartialEq)]
pub struct Prescription {
    pub surfaces: Vec<SurfaceSpec>,
    pub object_distance: ObjectDistance,
    pub media: BTreeMap<String, OpticalMedium>,
}

impl Prescription {
    pub fn validate(&self) -> Result<(), TraceError> {
        if self.surfaces.is_empty() {
            return Err(TraceError::EmptyPrescription);
        }
        for medium in self.media.values() {
            medium.validate()?;
        }
        for (i, s) in self.surfaces.iter().enumerate() {
            if !s.curvature.is_finite() {
                return Err(TraceError::InvalidSurface {
                    surface: i,
                    reason: "curvature must be finite".to_string(),
                });
            }
            if !(s.thickness_after >= 0.0) || !s.thickness_after.is_finite() {
                return Err(TraceError::InvalidSurface {
                    surface: i,
                    reason: format!("thickness {} must be non-negative", s.thickness_after),
                });
            }
            if !(s.semi_aperture > 0.0) {
                return Err(TraceError::InvalidSurface {
                    surface: i,
                    reason: format!("semi-aperture {} must be positive", s.semi_aperture),
                });
            }
            if s.medium_after != AMBIENT && !self.media.contains_key(&s.medium_after) {
                return Err(TraceError::UnknownMedium {
                    surface: i,
                    name: s.medium_after.clone(),
                });
            }
        }
        Ok(())
    }

    fn index_of(
        &self,
        name: &str,
        line: SpectralLine,
        law: &DispersionLaw,
    ) -> Result<f64, TraceError> {
        if name == AMBIENT {
            return Ok(1.0);
        }
        let medium = self.media.get(name).expect("validated");
        Ok(media::line_ratio(medium, line, law)?)
    }

    fn resolve(
        &self,
        line: SpectralLine,
        law: &DispersionLaw,
    ) -> Result<Vec<ResolvedSurface>, TraceError> {
        let mut out = Vec::with_capacity(self.surfaces.len());
        let mut vertex_z = 0.0;
        let mut index_before = 1.0;
        for s in &self.surfaces {
            let index_after = self.index_of(&s.medium_after, line, law)?;
            out.push(ResolvedSurface {
                curvature: s.curvature,
                vertex_z,
                semi_aperture: s.semi_aperture,
                index_before,
                index_after,
            });
            vertex_z += s.thickness_after;
            index_before = index_after;
        }
        Ok(out)
    }

    /// The paraxial equivalent of this prescription for one line.
    pub fn paraxial_stack(
        &self,
        line: SpectralLine,
        law: &DispersionLaw,
    ) -> Result<Vec<ParaxialSurface>, TraceError> {
        self.validate()?;
        Ok(self
            .resolve(line, law)?
            .iter()
            .zip(&self.surfaces)
            .map(|(r, s)| ParaxialSurface {
                curvature: r.curvature,
                index_before: r.index_before,
                index_after: r.index_after,
                thickness_after: s.thickness_after,
            })
            .collect())
    }

    /// Paraxial image distance for one line, `None` when afocal.
    pub fn paraxial_bfd(
        &self,
        line: SpectralLine,
        law: &DispersionLaw,
    ) -> Result<Option<f64>, TraceError> {
        let stack = self.paraxial_stack(line, law)?;
        match paraxial::paraxial_trace(&stack, self.object_distance) {
            Ok(v) => Ok(Some(v)),
            Err(ParaxialError::AfocalOrConjugateAtInfinity { .. }) => Ok(None),
            Err(e) => Err(e.into()),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct ResolvedSurface {
    curvature: f64,
    vertex_z: f64,
    semi_aperture: f64,
    index_before: f64,
    index_after: f64,
}

/// How a traced ray ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceStatus {
    Ok,
    MissedSurface { surface: usize },
    TotalInternalReflection { surface: usize },
    ApertureClipped { surface: usize },
}

impl TraceStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, TraceStatus::Ok)
    }

    pub fn label(&self) -> &'static str {
        match self {
            TraceStatus::Ok => "ok",
            TraceStatus::MissedSurface { .. } => "missed_surface",
            TraceStatus::TotalInternalReflection { .. } => "total_internal_reflection",
            TraceStatus::ApertureClipped { .. } => "aperture_clipped",
        }
    }

    pub fn surface(&self) -> Option<usize> {
        match self {
            TraceStatus::Ok => None,
            TraceStatus::MissedSurface { surface }
            | TraceStatus::TotalInternalReflection { surface }
            | TraceStatus::ApertureClipped { surface } => Some(*surface),
        }
    }
}

impl fmt::Display for TraceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.surface() {
            Some(i) => write!(f, "{} at surface {}", self.label(), i),
            None => f.write_str(self.label()),
        }
    }
}

/// Result of tracing one ray.
#[derive(Clone, Copy, Debug)]
pub struct TraceOutcome {
    pub status: TraceStatus,
    /// Axis crossing measured from the last vertex; present only for an ok
    /// status with a crossing (negative values mark virtual crossings).
    pub back_focal_distance: Option<f64>,
    /// Largest |n1 sin i - n2 sin t| over all refractions.
    pub max_snell_residual: f64,
    /// Largest direction-normalization drift seen after any surface.
    pub max_direction_drift: f64,
}

/// Where a ray meets a surface.
#[derive(Clone, Copy, Debug)]
pub struct SurfaceHit {
    pub point: (f64, f64),
    /// Unit normal oriented against the incoming direction.
    pub normal: (f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HitFailure {
    Missed,
    Clipped,
}

/// Marker error for a refraction whose transmitted sine would exceed one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TotalInternalReflection;

/// First intersection of a forward ray with the vertex cap of a spherical
/// surface (plane for zero curvature), within the semi-aperture.
///
/// The quadratic is solved in the cancellation-free branch, so rays that
/// start on or almost on the surface intersect cleanly; the vertex-cap
/// root is selected for either curvature sign.
pub fn intersect_sphere(
    ray: &MeridionalRay,
    curvature: f64,
    vertex_z: f64,
    semi_aperture: f64,
) -> Result<SurfaceHit, HitFailure> {
    let pz = ray.z - vertex_z;
    let py = ray.y;
    // F(q) = (c/2)|q|^2 - q_z = 0; substituting q = p + t d gives
    // (c/2) t^2 + B t + C with the coefficients below.
    let b = curvature * (pz * ray.dz + py * ray.dy) - ray.dz;
    let c_term = 0.5 * curvature * (pz * pz + py * py) - pz;

    let t = if curvature == 0.0 {
        // dz > 0 by the ray invariant, so a plane is always met.
        -c_term / b
    } else {
        let disc = b * b - 2.0 * curvature * c_term;
        if disc < 0.0 {
            return Err(HitFailure::Missed);
        }
        let sq = disc.sqrt();
        if b <= 0.0 {
            let denom = -b + sq;
            if denom == 0.0 {
                // Tangent grazing at the vertex-side root.
                -b / curvature
            } else {
                2.0 * c_term / denom
            }
        } else {
            (-b - sq) / curvature
        }
    };

    let point = ray.at(t);
    if point.1.abs() > semi_aperture {
        return Err(HitFailure::Clipped);
    }

    // Gradient of F is already unit length on the surface; normalize to
    // absorb the intersection residual, then orient against the ray.
    let gz = curvature * (point.0 - vertex_z) - 1.0;
    let gy = curvature * point.1;
    let norm = gz.hypot(gy);
    let mut normal = (gz / norm, gy / norm);
    if normal.0 * ray.dz + normal.1 * ray.dy > 0.0 {
        normal = (-normal.0, -normal.1);
    }
    Ok(SurfaceHit { point, normal })
}

/// Snell refraction of a unit direction across a surface with unit normal.
///
/// Returns the refracted unit direction, in the plane of incidence and
/// continuous with the incident ray; fails when the sine of the refracted
/// angle would exceed one.
pub fn refract(
    direction: (f64, f64),
    normal: (f64, f64),
    n_before: f64,
    n_after: f64,
) -> Result<(f64, f64), TotalInternalReflection> {
    if n_before == n_after {
        return Ok(direction);
    }
    // Work with the normal oriented against the incoming direction.
    let mut n = normal;
    if n.0 * direction.0 + n.1 * direction.1 > 0.0 {
        n = (-n.0, -n.1);
    }
    let eta = n_before / n_after;
    let cos_in = -(n.0 * direction.0 + n.1 * direction.1);
    let sin2_out = eta * eta * (1.0 - cos_in * cos_in);
    if sin2_out > 1.0 {
        return Err(TotalInternalReflection);
    }
    let cos_out = (1.0 - sin2_out).sqrt();
    let k = eta * cos_in - cos_out;
    let out = (eta * direction.0 + k * n.0, eta * direction.1 + k * n.1);
    let norm = out.0.hypot(out.1);
    Ok((out.0 / norm, out.1 / norm))
}

struct RawTrace {
    status: TraceStatus,
    final_ray: Option<MeridionalRay>,
    max_snell_residual: f64,
    max_direction_drift: f64,
}

fn trace_through(start: MeridionalRay, surfaces: &[ResolvedSurface]) -> RawTrace {
    let mut ray = start;
    let mut max_snell_residual = 0.0_f64;
    let mut max_direction_drift = 0.0_f64;
    for (i, s) in surfaces.iter().enumerate() {
        let hit = match intersect_sphere(&ray, s.curvature, s.vertex_z, s.semi_aperture) {
            Ok(hit) => hit,
            Err(HitFailure::Missed) => {
                return RawTrace {
                    status: TraceStatus::MissedSurface { surface: i },
                    final_ray: None,
                    max_snell_residual,
                    max_direction_drift,
                }
            }
            Err(HitFailure::Clipped) => {
                return RawTrace {
                    status: TraceStatus::ApertureClipped { surface: i },
                    final_ray: None,
                    max_snell_residual,
                    max_direction_drift,
                }
            }
        };
        let incoming = (ray.dz, ray.dy);
        let outgoing = match refract(incoming, hit.normal, s.index_before, s.index_after) {
            Ok(d) => d,
            Err(_) => {
                return RawTrace {
                    status: TraceStatus::TotalInternalReflection { surface: i },
                    final_ray: None,
                    max_snell_residual,
                    max_direction_drift,
                }
            }
        };
        // Signed sines from the 2D cross product with the normal.
        let sin_in = incoming.0 * hit.normal.1 - incoming.1 * hit.normal.0;
        let sin_out = outgoing.0 * hit.normal.1 - outgoing.1 * hit.normal.0;
        let residual = (s.index_before * sin_in - s.index_after * sin_out).abs();
        max_snell_residual = max_snell_residual.max(residual);

        // A grazing refraction on a steep cap can turn the ray backward;
        // it then cannot reach anything further down the stack.
        if outgoing.0 <= 0.0 && i + 1 < surfaces.len() {
            return RawTrace {
                status: TraceStatus::MissedSurface { surface: i + 1 },
                final_ray: None,
                max_snell_residual,
                max_direction_drift,
            };
        }

        ray = MeridionalRay {
            z: hit.point.0,
            y: hit.point.1,
            dz: outgoing.0,
            dy: outgoing.1,
        };
        max_direction_drift = max_direction_drift.max(ray.direction_drift());
    }
    RawTrace {
        status: TraceStatus::Ok,
        final_ray: Some(ray),
        max_snell_residual,
        max_direction_drift,
    }
}

fn entrance_ray(rx: &Prescription, height: f64) -> MeridionalRay {
    // Start well in front of the whole first surface cap.
    let first = &rx.surfaces[0];
    let extent = if first.curvature == 0.0 {
        0.0
    } else {
        2.0 / first.curvature.abs()
    };
    match rx.object_distance {
        ObjectDistance::Infinite => MeridionalRay {
            z: -(1.0 + extent),
            y: height,
            dz: 1.0,
            dy: 0.0,
        },
        ObjectDistance::Finite(a) => {
            // Aim from the axial object point at `height` on the vertex plane.
            let norm = a.hypot(height);
            MeridionalRay {
                z: -a,
                y: 0.0,
                dz: a / norm,
                dy: height / norm,
            }
        }
    }
}

/// Traces one meridional ray through the prescription and reports the axis
/// crossing behind the last vertex.
///
/// A height of exactly zero traces the axial ray, whose crossing is the
/// paraxial image distance — the exact limit of nearby rays.
pub fn trace_ray(
    rx: &Prescription,
    height: f64,
    line: SpectralLine,
    law: &DispersionLaw,
) -> Result<TraceOutcome, TraceError> {
    rx.validate()?;
    let first_aperture = rx.surfaces[0].semi_aperture;
    if height.abs() > first_aperture {
        return Err(TraceError::HeightBeyondFirstAperture {
            height,
            semi_aperture: first_aperture,
        });
    }
    let surfaces = rx.resolve(line, law)?;
    let raw = trace_through(entrance_ray(rx, height), &surfaces);

    let back_focal_distance = match (&raw.status, raw.final_ray) {
        (TraceStatus::Ok, Some(ray)) => {
            if height == 0.0 {
                // The axial ray is the paraxial limit.
                rx.paraxial_bfd(line, law)?
            } else if ray.dy == 0.0 {
                None
            } else {
                let t = -ray.y / ray.dy;
                let last_vertex = surfaces.last().expect("validated non-empty").vertex_z;
                Some(ray.z + t * ray.dz - last_vertex)
            }
        }
        _ => None,
    };

    Ok(TraceOutcome {
        status: raw.status,
        back_focal_distance,
        max_snell_residual: raw.max_snell_residual,
        max_direction_drift: raw.max_direction_drift,
    })
}

/// One traced row of an aberration scan.
#[derive(Clone, Copy, Debug)]
pub struct ScanRow {
    pub height: f64,
    pub line: SpectralLine,
    pub outcome: TraceOutcome,
    /// Longitudinal spherical aberration `BFD(h) - BFD(0)` for the row's
    /// line, when both ends exist.
    pub longitudinal_shift: Option<f64>,
}

/// Longitudinal chromatic aberration at one height,
/// `BFD_red(h) - BFD_mean(h)`.
#[derive(Clone, Copy, Debug)]
pub struct ChromaticRow {
    pub height: f64,
    pub shift: Option<f64>,
}

/// Tabulated exact-trace defects of a prescription.
#[derive(Clone, Debug)]
pub struct AberrationReport {
    pub lines: Vec<SpectralLine>,
    pub heights: Vec<f64>,
    /// Paraxial (height-zero) image distance per line, `None` when afocal.
    pub axial: Vec<(SpectralLine, Option<f64>)>,
    pub rows: Vec<ScanRow>,
    /// Red-minus-mean rows per height, led by the height-zero row; empty
    /// unless the scan covers both lines.
    pub chromatic: Vec<ChromaticRow>,
}

/// Non-mean lines whose ratios the law would have to derive: those not
/// covered by explicit measured values on every medium the prescription
/// refracts into.
pub fn law_derived_lines(rx: &Prescription, lines: &[SpectralLine]) -> Vec<SpectralLine> {
    lines
        .iter()
        .copied()
        .filter(|line| *line != SpectralLine::Mean)
        .filter(|line| {
            rx.surfaces.iter().any(|s| {
                s.medium_after != AMBIENT
                    && rx
                        .media
                        .get(&s.medium_after)
                        .is_some_and(|m| !m.explicit_lines.contains_key(line))
            })
        })
        .collect()
}

/// Traces the full (height, line) grid and assembles the defect table.
/// Failed rays keep their status in the table rather than aborting the
/// scan; an empty height list reports the axial summary alone.
///
/// A single law instance anchors a single non-mean line, so at most one
/// requested line may lean on it; further lines need explicit per-medium
/// ratios.
pub fn aberration_scan(
    rx: &Prescription,
    heights: &[f64],
    lines: &[SpectralLine],
    law: &DispersionLaw,
) -> Result<AberrationReport, TraceError> {
    rx.validate()?;
    if lines.is_empty() {
        return Err(TraceError::NoLines);
    }
    if law_derived_lines(rx, lines).len() > 1 {
        return Err(TraceError::AmbiguousScanLines);
    }
    let ascending = heights.windows(2).all(|w| w[0] < w[1]);
    if !ascending || heights.iter().any(|h| !(*h > 0.0)) {
        return Err(TraceError::BadHeights);
    }

    let mut axial = Vec::with_capacity(lines.len());
    for &line in lines {
        axial.push((line, rx.paraxial_bfd(line, law)?));
    }
    let axial_of = |line: SpectralLine| -> Option<f64> {
        axial
            .iter()
            .find(|(l, _)| *l == line)
            .and_then(|(_, bfd)| *bfd)
    };

    let mut rows = Vec::with_capacity(heights.len() * lines.len());
    for &height in heights {
        for &line in lines {
            let outcome = match trace_ray(rx, height, line, law) {
                Ok(outcome) => outcome,
                // Heights beyond the entrance aperture are rows, not
                // errors: the ray is clipped before the first surface.
                Err(TraceError::HeightBeyondFirstAperture { .. }) => TraceOutcome {
                    status: TraceStatus::ApertureClipped { surface: 0 },
                    back_focal_distance: None,
                    max_snell_residual: 0.0,
                    max_direction_drift: 0.0,
                },
                Err(e) => return Err(e),
            };
            let longitudinal_shift = match (outcome.back_focal_distance, axial_of(line)) {
                (Some(bfd), Some(bfd0)) => Some(bfd - bfd0),
                _ => None,
            };
            rows.push(ScanRow {
                height,
                line,
                outcome,
                longitudinal_shift,
            });
        }
    }

    let mut chromatic = Vec::new();
    if lines.contains(&SpectralLine::Mean) && lines.contains(&SpectralLine::Red) {
        let shift0 = match (axial_of(SpectralLine::Red), axial_of(SpectralLine::Mean)) {
            (Some(r), Some(m)) => Some(r - m),
            _ => None,
        };
        chromatic.push(ChromaticRow {
            height: 0.0,
            shift: shift0,
        });
        for &height in heights {
            let find = |line: SpectralLine| {
                rows.iter()
                    .find(|r| r.height == height && r.line == line)
                    .and_then(|r| r.outcome.back_focal_distance)
            };
            let shift = match (find(SpectralLine::Red), find(SpectralLine::Mean)) {
                (Some(r), Some(m)) => Some(r - m),
                _ => None,
            };
            chromatic.push(ChromaticRow { height, shift });
        }
    }

    Ok(AberrationReport {
        lines: lines.to_vec(),
        heights: heights.to_vec(),
        axial,
        rows,
        chromatic,
    })
}

/// Observed order of convergence of the exact trace toward the paraxial
/// image distance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConvergenceOrder {
    /// Two-point Richardson estimate `log2(e(h) / e(h/2))`; about 2 for
    /// generic spherical systems.
    Estimate(f64),
    /// Both probe deviations sat below the measurement floor.
    ExactAtTestHeights,
}

impl ConvergenceOrder {
    pub fn estimate(&self) -> Option<f64> {
        match self {
            ConvergenceOrder::Estimate(p) => Some(*p),
            ConvergenceOrder::ExactAtTestHeights => None,
        }
    }
}

/// Richardson check of the tracer against the paraxial recursion: probes
/// `|BFD(h) - BFD_paraxial|` at a height and its half and returns the
/// observed order.
pub fn paraxial_limit_check(
    rx: &Prescription,
    line: SpectralLine,
    law: &DispersionLaw,
) -> Result<ConvergenceOrder, TraceError> {
    rx.validate()?;
    let stack = rx.paraxial_stack(line, law)?;
    let reference = paraxial::paraxial_trace(&stack, rx.object_distance)?;

    // Probe inside every cap: the tightest of apertures and sphere radii.
    let mut cap = f64::INFINITY;
    for s in &rx.surfaces {
        cap = cap.min(s.semi_aperture);
        if s.curvature != 0.0 {
            cap = cap.min(1.0 / s.curvature.abs());
        }
    }
    let probe = 0.01 * cap;

    let deviation = |h: f64| -> Result<f64, TraceError> {
        let outcome = trace_ray(rx, h, line, law)?;
        match outcome.back_focal_distance {
            Some(bfd) if outcome.status.is_ok() => Ok((bfd - reference).abs()),
            _ => Err(TraceError::RayFailure {
                status: outcome.status,
            }),
        }
    };
    let e1 = deviation(probe)?;
    let e2 = deviation(probe / 2.0)?;
    if e1 < EXACT_DEVIATION_FLOOR && e2 < EXACT_DEVIATION_FLOOR {
        return Ok(ConvergenceOrder::ExactAtTestHeights);
    }
    Ok(ConvergenceOrder::Estimate((e1 / e2).log2()))
}

/// Report heights spanning paraxial validation through an ordinary
/// opening, scaled by the focal length `1/|power|`.
pub fn default_report_heights(power: f64) -> Vec<f64> {
    let f = 1.0 / power.abs();
    [1e-4, 0.01, 0.02, 0.05].iter().map(|h| h * f).collect()
}
