//! The achromatic condition on the four curvatures, the degeneracy theorem
//! it forces under the linear law, and the solver that produces
//! nonzero-power achromats under the power law.
//!
//! The condition equates mean and anchored-line powers:
//! `(n - N) x + (m - M) y = 0`. Under the linear proportion
//! `(n - N)/(m - M) = (n - 1)/(m - 1)` holds identically, so the condition
//! forces `(n - 1) x + (m - 1) y = 0` as well — achromatism and zero power
//! are the same constraint, and no focusing achromat exists. Under the
//! power law the two constraints are independent and the solver inverts
//! them.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::media::{self, DispersionLaw, MediaError, OpticalMedium, SpectralLine};
use crate::paraxial::CompoundObjective;

/// Relative threshold under which the dispersion determinant counts as
/// degenerate: below it the solver refuses to return astronomically curved
/// layouts and reports the law itself as the obstruction.
pub const DEGENERACY_EPS: f64 = 1e-9;

/// Per-sample bound for the degeneracy check, relative to
/// `max(1, |x| + |y|)`.
pub const DEGENERACY_POWER_BOUND: f64 = 1e-12;

/// Post-hoc verification bound on the residual and power of a solution.
pub const SOLUTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AchromatError {
    #[error(transparent)]
    Media(#[from] MediaError),
    /// The computational form of the degeneracy theorem: the dispersion
    /// determinant vanished, so no nonzero-power achromat exists under
    /// this law.
    #[error(
        "degenerate law (determinant {determinant:e}): the achromatic condition forces zero \
         total power, so no focusing achromat exists under this dispersion law"
    )]
    DegenerateLaw { determinant: f64 },
    /// A sample of the degeneracy check exceeded its power bound; carries
    /// the counterexample.
    #[error(
        "degeneracy violation: sample (y={y}, c_f={c_f}, c_g={c_g}) reached |power| {power:e} \
         above bound {bound:e}"
    )]
    DegeneracyViolation {
        y: f64,
        c_f: f64,
        c_g: f64,
        power: f64,
        bound: f64,
    },
    /// Severity ratio of a zero-power target is undefined.
    #[error("not applicable: zero target power has no severity ratio")]
    NotApplicable,
    /// The completed objective failed its post-hoc residual/power check
    /// (typically an extreme free-parameter choice destroying precision).
    #[error("solution verification failed: residual {residual:e}, power error {power_error:e}")]
    SolutionVerification { residual: f64, power_error: f64 },
}

/// What the solver is asked for.
#[derive(Clone, Debug)]
pub struct AchromatTarget {
    /// Requested mean-line system power, 1/length.
    pub target_power: f64,
    pub law: DispersionLaw,
    pub glass: OpticalMedium,
    pub water: OpticalMedium,
    /// Front-face curvature, a free parameter of the two-parameter family.
    pub free_c_f: f64,
    /// Second interior free parameter; absent means the symmetric split
    /// `c_g = c_f + x/2`.
    pub free_c_g: Option<f64>,
}

impl AchromatTarget {
    pub fn with_bundled_media(target_power: f64, law: DispersionLaw) -> Self {
        AchromatTarget {
            target_power,
            law,
            glass: media::bundled::glass(),
            water: media::bundled::water(),
            free_c_f: 0.0,
            free_c_g: None,
        }
    }
}

/// A solved achromatic layout plus the numbers a report needs.
#[derive(Clone, Debug)]
pub struct AchromatSolution {
    pub objective: CompoundObjective,
    pub x: f64,
    pub y: f64,
    /// max(|c_g|, |c_h|); at least |x|/2 under the symmetric split.
    pub interior_curvature_max: f64,
    /// Achromatic residual re-evaluated on the completed curvatures.
    pub residual: f64,
    pub target_power: f64,
    /// |dx/dN|: how far the aggregate x moves per unit error in the derived
    /// water line ratio. Around 1.1e5 for the bundled constants, which is
    /// why derived ratios carry their own tolerance discipline.
    pub red_ratio_sensitivity: f64,
}

/// Achromatic residual `(n - N) x + (m - M) y` of an objective under a law,
/// with all line ratios taken for the law's anchored line (red for the
/// bundled data).
pub fn achromatic_residual(
    objective: &CompoundObjective,
    law: &DispersionLaw,
) -> Result<f64, MediaError> {
    let m = objective.glass.mean_ratio;
    let n = objective.water.mean_ratio;
    let big_m = media::line_ratio(&objective.glass, SpectralLine::Red, law)?;
    let big_n = media::line_ratio(&objective.water, SpectralLine::Red, law)?;
    let (x, y) = objective.aggregates();
    Ok((n - big_n) * x + (m - big_m) * y)
}

/// Parameters of a degeneracy run.
#[derive(Clone, Debug)]
pub struct DegeneracyCheck {
    pub law: DispersionLaw,
    pub glass: OpticalMedium,
    pub water: OpticalMedium,
    pub samples: u32,
    pub seed: u64,
}

impl DegeneracyCheck {
    pub fn with_bundled_media(law: DispersionLaw, samples: u32, seed: u64) -> Self {
        DegeneracyCheck {
            law,
            glass: media::bundled::glass(),
            water: media::bundled::water(),
            samples,
            seed,
        }
    }
}

/// Outcome of a passing degeneracy run.
#[derive(Clone, Copy, Debug)]
pub struct DegeneracyReport {
    pub samples: u32,
    pub seed: u64,
    /// Largest |mean power| over all achromatically completed samples.
    pub max_abs_power: f64,
    /// Largest |mean power| / max(1, |x| + |y|); the pass bound is
    /// [`DEGENERACY_POWER_BOUND`].
    pub max_scaled_power: f64,
}

/// Draws random `(y, c_f, c_g)` triples, completes each objective so the
/// achromatic condition holds exactly, and checks that the mean power
/// vanishes to rounding. Passing demonstrates the degeneracy theorem for
/// the given law; a violation (the expected outcome under the power law)
/// returns the counterexample.
pub fn dollond_degeneracy_check(
    check: &DegeneracyCheck,
) -> Result<DegeneracyReport, AchromatError> {
    let m = check.glass.mean_ratio;
    let n = check.water.mean_ratio;
    let big_m = media::line_ratio(&check.glass, SpectralLine::Red, &check.law)?;
    let big_n = media::line_ratio(&check.water, SpectralLine::Red, &check.law)?;
    if n == big_n {
        return Err(MediaError::DegenerateReference.into());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(check.seed);
    let mut max_abs_power = 0.0_f64;
    let mut max_scaled_power = 0.0_f64;
    for _ in 0..check.samples {
        let y: f64 = rng.random_range(-10.0..10.0);
        let c_f: f64 = rng.random_range(-50.0..50.0);
        let c_g: f64 = rng.random_range(-50.0..50.0);
        let x = -y * (m - big_m) / (n - big_n);
        let c_h = c_g - x;
        let c_k = c_f - x - y;
        let objective = CompoundObjective {
            c_f,
            c_g,
            c_h,
            c_k,
            glass: check.glass.clone(),
            water: check.water.clone(),
        };
        let power = objective.system_power(SpectralLine::Mean, &check.law)?;
        let scale = 1.0_f64.max(x.abs() + y.abs());
        let bound = DEGENERACY_POWER_BOUND * scale;
        if power.abs() > bound {
            return Err(AchromatError::DegeneracyViolation {
                y,
                c_f,
                c_g,
                power,
                bound,
            });
        }
        max_abs_power = max_abs_power.max(power.abs());
        max_scaled_power = max_scaled_power.max(power.abs() / scale);
    }
    Ok(DegeneracyReport {
        samples: check.samples,
        seed: check.seed,
        max_abs_power,
        max_scaled_power,
    })
}

/// Solves the achromatic condition and the power constraint for the
/// aggregates, then completes the curvatures from the free parameters:
/// `y = P (n - N)/D`, `x = -P (m - M)/D` with
/// `D = (m - 1)(n - N) - (n - 1)(m - M)`.
pub fn solve_achromat(target: &AchromatTarget) -> Result<AchromatSolution, AchromatError> {
    let m = target.glass.mean_ratio;
    let n = target.water.mean_ratio;
    let big_m = media::line_ratio(&target.glass, SpectralLine::Red, &target.law)?;
    let big_n = media::line_ratio(&target.water, SpectralLine::Red, &target.law)?;

    let (x, y, sensitivity) = if target.target_power == 0.0 {
        // Any law admits the trivial family; the all-equal-curvature
        // objective is its symmetric representative.
        (0.0, 0.0, 0.0)
    } else {
        let determinant = (m - 1.0) * (n - big_n) - (n - 1.0) * (m - big_m);
        let scale = ((m - 1.0) * (n - big_n)).abs();
        if determinant.abs() <= DEGENERACY_EPS * scale {
            return Err(AchromatError::DegenerateLaw { determinant });
        }
        let y = target.target_power * (n - big_n) / determinant;
        let x = -target.target_power * (m - big_m) / determinant;
        (x, y, (x * (m - 1.0) / determinant).abs())
    };

    let c_f = target.free_c_f;
    let c_g = target.free_c_g.unwrap_or(c_f + x / 2.0);
    let c_h = c_g - x;
    let c_k = c_f - x - y;
    let objective = CompoundObjective {
        c_f,
        c_g,
        c_h,
        c_k,
        glass: target.glass.clone(),
        water: target.water.clone(),
    };

    // Re-verify on the completed curvatures, not the aggregate solve.
    let residual = achromatic_residual(&objective, &target.law)?;
    let power = objective.system_power(SpectralLine::Mean, &target.law)?;
    let power_error = power - target.target_power;
    let tol = SOLUTION_TOLERANCE * 1.0_f64.max(target.target_power.abs());
    if residual.abs() > tol || power_error.abs() > tol {
        return Err(AchromatError::SolutionVerification {
            residual,
            power_error,
        });
    }

    Ok(AchromatSolution {
        interior_curvature_max: c_g.abs().max(c_h.abs()),
        objective,
        x,
        y,
        residual,
        target_power: target.target_power,
        red_ratio_sensitivity: sensitivity,
    })
}

/// Dimensionless severity of the interior curvatures:
/// `max(|c_g|, |c_h|) / |target power|`. The reference power-law solution
/// scores about 22.3 — interior radii of 45 mm on a one-meter focal
/// length, the aperture bottleneck the tracer quantifies.
pub fn interior_curvature_report(solution: &AchromatSolution) -> Result<f64, AchromatError> {
    if solution.target_power == 0.0 {
        return Err(AchromatError::NotApplicable);
    }
    Ok(solution.interior_curvature_max / solution.target_power.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::bundled;
    use crate::paraxial::CompoundObjective;

    #[test]
    fn residual_zero_on_zero_aggregates() {
        let obj = CompoundObjective {
            c_f: 2.0,
            c_g: 2.0,
            c_h: 2.0,
            c_k: 2.0,
            glass: bundled::glass(),
            water: bundled::water(),
        };
        assert_eq!(
            achromatic_residual(&obj, &bundled::linear_law()).unwrap(),
            0.0
        );
        assert_eq!(
            achromatic_residual(&obj, &bundled::power_law()).unwrap(),
            0.0
        );
    }

    #[test]
    fn residual_hand_case_linear() {
        // x = 1.65, y = -1: (1/165)(1.65) + 0.01(-1) = 0.
        let obj = CompoundObjective {
            c_f: 0.0,
            c_g: 1.65,
            c_h: 0.0,
            c_k: 1.0 - 1.65,
            glass: bundled::glass(),
            water: bundled::water(),
        };
        let (x, y) = obj.aggregates();
        assert!((x - 1.65).abs() < 1e-15 && (y + 1.0).abs() < 1e-15);
        let r = achromatic_residual(&obj, &bundled::linear_law()).unwrap();
        assert!(r.abs() < 1e-16, "r = {r}");
    }

    #[test]
    fn residual_unit_x_power_law() {
        // x = 1, y = 0 leaves exactly the water dispersion n - N.
        // Oracle: 0.00565295441635952604...
        let obj = CompoundObjective {
            c_f: 0.0,
            c_g: 1.0,
            c_h: 0.0,
            c_k: -1.0,
            glass: bundled::glass(),
            water: bundled::water(),
        };
        let r = achromatic_residual(&obj, &bundled::power_law()).unwrap();
        assert!((r - 0.0056526).abs() < 1e-6, "r = {r}");
        assert!((r - 0.005652954416359526).abs() < 1e-15);
    }

    #[test]
    fn degeneracy_holds_under_linear_law() {
        let check = DegeneracyCheck::with_bundled_media(bundled::linear_law(), 1000, 1752);
        let report = dollond_degeneracy_check(&check).unwrap();
        assert!(report.max_scaled_power <= DEGENERACY_POWER_BOUND);
    }

    #[test]
    fn zero_y_sample_completes_to_exactly_zero_power() {
        // With y = 0 the achromatic completion gives x = 0 and the mean
        // power vanishes exactly, not just to rounding.
        let law = bundled::linear_law();
        let glass = bundled::glass();
        let water = bundled::water();
        let big_m = crate::media::line_ratio(&glass, SpectralLine::Red, &law).unwrap();
        let big_n = crate::media::line_ratio(&water, SpectralLine::Red, &law).unwrap();
        let (c_f, c_g) = (7.25, -3.5);
        let x = -0.0 * (glass.mean_ratio - big_m) / (water.mean_ratio - big_n);
        let obj = CompoundObjective {
            c_f,
            c_g,
            c_h: c_g - x,
            c_k: c_f - x - 0.0,
            glass,
            water,
        };
        assert_eq!(obj.aggregates(), (0.0, 0.0));
        assert_eq!(obj.system_power(SpectralLine::Mean, &law).unwrap(), 0.0);
    }

    #[test]
    fn degeneracy_fails_under_power_law() {
        let check = DegeneracyCheck::with_bundled_media(bundled::power_law(), 100, 1752);
        let err = dollond_degeneracy_check(&check).unwrap_err();
        assert!(matches!(err, AchromatError::DegeneracyViolation { .. }));
    }

    #[test]
    fn solve_reference_achromat() {
        // Oracle (60-digit): x = 44.6013610847167466,
        // y = -25.2129461119495434, c_k = -19.3884149727672032,
        // severity 22.3006805423583733, sensitivity ~1.094e5.
        let target = AchromatTarget::with_bundled_media(1.0, bundled::power_law());
        let sol = solve_achromat(&target).unwrap();
        assert!((sol.x - 44.6).abs() <= 0.5, "x = {}", sol.x);
        assert!((sol.y + 25.2).abs() <= 0.5, "y = {}", sol.y);
        assert!((sol.x - 44.60136108471675).abs() < 1e-9);
        assert!((sol.y + 25.21294611194954).abs() < 1e-9);
        assert!((sol.objective.c_k + sol.x + sol.y).abs() < 1e-12);
        assert_eq!(sol.objective.c_f, 0.0);
        assert_eq!(sol.objective.c_g, sol.x / 2.0);
        assert!(sol.residual.abs() <= 1e-9);
        assert!((sol.red_ratio_sensitivity - 1.094e5).abs() < 1e3);

        let severity = interior_curvature_report(&sol).unwrap();
        assert!((severity - 22.3).abs() <= 0.3, "severity = {severity}");
    }

    #[test]
    fn solve_zero_power_any_law() {
        for law in [bundled::linear_law(), bundled::power_law()] {
            let target = AchromatTarget::with_bundled_media(0.0, law);
            let sol = solve_achromat(&target).unwrap();
            assert_eq!((sol.x, sol.y), (0.0, 0.0));
            let o = &sol.objective;
            assert_eq!((o.c_f, o.c_g, o.c_h, o.c_k), (0.0, 0.0, 0.0, 0.0));
            assert!(matches!(
                interior_curvature_report(&sol),
                Err(AchromatError::NotApplicable)
            ));
        }
    }

    #[test]
    fn solve_linear_law_is_degenerate() {
        let target = AchromatTarget::with_bundled_media(1.0, bundled::linear_law());
        let err = solve_achromat(&target).unwrap_err();
        assert!(matches!(err, AchromatError::DegenerateLaw { .. }));
    }

    #[test]
    fn zero_interior_solution_has_zero_severity() {
        // A solution needing no interior power (x = 0) scores severity 0.
        let sol = AchromatSolution {
            objective: CompoundObjective {
                c_f: 0.0,
                c_g: 0.0,
                c_h: 0.0,
                c_k: -20.0 / 11.0,
                glass: bundled::glass(),
                water: bundled::water(),
            },
            x: 0.0,
            y: 20.0 / 11.0,
            interior_curvature_max: 0.0,
            residual: 0.0,
            target_power: 1.0,
            red_ratio_sensitivity: 0.0,
        };
        assert_eq!(interior_curvature_report(&sol).unwrap(), 0.0);
    }

    #[test]
    fn free_parameters_do_not_move_the_aggregates() {
        let base = AchromatTarget::with_bundled_media(1.0, bundled::power_law());
        let reference = solve_achromat(&base).unwrap();
        for (cf, cg) in [(1.0, None), (-3.0, Some(5.0)), (0.25, Some(-40.0))] {
            let target = AchromatTarget {
                free_c_f: cf,
                free_c_g: cg,
                ..base.clone()
            };
            let sol = solve_achromat(&target).unwrap();
            assert_eq!(sol.x, reference.x);
            assert_eq!(sol.y, reference.y);
            assert!(sol.residual.abs() <= 1e-9);
        }
    }
}
