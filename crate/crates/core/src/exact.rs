//! Exact rational evaluation of the algebraic half of the toolkit.
//!
//! The linear dispersion proportion, the aggregate curvature combinations,
//! the system power and the focal denominator are all rational functions of
//! rational inputs, so their identities can be checked with no rounding at
//! all. Everything involving logarithms or exponentials (the power law, the
//! ray tracer) stays on the 64-bit float path in the sibling modules; this
//! module is the other route of that dual-arithmetic split.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::media::MediaError;

pub fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Bundled constants on the rational path: glass (31/20, 77/50), water 4/3.
pub mod constants {
    use super::*;

    pub fn glass_mean() -> BigRational {
        rational(31, 20)
    }

    pub fn glass_red() -> BigRational {
        rational(77, 50)
    }

    pub fn water_mean() -> BigRational {
        rational(4, 3)
    }

    /// Linear-law water red ratio derived from the constants above.
    pub fn water_red_linear() -> BigRational {
        rational(73, 55)
    }
}

/// Linear proportion on rationals: `N = n - (n - 1)(m - M)/(m - 1)`.
pub fn derive_line_ratio_linear(
    target_mean: &BigRational,
    reference_mean: &BigRational,
    reference_line: &BigRational,
) -> Result<BigRational, MediaError> {
    if reference_mean.is_one() {
        return Err(MediaError::DegenerateReference);
    }
    let one = BigRational::one();
    let gap = (target_mean - &one) * (reference_mean - reference_line) / (reference_mean - &one);
    Ok(target_mean - gap)
}

/// The two aggregate curvature combinations `x = c_g - c_h` and
/// `y = c_f - c_g + c_h - c_k`.
pub fn aggregates(
    c_f: &BigRational,
    c_g: &BigRational,
    c_h: &BigRational,
    c_k: &BigRational,
) -> (BigRational, BigRational) {
    let x = c_g - c_h;
    let y = c_f - c_g + c_h - c_k;
    (x, y)
}

/// System power `P = (n_line - 1) x + (m_line - 1) y`.
pub fn system_power(
    x: &BigRational,
    y: &BigRational,
    water_line: &BigRational,
    glass_line: &BigRational,
) -> BigRational {
    let one = BigRational::one();
    (water_line - &one) * x + (glass_line - &one) * y
}

/// Focal distance `1 / (P - 1/a)`; `None` marks an afocal or
/// conjugate-at-infinity configuration (zero denominator).
pub fn focal_distance(
    power: &BigRational,
    object_distance: Option<&BigRational>,
) -> Option<BigRational> {
    let denom = match object_distance {
        Some(a) => power - a.recip(),
        None => power.clone(),
    };
    if denom.is_zero() {
        None
    } else {
        Some(denom.recip())
    }
}

/// Achromatic residual `(n - N) x + (m - M) y`; zero exactly when the mean
/// and anchored-line powers coincide.
pub fn achromatic_residual(
    x: &BigRational,
    y: &BigRational,
    water_mean: &BigRational,
    water_line: &BigRational,
    glass_mean: &BigRational,
    glass_line: &BigRational,
) -> BigRational {
    (water_mean - water_line) * x + (glass_mean - glass_line) * y
}

/// Completes an achromatic objective from free choices `(y, c_f, c_g)` by
/// setting `x = -y (m - M)/(n - N)`, the exact achromatic condition.
pub fn complete_achromatic_objective(
    y: &BigRational,
    c_f: &BigRational,
    c_g: &BigRational,
    glass_mean: &BigRational,
    glass_line: &BigRational,
    water_mean: &BigRational,
    water_line: &BigRational,
) -> Result<[BigRational; 4], MediaError> {
    let dispersion_water = water_mean - water_line;
    if dispersion_water.is_zero() {
        return Err(MediaError::DegenerateReference);
    }
    let x = -(y * (glass_mean - glass_line) / dispersion_water);
    let c_h = c_g - &x;
    let c_k = c_f - &x - y;
    Ok([c_f.clone(), c_g.clone(), c_h, c_k])
}

/// Report of the exact-mode degeneracy run: under the linear law every
/// achromatic objective has identically zero mean power.
#[derive(Clone, Debug)]
pub struct ExactDegeneracyReport {
    pub samples: u32,
    pub seed: u64,
    pub max_abs_power: BigRational,
}

impl ExactDegeneracyReport {
    pub fn identically_zero(&self) -> bool {
        self.max_abs_power.is_zero()
    }
}

/// Draws `samples` random rational `(y, c_f, c_g)` triples, completes each
/// objective achromatically under the linear law with the bundled
/// constants, and returns the largest mean-power magnitude observed.
pub fn degeneracy_check(samples: u32, seed: u64) -> ExactDegeneracyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = constants::glass_mean();
    let big_m = constants::glass_red();
    let n = constants::water_mean();
    let big_n = derive_line_ratio_linear(&n, &m, &big_m).expect("bundled glass pair is valid");

    let draw = |rng: &mut ChaCha8Rng| -> BigRational {
        let numer: i64 = rng.random_range(-999..=999);
        let denom: i64 = rng.random_range(1..=999);
        rational(numer, denom)
    };

    let mut max_abs_power = BigRational::zero();
    for _ in 0..samples {
        let y = draw(&mut rng);
        let c_f = draw(&mut rng);
        let c_g = draw(&mut rng);
        let [c_f, c_g, c_h, c_k] =
            complete_achromatic_objective(&y, &c_f, &c_g, &m, &big_m, &n, &big_n)
                .expect("bundled constants disperse");
        let (x, y) = aggregates(&c_f, &c_g, &c_h, &c_k);
        let power = system_power(&x, &y, &n, &m);
        if power.abs() > max_abs_power {
            max_abs_power = power.abs();
        }
    }
    ExactDegeneracyReport {
        samples,
        seed,
        max_abs_power,
    }
}
