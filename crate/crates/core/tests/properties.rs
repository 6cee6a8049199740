//! Property tests for the algebraic identities the modules promise.

use std::collections::BTreeMap;

use proptest::prelude::*;

use lensduel::achromat::{
    achromatic_residual, dollond_degeneracy_check, solve_achromat, AchromatError, AchromatTarget,
    DegeneracyCheck,
};
use lensduel::cli_io::{
    emit_prescription, parse_prescription, LawBlock, MediumBlock, Number, ObjectBlock,
    PrescriptionDocument, SurfaceBlock, UnitDecl,
};
use lensduel::exact;
use lensduel::media::{
    bundled, chain_media, derive_line_ratio_linear, derive_line_ratio_power, ChainSpec,
    DispersionLaw, LawKind, OpticalMedium, RefractionPair, SpectralLine,
};
use lensduel::paraxial::CompoundObjective;
use lensduel::paraxial::ObjectDistance;
use lensduel::raytrace::{trace_ray, Prescription, SurfaceSpec};

fn pair(mean: f64, line: f64) -> RefractionPair {
    RefractionPair {
        mean_ratio: mean,
        line_ratio: line,
    }
}

/// Strategy for syntactically valid prescription documents: one exact
/// rational reference medium plus random decimal media, random surfaces
/// over the defined media, optional law and object blocks.
fn document_strategy() -> impl Strategy<Value = PrescriptionDocument> {
    let unit = prop_oneof![Just(UnitDecl::Meters), Just(UnitDecl::Millimeters)];
    let extra_media =
        proptest::collection::vec((1.02f64..1.98, proptest::option::of(0.1f64..0.9)), 0..3);
    let object = prop_oneof![
        Just(None),
        Just(Some(ObjectBlock { distance: None })),
        (0.1f64..100.0).prop_map(|d| Some(ObjectBlock {
            distance: Some(Number::from_f64(d))
        })),
    ];
    let surfaces = proptest::collection::vec(
        (
            proptest::option::of((0.01f64..10.0, proptest::bool::ANY)),
            0.0f64..0.1,
            proptest::bool::ANY,
            0u8..4,
            1e-3f64..1.0,
        ),
        1..5,
    );
    (unit, extra_media, object, surfaces, proptest::bool::ANY).prop_map(
        |(unit, extra, object, surfaces, with_law)| {
            let mut media = vec![MediumBlock {
                name: "ref0".to_string(),
                mean: Number::from_rational(31, 20),
                red: Some(Number::from_rational(77, 50)),
                violet: None,
            }];
            for (i, (mean, red_frac)) in extra.into_iter().enumerate() {
                media.push(MediumBlock {
                    name: format!("m{i}"),
                    mean: Number::from_f64(mean),
                    red: red_frac.map(|f| Number::from_f64(1.0 + f * (mean - 1.0))),
                    violet: None,
                });
            }
            let media_count = media.len();
            let surfaces = surfaces
                .into_iter()
                .map(
                    |(radius, thickness, zero_thickness, medium_pick, aperture)| {
                        let medium = if usize::from(medium_pick) >= media_count {
                            "air".to_string()
                        } else {
                            media[usize::from(medium_pick)].name.clone()
                        };
                        SurfaceBlock {
                            radius: radius.map(|(r, negative)| {
                                Number::from_f64(if negative { -r } else { r })
                            }),
                            thickness: Number::from_f64(if zero_thickness {
                                0.0
                            } else {
                                thickness
                            }),
                            medium,
                            aperture: Number::from_f64(aperture),
                        }
                    },
                )
                .collect();
            PrescriptionDocument {
                unit,
                media,
                law: with_law.then(|| LawBlock {
                    kind: LawKind::Power,
                    reference: "ref0".to_string(),
                }),
                object,
                surfaces,
            }
        },
    )
}

proptest! {
    /// A medium with the reference's mean ratio inherits its line ratio
    /// bit for bit (the subtraction chain is exact inside one binade).
    #[test]
    fn linear_fixed_point_is_exact(
        mean in 1.0001f64..2.0,
        frac in 0.01f64..0.99,
    ) {
        let line = 1.0 + frac * (mean - 1.0);
        let derived = derive_line_ratio_linear(mean, &pair(mean, line)).unwrap();
        prop_assert_eq!(derived, line);
    }

    /// Power-law exponent fixed points: a(reference mean) = 1 and
    /// a(1) = 0 exactly.
    #[test]
    fn power_fixed_points_are_exact(
        mean in 1.0001f64..2.0,
        frac in 0.01f64..0.99,
    ) {
        let line = 1.0 + frac * (mean - 1.0);
        let at_reference = derive_line_ratio_power(mean, &pair(mean, line)).unwrap();
        prop_assert_eq!(at_reference.exponent, 1.0);
        prop_assert_eq!(at_reference.line_ratio, line);
        let at_vacuum = derive_line_ratio_power(1.0, &pair(mean, line)).unwrap();
        prop_assert_eq!(at_vacuum.exponent, 0.0);
        prop_assert_eq!(at_vacuum.line_ratio, 1.0);
    }

    /// The two laws agree to first order: for a reference (1+w, (1+w)^α)
    /// and target 1+cw the derived ratios differ by O(w²), so halving w
    /// shrinks the gap close to 4x.
    #[test]
    fn laws_agree_to_first_order(
        alpha in 0.3f64..0.9,
        c in prop_oneof![0.3f64..0.8, 1.2f64..3.0],
        omega in 1e-3f64..1e-2,
    ) {
        let gap = |w: f64| {
            let reference = pair(1.0 + w, (1.0 + w).powf(alpha));
            let target = 1.0 + c * w;
            let linear = derive_line_ratio_linear(target, &reference).unwrap();
            let power = derive_line_ratio_power(target, &reference).unwrap().line_ratio;
            (linear - power).abs()
        };
        let shrink = gap(omega) / gap(omega / 2.0);
        prop_assert!((3.5..4.5).contains(&shrink), "shrink = {}", shrink);
    }

    /// Chains compose: j steps then steps-j steps equals steps steps.
    #[test]
    fn chain_composition(
        r in 1.0f64..2.0,
        v in 1.0f64..2.0,
        steps in 0u32..12,
        split in 0u32..12,
    ) {
        let j = split.min(steps);
        let full = chain_media(&ChainSpec { step_red: r, step_violet: v, steps });
        let head = chain_media(&ChainSpec { step_red: r, step_violet: v, steps: j });
        let tail = chain_media(&ChainSpec { step_red: r, step_violet: v, steps: steps - j });
        let composed = (head.0 * tail.0, head.1 * tail.1);
        prop_assert!((composed.0 - full.0).abs() <= 1e-13 * full.0.abs());
        prop_assert!((composed.1 - full.1).abs() <= 1e-13 * full.1.abs());
    }

    /// log(R) : log(r) = log(V) : log(v) for every chain. Steps stay a
    /// millesimal above 1: a composite ratio R that close to 1 is
    /// quantized to 2^-52 absolutely, which caps log(R)'s *relative*
    /// accuracy near 1e-13 regardless of how R was computed.
    #[test]
    fn chain_log_ratio_invariance(
        r in 1.001f64..2.0,
        v in 1.001f64..2.0,
        steps in 1u32..=6,
    ) {
        let (big_r, big_v) = chain_media(&ChainSpec { step_red: r, step_violet: v, steps });
        let lhs = big_r.ln() * v.ln();
        let rhs = big_v.ln() * r.ln();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs());
    }

    /// Less-refrangible anchors derive less-refracting ratios: with
    /// M < m, both laws give N < n for every target n > 1.
    #[test]
    fn derived_red_ratio_stays_below_mean(
        mean in 1.01f64..2.0,
        gap in 1e-3f64..0.4,
        target in 1.001f64..3.0,
    ) {
        let line = mean - gap * (mean - 1.0);
        let reference = pair(mean, line);
        let linear = derive_line_ratio_linear(target, &reference).unwrap();
        prop_assert!(linear < target);
        let power = derive_line_ratio_power(target, &reference).unwrap().line_ratio;
        prop_assert!(power < target);
    }

    /// Both algebraic routes to the system power agree:
    /// (n-1)x + (m-1)y versus n·x + m·y - (c_f - c_k).
    #[test]
    fn power_identity_two_routes(
        c_f in -50.0f64..50.0,
        c_g in -50.0f64..50.0,
        c_h in -50.0f64..50.0,
        c_k in -50.0f64..50.0,
        glass_mean in 1.01f64..2.0,
        water_mean in 1.01f64..2.0,
    ) {
        let obj = CompoundObjective::new(
            [c_f, c_g, c_h, c_k],
            OpticalMedium::new("g", glass_mean),
            OpticalMedium::new("w", water_mean),
        ).unwrap();
        let law = bundled::linear_law();
        let direct = obj.system_power(SpectralLine::Mean, &law).unwrap();
        let (x, y) = obj.aggregates();
        let alternate = water_mean * x + glass_mean * y - (c_f - c_k);
        let scale = 1.0f64.max(direct.abs())
            .max((water_mean * x).abs())
            .max((glass_mean * y).abs());
        prop_assert!((direct - alternate).abs() <= 1e-13 * scale);
    }

    /// When glass and water share an index for a line, the power for that
    /// line no longer depends on the interior curvatures.
    #[test]
    fn degenerate_media_collapse(
        c_f in -20.0f64..20.0,
        c_k in -20.0f64..20.0,
        interior_a in -50.0f64..50.0,
        interior_b in -50.0f64..50.0,
        shared in 1.1f64..1.9,
    ) {
        let medium = OpticalMedium::new("shared", shared);
        let law = bundled::linear_law();
        let p = |c_g: f64, c_h: f64| {
            CompoundObjective::new([c_f, c_g, c_h, c_k], medium.clone(), medium.clone())
                .unwrap()
                .system_power(SpectralLine::Mean, &law)
                .unwrap()
        };
        let first = p(interior_a, interior_b);
        let second = p(interior_b, -interior_a);
        let scale = 1.0f64.max(interior_a.abs() + interior_b.abs());
        prop_assert!((first - second).abs() <= 1e-13 * scale);
    }

    /// Doubling every curvature doubles the power bit for bit.
    #[test]
    fn power_linearity_under_doubling(
        c_f in -25.0f64..25.0,
        c_g in -25.0f64..25.0,
        c_h in -25.0f64..25.0,
        c_k in -25.0f64..25.0,
    ) {
        let law = bundled::power_law();
        let base = CompoundObjective::new(
            [c_f, c_g, c_h, c_k], bundled::glass(), bundled::water()).unwrap();
        let doubled = CompoundObjective::new(
            [2.0 * c_f, 2.0 * c_g, 2.0 * c_h, 2.0 * c_k],
            bundled::glass(),
            bundled::water(),
        ).unwrap();
        for line in [SpectralLine::Mean, SpectralLine::Red] {
            prop_assert_eq!(
                doubled.system_power(line, &law).unwrap(),
                2.0 * base.system_power(line, &law).unwrap()
            );
        }
    }

    /// Solver soundness: returned solutions satisfy the residual and
    /// power bounds for any target and free-parameter choice.
    #[test]
    fn solver_soundness(
        magnitude in 0.01f64..10.0,
        negative in proptest::bool::ANY,
        free_c_f in -20.0f64..20.0,
        free_c_g in proptest::option::of(-40.0f64..40.0),
    ) {
        let target_power = if negative { -magnitude } else { magnitude };
        let target = AchromatTarget {
            target_power,
            law: bundled::power_law(),
            glass: bundled::glass(),
            water: bundled::water(),
            free_c_f,
            free_c_g,
        };
        let sol = solve_achromat(&target).unwrap();
        prop_assert!(sol.residual.abs() <= 1e-9);
        let power = sol
            .objective
            .system_power(SpectralLine::Mean, &bundled::power_law())
            .unwrap();
        prop_assert!((power - target_power).abs() <= 1e-9 * 1.0f64.max(target_power.abs()));
        prop_assert!(sol.interior_curvature_max >= sol.x.abs() / 2.0 - 1e-12);
    }

    /// The dichotomy: for fixed media and law, either the unit-power solve
    /// succeeds or the degeneracy check passes — never both, never neither.
    #[test]
    fn degeneracy_dichotomy(
        glass_mean in 1.2f64..1.9,
        gap in 0.005f64..0.05,
        water_mean in 1.05f64..1.9,
        kind in prop_oneof![Just(LawKind::Linear), Just(LawKind::Power)],
        seed in 0u64..1000,
    ) {
        let glass_red = glass_mean - gap;
        let law = DispersionLaw::new(kind, pair(glass_mean, glass_red)).unwrap();
        let glass = OpticalMedium::new("glass", glass_mean);
        let water = OpticalMedium::new("water", water_mean);
        let target = AchromatTarget {
            target_power: 1.0,
            law,
            glass: glass.clone(),
            water: water.clone(),
            free_c_f: 0.0,
            free_c_g: None,
        };
        let solved = match solve_achromat(&target) {
            Ok(_) => true,
            Err(AchromatError::DegenerateLaw { .. }) => false,
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error: {e}"))),
        };
        let check = DegeneracyCheck { law, glass, water, samples: 64, seed };
        let degenerate = dollond_degeneracy_check(&check).is_ok();
        prop_assert!(solved != degenerate,
            "solve {} while degeneracy check {}", solved, degenerate);
        if kind == LawKind::Linear {
            prop_assert!(degenerate);
        }
    }

    /// Residual linearity in the aggregates, exact in rational arithmetic.
    #[test]
    fn exact_residual_linearity(
        xn in -999i64..999, xd in 1i64..999,
        yn in -999i64..999, yd in 1i64..999,
        sn in -99i64..99, sd in 1i64..99,
    ) {
        let x = exact::rational(xn, xd);
        let y = exact::rational(yn, yd);
        let s = exact::rational(sn, sd);
        let n = exact::constants::water_mean();
        let nn = exact::constants::water_red_linear();
        let m = exact::constants::glass_mean();
        let mm = exact::constants::glass_red();
        let base = exact::achromatic_residual(&x, &y, &n, &nn, &m, &mm);
        let scaled = exact::achromatic_residual(&(&x * &s), &(&y * &s), &n, &nn, &m, &mm);
        prop_assert_eq!(scaled, base * s);
    }

    /// Scale covariance of the solver in exact arithmetic: scaling the
    /// target scales the completed curvatures linearly. The exact path
    /// solves the same two constraints, so the float solver inherits the
    /// property up to rounding; here the rational route is checked exactly.
    #[test]
    fn exact_scale_covariance(
        yn in -999i64..999, yd in 1i64..999,
        sn in 1i64..99, sd in 1i64..99,
    ) {
        let m = exact::constants::glass_mean();
        let mm = exact::constants::glass_red();
        let n = exact::constants::water_mean();
        let nn = exact::constants::water_red_linear();
        let zero = exact::rational(0, 1);
        let y = exact::rational(yn, yd);
        let s = exact::rational(sn, sd);
        let base =
            exact::complete_achromatic_objective(&y, &zero, &zero, &m, &mm, &n, &nn).unwrap();
        let scaled =
            exact::complete_achromatic_objective(&(&y * &s), &zero, &zero, &m, &mm, &n, &nn)
                .unwrap();
        for (b, sc) in base.iter().zip(scaled.iter()) {
            prop_assert_eq!(sc.clone(), b * &s);
        }
    }

    /// Snell residual and normalization drift stay at machine precision on
    /// random single-surface traces.
    #[test]
    fn snell_residual_random_spheres(
        magnitude in 0.5f64..10.0,
        negative in proptest::bool::ANY,
        index in 1.1f64..1.9,
        height_frac in 0.05f64..0.85,
    ) {
        let curvature = if negative { -magnitude } else { magnitude };
        let mut media = BTreeMap::new();
        media.insert("m".to_string(), OpticalMedium::new("m", index));
        let aperture = 0.9 / magnitude;
        let rx = Prescription {
            surfaces: vec![SurfaceSpec {
                curvature,
                thickness_after: 0.0,
                medium_after: "m".to_string(),
                semi_aperture: aperture,
            }],
            object_distance: ObjectDistance::Infinite,
            media,
        };
        let outcome = trace_ray(
            &rx,
            height_frac * aperture,
            SpectralLine::Mean,
            &bundled::linear_law(),
        ).unwrap();
        if outcome.status.is_ok() {
            prop_assert!(outcome.max_snell_residual <= 1e-12);
            prop_assert!(outcome.max_direction_drift <= 1e-13);
        }
    }

    /// Emission normalizes and parsing is its inverse: the emitted text
    /// reparses to the same document, and re-emission is idempotent.
    #[test]
    fn prescription_roundtrip(doc in document_strategy()) {
        let emitted = emit_prescription(&doc);
        let reparsed = parse_prescription(&emitted)
            .map_err(|e| TestCaseError::fail(format!("emitted text failed to parse: {e}")))?;
        prop_assert_eq!(&reparsed, &doc);
        prop_assert_eq!(emit_prescription(&reparsed), emitted);
    }

    /// The free parameters shift the curvatures jointly without touching
    /// the aggregates or the verified residual.
    #[test]
    fn free_parameter_invariance(
        free_c_f in -30.0f64..30.0,
        free_c_g in proptest::option::of(-60.0f64..60.0),
    ) {
        let reference = solve_achromat(
            &AchromatTarget::with_bundled_media(1.0, bundled::power_law())).unwrap();
        let target = AchromatTarget {
            free_c_f,
            free_c_g,
            ..AchromatTarget::with_bundled_media(1.0, bundled::power_law())
        };
        let sol = solve_achromat(&target).unwrap();
        prop_assert_eq!(sol.x, reference.x);
        prop_assert_eq!(sol.y, reference.y);
        prop_assert!(sol.residual.abs() <= 1e-9);
        let residual = achromatic_residual(&sol.objective, &bundled::power_law()).unwrap();
        prop_assert!(residual.abs() <= 1e-9);
    }
}
