use euler2c::contact::{radial_derivative, PolarPoint};
use euler2c::index::{cz, cz_interior, linearized_path, robbin_salamon_numeric, cover_time, CollisionOrbit};
use euler2c::periods::{period_closed_form, period_oracle, Axis};
use euler2c::problem::{classify, region_g_interval, Component, EnergyMomentum, ProblemParams, Region, RegionTag, DELTA_CURVE};
use euler2c::ExtReal;
use proptest::prelude::*;

fn mu_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.1), Just(0.25), Just(0.5), 0.01f64..0.5]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn regions_match_their_g_intervals(mu in mu_strategy(), c in -8.0f64..-0.01, g in -12.0f64..12.0) {
        let p = ProblemParams::new(mu).unwrap();
        let em = EnergyMomentum::new(p, g, c).unwrap();
        if let RegionTag::Regular(region) = classify(&em, DELTA_CURVE) {
            let iv = region_g_interval(&p, region, c).unwrap();
            prop_assert!(iv.contains(g), "{region:?} {iv:?} g={g}");
        }
        for region in Region::ALL {
            if let Some(iv) = region_g_interval(&p, region, c) {
                let gm = iv.midpoint();
                let em = EnergyMomentum::new(p, gm, c).unwrap();
                prop_assert_eq!(classify(&em, DELTA_CURVE), RegionTag::Regular(region));
            }
        }
    }

    #[test]
    fn closed_form_periods_match_quadrature(mu in mu_strategy(), c in -5.0f64..-0.05, u in 0.05f64..0.95, which in 0usize..4) {
        let p = ProblemParams::new(mu).unwrap();
        let region = Region::ALL[which];
        let Some(iv) = region_g_interval(&p, region, c) else { return Ok(()) };
        let em = EnergyMomentum::new(p, iv.lo + u * iv.len(), c).unwrap();
        prop_assume!(classify(&em, DELTA_CURVE) == RegionTag::Regular(region));
        let cf = period_closed_form(&em, Component::Whole).unwrap();
        let qx = period_oracle(&em, Axis::Xi, Component::Whole).unwrap();
        let qe = period_oracle(&em, Axis::Eta, Component::Whole).unwrap();
        prop_assert!((cf.tau_xi.to_f64() - qx).abs() < 1e-8 * qx);
        prop_assert!((cf.tau_eta.to_f64() - qe).abs() < 1e-8 * qe);
    }

    #[test]
    fn symmetric_components_have_equal_periods(c in -5.0f64..-2.01, u in 0.05f64..0.95) {
        let p = ProblemParams::new(0.5).unwrap();
        let iv = region_g_interval(&p, Region::S, c).unwrap();
        let em = EnergyMomentum::new(p, iv.lo + u * iv.len(), c).unwrap();
        let e = period_closed_form(&em, Component::Earth).unwrap();
        let m = period_closed_form(&em, Component::Moon).unwrap();
        prop_assert_eq!(e, m);
    }

    #[test]
    fn indices_are_odd_and_grow_with_cover(mu in mu_strategy(), d in 0.01f64..20.0, half in 1u32..10) {
        let p = ProblemParams::new(mu).unwrap();
        let c = p.c_jacobi - d;
        for orbit in CollisionOrbit::ALL {
            let (Some(a), Some(b)) = (
                cz(&p, c, 2 * half, orbit).unwrap().index(),
                cz(&p, c, 2 * half + 2, orbit).unwrap().index(),
            ) else { continue };
            prop_assert_eq!(a.rem_euclid(2), 1);
            prop_assert!(b > a);
        }
        if let Some(i) = cz_interior(&p, c, 2).unwrap().index() {
            prop_assert!(i >= 5);
        }
    }

    #[test]
    fn numeric_index_matches_formula(mu in mu_strategy(), d in 0.01f64..4.0, half in 1u32..5, which in 0usize..3) {
        let p = ProblemParams::new(mu).unwrap();
        let c = p.c_jacobi - d;
        let orbit = CollisionOrbit::ALL[which];
        let x = euler2c::index::crossing_ratio(&p, c, 2 * half, orbit).unwrap();
        prop_assume!((x - x.round()).abs() > 1e-4);
        let path = linearized_path(&p, c, orbit).unwrap();
        let t = cover_time(&p, c, 2 * half, orbit).unwrap();
        let rep = robbin_salamon_numeric(&path, t, path.period_hint / 40.0).unwrap();
        let formula = cz(&p, c, 2 * half, orbit).unwrap().index().unwrap();
        prop_assert_eq!(rep.index_twice, 2 * formula);
    }

    #[test]
    fn radial_derivative_minimised_at_zero(mu in mu_strategy(), r in 0.01f64..0.99, theta in 0.0f64..std::f64::consts::PI) {
        let p = ProblemParams::new(mu).unwrap();
        let at_zero = radial_derivative(&p, &PolarPoint { r, theta: 0.0 }).unwrap();
        let at = radial_derivative(&p, &PolarPoint { r, theta }).unwrap();
        prop_assert!(at_zero <= at);
    }

    #[test]
    fn ext_real_ratio(a in 1e-3f64..1e3, b in 1e-3f64..1e3) {
        prop_assert_eq!(ExtReal::ratio(ExtReal::Finite(a), ExtReal::Finite(b)), Some(ExtReal::Finite(a / b)));
        prop_assert_eq!(ExtReal::ratio(ExtReal::Infinity, ExtReal::Finite(b)), Some(ExtReal::Infinity));
        prop_assert_eq!(ExtReal::ratio(ExtReal::Finite(a), ExtReal::Infinity), Some(ExtReal::Zero));
        prop_assert_eq!(ExtReal::ratio(ExtReal::Infinity, ExtReal::Infinity), None);
    }
}
