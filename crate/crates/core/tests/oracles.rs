//! Frozen reference values computed independently of this crate.

use euler2c::index::{cz, CollisionOrbit, IndexResult};
use euler2c::periods::CriticalKind;
use euler2c::problem::ProblemParams;
use euler2c::rotation::{c_zero_threshold, critical_rotation_finite, critical_rotation_inverse, exterior_earth_supremum};
use euler2c::ExtReal;

fn params(mu: f64) -> ProblemParams {
    ProblemParams::new(mu).unwrap()
}

#[test]
fn interior_rotation_at_minus_three() {
    let r = critical_rotation_finite(&params(0.5), -3.0, CriticalKind::Interior).unwrap();
    assert!((r - 1.054_648_614_831_467).abs() < 1e-13);
}

#[test]
fn threshold_energy_quarter_mass() {
    let p = params(0.25);
    let sup = exterior_earth_supremum(&p).finite().unwrap();
    assert!((sup - 1.317_776_064_965_527).abs() < 1e-13);
    let c0 = c_zero_threshold(&p).unwrap();
    assert!((c0 + 1.970_173_276_225_482).abs() < 1e-10);
    assert!(c0 < p.c_jacobi);
    assert!(c_zero_threshold(&params(0.5)).is_none());
    assert_eq!(exterior_earth_supremum(&params(0.5)), ExtReal::Infinity);
}

#[test]
fn three_halves_resonance_energy() {
    let c = critical_rotation_inverse(&params(0.5), CriticalKind::Interior, 1.5).unwrap();
    assert!((c + 2.046_151_798_863_279).abs() < 1e-10);
}

#[test]
fn moon_exterior_at_jacobi_energy() {
    for (mu, expect) in [(0.01, 1.12298), (0.1, 1.08916), (0.25, 1.06645), (0.5, 1.04318)] {
        let p = params(mu);
        let r = critical_rotation_finite(&p, p.c_jacobi, CriticalKind::ExteriorMoon).unwrap();
        assert!((r - expect).abs() < 1e-5, "mu={mu}: {r}");
    }
}

#[test]
fn reference_indices() {
    let p = params(0.5);
    assert_eq!(cz(&p, -3.0, 2, CollisionOrbit::ExteriorEarth).unwrap(), IndexResult::Nondegenerate { index: 3 });
    assert_eq!(cz(&p, -3.0, 2, CollisionOrbit::Interior).unwrap(), IndexResult::Nondegenerate { index: 5 });
    assert!(cz(&p, -3.0, 1, CollisionOrbit::Interior).is_err());
    assert!(cz(&p, -1.5, 2, CollisionOrbit::Interior).is_err());
}
