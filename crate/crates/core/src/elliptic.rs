//! Complete elliptic integrals in the parameter convention `m = k^2`.
//!
//! `K` and `E` come from the arithmetic-geometric mean. The hypergeometric
//! power series of `K` is kept as an independent cross-check.

use std::f64::consts::FRAC_PI_2;

use crate::error::{domain, Error, Result};

/// Default number of series terms.
pub const SERIES_TERMS: usize = 256;

const AGM_TOL: f64 = 1e-16;

fn check_parameter(m: f64) -> Result<()> {
    if m.is_nan() || m < 0.0 {
        return domain(format!("elliptic parameter m = {m} must lie in [0, 1)"));
    }
    if m >= 1.0 {
        return Err(Error::Divergent(m));
    }
    Ok(())
}

/// AGM iteration from `(1, sqrt(1-m))`, returning the mean and `sum 2^(n-1) c_n^2`.
fn agm(m: f64) -> (f64, f64) {
    let mut a = 1.0;
    let mut b = (1.0 - m).sqrt();
    let mut sum = 0.5 * m;
    let mut pow = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        pow *= 2.0;
        sum += pow * c * c;
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        // the means can stall one ulp apart, below the relative tolerance reachable in f64
        let stalled = an == a && bn == b;
        a = an;
        b = bn;
        if stalled || (a - b).abs() <= AGM_TOL * a {
            break;
        }
    }
    (a, sum)
}

/// `K(m) = int_0^{pi/2} (1 - m sin^2 t)^{-1/2} dt`.
pub fn complete_k(m: f64) -> Result<f64> {
    check_parameter(m)?;
    Ok(FRAC_PI_2 / agm(m).0)
}

/// `E(m) = int_0^{pi/2} (1 - m sin^2 t)^{1/2} dt`, defined on `[0, 1]`.
pub fn complete_e(m: f64) -> Result<f64> {
    if m == 1.0 {
        return Ok(1.0);
    }
    check_parameter(m)?;
    let (a, sum) = agm(m);
    Ok(FRAC_PI_2 / a * (1.0 - sum))
}

/// Partial sum `(pi/2) sum_{n=0}^{terms} a_n^2 m^n`, `a_n = (2n-1)!!/(2n)!!`.
///
/// Stops early once a term drops below `1e-17` of the partial sum.
pub fn complete_k_series(m: f64, terms: usize) -> Result<f64> {
    if m.is_nan() || !(0.0..1.0).contains(&m) {
        return domain(format!("series needs 0 <= m < 1, got {m}"));
    }
    let mut coef = 1.0;
    let mut mpow = 1.0;
    let mut sum = 1.0;
    for n in 1..=terms {
        coef *= (2 * n - 1) as f64 / (2 * n) as f64;
        mpow *= m;
        let term = coef * coef * mpow;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    Ok(FRAC_PI_2 * sum)
}

/// Term-wise derivative of the series, `(pi/2) sum n a_n^2 m^(n-1)`.
fn dk_dm_series(m: f64) -> f64 {
    let mut coef = 1.0;
    let mut mpow = 1.0;
    let mut sum = 0.0;
    for n in 1..=SERIES_TERMS {
        coef *= (2 * n - 1) as f64 / (2 * n) as f64;
        let term = n as f64 * coef * coef * mpow;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
        mpow *= m;
    }
    FRAC_PI_2 * sum
}

/// `dK/dm = (E - (1-m) K) / (2 m (1-m))`, via the series near `m = 0`.
pub fn dk_dm(m: f64) -> Result<f64> {
    check_parameter(m)?;
    if m < 0.05 {
        return Ok(dk_dm_series(m));
    }
    let k = complete_k(m)?;
    let e = complete_e(m)?;
    Ok((e - (1.0 - m) * k) / (2.0 * m * (1.0 - m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn k_at_zero() {
        assert_eq!(complete_k(0.0).unwrap(), FRAC_PI_2);
        assert_eq!(complete_k_series(0.0, 10).unwrap(), FRAC_PI_2);
    }

    #[test]
    fn k_reference_values() {
        // K(1/2) = Gamma(1/4)^2 / (4 sqrt(pi))
        let k = complete_k(0.5).unwrap();
        assert!((k - 1.854_074_677_301_372).abs() < 1e-15);
        assert!((complete_k(0.9).unwrap() - 2.578_092_113_348_173).abs() < 1e-14);
    }

    #[test]
    fn e_reference_values() {
        assert_eq!(complete_e(0.0).unwrap(), FRAC_PI_2);
        assert_eq!(complete_e(1.0).unwrap(), 1.0);
        assert!((complete_e(0.5).unwrap() - 1.350_643_881_047_675_5).abs() < 1e-14);
    }

    #[test]
    fn divergence_is_a_signal() {
        assert_eq!(complete_k(1.0), Err(Error::Divergent(1.0)));
        assert!(matches!(dk_dm(1.5), Err(Error::Divergent(_))));
        assert!(matches!(complete_k(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn series_first_terms() {
        let v = complete_k_series(0.25, 1).unwrap();
        assert!((v - FRAC_PI_2 * 1.0625).abs() < 1e-16);
    }

    #[test]
    fn series_agrees_with_agm() {
        let s = complete_k_series(0.9, 500).unwrap();
        assert!((s - complete_k(0.9).unwrap()).abs() < 1e-10);
        let s = complete_k_series(0.5, SERIES_TERMS).unwrap();
        assert!((s - complete_k(0.5).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn derivative_at_zero() {
        assert!((dk_dm(0.0).unwrap() - PI / 8.0).abs() < 1e-16);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-6;
        for &m in &[0.04, 0.06, 0.5, 0.8] {
            let fd = (complete_k(m + h).unwrap() - complete_k(m - h).unwrap()) / (2.0 * h);
            assert!((dk_dm(m).unwrap() - fd).abs() < 1e-7, "m={m}");
        }
    }

    #[test]
    fn derivative_grows_towards_one() {
        let mut prev = 0.0;
        for i in 1..100 {
            let m = 1.0 - 0.5f64.powi(i / 3 + 1);
            let d = dk_dm(m).unwrap();
            assert!(d >= prev);
            prev = d;
        }
        assert!(prev > 1e4);
    }

    #[test]
    fn legendre_relation() {
        for i in 1..50 {
            let m = i as f64 / 50.0;
            let (k, e) = (complete_k(m).unwrap(), complete_e(m).unwrap());
            let (kp, ep) = (complete_k(1.0 - m).unwrap(), complete_e(1.0 - m).unwrap());
            assert!((e * kp + ep * k - k * kp - FRAC_PI_2).abs() < 1e-12, "m={m}");
        }
    }
}
