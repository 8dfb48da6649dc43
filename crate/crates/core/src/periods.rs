//! Oscillation periods of the elliptic coordinates.
//!
//! On a Liouville torus `xi` oscillates between two roots of
//! `f(x) = (x^2 - 1)(c x^2 + 2x + g)` and `eta` between two roots of
//! `h(x) = (x^2 - 1)(c x^2 + 2(1-2mu) x + g)`. The period is the round-trip time
//! `tau = (1/sqrt2) int_a^b dx / sqrt|f|` in the rescaled time of the regularized flow.

use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::elliptic::complete_k;
use crate::error::{domain, Error, Result};
use crate::extended::ExtReal;
use crate::problem::{
    classify, oscillation_ranges, quartic_roots, Component, EnergyMomentum, ProblemParams, Region,
    RegionTag, RootPair, DELTA_CURVE,
};
use crate::quadrature;

/// Parameters closer than this to 1 give an infinite period.
pub const DIVERGENCE_GAP: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodPair {
    pub tau_xi: ExtReal,
    pub tau_eta: ExtReal,
}

impl PeriodPair {
    /// `tau_eta / tau_xi`, `None` when both are infinite.
    pub fn ratio(&self) -> Option<ExtReal> {
        ExtReal::ratio(self.tau_eta, self.tau_xi)
    }
}

/// `K(m)` as an extended real: infinite within [`DIVERGENCE_GAP`] of 1.
pub fn k_ext(m: f64) -> Result<ExtReal> {
    if m > 1.0 - DIVERGENCE_GAP {
        return Ok(ExtReal::Infinity);
    }
    // tiny negative values are rounding residue of an exact zero
    let m = if m < 0.0 && m > -1e-12 { 0.0 } else { m };
    complete_k(m).map(ExtReal::Finite)
}

fn scale(k: ExtReal, factor: f64) -> ExtReal {
    match k {
        ExtReal::Finite(v) => ExtReal::Finite(v * factor),
        other => other,
    }
}

/// The six squared moduli. A value is `None` where its formula is not real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModuliSet {
    pub k1_sq: Option<f64>,
    pub k2_sq: Option<f64>,
    pub r1_sq: Option<f64>,
    pub r2_sq: Option<f64>,
    pub r3_sq: Option<f64>,
    pub r4_sq: Option<f64>,
    /// `sqrt((1-2mu)^2 - g c)`, `None` when the radicand is negative.
    pub a_mu: Option<f64>,
    /// `g - c`.
    pub b: f64,
}

pub fn moduli(em: &EnergyMomentum) -> ModuliSet {
    let (g, c) = (em.g, em.c);
    let a = em.params.asym();
    let b = g - c;
    let sum_sq = (g + c) * (g + c);
    let s = (em.xi_disc() >= 0.0).then(|| em.xi_disc().sqrt());
    let amu = (em.eta_disc() >= 0.0).then(|| em.eta_disc().sqrt());
    let d = sum_sq - 4.0 * a * a;

    // Both denominators 2s - B and 2s + B are formed without cancellation by using
    // (2s - B)(2s + B) = 4 - (g + c)^2.
    let k1_sq = s.map(|s| {
        if b > 0.0 {
            (4.0 - sum_sq) / (4.0 * s * (2.0 * s + b))
        } else {
            0.5 * (1.0 - b / (2.0 * s))
        }
    });
    let k2_sq = s.map(|s| {
        if b > 0.0 {
            4.0 * s * (2.0 * s + b) / (4.0 - sum_sq)
        } else {
            4.0 * s / (2.0 * s - b)
        }
    });
    let r1_sq = amu.map(|am| {
        if b > 0.0 {
            (4.0 * a * a - sum_sq) / (4.0 * am * (2.0 * am + b))
        } else {
            0.5 * (1.0 - b / (2.0 * am))
        }
    });
    let r2_sq = amu.map(|am| d / ((b + 2.0 * am) * (b + 2.0 * am)));
    let r3_sq = amu.map(|am| {
        if b > 0.0 {
            4.0 * am * (2.0 * am + b) / (4.0 * a * a - sum_sq)
        } else {
            4.0 * am / (2.0 * am - b)
        }
    });
    let r4_sq = (d > 0.0).then(|| {
        let sd = d.sqrt();
        if b < 0.0 {
            2.0 * (g * c - a * a) / (sd * (sd - b))
        } else {
            0.5 * (1.0 + b / sd)
        }
    });
    ModuliSet { k1_sq, k2_sq, r1_sq, r2_sq, r3_sq, r4_sq, a_mu: amu, b }
}

/// Closed-form branches for the xi-period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum XiBranch {
    /// `xi` oscillates in `(1, xi_2)`: regions S', S, L.
    K1,
    /// `xi` oscillates in `(xi_1, xi_2)`: region P.
    K2,
}

/// Closed-form branches for the eta-period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EtaBranch {
    /// Region S'.
    R1,
    /// Region S, either component.
    R2,
    /// Regions L and P with `(1-2mu)^2 >= g c`.
    R3,
    /// Regions L and P with `(1-2mu)^2 < g c`.
    R4,
}

fn missing(name: &str) -> Error {
    Error::Domain(format!("modulus {name} is not real at this point"))
}

pub fn xi_period_branch(em: &EnergyMomentum, branch: XiBranch) -> Result<ExtReal> {
    let md = moduli(em);
    if em.xi_disc() < 0.0 {
        return Err(missing("k"));
    }
    let s = em.xi_disc().sqrt();
    match branch {
        XiBranch::K1 => {
            let k = k_ext(md.k1_sq.ok_or_else(|| missing("k1"))?)?;
            Ok(scale(k, 1.0 / (SQRT_2 * s.sqrt())))
        }
        XiBranch::K2 => {
            let k = k_ext(md.k2_sq.ok_or_else(|| missing("k2"))?)?;
            let den = 2.0 * s - md.b;
            if !(den > 0.0) {
                return Err(missing("k2"));
            }
            Ok(scale(k, SQRT_2 / den.sqrt()))
        }
    }
}

pub fn eta_period_branch(em: &EnergyMomentum, branch: EtaBranch) -> Result<ExtReal> {
    let md = moduli(em);
    match branch {
        EtaBranch::R1 => {
            let am = md.a_mu.ok_or_else(|| missing("r1"))?;
            Ok(scale(k_ext(md.r1_sq.unwrap())?, 1.0 / (SQRT_2 * am.sqrt())))
        }
        EtaBranch::R2 => {
            let am = md.a_mu.ok_or_else(|| missing("r2"))?;
            Ok(scale(k_ext(md.r2_sq.unwrap())?, SQRT_2 / (md.b + 2.0 * am).sqrt()))
        }
        EtaBranch::R3 => {
            let am = md.a_mu.ok_or_else(|| missing("r3"))?;
            Ok(scale(k_ext(md.r3_sq.unwrap())?, SQRT_2 / (2.0 * am - md.b).sqrt()))
        }
        EtaBranch::R4 => {
            let r4 = md.r4_sq.ok_or_else(|| missing("r4"))?;
            let a = em.params.asym();
            let d = (em.g + em.c).powi(2) - 4.0 * a * a;
            Ok(scale(k_ext(r4)?, SQRT_2 / d.sqrt().sqrt()))
        }
    }
}

/// Branches used by a regular region.
pub fn branches(em: &EnergyMomentum, region: Region) -> (XiBranch, EtaBranch) {
    let xi = if region == Region::P { XiBranch::K2 } else { XiBranch::K1 };
    let eta = match region {
        Region::SPrime => EtaBranch::R1,
        Region::S => EtaBranch::R2,
        Region::L | Region::P => {
            if em.eta_disc() >= 0.0 {
                EtaBranch::R3
            } else {
                EtaBranch::R4
            }
        }
    };
    (xi, eta)
}

fn check_component(region: Region, component: Component) -> Result<()> {
    match (region, component) {
        (Region::SPrime, Component::Moon) => domain("the S' motion is confined to the Earth component"),
        (Region::L | Region::P, Component::Earth | Component::Moon) => {
            domain(format!("region {} has a single component", region.name()))
        }
        _ => Ok(()),
    }
}

/// Closed-form periods at a regular point, or on `l4` where `tau_eta` is infinite.
pub fn period_closed_form(em: &EnergyMomentum, component: Component) -> Result<PeriodPair> {
    match classify(em, DELTA_CURVE) {
        RegionTag::Regular(region) => {
            check_component(region, component)?;
            let (xb, eb) = branches(em, region);
            Ok(PeriodPair { tau_xi: xi_period_branch(em, xb)?, tau_eta: eta_period_branch(em, eb)? })
        }
        RegionTag::OnL4 => {
            Ok(PeriodPair { tau_xi: xi_period_branch(em, XiBranch::K1)?, tau_eta: ExtReal::Infinity })
        }
        RegionTag::Forbidden => domain(format!("({}, {}) is in the forbidden region", em.g, em.c)),
        tag => domain(format!(
            "({}, {}) lies on critical curve {tag}; use critical_orbit_periods",
            em.g, em.c
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    Xi,
    Eta,
}

/// Turning points of `x^2 - 1` and the quadratic, real ones only.
fn all_roots(em: &EnergyMomentum, axis: Axis) -> (RootPair, f64) {
    let roots = quartic_roots(em);
    match axis {
        Axis::Xi => (roots.xi, 1.0),
        Axis::Eta => (roots.eta, em.params.asym()),
    }
}

/// Quadrature value of the period over the oscillation interval of `axis`.
///
/// With `x = a + (b - a) sin^2 t` the two turning-point factors cancel against
/// the Jacobian, leaving `2 / sqrt|remaining factors|` on `[0, pi/2]`.
pub fn period_oracle(em: &EnergyMomentum, axis: Axis, component: Component) -> Result<f64> {
    let ranges = oscillation_ranges(em, component)?;
    let iv = match axis {
        Axis::Xi => ranges.xi,
        Axis::Eta => ranges.eta,
    };
    let (a, b) = (iv.lo, iv.hi);
    if !(b > a) {
        return domain("oscillation interval has nonpositive length");
    }
    let (pair, lin) = all_roots(em, axis);
    let c = em.c;
    let g = em.g;
    let quad = move |x: f64| (c * x + 2.0 * lin) * x + g;
    let unit = |r: f64| r == 1.0 || r == -1.0;
    // Factors of (x^2 - 1) c (x - r1)(x - r2) not vanishing at the endpoints.
    let remaining: Box<dyn Fn(f64) -> f64> = match (unit(a), unit(b)) {
        (true, true) => Box::new(move |x| quad(x).abs()),
        (false, false) => Box::new(move |x| (c * (x * x - 1.0)).abs()),
        (ua, _) => {
            let unit_other = if ua { -a } else { -b };
            let root_end = if ua { b } else { a };
            let (r1, r2) = pair.real().expect("an endpoint is a real root");
            let root_other = if (r1 - root_end).abs() <= (r2 - root_end).abs() { r2 } else { r1 };
            Box::new(move |x| (c * (x - unit_other) * (x - root_other)).abs())
        }
    };
    let integrand = |t: f64| {
        let s = t.sin();
        let x = a + (b - a) * s * s;
        2.0 / remaining(x).sqrt()
    };
    let v = quadrature::integrate(integrand, 0.0, FRAC_PI_2, 0.0, 1e-13)?;
    Ok(v / SQRT_2)
}

/// Critical orbits: singular leaves along the critical curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CriticalKind {
    Interior,
    ExteriorEarth,
    ExteriorMoon,
    Double,
    Hyperbolic,
    Elliptic,
}

impl CriticalKind {
    pub const ALL: [CriticalKind; 6] = [
        CriticalKind::Interior,
        CriticalKind::ExteriorEarth,
        CriticalKind::ExteriorMoon,
        CriticalKind::Double,
        CriticalKind::Hyperbolic,
        CriticalKind::Elliptic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CriticalKind::Interior => "int",
            CriticalKind::ExteriorEarth => "extE",
            CriticalKind::ExteriorMoon => "extM",
            CriticalKind::Double => "dou",
            CriticalKind::Hyperbolic => "hyp",
            CriticalKind::Elliptic => "ell",
        }
    }

    /// Open energy window `(lo, hi)` where the orbit exists.
    pub fn window(&self, p: &ProblemParams) -> (f64, f64) {
        match self {
            CriticalKind::Interior => (f64::NEG_INFINITY, p.c_jacobi),
            CriticalKind::ExteriorEarth | CriticalKind::ExteriorMoon => (f64::NEG_INFINITY, 0.0),
            CriticalKind::Double => (p.c_jacobi, 0.0),
            CriticalKind::Hyperbolic => (p.c_jacobi, p.c_h),
            CriticalKind::Elliptic => (p.c_e, 0.0),
        }
    }

    /// Integral value `g` of the orbit at energy `c`.
    pub fn g_at(&self, p: &ProblemParams, c: f64) -> f64 {
        match self {
            CriticalKind::Interior | CriticalKind::Double => p.l3_g(c),
            CriticalKind::ExteriorEarth => p.l1_g(c),
            CriticalKind::ExteriorMoon => p.l2_g(c),
            CriticalKind::Hyperbolic => p.l4_g(c),
            CriticalKind::Elliptic => p.l5_g(c),
        }
    }
}

pub(crate) fn check_window(p: &ProblemParams, c: f64, kind: CriticalKind) -> Result<()> {
    let (lo, hi) = kind.window(p);
    if c > lo && c < hi {
        Ok(())
    } else {
        domain(format!("c = {c} outside the existence window ({lo}, {hi}) of the {} orbit", kind.name()))
    }
}

/// Squared moduli of the critical-orbit formulas.
pub(crate) struct CriticalModuli;

impl CriticalModuli {
    /// Interior: `r2^2 = 4 mu(1-mu) / (-c-1+A)^2`, `A = sqrt(c^2 + 2c + (1-2mu)^2)`.
    pub fn interior(p: &ProblemParams, c: f64) -> (f64, f64) {
        let m = p.mass_product();
        let u = -c - 1.0;
        let amu = (u * u - 4.0 * m).max(0.0).sqrt();
        (4.0 * m / ((u + amu) * (u + amu)), u + amu)
    }

    /// Exterior: `k1^2` and `Q` with `Q = c^2 - 2 sigma (1-2mu) c + 1`, `sigma = +1` (Earth) or `-1` (Moon).
    pub fn exterior(p: &ProblemParams, c: f64, sigma: f64) -> (f64, f64) {
        let m = p.mass_product();
        let a = p.asym();
        let q = c * c - 2.0 * sigma * a * c + 1.0;
        let sq = q.sqrt();
        (2.0 * m / (sq * (sq + (sigma * a - c).abs())), q)
    }

    /// Double collision, `(c + 1)^2 < 4 mu(1-mu)`: `r4^2 = 1/2 - (c+1) / (4 sqrt(mu(1-mu)))`.
    pub fn double_r4(p: &ProblemParams, c: f64) -> f64 {
        0.5 - (c + 1.0) / (4.0 * p.mass_product().sqrt())
    }

    /// Elliptic: `r4^2 = 8 mu(1-mu) c^2 / (sqrt P (sqrt P + 1 - c^2))` and `P`.
    pub fn elliptic(p: &ProblemParams, c: f64) -> (f64, f64) {
        let m = p.mass_product();
        let a = p.asym();
        let c2 = c * c;
        let pp = c2 * c2 + 2.0 * c2 - 4.0 * a * a * c2 + 1.0;
        let sp = pp.sqrt();
        (8.0 * m * c2 / (sp * (sp + 1.0 - c2)), pp)
    }

    /// Hyperbolic: `k1^2 = (1 - ((1-2mu)^2 - c^2) / (4 c sqrt(mu(1-mu)))) / 2`.
    pub fn hyperbolic(p: &ProblemParams, c: f64) -> f64 {
        let a = p.asym();
        0.5 * (1.0 - (a * a - c * c) / (4.0 * c * p.mass_product().sqrt()))
    }
}

/// Periods of a critical orbit at energy `c`.
pub fn critical_orbit_periods(p: &ProblemParams, c: f64, kind: CriticalKind) -> Result<PeriodPair> {
    check_window(p, c, kind)?;
    let m = p.mass_product();
    let a = p.asym();
    let collision_xi = |c: f64| ExtReal::Finite(PI / (2.0 * (2.0 * (-1.0 - c)).sqrt()));
    let pair = match kind {
        CriticalKind::Interior => {
            let (r2, den) = CriticalModuli::interior(p, c);
            PeriodPair { tau_xi: collision_xi(c), tau_eta: scale(k_ext(r2)?, 1.0 / den.sqrt()) }
        }
        CriticalKind::ExteriorEarth => {
            let (k1, q) = CriticalModuli::exterior(p, c, 1.0);
            PeriodPair {
                tau_xi: scale(k_ext(k1)?, 1.0 / (SQRT_2 * q.sqrt().sqrt())),
                tau_eta: ExtReal::Finite(PI / (2.0 * (2.0 * (a - c)).sqrt())),
            }
        }
        CriticalKind::ExteriorMoon => {
            let (k1, q) = CriticalModuli::exterior(p, c, -1.0);
            let tau_eta = if c < p.c_h {
                ExtReal::Finite(PI / (2.0 * (2.0 * (-c - a)).sqrt()))
            } else {
                ExtReal::Infinity
            };
            PeriodPair { tau_xi: scale(k_ext(k1)?, 1.0 / (SQRT_2 * q.sqrt().sqrt())), tau_eta }
        }
        CriticalKind::Double => {
            let tau_xi = if c < p.c_e { collision_xi(c) } else { ExtReal::Infinity };
            let u = c + 1.0;
            let tau_eta = if u * u < 4.0 * m {
                scale(k_ext(CriticalModuli::double_r4(p, c))?, 1.0 / (SQRT_2 * m.sqrt().sqrt()))
            } else {
                let amu = (u * u - 4.0 * m).sqrt();
                scale(k_ext(2.0 * amu / (u + amu))?, 1.0 / (u + amu).sqrt())
            };
            PeriodPair { tau_xi, tau_eta }
        }
        CriticalKind::Hyperbolic => PeriodPair {
            tau_xi: scale(k_ext(CriticalModuli::hyperbolic(p, c))?, 1.0 / (2.0 * m.sqrt().sqrt())),
            tau_eta: ExtReal::Infinity,
        },
        CriticalKind::Elliptic => {
            let (r4, pp) = CriticalModuli::elliptic(p, c);
            PeriodPair {
                tau_xi: ExtReal::Finite(PI * (-c).sqrt() / (2.0 * (1.0 - c * c)).sqrt()),
                tau_eta: scale(k_ext(r4)?, (-2.0 * c).sqrt() / pp.sqrt().sqrt()),
            }
        }
    };
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn em(mu: f64, g: f64, c: f64) -> EnergyMomentum {
        EnergyMomentum::new(ProblemParams::new(mu).unwrap(), g, c).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn moduli_vanish_on_curves() {
        let m = moduli(&em(0.25, 1.0, -3.0));
        assert!(m.k1_sq.unwrap().abs() < 1e-15);
        let p = ProblemParams::new(0.25).unwrap();
        let m = moduli(&em(0.25, p.l1_g(-3.0), -3.0));
        assert!(m.r1_sq.unwrap().abs() < 1e-15);
    }

    #[test]
    fn moduli_reference_point() {
        let m = moduli(&em(0.5, 2.0, -3.0));
        let expect = 0.5 * (1.0 - 5.0 / (2.0 * 7f64.sqrt()));
        assert!((m.k1_sq.unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn stable_forms_match_textbook_forms() {
        // B > 0 here, so the rationalized branches are taken.
        let e = em(0.25, 3.0, -3.0);
        let m = moduli(&e);
        let s = e.xi_disc().sqrt();
        let am = e.eta_disc().sqrt();
        let b = e.g - e.c;
        assert!(rel(m.k1_sq.unwrap(), 0.5 * (1.0 - b / (2.0 * s))) < 1e-13);
        assert!(rel(m.r1_sq.unwrap(), 0.5 * (1.0 - b / (2.0 * am))) < 1e-13);
        assert!(rel(m.k2_sq.unwrap() * m.k1_sq.unwrap(), 1.0) < 1e-13);
    }

    #[test]
    fn interior_limit_from_s_region() {
        let p = ProblemParams::new(0.5).unwrap();
        let e = em(0.5, p.l3_g(-3.0) + 1e-7, -3.0);
        let pp = period_closed_form(&e, Component::Earth).unwrap();
        assert!((pp.tau_xi.to_f64() - PI / 4.0).abs() < 1e-6);
    }

    #[test]
    fn s_region_matches_oracle_both_components() {
        let e = em(0.5, 2.0, -3.0);
        let pp = period_closed_form(&e, Component::Earth).unwrap();
        for comp in [Component::Earth, Component::Moon] {
            let ox = period_oracle(&e, Axis::Xi, comp).unwrap();
            let oe = period_oracle(&e, Axis::Eta, comp).unwrap();
            assert!(rel(pp.tau_xi.to_f64(), ox) < 1e-10);
            assert!(rel(pp.tau_eta.to_f64(), oe) < 1e-10);
        }
        let e = em(0.1, 1.2, -3.0);
        let pp = period_closed_form(&e, Component::Moon).unwrap();
        assert!(rel(pp.tau_eta.to_f64(), period_oracle(&e, Axis::Eta, Component::Moon).unwrap()) < 1e-10);
    }

    #[test]
    fn every_region_matches_oracle() {
        let cases = [(0.25, 3.0, -3.0), (0.5, -0.1, -0.5), (0.25, 0.5, -1.2), (0.5, -1.75, -0.5), (0.1, -1.3, -0.6)];
        for (mu, g, c) in cases {
            let e = em(mu, g, c);
            let pp = period_closed_form(&e, Component::Whole).unwrap();
            let ox = period_oracle(&e, Axis::Xi, Component::Whole).unwrap();
            let oe = period_oracle(&e, Axis::Eta, Component::Whole).unwrap();
            assert!(rel(pp.tau_xi.to_f64(), ox) < 1e-10, "{mu} {g} {c}");
            assert!(rel(pp.tau_eta.to_f64(), oe) < 1e-10, "{mu} {g} {c}");
        }
    }

    #[test]
    fn on_l4_eta_period_is_infinite() {
        let p = ProblemParams::new(0.25).unwrap();
        let e = em(0.25, p.l4_g(-1.0), -1.0);
        let pp = period_closed_form(&e, Component::Whole).unwrap();
        assert_eq!(pp.tau_eta, ExtReal::Infinity);
        assert!(pp.tau_xi.finite().is_some());
    }

    #[test]
    fn forbidden_and_curves_refused() {
        assert!(period_closed_form(&em(0.5, 5.0, -3.0), Component::Whole).is_err());
        assert!(period_closed_form(&em(0.5, 1.0, -3.0), Component::Whole).is_err());
    }

    #[test]
    fn interior_case_reference() {
        let p = ProblemParams::new(0.5).unwrap();
        let pp = critical_orbit_periods(&p, -3.0, CriticalKind::Interior).unwrap();
        assert!((pp.tau_xi.to_f64() - PI / 4.0).abs() < 1e-15);
        let r2 = 7.0 - 4.0 * 3f64.sqrt();
        let expect = complete_k(r2).unwrap() / (2.0 + 3f64.sqrt()).sqrt();
        assert!(rel(pp.tau_eta.to_f64(), expect) < 1e-14);
    }

    #[test]
    fn sentinel_periods() {
        let p = ProblemParams::new(0.25).unwrap();
        let h = critical_orbit_periods(&p, -1.0, CriticalKind::Hyperbolic).unwrap();
        assert_eq!(h.tau_eta, ExtReal::Infinity);
        let d = critical_orbit_periods(&p, -0.5, CriticalKind::Double).unwrap();
        assert_eq!(d.tau_xi, ExtReal::Infinity);
        let m = critical_orbit_periods(&p, -0.3, CriticalKind::ExteriorMoon).unwrap();
        assert_eq!(m.tau_eta, ExtReal::Infinity);
    }

    #[test]
    fn windows_enforced() {
        let p = ProblemParams::new(0.5).unwrap();
        assert!(critical_orbit_periods(&p, -1.5, CriticalKind::Interior).is_err());
        assert!(critical_orbit_periods(&p, -1.5, CriticalKind::Elliptic).is_err());
        assert!(critical_orbit_periods(&p, -2.5, CriticalKind::Double).is_err());
    }

    #[test]
    fn critical_periods_are_limits_of_regular_ones() {
        let p = ProblemParams::new(0.25).unwrap();
        let d = 1e-8;
        let checks: [(CriticalKind, f64, f64, Component, bool, bool); 4] = [
            // (kind, c, g offset, component, compare xi, compare eta)
            (CriticalKind::Interior, -3.0, d, Component::Earth, true, true),
            (CriticalKind::ExteriorEarth, -3.0, -d, Component::Earth, true, true),
            (CriticalKind::ExteriorMoon, -3.0, -d, Component::Moon, true, true),
            (CriticalKind::Elliptic, -0.6, d, Component::Whole, true, true),
        ];
        for (kind, c, off, comp, cx, ce) in checks {
            let crit = critical_orbit_periods(&p, c, kind).unwrap();
            let e = em(0.25, kind.g_at(&p, c) + off, c);
            let reg = period_closed_form(&e, comp).unwrap();
            if cx {
                assert!(rel(reg.tau_xi.to_f64(), crit.tau_xi.to_f64()) < 1e-6, "{kind:?} xi");
            }
            if ce {
                assert!(rel(reg.tau_eta.to_f64(), crit.tau_eta.to_f64()) < 1e-6, "{kind:?} eta");
            }
        }
    }
}
