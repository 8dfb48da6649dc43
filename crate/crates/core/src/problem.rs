//! Problem parameters, the integral plane, and region classification.
//!
//! The Earth sits at `(-1/2, 0)` with mass `1 - mu`, the Moon at `(1/2, 0)` with
//! mass `mu`, `0 < mu <= 1/2`. A point `(g, c)` of the integral plane is the
//! value of the first integral `G` and the energy `H`; only `c < 0` is treated.

use serde::Serialize;
use std::fmt;

use crate::error::{domain, Result};

/// Default absolute tolerance on a critical-curve equation residual.
pub const DELTA_CURVE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemParams {
    pub mu: f64,
    /// Critical Jacobi energy `H(L)`.
    pub c_jacobi: f64,
    /// Energy where `l3` and `l5` meet.
    pub c_e: f64,
    /// Energy where `l2` and `l4` meet.
    pub c_h: f64,
    /// `q1` coordinate of the critical point `L`.
    pub l_crit: f64,
}

impl ProblemParams {
    pub fn new(mu: f64) -> Result<Self> {
        critical_constants(mu)
    }

    /// `1 - 2 mu`, the asymmetry that enters the eta-polynomial.
    pub fn asym(&self) -> f64 {
        1.0 - 2.0 * self.mu
    }

    /// `mu (1 - mu)`.
    pub fn mass_product(&self) -> f64 {
        self.mu * (1.0 - self.mu)
    }

    /// Distance from the Earth to the critical point `L`.
    pub fn l_radius(&self) -> f64 {
        self.l_crit + 0.5
    }

    pub fn is_symmetric(&self) -> bool {
        self.mu == 0.5
    }

    pub fn l1_g(&self, c: f64) -> f64 {
        2.0 * self.asym() - c
    }

    pub fn l2_g(&self, c: f64) -> f64 {
        -c - 2.0 * self.asym()
    }

    pub fn l3_g(&self, c: f64) -> f64 {
        -c - 2.0
    }

    pub fn l4_g(&self, c: f64) -> f64 {
        self.asym().powi(2) / c
    }

    pub fn l5_g(&self, c: f64) -> f64 {
        1.0 / c
    }
}

pub fn critical_constants(mu: f64) -> Result<ProblemParams> {
    if !(mu > 0.0 && mu <= 0.5) {
        return domain(format!("mass ratio mu = {mu} outside (0, 1/2]"));
    }
    let root = (mu * (1.0 - mu)).sqrt();
    let l_crit = if mu == 0.5 {
        0.0
    } else {
        // 1 - 2 sqrt(mu(1-mu)) = (sqrt(1-mu) - sqrt(mu))^2, and 1 - 2mu = (sqrt(1-mu) - sqrt(mu))(sqrt(1-mu) + sqrt(mu))
        let (a, b) = ((1.0 - mu).sqrt(), mu.sqrt());
        (a - b) / (2.0 * (a + b))
    };
    Ok(ProblemParams {
        mu,
        c_jacobi: -1.0 - 2.0 * root,
        c_e: -1.0,
        c_h: -1.0 + 2.0 * mu,
        l_crit,
    })
}

/// A point of the integral plane together with the mass ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyMomentum {
    pub params: ProblemParams,
    pub g: f64,
    pub c: f64,
}

impl EnergyMomentum {
    pub fn new(params: ProblemParams, g: f64, c: f64) -> Result<Self> {
        if !(c < 0.0) || !g.is_finite() {
            return domain(format!("(g, c) = ({g}, {c}) requires finite g and c < 0"));
        }
        Ok(Self { params, g, c })
    }

    /// `1 - g c`, the discriminant of the xi-quadratic (divided by 4).
    pub fn xi_disc(&self) -> f64 {
        1.0 - self.g * self.c
    }

    /// `(1 - 2mu)^2 - g c`, the discriminant of the eta-quadratic (divided by 4).
    pub fn eta_disc(&self) -> f64 {
        self.params.asym().powi(2) - self.g * self.c
    }

    /// `c x^2 + 2 x + g`.
    pub fn xi_quadratic(&self, x: f64) -> f64 {
        (self.c * x + 2.0) * x + self.g
    }

    /// `c x^2 + 2 (1 - 2mu) x + g`.
    pub fn eta_quadratic(&self, x: f64) -> f64 {
        (self.c * x + 2.0 * self.params.asym()) * x + self.g
    }
}

/// Roots of a real quadratic; complex pairs are flagged rather than encoded as NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RootPair {
    /// Ordered real roots, first <= second.
    Real(f64, f64),
    Complex { re: f64, im: f64 },
}

impl RootPair {
    pub fn real(&self) -> Option<(f64, f64)> {
        match *self {
            RootPair::Real(a, b) => Some((a, b)),
            RootPair::Complex { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuarticRoots {
    pub xi: RootPair,
    pub eta: RootPair,
}

/// Roots of `c x^2 + 2 b x + g = 0` for `c < 0`, with `disc = b^2 - g c`.
fn quadratic_roots(b: f64, g: f64, c: f64, disc: f64) -> RootPair {
    if disc < 0.0 {
        return RootPair::Complex { re: -b / c, im: (-disc).sqrt() / c.abs() };
    }
    let s = disc.sqrt();
    // Avoid cancellation: one root from the large-magnitude combination, the other by Vieta.
    let q = -(b + b.signum() * s);
    let (r1, r2) = if q != 0.0 { (q / c, g / q) } else { (0.0, 0.0) };
    if r1 <= r2 {
        RootPair::Real(r1, r2)
    } else {
        RootPair::Real(r2, r1)
    }
}

pub fn quartic_roots(em: &EnergyMomentum) -> QuarticRoots {
    let b_eta = em.params.asym();
    let eta = if b_eta == 0.0 {
        // symmetric case: c x^2 + g = 0
        let v = -em.g / em.c;
        if v >= 0.0 {
            RootPair::Real(-v.sqrt(), v.sqrt())
        } else {
            RootPair::Complex { re: 0.0, im: (-v).sqrt() }
        }
    } else {
        quadratic_roots(b_eta, em.g, em.c, em.eta_disc())
    };
    QuarticRoots { xi: quadratic_roots(1.0, em.g, em.c, em.xi_disc()), eta }
}

/// Regular (Liouville-torus) regions of the integral plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Region {
    SPrime,
    S,
    L,
    P,
}

impl Region {
    pub const ALL: [Region; 4] = [Region::SPrime, Region::S, Region::L, Region::P];

    pub fn name(&self) -> &'static str {
        match self {
            Region::SPrime => "Sprime",
            Region::S => "S",
            Region::L => "L",
            Region::P => "P",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum L3Kind {
    /// `c < c_J`: collision orbit `xi = 1` in one Hill component.
    InteriorCollision,
    /// `c > c_J`: the satellite bounces between the two primaries.
    DoubleCollision,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegionTag {
    Regular(Region),
    OnL1,
    OnL2,
    OnL3(L3Kind),
    OnL4,
    OnL5,
    Forbidden,
}

impl RegionTag {
    pub fn regular(&self) -> Option<Region> {
        match *self {
            RegionTag::Regular(r) => Some(r),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RegionTag::Regular(r) => r.name(),
            RegionTag::OnL1 => "l1",
            RegionTag::OnL2 => "l2",
            RegionTag::OnL3(L3Kind::InteriorCollision) => "l3-interior",
            RegionTag::OnL3(L3Kind::DoubleCollision) => "l3-double",
            RegionTag::OnL4 => "l4",
            RegionTag::OnL5 => "l5",
            RegionTag::Forbidden => "forbidden",
        }
    }
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Critical-curve tag of `em`, if it lies within `delta_curve` of one.
fn curve_tag(em: &EnergyMomentum, delta_curve: f64) -> Option<RegionTag> {
    let p = &em.params;
    let (g, c) = (em.g, em.c);
    if (c + g + 2.0).abs() < delta_curve {
        let kind = if c < p.c_jacobi { L3Kind::InteriorCollision } else { L3Kind::DoubleCollision };
        return Some(RegionTag::OnL3(kind));
    }
    if (c + g - 2.0 * p.asym()).abs() < delta_curve {
        return Some(RegionTag::OnL1);
    }
    if (c + g + 2.0 * p.asym()).abs() < delta_curve {
        return Some(RegionTag::OnL2);
    }
    if c > p.c_jacobi && c < p.c_h && (g * c - p.asym().powi(2)).abs() < delta_curve {
        return Some(RegionTag::OnL4);
    }
    if c > p.c_e && (g * c - 1.0).abs() < delta_curve {
        return Some(RegionTag::OnL5);
    }
    None
}

pub fn classify(em: &EnergyMomentum, delta_curve: f64) -> RegionTag {
    if let Some(tag) = curve_tag(em, delta_curve) {
        return tag;
    }
    let roots = quartic_roots(em);
    let Some((x1, x2)) = roots.xi.real() else {
        return RegionTag::Forbidden;
    };
    let eta_outside = match roots.eta {
        RootPair::Complex { .. } => true,
        RootPair::Real(e1, _) => e1 > 1.0,
    };
    if -1.0 < x1 && x1 < 1.0 && 1.0 < x2 {
        match roots.eta {
            RootPair::Real(e1, e2) if -1.0 < e1 && e1 < 1.0 && 1.0 < e2 => {
                return RegionTag::Regular(Region::SPrime)
            }
            RootPair::Real(e1, e2) if -1.0 < e1 && e2 < 1.0 => return RegionTag::Regular(Region::S),
            _ if eta_outside => return RegionTag::Regular(Region::L),
            _ => {}
        }
    } else if 1.0 < x1 && eta_outside {
        return RegionTag::Regular(Region::P);
    }
    RegionTag::Forbidden
}

/// Branch of the motion inside a region with two Hill components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Component {
    Earth,
    Moon,
    Whole,
}

/// An open interval `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillationRanges {
    pub region: Region,
    pub xi: Interval,
    pub eta: Interval,
}

/// Ranges of the elliptic coordinates swept by the motion of a regular point.
///
/// `Whole` is accepted in every region; in `S` it means the Earth branch.
pub fn oscillation_ranges(em: &EnergyMomentum, component: Component) -> Result<OscillationRanges> {
    let tag = classify(em, DELTA_CURVE);
    let Some(region) = tag.regular() else {
        return domain(format!("({}, {}) is not a regular point (tag {tag})", em.g, em.c));
    };
    let roots = quartic_roots(em);
    let (x1, x2) = roots.xi.real().expect("regular region has real xi roots");
    let xi = match region {
        Region::P => Interval { lo: x1, hi: x2 },
        _ => Interval { lo: 1.0, hi: x2 },
    };
    let eta = match (region, component) {
        (Region::SPrime, Component::Moon) => {
            return domain("the S' motion is confined to the Earth component")
        }
        (Region::SPrime, _) | (Region::S, Component::Earth | Component::Whole) => {
            let (e1, _) = roots.eta.real().expect("S/S' have real eta roots");
            Interval { lo: -1.0, hi: e1 }
        }
        (Region::S, Component::Moon) => {
            let (_, e2) = roots.eta.real().expect("S has real eta roots");
            Interval { lo: e2, hi: 1.0 }
        }
        (Region::L | Region::P, Component::Moon | Component::Earth) => {
            return domain(format!("region {} has a single component", region.name()))
        }
        (Region::L | Region::P, Component::Whole) => Interval { lo: -1.0, hi: 1.0 },
    };
    if !(xi.len() > 0.0 && eta.len() > 0.0) {
        return domain("degenerate oscillation interval");
    }
    Ok(OscillationRanges { region, xi, eta })
}

/// The open g-interval occupied by `region` on the energy level `c`, if nonempty.
pub fn region_g_interval(params: &ProblemParams, region: Region, c: f64) -> Option<Interval> {
    if !(c < 0.0) {
        return None;
    }
    let p = params;
    let iv = match region {
        Region::SPrime => {
            if p.is_symmetric() {
                return None;
            }
            Interval { lo: p.l2_g(c), hi: p.l1_g(c) }
        }
        Region::S => {
            if c < p.c_jacobi {
                Interval { lo: p.l3_g(c), hi: p.l2_g(c) }
            } else if c < p.c_h {
                Interval { lo: p.l4_g(c), hi: p.l2_g(c) }
            } else {
                return None;
            }
        }
        Region::L => {
            if c <= p.c_jacobi {
                return None;
            } else if c < p.c_h {
                Interval { lo: p.l3_g(c), hi: p.l4_g(c) }
            } else {
                Interval { lo: p.l3_g(c), hi: p.l2_g(c) }
            }
        }
        Region::P => {
            if c <= p.c_e {
                return None;
            }
            Interval { lo: p.l5_g(c), hi: p.l3_g(c) }
        }
    };
    (iv.len() > 0.0).then_some(iv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn em(mu: f64, g: f64, c: f64) -> EnergyMomentum {
        EnergyMomentum::new(ProblemParams::new(mu).unwrap(), g, c).unwrap()
    }

    #[test]
    fn symmetric_constants() {
        let p = critical_constants(0.5).unwrap();
        assert_eq!(p.c_jacobi, -2.0);
        assert_eq!(p.c_e, -1.0);
        assert_eq!(p.c_h, 0.0);
        assert_eq!(p.l_crit, 0.0);
    }

    #[test]
    fn quarter_constants() {
        let p = critical_constants(0.25).unwrap();
        let s3 = 3f64.sqrt();
        assert!((p.c_jacobi - (-1.0 - s3 / 2.0)).abs() < 1e-15);
        assert!((p.c_h + 0.5).abs() < 1e-15);
        assert!((p.l_crit - (1.0 - s3 / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn mu_out_of_range() {
        assert!(critical_constants(0.6).is_err());
        assert!(critical_constants(0.0).is_err());
        assert!(critical_constants(f64::NAN).is_err());
    }

    #[test]
    fn nonnegative_energy_rejected() {
        let p = ProblemParams::new(0.5).unwrap();
        assert!(EnergyMomentum::new(p, 1.0, 0.0).is_err());
        assert!(EnergyMomentum::new(p, 1.0, 0.3).is_err());
    }

    #[test]
    fn roots_on_l3() {
        let r = quartic_roots(&em(0.5, 1.0, -3.0));
        let (x1, x2) = r.xi.real().unwrap();
        assert!((x1 + 1.0 / 3.0).abs() < 1e-15);
        assert!((x2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_eta_roots() {
        let r = quartic_roots(&em(0.5, 2.0, -3.0));
        let (e1, e2) = r.eta.real().unwrap();
        let v = 6f64.sqrt() / 3.0;
        assert!((e1 + v).abs() < 1e-15 && (e2 - v).abs() < 1e-15);
    }

    #[test]
    fn discriminant_flag() {
        assert!(quartic_roots(&em(0.25, 4.0, -0.125)).eta.real().is_some());
        assert!(matches!(quartic_roots(&em(0.5, -0.1, -0.5)).eta, RootPair::Complex { .. }));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&em(0.5, 2.0, -3.0), DELTA_CURVE), RegionTag::Regular(Region::S));
        assert_eq!(classify(&em(0.5, -0.1, -0.5), DELTA_CURVE), RegionTag::Regular(Region::L));
        assert_eq!(classify(&em(0.5, -1.75, -0.5), DELTA_CURVE), RegionTag::Regular(Region::P));
        assert_eq!(
            classify(&em(0.5, 1.0, -3.0), DELTA_CURVE),
            RegionTag::OnL3(L3Kind::InteriorCollision)
        );
        // exactly on l4 for mu = 1/2 (g c = 0 with c_J < c < c_h)
        assert_eq!(classify(&em(0.5, 0.0, -0.5), DELTA_CURVE), RegionTag::OnL4);
        assert_eq!(classify(&em(0.25, 3.0, -3.0), DELTA_CURVE), RegionTag::Regular(Region::SPrime));
    }

    #[test]
    fn ranges_in_s_region() {
        let e = em(0.5, 2.0, -3.0);
        let r = oscillation_ranges(&e, Component::Earth).unwrap();
        assert_eq!(r.xi.lo, 1.0);
        assert!((r.eta.hi + 6f64.sqrt() / 3.0).abs() < 1e-15);
        let m = oscillation_ranges(&e, Component::Moon).unwrap();
        assert!((m.eta.lo - 6f64.sqrt() / 3.0).abs() < 1e-15);
        assert_eq!(m.eta.hi, 1.0);
    }

    #[test]
    fn ranges_in_p_region() {
        let e = em(0.5, -1.75, -0.5);
        let r = oscillation_ranges(&e, Component::Whole).unwrap();
        let (x1, x2) = quartic_roots(&e).xi.real().unwrap();
        assert_eq!((r.xi.lo, r.xi.hi), (x1, x2));
        assert_eq!((r.eta.lo, r.eta.hi), (-1.0, 1.0));
    }

    #[test]
    fn sprime_has_no_moon_component() {
        assert!(oscillation_ranges(&em(0.25, 3.0, -3.0), Component::Moon).is_err());
    }

    #[test]
    fn g_intervals_classify_consistently() {
        for &mu in &[0.1, 0.25, 0.5] {
            let p = ProblemParams::new(mu).unwrap();
            for i in 1..60 {
                let c = -4.0 + 4.0 * i as f64 / 60.0;
                for region in Region::ALL {
                    if let Some(iv) = region_g_interval(&p, region, c) {
                        for t in [0.1, 0.5, 0.9] {
                            let g = iv.lo + t * iv.len();
                            let tag = classify(&EnergyMomentum::new(p, g, c).unwrap(), DELTA_CURVE);
                            assert_eq!(tag, RegionTag::Regular(region), "mu={mu} c={c} g={g}");
                        }
                    }
                }
            }
        }
    }
}
