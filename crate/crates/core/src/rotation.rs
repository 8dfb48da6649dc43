//! Rotation numbers `R = tau_eta / tau_xi` of Liouville tori and critical orbits.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::elliptic::complete_k;
use crate::error::{domain, Error, Result};
use crate::extended::ExtReal;
use crate::periods::{check_window, k_ext, period_closed_form, CriticalKind, CriticalModuli};
use crate::problem::{
    classify, region_g_interval, Component, EnergyMomentum, ProblemParams, Region, RegionTag, DELTA_CURVE,
};

/// Rotation number of the torus through a regular point.
pub fn rotation_number(em: &EnergyMomentum) -> Result<ExtReal> {
    let periods = period_closed_form(em, Component::Whole)?;
    periods
        .ratio()
        .ok_or_else(|| Error::Domain("both periods are infinite".into()))
}

fn k_times(m: f64, factor: f64) -> Result<ExtReal> {
    Ok(match k_ext(m)? {
        ExtReal::Finite(k) => ExtReal::Finite(k * factor),
        other => other,
    })
}

/// `(pi/2) / (sqrt(1 - 2k^2) K(k))` with `1 - 2k^2` passed in directly.
fn exterior_form(k1_sq: f64, one_minus_2k: f64) -> Result<ExtReal> {
    if one_minus_2k <= 0.0 {
        return Ok(ExtReal::Infinity);
    }
    let k = complete_k(k1_sq)?;
    Ok(ExtReal::Finite(FRAC_PI_2 / (one_minus_2k.sqrt() * k)))
}

/// Rotation number of a critical orbit.
pub fn critical_rotation(p: &ProblemParams, c: f64, kind: CriticalKind) -> Result<ExtReal> {
    check_window(p, c, kind)?;
    let m = p.mass_product();
    let a = p.asym();
    match kind {
        CriticalKind::Interior => {
            let (r2, _) = CriticalModuli::interior(p, c);
            k_times(r2, 2.0 / PI * (1.0 + r2).sqrt())
        }
        CriticalKind::ExteriorEarth => {
            let (k1, q) = CriticalModuli::exterior(p, c, 1.0);
            exterior_form(k1, (a - c) / q.sqrt())
        }
        CriticalKind::ExteriorMoon => {
            if c >= p.c_h {
                return Ok(ExtReal::Infinity);
            }
            let (k1, q) = CriticalModuli::exterior(p, c, -1.0);
            exterior_form(k1, (-c - a) / q.sqrt())
        }
        CriticalKind::Double => {
            if c >= p.c_e {
                return Ok(ExtReal::Zero);
            }
            let r4 = CriticalModuli::double_r4(p, c);
            k_times(r4, 2.0 / PI * (-(c + 1.0) / m.sqrt()).sqrt())
        }
        CriticalKind::Hyperbolic => Ok(ExtReal::Infinity),
        CriticalKind::Elliptic => {
            let (r4, pp) = CriticalModuli::elliptic(p, c);
            k_times(r4, 2.0 / PI * ((1.0 - c * c) / pp.sqrt()).sqrt())
        }
    }
}

/// `pi / (2 sqrt(1-2mu) K(mu))`, the supremum of the Earth exterior rotation number.
pub fn exterior_earth_supremum(p: &ProblemParams) -> ExtReal {
    if p.is_symmetric() {
        return ExtReal::Infinity;
    }
    let k = complete_k(p.mu).expect("mu < 1");
    ExtReal::Finite(PI / (2.0 * p.asym().sqrt() * k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Trend {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub x: f64,
    pub next_x: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub expected: Trend,
    pub points: usize,
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
    /// Differences of the wrong sign (zero counts as wrong).
    pub violations: Vec<Violation>,
    /// Points where the function could not be evaluated.
    pub failures: Vec<f64>,
}

impl MonotonicityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty() && self.failures.is_empty()
    }
}

/// Signs of successive differences `f(x_{i+1}) - f(x_i)` on an ordered grid.
pub fn verify_monotonicity<F>(f: F, grid: &[f64], expected: Trend) -> MonotonicityReport
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let values: Vec<Result<f64>> = grid.par_iter().map(|&x| f(x)).collect();
    let mut report = MonotonicityReport {
        expected,
        points: grid.len(),
        positive: 0,
        negative: 0,
        zero: 0,
        violations: Vec::new(),
        failures: Vec::new(),
    };
    for (x, v) in grid.iter().zip(&values) {
        if v.is_err() {
            report.failures.push(*x);
        }
    }
    for i in 1..grid.len() {
        let (Ok(v0), Ok(v1)) = (&values[i - 1], &values[i]) else { continue };
        let d = v1 - v0;
        let ok = match expected {
            Trend::Increasing => d > 0.0,
            Trend::Decreasing => d < 0.0,
        };
        if d > 0.0 {
            report.positive += 1;
        } else if d < 0.0 {
            report.negative += 1;
        } else {
            report.zero += 1;
        }
        if !ok {
            report.violations.push(Violation { x: grid[i - 1], next_x: grid[i], difference: d });
        }
    }
    report
}

/// Finite rotation number of a critical orbit, or an error on a sentinel.
pub fn critical_rotation_finite(p: &ProblemParams, c: f64, kind: CriticalKind) -> Result<f64> {
    critical_rotation(p, c, kind)?
        .finite()
        .ok_or_else(|| Error::Domain(format!("{} rotation is a sentinel at c = {c}", kind.name())))
}

/// Rotation number of the regular torus at `(g, c)` at a finite value.
pub fn rotation_finite(p: &ProblemParams, g: f64, c: f64) -> Result<f64> {
    let em = EnergyMomentum::new(*p, g, c)?;
    rotation_number(&em)?
        .finite()
        .ok_or_else(|| Error::Domain(format!("rotation at ({g}, {c}) is a sentinel")))
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Energy at which a critical orbit has rotation number `target`, if any.
///
/// Uses the monotonicity of the critical rotation functions in `c`.
pub fn critical_rotation_inverse(p: &ProblemParams, kind: CriticalKind, target: f64) -> Option<f64> {
    let (lo, hi) = kind.window(p);
    let (lo, hi) = match kind {
        CriticalKind::Hyperbolic => return None,
        CriticalKind::Double => (lo, hi.min(p.c_e)),
        CriticalKind::ExteriorMoon => (lo, hi.min(p.c_h)),
        _ => (lo, hi),
    };
    let f = |c: f64| match critical_rotation(p, c, kind) {
        Ok(ExtReal::Finite(v)) => v - target,
        Ok(ExtReal::Infinity) => f64::INFINITY,
        Ok(ExtReal::Zero) => -target,
        Err(_) => f64::NAN,
    };
    let b = hi - 1e-14 * hi.abs().max(1.0);
    let fb = f(b);
    let mut a = if lo.is_finite() { lo + 1e-14 * lo.abs().max(1.0) } else { hi - 1.0 };
    if !lo.is_finite() {
        let mut step = 1.0;
        while (f(a) > 0.0) == (fb > 0.0) {
            step *= 2.0;
            if step > 1e12 {
                return None;
            }
            a = hi - step;
        }
    }
    let fa = f(a);
    if fa.is_nan() || fb.is_nan() || (fa > 0.0) == (fb > 0.0) {
        return None;
    }
    Some(bisect(f, a, b, 1e-15 * hi.abs().max(1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilySample {
    pub c: f64,
    pub g: f64,
    pub region: Region,
    /// `R(g, c) - k/l` at the sample.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyEndpoint {
    pub kind: CriticalKind,
    /// Energy where the critical orbit has the family's rotation number.
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusFamilyCurve {
    pub k: u32,
    pub l: u32,
    pub samples: Vec<FamilySample>,
    /// Energies of the scan with no bracketing interval.
    pub omitted: Vec<f64>,
    /// Critical orbits where the family can terminate.
    pub endpoints: Vec<FamilyEndpoint>,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Regions where the rotation number `k/l` can occur.
pub fn admissible_regions(k: u32, l: u32) -> Vec<Region> {
    let mut out = Vec::new();
    if k > l {
        out.extend([Region::SPrime, Region::S]);
    }
    out.push(Region::L);
    if k < l {
        out.push(Region::P);
    }
    out
}

const SCAN_POINTS: usize = 200;

/// Solutions `g` of `R(g, c) = target` on one energy level, inside `region`.
pub fn solve_ratio_on_level(p: &ProblemParams, region: Region, c: f64, target: f64) -> Vec<FamilySample> {
    let Some(iv) = region_g_interval(p, region, c) else { return Vec::new() };
    let f = |g: f64| -> f64 {
        let Ok(em) = EnergyMomentum::new(*p, g, c) else { return f64::NAN };
        if classify(&em, DELTA_CURVE) != RegionTag::Regular(region) {
            return f64::NAN;
        }
        match rotation_number(&em) {
            Ok(ExtReal::Finite(v)) => v - target,
            _ => f64::NAN,
        }
    };
    let h = iv.len() / SCAN_POINTS as f64;
    let grid: Vec<f64> = (0..=SCAN_POINTS)
        .map(|i| iv.lo + h * i as f64)
        .map(|g| g.clamp(iv.lo + 1e-9 * iv.len(), iv.hi - 1e-9 * iv.len()))
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&g| f(g)).collect();
    let mut out = Vec::new();
    for i in 1..grid.len() {
        let (v0, v1) = (vals[i - 1], vals[i]);
        if v0.is_nan() || v1.is_nan() || (v0 > 0.0) == (v1 > 0.0) {
            continue;
        }
        let g = bisect(f, grid[i - 1], grid[i], 1e-13);
        let residual = f(g);
        if residual.is_finite() {
            out.push(FamilySample { c, g, region, residual });
        }
    }
    out
}

/// Traces the `T_{k,l}` family `R(g, c) = k/l` over `steps + 1` energies in `[c_lo, c_hi]`.
///
/// `only` restricts the search to a single region.
pub fn trace_torus_family(
    p: &ProblemParams,
    k: u32,
    l: u32,
    c_lo: f64,
    c_hi: f64,
    steps: usize,
    only: Option<Region>,
) -> Result<TorusFamilyCurve> {
    if k == 0 || l == 0 || gcd(k, l) != 1 {
        return domain(format!("ratio {k}/{l} must be coprime positive integers"));
    }
    if !(c_lo <= c_hi && c_hi < 0.0) {
        return domain("energy range must satisfy c_lo <= c_hi < 0");
    }
    let target = k as f64 / l as f64;
    let regions: Vec<Region> = match only {
        Some(r) => vec![r],
        None => admissible_regions(k, l),
    };
    let cs: Vec<f64> = if steps == 0 {
        vec![c_lo]
    } else {
        (0..=steps).map(|i| c_lo + (c_hi - c_lo) * i as f64 / steps as f64).collect()
    };
    let per_level: Vec<(f64, Vec<FamilySample>)> = cs
        .par_iter()
        .map(|&c| {
            let found = regions.iter().flat_map(|&r| solve_ratio_on_level(p, r, c, target)).collect();
            (c, found)
        })
        .collect();
    let mut samples = Vec::new();
    let mut omitted = Vec::new();
    for (c, found) in per_level {
        if found.is_empty() {
            omitted.push(c);
        }
        samples.extend(found);
    }
    let endpoints = CriticalKind::ALL
        .iter()
        .filter_map(|&kind| critical_rotation_inverse(p, kind, target).map(|c| FamilyEndpoint { kind, c }))
        .collect();
    Ok(TorusFamilyCurve { k, l, samples, omitted, endpoints })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExteriorBoundReport {
    pub max_earth: f64,
    pub max_moon: f64,
    /// Grid points where `R_ext^E >= R_ext^M`.
    pub dominance_violations: usize,
}

impl ExteriorBoundReport {
    pub fn max(&self) -> f64 {
        self.max_earth.max(self.max_moon)
    }
}

/// Maximum of both exterior rotation numbers over a grid below `c_J`.
pub fn exterior_bound_check(p: &ProblemParams, grid: &[f64]) -> Result<ExteriorBoundReport> {
    if grid.iter().any(|&c| !(c < p.c_jacobi)) {
        return domain("exterior bound grid must lie below c_J");
    }
    let pairs: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&c| -> Result<(f64, f64)> {
            Ok((
                critical_rotation_finite(p, c, CriticalKind::ExteriorEarth)?,
                critical_rotation_finite(p, c, CriticalKind::ExteriorMoon)?,
            ))
        })
        .collect::<Result<_>>()?;
    let mut rep = ExteriorBoundReport { max_earth: f64::NEG_INFINITY, max_moon: f64::NEG_INFINITY, dominance_violations: 0 };
    for (e, m) in pairs {
        rep.max_earth = rep.max_earth.max(e);
        rep.max_moon = rep.max_moon.max(m);
        if !(e < m) {
            rep.dominance_violations += 1;
        }
    }
    Ok(rep)
}

/// The energy `c_0 < c_J` where `R_int` reaches the supremum of `R_ext^E`; `None` for `mu = 1/2`.
pub fn c_zero_threshold(p: &ProblemParams) -> Option<f64> {
    let target = exterior_earth_supremum(p).finite()?;
    critical_rotation_inverse(p, CriticalKind::Interior, target)
}
