//! Transversality of the radial Liouville field centred at the Earth.
//!
//! In Earth polar coordinates `(r, theta)` the potential is
//! `V = -(1-mu)/r - mu/sqrt(r^2 - 2r cos(theta) + 1)` and the field
//! `X = (q - E) d/dq` satisfies `X(H) = r dV/dr` on `H^{-1}(c)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::problem::ProblemParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

fn moon_distance_sq(pt: &PolarPoint) -> f64 {
    pt.r * pt.r - 2.0 * pt.r * pt.theta.cos() + 1.0
}

pub fn potential(p: &ProblemParams, pt: &PolarPoint) -> f64 {
    -(1.0 - p.mu) / pt.r - p.mu / moon_distance_sq(pt).sqrt()
}

/// `U_r(theta) = dV/dr = (1-mu)/r^2 + mu (r - cos theta) / (r^2 - 2 r cos theta + 1)^{3/2}`.
pub fn radial_derivative(p: &ProblemParams, pt: &PolarPoint) -> Result<f64> {
    if !(pt.r > 0.0) {
        return domain("radius must be positive");
    }
    let d2 = moon_distance_sq(pt);
    if d2 <= 0.0 {
        return domain("the point is the Moon");
    }
    Ok((1.0 - p.mu) / (pt.r * pt.r) + p.mu * (pt.r - pt.theta.cos()) / (d2 * d2.sqrt()))
}

/// `d U_r / d theta`.
pub fn radial_derivative_dtheta(p: &ProblemParams, pt: &PolarPoint) -> f64 {
    let (s, c) = pt.theta.sin_cos();
    let d2 = moon_distance_sq(pt);
    p.mu * s * (-2.0 * pt.r * pt.r + pt.r * c + 1.0) / (d2 * d2 * d2.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Extremum {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimumReport {
    pub r: f64,
    pub argmin_theta: f64,
    pub argmin_is_zero: bool,
    /// Interior critical angles found on the grid.
    pub interior_critical: Vec<(f64, Extremum)>,
    /// `arccos((2r^2 - 1)/r)` when it exists (`r > 1/2`).
    pub predicted_third: Option<f64>,
    pub structure_ok: bool,
}

/// Checks that `theta = 0` minimises `U_r` on a grid and that the only interior
/// critical point is the predicted maximum for `r > 1/2`.
pub fn minimum_at_zero_check(p: &ProblemParams, r: f64, grid: usize) -> Result<MinimumReport> {
    if !(r > 0.0 && r < 1.0) {
        return domain("radius must lie in (0, 1)");
    }
    let n = grid.max(3);
    let thetas: Vec<f64> = (0..n).map(|i| PI * i as f64 / (n - 1) as f64).collect();
    let mut best = (f64::INFINITY, 0.0);
    for &t in &thetas {
        let u = radial_derivative(p, &PolarPoint { r, theta: t })?;
        if u < best.0 {
            best = (u, t);
        }
    }
    let mut interior = Vec::new();
    let slope = |t: f64| radial_derivative_dtheta(p, &PolarPoint { r, theta: t });
    for w in thetas.windows(2).skip(1).take(n - 3) {
        let (s0, s1) = (slope(w[0]), slope(w[1]));
        if s0 > 0.0 && s1 <= 0.0 {
            interior.push((w[0], Extremum::Max));
        } else if s0 < 0.0 && s1 >= 0.0 {
            interior.push((w[0], Extremum::Min));
        }
    }
    let predicted_third = (r > 0.5).then(|| ((2.0 * r * r - 1.0) / r).clamp(-1.0, 1.0).acos());
    let h = PI / (n - 1) as f64;
    let structure_ok = match predicted_third {
        None => interior.is_empty(),
        Some(t0) => {
            interior.len() == 1 && interior[0].1 == Extremum::Max && (interior[0].0 - t0).abs() <= 2.0 * h
        }
    };
    Ok(MinimumReport {
        r,
        argmin_theta: best.1,
        argmin_is_zero: best.1 == 0.0,
        interior_critical: interior,
        predicted_third,
        structure_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransversalityReport {
    pub c: f64,
    pub samples: usize,
    pub proposals: u64,
    /// Minimum of `r dV/dr` over the samples.
    pub min_r_dvdr: f64,
    pub argmin: Option<PolarPoint>,
    pub max_r: f64,
    /// Radius of the critical point measured from the Earth.
    pub l_radius: f64,
    /// Minimum of `V` on the circle `r = l_radius`; above `c` means the circle misses the Hill region.
    pub circle_min_v: f64,
    pub contained: bool,
    pub positive: bool,
}

/// Samples the Earth component of the Hill region and evaluates `r dV/dr` there.
pub fn transversality_audit(p: &ProblemParams, c: f64, sample_count: usize, seed: u64) -> Result<TransversalityReport> {
    if !(c < p.c_jacobi) {
        return domain(format!("transversality is only asserted below c_J = {}", p.c_jacobi));
    }
    let l = p.l_radius();
    let circle_min_v = (0..=2000)
        .map(|i| potential(p, &PolarPoint { r: l, theta: PI * i as f64 / 2000.0 }))
        .fold(f64::INFINITY, f64::min);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = TransversalityReport {
        c,
        samples: 0,
        proposals: 0,
        min_r_dvdr: f64::INFINITY,
        argmin: None,
        max_r: 0.0,
        l_radius: l,
        circle_min_v,
        contained: circle_min_v > c,
        positive: false,
    };
    // Outside r < (1-mu)/(-c - mu/(1-r)) no point can satisfy V <= c; shrink the box.
    let mut r_box = l;
    for _ in 0..60 {
        let bound = (1.0 - p.mu) / (-c - p.mu / (1.0 - r_box)).max(1e-300);
        if bound <= 0.0 || bound >= r_box {
            break;
        }
        r_box = bound;
    }
    while rep.samples < sample_count {
        rep.proposals += 1;
        if rep.proposals > 1_000_000_000 {
            return domain("rejection sampling found no Hill-region points");
        }
        let pt = PolarPoint { r: rng.gen::<f64>() * r_box, theta: rng.gen::<f64>() * PI };
        if !(pt.r > 0.0) || potential(p, &pt) > c {
            continue;
        }
        rep.samples += 1;
        rep.max_r = rep.max_r.max(pt.r);
        let v = pt.r * radial_derivative(p, &pt)?;
        if v < rep.min_r_dvdr {
            rep.min_r_dvdr = v;
            rep.argmin = Some(pt);
        }
    }
    rep.positive = rep.min_r_dvdr > 0.0;
    Ok(rep)
}
