//! Conley-Zehnder indices of evenly covered collision orbits.
//!
//! Along a collision orbit the linearized flow in the transverse plane solves
//! `psi' = [[0, 4], [-beta, 0]] psi`, a rotation with crossings of the Maslov
//! cycle at multiples of `pi / sqrt(beta)`. The index is the crossing count.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::extended::ExtReal;
use crate::periods::CriticalKind;
use crate::problem::{region_g_interval, ProblemParams, Region};
use crate::rotation::{critical_rotation_finite, rotation_finite};

/// Tolerance for detecting an integer resonance.
pub const DELTA_RES: f64 = 1e-9;

pub type Mat2 = [[f64; 2]; 2];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub fn det(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CollisionOrbit {
    Interior,
    ExteriorEarth,
    ExteriorMoon,
}

impl CollisionOrbit {
    pub const ALL: [CollisionOrbit; 3] =
        [CollisionOrbit::Interior, CollisionOrbit::ExteriorEarth, CollisionOrbit::ExteriorMoon];

    pub fn critical_kind(&self) -> CriticalKind {
        match self {
            CollisionOrbit::Interior => CriticalKind::Interior,
            CollisionOrbit::ExteriorEarth => CriticalKind::ExteriorEarth,
            CollisionOrbit::ExteriorMoon => CriticalKind::ExteriorMoon,
        }
    }

    pub fn name(&self) -> &'static str {
        self.critical_kind().name()
    }
}

/// A path of symplectic 2x2 matrices.
pub struct SymplecticPath {
    sampler: Box<dyn Fn(f64) -> Mat2 + Send + Sync>,
    derivative: Option<Box<dyn Fn(f64) -> Mat2 + Send + Sync>>,
    pub period_hint: f64,
}

impl SymplecticPath {
    pub fn new(
        sampler: impl Fn(f64) -> Mat2 + Send + Sync + 'static,
        derivative: Option<Box<dyn Fn(f64) -> Mat2 + Send + Sync>>,
        period_hint: f64,
    ) -> Self {
        Self { sampler: Box::new(sampler), derivative, period_hint }
    }

    pub fn at(&self, t: f64) -> Mat2 {
        (self.sampler)(t)
    }

    /// `psi'(t)`, analytic when available, else a central difference with `h = 1e-7`.
    pub fn derivative_at(&self, t: f64) -> Mat2 {
        if let Some(d) = &self.derivative {
            return d(t);
        }
        let h = 1e-7;
        let (p, m) = (self.at(t + h), self.at(t - h));
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = (p[i][j] - m[i][j]) / (2.0 * h);
            }
        }
        out
    }
}

/// `beta` of the transverse linearization along a collision orbit.
fn beta(p: &ProblemParams, c: f64, orbit: CollisionOrbit) -> f64 {
    match orbit {
        CollisionOrbit::Interior => -2.0 * (1.0 + c),
        CollisionOrbit::ExteriorEarth => 2.0 * (p.asym() - c),
        CollisionOrbit::ExteriorMoon => 2.0 * (-p.asym() - c),
    }
}

fn check_below_cj(p: &ProblemParams, c: f64) -> Result<()> {
    if c < p.c_jacobi {
        Ok(())
    } else {
        domain(format!("c = {c} must lie below c_J = {}", p.c_jacobi))
    }
}

/// Closed-form linearized flow along a collision orbit.
///
/// `period_hint` is the time between consecutive returns to the identity.
pub fn linearized_path(p: &ProblemParams, c: f64, orbit: CollisionOrbit) -> Result<SymplecticPath> {
    check_below_cj(p, c)?;
    let b = beta(p, c, orbit);
    let sb = b.sqrt();
    let w = 2.0 * sb;
    let sampler = move |t: f64| {
        let (s, co) = (w * t).sin_cos();
        [[co, 2.0 / sb * s], [-0.5 * sb * s, co]]
    };
    let derivative = move |t: f64| {
        let (s, co) = (w * t).sin_cos();
        [[-w * s, 4.0 * co], [-b * co, -w * s]]
    };
    Ok(SymplecticPath::new(sampler, Some(Box::new(derivative)), PI / sb))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum IndexResult {
    Nondegenerate { index: i64 },
    Degenerate { resonance: f64 },
}

impl IndexResult {
    pub fn index(&self) -> Option<i64> {
        match *self {
            IndexResult::Nondegenerate { index } => Some(index),
            IndexResult::Degenerate { .. } => None,
        }
    }
}

fn check_cover(cover: u32) -> Result<()> {
    if cover == 0 || !cover.is_multiple_of(2) {
        return domain(format!("cover {cover} is not a positive even number; only even covers are contractible"));
    }
    Ok(())
}

/// `1 + 2 max{k in Z : k < x}`, or a resonance marker when `x` is an integer.
pub fn index_from_count(x: f64) -> IndexResult {
    if (x - x.round()).abs() < DELTA_RES {
        IndexResult::Degenerate { resonance: x }
    } else {
        IndexResult::Nondegenerate { index: 1 + 2 * x.floor() as i64 }
    }
}

/// Crossing count `T / period_hint` for the `cover`-fold orbit.
pub fn crossing_ratio(p: &ProblemParams, c: f64, cover: u32, orbit: CollisionOrbit) -> Result<f64> {
    check_cover(cover)?;
    check_below_cj(p, c)?;
    let r = critical_rotation_finite(p, c, orbit.critical_kind())?;
    Ok(match orbit {
        CollisionOrbit::Interior => cover as f64 * r,
        _ => cover as f64 / r,
    })
}

pub fn cz_interior(p: &ProblemParams, c: f64, cover: u32) -> Result<IndexResult> {
    Ok(index_from_count(crossing_ratio(p, c, cover, CollisionOrbit::Interior)?))
}

pub fn cz_exterior(p: &ProblemParams, c: f64, cover: u32, orbit: CollisionOrbit) -> Result<IndexResult> {
    if orbit == CollisionOrbit::Interior {
        return domain("cz_exterior needs an exterior orbit");
    }
    Ok(index_from_count(crossing_ratio(p, c, cover, orbit)?))
}

pub fn cz(p: &ProblemParams, c: f64, cover: u32, orbit: CollisionOrbit) -> Result<IndexResult> {
    match orbit {
        CollisionOrbit::Interior => cz_interior(p, c, cover),
        _ => cz_exterior(p, c, cover, orbit),
    }
}

/// Length of the `cover`-fold orbit in the time of its linearized path.
pub fn cover_time(p: &ProblemParams, c: f64, cover: u32, orbit: CollisionOrbit) -> Result<f64> {
    let path_hint = PI / beta(p, c, orbit).sqrt();
    Ok(crossing_ratio(p, c, cover, orbit)? * path_hint)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingRecord {
    pub time: f64,
    pub signature: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobbinSalamonReport {
    /// Twice the index, so endpoint half-weights stay integral.
    pub index_twice: i64,
    pub crossings: Vec<CrossingRecord>,
    /// A crossing with a singular crossing form or a path lingering on the Maslov cycle.
    pub degenerate: bool,
}

impl RobbinSalamonReport {
    pub fn index(&self) -> f64 {
        self.index_twice as f64 / 2.0
    }
}

const CROSSING_TOL: f64 = 1e-8;
const FULL_KERNEL_TOL: f64 = 1e-6;
const FORM_TOL: f64 = 1e-10;

fn trace(m: &Mat2) -> f64 {
    m[0][0] + m[1][1]
}

fn det_minus_identity(m: &Mat2) -> f64 {
    (m[0][0] - 1.0) * (m[1][1] - 1.0) - m[0][1] * m[1][0]
}

/// Signature of `v -> omega(v, psi' v)` on `ker(psi - I)`, with `omega(v, w) = v_p w_q - v_q w_p`.
///
/// Returns `None` when the form is singular on the kernel.
fn crossing_signature(psi: &Mat2, dpsi: &Mat2) -> Option<i32> {
    // Gram matrix of omega(., dpsi .): Omega * dpsi with Omega = [[0, -1], [1, 0]].
    let q = [[-dpsi[1][0], -dpsi[1][1]], [dpsi[0][0], dpsi[0][1]]];
    let s = [[q[0][0], 0.5 * (q[0][1] + q[1][0])], [0.5 * (q[0][1] + q[1][0]), q[1][1]]];
    let scale = s.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let m = [[psi[0][0] - 1.0, psi[0][1]], [psi[1][0], psi[1][1] - 1.0]];
    let mmax = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    if mmax < FULL_KERNEL_TOL {
        let d = det(&s);
        let t = trace(&s);
        if d.abs() < FORM_TOL * scale * scale {
            return None;
        }
        return Some(if d < 0.0 {
            0
        } else if t > 0.0 {
            2
        } else {
            -2
        });
    }
    let row = if m[0][0].hypot(m[0][1]) >= m[1][0].hypot(m[1][1]) { m[0] } else { m[1] };
    let norm = row[0].hypot(row[1]);
    let v = [-row[1] / norm, row[0] / norm];
    let val = v[0] * (s[0][0] * v[0] + s[0][1] * v[1]) + v[1] * (s[1][0] * v[0] + s[1][1] * v[1]);
    if val.abs() < FORM_TOL * scale {
        None
    } else {
        Some(if val > 0.0 { 1 } else { -1 })
    }
}

/// Robbin-Salamon index of `path` on `[0, total_time]` by numerical crossing search.
///
/// `det(psi - I) = 2 - tr(psi)` only touches zero, so crossings are searched
/// as critical points of the trace and accepted when `det(psi - I)` is tiny there.
pub fn robbin_salamon_numeric(path: &SymplecticPath, total_time: f64, scan_step: f64) -> Result<RobbinSalamonReport> {
    if !(total_time > 0.0) || !(scan_step > 0.0) {
        return domain("total_time and scan_step must be positive");
    }
    let n = (total_time / scan_step).ceil().max(2.0) as usize;
    let h = total_time / n as f64;
    let ts: Vec<f64> = (0..=n).map(|i| (i as f64 * h).min(total_time)).collect();
    let dtrace = |t: f64| trace(&path.derivative_at(t));
    let dvals: Vec<f64> = ts.iter().map(|&t| dtrace(t)).collect();
    let near: Vec<bool> = ts.iter().map(|&t| det_minus_identity(&path.at(t)).abs() < CROSSING_TOL).collect();

    let mut report = RobbinSalamonReport { index_twice: 0, crossings: Vec::new(), degenerate: false };
    if near.windows(2).any(|w| w[0] && w[1]) {
        report.degenerate = true;
    }
    let edge = 1e-9 * total_time;
    let push = |t: f64, weight: i64, report: &mut RobbinSalamonReport| {
        let psi = path.at(t);
        match crossing_signature(&psi, &path.derivative_at(t)) {
            Some(sig) => {
                report.crossings.push(CrossingRecord { time: t, signature: sig });
                report.index_twice += weight * sig as i64;
            }
            None => {
                report.crossings.push(CrossingRecord { time: t, signature: 0 });
                report.degenerate = true;
            }
        }
    };
    if near[0] {
        push(0.0, 1, &mut report);
    }
    for i in 1..ts.len() {
        let (a, b) = (ts[i - 1], ts[i]);
        let (fa, fb) = (dvals[i - 1], dvals[i]);
        // trace has a local maximum where d/dt tr changes sign from + to -
        let bracket = (fa > 0.0 && fb <= 0.0) || (fa >= 0.0 && fb < 0.0);
        if !bracket {
            continue;
        }
        let (mut lo, mut hi) = (a, b);
        while hi - lo > 1e-12 * total_time.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if dtrace(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        if t <= edge || t >= total_time - edge {
            continue;
        }
        // a root on a grid node is bracketed from both sides
        if report.crossings.last().is_some_and(|x| t - x.time < 0.5 * h) {
            continue;
        }
        if det_minus_identity(&path.at(t)).abs() < CROSSING_TOL {
            push(t, 2, &mut report);
        }
    }
    if near[n] {
        push(total_time, 1, &mut report);
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditEntry {
    pub orbit: CollisionOrbit,
    pub cover: u32,
    pub result: IndexResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusBound {
    /// Rotation numbers sampled on the S' and S tori of the level.
    pub min_rotation: ExtReal,
    pub max_rotation: ExtReal,
    pub samples: usize,
    /// `R > 1` forces `k > l` for every `T_{k,l}` family crossing the level.
    pub forces_k_greater_l: bool,
    /// Index lower bound `2k - 1 >= 5` for contractible torus orbits; conditional.
    pub index_lower_bound: i64,
    pub note: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityAudit {
    pub c: f64,
    pub max_cover: u32,
    pub entries: Vec<AuditEntry>,
    pub min_index: i64,
    pub argmin: Vec<(CollisionOrbit, u32)>,
    /// Resonant covers excluded from the minimum.
    pub excluded: Vec<AuditEntry>,
    pub torus: TorusBound,
}

/// Indices of all evenly covered collision orbits with cover `<= max_cover` on the level `c < c_J`.
pub fn convexity_audit(p: &ProblemParams, c: f64, max_cover: u32, torus_samples: usize) -> Result<ConvexityAudit> {
    check_below_cj(p, c)?;
    let jobs: Vec<(CollisionOrbit, u32)> = CollisionOrbit::ALL
        .iter()
        .flat_map(|&o| (2..=max_cover).step_by(2).map(move |k| (o, k)))
        .collect();
    let entries: Vec<AuditEntry> = jobs
        .par_iter()
        .map(|&(orbit, cover)| Ok(AuditEntry { orbit, cover, result: cz(p, c, cover, orbit)? }))
        .collect::<Result<_>>()?;
    let min_index = entries.iter().filter_map(|e| e.result.index()).min().unwrap_or(i64::MAX);
    let argmin = entries
        .iter()
        .filter(|e| e.result.index() == Some(min_index))
        .map(|e| (e.orbit, e.cover))
        .collect();
    let excluded = entries.iter().filter(|e| e.result.index().is_none()).copied().collect();

    let mut rots = Vec::new();
    for region in [Region::SPrime, Region::S] {
        if let Some(iv) = region_g_interval(p, region, c) {
            for i in 1..=torus_samples {
                let g = iv.lo + iv.len() * i as f64 / (torus_samples + 1) as f64;
                if let Ok(r) = rotation_finite(p, g, c) {
                    rots.push(r);
                }
            }
        }
    }
    let min_r = rots.iter().copied().fold(f64::INFINITY, f64::min);
    let max_r = rots.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let torus = TorusBound {
        min_rotation: if rots.is_empty() { ExtReal::Infinity } else { ExtReal::Finite(min_r) },
        max_rotation: if rots.is_empty() { ExtReal::Zero } else { ExtReal::Finite(max_r) },
        samples: rots.len(),
        forces_k_greater_l: rots.iter().all(|&r| r > 1.0),
        index_lower_bound: 5,
        note: "relies on the Morse-Bott nondegeneracy of torus families",
    };
    Ok(ConvexityAudit { c, max_cover, entries, min_index, argmin, excluded, torus })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(mu: f64) -> ProblemParams {
        ProblemParams::new(mu).unwrap()
    }

    #[test]
    fn path_starts_at_identity_and_is_symplectic() {
        let path = linearized_path(&params(0.25), -3.0, CollisionOrbit::ExteriorMoon).unwrap();
        assert_eq!(path.at(0.0), [[1.0, 0.0], [0.0, 1.0]]);
        for t in [0.1, 0.77, 3.3, 12.0] {
            assert!((det(&path.at(t)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn returns_to_identity_at_period_hint() {
        let path = linearized_path(&params(0.5), -3.0, CollisionOrbit::Interior).unwrap();
        for j in 1..5 {
            let m = path.at(j as f64 * path.period_hint);
            assert!(det_minus_identity(&m).abs() < 1e-12);
        }
        assert!((path.period_hint - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn reference_indices() {
        let p = params(0.5);
        assert_eq!(cz_interior(&p, -3.0, 2).unwrap(), IndexResult::Nondegenerate { index: 5 });
        assert_eq!(
            cz_exterior(&p, -3.0, 2, CollisionOrbit::ExteriorEarth).unwrap(),
            IndexResult::Nondegenerate { index: 3 }
        );
        assert!(cz_interior(&p, -3.0, 3).is_err());
        assert!(cz_interior(&p, -1.5, 2).is_err());
    }

    #[test]
    fn resonance_is_degenerate() {
        let p = params(0.5);
        let c = crate::rotation::critical_rotation_inverse(&p, CriticalKind::Interior, 1.5).unwrap();
        match cz_interior(&p, c, 2).unwrap() {
            IndexResult::Degenerate { resonance } => assert!((resonance - 3.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn oracle_matches_formula() {
        let p = params(0.25);
        for orbit in CollisionOrbit::ALL {
            for cover in [2, 4, 6] {
                let c = -3.3;
                let path = linearized_path(&p, c, orbit).unwrap();
                let t = cover_time(&p, c, cover, orbit).unwrap();
                let rep = robbin_salamon_numeric(&path, t, path.period_hint / 40.0).unwrap();
                let formula = cz(&p, c, cover, orbit).unwrap().index().unwrap();
                assert!(!rep.degenerate);
                assert_eq!(rep.index_twice, 2 * formula, "{orbit:?} {cover}");
                assert!(rep.crossings.iter().all(|x| x.signature == 2));
            }
        }
    }

    #[test]
    fn numeric_derivative_path() {
        let p = params(0.5);
        let analytic = linearized_path(&p, -3.0, CollisionOrbit::Interior).unwrap();
        let hint = analytic.period_hint;
        let numeric = SymplecticPath::new(move |t| analytic.at(t), None, hint);
        let rep = robbin_salamon_numeric(&numeric, 2.5 * hint, hint / 30.0).unwrap();
        assert_eq!(rep.index_twice, 2 * 5);
    }

    #[test]
    fn identity_path_is_degenerate() {
        let path = SymplecticPath::new(|_| [[1.0, 0.0], [0.0, 1.0]], None, 1.0);
        let rep = robbin_salamon_numeric(&path, 1.0, 0.01).unwrap();
        assert!(rep.degenerate);
    }

    #[test]
    fn negative_rotation_gives_negative_signatures() {
        let path = SymplecticPath::new(
            |t: f64| {
                let (s, c) = t.sin_cos();
                [[c, -s], [s, c]]
            },
            None,
            2.0 * PI,
        );
        let rep = robbin_salamon_numeric(&path, 3.0 * PI, 0.05).unwrap();
        assert!(rep.crossings.iter().all(|x| x.signature == -2));
        assert_eq!(rep.index_twice, -2 - 4);
    }

    #[test]
    fn audit_symmetric() {
        let a = convexity_audit(&params(0.5), -3.0, 20, 20).unwrap();
        assert_eq!(a.min_index, 3);
        assert!(a.argmin.contains(&(CollisionOrbit::ExteriorEarth, 2)));
        assert!(a.torus.forces_k_greater_l);
    }
}
