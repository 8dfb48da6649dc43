//! The acceptance checks, shared by the `verify` command and the test suite.
//!
//! Each check is deterministic given the level and seed. Timings are kept out
//! of the serialized report so that it is byte-stable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::time::{Duration, Instant};

use crate::contact::{minimum_at_zero_check, transversality_audit};
use crate::dynamics::{empirical_rotation, integrate, sample_state};
use crate::elliptic::{complete_e, complete_k, complete_k_series, SERIES_TERMS};
use crate::error::Result;
use crate::extended::ExtReal;
use crate::index::{
    convexity_audit, cover_time, cz, linearized_path, robbin_salamon_numeric, CollisionOrbit,
};
use crate::periods::{
    critical_orbit_periods, eta_period_branch, period_closed_form, period_oracle, Axis, CriticalKind,
    EtaBranch,
};
use crate::problem::{
    classify, region_g_interval, Component, EnergyMomentum, ProblemParams, Region, RegionTag, DELTA_CURVE,
};
use crate::rotation::{
    critical_rotation, critical_rotation_finite, critical_rotation_inverse, exterior_bound_check,
    rotation_number, trace_torus_family, verify_monotonicity, Trend,
};

pub const SCHEMA: u32 = 1;
pub const MASSES: [f64; 3] = [0.1, 0.25, 0.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    fn pick(self, quick: usize, full: usize) -> usize {
        match self {
            Level::Quick => quick,
            Level::Full => full,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub summary: String,
    pub metrics: BTreeMap<String, f64>,
    #[serde(skip)]
    pub elapsed: Duration,
    /// Wall-clock budget at the full level.
    #[serde(skip)]
    pub budget: Option<Duration>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub level: Level,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

pub const CHECK_COUNT: u32 = 11;

pub fn check_name(id: u32) -> &'static str {
    match id {
        1 => "elliptic-cross-validation",
        2 => "period-oracle",
        3 => "boundary-consistency",
        4 => "critical-limits-monotonicity",
        5 => "exterior-bound",
        6 => "sprime-monotonicity",
        7 => "robbin-salamon-oracle",
        8 => "convexity-audit",
        9 => "dynamics-oracle",
        10 => "contact-type",
        11 => "family-tracing",
        _ => "unknown",
    }
}

fn budget(id: u32) -> Option<Duration> {
    match id {
        1 => Some(Duration::from_secs(1)),
        2 => Some(Duration::from_secs(30)),
        9 => Some(Duration::from_secs(120)),
        _ => None,
    }
}

struct Outcome {
    passed: bool,
    summary: String,
    metrics: BTreeMap<String, f64>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { passed: true, summary: String::new(), metrics: BTreeMap::new() }
    }

    fn metric(&mut self, key: impl Into<String>, v: f64) {
        self.metrics.insert(key.into(), v);
    }

    fn require(&mut self, ok: bool, what: impl AsRef<str>) {
        if !ok {
            self.passed = false;
            if !self.summary.is_empty() {
                self.summary.push_str("; ");
            }
            self.summary.push_str(what.as_ref());
        }
    }
}

pub fn run_check(id: u32, level: Level, seed: u64) -> CheckResult {
    let start = Instant::now();
    let run = match id {
        1 => check_elliptic(level),
        2 => check_period_oracle(level, seed),
        3 => check_boundaries(level),
        4 => check_critical_limits(level),
        5 => check_exterior_bound(level),
        6 => check_sprime(level),
        7 => check_robbin_salamon(level),
        8 => check_convexity(level),
        9 => check_dynamics(level, seed),
        10 => check_contact(level, seed),
        11 => check_family(level),
        _ => Err(crate::Error::Domain(format!("no check with id {id}"))),
    };
    let mut out = run.unwrap_or_else(|e| {
        let mut o = Outcome::new();
        o.require(false, format!("error: {e}"));
        o
    });
    if out.passed && out.summary.is_empty() {
        out.summary.push_str("ok");
    }
    CheckResult {
        id,
        name: check_name(id),
        passed: out.passed,
        summary: out.summary,
        metrics: out.metrics,
        elapsed: start.elapsed(),
        budget: budget(id),
    }
}

pub fn run_all(level: Level, seed: u64) -> VerifyReport {
    let checks: Vec<CheckResult> = (1..=CHECK_COUNT).map(|id| run_check(id, level, seed)).collect();
    VerifyReport { schema: SCHEMA, level, seed, passed: checks.iter().all(|c| c.passed), checks }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// `hi - 10^s` for `s` log-spaced from `s_hi` down to `s_lo`, increasing in value.
fn approach_grid(hi: f64, s_hi: f64, s_lo: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| hi - 10f64.powf(s_hi + (s_lo - s_hi) * i as f64 / (n - 1) as f64))
        .collect()
}

fn interior_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| lo + (hi - lo) * i as f64 / (n + 1) as f64).collect()
}

fn check_elliptic(_level: Level) -> Result<Outcome> {
    let mut o = Outcome::new();
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let m = 0.9 * i as f64 / 999.0;
        let d = (complete_k(m)? - complete_k_series(m, SERIES_TERMS)?).abs();
        worst = worst.max(d);
    }
    o.metric("agm_series_max_abs", worst);
    o.require(worst < 1e-12, format!("AGM and series differ by {worst:e}"));
    let k0 = (complete_k(0.0)? - FRAC_PI_2).abs();
    o.metric("k0_error", k0);
    o.require(k0 <= f64::EPSILON * FRAC_PI_2, format!("K(0) off by {k0:e}"));
    let mut legendre: f64 = 0.0;
    for i in 1..100 {
        let m = i as f64 / 100.0;
        let (k, e) = (complete_k(m)?, complete_e(m)?);
        let (kp, ep) = (complete_k(1.0 - m)?, complete_e(1.0 - m)?);
        legendre = legendre.max((k * ep + e * kp - k * kp - FRAC_PI_2).abs());
    }
    o.metric("legendre_max_abs", legendre);
    o.require(legendre < 1e-12, format!("Legendre relation off by {legendre:e}"));
    Ok(o)
}

/// A random regular point of `region`, away from the bounding curves.
fn random_point(rng: &mut ChaCha8Rng, p: &ProblemParams, region: Region, margin: f64) -> Option<(f64, f64)> {
    let c_lo = match region {
        Region::SPrime | Region::S => -6.0,
        Region::L => p.c_jacobi,
        Region::P => p.c_e,
    };
    let c_hi = -0.05;
    if c_lo >= c_hi {
        return None;
    }
    for _ in 0..10_000 {
        let c = c_lo + (c_hi - c_lo) * rng.gen::<f64>();
        let Some(iv) = region_g_interval(p, region, c) else { continue };
        let g = iv.lo + iv.len() * (margin + (1.0 - 2.0 * margin) * rng.gen::<f64>());
        let em = EnergyMomentum::new(*p, g, c).ok()?;
        if classify(&em, DELTA_CURVE) == RegionTag::Regular(region) {
            return Some((g, c));
        }
    }
    None
}

fn stream_seed(seed: u64, mu: f64, region: Region) -> u64 {
    let r = Region::ALL.iter().position(|&x| x == region).unwrap() as u64;
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (((mu * 1000.0) as u64) << 8) ^ r
}

fn check_period_oracle(level: Level, seed: u64) -> Result<Outcome> {
    let mut o = Outcome::new();
    let n = level.pick(40, 200);
    let mut cases = 0usize;
    for mu in MASSES {
        let p = ProblemParams::new(mu)?;
        for region in Region::ALL {
            if region == Region::SPrime && p.is_symmetric() {
                continue;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, mu, region));
            let pts: Vec<(f64, f64)> = (0..n).filter_map(|_| random_point(&mut rng, &p, region, 0.02)).collect();
            o.require(pts.len() == n, format!("mu={mu} {}: only {} points", region.name(), pts.len()));
            let components: &[Component] = if region == Region::S {
                &[Component::Earth, Component::Moon]
            } else {
                &[Component::Whole]
            };
            for &comp in components {
                let errs: Vec<Result<f64>> = pts
                    .par_iter()
                    .map(|&(g, c)| {
                        let em = EnergyMomentum::new(p, g, c)?;
                        let cf = period_closed_form(&em, comp)?;
                        let ex = rel(cf.tau_xi.to_f64(), period_oracle(&em, Axis::Xi, comp)?);
                        let ee = rel(cf.tau_eta.to_f64(), period_oracle(&em, Axis::Eta, comp)?);
                        Ok(ex.max(ee))
                    })
                    .collect();
                let mut worst: f64 = 0.0;
                for e in errs {
                    worst = worst.max(e?);
                    cases += 1;
                }
                let key = format!("mu{mu}_{}_{comp:?}_max_rel", region.name());
                o.metric(key, worst);
                o.require(worst < 1e-8, format!("mu={mu} {} {comp:?}: relative error {worst:e}", region.name()));
            }
        }
    }
    o.metric("cases", cases as f64);
    Ok(o)
}

fn check_boundaries(level: Level) -> Result<Outcome> {
    let mut o = Outcome::new();
    let n = level.pick(100, 100);
    let mut worst_l2: f64 = 0.0;
    let mut worst_l4: f64 = 0.0;
    let mut count_l4 = 0;
    for mu in MASSES {
        let p = ProblemParams::new(mu)?;
        for c in interior_grid(-10.0, p.c_h.min(-1e-3), n) {
            let em = EnergyMomentum::new(p, p.l2_g(c), c)?;
            let r1 = eta_period_branch(&em, EtaBranch::R1)?.to_f64();
            let r2 = eta_period_branch(&em, EtaBranch::R2)?.to_f64();
            worst_l2 = worst_l2.max(rel(r1, r2));
        }
        if p.c_h < 0.0 {
            let a2 = p.asym() * p.asym();
            for c in interior_grid(p.c_h, 0.0, n) {
                let mut g = a2 / c;
                let mut em = EnergyMomentum::new(p, g, c)?;
                while em.eta_disc() < 0.0 {
                    g = g.next_up();
                    em = EnergyMomentum::new(p, g, c)?;
                }
                let r3 = eta_period_branch(&em, EtaBranch::R3)?.to_f64();
                let r4 = eta_period_branch(&em, EtaBranch::R4)?.to_f64();
                worst_l4 = worst_l4.max(rel(r3, r4));
                count_l4 += 1;
            }
        }
    }
    o.metric("across_l2_max_rel", worst_l2);
    o.metric("across_gc_max_rel", worst_l4);
    o.metric("gc_points", count_l4 as f64);
    o.require(worst_l2 < 1e-10, format!("l2 branches differ by {worst_l2:e}"));
    o.require(worst_l4 < 1e-10, format!("gc branches differ by {worst_l4:e}"));
    Ok(o)
}

fn check_critical_limits(level: Level) -> Result<Outcome> {
    let mut o = Outcome::new();
    let n = level.pick(1000, 1000);
    for mu in MASSES {
        let p = ProblemParams::new(mu)?;
        let r_int = critical_rotation_finite(&p, -1e6, CriticalKind::Interior)?;
        let r_ell = critical_rotation_finite(&p, -1e-6, CriticalKind::Elliptic)?;
        let r_dou = critical_rotation_finite(&p, p.c_e - 1e-6, CriticalKind::Double)?;
        o.metric(format!("mu{mu}_int_limit"), r_int);
        o.metric(format!("mu{mu}_ell_limit"), r_ell);
        o.metric(format!("mu{mu}_dou_limit"), r_dou);
        o.require((r_int - 1.0).abs() < 1e-3, format!("mu={mu}: R_int(-1e6) = {r_int}"));
        o.require((r_ell - 1.0).abs() < 1e-3, format!("mu={mu}: R_ell(-1e-6) = {r_ell}"));
        o.require(r_dou < 1e-2, format!("mu={mu}: R_dou(c_e - 1e-6) = {r_dou}"));

        let grids: [(CriticalKind, Vec<f64>, Trend); 5] = [
            (CriticalKind::Interior, approach_grid(p.c_jacobi, 3.0, -6.0, n), Trend::Increasing),
            (CriticalKind::ExteriorEarth, approach_grid(0.0, 3.0, -6.0, n), Trend::Increasing),
            (CriticalKind::ExteriorMoon, approach_grid(p.c_h, 3.0, -6.0, n), Trend::Increasing),
            (CriticalKind::Double, interior_grid(p.c_jacobi, p.c_e, n), Trend::Decreasing),
            (CriticalKind::Elliptic, interior_grid(p.c_e, 0.0, n), Trend::Increasing),
        ];
        for (kind, grid, trend) in grids {
            let rep = verify_monotonicity(|c| critical_rotation_finite(&p, c, kind), &grid, trend);
            o.metric(format!("mu{mu}_{}_violations", kind.name()), rep.violations.len() as f64);
            o.require(
                rep.holds(),
                format!(
                    "mu={mu} {}: {} violations, {} failures",
                    kind.name(),
                    rep.violations.len(),
                    rep.failures.len()
                ),
            );
        }

        let mut sentinels_ok = true;
        for c in interior_grid(p.c_jacobi, p.c_h, 20) {
            sentinels_ok &= critical_rotation(&p, c, CriticalKind::Hyperbolic)? == ExtReal::Infinity;
        }
        if p.c_h < 0.0 {
            for c in interior_grid(p.c_h, 0.0, 20) {
                sentinels_ok &= critical_rotation(&p, c, CriticalKind::ExteriorMoon)? == ExtReal::Infinity;
            }
        }
        for c in interior_grid(p.c_e, 0.0, 20) {
            sentinels_ok &= critical_rotation(&p, c, CriticalKind::Double)? == ExtReal::Zero;
        }
        o.require(sentinels_ok, format!("mu={mu}: sentinel values are not exact"));
    }
    Ok(o)
}

fn check_exterior_bound(level: Level) -> Result<Outcome> {
    let mut o = Outcome::new();
    let n = level.pick(1000, 1000);
    for mu in MASSES {
        let p = ProblemParams::new(mu)?;
        let grid = approach_grid(p.c_jacobi, (1e3 + p.c_jacobi).log10(), -6.0, n);
        let rep = exterior_bound_check(&p, &grid)?;
        o.metric(format!("mu{mu}_max_earth"), rep.max_earth);
        o.metric(format!("mu{mu}_max_moon"), rep.max_moon);
        o.require(rep.max() < 2.0, format!("mu={mu}: max R_ext = {}", rep.max()));
        if p.is_symmetric() {
            let mut gap: f64 = 0.0;
            for &c in &grid {
                let e = critical_rotation_finite(&p, c, CriticalKind::ExteriorEarth)?;
                let m = critical_rotation_finite(&p, c, CriticalKind::ExteriorMoon)?;
                gap = gap.max(rel(e, m));
            }
            o.metric("mu0.5_component_gap", gap);
            o.require(gap < 1e-14, format!("symmetric components differ by {gap:e}"));
        } else {
            o.metric(format!("mu{mu}_dominance_violations"), rep.dominance_violations as f64);
            o.require(
                rep.dominance_violations == 0,
                format!("mu={mu}: {} points with R_ext^E >= R_ext^M", rep.dominance_violations),
            );
        }
    }
    Ok(o)
}

/// Energies strictly below `c_J`, log-spaced in the distance to it.
fn energies_below_cj(p: &ProblemParams, n: usize, s_lo: f64, s_hi: f64) -> Vec<f64> {
    (0..n)
        .map(|i| p.c_jacobi - 10f64.powf(s_lo + (s_hi - s_lo) * i as f64 / (n - 1).max(1) as f64))
        .collect()
}

fn check_sprime(level: Level) -> Result<Outcome> {
    let mut o = Outcome::new();
    let p = ProblemParams::new(0.25)?;
    let n = level.pick(200, 1000);
    let mut checked = 0;
    for c in energies_below_cj(&p, 20, -3.0, 1.0) {
        let iv = region_g_interval(&p, Region::SPrime, c).expect("S' is nonempty for mu < 1/2");
        let grid = interior_grid(iv.lo, iv.hi, n);
        let rep = verify_monotonicity(|g| crate::rotation::rotation_finite(&p, g, c), &grid, Trend::Decreasing);
        checked += 1;
        o.require(
            rep.holds(),
            format!("c={c}: {} violations, {} failures", rep.violations.len(), rep.failures.len()),
        );
    }
    o.metric("energies", checked as f64);
    o.metric("grid_points", n as f64);
    Ok(o)
}

/// Crossing counts closer than this to an integer are treated as resonant.
const RESONANCE_GAP: f64 = 1e-4;

fn near_resonance(p: &ProblemParams, c: f64) -> Result<bool> {
    for orbit in CollisionOrbit::ALL {
        for cover in (2..=10).step_by(2) {
            let x = crate::index::crossing_ratio(p, c, cover, orbit)?;
            if (x - x.round()).abs() < RESONANCE_GAP {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn check_robbin_salamon(level: Level) -> Result<Outcome> {
    let mut o = Outcome::new();
    let n = level.pick(8, 20);
    let mut cases = 0usize;
    let mut mismatches = 0usize;
    for mu in MASSES {
        let p = ProblemParams::new(mu)?;
        for mut c in energies_below_cj(&p, n, -2.0, 0.7) {
            let mut shifts = 0;
            while near_resonance(&p, c)? {
                shifts += 1;
                if shifts > 100 {
                    return Err(crate::Error::Domain(format!("no nonresonant energy near {c}")));
                }
                c -= 1e-3 * (p.c_jacobi - c);
            }
            let jobs: Vec<(CollisionOrbit, u32)> = CollisionOrbit::ALL
                .iter()
                .flat_map(|&orb| (2..=10).step_by(2).map(move |k| (orb, k)))
                .collect();
            let results: Vec<Result<(CollisionOrbit, u32, i64, i64)>> = jobs
                .par_iter()
                .map(|&(orbit, cover)| {
                    let path = linearized_path(&p, c, orbit)?;
                    let t = cover_time(&p, c, cover, orbit)?;
                    let rep = robbin_salamon_numeric(&path, t, path.period_hint / 40.0)?;
                    let formula = cz(&p, c, cover, orbit)?.index().expect("away from resonance");
                    let numeric = if rep.degenerate { i64::MIN } else { rep.index_twice };
                    Ok((orbit, cover, numeric, 2 * formula))
                })
                .collect();
            let r_int = critical_rotation_finite(&p, c, CriticalKind::Interior)?;
            for r in results {
                let (orbit, cover, numeric, twice) = r?;
                cases += 1;
                if numeric != twice {
                    mismatches += 1;
                    o.require(false, format!("mu={mu} c={c} {} cover {cover}: {numeric} vs {twice}", orbit.name()));
                }
                if cover == 2 && orbit != CollisionOrbit::Interior {
                    o.require(numeric == 6, format!("mu={mu} c={c} {} cover 2 index is not 3", orbit.name()));
                }
                if cover == 2 && orbit == CollisionOrbit::Interior {
                    let k = (2.0 * r_int).floor() as i64 + 1;
                    o.require(numeric == 2 * (2 * k - 1), format!("mu={mu} c={c}: interior index is not 2k-1"));
                }
            }
        }
    }
    o.metric("cases", cases as f64);
    o.metric("mismatches", mismatches as f64);
    Ok(o)
}

fn check_convexity(level: Level) -> Result<Outcome> {
    let mut o = Outcome::new();
    let n = level.pick(10, 50);
    let mut excluded = 0usize;
    for mu in MASSES {
        let p = ProblemParams::new(mu)?;
        let levels = energies_below_cj(&p, n, -4.0, 3.0);
        let audits: Vec<Result<_>> = levels.par_iter().map(|&c| convexity_audit(&p, c, 20, 4)).collect();
        for (c, a) in levels.iter().zip(audits) {
            let a = a?;
            excluded += a.excluded.len();
            o.require(a.min_index == 3, format!("mu={mu} c={c}: minimum index {}", a.min_index));
        }
    }
    o.metric("levels", (3 * n) as f64);
    o.metric("resonant_excluded", excluded as f64);
    Ok(o)
}

fn check_dynamics(level: Level, seed: u64) -> Result<Outcome> {
    let mut o = Outcome::new();
    let per_region = level.pick(2, 6);
    let mut cases: Vec<(ProblemParams, f64, f64, Component)> = Vec::new();
    for (i, region) in Region::ALL.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, 1.0, *region));
        for j in 0..per_region {
            let mut p = ProblemParams::new(MASSES[(i + j) % 3])?;
            if *region == Region::SPrime && p.is_symmetric() {
                p = ProblemParams::new(0.25)?;
            }
            let Some((g, c)) = random_point(&mut rng, &p, *region, 0.2) else {
                o.require(false, format!("no point in {}", region.name()));
                continue;
            };
            let comp = match (*region, j % 2) {
                (Region::S, 1) => Component::Moon,
                (Region::S, _) => Component::Earth,
                _ => Component::Whole,
            };
            cases.push((p, g, c, comp));
        }
    }
    let results: Vec<Result<[f64; 5]>> = cases
        .par_iter()
        .map(|&(p, g, c, comp)| {
            let em = EnergyMomentum::new(p, g, c)?;
            let pp = period_closed_form(&em, comp)?;
            let (tx, te) = (pp.tau_xi.to_f64(), pp.tau_eta.to_f64());
            let s0 = sample_state(&em, comp)?;
            let tr = integrate(&p, c, &s0, 10.6 * tx.max(te), 1e-12)?;
            let est = empirical_rotation(&tr)?;
            let r = rotation_number(&em)?.to_f64();
            Ok([
                tr.energy_drift,
                tr.integral_drift,
                rel(est.xi_period.unwrap(), tx),
                rel(est.eta_period.unwrap(), te),
                rel(est.value.to_f64(), r),
            ])
        })
        .collect();
    let mut worst = [0.0f64; 5];
    for ((p, g, c, comp), r) in cases.iter().zip(results) {
        match r {
            Ok(v) => (0..5).for_each(|k| worst[k] = worst[k].max(v[k])),
            Err(e) => o.require(false, format!("mu={} g={g} c={c} {comp:?}: {e}", p.mu)),
        }
    }
    let names = ["energy_drift", "integral_drift", "xi_period_rel", "eta_period_rel", "rotation_rel"];
    for (k, name) in names.iter().enumerate() {
        o.metric(*name, worst[k]);
    }
    o.metric("trajectories", cases.len() as f64);
    o.require(worst[0] < 1e-9 && worst[1] < 1e-9, format!("drift K {:e}, G {:e}", worst[0], worst[1]));
    o.require(worst[2] < 1e-6 && worst[3] < 1e-6, format!("period error {:e}, {:e}", worst[2], worst[3]));
    o.require(worst[4] < 1e-3, format!("rotation error {:e}", worst[4]));
    Ok(o)
}

fn check_contact(level: Level, seed: u64) -> Result<Outcome> {
    let mut o = Outcome::new();
    let samples = level.pick(2000, 10_000);
    let theta_grid = level.pick(2001, 10_001);
    for mu in MASSES {
        let p = ProblemParams::new(mu)?;
        let mut bad = 0;
        for i in 0..100 {
            let r = (i as f64 + 0.5) / 100.0;
            let rep = minimum_at_zero_check(&p, r, theta_grid)?;
            if !rep.argmin_is_zero {
                bad += 1;
            }
        }
        o.require(bad == 0, format!("mu={mu}: {bad} radii with argmin away from 0"));
        let levels = energies_below_cj(&p, 10, -3.0, 1.0);
        let audits: Vec<Result<_>> =
            levels.par_iter().enumerate().map(|(k, &c)| transversality_audit(&p, c, samples, seed + k as u64)).collect();
        let mut min_val = f64::INFINITY;
        let mut max_r: f64 = 0.0;
        for a in audits {
            let a = a?;
            min_val = min_val.min(a.min_r_dvdr);
            max_r = max_r.max(a.max_r / a.l_radius);
            o.require(a.positive, format!("mu={mu} c={}: r dV/dr reaches {}", a.c, a.min_r_dvdr));
            o.require(a.contained && a.max_r < a.l_radius, format!("mu={mu} c={}: sample beyond l", a.c));
        }
        o.metric(format!("mu{mu}_min_r_dvdr"), min_val);
        o.metric(format!("mu{mu}_max_r_over_l"), max_r);
    }
    Ok(o)
}

fn check_family(level: Level) -> Result<Outcome> {
    let mut o = Outcome::new();
    let p = ProblemParams::new(0.5)?;
    let steps = level.pick(40, 200);
    let c_end = critical_rotation_inverse(&p, CriticalKind::Interior, 1.5)
        .ok_or_else(|| crate::Error::Domain("no interior endpoint".into()))?;
    let fam = trace_torus_family(&p, 3, 2, c_end + 1e-3, -0.05, steps, None)?;
    let low = fam
        .endpoints
        .iter()
        .min_by(|a, b| a.c.total_cmp(&b.c))
        .ok_or_else(|| crate::Error::Domain("family has no endpoint".into()))?;
    let r = critical_rotation_finite(&p, low.c, low.kind)?;
    o.metric("endpoint_c", low.c);
    o.metric("endpoint_residual", (r - 1.5).abs());
    o.require(low.kind == CriticalKind::Interior, format!("lowest endpoint is {}", low.kind.name()));
    o.require((r - 1.5).abs() < 1e-8, format!("R_int at endpoint is {r}"));
    let per = critical_orbit_periods(&p, low.c, low.kind)?;
    let ratio = per.tau_eta.to_f64() / per.tau_xi.to_f64();
    o.require((ratio - 1.5).abs() < 1e-8, format!("endpoint period ratio {ratio}"));
    let worst = fam.samples.iter().map(|s| s.residual.abs()).fold(0.0f64, f64::max);
    o.metric("samples", fam.samples.len() as f64);
    o.metric("max_residual", worst);
    o.require(!fam.samples.is_empty(), "family has no samples");
    o.require(worst < 1e-10, format!("rotation residual {worst:e}"));
    Ok(o)
}
