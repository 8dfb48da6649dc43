//! The regularized flow in doubly covered elliptic coordinates.
//!
//! With `xi = cosh(lambda)` and `eta = cos(nu)` the Hamiltonian
//! `K = K_lambda + K_nu` is regular at both collisions. Orbits of `K` on its zero
//! level are the orbits of `H` on the level `c`, reparametrized by `tau`.

use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;

use crate::error::{domain, Error, Result};
use crate::extended::ExtReal;
use crate::ode::{self, Tolerances};
use crate::problem::{oscillation_ranges, Component, EnergyMomentum, ProblemParams};

/// Largest accepted `|K|` along a trajectory.
pub const DRIFT_BOUND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseState {
    pub lambda: f64,
    pub nu: f64,
    pub p_lambda: f64,
    pub p_nu: f64,
}

impl PhaseState {
    fn to_array(self) -> [f64; 4] {
        [self.lambda, self.nu, self.p_lambda, self.p_nu]
    }

    fn from_array(y: &[f64; 4]) -> Self {
        Self { lambda: y[0], nu: y[1], p_lambda: y[2], p_nu: y[3] }
    }

    /// Same state with `nu` wrapped to `[-pi, pi]`.
    pub fn wrapped(self) -> Self {
        let nu = (self.nu + PI).rem_euclid(2.0 * PI) - PI;
        Self { nu, ..self }
    }
}

pub fn k_lambda(c: f64, s: &PhaseState) -> f64 {
    let ch = s.lambda.cosh();
    2.0 * s.p_lambda * s.p_lambda - 2.0 * ch - c * ch * ch
}

pub fn k_nu(p: &ProblemParams, c: f64, s: &PhaseState) -> f64 {
    let cn = s.nu.cos();
    2.0 * s.p_nu * s.p_nu + 2.0 * p.asym() * cn + c * cn * cn
}

/// `K = (H - c)(cosh^2 lambda - cos^2 nu)`.
pub fn regularized_energy(p: &ProblemParams, c: f64, s: &PhaseState) -> f64 {
    k_lambda(c, s) + k_nu(p, c, s)
}

/// The first integral `G = -(H_lambda cos^2 nu + H_nu cosh^2 lambda) / (cosh^2 lambda - cos^2 nu)`.
pub fn first_integral(p: &ProblemParams, s: &PhaseState) -> f64 {
    let ch2 = s.lambda.cosh().powi(2);
    let cn = s.nu.cos();
    let h_l = 2.0 * s.p_lambda * s.p_lambda - 2.0 * s.lambda.cosh();
    let h_n = 2.0 * s.p_nu * s.p_nu + 2.0 * p.asym() * cn;
    -(h_l * cn * cn + h_n * ch2) / (ch2 - cn * cn)
}

/// `H` recovered from the doubled coordinates.
pub fn hamiltonian(p: &ProblemParams, s: &PhaseState) -> f64 {
    let ch = s.lambda.cosh();
    let cn = s.nu.cos();
    let h_l = 2.0 * s.p_lambda * s.p_lambda - 2.0 * ch;
    let h_n = 2.0 * s.p_nu * s.p_nu + 2.0 * p.asym() * cn;
    (h_l + h_n) / (ch * ch - cn * cn)
}

pub fn vector_field(p: &ProblemParams, c: f64, s: &PhaseState) -> PhaseState {
    let a = p.asym();
    PhaseState {
        lambda: 4.0 * s.p_lambda,
        nu: 4.0 * s.p_nu,
        p_lambda: 2.0 * s.lambda.sinh() * (1.0 + c * s.lambda.cosh()),
        p_nu: 2.0 * s.nu.sin() * (a + c * s.nu.cos()),
    }
}

/// On-shell state at the midpoint of the oscillation ranges of a regular point.
pub fn sample_state(em: &EnergyMomentum, component: Component) -> Result<PhaseState> {
    let r = oscillation_ranges(em, component)?;
    let xi = r.xi.midpoint();
    let eta = r.eta.midpoint();
    // p_lambda^2 = (c xi^2 + 2 xi + g)/2 and p_nu^2 = -(c eta^2 + 2(1-2mu) eta + g)/2 on K = 0
    let pl2 = 0.5 * em.xi_quadratic(xi);
    let pn2 = -0.5 * em.eta_quadratic(eta);
    if !(pl2 > 0.0 && pn2 > 0.0) {
        return domain("midpoint of the oscillation ranges is not an interior point");
    }
    Ok(PhaseState { lambda: xi.acosh(), nu: eta.acos(), p_lambda: pl2.sqrt(), p_nu: -pn2.sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cartesian {
    pub q1: f64,
    pub q2: f64,
    /// `None` at a collision, where the chart is singular.
    pub momentum: Option<(f64, f64)>,
}

pub fn to_cartesian(s: &PhaseState) -> Cartesian {
    let (sl, cl) = (s.lambda.sinh(), s.lambda.cosh());
    let (sn, cn) = s.nu.sin_cos();
    let q1 = 0.5 * cl * cn;
    let q2 = 0.5 * sl * sn;
    // columns d q / d lambda and d q / d nu
    let j = [[0.5 * sl * cn, -0.5 * cl * sn], [0.5 * cl * sn, 0.5 * sl * cn]];
    let d = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let momentum = (d.abs() > 1e-12).then(|| {
        // J^T p = (p_lambda, p_nu)
        let p1 = (j[1][1] * s.p_lambda - j[1][0] * s.p_nu) / d;
        let p2 = (-j[0][1] * s.p_lambda + j[0][0] * s.p_nu) / d;
        (p1, p2)
    });
    Cartesian { q1, q2, momentum }
}

/// `H(q, p) = |p|^2/2 - (1-mu)/|q - E| - mu/|q - M|`.
pub fn cartesian_hamiltonian(p: &ProblemParams, q: (f64, f64), mom: (f64, f64)) -> f64 {
    let re = (q.0 + 0.5).hypot(q.1);
    let rm = (q.0 - 0.5).hypot(q.1);
    0.5 * (mom.0 * mom.0 + mom.1 * mom.1) - (1.0 - p.mu) / re - p.mu / rm
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<(f64, PhaseState)>,
    /// Maximum `|K|` over the samples.
    pub energy_drift: f64,
    /// Maximum change of `K_lambda` (the value of `G` on `K = 0`).
    pub integral_drift: f64,
    /// Turning points of `xi = cosh(lambda)`.
    pub xi_turns: Vec<f64>,
    /// Turning points of `eta = cos(nu)`.
    pub eta_turns: Vec<f64>,
}

pub fn integrate(p: &ProblemParams, c: f64, state0: &PhaseState, tau_end: f64, tolerance: f64) -> Result<Trajectory> {
    let k0 = regularized_energy(p, c, state0);
    if k0.abs() > DRIFT_BOUND {
        return domain(format!("initial state is off shell, K = {k0:e}"));
    }
    if !(tau_end >= 0.0) {
        return domain("tau_end must be nonnegative");
    }
    let f = |_t: f64, y: &[f64; 4]| vector_field(p, c, &PhaseState::from_array(y)).to_array();
    let xi_dot: &dyn Fn(&[f64; 4]) -> f64 = &|y| y[2] * y[0].sinh();
    let eta_dot: &dyn Fn(&[f64; 4]) -> f64 = &|y| y[3] * y[1].sin();
    let sol = ode::integrate(f, 0.0, state0.to_array(), tau_end, Tolerances::new(tolerance), &[xi_dot, eta_dot])?;
    let g0 = k_lambda(c, state0);
    let mut energy_drift: f64 = 0.0;
    let mut integral_drift: f64 = 0.0;
    let samples: Vec<(f64, PhaseState)> = sol
        .steps
        .iter()
        .map(|(t, y)| {
            let s = PhaseState::from_array(y);
            energy_drift = energy_drift.max(regularized_energy(p, c, &s).abs());
            integral_drift = integral_drift.max((k_lambda(c, &s) - g0).abs());
            (*t, s.wrapped())
        })
        .collect();
    if energy_drift > DRIFT_BOUND {
        return Err(Error::Integration(format!("energy drift {energy_drift:e} exceeds {DRIFT_BOUND:e}")));
    }
    let turns = |idx: usize| sol.events.iter().filter(|e| e.index == idx).map(|e| e.t).collect();
    Ok(Trajectory { samples, energy_drift, integral_drift, xi_turns: turns(0), eta_turns: turns(1) })
}

impl Trajectory {
    pub const CSV_HEADER: &'static str = "tau,lambda,nu,p_lambda,p_nu,q1,q2,K_residual";

    pub fn write_csv<W: Write>(&self, p: &ProblemParams, c: f64, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for (t, s) in &self.samples {
            let q = to_cartesian(s);
            let k = regularized_energy(p, c, s);
            writeln!(w, "{t},{},{},{},{},{},{},{k:e}", s.lambda, s.nu, s.p_lambda, s.p_nu, q.q1, q.q2)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalRotation {
    pub value: ExtReal,
    pub uncertainty: f64,
    /// Measured full oscillation periods, `None` when the coordinate does not oscillate.
    pub xi_period: Option<f64>,
    pub eta_period: Option<f64>,
    /// False for critical orbits on which one coordinate is frozen.
    pub torus: bool,
}

/// Full oscillation period from a run of turning points (two per oscillation).
fn period_from_turns(turns: &[f64]) -> Option<f64> {
    (turns.len() >= 2).then(|| 2.0 * (turns[turns.len() - 1] - turns[0]) / (turns.len() - 1) as f64)
}

/// Rotation number from the turning points of `xi` and `eta` along a trajectory.
pub fn empirical_rotation(traj: &Trajectory) -> Result<EmpiricalRotation> {
    let nx = traj.xi_turns.len();
    let ne = traj.eta_turns.len();
    if nx == 0 && ne >= 20 {
        return Ok(EmpiricalRotation {
            value: ExtReal::Infinity,
            uncertainty: 0.0,
            xi_period: None,
            eta_period: period_from_turns(&traj.eta_turns),
            torus: false,
        });
    }
    if nx < 21 || ne < 21 {
        return Err(Error::InsufficientData(format!(
            "need at least 10 oscillations of each coordinate, got {nx} and {ne} turning points"
        )));
    }
    let px = period_from_turns(&traj.xi_turns).unwrap();
    let pe = period_from_turns(&traj.eta_turns).unwrap();
    Ok(EmpiricalRotation {
        value: ExtReal::Finite(pe / px),
        uncertainty: 2.0 / (nx.min(ne) - 1) as f64,
        xi_period: Some(px),
        eta_period: Some(pe),
        torus: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periods::period_closed_form;

    fn params(mu: f64) -> ProblemParams {
        ProblemParams::new(mu).unwrap()
    }

    #[test]
    fn energy_reference() {
        let s = PhaseState { lambda: 0.0, nu: 0.0, p_lambda: 0.0, p_nu: 1.0 };
        assert_eq!(regularized_energy(&params(0.5), -3.0, &s), 0.0);
    }

    #[test]
    fn vector_field_is_symplectic_gradient() {
        let p = params(0.25);
        let c = -2.2;
        let s = PhaseState { lambda: 0.7, nu: 1.1, p_lambda: -0.3, p_nu: 0.45 };
        let v = vector_field(&p, c, &s);
        let h = 1e-6;
        let k = |s: PhaseState| regularized_energy(&p, c, &s);
        let d = |f: &dyn Fn(f64) -> PhaseState| (k(f(h)) - k(f(-h))) / (2.0 * h);
        assert!((v.lambda - d(&|e| PhaseState { p_lambda: s.p_lambda + e, ..s })).abs() < 1e-7);
        assert!((v.nu - d(&|e| PhaseState { p_nu: s.p_nu + e, ..s })).abs() < 1e-7);
        assert!((v.p_lambda + d(&|e| PhaseState { lambda: s.lambda + e, ..s })).abs() < 1e-7);
        assert!((v.p_nu + d(&|e| PhaseState { nu: s.nu + e, ..s })).abs() < 1e-7);
    }

    #[test]
    fn collision_orbits_are_invariant() {
        let p = params(0.25);
        let v = vector_field(&p, -3.0, &PhaseState { lambda: 0.0, nu: 0.4, p_lambda: 0.0, p_nu: 0.8 });
        assert_eq!((v.lambda, v.p_lambda), (0.0, 0.0));
        let v = vector_field(&p, -3.0, &PhaseState { lambda: 0.4, nu: PI, p_lambda: 0.2, p_nu: 0.0 });
        assert_eq!(v.nu, 0.0);
        assert!(v.p_nu.abs() < 1e-15);
    }

    #[test]
    fn sample_is_on_shell_with_given_integral() {
        let e = EnergyMomentum::new(params(0.5), 2.0, -3.0).unwrap();
        let s = sample_state(&e, Component::Earth).unwrap();
        assert!(regularized_energy(&e.params, e.c, &s).abs() < 1e-12);
        assert!((first_integral(&e.params, &s) - 2.0).abs() < 1e-10);
        assert!((hamiltonian(&e.params, &s) + 3.0).abs() < 1e-10);
        let m = sample_state(&e, Component::Moon).unwrap();
        assert!(m.nu.cos() > 6f64.sqrt() / 3.0);
    }

    #[test]
    fn cartesian_primaries_and_energy() {
        let moon = to_cartesian(&PhaseState { lambda: 0.0, nu: 0.0, p_lambda: 0.0, p_nu: 0.0 });
        assert_eq!((moon.q1, moon.q2), (0.5, 0.0));
        assert!(moon.momentum.is_none());
        let earth = to_cartesian(&PhaseState { lambda: 0.0, nu: PI, p_lambda: 0.0, p_nu: 0.0 });
        assert!((earth.q1 + 0.5).abs() < 1e-16);
        let e = EnergyMomentum::new(params(0.25), -0.1, -1.2).unwrap();
        let s = sample_state(&e, Component::Whole).unwrap();
        let q = to_cartesian(&s);
        let h = cartesian_hamiltonian(&e.params, (q.q1, q.q2), q.momentum.unwrap());
        assert!((h + 1.2).abs() < 1e-9);
    }

    #[test]
    fn interior_orbit_stays_on_segment() {
        let p = params(0.5);
        let c = -3.0;
        let s = PhaseState { lambda: 0.0, nu: 0.0, p_lambda: 0.0, p_nu: 1.0 };
        assert!(regularized_energy(&p, c, &s).abs() < 1e-14);
        let tr = integrate(&p, c, &s, 20.0, 1e-12).unwrap();
        assert!(tr.samples.iter().all(|(_, x)| x.lambda.abs() < 1e-10));
        let est = empirical_rotation(&tr).unwrap();
        assert!(!est.torus);
    }

    #[test]
    fn periods_and_rotation_in_s() {
        let e = EnergyMomentum::new(params(0.5), 2.0, -3.0).unwrap();
        let s = sample_state(&e, Component::Earth).unwrap();
        let pp = period_closed_form(&e, Component::Earth).unwrap();
        let (tx, te) = (pp.tau_xi.to_f64(), pp.tau_eta.to_f64());
        let tr = integrate(&e.params, e.c, &s, 12.0 * tx.max(te), 1e-12).unwrap();
        let est = empirical_rotation(&tr).unwrap();
        assert!((est.xi_period.unwrap() - tx).abs() < 1e-6 * tx);
        assert!((est.eta_period.unwrap() - te).abs() < 1e-6 * te);
        assert!((est.value.to_f64() - te / tx).abs() < 1e-3);
        assert!(tr.integral_drift < 1e-9);
    }

    #[test]
    fn zero_length_run() {
        let e = EnergyMomentum::new(params(0.5), 2.0, -3.0).unwrap();
        let s = sample_state(&e, Component::Earth).unwrap();
        let tr = integrate(&e.params, e.c, &s, 0.0, 1e-12).unwrap();
        assert_eq!(tr.samples.len(), 1);
        assert!(empirical_rotation(&tr).is_err());
    }
}
