//! Adaptive Dormand-Prince 5(4) integrator with event location.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B_LOW: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Tolerances {
    pub fn new(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, max_steps: 2_000_000 }
    }
}

/// A located zero of an event function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event<const N: usize> {
    pub index: usize,
    pub t: f64,
    pub y: [f64; N],
    /// `+1` for a rising zero, `-1` for a falling one.
    pub direction: i8,
}

#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub steps: Vec<(f64, [f64; N])>,
    pub events: Vec<Event<N>>,
}

/// One Dormand-Prince step, returning the 5th-order value and the error vector.
fn step<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]>(
    f: &F,
    t: f64,
    y: &[f64; N],
    k1: [f64; N],
    h: f64,
) -> ([f64; N], [f64; N], [f64; N]) {
    let mut k = [[0.0; N]; 7];
    k[0] = k1;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = f(t + C[s] * h, &ys);
    }
    let mut y5 = *y;
    let mut err = [0.0; N];
    for s in 0..7 {
        for i in 0..N {
            y5[i] += h * B[s] * k[s][i];
            err[i] += h * (B[s] - B_LOW[s]) * k[s][i];
        }
    }
    (y5, err, k[6])
}

fn error_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], tol: &Tolerances) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        let sc = tol.atol + tol.rtol * y0[i].abs().max(y1[i].abs());
        sum += (err[i] / sc).powi(2);
    }
    (sum / N as f64).sqrt()
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`, recording every accepted step.
///
/// Zeros of each event function are located inside the step by Illinois
/// iteration, each trial point being a fresh partial step from the step start.
pub fn integrate<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    tol: Tolerances,
    events: &[&dyn Fn(&[f64; N]) -> f64],
) -> Result<Solution<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut sol = Solution { steps: vec![(t0, y0)], events: Vec::new() };
    if t_end <= t0 {
        return Ok(sol);
    }
    let (mut t, mut y) = (t0, y0);
    let mut k1 = f(t, &y);
    let mut h = initial_step(&f, t0, &y0, &k1, &tol).min(t_end - t0);
    let mut gvals: Vec<f64> = events.iter().map(|g| g(&y)).collect();
    let h_min = 1e-14 * (t_end - t0).abs().max(1.0);
    for _ in 0..tol.max_steps {
        if t >= t_end {
            return Ok(sol);
        }
        let h_try = h.min(t_end - t);
        let (y1, err, k7) = step(&f, t, &y, k1, h_try);
        let e = error_norm(&err, &y, &y1, &tol);
        if !e.is_finite() {
            h = 0.25 * h_try;
            if h < h_min {
                return Err(Error::Integration("non-finite state".into()));
            }
            continue;
        }
        if e > 1.0 {
            h = h_try * (0.9 * e.powf(-0.2)).max(0.2);
            if h < h_min {
                return Err(Error::Integration(format!("step size underflow at t = {t}")));
            }
            continue;
        }
        for (idx, g) in events.iter().enumerate() {
            let g1 = g(&y1);
            let g0 = gvals[idx];
            if g0 != 0.0 && (g0 > 0.0) != (g1 > 0.0) {
                let (te, ye) = locate(&f, t, &y, k1, h_try, g, g0, g1);
                sol.events.push(Event { index: idx, t: te, y: ye, direction: if g1 > g0 { 1 } else { -1 } });
            }
            gvals[idx] = g1;
        }
        sol.events.sort_by(|a, b| a.t.total_cmp(&b.t));
        t += h_try;
        if t_end - t < 1e-14 * t_end.abs().max(1.0) {
            t = t_end;
        }
        y = y1;
        k1 = k7;
        sol.steps.push((t, y));
        h = h_try * (0.9 * e.max(1e-10).powf(-0.2)).min(5.0);
    }
    Err(Error::Integration("maximum number of steps exceeded".into()))
}

fn initial_step<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]>(
    f: &F,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    tol: &Tolerances,
) -> f64 {
    let sc = |i: usize| tol.atol + tol.rtol * y0[i].abs();
    let d0 = (0..N).map(|i| (y0[i] / sc(i)).powi(2)).sum::<f64>().sqrt();
    let d1 = (0..N).map(|i| (f0[i] / sc(i)).powi(2)).sum::<f64>().sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let mut y1 = *y0;
    for i in 0..N {
        y1[i] += h0 * f0[i];
    }
    let f1 = f(t0 + h0, &y1);
    let d2 = (0..N).map(|i| ((f1[i] - f0[i]) / sc(i)).powi(2)).sum::<f64>().sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1)
}

#[allow(clippy::too_many_arguments)]
fn locate<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]>(
    f: &F,
    t: f64,
    y: &[f64; N],
    k1: [f64; N],
    h: f64,
    g: &dyn Fn(&[f64; N]) -> f64,
    g0: f64,
    g1: f64,
) -> (f64, [f64; N]) {
    let (mut a, mut b) = (0.0, h);
    let (mut ga, mut gb) = (g0, g1);
    let mut side = 0;
    let mut best = (t + h, step(f, t, y, k1, h).0);
    for _ in 0..100 {
        let s = (a * gb - b * ga) / (gb - ga);
        let s = if s > a && s < b { s } else { 0.5 * (a + b) };
        let ys = step(f, t, y, k1, s).0;
        let gs = g(&ys);
        best = (t + s, ys);
        if gs == 0.0 || (b - a) < 1e-15 * h.max(1e-300) {
            break;
        }
        if (gs > 0.0) == (ga > 0.0) {
            a = s;
            ga = gs;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = s;
            gb = gs;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() <= 1e-14 * (t.abs() + h) {
            let s = 0.5 * (a + b);
            best = (t + s, step(f, t, y, k1, s).0);
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn harmonic_oscillator() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let sol = integrate(f, 0.0, [1.0, 0.0], 10.0 * PI, Tolerances::new(1e-12), &[]).unwrap();
        let (t, y) = *sol.steps.last().unwrap();
        assert_eq!(t, 10.0 * PI);
        assert!((y[0] - 1.0).abs() < 1e-9 && y[1].abs() < 1e-9);
    }

    #[test]
    fn events_locate_zeros() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let g = |y: &[f64; 2]| y[0];
        let sol = integrate(f, 0.0, [1.0, 0.0], 10.0, Tolerances::new(1e-12), &[&g]).unwrap();
        assert_eq!(sol.events.len(), 3);
        for (j, e) in sol.events.iter().enumerate() {
            let expect = PI / 2.0 + j as f64 * PI;
            assert!((e.t - expect).abs() < 1e-10, "{} vs {expect}", e.t);
        }
        assert_eq!(sol.events[0].direction, -1);
    }

    #[test]
    fn zero_length() {
        let f = |_t: f64, y: &[f64; 1]| [y[0]];
        let sol = integrate(f, 0.0, [1.0], 0.0, Tolerances::new(1e-10), &[]).unwrap();
        assert_eq!(sol.steps.len(), 1);
    }
}
