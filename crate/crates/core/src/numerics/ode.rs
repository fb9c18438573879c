//! Explicit Runge-Kutta integration of complex-valued ODE systems.
//!
//! The workhorse is the Dormand-Prince 5(4) pair with Hairer's step-size
//! control and fourth-order continuous extension, so grid points are
//! interpolated rather than stepped onto. A fixed-step classical RK4 is kept
//! as an independent cross-check.

use super::{TimeGrid, C64};
use crate::error::{Error, Result};

/// Default absolute and relative tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_STEPS: usize = 50_000_000;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// Hairer's controller constants.
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

/// Integration scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Solver {
    /// Adaptive Dormand-Prince 5(4) with dense output.
    Dopri5 { atol: f64, rtol: f64 },
    /// Classical RK4 with at most `max_step` per substep; every grid interval
    /// is split into equal substeps.
    Rk4 { max_step: f64 },
}

impl Default for Solver {
    fn default() -> Self {
        Solver::dopri5(DEFAULT_TOL)
    }
}

impl Solver {
    pub fn dopri5(tol: f64) -> Self {
        Solver::Dopri5 {
            atol: tol,
            rtol: tol,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Solver::Dopri5 { atol, rtol } => {
                if !(atol > 0.0 && rtol >= 0.0 && atol.is_finite() && rtol.is_finite()) {
                    return Err(Error::invalid("tol", "tolerance must be positive and finite"));
                }
            }
            Solver::Rk4 { max_step } => {
                if !(max_step > 0.0 && max_step.is_finite()) {
                    return Err(Error::invalid("max_step", "must be positive and finite"));
                }
            }
        }
        Ok(())
    }

    /// Solve `dy/dt = rhs(t, y)` from `y0` at `grid.start()` and report the
    /// state at every grid point (the first entry is `y0` itself).
    pub fn integrate<F>(&self, rhs: F, y0: &[C64], grid: &TimeGrid) -> Result<Vec<Vec<C64>>>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        self.validate()?;
        if y0.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite { t: grid.start() });
        }
        match *self {
            Solver::Dopri5 { atol, rtol } => dopri5(rhs, y0, grid.points(), atol, rtol),
            Solver::Rk4 { max_step } => rk4(rhs, y0, grid.points(), max_step),
        }
    }
}

/// Adaptive integration at absolute and relative tolerance `tol`.
pub fn integrate_ode<F>(rhs: F, y0: &[C64], grid: &TimeGrid, tol: f64) -> Result<Vec<Vec<C64>>>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    Solver::dopri5(tol).integrate(rhs, y0, grid)
}

fn axpy_into(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for i in 0..out.len() {
        let mut acc = C64::new(0.0, 0.0);
        for (coef, k) in terms {
            acc += k[i] * *coef;
        }
        out[i] = y[i] + acc * h;
    }
}

fn finite(y: &[C64]) -> bool {
    y.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn rms_norm(v: &[C64], y: &[C64], atol: f64, rtol: f64) -> f64 {
    let n = v.len().max(1) as f64;
    (v.iter()
        .zip(y)
        .map(|(vi, yi)| {
            let sk = atol + rtol * yi.norm();
            (vi.norm() / sk).powi(2)
        })
        .sum::<f64>()
        / n)
        .sqrt()
}

fn initial_step<F>(rhs: &mut F, t0: f64, y0: &[C64], f0: &[C64], t_end: f64, atol: f64, rtol: f64) -> f64
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let span = t_end - t0;
    let d0 = rms_norm(y0, y0, atol, rtol);
    let d1 = rms_norm(f0, y0, atol, rtol);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span);
    let mut y1 = vec![C64::new(0.0, 0.0); y0.len()];
    axpy_into(&mut y1, y0, h0, &[(1.0, f0)]);
    let mut f1 = vec![C64::new(0.0, 0.0); y0.len()];
    rhs(t0 + h0, &y1, &mut f1);
    let diff: Vec<C64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms_norm(&diff, y0, atol, rtol) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

fn dopri5<F>(mut rhs: F, y0: &[C64], points: &[f64], atol: f64, rtol: f64) -> Result<Vec<Vec<C64>>>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y0.len();
    let mut out = Vec::with_capacity(points.len());
    out.push(y0.to_vec());
    if points.len() == 1 {
        return Ok(out);
    }
    let t_end = *points.last().unwrap();
    let zero = C64::new(0.0, 0.0);

    let mut t = points[0];
    let mut y = y0.to_vec();
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];
    let mut k5 = vec![zero; n];
    let mut k6 = vec![zero; n];
    let mut k7 = vec![zero; n];
    let mut ytmp = vec![zero; n];
    let mut ynew = vec![zero; n];
    let mut err = vec![zero; n];
    let mut scale_ref = vec![zero; n];
    let mut cont = [vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]];

    rhs(t, &y, &mut k1);
    let mut h = initial_step(&mut rhs, t, &y, &k1, t_end, atol, rtol);
    let mut fac_old: f64 = 1e-4;
    let mut next = 1;
    let mut steps = 0usize;
    let mut last_rejected = false;

    while next < points.len() {
        if steps >= MAX_STEPS {
            return Err(Error::TooManySteps { t, max_steps: MAX_STEPS });
        }
        if 0.1 * h.abs() <= t.abs().max(1.0) * f64::EPSILON {
            return Err(Error::StepUnderflow { t });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        steps += 1;

        axpy_into(&mut ytmp, &y, h, &[(A21, &k1)]);
        rhs(t + C2 * h, &ytmp, &mut k2);
        axpy_into(&mut ytmp, &y, h, &[(A31, &k1), (A32, &k2)]);
        rhs(t + C3 * h, &ytmp, &mut k3);
        axpy_into(&mut ytmp, &y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        rhs(t + C4 * h, &ytmp, &mut k4);
        axpy_into(&mut ytmp, &y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        rhs(t + C5 * h, &ytmp, &mut k5);
        axpy_into(
            &mut ytmp,
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        rhs(t + h, &ytmp, &mut k6);
        axpy_into(
            &mut ynew,
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        rhs(t + h, &ynew, &mut k7);

        for i in 0..n {
            err[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let mag = y[i].norm().max(ynew[i].norm());
            scale_ref[i] = C64::new(mag, 0.0);
        }
        let err_norm = rms_norm(&err, &scale_ref, atol, rtol);
        if !err_norm.is_finite() {
            // Blow-up inside the step: shrink hard and retry.
            h *= FAC_MIN;
            last_rejected = true;
            continue;
        }

        let fac11 = err_norm.powf(0.2 - BETA * 0.75);
        if err_norm <= 1.0 {
            if !finite(&ynew) {
                return Err(Error::NonFinite { t: t + h });
            }
            let t_new = t + h;
            // Continuous extension coefficients for (t, t_new].
            for i in 0..n {
                let ydiff = ynew[i] - y[i];
                let bspl = k1[i] * h - ydiff;
                cont[0][i] = y[i];
                cont[1][i] = ydiff;
                cont[2][i] = bspl;
                cont[3][i] = ydiff - k7[i] * h - bspl;
                cont[4][i] = (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h;
            }
            while next < points.len() && (points[next] <= t_new || last) {
                let tp = points[next];
                if tp == t_new || (last && next == points.len() - 1) {
                    out.push(ynew.clone());
                } else {
                    let theta = (tp - t) / h;
                    let theta1 = 1.0 - theta;
                    let yi: Vec<C64> = (0..n)
                        .map(|i| {
                            cont[0][i]
                                + (cont[1][i]
                                    + (cont[2][i] + (cont[3][i] + cont[4][i] * theta1) * theta) * theta1)
                                    * theta
                        })
                        .collect();
                    out.push(yi);
                }
                next += 1;
            }

            let mut fac = fac11 / fac_old.powf(BETA);
            fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            fac_old = err_norm.max(1e-4);
            std::mem::swap(&mut y, &mut ynew);
            std::mem::swap(&mut k1, &mut k7);
            t = t_new;
            h = h_new;
            last_rejected = false;
        } else {
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
            last_rejected = true;
        }
    }
    Ok(out)
}

fn rk4<F>(mut rhs: F, y0: &[C64], points: &[f64], max_step: f64) -> Result<Vec<Vec<C64>>>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y0.len();
    let zero = C64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(points.len());
    out.push(y0.to_vec());
    let mut y = y0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
    let mut tmp = vec![zero; n];
    for w in points.windows(2) {
        let span = w[1] - w[0];
        let substeps = (span / max_step).ceil().max(1.0) as usize;
        let h = span / substeps as f64;
        for s in 0..substeps {
            let t = w[0] + h * s as f64;
            rhs(t, &y, &mut k1);
            axpy_into(&mut tmp, &y, 0.5 * h, &[(1.0, &k1)]);
            rhs(t + 0.5 * h, &tmp, &mut k2);
            axpy_into(&mut tmp, &y, 0.5 * h, &[(1.0, &k2)]);
            rhs(t + 0.5 * h, &tmp, &mut k3);
            axpy_into(&mut tmp, &y, h, &[(1.0, &k3)]);
            rhs(t + h, &tmp, &mut k4);
            for i in 0..n {
                y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
            }
            if !finite(&y) {
                return Err(Error::NonFinite { t: t + h });
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(_t: f64, y: &[C64], dy: &mut [C64]) {
        dy[0] = -y[0];
    }

    fn rotation(_t: f64, y: &[C64], dy: &mut [C64]) {
        dy[0] = -C64::i() * y[0];
    }

    #[test]
    fn exponential_decay() {
        let grid = TimeGrid::uniform(0.0, 1.0, 11).unwrap();
        let ys = integrate_ode(decay, &[C64::new(1.0, 0.0)], &grid, 1e-10).unwrap();
        assert_eq!(ys.len(), 11);
        assert!((ys[10][0].re - 0.3678794412).abs() < 1e-9);
        for (t, y) in grid.points().iter().zip(&ys) {
            assert!((y[0].re - (-t).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn phase_rotation_keeps_modulus() {
        let grid = TimeGrid::uniform(0.0, 30.0, 301).unwrap();
        let ys = integrate_ode(rotation, &[C64::new(1.0, 0.0)], &grid, 1e-10).unwrap();
        for (t, y) in grid.points().iter().zip(&ys) {
            assert!((y[0].norm() - 1.0).abs() < 1e-9);
            assert!((y[0] - C64::new(0.0, -t).exp()).norm() < 1e-8);
        }
    }

    #[test]
    fn tighter_tolerance_never_worse() {
        let grid = TimeGrid::uniform(0.0, 10.0, 101).unwrap();
        let err_at = |tol: f64| {
            let ys = integrate_ode(rotation, &[C64::new(1.0, 0.0)], &grid, tol).unwrap();
            grid.points()
                .iter()
                .zip(&ys)
                .map(|(t, y)| (y[0] - C64::new(0.0, -t).exp()).norm())
                .fold(0.0, f64::max)
        };
        let mut prev = err_at(1e-4);
        for tol in [5e-5, 2.5e-5, 1e-6, 5e-7, 1e-8, 5e-9, 1e-10] {
            let e = err_at(tol);
            assert!(e <= prev * 1.0001 + 1e-15, "tol {tol}: {e} > {prev}");
            prev = e;
        }
    }

    #[test]
    fn rk4_cross_check() {
        let grid = TimeGrid::uniform(0.0, 5.0, 51).unwrap();
        let a = Solver::Rk4 { max_step: 1e-3 }
            .integrate(rotation, &[C64::new(1.0, 0.0)], &grid)
            .unwrap();
        let b = Solver::default()
            .integrate(rotation, &[C64::new(1.0, 0.0)], &grid)
            .unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x[0] - y[0]).norm() < 1e-9);
        }
    }

    #[test]
    fn deterministic() {
        let grid = TimeGrid::uniform(0.0, 7.0, 333).unwrap();
        let a = integrate_ode(rotation, &[C64::new(0.3, 0.4)], &grid, 1e-9).unwrap();
        let b = integrate_ode(rotation, &[C64::new(0.3, 0.4)], &grid, 1e-9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn blow_up_is_reported_with_time() {
        // dy/dt = y^2 with y(0) = 1 blows up at t = 1.
        let grid = TimeGrid::uniform(0.0, 2.0, 5).unwrap();
        let err = integrate_ode(|_, y, dy| dy[0] = y[0] * y[0], &[C64::new(1.0, 0.0)], &grid, 1e-10)
            .unwrap_err();
        let t = err.time_reached().expect("numerical error carries the time");
        assert!(err.is_numerical());
        assert!(t > 0.9 && t <= 1.0 + 1e-6, "failed at {t}");
    }

    #[test]
    fn rejects_bad_tolerance() {
        let grid = TimeGrid::uniform(0.0, 1.0, 2).unwrap();
        assert!(integrate_ode(decay, &[C64::new(1.0, 0.0)], &grid, 0.0).is_err());
        assert!(integrate_ode(decay, &[C64::new(1.0, 0.0)], &grid, -1.0).is_err());
    }

    #[test]
    fn single_point_grid_returns_initial_value() {
        let grid = TimeGrid::uniform(3.0, 3.0, 1).unwrap();
        let ys = integrate_ode(decay, &[C64::new(2.0, 0.0)], &grid, 1e-10).unwrap();
        assert_eq!(ys, vec![vec![C64::new(2.0, 0.0)]]);
    }
}
