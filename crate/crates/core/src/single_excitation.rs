//! One-excitation sector of the damped atom-mode system.
//!
//! Starting from `C1|e,0> + C2|g,1>`, the total state stays of the form
//! `|ψ̃(t)><ψ̃(t)| + λ(t)|g,0><g,0|` with
//! `|ψ̃(t)> = C̃1(t)|e,0> + C̃2(t)|g,1>`, and the amplitudes obey a closed
//! two-dimensional linear system. On resonance it is solved in closed form
//! by the propagator pair `(μ, ν)`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{CorrelatedInit, ModelParams};
use crate::numerics::{DensityMatrix, Solver, TimeGrid, C64, I};

/// Below this `|a t|` the `sinh(at/2)/a` factor is evaluated by its series.
const SERIES_CUTOFF: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleExcState {
    /// Amplitude on `|e,0>`.
    pub ct1: C64,
    /// Amplitude on `|g,1>`.
    pub ct2: C64,
    /// Weight leaked to `|g,0>`.
    pub lam: f64,
}

impl SingleExcState {
    pub fn excited_population(&self) -> f64 {
        self.ct1.norm_sqr()
    }

    /// `|C̃1|² + |C̃2|² + λ`, which the dynamics keep at 1.
    pub fn total_weight(&self) -> f64 {
        self.ct1.norm_sqr() + self.ct2.norm_sqr() + self.lam
    }
}

/// Resonant propagator of the amplitude equations.
///
/// `C̃1(t) = μ C1 − iν C2` and `C̃2(t) = −iν C1 + μ̄ C2`, where `μ̄` is `μ`
/// with the sign of the damping correction flipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator {
    pub mu: C64,
    pub nu: C64,
    /// Companion diagonal element driving the mode amplitude.
    pub mu_bar: C64,
    /// `sqrt((Γ/2)² − 4Ω²)`, imaginary in the oscillatory regime.
    pub a_param: C64,
}

impl Propagator {
    pub fn apply(&self, c1: C64, c2: C64) -> (C64, C64) {
        (
            self.mu * c1 - I * self.nu * c2,
            -I * self.nu * c1 + self.mu_bar * c2,
        )
    }
}

/// Closed-form `μ(t)`, `ν(t)` on resonance.
///
/// `cosh` and `sinh` are expanded into exponentials merged with the damping
/// envelope so that long overdamped runs neither overflow nor produce
/// `0 · ∞`.
pub fn propagator(params: &ModelParams, t: f64) -> Result<Propagator> {
    let omega = params.require_resonance()?;
    let gamma = params.damping;
    let coupling = params.coupling;
    let a = C64::new(0.25 * gamma * gamma - 4.0 * coupling * coupling, 0.0).sqrt();
    let z = a * (0.5 * t);
    let carrier = C64::new(0.0, -omega * t).exp();
    let damp = -0.25 * gamma * t;

    // cosh(z) e^{-Γt/4} and sinh(z)/a e^{-Γt/4}
    let (cosh_env, sinh_over_a_env) = if (a * t).norm() < SERIES_CUTOFF {
        let z2 = z * z;
        let env = damp.exp();
        let cosh = C64::new(1.0, 0.0) + z2 * 0.5 + z2 * z2 / 24.0;
        let shc = C64::new(1.0, 0.0) + z2 / 6.0 + z2 * z2 / 120.0;
        (cosh * env, shc * (0.5 * t) * env)
    } else {
        let ep = (z + damp).exp();
        let em = (-z + damp).exp();
        ((ep + em) * 0.5, (ep - em) / (a * 2.0))
    };

    Ok(Propagator {
        mu: carrier * (cosh_env + sinh_over_a_env * (0.5 * gamma)),
        nu: carrier * sinh_over_a_env * (2.0 * coupling),
        mu_bar: carrier * (cosh_env - sinh_over_a_env * (0.5 * gamma)),
        a_param: a,
    })
}

/// Right-hand side of the amplitude equations, state `[C̃1, C̃2]`.
///
/// Valid for any detuning: the atom rotates at `omega0`, the mode at
/// `omega_c` and decays at `Γ/2`.
pub fn amplitude_rhs(params: &ModelParams) -> impl Fn(f64, &[C64], &mut [C64]) + Sync + Send {
    let p = *params;
    move |_t, y, dy| {
        dy[0] = -I * (y[0] * p.omega0 + y[1] * p.coupling);
        dy[1] = -I * (y[1] * p.omega_c + y[0] * p.coupling) - y[1] * (0.5 * p.damping);
    }
}

/// Amplitude equations augmented with `dλ/dt = Γ|C̃2|²`, state `[C̃1, C̃2, λ]`.
pub fn augmented_rhs(params: &ModelParams) -> impl Fn(f64, &[C64], &mut [C64]) + Sync + Send {
    let amp = amplitude_rhs(params);
    let gamma = params.damping;
    move |t, y, dy| {
        amp(t, &y[..2], &mut dy[..2]);
        dy[2] = C64::new(gamma * y[1].norm_sqr(), 0.0);
    }
}

/// How a trajectory is produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvolvePath {
    /// Closed-form propagator; `λ` follows from the weight identity.
    Analytic,
    /// Numerical integration with `λ` carried as an extra state component.
    Ode(Solver),
}

pub fn evolve(
    init: &CorrelatedInit,
    params: &ModelParams,
    grid: &TimeGrid,
    path: EvolvePath,
) -> Result<Vec<SingleExcState>> {
    params.require_resonance()?;
    let (c1, c2) = init.amplitudes();
    match path {
        EvolvePath::Analytic => grid
            .points()
            .iter()
            .map(|&t| {
                let (ct1, ct2) = propagator(params, t)?.apply(c1, c2);
                let lam = (1.0 - ct1.norm_sqr() - ct2.norm_sqr()).max(0.0);
                Ok(SingleExcState { ct1, ct2, lam })
            })
            .collect(),
        EvolvePath::Ode(solver) => {
            let y0 = [c1, c2, C64::new(0.0, 0.0)];
            let ys = solver.integrate(augmented_rhs(params), &y0, grid)?;
            Ok(ys
                .into_iter()
                .map(|y| SingleExcState {
                    ct1: y[0],
                    ct2: y[1],
                    lam: y[2].re,
                })
                .collect())
        }
    }
}

/// Excited-state population of the correlated initial state, split into its
/// three contributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationTerms {
    /// Excitation initially in the atom that is still there.
    pub from_atom: f64,
    /// Excitation transferred from the mode.
    pub from_mode: f64,
    /// Cross term set by the relative phase.
    pub interference: f64,
}

impl PopulationTerms {
    pub fn total(&self) -> f64 {
        self.from_atom + self.from_mode + self.interference
    }
}

pub fn excited_population(init: &CorrelatedInit, params: &ModelParams, t: f64) -> Result<PopulationTerms> {
    let p = propagator(params, t)?;
    let c1 = init.c1;
    let c2 = init.c2;
    // μν* is real on resonance; only its real part survives.
    let cross = (p.mu * p.nu.conj()).re;
    Ok(PopulationTerms {
        from_atom: p.mu.norm_sqr() * c1 * c1,
        from_mode: p.nu.norm_sqr() * c2 * c2,
        interference: 2.0 * cross * c1 * c2 * init.theta.sin(),
    })
}

/// Reduced atom state `diag(|C̃1|², 1 − |C̃1|²)` in the `{|e>, |g>}` basis.
pub fn reduced_atom_state(state: &SingleExcState) -> Result<DensityMatrix> {
    let p = state.excited_population();
    DensityMatrix::diagonal(&[p, 1.0 - p])
}
