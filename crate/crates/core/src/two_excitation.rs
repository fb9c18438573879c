//! Two-excitation sector, needed for the uncorrelated initial state.
//!
//! A product state `ρ_A ⊗ ρ_M` with diagonal factors mixes `|e,0>`, `|g,1>`,
//! `|g,0>` and `|e,1>`. The first two are covered by the propagator, `|g,0>`
//! is stationary, and `|e,1>` requires the matrix elements over
//! `{|g,0>, |e,1>, |g,2>, |e,0>, |g,1>}` (indices 0 to 4).
//!
//! The printed equation for the `|g,1>` population carries a stray
//! `−i ω_c ϱ44` term. It makes a population complex and breaks trace
//! conservation, and the independently assembled master equation has no such
//! term, so [`SectorEquations::Corrected`] drops it.
//! [`SectorEquations::AsPrinted`] keeps it for the counterfactual check.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{ModelParams, ProductInit};
use crate::numerics::{CMatrix, Solver, TimeGrid, C64, I};
use crate::single_excitation::propagator;

/// Matrix elements of the state evolved from `|e,1><e,1|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoExcDensity {
    /// Population of `|g,0>`, reconstructed from the others.
    pub r00: f64,
    /// Population of `|e,1>`.
    pub r11: f64,
    /// Population of `|g,2>`.
    pub r22: f64,
    /// Population of `|e,0>`.
    pub r33: f64,
    /// Population of `|g,1>`.
    pub r44: f64,
    /// Coherence `<e,1|ϱ|g,2>`.
    pub r12: C64,
    /// Coherence `<e,0|ϱ|g,1>`.
    pub r34: C64,
}

impl TwoExcDensity {
    /// Probability that the atom is excited.
    pub fn excited_population(&self) -> f64 {
        self.r11 + self.r33
    }

    /// Full 5x5 matrix in the `{|g,0>, |e,1>, |g,2>, |e,0>, |g,1>}` basis.
    pub fn to_matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros((5, 5));
        let pops = [self.r00, self.r11, self.r22, self.r33, self.r44];
        for (k, p) in pops.iter().enumerate() {
            m[[k, k]] = C64::new(*p, 0.0);
        }
        m[[1, 2]] = self.r12;
        m[[2, 1]] = self.r12.conj();
        m[[3, 4]] = self.r34;
        m[[4, 3]] = self.r34.conj();
        m
    }
}

/// Which form of the sector equations to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SectorEquations {
    #[default]
    Corrected,
    /// Keeps the spurious `−i ω_c ϱ44` term in the `ϱ44` equation.
    AsPrinted,
}

// State layout: [ϱ11, ϱ12, ϱ22, ϱ33, ϱ34, ϱ44, ϱ00].
const R11: usize = 0;
const R12: usize = 1;
const R22: usize = 2;
const R33: usize = 3;
const R34: usize = 4;
const R44: usize = 5;
const R00: usize = 6;

fn sector_rhs(params: &ModelParams, variant: SectorEquations) -> impl Fn(f64, &[C64], &mut [C64]) {
    let p = *params;
    let g = p.damping;
    let w = p.coupling;
    let detuning = p.omega0 - p.omega_c;
    move |_t, y, dy| {
        let r12 = y[R12];
        let r21 = r12.conj();
        let r34 = y[R34];
        let r43 = r34.conj();
        dy[R11] = -I * (r21 - r12) * (SQRT_2 * w) - y[R11] * g;
        dy[R12] = -I * (r12 * detuning + (y[R22] - y[R11]) * (SQRT_2 * w)) - r12 * (1.5 * g);
        dy[R22] = -I * (r12 - r21) * (SQRT_2 * w) - y[R22] * (2.0 * g);
        dy[R33] = -I * (r43 - r34) * w + y[R11] * g;
        dy[R34] = -I * (r34 * detuning + (y[R44] - y[R33]) * w) - (r34 - r12 * (2.0 * SQRT_2)) * (0.5 * g);
        dy[R44] = -I * (r34 - r43) * w - (y[R44] * 2.0 - y[R22] * 4.0) * (0.5 * g);
        if variant == SectorEquations::AsPrinted {
            dy[R44] += -I * y[R44] * p.omega_c;
        }
        dy[R00] = y[R44] * g;
    }
}

fn integrate_sector(
    params: &ModelParams,
    grid: &TimeGrid,
    solver: Solver,
    variant: SectorEquations,
) -> Result<Vec<Vec<C64>>> {
    params.validate()?;
    let zero = C64::new(0.0, 0.0);
    let mut y0 = vec![zero; 7];
    y0[R11] = C64::new(1.0, 0.0);
    solver.integrate(sector_rhs(params, variant), &y0, grid)
}

/// Evolve `ϱ(0) = |e,1><e,1|` through the corrected sector equations.
///
/// Detuning is allowed; the `|g,0>` population is reconstructed as one minus
/// the others.
pub fn evolve_e1(params: &ModelParams, grid: &TimeGrid, solver: Solver) -> Result<Vec<TwoExcDensity>> {
    let ys = integrate_sector(params, grid, solver, SectorEquations::Corrected)?;
    Ok(ys
        .into_iter()
        .map(|y| {
            let (r11, r22, r33, r44) = (y[R11].re, y[R22].re, y[R33].re, y[R44].re);
            TwoExcDensity {
                r00: 1.0 - r11 - r22 - r33 - r44,
                r11,
                r22,
                r33,
                r44,
                r12: y[R12],
                r34: y[R34],
            }
        })
        .collect())
}

/// `|Tr ϱ(t) − 1|` along the trajectory, with the `|g,0>` population
/// integrated from its own rate equation rather than reconstructed.
pub fn trace_defect(
    params: &ModelParams,
    grid: &TimeGrid,
    solver: Solver,
    variant: SectorEquations,
) -> Result<Vec<f64>> {
    let ys = integrate_sector(params, grid, solver, variant)?;
    Ok(ys
        .into_iter()
        .map(|y| {
            let tr = y[R00] + y[R11] + y[R22] + y[R33] + y[R44];
            (tr - C64::new(1.0, 0.0)).norm()
        })
        .collect())
}

/// Excited-state population of the atom for the product initial state, at
/// every grid point.
///
/// `|B1 C1 μ|² + |B2 C2 ν|² + |B1 C2|² (ϱ11 + ϱ33)`, with `|C1|²`, `|C2|²`
/// the mode weights.
pub fn excited_population_product_series(
    prod: &ProductInit,
    params: &ModelParams,
    grid: &TimeGrid,
    solver: Solver,
) -> Result<Vec<f64>> {
    params.require_resonance()?;
    let b1 = prod.b1.norm_sqr();
    let b2 = prod.b2.norm_sqr();
    let e1_weight = b1 * prod.mode_p1;
    // The |e,1> branch only matters when it carries weight.
    let sector = if e1_weight > 0.0 {
        Some(evolve_e1(params, grid, solver)?)
    } else {
        None
    };
    grid.points()
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let p = propagator(params, t)?;
            let mut pop = b1 * prod.mode_p0 * p.mu.norm_sqr() + b2 * prod.mode_p1 * p.nu.norm_sqr();
            if let Some(s) = &sector {
                pop += e1_weight * s[k].excited_population();
            }
            Ok(pop)
        })
        .collect()
}

/// Single-time version of [`excited_population_product_series`].
pub fn excited_population_product(prod: &ProductInit, params: &ModelParams, t: f64, solver: Solver) -> Result<f64> {
    let grid = if t == 0.0 {
        TimeGrid::uniform(0.0, 0.0, 1)?
    } else {
        TimeGrid::from_points(vec![0.0, t])?
    };
    Ok(*excited_population_product_series(prod, params, &grid, solver)?
        .last()
        .expect("grid is never empty"))
}
