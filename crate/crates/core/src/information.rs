//! Rescaled populations and trace-distance information flow between the atom
//! and its environment.
//!
//! Two total states with identical mode marginals are compared: the
//! correlated `C1|e,0> + C2|g,1>` and a product `ρ_A ⊗ ρ_M`. Because both
//! reduced atom states stay diagonal, their trace distance is just the
//! difference of excited populations. Any growth above its initial value is
//! information flowing back to the atom, capped by the distinguishability
//! `I` that initially sits outside the atom.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CorrelatedInit, ModelParams, ProductInit};
use crate::numerics::{Solver, TimeGrid, C64};
use crate::single_excitation::excited_population;
use crate::table::TimeSeriesTable;
use crate::two_excitation::excited_population_product_series;

/// Slack before an increase over the initial distance counts as backflow.
pub const BACKFLOW_SLACK: f64 = 1e-9;

/// Excited-state populations for the correlated and the product initial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationPair {
    pub p_corr: f64,
    pub p_prod: f64,
}

/// `p_t / p_0`. Undefined, and rejected, when the atom starts unexcited.
pub fn rescaled_population(p_t: f64, p_0: f64) -> Result<f64> {
    if p_0.is_nan() || p_0 <= 0.0 {
        return Err(Error::invalid(
            "p_0",
            "rescaled population undefined for an initially unexcited atom",
        ));
    }
    Ok(p_t / p_0)
}

pub fn atomic_trace_distance(pair: &PopulationPair) -> f64 {
    (pair.p_corr - pair.p_prod).abs()
}

/// Initial information outside the atom: trace distance of the two total
/// states minus that of their atomic marginals.
///
/// Only moduli enter, so the relative phase of `c2` is irrelevant.
pub fn initial_info_bound(c1: C64, c2: C64, prod: &ProductInit) -> f64 {
    let x = (prod.b2 * c1).norm_sqr();
    let y = (prod.b1 * c2).norm_sqr();
    let cross = 4.0 * (c1 * c2).norm_sqr();
    let total = 0.5 * (((x - y).powi(2) + cross).sqrt() + x + y);
    total - (c2.norm_sqr() - prod.b2.norm_sqr()).abs()
}

pub fn initial_info_bound_for(corr: &CorrelatedInit, prod: &ProductInit) -> f64 {
    let (c1, c2) = corr.amplitudes();
    initial_info_bound(c1, c2, prod)
}

/// Trace distance between the atomic states along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceTrajectory {
    pub times: Vec<f64>,
    pub p_corr: Vec<f64>,
    pub p_prod: Vec<f64>,
    pub distance: Vec<f64>,
    pub bound: f64,
}

impl DistanceTrajectory {
    pub fn initial_distance(&self) -> f64 {
        self.distance[0]
    }

    pub fn max_distance(&self) -> f64 {
        self.distance.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Grid points where the distance exceeds its starting value.
    pub fn backflow(&self) -> Vec<bool> {
        let d0 = self.initial_distance();
        self.distance.iter().map(|d| *d > d0 + BACKFLOW_SLACK).collect()
    }

    /// Largest `D(t) − D(0) − I`; non-positive whenever the bound holds.
    pub fn worst_bound_violation(&self) -> f64 {
        let d0 = self.initial_distance();
        self.distance
            .iter()
            .map(|d| d - d0 - self.bound)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Columns `distance`, `distance_gain`, `bound_i`, `bound_d0_plus_i`,
    /// `backflow`, each suffixed with `suffix` when it is non-empty.
    pub fn write_columns(&self, table: &mut TimeSeriesTable, suffix: &str) -> Result<()> {
        let name = |base: &str| {
            if suffix.is_empty() {
                base.to_string()
            } else {
                format!("{base}_{suffix}")
            }
        };
        let d0 = self.initial_distance();
        let n = self.distance.len();
        table.push_column(name("distance"), self.distance.clone())?;
        table.push_column(name("distance_gain"), self.distance.iter().map(|d| d - d0).collect())?;
        table.push_column(name("bound_i"), vec![self.bound; n])?;
        table.push_column(name("bound_d0_plus_i"), vec![d0 + self.bound; n])?;
        table.push_column(
            name("backflow"),
            self.backflow().into_iter().map(|b| if b { 1.0 } else { 0.0 }).collect(),
        )?;
        Ok(())
    }
}

pub fn distance_trajectory(
    corr: &CorrelatedInit,
    prod: &ProductInit,
    params: &ModelParams,
    grid: &TimeGrid,
    solver: Solver,
) -> Result<DistanceTrajectory> {
    let p_prod = excited_population_product_series(prod, params, grid, solver)?;
    let p_corr = grid
        .points()
        .iter()
        .map(|&t| excited_population(corr, params, t).map(|p| p.total()))
        .collect::<Result<Vec<_>>>()?;
    let distance = p_corr
        .iter()
        .zip(&p_prod)
        .map(|(&p_corr, &p_prod)| atomic_trace_distance(&PopulationPair { p_corr, p_prod }))
        .collect();
    Ok(DistanceTrajectory {
        times: grid.points().to_vec(),
        p_corr,
        p_prod,
        distance,
        bound: initial_info_bound_for(corr, prod),
    })
}

/// Distance series as a table: `omega_t`, `distance`, `distance_gain`,
/// `bound_i`, `bound_d0_plus_i`, `backflow`.
pub fn distance_series(
    corr: &CorrelatedInit,
    prod: &ProductInit,
    params: &ModelParams,
    grid: &TimeGrid,
    solver: Solver,
) -> Result<TimeSeriesTable> {
    let traj = distance_trajectory(corr, prod, params, grid, solver)?;
    let omega_t = grid.points().iter().map(|t| t * params.coupling).collect();
    let mut table = TimeSeriesTable::new("distance", omega_t)?
        .with_meta("damping", params.damping)
        .with_meta("coupling", params.coupling)
        .with_meta("theta", corr.theta);
    traj.write_columns(&mut table, "")?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::product_from_marginals;
    use crate::numerics::{trace_distance, CMatrix, DensityMatrix};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    /// Trace distance of the total states minus that of the atom marginals,
    /// assembled from explicit 4x4 matrices over {e0, e1, g0, g1}.
    fn bound_by_matrices(c1: C64, c2: C64, prod: &ProductInit) -> f64 {
        let mut psi = [C64::new(0.0, 0.0); 4];
        psi[0] = c1;
        psi[3] = c2;
        let corr = DensityMatrix::pure(&psi).unwrap();
        let pm = [c1.norm_sqr(), c2.norm_sqr()];
        let pa = [prod.b1.norm_sqr(), prod.b2.norm_sqr()];
        let mut m = CMatrix::zeros((4, 4));
        for a in 0..2 {
            for n in 0..2 {
                m[[2 * a + n, 2 * a + n]] = C64::new(pa[a] * pm[n], 0.0);
            }
        }
        let prod_state = DensityMatrix::new(m).unwrap();
        let atom_corr = DensityMatrix::diagonal(&pm).unwrap();
        let atom_prod = DensityMatrix::diagonal(&pa).unwrap();
        trace_distance(&corr, &prod_state).unwrap() - trace_distance(&atom_corr, &atom_prod).unwrap()
    }

    fn fig2_inputs(c2: C64) -> (C64, C64, ProductInit) {
        let c1 = C64::new((4.0f64 / 7.0).sqrt(), 0.0);
        let prod = ProductInit::new(c2, c1, 4.0 / 7.0, 3.0 / 7.0).unwrap();
        (c1, c2, prod)
    }

    #[test]
    fn rescaling() {
        assert_eq!(rescaled_population(0.3, 0.3).unwrap(), 1.0);
        assert_eq!(rescaled_population(0.2, 0.1).unwrap(), 2.0);
        assert!(rescaled_population(0.2, 0.0).is_err());
    }

    #[test]
    fn atomic_distance_examples() {
        assert_eq!(atomic_trace_distance(&PopulationPair { p_corr: 0.4, p_prod: 0.4 }), 0.0);
        assert!((atomic_trace_distance(&PopulationPair { p_corr: 0.9, p_prod: 0.4 }) - 0.5).abs() < 1e-15);
        let a = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
        let b = DensityMatrix::diagonal(&[0.4, 0.6]).unwrap();
        assert!((trace_distance(&a, &b).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bound_examples() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let same = ProductInit::new(one, zero, 1.0, 0.0).unwrap();
        assert_eq!(initial_info_bound(one, zero, &same), 0.0);

        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let half = ProductInit::new(h, h, 0.5, 0.5).unwrap();
        assert!((initial_info_bound(h, h, &half) - 0.75).abs() < 1e-15);

        let (c1, c2, prod) = fig2_inputs(C64::new(0.0, (3.0f64 / 7.0).sqrt()));
        assert!((initial_info_bound(c1, c2, &prod) - 30.0 / 49.0).abs() < 1e-12);
    }

    #[test]
    fn bound_matches_total_state_distance() {
        let cases = [
            (0.3, 0.4, 0.8, 0.6),
            (0.9, 0.0, 0.5, 0.3),
            (0.5, 2.0, 0.1, 1.0),
            (0.0, 0.0, 1.0, 0.0),
        ];
        for (c_mod, c_phase, b_mod, b_phase) in cases {
            let c1 = C64::new(c_mod, 0.0);
            let c2 = C64::from_polar((1.0 - c_mod * c_mod).sqrt(), c_phase);
            let b1 = C64::from_polar(b_mod, b_phase);
            let b2 = C64::new((1.0 - b_mod * b_mod).sqrt(), 0.0);
            let prod = ProductInit::new(b1, b2, c1.norm_sqr(), c2.norm_sqr()).unwrap();
            let direct = bound_by_matrices(c1, c2, &prod);
            assert!((initial_info_bound(c1, c2, &prod) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn bound_ignores_phase() {
        let corr = CorrelatedInit::new(0.6, 0.8, 0.0).unwrap();
        let prod = ProductInit::with_mode_of(&corr, C64::new(0.0, 0.8), C64::new(0.6, 0.0)).unwrap();
        let base = initial_info_bound_for(&corr, &prod);
        for theta in [FRAC_PI_2, PI, 1.5 * PI] {
            let b = initial_info_bound_for(&corr.with_theta(theta).unwrap(), &prod);
            assert!((b - base).abs() < 1e-12);
        }
    }

    #[test]
    fn marginal_partner_starts_indistinguishable() {
        let corr = CorrelatedInit::new(0.1f64.sqrt(), 0.9f64.sqrt(), 0.7).unwrap();
        let prod = product_from_marginals(&corr);
        let grid = TimeGrid::uniform(0.0, 5.0, 51).unwrap();
        let p = ModelParams::resonant(0.0, 1.0, 1.0).unwrap();
        let traj = distance_trajectory(&corr, &prod, &p, &grid, Solver::default()).unwrap();
        assert!(traj.initial_distance() < 1e-15);
        assert!(traj.worst_bound_violation() <= 1e-9);
    }

    #[test]
    fn undamped_zero_phase_supremum() {
        let (c1, c2, prod) = fig2_inputs(C64::new((3.0f64 / 7.0).sqrt(), 0.0));
        let corr = CorrelatedInit::from_amplitudes(c1, c2).unwrap();
        let p = ModelParams::resonant(0.0, 1.0, 0.0).unwrap();
        let grid = TimeGrid::uniform(0.0, 500.0, 50001).unwrap();
        let traj = distance_trajectory(&corr, &prod, &p, &grid, Solver::default()).unwrap();
        assert!((traj.initial_distance() - 1.0 / 7.0).abs() < 1e-12);
        assert!((traj.max_distance() - 16.0 / 49.0).abs() < 1e-3);
    }

    #[test]
    fn table_columns() {
        let (c1, c2, prod) = fig2_inputs(C64::new(0.0, (3.0f64 / 7.0).sqrt()));
        let corr = CorrelatedInit::from_amplitudes(c1, c2).unwrap();
        let p = ModelParams::resonant(0.0, 1.0, 1.0).unwrap();
        let grid = TimeGrid::uniform(0.0, 10.0, 101).unwrap();
        let t = distance_series(&corr, &prod, &p, &grid, Solver::default()).unwrap();
        assert_eq!(
            t.column_names(),
            vec!["omega_t", "distance", "distance_gain", "bound_i", "bound_d0_plus_i", "backflow"]
        );
        let bound = t.column("bound_d0_plus_i").unwrap()[0];
        assert!((bound - 37.0 / 49.0).abs() < 1e-12);
    }
}
