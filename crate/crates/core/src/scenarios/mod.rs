//! Named experiments and the runner that turns them into tables.
//!
//! A [`Scenario`] is a grid, a list of observables and one or more labelled
//! series (parameters plus initial state). Every observable becomes one
//! column per series, named `<observable>_<label>`.

mod catalog;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use catalog::{catalog, find};

use crate::error::{Error, Result};
use crate::information::{distance_trajectory, rescaled_population};
use crate::model::{CorrelatedInit, ModelParams, ProductInit, TwoAtomInit};
use crate::numerics::{Solver, TimeGrid};
use crate::par::Execution;
use crate::single_excitation::{evolve, excited_population, EvolvePath};
use crate::table::TimeSeriesTable;
use crate::two_atoms::evolve_two_atoms;
use crate::two_excitation::excited_population_product_series;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    OneAtom,
    TwoAtom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Observable {
    /// Excited population of the correlated state over its initial value.
    PeCorr,
    /// Same for the product partner.
    PeProd,
    PCorr,
    PProd,
    /// Phase-dependent addend of the correlated population.
    Interference,
    /// Atomic trace distance with its bound and backflow flag.
    Distance,
    Concurrence,
    /// Weight collected in the joint ground state.
    GroundWeight,
}

const OBSERVABLES: [(Observable, &str); 8] = [
    (Observable::PeCorr, "pe_corr"),
    (Observable::PeProd, "pe_prod"),
    (Observable::PCorr, "p_corr"),
    (Observable::PProd, "p_prod"),
    (Observable::Interference, "interference"),
    (Observable::Distance, "distance"),
    (Observable::Concurrence, "concurrence"),
    (Observable::GroundWeight, "ground_weight"),
];

impl Observable {
    pub fn name(self) -> &'static str {
        OBSERVABLES.iter().find(|(o, _)| *o == self).map(|(_, n)| *n).expect("listed")
    }

    pub fn all() -> impl Iterator<Item = Observable> {
        OBSERVABLES.iter().map(|(o, _)| *o)
    }

    pub fn supports(self, kind: ModelKind) -> bool {
        match self {
            Observable::Concurrence => kind == ModelKind::TwoAtom,
            Observable::GroundWeight => true,
            _ => kind == ModelKind::OneAtom,
        }
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OBSERVABLES
            .iter()
            .find(|(_, n)| *n == s)
            .map(|(o, _)| *o)
            .ok_or_else(|| Error::UnknownObservable(s.to_string()))
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Initial {
    OneAtom {
        corr: CorrelatedInit,
        prod: Option<ProductInit>,
    },
    TwoAtom(TwoAtomInit),
}

impl Initial {
    pub fn kind(&self) -> ModelKind {
        match self {
            Initial::OneAtom { .. } => ModelKind::OneAtom,
            Initial::TwoAtom(_) => ModelKind::TwoAtom,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub params: ModelParams,
    pub initial: Initial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub model: ModelKind,
    pub grid: TimeGrid,
    pub observables: Vec<Observable>,
    pub series: Vec<Series>,
}

impl Scenario {
    pub fn new(
        name: impl Into<String>,
        description: impl Into<String>,
        model: ModelKind,
        grid: TimeGrid,
        observables: Vec<Observable>,
        series: Vec<Series>,
    ) -> Result<Self> {
        let s = Self {
            name: name.into(),
            description: description.into(),
            model,
            grid,
            observables,
            series,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.series.is_empty() {
            return Err(Error::invalid("series", "scenario has no series"));
        }
        if self.observables.is_empty() {
            return Err(Error::invalid("observables", "scenario has no observables"));
        }
        for o in &self.observables {
            if !o.supports(self.model) {
                return Err(Error::invalid("observables", format!("`{o}` does not apply to the {:?} model", self.model)));
            }
        }
        for (i, s) in self.series.iter().enumerate() {
            if s.initial.kind() != self.model {
                return Err(Error::invalid(format!("series {i}"), "initial state does not match the model"));
            }
            s.params.validate()?;
            if s.params.coupling != self.series[0].params.coupling {
                return Err(Error::invalid(format!("series {}", s.label), "all series must share the coupling"));
            }
            let analytic = |o: &Observable| {
                matches!(o, Observable::PeCorr | Observable::PCorr | Observable::Interference | Observable::Distance | Observable::GroundWeight)
            };
            if self.model == ModelKind::OneAtom && self.observables.iter().any(analytic) {
                s.params.require_resonance()?;
            }
            let needs_prod = self
                .observables
                .iter()
                .any(|o| matches!(o, Observable::PeProd | Observable::PProd | Observable::Distance));
            if needs_prod && matches!(s.initial, Initial::OneAtom { prod: None, .. }) {
                return Err(Error::invalid(format!("series {}", s.label), "observable needs a product partner"));
            }
            if self.series[..i].iter().any(|o| o.label == s.label) {
                return Err(Error::invalid(format!("series {}", s.label), "duplicate label"));
            }
        }
        Ok(())
    }

    /// Same scenario on a different uniform grid over `[0, t_end]` (in units
    /// of the inverse coupling of the first series).
    pub fn with_grid(mut self, t_end: Option<f64>, n_points: Option<usize>) -> Result<Self> {
        if t_end.is_none() && n_points.is_none() {
            return Ok(self);
        }
        let coupling = self.series[0].params.coupling;
        let t_end = t_end.map_or(self.grid.end(), |t| t / coupling);
        let n = n_points.unwrap_or(self.grid.len());
        if t_end.is_nan() || t_end <= 0.0 {
            return Err(Error::invalid("t_end", "must be positive"));
        }
        if n < 2 {
            return Err(Error::invalid("grid_points", "need at least two points"));
        }
        self.grid = TimeGrid::uniform(0.0, t_end, n)?;
        Ok(self)
    }
}

fn series_table(scenario: &Scenario, series: &Series, solver: Solver) -> Result<TimeSeriesTable> {
    let grid = &scenario.grid;
    let omega_t: Vec<f64> = grid.points().iter().map(|t| t * series.params.coupling).collect();
    let mut table = TimeSeriesTable::new(&scenario.name, omega_t)?;
    let col = |o: Observable| format!("{}_{}", o.name(), series.label);
    let p = &series.params;

    match &series.initial {
        Initial::OneAtom { corr, prod } => {
            let terms = grid
                .points()
                .iter()
                .map(|&t| excited_population(corr, p, t))
                .collect::<Result<Vec<_>>>()?;
            let p_prod = match prod {
                Some(prod) if scenario.observables.iter().any(|o| matches!(o, Observable::PeProd | Observable::PProd)) => {
                    Some(excited_population_product_series(prod, p, grid, solver)?)
                }
                _ => None,
            };
            for &o in &scenario.observables {
                match o {
                    Observable::PCorr => table.push_column(col(o), terms.iter().map(|x| x.total()).collect())?,
                    Observable::PeCorr => {
                        let p0 = terms[0].total();
                        let v = terms.iter().map(|x| rescaled_population(x.total(), p0)).collect::<Result<_>>()?;
                        table.push_column(col(o), v)?
                    }
                    Observable::Interference => table.push_column(col(o), terms.iter().map(|x| x.interference).collect())?,
                    Observable::PProd => table.push_column(col(o), p_prod.clone().expect("validated"))?,
                    Observable::PeProd => {
                        let v = p_prod.as_ref().expect("validated");
                        let v = v.iter().map(|x| rescaled_population(*x, v[0])).collect::<Result<_>>()?;
                        table.push_column(col(o), v)?
                    }
                    Observable::Distance => {
                        let prod = prod.as_ref().expect("validated");
                        distance_trajectory(corr, prod, p, grid, solver)?.write_columns(&mut table, &series.label)?
                    }
                    Observable::GroundWeight => {
                        let states = evolve(corr, p, grid, EvolvePath::Analytic)?;
                        table.push_column(col(o), states.iter().map(|s| s.lam).collect())?
                    }
                    Observable::Concurrence => unreachable!("validated"),
                }
            }
        }
        Initial::TwoAtom(init) => {
            let states = evolve_two_atoms(init, p, grid, solver)?;
            for &o in &scenario.observables {
                match o {
                    Observable::Concurrence => table.push_column(col(o), states.iter().map(|s| s.concurrence()).collect())?,
                    Observable::GroundWeight => table.push_column(col(o), states.iter().map(|s| s.lam).collect())?,
                    _ => unreachable!("validated"),
                }
            }
        }
    }
    Ok(table)
}

/// Run every series of `scenario` and join the columns in declaration order.
///
/// Series are independent and may run concurrently; each one is integrated
/// sequentially, so the table is identical in either execution mode.
pub fn run_scenario(scenario: &Scenario, solver: Solver, exec: Execution) -> Result<TimeSeriesTable> {
    let wrap = |e: Error| e.in_scenario(&scenario.name);
    scenario.validate().map_err(wrap)?;
    let parts = exec
        .try_map(&scenario.series, |s| series_table(scenario, s, solver))
        .map_err(wrap)?;
    let mut parts = parts.into_iter();
    let mut table = parts.next().expect("validated non-empty");
    for part in parts {
        table.merge(part).map_err(wrap)?;
    }
    let s0 = &scenario.series[0];
    table = table
        .with_meta("scenario", &scenario.name)
        .with_meta("description", &scenario.description)
        .with_meta("grid", format!("[0, {}] x {} points (omega t)", scenario.grid.end() * s0.params.coupling, scenario.grid.len()))
        .with_meta("solver", format!("{solver:?}"));
    for s in &scenario.series {
        let p = &s.params;
        table = table.with_meta(
            format!("series.{}", s.label),
            format!(
                "omega0={} omega_c={} coupling={} damping={} dipole={} initial={:?}",
                p.omega0, p.omega_c, p.coupling, p.damping, p.dipole, s.initial
            ),
        );
    }
    Ok(table)
}

/// Run several scenarios, concurrently under [`Execution::Parallel`].
pub fn run_all(scenarios: &[Scenario], solver: Solver, exec: Execution) -> Result<Vec<TimeSeriesTable>> {
    exec.try_map(scenarios, |s| run_scenario(s, solver, Execution::Sequential))
}
