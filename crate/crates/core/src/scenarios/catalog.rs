use std::f64::consts::PI;

use super::{Initial, ModelKind, Observable, Scenario, Series};
use crate::config::angle_label;
use crate::error::{Error, Result};
use crate::model::{CorrelatedInit, ModelParams, ProductInit, TwoAtomInit};
use crate::numerics::TimeGrid;

/// Squared excited amplitudes of the three one-atom initial states.
const ONE_ATOM_WEIGHTS: [f64; 3] = [0.1, 0.5, 0.9];
const WEAK: f64 = 6.0;
const STRONG: f64 = 1.0;

fn short_grid() -> TimeGrid {
    TimeGrid::uniform(0.0, 15.0, 1501).expect("static grid")
}

/// The incommensurate Rabi frequencies 1 and √2 need a long window before
/// the distance comes close to its supremum.
fn long_grid() -> TimeGrid {
    TimeGrid::uniform(0.0, 500.0, 50001).expect("static grid")
}

fn params(damping: f64) -> ModelParams {
    ModelParams::resonant(0.0, 1.0, damping).expect("static params")
}

fn one_atom(c1sq: f64, theta: f64) -> CorrelatedInit {
    CorrelatedInit::new(c1sq.sqrt(), (1.0 - c1sq).sqrt(), theta).expect("static state")
}

fn populations(name: &str, damping: f64) -> Scenario {
    let series = ONE_ATOM_WEIGHTS
        .iter()
        .map(|&w| {
            let corr = one_atom(w, 0.0);
            Series {
                label: format!("c1sq_{w}"),
                params: params(damping),
                initial: Initial::OneAtom {
                    corr,
                    prod: Some(ProductInit::from_marginals(&corr)),
                },
            }
        })
        .collect();
    Scenario::new(
        name,
        format!("rescaled excited population, correlated vs marginal product, damping {damping}"),
        ModelKind::OneAtom,
        short_grid(),
        vec![Observable::PeCorr, Observable::PeProd],
        series,
    )
    .expect("static scenario")
}

fn phases(name: &str, damping: f64) -> Scenario {
    let mut series = Vec::new();
    for &w in &ONE_ATOM_WEIGHTS {
        for theta in [0.5 * PI, 0.0, 1.5 * PI] {
            series.push(Series {
                label: format!("c1sq_{w}_theta_{}", angle_label(theta)),
                params: params(damping),
                initial: Initial::OneAtom {
                    corr: one_atom(w, theta),
                    prod: None,
                },
            });
        }
    }
    Scenario::new(
        name,
        format!("rescaled excited population against the relative phase, damping {damping}"),
        ModelKind::OneAtom,
        short_grid(),
        vec![Observable::PeCorr, Observable::Interference],
        series,
    )
    .expect("static scenario")
}

/// `C1 = √(4/7)`, `C2 = √(3/7) e^{iθ}`, product partner `B1 = C2`, `B2 = C1`.
pub(crate) fn distance_states(theta: f64) -> (CorrelatedInit, ProductInit) {
    let corr = CorrelatedInit::new((4.0f64 / 7.0).sqrt(), (3.0f64 / 7.0).sqrt(), theta).expect("static state");
    let (c1, c2) = corr.amplitudes();
    let prod = ProductInit::with_mode_of(&corr, c2, c1).expect("static state");
    (corr, prod)
}

fn distance(name: &str, theta: f64) -> Scenario {
    let (corr, prod) = distance_states(theta);
    let series = [0.0, STRONG, WEAK]
        .iter()
        .map(|&g| Series {
            label: format!("gamma_{g}"),
            params: params(g),
            initial: Initial::OneAtom { corr, prod: Some(prod) },
        })
        .collect();
    Scenario::new(
        name,
        format!("atomic trace distance, theta {}", angle_label(theta)),
        ModelKind::OneAtom,
        long_grid(),
        vec![Observable::Distance],
        series,
    )
    .expect("static scenario")
}

pub(crate) fn two_atom_state(theta1: f64, theta2: f64) -> TwoAtomInit {
    TwoAtomInit::new(0.5f64.sqrt(), 0.1f64.sqrt(), 0.4f64.sqrt(), theta1, theta2).expect("static state")
}

fn concurrence(name: &str, sweep_first: bool) -> Scenario {
    let which = if sweep_first { "theta1" } else { "theta2" };
    let series = [0.0, 0.5 * PI, PI, 1.5 * PI]
        .iter()
        .map(|&v| Series {
            label: format!("{which}_{}", angle_label(v)),
            params: params(WEAK),
            initial: Initial::TwoAtom(if sweep_first { two_atom_state(v, 0.0) } else { two_atom_state(0.0, v) }),
        })
        .collect();
    Scenario::new(
        name,
        format!("two-atom concurrence over {which}, damping {WEAK}"),
        ModelKind::TwoAtom,
        short_grid(),
        vec![Observable::Concurrence],
        series,
    )
    .expect("static scenario")
}

/// Every built-in scenario, in a fixed order.
pub fn catalog() -> Vec<Scenario> {
    vec![
        populations("fig1a", WEAK),
        populations("fig1b", STRONG),
        phases("fig1c", WEAK),
        phases("fig1d", STRONG),
        distance("fig2a", 0.5 * PI),
        distance("fig2b", 0.0),
        distance("fig2c", 1.5 * PI),
        concurrence("fig3a", false),
        concurrence("fig3b", true),
    ]
}

pub fn find(name: &str) -> Result<Scenario> {
    catalog()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))
}
