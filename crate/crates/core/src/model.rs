//! Physical parameters and initial-state records.
//!
//! All frequencies share one arbitrary unit; the scenarios set the atom-mode
//! coupling to 1 so that times read directly as the dimensionless `Ωt`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{DensityMatrix, C64};

/// Normalization slack accepted by the initial-state constructors.
pub const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Atomic transition frequency.
    pub omega0: f64,
    /// Cavity mode frequency.
    pub omega_c: f64,
    /// Atom-mode coupling.
    pub coupling: f64,
    /// Mode damping rate.
    pub damping: f64,
    /// Dipole-dipole coupling between atoms (two-atom model only).
    #[serde(default)]
    pub dipole: f64,
}

impl ModelParams {
    pub fn new(omega0: f64, omega_c: f64, coupling: f64, damping: f64, dipole: f64) -> Result<Self> {
        let p = Self {
            omega0,
            omega_c,
            coupling,
            damping,
            dipole,
        };
        p.validate()?;
        Ok(p)
    }

    /// Atom and mode on resonance at `omega`, no dipole coupling.
    pub fn resonant(omega: f64, coupling: f64, damping: f64) -> Result<Self> {
        Self::new(omega, omega, coupling, damping, 0.0)
    }

    pub fn with_dipole(mut self, dipole: f64) -> Result<Self> {
        self.dipole = dipole;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, "must be finite"))
            }
        };
        finite("params.omega0", self.omega0)?;
        finite("params.omega_c", self.omega_c)?;
        finite("params.coupling", self.coupling)?;
        finite("params.damping", self.damping)?;
        finite("params.dipole", self.dipole)?;
        if self.omega0 < 0.0 {
            return Err(Error::invalid("params.omega0", "must be non-negative"));
        }
        if self.omega_c < 0.0 {
            return Err(Error::invalid("params.omega_c", "must be non-negative"));
        }
        if self.coupling <= 0.0 {
            return Err(Error::invalid("params.coupling", "must be positive"));
        }
        if self.damping < 0.0 {
            return Err(Error::invalid("params.damping", "must be non-negative"));
        }
        Ok(())
    }

    pub fn is_resonant(&self) -> bool {
        self.omega0 == self.omega_c
    }

    pub(crate) fn require_resonance(&self) -> Result<f64> {
        if self.is_resonant() {
            Ok(self.omega0)
        } else {
            Err(Error::NotResonant {
                omega0: self.omega0,
                omega_c: self.omega_c,
            })
        }
    }

    pub fn regime(&self) -> Regime {
        classify_regime(self)
    }
}

/// Coupling regime relative to the `Γ = 2Ω` threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Weak,
    Strong,
    Boundary,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Weak => "weak",
            Regime::Strong => "strong",
            Regime::Boundary => "boundary",
        })
    }
}

/// Weak when the damping exceeds twice the coupling, strong below it.
///
/// Note this is not where the propagator switches from damped oscillation to
/// overdamped decay; that happens at `Γ = 4Ω`.
pub fn classify_regime(params: &ModelParams) -> Regime {
    let threshold = 2.0 * params.coupling;
    if params.damping > threshold {
        Regime::Weak
    } else if params.damping < threshold {
        Regime::Strong
    } else {
        Regime::Boundary
    }
}

fn check_modulus(field: &str, x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::invalid(field, "must be a finite non-negative amplitude"));
    }
    Ok(())
}

fn check_phase(field: &str, theta: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::invalid(field, "must be finite"));
    }
    // Keep 2π itself rather than folding it onto 0.
    if (0.0..=TAU).contains(&theta) {
        Ok(theta)
    } else {
        Ok(theta.rem_euclid(TAU))
    }
}

fn check_norm(field: &str, total: f64) -> Result<()> {
    if (total - 1.0).abs() > NORM_TOL {
        return Err(Error::invalid(
            field,
            format!("squared amplitudes sum to {total}, expected 1"),
        ));
    }
    Ok(())
}

/// Correlated pure state `C1|e,0> + C2|g,1>` with `C1 = c1`, `C2 = c2 e^{iθ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedInit {
    pub c1: f64,
    pub c2: f64,
    pub theta: f64,
}

impl CorrelatedInit {
    pub fn new(c1: f64, c2: f64, theta: f64) -> Result<Self> {
        check_modulus("initial.c1", c1)?;
        check_modulus("initial.c2", c2)?;
        let theta = check_phase("initial.theta", theta)?;
        check_norm("initial", c1 * c1 + c2 * c2)?;
        Ok(Self { c1, c2, theta })
    }

    /// From arbitrary complex amplitudes; the global phase is dropped.
    pub fn from_amplitudes(c1: C64, c2: C64) -> Result<Self> {
        let theta = if c1.norm() == 0.0 || c2.norm() == 0.0 {
            0.0
        } else {
            (c2.arg() - c1.arg()).rem_euclid(TAU)
        };
        Self::new(c1.norm(), c2.norm(), theta)
    }

    /// `(C1(0), C2(0))` with the phase carried by the second amplitude.
    pub fn amplitudes(&self) -> (C64, C64) {
        (C64::new(self.c1, 0.0), C64::from_polar(self.c2, self.theta))
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.c1, self.c2, theta)
    }
}

/// Product state `ρ_A ⊗ ρ_M` with diagonal atom and mode.
///
/// `b1`, `b2` are kept complex because only their moduli enter the dynamics
/// yet the uncorrelated partner is often specified by copying a phased
/// correlated amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductInit {
    pub b1: C64,
    pub b2: C64,
    pub mode_p0: f64,
    pub mode_p1: f64,
}

impl ProductInit {
    pub fn new(b1: C64, b2: C64, mode_p0: f64, mode_p1: f64) -> Result<Self> {
        if !(b1.is_finite() && b2.is_finite()) {
            return Err(Error::invalid("initial.b", "atom amplitudes must be finite"));
        }
        for (field, p) in [("initial.mode_p0", mode_p0), ("initial.mode_p1", mode_p1)] {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::invalid(field, "mode weight must be a finite non-negative number"));
            }
        }
        check_norm("initial.b", b1.norm_sqr() + b2.norm_sqr())?;
        check_norm("initial.mode", mode_p0 + mode_p1)?;
        Ok(Self {
            b1,
            b2,
            mode_p0,
            mode_p1,
        })
    }

    /// Tensor product of the two marginals of `init`.
    pub fn from_marginals(init: &CorrelatedInit) -> Self {
        Self {
            b1: C64::new(init.c1, 0.0),
            b2: C64::new(init.c2, 0.0),
            mode_p0: init.c1 * init.c1,
            mode_p1: init.c2 * init.c2,
        }
    }

    /// Product partner whose mode marginal matches `corr` and whose atom
    /// amplitudes are `(b1, b2)`.
    pub fn with_mode_of(corr: &CorrelatedInit, b1: C64, b2: C64) -> Result<Self> {
        Self::new(b1, b2, corr.c1 * corr.c1, corr.c2 * corr.c2)
    }

    pub fn atom_excited(&self) -> f64 {
        self.b1.norm_sqr()
    }
}

pub fn product_from_marginals(init: &CorrelatedInit) -> ProductInit {
    ProductInit::from_marginals(init)
}

/// Two-atom correlated state `C1|e,g,0> + C2|g,e,0> + C3|g,g,1>` with
/// `C2 = c2 e^{iθ1}` and `C3 = c3 e^{iθ2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoAtomInit {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub theta1: f64,
    pub theta2: f64,
}

impl TwoAtomInit {
    pub fn new(c1: f64, c2: f64, c3: f64, theta1: f64, theta2: f64) -> Result<Self> {
        check_modulus("initial.c1", c1)?;
        check_modulus("initial.c2", c2)?;
        check_modulus("initial.c3", c3)?;
        let theta1 = check_phase("initial.theta1", theta1)?;
        let theta2 = check_phase("initial.theta2", theta2)?;
        check_norm("initial", c1 * c1 + c2 * c2 + c3 * c3)?;
        Ok(Self {
            c1,
            c2,
            c3,
            theta1,
            theta2,
        })
    }

    pub fn amplitudes(&self) -> [C64; 3] {
        [
            C64::new(self.c1, 0.0),
            C64::from_polar(self.c2, self.theta1),
            C64::from_polar(self.c3, self.theta2),
        ]
    }

    pub fn with_phases(&self, theta1: f64, theta2: f64) -> Result<Self> {
        Self::new(self.c1, self.c2, self.c3, theta1, theta2)
    }
}

/// Reduced atom and mode states of the correlated initial state.
///
/// The atom is written in the `{|e>, |g>}` basis, the mode in `{|0>, |1>}`.
pub fn marginals(init: &CorrelatedInit) -> (DensityMatrix, DensityMatrix) {
    let p_e = init.c1 * init.c1;
    let p_g = init.c2 * init.c2;
    // Renormalize the last ulp so the traces come out exactly 1.
    let total = p_e + p_g;
    let pops = [p_e / total, p_g / total];
    let atom = DensityMatrix::diagonal(&pops).expect("validated amplitudes");
    let mode = DensityMatrix::diagonal(&pops).expect("validated amplitudes");
    (atom, mode)
}
