//! Two atoms sharing one damped mode, restricted to a single excitation.
//!
//! Amplitudes `C̃1`, `C̃2`, `C̃3` multiply `|e,g,0>`, `|g,e,0>`, `|g,g,1>`; the
//! weight lost through the mode accumulates in `λ` on `|g,g,0>`. The
//! antisymmetric combination `(C̃1 − C̃2)/√2` never couples to the mode, which
//! fixes the long-time entanglement.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, TwoAtomInit};
use crate::numerics::{hermitian_eigen, hermitian_eigenvalues, CMatrix, DensityMatrix, Solver, TimeGrid, C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoAtomState {
    pub ct1: C64,
    pub ct2: C64,
    pub ct3: C64,
    pub lam: f64,
}

impl TwoAtomState {
    /// `2|C̃1 C̃2|`, exact for this X-shaped atomic state.
    pub fn concurrence(&self) -> f64 {
        concurrence_pair(self)
    }

    /// Amplitude of the mode-decoupled combination `(C̃1 − C̃2)/√2`.
    pub fn dark_amplitude(&self) -> C64 {
        (self.ct1 - self.ct2) / 2f64.sqrt()
    }

    pub fn total_weight(&self) -> f64 {
        self.ct1.norm_sqr() + self.ct2.norm_sqr() + self.ct3.norm_sqr() + self.lam
    }
}

/// Right-hand side for `[C̃1, C̃2, C̃3, λ]`.
///
/// Atoms precess at `omega0`, the mode at `omega_c`, so detuned runs are
/// allowed even though the usual setting is resonant.
pub fn two_atom_rhs(params: &ModelParams) -> impl Fn(f64, &[C64], &mut [C64]) + Sync + Send {
    let (w0, wc, g, k, d) = (params.omega0, params.omega_c, params.coupling, params.damping, params.dipole);
    move |_t, y, dy| {
        let (a, b, m) = (y[0], y[1], y[2]);
        dy[0] = -I * (w0 * a + g * m + d * b);
        dy[1] = -I * (w0 * b + g * m + d * a);
        dy[2] = -I * (wc * m + g * (a + b)) - 0.5 * k * m;
        dy[3] = C64::new(k * m.norm_sqr(), 0.0);
    }
}

pub fn evolve_two_atoms(
    init: &TwoAtomInit,
    params: &ModelParams,
    grid: &TimeGrid,
    solver: Solver,
) -> Result<Vec<TwoAtomState>> {
    params.validate()?;
    let [c1, c2, c3] = init.amplitudes();
    let y0 = [c1, c2, c3, C64::new(0.0, 0.0)];
    let ys = solver.integrate(two_atom_rhs(params), &y0, grid)?;
    Ok(ys
        .into_iter()
        .map(|y| TwoAtomState {
            ct1: y[0],
            ct2: y[1],
            ct3: y[2],
            lam: y[3].re,
        })
        .collect())
}

pub fn concurrence_pair(state: &TwoAtomState) -> f64 {
    2.0 * (state.ct1 * state.ct2).norm()
}

/// Long-time concurrence `|𝒞1 − 𝒞2 e^{iθ1}|² / 2`, independent of damping,
/// dipole coupling and `θ2`.
pub fn steady_concurrence(init: &TwoAtomInit) -> f64 {
    let [c1, c2, _] = init.amplitudes();
    0.5 * (c1 - c2).norm_sqr()
}

/// Atomic state after tracing out the mode, in the `{ee, eg, ge, gg}` basis.
pub fn reduced_two_atom_state(state: &TwoAtomState) -> Result<DensityMatrix> {
    let mut m = CMatrix::zeros((4, 4));
    m[[1, 1]] = C64::new(state.ct1.norm_sqr(), 0.0);
    m[[2, 2]] = C64::new(state.ct2.norm_sqr(), 0.0);
    m[[1, 2]] = state.ct1 * state.ct2.conj();
    m[[2, 1]] = state.ct2 * state.ct1.conj();
    m[[3, 3]] = C64::new(state.ct3.norm_sqr() + state.lam, 0.0);
    DensityMatrix::new(m)
}

/// Eigenvalues below this are rounding noise. Taking their square root
/// would otherwise turn an `1e-17` residue into a `3e-9` error.
const EIG_FLOOR: f64 = 1e-14;

fn floored_sqrt(v: f64) -> f64 {
    if v < EIG_FLOOR {
        0.0
    } else {
        v.sqrt()
    }
}

/// Wootters concurrence of an arbitrary two-qubit state.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: 4 });
    }
    let r = rho.matrix();
    // σy⊗σy is real and basis-order independent up to an overall sign.
    let mut yy = CMatrix::zeros((4, 4));
    yy[[0, 3]] = C64::new(-1.0, 0.0);
    yy[[3, 0]] = C64::new(-1.0, 0.0);
    yy[[1, 2]] = C64::new(1.0, 0.0);
    yy[[2, 1]] = C64::new(1.0, 0.0);
    let flipped = yy.dot(&r.mapv(|z| z.conj())).dot(&yy);

    let (vals, vecs) = hermitian_eigen(r)?;
    let sqrt_diag = Array2::from_diag(&ndarray::Array1::from_iter(
        vals.iter().map(|&v| C64::new(floored_sqrt(v), 0.0)),
    ));
    let vh = vecs.t().mapv(|z| z.conj());
    let sqrt_rho = vecs.dot(&sqrt_diag).dot(&vh);
    let mut m = sqrt_rho.dot(&flipped).dot(&sqrt_rho);
    // Remove rounding asymmetry before the Hermitian solver checks it.
    let mt = m.t().mapv(|z| z.conj());
    m = (&m + &mt).mapv(|z| z * 0.5);

    let mut l: Vec<f64> = hermitian_eigenvalues(&m)?.into_iter().map(floored_sqrt).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{build_lindblad_oracle, Level};
    use std::f64::consts::PI;

    fn fig3_init(theta1: f64) -> TwoAtomInit {
        TwoAtomInit::new(0.5f64.sqrt(), 0.1f64.sqrt(), 0.4f64.sqrt(), theta1, 0.0).unwrap()
    }

    fn run(init: &TwoAtomInit, damping: f64, dipole: f64, t_end: f64, n: usize) -> Vec<TwoAtomState> {
        let p = ModelParams::resonant(0.0, 1.0, damping).unwrap().with_dipole(dipole).unwrap();
        let grid = TimeGrid::uniform(0.0, t_end, n).unwrap();
        evolve_two_atoms(init, &p, &grid, Solver::default()).unwrap()
    }

    #[test]
    fn dark_state_is_frozen() {
        let h = 0.5f64.sqrt();
        let init = TwoAtomInit::new(h, h, 0.0, PI, 0.0).unwrap();
        for s in run(&init, 6.0, 0.5, 20.0, 41) {
            assert!((s.concurrence() - 1.0).abs() < 1e-8);
            assert!(s.ct3.norm() < 1e-8);
        }
    }

    #[test]
    fn all_weight_in_mode() {
        let init = TwoAtomInit::new(0.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        let states = run(&init, 2.0, 0.0, 10.0, 11);
        assert_eq!(states[0].concurrence(), 0.0);
        assert!(states.iter().all(|s| s.concurrence() <= 0.5 + 1e-9));
    }

    #[test]
    fn weight_is_conserved() {
        for s in run(&fig3_init(1.0), 6.0, 0.5, 15.0, 151) {
            assert!((s.total_weight() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn steady_values() {
        let expected = [(0.0, 0.076393), (PI, 0.523607)];
        for (theta1, want) in expected {
            let init = fig3_init(theta1);
            assert!((steady_concurrence(&init) - want).abs() < 1e-6);
            for dipole in [0.0, 0.5] {
                let last = *run(&init, 6.0, dipole, 30.0, 3).last().unwrap();
                assert!((last.concurrence() - want).abs() < 1e-4, "θ1={theta1} D={dipole}");
            }
        }
        let start = run(&fig3_init(0.0), 6.0, 0.0, 1.0, 2)[0].concurrence();
        assert!((start - 0.447214).abs() < 1e-6);
    }

    #[test]
    fn steady_value_grows_with_phase() {
        let vals: Vec<f64> = (0..=20).map(|k| steady_concurrence(&fig3_init(PI * k as f64 / 20.0))).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn second_phase_leaves_steady_value() {
        let base = fig3_init(0.7);
        let reference = run(&base, 6.0, 0.5, 50.0, 2)[1].concurrence();
        for theta2 in [PI / 4.0, PI / 2.0, PI] {
            let init = base.with_phases(0.7, theta2).unwrap();
            assert!((run(&init, 6.0, 0.5, 50.0, 2)[1].concurrence() - reference).abs() < 1e-6);
        }
    }

    #[test]
    fn opposite_phase_never_loses_entanglement() {
        let states = run(&fig3_init(PI), 6.0, 0.0, 15.0, 1501);
        let c0 = states[0].concurrence();
        assert!(states.iter().all(|s| s.concurrence() >= c0 - 1e-9));
    }

    #[test]
    fn matches_lindblad_reference() {
        let init = fig3_init(1.3).with_phases(1.3, 0.4).unwrap();
        let p = ModelParams::new(0.3, 0.3, 1.0, 1.5, 0.5).unwrap();
        let grid = TimeGrid::uniform(0.0, 6.0, 13).unwrap();
        let states = evolve_two_atoms(&init, &p, &grid, Solver::default()).unwrap();

        let oracle = build_lindblad_oracle(&p, 2, 1).unwrap();
        let [c1, c2, c3] = init.amplitudes();
        use Level::{Excited as E, Ground as G};
        let rho0 = oracle
            .pure_state(&[(&[E, G], 0, c1), (&[G, E], 0, c2), (&[G, G], 1, c3)])
            .unwrap();
        let rhos = oracle.evolve(&rho0, &grid, Solver::default()).unwrap();
        for (s, rho) in states.iter().zip(&rhos) {
            let atoms = oracle.reduce_to_atoms(rho);
            let ours = reduced_two_atom_state(s).unwrap();
            let diff = (&atoms - ours.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(diff < 1e-8, "diff {diff}");
        }
    }

    #[test]
    fn wootters_agrees_with_closed_form() {
        for s in run(&fig3_init(2.0), 6.0, 0.5, 8.0, 17) {
            let rho = reduced_two_atom_state(&s).unwrap();
            let w = wootters_concurrence(&rho).unwrap();
            assert!((w - s.concurrence()).abs() < 1e-9, "{w} vs {}", s.concurrence());
        }
    }

    #[test]
    fn wootters_on_werner_states() {
        // p |Φ+><Φ+| + (1 − p) I/4 has concurrence max(0, (3p − 1)/2).
        for p in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
            let mut m = CMatrix::zeros((4, 4));
            for i in 0..4 {
                m[[i, i]] = C64::new((1.0 - p) / 4.0, 0.0);
            }
            for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
                m[[i, j]] += C64::new(p / 2.0, 0.0);
            }
            let c = wootters_concurrence(&DensityMatrix::new(m).unwrap()).unwrap();
            assert!((c - ((3.0 * p - 1.0) / 2.0).max(0.0)).abs() < 1e-9, "p={p}");
        }
        let product = DensityMatrix::diagonal(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(wootters_concurrence(&product).unwrap() < 1e-12);
        let wrong = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        assert!(wootters_concurrence(&wrong).is_err());
    }
}
