//! Brute-force Lindblad integration on a truncated Fock space.
//!
//! This is the reference every reduced-sector solver is checked against. It
//! assembles the atom and mode operators by explicit tensor products and
//! integrates the full density matrix, sharing no code with the propagator or
//! the sector equations.

use ndarray::linalg::kron;
use ndarray::{ArrayView2, ArrayViewMut2};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::{CMatrix, DensityMatrix, Solver, TimeGrid, C64, I};

/// Weight tolerated on basis states whose dynamics the cutoff would distort.
pub const LEAKAGE_TOL: f64 = 1e-9;

/// Atomic level. `Excited` is basis index 0, matching the `{|e>, |g>}`
/// ordering of every reduced atom state in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Excited,
    Ground,
}

impl Level {
    fn index(self) -> usize {
        match self {
            Level::Excited => 0,
            Level::Ground => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LindbladOracle {
    params: ModelParams,
    n_atoms: usize,
    n_max: usize,
    hamiltonian: CMatrix,
    lowering: CMatrix,
    raising: CMatrix,
    number: CMatrix,
    /// Basis indices whose excitation number exceeds the cutoff.
    truncated: Vec<usize>,
}

fn sigma_minus() -> CMatrix {
    let mut m = CMatrix::zeros((2, 2));
    m[[Level::Ground.index(), Level::Excited.index()]] = C64::new(1.0, 0.0);
    m
}

fn annihilation(n_max: usize) -> CMatrix {
    let mut b = CMatrix::zeros((n_max + 1, n_max + 1));
    for n in 1..=n_max {
        b[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    b
}

fn dagger(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

fn kron_all(factors: &[CMatrix]) -> CMatrix {
    factors[1..].iter().fold(factors[0].clone(), |acc, f| kron(&acc, f))
}

/// Assemble the master-equation generator for `n_atoms` (1 or 2) atoms
/// sharing one damped mode truncated at `n_max` photons.
pub fn build_lindblad_oracle(params: &ModelParams, n_atoms: usize, n_max: usize) -> Result<LindbladOracle> {
    params.validate()?;
    if !(1..=2).contains(&n_atoms) {
        return Err(Error::invalid("n_atoms", "must be 1 or 2"));
    }
    if n_max == 0 {
        return Err(Error::invalid("n_max", "photon cutoff must be at least 1"));
    }
    let id2 = CMatrix::eye(2);
    let idm = CMatrix::eye(n_max + 1);
    let sm = sigma_minus();

    let atom_lowering: Vec<CMatrix> = (0..n_atoms)
        .map(|k| {
            let mut factors: Vec<CMatrix> = (0..n_atoms).map(|j| if j == k { sm.clone() } else { id2.clone() }).collect();
            factors.push(idm.clone());
            kron_all(&factors)
        })
        .collect();
    let mut mode_factors: Vec<CMatrix> = vec![id2.clone(); n_atoms];
    mode_factors.push(annihilation(n_max));
    let b = kron_all(&mode_factors);
    let bd = dagger(&b);
    let number = bd.dot(&b);

    let mut h = number.mapv(|z| z * params.omega_c);
    for s in &atom_lowering {
        let sp = dagger(s);
        h = h + sp.dot(s).mapv(|z| z * params.omega0);
        h = h + (s.dot(&bd) + sp.dot(&b)).mapv(|z| z * params.coupling);
    }
    if n_atoms == 2 {
        let (sa, sb) = (&atom_lowering[0], &atom_lowering[1]);
        let hop = dagger(sa).dot(sb) + sa.dot(&dagger(sb));
        h = h + hop.mapv(|z| z * params.dipole);
    }

    let dim = h.nrows();
    let truncated = (0..dim)
        .filter(|&idx| {
            let n = idx % (n_max + 1);
            let atoms = idx / (n_max + 1);
            let excited = (0..n_atoms).filter(|k| (atoms >> (n_atoms - 1 - k)) & 1 == 0).count();
            excited + n > n_max
        })
        .collect();

    Ok(LindbladOracle {
        params: *params,
        n_atoms,
        n_max,
        hamiltonian: h,
        lowering: b,
        raising: bd,
        number,
        truncated,
    })
}

impl LindbladOracle {
    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    /// Basis index of `|atoms..., n>`.
    pub fn index(&self, atoms: &[Level], photons: usize) -> usize {
        assert_eq!(atoms.len(), self.n_atoms, "one level per atom");
        assert!(photons <= self.n_max, "photon number above cutoff");
        let a = atoms.iter().fold(0, |acc, l| acc * 2 + l.index());
        a * (self.n_max + 1) + photons
    }

    /// Normalized pure state from `(atoms, photons, amplitude)` components.
    pub fn pure_state(&self, components: &[(&[Level], usize, C64)]) -> Result<DensityMatrix> {
        let mut psi = vec![C64::new(0.0, 0.0); self.dim()];
        for (atoms, n, amp) in components {
            psi[self.index(atoms, *n)] += *amp;
        }
        DensityMatrix::pure(&psi)
    }

    /// `−i[H, ρ] − (Γ/2)(b†bρ − 2bρb† + ρb†b)`.
    pub fn apply(&self, rho: ArrayView2<C64>, mut out: ArrayViewMut2<C64>) {
        let h = &self.hamiltonian;
        let half_gamma = 0.5 * self.params.damping;
        let hr = h.dot(&rho);
        let rh = rho.dot(h);
        let nr = self.number.dot(&rho);
        let rn = rho.dot(&self.number);
        let jump = self.lowering.dot(&rho).dot(&self.raising);
        ndarray::Zip::from(&mut out)
            .and(&hr)
            .and(&rh)
            .and(&nr)
            .and(&rn)
            .and(&jump)
            .for_each(|o, &a, &b, &c, &d, &j| {
                *o = -I * (a - b) - (c + d - j * 2.0) * half_gamma;
            });
    }

    pub fn rhs(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(rho.raw_dim());
        self.apply(rho.view(), out.view_mut());
        out
    }

    /// Weight on basis states the cutoff cannot represent faithfully.
    pub fn leakage(&self, rho: &CMatrix) -> f64 {
        self.truncated.iter().map(|&i| rho[[i, i]].re.abs()).sum()
    }

    /// Integrate from `rho0` and return ρ(t) at each grid point.
    pub fn evolve(&self, rho0: &DensityMatrix, grid: &TimeGrid, solver: Solver) -> Result<Vec<CMatrix>> {
        let d = self.dim();
        if rho0.dim() != d {
            return Err(Error::DimensionMismatch { left: rho0.dim(), right: d });
        }
        let leak = self.leakage(rho0.matrix());
        if leak > LEAKAGE_TOL {
            return Err(Error::CutoffTooSmall {
                n_max: self.n_max,
                leakage: leak,
                t: grid.start(),
            });
        }
        let y0: Vec<C64> = rho0.matrix().iter().copied().collect();
        let ys = solver.integrate(
            |_t, y, dy| {
                let rho = ArrayView2::from_shape((d, d), y).expect("square state");
                let out = ArrayViewMut2::from_shape((d, d), dy).expect("square state");
                self.apply(rho, out);
            },
            &y0,
            grid,
        )?;
        let mut out = Vec::with_capacity(ys.len());
        for (t, y) in grid.points().iter().zip(ys) {
            let mut m = CMatrix::from_shape_vec((d, d), y).expect("square state");
            for i in 0..d {
                m[[i, i]].im = 0.0;
                for j in (i + 1)..d {
                    let avg = 0.5 * (m[[i, j]] + m[[j, i]].conj());
                    m[[i, j]] = avg;
                    m[[j, i]] = avg.conj();
                }
            }
            let leak = self.leakage(&m);
            if leak > LEAKAGE_TOL {
                return Err(Error::CutoffTooSmall {
                    n_max: self.n_max,
                    leakage: leak,
                    t: *t,
                });
            }
            out.push(m);
        }
        Ok(out)
    }

    /// Trace over the mode, leaving the atom(s) in the `{e, g}^n` basis.
    pub fn reduce_to_atoms(&self, rho: &CMatrix) -> CMatrix {
        let m = self.n_max + 1;
        let na = 1 << self.n_atoms;
        CMatrix::from_shape_fn((na, na), |(i, j)| (0..m).map(|n| rho[[i * m + n, j * m + n]]).sum())
    }

    /// Trace over the atom(s), leaving the mode in the Fock basis.
    pub fn reduce_to_mode(&self, rho: &CMatrix) -> CMatrix {
        let m = self.n_max + 1;
        let na = 1 << self.n_atoms;
        CMatrix::from_shape_fn((m, m), |(i, j)| (0..na).map(|a| rho[[a * m + i, a * m + j]]).sum())
    }
}
