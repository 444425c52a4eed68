//! One-dimensional Hubbard Hamiltonian, ground states and ebit weights.
//!
//! ```text
//! H = -t Σ_<ij>,σ (c†_iσ c_jσ + c†_jσ c_iσ) + U Σ_i n_i↑ n_i↓
//! ```

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockState, LadderKind, Orbital, SectorBasis, Spin, WaveFunction};
use crate::linalg::{self, HermitianEigen};

/// Relative gap below which the ground level counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HubbardParams {
    pub num_sites: usize,
    pub t: f64,
    pub u: f64,
    pub boundary: Boundary,
}

impl HubbardParams {
    pub fn new(num_sites: usize, t: f64, u: f64, boundary: Boundary) -> Self {
        Self {
            num_sites,
            t,
            u,
            boundary,
        }
    }

    /// Open chain with `t = 1`, parameterized by `U/t` alone.
    pub fn open_chain(num_sites: usize, u_over_t: f64) -> Self {
        Self::new(num_sites, 1.0, u_over_t, Boundary::Open)
    }

    /// Nearest-neighbour bonds. Two sites always share a single bond.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.num_sites;
        let mut bonds: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic && n > 2 {
            bonds.push((n - 1, 0));
        }
        bonds
    }

    fn validate(&self) -> Result<()> {
        if self.num_sites == 0 {
            return Err(Error::InvalidParameter("chain needs at least one site".into()));
        }
        if !self.t.is_finite() || !self.u.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "t = {} and U = {} must be finite",
                self.t, self.u
            )));
        }
        Ok(())
    }
}

/// Dense operator over a sector basis.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    basis: Arc<SectorBasis>,
    matrix: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn new(basis: Arc<SectorBasis>, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != basis.dim() || matrix.ncols() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { basis, matrix })
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.matrix)
    }

    pub fn entry(&self, row: FockState, col: FockState) -> Option<Complex64> {
        Some(self.matrix[(self.basis.index_of(row)?, self.basis.index_of(col)?)])
    }
}

pub fn build_hamiltonian(params: &HubbardParams, basis: Arc<SectorBasis>) -> Result<OperatorMatrix> {
    params.validate()?;
    if basis.num_sites() != params.num_sites {
        return Err(Error::SiteCountMismatch {
            basis: basis.num_sites(),
            params: params.num_sites,
        });
    }
    let dim = basis.dim();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    let bonds = params.bonds();
    for (col, &state) in basis.states().iter().enumerate() {
        let doubles = (0..params.num_sites)
            .filter(|&i| state.occupation(Orbital::up(i)) == 1 && state.occupation(Orbital::down(i)) == 1)
            .count();
        h[(col, col)] += Complex64::new(params.u * doubles as f64, 0.0);

        for &(i, j) in &bonds {
            for spin in Spin::BOTH {
                for (to, from) in [(i, j), (j, i)] {
                    let Some((s1, mid)) = state.apply(Orbital::new(from, spin), LadderKind::Annihilate) else {
                        continue;
                    };
                    let Some((s2, next)) = mid.apply(Orbital::new(to, spin), LadderKind::Create) else {
                        continue;
                    };
                    let row = basis.index_of(next).expect("hopping conserves particle number and Sz");
                    h[(row, col)] += Complex64::new(-params.t * s1 * s2, 0.0);
                }
            }
        }
    }
    OperatorMatrix::new(basis, h)
}

/// Full spectrum of a sector operator.
#[derive(Debug, Clone)]
pub struct Spectrum {
    basis: Arc<SectorBasis>,
    eigen: HermitianEigen,
}

impl Spectrum {
    pub fn energies(&self) -> &[f64] {
        &self.eigen.values
    }

    /// Eigenvector `k` with the phase convention of [`ground_state`].
    pub fn state(&self, k: usize) -> WaveFunction {
        let v = fix_phase(self.eigen.vector(k));
        WaveFunction::normalized(self.basis.clone(), v).expect("eigenvectors have unit norm")
    }

    pub fn gap(&self) -> f64 {
        match self.eigen.values.as_slice() {
            [e0, e1, ..] => e1 - e0,
            _ => f64::INFINITY,
        }
    }
}

pub fn spectrum(h: &OperatorMatrix) -> Spectrum {
    Spectrum {
        basis: h.basis.clone(),
        eigen: linalg::eigh(&h.matrix),
    }
}

/// Rotates so the largest-magnitude amplitude (first on ties) is real positive.
fn fix_phase(mut v: nalgebra::DVector<Complex64>) -> nalgebra::DVector<Complex64> {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return v;
    }
    let pivot = v
        .iter()
        .find(|z| z.norm() >= max * (1.0 - 1e-9))
        .copied()
        .expect("max is attained");
    let phase = pivot.conj() / pivot.norm();
    v.iter_mut().for_each(|z| *z *= phase);
    v
}

/// Lowest eigenpair. Fails when the ground level is degenerate.
pub fn ground_state(h: &OperatorMatrix) -> Result<(f64, WaveFunction)> {
    let spec = spectrum(h);
    let energies = spec.energies();
    let Some(&e0) = energies.first() else {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    };
    let gap = spec.gap();
    if gap < DEGENERACY_TOL * e0.abs().max(1.0) {
        return Err(Error::DegenerateGroundState { energy: e0, gap });
    }
    Ok((e0, spec.state(0)))
}

/// Half-filled, Sz = 0 ground state of a chain with `t = 1`.
pub fn half_filled_ground_state(num_sites: usize, u_over_t: f64, boundary: Boundary) -> Result<(f64, WaveFunction)> {
    if !num_sites.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "Sz = 0 at half filling needs an even number of sites, got {num_sites}"
        )));
    }
    let params = HubbardParams::new(num_sites, 1.0, u_over_t, boundary);
    let basis = Arc::new(SectorBasis::new(num_sites, num_sites, 0)?);
    ground_state(&build_hamiltonian(&params, basis)?)
}

/// Weights of the charge pair {|1100⟩, |0011⟩} and the spin pair {|1001⟩, |0110⟩}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EbitWeights {
    pub a_mag: f64,
    pub b_mag: f64,
}

const PAIR_SYMMETRY_TOL: f64 = 1e-9;

pub fn ebit_weights(wf: &WaveFunction) -> Result<EbitWeights> {
    let basis = wf.basis();
    if basis.num_sites() != 2 || basis.num_electrons() != 2 || basis.two_sz() != 0 {
        return Err(Error::InvalidParameter(
            "ebit weights are defined on the two-site, two-electron, Sz = 0 sector".into(),
        ));
    }
    let amp = |label: &str| wf.amplitude(FockState::parse(label).expect("static label")).norm();
    let (a1, a2) = (amp("1100"), amp("0011"));
    let (b1, b2) = (amp("1001"), amp("0110"));
    let a_diff = (a1 - a2).abs();
    let b_diff = (b1 - b2).abs();
    if a_diff > PAIR_SYMMETRY_TOL || b_diff > PAIR_SYMMETRY_TOL {
        return Err(Error::AsymmetricState { a_diff, b_diff });
    }
    Ok(EbitWeights {
        a_mag: (a1 * a1 + a2 * a2).sqrt(),
        b_mag: (b1 * b1 + b2 * b2).sqrt(),
    })
}
