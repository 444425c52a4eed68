//! Single-site (Zanardi) entanglement in Fock space.
//!
//! For states that conserve particle number and Sz the single-site reduced
//! density matrix is diagonal in `{|0⟩, |↑⟩, |↓⟩, |↑↓⟩}` with weights
//!
//! ```text
//! w  = ⟨n↑ n↓⟩
//! u⁺ = ⟨n↑⟩ - w
//! u⁻ = ⟨n↓⟩ - w
//! z  = 1 - u⁺ - u⁻ - w
//! ```
//!
//! and the entanglement of the site with the rest of the chain is the Shannon
//! entropy of those weights in bits. [`reduced_density_matrix`] computes the
//! full partial trace independently, fermionic signs included.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockState, FockVector, Orbital, WaveFunction};
use crate::hubbard::{half_filled_ground_state, Boundary};
use crate::linalg;

/// Values this close below zero are treated as zero before taking logs.
const CLAMP_TOL: f64 = 1e-14;

/// The four occupation states of one site, in density-matrix index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalState {
    Empty,
    Up,
    Down,
    Double,
}

impl LocalState {
    pub const ALL: [LocalState; 4] = [LocalState::Empty, LocalState::Up, LocalState::Down, LocalState::Double];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn of(state: FockState, site: usize) -> Self {
        match (
            state.occupation(Orbital::up(site)),
            state.occupation(Orbital::down(site)),
        ) {
            (0, 0) => LocalState::Empty,
            (1, 0) => LocalState::Up,
            (0, 1) => LocalState::Down,
            _ => LocalState::Double,
        }
    }

    pub fn electrons(self) -> usize {
        match self {
            LocalState::Empty => 0,
            LocalState::Up | LocalState::Down => 1,
            LocalState::Double => 2,
        }
    }

    pub fn two_sz(self) -> i32 {
        match self {
            LocalState::Up => 1,
            LocalState::Down => -1,
            _ => 0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            LocalState::Empty => "0",
            LocalState::Up => "↑",
            LocalState::Down => "↓",
            LocalState::Double => "↑↓",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalCoefficients {
    pub z: f64,
    pub u_plus: f64,
    pub u_minus: f64,
    pub w: f64,
}

impl LocalCoefficients {
    pub fn as_array(&self) -> [f64; 4] {
        [self.z, self.u_plus, self.u_minus, self.w]
    }

    pub fn closure_defect(&self) -> f64 {
        (self.as_array().iter().sum::<f64>() - 1.0).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub site: usize,
    pub coefficients: LocalCoefficients,
    pub entropy: f64,
}

pub fn local_coefficients(wf: &WaveFunction, site: usize) -> LocalCoefficients {
    let (mut n_up, mut n_down, mut double) = (0.0, 0.0, 0.0);
    for (state, amp) in wf.iter() {
        let p = amp.norm_sqr();
        let up = state.occupation(Orbital::up(site)) == 1;
        let down = state.occupation(Orbital::down(site)) == 1;
        if up {
            n_up += p;
        }
        if down {
            n_down += p;
        }
        if up && down {
            double += p;
        }
    }
    let u_plus = n_up - double;
    let u_minus = n_down - double;
    LocalCoefficients {
        z: 1.0 - u_plus - u_minus - double,
        u_plus,
        u_minus,
        w: double,
    }
}

/// `-p log₂ p` with `0 log₂ 0 = 0`.
fn entropy_term(p: f64) -> f64 {
    let p = if p < 0.0 && p > -CLAMP_TOL { 0.0 } else { p };
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Local entanglement in bits from the four local weights.
pub fn local_entanglement(coeffs: &LocalCoefficients) -> f64 {
    coeffs.as_array().into_iter().map(entropy_term).sum()
}

/// Half-filled form `-2w log₂ w - 2(½ - w) log₂(½ - w)`.
pub fn half_filled_entanglement(w: f64) -> f64 {
    2.0 * entropy_term(w) + 2.0 * entropy_term(0.5 - w)
}

pub fn entanglement_report(wf: &WaveFunction, site: usize) -> EntanglementReport {
    let coefficients = local_coefficients(wf, site);
    EntanglementReport {
        site,
        coefficients,
        entropy: local_entanglement(&coefficients),
    }
}

/// Partial trace over every site except `site`.
///
/// Each basis state is reordered so that the orbitals of `site` come first;
/// moving them past the occupied lower orbitals contributes
/// `(-1)^(n_site · n_below)`.
pub fn reduced_density_matrix(state: &FockVector, site: usize) -> Matrix4<Complex64> {
    let site_mask = 0b11u64 << (2 * site);
    let mut by_env: BTreeMap<u64, [Complex64; 4]> = BTreeMap::new();
    for (fock, amp) in state.iter() {
        let local = LocalState::of(fock, site);
        let below = fock.occupied_below(2 * site) as usize;
        let sign = if (local.electrons() * below).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        let env = fock.bits() & !site_mask;
        by_env.entry(env).or_default()[local.index()] += amp * sign;
    }
    let mut rho = Matrix4::zeros();
    for amps in by_env.values() {
        for r in 0..4 {
            for c in 0..4 {
                rho[(r, c)] += amps[r] * amps[c].conj();
            }
        }
    }
    rho
}

/// von Neumann entropy in bits of a Hermitian density matrix.
pub fn density_matrix_entropy(rho: &Matrix4<Complex64>) -> f64 {
    let dense = DMatrix::from_iterator(4, 4, rho.iter().copied());
    linalg::eigh(&dense).values.into_iter().map(entropy_term).sum()
}

/// Uniform grid of `points` values on `[min, max]`, exactly antisymmetric
/// when `min == -max`.
pub fn uniform_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !min.is_finite() || !max.is_finite() || min >= max {
        return Err(Error::InvalidParameter(format!(
            "grid needs points >= 2 and finite min < max (got [{min}, {max}], {points} points)"
        )));
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let k = i as f64;
            (min * (last - k) + max * k) / last
        })
        .collect())
}

pub const DEFAULT_SWEEP: (f64, f64, usize) = (-20.0, 20.0, 401);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub u_over_t: f64,
    pub coefficients: LocalCoefficients,
    pub entropy: f64,
}

/// Local entanglement of site 0 in the half-filled, Sz = 0 ground state for
/// every `U/t` in `grid`. Output order follows `grid`.
pub fn entanglement_sweep(grid: &[f64], num_sites: usize, boundary: Boundary) -> Result<Vec<SweepPoint>> {
    grid.par_iter()
        .map(|&u_over_t| {
            let (_, wf) = half_filled_ground_state(num_sites, u_over_t, boundary).map_err(|e| Error::SweepPoint {
                u_over_t,
                source: Box::new(e),
            })?;
            let coefficients = local_coefficients(&wf, 0);
            Ok(SweepPoint {
                u_over_t,
                coefficients,
                entropy: half_filled_entanglement(coefficients.w),
            })
        })
        .collect()
}

/// One conditioning branch of [`CorrelationReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationBranch {
    pub local_state: LocalState,
    pub probability: f64,
    /// Electron count of the remaining sites, `None` when the branch has no weight.
    pub complement_electrons: Option<usize>,
    pub complement_two_sz: Option<i32>,
    /// Whether both conditional distributions are concentrated on one value.
    pub point_mass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub site: usize,
    pub num_sites: usize,
    pub total_electrons: usize,
    pub total_two_sz: i32,
    pub branches: Vec<CorrelationBranch>,
}

impl CorrelationReport {
    pub fn all_point_masses(&self) -> bool {
        self.branches.iter().all(|b| b.point_mass)
    }

    /// Whether every weighted branch carries the complement numbers fixed by
    /// conservation: `(N - n_ν, 2Sz - 2sz_ν)`.
    pub fn matches_conservation(&self) -> bool {
        self.branches.iter().all(|b| {
            b.complement_electrons
                .is_none_or(|n| n + b.local_state.electrons() == self.total_electrons)
                && b.complement_two_sz
                    .is_none_or(|s| s + b.local_state.two_sz() == self.total_two_sz)
        })
    }

    pub fn branch(&self, local: LocalState) -> &CorrelationBranch {
        &self.branches[local.index()]
    }
}

const BRANCH_TOL: f64 = 1e-12;

/// Conditions on the occupation of `site` and reports what the rest of the
/// chain then holds.
pub fn complement_correlation(state: &FockVector, site: usize) -> Result<CorrelationReport> {
    let num_sites = state.num_orbitals() / 2;
    if site >= num_sites {
        return Err(Error::InvalidParameter(format!(
            "site {site} out of range for {num_sites} sites"
        )));
    }
    let total = state.norm_sqr();
    if total == 0.0 {
        return Err(Error::NotNormalized { norm_sqr: 0.0 });
    }
    let mut sectors: BTreeMap<(usize, i32), f64> = BTreeMap::new();
    for (fock, amp) in state.iter() {
        *sectors.entry((fock.num_electrons(), fock.two_sz())).or_default() += amp.norm_sqr() / total;
    }
    sectors.retain(|_, p| *p > BRANCH_TOL);
    if sectors.len() != 1 {
        return Err(Error::MixedSector(format!(
            "weight spread over (N, 2Sz) sectors {:?}",
            sectors.keys().collect::<Vec<_>>()
        )));
    }
    let (&(total_electrons, total_two_sz), _) = sectors.iter().next().expect("one sector");

    let mut per_branch: [BTreeMap<(usize, i32), f64>; 4] = Default::default();
    for (fock, amp) in state.iter() {
        let local = LocalState::of(fock, site);
        let key = (fock.num_electrons() - local.electrons(), fock.two_sz() - local.two_sz());
        *per_branch[local.index()].entry(key).or_default() += amp.norm_sqr() / total;
    }

    let branches = LocalState::ALL
        .iter()
        .map(|&local| {
            let dist = &per_branch[local.index()];
            let probability: f64 = dist.values().sum();
            if probability <= BRANCH_TOL {
                return CorrelationBranch {
                    local_state: local,
                    probability,
                    complement_electrons: None,
                    complement_two_sz: None,
                    point_mass: true,
                };
            }
            let (&(n, s), &p_max) = dist
                .iter()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .expect("nonempty distribution");
            CorrelationBranch {
                local_state: local,
                probability,
                complement_electrons: Some(n),
                complement_two_sz: Some(s),
                point_mass: (probability - p_max) <= BRANCH_TOL * probability.max(1.0),
            }
        })
        .collect();

    Ok(CorrelationReport {
        site,
        num_sites,
        total_electrons,
        total_two_sz,
        branches,
    })
}
