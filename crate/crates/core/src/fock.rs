//! Occupation-number basis and fermionic ladder operators.
//!
//! Spin-orbitals are indexed linearly as `2 * site + spin` with spin up = 0
//! and spin down = 1. A [`FockState`] stores orbital `p` in bit `p` of a
//! `u64`. Ladder operators follow the Jordan-Wigner convention: `c†_p` and
//! `c_p` pick up `(-1)^k` where `k` counts the occupied orbitals with a
//! strictly smaller linear index than `p`.
//!
//! Kets print orbital 0 leftmost, so `|1100⟩` on two sites is the state with
//! site 0 doubly occupied. Sector bases are ordered by the printed string read
//! as a binary number, ascending.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalization tolerance for [`WaveFunction`].
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    fn offset(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

/// A spin-orbital on one site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Orbital {
    pub site: usize,
    pub spin: Spin,
}

impl Orbital {
    pub fn new(site: usize, spin: Spin) -> Self {
        Self { site, spin }
    }

    pub fn up(site: usize) -> Self {
        Self::new(site, Spin::Up)
    }

    pub fn down(site: usize) -> Self {
        Self::new(site, Spin::Down)
    }

    /// Linear orbital index `2 * site + spin`.
    pub fn index(self) -> usize {
        2 * self.site + self.spin.offset()
    }

    pub fn from_index(index: usize) -> Self {
        let spin = if index.is_multiple_of(2) { Spin::Up } else { Spin::Down };
        Self::new(index / 2, spin)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LadderKind {
    Create,
    Annihilate,
}

/// Occupation pattern of up to 64 spin-orbitals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FockState(u64);

impl FockState {
    pub const VACUUM: FockState = FockState(0);

    pub fn from_bits(bits: u64) -> Self {
        Self(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// Parses a printed occupation string such as `"1001"` (orbital 0 first).
    pub fn parse(label: &str) -> Result<Self> {
        if label.len() > 64 {
            return Err(Error::InvalidParameter(format!(
                "occupation label `{label}` exceeds 64 orbitals"
            )));
        }
        let mut bits = 0u64;
        for (p, ch) in label.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => bits |= 1 << p,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "invalid occupation character `{other}` in `{label}`"
                    )))
                }
            }
        }
        Ok(Self(bits))
    }

    pub fn from_orbitals(orbitals: impl IntoIterator<Item = Orbital>) -> Self {
        Self(orbitals.into_iter().fold(0, |acc, o| acc | (1 << o.index())))
    }

    pub fn is_occupied(self, index: usize) -> bool {
        self.0 >> index & 1 == 1
    }

    pub fn occupation(self, orbital: Orbital) -> u8 {
        self.is_occupied(orbital.index()) as u8
    }

    pub fn num_electrons(self) -> usize {
        self.0.count_ones() as usize
    }

    /// `n_up - n_down`, i.e. twice the total Sz.
    pub fn two_sz(self) -> i32 {
        const UP_MASK: u64 = 0x5555_5555_5555_5555;
        (self.0 & UP_MASK).count_ones() as i32 - (self.0 & !UP_MASK).count_ones() as i32
    }

    /// Number of occupied orbitals with linear index strictly below `index`.
    pub fn occupied_below(self, index: usize) -> u32 {
        (self.0 & ((1u64 << index) - 1)).count_ones()
    }

    /// Jordan-Wigner sign `(-1)^(occupied orbitals below index)`.
    pub fn jw_sign(self, index: usize) -> f64 {
        if self.occupied_below(index).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Applies `c†` or `c` on `orbital`. Returns `None` when Pauli-forbidden.
    pub fn apply(self, orbital: Orbital, kind: LadderKind) -> Option<(f64, FockState)> {
        let p = orbital.index();
        let occupied = self.is_occupied(p);
        match (kind, occupied) {
            (LadderKind::Create, false) => Some((self.jw_sign(p), Self(self.0 | 1 << p))),
            (LadderKind::Annihilate, true) => Some((self.jw_sign(p), Self(self.0 & !(1 << p)))),
            _ => None,
        }
    }

    /// Binary value of the printed string, orbital 0 most significant.
    pub fn printed_value(self, num_orbitals: usize) -> u64 {
        if num_orbitals == 0 {
            0
        } else {
            self.0.reverse_bits() >> (64 - num_orbitals)
        }
    }

    pub fn from_printed_value(value: u64, num_orbitals: usize) -> Self {
        if num_orbitals == 0 {
            Self(0)
        } else {
            Self((value << (64 - num_orbitals)).reverse_bits())
        }
    }

    pub fn bit_string(self, num_orbitals: usize) -> String {
        (0..num_orbitals)
            .map(|p| if self.is_occupied(p) { '1' } else { '0' })
            .collect()
    }

    pub fn ket(self, num_orbitals: usize) -> Ket {
        Ket {
            state: self,
            num_orbitals,
        }
    }
}

/// Printable `|b₀b₁…⟩` form of a [`FockState`].
#[derive(Debug, Clone, Copy)]
pub struct Ket {
    state: FockState,
    num_orbitals: usize,
}

impl fmt::Display for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}⟩", self.state.bit_string(self.num_orbitals))
    }
}

fn choose(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Site masks over `num_sites` bits with exactly `count` bits set.
fn combinations(num_sites: usize, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(choose(num_sites, count));
    if count == 0 {
        out.push(0);
        return out;
    }
    // Gosper's hack.
    let mut mask: u64 = (1 << count) - 1;
    let limit: u64 = 1 << num_sites;
    while mask < limit {
        out.push(mask);
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    out
}

/// All Fock states of `num_sites` sites with fixed electron number and 2·Sz.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    num_sites: usize,
    num_electrons: usize,
    two_sz: i32,
    states: Vec<FockState>,
}

/// Largest chain handled by the bit-packed representation.
pub const MAX_SITES: usize = 32;

impl SectorBasis {
    pub fn new(num_sites: usize, num_electrons: usize, two_sz: i32) -> Result<Self> {
        if num_sites > MAX_SITES {
            return Err(Error::InvalidParameter(format!(
                "{num_sites} sites exceed the {MAX_SITES}-site limit"
            )));
        }
        let empty = Error::EmptySector {
            num_sites,
            num_electrons,
            two_sz,
        };
        let n = num_electrons as i64;
        let sz = two_sz as i64;
        if num_electrons > 2 * num_sites || sz.abs() > n || (n + sz) % 2 != 0 {
            return Err(empty);
        }
        let n_up = ((n + sz) / 2) as usize;
        let n_down = ((n - sz) / 2) as usize;
        if n_up > num_sites || n_down > num_sites {
            return Err(empty);
        }

        let ups = combinations(num_sites, n_up);
        let downs = combinations(num_sites, n_down);
        let mut states = Vec::with_capacity(ups.len() * downs.len());
        for &up in &ups {
            for &down in &downs {
                let mut bits = 0u64;
                for site in 0..num_sites {
                    bits |= (up >> site & 1) << (2 * site);
                    bits |= (down >> site & 1) << (2 * site + 1);
                }
                states.push(FockState(bits));
            }
        }
        let width = 2 * num_sites;
        states.sort_by_key(|s| s.printed_value(width));
        Ok(Self {
            num_sites,
            num_electrons,
            two_sz,
            states,
        })
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn num_orbitals(&self) -> usize {
        2 * self.num_sites
    }

    pub fn num_electrons(&self) -> usize {
        self.num_electrons
    }

    pub fn two_sz(&self) -> i32 {
        self.two_sz
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn contains(&self, state: FockState) -> bool {
        self.index_of(state).is_some()
    }

    pub fn index_of(&self, state: FockState) -> Option<usize> {
        let width = self.num_orbitals();
        if width < 64 && state.bits() >> width != 0 {
            return None;
        }
        let key = state.printed_value(width);
        self.states.binary_search_by_key(&key, |s| s.printed_value(width)).ok()
    }
}

/// Shorthand for [`SectorBasis::new`].
pub fn build_sector_basis(num_sites: usize, num_electrons: usize, two_sz: i32) -> Result<SectorBasis> {
    SectorBasis::new(num_sites, num_electrons, two_sz)
}

/// A normalized state over a [`SectorBasis`].
#[derive(Debug, Clone)]
pub struct WaveFunction {
    basis: Arc<SectorBasis>,
    amplitudes: DVector<Complex64>,
}

impl WaveFunction {
    /// Wraps `amplitudes`, which must already be normalized to [`NORM_TOL`].
    pub fn new(basis: Arc<SectorBasis>, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: amplitudes.len(),
            });
        }
        let norm_sqr = amplitudes.norm_squared();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { basis, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(basis: Arc<SectorBasis>, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: norm * norm });
        }
        Ok(Self {
            basis,
            amplitudes: amplitudes.unscale(norm),
        })
    }

    /// The single basis state `state`.
    pub fn basis_state(basis: Arc<SectorBasis>, state: FockState) -> Result<Self> {
        let index = basis.index_of(state).ok_or(Error::OutsideSector { weight: 1.0 })?;
        let mut amplitudes = DVector::zeros(basis.dim());
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { basis, amplitudes })
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, state: FockState) -> Complex64 {
        self.basis
            .index_of(state)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (FockState, Complex64)> + '_ {
        self.basis.states().iter().copied().zip(self.amplitudes.iter().copied())
    }

    pub fn to_fock_vector(&self) -> FockVector {
        FockVector::from_terms(self.basis.num_orbitals(), self.iter())
    }
}

/// An unnormalized superposition over arbitrary Fock states.
///
/// Ladder operators map sector states outside their sector, so their results
/// are carried in this sparse form until projected back with
/// [`FockVector::into_wavefunction`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FockVector {
    num_orbitals: usize,
    terms: BTreeMap<FockState, Complex64>,
}

impl FockVector {
    pub fn zero(num_orbitals: usize) -> Self {
        Self {
            num_orbitals,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(num_orbitals: usize, terms: impl IntoIterator<Item = (FockState, Complex64)>) -> Self {
        let mut out = Self::zero(num_orbitals);
        for (state, amp) in terms {
            out.add(state, amp);
        }
        out
    }

    pub fn basis_state(num_orbitals: usize, state: FockState) -> Self {
        Self::from_terms(num_orbitals, [(state, Complex64::new(1.0, 0.0))])
    }

    pub fn num_orbitals(&self) -> usize {
        self.num_orbitals
    }

    pub fn add(&mut self, state: FockState, amp: Complex64) {
        if amp == Complex64::new(0.0, 0.0) {
            return;
        }
        *self.terms.entry(state).or_default() += amp;
    }

    pub fn amplitude(&self, state: FockState) -> Complex64 {
        self.terms.get(&state).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (FockState, Complex64)> + '_ {
        self.terms.iter().map(|(&s, &a)| (s, a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm_sqr() <= tol * tol
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_terms(self.num_orbitals, self.iter().map(|(s, a)| (s, a * factor)))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.iter().map(|(s, a)| a.conj() * other.amplitude(s)).sum()
    }

    /// Applies `c†`/`c` on `orbital` to every term.
    pub fn apply(&self, orbital: Orbital, kind: LadderKind) -> FockVector {
        let mut out = Self::zero(self.num_orbitals);
        for (state, amp) in self.iter() {
            if let Some((sign, next)) = state.apply(orbital, kind) {
                out.add(next, amp * sign);
            }
        }
        out
    }

    /// Projects onto `basis` and normalizes. Fails if any weight lies outside.
    pub fn into_wavefunction(self, basis: Arc<SectorBasis>) -> Result<WaveFunction> {
        let mut amplitudes = DVector::zeros(basis.dim());
        let mut outside = 0.0;
        for (state, amp) in self.iter() {
            match basis.index_of(state) {
                Some(i) => amplitudes[i] = amp,
                None => outside += amp.norm_sqr(),
            }
        }
        let total = self.norm_sqr();
        if total > 0.0 && outside / total > NORM_TOL {
            return Err(Error::OutsideSector {
                weight: outside / total,
            });
        }
        WaveFunction::normalized(basis, amplitudes)
    }
}

impl From<&WaveFunction> for FockVector {
    fn from(wf: &WaveFunction) -> Self {
        wf.to_fock_vector()
    }
}

/// Applies `c†`/`c` on `orbital`. Pauli-forbidden terms vanish.
pub fn apply_ladder(state: &FockVector, orbital: Orbital, kind: LadderKind) -> FockVector {
    state.apply(orbital, kind)
}

/// `⟨n_orbital⟩` for a normalized state.
pub fn occupation_expectation(wf: &WaveFunction, orbital: Orbital) -> f64 {
    wf.iter()
        .filter(|(s, _)| s.occupation(orbital) == 1)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Dense matrix of `c†_p` or `c_p` on the full `2^num_orbitals` Fock space.
///
/// Rows and columns are indexed by the raw bit pattern ([`FockState::bits`]).
pub fn ladder_matrix(num_orbitals: usize, orbital: Orbital, kind: LadderKind) -> DMatrix<f64> {
    assert!(num_orbitals <= 16, "full Fock space too large for a dense matrix");
    let dim = 1usize << num_orbitals;
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        if let Some((sign, next)) = FockState(col as u64).apply(orbital, kind) {
            m[(next.bits() as usize, col)] = sign;
        }
    }
    m
}
