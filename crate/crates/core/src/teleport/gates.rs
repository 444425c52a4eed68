//! C-NOT, Hadamard and logical Pauli gates on dot-local spaces.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::encoding::{Channel, DOUBLE, DOWN, EMPTY, UP};
use crate::error::{Error, Result};
use crate::fock::{FockState, LadderKind, Orbital, Spin};
use crate::linalg;

/// Evolution time of the exponential C-NOT, `exp(-i θ H)`.
pub const CNOT_THETA: f64 = FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum GateForm {
    /// Basis permutation.
    #[default]
    #[serde(rename = "perm")]
    Permutation,
    /// `exp(-i (π/2) H)` with the channel's gate Hamiltonian.
    #[serde(rename = "exp")]
    Exponential,
}

impl GateForm {
    pub fn name(self) -> &'static str {
        match self {
            GateForm::Permutation => "perm",
            GateForm::Exponential => "exp",
        }
    }
}

impl fmt::Display for GateForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perm" | "permutation" => Ok(GateForm::Permutation),
            "exp" | "exponential" => Ok(GateForm::Exponential),
            other => Err(Error::InvalidParameter(format!(
                "unknown gate form `{other}` (expected perm or exp)"
            ))),
        }
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `|row⟩⟨col|` on one dot.
fn ket_bra(row: usize, col: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(4, 4);
    m[(row, col)] = one();
    m
}

/// Fermionic `c†_σ` or `c_σ` on a single dot, up ordered before down.
pub fn dot_ladder(spin: Spin, kind: LadderKind) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(4, 4);
    for col in 0..4u64 {
        let s = FockState::from_printed_value(col, 2);
        if let Some((sign, next)) = s.apply(Orbital::new(0, spin), kind) {
            m[(next.printed_value(2) as usize, col as usize)] = Complex64::new(sign, 0.0);
        }
    }
    m
}

fn dot_number(spin: Spin) -> DMatrix<Complex64> {
    dot_ladder(spin, LadderKind::Create) * dot_ladder(spin, LadderKind::Annihilate)
}

/// Gate Hamiltonian on A ⊗ C, index `4 a + c`.
///
/// `P_↑ ⊗ F + P_↓ ⊗ D` where `P_↑ = ½(σ_Z,A + 1)` and `P_↓ = ½(1 - σ_Z,A)`
/// project dot A onto `|10⟩` and `|01⟩`. For the charge channel `F` is the
/// pair hop `c†_↑ c†_↓ + h.c.` and `D = n↑n↓ + (1-n↑)(1-n↓)`; for the spin
/// channel `F = c†_↑ c_↓ + c†_↓ c_↑` and `D = n↑(1-n↓) + n↓(1-n↑)`.
pub fn gate_hamiltonian(channel: Channel) -> DMatrix<Complex64> {
    use LadderKind::{Annihilate, Create};
    let id = DMatrix::<Complex64>::identity(4, 4);
    let n_up = dot_number(Spin::Up);
    let n_down = dot_number(Spin::Down);
    let (flip, diag) = match channel {
        Channel::Charge => {
            let pair = dot_ladder(Spin::Up, Create) * dot_ladder(Spin::Down, Create);
            let flip = &pair + pair.adjoint();
            let diag = &n_up * &n_down + (&id - &n_up) * (&id - &n_down);
            (flip, diag)
        }
        Channel::Spin => {
            let flip = dot_ladder(Spin::Up, Create) * dot_ladder(Spin::Down, Annihilate)
                + dot_ladder(Spin::Down, Create) * dot_ladder(Spin::Up, Annihilate);
            let diag = &n_up * (&id - &n_down) + &n_down * (&id - &n_up);
            (flip, diag)
        }
    };
    ket_bra(UP, UP).kronecker(&flip) + ket_bra(DOWN, DOWN).kronecker(&diag)
}

/// Channel C-NOT on A ⊗ C (16 × 16, index `4 a + c`).
///
/// With dot A in `|10⟩` the channel's dot-C pair is swapped; everything else
/// is left alone. The exponential form equals `-i` times the permutation on
/// the blocks where the gate Hamiltonian acts and the identity elsewhere.
pub fn cnot_unitary(channel: Channel, form: GateForm) -> DMatrix<Complex64> {
    match form {
        GateForm::Permutation => {
            let (p, q) = channel.pair();
            let mut m = DMatrix::identity(16, 16);
            let (i, j) = (4 * UP + p, 4 * UP + q);
            m.swap_columns(i, j);
            m
        }
        GateForm::Exponential => linalg::unitary_evolution(&gate_hamiltonian(channel), CNOT_THETA),
    }
}

/// Hadamard on dot A's `{|10⟩, |01⟩}` span, identity on `|00⟩` and `|11⟩`.
pub fn hadamard_on_a() -> DMatrix<Complex64> {
    let s = Complex64::new(0.5f64.sqrt(), 0.0);
    let mut m = DMatrix::zeros(4, 4);
    m[(EMPTY, EMPTY)] = one();
    m[(DOUBLE, DOUBLE)] = one();
    m[(UP, UP)] = s;
    m[(DOWN, UP)] = s;
    m[(UP, DOWN)] = s;
    m[(DOWN, DOWN)] = -s;
    m
}

/// Pauli corrections on a channel's logical span. `ZX` applies X first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogicalPauli {
    I,
    X,
    Z,
    ZX,
}

impl LogicalPauli {
    pub const ALL: [LogicalPauli; 4] = [LogicalPauli::I, LogicalPauli::X, LogicalPauli::Z, LogicalPauli::ZX];

    /// 4 × 4 matrix on dot B, identity outside the logical span.
    pub fn matrix(self, channel: Channel) -> DMatrix<Complex64> {
        let enc = channel.encoding();
        let (l0, l1) = (enc.zero, enc.one);
        let mut x = DMatrix::<Complex64>::identity(4, 4);
        x.swap_columns(l0, l1);
        let mut z = DMatrix::<Complex64>::identity(4, 4);
        z[(l1, l1)] = -one();
        match self {
            LogicalPauli::I => DMatrix::identity(4, 4),
            LogicalPauli::X => x,
            LogicalPauli::Z => z,
            LogicalPauli::ZX => z * x,
        }
    }
}

impl fmt::Display for LogicalPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogicalPauli::I => "I",
            LogicalPauli::X => "X",
            LogicalPauli::Z => "Z",
            LogicalPauli::ZX => "ZX",
        })
    }
}
