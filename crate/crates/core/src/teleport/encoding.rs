//! Dot-local states, the source qubit and its logical images on dot B.
//!
//! A dot holds one valence orbital, so its local space is spanned by the
//! occupation labels `|n↑ n↓⟩`. Local index = `2 n↑ + n↓`:
//! `|00⟩ = 0`, `|01⟩ = 1`, `|10⟩ = 2`, `|11⟩ = 3`.

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type DotState = Vector4<Complex64>;

pub const EMPTY: usize = 0b00;
pub const DOWN: usize = 0b01;
pub const UP: usize = 0b10;
pub const DOUBLE: usize = 0b11;

/// Normalization tolerance for [`QubitState`].
pub const QUBIT_NORM_TOL: f64 = 1e-12;
/// Largest weight outside the logical span accepted by [`decode_qubit`].
pub const LEAKAGE_TOL: f64 = 1e-10;

pub fn dot_label(index: usize) -> &'static str {
    ["00", "01", "10", "11"][index]
}

/// `α|↑⟩ + β|↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl QubitState {
    pub const UP: QubitState = QubitState {
        alpha: Complex64::new(1.0, 0.0),
        beta: Complex64::new(0.0, 0.0),
    };
    pub const DOWN: QubitState = QubitState {
        alpha: Complex64::new(0.0, 0.0),
        beta: Complex64::new(1.0, 0.0),
    };

    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
        if (norm_sqr - 1.0).abs() > QUBIT_NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { alpha, beta })
    }

    pub fn normalized(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: norm * norm });
        }
        Ok(Self {
            alpha: alpha / norm,
            beta: beta / norm,
        })
    }

    pub fn real(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0))
    }

    /// Same ray with `alpha` real non-negative (or `beta`, if `alpha ≈ 0`).
    pub fn with_canonical_phase(self) -> Self {
        let pivot = if self.alpha.norm() > 1e-12 {
            self.alpha
        } else {
            self.beta
        };
        if pivot.norm() == 0.0 {
            return self;
        }
        let phase = pivot.conj() / pivot.norm();
        Self {
            alpha: self.alpha * phase,
            beta: self.beta * phase,
        }
    }
}

/// `|⟨q1|q2⟩|²`.
pub fn fidelity(q1: &QubitState, q2: &QubitState) -> f64 {
    (q1.alpha.conj() * q2.alpha + q1.beta.conj() * q2.beta).norm_sqr()
}

/// Which ebit the protocol consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    /// Charge (space) ebit β₀ on {|11⟩, |00⟩}.
    Charge,
    /// Spin ebit β₁ on {|10⟩, |01⟩}.
    Spin,
}

impl Channel {
    pub const BOTH: [Channel; 2] = [Channel::Charge, Channel::Spin];

    pub fn encoding(self) -> LogicalEncoding {
        match self {
            Channel::Charge => LogicalEncoding {
                channel: self,
                zero: DOUBLE,
                one: EMPTY,
            },
            Channel::Spin => LogicalEncoding {
                channel: self,
                zero: UP,
                one: DOWN,
            },
        }
    }

    /// The dot-C pair flipped by this channel's C-NOT.
    pub fn pair(self) -> (usize, usize) {
        let e = self.encoding();
        (e.zero, e.one)
    }

    pub fn name(self) -> &'static str {
        match self {
            Channel::Charge => "charge",
            Channel::Spin => "spin",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "charge" => Ok(Channel::Charge),
            "spin" => Ok(Channel::Spin),
            other => Err(Error::InvalidParameter(format!(
                "unknown channel `{other}` (expected charge or spin)"
            ))),
        }
    }
}

/// Images of `|↑⟩` (`zero`) and `|↓⟩` (`one`) in the local space of a dot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogicalEncoding {
    pub channel: Channel,
    pub zero: usize,
    pub one: usize,
}

impl LogicalEncoding {
    pub fn encode(&self, q: &QubitState) -> DotState {
        let mut v = DotState::zeros();
        v[self.zero] = q.alpha;
        v[self.one] = q.beta;
        v
    }
}

/// Reads the source qubit off dot B's logical span.
pub fn decode_qubit(state: &DotState, channel: Channel) -> Result<QubitState> {
    let enc = channel.encoding();
    let total = state.norm_squared();
    let leakage: f64 = (0..4)
        .filter(|&i| i != enc.zero && i != enc.one)
        .map(|i| state[i].norm_sqr())
        .sum::<f64>()
        / total;
    if leakage > LEAKAGE_TOL {
        return Err(Error::Leakage { leakage });
    }
    Ok(QubitState::normalized(state[enc.zero], state[enc.one])?.with_canonical_phase())
}
