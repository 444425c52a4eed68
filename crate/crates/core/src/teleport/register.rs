//! Dense state of a few dots in the hard-core occupation-label convention.
//!
//! The amplitude index of `|a⟩|c⟩|b⟩…` is the printed occupation string read
//! as a binary number, so dot 0 is most significant.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::FockState;

#[derive(Debug, Clone, PartialEq)]
pub struct DotRegister {
    num_dots: usize,
    amplitudes: DVector<Complex64>,
}

impl DotRegister {
    pub fn new(num_dots: usize, amplitudes: DVector<Complex64>) -> Result<Self> {
        let dim = 1usize << (2 * num_dots);
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amplitudes.len(),
            });
        }
        Ok(Self { num_dots, amplitudes })
    }

    pub fn basis_state(num_dots: usize, label: FockState) -> Self {
        let mut amplitudes = DVector::zeros(1 << (2 * num_dots));
        amplitudes[label.printed_value(2 * num_dots) as usize] = Complex64::new(1.0, 0.0);
        Self { num_dots, amplitudes }
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &DotRegister) -> DotRegister {
        DotRegister {
            num_dots: self.num_dots + other.num_dots,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    pub fn num_dots(&self) -> usize {
        self.num_dots
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// Amplitude of the printed occupation label, e.g. `"101100"`.
    pub fn amplitude(&self, label: &str) -> Result<Complex64> {
        if label.len() != 2 * self.num_dots {
            return Err(Error::InvalidParameter(format!(
                "label `{label}` has the wrong width for {} dots",
                self.num_dots
            )));
        }
        let s = FockState::parse(label)?;
        Ok(self.amplitudes[s.printed_value(2 * self.num_dots) as usize])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// Applies `gate`, acting on the dots `first..first + k`, where the gate
    /// dimension is `4^k`.
    pub fn apply(&mut self, first: usize, gate: &DMatrix<Complex64>) {
        let k = (gate.nrows().trailing_zeros() / 2) as usize;
        assert_eq!(gate.nrows(), 1 << (2 * k), "gate dimension must be a power of 4");
        assert!(first + k <= self.num_dots, "gate exceeds the register");
        let right = 1usize << (2 * (self.num_dots - first - k));
        let mid = 1usize << (2 * k);
        let left = 1usize << (2 * first);
        let mut out = DVector::zeros(self.amplitudes.len());
        for l in 0..left {
            for r in 0..right {
                for m_out in 0..mid {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for m_in in 0..mid {
                        let g = gate[(m_out, m_in)];
                        if g != Complex64::new(0.0, 0.0) {
                            acc += g * self.amplitudes[(l * mid + m_in) * right + r];
                        }
                    }
                    out[(l * mid + m_out) * right + r] = acc;
                }
            }
        }
        self.amplitudes = out;
    }

    /// Splits on the first `k` dots: one `(prefix index, unnormalized rest)`
    /// entry per prefix configuration.
    pub fn split_prefix(&self, k: usize) -> Vec<(usize, DVector<Complex64>)> {
        let right = 1usize << (2 * (self.num_dots - k));
        (0..1usize << (2 * k))
            .map(|p| (p, self.amplitudes.rows(p * right, right).into_owned()))
            .collect()
    }
}
