//! Exact diagonalization of small Hubbard quantum-dot chains, single-site
//! Fock-space entanglement, and a three-dot teleportation protocol that runs
//! over either the charge or the spin ebit of a coupled dot pair.
//!
//! ```
//! use qdots::hubbard::half_filled_ground_state;
//! use qdots::entanglement::local_coefficients;
//! use qdots::hubbard::Boundary;
//!
//! let (energy, wf) = half_filled_ground_state(2, 4.0, Boundary::Open)?;
//! assert!((energy - (2.0 - 8f64.sqrt())).abs() < 1e-12);
//! let c = local_coefficients(&wf, 0);
//! assert!((c.u_plus - (0.5 - c.w)).abs() < 1e-12);
//! # Ok::<(), qdots::Error>(())
//! ```
//!
//! The guide in `book/` walks through each module; its code blocks are
//! compiled and run as doctests of this crate.

pub mod entanglement;
pub mod error;
pub mod fock;
pub mod hubbard;
pub mod linalg;
pub mod teleport;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fock_space.md")]
    mod fock_space {}
    #[doc = include_str!("../../../book/src/hubbard.md")]
    mod hubbard {}
    #[doc = include_str!("../../../book/src/entanglement.md")]
    mod entanglement {}
    #[doc = include_str!("../../../book/src/teleportation.md")]
    mod teleportation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
