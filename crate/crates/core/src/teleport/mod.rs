//! Three-dot teleportation over the charge or spin ebit of a coupled dot pair.
//!
//! Dot A carries the source qubit `α|↑⟩ + β|↓⟩`; dots C and B share an ebit.
//! Alice applies the channel C-NOT on A ⊗ C (control A), a Hadamard on A and
//! measures the occupations of A and C. The four-bit outcome
//! `n_A↑ n_A↓ n_C↑ n_C↓` tells Bob which Pauli fixes dot B. Outcomes outside
//! the channel's herald set mean the other ebit was present, and the trial
//! is filtered.
//!
//! Protocol kets use the hard-core label convention (see [`convention`]).

pub mod convention;
pub mod encoding;
pub mod gates;
pub mod protocol;
pub mod register;

pub use convention::{convert_convention, label_convention_sign};
pub use encoding::{decode_qubit, fidelity, Channel, DotState, LogicalEncoding, QubitState};
pub use gates::{cnot_unitary, gate_hamiltonian, hadamard_on_a, GateForm, LogicalPauli};
pub use protocol::{
    correction_unitary, exact_branches, measure_ac, measurement_branches, prepare_ebit, prepare_initial_state,
    run_protocol, BranchOutcome, EbitSpec, MeasurementRecord, OutcomeLabel, OutcomeStats, ProtocolConfig,
    TeleportationReport,
};
pub use register::DotRegister;
