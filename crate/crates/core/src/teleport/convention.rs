//! Map between Jordan-Wigner amplitudes and the hard-core label convention.
//!
//! The protocol writes two-dot states as kets `|n_C↑ n_C↓ n_B↑ n_B↓⟩` with
//! the creation operators of every up electron to the left of every down
//! electron, so that `(c†_C↑ + c†_B↑)(c†_C↓ + c†_B↓)|0⟩` expands with all plus
//! signs. The fock module orders operators site by site instead. The two
//! differ by `(-1)^(number of pairs i < j with n_i↓ = n_j↑ = 1)`.

use crate::fock::{FockState, Orbital, WaveFunction};

/// Relative sign between the site-major and spin-major orderings of `state`.
pub fn label_convention_sign(state: FockState, num_sites: usize) -> f64 {
    let mut crossings = 0u32;
    let mut downs_so_far = 0u32;
    for site in 0..num_sites {
        if state.occupation(Orbital::up(site)) == 1 {
            crossings += downs_so_far;
        }
        if state.occupation(Orbital::down(site)) == 1 {
            downs_so_far += 1;
        }
    }
    if crossings.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Re-expresses `wf` in the other convention. The map is an involution, so
/// it converts in either direction.
pub fn convert_convention(wf: &WaveFunction) -> WaveFunction {
    let n = wf.basis().num_sites();
    let amps = wf
        .amplitudes()
        .iter()
        .zip(wf.basis().states())
        .map(|(a, &s)| a * label_convention_sign(s, n));
    let amplitudes = nalgebra::DVector::from_iterator(wf.basis().dim(), amps);
    WaveFunction::new(wf.basis().clone(), amplitudes).expect("sign flips preserve the norm")
}
