//! Acceptance gate. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any fails.

use std::process::Command;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use qdots::entanglement::{
    complement_correlation, density_matrix_entropy, entanglement_sweep, local_coefficients, local_entanglement,
    reduced_density_matrix, uniform_grid, LocalState, DEFAULT_SWEEP,
};
use qdots::fock::{ladder_matrix, LadderKind, Orbital, SectorBasis, WaveFunction};
use qdots::hubbard::{ebit_weights, half_filled_ground_state, Boundary};
use qdots::teleport::encoding::{DOWN, UP};
use qdots::teleport::{
    cnot_unitary, exact_branches, prepare_ebit, run_protocol, Channel, EbitSpec, GateForm, OutcomeLabel,
    ProtocolConfig, QubitState, TeleportationReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Charge-pair weight a² of the two-site ground state at U/t = 4, from the
/// singlet block [[U, -2t], [-2t, 0]] in extended precision.
const A_SQR_U4: f64 = 0.146_446_609_406_726_24;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn five_sigma(p: f64, n: usize) -> f64 {
    5.0 * (p * (1.0 - p) / n as f64).sqrt()
}

fn default_entropies() -> Result<(Vec<f64>, Vec<qdots::entanglement::SweepPoint>), String> {
    let (lo, hi, n) = DEFAULT_SWEEP;
    let grid = uniform_grid(lo, hi, n).map_err(|e| e.to_string())?;
    let sweep = entanglement_sweep(&grid, 2, Boundary::Open).map_err(|e| e.to_string())?;
    Ok((grid, sweep))
}

fn peak() -> Outcome {
    let (grid, sweep) = default_entropies()?;
    let zero = grid.iter().position(|&u| u == 0.0).ok_or("grid misses U = 0")?;
    let e0 = sweep[zero].entropy;
    let max = sweep.iter().map(|p| p.entropy).fold(f64::MIN, f64::max);
    check(
        (e0 - 2.0).abs() < 1e-9 && max <= e0 + 1e-12,
        format!("E(0) = {e0:.15}, max = {max:.15}"),
    )
}

fn symmetry() -> Outcome {
    let (_, sweep) = default_entropies()?;
    let n = sweep.len();
    let worst = (0..n)
        .map(|i| (sweep[i].entropy - sweep[n - 1 - i].entropy).abs())
        .fold(0.0, f64::max);
    check(
        worst < 1e-9,
        format!("max |E(U) - E(-U)| = {worst:.3e} over {n} points"),
    )
}

fn asymptote() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for u in [100.0, -100.0] {
        let (_, wf) = half_filled_ground_state(2, u, Boundary::Open).map_err(|e| e.to_string())?;
        let e = local_entanglement(&local_coefficients(&wf, 0));
        ok &= e > 1.0 && e < 1.01;
        detail.push(format!("E({u}) = {e:.12}"));
    }
    check(ok, detail.join(", "))
}

fn particle_hole() -> Outcome {
    let (_, sweep) = default_entropies()?;
    let n = sweep.len();
    let worst = (0..n)
        .map(|i| (sweep[i].coefficients.w - (0.5 - sweep[n - 1 - i].coefficients.w)).abs())
        .fold(0.0, f64::max);
    check(worst < 1e-9, format!("max |w(-U) - (1/2 - w(U))| = {worst:.3e}"))
}

fn random_sector_state(rng: &mut ChaCha20Rng, basis: &Arc<SectorBasis>) -> WaveFunction {
    loop {
        let amps = DVector::from_fn(basis.dim(), |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        if amps.norm() > 1e-3 {
            return WaveFunction::normalized(basis.clone(), amps).expect("nonzero");
        }
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut count = 0;
    for sites in [2, 4] {
        let basis = Arc::new(SectorBasis::new(sites, sites, 0).map_err(|e| e.to_string())?);
        for _ in 0..128 {
            let wf = random_sector_state(&mut rng, &basis);
            let v = wf.to_fock_vector();
            for site in 0..sites {
                let closed = local_entanglement(&local_coefficients(&wf, site));
                let traced = density_matrix_entropy(&reduced_density_matrix(&v, site));
                worst = worst.max((closed - traced).abs());
            }
            count += 1;
        }
    }
    check(
        worst < 1e-9,
        format!("{count} states, max |closed - traced| = {worst:.3e}"),
    )
}

fn random_qubit(rng: &mut ChaCha20Rng) -> QubitState {
    let mut c = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let (a, b) = (c(), c());
    QubitState::normalized(a, b).expect("nonzero")
}

fn protocol_exactness() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for (channel, spec) in [(Channel::Charge, EbitSpec::Beta0), (Channel::Spin, EbitSpec::Beta1)] {
        let ebit = prepare_ebit(spec).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let q = random_qubit(&mut rng);
            let branches = exact_branches(&q, channel, &ebit, GateForm::Permutation).map_err(|e| e.to_string())?;
            let heralded: Vec<_> = branches
                .iter()
                .filter(|b| b.heralded && b.record.probability > 0.0)
                .collect();
            if heralded.len() != 4 || branches.iter().any(|b| !b.heralded && b.record.probability > 1e-14) {
                return Err(format!("{channel}: {} heralded outcomes", heralded.len()));
            }
            for b in heralded {
                worst = worst.max((1.0 - b.fidelity.unwrap_or(0.0)).abs());
            }
        }
    }
    check(
        worst < 1e-10,
        format!("2 channels x 50 qubits x 4 outcomes, max |1 - F| = {worst:.3e}"),
    )
}

fn run(
    channel: Channel,
    ebit: EbitSpec,
    qubit: QubitState,
    trials: usize,
    seed: u64,
    form: GateForm,
) -> Result<TeleportationReport, String> {
    run_protocol(&ProtocolConfig {
        qubit,
        channel,
        ebit,
        trials,
        seed,
        gate_form: form,
    })
    .map_err(|e| e.to_string())
}

fn outcome_statistics() -> Outcome {
    let q = QubitState::real(0.6, 0.8).map_err(|e| e.to_string())?;
    let n = 4096;
    let tol = five_sigma(0.25, n);
    let mut worst = 0.0f64;
    for (channel, spec) in [(Channel::Charge, EbitSpec::Beta0), (Channel::Spin, EbitSpec::Beta1)] {
        let r = run(channel, spec, q, n, 42, GateForm::Permutation)?;
        for label in OutcomeLabel::herald_set(channel) {
            let f = r.outcome(&label.to_string()).map_or(0.0, |o| o.frequency);
            worst = worst.max((f - 0.25).abs());
        }
    }
    check(worst < tol, format!("max |f - 1/4| = {worst:.4} (5 sigma = {tol:.4})"))
}

fn gate_form_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    for channel in Channel::BOTH {
        let perm = cnot_unitary(channel, GateForm::Permutation);
        let exp = cnot_unitary(channel, GateForm::Exponential);
        let (p, q) = channel.pair();
        let coupled = |i: usize| [UP, DOWN].contains(&(i / 4)) && [p, q].contains(&(i % 4));
        for r in 0..16 {
            for c in 0..16 {
                let phase = if coupled(r) && coupled(c) {
                    Complex64::new(0.0, -1.0)
                } else {
                    Complex64::new(1.0, 0.0)
                };
                worst = worst.max((exp[(r, c)] - phase * perm[(r, c)]).norm());
            }
        }
    }
    if worst >= 1e-12 {
        return Err(format!("max block deviation {worst:.3e}"));
    }
    let q = QubitState::normalized(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).map_err(|e| e.to_string())?;
    for (channel, spec) in [
        (Channel::Charge, EbitSpec::Beta0),
        (Channel::Spin, EbitSpec::Beta1),
        (Channel::Charge, EbitSpec::Ground { u_over_t: 4.0 }),
    ] {
        let a = run(channel, spec, q, 2048, 9, GateForm::Permutation)?;
        let b = run(channel, spec, q, 2048, 9, GateForm::Exponential)?;
        let same = a.heralded_success_rate == b.heralded_success_rate
            && a.outcomes.iter().zip(&b.outcomes).all(|(x, y)| {
                x.label == y.label
                    && x.count == y.count
                    && x.heralded == y.heralded
                    && x.correction == y.correction
                    && match (x.fidelity, y.fidelity) {
                        (Some(f), Some(g)) => (f - g).abs() < 1e-12,
                        (None, None) => true,
                        _ => false,
                    }
            });
        if !same {
            return Err(format!("{channel}/{spec}: reports differ between forms"));
        }
    }
    Ok(format!(
        "blocks agree to {worst:.3e}; counts, heralds and fidelities identical"
    ))
}

fn filtering() -> Outcome {
    let s = 0.5f64.sqrt();
    let q = QubitState::real(s, s).map_err(|e| e.to_string())?;
    let n = 10_000;
    let ground = EbitSpec::Ground { u_over_t: 4.0 };
    let charge = run(Channel::Charge, ground, q, n, 1, GateForm::Permutation)?;
    let spin = run(Channel::Spin, ground, q, n, 1, GateForm::Permutation)?;
    let tol = five_sigma(A_SQR_U4, n);
    let fidelities_ok = [&charge, &spin]
        .iter()
        .flat_map(|r| r.outcomes.iter().filter(|o| o.heralded && o.count > 0))
        .all(|o| o.fidelity.is_some_and(|f| (f - 1.0).abs() < 1e-10));
    let mut monotone = true;
    let mut last = f64::INFINITY;
    for u in uniform_grid(-10.0, 10.0, 201).map_err(|e| e.to_string())? {
        let (_, wf) = half_filled_ground_state(2, u, Boundary::Open).map_err(|e| e.to_string())?;
        let a2 = ebit_weights(&wf).map_err(|e| e.to_string())?.a_mag.powi(2);
        monotone &= a2 < last;
        last = a2;
    }
    let (rc, rs) = (charge.heralded_success_rate, spin.heralded_success_rate);
    check(
        (rc - A_SQR_U4).abs() < tol && (rs - (1.0 - A_SQR_U4)).abs() < tol && fidelities_ok && monotone,
        format!("charge {rc:.4}, spin {rs:.4} (5 sigma = {tol:.4}), heralded F = 1: {fidelities_ok}, a^2 decreasing: {monotone}"),
    )
}

fn fermionic_algebra() -> Outcome {
    let mut worst = 0.0f64;
    for m in 1..=4 {
        let dim = 1 << m;
        for p in 0..m {
            for q in 0..m {
                let op = |i: usize, k| ladder_matrix(m, Orbital::from_index(i), k);
                let (cp, cq) = (op(p, LadderKind::Annihilate), op(q, LadderKind::Annihilate));
                let (dp, dq) = (op(p, LadderKind::Create), op(q, LadderKind::Create));
                let delta = if p == q {
                    nalgebra::DMatrix::identity(dim, dim)
                } else {
                    nalgebra::DMatrix::zeros(dim, dim)
                };
                worst = worst
                    .max((&cp * &dq + &dq * &cp - delta).amax())
                    .max((&cp * &cq + &cq * &cp).amax())
                    .max((&dp * &dq + &dq * &dp).amax());
            }
        }
    }
    check(
        worst < 1e-12,
        format!("max anticommutator defect {worst:.3e} on up to 4 orbitals"),
    )
}

fn correlation() -> Outcome {
    for sites in [4, 6] {
        let (_, wf) = half_filled_ground_state(sites, 4.0, Boundary::Open).map_err(|e| e.to_string())?;
        for site in [0, sites - 1] {
            let r = complement_correlation(&wf.to_fock_vector(), site).map_err(|e| e.to_string())?;
            for (state, electrons, two_sz) in [
                (LocalState::Empty, sites, 0),
                (LocalState::Up, sites - 1, -1),
                (LocalState::Down, sites - 1, 1),
                (LocalState::Double, sites - 2, 0),
            ] {
                let b = r.branch(state);
                if !(b.point_mass && b.complement_electrons == Some(electrons) && b.complement_two_sz == Some(two_sz)) {
                    return Err(format!("{sites} sites, site {site}, {state:?}: {b:?}"));
                }
            }
        }
    }
    Ok("4 and 6 sites: every branch a point mass on the conserved complement sector".into())
}

fn cli_determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_dot-teleport");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("artifact");
    let out = out.to_str().ok_or("temp path")?;
    let runs: [&[&str]; 4] = [
        &["sweep", "--out", out],
        &[
            "weights", "--u-min", "-5", "--u-max", "5", "--points", "41", "--out", out,
        ],
        &[
            "teleport",
            "--channel",
            "charge",
            "--alpha",
            "0.6",
            "--beta",
            "0.8",
            "--ebit",
            "ground:4",
            "--trials",
            "4096",
            "--seed",
            "42",
            "--out",
            out,
        ],
        &["correlate", "--sites", "6", "--u", "4", "--site", "5", "--out", out],
    ];
    for args in runs {
        let mut bytes = Vec::new();
        for _ in 0..2 {
            let status = Command::new(exe).args(args).status().map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("{} exited with {status}", args[0]));
            }
            bytes.push(std::fs::read(out).map_err(|e| e.to_string())?);
        }
        if bytes[0] != bytes[1] || bytes[0].is_empty() {
            return Err(format!("{} output differs between runs", args[0]));
        }
    }
    let stdout: Vec<_> = (0..2)
        .map(|_| {
            Command::new(exe)
                .args(["teleport", "--channel", "spin", "--seed", "7"])
                .output()
                .map(|o| o.stdout)
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    check(
        stdout[0] == stdout[1],
        "sweep, weights, teleport and correlate byte-identical on rerun".into(),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("entropy peak at U/t = 0", peak),
        ("entropy even in U/t", symmetry),
        ("entropy asymptote at |U/t| = 100", asymptote),
        ("particle-hole relation for w", particle_hole),
        ("closed-form vs partial-trace entropy", oracle_equivalence),
        ("protocol exactness", protocol_exactness),
        ("outcome statistics", outcome_statistics),
        ("gate-form equivalence", gate_form_equivalence),
        ("filtering on the U/t = 4 ground state", filtering),
        ("fermionic anticommutators", fermionic_algebra),
        ("N-site correlation", correlation),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
