use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::convention::convert_convention;
use super::encoding::{decode_qubit, dot_label, fidelity, Channel, DotState, QubitState, DOWN, UP};
use super::gates::{cnot_unitary, hadamard_on_a, GateForm, LogicalPauli};
use super::register::DotRegister;
use crate::error::{Error, Result};
use crate::fock::{FockState, SectorBasis, WaveFunction};
use crate::hubbard::{ebit_weights, half_filled_ground_state, Boundary, EbitWeights};

/// Branches lighter than this are never reported or sampled.
const PROBABILITY_FLOOR: f64 = 1e-14;

/// Which two-dot state dots C and B start in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EbitSpec {
    /// `(|1100⟩ + |0011⟩)/√2`
    Beta0,
    /// `(|1001⟩ + |0110⟩)/√2`
    Beta1,
    /// Two-site ground state at the given `U/t`: `a β₀ + b β₁`.
    Ground { u_over_t: f64 },
}

impl fmt::Display for EbitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EbitSpec::Beta0 => f.write_str("beta0"),
            EbitSpec::Beta1 => f.write_str("beta1"),
            EbitSpec::Ground { u_over_t } => write!(f, "ground:{u_over_t}"),
        }
    }
}

impl FromStr for EbitSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beta0" => Ok(EbitSpec::Beta0),
            "beta1" => Ok(EbitSpec::Beta1),
            _ => {
                let u = s
                    .strip_prefix("ground:")
                    .and_then(|u| u.parse::<f64>().ok())
                    .filter(|u| u.is_finite())
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!("unknown ebit `{s}` (expected beta0, beta1 or ground:<U/t>)"))
                    })?;
                Ok(EbitSpec::Ground { u_over_t: u })
            }
        }
    }
}

impl Serialize for EbitSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EbitSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn pair_basis() -> Arc<SectorBasis> {
    Arc::new(SectorBasis::new(2, 2, 0).expect("two-site half-filled sector exists"))
}

fn superposition(labels: &[(&str, f64)]) -> WaveFunction {
    let basis = pair_basis();
    let mut amps = DVector::zeros(basis.dim());
    for &(label, a) in labels {
        let i = basis
            .index_of(FockState::parse(label).expect("static label"))
            .expect("label in sector");
        amps[i] = Complex64::new(a, 0.0);
    }
    WaveFunction::normalized(basis, amps).expect("nonzero superposition")
}

/// Two-dot state on C, B in the label convention.
pub fn prepare_ebit(spec: EbitSpec) -> Result<WaveFunction> {
    match spec {
        EbitSpec::Beta0 => Ok(superposition(&[("1100", 1.0), ("0011", 1.0)])),
        EbitSpec::Beta1 => Ok(superposition(&[("1001", 1.0), ("0110", 1.0)])),
        EbitSpec::Ground { u_over_t } => {
            let (_, wf) = half_filled_ground_state(2, u_over_t, Boundary::Open)?;
            let label = convert_convention(&wf);
            // Rotate so the amplitude pattern reads a β₀ + b β₁ with a, b ≥ 0.
            let pivot = label
                .amplitudes()
                .iter()
                .copied()
                .max_by(|x, y| x.norm().total_cmp(&y.norm()))
                .expect("nonempty sector");
            let phase = pivot.conj() / pivot.norm();
            WaveFunction::new(label.basis().clone(), label.amplitudes().map(|z| z * phase))
        }
    }
}

fn ebit_register(ebit: &WaveFunction) -> Result<DotRegister> {
    let basis = ebit.basis();
    if basis.num_sites() != 2 {
        return Err(Error::InvalidParameter("the ebit must live on two dots".into()));
    }
    let mut amps = DVector::zeros(16);
    for (state, a) in ebit.iter() {
        amps[state.printed_value(4) as usize] = a;
    }
    DotRegister::new(2, amps)
}

/// `(α|10⟩ + β|01⟩)_A ⊗ ebit_CB` on the register A, C, B.
pub fn prepare_initial_state(qubit: &QubitState, ebit: &WaveFunction) -> Result<DotRegister> {
    let mut a = DVector::zeros(4);
    a[UP] = qubit.alpha;
    a[DOWN] = qubit.beta;
    Ok(DotRegister::new(1, a)?.tensor(&ebit_register(ebit)?))
}

/// C-NOT on A ⊗ C followed by the Hadamard on A.
pub fn entangle(initial: &DotRegister, channel: Channel, form: GateForm) -> DotRegister {
    let mut state = initial.clone();
    state.apply(0, &cnot_unitary(channel, form));
    state.apply(0, &hadamard_on_a());
    state
}

/// Four-bit measurement outcome `n_A↑ n_A↓ n_C↑ n_C↓`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutcomeLabel(u8);

impl OutcomeLabel {
    pub fn new(dot_a: usize, dot_c: usize) -> Self {
        assert!(dot_a < 4 && dot_c < 4);
        Self((4 * dot_a + dot_c) as u8)
    }

    pub fn from_index(index: usize) -> Self {
        Self::new(index / 4, index % 4)
    }

    pub fn parse(label: &str) -> Result<Self> {
        if label.len() != 4 {
            return Err(Error::InvalidParameter(format!("outcome `{label}` must have 4 bits")));
        }
        let s = FockState::parse(label)?;
        Ok(Self::from_index(s.printed_value(4) as usize))
    }

    pub fn dot_a(self) -> usize {
        (self.0 / 4) as usize
    }

    pub fn dot_c(self) -> usize {
        (self.0 % 4) as usize
    }

    /// Whether the outcome certifies that `channel`'s ebit was consumed.
    pub fn is_heralded(self, channel: Channel) -> bool {
        let (p, q) = channel.pair();
        matches!(self.dot_a(), UP | DOWN) && (self.dot_c() == p || self.dot_c() == q)
    }

    pub fn herald_set(channel: Channel) -> Vec<OutcomeLabel> {
        (0..16)
            .map(Self::from_index)
            .filter(|o| o.is_heralded(channel))
            .collect()
    }
}

impl fmt::Display for OutcomeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", dot_label(self.dot_a()), dot_label(self.dot_c()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub outcome: OutcomeLabel,
    /// Born probability of the outcome before collapse.
    pub probability: f64,
    /// Normalized state of dot B after collapse.
    pub post_state: DotState,
}

/// Every outcome of measuring dots A and C with nonzero probability,
/// ordered by label.
pub fn measurement_branches(state: &DotRegister) -> Result<Vec<MeasurementRecord>> {
    if state.num_dots() != 3 {
        return Err(Error::InvalidParameter(
            "measurement expects the A, C, B register".into(),
        ));
    }
    let norm_sqr = state.norm_sqr();
    if (norm_sqr - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(state
        .split_prefix(2)
        .into_iter()
        .filter_map(|(prefix, rest)| {
            let probability = rest.norm_squared();
            (probability > PROBABILITY_FLOOR).then(|| MeasurementRecord {
                outcome: OutcomeLabel::from_index(prefix),
                probability,
                post_state: DotState::from_iterator(rest.iter().map(|z| z / probability.sqrt())),
            })
        })
        .collect())
}

fn sample<'a, R: Rng>(branches: &'a [MeasurementRecord], rng: &mut R) -> &'a MeasurementRecord {
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    let r = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for b in branches {
        acc += b.probability;
        if r < acc {
            return b;
        }
    }
    branches.last().expect("at least one branch")
}

/// Projective measurement of dots A and C, drawing one uniform variate.
pub fn measure_ac<R: Rng>(state: &DotRegister, rng: &mut R) -> Result<MeasurementRecord> {
    let branches = measurement_branches(state)?;
    Ok(sample(&branches, rng).clone())
}

/// Probe qubits used to pin down the correction tables.
fn probes() -> [QubitState; 2] {
    let s = 0.5f64.sqrt();
    [
        QubitState::real(0.6, 0.8).expect("normalized"),
        QubitState::new(Complex64::new(s, 0.0), Complex64::new(0.0, s)).expect("normalized"),
    ]
}

fn matching_ebit(channel: Channel) -> EbitSpec {
    match channel {
        Channel::Charge => EbitSpec::Beta0,
        Channel::Spin => EbitSpec::Beta1,
    }
}

fn apply_on_b(pauli: LogicalPauli, channel: Channel, state: &DotState) -> DotState {
    let m: DMatrix<Complex64> = pauli.matrix(channel);
    DotState::from_iterator((0..4).map(|r| (0..4).map(|c| m[(r, c)] * state[c]).sum::<Complex64>()))
}

/// Finds, for each herald outcome, the unique Pauli that maps the collapsed
/// dot-B state back onto the encoded source for every probe qubit.
fn derive_corrections(channel: Channel) -> Vec<(OutcomeLabel, LogicalPauli)> {
    let ebit = prepare_ebit(matching_ebit(channel)).expect("pure ebits are static");
    let runs: Vec<(QubitState, Vec<MeasurementRecord>)> = probes()
        .into_iter()
        .map(|q| {
            let initial = prepare_initial_state(&q, &ebit).expect("static inputs");
            let branches =
                measurement_branches(&entangle(&initial, channel, GateForm::Permutation)).expect("normalized register");
            (q, branches)
        })
        .collect();

    OutcomeLabel::herald_set(channel)
        .into_iter()
        .map(|outcome| {
            let fits = |pauli: LogicalPauli| {
                runs.iter().all(|(q, branches)| {
                    branches
                        .iter()
                        .find(|b| b.outcome == outcome)
                        .and_then(|b| decode_qubit(&apply_on_b(pauli, channel, &b.post_state), channel).ok())
                        .is_some_and(|d| (fidelity(q, &d) - 1.0).abs() < 1e-12)
                })
            };
            let matches: Vec<_> = LogicalPauli::ALL.into_iter().filter(|&p| fits(p)).collect();
            assert_eq!(
                matches.len(),
                1,
                "outcome {outcome} on {channel}: corrections {matches:?}"
            );
            (outcome, matches[0])
        })
        .collect()
}

fn corrections(channel: Channel) -> &'static [(OutcomeLabel, LogicalPauli)] {
    static CHARGE: OnceLock<Vec<(OutcomeLabel, LogicalPauli)>> = OnceLock::new();
    static SPIN: OnceLock<Vec<(OutcomeLabel, LogicalPauli)>> = OnceLock::new();
    match channel {
        Channel::Charge => CHARGE.get_or_init(|| derive_corrections(Channel::Charge)),
        Channel::Spin => SPIN.get_or_init(|| derive_corrections(Channel::Spin)),
    }
}

/// Bob's correction for a heralded outcome.
pub fn correction_unitary(outcome: OutcomeLabel, channel: Channel) -> Result<LogicalPauli> {
    corrections(channel)
        .iter()
        .find(|(o, _)| *o == outcome)
        .map(|&(_, p)| p)
        .ok_or_else(|| Error::FilteredBranch {
            label: outcome.to_string(),
            channel: channel.to_string(),
        })
}

/// One measurement branch followed through correction and decoding.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchOutcome {
    pub record: MeasurementRecord,
    pub heralded: bool,
    pub correction: Option<LogicalPauli>,
    pub decoded: Option<QubitState>,
    pub fidelity: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub qubit: QubitState,
    pub channel: Channel,
    pub ebit: EbitSpec,
    pub trials: usize,
    pub seed: u64,
    pub gate_form: GateForm,
}

/// Every branch of the protocol with its exact probability, no sampling.
pub fn exact_branches(
    qubit: &QubitState,
    channel: Channel,
    ebit: &WaveFunction,
    form: GateForm,
) -> Result<Vec<BranchOutcome>> {
    let initial = prepare_initial_state(qubit, ebit)?;
    measurement_branches(&entangle(&initial, channel, form))?
        .into_iter()
        .map(|record| {
            if !record.outcome.is_heralded(channel) {
                return Ok(BranchOutcome {
                    record,
                    heralded: false,
                    correction: None,
                    decoded: None,
                    fidelity: None,
                });
            }
            let pauli = correction_unitary(record.outcome, channel)?;
            let decoded = decode_qubit(&apply_on_b(pauli, channel, &record.post_state), channel)?;
            Ok(BranchOutcome {
                fidelity: Some(fidelity(qubit, &decoded)),
                record,
                heralded: true,
                correction: Some(pauli),
                decoded: Some(decoded),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeStats {
    pub label: String,
    pub count: usize,
    pub frequency: f64,
    pub probability: f64,
    pub heralded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correction: Option<LogicalPauli>,
    /// Post-correction fidelity; absent for filtered outcomes.
    pub fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeleportationReport {
    pub channel: Channel,
    pub trials: usize,
    pub seed: u64,
    pub gate_form: GateForm,
    pub ebit: EbitSpec,
    pub outcomes: Vec<OutcomeStats>,
    pub heralded_success_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ebit_weights: Option<EbitWeights>,
}

impl TeleportationReport {
    pub fn outcome(&self, label: &str) -> Option<&OutcomeStats> {
        self.outcomes.iter().find(|o| o.label == label)
    }

    pub fn heralded_count(&self) -> usize {
        self.outcomes.iter().filter(|o| o.heralded).map(|o| o.count).sum()
    }
}

/// Runs `trials` shots of the protocol from one seeded stream.
///
/// The pre-measurement state is the same for every shot, so it is evolved
/// once; each trial then consumes one variate to pick its outcome.
pub fn run_protocol(config: &ProtocolConfig) -> Result<TeleportationReport> {
    if config.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let ebit = prepare_ebit(config.ebit)?;
    let weights = match config.ebit {
        EbitSpec::Ground { .. } => Some(ebit_weights(&ebit)?),
        _ => None,
    };
    let branches = exact_branches(&config.qubit, config.channel, &ebit, config.gate_form)?;
    let records: Vec<MeasurementRecord> = branches.iter().map(|b| b.record.clone()).collect();

    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let mut counts = vec![0usize; branches.len()];
    for _ in 0..config.trials {
        let hit = sample(&records, &mut rng);
        let i = records
            .iter()
            .position(|r| r.outcome == hit.outcome)
            .expect("sampled a branch");
        counts[i] += 1;
    }

    let n = config.trials as f64;
    let outcomes: Vec<OutcomeStats> = branches
        .iter()
        .zip(&counts)
        .map(|(b, &count)| OutcomeStats {
            label: b.record.outcome.to_string(),
            count,
            frequency: count as f64 / n,
            probability: b.record.probability,
            heralded: b.heralded,
            correction: b.correction,
            fidelity: b.fidelity,
        })
        .collect();
    let heralded: usize = outcomes.iter().filter(|o| o.heralded).map(|o| o.count).sum();

    Ok(TeleportationReport {
        channel: config.channel,
        trials: config.trials,
        seed: config.seed,
        gate_form: config.gate_form,
        ebit: config.ebit,
        outcomes,
        heralded_success_rate: heralded as f64 / n,
        ebit_weights: weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label(l: &str) -> OutcomeLabel {
        OutcomeLabel::parse(l).unwrap()
    }

    #[test]
    fn pure_ebits() {
        let s = 0.5f64.sqrt();
        let b0 = prepare_ebit(EbitSpec::Beta0).unwrap();
        assert!((b0.amplitude(FockState::parse("1100").unwrap()).re - s).abs() < 1e-15);
        assert!((b0.amplitude(FockState::parse("0011").unwrap()).re - s).abs() < 1e-15);
        let b1 = prepare_ebit(EbitSpec::Beta1).unwrap();
        assert!((b1.amplitude(FockState::parse("1001").unwrap()).re - s).abs() < 1e-15);
        assert!((b1.amplitude(FockState::parse("0110").unwrap()).re - s).abs() < 1e-15);
    }

    #[test]
    fn ground_ebit_at_zero_is_all_plus() {
        let g = prepare_ebit(EbitSpec::Ground { u_over_t: 0.0 }).unwrap();
        for z in g.amplitudes().iter() {
            assert!((z - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn initial_state_is_a_product() {
        let q = QubitState::UP;
        let r = prepare_initial_state(&q, &prepare_ebit(EbitSpec::Beta0).unwrap()).unwrap();
        let s = 0.5f64.sqrt();
        assert!((r.amplitude("101100").unwrap().re - s).abs() < 1e-15);
        assert!((r.amplitude("100011").unwrap().re - s).abs() < 1e-15);
        assert!((r.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ebit_spec_parsing() {
        assert_eq!("beta0".parse::<EbitSpec>().unwrap(), EbitSpec::Beta0);
        assert_eq!(
            "ground:-2.5".parse::<EbitSpec>().unwrap(),
            EbitSpec::Ground { u_over_t: -2.5 }
        );
        assert!("ground:x".parse::<EbitSpec>().is_err());
        assert!("ground:inf".parse::<EbitSpec>().is_err());
        assert!("gamma".parse::<EbitSpec>().is_err());
        assert_eq!(EbitSpec::Ground { u_over_t: 4.0 }.to_string(), "ground:4");
    }

    #[test]
    fn herald_sets() {
        let names = |c| -> Vec<String> { OutcomeLabel::herald_set(c).iter().map(|o| o.to_string()).collect() };
        assert_eq!(names(Channel::Charge), ["0100", "0111", "1000", "1011"]);
        assert_eq!(names(Channel::Spin), ["0101", "0110", "1001", "1010"]);
    }

    #[test]
    fn correction_tables() {
        use LogicalPauli::*;
        for (l, p) in [("1011", I), ("1000", X), ("0111", Z), ("0100", ZX)] {
            assert_eq!(correction_unitary(label(l), Channel::Charge).unwrap(), p, "{l}");
        }
        for (l, p) in [("1010", I), ("1001", X), ("0110", Z), ("0101", ZX)] {
            assert_eq!(correction_unitary(label(l), Channel::Spin).unwrap(), p, "{l}");
        }
        assert!(matches!(
            correction_unitary(label("1010"), Channel::Charge),
            Err(Error::FilteredBranch { .. })
        ));
    }

    #[test]
    fn basis_state_measures_to_itself() {
        let r = DotRegister::basis_state(3, FockState::parse("011001").unwrap());
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let m = measure_ac(&r, &mut rng).unwrap();
        assert_eq!(m.outcome.to_string(), "0110");
        assert_eq!(m.probability, 1.0);
        assert_eq!(m.post_state[1], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn unnormalized_register_is_rejected() {
        let r = DotRegister::new(3, DVector::from_element(64, Complex64::new(1.0, 0.0))).unwrap();
        assert!(matches!(measurement_branches(&r), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn zero_trials_rejected() {
        let cfg = ProtocolConfig {
            qubit: QubitState::UP,
            channel: Channel::Charge,
            ebit: EbitSpec::Beta0,
            trials: 0,
            seed: 1,
            gate_form: GateForm::Permutation,
        };
        assert!(run_protocol(&cfg).is_err());
    }
}
