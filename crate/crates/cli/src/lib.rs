//! Front end for `dot-teleport`: argument parsing, run configuration and the
//! CSV/JSON writers. `main.rs` only maps [`CliError`] to exit codes.
//!
//! Every artifact carries its [`RunConfig`]: CSV files start with a
//! `# {json}` comment line, JSON documents get a `config` field.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qdots::entanglement::{complement_correlation, entanglement_sweep, uniform_grid, DEFAULT_SWEEP};
use qdots::hubbard::{ebit_weights, half_filled_ground_state, Boundary};
use qdots::teleport::{run_protocol, Channel, EbitSpec, GateForm, ProtocolConfig, QubitState};
use serde::Serialize;
use serde_json::{json, Value};

/// Significant digits of every float written to an artifact.
pub const SIG_DIGITS: usize = 12;

/// Qubits off by less than this in norm are renormalized with a warning.
pub const RENORMALIZE_TOL: f64 = 1e-6;

pub const SWEEP_HEADER: &str = "u_over_t,w,z,u_plus,u_minus,entropy_bits";
pub const WEIGHTS_HEADER: &str = "u_over_t,a_mag,b_mag";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 2,
            CliError::Validation(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<qdots::Error> for CliError {
    fn from(e: qdots::Error) -> Self {
        let numerical = match &e {
            qdots::Error::DegenerateGroundState { .. } => true,
            qdots::Error::SweepPoint { source, .. } => {
                matches!(**source, qdots::Error::DegenerateGroundState { .. })
            }
            _ => false,
        };
        let msg = e.to_string();
        if numerical {
            CliError::Numerical(msg)
        } else {
            CliError::Validation(msg)
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dot-teleport",
    version,
    about = "Hubbard dot entanglement and teleportation runs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Local entanglement of the half-filled chain versus U/t (CSV).
    Sweep(SweepArgs),
    /// Teleport one qubit through a dot pair (JSON report).
    Teleport(TeleportArgs),
    /// Charge and spin ebit weights of the two-dot ground state versus U/t (CSV).
    Weights(GridArgs),
    /// Complement quantum numbers conditioned on one site's state (JSON).
    Correlate(CorrelateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryArg {
    Open,
    Periodic,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Open => Boundary::Open,
            BoundaryArg::Periodic => Boundary::Periodic,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = DEFAULT_SWEEP.0, allow_negative_numbers = true)]
    pub u_min: f64,
    #[arg(long, default_value_t = DEFAULT_SWEEP.1, allow_negative_numbers = true)]
    pub u_max: f64,
    #[arg(long, default_value_t = DEFAULT_SWEEP.2)]
    pub points: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Even number of sites; the entropy is that of site 0.
    #[arg(long, default_value_t = 2)]
    pub sites: usize,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Open)]
    pub boundary: BoundaryArg,
}

#[derive(Debug, Clone, Args)]
pub struct TeleportArgs {
    #[arg(long, default_value = "charge")]
    pub channel: String,
    /// Amplitude of |↑⟩, as `re` or `re+imj`.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub alpha: String,
    /// Amplitude of |↓⟩, as `re` or `re+imj`.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub beta: String,
    /// `beta0`, `beta1` or `ground:U`; defaults to the channel's own ebit.
    #[arg(long, allow_hyphen_values = true)]
    pub ebit: Option<String>,
    #[arg(long, default_value_t = 4096)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "perm")]
    pub gate_form: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct CorrelateArgs {
    #[arg(long, default_value_t = 4)]
    pub sites: usize,
    /// U/t of the ground state.
    #[arg(long = "u", default_value_t = 4.0, allow_negative_numbers = true)]
    pub u_over_t: f64,
    #[arg(long, default_value_t = 0)]
    pub site: usize,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Open)]
    pub boundary: BoundaryArg,
    #[command(flatten)]
    pub output: Output,
}

/// Everything that determines an artifact's bytes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: CommandConfig,
    pub format: Format,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum CommandConfig {
    Sweep {
        u_min: f64,
        u_max: f64,
        points: usize,
        sites: usize,
        boundary: BoundaryArg,
    },
    Teleport {
        channel: Channel,
        alpha: String,
        beta: String,
        ebit: EbitSpec,
        trials: usize,
        seed: u64,
        gate_form: GateForm,
    },
    Weights {
        u_min: f64,
        u_max: f64,
        points: usize,
    },
    Correlate {
        sites: usize,
        u_over_t: f64,
        site: usize,
        boundary: BoundaryArg,
    },
}

impl CommandConfig {
    fn default_format(&self) -> Format {
        match self {
            CommandConfig::Sweep { .. } | CommandConfig::Weights { .. } => Format::Csv,
            CommandConfig::Teleport { .. } | CommandConfig::Correlate { .. } => Format::Json,
        }
    }
}

/// A finished artifact plus any warnings for the error stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub config: RunConfig,
    pub contents: String,
    pub warnings: Vec<String>,
}

fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// `re` or `re+imj` (also `i` as the imaginary unit).
pub fn parse_amplitude(s: &str) -> Result<Complex64, CliError> {
    let z = Complex64::from_str(s.trim()).map_err(|_| validation(format!("malformed amplitude `{s}`")))?;
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(validation(format!("amplitude `{s}` is not finite")));
    }
    Ok(z)
}

/// Builds the source qubit, renormalizing small norm errors.
pub fn parse_qubit(alpha: &str, beta: &str) -> Result<(QubitState, Option<String>), CliError> {
    let (a, b) = (parse_amplitude(alpha)?, parse_amplitude(beta)?);
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if (norm - 1.0).abs() >= RENORMALIZE_TOL {
        return Err(validation(format!(
            "qubit |alpha|^2 + |beta|^2 = {} is not normalized",
            norm * norm
        )));
    }
    let exact = (norm * norm - 1.0).abs() <= qdots::teleport::encoding::QUBIT_NORM_TOL;
    let qubit = QubitState::normalized(a, b)?;
    let warning = (!exact).then(|| format!("warning: qubit norm {norm} renormalized to 1"));
    Ok((qubit, warning))
}

impl RunConfig {
    pub fn from_command(command: &Command) -> Result<Self, CliError> {
        let (command, output) = match command {
            Command::Sweep(a) => (
                CommandConfig::Sweep {
                    u_min: a.grid.u_min,
                    u_max: a.grid.u_max,
                    points: a.grid.points,
                    sites: a.sites,
                    boundary: a.boundary,
                },
                &a.grid.output,
            ),
            Command::Weights(a) => (
                CommandConfig::Weights {
                    u_min: a.u_min,
                    u_max: a.u_max,
                    points: a.points,
                },
                &a.output,
            ),
            Command::Teleport(a) => {
                let channel: Channel = a.channel.parse()?;
                let ebit = match &a.ebit {
                    Some(s) => s.parse()?,
                    None => match channel {
                        Channel::Charge => EbitSpec::Beta0,
                        Channel::Spin => EbitSpec::Beta1,
                    },
                };
                (
                    CommandConfig::Teleport {
                        channel,
                        alpha: a.alpha.clone(),
                        beta: a.beta.clone(),
                        ebit,
                        trials: a.trials,
                        seed: a.seed,
                        gate_form: a.gate_form.parse()?,
                    },
                    &a.output,
                )
            }
            Command::Correlate(a) => (
                CommandConfig::Correlate {
                    sites: a.sites,
                    u_over_t: a.u_over_t,
                    site: a.site,
                    boundary: a.boundary,
                },
                &a.output,
            ),
        };
        let format = output.format.unwrap_or(command.default_format());
        Ok(RunConfig {
            command,
            format,
            out: output.out.clone(),
        })
    }

    fn json(&self) -> Value {
        round_json(serde_json::to_value(self).expect("config serializes"))
    }
}

/// `x` rounded to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().expect("round trip")
}

/// Fixed-point text with [`SIG_DIGITS`] significant digits; scientific
/// notation outside `1e-5 ..= 1e12`. Independent of locale.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("exponent");
    if !(-5..12).contains(&exp) {
        return sci;
    }
    let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Rounds every non-integer number in a JSON tree to [`SIG_DIGITS`].
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_sig(x)))
            .map_or(Value::Null, Value::Number),
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn csv(config: &RunConfig, header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = format!("# {}\n{header}\n", config.json());
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(format_float).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

fn json_document(config: &RunConfig, body: Value) -> String {
    let mut doc = serde_json::Map::new();
    doc.insert("config".into(), config.json());
    match round_json(body) {
        Value::Object(map) => doc.extend(map),
        other => {
            doc.insert("data".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json");
    s.push('\n');
    s
}

fn table(config: &RunConfig, header: &str, rows: Vec<Vec<f64>>) -> String {
    match config.format {
        Format::Csv => csv(config, header, rows),
        Format::Json => {
            let keys: Vec<&str> = header.split(',').collect();
            let rows: Vec<Value> = rows
                .into_iter()
                .map(|r| {
                    Value::Object(
                        keys.iter()
                            .map(|k| k.to_string())
                            .zip(r.into_iter().map(|x| json!(x)))
                            .collect(),
                    )
                })
                .collect();
            json_document(config, json!({ "rows": rows }))
        }
    }
}

fn json_only(config: &RunConfig, what: &str) -> Result<(), CliError> {
    match config.format {
        Format::Json => Ok(()),
        Format::Csv => Err(validation(format!("{what} output is JSON only"))),
    }
}

/// Runs one configuration and renders its artifact.
pub fn execute(config: &RunConfig) -> Result<Artifact, CliError> {
    let mut warnings = Vec::new();
    let contents = match &config.command {
        &CommandConfig::Sweep {
            u_min,
            u_max,
            points,
            sites,
            boundary,
        } => {
            if sites < 2 || sites % 2 != 0 {
                return Err(validation(format!("--sites must be even and at least 2, got {sites}")));
            }
            let grid = uniform_grid(u_min, u_max, points)?;
            let sweep = entanglement_sweep(&grid, sites, boundary.into())?;
            let rows = sweep
                .iter()
                .map(|p| {
                    let c = p.coefficients;
                    vec![p.u_over_t, c.w, c.z, c.u_plus, c.u_minus, p.entropy]
                })
                .collect();
            table(config, SWEEP_HEADER, rows)
        }
        &CommandConfig::Weights { u_min, u_max, points } => {
            let grid = uniform_grid(u_min, u_max, points)?;
            let mut rows = Vec::with_capacity(grid.len());
            for u in grid {
                let (_, wf) = half_filled_ground_state(2, u, Boundary::Open).map_err(|e| qdots::Error::SweepPoint {
                    u_over_t: u,
                    source: Box::new(e),
                })?;
                let w = ebit_weights(&wf)?;
                rows.push(vec![u, w.a_mag, w.b_mag]);
            }
            table(config, WEIGHTS_HEADER, rows)
        }
        CommandConfig::Teleport {
            channel,
            alpha,
            beta,
            ebit,
            trials,
            seed,
            gate_form,
        } => {
            json_only(config, "teleport")?;
            let (qubit, warning) = parse_qubit(alpha, beta)?;
            warnings.extend(warning);
            let report = run_protocol(&ProtocolConfig {
                qubit,
                channel: *channel,
                ebit: *ebit,
                trials: *trials,
                seed: *seed,
                gate_form: *gate_form,
            })?;
            json_document(config, serde_json::to_value(&report).expect("report serializes"))
        }
        &CommandConfig::Correlate {
            sites,
            u_over_t,
            site,
            boundary,
        } => {
            json_only(config, "correlate")?;
            if sites < 2 || sites % 2 != 0 {
                return Err(validation(format!(
                    "Sz = 0 at half filling needs an even number of sites, got {sites}"
                )));
            }
            if site >= sites {
                return Err(validation(format!("--site {site} is out of range for {sites} sites")));
            }
            let (_, wf) = half_filled_ground_state(sites, u_over_t, boundary.into())?;
            let report = complement_correlation(&wf.to_fock_vector(), site)?;
            json_document(config, serde_json::to_value(&report).expect("report serializes"))
        }
    };
    Ok(Artifact {
        config: config.clone(),
        contents,
        warnings,
    })
}

/// Runs a parsed command line and writes the artifact to `--out` if given.
/// The caller prints `contents` when there is no output file.
pub fn run(cli: &Cli) -> Result<Artifact, CliError> {
    let config = RunConfig::from_command(&cli.command)?;
    let artifact = execute(&config)?;
    if let Some(path) = &config.out {
        std::fs::write(path, &artifact.contents)
            .map_err(|e| std::io::Error::new(e.kind(), format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(artifact)
}
