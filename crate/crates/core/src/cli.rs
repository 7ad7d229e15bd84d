//! Command-line front end. Every verb reads JSON files, writes JSON files, and prints one
//! JSON report on stdout. Exit codes: 0 ok, 2 validation or input failure, 3 infeasible protocol.

use crate::channel::{
    apply, choi_from_kraus, jamiolkowski_fidelity, join_matrix, kraus_from_choi, split_matrix,
    trace_distance, ChoiJson, ChoiState, KrausSet,
};
use crate::error::Error;
use crate::forms::{
    census, cnot_to_phase_frame, extract_cnot_form, extract_pauli_channel, extract_phase_gate_form,
    extract_swap_form, extract_white_noise, phase_frame_to_cnot,
};
use crate::linalg::{ComplexMatrix, TensorShape};
use crate::lindblad::{
    ising_standard_form, stroboscopic_evolve, twirl_generator, EvolutionMode, GeneratorJson,
    LindbladGenerator, PulseSchedule,
};
use crate::pauli::{gate, phase_gate, GateKind};
use crate::sacrifice::{
    cnot_sacrifice, identity_channel_sacrifice, phase_gate_sacrifice, swap_sacrifice,
    SacrificeResult,
};
use crate::twirl::{
    custom_set, depolarizing_set, named_set, pauli_set, phase_gate_set, twirl, CustomSetJson,
    TwirlSet,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::{json, Value};
use std::io;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "noiseforms",
    version,
    about = "Twirl noisy quantum channels into standard forms"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Check complete positivity and trace preservation of a channel.
    Validate(Common),
    /// Apply a channel to a density matrix (`--state`).
    Apply {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        state: PathBuf,
    },
    /// Build a channel file from a Kraus file, or canonicalize a channel file.
    Choi(Common),
    /// Kraus decomposition of a channel.
    Kraus(Common),
    /// Twirl a channel over a named or custom set.
    Twirl {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        set: String,
    },
    /// Extract the standard-form parameters of a twirled channel.
    Form {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        shape: FormArgs,
    },
    /// Mix a channel down to ideal gate plus global white noise.
    Sacrifice {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "identity")]
        gate: SacrificeGate,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, value_enum, default_value = "white-noise")]
        target: Target,
        #[arg(long)]
        emit_schedule: bool,
    },
    /// Evolve a Lindblad generator, optionally under stroboscopic twirling.
    Lindblad {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        time: f64,
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, value_enum, default_value = "sequential")]
        mode: Mode,
        #[arg(long)]
        emit_schedule: bool,
    },
    /// Trace distance between two channels (`--in`, `--other`).
    Distance {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        other: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FormArgs {
    /// Gate standard form; without it the channel is read as a Pauli channel.
    #[arg(long, value_enum)]
    gate: Option<FormGate>,
    #[arg(long)]
    alpha: Option<f64>,
    /// `pauli` (default) or `depolarizing` when no gate is given.
    #[arg(long)]
    set: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormGate {
    Swap,
    Cnot,
    Phase,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SacrificeGate {
    Identity,
    Swap,
    Cnot,
    Phase,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Target {
    WhiteNoise,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Sequential,
    Random,
}

/// Failure of a CLI run, with a machine-readable code.
#[derive(Debug)]
pub enum CliError {
    FileNotFound(PathBuf),
    Io(PathBuf, io::Error),
    Schema(PathBuf, String),
    Usage(String),
    Library(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Library(e)
    }
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::FileNotFound(_) => "file_not_found",
            CliError::Io(..) => "io",
            CliError::Schema(..) => "schema",
            CliError::Usage(_) => "usage",
            CliError::Library(e) => e.code(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(Error::Infeasible(_)) => EXIT_INFEASIBLE,
            _ => EXIT_VALIDATION,
        }
    }

    fn to_json(&self) -> Value {
        let message = match self {
            CliError::FileNotFound(p) => format!("file not found: {}", p.display()),
            CliError::Io(p, e) => format!("{}: {e}", p.display()),
            CliError::Schema(p, e) => format!("{}: {e}", p.display()),
            CliError::Usage(m) => m.clone(),
            CliError::Library(e) => e.to_string(),
        };
        let mut err = json!({ "code": self.code(), "message": message });
        if let CliError::Library(Error::Pattern { form, violations }) = self {
            err["form"] = json!(form);
            err["violations"] = serde_json::to_value(violations).unwrap_or(Value::Null);
        }
        json!({ "error": err })
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

// ---------------------------------------------------------------------------------------------
// JSON output

/// Compact JSON with every float written to 17 significant digits, so that files round-trip
/// byte for byte.
struct ExactFloats;

impl serde_json::ser::Formatter for ExactFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats);
    value.serialize(&mut ser).expect("in-memory serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => CliError::FileNotFound(path.to_path_buf()),
        _ => CliError::Io(path.to_path_buf(), e),
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema(path.to_path_buf(), e.to_string()))
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> CliResult<()> {
    std::fs::write(path, to_json_string(value)).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

pub fn load_channel(path: &Path) -> CliResult<ChoiState> {
    let j: ChoiJson = read_json(path)?;
    Ok(ChoiState::try_from(j)?)
}

pub fn save_channel(path: &Path, e: &ChoiState) -> CliResult<()> {
    write_json(path, &ChoiJson::from(e))
}

/// Density matrix file: `{"re","im"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// Kraus file: operators as `d_out × d_in` real and imaginary parts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KrausJson {
    pub in_dims: Vec<usize>,
    pub out_dims: Vec<usize>,
    pub kraus_re: Vec<Vec<Vec<f64>>>,
    pub kraus_im: Vec<Vec<Vec<f64>>>,
}

/// Channel output goes to `--out` when given, otherwise inline in the report.
fn emit_channel(report: &mut Value, out: &Option<PathBuf>, e: &ChoiState) -> CliResult<()> {
    match out {
        Some(p) => {
            save_channel(p, e)?;
            report["out"] = json!(p.display().to_string());
        }
        None => report["channel"] = serde_json::to_value(ChoiJson::from(e)).expect("plain data"),
    }
    Ok(())
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data")
}

// ---------------------------------------------------------------------------------------------
// Verbs

fn resolve_set(name: &str, shape: &TensorShape) -> CliResult<TwirlSet> {
    match name.strip_prefix("custom:") {
        Some(file) => Ok(custom_set(&read_json::<CustomSetJson>(Path::new(file))?)?),
        None => Ok(named_set(name, shape)?),
    }
}

fn identity_fidelity(e: &ChoiState) -> Option<f64> {
    (e.d_in() == e.d_out())
        .then(|| jamiolkowski_fidelity(e, &ComplexMatrix::identity(e.d_in())).ok())
        .flatten()
}

fn validate(common: &Common) -> CliResult<Value> {
    let e = load_channel(&common.input)?;
    let r = e.validate();
    let mut report = json!({
        "cp": r.cp,
        "tp": r.tp,
        "min_eigenvalue": r.min_eigenvalue,
        "tp_residual": r.tp_residual,
    });
    if let Some(f) = identity_fidelity(&e) {
        report["fidelity_identity"] = json!(f);
    }
    Ok(report)
}

fn apply_verb(common: &Common, state: &Path) -> CliResult<Value> {
    let e = load_channel(&common.input)?;
    let rho: DensityJson = read_json(state)?;
    let rho = join_matrix(&rho.re, &rho.im)?;
    let out = apply(&e, &rho)?;
    let (re, im) = split_matrix(&out);
    let result = DensityJson { re, im };
    match &common.out {
        Some(p) => {
            write_json(p, &result)?;
            Ok(json!({ "out": p.display().to_string(), "trace": out.trace().re }))
        }
        None => Ok(json!({ "state": to_value(&result), "trace": out.trace().re })),
    }
}

fn choi_verb(common: &Common) -> CliResult<Value> {
    let raw: Value = read_json(&common.input)?;
    let schema = |e: serde_json::Error| CliError::Schema(common.input.clone(), e.to_string());
    let e = if raw.get("kraus_re").is_some() {
        let k: KrausJson = serde_json::from_value(raw).map_err(schema)?;
        let ops = k
            .kraus_re
            .iter()
            .zip(&k.kraus_im)
            .map(|(re, im)| join_matrix(re, im))
            .collect::<crate::error::Result<Vec<_>>>()?;
        if ops.is_empty() || k.kraus_re.len() != k.kraus_im.len() {
            return Err(CliError::Schema(
                common.input.clone(),
                "Kraus list is empty or unbalanced".into(),
            ));
        }
        choi_from_kraus(
            &KrausSet { operators: ops },
            &TensorShape::new(k.in_dims)?,
            &TensorShape::new(k.out_dims)?,
        )?
    } else {
        let j: ChoiJson = serde_json::from_value(raw).map_err(schema)?;
        ChoiState::try_from(j)?
    };
    let r = e.validate();
    let mut report = json!({ "cp": r.cp, "tp": r.tp });
    emit_channel(&mut report, &common.out, &e)?;
    Ok(report)
}

fn kraus_verb(common: &Common) -> CliResult<Value> {
    let e = load_channel(&common.input)?;
    let k = kraus_from_choi(&e)?;
    let (kraus_re, kraus_im) = k.operators.iter().map(split_matrix).unzip();
    let j = KrausJson {
        in_dims: e.in_shape().factors().to_vec(),
        out_dims: e.out_shape().factors().to_vec(),
        kraus_re,
        kraus_im,
    };
    let mut report = json!({ "rank": k.operators.len() });
    match &common.out {
        Some(p) => {
            write_json(p, &j)?;
            report["out"] = json!(p.display().to_string());
        }
        None => report["kraus"] = to_value(&j),
    }
    Ok(report)
}

fn twirl_verb(common: &Common, set_name: &str) -> CliResult<Value> {
    let e = load_channel(&common.input)?;
    let set = resolve_set(set_name, e.in_shape())?;
    let t = twirl(&e, &set)?;
    let mut report = json!({ "set": set_name, "elements": set.len() });
    if let Some(f) = identity_fidelity(&e) {
        report["fidelity_identity_before"] = json!(f);
        report["fidelity_identity_after"] = json!(identity_fidelity(&t));
    }
    if set_name == "pauli" || set_name == "depolarizing" {
        let form = extract_pauli_channel(&t)?;
        report["bell_weights"] = json!(form.weights);
        report["basis_ordering"] = json!(form.basis_ordering);
        report["off_diagonal_residual"] = json!(bell_off_diagonal(&t, &form)?);
    }
    emit_channel(&mut report, &common.out, &t)?;
    Ok(report)
}

/// Largest off-diagonal magnitude in the Bell-product basis.
fn bell_off_diagonal(e: &ChoiState, form: &crate::forms::PauliChannelForm) -> CliResult<f64> {
    Ok((e.matrix() - form.reconstruct()?.matrix()).max_abs())
}

fn require_alpha(alpha: Option<f64>) -> CliResult<f64> {
    match alpha {
        Some(a) if a.is_finite() => Ok(a),
        Some(_) => Err(CliError::Usage("--alpha must be finite (radians)".into())),
        None => Err(CliError::Usage(
            "--alpha is required for the phase gate".into(),
        )),
    }
}

fn form_verb(common: &Common, args: &FormArgs) -> CliResult<Value> {
    let e = load_channel(&common.input)?;
    let report = match args.gate {
        Some(FormGate::Phase) => {
            let alpha = require_alpha(args.alpha)?;
            let f = extract_phase_gate_form(&e, alpha)?;
            json!({
                "form": "phase-gate",
                "alpha": alpha,
                "fidelity": f.f,
                "parameter_count": census::PHASE_GATE,
                "parameters": to_value(&f),
            })
        }
        Some(FormGate::Cnot) => {
            let f = extract_cnot_form(&cnot_to_phase_frame(&e)?)?;
            json!({
                "form": "cnot",
                "fidelity": f.f,
                "parameter_count": census::CNOT,
                "parameters": to_value(&f),
            })
        }
        Some(FormGate::Swap) => {
            let f = extract_swap_form(&e)?;
            json!({
                "form": "swap",
                "fidelity": f.f,
                "parameter_count": census::SWAP,
                "parameters": to_value(&f),
            })
        }
        None => match args.set.as_deref().unwrap_or("pauli") {
            "pauli" => {
                let f = extract_pauli_channel(&e)?;
                json!({
                    "form": "pauli-channel",
                    "fidelity": f.weights[0],
                    "parameter_count": census::pauli_channel(f.d, f.parties),
                    "parameters": to_value(&f),
                })
            }
            "depolarizing" => {
                let f = extract_white_noise(&e)?;
                json!({
                    "form": "white-noise",
                    "fidelity": identity_fidelity(&e),
                    "parameter_count": census::white_noise(f.parties),
                    "parameters": to_value(&f),
                })
            }
            other => {
                return Err(CliError::Usage(format!(
                    "no standard form for set '{other}'"
                )))
            }
        },
    };
    Ok(report)
}

fn sacrifice_verb(
    common: &Common,
    g: SacrificeGate,
    alpha: Option<f64>,
    emit_schedule: bool,
) -> CliResult<Value> {
    let e = load_channel(&common.input)?;
    let (mut result, output): (SacrificeResult, ChoiState) = match g {
        SacrificeGate::Identity => {
            let r = identity_channel_sacrifice(&e)?;
            let out = r
                .output
                .clone()
                .expect("channel protocols produce a channel");
            (r, out)
        }
        SacrificeGate::Swap => {
            let r = swap_sacrifice(&e)?;
            let out = r
                .output
                .clone()
                .expect("channel protocols produce a channel");
            (r, out)
        }
        SacrificeGate::Cnot => {
            let r = cnot_sacrifice(&cnot_to_phase_frame(&e)?)?;
            let out = phase_frame_to_cnot(
                r.output
                    .as_ref()
                    .expect("channel protocols produce a channel"),
            )?;
            (r, out)
        }
        SacrificeGate::Phase => {
            let r = phase_gate_sacrifice(&e, require_alpha(alpha)?)?;
            let out = r
                .output
                .clone()
                .expect("channel protocols produce a channel");
            (r, out)
        }
    };
    if !emit_schedule {
        result.schedule.clear();
    }
    let mut report = to_value(&result);
    if !emit_schedule {
        report.as_object_mut().expect("struct").remove("schedule");
    }
    report["target"] = json!("white-noise");
    emit_channel(&mut report, &common.out, &output)?;
    Ok(report)
}

fn generator_set(name: &str, z: &LindbladGenerator) -> CliResult<TwirlSet> {
    Ok(match name {
        "pauli" => pauli_set(2, z.qubits())?,
        "depolarizing" => depolarizing_set(2, z.qubits())?,
        "phase-gate" => phase_gate_set(),
        other => match other.strip_prefix("custom:") {
            Some(file) => custom_set(&read_json::<CustomSetJson>(Path::new(file))?)?,
            None => {
                return Err(CliError::Usage(format!(
                    "twirl set '{other}' is not available for generators"
                )))
            }
        },
    })
}

#[allow(clippy::too_many_arguments)]
fn lindblad_verb(
    common: &Common,
    time: f64,
    set: Option<&str>,
    steps: Option<usize>,
    mode: Mode,
    emit_schedule: bool,
) -> CliResult<Value> {
    let j: GeneratorJson = read_json(&common.input)?;
    let z = LindbladGenerator::try_from(j)?;
    let Some(set_name) = set else {
        if steps.is_some() {
            return Err(CliError::Usage(
                "--steps needs a control set (--set)".into(),
            ));
        }
        let e = z.evolve(time)?;
        let mut report = json!({ "time": time, "tp": e.is_tp(), "cp": e.is_cp() });
        emit_channel(&mut report, &common.out, &e)?;
        return Ok(report);
    };
    let set = generator_set(set_name, &z)?;
    let averaged = twirl_generator(&z, &set)?;
    let target = averaged.evolve(time)?;
    let mut report = json!({
        "time": time,
        "set": set_name,
        "standard_form": to_value(&GeneratorJson::from(&averaged)),
    });
    if set_name == "phase-gate" {
        let ising = ising_standard_form(&z)?;
        report["ising"] = json!({
            "g": ising.g,
            "g_prime": ising.g_prime,
            "time_cost": ising.time_cost,
            "lamb_identity": ising.lamb_identity,
        });
        report["phase_gate_residual_ok"] =
            json!(extract_phase_gate_form(&target, ising.g_prime * time).is_ok());
    }
    let output = match steps {
        Some(m) => {
            let schedule = PulseSchedule::from_set(&set, m, time)?;
            let mode = match mode {
                Mode::Sequential => EvolutionMode::Sequential,
                Mode::Random => EvolutionMode::Random,
            };
            let e = stroboscopic_evolve(&z, &schedule, mode)?;
            report["steps"] = json!(m);
            report["mode"] = to_value(&mode);
            report["trace_distance_to_standard_form"] = json!(trace_distance(&e, &target)?);
            if emit_schedule {
                report["schedule"] = schedule
                    .segments
                    .iter()
                    .map(|s| json!({ "label": s.label, "fraction": s.fraction }))
                    .collect();
            }
            e
        }
        None => target,
    };
    emit_channel(&mut report, &common.out, &output)?;
    Ok(report)
}

fn distance_verb(common: &Common, other: &Path) -> CliResult<Value> {
    let a = load_channel(&common.input)?;
    let b = load_channel(other)?;
    Ok(json!({ "trace_distance": trace_distance(&a, &b)? }))
}

fn dispatch(verb: &Verb) -> CliResult<Value> {
    match verb {
        Verb::Validate(c) => validate(c),
        Verb::Apply { common, state } => apply_verb(common, state),
        Verb::Choi(c) => choi_verb(c),
        Verb::Kraus(c) => kraus_verb(c),
        Verb::Twirl { common, set } => twirl_verb(common, set),
        Verb::Form { common, shape } => form_verb(common, shape),
        Verb::Sacrifice {
            common,
            gate: g,
            alpha,
            target: Target::WhiteNoise,
            emit_schedule,
        } => sacrifice_verb(common, *g, *alpha, *emit_schedule),
        Verb::Lindblad {
            common,
            time,
            set,
            steps,
            mode,
            emit_schedule,
        } => lindblad_verb(common, *time, set.as_deref(), *steps, *mode, *emit_schedule),
        Verb::Distance { common, other } => distance_verb(common, other),
    }
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code and stdout.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => (EXIT_OK, e.to_string()),
                _ => {
                    let err = CliError::Usage(e.to_string().trim_end().to_string());
                    (err.exit_code(), to_json_string(&err.to_json()))
                }
            };
        }
    };
    match dispatch(&cli.verb) {
        Ok(report) => (EXIT_OK, to_json_string(&report)),
        Err(err) => (err.exit_code(), to_json_string(&err.to_json())),
    }
}

/// Ideal two-qubit gate unitary for a sacrifice target.
pub fn sacrifice_gate_unitary(name: &str, alpha: Option<f64>) -> Option<ComplexMatrix> {
    match name {
        "identity" => Some(ComplexMatrix::identity(4)),
        "swap" => Some(gate(GateKind::Swap).matrix),
        "cnot" => Some(gate(GateKind::Cnot).matrix),
        "phase" => alpha.map(phase_gate),
        _ => None,
    }
}
