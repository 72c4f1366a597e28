//! Batch front end for the `oaqec` library.
//!
//! A [`JobSpec`] names one analysis and its input files. [`run`] executes it and returns a
//! JSON report envelope together with an exit status: 0 when the verdict holds and every
//! residual is within tolerance, 1 when it does not, 2 on malformed input.

pub mod demos;
pub mod format;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use oaqec::algebra::{wedderburn_seeded, AlgebraStructure};
use oaqec::infoflow::analyze_interaction_seeded;
use oaqec::io::{self, ChannelJson, MatrixJson, SpanJson, StructureJson};
use oaqec::qec::{self, CodeContext};
use oaqec::recovery::{self, RecoveryReportJson};
use oaqec::{linalg, tol, KrausChannel, Matrix, OperatorSpan};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const MAX_TOL: f64 = 1e-2;
/// Random full-rank states used by `lift`.
pub const LIFT_SAMPLES: usize = 16;

#[derive(Debug, Parser)]
#[command(
    name = "oaqec",
    version,
    about = "Conserved and correctable algebras of quantum channels"
)]
pub struct Cli {
    /// Verdict and residual tolerance, in (0, 1e-2).
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Report file; standard output when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Write `elapsed_ms: null` so reports are byte-identical across runs.
    #[arg(long, global = true)]
    pub no_timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Check a channel's shape and trace preservation.
    Validate {
        #[arg(long)]
        channel: PathBuf,
    },
    /// Decide whether an algebra is conserved on the code.
    Conserved(CodeArgs),
    /// Decide whether an algebra is correctable on the code.
    Correctable(CodeArgs),
    /// Largest conserved or correctable algebra on the code.
    Largest {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        code: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Simple sectors of an algebra.
    Structure {
        #[arg(long)]
        algebra: PathBuf,
    },
    /// Synthesize a recovery channel and verify it.
    Recover(CodeArgs),
    /// Lift a corrected algebra to an operator space corrected on all states.
    Lift(CodeArgs),
    /// System/apparatus information flow of an interaction unitary.
    Infoflow {
        #[arg(long)]
        unitary: PathBuf,
        /// Apparatus column vector; `|0⟩` of a qubit when absent.
        #[arg(long)]
        apparatus: Option<PathBuf>,
    },
    /// Run a built-in example.
    Demo {
        #[arg(value_enum)]
        name: Demo,
    },
}

#[derive(Clone, Debug, Args)]
pub struct CodeArgs {
    #[arg(long)]
    pub channel: PathBuf,
    /// Code projector; the identity when absent.
    #[arg(long)]
    pub code: Option<PathBuf>,
    /// Candidate algebra; all operators on the code when absent.
    #[arg(long)]
    pub algebra: Option<PathBuf>,
    /// The algebra contains the code projector and may act outside the code.
    #[arg(long)]
    pub projector_in_algebra: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Conserved,
    Correctable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Demo {
    SpontaneousEmission,
    QutritSe,
    StabilizerZ1z2,
    PauliG,
    Bitflip3,
    HybridAddress,
    CnotInfoflow,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Conserved => "conserved",
            Mode::Correctable => "correctable",
        }
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Conserved(_) => "conserved",
            Command::Correctable(_) => "correctable",
            Command::Largest { .. } => "largest",
            Command::Structure { .. } => "structure",
            Command::Recover(_) => "recover",
            Command::Lift(_) => "lift",
            Command::Infoflow { .. } => "infoflow",
            Command::Demo { .. } => "demo",
        }
    }

    fn inputs(&self) -> BTreeMap<&'static str, Value> {
        let mut m = BTreeMap::new();
        let mut put = |k: &'static str, p: &Option<PathBuf>| {
            if let Some(p) = p {
                m.insert(k, Value::String(p.display().to_string()));
            }
        };
        match self {
            Command::Validate { channel } => put("channel", &Some(channel.clone())),
            Command::Conserved(a)
            | Command::Correctable(a)
            | Command::Recover(a)
            | Command::Lift(a) => {
                put("channel", &Some(a.channel.clone()));
                put("code", &a.code);
                put("algebra", &a.algebra);
                m.insert("projector_in_algebra", Value::Bool(a.projector_in_algebra));
            }
            Command::Largest {
                channel,
                code,
                mode,
            } => {
                put("channel", &Some(channel.clone()));
                put("code", code);
                m.insert("mode", json!(mode));
            }
            Command::Structure { algebra } => put("algebra", &Some(algebra.clone())),
            Command::Infoflow { unitary, apparatus } => {
                put("unitary", &Some(unitary.clone()));
                put("apparatus", apparatus);
            }
            Command::Demo { name } => {
                m.insert("name", json!(name));
            }
        }
        m
    }
}

/// One analysis request.
#[derive(Clone, Debug)]
pub struct JobSpec {
    pub command: Command,
    pub tol: f64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub timing: bool,
}

impl JobSpec {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            tol: DEFAULT_TOL,
            seed: 0,
            output: None,
            timing: true,
        }
    }
}

impl From<Cli> for JobSpec {
    fn from(cli: Cli) -> Self {
        Self {
            command: cli.command,
            tol: cli.tol,
            seed: cli.seed,
            output: cli.output,
            timing: !cli.no_timing,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass = 0,
    Fail = 1,
    InputError = 2,
}

impl Status {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] oaqec::Error),
}

impl CliError {
    fn status(&self) -> Status {
        use oaqec::Error as E;
        match self {
            CliError::Core(
                E::NotCorrectable { .. }
                | E::AnnihilatedSector { .. }
                | E::RecoveryNotCompressing { .. }
                | E::CertificateFailed { .. }
                | E::DecompositionFailed { .. },
            ) => Status::Fail,
            _ => Status::InputError,
        }
    }

    fn residuals(&self) -> Residuals {
        let mut r = Residuals::new();
        if let CliError::Core(e) = self {
            match e {
                oaqec::Error::NotCorrectable { what, residual }
                | oaqec::Error::CertificateFailed { what, residual } => {
                    r.insert((*what).replace(' ', "_"), *residual);
                }
                oaqec::Error::RecoveryNotCompressing { residual } => {
                    r.insert("compression".into(), *residual);
                }
                _ => {}
            }
        }
        r
    }
}

pub type Residuals = BTreeMap<String, f64>;

/// What a command produced before it is wrapped in the envelope.
pub struct Analysis {
    pub pass: bool,
    pub result: Value,
    pub residuals: Residuals,
    pub summary: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub inputs: BTreeMap<&'static str, Value>,
    pub tol: f64,
    pub seed: u64,
    pub result: Value,
    pub residuals: Residuals,
    pub elapsed_ms: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub status: Status,
    pub report: Report,
    /// One human-readable line.
    pub summary: String,
}

impl Outcome {
    pub fn to_json(&self) -> String {
        format::to_string(&self.report).expect("report serializes")
    }
}

/// Runs one job. Never panics on bad input; errors become status 2 (input) or 1 (a
/// correctability or certificate failure) with the message in `result.error`.
pub fn run(job: &JobSpec) -> Outcome {
    let start = Instant::now();
    let analysis = if job.tol.is_finite() && job.tol > 0.0 && job.tol < MAX_TOL {
        dispatch(job)
    } else {
        Err(CliError::Usage(format!(
            "--tol must lie in (0, {MAX_TOL:e}), got {}",
            job.tol
        )))
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let (status, result, residuals, summary) = match analysis {
        Ok(a) => (
            if a.pass { Status::Pass } else { Status::Fail },
            a.result,
            a.residuals,
            a.summary,
        ),
        Err(e) => {
            let status = e.status();
            let msg = e.to_string();
            (
                status,
                json!({ "error": msg }),
                e.residuals(),
                format!("error: {msg}"),
            )
        }
    };
    Outcome {
        status,
        report: Report {
            command: job.command.name(),
            inputs: job.command.inputs(),
            tol: job.tol,
            seed: job.seed,
            result,
            residuals,
            elapsed_ms: job.timing.then_some(elapsed),
        },
        summary: format!("{}: {summary}", job.command.name()),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn what(path: &Path) -> String {
    path.display().to_string()
}

fn with_file(path: &Path, e: oaqec::Error) -> CliError {
    match e {
        oaqec::Error::Parse(msg) => oaqec::Error::Parse(format!("{}: {msg}", what(path))).into(),
        other => other.into(),
    }
}

pub fn load_channel(path: &Path) -> Result<KrausChannel, CliError> {
    let json: ChannelJson = io::parse(&read(path)?, &what(path))?;
    json.to_channel().map_err(|e| with_file(path, e))
}

pub fn load_matrix(path: &Path) -> Result<Matrix, CliError> {
    let json: MatrixJson = io::parse(&read(path)?, &what(path))?;
    json.to_matrix("matrix").map_err(|e| with_file(path, e))
}

pub fn load_span(path: &Path) -> Result<OperatorSpan, CliError> {
    let json: SpanJson = io::parse(&read(path)?, &what(path))?;
    json.to_span().map_err(|e| with_file(path, e))
}

fn load_code(path: &Option<PathBuf>, dim: usize) -> Result<Matrix, CliError> {
    match path {
        Some(p) => load_matrix(p),
        None => Ok(linalg::identity(dim)),
    }
}

fn load_context(a: &CodeArgs, tolerance: f64) -> Result<CodeContext, CliError> {
    let channel = load_channel(&a.channel)?;
    let projector = load_code(&a.code, channel.dim_in())?;
    let algebra = match &a.algebra {
        Some(p) => load_span(p)?,
        None => OperatorSpan::full_on(&projector)?,
    };
    Ok(
        CodeContext::new(channel, projector, algebra, a.projector_in_algebra)?
            .with_tolerance(tolerance),
    )
}

fn dispatch(job: &JobSpec) -> Result<Analysis, CliError> {
    let tol = job.tol;
    match &job.command {
        Command::Validate { channel } => validate(&load_channel(channel)?, tol),
        Command::Conserved(a) => verdict(&load_context(a, tol)?, Mode::Conserved),
        Command::Correctable(a) => verdict(&load_context(a, tol)?, Mode::Correctable),
        Command::Largest {
            channel,
            code,
            mode,
        } => {
            let ch = load_channel(channel)?;
            let p = load_code(code, ch.dim_in())?;
            largest(&ch, &p, *mode, tol, job.seed)
        }
        Command::Structure { algebra } => structure(&load_span(algebra)?, tol, job.seed),
        Command::Recover(a) => recover(&load_context(a, tol)?, tol, job.seed),
        Command::Lift(a) => lift(&load_context(a, tol)?, tol, job.seed),
        Command::Infoflow { unitary, apparatus } => {
            let u = load_matrix(unitary)?;
            let psi = match apparatus {
                Some(p) => load_matrix(p)?,
                None => linalg::ket(2, 0),
            };
            infoflow(&u, &psi, tol, job.seed)
        }
        Command::Demo { name } => demos::run(*name, tol, job.seed),
    }
}

pub(crate) fn within(residuals: &Residuals, tol: f64) -> bool {
    residuals.values().all(|r| r.is_finite() && *r <= tol)
}

pub fn validate(ch: &KrausChannel, tol: f64) -> Result<Analysis, CliError> {
    let report = ch.validate_tp();
    let tp = report.tp_defect <= tol;
    let mut residuals = Residuals::from([("tp_defect".to_owned(), report.tp_defect)]);
    if let Some(u) = report.unital_defect {
        residuals.insert("unital_defect".into(), u);
    }
    Ok(Analysis {
        pass: tp,
        result: json!({
            "dim_in": ch.dim_in(),
            "dim_out": ch.dim_out(),
            "kraus_count": ch.len(),
            "trace_preserving": tp,
            "unital": report.unital_defect.map(|u| u <= tol),
        }),
        residuals,
        summary: format!(
            "{}x{} channel with {} Kraus elements, trace preserving: {tp} (defect {:.3e})",
            ch.dim_out(),
            ch.dim_in(),
            ch.len(),
            report.tp_defect
        ),
    })
}

pub fn verdict(ctx: &CodeContext, mode: Mode) -> Result<Analysis, CliError> {
    let v = match mode {
        Mode::Conserved => qec::is_conserved(ctx)?,
        Mode::Correctable => qec::is_correctable(ctx)?,
    };
    let mut residuals = Residuals::from([("commutator".to_owned(), v.residual_commutator)]);
    if let Some(d) = v.residual_definition {
        residuals.insert("definition".into(), d);
    }
    let word = mode.name();
    Ok(Analysis {
        pass: v.verdict,
        result: json!({
            "verdict": v.verdict,
            "algebra_dim": v.algebra_dim,
            "projector_in_algebra": ctx.projector_in_algebra,
        }),
        residuals,
        summary: format!(
            "{word}: {} (algebra dim {}, commutator residual {:.3e})",
            v.verdict, v.algebra_dim, v.residual_commutator
        ),
    })
}

fn structure_json(st: &AlgebraStructure) -> Value {
    json!({
        "algebra_dim": st.algebra_dim(),
        "shape": st.shape(),
        "structure": StructureJson::from(st),
    })
}

pub fn largest(
    ch: &KrausChannel,
    p: &Matrix,
    mode: Mode,
    tol: f64,
    seed: u64,
) -> Result<Analysis, CliError> {
    let a = match mode {
        Mode::Conserved => qec::largest_conserved(ch, p)?,
        Mode::Correctable => qec::largest_correctable(ch, p)?,
    };
    let st = wedderburn_seeded(&a, tol::RANK, seed)?;
    let residuals = Residuals::from([
        ("structure".to_owned(), st.verify(&a)),
        ("closure".to_owned(), a.closure_residual()),
    ]);
    let pass = within(&residuals, tol);
    let mut result = structure_json(&st);
    result["mode"] = json!(mode);
    result["contains_projector"] = json!(qec::projector_residual(&a, p) <= tol);
    result["algebra"] = json!(SpanJson::from(&a));
    Ok(Analysis {
        pass,
        summary: format!(
            "largest {} algebra has dim {}, sectors {:?}",
            mode.name(),
            a.len(),
            st.shape()
        ),
        result,
        residuals,
    })
}

pub fn structure(a: &OperatorSpan, tol: f64, seed: u64) -> Result<Analysis, CliError> {
    let st = wedderburn_seeded(a, tol::RANK, seed)?;
    let residuals = Residuals::from([("structure".to_owned(), st.verify(a))]);
    Ok(Analysis {
        pass: within(&residuals, tol),
        result: structure_json(&st),
        summary: format!(
            "algebra dim {}, sectors (n, m) {:?}",
            st.algebra_dim(),
            st.shape()
        ),
        residuals,
    })
}

fn synthesize(
    ctx: &CodeContext,
    seed: u64,
) -> Result<(AlgebraStructure, recovery::RecoveryReport, f64), CliError> {
    let st = wedderburn_seeded(&ctx.algebra, tol::RANK, seed)?;
    let rep = recovery::synthesize_recovery(&ctx.channel, &ctx.projector, &ctx.algebra, &st)?;
    let schrodinger = recovery::verify_schrodinger(
        &ctx.channel,
        &rep.recovery,
        &st,
        recovery::SCHRODINGER_SAMPLES,
        seed,
    )?;
    Ok((st, rep, schrodinger))
}

pub fn recover(ctx: &CodeContext, tol: f64, seed: u64) -> Result<Analysis, CliError> {
    let (st, rep, schrodinger) = synthesize(ctx, seed)?;
    let residuals = Residuals::from([
        ("heisenberg".to_owned(), rep.heisenberg_residual),
        (
            "schrodinger".to_owned(),
            rep.schrodinger_residual.max(schrodinger),
        ),
        ("tp_defect".to_owned(), rep.tp_defect),
        ("scalarity".to_owned(), rep.scalarity_residual),
    ]);
    let mut result = json!(RecoveryReportJson::from(&rep));
    result["shape"] = json!(st.shape());
    Ok(Analysis {
        pass: within(&residuals, tol),
        summary: format!(
            "recovery with {} Kraus elements, heisenberg residual {:.3e}",
            rep.recovery.len(),
            rep.heisenberg_residual
        ),
        result,
        residuals,
    })
}

pub fn lift(ctx: &CodeContext, tol: f64, seed: u64) -> Result<Analysis, CliError> {
    let (_, rep, _) = synthesize(ctx, seed)?;
    let lifted =
        recovery::lift_operator_space(&ctx.channel, &rep.recovery, &ctx.algebra, &ctx.projector)?;
    let all_states = recovery::verify_all_states(
        &ctx.channel,
        &rep.recovery,
        &lifted.span,
        LIFT_SAMPLES,
        seed,
    )?;
    let residuals = Residuals::from([
        ("heisenberg".to_owned(), rep.heisenberg_residual),
        ("exactness".to_owned(), lifted.exactness_residual),
        ("compression".to_owned(), lifted.compression_residual),
        ("all_states".to_owned(), all_states),
    ]);
    Ok(Analysis {
        pass: within(&residuals, tol),
        result: json!({
            "lifted_dim": lifted.span.len(),
            "multiplication_closed": lifted.multiplication_closed,
            "closure_residual": lifted.closure_residual,
            "recovery": RecoveryReportJson::from(&rep),
            "span": SpanJson::from(&lifted.span),
        }),
        summary: format!(
            "lifted space of dim {} (closed: {}), all-states residual {all_states:.3e}",
            lifted.span.len(),
            lifted.multiplication_closed
        ),
        residuals,
    })
}

pub fn infoflow(u: &Matrix, psi: &Matrix, tol: f64, seed: u64) -> Result<Analysis, CliError> {
    let r = analyze_interaction_seeded(u, psi, seed)?;
    let certificates = serde_json::to_value(r.certificates).expect("certificates serialize");
    let residuals: Residuals = certificates
        .as_object()
        .expect("struct")
        .iter()
        .map(|(k, v)| (k.clone(), v.as_f64().unwrap_or(f64::INFINITY)))
        .collect();
    let matrices = |ms: &[Matrix]| ms.iter().map(MatrixJson::from).collect::<Vec<_>>();
    Ok(Analysis {
        pass: within(&residuals, tol),
        result: json!({
            "d_s": r.isometry.d_s(),
            "d_a": r.isometry.d_a(),
            "a_ss_dim": r.a_ss.len(),
            "a_sa_dim": r.a_sa.len(),
            "c_dim": r.c.len(),
            "duplicated_observable": r.has_duplicated_observable(),
            "c_projectors": matrices(&r.c_projectors),
            "x_povm": matrices(&r.x_povm),
            "y_povm": matrices(&r.y_povm),
            "correlation": r.correlation,
            "max_correlation_deviation": r.certificates.correlation_deviation,
        }),
        summary: format!(
            "dim A_SS {}, A_SA {}, C {}, worst certificate {:.3e}",
            r.a_ss.len(),
            r.a_sa.len(),
            r.c.len(),
            r.certificates.worst()
        ),
        residuals,
    })
}
