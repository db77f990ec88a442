//! The `fsm-rv` command line. Verdict records go to standard output, one
//! JSON object per line; diagnostics go to standard error.
//!
//! Exit codes: 0 every property holds, 1 some property is false, 2 some
//! property is incompatible with the abstraction (none false), 3 usage or
//! parse error, 4 runtime error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::thread;

use clap::{Parser, Subcommand, ValueEnum};

use crate::checker::{CheckOptions, Verdict, VerdictValue};
use crate::export::{self, Color, LabelMode, RenderOptions};
use crate::generators::{self, Scenario, ScenarioConfig};
use crate::model::{Model, ModelKind};
use crate::online::{self, Session, SessionOptions};
use crate::pipeline::{self, PipelineError, Workbench};
use crate::specfile::Spec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_INCOMPATIBLE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Parser)]
#[command(name = "fsm-rv", version, about = "Extract state models from execution traces and check temporal properties on them")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a model from a trace and dump it.
    Build {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, value_enum, default_value = "dsm")]
        model: Kind,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the spec's properties on a model of the trace.
    Check {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, value_enum, default_value = "lsm")]
        model: Kind,
        /// Check only the named properties.
        #[arg(long = "only", value_name = "NAME")]
        only: Vec<String>,
        /// Extra property text to check; named `arg1`, `arg2`, ...
        #[arg(long = "prop", value_name = "PROPERTY")]
        props: Vec<String>,
        /// Count states where a property is undefined as failures.
        #[arg(long)]
        strict_undefined: bool,
    },
    /// Monitor a program that streams its trace over TCP.
    Serve {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value = "127.0.0.1:7878")]
        listen: String,
        #[arg(long)]
        terminate_on_violation: bool,
        /// Records buffered between the socket and the checker.
        #[arg(long)]
        buffer: Option<usize>,
        #[arg(long)]
        strict_undefined: bool,
        /// Write the session model (JSON dump) here when a session ends.
        #[arg(long)]
        dump_model: Option<PathBuf>,
        /// Serve a single session, then exit with its verdict code.
        #[arg(long)]
        once: bool,
    },
    /// Render or re-emit a model dump.
    Export {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
        /// `<stateKey>=<color>`, color one of green, red, gray.
        #[arg(long, value_name = "KEY=COLOR")]
        highlight: Vec<String>,
        #[arg(long)]
        no_counts: bool,
        /// Label nodes with values only.
        #[arg(long)]
        compact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a scenario trace and its spec file.
    Gen {
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Target number of state writes.
        #[arg(long, default_value_t = 600)]
        events: usize,
        #[arg(long)]
        bug: Option<String>,
        /// Readers-writers: writers take priority over new readers.
        #[arg(long)]
        priority: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Lsm,
    Dsm,
    Asm,
    Path,
}

impl From<Kind> for ModelKind {
    fn from(k: Kind) -> ModelKind {
        match k {
            Kind::Lsm => ModelKind::Lsm,
            Kind::Dsm => ModelKind::Dsm,
            Kind::Asm => ModelKind::Asm,
            Kind::Path => ModelKind::Path,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

/// A failed command with the exit code it maps to.
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

fn runtime(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_RUNTIME,
        message: message.to_string(),
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        if e.is_usage() {
            usage(e)
        } else {
            runtime(e)
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or("FSMRV_LOG", "warn"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.cmd {
        Cmd::Build { spec, trace, model, format, out } => build(&spec, &trace, model.into(), format, out.as_deref()),
        Cmd::Check {
            spec,
            trace,
            model,
            only,
            props,
            strict_undefined,
        } => check(&spec, &trace, model.into(), &only, &props, CheckOptions { strict_undefined }),
        Cmd::Serve {
            spec,
            listen,
            terminate_on_violation,
            buffer,
            strict_undefined,
            dump_model,
            once,
        } => serve(
            &spec,
            &listen,
            SessionOptions {
                terminate_on_violation,
                check: CheckOptions { strict_undefined },
            },
            buffer,
            dump_model.as_deref(),
            once,
        ),
        Cmd::Export {
            model,
            format,
            highlight,
            no_counts,
            compact,
            out,
        } => export_cmd(&model, format, &highlight, !no_counts, compact, out.as_deref()),
        Cmd::Gen {
            scenario,
            seed,
            events,
            bug,
            priority,
            out,
        } => gen(&scenario, seed, events, bug, priority, &out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("fsm-rv: {}", f.message);
            f.code
        }
    }
}

fn load_spec(path: &Path) -> Result<Spec, Failure> {
    Spec::load(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_trace(spec: &Spec, path: &Path) -> Result<Vec<crate::trace::KeyWrite>, Failure> {
    let f = File::open(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    pipeline::load_writes(spec, BufReader::new(f)).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| runtime(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(runtime),
    }
}

fn render(model: &Model, format: Format, opts: &RenderOptions) -> String {
    match format {
        Format::Json => export::to_json(model) + "\n",
        Format::Dot => export::to_dot(model, opts),
    }
}

fn build(spec: &Path, trace: &Path, kind: ModelKind, format: Format, out: Option<&Path>) -> Result<i32, Failure> {
    let spec = load_spec(spec)?;
    let writes = load_trace(&spec, trace)?;
    let model = pipeline::build_model(&spec, kind, &writes)?;
    log::info!("{kind} model: {} states", model.state_count());
    emit(out, &render(&model, format, &RenderOptions::default()))?;
    Ok(EXIT_OK)
}

/// Exit code of a set of verdicts.
pub fn verdict_code<'a>(verdicts: impl IntoIterator<Item = &'a Verdict>) -> i32 {
    let mut code = EXIT_OK;
    for v in verdicts {
        match v.value {
            VerdictValue::False => return EXIT_FALSE,
            VerdictValue::Incompatible => code = EXIT_INCOMPATIBLE,
            _ => {}
        }
    }
    code
}

fn check(
    spec_path: &Path,
    trace: &Path,
    kind: ModelKind,
    only: &[String],
    extra: &[String],
    opts: CheckOptions,
) -> Result<i32, Failure> {
    let mut spec = load_spec(spec_path)?;
    for (i, text) in extra.iter().enumerate() {
        spec.add_prop(&format!("arg{}", i + 1), text).map_err(|e| usage(format!("--prop `{text}`: {e}")))?;
    }
    if !only.is_empty() {
        spec.retain_props(only).map_err(usage)?;
    }
    if spec.props().is_empty() {
        return Err(usage("no properties to check"));
    }
    if kind == ModelKind::Asm && !spec.has_abstraction() {
        return Err(usage("--model asm needs at least one non-identity `abs` declaration"));
    }
    let writes = load_trace(&spec, trace)?;
    let wb = Workbench::new(&spec, &writes, opts);
    let results: Vec<Result<Verdict, PipelineError>> = thread::scope(|s| {
        let handles: Vec<_> = spec
            .props()
            .iter()
            .map(|p| {
                let wb = &wb;
                s.spawn(move || wb.check(p, kind))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("checker thread panicked")).collect()
    });
    let mut verdicts = Vec::new();
    let mut failure: Option<Failure> = None;
    let mut stdout = io::stdout().lock();
    for (p, r) in spec.props().iter().zip(results) {
        match r {
            Ok(v) => {
                writeln!(stdout, "{}", v.to_json(&p.name)).map_err(runtime)?;
                verdicts.push(v);
            }
            Err(e) => {
                let f = Failure::from(e);
                eprintln!("fsm-rv: property `{}`: {}", p.name, f.message);
                // A runtime error outranks a usage error.
                if failure.as_ref().is_none_or(|old| f.code > old.code) {
                    failure = Some(f);
                }
            }
        }
    }
    match failure {
        Some(f) => Ok(f.code),
        None => Ok(verdict_code(&verdicts)),
    }
}

fn serve(
    spec_path: &Path,
    listen: &str,
    opts: SessionOptions,
    buffer: Option<usize>,
    dump: Option<&Path>,
    once: bool,
) -> Result<i32, Failure> {
    let mut spec = load_spec(spec_path)?;
    if let Some(b) = buffer {
        spec.set_buffer(b);
    }
    loop {
        let session = Session::new(spec.clone(), opts)?;
        let handle = online::start_session(listen, session).map_err(usage)?;
        eprintln!("fsm-rv: listening on {}", handle.addr());
        let outcome = handle.wait().map_err(runtime)?;
        let mut stdout = io::stdout().lock();
        for (name, v) in &outcome.report.verdicts {
            writeln!(stdout, "{}", v.to_json(name)).map_err(runtime)?;
        }
        drop(stdout);
        if let Some(p) = dump {
            emit(Some(p), &(export::to_json(&Model::Graph(outcome.model)) + "\n"))?;
        }
        if once {
            return Ok(verdict_code(outcome.report.verdicts.iter().map(|(_, v)| v)));
        }
    }
}

fn export_cmd(
    path: &Path,
    format: Format,
    highlight: &[String],
    counts: bool,
    compact: bool,
    out: Option<&Path>,
) -> Result<i32, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let model = export::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let mut opts = RenderOptions {
        show_counts: counts,
        labels: if compact { LabelMode::Compact } else { LabelMode::Full },
        ..Default::default()
    };
    for h in highlight {
        let (key, color) = h
            .rsplit_once('=')
            .ok_or_else(|| usage(format!("--highlight `{h}`: expected <stateKey>=<color>")))?;
        let color: Color = color.parse().map_err(usage)?;
        opts.highlight.insert(key.to_owned(), color);
    }
    emit(out, &render(&model, format, &opts))?;
    Ok(EXIT_OK)
}

fn gen(scenario: &str, seed: u64, events: usize, bug: Option<String>, priority: bool, out: &Path) -> Result<i32, Failure> {
    let scenario: Scenario = scenario.parse().map_err(usage)?;
    let cfg = ScenarioConfig {
        scenario,
        seed,
        events,
        bug,
        priority,
    };
    let g = generators::write_pack(&cfg, out).map_err(|e| match e {
        generators::GenError::Io(_) => runtime(e),
        _ => usage(e),
    })?;
    log::info!("{scenario}: {} state writes into {}", g.writes, out.display());
    Ok(EXIT_OK)
}
