use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, ValueEnum};
use logmoduli::document::{parse_characters, parse_document};
use logmoduli::report::{run, to_table, Command, Options};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Validate,
    Decorate,
    Tropical,
    Group,
    Ob,
    Dims,
    Positivity,
    Rt,
    Report,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Validate => Command::Validate,
            Cmd::Decorate => Command::Decorate,
            Cmd::Tropical => Command::Tropical,
            Cmd::Group => Command::Group,
            Cmd::Ob => Command::Ob,
            Cmd::Dims => Command::Dims,
            Cmd::Positivity => Command::Positivity,
            Cmd::Rt => Command::Rt,
            Cmd::Report => Command::Report,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

/// Obstruction groups, tropical feasibility, dimensions, positivity and
/// reductions for decorated dual graphs given as JSON documents.
#[derive(Parser, Debug)]
#[command(name = "logmoduli", version)]
struct Cli {
    command: Cmd,
    /// Graph documents. Names not found on disk are looked up in
    /// $LOGMODULI_FIXTURES.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Character rows, as {"characters": [...]} or a bare array.
    #[arg(long)]
    characters: Option<PathBuf>,
    /// Entry bound for enumerating decoration families.
    #[arg(long)]
    bound: Option<i64>,
    /// Exit 1 unless every character value of ob is 1.
    #[arg(long)]
    expect_trivial: bool,
    /// Worker threads across input files.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

/// 0 computed, 1 invariant violated, 2 input error.
enum Status {
    Done(Value),
    Violation(Value),
    InputError(String),
}

impl Status {
    fn code(&self) -> u8 {
        match self {
            Status::Done(_) => 0,
            Status::Violation(_) => 1,
            Status::InputError(_) => 2,
        }
    }
}

fn resolve(p: &Path) -> PathBuf {
    if p.exists() {
        return p.to_path_buf();
    }
    match std::env::var_os("LOGMODULI_FIXTURES") {
        Some(dir) if p.is_relative() => Path::new(&dir).join(p),
        _ => p.to_path_buf(),
    }
}

fn read(p: &Path) -> Result<String, String> {
    let q = resolve(p);
    std::fs::read_to_string(&q).map_err(|e| format!("{}: {e}", q.display()))
}

fn analyse(cmd: Command, path: &Path, opts: &Options) -> Status {
    let text = match read(path) {
        Ok(t) => t,
        Err(e) => return Status::InputError(e),
    };
    let doc = match parse_document(&text) {
        Ok(d) => d,
        Err(e) => return Status::InputError(e.to_string()),
    };
    match run(cmd, &doc, opts) {
        Ok(o) if o.violation => Status::Violation(o.report),
        Ok(o) => Status::Done(o.report),
        Err(e @ logmoduli::Error::Internal(_)) => Status::Violation(json!({ "error": e.to_string() })),
        Err(e) => Status::InputError(e.to_string()),
    }
}

fn analyse_all(cmd: Command, inputs: &[PathBuf], opts: &Options, jobs: usize) -> Vec<Status> {
    let slots: Vec<Mutex<Option<Status>>> = inputs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, inputs.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= inputs.len() {
                    break;
                }
                *slots[i].lock().unwrap() = Some(analyse(cmd, &inputs[i], opts));
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().unwrap().unwrap()).collect()
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(v).unwrap()),
        Format::Table => to_table(v),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut opts = Options {
        characters: None,
        bound: cli.bound,
        expect_trivial: cli.expect_trivial,
    };
    if let Some(p) = &cli.characters {
        match read(p).and_then(|t| parse_characters(&t).map_err(|e| e.to_string())) {
            Ok(c) => opts.characters = Some(c),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    let results = analyse_all(cli.command.into(), &cli.inputs, &opts, cli.jobs);
    let code = results.iter().map(Status::code).max().unwrap_or(0);

    if let [only] = results.as_slice() {
        match only {
            Status::Done(v) | Status::Violation(v) => print!("{}", render(v, cli.format)),
            Status::InputError(e) => eprintln!("error: {e}"),
        }
        return ExitCode::from(code);
    }
    let entries: Vec<Value> = cli
        .inputs
        .iter()
        .zip(&results)
        .map(|(p, r)| {
            let input = p.display().to_string();
            match r {
                Status::Done(v) | Status::Violation(v) => json!({ "input": input, "report": v }),
                Status::InputError(e) => {
                    eprintln!("error: {input}: {e}");
                    json!({ "input": input, "error": e })
                }
            }
        })
        .collect();
    print!("{}", render(&Value::Array(entries), cli.format));
    ExitCode::from(code)
}
