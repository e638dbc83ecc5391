mod report;

use std::io::{Read, Write};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use toric_gkz::io::FanDocument;
use toric_gkz::Error;

use report::Outcome;

#[derive(Parser)]
#[command(name = "toric-gkz", version, about = "Toric stacks, orbifold cohomology and GKZ systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Fan document, or `-` for stdin.
    file: String,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct Flags {
    /// Series truncation order in χ.
    #[arg(long, default_value_t = 3)]
    order: u32,
    /// JSON file with `p_basis` and/or `q_basis` overrides.
    #[arg(long)]
    basis_file: Option<String>,
    /// Include LP and Gröbner witnesses.
    #[arg(long)]
    emit_certificates: bool,
    /// Include wall-clock timing (makes output nondeterministic).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct PairArgs {
    /// Orbifold fan document.
    #[arg(long)]
    fan: String,
    /// Resolution fan document.
    #[arg(long)]
    resolution: String,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Check that the fan is simplicial, complete and primitive.
    Validate(Common),
    /// Box elements, Gen and the sector table.
    Box(Common),
    /// Orbifold cohomology presentation.
    Cohomology(Common),
    /// Relations, Kähler cones and the chosen basis.
    Picard(Common),
    /// GKZ operators, residue algebra and symbol fiber.
    Gkz(Common),
    /// Truncated I-function.
    Ifunction(Common),
    /// Mirror map read off the I-function.
    MirrorMap(Common),
    /// Laurent superpotential.
    Superpotential(Common),
    /// Full invariant suite.
    All(Common),
    /// Crepancy of a simplicial resolution.
    Crepant(PairArgs),
    /// Global moduli fan of a crepant pair.
    GlobalModuli(PairArgs),
}

enum Failure {
    Core(Error),
    Io(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

fn read_source(path: &str) -> anyhow::Result<Vec<u8>> {
    if path == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf).context("reading stdin")?;
        Ok(buf)
    } else {
        std::fs::read(path).with_context(|| format!("reading {path}"))
    }
}

fn parse_doc(bytes: &[u8]) -> Result<FanDocument, Failure> {
    let text = std::str::from_utf8(bytes).context("input is not UTF-8")?;
    Ok(FanDocument::parse(text)?)
}

struct Overrides {
    p_basis: Option<Vec<Vec<i64>>>,
    q_basis: Option<Vec<Vec<i64>>>,
}

fn read_overrides(flags: &Flags, hasher: &mut Sha256) -> Result<Option<Overrides>, Failure> {
    let Some(path) = &flags.basis_file else { return Ok(None) };
    let bytes = read_source(path)?;
    hasher.update(&bytes);
    let v: Value = serde_json::from_slice(&bytes).map_err(|e| Error::Schema {
        pointer: String::new(),
        message: format!("malformed basis file: {e}"),
    })?;
    let obj = v.as_object().ok_or_else(|| Error::Schema { pointer: String::new(), message: "expected an object".into() })?;
    if let Some(k) = obj.keys().find(|k| *k != "p_basis" && *k != "q_basis") {
        return Err(Error::Schema { pointer: format!("/{k}"), message: "unknown field".into() }.into());
    }
    let matrix = |key: &str| -> Result<Option<Vec<Vec<i64>>>, Failure> {
        obj.get(key)
            .map(|m| {
                serde_json::from_value(m.clone()).map_err(|e| {
                    Failure::Core(Error::Schema { pointer: format!("/{key}"), message: e.to_string() })
                })
            })
            .transpose()
    };
    Ok(Some(Overrides { p_basis: matrix("p_basis")?, q_basis: matrix("q_basis")? }))
}

fn apply_overrides(doc: &mut FanDocument, o: &Option<Overrides>) {
    if let Some(o) = o {
        if o.p_basis.is_some() {
            doc.p_basis.clone_from(&o.p_basis);
        }
        if o.q_basis.is_some() {
            doc.q_basis.clone_from(&o.q_basis);
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate(_) => "validate",
        Command::Box(_) => "box",
        Command::Cohomology(_) => "cohomology",
        Command::Picard(_) => "picard",
        Command::Gkz(_) => "gkz",
        Command::Ifunction(_) => "ifunction",
        Command::MirrorMap(_) => "mirror-map",
        Command::Superpotential(_) => "superpotential",
        Command::All(_) => "all",
        Command::Crepant(_) => "crepant",
        Command::GlobalModuli(_) => "global-moduli",
    }
}

fn run(cli: &Cli) -> Result<(Value, i32), Failure> {
    let start = Instant::now();
    let mut hasher = Sha256::new();
    let (outcome, flags) = match &cli.command {
        Command::Crepant(args) | Command::GlobalModuli(args) => {
            let xb = read_source(&args.fan)?;
            let zb = read_source(&args.resolution)?;
            hasher.update(&xb);
            hasher.update(&zb);
            let overrides = read_overrides(&args.flags, &mut hasher)?;
            let mut x = parse_doc(&xb)?;
            let z = parse_doc(&zb)?;
            apply_overrides(&mut x, &overrides);
            let out = match &cli.command {
                Command::Crepant(_) => report::crepant(&x, &z)?,
                _ => report::global_moduli(&x, &z)?,
            };
            (out, &args.flags)
        }
        Command::Validate(c)
        | Command::Box(c)
        | Command::Cohomology(c)
        | Command::Picard(c)
        | Command::Gkz(c)
        | Command::Ifunction(c)
        | Command::MirrorMap(c)
        | Command::Superpotential(c)
        | Command::All(c) => {
            let bytes = read_source(&c.file)?;
            hasher.update(&bytes);
            let overrides = read_overrides(&c.flags, &mut hasher)?;
            let mut doc = parse_doc(&bytes)?;
            apply_overrides(&mut doc, &overrides);
            let order = c.flags.order;
            let out: Outcome = match &cli.command {
                Command::Validate(_) => report::validate(&doc)?,
                Command::Box(_) => report::box_elements(&doc)?,
                Command::Cohomology(_) => report::cohomology(&doc)?,
                Command::Picard(_) => report::picard(&doc)?,
                Command::Gkz(_) => report::gkz(&doc)?,
                Command::Ifunction(_) => report::ifunction(&doc, order)?,
                Command::MirrorMap(_) => report::mirror(&doc, order)?,
                Command::Superpotential(_) => report::superpotential_cmd(&doc)?,
                _ => report::all(&doc, order)?,
            };
            (out, &c.flags)
        }
    };
    let name = command_name(&cli.command);
    let mut envelope = Map::new();
    envelope.insert("command".into(), json!(name));
    envelope.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    envelope.insert("input_digest".into(), json!(hex::encode(hasher.finalize())));
    envelope.insert("results".into(), outcome.results);
    envelope.insert("passed".into(), json!(outcome.passed));
    if flags.emit_certificates {
        envelope.insert("certificates".into(), outcome.certificates);
    }
    if flags.timing {
        envelope.insert("timing".into(), json!({"seconds": start.elapsed().as_secs_f64()}));
    }
    let code = match (outcome.passed, name) {
        (true, _) => 0,
        (false, "validate") => 1,
        (false, _) => 2,
    };
    Ok((Value::Object(envelope), code))
}

fn error_json(f: &Failure) -> (Value, i32) {
    match f {
        Failure::Core(e) => {
            let kind = format!("{e:?}");
            let kind = kind.split([' ', '(', '{']).next().unwrap_or("Error").to_string();
            let mut body = json!({"kind": kind, "message": e.to_string()});
            if let Error::Schema { pointer, .. } = e {
                body["pointer"] = json!(pointer);
            }
            (json!({"error": body}), e.exit_code())
        }
        Failure::Io(e) => (json!({"error": {"kind": "Io", "message": format!("{e:#}")}}), 1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, code)) => {
            let text = serde_json::to_string_pretty(&report).expect("serializable report");
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::from(code as u8)
        }
        Err(f) => {
            let (body, code) = error_json(&f);
            eprintln!("{}", serde_json::to_string_pretty(&body).expect("serializable error"));
            ExitCode::from(code as u8)
        }
    }
}
