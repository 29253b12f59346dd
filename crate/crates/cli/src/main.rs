use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use schur_core::oracle::{self, OracleChoice};
use schur_core::schur::{self, SchurContext};
use schur_core::{parse, Element, Flavor, ParseError, Rules};

#[derive(Parser)]
#[command(name = "schur", version, about = "Exact computation in the Schur algebra S(2,d)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Fhe,
    Ehf,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Flavor {
        match f {
            FlavorArg::Fhe => Flavor::Fhe,
            FlavorArg::Ehf => Flavor::Ehf,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    /// divided powers and binomials
    Kostant,
    /// plain powers of the generators and the Cartan variable
    Power,
    /// plain powers with h in the middle
    Hbasis,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Tensor,
    Weight,
    Both,
}

impl From<OracleArg> for OracleChoice {
    fn from(o: OracleArg) -> OracleChoice {
        match o {
            OracleArg::Tensor => OracleChoice::Tensor,
            OracleArg::Weight => OracleChoice::Weight,
            OracleArg::Both => OracleChoice::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print an expression in normal form in B_d
    Normalize {
        #[arg(long)]
        d: u32,
        #[arg(long, value_enum, default_value = "fhe")]
        flavor: FlavorArg,
        #[arg(long, value_enum, default_value = "kostant")]
        basis: BasisArg,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Write the structure constants of B_d
    Table {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long, value_enum, default_value = "fhe")]
        flavor: FlavorArg,
    },
    /// Check relations, products and minimal polynomials against matrix representations
    Verify {
        #[arg(long)]
        d: u32,
        #[arg(long, value_enum, default_value = "both")]
        oracle: OracleArg,
        /// Also write the report as JSON; `-` prints JSON instead of text
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, hide = true)]
        inject_sign_error: bool,
    },
    /// Print binom(d+3, 3)
    Dim {
        #[arg(long)]
        d: u32,
    },
    /// Print the minimal polynomial of an expression acting on B_d
    Minpoly {
        #[arg(long)]
        d: u32,
        #[arg(long, value_enum, default_value = "fhe")]
        flavor: FlavorArg,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// List the truncated Kostant basis
    Basis {
        #[arg(long)]
        d: u32,
        #[arg(long, value_enum, default_value = "fhe")]
        flavor: FlavorArg,
    },
}

enum Failure {
    Parse(String, ParseError),
    Io(String),
    Checks,
}

impl Failure {
    fn exit_code(&self) -> ExitCode {
        match self {
            Failure::Parse(..) => ExitCode::from(2),
            Failure::Io(_) | Failure::Checks => ExitCode::from(1),
        }
    }
}

fn lower(input: &str, ctx: &SchurContext) -> Result<Element, Failure> {
    let e = parse(input).map_err(|err| Failure::Parse(input.to_string(), err))?;
    Ok(schur::normalize(&e.lower(ctx.flavor, ctx.mode()), ctx))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: Cli, out: &mut impl Write) -> Result<(), Failure> {
    let io_err = |e: io::Error| Failure::Io(e.to_string());
    match cli.command {
        Command::Normalize { d, flavor, basis, expr } => {
            let ctx = SchurContext::new(d, flavor.into());
            let x = lower(&expr, &ctx)?;
            let text = match basis {
                BasisArg::Kostant => x.to_string(),
                BasisArg::Power => schur::to_power_basis(&x, &ctx).to_string(),
                BasisArg::Hbasis => schur::to_h_basis(&x, &ctx).to_string(),
            };
            writeln!(out, "{text}").map_err(io_err)
        }
        Command::Table { d, out: path, format, flavor } => {
            let table = schur::structure_constants(&SchurContext::new(d, flavor.into()));
            let body = match format {
                FormatArg::Json => table.to_json(),
                FormatArg::Csv => table.to_csv(),
            };
            write_file(&path, &body)?;
            writeln!(out, "wrote {} products over {} basis elements to {}", table.len() * table.len(), table.len(), path.display())
                .map_err(io_err)
        }
        Command::Verify { d, oracle: choice, json, inject_sign_error } => {
            let rules = if inject_sign_error { Rules::faulty_commutator() } else { Rules::default() };
            let report = oracle::verify_suite_with(d, choice.into(), rules);
            match json.as_deref() {
                Some(p) if p.as_os_str() == "-" => writeln!(out, "{}", report.to_json()).map_err(io_err)?,
                Some(p) => {
                    write!(out, "{report}").map_err(io_err)?;
                    write_file(p, &report.to_json())?;
                }
                None => write!(out, "{report}").map_err(io_err)?,
            }
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        Command::Dim { d } => writeln!(out, "{}", schur::dimension(d)).map_err(io_err),
        Command::Minpoly { d, flavor, expr } => {
            let ctx = SchurContext::new(d, flavor.into());
            let x = lower(&expr, &ctx)?;
            writeln!(out, "{}", schur::min_poly(&x, &ctx)).map_err(io_err)
        }
        Command::Basis { d, flavor } => {
            let ctx = SchurContext::new(d, flavor.into());
            for m in schur::basis(&ctx) {
                let text = m.render(ctx.flavor);
                writeln!(out, "{}", if text.is_empty() { "1" } else { &text }).map_err(io_err)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Parse(input, err) => {
                    eprintln!("error: {err}");
                    eprintln!("  {input}");
                    eprintln!("  {}^", " ".repeat(input[..err.offset].chars().count()));
                }
                Failure::Io(msg) => eprintln!("error: {msg}"),
                Failure::Checks => eprintln!("verification failed"),
            }
            failure.exit_code()
        }
    }
}
