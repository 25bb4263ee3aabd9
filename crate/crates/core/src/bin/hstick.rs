use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hstick::fields::{MultiQuadField, PlaceSet};
use hstick::ideals::{AnnConfig, DEFAULT_PRIME_BOUND, DEFAULT_WINDOW, DEFAULT_Y_BOUND};
use hstick::props::{DEFAULT_CASES, DEFAULT_SEED};
use hstick::report::{self, Battery, EmitFormat, RunConfig, OUT_DIR_ENV};
use hstick::{Error, Result};

#[derive(Parser)]
#[command(
    name = "hstick",
    version,
    about = "Higher Stickelberger ideals of multi-quadratic fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one field and write a JSON report.
    Analyze {
        /// Squarefree generators, e.g. "2,5".
        #[arg(long)]
        field: String,
        /// Finite primes of S; missing ramified primes are added with a warning.
        #[arg(long, default_value = "")]
        s: String,
        #[arg(long, default_value_t = DEFAULT_PRIME_BOUND)]
        prime_bound: u64,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
        #[arg(long, default_value_t = DEFAULT_Y_BOUND)]
        y_bound: u64,
        /// Record per-stage wall times (makes the report nondeterministic).
        #[arg(long)]
        timing: bool,
        /// Also write the per-character CSV table to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every check over a battery of fields plus the property suites.
    Verify {
        /// TOML file with `prime_bound`, `window` and `[[case]] field = [..] s = [..]` tables.
        #[arg(long)]
        battery: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CASES)]
        cases: usize,
        #[arg(long, default_value_t = DEFAULT_Y_BOUND)]
        y_bound: u64,
        /// Write the full JSON summary here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate E = Q(sqrt 2, sqrt r) for r a product of primes = -1 mod 8, or twice one.
    Search {
        #[arg(long)]
        r_max: u64,
        #[arg(long, default_value_t = DEFAULT_Y_BOUND)]
        y_bound: u64,
        /// Extra finite primes for S; primes = 1 mod 4 are flagged in each row.
        #[arg(long, default_value = "")]
        extra_s: String,
        #[arg(long, default_value_t = DEFAULT_PRIME_BOUND)]
        prime_bound: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-serialize a JSON report.
    ///
    /// CSV columns: chi (character bitmask), d (squarefree d of E_chi, 1 for chi_0), disc,
    /// raw_l = L(-1,chi), adjusted_l = L^S(-1,chi), w2_minus, k2 = k2^S(E_chi), k2_minus,
    /// stick_s_diagonal (entry of Stick S at chi).
    Emit {
        /// Report produced by `analyze`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Markdown,
}

fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            std::fs::write(resolve(p), text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_primes(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::BadSpec(s.to_string())))
        .collect()
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Analyze {
            field,
            s,
            prime_bound,
            window,
            y_bound,
            timing,
            csv,
            out,
        } => {
            let field = MultiQuadField::parse(&field)?;
            let s = PlaceSet::parse(&s)?;
            let cfg = RunConfig {
                ann: AnnConfig {
                    prime_bound,
                    window,
                },
                y_bound,
                timing,
            };
            let r = report::analyze(&field, &s, cfg)?;
            for w in &r.header.warnings {
                eprintln!("warning: {w}");
            }
            write_out(out.as_deref(), &report::emit(&r, EmitFormat::Json)?)?;
            if let Some(p) = csv {
                write_out(Some(&p), &report::emit(&r, EmitFormat::Csv)?)?;
            }
            Ok(r.exit_code())
        }
        Command::Verify {
            battery,
            seed,
            cases,
            y_bound,
            out,
        } => {
            let battery = match battery {
                Some(p) => {
                    let text = std::fs::read_to_string(&p)
                        .map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
                    Battery::from_toml(&text)?
                }
                None => Battery::default_battery(),
            };
            let v = report::verify(&battery, seed, cases, y_bound)?;
            print!("{}", v.table());
            if let Some(p) = out {
                write_out(Some(&p), &report::to_json(&v)?)?;
            }
            Ok(v.exit_code())
        }
        Command::Search {
            r_max,
            y_bound,
            extra_s,
            prime_bound,
            out,
        } => {
            let ann = AnnConfig {
                prime_bound,
                window: DEFAULT_WINDOW,
            };
            let rows = report::search(r_max, y_bound, &parse_primes(&extra_s)?, ann)?;
            for row in rows.iter().filter(|r| !r.s_policy_violations.is_empty()) {
                eprintln!(
                    "warning: r = {} has S primes = 1 mod 4: {:?}",
                    row.r, row.s_policy_violations
                );
            }
            write_out(out.as_deref(), &report::to_json(&rows)?)?;
            let verdicts: Vec<_> = rows.iter().flat_map(|r| r.verdicts.clone()).collect();
            Ok(report::exit_code(&verdicts))
        }
        Command::Emit { input, format, out } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
            let r = report::parse_report(&text)?;
            let format = match format {
                Format::Json => EmitFormat::Json,
                Format::Csv => EmitFormat::Csv,
                Format::Markdown => EmitFormat::Markdown,
            };
            write_out(out.as_deref(), &report::emit(&r, format)?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
