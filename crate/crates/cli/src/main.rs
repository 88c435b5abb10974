use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use tate::beilinson::{beilinson_monad, direct_image_complex, verify_monad, SModuleComplex};
use tate::cohomology::{cohomology_matrix, euler_polynomial_table, CohomologyTable};
use tate::complex::LabeledFreeComplex;
use tate::json::{to_string_pretty, CohomologyJson, ComplexJson, ModuleJson, MonadJson};
use tate::tate::{corner_complex, corner_exactness, strand, tate_resolution_with, TateOptions, TateScope};
use tate::{Error, Multidegree, PresentedModule, PrimeField};

#[derive(Parser, Debug)]
#[command(name = "tate", version, about = "Tate resolutions, cohomology tables and Beilinson monads")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Module as a JSON file path, or inline JSON starting with `{`.
    #[arg(long, global = true)]
    module: Option<String>,

    /// Twist applied to the module before computing, e.g. `-3,0`.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_degree)]
    twist: Option<Multidegree>,

    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_degree)]
    low: Option<Multidegree>,

    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_degree)]
    high: Option<Multidegree>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Field characteristic; overrides the module file and TATE_PRIME.
    #[arg(long, global = true)]
    prime: Option<u32>,

    /// Worker threads for degreewise linear algebra.
    #[arg(long, global = true)]
    parallel: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Window of the Tate resolution with labels between --low and --high.
    Tate {
        /// Corner degree to use instead of the regularity search.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_degree)]
        corner: Option<Multidegree>,
        /// Keep only labels inside the box instead of the full index range.
        #[arg(long)]
        boxed: bool,
    },
    /// Euler polynomials of every twist between --low and --high.
    Cohomology,
    /// Cohomology matrix of a sheaf on a product of two factors.
    Matrix,
    /// Beilinson monad of the sheaf.
    Beilinson,
    /// Complex on the retained factors computing the derived pushforward.
    Pushforward {
        /// Retained factor indices, 0-based and comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        factors: Vec<usize>,
    },
    /// Corner complex at the given corner, with an exactness check.
    Corner {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_degree)]
        corner: Multidegree,
    },
    /// Strand of the Tate window through an anchor degree.
    Strand {
        /// Labels on the omitted factors are fixed to these coordinates.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_degree)]
        anchor: Multidegree,
        #[arg(long, value_delimiter = ',', required = true)]
        factors: Vec<usize>,
    },
    /// Checks that the Beilinson monad has homology M in the degrees of a box.
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Matrix,
}

fn parse_degree(s: &str) -> Result<Multidegree, String> {
    s.split(',')
        .map(|x| x.trim().parse::<i32>().map_err(|e| format!("bad degree component {x:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(Multidegree)
}

/// Error carrying its exit status.
struct Failure {
    kind: &'static str,
    message: String,
    code: u8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { kind: e.kind(), message: e.to_string(), code: if e.is_validation() { 2 } else { 3 } }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { kind: "invalid", message: message.into(), code: 2 }
}

fn default_prime() -> Result<u32, Failure> {
    match std::env::var("TATE_PRIME") {
        Ok(v) => v.trim().parse().map_err(|_| invalid(format!("TATE_PRIME={v:?} is not an integer"))),
        Err(_) => Ok(PrimeField::DEFAULT_PRIME),
    }
}

fn load_module(cli: &Cli) -> Result<PresentedModule, Failure> {
    let src = cli.module.as_deref().ok_or_else(|| invalid("--module is required"))?;
    let text = if src.trim_start().starts_with('{') {
        src.to_string()
    } else {
        std::fs::read_to_string(src).map_err(|e| Failure { kind: "io", message: format!("{src}: {e}"), code: 2 })?
    };
    if text.trim().is_empty() {
        return Err(Error::Parse(format!("{src}: empty module description")).into());
    }
    let mut j: ModuleJson = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{src}: {e}")))?;
    if cli.prime.is_some() {
        j.prime = cli.prime;
    }
    let m = j.to_module(default_prime()?)?;
    Ok(match &cli.twist {
        Some(a) => {
            check_len(&m, a, "--twist")?;
            m.twist(a)
        }
        None => m,
    })
}

fn check_len(m: &PresentedModule, d: &Multidegree, flag: &str) -> Result<(), Failure> {
    if d.len() != m.space().factors() {
        return Err(invalid(format!("{flag} {d} needs {} components", m.space().factors())));
    }
    Ok(())
}

fn window(cli: &Cli, m: &PresentedModule) -> Result<(Multidegree, Multidegree), Failure> {
    let low = cli.low.clone().ok_or_else(|| invalid("--low is required"))?;
    let high = cli.high.clone().ok_or_else(|| invalid("--high is required"))?;
    check_len(m, &low, "--low")?;
    check_len(m, &high, "--high")?;
    if !low.le(&high) {
        return Err(invalid(format!("--low {low} is not <= --high {high}")));
    }
    Ok((low, high))
}

fn format(cli: &Cli, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
    let f = cli.format.unwrap_or(default);
    if !allowed.contains(&f) {
        return Err(invalid(format!("format {f:?} is not available for this command").to_lowercase()));
    }
    Ok(f)
}

fn complex_out(c: &LabeledFreeComplex, f: Format) -> String {
    match f {
        Format::Json => to_string_pretty(&ComplexJson::from_complex(c)) + "\n",
        _ => c.to_string(),
    }
}

fn monad_out(b: &SModuleComplex, f: Format) -> String {
    match f {
        Format::Json => to_string_pretty(&MonadJson::from_complex(b)) + "\n",
        _ => b.to_string(),
    }
}

fn table_text(t: &CohomologyTable) -> String {
    t.entries.iter().map(|(a, h)| format!("{a} {h}\n")).collect()
}

fn execute(cli: &Cli) -> Result<String, Failure> {
    let m = load_module(cli)?;
    use Format::*;
    match &cli.command {
        Command::Tate { corner, boxed } => {
            let f = format(cli, Text, &[Text, Json])?;
            let (low, high) = window(cli, &m)?;
            if let Some(c) = corner {
                check_len(&m, c, "--corner")?;
            }
            let scope = if *boxed { TateScope::Box } else { TateScope::Window };
            let opts = TateOptions { scope, corner: corner.clone(), ..Default::default() };
            Ok(complex_out(&tate_resolution_with(&m, &low, &high, &opts)?, f))
        }
        Command::Cohomology | Command::Matrix => {
            let default = if matches!(cli.command, Command::Matrix) { Matrix } else { Text };
            let f = format(cli, default, &[Text, Json, Matrix])?;
            let (low, high) = window(cli, &m)?;
            let table = euler_polynomial_table(&m, &low, &high)?;
            Ok(match f {
                Json => to_string_pretty(&CohomologyJson::from_table(&table)) + "\n",
                Matrix => cohomology_matrix(&table)?,
                Text => table_text(&table),
            })
        }
        Command::Beilinson => Ok(monad_out(&beilinson_monad(&m)?, format(cli, Text, &[Text, Json])?)),
        Command::Pushforward { factors } => {
            let f = format(cli, Text, &[Text, Json])?;
            Ok(monad_out(&direct_image_complex(&m, factors)?, f))
        }
        Command::Corner { corner } => {
            let f = format(cli, Text, &[Text, Json])?;
            let (low, high) = window(cli, &m)?;
            check_len(&m, corner, "--corner")?;
            let c = corner_complex(&m, corner, &low, &high)?;
            if f == Json {
                return Ok(complex_out(&c, f));
            }
            let report = corner_exactness(&c, &low, &high);
            let (l, h) = c.window().cloned().expect("corner complexes record their window");
            Ok(format!(
                "{c}exact on {l}..{h}: {} ({} positions checked)\n",
                report.is_exact(),
                report.checked
            ))
        }
        Command::Strand { anchor, factors } => {
            let f = format(cli, Text, &[Text, Json])?;
            let (low, high) = window(cli, &m)?;
            let t = tate_resolution_with(&m, &low, &high, &TateOptions::default())?;
            Ok(complex_out(&strand(&t, anchor, factors)?, f))
        }
        Command::Verify => {
            let f = format(cli, Text, &[Text, Json])?;
            let b = beilinson_monad(&m)?;
            let low = cli.low.clone().unwrap_or_else(|| b.positivity_threshold());
            let high = cli.high.clone().unwrap_or_else(|| low.plus_constant(2));
            check_len(&m, &low, "--low")?;
            check_len(&m, &high, "--high")?;
            let r = verify_monad(&b, &m, &low, &high);
            if f == Json {
                return Ok(to_string_pretty(&r) + "\n");
            }
            let mut out = format!("monad verified on {low}..{high}: {}\n", r.passed());
            if !r.well_formed {
                out.push_str("differentials do not form a complex of well-defined maps\n");
            }
            for c in r.failures() {
                out.push_str(&format!("  {}: H0 {} vs M {}; other {:?}\n", c.degree, c.h0, c.expected, c.other));
            }
            Ok(out)
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure { kind: "io", message: e.to_string(), code: 3 };
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io),
    }
}

fn report(f: Failure) -> ExitCode {
    eprintln!("{}", json!({ "error": f.kind, "message": f.message }));
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report(Failure { kind: "usage", message: e.to_string(), code: 2 }),
    };
    let run = || execute(&cli).and_then(|text| emit(&cli, &text));
    let result = match cli.parallel {
        Some(0) => Err(invalid("--parallel must be at least 1")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(Failure { kind: "io", message: e.to_string(), code: 3 }),
        },
        None => run(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(f),
    }
}
