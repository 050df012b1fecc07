//! `phylab`: BER sweeps, union bounds, EVM and plotting from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use phylab::fec_conv::{
    default_d_max, distance_spectrum, free_distance, parse_octal_list, punctured_bound_ber,
    PuncturePattern, Trellis,
};
use phylab::harness::{
    emit, parse_range, parse_symbol_grid, read_csv, render_svg, run_sweep_with_threads,
    threads_from_env, ChainKind, ConfigFile, Format, XAxis,
};
use phylab::metrics::evm;

#[derive(Parser)]
#[command(name = "phylab", version, about = "Physical-layer link simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Plotdata,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Ebn0,
    Snr,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo BER sweep of a chain described by a JSON config.
    Sweep {
        #[arg(long)]
        chain: String,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        /// Worker threads (defaults to PHYLAB_THREADS, then all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Union bound on the BER of a (punctured) convolutional code with soft
    /// decisions over BPSK/AWGN.
    Bound {
        #[arg(long, default_value_t = 7)]
        k: u32,
        #[arg(long, default_value = "133,171")]
        gens: String,
        #[arg(long)]
        puncture: Option<String>,
        /// Expected code rate `b/(b+1)`; checked against the mask.
        #[arg(long)]
        rate: Option<String>,
        /// Eb/N0 points as start:step:stop in dB.
        #[arg(long)]
        ebn0: String,
        #[arg(long)]
        d_max: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error vector magnitude of received symbols against a reference.
    Evm {
        #[arg(long)]
        received: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long, default_value_t = -19.0, allow_hyphen_values = true)]
        limit_db: f64,
    },
    /// Plot a CSV of records as SVG (`.svg` output) or plotdata.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "ebn0")]
        x: AxisArg,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<phylab::Error> for Failure {
    fn from(e: phylab::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Sweep {
            chain,
            config,
            out,
            format,
            threads,
        } => {
            let kind: ChainKind = chain
                .parse()
                .map_err(|e: phylab::Error| Failure::Usage(e.to_string()))?;
            let text = fs::read_to_string(&config)
                .map_err(|e| Failure::Runtime(format!("{}: {e}", config.display())))?;
            let cfg = ConfigFile::from_json(&text)?;
            if cfg.chain.chain != kind {
                return Err(Failure::Usage(format!(
                    "--chain {kind} does not match the config's chain {}",
                    cfg.chain.chain
                )));
            }
            let sweep = cfg.effective_sweep()?;
            let records =
                run_sweep_with_threads(&cfg.chain, &sweep, threads.or_else(threads_from_env))?;
            let format = match format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
                FormatArg::Plotdata => Format::Plotdata,
            };
            emit(&records, format, &out)?;
        }
        Command::Bound {
            k,
            gens,
            puncture,
            rate,
            ebn0,
            d_max,
            out,
        } => {
            let trellis = Trellis::new(k, &parse_octal_list(&gens)?)?;
            let pattern = match &puncture {
                Some(m) => PuncturePattern::from_text(m)?,
                None => PuncturePattern::identity(trellis.outputs()),
            };
            let (num, den) = pattern.rate(trellis.outputs())?;
            if let Some(r) = rate {
                if r != format!("{num}/{den}") {
                    return Err(Failure::Usage(format!(
                        "--rate {r} does not match the code rate {num}/{den}"
                    )));
                }
            }
            let points = parse_range(&ebn0).map_err(|e| Failure::Usage(e.to_string()))?;
            let d_max = match d_max {
                Some(d) => d,
                None => default_d_max(free_distance(&trellis, &pattern)?),
            };
            let spectrum = distance_spectrum(&trellis, &pattern, d_max)?;
            let mut text = String::from("ebn0_db,ber_bound\n");
            for x in points {
                text.push_str(&format!(
                    "{x},{:e}\n",
                    punctured_bound_ber(num, den, &spectrum, x)?
                ));
            }
            write_out(out, &text)?;
        }
        Command::Evm {
            received,
            reference,
            limit_db,
        } => {
            let read = |p: &PathBuf| {
                fs::read_to_string(p).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display())))
            };
            let r = parse_symbol_grid(&read(&received)?)?;
            let s = parse_symbol_grid(&read(&reference)?)?;
            let report = evm(&r, &s, limit_db)?;
            println!(
                "evm_ratio {}\nevm_db {}\nlimit_db {}\ncompliant {}",
                report.evm_ratio,
                report.db_text(),
                report.limit_db,
                report.compliant
            );
        }
        Command::Plot { input, out, x } => {
            let records = read_csv(&input)?;
            if records.is_empty() {
                return Err(Failure::Runtime(format!(
                    "{} holds no records",
                    input.display()
                )));
            }
            let axis = match x {
                AxisArg::Ebn0 => XAxis::Ebn0Db,
                AxisArg::Snr => XAxis::SnrDb,
            };
            if out.extension().is_some_and(|e| e == "svg") {
                fs::write(&out, render_svg(&records, axis)?)?;
            } else {
                emit(&records, Format::Plotdata, &out)?;
            }
        }
    }
    Ok(())
}

fn write_out(out: Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}
