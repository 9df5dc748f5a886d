//! `sineseries`: tables and plot scripts for the sine series S_p(t).
//!
//! Exit codes: 0 success, 2 usage, 3 numerical budget, 4 internal invariant violation.

mod commands;
mod table;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use commands::{Command, RunError};
use table::{Format, Table};

#[derive(Debug, Parser)]
#[command(name = "sineseries", version, about = "Certified evaluation and analysis of S_p(t) = sum_n sin(t n^-p)")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Output file; the table goes to standard output when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; inferred from the file extension when omitted
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Re-read a CSV written by this tool and recompute a 1% subset of its rows
    #[arg(long, value_name = "CSV")]
    verify: Option<PathBuf>,
}

const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

fn error_record(kind: &str, message: &str, code: u8) -> ExitCode {
    let rec = json!({"error": {"kind": kind, "message": message, "exit_code": code}});
    eprintln!("{rec}");
    ExitCode::from(code)
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("SINESERIES_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| format!("SINESERIES_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("SINESERIES_THREADS must be a positive integer, got 0".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn write_table(table: &Table, out: Option<&PathBuf>, format: Option<Format>) -> io::Result<()> {
    let format = format.or_else(|| out.map(|p| Format::from_path(p))).unwrap_or(Format::Csv);
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match format {
        Format::Csv => table::write_csv(table, &mut sink).map_err(io::Error::other)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &table::to_json(table)).map_err(io::Error::other)?;
            writeln!(sink)?;
        }
        Format::Plotscript => table::write_plotscript(table, &mut sink)?,
    }
    sink.flush()
}

fn summary_line(table: &Table) -> String {
    let mut parts = vec![table.command[0].clone()];
    for (k, v) in &table.summary {
        if !v.is_array() {
            parts.push(format!("{k}={v}"));
        }
    }
    if table.partial {
        parts.push("partial=true".into());
    }
    parts.join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return error_record("usage", &e.kind().to_string(), EXIT_USAGE);
        }
    };
    if let Err(msg) = configure_threads() {
        return error_record("usage", &msg, EXIT_USAGE);
    }
    if let Some(path) = &cli.verify {
        if cli.command.is_some() {
            return error_record("usage", "--verify takes no subcommand", EXIT_USAGE);
        }
        return match verify::verify(path) {
            Ok(report) => {
                println!("{report}");
                ExitCode::SUCCESS
            }
            Err(verify::VerifyError::Usage(m)) => error_record("usage", &m, EXIT_USAGE),
            Err(verify::VerifyError::Mismatch(m)) => error_record("invariant", &m, EXIT_INVARIANT),
        };
    }
    let Some(command) = cli.command else {
        return error_record("usage", "a subcommand or --verify is required", EXIT_USAGE);
    };
    let outcome = std::panic::catch_unwind(|| command.run());
    let (table, failure) = match outcome {
        Ok(Ok(t)) => (t, None),
        Ok(Err(RunError::Usage(m))) => return error_record("usage", &m, EXIT_USAGE),
        Ok(Err(RunError::Numerical(e))) => return error_record("budget", &e.to_string(), EXIT_BUDGET),
        Ok(Err(RunError::Partial(t, e))) => (*t, Some(e)),
        Err(_) => return error_record("invariant", "internal panic", EXIT_INVARIANT),
    };
    if let Err(e) = write_table(&table, cli.out.as_ref(), cli.format) {
        return error_record("io", &e.to_string(), EXIT_USAGE);
    }
    if cli.out.is_some() {
        println!("{}", summary_line(&table));
    } else {
        eprintln!("{}", summary_line(&table));
    }
    match failure {
        Some(e) => error_record("budget", &e.to_string(), EXIT_BUDGET),
        None => ExitCode::SUCCESS,
    }
}
