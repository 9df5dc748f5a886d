//! `--verify`: re-read a CSV written by this tool and recompute part of it.

use std::path::Path;

use clap::Parser;

use crate::commands::Command;
use crate::table::Cell;

pub enum VerifyError {
    Usage(String),
    Mismatch(String),
}

#[derive(Parser)]
#[command(name = "sineseries", no_binary_name = true)]
struct Replay {
    #[command(subcommand)]
    command: Command,
}

/// One row in a hundred, plus the last row. The subset is a fixed function
/// of the row count so that reruns check the same rows.
pub fn subset(rows: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..rows).step_by(100).collect();
    if rows > 0 && idx.last() != Some(&(rows - 1)) {
        idx.push(rows - 1);
    }
    idx
}

fn parse_metadata(line: &str) -> Result<Vec<String>, VerifyError> {
    let body = line
        .strip_prefix("# sineseries ")
        .ok_or_else(|| VerifyError::Usage("first line is not a sineseries metadata line".into()))?;
    let args = body.split(" | ").next().unwrap_or("");
    Ok(args.split_whitespace().map(str::to_string).collect())
}

fn agree(stored: &str, fresh: &Cell, bound: f64) -> bool {
    match fresh {
        Cell::F(x) => match stored.parse::<f64>() {
            Ok(s) => s == *x || (s - x).abs() <= bound.max(4.0 * f64::EPSILON * s.abs().max(x.abs())),
            Err(_) => false,
        },
        Cell::Empty => stored.is_empty(),
        other => stored == other.text(),
    }
}

pub fn verify(path: &Path) -> Result<String, VerifyError> {
    let text = std::fs::read_to_string(path).map_err(|e| VerifyError::Usage(format!("{}: {e}", path.display())))?;
    let (first, rest) = text.split_once('\n').ok_or_else(|| VerifyError::Usage("file has no body".into()))?;
    let words = parse_metadata(first)?;
    let command = Replay::try_parse_from(&words).map_err(|e| VerifyError::Usage(format!("metadata does not parse: {e}")))?.command;

    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(rest.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| VerifyError::Usage(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let rows: Vec<Vec<String>> = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<Result<_, _>>()
        .map_err(|e| VerifyError::Usage(e.to_string()))?;
    let bound_col = header.iter().position(|h| h == "error_bound");

    let fresh_rows: Vec<(usize, Vec<Cell>)> = match command.inputs().map_err(|_| VerifyError::Usage("metadata describes an invalid grid".into()))? {
        Some(inputs) => {
            if inputs.len() < rows.len() {
                return Err(VerifyError::Mismatch(format!("{} rows on disk but the grid has {}", rows.len(), inputs.len())));
            }
            let mut out = Vec::new();
            for i in subset(rows.len()) {
                let row = command.row(inputs[i]).map_err(|e| VerifyError::Mismatch(format!("row {i} no longer computes: {e}")))?;
                out.push((i, row));
            }
            out
        }
        None => {
            let (all, _) = command.whole().map_err(|e| VerifyError::Mismatch(format!("table no longer computes: {e}")))?;
            if all.len() != rows.len() {
                return Err(VerifyError::Mismatch(format!("{} rows on disk, {} recomputed", rows.len(), all.len())));
            }
            subset(rows.len()).into_iter().map(|i| (i, all[i].clone())).collect()
        }
    };
    for (i, fresh) in &fresh_rows {
        let stored = &rows[*i];
        if stored.len() != fresh.len() {
            return Err(VerifyError::Mismatch(format!("row {i} has {} fields, expected {}", stored.len(), fresh.len())));
        }
        let bound = bound_col.and_then(|c| stored[c].parse::<f64>().ok()).unwrap_or(0.0);
        for (k, (s, f)) in stored.iter().zip(fresh).enumerate() {
            if !agree(s, f, bound) {
                return Err(VerifyError::Mismatch(format!("row {i}, column {}: stored {s}, recomputed {}", header[k], f.text())));
            }
        }
    }
    Ok(format!("verify {}: {} of {} rows recomputed, all agree", command.name(), fresh_rows.len(), rows.len()))
}
