//! Tables and their CSV, JSON and gnuplot renderings.

use std::io::Write;

use serde_json::{json, Map, Value};

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    Empty,
}

impl Cell {
    /// Text form used in CSV and plot data: floats with 17 significant digits.
    pub fn text(&self) -> String {
        match self {
            Cell::F(x) => format_f64(*x),
            Cell::I(i) => i.to_string(),
            Cell::S(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(x) if x.is_finite() => json!(x),
            Cell::F(_) | Cell::Empty => Value::Null,
            Cell::I(i) => json!(i),
            Cell::S(s) => json!(s),
        }
    }
}

pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        // keeps -0 and +0 apart only in sign, like every other value
        return if x.is_sign_negative() { "-0.0000000000000000e0".into() } else { "0.0000000000000000e0".into() };
    }
    format!("{x:.16e}")
}

/// How a table is drawn by the plot script.
#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub title: String,
    pub xlabel: &'static str,
    pub ylabel: &'static str,
    /// column indices plotted against column 0
    pub series: Vec<usize>,
    pub style: &'static str,
    pub logy: bool,
}

#[derive(Debug, Clone)]
pub struct Table {
    /// subcommand and arguments that reproduce the body
    pub command: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// set when a numerical budget stopped the run early
    pub partial: bool,
    pub summary: Vec<(&'static str, Value)>,
    pub plot: PlotSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Plotscript,
}

impl Format {
    pub fn from_path(path: &std::path::Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            Some("gp") | Some("plt") | Some("gnuplot") => Format::Plotscript,
            _ => Format::Csv,
        }
    }
}

fn created() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// First line of every CSV and plot script. Everything after ` | ` varies
/// between runs; the rest of the file does not.
pub fn metadata_line(table: &Table) -> String {
    format!("# sineseries {} | partial={} created={}", table.command.join(" "), table.partial, created())
}

pub fn write_csv<W: Write>(table: &Table, out: W) -> csv::Result<()> {
    let mut out = out;
    writeln!(out, "{}", metadata_line(table))?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::text))?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_json(table: &Table) -> Value {
    let mut summary = Map::new();
    for (k, v) in &table.summary {
        summary.insert((*k).to_string(), v.clone());
    }
    json!({
        "meta": {
            "command": table.command,
            "partial": table.partial,
            "created": created(),
        },
        "columns": table.columns,
        "rows": table.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "summary": Value::Object(summary),
    })
}

pub fn write_plotscript<W: Write>(table: &Table, mut out: W) -> std::io::Result<()> {
    let p = &table.plot;
    writeln!(out, "{}", metadata_line(table))?;
    writeln!(out, "# columns: {}", table.columns.join(","))?;
    writeln!(out, "$data << EOD")?;
    for row in &table.rows {
        let line: Vec<String> = row.iter().map(|c| if *c == Cell::Empty { "NaN".to_string() } else { c.text() }).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    writeln!(out, "EOD")?;
    writeln!(out, "set datafile separator \",\"")?;
    writeln!(out, "set title \"{}\"", p.title.replace('"', "'"))?;
    writeln!(out, "set xlabel \"{}\"", p.xlabel)?;
    writeln!(out, "set ylabel \"{}\"", p.ylabel)?;
    if p.logy {
        writeln!(out, "set logscale y")?;
    }
    writeln!(out, "set key top left")?;
    let parts: Vec<String> = p
        .series
        .iter()
        .map(|&i| format!("$data using 1:{} with {} title \"{}\"", i + 1, p.style, table.columns[i]))
        .collect();
    writeln!(out, "plot {}", parts.join(", \\\n     "))?;
    Ok(())
}
