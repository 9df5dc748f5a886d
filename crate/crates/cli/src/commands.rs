//! Subcommands: argument definitions, row computation and summaries.

use std::f64::consts::FRAC_PI_4;

use clap::{Args, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use sineseries_core::bounds::{early_lower_bound, lower_bound, upper_bound};
use sineseries_core::hermite::{a_asymptotic, a_functional_direct, a_functional_fourier, window_halfwidth, HermiteWindow};
use sineseries_core::mellin::{qbar, taylor_eval, MellinKernel};
use sineseries_core::series::{decompose, evaluate, SeriesParams};
use sineseries_core::stats::{
    split_signal_trend, detect_dependence, fit_block_maxima, normal_cdf, occupation_trend, scaled_partial, Bins, DistributionReport,
    FrequencySet,
};
use sineseries_core::{Complex64, Error};

use crate::table::{Cell, PlotSpec, Table};

#[derive(Debug, Clone, Args)]
pub struct SeriesArgs {
    /// Exponent p > 1
    #[arg(long)]
    pub p: f64,
    /// Split parameter tau in (0, pi/2)
    #[arg(long, default_value_t = FRAC_PI_4)]
    pub tau: f64,
    /// Absolute tolerance per value
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

impl SeriesArgs {
    fn params(&self) -> Result<SeriesParams, Error> {
        SeriesParams::with_tau(self.p, self.tau)
    }

    fn words(&self) -> Vec<String> {
        words(&[("p", self.p), ("tau", self.tau), ("tol", self.tol)])
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// First grid point (defaults to one step)
    #[arg(long, allow_hyphen_values = true)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Signal {
    /// self-scaled partial sum with N = split index of t
    Split,
    /// fixed N-term sum over omega_n = n^-p
    Power,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Evaluate S_p(t) with a certified error bound
    Eval {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Values, trend and fluctuation on a uniform t grid
    Sweep {
        #[command(flatten)]
        series: SeriesArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Small-t power series in t with zeta coefficients
    Taylor {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 0.0)]
        t_min: f64,
        #[arg(long)]
        t_max: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
    /// Mellin kernel Qbar_p(sigma + iv) along a vertical line
    Mellin {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        sigma: f64,
        #[arg(long, default_value_t = 40.0)]
        v_max: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
    /// Hermite-windowed averages of the fluctuation over a range of centers
    Hermite {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, allow_hyphen_values = true)]
        w_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        w_max: f64,
        #[arg(long, default_value_t = 1.0)]
        w_step: f64,
        /// Truncation of the Fourier integral (defaults to kappa (14 + sqrt(2n+1)))
        #[arg(long)]
        v_max: Option<f64>,
        /// Panels of the Fourier integral (defaults to 4000)
        #[arg(long, default_value_t = 4000)]
        panels: usize,
        /// Order of the asymptotic column, 0 to omit
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Occupation-time histogram and KS distance to the normal law
    Clt {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = FRAC_PI_4)]
        tau: f64,
        #[arg(long, value_enum, default_value_t = Signal::Split)]
        signal: Signal,
        /// Number of frequencies for the power signal
        #[arg(long, default_value_t = 20)]
        n_terms: usize,
        /// Horizons T, comma separated; the histogram is for the last one
        #[arg(long, value_delimiter = ',', required = true)]
        t_max: Vec<f64>,
        #[arg(long, default_value_t = 1e-2)]
        step: f64,
        #[arg(long, default_value_t = 80)]
        bins: usize,
        #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 4.0)]
        hi: f64,
    },
    /// Polynomial corridor around S_2(t)
    Bounds {
        #[arg(long, default_value_t = 7)]
        n_star: u32,
        #[arg(long, default_value_t = 120.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
    /// Search for rational dependence among the frequencies n^-p
    Independence {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1000)]
        b_max: u64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Fluctuation samples in u = ln t and the block-maximum growth exponent
    Envelope {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long, allow_hyphen_values = true)]
        u_lo: f64,
        #[arg(long, allow_hyphen_values = true)]
        u_hi: f64,
        #[arg(long, default_value_t = 4000)]
        samples: usize,
    },
}

fn words(pairs: &[(&str, f64)]) -> Vec<String> {
    let mut out = Vec::new();
    for (k, v) in pairs {
        out.push(format!("--{}", k.replace('_', "-")));
        out.push(format!("{v:?}"));
    }
    out
}

/// Failures while building a table.
#[derive(Debug)]
pub enum RunError {
    Usage(String),
    Numerical(Error),
    /// budget ran out part way; the table holds the rows computed so far
    Partial(Box<Table>, Error),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Budget { .. } | Error::Instability(_) => RunError::Numerical(e),
            other => RunError::Usage(other.to_string()),
        }
    }
}

fn usage(msg: &str) -> RunError {
    RunError::Usage(msg.to_string())
}

pub fn grid(t_min: f64, t_max: f64, step: f64) -> Result<Vec<f64>, RunError> {
    if !(step > 0.0) || !step.is_finite() || !t_min.is_finite() || !t_max.is_finite() || t_max < t_min {
        return Err(usage("grid needs finite t_min <= t_max and step > 0"));
    }
    let n = ((t_max - t_min) / step + 1e-9).floor();
    if n > 1e8 {
        return Err(usage("grid has more than 1e8 points"));
    }
    Ok((0..=n as u64).map(|k| t_min + step * k as f64).collect())
}

fn is_budget(e: &Error) -> bool {
    matches!(e, Error::Budget { .. } | Error::Instability(_))
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eval { .. } => "eval",
            Command::Sweep { .. } => "sweep",
            Command::Taylor { .. } => "taylor",
            Command::Mellin { .. } => "mellin",
            Command::Hermite { .. } => "hermite",
            Command::Clt { .. } => "clt",
            Command::Bounds { .. } => "bounds",
            Command::Independence { .. } => "independence",
            Command::Envelope { .. } => "envelope",
        }
    }

    /// Arguments that rebuild this command, as recorded in the metadata line.
    pub fn words(&self) -> Vec<String> {
        let mut w = vec![self.name().to_string()];
        match self {
            Command::Eval { series, t } => {
                w.extend(series.words());
                w.extend(words(&[("t", *t)]));
            }
            Command::Sweep { series, grid } => {
                w.extend(series.words());
                w.extend(words(&[("t_min", grid.t_min.unwrap_or(grid.step)), ("t_max", grid.t_max), ("step", grid.step)]));
            }
            Command::Taylor { p, tol, t_min, t_max, step } => {
                w.extend(words(&[("p", *p), ("tol", *tol), ("t_min", *t_min), ("t_max", *t_max), ("step", *step)]));
            }
            Command::Mellin { p, sigma, v_max, step } => {
                w.extend(words(&[("p", *p), ("sigma", *sigma), ("v_max", *v_max), ("step", *step)]));
            }
            Command::Hermite { p, n, kappa, w_min, w_max, w_step, v_max, panels, order, tol } => {
                w.extend(words(&[("p", *p), ("kappa", *kappa), ("w_min", *w_min), ("w_max", *w_max), ("w_step", *w_step)]));
                w.extend(words(&[("v_max", hermite_vmax(*n, *kappa, *v_max)), ("tol", *tol)]));
                w.extend(["--n".into(), n.to_string(), "--panels".into(), panels.to_string(), "--order".into(), order.to_string()]);
            }
            Command::Clt { p, tau, signal, n_terms, t_max, step, bins, lo, hi } => {
                w.extend(words(&[("p", *p), ("tau", *tau), ("step", *step), ("lo", *lo), ("hi", *hi)]));
                let sig = match signal {
                    Signal::Split => "split",
                    Signal::Power => "power",
                };
                let horizons: Vec<String> = t_max.iter().map(|t| format!("{t:?}")).collect();
                w.extend(["--signal".into(), sig.into(), "--n-terms".into(), n_terms.to_string(), "--bins".into(), bins.to_string()]);
                w.extend(["--t-max".into(), horizons.join(",")]);
            }
            Command::Bounds { n_star, t_max, step } => {
                w.extend(["--n-star".into(), n_star.to_string()]);
                w.extend(words(&[("t_max", *t_max), ("step", *step)]));
            }
            Command::Independence { p, b_max, tol } => {
                w.extend(words(&[("p", *p), ("tol", *tol)]));
                w.extend(["--b-max".into(), b_max.to_string()]);
            }
            Command::Envelope { series, u_lo, u_hi, samples } => {
                w.extend(series.words());
                w.extend(words(&[("u_lo", *u_lo), ("u_hi", *u_hi)]));
                w.extend(["--samples".into(), samples.to_string()]);
            }
        }
        w
    }

    fn columns(&self) -> Vec<&'static str> {
        match self {
            Command::Eval { .. } => vec!["t", "value", "error_bound", "terms_used", "method"],
            Command::Sweep { .. } => vec!["t", "value", "trend", "fluctuation", "error_bound"],
            Command::Taylor { .. } => vec!["t", "value", "error_bound"],
            Command::Mellin { .. } => vec!["v", "re", "im", "abs"],
            Command::Hermite { .. } => vec!["w", "direct", "fourier", "asymptotic"],
            Command::Clt { .. } => vec!["bin_lo", "bin_hi", "fraction", "normal"],
            Command::Bounds { .. } => vec!["t", "s2", "lower", "upper", "early_lower"],
            Command::Independence { .. } => vec!["kind", "a", "b", "residual"],
            Command::Envelope { .. } => vec!["u", "fluctuation", "abs_fluctuation"],
        }
    }

    fn plot(&self) -> PlotSpec {
        let (xlabel, ylabel, series, style, logy) = match self {
            Command::Eval { .. } => ("t", "S_p(t)", vec![1], "points", false),
            Command::Sweep { .. } => ("t", "S_p(t)", vec![1, 2, 3], "lines", false),
            Command::Taylor { .. } => ("t", "S_p(t)", vec![1], "lines", false),
            Command::Mellin { .. } => ("v", "Qbar_p", vec![1, 2, 3], "lines", false),
            Command::Hermite { .. } => ("w", "A_n(w)", vec![1, 2, 3], "linespoints", false),
            Command::Clt { .. } => ("x", "occupation fraction", vec![2, 3], "steps", false),
            Command::Bounds { .. } => ("t", "S_2(t)", vec![1, 2, 3], "lines", false),
            Command::Independence { .. } => ("kind", "residual", vec![3], "points", false),
            Command::Envelope { .. } => ("u", "|DeltaS_p(e^u)|", vec![2], "dots", true),
        };
        PlotSpec { title: self.words().join(" "), xlabel, ylabel, series, style, logy }
    }

    /// Inputs (first column) of the row-wise tables; `None` for tables built as a whole.
    pub fn inputs(&self) -> Result<Option<Vec<f64>>, RunError> {
        Ok(Some(match self {
            Command::Eval { t, .. } => vec![*t],
            Command::Sweep { grid: g, .. } => grid(g.t_min.unwrap_or(g.step), g.t_max, g.step)?,
            Command::Taylor { t_min, t_max, step, .. } => grid(*t_min, *t_max, *step)?,
            Command::Mellin { v_max, step, .. } => grid(-v_max, *v_max, *step)?,
            Command::Hermite { w_min, w_max, w_step, .. } => grid(*w_min, *w_max, *w_step)?,
            Command::Bounds { t_max, step, .. } => grid(*step, *t_max, *step)?,
            Command::Envelope { u_lo, u_hi, samples, .. } => {
                if *samples < 2 || !(u_hi > u_lo) {
                    return Err(usage("envelope needs u_lo < u_hi and at least two samples"));
                }
                let h = (u_hi - u_lo) / (*samples - 1) as f64;
                (0..*samples).map(|i| if i + 1 == *samples { *u_hi } else { u_lo + h * i as f64 }).collect()
            }
            Command::Clt { .. } | Command::Independence { .. } => return Ok(None),
        }))
    }

    /// One row of a row-wise table.
    pub fn row(&self, x: f64) -> Result<Vec<Cell>, Error> {
        match self {
            Command::Eval { series, .. } => {
                let r = evaluate(&series.params()?, x, series.tol)?;
                Ok(vec![Cell::F(x), Cell::F(r.value), Cell::F(r.error_bound), Cell::I(r.terms_used as i64), Cell::S(r.method.as_str().into())])
            }
            Command::Sweep { series, .. } => {
                let d = decompose(&series.params()?, x, series.tol)?;
                Ok(vec![Cell::F(x), Cell::F(d.trend + d.fluctuation), Cell::F(d.trend), Cell::F(d.fluctuation), Cell::F(d.error_bound)])
            }
            Command::Taylor { p, tol, .. } => {
                let r = taylor_eval(*p, x, *tol)?;
                Ok(vec![Cell::F(x), Cell::F(r.value), Cell::F(r.error_bound)])
            }
            Command::Mellin { p, sigma, .. } => {
                let q = qbar(&MellinKernel::new(*p)?, Complex64::new(*sigma, x))?;
                Ok(vec![Cell::F(x), Cell::F(q.re), Cell::F(q.im), Cell::F(q.norm())])
            }
            Command::Hermite { p, n, kappa, v_max, panels, order, tol, .. } => {
                let params = SeriesParams::new(*p)?;
                let win = HermiteWindow::new(*n, x, *kappa)?;
                let h = window_halfwidth(&params, win, *tol)?;
                let d = a_functional_direct(&params, win, h, *tol)?;
                let f = a_functional_fourier(&params, win, hermite_vmax(*n, *kappa, *v_max), *panels)?;
                let a = if *order > 0 && x != 0.0 { Cell::F(a_asymptotic(&params, win, *order)?) } else { Cell::Empty };
                Ok(vec![Cell::F(x), Cell::F(d), Cell::F(f), a])
            }
            Command::Bounds { n_star, .. } => {
                let s = evaluate(&SeriesParams::new(2.0)?, x, 1e-12)?.value;
                Ok(vec![Cell::F(x), Cell::F(s), Cell::F(lower_bound(x, *n_star)?), Cell::F(upper_bound(x, *n_star)?), Cell::F(early_lower_bound(x)?)])
            }
            Command::Envelope { series, .. } => {
                let d = decompose(&series.params()?, x.exp(), series.tol)?;
                Ok(vec![Cell::F(x), Cell::F(d.fluctuation), Cell::F(d.fluctuation.abs())])
            }
            Command::Clt { .. } | Command::Independence { .. } => Err(Error::Domain("table is not row-wise")),
        }
    }

    /// Rows of the tables that are computed as a whole, plus summary entries.
    pub fn whole(&self) -> Result<(Vec<Vec<Cell>>, Vec<(&'static str, Value)>), Error> {
        match self {
            Command::Clt { p, tau, signal, n_terms, t_max, step, bins, lo, hi } => {
                let bins = Bins::new(*lo, *hi, *bins)?;
                let reports = match signal {
                    Signal::Split => split_signal_trend(&SeriesParams::with_tau(*p, *tau)?, t_max, *step, bins)?,
                    Signal::Power => {
                        let f = FrequencySet::power_law(*p, *n_terms)?;
                        scaled_partial(&f, *n_terms, 0.0)?;
                        occupation_trend(|t| scaled_partial(&f, *n_terms, t).unwrap_or(f64::NAN), t_max, *step, bins)?
                    }
                };
                let last: &DistributionReport = reports.last().ok_or(Error::Domain("need at least one horizon"))?;
                let rows = last
                    .occupation_fraction
                    .iter()
                    .enumerate()
                    .map(|(i, f)| {
                        let (a, b) = (last.bin_edges[i], last.bin_edges[i + 1]);
                        vec![Cell::F(a), Cell::F(b), Cell::F(*f), Cell::F(normal_cdf(b) - normal_cdf(a))]
                    })
                    .collect();
                let trend: Vec<Value> = reports.iter().map(|r| json!({"t": r.total_time, "samples": r.samples, "ks_distance": r.ks_distance})).collect();
                let summary = vec![
                    ("ks_distance", json!(last.ks_distance)),
                    ("samples", json!(last.samples)),
                    ("below", json!(last.below)),
                    ("above", json!(last.above)),
                    ("tau", json!(last.tau)),
                    ("trend", Value::Array(trend)),
                ];
                Ok((rows, summary))
            }
            Command::Independence { p, b_max, tol } => {
                let w = detect_dependence(*p, *b_max, *tol);
                let mut rows = Vec::new();
                let mut relation = Value::Null;
                if let Some(w) = &w {
                    if let Some(r) = w.power {
                        rows.push(vec![Cell::S("power".into()), Cell::I(r.a as i64), Cell::I(r.b as i64), Cell::F(r.residual)]);
                    }
                    if let Some(q) = w.rational {
                        rows.push(vec![Cell::S("rational".into()), Cell::I(q.num as i64), Cell::I(q.den as i64), Cell::F(q.residual)]);
                    }
                    relation = json!(w.relation());
                }
                Ok((rows, vec![("witness", json!(w.is_some())), ("relation", relation)]))
            }
            _ => Err(Error::Domain("table is row-wise")),
        }
    }

    fn summarize(&self, rows: &[Vec<Cell>]) -> Vec<(&'static str, Value)> {
        let f = |c: &Cell| if let Cell::F(x) = c { *x } else { f64::NAN };
        match self {
            Command::Eval { .. } => rows
                .first()
                .map(|r| vec![("value", json!(f(&r[1]))), ("error_bound", json!(f(&r[2]))), ("method", json!(r[4].text()))])
                .unwrap_or_default(),
            Command::Envelope { .. } => {
                let us: Vec<f64> = rows.iter().map(|r| f(&r[0])).collect();
                let vs: Vec<f64> = rows.iter().map(|r| f(&r[1])).collect();
                match fit_block_maxima(&us, &vs) {
                    Ok((e, g)) => vec![("exponent", json!(e)), ("coefficient", json!(g))],
                    Err(e) => vec![("fit_error", json!(e.to_string()))],
                }
            }
            _ => {
                let bound = self.columns().iter().position(|c| *c == "error_bound");
                let mut s = vec![("rows", json!(rows.len()))];
                if let Some(i) = bound {
                    let m = rows.iter().map(|r| f(&r[i])).fold(0.0, f64::max);
                    s.push(("max_error_bound", json!(m)));
                }
                s
            }
        }
    }

    /// Builds the full table. A budget failure in a row-wise table returns
    /// the rows before the first failing input, flagged partial.
    pub fn run(&self) -> Result<Table, RunError> {
        let mut table = Table {
            command: self.words(),
            columns: self.columns(),
            rows: Vec::new(),
            partial: false,
            summary: Vec::new(),
            plot: self.plot(),
        };
        match self.inputs()? {
            Some(xs) => {
                let results: Vec<Result<Vec<Cell>, Error>> = xs.par_iter().map(|&x| self.row(x)).collect();
                for r in results {
                    match r {
                        Ok(row) => table.rows.push(row),
                        Err(e) if is_budget(&e) => {
                            table.partial = true;
                            table.summary = self.summarize(&table.rows);
                            return Err(RunError::Partial(Box::new(table), e));
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
                table.summary = self.summarize(&table.rows);
            }
            None => {
                let (rows, summary) = self.whole()?;
                table.rows = rows;
                table.summary = summary;
            }
        }
        Ok(table)
    }
}

fn hermite_vmax(n: usize, kappa: f64, v_max: Option<f64>) -> f64 {
    v_max.unwrap_or(kappa * (14.0 + (2.0 * n as f64 + 1.0).sqrt()))
}
