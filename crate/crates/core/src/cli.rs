//! Command-line front end.
//!
//! [`run`] takes the full argument vector and returns the exit status with
//! everything that would go to standard output and standard error, so the
//! binary is a thin wrapper and tests can drive commands directly.
//!
//! Exit status is 0 on success, 1 for usage, file and parse problems and 2
//! when a computation fails (domain, positivity or accuracy errors).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::basis::{trend_pool, BasisFunctionSpec};
use crate::error::Error;
use crate::fitting::{
    best_pair_search, cumulative_residual, fit_rate_direct, functional_residual, seasonal_fit, EliminationMode,
};
use crate::format::sig10;
use crate::lsq::LinearFit;
use crate::model::{log_linear_model, piecewise_affine_model, BasisExpansion, CpiModel};
use crate::optimize::OptimizerConfig;
use crate::presets::published_direct_rate;
use crate::quadrature::QuadratureConfig;
use crate::rate::{accumulate, rate_from_cpi, real_value, RateFunction};
use crate::report::{FitReport, ReportKind};
use crate::timebase::{parse_cpi_csv, CpiObservation, CpiSeries, BUNDLED_CPI_CSV};

/// Passing this to `--cpi` selects the CPI series compiled into the binary.
pub const BUNDLED_CPI: &str = "@bundled";

const MODEL_HELP: &str = "rate model: const:I | pw:t0,I0,t1,I1,...,tn | affine | loglinear | fit:<report.json> | published-trig";

#[derive(Debug, Parser)]
#[command(name = "inflation", version, about = "Inflation accumulation for arbitrary rate functions")]
struct Cli {
    /// Absolute tolerance for adaptive quadrature.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CpiArg {
    /// CPI CSV file (`time,value` rows), or @bundled.
    #[arg(long)]
    cpi: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long, visible_alias = "rate", help = MODEL_HELP)]
    model: String,
    #[command(flatten)]
    cpi: CpiArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Quantity {
    Rate,
    Cpi,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and check a CPI file.
    Validate {
        #[command(flatten)]
        cpi: CpiArg,
    },
    /// Rate per unit time at one instant (right-hand limit at knots).
    RateAt {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        at: f64,
    },
    /// Rate and growth factor over an interval.
    Accumulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        /// Also report the real value of this amount at `--to`.
        #[arg(long)]
        principal: Option<f64>,
    },
    /// Real value at `--to` of `--principal` held from `--from`.
    RealValue {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        principal: f64,
    },
    /// Constant plus the best pair of trend functions.
    FitTrend {
        #[command(flatten)]
        cpi: CpiArg,
        #[arg(long)]
        json: bool,
    },
    /// Trend, then seasonal functions chosen by backward elimination.
    FitSeasonal {
        #[command(flatten)]
        cpi: CpiArg,
        /// Number of seasonal functions to remove.
        #[arg(long, default_value_t = 15)]
        remove: usize,
        /// Rank all functions once and drop the cheapest together.
        #[arg(long)]
        one_shot: bool,
        #[arg(long)]
        json: bool,
    },
    /// Fit a rate expansion directly to the observed interval growth.
    FitRate {
        #[command(flatten)]
        cpi: CpiArg,
        /// Comma-separated basis, e.g. const,sin:1/2,cos:2/1.
        #[arg(long, value_delimiter = ',', required = true)]
        basis: Vec<String>,
        /// Starting coefficients; defaults to a linearised least-squares seed.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        init: Option<Vec<f64>>,
        /// Objective evaluation budget.
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long)]
        json: bool,
    },
    /// Growth-equation residual of a rate against the CPI series.
    Residual {
        #[command(flatten)]
        model: ModelArgs,
        /// Compare cumulated index levels instead of interval ratios.
        #[arg(long)]
        cumulative: bool,
    },
    /// Two-column CSV of rate or CPI values; knots are always included.
    Sample {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        step: f64,
        #[arg(long, value_enum, default_value = "rate")]
        quantity: Quantity,
    },
}

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Report(_) => Failure::Usage(e.to_string()),
            e => Failure::Compute(e),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Runs one command; returns `(exit status, stdout, stderr)`.
pub fn run<I, T>(argv: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() { (1, String::new(), text) } else { (0, text, String::new()) };
        }
    };
    let mut out = String::new();
    match execute(&cli, &mut out) {
        Ok(()) => (0, out, String::new()),
        Err(Failure::Usage(msg)) => (1, out, format!("error: {msg}\n")),
        Err(Failure::Compute(e)) => (2, out, format!("error: {e}\n")),
    }
}

fn quad_config(tol: f64) -> CliResult<QuadratureConfig> {
    let q = QuadratureConfig::with_tol(tol);
    q.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(q)
}

fn read_text(path: &Path) -> CliResult<String> {
    if path.as_os_str() == BUNDLED_CPI {
        return Ok(BUNDLED_CPI_CSV.to_string());
    }
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_series(arg: &CpiArg) -> CliResult<CpiSeries> {
    let path = arg.cpi.as_deref().ok_or_else(|| Failure::Usage("--cpi is required".into()))?;
    let text = read_text(path)?;
    parse_cpi_csv(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// The rate named by `spec`, plus the CPI model behind it when there is one.
fn build_rate(spec: &str, cpi: &CpiArg) -> CliResult<(RateFunction, Option<CpiModel>)> {
    let usage = |m: String| Failure::Usage(m);
    let numbers = |s: &str| -> CliResult<Vec<f64>> {
        s.split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| usage(format!("bad number '{x}' in model '{spec}'"))))
            .collect()
    };
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    match kind {
        "const" => {
            let v = numbers(rest)?;
            if v.len() != 1 {
                return Err(usage(format!("const takes one value, got '{rest}'")));
            }
            Ok((RateFunction::Constant(v[0]), None))
        }
        "pw" => {
            let v = numbers(rest)?;
            if v.len() < 3 || v.len() % 2 == 0 {
                return Err(usage("pw needs t0,I0,t1,...,tn".into()));
            }
            let knots = v.iter().step_by(2).copied().collect();
            let values = v.iter().skip(1).step_by(2).copied().collect();
            Ok((RateFunction::piecewise_constant(knots, values).map_err(|e| usage(e.to_string()))?, None))
        }
        "affine" | "loglinear" if rest.is_empty() => {
            let series = load_series(cpi)?;
            let m = if kind == "affine" { piecewise_affine_model(&series) } else { log_linear_model(&series) };
            Ok((rate_from_cpi(&m), Some(m)))
        }
        "published-trig" | "paper-eq22" if rest.is_empty() => Ok((published_direct_rate(), None)),
        "fit" if !rest.is_empty() => {
            let report = FitReport::from_json(&read_text(Path::new(rest))?)
                .map_err(|e| usage(format!("{rest}: {e}")))?;
            let rate = report.rate_function().map_err(|e| usage(format!("{rest}: {e}")))?;
            let model = match report.kind {
                ReportKind::Cpi => Some(report.cpi_model().map_err(|e| usage(format!("{rest}: {e}")))?),
                ReportKind::Rate => None,
            };
            Ok((rate, model))
        }
        _ => Err(usage(format!("unknown model '{spec}'; expected {}", &MODEL_HELP[12..]))),
    }
}

fn line(out: &mut String, key: &str, value: f64) {
    writeln!(out, "{key} {}", sig10(value)).expect("string write");
}

fn basis_lines(out: &mut String, expansion: &BasisExpansion) {
    for (b, c) in &expansion.terms {
        writeln!(out, "  {:<12} {}", b.to_string(), sig10(*c)).expect("string write");
    }
}

fn execute(cli: &Cli, out: &mut String) -> CliResult<()> {
    let quad = quad_config(cli.tol)?;
    match &cli.command {
        Command::Validate { cpi } => {
            let s = load_series(cpi)?;
            let values = s.values();
            writeln!(out, "observations {}", s.len()).expect("string write");
            line(out, "start", s.start());
            line(out, "end", s.end());
            line(out, "min", values.iter().copied().fold(f64::INFINITY, f64::min));
            line(out, "max", values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            line(out, "total_growth", values[values.len() - 1] / values[0]);
        }
        Command::RateAt { model, at } => {
            let (rate, _) = build_rate(&model.model, &model.cpi)?;
            line(out, "rate", rate.eval(*at)?);
        }
        Command::Accumulate { model, from, to, principal } => {
            let (rate, cpi) = build_rate(&model.model, &model.cpi)?;
            let acc = accumulate(&rate, *from, *to, &quad)?;
            line(out, "rate", acc.rate);
            line(out, "growth_factor", acc.growth_factor);
            if let Some(p) = principal {
                line(out, "real_value", real_value(&rate, *p, *from, *to, &quad)?);
            }
            if let Some(m) = cpi.filter(CpiModel::is_piecewise_interpolant) {
                if let Some(alt) = month_start_rate(&m, *from, *to, &quad) {
                    writeln!(
                        out,
                        "note: reading month m as year + (m-1)/12 instead of year + m/12 gives rate {} here",
                        sig10(alt)
                    )
                    .expect("string write");
                }
            }
        }
        Command::RealValue { model, from, to, principal } => {
            let (rate, _) = build_rate(&model.model, &model.cpi)?;
            line(out, "real_value", real_value(&rate, *principal, *from, *to, &quad)?);
        }
        Command::FitTrend { cpi, json } => {
            let s = load_series(cpi)?;
            let search = best_pair_search(&s, &trend_pool())?;
            let domain = (s.start(), s.end());
            if *json {
                out.push_str(&FitReport::from_linear_fit(&search.fit, domain).to_json());
                out.push('\n');
            } else {
                writeln!(out, "pairs_evaluated {}", search.pairs_evaluated).expect("string write");
                fit_lines(out, &search.fit);
            }
        }
        Command::FitSeasonal { cpi, remove, one_shot, json } => {
            let s = load_series(cpi)?;
            let trend = best_pair_search(&s, &trend_pool())?.fit;
            let mode = if *one_shot { EliminationMode::OneShot } else { EliminationMode::Iterative };
            let seasonal = seasonal_fit(&s, &trend, *remove, mode)?;
            let domain = (s.start(), s.end());
            let mut terms = trend.expansion().terms;
            terms.extend(seasonal.expansion().terms);
            let combined = BasisExpansion { terms };
            if *json {
                out.push_str(&FitReport::from_model(&combined, domain, seasonal.sse).to_json());
                out.push('\n');
            } else {
                writeln!(out, "trend").expect("string write");
                fit_lines(out, &trend);
                writeln!(out, "seasonal").expect("string write");
                fit_lines(out, &seasonal);
            }
        }
        Command::FitRate { cpi, basis, init, budget, step, json } => {
            let s = load_series(cpi)?;
            let basis = basis
                .iter()
                .map(|b| b.parse::<BasisFunctionSpec>().map_err(|e| Failure::Usage(e.to_string())))
                .collect::<CliResult<Vec<_>>>()?;
            let opt = OptimizerConfig { max_evaluations: *budget, initial_step: *step, ..Default::default() };
            let fit = fit_rate_direct(&s, &basis, init.as_deref(), &quad, &opt)?;
            if *json {
                out.push_str(&FitReport::from_rate_fit(&fit, (s.start(), s.end())).to_json());
                out.push('\n');
            } else {
                basis_lines(out, &fit.expansion);
                line(out, "residual", fit.residual);
                line(out, "initial_residual", fit.initial_residual);
                writeln!(out, "intervals {}", fit.intervals_used).expect("string write");
                writeln!(out, "evaluations {}", fit.evaluations).expect("string write");
                writeln!(out, "converged {}", fit.converged).expect("string write");
            }
        }
        Command::Residual { model, cumulative } => {
            let (rate, _) = build_rate(&model.model, &model.cpi)?;
            let s = load_series(&model.cpi)?;
            let r = if *cumulative {
                cumulative_residual(&rate, &s, &quad)?
            } else {
                functional_residual(&rate, &s, &quad)?
            };
            line(out, "residual", r);
            writeln!(out, "intervals {}", s.len() - 1).expect("string write");
        }
        Command::Sample { model, from, to, step, quantity } => {
            let (rate, cpi) = build_rate(&model.model, &model.cpi)?;
            if !(step.is_finite() && *step > 0.0) {
                return Err(Failure::Usage(format!("--step must be positive, got {step}")));
            }
            if !(from.is_finite() && to.is_finite() && from < to) {
                return Err(Failure::Usage(format!("empty sample range [{from}, {to}]")));
            }
            let points = sample_points(*from, *to, *step, rate.knots());
            match quantity {
                Quantity::Rate => {
                    writeln!(out, "t,rate").expect("string write");
                    for t in points {
                        writeln!(out, "{},{}", sig10(t), sig10(rate.eval(t)?)).expect("string write");
                    }
                }
                Quantity::Cpi => {
                    let m = cpi.ok_or_else(|| {
                        Failure::Usage(format!("model '{}' has no CPI curve to sample", model.model))
                    })?;
                    writeln!(out, "t,cpi").expect("string write");
                    for t in points {
                        writeln!(out, "{},{}", sig10(t), sig10(m.value(t)?)).expect("string write");
                    }
                }
            }
        }
    }
    Ok(())
}

fn fit_lines(out: &mut String, fit: &LinearFit) {
    basis_lines(out, &fit.expansion());
    line(out, "sse", fit.sse);
}

/// Grid `from, from + step, ...` up to `to`, with `to` and every knot inside
/// the range added.
fn sample_points(from: f64, to: f64, step: f64, knots: &[f64]) -> Vec<f64> {
    let n = ((to - from) / step + 1e-9).floor() as usize;
    let mut points: Vec<f64> = (0..=n).map(|k| from + k as f64 * step).filter(|&t| t <= to).collect();
    points.push(to);
    points.extend(knots.iter().copied().filter(|&k| from <= k && k <= to));
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * step);
    points
}

/// Rate over `[from, to]` when the same observations are placed one month
/// earlier. `None` if the interval falls outside the shifted data.
fn month_start_rate(m: &CpiModel, from: f64, to: f64, quad: &QuadratureConfig) -> Option<f64> {
    let (times, values) = match m {
        CpiModel::PiecewiseAffine { times, values } | CpiModel::LogLinear { times, values } => (times, values),
        _ => return None,
    };
    let shifted = times
        .iter()
        .zip(values)
        .map(|(&t, &v)| CpiObservation::new(t - 1.0 / 12.0, v))
        .collect::<crate::Result<Vec<_>>>()
        .and_then(CpiSeries::new)
        .ok()?;
    let model = match m {
        CpiModel::PiecewiseAffine { .. } => piecewise_affine_model(&shifted),
        _ => log_linear_model(&shifted),
    };
    accumulate(&rate_from_cpi(&model), from, to, quad).ok().map(|a| a.rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(args: &[&str]) -> String {
        let (code, out, err) = run(std::iter::once("inflation").chain(args.iter().copied()));
        assert_eq!(code, 0, "{err}");
        out
    }

    #[test]
    fn sample_grid_includes_knots_once() {
        assert_eq!(sample_points(0.0, 1.0, 0.5, &[0.25, 0.5]), vec![0.0, 0.25, 0.5, 1.0]);
        assert_eq!(sample_points(0.0, 1.0, 0.3, &[]), vec![0.0, 0.3, 0.6, 0.8999999999999999, 1.0]);
    }

    #[test]
    fn constant_accumulation() {
        let out = ok(&["accumulate", "--model", "const:0.2", "--from", "0", "--to", "1", "--principal", "100"]);
        assert!(out.contains("real_value 83.33333333\n"), "{out}");
    }

    #[test]
    fn bad_model_is_usage_error() {
        let (code, _, err) = run(["inflation", "rate-at", "--model", "cubic", "--at", "0"]);
        assert_eq!(code, 1);
        assert!(err.contains("unknown model"), "{err}");
        let (code, _, _) = run(["inflation", "rate-at", "--model", "pw:0,0.1", "--at", "0"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn rate_domain_is_exit_two() {
        let (code, _, err) = run(["inflation", "accumulate", "--model", "const:-1.5", "--from", "0", "--to", "1"]);
        assert_eq!(code, 2, "{err}");
    }
}
