use std::collections::BTreeMap;

use clap::{Args, Subcommand};
use conductor_core::error::Error;
use conductor_core::modforms;
use conductor_core::plancherel::{
    finite_split_integral, finite_split_integral_exact, leading_constant, regularized_global_mass, ArchConfig, RealPlace,
};
use conductor_core::primes::{is_prime, primes_up_to};
use conductor_core::sato_tate::{convergence_table, TestFunction};
use conductor_core::{GlobalMassConfig, MassReport, MultiplicativeFunction, Rational};
use serde_json::Value;

use crate::config::RunConfig;
use crate::output::{int, num, Report};
use crate::CliError;

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Partial sums of a multiplicative function over ideals of norm <= X.
    Sum(SumArgs),
    /// Dimensions of cusp forms or newforms on Gamma_0(N).
    Dims(DimsArgs),
    /// Empirical newform counts with analytic conductor <= Q.
    Count(CountArgs),
    /// Local or regularized global Plancherel masses.
    #[command(subcommand)]
    Measure(MeasureCommand),
    /// Leading constant vol/2 * mass of the counting law.
    Constant(ConstantArgs),
    /// Moments of local Plancherel measures against the Sato-Tate measure.
    SatoTate(SatoTateArgs),
    /// Power-law fit of empirical counts over a geometric grid.
    Fit(FitArgs),
}

#[derive(Subcommand, Debug)]
pub enum MeasureCommand {
    /// Local mass of a split place with residue field size q.
    Local(LocalArgs),
    /// Regularized global mass over the configured field.
    Global(MassArgs),
}

#[derive(Args, Debug)]
pub struct SumArgs {
    /// Function name: mu, mu2, tau2, lambda2, phi2, id, M, delta, one.
    #[arg(long = "fn")]
    function: String,
    /// Norm bounds, comma separated.
    #[arg(long = "X", value_delimiter = ',', required = true)]
    x: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct DimsArgs {
    /// Levels: integers or ranges `a..b`, comma separated.
    #[arg(long = "N")]
    n: String,
    /// Weights: integers or ranges `a..b`, comma separated.
    #[arg(long = "k")]
    k: String,
    /// Newform dimensions instead of cusp-form dimensions.
    #[arg(long)]
    new: bool,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    /// Conductor bounds, comma separated.
    #[arg(long = "Q", value_delimiter = ',', required = true)]
    bounds: Vec<f64>,
    /// Ramified prime; overrides the `ramified` config key.
    #[arg(long)]
    q: Option<u64>,
}

#[derive(Args, Debug)]
pub struct LocalArgs {
    /// Residue field sizes: integers or ranges `a..b` (primes are kept).
    #[arg(long)]
    q: String,
    /// Exponent s. [default: 2]
    #[arg(long, default_value_t = 2.0)]
    s: f64,
}

#[derive(Args, Debug)]
pub struct MassArgs {
    /// Exponent s. [default: 2]
    #[arg(long, default_value_t = 2.0)]
    s: f64,
    /// Real places, comma separated: split or compact. Omit for finite places only.
    #[arg(long, value_delimiter = ',')]
    places: Vec<String>,
    /// Residue of the Dedekind zeta function at 1, or `estimate`. Required
    /// for fields other than Q.
    #[arg(long)]
    residue: Option<String>,
    /// Ramified prime; overrides the `ramified` config key.
    #[arg(long)]
    q: Option<u64>,
    /// Fail with exit status 3 if the truncation error exceeds this bound.
    #[arg(long)]
    max_error: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ConstantArgs {
    /// Volume of G(F)\G(A) in the chosen Haar measure.
    #[arg(long)]
    volume: f64,
    #[command(flatten)]
    mass: MassArgs,
}

#[derive(Args, Debug)]
pub struct SatoTateArgs {
    /// Primes: integers or ranges `a..b` (primes are kept). [default: 2..100]
    #[arg(long, default_value = "2..100")]
    primes: String,
    /// Test functions x0..x8, comma separated. [default: x2,x4]
    #[arg(long, value_delimiter = ',', default_value = "x2,x4")]
    tests: Vec<String>,
    /// Fail with exit status 3 unless every error decreases in q.
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Smallest conductor bound. [default: 1000]
    #[arg(long, default_value_t = 1e3)]
    from: f64,
    /// Largest conductor bound. [default: 1000000]
    #[arg(long, default_value_t = 1e6)]
    to: f64,
    /// Number of grid points. [default: 13]
    #[arg(long, default_value_t = 13)]
    points: usize,
    /// Ramified prime; overrides the `ramified` config key.
    #[arg(long)]
    q: Option<u64>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `3,5..9,12` into a sorted list without duplicates.
fn parse_set(flag: &str, text: &str) -> Result<Vec<u64>, CliError> {
    let bad = || usage(format!("--{flag}: expected integers or ranges a..b, got {text:?}"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            if a > b || b - a > 10_000_000 {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn parse_primes(flag: &str, text: &str) -> Result<Vec<u64>, CliError> {
    let set = parse_set(flag, text)?;
    let primes: Vec<u64> = match (set.first(), set.last()) {
        (Some(_), Some(&hi)) if set.len() as u64 == hi - set[0] + 1 => {
            primes_up_to(hi).into_iter().filter(|&p| p >= set[0]).collect()
        }
        _ => set.into_iter().filter(|&p| is_prime(p)).collect(),
    };
    if primes.is_empty() {
        return Err(usage(format!("--{flag}: {text:?} contains no primes")));
    }
    Ok(primes)
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| num(*v).to_string()).collect::<Vec<_>>().join(",")
}

pub fn execute(command: &Command, config: &RunConfig) -> Result<Report, CliError> {
    let mut params = config.params();
    match command {
        Command::Sum(a) => {
            let f: MultiplicativeFunction = a.function.parse()?;
            params.insert("fn".into(), f.name().to_string());
            params.insert("X".into(), join(&a.x));
            let mut r = Report::new("sum", params, vec!["X", "sum"]);
            for &x in &a.x {
                r.rows.push(vec![num(x), int(f.partial_sum(&config.field, x)?)]);
            }
            Ok(r)
        }
        Command::Dims(a) => {
            let levels = parse_set("N", &a.n)?;
            let weights = parse_set("k", &a.k)?;
            params.insert("N".into(), a.n.clone());
            params.insert("k".into(), a.k.clone());
            params.insert("space".into(), if a.new { "new" } else { "cusp" }.into());
            let mut r = Report::new("dims", params, vec!["N", "k", "dim"]);
            for &n in &levels {
                for &k in &weights {
                    let k32 = u32::try_from(k).map_err(|_| usage("--k: weight too large"))?;
                    let d = if a.new { modforms::dim_newforms(n, k32)? } else { modforms::dim_cusp_forms(n, k32)? };
                    r.rows.push(vec![Value::from(n), Value::from(k), Value::from(d)]);
                }
            }
            Ok(r)
        }
        Command::Count(a) => {
            let ramified = a.q.or(config.ramified);
            params.insert("ramified".into(), ramified.map_or("none".into(), |q| q.to_string()));
            params.insert("Q".into(), join(&a.bounds));
            let counts = modforms::empirical_counts(&a.bounds, config.convention, ramified)?;
            let mut r = Report::new("count", params, vec!["Q", "count"]);
            for (&b, &c) in a.bounds.iter().zip(&counts) {
                r.rows.push(vec![num(b), int(c as i128)]);
            }
            Ok(r)
        }
        Command::Measure(MeasureCommand::Local(a)) => {
            let primes = parse_set("q", &a.q)?;
            params.insert("q".into(), a.q.clone());
            params.insert("s".into(), num(a.s).to_string());
            let mut r = Report::new("measure local", params, vec!["q", "s", "value"]);
            for &q in &primes {
                r.rows.push(vec![Value::from(q), num(a.s), num(local_mass(q, a.s)?)]);
            }
            Ok(r)
        }
        Command::Measure(MeasureCommand::Global(a)) => {
            let mass = global_mass(a, config, &mut params)?;
            let mut r = Report::new(
                "measure global",
                params,
                vec!["s", "value", "truncation_error", "refined", "refined_error"],
            );
            r.rows.push(vec![
                num(a.s),
                num(mass.value),
                num(mass.truncation_error),
                num(mass.refined),
                num(mass.refined_error),
            ]);
            Ok(r)
        }
        Command::Constant(a) => {
            let mass = global_mass(&a.mass, config, &mut params)?;
            let c = leading_constant(a.volume, &mass)?;
            params.insert("volume".into(), num(a.volume).to_string());
            let mut r = Report::new("constant", params, vec!["volume", "mass", "mass_error", "constant", "error"]);
            r.rows.push(vec![num(a.volume), num(mass.value), num(mass.truncation_error), num(c.value), num(c.error)]);
            Ok(r)
        }
        Command::SatoTate(a) => {
            let primes = parse_primes("primes", &a.primes)?;
            let tests: Vec<TestFunction> = a.tests.iter().map(|t| t.parse()).collect::<Result<_, Error>>()?;
            params.insert("primes".into(), a.primes.clone());
            params.insert("tests".into(), tests.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","));
            let table = convergence_table(&tests, &primes, config.truncation.quad_tolerance)?;
            if a.strict {
                let labels: Vec<String> = tests.iter().filter(|t| **t != TestFunction::Monomial(0)).map(|t| t.to_string()).collect();
                table.check_decreasing(&labels.iter().map(String::as_str).collect::<Vec<_>>())?;
            }
            let mut r = Report::new("sato-tate", params, vec!["q", "test", "value_q", "value_st", "error"]);
            for (label, slope) in &table.decay {
                r.summary.push((format!("decay.{label}"), slope.map_or(Value::Null, num)));
            }
            for row in &table.rows {
                r.rows.push(vec![
                    Value::from(row.q),
                    Value::from(row.test.clone()),
                    num(row.value_q),
                    num(row.value_st),
                    num(row.error),
                ]);
            }
            Ok(r)
        }
        Command::Fit(a) => {
            if !(a.from >= 1.0 && a.to > a.from) || a.points < 5 {
                return Err(usage("fit: need 1 <= --from < --to and --points >= 5"));
            }
            let ramified = a.q.or(config.ramified);
            params.insert("ramified".into(), ramified.map_or("none".into(), |q| q.to_string()));
            params.insert("from".into(), num(a.from).to_string());
            params.insert("to".into(), num(a.to).to_string());
            params.insert("points".into(), a.points.to_string());
            let grid = modforms::geometric_grid(a.from, a.to, a.points);
            let counts = modforms::empirical_counts(&grid, config.convention, ramified)?;
            let points: Vec<(f64, f64)> = grid.iter().zip(&counts).map(|(&q, &c)| (q, c as f64)).collect();
            let fit = modforms::fit_growth(&points)?;
            let mut r = Report::new("fit", params, vec!["Q", "count"]);
            r.summary.push(("exponent".into(), num(fit.exponent)));
            r.summary.push(("constant".into(), num(fit.constant)));
            r.summary.push(("max_log_residual".into(), num(fit.max_log_residual)));
            for (&q, &c) in grid.iter().zip(&counts) {
                r.rows.push(vec![num(q), int(c as i128)]);
            }
            Ok(r)
        }
    }
}

/// Exact arithmetic at integer exponents, so `q = 2, s = 2` prints 45/32 exactly.
fn local_mass(q: u64, s: f64) -> Result<f64, CliError> {
    if s.fract() == 0.0 && (2.0..=16.0).contains(&s) {
        if let Ok(exact) = finite_split_integral_exact::<Rational>(q, s as i32) {
            return Ok(*exact.numer() as f64 / *exact.denom() as f64);
        }
    }
    Ok(finite_split_integral(q, s)?)
}

fn global_mass(a: &MassArgs, config: &RunConfig, params: &mut BTreeMap<String, String>) -> Result<MassReport, CliError> {
    let mut field = config.field.clone();
    match a.residue.as_deref() {
        Some("estimate") => {
            let est = field.estimate_residue(1e6)?;
            field = field.with_residue(est.value)?;
        }
        Some(v) => {
            let v: f64 = v.parse().map_err(|_| usage(format!("--residue: expected a number or `estimate`, got {v:?}")))?;
            field = field.with_residue(v)?;
        }
        None if field.residue_at_1.is_none() => {
            return Err(usage(format!("--residue is required for {field} (a number or `estimate`)")));
        }
        None => {}
    }
    let places: Vec<RealPlace> = a
        .places
        .iter()
        .map(|p| match p.as_str() {
            "split" => Ok(RealPlace::Split),
            "compact" => Ok(RealPlace::Compact),
            _ => Err(usage(format!("--places: expected split or compact, got {p:?}"))),
        })
        .collect::<Result<_, _>>()?;
    let arch = if places.is_empty() {
        ArchConfig::FiniteOnly
    } else {
        ArchConfig::Places { places, normalization: config.arch }
    };
    let ramified = a.q.or(config.ramified);
    let mass_config = GlobalMassConfig {
        ramified: ramified.into_iter().collect(),
        arch,
        truncation: config.truncation,
        ..GlobalMassConfig::default()
    };
    params.insert("ramified".into(), ramified.map_or("none".into(), |q| q.to_string()));
    params.insert("s".into(), num(a.s).to_string());
    params.insert("places".into(), if a.places.is_empty() { "none".into() } else { a.places.join(",") });
    params.insert("residue".into(), num(field.residue_at_1.unwrap_or(f64::NAN)).to_string());
    let mass = regularized_global_mass(&field, &mass_config, a.s)?;
    if let Some(bound) = a.max_error {
        if mass.truncation_error > bound {
            return Err(Error::Contract(format!(
                "truncation error {:e} exceeds --max-error {bound:e}",
                mass.truncation_error
            ))
            .into());
        }
        params.insert("max_error".into(), num(bound).to_string());
    }
    Ok(mass)
}
