//! Local Plancherel densities on `[-2, 2]` and their convergence to the
//! semicircle as the residue norm grows.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::fit_growth;
use crate::plancherel::{finite_split_integral, finite_split_integral_exact};
use crate::quadrature::{integrate as gauss_kronrod, QuadratureConfig};
use crate::scalar::{ExactField, Real};

fn check_interval<T: Real>(x: T) -> Result<()> {
    if x.abs() <= T::lit(2.0) {
        Ok(())
    } else {
        Err(Error::invalid("x", format!("{} lies outside [-2, 2]", x.as_f64())))
    }
}

fn sqrt_factor<T: Real>(x: T) -> T {
    (T::one() - x * x / T::lit(4.0)).max(T::zero()).sqrt()
}

/// `(1/pi) sqrt(1 - x^2/4)`.
pub fn st_density<T: Real>(x: T) -> Result<T> {
    check_interval(x)?;
    Ok(sqrt_factor(x) / T::PI())
}

/// `(q+1)/pi * sqrt(1 - x^2/4) / ((q^{1/2} + q^{-1/2})^2 - x^2)`.
pub fn serre_density<T: Real>(q: u64, x: T) -> Result<T> {
    check_interval(x)?;
    if q < 2 {
        return Err(Error::invalid("q", "prime norm must be at least 2"));
    }
    Ok(sqrt_factor(x) * serre_weight(q, x))
}

/// Serre density divided by `sqrt(1 - x^2/4)`.
fn serre_weight<T: Real>(q: u64, x: T) -> T {
    let qf = T::from_u(q);
    // (sqrt q + 1/sqrt q)^2 = q + 2 + 1/q
    let gap = qf + T::lit(2.0) + qf.recip() - x * x;
    (qf + T::one()) / (T::PI() * gap)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Density {
    SatoTate,
    /// Unramified Plancherel density at a place of residue norm `q`.
    Plancherel { q: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureOnInterval<T> {
    pub density: Density,
    pub tolerance: T,
}

impl<T: Real> MeasureOnInterval<T> {
    pub fn sato_tate() -> Self {
        MeasureOnInterval { density: Density::SatoTate, tolerance: T::lit(1e-8) }
    }

    pub fn plancherel(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::invalid("q", "prime norm must be at least 2"));
        }
        Ok(MeasureOnInterval { density: Density::Plancherel { q }, tolerance: T::lit(1e-8) })
    }

    pub fn with_tolerance(mut self, tolerance: T) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn label(&self) -> String {
        match self.density {
            Density::SatoTate => "sato-tate".into(),
            Density::Plancherel { q } => format!("plancherel(q={q})"),
        }
    }

    pub fn density_at(&self, x: T) -> Result<T> {
        match self.density {
            Density::SatoTate => st_density(x),
            Density::Plancherel { q } => serre_density(q, x),
        }
    }

    fn weight(&self, x: T) -> T {
        match self.density {
            Density::SatoTate => T::FRAC_1_PI(),
            Density::Plancherel { q } => serre_weight(q, x),
        }
    }

    /// `int test(x) dmu(x)` over `[-2, 2]` with `x = 2 sin(theta)`, which
    /// turns `sqrt(1 - x^2/4) dx` into the smooth `2 cos^2(theta) dtheta`.
    pub fn integrate<F: Fn(T) -> T>(&self, test: F) -> Result<T> {
        let two = T::lit(2.0);
        let cfg = QuadratureConfig { tolerance: self.tolerance, max_subdivisions: 4000 };
        let q = gauss_kronrod(
            |theta: T| {
                let x = two * theta.sin();
                let c = theta.cos();
                test(x) * self.weight(x) * two * c * c
            },
            -T::FRAC_PI_2(),
            T::FRAC_PI_2(),
            &cfg,
        )?;
        Ok(q.value)
    }
}

/// Total mass of the unramified Plancherel density; equals 1.
pub fn spherical_mass<T: Real>(q: u64, tolerance: T) -> Result<T> {
    MeasureOnInterval::plancherel(q)?.with_tolerance(tolerance).integrate(|_| T::one())
}

/// Test functions on `[-2, 2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TestFunction {
    /// `x^m`, `m <= 8`.
    Monomial(u32),
    /// Piecewise-linear interpolation of `(x, y)` nodes sorted by `x`.
    Tabulated { label: String, nodes: Vec<(f64, f64)> },
}

impl TestFunction {
    pub fn monomial(m: u32) -> Result<Self> {
        if m > 8 {
            return Err(Error::invalid("tests", format!("monomial degree {m} exceeds 8")));
        }
        Ok(TestFunction::Monomial(m))
    }

    pub fn tabulated(label: impl Into<String>, nodes: Vec<(f64, f64)>) -> Result<Self> {
        if nodes.len() < 2 || nodes.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::invalid("tests", "tabulated nodes must be strictly increasing in x"));
        }
        if nodes[0].0 > -2.0 || nodes[nodes.len() - 1].0 < 2.0 {
            return Err(Error::invalid("tests", "tabulated nodes must cover [-2, 2]"));
        }
        Ok(TestFunction::Tabulated { label: label.into(), nodes })
    }

    pub fn eval<T: Real>(&self, x: T) -> T {
        match self {
            TestFunction::Monomial(m) => x.powi(*m as i32),
            TestFunction::Tabulated { nodes, .. } => {
                let xf = x.as_f64();
                let i = nodes.partition_point(|&(nx, _)| nx < xf).clamp(1, nodes.len() - 1);
                let ((x0, y0), (x1, y1)) = (nodes[i - 1], nodes[i]);
                T::lit(y0 + (y1 - y0) * (xf - x0) / (x1 - x0))
            }
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Monomial(m) => write!(f, "x{m}"),
            TestFunction::Tabulated { label, .. } => f.write_str(label),
        }
    }
}

impl FromStr for TestFunction {
    type Err = Error;
    /// `x0` ... `x8`, or `1` for the constant function.
    fn from_str(s: &str) -> Result<Self> {
        if s == "1" {
            return Ok(TestFunction::Monomial(0));
        }
        s.strip_prefix('x')
            .and_then(|m| m.parse().ok())
            .ok_or_else(|| Error::invalid("tests", format!("unknown test function `{s}`")))
            .and_then(Self::monomial)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub q: u64,
    pub test: String,
    pub value_q: f64,
    pub value_st: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Log-log slope of the error against `q`, per test; `None` when the
    /// errors are at quadrature noise level.
    pub decay: Vec<(String, Option<f64>)>,
}

impl ConvergenceTable {
    pub fn errors_for(&self, test: &str) -> Vec<(u64, f64)> {
        self.rows.iter().filter(|r| r.test == test).map(|r| (r.q, r.error)).collect()
    }

    /// Errors must decrease strictly in `q` for each listed test.
    pub fn check_decreasing(&self, tests: &[&str]) -> Result<()> {
        for t in tests {
            let errs = self.errors_for(t);
            if let Some(w) = errs.windows(2).find(|w| !(w[1].1 < w[0].1)) {
                return Err(Error::Contract(format!(
                    "{t}: error {:.3e} at q = {} does not decrease from {:.3e} at q = {}",
                    w[1].1, w[1].0, w[0].1, w[0].0
                )));
            }
        }
        Ok(())
    }
}

/// `|int f dmu_q - int f dmu_ST|` for every prime norm and test, with a
/// fitted decay exponent per test. Rows are ordered by `q`, then by test.
pub fn convergence_table(tests: &[TestFunction], primes: &[u64], tolerance: f64) -> Result<ConvergenceTable> {
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("primes", "prime norms must be distinct"));
    }
    let st = MeasureOnInterval::<f64>::sato_tate().with_tolerance(tolerance);
    let limits: Vec<f64> = tests.iter().map(|t| st.integrate(|x| t.eval(x))).collect::<Result<_>>()?;
    let rows: Vec<Vec<ConvergenceRow>> = sorted
        .par_iter()
        .map(|&q| {
            let m = MeasureOnInterval::<f64>::plancherel(q)?.with_tolerance(tolerance);
            tests
                .iter()
                .zip(&limits)
                .map(|(t, &value_st)| {
                    let value_q = m.integrate(|x| t.eval(x))?;
                    Ok(ConvergenceRow { q, test: t.to_string(), value_q, value_st, error: (value_q - value_st).abs() })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let rows: Vec<ConvergenceRow> = rows.into_iter().flatten().collect();
    let noise = 100.0 * tolerance;
    let decay = tests
        .iter()
        .map(|t| {
            let label = t.to_string();
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.test == label && r.error > noise)
                .map(|r| (r.q as f64, r.error))
                .collect();
            let slope = fit_growth(&pts).ok().map(|f| f.exponent);
            (label, slope)
        })
        .collect();
    Ok(ConvergenceTable { rows, decay })
}

/// Ramified part of the local mass: `zeta_q(1) / (zeta_q(2) zeta_q(4)) - 1`.
pub fn ramified_defect<T: Real>(q: u64) -> Result<T> {
    Ok(finite_split_integral(q, T::lit(2.0))? - T::one())
}

/// [`ramified_defect`] in exact arithmetic.
pub fn ramified_defect_exact<E: ExactField>(q: u64) -> Result<E> {
    Ok(finite_split_integral_exact::<E>(q, 2)? - E::one())
}

/// Semicircle moment `int x^m dmu_ST`: Catalan numbers for even `m`.
pub fn catalan(n: u64) -> u64 {
    (0..n).fold(1u64, |c, i| c * 2 * (2 * i + 1) / (i + 2))
}
