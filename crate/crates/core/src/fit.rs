//! Least-squares line and power-law fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Real};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Largest absolute residual `|y - (intercept + slope x)|`.
    pub max_residual: T,
}

/// Ordinary least squares `y ~ intercept + slope * x`.
pub fn linear_fit<T: Real>(xs: &[T], ys: &[T]) -> Result<LineFit<T>> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "linear fit needs two or more paired points, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = T::from_usize(xs.len()).unwrap();
    let mean = |v: &[T]| v.iter().copied().collect::<CompensatedSum<T>>().value() / n;
    let (mx, my) = (mean(xs), mean(ys));
    let sxx = xs.iter().map(|&x| (x - mx) * (x - mx)).collect::<CompensatedSum<T>>().value();
    let sxy = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (x - mx) * (y - my))
        .collect::<CompensatedSum<T>>()
        .value();
    if !(sxx > T::zero()) {
        return Err(Error::InsufficientData("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (y - intercept - slope * x).abs())
        .fold(T::zero(), T::max);
    Ok(LineFit { slope, intercept, max_residual })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit<T> {
    pub exponent: T,
    pub constant: T,
    /// Largest absolute residual in log space.
    pub max_log_residual: T,
}

/// Fits `count ~ constant * Q^exponent` by least squares in log-log space.
pub fn fit_growth<T: Real>(points: &[(T, T)]) -> Result<GrowthFit<T>> {
    if points.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "growth fit needs at least 5 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(q, c)| !(q > T::zero() && c > T::zero())) {
        return Err(Error::InsufficientData("growth fit needs positive Q and counts".into()));
    }
    let xs: Vec<T> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<T> = points.iter().map(|p| p.1.ln()).collect();
    let line = linear_fit(&xs, &ys)?;
    Ok(GrowthFit {
        exponent: line.slope,
        constant: line.intercept.exp(),
        max_log_residual: line.max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = (0..8).map(|i| {
            let q = 10f64.powf(1.0 + 0.5 * i as f64);
            (q, 3.0 * q * q)
        }).collect();
        let fit = fit_growth(&pts).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-12);
        assert!((fit.constant - 3.0).abs() < 1e-9);
        assert!(fit.max_log_residual < 1e-12);
    }

    #[test]
    fn single_precision_line() {
        let xs = [0.0f32, 1.0, 2.0, 3.0];
        let ys = [1.0f32, 3.0, 5.0, 7.0];
        let l = linear_fit(&xs, &ys).unwrap();
        assert!((l.slope - 2.0).abs() < 1e-6 && (l.intercept - 1.0).abs() < 1e-6);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_growth(&[(1.0f64, 1.0); 4]).is_err());
        assert!(fit_growth(&[(1.0f64, 0.0), (2.0, 1.0), (3.0, 1.0), (4.0, 1.0), (5.0, 1.0)]).is_err());
        assert!(linear_fit(&[1.0f64, 1.0], &[0.0, 1.0]).is_err());
    }
}
