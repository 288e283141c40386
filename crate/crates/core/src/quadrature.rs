//! Adaptive Gauss-Kronrod quadrature and slowly decaying series.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig<T> {
    /// Absolute error target.
    pub tolerance: T,
    pub max_subdivisions: usize,
}

impl<T: Real> Default for QuadratureConfig<T> {
    fn default() -> Self {
        QuadratureConfig { tolerance: T::lit(1e-8), max_subdivisions: 2000 }
    }
}

impl<T: Real> QuadratureConfig<T> {
    pub fn with_tolerance(tolerance: T) -> Self {
        QuadratureConfig { tolerance, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quadrature<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Panel<T> {}
impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}

fn kronrod_panel<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Panel<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let h = half * (b - a);
    let fc = f(center);
    let mut gauss = fc * T::lit(WG[3]);
    let mut kronrod = fc * T::lit(WGK[7]);
    for j in 0..7 {
        let dx = h * T::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[j / 2]);
        }
    }
    let value = kronrod * h;
    let error = ((kronrod - gauss) * h).abs();
    Panel { a, b, value, error }
}

/// Globally adaptive G7-K15 integration of `f` over `[a, b]`.
pub fn integrate<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    config: &QuadratureConfig<T>,
) -> Result<Quadrature<T>> {
    if a == b {
        return Ok(Quadrature { value: T::zero(), error: T::zero(), intervals: 0 });
    }
    let mut heap = BinaryHeap::new();
    heap.push(kronrod_panel(&f, a, b));
    let total_error = |h: &BinaryHeap<Panel<T>>| h.iter().map(|p| p.error).collect::<CompensatedSum<T>>().value();
    loop {
        let err = total_error(&heap);
        if !err.is_finite() {
            return Err(Error::Quadrature { tolerance: config.tolerance.as_f64(), achieved: f64::INFINITY });
        }
        if err <= config.tolerance {
            break;
        }
        if heap.len() >= config.max_subdivisions {
            return Err(Error::Quadrature {
                tolerance: config.tolerance.as_f64(),
                achieved: err.as_f64(),
            });
        }
        let worst = heap.pop().expect("non-empty");
        let mid = T::lit(0.5) * (worst.a + worst.b);
        heap.push(kronrod_panel(&f, worst.a, mid));
        heap.push(kronrod_panel(&f, mid, worst.b));
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal));
    let value = panels.iter().map(|p| p.value).collect::<CompensatedSum<T>>().value();
    let error = panels.iter().map(|p| p.error).collect::<CompensatedSum<T>>().value();
    Ok(Quadrature { value, error, intervals: panels.len() })
}

/// `int_a^inf f(x) dx` for `a > 0` via `x = a / t`.
pub fn integrate_to_infinity<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    config: &QuadratureConfig<T>,
) -> Result<Quadrature<T>> {
    if !(a > T::zero()) {
        return Err(Error::invalid("a", "lower limit must be positive"));
    }
    integrate(
        |t: T| {
            if t <= T::zero() {
                T::zero()
            } else {
                f(a / t) * a / (t * t)
            }
        },
        T::zero(),
        T::one(),
        config,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesSum<T> {
    /// Partial sum plus the estimated tail.
    pub value: T,
    /// Bound on `|true sum - value|`.
    pub error: T,
    pub partial: T,
}

/// `sum_{n >= 0} term(n)` truncated after `n_max`.
///
/// `density(x)` must interpolate the terms, `term(n) = density(n)`, and be
/// positive, decreasing and convex for `x >= n_max`. Then
/// `int_{n_max+1}^inf density <= tail <= int_{n_max+1/2}^inf density`, and the
/// tail is taken as the midpoint of that bracket.
pub fn series_with_tail<T: Real, F: Fn(T) -> T>(
    density: F,
    n_max: u64,
    config: &QuadratureConfig<T>,
) -> Result<SeriesSum<T>> {
    let partial = (0..=n_max)
        .map(|n| density(T::from_u(n)))
        .collect::<CompensatedSum<T>>()
        .value();
    let start = T::from_u(n_max);
    let lower_from = start + T::one();
    let upper_from = start + T::lit(0.5);
    let quad_cfg = QuadratureConfig { tolerance: config.tolerance * T::lit(0.01), ..*config };
    let lower = integrate_to_infinity(&density, lower_from, &quad_cfg)?;
    let gap = integrate(&density, upper_from, lower_from, &quad_cfg)?;
    let upper_value = lower.value + gap.value;
    let half = T::lit(0.5);
    let value = partial + half * (lower.value + upper_value);
    let error = half * gap.value.abs() + lower.error + gap.error;
    Ok(SeriesSum { value, error, partial })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_exact() {
        let cfg = QuadratureConfig::default();
        let q = integrate(|x: f64| x.powi(6) - 3.0 * x, -1.0, 2.0, &cfg).unwrap();
        assert!((q.value - (128.0 + 1.0) / 7.0 + 4.5).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_needs_subdivision() {
        let cfg = QuadratureConfig::with_tolerance(1e-10);
        let q = integrate(|x: f64| (20.0 * x).sin(), 0.0, 1.0, &cfg).unwrap();
        assert!((q.value - (1.0 - 20f64.cos()) / 20.0).abs() < 1e-10);
        assert!(q.intervals > 1);
    }

    #[test]
    fn infinite_interval() {
        let cfg = QuadratureConfig::with_tolerance(1e-12);
        let q = integrate_to_infinity(|x: f64| 1.0 / (1.0 + x * x), 1.0, &cfg).unwrap();
        assert!((q.value - std::f64::consts::FRAC_PI_4).abs() < 1e-11);
    }

    #[test]
    fn tolerance_failure_reported() {
        let cfg = QuadratureConfig { tolerance: 1e-14, max_subdivisions: 4 };
        let r = integrate(|x: f64| x.abs().sqrt(), -1.0, 1.0, &cfg);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn basel_series_with_tail() {
        let cfg = QuadratureConfig::default();
        let s = series_with_tail(|x: f64| 1.0 / ((x + 1.0) * (x + 1.0)), 1000, &cfg).unwrap();
        let truth = std::f64::consts::PI.powi(2) / 6.0;
        assert!((s.value - truth).abs() <= s.error);
        assert!(s.error < 1e-6);
        assert!((s.partial - truth).abs() > 1e-4);
    }

    #[test]
    fn single_precision_integration() {
        let cfg = QuadratureConfig::with_tolerance(1e-5f32);
        let q = integrate(|x: f32| x.exp(), 0.0, 1.0, &cfg).unwrap();
        assert!((q.value - (std::f32::consts::E - 1.0)).abs() < 1e-5);
    }
}
