//! Local Plancherel masses weighted by `c(pi)^{-s}`, their regularized global
//! product and the leading constant of the counting law.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{NumberFieldSpec, PrimeIdeal};
use crate::primes::is_prime;
use crate::quadrature::{integrate, series_with_tail, QuadratureConfig};
use crate::scalar::{CompensatedSum, ExactField, Real};

/// Tightest quadrature tolerance ever requested from the integrator.
pub const QUADRATURE_FLOOR: f64 = 1e-10;

/// `zeta_q(s) = (1 - q^{-s})^{-1}`.
pub fn local_zeta_factor<T: Real>(q: u64, s: T) -> Result<T> {
    if !(s > T::zero()) {
        return Err(Error::invalid("s", "local zeta factor needs s > 0"));
    }
    if q < 2 {
        return Err(Error::invalid("q", "prime norm must be at least 2"));
    }
    Ok(T::one() / (T::one() - T::from_u(q).powf(-s)))
}

/// `zeta_q(s)` at an integer `s >= 1`, exactly when `E` is a rational type.
pub fn local_zeta_factor_exact<E: ExactField>(q: u64, s: i32) -> Result<E> {
    if s <= 0 {
        return Err(Error::invalid("s", "local zeta factor needs s > 0"));
    }
    let qs = E::from_u64(q).ok_or(Error::Overflow("local zeta factor"))?.pow(s);
    Ok(qs.clone() / (qs - E::one()))
}

/// `int dpi / c(pi)^s` over a split finite place:
/// `zeta_q(s-1) / (zeta_q(s) zeta_q(2s))`.
pub fn finite_split_integral<T: Real>(q: u64, s: T) -> Result<T> {
    if !(s > T::one()) {
        return Err(Error::invalid("s", "finite local integral needs s > 1"));
    }
    let two = T::lit(2.0);
    Ok(local_zeta_factor(q, s - T::one())? / (local_zeta_factor(q, s)? * local_zeta_factor(q, two * s)?))
}

/// [`finite_split_integral`] at an integer `s >= 2`, exactly.
pub fn finite_split_integral_exact<E: ExactField>(q: u64, s: i32) -> Result<E> {
    if s < 2 {
        return Err(Error::invalid("s", "finite local integral needs s > 1"));
    }
    Ok(local_zeta_factor_exact::<E>(q, s - 1)?
        / (local_zeta_factor_exact::<E>(q, s)? * local_zeta_factor_exact::<E>(q, 2 * s)?))
}

/// Scales of the split real Plancherel measure, which is only determined
/// up to constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchNormalization<T> {
    pub c_even: T,
    pub c_odd: T,
    pub c_ds: T,
}

impl<T: Real> Default for ArchNormalization<T> {
    fn default() -> Self {
        let c = T::one() / (T::lit(4.0) * T::PI());
        ArchNormalization { c_even: c, c_odd: c, c_ds: c }
    }
}

impl<T: Real> ArchNormalization<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, c) in [("c_even", self.c_even), ("c_odd", self.c_odd), ("c_ds", self.c_ds)] {
            if !(c >= T::zero() && c.is_finite()) {
                return Err(Error::invalid(name, "normalization scales must be finite and nonnegative"));
            }
        }
        Ok(())
    }
}

/// Truncation settings shared by the mass computations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub p_max: u64,
    /// Discrete-series terms kept before the tail estimate.
    pub r_max: u64,
    /// Compact-place terms kept before the tail estimate.
    pub n_max: u64,
    pub quad_tolerance: f64,
    /// Upper limit of the principal-series quadrature.
    pub cutoff: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { p_max: 100_000, r_max: 1000, n_max: 1000, quad_tolerance: 1e-8, cutoff: 1000.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassReport<T> {
    /// Truncated value: finite Euler product or partial sums.
    pub value: T,
    /// Bound on the distance from `value` to the untruncated mass.
    pub truncation_error: T,
    /// Value with the estimated tail added back.
    pub refined: T,
    /// Bound on the distance from `refined` to the untruncated mass.
    pub refined_error: T,
    pub s: f64,
    pub truncation: Truncation,
}

impl<T: Real> MassReport<T> {
    fn exact(value: T, s: T, truncation: Truncation) -> Self {
        MassReport {
            value,
            truncation_error: T::zero(),
            refined: value,
            refined_error: T::zero(),
            s: s.as_f64(),
            truncation,
        }
    }

    fn scaled(&self, c: T) -> Self {
        MassReport {
            value: c * self.value,
            truncation_error: c * self.truncation_error,
            refined: c * self.refined,
            refined_error: c * self.refined_error,
            ..*self
        }
    }

    fn plus(&self, other: &Self) -> Self {
        MassReport {
            value: self.value + other.value,
            truncation_error: self.truncation_error + other.truncation_error,
            refined: self.refined + other.refined,
            refined_error: self.refined_error + other.refined_error,
            ..*self
        }
    }
}

fn quad_config<T: Real>(t: &Truncation) -> QuadratureConfig<T> {
    QuadratureConfig::with_tolerance(T::lit(t.quad_tolerance.max(QUADRATURE_FLOOR)))
}

/// `r coth(pi r / 2)`, with the removable singularity at 0 patched by its series.
fn r_coth<T: Real>(r: T) -> T {
    let x = T::FRAC_PI_2() * r;
    if x.abs() < T::lit(1e-4) {
        let x2 = x * x;
        (T::one() / T::FRAC_PI_2()) * (T::one() + x2 / T::lit(3.0) - x2 * x2 / T::lit(45.0))
    } else {
        r / x.tanh()
    }
}

/// `int_0^cutoff r w(r) (1 + r^2)^{-s} dr` plus the tail over `[cutoff, inf)`,
/// where `w` is `tanh` or `coth` of `pi r / 2` and lies between `w(cutoff)`
/// and 1 on the tail.
fn principal_series_part<T: Real>(s: T, odd: bool, t: &Truncation) -> Result<MassReport<T>> {
    let cfg = quad_config::<T>(t);
    let cutoff = T::lit(t.cutoff);
    let integrand = |r: T| {
        let w = if odd { r_coth(r) } else { r * (T::FRAC_PI_2() * r).tanh() };
        w * (T::one() + r * r).powf(-s)
    };
    let body = integrate(integrand, T::zero(), cutoff, &cfg)?;
    // int_R^inf r (1 + r^2)^{-s} dr
    let base = (T::one() + cutoff * cutoff).powf(T::one() - s) / (T::lit(2.0) * (s - T::one()));
    let edge = (T::FRAC_PI_2() * cutoff).tanh();
    let (lo, hi) = if odd { (base, base / edge) } else { (base * edge, base) };
    let half = T::lit(0.5);
    Ok(MassReport {
        value: body.value,
        truncation_error: hi + body.error,
        refined: body.value + half * (lo + hi),
        refined_error: half * (hi - lo) + body.error,
        s: s.as_f64(),
        truncation: *t,
    })
}

/// `sum_{k >= 2 even} (k - 1) (1 + k^2)^{-s}`.
fn discrete_series_part<T: Real>(s: T, t: &Truncation) -> Result<MassReport<T>> {
    let two = T::lit(2.0);
    let density = |x: T| {
        let k = two * x + two;
        (k - T::one()) * (T::one() + k * k).powf(-s)
    };
    let series = series_with_tail(density, t.r_max, &quad_config::<T>(t))?;
    // (k - 1)(1 + k^2)^{-s} <= k^{1-2s}; sum over k > K even <= K^{2-2s} / (2(2s-2))
    let k_last = two * T::from_u(t.r_max) + two;
    let bound = k_last.powf(two - two * s) / (two * (two * s - two));
    Ok(MassReport {
        value: series.partial,
        truncation_error: bound,
        refined: series.value,
        refined_error: series.error,
        s: s.as_f64(),
        truncation: *t,
    })
}

/// Mass of the split real place:
/// `c_even int r tanh(pi r/2) (1+r^2)^{-s} dr + c_odd int r coth(pi r/2) (1+r^2)^{-s} dr
///  + c_ds sum_{k even} (k-1) (1+k^2)^{-s}`.
pub fn real_split_integral<T: Real>(
    s: T,
    norm: &ArchNormalization<T>,
    truncation: &Truncation,
) -> Result<MassReport<T>> {
    if !(s > T::one()) {
        return Err(Error::NonConvergent(format!("real place mass needs s > 1, got {}", s.as_f64())));
    }
    if !(truncation.cutoff > 0.0) {
        return Err(Error::invalid("cutoff", "must be positive"));
    }
    norm.validate()?;
    let mut total = MassReport::exact(T::zero(), s, *truncation);
    if norm.c_even > T::zero() {
        total = total.plus(&principal_series_part(s, false, truncation)?.scaled(norm.c_even));
    }
    if norm.c_odd > T::zero() {
        total = total.plus(&principal_series_part(s, true, truncation)?.scaled(norm.c_odd));
    }
    if norm.c_ds > T::zero() {
        total = total.plus(&discrete_series_part(s, truncation)?.scaled(norm.c_ds));
    }
    Ok(total)
}

/// Mass of a compact real place: `sum_{n=0}^{n_max} (2n+1)^2 (1 + (2n+2)^2)^{-s}`,
/// with the tail bounded by comparison with `int (2x+2)^{2-2s}`.
pub fn compact_place_sum<T: Real>(s: T, truncation: &Truncation) -> Result<MassReport<T>> {
    if !(s > T::lit(1.5)) {
        return Err(Error::NonConvergent(format!("compact place sum needs s > 3/2, got {}", s.as_f64())));
    }
    let two = T::lit(2.0);
    let density = |x: T| {
        let d = two * x + T::one();
        d * d * (T::one() + (d + T::one()).powi(2)).powf(-s)
    };
    let series = series_with_tail(density, truncation.n_max, &quad_config::<T>(truncation))?;
    let u = two * T::from_u(truncation.n_max) + two;
    let bound = u.powf(T::lit(3.0) - two * s) / (two * (two * s - T::lit(3.0)));
    Ok(MassReport {
        value: series.partial,
        truncation_error: bound,
        refined: series.value,
        refined_error: series.error,
        s: s.as_f64(),
        truncation: *truncation,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RealPlace {
    /// `PGL(2, R)`: principal and discrete series.
    Split,
    /// Compact form at a ramified real place.
    Compact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ArchConfig<T> {
    /// Finite places only.
    FiniteOnly,
    /// One entry per real place of the field.
    Places { places: Vec<RealPlace>, normalization: ArchNormalization<T> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalMassConfig<T> {
    /// Rational primes below the ramified finite places.
    pub ramified: Vec<u64>,
    pub arch: ArchConfig<T>,
    /// Plancherel weight of the Steinberg-type stratum at ramified primes.
    pub ramified_weight: T,
    pub truncation: Truncation,
}

impl<T: Real> Default for GlobalMassConfig<T> {
    fn default() -> Self {
        GlobalMassConfig {
            ramified: Vec::new(),
            arch: ArchConfig::FiniteOnly,
            ramified_weight: T::one(),
            truncation: Truncation::default(),
        }
    }
}

type Factor<T> = (T, T, T, T);

const EULER_CHUNK: usize = 4096;

/// `log prod_{N q <= p_max, q unramified} (1 - Nq^{-s})(1 - Nq^{-2s})`,
/// reduced in fixed chunks so the result does not depend on thread count.
fn log_euler_product<T: Real>(norms: &[u64], s: T) -> T {
    let chunk_sums: Vec<T> = norms
        .par_chunks(EULER_CHUNK)
        .map(|chunk| {
            chunk
                .iter()
                .map(|&q| {
                    let x = T::from_u(q).powf(-s);
                    (-x).ln_1p() + (-x * x).ln_1p()
                })
                .collect::<CompensatedSum<T>>()
                .value()
        })
        .collect();
    crate::scalar::compensated_sum(&chunk_sums)
}

/// `||mu|| = zeta^*(1) prod_q [zeta_q(s) zeta_q(2s)]^{-1} prod_ram (1 + w q^{-s})
/// prod_inf (local masses)`.
pub fn regularized_global_mass<T: Real>(
    field: &NumberFieldSpec,
    config: &GlobalMassConfig<T>,
    s: T,
) -> Result<MassReport<T>> {
    let t = config.truncation;
    if !(s > T::one()) {
        return Err(Error::NonConvergent(format!("global mass needs s > 1, got {}", s.as_f64())));
    }
    if t.p_max < 100 {
        return Err(Error::invalid("pmax", "must be at least 100"));
    }
    if let Some(&p) = config.ramified.iter().find(|&&p| !is_prime(p)) {
        return Err(Error::NotPrime(p));
    }
    let residue = field.residue_at_1.ok_or_else(|| Error::MissingResidue(field.to_string()))?;

    let primes = field.prime_ideals_up_to(t.p_max as f64);
    let (ramified, split): (Vec<&PrimeIdeal>, Vec<&PrimeIdeal>) =
        primes.iter().partition(|q| config.ramified.contains(&q.p));
    let split_norms: Vec<u64> = split.iter().map(|q| q.norm).collect();
    let finite = log_euler_product(&split_norms, s).exp();
    let p = T::from_u(t.p_max);
    let d = T::from_u(field.degree as u64);
    let tail_log = T::lit(2.0) * d * p.powf(T::one() - s) / ((s - T::one()) * (T::one() - p.powf(-s)));
    let finite_err = finite * (T::one() - (-tail_log).exp());

    // (factor, truncation error, refined, refined error)
    let mut factors: Vec<Factor<T>> = vec![
        (T::lit(residue), T::zero(), T::lit(residue), T::zero()),
        (finite, finite_err, finite, finite_err),
    ];
    // ramified primes above the truncation point still contribute
    let mut ramified_norms: Vec<u64> = ramified.iter().map(|q| q.norm).collect();
    for &p in &config.ramified {
        if p > t.p_max {
            ramified_norms.extend(field.split_prime(p)?.iter().map(|q| q.norm));
        }
    }
    for q in ramified_norms {
        let v = T::one() + config.ramified_weight * T::from_u(q).powf(-s);
        factors.push((v, T::zero(), v, T::zero()));
    }
    if let ArchConfig::Places { places, normalization } = &config.arch {
        if field.signature.1 > 0 {
            return Err(Error::UnsupportedField(format!("{field}: complex places have no mass model")));
        }
        if places.len() != field.signature.0 as usize {
            return Err(Error::invalid(
                "arch",
                format!("{field} has {} real places, {} configured", field.signature.0, places.len()),
            ));
        }
        for place in places {
            let m = match place {
                RealPlace::Split => real_split_integral(s, normalization, &t)?,
                RealPlace::Compact => compact_place_sum(s, &t)?,
            };
            factors.push((m.value, m.truncation_error, m.refined, m.refined_error));
        }
    }

    let product = |pick: fn(&Factor<T>) -> T| factors.iter().map(pick).fold(T::one(), |a, b| a * b);
    let value = product(|f| f.0);
    let refined = product(|f| f.2);
    let value_err = product(|f| f.0.abs() + f.1) - value.abs();
    let refined_err = product(|f| f.2.abs() + f.3) - refined.abs();
    Ok(MassReport {
        value,
        truncation_error: value_err.max(T::zero()),
        refined,
        refined_error: refined_err.max(T::zero()),
        s: s.as_f64(),
        truncation: t,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeadingConstant<T> {
    pub value: T,
    pub error: T,
}

/// `C = vol / 2 * ||mu||`, propagating the mass error linearly.
pub fn leading_constant<T: Real>(volume: T, mass: &MassReport<T>) -> Result<LeadingConstant<T>> {
    if !(volume > T::zero()) {
        return Err(Error::invalid("volume", "must be positive"));
    }
    let half = T::lit(0.5) * volume;
    Ok(LeadingConstant { value: half * mass.value, error: half * mass.truncation_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplicative::MultiplicativeFunction;
    use num_rational::Ratio;

    #[test]
    fn local_zeta_examples() {
        assert!((local_zeta_factor(2, 2.0f64).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(local_zeta_factor(2, 1.0f64).unwrap(), 2.0);
        assert!((local_zeta_factor(9, 2.0f64).unwrap() - 81.0 / 80.0).abs() < 1e-15);
        assert_eq!(local_zeta_factor_exact::<Ratio<i128>>(9, 2).unwrap(), Ratio::new(81, 80));
        assert!(local_zeta_factor(2, 0.0f64).is_err());
        assert!(local_zeta_factor(2, -1.0f64).is_err());
    }

    #[test]
    fn finite_split_examples() {
        assert_eq!(finite_split_integral_exact::<Ratio<i128>>(2, 2).unwrap(), Ratio::new(45, 32));
        assert!((finite_split_integral(2, 2.0f64).unwrap() - 1.40625).abs() < 1e-15);
        let v3 = finite_split_integral(3, 2.0f64).unwrap();
        assert!((v3 - 1.5 / (1.125 * 1.0125)).abs() < 1e-12);
        let series = MultiplicativeFunction::conductor_slice_mass()
            .local_dirichlet_series(3, 2.0f64, 60)
            .unwrap();
        assert!((series.value - v3).abs() < 1e-12);
        for q in crate::primes::primes_up_to(2000).into_iter().filter(|&q| q >= 11) {
            let v = finite_split_integral(q, 2.0f64).unwrap();
            assert!(v - 1.0 <= 2.0 / q as f64);
        }
        assert!(finite_split_integral(2, 1.0f64).is_err());
        assert!(finite_split_integral_exact::<Ratio<i128>>(2, 1).is_err());
    }

    #[test]
    fn finite_split_decreasing_in_s() {
        for q in [2u64, 3, 5, 49] {
            let vals: Vec<f64> = (0..=25).map(|i| finite_split_integral(q, 1.5 + 0.1 * i as f64).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn discrete_series_alone() {
        let norm = ArchNormalization { c_even: 0.0, c_odd: 0.0, c_ds: 1.0 };
        let t = Truncation::default();
        let m = real_split_integral(2.0f64, &norm, &t).unwrap();
        let direct: f64 = (1..=2_000_000u64).map(|h| {
            let k = (2 * h) as f64;
            (k - 1.0) / (1.0 + k * k).powi(2)
        }).sum();
        assert!((m.value - direct).abs() <= m.truncation_error);
        assert!((m.refined - direct).abs() < 1e-9);
        assert!((m.refined - 0.058_482_84).abs() < 1e-8);
    }

    #[test]
    fn zero_scales_give_zero() {
        let norm = ArchNormalization { c_even: 0.0, c_odd: 0.0, c_ds: 0.0 };
        let m = real_split_integral(2.0f64, &norm, &Truncation::default()).unwrap();
        assert_eq!((m.value, m.truncation_error), (0.0, 0.0));
        assert!(real_split_integral(1.0f64, &norm, &Truncation::default()).is_err());
        let neg = ArchNormalization { c_even: -1.0, c_odd: 0.0, c_ds: 0.0 };
        assert!(real_split_integral(2.0f64, &neg, &Truncation::default()).is_err());
    }

    #[test]
    fn real_mass_decreases_in_s() {
        let norm = ArchNormalization::default();
        let t = Truncation::default();
        let a = real_split_integral(2.0f64, &norm, &t).unwrap();
        let b = real_split_integral(3.0f64, &norm, &t).unwrap();
        assert!(b.value < a.value);
    }

    #[test]
    fn coth_patch_is_continuous() {
        let r = 0.5e-4 / std::f64::consts::FRAC_PI_2;
        let patched = r_coth(r);
        let direct = r / (std::f64::consts::FRAC_PI_2 * r).tanh();
        assert!((patched - direct).abs() < 1e-12);
        assert!((r_coth(0.0f64) - 2.0 / std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn principal_series_against_closed_form() {
        // with tanh replaced by 1 the even integral is 1/(2(s-1)); check the
        // coth - tanh difference is what separates the two parities
        let t = Truncation { cutoff: 50.0, ..Truncation::default() };
        let even = principal_series_part(2.0f64, false, &t).unwrap();
        let odd = principal_series_part(2.0f64, true, &t).unwrap();
        assert!(even.refined < 0.5 && odd.refined > 0.5);
        let diff = integrate(
            |r: f64| (r_coth(r) - r * (std::f64::consts::FRAC_PI_2 * r).tanh()) / (1.0 + r * r).powi(2),
            0.0,
            60.0,
            &QuadratureConfig::with_tolerance(1e-12),
        )
        .unwrap();
        assert!((odd.refined - even.refined - diff.value).abs() < 1e-8);
    }

    #[test]
    fn compact_place_examples() {
        let t0 = Truncation { n_max: 0, ..Truncation::default() };
        assert!((compact_place_sum(2.0f64, &t0).unwrap().value - 0.04).abs() < 1e-15);
        assert!((compact_place_sum(3.0f64, &t0).unwrap().value - 1.0 / 125.0).abs() < 1e-15);
        let t = Truncation { n_max: 10_000, ..Truncation::default() };
        let m = compact_place_sum(2.0f64, &t).unwrap();
        assert!(m.refined_error < 1e-6);
        let longer = Truncation { n_max: 1_000_000, ..Truncation::default() };
        let reference = compact_place_sum(2.0f64, &longer).unwrap();
        assert!((m.refined - reference.refined).abs() < 1e-6);
        assert!((m.value - reference.refined).abs() <= m.truncation_error);
        assert!(compact_place_sum(1.5f64, &t).is_err());
    }

    #[test]
    fn global_mass_of_rationals() {
        let q = NumberFieldSpec::rationals();
        let target = 90.0 / std::f64::consts::PI.powi(4) * 6.0 / std::f64::consts::PI.powi(2);
        let cfg = GlobalMassConfig::<f64> {
            truncation: Truncation { p_max: 1_000_000, ..Truncation::default() },
            ..GlobalMassConfig::default()
        };
        let m = regularized_global_mass(&q, &cfg, 2.0).unwrap();
        assert!((m.value - target).abs() <= m.truncation_error);
        assert!((m.value - 540.0 / std::f64::consts::PI.powi(6)).abs() < 1e-6);
    }

    #[test]
    fn euler_tail_shrinks_and_doubling_is_small() {
        let q = NumberFieldSpec::rationals();
        let at = |p_max| {
            let cfg = GlobalMassConfig::<f64> {
                truncation: Truncation { p_max, ..Truncation::default() },
                ..GlobalMassConfig::default()
            };
            regularized_global_mass(&q, &cfg, 2.0).unwrap()
        };
        let (a, b) = (at(1000), at(2000));
        assert!(((a.value - b.value) / b.value).abs() < 1e-3);
        assert!(b.truncation_error < a.truncation_error);
    }

    #[test]
    fn global_mass_errors_and_zero_scale() {
        let g: NumberFieldSpec = "Q(sqrt,-1)".parse().unwrap();
        let cfg = GlobalMassConfig::<f64>::default();
        assert!(matches!(regularized_global_mass(&g, &cfg, 2.0), Err(Error::MissingResidue(_))));
        let q = NumberFieldSpec::rationals();
        let zero = GlobalMassConfig::<f64> {
            arch: ArchConfig::Places {
                places: vec![RealPlace::Split],
                normalization: ArchNormalization { c_even: 0.0, c_odd: 0.0, c_ds: 0.0 },
            },
            truncation: Truncation { p_max: 1000, ..Truncation::default() },
            ..GlobalMassConfig::default()
        };
        assert_eq!(regularized_global_mass(&q, &zero, 2.0).unwrap().value, 0.0);
        let two_places = GlobalMassConfig::<f64> {
            arch: ArchConfig::Places { places: vec![RealPlace::Split; 2], normalization: ArchNormalization::default() },
            ..GlobalMassConfig::default()
        };
        assert!(regularized_global_mass(&q, &two_places, 2.0).is_err());
        let low = GlobalMassConfig::<f64> {
            truncation: Truncation { p_max: 10, ..Truncation::default() },
            ..GlobalMassConfig::default()
        };
        assert!(regularized_global_mass(&q, &low, 2.0).is_err());
    }

    #[test]
    fn ramified_factor_multiplies_in() {
        let q = NumberFieldSpec::rationals();
        let base = GlobalMassConfig::<f64> {
            truncation: Truncation { p_max: 1000, ..Truncation::default() },
            ..GlobalMassConfig::default()
        };
        let ram = GlobalMassConfig { ramified: vec![2], ..base.clone() };
        let a = regularized_global_mass(&q, &base, 2.0).unwrap().value;
        let b = regularized_global_mass(&q, &ram, 2.0).unwrap().value;
        let removed = (1.0 - 0.25) * (1.0 - 1.0 / 16.0);
        assert!((b - a / removed * 1.25).abs() < 1e-12);
    }

    #[test]
    fn leading_constant_examples() {
        let t = Truncation::default();
        let one = MassReport { value: 1.0f64, truncation_error: 0.0, refined: 1.0, refined_error: 0.0, s: 2.0, truncation: t };
        assert_eq!(leading_constant(2.0, &one).unwrap().value, 1.0);
        let m = MassReport { value: 0.561522, truncation_error: 1e-4, ..one };
        let c = leading_constant(1.0, &m).unwrap();
        assert!((c.value - 0.280761).abs() < 1e-12);
        assert!((c.error - 0.5e-4).abs() < 1e-15);
        assert!(leading_constant(0.0, &m).is_err());
    }
}
