//! Multiplicative functions on ideals, given by their values on prime powers.
//!
//! A function is a closed expression over a fixed set of built-ins, explicit
//! local tables, Dirichlet convolutions and Dirichlet inverses. Local values
//! depend only on the prime norm `q` and the exponent `r`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{norm_bound, IdealFactorization, NumberFieldSpec, PrimeIdeal};
use crate::scalar::Real;

/// Values a local rule can be evaluated in: exact checked integers or floats.
pub trait LocalValue: Copy + Send + Sync + PartialEq + fmt::Debug {
    fn from_i64(v: i64) -> Self;
    fn checked_add(self, other: Self) -> Option<Self>;
    fn checked_mul(self, other: Self) -> Option<Self>;
    fn negate(self) -> Option<Self>;
    fn is_zero(self) -> bool;
}

impl LocalValue for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn checked_add(self, other: Self) -> Option<Self> {
        i128::checked_add(self, other)
    }
    fn checked_mul(self, other: Self) -> Option<Self> {
        i128::checked_mul(self, other)
    }
    fn negate(self) -> Option<Self> {
        self.checked_neg()
    }
    fn is_zero(self) -> bool {
        self == 0
    }
}

macro_rules! float_local_value {
    ($t:ty) => {
        impl LocalValue for $t {
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            fn checked_add(self, other: Self) -> Option<Self> {
                let s = self + other;
                s.is_finite().then_some(s)
            }
            fn checked_mul(self, other: Self) -> Option<Self> {
                let s = self * other;
                s.is_finite().then_some(s)
            }
            fn negate(self) -> Option<Self> {
                Some(-self)
            }
            fn is_zero(self) -> bool {
                self == 0.0
            }
        }
    };
}
float_local_value!(f32);
float_local_value!(f64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Builtin {
    /// Identity for convolution: 1 at the unit ideal, 0 elsewhere.
    Delta,
    /// The constant function 1.
    One,
    Mu,
    Mu2,
    Tau2,
    Lambda2,
    Phi2,
    Id,
}

impl Builtin {
    fn name(self) -> &'static str {
        match self {
            Builtin::Delta => "delta",
            Builtin::One => "one",
            Builtin::Mu => "mu",
            Builtin::Mu2 => "mu2",
            Builtin::Tau2 => "tau2",
            Builtin::Lambda2 => "lambda2",
            Builtin::Phi2 => "phi2",
            Builtin::Id => "id",
        }
    }

    fn value<V: LocalValue>(self, q: u64, r: u32) -> Option<V> {
        let int = |v: i64| Some(V::from_i64(v));
        if r == 0 {
            return int(1);
        }
        match self {
            Builtin::Delta => int(0),
            Builtin::One => int(1),
            Builtin::Mu => int(if r == 1 { -1 } else { 0 }),
            Builtin::Mu2 => int(if r == 1 { 1 } else { 0 }),
            Builtin::Tau2 => int(r as i64 + 1),
            Builtin::Lambda2 => int(match r {
                1 => -2,
                2 => 1,
                _ => 0,
            }),
            Builtin::Id => power(q, r),
            Builtin::Phi2 => power::<V>(q, r - 1)?.checked_mul(V::from_i64(q as i64 + 1)),
        }
    }
}

fn power<V: LocalValue>(q: u64, r: u32) -> Option<V> {
    let q = V::from_i64(i64::try_from(q).ok()?);
    (0..r).try_fold(V::from_i64(1), |acc, _| acc.checked_mul(q))
}

#[derive(Clone, Debug, PartialEq)]
enum Rule {
    Builtin(Builtin),
    /// `f(q, r) = values[r - 1]` for `r <= values.len()`, zero beyond.
    Table(Vec<i64>),
    Convolution(Arc<MultiplicativeFunction>, Arc<MultiplicativeFunction>),
    Inverse(Arc<MultiplicativeFunction>),
}

/// A multiplicative function on ideals, exact on prime powers.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicativeFunction {
    name: String,
    rule: Rule,
}

impl MultiplicativeFunction {
    pub fn builtin(b: Builtin) -> Self {
        MultiplicativeFunction { name: b.name().to_string(), rule: Rule::Builtin(b) }
    }

    pub fn delta() -> Self {
        Self::builtin(Builtin::Delta)
    }
    pub fn one() -> Self {
        Self::builtin(Builtin::One)
    }
    pub fn mu() -> Self {
        Self::builtin(Builtin::Mu)
    }
    pub fn mu2() -> Self {
        Self::builtin(Builtin::Mu2)
    }
    pub fn tau2() -> Self {
        Self::builtin(Builtin::Tau2)
    }
    pub fn lambda2() -> Self {
        Self::builtin(Builtin::Lambda2)
    }
    pub fn phi2() -> Self {
        Self::builtin(Builtin::Phi2)
    }
    pub fn id() -> Self {
        Self::builtin(Builtin::Id)
    }

    /// Plancherel mass of the local slices of exact conductor:
    /// `M = id * mu^2 * lambda_2`.
    pub fn conductor_slice_mass() -> Self {
        let m = Self::id()
            .convolve(&Self::mu2())
            .convolve(&Self::lambda2());
        m.named("M")
    }

    /// A function given by an explicit table of prime-power values, the same
    /// for every prime; exponents past the table map to zero.
    pub fn from_table(name: impl Into<String>, values: Vec<i64>) -> Self {
        MultiplicativeFunction { name: name.into(), rule: Rule::Table(values) }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn convolve(&self, other: &Self) -> Self {
        MultiplicativeFunction {
            name: format!("({} * {})", self.name, other.name),
            rule: Rule::Convolution(Arc::new(self.clone()), Arc::new(other.clone())),
        }
    }

    pub fn inverse(&self) -> Self {
        MultiplicativeFunction {
            name: format!("inv({})", self.name),
            rule: Rule::Inverse(Arc::new(self.clone())),
        }
    }

    /// Values `f(q, 0..=r_max)`.
    pub fn local_values<V: LocalValue>(&self, q: u64, r_max: u32) -> Result<Vec<V>> {
        let overflow = || Error::Overflow("local values");
        match &self.rule {
            Rule::Builtin(b) => (0..=r_max)
                .map(|r| b.value(q, r).ok_or_else(overflow))
                .collect(),
            Rule::Table(t) => Ok((0..=r_max as usize)
                .map(|r| match r {
                    0 => V::from_i64(1),
                    _ => V::from_i64(t.get(r - 1).copied().unwrap_or(0)),
                })
                .collect()),
            Rule::Convolution(f, g) => {
                let (a, b) = (f.local_values::<V>(q, r_max)?, g.local_values::<V>(q, r_max)?);
                (0..=r_max as usize)
                    .map(|r| {
                        (0..=r).try_fold(V::from_i64(0), |acc, j| {
                            a[j].checked_mul(b[r - j]).and_then(|t| acc.checked_add(t))
                        })
                        .ok_or_else(overflow)
                    })
                    .collect()
            }
            Rule::Inverse(f) => {
                let a = f.local_values::<V>(q, r_max)?;
                let mut g = Vec::with_capacity(r_max as usize + 1);
                g.push(V::from_i64(1));
                for r in 1..=r_max as usize {
                    let s = (1..=r)
                        .try_fold(V::from_i64(0), |acc, j| {
                            a[j].checked_mul(g[r - j]).and_then(|t| acc.checked_add(t))
                        })
                        .and_then(V::negate)
                        .ok_or_else(overflow)?;
                    g.push(s);
                }
                Ok(g)
            }
        }
    }

    /// `f(q^r)`, exactly.
    pub fn local(&self, q: u64, r: u32) -> Result<i128> {
        Ok(self.local_values::<i128>(q, r)?[r as usize])
    }

    /// Exact value at an ideal: the product of the local values.
    pub fn eval(&self, a: &IdealFactorization) -> Result<i128> {
        a.factors().iter().try_fold(1i128, |acc, (q, r)| {
            acc.checked_mul(self.local(q.norm, *r)?)
                .ok_or(Error::Overflow("eval"))
        })
    }

    /// `sum_{N a <= x} f(a)` over the integral ideals of `field`, exact.
    pub fn partial_sum(&self, field: &NumberFieldSpec, x: f64) -> Result<i128> {
        let bound = norm_bound(x);
        if bound == 0 {
            return Ok(0);
        }
        let primes = field.prime_ideals_up_to(bound as f64);
        let tables: Vec<Vec<i128>> = primes
            .par_iter()
            .map(|q| self.local_values::<i128>(q.norm, max_exponent(q.norm, bound)))
            .collect::<Result<_>>()?;
        let below = (0..primes.len())
            .into_par_iter()
            .map(|i| {
                let mut acc = SubtreeSum { total: 0, overflow: false };
                sum_subtree(&primes, &tables, i, 1, 1, bound, &mut acc);
                (!acc.overflow).then_some(acc.total)
            })
            .try_reduce(|| 0i128, |a, b| a.checked_add(b));
        below
            .and_then(|s| s.checked_add(1))
            .ok_or(Error::Overflow("partial_sum"))
    }

    /// Truncated local Dirichlet series `sum_{r <= r_max} f(q^r) q^{-rs}`
    /// with a geometric tail bound from the ratio of the last two terms.
    pub fn local_dirichlet_series<T: Real + LocalValue>(
        &self,
        q: u64,
        s: T,
        r_max: u32,
    ) -> Result<SeriesValue<T>> {
        if r_max == 0 {
            return Err(Error::invalid("r_max", "must be at least 1"));
        }
        if q < 2 {
            return Err(Error::invalid("q", "prime norm must be at least 2"));
        }
        let values = self.local_values::<T>(q, r_max)?;
        let x = T::from_u(q).powf(-s);
        let mut weight = T::one();
        let terms: Vec<T> = values
            .iter()
            .map(|&v| {
                let t = v * weight;
                weight = weight * x;
                t
            })
            .collect();
        let value = crate::scalar::compensated_sum(&terms);
        let (last, prev) = (terms[r_max as usize].abs(), terms[r_max as usize - 1].abs());
        let tail_bound = if last == T::zero() {
            T::zero()
        } else {
            let ratio = last / prev;
            if !(ratio < T::one()) {
                return Err(Error::NonConvergent(format!(
                    "local series of {} at q = {q}: term ratio {:.3e} >= 1",
                    self.name,
                    ratio.as_f64()
                )));
            }
            last * ratio / (T::one() - ratio)
        };
        Ok(SeriesValue { value, tail_bound, terms: r_max + 1 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue<T> {
    pub value: T,
    pub tail_bound: T,
    pub terms: u32,
}

fn max_exponent(q: u64, bound: u64) -> u32 {
    let mut r = 0;
    let mut n = 1u64;
    while n <= bound / q {
        n *= q;
        r += 1;
    }
    r
}

struct SubtreeSum {
    total: i128,
    overflow: bool,
}

fn sum_subtree(
    primes: &[PrimeIdeal],
    tables: &[Vec<i128>],
    i: usize,
    norm: u64,
    value: i128,
    bound: u64,
    acc: &mut SubtreeSum,
) {
    let q = primes[i].norm;
    let mut n = norm;
    let mut r = 0usize;
    while n <= bound / q {
        n *= q;
        r += 1;
        let v = match value.checked_mul(tables[i][r]) {
            Some(v) => v,
            None => {
                acc.overflow = true;
                return;
            }
        };
        if v == 0 {
            // every extension of a zero node is zero
            continue;
        }
        match acc.total.checked_add(v) {
            Some(t) => acc.total = t,
            None => {
                acc.overflow = true;
                return;
            }
        }
        for j in i + 1..primes.len() {
            if primes[j].norm > bound / n {
                break;
            }
            sum_subtree(primes, tables, j, n, v, bound, acc);
        }
    }
}

impl fmt::Display for MultiplicativeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl FromStr for MultiplicativeFunction {
    type Err = Error;

    /// Names accepted on the command line.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "mu" => Self::mu(),
            "mu2" => Self::mu2(),
            "tau2" => Self::tau2(),
            "lambda2" => Self::lambda2(),
            "phi2" => Self::phi2(),
            "id" => Self::id(),
            "M" => Self::conductor_slice_mass(),
            "delta" => Self::delta(),
            "one" => Self::one(),
            _ => {
                return Err(Error::invalid(
                    "fn",
                    format!("unknown function `{s}` (expected mu, mu2, tau2, lambda2, phi2, id, M, delta)"),
                ))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::{factor, primes_up_to};

    fn brute_divisor_sum(n: u64, f: impl Fn(u64) -> i128, g: impl Fn(u64) -> i128) -> i128 {
        (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| f(d) * g(n / d)).sum()
    }

    fn mobius(n: u64) -> i128 {
        let fs = factor(n);
        if fs.iter().any(|&(_, e)| e > 1) {
            0
        } else if fs.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn eval_examples() {
        let twelve = IdealFactorization::rational(12).unwrap();
        assert_eq!(MultiplicativeFunction::phi2().eval(&twelve).unwrap(), 24);
        let oracle = brute_divisor_sum(12, |d| d as i128, |m| mobius(m).abs());
        assert_eq!(oracle, 24);
        assert_eq!(MultiplicativeFunction::tau2().local(5, 3).unwrap(), 4);
        let pq = IdealFactorization::rational(15).unwrap();
        assert_eq!(MultiplicativeFunction::lambda2().eval(&pq).unwrap(), 4);
        assert_eq!(MultiplicativeFunction::mu().eval(&IdealFactorization::unit()).unwrap(), 1);
    }

    #[test]
    fn convolution_examples() {
        let one = MultiplicativeFunction::one();
        let tau = one.convolve(&one);
        for r in 0..10 {
            assert_eq!(tau.local(7, r).unwrap(), r as i128 + 1);
        }
        let mu = MultiplicativeFunction::mu();
        assert_eq!(mu.convolve(&mu).local(3, 1).unwrap(), -2);
        let phi_lambda = MultiplicativeFunction::phi2().convolve(&MultiplicativeFunction::lambda2());
        assert_eq!(phi_lambda.local(2, 2).unwrap(), 1);
        assert_eq!(phi_lambda.local(2, 2).unwrap(), 1);
    }

    #[test]
    fn inverse_examples() {
        let tau = MultiplicativeFunction::tau2();
        assert_eq!(tau.inverse().local(11, 1).unwrap(), -2);
        assert_eq!(MultiplicativeFunction::one().inverse().local(11, 1).unwrap(), -1);
        for f in [tau.clone(), MultiplicativeFunction::phi2(), MultiplicativeFunction::conductor_slice_mass()] {
            let d = f.convolve(&f.inverse());
            for r in 1..=20 {
                assert_eq!(d.local(3, r).unwrap(), 0, "{f} at r = {r}");
            }
        }
    }

    #[test]
    fn lambda2_inverts_tau2_on_prime_powers() {
        let d = MultiplicativeFunction::tau2().convolve(&MultiplicativeFunction::lambda2());
        for q in primes_up_to(100) {
            let v = d.local_values::<i128>(q, 20).unwrap();
            assert_eq!(v[0], 1);
            assert!(v[1..].iter().all(|&x| x == 0));
        }
        let inv = MultiplicativeFunction::tau2().inverse();
        for r in 0..=20 {
            assert_eq!(inv.local(5, r).unwrap(), MultiplicativeFunction::lambda2().local(5, r).unwrap());
        }
        let mumu = MultiplicativeFunction::mu().convolve(&MultiplicativeFunction::mu());
        for r in 0..=20 {
            assert_eq!(mumu.local(5, r).unwrap(), MultiplicativeFunction::lambda2().local(5, r).unwrap());
        }
    }

    #[test]
    fn phi2_is_id_times_mu2() {
        let conv = MultiplicativeFunction::id().convolve(&MultiplicativeFunction::mu2());
        for q in [2u64, 3, 9, 25, 101] {
            for r in 1..=8 {
                let expected = (q as i128).pow(r) + (q as i128).pow(r - 1);
                assert_eq!(MultiplicativeFunction::phi2().local(q, r).unwrap(), expected);
                assert_eq!(conv.local(q, r).unwrap(), expected);
            }
        }
    }

    #[test]
    fn conductor_slice_mass_small_exponents() {
        let m = MultiplicativeFunction::conductor_slice_mass();
        for q in primes_up_to(100) {
            let qi = q as i128;
            assert_eq!(m.local(q, 1).unwrap(), qi - 1);
            assert_eq!(m.local(q, 2).unwrap(), qi * qi - qi - 1);
            // tau2 * M recovers phi2 (Plancherel inversion of the volume)
            let back = m.convolve(&MultiplicativeFunction::tau2());
            for r in 0..=6 {
                assert_eq!(back.local(q, r).unwrap(), MultiplicativeFunction::phi2().local(q, r).unwrap());
            }
        }
        assert_eq!(m.local(7, 0).unwrap(), 1);
    }

    #[test]
    fn partial_sum_examples() {
        let q = NumberFieldSpec::rationals();
        assert_eq!(MultiplicativeFunction::phi2().partial_sum(&q, 10.0).unwrap(), 82);
        let brute: i128 = (1..=10u64).map(|n| brute_divisor_sum(n, |d| d as i128, |m| mobius(m).abs())).sum();
        assert_eq!(brute, 82);
        assert_eq!(MultiplicativeFunction::mu2().partial_sum(&q, 4.0).unwrap(), 3);
        assert_eq!(MultiplicativeFunction::mu2().partial_sum(&q, 0.5).unwrap(), 0);
        let g: NumberFieldSpec = "Q(sqrt,-1)".parse().unwrap();
        assert_eq!(MultiplicativeFunction::tau2().partial_sum(&g, 0.5).unwrap(), 0);
        assert_eq!(MultiplicativeFunction::one().partial_sum(&g, 5.0).unwrap(), 5);
    }

    #[test]
    fn partial_sum_matches_brute_force_mobius() {
        let q = NumberFieldSpec::rationals();
        let mertens: i128 = (1..=5000).map(mobius).sum();
        assert_eq!(MultiplicativeFunction::mu().partial_sum(&q, 5000.0).unwrap(), mertens);
    }

    #[test]
    fn local_series_examples() {
        let m = MultiplicativeFunction::conductor_slice_mass();
        let s = m.local_dirichlet_series(2, 2.0f64, 40).unwrap();
        assert!((s.value - 45.0 / 32.0).abs() < 1e-9);
        assert!(s.tail_bound < 1e-9);
        let d = MultiplicativeFunction::delta().local_dirichlet_series(13, 1.5f64, 5).unwrap();
        assert_eq!((d.value, d.tail_bound), (1.0, 0.0));
        let t = MultiplicativeFunction::tau2().local_dirichlet_series(2, 2.0f64, 60).unwrap();
        let direct: f64 = (0..=60).map(|r| (r as f64 + 1.0) * 0.25f64.powi(r)).sum();
        assert!((t.value - 16.0 / 9.0).abs() < 1e-12);
        assert!((direct - 16.0 / 9.0).abs() < 1e-12);
        let single = m.local_dirichlet_series(2, 2.0f32, 30).unwrap();
        assert!((single.value - 1.40625).abs() < 1e-5);
    }

    #[test]
    fn divergent_series_is_reported() {
        let r = MultiplicativeFunction::id().local_dirichlet_series(3, 0.5f64, 10);
        assert!(matches!(r, Err(Error::NonConvergent(_))));
        assert!(MultiplicativeFunction::id().local_dirichlet_series(3, 2.0f64, 0).is_err());
    }

    #[test]
    fn overflow_is_an_error() {
        let id = MultiplicativeFunction::id();
        assert_eq!(id.local(1_000_003, 7), Err(Error::Overflow("local values")));
    }

    #[test]
    fn names_round_trip() {
        for n in ["mu", "mu2", "tau2", "lambda2", "phi2", "id", "M", "delta"] {
            assert_eq!(n.parse::<MultiplicativeFunction>().unwrap().name(), n);
        }
        assert!("sigma".parse::<MultiplicativeFunction>().is_err());
        let t = MultiplicativeFunction::from_table("t", vec![3, -1]);
        assert_eq!(t.local_values::<i128>(5, 4).unwrap(), vec![1, 3, -1, 0, 0]);
    }
}
