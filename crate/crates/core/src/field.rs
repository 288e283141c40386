//! Base fields, prime ideals and the ideal lattice of bounded norm.
//!
//! Only the rationals and quadratic fields are supported. Every count and
//! norm here is an exact integer; enumeration order is fixed as
//! (norm, residue characteristic, residue degree, branch).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::linear_fit;
use crate::primes::{is_prime, kronecker, primes_up_to};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    Rational,
    /// `Q(sqrt(m))`, `m` squarefree, `m != 0, 1`.
    Quadratic { m: i64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumberFieldSpec {
    pub kind: FieldKind,
    pub degree: u32,
    pub signature: (u32, u32),
    pub discriminant: i64,
    /// Residue of the Dedekind zeta function at `s = 1`, when known.
    pub residue_at_1: Option<f64>,
}

fn is_squarefree(m: i64) -> bool {
    let mut n = m.unsigned_abs();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d * d) {
            return false;
        }
        if n.is_multiple_of(d) {
            n /= d;
        }
        d += 1;
    }
    true
}

impl NumberFieldSpec {
    pub fn rationals() -> Self {
        NumberFieldSpec {
            kind: FieldKind::Rational,
            degree: 1,
            signature: (1, 0),
            discriminant: 1,
            residue_at_1: Some(1.0),
        }
    }

    pub fn quadratic(m: i64) -> Result<Self> {
        if m == 0 || m == 1 || !is_squarefree(m) {
            return Err(Error::UnsupportedField(format!(
                "Q(sqrt,{m}): m must be a squarefree integer other than 0 and 1"
            )));
        }
        let discriminant = if m.rem_euclid(4) == 1 { m } else { 4 * m };
        let signature = if m > 0 { (2, 0) } else { (0, 1) };
        Ok(NumberFieldSpec {
            kind: FieldKind::Quadratic { m },
            degree: 2,
            signature,
            discriminant,
            residue_at_1: None,
        })
    }

    pub fn with_residue(mut self, residue: f64) -> Result<Self> {
        if !(residue.is_finite() && residue > 0.0) {
            return Err(Error::invalid("residue", "must be a positive real"));
        }
        self.residue_at_1 = Some(residue);
        Ok(self)
    }

    pub fn is_rational(&self) -> bool {
        self.kind == FieldKind::Rational
    }

    /// The prime ideals above the rational prime `p`.
    pub fn split_prime(&self, p: u64) -> Result<Vec<PrimeIdeal>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(self.split_known_prime(p))
    }

    fn split_known_prime(&self, p: u64) -> Vec<PrimeIdeal> {
        let ideal = |f: u32, e: u32, branch: u8| PrimeIdeal {
            p,
            f,
            e,
            branch,
            norm: p.pow(f),
        };
        match self.kind {
            FieldKind::Rational => vec![ideal(1, 1, 0)],
            FieldKind::Quadratic { .. } => match kronecker(self.discriminant, p) {
                1 => vec![ideal(1, 1, 0), ideal(1, 1, 1)],
                -1 => vec![ideal(2, 1, 0)],
                _ => vec![ideal(1, 2, 0)],
            },
        }
    }

    /// Every prime ideal of norm at most `x`, sorted by norm.
    pub fn prime_ideals_up_to(&self, x: f64) -> Vec<PrimeIdeal> {
        let bound = norm_bound(x);
        let mut out: Vec<PrimeIdeal> = primes_up_to(bound)
            .into_iter()
            .flat_map(|p| self.split_known_prime(p))
            .filter(|q| q.norm <= bound)
            .collect();
        out.sort();
        out
    }

    /// Number of nonzero integral ideals of norm at most `x`.
    pub fn ideal_count(&self, x: f64) -> Result<u64> {
        let bound = norm_bound(x);
        if bound == 0 {
            return Ok(0);
        }
        let primes = self.prime_ideals_up_to(bound as f64);
        let below = (0..primes.len())
            .into_par_iter()
            .map(|i| {
                let mut n = 0u64;
                let mut ok = true;
                walk_subtree(&primes, i, 1, bound, &mut |_, _| {
                    match n.checked_add(1) {
                        Some(v) => n = v,
                        None => ok = false,
                    }
                });
                ok.then_some(n)
            })
            .try_reduce(|| 0u64, |a, b| a.checked_add(b));
        below
            .and_then(|n| n.checked_add(1))
            .ok_or(Error::Overflow("ideal_count"))
    }

    /// `hist[n]` = number of ideals of norm exactly `n`, for `n <= x`.
    pub fn norm_histogram(&self, x: f64) -> Vec<u32> {
        let bound = norm_bound(x);
        let mut hist = vec![0u32; bound as usize + 1];
        if bound == 0 {
            return hist;
        }
        hist[1] = 1;
        let primes = self.prime_ideals_up_to(bound as f64);
        for i in 0..primes.len() {
            walk_subtree(&primes, i, 1, bound, &mut |norm, _| hist[norm as usize] += 1);
        }
        hist
    }

    /// Least-squares estimate of the residue at `s = 1` from the ideal
    /// counting function on a geometric grid over `[x/8, x]`.
    pub fn estimate_residue(&self, x: f64) -> Result<ResidueEstimate> {
        let hist = self.norm_histogram(x);
        let mut cumulative = Vec::with_capacity(hist.len());
        let mut acc = 0u64;
        for h in &hist {
            acc += *h as u64;
            cumulative.push(acc);
        }
        if acc < 100 {
            return Err(Error::InsufficientData(format!(
                "only {acc} ideals of norm <= {x}; need at least 100"
            )));
        }
        const POINTS: usize = 64;
        let lo = x / 8.0;
        let ratio = 8f64.powf(1.0 / (POINTS - 1) as f64);
        let (ts, counts): (Vec<f64>, Vec<f64>) = (0..POINTS)
            .map(|i| {
                let t = lo * ratio.powi(i as i32);
                let idx = (norm_bound(t) as usize).min(cumulative.len() - 1);
                (t, cumulative[idx] as f64)
            })
            .unzip();
        let line = linear_fit(&ts, &counts)?;
        let span = ts[POINTS - 1] - ts[0];
        Ok(ResidueEstimate {
            value: line.slope,
            half_width: 2.0 * line.max_residual / span,
            x,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueEstimate {
    pub value: f64,
    /// Range of slopes compatible with the residual band of the fit.
    pub half_width: f64,
    pub x: f64,
}

impl fmt::Display for NumberFieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FieldKind::Rational => write!(f, "Q"),
            FieldKind::Quadratic { m } => write!(f, "Q(sqrt,{m})"),
        }
    }
}

impl FromStr for NumberFieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "Q" {
            return Ok(Self::rationals());
        }
        let m = t
            .strip_prefix("Q(sqrt,")
            .and_then(|r| r.strip_suffix(')'))
            .and_then(|m| m.parse::<i64>().ok())
            .ok_or_else(|| Error::UnsupportedField(s.to_string()))?;
        Self::quadratic(m)
    }
}

/// Largest integer norm admitted by a real bound.
pub(crate) fn norm_bound(x: f64) -> u64 {
    if x.is_nan() || x < 1.0 {
        0
    } else {
        x.floor().min(u64::MAX as f64) as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeIdeal {
    /// Residue characteristic.
    pub p: u64,
    /// Residue degree.
    pub f: u32,
    /// Ramification index.
    pub e: u32,
    /// Distinguishes the two primes above a split `p`.
    pub branch: u8,
    pub norm: u64,
}

impl PrimeIdeal {
    /// The prime `p` of the rationals.
    pub fn rational(p: u64) -> Self {
        PrimeIdeal { p, f: 1, e: 1, branch: 0, norm: p }
    }

    fn key(&self) -> (u64, u64, u32, u8) {
        (self.norm, self.p, self.f, self.branch)
    }
}

impl Ord for PrimeIdeal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for PrimeIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An integral ideal as a sorted prime-power factorization.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IdealFactorization {
    factors: Vec<(PrimeIdeal, u32)>,
    norm: u64,
}

impl IdealFactorization {
    pub fn unit() -> Self {
        IdealFactorization { factors: Vec::new(), norm: 1 }
    }

    /// Builds a factorization; factors are sorted and equal primes merged.
    pub fn new(mut factors: Vec<(PrimeIdeal, u32)>) -> Result<Self> {
        factors.retain(|&(_, r)| r > 0);
        factors.sort_by_key(|a| a.0);
        let mut merged: Vec<(PrimeIdeal, u32)> = Vec::with_capacity(factors.len());
        for (q, r) in factors {
            match merged.last_mut() {
                Some((last, acc)) if *last == q => *acc += r,
                _ => merged.push((q, r)),
            }
        }
        let mut norm = 1u64;
        for (q, r) in &merged {
            norm = q
                .norm
                .checked_pow(*r)
                .and_then(|v| norm.checked_mul(v))
                .ok_or(Error::Overflow("ideal norm"))?;
        }
        Ok(IdealFactorization { factors: merged, norm })
    }

    /// The ideal `nZ` of the rationals.
    pub fn rational(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "the zero ideal has no factorization"));
        }
        Self::new(
            crate::primes::factor(n)
                .into_iter()
                .map(|(p, e)| (PrimeIdeal::rational(p), e))
                .collect(),
        )
    }

    pub fn factors(&self) -> &[(PrimeIdeal, u32)] {
        &self.factors
    }

    pub fn norm(&self) -> u64 {
        self.norm
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent_of(&self, q: &PrimeIdeal) -> u32 {
        self.factors
            .iter()
            .find(|(p, _)| p == q)
            .map_or(0, |&(_, r)| r)
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.factors.iter().all(|(q, r)| other.exponent_of(q) >= *r)
    }

    /// `other / self`, when `self | other`.
    pub fn quotient_of(&self, other: &Self) -> Option<Self> {
        if !self.divides(other) {
            return None;
        }
        let factors = other
            .factors
            .iter()
            .map(|&(q, r)| (q, r - self.exponent_of(&q)))
            .collect();
        Self::new(factors).ok()
    }

    pub fn is_coprime_to(&self, other: &Self) -> bool {
        self.factors.iter().all(|(q, _)| other.exponent_of(q) == 0)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Self::new(factors)
    }
}

/// Depth-first walk over the ideals whose smallest prime factor (in the
/// sorted order of `primes`) is `primes[lead]`, with norm at most `bound`.
/// `visit` receives the norm and the exponent stack `(prime index, exponent)`.
pub(crate) fn walk_subtree<F: FnMut(u64, &[(usize, u32)])>(
    primes: &[PrimeIdeal],
    lead: usize,
    norm: u64,
    bound: u64,
    visit: &mut F,
) {
    let mut stack = Vec::with_capacity(24);
    push_prime(primes, lead, norm, bound, &mut stack, visit);
}

fn push_prime<F: FnMut(u64, &[(usize, u32)])>(
    primes: &[PrimeIdeal],
    i: usize,
    norm: u64,
    bound: u64,
    stack: &mut Vec<(usize, u32)>,
    visit: &mut F,
) {
    let q = primes[i].norm;
    let mut n = norm;
    let mut r = 0;
    while n <= bound / q {
        n *= q;
        r += 1;
        stack.push((i, r));
        visit(n, stack);
        for j in i + 1..primes.len() {
            if primes[j].norm > bound / n {
                break;
            }
            push_prime(primes, j, n, bound, stack, visit);
        }
        stack.pop();
    }
}

/// All ideals of norm at most `x`, sorted by norm then factorization.
pub fn ideals_up_to(field: &NumberFieldSpec, x: f64) -> Vec<IdealFactorization> {
    let bound = norm_bound(x);
    if bound == 0 {
        return Vec::new();
    }
    let primes = field.prime_ideals_up_to(bound as f64);
    let mut out = vec![IdealFactorization::unit()];
    for i in 0..primes.len() {
        walk_subtree(&primes, i, 1, bound, &mut |norm, stack| {
            out.push(IdealFactorization {
                factors: stack.iter().map(|&(j, r)| (primes[j], r)).collect(),
                norm,
            });
        });
    }
    out.sort_by(|a, b| {
        a.norm.cmp(&b.norm).then_with(|| {
            let ka = a.factors.iter().map(|(q, r)| (q.key(), *r));
            let kb = b.factors.iter().map(|(q, r)| (q.key(), *r));
            ka.cmp(kb)
        })
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian() -> NumberFieldSpec {
        "Q(sqrt,-1)".parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        let f: NumberFieldSpec = "Q".parse().unwrap();
        assert_eq!(f.degree, 1);
        let g = gaussian();
        assert_eq!(g.discriminant, -4);
        assert_eq!(g.signature, (0, 1));
        assert_eq!(g.to_string(), "Q(sqrt,-1)");
        let r2: NumberFieldSpec = "Q(sqrt, 2)".parse().unwrap();
        assert_eq!(r2.discriminant, 8);
        assert_eq!(r2.signature, (2, 0));
        let r5: NumberFieldSpec = "Q(sqrt,5)".parse().unwrap();
        assert_eq!(r5.discriminant, 5);
        for bad in ["Q(sqrt,4)", "Q(sqrt,1)", "Q(sqrt,0)", "Q(cbrt,2)", "R", "Q(sqrt,-12)"] {
            assert!(matches!(bad.parse::<NumberFieldSpec>(), Err(Error::UnsupportedField(_))), "{bad}");
        }
    }

    #[test]
    fn split_prime_examples() {
        let q = NumberFieldSpec::rationals();
        let ps = q.split_prime(7).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].norm, 7);

        let g = gaussian();
        let five = g.split_prime(5).unwrap();
        assert_eq!(five.len(), 2);
        assert!(five.iter().all(|p| p.norm == 5 && p.f == 1 && p.e == 1));
        let three = g.split_prime(3).unwrap();
        assert_eq!(three.len(), 1);
        assert_eq!((three[0].norm, three[0].f), (9, 2));
        let two = g.split_prime(2).unwrap();
        assert_eq!((two.len(), two[0].e, two[0].norm), (1, 2, 2));

        assert_eq!(g.split_prime(9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn degree_is_sum_of_ef() {
        let fields = [NumberFieldSpec::rationals(), gaussian(), "Q(sqrt,2)".parse().unwrap(), "Q(sqrt,-5)".parse().unwrap()];
        for f in &fields {
            for p in primes_up_to(10_000) {
                let total: u32 = f.split_prime(p).unwrap().iter().map(|q| q.e * q.f).sum();
                assert_eq!(total, f.degree, "{f} at {p}");
            }
        }
    }

    #[test]
    fn prime_ideal_streams() {
        let q = NumberFieldSpec::rationals();
        let norms: Vec<u64> = q.prime_ideals_up_to(10.0).iter().map(|p| p.norm).collect();
        assert_eq!(norms, vec![2, 3, 5, 7]);
        let g = gaussian();
        let norms: Vec<u64> = g.prime_ideals_up_to(5.0).iter().map(|p| p.norm).collect();
        assert_eq!(norms, vec![2, 5, 5]);
        assert!(g.prime_ideals_up_to(1.0).is_empty());

        let big = g.prime_ideals_up_to(5000.0);
        let small = g.prime_ideals_up_to(700.0);
        let restricted: Vec<_> = big.iter().filter(|p| p.norm <= 700).copied().collect();
        assert_eq!(restricted, small);
    }

    #[test]
    fn ideal_counts() {
        let q = NumberFieldSpec::rationals();
        assert_eq!(q.ideal_count(10.7).unwrap(), 10);
        assert_eq!(gaussian().ideal_count(5.0).unwrap(), 5);
        assert_eq!(gaussian().ideal_count(0.5).unwrap(), 0);
        assert_eq!(q.ideal_count(0.5).unwrap(), 0);
        for x in [1.0, 2.5, 99.0, 12_345.0, 1_000_000.0] {
            assert_eq!(q.ideal_count(x).unwrap(), x.floor() as u64);
        }
    }

    /// Gaussian ideals of norm n are counted by sum_{d | n} chi_{-4}(d).
    #[test]
    fn gaussian_histogram_matches_divisor_sum() {
        let hist = gaussian().norm_histogram(3000.0);
        for n in 1..=3000i64 {
            let expected: i64 = (1..=n)
                .filter(|d| n % d == 0)
                .map(|d| match d % 4 {
                    1 => 1,
                    3 => -1,
                    _ => 0,
                })
                .sum();
            assert_eq!(hist[n as usize] as i64, expected, "n = {n}");
        }
    }

    #[test]
    fn enumerated_ideals_are_distinct_and_sorted() {
        let g = gaussian();
        let ideals = ideals_up_to(&g, 50.0);
        assert_eq!(ideals.len() as u64, g.ideal_count(50.0).unwrap());
        assert!(ideals.windows(2).all(|w| w[0].norm() <= w[1].norm() && w[0] != w[1]));
        assert_eq!(ideals[0], IdealFactorization::unit());
    }

    #[test]
    fn factorization_arithmetic() {
        let twelve = IdealFactorization::rational(12).unwrap();
        let two = IdealFactorization::rational(2).unwrap();
        assert_eq!(twelve.norm(), 12);
        assert!(two.divides(&twelve));
        assert_eq!(two.quotient_of(&twelve).unwrap(), IdealFactorization::rational(6).unwrap());
        assert!(!IdealFactorization::rational(5).unwrap().divides(&twelve));
        assert_eq!(two.mul(&twelve).unwrap().norm(), 24);
    }

    #[test]
    fn residue_requires_data() {
        assert!(matches!(
            NumberFieldSpec::rationals().estimate_residue(50.0),
            Err(Error::InsufficientData(_))
        ));
    }
}
