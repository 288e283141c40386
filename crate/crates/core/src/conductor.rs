//! Local and global analytic conductors, oldform multiplicities and the
//! spectral lattice `{(N, k) : q N c_inf(k) <= Q}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{norm_bound, IdealFactorization};
use crate::multiplicative::MultiplicativeFunction;
use crate::primes::factor;
use crate::scalar::Real;

/// Archimedean conductor convention.
///
/// `SquarePlusOne` assigns `1 + r^2` to the principal series of parameter `ir` and
/// `1 + k^2` to the discrete series of weight `k`. `ProductForm` uses
/// `prod_j (1 + |mu_j|)` over the gamma-factor shifts: `mu = {ir, -ir}`
/// (even) or `{1 + ir, 1 - ir}` (odd) for the principal series and
/// `mu = {(k-1)/2, (k+1)/2}` for the discrete series, giving
/// `(1 + r)^2`, `(1 + sqrt(1 + r^2))^2` and `(k + 1)(k + 3) / 4`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConductorConvention {
    #[default]
    SquarePlusOne,
    ProductForm,
}

impl ConductorConvention {
    /// Discrete-series conductor of weight `k` as an exact fraction.
    pub fn discrete_series(self, k: u32) -> (u64, u64) {
        let k = k as u64;
        match self {
            ConductorConvention::SquarePlusOne => (1 + k * k, 1),
            ConductorConvention::ProductForm => ((k + 1) * (k + 3), 4),
        }
    }

    pub fn principal_series<T: Real>(self, r: T, parity: Parity) -> T {
        let one = T::one();
        match (self, parity) {
            (ConductorConvention::SquarePlusOne, _) => one + r * r,
            (ConductorConvention::ProductForm, Parity::Even) => (one + r.abs()).powi(2),
            (ConductorConvention::ProductForm, Parity::Odd) => (one + (one + r * r).sqrt()).powi(2),
        }
    }
}

impl fmt::Display for ConductorConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConductorConvention::SquarePlusOne => "paper23",
            ConductorConvention::ProductForm => "product-form",
        })
    }
}

impl FromStr for ConductorConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper23" => Ok(ConductorConvention::SquarePlusOne),
            "product-form" | "product" => Ok(ConductorConvention::ProductForm),
            _ => Err(Error::invalid("convention", format!("`{s}` is not one of paper23, product-form"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum LocalRepData<T> {
    /// Split finite place; `exponent = 0` is unramified.
    FiniteSplit { exponent: u32, q: u64 },
    /// Character `chi0 o Nrd` at a ramified finite place.
    RamifiedCharacter { chi0_exponent: u32, q: u64 },
    PrincipalSeries { r: T, parity: Parity },
    DiscreteSeries { weight: u32 },
    /// Representation of dimension `2n + 1` at a compact real place.
    CompactRep { n: u32 },
}

/// A conductor split into its exact integer part and its real part.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conductor<T> {
    pub exact: u128,
    pub real: T,
}

impl<T: Real> Conductor<T> {
    pub fn one() -> Self {
        Conductor { exact: 1, real: T::one() }
    }

    pub fn value(&self) -> T {
        T::from_u128(self.exact).unwrap_or_else(T::infinity) * self.real
    }

    /// The conductor as an integer when it has no real part.
    pub fn as_exact(&self) -> Option<u128> {
        (self.real == T::one()).then_some(self.exact)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        Ok(Conductor {
            exact: self
                .exact
                .checked_mul(other.exact)
                .ok_or(Error::Overflow("global conductor"))?,
            real: self.real * other.real,
        })
    }
}

fn is_prime_power(q: u64) -> bool {
    q >= 2 && factor(q).len() == 1
}

impl<T: Real> LocalRepData<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LocalRepData::FiniteSplit { q, .. } | LocalRepData::RamifiedCharacter { q, .. } if !is_prime_power(q) => {
                Err(Error::invalid("q", format!("{q} is not a prime norm")))
            }
            LocalRepData::PrincipalSeries { r, .. } if !(r >= T::zero() && r.is_finite()) => {
                Err(Error::invalid("r", "principal series parameter must be finite and >= 0"))
            }
            LocalRepData::DiscreteSeries { weight } if weight < 2 => {
                Err(Error::invalid("k", "discrete series weight must be at least 2"))
            }
            _ => Ok(()),
        }
    }

    /// `c(pi_v)`.
    pub fn local_conductor(&self, convention: ConductorConvention) -> Result<Conductor<T>> {
        self.validate()?;
        let exact = |v: Option<u128>| -> Result<Conductor<T>> {
            Ok(Conductor { exact: v.ok_or(Error::Overflow("local conductor"))?, real: T::one() })
        };
        let fraction = |(num, den): (u64, u64)| -> Result<Conductor<T>> {
            if den == 1 {
                exact(Some(num as u128))
            } else {
                Ok(Conductor { exact: 1, real: T::from_u(num) / T::from_u(den) })
            }
        };
        match *self {
            LocalRepData::FiniteSplit { exponent, q } => exact((q as u128).checked_pow(exponent)),
            LocalRepData::RamifiedCharacter { chi0_exponent: 0, q } => exact(Some(q as u128)),
            LocalRepData::RamifiedCharacter { chi0_exponent, q } => {
                exact((q as u128).checked_pow(2 * chi0_exponent))
            }
            LocalRepData::PrincipalSeries { r, parity } => Ok(Conductor {
                exact: 1,
                real: convention.principal_series(r, parity),
            }),
            LocalRepData::DiscreteSeries { weight } => fraction(convention.discrete_series(weight)),
            // conductor of the weight-(2n+2) discrete-series transfer
            LocalRepData::CompactRep { n } => fraction(convention.discrete_series(2 * n + 2)),
        }
    }
}

/// Local data at finitely many places; unramified elsewhere.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GlobalRepShape<T> {
    places: Vec<(String, LocalRepData<T>)>,
}

impl<T: Real> GlobalRepShape<T> {
    pub fn new(places: Vec<(String, LocalRepData<T>)>) -> Result<Self> {
        for (i, (label, data)) in places.iter().enumerate() {
            data.validate()?;
            if places[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::invalid("shape", format!("place `{label}` appears twice")));
            }
        }
        Ok(GlobalRepShape { places })
    }

    pub fn places(&self) -> &[(String, LocalRepData<T>)] {
        &self.places
    }

    /// Union of two shapes on disjoint place sets.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut places = self.places.clone();
        places.extend(other.places.iter().cloned());
        Self::new(places)
    }

    /// `c(pi) = prod_v c(pi_v)`.
    pub fn global_conductor(&self, convention: ConductorConvention) -> Result<Conductor<T>> {
        self.places.iter().try_fold(Conductor::one(), |acc, (_, d)| {
            acc.checked_mul(&d.local_conductor(convention)?)
        })
    }
}

impl<T: Real> FromStr for GlobalRepShape<T> {
    type Err = Error;

    /// Comma-separated tokens: `p:q^f` (split finite), `ram:q^c` (ramified
    /// character), `ps:r` or `ps:r:odd`, `ds:k`, `cpt:n`. Finite places are
    /// labelled by `q`; archimedean ones `inf`, `inf2`, ... in order.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |tok: &str| Error::invalid("shape", format!("cannot parse `{tok}`"));
        let mut places = Vec::new();
        let mut arch = 0;
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (kind, rest) = tok.split_once(':').ok_or_else(|| bad(tok))?;
            let prime_power = |rest: &str| -> Result<(u64, u32)> {
                let (q, e) = rest.split_once('^').unwrap_or((rest, "1"));
                Ok((q.parse().map_err(|_| bad(tok))?, e.parse().map_err(|_| bad(tok))?))
            };
            let mut arch_label = || {
                arch += 1;
                if arch == 1 { "inf".to_string() } else { format!("inf{arch}") }
            };
            let (label, data) = match kind {
                "p" => {
                    let (q, f) = prime_power(rest)?;
                    (q.to_string(), LocalRepData::FiniteSplit { exponent: f, q })
                }
                "ram" => {
                    let (q, c) = prime_power(rest)?;
                    (q.to_string(), LocalRepData::RamifiedCharacter { chi0_exponent: c, q })
                }
                "ps" => {
                    let (r, parity) = match rest.split_once(':') {
                        Some((r, "odd")) => (r, Parity::Odd),
                        Some((r, "even")) => (r, Parity::Even),
                        Some(_) => return Err(bad(tok)),
                        None => (rest, Parity::Even),
                    };
                    let r: f64 = r.parse().map_err(|_| bad(tok))?;
                    (arch_label(), LocalRepData::PrincipalSeries { r: T::lit(r), parity })
                }
                "ds" => (arch_label(), LocalRepData::DiscreteSeries { weight: rest.parse().map_err(|_| bad(tok))? }),
                "cpt" => (arch_label(), LocalRepData::CompactRep { n: rest.parse().map_err(|_| bad(tok))? }),
                _ => return Err(bad(tok)),
            };
            places.push((label, data));
        }
        Self::new(places)
    }
}

/// `m(sigma, level) = tau_2(level / c(sigma))`, zero when `c(sigma)` does not
/// divide the level.
pub fn oldform_multiplicity(conductor: &IdealFactorization, level: &IdealFactorization) -> Result<u64> {
    match conductor.quotient_of(level) {
        None => Ok(0),
        Some(quotient) => {
            let t = MultiplicativeFunction::tau2().eval(&quotient)?;
            u64::try_from(t).map_err(|_| Error::Overflow("oldform multiplicity"))
        }
    }
}

/// All `(N, k)` with `k >= 2` even, `N >= 1` and
/// `ramified * N * c_inf(k) <= q_max`, ordered by `(k, N)`.
pub fn enumerate_lattice(
    q_max: f64,
    ramified: u64,
    convention: ConductorConvention,
) -> impl Iterator<Item = (u64, u32)> {
    lattice_rows(q_max, ramified, convention).flat_map(|(k, n_max)| (1..=n_max).map(move |n| (n, k)))
}

/// `(k, largest N)` for every weight row of the lattice that is non-empty.
pub fn lattice_rows(
    q_max: f64,
    ramified: u64,
    convention: ConductorConvention,
) -> impl Iterator<Item = (u32, u64)> {
    let ramified = ramified.max(1);
    (1u32..)
        .map(|h| 2 * h)
        .map(move |k| {
            let (num, den) = convention.discrete_series(k);
            let scaled = norm_bound(q_max * den as f64);
            (k, scaled / (ramified.saturating_mul(num)))
        })
        .take_while(|&(_, n_max)| n_max > 0)
}

/// The definite-algebra lattice ramified at `{q, inf}` with a Steinberg-type
/// conductor `q` at the ramified prime.
pub fn enumerate_definite_lattice(q_max: f64, q: u64) -> Result<Vec<(u64, u32)>> {
    if !crate::primes::is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if !(q_max >= 1.0) {
        return Err(Error::invalid("Q", "must be at least 1"));
    }
    Ok(enumerate_lattice(q_max, q, ConductorConvention::SquarePlusOne).collect())
}

/// `sum_k floor(Q / (q (1 + k^2)))`, the size of the definite lattice.
pub fn definite_lattice_size(q_max: f64, q: u64) -> u64 {
    lattice_rows(q_max, q, ConductorConvention::SquarePlusOne).map(|(_, n)| n).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    type Rep = LocalRepData<f64>;

    fn cond(d: Rep) -> f64 {
        d.local_conductor(ConductorConvention::SquarePlusOne).unwrap().value()
    }

    #[test]
    fn local_conductor_examples() {
        assert_eq!(cond(Rep::FiniteSplit { exponent: 0, q: 7 }), 1.0);
        assert_eq!(cond(Rep::FiniteSplit { exponent: 3, q: 5 }), 125.0);
        assert_eq!(cond(Rep::DiscreteSeries { weight: 12 }), 145.0);
        assert_eq!(cond(Rep::RamifiedCharacter { chi0_exponent: 2, q: 3 }), 81.0);
        assert_eq!(cond(Rep::RamifiedCharacter { chi0_exponent: 0, q: 3 }), 3.0);
        assert_eq!(cond(Rep::PrincipalSeries { r: 2.0, parity: Parity::Odd }), 5.0);
        assert_eq!(cond(Rep::CompactRep { n: 0 }), 5.0);
        assert_eq!(cond(Rep::CompactRep { n: 1 }), 17.0);
    }

    #[test]
    fn product_form_convention() {
        let c = |d: Rep| d.local_conductor(ConductorConvention::ProductForm).unwrap().value();
        assert_eq!(c(Rep::DiscreteSeries { weight: 2 }), 15.0 / 4.0);
        assert_eq!(c(Rep::PrincipalSeries { r: 3.0, parity: Parity::Even }), 16.0);
        assert!((c(Rep::PrincipalSeries { r: 0.0, parity: Parity::Odd }) - 4.0).abs() < 1e-15);
        assert_eq!(c(Rep::FiniteSplit { exponent: 2, q: 3 }), 9.0);
    }

    #[test]
    fn invalid_local_data() {
        assert!(Rep::DiscreteSeries { weight: 1 }.validate().is_err());
        assert!(Rep::FiniteSplit { exponent: 1, q: 6 }.validate().is_err());
        assert!(Rep::PrincipalSeries { r: -1.0, parity: Parity::Even }.validate().is_err());
        assert!(Rep::FiniteSplit { exponent: 1, q: 9 }.validate().is_ok());
    }

    #[test]
    fn global_conductor_examples() {
        let empty = GlobalRepShape::<f64>::default();
        assert_eq!(empty.global_conductor(ConductorConvention::SquarePlusOne).unwrap().as_exact(), Some(1));
        let s: GlobalRepShape<f64> = "p:11^1,ds:2".parse().unwrap();
        assert_eq!(s.global_conductor(ConductorConvention::SquarePlusOne).unwrap().as_exact(), Some(55));
        let t: GlobalRepShape<f64> = "ram:2^0,ds:4".parse().unwrap();
        assert_eq!(t.global_conductor(ConductorConvention::SquarePlusOne).unwrap().value(), 34.0);
        let u: GlobalRepShape<f64> = "p:11^1,ds:12".parse().unwrap();
        assert_eq!(u.global_conductor(ConductorConvention::SquarePlusOne).unwrap().value(), 11.0 * 145.0);
    }

    #[test]
    fn shape_parse_errors() {
        assert!("p:11,p:11^2".parse::<GlobalRepShape<f64>>().is_err());
        assert!("xx:3".parse::<GlobalRepShape<f64>>().is_err());
        assert!("ds:two".parse::<GlobalRepShape<f64>>().is_err());
        assert!("ps:1.5:weird".parse::<GlobalRepShape<f64>>().is_err());
        let two_arch: GlobalRepShape<f64> = "ds:2,ps:1.5:odd".parse().unwrap();
        assert_eq!(two_arch.places()[1].0, "inf2");
    }

    #[test]
    fn conductor_is_multiplicative_over_disjoint_shapes() {
        let a: GlobalRepShape<f64> = "p:2^3,ds:6".parse().unwrap();
        let b: GlobalRepShape<f64> = "ram:3^1,p:5^2".parse().unwrap();
        let ab = a.concat(&b).unwrap();
        let c = |s: &GlobalRepShape<f64>| s.global_conductor(ConductorConvention::SquarePlusOne).unwrap().value();
        assert_eq!(c(&ab), c(&a) * c(&b));
    }

    #[test]
    fn oldform_examples() {
        let p = |n| IdealFactorization::rational(n).unwrap();
        assert_eq!(oldform_multiplicity(&p(5), &p(125)).unwrap(), 3);
        assert_eq!(oldform_multiplicity(&p(25), &p(5)).unwrap(), 0);
        assert_eq!(oldform_multiplicity(&IdealFactorization::unit(), &p(12)).unwrap(), 6);
    }

    #[test]
    fn definite_lattice_examples() {
        assert_eq!(enumerate_definite_lattice(10.0, 2).unwrap(), vec![(1, 2)]);
        assert!(enumerate_definite_lattice(4.0, 2).unwrap().is_empty());
        assert_eq!(
            enumerate_definite_lattice(60.0, 3).unwrap(),
            vec![(1, 2), (2, 2), (3, 2), (4, 2), (1, 4)]
        );
        // 3 * 1 * (1 + 6^2) = 111 > 60 closes the lattice
        assert_eq!(definite_lattice_size(60.0, 3), 5);
        assert!(enumerate_definite_lattice(60.0, 4).is_err());
    }
}
