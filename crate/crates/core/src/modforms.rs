//! Dimensions of cusp forms on `Gamma_0(N)` with trivial character, newform
//! dimensions by `lambda_2`-inversion, and the empirical count of holomorphic
//! newforms of bounded analytic conductor.
//!
//! All dimensions are computed as `12 * dim` in exact integers:
//!
//! * `k = 2`: `12 g = 12 + psi - 3 nu2 - 4 nu3 - 6 nu_inf`
//! * `k >= 4` even: `12 dim = (k-1) psi + 3 nu2 (4 floor(k/4) - k + 1)
//!   + 4 nu3 (3 floor(k/3) - k + 1) - 6 nu_inf`
//!
//! where `nu2 = 0` if `4 | N` and `nu3 = 0` if `9 | N`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conductor::{lattice_rows, ConductorConvention};
use crate::error::{Error, Result};
use crate::field::IdealFactorization;
use crate::fit::{fit_growth as fit_power_law, GrowthFit};
use crate::multiplicative::MultiplicativeFunction;
use crate::primes::{factor, kronecker, smallest_prime_factors};

/// Local data of `N = prod p^a` entering the dimension formula.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct LevelInvariants {
    psi: i64,
    nu2: i64,
    nu3: i64,
    nu_inf: i64,
}

impl LevelInvariants {
    fn one() -> Self {
        LevelInvariants { psi: 1, nu2: 1, nu3: 1, nu_inf: 1 }
    }

    /// Contribution of the prime power `p^a`, `a >= 1`.
    fn local(p: u64, a: u32) -> Self {
        let pa = p.pow(a) as i64;
        let psi = pa + pa / p as i64;
        let nu2 = match (p, a) {
            (2, 1) => 1,
            (2, _) => 0,
            _ => 1 + kronecker(-4, p) as i64,
        };
        let nu3 = match (p, a) {
            (3, 1) => 1,
            (3, _) => 0,
            _ => 1 + kronecker(-3, p) as i64,
        };
        // sum_{i=0}^{a} phi(p^{min(i, a-i)})
        let phi = |e: u32| if e == 0 { 1 } else { (p.pow(e) - p.pow(e - 1)) as i64 };
        let nu_inf = (0..=a).map(|i| phi(i.min(a - i))).sum();
        LevelInvariants { psi, nu2, nu3, nu_inf }
    }

    fn times(self, o: Self) -> Self {
        LevelInvariants {
            psi: self.psi * o.psi,
            nu2: self.nu2 * o.nu2,
            nu3: self.nu3 * o.nu3,
            nu_inf: self.nu_inf * o.nu_inf,
        }
    }

    fn of(n: u64) -> Self {
        factor(n).into_iter().fold(Self::one(), |acc, (p, a)| acc.times(Self::local(p, a)))
    }

    fn cusp_dimension(&self, k: u32) -> i64 {
        if k < 2 || k % 2 == 1 {
            return 0;
        }
        let twelve_dim = if k == 2 {
            12 + self.psi - 3 * self.nu2 - 4 * self.nu3 - 6 * self.nu_inf
        } else {
            let k = k as i64;
            (k - 1) * self.psi
                + 3 * self.nu2 * (4 * (k / 4) - k + 1)
                + 4 * self.nu3 * (3 * (k / 3) - k + 1)
                - 6 * self.nu_inf
        };
        debug_assert_eq!(twelve_dim % 12, 0);
        twelve_dim / 12
    }
}

/// `dim S_k(Gamma_0(N))`.
pub fn dim_cusp_forms(n: u64, k: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::invalid("N", "level must be at least 1"));
    }
    let d = LevelInvariants::of(n).cusp_dimension(k);
    u64::try_from(d).map_err(|_| Error::Contract(format!("negative cusp dimension {d} at N = {n}, k = {k}")))
}

fn lambda2_of(n: u64) -> i64 {
    factor(n).iter().fold(1, |acc, &(_, a)| {
        acc * match a {
            1 => -2,
            2 => 1,
            _ => 0,
        }
    })
}

/// `dim S_k^new(Gamma_0(N)) = sum_{d | N} lambda_2(N / d) dim S_k(Gamma_0(d))`.
pub fn dim_newforms(n: u64, k: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::invalid("N", "level must be at least 1"));
    }
    let mut total = 0i64;
    for d in (1..=n).filter(|d| n.is_multiple_of(*d)) {
        let l = lambda2_of(n / d);
        if l != 0 {
            total += l * dim_cusp_forms(d, k)? as i64;
        }
    }
    u64::try_from(total).map_err(|_| Error::Contract(format!("negative newform dimension {total} at N = {n}, k = {k}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    ClosedForm,
    ConvolvedNew,
}

/// Dimensions for all levels `1..=n_max` at one weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionTable {
    pub weight: u32,
    pub provenance: Provenance,
    /// `values[N - 1]`.
    pub values: Vec<u64>,
}

impl DimensionTable {
    pub fn get(&self, n: u64) -> Option<u64> {
        self.values.get((n as usize).checked_sub(1)?).copied()
    }
}

/// Multiplicative level data for every `N <= n_max`, built once and shared
/// across weights.
#[derive(Clone, Debug)]
pub struct LevelTables {
    invariants: Vec<LevelInvariants>,
    lambda2: Vec<i8>,
}

impl LevelTables {
    pub fn new(n_max: usize) -> Self {
        let spf = smallest_prime_factors(n_max);
        let mut invariants = vec![LevelInvariants::one(); n_max + 1];
        let mut lambda2 = vec![1i8; n_max + 1];
        invariants[0] = LevelInvariants::default();
        lambda2[0] = 0;
        for n in 2..=n_max {
            let p = spf[n] as usize;
            let mut m = n;
            let mut a = 0;
            while m % p == 0 {
                m /= p;
                a += 1;
            }
            invariants[n] = invariants[m].times(LevelInvariants::local(p as u64, a));
            lambda2[n] = lambda2[m]
                * match a {
                    1 => -2,
                    2 => 1,
                    _ => 0,
                };
        }
        LevelTables { invariants, lambda2 }
    }

    pub fn n_max(&self) -> usize {
        self.invariants.len() - 1
    }

    pub fn cusp_table(&self, k: u32, n_max: usize) -> DimensionTable {
        let n_max = n_max.min(self.n_max());
        let values = (1..=n_max)
            .map(|n| self.invariants[n].cusp_dimension(k).max(0) as u64)
            .collect();
        DimensionTable { weight: k, provenance: Provenance::ClosedForm, values }
    }

    pub fn newform_table(&self, k: u32, n_max: usize) -> Result<DimensionTable> {
        let cusp = self.cusp_table(k, n_max);
        let n_max = cusp.values.len();
        let mut new = vec![0i64; n_max + 1];
        for d in 1..=n_max {
            let v = cusp.values[d - 1] as i64;
            if v == 0 {
                continue;
            }
            let mut m = 1;
            while d * m <= n_max {
                let l = self.lambda2[m] as i64;
                if l != 0 {
                    new[d * m] += l * v;
                }
                m += 1;
            }
        }
        let values = new[1..]
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                u64::try_from(v).map_err(|_| {
                    Error::Contract(format!("negative newform dimension {v} at N = {}, k = {k}", i + 1))
                })
            })
            .collect::<Result<_>>()?;
        Ok(DimensionTable { weight: k, provenance: Provenance::ConvolvedNew, values })
    }
}

/// Number of holomorphic newforms (`k >= 2` even) with analytic conductor
/// `N c_inf(k) <= Q`; with a ramified prime `q`, only levels `q N` with
/// `q N c_inf(k) <= Q` are counted.
pub fn empirical_count(q_max: f64, convention: ConductorConvention, ramified: Option<u64>) -> Result<u128> {
    Ok(empirical_counts(&[q_max], convention, ramified)?[0])
}

/// [`empirical_count`] at several bounds at once.
pub fn empirical_counts(
    bounds: &[f64],
    convention: ConductorConvention,
    ramified: Option<u64>,
) -> Result<Vec<u128>> {
    if bounds.iter().any(|&b| !(b >= 1.0)) {
        return Err(Error::invalid("Q", "must be at least 1"));
    }
    if let Some(q) = ramified {
        if !crate::primes::is_prime(q) {
            return Err(Error::NotPrime(q));
        }
    }
    let q = ramified.unwrap_or(1);
    let top = bounds.iter().copied().fold(1.0, f64::max);
    let rows: Vec<(u32, u64)> = lattice_rows(top, q, convention).collect();
    let level_max = rows.first().map_or(0, |&(_, n)| n * q) as usize;
    let tables = LevelTables::new(level_max);

    // prefix[k][N] = sum of newform dimensions at levels q, 2q, ..., Nq
    let per_weight: Vec<(u32, Vec<u128>)> = rows
        .par_iter()
        .map(|&(k, n_max)| {
            let table = tables.newform_table(k, (n_max * q) as usize)?;
            let mut prefix = Vec::with_capacity(n_max as usize + 1);
            let mut acc = 0u128;
            prefix.push(0);
            for n in 1..=n_max {
                acc += table.values[(n * q) as usize - 1] as u128;
                prefix.push(acc);
            }
            Ok((k, prefix))
        })
        .collect::<Result<_>>()?;

    Ok(bounds
        .iter()
        .map(|&b| {
            lattice_rows(b, q, convention)
                .map(|(k, n)| per_weight[(k / 2 - 1) as usize].1[n as usize])
                .sum()
        })
        .collect())
}

/// `|dim new(N, k) - (k-1)/12 M(N)| / max(1, (k-1)/12 M(N))`, with
/// `M = id * mu^2 * lambda_2`.
pub fn density_consistency(n: u64, k: u32) -> Result<f64> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::invalid("k", "density consistency needs an even weight >= 4"));
    }
    let m = MultiplicativeFunction::conductor_slice_mass().eval(&IdealFactorization::rational(n)?)?;
    let main = (k as f64 - 1.0) / 12.0 * m as f64;
    let exact = dim_newforms(n, k)? as f64;
    Ok((exact - main).abs() / main.max(1.0))
}

/// Power-law fit `count ~ C Q^exponent`.
pub fn fit_growth(points: &[(f64, f64)]) -> Result<GrowthFit<f64>> {
    fit_power_law(points)
}

/// Geometric grid of `points` values from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let ratio = (hi / lo).powf(1.0 / (points.max(2) - 1) as f64);
    (0..points).map(|i| lo * ratio.powi(i as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cusp_dimension_examples() {
        assert_eq!(dim_cusp_forms(1, 12).unwrap(), 1);
        assert_eq!(dim_cusp_forms(11, 2).unwrap(), 1);
        assert_eq!(dim_cusp_forms(1, 2).unwrap(), 0);
        assert_eq!(dim_cusp_forms(10, 4).unwrap(), 3);
        assert_eq!(dim_cusp_forms(5, 4).unwrap(), 1);
        assert_eq!(dim_cusp_forms(7, 3).unwrap(), 0);
        assert_eq!(dim_cusp_forms(7, 0).unwrap(), 0);
        assert!(dim_cusp_forms(0, 2).is_err());
    }

    /// Level one: dim S_k = floor(k/12) - 1 if k = 2 mod 12, else floor(k/12).
    #[test]
    fn level_one_matches_classical_formula() {
        for k in (4..=200).step_by(2) {
            let expected = if k % 12 == 2 { k / 12 - 1 } else { k / 12 };
            assert_eq!(dim_cusp_forms(1, k).unwrap(), expected as u64, "k = {k}");
        }
    }

    /// Genera of X_0(N) for small N.
    #[test]
    fn known_genera() {
        let table = [
            (1, 0), (2, 0), (10, 0), (11, 1), (14, 1), (15, 1), (17, 1), (19, 1), (20, 1), (21, 1),
            (22, 2), (23, 2), (24, 1), (25, 0), (26, 2), (27, 1), (28, 2), (29, 2), (30, 3), (36, 1),
            (37, 2), (49, 1), (64, 3), (100, 7), (121, 6), (144, 13), (389, 32),
        ];
        for (n, g) in table {
            assert_eq!(dim_cusp_forms(n, 2).unwrap(), g, "N = {n}");
        }
    }

    #[test]
    fn newform_examples() {
        assert_eq!(dim_newforms(10, 4).unwrap(), 1);
        for k in (2..=40).step_by(2) {
            assert_eq!(dim_newforms(1, k).unwrap(), dim_cusp_forms(1, k).unwrap());
        }
        for p in [11u64, 37, 389] {
            assert_eq!(dim_newforms(p, 2).unwrap(), dim_cusp_forms(p, 2).unwrap());
        }
        // known newform counts at weight 2
        assert_eq!(dim_newforms(22, 2).unwrap(), 0);
        assert_eq!(dim_newforms(37, 2).unwrap(), 2);
        assert_eq!(dim_newforms(30, 2).unwrap(), 1);
    }

    #[test]
    fn tables_agree_with_direct_evaluation() {
        let tables = LevelTables::new(600);
        for k in [2u32, 4, 6, 12, 24] {
            let cusp = tables.cusp_table(k, 600);
            let new = tables.newform_table(k, 600).unwrap();
            for n in (1..=600u64).step_by(7) {
                assert_eq!(cusp.get(n), Some(dim_cusp_forms(n, k).unwrap()));
                assert_eq!(new.get(n), Some(dim_newforms(n, k).unwrap()));
            }
        }
    }

    #[test]
    fn empirical_count_examples() {
        let c = |q| empirical_count(q, ConductorConvention::SquarePlusOne, None).unwrap();
        assert_eq!(c(55.0), 1);
        assert_eq!(c(5.0), 0);
        assert_eq!(c(25.0), 0);
        let grid = empirical_counts(&[5.0, 25.0, 55.0, 1000.0], ConductorConvention::SquarePlusOne, None).unwrap();
        assert_eq!(&grid[..3], &[0, 0, 1]);
        // brute force at Q = 1000
        let mut brute = 0u128;
        for k in (2u32..).step_by(2).take_while(|k| k * k < 1000) {
            for n in 1..=(1000 / (1 + k as u64 * k as u64)) {
                brute += dim_newforms(n, k).unwrap() as u128;
            }
        }
        assert_eq!(grid[3], brute);
    }

    #[test]
    fn ramified_count_uses_levels_divisible_by_q() {
        let got = empirical_count(5000.0, ConductorConvention::SquarePlusOne, Some(3)).unwrap();
        let mut brute = 0u128;
        for (n, k) in crate::conductor::enumerate_definite_lattice(5000.0, 3).unwrap() {
            brute += dim_newforms(3 * n, k).unwrap() as u128;
        }
        assert_eq!(got, brute);
        assert!(empirical_count(100.0, ConductorConvention::SquarePlusOne, Some(4)).is_err());
    }

    #[test]
    fn density_consistency_examples() {
        let d = density_consistency(1, 12).unwrap();
        // main term 11/12 < 1, so the denominator is 1
        assert!((d - 1.0 / 12.0).abs() < 1e-12);
        assert!(density_consistency(2, 100).unwrap() < 0.25);
        assert!(density_consistency(2, 2).is_err());
    }
}
