//! Arrays indexed by the integral ideals of bounded norm, and Dirichlet
//! convolution of such arrays with multiplicative functions.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{ideals_up_to, IdealFactorization, NumberFieldSpec};
use crate::multiplicative::MultiplicativeFunction;

/// The ideals of norm at most `bound`, in the canonical enumeration order.
#[derive(Clone, Debug)]
pub struct IdealLattice {
    bound: f64,
    ideals: Vec<IdealFactorization>,
    index: HashMap<IdealFactorization, usize>,
    /// For each ideal `a`, the index pairs `(b, a / b)` over all divisors `b`.
    divisor_pairs: Vec<Vec<(u32, u32)>>,
}

impl IdealLattice {
    pub fn new(field: &NumberFieldSpec, bound: f64) -> Self {
        let ideals = ideals_up_to(field, bound);
        let index: HashMap<IdealFactorization, usize> =
            ideals.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let divisor_pairs = ideals
            .par_iter()
            .map(|a| {
                Self::divisors(a)
                    .iter()
                    .map(|b| {
                        let c = b.quotient_of(a).expect("b divides a");
                        (index[b] as u32, index[&c] as u32)
                    })
                    .collect()
            })
            .collect();
        IdealLattice { bound, ideals, index, divisor_pairs }
    }

    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn ideals(&self) -> &[IdealFactorization] {
        &self.ideals
    }

    pub fn index_of(&self, a: &IdealFactorization) -> Option<usize> {
        self.index.get(a).copied()
    }

    /// All divisors of `a`, as factorizations.
    fn divisors(a: &IdealFactorization) -> Vec<IdealFactorization> {
        let mut out = vec![Vec::new()];
        for &(q, r) in a.factors() {
            out = out
                .into_iter()
                .flat_map(|base: Vec<_>| {
                    (0..=r).map(move |j| {
                        let mut v = base.clone();
                        if j > 0 {
                            v.push((q, j));
                        }
                        v
                    })
                })
                .collect();
        }
        out.into_iter()
            .map(|f| IdealFactorization::new(f).expect("divisor of a bounded ideal"))
            .collect()
    }

    /// `(f * values)(a) = sum_{b | a} f(b) values(a / b)` for every ideal `a`.
    pub fn convolve(&self, f: &MultiplicativeFunction, values: &[i128]) -> Result<Vec<i128>> {
        if values.len() != self.len() {
            return Err(Error::invalid(
                "values",
                format!("expected {} entries, got {}", self.len(), values.len()),
            ));
        }
        let f_values: Vec<i128> = self.ideals.par_iter().map(|b| f.eval(b)).collect::<Result<_>>()?;
        self.divisor_pairs
            .par_iter()
            .map(|pairs| {
                pairs.iter().try_fold(0i128, |acc, &(b, c)| {
                    f_values[b as usize]
                        .checked_mul(values[c as usize])
                        .and_then(|t| acc.checked_add(t))
                        .ok_or(Error::Overflow("lattice convolution"))
                })
            })
            .collect()
    }
}
