//! Exact comparisons between products of integers raised to rational
//! powers. An inequality such as `x^{p/q} ≤ y` is decided as `x^p ≤ y^q`
//! over big integers; no floating point is involved.

use crate::{Int, Rat};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::cmp::Ordering;

/// `∏ baseᵢ^{expᵢ}` with positive integer bases and rational exponents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PowerProduct {
    factors: Vec<(BigUint, Rat)>,
}

impl PowerProduct {
    pub fn one() -> Self {
        Self::default()
    }

    /// Multiply by `base^exp`. Panics on a non-positive base.
    pub fn times(mut self, base: Int, exp: Rat) -> Self {
        assert!(base > 0, "power base must be positive, got {base}");
        if base != 1 && !exp.is_zero() {
            self.factors.push((BigUint::from(base as u128), exp));
        }
        self
    }

    pub fn times_int(self, base: Int, exp: i64) -> Self {
        self.times(base, Rat::from_integer(exp as Int))
    }

    /// Floating-point value, for display only.
    pub fn approx(&self) -> f64 {
        self.factors
            .iter()
            .map(|(b, e)| {
                b.to_f64()
                    .unwrap_or(f64::INFINITY)
                    .powf(*e.numer() as f64 / *e.denom() as f64)
            })
            .product()
    }

    /// Exact ordering of `self` against `other`.
    pub fn cmp_exact(&self, other: &PowerProduct) -> Ordering {
        let denom = self
            .factors
            .iter()
            .chain(&other.factors)
            .fold(1i128, |acc, (_, e)| acc.lcm(e.denom()));
        let mut lhs = BigUint::one();
        let mut rhs = BigUint::one();
        let mut raise = |b: &BigUint, e: &Rat, on_lhs: bool| {
            let k = (e * Rat::from_integer(denom)).to_integer();
            let p = b.pow(k.unsigned_abs() as u32);
            // negative exponents move to the other side
            if (k > 0) == on_lhs {
                lhs *= p;
            } else {
                rhs *= p;
            }
        };
        for (b, e) in &self.factors {
            raise(b, e, true);
        }
        for (b, e) in &other.factors {
            raise(b, e, false);
        }
        lhs.cmp(&rhs)
    }

    pub fn le(&self, other: &PowerProduct) -> bool {
        self.cmp_exact(other) != Ordering::Greater
    }

    pub fn lt(&self, other: &PowerProduct) -> bool {
        self.cmp_exact(other) == Ordering::Less
    }
}

/// `⌊x^{1/k}⌋`.
pub fn floor_nth_root(x: &BigUint, k: u32) -> BigUint {
    x.nth_root(k)
}

/// `⌈x^{1/k}⌉`: the smallest `r` with `r^k ≥ x`.
pub fn ceil_nth_root(x: &BigUint, k: u32) -> BigUint {
    let r = x.nth_root(k);
    if &r.pow(k) == x {
        r
    } else {
        r + 1u32
    }
}
