//! Seeded random families for the suites.
//!
//! Streams come from xoshiro256++ whose 256-bit state is filled by SplitMix64
//! from a 64-bit seed (the standard `seed_from_u64` construction). Case `i` of
//! a family with base seed `s` and stream tag `t` uses the seed
//! `s ^ (t << 32) ^ i`, so every case is reproducible on its own and suites
//! can run cases in any order.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::inner::BlaschkeProduct;
use crate::laurent::{LaurentPolynomial, C64};

pub type CaseRng = Xoshiro256PlusPlus;

/// Generator for case `index` of stream `tag`.
pub fn case_rng(seed: u64, tag: u32, index: usize) -> CaseRng {
    CaseRng::seed_from_u64(seed ^ ((tag as u64) << 32) ^ index as u64)
}

/// Uniform in the square `[-1, 1] × [-1, 1]`.
pub fn random_complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
}

/// Degree uniform in `1..=max_degree`, zeros with modulus uniform in
/// `[0, max_modulus]` and uniform argument, random unimodular constant.
pub fn random_blaschke(rng: &mut impl Rng, max_degree: usize, max_modulus: f64) -> BlaschkeProduct {
    let d = rng.random_range(1..=max_degree);
    let zeros = (0..d)
        .map(|_| {
            C64::from_polar(
                rng.random_range(0.0..=max_modulus),
                rng.random_range(0.0..TAU),
            )
        })
        .collect();
    let constant = C64::from_polar(1.0, rng.random_range(0.0..TAU));
    BlaschkeProduct::new(zeros, constant).expect("zeros drawn inside the disk")
}

/// Random coefficients on every degree of `[lo, hi]`.
pub fn random_poly(rng: &mut impl Rng, lo: i64, hi: i64) -> LaurentPolynomial {
    LaurentPolynomial::from_dense(lo, (lo..=hi).map(|_| random_complex(rng)).collect())
}

/// Trigonometric polynomial on `[lo, hi]` with `-max_degree <= lo <= 0 <= hi <= max_degree`.
pub fn random_symbol(rng: &mut impl Rng, max_degree: usize) -> LaurentPolynomial {
    let d = max_degree as i64;
    let lo = rng.random_range(-d..=0);
    let hi = rng.random_range(0..=d);
    random_poly(rng, lo, hi)
}

/// Analytic polynomial of degree at most `degree`.
pub fn random_analytic(rng: &mut impl Rng, degree: usize) -> LaurentPolynomial {
    random_poly(rng, 0, degree as i64)
}
