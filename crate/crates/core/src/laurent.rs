//! Laurent polynomials on the unit circle.
//!
//! A [`LaurentPolynomial`] stores the Fourier coefficients `c_k` of a function
//! on `T` over a contiguous, possibly asymmetric band `[lo, hi]`. Inner
//! products are taken with respect to normalized Lebesgue measure, so by
//! Parseval `<f, g> = sum_k c_k(f) * conj(c_k(g))`.
//!
//! Every value also carries a `tail_bound`: an upper bound on the L² mass that
//! was discarded when the value was produced by truncating an infinite series
//! (0 for exact polynomials). Arithmetic propagates the bound conservatively;
//! it is never consulted by the arithmetic itself.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Serialize, Deserialize)]
#[serde(into = "LaurentJson", try_from = "LaurentJson")]
pub struct LaurentPolynomial {
    lo: i64,
    coeffs: Vec<C64>,
    tail_bound: f64,
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        Self {
            lo: 0,
            coeffs: Vec::new(),
            tail_bound: 0.0,
        }
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(0, c)
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    /// `c * z^k`
    pub fn monomial(k: i64, c: C64) -> Self {
        Self {
            lo: k,
            coeffs: vec![c],
            tail_bound: 0.0,
        }
    }

    /// `z^k` with unit coefficient; negative `k` gives powers of `conj(z)`.
    pub fn z_pow(k: i64) -> Self {
        Self::monomial(k, ONE)
    }

    /// Dense constructor: `coeffs[i]` is the coefficient of `z^(lo + i)`.
    pub fn from_dense(lo: i64, coeffs: Vec<C64>) -> Self {
        Self {
            lo,
            coeffs,
            tail_bound: 0.0,
        }
    }

    /// Builds a polynomial from `(degree, coefficient)` pairs. Repeated degrees add up.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C64)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return Self::zero();
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![ZERO; (hi - lo + 1) as usize];
        for (k, c) in terms {
            coeffs[(k - lo) as usize] += c;
        }
        Self::from_dense(lo, coeffs)
    }

    /// Real-coefficient shorthand, convenient in tests: `from_real(&[(1, 1.0), (-1, 2.0)])`.
    pub fn from_real(terms: &[(i64, f64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(k, c)| (k, C64::new(c, 0.0))))
    }

    pub fn with_tail_bound(mut self, tail_bound: f64) -> Self {
        self.tail_bound = tail_bound;
        self
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// The storage band `[lo, hi]`, or `None` for the empty polynomial.
    pub fn band(&self) -> Option<(i64, i64)> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some((self.lo, self.hi()))
        }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, k: i64) -> C64 {
        let i = k - self.lo;
        if i < 0 || i >= self.coeffs.len() as i64 {
            ZERO
        } else {
            self.coeffs[i as usize]
        }
    }

    /// Dense coefficient slice over the band.
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Nonzero `(degree, coefficient)` pairs in increasing degree.
    pub fn terms(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(move |(i, c)| (self.lo + i as i64, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// Smallest and largest degree carrying a coefficient of modulus above `eps`.
    pub fn support(&self, eps: f64) -> Option<(i64, i64)> {
        let first = self.coeffs.iter().position(|c| c.norm() > eps)?;
        let last = self.coeffs.iter().rposition(|c| c.norm() > eps)?;
        Some((self.lo + first as i64, self.lo + last as i64))
    }

    /// Largest `|k|` over the nonzero coefficients; 0 for constants.
    pub fn degree(&self) -> usize {
        match self.support(0.0) {
            Some((lo, hi)) => lo.unsigned_abs().max(hi.unsigned_abs()) as usize,
            None => 0,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Coefficient-wise convolution, i.e. pointwise product on `T`.
    pub fn multiply(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero().with_tail_bound(self.tail_bound + other.tail_bound);
        }
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (o, b) in out[i..].iter_mut().zip(&other.coeffs) {
                *o += a * b;
            }
        }
        let tail = self.tail_bound * other.norm()
            + other.tail_bound * self.norm()
            + self.tail_bound * other.tail_bound;
        Self {
            lo: self.lo + other.lo,
            coeffs: out,
            tail_bound: tail,
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            tail_bound: self.tail_bound * c.norm(),
        }
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            lo: self.lo + k,
            coeffs: self.coeffs.clone(),
            tail_bound: self.tail_bound,
        }
    }

    /// Keeps the coefficients with degree in `[lo, hi]`; `None` means unbounded.
    pub fn project_band(&self, lo: Option<i64>, hi: Option<i64>) -> Self {
        let Some((self_lo, self_hi)) = self.band() else {
            return self.clone();
        };
        let new_lo = lo.map_or(self_lo, |l| l.max(self_lo));
        let new_hi = hi.map_or(self_hi, |h| h.min(self_hi));
        if new_lo > new_hi {
            return Self::zero().with_tail_bound(self.tail_bound);
        }
        let a = (new_lo - self_lo) as usize;
        let b = (new_hi - self_lo) as usize;
        Self {
            lo: new_lo,
            coeffs: self.coeffs[a..=b].to_vec(),
            tail_bound: self.tail_bound,
        }
    }

    /// Riesz projection onto `H²` (degrees `>= 0`).
    pub fn plus_part(&self) -> Self {
        self.project_band(Some(0), None)
    }

    /// Projection onto `H²₋` (degrees `<= -1`).
    pub fn minus_part(&self) -> Self {
        self.project_band(None, Some(-1))
    }

    /// `f ↦ conj(f)` on `T`: `(conj f)_k = conj(c_{-k})`.
    pub fn conj_function(&self) -> Self {
        let Some((_, hi)) = self.band() else {
            return self.clone();
        };
        Self {
            lo: -hi,
            coeffs: self.coeffs.iter().rev().map(|c| c.conj()).collect(),
            tail_bound: self.tail_bound,
        }
    }

    /// The antilinear involution `Jf = conj(z) * conj(f)`, with `(Jf)_j = conj(c_{-j-1})`.
    pub fn involution_j(&self) -> Self {
        self.conj_function().shift(-1)
    }

    /// Point evaluation `sum_k c_k ζ^k`.
    pub fn eval(&self, zeta: C64) -> C64 {
        if self.coeffs.is_empty() {
            return ZERO;
        }
        // Horner in ζ over the dense band, then scale by ζ^lo.
        let mut acc = ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * zeta + c;
        }
        acc * zeta.powi(self.lo as i32)
    }

    /// Maximum of `|f|` over `samples` uniform points of the circle.
    pub fn sup_norm_sampled(&self, samples: usize) -> f64 {
        circle_points(samples)
            .map(|z| self.eval(z).norm())
            .fold(0.0, f64::max)
    }

    /// Zeroes coefficients with modulus `<= eps` and trims the band to what is left.
    pub fn chop(&self, eps: f64) -> Self {
        let coeffs: Vec<C64> = self
            .coeffs
            .iter()
            .map(|c| if c.norm() <= eps { ZERO } else { *c })
            .collect();
        Self {
            lo: self.lo,
            coeffs,
            tail_bound: self.tail_bound,
        }
        .trim()
    }

    /// Drops exact zeros at both ends of the band.
    pub fn trim(mut self) -> Self {
        match (
            self.coeffs.iter().position(|c| *c != ZERO),
            self.coeffs.iter().rposition(|c| *c != ZERO),
        ) {
            (Some(a), Some(b)) => {
                self.coeffs.truncate(b + 1);
                self.coeffs.drain(..a);
                self.lo += a as i64;
                self
            }
            _ => Self::zero().with_tail_bound(self.tail_bound),
        }
    }

    /// Largest coefficient-wise deviation `max_k |a_k - b_k|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other)
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// L² distance `‖a - b‖`.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
}

/// `<f, g> = sum_k c_k(f) conj(c_k(g))`, linear in `f`, antilinear in `g`.
pub fn inner_product(f: &LaurentPolynomial, g: &LaurentPolynomial) -> C64 {
    let (Some((flo, fhi)), Some((glo, ghi))) = (f.band(), g.band()) else {
        return ZERO;
    };
    let lo = flo.max(glo);
    let hi = fhi.min(ghi);
    if lo > hi {
        return ZERO;
    }
    let fs = &f.coeffs[(lo - flo) as usize..=(hi - flo) as usize];
    let gs = &g.coeffs[(lo - glo) as usize..=(hi - glo) as usize];
    fs.iter().zip(gs).map(|(a, b)| a * b.conj()).sum()
}

/// `n` equally spaced points `exp(2πi j / n)` on the unit circle.
pub fn circle_points(n: usize) -> impl Iterator<Item = C64> {
    (0..n).map(move |j| C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
}

impl Add<&LaurentPolynomial> for &LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn add(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        combine(self, rhs, ONE)
    }
}

impl Sub<&LaurentPolynomial> for &LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn sub(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        combine(self, rhs, -ONE)
    }
}

impl Add for LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn add(self, rhs: LaurentPolynomial) -> LaurentPolynomial {
        &self + &rhs
    }
}

impl Sub for LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn sub(self, rhs: LaurentPolynomial) -> LaurentPolynomial {
        &self - &rhs
    }
}

impl Mul<&LaurentPolynomial> for &LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn mul(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        self.multiply(rhs)
    }
}

impl Mul for LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn mul(self, rhs: LaurentPolynomial) -> LaurentPolynomial {
        self.multiply(&rhs)
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn neg(self) -> LaurentPolynomial {
        self.scale(-ONE)
    }
}

// a + s * b
fn combine(a: &LaurentPolynomial, b: &LaurentPolynomial, s: C64) -> LaurentPolynomial {
    let tail = a.tail_bound + b.tail_bound;
    match (a.band(), b.band()) {
        (None, None) => LaurentPolynomial::zero().with_tail_bound(tail),
        (Some(_), None) => a.clone().with_tail_bound(tail),
        (None, Some(_)) => b.scale(s).with_tail_bound(tail),
        (Some((alo, ahi)), Some((blo, bhi))) => {
            let lo = alo.min(blo);
            let hi = ahi.max(bhi);
            let mut coeffs = vec![ZERO; (hi - lo + 1) as usize];
            let off_a = (alo - lo) as usize;
            for (o, c) in coeffs[off_a..].iter_mut().zip(&a.coeffs) {
                *o += c;
            }
            let off_b = (blo - lo) as usize;
            for (o, c) in coeffs[off_b..].iter_mut().zip(&b.coeffs) {
                *o += s * c;
            }
            LaurentPolynomial {
                lo,
                coeffs,
                tail_bound: tail,
            }
        }
    }
}

/// Equal as functions (same coefficients at every degree) with equal tail bounds;
/// explicit zeros in the stored band do not matter.
impl PartialEq for LaurentPolynomial {
    fn eq(&self, other: &Self) -> bool {
        if self.tail_bound != other.tail_bound {
            return false;
        }
        match (self.band(), other.band()) {
            (None, None) => true,
            (a, b) => {
                let lo = a.map_or(i64::MAX, |x| x.0).min(b.map_or(i64::MAX, |x| x.0));
                let hi = a.map_or(i64::MIN, |x| x.1).max(b.map_or(i64::MIN, |x| x.1));
                (lo..=hi).all(|k| self.coeff(k) == other.coeff(k))
            }
        }
    }
}

impl fmt::Debug for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)z^{}", c.re, c.im, k)?;
        }
        if first {
            write!(f, "0")?;
        }
        if self.tail_bound > 0.0 {
            write!(f, " [tail <= {:.1e}]", self.tail_bound)?;
        }
        Ok(())
    }
}

/// Wire format: `{"coeffs": [[k, re, im], ...]}`; omitted degrees are zero.
#[derive(Serialize, Deserialize)]
struct LaurentJson {
    coeffs: Vec<(i64, f64, f64)>,
    #[serde(default, skip_serializing_if = "is_zero_f64")]
    tail_bound: f64,
}

fn is_zero_f64(x: &f64) -> bool {
    *x == 0.0
}

impl From<LaurentPolynomial> for LaurentJson {
    fn from(p: LaurentPolynomial) -> Self {
        LaurentJson {
            coeffs: p.terms().map(|(k, c)| (k, c.re, c.im)).collect(),
            tail_bound: p.tail_bound,
        }
    }
}

impl TryFrom<LaurentJson> for LaurentPolynomial {
    type Error = Error;

    fn try_from(j: LaurentJson) -> Result<Self> {
        if j.coeffs
            .iter()
            .any(|(_, re, im)| !re.is_finite() || !im.is_finite())
        {
            return Err(Error::Invalid("non-finite Laurent coefficient".into()));
        }
        if j.tail_bound.is_nan() || j.tail_bound < 0.0 {
            return Err(Error::Invalid("tail_bound must be nonnegative".into()));
        }
        let p = LaurentPolynomial::from_terms(
            j.coeffs
                .into_iter()
                .map(|(k, re, im)| (k, C64::new(re, im))),
        );
        Ok(p.with_tail_bound(j.tail_bound))
    }
}
