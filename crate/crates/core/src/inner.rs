//! Finite Blaschke products: validation, exact rational evaluation, truncated
//! power series, and the Takenaka–Malmquist basis of the model space `K_θ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{circle_points, inner_product, LaurentPolynomial, C64, ONE, ZERO};
use crate::spaces::{BasisLabel, OrthonormalBasis};

/// Default cap on the discarded L² mass of any truncated expansion.
pub const DEFAULT_TAIL_CAP: f64 = 1e-13;

/// Zeros with modulus above this need [`BlaschkeProduct::with_high_modulus`].
pub const DEFAULT_MODULUS_CAP: f64 = 0.95;

const UNIMODULAR_TOL: f64 = 1e-14;

/// `B(z) = c * prod_i (z - a_i) / (1 - conj(a_i) z)` with all `|a_i| < 1`, `|c| = 1`.
///
/// The value also caches its power series at the guard depth, the smallest
/// `N` for which the geometric tail bound drops below [`DEFAULT_TAIL_CAP`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "BlaschkeJson", try_from = "BlaschkeJson")]
pub struct BlaschkeProduct {
    zeros: Vec<C64>,
    constant: C64,
    guard: usize,
    series: LaurentPolynomial,
    conj_series: LaurentPolynomial,
}

/// Result of a unimodularity check on the circle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InnerCheck {
    pub pass: bool,
    pub max_deviation: f64,
    /// Set when the checked object is a truncated series whose tail bound
    /// exceeds the tolerance, so a failure is expected.
    pub tail_warning: bool,
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<C64>, constant: C64) -> Result<Self> {
        Self::build(zeros, constant, false)
    }

    /// Like [`new`](Self::new) but accepts zeros with modulus above [`DEFAULT_MODULUS_CAP`].
    pub fn with_high_modulus(zeros: Vec<C64>, constant: C64) -> Result<Self> {
        Self::build(zeros, constant, true)
    }

    /// `z^m`.
    pub fn monomial(m: usize) -> Result<Self> {
        Self::new(vec![ZERO; m], ONE)
    }

    fn build(zeros: Vec<C64>, constant: C64, allow_high: bool) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::ConstantInner);
        }
        for a in &zeros {
            if !a.re.is_finite() || !a.im.is_finite() || a.norm() >= 1.0 {
                return Err(Error::ZeroOutsideDisk { re: a.re, im: a.im });
            }
        }
        let rho = zeros.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if rho > DEFAULT_MODULUS_CAP && !allow_high {
            return Err(Error::ModulusAboveCap {
                modulus: rho,
                cap: DEFAULT_MODULUS_CAP,
            });
        }
        if !constant.re.is_finite() || (constant.norm() - 1.0).abs() > UNIMODULAR_TOL {
            return Err(Error::NotUnimodular(constant.norm()));
        }
        let guard = required_depth(zeros.len(), rho, DEFAULT_TAIL_CAP);
        let series = expand_series(&zeros, constant, guard).with_tail_bound(tail_bound_for(
            zeros.len(),
            rho,
            guard,
        ));
        let conj_series = series.conj_function();
        Ok(Self {
            zeros,
            constant,
            guard,
            series,
            conj_series,
        })
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn constant(&self) -> C64 {
        self.constant
    }

    /// Number of zeros counted with multiplicity.
    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// `max_i |a_i|`.
    pub fn max_modulus(&self) -> f64 {
        self.zeros.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// True when every zero sits at the origin, i.e. `B = c z^d`.
    pub fn is_monomial(&self) -> bool {
        self.zeros.iter().all(|a| *a == ZERO)
    }

    /// Numerical degree: past this index the power-series coefficients carry
    /// less than [`DEFAULT_TAIL_CAP`] of L² mass. Equals `degree()` for monomials.
    pub fn guard(&self) -> usize {
        self.guard
    }

    /// Power series truncated at [`guard`](Self::guard).
    pub fn series(&self) -> &LaurentPolynomial {
        &self.series
    }

    /// `conj(B)` on the circle, from the cached series.
    pub fn conj_series(&self) -> &LaurentPolynomial {
        &self.conj_series
    }

    /// `d * ρ^(N-d+1) / (1-ρ)`: geometric tail of the factor series.
    pub fn tail_bound_at(&self, n: usize) -> f64 {
        tail_bound_for(self.degree(), self.max_modulus(), n)
    }

    /// Smallest `N >= degree` whose tail bound is at most `cap`.
    pub fn required_depth(&self, cap: f64) -> usize {
        required_depth(self.degree(), self.max_modulus(), cap)
    }

    /// Coefficients `c_0..c_N` of the power series, rejecting `N` whose tail
    /// bound exceeds [`DEFAULT_TAIL_CAP`].
    pub fn expand(&self, n: usize) -> Result<LaurentPolynomial> {
        self.expand_with_cap(n, DEFAULT_TAIL_CAP)
    }

    pub fn expand_with_cap(&self, n: usize, cap: f64) -> Result<LaurentPolynomial> {
        if n < self.degree() {
            return Err(Error::Band(format!(
                "expansion depth {n} is below the degree {}",
                self.degree()
            )));
        }
        let tail = self.tail_bound_at(n);
        if tail > cap {
            return Err(Error::Truncation {
                tail,
                cap,
                required: self.required_depth(cap),
            });
        }
        Ok(expand_series(&self.zeros, self.constant, n).with_tail_bound(tail))
    }

    /// Exact rational evaluation.
    pub fn eval(&self, z: C64) -> C64 {
        self.zeros
            .iter()
            .fold(self.constant, |acc, a| acc * (z - a) / (ONE - a.conj() * z))
    }

    /// `max | |B(ζ)| - 1 |` over `samples` uniform circle points, rational form.
    pub fn verify_inner(&self, samples: usize, tol: f64) -> InnerCheck {
        let max_deviation = circle_points(samples.max(8))
            .map(|z| (self.eval(z).norm() - 1.0).abs())
            .fold(0.0, f64::max);
        InnerCheck {
            pass: max_deviation <= tol,
            max_deviation,
            tail_warning: false,
        }
    }

    /// Orthonormal basis of `K_θ` from the Takenaka–Malmquist recursion,
    /// expanded to degree `n` and re-orthonormalized once.
    pub fn tm_basis(&self, n: usize) -> Result<OrthonormalBasis> {
        let tail = self.tail_bound_at(n);
        if tail > DEFAULT_TAIL_CAP || n < self.degree() {
            return Err(Error::Truncation {
                tail,
                cap: DEFAULT_TAIL_CAP,
                required: self.required_depth(DEFAULT_TAIL_CAP),
            });
        }
        let mut prefix = LaurentPolynomial::one();
        let mut vectors = Vec::with_capacity(self.degree());
        for a in &self.zeros {
            let kernel = kernel_series(*a, n).scale(C64::new((1.0 - a.norm_sqr()).sqrt(), 0.0));
            vectors.push(prefix.multiply(&kernel).project_band(None, Some(n as i64)));
            prefix = prefix
                .multiply(&factor_series(*a, n))
                .project_band(None, Some(n as i64));
        }
        let vectors = gram_schmidt(vectors)
            .into_iter()
            .map(|v| v.with_tail_bound(tail))
            .collect();
        Ok(OrthonormalBasis::from_vectors(
            BasisLabel::Model {
                theta: self.clone(),
            },
            vectors,
        ))
    }

    /// Parses `"z"`, `"z^m"` or the JSON encoding.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let s = spec.trim();
        if s == "z" {
            return Self::monomial(1);
        }
        if let Some(exp) = s.strip_prefix("z^") {
            let m: usize = exp
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("bad monomial shorthand {s:?}")))?;
            if m == 0 {
                return Err(Error::ConstantInner);
            }
            return Self::monomial(m);
        }
        serde_json::from_str::<BlaschkeJson>(s)
            .map_err(|e| Error::Invalid(format!("inner function JSON: {e}")))
            .and_then(Self::try_from)
    }
}

/// Unimodularity check for a truncated series rather than the rational form.
pub fn verify_series(series: &LaurentPolynomial, samples: usize, tol: f64) -> InnerCheck {
    let max_deviation = circle_points(samples.max(8))
        .map(|z| (series.eval(z).norm() - 1.0).abs())
        .fold(0.0, f64::max);
    InnerCheck {
        pass: max_deviation <= tol,
        max_deviation,
        tail_warning: series.tail_bound() > tol,
    }
}

fn tail_bound_for(d: usize, rho: f64, n: usize) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    let exponent = (n + 1).saturating_sub(d) as i32;
    d as f64 * rho.powi(exponent) / (1.0 - rho)
}

fn required_depth(d: usize, rho: f64, cap: f64) -> usize {
    let mut n = d;
    while tail_bound_for(d, rho, n) > cap {
        n += 1;
    }
    n
}

// (z - a) / (1 - conj(a) z) = -a + (1 - |a|²) sum_{k>=1} conj(a)^(k-1) z^k
fn factor_series(a: C64, n: usize) -> LaurentPolynomial {
    if a == ZERO {
        return LaurentPolynomial::z_pow(1);
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(-a);
    let scale = 1.0 - a.norm_sqr();
    let mut p = ONE;
    for _ in 1..=n {
        coeffs.push(p * scale);
        p *= a.conj();
    }
    LaurentPolynomial::from_dense(0, coeffs)
}

// 1 / (1 - conj(a) z)
fn kernel_series(a: C64, n: usize) -> LaurentPolynomial {
    if a == ZERO {
        return LaurentPolynomial::one();
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut p = ONE;
    for _ in 0..=n {
        coeffs.push(p);
        p *= a.conj();
    }
    LaurentPolynomial::from_dense(0, coeffs)
}

fn expand_series(zeros: &[C64], constant: C64, n: usize) -> LaurentPolynomial {
    zeros
        .iter()
        .fold(LaurentPolynomial::constant(constant), |acc, a| {
            acc.multiply(&factor_series(*a, n))
                .project_band(None, Some(n as i64))
        })
}

fn gram_schmidt(vectors: Vec<LaurentPolynomial>) -> Vec<LaurentPolynomial> {
    let mut out: Vec<LaurentPolynomial> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v;
        for u in &out {
            let c = inner_product(&w, u);
            w = &w - &u.scale(c);
        }
        let norm = w.norm();
        out.push(w.scale(C64::new(1.0 / norm, 0.0)));
    }
    out
}

#[derive(Serialize, Deserialize)]
struct BlaschkeJson {
    zeros: Vec<(f64, f64)>,
    #[serde(default = "unit")]
    constant: (f64, f64),
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    allow_high_modulus: bool,
}

fn unit() -> (f64, f64) {
    (1.0, 0.0)
}

impl From<BlaschkeProduct> for BlaschkeJson {
    fn from(b: BlaschkeProduct) -> Self {
        let allow_high_modulus = b.max_modulus() > DEFAULT_MODULUS_CAP;
        BlaschkeJson {
            zeros: b.zeros.iter().map(|a| (a.re, a.im)).collect(),
            constant: (b.constant.re, b.constant.im),
            allow_high_modulus,
        }
    }
}

impl TryFrom<BlaschkeJson> for BlaschkeProduct {
    type Error = Error;

    fn try_from(j: BlaschkeJson) -> Result<Self> {
        let zeros = j
            .zeros
            .into_iter()
            .map(|(re, im)| C64::new(re, im))
            .collect();
        let c = C64::new(j.constant.0, j.constant.1);
        BlaschkeProduct::build(zeros, c, j.allow_high_modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn monomial_expansion_is_exact() {
        let b = BlaschkeProduct::monomial(2).unwrap();
        for n in [2, 5, 9] {
            let s = b.expand(n).unwrap();
            assert_eq!(s.chop(0.0), LaurentPolynomial::z_pow(2));
            assert_eq!(s.tail_bound(), 0.0);
        }
        assert_eq!(b.guard(), 2);
        assert!(b.is_monomial());
    }

    #[test]
    fn single_zero_expansion() {
        let b = BlaschkeProduct::new(vec![r(0.5)], ONE).unwrap();
        let s = b.expand_with_cap(3, f64::INFINITY).unwrap();
        let expected = [-0.5, 0.75, 0.375, 0.1875];
        for (k, e) in expected.iter().enumerate() {
            assert!((s.coeff(k as i64) - r(*e)).norm() < 1e-15);
        }
        // default cap rejects N = 3 for ρ = 1/2
        assert!(matches!(b.expand(3), Err(Error::Truncation { .. })));
    }

    #[test]
    fn constant_inner_is_rejected() {
        assert_eq!(BlaschkeProduct::new(vec![], ONE), Err(Error::ConstantInner));
        assert_eq!(
            BlaschkeProduct::parse_spec("z^0"),
            Err(Error::ConstantInner)
        );
    }

    #[test]
    fn validation_errors() {
        let e = BlaschkeProduct::new(vec![r(1.0)], ONE).unwrap_err();
        assert!(e.to_string().contains("zero outside open disk"));
        assert!(matches!(
            BlaschkeProduct::new(vec![r(0.97)], ONE),
            Err(Error::ModulusAboveCap { .. })
        ));
        assert!(BlaschkeProduct::with_high_modulus(vec![r(0.97)], ONE).is_ok());
        assert!(matches!(
            BlaschkeProduct::new(vec![r(0.1)], r(1.1)),
            Err(Error::NotUnimodular(_))
        ));
    }

    #[test]
    fn verify_inner_examples() {
        let b = BlaschkeProduct::monomial(2).unwrap();
        let chk = b.verify_inner(64, 1e-14);
        assert!(chk.pass);
        assert!(chk.max_deviation < 1e-15);

        let b = BlaschkeProduct::new(vec![r(0.5), C64::new(0.3, 0.4)], ONE).unwrap();
        let chk = b.verify_inner(256, 1e-14);
        assert!(chk.pass, "{chk:?}");

        let b = BlaschkeProduct::with_high_modulus(vec![r(0.99)], ONE).unwrap();
        let truncated = b.expand_with_cap(16, f64::INFINITY).unwrap();
        let chk = verify_series(&truncated, 256, 1e-13);
        assert!(!chk.pass);
        assert!(chk.tail_warning);
    }

    #[test]
    fn guard_series_matches_rational_form() {
        let b = BlaschkeProduct::new(
            vec![C64::new(0.3, -0.6), r(-0.8), C64::new(0.1, 0.2)],
            C64::new(0.6, 0.8),
        )
        .unwrap();
        let s = b.series();
        for z in circle_points(256) {
            assert!((s.eval(z) - b.eval(z)).norm() < s.tail_bound() + 1e-13);
        }
        assert!(verify_series(s, 256, 1e-12).pass);
    }

    #[test]
    fn tm_basis_examples() {
        let b = BlaschkeProduct::monomial(2).unwrap();
        let basis = b.tm_basis(2).unwrap();
        assert_eq!(basis.vector(0).chop(0.0), LaurentPolynomial::one());
        assert_eq!(basis.vector(1).chop(0.0), LaurentPolynomial::z_pow(1));

        let b = BlaschkeProduct::new(vec![r(0.5)], ONE).unwrap();
        let basis = b.tm_basis(b.guard()).unwrap();
        let e = basis.vector(0);
        for k in 0..10 {
            let expected = 3f64.sqrt() / 2.0 * 0.5f64.powi(k);
            assert!((e.coeff(k as i64) - r(expected)).norm() < 1e-14);
        }

        let b = BlaschkeProduct::new(vec![ZERO, r(0.5)], ONE).unwrap();
        let basis = b.tm_basis(b.guard()).unwrap();
        assert!(basis.vector(0).max_abs_diff(&LaurentPolynomial::one()) < 1e-15);
        let e1 = basis.vector(1);
        assert!(e1.coeff(0).norm() < 1e-15);
        for k in 1..10 {
            let expected = 3f64.sqrt() / 2.0 * 0.5f64.powi(k - 1);
            assert!((e1.coeff(k as i64) - r(expected)).norm() < 1e-14);
        }
    }

    #[test]
    fn tm_basis_is_orthonormal_and_in_model_space() {
        let b = BlaschkeProduct::new(
            vec![C64::new(0.5, 0.2), r(-0.7), C64::new(0.0, 0.6), r(0.1)],
            ONE,
        )
        .unwrap();
        let basis = b.tm_basis(b.guard()).unwrap();
        let gram = basis.gram();
        for i in 0..4 {
            for j in 0..4 {
                let target = if i == j { ONE } else { ZERO };
                assert!((gram[(i, j)] - target).norm() < 1e-11);
            }
        }
        // orthogonal to θ z^k
        for k in 0..40 {
            let tz = b.series().shift(k);
            for v in basis.vectors() {
                assert!(inner_product(&v, &tz).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn parse_spec_forms() {
        assert_eq!(BlaschkeProduct::parse_spec("z^3").unwrap().degree(), 3);
        assert_eq!(BlaschkeProduct::parse_spec(" z ").unwrap().degree(), 1);
        let b =
            BlaschkeProduct::parse_spec(r#"{"zeros": [[0.5, 0], [0.3, 0.4]], "constant": [0, 1]}"#)
                .unwrap();
        assert_eq!(b.degree(), 2);
        assert_eq!(b.constant(), C64::new(0.0, 1.0));
        let err = BlaschkeProduct::parse_spec(r#"{"zeros": [[1.5, 0]]}"#).unwrap_err();
        assert!(err.to_string().contains("zero outside open disk"));
        let j = serde_json::to_string(&b).unwrap();
        assert_eq!(BlaschkeProduct::parse_spec(&j).unwrap(), b);
    }
}
