//! Truncated Toeplitz operators between model spaces and dual truncated
//! Toeplitz operators between their complements, as explicit matrices.
//!
//! A dual operator `D: K_θ^⊥ → K_α^⊥` is stored as the four blocks
//!
//! ```text
//! [ That      GammaCheck ]   θH² → αH²   |  H²₋ → αH²
//! [ GammaHat  TCheck     ]   θH² → H²₋   |  H²₋ → H²₋
//! ```
//!
//! in the bases `θz^j`, `αz^i` and `z̄^(k+1)`, `0 <= i, j, k <= M`. For a
//! symbol `φ` every entry is a single Fourier coefficient:
//!
//! * `That[i][j]       = (ᾱ φ θ)^(i - j)`
//! * `GammaHat[i][j]   = (φ θ)^(-i - 1 - j)`
//! * `GammaCheck[i][j] = (ᾱ φ)^(i + j + 1)`
//! * `TCheck[i][j]     = φ^(j - i)`
//!
//! so the finite matrix is the exact compression of `D_φ` to the finite
//! sections. Only identities that move a vector past index `M` see the cut.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inner::BlaschkeProduct;
use crate::laurent::{inner_product, LaurentPolynomial, C64, ZERO};
use crate::linalg::{CMatrix, CVector};
use crate::spaces::{basis_kperp, basis_model, OrthonormalBasis};

/// A trigonometric-polynomial symbol split as `φ = φ⁻ + φ⁺`, with `φ̂(0)` in `φ⁺`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "LaurentPolynomial", into = "LaurentPolynomial")]
pub struct SymbolFunction {
    pub value: LaurentPolynomial,
    pub plus_part: LaurentPolynomial,
    pub minus_part: LaurentPolynomial,
    pub mean: C64,
}

impl SymbolFunction {
    pub fn new(value: LaurentPolynomial) -> Self {
        Self {
            plus_part: value.plus_part(),
            minus_part: value.minus_part(),
            mean: value.coeff(0),
            value,
        }
    }

    /// `max(hi, -lo, 0)` over the stored band.
    pub fn degree(&self) -> usize {
        match self.value.band() {
            None => 0,
            Some((lo, hi)) => hi.max(-lo).max(0) as usize,
        }
    }

    /// `φ̄`.
    pub fn conj(&self) -> Self {
        Self::new(self.value.conj_function())
    }
}

impl From<LaurentPolynomial> for SymbolFunction {
    fn from(value: LaurentPolynomial) -> Self {
        Self::new(value)
    }
}

impl From<SymbolFunction> for LaurentPolynomial {
    fn from(s: SymbolFunction) -> Self {
        s.value
    }
}

/// Anything with coordinate bases on both sides and a matrix action between them.
pub trait LinearMap {
    fn domain(&self) -> OrthonormalBasis;
    fn codomain(&self) -> OrthonormalBasis;
    /// Matrix-vector product in coordinates.
    fn apply(&self, x: &CVector) -> Result<CVector>;
}

/// A matrix between two labeled bases.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseComplexMatrix {
    pub entries: CMatrix,
    pub domain: OrthonormalBasis,
    pub codomain: OrthonormalBasis,
}

impl DenseComplexMatrix {
    pub fn new(
        entries: CMatrix,
        domain: OrthonormalBasis,
        codomain: OrthonormalBasis,
    ) -> Result<Self> {
        if entries.shape() != (codomain.len(), domain.len()) {
            return Err(Error::DimensionMismatch {
                expected: codomain.len() * domain.len(),
                got: entries.len(),
            });
        }
        Ok(Self {
            entries,
            domain,
            codomain,
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
        }
    }
}

impl LinearMap for DenseComplexMatrix {
    fn domain(&self) -> OrthonormalBasis {
        self.domain.clone()
    }

    fn codomain(&self) -> OrthonormalBasis {
        self.codomain.clone()
    }

    fn apply(&self, x: &CVector) -> Result<CVector> {
        check_len(self.entries.ncols(), x.len())?;
        Ok(&self.entries * x)
    }
}

/// `A_φ^{θ,α}`: entries `<φ e_j, e_i>` over the Takenaka–Malmquist bases.
pub fn build_tto(
    theta: &BlaschkeProduct,
    alpha: &BlaschkeProduct,
    phi: &SymbolFunction,
) -> DenseComplexMatrix {
    let domain = basis_model(theta);
    let codomain = basis_model(alpha);
    let images: Vec<_> = domain
        .vectors()
        .iter()
        .map(|e| phi.value.multiply(e))
        .collect();
    let targets = codomain.vectors();
    let entries = CMatrix::from_fn(targets.len(), images.len(), |i, j| {
        inner_product(&images[j], &targets[i])
    });
    DenseComplexMatrix {
        entries,
        domain,
        codomain,
    }
}

/// An operator `K⊥(θ)@M → K⊥(α)@M` in block form.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperator {
    pub theta: BlaschkeProduct,
    pub alpha: BlaschkeProduct,
    pub m: usize,
    /// Width of the band next to the cut where entries of a built operator
    /// feel the truncation of the symbol; checks stay clear of it.
    pub edge: usize,
    pub that: CMatrix,
    pub gamma_check: CMatrix,
    pub gamma_hat: CMatrix,
    pub t_check: CMatrix,
}

impl BlockOperator {
    /// Side length `M + 1` of each block.
    pub fn block_dim(&self) -> usize {
        self.m + 1
    }

    pub fn identity(theta: &BlaschkeProduct, m: usize) -> Self {
        let n = m + 1;
        Self {
            theta: theta.clone(),
            alpha: theta.clone(),
            m,
            edge: 0,
            that: CMatrix::identity(n, n),
            gamma_check: CMatrix::zeros(n, n),
            gamma_hat: CMatrix::zeros(n, n),
            t_check: CMatrix::identity(n, n),
        }
    }

    pub fn full_matrix(&self) -> CMatrix {
        let n = self.block_dim();
        let mut full = CMatrix::zeros(2 * n, 2 * n);
        full.view_mut((0, 0), (n, n)).copy_from(&self.that);
        full.view_mut((0, n), (n, n)).copy_from(&self.gamma_check);
        full.view_mut((n, 0), (n, n)).copy_from(&self.gamma_hat);
        full.view_mut((n, n), (n, n)).copy_from(&self.t_check);
        full
    }

    /// `D*: K⊥(α)@M → K⊥(θ)@M`.
    pub fn adjoint(&self) -> Self {
        Self {
            theta: self.alpha.clone(),
            alpha: self.theta.clone(),
            m: self.m,
            edge: self.edge,
            that: self.that.adjoint(),
            gamma_check: self.gamma_hat.adjoint(),
            gamma_hat: self.gamma_check.adjoint(),
            t_check: self.t_check.adjoint(),
        }
    }

    /// Adds `c · u⊗v`, the map `x ↦ c <x, v> u`, with `v ∈ K_θ^⊥` and `u ∈ K_α^⊥`.
    pub fn add_dyad(&mut self, u: &LaurentPolynomial, v: &LaurentPolynomial, c: C64) {
        let y = basis_kperp(&self.alpha, self.m).coordinates(u);
        let x = basis_kperp(&self.theta, self.m).coordinates(v);
        let n = self.block_dim();
        for i in 0..2 * n {
            for j in 0..2 * n {
                let d = c * y[i] * x[j].conj();
                if d == ZERO {
                    continue;
                }
                match (i < n, j < n) {
                    (true, true) => self.that[(i, j)] += d,
                    (true, false) => self.gamma_check[(i, j - n)] += d,
                    (false, true) => self.gamma_hat[(i - n, j)] += d,
                    (false, false) => self.t_check[(i - n, j - n)] += d,
                }
            }
        }
    }

    /// Number of leading indices per block on which identities of the
    /// infinite-dimensional operator can be checked exactly.
    ///
    /// Conditions pairing entries with expansion coefficients of `θ` or `α`
    /// reach `guard` indices further, hence `M - guard_θ - guard_α - edge`.
    pub fn interior_len(&self) -> Result<usize> {
        let reserved = self.theta.guard() + self.alpha.guard() + self.edge;
        if self.m < reserved + 2 {
            return Err(Error::GuardBand {
                m: self.m,
                required: reserved + 2,
            });
        }
        Ok(self.m - reserved)
    }
}

impl LinearMap for BlockOperator {
    fn domain(&self) -> OrthonormalBasis {
        basis_kperp(&self.theta, self.m)
    }

    fn codomain(&self) -> OrthonormalBasis {
        basis_kperp(&self.alpha, self.m)
    }

    fn apply(&self, x: &CVector) -> Result<CVector> {
        let n = self.block_dim();
        check_len(2 * n, x.len())?;
        let top = x.rows(0, n);
        let bottom = x.rows(n, n);
        let upper = &self.that * top + &self.gamma_check * bottom;
        let lower = &self.gamma_hat * top + &self.t_check * bottom;
        Ok(CVector::from_iterator(
            2 * n,
            upper.iter().chain(lower.iter()).copied(),
        ))
    }
}

/// Splits a full `2(M+1)`-square matrix on `K⊥(θ)@M → K⊥(α)@M` into blocks.
pub fn split_blocks(
    theta: &BlaschkeProduct,
    alpha: &BlaschkeProduct,
    m: usize,
    full: &CMatrix,
) -> Result<BlockOperator> {
    let n = m + 1;
    if full.shape() != (2 * n, 2 * n) {
        return Err(Error::DimensionMismatch {
            expected: 4 * n * n,
            got: full.len(),
        });
    }
    Ok(BlockOperator {
        theta: theta.clone(),
        alpha: alpha.clone(),
        m,
        edge: 0,
        that: full.view((0, 0), (n, n)).into_owned(),
        gamma_check: full.view((0, n), (n, n)).into_owned(),
        gamma_hat: full.view((n, 0), (n, n)).into_owned(),
        t_check: full.view((n, n), (n, n)).into_owned(),
    })
}

/// `D_φ^{θ,α}` on `K⊥(θ)@M → K⊥(α)@M`.
///
/// Requires `M >= deg φ + guard_θ + guard_α + 2` so that a nonempty interior
/// survives; the symbol degree is recorded as the operator's edge.
pub fn build_dtto(
    theta: &BlaschkeProduct,
    alpha: &BlaschkeProduct,
    phi: &SymbolFunction,
    m: usize,
) -> Result<BlockOperator> {
    let required = phi.degree() + theta.guard() + alpha.guard() + 2;
    if m < required {
        return Err(Error::GuardBand { m, required });
    }
    Ok(assemble_dtto(theta, alpha, phi, m))
}

/// Block assembly without the guard-band precondition.
pub(crate) fn assemble_dtto(
    theta: &BlaschkeProduct,
    alpha: &BlaschkeProduct,
    phi: &SymbolFunction,
    m: usize,
) -> BlockOperator {
    let n = m + 1;
    BlockOperator {
        theta: theta.clone(),
        alpha: alpha.clone(),
        m,
        edge: phi.degree(),
        that: build_that(theta, alpha, phi, n, n),
        gamma_check: build_gamma_check(alpha, phi, n, n),
        gamma_hat: build_gamma_hat(theta, phi, n, n),
        t_check: build_tcheck(phi, n, n),
    }
}

/// `P_{αH²} M_φ |θH²`, leading `rows × cols` section.
pub fn build_that(
    theta: &BlaschkeProduct,
    alpha: &BlaschkeProduct,
    phi: &SymbolFunction,
    rows: usize,
    cols: usize,
) -> CMatrix {
    let s = alpha
        .conj_series()
        .multiply(&phi.value)
        .multiply(theta.series());
    CMatrix::from_fn(rows, cols, |i, j| s.coeff(i as i64 - j as i64))
}

/// `P⁻ M_φ |θH²`, leading `rows × cols` section.
pub fn build_gamma_hat(
    theta: &BlaschkeProduct,
    phi: &SymbolFunction,
    rows: usize,
    cols: usize,
) -> CMatrix {
    let s = phi.value.multiply(theta.series());
    CMatrix::from_fn(rows, cols, |i, j| s.coeff(-(i as i64) - 1 - j as i64))
}

/// `P_{αH²} M_φ |H²₋`, leading `rows × cols` section.
pub fn build_gamma_check(
    alpha: &BlaschkeProduct,
    phi: &SymbolFunction,
    rows: usize,
    cols: usize,
) -> CMatrix {
    let s = alpha.conj_series().multiply(&phi.value);
    CMatrix::from_fn(rows, cols, |i, j| s.coeff(i as i64 + j as i64 + 1))
}

/// `P⁻ M_φ |H²₋`, leading `rows × cols` section.
pub fn build_tcheck(phi: &SymbolFunction, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |i, j| phi.value.coeff(j as i64 - i as i64))
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

pub(crate) fn matrix_to_json(a: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    a.row_iter()
        .map(|r| r.iter().map(|c| [c.re, c.im]).collect())
        .collect()
}

pub(crate) fn matrix_from_json(
    rows: &[Vec<[f64; 2]>],
    shape: (usize, usize),
    what: &str,
) -> Result<CMatrix> {
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(Error::Invalid(format!(
            "{what}: expected a {}x{} matrix",
            shape.0, shape.1
        )));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Invalid(format!("{what}: non-finite entry")));
    }
    Ok(CMatrix::from_fn(shape.0, shape.1, |i, j| {
        let [re, im] = rows[i][j];
        C64::new(re, im)
    }))
}

#[derive(Serialize, Deserialize)]
struct BlocksJson {
    #[serde(rename = "That")]
    that: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "GammaCheck")]
    gamma_check: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "GammaHat")]
    gamma_hat: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "TCheck")]
    t_check: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
struct BlockOperatorJson {
    theta: BlaschkeProduct,
    alpha: BlaschkeProduct,
    #[serde(rename = "M")]
    m: usize,
    #[serde(default, skip_serializing_if = "is_zero_usize")]
    edge: usize,
    blocks: BlocksJson,
}

fn is_zero_usize(x: &usize) -> bool {
    *x == 0
}

impl Serialize for BlockOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BlockOperatorJson {
            theta: self.theta.clone(),
            alpha: self.alpha.clone(),
            m: self.m,
            edge: self.edge,
            blocks: BlocksJson {
                that: matrix_to_json(&self.that),
                gamma_check: matrix_to_json(&self.gamma_check),
                gamma_hat: matrix_to_json(&self.gamma_hat),
                t_check: matrix_to_json(&self.t_check),
            },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BlockOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = BlockOperatorJson::deserialize(d)?;
        let n = j.m + 1;
        let conv = |rows: &[Vec<[f64; 2]>], what| {
            matrix_from_json(rows, (n, n), what).map_err(serde::de::Error::custom)
        };
        Ok(BlockOperator {
            that: conv(&j.blocks.that, "That")?,
            gamma_check: conv(&j.blocks.gamma_check, "GammaCheck")?,
            gamma_hat: conv(&j.blocks.gamma_hat, "GammaHat")?,
            t_check: conv(&j.blocks.t_check, "TCheck")?,
            theta: j.theta,
            alpha: j.alpha,
            m: j.m,
            edge: j.edge,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct DenseJson {
    theta: BlaschkeProduct,
    alpha: BlaschkeProduct,
    #[serde(default)]
    domain: String,
    #[serde(default)]
    codomain: String,
    entries: Vec<Vec<[f64; 2]>>,
}

/// JSON form of an operator `K_θ → K_α` in Takenaka–Malmquist coordinates.
impl Serialize for DenseComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        let theta = self
            .domain
            .label()
            .theta()
            .ok_or_else(|| S::Error::custom("domain has no inner function"))?;
        let alpha = self
            .codomain
            .label()
            .theta()
            .ok_or_else(|| S::Error::custom("codomain has no inner function"))?;
        DenseJson {
            theta: theta.clone(),
            alpha: alpha.clone(),
            domain: self.domain.name(),
            codomain: self.codomain.name(),
            entries: matrix_to_json(&self.entries),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DenseComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = DenseJson::deserialize(d)?;
        for label in [&j.domain, &j.codomain] {
            if !label.is_empty() && label != "K(theta)" {
                return Err(serde::de::Error::custom(format!(
                    "unsupported basis label {label:?}"
                )));
            }
        }
        let domain = basis_model(&j.theta);
        let codomain = basis_model(&j.alpha);
        let entries = matrix_from_json(&j.entries, (codomain.len(), domain.len()), "entries")
            .map_err(serde::de::Error::custom)?;
        Ok(DenseComplexMatrix {
            entries,
            domain,
            codomain,
        })
    }
}
