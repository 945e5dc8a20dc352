//! The orthogonal decomposition `L² = K_θ ⊕ θH² ⊕ H²₋`: projections, the
//! conjugation `C_θ f = θ z̄ f̄`, finite sections of `K_θ^⊥`, and subspaces of
//! vectors whose shift stays in the ambient space.
//!
//! Finite sections use a fixed layout. `θH²@M` is `θ z^k, 0 <= k <= M`;
//! `H²₋@M` is `z̄^k, 1 <= k <= M+1`; `K⊥(θ)@M` is the first followed by the
//! second. Every block matrix in the crate is written in this order.

use std::fmt;

use crate::error::{Error, Result};
use crate::inner::BlaschkeProduct;
use crate::laurent::{inner_product, LaurentPolynomial, C64, ZERO};
use crate::linalg::{canonical_basis, nullspace, CMatrix, CVector};

/// Singular values below this are treated as zero when computing admissible subspaces.
pub const KERNEL_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum BasisLabel {
    Model { theta: BlaschkeProduct },
    ThetaH2 { theta: BlaschkeProduct, m: usize },
    Hminus { m: usize },
    Kperp { theta: BlaschkeProduct, m: usize },
}

impl BasisLabel {
    pub fn theta(&self) -> Option<&BlaschkeProduct> {
        match self {
            BasisLabel::Model { theta }
            | BasisLabel::ThetaH2 { theta, .. }
            | BasisLabel::Kperp { theta, .. } => Some(theta),
            BasisLabel::Hminus { .. } => None,
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Model { .. } => write!(f, "K(theta)"),
            BasisLabel::ThetaH2 { m, .. } => write!(f, "thetaH2@{m}"),
            BasisLabel::Hminus { m } => write!(f, "Hminus@{m}"),
            BasisLabel::Kperp { m, .. } => write!(f, "Kperp(theta)@{m}"),
        }
    }
}

/// A labeled, ordered orthonormal family of Laurent polynomials.
///
/// Model-space bases are stored explicitly; the structured finite sections
/// generate their vectors on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis {
    label: BasisLabel,
    explicit: Vec<LaurentPolynomial>,
}

impl OrthonormalBasis {
    pub(crate) fn from_vectors(label: BasisLabel, vectors: Vec<LaurentPolynomial>) -> Self {
        Self {
            label,
            explicit: vectors,
        }
    }

    pub fn label(&self) -> &BasisLabel {
        &self.label
    }

    pub fn name(&self) -> String {
        self.label.to_string()
    }

    pub fn len(&self) -> usize {
        match &self.label {
            BasisLabel::Model { .. } => self.explicit.len(),
            BasisLabel::ThetaH2 { m, .. } | BasisLabel::Hminus { m } => m + 1,
            BasisLabel::Kperp { m, .. } => 2 * (m + 1),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vector(&self, i: usize) -> LaurentPolynomial {
        match &self.label {
            BasisLabel::Model { .. } => self.explicit[i].clone(),
            BasisLabel::ThetaH2 { theta, .. } => theta.series().shift(i as i64),
            BasisLabel::Hminus { .. } => LaurentPolynomial::z_pow(-(i as i64) - 1),
            BasisLabel::Kperp { theta, m } => {
                if i <= *m {
                    theta.series().shift(i as i64)
                } else {
                    LaurentPolynomial::z_pow(-((i - m) as i64))
                }
            }
        }
    }

    pub fn vectors(&self) -> Vec<LaurentPolynomial> {
        (0..self.len()).map(|i| self.vector(i)).collect()
    }

    /// `x_i = <f, u_i>`.
    pub fn coordinates(&self, f: &LaurentPolynomial) -> CVector {
        match &self.label {
            BasisLabel::Model { .. } => CVector::from_iterator(
                self.len(),
                self.explicit.iter().map(|u| inner_product(f, u)),
            ),
            BasisLabel::ThetaH2 { theta, m } => theta_h2_coordinates(theta, *m, f),
            BasisLabel::Hminus { m } => hminus_coordinates(*m, f),
            BasisLabel::Kperp { theta, m } => {
                let top = theta_h2_coordinates(theta, *m, f);
                let bottom = hminus_coordinates(*m, f);
                CVector::from_iterator(2 * (m + 1), top.iter().chain(bottom.iter()).copied())
            }
        }
    }

    /// `sum_i x_i u_i`.
    pub fn synthesize(&self, x: &CVector) -> Result<LaurentPolynomial> {
        if x.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: x.len(),
            });
        }
        Ok(match &self.label {
            BasisLabel::Model { .. } => self
                .explicit
                .iter()
                .zip(x.iter())
                .fold(LaurentPolynomial::zero(), |acc, (u, c)| &acc + &u.scale(*c)),
            BasisLabel::ThetaH2 { theta, .. } => theta.series().multiply(
                &LaurentPolynomial::from_dense(0, x.iter().copied().collect()),
            ),
            BasisLabel::Hminus { .. } => hminus_synthesize(x.iter().copied()),
            BasisLabel::Kperp { theta, m } => {
                let top = LaurentPolynomial::from_dense(0, x.iter().take(m + 1).copied().collect());
                let analytic = theta.series().multiply(&top);
                &analytic + &hminus_synthesize(x.iter().skip(m + 1).copied())
            }
        })
    }

    /// `‖f - P f‖` for the orthogonal projection `P` onto the span.
    pub fn membership_defect(&self, f: &LaurentPolynomial) -> f64 {
        let x = self.coordinates(f);
        let g = self.synthesize(&x).expect("coordinates conform");
        f.distance(&g)
    }

    pub fn gram(&self) -> CMatrix {
        let v = self.vectors();
        CMatrix::from_fn(v.len(), v.len(), |i, j| inner_product(&v[j], &v[i]))
    }

    /// Coordinates (in this basis) of `z · u_j` for every basis vector, as columns,
    /// together with the part of each shifted vector falling outside the span.
    fn shift_residuals(&self) -> (CMatrix, Vec<LaurentPolynomial>) {
        let n = self.len();
        let mut coords = CMatrix::zeros(n, n);
        let mut residuals = Vec::with_capacity(n);
        for j in 0..n {
            let w = self.vector(j).shift(1);
            let x = self.coordinates(&w);
            let back = self.synthesize(&x).expect("coordinates conform");
            residuals.push(&w - &back);
            coords.set_column(j, &x);
        }
        (coords, residuals)
    }
}

fn theta_h2_coordinates(theta: &BlaschkeProduct, m: usize, f: &LaurentPolynomial) -> CVector {
    // <f, θ z^j> is the j-th coefficient of conj(θ) f.
    let g = theta.conj_series().multiply(f);
    CVector::from_iterator(m + 1, (0..=m).map(|j| g.coeff(j as i64)))
}

fn hminus_coordinates(m: usize, f: &LaurentPolynomial) -> CVector {
    CVector::from_iterator(m + 1, (0..=m).map(|j| f.coeff(-(j as i64) - 1)))
}

fn hminus_synthesize(
    x: impl DoubleEndedIterator<Item = C64> + ExactSizeIterator,
) -> LaurentPolynomial {
    let len = x.len();
    if len == 0 {
        return LaurentPolynomial::zero();
    }
    // x_j multiplies z̄^(j+1), so the dense band starts at -len.
    LaurentPolynomial::from_dense(-(len as i64), x.rev().collect())
}

/// Model space `K_θ` with its Takenaka–Malmquist basis at the guard depth.
pub fn basis_model(theta: &BlaschkeProduct) -> OrthonormalBasis {
    theta
        .tm_basis(theta.guard())
        .expect("guard depth satisfies the tail cap")
}

pub fn basis_theta_h2(theta: &BlaschkeProduct, m: usize) -> OrthonormalBasis {
    OrthonormalBasis::from_vectors(
        BasisLabel::ThetaH2 {
            theta: theta.clone(),
            m,
        },
        Vec::new(),
    )
}

pub fn basis_hminus(m: usize) -> OrthonormalBasis {
    OrthonormalBasis::from_vectors(BasisLabel::Hminus { m }, Vec::new())
}

/// Finite section `θH²@M ⊕ H²₋@M` of `K_θ^⊥`, of dimension `2(M+1)`.
pub fn basis_kperp(theta: &BlaschkeProduct, m: usize) -> OrthonormalBasis {
    OrthonormalBasis::from_vectors(
        BasisLabel::Kperp {
            theta: theta.clone(),
            m,
        },
        Vec::new(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subspace {
    /// `K_θ`
    Model,
    /// `θH²`
    ThetaH2,
    /// `K_θ^⊥ = θH² ⊕ H²₋`
    ModelPerp,
    /// `H²₋`
    Hminus,
}

/// Orthogonal projection of `f` onto one of the pieces of `L² = K_θ ⊕ θH² ⊕ H²₋`.
///
/// `P_{θH²} f = θ P⁺(θ̄ f)`, `P_θ = P⁺ - P_{θH²}`, `P_θ^⊥ = I - P_θ`. The
/// expansion of `θ` is taken at its guard depth, so the result is exact up
/// to the carried tail bound.
pub fn project(
    theta: &BlaschkeProduct,
    subspace: Subspace,
    f: &LaurentPolynomial,
) -> LaurentPolynomial {
    match subspace {
        Subspace::ThetaH2 => project_theta_h2(theta, f),
        Subspace::Model => &f.plus_part() - &project_theta_h2(theta, f),
        Subspace::ModelPerp => &f.minus_part() + &project_theta_h2(theta, f),
        Subspace::Hminus => f.minus_part(),
    }
}

fn project_theta_h2(theta: &BlaschkeProduct, f: &LaurentPolynomial) -> LaurentPolynomial {
    let inner = theta.conj_series().multiply(f).plus_part();
    theta.series().multiply(&inner)
}

/// The conjugation `C_θ f = θ z̄ f̄`.
pub fn conjugation_c(theta: &BlaschkeProduct, f: &LaurentPolynomial) -> LaurentPolynomial {
    theta.series().multiply(&f.conj_function().shift(-1))
}

/// Orthonormal basis of `{f ∈ span V : z f ∈ span V}` for one of the supported bases.
#[derive(Clone, Debug)]
pub struct AdmissibleSubspace {
    parent: String,
    /// Columns: coordinates of the admissible vectors in the parent basis.
    pub coords: CMatrix,
    /// Columns: coordinates of `z f` in the parent basis for each admissible `f`.
    pub shifted_coords: CMatrix,
    pub vectors: Vec<LaurentPolynomial>,
}

impl AdmissibleSubspace {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn parent(&self) -> &str {
        &self.parent
    }
}

/// Kernel of `f ↦ (I - P_V) z f` on `span V`.
///
/// For `K_θ` this is the space of `f` with `z f ∈ K_θ`. For the finite section
/// `K⊥(θ)@M` the residual also contains the component pushed past the
/// truncation, so the top layer `θ z^M` drops out along with `z̄`.
pub fn admissible_for_shift(v: &OrthonormalBasis) -> AdmissibleSubspace {
    let n = v.len();
    let (shift, residuals) = v.shift_residuals();
    let (lo, hi) = residuals
        .iter()
        .filter_map(|r| r.band())
        .fold((i64::MAX, i64::MIN), |(a, b), (l, h)| (a.min(l), b.max(h)));
    let rows = if lo <= hi { (hi - lo + 1) as usize } else { 0 };
    let mut r = CMatrix::from_element(rows.max(1), n, ZERO);
    for (j, res) in residuals.iter().enumerate() {
        for (k, c) in res.terms() {
            r[((k - lo) as usize, j)] = c;
        }
    }
    let kernel = canonical_basis(&nullspace(&r, KERNEL_THRESHOLD));
    let shifted_coords = &shift * &kernel;
    let vectors = kernel
        .column_iter()
        .map(|c| {
            v.synthesize(&c.into_owned())
                .expect("conforming coordinates")
        })
        .collect();
    AdmissibleSubspace {
        parent: v.name(),
        coords: kernel,
        shifted_coords,
        vectors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::ONE;
    use proptest::prelude::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn z2() -> BlaschkeProduct {
        BlaschkeProduct::monomial(2).unwrap()
    }

    #[test]
    fn project_monomial_examples() {
        let f = LaurentPolynomial::from_real(&[(0, 1.0), (1, 1.0), (2, 1.0)]);
        let model = project(&z2(), Subspace::Model, &f).chop(0.0);
        assert_eq!(model, LaurentPolynomial::from_real(&[(0, 1.0), (1, 1.0)]));
        let th = project(&z2(), Subspace::ThetaH2, &f).chop(0.0);
        assert_eq!(th, LaurentPolynomial::z_pow(2));
    }

    #[test]
    fn project_single_zero_example() {
        let theta = BlaschkeProduct::new(vec![r(0.5)], ONE).unwrap();
        let p = project(&theta, Subspace::Model, &LaurentPolynomial::one());
        for k in 0..30 {
            let expected = 0.75 * 0.5f64.powi(k);
            assert!((p.coeff(k as i64) - r(expected)).norm() < 1e-13, "k={k}");
        }
        let pp = project(&theta, Subspace::Model, &p);
        assert!(pp.distance(&p) < 1e-12);
    }

    #[test]
    fn conjugation_examples() {
        let one = LaurentPolynomial::one();
        let z = LaurentPolynomial::z_pow(1);
        assert_eq!(conjugation_c(&z2(), &one).chop(0.0), z);
        assert_eq!(conjugation_c(&z2(), &z).chop(0.0), one);
        let f = LaurentPolynomial::z_pow(3);
        assert_eq!(
            conjugation_c(&z2(), &f).chop(0.0),
            LaurentPolynomial::z_pow(-2)
        );
    }

    #[test]
    fn kperp_layout() {
        let b = basis_kperp(&z2(), 1);
        let v: Vec<_> = b.vectors().into_iter().map(|p| p.chop(0.0)).collect();
        assert_eq!(
            v,
            vec![
                LaurentPolynomial::z_pow(2),
                LaurentPolynomial::z_pow(3),
                LaurentPolynomial::z_pow(-1),
                LaurentPolynomial::z_pow(-2),
            ]
        );
        assert_eq!(b.name(), "Kperp(theta)@1");
        assert_eq!(basis_theta_h2(&z2(), 4).name(), "thetaH2@4");
        assert_eq!(basis_hminus(4).name(), "Hminus@4");
        assert_eq!(basis_model(&z2()).name(), "K(theta)");
    }

    #[test]
    fn kperp_gram_identity_for_blaschke() {
        let theta = BlaschkeProduct::new(vec![r(0.5), ZERO], ONE).unwrap();
        let b = basis_kperp(&theta, 8);
        let g = b.gram();
        for i in 0..b.len() {
            for j in 0..b.len() {
                let t = if i == j { ONE } else { ZERO };
                assert!((g[(i, j)] - t).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn coordinates_synthesize_round_trip() {
        let theta = BlaschkeProduct::new(vec![C64::new(0.2, 0.3), r(-0.4)], ONE).unwrap();
        let b = basis_kperp(&theta, 6);
        let x = CVector::from_fn(b.len(), |i, _| {
            C64::new(i as f64 * 0.1, 1.0 - i as f64 * 0.05)
        });
        let f = b.synthesize(&x).unwrap();
        assert!((b.coordinates(&f) - &x).norm() < 1e-12);
        assert!(b.membership_defect(&f) < 1e-12);
        assert!(b.membership_defect(&LaurentPolynomial::one()) > 0.1);
    }

    #[test]
    fn admissible_kperp_monomial() {
        let adm = admissible_for_shift(&basis_kperp(&z2(), 1));
        assert_eq!(adm.dim(), 2);
        assert!(adm.vectors[0].max_abs_diff(&LaurentPolynomial::z_pow(2)) < 1e-12);
        assert!(adm.vectors[1].max_abs_diff(&LaurentPolynomial::z_pow(-2)) < 1e-12);
    }

    #[test]
    fn admissible_kperp_matches_lemma_description() {
        // θH² ⊕ z̄² conj(H²), with the top layer removed by truncation: dimension 2M
        for m in [3usize, 6] {
            let theta = BlaschkeProduct::monomial(3).unwrap();
            let adm = admissible_for_shift(&basis_kperp(&theta, m));
            assert_eq!(adm.dim(), 2 * m);
            for v in &adm.vectors {
                assert!(inner_product(v, &LaurentPolynomial::z_pow(-1)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn admissible_model_monomial() {
        let theta = BlaschkeProduct::monomial(3).unwrap();
        let adm = admissible_for_shift(&basis_model(&theta));
        assert_eq!(adm.dim(), 2);
        assert!(adm.vectors[0].max_abs_diff(&LaurentPolynomial::one()) < 1e-12);
        assert!(adm.vectors[1].max_abs_diff(&LaurentPolynomial::z_pow(1)) < 1e-12);
        for m in 1..=5 {
            let theta = BlaschkeProduct::monomial(m).unwrap();
            assert_eq!(admissible_for_shift(&basis_model(&theta)).dim(), m - 1);
        }
    }

    #[test]
    fn admissible_model_blaschke_is_orthogonal_to_backward_shift_of_theta() {
        let theta = BlaschkeProduct::new(vec![r(0.5), ZERO], ONE).unwrap();
        let adm = admissible_for_shift(&basis_model(&theta));
        assert_eq!(adm.dim(), 1);
        // S*θ = (θ - θ(0)) / z
        let s = theta.series();
        let backward = (s - &LaurentPolynomial::constant(s.coeff(0))).shift(-1);
        assert!(inner_product(&adm.vectors[0], &backward).norm() < 1e-11);
        let zf = adm.vectors[0].shift(1);
        assert!(project(&theta, Subspace::ModelPerp, &zf).norm() < 1e-11);
    }

    fn blaschke_strategy() -> impl Strategy<Value = BlaschkeProduct> {
        prop::collection::vec((0.0f64..0.7, 0.0f64..std::f64::consts::TAU), 1..4).prop_map(|zs| {
            BlaschkeProduct::new(
                zs.into_iter().map(|(r, t)| C64::from_polar(r, t)).collect(),
                ONE,
            )
            .unwrap()
        })
    }

    fn poly_strategy() -> impl Strategy<Value = LaurentPolynomial> {
        (
            -5i64..=0,
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..10),
        )
            .prop_map(|(lo, cs)| {
                LaurentPolynomial::from_dense(
                    lo,
                    cs.into_iter().map(|(a, b)| C64::new(a, b)).collect(),
                )
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn decomposition_sums_to_identity(theta in blaschke_strategy(), f in poly_strategy()) {
            let sum = &(&project(&theta, Subspace::Model, &f) + &project(&theta, Subspace::ThetaH2, &f))
                + &f.minus_part();
            prop_assert!(sum.distance(&f) < 1e-12);
            let p = project(&theta, Subspace::Model, &f);
            prop_assert!(project(&theta, Subspace::Model, &p).distance(&p) < 1e-11);
            let q = project(&theta, Subspace::ThetaH2, &f);
            prop_assert!(inner_product(&p, &q).norm() < 1e-11);
        }

        #[test]
        fn conjugation_is_antiunitary_involution(theta in blaschke_strategy(), f in poly_strategy(), g in poly_strategy()) {
            let cf = conjugation_c(&theta, &f);
            prop_assert!(conjugation_c(&theta, &cf).distance(&f) < 1e-11);
            let lhs = inner_product(&cf, &conjugation_c(&theta, &g));
            prop_assert!((lhs - inner_product(&g, &f)).norm() < 1e-11);
        }

        #[test]
        fn conjugation_intertwines_multiplication(theta in blaschke_strategy(), f in poly_strategy(), phi in poly_strategy()) {
            let lhs = conjugation_c(&theta, &phi.multiply(&conjugation_c(&theta, &f)));
            let rhs = phi.conj_function().multiply(&f);
            prop_assert!(lhs.distance(&rhs) < 1e-11);
        }
    }
}
