//! Finite-rank trace-class operators, their pairing with operators, and the
//! rank-two families that annihilate (dual) truncated Toeplitz operators.
//!
//! A dyad `f⊗g` is the map `x ↦ <x, g> f`; the pairing with an operator `T`
//! is `<T, Σ f_n⊗g_n> = Σ <T f_n, g_n>`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inner::BlaschkeProduct;
use crate::laurent::{LaurentPolynomial, C64, ZERO};
use crate::linalg::{singular_values, CMatrix};
use crate::operators::LinearMap;
use crate::spaces::OrthonormalBasis;

/// Membership slack for admissibility checks, relative to `max(1, ‖f‖)`.
pub const MEMBERSHIP_TOL: f64 = 1e-10;
/// A product coefficient above this counts as nonzero.
pub const PRODUCT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dyad {
    pub f: LaurentPolynomial,
    pub g: LaurentPolynomial,
}

/// `t = Σ f_n ⊗ g_n`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FiniteRankOperator {
    pub dyads: Vec<Dyad>,
}

impl FiniteRankOperator {
    pub fn new(dyads: Vec<(LaurentPolynomial, LaurentPolynomial)>) -> Self {
        Self {
            dyads: dyads.into_iter().map(|(f, g)| Dyad { f, g }).collect(),
        }
    }

    /// Number of dyads, an upper bound for the rank.
    pub fn rank_bound(&self) -> usize {
        self.dyads.len()
    }

    fn two(
        a: (LaurentPolynomial, LaurentPolynomial),
        b: (LaurentPolynomial, LaurentPolynomial),
    ) -> Self {
        Self::new(vec![a, b])
    }
}

/// `<T, t> = Σ <T f_n, g_n>`, computed in the coordinates of `T`'s bases.
/// Components of `f_n`, `g_n` outside those spaces do not contribute.
pub fn pair(t_op: &dyn LinearMap, t: &FiniteRankOperator) -> Result<C64> {
    let dom = t_op.domain();
    let cod = t_op.codomain();
    let mut total = ZERO;
    for d in &t.dyads {
        let x = dom.coordinates(&d.f);
        let y = cod.coordinates(&d.g);
        total += y.dotc(&t_op.apply(&x)?);
    }
    Ok(total)
}

fn require_admissible(basis: &OrthonormalBasis, f: &LaurentPolynomial, what: &str) -> Result<()> {
    let scale = f.norm().max(1.0);
    for (v, label) in [
        (f.clone(), what.to_string()),
        (f.shift(1), format!("z*{what}")),
    ] {
        let defect = basis.membership_defect(&v);
        if defect > MEMBERSHIP_TOL * scale {
            return Err(Error::NotAdmissible(format!(
                "{label} is not in {} (defect {defect:.3e})",
                basis.name()
            )));
        }
    }
    Ok(())
}

/// `zf⊗zg - f⊗g` for `f` with `f, zf` in the domain and `g` with `g, zg` in the codomain.
pub fn gen_shift_pair(
    f: &LaurentPolynomial,
    g: &LaurentPolynomial,
    domain: &OrthonormalBasis,
    codomain: &OrthonormalBasis,
) -> Result<FiniteRankOperator> {
    require_admissible(domain, f, "f")?;
    require_admissible(codomain, g, "g")?;
    Ok(FiniteRankOperator::two(
        (f.shift(1), g.shift(1)),
        (-f, g.clone()),
    ))
}

/// The rank-two families `M_1 … M_6` for `h, g ∈ H²` (`h` is unused by `M_5`, `M_6`):
///
/// * `M_1 = θh⊗αg - zθh⊗zαg`
/// * `M_2 = αθh⊗αθg - z̄ḡ⊗z̄h̄`
/// * `M_3 = zθh⊗z̄ḡ - θh⊗z̄²ḡ`
/// * `M_4 = z̄h̄⊗zαg - z̄²h̄⊗αg`
/// * `M_5 = θ⊗z̄ḡ - θαzg⊗α`
/// * `M_6 = θ⊗αθzg - z̄ḡ⊗α`
pub fn gen_m(
    index: usize,
    theta: &BlaschkeProduct,
    alpha: &BlaschkeProduct,
    h: &LaurentPolynomial,
    g: &LaurentPolynomial,
) -> Result<FiniteRankOperator> {
    for (p, name) in [(h, "h"), (g, "g")] {
        if p.band().is_some_and(|(lo, _)| lo < 0) {
            return Err(Error::Band(format!("{name} must be analytic")));
        }
    }
    let th = theta.series();
    let al = alpha.series();
    let thal = th.multiply(al);
    let zb = |p: &LaurentPolynomial, k: i64| p.conj_function().shift(-k);
    let neg = |p: LaurentPolynomial| -&p;
    Ok(match index {
        1 => FiniteRankOperator::two(
            (th.multiply(h), al.multiply(g)),
            (neg(th.multiply(h).shift(1)), al.multiply(g).shift(1)),
        ),
        2 => FiniteRankOperator::two(
            (thal.multiply(h), thal.multiply(g)),
            (neg(zb(g, 1)), zb(h, 1)),
        ),
        3 => FiniteRankOperator::two(
            (th.multiply(h).shift(1), zb(g, 1)),
            (neg(th.multiply(h)), zb(g, 2)),
        ),
        4 => FiniteRankOperator::two(
            (zb(h, 1), al.multiply(g).shift(1)),
            (neg(zb(h, 2)), al.multiply(g)),
        ),
        5 => FiniteRankOperator::two(
            (th.clone(), zb(g, 1)),
            (neg(thal.multiply(g).shift(1)), al.clone()),
        ),
        6 => FiniteRankOperator::two(
            (th.clone(), thal.multiply(g).shift(1)),
            (neg(zb(g, 1)), al.clone()),
        ),
        other => {
            return Err(Error::Invalid(format!(
                "family index {other} is not in 1..=6"
            )))
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitivityProbe {
    /// `f · conj(g)`.
    pub product: LaurentPolynomial,
    /// Some coefficient exceeds [`PRODUCT_TOL`], so `f⊗g` cannot annihilate
    /// every truncated Toeplitz operator.
    pub nonvanishing: bool,
}

fn nonzero(p: &LaurentPolynomial) -> bool {
    p.terms().any(|(_, c)| c.norm() > PRODUCT_TOL)
}

/// `f ḡ` for `f ∈ K_θ`, `g ∈ K_α`. Since `<A_φ f, g> = ∫ φ f ḡ dm`, the dyad
/// `f⊗g` annihilates all such operators only if this product vanishes.
pub fn transitivity_probe(
    f: &LaurentPolynomial,
    g: &LaurentPolynomial,
) -> Result<TransitivityProbe> {
    if f.norm() == 0.0 {
        return Err(Error::ZeroInput("f"));
    }
    if g.norm() == 0.0 {
        return Err(Error::ZeroInput("g"));
    }
    let product = f.multiply(&g.conj_function());
    Ok(TransitivityProbe {
        nonvanishing: nonzero(&product),
        product,
    })
}

/// Products controlling whether `f⊗g` annihilates every operator with
/// Toeplitz/Hankel blocks, for `f = z̄ f̄₋ + θ f₊ ∈ K_θ^⊥` and
/// `g = z̄ ḡ₋ + α g₊ ∈ K_α^⊥`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualTransitivityProbe {
    /// `f₊ ḡ₊` (paired by `T̂`).
    pub plus: LaurentPolynomial,
    /// `f₋ ḡ₋` (paired by `Ť`).
    pub minus: LaurentPolynomial,
    /// `θ f₊ z g₋` (paired by `Γ̂`).
    pub hat_cross: LaurentPolynomial,
    /// `z̄ f̄₋ ᾱ ḡ₊` (paired by `Γ̌`).
    pub check_cross: LaurentPolynomial,
    pub nonvanishing: bool,
}

pub fn dual_transitivity_probe(
    theta: &BlaschkeProduct,
    alpha: &BlaschkeProduct,
    f: &LaurentPolynomial,
    g: &LaurentPolynomial,
) -> Result<DualTransitivityProbe> {
    if f.norm() == 0.0 {
        return Err(Error::ZeroInput("f"));
    }
    if g.norm() == 0.0 {
        return Err(Error::ZeroInput("g"));
    }
    let f_plus = theta.conj_series().multiply(f).plus_part();
    let f_minus = f.minus_part().involution_j();
    let g_plus = alpha.conj_series().multiply(g).plus_part();
    let g_minus = g.minus_part().involution_j();
    let plus = f_plus.multiply(&g_plus.conj_function());
    let minus = f_minus.multiply(&g_minus.conj_function());
    let hat_cross = theta.series().multiply(&f_plus).multiply(&g_minus).shift(1);
    let check_cross = f_minus
        .conj_function()
        .multiply(alpha.conj_series())
        .multiply(&g_plus.conj_function())
        .shift(-1);
    let nonvanishing = [&plus, &minus, &hat_cross, &check_cross]
        .into_iter()
        .any(nonzero);
    Ok(DualTransitivityProbe {
        plus,
        minus,
        hat_cross,
        check_cross,
        nonvanishing,
    })
}

/// A trace-class `t` with `<D_ψ^{θ,α}, t> = ∫ ψ f dm = Σ_k ψ̂(k) f̂(-k)` for
/// every trigonometric polynomial `ψ`, where `f` is the density.
///
/// With `n = max(0, -lo)`, `h₁ = f zⁿ` and `h₂ = zⁿ` are analytic and
/// `t = θαh₁ ⊗ θαh₂`.
pub fn represent_functional(
    density: &LaurentPolynomial,
    theta: &BlaschkeProduct,
    alpha: &BlaschkeProduct,
) -> FiniteRankOperator {
    let Some((lo, _)) = density.band() else {
        return FiniteRankOperator::default();
    };
    let n = (-lo).max(0);
    let thal = theta.series().multiply(alpha.series());
    FiniteRankOperator::new(vec![(thal.multiply(&density.shift(n)), thal.shift(n))])
}

/// Sum of singular values of `x ↦ Σ <x, g_n> f_n`.
pub fn trace_norm(t: &FiniteRankOperator) -> f64 {
    if t.dyads.is_empty() {
        return 0.0;
    }
    let f = coefficient_matrix(t.dyads.iter().map(|d| &d.f));
    let g = coefficient_matrix(t.dyads.iter().map(|d| &d.g));
    // F G* = Q_F (R_F R_G*) Q_G*, so only the small core matters.
    let rf = f.qr().r();
    let rg = g.qr().r();
    singular_values(&(rf * rg.adjoint())).iter().sum()
}

fn coefficient_matrix<'a>(vs: impl Iterator<Item = &'a LaurentPolynomial> + Clone) -> CMatrix {
    let (lo, hi) = vs
        .clone()
        .filter_map(|v| v.band())
        .fold((0, 0), |(a, b), (l, h)| (a.min(l), b.max(h)));
    let cols: Vec<_> = vs.collect();
    CMatrix::from_fn((hi - lo + 1) as usize, cols.len(), |i, j| {
        cols[j].coeff(lo + i as i64)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::{inner_product, ONE};
    use crate::operators::{build_dtto, BlockOperator, SymbolFunction};
    use crate::spaces::basis_kperp;

    fn z(m: usize) -> BlaschkeProduct {
        BlaschkeProduct::monomial(m).unwrap()
    }

    fn zp(k: i64) -> LaurentPolynomial {
        LaurentPolynomial::z_pow(k)
    }

    fn sym(terms: &[(i64, f64)]) -> SymbolFunction {
        SymbolFunction::new(LaurentPolynomial::from_real(terms))
    }

    #[test]
    fn pairing_examples() {
        let theta = z(2);
        let id = BlockOperator::identity(&theta, 8);
        let f = LaurentPolynomial::from_real(&[(2, 1.0), (3, -2.0), (-1, 0.5)]);
        let g = LaurentPolynomial::from_real(&[(3, 1.5), (-1, 1.0), (-4, 2.0)]);
        let t = FiniteRankOperator::new(vec![(f.clone(), g.clone())]);
        assert!((pair(&id, &t).unwrap() - inner_product(&f, &g)).norm() < 1e-15);

        let d = build_dtto(&theta, &theta, &sym(&[(1, 1.0)]), 8).unwrap();
        let t = FiniteRankOperator::new(vec![(zp(2), zp(3))]);
        assert_eq!(pair(&d, &t).unwrap(), ONE);

        let d = build_dtto(&theta, &theta, &sym(&[(-3, 1.0)]), 10).unwrap();
        let m5 = gen_m(
            5,
            &theta,
            &theta,
            &LaurentPolynomial::one(),
            &LaurentPolynomial::one(),
        )
        .unwrap();
        assert_eq!(m5.dyads[0].g, zp(-1));
        assert_eq!(m5.dyads[1].f, -&zp(5));
        assert_eq!(pair(&d, &m5).unwrap(), ZERO);
        let first = FiniteRankOperator::new(vec![(m5.dyads[0].f.clone(), m5.dyads[0].g.clone())]);
        assert_eq!(pair(&d, &first).unwrap(), ONE);
    }

    #[test]
    fn shift_pair_examples() {
        let theta = z(2);
        let m = 8;
        let b = basis_kperp(&theta, m);
        let d = build_dtto(&theta, &theta, &sym(&[(1, 2.0), (0, -1.0), (-2, 0.5)]), m).unwrap();
        let t = gen_shift_pair(&zp(2), &zp(2), &b, &b).unwrap();
        assert_eq!(t.rank_bound(), 2);
        assert!(pair(&d, &t).unwrap().norm() < 1e-15);
        let t = gen_shift_pair(&zp(-2), &zp(-2), &b, &b).unwrap();
        assert!(pair(&d, &t).unwrap().norm() < 1e-15);
        let err = gen_shift_pair(&zp(-1), &zp(2), &b, &b).unwrap_err();
        assert!(matches!(err, Error::NotAdmissible(_)));
        // the top layer leaves the section
        assert!(gen_shift_pair(&zp(2 + m as i64), &zp(2), &b, &b).is_err());
    }

    #[test]
    fn families_examples() {
        let theta = z(2);
        let one = LaurentPolynomial::one();
        let m1 = gen_m(1, &theta, &theta, &one, &one).unwrap();
        assert_eq!(m1.dyads[0].f, zp(2));
        assert_eq!(m1.dyads[1].g, zp(3));
        let m2 = gen_m(2, &theta, &theta, &one, &one).unwrap();
        assert_eq!(m2.dyads[0].f, zp(4));
        assert_eq!(m2.dyads[1].g, zp(-1));
        let d = build_dtto(&theta, &theta, &sym(&[(0, 3.0), (1, 1.0), (-2, 2.0)]), 10).unwrap();
        for l in 1..=6 {
            let t = gen_m(
                l,
                &theta,
                &theta,
                &LaurentPolynomial::from_real(&[(0, 1.0), (1, -1.0)]),
                &zp(1),
            )
            .unwrap();
            assert!(pair(&d, &t).unwrap().norm() < 1e-14, "M_{l}");
        }
        assert!(gen_m(7, &theta, &theta, &one, &one).is_err());
        assert!(matches!(
            gen_m(1, &theta, &theta, &zp(-1), &one),
            Err(Error::Band(_))
        ));
    }

    #[test]
    fn transitivity_examples() {
        let p = transitivity_probe(
            &LaurentPolynomial::from_real(&[(0, 1.0), (1, 1.0)]),
            &LaurentPolynomial::from_real(&[(0, 1.0), (1, -1.0)]),
        )
        .unwrap();
        assert!(p.nonvanishing);
        assert_eq!(
            p.product.clone().chop(0.0),
            LaurentPolynomial::from_real(&[(1, 1.0), (-1, -1.0)])
        );
        let p = transitivity_probe(&LaurentPolynomial::one(), &zp(1)).unwrap();
        assert_eq!(p.product, zp(-1));
        assert!(matches!(
            transitivity_probe(&LaurentPolynomial::zero(), &zp(1)),
            Err(Error::ZeroInput("f"))
        ));
    }

    #[test]
    fn dual_probe_splits_components() {
        let theta = z(2);
        let alpha = z(3);
        // f = z̄² + θ z, g = z̄ + α
        let f = &zp(-2) + &zp(3);
        let g = &zp(-1) + &zp(3);
        let p = dual_transitivity_probe(&theta, &alpha, &f, &g).unwrap();
        assert!(p.nonvanishing);
        // f₊ = z, g₊ = 1, f₋ = z, g₋ = 1
        assert_eq!(p.plus.clone().chop(0.0), zp(1));
        assert_eq!(p.minus.clone().chop(0.0), zp(1));
        assert_eq!(p.hat_cross.clone().chop(0.0), zp(4));
        assert_eq!(p.check_cross.clone().chop(0.0), zp(-5));
    }

    #[test]
    fn functional_examples() {
        let theta = z(2);
        let t = represent_functional(&zp(-1), &theta, &theta);
        assert_eq!(t.dyads[0].f, zp(4));
        assert_eq!(t.dyads[0].g, zp(5));
        // <D_ψ, t> = ∫ ψ z̄ dm = ψ̂(1)
        let psi = sym(&[(1, 7.0), (-1, 3.0), (0, 1.0)]);
        let d = build_dtto(&theta, &theta, &psi, 10).unwrap();
        assert_eq!(pair(&d, &t).unwrap(), C64::new(7.0, 0.0));

        let t = represent_functional(&LaurentPolynomial::one(), &theta, &theta);
        assert_eq!(pair(&d, &t).unwrap(), ONE);
        assert!(
            represent_functional(&LaurentPolynomial::zero(), &theta, &theta)
                .dyads
                .is_empty()
        );
    }

    #[test]
    fn trace_norm_examples() {
        let f = LaurentPolynomial::from_terms([(0, C64::new(1.0, 2.0)), (3, C64::new(-0.5, 0.0))]);
        let g = LaurentPolynomial::from_real(&[(-2, 2.0), (1, 1.0)]);
        let t = FiniteRankOperator::new(vec![(f.clone(), g.clone())]);
        assert!((trace_norm(&t) - f.norm() * g.norm()).abs() < 1e-12);
        let t2 = FiniteRankOperator::new(vec![(f.clone(), g.clone()), (f.clone(), g.clone())]);
        assert!((trace_norm(&t2) - 2.0 * f.norm() * g.norm()).abs() < 1e-12);
        let t3 = FiniteRankOperator::new(vec![(zp(2), zp(2)), (-&zp(3), zp(3))]);
        assert!((trace_norm(&t3) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn json_shape() {
        let t = FiniteRankOperator::new(vec![(zp(2), zp(-1))]);
        let v = serde_json::to_value(&t).unwrap();
        assert_eq!(v["dyads"][0]["f"]["coeffs"][0][0], 2);
        let back: FiniteRankOperator = serde_json::from_value(v).unwrap();
        assert_eq!(back, t);
    }
}
