//! Seeded batch suites: the acceptance criteria, a fuzz sweep over random
//! operators and an operator-norm convergence sweep.
//!
//! Cases run on the rayon pool and are collected in index order; reports hold
//! no timings, so a fixed seed gives byte-identical JSON.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annihilate::{
    dual_transitivity_probe, gen_m, gen_shift_pair, pair, represent_functional, transitivity_probe,
};
use crate::characterize::{
    block_structure_deviation, check_adtto, check_block_conditions, is_analytic_adtto,
    recover_symbol, solution_as_blocks, solve_shift_invariant_space, OperatorSpace, RecoveryMethod,
    EXACT_TOL,
};
use crate::error::{Error, Result};
use crate::inner::BlaschkeProduct;
use crate::laurent::{inner_product, LaurentPolynomial, C64};
use crate::linalg::{distance_to_span, range_basis, spectral_norm, CMatrix, CVector};
use crate::operators::{
    build_dtto, build_gamma_check, build_gamma_hat, build_that, build_tto, split_blocks,
    BlockOperator, SymbolFunction,
};
use crate::rng::{
    case_rng, random_analytic, random_blaschke, random_complex, random_poly, random_symbol, CaseRng,
};
use crate::spaces::{
    basis_hminus, basis_kperp, basis_model, basis_theta_h2, conjugation_c, project, Subspace,
};

pub const DEFAULT_SEED: u64 = 0x6d73_6f6c_6162;
/// Truncation depths of the convergence sweep.
pub const CONVERGENCE_SIZES: [usize; 5] = [16, 32, 64, 128, 256];

const MAX_DEGREE: usize = 3;
const MAX_MODULUS: f64 = 0.8;
const MAX_SYMBOL_DEGREE: usize = 4;
const IDENTITY_TOL: f64 = 1e-11;
const ROUND_TRIP_TOL: f64 = 1e-11;
const PAIRING_FLOOR: f64 = 1e-4;
const PERTURBATION: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

impl Relation {
    fn holds(self, value: f64, bound: f64) -> bool {
        match self {
            Self::AtMost => value <= bound,
            Self::AtLeast => value >= bound,
        }
    }

    /// The value closer to violating the bound; NaN wins.
    fn worse(self, a: f64, b: f64) -> f64 {
        if a.is_nan() || b.is_nan() {
            return f64::NAN;
        }
        match self {
            Self::AtMost => a.max(b),
            Self::AtLeast => a.min(b),
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Self::AtMost => "<=",
            Self::AtLeast => ">=",
        }
    }
}

/// Worst value of one quantity over all cases of a criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub relation: Relation,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseFailure {
    pub case: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub m: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub cases: usize,
    pub measurements: Vec<Measurement>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<SeriesPoint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<CaseFailure>,
}

impl CriterionReport {
    /// One line: verdict, name, case count and every measurement against its bound.
    pub fn summary_line(&self) -> String {
        let parts: Vec<String> = self
            .measurements
            .iter()
            .map(|m| {
                format!(
                    "{} {:.3e} {} {:.0e}",
                    m.name,
                    m.value,
                    m.relation.symbol(),
                    m.bound
                )
            })
            .collect();
        format!(
            "[{}] {:>2} {} ({} cases): {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.cases,
            parts.join(", ")
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub seed: u64,
    pub pass: bool,
    pub criteria: Vec<CriterionReport>,
}

impl SuiteReport {
    fn new(suite: SuiteName, seed: u64, criteria: Vec<CriterionReport>) -> Self {
        Self {
            suite,
            seed,
            pass: criteria.iter().all(|c| c.pass),
            criteria,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Acceptance,
    Fuzz,
    Convergence,
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "acceptance" => Ok(Self::Acceptance),
            "fuzz" => Ok(Self::Fuzz),
            "convergence" => Ok(Self::Convergence),
            other => Err(Error::Invalid(format!("unknown suite {other:?}"))),
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Acceptance => "acceptance",
            Self::Fuzz => "fuzz",
            Self::Convergence => "convergence",
        })
    }
}

/// Overrides for the suites. Unset inner functions and symbols are drawn at
/// random (fuzz) or take the suite defaults (convergence). The acceptance
/// suite only reads `seed`: its families and tolerances are fixed.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub theta: Option<BlaschkeProduct>,
    pub alpha: Option<BlaschkeProduct>,
    pub symbol: Option<LaurentPolynomial>,
    pub m: Option<usize>,
    pub tol: Option<f64>,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            theta: None,
            alpha: None,
            symbol: None,
            m: None,
            tol: None,
            seed: DEFAULT_SEED,
        }
    }
}

impl SuiteConfig {
    /// `tol > 0`, and the guard band whenever `M`, `θ`, `α` and `φ` are all fixed.
    pub fn validate(&self) -> Result<()> {
        if let Some(tol) = self.tol {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(Error::Invalid(format!(
                    "tolerance must be positive, got {tol}"
                )));
            }
        }
        if let (Some(m), Some(theta), Some(alpha), Some(symbol)) =
            (self.m, &self.theta, &self.alpha, &self.symbol)
        {
            let required = symbol.degree() + theta.guard() + alpha.guard() + 2;
            if m < required {
                return Err(Error::GuardBand { m, required });
            }
        }
        Ok(())
    }
}

pub fn run_suite(name: SuiteName, config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    match name {
        SuiteName::Acceptance => Ok(acceptance_suite(config.seed)),
        SuiteName::Fuzz => Ok(fuzz_suite(config)),
        SuiteName::Convergence => convergence_suite(config),
    }
}

/// All acceptance criteria, in order.
pub fn acceptance_suite(seed: u64) -> SuiteReport {
    let criteria = (1..=10)
        .map(|id| criterion(id, seed).expect("ids 1..=10 exist"))
        .collect();
    SuiteReport::new(SuiteName::Acceptance, seed, criteria)
}

/// Acceptance criterion `id` in `1..=10`.
pub fn criterion(id: u32, seed: u64) -> Result<CriterionReport> {
    Ok(match id {
        1 => forward_characterization(seed),
        2 => symbol_round_trip(seed),
        3 => model_space_converse(),
        4 => block_structure_converse(),
        5 => annihilator_families(seed),
        6 => transitivity(seed),
        7 => isometry_convergence(),
        8 => functional_representation(seed),
        9 => conjugation(seed),
        10 => block_identities(seed),
        other => return Err(Error::Invalid(format!("no acceptance criterion {other}"))),
    })
}

struct Check {
    name: &'static str,
    bound: f64,
    relation: Relation,
}

const fn at_most(name: &'static str, bound: f64) -> Check {
    Check {
        name,
        bound,
        relation: Relation::AtMost,
    }
}

const fn at_least(name: &'static str, bound: f64) -> Check {
    Check {
        name,
        bound,
        relation: Relation::AtLeast,
    }
}

/// Runs `cases` independent cases, each producing one value per check.
fn evaluate<F>(id: u32, name: &str, checks: &[Check], cases: usize, case: F) -> CriterionReport
where
    F: Fn(usize) -> Result<Vec<f64>> + Sync,
{
    let outcomes: Vec<Result<Vec<f64>>> = (0..cases).into_par_iter().map(&case).collect();
    aggregate(id, name, checks, &outcomes)
}

fn aggregate(
    id: u32,
    name: &str,
    checks: &[Check],
    outcomes: &[Result<Vec<f64>>],
) -> CriterionReport {
    let mut worst: Vec<Option<f64>> = vec![None; checks.len()];
    let mut failures = Vec::new();
    for (case, outcome) in outcomes.iter().enumerate() {
        match outcome {
            Err(e) => failures.push(CaseFailure {
                case,
                detail: format!("error: {e}"),
            }),
            Ok(values) => {
                let mut bad = Vec::new();
                for ((check, w), &v) in checks.iter().zip(worst.iter_mut()).zip(values) {
                    *w = Some(w.map_or(v, |acc| check.relation.worse(acc, v)));
                    if !check.relation.holds(v, check.bound) {
                        bad.push(format!(
                            "{} = {v:.3e} (bound {} {:.0e})",
                            check.name,
                            check.relation.symbol(),
                            check.bound
                        ));
                    }
                }
                if !bad.is_empty() {
                    failures.push(CaseFailure {
                        case,
                        detail: bad.join("; "),
                    });
                }
            }
        }
    }
    let errors = outcomes.iter().any(|o| o.is_err());
    let measurements: Vec<Measurement> = checks
        .iter()
        .zip(worst)
        .map(|(check, w)| {
            let value = w.unwrap_or(f64::NAN);
            Measurement {
                name: check.name.into(),
                value,
                bound: check.bound,
                relation: check.relation,
                pass: !errors && check.relation.holds(value, check.bound),
            }
        })
        .collect();
    CriterionReport {
        id,
        name: name.into(),
        pass: failures.is_empty() && measurements.iter().all(|m| m.pass),
        cases: outcomes.len(),
        measurements,
        series: Vec::new(),
        failures,
    }
}

/// Concatenates sub-reports run over disjoint case families.
fn combine(id: u32, name: &str, parts: Vec<CriterionReport>) -> CriterionReport {
    let mut out = CriterionReport {
        id,
        name: name.into(),
        pass: true,
        cases: 0,
        measurements: Vec::new(),
        series: Vec::new(),
        failures: Vec::new(),
    };
    for part in parts {
        out.pass &= part.pass;
        out.failures
            .extend(part.failures.into_iter().map(|f| CaseFailure {
                case: f.case + out.cases,
                detail: f.detail,
            }));
        out.cases += part.cases;
        out.measurements.extend(part.measurements);
        out.series.extend(part.series);
    }
    out
}

// Stream tags keep the random families of different criteria independent.
const TAG_DTTO: u32 = 1;
const TAG_ANNIHILATE: u32 = 5;
const TAG_SCRIPTED: u32 = 50;
const TAG_TRANSITIVITY: u32 = 6;
const TAG_FUNCTIONAL: u32 = 8;
const TAG_CONJUGATION: u32 = 9;
const TAG_IDENTITIES: u32 = 10;
const TAG_FUZZ: u32 = 100;

/// A random `(θ, α, φ)` with truncation `M = guard_θ + guard_α + deg φ + 6 + extra`.
struct DttoCase {
    theta: BlaschkeProduct,
    alpha: BlaschkeProduct,
    phi: SymbolFunction,
    m: usize,
}

impl DttoCase {
    fn draw(rng: &mut CaseRng, extra: usize) -> Self {
        let theta = random_blaschke(rng, MAX_DEGREE, MAX_MODULUS);
        let alpha = random_blaschke(rng, MAX_DEGREE, MAX_MODULUS);
        let phi = SymbolFunction::new(random_symbol(rng, MAX_SYMBOL_DEGREE));
        Self::with(theta, alpha, phi, None, extra)
    }

    fn with(
        theta: BlaschkeProduct,
        alpha: BlaschkeProduct,
        phi: SymbolFunction,
        m: Option<usize>,
        extra: usize,
    ) -> Self {
        let m = m.unwrap_or(theta.guard() + alpha.guard() + phi.degree() + 6 + extra);
        Self {
            theta,
            alpha,
            phi,
            m,
        }
    }

    fn build(&self) -> Result<BlockOperator> {
        build_dtto(&self.theta, &self.alpha, &self.phi, self.m)
    }
}

fn max_defect(reports: impl IntoIterator<Item = f64>) -> f64 {
    reports
        .into_iter()
        .fold(0.0, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

fn forward_case(c: &DttoCase, tol: f64) -> Result<Vec<f64>> {
    let d = c.build()?;
    let blocks = check_block_conditions(&d, Some(tol))?;
    let adtto = check_adtto(&d, Some(tol))?;
    Ok(vec![
        max_defect(blocks.iter().map(|r| r.defect)),
        max_defect(adtto.conditions.iter().map(|r| r.defect)),
    ])
}

fn forward_characterization(seed: u64) -> CriterionReport {
    let checks = [
        at_most("block defect", EXACT_TOL),
        at_most("characterization defect", EXACT_TOL),
    ];
    evaluate(1, "forward characterization", &checks, 200, |i| {
        forward_case(
            &DttoCase::draw(&mut case_rng(seed, TAG_DTTO, i), 0),
            EXACT_TOL,
        )
    })
}

fn round_trip_case(c: &DttoCase) -> Result<Vec<f64>> {
    let d = c.build()?;
    let b = recover_symbol(&d, RecoveryMethod::Boundary)?.symbol.value;
    let z = recover_symbol(&d, RecoveryMethod::Zbar)?.symbol.value;
    Ok(vec![
        b.max_abs_diff(&c.phi.value),
        z.max_abs_diff(&c.phi.value),
        b.max_abs_diff(&z),
    ])
}

const ROUND_TRIP_CHECKS: [Check; 3] = [
    at_most("boundary error", ROUND_TRIP_TOL),
    at_most("zbar error", ROUND_TRIP_TOL),
    at_most("method disagreement", ROUND_TRIP_TOL),
];

fn symbol_round_trip(seed: u64) -> CriterionReport {
    evaluate(2, "symbol round trip", &ROUND_TRIP_CHECKS, 200, |i| {
        round_trip_case(&DttoCase::draw(&mut case_rng(seed, TAG_DTTO, i), 0))
    })
}

fn monomial(m: usize) -> BlaschkeProduct {
    BlaschkeProduct::monomial(m).expect("positive degree")
}

fn model_space_converse() -> CriterionReport {
    let checks = [
        at_most("dimension deficit", 0.0),
        at_most("distance to symbol span", EXACT_TOL),
    ];
    evaluate(3, "model space converse", &checks, 9, |i| {
        let (m, n) = (2 + i / 3, 2 + i % 3);
        let (theta, alpha) = (monomial(m), monomial(n));
        let sol = solve_shift_invariant_space(&theta, &alpha, OperatorSpace::Model)?;
        let cols: Vec<CVector> = (-(m as i64 - 1)..=(n as i64 - 1))
            .map(|k| {
                let a = build_tto(
                    &theta,
                    &alpha,
                    &SymbolFunction::new(LaurentPolynomial::z_pow(k)),
                );
                CVector::from_column_slice(a.entries.as_slice())
            })
            .collect();
        let span = range_basis(&CMatrix::from_columns(&cols), 1e-12);
        let distance = sol
            .basis
            .iter()
            .map(|a| distance_to_span(&span, &CVector::from_column_slice(a.as_slice())))
            .fold(0.0, f64::max);
        Ok(vec![
            (sol.dimension as f64 - (m + n - 1) as f64).abs(),
            distance,
        ])
    })
}

fn block_structure_converse() -> CriterionReport {
    let checks = [
        at_least("solution dimension", 1.0),
        at_most("structural deviation", EXACT_TOL),
    ];
    evaluate(4, "block structure converse", &checks, 1, |_| {
        let (theta, m) = (monomial(2), 10);
        let sol = solve_shift_invariant_space(&theta, &theta, OperatorSpace::ModelPerp { m })?;
        let mut deviation = 0.0f64;
        for a in &sol.basis {
            deviation = deviation.max(block_structure_deviation(
                &solution_as_blocks(&theta, &theta, m, a)?,
                m,
            ));
        }
        Ok(vec![sol.dimension as f64, deviation])
    })
}

fn annihilation_case(c: &DttoCase, rng: &mut CaseRng) -> Result<Vec<f64>> {
    let d = c.build()?;
    let (th, al) = (c.theta.series(), c.alpha.series());
    // θh + z̄² conj(k): both it and its shift stay in the section
    let f =
        &th.multiply(&random_analytic(rng, 3)) + &random_analytic(rng, 3).conj_function().shift(-2);
    let g =
        &al.multiply(&random_analytic(rng, 3)) + &random_analytic(rng, 3).conj_function().shift(-2);
    let shift = pair(
        &d,
        &gen_shift_pair(
            &f,
            &g,
            &basis_kperp(&c.theta, c.m),
            &basis_kperp(&c.alpha, c.m),
        )?,
    )?
    .norm();
    let mut family = 0.0f64;
    for l in 1..=6 {
        let (h, g) = (random_analytic(rng, 2), random_analytic(rng, 2));
        family = family.max(pair(&d, &gen_m(l, &c.theta, &c.alpha, &h, &g)?)?.norm());
    }
    Ok(vec![shift, family])
}

const ANNIHILATION_CHECKS: [Check; 2] = [
    at_most("shift pair pairing", EXACT_TOL),
    at_most("family pairing", EXACT_TOL),
];

/// Monomial cases for the scripted perturbations: `(m, n)` with `m, n >= 2`.
const SCRIPTED_PAIRS: [(usize, usize); 3] = [(2, 2), (2, 3), (3, 2)];

/// Adds `ε` to the entries that break only characterization condition `k`.
pub fn scripted_perturbation(d: &mut BlockOperator, condition: usize, eps: f64) {
    let e = C64::new(eps, 0.0);
    match condition {
        1 => d.that[(1, 1)] += e,
        2 => d.t_check[(0, 0)] += e,
        3 => d.gamma_hat[(1, 1)] += e,
        4 => {
            d.gamma_hat[(1, 0)] += e;
            d.gamma_hat[(0, 1)] += e;
        }
        _ => panic!("condition must be in 1..=4"),
    }
}

/// Families whose pairings detect a violation of condition `k`.
pub fn matching_families(condition: usize) -> &'static [usize] {
    match condition {
        1 => &[1],
        2 => &[2],
        3 => &[3, 4],
        4 => &[5, 6],
        _ => &[],
    }
}

/// Largest `|<D, M_l(z^p, z^q)>|` over `l` in `families` and `0 <= p, q <= depth`.
pub fn family_scan(d: &BlockOperator, families: &[usize], depth: usize) -> Result<f64> {
    let mut best = 0.0f64;
    for &l in families {
        for p in 0..=depth {
            for q in 0..=depth {
                let t = gen_m(
                    l,
                    &d.theta,
                    &d.alpha,
                    &LaurentPolynomial::z_pow(p as i64),
                    &LaurentPolynomial::z_pow(q as i64),
                )?;
                best = best.max(pair(d, &t)?.norm());
            }
        }
    }
    Ok(best)
}

fn scripted_case(seed: u64, j: usize) -> Result<Vec<f64>> {
    let (m, n) = SCRIPTED_PAIRS[j / 4];
    let condition = j % 4 + 1;
    let mut rng = case_rng(seed, TAG_SCRIPTED, j);
    let phi = SymbolFunction::new(random_symbol(&mut rng, 2));
    let c = DttoCase::with(monomial(m), monomial(n), phi, None, 0);
    let mut d = c.build()?;
    scripted_perturbation(&mut d, condition, PERTURBATION);
    let report = check_adtto(&d, Some(EXACT_TOL))?;
    let targeted = report.conditions[condition - 1].defect;
    let others = max_defect(
        report
            .conditions
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != condition - 1)
            .map(|(_, r)| r.defect),
    );
    let scan = family_scan(&d, matching_families(condition), m.max(n))?;
    Ok(vec![targeted, others, scan])
}

fn annihilator_families(seed: u64) -> CriterionReport {
    let forward = evaluate(5, "", &ANNIHILATION_CHECKS, 100, |i| {
        let mut rng = case_rng(seed, TAG_ANNIHILATE, i);
        let c = DttoCase::draw(&mut rng, 0);
        annihilation_case(&c, &mut rng)
    });
    let checks = [
        at_least("targeted defect", EXACT_TOL),
        at_most("untargeted defect", EXACT_TOL),
        at_least("matching family pairing", PAIRING_FLOOR),
    ];
    let scripted = evaluate(5, "", &checks, 4 * SCRIPTED_PAIRS.len(), |j| {
        scripted_case(seed, j)
    });
    combine(5, "annihilator families", vec![forward, scripted])
}

fn random_model_vector(rng: &mut CaseRng, theta: &BlaschkeProduct) -> LaurentPolynomial {
    basis_model(theta)
        .vectors()
        .iter()
        .fold(LaurentPolynomial::zero(), |acc, u| {
            &acc + &u.scale(random_complex(rng))
        })
}

fn transitivity(seed: u64) -> CriterionReport {
    let checks = [at_least("largest product coefficient", 1e-12)];
    evaluate(6, "transitivity", &checks, 50, |i| {
        let mut pair_rng = case_rng(seed, TAG_TRANSITIVITY, i / 10);
        let theta = random_blaschke(&mut pair_rng, MAX_DEGREE, MAX_MODULUS);
        let alpha = random_blaschke(&mut pair_rng, MAX_DEGREE, MAX_MODULUS);
        let mut rng = case_rng(seed, TAG_TRANSITIVITY + 1000, i);
        let f = random_model_vector(&mut rng, &theta);
        let g = random_model_vector(&mut rng, &alpha);
        let probe = transitivity_probe(&f, &g)?;
        Ok(vec![probe
            .product
            .coeffs()
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)])
    })
}

/// Largest singular value of `D_φ` on `K⊥(θ)@M → K⊥(α)@M` for each `M`.
pub fn norm_sweep(
    theta: &BlaschkeProduct,
    alpha: &BlaschkeProduct,
    phi: &SymbolFunction,
    sizes: &[usize],
) -> Result<Vec<SeriesPoint>> {
    sizes
        .par_iter()
        .map(|&m| {
            let d = build_dtto(theta, alpha, phi, m)?;
            Ok(SeriesPoint {
                m,
                value: spectral_norm(&d.full_matrix()),
            })
        })
        .collect()
}

fn convergence_report(
    id: u32,
    name: &str,
    sweep: Result<Vec<SeriesPoint>>,
    sup: f64,
) -> CriterionReport {
    let checks = [
        at_most("largest decrease", 0.0),
        at_most("excess over sup norm", 1e-12),
        at_most("gap at largest M", 0.05),
    ];
    let outcome = sweep.as_ref().map_err(Clone::clone).map(|s| {
        let drop = s
            .windows(2)
            .map(|w| w[0].value - w[1].value)
            .fold(f64::NEG_INFINITY, f64::max);
        let top = s.iter().map(|p| p.value).fold(f64::NEG_INFINITY, f64::max);
        let last = s.last().map_or(f64::NAN, |p| p.value);
        vec![drop.max(0.0), (top - sup).max(0.0), sup - last]
    });
    let mut report = aggregate(id, name, &checks, &[outcome]);
    report.series = sweep.unwrap_or_default();
    report
}

fn isometry_convergence() -> CriterionReport {
    let z2 = monomial(2);
    let phi = SymbolFunction::new(LaurentPolynomial::from_real(&[(-1, 1.0), (1, 1.0)]));
    convergence_report(
        7,
        "isometry convergence",
        norm_sweep(&z2, &z2, &phi, &CONVERGENCE_SIZES),
        2.0,
    )
}

fn functional_representation(seed: u64) -> CriterionReport {
    let checks = [at_most("pairing error", EXACT_TOL)];
    evaluate(8, "functional representation", &checks, 50, |i| {
        let mut rng = case_rng(seed, TAG_FUNCTIONAL, i);
        let theta = random_blaschke(&mut rng, MAX_DEGREE, MAX_MODULUS);
        let alpha = random_blaschke(&mut rng, MAX_DEGREE, MAX_MODULUS);
        let lo = rng.random_range(-4..=4);
        let hi = rng.random_range(lo..=4);
        let density = random_poly(&mut rng, lo, hi);
        let t = represent_functional(&density, &theta, &alpha);
        let m = theta.guard() + alpha.guard() + 14;
        let mut err = 0.0f64;
        for k in -4..=4 {
            let d = build_dtto(
                &theta,
                &alpha,
                &SymbolFunction::new(LaurentPolynomial::z_pow(k)),
                m,
            )?;
            err = err.max((pair(&d, &t)? - density.coeff(-k)).norm());
        }
        Ok(vec![err])
    })
}

fn conjugation(seed: u64) -> CriterionReport {
    let checks = [
        at_most("involution", IDENTITY_TOL),
        at_most("antiunitarity", IDENTITY_TOL),
        at_most("multiplier intertwining", IDENTITY_TOL),
        at_most("thetaH2 to Hminus", IDENTITY_TOL),
        at_most("Hminus to thetaH2", IDENTITY_TOL),
        at_most("model space preserved", IDENTITY_TOL),
    ];
    evaluate(9, "conjugation", &checks, 100, |i| {
        let mut rng = case_rng(seed, TAG_CONJUGATION, i);
        let theta = random_blaschke(&mut rng, MAX_DEGREE, MAX_MODULUS);
        let c = |f: &LaurentPolynomial| conjugation_c(&theta, f);
        let f = random_poly(&mut rng, -5, 5);
        let g = random_poly(&mut rng, -5, 5);
        let phi = random_symbol(&mut rng, 3);
        let h = random_analytic(&mut rng, 4);
        let k = random_poly(&mut rng, -5, -1);
        let u = random_model_vector(&mut rng, &theta);
        let down = c(&theta.series().multiply(&h));
        let up = c(&k);
        let cu = c(&u);
        Ok(vec![
            c(&c(&f)).distance(&f),
            (inner_product(&c(&f), &c(&g)) - inner_product(&g, &f)).norm(),
            c(&phi.multiply(&c(&f))).distance(&phi.conj_function().multiply(&f)),
            down.plus_part().norm(),
            up.distance(&project(&theta, Subspace::ThetaH2, &up)),
            cu.distance(&project(&theta, Subspace::Model, &cu)),
        ])
    })
}

/// Spectral norm of the leading `len × len` block of `a - b`.
fn leading_gap(a: &CMatrix, b: &CMatrix, len: usize) -> f64 {
    spectral_norm(&(a.view((0, 0), (len, len)) - b.view((0, 0), (len, len))))
}

fn identities_case(seed: u64, i: usize) -> Result<Vec<f64>> {
    let mut rng = case_rng(seed, TAG_IDENTITIES, i);
    let theta = random_blaschke(&mut rng, MAX_DEGREE, MAX_MODULUS);
    let alpha = random_blaschke(&mut rng, MAX_DEGREE, MAX_MODULUS);
    let phi = SymbolFunction::new(random_symbol(&mut rng, 3));
    let m = theta.guard() + alpha.guard() + phi.degree() + 10;
    let n = m + 1;
    let d = build_dtto(&theta, &alpha, &phi, m)?;
    let (th, al, v) = (theta.series(), alpha.series(), &phi.value);
    let (th_bar, al_bar, v_bar) = (theta.conj_series(), alpha.conj_series(), v.conj_function());
    let (src, dst, minus) = (
        basis_theta_h2(&theta, m),
        basis_theta_h2(&alpha, m),
        basis_hminus(m),
    );

    let th_h = th.multiply(&random_analytic(&mut rng, 3));
    let k = random_poly(&mut rng, -4, -1);
    let x = src.coordinates(&th_h);
    let xk = minus.coordinates(&k);
    let that_out = dst.synthesize(&(&d.that * &x))?;
    let gamma_hat_out = minus.synthesize(&(&d.gamma_hat * &x))?;
    let tcheck_out = minus.synthesize(&(&d.t_check * &xk))?;
    let gamma_check_out = dst.synthesize(&(&d.gamma_check * &xk))?;
    let pull_back = th_bar.multiply(&th_h);

    // multiplier forms of the four blocks
    let that_mult = al.multiply(
        &al_bar
            .multiply(v)
            .multiply(th)
            .multiply(&pull_back)
            .plus_part(),
    );
    let gamma_hat_mult = v.multiply(th).multiply(&pull_back).minus_part();
    let tcheck_mult = v_bar.multiply(&k.involution_j()).plus_part().involution_j();
    let gamma_check_mult = al.multiply(&al_bar.multiply(v).multiply(&k).plus_part());

    // conjugation forms
    let c_th = |f: &LaurentPolynomial| conjugation_c(&theta, f);
    let c_al = |f: &LaurentPolynomial| conjugation_c(&alpha, f);
    let that_conj = c_al(
        &al.multiply(&v_bar)
            .multiply(th_bar)
            .multiply(&c_th(&th_h))
            .minus_part(),
    );
    let swapped = {
        let w = th.multiply(&c_al(&k));
        let y = build_that(&alpha, &theta, &phi.conj(), n, n)
            * basis_theta_h2(&alpha, m).coordinates(&w);
        let back = th_bar.multiply(&basis_theta_h2(&theta, m).synthesize(&y)?);
        c_al(&back).minus_part()
    };
    let gamma_hat_conj = c_th(&project(
        &theta,
        Subspace::ThetaH2,
        &v_bar.multiply(&c_th(&th_h)),
    ));

    // semicommutation on the leading interior
    let len = 5;
    let (mut f1, mut f2) = (random_symbol(&mut rng, 3), random_symbol(&mut rng, 3));
    if i.is_multiple_of(2) {
        f1 = f1.plus_part();
    } else {
        f2 = f2.plus_part();
    }
    let sym = |p: LaurentPolynomial| SymbolFunction::new(p);
    let that_of = |p: &LaurentPolynomial| build_that(&theta, &theta, &sym(p.clone()), n, n);
    let tcheck_of = |p: &LaurentPolynomial| crate::operators::build_tcheck(&sym(p.clone()), n, n);
    let f1_bar = f1.conj_function();
    let f2_bar = f2.conj_function();
    let semi_that = leading_gap(
        &(that_of(&f1_bar) * that_of(&f2)),
        &that_of(&f1_bar.multiply(&f2)),
        len,
    );
    let semi_tcheck = leading_gap(
        &(tcheck_of(&f1) * tcheck_of(&f2_bar)),
        &tcheck_of(&f1.multiply(&f2_bar)),
        len,
    );

    // symbols invisible to the Hankel blocks
    let p = rng.random_range(0..=3i64);
    let kill_hat = build_gamma_hat(&theta, &sym(th_bar.shift(p)), len, len).norm();
    let kill_check = build_gamma_check(&alpha, &sym(al.shift(-p)), len, len).norm();
    let shifted = sym(v + &th_bar.multiply(&random_analytic(&mut rng, 3)));
    let kill_shift = leading_gap(
        &build_gamma_hat(&theta, &phi, n, n),
        &build_gamma_hat(&theta, &shifted, n, n),
        len,
    );

    Ok(vec![
        that_out.distance(&that_mult),
        gamma_hat_out.distance(&gamma_hat_mult),
        tcheck_out.distance(&tcheck_mult),
        gamma_check_out.distance(&gamma_check_mult),
        that_out.distance(&that_conj),
        tcheck_out.distance(&swapped),
        gamma_hat_out.distance(&gamma_hat_conj),
        semi_that,
        semi_tcheck,
        kill_hat,
        kill_check,
        kill_shift,
    ])
}

fn block_identities(seed: u64) -> CriterionReport {
    let checks = [
        at_most("That multiplier form", IDENTITY_TOL),
        at_most("GammaHat multiplier form", IDENTITY_TOL),
        at_most("TCheck multiplier form", IDENTITY_TOL),
        at_most("GammaCheck multiplier form", IDENTITY_TOL),
        at_most("That conjugation form", IDENTITY_TOL),
        at_most("TCheck adjoint form", IDENTITY_TOL),
        at_most("GammaHat conjugation form", IDENTITY_TOL),
        at_most("That semicommutation", IDENTITY_TOL),
        at_most("TCheck semicommutation", IDENTITY_TOL),
        at_most("GammaHat kill", IDENTITY_TOL),
        at_most("GammaCheck kill", IDENTITY_TOL),
        at_most("GammaHat symbol shift", IDENTITY_TOL),
    ];
    evaluate(10, "block identities", &checks, 100, |i| {
        identities_case(seed, i)
    })
}

/// Random operators under the configured overrides: forward soundness,
/// round trip, discrimination against random perturbations, the analytic
/// test and annihilation by the rank-two families.
pub fn fuzz_suite(config: &SuiteConfig) -> SuiteReport {
    let seed = config.seed;
    let draw = |tag: u32, i: usize| {
        let mut rng = case_rng(seed, TAG_FUZZ + tag, i);
        let theta = config
            .theta
            .clone()
            .unwrap_or_else(|| random_blaschke(&mut rng, MAX_DEGREE, MAX_MODULUS));
        let alpha = config
            .alpha
            .clone()
            .unwrap_or_else(|| random_blaschke(&mut rng, MAX_DEGREE, MAX_MODULUS));
        let mut symbol = config
            .symbol
            .clone()
            .unwrap_or_else(|| random_symbol(&mut rng, MAX_SYMBOL_DEGREE));
        if tag == 4 && config.symbol.is_none() && i.is_multiple_of(2) {
            symbol = symbol.plus_part();
        }
        let c = DttoCase::with(theta, alpha, SymbolFunction::new(symbol), config.m, 0);
        (c, rng)
    };
    let tol = config.tol.unwrap_or(EXACT_TOL);

    let soundness_checks = [
        at_most("block defect", tol),
        at_most("characterization defect", tol),
    ];
    let soundness = evaluate(1, "forward soundness", &soundness_checks, 200, |i| {
        forward_case(&draw(1, i).0, tol)
    });
    let round_trip = evaluate(2, "round trip", &ROUND_TRIP_CHECKS, 200, |i| {
        round_trip_case(&draw(2, i).0)
    });

    let discrimination_checks = [at_least("largest condition defect", PERTURBATION / 10.0)];
    let discrimination = evaluate(3, "discrimination", &discrimination_checks, 100, |i| {
        let (c, mut rng) = draw(3, i);
        let d = c.build()?;
        let size = 2 * d.block_dim();
        let r = CMatrix::from_fn(size, size, |_, _| random_complex(&mut rng));
        let r = r.unscale(spectral_norm(&r));
        let mut perturbed = split_blocks(
            &d.theta,
            &d.alpha,
            d.m,
            &(d.full_matrix() + r * C64::new(PERTURBATION, 0.0)),
        )?;
        perturbed.edge = d.edge;
        let report = check_adtto(&perturbed, Some(tol))?;
        Ok(vec![max_defect(report.conditions.iter().map(|r| r.defect))])
    });

    let analytic = evaluate(
        4,
        "analytic test",
        &[at_most("misclassified", 0.0)],
        100,
        |i| {
            let c = draw(4, i).0;
            let verdict = is_analytic_adtto(&c.build()?)?.pass;
            Ok(vec![if verdict == c.phi.value.minus_part().is_zero() {
                0.0
            } else {
                1.0
            }])
        },
    );

    let annihilation = evaluate(5, "annihilation", &ANNIHILATION_CHECKS, 100, |i| {
        let (c, mut rng) = draw(5, i);
        annihilation_case(&c, &mut rng)
    });

    let transitivity_checks = [at_least("largest product coefficient", 1e-12)];
    let dual = evaluate(6, "dual transitivity", &transitivity_checks, 100, |i| {
        let (c, mut rng) = draw(6, i);
        let f = basis_kperp(&c.theta, 4)
            .synthesize(&CVector::from_fn(10, |_, _| random_complex(&mut rng)))?;
        let g = basis_kperp(&c.alpha, 4)
            .synthesize(&CVector::from_fn(10, |_, _| random_complex(&mut rng)))?;
        let probe = dual_transitivity_probe(&c.theta, &c.alpha, &f, &g)?;
        let largest = [
            &probe.plus,
            &probe.minus,
            &probe.hat_cross,
            &probe.check_cross,
        ]
        .iter()
        .flat_map(|p| p.coeffs().iter().map(|c| c.norm()))
        .fold(0.0, f64::max);
        Ok(vec![largest])
    });

    SuiteReport::new(
        SuiteName::Fuzz,
        seed,
        vec![
            soundness,
            round_trip,
            discrimination,
            analytic,
            annihilation,
            dual,
        ],
    )
}

/// Operator norms of the truncations at [`CONVERGENCE_SIZES`] against the sup
/// norm of the symbol (sampled on 2^14 points). Defaults: `θ = α = z²`,
/// `φ = z + z̄`.
pub fn convergence_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let theta = config.theta.clone().unwrap_or_else(|| monomial(2));
    let alpha = config.alpha.clone().unwrap_or_else(|| monomial(2));
    let value = config
        .symbol
        .clone()
        .unwrap_or_else(|| LaurentPolynomial::from_real(&[(-1, 1.0), (1, 1.0)]));
    let phi = SymbolFunction::new(value.clone());
    let required = phi.degree() + theta.guard() + alpha.guard() + 2;
    if CONVERGENCE_SIZES[0] < required {
        return Err(Error::GuardBand {
            m: CONVERGENCE_SIZES[0],
            required,
        });
    }
    let sup = value.sup_norm_sampled(1 << 14);
    let sweep = norm_sweep(&theta, &alpha, &phi, &CONVERGENCE_SIZES);
    Ok(SuiteReport::new(
        SuiteName::Convergence,
        config.seed,
        vec![convergence_report(
            1,
            "operator norm convergence",
            sweep,
            sup,
        )],
    ))
}
