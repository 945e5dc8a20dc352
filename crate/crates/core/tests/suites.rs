use msolab::suite::{convergence_suite, criterion, fuzz_suite, run_suite, SuiteConfig, SuiteName};
use msolab::{BlaschkeProduct, Error, LaurentPolynomial};

#[test]
fn fuzz_suite_passes_and_is_reproducible() {
    let config = SuiteConfig {
        seed: 2024,
        ..SuiteConfig::default()
    };
    let a = fuzz_suite(&config);
    for c in &a.criteria {
        assert!(c.pass, "{}", c.summary_line());
    }
    let b = fuzz_suite(&config);
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn fuzz_suite_honours_fixed_inputs() {
    let config = SuiteConfig {
        theta: Some(BlaschkeProduct::monomial(3).unwrap()),
        alpha: Some(BlaschkeProduct::monomial(2).unwrap()),
        symbol: Some(LaurentPolynomial::from_real(&[(-2, 1.0), (1, -0.5)])),
        m: Some(14),
        ..SuiteConfig::default()
    };
    assert!(fuzz_suite(&config).pass);
}

#[test]
fn default_convergence_sweep() {
    let report = convergence_suite(&SuiteConfig::default()).unwrap();
    assert!(report.pass);
    let series = &report.criteria[0].series;
    assert_eq!(
        series.iter().map(|p| p.m).collect::<Vec<_>>(),
        vec![16, 32, 64, 128, 256]
    );
    assert!(series.windows(2).all(|w| w[0].value <= w[1].value));
}

#[test]
fn convergence_rejects_tight_guard() {
    let config = SuiteConfig {
        symbol: Some(LaurentPolynomial::z_pow(15)),
        ..SuiteConfig::default()
    };
    assert!(matches!(
        convergence_suite(&config),
        Err(Error::GuardBand { .. })
    ));
}

#[test]
fn invalid_requests() {
    assert!(criterion(11, 0).is_err());
    let config = SuiteConfig {
        tol: Some(-1.0),
        ..SuiteConfig::default()
    };
    assert!(run_suite(SuiteName::Fuzz, &config).is_err());
}
