use zetahopf_core::numerics::ZetaCache;
use zetahopf_core::verify::{run_suite, VerifyConfig, SUITES};

fn run(name: &str) {
    let cfg = VerifyConfig { digits: 25, seed: 7, jobs: 4 };
    let report = run_suite(name, &cfg, &ZetaCache::new()).unwrap();
    print!("{}", report.to_text());
    assert!(report.pass(), "{}", report.to_text());
}

#[test]
fn hopf_suite() {
    run("hopf");
}

#[test]
fn mzv_suite() {
    run("mzv-identities");
}

#[test]
fn selberg_suite() {
    run("selberg-oracle");
}

#[test]
fn matrix_suite() {
    run("matrix");
}

#[test]
fn bridge_suite() {
    run("bridge");
}

#[test]
fn unknown_suite_is_rejected() {
    let cfg = VerifyConfig { digits: 25, seed: 7, jobs: 1 };
    assert!(run_suite("nope", &cfg, &ZetaCache::new()).is_err());
    assert_eq!(SUITES.len(), 5);
}
