use catalytic::corpus::{self, validate};
use catalytic::equation::CatalyticEquation;
use catalytic::Error;

#[test]
fn every_entry_validates() {
    for name in corpus::list() {
        let r = validate(name).unwrap();
        let failed: Vec<_> = r.checks.iter().filter(|c| !c.pass).collect();
        assert!(r.passed(), "{name}: {:?} {failed:?}", r.error);
    }
}

#[test]
fn validation_is_deterministic() {
    let a = validate("planar-maps-vertices").unwrap();
    let b = validate("planar-maps-vertices").unwrap();
    let obs = |r: &corpus::ValidationReport| r.checks.iter().map(|c| c.observed.clone()).collect::<Vec<_>>();
    assert_eq!(obs(&a), obs(&b));
}

#[test]
fn unknown_entry() {
    assert!(matches!(corpus::load("no-such"), Err(Error::UnknownEntry(_))));
    assert!(matches!(validate("no-such"), Err(Error::UnknownEntry(_))));
}

#[test]
fn entries_survive_a_text_round_trip() {
    for name in corpus::list() {
        let e = corpus::load(name).unwrap();
        let again = CatalyticEquation::parse(&e.equation.to_text()).unwrap();
        assert_eq!(again.rhs(), e.equation.rhs(), "{name}");
    }
}

#[test]
fn simple_maps_records_generic_mode() {
    let r = validate("simple-maps").unwrap();
    assert!(r.passed());
    assert!(r.warnings.iter().any(|w| w.contains("generic mode")));
}
