use catalytic::analysis::{analyze, AnalysisOptions};
use catalytic::corpus;
use catalytic::report::{AnalysisReport, SCHEMA};

fn report(name: &str, opts: &AnalysisOptions) -> AnalysisReport {
    let eq = corpus::load(name).unwrap().equation;
    AnalysisReport::from(&analyze(&eq, opts).unwrap())
}

#[test]
fn json_round_trips() {
    let opts = AnalysisOptions { coefficients: Some(12), clt: true, ..Default::default() };
    for name in ["motzkin", "lattice-deg-3", "planar-maps-vertices", "simple-maps"] {
        let r = report(name, &opts);
        let text = serde_json::to_string_pretty(&r).unwrap();
        let back: AnalysisReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r, "{name}");
        assert_eq!(back.schema, SCHEMA);
    }
}

#[test]
fn identical_inputs_give_identical_reports() {
    let opts = AnalysisOptions { asymptotics: true, asymptotic_terms: 300, clt: true, ..Default::default() };
    let a = report("planar-maps-vertices", &opts).without_timing();
    let b = report("planar-maps-vertices", &opts).without_timing();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn numbers_are_strings() {
    let r = report("motzkin", &AnalysisOptions { coefficients: Some(6), ..Default::default() });
    assert_eq!(r.coefficients.as_deref(), Some(&["1", "1", "2", "4", "9", "21"].map(String::from)[..]));
    let cp = r.critical_point.unwrap();
    assert!(cp["z0"].is_string(), "{cp}");
}
