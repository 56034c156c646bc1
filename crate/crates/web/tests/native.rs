use serde_json::Value;
use yamabe_web::{counterexample_json, lambda_profile_json, radial_json};

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.unwrap()).unwrap()
}

#[test]
fn profile_lists_every_k() {
    let v = parse(lambda_profile_json(12));
    let b = v["bounds"].as_array().unwrap();
    assert_eq!(b.len(), 7);
    assert_eq!(b[0]["k"], 2);
    assert_eq!(b[0]["decimal"], b[6]["decimal"]);
    assert_eq!(v["min"], b[0]["decimal"]);
    assert_eq!(v["argmin"], serde_json::json!([2, 8]));
    assert!(v["lambda_hp2"].as_str().unwrap().starts_with("158.72567"));
    assert_eq!(parse(lambda_profile_json(7))["lambda_hp2"], Value::Null);
    assert!(lambda_profile_json(5).is_err());
}

#[test]
fn shooting_finds_the_benchmark() {
    let v = parse(radial_json(7, 2, 1.0, 0.0));
    assert_eq!(v["shot"], true);
    assert!((v["u0"].as_f64().unwrap() - 1.0).abs() < 1e-4);
    assert_eq!(v["classification"], "decaying");
    let r = v["trajectory"]["r"].as_array().unwrap();
    assert!(r.len() <= 601 && r.len() > 50);
    assert_eq!(v["verdict"]["theorem_confirmed"], true);
}

#[test]
fn integration_from_large_data_crosses() {
    let v = parse(radial_json(7, 2, 1.0, 2.0));
    assert_eq!(v["shot"], false);
    assert_eq!(v["classification"], "crossing");
    assert!(radial_json(7, 9, 1.0, 1.0).is_err());
}

#[test]
fn counterexample_conventions() {
    let d = parse(counterexample_json(7, false));
    assert_eq!(d["verdict_l2"], false);
    let p = parse(counterexample_json(7, true));
    assert_eq!(p["discrepancy_flag"], true);
    assert!(counterexample_json(3, false).is_err());
}
