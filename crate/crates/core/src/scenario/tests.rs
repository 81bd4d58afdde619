use super::*;

fn load(text: &str) -> (Scenario, Parameters) {
    parse_scenario(text).unwrap()
}

const MINIMAL_GAUSSIAN: &str = r#"{
  "name": "equal",
  "experiment": "gaussian_analysis",
  "seed": 0,
  "parameters": {
    "grid": { "n": 96, "cover_sigmas": 6 },
    "cases": [ { "name": "eq", "a": { "mass": 1, "sigma": 1 }, "b": { "mass": 1, "sigma": 1 }, "expect": "product" } ]
  }
}"#;

const IDENTITY: &str = r#"{
  "name": "identity",
  "experiment": "rep_check",
  "seed": 4,
  "parameters": { "pairs": 3, "probes": 3, "dim": 1, "n": 24, "identity_only": true, "reorder_samples": 0, "angular": null }
}"#;

fn report_bytes(text: &str, format: Format) -> Vec<u8> {
    let (s, p) = load(text);
    let r = run_scenario(&s, &p, &Overrides::default()).unwrap();
    let mut out = Vec::new();
    write_report(&r, format, &mut out).unwrap();
    out
}

#[test]
fn equal_packets_give_zero_gamma_and_entropy() {
    let (s, p) = load(MINIMAL_GAUSSIAN);
    let r = run_scenario(&s, &p, &Overrides::default()).unwrap();
    assert_eq!(r.failures(), 0);
    let get = |n: &str| r.checks.iter().find(|c| c.name == n).unwrap().value;
    assert_eq!(get("eq/gamma"), 0.0);
    assert!(get("eq/ie_entropy") < 1e-12);
}

#[test]
fn identity_rep_check_has_zero_residuals() {
    let (s, p) = load(IDENTITY);
    let r = run_scenario(&s, &p, &Overrides::default()).unwrap();
    assert_eq!(r.exit_code(), 0);
    for c in &r.checks {
        if c.comparison == Comparison::Below {
            assert_eq!(c.value, 0.0, "{}", c.name);
        }
    }
}

#[test]
fn reports_are_byte_stable() {
    assert_eq!(report_bytes(IDENTITY, Format::Json), report_bytes(IDENTITY, Format::Json));
    assert_eq!(report_bytes(MINIMAL_GAUSSIAN, Format::Csv), report_bytes(MINIMAL_GAUSSIAN, Format::Csv));
}

#[test]
fn csv_has_fixed_header_and_one_row_per_check() {
    let text = String::from_utf8(report_bytes(MINIMAL_GAUSSIAN, Format::Csv)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "name,value,reference,tolerance,comparison,pass");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("eq/gamma,0.000000000000e0,"));
}

#[test]
fn json_report_round_trips() {
    let bytes = report_bytes(IDENTITY, Format::Json);
    let v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(v["environment"]["seed"], 4);
    assert_eq!(v["scenario"]["name"], "identity");
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 3);
    assert_eq!(checks[1]["name"], "max_residual");
    assert_eq!(checks[1]["pass"], true);
    // keys come out sorted
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["checks", "environment", "scenario"]);
    let reparsed: Scenario = serde_json::from_value(v["scenario"].clone()).unwrap();
    assert_eq!(reparsed.experiment, Experiment::RepCheck);
}

#[test]
fn config_errors_carry_json_pointers() {
    let pointer_of = |text: &str| match parse_scenario(text) {
        Err(Error::Config { pointer, .. }) => pointer,
        other => panic!("expected a config error, got {other:?}"),
    };
    assert_eq!(pointer_of(r#"{"name":"x","experiment":"nope"}"#), "/experiment");
    assert_eq!(
        pointer_of(
            r#"{"name":"x","experiment":"gaussian_analysis","parameters":{"cases":[{"name":"a","a":{"mass":"heavy","sigma":1},"b":{"mass":1,"sigma":1}}]}}"#
        ),
        "/parameters/cases/0/a/mass"
    );
    assert_eq!(
        pointer_of(
            r#"{"name":"x","experiment":"gaussian_analysis","parameters":{"cases":[{"name":"a","a":{"mass":-1,"sigma":1},"b":{"mass":1,"sigma":1}}]}}"#
        ),
        "/parameters/cases/0/a/mass"
    );
    assert_eq!(
        pointer_of(r#"{"name":"x","experiment":"scatter_pw","parameters":{"model":"coulomb:1"}}"#),
        "/parameters/model"
    );
    assert_eq!(pointer_of(r#"{"name":"x","experiment":"rep_check","parameters":{"dim":2}}"#), "/parameters/dim");
    assert_eq!(pointer_of(r#"{"name":"x","experiment":"rep_check","bogus":1}"#), "/bogus");
}

#[test]
fn randomized_runs_need_a_seed() {
    let (s, p) = load(
        r#"{"name":"x","experiment":"rep_check","parameters":{"pairs":1,"probes":1,"dim":1,"n":16,"reorder_samples":0,"angular":null}}"#,
    );
    match run_scenario(&s, &p, &Overrides::default()) {
        Err(Error::Config { pointer, .. }) => assert_eq!(pointer, "/seed"),
        other => panic!("{other:?}"),
    }
    let r = run_scenario(&s, &p, &Overrides { seed: Some(9), smatrix: None }).unwrap();
    assert_eq!(r.environment.seed, Some(9));
}

#[test]
fn seed_override_changes_random_draws_only_through_the_seed() {
    let text =
        r#"{"name":"x","experiment":"invariance_sweep","seed":1,"parameters":{"elements":2,"n":48,"spacing":0.5}}"#;
    let (s, p) = load(text);
    let a = run_scenario(&s, &p, &Overrides::default()).unwrap();
    let b = run_scenario(&s, &p, &Overrides { seed: Some(1), smatrix: None }).unwrap();
    assert_eq!(a, b);
    let c = run_scenario(&s, &p, &Overrides { seed: Some(2), smatrix: None }).unwrap();
    assert_ne!(a.checks, c.checks);
}

#[test]
fn mass_width_pair_in_scatter_1d() {
    let text = r#"{
      "name": "pair",
      "experiment": "scatter_1d",
      "parameters": {
        "grid": { "n": 128, "cover_sigmas": 6 },
        "cases": [
          { "name": "ok", "a": { "mass": 1, "sigma": 1 }, "b": { "mass": 4, "sigma": 2 }, "expect": "product" },
          { "name": "off", "a": { "mass": 1, "sigma": 1 }, "b": { "mass": 4, "sigma": 1.8 }, "expect": "entangled" }
        ]
      }
    }"#;
    let (s, p) = load(text);
    let r = run_scenario(&s, &p, &Overrides::default()).unwrap();
    assert_eq!(r.failures(), 0, "{:?}", r.checks);
    assert!(r.checks.iter().any(|c| c.name == "ok/out_entropy" && c.comparison == Comparison::Below));
    assert!(r.checks.iter().any(|c| c.name == "off/out_entropy" && c.comparison == Comparison::Above));
}
