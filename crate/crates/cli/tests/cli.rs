use std::path::PathBuf;
use std::process::Command;

use bkl_core::jet::{origin, Jet};
use bkl_core::mc::ConstraintData;
use bkl_core::scalar::{Scalar, Q};
use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).display().to_string()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("bkl-cli-test-{}-{name}", std::process::id()))
}

/// Runs `bkl` and returns (exit code, report).
fn bkl(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_bkl")).args(args).output().unwrap();
    let report = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), report)
}

fn checks_pass(r: &Value) -> bool {
    r["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass")
}

#[test]
fn orbit_fixture() {
    let (code, r) = bkl(&["orbit", "--u0", "5/2", "--steps", "10"]);
    assert_eq!(code, 0);
    assert_eq!(r["output"]["csv"], "step,u\n0,5/2\n1,3/2\n2,1/2\n");
    assert_eq!(r["output"]["termination"], "excluded value 1/2");

    let (code, r) = bkl(&["orbit", "--u0", "22/7", "--steps", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["output"]["termination"], "step limit");
    assert_eq!(r["output"]["csv"].as_str().unwrap().lines().count(), 5);
}

#[test]
fn orbit_csv_can_be_emitted() {
    let path = scratch("orbit.csv");
    let (code, r) = bkl(&["orbit", "--u0", "4", "--emit", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["output"]["emitted"], path.display().to_string());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "step,u\n0,4\n1,3\n2,2\n");
    std::fs::remove_file(path).unwrap();
}

#[test]
fn verify_bounce_on_homogeneous_kasner() {
    for field in ["rational", "float"] {
        let (code, r) = bkl(&["verify-bounce", &data("kasner_u3_normal_form.json"), "--field", field, "--samples", "5"]);
        assert_eq!(code, 0, "{field}: {r}");
        assert!(r["passed"].as_bool().unwrap());
        assert!(checks_pass(&r));
        assert_eq!(r["output"]["u"]["coeffs"]["(0,0,0,0)"], if field == "rational" { "3" } else { "3e0" });
    }
}

#[test]
fn specseq_on_d20() {
    for field in ["rational", "f7"] {
        let (code, r) = bkl(&["specseq", &data("d20_complex.json"), "--field", field]);
        assert_eq!(code, 0);
        let pages = r["output"]["pages"].as_array().unwrap();
        assert_eq!(pages.last().unwrap()["dims"], serde_json::json!([0, 1, 0]));
        assert_eq!(r["output"]["gr_homology"], serde_json::json!([0, 1, 0]));
        assert_eq!(pages[2]["ranks"], serde_json::json!([1, 0, 0]));
    }
    let (code, r) = bkl(&["specseq", &data("d20_complex.json"), "--field", "float"]);
    assert_eq!(code, 2);
    assert!(r["error"].as_str().unwrap().contains("exact field"));
}

#[test]
fn decompose_splits_theta1_sigma23() {
    let (code, r) = bkl(&["decompose", &data("element_theta1_s23.json")]);
    assert_eq!(code, 0);
    let comps = r["output"]["components"].as_object().unwrap();
    assert_eq!(comps.keys().collect::<Vec<_>>(), ["002", "020"]);
    assert_eq!(comps["002"][0]["coeff"]["coeffs"]["(0,0,0,0)"], "1/2");
    assert_eq!(r["output"]["filtration_degrees"]["three"], serde_json::json!([0, 2, 2]));
}

#[test]
fn bracket_of_time_derivation_with_t_boost() {
    let (code, r) = bkl(&["bracket", &data("element_theta0_dt.json"), &data("element_t_theta1_s1.json")]);
    assert_eq!(code, 0);
    assert!(checks_pass(&r));
    let b = r["output"]["bracket"].as_array().unwrap();
    assert_eq!(b.len(), 1);
    assert_eq!(b[0]["gen"], "s1");
    assert_eq!(b[0]["theta"], serde_json::json!([0, 1]));
}

#[test]
fn mc_residual_of_the_kasner_gauge() {
    for mode in ["free", "bounce", "E"] {
        let (code, r) = bkl(&["mc-residual", &data("kasner_u3_gauge.json"), "--mode", mode]);
        assert_eq!(code, 0, "{mode}");
        assert_eq!(r["output"]["norms"], serde_json::json!({}));
    }
}

#[test]
fn failing_checks_exit_nonzero() {
    // Kasner exponents violating the quadratic constraint.
    let b = origin::<Q>();
    let unit = [0, 1, 2].map(|i| [0, 1, 2].map(|k| if i == k { Jet::one(&b, 4) } else { Jet::zero(&b, 4) }));
    let g0 = [1, -4, -1].map(|v| Jet::constant(Q::from_i64(v), &b, 4));
    let p = ConstraintData::from_frame(unit, g0, Jet::zero(&b, 4)).unwrap().sufficient_gauge();
    let path = scratch("bad-gauge.json");
    std::fs::write(&path, serde_json::to_string(&p).unwrap()).unwrap();
    let (code, r) = bkl(&["mc-residual", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(code, 1);
    assert!(!r["passed"].as_bool().unwrap());
    assert!(r["output"]["norms"]["000"].as_f64().unwrap() > 0.0);
}

#[test]
fn schema_violations_are_reported() {
    let path = scratch("not-a-germ.json");
    std::fs::write(&path, "{\"order\": 3}").unwrap();
    let (code, r) = bkl(&["solve-constraints", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(code, 2);
    assert!(r["error"].as_str().unwrap().starts_with("invalid GermData JSON"));
    assert!(!r["passed"].as_bool().unwrap());
}

#[test]
fn solve_constraints_is_deterministic() {
    let out = scratch("cd.json");
    let args = ["solve-constraints", &data("germ_rational.json"), "--order", "4", "--emit", out.to_str().unwrap()];
    let (code, mut a) = bkl(&args);
    assert_eq!(code, 0);
    assert!(checks_pass(&a));
    let d: ConstraintData<Q> = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(d.residuals().truncate(3).is_zero(0.0));
    let (_, mut b) = bkl(&args);
    std::fs::remove_file(&out).unwrap();
    a["timing_ms"] = Value::Null;
    b["timing_ms"] = Value::Null;
    assert_eq!(a, b);
    assert_eq!(a["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn verify_auto_on_random_data() {
    let (code, r) = bkl(&["verify-auto", "--order", "4", "--seed", "5"]);
    assert_eq!(code, 0, "{r}");
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.iter().any(|n| n.starts_with("three-step factorization")));
    assert!(names.iter().any(|n| n.starts_with("morphism preserves MC")));
}
