use std::process::{Command, Output};

use serde_json::Value;

fn mforms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mforms"))
        .args(args)
        .env_remove("MF_TRUNCATION")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn complex(v: &Value) -> (f64, f64) {
    let z = equivariant_forms::parse_complex(v.as_str().unwrap()).unwrap();
    (z.re, z.im)
}

#[test]
fn reduce_example() {
    let out = mforms(&["reduce", "--z", "5+1i"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["word"], "T^-5");
    assert_eq!(complex(&v["z_reduced"]), (0.0, 1.0));
}

#[test]
fn eval_examples() {
    let v = json(&mforms(&["eval", "--form", "j", "--z", "i"]));
    let (re, im) = complex(&v["value"]);
    let bound = v["tail_bound"].as_f64().unwrap();
    assert!((re - 1728.0).abs() <= bound + 1e-9 && im.abs() < 1e-9);
    let v = json(&mforms(&["eval", "--form", "E4", "--z", "0.5+0.8660254i"]));
    assert!(v["abs"].as_f64().unwrap() < 1e-6);
    let v = json(&mforms(&["eval", "--form", "Delta", "--z", "i"]));
    assert!(v["abs"].as_f64().unwrap() > 0.0);
}

#[test]
fn classify_examples() {
    let class = |m: &str| json(&mforms(&["classify", m]))["class"].as_str().unwrap().to_string();
    assert_eq!(class("1,1,0,1"), "parabolic");
    assert_eq!(class("0,-1,1,0"), "elliptic");
    assert_eq!(class("2,0,0,0.5"), "hyperbolic");
}

#[test]
fn zeros_example_contains_both_reference_zeros() {
    let out = mforms(&["zeros", "--function", "E2", "--box", "-0.5,0.5,0.05,1.0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let zeros: Vec<(f64, f64)> = v["zeros"]
        .as_array()
        .unwrap()
        .iter()
        .map(|z| complex(&z["location"]))
        .collect();
    for (re, im) in [(0.0, 0.5235217000), (0.5, 0.1309190304)] {
        assert!(
            zeros.iter().any(|z| (z.0 - re).hypot(z.1 - im) < 1e-6),
            "{re}+{im}i missing"
        );
    }
    assert!(v["orbit_count"].as_u64().unwrap() >= 3);
}

#[test]
fn critical_points_of_delta_are_e2_zeros() {
    let v = json(&mforms(&[
        "critical-points",
        "--function",
        "Delta",
        "--box",
        "-0.5,0.5,0.1,1.0",
    ]));
    let zeros = v["zeros"].as_array().unwrap();
    assert!(!zeros.is_empty());
    assert!(zeros.iter().any(|z| {
        let (re, im) = complex(&z["location"]);
        re.abs() < 1e-9 && (im - 0.5235217000).abs() < 1e-6
    }));
}

#[test]
fn check_identities_passes_with_thirteen_or_more() {
    let out = mforms(&["check-identities"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["n_checks"].as_u64().unwrap() >= 13);
    assert_eq!(v["n_checks"], v["n_passed"]);
    let v = json(&mforms(&[
        "check-identities",
        "--only",
        "ram2",
        "--n",
        "7",
        "--seed",
        "42",
    ]));
    assert_eq!(v["checks"][0]["n_points"], 7);
}

#[test]
fn truncation_env_and_breach_exit_code() {
    let out = Command::new(env!("CARGO_BIN_EXE_mforms"))
        .args(["check-identities", "--only", "ram1"])
        .env("MF_TRUNCATION", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "tolerance_breach");
}

#[test]
fn equivariance_report_and_negative_control() {
    let v = json(&mforms(&["equivariance", "--form", "Delta", "--samples", "100"]));
    assert!(v["max_dev"].as_f64().unwrap() < 1e-7);
    for key in ["mean_dev", "n_fail", "worst_sample"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let out = mforms(&["equivariance", "--form", "z+1", "--group", "modular", "--samples", "50"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn input_errors_exit_with_three() {
    for args in [
        vec!["eval", "--form", "E9", "--z", "i"],
        vec!["eval", "--form", "E4", "--z", "0.001i"],
        vec!["classify", "1,2,2,4"],
        vec!["zeros", "--function", "E2", "--box", "0,1,2"],
        vec!["reduce", "--z", "1-1i"],
        vec!["no-such-command"],
    ] {
        let out = mforms(&args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn identical_inputs_give_identical_bytes() {
    for args in [
        vec!["equivariance", "--samples", "60", "--seed", "7"],
        vec!["zeros", "--function", "E2", "--box", "-0.5,0.5,0.1,1.0"],
        vec!["check-identities", "--n", "20"],
    ] {
        let a = mforms(&args);
        let b = mforms(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn csv_and_config_file() {
    let dir = std::env::temp_dir().join(format!("mforms-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.conf");
    std::fs::write(&path, "output_format = csv\nseed = 0x5EED\n").unwrap();
    let out = mforms(&[
        "--config",
        path.to_str().unwrap(),
        "coeffs",
        "--series",
        "E4",
        "--n",
        "3",
    ]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "n,q_exponent,a_n\n0,0,1\n1,1,240\n2,2,2160\n3,3,6720\n"
    );
    std::fs::write(&path, "tolerance = -1\n").unwrap();
    let out = mforms(&["--config", path.to_str().unwrap(), "reduce", "--z", "i"]);
    assert_eq!(out.status.code(), Some(3));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn perturbation_zeros_through_the_cli() {
    let v = json(&mforms(&[
        "zeros",
        "--function",
        "perturb:exp",
        "--box",
        "-0.5,0.5,0.3,1.2",
        "--max",
        "4",
    ]));
    let zeros = v["zeros"].as_array().unwrap();
    assert_eq!(zeros.len(), 4);
    assert!(zeros.iter().all(|z| z["certified"] == true));
}
