use std::process::{Command, Output};

fn retroatom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_retroatom")).args(args).env_remove("RETROATOM_TOL_OVERRIDE").output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_value(text: &str, key: &str, column: usize) -> f64 {
    let line = text.lines().find(|l| l.split(',').next() == Some(key)).unwrap();
    line.split(',').nth(column).unwrap().parse().unwrap()
}

#[test]
fn retrodict_tau_zero_returns_pom() {
    let out = retroatom(&["retrodict", "--channel", "spontaneous", "--gamma", "1", "--tau", "0", "--pom", "ground"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("quantity,re,im"));
    assert_eq!(csv_value(&text, "rho_gg", 1), 1.0);
    assert_eq!(csv_value(&text, "rho_ee", 1), 0.0);
    assert_eq!(csv_value(&text, "normalization", 1), 1.0);
}

#[test]
fn retrodict_half_decay_and_driven_limit() {
    let tau = format!("{}", std::f64::consts::LN_2 / 2.0);
    let text = stdout(&retroatom(&["retrodict", "--tau", &tau, "--pom", "ground"]));
    assert!((csv_value(&text, "rho_ee", 1) - 1.0 / 3.0).abs() < 1e-11);
    assert!((csv_value(&text, "rho_gg", 1) - 2.0 / 3.0).abs() < 1e-11);

    let out = retroatom(&[
        "retrodict",
        "--channel",
        "driven",
        "--gamma",
        "1",
        "--v",
        "4",
        "--tau",
        "30",
        "--pom",
        "excited",
        "--format",
        "json",
    ]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((json["rho_retr"]["ee"][0].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert!((json["rho_retr"]["gg"][0].as_f64().unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn posterior_examples() {
    let tau = format!("{}", std::f64::consts::LN_2 / 2.0);
    let text = stdout(&retroatom(&["posterior", "--tau", &tau, "--pom", "ground", "--ensemble", "unbiased-eg"]));
    assert_eq!(text.lines().next(), Some("label,retrodictive,forward_bayes,abs_deviation"));
    assert!((csv_value(&text, "e", 1) - 1.0 / 3.0).abs() < 1e-11);
    assert!((csv_value(&text, "g", 2) - 2.0 / 3.0).abs() < 1e-11);
    assert!(csv_value(&text, "g", 3) < 1e-10);

    // hand-evaluated: p sin^2(t/2) against (1-p)(sin(t/2)+cos(t/2))^2/2 at t = pi/3
    let pom = "theta:1.0472";
    let theta: f64 = pom["theta:".len()..].parse().unwrap();
    let (s, c) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    let (we, wp) = (0.5 * s * s, 0.5 * 0.5 * (s + c) * (s + c));
    let out =
        retroatom(&["posterior", "--tau", "0", "--pom", pom, "--ensemble", "biased-e-plus:0.5", "--format", "json"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let entries = json["entries"].as_array().unwrap();
    assert_eq!(entries[0]["label"], "e");
    assert!((entries[0]["retrodictive"].as_f64().unwrap() - we / (we + wp)).abs() < 1e-11);
    assert!((entries[1]["forward_bayes"].as_f64().unwrap() - wp / (we + wp)).abs() < 1e-11);
    assert!(json["max_deviation"].as_f64().unwrap() < 1e-10);

    for tau in ["0", "0.5", "7"] {
        let text = stdout(&retroatom(&["posterior", "--tau", tau, "--pom", "excited", "--ensemble", "unbiased-eg"]));
        assert_eq!(csv_value(&text, "e", 1), 1.0);
        assert_eq!(csv_value(&text, "g", 1), 0.0);
    }
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| retroatom(args).status.code();
    assert_eq!(code(&["retrodict", "--pom", "nonsense"]), Some(2));
    assert_eq!(code(&["retrodict", "--pom", "excited", "--gamma", "-1"]), Some(2));
    assert_eq!(code(&["retrodict", "--pom", "excited", "--channel", "laser"]), Some(2));
    assert_eq!(code(&["retrodict"]), Some(2));
    assert_eq!(code(&["figure", "5a"]), Some(2));
    assert_eq!(code(&["figure", "1a", "--points", "0"]), Some(2));
    assert_eq!(code(&["check", "--json-config", "cfg.json"]), Some(2));
    assert_eq!(code(&["posterior", "--pom", "excited", "--ensemble", "biased-e-plus:1.5"]), Some(2));
    // the excited state has fully decayed, so detecting it is impossible
    assert_eq!(code(&["retrodict", "--tau", "1000", "--pom", "excited"]), Some(3));
    let ground_only = r#"[{"label":"g","op":{"ee":[0,0],"eg":[0,0],"ge":[0,0],"gg":[1,0]}}]"#;
    assert_eq!(code(&["posterior", "--tau", "0", "--pom", "excited", "--ensemble", ground_only]), Some(3));
}

#[test]
fn figure_output_is_deterministic_and_well_formed() {
    let args = ["figure", "2b", "--v", "4", "--gamma", "1"];
    let a = retroatom(&args);
    let b = retroatom(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("tau,rho_ee,rho_gg"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|r| r.split(',').count() == 3 && r.split(',').all(|f| f.parse::<f64>().is_ok())));

    let text = stdout(&retroatom(&["figure", "4b", "--points", "17"]));
    assert_eq!(text.lines().next(), Some("tau,re_rho_eg,im_rho_eg,re_rho_ge,im_rho_ge"));
    assert_eq!(text.lines().count(), 18);
    let im: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(im.iter().any(|x| x.abs() > 1e-3));
}

#[test]
fn figure_1b_reaches_one_half() {
    let text = stdout(&retroatom(&["figure", "1b", "--nbar", "1", "--gamma", "1", "--tau-max", "30", "--points", "5"]));
    let last = text.lines().last().unwrap();
    let fields: Vec<f64> = last.split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(fields[0], 30.0);
    assert!((fields[1] - 0.5).abs() < 1e-9);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.json");
    let out = retroatom(&["figure", "3c", "--points", "4", "--format", "json", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["figure"], "3c");
    assert_eq!(json["tau"].as_array().unwrap().len(), 4);
    assert_eq!(json["series"][0]["name"], "im_rho_eg");
}

#[test]
fn check_reports_and_negative_control() {
    let out = retroatom(&["check", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);

    let out = retroatom(&["check", "--inject-fault", "thermal-coherence"]);
    assert_eq!(out.status.code(), Some(1));
    let table = stdout(&out);
    assert!(table.lines().any(|l| l.starts_with("FAIL") && l.contains("thermal")));
    assert!(String::from_utf8_lossy(&out.stderr).contains("thermal"));
}

#[test]
fn tolerance_override_tightens_checks() {
    let out = Command::new(env!("CARGO_BIN_EXE_retroatom"))
        .args(["check"])
        .env("RETROATOM_TOL_OVERRIDE", "1e-30")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_retroatom"))
        .args(["check"])
        .env("RETROATOM_TOL_OVERRIDE", "banana")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
