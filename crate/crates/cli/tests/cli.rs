use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    root.join(name).to_string_lossy().into_owned()
}

fn bfv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bfv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

const CORPUS: [&str; 5] = [
    "torus.toml",
    "linear.toml",
    "quadratic-curved.toml",
    "rank1-curved.toml",
    "jet-curved.toml",
];

#[test]
fn check_verdicts() {
    for name in CORPUS {
        let out = bfv(&["check", "--setup", &corpus(name)]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert_eq!(stdout(&out), "poisson = pass\ncoisotropic = pass\n");
    }
    let out = bfv(&["check", "--setup", &corpus("invalid/not-coisotropic.toml")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(
        stdout(&out),
        "poisson = pass\ncoisotropic = fail not coisotropic\n{y1,y2}|S = 1\n"
    );
    let out = bfv(&["check", "--setup", &corpus("invalid/not-poisson.toml")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("poisson = fail\n[Pi,Pi] = "));
}

#[test]
fn parse_errors_carry_positions() {
    let out = bfv(&["check", "--setup", &corpus("invalid/malformed.toml")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("line 5, column 11"),
        "{}",
        stderr(&out)
    );
    let out = bfv(&["check", "--setup", &corpus("missing.toml")]);
    assert_eq!(out.status.code(), Some(2));
    let out = bfv(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn charges() {
    let out = bfv(&["charge", "--setup", &corpus("torus.toml")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "Omega_0 = y1*c1 + y2*c2\n[Omega,Omega] = 0\n");
    let out = bfv(&["charge", "--setup", &corpus("linear.toml")]);
    assert_eq!(
        stdout(&out),
        "Omega_0 = y1*c1 + y2*c2\nOmega_1 = -c1*c2*b1\n[Omega,Omega] = 0\n"
    );
    let out = bfv(&["charge", "--setup", &corpus("invalid/not-coisotropic.toml")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not coisotropic"));
}

#[test]
fn abelian_structure_has_zero_brackets() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("abelian.toml");
    std::fs::write(&path, "base_dim = 2\nfiber_dim = 1\n").unwrap();
    let out = bfv(&[
        "shla",
        "--setup",
        path.to_str().unwrap(),
        "--max-arity",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    // 3 + 6 + 10 multisets of the generators x1, x2, c1
    assert_eq!(text.lines().count(), 19);
    assert!(text.lines().all(|l| l.ends_with(" = 0")), "{text}");
}

#[test]
fn shla_and_transfer_tables_agree() {
    for name in CORPUS {
        let shla = stdout(&bfv(&["shla", "--setup", &corpus(name)]));
        let transfer = stdout(&bfv(&["transfer", "--setup", &corpus(name)]));
        let nu: Vec<&str> = transfer.lines().filter(|l| l.starts_with("nu")).collect();
        let mu: Vec<String> = shla.lines().map(|l| l.replacen("mu", "nu", 1)).collect();
        assert_eq!(mu, nu, "{name}");
        assert!(transfer.lines().any(|l| l.starts_with("lambda1(x1) = x1")));
    }
}

#[test]
fn torus_sections() {
    let torus = corpus("torus.toml");
    let out = bfv(&[
        "mc",
        "--setup",
        &torus,
        "--section",
        "x3",
        "--section",
        "x3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("verdict = coisotropic\n"));
    assert!(text.contains("beta(1,0) = x3*c1 + x3*c2\n"));
    assert!(text.contains("residual = 0\n"));
    assert!(text.contains("{h_1,h_2} coefficients = [0, 0]\n"));

    let out = bfv(&[
        "mc",
        "--setup",
        &torus,
        "--section",
        "x3",
        "--section",
        "x4",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("obstruction = -2*c1*c2\n"));

    let out = bfv(&["mc", "--setup", &torus, "--section", "0", "--section", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("beta = 0\n"));
}

#[test]
fn section_arguments_are_validated() {
    let torus = corpus("torus.toml");
    let out = bfv(&["mc", "--setup", &torus, "--section", "x3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bfv(&["mc", "--setup", &torus, "--section", "y1", "--section", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bfv(&[
        "mc",
        "--setup",
        &torus,
        "--section",
        "x3 +",
        "--section",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = bfv(&[
        "mc",
        "--setup",
        &torus,
        "--section",
        "-x3",
        "--section",
        "-x3",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn gauge_maps_extensions_onto_each_other() {
    let out = bfv(&[
        "gauge",
        "--setup",
        &corpus("linear.toml"),
        "--section",
        "0",
        "--section",
        "x1 + 2",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("generators = 1\n"), "{text}");
    assert!(text.contains("forward = exact\ninverse = exact\n"));
    let out = bfv(&[
        "gauge",
        "--setup",
        &corpus("linear.toml"),
        "--section",
        "x1",
        "--section",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_passes_on_the_corpus() {
    for name in CORPUS {
        let out = bfv(&["verify", "--setup", &corpus(name), "--trials", "5"]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stdout(&out));
        assert!(stdout(&out).ends_with("verdict = pass\n"));
    }
}

#[test]
fn verify_catches_a_broken_sign() {
    let out = bfv(&[
        "verify",
        "--setup",
        &corpus("linear.toml"),
        "--debug-break-sign",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).ends_with("first failure = schouten skew symmetry\n"));
}

#[test]
fn verify_without_trials_runs_structural_checks() {
    let out = bfv(&["verify", "--setup", &corpus("torus.toml"), "--trials", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("check ")).count(), 5);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "verify",
        "--setup",
        &corpus("quadratic-curved.toml"),
        "--seed",
        "7",
        "--trials",
        "4",
    ];
    let first = bfv(&args);
    let second = bfv(&args);
    assert_eq!(first.stdout, second.stdout);
    let args = [
        "gauge",
        "--setup",
        &corpus("torus.toml"),
        "--section",
        "x3",
        "--section",
        "x2",
        "--seed",
        "5",
    ];
    assert_eq!(bfv(&args).stdout, bfv(&args).stdout);
}

#[test]
fn structured_output() {
    let out = bfv(&["--structured", "charge", "--setup", &corpus("linear.toml")]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["command"], "charge");
    assert_eq!(doc["exit_code"], 0);
    assert_eq!(doc["results"]["Omega_1"], "-c1*c2*b1");
    let out = bfv(&[
        "check",
        "--structured",
        "--setup",
        &corpus("invalid/malformed.toml"),
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["exit_code"], 2);
    assert!(doc["error"].as_str().unwrap().contains("column 11"));
}
