use std::path::PathBuf;
use std::process::{Command, Output};

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn nilnorm(args: &[&str]) -> Output {
    nilnorm_env(args, &[])
}

fn nilnorm_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nilnorm"));
    cmd.args(args)
        .current_dir(golden_dir())
        .env_remove("NILNORM_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = nilnorm(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn assert_golden(file: &str, args: &[&str]) {
    let expected = std::fs::read_to_string(golden_dir().join(file)).expect("golden file present");
    assert_eq!(
        stdout(args),
        expected,
        "output of {args:?} differs from {file}"
    );
}

#[test]
fn single_values() {
    assert_eq!(
        stdout(&["lambda", "--l1", "0", "--mu1", "1", "--l2", "4", "--mu2", "2", "--rho", "0"]),
        "1/15\n"
    );
    assert_eq!(
        stdout(&["cgc", "--m", "4", "--n", "4", "--p", "0", "--i", "2", "--j", "1", "--k", "3"]),
        "1\n"
    );
    assert_eq!(
        stdout(&[
            "--format", "json", "lambda", "--l1", "0", "--mu1", "1", "--l2", "4", "--mu2", "2",
            "--rho", "1"
        ]),
        "{\n  \"lambda\": \"48/5\"\n}\n"
    );
}

#[test]
fn bracket_leads_with_the_highest_term() {
    let text = stdout(&["bracket", "--dim", "3", "A[2,3,0]", "A[14,13,0]"]);
    assert_eq!(text.lines().next(), Some("325/16182 * A[16,16,0]"));
    assert_golden(
        "bracket_3d.txt",
        &["bracket", "--dim", "3", "A[2,3,0]", "A[14,13,0]"],
    );
    assert_golden(
        "bracket_3d.json",
        &[
            "--format", "json", "bracket", "--dim", "3", "A[0,1,0]", "A[4,2,0]",
        ],
    );
}

#[test]
fn antisymmetric_bracket_output() {
    let ab = stdout(&["bracket", "--dim", "3", "A[1,2,0]", "A[0,3,1]"]);
    let ba = stdout(&["bracket", "--dim", "3", "A[0,3,1]", "A[1,2,0]"]);
    let negated: String = ba
        .lines()
        .map(|l| match l.strip_prefix('-') {
            Some(rest) => format!("{rest}\n"),
            None => format!("-{l}\n"),
        })
        .collect();
    assert_eq!(ab, negated);
    assert_eq!(
        stdout(&["bracket", "--dim", "2", "A[1,1]", "A[1,1]"]),
        "0\n"
    );
}

#[test]
fn structure_outputs() {
    assert_golden(
        "product_3d.txt",
        &["product", "--dim", "3", "A[1,1,0]", "A[2,2,0]"],
    );
    assert_golden(
        "transvectant.txt",
        &["transvectant", "--m", "3", "--n", "2", "--p", "1"],
    );
    assert_golden("table_2d.txt", &["table", "--dim", "2", "--bound", "4"]);
    assert_golden(
        "table_3d.json",
        &["--format", "json", "table", "--dim", "3", "--bound", "3"],
    );
}

#[test]
fn normal_form_outputs() {
    assert_golden(
        "normalform_2d.txt",
        &[
            "normalform",
            "--input",
            "nf_input_2d.json",
            "--max-grade",
            "5",
        ],
    );
    assert_golden(
        "normalform_3d.json",
        &[
            "--format",
            "json",
            "normalform",
            "--input",
            "nf_problem_3d.json",
        ],
    );
}

#[test]
fn verify_passes() {
    assert_golden(
        "verify.txt",
        &["verify", "--max-weight", "4", "--max-degree", "3"],
    );
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["--format", "json", "table", "--dim", "3", "--bound", "4"];
    let one = nilnorm_env(&args, &[("NILNORM_THREADS", "1")]);
    let four = nilnorm_env(&args, &[("NILNORM_THREADS", "4")]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(nilnorm(&args).stdout, one.stdout);
}

#[test]
fn bad_input_exits_with_one() {
    let cases: &[&[&str]] = &[
        &["bogus"],
        &["bracket", "--dim", "3", "A[2,3]", "A[0,1,0]"],
        &["bracket", "--dim", "3", "A[7,3,0]", "A[0,1,0]"],
        &["bracket", "--dim", "4", "A[0,1]", "A[0,1]"],
        &[
            "cgc", "--m", "1", "--n", "1", "--p", "2", "--i", "0", "--j", "0", "--k", "0",
        ],
        &[
            "lambda", "--l1", "3", "--mu1", "1", "--l2", "0", "--mu2", "1", "--rho", "0",
        ],
        &["normalform", "--input", "missing.json", "--max-grade", "3"],
        &["normalform", "--input", "nf_input_2d.json"],
        &["table", "--dim", "3", "--bound", "3", "--unknown"],
    ];
    for args in cases {
        let out = nilnorm(args);
        assert_eq!(
            out.status.code(),
            Some(1),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
}
