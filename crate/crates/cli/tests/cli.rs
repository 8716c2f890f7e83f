use std::fs;
use std::process::{Command, Output};

fn isofem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isofem"))
        .args(args)
        .output()
        .expect("run isofem")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn study_csv_layout() {
    let out = isofem(&["--levels", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "level,h,N,errL2,errH1,eocL2,eocH1");
    assert_eq!(rows.len(), 4);
    let first: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(first[0], "0");
    assert_eq!(&first[5..], ["", ""]);
    for row in &rows[2..] {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 7);
        for f in [fields[1], fields[3], fields[4], fields[5], fields[6]] {
            let mantissa = f.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(
                mantissa.chars().filter(char::is_ascii_digit).count(),
                17,
                "{f}"
            );
            f.parse::<f64>().unwrap();
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = isofem(&[
            "--degree",
            "2",
            "--levels",
            "3",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("study.cfg");
    fs::write(
        &config,
        "# coarse run\ndomain = disk\ndegree = 2\nlevels = 2\n",
    )
    .unwrap();
    let cfg = config.to_str().unwrap();
    assert_eq!(stdout(&isofem(&["--config", cfg])).lines().count(), 3);
    assert_eq!(
        stdout(&isofem(&["--config", cfg, "--levels", "3"]))
            .lines()
            .count(),
        4
    );
}

#[test]
fn diagnostics_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("geometry.csv");
    let out = isofem(&[
        "--levels",
        "2",
        "--degree",
        "2",
        "--diagnostics",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("level,h,volume,surface,maxBoundaryDist,minJacobian,maxCT")
    );
    for row in lines {
        let min_jacobian: f64 = row.split(',').nth(5).unwrap().parse().unwrap();
        assert!(min_jacobian > 0.0);
    }
}

#[test]
fn matrix_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.mtx");
    let out = isofem(&["--levels", "2", "--export-matrix", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("%%MatrixMarket matrix coordinate real general"));
}

#[test]
fn configuration_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = dir.path().join("bad.cfg");
    fs::write(&bad_key, "colour = blue\n").unwrap();
    let missing = dir.path().join("missing.cfg");
    let cases: Vec<Vec<&str>> = vec![
        vec!["--bogus"],
        vec!["--degree", "two"],
        vec!["--levels", "1"],
        vec!["--domain", "torus"],
        vec!["--variant", "grp", "--beta", "0"],
        vec!["--tol", "0.5"],
        vec!["--config", bad_key.to_str().unwrap()],
        vec!["--config", missing.to_str().unwrap()],
    ];
    for args in cases {
        let out = isofem(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn numerical_failure_exits_with_two() {
    let out = isofem(&["--kappa", "1e308", "--levels", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_succeeds() {
    let out = isofem(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("--diagnostics"));
}
