use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_malleq"))
}

fn run(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out: Output = bin().current_dir(dir).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

const INTRO_LEFT: &str =
    "(impR (ex 1 2 (dplus x (impL (ax a) (ax d)) (impL (plusL (a +[y] a) (ax a)) (ax d)))))";
const INTRO_RIGHT: &str = "(dplus x (impR (ex 1 2 (impL (ax a) (ax d)))) \
     (impR (ex 1 2 (impL (plusL (a +[y] a) (ax a)) (ax d)))))";

#[test]
fn intro_pair_is_equivalent() {
    let d = TempDir::new().unwrap();
    write(&d, "p1.proof", INTRO_LEFT);
    write(&d, "p2.proof", INTRO_RIGHT);
    let (code, out, _) = run(d.path(), &["equiv", "p1.proof", "p2.proof"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("equivalent"));
    let (code, out, _) = run(d.path(), &["equiv", "--oracle", "p1.proof", "p2.proof"]);
    assert_eq!((code, out.lines().next()), (0, Some("equivalent")));
}

#[test]
fn or_not_trees_are_equivalent() {
    let d = TempDir::new().unwrap();
    write(&d, "t1.bdt", "(x ? (y ? 1 : 0) : 1)\n");
    write(&d, "t2.bdt", "(y ? 1 : (x ? 0 : 1))\n");
    let (code, out, _) = run(d.path(), &["bdt", "equiv", "t1.bdt", "t2.bdt"]);
    assert_eq!((code, out.trim()), (0, "equivalent"));
    write(&d, "t3.bdt", "(x ? 1 : 0)");
    let (code, out, _) = run(d.path(), &["bdt", "equiv", "--witness", "t1.bdt", "t3.bdt"]);
    assert_eq!(code, 1);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "inequivalent");
    assert!(lines[1].starts_with("witness: "));
}

#[test]
fn check_reports_node_path() {
    let d = TempDir::new().unwrap();
    write(&d, "bad.proof", "(impL (ax a) (plusL (a +[x] b) (ax b)))");
    let (code, out, err) = run(d.path(), &["check", "bad.proof"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("bad.proof") && err.contains("/1"), "{err}");
    write(&d, "good.proof", "(ax a)");
    let (code, out, _) = run(d.path(), &["check", "good.proof"]);
    assert_eq!(code, 0);
    assert_eq!(out, "ok\na |- a\n");
}

#[test]
fn syntax_errors_name_file_and_position() {
    let d = TempDir::new().unwrap();
    write(&d, "bad.proof", "(impL (ax a)\n  (ax b)");
    let (code, _, err) = run(d.path(), &["check", "bad.proof"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error: bad.proof: 2:"), "{err}");
    let (code, _, err) = run(d.path(), &["check", "missing.proof"]);
    assert_eq!(code, 2);
    assert!(err.contains("missing.proof"));
    let (code, _, _) = run(d.path(), &["frobnicate"]);
    assert_eq!(code, 2);
}

#[test]
fn inequivalent_exchanges_with_witness() {
    let d = TempDir::new().unwrap();
    let pi0 = "(impL (impL (impL (ax a) (ax a)) (ax a)) (ax a))";
    write(&d, "p.proof", &format!("(ex 3 4 (ex 2 3 {pi0}))"));
    write(&d, "q.proof", &format!("(ex 2 3 (ex 3 4 {pi0}))"));
    let (code, out, _) = run(d.path(), &["equiv", "--witness", "p.proof", "q.proof"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("inequivalent\nwitness: pair ("), "{out}");
    let (code, out, _) = run(
        d.path(),
        &["equiv", "--oracle", "--witness", "p.proof", "q.proof"],
    );
    assert_eq!(code, 1);
    assert_eq!(out.lines().count(), 2);
}

#[test]
fn oracle_budget_from_environment() {
    let d = TempDir::new().unwrap();
    write(&d, "t.bdt", "(x ? (y ? 1 : 0) : 1)");
    let run_with = |v: &str| {
        let out = bin()
            .current_dir(d.path())
            .env("MALLEQ_ORACLE_BUDGET", v)
            .args(["bdt", "equiv", "--oracle", "t.bdt", "t.bdt"])
            .output()
            .unwrap();
        (
            out.status.code().unwrap(),
            String::from_utf8(out.stderr).unwrap(),
        )
    };
    assert_eq!(run_with("2").0, 0);
    let (code, err) = run_with("1");
    assert_eq!(code, 2);
    assert!(err.contains("budget"), "{err}");
    assert_eq!(run_with("many").0, 2);
}

#[test]
fn slicing_commands() {
    let d = TempDir::new().unwrap();
    write(
        &d,
        "p.proof",
        "(dplus x (plusL (a +[y] b) (ax a)) (plusR (a +[y] b) (ax b)))",
    );
    let (code, out, _) = run(d.path(), &["slice", "p.proof"]);
    assert_eq!(code, 0);
    assert!(out.contains("(0,2): (x ? 1 : 0)") && out.contains("(1,3): (x ? 0 : 1)"));
    let (_, out, _) = run(d.path(), &["slice", "--explicit", "p.proof"]);
    assert!(out.contains("{(0,2)}") && out.contains("{(1,3)}"));
    let (code, out, _) = run(d.path(), &["bdt-slice", "p.proof", "--pair", "2,0"]);
    assert_eq!((code, out.trim()), (0, "(x ? 1 : 0)"));
    let (code, _, _) = run(d.path(), &["bdt-slice", "p.proof", "--pair", "0,9"]);
    assert_eq!(code, 2);
}

#[test]
fn eval_and_encode() {
    let d = TempDir::new().unwrap();
    write(&d, "t.bdt", "(x ? (y ? 1 : 0) : 1)");
    let (code, out, _) = run(d.path(), &["bdt", "eval", "t.bdt", "--set", "x=1,y=1"]);
    assert_eq!((code, out.trim()), (0, "true"));
    let (code, _, _) = run(d.path(), &["bdt", "eval", "t.bdt", "--set", "x=0,y=1"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(d.path(), &["bdt", "eval", "t.bdt", "--set", "y=1"]);
    assert_eq!(code, 2);
    let (code, out, _) = run(
        d.path(),
        &["encode", "t.bdt", "--vars", "2", "--check-representation"],
    );
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("ok"));
    let (code, out, _) = run(d.path(), &["encode", "t.bdt", "--vars", "2"]);
    assert_eq!(code, 0);
    fs::write(d.path().join("enc.proof"), &out).unwrap();
    let (code, out, _) = run(d.path(), &["check", "enc.proof"]);
    assert_eq!(code, 0, "{out}");
    let (code, _, _) = run(d.path(), &["encode", "t.bdt", "--vars", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn reductions() {
    let d = TempDir::new().unwrap();
    write(&d, "line.txt", "b -> f\nf -> s\ns -> e\n");
    for cmd in ["ord-proof", "ord-bdt"] {
        let (code, out, _) = run(
            d.path(),
            &["reduce", cmd, "line.txt", "--f", "f", "--s", "s"],
        );
        assert_eq!((code, out.lines().next()), (0, Some("equivalent")), "{cmd}");
        let (code, out, _) = run(
            d.path(),
            &["reduce", cmd, "line.txt", "--f", "s", "--s", "f"],
        );
        assert_eq!(
            (code, out.lines().next()),
            (1, Some("inequivalent")),
            "{cmd}"
        );
        let (code, _, _) = run(
            d.path(),
            &["reduce", cmd, "line.txt", "--f", "b", "--s", "f"],
        );
        assert_eq!(code, 2, "{cmd}");
    }
}

#[test]
fn generators_are_deterministic_and_usable() {
    let d = TempDir::new().unwrap();
    let a = run(
        d.path(),
        &["gen", "bdt", "--seed", "42", "--vars", "5", "--depth", "4"],
    );
    let b = run(
        d.path(),
        &["gen", "bdt", "--seed", "42", "--vars", "5", "--depth", "4"],
    );
    assert_eq!(a, b);
    assert_eq!(a.0, 0);
    let (code, out, _) = run(
        d.path(),
        &[
            "gen",
            "proof-pair",
            "--seed",
            "7",
            "--vars",
            "3",
            "--out",
            "pair",
        ],
    );
    assert_eq!(code, 0);
    let expected = out
        .lines()
        .next()
        .unwrap()
        .trim_start_matches("# expected: ")
        .to_string();
    let (code, out, _) = run(d.path(), &["equiv", "pair/left.proof", "pair/right.proof"]);
    assert_eq!(out.trim(), expected);
    assert_eq!(code, if expected == "equivalent" { 0 } else { 1 });
    let (code, out, _) = run(d.path(), &["gen", "line", "--seed", "1", "--vars", "6"]);
    assert_eq!(code, 0);
    let header: Vec<&str> = out.lines().next().unwrap().split_whitespace().collect();
    write(&d, "line.txt", &out);
    let (code, _, _) = run(
        d.path(),
        &[
            "reduce", "ord-bdt", "line.txt", "--f", header[2], "--s", header[4],
        ],
    );
    assert!(code == 0 || code == 1);
    let (code, _, _) = run(d.path(), &["gen", "line", "--vars", "3"]);
    assert_eq!(code, 2);
}

#[test]
fn mall_commands() {
    let d = TempDir::new().unwrap();
    let l = "(ex 1 2 (plusL (c +[y] c) (ax c)))";
    let r = "(ex 1 2 (plusR (c +[y] c) (ax c)))";
    write(&d, "p.mall", &format!("(with x {l} {r})"));
    write(&d, "q.mall", &format!("(with x {r} {l})"));
    let (code, out, _) = run(d.path(), &["mall", "check", "p.mall"]);
    assert_eq!(code, 0);
    assert_eq!(out, "ok\n|- (c +[y] c), (~c &[x] ~c)\n");
    let (code, out, _) = run(d.path(), &["mall", "equiv", "p.mall", "q.mall"]);
    assert_eq!((code, out.trim()), (1, "inequivalent"));
    let (code, out, _) = run(d.path(), &["mall", "equiv", "--oracle", "p.mall", "p.mall"]);
    assert_eq!((code, out.trim()), (0, "equivalent"));
    write(&d, "bad.mall", "(with x (ax a) (ax b))");
    let (code, _, err) = run(d.path(), &["mall", "check", "bad.mall"]);
    assert_eq!(code, 2);
    assert!(err.contains("bad.mall"));
}
