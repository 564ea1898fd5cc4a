use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_regret-cap");

const FLAT_FIXED: &str = "[market]\nv_bar = 1.0\n\n[[market.demand.segment]]\nlo = 0.0\nhi = 1.0\nkind = \"constant\"\nvalue = 1.0\n\n[market.cost]\nfixed = 0.5\n";

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn column(csv: &str, alpha: &str, col: usize) -> f64 {
    csv.lines()
        .find(|l| l.split(',').next() == Some(alpha))
        .and_then(|l| l.split(',').nth(col))
        .unwrap_or_else(|| panic!("no row for alpha {alpha}"))
        .parse()
        .unwrap()
}

#[test]
fn constants_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let o = run(&["constants", "--grid", "401", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let text = String::from_utf8(text).unwrap();
    assert!(text.starts_with("alpha,k_alpha,r_alpha,q_alpha,s_alpha,r_numeric,gap\n"));
    assert_eq!(text.lines().count(), 22);
    assert!(text.contains("\n0,0.5,0.5,1,0,"));
    assert_eq!(column(&text, "0.75", 2), column(&text, "0.75", 4));
    for line in text.lines().skip(1) {
        let gap: f64 = line.split(',').nth(6).unwrap().parse().unwrap();
        assert!(gap < 1e-6, "{line}");
    }
}

#[test]
fn figure1_writes_every_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig");
    let o = run(&["figure1", "--out", out.to_str().unwrap(), "--grid", "201"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let read = |f: &str| std::fs::read_to_string(out.join(f)).unwrap();
    assert!((column(&read("q.csv"), "1", 1) - 0.5390).abs() < 1e-3);
    assert!((column(&read("r.csv"), "0.75", 1) - 0.25085).abs() < 1e-4);
    assert!((column(&read("k.csv"), "0.5", 1) - 2.0 / 3.0).abs() < 1e-11);
    assert_eq!(read("s.csv").lines().count(), 102);
    assert_eq!(read("figure1.csv").lines().count(), 102);
}

#[test]
fn eval_reports_both_tied_responses() {
    let dir = tempfile::tempdir().unwrap();
    let pol = write(dir.path(), "pol.toml", "[policy]\nkind = \"optimal\"\nalpha = 0\n");
    let market = write(dir.path(), "market.toml", FLAT_FIXED);
    let o = run(&["eval", &pol, &market, "--alpha", "0"]);
    assert!(o.status.success());
    let out = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 2, "{out}");
    assert!(rows[0].starts_with("0,") && rows[0].split(',').nth(6) == Some("0.5"), "{out}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("regret 0.5"));
}

#[test]
fn eval_laissez_faire_extracts_everything() {
    let dir = tempfile::tempdir().unwrap();
    let text = FLAT_FIXED.replace("fixed = 0.5", "fixed = 0.0") + "\n[policy]\nkind = \"laissez-faire\"\n";
    let both = write(dir.path(), "both.toml", &text);
    let o = run(&["eval", &both]);
    assert!(o.status.success());
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().nth(1), Some("1,1,1,1,0,0,1,1"));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let pol = write(dir.path(), "pol.toml", "[policy]\nkind = \"laissez-faire\"\n");
    let bad = write(dir.path(), "bad.toml", &FLAT_FIXED.replace("hi = 1.0", "hi = 0.0"));
    let o = run(&["eval", &pol, &bad]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4") && err.contains("market.demand.segment"), "{err}");
    assert_eq!(run(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(run(&["constants", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "/definitely/missing.toml"]).status.code(), Some(2));
}

#[test]
fn wcr_certifies_and_persists_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let pol = write(dir.path(), "pol.toml", "[policy]\nkind = \"optimal\"\nalpha = 0.75\n");
    let out = dir.path().join("wcr");
    let o = run(&["wcr", &pol, "--alpha", "0.75", "--grid", "61", "--random", "50", "--out", out.to_str().unwrap()]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(o.status.success(), "{text}");
    assert!(text.contains("attains-optimum"), "{text}");
    let csv = std::fs::read_to_string(out.join("certification.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with(",attains-optimum"));
    for tag in ["lower", "upper"] {
        let doc = regret_cap::scenario::load(&out.join(format!("witness-{tag}.toml"))).unwrap();
        assert!(doc.scenario().is_some() && doc.policy.is_some());
    }
}

#[test]
fn wcr_exits_cleanly_for_rules_that_claim_no_optimality() {
    let dir = tempfile::tempdir().unwrap();
    // A subsidy below the required minimum is not an optimality claim.
    let pol = write(dir.path(), "pol.toml", "[policy]\nkind = \"cap-subsidy\"\nk = 0.8\ns = 0.1\n");
    let o = run(&["wcr", &pol, "--alpha", "0.75", "--grid", "41", "--random", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("suboptimal"));
}

#[test]
fn verify_passes_and_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("suites.csv");
    let o = run(&["verify", "full-information", "surplus-bound", "--out", out.to_str().unwrap()]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(o.status.success(), "{text}");
    assert!(text.contains("full-information") && text.contains("PASS"));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.contains("surplus-bound,true,1000,0,"), "{csv}");
}
