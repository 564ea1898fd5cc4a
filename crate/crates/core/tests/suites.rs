use regret_cap::suites::{run, SuiteOptions, SUITES};

fn opts(grid: Option<usize>, count: Option<usize>) -> SuiteOptions {
    SuiteOptions { grid, count, ..SuiteOptions::default() }
}

/// Every suite at reduced settings; the CLI defaults are heavier.
#[test]
fn every_suite_passes() {
    for name in SUITES {
        let o = match name {
            "maximin" => opts(Some(501), None),
            "necessary-conditions" => opts(Some(401), None),
            "necessary-conditions-converse" | "lower-bound" => opts(Some(101), None),
            "optimality" => opts(Some(61), Some(100)),
            "overproduction" | "hardcap" | "subsidy-monotone" => opts(Some(11), None),
            "firm-oracle" => opts(Some(1001), Some(40)),
            _ => opts(None, None),
        };
        let r = run(name, &o).unwrap();
        assert!(r.passed, "{name}: {:?}", r.failures);
        assert!(r.checked > 0, "{name} checked nothing");
    }
}

#[test]
fn reports_are_reproducible() {
    let o = SuiteOptions { count: Some(50), ..SuiteOptions::default() };
    let a = run("profit-floor", &o).unwrap();
    let b = run("profit-floor", &o).unwrap();
    assert_eq!(a, b);
    let other = run("profit-floor", &SuiteOptions { seed: 99, ..o }).unwrap();
    assert_ne!(a.worst_margin, other.worst_margin);
}
