//! CSV and plain-text rendering of results.

use std::io::Write;

use crate::adversary::CertificationReport;
use crate::analysis::ConstantsRow;
use crate::error::{Error, Result};
use crate::firm::Outcome;
use crate::suites::SuiteReport;

/// Formats `x` with 12 significant digits, fixed notation for moderate magnitudes,
/// trailing zeros removed.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

pub fn constants_csv<W: Write>(out: W, rows: &[ConstantsRow]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["alpha", "k_alpha", "r_alpha", "q_alpha", "s_alpha", "r_numeric", "gap"])
        .map_err(csv_err)?;
    for r in rows {
        let c = &r.consts;
        w.write_record([
            sig12(c.alpha),
            sig12(c.k_alpha),
            sig12(c.r_alpha),
            sig12(c.q_alpha),
            sig12(c.s_alpha),
            sig12(r.r_numeric),
            sig12(r.gap),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// One `(alpha, value)` series.
pub fn series_csv<W: Write>(out: W, name: &str, points: &[(f64, f64)]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["alpha", name]).map_err(csv_err)?;
    for &(a, v) in points {
        w.write_record([sig12(a), sig12(v)]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn outcomes_csv<W: Write>(out: W, outcomes: &[Outcome]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["q", "p", "revenue", "fp", "cs", "dstr", "rgrt", "opt"])
        .map_err(csv_err)?;
    for o in outcomes {
        w.write_record([o.q, o.p, o.revenue, o.fp, o.cs, o.dstr, o.rgrt, o.opt].map(sig12))
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn certification_csv<W: Write>(out: W, reports: &[CertificationReport]) -> Result<()> {
    let mut w = writer(out);
    w.write_record([
        "policy",
        "alpha",
        "r_alpha",
        "lower_bound",
        "lower_witness",
        "upper_sweep",
        "upper_witness",
        "scenarios",
        "random_scenarios",
        "verdict",
    ])
    .map_err(csv_err)?;
    for r in reports {
        w.write_record([
            r.policy_id.clone(),
            sig12(r.alpha),
            sig12(r.r_alpha),
            sig12(r.lower_bound.regret),
            r.lower_bound.scenario.label.to_string(),
            sig12(r.upper_sweep.regret),
            r.upper_sweep.scenario.label.to_string(),
            r.scenarios.to_string(),
            r.random_scenarios.to_string(),
            r.verdict.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn suites_csv<W: Write>(out: W, reports: &[SuiteReport]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["suite", "passed", "checked", "failures", "worst_margin"])
        .map_err(csv_err)?;
    for r in reports {
        w.write_record([
            r.name.clone(),
            r.passed.to_string(),
            r.checked.to_string(),
            r.failures.len().to_string(),
            sig12(r.worst_margin),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Human-readable summary of a certification.
pub fn certification_text(r: &CertificationReport) -> String {
    let p = &r.lower_bound.scenario.params;
    let u = &r.upper_sweep.scenario.params;
    format!(
        "policy       {}\nalpha        {}\nr_alpha      {}\nlower bound  {}  witness {} (q={}, p={}, q_low={}, fixed={})\n\
         upper sweep  {}  witness {} (q={}, p={}, q_low={}, fixed={})\nscenarios    {} ({} random)\nverdict      {}\n",
        r.policy_id,
        sig12(r.alpha),
        sig12(r.r_alpha),
        sig12(r.lower_bound.regret),
        r.lower_bound.scenario.label,
        sig12(p.q),
        sig12(p.p),
        sig12(p.q_low),
        sig12(p.fixed),
        sig12(r.upper_sweep.regret),
        r.upper_sweep.scenario.label,
        sig12(u.q),
        sig12(u.p),
        sig12(u.q_low),
        sig12(u.fixed),
        r.scenarios,
        r.random_scenarios,
        r.verdict,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.5), "0.5");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(2.0 / 3.0), "0.666666666667");
        assert_eq!(sig12(0.205880866), "0.205880866");
        assert_eq!(sig12(-1.5e-9), "-1.5e-9");
        assert_eq!(sig12(123456.0), "123456");
        assert_eq!(sig12(9.9999999999996), "10");
        assert_eq!(sig12(0.0), "0");
    }
}
