//! Text format for markets, policies and witness scenarios.
//!
//! Files are TOML documents with up to three parts:
//!
//! ```toml
//! [scenario]
//! label = "flat-fixed"
//! fixed = 0.5
//!
//! [market]
//! v_bar = 1.0
//!
//! [[market.demand.segment]]
//! lo = 0.0
//! hi = 1.0
//! kind = "constant"
//! value = 1.0
//!
//! [market.cost]
//! fixed = 0.5
//!
//! [policy]
//! kind = "cap-subsidy"
//! k = 0.5
//! s = 0.0
//! ```
//!
//! Segment kinds are `constant` (`value`), `hyperbolic` (`a`, value `a / z`) and
//! `linear` (`intercept`, `slope`, value `intercept + slope * z`). Cost segments
//! default to zero over `[0, 1]`. Policy kinds are `laissez-faire`, `price-cap` (`k`),
//! `lump-sum` (`q_tilde`, `s`), `cap-subsidy` (`k`, `s`), `optimal` (`alpha`, optional
//! `s` and `v_bar`), `hard-cap` (`k` plus a `[policy.inner]` table), `spike` (`q`, `p`,
//! `revenue` plus `[policy.inner]`) and `table` (a `[policy.table]` holding either `file`,
//! a `q,p,revenue` CSV, or inline `rows`). Numbers are written in shortest round-trip form, so parsing a
//! rendered document gives back the same bits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use toml::{Table, Value};

use crate::adversary::{Label, Params, Scenario};
use crate::analysis::AlphaConstants;
use crate::error::{Error, Result};
use crate::market::{Market, PiecewiseFn, Role, Segment, SegmentKind};
use crate::policy::{optimal_policy, Policy, TablePolicy};

/// Everything a file may contain.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub market: Option<Market>,
    pub policy: Option<Policy>,
    pub label: Option<Label>,
    pub params: Option<Params>,
}

impl Document {
    /// The scenario described by the file, if it has both a market and a label.
    pub fn scenario(&self) -> Option<Scenario> {
        Some(Scenario {
            market: self.market.clone()?,
            label: self.label?,
            params: self.params.unwrap_or_default(),
        })
    }

    pub fn require_market(&self, source: &str) -> Result<&Market> {
        self.market.as_ref().ok_or_else(|| Error::Input {
            context: source.to_string(),
            message: "no [market] section".into(),
        })
    }

    pub fn require_policy(&self, source: &str) -> Result<&Policy> {
        self.policy.as_ref().ok_or_else(|| Error::Input {
            context: source.to_string(),
            message: "no [policy] section".into(),
        })
    }
}

/// Reads and parses a file; relative table paths resolve against its directory.
pub fn load(path: &Path) -> Result<Document> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input {
        context: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse(&text, path.parent())
}

pub fn parse(text: &str, base: Option<&Path>) -> Result<Document> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
        message: e.message().to_string(),
    })?;
    let p = Parser { text, base };
    p.allowed(&root, "", &["market", "policy", "scenario"])?;
    let market = match root.get("market") {
        Some(v) => Some(p.market(p.table(v, "market")?)?),
        None => None,
    };
    let policy = match root.get("policy") {
        Some(v) => {
            let v_bar = market.as_ref().map(|m| m.v_bar()).unwrap_or(1.0);
            Some(p.policy(p.table(v, "policy")?, "policy", v_bar)?)
        }
        None => None,
    };
    let (label, params) = match root.get("scenario") {
        Some(v) => {
            let (l, x) = p.scenario(p.table(v, "scenario")?)?;
            (Some(l), Some(x))
        }
        None => (None, None),
    };
    Ok(Document {
        market,
        policy,
        label,
        params,
    })
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

struct Parser<'a> {
    text: &'a str,
    base: Option<&'a Path>,
}

impl Parser<'_> {
    /// 1-based line of the `nth` (0-based) header `[path]` or `[[path]]`; falls back
    /// to the first line when the table is implicit.
    fn line(&self, path: &str, nth: usize) -> usize {
        let single = format!("[{path}]");
        let array = format!("[[{path}]]");
        self.text
            .lines()
            .enumerate()
            .filter(|(_, l)| {
                let l: String = l.chars().filter(|c| !c.is_whitespace()).collect();
                l.starts_with(&single) || l.starts_with(&array)
            })
            .nth(nth)
            .map(|(i, _)| i + 1)
            .unwrap_or(1)
    }

    fn err(&self, path: &str, nth: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line(path, nth),
            message: format!("[{path}]: {}", message.into()),
        }
    }

    fn table<'v>(&self, v: &'v Value, path: &str) -> Result<&'v Table> {
        v.as_table()
            .ok_or_else(|| self.err(path, 0, "expected a table"))
    }

    fn allowed(&self, t: &Table, path: &str, keys: &[&str]) -> Result<()> {
        for k in t.keys() {
            if !keys.contains(&k.as_str()) {
                let line = if path.is_empty() { 1 } else { self.line(path, 0) };
                return Err(Error::Parse {
                    line,
                    message: format!("unknown key `{k}` in [{}]", if path.is_empty() { "root" } else { path }),
                });
            }
        }
        Ok(())
    }

    fn num_at(&self, t: &Table, key: &str, path: &str, nth: usize) -> Result<Option<f64>> {
        match t.get(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(_) => Err(self.err(path, nth, format!("`{key}` must be a number"))),
        }
    }

    fn req_at(&self, t: &Table, key: &str, path: &str, nth: usize) -> Result<f64> {
        self.num_at(t, key, path, nth)?
            .ok_or_else(|| self.err(path, nth, format!("missing `{key}`")))
    }

    fn str_at<'v>(&self, t: &'v Table, key: &str, path: &str, nth: usize) -> Result<&'v str> {
        match t.get(key) {
            Some(Value::String(s)) => Ok(s),
            Some(_) => Err(self.err(path, nth, format!("`{key}` must be a string"))),
            None => Err(self.err(path, nth, format!("missing `{key}`"))),
        }
    }

    fn market(&self, t: &Table) -> Result<Market> {
        self.allowed(t, "market", &["v_bar", "demand", "cost"])?;
        let v_bar = self.num_at(t, "v_bar", "market", 0)?.unwrap_or(1.0);
        let demand = match t.get("demand") {
            Some(v) => self.function(self.table(v, "market.demand")?, Role::Demand, "market.demand")?,
            None => return Err(self.err("market", 0, "missing demand segments")),
        };
        let cost = match t.get("cost") {
            Some(v) => self.function(self.table(v, "market.cost")?, Role::Cost, "market.cost")?,
            None => PiecewiseFn::zero_cost(),
        };
        Market::new(demand, cost, v_bar).map_err(|e| self.err("market", 0, e.to_string()))
    }

    fn function(&self, t: &Table, role: Role, path: &str) -> Result<PiecewiseFn> {
        let allowed: &[&str] = match role {
            Role::Demand => &["segment"],
            Role::Cost => &["segment", "fixed"],
        };
        self.allowed(t, path, allowed)?;
        let seg_path = format!("{path}.segment");
        let fixed = match role {
            Role::Cost => self.num_at(t, "fixed", path, 0)?.unwrap_or(0.0),
            Role::Demand => 0.0,
        };
        let segments = match t.get("segment") {
            None if role == Role::Cost => vec![Segment::new(0.0, 1.0, SegmentKind::Constant(0.0))?],
            None => return Err(self.err(path, 0, "missing segments")),
            Some(Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for (i, item) in items.iter().enumerate() {
                    let st = item
                        .as_table()
                        .ok_or_else(|| self.err(&seg_path, i, "expected a table"))?;
                    out.push(self.segment(st, &seg_path, i)?);
                }
                out
            }
            Some(_) => return Err(self.err(path, 0, "`segment` must be an array of tables")),
        };
        PiecewiseFn::new(role, segments, fixed).map_err(|e| self.err(&seg_path, 0, e.to_string()))
    }

    fn segment(&self, t: &Table, path: &str, nth: usize) -> Result<Segment> {
        let kind_name = self.str_at(t, "kind", path, nth)?;
        let keys: &[&str] = match kind_name {
            "constant" => &["lo", "hi", "kind", "value"],
            "hyperbolic" => &["lo", "hi", "kind", "a"],
            "linear" => &["lo", "hi", "kind", "intercept", "slope"],
            other => return Err(self.err(path, nth, format!("segment #{}: unknown kind `{other}`", nth + 1))),
        };
        for k in t.keys() {
            if !keys.contains(&k.as_str()) {
                return Err(self.err(path, nth, format!("segment #{}: unknown key `{k}`", nth + 1)));
            }
        }
        let lo = self.req_at(t, "lo", path, nth)?;
        let hi = self.req_at(t, "hi", path, nth)?;
        let kind = match kind_name {
            "constant" => SegmentKind::Constant(self.req_at(t, "value", path, nth)?),
            "hyperbolic" => SegmentKind::Hyperbolic(self.req_at(t, "a", path, nth)?),
            _ => SegmentKind::Linear {
                intercept: self.req_at(t, "intercept", path, nth)?,
                slope: self.req_at(t, "slope", path, nth)?,
            },
        };
        Segment::new(lo, hi, kind)
            .map_err(|e| self.err(path, nth, format!("segment #{}: {e}", nth + 1)))
    }

    fn policy(&self, t: &Table, path: &str, v_bar: f64) -> Result<Policy> {
        let kind = self.str_at(t, "kind", path, 0)?;
        let keys: &[&str] = match kind {
            "laissez-faire" => &["kind"],
            "price-cap" => &["kind", "k"],
            "lump-sum" => &["kind", "q_tilde", "s"],
            "cap-subsidy" => &["kind", "k", "s"],
            "optimal" => &["kind", "alpha", "s", "v_bar"],
            "hard-cap" => &["kind", "k", "inner"],
            "spike" => &["kind", "q", "p", "revenue", "inner"],
            "table" => &["kind", "table"],
            other => return Err(self.err(path, 0, format!("unknown policy kind `{other}`"))),
        };
        self.allowed(t, path, keys)?;
        let num = |k: &str| self.req_at(t, k, path, 0);
        let wrap = |r: Result<Policy>| r.map_err(|e| self.err(path, 0, e.to_string()));
        let inner = || -> Result<Policy> {
            let p = format!("{path}.inner");
            match t.get("inner") {
                Some(v) => self.policy(self.table(v, &p)?, &p, v_bar),
                None => Err(self.err(path, 0, "missing [inner] policy")),
            }
        };
        match kind {
            "laissez-faire" => Ok(Policy::LaissezFaire),
            "price-cap" => wrap(Policy::price_cap(num("k")?)),
            "lump-sum" => wrap(Policy::lump_sum(num("q_tilde")?, num("s")?)),
            "cap-subsidy" => wrap(Policy::cap_subsidy(num("k")?, num("s")?)),
            "optimal" => {
                let v_bar = self.num_at(t, "v_bar", path, 0)?.unwrap_or(v_bar);
                let consts = AlphaConstants::new(num("alpha")?, v_bar)
                    .map_err(|e| self.err(path, 0, e.to_string()))?;
                let s = self.num_at(t, "s", path, 0)?.unwrap_or(consts.s_alpha);
                wrap(optimal_policy(&consts, s))
            }
            "hard-cap" => wrap(Policy::hard_cap(inner()?, num("k")?)),
            "spike" => wrap(Policy::spike(inner()?, num("q")?, num("p")?, num("revenue")?)),
            _ => {
                let tp = format!("{path}.table");
                let tt = match t.get("table") {
                    Some(v) => self.table(v, &tp)?,
                    None => return Err(self.err(path, 0, "missing [table]")),
                };
                self.allowed(tt, &tp, &["file", "rows"])?;
                let rows = match (tt.get("file"), tt.get("rows")) {
                    (Some(Value::String(f)), None) => {
                        let path_buf = self.resolve(f);
                        read_table_csv(&path_buf)?
                    }
                    (None, Some(Value::Array(items))) => self.inline_rows(items, &tp)?,
                    _ => return Err(self.err(&tp, 0, "give exactly one of `file` or `rows`")),
                };
                wrap(TablePolicy::from_rows(&rows).map(Policy::Table))
            }
        }
    }

    fn inline_rows(&self, items: &[Value], path: &str) -> Result<Vec<(f64, f64, f64)>> {
        items
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let bad = || self.err(path, 0, format!("row {} must be [q, p, revenue]", i + 1));
                let a = row.as_array().ok_or_else(bad)?;
                let n: Vec<f64> = a
                    .iter()
                    .map(|v| match v {
                        Value::Float(x) => Some(*x),
                        Value::Integer(x) => Some(*x as f64),
                        _ => None,
                    })
                    .collect::<Option<_>>()
                    .ok_or_else(bad)?;
                match n[..] {
                    [q, p, r] => Ok((q, p, r)),
                    _ => Err(bad()),
                }
            })
            .collect()
    }

    fn resolve(&self, f: &str) -> PathBuf {
        let p = Path::new(f);
        match self.base {
            Some(b) if p.is_relative() => b.join(p),
            _ => p.to_path_buf(),
        }
    }

    fn scenario(&self, t: &Table) -> Result<(Label, Params)> {
        self.allowed(t, "scenario", &["label", "q", "p", "q_low", "fixed"])?;
        let name = self.str_at(t, "label", "scenario", 0)?;
        let label = Label::parse(name)
            .ok_or_else(|| self.err("scenario", 0, format!("unknown label `{name}`")))?;
        let get = |k: &str| self.num_at(t, k, "scenario", 0).map(|v| v.unwrap_or(0.0));
        Ok((
            label,
            Params {
                q: get("q")?,
                p: get("p")?,
                q_low: get("q_low")?,
                fixed: get("fixed")?,
            },
        ))
    }
}

/// Reads a `q,p,revenue` CSV (header optional).
pub fn read_table_csv(path: &Path) -> Result<Vec<(f64, f64, f64)>> {
    let ctx = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Input {
            context: ctx.clone(),
            message: e.to_string(),
        })?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Input {
            context: ctx.clone(),
            message: e.to_string(),
        })?;
        let fields: Vec<&str> = rec.iter().collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
        match parsed.as_deref() {
            Some([q, p, r]) => rows.push((*q, *p, *r)),
            None if i == 0 => continue,
            _ => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("{ctx}: expected three numbers q,p,revenue"),
                })
            }
        }
    }
    Ok(rows)
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn render_segment(out: &mut String, path: &str, s: &Segment) {
    let _ = writeln!(out, "\n[[{path}.segment]]");
    let _ = writeln!(out, "lo = {}\nhi = {}", num(s.lo), num(s.hi));
    match s.kind {
        SegmentKind::Constant(v) => {
            let _ = writeln!(out, "kind = \"constant\"\nvalue = {}", num(v));
        }
        SegmentKind::Hyperbolic(a) => {
            let _ = writeln!(out, "kind = \"hyperbolic\"\na = {}", num(a));
        }
        SegmentKind::Linear { intercept, slope } => {
            let _ = writeln!(
                out,
                "kind = \"linear\"\nintercept = {}\nslope = {}",
                num(intercept),
                num(slope)
            );
        }
    }
}

pub fn render_market(out: &mut String, m: &Market) {
    let _ = writeln!(out, "[market]\nv_bar = {}", num(m.v_bar()));
    for s in m.demand().segments() {
        render_segment(out, "market.demand", s);
    }
    let _ = writeln!(out, "\n[market.cost]\nfixed = {}", num(m.cost().jump_at_zero()));
    for s in m.cost().segments() {
        render_segment(out, "market.cost", s);
    }
}

pub fn render_policy(out: &mut String, pol: &Policy) {
    render_policy_at(out, pol, "policy");
}

fn render_policy_at(out: &mut String, pol: &Policy, path: &str) {
    let _ = writeln!(out, "[{path}]");
    let inner = match pol {
        Policy::LaissezFaire => {
            let _ = writeln!(out, "kind = \"laissez-faire\"");
            None
        }
        Policy::PriceCap { k } => {
            let _ = writeln!(out, "kind = \"price-cap\"\nk = {}", num(*k));
            None
        }
        Policy::LumpSum { q_tilde, s } => {
            let _ = writeln!(out, "kind = \"lump-sum\"\nq_tilde = {}\ns = {}", num(*q_tilde), num(*s));
            None
        }
        Policy::OptimalCapSubsidy { k, s } => {
            let _ = writeln!(out, "kind = \"cap-subsidy\"\nk = {}\ns = {}", num(*k), num(*s));
            None
        }
        Policy::HardCap { inner, k } => {
            let _ = writeln!(out, "kind = \"hard-cap\"\nk = {}", num(*k));
            Some(inner)
        }
        Policy::Spike {
            inner,
            q,
            p,
            revenue,
        } => {
            let _ = writeln!(
                out,
                "kind = \"spike\"\nq = {}\np = {}\nrevenue = {}",
                num(*q),
                num(*p),
                num(*revenue)
            );
            Some(inner)
        }
        Policy::Table(t) => {
            let _ = writeln!(out, "kind = \"table\"\n\n[{path}.table]\nrows = [");
            for (q, p, v) in t.rows() {
                let _ = writeln!(out, "  [{}, {}, {}],", num(q), num(p), num(v));
            }
            let _ = writeln!(out, "]");
            None
        }
    };
    if let Some(inner) = inner {
        out.push('\n');
        render_policy_at(out, inner, &format!("{path}.inner"));
    }
}

/// Renders a full document. The scenario block is written when `scenario` is given,
/// and its market takes precedence over `market`.
pub fn render_document(doc: &Document) -> String {
    let mut out = String::new();
    if let (Some(l), Some(x)) = (doc.label, doc.params) {
        let _ = writeln!(
            out,
            "[scenario]\nlabel = \"{}\"\nq = {}\np = {}\nq_low = {}\nfixed = {}\n",
            l.name(),
            num(x.q),
            num(x.p),
            num(x.q_low),
            num(x.fixed)
        );
    }
    if let Some(m) = &doc.market {
        render_market(&mut out, m);
        out.push('\n');
    }
    if let Some(p) = &doc.policy {
        render_policy(&mut out, p);
    }
    out
}

/// Renders a scenario together with the policy it was found against.
pub fn render_scenario(scenario: &Scenario, policy: Option<&Policy>) -> String {
    render_document(&Document {
        market: Some(scenario.market.clone()),
        policy: policy.cloned(),
        label: Some(scenario.label),
        params: Some(scenario.params),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT: &str = r#"
[market]
v_bar = 1

[[market.demand.segment]]
lo = 0
hi = 1
kind = "constant"
value = 1.0

[market.cost]
fixed = 0.5

[policy]
kind = "optimal"
alpha = 0.0
"#;

    #[test]
    fn parses_market_and_policy() {
        let d = parse(FLAT, None).unwrap();
        let m = d.market.unwrap();
        assert_eq!(m.cost().at(1.0), 0.5);
        assert_eq!(d.policy, Some(Policy::OptimalCapSubsidy { k: 0.5, s: 0.0 }));
    }

    #[test]
    fn bad_segment_names_block_and_line() {
        let text = FLAT.replace("hi = 1\n", "hi = 0\n");
        match parse(&text, None) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 5);
                assert!(message.contains("market.demand.segment"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_line() {
        match parse("[market]\nv_bar = = 1\n", None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse("[policy]\nkind = \"price-cap\"\nk = 1\nz = 2\n", None).is_err());
    }

    #[test]
    fn nested_policy_round_trips() {
        let inner = Policy::cap_subsidy(0.4, 0.1).unwrap();
        let pol = Policy::spike(Policy::hard_cap(inner, 0.4).unwrap(), 0.3, 0.2, 0.5).unwrap();
        let mut s = String::new();
        render_policy(&mut s, &pol);
        assert_eq!(parse(&s, None).unwrap().policy, Some(pol));
    }

    #[test]
    fn table_policy_round_trips() {
        let t = TablePolicy::sample(
            &Policy::cap_subsidy(0.5, 0.1).unwrap(),
            vec![0.0, 0.3, 1.0],
            vec![0.0, 0.5, 1.0],
        )
        .unwrap();
        let pol = Policy::Table(t);
        let mut s = String::new();
        render_policy(&mut s, &pol);
        assert_eq!(parse(&s, None).unwrap().policy, Some(pol));
    }
}
