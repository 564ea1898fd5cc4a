use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use regret_cap::adversary::{self, SearchConfig};
use regret_cap::analysis::{constants_row, ConstantsRow};
use regret_cap::suites::{self, SuiteOptions, DEFAULT_SEED, SUITES};
use regret_cap::{constants, optimal_policy, report, scenario, AlphaConstants, Error, Policy, TieBreak};

#[derive(Parser)]
#[command(name = "regret-cap", version, about = "Worst-case-regret regulation of a monopolist")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Table of k, r, q and s with the numerical maximin next to the closed form.
    Constants {
        /// Repeat for several values; defaults to 0, 0.05, ..., 1.
        #[arg(long)]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        v_bar: f64,
        /// Grid points per axis of the maximin scan.
        #[arg(long, default_value_t = 2001)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Best responses of the firm to a policy in a market.
    Eval {
        /// File with a [policy] section (and optionally the market).
        policy: PathBuf,
        /// File with the market; defaults to the policy file.
        market: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Tie::Against)]
        tie: Tie,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Worst-case regret of a policy over the adversarial library and random markets.
    Wcr {
        policy: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        v_bar: f64,
        /// Points per axis of the library grids.
        #[arg(long, default_value_t = adversary::DEFAULT_RESOLUTION)]
        grid: usize,
        #[arg(long, default_value_t = 200)]
        random: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Directory for the report CSV and the witness scenarios.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs verification suites; `all` runs every suite.
    Verify {
        #[arg(required = true)]
        suites: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Number of random instances per suite.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        v_bar: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes the per-constant series and the combined table over 101 values of alpha.
    Figure1 {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        v_bar: f64,
        #[arg(long, default_value_t = 2001)]
        grid: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Tie {
    Against,
    For,
    All,
}

impl From<Tie> for TieBreak {
    fn from(t: Tie) -> Self {
        match t {
            Tie::Against => TieBreak::AgainstRegulator,
            Tie::For => TieBreak::ForRegulator,
            Tie::All => TieBreak::All,
        }
    }
}

enum Failure {
    Verification(String),
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.into())
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Constants { alpha, v_bar, grid, out } => {
            let alphas = if alpha.is_empty() { suites::alpha_grid() } else { alpha };
            let rows = rows(&alphas, v_bar, grid)?;
            report::constants_csv(sink(out.as_deref())?, &rows)?;
            Ok(())
        }
        Command::Eval { policy, market, alpha, tie, out } => eval(&policy, market.as_deref(), alpha, tie, out),
        Command::Wcr { policy, alpha, v_bar, grid, random, seed, out } => {
            wcr(&policy, alpha, v_bar, grid, random, seed, out)
        }
        Command::Verify { suites, seed, random, grid, v_bar, out } => {
            let opts = SuiteOptions { seed, count: random, v_bar, grid };
            verify(&suites, &opts, out)
        }
        Command::Figure1 { out, v_bar, grid } => figure1(&out, v_bar, grid),
    }
}

fn sink(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn rows(alphas: &[f64], v_bar: f64, grid: usize) -> Result<Vec<ConstantsRow>, Error> {
    alphas.par_iter().map(|&a| constants_row(a, v_bar, grid)).collect()
}

fn eval(policy: &Path, market: Option<&Path>, alpha: f64, tie: Tie, out: Option<PathBuf>) -> CmdResult {
    let pdoc = scenario::load(policy)?;
    let pol = pdoc.require_policy(&policy.display().to_string())?;
    let mdoc;
    let (m, source) = match market {
        Some(path) => {
            mdoc = scenario::load(path)?;
            (mdoc.require_market(&path.display().to_string())?, path)
        }
        None => (pdoc.require_market(&policy.display().to_string())?, policy),
    };
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain { what: "alpha", value: alpha, domain: "[0, 1]" }.into());
    }
    let mut outcomes = regret_cap::best_responses(pol, m, alpha, tie.into());
    if !matches!(tie, Tie::All) {
        // Choices that differ only in the posted price are the same response.
        let tol = 1e-12 * m.v_bar();
        let same = |a: &regret_cap::Outcome, b: &regret_cap::Outcome| {
            let fields = |o: &regret_cap::Outcome| [o.q, o.revenue, o.fp, o.cs, o.dstr, o.rgrt];
            fields(a).iter().zip(fields(b)).all(|(x, y)| (x - y).abs() <= tol)
        };
        let mut kept: Vec<regret_cap::Outcome> = Vec::new();
        for o in outcomes {
            if !kept.iter().any(|k| same(k, &o)) {
                kept.push(o);
            }
        }
        outcomes = kept;
    }
    if outcomes.is_empty() {
        return Err(Error::Input {
            context: source.display().to_string(),
            message: format!("{} admits no feasible choice in this market", pol.id()),
        }
        .into());
    }
    eprintln!(
        "regret {} over {} tied response(s)",
        report::sig12(match tie {
            Tie::For => outcomes[0].rgrt,
            _ => outcomes.iter().map(|o| o.rgrt).fold(f64::NEG_INFINITY, f64::max),
        }),
        outcomes.len()
    );
    report::outcomes_csv(sink(out.as_deref())?, &outcomes)?;
    Ok(())
}

/// Rules the library offers as optimal for `c`: the cap `k_alpha` with an admissible subsidy cap.
fn claims_optimality(pol: &Policy, c: &AlphaConstants) -> bool {
    let same_k = |k: f64| (k - c.k_alpha).abs() <= 1e-12 * c.v_bar;
    match *pol {
        Policy::OptimalCapSubsidy { k, s } => same_k(k) && optimal_policy(c, s).is_ok(),
        Policy::PriceCap { k } => same_k(k) && c.s_alpha == 0.0,
        _ => false,
    }
}

fn wcr(policy: &Path, alpha: f64, v_bar: f64, grid: usize, random: usize, seed: u64, out: Option<PathBuf>) -> CmdResult {
    let doc = scenario::load(policy)?;
    let pol = doc.require_policy(&policy.display().to_string())?;
    let c = constants(alpha, v_bar)?;
    if grid < adversary::MIN_RESOLUTION {
        return Err(Error::Domain {
            what: "grid",
            value: grid as f64,
            domain: "[11, inf)",
        }
        .into());
    }
    let cfg = SearchConfig::with_resolution(grid);
    let rep = adversary::certify(pol, &c, &cfg, random, seed)?;
    print!("{}", report::certification_text(&rep));
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir)?;
        report::certification_csv(BufWriter::new(File::create(dir.join("certification.csv"))?), std::slice::from_ref(&rep))?;
        for path in rep.write_witnesses(pol, &dir, "witness")? {
            println!("wrote        {}", path.display());
        }
    }
    if claims_optimality(pol, &c) && !rep.upper_ok() {
        return Err(Failure::Verification(format!(
            "{} reaches regret {} > r_alpha = {}",
            rep.policy_id,
            report::sig12(rep.upper_sweep.regret),
            report::sig12(rep.r_alpha)
        )));
    }
    if !rep.lower_ok() {
        return Err(Failure::Verification(format!(
            "largest regret found {} is below r_alpha = {}",
            report::sig12(rep.lower_bound.regret),
            report::sig12(rep.r_alpha)
        )));
    }
    Ok(())
}

fn verify(names: &[String], opts: &SuiteOptions, out: Option<PathBuf>) -> CmdResult {
    let names: Vec<&str> = if names.iter().any(|n| n == "all") {
        SUITES.to_vec()
    } else {
        names.iter().map(String::as_str).collect()
    };
    let mut reports = Vec::new();
    for name in names {
        let r = suites::run(name, opts)?;
        println!(
            "{:<18} {}  checked {:>6}  worst margin {}",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.checked,
            report::sig12(r.worst_margin)
        );
        for note in &r.notes {
            println!("    note: {note}");
        }
        for f in r.failures.iter().take(10) {
            println!("    {f}");
        }
        if r.failures.len() > 10 {
            println!("    ... {} more", r.failures.len() - 10);
        }
        reports.push(r);
    }
    if let Some(path) = out {
        report::suites_csv(sink(Some(&path))?, &reports)?;
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failed.join(", ")))
    }
}

fn figure1(out: &Path, v_bar: f64, grid: usize) -> CmdResult {
    std::fs::create_dir_all(out)?;
    let alphas: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let rows = rows(&alphas, v_bar, grid)?;
    let series = |f: fn(&AlphaConstants) -> f64| -> Vec<(f64, f64)> {
        rows.iter().map(|r| (r.consts.alpha, f(&r.consts))).collect()
    };
    let files: [(&str, &str, fn(&AlphaConstants) -> f64); 4] = [
        ("k.csv", "k_alpha", |c| c.k_alpha),
        ("r.csv", "r_alpha", |c| c.r_alpha),
        ("q.csv", "q_alpha", |c| c.q_alpha),
        ("s.csv", "s_alpha", |c| c.s_alpha),
    ];
    for (file, name, f) in files {
        report::series_csv(BufWriter::new(File::create(out.join(file))?), name, &series(f))?;
    }
    report::constants_csv(BufWriter::new(File::create(out.join("figure1.csv"))?), &rows)?;
    Ok(())
}
