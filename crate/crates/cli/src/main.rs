//! `cohomgrowth`: shape tables, headline bounds, Hodge data and the
//! verification suite from the command line.
//!
//! Exit status: 0 pass, 1 assertion failure, 2 infeasible or over budget,
//! 3 usage error.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};

use cohomgrowth_core::arith::{approx6, primes_between, rat_string, DEFAULT_GUARD};
use cohomgrowth_core::cohomology::{
    decay_exponent, hodge_table, parameter_exponents, multiplicity_exponent, verify_hodge_lefschetz, CohRep,
};
use cohomgrowth_core::report::bound::{middle_degree_note, volume_exponent, volume_form};
use cohomgrowth_core::report::cache::DEFAULT_CACHE_DIR;
use cohomgrowth_core::report::document::row;
use cohomgrowth_core::report::{
    run_verification_suite, theorem_bound, Budget, Cache, Format, Level, ReportDocument, Scope, SuiteStatus,
};
use cohomgrowth_core::shapes::{shape_rows, Exponent};
use cohomgrowth_core::Error;

const EXIT_FAIL: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "cohomgrowth", version, about = "Exact cohomology-growth exponents and their verifiers")]
struct Cli {
    /// Plain `key=value` file; keys: guard, cache-dir, pmax, nmax, rank-max, primes.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Where fixture results are memoized.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Recompute everything and write nothing to the cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Output format; `report` defaults to json, everything else to md.
    #[arg(long, global = true)]
    format: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Admissible designated shapes and governing exponents for each degree.
    Shapes { n: u32 },
    /// Headline growth exponent and bound value at a level.
    Bound {
        n: u32,
        d: u32,
        /// `q^n,q^n,...` over split places.
        #[arg(long, default_value = "")]
        level: String,
    },
    /// Hodge tables, decay exponents and parameters of each cohomological representation.
    Hodge { n: u32 },
    /// Run the verifiers of one scope: shapes, cohomology, gl2, gl3, indices, all.
    Verify {
        scope: String,
        #[arg(long)]
        pmax: Option<u64>,
        #[arg(long)]
        nmax: Option<u32>,
        #[arg(long)]
        guard: Option<u64>,
    },
    /// Full verification report.
    Report {
        #[arg(long)]
        pmax: Option<u64>,
        #[arg(long)]
        nmax: Option<u32>,
        #[arg(long)]
        guard: Option<u64>,
    },
}

/// An error carrying its exit status.
#[derive(Debug)]
struct Exit {
    code: u8,
    message: String,
}

fn usage(e: impl std::fmt::Display) -> Exit {
    Exit { code: EXIT_USAGE, message: e.to_string() }
}

fn core_exit(e: Error) -> Exit {
    let code = match e {
        Error::Infeasible { .. } | Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::InvalidInput(_) | Error::NotPrime(_) | Error::DiscreteSeries { .. } => EXIT_USAGE,
        _ => EXIT_FAIL,
    };
    Exit { code, message: e.to_string() }
}

#[derive(Debug, Default)]
struct Config {
    guard: Option<u64>,
    cache_dir: Option<PathBuf>,
    pmax: Option<u64>,
    nmax: Option<u32>,
    rank_max: Option<u32>,
}

fn parse_config(text: &str) -> anyhow::Result<Config> {
    let mut seen = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key=value", i + 1))?;
        seen.insert(k.trim().to_string(), (i + 1, v.trim().to_string()));
    }
    let mut cfg = Config::default();
    for (key, (line, value)) in seen {
        let ctx = || format!("line {line}: bad value for {key}");
        match key.as_str() {
            "guard" => cfg.guard = Some(value.parse().with_context(ctx)?),
            "cache-dir" => cfg.cache_dir = Some(PathBuf::from(value)),
            "pmax" => cfg.pmax = Some(value.parse().with_context(ctx)?),
            "nmax" => cfg.nmax = Some(value.parse().with_context(ctx)?),
            "rank-max" => cfg.rank_max = Some(value.parse().with_context(ctx)?),
            "primes" => {
                let primes: Vec<u64> =
                    value.split(',').map(|p| p.trim().parse::<u64>()).collect::<Result<_, _>>().with_context(ctx)?;
                cfg.pmax = Some(primes.into_iter().max().ok_or_else(|| anyhow!("line {line}: empty prime list"))?);
            }
            other => bail!("line {line}: unknown key {other:?}"),
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Exit> {
    let cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            parse_config(&text).map_err(|e| usage(format!("{}: {e:#}", path.display())))?
        }
        None => Config::default(),
    };
    let cache = if cli.no_cache {
        None
    } else {
        let dir = cli.cache_dir.clone().or(cfg.cache_dir.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR));
        Some(Cache::new(dir).map_err(core_exit)?)
    };
    let default_format = if matches!(cli.command, Command::Report { .. }) { Format::Json } else { Format::Markdown };
    let format = match &cli.format {
        Some(f) => f.parse::<Format>().map_err(usage)?,
        None => default_format,
    };
    let budget = |pmax: Option<u64>, nmax: Option<u32>, guard: Option<u64>| Budget {
        guard: guard.or(cfg.guard).unwrap_or(DEFAULT_GUARD),
        pmax: pmax.or(cfg.pmax).unwrap_or(Budget::default().pmax),
        nmax: nmax.or(cfg.nmax),
        rank_max: cfg.rank_max.unwrap_or(Budget::default().rank_max),
        ring_max: Budget::default().ring_max,
    };

    let (doc, code) = match cli.command {
        Command::Shapes { n } => shapes_doc(n)?,
        Command::Bound { n, d, level } => bound_doc(n, d, &level)?,
        Command::Hodge { n } => hodge_doc(n)?,
        Command::Verify { scope, pmax, nmax, guard } => {
            let scope: Scope = scope.parse().map_err(usage)?;
            suite_doc(scope, &budget(pmax, nmax, guard), cache.as_ref())?
        }
        Command::Report { pmax, nmax, guard } => {
            let (mut doc, code) = suite_doc(Scope::All, &budget(pmax, nmax, guard), cache.as_ref())?;
            doc.command = "report".into();
            (doc, code)
        }
    };
    let text = doc.render(format).map_err(core_exit)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", text.trim_end()).map_err(|e| Exit { code: EXIT_FAIL, message: e.to_string() })?;
    Ok(code)
}

fn status_code(doc: &ReportDocument) -> u8 {
    if doc.passed() {
        0
    } else {
        EXIT_FAIL
    }
}

fn shapes_doc(n: u32) -> Result<(ReportDocument, u8), Exit> {
    if n < 2 {
        return Err(usage("shapes needs N >= 2"));
    }
    let mut doc = ReportDocument::new(format!("shapes {n}"));
    doc.param("N", n);
    for d in 0..n - 1 {
        let rows = shape_rows(n, d).map_err(core_exit)?;
        let top = rows.iter().map(|r| r.governing.exponent).max().expect("nonempty");
        doc.check(top == Exponent::exact((n * d) as i64 + 1));
        doc.exact(format!("headline.d={d}"), top);
        for r in rows {
            let family = r.governing.family.map_or("tau'".to_string(), |l| format!("tau'_{l}"));
            doc.rows.push(row([
                ("d", d.to_string()),
                ("shape", r.shape.to_string()),
                ("governing", family),
                ("exponent", r.governing.exponent.to_string()),
                ("sigma_prime", r.governing.sigma_prime.to_string()),
                ("extremal", r.extremal.to_string()),
            ]));
        }
    }
    let code = status_code(&doc);
    Ok((doc, code))
}

fn bound_doc(n: u32, d: u32, level: &str) -> Result<(ReportDocument, u8), Exit> {
    let level: Level = level.parse().map_err(core_exit)?;
    let mut doc = ReportDocument::new(format!("bound {n} {d}"));
    doc.param("N", n).param("d", d).param("level", &level);
    let report = match theorem_bound(n, d, &level) {
        Ok(r) => r,
        Err(Error::MiddleDegree { .. }) => {
            doc.exact("middle_degree", middle_degree_note(n).map_err(core_exit)?);
            doc.exact("volume_exponent", volume_exponent(n).map_err(core_exit)?);
            return Ok((doc, 0));
        }
        Err(e) => return Err(core_exit(e)),
    };
    for r in &report.rows {
        doc.rows.push(row([
            ("shape", r.shape.to_string()),
            ("exponent", r.governing.exponent.to_string()),
            ("sigma_prime", r.governing.sigma_prime.to_string()),
            ("eps", r.governing.exponent.plus_epsilon.to_string()),
            ("extremal", r.extremal.to_string()),
        ]));
    }
    doc.check(report.headline == Exponent::exact((n * d) as i64 + 1));
    doc.check(report.exceptional_factor() == ((n, d) == (4, 2)));
    let factor = if report.exceptional_factor() {
        format!("(1+1/q_v)^{}", report.factor_exponent)
    } else {
        "(1-1/q_v)".to_string()
    };
    doc.exact("headline", report.headline)
        .exact("factor", factor)
        .exact("level_norm", level.norm())
        .exact("value", rat_string(&report.value))
        .exact("value_approx6", approx6(&report.value))
        .exact("volume_exponent", volume_exponent(n).map_err(core_exit)?)
        .exact("volume_form", volume_form(n, d).map_err(core_exit)?);
    if let Some((ours, predicted)) = report.volume_ratio {
        doc.exact("ratio_ours", ours).exact("ratio_predicted", predicted);
        doc.check(ours < predicted);
    }
    let code = status_code(&doc);
    Ok((doc, code))
}

/// `t / 2` in lowest terms.
fn half(t: i64) -> String {
    if t % 2 == 0 {
        (t / 2).to_string()
    } else {
        format!("{t}/2")
    }
}

fn hodge_doc(n: u32) -> Result<(ReportDocument, u8), Exit> {
    let check = verify_hodge_lefschetz(n).map_err(core_exit)?;
    let mut doc = ReportDocument::new(format!("hodge {n}"));
    doc.param("N", n);
    for rep in CohRep::all(n) {
        let table = hodge_table(&rep);
        let support: Vec<String> = table.support().iter().map(|(p, q)| format!("({p},{q})")).collect();
        let params = match parameter_exponents(&rep) {
            Ok(p) => p
                .characters
                .iter()
                .map(|c| format!("({},{})", half(c.twist_doubled), c.r))
                .collect::<Vec<_>>()
                .join(" "),
            Err(Error::DiscreteSeries { .. }) => "discrete series".to_string(),
            Err(e) => return Err(core_exit(e)),
        };
        doc.rows.push(row([
            ("rep", rep.to_string()),
            ("degree", rep.degree().to_string()),
            ("hodge_support", support.join(" ")),
            ("decay_exponent", decay_exponent(&rep).to_string()),
            ("multiplicity_exponent", multiplicity_exponent(&rep).to_string()),
            ("parameter", params),
        ]));
    }
    doc.assertions.passed += (check.checks - check.failures.len()) as u64;
    doc.assertions.failed += check.failures.len() as u64;
    for f in &check.failures {
        doc.rows.push(row([("failure", f.as_str())]));
    }
    let code = status_code(&doc);
    Ok((doc, code))
}

fn suite_doc(scope: Scope, budget: &Budget, cache: Option<&Cache>) -> Result<(ReportDocument, u8), Exit> {
    if budget.pmax < 3 || primes_between(3, budget.pmax).is_empty() {
        return Err(usage("pmax must be at least 3"));
    }
    let report = run_verification_suite(scope, budget, cache).map_err(core_exit)?;
    let code = match report.status() {
        SuiteStatus::Pass => 0,
        SuiteStatus::Fail => EXIT_FAIL,
        SuiteStatus::BudgetExceeded => {
            eprintln!("{}", Error::BudgetExceeded { skipped: report.skipped.clone() });
            EXIT_BUDGET
        }
    };
    let mut doc = report.document;
    if let Some(c) = cache {
        doc.param("cache_dir", c.dir().display());
    }
    Ok((doc, code))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_keys() {
        let cfg = parse_config("# comment\nguard = 1024\nprimes=3,5,11\ncache-dir=/tmp/x\n").unwrap();
        assert_eq!(cfg.guard, Some(1024));
        assert_eq!(cfg.pmax, Some(11));
        assert_eq!(cfg.cache_dir, Some(PathBuf::from("/tmp/x")));
        assert!(parse_config("colour=blue").is_err());
        assert!(parse_config("guard").is_err());
        assert!(parse_config("guard=lots").is_err());
    }
}
