//! Command-line driver for experiments, parameter tables and cost audits.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use adasense::adaptive::{choose_l_for_budget, choose_l_for_eps};
use adasense::discover::{DiscoverConfig, Variant};
use adasense::harness::{
    compare_csv, compare_methods, cost_audit, estimate_error, load_config, param_table, param_table_csv,
    AuditConfig, AuditTarget, CompareConfig, CompareRow, ExperimentConfig, Method, MethodKind, ParamTargets,
    VectorFamily,
};
use adasense::spotting::SpotParams;
use adasense::{Error, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "adasense", version, about = "Adaptive and non-adaptive vector approximation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the error of the adaptive multi-level method.
    Adaptive(Common),
    /// Estimate the error of a denoised sketch (--method countsketch|linsketch).
    Nonadaptive(Common),
    /// Compare all methods over budgets and families (CSV).
    Compare(Common),
    /// Tabulate derived parameters for a list of --eps or --budget values.
    Params(Common),
    /// Check measured costs against closed-form caps
    /// (--target spot|discover|adaptive|countsketch|linsketch).
    Audit(Common),
}

#[derive(Args, Default)]
struct Common {
    /// Flat key=value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    q: Option<String>,
    /// Target accuracy (comma-separated list for `params`).
    #[arg(long)]
    eps: Option<String>,
    /// Measurement budget (comma-separated list for `compare` and `params`).
    #[arg(long)]
    budget: Option<String>,
    /// Number of sensitivity levels.
    #[arg(long = "L")]
    levels: Option<String>,
    /// Repetitions per level.
    #[arg(long = "R")]
    reps: Option<String>,
    /// basic | precond
    #[arg(long)]
    variant: Option<String>,
    /// e.g. spikes:4, geometric:0.5, tail:4:1.5, ball, zero, adversarial:2
    /// (comma-separated list for `compare`).
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// CSV output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// countsketch | linsketch (nonadaptive) or audit target.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    target: Option<String>,
    /// Spot depth for `audit --target spot`.
    #[arg(long)]
    kstar: Option<String>,
}

const KEYS: [&str; 15] = [
    "m", "p", "q", "eps", "budget", "L", "R", "variant", "family", "trials", "seed", "out", "method", "target",
    "kstar",
];

/// Command-line values layered over the config file.
struct Settings(BTreeMap<String, String>);

impl Settings {
    fn resolve(c: &Common) -> Result<Self> {
        let mut map = match &c.config {
            Some(path) => load_config(path)?,
            None => BTreeMap::new(),
        };
        if let Some(bad) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(Error::Config(format!("unknown key {bad:?}")));
        }
        let cli = [
            ("m", &c.m),
            ("p", &c.p),
            ("q", &c.q),
            ("eps", &c.eps),
            ("budget", &c.budget),
            ("L", &c.levels),
            ("R", &c.reps),
            ("variant", &c.variant),
            ("family", &c.family),
            ("trials", &c.trials),
            ("seed", &c.seed),
            ("method", &c.method),
            ("target", &c.target),
            ("kstar", &c.kstar),
        ];
        for (k, v) in cli {
            if let Some(v) = v {
                map.insert(k.to_string(), v.clone());
            }
        }
        if let Some(out) = &c.out {
            map.insert("out".into(), out.display().to_string());
        }
        Ok(Settings(map))
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| v.parse().map_err(|_| Error::Parameter(format!("invalid value {v:?} for --{key}"))))
            .transpose()
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?.ok_or_else(|| Error::Parameter(format!("--{key} is required")))
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|s| s.trim().parse().map_err(|_| Error::Parameter(format!("invalid item {s:?} in --{key}"))))
                    .collect()
            })
            .transpose()
    }

    fn variant(&self) -> Result<Variant> {
        self.or("variant", Variant::Preconditioned)
    }

    fn family(&self) -> Result<VectorFamily> {
        self.or("family", VectorFamily::Spikes { k: 4 })
    }
}

fn emit(s: &Settings, text: &str) -> Result<()> {
    match s.raw("out") {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Config(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn single_row(method: Method, kind: &'static str, variant: String, budget: u64, s: &Settings) -> Result<String> {
    let m = s.require("m")?;
    let (p, q) = (s.or("p", 1.0)?, s.or("q", 2.0)?);
    let family = s.family()?;
    let (trials, seed) = (s.or("trials", 100)?, s.or("seed", 0)?);
    let reps = method.prepare(m, p, q)?.reps();
    let est = estimate_error(&ExperimentConfig::new(method, family, m, p, q, trials, seed))?;
    let row = CompareRow {
        method: kind,
        variant,
        m,
        p,
        q,
        budget,
        levels: method.levels().unwrap_or(0),
        reps,
        family: family.to_string(),
        trials,
        mean_err: est.mean_err,
        qmoment_err: est.qmoment_err,
        ci: est.ci,
        mean_cost: est.mean_cost,
        max_cost: est.max_cost,
        seed,
    };
    Ok(compare_csv(&[row]))
}

fn run_adaptive(s: &Settings) -> Result<String> {
    let m: usize = s.require("m")?;
    let (p, q) = (s.or("p", 1.0)?, s.or("q", 2.0)?);
    let variant = s.variant()?;
    let budget: Option<u64> = s.get("budget")?;
    let levels = match (s.get::<u32>("L")?, s.get::<f64>("eps")?, budget) {
        (Some(l), _, _) => l,
        (None, Some(eps), _) => choose_l_for_eps(eps, p, q)?,
        (None, None, Some(n)) => choose_l_for_budget(n, m, p, q, variant)?,
        _ => return Err(Error::Parameter("one of --L, --eps, --budget is required".into())),
    };
    let method = if levels == 0 {
        Method::Zero
    } else {
        Method::Adaptive { levels, reps: s.get("R")?, variant }
    };
    single_row(method, "adaptive", variant.to_string(), budget.unwrap_or(0), s)
}

fn run_nonadaptive(s: &Settings) -> Result<String> {
    let m: usize = s.require("m")?;
    let (p, q) = (s.or("p", 1.0)?, s.or("q", 2.0)?);
    let which = s.raw("method").unwrap_or("countsketch");
    let budget: Option<u64> = s.get("budget")?;
    let method = match (which, s.get::<u32>("L")?, budget) {
        ("countsketch", Some(levels), _) => Method::DenoisedCountSketch { levels },
        ("countsketch", None, Some(n)) => Method::for_budget(MethodKind::CountSketch, n, m, p, q)?,
        ("linsketch", _, Some(n)) => Method::for_budget(MethodKind::LinSketch, n, m, p, q)?,
        ("countsketch", None, None) => return Err(Error::Parameter("--L or --budget is required".into())),
        ("linsketch", _, None) => return Err(Error::Parameter("--budget is required for linsketch".into())),
        (other, _, _) => return Err(Error::Parameter(format!("unknown method {other:?}"))),
    };
    let kind = if which == "linsketch" { "linsketch" } else { "countsketch" };
    single_row(method, kind, "denoised".into(), budget.unwrap_or(0), s)
}

fn run_compare(s: &Settings) -> Result<String> {
    let cfg = CompareConfig {
        m: s.require("m")?,
        p: s.or("p", 1.0)?,
        q: s.or("q", 2.0)?,
        budgets: s.list("budget")?.unwrap_or_else(|| vec![0, 1 << 14, 1 << 17]),
        families: s.list("family")?.unwrap_or_else(|| vec![VectorFamily::Spikes { k: 4 }]),
        trials: s.or("trials", 100)?,
        seed: s.or("seed", 0)?,
    };
    Ok(compare_csv(&compare_methods(&cfg)?))
}

fn run_params(s: &Settings) -> Result<String> {
    let m = s.or("m", 1usize << 20)?;
    let (p, q) = (s.or("p", 1.0)?, s.or("q", 2.0)?);
    let targets = match (s.list("eps")?, s.list("budget")?) {
        (Some(e), None) => ParamTargets::Eps(e),
        (None, Some(n)) => ParamTargets::Budgets(n),
        _ => return Err(Error::Parameter("give exactly one of --eps or --budget".into())),
    };
    Ok(param_table_csv(&param_table(p, q, m, &targets, s.variant()?)?))
}

fn run_audit(s: &Settings) -> Result<String> {
    let m: usize = s.require("m")?;
    let (p, q) = (s.or("p", 1.0)?, s.or("q", 2.0)?);
    let variant = s.variant()?;
    let target = match s.raw("target").unwrap_or("adaptive") {
        "spot" => AuditTarget::Spot(SpotParams::new(variant.delta2(), s.or("kstar", 0)?)?),
        "discover" => AuditTarget::Discover(DiscoverConfig::new(variant, p, s.require("eps")?, m)?),
        "adaptive" => AuditTarget::Method(Method::Adaptive { levels: s.require("L")?, reps: s.get("R")?, variant }),
        "countsketch" => AuditTarget::Method(Method::DenoisedCountSketch { levels: s.require("L")? }),
        "linsketch" => AuditTarget::Method(Method::LinSketch { n: s.require("budget")? }),
        other => return Err(Error::Parameter(format!("unknown audit target {other:?}"))),
    };
    let cfg = AuditConfig {
        target,
        family: s.family()?,
        m,
        p,
        q,
        trials: s.or("trials", 100)?,
        seed: s.or("seed", 0)?,
    };
    Ok(format!("{}\n", cost_audit(&cfg)?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (&Common, fn(&Settings) -> Result<String>) = match &cli.command {
        Command::Adaptive(c) => (c, run_adaptive),
        Command::Nonadaptive(c) => (c, run_nonadaptive),
        Command::Compare(c) => (c, run_compare),
        Command::Params(c) => (c, run_params),
        Command::Audit(c) => (c, run_audit),
    };
    let result = Settings::resolve(common).and_then(|s| run(&s).and_then(|text| emit(&s, &text)));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::CapViolation { .. } => 3,
                _ => 2,
            })
        }
    }
}
