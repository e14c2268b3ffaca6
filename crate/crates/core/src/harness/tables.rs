//! Parameter tables and method comparisons as CSV.

use std::fmt::Write;

use crate::adaptive::{choose_l_for_budget, choose_l_for_eps, AdaptivePlan};
use crate::discover::Variant;
use crate::error::Result;

use super::experiment::{estimate_error, ExperimentConfig, Method, MethodKind};
use super::families::VectorFamily;

/// Rows of a parameter table are keyed by target accuracy or by budget.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamTargets {
    Eps(Vec<f64>),
    Budgets(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamRow {
    pub eps: Option<f64>,
    pub budget: Option<u64>,
    pub levels: u32,
    pub reps: u32,
    /// Bucket count of each level.
    pub buckets: Vec<usize>,
    pub cost_cap: u64,
    pub error_bound: f64,
}

/// Derived adaptive parameters for each target. A row with `levels == 0` is
/// the zero algorithm.
pub fn param_table(p: f64, q: f64, m: usize, targets: &ParamTargets, variant: Variant) -> Result<Vec<ParamRow>> {
    let row = |eps, budget, levels| -> Result<ParamRow> {
        let plan = AdaptivePlan::new(m, p, q, levels, variant)?;
        Ok(ParamRow {
            eps,
            budget,
            levels,
            reps: plan.repetitions,
            buckets: plan.levels.iter().map(|l| l.discover.buckets).collect(),
            cost_cap: plan.cost_cap(),
            error_bound: if levels == 0 { 1.0 } else { plan.error_bound() },
        })
    };
    match targets {
        ParamTargets::Eps(list) => list.iter().map(|&e| row(Some(e), None, choose_l_for_eps(e, p, q)?)).collect(),
        ParamTargets::Budgets(list) => list
            .iter()
            .map(|&n| row(None, Some(n), choose_l_for_budget(n, m, p, q, variant)?))
            .collect(),
    }
}

pub fn param_table_csv(rows: &[ParamRow]) -> String {
    let mut s = String::from("eps,budget,L,R,buckets,cost_cap,error_bound\n");
    let opt = |v: Option<String>| v.unwrap_or_default();
    for r in rows {
        let buckets: Vec<String> = r.buckets.iter().map(|d| d.to_string()).collect();
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            opt(r.eps.map(|e| e.to_string())),
            opt(r.budget.map(|n| n.to_string())),
            r.levels,
            r.reps,
            buckets.join(";"),
            r.cost_cap,
            r.error_bound
        )
        .unwrap();
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareConfig {
    pub m: usize,
    pub p: f64,
    pub q: f64,
    pub budgets: Vec<u64>,
    pub families: Vec<VectorFamily>,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub method: &'static str,
    pub variant: String,
    pub m: usize,
    pub p: f64,
    pub q: f64,
    pub budget: u64,
    pub levels: u32,
    pub reps: u32,
    pub family: String,
    pub trials: usize,
    pub mean_err: f64,
    pub qmoment_err: f64,
    pub ci: f64,
    pub mean_cost: f64,
    pub max_cost: u64,
    pub seed: u64,
}

pub const CSV_HEADER: &str =
    "method,variant,m,p,q,budget,L,R,family,trials,mean_err,qmoment_err,ci,mean_cost,max_cost,seed";

/// Each compared method at each budget on each family. Methods that do not
/// fit a budget run as the zero algorithm.
pub fn compare_methods(cfg: &CompareConfig) -> Result<Vec<CompareRow>> {
    let mut rows = Vec::new();
    for family in &cfg.families {
        for &budget in &cfg.budgets {
            for kind in MethodKind::COMPARED {
                let method = Method::for_budget(kind, budget, cfg.m, cfg.p, cfg.q)?;
                let prepared = method.prepare(cfg.m, cfg.p, cfg.q)?;
                let exp = ExperimentConfig::new(method, *family, cfg.m, cfg.p, cfg.q, cfg.trials, cfg.seed);
                let est = estimate_error(&exp)?;
                let (name, variant) = match kind {
                    MethodKind::Zero => ("zero", "-".to_string()),
                    MethodKind::Adaptive(v) => ("adaptive", v.to_string()),
                    MethodKind::LinSketch => ("linsketch", "denoised".to_string()),
                    MethodKind::CountSketch => ("countsketch", "denoised".to_string()),
                };
                rows.push(CompareRow {
                    method: name,
                    variant,
                    m: cfg.m,
                    p: cfg.p,
                    q: cfg.q,
                    budget,
                    levels: method.levels().unwrap_or(0),
                    reps: prepared.reps(),
                    family: family.to_string(),
                    trials: cfg.trials,
                    mean_err: est.mean_err,
                    qmoment_err: est.qmoment_err,
                    ci: est.ci,
                    mean_cost: est.mean_cost,
                    max_cost: est.max_cost,
                    seed: cfg.seed,
                });
            }
        }
    }
    Ok(rows)
}

pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut s = format!("{CSV_HEADER}\n");
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.method,
            r.variant,
            r.m,
            r.p,
            r.q,
            r.budget,
            r.levels,
            r.reps,
            r.family,
            r.trials,
            r.mean_err,
            r.qmoment_err,
            r.ci,
            r.mean_cost,
            r.max_cost,
            r.seed
        )
        .unwrap();
    }
    s
}
