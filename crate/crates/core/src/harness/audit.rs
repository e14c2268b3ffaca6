//! Cost audits: run a component many times and compare the worst measured
//! cost against its closed-form cap, stage by stage.

use std::fmt;

use crate::discover::{discover, DiscoverConfig};
use crate::error::{Error, Result};
use crate::oracle::{MeasurementOracle, Stage};
use crate::spotting::{spot, SpotParams};

use super::experiment::{trial_stream, Method};
use super::families::VectorFamily;

#[derive(Debug, Clone, PartialEq)]
pub enum AuditTarget {
    /// Spot on the whole vector as one bucket.
    Spot(SpotParams),
    Discover(DiscoverConfig),
    Method(Method),
}

impl fmt::Display for AuditTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuditTarget::Spot(s) => write!(f, "spot[k*={}, delta2={}]", s.k_star(), s.delta2()),
            AuditTarget::Discover(c) => write!(f, "discover[{}, D={}, k*={}]", c.variant, c.buckets, c.k_star()),
            AuditTarget::Method(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditConfig {
    pub target: AuditTarget,
    pub family: VectorFamily,
    pub m: usize,
    pub p: f64,
    pub q: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub target: String,
    pub trials: usize,
    pub cap: u64,
    pub max_cost: u64,
    pub mean_cost: f64,
    /// Largest per-trial count in each stage, in [`Stage::ALL`] order.
    pub max_by_stage: Vec<(Stage, u64)>,
}

impl AuditReport {
    pub fn within_cap(&self) -> bool {
        self.max_cost <= self.cap
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "target:    {}", self.target)?;
        writeln!(f, "trials:    {}", self.trials)?;
        writeln!(f, "cap:       {}", self.cap)?;
        writeln!(f, "max cost:  {}", self.max_cost)?;
        writeln!(f, "mean cost: {:.3}", self.mean_cost)?;
        for (stage, c) in &self.max_by_stage {
            writeln!(f, "  {:<13} max {}", stage.name(), c)?;
        }
        write!(f, "status:    {}", if self.within_cap() { "ok" } else { "CAP VIOLATION" })
    }
}

/// Runs the audit. Returns [`Error::CapViolation`] as soon as one trial
/// exceeds the cap.
pub fn cost_audit(cfg: &AuditConfig) -> Result<AuditReport> {
    if cfg.trials == 0 {
        return crate::error::param("trials must be >= 1");
    }
    let prepared = match &cfg.target {
        AuditTarget::Method(m) => Some(m.prepare(cfg.m, cfg.p, cfg.q)?),
        _ => None,
    };
    let cap = match (&cfg.target, &prepared) {
        (AuditTarget::Spot(s), _) => s.cost_cap(),
        (AuditTarget::Discover(c), _) => c.cost_cap(),
        (_, Some(p)) => p.cost_cap(),
        _ => unreachable!(),
    };
    let all: Vec<usize> = (0..cfg.m).collect();
    let mut max_cost = 0;
    let mut total = 0u64;
    let mut by_stage = [0u64; 5];
    for t in 0..cfg.trials {
        let rng = trial_stream(cfg.seed, t);
        let x = cfg.family.generate(cfg.p, cfg.m, &mut rng.fork("vector"))?;
        let mut oracle = MeasurementOracle::new(x);
        let run = rng.fork("method");
        match (&cfg.target, &prepared) {
            (AuditTarget::Spot(s), _) => {
                spot(&mut oracle, &all, *s, &mut run.clone())?;
            }
            (AuditTarget::Discover(c), _) => {
                discover(&mut oracle, c, &run)?;
            }
            (_, Some(p)) => {
                p.run(&mut oracle, &run)?;
            }
            _ => unreachable!(),
        }
        let cost = oracle.cost();
        if cost > cap {
            return Err(Error::CapViolation {
                measured: cost,
                cap,
                context: format!("{} on {} (trial {t})", cfg.target, cfg.family),
            });
        }
        max_cost = max_cost.max(cost);
        total += cost;
        for (slot, stage) in Stage::ALL.iter().enumerate() {
            by_stage[slot] = by_stage[slot].max(oracle.cost_in(*stage));
        }
    }
    Ok(AuditReport {
        target: cfg.target.to_string(),
        trials: cfg.trials,
        cap,
        max_cost,
        mean_cost: total as f64 / cfg.trials as f64,
        max_by_stage: Stage::ALL.iter().copied().zip(by_stage).collect(),
    })
}
