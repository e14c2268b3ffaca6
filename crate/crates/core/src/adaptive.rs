//! The multi-sensitivity algorithm: `R` independent detection passes at each of
//! `L` sensitivity levels, followed by direct reads of every candidate found.

use std::collections::BTreeSet;

use crate::discover::{discover, DiscoverConfig, Variant};
use crate::error::{param, Result};
use crate::numeric::{ceil_tol, ceil_u64};
use crate::oracle::{MeasurementOracle, Stage, Vector};
use crate::rng::RngStream;

fn check_pq(p: f64, q: f64) -> Result<()> {
    if !(p >= 1.0 && q > p && q.is_finite()) {
        return param(format!("need 1 <= p < q < inf, got p={p}, q={q}"));
    }
    Ok(())
}

/// `min(2, p)`.
pub fn p_prime(p: f64) -> f64 {
    p.min(2.0)
}

/// Sensitivity of level `l`: `2^(-l / min(2,p))`.
pub fn level_eps(l: u32, p: f64) -> f64 {
    (-(l as f64) / p_prime(p)).exp2()
}

/// Bucket count at level `l`, capped at `m`.
pub fn level_d(l: u32, p: f64, m: usize, variant: Variant) -> Result<usize> {
    if l == 0 {
        return param("levels start at 1");
    }
    if !(p >= 1.0 && p.is_finite()) || m == 0 {
        return param(format!("invalid p={p} or m={m}"));
    }
    let scale = (l as f64).exp2();
    let raw = if p <= 2.0 {
        variant.bucket_constant(p) * scale
    } else {
        variant.bucket_constant(2.0) * (m as f64).powf(1.0 - 2.0 / p) * scale
    };
    Ok((ceil_u64(raw) as usize).clamp(1, m))
}

/// Default repetitions `ceil(q / min(2,p))`.
pub fn repetitions(p: f64, q: f64) -> Result<u32> {
    check_pq(p, q)?;
    Ok(ceil_tol(q / p_prime(p)) as u32)
}

/// Error guarantee `3^(1/q) 2^(-(1 - p/q) L / min(2,p))` on the q-th moment.
pub fn error_bound(levels: u32, p: f64, q: f64) -> f64 {
    3f64.powf(1.0 / q) * (-(1.0 - p / q) * levels as f64 / p_prime(p)).exp2()
}

/// Smallest number of levels whose error guarantee is at most `eps`.
pub fn choose_l_for_eps(eps: f64, p: f64, q: f64) -> Result<u32> {
    check_pq(p, q)?;
    if !(eps > 0.0 && eps < 1.0) {
        return param(format!("eps must lie in (0,1), got {eps}"));
    }
    let rate = (1.0 - p / q) / p_prime(p);
    let l = ceil_tol((3f64.powf(1.0 / q) / eps).log2() / rate);
    if l > 62.0 {
        return param(format!("eps={eps} needs {l} levels"));
    }
    Ok(l.max(1.0) as u32)
}

/// Repetitions scaled for failure probability `delta`.
pub fn repetitions_for_confidence(base_r: u32, delta: f64) -> Result<u32> {
    if !(delta > 0.0 && delta < 1.0) {
        return param(format!("delta must lie in (0,1), got {delta}"));
    }
    if base_r == 0 {
        return param("base repetitions must be >= 1");
    }
    Ok(base_r * ceil_tol((1.0 / delta).log2()) as u32)
}

/// One row of the level table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub level: u32,
    pub eps: f64,
    pub discover: DiscoverConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptivePlan {
    pub m: usize,
    pub p: f64,
    pub q: f64,
    pub variant: Variant,
    pub repetitions: u32,
    pub levels: Vec<Level>,
}

impl AdaptivePlan {
    /// Plan with `levels` sensitivity levels and the default repetition count.
    /// Zero levels gives the zero algorithm.
    pub fn new(m: usize, p: f64, q: f64, levels: u32, variant: Variant) -> Result<Self> {
        let r = repetitions(p, q)?;
        Self::with_repetitions(m, p, q, levels, r, variant)
    }

    pub fn with_repetitions(
        m: usize,
        p: f64,
        q: f64,
        levels: u32,
        repetitions: u32,
        variant: Variant,
    ) -> Result<Self> {
        check_pq(p, q)?;
        if m == 0 {
            return param("m must be >= 1");
        }
        if repetitions == 0 && levels > 0 {
            return param("repetitions must be >= 1");
        }
        if levels > 62 {
            return param(format!("too many levels: {levels}"));
        }
        let levels = (1..=levels)
            .map(|l| {
                let d = level_d(l, p, m, variant)?;
                Ok(Level {
                    level: l,
                    eps: level_eps(l, p),
                    discover: DiscoverConfig::with_buckets(variant, m, d)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AdaptivePlan { m, p, q, variant, repetitions, levels })
    }

    pub fn num_levels(&self) -> u32 {
        self.levels.len() as u32
    }

    /// Upper bound on the number of candidates: `min(m, sum R D_l)`.
    pub fn candidate_cap(&self) -> u64 {
        let total: u64 = self.levels.iter().map(|l| l.discover.buckets as u64).sum();
        (total * self.repetitions as u64).min(self.m as u64)
    }

    /// Detection measurements over all passes.
    pub fn discover_cap(&self) -> u64 {
        let per_round: u64 = self.levels.iter().map(|l| l.discover.cost_cap()).sum();
        per_round * self.repetitions as u64
    }

    /// Worst-case total cost: all detection passes plus all direct reads.
    pub fn cost_cap(&self) -> u64 {
        self.discover_cap() + self.candidate_cap()
    }

    pub fn error_bound(&self) -> f64 {
        error_bound(self.num_levels(), self.p, self.q)
    }
}

/// Largest number of levels whose cost cap fits in `budget` (0 if none does).
pub fn choose_l_for_budget(budget: u64, m: usize, p: f64, q: f64, variant: Variant) -> Result<u32> {
    check_pq(p, q)?;
    let mut best = 0;
    for l in 1..=62 {
        if AdaptivePlan::new(m, p, q, l, variant)?.cost_cap() > budget {
            break;
        }
        best = l;
    }
    Ok(best)
}

/// Runs the plan and returns the output together with the candidate set.
pub fn approximate_with_candidates(
    oracle: &mut MeasurementOracle,
    plan: &AdaptivePlan,
    rng: &RngStream,
) -> Result<(Vector, Vec<usize>)> {
    if oracle.dim() != plan.m {
        return crate::error::dim(format!(
            "plan for m={} used on dimension {}",
            plan.m,
            oracle.dim()
        ));
    }
    let mut candidates = BTreeSet::new();
    for level in &plan.levels {
        for r in 0..plan.repetitions {
            let stream = rng.fork(format!("level{}/rep{}", level.level, r));
            candidates.extend(discover(oracle, &level.discover, &stream)?);
        }
    }
    let mut out = vec![0.0; plan.m];
    let prev = oracle.enter_stage(Stage::DirectRead);
    for &j in &candidates {
        out[j] = oracle.read_entry(j)?;
    }
    oracle.enter_stage(prev);
    Ok((Vector::new(out)?, candidates.into_iter().collect()))
}

/// Runs the plan and returns `x` restricted to the discovered coordinates.
pub fn approximate(
    oracle: &mut MeasurementOracle,
    plan: &AdaptivePlan,
    rng: &RngStream,
) -> Result<Vector> {
    approximate_with_candidates(oracle, plan, rng).map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_bucket_counts() {
        assert_eq!(level_d(3, 1.0, 1 << 20, Variant::Preconditioned).unwrap(), 108);
        assert_eq!(level_d(3, 1.0, 1 << 20, Variant::Basic).unwrap(), 273_800);
        assert_eq!(level_d(1, 2.0, 1 << 20, Variant::Preconditioned).unwrap(), 60);
        assert_eq!(level_d(10, 1.0, 100, Variant::Preconditioned).unwrap(), 100);
        assert!(level_d(0, 1.0, 100, Variant::Basic).is_err());
        // p > 2 picks up m^(1-2/p)
        assert_eq!(level_d(1, 4.0, 1 << 20, Variant::Preconditioned).unwrap(), 30 * 1024 * 2);
    }

    #[test]
    fn level_counts_match_detection_counts() {
        for l in 1..8 {
            for p in [1.0, 1.5, 2.0] {
                let eps = level_eps(l, p);
                let a = level_d(l, p, 1 << 30, Variant::Preconditioned).unwrap();
                let b = crate::discover::discover_d_precond(p, eps, 1 << 30).unwrap();
                assert!(a.abs_diff(b) <= 1, "l={l} p={p}");
            }
        }
    }

    #[test]
    fn default_repetitions() {
        assert_eq!(repetitions(1.0, 2.0).unwrap(), 2);
        assert_eq!(repetitions(2.0, 3.0).unwrap(), 2);
        assert_eq!(repetitions(3.0, 4.0).unwrap(), 2);
        assert_eq!(repetitions(1.0, 3.5).unwrap(), 4);
        assert!(repetitions(2.0, 2.0).is_err());
    }

    #[test]
    fn levels_for_accuracy() {
        assert_eq!(choose_l_for_eps(0.1, 1.0, 2.0).unwrap(), 9);
        assert_eq!(choose_l_for_eps(3f64.sqrt() / 2.0, 1.0, 2.0).unwrap(), 2);
        assert_eq!(choose_l_for_eps(0.25, 2.0, 4.0).unwrap(), 10);
        assert!(choose_l_for_eps(1.5, 1.0, 2.0).is_err());
        for eps in [0.01, 0.1, 0.3, 0.7] {
            let l = choose_l_for_eps(eps, 1.0, 2.0).unwrap();
            assert!(error_bound(l, 1.0, 2.0) <= eps * (1.0 + 1e-9));
            assert!(l == 1 || error_bound(l - 1, 1.0, 2.0) > eps);
        }
    }

    #[test]
    fn confidence_scaling() {
        assert_eq!(repetitions_for_confidence(2, 0.5).unwrap(), 2);
        assert_eq!(repetitions_for_confidence(2, 0.25).unwrap(), 4);
        assert_eq!(repetitions_for_confidence(3, 0.1).unwrap(), 12);
        assert!(repetitions_for_confidence(3, 1.0).is_err());
    }

    #[test]
    fn budget_search_boundaries() {
        let (m, p, q) = (1 << 20, 1.0, 2.0);
        let v = Variant::Preconditioned;
        assert_eq!(choose_l_for_budget(0, m, p, q, v).unwrap(), 0);
        let c1 = AdaptivePlan::new(m, p, q, 1, v).unwrap().cost_cap();
        let c2 = AdaptivePlan::new(m, p, q, 2, v).unwrap().cost_cap();
        assert!(c1 < c2);
        assert_eq!(choose_l_for_budget(c1 - 1, m, p, q, v).unwrap(), 0);
        assert_eq!(choose_l_for_budget(c1, m, p, q, v).unwrap(), 1);
        assert_eq!(choose_l_for_budget(c2 - 1, m, p, q, v).unwrap(), 1);
        assert_eq!(choose_l_for_budget(c2, m, p, q, v).unwrap(), 2);
        let l = choose_l_for_budget(100_000, m, p, q, v).unwrap();
        assert!(AdaptivePlan::new(m, p, q, l, v).unwrap().cost_cap() <= 100_000);
        assert!(AdaptivePlan::new(m, p, q, l + 1, v).unwrap().cost_cap() > 100_000);
    }

    #[test]
    fn zero_levels_is_zero_algorithm() {
        let plan = AdaptivePlan::new(10, 1.0, 2.0, 0, Variant::Basic).unwrap();
        assert_eq!(plan.cost_cap(), 0);
        let mut o = MeasurementOracle::new(Vector::new(vec![1.0; 10]).unwrap());
        let out = approximate(&mut o, &plan, &RngStream::new(0, "z")).unwrap();
        assert_eq!(out, Vector::zeros(10).unwrap());
        assert_eq!(o.cost(), 0);
    }

    #[test]
    fn output_is_restriction_to_candidates() {
        let m = 2000;
        let x: Vec<f64> = (0..m).map(|i| if i % 97 == 0 { 0.05 } else { 1e-4 }).collect();
        let plan = AdaptivePlan::new(m, 1.0, 2.0, 3, Variant::Preconditioned).unwrap();
        for t in 0..5 {
            let mut o = MeasurementOracle::new(Vector::new(x.clone()).unwrap());
            let (out, k) =
                approximate_with_candidates(&mut o, &plan, &RngStream::new(t, "a")).unwrap();
            for j in 0..m {
                let expect = if k.binary_search(&j).is_ok() { x[j] } else { 0.0 };
                assert_eq!(out[j], expect);
            }
            assert!(o.cost() <= plan.discover_cap() + k.len() as u64);
            assert_eq!(o.cost_in(Stage::DirectRead), k.len() as u64);
        }
    }

    #[test]
    fn one_sparse_recovered() {
        let m = 4096;
        let plan = AdaptivePlan::new(m, 1.0, 2.0, 2, Variant::Preconditioned).unwrap();
        for t in 0..20 {
            let mut x = vec![0.0; m];
            x[(t as usize * 37) % m] = 1.0;
            let x = Vector::new(x).unwrap();
            let mut o = MeasurementOracle::new(x.clone());
            let out = approximate(&mut o, &plan, &RngStream::new(t, "e")).unwrap();
            assert_eq!(out, x);
        }
    }
}
