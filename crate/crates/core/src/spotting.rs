//! Isolating a single heavy hitter inside one bucket.
//!
//! `spot` runs `k*` shrink steps. Each step hashes the current candidate set
//! into `D_k` labels with a fresh pairwise-independent hash and spends two
//! Gaussian measurements to estimate the label of the dominant coordinate;
//! the candidates sharing that label survive. A last shrink step with an
//! injective labelling of the survivors picks out at most one index.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{param, Result};
use crate::hashing::PairwiseHash;
use crate::numeric::ceil_tol;
use crate::oracle::{LinearFunctional, MeasurementOracle, Stage};
use crate::rng::RngStream;

/// Largest schedule exponent we accept; keeps labels well inside `u64`.
const MAX_SCHEDULE_EXPONENT: f64 = 62.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpotParams {
    delta2: f64,
    k_star: u32,
}

impl SpotParams {
    pub fn new(delta2: f64, k_star: u32) -> Result<Self> {
        check_delta2(delta2)?;
        Ok(SpotParams { delta2, k_star })
    }

    pub fn delta2(&self) -> f64 {
        self.delta2
    }

    pub fn k_star(&self) -> u32 {
        self.k_star
    }

    /// Worst-case number of measurements of one spot call.
    pub fn cost_cap(&self) -> u64 {
        2 * (self.k_star as u64 + 1)
    }
}

fn check_delta2(delta2: f64) -> Result<()> {
    if delta2 > 0.0 && delta2 < 1.0 {
        Ok(())
    } else {
        param(format!("delta2 must lie in (0,1), got {delta2}"))
    }
}

/// Bucket count of shrink step `k`:
/// `ceil(2^(8 * (9/8)^k + k + 2) / delta2)`.
pub fn d_k(k: u32, delta2: f64) -> Result<u64> {
    check_delta2(delta2)?;
    let exponent = 8.0 * (9.0f64 / 8.0).powi(k as i32) + k as f64 + 2.0;
    if exponent - delta2.log2() > MAX_SCHEDULE_EXPONENT {
        return param(format!("shrink schedule overflows at depth {k}"));
    }
    Ok(ceil_tol(exponent.exp2() / delta2) as u64)
}

/// Iteration depth `max{0, ceil(log_{9/8}(log2(ceil(ratio)) / 8))}`.
pub fn k_star(ratio: f64) -> Result<u32> {
    if !(ratio >= 1.0) || !ratio.is_finite() {
        return param(format!("ratio must be >= 1, got {ratio}"));
    }
    let x = ratio.ceil().log2() / 8.0;
    if x <= 1.0 {
        return Ok(0);
    }
    Ok(ceil_tol(x.ln() / (9.0f64 / 8.0).ln()) as u32)
}

/// Heavy-hitter constant `gamma = 1025 * sqrt(2 ln(16/delta2)) / delta2`
/// under which spot succeeds with probability `>= 1 - delta2`.
pub fn hh_constant_spot(delta2: f64) -> Result<f64> {
    check_delta2(delta2)?;
    Ok(1025.0 * (2.0 * (16.0 / delta2).ln()).sqrt() / delta2)
}

/// One shrink step on the candidate set `set` (ascending) with labels
/// `labels[t]` in `1..=buckets` for `set[t]`.
///
/// Measures `y1 = sum g_i x_i` and `y2 = sum g_i H_i x_i` with i.i.d. standard
/// Gaussians `g_i`, rounds `y2 / y1` (ties away from zero) to a label `r`, and
/// returns the candidates labelled `r`. Returns the empty set when `y1 = 0` or
/// `r` is not a valid label. An empty `set` returns immediately at zero cost.
pub fn shrink(
    oracle: &mut MeasurementOracle,
    set: &[usize],
    labels: &[u64],
    buckets: u64,
    rng: &mut RngStream,
) -> Result<Vec<usize>> {
    if labels.len() != set.len() {
        return crate::error::dim(format!(
            "{} labels for {} candidates",
            labels.len(),
            set.len()
        ));
    }
    if set.is_empty() {
        return Ok(Vec::new());
    }
    let gauss: Vec<f64> = set.iter().map(|_| rng.sample(StandardNormal)).collect();
    let weighted: Vec<f64> = gauss
        .iter()
        .zip(labels)
        .map(|(g, &h)| g * h as f64)
        .collect();
    let f1 = LinearFunctional::new(set.to_vec(), gauss)?;
    let f2 = LinearFunctional::new(set.to_vec(), weighted)?;
    let (y1, y2) = oracle.staged(Stage::Spot, |o| -> Result<(f64, f64)> {
        Ok((o.measure(&f1)?, o.measure(&f2)?))
    })?;
    if y1 == 0.0 {
        return Ok(Vec::new());
    }
    let r = (y2 / y1).round();
    if !(r >= 1.0 && r <= buckets as f64) {
        return Ok(Vec::new());
    }
    let r = r as u64;
    Ok(set
        .iter()
        .zip(labels)
        .filter_map(|(&i, &h)| (h == r).then_some(i))
        .collect())
}

/// Finds at most one dominant coordinate of `bucket` (ascending indices).
pub fn spot(
    oracle: &mut MeasurementOracle,
    bucket: &[usize],
    params: SpotParams,
    rng: &mut RngStream,
) -> Result<Option<usize>> {
    spot_inner(oracle, bucket, params, rng, None)
}

/// Like [`spot`] but also returns the chain `S_0 ⊇ S_1 ⊇ ...` of candidate
/// sets it went through (starting with the input bucket).
pub fn spot_traced(
    oracle: &mut MeasurementOracle,
    bucket: &[usize],
    params: SpotParams,
    rng: &mut RngStream,
) -> Result<(Option<usize>, Vec<Vec<usize>>)> {
    let mut chain = Vec::new();
    let out = spot_inner(oracle, bucket, params, rng, Some(&mut chain))?;
    Ok((out, chain))
}

fn spot_inner(
    oracle: &mut MeasurementOracle,
    bucket: &[usize],
    params: SpotParams,
    rng: &mut RngStream,
    mut chain: Option<&mut Vec<Vec<usize>>>,
) -> Result<Option<usize>> {
    let mut record = |s: &[usize]| {
        if let Some(c) = chain.as_deref_mut() {
            c.push(s.to_vec());
        }
    };
    record(bucket);
    if bucket.len() <= 1 {
        return Ok(bucket.first().copied());
    }
    let m = oracle.dim();
    let mut set = bucket.to_vec();
    for k in 0..params.k_star {
        let buckets = d_k(k, params.delta2)?;
        let hash = PairwiseHash::draw(m, buckets, rng)?;
        let labels: Vec<u64> = set.iter().map(|&i| hash.label(i)).collect();
        set = shrink(oracle, &set, &labels, buckets, rng)?;
        record(&set);
        if set.len() <= 1 {
            return Ok(set.first().copied());
        }
    }
    if set.len() as u64 > d_k(params.k_star, params.delta2)? {
        return Ok(None);
    }
    let labels: Vec<u64> = (1..=set.len() as u64).collect();
    let out = shrink(oracle, &set, &labels, set.len() as u64, rng)?;
    record(&out);
    debug_assert!(out.len() <= 1);
    Ok(out.first().copied())
}
