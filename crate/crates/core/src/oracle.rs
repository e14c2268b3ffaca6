//! Hidden vectors, linear functionals, and the cost-counting measurement oracle.
//!
//! Coordinates are 0-based throughout the crate. An algorithm never sees the
//! hidden vector directly: every piece of information it obtains is the value
//! of a linear functional, and each value costs one unit on the oracle's
//! counter. Reading a single entry is the coordinate functional `e_j` and is
//! charged the same way.

use std::ops::Index;

use crate::error::{dim, param, Result};

/// A finite real vector of length `m >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return dim("vector must have length >= 1");
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return param(format!("entry {i} is not finite"));
        }
        Ok(Vector(entries))
    }

    pub fn zeros(m: usize) -> Result<Self> {
        Vector::new(vec![0.0; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn scaled(&self, t: f64) -> Result<Vector> {
        Vector::new(self.0.iter().map(|v| t * v).collect())
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        if self.len() != other.len() {
            return dim(format!("lengths {} and {}", self.len(), other.len()));
        }
        Vector::new(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn nonzeros(&self) -> usize {
        self.0.iter().filter(|v| **v != 0.0).count()
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, j: usize) -> &f64 {
        &self.0[j]
    }
}

/// An extended-real norm index `p` in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormIndex {
    Finite(f64),
    Infinity,
}

impl From<f64> for NormIndex {
    fn from(p: f64) -> Self {
        if p.is_infinite() && p > 0.0 {
            NormIndex::Infinity
        } else {
            NormIndex::Finite(p)
        }
    }
}

/// The classical `l_p` norm of a slice.
pub fn lp_norm_slice(v: &[f64], p: impl Into<NormIndex>) -> Result<f64> {
    match p.into() {
        NormIndex::Infinity => Ok(v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))),
        NormIndex::Finite(p) if p.is_nan() || p < 1.0 => param(format!("norm index {p} < 1")),
        NormIndex::Finite(p) if p == 1.0 => Ok(v.iter().map(|x| x.abs()).sum()),
        NormIndex::Finite(p) if p == 2.0 => {
            // scaled to avoid overflow/underflow of the squares
            let scale = v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
            if scale == 0.0 {
                return Ok(0.0);
            }
            let s: f64 = v.iter().map(|x| (x / scale) * (x / scale)).sum();
            Ok(scale * s.sqrt())
        }
        NormIndex::Finite(p) => {
            let scale = v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
            if scale == 0.0 {
                return Ok(0.0);
            }
            let s: f64 = v.iter().map(|x| (x.abs() / scale).powf(p)).sum();
            Ok(scale * s.powf(1.0 / p))
        }
    }
}

pub fn lp_norm(v: &Vector, p: impl Into<NormIndex>) -> Result<f64> {
    lp_norm_slice(v.as_slice(), p)
}

/// `x*_K`: entries of `v` on `k`, zero elsewhere.
pub fn restrict(v: &Vector, k: &[usize]) -> Result<Vector> {
    let mut out = vec![0.0; v.len()];
    for &j in k {
        if j >= v.len() {
            return dim(format!("index {j} out of range for dimension {}", v.len()));
        }
        out[j] = v[j];
    }
    Vector::new(out)
}

/// A batch of linear functionals sharing one sorted support.
///
/// The oracle walks the support once and hands every nonzero hidden entry to
/// [`accumulate`](MeasurementBlock::accumulate), which adds its contribution to
/// each row. Evaluating a block with `rows()` rows costs `rows()` units.
pub trait MeasurementBlock {
    /// Strictly increasing coordinate indices.
    fn support(&self) -> &[usize];

    fn rows(&self) -> usize;

    /// `acc[r] += coefficient(r, pos) * value` for every row `r`.
    fn accumulate(&self, pos: usize, value: f64, acc: &mut [f64]);
}

/// A single functional `f(x) = sum_i c_i x_{s_i}` with sparse support.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFunctional {
    support: Vec<usize>,
    coefficients: Vec<f64>,
}

impl LinearFunctional {
    pub fn new(support: Vec<usize>, coefficients: Vec<f64>) -> Result<Self> {
        if support.len() != coefficients.len() {
            return dim(format!(
                "support has {} indices but {} coefficients",
                support.len(),
                coefficients.len()
            ));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return param("support indices must be strictly increasing");
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return param("coefficients must be finite");
        }
        Ok(LinearFunctional {
            support,
            coefficients,
        })
    }

    /// The coordinate functional `e_j`.
    pub fn coordinate(j: usize) -> Self {
        LinearFunctional {
            support: vec![j],
            coefficients: vec![1.0],
        }
    }

    /// Builds a functional from `(index, coefficient)` pairs in any order.
    /// Repeated indices are summed.
    pub fn from_pairs(mut pairs: Vec<(usize, f64)>) -> Result<Self> {
        pairs.sort_by_key(|&(i, _)| i);
        let mut support: Vec<usize> = Vec::with_capacity(pairs.len());
        let mut coefficients: Vec<f64> = Vec::with_capacity(pairs.len());
        for (i, c) in pairs {
            if support.last() == Some(&i) {
                *coefficients.last_mut().unwrap() += c;
            } else {
                support.push(i);
                coefficients.push(c);
            }
        }
        LinearFunctional::new(support, coefficients)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// The same functional scaled by `t`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        LinearFunctional::new(
            self.support.clone(),
            self.coefficients.iter().map(|c| t * c).collect(),
        )
    }

    /// `self + other`, merged over the union of supports.
    pub fn plus(&self, other: &LinearFunctional) -> Result<Self> {
        let pairs = self
            .support
            .iter()
            .copied()
            .zip(self.coefficients.iter().copied())
            .chain(
                other
                    .support
                    .iter()
                    .copied()
                    .zip(other.coefficients.iter().copied()),
            )
            .collect();
        LinearFunctional::from_pairs(pairs)
    }
}

impl MeasurementBlock for LinearFunctional {
    fn support(&self) -> &[usize] {
        &self.support
    }

    fn rows(&self) -> usize {
        1
    }

    fn accumulate(&self, pos: usize, value: f64, acc: &mut [f64]) {
        acc[0] += self.coefficients[pos] * value;
    }
}

/// Attribution tag for measurements, used by cost audits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Unlabelled,
    Spot,
    Precondition,
    DirectRead,
    Sketch,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::Unlabelled,
        Stage::Spot,
        Stage::Precondition,
        Stage::DirectRead,
        Stage::Sketch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Unlabelled => "unlabelled",
            Stage::Spot => "spot",
            Stage::Precondition => "precondition",
            Stage::DirectRead => "direct_read",
            Stage::Sketch => "sketch",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

/// Holds the hidden vector and counts every functional evaluation.
#[derive(Debug, Clone)]
pub struct MeasurementOracle {
    hidden: Vector,
    cost: u64,
    stage: Stage,
    by_stage: [u64; 5],
}

impl MeasurementOracle {
    pub fn new(hidden: Vector) -> Self {
        MeasurementOracle {
            hidden,
            cost: 0,
            stage: Stage::Unlabelled,
            by_stage: [0; 5],
        }
    }

    pub fn dim(&self) -> usize {
        self.hidden.len()
    }

    /// Evaluates one functional; costs 1.
    pub fn measure(&mut self, f: &LinearFunctional) -> Result<f64> {
        Ok(self.measure_block(f)?[0])
    }

    /// Evaluates every row of `block`; costs `block.rows()`.
    pub fn measure_block<B: MeasurementBlock + ?Sized>(&mut self, block: &B) -> Result<Vec<f64>> {
        let support = block.support();
        if let Some(&last) = support.last() {
            if last >= self.dim() {
                return dim(format!(
                    "functional touches index {last} but dimension is {}",
                    self.dim()
                ));
            }
        }
        let mut acc = vec![0.0; block.rows()];
        let hidden = self.hidden.as_slice();
        for (pos, &j) in support.iter().enumerate() {
            let v = hidden[j];
            // zero entries contribute exactly nothing to the sum
            if v != 0.0 {
                block.accumulate(pos, v, &mut acc);
            }
        }
        self.charge(block.rows() as u64);
        Ok(acc)
    }

    /// Direct evaluation `x_j`; costs 1 like any other functional.
    pub fn read_entry(&mut self, j: usize) -> Result<f64> {
        if j >= self.dim() {
            return dim(format!("index {j} out of range for dimension {}", self.dim()));
        }
        self.charge(1);
        Ok(self.hidden[j])
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }

    pub fn reset_cost(&mut self) {
        self.cost = 0;
        self.by_stage = [0; 5];
    }

    /// Sets the attribution stage for subsequent measurements and returns
    /// the previous one.
    pub fn enter_stage(&mut self, stage: Stage) -> Stage {
        std::mem::replace(&mut self.stage, stage)
    }

    pub fn cost_in(&self, stage: Stage) -> u64 {
        self.by_stage[stage.slot()]
    }

    /// Runs `f` with measurements attributed to `stage`.
    pub fn staged<T>(&mut self, stage: Stage, f: impl FnOnce(&mut Self) -> T) -> T {
        let prev = self.enter_stage(stage);
        let out = f(self);
        self.enter_stage(prev);
        out
    }

    fn charge(&mut self, units: u64) {
        self.cost += units;
        self.by_stage[self.stage.slot()] += units;
    }

    /// Unmetered access for error evaluation in experiment drivers and tests.
    /// Algorithms must not call this.
    pub fn reveal(&self) -> &Vector {
        &self.hidden
    }
}
