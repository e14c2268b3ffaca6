//! Methods under test and Monte Carlo error estimation.

use std::fmt;

use crate::adaptive::{self, AdaptivePlan};
use crate::discover::Variant;
use crate::error::{param, Error, Result};
use crate::nonadaptive::{self, countsketch_params};
use crate::oracle::{lp_norm_slice, MeasurementOracle, NormIndex, Stage, Vector};
use crate::rng::RngStream;

use super::families::VectorFamily;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Returns 0 without measuring.
    Zero,
    /// Reads every entry.
    ReadAll,
    /// Multi-level adaptive scheme; `reps: None` uses the default count.
    Adaptive { levels: u32, reps: Option<u32>, variant: Variant },
    LinSketch { n: usize },
    DenoisedLinSketch { n: usize },
    CountSketch { levels: u32 },
    DenoisedCountSketch { levels: u32 },
}

/// Method families compared at a common budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Zero,
    Adaptive(Variant),
    LinSketch,
    CountSketch,
}

impl MethodKind {
    pub const COMPARED: [MethodKind; 5] = [
        MethodKind::Zero,
        MethodKind::Adaptive(Variant::Basic),
        MethodKind::Adaptive(Variant::Preconditioned),
        MethodKind::LinSketch,
        MethodKind::CountSketch,
    ];
}

impl Method {
    /// The strongest method of `kind` whose cost cap fits in `budget`; falls
    /// back to [`Method::Zero`] when nothing fits.
    pub fn for_budget(kind: MethodKind, budget: u64, m: usize, p: f64, q: f64) -> Result<Method> {
        let method = match kind {
            MethodKind::Zero => Method::Zero,
            MethodKind::Adaptive(variant) => {
                match adaptive::choose_l_for_budget(budget, m, p, q, variant)? {
                    0 => Method::Zero,
                    levels => Method::Adaptive { levels, reps: None, variant },
                }
            }
            MethodKind::LinSketch if budget == 0 => Method::Zero,
            MethodKind::LinSketch => Method::DenoisedLinSketch { n: budget as usize },
            MethodKind::CountSketch => {
                let mut best = None;
                for l in 0..=40 {
                    let (r, g) = countsketch_params(l, m)?;
                    if (r * g) as u64 > budget {
                        break;
                    }
                    best = Some(l);
                }
                best.map_or(Method::Zero, |levels| Method::DenoisedCountSketch { levels })
            }
        };
        Ok(method)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Zero => "zero",
            Method::ReadAll => "read_all",
            Method::Adaptive { .. } => "adaptive",
            Method::LinSketch { .. } => "linsketch",
            Method::DenoisedLinSketch { .. } => "denoised_linsketch",
            Method::CountSketch { .. } => "countsketch",
            Method::DenoisedCountSketch { .. } => "denoised_countsketch",
        }
    }

    pub fn variant(&self) -> Option<Variant> {
        match self {
            Method::Adaptive { variant, .. } => Some(*variant),
            _ => None,
        }
    }

    /// Number of levels `L`, where the method has one.
    pub fn levels(&self) -> Option<u32> {
        match self {
            Method::Adaptive { levels, .. }
            | Method::CountSketch { levels }
            | Method::DenoisedCountSketch { levels } => Some(*levels),
            _ => None,
        }
    }

    /// Resolves all derived parameters for dimension `m`.
    pub fn prepare(&self, m: usize, p: f64, q: f64) -> Result<PreparedMethod> {
        if m == 0 {
            return param("m must be >= 1");
        }
        let mut plan = None;
        let (cap, reps) = match *self {
            Method::Zero => (0, 0),
            Method::ReadAll => (m as u64, 0),
            Method::Adaptive { levels, reps, variant } => {
                let pl = match reps {
                    Some(r) => AdaptivePlan::with_repetitions(m, p, q, levels, r, variant)?,
                    None => AdaptivePlan::new(m, p, q, levels, variant)?,
                };
                let out = (pl.cost_cap(), pl.repetitions);
                plan = Some(pl);
                out
            }
            Method::LinSketch { n } | Method::DenoisedLinSketch { n } => {
                if n == 0 {
                    return param("linsketch needs n >= 1");
                }
                (n as u64, 0)
            }
            Method::CountSketch { levels } | Method::DenoisedCountSketch { levels } => {
                let (r, g) = countsketch_params(levels, m)?;
                ((r * g) as u64, r as u32)
            }
        };
        Ok(PreparedMethod { method: *self, m, p, plan, cap, reps })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Adaptive { levels, reps, variant } => {
                write!(f, "adaptive[{variant}, L={levels}")?;
                if let Some(r) = reps {
                    write!(f, ", R={r}")?;
                }
                f.write_str("]")
            }
            Method::LinSketch { n } | Method::DenoisedLinSketch { n } => write!(f, "{}[n={n}]", self.name()),
            Method::CountSketch { levels } | Method::DenoisedCountSketch { levels } => {
                write!(f, "{}[L={levels}]", self.name())
            }
            _ => f.write_str(self.name()),
        }
    }
}

/// A method with its parameters resolved for one dimension.
#[derive(Debug, Clone)]
pub struct PreparedMethod {
    method: Method,
    m: usize,
    p: f64,
    plan: Option<AdaptivePlan>,
    cap: u64,
    reps: u32,
}

impl PreparedMethod {
    pub fn method(&self) -> Method {
        self.method
    }

    /// Worst-case number of measurements.
    pub fn cost_cap(&self) -> u64 {
        self.cap
    }

    /// Repetition count `R` (0 where not applicable).
    pub fn reps(&self) -> u32 {
        self.reps
    }

    pub fn plan(&self) -> Option<&AdaptivePlan> {
        self.plan.as_ref()
    }

    pub fn run(&self, oracle: &mut MeasurementOracle, rng: &RngStream) -> Result<Vector> {
        if oracle.dim() != self.m {
            return crate::error::dim(format!("method for m={} used on dimension {}", self.m, oracle.dim()));
        }
        match self.method {
            Method::Zero => Vector::zeros(self.m),
            Method::ReadAll => {
                let prev = oracle.enter_stage(Stage::DirectRead);
                let v = (0..self.m).map(|j| oracle.read_entry(j)).collect::<Result<Vec<_>>>();
                oracle.enter_stage(prev);
                Vector::new(v?)
            }
            Method::Adaptive { .. } => {
                adaptive::approximate(oracle, self.plan.as_ref().expect("prepared plan"), rng)
            }
            Method::LinSketch { n } => nonadaptive::linsketch(oracle, n, rng),
            Method::DenoisedLinSketch { n } => nonadaptive::denoised_linsketch(oracle, n, self.p, rng),
            Method::CountSketch { levels } => {
                let (r, g) = countsketch_params(levels, self.m)?;
                nonadaptive::countsketch(oracle, r, g, rng)
            }
            Method::DenoisedCountSketch { levels } => nonadaptive::denoised_countsketch(oracle, levels, rng),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub method: Method,
    pub family: VectorFamily,
    pub m: usize,
    /// Norm index of the unit ball the inputs are drawn from.
    pub p: f64,
    /// Target norm index; also the exponent of the moment error.
    pub q: f64,
    /// Norm in which each trial's error is measured (defaults to `q`).
    pub error_norm: NormIndex,
    pub trials: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(method: Method, family: VectorFamily, m: usize, p: f64, q: f64, trials: usize, seed: u64) -> Self {
        ExperimentConfig { method, family, m, p, q, error_norm: NormIndex::Finite(q), trials, seed }
    }

    pub fn with_error_norm(mut self, norm: impl Into<NormIndex>) -> Self {
        self.error_norm = norm.into();
        self
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return param("trials must be >= 1");
        }
        if !(self.p >= 1.0 && self.q > self.p && self.q.is_finite()) {
            return param(format!("need 1 <= p < q < inf, got p={}, q={}", self.p, self.q));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorEstimate {
    pub trials: usize,
    pub mean_err: f64,
    /// `(mean err^q)^(1/q)`.
    pub qmoment_err: f64,
    /// Half-width of the normal-approximation 95% interval for `mean_err`.
    pub ci: f64,
    pub mean_cost: f64,
    pub max_cost: u64,
}

impl ErrorEstimate {
    pub fn from_samples(errors: &[f64], costs: &[u64], q: f64) -> Result<Self> {
        let t = errors.len();
        if t == 0 || costs.len() != t {
            return param("need matching, non-empty error and cost samples");
        }
        let tf = t as f64;
        let mean = errors.iter().sum::<f64>() / tf;
        let var = if t > 1 {
            errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (tf - 1.0)
        } else {
            0.0
        };
        let moment = (errors.iter().map(|e| e.powf(q)).sum::<f64>() / tf).powf(1.0 / q);
        Ok(ErrorEstimate {
            trials: t,
            mean_err: mean,
            qmoment_err: moment,
            ci: 1.96 * var.sqrt() / tf.sqrt(),
            mean_cost: costs.iter().sum::<u64>() as f64 / tf,
            max_cost: costs.iter().copied().max().unwrap_or(0),
        })
    }
}

/// Seed stream of trial `t`.
pub fn trial_stream(seed: u64, t: usize) -> RngStream {
    RngStream::new(seed, format!("trial/{t}"))
}

/// Runs `trials` independent trials. Any trial exceeding the method's cost
/// cap aborts with [`Error::CapViolation`].
pub fn estimate_error(cfg: &ExperimentConfig) -> Result<ErrorEstimate> {
    cfg.validate()?;
    let prepared = cfg.method.prepare(cfg.m, cfg.p, cfg.q)?;
    let mut errors = Vec::with_capacity(cfg.trials);
    let mut costs = Vec::with_capacity(cfg.trials);
    for t in 0..cfg.trials {
        let rng = trial_stream(cfg.seed, t);
        let x = cfg.family.generate(cfg.p, cfg.m, &mut rng.fork("vector"))?;
        let mut oracle = MeasurementOracle::new(x);
        let out = prepared.run(&mut oracle, &rng.fork("method"))?;
        if oracle.cost() > prepared.cost_cap() {
            return Err(Error::CapViolation {
                measured: oracle.cost(),
                cap: prepared.cost_cap(),
                context: format!("{} on {} (trial {t})", cfg.method, cfg.family),
            });
        }
        let diff = oracle.reveal().sub(&out)?;
        errors.push(lp_norm_slice(diff.as_slice(), cfg.error_norm)?);
        costs.push(oracle.cost());
    }
    ErrorEstimate::from_samples(&errors, &costs, cfg.q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ci_matches_reference() {
        let e = ErrorEstimate::from_samples(&[1.0, 2.0, 3.0, 4.0], &[1, 2, 3, 10], 2.0).unwrap();
        assert_eq!(e.mean_err, 2.5);
        // sample std sqrt(5/3)
        assert!((e.ci - 1.96 * (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-12);
        assert!((e.qmoment_err - 7.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(e.mean_cost, 4.0);
        assert_eq!(e.max_cost, 10);
        let one = ErrorEstimate::from_samples(&[0.5], &[3], 2.0).unwrap();
        assert_eq!(one.ci, 0.0);
        assert!(ErrorEstimate::from_samples(&[], &[], 2.0).is_err());
    }

    #[test]
    fn read_all_is_exact() {
        let cfg = ExperimentConfig::new(Method::ReadAll, VectorFamily::UniformBall, 50, 1.0, 2.0, 20, 3);
        let e = estimate_error(&cfg).unwrap();
        assert_eq!(e.mean_err, 0.0);
        assert_eq!(e.max_cost, 50);
        assert_eq!(e.mean_cost, 50.0);
    }

    #[test]
    fn adaptive_on_zero_family() {
        let method = Method::Adaptive { levels: 2, reps: None, variant: Variant::Preconditioned };
        let cfg = ExperimentConfig::new(method, VectorFamily::Zero, 300, 1.0, 2.0, 5, 1);
        assert_eq!(estimate_error(&cfg).unwrap().mean_err, 0.0);
    }

    #[test]
    fn zero_method_reports_initial_error() {
        let cfg = ExperimentConfig::new(Method::Zero, VectorFamily::Spikes { k: 4 }, 64, 1.0, 2.0, 10, 1)
            .with_error_norm(1.0);
        let e = estimate_error(&cfg).unwrap();
        assert!((e.mean_err - 1.0).abs() < 1e-12);
        assert_eq!(e.max_cost, 0);
    }

    #[test]
    fn budget_fallback() {
        for kind in MethodKind::COMPARED {
            assert_eq!(Method::for_budget(kind, 0, 1 << 16, 1.0, 2.0).unwrap(), Method::Zero);
        }
        let cs = Method::for_budget(MethodKind::CountSketch, 33 * 64, 1024, 1.0, 2.0).unwrap();
        assert_eq!(cs, Method::DenoisedCountSketch { levels: 2 });
        for kind in MethodKind::COMPARED {
            let m = Method::for_budget(kind, 200_000, 1 << 16, 1.0, 2.0).unwrap();
            assert!(m.prepare(1 << 16, 1.0, 2.0).unwrap().cost_cap() <= 200_000);
        }
    }

    #[test]
    fn invalid_config() {
        let cfg = ExperimentConfig::new(Method::Zero, VectorFamily::Zero, 4, 2.0, 2.0, 1, 0);
        assert!(estimate_error(&cfg).is_err());
        let cfg = ExperimentConfig::new(Method::Zero, VectorFamily::Zero, 4, 1.0, 2.0, 0, 0);
        assert!(estimate_error(&cfg).is_err());
    }
}
