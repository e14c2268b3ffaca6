//! One detection pass: equi-hash the coordinates into `D` buckets, optionally
//! precondition each bucket, and spot one candidate per bucket.
//!
//! With the bucket counts below, every coordinate with `|x_j| >= eps` is
//! returned with probability at least 1/2 whenever `||x||_p <= 1`.

use std::fmt;
use std::str::FromStr;

use crate::error::{param, Error, Result};
use crate::hashing::equi_hash;
use crate::numeric::ceil_u64;
use crate::oracle::MeasurementOracle;
use crate::precondition::{precond, precond_k_for};
use crate::rng::RngStream;
use crate::spotting::{hh_constant_spot, k_star, spot, SpotParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Variant {
    /// Hashing followed directly by spot (`delta2 = 1/3`).
    Basic,
    /// Hashing, sign preconditioning, then spot (`delta2 = 1/4`).
    #[default]
    Preconditioned,
}

impl Variant {
    pub fn delta2(self) -> f64 {
        match self {
            Variant::Basic => 1.0 / 3.0,
            Variant::Preconditioned => 0.25,
        }
    }

    /// Failure probability allowed for preconditioning.
    pub const PRECOND_DELTA1: f64 = 0.2;

    /// Number of sign measurements per bucket (0 for the basic variant).
    pub fn precond_rows(self) -> usize {
        match self {
            Variant::Basic => 0,
            Variant::Preconditioned => precond_k_for(
                hh_constant_spot(self.delta2()).expect("constant delta2"),
                Self::PRECOND_DELTA1,
            )
            .expect("constant parameters"),
        }
    }

    /// Constant `C_p` in the bucket count `C_p * eps^-p` (`p <= 2`).
    pub fn bucket_constant(self, p: f64) -> f64 {
        match self {
            Variant::Basic => 4.0 * hh_constant_spot(self.delta2()).expect("constant").powf(p),
            Variant::Preconditioned => 6.0 * 5f64.powf(p / 2.0),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Basic => "basic",
            Variant::Preconditioned => "precond",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(Variant::Basic),
            "precond" | "preconditioned" => Ok(Variant::Preconditioned),
            other => param(format!("unknown variant {other:?} (basic|precond)")),
        }
    }
}

fn check_common(p: f64, eps: f64, m: usize) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return param(format!("p must lie in [1, inf), got {p}"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return param(format!("eps must lie in (0,1), got {eps}"));
    }
    if m == 0 {
        return param("m must be >= 1");
    }
    Ok(())
}

/// Bucket count of the basic pass, capped at `m`.
pub fn discover_d_basic(p: f64, eps: f64, m: usize) -> Result<usize> {
    check_common(p, eps, m)?;
    let raw = if p <= 2.0 {
        Variant::Basic.bucket_constant(p) * eps.powf(-p)
    } else {
        75_645_000.0 * 48f64.ln() * (m as f64).powf(1.0 - 2.0 / p) * eps.powi(-2)
    };
    Ok((ceil_u64(raw) as usize).clamp(1, m))
}

/// Bucket count of the preconditioned pass, capped at `m`.
pub fn discover_d_precond(p: f64, eps: f64, m: usize) -> Result<usize> {
    check_common(p, eps, m)?;
    let raw = if p <= 2.0 {
        Variant::Preconditioned.bucket_constant(p) * eps.powf(-p)
    } else {
        30.0 * (m as f64).powf(1.0 - 2.0 / p) * eps.powi(-2)
    };
    Ok((ceil_u64(raw) as usize).clamp(1, m))
}

/// Fully derived parameters of one detection pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscoverConfig {
    pub variant: Variant,
    pub m: usize,
    pub buckets: usize,
    pub spot: SpotParams,
    pub precond_rows: usize,
}

impl DiscoverConfig {
    /// Parameters for sensitivity `eps` under `||x||_p <= 1`.
    pub fn new(variant: Variant, p: f64, eps: f64, m: usize) -> Result<Self> {
        let buckets = match variant {
            Variant::Basic => discover_d_basic(p, eps, m)?,
            Variant::Preconditioned => discover_d_precond(p, eps, m)?,
        };
        Self::with_buckets(variant, m, buckets)
    }

    /// Parameters for an explicit bucket count `1 <= buckets <= m`.
    pub fn with_buckets(variant: Variant, m: usize, buckets: usize) -> Result<Self> {
        if buckets == 0 || buckets > m {
            return param(format!("need 1 <= D <= m, got D={buckets}, m={m}"));
        }
        let depth = k_star(m.div_ceil(buckets) as f64)?;
        Ok(DiscoverConfig {
            variant,
            m,
            buckets,
            spot: SpotParams::new(variant.delta2(), depth)?,
            precond_rows: variant.precond_rows(),
        })
    }

    pub fn k_star(&self) -> u32 {
        self.spot.k_star()
    }

    /// `D * 2(k*+1)` (basic) or `D * (k + 2 + 2k*)` (preconditioned).
    pub fn cost_cap(&self) -> u64 {
        self.buckets as u64 * (self.precond_rows as u64 + self.spot.cost_cap())
    }
}

/// Runs one pass and returns the discovered coordinates, ascending.
///
/// Buckets are processed in label order; empty buckets are skipped. The hash,
/// each bucket's preconditioning, and each bucket's spot call draw from
/// separately labelled forks of `rng`.
pub fn discover(
    oracle: &mut MeasurementOracle,
    cfg: &DiscoverConfig,
    rng: &RngStream,
) -> Result<Vec<usize>> {
    if oracle.dim() != cfg.m {
        return crate::error::dim(format!(
            "config for m={} used on dimension {}",
            cfg.m,
            oracle.dim()
        ));
    }
    let hash = equi_hash(cfg.m, cfg.buckets, &mut rng.fork("hash"))?;
    let mut found = Vec::new();
    for (d, bucket) in hash.partition().iter().enumerate() {
        if bucket.is_empty() {
            continue;
        }
        let candidates = match cfg.variant {
            Variant::Basic => bucket.to_vec(),
            Variant::Preconditioned => precond(
                oracle,
                bucket,
                cfg.precond_rows,
                &mut rng.fork(format!("precond/{d}")),
            )?,
        };
        let hit = if candidates.len() <= 1 {
            candidates.first().copied()
        } else {
            spot(oracle, &candidates, cfg.spot, &mut rng.fork(format!("spot/{d}")))?
        };
        found.extend(hit);
    }
    found.sort_unstable();
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Vector;

    #[test]
    fn basic_bucket_counts() {
        // 4 * 3075 sqrt(2 ln 48) / 0.1
        let gamma = 3075.0 * (2.0 * 48f64.ln()).sqrt();
        assert_eq!(discover_d_basic(1.0, 0.1, 1 << 30).unwrap(), 342_250);
        assert_eq!(
            discover_d_basic(1.0, 0.1, 1 << 30).unwrap(),
            (40.0 * gamma).ceil() as usize
        );
        let d2 = discover_d_basic(2.0, 0.5, usize::MAX >> 1).unwrap() as f64;
        assert!((d2 - 16.0 * gamma * gamma).abs() <= 1.0);
        assert!((d2 - 1.171e9).abs() < 1e6);
        assert_eq!(discover_d_basic(2.0, 0.5, 1000).unwrap(), 1000);
        let d4 = discover_d_basic(4.0, 0.5, 1 << 20).unwrap();
        assert_eq!(d4, 1 << 20); // capped
        let raw = 75_645_000.0 * 48f64.ln() * 1024.0 * 4.0;
        assert!(raw > (1u64 << 20) as f64);
        // m^(1/2) only stops dominating the cap around m = 2^60
        let big = discover_d_basic(4.0, 0.5, 1 << 62).unwrap() as f64;
        assert!((big / (raw * (1u64 << 21) as f64) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn precond_bucket_counts() {
        assert_eq!(discover_d_precond(2.0, 0.1, 1 << 20).unwrap(), 3000);
        assert_eq!(discover_d_precond(1.0, 0.5, 1 << 20).unwrap(), 27);
        assert_eq!(discover_d_precond(1.0, 1.0 - 1e-12, 1 << 20).unwrap(), 14);
        assert_eq!(discover_d_precond(4.0, 0.5, 1 << 20).unwrap(), 30 * 1024 * 4);
        assert!(discover_d_precond(1.0, 0.0, 10).is_err());
        assert!(discover_d_precond(0.9, 0.5, 10).is_err());
    }

    #[test]
    fn config_derivation() {
        let cfg = DiscoverConfig::new(Variant::Preconditioned, 1.0, 0.25, 1 << 14).unwrap();
        assert_eq!(cfg.buckets, 54);
        assert_eq!(cfg.precond_rows, 701);
        assert_eq!(cfg.spot.delta2(), 0.25);
        assert_eq!(cfg.k_star(), k_star((16384usize.div_ceil(54)) as f64).unwrap());
        assert_eq!(cfg.cost_cap(), 54 * (703 + 2 * cfg.k_star() as u64));

        let basic = DiscoverConfig::with_buckets(Variant::Basic, 4096, 16).unwrap();
        assert_eq!(basic.precond_rows, 0);
        assert_eq!(basic.k_star(), 0);
        assert_eq!(basic.cost_cap(), 16 * 2);
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("basic".parse::<Variant>().unwrap(), Variant::Basic);
        assert_eq!("precond".parse::<Variant>().unwrap(), Variant::Preconditioned);
        assert!("other".parse::<Variant>().is_err());
        assert_eq!(Variant::Preconditioned.to_string(), "precond");
    }

    #[test]
    fn one_sparse_is_always_found() {
        let m = 5000;
        let root = RngStream::new(11, "discover");
        for variant in [Variant::Basic, Variant::Preconditioned] {
            let cfg = DiscoverConfig::with_buckets(variant, m, 20).unwrap();
            for t in 0..40 {
                let j = (t * 131 + 7) % m;
                let mut x = vec![0.0; m];
                x[j] = -0.3;
                let mut o = MeasurementOracle::new(Vector::new(x).unwrap());
                let found = discover(&mut o, &cfg, &root.fork(t.to_string())).unwrap();
                assert!(found.contains(&j), "{variant} {t}");
                assert!(found.len() <= cfg.buckets);
                assert!(o.cost() <= cfg.cost_cap());
            }
        }
    }

    #[test]
    fn zero_vector_returns_subset() {
        let m = 300;
        let cfg = DiscoverConfig::with_buckets(Variant::Preconditioned, m, 10).unwrap();
        let mut o = MeasurementOracle::new(Vector::zeros(m).unwrap());
        let found = discover(&mut o, &cfg, &RngStream::new(1, "z")).unwrap();
        assert!(found.iter().all(|&j| j < m));
        assert_eq!(o.cost(), 10 * 701 + o.cost_in(crate::oracle::Stage::Spot));
    }

    #[test]
    fn dimension_mismatch() {
        let cfg = DiscoverConfig::with_buckets(Variant::Basic, 10, 2).unwrap();
        let mut o = MeasurementOracle::new(Vector::zeros(11).unwrap());
        assert!(discover(&mut o, &cfg, &RngStream::new(1, "d")).is_err());
    }
}
