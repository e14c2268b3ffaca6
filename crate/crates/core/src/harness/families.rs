//! Test vectors in the unit `l_p` ball.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Exp1, Gamma};

use crate::error::{param, Error, Result};
use crate::oracle::{lp_norm_slice, Vector};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VectorFamily {
    /// `k` entries `+-k^(-1/p)` at random positions.
    Spikes { k: usize },
    /// Magnitudes `ratio^i` at random positions and signs, normalized.
    Geometric { ratio: f64 },
    /// Half the mass on `k` equal spikes, half on a tail decaying like
    /// `i^(-decay)`.
    SpikePlusTail { k: usize, decay: f64 },
    /// Uniform sample from the unit ball.
    UniformBall,
    Zero,
    /// `2k+1` entries equal to `(2k+1)^(-1/p)`; no `k`-sparse vector is close.
    DenoiseAdversarial { k: usize },
}

fn need_k(k: usize, m: usize) -> Result<()> {
    if k == 0 || k > m {
        return param(format!("need 1 <= k <= m, got k={k}, m={m}"));
    }
    Ok(())
}

fn sign(rng: &mut RngStream) -> f64 {
    if rng.random::<bool>() {
        -1.0
    } else {
        1.0
    }
}

fn normalize(mut v: Vec<f64>, p: f64) -> Vec<f64> {
    let n = lp_norm_slice(&v, p).expect("p >= 1");
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    v
}

impl VectorFamily {
    pub fn generate(&self, p: f64, m: usize, rng: &mut RngStream) -> Result<Vector> {
        if !(p >= 1.0 && p.is_finite()) {
            return param(format!("p must lie in [1, inf), got {p}"));
        }
        if m == 0 {
            return param("m must be >= 1");
        }
        let mut x = vec![0.0; m];
        match *self {
            VectorFamily::Spikes { k } => {
                need_k(k, m)?;
                let a = (k as f64).powf(-1.0 / p);
                for j in sample(rng, m, k) {
                    x[j] = sign(rng) * a;
                }
            }
            VectorFamily::Geometric { ratio } => {
                if !(ratio > 0.0 && ratio < 1.0) {
                    return param(format!("ratio must lie in (0,1), got {ratio}"));
                }
                let mut mag = 1.0;
                let mut vals = Vec::new();
                // entries below 1e-16 of the peak are lost in rounding anyway
                while vals.len() < m && mag > 1e-16 {
                    vals.push(mag);
                    mag *= ratio;
                }
                for (j, v) in sample(rng, m, vals.len()).into_iter().zip(vals) {
                    x[j] = sign(rng) * v;
                }
                x = normalize(x, p);
            }
            VectorFamily::SpikePlusTail { k, decay } => {
                need_k(k, m)?;
                if !(decay > 0.0 && decay.is_finite()) {
                    return param(format!("tail decay must be positive, got {decay}"));
                }
                let order = sample(rng, m, m).into_vec();
                let a = (0.5 / k as f64).powf(1.0 / p);
                for &j in &order[..k] {
                    x[j] = sign(rng) * a;
                }
                let tail: Vec<f64> = (1..=m - k).map(|i| (i as f64).powf(-decay)).collect();
                let scale = 0.5f64.powf(1.0 / p) / lp_norm_slice(&tail, p).unwrap_or(1.0).max(f64::MIN_POSITIVE);
                for (&j, t) in order[k..].iter().zip(tail) {
                    x[j] = sign(rng) * t * scale;
                }
                x = normalize(x, p);
            }
            VectorFamily::UniformBall => {
                // g_i with density ~ exp(-|t|^p), w ~ Exp(1):
                // g / (||g||_p^p + w)^(1/p) is uniform on the ball
                let gamma = Gamma::new(1.0 / p, 1.0).expect("valid shape");
                let mut total = 0.0;
                for v in x.iter_mut() {
                    let e: f64 = rng.sample(gamma);
                    total += e;
                    *v = sign(rng) * e.powf(1.0 / p);
                }
                let w: f64 = rng.sample(Exp1);
                let s = (total + w).powf(1.0 / p);
                x.iter_mut().for_each(|v| *v /= s);
            }
            VectorFamily::Zero => {}
            VectorFamily::DenoiseAdversarial { k } => {
                let n = 2 * k + 1;
                need_k(n, m)?;
                let a = (n as f64).powf(-1.0 / p);
                for j in sample(rng, m, n) {
                    x[j] = a;
                }
            }
        }
        Vector::new(x)
    }
}

/// Draws one vector of `family` in the unit `l_p` ball of dimension `m`.
pub fn gen_vector(family: &VectorFamily, p: f64, m: usize, rng: &mut RngStream) -> Result<Vector> {
    family.generate(p, m, rng)
}

impl fmt::Display for VectorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorFamily::Spikes { k } => write!(f, "spikes:{k}"),
            VectorFamily::Geometric { ratio } => write!(f, "geometric:{ratio}"),
            VectorFamily::SpikePlusTail { k, decay } => write!(f, "tail:{k}:{decay}"),
            VectorFamily::UniformBall => f.write_str("ball"),
            VectorFamily::Zero => f.write_str("zero"),
            VectorFamily::DenoiseAdversarial { k } => write!(f, "adversarial:{k}"),
        }
    }
}

impl FromStr for VectorFamily {
    type Err = Error;

    /// `spikes:K`, `geometric:R`, `tail:K:DECAY`, `ball`, `zero`, `adversarial:K`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |i: usize| -> Result<&str> {
            parts
                .get(i)
                .copied()
                .ok_or_else(|| Error::Parameter(format!("family {s:?} is missing a parameter")))
        };
        let int = |i: usize| -> Result<usize> {
            num(i)?
                .parse()
                .map_err(|_| Error::Parameter(format!("bad integer in family {s:?}")))
        };
        let real = |i: usize| -> Result<f64> {
            num(i)?
                .parse()
                .map_err(|_| Error::Parameter(format!("bad number in family {s:?}")))
        };
        let (fam, arity) = match parts[0] {
            "spikes" => (VectorFamily::Spikes { k: int(1)? }, 2),
            "geometric" => (VectorFamily::Geometric { ratio: real(1)? }, 2),
            "tail" | "spike_plus_tail" => (VectorFamily::SpikePlusTail { k: int(1)?, decay: real(2)? }, 3),
            "ball" | "uniform_ball" => (VectorFamily::UniformBall, 1),
            "zero" => (VectorFamily::Zero, 1),
            "adversarial" | "denoise_adversarial" => (VectorFamily::DenoiseAdversarial { k: int(1)? }, 2),
            other => return param(format!("unknown family {other:?}")),
        };
        if parts.len() != arity {
            return param(format!("family {s:?} takes {} parameter(s)", arity - 1));
        }
        Ok(fam)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::lp_norm;

    #[test]
    fn spikes_have_exact_norm() {
        let mut rng = RngStream::new(1, "f");
        let x = gen_vector(&VectorFamily::Spikes { k: 4 }, 1.0, 8, &mut rng).unwrap();
        assert_eq!(x.nonzeros(), 4);
        assert!(x.as_slice().iter().all(|v| *v == 0.0 || v.abs() == 0.25));
        assert_eq!(lp_norm(&x, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn adversarial_entries() {
        let mut rng = RngStream::new(2, "f");
        let x = gen_vector(&VectorFamily::DenoiseAdversarial { k: 2 }, 1.0, 9, &mut rng).unwrap();
        assert_eq!(x.nonzeros(), 5);
        assert!(x.as_slice().iter().all(|v| *v == 0.0 || *v == 0.2));
        assert!(gen_vector(&VectorFamily::DenoiseAdversarial { k: 2 }, 1.0, 4, &mut rng).is_err());
    }

    #[test]
    fn zero_family() {
        let mut rng = RngStream::new(3, "f");
        let x = gen_vector(&VectorFamily::Zero, 1.5, 6, &mut rng).unwrap();
        assert_eq!(x, Vector::zeros(6).unwrap());
    }

    #[test]
    fn all_families_in_unit_ball() {
        let fams = [
            VectorFamily::Spikes { k: 3 },
            VectorFamily::Geometric { ratio: 0.7 },
            VectorFamily::SpikePlusTail { k: 2, decay: 1.2 },
            VectorFamily::UniformBall,
            VectorFamily::DenoiseAdversarial { k: 3 },
        ];
        for p in [1.0, 1.5, 2.0, 3.0] {
            for (i, fam) in fams.iter().enumerate() {
                for t in 0..20 {
                    let mut rng = RngStream::new(t, format!("{i}"));
                    let x = gen_vector(fam, p, 100, &mut rng).unwrap();
                    assert!(lp_norm(&x, p).unwrap() <= 1.0 + 1e-12, "{fam} p={p}");
                }
            }
        }
    }

    #[test]
    fn ball_is_inside_and_spread() {
        let mut rng = RngStream::new(4, "ball");
        let norms: Vec<f64> = (0..2000)
            .map(|_| lp_norm(&gen_vector(&VectorFamily::UniformBall, 1.0, 3, &mut rng).unwrap(), 1.0).unwrap())
            .collect();
        // radius of a uniform point in a 3-dim ball: P(r <= 1/2) = 1/8
        let frac = norms.iter().filter(|r| **r <= 0.5).count() as f64 / 2000.0;
        assert!((frac - 0.125).abs() < 0.03, "{frac}");
        assert!(norms.iter().all(|r| *r < 1.0));
    }

    #[test]
    fn parse_round_trip() {
        for s in ["spikes:4", "geometric:0.5", "tail:3:1.5", "ball", "zero", "adversarial:2"] {
            let f: VectorFamily = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!("spikes".parse::<VectorFamily>().is_err());
        assert!("zero:1".parse::<VectorFamily>().is_err());
        assert!("nope".parse::<VectorFamily>().is_err());
    }
}
