//! Non-adaptive baselines: a Gaussian sketch, CountSketch, and top-k
//! denoising. Every functional is fixed by the rng before the oracle is
//! touched.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{param, Result};
use crate::numeric::{ceil_tol, floor_tol};
use crate::oracle::{LinearFunctional, MeasurementOracle, Stage, Vector};
use crate::rng::RngStream;

fn check_dim(oracle: &MeasurementOracle, m: usize) -> Result<()> {
    if oracle.dim() != m {
        return crate::error::dim(format!("sketch for m={m} used on dimension {}", oracle.dim()));
    }
    Ok(())
}

/// `n x m` matrix of i.i.d. standard normals, generated row by row.
#[derive(Debug, Clone)]
pub struct GaussianSketch {
    m: usize,
    n: usize,
    rng: RngStream,
}

impl GaussianSketch {
    pub fn new(m: usize, n: usize, rng: &RngStream) -> Result<Self> {
        if n == 0 || m == 0 {
            return param(format!("need n, m >= 1, got n={n}, m={m}"));
        }
        Ok(GaussianSketch { m, n, rng: rng.fork("gauss") })
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn row(&self, r: usize) -> Vec<f64> {
        let mut s = self.rng.fork(r.to_string());
        (0..self.m).map(|_| s.sample(StandardNormal)).collect()
    }

    pub fn functional(&self, r: usize) -> LinearFunctional {
        LinearFunctional::new((0..self.m).collect(), self.row(r)).expect("finite gaussians")
    }

    pub fn functionals(&self) -> Vec<LinearFunctional> {
        (0..self.n).map(|r| self.functional(r)).collect()
    }

    /// `(1/n) N^T y`.
    pub fn reconstruct(&self, y: &[f64]) -> Result<Vector> {
        if y.len() != self.n {
            return crate::error::dim(format!("expected {} measurements, got {}", self.n, y.len()));
        }
        let mut z = vec![0.0; self.m];
        for (r, &yr) in y.iter().enumerate() {
            for (zi, a) in z.iter_mut().zip(self.row(r)) {
                *zi += yr * a;
            }
        }
        let inv = 1.0 / self.n as f64;
        z.iter_mut().for_each(|v| *v *= inv);
        Vector::new(z)
    }

    pub fn apply(&self, oracle: &mut MeasurementOracle) -> Result<Vector> {
        check_dim(oracle, self.m)?;
        let prev = oracle.enter_stage(Stage::Sketch);
        let mut z = vec![0.0; self.m];
        let res = (|| {
            for r in 0..self.n {
                let row = self.row(r);
                let f = LinearFunctional::new((0..self.m).collect(), row)?;
                let y = oracle.measure(&f)?;
                for (zi, a) in z.iter_mut().zip(f.coefficients()) {
                    *zi += y * a;
                }
            }
            Ok(())
        })();
        oracle.enter_stage(prev);
        res?;
        let inv = 1.0 / self.n as f64;
        z.iter_mut().for_each(|v| *v *= inv);
        Vector::new(z)
    }
}

/// `(1/n) N^T N x` with exactly `n` measurements.
pub fn linsketch(oracle: &mut MeasurementOracle, n: usize, rng: &RngStream) -> Result<Vector> {
    GaussianSketch::new(oracle.dim(), n, rng)?.apply(oracle)
}

/// `R` independent hash/sign pairs over `G` groups.
#[derive(Debug, Clone)]
pub struct CountSketch {
    m: usize,
    reps: usize,
    groups: usize,
    labels: Vec<u32>,
    negative: Vec<bool>,
}

impl CountSketch {
    pub fn draw(m: usize, reps: usize, groups: usize, rng: &RngStream) -> Result<Self> {
        if reps % 2 == 0 {
            return param(format!("repetitions must be odd, got {reps}"));
        }
        if groups == 0 || groups > u32::MAX as usize || m == 0 {
            return param(format!("need G >= 1 and m >= 1, got G={groups}, m={m}"));
        }
        let mut labels = Vec::with_capacity(reps * m);
        let mut negative = Vec::with_capacity(reps * m);
        for r in 0..reps {
            let mut h = rng.fork(format!("hash/{r}"));
            let mut s = rng.fork(format!("sign/{r}"));
            labels.extend((0..m).map(|_| h.random_range(0..groups as u32)));
            negative.extend((0..m).map(|_| s.random::<bool>()));
        }
        Ok(CountSketch { m, reps, groups, labels, negative })
    }

    pub fn reps(&self) -> usize {
        self.reps
    }

    pub fn groups(&self) -> usize {
        self.groups
    }

    /// Group of coordinate `i` in repetition `r`.
    pub fn label(&self, r: usize, i: usize) -> usize {
        self.labels[r * self.m + i] as usize
    }

    pub fn sign(&self, r: usize, i: usize) -> f64 {
        if self.negative[r * self.m + i] {
            -1.0
        } else {
            1.0
        }
    }

    /// All `R * G` functionals, repetition-major; empty groups give the zero
    /// functional.
    pub fn functionals(&self) -> Vec<LinearFunctional> {
        let mut out = Vec::with_capacity(self.reps * self.groups);
        for r in 0..self.reps {
            let mut supports = vec![Vec::new(); self.groups];
            let mut coeffs = vec![Vec::new(); self.groups];
            for i in 0..self.m {
                let g = self.label(r, i);
                supports[g].push(i);
                coeffs[g].push(self.sign(r, i));
            }
            for (s, c) in supports.into_iter().zip(coeffs) {
                out.push(LinearFunctional::new(s, c).expect("valid group"));
            }
        }
        out
    }

    /// Per-repetition estimates `sigma_ri Y_{r, H_i}` of coordinate `i`.
    pub fn estimates(&self, y: &[f64], i: usize) -> Vec<f64> {
        (0..self.reps)
            .map(|r| self.sign(r, i) * y[r * self.groups + self.label(r, i)])
            .collect()
    }

    /// Median estimator from the `R * G` measurements.
    pub fn estimate(&self, y: &[f64]) -> Result<Vector> {
        if y.len() != self.reps * self.groups {
            return crate::error::dim(format!(
                "expected {} measurements, got {}",
                self.reps * self.groups,
                y.len()
            ));
        }
        let mid = self.reps / 2;
        let z = (0..self.m)
            .map(|i| {
                let mut e = self.estimates(y, i);
                *e.select_nth_unstable_by(mid, f64::total_cmp).1
            })
            .collect();
        Vector::new(z)
    }

    pub fn apply(&self, oracle: &mut MeasurementOracle) -> Result<Vector> {
        check_dim(oracle, self.m)?;
        let fs = self.functionals();
        let y = oracle.staged(Stage::Sketch, |o| {
            fs.iter().map(|f| o.measure(f)).collect::<Result<Vec<_>>>()
        })?;
        self.estimate(&y)
    }
}

pub fn countsketch(
    oracle: &mut MeasurementOracle,
    reps: usize,
    groups: usize,
    rng: &RngStream,
) -> Result<Vector> {
    CountSketch::draw(oracle.dim(), reps, groups, rng)?.apply(oracle)
}

/// `(R, G)` with `G = 2^(4+L)` and `R` the smallest odd integer
/// `>= max(5, 2 + 3 log2 m)`.
pub fn countsketch_params(levels: u32, m: usize) -> Result<(usize, usize)> {
    if m == 0 || levels > 40 {
        return param(format!("invalid L={levels} or m={m}"));
    }
    let need = ceil_tol((2.0 + 3.0 * (m as f64).log2()).max(5.0)) as usize;
    let reps = need | 1;
    Ok((reps, 1usize << (4 + levels)))
}

/// Keeps the `k` largest entries by magnitude (ties: smaller index first).
pub fn denoise_top_k(z: &Vector, k: usize) -> Vector {
    let v = z.as_slice();
    let k = k.min(v.len());
    let mut out = vec![0.0; v.len()];
    if k > 0 {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        let cmp = |a: &usize, b: &usize| v[*b].abs().total_cmp(&v[*a].abs()).then(a.cmp(b));
        if k < idx.len() {
            idx.select_nth_unstable_by(k - 1, cmp);
        }
        for &i in &idx[..k] {
            out[i] = v[i];
        }
    }
    Vector::new(out).expect("same entries")
}

/// Sparsity `min(floor(eps^-p), m)` used by [`denoise`].
pub fn denoise_k(eps: f64, p: f64, m: usize) -> Result<usize> {
    if !(eps >= 0.0) || !(p >= 1.0) {
        return param(format!("need eps >= 0 and p >= 1, got eps={eps}, p={p}"));
    }
    if eps == 0.0 {
        return Ok(m);
    }
    let k = floor_tol(eps.powf(-p));
    Ok(if k >= m as f64 { m } else { k as usize })
}

pub fn denoise(z: &Vector, eps: f64, p: f64) -> Result<Vector> {
    Ok(denoise_top_k(z, denoise_k(eps, p, z.len())?))
}

/// CountSketch at level `L`, then keep the top `2^L` entries.
pub fn denoised_countsketch(
    oracle: &mut MeasurementOracle,
    levels: u32,
    rng: &RngStream,
) -> Result<Vector> {
    let (r, g) = countsketch_params(levels, oracle.dim())?;
    let z = countsketch(oracle, r, g, rng)?;
    Ok(denoise_top_k(&z, 1usize << levels))
}

/// Error guarantee `(1 + 5*4) * 2^(-L(1-p/q)/p)` in `l_q`.
pub fn denoised_countsketch_bound(levels: u32, p: f64, q: f64) -> f64 {
    21.0 * (-(levels as f64) / p).exp2().powf(1.0 - p / q)
}

/// Threshold `sqrt(m^((1-2/p)+) ln m / n)` of the Gaussian sketch.
pub fn linsketch_eps(n: usize, m: usize, p: f64) -> f64 {
    let expo = (1.0 - 2.0 / p).max(0.0);
    ((m as f64).powf(expo) * (m as f64).ln() / n as f64).sqrt()
}

/// Gaussian sketch with `n` rows followed by denoising; returns zero without
/// measuring when the sparsity level rounds down to 0.
pub fn denoised_linsketch(
    oracle: &mut MeasurementOracle,
    n: usize,
    p: f64,
    rng: &RngStream,
) -> Result<Vector> {
    let m = oracle.dim();
    if n == 0 {
        return param("n must be >= 1");
    }
    let k = denoise_k(linsketch_eps(n, m, p), p, m)?;
    if k == 0 {
        return Vector::zeros(m);
    }
    let z = linsketch(oracle, n, rng)?;
    Ok(denoise_top_k(&z, k))
}
