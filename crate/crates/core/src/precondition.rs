//! Sign-measurement preconditioning of a bucket.
//!
//! `k` Rademacher measurements of the bucket are reduced to their signs `s`.
//! A coordinate survives when its own sign column is within Hamming distance
//! `k/6` of `s` or of `-s`. A mild heavy hitter (constant `sqrt 5`) keeps its
//! place with high probability while almost everything else is filtered out,
//! so the survivors satisfy a much stronger heavy-hitter condition.

use rand::RngCore;

use crate::error::{dim, param, Result};
use crate::numeric::ceil_u64;
use crate::oracle::{MeasurementBlock, MeasurementOracle, Stage};
use crate::rng::RngStream;

/// A `k x #J` matrix of i.i.d. uniform signs, bit-packed per column.
///
/// Bit `1` encodes `-1`. Trailing bits of each column's last word are zero.
#[derive(Debug, Clone)]
pub struct SignMatrix {
    support: Vec<usize>,
    rows: usize,
    words: usize,
    bits: Vec<u64>,
}

impl SignMatrix {
    pub fn random(support: &[usize], rows: usize, rng: &mut RngStream) -> Result<Self> {
        if rows == 0 {
            return param("number of sign rows must be >= 1");
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return param("support must be strictly increasing");
        }
        let words = rows.div_ceil(64);
        let tail = rows % 64;
        let last_mask = if tail == 0 { u64::MAX } else { (1u64 << tail) - 1 };
        let mut bits = Vec::with_capacity(words * support.len());
        for _ in 0..support.len() {
            bits.extend((1..words).map(|_| rng.next_u64()));
            bits.push(rng.next_u64() & last_mask);
        }
        Ok(SignMatrix {
            support: support.to_vec(),
            rows,
            words,
            bits,
        })
    }

    fn column(&self, pos: usize) -> &[u64] {
        &self.bits[pos * self.words..(pos + 1) * self.words]
    }

    /// Entry `a_{row, pos}` as `+1.0` or `-1.0`.
    pub fn entry(&self, row: usize, pos: usize) -> f64 {
        let bit = (self.column(pos)[row / 64] >> (row % 64)) & 1;
        1.0 - 2.0 * bit as f64
    }

    pub fn columns(&self) -> usize {
        self.support.len()
    }

    /// Hamming distance between column `pos` and the packed sign vector.
    fn distance_to(&self, pos: usize, packed: &[u64]) -> usize {
        self.column(pos)
            .iter()
            .zip(packed)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Hamming distance of every column to the packed sign vector.
    fn distances(&self, packed: &[u64]) -> Vec<usize> {
        #[cfg(target_arch = "x86_64")]
        if std::arch::is_x86_feature_detected!("popcnt") {
            // SAFETY: the required CPU feature was detected at runtime.
            return unsafe { self.distances_popcnt(packed) };
        }
        self.distances_portable(packed)
    }

    #[inline(always)]
    fn distances_portable(&self, packed: &[u64]) -> Vec<usize> {
        self.bits
            .chunks_exact(self.words)
            .map(|col| {
                col.iter()
                    .zip(packed)
                    .map(|(a, b)| (a ^ b).count_ones() as usize)
                    .sum()
            })
            .collect()
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "popcnt")]
    unsafe fn distances_popcnt(&self, packed: &[u64]) -> Vec<usize> {
        self.distances_portable(packed)
    }

    /// `d_H(a_t, a_u)` between two columns.
    pub fn column_distance(&self, t: usize, u: usize) -> usize {
        self.distance_to(t, self.column(u))
    }
}

impl MeasurementBlock for SignMatrix {
    fn support(&self) -> &[usize] {
        &self.support
    }

    fn rows(&self) -> usize {
        self.rows
    }

    fn accumulate(&self, pos: usize, value: f64, acc: &mut [f64]) {
        for (w, &word) in self.column(pos).iter().enumerate() {
            let chunk = &mut acc[w * 64..((w + 1) * 64).min(self.rows)];
            for (b, a) in chunk.iter_mut().enumerate() {
                if (word >> b) & 1 == 1 {
                    *a -= value;
                } else {
                    *a += value;
                }
            }
        }
    }
}

/// Everything one preconditioning call drew and observed.
#[derive(Debug, Clone)]
pub struct PrecondDraw {
    pub matrix: SignMatrix,
    /// `s_i = sgn(y_i)` with `sgn(0) = +1`.
    pub signs: Vec<i8>,
    /// Surviving coordinates, ascending.
    pub selected: Vec<usize>,
}

/// `k = ceil(36 ln((1 + (2/5) gamma^2) / delta1))`.
pub fn precond_k_for(gamma: f64, delta1: f64) -> Result<usize> {
    if !(gamma > 1.0 && gamma.is_finite()) {
        return param(format!("gamma must exceed 1, got {gamma}"));
    }
    if !(delta1 > 0.0 && delta1 < 1.0) {
        return param(format!("delta1 must lie in (0,1), got {delta1}"));
    }
    Ok(ceil_u64(36.0 * ((1.0 + 0.4 * gamma * gamma) / delta1).ln()) as usize)
}

/// Number of positions where two sign vectors differ.
pub fn hamming(a: &[i8], b: &[i8]) -> Result<usize> {
    if a.len() != b.len() {
        return dim(format!("sign vectors of length {} and {}", a.len(), b.len()));
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count())
}

/// Preconditioned subset of `bucket` (ascending) using `k` measurements.
pub fn precond(
    oracle: &mut MeasurementOracle,
    bucket: &[usize],
    k: usize,
    rng: &mut RngStream,
) -> Result<Vec<usize>> {
    Ok(precond_draw(oracle, bucket, k, rng)?
        .map(|d| d.selected)
        .unwrap_or_default())
}

/// [`precond`] returning the full draw. `None` for an empty bucket, which
/// costs nothing.
pub fn precond_draw(
    oracle: &mut MeasurementOracle,
    bucket: &[usize],
    k: usize,
    rng: &mut RngStream,
) -> Result<Option<PrecondDraw>> {
    if bucket.is_empty() {
        return Ok(None);
    }
    let matrix = SignMatrix::random(bucket, k, rng)?;
    let y = oracle.staged(Stage::Precondition, |o| o.measure_block(&matrix))?;

    let mut packed = vec![0u64; matrix.words];
    let signs: Vec<i8> = y
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v < 0.0 {
                packed[i / 64] |= 1 << (i % 64);
                -1
            } else {
                1
            }
        })
        .collect();

    // keep j iff min(d_H(a_j, s), d_H(a_j, -s)) <= k/6, compared as 6 d <= k
    let selected = matrix
        .distances(&packed)
        .into_iter()
        .zip(bucket)
        .filter(|&(d, _)| 6 * d.min(k - d) <= k)
        .map(|(_, &j)| j)
        .collect();
    Ok(Some(PrecondDraw {
        matrix,
        signs,
        selected,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{LinearFunctional, Vector};
    use crate::spotting::hh_constant_spot;

    #[test]
    fn k_examples() {
        let gamma = 4100.0 * (2.0 * 64f64.ln()).sqrt();
        assert_eq!(precond_k_for(gamma, 0.2).unwrap(), 701);
        assert_eq!(precond_k_for(hh_constant_spot(0.25).unwrap(), 0.2).unwrap(), 701);
        assert_eq!(precond_k_for(2.0, 0.5).unwrap(), 60);
        assert_eq!(precond_k_for(10.0, 0.1).unwrap(), 217);
        assert!(precond_k_for(1.0, 0.5).is_err());
        assert!(precond_k_for(2.0, 1.0).is_err());
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(&[1, 1, -1], &[1, 1, -1]).unwrap(), 0);
        assert_eq!(hamming(&[1, 1], &[-1, -1]).unwrap(), 2);
        assert_eq!(hamming(&[1, -1, 1, -1], &[1, 1, 1, 1]).unwrap(), 2);
        assert!(hamming(&[1], &[1, 1]).is_err());
    }

    #[test]
    fn block_matches_row_functionals() {
        let mut rng = RngStream::new(1, "signs");
        let support = vec![0, 3, 4, 9];
        let a = SignMatrix::random(&support, 70, &mut rng).unwrap();
        let x = Vector::new((0..10).map(|i| (i as f64 * 0.37).sin()).collect()).unwrap();
        let mut o = MeasurementOracle::new(x);
        let y = o.measure_block(&a).unwrap();
        assert_eq!(o.cost(), 70);
        for (r, &yr) in y.iter().enumerate() {
            let coeffs = (0..support.len()).map(|t| a.entry(r, t)).collect();
            let f = LinearFunctional::new(support.clone(), coeffs).unwrap();
            assert_eq!(o.measure(&f).unwrap(), yr);
        }
    }

    #[test]
    fn singleton_bucket_survives() {
        let mut rng = RngStream::new(2, "precond");
        for (k, v) in [(1, 1.0), (60, -2.0), (701, 1e-9)] {
            let mut x = vec![0.0; 5];
            x[3] = v;
            let mut o = MeasurementOracle::new(Vector::new(x).unwrap());
            assert_eq!(precond(&mut o, &[3], k, &mut rng).unwrap(), vec![3]);
            assert_eq!(o.cost(), k as u64);
        }
    }

    #[test]
    fn empty_bucket_is_free() {
        let mut rng = RngStream::new(3, "precond");
        let mut o = MeasurementOracle::new(Vector::zeros(4).unwrap());
        assert!(precond(&mut o, &[], 10, &mut rng).unwrap().is_empty());
        assert_eq!(o.cost(), 0);
    }

    #[test]
    fn zero_bucket_signs_are_all_plus() {
        let mut rng = RngStream::new(4, "precond");
        let mut o = MeasurementOracle::new(Vector::zeros(200).unwrap());
        let bucket: Vec<usize> = (0..200).collect();
        let draw = precond_draw(&mut o, &bucket, 60, &mut rng).unwrap().unwrap();
        assert!(draw.signs.iter().all(|&s| s == 1));
        assert!(draw.selected.iter().all(|j| bucket.contains(j)));
    }

    #[test]
    fn selected_is_subset_and_ascending() {
        let mut rng = RngStream::new(5, "precond");
        let x: Vec<f64> = (0..300).map(|i| ((i * 7919) % 101) as f64 - 50.0).collect();
        let mut o = MeasurementOracle::new(Vector::new(x).unwrap());
        let bucket: Vec<usize> = (0..300).step_by(3).collect();
        let s = precond(&mut o, &bucket, 36, &mut rng).unwrap();
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert!(s.iter().all(|j| bucket.contains(j)));
        assert_eq!(o.cost(), 36);
    }
}
