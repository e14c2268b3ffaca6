//! Random bucketing of coordinate indices.
//!
//! Hash values live in `1..=D` (bucket labels), coordinates are 0-based. The
//! spot routine uses the label numerically as a measurement weight, so a zero
//! label is never produced.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{dim, param, Result};
use crate::numeric::{ceil_u64, next_prime};
use crate::rng::RngStream;

/// One bucket label in `1..=buckets` per coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashVector {
    values: Vec<u64>,
    buckets: u64,
}

impl HashVector {
    pub fn new(values: Vec<u64>, buckets: u64) -> Result<Self> {
        if buckets == 0 {
            return param("number of buckets must be >= 1");
        }
        if let Some(v) = values.iter().find(|&&v| v == 0 || v > buckets) {
            return param(format!("hash value {v} outside 1..={buckets}"));
        }
        Ok(HashVector { values, buckets })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn buckets(&self) -> u64 {
        self.buckets
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `B_j`: all coordinates sharing `j`'s label, ascending.
    pub fn bucket_of(&self, j: usize) -> Result<Vec<usize>> {
        let Some(&h) = self.values.get(j) else {
            return dim(format!("index {j} out of range for {} coordinates", self.len()));
        };
        Ok(self
            .values
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| (v == h).then_some(i))
            .collect())
    }

    pub fn partition(&self) -> BucketPartition {
        // counting sort: bucket d occupies order[offsets[d]..offsets[d+1]]
        let mut offsets = vec![0usize; self.buckets as usize + 1];
        for &v in &self.values {
            offsets[v as usize] += 1;
        }
        for d in 1..offsets.len() {
            offsets[d] += offsets[d - 1];
        }
        let mut next = offsets.clone();
        let mut order = vec![0usize; self.values.len()];
        for (i, &v) in self.values.iter().enumerate() {
            let slot = &mut next[(v - 1) as usize];
            order[*slot] = i;
            *slot += 1;
        }
        BucketPartition { order, offsets }
    }
}

/// The disjoint buckets `J_1, ..., J_D` induced by a hash vector, each in
/// ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketPartition {
    order: Vec<usize>,
    offsets: Vec<usize>,
}

impl BucketPartition {
    /// Bucket `J_d` for label `d` in `1..=D`.
    pub fn bucket(&self, d: u64) -> &[usize] {
        let d = d as usize;
        &self.order[self.offsets[d - 1]..self.offsets[d]]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.offsets.windows(2).map(|w| &self.order[w[0]..w[1]])
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sorted bucket sizes.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.offsets.windows(2).map(|w| w[1] - w[0]).collect();
        s.sort_unstable();
        s
    }
}

/// `B_j` for hash vector `h`.
pub fn bucket_of(h: &HashVector, j: usize) -> Result<Vec<usize>> {
    h.bucket_of(j)
}

/// Draw from `EquiHash(m, D)`: `H_i = ceil(pi(i) * D / m)` for a uniform
/// permutation `pi` of `1..=m`. Every label occurs `floor(m/D)` or
/// `ceil(m/D)` times.
pub fn equi_hash(m: usize, buckets: usize, rng: &mut RngStream) -> Result<HashVector> {
    if buckets == 0 || buckets > m {
        return param(format!("equi-hash needs 1 <= D <= m, got D={buckets}, m={m}"));
    }
    // shuffling the labels ceil(i * D / m), i = 1..=m, in place applies the
    // same permutation as shuffling 1..=m and mapping afterwards
    // label d covers floor(d m / D) - floor((d-1) m / D) positions
    let (step, rem) = (m / buckets, m % buckets);
    let mut values = Vec::with_capacity(m);
    let mut carry = 0;
    for d in 1..=buckets as u64 {
        carry += rem;
        let mut run = step;
        if carry >= buckets {
            carry -= buckets;
            run += 1;
        }
        values.resize(values.len() + run, d);
    }
    values.shuffle(rng);
    Ok(HashVector {
        values,
        buckets: buckets as u64,
    })
}

/// A member of the 2-universal family `i -> ((a*i + b) mod P) -> 1..=D`.
///
/// `P` is the smallest prime `>= max(m, D)`, `a` is uniform on `1..P`, `b` on
/// `0..P`, and residues are mapped to labels by `floor(r * D / P) + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairwiseHash {
    a: u64,
    b: u64,
    prime: u64,
    buckets: u64,
}

impl PairwiseHash {
    pub fn draw(m: usize, buckets: u64, rng: &mut RngStream) -> Result<Self> {
        if buckets == 0 {
            return param("number of buckets must be >= 1");
        }
        let prime = next_prime((m as u64).max(buckets).max(2));
        let a = rng.random_range(1..prime);
        let b = rng.random_range(0..prime);
        Ok(PairwiseHash {
            a,
            b,
            prime,
            buckets,
        })
    }

    /// Label of coordinate `i` (0-based); the family is keyed by `i + 1`.
    pub fn label(&self, i: usize) -> u64 {
        let p = self.prime as u128;
        let key = (i as u128 + 1) % p;
        let r = (self.a as u128 * key + self.b as u128) % p;
        let d = (r * self.buckets as u128 / p) as u64 + 1;
        d.min(self.buckets)
    }

    pub fn buckets(&self) -> u64 {
        self.buckets
    }
}

/// Pairwise-independent hash vector of length `m` with labels in `1..=D`.
pub fn pairwise_hash(m: usize, buckets: usize, rng: &mut RngStream) -> Result<HashVector> {
    let h = PairwiseHash::draw(m, buckets as u64, rng)?;
    Ok(HashVector {
        values: (0..m).map(|i| h.label(i)).collect(),
        buckets: buckets as u64,
    })
}

/// Which bucket-count rule to use for a heavy-hitter guarantee.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HashSizeRule {
    /// `ceil((gamma/eps)^p / delta0)` (or the `p > 2` analogue), for
    /// equi-hashing.
    #[default]
    EquiHash,
    /// `ceil((gamma/eps)^p * 2 / delta0)`: pairwise hashing with a joint
    /// bucket-size guarantee. Only defined for `p <= 2`.
    PairwiseJoint,
}

/// Number of buckets so that a coordinate with `|x_j| >= eps` satisfies the
/// heavy-hitter condition with constant `gamma` with probability
/// `>= 1 - delta0`. Capped at `m`.
pub fn hash_size_for(
    p: f64,
    eps: f64,
    delta0: f64,
    gamma: f64,
    m: usize,
    rule: HashSizeRule,
) -> Result<usize> {
    if !(p >= 1.0 && p.is_finite()) {
        return param(format!("p must lie in [1, inf), got {p}"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return param(format!("eps must lie in (0,1), got {eps}"));
    }
    if !(delta0 > 0.0 && delta0 <= 1.0) {
        return param(format!("delta0 must lie in (0,1], got {delta0}"));
    }
    if !(gamma > 1.0 && gamma.is_finite()) {
        return param(format!("gamma must exceed 1, got {gamma}"));
    }
    if m == 0 {
        return param("m must be >= 1");
    }
    let ratio = gamma / eps;
    let raw = match rule {
        HashSizeRule::EquiHash if p <= 2.0 => ratio.powf(p) / delta0,
        HashSizeRule::EquiHash => (m as f64).powf(1.0 - 2.0 / p) * ratio * ratio / delta0,
        HashSizeRule::PairwiseJoint if p <= 2.0 => ratio.powf(p) * 2.0 / delta0,
        HashSizeRule::PairwiseJoint => {
            return param("the pairwise joint rule is only defined for p <= 2")
        }
    };
    Ok((ceil_u64(raw) as usize).clamp(1, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equi_hash_sizes() {
        let mut rng = RngStream::new(1, "t");
        let h = equi_hash(10, 3, &mut rng).unwrap();
        assert_eq!(h.partition().sizes(), vec![3, 3, 4]);
        let h = equi_hash(6, 6, &mut rng).unwrap();
        assert_eq!(h.partition().sizes(), vec![1; 6]);
        let h = equi_hash(5, 1, &mut rng).unwrap();
        assert_eq!(h.partition().sizes(), vec![5]);
    }

    #[test]
    fn equi_hash_rejects_bad_bucket_counts() {
        let mut rng = RngStream::new(1, "t");
        assert!(equi_hash(5, 6, &mut rng).is_err());
        assert!(equi_hash(5, 0, &mut rng).is_err());
    }

    #[test]
    fn pairwise_single_bucket_and_single_coordinate() {
        let mut rng = RngStream::new(2, "t");
        let h = pairwise_hash(50, 1, &mut rng).unwrap();
        assert!(h.values().iter().all(|&v| v == 1));
        for _ in 0..100 {
            let h = pairwise_hash(1, 7, &mut rng).unwrap();
            assert_eq!(h.len(), 1);
            assert!((1..=7).contains(&h.values()[0]));
        }
        assert!(pairwise_hash(3, 0, &mut rng).is_err());
    }

    #[test]
    fn bucket_of_examples() {
        let h = HashVector::new(vec![1, 2, 1], 2).unwrap();
        assert_eq!(bucket_of(&h, 0).unwrap(), vec![0, 2]);
        assert_eq!(bucket_of(&h, 1).unwrap(), vec![1]);
        let h = HashVector::new(vec![3, 3, 3], 3).unwrap();
        assert_eq!(bucket_of(&h, 1).unwrap(), vec![0, 1, 2]);
        assert!(bucket_of(&h, 3).is_err());
    }

    #[test]
    fn hash_vector_validates_labels() {
        assert!(HashVector::new(vec![0], 2).is_err());
        assert!(HashVector::new(vec![3], 2).is_err());
        assert!(HashVector::new(vec![1], 0).is_err());
    }

    #[test]
    fn hash_size_examples() {
        use HashSizeRule::*;
        assert_eq!(hash_size_for(1.0, 0.5, 0.25, 2.0, 1000, EquiHash).unwrap(), 16);
        assert_eq!(hash_size_for(2.0, 0.5, 1.0, 2.0, 1000, EquiHash).unwrap(), 16);
        assert_eq!(hash_size_for(4.0, 0.5, 1.0, 2.0, 256, EquiHash).unwrap(), 256);
        // capped at m
        assert_eq!(hash_size_for(1.0, 0.5, 0.25, 2.0, 10, EquiHash).unwrap(), 10);
        assert_eq!(hash_size_for(1.0, 0.5, 0.25, 2.0, 1000, PairwiseJoint).unwrap(), 32);
        assert!(hash_size_for(3.0, 0.5, 0.25, 2.0, 1000, PairwiseJoint).is_err());
        assert!(hash_size_for(0.5, 0.5, 0.25, 2.0, 1000, EquiHash).is_err());
        assert!(hash_size_for(1.0, 1.0, 0.25, 2.0, 1000, EquiHash).is_err());
        assert!(hash_size_for(1.0, 0.5, 0.0, 2.0, 1000, EquiHash).is_err());
        assert!(hash_size_for(1.0, 0.5, 0.25, 1.0, 1000, EquiHash).is_err());
    }

    #[test]
    fn partition_covers_and_is_disjoint() {
        let mut rng = RngStream::new(3, "t");
        let h = pairwise_hash(97, 10, &mut rng).unwrap();
        let part = h.partition();
        let mut all: Vec<usize> = part.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..97).collect::<Vec<_>>());
        for j in 0..97 {
            let b = h.bucket_of(j).unwrap();
            assert!(b.contains(&j));
            assert_eq!(b, part.bucket(h.values()[j]));
        }
    }
}
