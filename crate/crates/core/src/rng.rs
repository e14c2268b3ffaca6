//! Labelled, seedable random streams.
//!
//! Every random draw in the crate goes through an [`RngStream`]. A stream is
//! identified by a root seed and a textual label; the generator state is a
//! SHA-256 digest of both, so two streams with the same `(seed, label)` pair
//! replay the same sequence bit for bit, and streams with different labels are
//! independent for all practical purposes.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    label: String,
    inner: Xoshiro256PlusPlus,
}

impl RngStream {
    pub fn new(seed: u64, label: impl Into<String>) -> Self {
        let label = label.into();
        let mut hasher = Sha256::new();
        hasher.update(seed.to_le_bytes());
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label.as_bytes());
        let digest: [u8; 32] = hasher.finalize().into();
        RngStream {
            seed,
            label,
            inner: Xoshiro256PlusPlus::from_seed(digest),
        }
    }

    /// Child stream `"{label}/{child}"` under the same root seed.
    ///
    /// The child depends only on the labels, never on how many values the
    /// parent has produced.
    pub fn fork(&self, child: impl AsRef<str>) -> RngStream {
        RngStream::new(self.seed, format!("{}/{}", self.label, child.as_ref()))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    #[inline]
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
