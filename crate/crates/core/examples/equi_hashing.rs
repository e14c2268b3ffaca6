// Bucketing coordinates with a permutation-based hash and with a pairwise
// independent hash.

use adasense::hashing::{equi_hash, pairwise_hash};
use adasense::RngStream;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = RngStream::new(42, "hashing");
    let h = equi_hash(10, 3, &mut rng)?;
    println!("equi-hash labels: {:?}", h.values());
    for (d, bucket) in h.partition().iter().enumerate() {
        println!("  bucket {}: {:?}", d + 1, bucket);
    }
    // sizes are always floor(m/D) or ceil(m/D)
    assert!(h.partition().sizes().iter().all(|&s| s == 3 || s == 4));

    let p = pairwise_hash(10, 3, &mut rng)?;
    println!("pairwise sizes:   {:?}", p.partition().sizes());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
