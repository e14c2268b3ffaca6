// Isolating the dominant coordinate of a bucket with a handful of Gaussian
// measurements.

use adasense::oracle::Vector;
use adasense::spotting::{k_star, spot_traced, SpotParams};
use adasense::{MeasurementOracle, RngStream};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let m = 4096;
    let mut x = vec![1e-7; m];
    x[1234] = 1.0;
    let mut oracle = MeasurementOracle::new(Vector::new(x)?);

    let depth = k_star(m as f64)?;
    let params = SpotParams::new(1.0 / 3.0, depth)?;
    let bucket: Vec<usize> = (0..m).collect();
    let (found, chain) = spot_traced(&mut oracle, &bucket, params, &mut RngStream::new(1, "spot"))?;

    println!("depth k* = {depth}, cap = {}", params.cost_cap());
    println!("candidate sizes: {:?}", chain.iter().map(Vec::len).collect::<Vec<_>>());
    println!("found {found:?} with {} measurements", oracle.cost());
    assert!(oracle.cost() <= params.cost_cap());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
