// Filtering a bucket by comparing each column of a random sign matrix with
// the signs of the measurements.

use adasense::oracle::Vector;
use adasense::precondition::precond_draw;
use adasense::{MeasurementOracle, RngStream};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let n = 1024;
    let mut x: Vec<f64> = (0..n).map(|i| 0.01 * ((i as f64) * 0.7).sin()).collect();
    x[77] = 1.0;
    let mut oracle = MeasurementOracle::new(Vector::new(x)?);
    let bucket: Vec<usize> = (0..n).collect();

    let draw = precond_draw(&mut oracle, &bucket, 701, &mut RngStream::new(3, "precond"))?
        .expect("non-empty bucket");
    println!("{} of {n} coordinates survive: {:?}", draw.selected.len(), draw.selected);
    println!("measurements used: {}", oracle.cost());
    assert!(draw.selected.contains(&77));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
