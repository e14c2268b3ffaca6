// Keeping only the largest entries of a noisy estimate.

use adasense::nonadaptive::{denoise, denoise_top_k};
use adasense::oracle::Vector;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let z = Vector::new(vec![3.0, -1.0, 2.0, 0.0, -2.0])?;
    let w = denoise(&z, 0.5, 1.0)?;
    println!("eps = 0.5, p = 1 keeps 2: {:?}", w.as_slice());
    assert_eq!(w.as_slice(), &[3.0, 0.0, 2.0, 0.0, 0.0]);
    println!("top 3:                    {:?}", denoise_top_k(&z, 3).as_slice());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
