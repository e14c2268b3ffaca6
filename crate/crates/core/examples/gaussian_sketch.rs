// The linear Gaussian sketch `(1/n) N^T N x` and its denoised version.

use adasense::harness::VectorFamily;
use adasense::nonadaptive::{denoised_linsketch, linsketch};
use adasense::oracle::lp_norm;
use adasense::{MeasurementOracle, RngStream};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (m, n) = (1024, 512);
    let x = VectorFamily::Spikes { k: 2 }.generate(2.0, m, &mut RngStream::new(6, "x"))?;
    let rng = RngStream::new(8, "gauss");

    let mut oracle = MeasurementOracle::new(x.clone());
    let z = linsketch(&mut oracle, n, &rng)?;
    println!("plain:    l_inf error {:.4}, cost {}", lp_norm(&x.sub(&z)?, f64::INFINITY)?, oracle.cost());

    let mut oracle = MeasurementOracle::new(x.clone());
    let w = denoised_linsketch(&mut oracle, n, 2.0, &rng)?;
    println!("denoised: l_4 error {:.4}, {} nonzeros", lp_norm(&x.sub(&w)?, 4.0)?, w.nonzeros());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
