// CountSketch with pre-generated functionals and the median estimator.

use adasense::harness::VectorFamily;
use adasense::nonadaptive::{countsketch_params, denoise_top_k, CountSketch};
use adasense::oracle::lp_norm;
use adasense::{MeasurementOracle, RngStream};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (m, levels) = (1024, 3);
    let x = VectorFamily::Spikes { k: 8 }.generate(1.0, m, &mut RngStream::new(2, "x"))?;
    let (reps, groups) = countsketch_params(levels, m)?;
    let sketch = CountSketch::draw(m, reps, groups, &RngStream::new(4, "cs"))?;

    // every functional exists before the oracle is touched
    let functionals = sketch.functionals();
    let mut oracle = MeasurementOracle::new(x.clone());
    let y = functionals.iter().map(|f| oracle.measure(f)).collect::<Result<Vec<_>, _>>()?;
    let z = sketch.estimate(&y)?;
    let w = denoise_top_k(&z, 1 << levels);

    println!("R = {reps}, G = {groups}, measurements = {}", oracle.cost());
    println!("l_inf error of estimate: {:.4}", lp_norm(&x.sub(&z)?, f64::INFINITY)?);
    println!("l_2 error after denoise: {:.4}", lp_norm(&x.sub(&w)?, 2.0)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
