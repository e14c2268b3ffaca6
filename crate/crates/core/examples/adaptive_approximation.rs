// Approximating a compressible vector with the multi-level adaptive scheme.

use adasense::adaptive::{approximate_with_candidates, AdaptivePlan};
use adasense::discover::Variant;
use adasense::harness::VectorFamily;
use adasense::oracle::lp_norm;
use adasense::{MeasurementOracle, RngStream};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (m, p, q) = (1 << 12, 1.0, 2.0);
    let x = VectorFamily::Geometric { ratio: 0.8 }.generate(p, m, &mut RngStream::new(9, "x"))?;

    for levels in [1, 3, 5] {
        let plan = AdaptivePlan::new(m, p, q, levels, Variant::Preconditioned)?;
        let mut oracle = MeasurementOracle::new(x.clone());
        let (out, candidates) = approximate_with_candidates(&mut oracle, &plan, &RngStream::new(1, "run"))?;
        let err = lp_norm(&x.sub(&out)?, q)?;
        println!(
            "L = {levels}: {:>3} candidates, error {err:.4} (bound {:.4}), cost {} (cap {})",
            candidates.len(),
            plan.error_bound(),
            oracle.cost(),
            plan.cost_cap()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
