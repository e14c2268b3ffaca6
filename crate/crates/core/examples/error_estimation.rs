// Monte Carlo error estimation with confidence intervals.

use adasense::discover::Variant;
use adasense::harness::{estimate_error, ExperimentConfig, Method, VectorFamily};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let method = Method::Adaptive { levels: 2, reps: None, variant: Variant::Preconditioned };
    let cfg = ExperimentConfig::new(method, VectorFamily::Spikes { k: 4 }, 2048, 1.0, 2.0, 20, 7);
    let est = estimate_error(&cfg)?;
    println!(
        "{method}: mean {:.4} +- {:.4}, q-moment {:.4}, cost mean {:.0} max {}",
        est.mean_err, est.ci, est.qmoment_err, est.mean_cost, est.max_cost
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
