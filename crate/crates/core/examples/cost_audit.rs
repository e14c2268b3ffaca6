// Auditing measured costs against closed-form caps, stage by stage.

use adasense::discover::{DiscoverConfig, Variant};
use adasense::harness::{cost_audit, AuditConfig, AuditTarget, Method, VectorFamily};
use adasense::spotting::SpotParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let targets = [
        AuditTarget::Spot(SpotParams::new(1.0 / 3.0, 6)?),
        AuditTarget::Discover(DiscoverConfig::with_buckets(Variant::Preconditioned, 1000, 60)?),
        AuditTarget::Method(Method::LinSketch { n: 128 }),
    ];
    for target in targets {
        let cfg = AuditConfig { target, family: VectorFamily::UniformBall, m: 1000, p: 1.0, q: 2.0, trials: 10, seed: 1 };
        println!("{}\n", cost_audit(&cfg)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
