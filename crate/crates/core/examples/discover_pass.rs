// One detection pass at a given sensitivity, with both variants.

use adasense::discover::{discover, DiscoverConfig, Variant};
use adasense::oracle::Vector;
use adasense::{MeasurementOracle, RngStream};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let m = 1 << 12;
    let mut x = vec![0.0; m];
    for (i, j) in [10, 500, 2000, 4000].into_iter().enumerate() {
        x[j] = if i % 2 == 0 { 0.25 } else { -0.25 };
    }
    let x = Vector::new(x)?;

    let spikes = [10, 500, 2000, 4000];
    // the basic variant needs D > m here, so it degenerates to D = m singletons
    for variant in [Variant::Preconditioned, Variant::Basic] {
        let cfg = DiscoverConfig::new(variant, 1.0, 0.25, m)?;
        let mut oracle = MeasurementOracle::new(x.clone());
        let found = discover(&mut oracle, &cfg, &RngStream::new(5, "discover"))?;
        println!(
            "{variant:>8}: D = {:>4}, k* = {}, {} found ({} of 4 spikes), cost {} (cap {})",
            cfg.buckets,
            cfg.k_star(),
            found.len(),
            spikes.iter().filter(|j| found.contains(j)).count(),
            oracle.cost(),
            cfg.cost_cap()
        );
        assert!(oracle.cost() <= cfg.cost_cap());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
