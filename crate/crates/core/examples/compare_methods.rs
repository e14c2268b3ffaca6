// Comparing adaptive and non-adaptive methods at equal budgets as CSV.

use adasense::harness::{compare_csv, compare_methods, CompareConfig, VectorFamily};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = CompareConfig {
        m: 1 << 12,
        p: 1.0,
        q: 2.0,
        budgets: vec![0, 1 << 15],
        families: vec![VectorFamily::Spikes { k: 4 }],
        trials: 3,
        seed: 1,
    };
    print!("{}", compare_csv(&compare_methods(&cfg)?));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
