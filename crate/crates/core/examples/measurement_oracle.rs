// Measuring a hidden vector through linear functionals and reading the
// per-stage cost counter.

use adasense::{LinearFunctional, MeasurementOracle, Stage, Vector};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let x = Vector::new(vec![0.5, 0.0, -0.25, 0.25])?;
    let mut oracle = MeasurementOracle::new(x);

    let sum = LinearFunctional::new(vec![0, 1, 2, 3], vec![1.0; 4])?;
    println!("<1, x>        = {}", oracle.measure(&sum)?);

    let e2 = oracle.staged(Stage::DirectRead, |o| o.read_entry(2))?;
    println!("x[2]          = {e2}");

    let f = LinearFunctional::from_pairs(vec![(3, 2.0), (0, 1.0), (3, -1.0)])?;
    println!("x[0] + x[3]   = {}", oracle.measure(&f)?);

    println!("total cost    = {}", oracle.cost());
    for stage in Stage::ALL {
        println!("  {:<12} {}", stage.name(), oracle.cost_in(stage));
    }
    assert_eq!(oracle.cost(), 3);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
