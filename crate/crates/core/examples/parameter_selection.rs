// Choosing the number of levels from a target accuracy or a budget.

use adasense::adaptive::{choose_l_for_budget, choose_l_for_eps, repetitions, repetitions_for_confidence};
use adasense::discover::Variant;
use adasense::harness::{param_table, param_table_csv, ParamTargets};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (p, q, m) = (1.0, 2.0, 1 << 20);
    println!("R = {}", repetitions(p, q)?);
    println!("L for eps = 0.1: {}", choose_l_for_eps(0.1, p, q)?);
    println!("L for n = 1e5:  {}", choose_l_for_budget(100_000, m, p, q, Variant::Preconditioned)?);
    println!("R for 1% failure: {}", repetitions_for_confidence(2, 0.01)?);

    let rows = param_table(p, q, m, &ParamTargets::Budgets(vec![0, 50_000, 1_000_000]), Variant::Preconditioned)?;
    print!("{}", param_table_csv(&rows));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
