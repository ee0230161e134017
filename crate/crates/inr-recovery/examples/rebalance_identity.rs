//! The rebalancing identity behind weight decay's sparsity effect: rescaling
//! each unit so |a_i| = eta(w_i) leaves the function untouched and drops the
//! weight-decay value to the weighted l1 norm sum |a_i| eta(w_i).
//!
//! ```bash
//! cargo run --release -p inr-recovery --example rebalance_identity
//! ```

use inr_recovery::forward_op::ForwardConfig;
use inr_recovery::model::{InrParams, Unit};
use inr_recovery::rng::Rng;
use inr_recovery::training::{reg_value, Regularizer};
use inr_recovery::FeatureMap;

fn main() -> inr_recovery::Result<()> {
    let fm = FeatureMap::new(2, 1);
    let reg = Regularizer::modified(ForwardConfig::grid(6, 1, 512));
    let weighting = reg.prepare(&fm)?;

    let mut rng = Rng::new(99);
    let units: Vec<Unit> = (0..4)
        .map(|_| Unit::new(2.0 * rng.normal(), rng.unit_vector(fm.dim_out())))
        .collect();
    let params = InrParams::new(fm, units);

    let balanced = params.rebalance(weighting.as_fn())?;
    let r_before = reg_value(&params, &reg)?;
    let r_after = reg_value(&balanced, &reg)?;
    let weighted_l1: f64 = params
        .units()
        .iter()
        .map(|u| u.outer.abs() * weighting.eta(&u.weights))
        .sum();

    println!("unit |  a  -> a'      |  eta(w) -> eta(w')");
    for (before, after) in params.units().iter().zip(balanced.units().iter()) {
        println!(
            "     | {:+.4} -> {:+.4} | {:.4} -> {:.4}",
            before.outer,
            after.outer,
            weighting.eta(&before.weights),
            weighting.eta(&after.weights)
        );
    }
    println!("\nR(theta)              = {r_before:.8}");
    println!("R(rebalanced theta)   = {r_after:.8}");
    println!("sum |a_i| eta(w_i)    = {weighted_l1:.8}");

    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x = [rng.uniform()];
        worst = worst.max((params.eval(&x) - balanced.eval(&x)).abs());
    }
    println!("max |f - f'| over 1000 points = {worst:.2e}");
    Ok(())
}
