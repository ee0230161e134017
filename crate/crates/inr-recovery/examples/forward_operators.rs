//! Compares the two measurement-operator backends on rectified units: the
//! closed-form piecewise integration against oversampled-grid DFTs, showing
//! the second-order convergence of the grid quadrature.
//!
//! ```bash
//! cargo run --release -p inr-recovery --example forward_operators
//! ```

use inr_recovery::forward_op::{find_positive_intervals, unit_coeffs, ForwardConfig};
use inr_recovery::rng::Rng;
use inr_recovery::{FeatureMap, TrigPoly};

fn main() -> inr_recovery::Result<()> {
    let fm = FeatureMap::new(2, 1);
    let mut rng = Rng::new(7);
    let w = rng.unit_vector(fm.dim_out());
    let tp = TrigPoly::new(fm.clone(), w.clone());

    let region = find_positive_intervals(&tp)?;
    println!("random unit on the sphere of R^{}:", fm.dim_out());
    for (a, b) in &region.intervals {
        println!("  positive on ({a:.6}, {b:.6})");
    }
    println!("  positive measure {:.6}", region.measure());

    let analytic = unit_coeffs(&w, &fm, &ForwardConfig::analytic(6))?;
    println!("\nanalytic coefficients on |k| <= 6:");
    for (k, v) in analytic.set().iter().zip(analytic.vals().iter()) {
        if k[0] >= 0 {
            println!("  k = {:>2}: {:+.10} {:+.10}i", k[0], v.re, v.im);
        }
    }

    println!("\ngrid-backend error against the closed form:");
    println!("  {:>8} {:>14} {:>8}", "M", "l2 error", "ratio");
    let mut previous = None;
    for exp in 8..=14 {
        let m = 1usize << exp;
        let grid = unit_coeffs(&w, &fm, &ForwardConfig::grid(6, 1, m))?;
        let err: f64 = analytic
            .vals()
            .iter()
            .zip(grid.vals().iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        match previous {
            Some(prev) => println!("  {:>8} {:>14.3e} {:>8.2}", m, err, prev / err),
            None => println!("  {:>8} {:>14.3e} {:>8}", m, err, "-"),
        }
        previous = Some(err);
    }
    println!("\nthe rectangle rule on a kinked integrand converges at second order,");
    println!("so each doubling of M divides the error by about four.");
    Ok(())
}
