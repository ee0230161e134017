//! Serialization round trips for the on-disk formats: measurement CSV and
//! the flat parameter record (17 significant digits, bit-exact).
//!
//! ```bash
//! cargo run --release -p inr-recovery --example measurements_io
//! ```

use inr_recovery::forward_op::{inr_coeffs, ForwardConfig};
use inr_recovery::model::random_teacher;
use inr_recovery::{FeatureMap, InrParams, Measurements};

fn main() -> inr_recovery::Result<()> {
    let fm = FeatureMap::new(2, 1);
    let eta = |w: &[f64]| w.iter().map(|v| v * v).sum::<f64>().sqrt();
    let teacher = random_teacher(2, &fm, 8, eta)?;
    let cfg = ForwardConfig::grid(4, 1, 256);
    let y = inr_coeffs(&teacher, &cfg)?;

    let out_dir = std::path::Path::new("target/example-output/measurements_io");
    std::fs::create_dir_all(out_dir)?;

    let meas_path = out_dir.join("measurements.csv");
    y.write_csv(std::fs::File::create(&meas_path)?)?;
    let back = Measurements::read_csv(
        y.set().clone(),
        std::io::BufReader::new(std::fs::File::open(&meas_path)?),
    )?;
    let max_dev = y
        .vals()
        .iter()
        .zip(back.vals().iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    println!(
        "measurements CSV round trip: {} rows, max deviation {max_dev:.1e}",
        y.vals().len()
    );

    let params_path = out_dir.join("teacher.params");
    teacher.write_text(std::fs::File::create(&params_path)?)?;
    let restored =
        InrParams::read_text(std::io::BufReader::new(std::fs::File::open(&params_path)?))?;
    let bit_exact = teacher
        .units()
        .iter()
        .zip(restored.units().iter())
        .all(|(a, b)| {
            a.outer.to_bits() == b.outer.to_bits()
                && a.weights
                    .iter()
                    .zip(b.weights.iter())
                    .all(|(x, y)| x.to_bits() == y.to_bits())
        });
    println!("parameter record round trip bit-exact: {bit_exact}");
    println!("files under {}", out_dir.display());
    Ok(())
}
