//! Builds a width-3 teacher network on [0,1) and writes its curve together
//! with the three rectified trigonometric polynomials it sums, as CSV.
//!
//! ```bash
//! cargo run --release -p inr-recovery --example teacher_curve
//! ```

use inr_recovery::model::random_teacher;
use inr_recovery::FeatureMap;
use std::io::Write;

fn main() -> inr_recovery::Result<()> {
    let fm = FeatureMap::new(2, 1);
    let eta = |w: &[f64]| w.iter().map(|v| v * v).sum::<f64>().sqrt();
    let teacher = random_teacher(3, &fm, 2024, eta)?;

    let out_dir = std::path::Path::new("target/example-output/teacher_curve");
    std::fs::create_dir_all(out_dir)?;
    let mut csv = std::io::BufWriter::new(std::fs::File::create(out_dir.join("curve.csv"))?);
    writeln!(csv, "x,f,unit1,unit2,unit3")?;
    let m = 1024;
    for i in 0..m {
        let x = [i as f64 / m as f64];
        write!(csv, "{:.6},{:.8}", x[0], teacher.eval(&x))?;
        for u in 0..3 {
            let tp = teacher.unit_trig_poly(u);
            let a = teacher.units()[u].outer;
            write!(csv, ",{:.8}", a * tp.eval(&x).max(0.0))?;
        }
        writeln!(csv)?;
    }
    println!(
        "width-3 teacher written to {}",
        out_dir.join("curve.csv").display()
    );
    for (i, u) in teacher.units().iter().enumerate() {
        println!(
            "unit {}: outer weight {:+.4}, inner norm {:.4}",
            i + 1,
            u.outer,
            u.weight_norm()
        );
    }
    Ok(())
}
