//! Acceptance suite: eight end-to-end checks of the recovery theory and the
//! numerical machinery, each printed as one PASS/FAIL line. Run with
//! `cargo test --release -p inr-recovery --test acceptance -- --nocapture`
//! (the full suite is compute-heavy; expect on the order of an hour on one
//! core).

use inr_recovery::certificate::{
    certificate_width1_modified, duality_gap_estimate, verify_certificate, AtomicMeasure,
    VerifyOptions,
};
use inr_recovery::experiments::exact_recovery::{self, ExactRecoveryConfig};
use inr_recovery::experiments::phantom::{self, PhantomConfig, PhantomKind};
use inr_recovery::forward_op::{inr_coeffs, unit_coeffs, ForwardConfig};
use inr_recovery::model::{random_teacher, InrParams, Unit};
use inr_recovery::rng::Rng;
use inr_recovery::spectral::grid_samples;
use inr_recovery::training::{
    flatten_params, loss_and_grad, reg_value, unflatten_params, LrStage, RegKind, Regularizer,
};
use inr_recovery::{FeatureMap, TrigPoly};

struct Criterion {
    number: usize,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn report(results: &[Criterion]) {
    for c in results {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {}: {} — {}", c.number, c.name, c.detail);
    }
}

#[test]
fn acceptance() {
    // ACCEPTANCE_ONLY=1,4,5 runs a subset while iterating; the gate is the
    // full suite.
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let runners: Vec<(usize, fn() -> Criterion)> = vec![
        (1, criterion_1_width1_exact_recovery),
        (2, criterion_2_sampling_law_trend),
        (3, criterion_3_gradient_oracle),
        (4, criterion_4_forward_operator_oracle),
        (5, criterion_5_rebalance_mechanics),
        (6, criterion_6_certificate_suite),
        (7, criterion_7_parseval_property),
        (8, criterion_8_phantom_ordering),
    ];
    let results: Vec<Criterion> = runners
        .into_iter()
        .filter(|(n, _)| only.as_ref().map_or(true, |keep| keep.contains(n)))
        .map(|(_, run)| run())
        .collect();
    report(&results);
    let failures: Vec<&Criterion> = results.iter().filter(|c| !c.passed).collect();
    assert!(
        failures.is_empty(),
        "{} acceptance criterion(s) failed: {}",
        failures.len(),
        failures
            .iter()
            .map(|c| format!("#{} {}", c.number, c.name))
            .collect::<Vec<_>>()
            .join(", ")
    );
}

/// Criterion 1: d=1, K0=2, W=1 teacher, K=6, modified weight decay, width-100
/// student, constrained solve at desk scale (20 outer x 2000 inner) —
/// running-min image MSE below 1e-9 in at least 9 of 10 seeded trials.
fn criterion_1_width1_exact_recovery() -> Criterion {
    let cfg = ExactRecoveryConfig {
        k_list: vec![6],
        w_list: vec![1],
        trials: 10,
        regs: vec![RegKind::ModifiedWd],
        max_outer: 20,
        seed: 101,
        ..ExactRecoveryConfig::desk()
    };
    match exact_recovery::run(&cfg) {
        Ok(results) => {
            let successes = results.outcomes.iter().filter(|o| o.success).count();
            Criterion {
                number: 1,
                name: "width-1 exact recovery (modified WD, K = 3 K0)",
                passed: successes >= 9,
                detail: format!("{successes}/10 trials reached image MSE < 1e-9 (need >= 9)"),
            }
        }
        Err(e) => failed(1, "width-1 exact recovery (modified WD, K = 3 K0)", e),
    }
}

/// Criterion 2: standard weight decay, W in {1,2}, K in {2,...,12}, 5 trials
/// per cell — the mean over W of P(success | K >= 6W) - P(success | K < 6W)
/// must be at least 0.4.
fn criterion_2_sampling_law_trend() -> Criterion {
    let cfg = ExactRecoveryConfig {
        k_list: vec![2, 4, 6, 8, 10, 12],
        w_list: vec![1, 2],
        trials: 5,
        regs: vec![RegKind::StandardWd],
        max_outer: 40,
        al_decay_every: 16,
        // The sparsity-seeking phase of standard weight decay needs the
        // regularizer-dominated early outers; rho0 = 10 measurably lowers
        // its recovery rates while helping modified weight decay.
        al_rho0: 1.0,
        seed: 202,
        ..ExactRecoveryConfig::desk()
    };
    match exact_recovery::run(&cfg) {
        Ok(results) => {
            let margin = results.trend_margin(RegKind::StandardWd, |w| 6 * w as i64);
            let table: Vec<String> = results
                .cells
                .iter()
                .map(|c| format!("K{}W{}:{}/{}", c.k, c.w, c.successes, c.trials))
                .collect();
            Criterion {
                number: 2,
                name: "sampling-law trend (standard WD)",
                passed: margin >= 0.4,
                detail: format!(
                    "trend margin {margin:.3} (need >= 0.4); cells [{}]",
                    table.join(" ")
                ),
            }
        }
        Err(e) => failed(2, "sampling-law trend (standard WD)", e),
    }
}

/// Criterion 3: analytic gradients of both objectives match central finite
/// differences (step 1e-5) to relative error 1e-5 on 20 random instances in
/// each of d = 1 and d = 2, kink-adjacent units excluded.
fn criterion_3_gradient_oracle() -> Criterion {
    let mut checked = 0usize;
    let mut worst: f64 = 0.0;
    let mut failures = 0usize;
    for &dim in &[1usize, 2] {
        let (k0, k, m, width) = if dim == 1 {
            (2, 6, 256, 4)
        } else {
            (1, 3, 32, 3)
        };
        let fm = FeatureMap::new(k0, dim);
        let fwd = ForwardConfig::grid(k, dim, m);
        for instance in 0..20u64 {
            let mut rng = Rng::new(3_000 + 17 * instance + dim as u64);
            let units: Vec<Unit> = (0..width)
                .map(|_| Unit::new(rng.normal(), rng.unit_vector(fm.dim_out())))
                .collect();
            let params = InrParams::new(fm.clone(), units);
            let teacher = random_teacher(2, &fm, 9_000 + instance, |w| {
                w.iter().map(|v| v * v).sum::<f64>().sqrt()
            })
            .expect("teacher");
            let y = inr_coeffs(&teacher, &fwd).expect("measurements");
            let h = 1e-5f64;
            let kink_floor = (4.0 * h).max(1e-7);
            let kink_adjacent: Vec<bool> = params
                .units()
                .iter()
                .map(|u| {
                    let tp = TrigPoly::new(fm.clone(), u.weights.clone());
                    grid_samples(|x| tp.eval(x).abs(), m, dim)
                        .into_iter()
                        .fold(f64::INFINITY, f64::min)
                        < kink_floor
                })
                .collect();
            for reg in [Regularizer::standard(), Regularizer::modified(fwd.clone())] {
                let lambda = 0.3;
                let (_, grad) = loss_and_grad(&params, &y, &reg, lambda, &fwd).expect("grad");
                let flat = flatten_params(&params);
                let stride = fm.dim_out() + 1;
                for (idx, analytic) in grad.iter().enumerate() {
                    if kink_adjacent[idx / stride] {
                        continue;
                    }
                    let mut plus = flat.clone();
                    plus[idx] += h;
                    let mut minus = flat.clone();
                    minus[idx] -= h;
                    let f = |v: &[f64]| {
                        let p = unflatten_params(&fm, v);
                        loss_and_grad(&p, &y, &reg, lambda, &fwd).unwrap().0
                    };
                    let fd = (f(&plus) - f(&minus)) / (2.0 * h);
                    let denom = analytic.abs().max(fd.abs()).max(1e-6);
                    let rel = (fd - analytic).abs() / denom;
                    worst = worst.max(rel);
                    checked += 1;
                    if rel >= 1e-5 {
                        failures += 1;
                    }
                }
            }
        }
    }
    Criterion {
        number: 3,
        name: "gradient oracle (finite differences)",
        passed: failures == 0,
        detail: format!(
            "{checked} partials checked across 20 instances per dimension, worst relative error {worst:.2e} (limit 1e-5), {failures} over limit"
        ),
    }
}

/// Criterion 4: analytic vs grid backend on 50 random units (K0=2, K=6):
/// per-unit agreement <= 1e-6 at M = 2^14 and aggregate error ratio >= 3
/// per grid doubling.
fn criterion_4_forward_operator_oracle() -> Criterion {
    let fm = FeatureMap::new(2, 1);
    let analytic_cfg = ForwardConfig::analytic(6);
    let mut rng = Rng::new(404);
    let mut worst_fine: f64 = 0.0;
    let mut total_coarse = 0.0;
    let mut total_mid = 0.0;
    for _ in 0..50 {
        let w = rng.unit_vector(fm.dim_out());
        let exact = unit_coeffs(&w, &fm, &analytic_cfg).expect("analytic");
        let err_at = |m: usize| -> f64 {
            let grid = unit_coeffs(&w, &fm, &ForwardConfig::grid(6, 1, m)).expect("grid");
            exact
                .vals()
                .iter()
                .zip(grid.vals().iter())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
        };
        total_coarse += err_at(1 << 13);
        total_mid += err_at(1 << 14);
        worst_fine = worst_fine.max(err_at(1 << 14).sqrt());
    }
    let ratio = (total_coarse / total_mid).sqrt();
    let passed = worst_fine <= 1e-6 && ratio >= 3.0;
    Criterion {
        number: 4,
        name: "forward-operator oracle (analytic vs grid)",
        passed,
        detail: format!(
            "worst agreement {worst_fine:.2e} at M = 2^14 (limit 1e-6), convergence ratio {ratio:.2} per doubling (need >= 3)"
        ),
    }
}

/// Criterion 5: on 100 random parameter vectors, rebalancing preserves the
/// function to 1e-12, achieves R = sum |a| eta(w) to 1e-10, and never
/// increases R.
fn criterion_5_rebalance_mechanics() -> Criterion {
    let fm = FeatureMap::new(2, 1);
    let fwd = ForwardConfig::grid(6, 1, 512);
    let reg = Regularizer::modified(fwd);
    let weighting = reg.prepare(&fm).expect("weighting");
    let mut rng = Rng::new(505);
    let mut worst_eval: f64 = 0.0;
    let mut worst_identity: f64 = 0.0;
    let mut failures = 0usize;
    for _ in 0..100 {
        let width = 1 + (rng.next_u64() % 5) as usize;
        let units: Vec<Unit> = (0..width)
            .map(|_| Unit::new(rng.normal(), rng.unit_vector(fm.dim_out())))
            .collect();
        let params = InrParams::new(fm.clone(), units);
        let balanced = match params.rebalance(weighting.as_fn()) {
            Ok(b) => b,
            Err(_) => {
                // eta = 0 with a nonzero outer weight: inadmissible draw
                continue;
            }
        };
        for _ in 0..50 {
            let x = [rng.uniform()];
            worst_eval = worst_eval.max((params.eval(&x) - balanced.eval(&x)).abs());
        }
        let r_new = reg_value(&balanced, &reg).expect("reg value");
        let r_old = reg_value(&params, &reg).expect("reg value");
        let l1: f64 = params
            .units()
            .iter()
            .map(|u| u.outer.abs() * weighting.eta(&u.weights))
            .sum();
        let scale = 1.0 + l1.abs();
        worst_identity = worst_identity.max((r_new - l1).abs() / scale);
        if (r_new - l1).abs() > 1e-10 * scale || r_new > r_old + 1e-10 * scale {
            failures += 1;
        }
    }
    let passed = failures == 0 && worst_eval < 1e-12;
    Criterion {
        number: 5,
        name: "rebalance mechanics (l2 to weighted l1)",
        passed,
        detail: format!(
            "100 random parameter vectors: worst pointwise drift {worst_eval:.2e} (limit 1e-12), worst identity residual {worst_identity:.2e} (limit 1e-10), {failures} violations"
        ),
    }
}

/// Criterion 6: for 20 random width-1 teachers (d=1, K0=2, K=6) the
/// constructed certificate passes verification over 1e5 sphere samples with
/// refinement (no ratio above 1 + 1e-8) and the duality gap is <= 1e-8.
fn criterion_6_certificate_suite() -> Criterion {
    let fm = FeatureMap::new(2, 1);
    let fwd = ForwardConfig::grid(6, 1, 1024);
    let reg = Regularizer::modified(fwd.clone());
    let weighting = reg.prepare(&fm).expect("weighting");
    let mut worst_ratio: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    let mut failures = 0usize;
    for trial in 0..20u64 {
        let teacher = random_teacher(1, &fm, 6_000 + trial, weighting.as_fn()).expect("teacher");
        let y = inr_coeffs(&teacher, &fwd).expect("measurements");
        let mu = AtomicMeasure::from_params(&teacher);
        let atom = &mu.atoms()[0];
        let cert = certificate_width1_modified(&atom.direction, atom.amplitude.signum(), &fm, &fwd)
            .expect("certificate");
        let opts = VerifyOptions {
            n_samples: 100_000,
            refine_steps: 200,
            seed: 60_000 + trial,
            ..VerifyOptions::default()
        };
        let report = verify_certificate(&cert, &fm, &fwd, &opts).expect("verify");
        worst_ratio = worst_ratio.max(report.max_ratio);
        match duality_gap_estimate(&mu, &cert, &y, &weighting, &fwd, &report) {
            Ok(gap) => {
                worst_gap = worst_gap.max(gap.abs());
                if report.max_ratio > 1.0 + 1e-8 || gap.abs() > 1e-8 {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    Criterion {
        number: 6,
        name: "certificate suite (20 width-1 teachers)",
        passed: failures == 0,
        detail: format!(
            "worst constraint ratio {worst_ratio:.12} (limit 1 + 1e-8), worst |gap| {worst_gap:.2e} (limit 1e-8), {failures} failures"
        ),
    }
}

/// Criterion 7: eta_K(w) is nondecreasing in K and within 5% of the
/// grid-estimated L2 norm of the rectified unit at K = 3 K0, over 100
/// random directions.
fn criterion_7_parseval_property() -> Criterion {
    let fm = FeatureMap::new(2, 1);
    let m = 4096;
    let mut rng = Rng::new(707);
    let mut failures = 0usize;
    let mut worst_gap_frac: f64 = 0.0;
    for _ in 0..100 {
        let w = rng.unit_vector(fm.dim_out());
        let tp = TrigPoly::new(fm.clone(), w.clone());
        let samples = grid_samples(|x| tp.eval(x).max(0.0), m, 1);
        let l2: f64 = (samples.iter().map(|v| v * v).sum::<f64>() / m as f64).sqrt();
        if l2 < 1e-12 {
            continue;
        }
        let mut previous = 0.0f64;
        let mut monotone = true;
        for k in 0..=6i64 {
            let eta = Regularizer::modified(ForwardConfig::grid(k, 1, m))
                .prepare(&fm)
                .expect("weighting")
                .eta(&w);
            if eta + 1e-12 < previous {
                monotone = false;
            }
            previous = eta;
        }
        let gap_frac = (l2 - previous) / l2;
        worst_gap_frac = worst_gap_frac.max(gap_frac);
        if !monotone || gap_frac > 0.05 {
            failures += 1;
        }
    }
    Criterion {
        number: 7,
        name: "Parseval property of the modified weighting",
        passed: failures == 0,
        detail: format!(
            "eta_K nondecreasing over K = 0..6; worst relative gap to the grid L2 norm at K = 3 K0: {worst_gap_frac:.4} (limit 0.05)"
        ),
    }
}

/// Criterion 8: on the scaled dot phantom (K=16, K0=6, width 64) the best
/// modified-WD fit beats the best standard-WD fit, which beats zero-fill;
/// on the disc phantom the INR beats zero-fill.
fn criterion_8_phantom_ordering() -> Criterion {
    let stages = vec![
        LrStage {
            iters: 8000,
            lr: 1e-3,
        },
        LrStage {
            iters: 2000,
            lr: 1e-4,
        },
    ];
    let dot_cfg = PhantomConfig {
        kind: PhantomKind::Dot,
        stages: stages.clone(),
        lambdas: vec![1e-5, 1e-3],
        ..PhantomConfig::desk()
    };
    let dot = match phantom::run(&dot_cfg) {
        Ok(r) => r,
        Err(e) => return failed(8, "phantom MSE ordering", e),
    };
    let dot_modified = dot
        .best_for(RegKind::ModifiedWd)
        .expect("modified runs")
        .final_mse;
    let dot_standard = dot
        .best_for(RegKind::StandardWd)
        .expect("standard runs")
        .final_mse;
    let dot_zero = dot.zero_fill_mse;

    let disc_cfg = PhantomConfig {
        kind: PhantomKind::Discs,
        regs: vec![RegKind::ModifiedWd],
        lambdas: vec![1e-4, 1e-3],
        stages,
        ..PhantomConfig::desk()
    };
    let disc = match phantom::run(&disc_cfg) {
        Ok(r) => r,
        Err(e) => return failed(8, "phantom MSE ordering", e),
    };
    let disc_inr = disc
        .best_for(RegKind::ModifiedWd)
        .expect("modified runs")
        .final_mse;
    let disc_zero = disc.zero_fill_mse;

    let dot_ordering = dot_modified < dot_standard && dot_standard < dot_zero;
    let disc_ordering = disc_inr < disc_zero;
    Criterion {
        number: 8,
        name: "phantom MSE ordering",
        passed: dot_ordering && disc_ordering,
        detail: format!(
            "dot: modified {dot_modified:.3e} < standard {dot_standard:.3e} < zero-fill {dot_zero:.3e} ({}); disc: INR {disc_inr:.3e} < zero-fill {disc_zero:.3e} ({})",
            if dot_ordering { "ok" } else { "violated" },
            if disc_ordering { "ok" } else { "violated" }
        ),
    }
}

fn failed(number: usize, name: &'static str, e: inr_recovery::Error) -> Criterion {
    Criterion {
        number,
        name,
        passed: false,
        detail: format!("runner error: {e}"),
    }
}
