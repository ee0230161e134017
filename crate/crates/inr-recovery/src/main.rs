//! Thin CLI over the experiment harness.
//!
//! ```text
//! inr-recovery <exact-recovery|phantom|certify>
//!     [--config PATH] [--out DIR] [--seed N] [--workers N]
//!     [--profile desk|paper]
//! ```

use std::path::PathBuf;
use std::process::ExitCode;

use inr_recovery::experiments::config::RawConfig;
use inr_recovery::experiments::{certify, exact_recovery, phantom, Profile};

struct Cli {
    command: String,
    config: Option<PathBuf>,
    out: PathBuf,
    seed: Option<u64>,
    workers: Option<usize>,
    profile: Profile,
}

const USAGE: &str = "usage: inr-recovery <exact-recovery|phantom|certify> \
[--config PATH] [--out DIR] [--seed N] [--workers N] [--profile desk|paper]";

fn parse_cli() -> Result<Cli, String> {
    let mut args = std::env::args().skip(1);
    let command = args.next().ok_or(USAGE.to_string())?;
    if !matches!(command.as_str(), "exact-recovery" | "phantom" | "certify") {
        return Err(format!("unknown command `{command}`\n{USAGE}"));
    }
    let mut cli = Cli {
        command,
        config: None,
        out: PathBuf::from("out"),
        seed: None,
        workers: None,
        profile: Profile::Desk,
    };
    while let Some(flag) = args.next() {
        let mut value = || {
            args.next()
                .ok_or_else(|| format!("flag {flag} needs a value\n{USAGE}"))
        };
        match flag.as_str() {
            "--config" => cli.config = Some(PathBuf::from(value()?)),
            "--out" => cli.out = PathBuf::from(value()?),
            "--seed" => cli.seed = Some(value()?.parse().map_err(|e| format!("bad --seed: {e}"))?),
            "--workers" => {
                cli.workers = Some(
                    value()?
                        .parse()
                        .map_err(|e| format!("bad --workers: {e}"))?,
                )
            }
            "--profile" => {
                let v = value()?;
                cli.profile = Profile::parse(&v)
                    .ok_or_else(|| format!("bad --profile `{v}` (desk or paper)"))?;
            }
            other => return Err(format!("unknown flag `{other}`\n{USAGE}")),
        }
    }
    Ok(cli)
}

fn run(cli: &Cli) -> inr_recovery::Result<()> {
    let raw = match &cli.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    match cli.command.as_str() {
        "exact-recovery" => {
            let mut cfg = exact_recovery::ExactRecoveryConfig::for_profile(cli.profile);
            cfg.apply(&raw)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            if let Some(workers) = cli.workers {
                cfg.workers = workers;
            }
            let results = exact_recovery::run_to_dir(&cfg, cli.profile, &cli.out)?;
            println!("wrote {}", cli.out.join("table.csv").display());
            for cell in &results.cells {
                println!(
                    "{} K={} W={}: {}/{} recovered",
                    cell.reg.label(),
                    cell.k,
                    cell.w,
                    cell.successes,
                    cell.trials
                );
            }
            let diverged = results.outcomes.iter().filter(|o| o.diverged).count();
            if diverged > 0 {
                eprintln!("warning: {diverged} trial(s) reported constraint divergence");
            }
        }
        "phantom" => {
            let mut cfg = phantom::PhantomConfig::for_profile(cli.profile);
            cfg.apply(&raw)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            if let Some(workers) = cli.workers {
                cfg.workers = workers;
            }
            let results = phantom::run_to_dir(&cfg, cli.profile, &cli.out)?;
            println!("wrote {}", cli.out.join("metrics.csv").display());
            println!("zero-fill mse = {:.6e}", results.zero_fill_mse);
            for &reg in &cfg.regs {
                if let Some(best) = results.best_for(reg) {
                    println!(
                        "{}: best lambda = {:e}, mse = {:.6e}",
                        reg.label(),
                        best.lambda,
                        best.final_mse
                    );
                }
            }
        }
        "certify" => {
            let mut cfg = certify::CertifyConfig::for_profile(cli.profile);
            cfg.apply(&raw)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let results = certify::run_to_dir(&cfg, cli.profile, &cli.out)?;
            print!("{}", results.summary_text);
            println!("wrote {}", cli.out.join("summary.txt").display());
        }
        _ => unreachable!("validated in parse_cli"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match parse_cli() {
        Ok(cli) => cli,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
