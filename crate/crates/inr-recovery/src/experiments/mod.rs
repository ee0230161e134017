//! Seeded experiment harness behind the CLI: exact-recovery probability
//! tables, phantom reconstructions, and certificate reports.
//!
//! Every run is driven by a config (profile defaults, overridden by a
//! key=value config file, overridden by CLI flags) and emits a manifest
//! that snapshots every resolved parameter next to the per-trial outcomes.
//! All randomness flows from the master seed through per-trial derived
//! seeds, and trials are single-threaded internally, so outcomes are
//! independent of the worker count and reproduce bit-for-bit.

pub mod certify;
pub mod config;
pub mod exact_recovery;
pub mod phantom;

use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::Result;

/// Which bundled parameter set a command starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// CI-runnable scale.
    Desk,
    /// The full-size study (hours of compute).
    Paper,
}

impl Profile {
    pub fn parse(s: &str) -> Option<Profile> {
        match s {
            "desk" => Some(Profile::Desk),
            "paper" => Some(Profile::Paper),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Profile::Desk => "desk",
            Profile::Paper => "paper",
        }
    }
}

/// A reproducible record of one experiment invocation: the full resolved
/// config plus per-trial outcome rows. Deliberately timestamp-free so a
/// replay produces an identical file.
#[derive(Debug, Clone)]
pub struct Manifest {
    pub command: String,
    pub profile: String,
    pub config: Vec<(String, String)>,
    pub outcome_header: String,
    pub outcomes: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, profile: &str) -> Self {
        Manifest {
            command: command.to_string(),
            profile: profile.to_string(),
            config: Vec::new(),
            outcome_header: String::new(),
            outcomes: Vec::new(),
        }
    }

    pub fn push_config<T: std::fmt::Display>(&mut self, key: &str, value: T) {
        self.config.push((key.to_string(), value.to_string()));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("# inr-recovery experiment manifest\n");
        out.push_str(&format!("command = {}\n", self.command));
        out.push_str(&format!("version = {}\n", env!("CARGO_PKG_VERSION")));
        out.push_str(&format!("profile = {}\n", self.profile));
        out.push_str("\n[config]\n");
        for (k, v) in &self.config {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out.push_str("\n[outcomes]\n");
        out.push_str(&self.outcome_header);
        out.push('\n');
        for line in &self.outcomes {
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut f = std::fs::File::create(dir.join("manifest.txt"))?;
        f.write_all(self.render().as_bytes())?;
        Ok(())
    }
}

/// Runs `count` independent jobs over a small thread pool and returns their
/// results in job order, regardless of scheduling. Jobs must not share
/// mutable state; determinism follows from each job being a pure function
/// of its index.
pub(crate) fn run_indexed<T, F>(count: usize, workers: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = effective_workers(workers).min(count.max(1));
    if workers <= 1 || count <= 1 {
        return (0..count).map(job).collect();
    }
    let results: Mutex<Vec<Option<T>>> = Mutex::new((0..count).map(|_| None).collect());
    let cursor = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = cursor.fetch_add(1, Ordering::Relaxed);
                if idx >= count {
                    break;
                }
                let value = job(idx);
                results.lock().unwrap()[idx] = Some(value);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|v| v.expect("every job ran"))
        .collect()
}

/// Stable tag for seed derivation per regularizer.
pub(crate) fn reg_tag(reg: crate::training::RegKind) -> u64 {
    match reg {
        crate::training::RegKind::StandardWd => 1,
        crate::training::RegKind::ModifiedWd => 2,
    }
}

pub(crate) fn effective_workers(requested: usize) -> usize {
    if requested > 0 {
        requested
    } else {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    }
}

pub(crate) fn write_text_file(dir: &Path, name: &str, content: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), content)?;
    Ok(())
}
