//! Simulation driver: obtain model parameters (sampled or from a
//! file), run one chain per start mode, and write all outputs to a
//! directory.
//!
//! Layout of `out_dir` after a run:
//!   beta.txt                      one parameter per line
//!   trace_<start>.csv             iter,accepted,movavg,ties
//!   ecdf_<start>.csv              snapshot_t,degree,cum_fraction
//! for <start> in stationary, sparse, dense. The three chains use
//! seeds `seed+1`, `seed+2`, `seed+3`; parameter sampling uses `seed`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use hset_core::mcmc::{run_chain, BetaModel, ChainConfig, McmcError, StartMode};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JobError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Chain(#[from] McmcError),
    #[error("parameter file {path}: {reason}")]
    Beta { path: PathBuf, reason: String },
}

#[derive(Debug, Clone)]
pub struct McmcJob {
    pub n: usize,
    pub iterations: u64,
    pub seed: u64,
    /// When set, parameters are read from this file instead of sampled.
    pub beta_file: Option<PathBuf>,
    pub window: usize,
    pub snapshot_every: u64,
    pub out_dir: PathBuf,
}

#[derive(Debug)]
pub struct ChainOutput {
    pub start: StartMode,
    pub trace_path: PathBuf,
    pub ecdf_path: PathBuf,
    pub acceptance_rate: f64,
    pub final_ties: usize,
}

#[derive(Debug)]
pub struct JobReport {
    pub beta_path: PathBuf,
    pub chains: Vec<ChainOutput>,
}

fn write_file(path: &Path, contents: &str) -> Result<(), JobError> {
    fs::write(path, contents).map_err(|source| JobError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One real per line; blank lines ignored; must yield exactly `n`
/// finite values.
pub fn load_beta(path: &Path, n: usize) -> Result<BetaModel, JobError> {
    let text = fs::read_to_string(path).map_err(|source| JobError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| JobError::Beta {
            path: path.to_path_buf(),
            reason: format!("line {}: not a number: {line:?}", lineno + 1),
        })?;
        if !v.is_finite() {
            return Err(JobError::Beta {
                path: path.to_path_buf(),
                reason: format!("line {}: non-finite value", lineno + 1),
            });
        }
        values.push(v);
    }
    if values.len() != n {
        return Err(JobError::Beta {
            path: path.to_path_buf(),
            reason: format!("expected {n} values, found {}", values.len()),
        });
    }
    Ok(BetaModel::new(values)?)
}

pub fn run_job(job: &McmcJob) -> Result<JobReport, JobError> {
    fs::create_dir_all(&job.out_dir).map_err(|source| JobError::Io {
        path: job.out_dir.clone(),
        source,
    })?;

    let model = match &job.beta_file {
        Some(path) => load_beta(path, job.n)?,
        None => {
            let mut rng = ChaCha12Rng::seed_from_u64(job.seed);
            BetaModel::sample_standard(job.n, &mut rng)?
        }
    };

    // Persist the parameters whether sampled or loaded, so any run can
    // be repeated from its own output directory.
    let beta_path = job.out_dir.join("beta.txt");
    let mut beta_text = String::new();
    for b in model.beta() {
        beta_text.push_str(&format!("{b}\n"));
    }
    write_file(&beta_path, &beta_text)?;

    let starts = [StartMode::Stationary, StartMode::Sparse, StartMode::Dense];
    let mut chains = Vec::with_capacity(starts.len());
    for (idx, &start) in starts.iter().enumerate() {
        let mut config = ChainConfig::new(job.n, job.iterations, start, job.seed + 1 + idx as u64);
        config.window = job.window;
        config.snapshot_every = job.snapshot_every;
        let trace = run_chain(&config, &model)?;

        let trace_path = job.out_dir.join(format!("trace_{}.csv", start.label()));
        write_file(&trace_path, &trace.trace_csv())?;
        let ecdf_path = job.out_dir.join(format!("ecdf_{}.csv", start.label()));
        write_file(&ecdf_path, &trace.ecdf_csv())?;

        let accepted = trace.accepted.iter().filter(|&&a| a).count();
        chains.push(ChainOutput {
            start,
            trace_path,
            ecdf_path,
            acceptance_rate: accepted as f64 / trace.accepted.len() as f64,
            final_ties: *trace.ties.last().expect("at least one iteration"),
        });
    }

    Ok(JobReport { beta_path, chains })
}
