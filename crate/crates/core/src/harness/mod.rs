//! Key-recovery experiments on the cipher model.

mod report;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use report::{summarize, write_depth_csv, write_summary_csv, write_trials_csv, DepthRow, Summary};

use crate::aradi::{self, Key};
use crate::aradimodel::{build_system, ModelConfig};
use crate::boolring::VarId;
use crate::error::{Error, Result};
use crate::gbengine::Status;
use crate::multistep::{brute_force_polys, multi_solve, Guess, OracleSpec, SolveParams, SolveTree};

/// The eight blocks of 32 consecutive key-bit indices.
pub fn guess_blocks() -> Vec<Vec<usize>> {
    (0..8).map(|l| (32 * l..32 * l + 32).collect()).collect()
}

pub const REVERSE: [usize; 8] = [7, 6, 5, 4, 3, 2, 1, 0];
pub const IDENTITY: [usize; 8] = [0, 1, 2, 3, 4, 5, 6, 7];

/// `reverse`, `identity` or a comma-separated permutation of `0..8`.
pub fn parse_permutation(s: &str) -> Result<Vec<usize>> {
    let perm: Vec<usize> = match s.trim() {
        "reverse" => REVERSE.to_vec(),
        "identity" => IDENTITY.to_vec(),
        list => list
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Permutation(s.to_string())))
            .collect::<Result<_>>()?,
    };
    check_permutation(&perm)?;
    Ok(perm)
}

fn check_permutation(perm: &[usize]) -> Result<()> {
    let mut seen = [false; 8];
    if perm.len() != 8 {
        return Err(Error::Permutation(format!("{perm:?} has {} entries, expected 8", perm.len())));
    }
    for &b in perm {
        if b >= 8 || seen[b] {
            return Err(Error::Permutation(format!("{perm:?} is not a permutation of 0..8")));
        }
        seen[b] = true;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuessPlan {
    pub permutation: Vec<usize>,
    pub k: usize,
    /// All 256 key-bit indices in permuted block order; the first `k` are
    /// guessed, the rest give the branching order.
    pub sequence: Vec<usize>,
}

impl GuessPlan {
    pub fn guessed(&self) -> &[usize] {
        &self.sequence[..self.k]
    }

    pub fn remaining(&self) -> &[usize] {
        &self.sequence[self.k..]
    }
}

pub fn guess_plan(perm: &[usize], k: usize) -> Result<GuessPlan> {
    check_permutation(perm)?;
    if k > 256 {
        return Err(Error::GuessCount(k));
    }
    let blocks = guess_blocks();
    Ok(GuessPlan {
        permutation: perm.to_vec(),
        k,
        sequence: perm.iter().flat_map(|&b| blocks[b].iter().copied()).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GuessMode {
    /// Uniformly random values, redrawn if they happen to match the key.
    Random,
    /// The generating key's bits.
    TrueKey,
    /// The key's bits with one uniformly chosen position flipped.
    FlipOne,
}

impl FromStr for GuessMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "random" => Ok(GuessMode::Random),
            "truekey" => Ok(GuessMode::TrueKey),
            "flipone" => Ok(GuessMode::FlipOne),
            _ => Err(format!("unknown guess mode {s:?} (expected random, truekey or flipone)")),
        }
    }
}

impl fmt::Display for GuessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GuessMode::Random => "random",
            GuessMode::TrueKey => "truekey",
            GuessMode::FlipOne => "flipone",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub rounds: usize,
    pub guesses: usize,
    pub trials: usize,
    pub seed: u64,
    pub oracle: OracleSpec,
    pub d1: usize,
    pub d2: usize,
    pub tau: Duration,
    pub permutation: Vec<usize>,
    pub mode: GuessMode,
    pub whitening: bool,
    /// Allows more than four rounds.
    pub full_scale: bool,
    /// Wall-clock cap per trial; exceeding it yields [`Outcome::Timeout`].
    pub trial_timeout: Option<Duration>,
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            rounds: 2,
            guesses: 236,
            trials: 1,
            seed: 0,
            oracle: OracleSpec::T,
            d1: 0,
            d2: 2,
            tau: Duration::from_secs(60),
            permutation: REVERSE.to_vec(),
            mode: GuessMode::Random,
            whitening: false,
            full_scale: false,
            trial_timeout: None,
            parallel: false,
        }
    }
}

pub const DESK_SCALE_ROUNDS: usize = 4;

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=aradi::ROUNDS).contains(&self.rounds) {
            return Err(Error::Rounds(self.rounds));
        }
        if self.rounds > DESK_SCALE_ROUNDS && !self.full_scale {
            return Err(Error::Rounds(self.rounds));
        }
        if self.guesses > 256 {
            return Err(Error::GuessCount(self.guesses));
        }
        if self.mode == GuessMode::FlipOne && self.guesses == 0 {
            return Err(Error::GuessCount(0));
        }
        check_permutation(&self.permutation)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Solved,
    Inconsistent,
    /// A solution was found but does not re-encrypt correctly.
    WrongKey,
    Timeout,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Solved => "solved",
            Outcome::Inconsistent => "inconsistent",
            Outcome::WrongKey => "wrong_key",
            Outcome::Timeout => "timeout",
        })
    }
}

#[derive(Clone, Debug)]
pub struct TrialRecord {
    pub trial: usize,
    pub rounds: usize,
    pub guesses: usize,
    pub mode: GuessMode,
    pub oracle: String,
    pub key: Key,
    pub plaintext: u128,
    pub outcome: Outcome,
    pub recovered_key: Option<Key>,
    /// For inconsistent outcomes with few residual variables: whether
    /// exhaustive search confirmed the empty variety.
    pub confirmed_empty: Option<bool>,
    pub stats: SolveTree,
    pub total: Duration,
}

impl TrialRecord {
    pub fn tame_gb_seconds(&self) -> Vec<f64> {
        self.stats.gb_seconds(Status::Tame)
    }
}

/// Mean and population standard deviation; zeros for an empty sample.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Residual systems with at most this many variables are re-checked by
/// exhaustive search.
const CONFIRM_LIMIT: usize = 12;

pub fn trial_rng(seed: u64, trial: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

pub fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialRecord> {
    cfg.validate()?;
    let started = Instant::now();
    let mut rng = trial_rng(cfg.seed, trial);
    let key: Key = std::array::from_fn(|_| rng.gen());
    let pt: u128 = rng.gen();
    let ct = aradi::encrypt(&key, pt, cfg.rounds)?;

    let model = build_system(&ModelConfig::for_key(&key, pt, cfg.rounds, cfg.whitening)?)?;
    let plan = guess_plan(&cfg.permutation, cfg.guesses)?;
    let truth: Vec<bool> = plan.guessed().iter().map(|&j| aradi::key_bit(&key, j)).collect();
    let values: Vec<bool> = match cfg.mode {
        GuessMode::TrueKey => truth.clone(),
        GuessMode::FlipOne => {
            let mut v = truth.clone();
            let i = rng.gen_range(0..v.len());
            v[i] = !v[i];
            v
        }
        GuessMode::Random => loop {
            let v: Vec<bool> = (0..truth.len()).map(|_| rng.gen()).collect();
            if v != truth || truth.is_empty() {
                break v;
            }
        },
    };
    let guess = Guess::from_pairs(
        plan.guessed()
            .iter()
            .zip(&values)
            .map(|(&j, &b)| (model.key_vars[j], b))
            .collect(),
    );
    let order: Vec<VarId> = plan.remaining().iter().map(|&j| model.key_vars[j]).collect();
    let params = SolveParams {
        d1: cfg.d1,
        d2: cfg.d2,
        tau: cfg.tau,
        order,
        deadline: cfg.trial_timeout.map(|t| started + t),
    };
    let oracle = cfg.oracle.build();

    let mut record = TrialRecord {
        trial,
        rounds: cfg.rounds,
        guesses: cfg.guesses,
        mode: cfg.mode,
        oracle: cfg.oracle.to_string(),
        key,
        plaintext: pt,
        outcome: Outcome::Timeout,
        recovered_key: None,
        confirmed_empty: None,
        stats: SolveTree::default(),
        total: Duration::ZERO,
    };
    match multi_solve(&model.system.polys, &guess, oracle.as_ref(), &params) {
        Err(Error::Timeout) => {}
        Err(e) => return Err(e),
        Ok(res) => {
            record.stats = res.stats;
            match res.solution {
                None => {
                    record.outcome = Outcome::Inconsistent;
                    let residual: Vec<_> = model
                        .system
                        .polys
                        .iter()
                        .map(|p| p.partial_eval(&guess.assignment()))
                        .filter(|p| !p.is_zero())
                        .collect();
                    if crate::boolring::active_vars(&residual).len() <= CONFIRM_LIMIT {
                        record.confirmed_empty = Some(brute_force_polys(&residual)?.is_empty());
                    }
                }
                Some(a) => {
                    let k = model.key_from_assignment(&a)?;
                    record.outcome = if aradi::encrypt(&k, pt, cfg.rounds)? == ct {
                        Outcome::Solved
                    } else {
                        Outcome::WrongKey
                    };
                    record.recovered_key = Some(k);
                }
            }
        }
    }
    record.total = started.elapsed();
    Ok(record)
}

pub fn run_campaign(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    if cfg.parallel {
        (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t)).collect()
    } else {
        (0..cfg.trials).map(|t| run_trial(cfg, t)).collect()
    }
}
