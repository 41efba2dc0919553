use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use multisolve::aradi;
use multisolve::aradimodel::{build_system, ModelConfig};
use multisolve::boolring::anf::parse_anf;
use multisolve::harness::{self, ExperimentConfig, GuessMode, Outcome};
use multisolve::multistep::{solve, OracleSpec, SolveParams};

#[derive(Parser)]
#[command(name = "multisolve", version, about = "Oracle-driven multistep solving of Boolean systems and ARADI key recovery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encrypt one block.
    Encrypt {
        #[arg(long)]
        key: String,
        #[arg(long)]
        pt: String,
        #[arg(long, default_value_t = 16)]
        rounds: usize,
        /// Write the per-round trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Emit the polynomial model of an encryption in ANF.
    ModelGen {
        #[arg(long)]
        rounds: usize,
        #[arg(long)]
        key: String,
        #[arg(long)]
        pt: String,
        /// Include the final key addition in the output equations.
        #[arg(long)]
        whitening: bool,
        /// Ciphertext to use instead of encrypting `pt`.
        #[arg(long)]
        ct: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an ANF system.
    Solve {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value = "t")]
        oracle: OracleSpec,
        #[arg(long, default_value_t = 0)]
        d1: usize,
        #[arg(long, default_value_t = 2)]
        d2: usize,
        /// Time limit per Gröbner attempt, in seconds.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        /// Write search-tree statistics as JSON.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Run a key-recovery campaign.
    Attack {
        #[arg(long)]
        rounds: usize,
        #[arg(long)]
        guesses: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `reverse`, `identity` or a comma-separated block order.
        #[arg(long, default_value = "reverse")]
        perm: String,
        /// random, truekey or flipone.
        #[arg(long, default_value = "random")]
        mode: GuessMode,
        #[arg(long, default_value = "t")]
        oracle: OracleSpec,
        #[arg(long, default_value_t = 0)]
        d1: usize,
        #[arg(long, default_value_t = 2)]
        d2: usize,
        /// Time limit per Gröbner attempt, in seconds.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        /// Wall-clock cap per trial, in seconds.
        #[arg(long)]
        trial_timeout: Option<f64>,
        #[arg(long)]
        whitening: bool,
        /// Run trials on all cores.
        #[arg(long)]
        parallel: bool,
        /// Per-trial CSV; summary and depth profiles go next to it.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Permit more than four rounds.
        #[arg(long)]
        full_scale: bool,
    },
}

fn seconds(s: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(s).ok().filter(|d| !d.is_zero()).with_context(|| format!("invalid duration {s}"))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Encrypt { key, pt, rounds, trace } => {
            let key = aradi::parse_key(&key)?;
            let pt = aradi::parse_block(&pt)?;
            let t = aradi::encrypt_traced(&key, pt, rounds)?;
            println!("{}", aradi::block_hex(t.ciphertext.to_u128()));
            if let Some(path) = trace {
                write_file(&path, &serde_json::to_string_pretty(&aradi::trace_json(&t))?)?;
            }
        }
        Command::ModelGen { rounds, key, pt, whitening, ct, out } => {
            let key = aradi::parse_key(&key)?;
            let pt = aradi::parse_block(&pt)?;
            let cfg = match ct {
                None => ModelConfig::for_key(&key, pt, rounds, whitening)?,
                Some(ct) => {
                    let ct = aradi::parse_block(&ct)?;
                    if !(1..=aradi::ROUNDS).contains(&rounds) {
                        bail!("round count {rounds} outside 1..=16");
                    }
                    let strip = (!whitening).then(|| aradi::key_schedule(&key)[rounds]);
                    ModelConfig::from_ciphertext(rounds, pt, ct, strip)
                }
            };
            let text = build_system(&cfg)?.to_anf();
            match out {
                Some(path) => write_file(&path, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Solve { system, oracle, d1, d2, timeout, stats } => {
            let text = std::fs::read_to_string(&system).with_context(|| format!("reading {}", system.display()))?;
            let sys = parse_anf(&text).with_context(|| format!("parsing {}", system.display()))?;
            let params = SolveParams {
                d1,
                d2,
                tau: seconds(timeout)?,
                ..SolveParams::default()
            };
            let res = solve(&sys, oracle.build().as_ref(), &params)?;
            match &res.solution {
                None => println!("inconsistent"),
                Some(a) => {
                    println!("solved");
                    for (v, b) in a.iter() {
                        println!("{} = {}", sys.registry.name(v), u8::from(b));
                    }
                }
            }
            if let Some(path) = stats {
                write_file(&path, &serde_json::to_string_pretty(&res.stats)?)?;
            }
        }
        Command::Attack {
            rounds,
            guesses,
            trials,
            seed,
            perm,
            mode,
            oracle,
            d1,
            d2,
            timeout,
            trial_timeout,
            whitening,
            parallel,
            out,
            full_scale,
        } => {
            if rounds > harness::DESK_SCALE_ROUNDS && !full_scale {
                bail!("{rounds} rounds is beyond desk scale; pass --full-scale to run it anyway");
            }
            let cfg = ExperimentConfig {
                rounds,
                guesses,
                trials,
                seed,
                oracle,
                d1,
                d2,
                tau: seconds(timeout)?,
                permutation: harness::parse_permutation(&perm)?,
                mode,
                whitening,
                full_scale,
                trial_timeout: trial_timeout.map(seconds).transpose()?,
                parallel,
            };
            let records = harness::run_campaign(&cfg)?;
            for r in &records {
                println!(
                    "trial {:>4}  {:<12}  nodes {:>6}  tame {:>6}  wild {:>6}  {:.3}s",
                    r.trial,
                    r.outcome.to_string(),
                    r.stats.nodes,
                    r.stats.tame_cases(),
                    r.stats.wild_cases(),
                    r.total.as_secs_f64()
                );
            }
            let s = harness::summarize(&records);
            let solved = records.iter().filter(|r| r.outcome == Outcome::Solved).count();
            println!(
                "guessed {}  solved {}/{}  tame {}/{} ({:.4})  gb mean {:.4}s  std {:.4}s",
                s.guessed_vars,
                solved,
                records.len(),
                s.tame_cases,
                s.total_cases,
                s.tame_fraction,
                s.solving_time_s,
                s.std_dev_s
            );
            if let Some(path) = out {
                harness::write_trials_csv(&path, &records)?;
                harness::write_summary_csv(&sibling(&path, "summary"), &records)?;
                harness::write_depth_csv(&sibling(&path, "depth"), &records)?;
            }
        }
    }
    Ok(())
}
