//! Acceptance checks, one line per criterion.
//!
//! Runs without the libtest harness so the verdicts are always printed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use multisolve::aradi::{self, Key, L_SHIFTS};
use multisolve::aradimodel::{build_system, sbox_template, symbolic_round_keys, trace_assignment, ModelConfig};
use multisolve::boolring::{Assignment, BoolPoly, Monomial, PolySystem, VarId, VarRegistry};
use multisolve::gbengine::Status;
use multisolve::harness::{run_campaign, ExperimentConfig, GuessMode, Outcome, REVERSE};
use multisolve::multistep::{
    brute_force_variety, solve, speedup_ratio, tree_verify, OracleH, OracleSpec, SolveParams, SolveResult,
};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_key(rng: &mut ChaCha8Rng) -> Key {
    std::array::from_fn(|_| rng.gen())
}

fn criterion_1() -> Check {
    let t = sbox_template();
    ensure(t.polys.len() == 21, || format!("{} template polynomials", t.polys.len()))?;
    let mut zeros = Vec::new();
    for point in 0u32..256 {
        let a = Assignment::from_pairs((0..8).map(|i| (VarId(i), point >> i & 1 == 1)));
        if t.polys.iter().all(|p| !p.evaluate(&a).unwrap()) {
            zeros.push(((point & 15) as u8, (point >> 4) as u8));
        }
    }
    ensure(zeros.len() == 16, || format!("{} common zeros", zeros.len()))?;
    let mut images: Vec<u8> = zeros.iter().map(|z| z.1).collect();
    images.sort_unstable();
    ensure(images == (0..16).collect::<Vec<_>>(), || "zero set is not a permutation graph".into())?;
    for (x, y) in zeros {
        ensure(aradi::sbox(x) == y, || format!("S({x}) = {} but the template gives {y}", aradi::sbox(x)))?;
    }
    Ok("16 common zeros in GF(2)^8, equal to the bit-slice S-box graph".into())
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    for rounds in [1, 2, 4, 8, 16] {
        for _ in 0..100 {
            let key = random_key(&mut rng);
            let pt: u128 = rng.gen();
            let model = build_system(&ModelConfig::for_key(&key, pt, rounds, false).unwrap()).unwrap();
            let trace = aradi::encrypt_traced(&key, pt, rounds).unwrap();
            let a = trace_assignment(&model, &trace, &key).unwrap();
            for (i, p) in model.system.polys.iter().enumerate() {
                ensure(!p.evaluate(&a).unwrap(), || format!("rounds {rounds}: polynomial {i} does not vanish"))?;
            }
            checked += model.system.polys.len();
        }
    }
    Ok(format!("500 instances over rounds 1,2,4,8,16; {checked} polynomial evaluations all zero"))
}

/// Random polynomial with up to `terms` monomials of degree <= `deg`.
fn random_poly(rng: &mut ChaCha8Rng, n: u32, deg: usize, terms: usize) -> BoolPoly {
    BoolPoly::from_monomials((0..rng.gen_range(1..=terms)).map(|_| {
        let d = rng.gen_range(0..=deg);
        Monomial::from_vars((0..d).map(|_| VarId(rng.gen_range(0..n))))
    }))
}

/// Zeros of `polys` by direct evaluation at every point of GF(2)^n.
fn enumerate_zeros(polys: &[BoolPoly], n: u32) -> Vec<u32> {
    (0u32..1 << n)
        .filter(|&pt| {
            let a = Assignment::from_pairs((0..n).map(|i| (VarId(i), pt >> i & 1 == 1)));
            polys.iter().all(|p| !p.evaluate(&a).unwrap())
        })
        .collect()
}

struct Instance {
    system: PolySystem,
    zeros: Vec<u32>,
    d2: usize,
}

/// Systems with at most one solution; half of them have a planted zero.
fn small_instances(count: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.gen_range(2..=12u32);
        let m = rng.gen_range(1..=20usize);
        let planted: Option<u32> = rng.gen_bool(0.5).then(|| rng.gen_range(0..1 << n));
        let mut polys = Vec::new();
        for _ in 0..m {
            let mut p = random_poly(&mut rng, n, 3, 6);
            if let Some(pt) = planted {
                let a = Assignment::from_pairs((0..n).map(|i| (VarId(i), pt >> i & 1 == 1)));
                if p.evaluate(&a).unwrap() {
                    p = p.add(&BoolPoly::one());
                }
            }
            if !p.is_zero() {
                polys.push(p);
            }
        }
        if polys.is_empty() {
            continue;
        }
        let zeros = enumerate_zeros(&polys, n);
        if zeros.len() > 1 {
            continue;
        }
        let mut system = PolySystem::new(VarRegistry::numbered(n as usize));
        for p in polys {
            system.push(p);
        }
        let d2 = system.maxdeg().max(1) as usize + 1;
        out.push(Instance { system, zeros, d2 });
    }
    out
}

struct Runs {
    /// (instance index, d1, oracle label, result)
    results: Vec<(usize, usize, String, SolveResult)>,
    instances: Vec<Instance>,
}

fn params(d1: usize, d2: usize) -> SolveParams {
    SolveParams {
        d1,
        d2,
        tau: Duration::from_secs(600),
        ..SolveParams::default()
    }
}

fn criterion_3(runs: &mut Option<Runs>) -> Check {
    let instances = small_instances(240);
    let mut results = Vec::new();
    let (mut solvable, mut empty) = (0, 0);
    for (idx, inst) in instances.iter().enumerate() {
        let n = inst.system.registry.len();
        let bf = brute_force_variety(&inst.system).unwrap();
        let bf_points: Vec<u32> = bf
            .iter()
            .map(|a| a.iter().fold(0, |acc, (v, b)| acc | (b as u32) << v.0))
            .collect();
        ensure(bf_points == inst.zeros, || format!("instance {idx}: brute_force_variety disagrees with evaluation"))?;
        if inst.zeros.is_empty() {
            empty += 1;
        } else {
            solvable += 1;
        }
        let oracles = [
            OracleSpec::T,
            OracleSpec::W,
            OracleSpec::H(n / 2),
            OracleSpec::Nrv(n / 2),
        ];
        for d1 in [0, 1] {
            for spec in oracles {
                let res = solve(&inst.system, spec.build().as_ref(), &params(d1, inst.d2))
                    .map_err(|e| format!("instance {idx}, oracle {spec}, d1 {d1}: {e}"))?;
                let got: Vec<u32> = res
                    .solution
                    .iter()
                    .map(|a| (0..n as u32).fold(0, |acc, i| acc | ((a.get(VarId(i)) == Some(true)) as u32) << i))
                    .collect();
                ensure(got == inst.zeros, || {
                    format!("instance {idx}, oracle {spec}, d1 {d1}: solver {got:?}, brute force {:?}", inst.zeros)
                })?;
                results.push((idx, d1, spec.to_string(), res));
            }
        }
    }
    let total = results.len();
    *runs = Some(Runs { results, instances });
    Ok(format!(
        "{} systems ({solvable} with one solution, {empty} inconsistent) x 4 oracles x d1 in {{0,1}}: {total} runs match brute force",
        solvable + empty
    ))
}

fn criterion_4(runs: &Runs) -> Check {
    let mut checked = 0;
    for (idx, d1, oracle, r) in &runs.results {
        if r.solution.is_some() || r.stats.early_termination {
            continue;
        }
        let s = &r.stats;
        ensure(s.nodes == 2 * s.leaves - 1 && s.internal == s.leaves - 1 && tree_verify(s), || {
            format!("instance {idx}, oracle {oracle}, d1 {d1}: N={} M={} L={}", s.nodes, s.internal, s.leaves)
        })?;
        checked += 1;
    }
    ensure(checked > 0, || "no inconsistent runs".into())?;
    Ok(format!("N = 2L - 1 and M = L - 1 on all {checked} inconsistent runs"))
}

fn criterion_5(runs: &Runs) -> Check {
    let mut checked = 0;
    for (idx, d1, oracle, r) in &runs.results {
        if oracle != "t" || r.solution.is_some() {
            continue;
        }
        let inst = &runs.instances[*idx];
        let c = r.stats.max_tame_depth.expect("a complete tree has leaves");
        let hybrid = solve(&inst.system, &OracleH { threshold: c }, &params(*d1, inst.d2)).unwrap();
        let (t, h) = (&r.stats, &hybrid.stats);
        ensure(t.tame_cases() <= h.tame_cases() && t.wild_cases() <= h.wild_cases(), || {
            format!(
                "instance {idx}, d1 {d1}, C={c}: t has {}/{} tame/wild, h:{c} has {}/{}",
                t.tame_cases(),
                t.wild_cases(),
                h.tame_cases(),
                h.wild_cases()
            )
        })?;
        checked += 1;
    }
    ensure(checked > 0, || "no inconsistent runs".into())?;
    Ok(format!("OracleT case totals <= OracleH_C totals on {checked} inconsistent runs"))
}

fn criterion_6(runs: &Runs) -> Check {
    let mut checked = 0;
    for (idx, d1, oracle, r) in &runs.results {
        if oracle != "t" || r.stats.early_termination {
            continue;
        }
        let s = &r.stats;
        let observed = Ratio::new(s.nodes, s.leaves);
        let closed = Ratio::from_integer(2) - Ratio::new(1, s.leaves);
        ensure(observed == closed && speedup_ratio(s.leaves, 2) == closed, || {
            format!("instance {idx}, d1 {d1}: N/L = {observed}, 2 - 1/L = {closed}")
        })?;
        checked += 1;
    }
    Ok(format!("N/L = 2 - 1/L exactly on {checked} complete OracleT trees"))
}

fn key_recovery_config(mode: GuessMode) -> ExperimentConfig {
    ExperimentConfig {
        rounds: 2,
        guesses: 236,
        trials: 20,
        seed: 7,
        oracle: OracleSpec::T,
        d1: 0,
        d2: 2,
        tau: Duration::from_secs(120),
        permutation: REVERSE.to_vec(),
        mode,
        trial_timeout: Some(Duration::from_secs(120)),
        ..ExperimentConfig::default()
    }
}

fn criterion_7() -> Check {
    let solved = run_campaign(&key_recovery_config(GuessMode::TrueKey)).map_err(|e| e.to_string())?;
    let ok = solved
        .iter()
        .filter(|r| r.outcome == Outcome::Solved && r.recovered_key == Some(r.key))
        .count();
    ensure(ok == 20, || format!("{ok}/20 true-key trials recovered the key"))?;
    let flipped = run_campaign(&key_recovery_config(GuessMode::FlipOne)).map_err(|e| e.to_string())?;
    let refuted = flipped.iter().filter(|r| r.outcome == Outcome::Inconsistent).count();
    ensure(refuted == 20, || format!("{refuted}/20 flipped-bit trials ended inconsistent"))?;
    let slowest = solved.iter().chain(&flipped).map(|r| r.total).max().unwrap_or_default();
    Ok(format!("20/20 keys recovered, 20/20 flipped guesses refuted; slowest trial {:.3}s", slowest.as_secs_f64()))
}

fn criterion_8() -> Check {
    let model = build_system(&ModelConfig::for_key(&[0x0123_4567; 8], 42, 16, false).unwrap()).unwrap();
    let polys = &model.system.polys;
    let quadratic = polys.iter().filter(|p| p.degree() == 2).count();
    let linear = polys.iter().filter(|p| p.degree() == 1).count();
    let vars = model.system.registry.len();
    ensure(polys.len() == 10_880 && quadratic == 10_752 && linear == 128 && vars == 2_304, || {
        format!("{} polynomials ({quadratic} quadratic, {linear} linear) over {vars} variables", polys.len())
    })?;
    Ok("10880 polynomials (10752 quadratic + 128 linear) over 2304 variables".into())
}

fn criterion_9() -> Check {
    let cfg = ExperimentConfig {
        rounds: 16,
        guesses: 252,
        trials: 1,
        seed: 9,
        mode: GuessMode::TrueKey,
        full_scale: true,
        tau: Duration::from_secs(1800),
        trial_timeout: Some(Duration::from_secs(1800)),
        ..ExperimentConfig::default()
    };
    let r = run_campaign(&cfg).map_err(|e| e.to_string())?.remove(0);
    ensure(r.outcome == Outcome::Solved && r.recovered_key == Some(r.key), || {
        format!("outcome {} after {:.1}s", r.outcome, r.total.as_secs_f64())
    })?;
    let tame = r.stats.computed_wild == 0 && r.stats.gb_calls.iter().all(|c| c.status == Status::Tame);
    ensure(tame, || "a Gröbner attempt came back wild".into())?;
    Ok(format!(
        "16 rounds, 252 guessed: tame at depth {}, key recovered in {:.1}s (Gröbner {:.1}s)",
        r.stats.max_depth,
        r.total.as_secs_f64(),
        r.tame_gb_seconds().iter().sum::<f64>()
    ))
}

fn criterion_10() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for rounds in [1, 8, 16] {
        for _ in 0..10_000 {
            let key = random_key(&mut rng);
            let pt: u128 = rng.gen();
            let ct = aradi::encrypt(&key, pt, rounds).unwrap();
            ensure(aradi::decrypt(&key, ct, rounds).unwrap() == pt, || format!("round trip failed at {rounds} rounds"))?;
        }
    }
    for &(a, b, c) in &L_SHIFTS {
        for _ in 0..10_000 {
            let w: u32 = rng.gen();
            ensure(aradi::l_map(aradi::l_map(w, a, b, c), a, b, c) == w, || format!("L({a},{b},{c}) not an involution"))?;
        }
    }
    let key_vars: Vec<VarId> = (0..256).map(VarId).collect();
    let symbolic = symbolic_round_keys(&key_vars, 16);
    for _ in 0..100 {
        let key = random_key(&mut rng);
        let a = Assignment::from_pairs((0..256).map(|j| (VarId(j as u32), aradi::key_bit(&key, j))));
        for (r, rk) in aradi::key_schedule(&key).iter().enumerate() {
            for w in 0..4 {
                ensure(symbolic[r][w].evaluate(&a).unwrap() == rk[w], || format!("round key {r} word {w} differs"))?;
            }
        }
    }
    Ok("30000 encrypt/decrypt round trips, 40000 involution checks, 100 symbolic key schedules".into())
}

fn main() {
    let mut runs: Option<Runs> = None;
    let mut failures = 0;
    let budgets: [(usize, Duration); 10] = [
        (1, Duration::from_secs(1)),
        (2, Duration::from_secs(60)),
        (3, Duration::from_secs(300)),
        (4, Duration::MAX),
        (5, Duration::MAX),
        (6, Duration::MAX),
        (7, Duration::from_secs(600)),
        (8, Duration::from_secs(30)),
        (9, Duration::from_secs(1800)),
        (10, Duration::from_secs(60)),
    ];
    for (n, budget) in budgets {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| match n {
            1 => criterion_1(),
            2 => criterion_2(),
            3 => criterion_3(&mut runs),
            4..=6 => match &runs {
                None => Err("criterion 3 produced no runs".into()),
                Some(r) if n == 4 => criterion_4(r),
                Some(r) if n == 5 => criterion_5(r),
                Some(r) => criterion_6(r),
            },
            7 => criterion_7(),
            8 => criterion_8(),
            9 => criterion_9(),
            _ => criterion_10(),
        }))
        .unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|m| {
            if elapsed > budget {
                Err(format!("{m}; but took {:.1}s, over the {:.0}s budget", elapsed.as_secs_f64(), budget.as_secs_f64()))
            } else {
                Ok(m)
            }
        });
        match outcome {
            Ok(m) => println!("criterion {n:>2}: PASS  {m}  [{:.2}s]", elapsed.as_secs_f64()),
            Err(m) => {
                failures += 1;
                println!("criterion {n:>2}: FAIL  {m}  [{:.2}s]", elapsed.as_secs_f64());
            }
        }
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
