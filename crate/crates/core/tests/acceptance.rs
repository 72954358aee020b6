//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Every seed below is fixed in advance.

use std::process::ExitCode;
use std::time::Instant;

use topk_shapley::batch::{run_batch, RunSpec};
use topk_shapley::estimators::{
    select_players, Algorithm, AtKParams, EstimatorState, Mode, PairStats, RunOptions,
};
use topk_shapley::game::{
    exact_shapley, exact_shapley_extended, make_airport_game, make_random_sou_game,
    make_unanimity_game, value_table, Game,
};
use topk_shapley::harness::{parse_config, run_bench};
use topk_shapley::metrics::{
    cmcs_mse_prediction, covariance_formula, exact_moments, inclusion_exclusion_error, mse,
    top_k_lower_bound, GameMoments,
};
use topk_shapley::numeric::mean_and_se;
use topk_shapley::sampling::normal_cdf;
use topk_shapley::{Execution, RandomSource};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn batch<G: Game + ?Sized>(
    game: &G,
    algorithm: Algorithm,
    mode: Mode,
    k: usize,
    seed: u64,
    runs: usize,
) -> Vec<topk_shapley::estimators::RunResult> {
    run_batch(
        game,
        &RunSpec::new(algorithm, mode, k),
        seed,
        runs,
        Execution::Parallel,
    )
    .expect("estimator run")
}

/// 100 random sum-of-unanimity games with 2 to 10 players.
fn random_games(
    count: u64,
    max_n: usize,
    base: u64,
) -> Vec<topk_shapley::game::SumOfUnanimityGame> {
    (0..count)
        .map(|i| {
            let n = 2 + (i as usize % (max_n - 1));
            make_random_sou_game(n, 1 + (i as usize % 12), base + i).unwrap()
        })
        .collect()
}

fn representation_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    for g in random_games(100, 10, 100) {
        let a = exact_shapley(&g).unwrap();
        let b = exact_shapley_extended(&g).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            worst = worst.max((x - y).abs());
        }
    }
    outcome(
        worst <= 1e-9,
        format!("100 games, max |difference| = {worst:.3e} (tol 1e-9)"),
    )
}

/// `E[Δ'_i Δ'_j] - E[Δ'_i] E[Δ'_j]` straight from the definition.
fn enumerated_covariance(game: &dyn Game, i: usize, j: usize) -> f64 {
    let n = game.n();
    let table = value_table(game).unwrap();
    let binom = |k: usize| (0..k).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64);
    let (mut ei, mut ej, mut eij) = (0.0, 0.0, 0.0);
    for mask in 0..table.len() {
        let w = 1.0 / ((n + 1) as f64 * binom(mask.count_ones() as usize));
        let di = table[mask | 1 << i] - table[mask & !(1 << i)];
        let dj = table[mask | 1 << j] - table[mask & !(1 << j)];
        ei += w * di;
        ej += w * dj;
        eij += w * di * dj;
    }
    eij - ei * ej
}

fn covariance_closed_form() -> Outcome {
    let mut worst_closed = 0.0f64;
    for n in 2..=10 {
        let g = make_unanimity_game(n).unwrap();
        let expected = 1.0 / (n + 1) as f64 - 1.0 / (n * n) as f64;
        for (i, j) in [(0, 1), (n - 2, n - 1)] {
            worst_closed =
                worst_closed.max((covariance_formula(&g, i, j).unwrap() - expected).abs());
        }
    }
    let mut worst_random = 0.0f64;
    for g in random_games(50, 8, 200) {
        let n = g.n();
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let diff = covariance_formula(&g, i, j).unwrap() - enumerated_covariance(&g, i, j);
                worst_random = worst_random.max(diff.abs());
            }
        }
    }
    outcome(
        worst_closed <= 1e-12 && worst_random <= 1e-9,
        format!(
            "unanimity n=2..10 max error {worst_closed:.3e} (tol 1e-12); 50 random games max error {worst_random:.3e} (tol 1e-9)"
        ),
    )
}

fn test_game_moments() -> Vec<GameMoments> {
    let mut out: Vec<GameMoments> = (2..=8)
        .map(|n| exact_moments(&make_unanimity_game(n).unwrap()).unwrap())
        .collect();
    for costs in [
        &[1.0, 2.0, 3.0][..],
        &[0.0, 5.0],
        &[1.0, 1.0, 2.0, 4.0, 4.5, 7.0, 8.0, 9.5],
    ] {
        out.push(exact_moments(&make_airport_game(costs).unwrap()).unwrap());
    }
    out.extend(
        random_games(50, 8, 300)
            .iter()
            .map(|g| exact_moments(g).unwrap()),
    );
    out
}

fn variance_decomposition() -> Outcome {
    let mut worst = 0.0f64;
    let mut pairs = 0;
    let games = test_game_moments();
    for m in &games {
        for i in 0..m.n() {
            for j in 0..m.n() {
                let rhs = m.var[i] + m.var[j] - 2.0 * m.cov(i, j);
                worst = worst.max((m.pair_var(i, j) - rhs).abs());
                pairs += 1;
            }
        }
    }
    outcome(
        worst <= 1e-9,
        format!(
            "{} games, {pairs} ordered pairs, max error {worst:.3e} (tol 1e-9)",
            games.len()
        ),
    )
}

fn mse_identity() -> Outcome {
    let game = make_unanimity_game(8).unwrap();
    let budget = 9 * 500;
    let moments = exact_moments(&game).unwrap();
    let predicted = cmcs_mse_prediction(&moments, budget).unwrap();
    let phi = exact_shapley(&game).unwrap();
    let results = batch(
        &game,
        Algorithm::Cmcs,
        Mode::FixedBudget(budget),
        1,
        4_000,
        10_000,
    );
    let errors: Vec<f64> = results
        .iter()
        .map(|r| mse(&phi, &r.estimates).unwrap())
        .collect();
    let (mean, se) = mean_and_se(&errors);
    let rel = (mean - predicted).abs() / predicted;
    outcome(
        rel <= 0.05,
        format!(
            "empirical {mean:.6e} (se {se:.2e}) vs predicted {predicted:.6e}, relative gap {:.2}% (tol 5%)",
            100.0 * rel
        ),
    )
}

fn unbiasedness() -> Outcome {
    let games: Vec<(&str, Box<dyn Game>)> = vec![
        ("unanimity(4)", Box::new(make_unanimity_game(4).unwrap())),
        (
            "airport(1,2,3)",
            Box::new(make_airport_game(&[1.0, 2.0, 3.0]).unwrap()),
        ),
    ];
    let algorithms = [
        Algorithm::Independent,
        Algorithm::SameLength,
        Algorithm::Identical,
        Algorithm::Cmcs,
        Algorithm::ApproShapley,
    ];
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut checks = 0;
    for (g_idx, (name, game)) in games.iter().enumerate() {
        let phi = exact_shapley(&**game).unwrap();
        for (a_idx, alg) in algorithms.iter().enumerate() {
            let seed = 5_000 + 10 * g_idx as u64 + a_idx as u64;
            let results = batch(&**game, *alg, Mode::FixedBudget(200), 1, seed, 10_000);
            for p in 0..game.n() {
                let xs: Vec<f64> = results.iter().map(|r| r.estimates[p]).collect();
                let (mean, se) = mean_and_se(&xs);
                let z = (mean - phi[p]).abs() / se;
                worst = worst.max(z);
                checks += 1;
                if z > 3.0 {
                    failures.push(format!("{alg} on {name} player {}: z = {z:.2}", p + 1));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{checks} player means at T=200 over 10^4 runs, worst |z| = {worst:.2} (tol 3){}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; {}", failures.join(", "))
            }
        ),
    )
}

fn budget_accounting() -> Outcome {
    let mut games: Vec<Box<dyn Game>> = (1..=6)
        .map(|n| Box::new(make_unanimity_game(n).unwrap()) as Box<dyn Game>)
        .collect();
    games.push(Box::new(make_airport_game(&[1.0, 2.0, 3.0]).unwrap()));
    games.push(Box::new(make_random_sou_game(6, 9, 17).unwrap()));
    let at_k = AtKParams {
        m_min: 3,
        delta: 0.05,
    };
    let algorithms = [
        Algorithm::Independent,
        Algorithm::SameLength,
        Algorithm::Identical,
        Algorithm::Cmcs,
        Algorithm::ApproShapley,
        Algorithm::GreedyCmcs { m_min: 3 },
        Algorithm::CmcsAtK(at_k),
        Algorithm::SamplingShapAtK(at_k),
    ];
    let mut runs = 0u64;
    let mut violations = Vec::new();
    for game in &games {
        let n = game.n();
        for alg in algorithms {
            for k in 1..=n {
                for budget in 0..=300u64 {
                    for seed in 0..2 {
                        let r = alg
                            .run(
                                &**game,
                                Mode::FixedBudget(budget),
                                k,
                                &mut RandomSource::new(seed),
                                &RunOptions::default(),
                            )
                            .unwrap();
                        runs += 1;
                        if r.budget_used > budget || r.oracle_calls > r.budget_used {
                            violations.push(format!("{alg} n={n} T={budget}"));
                        }
                        let step = n as u64 + 1;
                        if alg == Algorithm::Cmcs && r.budget_used != step * (budget / step) {
                            violations
                                .push(format!("cmcs n={n} T={budget} used {}", r.budget_used));
                        }
                    }
                }
            }
        }
    }
    outcome(
        violations.is_empty(),
        format!(
            "{runs} runs, {} violations{}",
            violations.len(),
            violations
                .first()
                .map(|v| format!(" (first: {v})"))
                .unwrap_or_default()
        ),
    )
}

fn lower_bound_validity() -> Outcome {
    let cases: Vec<(&str, Box<dyn Game>, usize)> = vec![
        (
            "airport(1,2,3)",
            Box::new(make_airport_game(&[1.0, 2.0, 3.0]).unwrap()),
            1,
        ),
        (
            "sou(6,10,7)",
            Box::new(make_random_sou_game(6, 10, 7).unwrap()),
            2,
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (c_idx, (name, game, k)) in cases.iter().enumerate() {
        let n = game.n();
        let moments = exact_moments(&**game).unwrap();
        let phi = &moments.phi;
        for (m_idx, rounds) in [10u64, 50, 200].into_iter().enumerate() {
            let bound = top_k_lower_bound(&moments, rounds, 0.0, *k).unwrap();
            let seed = 7_000 + 10 * c_idx as u64 + m_idx as u64;
            let results = batch(
                &**game,
                Algorithm::Cmcs,
                Mode::FixedBudget((n as u64 + 1) * rounds),
                *k,
                seed,
                10_000,
            );
            let hits: Vec<f64> = results
                .iter()
                .map(|r| {
                    (inclusion_exclusion_error(r.top_k, phi, *k).unwrap() <= 1e-12) as u8 as f64
                })
                .collect();
            let (p, se) = mean_and_se(&hits);
            let ok = bound.clamped <= p + 3.0 * se;
            pass &= ok;
            parts.push(format!(
                "{name} M={rounds}: bound {:.4} vs P {:.4}±{:.4}{}",
                bound.clamped,
                p,
                se,
                if ok { "" } else { " VIOLATED" }
            ));
        }
    }
    outcome(pass, parts.join("; "))
}

fn variant_ordering() -> Outcome {
    let game = make_unanimity_game(8).unwrap();
    let phi = exact_shapley(&game).unwrap();
    let mode = Mode::FixedBudget(900);
    let runs = 2000;
    let eps = |alg| -> Vec<f64> {
        // the same base seed pairs run r of every variant
        batch(&game, alg, mode, 3, 8_000, runs)
            .iter()
            .map(|r| inclusion_exclusion_error(r.top_k, &phi, 3).unwrap())
            .collect()
    };
    let cmcs = eps(Algorithm::Cmcs);
    let identical = eps(Algorithm::Identical);
    let independent = eps(Algorithm::Independent);
    // one-sided 95% upper bound on the mean paired difference must be <= 0
    let upper = |a: &[f64], b: &[f64]| {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let (mean, se) = mean_and_se(&d);
        mean + 1.645 * se
    };
    let u1 = upper(&cmcs, &identical);
    let u2 = upper(&identical, &independent);
    let max_eps = cmcs
        .iter()
        .chain(&identical)
        .chain(&independent)
        .fold(0.0f64, |a, &b| a.max(b));
    outcome(
        u1 <= 0.0 && u2 <= 0.0,
        format!(
            "upper bounds: cmcs-identical {u1:.3e}, identical-independent {u2:.3e}; \
             all eps_inc_exc = 0 since every player has value 1/8 (max observed {max_eps:.1e})"
        ),
    )
}

fn selection_law() -> Outcome {
    let n = 5;
    let m: u64 = 40;
    let mut state = EstimatorState::new(n, true);
    for p in 0..n {
        for _ in 0..3 {
            state.record(p, (n - p) as f64);
        }
    }
    // every pair past warm-up with unit sample variance; cross pairs get
    // distinct mean gaps δ̂ = mean of Δ'_j - Δ'_i
    let cross_gaps = [
        ((0, 2), -0.05),
        ((0, 3), -0.1),
        ((0, 4), -0.3),
        ((1, 2), 0.0),
        ((1, 3), -0.02),
        ((1, 4), -0.15),
    ];
    let stats_for = |gap: f64| {
        let mf = m as f64;
        let sum = -mf * gap;
        PairStats {
            count: m,
            sum,
            sum_sq: (mf - 1.0) + sum * sum / mf,
        }
    };
    for a in 0..n {
        for b in a + 1..n {
            let gap = cross_gaps
                .iter()
                .find(|(p, _)| *p == (a, b))
                .map_or(0.0, |(_, g)| *g);
            state.set_pair(a, b, stats_for(gap));
        }
    }
    let probs: Vec<((usize, usize), f64)> = cross_gaps
        .iter()
        .map(|&(pair, gap)| (pair, normal_cdf((m as f64).sqrt() * gap)))
        .collect();
    let p_max = probs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let p_min = probs.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let trials = 100_000;
    let mut counts = vec![0u64; probs.len()];
    let mut rng = RandomSource::new(9_000);
    for _ in 0..trials {
        let sel = select_players(&state, 2, 30, &mut rng).unwrap();
        for (idx, (pair, _)) in probs.iter().enumerate() {
            counts[idx] += sel.pairs.contains(pair) as u64;
        }
    }
    let mut pass = true;
    let mut parts = Vec::new();
    for (idx, &((i, j), p)) in probs.iter().enumerate() {
        let q = (p - p_min) / (p_max - p_min);
        let freq = counts[idx] as f64 / trials as f64;
        let ok = if p == p_max {
            counts[idx] == trials
        } else if p == p_min {
            counts[idx] == 0
        } else {
            (freq - q).abs() <= 3.0 * (q * (1.0 - q) / trials as f64).sqrt()
        };
        pass &= ok;
        parts.push(format!("({},{}) {freq:.4}/{q:.4}", i + 1, j + 1));
    }
    outcome(
        pass,
        format!("10^5 trials, observed/expected: {}", parts.join(" ")),
    )
}

fn pac_guarantee() -> Outcome {
    let game = make_airport_game(&[1.0, 2.0, 3.0]).unwrap();
    let phi = exact_shapley(&game).unwrap();
    let (epsilon, delta, runs) = (0.1, 0.05, 200usize);
    let params = AtKParams { m_min: 30, delta };
    let mode = Mode::Pac {
        epsilon,
        max_budget: 10_000_000,
    };
    let cmcs = batch(&game, Algorithm::CmcsAtK(params), mode, 1, 10_000, runs);
    let sshap = batch(
        &game,
        Algorithm::SamplingShapAtK(params),
        mode,
        1,
        10_000,
        runs,
    );
    let covered = cmcs
        .iter()
        .filter(|r| inclusion_exclusion_error(r.top_k, &phi, 1).unwrap() <= epsilon)
        .count() as f64
        / runs as f64;
    let floor = 1.0 - delta - 3.0 * (delta * (1.0 - delta) / runs as f64).sqrt();
    let diffs: Vec<f64> = sshap
        .iter()
        .zip(&cmcs)
        .map(|(b, a)| b.budget_used as f64 - a.budget_used as f64)
        .collect();
    let (mean_diff, se_diff) = mean_and_se(&diffs);
    let calls = |rs: &[topk_shapley::estimators::RunResult]| {
        rs.iter().map(|r| r.budget_used as f64).sum::<f64>() / rs.len() as f64
    };
    let fewer = mean_diff - 1.645 * se_diff > 0.0;
    outcome(
        covered >= floor && fewer,
        format!(
            "coverage {covered:.3} (need >= {floor:.3}); mean calls cmcs_at_k {:.1} vs sampling_shap_at_k {:.1}, paired difference {mean_diff:.1}±{se_diff:.1}",
            calls(&cmcs),
            calls(&sshap)
        ),
    )
}

fn determinism() -> Outcome {
    let text = "\
games = airport:1,2,3
algorithms = cmcs greedy_cmcs:m_min=3
budgets = 40 200
k = 1
runs = 1
base_seed = 11
";
    let config = parse_config(text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (idx, exec) in [
        Execution::Parallel,
        Execution::Parallel,
        Execution::Sequential,
    ]
    .into_iter()
    .enumerate()
    {
        let path = dir.path().join(format!("run{idx}.csv"));
        let report = run_bench(&config, None, std::fs::File::create(&path).unwrap(), exec).unwrap();
        assert_eq!(report.rows, 4);
        files.push(std::fs::read(&path).unwrap());
    }
    let same = files.windows(2).all(|w| w[0] == w[1]);
    outcome(
        same,
        format!(
            "4-row CSV, {} bytes, identical across 3 executions (two parallel, one sequential)",
            files[0].len()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("representation equivalence", representation_equivalence),
        ("covariance closed form", covariance_closed_form),
        ("pair variance decomposition", variance_decomposition),
        ("CMCS MSE identity", mse_identity),
        ("unbiasedness", unbiasedness),
        ("budget accounting", budget_accounting),
        ("lower bound validity", lower_bound_validity),
        ("variant ordering", variant_ordering),
        ("selection law", selection_law),
        ("PAC guarantee", pac_guarantee),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (idx, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let status = if result.pass { "PASS" } else { "FAIL" };
        failed += !result.pass as usize;
        println!(
            "criterion {:>2} {status} {name} [{:.1}s]: {}",
            idx + 1,
            start.elapsed().as_secs_f64(),
            result.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
