use std::collections::HashSet;

use topk_shapley::estimators::{top_k_of, Algorithm, Mode, RunOptions};
use topk_shapley::game::{eligible_sets, exact_shapley};
use topk_shapley::harness::{
    parse_config, read_rows, run_bench, run_pac, summarize, GameSpec, ResultRow,
};
use topk_shapley::metrics::score;
use topk_shapley::{Error, Execution, RandomSource};

const BENCH: &str = "\
games = unanimity:8
algorithms = cmcs independent
budgets = 90 900
k = 3
runs = 100
base_seed = 2024
";

fn bench_bytes(text: &str, exec: Execution) -> (Vec<u8>, usize) {
    let config = parse_config(text).unwrap();
    let mut out = Vec::new();
    let report = run_bench(&config, None, &mut out, exec).unwrap();
    (out, report.rows)
}

#[test]
fn row_count_and_seeds() {
    let (bytes, rows) = bench_bytes(BENCH, Execution::Parallel);
    assert_eq!(rows, 400);
    let parsed = read_rows(&bytes[..]).unwrap();
    assert_eq!(parsed.len(), 400);
    let runs: HashSet<(String, usize, u64)> = parsed
        .iter()
        .map(|r| (r.algorithm.clone(), r.run, r.seed))
        .collect();
    assert_eq!(runs.len(), 200);
    let seeds: HashSet<u64> = parsed.iter().map(|r| r.seed).collect();
    assert_eq!(seeds.len(), 200, "one distinct seed per run");
}

#[test]
fn output_is_byte_stable() {
    let (a, _) = bench_bytes(BENCH, Execution::Parallel);
    let (b, _) = bench_bytes(BENCH, Execution::Parallel);
    let (c, _) = bench_bytes(BENCH, Execution::Sequential);
    assert_eq!(a, b);
    assert_eq!(a, c);
    let (d, _) = bench_bytes(&BENCH.replace("2024", "2025"), Execution::Parallel);
    assert_ne!(a, d);
}

fn rerun(row: &ResultRow) -> ResultRow {
    let spec: GameSpec = row.game.parse().unwrap();
    let game = spec.build(None).unwrap();
    let alg: Algorithm = row.algorithm.parse().unwrap();
    let result = alg
        .run(
            &*game,
            Mode::FixedBudget(row.budget),
            row.k,
            &mut RandomSource::new(row.seed),
            &RunOptions::default(),
        )
        .unwrap();
    let phi = exact_shapley(&*game).unwrap();
    let eligible = eligible_sets(&phi, row.k).unwrap();
    let top = top_k_of(&result.estimates, row.k).unwrap();
    let s = score(&phi, &eligible, top, &result.estimates).unwrap();
    ResultRow {
        budget_used: result.budget_used,
        eps_inc_exc: s.eps_inc_exc,
        ratio_precision: s.ratio_precision,
        binary_precision: s.binary_precision,
        mse: s.mse,
        ..row.clone()
    }
}

#[test]
fn rows_reproduce_from_their_seed() {
    let text = "\
games = airport:1,2,3,4 sou:5,6,9
algorithms = independent same_length identical cmcs appro_shapley greedy_cmcs:m_min=3 cmcs_at_k:m_min=3,delta=0.1 sampling_shap_at_k:m_min=3,delta=0.1
budgets = 7 40 131 400
k = 1 2
runs = 3
base_seed = 8
";
    let (bytes, _) = bench_bytes(text, Execution::Parallel);
    for row in read_rows(&bytes[..]).unwrap() {
        assert_eq!(rerun(&row), row);
    }
}

#[test]
fn standard_errors_recompute() {
    let (bytes, _) = bench_bytes(BENCH, Execution::Parallel);
    let rows = read_rows(&bytes[..]).unwrap();
    let groups = summarize(&rows);
    assert_eq!(groups.len(), 4);
    for g in &groups {
        let xs: Vec<f64> = rows
            .iter()
            .filter(|r| r.algorithm == g.algorithm && r.budget == g.budget)
            .map(|r| r.mse)
            .collect();
        assert_eq!(xs.len(), g.runs);
        let m = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / m;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
        assert!((g.mse.mean - mean).abs() < 1e-12);
        assert!((g.mse.se - sd / m.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn failing_run_marks_output_incomplete() {
    // delta = 0 parses but is rejected when the first run starts
    let text = BENCH.replace("cmcs independent", "independent cmcs_at_k:delta=0");
    let config = parse_config(&text).unwrap();
    let mut out = Vec::new();
    let err = run_bench(&config, None, &mut out, Execution::Parallel).unwrap_err();
    assert!(matches!(err, Error::Domain(_)));
    let text = String::from_utf8(out).unwrap();
    assert!(text.lines().last().unwrap().starts_with("# incomplete:"));
    // the independent runs before the failure were kept
    assert_eq!(read_rows(text.as_bytes()).unwrap().len(), 200);
}

#[test]
fn config_errors_name_the_field() {
    let config = parse_config(&BENCH.replace("k = 3", "k = 9")).unwrap();
    match run_bench(&config, None, Vec::new(), Execution::Sequential) {
        Err(Error::Config { line, field, .. }) => assert_eq!((line, field.as_str()), (4, "k")),
        other => panic!("{other:?}"),
    }
    let config = parse_config(&format!("{BENCH}epsilon = 0.1\n")).unwrap();
    match run_pac(&config, None, Vec::new(), Execution::Sequential) {
        Err(Error::Config { field, .. }) => assert_eq!(field, "algorithms"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn tabular_paths_resolve_against_the_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("u2.game"), "2\n0 0\n1 0\n2 0\n3 1\n").unwrap();
    let config =
        parse_config("games = tabular:u2.game\nalgorithms = cmcs\nbudgets = 30\nk = 1\nruns = 2\n")
            .unwrap();
    let mut out = Vec::new();
    let report = run_bench(&config, Some(dir.path()), &mut out, Execution::Parallel).unwrap();
    assert_eq!(report.rows, 2);
    assert!(run_bench(&config, None, Vec::new(), Execution::Parallel).is_err());
}

#[test]
fn pac_with_delta_one_stops_after_warm_up() {
    let text = "\
games = airport:1,2,3
algorithms = cmcs_at_k:m_min=30,delta=1 sampling_shap_at_k:m_min=30,delta=1
k = 1
runs = 20
epsilon = 0.1
";
    let config = parse_config(text).unwrap();
    let mut out = Vec::new();
    let report = run_pac(&config, None, &mut out, Execution::Parallel).unwrap();
    assert_eq!(report.rows, 40);
    let rows = read_rows(&out[..]).unwrap();
    for row in &rows {
        let warm_up = if row.algorithm.starts_with("cmcs") {
            4 * 30
        } else {
            2 * 3 * 30
        };
        assert_eq!(row.budget_used, warm_up);
        assert_eq!(row.terminated_by.as_str(), "stopping_rule");
    }
    for s in &report.summaries {
        assert_eq!(s.stopped, 1.0);
        assert_eq!(s.calls.se, 0.0);
    }
}
