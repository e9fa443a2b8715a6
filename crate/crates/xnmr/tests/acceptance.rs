//! Acceptance gate: one test per shipped guarantee, each printing a
//! single pass line (visible with `--nocapture`; the test name carries
//! the verdict otherwise).

mod common;

use std::collections::BTreeSet;
use std::io::Write as _;
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use common::{random_game, random_ground, random_relevance_triple, random_residual, rng};
use xnmr::ground::{AtomId, GroundProgram};
use xnmr::repl::query_pipeline;
use xnmr::solver::brute_force_stable;
use xnmr::wfs::brute_force_wfs;
use xnmr::{
    emit_xgf, enumerate_stable, extract_residual, parse_program, parse_query, parse_xgf,
    query_answer, well_founded, Mode, ResourceLimits, Verdict,
};

const CORPUS_SIZE: usize = 500;
const WFS_CORPUS_SEED: u64 = 0xC2;

fn model_sets(models: Vec<xnmr::StableModel>) -> BTreeSet<BTreeSet<AtomId>> {
    models.into_iter().map(|m| m.true_atoms).collect()
}

#[test]
fn criterion_1_stable_model_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = rng(0xC1);
    for case in 0..CORPUS_SIZE {
        let rp = random_residual(&mut rng, 12, 20);
        let enumerated = model_sets(enumerate_stable(&rp, None));
        let brute = model_sets(brute_force_stable(&rp).expect("within oracle bound"));
        assert_eq!(enumerated, brute, "case {case} diverges from the oracle");
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(60),
        "corpus took {elapsed:?}, budget is 60s"
    );
    println!("criterion 1 pass: enumeration matches the oracle on {CORPUS_SIZE} residuals in {elapsed:?}");
}

#[test]
fn criterion_2_wfs_oracle_equivalence() {
    let mut rng = rng(WFS_CORPUS_SEED);
    for case in 0..CORPUS_SIZE {
        let gp = random_ground(&mut rng, 12, 20);
        let wfs = well_founded(&gp);
        let oracle = brute_force_wfs(&gp).expect("within oracle bound");
        assert_eq!(wfs, oracle, "case {case} diverges from the oracle");
        for model in brute_force_stable(&gp).expect("within oracle bound") {
            assert!(
                wfs.true_set.is_subset(&model.true_atoms),
                "case {case}: WFS-true atom outside a stable model"
            );
            assert!(
                wfs.false_set.is_disjoint(&model.true_atoms),
                "case {case}: WFS-false atom inside a stable model"
            );
        }
    }
    println!("criterion 2 pass: well_founded matches the oracle on {CORPUS_SIZE} ground programs");
}

#[test]
fn criterion_3_residual_faithfulness() {
    let mut rng = rng(WFS_CORPUS_SEED);
    for case in 0..CORPUS_SIZE {
        let gp = random_ground(&mut rng, 12, 20);
        let wfs = well_founded(&gp);
        let residual = extract_residual(&gp, &wfs);
        let completions: BTreeSet<BTreeSet<AtomId>> = enumerate_stable(&residual, None)
            .into_iter()
            .map(|m| {
                wfs.true_set
                    .iter()
                    .copied()
                    .chain(m.true_atoms.iter().map(|&a| {
                        gp.atoms()
                            .id(residual.atoms().text(a))
                            .expect("residual atoms exist in the ground program")
                    }))
                    .collect()
            })
            .collect();
        let brute = model_sets(brute_force_stable(&gp).expect("within oracle bound"));
        assert_eq!(
            completions, brute,
            "case {case}: completions of the residual differ from the stable models"
        );
    }
    println!("criterion 3 pass: WFS-true plus residual models equals the stable models on {CORPUS_SIZE} programs");
}

#[test]
fn criterion_4_relevance_restriction() {
    let limits = ResourceLimits::default();

    let program = parse_program("q :- not r. p :- not p.").unwrap();
    let query = parse_query("q").unwrap();
    let result = query_answer(&program, &query, Mode::Wfs, limits, 10).unwrap();
    assert_eq!(result.answers.len(), 1);
    assert_eq!(result.answers[0].verdict, Verdict::True);
    let full = GroundProgram::builder()
        .rule("q", &[], &["r"])
        .rule("p", &[], &["p"])
        .build();
    assert!(
        brute_force_stable(&full).unwrap().is_empty(),
        "witness program must have no stable models as a whole"
    );

    let mut rng = rng(0xC4);
    for case in 0..100 {
        let (base, extended, query) = random_relevance_triple(&mut rng);
        for mode in [Mode::Wfs, Mode::Brave, Mode::Cautious, Mode::Models] {
            let lean = query_answer(&base, &query, mode, limits, 10).unwrap();
            let padded = query_answer(&extended, &query, mode, limits, 10).unwrap();
            assert_eq!(
                lean, padded,
                "case {case} ({mode} mode): disconnected rules changed the answer"
            );
        }
    }
    println!("criterion 4 pass: answers ignore disconnected rules on 100 triples plus the canonical witness");
}

#[test]
fn criterion_5_canonical_examples() {
    let limits = ResourceLimits::default();

    let program = parse_program("p :- not q. q :- not p.").unwrap();
    let query = parse_query("p").unwrap();
    let result = query_answer(&program, &query, Mode::Models, limits, 10).unwrap();
    let expected: Vec<BTreeSet<String>> = vec![
        ["p".to_string()].into_iter().collect(),
        ["q".to_string()].into_iter().collect(),
    ];
    assert_eq!(result.models, expected);

    let program = parse_program("p :- not p.").unwrap();
    let result = query_answer(&program, &query, Mode::Models, limits, 10).unwrap();
    assert_eq!(result.answers[0].verdict, Verdict::Undefined);
    assert!(result.models.is_empty());

    let program = parse_program("p :- not q. q :- not r. r :- not p.").unwrap();
    let result = query_answer(&program, &query, Mode::Models, limits, 10).unwrap();
    assert_eq!(result.answers[0].verdict, Verdict::Undefined);
    assert!(result.models.is_empty());

    let program =
        parse_program("move(1,2). move(2,3). win(X) :- move(X,Y), not win(Y).").unwrap();
    let query = parse_query("win(X)").unwrap();
    let result = query_answer(&program, &query, Mode::Wfs, limits, 10).unwrap();
    let verdicts: Vec<(String, Verdict)> = result
        .answers
        .iter()
        .map(|a| (a.rendered.clone(), a.verdict))
        .collect();
    assert_eq!(
        verdicts,
        vec![
            ("win(1)".to_string(), Verdict::False),
            ("win(2)".to_string(), Verdict::True),
        ]
    );

    println!("criterion 5 pass: canonical two-cycle, self-negation, three-cycle and game examples check out");
}

#[test]
fn criterion_6_xgf_goldens_and_roundtrip() {
    let limits = ResourceLimits::default();
    let pipeline = |source: &str, query: &str| {
        let program = parse_program(source).unwrap();
        let query = parse_query(query).unwrap();
        query_pipeline(&program, &query, limits).unwrap().residual
    };

    let two_cycle = xnmr::ResidualProgram::builder()
        .rule("p", &[], &["q"])
        .rule("q", &[], &["p"])
        .build();
    assert_eq!(emit_xgf(&two_cycle), include_str!("goldens/two_cycle.xgf"));

    let empty = xnmr::ResidualProgram::default();
    assert_eq!(emit_xgf(&empty), include_str!("goldens/empty.xgf"));

    let mixed = pipeline("u :- not v. v :- not u. p :- u, not q. q :- v.", "p");
    assert_eq!(emit_xgf(&mixed), include_str!("goldens/mixed.xgf"));

    let win_cycle = pipeline(
        "move(1,2). move(2,3). move(3,4). move(4,1). win(X) :- move(X,Y), not win(Y).",
        "win(1)",
    );
    assert_eq!(emit_xgf(&win_cycle), include_str!("goldens/win_cycle.xgf"));

    let tautology = pipeline("r :- not s. s :- not r. r :- r.", "r");
    assert_eq!(emit_xgf(&tautology), include_str!("goldens/tautology.xgf"));

    let mut rng = rng(0xC1);
    for case in 0..CORPUS_SIZE {
        let rp = random_residual(&mut rng, 12, 20);
        let reparsed = parse_xgf(&emit_xgf(&rp)).expect("emitted document parses");
        assert_eq!(reparsed, rp, "case {case}: roundtrip lost information");
    }
    println!("criterion 6 pass: 5 goldens byte-identical, roundtrip holds on {CORPUS_SIZE} residuals");
}

fn run_cli(args: &[&str], stdin_text: Option<&str>) -> Output {
    let mut command = Command::new(env!("CARGO_BIN_EXE_xnmr"));
    command.args(args);
    command.stdin(Stdio::piped());
    command.stdout(Stdio::piped());
    command.stderr(Stdio::piped());
    let mut child = command.spawn().expect("binary spawns");
    if let Some(text) = stdin_text {
        child
            .stdin
            .as_mut()
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().expect("binary exits")
}

#[test]
fn criterion_7_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let game = dir.path().join("game.lp");
    std::fs::write(
        &game,
        "move(1,2). move(2,3). move(3,4). move(4,1).\nwin(X) :- move(X,Y), not win(Y).\n",
    )
    .unwrap();
    let game = game.to_str().unwrap();

    let query_args = [game, "--query", "win(X)", "--mode", "models"];
    let first = run_cli(&query_args, None);
    let second = run_cli(&query_args, None);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stderr, second.stderr);
    assert_eq!(first.status.code(), second.status.code());

    let script = ":mode brave\nwin(X)\n:residual win(1)\n:models\n:quit\n";
    let batch_args = [game, "--batch"];
    let first = run_cli(&batch_args, Some(script));
    let second = run_cli(&batch_args, Some(script));
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stderr, second.stderr);
    assert_eq!(first.status.code(), second.status.code());

    println!("criterion 7 pass: repeated CLI runs are byte-identical");
}

#[test]
fn criterion_8_performance_smoke() {
    let mut rng = rng(0xC8);
    let source = random_game(&mut rng, 150, 600);
    let started = Instant::now();
    let program = parse_program(&source).unwrap();
    let query = parse_query("win(1)").unwrap();
    let output = query_pipeline(&program, &query, ResourceLimits::default()).unwrap();
    let first = xnmr::stable_models(&output.residual).next();
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(5),
        "ground + WFS + first model took {elapsed:?}, budget is 5s"
    );
    println!(
        "criterion 8 pass: 150-node/600-edge game grounded and solved in {elapsed:?} ({} ground atoms, {} residual atoms, first model {})",
        output.ground.atoms().len(),
        output.residual.atoms().len(),
        match first {
            Some(m) => format!("has {} true atoms", m.true_atoms.len()),
            None => "does not exist".to_string(),
        }
    );
}
