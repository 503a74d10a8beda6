//! The acceptance suite: one test per criterion, each printing its
//! pass/fail line (run with `--nocapture` to see them).

mod common;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{all_teams, example_one, f, looping_model, ps, small_models};
use teamlogic::bisim::{hintikka_world, world_bisim_k, BisimChecker, PointedModel};
use teamlogic::corpus::{generate, GenOptions};
use teamlogic::decision::{entails_bounded, entails_nf, equiv, VerdictStatus};
use teamlogic::fo::{lift_team, st_translate, FoSession, FoStructure};
use teamlogic::kripke::{KripkeModel, Team};
use teamlogic::normal_form::{normal_form, DEFAULT_TYPE_CAP};
use teamlogic::proof::fixtures::all_fixtures;
use teamlogic::proof::{
    check_derivation, list_rules, ProofError, RuleName, SideCondition, System, TABLE_INCLUSION,
    TABLE_MIGHT_SHARED, TABLE_MODAL_INCLUSION,
};
use teamlogic::semantics::{eval_team, EvalContext, NaiveEvaluator};
use teamlogic::syntax::{Formula, Logic, PropSet};

fn pass(n: u32, name: &str, started: Instant) {
    println!(
        "acceptance criterion {n} ({name}): PASS [{:.1}s]",
        started.elapsed().as_secs_f64()
    );
}

// Criterion 1: satisfaction on the running example model.
#[test]
fn criterion_01_example_model_reproduction() {
    let started = Instant::now();
    let m = example_one();
    let cases = [
        ("u',v'", "top <= p", true),
        ("u,v", "<>(top <= p)", true),
        ("u,v", "[](top <= p)", true),
        ("u", "<>(top <= p)", false),
        ("u", "[](top <= p)", false),
    ];
    for (team, formula, expected) in cases {
        assert_eq!(
            eval_team(&m, &Team::parse(team), &f(formula)).unwrap(),
            expected,
            "{{{team}}} |= {formula}"
        );
    }
    pass(1, "example model reproduction", started);
}

// Criterion 2: the substitution-failure countermodel is found by
// bounded search and replays.
#[test]
fn criterion_02_substitution_failure_counterexample() {
    let started = Instant::now();
    let premise = f("(p | !p) & top <= p");
    let conclusion = f("(p & top <= p) | (!p & top <= p)");
    let verdict = entails_bounded(std::slice::from_ref(&premise), &conclusion, 3).unwrap();
    match verdict.status {
        VerdictStatus::CounterModel { model, team } => {
            assert!(eval_team(&model, &team, &premise).unwrap());
            assert!(!eval_team(&model, &team, &conclusion).unwrap());
        }
        other => panic!("expected a countermodel, got {other:?}"),
    }
    pass(2, "substitution-failure countermodel", started);
}

// Criterion 3: the optimized evaluator agrees with the naive one on a
// 500-formula corpus over all small models and teams.
#[test]
fn criterion_03_oracle_equivalence() {
    let started = Instant::now();
    let props = ps("p,q");
    let mut corpus: Vec<Formula> = Vec::new();
    for (seed, logic, count) in [
        (31u64, Logic::MLInc, 170usize),
        (32, Logic::MLMight, 165),
        (33, Logic::MLSMight, 165),
    ] {
        corpus.extend(generate(
            seed,
            count,
            &props,
            &GenOptions {
                logic,
                max_md: 2,
                max_size: 11,
            },
        ));
    }
    assert_eq!(corpus.len(), 500);
    let models = small_models(&props, 3);
    let mut checked = 0u64;
    for formula in &corpus {
        for m in &models {
            let mut fast = EvalContext::new(m, formula).unwrap();
            let mut naive = NaiveEvaluator::new(m, formula).unwrap();
            for mask in 0u64..1 << m.world_count() {
                assert_eq!(
                    fast.eval_mask(mask),
                    naive.eval_mask(mask).unwrap(),
                    "{formula} on model {} mask {mask:b}",
                    m.to_json()
                );
                checked += 1;
            }
        }
    }
    println!("  criterion 3 compared {checked} evaluations");
    pass(3, "oracle equivalence", started);
}

// Criterion 4: bisimilarity coincides with satisfaction of Hintikka
// formulas, exhaustively at depth <= 2 over one proposition.
#[test]
fn criterion_04_hintikka_bisimulation_duality() {
    let started = Instant::now();
    let x = ps("p");
    let models = small_models(&x, 3);
    // Precompute every Hintikka formula.
    let chis: Vec<Vec<Vec<Formula>>> = models
        .iter()
        .map(|m| {
            (0..m.world_count())
                .map(|w| {
                    (0..=2)
                        .map(|k| hintikka_world(PointedModel::from_index(m, w), &x, k))
                        .collect()
                })
                .collect()
        })
        .collect();
    for (ai, ma) in models.iter().enumerate() {
        for mb in models.iter() {
            let mut checker = BisimChecker::new(ma, mb, &x);
            for k in 0..=2u32 {
                for wa in 0..ma.world_count() {
                    let mut ctx = EvalContext::new(mb, &chis[ai][wa][k as usize]).unwrap();
                    for wb in 0..mb.world_count() {
                        let bisim = checker.worlds(wa, wb, k);
                        let sat = ctx.eval_mask(1 << wb);
                        assert_eq!(
                            bisim, sat,
                            "duality fails at k={k}, worlds {} / {}",
                            ma.world_id(wa),
                            mb.world_id(wb)
                        );
                    }
                }
            }
        }
    }
    // The looping model's two non-trivial worlds stay bisimilar deep.
    let m = looping_model();
    assert!(world_bisim_k(
        PointedModel::new(&m, "w1").unwrap(),
        PointedModel::new(&m, "w2").unwrap(),
        &x,
        5,
    ));
    pass(4, "Hintikka/bisimulation duality", started);
}

// Criterion 5: the team characteristic formulas capture exactly the
// forth condition, the back condition, and bisimilarity-or-emptiness.
#[test]
fn criterion_05_characteristic_formula_laws() {
    let started = Instant::now();
    let x = ps("p");
    let models = small_models(&x, 3);
    for k in 0..=1u32 {
        for m in &models {
            let teams = all_teams(m);
            let formulas: Vec<(Vec<usize>, Formula, Formula, Formula)> = teams
                .iter()
                .map(|t| {
                    let (zeta, eta, theta) =
                        teamlogic::bisim::theta_team((m, t), &x, k).unwrap();
                    let idx = m.team_indices(t).unwrap().into_iter().collect();
                    (idx, zeta, eta, theta)
                })
                .collect();
            for m2 in &models {
                let mut checker = BisimChecker::new(m, m2, &x);
                let teams2: Vec<(Team, Vec<usize>)> = all_teams(m2)
                    .into_iter()
                    .map(|t| {
                        let idx = m2.team_indices(&t).unwrap().into_iter().collect();
                        (t, idx)
                    })
                    .collect();
                for (ti, zeta, eta, theta) in &formulas {
                    let mut zeta_ctx = EvalContext::new(m2, zeta).unwrap();
                    let mut eta_ctx = EvalContext::new(m2, eta).unwrap();
                    let mut theta_ctx = EvalContext::new(m2, theta).unwrap();
                    for (t2, ti2) in &teams2 {
                        let forth = ti
                            .iter()
                            .all(|&w| ti2.iter().any(|&w2| checker.worlds(w, w2, k)));
                        let back = ti2
                            .iter()
                            .all(|&w2| ti.iter().any(|&w| checker.worlds(w, w2, k)));
                        assert_eq!(
                            zeta_ctx.eval(t2).unwrap(),
                            t2.is_empty() || forth,
                            "zeta law at k={k}"
                        );
                        assert_eq!(eta_ctx.eval(t2).unwrap(), back, "eta law at k={k}");
                        assert_eq!(
                            theta_ctx.eval(t2).unwrap(),
                            t2.is_empty() || (forth && back),
                            "theta law at k={k}"
                        );
                    }
                }
            }
        }
    }
    pass(5, "characteristic-formula laws", started);
}

// Criterion 6: every formula is equivalent to its normal form on all
// small models.
#[test]
fn criterion_06_normal_form_equivalence() {
    let started = Instant::now();
    let x = ps("p");
    let models = small_models(&x, 3);
    for (seed, logic) in [
        (61u64, Logic::MLInc),
        (62, Logic::MLMight),
        (63, Logic::MLSMight),
    ] {
        let corpus = generate(
            seed,
            200,
            &x,
            &GenOptions {
                logic,
                max_md: 1,
                max_size: 9,
            },
        );
        for formula in &corpus {
            let nf = normal_form(formula, &x, 1, logic, DEFAULT_TYPE_CAP).unwrap();
            nf.check_logic(logic)
                .unwrap_or_else(|e| panic!("normal form leaves {logic}: {e}"));
            for m in &models {
                let mut orig = EvalContext::new(m, formula).unwrap();
                let mut compiled = EvalContext::new(m, &nf).unwrap();
                for mask in 0u64..1 << m.world_count() {
                    assert_eq!(
                        orig.eval_mask(mask),
                        compiled.eval_mask(mask),
                        "{formula} vs its normal form, mask {mask:b} of {}",
                        m.to_json()
                    );
                }
            }
        }
    }
    pass(6, "normal-form equivalence", started);
}

// Criterion 7: the two entailment methods never contradict each other,
// and the diamond-to-box example holds under both.
#[test]
fn criterion_07_entailment_method_agreement() {
    let started = Instant::now();
    let x = ps("p");
    let mut pairs = Vec::new();
    for (seed, logic) in [
        (71u64, Logic::MLInc),
        (72, Logic::MLMight),
        (73, Logic::MLSMight),
    ] {
        let corpus = generate(
            seed,
            134,
            &x,
            &GenOptions {
                logic,
                max_md: 1,
                max_size: 8,
            },
        );
        pairs.extend(corpus.chunks_exact(2).map(|c| (c[0].clone(), c[1].clone())));
    }
    pairs.truncate(200);
    assert_eq!(pairs.len(), 200);
    for (premise, conclusion) in &pairs {
        let nf = entails_nf(std::slice::from_ref(premise), conclusion, &x, DEFAULT_TYPE_CAP)
            .unwrap();
        let search = entails_bounded(std::slice::from_ref(premise), conclusion, 3).unwrap();
        // Both methods are sound, so an exact yes forbids a found
        // countermodel and a found countermodel forbids an exact yes. A
        // bound-exhausted search agrees with anything.
        match (&nf.status, &search.status) {
            (VerdictStatus::Entails, VerdictStatus::CounterModel { .. }) => {
                panic!("nf says entails, search found a countermodel: {premise} |= {conclusion}")
            }
            (VerdictStatus::CounterModel { .. }, VerdictStatus::Entails) => {
                panic!("search claims entailment for {premise} |= {conclusion}")
            }
            _ => {}
        }
        if matches!(search.status, VerdictStatus::CounterModel { .. }) {
            assert!(
                matches!(nf.status, VerdictStatus::CounterModel { .. }),
                "search refutes {premise} |= {conclusion} but nf does not"
            );
        }
    }
    let nf = entails_nf(&[f("<>(top <= p)")], &f("[](top <= p)"), &x, DEFAULT_TYPE_CAP).unwrap();
    assert!(matches!(nf.status, VerdictStatus::Entails));
    let search = entails_bounded(&[f("<>(top <= p)")], &f("[](top <= p)"), 3).unwrap();
    assert!(matches!(search.status, VerdictStatus::BoundExhausted));
    pass(7, "entailment method agreement", started);
}

// Criterion 8: the top-atom/might equivalences and the constant-flip
// equivalence.
#[test]
fn criterion_08_top_atom_equivalences() {
    let started = Instant::now();
    let x = ps("p");
    for (a, b) in [
        ("top <= p", "might p"),
        ("top <= p", "smight p"),
        ("might p", "smight p"),
        ("bot <= p", "top <= !p"),
    ] {
        let v = equiv(&f(a), &f(b), &x, DEFAULT_TYPE_CAP).unwrap();
        assert!(v.entails(), "{a} and {b} should be equivalent");
    }
    pass(8, "top-atom and might equivalences", started);
}

// Criterion 9: the fixture library is accepted, every near-miss is
// rejected with the right error class, and the two side-condition
// examples behave as specified.
#[test]
fn criterion_09_proof_kernel_fixtures() {
    let started = Instant::now();
    let fixtures = all_fixtures();
    assert!(fixtures.len() >= 10, "need at least ten fixtures");
    for fixture in &fixtures {
        let (conclusion, open) = check_derivation(&fixture.derivation, fixture.system)
            .unwrap_or_else(|e| panic!("fixture {} rejected: {e}", fixture.name));
        assert_eq!(conclusion, fixture.expected_conclusion, "{}", fixture.name);
        assert_eq!(open, fixture.expected_open, "{}", fixture.name);
        for mutant in &fixture.mutants {
            let err = check_derivation(&mutant.derivation, mutant.system)
                .map(|_| ())
                .expect_err(mutant.description);
            assert_eq!(err.class(), mutant.expected_class, "{}", mutant.description);
        }
    }
    // Named coverage: the derived-rule results.
    for name in [
        "transitivity",
        "contraction",
        "top_atom_intro",
        "top_atom_exchange",
        "might_or_intro",
        "might_or_distr",
        "smight_or_intro",
        "smight_or_distr",
    ] {
        assert!(fixtures.iter().any(|fx| fx.name == name), "missing {name}");
    }
    // One instance per rule of the inclusion, modal-inclusion, and
    // might tables.
    let used = |rule: RuleName| {
        fixtures
            .iter()
            .any(|fx| fx.derivation.rules_used().contains(&rule))
    };
    for rule in TABLE_INCLUSION
        .iter()
        .chain(TABLE_MODAL_INCLUSION.iter())
        .chain(TABLE_MIGHT_SHARED.iter())
        .chain([RuleName::MightJoin, RuleName::MightE, RuleName::SMightAndSimpl].iter())
    {
        assert!(used(*rule), "no fixture instance for {}", rule.name());
    }
    // Every rule in every system's inventory has an accepted fixture
    // and a rejected near-miss somewhere in the corpus.
    for system in [System::MLIncSys, System::MLMightSys, System::MLSMightSys] {
        for info in list_rules(system) {
            assert!(used(info.rule), "no accepted fixture for {}", info.name);
            let rejected = fixtures.iter().any(|fx| {
                fx.mutants
                    .iter()
                    .any(|m| m.derivation.rules_used().contains(&info.rule))
            });
            assert!(rejected, "no rejected near-miss for {}", info.name);
        }
    }
    // The two side-condition rejection examples.
    let or_e_example = fixtures
        .iter()
        .find(|fx| fx.name == "rule_or_e")
        .and_then(|fx| fx.mutants.iter().find(|m| m.expected_class == "side-condition"))
        .expect("disjunction-elimination side-condition example");
    match check_derivation(&or_e_example.derivation, or_e_example.system).unwrap_err() {
        ProofError::SideConditionViolation { condition, .. } => {
            assert_eq!(condition, SideCondition::ClassicalAssumptions);
        }
        other => panic!("expected a side-condition violation, got {other}"),
    }
    let box_mon_example = fixtures
        .iter()
        .find(|fx| fx.name == "rule_box_mon")
        .and_then(|fx| fx.mutants.iter().find(|m| m.expected_class == "side-condition"))
        .expect("box-monotonicity side-condition example");
    match check_derivation(&box_mon_example.derivation, box_mon_example.system).unwrap_err() {
        ProofError::SideConditionViolation { condition, .. } => {
            assert_eq!(condition, SideCondition::ClosedSubderivation);
        }
        other => panic!("expected a side-condition violation, got {other}"),
    }
    pass(9, "proof kernel fixtures", started);
}

fn random_model(rng: &mut ChaCha8Rng, props: &PropSet) -> KripkeModel {
    let n = rng.gen_range(1..=3usize);
    let worlds: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    let mut relation = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if rng.gen_bool(0.4) {
                relation.push((worlds[i].clone(), worlds[j].clone()));
            }
        }
    }
    let valuation = props
        .names()
        .iter()
        .map(|p| {
            (
                p.clone(),
                worlds.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect(),
            )
        })
        .collect();
    KripkeModel::new(worlds, relation, valuation).unwrap()
}

// Criterion 10: no sampled model satisfies a fixture's open assumptions
// while falsifying its conclusion.
#[test]
fn criterion_10_sampled_soundness() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    for fixture in all_fixtures() {
        let (conclusion, opens) = check_derivation(&fixture.derivation, fixture.system).unwrap();
        let props = opens
            .iter()
            .fold(conclusion.props(), |acc, o| acc.union(&o.props()));
        for _ in 0..1000 {
            let m = random_model(&mut rng, &props);
            let n = m.world_count();
            let mask = rng.gen_range(0u64..1 << n);
            let team = m.team_from_indices((0..n).filter(|i| mask >> i & 1 == 1));
            let all_open = opens
                .iter()
                .all(|o| eval_team(&m, &team, o).unwrap());
            if all_open {
                assert!(
                    eval_team(&m, &team, &conclusion).unwrap(),
                    "fixture {} is unsound on {} with team {team}",
                    fixture.name,
                    m.to_json()
                );
            }
        }
    }
    pass(10, "sampled kernel soundness", started);
}

// Criterion 11: team satisfaction agrees with first-order evaluation of
// the standard translation.
#[test]
fn criterion_11_translation_cross_check() {
    let started = Instant::now();
    let x = ps("p");
    let mut corpus = generate(
        1111,
        96,
        &x,
        &GenOptions {
            logic: Logic::MLInc,
            max_md: 1,
            max_size: 8,
        },
    );
    corpus.push(f("top <= p"));
    corpus.push(f("<>(top <= p)"));
    corpus.push(f("[](bot <= p)"));
    corpus.push(f("(p | !p) & top <= p"));
    assert_eq!(corpus.len(), 100);
    let models = small_models(&x, 3);
    let mut checked = 0u64;
    for formula in &corpus {
        let translated = st_translate(formula, "x").unwrap();
        for m in &models {
            let st = FoStructure::from_kripke(m).unwrap();
            let mut modal = EvalContext::new(m, formula).unwrap();
            let mut fo = FoSession::new(&st, &translated);
            for t in all_teams(m) {
                let lifted = lift_team(m, &t, "x").unwrap();
                assert_eq!(
                    modal.eval(&t).unwrap(),
                    fo.eval(&lifted).unwrap(),
                    "{formula} vs its translation on {t} of {}",
                    m.to_json()
                );
                checked += 1;
            }
        }
    }
    println!("  criterion 11 compared {checked} evaluations");
    pass(11, "translation cross-check", started);
}
