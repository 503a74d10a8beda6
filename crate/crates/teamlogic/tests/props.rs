//! Property-based invariants over generated formulas.

mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use common::{all_teams, example_one, f};
use teamlogic::corpus::{generate, GenOptions};
use teamlogic::semantics::{eval_team, max_sat_subteam, EvalContext};
use teamlogic::syntax::{parse_any, print_formula, substitute_classical, Formula, Logic, PropSet};
use teamlogic::Team;

fn seeded_over(seed: u64, logic: Logic, max_md: u32, max_size: u32, props: &[&str]) -> Formula {
    let props = PropSet::new(props.iter().copied());
    generate(
        seed,
        1,
        &props,
        &GenOptions {
            logic,
            max_md,
            max_size,
        },
    )
    .pop()
    .unwrap()
}

fn seeded_formula(seed: u64, logic: Logic, max_md: u32, max_size: u32) -> Formula {
    seeded_over(seed, logic, max_md, max_size, &["p", "q"])
}

fn any_logic(choice: u8) -> Logic {
    match choice % 4 {
        0 => Logic::MLInc,
        1 => Logic::MLMight,
        2 => Logic::MLSMight,
        _ => Logic::MLClassical,
    }
}

proptest! {
    // The printer inverts the parser on every well-formed formula.
    #[test]
    fn parse_print_round_trip(seed in any::<u64>(), choice in 0u8..4) {
        let formula = seeded_formula(seed, any_logic(choice), 2, 14);
        let printed = print_formula(&formula);
        let reparsed = parse_any(&printed)
            .unwrap_or_else(|e| panic!("reparse of `{printed}`: {e}"));
        prop_assert_eq!(reparsed, formula);
    }

    // Classicality is hereditary.
    #[test]
    fn classicality_is_hereditary(seed in any::<u64>()) {
        let formula = seeded_formula(seed, Logic::MLClassical, 2, 12);
        prop_assert!(formula.is_classical());
        for sub in formula.subformulas() {
            prop_assert!(sub.is_classical(), "{sub}");
        }
    }

    // Substitution raises modal depth by at most the deepest image.
    #[test]
    fn substitution_depth_bound(seed in any::<u64>(), image_seed in any::<u64>(), choice in 0u8..3) {
        let formula = seeded_formula(seed, any_logic(choice), 1, 10);
        let image = seeded_formula(image_seed, Logic::MLClassical, 1, 6);
        let sigma = BTreeMap::from([
            ("p".to_string(), image.clone()),
            ("q".to_string(), f("q")),
        ]);
        let out = substitute_classical(&formula, &sigma).unwrap();
        prop_assert!(out.modal_depth() <= formula.modal_depth() + image.modal_depth());
        prop_assert!(out.validate().is_ok());
    }

    // The empty team satisfies everything.
    #[test]
    fn empty_team_property(seed in any::<u64>(), choice in 0u8..3) {
        let m = example_one();
        let formula = seeded_over(seed, any_logic(choice), 2, 10, &["p"]);
        prop_assert!(eval_team(&m, &Team::empty(), &formula).unwrap());
    }

    // Satisfaction is closed under unions; the maximal satisfying
    // subteam both satisfies and bounds every satisfying subteam.
    #[test]
    fn union_closure_and_max_subteam(seed in any::<u64>(), choice in 0u8..3) {
        let m = example_one();
        let formula = seeded_over(seed, any_logic(choice), 1, 8, &["p"]);
        let mut ctx = EvalContext::new(&m, &formula).unwrap();
        let teams = all_teams(&m);
        for a in teams.iter().take(12) {
            for b in teams.iter().take(12) {
                if ctx.eval(a).unwrap() && ctx.eval(b).unwrap() {
                    prop_assert!(ctx.eval(&a.union(b)).unwrap(), "{formula}");
                }
            }
        }
        let whole = m.universe();
        let max = max_sat_subteam(&m, &whole, &formula).unwrap();
        prop_assert!(eval_team(&m, &max, &formula).unwrap());
        for t in &teams {
            if ctx.eval(t).unwrap() {
                prop_assert!(t.is_subset_of(&max), "{formula}: {t} outside {max}");
            }
        }
    }
}
