//! Shared helpers for the integration suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use teamlogic::kripke::{KripkeModel, Team};
use teamlogic::syntax::{parse_any, Formula, PropSet};

/// The five-world running example: u sees u', v sees v' and w', and p
/// holds exactly at v'.
pub fn example_one() -> KripkeModel {
    KripkeModel::new(
        vec!["u".into(), "v".into(), "u'".into(), "v'".into(), "w'".into()],
        vec![
            ("u".into(), "u'".into()),
            ("v".into(), "v'".into()),
            ("v".into(), "w'".into()),
        ],
        BTreeMap::from([("p".into(), vec!["v'".into()])]),
    )
    .unwrap()
}

/// The looping three-world model in which w1 and w2 are bisimilar at
/// every depth.
pub fn looping_model() -> KripkeModel {
    KripkeModel::new(
        vec!["w1".into(), "w2".into(), "w3".into()],
        vec![
            ("w1".into(), "w1".into()),
            ("w1".into(), "w3".into()),
            ("w2".into(), "w2".into()),
            ("w2".into(), "w3".into()),
        ],
        BTreeMap::from([("p".into(), vec!["w3".into()])]),
    )
    .unwrap()
}

pub fn f(s: &str) -> Formula {
    parse_any(s).unwrap()
}

pub fn ps(s: &str) -> PropSet {
    PropSet::new(s.split(',').map(str::trim).filter(|x| !x.is_empty()))
}

/// All teams of a model, as index bitmasks paired with teams.
pub fn all_teams(m: &KripkeModel) -> Vec<Team> {
    let n = m.world_count();
    (0u64..1 << n)
        .map(|mask| m.team_from_indices((0..n).filter(|i| mask >> i & 1 == 1)))
        .collect()
}

/// Every model with 1..=max_worlds worlds over `props`, up to
/// isomorphism.
pub fn small_models(props: &PropSet, max_worlds: usize) -> Vec<KripkeModel> {
    (1..=max_worlds)
        .flat_map(|n| teamlogic::decision::enumerate_models(props, n))
        .collect()
}
