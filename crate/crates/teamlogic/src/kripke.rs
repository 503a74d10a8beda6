//! Finite Kripke models, teams, relational images, successor-team
//! enumeration, and disjoint unions.
//!
//! The model file format is JSON with exactly these fields:
//!
//! ```json
//! { "worlds": ["u", "v"],
//!   "relation": [["u", "v"]],
//!   "valuation": {"p": ["v"]} }
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::PropSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),
    #[error("model file: {0}")]
    Format(String),
}

/// A team: a set of worlds of one model, possibly empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default, Hash)]
pub struct Team(BTreeSet<String>);

impl Team {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(worlds: I) -> Team {
        Team(worlds.into_iter().map(Into::into).collect())
    }

    pub fn empty() -> Team {
        Team::default()
    }

    pub fn worlds(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, w: &str) -> bool {
        self.0.contains(w)
    }

    pub fn insert(&mut self, w: impl Into<String>) {
        self.0.insert(w.into());
    }

    pub fn union(&self, other: &Team) -> Team {
        Team(self.0.union(&other.0).cloned().collect())
    }

    pub fn is_subset_of(&self, other: &Team) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Parses a comma-separated world list; empty string is the empty team.
    pub fn parse(s: &str) -> Team {
        Team(
            s.split(',')
                .map(str::trim)
                .filter(|w| !w.is_empty())
                .map(String::from)
                .collect(),
        )
    }
}

impl fmt::Display for Team {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for w in &self.0 {
            if !first {
                f.write_str(",")?;
            }
            f.write_str(w)?;
            first = false;
        }
        Ok(())
    }
}

impl FromIterator<String> for Team {
    fn from_iter<T: IntoIterator<Item = String>>(iter: T) -> Team {
        Team(iter.into_iter().collect())
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    worlds: Vec<String>,
    relation: Vec<(String, String)>,
    valuation: BTreeMap<String, Vec<String>>,
}

/// A finite Kripke model. Worlds keep their given order; the relation and
/// valuation refer only to listed worlds and the valuation is defined
/// exactly on the signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    worlds: Vec<String>,
    index: BTreeMap<String, usize>,
    edges: BTreeSet<(usize, usize)>,
    succ: Vec<BTreeSet<usize>>,
    pred: Vec<BTreeSet<usize>>,
    valuation: BTreeMap<String, BTreeSet<usize>>,
    signature: PropSet,
}

impl KripkeModel {
    pub fn new(
        worlds: Vec<String>,
        relation: Vec<(String, String)>,
        valuation: BTreeMap<String, Vec<String>>,
    ) -> Result<KripkeModel, ModelError> {
        let mut index = BTreeMap::new();
        for (i, w) in worlds.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(ModelError::DuplicateWorld(w.clone()));
            }
        }
        let look = |w: &String| -> Result<usize, ModelError> {
            index
                .get(w)
                .copied()
                .ok_or_else(|| ModelError::UnknownWorld(w.clone()))
        };
        let mut edges = BTreeSet::new();
        let mut succ = vec![BTreeSet::new(); worlds.len()];
        let mut pred = vec![BTreeSet::new(); worlds.len()];
        for (a, b) in &relation {
            let (i, j) = (look(a)?, look(b)?);
            edges.insert((i, j));
            succ[i].insert(j);
            pred[j].insert(i);
        }
        let mut val = BTreeMap::new();
        for (p, ws) in &valuation {
            let mut set = BTreeSet::new();
            for w in ws {
                set.insert(look(w)?);
            }
            val.insert(p.clone(), set);
        }
        let signature = PropSet::new(valuation.keys().cloned());
        Ok(KripkeModel {
            worlds,
            index,
            edges,
            succ,
            pred,
            valuation: val,
            signature,
        })
    }

    pub fn from_json(text: &str) -> Result<KripkeModel, ModelError> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| ModelError::Format(e.to_string()))?;
        KripkeModel::new(file.worlds, file.relation, file.valuation)
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            worlds: self.worlds.clone(),
            relation: self
                .edges
                .iter()
                .map(|&(i, j)| (self.worlds[i].clone(), self.worlds[j].clone()))
                .collect(),
            valuation: self
                .valuation
                .iter()
                .map(|(p, set)| (p.clone(), set.iter().map(|&i| self.worlds[i].clone()).collect()))
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("model serialization cannot fail")
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_index(&self, id: &str) -> Result<usize, ModelError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| ModelError::UnknownWorld(id.to_string()))
    }

    pub fn world_id(&self, i: usize) -> &str {
        &self.worlds[i]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.contains(&(from, to))
    }

    pub fn successors(&self, w: usize) -> &BTreeSet<usize> {
        &self.succ[w]
    }

    pub fn predecessors(&self, w: usize) -> &BTreeSet<usize> {
        &self.pred[w]
    }

    pub fn signature(&self) -> &PropSet {
        &self.signature
    }

    pub fn holds(&self, p: &str, w: usize) -> bool {
        self.valuation.get(p).is_some_and(|set| set.contains(&w))
    }

    pub fn valuation_of(&self, p: &str) -> Option<&BTreeSet<usize>> {
        self.valuation.get(p)
    }

    /// Resolves a team of world ids to internal indices.
    pub fn team_indices(&self, t: &Team) -> Result<BTreeSet<usize>, ModelError> {
        t.worlds().map(|w| self.world_index(w)).collect()
    }

    pub fn team_from_indices<I: IntoIterator<Item = usize>>(&self, idx: I) -> Team {
        idx.into_iter().map(|i| self.worlds[i].clone()).collect()
    }

    /// The full team of all worlds.
    pub fn universe(&self) -> Team {
        Team(self.worlds.iter().cloned().collect())
    }
}

/// `{v | exists w in t with wRv}`.
pub fn image(m: &KripkeModel, t: &Team) -> Result<Team, ModelError> {
    let idx = m.team_indices(t)?;
    Ok(m.team_from_indices(idx.iter().flat_map(|&w| m.successors(w).iter().copied())))
}

/// `{w | exists v in t with wRv}`.
pub fn preimage(m: &KripkeModel, t: &Team) -> Result<Team, ModelError> {
    let idx = m.team_indices(t)?;
    Ok(m.team_from_indices(idx.iter().flat_map(|&v| m.predecessors(v).iter().copied())))
}

/// True iff `s` is a successor team of `t`: `s` is inside the image of
/// `t` and every world of `t` sees some world of `s`.
pub fn is_successor_team(m: &KripkeModel, t: &Team, s: &Team) -> Result<bool, ModelError> {
    let ti = m.team_indices(t)?;
    let si = m.team_indices(s)?;
    Ok(successor_indices(m, &ti, &si))
}

fn successor_indices(m: &KripkeModel, t: &BTreeSet<usize>, s: &BTreeSet<usize>) -> bool {
    s.iter().all(|&v| m.predecessors(v).iter().any(|w| t.contains(w)))
        && t.iter().all(|&w| m.successors(w).iter().any(|v| s.contains(v)))
}

/// All successor teams of `t`, sorted by size and then lexicographically
/// by world ids.
pub fn enumerate_successor_teams(m: &KripkeModel, t: &Team) -> Result<Vec<Team>, ModelError> {
    let ti = m.team_indices(t)?;
    let img: Vec<usize> = ti
        .iter()
        .flat_map(|&w| m.successors(w).iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << img.len()) {
        let s: BTreeSet<usize> = img
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &w)| w)
            .collect();
        if successor_indices(m, &ti, &s) {
            out.push(m.team_from_indices(s));
        }
    }
    out.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.0.iter().cmp(b.0.iter()))
    });
    Ok(out)
}

/// Tags the worlds of each part with its position (`w#i`) and forms the
/// union model and union team. The empty list yields the fixed model
/// `M*` (one world `star`, empty relation, empty signature) with the
/// empty team.
pub fn disjoint_union(parts: &[(KripkeModel, Team)]) -> (KripkeModel, Team) {
    if parts.is_empty() {
        let m = KripkeModel::new(vec!["star".to_string()], vec![], BTreeMap::new())
            .expect("fixed one-world model is well-formed");
        return (m, Team::empty());
    }
    let tag = |w: &str, i: usize| format!("{w}#{i}");
    let mut worlds = Vec::new();
    let mut relation = Vec::new();
    let mut valuation: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut team = Team::empty();
    for (i, (m, t)) in parts.iter().enumerate() {
        for w in m.worlds() {
            worlds.push(tag(w, i));
        }
        for &(a, b) in &m.edges {
            relation.push((tag(m.world_id(a), i), tag(m.world_id(b), i)));
        }
        for (p, set) in &m.valuation {
            let entry = valuation.entry(p.clone()).or_default();
            entry.extend(set.iter().map(|&w| tag(m.world_id(w), i)));
        }
        // Make sure every signature proposition is present even when its
        // extension is empty in this part.
        for p in m.signature.names() {
            valuation.entry(p.clone()).or_default();
        }
        for w in t.worlds() {
            team.insert(tag(w, i));
        }
    }
    let m = KripkeModel::new(worlds, relation, valuation)
        .expect("tagged worlds are unique and all references resolve");
    (m, team)
}

#[cfg(test)]
pub(crate) fn example_one() -> KripkeModel {
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

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Team {
        Team::parse(s)
    }

    #[test]
    fn image_examples() {
        let m = example_one();
        assert_eq!(image(&m, &t("u,v")).unwrap(), t("u',v',w'"));
        assert_eq!(image(&m, &Team::empty()).unwrap(), Team::empty());
        assert_eq!(image(&m, &t("u")).unwrap(), t("u'"));
    }

    #[test]
    fn preimage_examples() {
        let m = example_one();
        assert_eq!(preimage(&m, &t("v'")).unwrap(), t("v"));
        assert_eq!(preimage(&m, &Team::empty()).unwrap(), Team::empty());
        assert_eq!(preimage(&m, &t("u',v',w'")).unwrap(), t("u,v"));
    }

    #[test]
    fn successor_team_examples() {
        let m = example_one();
        assert!(is_successor_team(&m, &t("u,v"), &t("u',v'")).unwrap());
        assert!(!is_successor_team(&m, &t("u,v"), &t("v',w'")).unwrap());
        assert!(is_successor_team(&m, &Team::empty(), &Team::empty()).unwrap());
    }

    #[test]
    fn successor_enumeration_examples() {
        let m = example_one();
        assert_eq!(
            enumerate_successor_teams(&m, &t("u,v")).unwrap(),
            vec![t("u',v'"), t("u',w'"), t("u',v',w'")]
        );
        assert_eq!(
            enumerate_successor_teams(&m, &Team::empty()).unwrap(),
            vec![Team::empty()]
        );
        assert_eq!(enumerate_successor_teams(&m, &t("u")).unwrap(), vec![t("u'")]);
    }

    // Exhaustive subset oracle: the enumeration returns exactly the
    // subsets of the image that pass `is_successor_team`.
    #[test]
    fn successor_enumeration_matches_subset_oracle() {
        let m = example_one();
        for team in [t("u"), t("v"), t("u,v"), t("u,v,u'"), t("u',v',w'")] {
            let img: Vec<String> = image(&m, &team).unwrap().worlds().map(String::from).collect();
            let mut expected = Vec::new();
            for mask in 0u32..(1 << img.len()) {
                let s: Team = img
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, w)| w.clone())
                    .collect();
                if is_successor_team(&m, &team, &s).unwrap() {
                    expected.push(s);
                }
            }
            let mut got = enumerate_successor_teams(&m, &team).unwrap();
            got.sort();
            expected.sort();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn union_of_successor_teams_is_successor_team() {
        let m = example_one();
        let team = t("u,v");
        let all = enumerate_successor_teams(&m, &team).unwrap();
        for a in &all {
            for b in &all {
                assert!(is_successor_team(&m, &team, &a.union(b)).unwrap());
            }
        }
    }

    #[test]
    fn galois_duality() {
        let m = example_one();
        for w in m.worlds() {
            for v in m.worlds() {
                let fwd = image(&m, &Team::new([w.clone()])).unwrap().contains(v);
                let bwd = preimage(&m, &Team::new([v.clone()])).unwrap().contains(w);
                assert_eq!(fwd, bwd, "duality fails at ({w},{v})");
            }
        }
    }

    #[test]
    fn image_distributes_over_union() {
        let m = example_one();
        let t1 = t("u");
        let t2 = t("v,u'");
        assert_eq!(
            image(&m, &t1.union(&t2)).unwrap(),
            image(&m, &t1).unwrap().union(&image(&m, &t2).unwrap())
        );
    }

    #[test]
    fn unknown_world_errors() {
        let m = example_one();
        assert!(matches!(
            image(&m, &t("nope")),
            Err(ModelError::UnknownWorld(_))
        ));
        assert!(matches!(
            KripkeModel::new(
                vec!["a".into()],
                vec![("a".into(), "b".into())],
                BTreeMap::new()
            ),
            Err(ModelError::UnknownWorld(_))
        ));
        assert!(matches!(
            KripkeModel::new(vec!["a".into(), "a".into()], vec![], BTreeMap::new()),
            Err(ModelError::DuplicateWorld(_))
        ));
    }

    #[test]
    fn disjoint_union_examples() {
        let m = example_one();
        let (u, team) = disjoint_union(&[
            (m.clone(), t("u,v")),
            (m.clone(), t("u,v")),
        ]);
        assert_eq!(u.world_count(), 10);
        assert_eq!(team.len(), 4);
        assert!(team.contains("u#0") && team.contains("v#1"));
        assert!(u.holds("p", u.world_index("v'#1").unwrap()));

        let (star, empty) = disjoint_union(&[]);
        assert_eq!(star.world_count(), 1);
        assert_eq!(star.world_id(0), "star");
        assert!(empty.is_empty());

        let (single, st) = disjoint_union(&[(m.clone(), t("u"))]);
        assert_eq!(single.world_count(), m.world_count());
        assert_eq!(st, t("u#0"));
        assert!(single.has_edge(
            single.world_index("u#0").unwrap(),
            single.world_index("u'#0").unwrap()
        ));
    }

    #[test]
    fn json_round_trip() {
        let m = example_one();
        let again = KripkeModel::from_json(&m.to_json()).unwrap();
        assert_eq!(m, again);
        assert!(matches!(
            KripkeModel::from_json("{"),
            Err(ModelError::Format(_))
        ));
        assert!(matches!(
            KripkeModel::from_json(r#"{"worlds":["a"],"relation":[],"valuation":{"p":["zz"]}}"#),
            Err(ModelError::UnknownWorld(_))
        ));
    }
}
