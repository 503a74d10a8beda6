//! World and team bounded bisimulation, Hintikka formulas, and the team
//! characteristic formulas zeta, eta, theta.

use std::collections::HashMap;

use crate::kripke::{KripkeModel, ModelError, Team};
use crate::syntax::{big_and, big_or, boxm, dia, inc, neg, prop, top, Formula, PropSet};

/// A model with a distinguished world, validated on construction.
#[derive(Clone, Copy)]
pub struct PointedModel<'a> {
    model: &'a KripkeModel,
    world: usize,
}

impl<'a> PointedModel<'a> {
    pub fn new(model: &'a KripkeModel, world: &str) -> Result<PointedModel<'a>, ModelError> {
        Ok(PointedModel {
            model,
            world: model.world_index(world)?,
        })
    }

    pub fn from_index(model: &'a KripkeModel, world: usize) -> PointedModel<'a> {
        assert!(world < model.world_count());
        PointedModel { model, world }
    }

    pub fn model(&self) -> &'a KripkeModel {
        self.model
    }

    pub fn world_index(&self) -> usize {
        self.world
    }

    pub fn world_id(&self) -> &'a str {
        self.model.world_id(self.world)
    }
}

/// Memoized bounded-bisimulation checker between two fixed models (which
/// may be the same model). Propositions absent from a signature count as
/// false everywhere in that model.
pub struct BisimChecker<'a> {
    left: &'a KripkeModel,
    right: &'a KripkeModel,
    props: Vec<String>,
    memo: HashMap<(usize, usize, u32), bool>,
}

impl<'a> BisimChecker<'a> {
    pub fn new(left: &'a KripkeModel, right: &'a KripkeModel, x: &PropSet) -> BisimChecker<'a> {
        BisimChecker {
            left,
            right,
            props: x.names().to_vec(),
            memo: HashMap::new(),
        }
    }

    fn atoms_agree(&self, wl: usize, wr: usize) -> bool {
        self.props
            .iter()
            .all(|p| self.left.holds(p, wl) == self.right.holds(p, wr))
    }

    /// Whether the two worlds are k-bisimilar.
    pub fn worlds(&mut self, wl: usize, wr: usize, k: u32) -> bool {
        if let Some(&v) = self.memo.get(&(wl, wr, k)) {
            return v;
        }
        let v = if !self.atoms_agree(wl, wr) {
            false
        } else if k == 0 {
            true
        } else {
            let forth = self.left.successors(wl).iter().all(|&v| {
                self.right
                    .successors(wr)
                    .iter()
                    .any(|&v2| self.worlds(v, v2, k - 1))
            });
            forth
                && self.right.successors(wr).iter().all(|&v2| {
                    self.left
                        .successors(wl)
                        .iter()
                        .any(|&v| self.worlds(v, v2, k - 1))
                })
        };
        self.memo.insert((wl, wr, k), v);
        v
    }

    /// Whether the two teams (as index slices) are k-bisimilar: the forth
    /// and back conditions over world bisimilarity.
    pub fn teams(&mut self, tl: &[usize], tr: &[usize], k: u32) -> bool {
        tl.iter().all(|&w| tr.iter().any(|&w2| self.worlds(w, w2, k)))
            && tr.iter().all(|&w2| tl.iter().any(|&w| self.worlds(w, w2, k)))
    }
}

/// Whether the two pointed models are k-bisimilar over `x`.
pub fn world_bisim_k(a: PointedModel, b: PointedModel, x: &PropSet, k: u32) -> bool {
    BisimChecker::new(a.model, b.model, x).worlds(a.world, b.world, k)
}

/// Whether the two models-with-teams are k-bisimilar over `x`.
pub fn team_bisim_k(
    a: (&KripkeModel, &Team),
    b: (&KripkeModel, &Team),
    x: &PropSet,
    k: u32,
) -> Result<bool, ModelError> {
    let ta: Vec<usize> = a.0.team_indices(a.1)?.into_iter().collect();
    let tb: Vec<usize> = b.0.team_indices(b.1)?.into_iter().collect();
    Ok(BisimChecker::new(a.0, b.0, x).teams(&ta, &tb, k))
}

// Worlds sorted by id, then thinned to the lexicographically least
// representative of each k-bisimilarity group.
fn representatives(m: &KripkeModel, worlds: &[usize], x: &PropSet, k: u32) -> Vec<usize> {
    let mut sorted: Vec<usize> = worlds.to_vec();
    sorted.sort_by(|&a, &b| m.world_id(a).cmp(m.world_id(b)));
    sorted.dedup();
    let mut checker = BisimChecker::new(m, m, x);
    let mut reps: Vec<usize> = Vec::new();
    for &w in &sorted {
        if !reps.iter().any(|&r| checker.worlds(r, w, k)) {
            reps.push(w);
        }
    }
    reps
}

fn hintikka_index(m: &KripkeModel, w: usize, x: &PropSet, k: u32) -> Formula {
    if k == 0 {
        return big_and(x.names().iter().map(|p| {
            if m.holds(p, w) {
                prop(p)
            } else {
                neg(prop(p))
            }
        }));
    }
    let succs: Vec<usize> = m.successors(w).iter().copied().collect();
    let reps = representatives(m, &succs, x, k - 1);
    let mut conjuncts = vec![hintikka_index(m, w, x, k - 1)];
    conjuncts.extend(reps.iter().map(|&v| dia(hintikka_index(m, v, x, k - 1))));
    conjuncts.push(boxm(big_or(
        reps.iter().map(|&v| hintikka_index(m, v, x, k - 1)),
    )));
    big_and(conjuncts)
}

/// The kth Hintikka formula of a pointed model: at depth 0 the literal
/// conjunction over `x`, at depth k+1 the depth-k formula conjoined with
/// one diamond per successor representative and a box over their
/// disjunction. Successors are deduplicated up to (k-1)-bisimilarity,
/// with the lexicographically least world representing each group.
pub fn hintikka_world(p: PointedModel, x: &PropSet, k: u32) -> Formula {
    hintikka_index(p.model, p.world, x, k)
}

/// The team characteristic formulas:
///
/// * `zeta`: conjunction of top inclusion atoms over the team's
///   representative Hintikka formulas (`top` when the team is empty);
/// * `eta`: disjunction of the same Hintikka formulas (`bot` when empty);
/// * `theta`: `eta` conjoined with the `zeta` conjuncts.
pub fn theta_team(
    mt: (&KripkeModel, &Team),
    x: &PropSet,
    k: u32,
) -> Result<(Formula, Formula, Formula), ModelError> {
    let (m, t) = mt;
    let idx: Vec<usize> = m.team_indices(t)?.into_iter().collect();
    let reps = representatives(m, &idx, x, k);
    let chis: Vec<Formula> = reps.iter().map(|&w| hintikka_index(m, w, x, k)).collect();
    let zeta_conjuncts: Vec<Formula> = if chis.is_empty() {
        vec![top()]
    } else {
        chis.iter()
            .map(|c| inc(vec![top()], vec![c.clone()]))
            .collect()
    };
    let eta = big_or(chis.clone());
    let zeta = big_and(zeta_conjuncts.clone());
    let theta = big_and(std::iter::once(eta.clone()).chain(zeta_conjuncts));
    Ok((zeta, eta, theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::example_one;
    use crate::semantics::{eval_classical_world, eval_team};
    use crate::syntax::parse_any;
    use std::collections::BTreeMap;

    fn ps(s: &str) -> PropSet {
        PropSet::new(s.split(',').filter(|p| !p.is_empty()))
    }

    // w1 and w2 both loop onto themselves and reach the p-world w3.
    fn looping_model() -> KripkeModel {
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

    #[test]
    fn world_bisim_examples() {
        let m = looping_model();
        let x = ps("p");
        let w1 = PointedModel::new(&m, "w1").unwrap();
        let w2 = PointedModel::new(&m, "w2").unwrap();
        for k in 0..=5 {
            assert!(world_bisim_k(w1, w2, &x, k), "w1 and w2 at k={k}");
        }

        let e = example_one();
        let up = PointedModel::new(&e, "u'").unwrap();
        let vp = PointedModel::new(&e, "v'").unwrap();
        let wp = PointedModel::new(&e, "w'").unwrap();
        assert!(world_bisim_k(up, wp, &x, 0));
        assert!(!world_bisim_k(up, vp, &x, 0));
    }

    #[test]
    fn team_bisim_examples() {
        let m = looping_model();
        let x = ps("p");
        let t1 = Team::parse("w1");
        let t12 = Team::parse("w1,w2");
        for k in 0..=3 {
            assert!(team_bisim_k((&m, &t1), (&m, &t12), &x, k).unwrap());
        }
        assert!(team_bisim_k((&m, &Team::empty()), (&m, &Team::empty()), &x, 4).unwrap());
        assert!(!team_bisim_k((&m, &Team::empty()), (&m, &t1), &x, 0).unwrap());
    }

    #[test]
    fn bisim_monotone_in_depth() {
        let m = example_one();
        let x = ps("p");
        for a in m.worlds() {
            for b in m.worlds() {
                let pa = PointedModel::new(&m, a).unwrap();
                let pb = PointedModel::new(&m, b).unwrap();
                for k in (1..=3).rev() {
                    if world_bisim_k(pa, pb, &x, k) {
                        assert!(world_bisim_k(pa, pb, &x, k - 1));
                    }
                }
            }
        }
    }

    #[test]
    fn hintikka_examples() {
        let m = example_one();
        let x = ps("p");
        let vp = PointedModel::new(&m, "v'").unwrap();
        let up = PointedModel::new(&m, "u'").unwrap();
        let u = PointedModel::new(&m, "u").unwrap();
        assert_eq!(hintikka_world(vp, &x, 0), parse_any("p").unwrap());
        assert_eq!(hintikka_world(up, &x, 0), parse_any("!p").unwrap());
        assert_eq!(hintikka_world(u, &x, 1), parse_any("!p & <>!p & []!p").unwrap());
        // Two propositions, depth 0: literal conjunction in signature order.
        let m2 = KripkeModel::new(
            vec!["a".into()],
            vec![],
            BTreeMap::from([("p".into(), vec!["a".into()]), ("q".into(), vec![])]),
        )
        .unwrap();
        let a = PointedModel::new(&m2, "a").unwrap();
        assert_eq!(hintikka_world(a, &ps("p,q"), 0), parse_any("p & !q").unwrap());
    }

    #[test]
    fn hintikka_dedupes_bisimilar_successors() {
        let m = example_one();
        let x = ps("p");
        let v = PointedModel::new(&m, "v").unwrap();
        // v's successors v' and w' disagree on p: two representatives.
        assert_eq!(
            hintikka_world(v, &x, 1),
            parse_any("!p & <>p & <>!p & [](p | !p)").unwrap()
        );
        // Two 0-bisimilar successors collapse to one representative.
        let m2 = KripkeModel::new(
            vec!["r".into(), "s1".into(), "s2".into()],
            vec![("r".into(), "s1".into()), ("r".into(), "s2".into())],
            BTreeMap::from([("p".into(), vec![])]),
        )
        .unwrap();
        let r = PointedModel::new(&m2, "r").unwrap();
        assert_eq!(hintikka_world(r, &x, 1), parse_any("!p & <>!p & []!p").unwrap());
    }

    #[test]
    fn theta_examples() {
        let m = example_one();
        let x = ps("p");
        let (zeta, eta, theta) = theta_team((&m, &Team::parse("u',v'")), &x, 0).unwrap();
        assert_eq!(zeta, parse_any("(top <= !p) & (top <= p)").unwrap());
        assert_eq!(eta, parse_any("!p | p").unwrap());
        assert_eq!(theta, parse_any("(!p | p) & (top <= !p) & (top <= p)").unwrap());

        let (zeta, eta, theta) = theta_team((&m, &Team::empty()), &x, 0).unwrap();
        assert_eq!(zeta, parse_any("top").unwrap());
        assert_eq!(eta, parse_any("bot").unwrap());
        assert_eq!(theta, parse_any("bot & top").unwrap());

        let (_, _, theta) = theta_team((&m, &Team::parse("v'")), &x, 0).unwrap();
        assert_eq!(theta, parse_any("p & (top <= p)").unwrap());
    }

    // Satisfaction of a world's Hintikka formula coincides with
    // bisimilarity to that world, on the example model.
    #[test]
    fn hintikka_matches_bisimulation_on_example() {
        let m = example_one();
        let x = ps("p");
        for k in 0..=2 {
            for a in m.worlds() {
                let chi = hintikka_world(PointedModel::new(&m, a).unwrap(), &x, k);
                for b in m.worlds() {
                    let bis = world_bisim_k(
                        PointedModel::new(&m, a).unwrap(),
                        PointedModel::new(&m, b).unwrap(),
                        &x,
                        k,
                    );
                    let sat = eval_classical_world(&m, b, &chi).unwrap();
                    assert_eq!(bis, sat, "worlds {a},{b} at depth {k}");
                }
            }
        }
    }

    // zeta captures the forth condition, eta the back condition, theta
    // their conjunction (or team emptiness), over all team pairs of the
    // example model at depth 0.
    #[test]
    fn theta_laws_on_example() {
        let m = example_one();
        let x = ps("p");
        let worlds: Vec<String> = m.worlds().to_vec();
        let teams: Vec<Team> = (0u32..1 << worlds.len())
            .map(|mask| {
                worlds
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, w)| w.clone())
                    .collect()
            })
            .collect();
        let mut checker = BisimChecker::new(&m, &m, &x);
        for t in &teams {
            let (zeta, eta, theta) = theta_team((&m, t), &x, 0).unwrap();
            let ti: Vec<usize> = m.team_indices(t).unwrap().into_iter().collect();
            for s in &teams {
                let si: Vec<usize> = m.team_indices(s).unwrap().into_iter().collect();
                let forth = ti.iter().all(|&w| si.iter().any(|&w2| checker.worlds(w, w2, 0)));
                let back = si.iter().all(|&w2| ti.iter().any(|&w| checker.worlds(w, w2, 0)));
                assert_eq!(
                    eval_team(&m, s, &zeta).unwrap(),
                    s.is_empty() || forth,
                    "zeta law at T={t} S={s}"
                );
                assert_eq!(eval_team(&m, s, &eta).unwrap(), back, "eta law at T={t} S={s}");
                assert_eq!(
                    eval_team(&m, s, &theta).unwrap(),
                    s.is_empty() || (forth && back),
                    "theta law at T={t} S={s}"
                );
            }
        }
    }
}
