//! Entailment and equivalence decisions: normal-form based (exact within
//! the enumeration caps) and bounded countermodel search (sound
//! refutation, complete only up to the bound).

use std::collections::BTreeMap;

use crate::kripke::{KripkeModel, Team};
use crate::normal_form::{nf_first_uncovered, property_of, property_with_model, NfError};
use crate::semantics::{EvalContext, EvalError};
use crate::syntax::{big_and, Formula, PropSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerdictStatus {
    /// The premises entail the conclusion (normal-form method only).
    Entails,
    /// A model and team satisfying every premise but not the conclusion.
    CounterModel { model: KripkeModel, team: Team },
    /// The search bound was exhausted without finding a countermodel.
    BoundExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    NormalForm,
    BoundedSearch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntailmentVerdict {
    pub status: VerdictStatus,
    pub method: Method,
}

impl EntailmentVerdict {
    pub fn entails(&self) -> bool {
        matches!(self.status, VerdictStatus::Entails)
    }
}

fn replay_countermodel(
    premises: &[Formula],
    conclusion: &Formula,
    model: &KripkeModel,
    team: &Team,
) -> Result<(), EvalError> {
    for p in premises {
        assert!(
            EvalContext::new(model, p)?.eval(team)?,
            "countermodel fails to satisfy premise `{p}`"
        );
    }
    assert!(
        !EvalContext::new(model, conclusion)?.eval(team)?,
        "countermodel satisfies the conclusion `{conclusion}`"
    );
    Ok(())
}

/// Decides entailment by comparing team-type properties at the maximal
/// modal depth of the formulas. Exact: a failing team type is
/// materialized as a canonical-model counterexample and replayed before
/// being reported.
pub fn entails_nf(
    premises: &[Formula],
    conclusion: &Formula,
    x: &PropSet,
    cap: u64,
) -> Result<EntailmentVerdict, NfError> {
    let k = premises
        .iter()
        .chain(std::iter::once(conclusion))
        .map(Formula::modal_depth)
        .max()
        .unwrap_or(0);
    let premise_conj = big_and(premises.iter().cloned());
    let (c, canon) = property_with_model(&premise_conj, x, k, cap)?;
    let d = property_of(conclusion, x, k, cap)?;
    match nf_first_uncovered(&c, &d)? {
        None => Ok(EntailmentVerdict {
            status: VerdictStatus::Entails,
            method: Method::NormalForm,
        }),
        Some(mask) => {
            let team = canon.team_of_mask(mask);
            replay_countermodel(premises, conclusion, canon.model(), &team)?;
            Ok(EntailmentVerdict {
                status: VerdictStatus::CounterModel {
                    model: canon.model().clone(),
                    team,
                },
                method: Method::NormalForm,
            })
        }
    }
}

/// Decides equivalence: both entailment directions via the normal-form
/// method. `Entails` means the formulas are equivalent.
pub fn equiv(f: &Formula, g: &Formula, x: &PropSet, cap: u64) -> Result<EntailmentVerdict, NfError> {
    let fwd = entails_nf(std::slice::from_ref(f), g, x, cap)?;
    if !fwd.entails() {
        return Ok(fwd);
    }
    entails_nf(std::slice::from_ref(g), f, x, cap)
}

/// All models with exactly `n` worlds over `props`, up to isomorphism.
/// Worlds are named `w1..wn`; relations are enumerated sparse first.
pub fn enumerate_models(props: &PropSet, n: usize) -> Vec<KripkeModel> {
    assert!(n >= 1 && n <= 5, "model enumeration is meant for tiny sizes");
    let rel_bits = n * n;
    let val_bits = n * props.len();
    let mut perms: Vec<Vec<usize>> = Vec::new();
    permutations(n, &mut (0..n).collect::<Vec<_>>(), 0, &mut perms);

    let apply_rel = |rel: u64, perm: &[usize]| -> u64 {
        let mut out = 0u64;
        for i in 0..n {
            for j in 0..n {
                if rel >> (i * n + j) & 1 == 1 {
                    out |= 1 << (perm[i] * n + perm[j]);
                }
            }
        }
        out
    };
    let apply_val = |val: u64, perm: &[usize]| -> u64 {
        let mut out = 0u64;
        for p in 0..props.len() {
            for i in 0..n {
                if val >> (p * n + i) & 1 == 1 {
                    out |= 1 << (p * n + perm[i]);
                }
            }
        }
        out
    };

    let mut rels: Vec<u64> = (0..1u64 << rel_bits).collect();
    rels.sort_by_key(|r| (r.count_ones(), *r));

    let mut out = Vec::new();
    for &rel in &rels {
        for val in 0..1u64 << val_bits {
            // Keep only the least representative of the isomorphism orbit.
            let canonical = perms.iter().all(|perm| {
                let r2 = apply_rel(rel, perm);
                (r2.count_ones(), r2, apply_val(val, perm)) >= (rel.count_ones(), rel, val)
            });
            if !canonical {
                continue;
            }
            let worlds: Vec<String> = (1..=n).map(|i| format!("w{i}")).collect();
            let relation: Vec<(String, String)> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| rel >> (i * n + j) & 1 == 1)
                .map(|(i, j)| (worlds[i].clone(), worlds[j].clone()))
                .collect();
            let valuation: BTreeMap<String, Vec<String>> = props
                .names()
                .iter()
                .enumerate()
                .map(|(p, name)| {
                    (
                        name.clone(),
                        (0..n)
                            .filter(|i| val >> (p * n + i) & 1 == 1)
                            .map(|i| worlds[i].clone())
                            .collect(),
                    )
                })
                .collect();
            out.push(KripkeModel::new(worlds, relation, valuation).expect("well-formed by construction"));
        }
    }
    out
}

fn permutations(n: usize, current: &mut Vec<usize>, at: usize, out: &mut Vec<Vec<usize>>) {
    if at == n {
        out.push(current.clone());
        return;
    }
    for i in at..n {
        current.swap(at, i);
        permutations(n, current, at + 1, out);
        current.swap(at, i);
    }
}

/// All team bitmasks over `n` worlds, largest teams first.
pub fn team_masks_desc(n: usize) -> Vec<u64> {
    let mut masks: Vec<u64> = (0..1u64 << n).collect();
    masks.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
    masks
}

/// Refutation search: enumerates all models up to `max_worlds` worlds
/// over the formulas' joint signature (relations and valuations
/// exhaustively, pruned up to isomorphism) and all teams, largest first.
/// Returns the first countermodel, or `BoundExhausted`.
pub fn entails_bounded(
    premises: &[Formula],
    conclusion: &Formula,
    max_worlds: usize,
) -> Result<EntailmentVerdict, EvalError> {
    assert!(max_worlds >= 1, "search needs at least one world");
    let props = premises
        .iter()
        .chain(std::iter::once(conclusion))
        .fold(PropSet::default(), |acc, f| acc.union(&f.props()));
    for n in 1..=max_worlds {
        for model in enumerate_models(&props, n) {
            let mut premise_ctxs = premises
                .iter()
                .map(|p| EvalContext::new(&model, p))
                .collect::<Result<Vec<_>, _>>()?;
            let mut conclusion_ctx = EvalContext::new(&model, conclusion)?;
            for &mask in &team_masks_desc(n) {
                if premise_ctxs.iter_mut().all(|ctx| ctx.eval_mask(mask))
                    && !conclusion_ctx.eval_mask(mask)
                {
                    let team = model.team_from_indices((0..n).filter(|i| mask >> i & 1 == 1));
                    replay_countermodel(premises, conclusion, &model, &team)?;
                    return Ok(EntailmentVerdict {
                        status: VerdictStatus::CounterModel { model, team },
                        method: Method::BoundedSearch,
                    });
                }
            }
        }
    }
    Ok(EntailmentVerdict {
        status: VerdictStatus::BoundExhausted,
        method: Method::BoundedSearch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::DEFAULT_TYPE_CAP;
    use crate::syntax::parse_any;

    fn ps(s: &str) -> PropSet {
        PropSet::new(s.split(',').filter(|p| !p.is_empty()))
    }

    fn f(s: &str) -> Formula {
        parse_any(s).unwrap()
    }

    #[test]
    fn nf_entailment_examples() {
        let x = ps("p");
        let v = entails_nf(&[f("<>(top<=p)")], &f("[](top<=p)"), &x, DEFAULT_TYPE_CAP).unwrap();
        assert!(v.entails(), "diamond entails box for primitive atoms");

        let v = entails_nf(
            &[f("(p|!p) & top<=p")],
            &f("(p & top<=p)|(!p & top<=p)"),
            &x,
            DEFAULT_TYPE_CAP,
        )
        .unwrap();
        assert!(matches!(v.status, VerdictStatus::CounterModel { .. }));

        let g = f("<>(p | top<=p) & [](!p | bot<=p)");
        let v = entails_nf(&[g.clone()], &g, &x, DEFAULT_TYPE_CAP).unwrap();
        assert!(v.entails(), "entailment is reflexive");
    }

    #[test]
    fn nf_countermodels_replay() {
        let x = ps("p");
        let premises = [f("(p|!p) & top<=p")];
        let conclusion = f("(p & top<=p)|(!p & top<=p)");
        let v = entails_nf(&premises, &conclusion, &x, DEFAULT_TYPE_CAP).unwrap();
        match v.status {
            VerdictStatus::CounterModel { model, team } => {
                assert!(crate::semantics::eval_team(&model, &team, &premises[0]).unwrap());
                assert!(!crate::semantics::eval_team(&model, &team, &conclusion).unwrap());
            }
            other => panic!("expected countermodel, got {other:?}"),
        }
    }

    #[test]
    fn bounded_search_examples() {
        let v = entails_bounded(
            &[f("smight p"), f("smight q")],
            &f("smight (smight p & smight q)"),
            2,
        )
        .unwrap();
        assert!(matches!(v.status, VerdictStatus::CounterModel { .. }));

        let v = entails_bounded(&[f("p")], &f("p | q"), 3).unwrap();
        assert!(matches!(v.status, VerdictStatus::BoundExhausted));

        let v = entails_bounded(&[f("might (might p & might q)")], &f("might p & might q"), 3)
            .unwrap();
        assert!(matches!(v.status, VerdictStatus::BoundExhausted));
    }

    #[test]
    fn equiv_examples() {
        let x = ps("p");
        assert!(equiv(&f("bot <= p"), &f("top <= !p"), &x, DEFAULT_TYPE_CAP)
            .unwrap()
            .entails());
        assert!(equiv(&f("top <= p"), &f("might p"), &x, DEFAULT_TYPE_CAP)
            .unwrap()
            .entails());
        assert!(equiv(&f("top <= p"), &f("smight p"), &x, DEFAULT_TYPE_CAP)
            .unwrap()
            .entails());
        let v = equiv(&f("p"), &f("q"), &ps("p,q"), DEFAULT_TYPE_CAP).unwrap();
        assert!(matches!(v.status, VerdictStatus::CounterModel { .. }));
    }

    #[test]
    fn model_enumeration_is_small_and_canonical() {
        let x = ps("p");
        let models = enumerate_models(&x, 2);
        // 16 relations x 4 valuations = 64 raw; the 2-element symmetric
        // group cuts the count roughly in half.
        assert!(models.len() < 64 && models.len() >= 36, "{}", models.len());
        for m in &models {
            assert_eq!(m.world_count(), 2);
        }
        assert_eq!(enumerate_models(&PropSet::default(), 1).len(), 2);
    }

    #[test]
    fn entailment_is_transitive_on_samples() {
        let x = ps("p");
        let fs = [f("p & top<=p"), f("top <= p"), f("might p | top")];
        for a in &fs {
            for b in &fs {
                for c in &fs {
                    let ab = entails_nf(std::slice::from_ref(a), b, &x, DEFAULT_TYPE_CAP)
                        .unwrap()
                        .entails();
                    let bc = entails_nf(std::slice::from_ref(b), c, &x, DEFAULT_TYPE_CAP)
                        .unwrap()
                        .entails();
                    let ac = entails_nf(std::slice::from_ref(a), c, &x, DEFAULT_TYPE_CAP)
                        .unwrap()
                        .entails();
                    if ab && bc {
                        assert!(ac, "transitivity fails: {a} |= {b} |= {c}");
                    }
                }
            }
        }
    }

    // "might p | top" mixes might with nothing else; sanity-check that
    // property computation accepts each logic's own connectives only.
    #[test]
    fn type_explosion_propagates() {
        let x = ps("p");
        let err = entails_nf(&[f("<><>p")], &f("p"), &x, DEFAULT_TYPE_CAP).unwrap_err();
        assert!(matches!(err, NfError::TypeExplosion(_)));
    }
}
