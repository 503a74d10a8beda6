//! The derivation checker.

use std::collections::{BTreeMap, BTreeSet};

use super::{Derivation, ProofError, RuleName, SideCondition, System};
use crate::syntax::{big_and, big_or, bot, inc, neg, top, Formula};

type Open = BTreeMap<String, Formula>;

/// Checks a derivation against a system. On success returns the root
/// conclusion and the set of undischarged assumption formulas.
pub fn check_derivation(
    d: &Derivation,
    system: System,
) -> Result<(Formula, BTreeSet<Formula>), ProofError> {
    label_consistency(d)?;
    let open = check_node(d, system)?;
    Ok((
        d.conclusion().clone(),
        open.into_values().collect::<BTreeSet<Formula>>(),
    ))
}

// A label names one assumption class: every leaf carrying it must carry
// the same formula.
fn label_consistency(d: &Derivation) -> Result<(), ProofError> {
    let mut seen: BTreeMap<&str, &Formula> = BTreeMap::new();
    let mut stack = vec![d];
    while let Some(node) = stack.pop() {
        match node {
            Derivation::Assume { label, formula } => {
                if let Some(prev) = seen.insert(label, formula) {
                    if prev != formula {
                        return Err(ProofError::Discharge(format!(
                            "label `{label}` is reused for distinct formulas `{prev}` and `{formula}`"
                        )));
                    }
                }
            }
            Derivation::Infer { premises, .. } => stack.extend(premises.iter()),
        }
    }
    Ok(())
}

fn mismatch(rule: RuleName, detail: impl Into<String>) -> ProofError {
    ProofError::SchemaMismatch {
        rule: rule.name().to_string(),
        detail: detail.into(),
    }
}

fn side(rule: RuleName, condition: SideCondition, detail: impl Into<String>) -> ProofError {
    ProofError::SideConditionViolation {
        rule: rule.name().to_string(),
        condition,
        detail: detail.into(),
    }
}

// Removes `label` from `open`, failing when it is absent; returns the
// discharged formula.
fn discharge(open: &mut Open, label: &str, rule: RuleName) -> Result<Formula, ProofError> {
    open.remove(label).ok_or_else(|| {
        ProofError::Discharge(format!(
            "rule {} discharges label `{label}`, which is not open in the designated subderivation",
            rule.name()
        ))
    })
}

// Discharge whose assumption formula is fixed by the schema.
fn discharge_expected(
    open: &mut Open,
    label: &str,
    expected: &Formula,
    rule: RuleName,
) -> Result<(), ProofError> {
    let got = discharge(open, label, rule)?;
    if &got != expected {
        return Err(mismatch(
            rule,
            format!("discharged assumption `{got}` should be `{expected}`"),
        ));
    }
    Ok(())
}

fn require_classical_open(open: &Open, rule: RuleName) -> Result<(), ProofError> {
    for f in open.values() {
        if !f.is_classical() {
            return Err(side(
                rule,
                SideCondition::ClassicalAssumptions,
                format!("undischarged assumption `{f}` is not classical"),
            ));
        }
    }
    Ok(())
}

fn require_closed_open(open: &Open, rule: RuleName) -> Result<(), ProofError> {
    if let Some((_, f)) = open.iter().next() {
        return Err(side(
            rule,
            SideCondition::ClosedSubderivation,
            format!("subderivation still assumes `{f}`"),
        ));
    }
    Ok(())
}

fn merge(mut a: Open, b: Open) -> Open {
    a.extend(b);
    a
}

// Destructuring helpers.

fn as_or(f: &Formula, rule: RuleName) -> Result<(&Formula, &Formula), ProofError> {
    match f {
        Formula::Or(l, r) => Ok((l, r)),
        _ => Err(mismatch(rule, format!("`{f}` is not a disjunction"))),
    }
}

fn as_and(f: &Formula, rule: RuleName) -> Result<(&Formula, &Formula), ProofError> {
    match f {
        Formula::And(l, r) => Ok((l, r)),
        _ => Err(mismatch(rule, format!("`{f}` is not a conjunction"))),
    }
}

fn as_neg(f: &Formula, rule: RuleName) -> Result<&Formula, ProofError> {
    match f {
        Formula::Neg(g) => Ok(g),
        _ => Err(mismatch(rule, format!("`{f}` is not a negation"))),
    }
}

fn as_dia(f: &Formula, rule: RuleName) -> Result<&Formula, ProofError> {
    match f {
        Formula::Dia(g) => Ok(g),
        _ => Err(mismatch(rule, format!("`{f}` is not a diamond formula"))),
    }
}

fn as_box(f: &Formula, rule: RuleName) -> Result<&Formula, ProofError> {
    match f {
        Formula::Box(g) => Ok(g),
        _ => Err(mismatch(rule, format!("`{f}` is not a box formula"))),
    }
}

fn as_inc(f: &Formula, rule: RuleName) -> Result<(&[Formula], &[Formula]), ProofError> {
    match f {
        Formula::Inc(l, r) => Ok((l, r)),
        _ => Err(mismatch(rule, format!("`{f}` is not an inclusion atom"))),
    }
}

// The system's subteam operator.
fn as_bullet(f: &Formula, system: System, rule: RuleName) -> Result<&Formula, ProofError> {
    match (system, f) {
        (System::MLMightSys, Formula::Might(g)) => Ok(g),
        (System::MLSMightSys, Formula::SMight(g)) => Ok(g),
        _ => Err(mismatch(
            rule,
            format!("`{f}` is not a {} operator formula", system.name()),
        )),
    }
}

fn bullet(system: System, f: Formula) -> Formula {
    system
        .bullet(f)
        .expect("bullet rules are gated to the might systems")
}

// Truth-constant tuple decoding: `top` is true, `bot` is false.
fn as_constant(f: &Formula) -> Option<bool> {
    if f.is_top() {
        Some(true)
    } else if *f == Formula::Bottom {
        Some(false)
    } else {
        None
    }
}

fn as_constants(fs: &[Formula], rule: RuleName) -> Result<Vec<bool>, ProofError> {
    fs.iter()
        .map(|f| {
            as_constant(f).ok_or_else(|| {
                mismatch(rule, format!("`{f}` is not a truth constant in a primitive atom"))
            })
        })
        .collect()
}

fn constant(b: bool) -> Formula {
    if b {
        top()
    } else {
        bot()
    }
}

/// The conjunction `a^x` of exponentiated side formulas, left
/// associated.
pub(crate) fn seq_pow(seq: &[Formula], x: &[bool]) -> Formula {
    big_and(
        seq.iter()
            .zip(x)
            .map(|(a, &xi)| if xi { a.clone() } else { neg(a.clone()) }),
    )
}

/// All truth-constant tuples of the given width, the all-`top` tuple
/// first, in binary-counting order.
pub(crate) fn constant_tuples(n: usize) -> Vec<Vec<bool>> {
    (0..1u32 << n)
        .map(|code| (0..n).map(|i| code >> (n - 1 - i) & 1 == 0).collect())
        .collect()
}

fn check_node(d: &Derivation, system: System) -> Result<Open, ProofError> {
    match d {
        Derivation::Assume { label, formula } => {
            formula.check_logic(system.logic()).map_err(|e| {
                ProofError::SchemaMismatch {
                    rule: "Assume".to_string(),
                    detail: format!("assumption `{formula}`: {e}"),
                }
            })?;
            Ok(Open::from([(label.clone(), formula.clone())]))
        }
        Derivation::Infer {
            rule,
            conclusion,
            premises,
            discharges,
        } => {
            let rule = *rule;
            if !rule.in_system(system) {
                return Err(ProofError::RuleNotInSystem {
                    rule: rule.name().to_string(),
                    system,
                });
            }
            conclusion
                .check_logic(system.logic())
                .map_err(|e| mismatch(rule, format!("conclusion `{conclusion}`: {e}")))?;
            let checked: Vec<(Formula, Open)> = premises
                .iter()
                .map(|p| Ok((p.conclusion().clone(), check_node(p, system)?)))
                .collect::<Result<_, ProofError>>()?;
            check_rule(rule, conclusion, checked, discharges, system)
        }
    }
}

fn expect_arity(
    rule: RuleName,
    premises: &[(Formula, Open)],
    n: usize,
) -> Result<(), ProofError> {
    if premises.len() != n {
        return Err(mismatch(
            rule,
            format!("expected {n} premises, found {}", premises.len()),
        ));
    }
    Ok(())
}

fn expect_discharges(rule: RuleName, discharges: &[String], n: usize) -> Result<(), ProofError> {
    if discharges.len() != n {
        return Err(ProofError::Discharge(format!(
            "rule {} discharges {n} label(s), found {}",
            rule.name(),
            discharges.len()
        )));
    }
    Ok(())
}

fn check_rule(
    rule: RuleName,
    conclusion: &Formula,
    mut premises: Vec<(Formula, Open)>,
    discharges: &[String],
    system: System,
) -> Result<Open, ProofError> {
    use RuleName::*;
    match rule {
        NegI | Raa => {
            expect_arity(rule, &premises, 1)?;
            expect_discharges(rule, discharges, 1)?;
            let (body, mut open) = premises.pop().unwrap();
            if body != Formula::Bottom {
                return Err(mismatch(rule, format!("subderivation concludes `{body}`, not `bot`")));
            }
            let assumed = discharge(&mut open, &discharges[0], rule)?;
            let expected = if rule == NegI {
                neg(assumed.clone())
            } else {
                as_neg(&assumed, rule)?.clone()
            };
            if *conclusion != expected {
                return Err(mismatch(
                    rule,
                    format!("conclusion `{conclusion}` should be `{expected}`"),
                ));
            }
            require_classical_open(&open, rule)?;
            Ok(open)
        }
        NegE => {
            expect_arity(rule, &premises, 2)?;
            expect_discharges(rule, discharges, 0)?;
            let (nalpha, open1) = premises.pop().unwrap();
            let (alpha, open0) = premises.pop().unwrap();
            if as_neg(&nalpha, rule)? != &alpha {
                return Err(mismatch(
                    rule,
                    format!("`{nalpha}` is not the negation of `{alpha}`"),
                ));
            }
            Ok(merge(open0, open1))
        }
        OrI => {
            expect_arity(rule, &premises, 1)?;
            expect_discharges(rule, discharges, 0)?;
            let (p, open) = premises.pop().unwrap();
            let (l, r) = as_or(conclusion, rule)?;
            if p != *l && p != *r {
                return Err(mismatch(
                    rule,
                    format!("premise `{p}` is not a disjunct of `{conclusion}`"),
                ));
            }
            Ok(open)
        }
        OrE => {
            expect_arity(rule, &premises, 3)?;
            expect_discharges(rule, discharges, 2)?;
            let (minor2, mut open2) = premises.pop().unwrap();
            let (minor1, mut open1) = premises.pop().unwrap();
            let (major, open0) = premises.pop().unwrap();
            let (phi, psi) = as_or(&major, rule)?;
            if minor1 != *conclusion || minor2 != *conclusion {
                return Err(mismatch(
                    rule,
                    "both minor subderivations must conclude the rule's conclusion".to_string(),
                ));
            }
            discharge_expected(&mut open1, &discharges[0], phi, rule)?;
            discharge_expected(&mut open2, &discharges[1], psi, rule)?;
            require_classical_open(&open1, rule)?;
            require_classical_open(&open2, rule)?;
            Ok(merge(open0, merge(open1, open2)))
        }
        AndI => {
            expect_arity(rule, &premises, 2)?;
            expect_discharges(rule, discharges, 0)?;
            let (r, open1) = premises.pop().unwrap();
            let (l, open0) = premises.pop().unwrap();
            let (cl, cr) = as_and(conclusion, rule)?;
            if *cl != l || *cr != r {
                return Err(mismatch(
                    rule,
                    format!("conclusion `{conclusion}` is not the conjunction of the premises"),
                ));
            }
            Ok(merge(open0, open1))
        }
        AndE => {
            expect_arity(rule, &premises, 1)?;
            expect_discharges(rule, discharges, 0)?;
            let (p, open) = premises.pop().unwrap();
            let (l, r) = as_and(&p, rule)?;
            if conclusion != l && conclusion != r {
                return Err(mismatch(
                    rule,
                    format!("conclusion `{conclusion}` is not a conjunct of `{p}`"),
                ));
            }
            Ok(open)
        }
        DiaBoxInter => {
            expect_arity(rule, &premises, 1)?;
            expect_discharges(rule, discharges, 0)?;
            let (p, open) = premises.pop().unwrap();
            let alpha = as_box(as_neg(&p, rule)?, rule)?;
            let expected = crate::syntax::dia(neg(alpha.clone()));
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            Ok(open)
        }
        BoxDiaInter => {
            expect_arity(rule, &premises, 1)?;
            expect_discharges(rule, discharges, 0)?;
            let (p, open) = premises.pop().unwrap();
            let alpha = as_neg(as_dia(&p, rule)?, rule)?;
            let expected = neg(crate::syntax::boxm(alpha.clone()));
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            Ok(open)
        }
        DiaOrDistr => {
            expect_arity(rule, &premises, 1)?;
            expect_discharges(rule, discharges, 0)?;
            let (p, open) = premises.pop().unwrap();
            let (phi, psi) = as_or(as_dia(&p, rule)?, rule)?;
            let expected = big_or([crate::syntax::dia(phi.clone()), crate::syntax::dia(psi.clone())]);
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            Ok(open)
        }
        BoxMon => {
            if premises.is_empty() {
                return Err(mismatch(rule, "needs the subderivation premise".to_string()));
            }
            expect_discharges(rule, discharges, premises.len() - 1)?;
            let boxed: Vec<(Formula, Open)> = premises.split_off(1);
            let (psi, mut open0) = premises.pop().unwrap();
            let expected = crate::syntax::boxm(psi.clone());
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            let mut bodies: Vec<Formula> = Vec::new();
            let mut open_rest = Open::new();
            for (p, open) in boxed {
                bodies.push(as_box(&p, rule)?.clone());
                open_rest = merge(open_rest, open);
            }
            let mut discharged: Vec<Formula> = discharges
                .iter()
                .map(|l| discharge(&mut open0, l, rule))
                .collect::<Result<_, _>>()?;
            discharged.sort();
            bodies.sort();
            if discharged != bodies {
                return Err(mismatch(
                    rule,
                    "discharged assumptions do not match the boxed premises".to_string(),
                ));
            }
            require_closed_open(&open0, rule)?;
            Ok(open_rest)
        }
        DiaMon => {
            expect_arity(rule, &premises, 2)?;
            expect_discharges(rule, discharges, 1)?;
            let (diap, open1) = premises.pop().unwrap();
            let (psi, mut open0) = premises.pop().unwrap();
            let phi = as_dia(&diap, rule)?;
            discharge_expected(&mut open0, &discharges[0], phi, rule)?;
            let expected = crate::syntax::dia(psi.clone());
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            require_closed_open(&open0, rule)?;
            Ok(open1)
        }
        SubId => {
            expect_arity(rule, &premises, 0)?;
            expect_discharges(rule, discharges, 0)?;
            let (l, r) = as_inc(conclusion, rule)?;
            if l != r {
                return Err(mismatch(
                    rule,
                    format!("`{conclusion}` is not an inclusion of a sequence in itself"),
                ));
            }
            Ok(Open::new())
        }
        SubExp => {
            expect_arity(rule, &premises, 2)?;
            expect_discharges(rule, discharges, 0)?;
            let (incp, open1) = premises.pop().unwrap();
            let (pow, open0) = premises.pop().unwrap();
            let (b, c) = as_inc(&incp, rule)?;
            let (lhs, rhs) = as_inc(conclusion, rule)?;
            if lhs.len() != b.len() + 1 {
                return Err(mismatch(
                    rule,
                    "conclusion must prepend one column to the premise atom".to_string(),
                ));
            }
            let x = as_constant(&lhs[0]).ok_or_else(|| {
                mismatch(rule, format!("`{}` is not a truth constant", lhs[0]))
            })?;
            if lhs[1..] != *b || rhs[1..] != *c {
                return Err(mismatch(
                    rule,
                    "conclusion does not extend the premise atom columnwise".to_string(),
                ));
            }
            let alpha = rhs[0].clone();
            let expected = seq_pow(&[alpha], &[x]);
            if pow != expected {
                return Err(mismatch(
                    rule,
                    format!("first premise `{pow}` should be `{expected}`"),
                ));
            }
            Ok(merge(open0, open1))
        }
        SubNegE => {
            expect_arity(rule, &premises, 2)?;
            expect_discharges(rule, discharges, 0)?;
            let (incp, open1) = premises.pop().unwrap();
            let (negpow, open0) = premises.pop().unwrap();
            let (xs, a) = as_inc(&incp, rule)?;
            let consts = as_constants(xs, rule)?;
            let expected = neg(seq_pow(a, &consts));
            if negpow != expected {
                return Err(mismatch(
                    rule,
                    format!("first premise `{negpow}` should be `{expected}`"),
                ));
            }
            Ok(merge(open0, open1))
        }
        OrSubE => {
            expect_arity(rule, &premises, 3)?;
            expect_discharges(rule, discharges, 2)?;
            let (minor2, mut open2) = premises.pop().unwrap();
            let (minor1, mut open1) = premises.pop().unwrap();
            let (major, open0) = premises.pop().unwrap();
            let (atom, psi) = as_or(&major, rule)?;
            let (xs, _) = as_inc(atom, rule)?;
            as_constants(xs, rule)?;
            if minor1 != *conclusion || minor2 != *conclusion {
                return Err(mismatch(
                    rule,
                    "both minor subderivations must conclude the rule's conclusion".to_string(),
                ));
            }
            discharge_expected(&mut open1, &discharges[0], atom, rule)?;
            discharge_expected(&mut open2, &discharges[1], psi, rule)?;
            Ok(merge(open0, merge(open1, open2)))
        }
        SubExt => {
            expect_arity(rule, &premises, 1)?;
            expect_discharges(rule, discharges, 0)?;
            let (p, open) = premises.pop().unwrap();
            let (a, b) = as_inc(conclusion, rule)?;
            let expected = big_and(constant_tuples(a.len()).into_iter().map(|x| {
                big_or([
                    neg(seq_pow(a, &x)),
                    inc(x.iter().map(|&b| constant(b)).collect(), b.to_vec()),
                ])
            }));
            if p != expected {
                return Err(mismatch(
                    rule,
                    format!("premise `{p}` should be the full case conjunction `{expected}`"),
                ));
            }
            Ok(open)
        }
        SubRdt => {
            expect_arity(rule, &premises, 1)?;
            expect_discharges(rule, discharges, 0)?;
            let (p, open) = premises.pop().unwrap();
            let (a, b) = as_inc(&p, rule)?;
            let matches_some = constant_tuples(a.len()).into_iter().any(|x| {
                let expected = big_or([
                    neg(seq_pow(a, &x)),
                    inc(x.iter().map(|&v| constant(v)).collect(), b.to_vec()),
                ]);
                *conclusion == expected
            });
            if !matches_some {
                return Err(mismatch(
                    rule,
                    format!(
                        "conclusion `{conclusion}` is not a case disjunction of `{p}` for any constant tuple"
                    ),
                ));
            }
            Ok(open)
        }
        SubDistr => {
            if premises.len() < 2 {
                return Err(mismatch(rule, "needs the disjunction and at least one atom".to_string()));
            }
            expect_discharges(rule, discharges, 0)?;
            let atoms: Vec<(Formula, Open)> = premises.split_off(1);
            let (major, open0) = premises.pop().unwrap();
            let (phi, psi) = as_or(&major, rule)?;
            let mut opens = open0;
            let mut pows = vec![phi.clone()];
            let mut incs = Vec::new();
            for (p, open) in atoms {
                let (xs, a) = as_inc(&p, rule)?;
                let consts = as_constants(xs, rule)?;
                pows.push(seq_pow(a, &consts));
                incs.push(p.clone());
                opens = merge(opens, open);
            }
            let expected = big_or([
                big_and(std::iter::once(big_or(pows)).chain(incs)),
                psi.clone(),
            ]);
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            Ok(opens)
        }
        DiaSubDistr => {
            expect_arity(rule, &premises, 1)?;
            expect_discharges(rule, discharges, 0)?;
            let (p, open) = premises.pop().unwrap();
            let (xs, a) = as_inc(as_dia(&p, rule)?, rule)?;
            let consts = as_constants(xs, rule)?;
            let expected = inc(vec![top()], vec![crate::syntax::dia(seq_pow(a, &consts))]);
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            Ok(open)
        }
        DiaBoxSubExc => {
            expect_arity(rule, &premises, 1)?;
            expect_discharges(rule, discharges, 0)?;
            let (p, open) = premises.pop().unwrap();
            let (xs, a) = as_inc(as_box(conclusion, rule)?, rule)?;
            let consts = as_constants(xs, rule)?;
            let expected = inc(vec![top()], vec![crate::syntax::dia(seq_pow(a, &consts))]);
            if p != expected {
                return Err(mismatch(
                    rule,
                    format!("premise `{p}` should be `{expected}`"),
                ));
            }
            Ok(open)
        }
        BoxDiaSubExc => {
            expect_arity(rule, &premises, 2)?;
            expect_discharges(rule, discharges, 0)?;
            let (boxp, open1) = premises.pop().unwrap();
            let (topdia, open0) = premises.pop().unwrap();
            // First premise: a top inclusion atom with some diamond
            // formula on the right.
            let (xs0, rhs0) = as_inc(&topdia, rule)?;
            if as_constants(xs0, rule)? != vec![true] || rhs0.len() != 1 {
                return Err(mismatch(
                    rule,
                    format!("first premise `{topdia}` is not a unary top inclusion atom"),
                ));
            }
            as_dia(&rhs0[0], rule)?;
            let (xs, a) = as_inc(as_box(&boxp, rule)?, rule)?;
            let consts = as_constants(xs, rule)?;
            let expected = inc(vec![top()], vec![crate::syntax::dia(seq_pow(a, &consts))]);
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            Ok(merge(open0, open1))
        }
        BoxOrSubE => {
            expect_arity(rule, &premises, 3)?;
            expect_discharges(rule, discharges, 2)?;
            let (minor2, mut open2) = premises.pop().unwrap();
            let (minor1, mut open1) = premises.pop().unwrap();
            let (major, open0) = premises.pop().unwrap();
            let (atom, psi) = as_or(as_box(&major, rule)?, rule)?;
            let (xs, a) = as_inc(atom, rule)?;
            let consts = as_constants(xs, rule)?;
            if minor1 != *conclusion || minor2 != *conclusion {
                return Err(mismatch(
                    rule,
                    "both minor subderivations must conclude the rule's conclusion".to_string(),
                ));
            }
            let hyp1 = inc(vec![top()], vec![crate::syntax::dia(seq_pow(a, &consts))]);
            let hyp2 = crate::syntax::boxm(psi.clone());
            discharge_expected(&mut open1, &discharges[0], &hyp1, rule)?;
            discharge_expected(&mut open2, &discharges[1], &hyp2, rule)?;
            Ok(merge(open0, merge(open1, open2)))
        }
        SubDiaDistr => {
            if premises.len() < 2 {
                return Err(mismatch(rule, "needs the diamond and at least one atom".to_string()));
            }
            expect_discharges(rule, discharges, 0)?;
            let atoms: Vec<(Formula, Open)> = premises.split_off(1);
            let (diap, open0) = premises.pop().unwrap();
            let phi = as_dia(&diap, rule)?;
            let mut opens = open0;
            let mut pows = vec![phi.clone()];
            let mut incs = Vec::new();
            for (p, open) in atoms {
                let (xs, rhs) = as_inc(&p, rule)?;
                let consts = as_constants(xs, rule)?;
                if rhs.len() != 1 {
                    return Err(mismatch(rule, format!("`{p}` is not a unary atom")));
                }
                let alpha = as_dia(&rhs[0], rule)?.clone();
                pows.push(seq_pow(std::slice::from_ref(&alpha), &consts));
                incs.push(inc(
                    consts.iter().map(|&v| constant(v)).collect(),
                    vec![alpha],
                ));
                opens = merge(opens, open);
            }
            let expected = crate::syntax::dia(big_and(
                std::iter::once(big_or(pows)).chain(incs),
            ));
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            Ok(opens)
        }
        MightJoin => {
            if system != System::MLMightSys {
                return Err(ProofError::RuleNotInSystem {
                    rule: rule.name().to_string(),
                    system,
                });
            }
            expect_arity(rule, &premises, 2)?;
            expect_discharges(rule, discharges, 0)?;
            let (mp2, open1) = premises.pop().unwrap();
            let (mp1, open0) = premises.pop().unwrap();
            let phi = as_bullet(&mp1, system, rule)?.clone();
            let psi = as_bullet(&mp2, system, rule)?.clone();
            let expected = bullet(
                system,
                big_and([
                    big_or([phi.clone(), psi.clone()]),
                    bullet(system, phi),
                    bullet(system, psi),
                ]),
            );
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            Ok(merge(open0, open1))
        }
        MightE => {
            if system != System::MLMightSys {
                return Err(ProofError::RuleNotInSystem {
                    rule: rule.name().to_string(),
                    system,
                });
            }
            expect_arity(rule, &premises, 1)?;
            expect_discharges(rule, discharges, 0)?;
            let (p, open) = premises.pop().unwrap();
            let inner = as_bullet(&p, system, rule)?;
            let phi = as_bullet(inner, system, rule)?;
            let expected = bullet(system, phi.clone());
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            Ok(open)
        }
        SMightAndSimpl => {
            if system != System::MLSMightSys {
                return Err(ProofError::RuleNotInSystem {
                    rule: rule.name().to_string(),
                    system,
                });
            }
            expect_arity(rule, &premises, 1)?;
            expect_discharges(rule, discharges, 0)?;
            let (p, open) = premises.pop().unwrap();
            let (inner, psi) = as_and(as_bullet(&p, system, rule)?, rule)?;
            let phi = as_bullet(inner, system, rule)?;
            let expected = bullet(system, big_and([phi.clone(), psi.clone()]));
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            Ok(open)
        }
        BulletMon => {
            expect_arity(rule, &premises, 2)?;
            expect_discharges(rule, discharges, 1)?;
            let (psi, mut open1) = premises.pop().unwrap();
            let (mphi, open0) = premises.pop().unwrap();
            let phi = as_bullet(&mphi, system, rule)?;
            discharge_expected(&mut open1, &discharges[0], phi, rule)?;
            let expected = bullet(system, psi.clone());
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            require_classical_open(&open1, rule)?;
            Ok(merge(open0, open1))
        }
        BulletOrDistr => {
            expect_arity(rule, &premises, 1)?;
            expect_discharges(rule, discharges, 0)?;
            let (p, open) = premises.pop().unwrap();
            let (phi, psi) = as_or(as_bullet(&p, system, rule)?, rule)?;
            let expected = big_or([bullet(system, phi.clone()), bullet(system, psi.clone())]);
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            Ok(open)
        }
        BulletI => {
            expect_arity(rule, &premises, 1)?;
            expect_discharges(rule, discharges, 0)?;
            let (alpha, open) = premises.pop().unwrap();
            if !alpha.is_classical() {
                return Err(mismatch(
                    rule,
                    format!("premise `{alpha}` must be classical"),
                ));
            }
            let expected = bullet(system, alpha.clone());
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            Ok(open)
        }
        BulletNegE => {
            expect_arity(rule, &premises, 2)?;
            expect_discharges(rule, discharges, 0)?;
            let (malpha, open1) = premises.pop().unwrap();
            let (nalpha, open0) = premises.pop().unwrap();
            let alpha = as_neg(&nalpha, rule)?;
            if as_bullet(&malpha, system, rule)? != alpha {
                return Err(mismatch(
                    rule,
                    format!("`{malpha}` does not match the negated premise `{nalpha}`"),
                ));
            }
            Ok(merge(open0, open1))
        }
        OrBulletE => {
            expect_arity(rule, &premises, 3)?;
            expect_discharges(rule, discharges, 2)?;
            let (minor2, mut open2) = premises.pop().unwrap();
            let (minor1, mut open1) = premises.pop().unwrap();
            let (major, open0) = premises.pop().unwrap();
            let (mphi, psi) = as_or(&major, rule)?;
            as_bullet(mphi, system, rule)?;
            if minor1 != *conclusion || minor2 != *conclusion {
                return Err(mismatch(
                    rule,
                    "both minor subderivations must conclude the rule's conclusion".to_string(),
                ));
            }
            discharge_expected(&mut open1, &discharges[0], mphi, rule)?;
            discharge_expected(&mut open2, &discharges[1], psi, rule)?;
            Ok(merge(open0, merge(open1, open2)))
        }
        BulletDistr => {
            if premises.len() < 2 {
                return Err(mismatch(rule, "needs the disjunction and at least one operand".to_string()));
            }
            expect_discharges(rule, discharges, 0)?;
            let bullets: Vec<(Formula, Open)> = premises.split_off(1);
            let (major, open0) = premises.pop().unwrap();
            let (phi, psi) = as_or(&major, rule)?;
            let mut opens = open0;
            let mut chis = vec![phi.clone()];
            let mut mchis = Vec::new();
            for (p, open) in bullets {
                let chi = as_bullet(&p, system, rule)?.clone();
                chis.push(chi);
                mchis.push(p.clone());
                opens = merge(opens, open);
            }
            let expected = big_or([
                big_and(std::iter::once(big_or(chis)).chain(mchis)),
                psi.clone(),
            ]);
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            Ok(opens)
        }
        BoxDiaBulletExc => {
            expect_arity(rule, &premises, 2)?;
            expect_discharges(rule, discharges, 0)?;
            let (boxm_p, open1) = premises.pop().unwrap();
            let (mdia, open0) = premises.pop().unwrap();
            as_dia(as_bullet(&mdia, system, rule)?, rule)?;
            let phi = as_bullet(as_box(&boxm_p, rule)?, system, rule)?;
            let expected = bullet(system, crate::syntax::dia(phi.clone()));
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            Ok(merge(open0, open1))
        }
        DiaBoxBulletExc => {
            expect_arity(rule, &premises, 1)?;
            expect_discharges(rule, discharges, 0)?;
            let (p, open) = premises.pop().unwrap();
            let phi = as_dia(as_bullet(&p, system, rule)?, rule)?;
            let expected = crate::syntax::boxm(bullet(system, phi.clone()));
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            Ok(open)
        }
        BoxOrBulletE => {
            expect_arity(rule, &premises, 3)?;
            expect_discharges(rule, discharges, 2)?;
            let (minor2, mut open2) = premises.pop().unwrap();
            let (minor1, mut open1) = premises.pop().unwrap();
            let (major, open0) = premises.pop().unwrap();
            let (mphi, psi) = as_or(as_box(&major, rule)?, rule)?;
            let phi = as_bullet(mphi, system, rule)?;
            if minor1 != *conclusion || minor2 != *conclusion {
                return Err(mismatch(
                    rule,
                    "both minor subderivations must conclude the rule's conclusion".to_string(),
                ));
            }
            let hyp1 = bullet(system, crate::syntax::dia(phi.clone()));
            let hyp2 = crate::syntax::boxm(psi.clone());
            discharge_expected(&mut open1, &discharges[0], &hyp1, rule)?;
            discharge_expected(&mut open2, &discharges[1], &hyp2, rule)?;
            Ok(merge(open0, merge(open1, open2)))
        }
        DiaBulletDistr => {
            expect_arity(rule, &premises, 1)?;
            expect_discharges(rule, discharges, 0)?;
            let (p, open) = premises.pop().unwrap();
            let phi = as_bullet(as_dia(&p, rule)?, system, rule)?;
            let expected = bullet(system, crate::syntax::dia(phi.clone()));
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            Ok(open)
        }
        BulletDiaDistr => {
            if premises.len() < 2 {
                return Err(mismatch(rule, "needs the diamond and at least one operand".to_string()));
            }
            expect_discharges(rule, discharges, 0)?;
            let bullets: Vec<(Formula, Open)> = premises.split_off(1);
            let (diap, open0) = premises.pop().unwrap();
            let phi = as_dia(&diap, rule)?;
            let mut opens = open0;
            let mut psis = vec![phi.clone()];
            let mut mpsis = Vec::new();
            for (p, open) in bullets {
                let psi = as_dia(as_bullet(&p, system, rule)?, rule)?.clone();
                psis.push(psi.clone());
                mpsis.push(bullet(system, psi));
                opens = merge(opens, open);
            }
            let expected = crate::syntax::dia(big_and(
                std::iter::once(big_or(psis)).chain(mpsis),
            ));
            if *conclusion != expected {
                return Err(mismatch(rule, format!("expected conclusion `{expected}`")));
            }
            Ok(opens)
        }
    }
}
