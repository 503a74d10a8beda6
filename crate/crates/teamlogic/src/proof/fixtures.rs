//! A library of checked derivations: derived rules rebuilt from the
//! primitive ones (inclusion-atom transitivity and contraction, the
//! top-atom introduction and exchange laws, the might/or distribution
//! equivalence), one minimal instance per rule of every table, and a
//! rejected near-miss for each.

use std::collections::BTreeSet;

use super::{Derivation, RuleName, System};
use crate::syntax::{and, big_and, bot, dia, inc, neg, or, parse_any, prop, smight, top, Formula};

pub struct Fixture {
    pub name: &'static str,
    pub system: System,
    pub derivation: Derivation,
    pub expected_conclusion: Formula,
    pub expected_open: BTreeSet<Formula>,
    pub mutants: Vec<Mutant>,
}

pub struct Mutant {
    pub description: &'static str,
    pub system: System,
    pub derivation: Derivation,
    /// One of the [`crate::proof::ProofError::class`] strings.
    pub expected_class: &'static str,
}

// ---------------------------------------------------------------------------
// Small builders
// ---------------------------------------------------------------------------

struct Labels(usize);

impl Labels {
    fn new() -> Labels {
        Labels(0)
    }

    fn next(&mut self) -> String {
        self.0 += 1;
        format!("h{}", self.0)
    }
}

fn assume(label: &str, f: Formula) -> Derivation {
    Derivation::Assume {
        label: label.to_string(),
        formula: f,
    }
}

fn infer(
    rule: RuleName,
    conclusion: Formula,
    premises: Vec<Derivation>,
    discharges: Vec<String>,
) -> Derivation {
    Derivation::Infer {
        rule,
        conclusion,
        premises,
        discharges,
    }
}

fn pow(f: &Formula, x: bool) -> Formula {
    if x {
        f.clone()
    } else {
        neg(f.clone())
    }
}

fn constant(x: bool) -> Formula {
    if x {
        top()
    } else {
        bot()
    }
}

// OrI into a disjunction that has the premise as one of its disjuncts.
fn or_inject(d: Derivation, target: Formula) -> Derivation {
    infer(RuleName::OrI, target, vec![d], vec![])
}

fn and_intro(l: Derivation, r: Derivation) -> Derivation {
    let c = and(l.conclusion().clone(), r.conclusion().clone());
    infer(RuleName::AndI, c, vec![l, r], vec![])
}

fn and_elim_left(d: Derivation) -> Derivation {
    let Formula::And(l, _) = d.conclusion().clone() else {
        panic!("and_elim_left of a non-conjunction");
    };
    infer(RuleName::AndE, *l, vec![d], vec![])
}

fn neg_elim(alpha: Derivation, negalpha: Derivation, conclusion: Formula) -> Derivation {
    infer(RuleName::NegE, conclusion, vec![alpha, negalpha], vec![])
}

// Discharges `label` (assuming `alpha`) from a derivation of bot.
fn neg_intro(label: &str, body: Derivation, alpha: Formula) -> Derivation {
    infer(
        RuleName::NegI,
        neg(alpha),
        vec![body],
        vec![label.to_string()],
    )
}

// Discharges `label` (assuming the negation of `alpha`).
fn raa(label: &str, body: Derivation, alpha: Formula) -> Derivation {
    infer(RuleName::Raa, alpha, vec![body], vec![label.to_string()])
}

// From a derivation of l | r, concludes r | l.
fn or_commute(lb: &mut Labels, major: Derivation) -> Derivation {
    let Formula::Or(l, r) = major.conclusion().clone() else {
        panic!("or_commute of a non-disjunction");
    };
    let target = or((*r).clone(), (*l).clone());
    let l1 = lb.next();
    let l2 = lb.next();
    let minor1 = or_inject(assume(&l1, (*l).clone()), target.clone());
    let minor2 = or_inject(assume(&l2, (*r).clone()), target.clone());
    infer(
        RuleName::OrE,
        target,
        vec![major, minor1, minor2],
        vec![l1, l2],
    )
}

// A closed derivation of alpha | !alpha.
fn excluded_middle(lb: &mut Labels, alpha: Formula) -> Derivation {
    let target = or(alpha.clone(), neg(alpha.clone()));
    let lem = lb.next();
    let la = lb.next();
    let d2 = or_inject(assume(&la, alpha.clone()), target.clone());
    let d3 = neg_elim(d2, assume(&lem, neg(target.clone())), bot());
    let d4 = neg_intro(&la, d3, alpha.clone());
    let d5 = or_inject(d4, target.clone());
    let d6 = neg_elim(d5, assume(&lem, neg(target.clone())), bot());
    raa(&lem, d6, target)
}

// From a leaf assuming !left, derives !(left & right).
fn neg_conj_from_neg_left(
    lb: &mut Labels,
    neg_left: Derivation,
    left: Formula,
    right: Formula,
) -> Derivation {
    let l = lb.next();
    let conj = and(left.clone(), right.clone());
    let body = neg_elim(and_elim_left(assume(&l, conj.clone())), neg_left, bot());
    neg_intro(&l, body, conj)
}

// SubRdt instance fixed to one constant tuple.
fn sub_rdt(premise: Derivation, seq_l: &[Formula], seq_r: &[Formula], x: &[bool]) -> Derivation {
    let pow_conj = big_and(seq_l.iter().zip(x).map(|(f, &xi)| pow(f, xi)));
    let conclusion = or(
        neg(pow_conj),
        inc(x.iter().map(|&xi| constant(xi)).collect(), seq_r.to_vec()),
    );
    infer(RuleName::SubRdt, conclusion, vec![premise], vec![])
}

// ---------------------------------------------------------------------------
// Derived-rule constructions
// ---------------------------------------------------------------------------

// One case disjunct !(a^x) | x <= c, derived from ab <= cd.
fn contraction_case(
    lb: &mut Labels,
    premise: &mut dyn FnMut(&mut Labels) -> Derivation,
    a: &Formula,
    b: &Formula,
    c: &Formula,
    d: &Formula,
    x: bool,
) -> Derivation {
    let target = or(neg(pow(a, x)), inc(vec![constant(x)], vec![c.clone()]));

    // From the two-column atom with a fixed y column, conclude the case
    // disjunct: either x <= c directly (via the identity atom on c), or
    // a contradiction through the negated conjunction.
    let case_atom = |lb: &mut Labels, y: bool| -> (Derivation, String) {
        let atom = inc(
            vec![constant(x), constant(y)],
            vec![c.clone(), d.clone()],
        );
        let l_atom = lb.next();
        let s0 = infer(RuleName::SubId, inc(vec![c.clone()], vec![c.clone()]), vec![], vec![]);
        let s1 = sub_rdt(s0, &[c.clone()], &[c.clone()], &[x]);
        let s2 = or_commute(lb, s1);
        let l_inc = lb.next();
        let minor1 = or_inject(
            assume(&l_inc, inc(vec![constant(x)], vec![c.clone()])),
            target.clone(),
        );
        let l_neg = lb.next();
        let negconj = neg_conj_from_neg_left(
            lb,
            assume(&l_neg, neg(pow(c, x))),
            pow(c, x),
            pow(d, y),
        );
        let minor2 = infer(
            RuleName::SubNegE,
            target.clone(),
            vec![negconj, assume(&l_atom, atom)],
            vec![],
        );
        let deriv = infer(
            RuleName::OrSubE,
            target.clone(),
            vec![s2, minor1, minor2],
            vec![l_inc, l_neg],
        );
        (deriv, l_atom)
    };

    // From both negated conjunctions, conclude !(a^x) classically.
    let l_ax = lb.next();
    let l_n1 = lb.next();
    let l_n2 = lb.next();
    let n_true = neg(and(pow(a, x), pow(b, true)));
    let n_false = neg(and(pow(a, x), pow(b, false)));
    let case_neg = {
        let em = excluded_middle(lb, b.clone());
        let l_b = lb.next();
        let conj_b = and_intro(assume(&l_ax, pow(a, x)), assume(&l_b, b.clone()));
        let body_b = neg_elim(conj_b, assume(&l_n1, n_true.clone()), bot());
        let l_nb = lb.next();
        let conj_nb = and_intro(assume(&l_ax, pow(a, x)), assume(&l_nb, neg(b.clone())));
        let body_nb = neg_elim(conj_nb, assume(&l_n2, n_false.clone()), bot());
        let ore = infer(
            RuleName::OrE,
            bot(),
            vec![em, body_b, body_nb],
            vec![l_b, l_nb],
        );
        or_inject(neg_intro(&l_ax, ore, pow(a, x)), target.clone())
    };

    let (case_a_true, l_j1) = case_atom(lb, true);
    let (case_a_false, l_j2) = case_atom(lb, false);

    let mut major = |lb: &mut Labels, y: bool| -> Derivation {
        let prem = premise(lb);
        let rdt = sub_rdt(
            prem,
            &[a.clone(), b.clone()],
            &[c.clone(), d.clone()],
            &[x, y],
        );
        or_commute(lb, rdt)
    };
    let major_true = major(lb, true);
    let major_false = major(lb, false);
    let inner = infer(
        RuleName::OrSubE,
        target.clone(),
        vec![major_false, case_a_false, case_neg],
        vec![l_j2, l_n2],
    );
    infer(
        RuleName::OrSubE,
        target,
        vec![major_true, case_a_true, inner],
        vec![l_j1, l_n1],
    )
}

// The contraction ab <= cd |- a <= c, fully expanded.
fn contraction(
    lb: &mut Labels,
    premise: &mut dyn FnMut(&mut Labels) -> Derivation,
    a: &Formula,
    b: &Formula,
    c: &Formula,
    d: &Formula,
) -> Derivation {
    let case_true = contraction_case(lb, premise, a, b, c, d, true);
    let case_false = contraction_case(lb, premise, a, b, c, d, false);
    infer(
        RuleName::SubExt,
        inc(vec![a.clone()], vec![c.clone()]),
        vec![and_intro(case_true, case_false)],
        vec![],
    )
}

// Transitivity a <= b, b <= c |- a <= c, fully expanded.
fn transitivity(
    lb: &mut Labels,
    prem_ab: &mut dyn FnMut(&mut Labels) -> Derivation,
    prem_bc: &mut dyn FnMut(&mut Labels) -> Derivation,
    a: &Formula,
    b: &Formula,
    c: &Formula,
) -> Derivation {
    let mut case = |lb: &mut Labels, x: bool| -> Derivation {
        let target = or(neg(pow(a, x)), inc(vec![constant(x)], vec![c.clone()]));
        let prem = prem_ab(lb);
        let rdt_ab = sub_rdt(prem, &[a.clone()], &[b.clone()], &[x]);
        let major_ab = or_commute(lb, rdt_ab);
        let l_j = lb.next();
        let inner = {
            let prem = prem_bc(lb);
            let rdt_bc = sub_rdt(prem, &[b.clone()], &[c.clone()], &[x]);
            let major_bc = or_commute(lb, rdt_bc);
            let l_inc = lb.next();
            let minor1 = or_inject(
                assume(&l_inc, inc(vec![constant(x)], vec![c.clone()])),
                target.clone(),
            );
            let l_neg = lb.next();
            let minor2 = infer(
                RuleName::SubNegE,
                target.clone(),
                vec![
                    assume(&l_neg, neg(pow(b, x))),
                    assume(&l_j, inc(vec![constant(x)], vec![b.clone()])),
                ],
                vec![],
            );
            infer(
                RuleName::OrSubE,
                target.clone(),
                vec![major_bc, minor1, minor2],
                vec![l_inc, l_neg],
            )
        };
        let l_negp = lb.next();
        let minor2 = or_inject(assume(&l_negp, neg(pow(a, x))), target.clone());
        infer(
            RuleName::OrSubE,
            target,
            vec![major_ab, inner, minor2],
            vec![l_j, l_negp],
        )
    };
    let case_true = case(lb, true);
    let case_false = case(lb, false);
    infer(
        RuleName::SubExt,
        inc(vec![a.clone()], vec![c.clone()]),
        vec![and_intro(case_true, case_false)],
        vec![],
    )
}

// might f | might g |- might (f | g) (or the singular variant).
fn bullet_or_to_bullet(system: System, f: Formula, g: Formula) -> Derivation {
    let b = |x: Formula| system.bullet(x).expect("might system");
    let mut lb = Labels::new();
    let l0 = lb.next();
    let l1 = lb.next();
    let l2 = lb.next();
    let l3 = lb.next();
    let l4 = lb.next();
    let target = b(or(f.clone(), g.clone()));
    let minor1 = infer(
        RuleName::BulletMon,
        target.clone(),
        vec![
            assume(&l1, b(f.clone())),
            or_inject(assume(&l2, f.clone()), or(f.clone(), g.clone())),
        ],
        vec![l2.clone()],
    );
    let minor2 = infer(
        RuleName::BulletMon,
        target.clone(),
        vec![
            assume(&l3, b(g.clone())),
            or_inject(assume(&l4, g.clone()), or(f.clone(), g.clone())),
        ],
        vec![l4.clone()],
    );
    infer(
        RuleName::OrBulletE,
        target,
        vec![
            assume(&l0, or(b(f.clone()), b(g.clone()))),
            minor1,
            minor2,
        ],
        vec![l1, l3],
    )
}

// ---------------------------------------------------------------------------
// The library
// ---------------------------------------------------------------------------

fn p(s: &str) -> Formula {
    parse_any(s).unwrap()
}

fn opens<const N: usize>(fs: [&str; N]) -> BTreeSet<Formula> {
    fs.iter().map(|s| p(s)).collect()
}

// Replaces the conclusion of the root node.
fn with_conclusion(d: &Derivation, new: Formula) -> Derivation {
    match d {
        Derivation::Assume { label, .. } => Derivation::Assume {
            label: label.clone(),
            formula: new,
        },
        Derivation::Infer {
            rule,
            premises,
            discharges,
            ..
        } => Derivation::Infer {
            rule: *rule,
            conclusion: new,
            premises: premises.clone(),
            discharges: discharges.clone(),
        },
    }
}

fn simple_mutant(d: &Derivation, system: System, new_conclusion: &str) -> Mutant {
    Mutant {
        description: "root conclusion replaced",
        system,
        derivation: with_conclusion(d, p(new_conclusion)),
        expected_class: "schema-mismatch",
    }
}

/// Every shipped fixture, with its mutants.
pub fn all_fixtures() -> Vec<Fixture> {
    let inc_sys = System::MLIncSys;
    let might_sys = System::MLMightSys;
    let smight_sys = System::MLSMightSys;
    let mut out = Vec::new();

    // ---- inclusion identity axiom -------------------------------------
    let sub_id = infer(RuleName::SubId, p("p, q <= p, q"), vec![], vec![]);
    out.push(Fixture {
        name: "subid",
        system: inc_sys,
        derivation: sub_id.clone(),
        expected_conclusion: p("p, q <= p, q"),
        expected_open: opens([]),
        mutants: vec![
            simple_mutant(&sub_id, inc_sys, "p, q <= q, p"),
            Mutant {
                description: "inclusion rule in a might system",
                system: might_sys,
                derivation: infer(RuleName::SubId, p("p <= p"), vec![], vec![]),
                expected_class: "rule-not-in-system",
            },
        ],
    });

    // ---- column expansion on an open assumption -----------------------
    let sub_exp = infer(
        RuleName::SubExp,
        p("top, top <= a, top"),
        vec![
            assume("h1", p("a")),
            infer(RuleName::SubId, p("top <= top"), vec![], vec![]),
        ],
        vec![],
    );
    out.push(Fixture {
        name: "subexp_open",
        system: inc_sys,
        derivation: sub_exp.clone(),
        expected_conclusion: p("top, top <= a, top"),
        expected_open: opens(["a"]),
        mutants: vec![simple_mutant(&sub_exp, inc_sys, "top, top <= a, a")],
    });

    // ---- constant exchange: top <= !p |- bot <= p ----------------------
    let lemma15iii = {
        let mut lb = Labels::new();
        let target = p("bot <= p");
        let s0 = infer(RuleName::SubId, p("p <= p"), vec![], vec![]);
        let s1 = sub_rdt(s0, &[prop("p")], &[prop("p")], &[false]);
        let s2 = or_commute(&mut lb, s1);
        let l1 = lb.next();
        let minor1 = assume(&l1, target.clone());
        let l2 = lb.next();
        let minor2 = infer(
            RuleName::SubNegE,
            target.clone(),
            vec![assume(&l2, p("!!p")), assume("open", p("top <= !p"))],
            vec![],
        );
        infer(
            RuleName::OrSubE,
            target,
            vec![s2, minor1, minor2],
            vec![l1, l2],
        )
    };
    out.push(Fixture {
        name: "top_atom_exchange",
        system: inc_sys,
        derivation: lemma15iii.clone(),
        expected_conclusion: p("bot <= p"),
        expected_open: opens(["top <= !p"]),
        mutants: vec![simple_mutant(&lemma15iii, inc_sys, "top <= p")],
    });

    // ---- top-atom introduction: p |- top <= p ---------------------------
    let lemma15i = {
        let mut lb = Labels::new();
        let mut premise = |lb: &mut Labels| -> Derivation {
            let l = lb.next();
            infer(
                RuleName::SubExp,
                p("top, top <= p, top"),
                vec![
                    assume(&l, p("p")),
                    infer(RuleName::SubId, p("top <= top"), vec![], vec![]),
                ],
                vec![],
            )
        };
        contraction(&mut lb, &mut premise, &top(), &top(), &prop("p"), &top())
    };
    out.push(Fixture {
        name: "top_atom_intro",
        system: inc_sys,
        derivation: lemma15i.clone(),
        expected_conclusion: p("top <= p"),
        expected_open: opens(["p"]),
        mutants: vec![simple_mutant(&lemma15i, inc_sys, "bot <= p")],
    });

    // ---- contraction: p, q <= r, s |- p <= r ----------------------------
    let prop6iv = {
        let mut lb = Labels::new();
        let mut premise = |lb: &mut Labels| -> Derivation {
            let l = lb.next();
            assume(&l, p("p, q <= r, s"))
        };
        contraction(
            &mut lb,
            &mut premise,
            &prop("p"),
            &prop("q"),
            &prop("r"),
            &prop("s"),
        )
    };
    out.push(Fixture {
        name: "contraction",
        system: inc_sys,
        derivation: prop6iv.clone(),
        expected_conclusion: p("p <= r"),
        expected_open: opens(["p, q <= r, s"]),
        mutants: vec![simple_mutant(&prop6iv, inc_sys, "p <= s")],
    });

    // ---- transitivity: p <= q, q <= r |- p <= r -------------------------
    let prop6i = {
        let mut lb = Labels::new();
        let mut prem_ab = |lb: &mut Labels| assume(&lb.next(), p("p <= q"));
        let mut prem_bc = |lb: &mut Labels| assume(&lb.next(), p("q <= r"));
        transitivity(
            &mut lb,
            &mut prem_ab,
            &mut prem_bc,
            &prop("p"),
            &prop("q"),
            &prop("r"),
        )
    };
    out.push(Fixture {
        name: "transitivity",
        system: inc_sys,
        derivation: prop6i.clone(),
        expected_conclusion: p("p <= r"),
        expected_open: opens(["p <= q", "q <= r"]),
        mutants: vec![simple_mutant(&prop6i, inc_sys, "r <= p")],
    });

    // ---- might distribution over disjunction, both systems --------------
    for (system, opname) in [(might_sys, "might"), (smight_sys, "smight")] {
        let fwd = bullet_or_to_bullet(system, prop("p"), prop("q"));
        let fwd_concl = p(&format!("{opname} (p | q)"));
        let mutant_fwd = simple_mutant(&fwd, system, &format!("{opname} (p & q)"));
        out.push(Fixture {
            name: if system == might_sys {
                "might_or_intro"
            } else {
                "smight_or_intro"
            },
            system,
            derivation: fwd,
            expected_conclusion: fwd_concl,
            expected_open: opens([match system {
                System::MLMightSys => "might p | might q",
                _ => "smight p | smight q",
            }]),
            mutants: vec![mutant_fwd],
        });

        let bwd = infer(
            RuleName::BulletOrDistr,
            p(&format!("{opname} p | {opname} q")),
            vec![assume("h1", p(&format!("{opname} (p | q)")))],
            vec![],
        );
        let mutant_bwd = simple_mutant(&bwd, system, &format!("{opname} q | {opname} p"));
        out.push(Fixture {
            name: if system == might_sys {
                "might_or_distr"
            } else {
                "smight_or_distr"
            },
            system,
            derivation: bwd,
            expected_conclusion: p(&format!("{opname} p | {opname} q")),
            expected_open: opens([match system {
                System::MLMightSys => "might (p | q)",
                _ => "smight (p | q)",
            }]),
            mutants: vec![mutant_bwd],
        });
    }

    out.extend(classical_rule_fixtures());
    out.extend(inclusion_rule_fixtures());
    out.extend(might_rule_fixtures());
    out
}

fn classical_rule_fixtures() -> Vec<Fixture> {
    let sys = System::MLIncSys;
    let mut out = Vec::new();

    let neg_i = {
        let body = neg_elim(assume("h1", p("p")), assume("h2", p("!p")), bot());
        neg_intro("h1", body, p("p"))
    };
    out.push(Fixture {
        name: "rule_neg_i",
        system: sys,
        derivation: neg_i.clone(),
        expected_conclusion: p("!p"),
        expected_open: opens(["!p"]),
        mutants: vec![simple_mutant(&neg_i, sys, "!q")],
    });

    let raa_fix = {
        let body = neg_elim(assume("h1", p("p")), assume("h2", p("!p")), bot());
        raa("h2", body, p("p"))
    };
    out.push(Fixture {
        name: "rule_raa",
        system: sys,
        derivation: raa_fix.clone(),
        expected_conclusion: p("p"),
        expected_open: opens(["p"]),
        mutants: vec![
            simple_mutant(&raa_fix, sys, "q"),
            Mutant {
                description: "RAA discharging a label that is not open",
                system: sys,
                derivation: infer(
                    RuleName::Raa,
                    p("p"),
                    vec![neg_elim(assume("h1", p("p")), assume("h2", p("!p")), bot())],
                    vec!["zz".to_string()],
                ),
                expected_class: "discharge",
            },
        ],
    });

    // The conclusion of an explosion step is unconstrained; a mutant
    // must therefore break a premise instead.
    let neg_e = neg_elim(assume("h1", p("p")), assume("h2", p("!p")), p("top <= q"));
    out.push(Fixture {
        name: "rule_neg_e",
        system: sys,
        derivation: neg_e.clone(),
        expected_conclusion: p("top <= q"),
        expected_open: opens(["p", "!p"]),
        mutants: vec![Mutant {
            description: "second premise does not negate the first",
            system: sys,
            derivation: neg_elim(assume("h1", p("p")), assume("h2", p("!q")), p("top <= q")),
            expected_class: "schema-mismatch",
        }],
    });

    let or_i = or_inject(assume("h1", p("p")), p("p | q"));
    out.push(Fixture {
        name: "rule_or_i",
        system: sys,
        derivation: or_i.clone(),
        expected_conclusion: p("p | q"),
        expected_open: opens(["p"]),
        mutants: vec![simple_mutant(&or_i, sys, "q | r")],
    });

    let or_e = {
        let major = assume("h0", p("p | q"));
        let minor1 = or_inject(assume("h1", p("p")), p("p | q"));
        let minor2 = or_inject(assume("h2", p("q")), p("p | q"));
        infer(
            RuleName::OrE,
            p("p | q"),
            vec![major, minor1, minor2],
            vec!["h1".to_string(), "h2".to_string()],
        )
    };
    // The spec's first side-condition example: a minor subderivation
    // keeps a non-classical assumption open.
    let or_e_side = {
        let major = assume("h0", p("p | p"));
        let minor1 = and_elim_left(and_intro(assume("h1", p("p")), assume("h3", p("top <= p"))));
        let minor2 = and_elim_left(and_intro(assume("h2", p("p")), assume("h4", p("top <= p"))));
        infer(
            RuleName::OrE,
            p("p"),
            vec![major, minor1, minor2],
            vec!["h1".to_string(), "h2".to_string()],
        )
    };
    out.push(Fixture {
        name: "rule_or_e",
        system: sys,
        derivation: or_e.clone(),
        expected_conclusion: p("p | q"),
        expected_open: opens(["p | q"]),
        mutants: vec![
            simple_mutant(&or_e, sys, "q | p"),
            Mutant {
                description: "minor subderivations keep a top atom open",
                system: sys,
                derivation: or_e_side,
                expected_class: "side-condition",
            },
        ],
    });

    let and_i = and_intro(assume("h1", p("p")), assume("h2", p("q")));
    out.push(Fixture {
        name: "rule_and_i",
        system: sys,
        derivation: and_i.clone(),
        expected_conclusion: p("p & q"),
        expected_open: opens(["p", "q"]),
        mutants: vec![simple_mutant(&and_i, sys, "q & p")],
    });

    let and_e = and_elim_left(assume("h1", p("p & q")));
    out.push(Fixture {
        name: "rule_and_e",
        system: sys,
        derivation: and_e.clone(),
        expected_conclusion: p("p"),
        expected_open: opens(["p & q"]),
        mutants: vec![simple_mutant(&and_e, sys, "r")],
    });

    let dbi = infer(
        RuleName::DiaBoxInter,
        p("<>!p"),
        vec![assume("h1", p("![]p"))],
        vec![],
    );
    out.push(Fixture {
        name: "rule_dia_box_inter",
        system: sys,
        derivation: dbi.clone(),
        expected_conclusion: p("<>!p"),
        expected_open: opens(["![]p"]),
        mutants: vec![simple_mutant(&dbi, sys, "<>p")],
    });

    let bdi = infer(
        RuleName::BoxDiaInter,
        p("![]p"),
        vec![assume("h1", p("<>!p"))],
        vec![],
    );
    out.push(Fixture {
        name: "rule_box_dia_inter",
        system: sys,
        derivation: bdi.clone(),
        expected_conclusion: p("![]p"),
        expected_open: opens(["<>!p"]),
        mutants: vec![simple_mutant(&bdi, sys, "!<>p")],
    });

    let dod = infer(
        RuleName::DiaOrDistr,
        p("<>p | <>q"),
        vec![assume("h1", p("<>(p | q)"))],
        vec![],
    );
    out.push(Fixture {
        name: "rule_dia_or_distr",
        system: sys,
        derivation: dod.clone(),
        expected_conclusion: p("<>p | <>q"),
        expected_open: opens(["<>(p | q)"]),
        mutants: vec![simple_mutant(&dod, sys, "<>q | <>p")],
    });

    // Monotone box with one discharged case, plus the zero-premise
    // necessitation form.
    let box_mon = infer(
        RuleName::BoxMon,
        p("[](p | q)"),
        vec![
            or_inject(assume("h1", p("p")), p("p | q")),
            assume("h2", p("[]p")),
        ],
        vec!["h1".to_string()],
    );
    // The spec's second side-condition example: the subderivation keeps
    // an extra assumption open.
    let box_mon_side = infer(
        RuleName::BoxMon,
        p("[](p & q)"),
        vec![
            and_intro(assume("h1", p("p")), assume("h2", p("q"))),
            assume("h3", p("[]p")),
        ],
        vec!["h1".to_string()],
    );
    out.push(Fixture {
        name: "rule_box_mon",
        system: sys,
        derivation: box_mon.clone(),
        expected_conclusion: p("[](p | q)"),
        expected_open: opens(["[]p"]),
        mutants: vec![
            simple_mutant(&box_mon, sys, "[]q"),
            Mutant {
                description: "subderivation keeps an extra assumption open",
                system: sys,
                derivation: box_mon_side,
                expected_class: "side-condition",
            },
        ],
    });

    let necessitation = {
        let mut lb = Labels::new();
        infer(
            RuleName::BoxMon,
            p("[](p | !p)"),
            vec![excluded_middle(&mut lb, prop("p"))],
            vec![],
        )
    };
    out.push(Fixture {
        name: "rule_box_mon_necessitation",
        system: sys,
        derivation: necessitation.clone(),
        expected_conclusion: p("[](p | !p)"),
        expected_open: opens([]),
        mutants: vec![simple_mutant(&necessitation, sys, "[](p | !q)")],
    });

    let dia_mon = infer(
        RuleName::DiaMon,
        p("<>(p | q)"),
        vec![
            or_inject(assume("h1", p("p")), p("p | q")),
            assume("h2", p("<>p")),
        ],
        vec!["h1".to_string()],
    );
    out.push(Fixture {
        name: "rule_dia_mon",
        system: sys,
        derivation: dia_mon.clone(),
        expected_conclusion: p("<>(p | q)"),
        expected_open: opens(["<>p"]),
        mutants: vec![simple_mutant(&dia_mon, sys, "<>q")],
    });

    out
}

fn inclusion_rule_fixtures() -> Vec<Fixture> {
    let sys = System::MLIncSys;
    let mut out = Vec::new();

    let sub_neg_e = infer(
        RuleName::SubNegE,
        p("bot"),
        vec![assume("h1", p("!p")), assume("h2", p("top <= p"))],
        vec![],
    );
    out.push(Fixture {
        name: "rule_sub_neg_e",
        system: sys,
        derivation: sub_neg_e.clone(),
        expected_conclusion: p("bot"),
        expected_open: opens(["!p", "top <= p"]),
        mutants: vec![Mutant {
            description: "negated formula does not match the atom",
            system: sys,
            derivation: infer(
                RuleName::SubNegE,
                p("bot"),
                vec![assume("h1", p("!q")), assume("h2", p("top <= p"))],
                vec![],
            ),
            expected_class: "schema-mismatch",
        }],
    });

    let or_sub_e = {
        let target = p("(top <= p) | q");
        infer(
            RuleName::OrSubE,
            target.clone(),
            vec![
                assume("h0", p("top <= p | q")),
                or_inject(assume("h1", p("top <= p")), target.clone()),
                or_inject(assume("h2", p("q")), target),
            ],
            vec!["h1".to_string(), "h2".to_string()],
        )
    };
    // Upward-closure elimination is restricted to primitive atoms.
    let or_sub_e_nonprimitive = {
        let target = p("(p <= q) | r");
        infer(
            RuleName::OrSubE,
            target.clone(),
            vec![
                assume("h0", p("p <= q | r")),
                or_inject(assume("h1", p("p <= q")), target.clone()),
                or_inject(assume("h2", p("r")), target),
            ],
            vec!["h1".to_string(), "h2".to_string()],
        )
    };
    out.push(Fixture {
        name: "rule_or_sub_e",
        system: sys,
        derivation: or_sub_e.clone(),
        expected_conclusion: p("(top <= p) | q"),
        expected_open: opens(["top <= p | q"]),
        mutants: vec![
            simple_mutant(&or_sub_e, sys, "q | top <= p"),
            Mutant {
                description: "major disjunct is not a primitive atom",
                system: sys,
                derivation: or_sub_e_nonprimitive,
                expected_class: "schema-mismatch",
            },
        ],
    });

    let sub_ext = infer(
        RuleName::SubExt,
        p("p <= q"),
        vec![assume("h1", p("(!p | top <= q) & (!!p | bot <= q)"))],
        vec![],
    );
    out.push(Fixture {
        name: "rule_sub_ext",
        system: sys,
        derivation: sub_ext.clone(),
        expected_conclusion: p("p <= q"),
        expected_open: opens(["(!p | top <= q) & (!!p | bot <= q)"]),
        mutants: vec![Mutant {
            description: "case conjunction in the wrong order",
            system: sys,
            derivation: infer(
                RuleName::SubExt,
                p("p <= q"),
                vec![assume("h1", p("(!!p | bot <= q) & (!p | top <= q)"))],
                vec![],
            ),
            expected_class: "schema-mismatch",
        }],
    });

    let sub_rdt_top = infer(
        RuleName::SubRdt,
        p("!p | top <= q"),
        vec![assume("h1", p("p <= q"))],
        vec![],
    );
    let sub_rdt_bot = infer(
        RuleName::SubRdt,
        p("!!p | bot <= q"),
        vec![assume("h1", p("p <= q"))],
        vec![],
    );
    out.push(Fixture {
        name: "rule_sub_rdt",
        system: sys,
        derivation: sub_rdt_top.clone(),
        expected_conclusion: p("!p | top <= q"),
        expected_open: opens(["p <= q"]),
        mutants: vec![simple_mutant(&sub_rdt_top, sys, "!q | top <= q")],
    });
    out.push(Fixture {
        name: "rule_sub_rdt_negative_tuple",
        system: sys,
        derivation: sub_rdt_bot.clone(),
        expected_conclusion: p("!!p | bot <= q"),
        expected_open: opens(["p <= q"]),
        mutants: vec![simple_mutant(&sub_rdt_bot, sys, "!!p | top <= q")],
    });

    let sub_distr = infer(
        RuleName::SubDistr,
        p("((p | r) & top <= r) | q"),
        vec![assume("h0", p("p | q")), assume("h1", p("top <= r"))],
        vec![],
    );
    out.push(Fixture {
        name: "rule_sub_distr",
        system: sys,
        derivation: sub_distr.clone(),
        expected_conclusion: p("((p | r) & top <= r) | q"),
        expected_open: opens(["p | q", "top <= r"]),
        mutants: vec![simple_mutant(&sub_distr, sys, "(p & top <= r) | q")],
    });

    let dia_sub_distr = infer(
        RuleName::DiaSubDistr,
        p("top <= <>p"),
        vec![assume("h1", p("<>(top <= p)"))],
        vec![],
    );
    out.push(Fixture {
        name: "rule_dia_sub_distr",
        system: sys,
        derivation: dia_sub_distr.clone(),
        expected_conclusion: p("top <= <>p"),
        expected_open: opens(["<>(top <= p)"]),
        mutants: vec![simple_mutant(&dia_sub_distr, sys, "top <= <>!p")],
    });

    let dia_box_sub_exc = infer(
        RuleName::DiaBoxSubExc,
        p("[](top <= p)"),
        vec![assume("h1", p("top <= <>p"))],
        vec![],
    );
    out.push(Fixture {
        name: "rule_dia_box_sub_exc",
        system: sys,
        derivation: dia_box_sub_exc.clone(),
        expected_conclusion: p("[](top <= p)"),
        expected_open: opens(["top <= <>p"]),
        mutants: vec![simple_mutant(&dia_box_sub_exc, sys, "[](bot <= p)")],
    });

    let box_dia_sub_exc = infer(
        RuleName::BoxDiaSubExc,
        p("top <= <>p"),
        vec![
            assume("h1", p("top <= <>q")),
            assume("h2", p("[](top <= p)")),
        ],
        vec![],
    );
    out.push(Fixture {
        name: "rule_box_dia_sub_exc",
        system: sys,
        derivation: box_dia_sub_exc.clone(),
        expected_conclusion: p("top <= <>p"),
        expected_open: opens(["top <= <>q", "[](top <= p)"]),
        mutants: vec![simple_mutant(&box_dia_sub_exc, sys, "top <= <>q")],
    });

    let box_or_sub_e = {
        let target = p("(top <= <>p) | []q");
        infer(
            RuleName::BoxOrSubE,
            target.clone(),
            vec![
                assume("h0", p("[](top <= p | q)")),
                or_inject(assume("h1", p("top <= <>p")), target.clone()),
                or_inject(assume("h2", p("[]q")), target),
            ],
            vec!["h1".to_string(), "h2".to_string()],
        )
    };
    out.push(Fixture {
        name: "rule_box_or_sub_e",
        system: sys,
        derivation: box_or_sub_e.clone(),
        expected_conclusion: p("(top <= <>p) | []q"),
        expected_open: opens(["[](top <= p | q)"]),
        mutants: vec![simple_mutant(&box_or_sub_e, sys, "[]q | top <= <>p")],
    });

    let sub_dia_distr = infer(
        RuleName::SubDiaDistr,
        p("<>((p | q) & top <= q)"),
        vec![assume("h0", p("<>p")), assume("h1", p("top <= <>q"))],
        vec![],
    );
    out.push(Fixture {
        name: "rule_sub_dia_distr",
        system: sys,
        derivation: sub_dia_distr.clone(),
        expected_conclusion: p("<>((p | q) & top <= q)"),
        expected_open: opens(["<>p", "top <= <>q"]),
        mutants: vec![simple_mutant(&sub_dia_distr, sys, "<>((p | q) & bot <= q)")],
    });

    out
}

fn might_rule_fixtures() -> Vec<Fixture> {
    let sys = System::MLMightSys;
    let ssys = System::MLSMightSys;
    let mut out = Vec::new();

    let might_join = infer(
        RuleName::MightJoin,
        p("might ((p | q) & might p & might q)"),
        vec![assume("h1", p("might p")), assume("h2", p("might q"))],
        vec![],
    );
    out.push(Fixture {
        name: "rule_might_join",
        system: sys,
        derivation: might_join.clone(),
        expected_conclusion: p("might ((p | q) & might p & might q)"),
        expected_open: opens(["might p", "might q"]),
        mutants: vec![
            simple_mutant(&might_join, sys, "might ((p & q) & might p & might q)"),
            Mutant {
                description: "might join in the singular-might system",
                system: ssys,
                derivation: infer(
                    RuleName::MightJoin,
                    p("smight ((p | q) & smight p & smight q)"),
                    vec![assume("h1", p("smight p")), assume("h2", p("smight q"))],
                    vec![],
                ),
                expected_class: "rule-not-in-system",
            },
        ],
    });

    let might_e = infer(
        RuleName::MightE,
        p("might p"),
        vec![assume("h1", p("might might p"))],
        vec![],
    );
    out.push(Fixture {
        name: "rule_might_e",
        system: sys,
        derivation: might_e.clone(),
        expected_conclusion: p("might p"),
        expected_open: opens(["might might p"]),
        mutants: vec![simple_mutant(&might_e, sys, "might might p")],
    });

    let smight_and_simpl = infer(
        RuleName::SMightAndSimpl,
        p("smight (p & q)"),
        vec![assume("h1", p("smight (smight p & q)"))],
        vec![],
    );
    out.push(Fixture {
        name: "rule_smight_and_simpl",
        system: ssys,
        derivation: smight_and_simpl.clone(),
        expected_conclusion: p("smight (p & q)"),
        expected_open: opens(["smight (smight p & q)"]),
        mutants: vec![
            simple_mutant(&smight_and_simpl, ssys, "smight (q & p)"),
            Mutant {
                description: "singular-might simplification in the might system",
                system: sys,
                derivation: infer(
                    RuleName::SMightAndSimpl,
                    p("might (p & q)"),
                    vec![assume("h1", p("might (might p & q)"))],
                    vec![],
                ),
                expected_class: "rule-not-in-system",
            },
        ],
    });

    let bullet_mon = infer(
        RuleName::BulletMon,
        p("might (p | q)"),
        vec![
            assume("h1", p("might p")),
            or_inject(assume("h2", p("p")), p("p | q")),
        ],
        vec!["h2".to_string()],
    );
    let bullet_mon_side = infer(
        RuleName::BulletMon,
        p("might (p & might q)"),
        vec![
            assume("h1", p("might p")),
            and_intro(assume("h2", p("p")), assume("h3", p("might q"))),
        ],
        vec!["h2".to_string()],
    );
    out.push(Fixture {
        name: "rule_bullet_mon",
        system: sys,
        derivation: bullet_mon.clone(),
        expected_conclusion: p("might (p | q)"),
        expected_open: opens(["might p"]),
        mutants: vec![
            simple_mutant(&bullet_mon, sys, "might (q | p)"),
            Mutant {
                description: "subderivation keeps a non-classical assumption open",
                system: sys,
                derivation: bullet_mon_side,
                expected_class: "side-condition",
            },
        ],
    });

    let bullet_i = infer(
        RuleName::BulletI,
        p("smight (p & !q)"),
        vec![assume("h1", p("p & !q"))],
        vec![],
    );
    out.push(Fixture {
        name: "rule_bullet_i",
        system: ssys,
        derivation: bullet_i.clone(),
        expected_conclusion: p("smight (p & !q)"),
        expected_open: opens(["p & !q"]),
        mutants: vec![Mutant {
            description: "operator introduction over a non-classical body",
            system: ssys,
            derivation: infer(
                RuleName::BulletI,
                p("smight smight p"),
                vec![assume("h1", p("smight p"))],
                vec![],
            ),
            expected_class: "schema-mismatch",
        }],
    });

    let bullet_neg_e = infer(
        RuleName::BulletNegE,
        p("bot"),
        vec![assume("h1", p("!p")), assume("h2", p("might p"))],
        vec![],
    );
    out.push(Fixture {
        name: "rule_bullet_neg_e",
        system: sys,
        derivation: bullet_neg_e.clone(),
        expected_conclusion: p("bot"),
        expected_open: opens(["!p", "might p"]),
        mutants: vec![Mutant {
            description: "operator body does not match the negated premise",
            system: sys,
            derivation: infer(
                RuleName::BulletNegE,
                p("bot"),
                vec![assume("h1", p("!p")), assume("h2", p("might q"))],
                vec![],
            ),
            expected_class: "schema-mismatch",
        }],
    });

    let bullet_distr = infer(
        RuleName::BulletDistr,
        p("((p | r) & might r) | q"),
        vec![assume("h0", p("p | q")), assume("h1", p("might r"))],
        vec![],
    );
    out.push(Fixture {
        name: "rule_bullet_distr",
        system: sys,
        derivation: bullet_distr.clone(),
        expected_conclusion: p("((p | r) & might r) | q"),
        expected_open: opens(["p | q", "might r"]),
        mutants: vec![simple_mutant(&bullet_distr, sys, "(p & might r) | q")],
    });

    let box_dia_bullet_exc = infer(
        RuleName::BoxDiaBulletExc,
        p("might <>p"),
        vec![
            assume("h1", p("might <>q")),
            assume("h2", p("[](might p)")),
        ],
        vec![],
    );
    out.push(Fixture {
        name: "rule_box_dia_bullet_exc",
        system: sys,
        derivation: box_dia_bullet_exc.clone(),
        expected_conclusion: p("might <>p"),
        expected_open: opens(["might <>q", "[](might p)"]),
        mutants: vec![simple_mutant(&box_dia_bullet_exc, sys, "might <>q")],
    });

    let dia_box_bullet_exc = infer(
        RuleName::DiaBoxBulletExc,
        p("[](might p)"),
        vec![assume("h1", p("might <>p"))],
        vec![],
    );
    out.push(Fixture {
        name: "rule_dia_box_bullet_exc",
        system: sys,
        derivation: dia_box_bullet_exc.clone(),
        expected_conclusion: p("[](might p)"),
        expected_open: opens(["might <>p"]),
        mutants: vec![simple_mutant(&dia_box_bullet_exc, sys, "[](might q)")],
    });

    let box_or_bullet_e = {
        let target = p("(might <>p) | []q");
        infer(
            RuleName::BoxOrBulletE,
            target.clone(),
            vec![
                assume("h0", p("[](might p | q)")),
                or_inject(assume("h1", p("might <>p")), target.clone()),
                or_inject(assume("h2", p("[]q")), target),
            ],
            vec!["h1".to_string(), "h2".to_string()],
        )
    };
    out.push(Fixture {
        name: "rule_box_or_bullet_e",
        system: sys,
        derivation: box_or_bullet_e.clone(),
        expected_conclusion: p("(might <>p) | []q"),
        expected_open: opens(["[](might p | q)"]),
        mutants: vec![simple_mutant(&box_or_bullet_e, sys, "[]q | might <>p")],
    });

    let dia_bullet_distr = infer(
        RuleName::DiaBulletDistr,
        p("might <>p"),
        vec![assume("h1", p("<>(might p)"))],
        vec![],
    );
    out.push(Fixture {
        name: "rule_dia_bullet_distr",
        system: sys,
        derivation: dia_bullet_distr.clone(),
        expected_conclusion: p("might <>p"),
        expected_open: opens(["<>(might p)"]),
        mutants: vec![simple_mutant(&dia_bullet_distr, sys, "<>(might p)")],
    });

    let bullet_dia_distr = infer(
        RuleName::BulletDiaDistr,
        p("<>((p | q) & might q)"),
        vec![assume("h0", p("<>p")), assume("h1", p("might <>q"))],
        vec![],
    );
    out.push(Fixture {
        name: "rule_bullet_dia_distr",
        system: sys,
        derivation: bullet_dia_distr.clone(),
        expected_conclusion: p("<>((p | q) & might q)"),
        expected_open: opens(["<>p", "might <>q"]),
        mutants: vec![simple_mutant(&bullet_dia_distr, sys, "<>((q | p) & might q)")],
    });

    // Same-label leaves must agree on the assumed formula.
    let label_clash = and_intro(assume("h1", p("p")), assume("h1", p("q")));
    out.push(Fixture {
        name: "rule_or_bullet_e_variants",
        system: sys,
        derivation: infer(
            RuleName::OrBulletE,
            p("might p | q"),
            vec![
                assume("h0", p("might p | q")),
                or_inject(assume("h1", p("might p")), p("might p | q")),
                or_inject(assume("h2", p("q")), p("might p | q")),
            ],
            vec!["h1".to_string(), "h2".to_string()],
        ),
        expected_conclusion: p("might p | q"),
        expected_open: opens(["might p | q"]),
        mutants: vec![Mutant {
            description: "one label bound to two distinct formulas",
            system: System::MLIncSys,
            derivation: label_clash,
            expected_class: "discharge",
        }],
    });

    let smight_mirror = {
        let b = |f: Formula| smight(f);
        infer(
            RuleName::DiaBulletDistr,
            b(dia(prop("p"))),
            vec![assume("h1", dia(b(prop("p"))))],
            vec![],
        )
    };
    out.push(Fixture {
        name: "rule_dia_bullet_distr_smight",
        system: ssys,
        derivation: smight_mirror.clone(),
        expected_conclusion: p("smight <>p"),
        expected_open: opens(["<>(smight p)"]),
        mutants: vec![simple_mutant(&smight_mirror, ssys, "might <>p")],
    });

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::{check_derivation, derivation_from_json, derivation_to_json, ALL_RULES};

    #[test]
    fn fixtures_are_accepted_with_expected_results() {
        for fixture in all_fixtures() {
            let (conclusion, open) = check_derivation(&fixture.derivation, fixture.system)
                .unwrap_or_else(|e| panic!("fixture {} rejected: {e}", fixture.name));
            assert_eq!(
                conclusion, fixture.expected_conclusion,
                "conclusion of {}",
                fixture.name
            );
            assert_eq!(open, fixture.expected_open, "open set of {}", fixture.name);
        }
    }

    #[test]
    fn mutants_are_rejected_with_the_right_class() {
        for fixture in all_fixtures() {
            for mutant in &fixture.mutants {
                let err = check_derivation(&mutant.derivation, mutant.system)
                    .map(|_| ())
                    .unwrap_err();
                assert_eq!(
                    err.class(),
                    mutant.expected_class,
                    "mutant `{}` of {}: got {err}",
                    mutant.description,
                    fixture.name
                );
            }
        }
    }

    #[test]
    fn every_rule_has_an_accepted_fixture_and_a_rejected_near_miss() {
        let fixtures = all_fixtures();
        for rule in ALL_RULES {
            let accepted = fixtures
                .iter()
                .any(|f| f.derivation.rules_used().contains(&rule));
            assert!(accepted, "no accepted fixture uses {}", rule.name());
            let rejected = fixtures.iter().any(|f| {
                f.mutants.iter().any(|m| match &m.derivation {
                    Derivation::Infer { .. } => m.derivation.rules_used().contains(&rule),
                    Derivation::Assume { .. } => false,
                })
            });
            assert!(rejected, "no rejected near-miss uses {}", rule.name());
        }
    }

    #[test]
    fn fixtures_round_trip_through_the_file_format() {
        for fixture in all_fixtures() {
            let text = derivation_to_json(fixture.system, &fixture.derivation);
            let (system, again) = derivation_from_json(&text)
                .unwrap_or_else(|e| panic!("fixture {}: {e}", fixture.name));
            assert_eq!(system, Some(fixture.system));
            assert_eq!(again, fixture.derivation, "round trip of {}", fixture.name);
        }
    }
}
