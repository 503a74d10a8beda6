//! Deterministic random formula generation for test corpora.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{
    and, bot, boxm, dia, inc, might, neg, or, prop, smight, top, Formula, Logic, PropSet,
};

/// Options for [`generate`]. `max_size` bounds the connective count.
#[derive(Debug, Clone)]
pub struct GenOptions {
    pub logic: Logic,
    pub max_md: u32,
    pub max_size: u32,
}

/// Generates `count` well-formed formulas of the requested logic with
/// modal depth at most `max_md`, deterministically from `seed`.
pub fn generate(seed: u64, count: usize, props: &PropSet, opts: &GenOptions) -> Vec<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| gen_formula(&mut rng, props, opts.logic, opts.max_md, opts.max_size, false))
        .collect()
}

fn gen_leaf(rng: &mut ChaCha8Rng, props: &PropSet) -> Formula {
    if props.is_empty() || rng.gen_range(0..8) == 0 {
        if rng.gen_bool(0.5) {
            bot()
        } else {
            top()
        }
    } else {
        prop(&props.names()[rng.gen_range(0..props.len())])
    }
}

fn gen_formula(
    rng: &mut ChaCha8Rng,
    props: &PropSet,
    logic: Logic,
    md: u32,
    size: u32,
    classical_only: bool,
) -> Formula {
    if size <= 1 {
        return gen_leaf(rng, props);
    }
    // Connective menu: 0..4 classical propositional, 4..6 modal, 6 the
    // logic's own non-classical construct (double weight).
    let mut menu: Vec<u8> = vec![0, 1, 2, 3];
    if md > 0 {
        menu.extend([4, 5]);
    }
    if !classical_only && logic != Logic::MLClassical {
        menu.extend([6, 6]);
    }
    let roll = menu[rng.gen_range(0..menu.len())];
    let half = |rng: &mut ChaCha8Rng, s: u32| rng.gen_range(1..s.max(2));
    match roll {
        0 => gen_leaf(rng, props),
        1 => neg(gen_formula(rng, props, logic, md, size - 1, true)),
        2 => {
            let l = half(rng, size);
            or(
                gen_formula(rng, props, logic, md, l, classical_only),
                gen_formula(rng, props, logic, md, size - l, classical_only),
            )
        }
        3 => {
            let l = half(rng, size);
            and(
                gen_formula(rng, props, logic, md, l, classical_only),
                gen_formula(rng, props, logic, md, size - l, classical_only),
            )
        }
        4 => dia(gen_formula(rng, props, logic, md - 1, size - 1, classical_only)),
        5 => boxm(gen_formula(rng, props, logic, md - 1, size - 1, classical_only)),
        _ => match logic {
            Logic::MLInc => {
                let arity = rng.gen_range(1..=2usize);
                let per_side = (size / (2 * arity as u32)).max(1);
                let side = |rng: &mut ChaCha8Rng| {
                    (0..arity)
                        .map(|_| gen_formula(rng, props, logic, md, per_side, true))
                        .collect::<Vec<_>>()
                };
                inc(side(rng), side(rng))
            }
            Logic::MLMight => might(gen_formula(rng, props, logic, md, size - 1, false)),
            Logic::MLSMight => smight(gen_formula(rng, props, logic, md, size - 1, false)),
            Logic::MLClassical => unreachable!("classical roll range has no case 6"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_formulas_are_well_formed_and_bounded() {
        let props = PropSet::new(["p", "q"]);
        for logic in [Logic::MLInc, Logic::MLMight, Logic::MLSMight, Logic::MLClassical] {
            let opts = GenOptions {
                logic,
                max_md: 2,
                max_size: 12,
            };
            for f in generate(7, 200, &props, &opts) {
                f.check_logic(logic).unwrap_or_else(|e| panic!("{f}: {e}"));
                assert!(f.modal_depth() <= 2, "{f}");
                assert!(f.props().is_subset_of(&props));
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let props = PropSet::new(["p"]);
        let opts = GenOptions {
            logic: Logic::MLInc,
            max_md: 1,
            max_size: 9,
        };
        assert_eq!(
            generate(42, 50, &props, &opts),
            generate(42, 50, &props, &opts)
        );
        assert_ne!(
            generate(42, 50, &props, &opts),
            generate(43, 50, &props, &opts)
        );
    }
}
