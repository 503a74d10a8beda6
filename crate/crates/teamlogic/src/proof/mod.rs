//! Natural-deduction proof checking for the three systems.
//!
//! The kernel does explicit-instantiation checking, not unification:
//! every node carries its full conclusion and the checker verifies the
//! schema match, the discharge bookkeeping, and the side conditions. A
//! label names one assumption class; it may occur at several leaves, all
//! carrying the same formula, and discharging a label closes every
//! occurrence inside the designated subderivation.

mod check;
pub mod fixtures;
mod format;

pub use check::check_derivation;
pub use format::{derivation_from_json, derivation_to_json};

use std::fmt;

use thiserror::Error;

use crate::syntax::{Formula, Logic};

/// Which natural-deduction system a derivation is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum System {
    MLIncSys,
    MLMightSys,
    MLSMightSys,
}

impl System {
    pub fn logic(self) -> Logic {
        match self {
            System::MLIncSys => Logic::MLInc,
            System::MLMightSys => Logic::MLMight,
            System::MLSMightSys => Logic::MLSMight,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            System::MLIncSys => "mlinc",
            System::MLMightSys => "mlmight",
            System::MLSMightSys => "mlsmight",
        }
    }

    pub fn from_name(s: &str) -> Option<System> {
        match s {
            "mlinc" => Some(System::MLIncSys),
            "mlmight" => Some(System::MLMightSys),
            "mlsmight" => Some(System::MLSMightSys),
            _ => None,
        }
    }

    /// The system's subteam operator, for the shared bullet rules.
    pub fn bullet(self, f: Formula) -> Option<Formula> {
        match self {
            System::MLIncSys => None,
            System::MLMightSys => Some(crate::syntax::might(f)),
            System::MLSMightSys => Some(crate::syntax::smight(f)),
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Every inference rule of the three systems. The `Bullet*` rules are
/// shared between the two might systems, reading the operator from the
/// system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleName {
    // Classical connectives and modalities.
    NegI,
    Raa,
    NegE,
    OrI,
    OrE,
    AndI,
    AndE,
    DiaBoxInter,
    BoxDiaInter,
    DiaOrDistr,
    BoxMon,
    DiaMon,
    // Propositional inclusion rules.
    SubId,
    SubExp,
    SubNegE,
    OrSubE,
    SubExt,
    SubRdt,
    SubDistr,
    // Modal inclusion rules.
    DiaSubDistr,
    DiaBoxSubExc,
    BoxDiaSubExc,
    BoxOrSubE,
    SubDiaDistr,
    // Might-specific rules.
    MightJoin,
    MightE,
    SMightAndSimpl,
    // Rules shared by both might systems.
    BulletMon,
    BulletOrDistr,
    BulletI,
    BulletNegE,
    OrBulletE,
    BulletDistr,
    BoxDiaBulletExc,
    DiaBoxBulletExc,
    BoxOrBulletE,
    DiaBulletDistr,
    BulletDiaDistr,
}

pub const TABLE_CLASSICAL: [RuleName; 12] = [
    RuleName::NegI,
    RuleName::Raa,
    RuleName::NegE,
    RuleName::OrI,
    RuleName::OrE,
    RuleName::AndI,
    RuleName::AndE,
    RuleName::DiaBoxInter,
    RuleName::BoxDiaInter,
    RuleName::DiaOrDistr,
    RuleName::BoxMon,
    RuleName::DiaMon,
];

pub const TABLE_INCLUSION: [RuleName; 7] = [
    RuleName::SubId,
    RuleName::SubExp,
    RuleName::SubNegE,
    RuleName::OrSubE,
    RuleName::SubExt,
    RuleName::SubRdt,
    RuleName::SubDistr,
];

pub const TABLE_MODAL_INCLUSION: [RuleName; 5] = [
    RuleName::DiaSubDistr,
    RuleName::DiaBoxSubExc,
    RuleName::BoxDiaSubExc,
    RuleName::BoxOrSubE,
    RuleName::SubDiaDistr,
];

pub const TABLE_MIGHT_SHARED: [RuleName; 11] = [
    RuleName::BulletMon,
    RuleName::BulletOrDistr,
    RuleName::BulletI,
    RuleName::BulletNegE,
    RuleName::OrBulletE,
    RuleName::BulletDistr,
    RuleName::BoxDiaBulletExc,
    RuleName::DiaBoxBulletExc,
    RuleName::BoxOrBulletE,
    RuleName::DiaBulletDistr,
    RuleName::BulletDiaDistr,
];

impl RuleName {
    pub fn name(self) -> &'static str {
        match self {
            RuleName::NegI => "NegI",
            RuleName::Raa => "RAA",
            RuleName::NegE => "NegE",
            RuleName::OrI => "OrI",
            RuleName::OrE => "OrE",
            RuleName::AndI => "AndI",
            RuleName::AndE => "AndE",
            RuleName::DiaBoxInter => "DiaBoxInter",
            RuleName::BoxDiaInter => "BoxDiaInter",
            RuleName::DiaOrDistr => "DiaOrDistr",
            RuleName::BoxMon => "BoxMon",
            RuleName::DiaMon => "DiaMon",
            RuleName::SubId => "SubId",
            RuleName::SubExp => "SubExp",
            RuleName::SubNegE => "SubNegE",
            RuleName::OrSubE => "OrSubE",
            RuleName::SubExt => "SubExt",
            RuleName::SubRdt => "SubRdt",
            RuleName::SubDistr => "SubDistr",
            RuleName::DiaSubDistr => "DiaSubDistr",
            RuleName::DiaBoxSubExc => "DiaBoxSubExc",
            RuleName::BoxDiaSubExc => "BoxDiaSubExc",
            RuleName::BoxOrSubE => "BoxOrSubE",
            RuleName::SubDiaDistr => "SubDiaDistr",
            RuleName::MightJoin => "MightJoin",
            RuleName::MightE => "MightE",
            RuleName::SMightAndSimpl => "SMightAndSimpl",
            RuleName::BulletMon => "BulletMon",
            RuleName::BulletOrDistr => "BulletOrDistr",
            RuleName::BulletI => "BulletI",
            RuleName::BulletNegE => "BulletNegE",
            RuleName::OrBulletE => "OrBulletE",
            RuleName::BulletDistr => "BulletDistr",
            RuleName::BoxDiaBulletExc => "BoxDiaBulletExc",
            RuleName::DiaBoxBulletExc => "DiaBoxBulletExc",
            RuleName::BoxOrBulletE => "BoxOrBulletE",
            RuleName::DiaBulletDistr => "DiaBulletDistr",
            RuleName::BulletDiaDistr => "BulletDiaDistr",
        }
    }

    pub fn from_name(s: &str) -> Option<RuleName> {
        ALL_RULES.iter().copied().find(|r| r.name() == s)
    }

    pub fn in_system(self, system: System) -> bool {
        match system {
            System::MLIncSys => {
                TABLE_CLASSICAL.contains(&self)
                    || TABLE_INCLUSION.contains(&self)
                    || TABLE_MODAL_INCLUSION.contains(&self)
            }
            System::MLMightSys => {
                TABLE_CLASSICAL.contains(&self)
                    || TABLE_MIGHT_SHARED.contains(&self)
                    || matches!(self, RuleName::MightJoin | RuleName::MightE)
            }
            System::MLSMightSys => {
                TABLE_CLASSICAL.contains(&self)
                    || TABLE_MIGHT_SHARED.contains(&self)
                    || self == RuleName::SMightAndSimpl
            }
        }
    }
}

pub const ALL_RULES: [RuleName; 38] = [
    RuleName::NegI,
    RuleName::Raa,
    RuleName::NegE,
    RuleName::OrI,
    RuleName::OrE,
    RuleName::AndI,
    RuleName::AndE,
    RuleName::DiaBoxInter,
    RuleName::BoxDiaInter,
    RuleName::DiaOrDistr,
    RuleName::BoxMon,
    RuleName::DiaMon,
    RuleName::SubId,
    RuleName::SubExp,
    RuleName::SubNegE,
    RuleName::OrSubE,
    RuleName::SubExt,
    RuleName::SubRdt,
    RuleName::SubDistr,
    RuleName::DiaSubDistr,
    RuleName::DiaBoxSubExc,
    RuleName::BoxDiaSubExc,
    RuleName::BoxOrSubE,
    RuleName::SubDiaDistr,
    RuleName::MightJoin,
    RuleName::MightE,
    RuleName::SMightAndSimpl,
    RuleName::BulletMon,
    RuleName::BulletOrDistr,
    RuleName::BulletI,
    RuleName::BulletNegE,
    RuleName::OrBulletE,
    RuleName::BulletDistr,
    RuleName::BoxDiaBulletExc,
    RuleName::DiaBoxBulletExc,
    RuleName::BoxOrBulletE,
    RuleName::DiaBulletDistr,
    RuleName::BulletDiaDistr,
];

/// The two side-condition families on the rule tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideCondition {
    /// The undischarged assumptions of the designated subderivations
    /// must be classical formulas.
    ClassicalAssumptions,
    /// The designated subderivation must have no undischarged
    /// assumptions besides those discharged by the rule itself.
    ClosedSubderivation,
}

impl fmt::Display for SideCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SideCondition::ClassicalAssumptions => f.write_str("classical-assumptions"),
            SideCondition::ClosedSubderivation => f.write_str("closed-subderivation"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("rule {rule} is not part of the {system} system")]
    RuleNotInSystem { rule: String, system: System },
    #[error("schema mismatch at {rule}: {detail}")]
    SchemaMismatch { rule: String, detail: String },
    #[error("side condition ({condition}) violated at {rule}: {detail}")]
    SideConditionViolation {
        rule: String,
        condition: SideCondition,
        detail: String,
    },
    #[error("discharge error: {0}")]
    Discharge(String),
    #[error("proof file: {0}")]
    Format(String),
}

impl ProofError {
    /// Coarse classification used by the fixture tests.
    pub fn class(&self) -> &'static str {
        match self {
            ProofError::RuleNotInSystem { .. } => "rule-not-in-system",
            ProofError::SchemaMismatch { .. } => "schema-mismatch",
            ProofError::SideConditionViolation { .. } => "side-condition",
            ProofError::Discharge(_) => "discharge",
            ProofError::Format(_) => "format",
        }
    }
}

/// A derivation tree. Leaves are labelled assumptions or zero-premise
/// axioms; inner nodes carry the rule, its full conclusion, and the
/// labels the rule discharges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivation {
    Assume {
        label: String,
        formula: Formula,
    },
    Infer {
        rule: RuleName,
        conclusion: Formula,
        premises: Vec<Derivation>,
        discharges: Vec<String>,
    },
}

impl Derivation {
    pub fn conclusion(&self) -> &Formula {
        match self {
            Derivation::Assume { formula, .. } => formula,
            Derivation::Infer { conclusion, .. } => conclusion,
        }
    }

    pub fn rules_used(&self) -> Vec<RuleName> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(d) = stack.pop() {
            if let Derivation::Infer { rule, premises, .. } = d {
                out.push(*rule);
                stack.extend(premises.iter());
            }
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn node_count(&self) -> usize {
        match self {
            Derivation::Assume { .. } => 1,
            Derivation::Infer { premises, .. } => {
                1 + premises.iter().map(Derivation::node_count).sum::<usize>()
            }
        }
    }
}

/// Static description of a rule, as reported by [`list_rules`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleInfo {
    pub rule: RuleName,
    pub name: &'static str,
    /// Fixed premise count, or the minimum for variadic rules.
    pub min_premises: usize,
    pub variadic: bool,
    /// Number of labels discharged; `BoxMon` discharges one per premise
    /// beyond the first.
    pub discharges: usize,
    pub side_condition: Option<SideCondition>,
}

fn rule_info(rule: RuleName) -> RuleInfo {
    use RuleName::*;
    let (min_premises, variadic, discharges, side_condition) = match rule {
        NegI | Raa => (1, false, 1, Some(SideCondition::ClassicalAssumptions)),
        NegE | AndI => (2, false, 0, None),
        OrI | AndE => (1, false, 0, None),
        OrE => (3, false, 2, Some(SideCondition::ClassicalAssumptions)),
        DiaBoxInter | BoxDiaInter | DiaOrDistr => (1, false, 0, None),
        BoxMon => (1, true, 0, Some(SideCondition::ClosedSubderivation)),
        DiaMon => (2, false, 1, Some(SideCondition::ClosedSubderivation)),
        SubId => (0, false, 0, None),
        SubExp | SubNegE => (2, false, 0, None),
        OrSubE => (3, false, 2, None),
        SubExt | SubRdt => (1, false, 0, None),
        SubDistr => (2, true, 0, None),
        DiaSubDistr | DiaBoxSubExc => (1, false, 0, None),
        BoxDiaSubExc => (2, false, 0, None),
        BoxOrSubE => (3, false, 2, None),
        SubDiaDistr => (2, true, 0, None),
        MightJoin => (2, false, 0, None),
        MightE | SMightAndSimpl => (1, false, 0, None),
        BulletMon => (2, false, 1, Some(SideCondition::ClassicalAssumptions)),
        BulletOrDistr | BulletI => (1, false, 0, None),
        BulletNegE => (2, false, 0, None),
        OrBulletE => (3, false, 2, None),
        BulletDistr => (2, true, 0, None),
        BoxDiaBulletExc => (2, false, 0, None),
        DiaBoxBulletExc => (1, false, 0, None),
        BoxOrBulletE => (3, false, 2, None),
        DiaBulletDistr => (1, false, 0, None),
        BulletDiaDistr => (2, true, 0, None),
    };
    RuleInfo {
        rule,
        name: rule.name(),
        min_premises,
        variadic,
        discharges,
        side_condition,
    }
}

/// The complete rule inventory of a system.
pub fn list_rules(system: System) -> Vec<RuleInfo> {
    ALL_RULES
        .iter()
        .copied()
        .filter(|r| r.in_system(system))
        .map(rule_info)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_inventories() {
        assert_eq!(list_rules(System::MLIncSys).len(), 24);
        assert_eq!(list_rules(System::MLMightSys).len(), 25);
        assert_eq!(list_rules(System::MLSMightSys).len(), 24);

        let might: Vec<RuleName> = list_rules(System::MLMightSys)
            .into_iter()
            .map(|r| r.rule)
            .collect();
        assert!(might.contains(&RuleName::MightJoin));
        assert!(!might.contains(&RuleName::SMightAndSimpl));
        assert!(!might.contains(&RuleName::SubId));

        let smight: Vec<RuleName> = list_rules(System::MLSMightSys)
            .into_iter()
            .map(|r| r.rule)
            .collect();
        assert!(smight.contains(&RuleName::SMightAndSimpl));
        assert!(!smight.contains(&RuleName::MightJoin));

        for sys in [System::MLIncSys, System::MLMightSys, System::MLSMightSys] {
            assert!(list_rules(sys).iter().any(|r| r.rule == RuleName::Raa));
        }
    }

    #[test]
    fn rule_names_round_trip() {
        for r in ALL_RULES {
            assert_eq!(RuleName::from_name(r.name()), Some(r));
        }
        assert_eq!(RuleName::from_name("Nope"), None);
    }
}
