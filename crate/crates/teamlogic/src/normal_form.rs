//! Enumeration of world k-types, the stratified canonical model realizing
//! them, team-type properties, and normal-form compilation.
//!
//! A team is represented up to k-bisimulation by the set of world k-types
//! it realizes, so a "team property" at depth k over a finite signature
//! is a finite set of sets of [`TypeId`]s. The canonical model has one
//! world per type of each depth `j <= k`, with edges from a depth-j world
//! to the depth-(j-1) worlds in its successor set; its depth-k teams
//! realize every team type.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::bisim::{hintikka_world, PointedModel};
use crate::kripke::{KripkeModel, ModelError, Team};
use crate::semantics::{EvalContext, EvalError};
use crate::syntax::{big_and, big_or, inc, might, smight, top, Formula, Logic, PropSet};

/// Default ceiling for both the world-type count and the team-type count.
pub const DEFAULT_TYPE_CAP: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NfError {
    #[error("type enumeration explodes: {0}")]
    TypeExplosion(String),
    #[error("formula has modal depth {needed} but the requested depth is {given}")]
    Depth { needed: u32, given: u32 },
    #[error("team-type sets over different (signature, depth) universes")]
    UniverseMismatch,
    #[error("normal forms exist for mlinc, mlmight, and mlsmight, not {0}")]
    UnsupportedLogic(Logic),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Identifier of a world k-bisimulation type: a valuation bitmask over
/// the signature and, at positive depth, the set of realized successor
/// types one level down.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeId {
    depth: u32,
    val: u64,
    succs: BTreeSet<TypeId>,
}

impl TypeId {
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn valuation(&self) -> u64 {
        self.val
    }

    pub fn successors(&self) -> &BTreeSet<TypeId> {
        &self.succs
    }
}

// Canonical order: depth, then valuation bitmask descending, then the
// successor sets; keeps type enumerations and printed normal forms
// byte-stable.
impl Ord for TypeId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.depth
            .cmp(&other.depth)
            .then_with(|| other.val.cmp(&self.val))
            .then_with(|| self.succs.cmp(&other.succs))
    }
}

impl PartialOrd for TypeId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.depth == 0 {
            write!(f, "v{:b}", self.val)
        } else {
            write!(f, "v{:b}->{{", self.val)?;
            for (i, s) in self.succs.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{s}")?;
            }
            f.write_str("}")
        }
    }
}

/// The k-type of a pointed model.
pub fn world_type(m: &KripkeModel, world: &str, x: &PropSet, k: u32) -> Result<TypeId, ModelError> {
    let w = m.world_index(world)?;
    let mut memo = HashMap::new();
    Ok(type_of_index(m, w, x, k, &mut memo))
}

fn type_of_index(
    m: &KripkeModel,
    w: usize,
    x: &PropSet,
    k: u32,
    memo: &mut HashMap<(usize, u32), TypeId>,
) -> TypeId {
    if let Some(t) = memo.get(&(w, k)) {
        return t.clone();
    }
    let val = x
        .names()
        .iter()
        .enumerate()
        .fold(0u64, |v, (i, p)| if m.holds(p, w) { v | 1 << i } else { v });
    let succs = if k == 0 {
        BTreeSet::new()
    } else {
        m.successors(w)
            .iter()
            .map(|&v| type_of_index(m, v, x, k - 1, memo))
            .collect()
    };
    let t = TypeId { depth: k, val, succs };
    memo.insert((w, k), t.clone());
    t
}

/// The set of world k-types realized by a team; this set is the team's
/// k-bisimulation class.
pub fn team_type(
    m: &KripkeModel,
    t: &Team,
    x: &PropSet,
    k: u32,
) -> Result<BTreeSet<TypeId>, ModelError> {
    let idx = m.team_indices(t)?;
    let mut memo = HashMap::new();
    Ok(idx
        .into_iter()
        .map(|w| type_of_index(m, w, x, k, &mut memo))
        .collect())
}

/// The stratified model realizing every world type of each depth up to k.
#[derive(Debug)]
pub struct CanonicalModel {
    model: KripkeModel,
    x: PropSet,
    depth: u32,
    types_by_depth: Vec<Vec<TypeId>>,
    top_offset: usize,
}

impl CanonicalModel {
    pub fn model(&self) -> &KripkeModel {
        &self.model
    }

    pub fn signature(&self) -> &PropSet {
        &self.x
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// The depth-k types, in canonical order.
    pub fn top_types(&self) -> &[TypeId] {
        &self.types_by_depth[self.depth as usize]
    }

    /// World id of the i-th depth-k type.
    pub fn top_world(&self, i: usize) -> &str {
        self.model.world_id(self.top_offset + i)
    }

    pub fn index_of_top_type(&self, t: &TypeId) -> Option<usize> {
        self.top_types().binary_search(t).ok()
    }

    /// The team of top-stratum worlds selected by a type-index bitmask.
    pub fn team_of_mask(&self, mask: u64) -> Team {
        (0..self.top_types().len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.top_world(i).to_string())
            .collect()
    }

    fn top_team_mask(&self, mask: u64) -> u64 {
        (0..self.top_types().len())
            .filter(|i| mask >> i & 1 == 1)
            .fold(0u64, |m, i| m | 1 << (self.top_offset + i))
    }
}

/// All depth-k types over `x` in canonical order, plus the stratified
/// canonical model realizing them.
pub fn enumerate_world_types(
    x: &PropSet,
    k: u32,
    cap: u64,
) -> Result<(Vec<TypeId>, CanonicalModel), NfError> {
    if x.len() >= 32 {
        return Err(NfError::TypeExplosion(format!(
            "2^{} valuations alone exceed any sensible cap",
            x.len()
        )));
    }
    let vals: Vec<u64> = {
        let mut v: Vec<u64> = (0..1u64 << x.len()).collect();
        // Valuation order is descending, matching TypeId order.
        v.reverse();
        v
    };
    if vals.len() as u64 > cap {
        return Err(NfError::TypeExplosion(format!(
            "2^{} = {} depth-0 types exceed the cap of {}",
            x.len(),
            vals.len(),
            cap
        )));
    }
    let mut types_by_depth: Vec<Vec<TypeId>> = Vec::new();
    let mut level: Vec<TypeId> = vals
        .iter()
        .map(|&val| TypeId {
            depth: 0,
            val,
            succs: BTreeSet::new(),
        })
        .collect();
    level.sort();
    types_by_depth.push(level);
    for j in 1..=k {
        let prev = &types_by_depth[(j - 1) as usize];
        let n = prev.len();
        if n > 63 {
            return Err(NfError::TypeExplosion(format!(
                "2^{} * 2^{} depth-{} types exceed the cap of {}",
                x.len(),
                n,
                j,
                cap
            )));
        }
        let count = (1u128 << x.len()) * (1u128 << n);
        if count > cap as u128 {
            return Err(NfError::TypeExplosion(format!(
                "2^{} * 2^{} = {} depth-{} types exceed the cap of {}",
                x.len(),
                n,
                count,
                j,
                cap
            )));
        }
        let mut level: Vec<TypeId> = Vec::with_capacity(count as usize);
        for &val in &vals {
            for mask in 0u64..(1 << n) {
                let succs: BTreeSet<TypeId> = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| prev[i].clone())
                    .collect();
                level.push(TypeId {
                    depth: j,
                    val,
                    succs,
                });
            }
        }
        level.sort();
        types_by_depth.push(level);
    }

    // Assemble the stratified model: worlds from depth 0 upward, named
    // t<depth>_<index> with the index zero-padded so that id order is
    // canonical order.
    let mut worlds = Vec::new();
    let mut relation = Vec::new();
    let name = |j: u32, i: usize| format!("t{j}_{i:04}");
    for (j, level) in types_by_depth.iter().enumerate() {
        for (i, t) in level.iter().enumerate() {
            worlds.push(name(j as u32, i));
            if j > 0 {
                let prev = &types_by_depth[j - 1];
                for s in &t.succs {
                    let si = prev.binary_search(s).expect("successor type is enumerated");
                    relation.push((name(j as u32, i), name(j as u32 - 1, si)));
                }
            }
        }
    }
    let mut valuation: std::collections::BTreeMap<String, Vec<String>> =
        std::collections::BTreeMap::new();
    for (pi, p) in x.names().iter().enumerate() {
        let mut holds = Vec::new();
        for (j, level) in types_by_depth.iter().enumerate() {
            for (i, t) in level.iter().enumerate() {
                if t.val >> pi & 1 == 1 {
                    holds.push(name(j as u32, i));
                }
            }
        }
        valuation.insert(p.clone(), holds);
    }
    let top_offset = types_by_depth[..k as usize]
        .iter()
        .map(Vec::len)
        .sum::<usize>();
    let model = KripkeModel::new(worlds, relation, valuation)?;
    let top = types_by_depth[k as usize].clone();
    Ok((
        top,
        CanonicalModel {
            model,
            x: x.clone(),
            depth: k,
            types_by_depth,
            top_offset,
        },
    ))
}

/// A set of team k-types: each member is a set of depth-k world types,
/// stored as a bitmask over the canonical type order. The empty member
/// denotes the empty team.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TeamTypeSet {
    x: PropSet,
    k: u32,
    types: Vec<TypeId>,
    members: BTreeSet<u64>,
}

impl TeamTypeSet {
    pub fn signature(&self) -> &PropSet {
        &self.x
    }

    pub fn depth(&self) -> u32 {
        self.k
    }

    pub fn types(&self) -> &[TypeId] {
        &self.types
    }

    pub fn members(&self) -> &BTreeSet<u64> {
        &self.members
    }

    pub fn contains(&self, member: u64) -> bool {
        self.members.contains(&member)
    }

    /// Decodes a member bitmask into the types it selects.
    pub fn member_types(&self, member: u64) -> Vec<&TypeId> {
        (0..self.types.len())
            .filter(|i| member >> i & 1 == 1)
            .map(|i| &self.types[i])
            .collect()
    }
}

/// The team property of `f` at depth `k`: all team types whose canonical
/// realization satisfies `f`. Always contains the empty member.
pub fn property_of(f: &Formula, x: &PropSet, k: u32, cap: u64) -> Result<TeamTypeSet, NfError> {
    let needed = f.modal_depth();
    if k < needed {
        return Err(NfError::Depth { needed, given: k });
    }
    let (types, canon) = enumerate_world_types(x, k, cap)?;
    let n = types.len();
    if n > 63 || (1u128 << n) > cap as u128 {
        return Err(NfError::TypeExplosion(format!(
            "2^{n} team types exceed the cap of {cap}"
        )));
    }
    let mut ctx = EvalContext::new(canon.model(), f)?;
    let mut members = BTreeSet::new();
    for mask in 0u64..(1 << n) {
        if ctx.eval_mask(canon.top_team_mask(mask)) {
            members.insert(mask);
        }
    }
    debug_assert!(members.contains(&0), "empty team satisfies every formula");
    Ok(TeamTypeSet {
        x: x.clone(),
        k,
        types,
        members,
    })
}

/// The property together with its canonical model, for callers that need
/// to materialize witness teams.
pub fn property_with_model(
    f: &Formula,
    x: &PropSet,
    k: u32,
    cap: u64,
) -> Result<(TeamTypeSet, CanonicalModel), NfError> {
    let tts = property_of(f, x, k, cap)?;
    let (_, canon) = enumerate_world_types(x, k, cap)?;
    Ok((tts, canon))
}

// Members ordered by size and then by their sorted index sequences, so
// printed normal forms are stable.
fn ordered_members(members: &BTreeSet<u64>) -> Vec<u64> {
    let mut v: Vec<u64> = members.iter().copied().filter(|&m| m != 0).collect();
    v.sort_by_key(|&m| {
        let idxs: Vec<u32> = (0..64).filter(|i| m >> i & 1 == 1).collect();
        (m.count_ones(), idxs)
    });
    v
}

// Drops members that are unions of other members; the disjunction over
// the remaining ones defines the same property.
fn union_irreducible(members: &BTreeSet<u64>) -> Vec<u64> {
    ordered_members(members)
        .into_iter()
        .filter(|&s| {
            let covered = members
                .iter()
                .filter(|&&d| d != 0 && d != s && d & !s == 0)
                .fold(0u64, |acc, &d| acc | d);
            covered != s
        })
        .collect()
}

/// Compiles `f` into the normal form of the chosen logic: a disjunction,
/// over the union-irreducible nonempty members of its property, of the
/// member's characteristic formula. The characteristic formula disjoins
/// the member's Hintikka formulas and conjoins, per type, a top inclusion
/// atom (mlinc), a might (mlmight), or a singular might (mlsmight) over
/// the same Hintikka formula. Returns `bot` when only the empty member is
/// present.
pub fn normal_form(
    f: &Formula,
    x: &PropSet,
    k: u32,
    logic: Logic,
    cap: u64,
) -> Result<Formula, NfError> {
    let dress: fn(Formula) -> Formula = match logic {
        Logic::MLInc => |c| inc(vec![top()], vec![c]),
        Logic::MLMight => might,
        Logic::MLSMight => smight,
        Logic::MLClassical => return Err(NfError::UnsupportedLogic(logic)),
    };
    let tts = property_of(f, x, k, cap)?;
    let (_, canon) = enumerate_world_types(x, k, cap)?;
    let chi: Vec<Formula> = (0..tts.types.len())
        .map(|i| {
            hintikka_world(
                PointedModel::new(canon.model(), canon.top_world(i)).expect("world exists"),
                x,
                k,
            )
        })
        .collect();
    let mut disjuncts = Vec::new();
    for member in union_irreducible(&tts.members) {
        let chis: Vec<Formula> = (0..tts.types.len())
            .filter(|i| member >> i & 1 == 1)
            .map(|i| chi[i].clone())
            .collect();
        let eta = big_or(chis.clone());
        let theta = big_and(std::iter::once(eta).chain(chis.iter().cloned().map(dress)));
        disjuncts.push(theta);
    }
    Ok(big_or(disjuncts))
}

/// Whether every member of `c` is a union of members of `d`; with
/// properties of formulas this decides entailment.
pub fn nf_entails(c: &TeamTypeSet, d: &TeamTypeSet) -> Result<bool, NfError> {
    Ok(nf_first_uncovered(c, d)?.is_none())
}

/// The first member of `c` that is not a union of members of `d`, if any.
pub fn nf_first_uncovered(c: &TeamTypeSet, d: &TeamTypeSet) -> Result<Option<u64>, NfError> {
    if c.x != d.x || c.k != d.k || c.types != d.types {
        return Err(NfError::UniverseMismatch);
    }
    for &s in &c.members {
        let covered = d
            .members
            .iter()
            .filter(|&&m| m & !s == 0)
            .fold(0u64, |acc, &m| acc | m);
        if covered != s {
            return Ok(Some(s));
        }
    }
    Ok(None)
}
