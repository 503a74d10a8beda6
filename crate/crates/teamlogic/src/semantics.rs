//! Team satisfaction for all three logics, a classical single-world
//! evaluator, and a naive reference evaluator used as an internal oracle.
//!
//! The optimized evaluator reduces every clause to the maximal satisfying
//! subteam `U(f, T)`, which is well defined because every formula here is
//! union closed and has the empty team property:
//!
//! * split disjunction: `T |= f | g  iff  U(f,T)extend U(g,T) = T`,
//! * diamond: `T |= <>f  iff  T` is inside the preimage of `U(f, R[T])`,
//! * might: `T |= might f  iff  T` is empty or `U(f,T)` is nonempty.
//!
//! `U` itself is computed by memoized descent over the subset lattice:
//! check the team, and on failure recurse on all maximal proper subteams
//! and take the union of the results.

use std::collections::HashMap;

use thiserror::Error;

use crate::kripke::{KripkeModel, ModelError, Team};
use crate::syntax::{Formula, SyntaxError};

/// Teams are bitmasks internally; models beyond this size are rejected
/// by the evaluator.
pub const MAX_EVAL_WORLDS: usize = 64;

/// The naive evaluator enumerates splits and successor teams directly
/// and refuses teams larger than this.
pub const NAIVE_TEAM_CAP: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("proposition `{0}` is not in the model's signature")]
    Signature(String),
    #[error("formula `{0}` is not classical")]
    NotClassical(String),
    #[error("model has {0} worlds; the evaluator supports at most {MAX_EVAL_WORLDS}")]
    TooLarge(usize),
    #[error("naive evaluator: team of size {0} exceeds the cap of {NAIVE_TEAM_CAP}")]
    NaiveCap(u32),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Formula(#[from] SyntaxError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    Prop(u64),
    Bottom,
    Neg(u32),
    Or(u32, u32),
    And(u32, u32),
    Dia(u32),
    Box(u32),
    Inc(Vec<u32>, Vec<u32>),
    Might(u32),
    SMight(u32),
}

/// Evaluation session for one formula over one model. Satisfaction and
/// maximal-subteam results are memoized per subformula and team, so
/// evaluating many teams of the same model amortizes well.
pub struct EvalContext<'a> {
    model: &'a KripkeModel,
    nodes: Vec<Node>,
    classical: Vec<bool>,
    root: u32,
    succ_mask: Vec<u64>,
    pred_mask: Vec<u64>,
    ext: Vec<Option<u64>>,
    sat: Vec<HashMap<u64, bool>>,
    maxsub: Vec<HashMap<u64, u64>>,
}

impl<'a> EvalContext<'a> {
    pub fn new(model: &'a KripkeModel, formula: &Formula) -> Result<EvalContext<'a>, EvalError> {
        if model.world_count() > MAX_EVAL_WORLDS {
            return Err(EvalError::TooLarge(model.world_count()));
        }
        formula.validate()?;
        let mut nodes = Vec::new();
        let mut classical = Vec::new();
        let mut cons: HashMap<Node, u32> = HashMap::new();
        let root = intern(formula, model, &mut nodes, &mut classical, &mut cons)?;
        let n = model.world_count();
        let succ_mask = (0..n)
            .map(|w| model.successors(w).iter().fold(0u64, |m, &v| m | 1 << v))
            .collect();
        let pred_mask = (0..n)
            .map(|w| model.predecessors(w).iter().fold(0u64, |m, &v| m | 1 << v))
            .collect();
        let len = nodes.len();
        Ok(EvalContext {
            model,
            nodes,
            classical,
            root,
            succ_mask,
            pred_mask,
            ext: vec![None; len],
            sat: vec![HashMap::new(); len],
            maxsub: vec![HashMap::new(); len],
        })
    }

    pub fn model(&self) -> &KripkeModel {
        self.model
    }

    pub fn team_mask(&self, t: &Team) -> Result<u64, EvalError> {
        let idx = self.model.team_indices(t)?;
        Ok(idx.iter().fold(0u64, |m, &w| m | 1 << w))
    }

    pub fn eval(&mut self, t: &Team) -> Result<bool, EvalError> {
        let mask = self.team_mask(t)?;
        Ok(self.eval_mask(mask))
    }

    pub fn max_sat(&mut self, t: &Team) -> Result<Team, EvalError> {
        let mask = self.team_mask(t)?;
        let out = self.max_sat_mask(mask);
        Ok(self.model.team_from_indices(bits(out)))
    }

    pub fn eval_mask(&mut self, mask: u64) -> bool {
        self.sat_node(self.root, mask)
    }

    pub fn max_sat_mask(&mut self, mask: u64) -> u64 {
        self.max_sub(self.root, mask)
    }

    fn image_mask(&self, mask: u64) -> u64 {
        bits(mask).fold(0u64, |m, w| m | self.succ_mask[w])
    }

    fn preimage_mask(&self, mask: u64) -> u64 {
        bits(mask).fold(0u64, |m, w| m | self.pred_mask[w])
    }

    fn sat_node(&mut self, id: u32, mask: u64) -> bool {
        if let Some(&v) = self.sat[id as usize].get(&mask) {
            return v;
        }
        let v = match self.nodes[id as usize].clone() {
            Node::Prop(val) => mask & !val == 0,
            Node::Bottom => mask == 0,
            Node::Neg(f) => mask & self.extension(f) == 0,
            Node::Or(l, r) => self.max_sub(l, mask) | self.max_sub(r, mask) == mask,
            Node::And(l, r) => self.sat_node(l, mask) && self.sat_node(r, mask),
            Node::Dia(f) => {
                let img = self.image_mask(mask);
                let u = self.max_sub(f, img);
                mask & !self.preimage_mask(u) == 0
            }
            Node::Box(f) => {
                let img = self.image_mask(mask);
                self.sat_node(f, img)
            }
            Node::Inc(lhs, rhs) => self.inc_holds(&lhs, &rhs, mask),
            Node::Might(f) => mask == 0 || self.max_sub(f, mask) != 0,
            Node::SMight(f) => mask == 0 || bits(mask).any(|w| self.sat_node(f, 1 << w)),
        };
        self.sat[id as usize].insert(mask, v);
        v
    }

    // The value-matching clause, evaluated directly: every left pattern
    // realized in the team is some world's right pattern.
    fn inc_holds(&mut self, lhs: &[u32], rhs: &[u32], mask: u64) -> bool {
        let lext: Vec<u64> = lhs.iter().map(|&f| self.extension(f)).collect();
        let rext: Vec<u64> = rhs.iter().map(|&f| self.extension(f)).collect();
        let pattern = |exts: &[u64], w: usize| -> u32 {
            exts.iter()
                .enumerate()
                .fold(0u32, |p, (i, e)| p | (((e >> w) & 1) as u32) << i)
        };
        let rpats: Vec<u32> = bits(mask).map(|w| pattern(&rext, w)).collect();
        bits(mask).all(|w| rpats.contains(&pattern(&lext, w)))
    }

    // Maximal satisfying subteam by descent over the subset lattice.
    fn max_sub(&mut self, id: u32, mask: u64) -> u64 {
        if let Some(&v) = self.maxsub[id as usize].get(&mask) {
            return v;
        }
        let v = if self.sat_node(id, mask) {
            mask
        } else {
            let mut acc = 0u64;
            for w in bits(mask) {
                acc |= self.max_sub(id, mask & !(1 << w));
            }
            acc
        };
        self.maxsub[id as usize].insert(mask, v);
        v
    }

    // Extension mask of a classical subformula, computed once.
    fn extension(&mut self, id: u32) -> u64 {
        if let Some(v) = self.ext[id as usize] {
            return v;
        }
        let n = self.model.world_count();
        let full: u64 = if n == 64 { !0 } else { (1u64 << n) - 1 };
        let v = match self.nodes[id as usize].clone() {
            Node::Prop(val) => val,
            Node::Bottom => 0,
            Node::Neg(f) => full & !self.extension(f),
            Node::Or(l, r) => self.extension(l) | self.extension(r),
            Node::And(l, r) => self.extension(l) & self.extension(r),
            Node::Dia(f) => {
                let e = self.extension(f);
                (0..n).filter(|&w| self.succ_mask[w] & e != 0).fold(0, |m, w| m | 1 << w)
            }
            Node::Box(f) => {
                let e = self.extension(f);
                (0..n)
                    .filter(|&w| self.succ_mask[w] & !e == 0)
                    .fold(0, |m, w| m | 1 << w)
            }
            Node::Inc(..) | Node::Might(..) | Node::SMight(..) => {
                unreachable!("extension is only requested for classical nodes")
            }
        };
        self.ext[id as usize] = Some(v);
        v
    }

    fn classical_world(&mut self, w: usize) -> Result<bool, EvalError> {
        if !self.classical[self.root as usize] {
            return Err(EvalError::NotClassical(
                "root of evaluation context".to_string(),
            ));
        }
        Ok(self.extension(self.root) >> w & 1 == 1)
    }
}

fn intern(
    f: &Formula,
    model: &KripkeModel,
    nodes: &mut Vec<Node>,
    classical: &mut Vec<bool>,
    cons: &mut HashMap<Node, u32>,
) -> Result<u32, EvalError> {
    let node = match f {
        Formula::Prop(p) => {
            let val = model
                .valuation_of(p)
                .ok_or_else(|| EvalError::Signature(p.clone()))?;
            Node::Prop(val.iter().fold(0u64, |m, &w| m | 1 << w))
        }
        Formula::Bottom => Node::Bottom,
        Formula::Neg(g) => Node::Neg(intern(g, model, nodes, classical, cons)?),
        Formula::Or(l, r) => Node::Or(
            intern(l, model, nodes, classical, cons)?,
            intern(r, model, nodes, classical, cons)?,
        ),
        Formula::And(l, r) => Node::And(
            intern(l, model, nodes, classical, cons)?,
            intern(r, model, nodes, classical, cons)?,
        ),
        Formula::Dia(g) => Node::Dia(intern(g, model, nodes, classical, cons)?),
        Formula::Box(g) => Node::Box(intern(g, model, nodes, classical, cons)?),
        Formula::Inc(lhs, rhs) => {
            let l = lhs
                .iter()
                .map(|g| intern(g, model, nodes, classical, cons))
                .collect::<Result<Vec<_>, _>>()?;
            let r = rhs
                .iter()
                .map(|g| intern(g, model, nodes, classical, cons))
                .collect::<Result<Vec<_>, _>>()?;
            Node::Inc(l, r)
        }
        Formula::Might(g) => Node::Might(intern(g, model, nodes, classical, cons)?),
        Formula::SMight(g) => Node::SMight(intern(g, model, nodes, classical, cons)?),
    };
    if let Some(&id) = cons.get(&node) {
        return Ok(id);
    }
    let id = nodes.len() as u32;
    nodes.push(node.clone());
    classical.push(f.is_classical());
    cons.insert(node, id);
    Ok(id)
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&i| mask >> i & 1 == 1)
}

/// Whether `m, t |= f`.
pub fn eval_team(m: &KripkeModel, t: &Team, f: &Formula) -> Result<bool, EvalError> {
    EvalContext::new(m, f)?.eval(t)
}

/// The unique largest subteam of `t` satisfying `f`.
pub fn max_sat_subteam(m: &KripkeModel, t: &Team, f: &Formula) -> Result<Team, EvalError> {
    EvalContext::new(m, f)?.max_sat(t)
}

/// Usual single-world satisfaction of a classical formula.
pub fn eval_classical_world(m: &KripkeModel, world: &str, f: &Formula) -> Result<bool, EvalError> {
    if !f.is_classical() {
        return Err(EvalError::NotClassical(f.to_string()));
    }
    let w = m.world_index(world)?;
    EvalContext::new(m, f)?.classical_world(w)
}

// ---------------------------------------------------------------------------
// Naive reference evaluator
// ---------------------------------------------------------------------------

/// Reference evaluator that follows the satisfaction clauses literally:
/// disjunction enumerates all splits, the diamond enumerates all
/// successor teams, might enumerates all nonempty subteams. Exponential;
/// teams are capped at [`NAIVE_TEAM_CAP`].
pub struct NaiveEvaluator<'a> {
    model: &'a KripkeModel,
    nodes: Vec<Node>,
    root: u32,
    succ_mask: Vec<u64>,
    sat: Vec<HashMap<u64, bool>>,
    world_sat: Vec<HashMap<usize, bool>>,
}

impl<'a> NaiveEvaluator<'a> {
    pub fn new(model: &'a KripkeModel, formula: &Formula) -> Result<NaiveEvaluator<'a>, EvalError> {
        if model.world_count() > MAX_EVAL_WORLDS {
            return Err(EvalError::TooLarge(model.world_count()));
        }
        formula.validate()?;
        let mut nodes = Vec::new();
        let mut classical = Vec::new();
        let mut cons = HashMap::new();
        let root = intern(formula, model, &mut nodes, &mut classical, &mut cons)?;
        let succ_mask = (0..model.world_count())
            .map(|w| model.successors(w).iter().fold(0u64, |m, &v| m | 1 << v))
            .collect();
        let len = nodes.len();
        Ok(NaiveEvaluator {
            model,
            nodes,
            root,
            succ_mask,
            sat: vec![HashMap::new(); len],
            world_sat: vec![HashMap::new(); len],
        })
    }

    pub fn eval(&mut self, t: &Team) -> Result<bool, EvalError> {
        let idx = self.model.team_indices(t)?;
        let mask = idx.iter().fold(0u64, |m, &w| m | 1 << w);
        self.eval_mask(mask)
    }

    pub fn eval_mask(&mut self, mask: u64) -> Result<bool, EvalError> {
        if mask.count_ones() > NAIVE_TEAM_CAP {
            return Err(EvalError::NaiveCap(mask.count_ones()));
        }
        self.sat_node(self.root, mask)
    }

    fn sat_node(&mut self, id: u32, mask: u64) -> Result<bool, EvalError> {
        if mask.count_ones() > NAIVE_TEAM_CAP {
            return Err(EvalError::NaiveCap(mask.count_ones()));
        }
        if let Some(&v) = self.sat[id as usize].get(&mask) {
            return Ok(v);
        }
        let v = match self.nodes[id as usize].clone() {
            Node::Prop(val) => mask & !val == 0,
            Node::Bottom => mask == 0,
            Node::Neg(f) => {
                let mut ok = true;
                for w in bits(mask) {
                    if self.world_node(f, w)? {
                        ok = false;
                        break;
                    }
                }
                ok
            }
            Node::Or(l, r) => {
                let mut found = false;
                let mut s1 = mask;
                'outer: loop {
                    // s2 ranges over all teams that complete s1 to mask.
                    let rest = mask & !s1;
                    let mut fill = s1;
                    loop {
                        if self.sat_node(l, s1)? && self.sat_node(r, rest | fill)? {
                            found = true;
                            break 'outer;
                        }
                        if fill == 0 {
                            break;
                        }
                        fill = (fill - 1) & s1;
                    }
                    if s1 == 0 {
                        break;
                    }
                    s1 = (s1 - 1) & mask;
                }
                found
            }
            Node::And(l, r) => self.sat_node(l, mask)? && self.sat_node(r, mask)?,
            Node::Dia(f) => {
                let img = bits(mask).fold(0u64, |m, w| m | self.succ_mask[w]);
                let mut found = false;
                let mut s = img;
                loop {
                    if self.is_successor(mask, s) && self.sat_node(f, s)? {
                        found = true;
                        break;
                    }
                    if s == 0 {
                        break;
                    }
                    s = (s - 1) & img;
                }
                found
            }
            Node::Box(f) => {
                let img = bits(mask).fold(0u64, |m, w| m | self.succ_mask[w]);
                self.sat_node(f, img)?
            }
            Node::Inc(lhs, rhs) => {
                let mut ok = true;
                'all: for w in bits(mask) {
                    for v in bits(mask) {
                        let mut matches = true;
                        for (l, r) in lhs.iter().zip(rhs.iter()) {
                            if self.world_node(*l, w)? != self.world_node(*r, v)? {
                                matches = false;
                                break;
                            }
                        }
                        if matches {
                            continue 'all;
                        }
                    }
                    ok = false;
                    break;
                }
                ok
            }
            Node::Might(f) => {
                if mask == 0 {
                    true
                } else {
                    let mut found = false;
                    let mut s = mask;
                    loop {
                        if s != 0 && self.sat_node(f, s)? {
                            found = true;
                            break;
                        }
                        if s == 0 {
                            break;
                        }
                        s = (s - 1) & mask;
                    }
                    found
                }
            }
            Node::SMight(f) => {
                if mask == 0 {
                    true
                } else {
                    let mut found = false;
                    for w in bits(mask) {
                        if self.sat_node(f, 1 << w)? {
                            found = true;
                            break;
                        }
                    }
                    found
                }
            }
        };
        self.sat[id as usize].insert(mask, v);
        Ok(v)
    }

    fn is_successor(&self, t: u64, s: u64) -> bool {
        let img = bits(t).fold(0u64, |m, w| m | self.succ_mask[w]);
        s & !img == 0 && bits(t).all(|w| self.succ_mask[w] & s != 0)
    }

    // Single-world classical satisfaction, clause by clause.
    fn world_node(&mut self, id: u32, w: usize) -> Result<bool, EvalError> {
        if let Some(&v) = self.world_sat[id as usize].get(&w) {
            return Ok(v);
        }
        let v = match self.nodes[id as usize].clone() {
            Node::Prop(val) => val >> w & 1 == 1,
            Node::Bottom => false,
            Node::Neg(f) => !self.world_node(f, w)?,
            Node::Or(l, r) => self.world_node(l, w)? || self.world_node(r, w)?,
            Node::And(l, r) => self.world_node(l, w)? && self.world_node(r, w)?,
            Node::Dia(f) => {
                let mut found = false;
                for v in bits(self.succ_mask[w]) {
                    if self.world_node(f, v)? {
                        found = true;
                        break;
                    }
                }
                found
            }
            Node::Box(f) => {
                let mut all = true;
                for v in bits(self.succ_mask[w]) {
                    if !self.world_node(f, v)? {
                        all = false;
                        break;
                    }
                }
                all
            }
            Node::Inc(..) | Node::Might(..) | Node::SMight(..) => {
                return Err(EvalError::NotClassical(
                    "single-world clause hit a non-classical node".to_string(),
                ))
            }
        };
        self.world_sat[id as usize].insert(w, v);
        Ok(v)
    }
}

/// Whether `m, t |= f` according to the naive reference evaluator.
pub fn eval_team_naive(m: &KripkeModel, t: &Team, f: &Formula) -> Result<bool, EvalError> {
    NaiveEvaluator::new(m, f)?.eval(t)
}
