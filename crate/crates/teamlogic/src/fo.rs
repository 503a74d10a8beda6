//! First-order inclusion logic: negation-normal syntax, finite structures
//! in correspondence with Kripke models, assignment teams, the standard
//! translation from modal inclusion logic, and two team-semantics
//! evaluators (a polynomial fixpoint one and a literal enumerating one).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::kripke::{KripkeModel, ModelError, Team};
use crate::syntax::{big_and, neg, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoError {
    #[error("the standard translation does not cover `{0}`")]
    UnsupportedConnective(String),
    #[error("free variable `{0}` is not in the team's domain")]
    FreeVariable(String),
    #[error("naive evaluator bound exceeded: {0}")]
    Bound(String),
    #[error("proposition `{0}` would clash with the accessibility symbol R")]
    PredicateCollision(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Formulas of first-order inclusion logic in negation normal form:
/// negation occurs only on equality and relation atoms. `Verum` and
/// `Falsum` are dedicated constants, expanded to their quantifier
/// definitions only when printed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FoFormula {
    Verum,
    Falsum,
    Eq(String, String),
    NegEq(String, String),
    Rel(String, Vec<String>),
    NegRel(String, Vec<String>),
    /// Inclusion atom over two equally long variable tuples.
    Inc(Vec<String>, Vec<String>),
    Or(Box<FoFormula>, Box<FoFormula>),
    And(Box<FoFormula>, Box<FoFormula>),
    Exists(String, Box<FoFormula>),
    Forall(String, Box<FoFormula>),
}

impl FoFormula {
    pub fn free_vars(&self) -> BTreeSet<String> {
        fn walk(f: &FoFormula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            let add = |v: &String, bound: &Vec<String>, out: &mut BTreeSet<String>| {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            };
            match f {
                FoFormula::Verum | FoFormula::Falsum => {}
                FoFormula::Eq(a, b) | FoFormula::NegEq(a, b) => {
                    add(a, bound, out);
                    add(b, bound, out);
                }
                FoFormula::Rel(_, args) | FoFormula::NegRel(_, args) => {
                    args.iter().for_each(|a| add(a, bound, out));
                }
                FoFormula::Inc(xs, ys) => {
                    xs.iter().chain(ys.iter()).for_each(|a| add(a, bound, out));
                }
                FoFormula::Or(l, r) | FoFormula::And(l, r) => {
                    walk(l, bound, out);
                    walk(r, bound, out);
                }
                FoFormula::Exists(v, body) | FoFormula::Forall(v, body) => {
                    bound.push(v.clone());
                    walk(body, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoFormula::Verum => write!(f, "Forall(z, Eq(z,z))"),
            FoFormula::Falsum => write!(f, "Forall(z, Neg(Eq(z,z)))"),
            FoFormula::Eq(a, b) => write!(f, "Eq({a},{b})"),
            FoFormula::NegEq(a, b) => write!(f, "Neg(Eq({a},{b}))"),
            FoFormula::Rel(name, args) => write!(f, "{name}({})", args.join(",")),
            FoFormula::NegRel(name, args) => write!(f, "Neg({name}({}))", args.join(",")),
            FoFormula::Inc(xs, ys) => {
                write!(f, "Inc([{}], [{}])", xs.join(","), ys.join(","))
            }
            FoFormula::Or(l, r) => write!(f, "Or({l}, {r})"),
            FoFormula::And(l, r) => write!(f, "And({l}, {r})"),
            FoFormula::Exists(v, body) => write!(f, "Exists({v}, {body})"),
            FoFormula::Forall(v, body) => write!(f, "Forall({v}, {body})"),
        }
    }
}

fn fo_and(l: FoFormula, r: FoFormula) -> FoFormula {
    FoFormula::And(Box::new(l), Box::new(r))
}

fn fo_or(l: FoFormula, r: FoFormula) -> FoFormula {
    FoFormula::Or(Box::new(l), Box::new(r))
}

/// A finite relational structure: a domain plus named relations. Kripke
/// models correspond one-to-one to structures with the binary symbol `R`
/// and one unary predicate per proposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoStructure {
    domain: Vec<String>,
    rels: BTreeMap<String, BTreeSet<Vec<usize>>>,
}

/// The predicate symbol used for a proposition name.
pub fn predicate_name(prop: &str) -> String {
    prop.to_uppercase()
}

impl FoStructure {
    pub fn from_kripke(m: &KripkeModel) -> Result<FoStructure, FoError> {
        let mut rels: BTreeMap<String, BTreeSet<Vec<usize>>> = BTreeMap::new();
        let mut edges = BTreeSet::new();
        for i in 0..m.world_count() {
            for &j in m.successors(i) {
                edges.insert(vec![i, j]);
            }
        }
        rels.insert("R".to_string(), edges);
        for p in m.signature().names() {
            let name = predicate_name(p);
            if name == "R" {
                return Err(FoError::PredicateCollision(p.clone()));
            }
            let ext = m
                .valuation_of(p)
                .map(|set| set.iter().map(|&w| vec![w]).collect())
                .unwrap_or_default();
            rels.insert(name, ext);
        }
        Ok(FoStructure {
            domain: m.worlds().to_vec(),
            rels,
        })
    }

    pub fn domain_size(&self) -> usize {
        self.domain.len()
    }

    pub fn holds(&self, name: &str, tuple: &[usize]) -> Result<bool, FoError> {
        self.rels
            .get(name)
            .map(|ext| ext.contains(tuple))
            .ok_or_else(|| FoError::UnknownPredicate(name.to_string()))
    }
}

/// An assignment from variables to domain elements.
pub type Assignment = BTreeMap<String, usize>;

/// A first-order team: a common variable domain and a set of assignments
/// over it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoTeam {
    vars: BTreeSet<String>,
    rows: BTreeSet<Assignment>,
}

impl FoTeam {
    pub fn new(vars: BTreeSet<String>, rows: BTreeSet<Assignment>) -> FoTeam {
        for row in &rows {
            debug_assert!(row.keys().cloned().collect::<BTreeSet<_>>() == vars);
        }
        FoTeam { vars, rows }
    }

    pub fn vars(&self) -> &BTreeSet<String> {
        &self.vars
    }

    pub fn rows(&self) -> &BTreeSet<Assignment> {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// The team `{{var -> w} | w in t}` of singleton assignments.
pub fn lift_team(m: &KripkeModel, t: &Team, var: &str) -> Result<FoTeam, ModelError> {
    let rows = m
        .team_indices(t)?
        .into_iter()
        .map(|w| BTreeMap::from([(var.to_string(), w)]))
        .collect();
    Ok(FoTeam {
        vars: BTreeSet::from([var.to_string()]),
        rows,
    })
}

// ---------------------------------------------------------------------------
// Standard translation
// ---------------------------------------------------------------------------

struct FreshVars {
    taken: BTreeSet<String>,
    counter: usize,
}

impl FreshVars {
    fn new(avoid: &str) -> FreshVars {
        FreshVars {
            taken: BTreeSet::from([avoid.to_string()]),
            counter: 0,
        }
    }

    fn next(&mut self) -> String {
        loop {
            let name = if self.counter == 0 {
                "y".to_string()
            } else {
                format!("y{}", self.counter)
            };
            self.counter += 1;
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }
}

/// The standard translation of a modal inclusion logic formula with
/// respect to `var`. Classical subformulas are translated in negation
/// normal form (negation pushed onto atoms via the De Morgan and
/// diamond/box dualities), so the output stays inside the grammar above.
/// Fresh variables come from a deterministic counter: `y`, `y1`, `y2`, ...
pub fn st_translate(f: &Formula, var: &str) -> Result<FoFormula, FoError> {
    let mut fresh = FreshVars::new(var);
    translate(f, var, true, &mut fresh)
}

fn translate(
    f: &Formula,
    x: &str,
    positive: bool,
    fresh: &mut FreshVars,
) -> Result<FoFormula, FoError> {
    Ok(match (f, positive) {
        (Formula::Prop(p), true) => {
            let name = predicate_name(p);
            if name == "R" {
                return Err(FoError::PredicateCollision(p.clone()));
            }
            FoFormula::Rel(name, vec![x.to_string()])
        }
        (Formula::Prop(p), false) => {
            let name = predicate_name(p);
            if name == "R" {
                return Err(FoError::PredicateCollision(p.clone()));
            }
            FoFormula::NegRel(name, vec![x.to_string()])
        }
        (Formula::Bottom, true) => FoFormula::Falsum,
        (Formula::Bottom, false) => FoFormula::Verum,
        (Formula::Neg(g), pos) => translate(g, x, !pos, fresh)?,
        (Formula::And(l, r), true) | (Formula::Or(l, r), false) => fo_and(
            translate(l, x, positive, fresh)?,
            translate(r, x, positive, fresh)?,
        ),
        (Formula::Or(l, r), true) | (Formula::And(l, r), false) => fo_or(
            translate(l, x, positive, fresh)?,
            translate(r, x, positive, fresh)?,
        ),
        // Positive diamond and negative box are existential; the dual
        // pair is universal.
        (Formula::Dia(g), true) | (Formula::Box(g), false) => {
            let y = fresh.next();
            let body = translate(g, &y, positive, fresh)?;
            FoFormula::Exists(
                y.clone(),
                Box::new(fo_and(FoFormula::Rel("R".into(), vec![x.into(), y]), body)),
            )
        }
        (Formula::Box(g), true) | (Formula::Dia(g), false) => {
            let y = fresh.next();
            let edge = FoFormula::Rel("R".into(), vec![x.to_string(), y.clone()]);
            let no_edge = FoFormula::NegRel("R".into(), vec![x.to_string(), y.clone()]);
            let body = translate(g, &y, positive, fresh)?;
            FoFormula::Forall(y, Box::new(fo_or(no_edge, fo_and(edge, body))))
        }
        (Formula::Inc(lhs, rhs), true) => {
            let n = lhs.len();
            let mut conjuncts = Vec::new();
            for code in 0..1u32 << n {
                // Tuples of truth constants, all-true first.
                let z: Vec<bool> = (0..n).map(|i| code >> (n - 1 - i) & 1 == 0).collect();
                let pow = |side: &[Formula]| {
                    big_and(side.iter().zip(&z).map(|(a, &zi)| {
                        if zi {
                            a.clone()
                        } else {
                            neg(a.clone())
                        }
                    }))
                };
                let left = translate(&neg(pow(lhs)), x, true, fresh)?;
                let y = fresh.next();
                let right = FoFormula::Exists(
                    y.clone(),
                    Box::new(fo_and(
                        FoFormula::Inc(vec![y.clone()], vec![x.to_string()]),
                        translate(&pow(rhs), &y, true, fresh)?,
                    )),
                );
                conjuncts.push(fo_or(left, right));
            }
            let mut it = conjuncts.into_iter();
            let first = it.next().expect("at least one truth-constant tuple");
            it.fold(first, fo_and)
        }
        (Formula::Inc(..), false) => {
            return Err(FoError::UnsupportedConnective(
                "negated inclusion atom".to_string(),
            ))
        }
        (Formula::Might(_), _) | (Formula::SMight(_), _) => {
            return Err(FoError::UnsupportedConnective(f.to_string()))
        }
    })
}

// ---------------------------------------------------------------------------
// Fixpoint evaluator
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum FoNode {
    Verum,
    Falsum,
    Eq(String, String),
    NegEq(String, String),
    Rel(String, Vec<String>),
    NegRel(String, Vec<String>),
    Inc(Vec<String>, Vec<String>),
    Or(usize, usize),
    And(usize, usize),
    Exists(String, usize),
    Forall(String, usize),
}

struct FoEvaluator<'a> {
    st: &'a FoStructure,
    nodes: Vec<FoNode>,
    // Interned assignments; teams are sorted id vectors.
    rows: Vec<Assignment>,
    row_ids: HashMap<Assignment, u32>,
    memo: Vec<HashMap<Vec<u32>, Vec<u32>>>,
}

impl<'a> FoEvaluator<'a> {
    fn new(st: &'a FoStructure, f: &FoFormula) -> FoEvaluator<'a> {
        let mut nodes = Vec::new();
        build_arena(f, &mut nodes);
        let len = nodes.len();
        FoEvaluator {
            st,
            nodes,
            rows: Vec::new(),
            row_ids: HashMap::new(),
            memo: vec![HashMap::new(); len],
        }
    }

    fn intern(&mut self, a: Assignment) -> u32 {
        if let Some(&id) = self.row_ids.get(&a) {
            return id;
        }
        let id = self.rows.len() as u32;
        self.rows.push(a.clone());
        self.row_ids.insert(a, id);
        id
    }

    fn literal_row(&self, node: usize, row: &Assignment) -> Result<bool, FoError> {
        let get = |v: &String| -> Result<usize, FoError> {
            row.get(v)
                .copied()
                .ok_or_else(|| FoError::FreeVariable(v.clone()))
        };
        Ok(match &self.nodes[node] {
            FoNode::Eq(a, b) => get(a)? == get(b)?,
            FoNode::NegEq(a, b) => get(a)? != get(b)?,
            FoNode::Rel(name, args) => {
                let tuple: Vec<usize> = args.iter().map(get).collect::<Result<_, _>>()?;
                self.st.holds(name, &tuple)?
            }
            FoNode::NegRel(name, args) => {
                let tuple: Vec<usize> = args.iter().map(get).collect::<Result<_, _>>()?;
                !self.st.holds(name, &tuple)?
            }
            _ => unreachable!("literal_row is only called on literals"),
        })
    }

    // Maximal satisfying subteam. Every clause is justified by union
    // closure and the empty team property of the logic; the binder and
    // conjunction clauses iterate a shrinking team to their greatest
    // fixpoint.
    fn max_sub(&mut self, node: usize, team: &[u32]) -> Result<Vec<u32>, FoError> {
        if let Some(v) = self.memo[node].get(team) {
            return Ok(v.clone());
        }
        let result = match self.nodes[node].clone() {
            FoNode::Verum => team.to_vec(),
            FoNode::Falsum => Vec::new(),
            FoNode::Eq(..) | FoNode::NegEq(..) | FoNode::Rel(..) | FoNode::NegRel(..) => {
                let mut keep = Vec::new();
                for &id in team {
                    let row = self.rows[id as usize].clone();
                    if self.literal_row(node, &row)? {
                        keep.push(id);
                    }
                }
                keep
            }
            FoNode::Inc(xs, ys) => {
                let mut entries: Vec<(u32, Vec<usize>, Vec<usize>)> = Vec::new();
                for &id in team {
                    let row = &self.rows[id as usize];
                    let tup = |vars: &[String]| -> Result<Vec<usize>, FoError> {
                        vars.iter()
                            .map(|v| {
                                row.get(v)
                                    .copied()
                                    .ok_or_else(|| FoError::FreeVariable(v.clone()))
                            })
                            .collect()
                    };
                    entries.push((id, tup(&xs)?, tup(&ys)?));
                }
                let mut cur: Vec<usize> = (0..entries.len()).collect();
                loop {
                    let values: BTreeSet<&Vec<usize>> =
                        cur.iter().map(|&i| &entries[i].2).collect();
                    let next: Vec<usize> = cur
                        .iter()
                        .copied()
                        .filter(|&i| values.contains(&entries[i].1))
                        .collect();
                    if next == cur {
                        break cur.into_iter().map(|i| entries[i].0).collect();
                    }
                    cur = next;
                }
            }
            FoNode::Or(l, r) => {
                let a = self.max_sub(l, team)?;
                let b = self.max_sub(r, team)?;
                let mut out: Vec<u32> = a.into_iter().chain(b).collect();
                out.sort_unstable();
                out.dedup();
                out
            }
            FoNode::And(l, r) => {
                let mut cur = team.to_vec();
                loop {
                    let a = self.max_sub(l, &cur)?;
                    let b = self.max_sub(r, &a)?;
                    if b == cur {
                        break cur;
                    }
                    cur = b;
                }
            }
            FoNode::Exists(v, body) => {
                let mut cur = team.to_vec();
                loop {
                    let (ext_team, pairs) = self.extend(&cur, &v);
                    let sat: BTreeSet<u32> = self.max_sub(body, &ext_team)?.into_iter().collect();
                    let surviving: BTreeSet<u32> = pairs
                        .iter()
                        .filter(|(e, _)| sat.contains(e))
                        .map(|&(_, o)| o)
                        .collect();
                    let next: Vec<u32> = cur
                        .iter()
                        .copied()
                        .filter(|id| surviving.contains(id))
                        .collect();
                    if next == cur {
                        break cur;
                    }
                    cur = next;
                }
            }
            FoNode::Forall(v, body) => {
                let mut cur = team.to_vec();
                loop {
                    let (ext_team, pairs) = self.extend(&cur, &v);
                    let sat: BTreeSet<u32> = self.max_sub(body, &ext_team)?.into_iter().collect();
                    let doomed: BTreeSet<u32> = pairs
                        .iter()
                        .filter(|(e, _)| !sat.contains(e))
                        .map(|&(_, o)| o)
                        .collect();
                    let next: Vec<u32> = cur
                        .iter()
                        .copied()
                        .filter(|id| !doomed.contains(id))
                        .collect();
                    if next == cur {
                        break cur;
                    }
                    cur = next;
                }
            }
        };
        self.memo[node].insert(team.to_vec(), result.clone());
        Ok(result)
    }

    // All extensions of the team's rows at `v`: the extended team as a
    // sorted deduplicated id vector, plus (extension, origin) pairs.
    // Distinct origins can extend to the same assignment, so the pair
    // list may repeat extension ids.
    fn extend(&mut self, team: &[u32], v: &str) -> (Vec<u32>, Vec<(u32, u32)>) {
        let mut pairs = Vec::new();
        for &id in team {
            for a in 0..self.st.domain_size() {
                let mut row = self.rows[id as usize].clone();
                row.insert(v.to_string(), a);
                let e = self.intern(row);
                pairs.push((e, id));
            }
        }
        let mut ext_team: Vec<u32> = pairs.iter().map(|&(e, _)| e).collect();
        ext_team.sort_unstable();
        ext_team.dedup();
        (ext_team, pairs)
    }
}

fn build_arena(f: &FoFormula, nodes: &mut Vec<FoNode>) -> usize {
    let node = match f {
        FoFormula::Verum => FoNode::Verum,
        FoFormula::Falsum => FoNode::Falsum,
        FoFormula::Eq(a, b) => FoNode::Eq(a.clone(), b.clone()),
        FoFormula::NegEq(a, b) => FoNode::NegEq(a.clone(), b.clone()),
        FoFormula::Rel(n, args) => FoNode::Rel(n.clone(), args.clone()),
        FoFormula::NegRel(n, args) => FoNode::NegRel(n.clone(), args.clone()),
        FoFormula::Inc(xs, ys) => FoNode::Inc(xs.clone(), ys.clone()),
        FoFormula::Or(l, r) => {
            let li = build_arena(l, nodes);
            let ri = build_arena(r, nodes);
            FoNode::Or(li, ri)
        }
        FoFormula::And(l, r) => {
            let li = build_arena(l, nodes);
            let ri = build_arena(r, nodes);
            FoNode::And(li, ri)
        }
        FoFormula::Exists(v, body) => {
            let bi = build_arena(body, nodes);
            FoNode::Exists(v.clone(), bi)
        }
        FoFormula::Forall(v, body) => {
            let bi = build_arena(body, nodes);
            FoNode::Forall(v.clone(), bi)
        }
    };
    nodes.push(node);
    nodes.len() - 1
}

/// Evaluation session for one formula over one structure; memoized
/// subteam results are shared across the teams it evaluates.
pub struct FoSession<'a> {
    ev: FoEvaluator<'a>,
    free: BTreeSet<String>,
    root: usize,
}

impl<'a> FoSession<'a> {
    pub fn new(st: &'a FoStructure, f: &FoFormula) -> FoSession<'a> {
        let ev = FoEvaluator::new(st, f);
        let root = ev.nodes.len() - 1;
        FoSession {
            ev,
            free: f.free_vars(),
            root,
        }
    }

    pub fn eval(&mut self, team: &FoTeam) -> Result<bool, FoError> {
        for v in &self.free {
            if !team.vars.contains(v) {
                return Err(FoError::FreeVariable(v.clone()));
            }
        }
        let mut ids: Vec<u32> = team
            .rows
            .iter()
            .cloned()
            .map(|r| self.ev.intern(r))
            .collect();
        ids.sort_unstable();
        let sat = self.ev.max_sub(self.root, &ids)?;
        Ok(sat.len() == ids.len())
    }
}

/// Whether the structure with this team satisfies the formula, via the
/// maximal-subteam fixpoint evaluator.
pub fn fo_eval(st: &FoStructure, team: &FoTeam, f: &FoFormula) -> Result<bool, FoError> {
    FoSession::new(st, f).eval(team)
}

// ---------------------------------------------------------------------------
// Naive evaluator
// ---------------------------------------------------------------------------

/// Caps for [`fo_eval_naive`]: it enumerates all `(2^|W|-1)^|team|`
/// choice functions at each existential quantifier.
pub const NAIVE_FO_DOMAIN_CAP: usize = 5;
pub const NAIVE_FO_TEAM_CAP: usize = 5;

/// Literal clause-by-clause evaluator: splits for disjunction, choice
/// functions for the existential quantifier. Errors out beyond the caps.
pub fn fo_eval_naive(st: &FoStructure, team: &FoTeam, f: &FoFormula) -> Result<bool, FoError> {
    if st.domain_size() > NAIVE_FO_DOMAIN_CAP {
        return Err(FoError::Bound(format!(
            "domain of size {} exceeds {NAIVE_FO_DOMAIN_CAP}",
            st.domain_size()
        )));
    }
    for v in f.free_vars() {
        if !team.vars.contains(&v) {
            return Err(FoError::FreeVariable(v));
        }
    }
    let rows: Vec<Assignment> = team.rows.iter().cloned().collect();
    naive(st, &rows, f)
}

fn naive(st: &FoStructure, rows: &[Assignment], f: &FoFormula) -> Result<bool, FoError> {
    if rows.len() > NAIVE_FO_TEAM_CAP {
        return Err(FoError::Bound(format!(
            "team of size {} exceeds {NAIVE_FO_TEAM_CAP}",
            rows.len()
        )));
    }
    let literal = |name: &str, args: &[String], row: &Assignment| -> Result<bool, FoError> {
        let tuple: Vec<usize> = args
            .iter()
            .map(|v| {
                row.get(v)
                    .copied()
                    .ok_or_else(|| FoError::FreeVariable(v.clone()))
            })
            .collect::<Result<_, _>>()?;
        st.holds(name, &tuple)
    };
    Ok(match f {
        FoFormula::Verum => true,
        FoFormula::Falsum => rows.is_empty(),
        FoFormula::Eq(a, b) | FoFormula::NegEq(a, b) => {
            let want = matches!(f, FoFormula::Eq(..));
            rows.iter().try_fold(true, |acc, row| {
                let xa = row
                    .get(a)
                    .copied()
                    .ok_or_else(|| FoError::FreeVariable(a.clone()))?;
                let xb = row
                    .get(b)
                    .copied()
                    .ok_or_else(|| FoError::FreeVariable(b.clone()))?;
                Ok::<bool, FoError>(acc && ((xa == xb) == want))
            })?
        }
        FoFormula::Rel(name, args) => {
            let mut ok = true;
            for row in rows {
                if !literal(name, args, row)? {
                    ok = false;
                    break;
                }
            }
            ok
        }
        FoFormula::NegRel(name, args) => {
            let mut ok = true;
            for row in rows {
                if literal(name, args, row)? {
                    ok = false;
                    break;
                }
            }
            ok
        }
        FoFormula::Inc(xs, ys) => {
            let tuple = |row: &Assignment, vars: &[String]| -> Result<Vec<usize>, FoError> {
                vars.iter()
                    .map(|v| {
                        row.get(v)
                            .copied()
                            .ok_or_else(|| FoError::FreeVariable(v.clone()))
                    })
                    .collect()
            };
            let mut ok = true;
            'rows: for row in rows {
                let want = tuple(row, xs)?;
                for other in rows {
                    if tuple(other, ys)? == want {
                        continue 'rows;
                    }
                }
                ok = false;
                break;
            }
            ok
        }
        FoFormula::Or(l, r) => {
            let n = rows.len();
            let mut found = false;
            'split: for mask_l in 0u32..1 << n {
                for fill in 0u32..1 << n {
                    let mask_r = !mask_l & ((1 << n) - 1) | (fill & mask_l);
                    let pick = |mask: u32| -> Vec<Assignment> {
                        rows.iter()
                            .enumerate()
                            .filter(|(i, _)| mask >> i & 1 == 1)
                            .map(|(_, r)| r.clone())
                            .collect()
                    };
                    if naive(st, &pick(mask_l), l)? && naive(st, &pick(mask_r), r)? {
                        found = true;
                        break 'split;
                    }
                }
            }
            found
        }
        FoFormula::And(l, r) => naive(st, rows, l)? && naive(st, rows, r)?,
        FoFormula::Exists(v, body) => {
            if rows.is_empty() {
                return naive(st, rows, body);
            }
            let w = st.domain_size();
            let choices = (1usize << w) - 1;
            let mut counters = vec![1usize; rows.len()];
            let mut found = false;
            'functions: loop {
                let mut ext: BTreeSet<Assignment> = BTreeSet::new();
                for (row, &choice) in rows.iter().zip(&counters) {
                    for a in 0..w {
                        if choice >> a & 1 == 1 {
                            let mut r = row.clone();
                            r.insert(v.clone(), a);
                            ext.insert(r);
                        }
                    }
                }
                let ext_rows: Vec<Assignment> = ext.into_iter().collect();
                if naive(st, &ext_rows, body)? {
                    found = true;
                    break 'functions;
                }
                // Advance the tuple of nonempty subsets.
                for c in counters.iter_mut() {
                    if *c < choices {
                        *c += 1;
                        continue 'functions;
                    }
                    *c = 1;
                }
                break;
            }
            found
        }
        FoFormula::Forall(v, body) => {
            let mut ext: BTreeSet<Assignment> = BTreeSet::new();
            for row in rows {
                for a in 0..st.domain_size() {
                    let mut r = row.clone();
                    r.insert(v.clone(), a);
                    ext.insert(r);
                }
            }
            let ext_rows: Vec<Assignment> = ext.into_iter().collect();
            naive(st, &ext_rows, body)?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::example_one;
    use crate::syntax::parse_any;

    fn f(s: &str) -> Formula {
        parse_any(s).unwrap()
    }

    #[test]
    fn translation_examples() {
        assert_eq!(st_translate(&f("p"), "x").unwrap().to_string(), "P(x)");
        assert_eq!(
            st_translate(&f("<>p"), "x").unwrap().to_string(),
            "Exists(y, And(R(x,y), P(y)))"
        );
        assert_eq!(
            st_translate(&f("[]p"), "x").unwrap().to_string(),
            "Forall(y, Or(Neg(R(x,y)), And(R(x,y), P(y))))"
        );
        // Negation is pushed through to atoms.
        assert_eq!(
            st_translate(&f("!(p & q)"), "x").unwrap().to_string(),
            "Or(Neg(P(x)), Neg(Q(x)))"
        );
        assert_eq!(
            st_translate(&f("!<>p"), "x").unwrap().to_string(),
            "Forall(y, Or(Neg(R(x,y)), And(R(x,y), Neg(P(y)))))"
        );
        // Unary top inclusion: two truth-constant branches.
        assert_eq!(
            st_translate(&f("top <= p"), "x").unwrap().to_string(),
            "And(Or(Forall(z, Neg(Eq(z,z))), Exists(y, And(Inc([y], [x]), P(y)))), \
             Or(Forall(z, Eq(z,z)), Exists(y1, And(Inc([y1], [x]), Neg(P(y1))))))"
        );
        assert!(matches!(
            st_translate(&f("might p"), "x"),
            Err(FoError::UnsupportedConnective(_))
        ));
    }

    #[test]
    fn lift_team_examples() {
        let m = example_one();
        let t = lift_team(&m, &Team::parse("u,v"), "x").unwrap();
        assert_eq!(t.len(), 2);
        let t = lift_team(&m, &Team::empty(), "x").unwrap();
        assert!(t.is_empty());
        let t = lift_team(&m, &Team::parse("v'"), "y").unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(
            t.rows().iter().next().unwrap(),
            &BTreeMap::from([("y".to_string(), m.world_index("v'").unwrap())])
        );
    }

    #[test]
    fn empty_team_satisfies_translations() {
        let m = example_one();
        let st = FoStructure::from_kripke(&m).unwrap();
        let empty = lift_team(&m, &Team::empty(), "x").unwrap();
        for s in ["p", "top <= p", "<>(top <= p)", "[]!p"] {
            let tr = st_translate(&f(s), "x").unwrap();
            assert!(fo_eval(&st, &empty, &tr).unwrap(), "empty team vs {s}");
            assert!(fo_eval_naive(&st, &empty, &tr).unwrap(), "naive empty vs {s}");
        }
    }

    #[test]
    fn cross_check_on_example_model() {
        let m = example_one();
        let st = FoStructure::from_kripke(&m).unwrap();
        let tr = st_translate(&f("<>(top<=p)"), "x").unwrap();
        let yes = lift_team(&m, &Team::parse("u,v"), "x").unwrap();
        let no = lift_team(&m, &Team::parse("u"), "x").unwrap();
        assert!(fo_eval(&st, &yes, &tr).unwrap());
        assert!(!fo_eval(&st, &no, &tr).unwrap());
    }

    // The naive evaluator's caps keep it to very small instances: the
    // universal quantifier alone multiplies team size by the domain
    // size, so a two-world model is as big as it goes with modalities.
    #[test]
    fn fixpoint_matches_naive_on_small_instances() {
        let m = KripkeModel::new(
            vec!["a".into(), "b".into()],
            vec![("a".into(), "b".into()), ("b".into(), "b".into())],
            BTreeMap::from([("p".into(), vec!["b".into()])]),
        )
        .unwrap();
        let st = FoStructure::from_kripke(&m).unwrap();
        let formulas = ["p", "!p", "top <= p", "bot <= p", "p | !p", "<>p", "[]p", "<>!p"];
        let teams = ["", "a", "b", "a,b"];
        for s in formulas {
            let tr = st_translate(&f(s), "x").unwrap();
            for tspec in teams {
                let team = lift_team(&m, &Team::parse(tspec), "x").unwrap();
                assert_eq!(
                    fo_eval(&st, &team, &tr).unwrap(),
                    fo_eval_naive(&st, &team, &tr).unwrap(),
                    "{s} on {{{tspec}}}"
                );
            }
        }
    }

    #[test]
    fn flatness_of_translated_classical_formulas() {
        let m = example_one();
        let st = FoStructure::from_kripke(&m).unwrap();
        for s in ["p", "!p", "<>p", "[]!p", "p | !p"] {
            let tr = st_translate(&f(s), "x").unwrap();
            let whole = lift_team(&m, &m.universe(), "x").unwrap();
            let all_single = m.worlds().iter().all(|w| {
                let single = lift_team(&m, &Team::new([w.clone()]), "x").unwrap();
                fo_eval(&st, &single, &tr).unwrap()
            });
            assert_eq!(fo_eval(&st, &whole, &tr).unwrap(), all_single, "{s}");
        }
    }

    #[test]
    fn naive_cap_errors() {
        let worlds: Vec<String> = (0..6).map(|i| format!("w{i}")).collect();
        let m = KripkeModel::new(worlds, vec![], Default::default()).unwrap();
        let st = FoStructure::from_kripke(&m).unwrap();
        let team = lift_team(&m, &m.universe(), "x").unwrap();
        let tr = FoFormula::Eq("x".into(), "x".into());
        assert!(matches!(
            fo_eval_naive(&st, &team, &tr),
            Err(FoError::Bound(_))
        ));
        assert!(fo_eval(&st, &team, &tr).unwrap());
    }

    #[test]
    fn free_variable_errors() {
        let m = example_one();
        let st = FoStructure::from_kripke(&m).unwrap();
        let team = lift_team(&m, &Team::parse("u"), "x").unwrap();
        let tr = FoFormula::Rel("P".into(), vec!["z".into()]);
        assert!(matches!(
            fo_eval(&st, &team, &tr),
            Err(FoError::FreeVariable(_))
        ));
    }
}
