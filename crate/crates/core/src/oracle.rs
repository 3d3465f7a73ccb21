//! Brute-force semantics used to cross-check the tableau and the engine.
//!
//! Satisfiability is decided by enumerating rooted tree models of bounded
//! depth and branching. Rather than materialising every tree, the search
//! works on truth profiles: the set of NNF subformulas true at a world. A
//! world's profile depends only on its valuation and on the AND/OR of its
//! children's profiles, so the profiles reachable at height `h` are built
//! from those at height `h - 1`. For T each world also sees itself.

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::semantics::{KripkeModel, Reasoner, SystemId};

pub const DEFAULT_ORACLE_BUDGET: usize = 5_000_000;

/// Size limits for tree-model enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleBounds {
    pub max_depth: usize,
    pub max_branching: usize,
    pub variables: Vec<String>,
    /// Upper bound on elementary enumeration steps.
    pub budget: usize,
}

impl OracleBounds {
    pub fn new(max_depth: usize, max_branching: usize, variables: Vec<String>) -> OracleBounds {
        OracleBounds {
            max_depth,
            max_branching,
            variables,
            budget: DEFAULT_ORACLE_BUDGET,
        }
    }

    /// Bounds under which "unsat within bounds" is a definitive answer for
    /// `f`: depth = modal depth, branching = number of distinct
    /// `<>`-subformulas of the NNF.
    pub fn sufficient_for(f: &Formula) -> OracleBounds {
        let g = f.nnf();
        let mut dias = BTreeSet::new();
        collect_dias(&g, &mut dias);
        OracleBounds::new(g.modal_depth(), dias.len(), g.vars().into_iter().collect())
    }

    pub fn covers(&self, f: &Formula) -> bool {
        let need = OracleBounds::sufficient_for(f);
        self.max_depth >= need.max_depth
            && self.max_branching >= need.max_branching
            && need.variables.iter().all(|v| self.variables.contains(v))
    }
}

fn collect_dias(f: &Formula, out: &mut BTreeSet<Formula>) {
    match f {
        Formula::Dia(c) => {
            out.insert(f.clone());
            collect_dias(c, out);
        }
        Formula::Box(c) | Formula::Not(c) => collect_dias(c, out),
        Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| collect_dias(c, out)),
        _ => {}
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    /// A tree model (reflexive for T) and its root.
    Sat(KripkeModel, usize),
    UnsatWithinBounds,
}

impl OracleOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, OracleOutcome::Sat(..))
    }
}

/// Subformulas of an NNF formula, children before parents.
struct Table {
    subs: Vec<Formula>,
    kind: Vec<Kind>,
    /// Bits of formulas that occur under a modal operator.
    body_mask: u128,
}

enum Kind {
    Atom(Option<usize>, bool),
    True,
    False,
    And(Vec<usize>),
    Or(Vec<usize>),
    Box(usize),
    Dia(usize),
}

impl Table {
    fn build(f: &Formula, vars: &[String]) -> Result<(Table, usize)> {
        let mut t = Table {
            subs: Vec::new(),
            kind: Vec::new(),
            body_mask: 0,
        };
        let mut index = HashMap::new();
        let root = t.add(f, vars, &mut index)?;
        Ok((t, root))
    }

    fn add(&mut self, f: &Formula, vars: &[String], index: &mut HashMap<Formula, usize>) -> Result<usize> {
        if let Some(&i) = index.get(f) {
            return Ok(i);
        }
        let kind = match f {
            Formula::Var(n) => Kind::Atom(vars.iter().position(|v| v == n), true),
            Formula::Not(c) => match &**c {
                Formula::Var(n) => Kind::Atom(vars.iter().position(|v| v == n), false),
                _ => unreachable!("NNF expected"),
            },
            Formula::True => Kind::True,
            Formula::False => Kind::False,
            Formula::And(cs) => Kind::And(cs.iter().map(|c| self.add(c, vars, index)).collect::<Result<_>>()?),
            Formula::Or(cs) => Kind::Or(cs.iter().map(|c| self.add(c, vars, index)).collect::<Result<_>>()?),
            Formula::Box(c) => {
                let i = self.add(c, vars, index)?;
                self.body_mask |= 1 << i;
                Kind::Box(i)
            }
            Formula::Dia(c) => {
                let i = self.add(c, vars, index)?;
                self.body_mask |= 1 << i;
                Kind::Dia(i)
            }
        };
        let i = self.subs.len();
        if i >= 128 {
            return Err(Error::SizeCap {
                what: "oracle subformulas",
                limit: 128,
            });
        }
        self.subs.push(f.clone());
        self.kind.push(kind);
        index.insert(f.clone(), i);
        Ok(i)
    }

    /// Profile of a world with valuation `val` whose successors' profiles
    /// have conjunction `all` and disjunction `any` (`all` is all-ones when
    /// there is no successor).
    fn profile(&self, val: u32, all: u128, any: u128, reflexive: bool) -> u128 {
        let mut m: u128 = 0;
        for (i, k) in self.kind.iter().enumerate() {
            let bit = |j: usize| m >> j & 1 == 1;
            let v = match k {
                Kind::Atom(Some(a), pos) => (val >> a & 1 == 1) == *pos,
                Kind::Atom(None, pos) => !pos,
                Kind::True => true,
                Kind::False => false,
                Kind::And(cs) => cs.iter().all(|&c| bit(c)),
                Kind::Or(cs) => cs.iter().any(|&c| bit(c)),
                Kind::Box(c) => all >> c & 1 == 1 && (!reflexive || bit(*c)),
                Kind::Dia(c) => any >> c & 1 == 1 || (reflexive && bit(*c)),
            };
            if v {
                m |= 1 << i;
            }
        }
        m
    }
}

struct Found {
    val: u32,
    children: Vec<usize>,
}

/// Decides satisfiability of `f` over tree models within `b`.
///
/// Models are produced by increasing height; within a height, by number of
/// children and then by valuation (as a binary number over `b.variables`).
pub fn sat_by_enumeration(f: &Formula, sys: SystemId, b: &OracleBounds) -> Result<OracleOutcome> {
    let g = f.nnf();
    if b.variables.len() > 20 {
        return Err(Error::SizeCap {
            what: "oracle variables",
            limit: 20,
        });
    }
    let (table, root) = Table::build(&g, &b.variables)?;
    let reflexive = sys == SystemId::T;
    let nvals: u32 = 1 << b.variables.len();
    let mut steps = 0usize;
    let mut tick = |n: usize| -> Result<()> {
        steps += n;
        if steps > b.budget {
            return Err(Error::OracleBudget { budget: b.budget });
        }
        Ok(())
    };

    let mut masks: Vec<u128> = Vec::new();
    let mut found: Vec<Found> = Vec::new();
    let mut seen: HashMap<u128, usize> = HashMap::new();
    for height in 0..=b.max_depth {
        // Reachable (AND, OR) summaries of at most `max_branching` children
        // drawn from the profiles known so far, each with one realisation.
        let mut summaries: Vec<((u128, u128), Vec<usize>)> = vec![((u128::MAX, 0), Vec::new())];
        if height > 0 {
            let mut classes: Vec<(u128, usize)> = Vec::new();
            let mut class_seen = HashMap::new();
            for (id, &m) in masks.iter().enumerate() {
                let proj = m & table.body_mask;
                class_seen.entry(proj).or_insert_with(|| {
                    classes.push((proj, id));
                    id
                });
            }
            let mut known: HashMap<(u128, u128), usize> = HashMap::from([((u128::MAX, 0), 0)]);
            let mut layer: Vec<usize> = vec![0];
            for _ in 0..b.max_branching {
                let mut next_layer = Vec::new();
                for &s in &layer {
                    tick(classes.len())?;
                    for &(proj, id) in &classes {
                        let ((a, o), ref kids) = summaries[s];
                        let key = (a & proj, o | proj);
                        if known.contains_key(&key) {
                            continue;
                        }
                        let mut kids = kids.clone();
                        kids.push(id);
                        known.insert(key, summaries.len());
                        next_layer.push(summaries.len());
                        summaries.push((key, kids));
                    }
                }
                if next_layer.is_empty() {
                    break;
                }
                layer = next_layer;
            }
        }
        let before = masks.len();
        for ((all, any), kids) in &summaries {
            tick(nvals as usize)?;
            for val in 0..nvals {
                let m = table.profile(val, *all, *any, reflexive);
                if seen.contains_key(&m) {
                    continue;
                }
                seen.insert(m, masks.len());
                masks.push(m);
                found.push(Found {
                    val,
                    children: kids.clone(),
                });
            }
        }
        if let Some(id) = masks[before..].iter().position(|m| m >> root & 1 == 1) {
            let model = materialise(before + id, &found, &b.variables);
            return Ok(OracleOutcome::Sat(model.for_system(sys), 0));
        }
        if masks.len() == before {
            break;
        }
    }
    Ok(OracleOutcome::UnsatWithinBounds)
}

fn materialise(id: usize, found: &[Found], vars: &[String]) -> KripkeModel {
    fn walk(id: usize, found: &[Found], vars: &[String], m: &mut KripkeModel) -> usize {
        let f = &found[id];
        let atoms = vars
            .iter()
            .enumerate()
            .filter(|(i, _)| f.val >> i & 1 == 1)
            .map(|(_, v)| v.clone());
        let w = m.add_world(atoms);
        for &c in &f.children {
            let u = walk(c, found, vars, m);
            m.add_edge(w, u);
        }
        w
    }
    let mut m = KripkeModel::new(0);
    walk(id, found, vars, &mut m);
    m
}

/// Shape limits for enumerated clauses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseVocabulary {
    pub variables: Vec<String>,
    pub max_disjuncts: usize,
    pub max_depth: usize,
}

impl ClauseVocabulary {
    /// Literals `a`, `~a`, and for each extra level `[]l`, `<>l` over the
    /// literals of the level below.
    pub fn literals(&self) -> Vec<Formula> {
        let mut level: Vec<Formula> = Vec::new();
        for v in &self.variables {
            level.push(Formula::var(v.clone()));
            level.push(Formula::not(Formula::var(v.clone())));
        }
        let mut all = level.clone();
        for _ in 0..self.max_depth {
            let mut next = Vec::new();
            for l in &level {
                next.push(Formula::boxed(l.clone()));
                next.push(Formula::dia(l.clone()));
            }
            all.extend(next.iter().cloned());
            level = next;
        }
        all
    }

    /// Every clause of 1..=max_disjuncts distinct literals, in a fixed order.
    pub fn clauses(&self) -> Vec<Formula> {
        let lits = self.literals();
        let mut out = Vec::new();
        let mut pick = Vec::new();
        fn rec(lits: &[Formula], start: usize, left: usize, pick: &mut Vec<Formula>, out: &mut Vec<Formula>) {
            if !pick.is_empty() {
                out.push(Formula::or(pick.iter().cloned()));
            }
            if left == 0 {
                return;
            }
            for i in start..lits.len() {
                pick.push(lits[i].clone());
                rec(lits, i + 1, left - 1, pick, out);
                pick.pop();
            }
        }
        rec(&lits, 0, self.max_disjuncts, &mut pick, &mut out);
        out
    }
}

/// Clauses of the vocabulary entailed by `x` modulo `theory`.
pub fn enumerate_implicates(
    reasoner: &Reasoner,
    x: &Formula,
    theory: &Formula,
    sys: SystemId,
    vocab: &ClauseVocabulary,
) -> Result<Vec<Formula>> {
    let mut out = Vec::new();
    for c in vocab.clauses() {
        if reasoner.entails_mod(x, theory, &c, sys)? {
            out.push(c);
        }
    }
    Ok(out)
}

/// Formula lists for the seven-part unsatisfiability decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionInstance {
    pub alpha: Vec<Formula>,
    pub beta: Vec<Formula>,
    pub gamma: Vec<Formula>,
    pub psi: Vec<Formula>,
    pub phi: Vec<Formula>,
    pub xi: Vec<Formula>,
    pub y: Formula,
}

impl Default for DecompositionInstance {
    fn default() -> Self {
        DecompositionInstance {
            alpha: Vec::new(),
            beta: Vec::new(),
            gamma: Vec::new(),
            psi: Vec::new(),
            phi: Vec::new(),
            xi: Vec::new(),
            y: Formula::True,
        }
    }
}

impl DecompositionInstance {
    /// `(∨a) ∧ (∨<>b) ∧ (∨[]g) ∧` the three pairwise and the full
    /// disjunctions `∧ ψ.. ∧ []φ.. ∧ <>ξ..`.
    pub fn left_side(&self) -> Formula {
        let a = Formula::or(self.alpha.iter().cloned());
        let b = Formula::or(self.beta.iter().cloned().map(Formula::dia));
        let g = Formula::or(self.gamma.iter().cloned().map(Formula::boxed));
        Formula::and(
            [
                a.clone(),
                b.clone(),
                g.clone(),
                Formula::or([a.clone(), b.clone()]),
                Formula::or([a.clone(), g.clone()]),
                Formula::or([b.clone(), g.clone()]),
                Formula::or([a, b, g]),
            ]
            .into_iter()
            .chain(self.psi.iter().cloned())
            .chain(self.phi.iter().cloned().map(Formula::boxed))
            .chain(self.xi.iter().cloned().map(Formula::dia)),
        )
    }

    /// The seven conditions, in order. Conditions 3 and 5 hold when they hold
    /// for some `ξ_u`; with no `ξ` they are false.
    pub fn conditions(&self, reasoner: &Reasoner, sys: SystemId) -> Result<[bool; 7]> {
        let a = Formula::or(self.alpha.iter().cloned());
        let b = Formula::or(self.beta.iter().cloned());
        let g = Formula::or(self.gamma.iter().cloned());
        let psi = Formula::and(self.psi.iter().cloned());
        let phi = Formula::and(self.phi.iter().cloned());
        let unsat = |f: Formula| -> Result<bool> { reasoner.entails_mod(&f, &self.y, &Formula::False, sys) };
        let some_xi = |body: &Formula| -> Result<bool> {
            for x in &self.xi {
                if unsat(Formula::and([body.clone(), x.clone(), phi.clone()]))? {
                    return Ok(true);
                }
            }
            Ok(false)
        };
        Ok([
            unsat(Formula::and([a.clone(), psi]))?,
            unsat(Formula::and([b.clone(), phi.clone()]))?,
            some_xi(&g)?,
            unsat(Formula::and([Formula::or([a.clone(), b.clone()]), phi.clone()]))?,
            some_xi(&Formula::or([a.clone(), g.clone()]))?,
            unsat(Formula::and([Formula::or([b.clone(), g.clone()]), phi.clone()]))?,
            unsat(Formula::and([Formula::or([a, b, g]), phi]))?,
        ])
    }
}

/// Whether the left side is unsatisfiable modulo `[]y` exactly when one of
/// the seven conditions holds.
pub fn check_decomposition(inst: &DecompositionInstance, reasoner: &Reasoner, sys: SystemId) -> Result<bool> {
    for f in inst.alpha.iter().chain(&inst.psi).chain(std::iter::once(&inst.y)) {
        if !f.is_propositional() {
            return Err(Error::NotPropositional(f.to_string()));
        }
    }
    let lhs = reasoner.entails_mod(
        &inst.left_side(),
        &Formula::boxed(inst.y.clone()),
        &Formula::False,
        sys,
    )?;
    let rhs = inst.conditions(reasoner, sys)?.iter().any(|&c| c);
    Ok(lhs == rhs)
}

/// `φ ≡ ψ`, `<>φ ≡ <>ψ` and `[]φ ≡ []ψ` all agree.
pub fn box_dia_equivalence_agrees(r: &Reasoner, phi: &Formula, psi: &Formula, sys: SystemId) -> Result<bool> {
    let a = r.equivalent(phi, psi, sys)?;
    let b = r.equivalent(&Formula::dia(phi.clone()), &Formula::dia(psi.clone()), sys)?;
    let c = r.equivalent(&Formula::boxed(phi.clone()), &Formula::boxed(psi.clone()), sys)?;
    Ok(a == b && b == c)
}

/// `ψ ⊨_y χ`, `y ⊨ ~ψ | χ` and unsatisfiability of `ψ & ~χ & y` agree.
pub fn theory_entailment_forms_agree(
    r: &Reasoner,
    psi: &Formula,
    chi: &Formula,
    y: &Formula,
    sys: SystemId,
) -> Result<bool> {
    let a = r.entails_mod(psi, y, chi, sys)?;
    let b = r.entails(y, &Formula::or([Formula::not(psi.clone()), chi.clone()]), sys)?;
    let c = !r.is_satisfiable(&Formula::and([psi.clone(), Formula::not(chi.clone()), y.clone()]), sys)?;
    Ok(a == b && b == c)
}

/// `ψ ⊨_y χ`, `<>ψ ⊨_[]y <>χ` and `[]ψ ⊨_[]y []χ` agree.
pub fn modal_transfer_agrees(
    r: &Reasoner,
    psi: &Formula,
    chi: &Formula,
    y: &Formula,
    sys: SystemId,
) -> Result<bool> {
    let by = Formula::boxed(y.clone());
    let a = r.entails_mod(psi, y, chi, sys)?;
    let b = r.entails_mod(&Formula::dia(psi.clone()), &by, &Formula::dia(chi.clone()), sys)?;
    let c = r.entails_mod(&Formula::boxed(psi.clone()), &by, &Formula::boxed(chi.clone()), sys)?;
    Ok(a == b && b == c)
}

pub fn var_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("p{i}")).collect()
}

/// A random formula with at most `depth` nested modalities.
pub fn random_formula<R: Rng>(rng: &mut R, vars: &[String], depth: usize, size: usize) -> Formula {
    if size <= 1 || rng.gen_bool(0.15) {
        let v = Formula::var(vars.choose(rng).expect("variables").clone());
        return if rng.gen_bool(0.5) { v } else { Formula::not(v) };
    }
    let choices = if depth == 0 { 3 } else { 5 };
    match rng.gen_range(0..choices) {
        0 => Formula::not(random_formula(rng, vars, depth, size - 1)),
        1 | 2 => {
            let left = rng.gen_range(1..size);
            let a = random_formula(rng, vars, depth, left);
            let b = random_formula(rng, vars, depth, size - left);
            if rng.gen_bool(0.5) {
                Formula::and([a, b])
            } else {
                Formula::or([a, b])
            }
        }
        3 => Formula::boxed(random_formula(rng, vars, depth - 1, size - 1)),
        _ => Formula::dia(random_formula(rng, vars, depth - 1, size - 1)),
    }
}

pub fn random_prop_literal<R: Rng>(rng: &mut R, vars: &[String]) -> Formula {
    let v = Formula::var(vars.choose(rng).expect("variables").clone());
    if rng.gen_bool(0.5) {
        v
    } else {
        Formula::not(v)
    }
}

/// A random modal literal whose body has depth below `depth`.
pub fn random_literal<R: Rng>(rng: &mut R, vars: &[String], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.4) {
        return random_prop_literal(rng, vars);
    }
    let body_size = rng.gen_range(1..=3);
    let body = random_formula(rng, vars, depth - 1, body_size);
    if rng.gen_bool(0.5) {
        Formula::boxed(body)
    } else {
        Formula::dia(body)
    }
}

/// A random clause of 1..=max_len literals.
pub fn random_clause<R: Rng>(rng: &mut R, vars: &[String], depth: usize, max_len: usize) -> Formula {
    let n = rng.gen_range(1..=max_len);
    Formula::or((0..n).map(|_| random_literal(rng, vars, depth)))
}

pub fn random_prop_clause<R: Rng>(rng: &mut R, vars: &[String], max_len: usize) -> Formula {
    let n = rng.gen_range(1..=max_len);
    Formula::or((0..n).map(|_| random_prop_literal(rng, vars)))
}

/// `x` and `y` with `x ⊨ y`, `y` propositional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub x: Formula,
    pub y: Formula,
}

/// `x` is a conjunction of at most `max_clauses` clauses, at least one of
/// them propositional; `y` is a nonempty subset of the propositional ones.
pub fn random_instance<R: Rng>(rng: &mut R, nvars: usize, depth: usize, max_clauses: usize) -> Instance {
    let vars = var_names(nvars);
    let n = rng.gen_range(1..=max_clauses.max(1));
    let mut prop = vec![random_prop_clause(rng, &vars, 2)];
    let mut rest = Vec::new();
    for _ in 1..n {
        if rng.gen_bool(0.3) {
            prop.push(random_prop_clause(rng, &vars, 2));
        } else {
            rest.push(random_clause(rng, &vars, depth, 2));
        }
    }
    if depth > 0 && rest.is_empty() && n > 1 {
        rest.push(random_clause(rng, &vars, depth, 1));
    }
    let keep: Vec<Formula> = prop.iter().filter(|_| rng.gen_bool(0.7)).cloned().collect();
    let y = if keep.is_empty() { prop[0].clone() } else { Formula::and(keep) };
    Instance {
        x: Formula::and(prop.into_iter().chain(rest)),
        y,
    }
}

/// `x ⊨ y ⊨ y_weak`: `y_weak` keeps a random subset of `y`'s conjuncts.
pub fn random_chain<R: Rng>(rng: &mut R, nvars: usize, depth: usize, max_clauses: usize) -> (Instance, Formula) {
    let inst = random_instance(rng, nvars, depth, max_clauses);
    let weak = Formula::and(inst.y.conjuncts().iter().filter(|_| rng.gen_bool(0.5)).cloned());
    (inst, weak)
}
