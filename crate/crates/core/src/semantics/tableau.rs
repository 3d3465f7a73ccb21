//! Labelled tableau for K and T.
//!
//! Formulas are put in NNF and hash-consed into an arena, so a world label is
//! a sorted list of node ids. Each world is saturated propositionally
//! (branching on disjunctions), then every `<>d` spawns a successor labelled
//! `{d} ∪ {b : []b at the world}`. In T, `[]b` also adds `b` to the current
//! world.
//!
//! Local satisfiability terminates because successor labels have strictly
//! smaller modal depth. Satisfiability under a global assumption adds the
//! assumption to every label and needs the ancestor check: a world whose
//! label is contained in an ancestor's label is closed by an edge back to it.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;
use std::sync::atomic::{AtomicU64, Ordering};

use super::{KripkeModel, SystemId};
use crate::error::{Error, Result};
use crate::formula::Formula;

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

type Id = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    Lit(u32, bool),
    True,
    False,
    And(Vec<Id>),
    Or(Vec<Id>),
    Box(Id),
    Dia(Id),
}

#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
    index: HashMap<Node, Id>,
    atoms: Vec<String>,
    atom_index: HashMap<String, u32>,
}

impl Arena {
    fn atom(&mut self, name: &str) -> u32 {
        if let Some(&a) = self.atom_index.get(name) {
            return a;
        }
        let a = self.atoms.len() as u32;
        self.atoms.push(name.to_string());
        self.atom_index.insert(name.to_string(), a);
        a
    }

    fn insert(&mut self, node: Node) -> Id {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len() as Id;
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    /// `f` must be in NNF.
    fn intern(&mut self, f: &Formula) -> Id {
        let node = match f {
            Formula::Var(n) => Node::Lit(self.atom(n), true),
            Formula::Not(c) => match &**c {
                Formula::Var(n) => Node::Lit(self.atom(n), false),
                other => unreachable!("not in NNF: ~{other}"),
            },
            Formula::True => Node::True,
            Formula::False => Node::False,
            Formula::And(cs) => Node::And(cs.iter().map(|c| self.intern(c)).collect()),
            Formula::Or(cs) => Node::Or(cs.iter().map(|c| self.intern(c)).collect()),
            Formula::Box(c) => Node::Box(self.intern(c)),
            Formula::Dia(c) => Node::Dia(self.intern(c)),
        };
        self.insert(node)
    }
}

/// Witness tree read off an open branch.
struct WorldTree {
    atoms: Vec<u32>,
    children: Vec<Rc<WorldTree>>,
}

#[derive(Clone)]
struct Branch {
    todo: Vec<Id>,
    seen: HashSet<Id>,
    pos: HashSet<u32>,
    neg: HashSet<u32>,
    dias: Vec<Id>,
    boxes: Vec<Id>,
    ors: Vec<Id>,
}

impl Branch {
    fn new(label: &[Id]) -> Branch {
        Branch {
            todo: label.to_vec(),
            seen: HashSet::new(),
            pos: HashSet::new(),
            neg: HashSet::new(),
            dias: Vec::new(),
            boxes: Vec::new(),
            ors: Vec::new(),
        }
    }
}

struct Search<'a> {
    arena: &'a Arena,
    sys: SystemId,
    global: Vec<Id>,
    budget: u64,
    used: u64,
    memo: HashMap<Vec<Id>, Option<Rc<WorldTree>>>,
    ancestors: Vec<Vec<Id>>,
}

impl Search<'_> {
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.budget {
            return Err(Error::NodeBudget {
                budget: self.budget,
            });
        }
        Ok(())
    }

    fn blocking(&self) -> bool {
        !self.global.is_empty()
    }

    fn world(&mut self, mut label: Vec<Id>) -> Result<Option<Rc<WorldTree>>> {
        label.sort_unstable();
        label.dedup();
        if let Some(hit) = self.memo.get(&label) {
            return Ok(hit.clone());
        }
        self.tick()?;
        if self.blocking() && self.ancestors.iter().any(|a| is_subset(&label, a)) {
            return Ok(Some(Rc::new(WorldTree {
                atoms: Vec::new(),
                children: Vec::new(),
            })));
        }
        self.ancestors.push(label.clone());
        let result = self.expand(Branch::new(&label));
        self.ancestors.pop();
        let result = result?;
        // Under blocking an open result may rely on an ancestor that is still
        // being decided, so only closed results are reusable.
        if !self.blocking() || result.is_none() {
            self.memo.insert(label, result.clone());
        }
        Ok(result)
    }

    fn expand(&mut self, mut b: Branch) -> Result<Option<Rc<WorldTree>>> {
        let nodes = &self.arena.nodes;
        loop {
            while let Some(id) = b.todo.pop() {
                if !b.seen.insert(id) {
                    continue;
                }
                self.tick()?;
                match &nodes[id as usize] {
                    Node::True => {}
                    Node::False => return Ok(None),
                    Node::Lit(a, true) => {
                        if b.neg.contains(a) {
                            return Ok(None);
                        }
                        b.pos.insert(*a);
                    }
                    Node::Lit(a, false) => {
                        if b.pos.contains(a) {
                            return Ok(None);
                        }
                        b.neg.insert(*a);
                    }
                    Node::And(cs) => b.todo.extend(cs.iter().copied()),
                    Node::Or(_) => b.ors.push(id),
                    Node::Box(c) => {
                        b.boxes.push(*c);
                        if self.sys == SystemId::T {
                            b.todo.push(*c);
                        }
                    }
                    Node::Dia(c) => b.dias.push(*c),
                }
            }

            // Disjunctions: drop satisfied ones, propagate units, else branch.
            let mut split: Option<Vec<Id>> = None;
            let mut progressed = false;
            for &o in &b.ors {
                let Node::Or(cs) = &nodes[o as usize] else {
                    unreachable!()
                };
                if cs.iter().any(|c| b.seen.contains(c)) {
                    continue;
                }
                let alive: Vec<Id> = cs
                    .iter()
                    .copied()
                    .filter(|&c| match nodes[c as usize] {
                        Node::Lit(a, true) => !b.neg.contains(&a),
                        Node::Lit(a, false) => !b.pos.contains(&a),
                        Node::False => false,
                        _ => true,
                    })
                    .collect();
                match alive.len() {
                    0 => return Ok(None),
                    1 => {
                        b.todo.push(alive[0]);
                        progressed = true;
                        break;
                    }
                    _ if split.is_none() => split = Some(alive),
                    _ => {}
                }
            }
            if progressed {
                continue;
            }
            if let Some(alive) = split {
                for c in alive {
                    let mut nb = b.clone();
                    nb.todo.push(c);
                    if let Some(t) = self.expand(nb)? {
                        return Ok(Some(t));
                    }
                }
                return Ok(None);
            }
            break;
        }

        let mut dias = b.dias.clone();
        dias.sort_unstable();
        dias.dedup();
        let mut children = Vec::with_capacity(dias.len());
        for d in dias {
            let mut label = Vec::with_capacity(1 + b.boxes.len() + self.global.len());
            label.push(d);
            label.extend(b.boxes.iter().copied());
            label.extend(self.global.iter().copied());
            match self.world(label)? {
                Some(t) => children.push(t),
                None => return Ok(None),
            }
        }
        let mut atoms: Vec<u32> = b.pos.into_iter().collect();
        atoms.sort_unstable();
        Ok(Some(Rc::new(WorldTree { atoms, children })))
    }
}

fn is_subset(small: &[Id], big: &[Id]) -> bool {
    // both sorted
    let mut j = 0;
    for x in small {
        while j < big.len() && big[j] < *x {
            j += 1;
        }
        if j == big.len() || big[j] != *x {
            return false;
        }
    }
    true
}

fn build_model(tree: &WorldTree, arena: &Arena, sys: SystemId) -> KripkeModel {
    fn walk(t: &WorldTree, arena: &Arena, m: &mut KripkeModel) -> usize {
        let w = m.add_world(t.atoms.iter().map(|&a| arena.atoms[a as usize].clone()));
        for c in &t.children {
            let u = walk(c, arena, m);
            m.add_edge(w, u);
        }
        w
    }
    let mut m = KripkeModel::new(0);
    walk(tree, arena, &mut m);
    m.for_system(sys)
}

/// Decision procedures for satisfiability, entailment and equivalence.
///
/// Entailment is local: `premise ⊨ conclusion` iff `premise ∧ ¬conclusion`
/// has no pointed model. The `*_global` variants use global consequence
/// instead (premise true at every world of the model).
#[derive(Debug)]
pub struct Reasoner {
    node_budget: u64,
    calls: AtomicU64,
}

impl Default for Reasoner {
    fn default() -> Self {
        Reasoner::new(DEFAULT_NODE_BUDGET)
    }
}

impl Clone for Reasoner {
    fn clone(&self) -> Self {
        Reasoner {
            node_budget: self.node_budget,
            calls: AtomicU64::new(self.entailment_calls()),
        }
    }
}

impl Reasoner {
    pub fn new(node_budget: u64) -> Reasoner {
        Reasoner {
            node_budget,
            calls: AtomicU64::new(0),
        }
    }

    pub fn node_budget(&self) -> u64 {
        self.node_budget
    }

    /// Number of entailment checks answered so far.
    pub fn entailment_calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    fn run(
        &self,
        global: &Formula,
        f: &Formula,
        sys: SystemId,
        want_model: bool,
    ) -> Result<Option<Option<(KripkeModel, usize)>>> {
        let mut arena = Arena::default();
        let root = arena.intern(&f.nnf());
        let global_nnf = global.nnf();
        let global_ids = if global_nnf == Formula::True {
            Vec::new()
        } else {
            vec![arena.intern(&global_nnf)]
        };
        let mut search = Search {
            arena: &arena,
            sys,
            global: global_ids.clone(),
            budget: self.node_budget,
            used: 0,
            memo: HashMap::new(),
            ancestors: Vec::new(),
        };
        let mut label = vec![root];
        label.extend(global_ids);
        let tree = search.world(label)?;
        Ok(tree.map(|t| want_model.then(|| (build_model(&t, &arena, sys), 0))))
    }

    pub fn is_satisfiable(&self, f: &Formula, sys: SystemId) -> Result<bool> {
        Ok(self.run(&Formula::True, f, sys, false)?.is_some())
    }

    /// A pointed model of `f` (the world is always 0), or `None` when `f` is
    /// unsatisfiable.
    pub fn find_model(&self, f: &Formula, sys: SystemId) -> Result<Option<(KripkeModel, usize)>> {
        Ok(self.run(&Formula::True, f, sys, true)?.flatten())
    }

    /// Is there a model in which `global` holds everywhere and `f` somewhere?
    pub fn is_satisfiable_under(&self, global: &Formula, f: &Formula, sys: SystemId) -> Result<bool> {
        Ok(self.run(global, f, sys, false)?.is_some())
    }

    pub fn entails(&self, premise: &Formula, conclusion: &Formula, sys: SystemId) -> Result<bool> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let probe = Formula::and([premise.nnf(), conclusion.negate()]);
        Ok(!self.is_satisfiable(&probe, sys)?)
    }

    /// `premise ⊨_theory conclusion`, i.e. `premise ∧ theory ⊨ conclusion`.
    pub fn entails_mod(
        &self,
        premise: &Formula,
        theory: &Formula,
        conclusion: &Formula,
        sys: SystemId,
    ) -> Result<bool> {
        self.entails(
            &Formula::and([premise.clone(), theory.clone()]),
            conclusion,
            sys,
        )
    }

    pub fn equivalent(&self, f: &Formula, g: &Formula, sys: SystemId) -> Result<bool> {
        Ok(self.entails(f, g, sys)? && self.entails(g, f, sys)?)
    }

    pub fn equivalent_mod(
        &self,
        f: &Formula,
        g: &Formula,
        theory: &Formula,
        sys: SystemId,
    ) -> Result<bool> {
        Ok(self.entails_mod(f, theory, g, sys)? && self.entails_mod(g, theory, f, sys)?)
    }

    pub fn entails_global(&self, premise: &Formula, conclusion: &Formula, sys: SystemId) -> Result<bool> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        Ok(!self.is_satisfiable_under(premise, &conclusion.negate(), sys)?)
    }

    pub fn equivalent_global(&self, f: &Formula, g: &Formula, sys: SystemId) -> Result<bool> {
        Ok(self.entails_global(f, g, sys)? && self.entails_global(g, f, sys)?)
    }
}
