//! Kripke semantics and the decision procedures built on it.

mod tableau;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::Formula;

pub use tableau::{Reasoner, DEFAULT_NODE_BUDGET};

/// Modal system: `K` imposes nothing on the accessibility relation, `T`
/// requires it to be reflexive.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SystemId {
    K,
    #[default]
    T,
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemId::K => "K",
            SystemId::T => "T",
        })
    }
}

impl FromStr for SystemId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "K" | "k" => Ok(SystemId::K),
            "T" | "t" => Ok(SystemId::T),
            other => Err(format!("unknown modal system `{other}` (expected K or T)")),
        }
    }
}

/// A finite Kripke model. Worlds are `0..worlds`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KripkeModel {
    pub worlds: usize,
    pub relation: BTreeSet<(usize, usize)>,
    pub valuation: Vec<BTreeSet<String>>,
}

impl KripkeModel {
    pub fn new(worlds: usize) -> KripkeModel {
        KripkeModel {
            worlds,
            relation: BTreeSet::new(),
            valuation: vec![BTreeSet::new(); worlds],
        }
    }

    pub fn add_world(&mut self, atoms: impl IntoIterator<Item = String>) -> usize {
        self.worlds += 1;
        self.valuation.push(atoms.into_iter().collect());
        self.worlds - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        self.relation.insert((from, to));
    }

    pub fn validate(&self) -> Result<()> {
        if self.worlds == 0 {
            return Err(Error::InvalidModel("a model needs at least one world".into()));
        }
        if self.valuation.len() != self.worlds {
            return Err(Error::InvalidModel(format!(
                "valuation covers {} worlds, model has {}",
                self.valuation.len(),
                self.worlds
            )));
        }
        if let Some(&(a, b)) = self
            .relation
            .iter()
            .find(|(a, b)| *a >= self.worlds || *b >= self.worlds)
        {
            return Err(Error::InvalidModel(format!(
                "edge ({a}, {b}) refers to a missing world"
            )));
        }
        Ok(())
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.worlds).all(|w| self.relation.contains(&(w, w)))
    }

    /// The model with every `(w, w)` added.
    pub fn reflexive_closure(&self) -> KripkeModel {
        let mut m = self.clone();
        for w in 0..m.worlds {
            m.relation.insert((w, w));
        }
        m
    }

    /// The model as seen by `sys`: unchanged for K, reflexive closure for T.
    pub fn for_system(&self, sys: SystemId) -> KripkeModel {
        match sys {
            SystemId::K => self.clone(),
            SystemId::T => self.reflexive_closure(),
        }
    }

    pub fn successors(&self, w: usize) -> impl Iterator<Item = usize> + '_ {
        self.relation.range((w, 0)..=(w, usize::MAX)).map(|&(_, b)| b)
    }
}

/// Truth of `f` at world `w` of `m`.
pub fn eval(m: &KripkeModel, w: usize, f: &Formula) -> Result<bool> {
    if w >= m.worlds || w >= m.valuation.len() {
        return Err(Error::UnknownWorld {
            world: w,
            worlds: m.worlds,
        });
    }
    Ok(truth(m, w, f))
}

fn truth(m: &KripkeModel, w: usize, f: &Formula) -> bool {
    match f {
        Formula::Var(n) => m.valuation[w].contains(n),
        Formula::True => true,
        Formula::False => false,
        Formula::Not(c) => !truth(m, w, c),
        Formula::And(cs) => cs.iter().all(|c| truth(m, w, c)),
        Formula::Or(cs) => cs.iter().any(|c| truth(m, w, c)),
        Formula::Box(c) => m.successors(w).all(|u| truth(m, u, c)),
        Formula::Dia(c) => m.successors(w).any(|u| truth(m, u, c)),
    }
}

/// Convenience wrappers over a [`Reasoner`] with the default node budget.
pub fn is_satisfiable(f: &Formula, sys: SystemId) -> Result<bool> {
    Reasoner::default().is_satisfiable(f, sys)
}

pub fn find_model(f: &Formula, sys: SystemId) -> Result<Option<(KripkeModel, usize)>> {
    Reasoner::default().find_model(f, sys)
}

pub fn entails(premise: &Formula, conclusion: &Formula, sys: SystemId) -> Result<bool> {
    Reasoner::default().entails(premise, conclusion, sys)
}

pub fn entails_mod(
    premise: &Formula,
    theory: &Formula,
    conclusion: &Formula,
    sys: SystemId,
) -> Result<bool> {
    Reasoner::default().entails_mod(premise, theory, conclusion, sys)
}

pub fn equivalent(f: &Formula, g: &Formula, sys: SystemId) -> Result<bool> {
    Reasoner::default().equivalent(f, g, sys)
}

pub fn equivalent_mod(f: &Formula, g: &Formula, theory: &Formula, sys: SystemId) -> Result<bool> {
    Reasoner::default().equivalent_mod(f, g, theory, sys)
}
