//! Clausal query answering against a compilation.

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::pi_engine::CompilationResult;
use crate::semantics::{KripkeModel, Reasoner, SystemId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// The member of `theta ∪ {[]y}` that entails the query.
    Member(Formula),
    /// A pointed model of `x ∧ []y ∧ ~query`.
    Countermodel(KripkeModel, usize),
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Compiled,
    Direct,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryVerdict {
    pub query: Formula,
    pub answer: bool,
    pub witness: Witness,
    pub method: Method,
}

/// Answers `x ⊨ q` from the compilation: true iff some member of
/// `theta ∪ {[]y}` entails `q` modulo `[]y`.
///
/// With `strict` every member must entail `q` instead. That reading answers
/// false as soon as two incomparable members exist and is kept only for
/// comparison.
pub fn qa(r: &Reasoner, comp: &CompilationResult, q: &Formula, strict: bool) -> Result<QueryVerdict> {
    if !q.nnf().is_clause() {
        return Err(Error::NotAClause(q.to_string()));
    }
    let members = comp.omega();
    let mut first = None;
    let mut all = true;
    for m in &members {
        if r.entails_mod(m, &comp.box_y, q, comp.system)? {
            if first.is_none() {
                first = Some(m.clone());
            }
            if !strict {
                break;
            }
        } else {
            all = false;
            if strict {
                break;
            }
        }
    }
    let answer = if strict { all } else { first.is_some() };
    let witness = match first {
        Some(m) if answer => Witness::Member(m),
        _ => Witness::None,
    };
    Ok(QueryVerdict {
        query: q.clone(),
        answer,
        witness,
        method: Method::Compiled,
    })
}

/// `x ⊨_[]y q`, decided without the compilation.
pub fn qa_direct(r: &Reasoner, x: &Formula, y: &Formula, q: &Formula, sys: SystemId) -> Result<bool> {
    r.entails_mod(x, &Formula::boxed(y.clone()), q, sys)
}

/// Like [`qa_direct`], with a countermodel when the answer is false. Accepts
/// any formula as query.
pub fn direct_verdict(r: &Reasoner, x: &Formula, y: &Formula, q: &Formula, sys: SystemId) -> Result<QueryVerdict> {
    let probe = Formula::and([x.clone(), Formula::boxed(y.clone()), Formula::not(q.clone())]);
    let (answer, witness) = match r.find_model(&probe, sys)? {
        Some((m, w)) => (false, Witness::Countermodel(m, w)),
        None => (true, Witness::None),
    };
    Ok(QueryVerdict {
        query: q.clone(),
        answer,
        witness,
        method: Method::Direct,
    })
}
