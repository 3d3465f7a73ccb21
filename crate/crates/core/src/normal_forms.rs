//! Clausal and disjunctive normal forms at the outermost boolean level.
//!
//! Only the `&`/`|` skeleton above the first modal operator is distributed;
//! the bodies of `[]F` and `<>F` literals are kept as they are (after NNF).

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::formula::{has_complementary_pair, sort_canonical, Formula};

pub const DEFAULT_MAX_CLAUSES: usize = 10_000;

type LitSet = BTreeSet<Formula>;

/// A conjunction of clauses, sorted canonically, no duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    pub clauses: Vec<Formula>,
}

/// A disjunction of terms, sorted canonically, no duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dnf {
    pub terms: Vec<Formula>,
}

impl Cnf {
    pub fn reassemble(&self) -> Formula {
        Formula::and(self.clauses.iter().cloned())
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }
}

impl Dnf {
    pub fn reassemble(&self) -> Formula {
        Formula::or(self.terms.iter().cloned())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Number of clauses.
pub fn nb_cl(c: &Cnf) -> usize {
    c.clauses.len()
}

pub fn to_cnf(f: &Formula) -> Result<Cnf> {
    to_cnf_capped(f, DEFAULT_MAX_CLAUSES)
}

pub fn to_dnf(f: &Formula) -> Result<Dnf> {
    to_dnf_capped(f, DEFAULT_MAX_CLAUSES)
}

pub fn to_cnf_capped(f: &Formula, max: usize) -> Result<Cnf> {
    let sets = distribute(&f.nnf(), false, max, "clauses")?;
    Ok(Cnf {
        clauses: assemble(sets, |v| Formula::or(v)),
    })
}

pub fn to_dnf_capped(f: &Formula, max: usize) -> Result<Dnf> {
    let sets = distribute(&f.nnf(), true, max, "terms")?;
    Ok(Dnf {
        terms: assemble(sets, |v| Formula::and(v)),
    })
}

fn assemble(sets: Vec<LitSet>, join: impl Fn(Vec<Formula>) -> Formula) -> Vec<Formula> {
    let mut out: Vec<Formula> = sets.into_iter().map(|s| join(s.into_iter().collect())).collect();
    sort_canonical(&mut out);
    out.dedup();
    out
}

/// Literal sets of the normal form. For DNF (`dnf = true`) each set is a
/// term and the outer connective is `|`; for CNF the roles swap. Sets with
/// complementary propositional literals are dropped (they are `false` as a
/// term and `true` as a clause, neutral in both cases).
fn distribute(f: &Formula, dnf: bool, max: usize, what: &'static str) -> Result<Vec<LitSet>> {
    let sets = match f {
        Formula::True if dnf => vec![LitSet::new()],
        Formula::True => Vec::new(),
        Formula::False if dnf => Vec::new(),
        Formula::False => vec![LitSet::new()],
        Formula::And(cs) | Formula::Or(cs) => {
            let outer = matches!(f, Formula::Or(_)) == dnf;
            if outer {
                let mut all = Vec::new();
                for c in cs {
                    all.extend(distribute(c, dnf, max, what)?);
                    if all.len() > max {
                        return Err(Error::SizeCap { what, limit: max });
                    }
                }
                all
            } else {
                let mut acc = vec![LitSet::new()];
                for c in cs {
                    let part = distribute(c, dnf, max, what)?;
                    let mut next = Vec::with_capacity(acc.len() * part.len());
                    for a in &acc {
                        for b in &part {
                            let mut s = a.clone();
                            s.extend(b.iter().cloned());
                            if !has_complementary_pair(&s) {
                                next.push(s);
                            }
                        }
                    }
                    acc = minimise(next);
                    if acc.len() > max {
                        return Err(Error::SizeCap { what, limit: max });
                    }
                }
                acc
            }
        }
        lit => vec![LitSet::from([lit.clone()])],
    };
    let sets = minimise(sets);
    if sets.len() > max {
        return Err(Error::SizeCap { what, limit: max });
    }
    Ok(sets)
}

/// Removes duplicates and every set that strictly contains another one
/// (subsumed clauses, absorbed terms).
fn minimise(mut sets: Vec<LitSet>) -> Vec<LitSet> {
    sets.retain(|s| !has_complementary_pair(s));
    sets.sort_by_key(|s| s.len());
    sets.dedup();
    let mut kept: Vec<LitSet> = Vec::with_capacity(sets.len());
    for s in sets {
        if !kept.iter().any(|k| k.is_subset(&s)) {
            kept.push(s);
        }
    }
    kept
}
