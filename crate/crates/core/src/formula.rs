//! Modal formulas over a countable set of variables.
//!
//! Formulas are always built through the smart constructors ([`Formula::and`],
//! [`Formula::or`], ...) which keep them canonical: n-ary connectives are
//! flattened, deduplicated, stripped of neutral constants and sorted by printed
//! form (shorter first, then lexicographic). Two canonical formulas are equal
//! iff they print the same.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(String),
    True,
    False,
    Not(Box<Formula>),
    /// At least two children, canonical order.
    And(Vec<Formula>),
    /// At least two children, canonical order.
    Or(Vec<Formula>),
    Box(Box<Formula>),
    Dia(Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Formula {
        Formula::Var(name.into())
    }

    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn boxed(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::True,
            other => Formula::Box(Box::new(other)),
        }
    }

    pub fn dia(f: Formula) -> Formula {
        match f {
            Formula::False => Formula::False,
            other => Formula::Dia(Box::new(other)),
        }
    }

    pub fn and(children: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::nary(children, true)
    }

    pub fn or(children: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::nary(children, false)
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or([Formula::not(a), b])
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and([
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        ])
    }

    fn nary(children: impl IntoIterator<Item = Formula>, conj: bool) -> Formula {
        let (unit, absorbing) = if conj {
            (Formula::True, Formula::False)
        } else {
            (Formula::False, Formula::True)
        };
        let mut flat = Vec::new();
        let mut stack: Vec<Formula> = children.into_iter().collect();
        stack.reverse();
        while let Some(c) = stack.pop() {
            match c {
                Formula::And(cs) if conj => stack.extend(cs.into_iter().rev()),
                Formula::Or(cs) if !conj => stack.extend(cs.into_iter().rev()),
                c if c == unit => {}
                c if c == absorbing => return absorbing,
                c => flat.push(c),
            }
        }
        sort_canonical(&mut flat);
        flat.dedup();
        match flat.len() {
            0 => unit,
            1 => flat.pop().unwrap(),
            _ if conj => Formula::And(flat),
            _ => Formula::Or(flat),
        }
    }

    /// Sort key used for canonical child ordering.
    pub fn canonical_key(&self) -> (usize, String) {
        let s = self.to_string();
        (s.len(), s)
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Var(n) => {
                out.insert(n.clone());
            }
            Formula::True | Formula::False => {}
            Formula::Not(c) | Formula::Box(c) | Formula::Dia(c) => c.collect_vars(out),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.collect_vars(out)),
        }
    }

    /// Maximal nesting of modal operators.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::True | Formula::False => 0,
            Formula::Not(c) => c.modal_depth(),
            Formula::Box(c) | Formula::Dia(c) => 1 + c.modal_depth(),
            Formula::And(cs) | Formula::Or(cs) => {
                cs.iter().map(Formula::modal_depth).max().unwrap_or(0)
            }
        }
    }

    pub fn is_propositional(&self) -> bool {
        self.modal_depth() == 0
    }

    /// Negation normal form: `Not` only in front of variables.
    pub fn nnf(&self) -> Formula {
        self.push_negation(false)
    }

    /// NNF of the negation of `self`.
    pub fn negate(&self) -> Formula {
        self.push_negation(true)
    }

    fn push_negation(&self, neg: bool) -> Formula {
        match (self, neg) {
            (Formula::Var(_), false) => self.clone(),
            (Formula::Var(_), true) => Formula::Not(Box::new(self.clone())),
            (Formula::True, false) | (Formula::False, true) => Formula::True,
            (Formula::True, true) | (Formula::False, false) => Formula::False,
            (Formula::Not(c), _) => c.push_negation(!neg),
            (Formula::And(cs), false) => Formula::and(cs.iter().map(|c| c.push_negation(false))),
            (Formula::And(cs), true) => Formula::or(cs.iter().map(|c| c.push_negation(true))),
            (Formula::Or(cs), false) => Formula::or(cs.iter().map(|c| c.push_negation(false))),
            (Formula::Or(cs), true) => Formula::and(cs.iter().map(|c| c.push_negation(true))),
            (Formula::Box(c), false) => Formula::boxed(c.push_negation(false)),
            (Formula::Box(c), true) => Formula::dia(c.push_negation(true)),
            (Formula::Dia(c), false) => Formula::dia(c.push_negation(false)),
            (Formula::Dia(c), true) => Formula::boxed(c.push_negation(true)),
        }
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            Formula::Var(_) | Formula::True | Formula::False => true,
            Formula::Not(c) => matches!(**c, Formula::Var(_)),
            Formula::Box(c) | Formula::Dia(c) => c.is_nnf(),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().all(Formula::is_nnf),
        }
    }

    /// `a` or `~a`.
    pub fn is_prop_literal(&self) -> bool {
        match self {
            Formula::Var(_) => true,
            Formula::Not(c) => matches!(**c, Formula::Var(_)),
            _ => false,
        }
    }

    /// Literal in the modal sense: `a`, `~a`, `[]F` or `<>F`.
    pub fn is_literal(&self) -> bool {
        self.is_prop_literal() || matches!(self, Formula::Box(_) | Formula::Dia(_))
    }

    /// Most specific syntactic class of a formula in NNF.
    ///
    /// `false` is the empty clause and `true` the empty term.
    pub fn classify(&self) -> Class {
        match self {
            f if f.is_literal() => Class::Literal,
            Formula::False => Class::Clause,
            Formula::True => Class::Term,
            Formula::Or(cs) if cs.iter().all(Formula::is_literal) => Class::Clause,
            Formula::And(cs) if cs.iter().all(Formula::is_literal) => Class::Term,
            _ => Class::General,
        }
    }

    pub fn is_clause(&self) -> bool {
        matches!(self.classify(), Class::Literal | Class::Clause)
    }

    pub fn is_term(&self) -> bool {
        matches!(self.classify(), Class::Literal | Class::Term)
    }

    /// Top-level disjuncts (a non-disjunction is its own single disjunct,
    /// `false` has none).
    pub fn disjuncts(&self) -> &[Formula] {
        match self {
            Formula::Or(cs) => cs,
            Formula::False => &[],
            other => std::slice::from_ref(other),
        }
    }

    /// Top-level conjuncts (`true` has none).
    pub fn conjuncts(&self) -> &[Formula] {
        match self {
            Formula::And(cs) => cs,
            Formula::True => &[],
            other => std::slice::from_ref(other),
        }
    }

    pub fn decompose_clause(&self) -> Result<ClauseParts> {
        if !self.is_clause() {
            return Err(Error::NotAClause(self.to_string()));
        }
        let mut parts = ClauseParts::default();
        for lit in self.disjuncts() {
            match lit {
                Formula::Dia(b) => parts.dia.push((**b).clone()),
                Formula::Box(b) => parts.boxes.push((**b).clone()),
                l => {
                    parts.prop.insert(l.clone());
                }
            }
        }
        Ok(parts)
    }

    pub fn decompose_term(&self) -> Result<TermParts> {
        if !self.is_term() {
            return Err(Error::NotATerm(self.to_string()));
        }
        let mut parts = TermParts::default();
        for lit in self.conjuncts() {
            match lit {
                Formula::Dia(b) => parts.dia.push((**b).clone()),
                Formula::Box(b) => parts.boxes.push((**b).clone()),
                l => {
                    parts.prop.insert(l.clone());
                }
            }
        }
        Ok(parts)
    }
}

pub(crate) fn sort_canonical(fs: &mut [Formula]) {
    fs.sort_by_cached_key(Formula::canonical_key);
}

/// The complementary propositional literal of `a` / `~a`.
pub fn complement(lit: &Formula) -> Option<Formula> {
    match lit {
        Formula::Var(_) => Some(Formula::Not(Box::new(lit.clone()))),
        Formula::Not(c) if matches!(**c, Formula::Var(_)) => Some((**c).clone()),
        _ => None,
    }
}

/// True when a set of propositional literals contains some `a` and `~a`.
pub fn has_complementary_pair<'a>(lits: impl IntoIterator<Item = &'a Formula>) -> bool {
    let mut pos = BTreeSet::new();
    let mut neg = BTreeSet::new();
    for l in lits {
        match l {
            Formula::Var(n) => {
                if neg.contains(n) {
                    return true;
                }
                pos.insert(n);
            }
            Formula::Not(c) => {
                if let Formula::Var(n) = &**c {
                    if pos.contains(n) {
                        return true;
                    }
                    neg.insert(n);
                }
            }
            _ => {}
        }
    }
    false
}

impl PartialOrd for Formula {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: printed length, then printed text.
impl Ord for Formula {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        self.canonical_key().cmp(&other.canonical_key())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(n) => f.write_str(n),
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Not(c) => write!(f, "~{c}"),
            Formula::Box(c) => write!(f, "[]{c}"),
            Formula::Dia(c) => write!(f, "<>{c}"),
            Formula::And(cs) | Formula::Or(cs) => {
                let sep = if matches!(self, Formula::And(_)) {
                    " & "
                } else {
                    " | "
                };
                f.write_str("(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    Literal,
    Clause,
    Term,
    General,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Literal {
    PosAtom(String),
    NegAtom(String),
    BoxLit(Formula),
    DiaLit(Formula),
}

impl Literal {
    pub fn from_formula(f: &Formula) -> Option<Literal> {
        match f {
            Formula::Var(n) => Some(Literal::PosAtom(n.clone())),
            Formula::Not(c) => match &**c {
                Formula::Var(n) => Some(Literal::NegAtom(n.clone())),
                _ => None,
            },
            Formula::Box(b) => Some(Literal::BoxLit((**b).clone())),
            Formula::Dia(b) => Some(Literal::DiaLit((**b).clone())),
            _ => None,
        }
    }

    pub fn to_formula(&self) -> Formula {
        match self {
            Literal::PosAtom(n) => Formula::var(n.clone()),
            Literal::NegAtom(n) => Formula::Not(Box::new(Formula::var(n.clone()))),
            Literal::BoxLit(b) => Formula::boxed(b.clone()),
            Literal::DiaLit(b) => Formula::dia(b.clone()),
        }
    }
}

/// A clause split into its propositional literals, the bodies of its
/// `<>`-literals and the bodies of its `[]`-literals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClauseParts {
    pub prop: BTreeSet<Formula>,
    pub dia: Vec<Formula>,
    pub boxes: Vec<Formula>,
}

impl ClauseParts {
    pub fn reassemble(&self) -> Formula {
        Formula::or(
            self.prop
                .iter()
                .cloned()
                .chain(self.dia.iter().cloned().map(Formula::dia))
                .chain(self.boxes.iter().cloned().map(Formula::boxed)),
        )
    }
}

/// A term split the same way as [`ClauseParts`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TermParts {
    pub prop: BTreeSet<Formula>,
    pub dia: Vec<Formula>,
    pub boxes: Vec<Formula>,
}

impl TermParts {
    pub fn reassemble(&self) -> Formula {
        Formula::and(
            self.prop
                .iter()
                .cloned()
                .chain(self.dia.iter().cloned().map(Formula::dia))
                .chain(self.boxes.iter().cloned().map(Formula::boxed)),
        )
    }

    pub fn is_consistent(&self) -> bool {
        !has_complementary_pair(&self.prop)
    }
}
