//! Prime implicates and theory prime implicates.
//!
//! Candidates are produced per DNF term and combined by distribution: a
//! disjunction of terms entails a clause iff every term does, so choosing
//! one candidate per term and disjoining them covers every implicate. The
//! residue step then keeps one representative per equivalence class and
//! drops everything entailed by another survivor.
//!
//! For a consistent term `a_1 & .. & <>b_1 & .. & []g_1 & ..` the candidates
//! are its propositional literals, `<>(b_j & g_1 & ..)` for every `b_j`, and
//! `[](g_1 & ..)` when there are box literals. In T a term is first closed
//! under `[]g -> g`, which can add literals of every kind.

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formula::{has_complementary_pair, sort_canonical, Formula, TermParts};
use crate::normal_forms::{to_cnf, to_dnf_capped, DEFAULT_MAX_CLAUSES};
use crate::semantics::{Reasoner, SystemId};

/// Counters recorded with a compilation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub nb_cl_candidates: usize,
    pub nb_cl_theta: usize,
    pub entailment_calls: u64,
    pub elapsed_ms: u64,
}

/// `theta` together with `[]y` is the compiled form of `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompilationResult {
    pub x: Formula,
    pub y: Formula,
    pub system: SystemId,
    pub candidates: Vec<Formula>,
    pub theta: Vec<Formula>,
    pub box_y: Formula,
    pub stats: Stats,
    /// Set when `y` is Horn, i.e. `[]y` belongs to a fragment with cheap
    /// satisfiability in S5. Informational only.
    pub horn_advisory: bool,
}

impl CompilationResult {
    /// `theta ∪ {[]y}` as a list of clauses.
    pub fn omega(&self) -> Vec<Formula> {
        let mut out = self.theta.clone();
        if !out.contains(&self.box_y) {
            out.push(self.box_y.clone());
        }
        out
    }

    pub fn omega_formula(&self) -> Formula {
        Formula::and(self.omega())
    }
}

#[derive(Clone, Debug)]
pub struct Engine {
    pub reasoner: Reasoner,
    /// Cap on DNF terms and on intermediate candidate sets.
    pub max_terms: usize,
}

impl Default for Engine {
    fn default() -> Self {
        Engine {
            reasoner: Reasoner::default(),
            max_terms: DEFAULT_MAX_CLAUSES,
        }
    }
}

impl Engine {
    pub fn new(reasoner: Reasoner, max_terms: usize) -> Engine {
        Engine { reasoner, max_terms }
    }

    /// The per-term candidates without any T closure or pruning.
    pub fn bundle_candidates(&self, t: &TermParts) -> Result<Vec<Formula>> {
        if !t.is_consistent() {
            return Err(Error::InconsistentTerm(t.reassemble().to_string()));
        }
        let mut out: Vec<Formula> = t.prop.iter().cloned().collect();
        let boxed = Formula::and(t.boxes.iter().cloned());
        for b in &t.dia {
            out.push(Formula::dia(Formula::and([b.clone(), boxed.clone()])));
        }
        if !t.boxes.is_empty() {
            out.push(Formula::boxed(boxed));
        }
        sort_canonical(&mut out);
        out.dedup();
        Ok(out)
    }

    /// Candidate clauses of one term, pruned to its prime implicates.
    ///
    /// An unsatisfiable term yields `{false}`.
    pub fn term_candidates(&self, t: &TermParts, sys: SystemId) -> Result<Vec<Formula>> {
        if !t.is_consistent() {
            return Err(Error::InconsistentTerm(t.reassemble().to_string()));
        }
        let term = t.reassemble();
        if !self.reasoner.is_satisfiable(&term, sys)? {
            return Ok(vec![Formula::False]);
        }
        let raw = match sys {
            SystemId::K => self.bundle_candidates(t)?,
            SystemId::T => {
                let closed = self.reflexive_saturation(t)?;
                let mut acc: Option<Vec<Formula>> = None;
                for part in &closed {
                    let cs = self.bundle_candidates(part)?;
                    acc = Some(match acc {
                        None => cs,
                        Some(prev) => self.residue(&cross(&prev, &cs), &Formula::True, sys)?,
                    });
                    self.check_cap(acc.as_ref().map_or(0, Vec::len))?;
                }
                acc.unwrap_or_else(|| vec![Formula::False])
            }
        };
        self.residue(&raw, &Formula::True, sys)
    }

    /// Closes a term under `[]g -> g`: box bodies are conjoined into the term
    /// and the result is brought back to DNF until no new body appears. The
    /// returned terms are consistent and their disjunction is T-equivalent to
    /// the input.
    pub fn reflexive_saturation(&self, t: &TermParts) -> Result<Vec<TermParts>> {
        let mut done: Vec<TermParts> = Vec::new();
        let mut stack: Vec<(Formula, BTreeSet<Formula>)> = vec![(t.reassemble(), BTreeSet::new())];
        while let Some((term, unfolded)) = stack.pop() {
            let parts = term.decompose_term()?;
            let fresh: Vec<Formula> = parts
                .boxes
                .iter()
                .filter(|g| !unfolded.contains(*g))
                .cloned()
                .collect();
            if fresh.is_empty() {
                if parts.is_consistent() && !done.contains(&parts) {
                    done.push(parts);
                }
                continue;
            }
            let mut unfolded = unfolded;
            unfolded.extend(fresh.iter().cloned());
            let grown = Formula::and(std::iter::once(term).chain(fresh));
            let dnf = to_dnf_capped(&grown, self.max_terms)?;
            for next in dnf.terms {
                stack.push((next, unfolded.clone()));
            }
            self.check_cap(stack.len() + done.len())?;
        }
        // absorption: a term whose literals include another's is redundant
        let sets: Vec<BTreeSet<Formula>> = done
            .iter()
            .map(|p| p.reassemble().conjuncts().iter().cloned().collect())
            .collect();
        let mut keep = Vec::new();
        for (i, p) in done.iter().enumerate() {
            let absorbed = sets.iter().enumerate().any(|(j, s)| {
                j != i && s.is_subset(&sets[i]) && (s.len() < sets[i].len() || j < i)
            });
            if !absorbed {
                keep.push(p.clone());
            }
        }
        Ok(keep)
    }

    /// All disjunctions picking one candidate per DNF term of `f`, with
    /// entailed ones dropped between steps. `{false}` when `f` has no
    /// consistent term.
    pub fn candidates(&self, f: &Formula, sys: SystemId) -> Result<Vec<Formula>> {
        let dnf = to_dnf_capped(f, self.max_terms)?;
        if dnf.is_empty() {
            return Ok(vec![Formula::False]);
        }
        let mut per_term = Vec::with_capacity(dnf.len());
        for t in &dnf.terms {
            per_term.push(self.term_candidates(&t.decompose_term()?, sys)?);
        }
        let last = per_term.len() - 1;
        let mut acc: Vec<Formula> = Vec::new();
        for (i, cs) in per_term.into_iter().enumerate() {
            acc = if i == 0 { cs } else { cross(&acc, &cs) };
            self.check_cap(acc.len())?;
            if i < last {
                acc = self.residue(&acc, &Formula::True, sys)?;
            }
        }
        Ok(acc)
    }

    /// Keeps one representative (first in canonical order) per
    /// `≡_theory` class, then removes every clause entailed modulo `theory`
    /// by another survivor.
    pub fn residue(&self, cs: &[Formula], theory: &Formula, sys: SystemId) -> Result<Vec<Formula>> {
        let mut cs: Vec<Formula> = cs.to_vec();
        sort_canonical(&mut cs);
        cs.dedup();
        let n = cs.len();
        if n <= 1 {
            return Ok(cs);
        }
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        let verdicts: Vec<bool> = pairs
            .par_iter()
            .map(|&(i, j)| self.clause_entails(&cs[i], theory, &cs[j], sys))
            .collect::<Result<_>>()?;
        let mut ent = vec![vec![true; n]; n];
        for (&(i, j), &v) in pairs.iter().zip(&verdicts) {
            ent[i][j] = v;
        }
        let rep: Vec<usize> = (0..n)
            .map(|j| (0..n).find(|&i| ent[i][j] && ent[j][i]).unwrap_or(j))
            .collect();
        let reps: Vec<usize> = (0..n).filter(|&j| rep[j] == j).collect();
        Ok(reps
            .iter()
            .filter(|&&j| !reps.iter().any(|&i| i != j && ent[i][j]))
            .map(|&j| cs[j].clone())
            .collect())
    }

    fn clause_entails(&self, a: &Formula, theory: &Formula, b: &Formula, sys: SystemId) -> Result<bool> {
        if *a == Formula::False {
            return Ok(true);
        }
        let bs = b.disjuncts();
        if a.disjuncts().iter().all(|l| bs.contains(l)) {
            return Ok(true);
        }
        self.reasoner.entails_mod(a, theory, b, sys)
    }

    /// Prime implicates of `x`.
    pub fn prime_implicates(&self, x: &Formula, sys: SystemId) -> Result<Vec<Formula>> {
        let cs = self.candidates(x, sys)?;
        self.residue(&cs, &Formula::True, sys)
    }

    /// Theory prime implicates of `x` with respect to `[]y`.
    pub fn modal_tpi(&self, x: &Formula, y: &Formula, sys: SystemId) -> Result<CompilationResult> {
        let start = Instant::now();
        let calls_before = self.reasoner.entailment_calls();
        if !y.is_propositional() {
            return Err(Error::NotPropositional(y.to_string()));
        }
        if !self.reasoner.entails(x, y, sys)? {
            return Err(Error::Precondition(format!("{x} does not entail {y}")));
        }
        let box_y = Formula::boxed(y.clone());
        let candidates = self.candidates(&Formula::and([x.clone(), box_y.clone()]), sys)?;
        let theta = self.residue(&candidates, &box_y, sys)?;
        let stats = Stats {
            nb_cl_candidates: candidates.len(),
            nb_cl_theta: theta.len(),
            entailment_calls: self.reasoner.entailment_calls() - calls_before,
            elapsed_ms: start.elapsed().as_millis() as u64,
        };
        Ok(CompilationResult {
            x: x.clone(),
            y: y.clone(),
            system: sys,
            candidates,
            theta,
            box_y,
            stats,
            horn_advisory: is_horn(y),
        })
    }

    /// Same as [`Engine::modal_tpi`]; the result's [`CompilationResult::omega`]
    /// is the compiled knowledge base.
    pub fn compile_omega(&self, x: &Formula, y: &Formula, sys: SystemId) -> Result<CompilationResult> {
        self.modal_tpi(x, y, sys)
    }

    fn check_cap(&self, n: usize) -> Result<()> {
        if n > self.max_terms {
            return Err(Error::SizeCap {
                what: "candidates",
                limit: self.max_terms,
            });
        }
        Ok(())
    }
}

fn cross(a: &[Formula], b: &[Formula]) -> Vec<Formula> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(Formula::or([x.clone(), y.clone()]));
        }
    }
    sort_canonical(&mut out);
    out.dedup();
    out
}

/// Every clause of the CNF of `y` has at most one positive literal.
pub fn is_horn(y: &Formula) -> bool {
    match to_cnf(y) {
        Ok(cnf) => cnf.clauses.iter().all(|c| {
            c.disjuncts()
                .iter()
                .filter(|l| matches!(l, Formula::Var(_)))
                .count()
                <= 1
        }),
        Err(_) => false,
    }
}

/// The conjunction of the propositional clauses of `x`'s CNF. `x` always
/// entails it.
pub fn auto_theory(x: &Formula) -> Result<Formula> {
    let cnf = to_cnf(x)?;
    let prop: Vec<Formula> = cnf
        .clauses
        .into_iter()
        .filter(|c| c.is_propositional() && !has_complementary_pair(c.disjuncts()))
        .collect();
    Ok(Formula::and(prop))
}

pub fn term_candidates(t: &TermParts, sys: SystemId) -> Result<Vec<Formula>> {
    Engine::default().term_candidates(t, sys)
}

pub fn candidates(f: &Formula, sys: SystemId) -> Result<Vec<Formula>> {
    Engine::default().candidates(f, sys)
}

pub fn residue(cs: &[Formula], theory: &Formula, sys: SystemId) -> Result<Vec<Formula>> {
    Engine::default().residue(cs, theory, sys)
}

pub fn prime_implicates(x: &Formula, sys: SystemId) -> Result<Vec<Formula>> {
    Engine::default().prime_implicates(x, sys)
}

pub fn modal_tpi(x: &Formula, y: &Formula, sys: SystemId) -> Result<CompilationResult> {
    Engine::default().modal_tpi(x, y, sys)
}

pub fn compile_omega(x: &Formula, y: &Formula, sys: SystemId) -> Result<CompilationResult> {
    Engine::default().compile_omega(x, y, sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;
    use crate::semantics::{entails, entails_mod, equivalent};

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn strs(fs: &[Formula]) -> Vec<String> {
        fs.iter().map(ToString::to_string).collect()
    }

    fn set(items: &[&str]) -> Vec<Formula> {
        let mut v: Vec<Formula> = items.iter().map(|s| p(s)).collect();
        sort_canonical(&mut v);
        v
    }

    const GAMMA: &str = "[](<>p2 & (p1 | p2))";
    const DELTA: &str = "<>(<>p2 & []~p3 & (p1 | p2))";

    #[test]
    fn bundle_matches_reference_term() {
        let t = p("p1 & <>[]~p3 & []<>p2 & [](p1 | p2)").decompose_term().unwrap();
        let e = Engine::default();
        assert_eq!(e.bundle_candidates(&t).unwrap(), set(&["p1", GAMMA, DELTA]));
        for sys in [SystemId::K, SystemId::T] {
            assert_eq!(e.term_candidates(&t, sys).unwrap(), set(&["p1", GAMMA, DELTA]));
        }
    }

    #[test]
    fn bundle_small_terms() {
        let e = Engine::default();
        let t = p("p & q").decompose_term().unwrap();
        assert_eq!(e.bundle_candidates(&t).unwrap(), set(&["p", "q"]));
        let t = p("<>a & []b").decompose_term().unwrap();
        assert_eq!(e.bundle_candidates(&t).unwrap(), set(&["<>(a & b)", "[]b"]));
        let t = p("<>a & <>b").decompose_term().unwrap();
        assert_eq!(e.bundle_candidates(&t).unwrap(), set(&["<>a", "<>b"]));
        let bad = TermParts {
            prop: [p("p"), p("~p")].into_iter().collect(),
            ..TermParts::default()
        };
        assert!(matches!(e.bundle_candidates(&bad), Err(Error::InconsistentTerm(_))));
    }

    #[test]
    fn term_candidates_are_implicates() {
        let e = Engine::default();
        for s in ["<>a & []b", "[](a | b) & ~a", "[][]a & <>b", "<>a & []~a"] {
            let f = p(s);
            for sys in [SystemId::K, SystemId::T] {
                for c in e.term_candidates(&f.decompose_term().unwrap(), sys).unwrap() {
                    assert!(entails(&f, &c, sys).unwrap(), "{s} / {c} / {sys}");
                }
            }
        }
    }

    #[test]
    fn reflexive_closure_exposes_hidden_literals() {
        let e = Engine::default();
        let t = p("~p & [](p | q)").decompose_term().unwrap();
        let cs = e.term_candidates(&t, SystemId::T).unwrap();
        assert!(cs.contains(&p("q")), "{:?}", strs(&cs));
        let cs = e.term_candidates(&t, SystemId::K).unwrap();
        assert!(!cs.contains(&p("q")));
    }

    #[test]
    fn golden_candidates() {
        let f = p("(p1 | p2) & <>[]~p3 & []<>p2 & [](p1 | p2)");
        let cs = candidates(&f, SystemId::T).unwrap();
        let expected = [
            "p1 | p2".to_string(),
            format!("p1 | {GAMMA}"),
            format!("p1 | {DELTA}"),
            format!("{GAMMA} | p2"),
            GAMMA.to_string(),
            format!("{GAMMA} | {DELTA}"),
            format!("{DELTA} | p2"),
            format!("{DELTA} | {GAMMA}"),
            DELTA.to_string(),
        ];
        let mut expected: Vec<Formula> = expected.iter().map(|s| p(s)).collect();
        sort_canonical(&mut expected);
        expected.dedup();
        assert_eq!(expected.len(), 8);
        assert_eq!(cs, expected);
    }

    #[test]
    fn small_candidate_sets() {
        assert_eq!(candidates(&p("p & q"), SystemId::K).unwrap(), set(&["p", "q"]));
        assert_eq!(candidates(&p("p | q"), SystemId::K).unwrap(), set(&["p | q"]));
        assert_eq!(candidates(&p("p & ~p"), SystemId::K).unwrap(), [Formula::False]);
    }

    #[test]
    fn residue_examples() {
        let r = residue(&set(&["p", "p | q"]), &Formula::True, SystemId::K).unwrap();
        assert_eq!(r, set(&["p"]));
        let r = residue(&[p("p | q"), p("q | p")], &Formula::True, SystemId::K).unwrap();
        assert_eq!(r.len(), 1);
        // equivalent but syntactically different: first in canonical order wins
        let r = residue(&set(&["[](a & b)", "[]a | [](b & a)"]), &p("true"), SystemId::K).unwrap();
        assert_eq!(r, set(&["[](a & b)"]));
    }

    #[test]
    fn golden_theta_in_k_and_t() {
        let x = p("(p1 | p2) & <>[]~p3 & []<>p2");
        let y = p("p1 | p2");
        let k = modal_tpi(&x, &y, SystemId::K).unwrap();
        assert_eq!(k.theta, set(&["p1 | p2", GAMMA, DELTA]));
        // In T, [](p1 | p2) already yields p1 | p2, so that clause is redundant.
        let t = modal_tpi(&x, &y, SystemId::T).unwrap();
        assert_eq!(t.theta, set(&[GAMMA, DELTA]));
        assert_eq!(t.stats.nb_cl_candidates, 8);
        assert!(!t.horn_advisory);
        assert!(t.stats.entailment_calls > 0);
    }

    #[test]
    fn theta_is_sound_and_minimal() {
        let x = p("(p1 | p2) & <>[]~p3 & []<>p2");
        let y = p("p1 | p2");
        let c = modal_tpi(&x, &y, SystemId::T).unwrap();
        for th in &c.theta {
            assert!(entails_mod(&x, &c.box_y, th, SystemId::T).unwrap());
            assert!(c.candidates.contains(th));
            for other in &c.theta {
                if other != th {
                    assert!(!entails_mod(other, &c.box_y, th, SystemId::T).unwrap());
                }
            }
        }
    }

    #[test]
    fn compilation_errors() {
        assert!(matches!(
            modal_tpi(&p("p"), &p("q"), SystemId::T),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            modal_tpi(&p("[]p"), &p("[]p"), SystemId::T),
            Err(Error::NotPropositional(_))
        ));
    }

    #[test]
    fn empty_theory_and_unit_theory() {
        let c = compile_omega(&p("p"), &Formula::True, SystemId::T).unwrap();
        assert_eq!(c.theta, set(&["p"]));
        assert_eq!(c.omega_formula(), p("p"));
        let x = p("p & q");
        let c = compile_omega(&x, &p("p"), SystemId::T).unwrap();
        assert_eq!(c.theta, set(&["q"]));
        assert!(equivalent(&c.omega_formula(), &Formula::and([x, p("[]p")]), SystemId::T).unwrap());
    }

    #[test]
    fn prime_implicates_of_golden_x() {
        let x = p("(p1 | p2) & <>[]~p3 & []<>p2");
        for sys in [SystemId::K, SystemId::T] {
            let pi = prime_implicates(&x, sys).unwrap();
            assert!(equivalent(&Formula::and(pi), &x, sys).unwrap());
        }
    }

    #[test]
    fn horn_check() {
        assert!(!is_horn(&p("p1 | p2")));
        assert!(is_horn(&p("~p | q")));
        assert!(is_horn(&p("p")));
        assert!(is_horn(&Formula::True));
    }

    #[test]
    fn auto_theory_keeps_propositional_clauses() {
        let x = p("(p1 | p2) & <>[]~p3 & []<>p2");
        assert_eq!(auto_theory(&x).unwrap(), p("p1 | p2"));
        assert_eq!(auto_theory(&p("<>a")).unwrap(), Formula::True);
    }
}
