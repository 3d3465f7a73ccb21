//! Acceptance criteria, one test per criterion. Each test prints a single
//! `[criterion N] PASS|FAIL` line (plus detail lines) before asserting.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use modal_tpi::oracle::{
    box_dia_equivalence_agrees, check_decomposition, modal_transfer_agrees, random_chain,
    random_formula, random_instance, random_prop_clause, random_prop_literal,
    sat_by_enumeration, theory_entailment_forms_agree, var_names, ClauseVocabulary,
    DecompositionInstance, Instance, OracleBounds,
};
use modal_tpi::pi_engine::{CompilationResult, Engine};
use modal_tpi::{parse, qa, qa_direct, Formula, Reasoner, SystemId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const RANDOM_INSTANCES: usize = 200;
const LEMMA_CASES: usize = 500;
const ORACLE_FORMULAS: usize = 1000;
const EMPTY_THEORY_INSTANCES: usize = 100;
const GOLDEN_TIME_LIMIT: Duration = Duration::from_secs(10);
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(300);

const GOLDEN_X: &str = "(p1 | p2) & <>[]~p3 & []<>p2";
const GOLDEN_Y: &str = "p1 | p2";
const GAMMA: &str = "[](<>p2 & (p1 | p2))";
const DELTA: &str = "<>([]~p3 & <>p2 & (p1 | p2))";

fn p(s: &str) -> Formula {
    parse(s).unwrap()
}

fn report(n: u32, pass: bool, summary: &str) {
    println!("[criterion {n}] {}: {summary}", if pass { "PASS" } else { "FAIL" });
}

fn golden_candidates() -> Vec<Formula> {
    [
        "p1 | p2".to_string(),
        format!("p1 | {GAMMA}"),
        format!("p1 | {DELTA}"),
        format!("{GAMMA} | p2"),
        GAMMA.to_string(),
        format!("{GAMMA} | {DELTA}"),
        format!("{DELTA} | p2"),
        format!("{DELTA} | {GAMMA}"),
        DELTA.to_string(),
    ]
    .iter()
    .map(|s| p(s))
    .collect()
}

fn golden_theta() -> Vec<Formula> {
    [GOLDEN_Y, GAMMA, DELTA].iter().map(|s| p(s)).collect()
}

/// Every member of `a` is equivalent (modulo `theory`) to some member of `b`
/// and vice versa.
fn same_classes(r: &Reasoner, a: &[Formula], b: &[Formula], theory: &Formula, sys: SystemId) -> bool {
    let covered = |xs: &[Formula], ys: &[Formula]| {
        xs.iter()
            .all(|x| ys.iter().any(|y| r.equivalent_mod(x, y, theory, sys).unwrap()))
    };
    covered(a, b) && covered(b, a)
}

fn golden_compile(sys: SystemId) -> CompilationResult {
    Engine::default().compile_omega(&p(GOLDEN_X), &p(GOLDEN_Y), sys).unwrap()
}

struct Compiled {
    inst: Instance,
    comp: CompilationResult,
}

/// The golden instance followed by the seeded random instances.
fn compiled_instances() -> &'static Vec<Compiled> {
    static CELL: OnceLock<Vec<Compiled>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
        let mut insts = vec![Instance {
            x: p(GOLDEN_X),
            y: p(GOLDEN_Y),
        }];
        insts.extend((0..RANDOM_INSTANCES).map(|_| random_instance(&mut rng, 3, 2, 4)));
        insts
            .into_par_iter()
            .map(|inst| {
                let comp = Engine::default()
                    .compile_omega(&inst.x, &inst.y, SystemId::T)
                    .unwrap_or_else(|e| panic!("compiling {} / {}: {e}", inst.x, inst.y));
                Compiled { inst, comp }
            })
            .collect()
    })
}

#[test]
fn criterion_1_golden_example() {
    let r = Reasoner::default();
    let start = Instant::now();
    let comp = golden_compile(SystemId::T);
    let elapsed = start.elapsed();
    let expected = golden_candidates();

    let mut canon = expected.clone();
    canon.sort();
    canon.dedup();
    let mut got = comp.candidates.clone();
    got.sort();
    let candidates_ok = got == canon && same_classes(&r, &comp.candidates, &expected, &Formula::True, SystemId::T);
    let theta_ok = same_classes(&r, &comp.theta, &golden_theta(), &comp.box_y, SystemId::T);
    let time_ok = elapsed < GOLDEN_TIME_LIMIT;

    let k = golden_compile(SystemId::K);
    let k_theta_ok = same_classes(&r, &k.theta, &golden_theta(), &k.box_y, SystemId::K);

    let pass = candidates_ok && theta_ok && time_ok;
    report(
        1,
        pass,
        &format!(
            "candidates match: {candidates_ok} ({} distinct, 9 listed), theta matches in T: {theta_ok}, runtime {:?} < {:?}: {time_ok}",
            comp.candidates.len(),
            elapsed,
            GOLDEN_TIME_LIMIT
        ),
    );
    println!(
        "    theta in T = {{{}}}",
        comp.theta.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
    );
    println!(
        "    theta in K = {{{}}} (matches listed set: {k_theta_ok})",
        k.theta.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
    );
    assert!(pass);
}

#[test]
fn criterion_2_compilation_equivalence() {
    let r = Reasoner::default();
    let all = compiled_instances();
    let results: Vec<(bool, bool)> = all
        .par_iter()
        .map(|c| {
            let omega = c.comp.omega_formula();
            let global = r.equivalent_global(&omega, &c.inst.x, SystemId::T).unwrap();
            let local_with_box = r
                .equivalent(&omega, &Formula::and([c.inst.x.clone(), c.comp.box_y.clone()]), SystemId::T)
                .unwrap();
            (global, local_with_box)
        })
        .collect();
    let global_fail = results.iter().filter(|r| !r.0).count();
    let local_fail = results.iter().filter(|r| !r.1).count();
    let local_plain_fail = all
        .par_iter()
        .filter(|c| !r.equivalent(&c.comp.omega_formula(), &c.inst.x, SystemId::T).unwrap())
        .count();
    let pass = global_fail == 0;
    report(
        2,
        pass,
        &format!(
            "{} instances, omega equivalent to X (global consequence, T): {} failures",
            all.len(),
            global_fail
        ),
    );
    println!("    local: omega equivalent to X & []Y: {local_fail} failures");
    println!("    local: omega equivalent to X: {local_plain_fail} failures (X does not locally entail []Y)");
    assert!(pass);
}

#[test]
fn criterion_3_qa_agreement() {
    let all = compiled_instances();
    let results: Vec<(usize, usize, Option<String>)> = all
        .par_iter()
        .map(|c| {
            let r = Reasoner::default();
            let mut vars: Vec<String> = c.inst.x.vars().union(&c.inst.y.vars()).cloned().collect();
            if vars.is_empty() {
                vars.push("p1".into());
            }
            let vocab = ClauseVocabulary {
                variables: vars,
                max_disjuncts: 2,
                max_depth: 1,
            };
            let mut total = 0;
            let mut bad = 0;
            let mut first = None;
            for q in vocab.clauses() {
                total += 1;
                let compiled = qa(&r, &c.comp, &q, false).unwrap().answer;
                let direct = qa_direct(&r, &c.inst.x, &c.inst.y, &q, SystemId::T).unwrap();
                if compiled != direct {
                    bad += 1;
                    first.get_or_insert_with(|| {
                        format!("X = {}, Y = {}, Q = {q}: compiled {compiled}, direct {direct}", c.inst.x, c.inst.y)
                    });
                }
            }
            (total, bad, first)
        })
        .collect();
    let total: usize = results.iter().map(|r| r.0).sum();
    let bad: usize = results.iter().map(|r| r.1).sum();
    let pass = bad == 0;
    report(
        3,
        pass,
        &format!("{} instances, {total} queries, {bad} disagreements", all.len()),
    );
    if let Some(ex) = results.iter().find_map(|r| r.2.clone()) {
        println!("    first disagreement: {ex}");
    }
    assert!(pass);
}

#[test]
fn criterion_4_size_theorems() {
    let all = compiled_instances();
    let size_violations: Vec<String> = all
        .par_iter()
        .filter_map(|c| {
            let e = Engine::default();
            let pi = e
                .prime_implicates(&Formula::and([c.inst.x.clone(), c.comp.box_y.clone()]), SystemId::T)
                .unwrap();
            (c.comp.theta.len() > pi.len())
                .then(|| format!("X = {}, Y = {}: |theta| {} > |pi| {}", c.inst.x, c.inst.y, c.comp.theta.len(), pi.len()))
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let chains: Vec<(Instance, Formula)> = (0..RANDOM_INSTANCES)
        .map(|_| random_chain(&mut rng, 3, 2, 4))
        .collect();
    let chain_results: Vec<(Option<String>, bool)> = chains
        .par_iter()
        .map(|(inst, weak)| {
            let e = Engine::default();
            let run = |sys| {
                let strong = e.modal_tpi(&inst.x, &inst.y, sys).unwrap().theta.len();
                let weakened = e.modal_tpi(&inst.x, weak, sys).unwrap().theta.len();
                (strong, weakened)
            };
            let (s, w) = run(SystemId::T);
            let (ks, kw) = run(SystemId::K);
            let msg = (w > s).then(|| {
                format!("X = {}, Y = {}, Y' = {weak}: |theta(Y')| {w} > |theta(Y)| {s}", inst.x, inst.y)
            });
            (msg, kw > ks)
        })
        .collect();
    let chain_violations: Vec<&String> = chain_results.iter().filter_map(|r| r.0.as_ref()).collect();
    let k_chain_violations = chain_results.iter().filter(|r| r.1).count();

    let pass = size_violations.is_empty() && chain_violations.is_empty();
    report(
        4,
        pass,
        &format!(
            "|theta| <= |pi(X & []Y)|: {} violations over {} instances; weakening chains in T: {} violations over {} chains",
            size_violations.len(),
            all.len(),
            chain_violations.len(),
            chains.len()
        ),
    );
    println!("    weakening chains in K: {k_chain_violations} violations");
    for v in size_violations.iter().take(3) {
        println!("    size: {v}");
    }
    for v in chain_violations.iter().take(3) {
        println!("    chain: {v}");
    }
    // The smallest known counterexample to the weakening bound in T.
    let e = Engine::default();
    let x = p("p & q & r");
    let strong = e.modal_tpi(&x, &x, SystemId::T).unwrap().theta.len();
    let weak = e.modal_tpi(&x, &p("p"), SystemId::T).unwrap().theta.len();
    println!("    X = Y = p & q & r, Y' = p: |theta(Y')| = {weak}, |theta(Y)| = {strong}");
    assert!(pass);
}

fn lemma_pair<R: Rng>(rng: &mut R, vars: &[String]) -> (Formula, Formula) {
    let a = random_formula(rng, vars, 1, 5);
    let b = match rng.gen_range(0..4) {
        0 => random_formula(rng, vars, 1, 5),
        // equivalent rewrites
        1 => a.nnf(),
        2 => Formula::or([a.clone(), Formula::and([a.clone(), random_formula(rng, vars, 1, 3)])]),
        // a weakening, so that entailment holds one way
        _ => Formula::or([a.clone(), random_formula(rng, vars, 1, 3)]),
    };
    (a, b)
}

#[test]
fn criterion_5_lemma_suites() {
    let vars = var_names(3);
    let r = Reasoner::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);

    let mut l1 = 0;
    let mut l2 = 0;
    let mut l3 = 0;
    let mut l3_t = 0;
    let mut first = Vec::new();
    for _ in 0..LEMMA_CASES {
        let (a, b) = lemma_pair(&mut rng, &vars);
        if !box_dia_equivalence_agrees(&r, &a, &b, SystemId::K).unwrap() {
            l1 += 1;
            first.push(format!("box/dia equivalence: {a} vs {b}"));
        }
        let y = random_prop_clause(&mut rng, &vars, 2);
        for sys in [SystemId::K, SystemId::T] {
            if !theory_entailment_forms_agree(&r, &a, &b, &y, sys).unwrap() {
                l2 += 1;
                first.push(format!("theory entailment forms ({sys}): {a}, {b}, Y = {y}"));
            }
        }
        if !modal_transfer_agrees(&r, &a, &b, &y, SystemId::K).unwrap() {
            l3 += 1;
            first.push(format!("modal transfer: {a}, {b}, Y = {y}"));
        }
        if !modal_transfer_agrees(&r, &a, &b, &y, SystemId::T).unwrap() {
            l3_t += 1;
        }
    }

    let mut decomp_bad = 0;
    let mut decomp_example = None;
    for _ in 0..LEMMA_CASES {
        let inst = random_decomposition(&mut rng, &vars);
        if !check_decomposition(&inst, &r, SystemId::K).unwrap() {
            decomp_bad += 1;
            decomp_example.get_or_insert(inst);
        }
    }

    let pass = l1 == 0 && l2 == 0 && l3 == 0 && decomp_bad == 0;
    report(
        5,
        pass,
        &format!(
            "{LEMMA_CASES} cases each: box/dia equivalence {l1}, theory entailment forms {l2}, modal transfer (K) {l3}, decomposition (K) {decomp_bad} counterexamples"
        ),
    );
    println!("    modal transfer in T (informational): {l3_t} counterexamples");
    for f in first.iter().take(3) {
        println!("    {f}");
    }
    if let Some(inst) = decomp_example {
        println!(
            "    decomposition counterexample: alpha={:?} beta={:?} gamma={:?} psi={:?} phi={:?} xi={:?} y={}",
            strs(&inst.alpha),
            strs(&inst.beta),
            strs(&inst.gamma),
            strs(&inst.psi),
            strs(&inst.phi),
            strs(&inst.xi),
            inst.y
        );
        let conds = inst.conditions(&r, SystemId::K).unwrap();
        println!("    left side unsatisfiable modulo []y, conditions: {conds:?}");
    }
    assert!(pass);
}

fn strs(fs: &[Formula]) -> Vec<String> {
    fs.iter().map(ToString::to_string).collect()
}

fn random_decomposition<R: Rng>(rng: &mut R, vars: &[String]) -> DecompositionInstance {
    let list = |rng: &mut R, lo: usize, hi: usize, modal: bool| -> Vec<Formula> {
        let n = rng.gen_range(lo..=hi);
        (0..n)
            .map(|_| {
                if modal {
                    random_formula(rng, vars, 1, 3)
                } else {
                    random_prop_literal(rng, vars)
                }
            })
            .collect()
    };
    DecompositionInstance {
        alpha: list(rng, 1, 2, false),
        beta: list(rng, 1, 2, true),
        gamma: list(rng, 1, 2, true),
        psi: list(rng, 0, 2, false),
        phi: list(rng, 0, 2, true),
        xi: list(rng, 0, 2, true),
        y: if rng.gen_bool(0.5) {
            Formula::True
        } else {
            random_prop_clause(rng, vars, 2)
        },
    }
}

#[test]
fn criterion_6_oracle_agreement() {
    let start = Instant::now();
    let vars = var_names(3);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let formulas: Vec<Formula> = (0..ORACLE_FORMULAS)
        .map(|_| {
            let size = rng.gen_range(3..=14);
            random_formula(&mut rng, &vars, 2, size)
        })
        .collect();
    let disagreements: Vec<String> = formulas
        .par_iter()
        .flat_map_iter(|f| {
            let r = Reasoner::default();
            let mut out = Vec::new();
            for sys in [SystemId::K, SystemId::T] {
                let tableau = r.is_satisfiable(f, sys).unwrap();
                let bounds = OracleBounds::new(2, OracleBounds::sufficient_for(f).max_branching, vars.clone());
                let oracle = sat_by_enumeration(f, sys, &bounds).unwrap().is_sat();
                if tableau != oracle {
                    out.push(format!("{f} in {sys}: tableau {tableau}, oracle {oracle}"));
                }
            }
            out
        })
        .collect();
    let elapsed = start.elapsed();
    let pass = disagreements.is_empty() && elapsed < ORACLE_TIME_LIMIT;
    report(
        6,
        pass,
        &format!(
            "{} formulas x 2 systems, {} disagreements, {:?} < {:?}",
            formulas.len(),
            disagreements.len(),
            elapsed,
            ORACLE_TIME_LIMIT
        ),
    );
    for d in disagreements.iter().take(3) {
        println!("    {d}");
    }
    assert!(pass);
}

#[test]
fn criterion_7_empty_theory() {
    let r = Reasoner::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let xs: Vec<Formula> = (0..EMPTY_THEORY_INSTANCES)
        .map(|_| random_instance(&mut rng, 3, 2, 4).x)
        .collect();
    let bad: Vec<String> = xs
        .par_iter()
        .filter_map(|x| {
            let e = Engine::default();
            let theta = e.modal_tpi(x, &Formula::True, SystemId::T).unwrap().theta;
            let pi = e.prime_implicates(x, SystemId::T).unwrap();
            (!same_classes(&r, &theta, &pi, &Formula::True, SystemId::T)).then(|| x.to_string())
        })
        .collect();
    let pass = bad.is_empty();
    report(
        7,
        pass,
        &format!("{} instances, theta(X, []true) and pi(X) differ on {}", xs.len(), bad.len()),
    );
    assert!(pass);
}

#[test]
fn criterion_8_query_latency() {
    let r = Reasoner::default();
    let comp = golden_compile(SystemId::T);
    let vocab = ClauseVocabulary {
        variables: var_names(3),
        max_disjuncts: 2,
        max_depth: 1,
    };
    let queries = vocab.clauses();
    let x = p(GOLDEN_X);
    let y = p(GOLDEN_Y);
    let start = Instant::now();
    for q in &queries {
        qa(&r, &comp, q, false).unwrap();
    }
    let compiled = start.elapsed() / queries.len() as u32;
    let start = Instant::now();
    for q in &queries {
        qa_direct(&r, &x, &y, q, SystemId::T).unwrap();
    }
    let direct = start.elapsed() / queries.len() as u32;
    report(
        8,
        true,
        &format!(
            "reported only: {} queries, mean compiled latency {compiled:?}, mean direct latency {direct:?} (compiled faster: {})",
            queries.len(),
            compiled < direct
        ),
    );
}
