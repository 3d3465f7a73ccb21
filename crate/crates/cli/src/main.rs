use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use modal_tpi::kb::{load_compilation, load_kb, save_compilation};
use modal_tpi::oracle::{sat_by_enumeration, ClauseVocabulary, OracleBounds, OracleOutcome};
use modal_tpi::pi_engine::{auto_theory, CompilationResult, Engine};
use modal_tpi::qa::direct_verdict;
use modal_tpi::{parse, qa, Error, Formula, Reasoner, SystemId, Witness};

const EXIT_FALSE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "tpi", version, about = "Theory prime implicate compiler for modal logics K and T")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Limits {
    /// Maximum number of DNF terms and intermediate candidates.
    #[arg(long, default_value_t = modal_tpi::normal_forms::DEFAULT_MAX_CLAUSES)]
    max_terms: usize,
    /// Maximum tableau nodes per satisfiability check.
    #[arg(long, default_value_t = modal_tpi::semantics::DEFAULT_NODE_BUDGET)]
    node_budget: u64,
}

impl Limits {
    fn engine(&self) -> Engine {
        Engine::new(Reasoner::new(self.node_budget), self.max_terms)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compile a knowledge base into theta(X, []Y) and write it as JSON.
    Compile {
        #[arg(long)]
        kb: PathBuf,
        /// File whose formulas form Y. Defaults to the KB's [theory] section, or true.
        #[arg(long, conflicts_with = "auto_theory")]
        theory: Option<PathBuf>,
        /// Use the propositional clauses of X as Y.
        #[arg(long)]
        auto_theory: bool,
        #[arg(long, default_value = "T")]
        system: SystemId,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        limits: Limits,
    },
    /// Answer a clausal query against a compilation.
    Query {
        #[arg(long)]
        compilation: PathBuf,
        #[arg(long)]
        query: String,
        /// Require every member of the compilation to entail the query.
        #[arg(long)]
        strict_paper_qa: bool,
        #[arg(long, default_value_t = modal_tpi::semantics::DEFAULT_NODE_BUDGET)]
        node_budget: u64,
    },
    /// Print the prime implicates of a knowledge base.
    Pi {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long, default_value = "T")]
        system: SystemId,
        #[command(flatten)]
        limits: Limits,
    },
    /// Compile one instance and check the compilation's invariants.
    Check {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        theory: Option<PathBuf>,
        #[arg(long, default_value = "T")]
        system: SystemId,
        #[command(flatten)]
        limits: Limits,
    },
    /// Decide satisfiability by bounded tree-model enumeration.
    Oracle {
        #[arg(long)]
        formula: String,
        #[arg(long, default_value = "T")]
        system: SystemId,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long)]
        max_branching: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_resource_cap() { EXIT_CAP } else { EXIT_INPUT })
        }
    }
}

fn theory_from(kb_theory: Option<Formula>, file: Option<&PathBuf>) -> modal_tpi::Result<Formula> {
    match file {
        Some(path) => {
            let t = load_kb(path)?;
            let mut fs = t.formulas;
            fs.extend(t.theory.unwrap_or_default());
            Ok(Formula::and(fs))
        }
        None => Ok(kb_theory.unwrap_or(Formula::True)),
    }
}

fn print_clauses(label: &str, fs: &[Formula]) {
    println!("{label} ({}):", fs.len());
    for f in fs {
        println!("  {f}");
    }
}

fn run(cmd: Command) -> modal_tpi::Result<u8> {
    match cmd {
        Command::Compile {
            kb,
            theory,
            auto_theory: auto,
            system,
            out,
            limits,
        } => {
            let kb = load_kb(&kb)?;
            let x = kb.x();
            let y = if auto {
                auto_theory(&x)?
            } else {
                theory_from(kb.y(), theory.as_ref())?
            };
            let comp = limits.engine().compile_omega(&x, &y, system)?;
            save_compilation(&comp, &out)?;
            println!("X = {}", comp.x);
            println!("[]Y = {}", comp.box_y);
            print_clauses("theta", &comp.theta);
            println!(
                "candidates: {}, entailment checks: {}, elapsed: {} ms",
                comp.stats.nb_cl_candidates, comp.stats.entailment_calls, comp.stats.elapsed_ms
            );
            if comp.horn_advisory {
                println!("note: Y is Horn");
            }
            Ok(0)
        }
        Command::Query {
            compilation,
            query,
            strict_paper_qa,
            node_budget,
        } => {
            let comp = load_compilation(&compilation)?;
            let q = parse(&query)?;
            let r = Reasoner::new(node_budget);
            let verdict = if q.nnf().is_clause() {
                qa(&r, &comp, &q, strict_paper_qa)?
            } else {
                eprintln!("note: query is not a clause; answering by direct entailment");
                direct_verdict(&r, &comp.x, &comp.y, &q, comp.system)?
            };
            println!("{}", verdict.answer);
            match &verdict.witness {
                Witness::Member(m) => println!("witness: {m}"),
                Witness::Countermodel(m, w) => {
                    println!("countermodel (world {w}): {}", serde_json::to_string(m).map_err(Error::from)?)
                }
                Witness::None => {}
            }
            Ok(if verdict.answer { 0 } else { EXIT_FALSE })
        }
        Command::Pi { kb, system, limits } => {
            let x = load_kb(&kb)?.x();
            let pi = limits.engine().prime_implicates(&x, system)?;
            for c in &pi {
                println!("{c}");
            }
            Ok(0)
        }
        Command::Check {
            kb,
            theory,
            system,
            limits,
        } => {
            let kb = load_kb(&kb)?;
            let y = theory_from(kb.y(), theory.as_ref())?;
            let engine = limits.engine();
            let comp = engine.compile_omega(&kb.x(), &y, system)?;
            let ok = check_instance(&engine, &comp)?;
            Ok(if ok { 0 } else { EXIT_FALSE })
        }
        Command::Oracle {
            formula,
            system,
            max_depth,
            max_branching,
        } => {
            let f = parse(&formula)?;
            let mut bounds = OracleBounds::sufficient_for(&f);
            if let Some(d) = max_depth {
                bounds.max_depth = d;
            }
            if let Some(b) = max_branching {
                bounds.max_branching = b;
            }
            match sat_by_enumeration(&f, system, &bounds)? {
                OracleOutcome::Sat(m, w) => {
                    println!("sat");
                    println!("model (world {w}): {}", serde_json::to_string(&m).map_err(Error::from)?);
                    Ok(0)
                }
                OracleOutcome::UnsatWithinBounds => {
                    let definitive = bounds.covers(&f);
                    println!("unsat within bounds{}", if definitive { "" } else { " (bounds too small to be definitive)" });
                    Ok(EXIT_FALSE)
                }
            }
        }
    }
}

fn line(name: &str, ok: bool, detail: String) -> bool {
    println!("{} {name}: {detail}", if ok { "ok  " } else { "FAIL" });
    ok
}

fn check_instance(engine: &Engine, c: &CompilationResult) -> modal_tpi::Result<bool> {
    let r = &engine.reasoner;
    let sys = c.system;
    let mut all = true;

    let mut unsound = 0;
    for th in &c.theta {
        if !r.entails_mod(&c.x, &c.box_y, th, sys)? {
            unsound += 1;
        }
    }
    all &= line("soundness", unsound == 0, format!("{unsound} of {} theta members not implied", c.theta.len()));

    let mut comparable = 0;
    for a in &c.theta {
        for b in &c.theta {
            if a != b && r.entails_mod(a, &c.box_y, b, sys)? {
                comparable += 1;
            }
        }
    }
    all &= line("minimality", comparable == 0, format!("{comparable} entailed pairs"));

    let omega = c.omega_formula();
    let eq = r.equivalent_global(&omega, &c.x, sys)?;
    all &= line("equivalence", eq, format!("omega equivalent to X under global consequence: {eq}"));

    let pi = engine.prime_implicates(&Formula::and([c.x.clone(), c.box_y.clone()]), sys)?;
    all &= line(
        "size",
        c.theta.len() <= pi.len(),
        format!("|theta| = {}, |pi(X & []Y)| = {}", c.theta.len(), pi.len()),
    );

    let mut vars: Vec<String> = c.x.vars().union(&c.y.vars()).cloned().collect();
    if vars.is_empty() {
        vars.push("p".into());
    }
    let vocab = ClauseVocabulary {
        variables: vars,
        max_disjuncts: 2,
        max_depth: 1,
    };
    let queries = vocab.clauses();
    let mut disagree = 0;
    for q in &queries {
        let compiled = qa(r, c, q, false)?.answer;
        let direct = r.entails_mod(&c.x, &c.box_y, q, sys)?;
        if compiled != direct {
            disagree += 1;
        }
    }
    all &= line(
        "coverage",
        disagree == 0,
        format!("{disagree} of {} queries answered differently", queries.len()),
    );
    Ok(all)
}
