//! Knowledge compilation for the modal logics K and T.
//!
//! The crate computes prime implicates of modal formulas, theory prime
//! implicates of a formula modulo a boxed propositional theory, and answers
//! clausal queries against the compiled result.

pub mod error;
pub mod formula;
pub mod kb;
pub mod normal_forms;
pub mod oracle;
pub mod parser;
pub mod pi_engine;
pub mod qa;
pub mod semantics;

pub use error::{Error, Result};
pub use formula::{Class, ClauseParts, Formula, Literal, TermParts};
pub use normal_forms::{nb_cl, to_cnf, to_dnf, Cnf, Dnf};
pub use parser::parse;
pub use pi_engine::{CompilationResult, Engine, Stats};
pub use qa::{qa, qa_direct, Method, QueryVerdict, Witness};
pub use semantics::{KripkeModel, Reasoner, SystemId};
