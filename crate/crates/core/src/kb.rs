//! Knowledge-base files and compilation persistence.
//!
//! A KB file holds one formula per line; `#` starts a comment and blank lines
//! are skipped. Lines after a `[theory]` header form the theory `y`. Both
//! parts are read conjunctively.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::parser::parse;
use crate::pi_engine::{CompilationResult, Stats};
use crate::semantics::SystemId;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnowledgeBaseFile {
    pub source: PathBuf,
    pub formulas: Vec<Formula>,
    pub theory: Option<Vec<Formula>>,
}

impl KnowledgeBaseFile {
    pub fn x(&self) -> Formula {
        Formula::and(self.formulas.iter().cloned())
    }

    pub fn y(&self) -> Option<Formula> {
        self.theory.as_ref().map(|t| Formula::and(t.iter().cloned()))
    }
}

pub fn parse_kb(text: &str, source: impl Into<PathBuf>) -> Result<KnowledgeBaseFile> {
    let mut kb = KnowledgeBaseFile {
        source: source.into(),
        formulas: Vec::new(),
        theory: None,
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.eq_ignore_ascii_case("[theory]") {
            kb.theory.get_or_insert_with(Vec::new);
            continue;
        }
        let f = parse(line).map_err(|e| e.at_line(i + 1))?;
        match kb.theory.as_mut() {
            Some(t) => t.push(f),
            None => kb.formulas.push(f),
        }
    }
    Ok(kb)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_kb(path: impl AsRef<Path>) -> Result<KnowledgeBaseFile> {
    let path = path.as_ref();
    parse_kb(&read(path)?, path)
}

#[derive(Serialize, Deserialize)]
struct StatsFile {
    nb_cl_candidates: usize,
    nb_cl_theta: usize,
    entailment_calls: u64,
    elapsed_ms: u64,
}

#[derive(Serialize, Deserialize)]
struct CompilationFile {
    schema: u64,
    system: SystemId,
    x: String,
    y: String,
    box_y: String,
    candidates: Vec<String>,
    theta: Vec<String>,
    stats: StatsFile,
    horn_advisory: bool,
}

pub fn compilation_to_json(c: &CompilationResult) -> Result<String> {
    let strs = |fs: &[Formula]| fs.iter().map(ToString::to_string).collect();
    let file = CompilationFile {
        schema: SCHEMA_VERSION,
        system: c.system,
        x: c.x.to_string(),
        y: c.y.to_string(),
        box_y: c.box_y.to_string(),
        candidates: strs(&c.candidates),
        theta: strs(&c.theta),
        stats: StatsFile {
            nb_cl_candidates: c.stats.nb_cl_candidates,
            nb_cl_theta: c.stats.nb_cl_theta,
            entailment_calls: c.stats.entailment_calls,
            elapsed_ms: c.stats.elapsed_ms,
        },
        horn_advisory: c.horn_advisory,
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn compilation_from_json(text: &str) -> Result<CompilationResult> {
    let probe: serde_json::Value = serde_json::from_str(text)?;
    let found = probe.get("schema").and_then(|v| v.as_u64()).unwrap_or(0);
    if found != SCHEMA_VERSION {
        return Err(Error::Schema {
            found,
            expected: SCHEMA_VERSION,
        });
    }
    let file: CompilationFile = serde_json::from_value(probe)?;
    let parse_all = |v: &[String]| v.iter().map(|s| parse(s)).collect::<Result<Vec<_>>>();
    Ok(CompilationResult {
        x: parse(&file.x)?,
        y: parse(&file.y)?,
        system: file.system,
        candidates: parse_all(&file.candidates)?,
        theta: parse_all(&file.theta)?,
        box_y: parse(&file.box_y)?,
        stats: Stats {
            nb_cl_candidates: file.stats.nb_cl_candidates,
            nb_cl_theta: file.stats.nb_cl_theta,
            entailment_calls: file.stats.entailment_calls,
            elapsed_ms: file.stats.elapsed_ms,
        },
        horn_advisory: file.horn_advisory,
    })
}

pub fn save_compilation(c: &CompilationResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, compilation_to_json(c)? + "\n").map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_compilation(path: impl AsRef<Path>) -> Result<CompilationResult> {
    compilation_from_json(&read(path.as_ref())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pi_engine::compile_omega;

    #[test]
    fn conjunctive_reading() {
        let kb = parse_kb("p1 | p2\n<>[]~p3\n", "kb.txt").unwrap();
        assert_eq!(kb.x(), parse("(p1 | p2) & <>[]~p3").unwrap());
        assert_eq!(kb.y(), None);
    }

    #[test]
    fn comments_blank_lines_and_theory() {
        let text = "# header\n\n(p1 | p2)  # first\n<>[]~p3\n[]<>p2\n[theory]\np1 | p2\n";
        let kb = parse_kb(text, "kb.txt").unwrap();
        assert_eq!(kb.formulas.len(), 3);
        assert_eq!(kb.y(), Some(parse("p1 | p2").unwrap()));
    }

    #[test]
    fn parse_errors_cite_the_line() {
        match parse_kb("p1 |", "kb.txt") {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        match parse_kb("# c\np\n(q &\n", "kb.txt") {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let x = parse("(p1 | p2) & <>[]~p3 & []<>p2").unwrap();
        let c = compile_omega(&x, &parse("p1 | p2").unwrap(), SystemId::T).unwrap();
        let back = compilation_from_json(&compilation_to_json(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        save_compilation(&c, &path).unwrap();
        assert_eq!(load_compilation(&path).unwrap().theta, c.theta);
    }

    #[test]
    fn schema_mismatch() {
        let c = compile_omega(&parse("p").unwrap(), &Formula::True, SystemId::K).unwrap();
        let text = compilation_to_json(&c).unwrap().replace("\"schema\": 1", "\"schema\": 2");
        assert!(matches!(
            compilation_from_json(&text),
            Err(Error::Schema { found: 2, expected: 1 })
        ));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(load_kb("/nonexistent/kb.txt"), Err(Error::Io { .. })));
    }
}
