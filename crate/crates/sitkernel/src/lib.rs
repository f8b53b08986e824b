//! Operating-system side of sitkernel: the statement loop, knowledge-base
//! files and Graphviz export. The reasoning itself lives in `sitkernel-core`.

pub mod graph;
pub mod persist;
pub mod session;

use std::path::PathBuf;

pub use session::{run_script, Session, SessionState, Status, Step};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Syntax(sitkernel_core::syntax::SyntaxError),
    #[error("line {line}: `{statement}`: {source}")]
    Replay { line: usize, statement: String, source: sitkernel_core::Error },
    #[error("line {line}: `{statement}` does not belong in a knowledge-base file")]
    NotInFile { line: usize, statement: String },
}
