use std::collections::HashSet;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::ast::AstDocument;
use super::parser::parse;
use super::token::{LexError, ParseError};

#[derive(Debug, Error)]
pub enum IdlError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("include cycle through {0}")]
    IncludeCycle(PathBuf),
}

/// Loads a `.tsch` file and, transitively, everything it includes.
///
/// Include paths are resolved relative to the including file. The root
/// document comes first; includes follow in depth-first order. Include
/// graphs must form a DAG.
pub fn load_documents(root: &Path) -> Result<Vec<AstDocument>, IdlError> {
    let mut docs = Vec::new();
    let mut visited = HashSet::new();
    let mut in_progress = HashSet::new();
    load_one(root, &mut docs, &mut visited, &mut in_progress)?;
    Ok(docs)
}

fn load_one(
    path: &Path,
    docs: &mut Vec<AstDocument>,
    visited: &mut HashSet<PathBuf>,
    in_progress: &mut HashSet<PathBuf>,
) -> Result<(), IdlError> {
    let canonical = path
        .canonicalize()
        .map_err(|source| IdlError::Io { path: path.to_path_buf(), source })?;
    if in_progress.contains(&canonical) {
        return Err(IdlError::IncludeCycle(canonical));
    }
    if !visited.insert(canonical.clone()) {
        return Ok(());
    }
    in_progress.insert(canonical.clone());

    let source = std::fs::read_to_string(path)
        .map_err(|source| IdlError::Io { path: path.to_path_buf(), source })?;
    let doc = parse(&source, &path.display().to_string())?;
    let includes = doc.includes.clone();
    let position = docs.len();
    docs.insert(position, doc);

    let base = path.parent().unwrap_or_else(|| Path::new("."));
    for include in includes {
        load_one(&base.join(&include), docs, visited, in_progress)?;
    }
    in_progress.remove(&canonical);
    Ok(())
}
