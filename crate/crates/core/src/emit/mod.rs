//! Artifact emitters.
//!
//! Every emitter is a pure function from an IR (or the model) to
//! [`EmittedFile`]s. Nothing touches the filesystem until [`write_files`],
//! which is only called once every artifact has rendered successfully.

mod api;
mod classes;
mod dot;
pub mod profiles;
mod sql;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use api::emit_api;
pub use classes::{emit_classes, emit_classes_with};
pub use dot::emit_dot;
pub use profiles::{ClassProfile, ProfileRegistry};
pub use sql::emit_sql;

use crate::convert::Dialect;

pub const DEFAULT_PROFILE: &str = "java-like";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmitConfig {
    pub dialect: Dialect,
    pub profile: String,
    pub out_dir: PathBuf,
    pub emit_assertions: bool,
}

impl Default for EmitConfig {
    fn default() -> Self {
        EmitConfig {
            dialect: Dialect::MySql,
            profile: DEFAULT_PROFILE.to_string(),
            out_dir: PathBuf::from("out"),
            emit_assertions: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmittedFile {
    /// Forward-slash path relative to the output directory.
    pub relative_path: String,
    pub contents: String,
    /// Hex SHA-256 of `contents`.
    pub checksum: String,
}

impl EmittedFile {
    pub fn new(relative_path: impl Into<String>, contents: impl Into<String>) -> Self {
        let contents = contents.into().replace("\r\n", "\n");
        let checksum = hex::encode(Sha256::digest(contents.as_bytes()));
        EmittedFile { relative_path: relative_path.into(), contents, checksum }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("unknown class profile `{name}` (available: {available})")]
    UnknownProfile { name: String, available: String },
    #[error("foreign key `{table}.{column}` references missing table `{target}`")]
    DanglingForeignKey { table: String, column: String, target: String },
    #[error("`{owner}.{member}` has no database type")]
    MissingDbType { owner: String, member: String },
    #[error("`{owner}.{member}` has no code type")]
    MissingCodeType { owner: String, member: String },
    #[error("`{resource}.{field}`: code type `{code_type}` has no JSON schema mapping")]
    UnmappableType { resource: String, field: String, code_type: String },
    #[error("YAML serialization failed: {0}")]
    Yaml(String),
}

/// Writes `files` under `root`. Each file goes to a temporary sibling first
/// and is renamed into place, so readers never observe partial contents.
pub fn write_files(root: &Path, files: &[EmittedFile]) -> io::Result<()> {
    for file in files {
        let path = root.join(&file.relative_path);
        let parent = path.parent().unwrap_or(root);
        fs::create_dir_all(parent)?;
        let mut tmp = tempfile::NamedTempFile::new_in(parent)?;
        tmp.write_all(file.contents.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| e.error)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksum_is_sha256_hex() {
        let f = EmittedFile::new("a.txt", "abc");
        assert_eq!(f.checksum, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn line_endings_are_normalized() {
        assert_eq!(EmittedFile::new("a", "x\r\ny\n").contents, "x\ny\n");
    }

    #[test]
    fn write_creates_directories_and_replaces() {
        let dir = tempfile::tempdir().unwrap();
        write_files(dir.path(), &[EmittedFile::new("sql/schema.sql", "one")]).unwrap();
        write_files(dir.path(), &[EmittedFile::new("sql/schema.sql", "two")]).unwrap();
        assert_eq!(fs::read_to_string(dir.path().join("sql/schema.sql")).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path().join("sql")).unwrap().count(), 1);
    }
}
