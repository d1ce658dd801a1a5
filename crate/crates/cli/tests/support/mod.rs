#![allow(dead_code)]

pub mod oracle;
pub mod sqlexec;

use std::fs;
use std::path::PathBuf;

use dooml_core::model::Model;
use dooml_core::pipeline::parse_sources;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Fixture paths, sorted by file name.
pub fn fixtures() -> Vec<PathBuf> {
    let mut paths: Vec<PathBuf> = fs::read_dir(fixtures_dir())
        .expect("fixtures directory")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "dooml"))
        .collect();
    paths.sort();
    paths
}

pub fn fixture_path(name: &str) -> PathBuf {
    fixtures_dir().join(format!("{name}.dooml"))
}

pub fn load_fixture(name: &str) -> Model {
    let text = fs::read_to_string(fixture_path(name)).expect("fixture");
    parse_sources(&[text]).unwrap_or_else(|d| panic!("{name}: {d:?}"))
}

pub fn doomlc() -> std::process::Command {
    std::process::Command::new(env!("CARGO_BIN_EXE_doomlc"))
}
