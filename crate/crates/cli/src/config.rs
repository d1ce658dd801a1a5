use std::fs;
use std::path::{Path, PathBuf};

use dooml_core::convert::Dialect;
use dooml_core::emit::EmitConfig;
use serde::Deserialize;

pub const CONFIG_FILE: &str = "dooml.toml";

/// On-disk project settings. Every key is optional; unknown keys are
/// rejected so that typos do not silently fall back to defaults.
#[derive(Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub dialect: Option<String>,
    pub profile: Option<String>,
    pub out_dir: Option<PathBuf>,
    pub emit_assertions: Option<bool>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub dialect: Option<Dialect>,
    pub profile: Option<String>,
    pub out_dir: Option<PathBuf>,
    pub emit_assertions: bool,
}

pub fn parse(text: &str) -> Result<FileConfig, String> {
    toml::from_str(text).map_err(|e| e.to_string())
}

/// Reads `explicit`, or `dooml.toml` in the working directory when present.
pub fn load(explicit: Option<&Path>) -> Result<FileConfig, String> {
    let path = match explicit {
        Some(p) => p.to_path_buf(),
        None => {
            let p = PathBuf::from(CONFIG_FILE);
            if !p.exists() {
                return Ok(FileConfig::default());
            }
            p
        }
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn resolve(file: FileConfig, flags: Overrides) -> Result<EmitConfig, String> {
    let defaults = EmitConfig::default();
    let dialect = match (flags.dialect, file.dialect) {
        (Some(d), _) => d,
        (None, Some(text)) => text.parse()?,
        (None, None) => defaults.dialect,
    };
    Ok(EmitConfig {
        dialect,
        profile: flags.profile.or(file.profile).unwrap_or(defaults.profile),
        out_dir: flags.out_dir.or(file.out_dir).unwrap_or(defaults.out_dir),
        emit_assertions: flags.emit_assertions || file.emit_assertions.unwrap_or(defaults.emit_assertions),
    })
}
