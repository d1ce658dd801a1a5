//! Parse, validate, convert and emit in one call.

use thiserror::Error;

use crate::convert::{to_api_ir, to_class_ir, to_schema_ir, ConvertError};
use crate::diagnostic::Diagnostic;
use crate::emit::{
    emit_api, emit_classes_with, emit_dot, emit_sql, EmitConfig, EmitError, EmittedFile, ProfileRegistry,
};
use crate::model::Model;
use crate::syntax::parse_model_in;
use crate::validate::validate;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("model has {} validation error(s)", .0.iter().filter(|d| d.is_error()).count())]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    Convert(#[from] ConvertError),
    #[error(transparent)]
    Emit(#[from] EmitError),
}

#[derive(Debug)]
pub struct BuildOutput {
    /// Sorted by relative path.
    pub files: Vec<EmittedFile>,
    pub warnings: Vec<Diagnostic>,
}

/// Parses every source (the index is the file id used in spans) and merges
/// the results in order. Syntax errors from all sources are reported
/// together.
pub fn parse_sources<S: AsRef<str>>(sources: &[S]) -> Result<Model, Vec<Diagnostic>> {
    let mut model = Model::new();
    let mut errors = Vec::new();
    for (file, src) in sources.iter().enumerate() {
        match parse_model_in(src.as_ref(), file) {
            Ok(m) => model.merge(m),
            Err(diags) => errors.extend(diags),
        }
    }
    if errors.is_empty() {
        Ok(model)
    } else {
        errors.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        Err(errors)
    }
}

/// Renders every artifact for `model`. Nothing is written; pass the files to
/// [`write_files`](crate::emit::write_files). The profile is checked before
/// any other work.
pub fn build(model: &Model, config: &EmitConfig, registry: &ProfileRegistry) -> Result<BuildOutput, BuildError> {
    registry.require(&config.profile)?;
    let report = validate(model);
    if !report.ok {
        return Err(BuildError::Invalid(report.diagnostics));
    }
    let schema = to_schema_ir(model)?;
    let classes = to_class_ir(model);
    let api = to_api_ir(model);

    let mut files = emit_sql(&schema, config)?;
    files.extend(emit_classes_with(&classes, config, registry)?);
    files.push(emit_api(&api, config)?);
    files.push(emit_dot(model));
    files.sort_by(|a, b| a.relative_path.cmp(&b.relative_path));
    Ok(BuildOutput { files, warnings: report.diagnostics })
}
