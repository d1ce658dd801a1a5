use super::{EmitConfig, EmitError, EmittedFile, ProfileRegistry};
use crate::convert::ClassIr;

/// One `classes/<Name>.<ext>` file per class, using the configured profile
/// from the built-in registry.
pub fn emit_classes(classes: &ClassIr, config: &EmitConfig) -> Result<Vec<EmittedFile>, EmitError> {
    emit_classes_with(classes, config, &ProfileRegistry::with_builtin())
}

pub fn emit_classes_with(
    classes: &ClassIr,
    config: &EmitConfig,
    registry: &ProfileRegistry,
) -> Result<Vec<EmittedFile>, EmitError> {
    let profile = registry.require(&config.profile)?;
    classes
        .classes
        .iter()
        .map(|class| {
            let path = format!("classes/{}.{}", class.name, profile.extension());
            Ok(EmittedFile::new(path, profile.render(class)?))
        })
        .collect()
}
