use serde::Serialize;

use crate::model::{class_name, Model, Visibility};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassProperty {
    pub name: String,
    pub visibility: Visibility,
    pub code_type: Option<String>,
    /// Set for the field carrying `PK`.
    pub identifier: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassParam {
    pub name: String,
    pub code_type: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassMethod {
    pub name: String,
    pub visibility: Visibility,
    pub params: Vec<ClassParam>,
    /// `None` for no declared output; `Some(None)` for an output whose code
    /// type is missing.
    pub returns: Option<Option<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassDef {
    pub name: String,
    pub archetype: String,
    pub properties: Vec<ClassProperty>,
    pub methods: Vec<ClassMethod>,
}

impl ClassDef {
    pub fn identifier(&self) -> Option<&ClassProperty> {
        self.properties.iter().find(|p| p.identifier)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ClassIr {
    pub classes: Vec<ClassDef>,
}

/// One class per non-draft archetype. Fields and methods on the A, B and C
/// lifelines become properties and methods; visibility carries over as is.
pub fn to_class_ir(model: &Model) -> ClassIr {
    let classes = model
        .archetypes
        .iter()
        .filter(|a| !a.kind.is_draft())
        .map(|arch| ClassDef {
            name: class_name(&arch.name),
            archetype: arch.name.clone(),
            properties: arch
                .fields
                .iter()
                .filter(|f| f.classifier.lifeline.in_code())
                .map(|f| ClassProperty {
                    name: f.name.clone(),
                    visibility: f.classifier.visibility,
                    code_type: f.ty.code.clone(),
                    identifier: f.primary_key,
                })
                .collect(),
            methods: arch
                .methods
                .iter()
                .filter(|m| m.classifier.lifeline.in_code())
                .map(|m| ClassMethod {
                    name: m.name.clone(),
                    visibility: m.classifier.visibility,
                    params: m
                        .params
                        .iter()
                        .map(|p| ClassParam { name: p.name.clone(), code_type: p.ty.code.clone() })
                        .collect(),
                    returns: m.returns.as_ref().map(|r| r.code.clone()),
                })
                .collect(),
        })
        .collect();
    ClassIr { classes }
}
