use std::fmt;

use serde::Serialize;

use super::resource_name;
use crate::model::{class_name, Archetype, Lifeline, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum HttpMethod {
    Get,
    Post,
    Put,
    Delete,
}

impl HttpMethod {
    /// Lowercase form used as an OpenAPI path-item key.
    pub fn key(self) -> &'static str {
        match self {
            HttpMethod::Get => "get",
            HttpMethod::Post => "post",
            HttpMethod::Put => "put",
            HttpMethod::Delete => "delete",
        }
    }
}

impl fmt::Display for HttpMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key().to_ascii_uppercase())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiProperty {
    pub name: String,
    pub code_type: Option<String>,
    pub identifier: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Endpoint {
    pub method: HttpMethod,
    pub path: String,
    pub operation_id: String,
    /// Set for method-derived endpoints.
    pub action: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiResource {
    pub name: String,
    pub archetype: String,
    /// Schema name in `components.schemas`.
    pub schema: String,
    pub properties: Vec<ApiProperty>,
    pub endpoints: Vec<Endpoint>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ApiIr {
    pub resources: Vec<ApiResource>,
}

fn has_api_members(arch: &Archetype) -> bool {
    arch.fields.iter().any(|f| f.classifier.lifeline.in_api())
        || arch.methods.iter().any(|m| m.classifier.lifeline.in_api())
}

fn endpoints(arch: &Archetype, resource: &str, class: &str) -> Vec<Endpoint> {
    let collection = format!("/{resource}");
    let item = format!("/{resource}/{{id}}");
    let plural = class_name(resource);
    let mut out = vec![
        Endpoint {
            method: HttpMethod::Get,
            path: collection.clone(),
            operation_id: format!("list{plural}"),
            action: None,
        },
        Endpoint { method: HttpMethod::Get, path: item.clone(), operation_id: format!("get{class}"), action: None },
        Endpoint { method: HttpMethod::Post, path: collection, operation_id: format!("create{class}"), action: None },
        Endpoint { method: HttpMethod::Put, path: item.clone(), operation_id: format!("update{class}"), action: None },
        Endpoint {
            method: HttpMethod::Delete,
            path: item.clone(),
            operation_id: format!("delete{class}"),
            action: None,
        },
    ];
    for m in arch.methods.iter().filter(|m| m.classifier.lifeline == Lifeline::A) {
        out.push(Endpoint {
            method: HttpMethod::Post,
            path: format!("{item}/{}", m.name),
            operation_id: format!("invoke{class}{}", upper_first(&m.name)),
            action: Some(m.name.clone()),
        });
    }
    out
}

fn upper_first(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// One resource per non-draft archetype with at least one A or B member.
/// Properties are the A and B fields; A methods become action endpoints.
pub fn to_api_ir(model: &Model) -> ApiIr {
    let resources = model
        .archetypes
        .iter()
        .filter(|a| !a.kind.is_draft() && has_api_members(a))
        .map(|arch| {
            let name = resource_name(&arch.name);
            let class = class_name(&arch.name);
            ApiResource {
                endpoints: endpoints(arch, &name, &class),
                properties: arch
                    .fields
                    .iter()
                    .filter(|f| f.classifier.lifeline.in_api())
                    .map(|f| ApiProperty {
                        name: f.name.clone(),
                        code_type: f.ty.code.clone(),
                        identifier: f.primary_key,
                    })
                    .collect(),
                name,
                archetype: arch.name.clone(),
                schema: class,
            }
        })
        .collect();
    ApiIr { resources }
}
