use serde_yaml::{Mapping, Value};

use super::{EmitConfig, EmitError, EmittedFile};
use crate::convert::{ApiIr, ApiResource, Endpoint, HttpMethod};

fn map<const N: usize>(entries: [(&str, Value); N]) -> Value {
    Value::Mapping(entries.into_iter().map(|(k, v)| (Value::from(k), v)).collect())
}

fn s(text: &str) -> Value {
    Value::from(text)
}

/// JSON schema for a model code type.
fn json_schema(code_type: &str) -> Option<Value> {
    let (ty, format) = match code_type.to_ascii_lowercase().as_str() {
        "string" | "char" | "text" => ("string", None),
        "uuid" => ("string", Some("uuid")),
        "int" | "integer" | "long" | "short" => ("integer", None),
        "bool" | "boolean" => ("boolean", None),
        "decimal" | "float" | "double" | "number" => ("number", None),
        "date" => ("string", Some("date")),
        "datetime" | "timestamp" => ("string", Some("date-time")),
        _ => return None,
    };
    Some(match format {
        Some(f) => map([("type", s(ty)), ("format", s(f))]),
        None => map([("type", s(ty))]),
    })
}

fn schema_ref(res: &ApiResource) -> Value {
    map([("$ref", s(&format!("#/components/schemas/{}", res.schema)))])
}

fn json_content(schema: Value) -> Value {
    map([("application/json", map([("schema", schema)]))])
}

fn operation(res: &ApiResource, ep: &Endpoint) -> Value {
    let mut op = Mapping::new();
    op.insert(s("operationId"), s(&ep.operation_id));
    op.insert(s("tags"), Value::Sequence(vec![s(&res.name)]));
    let item = || map([("description", s("OK")), ("content", json_content(schema_ref(res)))]);
    let (code, response) = match (ep.method, &ep.action, ep.path.ends_with("{id}")) {
        (HttpMethod::Post, Some(action), _) => {
            op.insert(s("summary"), s(&format!("Invoke {action}")));
            ("200", map([("description", s("OK"))]))
        }
        (HttpMethod::Get, _, false) => {
            op.insert(s("summary"), s(&format!("List {}", res.name)));
            let list = map([("type", s("array")), ("items", schema_ref(res))]);
            ("200", map([("description", s("OK")), ("content", json_content(list))]))
        }
        (HttpMethod::Get, _, true) => ("200", item()),
        (HttpMethod::Post, None, _) => {
            ("201", map([("description", s("Created")), ("content", json_content(schema_ref(res)))]))
        }
        (HttpMethod::Put, ..) => ("200", item()),
        (HttpMethod::Delete, ..) => ("204", map([("description", s("No Content"))])),
    };
    if matches!(ep.method, HttpMethod::Post | HttpMethod::Put) && ep.action.is_none() {
        op.insert(s("requestBody"), map([("required", Value::Bool(true)), ("content", json_content(schema_ref(res)))]));
    }
    op.insert(s("responses"), map([(code, response)]));
    Value::Mapping(op)
}

fn component(res: &ApiResource) -> Result<(Value, Option<Value>), EmitError> {
    let mut properties = Mapping::new();
    let mut id_schema = None;
    for p in &res.properties {
        let ty = p.code_type.as_deref().unwrap_or("");
        let schema = json_schema(ty).ok_or_else(|| EmitError::UnmappableType {
            resource: res.name.clone(),
            field: p.name.clone(),
            code_type: ty.to_string(),
        })?;
        if p.identifier {
            id_schema = Some(schema.clone());
        }
        properties.insert(s(&p.name), schema);
    }
    let mut obj = Mapping::new();
    obj.insert(s("type"), s("object"));
    obj.insert(s("properties"), Value::Mapping(properties));
    if let Some(id) = res.properties.iter().find(|p| p.identifier) {
        obj.insert(s("required"), Value::Sequence(vec![s(&id.name)]));
    }
    Ok((Value::Mapping(obj), id_schema))
}

/// Renders `api/openapi.yaml`, an OpenAPI 3.0.3 document with one component
/// schema per resource and the resource's endpoints under `paths`.
pub fn emit_api(api: &ApiIr, _config: &EmitConfig) -> Result<EmittedFile, EmitError> {
    let mut paths = Mapping::new();
    let mut schemas = Mapping::new();
    for res in &api.resources {
        let (schema, id_schema) = component(res)?;
        schemas.insert(s(&res.schema), schema);
        let id_param = map([
            ("name", s("id")),
            ("in", s("path")),
            ("required", Value::Bool(true)),
            ("schema", id_schema.unwrap_or_else(|| map([("type", s("string"))]))),
        ]);
        for ep in &res.endpoints {
            let key = s(&ep.path);
            if !paths.contains_key(&key) {
                let mut item = Mapping::new();
                if ep.path.contains("{id}") {
                    item.insert(s("parameters"), Value::Sequence(vec![id_param.clone()]));
                }
                paths.insert(key.clone(), Value::Mapping(item));
            }
            if let Some(Value::Mapping(item)) = paths.get_mut(&key) {
                item.insert(s(ep.method.key()), operation(res, ep));
            }
        }
    }

    let doc = map([
        ("openapi", s("3.0.3")),
        ("info", map([("title", s("DooML API")), ("version", s("1.0.0"))])),
        ("paths", Value::Mapping(paths)),
        ("components", map([("schemas", Value::Mapping(schemas))])),
    ]);
    let text = serde_yaml::to_string(&doc).map_err(|e| EmitError::Yaml(e.to_string()))?;
    Ok(EmittedFile::new("api/openapi.yaml", text))
}
