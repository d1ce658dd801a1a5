use std::collections::BTreeSet;
use std::fmt::Write;

use super::{code_type, ClassProfile};
use crate::convert::ClassDef;
use crate::emit::EmitError;

/// Java-flavoured skeleton: private typed fields, a class header and method
/// stubs with typed signatures and empty bodies.
pub struct JavaLike;

/// Maps a model code type to a Java type and the import it needs, if any.
/// Unknown types pass through verbatim.
fn java_type(ty: &str) -> (String, Option<&'static str>) {
    let mapped = match ty.to_ascii_lowercase().as_str() {
        "string" | "text" => "String",
        "char" => "char",
        "int" | "integer" => "int",
        "long" => "long",
        "short" => "short",
        "bool" | "boolean" => "boolean",
        "float" => "float",
        "double" => "double",
        "decimal" | "number" => return ("BigDecimal".into(), Some("java.math.BigDecimal")),
        "date" => return ("LocalDate".into(), Some("java.time.LocalDate")),
        "datetime" | "timestamp" => return ("LocalDateTime".into(), Some("java.time.LocalDateTime")),
        "uuid" => return ("UUID".into(), Some("java.util.UUID")),
        _ => return (ty.to_string(), None),
    };
    (mapped.to_string(), None)
}

impl ClassProfile for JavaLike {
    fn name(&self) -> &str {
        "java-like"
    }

    fn extension(&self) -> &str {
        "java"
    }

    fn render(&self, class: &ClassDef) -> Result<String, EmitError> {
        let mut imports = BTreeSet::new();
        let mut ty = |member: &str, t: Option<&str>| -> Result<String, EmitError> {
            let (mapped, import) = java_type(code_type(class, member, t)?);
            imports.extend(import);
            Ok(mapped)
        };

        let mut body = String::new();
        for p in &class.properties {
            let t = ty(&p.name, p.code_type.as_deref())?;
            if p.identifier {
                body.push_str("    /** Object identifier. */\n");
            }
            let _ = writeln!(body, "    {} {t} {};", p.visibility.keyword(), p.name);
        }
        for m in &class.methods {
            let mut params = Vec::new();
            for p in &m.params {
                params.push(format!("{} {}", ty(&format!("{}.{}", m.name, p.name), p.code_type.as_deref())?, p.name));
            }
            let ret = match &m.returns {
                None => "void".to_string(),
                Some(r) => ty(&m.name, r.as_deref())?,
            };
            if !body.is_empty() {
                body.push('\n');
            }
            let _ = writeln!(body, "    {} {ret} {}({}) {{\n    }}", m.visibility.keyword(), m.name, params.join(", "));
        }

        let mut out = String::new();
        for import in &imports {
            let _ = writeln!(out, "import {import};");
        }
        if !imports.is_empty() {
            out.push('\n');
        }
        let _ = writeln!(out, "/**\n * Generated from archetype {}.", class.archetype);
        if let Some(id) = class.identifier() {
            let _ = writeln!(out, " * Identifier: {}.", id.name);
        }
        out.push_str(" */\n");
        let _ = writeln!(out, "public class {} {{", class.name);
        if !body.is_empty() {
            out.push('\n');
            out.push_str(&body);
        }
        out.push_str("}\n");
        Ok(out)
    }
}
