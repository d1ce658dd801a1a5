use std::fmt::Write;

use super::{code_type, ClassProfile};
use crate::convert::ClassDef;
use crate::emit::EmitError;

pub struct CSharpLike;

fn csharp_type(ty: &str) -> String {
    match ty.to_ascii_lowercase().as_str() {
        "string" | "text" => "string",
        "char" => "char",
        "int" | "integer" => "int",
        "long" => "long",
        "short" => "short",
        "bool" | "boolean" => "bool",
        "float" => "float",
        "double" => "double",
        "decimal" | "number" => "decimal",
        "date" => "DateOnly",
        "datetime" | "timestamp" => "DateTime",
        "uuid" => "Guid",
        _ => return ty.to_string(),
    }
    .to_string()
}

impl ClassProfile for CSharpLike {
    fn name(&self) -> &str {
        "csharp-like"
    }

    fn extension(&self) -> &str {
        "cs"
    }

    fn render(&self, class: &ClassDef) -> Result<String, EmitError> {
        let mut body = Vec::new();
        for p in &class.properties {
            let t = csharp_type(code_type(class, &p.name, p.code_type.as_deref())?);
            let doc = if p.identifier { "    /// <summary>Object identifier.</summary>\n" } else { "" };
            body.push(format!("{doc}    {} {t} {};", p.visibility.keyword(), p.name));
        }
        for m in &class.methods {
            let mut params = Vec::new();
            for p in &m.params {
                let t = code_type(class, &format!("{}.{}", m.name, p.name), p.code_type.as_deref())?;
                params.push(format!("{} {}", csharp_type(t), p.name));
            }
            let ret = match &m.returns {
                None => "void".to_string(),
                Some(r) => csharp_type(code_type(class, &m.name, r.as_deref())?),
            };
            body.push(format!(
                "    {} {ret} {}({})\n    {{\n    }}",
                m.visibility.keyword(),
                m.name,
                params.join(", ")
            ));
        }
        let mut out = String::new();
        let _ = writeln!(out, "/// <summary>Generated from archetype {}.</summary>", class.archetype);
        let _ = writeln!(out, "public class {}\n{{", class.name);
        if !body.is_empty() {
            out.push_str(&body.join("\n"));
            out.push('\n');
        }
        out.push_str("}\n");
        Ok(out)
    }
}
