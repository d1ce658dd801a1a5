use std::fmt::Write;

use super::{code_type, ClassProfile};
use crate::convert::ClassDef;
use crate::emit::EmitError;

/// Language-neutral pseudocode: model types are kept as written.
pub struct Generic;

impl ClassProfile for Generic {
    fn name(&self) -> &str {
        "generic"
    }

    fn extension(&self) -> &str {
        "txt"
    }

    fn render(&self, class: &ClassDef) -> Result<String, EmitError> {
        let mut out = format!("class {}  // archetype {}\n", class.name, class.archetype);
        if let Some(id) = class.identifier() {
            let _ = writeln!(out, "    identifier {}", id.name);
        }
        for p in &class.properties {
            let t = code_type(class, &p.name, p.code_type.as_deref())?;
            let _ = writeln!(out, "    {} {}: {t}", p.visibility.keyword(), p.name);
        }
        for m in &class.methods {
            let mut params = Vec::new();
            for p in &m.params {
                let t = code_type(class, &format!("{}.{}", m.name, p.name), p.code_type.as_deref())?;
                params.push(format!("{}: {t}", p.name));
            }
            let _ = write!(out, "    {} {}({})", m.visibility.keyword(), m.name, params.join(", "));
            if let Some(r) = &m.returns {
                let _ = write!(out, ": {}", code_type(class, &m.name, r.as_deref())?);
            }
            out.push('\n');
        }
        out.push_str("end\n");
        Ok(out)
    }
}
