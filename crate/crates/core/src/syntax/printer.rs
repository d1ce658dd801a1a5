use std::fmt::Write;

use crate::model::*;

const INDENT: &str = "    ";

/// Renders `model` in canonical form. Archetypes come first, then
/// relationships, each separated by a blank line. Empty sections are omitted
/// and an empty model prints as the empty string.
pub fn pretty_print(model: &Model) -> String {
    let mut items = Vec::new();
    for arch in &model.archetypes {
        items.push(archetype(arch));
    }
    for rel in &model.relationships {
        items.push(relationship(rel));
    }
    items.join("\n")
}

fn field(out: &mut String, depth: usize, f: &Field) {
    let pk = if f.primary_key { " PK" } else { "" };
    let _ = writeln!(out, "{}{} {}: {}{}", INDENT.repeat(depth), f.classifier, f.name, f.ty, pk);
}

pub(crate) fn method_signature(m: &Method) -> String {
    let params: Vec<String> = m.params.iter().map(|p| format!("{}: {}", p.name, p.ty)).collect();
    let mut s = format!("{} {}({})", m.classifier, m.name, params.join(", "));
    if let Some(ret) = &m.returns {
        let _ = write!(s, ": {ret}");
    }
    s
}

pub(crate) fn relation_text(e: &RelationalEntry) -> String {
    format!(
        "{} {} -> {}.{}.{} {}",
        e.classifier,
        e.local_field,
        e.target_kind,
        e.target_archetype,
        e.target_field,
        e.participation.marker()
    )
}

fn archetype(a: &Archetype) -> String {
    let mut out = format!("archetype {} {} {{", a.kind, a.name);
    if a.fields.is_empty() && a.methods.is_empty() && a.relations.is_empty() {
        out.push_str("}\n");
        return out;
    }
    out.push('\n');
    if !a.fields.is_empty() {
        out.push_str(INDENT);
        out.push_str("fields {\n");
        for f in &a.fields {
            field(&mut out, 2, f);
        }
        out.push_str(INDENT);
        out.push_str("}\n");
    }
    if !a.methods.is_empty() {
        out.push_str(INDENT);
        out.push_str("methods {\n");
        for m in &a.methods {
            let _ = writeln!(out, "{}{}", INDENT.repeat(2), method_signature(m));
        }
        out.push_str(INDENT);
        out.push_str("}\n");
    }
    if !a.relations.is_empty() {
        out.push_str(INDENT);
        out.push_str("relations {\n");
        for e in &a.relations {
            let _ = writeln!(out, "{}{}", INDENT.repeat(2), relation_text(e));
        }
        out.push_str(INDENT);
        out.push_str("}\n");
    }
    out.push_str("}\n");
    out
}

fn relationship(r: &Relationship) -> String {
    let mut shape = String::new();
    for (i, end) in r.ends.iter().enumerate() {
        if i == 0 {
            let _ = write!(shape, "{} {}", end.archetype, end.cardinality.symbol());
        } else {
            let _ = write!(shape, " -- {} {}", end.cardinality.symbol(), end.archetype);
        }
    }
    let mut out = format!("relationship {} ({}) {{", r.name, shape);
    let totals: Vec<&str> = r.ends.iter().filter(|e| e.total).map(|e| e.archetype.as_str()).collect();
    if totals.is_empty() && r.attributes.is_empty() {
        out.push_str("}\n");
        return out;
    }
    out.push('\n');
    if !totals.is_empty() {
        let _ = writeln!(out, "{INDENT}total: {};", totals.join(", "));
    }
    if !r.attributes.is_empty() {
        out.push_str(INDENT);
        out.push_str("attributes {\n");
        for f in &r.attributes {
            field(&mut out, 2, f);
        }
        out.push_str(INDENT);
        out.push_str("}\n");
    }
    out.push_str("}\n");
    out
}
