use std::fmt::Write;

use super::EmittedFile;
use crate::model::{Archetype, ArchetypeKind, Field, Model, Relationship};
use crate::syntax::{method_signature, relation_text};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\\\""))
}

/// Escapes record-label metacharacters.
fn record_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if matches!(c, '{' | '}' | '|' | '<' | '>' | '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

/// Left-justified lines for one record compartment.
fn compartment(lines: impl Iterator<Item = String>) -> String {
    lines.map(|l| format!("{}\\l", record_escape(&l))).collect()
}

fn field_line(f: &Field) -> String {
    let pk = if f.primary_key { " PK" } else { "" };
    format!("{} {}: {}{pk}", f.classifier, f.name, f.ty)
}

fn kind_style(kind: ArchetypeKind) -> &'static str {
    match kind {
        ArchetypeKind::B => "style=solid",
        ArchetypeKind::X => "style=dashed",
        ArchetypeKind::C => "style=dotted",
        ArchetypeKind::D => "style=bold",
        ArchetypeKind::A => "style=dashed, color=blue",
    }
}

/// The most draft-like kind among the relationship's ends decides its line.
fn edge_kind(model: &Model, rel: &Relationship) -> ArchetypeKind {
    let rank = |k: ArchetypeKind| match k {
        ArchetypeKind::X => 4,
        ArchetypeKind::A => 3,
        ArchetypeKind::C => 2,
        ArchetypeKind::D => 1,
        ArchetypeKind::B => 0,
    };
    rel.ends
        .iter()
        .filter_map(|e| model.archetype(&e.archetype).map(|a| a.kind))
        .max_by_key(|&k| rank(k))
        .unwrap_or(ArchetypeKind::B)
}

fn node(out: &mut String, a: &Archetype) {
    let label = format!(
        "{{{}\\n{}|{}|{}|{}}}",
        a.kind,
        record_escape(&a.name),
        compartment(a.fields.iter().map(field_line)),
        compartment(a.methods.iter().map(method_signature)),
        compartment(a.relations.iter().map(relation_text)),
    );
    let _ = writeln!(out, "    {} [label=\"{label}\", {}];", quote(&a.name), kind_style(a.kind));
}

fn totality(rel: &Relationship) -> String {
    let total: Vec<&str> = rel.ends.iter().filter(|e| e.total).map(|e| e.archetype.as_str()).collect();
    if total.is_empty() {
        "partial".into()
    } else {
        format!("total: {}", total.join(", "))
    }
}

fn relationship(out: &mut String, model: &Model, rel: &Relationship) {
    let style = kind_style(edge_kind(model, rel));
    if let [a, b] = rel.ends.as_slice() {
        let label =
            format!("{}\\n{}..{}\\n{}", rel.name, a.cardinality.symbol(), b.cardinality.symbol(), totality(rel));
        let _ = writeln!(
            out,
            "    {} -> {} [dir=none, label={}, {style}];",
            quote(&a.archetype),
            quote(&b.archetype),
            quote(&label)
        );
        return;
    }
    let hub = quote(&format!("rel:{}", rel.name));
    let _ = writeln!(out, "    {hub} [shape=diamond, label={}, {style}];", quote(&rel.name));
    for end in &rel.ends {
        let mut label = end.cardinality.symbol().to_string();
        if end.total {
            label.push_str(" total");
        }
        let _ = writeln!(out, "    {} -> {hub} [dir=none, label={}, {style}];", quote(&end.archetype), quote(&label));
    }
}

/// Renders `diagram/model.dot`: one record node per archetype (drafts
/// included) and one edge, or a diamond for ternaries, per relationship.
pub fn emit_dot(model: &Model) -> EmittedFile {
    if model.is_empty() {
        return EmittedFile::new("diagram/model.dot", "digraph dooml {}\n");
    }
    let mut out = String::from("digraph dooml {\n    rankdir=LR;\n    node [shape=record, fontname=\"Helvetica\"];\n");
    for a in &model.archetypes {
        node(&mut out, a);
    }
    for rel in &model.relationships {
        relationship(&mut out, model, rel);
    }
    out.push_str("}\n");
    EmittedFile::new("diagram/model.dot", out)
}
