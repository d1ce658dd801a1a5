//! Semantic checks run between parsing and conversion.
//!
//! A model whose report is `ok` is guaranteed to convert without error; every
//! precondition the converters rely on is checked here first.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::convert::{fk_column_name, one_to_one_holder, resource_name};
use crate::diagnostic::{codes, Diagnostic, Severity};
use crate::model::*;
use crate::resolve::{resolve_reference, ResolveError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
    pub ok: bool,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Warning)
    }
}

pub fn validate(model: &Model) -> ValidationReport {
    let mut v = Validator { model, out: Vec::new() };
    v.names();
    for (ai, arch) in model.archetypes.iter().enumerate() {
        v.archetype(ai, arch);
    }
    v.relationships();
    let mut diagnostics = v.out;
    diagnostics.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()).then_with(|| a.message.cmp(&b.message)));
    let ok = !diagnostics.iter().any(Diagnostic::is_error);
    ValidationReport { diagnostics, ok }
}

struct Validator<'m> {
    model: &'m Model,
    out: Vec<Diagnostic>,
}

impl<'m> Validator<'m> {
    fn span(&self, element: ElementRef) -> Span {
        self.model.spans.locate(element)
    }

    fn error(&mut self, code: &'static str, element: ElementRef, message: String) {
        let span = self.span(element);
        self.out.push(Diagnostic::error(code, message, span));
    }

    fn warn(&mut self, code: &'static str, element: ElementRef, message: String) {
        let span = self.span(element);
        self.out.push(Diagnostic::warning(code, message, span));
    }

    /// Model-wide name clashes, including names derived for tables, classes
    /// and API resources.
    fn names(&mut self) {
        let model = self.model;
        let mut tables: HashMap<String, String> = HashMap::new();
        let mut classes: HashMap<String, String> = HashMap::new();
        let mut resources: HashMap<String, String> = HashMap::new();
        for (ai, arch) in model.archetypes.iter().enumerate() {
            let at = ElementRef::Archetype(ai);
            if let Some(prev) = tables.insert(arch.name.to_lowercase(), arch.name.clone()) {
                self.error(codes::DUPLICATE, at, format!("archetype `{}` duplicates `{prev}`", arch.name));
                continue;
            }
            if arch.kind.is_draft() {
                continue;
            }
            if let Some(prev) = classes.insert(class_name(&arch.name), arch.name.clone()) {
                self.error(
                    codes::DUPLICATE,
                    at,
                    format!("archetypes `{prev}` and `{}` map to the same class name", arch.name),
                );
            }
            if let Some(prev) = resources.insert(resource_name(&arch.name), arch.name.clone()) {
                self.error(
                    codes::DUPLICATE,
                    at,
                    format!("archetypes `{prev}` and `{}` map to the same API resource", arch.name),
                );
            }
        }
        let mut rels = HashSet::new();
        for (ri, rel) in model.relationships.iter().enumerate() {
            let at = ElementRef::Relationship(ri);
            if !rels.insert(rel.name.to_lowercase()) {
                self.error(codes::DUPLICATE, at, format!("duplicate relationship `{}`", rel.name));
            } else if let Some(arch) = tables.get(&rel.name.to_lowercase()) {
                self.error(
                    codes::DUPLICATE,
                    at,
                    format!("relationship `{}` collides with the table name of archetype `{arch}`", rel.name),
                );
            }
        }
    }

    fn member_types(&mut self, at: ElementRef, what: &str, lifeline: Lifeline, types: &[&DualType]) {
        if lifeline.in_database() && types.iter().any(|t| t.db.is_none()) {
            self.warn(codes::MISSING_DB_TYPE, at, format!("database-side {what} lacks a database type"));
        }
        if lifeline.in_code() && types.iter().any(|t| t.code.is_none()) {
            self.warn(codes::MISSING_CODE_TYPE, at, format!("code-side {what} lacks a code type"));
        }
    }

    fn kind_mismatch(&mut self, at: ElementRef, kind: ArchetypeKind, lifeline: Lifeline, what: &str) {
        let mismatch = match kind {
            ArchetypeKind::A => matches!(lifeline, Lifeline::C | Lifeline::D),
            ArchetypeKind::C => lifeline == Lifeline::D,
            ArchetypeKind::D => matches!(lifeline, Lifeline::A | Lifeline::C),
            ArchetypeKind::B | ArchetypeKind::X => false,
        };
        if mismatch {
            self.warn(
                codes::KIND_MISMATCH,
                at,
                format!("{what} has lifeline {} inside a {} archetype", lifeline.letter(), kind),
            );
        }
    }

    fn archetype(&mut self, ai: usize, arch: &'m Archetype) {
        let mut names = HashSet::new();
        let mut pk_seen = false;
        for (fi, f) in arch.fields.iter().enumerate() {
            let at = ElementRef::Field(ai, fi);
            if !names.insert(f.name.to_lowercase()) {
                self.error(codes::DUPLICATE, at, format!("duplicate field `{}` in `{}`", f.name, arch.name));
            }
            if f.primary_key {
                if !f.classifier.lifeline.in_database() {
                    self.error(
                        codes::PK_NOT_IN_DATABASE,
                        at,
                        format!(
                            "primary key `{}` has lifeline {}; keys must be B or D",
                            f.name,
                            f.classifier.lifeline.letter()
                        ),
                    );
                }
                if pk_seen {
                    self.error(
                        codes::MULTIPLE_PK,
                        at,
                        format!("`{}` declares a second primary key `{}`", arch.name, f.name),
                    );
                }
                pk_seen = true;
            }
            self.member_types(at, &format!("field `{}`", f.name), f.classifier.lifeline, &[&f.ty]);
            self.kind_mismatch(at, arch.kind, f.classifier.lifeline, &format!("field `{}`", f.name));
        }

        let mut sigs = HashSet::new();
        let mut endpoints = HashSet::new();
        for (mi, m) in arch.methods.iter().enumerate() {
            let at = ElementRef::Method(ai, mi);
            if !sigs.insert((m.name.as_str(), m.params.len())) {
                self.error(
                    codes::DUPLICATE,
                    at,
                    format!("duplicate method `{}` with {} parameter(s)", m.name, m.params.len()),
                );
            } else if m.classifier.lifeline == Lifeline::A && !endpoints.insert(m.name.as_str()) {
                self.error(codes::DUPLICATE, at, format!("API methods named `{}` would share one endpoint", m.name));
            }
            let mut params = HashSet::new();
            for p in &m.params {
                if !params.insert(p.name.as_str()) {
                    self.error(codes::DUPLICATE, at, format!("duplicate parameter `{}` in `{}`", p.name, m.name));
                }
            }
            let types: Vec<&DualType> = m.params.iter().map(|p| &p.ty).chain(m.returns.iter()).collect();
            self.member_types(at, &format!("method `{}`", m.name), m.classifier.lifeline, &types);
            self.kind_mismatch(at, arch.kind, m.classifier.lifeline, &format!("method `{}`", m.name));
        }

        let mut sources = HashSet::new();
        for (ri, entry) in arch.relations.iter().enumerate() {
            self.relation(ai, ri, arch, entry, &mut sources);
        }
    }

    fn relation(
        &mut self,
        ai: usize,
        ri: usize,
        arch: &Archetype,
        entry: &RelationalEntry,
        sources: &mut HashSet<String>,
    ) {
        let at = ElementRef::Relation(ai, ri);
        let local = arch.field(&entry.local_field);
        match local {
            None => self.error(
                codes::BAD_FK_SOURCE,
                at,
                format!("`{}` has no field `{}` to hold the reference", arch.name, entry.local_field),
            ),
            Some(f) if !f.classifier.lifeline.in_database() => self.error(
                codes::BAD_FK_SOURCE,
                at,
                format!(
                    "reference source `{}` has lifeline {}; it must be a B or D field",
                    f.name,
                    f.classifier.lifeline.letter()
                ),
            ),
            Some(_) => {}
        }
        if !sources.insert(entry.local_field.to_lowercase()) {
            self.error(
                codes::DUPLICATE,
                at,
                format!("`{}` is declared as a reference more than once", entry.local_field),
            );
        }

        match resolve_reference(self.model, entry) {
            Err(e @ ResolveError::NoPrimaryKey(_)) => self.error(codes::PID_WITHOUT_PK, at, e.to_string()),
            Err(e) => self.error(codes::UNRESOLVED_TARGET, at, e.to_string()),
            Ok((target, field)) => {
                if !field.classifier.lifeline.in_database() {
                    self.error(
                        codes::UNRESOLVED_TARGET,
                        at,
                        format!("target `{}.{}` is not a database column", target.name, field.name),
                    );
                    return;
                }
                if !field.primary_key {
                    self.warn(
                        codes::FK_NOT_PK,
                        at,
                        format!("reference targets `{}.{}`, which is not the primary key", target.name, field.name),
                    );
                }
                if target.kind.is_draft() && !arch.kind.is_draft() {
                    self.warn(
                        codes::DRAFT_REFERENCED,
                        at,
                        format!("reference to draft archetype `{}` is skipped during conversion", target.name),
                    );
                }
                if let Some(local) = local {
                    let (a, b) = (local.ty.db_type(), field.ty.db_type());
                    if let (Some(a), Some(b)) = (a, b) {
                        if !a.eq_ignore_ascii_case(b) {
                            self.warn(
                                codes::FK_TYPE_MISMATCH,
                                at,
                                format!("`{}` is {a} but `{}.{}` is {b}", local.name, target.name, field.name),
                            );
                        }
                    }
                }
            }
        }
    }

    fn relationships(&mut self) {
        let model = self.model;
        // Columns added to each archetype's table by relationships so far,
        // keyed by lowercase table name then lowercase column name.
        let mut added: HashMap<String, HashMap<String, String>> = HashMap::new();

        for (ri, rel) in model.relationships.iter().enumerate() {
            let at = ElementRef::Relationship(ri);
            let mut ends = Vec::new();
            let mut resolved = true;
            for (ei, end) in rel.ends.iter().enumerate() {
                match model.archetype(&end.archetype) {
                    Some(a) => ends.push(a),
                    None => {
                        resolved = false;
                        self.error(
                            codes::UNKNOWN_END,
                            ElementRef::RelationshipEnd(ri, ei),
                            format!("relationship `{}` names unknown archetype `{}`", rel.name, end.archetype),
                        );
                    }
                }
            }

            for (fi, f) in rel.attributes.iter().enumerate() {
                let fat = ElementRef::Attribute(ri, fi);
                if f.primary_key {
                    self.error(
                        codes::PK_NOT_IN_DATABASE,
                        fat,
                        format!("relationship attribute `{}` cannot be a primary key", f.name),
                    );
                }
                if !f.classifier.lifeline.in_database() {
                    self.warn(
                        codes::KIND_MISMATCH,
                        fat,
                        format!("relationship attribute `{}` is not database-side and is ignored", f.name),
                    );
                }
                self.member_types(fat, &format!("attribute `{}`", f.name), f.classifier.lifeline, &[&f.ty]);
            }

            if rel.ends.len() == 2 && rel.ends.iter().any(|e| e.cardinality == Cardinality::M) {
                self.error(
                    codes::M_IN_BINARY,
                    at,
                    format!("relationship `{}` uses `m` but `m` is reserved for ternary relationships", rel.name),
                );
                continue;
            }
            let shape = rel.shape();
            if shape == RelationshipShape::Unsupported {
                self.error(
                    codes::UNSUPPORTED_SHAPE,
                    at,
                    format!("relationship `{}`: ternary relationships must be many on every end", rel.name),
                );
                continue;
            }
            let mut distinct = HashSet::new();
            if !rel.ends.iter().all(|e| distinct.insert(e.archetype.to_lowercase())) {
                self.error(
                    codes::UNSUPPORTED_SHAPE,
                    at,
                    format!("relationship `{}` names the same archetype on more than one end", rel.name),
                );
                continue;
            }
            if !resolved {
                continue;
            }
            if let Some(draft) = ends.iter().find(|a| a.kind.is_draft()) {
                self.warn(
                    codes::DRAFT_REFERENCED,
                    at,
                    format!(
                        "relationship `{}` touches draft archetype `{}` and is skipped during conversion",
                        rel.name, draft.name
                    ),
                );
                continue;
            }

            // (holder end, referenced end) pairs
            let links: Vec<(Option<usize>, usize)> = match shape {
                RelationshipShape::ManyToMany => (0..ends.len()).map(|i| (None, i)).collect(),
                RelationshipShape::OneToMany { one, many } => vec![(Some(many), one)],
                RelationshipShape::OneToOne => {
                    let holder = one_to_one_holder(rel);
                    vec![(Some(holder), 1 - holder)]
                }
                RelationshipShape::Unsupported => unreachable!(),
            };

            let mut junction_columns = HashSet::new();
            for &(holder, target) in &links {
                let target_arch = ends[target];
                if target_arch.primary_key().is_none() {
                    self.error(
                        codes::UNCONVERTIBLE_END,
                        ElementRef::RelationshipEnd(ri, target),
                        format!(
                            "relationship `{}` references `{}`, which has no primary key",
                            rel.name, target_arch.name
                        ),
                    );
                    continue;
                }
                let column = fk_column_name(&target_arch.name);
                match holder {
                    None => {
                        junction_columns.insert(column.to_lowercase());
                    }
                    Some(h) => {
                        let holder_arch = ends[h];
                        if !holder_arch.has_database_fields() {
                            self.error(
                                codes::UNCONVERTIBLE_END,
                                ElementRef::RelationshipEnd(ri, h),
                                format!(
                                    "relationship `{}` needs a table for `{}` to hold its key, but it has no database fields",
                                    rel.name, holder_arch.name
                                ),
                            );
                            continue;
                        }
                        self.holder_column(ri, rel, holder_arch, target_arch, &column, &mut added);
                    }
                }
            }

            let holder_arch = match links.first() {
                Some((Some(h), _)) => Some(ends[*h]),
                _ => None,
            };
            for (fi, f) in rel.attributes.iter().enumerate() {
                if !f.classifier.lifeline.in_database() {
                    continue;
                }
                let key = f.name.to_lowercase();
                let clash = match holder_arch {
                    None => junction_columns.contains(&key),
                    Some(h) => {
                        let existing = h
                            .fields
                            .iter()
                            .any(|x| x.classifier.lifeline.in_database() && x.name.to_lowercase() == key);
                        let table = added.entry(h.table_name()).or_default();
                        existing || table.insert(key, rel.name.clone()).is_some()
                    }
                };
                if clash {
                    self.error(
                        codes::UNCONVERTIBLE_END,
                        ElementRef::Attribute(ri, fi),
                        format!("attribute `{}` of `{}` collides with an existing column", f.name, rel.name),
                    );
                }
            }
        }
    }

    /// Checks that the generated key column `column` can live in the holder's
    /// table: either it is new, or it is an existing database field that is
    /// not already a reference to some other archetype.
    fn holder_column(
        &mut self,
        ri: usize,
        rel: &Relationship,
        holder: &Archetype,
        target: &Archetype,
        column: &str,
        added: &mut HashMap<String, HashMap<String, String>>,
    ) {
        let at = ElementRef::Relationship(ri);
        let key = column.to_lowercase();
        let table = added.entry(holder.table_name()).or_default();
        if let Some(prev) = table.insert(key.clone(), rel.name.clone()) {
            self.error(
                codes::UNCONVERTIBLE_END,
                at,
                format!("`{}.{column}` is already generated by relationship `{prev}`", holder.name),
            );
            return;
        }
        let Some(existing) = holder.fields.iter().find(|f| f.name.to_lowercase() == key) else {
            return;
        };
        if !existing.classifier.lifeline.in_database() {
            return;
        }
        let explicit = holder.relations.iter().find(|e| e.local_field.to_lowercase() == key);
        if let Some(entry) = explicit {
            let same_target = resolve_reference(self.model, entry)
                .map(|(a, f)| a.name == target.name && f.primary_key)
                .unwrap_or(false);
            if !same_target {
                self.error(
                    codes::UNCONVERTIBLE_END,
                    at,
                    format!(
                        "`{}.{}` already references another target; relationship `{}` cannot reuse it",
                        holder.name, existing.name, rel.name
                    ),
                );
            }
        }
    }
}
