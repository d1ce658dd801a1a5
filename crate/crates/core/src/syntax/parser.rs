//! Recursive-descent parser producing a [`Model`].
//!
//! Errors inside an item abandon that item and resume at the next top-level
//! `archetype` or `relationship` keyword, so one run reports every broken item.

use std::collections::HashSet;

use super::lexer::{tokenize, Token, TokenKind};
use crate::diagnostic::{codes, has_errors, Diagnostic};
use crate::model::*;

/// Parses a single source file (file id 0).
pub fn parse_model(source: &str) -> Result<Model, Vec<Diagnostic>> {
    parse_model_in(source, 0)
}

/// Parses a source file, tagging every span with `file`.
pub fn parse_model_in(source: &str, file: usize) -> Result<Model, Vec<Diagnostic>> {
    let (tokens, mut diagnostics) = tokenize(source, file);
    let mut parser = Parser { tokens, pos: 0, diagnostics: Vec::new(), model: Model::new() };
    parser.document();
    diagnostics.append(&mut parser.diagnostics);
    if has_errors(&diagnostics) {
        diagnostics.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        Err(diagnostics)
    } else {
        Ok(parser.model)
    }
}

/// Marker for an abandoned production; the diagnostic is already recorded.
struct Abort;

type PResult<T> = Result<T, Abort>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diagnostics: Vec<Diagnostic>,
    model: Model,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, ahead: usize) -> &Token {
        let i = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[i]
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
        }
        tok
    }

    fn at(&self, kind: &TokenKind) -> bool {
        &self.peek().kind == kind
    }

    fn at_keyword(&self, word: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s == word)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn fail<T>(&mut self, message: impl Into<String>, span: Span) -> PResult<T> {
        self.diagnostics.push(Diagnostic::error(codes::SYNTAX, message, span));
        Err(Abort)
    }

    fn unexpected<T>(&mut self, expected: &str) -> PResult<T> {
        let tok = self.peek().clone();
        self.fail(format!("expected {expected}, found {}", tok.kind.describe()), tok.span)
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Token> {
        if self.at(&kind) {
            Ok(self.bump())
        } else {
            self.unexpected(&kind.describe())
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Span)> {
        match &self.peek().kind {
            TokenKind::Ident(s) => {
                let s = s.clone();
                let span = self.bump().span;
                Ok((s, span))
            }
            _ => self.unexpected(what),
        }
    }

    fn keyword(&mut self, word: &str) -> PResult<Span> {
        if self.at_keyword(word) {
            Ok(self.bump().span)
        } else {
            self.unexpected(&format!("`{word}`"))
        }
    }

    fn duplicate(&mut self, what: &str, name: &str, span: Span) {
        self.diagnostics.push(Diagnostic::error(codes::DUPLICATE, format!("duplicate {what} `{name}`"), span));
    }

    fn recover(&mut self) {
        while !self.at(&TokenKind::Eof) && !self.at_keyword("archetype") && !self.at_keyword("relationship") {
            self.bump();
        }
    }

    fn document(&mut self) {
        let mut archetype_names = HashSet::new();
        let mut relationship_names = HashSet::new();
        loop {
            let result = if self.at(&TokenKind::Eof) {
                break;
            } else if self.at_keyword("archetype") {
                self.archetype(&mut archetype_names)
            } else if self.at_keyword("relationship") {
                self.relationship(&mut relationship_names)
            } else {
                self.unexpected("`archetype` or `relationship`")
            };
            if result.is_err() {
                // always make progress past the offending token
                if !self.at(&TokenKind::Eof) && !self.at_keyword("archetype") && !self.at_keyword("relationship") {
                    self.bump();
                }
                self.recover();
            }
        }
    }

    fn classifier(&mut self) -> PResult<(Classifier, Span)> {
        let tok = self.peek().clone();
        let lifeline = match &tok.kind {
            TokenKind::Ident(s) if s.chars().count() == 1 => Lifeline::from_letter(s.chars().next().unwrap()),
            _ => None,
        };
        let Some(lifeline) = lifeline else {
            return self.fail(
                format!("expected a classifier (A, B, C, D or x followed by +, - or #), found {}", tok.kind.describe()),
                tok.span,
            );
        };
        self.bump();
        let sym = self.peek().clone();
        let visibility = match sym.kind {
            TokenKind::Plus => Visibility::Public,
            TokenKind::Minus => Visibility::Private,
            TokenKind::Hash => Visibility::Protected,
            _ => {
                return self
                    .fail(format!("expected a visibility symbol (+, - or #), found {}", sym.kind.describe()), sym.span)
            }
        };
        self.bump();
        Ok((Classifier::new(lifeline, visibility), tok.span.to(sym.span)))
    }

    /// True when the next tokens begin a member (`B-`, `D+`, ...).
    fn at_classifier(&self) -> bool {
        let letter = matches!(&self.peek().kind, TokenKind::Ident(s)
            if s.chars().count() == 1 && Lifeline::from_letter(s.chars().next().unwrap()).is_some());
        letter && matches!(self.peek_at(1).kind, TokenKind::Plus | TokenKind::Minus | TokenKind::Hash)
    }

    fn at_type_name(&self) -> bool {
        match &self.peek().kind {
            TokenKind::Ident(s) => s != "PK" && !self.at_classifier(),
            _ => false,
        }
    }

    fn type_name(&mut self) -> PResult<String> {
        let (mut name, _) = self.ident("a type name")?;
        if self.eat(&TokenKind::LParen) {
            name.push('(');
            loop {
                match &self.peek().kind {
                    TokenKind::Int(n) => {
                        name.push_str(n);
                        self.bump();
                    }
                    _ => return self.unexpected("a number in type parameters"),
                }
                if self.eat(&TokenKind::Comma) {
                    name.push(',');
                } else {
                    break;
                }
            }
            self.expect(TokenKind::RParen)?;
            name.push(')');
        }
        Ok(name)
    }

    fn dual_type(&mut self) -> PResult<DualType> {
        let start = self.peek().span;
        let code = if self.at_type_name() { Some(self.type_name()?) } else { None };
        if self.eat(&TokenKind::Slash) {
            let db = if self.at_type_name() { Some(self.type_name()?) } else { None };
            if code.is_none() && db.is_none() {
                return self.fail("malformed slash type: both sides are empty", start);
            }
            Ok(DualType { code, db })
        } else {
            match code {
                Some(c) => Ok(DualType::same(c)),
                None => self.unexpected("a type"),
            }
        }
    }

    fn field(&mut self) -> PResult<(Field, Span)> {
        let (classifier, start) = self.classifier()?;
        let (name, _) = self.ident("a field name")?;
        self.expect(TokenKind::Colon)?;
        let ty = self.dual_type()?;
        let mut end = self.tokens[self.pos - 1].span;
        let primary_key = if self.at_keyword("PK") {
            end = self.bump().span;
            true
        } else {
            false
        };
        Ok((Field { name, classifier, ty, primary_key }, start.to(end)))
    }

    fn method(&mut self) -> PResult<(Method, Span)> {
        let (classifier, start) = self.classifier()?;
        let (name, _) = self.ident("a method name")?;
        self.expect(TokenKind::LParen)?;
        let mut params = Vec::new();
        if !self.at(&TokenKind::RParen) {
            loop {
                let (pname, _) = self.ident("a parameter name")?;
                self.expect(TokenKind::Colon)?;
                let ty = self.dual_type()?;
                params.push(Param { name: pname, ty });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        let mut end = self.expect(TokenKind::RParen)?.span;
        let returns = if self.eat(&TokenKind::Colon) {
            let ty = self.dual_type()?;
            end = self.tokens[self.pos - 1].span;
            Some(ty)
        } else {
            None
        };
        Ok((Method { name, classifier, params, returns }, start.to(end)))
    }

    fn relation(&mut self) -> PResult<(RelationalEntry, Span)> {
        let (classifier, start) = self.classifier()?;
        let (local_field, _) = self.ident("a local field name")?;
        self.expect(TokenKind::Arrow)?;
        let (kind_word, kind_span) = self.ident("an archetype kind such as `bObject`")?;
        let Some(target_kind) = ArchetypeKind::from_word(&kind_word) else {
            return self.fail(format!("unknown archetype kind `{kind_word}`"), kind_span);
        };
        self.expect(TokenKind::Dot)?;
        let (target_archetype, _) = self.ident("a target archetype name")?;
        self.expect(TokenKind::Dot)?;
        let (field_word, _) = self.ident("a target field name or `PID`")?;
        let target_field = if field_word == "PID" { TargetField::Pid } else { TargetField::Named(field_word) };
        let marker = self.peek().clone();
        let participation = match marker.kind {
            TokenKind::Filled => Participation::Filled,
            TokenKind::Open => Participation::Open,
            _ => {
                return self.fail(
                    format!("expected a participation marker (`!` or `?`), found {}", marker.kind.describe()),
                    marker.span,
                )
            }
        };
        self.bump();
        let entry =
            RelationalEntry { classifier, local_field, target_kind, target_archetype, target_field, participation };
        Ok((entry, start.to(marker.span)))
    }

    /// `{ member* }` where members are parsed by `item`.
    fn block<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.expect(TokenKind::LBrace)?;
        let mut out = Vec::new();
        while !self.at(&TokenKind::RBrace) {
            if self.at(&TokenKind::Eof) {
                return self.unexpected("`}`");
            }
            out.push(item(self)?);
        }
        self.bump();
        Ok(out)
    }

    fn archetype(&mut self, names: &mut HashSet<String>) -> PResult<()> {
        let start = self.keyword("archetype")?;
        let (kind_word, kind_span) = self.ident("an archetype kind such as `bObject`")?;
        let Some(kind) = ArchetypeKind::from_word(&kind_word) else {
            return self.fail(format!("unknown archetype kind `{kind_word}`"), kind_span);
        };
        let (name, name_span) = self.ident("an archetype name")?;
        let mut arch = Archetype::new(kind, name.clone());
        let mut fields = Vec::new();
        let mut methods = Vec::new();
        let mut relations = Vec::new();
        let mut seen = HashSet::new();

        self.expect(TokenKind::LBrace)?;
        while !self.eat(&TokenKind::RBrace) {
            let (section, span) = match &self.peek().kind {
                TokenKind::Ident(s) if matches!(s.as_str(), "fields" | "methods" | "relations") => {
                    let s = s.clone();
                    (s, self.bump().span)
                }
                _ => return self.unexpected("`fields`, `methods`, `relations` or `}`"),
            };
            if !seen.insert(section.clone()) {
                return self.fail(format!("`{section}` section appears twice"), span);
            }
            match section.as_str() {
                "fields" => fields = self.block(Self::field)?,
                "methods" => methods = self.block(Self::method)?,
                _ => relations = self.block(Self::relation)?,
            }
        }
        let end = self.tokens[self.pos - 1].span;

        let index = self.model.archetypes.len();
        if !names.insert(name.to_lowercase()) {
            self.duplicate("archetype", &name, name_span);
        }
        let mut field_names = HashSet::new();
        for (i, (field, span)) in fields.into_iter().enumerate() {
            if !field_names.insert(field.name.to_lowercase()) {
                self.duplicate("field", &field.name, span);
            }
            self.model.spans.insert(ElementRef::Field(index, i), span);
            arch.fields.push(field);
        }
        let mut signatures = HashSet::new();
        for (i, (method, span)) in methods.into_iter().enumerate() {
            if !signatures.insert((method.name.clone(), method.params.len())) {
                let sig = format!("{}/{}", method.name, method.params.len());
                self.duplicate("method", &sig, span);
            }
            self.model.spans.insert(ElementRef::Method(index, i), span);
            arch.methods.push(method);
        }
        for (i, (entry, span)) in relations.into_iter().enumerate() {
            self.model.spans.insert(ElementRef::Relation(index, i), span);
            arch.relations.push(entry);
        }
        self.model.spans.insert(ElementRef::Archetype(index), start.to(end));
        self.model.archetypes.push(arch);
        Ok(())
    }

    fn cardinality(&mut self) -> PResult<Cardinality> {
        let tok = self.peek().clone();
        let card = match &tok.kind {
            TokenKind::Int(s) if s == "1" => Cardinality::One,
            TokenKind::Ident(s) if s == "n" => Cardinality::N,
            TokenKind::Ident(s) if s == "m" => Cardinality::M,
            _ => return self.unexpected("a cardinality (`1`, `n` or `m`)"),
        };
        self.bump();
        Ok(card)
    }

    fn relationship(&mut self, names: &mut HashSet<String>) -> PResult<()> {
        let start = self.keyword("relationship")?;
        let (name, name_span) = self.ident("a relationship name")?;
        self.expect(TokenKind::LParen)?;

        let mut ends: Vec<(RelationshipEnd, Span)> = Vec::new();
        let (first, first_span) = self.ident("an archetype name")?;
        let card = self.cardinality()?;
        ends.push((RelationshipEnd { archetype: first, cardinality: card, total: false }, first_span));
        while self.eat(&TokenKind::Link) {
            let card = self.cardinality()?;
            let (arch, span) = self.ident("an archetype name")?;
            ends.push((RelationshipEnd { archetype: arch, cardinality: card, total: false }, span));
        }
        if ends.len() < 2 {
            return self.unexpected("`--`");
        }
        if ends.len() > 3 {
            return self.fail("relationships have two or three ends", name_span);
        }
        let mut end = self.expect(TokenKind::RParen)?.span;

        let mut attributes = Vec::new();
        if self.eat(&TokenKind::LBrace) {
            let mut seen_total = false;
            let mut seen_attrs = false;
            while !self.at(&TokenKind::RBrace) {
                if self.at_keyword("total") && !seen_total {
                    seen_total = true;
                    self.bump();
                    self.expect(TokenKind::Colon)?;
                    loop {
                        let (total_name, span) = self.ident("an archetype name")?;
                        match ends.iter_mut().find(|(e, _)| e.archetype == total_name) {
                            Some((e, _)) => e.total = true,
                            None => {
                                self.diagnostics.push(Diagnostic::error(
                                    codes::UNKNOWN_END,
                                    format!("`{total_name}` is not an end of relationship `{name}`"),
                                    span,
                                ));
                            }
                        }
                        if !self.eat(&TokenKind::Comma) {
                            break;
                        }
                    }
                    self.eat(&TokenKind::Semi);
                } else if self.at_keyword("attributes") && !seen_attrs {
                    seen_attrs = true;
                    self.bump();
                    attributes = self.block(Self::field)?;
                } else {
                    return self.unexpected("`total`, `attributes` or `}`");
                }
            }
            end = self.bump().span;
        }

        let index = self.model.relationships.len();
        if !names.insert(name.to_lowercase()) {
            self.duplicate("relationship", &name, name_span);
        }
        let mut attr_names = HashSet::new();
        let mut rel = Relationship { name, ends: Vec::new(), attributes: Vec::new() };
        for (i, (e, span)) in ends.into_iter().enumerate() {
            self.model.spans.insert(ElementRef::RelationshipEnd(index, i), span);
            rel.ends.push(e);
        }
        for (i, (f, span)) in attributes.into_iter().enumerate() {
            if !attr_names.insert(f.name.to_lowercase()) {
                self.duplicate("attribute", &f.name, span);
            }
            self.model.spans.insert(ElementRef::Attribute(index, i), span);
            rel.attributes.push(f);
        }
        self.model.spans.insert(ElementRef::Relationship(index), start.to(end));
        self.model.relationships.push(rel);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn errors(src: &str) -> Vec<Diagnostic> {
        parse_model(src).expect_err("expected parse failure")
    }

    #[test]
    fn single_field_with_slash_type() {
        let m = parse_model("archetype bObject CLIENT { fields { B- clientName: string/varchar(500) } }").unwrap();
        assert_eq!(m.archetypes.len(), 1);
        let f = &m.archetypes[0].fields[0];
        assert_eq!(f.name, "clientName");
        assert_eq!(f.ty.code_type(), Some("string"));
        assert_eq!(f.ty.db_type(), Some("varchar(500)"));
        assert_eq!(f.classifier, Classifier::new(Lifeline::B, Visibility::Private));
    }

    #[test]
    fn empty_source_is_an_empty_model() {
        let m = parse_model("").unwrap();
        assert!(m.archetypes.is_empty() && m.relationships.is_empty());
        assert!(parse_model("  // only a comment\n").unwrap().is_empty());
    }

    #[test]
    fn relational_entry_with_pid() {
        let m =
            parse_model("archetype xObject EXAMPLE { relations { D+ exampleId -> bObject.CLIENT.PID ! } }").unwrap();
        let e = &m.archetypes[0].relations[0];
        assert_eq!(e.local_field, "exampleId");
        assert_eq!(e.target_kind, ArchetypeKind::B);
        assert_eq!(e.target_archetype, "CLIENT");
        assert_eq!(e.target_field, TargetField::Pid);
        assert_eq!(e.participation, Participation::Filled);
        assert_eq!(e.classifier, Classifier::new(Lifeline::D, Visibility::Public));
    }

    #[test]
    fn unicode_markers_are_aliases() {
        let m =
            parse_model("archetype xObject E { relations { D+ a → bObject.C.id ○ D+ b -> bObject.C.PID ● } }").unwrap();
        let r = &m.archetypes[0].relations;
        assert_eq!(r[0].participation, Participation::Open);
        assert_eq!(r[0].target_field, TargetField::Named("id".into()));
        assert_eq!(r[1].participation, Participation::Filled);
    }

    #[test]
    fn one_sided_types() {
        let m = parse_model("archetype bObject T { fields { C- a: bool/ D- b: /INT B- c: int PK } }").unwrap();
        let f = &m.archetypes[0].fields;
        assert_eq!(f[0].ty, DualType::code_only("bool"));
        assert_eq!(f[1].ty, DualType::db_only("INT"));
        assert_eq!(f[2].ty, DualType::same("int"));
        assert!(f[2].primary_key);
    }

    #[test]
    fn methods_with_params_and_return() {
        let src =
            "archetype bObject R { methods { B+ total(): decimal C# book(when: date, seats: int/INT) A+ ping() } }";
        let m = parse_model(src).unwrap();
        let ms = &m.archetypes[0].methods;
        assert_eq!(ms[0].returns, Some(DualType::same("decimal")));
        assert!(ms[0].params.is_empty());
        assert_eq!(ms[1].params.len(), 2);
        assert_eq!(ms[1].params[1].ty, DualType::split("int", "INT"));
        assert_eq!(ms[1].classifier.visibility, Visibility::Protected);
        assert_eq!(ms[2].returns, None);
    }

    #[test]
    fn relationship_with_total_and_attributes() {
        let src = "relationship makes (CLIENT 1 -- n RESERVATION) { total: RESERVATION; attributes { B- note: string/TEXT } }";
        let m = parse_model(src).unwrap();
        let r = &m.relationships[0];
        assert_eq!(r.ends[0].cardinality, Cardinality::One);
        assert!(!r.ends[0].total);
        assert_eq!(r.ends[1].cardinality, Cardinality::N);
        assert!(r.ends[1].total);
        assert_eq!(r.attributes[0].name, "note");
    }

    #[test]
    fn ternary_relationship_and_bodyless_form() {
        let m = parse_model("relationship supplies (A m -- m B -- n C)").unwrap();
        let ends: Vec<_> = m.relationships[0].ends.iter().map(|e| e.cardinality).collect();
        assert_eq!(ends, vec![Cardinality::M, Cardinality::M, Cardinality::N]);
    }

    #[test]
    fn kind_archetype_suffix_is_accepted() {
        let m = parse_model("archetype cArchetype Widget {}").unwrap();
        assert_eq!(m.archetypes[0].kind, ArchetypeKind::C);
    }

    #[test]
    fn bad_classifier_letter() {
        let d = errors("archetype bObject T { fields { E- a: int } }");
        assert_eq!(d[0].code, codes::SYNTAX);
        assert_eq!(d[0].span.column, 32);
    }

    #[test]
    fn missing_colon() {
        let d = errors("archetype bObject T { fields { B- a int } }");
        assert!(d[0].message.contains("`:`"), "{}", d[0].message);
    }

    #[test]
    fn malformed_slash_type() {
        let d = errors("archetype bObject T { fields { B- a: / } }");
        assert!(d[0].message.contains("slash"), "{}", d[0].message);
    }

    #[test]
    fn unknown_participation_marker() {
        let d = errors("archetype bObject T { relations { D+ a -> bObject.C.PID * } }");
        assert_eq!(d.len(), 2, "{d:?}");
        assert!(d.iter().any(|d| d.message.contains("participation")));
    }

    #[test]
    fn duplicate_names_are_errors() {
        let d = errors("archetype bObject A {} archetype bObject a {}");
        assert_eq!(d[0].code, codes::DUPLICATE);
        let d = errors("archetype bObject A { fields { B- x: int B- X: int } }");
        assert_eq!(d[0].code, codes::DUPLICATE);
        let d = errors("relationship r (A 1 -- n B) relationship r (A 1 -- 1 B)");
        assert_eq!(d[0].code, codes::DUPLICATE);
    }

    #[test]
    fn recovers_at_archetype_boundaries() {
        let src = "archetype bObject A { fields { B- a int } }\narchetype bObject B { fields { Q- b: int } }\narchetype bObject C {}";
        let d = errors(src);
        assert_eq!(d.len(), 2, "{d:?}");
        assert_eq!(d[0].span.line, 1);
        assert_eq!(d[1].span.line, 2);
    }

    #[test]
    fn total_naming_a_non_end() {
        let d = errors("relationship r (A 1 -- n B) { total: C; }");
        assert_eq!(d[0].code, codes::UNKNOWN_END);
    }

    #[test]
    fn spans_are_recorded() {
        let m = parse_model("archetype bObject A {\n  fields {\n    B- x: int\n  }\n}").unwrap();
        let s = m.spans.get(ElementRef::Field(0, 0)).unwrap();
        assert_eq!((s.line, s.column), (3, 5));
        assert_eq!(s.len, "B- x: int".len());
        assert_eq!(m.spans.get(ElementRef::Archetype(0)).unwrap().line, 1);
    }
}
