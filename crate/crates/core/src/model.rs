//! The archetype-diagram metamodel.
//!
//! A [`Model`] is an ordered collection of [`Archetype`]s and [`Relationship`]s.
//! Declaration order is significant: every converter and emitter walks the
//! model in the order it was written, which is what makes output
//! byte-deterministic.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

/// Which implementation layer a member lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Lifeline {
    /// API resource property or endpoint.
    A,
    /// Both (all) layers: database, code and API.
    B,
    /// Code only.
    C,
    /// Database only.
    D,
    /// Draft material; appears in no generated artifact except the diagram.
    X,
}

impl Lifeline {
    pub const ALL: [Lifeline; 5] = [Lifeline::A, Lifeline::B, Lifeline::C, Lifeline::D, Lifeline::X];

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'A' => Some(Lifeline::A),
            'B' => Some(Lifeline::B),
            'C' => Some(Lifeline::C),
            'D' => Some(Lifeline::D),
            'x' | 'X' => Some(Lifeline::X),
            _ => None,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Lifeline::A => 'A',
            Lifeline::B => 'B',
            Lifeline::C => 'C',
            Lifeline::D => 'D',
            Lifeline::X => 'x',
        }
    }

    /// Becomes a class property or class method.
    pub fn in_code(self) -> bool {
        matches!(self, Lifeline::A | Lifeline::B | Lifeline::C)
    }

    /// Becomes a table column or SQL function.
    pub fn in_database(self) -> bool {
        matches!(self, Lifeline::B | Lifeline::D)
    }

    /// Becomes an API resource property.
    pub fn in_api(self) -> bool {
        matches!(self, Lifeline::A | Lifeline::B)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Visibility {
    Public,
    Private,
    Protected,
}

impl Visibility {
    pub const ALL: [Visibility; 3] = [Visibility::Public, Visibility::Private, Visibility::Protected];

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            '+' => Some(Visibility::Public),
            '-' => Some(Visibility::Private),
            '#' => Some(Visibility::Protected),
            _ => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Visibility::Public => '+',
            Visibility::Private => '-',
            Visibility::Protected => '#',
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Visibility::Public => "public",
            Visibility::Private => "private",
            Visibility::Protected => "protected",
        }
    }
}

/// Lifeline letter plus visibility symbol, written `B-`, `D+`, `A#` and so on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Classifier {
    pub lifeline: Lifeline,
    pub visibility: Visibility,
}

impl Classifier {
    pub fn new(lifeline: Lifeline, visibility: Visibility) -> Self {
        Classifier { lifeline, visibility }
    }
}

impl fmt::Display for Classifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.lifeline.letter(), self.visibility.symbol())
    }
}

/// A code type and a database type, written `code/db`, `code/`, `/db` or a
/// single token that serves as both.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DualType {
    pub code: Option<String>,
    pub db: Option<String>,
}

impl DualType {
    /// One token used on both sides.
    pub fn same(token: impl Into<String>) -> Self {
        let token = token.into();
        DualType { code: Some(token.clone()), db: Some(token) }
    }

    pub fn split(code: impl Into<String>, db: impl Into<String>) -> Self {
        DualType { code: Some(code.into()), db: Some(db.into()) }
    }

    pub fn code_only(code: impl Into<String>) -> Self {
        DualType { code: Some(code.into()), db: None }
    }

    pub fn db_only(db: impl Into<String>) -> Self {
        DualType { code: None, db: Some(db.into()) }
    }

    pub fn code_type(&self) -> Option<&str> {
        self.code.as_deref()
    }

    pub fn db_type(&self) -> Option<&str> {
        self.db.as_deref()
    }
}

impl fmt::Display for DualType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.code, &self.db) {
            (Some(c), Some(d)) if c == d => f.write_str(c),
            (Some(c), Some(d)) => write!(f, "{c}/{d}"),
            (Some(c), None) => write!(f, "{c}/"),
            (None, Some(d)) => write!(f, "/{d}"),
            (None, None) => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Field {
    pub name: String,
    pub classifier: Classifier,
    #[serde(rename = "type")]
    pub ty: DualType,
    pub primary_key: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Param {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: DualType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Method {
    pub name: String,
    pub classifier: Classifier,
    pub params: Vec<Param>,
    pub returns: Option<DualType>,
}

/// `xObject`, `bObject`, ... The letter states which layers an archetype spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ArchetypeKind {
    A,
    B,
    C,
    D,
    X,
}

impl ArchetypeKind {
    pub const ALL: [ArchetypeKind; 5] =
        [ArchetypeKind::A, ArchetypeKind::B, ArchetypeKind::C, ArchetypeKind::D, ArchetypeKind::X];

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'a' => Some(ArchetypeKind::A),
            'b' => Some(ArchetypeKind::B),
            'c' => Some(ArchetypeKind::C),
            'd' => Some(ArchetypeKind::D),
            'x' => Some(ArchetypeKind::X),
            _ => None,
        }
    }

    pub fn letter(self) -> char {
        match self {
            ArchetypeKind::A => 'a',
            ArchetypeKind::B => 'b',
            ArchetypeKind::C => 'c',
            ArchetypeKind::D => 'd',
            ArchetypeKind::X => 'x',
        }
    }

    /// Parses `bObject` / `bArchetype` style kind words.
    pub fn from_word(word: &str) -> Option<Self> {
        let mut chars = word.chars();
        let kind = Self::from_letter(chars.next()?)?;
        match chars.as_str() {
            "Object" | "Archetype" => Some(kind),
            _ => None,
        }
    }

    pub fn is_draft(self) -> bool {
        self == ArchetypeKind::X
    }
}

impl fmt::Display for ArchetypeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Object", self.letter())
    }
}

/// ● / ○ on a relational-stack entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Participation {
    /// `!` or `●`: the reference must be present (NOT NULL).
    Filled,
    /// `?` or `○`: the reference may be NULL.
    Open,
}

impl Participation {
    pub fn marker(self) -> char {
        match self {
            Participation::Filled => '!',
            Participation::Open => '?',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum TargetField {
    /// The `PID` keyword: whichever field of the target carries `PK`.
    Pid,
    Named(String),
}

impl fmt::Display for TargetField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetField::Pid => f.write_str("PID"),
            TargetField::Named(n) => f.write_str(n),
        }
    }
}

/// One line of the relational stack: `D+ clientId -> bObject.CLIENT.PID !`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationalEntry {
    pub classifier: Classifier,
    pub local_field: String,
    pub target_kind: ArchetypeKind,
    pub target_archetype: String,
    pub target_field: TargetField,
    pub participation: Participation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Archetype {
    pub kind: ArchetypeKind,
    pub name: String,
    pub fields: Vec<Field>,
    pub methods: Vec<Method>,
    pub relations: Vec<RelationalEntry>,
}

impl Archetype {
    pub fn new(kind: ArchetypeKind, name: impl Into<String>) -> Self {
        Archetype { kind, name: name.into(), fields: Vec::new(), methods: Vec::new(), relations: Vec::new() }
    }

    pub fn field(&self, name: &str) -> Option<&Field> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn primary_key(&self) -> Option<&Field> {
        self.fields.iter().find(|f| f.primary_key)
    }

    /// Table name used for this archetype.
    pub fn table_name(&self) -> String {
        self.name.to_lowercase()
    }

    pub fn has_database_fields(&self) -> bool {
        self.fields.iter().any(|f| f.classifier.lifeline.in_database())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Cardinality {
    /// `1`
    One,
    /// `n`: many side of a binary relationship.
    N,
    /// `m`: many side of a ternary relationship.
    M,
}

impl Cardinality {
    pub fn symbol(self) -> char {
        match self {
            Cardinality::One => '1',
            Cardinality::N => 'n',
            Cardinality::M => 'm',
        }
    }

    pub fn is_many(self) -> bool {
        !matches!(self, Cardinality::One)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationshipEnd {
    pub archetype: String,
    pub cardinality: Cardinality,
    pub total: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Relationship {
    pub name: String,
    pub ends: Vec<RelationshipEnd>,
    pub attributes: Vec<Field>,
}

/// How a relationship's ends translate to tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationshipShape {
    /// Every end is many: a junction table.
    ManyToMany,
    /// Binary, one end `1`, the other many. Indices are into `ends`.
    OneToMany { one: usize, many: usize },
    /// Binary, both ends `1`.
    OneToOne,
    /// Anything else (a ternary with a `1` end, or a wrong number of ends).
    Unsupported,
}

impl Relationship {
    pub fn shape(&self) -> RelationshipShape {
        match self.ends.as_slice() {
            [a, b] => match (a.cardinality.is_many(), b.cardinality.is_many()) {
                (true, true) => RelationshipShape::ManyToMany,
                (false, true) => RelationshipShape::OneToMany { one: 0, many: 1 },
                (true, false) => RelationshipShape::OneToMany { one: 1, many: 0 },
                (false, false) => RelationshipShape::OneToOne,
            },
            [_, _, _] if self.ends.iter().all(|e| e.cardinality.is_many()) => RelationshipShape::ManyToMany,
            _ => RelationshipShape::Unsupported,
        }
    }

    /// Junction table name for many-to-many relationships.
    pub fn table_name(&self) -> String {
        self.name.to_lowercase()
    }
}

/// A source location. Lines and columns are 1-based; `offset` and `len` are
/// byte counts into the file identified by `file`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Span {
    pub file: usize,
    pub line: u32,
    pub column: u32,
    pub offset: usize,
    pub len: usize,
}

impl Span {
    /// Smallest span covering both.
    pub fn to(self, end: Span) -> Span {
        if end.offset + end.len <= self.offset {
            return self;
        }
        Span { len: end.offset + end.len - self.offset, ..self }
    }
}

/// Addresses an element of a [`Model`] by position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementRef {
    Archetype(usize),
    Field(usize, usize),
    Method(usize, usize),
    Relation(usize, usize),
    Relationship(usize),
    RelationshipEnd(usize, usize),
    Attribute(usize, usize),
}

/// Source locations of model elements. Models built in code have none.
#[derive(Debug, Clone, Default)]
pub struct SourceMap {
    spans: BTreeMap<ElementRef, Span>,
}

impl SourceMap {
    pub fn insert(&mut self, element: ElementRef, span: Span) {
        self.spans.insert(element, span);
    }

    pub fn get(&self, element: ElementRef) -> Option<Span> {
        self.spans.get(&element).copied()
    }

    /// Span of `element`, falling back to its nearest recorded ancestor.
    pub fn locate(&self, element: ElementRef) -> Span {
        self.get(element)
            .or_else(|| match element {
                ElementRef::Field(a, _) | ElementRef::Method(a, _) | ElementRef::Relation(a, _) => {
                    self.get(ElementRef::Archetype(a))
                }
                ElementRef::RelationshipEnd(r, _) | ElementRef::Attribute(r, _) => {
                    self.get(ElementRef::Relationship(r))
                }
                _ => None,
            })
            .unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ElementRef, Span)> + '_ {
        self.spans.iter().map(|(k, v)| (*k, *v))
    }
}

/// Root container of an archetype diagram.
///
/// Equality compares archetypes and relationships only; source spans never
/// participate, so a parsed model equals its re-parsed pretty-printed form.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Model {
    pub archetypes: Vec<Archetype>,
    pub relationships: Vec<Relationship>,
    #[serde(skip)]
    pub spans: SourceMap,
}

impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        self.archetypes == other.archetypes && self.relationships == other.relationships
    }
}

impl Eq for Model {}

impl Model {
    pub fn new() -> Self {
        Model::default()
    }

    pub fn archetype(&self, name: &str) -> Option<&Archetype> {
        self.archetypes.iter().find(|a| a.name == name)
    }

    pub fn archetype_index(&self, name: &str) -> Option<usize> {
        self.archetypes.iter().position(|a| a.name == name)
    }

    pub fn is_empty(&self) -> bool {
        self.archetypes.is_empty() && self.relationships.is_empty()
    }

    /// Appends `other` into this model's namespace, keeping its spans.
    pub fn merge(&mut self, other: Model) {
        let a_base = self.archetypes.len();
        let r_base = self.relationships.len();
        for (element, span) in other.spans.iter() {
            let shifted = match element {
                ElementRef::Archetype(a) => ElementRef::Archetype(a + a_base),
                ElementRef::Field(a, i) => ElementRef::Field(a + a_base, i),
                ElementRef::Method(a, i) => ElementRef::Method(a + a_base, i),
                ElementRef::Relation(a, i) => ElementRef::Relation(a + a_base, i),
                ElementRef::Relationship(r) => ElementRef::Relationship(r + r_base),
                ElementRef::RelationshipEnd(r, i) => ElementRef::RelationshipEnd(r + r_base, i),
                ElementRef::Attribute(r, i) => ElementRef::Attribute(r + r_base, i),
            };
            self.spans.insert(shifted, span);
        }
        self.archetypes.extend(other.archetypes);
        self.relationships.extend(other.relationships);
    }
}

/// Converts an archetype name to a class name: `CLIENT` -> `Client`,
/// `ORDER_LINE` -> `OrderLine`, `orderLine` -> `OrderLine`.
pub fn class_name(archetype: &str) -> String {
    let mut out = String::with_capacity(archetype.len());
    for segment in archetype.split('_').filter(|s| !s.is_empty()) {
        let all_upper = segment.chars().all(|c| !c.is_ascii_lowercase());
        let mut chars = segment.chars();
        if let Some(first) = chars.next() {
            out.push(first.to_ascii_uppercase());
            if all_upper {
                out.extend(chars.map(|c| c.to_ascii_lowercase()));
            } else {
                out.extend(chars);
            }
        }
    }
    if out.is_empty() {
        out.push('_');
    }
    out
}
