use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{fk_column_name, one_to_one_holder, ConvertError};
use crate::model::*;
use crate::resolve::resolve_reference;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dialect {
    #[default]
    Ansi,
    #[serde(rename = "mysql")]
    MySql,
}

impl FromStr for Dialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ansi" => Ok(Dialect::Ansi),
            "mysql" => Ok(Dialect::MySql),
            other => Err(format!("unknown SQL dialect `{other}` (expected `ansi` or `mysql`)")),
        }
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dialect::Ansi => "ansi",
            Dialect::MySql => "mysql",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnSource {
    /// A B or D field of the archetype.
    Field,
    /// A key column added by a relationship.
    Generated,
    /// A relationship attribute.
    Attribute,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Column {
    pub name: String,
    pub db_type: Option<String>,
    pub nullable: bool,
    pub unsigned: bool,
    pub auto_increment: bool,
    pub source: ColumnSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForeignKey {
    pub column: String,
    pub target_table: String,
    pub target_column: String,
    pub unique: bool,
    /// Declared in a relational stack.
    pub explicit: bool,
    /// Relationships that produced (or confirmed) this key.
    pub relationships: Vec<String>,
}

/// "Every `key_column` value of `table` appears at least once in
/// `referencing_table.referencing_column`."
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TotalParticipationAssertion {
    pub table: String,
    pub key_column: String,
    pub referencing_table: String,
    pub referencing_column: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableDef {
    pub name: String,
    /// Source archetype, or `None` for a junction table.
    pub archetype: Option<String>,
    /// Source relationship of a junction table.
    pub relationship: Option<String>,
    pub columns: Vec<Column>,
    pub primary_key: Option<String>,
    pub foreign_keys: Vec<ForeignKey>,
    /// Composite uniqueness constraints (junction tables).
    pub unique: Vec<Vec<String>>,
    pub assertions: Vec<TotalParticipationAssertion>,
}

impl TableDef {
    fn new(name: String) -> Self {
        TableDef {
            name,
            archetype: None,
            relationship: None,
            columns: Vec::new(),
            primary_key: None,
            foreign_keys: Vec::new(),
            unique: Vec::new(),
            assertions: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    fn column_mut(&mut self, name: &str) -> Option<&mut Column> {
        self.columns.iter_mut().find(|c| c.name == name)
    }

    fn has_column(&self, name: &str) -> bool {
        self.columns.iter().any(|c| c.name.eq_ignore_ascii_case(name))
    }

    pub fn foreign_key(&self, column: &str) -> Option<&ForeignKey> {
        self.foreign_keys.iter().find(|fk| fk.column == column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SqlParam {
    pub name: String,
    pub db_type: Option<String>,
}

/// Database-side method, emitted as a commented function skeleton.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SqlFunctionStub {
    pub name: String,
    pub archetype: String,
    pub params: Vec<SqlParam>,
    pub returns: Option<Option<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SchemaIr {
    pub tables: Vec<TableDef>,
    pub functions: Vec<SqlFunctionStub>,
}

impl SchemaIr {
    pub fn table(&self, name: &str) -> Option<&TableDef> {
        self.tables.iter().find(|t| t.name == name)
    }

    fn table_index_for(&self, archetype: &str) -> Option<usize> {
        self.tables.iter().position(|t| t.archetype.as_deref() == Some(archetype))
    }

    pub fn assertions(&self) -> impl Iterator<Item = &TotalParticipationAssertion> {
        self.tables.iter().flat_map(|t| t.assertions.iter())
    }

    pub fn foreign_key_count(&self) -> usize {
        self.tables.iter().map(|t| t.foreign_keys.len()).sum()
    }

    /// Applies the primary-key profile of `dialect` to every table, then
    /// marks integer key columns that reference unsigned columns as unsigned
    /// too so that key types stay compatible.
    pub fn for_dialect(&self, dialect: Dialect) -> SchemaIr {
        let mut out = SchemaIr {
            tables: self.tables.iter().map(|t| apply_pk_profile(t, dialect)).collect(),
            functions: self.functions.clone(),
        };
        loop {
            let mut pending = Vec::new();
            for (ti, t) in out.tables.iter().enumerate() {
                for fk in &t.foreign_keys {
                    let target_unsigned = out
                        .table(&fk.target_table)
                        .and_then(|tt| tt.column(&fk.target_column))
                        .is_some_and(|c| c.unsigned);
                    let col = t.column(&fk.column).expect("foreign key column exists");
                    let integer = col.db_type.as_deref().is_some_and(is_integer_type);
                    if target_unsigned && integer && !col.unsigned {
                        pending.push((ti, fk.column.clone()));
                    }
                }
            }
            if pending.is_empty() {
                return out;
            }
            for (ti, column) in pending {
                if let Some(c) = out.tables[ti].column_mut(&column) {
                    c.unsigned = true;
                }
            }
        }
    }
}

/// `INT`, `bigint(20)`, `SMALLINT` and friends.
pub fn is_integer_type(db_type: &str) -> bool {
    let base = db_type.split('(').next().unwrap_or("").trim().to_ascii_uppercase();
    matches!(base.as_str(), "TINYINT" | "SMALLINT" | "MEDIUMINT" | "INT" | "INTEGER" | "BIGINT")
}

/// MySQL marks an integer primary key `UNSIGNED AUTO_INCREMENT`; ANSI leaves
/// it plain. Keys that are also foreign keys never auto-increment.
pub fn apply_pk_profile(table: &TableDef, dialect: Dialect) -> TableDef {
    let mut out = table.clone();
    let Some(pk) = out.primary_key.clone() else {
        return out;
    };
    let is_fk = out.foreign_key(&pk).is_some();
    if let Some(col) = out.column_mut(&pk) {
        let eligible = dialect == Dialect::MySql && !is_fk && col.db_type.as_deref().is_some_and(is_integer_type);
        col.unsigned = eligible;
        col.auto_increment = eligible;
    }
    out
}

fn end_archetype<'m>(model: &'m Model, rel: &Relationship, end: usize) -> Result<&'m Archetype, ConvertError> {
    let name = &rel.ends[end].archetype;
    model
        .archetype(name)
        .ok_or_else(|| ConvertError::UnknownArchetype { relationship: rel.name.clone(), archetype: name.clone() })
}

fn primary_key<'m>(rel: &Relationship, arch: &'m Archetype) -> Result<&'m Field, ConvertError> {
    arch.primary_key()
        .ok_or_else(|| ConvertError::NoPrimaryKey { relationship: rel.name.clone(), archetype: arch.name.clone() })
}

fn attribute_columns(table: &mut TableDef, rel: &Relationship) -> Result<(), ConvertError> {
    for f in rel.attributes.iter().filter(|f| f.classifier.lifeline.in_database()) {
        if table.has_column(&f.name) {
            return Err(ConvertError::ColumnCollision { table: table.name.clone(), column: f.name.clone() });
        }
        table.columns.push(Column {
            name: f.name.clone(),
            db_type: f.ty.db.clone(),
            nullable: true,
            unsigned: false,
            auto_increment: false,
            source: ColumnSource::Attribute,
        });
    }
    Ok(())
}

/// Junction table for an all-many relationship: one NOT NULL key column per
/// end, the database-side attributes, and uniqueness over the key columns.
pub fn convert_many_to_many(model: &Model, rel: &Relationship) -> Result<TableDef, ConvertError> {
    if rel.shape() != RelationshipShape::ManyToMany {
        return Err(ConvertError::UnsupportedShape(rel.name.clone()));
    }
    let mut table = TableDef::new(rel.table_name());
    table.relationship = Some(rel.name.clone());
    let mut key_columns = Vec::new();
    for i in 0..rel.ends.len() {
        let arch = end_archetype(model, rel, i)?;
        let pk = primary_key(rel, arch)?;
        let column = fk_column_name(&arch.name);
        if table.has_column(&column) {
            return Err(ConvertError::ColumnCollision { table: table.name.clone(), column });
        }
        table.columns.push(Column {
            name: column.clone(),
            db_type: pk.ty.db.clone(),
            nullable: false,
            unsigned: false,
            auto_increment: false,
            source: ColumnSource::Generated,
        });
        table.foreign_keys.push(ForeignKey {
            column: column.clone(),
            target_table: arch.table_name(),
            target_column: pk.name.clone(),
            unique: false,
            explicit: false,
            relationships: vec![rel.name.clone()],
        });
        key_columns.push(column);
    }
    attribute_columns(&mut table, rel)?;
    table.unique.push(key_columns);
    Ok(table)
}

/// Adds (or reuses) the key column `holder.<target>Id` referencing the
/// target's primary key. Returns the column name.
fn link(
    schema: &mut SchemaIr,
    rel: &Relationship,
    holder: &Archetype,
    target: &Archetype,
    required: bool,
    unique: bool,
) -> Result<String, ConvertError> {
    let pk = primary_key(rel, target)?;
    let target_table = target.table_name();
    let ti = schema.table_index_for(&holder.name).ok_or_else(|| ConvertError::MissingTable(holder.name.clone()))?;
    let table = &mut schema.tables[ti];
    let column = fk_column_name(&target.name);
    let existing = table.columns.iter().position(|c| c.name.eq_ignore_ascii_case(&column));

    let name = match existing {
        Some(ci) => {
            let name = table.columns[ci].name.clone();
            if let Some(fk) = table.foreign_keys.iter_mut().find(|fk| fk.column == name) {
                if fk.target_table != target_table || fk.target_column != pk.name {
                    return Err(ConvertError::ColumnCollision { table: table.name.clone(), column: name });
                }
                fk.unique |= unique;
                fk.relationships.push(rel.name.clone());
            } else if table.columns[ci].source == ColumnSource::Field {
                table.foreign_keys.push(ForeignKey {
                    column: name.clone(),
                    target_table,
                    target_column: pk.name.clone(),
                    unique,
                    explicit: false,
                    relationships: vec![rel.name.clone()],
                });
            } else {
                return Err(ConvertError::ColumnCollision { table: table.name.clone(), column: name });
            }
            let col = &mut table.columns[ci];
            col.nullable = col.nullable && !required;
            name
        }
        None => {
            table.columns.push(Column {
                name: column.clone(),
                db_type: pk.ty.db.clone(),
                nullable: !required,
                unsigned: false,
                auto_increment: false,
                source: ColumnSource::Generated,
            });
            table.foreign_keys.push(ForeignKey {
                column: column.clone(),
                target_table,
                target_column: pk.name.clone(),
                unique,
                explicit: false,
                relationships: vec![rel.name.clone()],
            });
            column
        }
    };
    attribute_columns(table, rel)?;
    Ok(name)
}

fn assert_total(
    schema: &mut SchemaIr,
    rel: &Relationship,
    key_holder: &Archetype,
    referencing_table: String,
    referencing_column: String,
) -> Result<(), ConvertError> {
    let pk = primary_key(rel, key_holder)?;
    let ti =
        schema.table_index_for(&key_holder.name).ok_or_else(|| ConvertError::MissingTable(key_holder.name.clone()))?;
    let table = &mut schema.tables[ti];
    table.assertions.push(TotalParticipationAssertion {
        table: table.name.clone(),
        key_column: pk.name.clone(),
        referencing_table,
        referencing_column,
    });
    Ok(())
}

/// The many side's table gains a key referencing the one side, plus the
/// relationship's attributes. A total many side makes the key NOT NULL; a
/// total one side yields a participation assertion.
pub fn convert_one_to_many(schema: &mut SchemaIr, model: &Model, rel: &Relationship) -> Result<(), ConvertError> {
    let RelationshipShape::OneToMany { one, many } = rel.shape() else {
        return Err(ConvertError::UnsupportedShape(rel.name.clone()));
    };
    let one_arch = end_archetype(model, rel, one)?;
    let many_arch = end_archetype(model, rel, many)?;
    let column = link(schema, rel, many_arch, one_arch, rel.ends[many].total, false)?;
    if rel.ends[one].total {
        assert_total(schema, rel, one_arch, many_arch.table_name(), column)?;
    }
    Ok(())
}

/// One end (see [`one_to_one_holder`]) gains a UNIQUE key referencing the
/// other, plus the relationship's attributes. The other table is untouched
/// apart from a participation assertion when it is total.
pub fn convert_one_to_one(schema: &mut SchemaIr, model: &Model, rel: &Relationship) -> Result<(), ConvertError> {
    if rel.shape() != RelationshipShape::OneToOne {
        return Err(ConvertError::UnsupportedShape(rel.name.clone()));
    }
    let holder = one_to_one_holder(rel);
    let other = 1 - holder;
    let holder_arch = end_archetype(model, rel, holder)?;
    let other_arch = end_archetype(model, rel, other)?;
    let column = link(schema, rel, holder_arch, other_arch, rel.ends[holder].total, true)?;
    if rel.ends[other].total {
        assert_total(schema, rel, other_arch, holder_arch.table_name(), column)?;
    }
    Ok(())
}

fn archetype_table(arch: &Archetype) -> TableDef {
    let mut table = TableDef::new(arch.table_name());
    table.archetype = Some(arch.name.clone());
    for f in arch.fields.iter().filter(|f| f.classifier.lifeline.in_database()) {
        table.columns.push(Column {
            name: f.name.clone(),
            db_type: f.ty.db.clone(),
            nullable: !f.primary_key,
            unsigned: false,
            auto_increment: false,
            source: ColumnSource::Field,
        });
        if f.primary_key {
            table.primary_key = Some(f.name.clone());
        }
    }
    table
}

fn touches_draft(model: &Model, rel: &Relationship) -> bool {
    rel.ends.iter().any(|e| model.archetype(&e.archetype).is_some_and(|a| a.kind.is_draft()))
}

/// Builds the relational schema: a table per non-draft archetype with
/// database fields (declaration order), explicit relational-stack keys, then
/// each relationship in declaration order. Junction tables follow the
/// archetype tables.
pub fn to_schema_ir(model: &Model) -> Result<SchemaIr, ConvertError> {
    let mut schema = SchemaIr::default();
    for arch in model.archetypes.iter().filter(|a| !a.kind.is_draft()) {
        if arch.has_database_fields() {
            schema.tables.push(archetype_table(arch));
        }
        for m in arch.methods.iter().filter(|m| m.classifier.lifeline.in_database()) {
            schema.functions.push(SqlFunctionStub {
                name: format!("{}_{}", arch.table_name(), m.name),
                archetype: arch.name.clone(),
                params: m.params.iter().map(|p| SqlParam { name: p.name.clone(), db_type: p.ty.db.clone() }).collect(),
                returns: m.returns.as_ref().map(|r| r.db.clone()),
            });
        }
    }

    for arch in model.archetypes.iter().filter(|a| !a.kind.is_draft()) {
        for entry in &arch.relations {
            let (target, field) = resolve_reference(model, entry)?;
            if target.kind.is_draft() {
                continue;
            }
            let ti = schema.table_index_for(&arch.name).ok_or_else(|| ConvertError::MissingTable(arch.name.clone()))?;
            let table = &mut schema.tables[ti];
            let Some(col) = table.column_mut(&entry.local_field) else {
                return Err(ConvertError::MissingTable(format!("{}.{}", arch.name, entry.local_field)));
            };
            if entry.participation == Participation::Filled {
                col.nullable = false;
            }
            table.foreign_keys.push(ForeignKey {
                column: entry.local_field.clone(),
                target_table: target.table_name(),
                target_column: field.name.clone(),
                unique: false,
                explicit: true,
                relationships: Vec::new(),
            });
            if !field.primary_key {
                // Engines only accept references to keyed columns.
                let ti = schema
                    .table_index_for(&target.name)
                    .ok_or_else(|| ConvertError::MissingTable(target.name.clone()))?;
                let key = vec![field.name.clone()];
                if !schema.tables[ti].unique.contains(&key) {
                    schema.tables[ti].unique.push(key);
                }
            }
        }
    }

    let mut junctions = Vec::new();
    for rel in &model.relationships {
        if touches_draft(model, rel) {
            continue;
        }
        match rel.shape() {
            RelationshipShape::ManyToMany => {
                let junction = convert_many_to_many(model, rel)?;
                for (i, end) in rel.ends.iter().enumerate() {
                    if end.total {
                        let arch = end_archetype(model, rel, i)?;
                        let fk = &junction.foreign_keys[i];
                        assert_total(&mut schema, rel, arch, junction.name.clone(), fk.column.clone())?;
                    }
                }
                junctions.push(junction);
            }
            RelationshipShape::OneToMany { .. } => convert_one_to_many(&mut schema, model, rel)?,
            RelationshipShape::OneToOne => convert_one_to_one(&mut schema, model, rel)?,
            RelationshipShape::Unsupported => return Err(ConvertError::UnsupportedShape(rel.name.clone())),
        }
    }
    schema.tables.extend(junctions);
    Ok(schema)
}
