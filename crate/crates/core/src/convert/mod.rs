//! Model-to-IR conversion.
//!
//! Three independent projections of one [`Model`](crate::model::Model):
//! [`ClassIr`] for object-oriented code, [`SchemaIr`] for the relational
//! schema and [`ApiIr`] for REST resources. Draft (`x`) archetypes take part
//! in none of them.

mod api_ir;
mod class_ir;
mod schema_ir;

use thiserror::Error;

pub use api_ir::{to_api_ir, ApiIr, ApiProperty, ApiResource, Endpoint, HttpMethod};
pub use class_ir::{to_class_ir, ClassDef, ClassIr, ClassMethod, ClassParam, ClassProperty};
pub use schema_ir::{
    apply_pk_profile, convert_many_to_many, convert_one_to_many, convert_one_to_one, is_integer_type, to_schema_ir,
    Column, ColumnSource, Dialect, ForeignKey, SchemaIr, SqlFunctionStub, SqlParam, TableDef,
    TotalParticipationAssertion,
};

use crate::model::Relationship;
use crate::resolve::ResolveError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvertError {
    #[error("relationship `{relationship}`: `{archetype}` has no primary key to reference")]
    NoPrimaryKey { relationship: String, archetype: String },
    #[error("relationship `{0}` has no conversion rule for its shape")]
    UnsupportedShape(String),
    #[error("relationship `{relationship}` names unknown archetype `{archetype}`")]
    UnknownArchetype { relationship: String, archetype: String },
    #[error("`{0}` has no table to hold a foreign key")]
    MissingTable(String),
    #[error("column `{table}.{column}` already exists")]
    ColumnCollision { table: String, column: String },
    #[error(transparent)]
    Resolve(#[from] ResolveError),
}

impl ConvertError {
    pub fn code(&self) -> &'static str {
        match self {
            ConvertError::NoPrimaryKey { .. } => "E_NO_PK",
            ConvertError::UnsupportedShape(_) => "E_SHAPE",
            _ => "E_CONVERT",
        }
    }
}

/// Name of the foreign-key column generated for a reference to `target`:
/// `CLIENT` -> `clientId`.
pub fn fk_column_name(target_archetype: &str) -> String {
    format!("{}Id", target_archetype.to_lowercase())
}

/// Index of the end that holds the key in a one-to-one relationship: the
/// total end when exactly one end is total, otherwise the end whose
/// archetype name sorts first.
pub fn one_to_one_holder(rel: &Relationship) -> usize {
    let (a, b) = (&rel.ends[0], &rel.ends[1]);
    match (a.total, b.total) {
        (true, false) => 0,
        (false, true) => 1,
        _ if b.archetype < a.archetype => 1,
        _ => 0,
    }
}

/// Lowercased, pluralized archetype name: `CLIENT` -> `clients`,
/// `COMPANY` -> `companies`, `BOX` -> `boxes`.
pub fn resource_name(archetype: &str) -> String {
    let lower = archetype.to_lowercase();
    let sibilant = ["s", "x", "z", "ch", "sh"].iter().any(|s| lower.ends_with(s));
    if sibilant {
        return format!("{lower}es");
    }
    let mut chars = lower.chars().rev();
    if let (Some('y'), Some(prev)) = (chars.next(), chars.next()) {
        if !"aeiou".contains(prev) {
            return format!("{}ies", &lower[..lower.len() - 1]);
        }
    }
    format!("{lower}s")
}
