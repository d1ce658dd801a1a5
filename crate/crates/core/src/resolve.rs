use thiserror::Error;

use crate::model::{Archetype, Field, Model, RelationalEntry, TargetField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("unresolved reference: no archetype named `{0}`")]
    UnknownArchetype(String),
    #[error("unresolved reference: `{name}` is a {actual}, not a {expected}")]
    KindMismatch { name: String, expected: String, actual: String },
    #[error("`{0}` has no primary key for PID to resolve to")]
    NoPrimaryKey(String),
    #[error("unresolved reference: `{archetype}` has no field `{field}`")]
    UnknownField { archetype: String, field: String },
}

impl ResolveError {
    pub fn code(&self) -> &'static str {
        match self {
            ResolveError::NoPrimaryKey(_) => "E_NO_PK",
            _ => "E_UNRESOLVED",
        }
    }
}

/// Finds the archetype and field a relational-stack entry points at. `PID`
/// resolves to the target's primary-key field.
pub fn resolve_reference<'m>(
    model: &'m Model,
    entry: &RelationalEntry,
) -> Result<(&'m Archetype, &'m Field), ResolveError> {
    let target = model
        .archetype(&entry.target_archetype)
        .ok_or_else(|| ResolveError::UnknownArchetype(entry.target_archetype.clone()))?;
    if target.kind != entry.target_kind {
        return Err(ResolveError::KindMismatch {
            name: target.name.clone(),
            expected: entry.target_kind.to_string(),
            actual: target.kind.to_string(),
        });
    }
    let field = match &entry.target_field {
        TargetField::Pid => target.primary_key().ok_or_else(|| ResolveError::NoPrimaryKey(target.name.clone()))?,
        TargetField::Named(name) => target
            .field(name)
            .ok_or_else(|| ResolveError::UnknownField { archetype: target.name.clone(), field: name.clone() })?,
    };
    Ok((target, field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_model;

    const SRC: &str = "
        archetype bObject CLIENT { fields { B- clientId: int/INT PK B- clientName: string/varchar(500) } }
        archetype bObject NOKEY { fields { B- a: int } }
        archetype bObject RESERVATION {
            fields { B- clientId: int/INT B- name: string/varchar(500) B- other: int }
            relations {
                D+ clientId -> bObject.CLIENT.PID !
                D+ name -> bObject.CLIENT.clientName ?
                D+ other -> bObject.GHOST.PID !
                D+ other -> bObject.NOKEY.PID !
                D+ other -> cObject.CLIENT.PID !
                D+ other -> bObject.CLIENT.missing !
            }
        }";

    fn entry(i: usize) -> (Model, RelationalEntry) {
        let m = parse_model(SRC).unwrap();
        let e = m.archetypes[2].relations[i].clone();
        (m, e)
    }

    #[test]
    fn pid_resolves_to_primary_key() {
        let (m, e) = entry(0);
        let (a, f) = resolve_reference(&m, &e).unwrap();
        assert_eq!((a.name.as_str(), f.name.as_str()), ("CLIENT", "clientId"));
    }

    #[test]
    fn named_non_key_field_resolves() {
        let (m, e) = entry(1);
        let (_, f) = resolve_reference(&m, &e).unwrap();
        assert_eq!(f.name, "clientName");
        assert!(!f.primary_key);
    }

    #[test]
    fn failures() {
        let (m, e) = entry(2);
        let err = resolve_reference(&m, &e).unwrap_err();
        assert_eq!(err, ResolveError::UnknownArchetype("GHOST".into()));
        assert_eq!(err.code(), "E_UNRESOLVED");

        let (m, e) = entry(3);
        assert_eq!(resolve_reference(&m, &e).unwrap_err(), ResolveError::NoPrimaryKey("NOKEY".into()));

        let (m, e) = entry(4);
        assert!(matches!(resolve_reference(&m, &e), Err(ResolveError::KindMismatch { .. })));

        let (m, e) = entry(5);
        assert!(matches!(resolve_reference(&m, &e), Err(ResolveError::UnknownField { .. })));
    }
}
