//! Brute-force reference for which tables exist and where foreign keys go.
//! Written against the model only; shares no code with the converter.

use std::collections::{BTreeMap, BTreeSet};

use dooml_core::model::{Archetype, ArchetypeKind, Cardinality, Lifeline, Model, Relationship, TargetField};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fk {
    pub table: String,
    pub column: String,
    pub target_table: String,
    pub target_column: String,
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Expected {
    pub tables: BTreeSet<String>,
    pub fks: BTreeSet<Fk>,
}

fn draft(model: &Model, name: &str) -> bool {
    model.archetypes.iter().any(|a| a.name == name && a.kind == ArchetypeKind::X)
}

fn find<'m>(model: &'m Model, name: &str) -> &'m Archetype {
    model.archetypes.iter().find(|a| a.name == name).expect("relationship end names an archetype")
}

fn key_of(a: &Archetype) -> String {
    a.fields.iter().find(|f| f.primary_key).map(|f| f.name.clone()).expect("keyed archetype")
}

fn reference(model: &Model, rel: &Relationship, holder: usize, target: usize) -> Fk {
    let h = find(model, &rel.ends[holder].archetype);
    let t = find(model, &rel.ends[target].archetype);
    Fk {
        table: h.name.to_lowercase(),
        column: format!("{}Id", t.name.to_lowercase()),
        target_table: t.name.to_lowercase(),
        target_column: key_of(t),
    }
}

/// Ranks both ends: the only total end wins, otherwise the smaller name.
fn one_to_one_holder(rel: &Relationship) -> usize {
    let mut candidates: Vec<(bool, &str, usize)> = rel
        .ends
        .iter()
        .enumerate()
        .map(|(i, e)| (!(e.total && !rel.ends[1 - i].total), e.archetype.as_str(), i))
        .collect();
    candidates.sort();
    candidates[0].2
}

pub fn expected(model: &Model) -> Expected {
    let mut out = Expected::default();
    for a in model.archetypes.iter().filter(|a| a.kind != ArchetypeKind::X) {
        if a.fields.iter().any(|f| matches!(f.classifier.lifeline, Lifeline::B | Lifeline::D)) {
            out.tables.insert(a.name.to_lowercase());
        }
    }

    let mut by_column: BTreeMap<(String, String), Fk> = BTreeMap::new();
    for a in model.archetypes.iter().filter(|a| a.kind != ArchetypeKind::X) {
        for e in &a.relations {
            if draft(model, &e.target_archetype) {
                continue;
            }
            let target = find(model, &e.target_archetype);
            let target_column = match &e.target_field {
                TargetField::Pid => key_of(target),
                TargetField::Named(n) => n.clone(),
            };
            let fk = Fk {
                table: a.name.to_lowercase(),
                column: e.local_field.clone(),
                target_table: target.name.to_lowercase(),
                target_column,
            };
            by_column.insert((fk.table.clone(), fk.column.clone()), fk);
        }
    }

    for rel in &model.relationships {
        if rel.ends.iter().any(|e| draft(model, &e.archetype)) {
            continue;
        }
        let ones: Vec<usize> = (0..rel.ends.len()).filter(|&i| rel.ends[i].cardinality == Cardinality::One).collect();
        let fks = match (rel.ends.len(), ones.as_slice()) {
            (_, []) => {
                let table = rel.name.to_lowercase();
                out.tables.insert(table.clone());
                (0..rel.ends.len())
                    .map(|i| {
                        let t = find(model, &rel.ends[i].archetype);
                        Fk {
                            table: table.clone(),
                            column: format!("{}Id", t.name.to_lowercase()),
                            target_table: t.name.to_lowercase(),
                            target_column: key_of(t),
                        }
                    })
                    .collect()
            }
            (2, [one]) => vec![reference(model, rel, 1 - one, *one)],
            (2, [_, _]) => {
                let holder = one_to_one_holder(rel);
                vec![reference(model, rel, holder, 1 - holder)]
            }
            _ => panic!("relationship `{}` has no conversion rule", rel.name),
        };
        for fk in fks {
            by_column.entry((fk.table.clone(), fk.column.clone())).or_insert(fk);
        }
    }
    out.fks = by_column.into_values().collect();
    out
}
