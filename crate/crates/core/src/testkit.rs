//! Proptest strategies for models (feature `testkit`).
//!
//! [`any_model`] produces syntactically well-formed models that may violate
//! semantic rules; it drives round-trip testing. [`valid_model`] produces
//! models that validate without errors, are fully typed, and use names that
//! are safe as SQL identifiers in both supported dialects.

use proptest::prelude::*;
use proptest::sample::{select, subsequence};

use crate::model::*;

const ARCHETYPES: &[&str] = &[
    "CLIENT",
    "RESERVATION",
    "WAITER",
    "DISH",
    "MENU",
    "INVOICE",
    "SUPPLIER",
    "KITCHEN",
    "SHIFT",
    "BRANCH",
    "COURSE",
    "STUDENT",
    "PARCEL",
    "ROUTE",
    "ORDER_LINE",
    "COMPANY",
];
const FIELDS: &[&str] = &[
    "label",
    "amount",
    "createdOn",
    "note",
    "price",
    "quantity",
    "title",
    "rating",
    "phone",
    "email",
    "city",
    "weight",
];
const METHODS: &[&str] = &["confirm", "cancel", "total", "refresh", "archive", "publish"];
const PARAMS: &[&str] = &["reason", "count", "since", "flag"];
const VERBS: &[&str] = &[
    "makes", "holds", "serves", "books", "owns", "links", "covers", "visits", "assigns", "supplies", "teaches", "ships",
];
const ATTRIBUTES: &[&str] = &["since", "seat", "memo", "share", "hours"];

/// (code type, database type)
const TYPES: &[(&str, &str)] = &[
    ("string", "varchar(100)"),
    ("int", "INT"),
    ("date", "DATE"),
    ("decimal", "DECIMAL(10,2)"),
    ("bool", "BOOLEAN"),
    ("long", "BIGINT"),
    ("datetime", "DATETIME"),
];
const KEY_TYPES: &[(&str, &str)] = &[("int", "INT"), ("long", "BIGINT"), ("string", "varchar(36)")];

fn lifeline() -> impl Strategy<Value = Lifeline> {
    select(Lifeline::ALL.to_vec())
}

fn visibility() -> impl Strategy<Value = Visibility> {
    select(Visibility::ALL.to_vec())
}

fn classifier() -> impl Strategy<Value = Classifier> {
    (lifeline(), visibility()).prop_map(|(l, v)| Classifier::new(l, v))
}

fn kind() -> impl Strategy<Value = ArchetypeKind> {
    prop_oneof![
        6 => Just(ArchetypeKind::B),
        1 => Just(ArchetypeKind::A),
        1 => Just(ArchetypeKind::C),
        1 => Just(ArchetypeKind::D),
        1 => Just(ArchetypeKind::X),
    ]
}

/// Any of the four written forms of a type.
fn any_type() -> impl Strategy<Value = DualType> {
    (select(TYPES.to_vec()), 0..4u8).prop_map(|((code, db), form)| match form {
        0 => DualType::split(code, db),
        1 => DualType::same(db),
        2 => DualType::code_only(code),
        _ => DualType::db_only(db),
    })
}

/// A type carrying exactly what `lifeline` needs, sometimes more.
fn typed_for(lifeline: Lifeline, (code, db): (&str, &str), extra: bool) -> DualType {
    match lifeline {
        Lifeline::A | Lifeline::C if !extra => DualType::code_only(code),
        Lifeline::D if !extra => DualType::db_only(db),
        _ => DualType::split(code, db),
    }
}

fn any_field(name: &'static str) -> impl Strategy<Value = Field> {
    (classifier(), any_type(), prop::bool::weighted(0.2)).prop_map(move |(classifier, ty, primary_key)| Field {
        name: name.to_string(),
        classifier,
        ty,
        primary_key,
    })
}

fn any_method(name: &'static str) -> impl Strategy<Value = Method> {
    let params = subsequence(PARAMS.to_vec(), 0..=2).prop_flat_map(|names| {
        names.into_iter().map(|n| any_type().prop_map(move |ty| Param { name: n.to_string(), ty })).collect::<Vec<_>>()
    });
    (classifier(), params, prop::option::of(any_type())).prop_map(move |(classifier, params, returns)| Method {
        name: name.to_string(),
        classifier,
        params,
        returns,
    })
}

fn any_entry() -> impl Strategy<Value = RelationalEntry> {
    (
        classifier(),
        select(FIELDS.to_vec()),
        select(ArchetypeKind::ALL.to_vec()),
        select(ARCHETYPES.to_vec()),
        prop::option::of(select(FIELDS.to_vec())),
        any::<bool>(),
    )
        .prop_map(|(classifier, local, target_kind, target, field, filled)| RelationalEntry {
            classifier,
            local_field: local.to_string(),
            target_kind,
            target_archetype: target.to_string(),
            target_field: field.map_or(TargetField::Pid, |f| TargetField::Named(f.to_string())),
            participation: if filled { Participation::Filled } else { Participation::Open },
        })
}

fn any_archetype(name: &'static str) -> impl Strategy<Value = Archetype> {
    let fields =
        subsequence(FIELDS.to_vec(), 0..=4).prop_flat_map(|names| names.into_iter().map(any_field).collect::<Vec<_>>());
    let methods = subsequence(METHODS.to_vec(), 0..=2)
        .prop_flat_map(|names| names.into_iter().map(any_method).collect::<Vec<_>>());
    let relations = prop::collection::vec(any_entry(), 0..=2);
    (select(ArchetypeKind::ALL.to_vec()), fields, methods, relations).prop_map(
        move |(kind, fields, methods, relations)| Archetype {
            kind,
            name: name.to_string(),
            fields,
            methods,
            relations,
        },
    )
}

fn any_relationship(name: &'static str) -> impl Strategy<Value = Relationship> {
    let cardinality = select(vec![Cardinality::One, Cardinality::N, Cardinality::M]);
    let ends = subsequence(ARCHETYPES.to_vec(), 2..=3).prop_shuffle().prop_flat_map(move |names| {
        names
            .into_iter()
            .map(|a| {
                (cardinality.clone(), any::<bool>()).prop_map(move |(cardinality, total)| RelationshipEnd {
                    archetype: a.to_string(),
                    cardinality,
                    total,
                })
            })
            .collect::<Vec<_>>()
    });
    let attributes = subsequence(ATTRIBUTES.to_vec(), 0..=2)
        .prop_flat_map(|names| names.into_iter().map(any_field).collect::<Vec<_>>());
    (ends, attributes).prop_map(move |(ends, attributes)| Relationship { name: name.to_string(), ends, attributes })
}

/// Parser-acceptable models: unique names wherever the parser checks them,
/// but otherwise unconstrained (dangling references, missing keys, `m` in
/// binary relationships and so on).
pub fn any_model() -> impl Strategy<Value = Model> {
    let archetypes = subsequence(ARCHETYPES.to_vec(), 0..=4)
        .prop_shuffle()
        .prop_flat_map(|names| names.into_iter().map(any_archetype).collect::<Vec<_>>());
    let relationships = subsequence(VERBS.to_vec(), 0..=3)
        .prop_flat_map(|names| names.into_iter().map(any_relationship).collect::<Vec<_>>());
    (archetypes, relationships).prop_map(|(archetypes, relationships)| Model {
        archetypes,
        relationships,
        spans: SourceMap::default(),
    })
}

#[derive(Debug, Clone)]
struct MemberSpec {
    name: &'static str,
    lifeline: Lifeline,
    visibility: Visibility,
    ty: (&'static str, &'static str),
    extra: bool,
}

fn member_spec(name: &'static str) -> impl Strategy<Value = MemberSpec> {
    (lifeline(), visibility(), select(TYPES.to_vec()), any::<bool>())
        .prop_map(move |(lifeline, visibility, ty, extra)| MemberSpec { name, lifeline, visibility, ty, extra })
}

#[derive(Debug, Clone)]
struct MethodSpec {
    head: MemberSpec,
    params: Vec<(&'static str, (&'static str, &'static str))>,
    returns: bool,
}

#[derive(Debug, Clone)]
struct ArchetypeSpec {
    kind: ArchetypeKind,
    key: Option<(Lifeline, (&'static str, &'static str))>,
    fields: Vec<MemberSpec>,
    methods: Vec<MethodSpec>,
}

fn archetype_spec() -> impl Strategy<Value = ArchetypeSpec> {
    let key = prop::option::weighted(0.75, (select(vec![Lifeline::B, Lifeline::D]), select(KEY_TYPES.to_vec())));
    let fields = subsequence(FIELDS.to_vec(), 0..=3)
        .prop_flat_map(|names| names.into_iter().map(member_spec).collect::<Vec<_>>());
    let methods = subsequence(METHODS.to_vec(), 0..=2).prop_flat_map(|names| {
        names
            .into_iter()
            .map(|n| {
                let params = subsequence(PARAMS.to_vec(), 0..=2).prop_flat_map(|ps| {
                    ps.into_iter().map(|p| select(TYPES.to_vec()).prop_map(move |t| (p, t))).collect::<Vec<_>>()
                });
                (member_spec(n), params, any::<bool>()).prop_map(|(head, params, returns)| MethodSpec {
                    head,
                    params,
                    returns,
                })
            })
            .collect::<Vec<_>>()
    });
    (kind(), key, fields, methods).prop_map(|(kind, key, fields, methods)| ArchetypeSpec { kind, key, fields, methods })
}

#[derive(Debug, Clone)]
struct RelationshipSpec {
    ends: Vec<usize>,
    /// Many-ness per end; ternaries are always many and use this to pick `m`
    /// or `n`.
    many: Vec<bool>,
    total: Vec<bool>,
    attributes: Vec<(Lifeline, (&'static str, &'static str))>,
}

#[derive(Debug, Clone)]
struct EntrySpec {
    holder: usize,
    target: usize,
    /// Named `<target>Id` and aimed at the key, rather than `<target>Ref`.
    key_named: bool,
    /// Aim at a non-key column when one exists.
    non_key: bool,
    lifeline: Lifeline,
    filled: bool,
}

fn relationship_spec(n: usize) -> impl Strategy<Value = RelationshipSpec> {
    let attribute = (select(vec![Lifeline::B, Lifeline::D, Lifeline::C]), select(TYPES.to_vec()));
    (
        subsequence((0..n).collect::<Vec<_>>(), 2..=n.min(3)).prop_shuffle(),
        prop::collection::vec(any::<bool>(), 3),
        prop::collection::vec(any::<bool>(), 3),
        prop::collection::vec(attribute, 0..=2),
    )
        .prop_map(|(ends, many, total, attributes)| RelationshipSpec { ends, many, total, attributes })
}

fn entry_spec(n: usize) -> impl Strategy<Value = EntrySpec> {
    (0..n, 0..n, any::<bool>(), prop::bool::weighted(0.3), select(vec![Lifeline::B, Lifeline::D]), any::<bool>())
        .prop_map(|(holder, target, key_named, non_key, lifeline, filled)| EntrySpec {
            holder,
            target,
            key_named,
            non_key,
            lifeline,
            filled,
        })
}

/// Models with up to `max_archetypes` archetypes that pass validation with
/// no errors. Every member is fully typed, so all emitters succeed.
pub fn valid_model(max_archetypes: usize) -> impl Strategy<Value = Model> {
    let max = max_archetypes.clamp(1, ARCHETYPES.len());
    subsequence(ARCHETYPES.to_vec(), 1..=max).prop_shuffle().prop_flat_map(|names| {
        let n = names.len();
        let specs = prop::collection::vec(archetype_spec(), n);
        let rels = if n >= 2 {
            prop::collection::vec(relationship_spec(n), 0..=n + 1).boxed()
        } else {
            Just(Vec::new()).boxed()
        };
        let entries = prop::collection::vec(entry_spec(n), 0..=2);
        (Just(names), specs, rels, entries)
            .prop_map(|(names, specs, rels, entries)| assemble(&names, specs, rels, entries))
    })
}

fn assemble(names: &[&str], specs: Vec<ArchetypeSpec>, rels: Vec<RelationshipSpec>, entries: Vec<EntrySpec>) -> Model {
    // One relationship per set of ends.
    let mut seen = std::collections::HashSet::new();
    let rels: Vec<RelationshipSpec> = rels
        .into_iter()
        .filter(|r| {
            let mut key = r.ends.clone();
            key.sort_unstable();
            seen.insert(key)
        })
        .take(VERBS.len())
        .collect();

    let mut needs_key: Vec<bool> = specs.iter().map(|s| s.key.is_some()).collect();
    for r in &rels {
        for &e in &r.ends {
            needs_key[e] = true;
        }
    }

    let mut archetypes: Vec<Archetype> = names
        .iter()
        .zip(&specs)
        .zip(&needs_key)
        .map(|((&name, spec), &keyed)| {
            let mut arch = Archetype::new(spec.kind, name);
            if keyed {
                let (lifeline, (code, db)) = spec.key.unwrap_or((Lifeline::B, KEY_TYPES[0]));
                arch.fields.push(Field {
                    name: format!("{}Id", name.to_lowercase()),
                    classifier: Classifier::new(lifeline, Visibility::Private),
                    ty: DualType::split(code, db),
                    primary_key: true,
                });
            }
            for f in &spec.fields {
                arch.fields.push(Field {
                    name: f.name.to_string(),
                    classifier: Classifier::new(f.lifeline, f.visibility),
                    ty: typed_for(f.lifeline, f.ty, f.extra),
                    primary_key: false,
                });
            }
            for m in &spec.methods {
                let l = m.head.lifeline;
                arch.methods.push(Method {
                    name: m.head.name.to_string(),
                    classifier: Classifier::new(l, m.head.visibility),
                    params: m
                        .params
                        .iter()
                        .map(|&(p, ty)| Param { name: p.to_string(), ty: typed_for(l, ty, m.head.extra) })
                        .collect(),
                    returns: m.returns.then(|| typed_for(l, m.head.ty, m.head.extra)),
                });
            }
            arch
        })
        .collect();

    for e in entries {
        let target = archetypes[e.target].clone();
        let non_key = target.fields.iter().find(|f| {
            !f.primary_key && f.classifier.lifeline.in_database() && f.ty.db.is_some() && f.ty.code.is_some()
        });
        let (target_field, field) = match (target.primary_key(), non_key) {
            (_, Some(f)) if e.non_key && !e.key_named => (TargetField::Named(f.name.clone()), f),
            (Some(pk), _) => (TargetField::Pid, pk),
            _ => continue,
        };
        let self_ref = e.holder == e.target;
        let suffix = if e.key_named && !self_ref && target_field == TargetField::Pid { "Id" } else { "Ref" };
        let local = format!("{}{suffix}", target.name.to_lowercase());
        let holder = &mut archetypes[e.holder];
        if holder.field(&local).is_some() {
            continue;
        }
        holder.fields.push(Field {
            name: local.clone(),
            classifier: Classifier::new(e.lifeline, Visibility::Private),
            ty: field.ty.clone(),
            primary_key: false,
        });
        holder.relations.push(RelationalEntry {
            classifier: Classifier::new(Lifeline::D, Visibility::Public),
            local_field: local,
            target_kind: target.kind,
            target_archetype: target.name.clone(),
            target_field,
            participation: if e.filled { Participation::Filled } else { Participation::Open },
        });
    }

    let relationships = rels
        .into_iter()
        .enumerate()
        .map(|(ri, r)| {
            let ternary = r.ends.len() == 3;
            let ends = r
                .ends
                .iter()
                .enumerate()
                .map(|(i, &a)| RelationshipEnd {
                    archetype: names[a].to_string(),
                    cardinality: match (ternary, r.many[i]) {
                        (true, true) => Cardinality::M,
                        (true, false) | (false, true) => Cardinality::N,
                        (false, false) => Cardinality::One,
                    },
                    total: r.total[i],
                })
                .collect();
            let attributes = r
                .attributes
                .iter()
                .enumerate()
                .map(|(i, &(lifeline, (code, db)))| Field {
                    name: format!("{}{ri}", ATTRIBUTES[i % ATTRIBUTES.len()]),
                    classifier: Classifier::new(lifeline, Visibility::Private),
                    ty: DualType::split(code, db),
                    primary_key: false,
                })
                .collect();
            Relationship { name: VERBS[ri].to_string(), ends, attributes }
        })
        .collect();

    Model { archetypes, relationships, spans: SourceMap::default() }
}
