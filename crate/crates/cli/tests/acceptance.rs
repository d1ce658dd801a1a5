//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod support;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dooml_core::convert::{to_api_ir, to_class_ir, to_schema_ir, Dialect, SchemaIr};
use dooml_core::emit::{emit_dot, emit_sql, EmitConfig};
use dooml_core::model::{ArchetypeKind, Lifeline, Model};
use dooml_core::syntax::{parse_model, pretty_print};
use dooml_core::testkit::{any_model, valid_model};
use dooml_core::validate::validate;
use proptest::strategy::Strategy;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use sha2::{Digest, Sha256};
use sqlparser::ast::{ColumnOption, CreateTable, DataType, Statement, TableConstraint};
use sqlparser::dialect::MySqlDialect;
use sqlparser::parser::Parser;

use support::{doomlc, fixture_path, fixtures, load_fixture, oracle, sqlexec};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const RANDOM_CASES: u32 = 1000;

fn runner() -> TestRunner {
    let config = Config { cases: RANDOM_CASES, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run_cases<S: Strategy<Value = Model>>(
    strategy: S,
    check: impl Fn(Model) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner().run(&strategy, check).map_err(|e| e.to_string())
}

fn unquote(s: impl ToString) -> String {
    s.to_string().trim_matches('`').trim_matches('"').to_string()
}

fn create_tables(sql: &str) -> Result<Vec<CreateTable>, String> {
    let statements = Parser::parse_sql(&MySqlDialect {}, sql).map_err(|e| format!("MySQL parse: {e}"))?;
    Ok(statements
        .into_iter()
        .filter_map(|s| match s {
            Statement::CreateTable(t) => Some(t),
            _ => None,
        })
        .collect())
}

/// (visibility, name) pairs.
type Members = BTreeSet<(String, String)>;

/// Fields and methods declared in a class skeleton.
fn java_members(source: &str) -> (Members, Members) {
    let mut fields = BTreeSet::new();
    let mut methods = BTreeSet::new();
    for line in source.lines().filter(|l| l.starts_with("    ") && !l.starts_with("     ")) {
        let line = line.trim();
        let Some((vis, rest)) = line.split_once(' ') else { continue };
        if !matches!(vis, "public" | "private" | "protected") {
            continue;
        }
        if let Some(head) = rest.strip_suffix(';') {
            let name = head.rsplit(' ').next().unwrap_or_default();
            fields.insert((vis.to_string(), name.to_string()));
        } else if let Some((head, _)) = rest.split_once('(') {
            let name = head.rsplit(' ').next().unwrap_or_default();
            methods.insert((vis.to_string(), name.to_string()));
        }
    }
    (fields, methods)
}

fn members(items: &[(&str, &str)]) -> Members {
    items.iter().map(|(v, n)| (v.to_string(), n.to_string())).collect()
}

fn restaurant_end_to_end() -> Outcome {
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let status = doomlc()
        .args(["build", "--dialect", "mysql", "--profile", "java-like", "--out"])
        .arg(out.path())
        .arg(fixture_path("restaurant"))
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(status.status.success(), "build failed: {}", String::from_utf8_lossy(&status.stderr));
    ensure!(elapsed < Duration::from_secs(1), "build took {elapsed:?}");

    let sql = fs::read_to_string(out.path().join("sql/schema.sql")).map_err(|e| e.to_string())?;
    let tables = create_tables(&sql)?;
    ensure!(tables.len() == 2, "expected 2 tables, found {}", tables.len());
    let table = |name: &str| tables.iter().find(|t| unquote(&t.name) == name).ok_or(format!("no table `{name}`"));
    let client = table("client")?;
    let reservation = table("reservation")?;

    ensure!(client.columns.len() == 3, "client has {} columns", client.columns.len());
    let pk: Vec<String> = client
        .constraints
        .iter()
        .filter_map(|c| match c {
            TableConstraint::PrimaryKey(pk) => Some(pk.columns.iter().map(|ic| unquote(&ic.column.expr)).collect()),
            _ => None,
        })
        .next()
        .ok_or("client has no primary key")?;
    ensure!(pk == ["clientId"], "client primary key is {pk:?}");
    let pk_col = client.columns.iter().find(|c| unquote(&c.name) == "clientId").ok_or("no clientId column")?;
    ensure!(matches!(pk_col.data_type, DataType::IntUnsigned(_)), "clientId type is {}", pk_col.data_type);
    ensure!(
        pk_col.options.iter().any(|o| o.option.to_string().eq_ignore_ascii_case("AUTO_INCREMENT")),
        "clientId is not AUTO_INCREMENT"
    );

    let fk = reservation
        .constraints
        .iter()
        .find_map(|c| match c {
            TableConstraint::ForeignKey(fk) => Some(fk),
            _ => None,
        })
        .ok_or("reservation has no foreign key")?;
    let cols: Vec<String> = fk.columns.iter().map(unquote).collect();
    let refs: Vec<String> = fk.referred_columns.iter().map(unquote).collect();
    ensure!(
        unquote(&fk.foreign_table) == "client" && refs == ["clientId"],
        "reservation references {}({refs:?})",
        fk.foreign_table
    );
    let fk_col = reservation.columns.iter().find(|c| unquote(&c.name) == cols[0]).ok_or("FK column missing")?;
    ensure!(fk_col.options.iter().any(|o| o.option == ColumnOption::NotNull), "reservation.{} is nullable", cols[0]);

    let mut class_files: Vec<String> = fs::read_dir(out.path().join("classes"))
        .map_err(|e| e.to_string())?
        .map(|e| e.map(|e| e.file_name().to_string_lossy().into_owned()).unwrap_or_default())
        .collect();
    class_files.sort();
    ensure!(class_files == ["Client.java", "Reservation.java"], "class files: {class_files:?}");
    let read = |name: &str| fs::read_to_string(out.path().join("classes").join(name)).map_err(|e| e.to_string());
    let (fields, methods) = java_members(&read("Client.java")?);
    let expected = members(&[("private", "clientId"), ("private", "clientRegistration"), ("private", "clientName")]);
    ensure!(fields == expected && methods.is_empty(), "Client members: {fields:?} {methods:?}");
    let (fields, methods) = java_members(&read("Reservation.java")?);
    let expected_fields = members(&[
        ("private", "reservationId"),
        ("private", "reservationDate"),
        ("public", "guests"),
        ("private", "clientId"),
        ("private", "confirmed"),
    ]);
    let expected_methods = members(&[("public", "confirm"), ("public", "total"), ("protected", "recalculate")]);
    ensure!(fields == expected_fields, "Reservation fields: {fields:?}");
    ensure!(methods == expected_methods, "Reservation methods: {methods:?}");

    Ok(format!("2 tables, NOT NULL FK, INT UNSIGNED AUTO_INCREMENT key, 8 class members, {elapsed:.0?}"))
}

/// Expected foreign key: (table, column, target table, nullable, unique).
type FkSpec = (&'static str, &'static str, &'static str, bool, bool);

struct MatrixCase {
    fixture: &'static str,
    tables: usize,
    fks: &'static [FkSpec],
    /// Composite uniqueness over a junction's keys.
    junction: Option<(&'static str, &'static [&'static str])>,
    /// (table, referencing table) of each participation assertion.
    assertions: &'static [(&'static str, &'static str)],
}

const MATRIX: &[MatrixCase] = &[
    MatrixCase {
        fixture: "matrix_many_to_many",
        tables: 3,
        fks: &[("enrolls", "studentId", "student", false, false), ("enrolls", "courseId", "course", false, false)],
        junction: Some(("enrolls", &["studentId", "courseId"])),
        assertions: &[],
    },
    MatrixCase {
        fixture: "matrix_one_to_many_partial",
        tables: 2,
        fks: &[("employee", "departmentId", "department", true, false)],
        junction: None,
        assertions: &[],
    },
    MatrixCase {
        fixture: "matrix_one_to_many_many",
        tables: 2,
        fks: &[("employee", "departmentId", "department", false, false)],
        junction: None,
        assertions: &[],
    },
    MatrixCase {
        fixture: "matrix_one_to_many_one",
        tables: 2,
        fks: &[("employee", "departmentId", "department", true, false)],
        junction: None,
        assertions: &[("department", "employee")],
    },
    MatrixCase {
        fixture: "matrix_one_to_many_both",
        tables: 2,
        fks: &[("employee", "departmentId", "department", false, false)],
        junction: None,
        assertions: &[("department", "employee")],
    },
    MatrixCase {
        fixture: "matrix_one_to_one",
        tables: 2,
        fks: &[("passport", "personId", "person", false, true)],
        junction: None,
        assertions: &[],
    },
    MatrixCase {
        fixture: "matrix_ternary",
        tables: 4,
        fks: &[
            ("supplies", "supplierId", "supplier", false, false),
            ("supplies", "partId", "part", false, false),
            ("supplies", "projectId", "project", false, false),
        ],
        junction: Some(("supplies", &["supplierId", "partId", "projectId"])),
        assertions: &[("project", "supplies")],
    },
];

fn check_matrix_case(case: &MatrixCase) -> Result<(), String> {
    let schema = to_schema_ir(&load_fixture(case.fixture)).map_err(|e| e.to_string())?;
    let name = case.fixture;
    ensure!(schema.tables.len() == case.tables, "{name}: {} tables", schema.tables.len());
    ensure!(schema.foreign_key_count() == case.fks.len(), "{name}: {} foreign keys", schema.foreign_key_count());
    for &(table, column, target, nullable, unique) in case.fks {
        let t = schema.table(table).ok_or(format!("{name}: no table `{table}`"))?;
        let fk = t.foreign_key(column).ok_or(format!("{name}: no FK on {table}.{column}"))?;
        ensure!(fk.target_table == target, "{name}: {table}.{column} references {}", fk.target_table);
        let target_pk = schema.table(target).and_then(|t| t.primary_key.clone());
        ensure!(target_pk.as_deref() == Some(fk.target_column.as_str()), "{name}: {table}.{column} misses the key");
        let col = t.column(column).ok_or(format!("{name}: no column {table}.{column}"))?;
        ensure!(col.nullable == nullable, "{name}: {table}.{column} nullable = {}", col.nullable);
        let is_unique = fk.unique || t.unique.contains(&vec![column.to_string()]);
        ensure!(is_unique == unique, "{name}: {table}.{column} unique = {is_unique}");
    }
    if let Some((table, keys)) = case.junction {
        let t = schema.table(table).ok_or(format!("{name}: no junction `{table}`"))?;
        let keys: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
        ensure!(t.unique == vec![keys.clone()], "{name}: junction uniqueness {:?}", t.unique);
        ensure!(t.primary_key.is_none(), "{name}: junction has a surrogate key");
    }
    let found: Vec<(String, String)> =
        schema.assertions().map(|a| (a.table.clone(), a.referencing_table.clone())).collect();
    let expected: Vec<(String, String)> = case.assertions.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    ensure!(found == expected, "{name}: assertions {found:?}");
    Ok(())
}

fn rule_matrix() -> Outcome {
    for case in MATRIX {
        check_matrix_case(case)?;
    }
    Ok(format!("{} relationship shapes", MATRIX.len()))
}

fn partition_violation(m: &Model) -> Option<String> {
    let classes = to_class_ir(m);
    let schema = to_schema_ir(m).map_err(|e| e.to_string()).ok()?;
    let api = to_api_ir(m);
    for a in &m.archetypes {
        let draft = a.kind == ArchetypeKind::X;
        let class = classes.classes.iter().find(|c| c.archetype == a.name);
        let table = schema.tables.iter().find(|t| t.archetype.as_deref() == Some(a.name.as_str()));
        let resource = api.resources.iter().find(|r| r.archetype == a.name);
        for f in &a.fields {
            let l = f.classifier.lifeline;
            let want = |layers: &[Lifeline]| !draft && layers.contains(&l);
            let in_class = class.is_some_and(|c| c.properties.iter().any(|p| p.name == f.name));
            let in_table = table.is_some_and(|t| t.columns.iter().any(|c| c.name == f.name));
            let in_api = resource.is_some_and(|r| r.properties.iter().any(|p| p.name == f.name));
            if in_class != want(&[Lifeline::A, Lifeline::B, Lifeline::C])
                || in_table != want(&[Lifeline::B, Lifeline::D])
                || in_api != want(&[Lifeline::A, Lifeline::B])
            {
                return Some(format!(
                    "{}.{} ({}): class={in_class} table={in_table} api={in_api}",
                    a.name,
                    f.name,
                    l.letter()
                ));
            }
        }
        for meth in &a.methods {
            let l = meth.classifier.lifeline;
            let want = |layers: &[Lifeline]| !draft && layers.contains(&l);
            let stub = format!("{}_{}", a.name.to_lowercase(), meth.name);
            let in_class = class.is_some_and(|c| c.methods.iter().any(|x| x.name == meth.name));
            let in_db = schema.functions.iter().any(|s| s.name == stub);
            let in_api = resource.is_some_and(|r| r.endpoints.iter().any(|e| e.action.as_deref() == Some(&meth.name)));
            if in_class != want(&[Lifeline::A, Lifeline::B, Lifeline::C])
                || in_db != want(&[Lifeline::B, Lifeline::D])
                || in_api != want(&[Lifeline::A])
            {
                return Some(format!(
                    "{}.{}() ({}): class={in_class} db={in_db} api={in_api}",
                    a.name,
                    meth.name,
                    l.letter()
                ));
            }
        }
    }
    None
}

fn lifeline_partition() -> Outcome {
    run_cases(valid_model(6), |m| match to_schema_ir(&m) {
        Err(e) => Err(TestCaseError::fail(format!("conversion failed: {e}\n{}", pretty_print(&m)))),
        Ok(_) => match partition_violation(&m) {
            Some(v) => Err(TestCaseError::fail(format!("{v}\n{}", pretty_print(&m)))),
            None => Ok(()),
        },
    })?;
    Ok(format!("{RANDOM_CASES} valid models, 0 violations"))
}

fn round_trip() -> Outcome {
    run_cases(any_model(), |m| {
        let text = pretty_print(&m);
        match parse_model(&text) {
            Ok(parsed) if parsed == m => Ok(()),
            Ok(_) => Err(TestCaseError::fail(format!("model changed:\n{text}"))),
            Err(d) => Err(TestCaseError::fail(format!("{d:?}\n{text}"))),
        }
    })?;
    Ok(format!("{RANDOM_CASES} random models"))
}

fn converter_view(schema: &SchemaIr) -> oracle::Expected {
    oracle::Expected {
        tables: schema.tables.iter().map(|t| t.name.clone()).collect(),
        fks: schema
            .tables
            .iter()
            .flat_map(|t| {
                t.foreign_keys.iter().map(|fk| oracle::Fk {
                    table: t.name.clone(),
                    column: fk.column.clone(),
                    target_table: fk.target_table.clone(),
                    target_column: fk.target_column.clone(),
                })
            })
            .collect(),
    }
}

fn oracle_equivalence() -> Outcome {
    run_cases(valid_model(4), |m| {
        let schema = to_schema_ir(&m).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let expected = oracle::expected(&m);
        let actual = converter_view(&schema);
        if schema.tables.len() != expected.tables.len() || schema.foreign_key_count() != expected.fks.len() {
            return Err(TestCaseError::fail(format!(
                "counts: converter {}/{} oracle {}/{}\n{}",
                schema.tables.len(),
                schema.foreign_key_count(),
                expected.tables.len(),
                expected.fks.len(),
                pretty_print(&m)
            )));
        }
        if actual != expected {
            return Err(TestCaseError::fail(format!(
                "converter {actual:?}\noracle {expected:?}\n{}",
                pretty_print(&m)
            )));
        }
        Ok(())
    })?;
    Ok(format!("{RANDOM_CASES} models with at most 4 archetypes"))
}

fn sql_files(schema: &SchemaIr, dialect: Dialect) -> Result<(String, String), String> {
    let config = EmitConfig { dialect, emit_assertions: true, ..EmitConfig::default() };
    let files = emit_sql(schema, &config).map_err(|e| e.to_string())?;
    Ok((files[0].contents.clone(), files[1].contents.clone()))
}

fn quote(s: &str) -> String {
    format!("\"{s}\"")
}

/// Loads `ddl` and seed rows into a fresh database.
fn seeded(ddl: &str, schema: &SchemaIr) -> Result<rusqlite::Connection, String> {
    let conn = sqlexec::open(ddl)?;
    sqlexec::seed(&conn, schema, 3)?;
    Ok(conn)
}

fn executability() -> Outcome {
    let mut statements = 0;
    let mut violations_found = 0;
    for path in fixtures() {
        let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        let model = load_fixture(&name);
        ensure!(validate(&model).ok, "{name} does not validate");
        let schema = to_schema_ir(&model).map_err(|e| format!("{name}: {e}"))?;

        for dialect in [Dialect::MySql, Dialect::Ansi] {
            let (ddl, checks) = sql_files(&schema, dialect)?;
            if dialect == Dialect::MySql {
                let created = create_tables(&ddl).map_err(|e| format!("{name}: {e}"))?;
                ensure!(created.len() == schema.tables.len(), "{name}: parsed {} tables", created.len());
                Parser::parse_sql(&MySqlDialect {}, &checks).map_err(|e| format!("{name} assertions: {e}"))?;
            }
            let queries = sqlexec::statements(&checks);
            ensure!(queries.len() == schema.assertions().count(), "{name}: {} assertion queries", queries.len());

            let conn = seeded(&ddl, &schema).map_err(|e| format!("{name} ({dialect}): {e}"))?;
            statements += sqlexec::statements(&ddl).len();
            for q in &queries {
                let n = sqlexec::row_count(&conn, q)?;
                ensure!(n == 0, "{name} ({dialect}): {n} violation(s) on consistent data: {q}");
            }

            for t in &schema.tables {
                for c in t.columns.iter().filter(|c| !c.nullable && t.foreign_key(&c.name).is_some()) {
                    let sql = format!("UPDATE {} SET {} = NULL", quote(&t.name), quote(&c.name));
                    ensure!(conn.execute(&sql, []).is_err(), "{name} ({dialect}): {}.{} accepted NULL", t.name, c.name);
                }
            }

            for (a, q) in schema.assertions().zip(&queries) {
                let conn = seeded(&ddl, &schema)?;
                let delete = format!(
                    "DELETE FROM {rt} WHERE {rc} = (SELECT {k} FROM {t} ORDER BY rowid LIMIT 1)",
                    rt = quote(&a.referencing_table),
                    rc = quote(&a.referencing_column),
                    k = quote(&a.key_column),
                    t = quote(&a.table),
                );
                let removed = conn.execute(&delete, []).map_err(|e| format!("{name}: {e}"))?;
                ensure!(removed > 0, "{name}: nothing to delete for {}", a.table);
                let n = sqlexec::row_count(&conn, q)?;
                ensure!(n >= 1, "{name} ({dialect}): deletion went unnoticed by {q}");
                violations_found += 1;
            }
        }
    }
    Ok(format!(
        "{} fixtures, {statements} DDL statements on SQLite (MySQL text checked with sqlparser), {violations_found} seeded violations detected",
        fixtures().len()
    ))
}

fn tree_digest(root: &Path) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for entry in walkdir::WalkDir::new(root) {
        let entry = entry.map_err(|e| e.to_string())?;
        if entry.file_type().is_file() {
            let rel = entry.path().strip_prefix(root).map_err(|e| e.to_string())?;
            let bytes = fs::read(entry.path()).map_err(|e| e.to_string())?;
            out.insert(rel.to_string_lossy().replace('\\', "/"), hex::encode(Sha256::digest(bytes)));
        }
    }
    Ok(out)
}

fn determinism() -> Outcome {
    let mut compared = 0;
    for path in fixtures() {
        for (dialect, profile) in [("mysql", "java-like"), ("ansi", "generic"), ("ansi", "csharp-like")] {
            let mut digests = Vec::new();
            for _ in 0..2 {
                let out = tempfile::tempdir().map_err(|e| e.to_string())?;
                let status = doomlc()
                    .args(["build", "--emit-assertions", "--dialect", dialect, "--profile", profile, "--out"])
                    .arg(out.path())
                    .arg(&path)
                    .output()
                    .map_err(|e| e.to_string())?;
                ensure!(status.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&status.stderr));
                digests.push(tree_digest(out.path())?);
            }
            ensure!(!digests[0].is_empty(), "{}: empty output", path.display());
            ensure!(digests[0] == digests[1], "{} ({dialect}, {profile}): trees differ", path.display());
            compared += digests[0].len();
        }
    }
    Ok(format!("{compared} files byte-identical across paired builds"))
}

fn dot_validity() -> Outcome {
    let parse = |dot: &str| graphviz_rust::parse(dot).map(|_| ()).map_err(|e| format!("{e}\n{dot}"));
    let mut graphs = 1;
    parse(&emit_dot(&Model::new()).contents)?;
    for path in fixtures() {
        let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        parse(&emit_dot(&load_fixture(&name)).contents)?;
        graphs += 1;
    }
    run_cases(any_model(), |m| parse(&emit_dot(&m).contents).map_err(TestCaseError::fail))?;
    graphs += RANDOM_CASES as usize;
    Ok(format!("{graphs} graphs parsed"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("restaurant end-to-end", restaurant_end_to_end),
        ("conversion rule matrix", rule_matrix),
        ("lifeline partition", lifeline_partition),
        ("pretty-print round trip", round_trip),
        ("oracle equivalence", oracle_equivalence),
        ("SQL executability", executability),
        ("build determinism", determinism),
        ("DOT validity", dot_validity),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS  {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {}. {name}: {why}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
