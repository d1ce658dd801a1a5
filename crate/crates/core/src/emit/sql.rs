use std::collections::BTreeSet;
use std::fmt::Write;

use super::{EmitConfig, EmitError, EmittedFile};
use crate::convert::{Column, Dialect, ForeignKey, SchemaIr, SqlFunctionStub, TableDef, TotalParticipationAssertion};

struct Sql {
    dialect: Dialect,
}

impl Sql {
    fn ident(&self, name: &str) -> String {
        match self.dialect {
            Dialect::MySql => format!("`{}`", name.replace('`', "``")),
            Dialect::Ansi => name.to_string(),
        }
    }

    fn idents(&self, names: &[String]) -> String {
        names.iter().map(|n| self.ident(n)).collect::<Vec<_>>().join(", ")
    }

    fn column(&self, table: &TableDef, col: &Column) -> Result<String, EmitError> {
        let ty = col
            .db_type
            .as_deref()
            .ok_or_else(|| EmitError::MissingDbType { owner: table.name.clone(), member: col.name.clone() })?;
        let mut out = format!("{} {ty}", self.ident(&col.name));
        if self.dialect == Dialect::MySql {
            if col.unsigned {
                out.push_str(" UNSIGNED");
            }
            if col.auto_increment {
                out.push_str(" AUTO_INCREMENT");
            }
        }
        if !col.nullable {
            out.push_str(" NOT NULL");
        }
        Ok(out)
    }

    fn fk_clause(&self, table: &str, fk: &ForeignKey) -> String {
        format!(
            "CONSTRAINT {} FOREIGN KEY ({}) REFERENCES {} ({})",
            self.ident(&format!("fk_{table}_{}", fk.column)),
            self.ident(&fk.column),
            self.ident(&fk.target_table),
            self.ident(&fk.target_column)
        )
    }

    fn unique_clause(&self, table: &str, columns: &[String]) -> String {
        format!(
            "CONSTRAINT {} UNIQUE ({})",
            self.ident(&format!("uq_{table}_{}", columns.join("_"))),
            self.idents(columns)
        )
    }
}

/// Creation order: repeatedly take the earliest table whose referenced
/// tables all exist already; when only cycles remain, take the earliest
/// remaining table and defer its forward references.
fn creation_order(schema: &SchemaIr) -> Vec<usize> {
    let n = schema.tables.len();
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let ready = |i: usize, done: &[bool]| {
        let t = &schema.tables[i];
        t.foreign_keys.iter().all(|fk| {
            fk.target_table == t.name
                || schema.tables.iter().position(|o| o.name == fk.target_table).is_none_or(|j| done[j])
        })
    };
    while order.len() < n {
        let next = (0..n)
            .find(|&i| !done[i] && ready(i, &done))
            .or_else(|| (0..n).find(|&i| !done[i]))
            .expect("a table remains");
        done[next] = true;
        order.push(next);
    }
    order
}

fn create_table(
    sql: &Sql,
    table: &TableDef,
    created: &BTreeSet<&str>,
    deferred: &mut Vec<String>,
) -> Result<String, EmitError> {
    let mut lines = Vec::new();
    for col in &table.columns {
        lines.push(sql.column(table, col)?);
    }
    if let Some(pk) = &table.primary_key {
        lines.push(format!("PRIMARY KEY ({})", sql.ident(pk)));
    }
    for fk in table.foreign_keys.iter().filter(|fk| fk.unique) {
        lines.push(sql.unique_clause(&table.name, std::slice::from_ref(&fk.column)));
    }
    for cols in &table.unique {
        lines.push(sql.unique_clause(&table.name, cols));
    }
    for fk in &table.foreign_keys {
        if fk.target_table == table.name || created.contains(fk.target_table.as_str()) {
            lines.push(sql.fk_clause(&table.name, fk));
        } else {
            deferred.push(format!("ALTER TABLE {} ADD {};", sql.ident(&table.name), sql.fk_clause(&table.name, fk)));
        }
    }
    let mut out = format!("CREATE TABLE {} (\n", sql.ident(&table.name));
    out.push_str(&lines.iter().map(|l| format!("    {l}")).collect::<Vec<_>>().join(",\n"));
    out.push_str("\n);\n");
    Ok(out)
}

fn function_stub(stub: &SqlFunctionStub) -> Result<String, EmitError> {
    let missing = |member: &str| EmitError::MissingDbType { owner: stub.name.clone(), member: member.to_string() };
    let mut params = Vec::new();
    for p in &stub.params {
        params.push(format!("{} {}", p.name, p.db_type.as_deref().ok_or_else(|| missing(&p.name))?));
    }
    let mut out = format!("-- FUNCTION {}({})", stub.name, params.join(", "));
    match &stub.returns {
        Some(Some(ty)) => {
            let _ = write!(out, " RETURNS {ty}");
        }
        Some(None) => return Err(missing("return")),
        None => {}
    }
    out.push_str("\n-- BEGIN\n-- END;\n");
    Ok(out)
}

fn assertion_query(sql: &Sql, a: &TotalParticipationAssertion) -> String {
    let outer = a.table.chars().next().map(|c| c.to_ascii_lowercase().to_string()).unwrap_or_else(|| "t".into());
    let mut inner =
        a.referencing_table.chars().next().map(|c| c.to_ascii_lowercase().to_string()).unwrap_or_else(|| "r".into());
    if inner == outer {
        inner.push('2');
    }
    let q = |alias: &str, col: &str| format!("{}.{}", sql.ident(alias), sql.ident(col));
    format!(
        "-- every {table}.{key} must appear in {rt}.{rc}\nSELECT {sel} FROM {t} {o} LEFT JOIN {r} {i} ON {on_r} = {sel} WHERE {on_r} IS NULL;\n",
        table = a.table,
        key = a.key_column,
        rt = a.referencing_table,
        rc = a.referencing_column,
        sel = q(&outer, &a.key_column),
        t = sql.ident(&a.table),
        o = sql.ident(&outer),
        r = sql.ident(&a.referencing_table),
        i = sql.ident(&inner),
        on_r = q(&inner, &a.referencing_column),
    )
}

/// Renders `sql/schema.sql` and, when assertions are requested,
/// `sql/assertions.sql`. The primary-key profile of the configured dialect is
/// applied here, so `schema` should be the dialect-neutral IR.
pub fn emit_sql(schema: &SchemaIr, config: &EmitConfig) -> Result<Vec<EmittedFile>, EmitError> {
    let schema = schema.for_dialect(config.dialect);
    let sql = Sql { dialect: config.dialect };
    let names: BTreeSet<&str> = schema.tables.iter().map(|t| t.name.as_str()).collect();
    for t in &schema.tables {
        if let Some(fk) = t.foreign_keys.iter().find(|fk| !names.contains(fk.target_table.as_str())) {
            return Err(EmitError::DanglingForeignKey {
                table: t.name.clone(),
                column: fk.column.clone(),
                target: fk.target_table.clone(),
            });
        }
    }

    let header = format!("-- Generated by doomlc ({} dialect). Do not edit.\n", config.dialect);
    let mut blocks = vec![header.clone()];
    let mut created = BTreeSet::new();
    let mut deferred = Vec::new();
    for i in creation_order(&schema) {
        let table = &schema.tables[i];
        blocks.push(create_table(&sql, table, &created, &mut deferred)?);
        created.insert(table.name.as_str());
    }
    if !deferred.is_empty() {
        blocks.push(deferred.join("\n") + "\n");
    }
    for stub in &schema.functions {
        blocks.push(function_stub(stub)?);
    }
    let mut files = vec![EmittedFile::new("sql/schema.sql", blocks.join("\n"))];

    if config.emit_assertions {
        let mut blocks = vec![format!(
            "-- Generated by doomlc ({} dialect). Each query returns the rows violating a total participation.\n",
            config.dialect
        )];
        blocks.extend(schema.assertions().map(|a| assertion_query(&sql, a)));
        files.push(EmittedFile::new("sql/assertions.sql", blocks.join("\n")));
    }
    Ok(files)
}
