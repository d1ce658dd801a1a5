//! Running emitted SQL on an embedded engine.

use std::collections::BTreeMap;

use dooml_core::convert::SchemaIr;
use rusqlite::Connection;

/// Fresh in-memory database with foreign keys enforced and `ddl` applied.
pub fn open(ddl: &str) -> Result<Connection, String> {
    let conn = Connection::open_in_memory().map_err(|e| e.to_string())?;
    conn.execute_batch("PRAGMA foreign_keys = ON;").map_err(|e| e.to_string())?;
    conn.execute_batch(ddl).map_err(|e| format!("{e}\n{ddl}"))?;
    Ok(conn)
}

/// Statements of a script with comment lines removed.
pub fn statements(script: &str) -> Vec<String> {
    let code: String = script.lines().filter(|l| !l.trim_start().starts_with("--")).collect::<Vec<_>>().join("\n");
    code.split(';').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect()
}

pub fn row_count(conn: &Connection, query: &str) -> Result<usize, String> {
    let mut stmt = conn.prepare(query).map_err(|e| format!("{e}: {query}"))?;
    let mut rows = stmt.query([]).map_err(|e| e.to_string())?;
    let mut n = 0;
    while rows.next().map_err(|e| e.to_string())?.is_some() {
        n += 1;
    }
    Ok(n)
}

/// SQL literal for row `i` of a column of type `db_type`.
fn literal(db_type: &str, i: usize) -> String {
    let ty = db_type.to_ascii_uppercase();
    let n = i + 1;
    if ["INT", "BIGINT", "SMALLINT", "TINYINT", "MEDIUMINT", "INTEGER"].iter().any(|p| ty.starts_with(p)) {
        n.to_string()
    } else if ["DECIMAL", "NUMERIC", "FLOAT", "DOUBLE", "REAL"].iter().any(|p| ty.starts_with(p)) {
        format!("{n}.50")
    } else if ty.starts_with("BOOL") {
        (i % 2).to_string()
    } else if ty.starts_with("DATETIME") || ty.starts_with("TIMESTAMP") {
        format!("'2024-01-0{n} 12:00:00'")
    } else if ty.starts_with("DATE") {
        format!("'2024-01-0{n}'")
    } else {
        format!("'v{i}'")
    }
}

/// Inserts `rows` rows into every table, parents first. Row `i` of a table
/// references row `i` of each target, so every key is referenced and every
/// total participation holds.
pub fn seed(conn: &Connection, schema: &SchemaIr, rows: usize) -> Result<(), String> {
    let mut values: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
    let mut pending: Vec<usize> = (0..schema.tables.len()).collect();
    while !pending.is_empty() {
        let pos = pending
            .iter()
            .position(|&ti| {
                let t = &schema.tables[ti];
                t.foreign_keys.iter().all(|fk| {
                    fk.target_table == t.name
                        || values.contains_key(&(fk.target_table.clone(), fk.target_column.clone()))
                })
            })
            .ok_or("reference cycle in seed data")?;
        let table = &schema.tables[pending.remove(pos)];
        let mut columns: Vec<(String, Vec<String>)> = Vec::new();
        for c in &table.columns {
            let vals: Vec<String> = match table.foreign_key(&c.name) {
                Some(fk) if fk.target_table != table.name => {
                    values[&(fk.target_table.clone(), fk.target_column.clone())].clone()
                }
                Some(_) => vec!["NULL".to_string(); rows],
                None => {
                    let ty = c.db_type.as_deref().ok_or_else(|| format!("{}.{} has no type", table.name, c.name))?;
                    (0..rows).map(|i| literal(ty, i)).collect()
                }
            };
            columns.push((c.name.clone(), vals));
        }
        let names: Vec<String> = columns.iter().map(|(n, _)| format!("\"{n}\"")).collect();
        for i in 0..rows {
            let vals: Vec<&str> = columns.iter().map(|(_, v)| v[i].as_str()).collect();
            let sql = format!("INSERT INTO \"{}\" ({}) VALUES ({})", table.name, names.join(", "), vals.join(", "));
            conn.execute(&sql, []).map_err(|e| format!("{e}: {sql}"))?;
        }
        for (name, vals) in columns {
            values.insert((table.name.clone(), name), vals);
        }
    }
    Ok(())
}
