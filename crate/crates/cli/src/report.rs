use std::io::{self, IsTerminal};

use dooml_core::diagnostic::{Diagnostic, Severity};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Color only for terminals, and never when `DOOML_NO_COLOR` is set.
pub fn color_enabled(stream_is_tty: bool) -> bool {
    stream_is_tty && std::env::var_os("DOOML_NO_COLOR").is_none()
}

pub fn stderr_color() -> bool {
    color_enabled(io::stderr().is_terminal())
}

pub fn stdout_color() -> bool {
    color_enabled(io::stdout().is_terminal())
}

#[derive(Serialize)]
struct JsonDiagnostic<'a> {
    severity: Severity,
    code: &'a str,
    file: &'a str,
    line: u32,
    column: u32,
    message: &'a str,
}

/// One line per diagnostic: `error[E1] path:line:col message`, or a JSON
/// object per line.
pub fn render(d: &Diagnostic, files: &[String], format: Format, color: bool) -> String {
    let file = files.get(d.span.file).map(String::as_str).unwrap_or("<input>");
    match format {
        Format::Json => serde_json::to_string(&JsonDiagnostic {
            severity: d.severity,
            code: d.code,
            file,
            line: d.span.line,
            column: d.span.column,
            message: &d.message,
        })
        .expect("diagnostics serialize"),
        Format::Text => {
            let (word, paint) = match d.severity {
                Severity::Error => ("error", "\x1b[1;31m"),
                Severity::Warning => ("warning", "\x1b[1;33m"),
            };
            let head = if color { format!("{paint}{word}[{}]\x1b[0m", d.code) } else { format!("{word}[{}]", d.code) };
            format!("{head} {file}:{}:{} {}", d.span.line, d.span.column, d.message)
        }
    }
}
