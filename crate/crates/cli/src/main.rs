//! `doomlc`: compile DooML archetype diagrams into SQL, class skeletons,
//! OpenAPI and DOT.

mod config;
mod report;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dooml_core::convert::{to_api_ir, to_class_ir, to_schema_ir, Dialect};
use dooml_core::diagnostic::Diagnostic;
use dooml_core::emit::{emit_dot, write_files, EmitConfig, EmittedFile, ProfileRegistry};
use dooml_core::model::Model;
use dooml_core::pipeline::{self, BuildError};
use dooml_core::syntax::{parse_model_in, pretty_print};
use dooml_core::validate::validate;

use report::Format;

const EXIT_INVALID: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "doomlc", version, about = "Compile DooML archetype diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Diagnostic output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Project config file (default: ./dooml.toml when present)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate, printing diagnostics
    Check(Inputs),
    /// Run the full pipeline and write the output tree
    Build {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        emit: EmitFlags,
    },
    /// Write only the DOT diagram (validation not required)
    Diagram {
        #[command(flatten)]
        inputs: Inputs,
        /// Output directory
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print to stdout instead of writing a file
        #[arg(long)]
        stdout: bool,
    },
    /// Rewrite sources in canonical form (comments are not preserved)
    Fmt {
        #[command(flatten)]
        inputs: Inputs,
        /// Report files that would change without rewriting them
        #[arg(long)]
        check: bool,
    },
    /// Print an intermediate representation as JSON
    DumpIr {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_enum)]
        ir: IrKind,
        /// SQL dialect for the schema IR: ansi or mysql
        #[arg(long, value_parser = parse_dialect)]
        dialect: Option<Dialect>,
    },
}

#[derive(Args)]
struct Inputs {
    /// Source files
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Args)]
struct EmitFlags {
    /// SQL dialect: ansi or mysql
    #[arg(long, value_parser = parse_dialect)]
    dialect: Option<Dialect>,
    /// Class profile name
    #[arg(long)]
    profile: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write sql/assertions.sql
    #[arg(long)]
    emit_assertions: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum IrKind {
    Class,
    Schema,
    Api,
    Model,
}

fn parse_dialect(s: &str) -> Result<Dialect, String> {
    s.parse()
}

/// Failure of a subcommand, mapped to an exit code.
enum Failure {
    /// Diagnostics were already printed.
    Invalid,
    /// A model problem found after validation.
    Failed(String),
    Usage(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Sources {
    names: Vec<String>,
    texts: Vec<String>,
}

fn read_sources(paths: &[PathBuf]) -> Result<Sources, Failure> {
    let mut names = Vec::new();
    let mut texts = Vec::new();
    for p in paths {
        let text = fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
        names.push(p.display().to_string());
        texts.push(text);
    }
    Ok(Sources { names, texts })
}

struct Ctx {
    format: Format,
}

impl Ctx {
    fn print_diagnostics(&self, out: &mut dyn Write, color: bool, diags: &[Diagnostic], files: &[String]) {
        for d in diags {
            let _ = writeln!(out, "{}", report::render(d, files, self.format, color));
        }
    }

    fn stderr_diagnostics(&self, diags: &[Diagnostic], files: &[String]) {
        self.print_diagnostics(&mut io::stderr().lock(), report::stderr_color(), diags, files);
    }

    fn parse(&self, sources: &Sources) -> Result<Model, Failure> {
        pipeline::parse_sources(&sources.texts).map_err(|diags| {
            self.stderr_diagnostics(&diags, &sources.names);
            Failure::Invalid
        })
    }

    fn check(&self, inputs: &Inputs) -> Result<(), Failure> {
        let sources = read_sources(&inputs.files)?;
        let mut stdout = io::stdout().lock();
        let color = report::stdout_color();
        let model = match pipeline::parse_sources(&sources.texts) {
            Ok(m) => m,
            Err(diags) => {
                self.print_diagnostics(&mut stdout, color, &diags, &sources.names);
                return Err(Failure::Invalid);
            }
        };
        let report = validate(&model);
        self.print_diagnostics(&mut stdout, color, &report.diagnostics, &sources.names);
        if self.format == Format::Text {
            let _ = writeln!(
                stdout,
                "{} archetype(s), {} relationship(s): {} error(s), {} warning(s)",
                model.archetypes.len(),
                model.relationships.len(),
                report.errors().count(),
                report.warnings().count()
            );
        }
        if report.ok {
            Ok(())
        } else {
            Err(Failure::Invalid)
        }
    }

    fn build(&self, inputs: &Inputs, flags: &EmitFlags, config_path: Option<&Path>) -> Result<(), Failure> {
        let file = config::load(config_path).map_err(Failure::Usage)?;
        let overrides = config::Overrides {
            dialect: flags.dialect,
            profile: flags.profile.clone(),
            out_dir: flags.out.clone(),
            emit_assertions: flags.emit_assertions,
        };
        let config: EmitConfig = config::resolve(file, overrides).map_err(Failure::Usage)?;
        let registry = ProfileRegistry::with_builtin();
        registry.require(&config.profile).map_err(|e| Failure::Usage(e.to_string()))?;

        let sources = read_sources(&inputs.files)?;
        let model = self.parse(&sources)?;
        let output = match pipeline::build(&model, &config, &registry) {
            Ok(o) => o,
            Err(BuildError::Invalid(diags)) => {
                self.stderr_diagnostics(&diags, &sources.names);
                return Err(Failure::Invalid);
            }
            Err(e) => return Err(Failure::Failed(e.to_string())),
        };
        self.stderr_diagnostics(&output.warnings, &sources.names);
        write_files(&config.out_dir, &output.files)
            .map_err(|e| Failure::Usage(format!("{}: {e}", config.out_dir.display())))?;
        let mut stdout = io::stdout().lock();
        for f in &output.files {
            let _ = writeln!(stdout, "{}  {}", f.checksum, config.out_dir.join(&f.relative_path).display());
        }
        Ok(())
    }

    fn diagram(
        &self,
        inputs: &Inputs,
        out: Option<&Path>,
        to_stdout: bool,
        config_path: Option<&Path>,
    ) -> Result<(), Failure> {
        let sources = read_sources(&inputs.files)?;
        let model = self.parse(&sources)?;
        let dot = emit_dot(&model);
        if to_stdout {
            print!("{}", dot.contents);
            return Ok(());
        }
        let out_dir = match out {
            Some(dir) => dir.to_path_buf(),
            None => {
                let file = config::load(config_path).map_err(Failure::Usage)?;
                config::resolve(file, config::Overrides::default()).map_err(Failure::Usage)?.out_dir
            }
        };
        write_files(&out_dir, std::slice::from_ref(&dot))?;
        println!("{}  {}", dot.checksum, out_dir.join(&dot.relative_path).display());
        Ok(())
    }

    fn fmt(&self, inputs: &Inputs, check: bool) -> Result<(), Failure> {
        let sources = read_sources(&inputs.files)?;
        let mut formatted = Vec::new();
        let mut errors = Vec::new();
        for (i, text) in sources.texts.iter().enumerate() {
            match parse_model_in(text, i) {
                Ok(model) => formatted.push(pretty_print(&model)),
                Err(diags) => errors.extend(diags),
            }
        }
        if !errors.is_empty() {
            self.stderr_diagnostics(&errors, &sources.names);
            return Err(Failure::Invalid);
        }
        let mut changed = false;
        for ((path, old), new) in inputs.files.iter().zip(&sources.texts).zip(formatted) {
            if *old == new {
                continue;
            }
            changed = true;
            if check {
                println!("would reformat {}", path.display());
            } else {
                let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
                let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                write_files(dir, &[EmittedFile::new(name, new)])?;
                println!("formatted {}", path.display());
            }
        }
        if check && changed {
            Err(Failure::Invalid)
        } else {
            Ok(())
        }
    }

    fn dump_ir(
        &self,
        inputs: &Inputs,
        ir: IrKind,
        dialect: Option<Dialect>,
        config_path: Option<&Path>,
    ) -> Result<(), Failure> {
        let sources = read_sources(&inputs.files)?;
        let model = self.parse(&sources)?;
        let report = validate(&model);
        self.stderr_diagnostics(&report.diagnostics, &sources.names);
        if !report.ok {
            return Err(Failure::Invalid);
        }
        let json = match ir {
            IrKind::Model => serde_json::to_string_pretty(&model),
            IrKind::Class => serde_json::to_string_pretty(&to_class_ir(&model)),
            IrKind::Api => serde_json::to_string_pretty(&to_api_ir(&model)),
            IrKind::Schema => {
                let dialect = match dialect {
                    Some(d) => d,
                    None => {
                        let file = config::load(config_path).map_err(Failure::Usage)?;
                        config::resolve(file, config::Overrides::default()).map_err(Failure::Usage)?.dialect
                    }
                };
                let schema = to_schema_ir(&model).map_err(|e| Failure::Failed(e.to_string()))?;
                serde_json::to_string_pretty(&schema.for_dialect(dialect))
            }
        }
        .map_err(|e| Failure::Usage(e.to_string()))?;
        println!("{json}");
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx { format: cli.format };
    let config = cli.config.as_deref();
    let result = match &cli.command {
        Command::Check(inputs) => ctx.check(inputs),
        Command::Build { inputs, emit } => ctx.build(inputs, emit, config),
        Command::Diagram { inputs, out, stdout } => ctx.diagram(inputs, out.as_deref(), *stdout, config),
        Command::Fmt { inputs, check } => ctx.fmt(inputs, *check),
        Command::DumpIr { inputs, ir, dialect } => ctx.dump_ir(inputs, *ir, *dialect, config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid) => ExitCode::from(EXIT_INVALID),
        Err(Failure::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
