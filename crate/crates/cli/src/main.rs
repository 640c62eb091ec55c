//! `soda`: check, translate, format and run Soda sources.
//!
//! Exit codes: 0 success, 1 diagnostics with errors (or a runtime fault),
//! 2 usage errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use soda::analyzer::{retarget_directives, AnalyzedProgram};
use soda::backend::{lean, scala};
use soda::interpreter::{Env, Interpreter, DEFAULT_MAX_CALL_DEPTH};
use soda::lexer::tokenize;
use soda::parser::parse_expression;
use soda::syntax::{has_errors, pretty_print, Code, Diagnostic, SourceSpan, TokenKind};

#[derive(Parser)]
#[command(
    name = "soda",
    version,
    about = "Soda specification language toolchain",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and analyze sources, printing diagnostics.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Translate a source to Scala.
    Scala(Translate),
    /// Translate a source to Lean.
    Lean(Translate),
    /// Evaluate `Class.definition` applied to the given arguments.
    Run {
        file: PathBuf,
        /// Entry point, `Class.definition`.
        entry: String,
        /// Arguments, each a Soda expression such as `42` or `"text"`.
        #[arg(allow_negative_numbers = true)]
        args: Vec<String>,
        /// Maximum depth of non-tail calls.
        #[arg(long, env = "SODA_MAX_RECURSION", default_value_t = DEFAULT_MAX_CALL_DEPTH)]
        max_recursion: usize,
    },
    /// Print sources in canonical layout.
    Fmt {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Rewrite the files in place instead of printing.
        #[arg(long)]
        write: bool,
    },
}

#[derive(clap::Args)]
struct Translate {
    input: PathBuf,
    /// Defaults to the input path with the target's extension.
    output: Option<PathBuf>,
    /// Splice `directive <TARGET>` blocks instead of the backend's own.
    #[arg(long, value_name = "TARGET")]
    directive_target: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ok = match cli.command {
        Command::Check { files } => files.iter().filter(|f| !check(f)).count() == 0,
        Command::Scala(t) => translate(&t, Target::Scala),
        Command::Lean(t) => translate(&t, Target::Lean),
        Command::Run {
            file,
            entry,
            args,
            max_recursion,
        } => return run(&file, &entry, &args, max_recursion),
        Command::Fmt { files, write } => files.iter().filter(|f| !format(f, write)).count() == 0,
    };
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn report(diagnostics: &[Diagnostic]) {
    let mut err = std::io::stderr().lock();
    for d in diagnostics {
        let _ = writeln!(err, "{d}");
    }
}

fn io_error(path: &Path, action: &str, error: impl std::fmt::Display) -> Diagnostic {
    let span = SourceSpan::point(path.display().to_string().into(), 1, 1);
    Diagnostic::new(
        Code::Io,
        format!("could not {action} `{}`: {error}", path.display()),
        span,
    )
}

/// Reads, parses and analyzes `path`, printing every diagnostic. `None`
/// when there were errors.
fn load(path: &Path) -> Option<AnalyzedProgram> {
    let source = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            report(&[io_error(path, "read", e)]);
            return None;
        }
    };
    let parsed = soda::parse_source(&source, &path.display().to_string());
    let Some(program) = parsed.program.filter(|_| !has_errors(&parsed.diagnostics)) else {
        report(&parsed.diagnostics);
        return None;
    };
    let analyzed = soda::analyze(program);
    let mut diagnostics = parsed.diagnostics;
    diagnostics.extend(analyzed.diagnostics.iter().cloned());
    report(&diagnostics);
    (!has_errors(&diagnostics)).then_some(analyzed)
}

fn check(path: &Path) -> bool {
    load(path).is_some()
}

/// Writes through a temporary file in the same directory, so a failed run
/// never leaves a partial file behind.
fn write_atomically(path: &Path, text: &str) -> bool {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let result = tempfile::NamedTempFile::new_in(dir)
        .and_then(|mut file| {
            file.write_all(text.as_bytes())?;
            file.flush()?;
            Ok(file)
        })
        .and_then(|file| file.persist(path).map_err(|e| e.error));
    match result {
        Ok(_) => true,
        Err(e) => {
            report(&[io_error(path, "write", e)]);
            false
        }
    }
}

#[derive(Clone, Copy)]
enum Target {
    Scala,
    Lean,
}

impl Target {
    fn name(self) -> &'static str {
        match self {
            Target::Scala => "scala",
            Target::Lean => "lean",
        }
    }
}

fn translate(args: &Translate, target: Target) -> bool {
    let Some(mut analyzed) = load(&args.input) else {
        return false;
    };
    if let Some(from) = &args.directive_target {
        analyzed.program = retarget_directives(&analyzed.program, from, target.name());
    }
    let text = match target {
        Target::Scala => scala::translate_to_scala(&analyzed).text,
        Target::Lean => {
            let rendering = lean::translate_to_lean(&analyzed);
            report(&rendering.diagnostics);
            match rendering.text {
                Some(text) if !has_errors(&rendering.diagnostics) => text,
                _ => return false,
            }
        }
    };
    let output = args
        .output
        .clone()
        .unwrap_or_else(|| args.input.with_extension(target.name()));
    write_atomically(&output, &text)
}

fn format(path: &Path, write: bool) -> bool {
    let source = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            report(&[io_error(path, "read", e)]);
            return false;
        }
    };
    let parsed = soda::parse_source(&source, &path.display().to_string());
    report(&parsed.diagnostics);
    let Some(program) = parsed.program.filter(|_| !has_errors(&parsed.diagnostics)) else {
        return false;
    };
    let text = pretty_print(&program);
    if write {
        text == source || write_atomically(path, &text)
    } else {
        print!("{text}");
        true
    }
}

fn run(path: &Path, entry: &str, args: &[String], max_recursion: usize) -> ExitCode {
    let Some((class, definition)) = entry.rsplit_once('.') else {
        eprintln!("error: entry point must be `Class.definition`, got `{entry}`");
        return ExitCode::from(2);
    };
    let Some(analyzed) = load(path) else {
        return ExitCode::from(1);
    };
    let mut interpreter = Interpreter::new(&analyzed).with_max_call_depth(max_recursion);
    let mut values = Vec::new();
    for (i, arg) in args.iter().enumerate() {
        let name = format!("<argument {}>", i + 1);
        let lexed = tokenize(arg, &name);
        if has_errors(&lexed.diagnostics) {
            report(&lexed.diagnostics);
            return ExitCode::from(2);
        }
        let expr = match parse_expression(&lexed.tokens, 0) {
            Ok((expr, end))
                if lexed.tokens[end..]
                    .iter()
                    .all(|t| t.kind.is_trivia() || t.kind == TokenKind::EndOfInput) =>
            {
                expr
            }
            Ok((_, end)) => {
                report(&[Diagnostic::new(
                    Code::UnexpectedToken,
                    format!("unexpected {} after the argument", lexed.tokens[end].describe()),
                    lexed.tokens[end].span.clone(),
                )]);
                return ExitCode::from(2);
            }
            Err(d) => {
                report(&[d]);
                return ExitCode::from(2);
            }
        };
        match interpreter.evaluate_in(class, &expr, &Env::new()) {
            Ok(v) => values.push(v),
            Err(fault) => {
                eprintln!("{fault}");
                return ExitCode::from(1);
            }
        }
    }
    match interpreter.run_entry(class, definition, values) {
        Ok(value) => {
            println!("{value}");
            ExitCode::SUCCESS
        }
        Err(fault) => {
            eprintln!("{fault}");
            ExitCode::from(1)
        }
    }
}
