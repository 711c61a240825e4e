use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use frs_core::diag::{render_json, render_text, summary, Diagnostic};
use frs_core::interp::RunOutcome;
use frs_core::lexer::{dump_tokens, dump_tokens_json};
use frs_core::pipeline::{self, RunReport, DEFAULT_DEPTH_LIMIT};
use frs_core::syntax::{dump_program, print_program, Program};

#[derive(Parser)]
#[command(name = "frs", version, about = "Run the stages of the FRS pipeline over a source file")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the token stream.
    Lex(Common),
    /// Parse and pretty-print.
    Parse(Common),
    /// Expand macros.
    Expand(Common),
    /// Expand macros and desugar operators and `for` loops.
    Desugar(Common),
    /// Run the ownership checker.
    Check(Common),
    /// Check and evaluate `main`.
    Run {
        #[command(flatten)]
        common: Common,
        /// Run even if the checker reports errors.
        #[arg(long)]
        unchecked: bool,
    },
}

#[derive(clap::Args)]
struct Common {
    /// Source file, or `-` for stdin.
    input: PathBuf,
    /// Output format. Stage dumps take text, tree or tokens; `lex`,
    /// `check` and `run` take text or json.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Maximum nesting of macro expansions.
    #[arg(long, env = "FRS_MACRO_DEPTH", default_value_t = DEFAULT_DEPTH_LIMIT)]
    macro_depth: usize,
    /// Treat warnings as errors.
    #[arg(long)]
    deny_warnings: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Tree,
    Tokens,
}

struct Input {
    name: String,
    text: String,
}

fn read_input(path: &PathBuf) -> io::Result<Input> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        return Ok(Input {
            name: "<stdin>".into(),
            text,
        });
    }
    Ok(Input {
        name: path.display().to_string(),
        text: std::fs::read_to_string(path)?,
    })
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("frs: {}", msg);
    eprintln!("usage: frs <lex|parse|expand|desugar|check|run> [--format FMT] [--macro-depth N] [--deny-warnings] <FILE|->");
    ExitCode::from(2)
}

fn report(diags: &[Diagnostic], input: &Input, format: Format) {
    let text = match format {
        Format::Json => render_json(diags),
        _ => render_text(diags, &input.text, &input.name),
    };
    eprint!("{}", text);
}

fn emit(out: &str) -> ExitCode {
    let mut stdout = io::stdout().lock();
    // A closed pipe downstream is not an error of ours.
    let _ = stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush());
    ExitCode::SUCCESS
}

fn dump(p: &Program, format: Format) -> Result<String, String> {
    match format {
        Format::Text => Ok(print_program(p)),
        Format::Tree => Ok(dump_program(p)),
        Format::Tokens => pipeline::lex(&print_program(p))
            .map(|t| dump_tokens(&t))
            .map_err(|d| d[0].message.clone()),
        Format::Json => Err("json output is only available for lex, check and run".into()),
    }
}

fn stage(c: &Common, input: &Input, result: Result<Program, Vec<Diagnostic>>) -> ExitCode {
    match result {
        Ok(p) => match dump(&p, c.format) {
            Ok(s) => emit(&s),
            Err(msg) => usage(&msg),
        },
        Err(d) => {
            report(&d, input, c.format);
            ExitCode::from(1)
        }
    }
}

fn finish_run(outcome: RunOutcome, warnings: Vec<Diagnostic>, input: &Input, format: Format) -> ExitCode {
    report(&warnings, input, format);
    emit(&outcome.stdout);
    match outcome.error {
        None => ExitCode::SUCCESS,
        Some(e) => {
            report(&[e.to_diagnostic()], input, format);
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (c, unchecked) = match &cli.command {
        Command::Lex(c) | Command::Parse(c) | Command::Expand(c) | Command::Desugar(c) | Command::Check(c) => (c, false),
        Command::Run { common, unchecked } => (common, *unchecked),
    };
    let diag_format = matches!(cli.command, Command::Lex(_) | Command::Check(_) | Command::Run { .. });
    if diag_format && matches!(c.format, Format::Tree | Format::Tokens) {
        return usage("this subcommand takes --format text or json");
    }
    let input = match read_input(&c.input) {
        Ok(i) => i,
        Err(e) => return usage(&format!("cannot read {}: {}", c.input.display(), e)),
    };
    let depth = c.macro_depth;
    match &cli.command {
        Command::Lex(_) => match pipeline::lex(&input.text) {
            Ok(tokens) => emit(&match c.format {
                Format::Json => dump_tokens_json(&tokens),
                _ => dump_tokens(&tokens),
            }),
            Err(d) => {
                report(&d, &input, c.format);
                ExitCode::from(1)
            }
        },
        Command::Parse(_) => stage(c, &input, pipeline::parse(&input.text)),
        Command::Expand(_) => stage(c, &input, pipeline::expand(&input.text, depth)),
        Command::Desugar(_) => stage(c, &input, pipeline::desugar(&input.text, depth)),
        Command::Check(_) => {
            let diags = pipeline::check(&input.text, depth).unwrap_or_else(|d| d);
            report(&diags, &input, c.format);
            println!("{}", summary(&diags));
            let failed = diags.iter().any(|d| d.is_error() || c.deny_warnings);
            ExitCode::from(failed as u8)
        }
        Command::Run { .. } => match pipeline::run(&input.text, depth, unchecked) {
            RunReport::Rejected(d) => {
                report(&d, &input, c.format);
                ExitCode::from(1)
            }
            RunReport::Ran { warnings, .. } if c.deny_warnings && !warnings.is_empty() && !unchecked => {
                report(&warnings, &input, c.format);
                ExitCode::from(1)
            }
            RunReport::Ran { outcome, warnings } => finish_run(outcome, warnings, &input, c.format),
        },
    }
}
