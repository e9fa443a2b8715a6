//! Command-line entry points: batch query evaluation and the
//! interactive shell.
//!
//! Exit codes: 0 success, 1 usage or parse failure, 2 safety violation,
//! 3 resource limit exceeded. Results go to standard output, diagnostics
//! to standard error.

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser as _;

use crate::ground::{GroundError, ResourceLimits};
use crate::repl::{answer_with_pipeline, query_pipeline, render_result, Mode, Session};
use crate::syntax::{parse_program, parse_query, ParseError, Program, Rule};
use crate::xgf::emit_xgf;

const EXIT_PARSE: u8 = 1;
const EXIT_SAFETY: u8 = 2;
const EXIT_LIMIT: u8 = 3;

#[derive(Debug, clap::Parser)]
#[command(
    name = "xnmr",
    version,
    about = "Explore normal logic programs under well-founded and stable semantics"
)]
struct Args {
    /// Program files to load, concatenated in order.
    #[arg(value_name = "FILE")]
    files: Vec<PathBuf>,

    /// Evaluate one query and exit.
    #[arg(long, value_name = "Q")]
    query: Option<String>,

    /// Reasoning mode.
    #[arg(long, default_value = "models", value_parser = clap::builder::ValueParser::new(Mode::from_str_arg))]
    mode: Mode,

    /// Most stable models listed per query.
    #[arg(long, default_value_t = 10, value_parser = parse_positive)]
    max_models: usize,

    /// Write the query's residual program to PATH as XGF.
    #[arg(long, value_name = "PATH", requires = "query")]
    emit_residual: Option<PathBuf>,

    /// Most ground atoms a query may intern.
    #[arg(long, default_value_t = 1_000_000, value_parser = parse_positive)]
    max_ground_atoms: usize,

    /// Read commands from standard input without a prompt.
    #[arg(long)]
    batch: bool,
}

impl Mode {
    fn from_str_arg(s: &str) -> Result<Mode, String> {
        s.parse()
    }
}

fn parse_positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err("must be a positive integer".to_string()),
    }
}

fn parse_exit(e: &ParseError) -> u8 {
    match e {
        ParseError::Syntax { .. } => EXIT_PARSE,
        ParseError::Safety { .. } => EXIT_SAFETY,
    }
}

fn ground_exit(e: &GroundError) -> u8 {
    match e {
        GroundError::InternalPredicateClash { .. } => EXIT_PARSE,
        GroundError::ResourceLimitExceeded { .. } => EXIT_LIMIT,
    }
}

fn load_files(paths: &[PathBuf]) -> Result<Program, u8> {
    let mut rules: Vec<Rule> = Vec::new();
    for path in paths {
        let text = std::fs::read_to_string(path).map_err(|_| {
            eprintln!("cannot read {}", path.display());
            EXIT_PARSE
        })?;
        let program = parse_program(&text).map_err(|e| {
            eprintln!("{}: {e}", path.display());
            parse_exit(&e)
        })?;
        rules.extend(program.rules().iter().cloned());
    }
    Program::new(rules).map_err(|e| {
        eprintln!("{e}");
        parse_exit(&e)
    })
}

fn run_query(args: &Args, program: &Program) -> u8 {
    let limits = ResourceLimits {
        max_ground_atoms: args.max_ground_atoms,
    };
    let query_text = args.query.as_deref().unwrap();
    let query = match parse_query(query_text) {
        Ok(q) => q,
        Err(e) => {
            eprintln!("{e}");
            return parse_exit(&e);
        }
    };
    let pipeline = match query_pipeline(program, &query, limits) {
        Ok(pl) => pl,
        Err(e) => {
            eprintln!("{e}");
            return ground_exit(&e);
        }
    };
    if let Some(path) = &args.emit_residual {
        if let Err(e) = std::fs::write(path, emit_xgf(&pipeline.residual)) {
            eprintln!("cannot write {}: {e}", path.display());
            return EXIT_PARSE;
        }
    }
    let result = answer_with_pipeline(&pipeline, &query, args.mode, args.max_models);
    println!("{}", render_result(&result));
    0
}

fn run_session(args: &Args, program: Program, interactive: bool) -> u8 {
    let limits = ResourceLimits {
        max_ground_atoms: args.max_ground_atoms,
    };
    let mut session = Session::with_settings(args.mode, args.max_models, limits);
    session.load_program(program);
    let stdin = std::io::stdin();
    let mut lines = stdin.lock().lines();
    loop {
        if interactive {
            print!("xnmr> ");
            let _ = std::io::stdout().flush();
        }
        let Some(Ok(line)) = lines.next() else {
            if interactive {
                println!();
            }
            return 0;
        };
        let result = session.execute(&line);
        if !result.output.is_empty() {
            println!("{}", result.output);
        }
        if result.quit {
            return 0;
        }
    }
}

fn dispatch(args: Args) -> u8 {
    let program = match load_files(&args.files) {
        Ok(p) => p,
        Err(code) => return code,
    };
    if args.query.is_some() {
        run_query(&args, &program)
    } else {
        run_session(&args, program, !args.batch)
    }
}

/// Parses `std::env::args` and runs the program; the process entry point.
pub fn run() -> ExitCode {
    match Args::try_parse() {
        Ok(args) => ExitCode::from(dispatch(args)),
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                let _ = e.print();
                ExitCode::SUCCESS
            }
            _ => {
                let _ = e.print();
                ExitCode::from(EXIT_PARSE)
            }
        },
    }
}
