//! The top-loop evaluator: sessions, query answering, and command
//! execution shared by the interactive shell and the batch CLI.
//!
//! A query runs through the full pipeline (relevant grounding, the
//! well-founded model, residual extraction, stable-model enumeration)
//! and is answered per substitution: each instantiated answer atom gets
//! a verdict, and in models mode the stable completions of the relevant
//! program are listed alongside.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::ground::{relevant_ground, GroundError, GroundProgram, ResourceLimits};
use crate::solver::{enumerate_stable, StableModel};
use crate::syntax::{parse_program, parse_query, Atom, Literal, Program, Query, Term};
use crate::wfs::{extract_residual, well_founded, ResidualProgram, WfsResult};
use crate::xgf::emit_xgf;

/// Reasoning mode of a session.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Mode {
    /// Three-valued verdicts from the well-founded model only.
    Wfs,
    /// Undefined answers refined by truth in some stable model.
    Brave,
    /// Undefined answers refined by truth in all stable models.
    Cautious,
    /// Undefined answers listed against the enumerated stable models.
    #[default]
    Models,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Wfs => "wfs",
            Mode::Brave => "brave",
            Mode::Cautious => "cautious",
            Mode::Models => "models",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "wfs" => Ok(Mode::Wfs),
            "brave" => Ok(Mode::Brave),
            "cautious" => Ok(Mode::Cautious),
            "models" => Ok(Mode::Models),
            other => Err(format!("unknown mode: {other}")),
        }
    }
}

/// Verdict attached to one answer substitution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    Undefined,
    BraveTrue,
    BraveFalse,
    CautiousTrue,
    CautiousFalse,
    /// Cautious verdict when the residual has no stable model at all.
    NoStableCompletion,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Undefined => "undefined",
            Verdict::BraveTrue => "brave-true",
            Verdict::BraveFalse => "brave-false",
            Verdict::CautiousTrue => "cautious-true",
            Verdict::CautiousFalse => "cautious-false",
            Verdict::NoStableCompletion => "no stable completion",
        })
    }
}

/// One answer substitution for a query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    /// The query with the substitution applied, canonically printed.
    pub rendered: String,
    /// Variable bindings in first-occurrence order.
    pub bindings: Vec<(String, String)>,
    pub verdict: Verdict,
    /// Indices into the model list where this answer holds. Populated
    /// for answers that are undefined in the well-founded model.
    pub holds_in: Vec<usize>,
    /// Indices into the model list where this answer fails.
    pub fails_in: Vec<usize>,
}

/// Numbers of answers per well-founded label.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AnswerCounts {
    pub true_answers: usize,
    pub false_answers: usize,
    pub undefined_answers: usize,
}

/// Everything a query evaluation produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    pub mode: Mode,
    /// Answers ordered by their instantiated answer atom.
    pub answers: Vec<Answer>,
    /// Enumerated partial stable models, presented as the printed atoms
    /// of `true_set ∪ M` with internal atoms hidden.
    pub models: Vec<BTreeSet<String>>,
    pub counts: AnswerCounts,
}

/// The intermediate artifacts of one query run.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub ground: GroundProgram,
    pub wfs: WfsResult,
    pub residual: ResidualProgram,
}

/// Grounds the query-relevant subprogram, computes its well-founded
/// model, and extracts the residual.
pub fn query_pipeline(
    program: &Program,
    query: &Query,
    limits: ResourceLimits,
) -> Result<PipelineOutput, GroundError> {
    let ground = relevant_ground(program, query, limits)?;
    let wfs = well_founded(&ground);
    let residual = extract_residual(&ground, &wfs);
    Ok(PipelineOutput {
        ground,
        wfs,
        residual,
    })
}

fn hidden(text: &str) -> bool {
    text.starts_with(crate::ground::RESERVED_PREFIX)
}

/// `true_set ∪ M` as printed atoms, internal answer atoms removed.
fn present_model(pl: &PipelineOutput, model: &StableModel) -> BTreeSet<String> {
    let mut atoms: BTreeSet<String> = pl
        .wfs
        .true_set
        .iter()
        .map(|&a| pl.ground.atoms().text(a))
        .filter(|t| !hidden(t))
        .map(str::to_string)
        .collect();
    atoms.extend(
        model
            .true_atoms
            .iter()
            .map(|&a| pl.residual.atoms().text(a))
            .filter(|t| !hidden(t))
            .map(str::to_string),
    );
    atoms
}

fn substitute(atom: &Atom, bindings: &HashMap<&str, &Term>) -> Atom {
    let args = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Variable(v) => bindings
                .get(v.as_str())
                .map(|&b| b.clone())
                .unwrap_or_else(|| t.clone()),
            ground => ground.clone(),
        })
        .collect();
    Atom::new(atom.predicate.clone(), args)
}

/// Answers and models for an already-run pipeline.
pub fn answer_with_pipeline(
    pl: &PipelineOutput,
    query: &Query,
    mode: Mode,
    max_models: usize,
) -> QueryResult {
    let raw_models: Vec<StableModel> = if pl.residual.is_empty() || mode == Mode::Wfs {
        Vec::new()
    } else if mode == Mode::Models {
        enumerate_stable(&pl.residual, Some(max_models))
    } else {
        enumerate_stable(&pl.residual, None)
    };
    let models: Vec<BTreeSet<String>> = raw_models
        .iter()
        .map(|m| present_model(pl, m))
        .collect();

    let variables = query.variables();
    let mut answers = Vec::new();
    let mut counts = AnswerCounts::default();
    for &ans_id in pl.ground.query_atoms() {
        let text = pl.ground.atoms().text(ans_id);
        let ans_atom = parse_program(&format!("{text}."))
            .expect("answer atoms reparse")
            .rules()[0]
            .head
            .clone();
        let bindings: Vec<(String, String)> = variables
            .iter()
            .zip(&ans_atom.args)
            .map(|(v, t)| (v.to_string(), t.to_string()))
            .collect();
        let map: HashMap<&str, &Term> = variables
            .iter()
            .zip(&ans_atom.args)
            .map(|(v, t)| (*v, t))
            .collect();
        let rendered = query
            .literals()
            .iter()
            .map(|l| {
                Literal {
                    atom: substitute(&l.atom, &map),
                    negated: l.negated,
                }
                .to_string()
            })
            .collect::<Vec<_>>()
            .join(", ");

        let (base, holds_in, fails_in) = if pl.wfs.true_set.contains(&ans_id) {
            counts.true_answers += 1;
            (Verdict::True, Vec::new(), Vec::new())
        } else if pl.wfs.false_set.contains(&ans_id) {
            counts.false_answers += 1;
            (Verdict::False, Vec::new(), Vec::new())
        } else {
            counts.undefined_answers += 1;
            let res_id = pl
                .residual
                .atoms()
                .id(text)
                .expect("undefined atoms are residual atoms");
            let (mut holds, mut fails) = (Vec::new(), Vec::new());
            for (i, m) in raw_models.iter().enumerate() {
                if m.true_atoms.contains(&res_id) {
                    holds.push(i);
                } else {
                    fails.push(i);
                }
            }
            (Verdict::Undefined, holds, fails)
        };
        let verdict = match (mode, base) {
            (Mode::Brave, Verdict::Undefined) => {
                if holds_in.is_empty() {
                    Verdict::BraveFalse
                } else {
                    Verdict::BraveTrue
                }
            }
            (Mode::Cautious, Verdict::Undefined) => {
                if raw_models.is_empty() {
                    Verdict::NoStableCompletion
                } else if fails_in.is_empty() {
                    Verdict::CautiousTrue
                } else {
                    Verdict::CautiousFalse
                }
            }
            (_, base) => base,
        };
        answers.push(Answer {
            rendered,
            bindings,
            verdict,
            holds_in,
            fails_in,
        });
    }
    QueryResult {
        mode,
        answers,
        models,
        counts,
    }
}

/// Full pipeline composition: ground, label, simplify, enumerate.
pub fn query_answer(
    program: &Program,
    query: &Query,
    mode: Mode,
    limits: ResourceLimits,
    max_models: usize,
) -> Result<QueryResult, GroundError> {
    let pl = query_pipeline(program, query, limits)?;
    Ok(answer_with_pipeline(&pl, query, mode, max_models))
}

fn render_atom_set(atoms: &BTreeSet<String>) -> String {
    let mut out = String::from("{");
    for (i, atom) in atoms.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(atom);
    }
    out.push('}');
    out
}

/// Renders a query result the way the REPL prints it.
pub fn render_result(result: &QueryResult) -> String {
    if result.answers.is_empty() {
        return "no answers".to_string();
    }
    let mut lines: Vec<String> = result
        .answers
        .iter()
        .map(|a| format!("{}: {}", a.rendered, a.verdict))
        .collect();
    if result.mode == Mode::Models {
        for (i, model) in result.models.iter().enumerate() {
            lines.push(format!("model {}: {}", i + 1, render_atom_set(model)));
        }
    }
    lines.join("\n")
}

/// Outcome of one REPL line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    /// Text to show the user; empty means print nothing.
    pub output: String,
    /// The session asked to terminate.
    pub quit: bool,
}

impl CommandResult {
    fn say(output: impl Into<String>) -> Self {
        CommandResult {
            output: output.into(),
            quit: false,
        }
    }
}

const HELP: &str = "\
commands:
  :load <path>      load a program file, replacing the current program
  :add <clause>     append one clause to the current program
  :mode <m>         set the mode: wfs, brave, cautious, or models
  :max <n>          cap enumerated models per query
  :residual <query> print the query's residual program as XGF
  :models <query>   list stable completions relevant to the query
  :help             show this text
  :quit             leave the session
anything else is read as a query, e.g. `?- win(1).` or `win(X)`";

/// One interactive exploration session.
#[derive(Debug, Default)]
pub struct Session {
    program: Program,
    mode: Mode,
    max_models: usize,
    limits: ResourceLimits,
    last: Option<QueryResult>,
}

impl Session {
    pub fn new() -> Self {
        Session {
            program: Program::default(),
            mode: Mode::default(),
            max_models: 10,
            limits: ResourceLimits::default(),
            last: None,
        }
    }

    pub fn with_settings(mode: Mode, max_models: usize, limits: ResourceLimits) -> Self {
        Session {
            mode,
            max_models: max_models.max(1),
            limits,
            ..Session::new()
        }
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    /// Replaces the loaded program.
    pub fn load_program(&mut self, program: Program) {
        self.program = program;
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn max_models(&self) -> usize {
        self.max_models
    }

    pub fn limits(&self) -> ResourceLimits {
        self.limits
    }

    /// The most recent query result, if any.
    pub fn last_result(&self) -> Option<&QueryResult> {
        self.last.as_ref()
    }

    fn run_query(&mut self, text: &str) -> String {
        let query = match parse_query(text) {
            Ok(q) => q,
            Err(e) => return e.to_string(),
        };
        match query_answer(
            &self.program,
            &query,
            self.mode,
            self.limits,
            self.max_models,
        ) {
            Ok(result) => {
                let rendered = render_result(&result);
                self.last = Some(result);
                rendered
            }
            Err(e) => e.to_string(),
        }
    }

    /// Executes one REPL input line; the session never enters an invalid
    /// state, whatever the line contains.
    pub fn execute(&mut self, line: &str) -> CommandResult {
        let line = line.trim();
        if line.is_empty() {
            return CommandResult::say("");
        }
        let Some(command_line) = line.strip_prefix(':') else {
            return CommandResult::say(self.run_query(line));
        };
        let (command, arg) = match command_line.split_once(char::is_whitespace) {
            Some((c, a)) => (c, a.trim()),
            None => (command_line, ""),
        };
        match command {
            "load" => {
                if arg.is_empty() {
                    return CommandResult::say("usage: :load <path>");
                }
                let Ok(text) = std::fs::read_to_string(arg) else {
                    return CommandResult::say(format!("cannot read {arg}"));
                };
                match parse_program(&text) {
                    Ok(program) => {
                        let n = program.len();
                        self.program = program;
                        CommandResult::say(format!("loaded {arg} ({n} rules)"))
                    }
                    Err(e) => CommandResult::say(e.to_string()),
                }
            }
            "add" => {
                if arg.is_empty() {
                    return CommandResult::say("usage: :add <clause>");
                }
                match parse_program(arg) {
                    Ok(addition) => {
                        let mut count = 0;
                        for (i, rule) in addition.rules().iter().enumerate() {
                            let pos = addition.position(i);
                            self.program
                                .push(rule.clone(), pos)
                                .expect("rules were already checked");
                            count += 1;
                        }
                        if count == 1 {
                            CommandResult::say(format!("added {}", self.program.rules().last().unwrap()))
                        } else {
                            CommandResult::say(format!("added {count} rules"))
                        }
                    }
                    Err(e) => CommandResult::say(e.to_string()),
                }
            }
            "mode" => match arg.parse::<Mode>() {
                Ok(mode) => {
                    self.mode = mode;
                    CommandResult::say(format!("mode: {mode}"))
                }
                Err(e) => CommandResult::say(e),
            },
            "max" => match arg.parse::<usize>() {
                Ok(n) if n >= 1 => {
                    self.max_models = n;
                    CommandResult::say(format!("max models: {n}"))
                }
                _ => CommandResult::say("max models must be a positive integer"),
            },
            "residual" => {
                let query = match parse_query(arg) {
                    Ok(q) => q,
                    Err(e) => return CommandResult::say(e.to_string()),
                };
                match query_pipeline(&self.program, &query, self.limits) {
                    Ok(pl) => {
                        CommandResult::say(emit_xgf(&pl.residual).trim_end().to_string())
                    }
                    Err(e) => CommandResult::say(e.to_string()),
                }
            }
            "models" => {
                let query = match parse_query(arg) {
                    Ok(q) => q,
                    Err(e) => return CommandResult::say(e.to_string()),
                };
                match query_pipeline(&self.program, &query, self.limits) {
                    Ok(pl) => {
                        let presented: Vec<BTreeSet<String>> = if pl.residual.is_empty() {
                            // The well-founded model is total here, so the
                            // single stable completion is its true part.
                            vec![present_model(
                                &pl,
                                &StableModel {
                                    true_atoms: BTreeSet::new(),
                                },
                            )]
                        } else {
                            enumerate_stable(&pl.residual, Some(self.max_models))
                                .iter()
                                .map(|m| present_model(&pl, m))
                                .collect()
                        };
                        if presented.is_empty() {
                            return CommandResult::say("no stable models");
                        }
                        let lines: Vec<String> = presented
                            .iter()
                            .enumerate()
                            .map(|(i, m)| format!("model {}: {}", i + 1, render_atom_set(m)))
                            .collect();
                        CommandResult::say(lines.join("\n"))
                    }
                    Err(e) => CommandResult::say(e.to_string()),
                }
            }
            "help" => CommandResult::say(HELP),
            "quit" => CommandResult {
                output: String::new(),
                quit: true,
            },
            other => CommandResult::say(format!("unknown command: :{other}")),
        }
    }
}
