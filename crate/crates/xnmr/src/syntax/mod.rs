//! Abstract syntax for normal logic programs and queries.
//!
//! A program is a list of rules `head :- body.` where the body mixes
//! positive literals and negation-as-failure literals (`not atom`).
//! Terms are constants, signed 64-bit integers, or variables; there are
//! no function symbols, so every safe program has a finite grounding.
//!
//! Every rule must be *safe* (range-restricted): each variable occurring
//! anywhere in the rule must occur in at least one positive body literal.
//! Queries obey the analogous condition for their negative literals.

mod parse;

pub use parse::{parse_program, parse_query, ParseError};

use std::fmt;

/// A term: constant symbol, integer, or variable.
///
/// Constant names match `[a-z][A-Za-z0-9_]*`, variable names match
/// `[A-Z_][A-Za-z0-9_]*`. The parser enforces both shapes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Constant(String),
    Integer(i64),
    Variable(String),
}

impl Term {
    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }

    /// The variable name, if this term is a variable.
    pub fn variable_name(&self) -> Option<&str> {
        match self {
            Term::Variable(name) => Some(name),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Constant(name) => f.write_str(name),
            Term::Integer(value) => write!(f, "{value}"),
            Term::Variable(name) => f.write_str(name),
        }
    }
}

/// A predicate applied to zero or more terms.
///
/// Predicate identity is the pair (name, arity); `p/1` and `p/2` are
/// unrelated predicates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// Predicate identity: (name, arity).
    pub fn predicate_key(&self) -> (&str, usize) {
        (&self.predicate, self.args.len())
    }

    pub fn is_ground(&self) -> bool {
        !self.args.iter().any(Term::is_variable)
    }
}

impl fmt::Display for Atom {
    /// Canonical form: `pred` or `pred(t1,t2)`, no whitespace.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if let Some((first, rest)) = self.args.split_first() {
            write!(f, "({first}")?;
            for arg in rest {
                write!(f, ",{arg}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// An atom or its negation-as-failure.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl Literal {
    pub fn positive(atom: Atom) -> Self {
        Literal {
            atom,
            negated: false,
        }
    }

    pub fn negative(atom: Atom) -> Self {
        Literal {
            atom,
            negated: true,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        self.atom.fmt(f)
    }
}

/// A rule `head :- body.`; a fact is a rule with an empty body.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Literal>,
}

impl Rule {
    pub fn fact(head: Atom) -> Self {
        Rule { head, body: vec![] }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    /// First variable violating safety, in occurrence order
    /// (head first, then body left to right).
    ///
    /// A rule is safe when every variable occurring anywhere in it also
    /// occurs in at least one positive body literal.
    pub fn unsafe_variable(&self) -> Option<&str> {
        let positive_vars: Vec<&str> = self
            .body
            .iter()
            .filter(|lit| !lit.negated)
            .flat_map(|lit| lit.atom.args.iter())
            .filter_map(Term::variable_name)
            .collect();
        let occurs_positive = |name: &str| positive_vars.contains(&name);

        self.head
            .args
            .iter()
            .chain(self.body.iter().flat_map(|lit| lit.atom.args.iter()))
            .filter_map(Term::variable_name)
            .find(|name| !occurs_positive(name))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.head.fmt(f)?;
        if let Some((first, rest)) = self.body.split_first() {
            write!(f, " :- {first}")?;
            for lit in rest {
                write!(f, ", {lit}")?;
            }
        }
        f.write_str(".")
    }
}

/// Line/column of a rule's first token, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourcePos {
    pub line: usize,
    pub column: usize,
}

/// A parsed, safety-checked program. Rule order is preserved.
#[derive(Debug, Clone, Default)]
pub struct Program {
    rules: Vec<Rule>,
    positions: Vec<SourcePos>,
}

impl Program {
    /// Builds a program, rejecting the first unsafe rule.
    pub fn new(rules: Vec<Rule>) -> Result<Self, ParseError> {
        let mut program = Program::default();
        for rule in rules {
            program.push(rule, SourcePos { line: 1, column: 1 })?;
        }
        Ok(program)
    }

    /// Appends one rule, enforcing safety.
    pub fn push(&mut self, rule: Rule, pos: SourcePos) -> Result<(), ParseError> {
        if let Some(var) = rule.unsafe_variable() {
            return Err(ParseError::Safety {
                rule_index: self.rules.len(),
                variable: var.to_string(),
            });
        }
        self.rules.push(rule);
        self.positions.push(pos);
        Ok(())
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn position(&self, rule_index: usize) -> SourcePos {
        self.positions[rule_index]
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}

/// A conjunctive query, possibly with variables.
///
/// Query safety: every variable of a negative literal must also occur in
/// a positive literal of the query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    literals: Vec<Literal>,
}

impl Query {
    pub fn new(literals: Vec<Literal>) -> Result<Self, ParseError> {
        let positive_vars: Vec<&str> = literals
            .iter()
            .filter(|lit| !lit.negated)
            .flat_map(|lit| lit.atom.args.iter())
            .filter_map(Term::variable_name)
            .collect();
        let offending = literals
            .iter()
            .filter(|lit| lit.negated)
            .flat_map(|lit| lit.atom.args.iter())
            .filter_map(Term::variable_name)
            .find(|name| !positive_vars.contains(name));
        if let Some(var) = offending {
            return Err(ParseError::Safety {
                rule_index: 0,
                variable: var.to_string(),
            });
        }
        Ok(Query { literals })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    /// Query variables in first-occurrence order.
    pub fn variables(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for lit in &self.literals {
            for term in &lit.atom.args {
                if let Term::Variable(name) = term {
                    if !seen.contains(&name.as_str()) {
                        seen.push(name);
                    }
                }
            }
        }
        seen
    }

    pub fn is_ground(&self) -> bool {
        self.literals.iter().all(|lit| lit.atom.is_ground())
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for lit in &self.literals {
            if !first {
                f.write_str(", ")?;
            }
            lit.fmt(f)?;
            first = false;
        }
        Ok(())
    }
}
