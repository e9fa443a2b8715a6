//! Hand-rolled lexer and recursive-descent parser for the `.lp` syntax.
//!
//! Clauses are `head.` or `head :- lit, ..., lit.`; `not atom` is
//! negation as failure; `%` starts a comment running to end of line.

use std::fmt;

use super::{Atom, Literal, Program, Query, Rule, SourcePos, Term};

/// Parse or safety failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    /// Malformed input, with a 1-based position inside the source text.
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    /// A rule (or query, reported as index 0) with a variable that has
    /// no positive body occurrence.
    #[error("unsafe rule {rule_index}: variable {variable} has no positive occurrence")]
    Safety { rule_index: usize, variable: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    /// Lowercase-initial or `__`-initial identifier.
    Symbol(String),
    /// Uppercase- or `_`-initial identifier (but not `__`-initial).
    Variable(String),
    Integer(i64),
    LParen,
    RParen,
    Comma,
    Dot,
    Arrow,
    QueryArrow,
    Eof,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Symbol(s) => write!(f, "`{s}`"),
            Token::Variable(s) => write!(f, "`{s}`"),
            Token::Integer(n) => write!(f, "`{n}`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::Comma => f.write_str("`,`"),
            Token::Dot => f.write_str("`.`"),
            Token::Arrow => f.write_str("`:-`"),
            Token::QueryArrow => f.write_str("`?-`"),
            Token::Eof => f.write_str("end of input"),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '%' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    /// Next token plus the position of its first character.
    fn next_token(&mut self) -> Result<(Token, SourcePos), ParseError> {
        self.skip_trivia();
        let pos = SourcePos {
            line: self.line,
            column: self.column,
        };
        let Some(&c) = self.chars.peek() else {
            return Ok((Token::Eof, pos));
        };
        let token = match c {
            '(' => {
                self.bump();
                Token::LParen
            }
            ')' => {
                self.bump();
                Token::RParen
            }
            ',' => {
                self.bump();
                Token::Comma
            }
            '.' => {
                self.bump();
                Token::Dot
            }
            ':' => {
                self.bump();
                match self.chars.peek() {
                    Some('-') => {
                        self.bump();
                        Token::Arrow
                    }
                    _ => return Err(self.error("expected `-` after `:`")),
                }
            }
            '?' => {
                self.bump();
                match self.chars.peek() {
                    Some('-') => {
                        self.bump();
                        Token::QueryArrow
                    }
                    _ => return Err(self.error("expected `-` after `?`")),
                }
            }
            '-' => {
                self.bump();
                match self.chars.peek() {
                    Some(d) if d.is_ascii_digit() => self.lex_integer(pos, true)?,
                    _ => return Err(self.error("expected digits after `-`")),
                }
            }
            c if c.is_ascii_digit() => self.lex_integer(pos, false)?,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if name.starts_with(|c: char| c.is_ascii_uppercase()) {
                    Token::Variable(name)
                } else if let Some(rest) = name.strip_prefix('_') {
                    // `__foo` is a (reserved) predicate symbol so that the
                    // grounder can report the namespace clash; a single
                    // leading underscore names a variable.
                    if rest.starts_with('_') {
                        Token::Symbol(name)
                    } else {
                        Token::Variable(name)
                    }
                } else {
                    Token::Symbol(name)
                }
            }
            _ => {
                return Err(ParseError::Syntax {
                    line: pos.line,
                    column: pos.column,
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        Ok((token, pos))
    }

    fn lex_integer(&mut self, pos: SourcePos, negative: bool) -> Result<Token, ParseError> {
        let mut digits = String::new();
        if negative {
            digits.push('-');
        }
        while let Some(&c) = self.chars.peek() {
            if c.is_ascii_digit() {
                digits.push(c);
                self.bump();
            } else {
                break;
            }
        }
        digits.parse::<i64>().map(Token::Integer).map_err(|_| {
            ParseError::Syntax {
                line: pos.line,
                column: pos.column,
                message: format!("integer `{digits}` out of 64-bit range"),
            }
        })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    token: Token,
    pos: SourcePos,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(text);
        let (token, pos) = lexer.next_token()?;
        Ok(Parser { lexer, token, pos })
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        let (token, pos) = self.lexer.next_token()?;
        self.token = token;
        self.pos = pos;
        Ok(())
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.pos.line,
            column: self.pos.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, expected: &Token, what: &str) -> Result<(), ParseError> {
        if &self.token == expected {
            self.advance()
        } else {
            Err(self.error_here(format!("expected {what}, found {}", self.token)))
        }
    }

    fn parse_term(&mut self) -> Result<Term, ParseError> {
        let term = match &self.token {
            Token::Symbol(name) => Term::Constant(name.clone()),
            Token::Variable(name) => Term::Variable(name.clone()),
            Token::Integer(value) => Term::Integer(*value),
            other => return Err(self.error_here(format!("expected term, found {other}"))),
        };
        self.advance()?;
        Ok(term)
    }

    fn parse_atom(&mut self) -> Result<Atom, ParseError> {
        let predicate = match &self.token {
            Token::Symbol(name) if name == "not" => {
                return Err(self.error_here("`not` must be followed by an atom"))
            }
            Token::Symbol(name) => name.clone(),
            other => return Err(self.error_here(format!("expected predicate, found {other}"))),
        };
        self.advance()?;
        let mut args = Vec::new();
        if self.token == Token::LParen {
            self.advance()?;
            args.push(self.parse_term()?);
            while self.token == Token::Comma {
                self.advance()?;
                args.push(self.parse_term()?);
            }
            self.expect(&Token::RParen, "`)`")?;
        }
        Ok(Atom::new(predicate, args))
    }

    fn parse_literal(&mut self) -> Result<Literal, ParseError> {
        if matches!(&self.token, Token::Symbol(name) if name == "not") {
            self.advance()?;
            Ok(Literal::negative(self.parse_atom()?))
        } else {
            Ok(Literal::positive(self.parse_atom()?))
        }
    }

    fn parse_body(&mut self) -> Result<Vec<Literal>, ParseError> {
        let mut body = vec![self.parse_literal()?];
        while self.token == Token::Comma {
            self.advance()?;
            body.push(self.parse_literal()?);
        }
        Ok(body)
    }

    fn parse_clause(&mut self) -> Result<(Rule, SourcePos), ParseError> {
        let pos = self.pos;
        let head = self.parse_atom()?;
        let body = if self.token == Token::Arrow {
            self.advance()?;
            self.parse_body()?
        } else {
            vec![]
        };
        self.expect(&Token::Dot, "`.`")?;
        Ok((Rule { head, body }, pos))
    }
}

/// Parses a full program source, checking every rule for safety.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut parser = Parser::new(text)?;
    let mut program = Program::default();
    while parser.token != Token::Eof {
        let (rule, pos) = parser.parse_clause()?;
        program.push(rule, pos)?;
    }
    Ok(program)
}

/// Parses a query: `lit, ..., lit`, optionally wrapped as `?- ... .`,
/// with an optional trailing `.` in the bare form.
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let mut parser = Parser::new(text)?;
    let wrapped = parser.token == Token::QueryArrow;
    if wrapped {
        parser.advance()?;
    }
    if parser.token == Token::Eof {
        return Err(parser.error_here("empty query"));
    }
    let literals = parser.parse_body()?;
    if wrapped {
        parser.expect(&Token::Dot, "`.`")?;
    } else if parser.token == Token::Dot {
        parser.advance()?;
    }
    if parser.token != Token::Eof {
        return Err(parser.error_here(format!("unexpected {} after query", parser.token)));
    }
    Query::new(literals)
}
