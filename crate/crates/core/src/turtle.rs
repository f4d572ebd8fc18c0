//! Turtle-subset reader and writer for lifecycle data files (`.ttl`).
//!
//! Supported: `@prefix` directives, subject–predicate–object statements with
//! `;` and `,` continuations, prefixed names, the `a` keyword, typed literals
//! (`"12"^^xsd:integer`, bare numbers, booleans, `xsd:dateTime`), and `#`
//! comments. Not supported by design: blank nodes, collections, and base-IRI
//! resolution.

use thiserror::Error;

use crate::graph::{Graph, Insertion, Origin};
use crate::term::{Datatype, Iri, Literal, PrefixMap, Value};
use crate::vocab;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TurtleError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("unknown prefix '{prefix}' at {line}:{col}")]
    UnknownPrefix {
        line: usize,
        col: usize,
        prefix: String,
    },
    #[error("malformed literal at {line}:{col}: {message}")]
    MalformedLiteral {
        line: usize,
        col: usize,
        message: String,
    },
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] TurtleError),
    #[error("line {line}: {source}")]
    Assert {
        line: usize,
        #[source]
        source: crate::graph::GraphError,
    },
}

/// A parsed triple with the source position of its subject, for error
/// reporting during load.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedTriple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Value,
    pub line: usize,
    pub col: usize,
}

/// Parse result: prefix declarations plus triples in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedDocument {
    pub prefixes: PrefixMap,
    pub triples: Vec<ParsedTriple>,
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Token {
    AtPrefix,
    IriRef(String),
    PName { prefix: String, local: String },
    KeywordA,
    Boolean(bool),
    Integer(String),
    Decimal(String),
    Str(String),
    CaretCaret,
    Dot,
    Semicolon,
    Comma,
    Eof,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone, Copy)]
struct Spanned {
    line: usize,
    col: usize,
}

impl Lexer {
    fn new(text: &str) -> Self {
        Lexer {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn error(&self, message: impl Into<String>) -> TurtleError {
        TurtleError::Syntax {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn next_token(&mut self) -> Result<(Token, Spanned), TurtleError> {
        self.skip_trivia();
        let span = Spanned {
            line: self.line,
            col: self.col,
        };
        let c = match self.peek() {
            Some(c) => c,
            None => return Ok((Token::Eof, span)),
        };
        let token = match c {
            '.' => {
                self.bump();
                Token::Dot
            }
            ';' => {
                self.bump();
                Token::Semicolon
            }
            ',' => {
                self.bump();
                Token::Comma
            }
            '^' => {
                self.bump();
                if self.peek() == Some('^') {
                    self.bump();
                    Token::CaretCaret
                } else {
                    return Err(self.error("expected '^^'"));
                }
            }
            '<' => {
                self.bump();
                let mut iri = String::new();
                loop {
                    match self.bump() {
                        Some('>') => break,
                        Some(ch) if ch != '\n' => iri.push(ch),
                        _ => return Err(self.error("unterminated IRI reference")),
                    }
                }
                Token::IriRef(iri)
            }
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some('n') => s.push('\n'),
                            Some('r') => s.push('\r'),
                            Some('t') => s.push('\t'),
                            _ => return Err(self.error("invalid escape sequence")),
                        },
                        Some(ch) if ch != '\n' => s.push(ch),
                        _ => return Err(self.error("unterminated string literal")),
                    }
                }
                Token::Str(s)
            }
            '@' => {
                self.bump();
                let word = self.take_while(|c| c.is_ascii_alphabetic());
                if word == "prefix" {
                    Token::AtPrefix
                } else {
                    return Err(self.error(format!("unsupported directive '@{word}'")));
                }
            }
            c if c.is_ascii_digit() || c == '+' || c == '-' => {
                let mut num = String::new();
                if c == '+' || c == '-' {
                    num.push(self.bump().unwrap());
                }
                num.push_str(&self.take_while(|c| c.is_ascii_digit()));
                if num.trim_start_matches(['+', '-']).is_empty() {
                    return Err(self.error("expected digits in numeric literal"));
                }
                // A '.' only belongs to the number when followed by a digit;
                // otherwise it terminates the statement.
                if self.peek() == Some('.') && self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) {
                    num.push(self.bump().unwrap());
                    num.push_str(&self.take_while(|c| c.is_ascii_digit()));
                    Token::Decimal(num)
                } else {
                    Token::Integer(num)
                }
            }
            c if is_name_start(c) => {
                let first = self.take_while(is_name_char);
                if self.peek() == Some(':') {
                    self.bump();
                    let local = self.take_while(is_name_char);
                    Token::PName {
                        prefix: first,
                        local,
                    }
                } else {
                    match first.as_str() {
                        "a" => Token::KeywordA,
                        "true" => Token::Boolean(true),
                        "false" => Token::Boolean(false),
                        other => {
                            return Err(TurtleError::Syntax {
                                line: span.line,
                                col: span.col,
                                message: format!("bare name '{other}' is not a prefixed name"),
                            })
                        }
                    }
                }
            }
            other => return Err(self.error(format!("unexpected character '{other}'"))),
        };
        Ok((token, span))
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if pred(c) {
                out.push(c);
                self.bump();
            } else {
                break;
            }
        }
        out
    }
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

// Local names deliberately exclude '.' so a trailing statement dot is never
// swallowed into a name.
fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    lexer: Lexer,
    current: Token,
    span: Spanned,
    prefixes: PrefixMap,
    triples: Vec<ParsedTriple>,
}

impl Parser {
    fn new(text: &str) -> Result<Self, TurtleError> {
        let mut lexer = Lexer::new(text);
        let (current, span) = lexer.next_token()?;
        Ok(Parser {
            lexer,
            current,
            span,
            prefixes: PrefixMap::new(),
            triples: Vec::new(),
        })
    }

    fn advance(&mut self) -> Result<(), TurtleError> {
        let (token, span) = self.lexer.next_token()?;
        self.current = token;
        self.span = span;
        Ok(())
    }

    fn error(&self, message: impl Into<String>) -> TurtleError {
        TurtleError::Syntax {
            line: self.span.line,
            col: self.span.col,
            message: message.into(),
        }
    }

    fn expect_dot(&mut self) -> Result<(), TurtleError> {
        if self.current != Token::Dot {
            return Err(self.error(format!("expected '.', found {}", describe(&self.current))));
        }
        self.advance()
    }

    fn resolve_pname(&self, prefix: &str, local: &str) -> Result<Iri, TurtleError> {
        self.prefixes
            .expand(prefix, local)
            .ok_or_else(|| TurtleError::UnknownPrefix {
                line: self.span.line,
                col: self.span.col,
                prefix: prefix.to_string(),
            })
    }

    fn parse_document(mut self) -> Result<ParsedDocument, TurtleError> {
        loop {
            match &self.current {
                Token::Eof => break,
                Token::AtPrefix => self.parse_prefix_directive()?,
                _ => self.parse_statement()?,
            }
        }
        Ok(ParsedDocument {
            prefixes: self.prefixes,
            triples: self.triples,
        })
    }

    fn parse_prefix_directive(&mut self) -> Result<(), TurtleError> {
        self.advance()?;
        let prefix = match &self.current {
            Token::PName { prefix, local } if local.is_empty() => prefix.clone(),
            other => {
                return Err(self.error(format!(
                    "expected prefix declaration like 'ccpo:', found {}",
                    describe(other)
                )))
            }
        };
        self.advance()?;
        let namespace = match &self.current {
            Token::IriRef(iri) => iri.clone(),
            other => {
                return Err(self.error(format!(
                    "expected namespace IRI, found {}",
                    describe(other)
                )))
            }
        };
        self.advance()?;
        self.expect_dot()?;
        self.prefixes.insert(prefix, namespace);
        Ok(())
    }

    fn parse_iri(&mut self, position: &str) -> Result<Iri, TurtleError> {
        let iri = match &self.current {
            Token::IriRef(iri) => Iri::new(iri.clone()),
            Token::PName { prefix, local } => {
                let (prefix, local) = (prefix.clone(), local.clone());
                self.resolve_pname(&prefix, &local)?
            }
            Token::KeywordA if position == "predicate" => Iri::new(vocab::RDF_TYPE),
            other => {
                return Err(self.error(format!(
                    "expected {position} IRI, found {}",
                    describe(other)
                )))
            }
        };
        self.advance()?;
        Ok(iri)
    }

    fn parse_object(&mut self) -> Result<Value, TurtleError> {
        let span = self.span;
        let value = match self.current.clone() {
            Token::IriRef(_) | Token::PName { .. } => Value::Iri(self.parse_iri("object")?),
            Token::Boolean(b) => {
                self.advance()?;
                Value::Literal(Literal::Boolean(b))
            }
            Token::Integer(text) => {
                self.advance()?;
                let v = text.parse::<i64>().map_err(|_| TurtleError::MalformedLiteral {
                    line: span.line,
                    col: span.col,
                    message: format!("integer '{text}' out of range"),
                })?;
                Value::Literal(Literal::Integer(v))
            }
            Token::Decimal(text) => {
                self.advance()?;
                let v = parse_decimal(&text, span)?;
                Value::Literal(Literal::decimal(v))
            }
            Token::Str(s) => {
                self.advance()?;
                if self.current == Token::CaretCaret {
                    self.advance()?;
                    let datatype_iri = self.parse_iri("datatype")?;
                    Value::Literal(typed_literal(&s, &datatype_iri, span)?)
                } else {
                    Value::Literal(Literal::String(s))
                }
            }
            other => {
                return Err(self.error(format!("expected object, found {}", describe(&other))))
            }
        };
        Ok(value)
    }

    fn parse_statement(&mut self) -> Result<(), TurtleError> {
        let span = self.span;
        let subject = self.parse_iri("subject")?;
        loop {
            let predicate = self.parse_iri("predicate")?;
            loop {
                let object = self.parse_object()?;
                self.triples.push(ParsedTriple {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                    line: span.line,
                    col: span.col,
                });
                if self.current == Token::Comma {
                    self.advance()?;
                } else {
                    break;
                }
            }
            if self.current == Token::Semicolon {
                self.advance()?;
                // A dangling ';' before '.' is permitted, as in full Turtle.
                if self.current == Token::Dot {
                    break;
                }
            } else {
                break;
            }
        }
        self.expect_dot()
    }
}

fn parse_decimal(text: &str, span: Spanned) -> Result<f64, TurtleError> {
    let v: f64 = text.parse().map_err(|_| TurtleError::MalformedLiteral {
        line: span.line,
        col: span.col,
        message: format!("invalid decimal '{text}'"),
    })?;
    if !v.is_finite() {
        return Err(TurtleError::MalformedLiteral {
            line: span.line,
            col: span.col,
            message: format!("non-finite decimal '{text}'"),
        });
    }
    Ok(v)
}

fn typed_literal(lexical: &str, datatype: &Iri, span: Spanned) -> Result<Literal, TurtleError> {
    let malformed = |message: String| TurtleError::MalformedLiteral {
        line: span.line,
        col: span.col,
        message,
    };
    let tag = match datatype.as_str() {
        d if d == Datatype::String.xsd_iri() => Datatype::String,
        d if d == Datatype::Integer.xsd_iri() => Datatype::Integer,
        d if d == Datatype::Decimal.xsd_iri() => Datatype::Decimal,
        d if d == Datatype::Boolean.xsd_iri() => Datatype::Boolean,
        d if d == Datatype::Timestamp.xsd_iri() => Datatype::Timestamp,
        "http://www.w3.org/2001/XMLSchema#date" => Datatype::Timestamp,
        other => return Err(malformed(format!("unsupported datatype <{other}>"))),
    };
    match tag {
        Datatype::String => Ok(Literal::String(lexical.to_string())),
        Datatype::Integer => lexical
            .parse::<i64>()
            .map(Literal::Integer)
            .map_err(|_| malformed(format!("'{lexical}' is not a valid integer"))),
        Datatype::Decimal => parse_decimal(lexical, span).map(Literal::decimal),
        Datatype::Boolean => match lexical {
            "true" => Ok(Literal::Boolean(true)),
            "false" => Ok(Literal::Boolean(false)),
            _ => Err(malformed(format!("'{lexical}' is not a valid boolean"))),
        },
        Datatype::Timestamp => Literal::parse_timestamp(lexical)
            .map(Literal::Timestamp)
            .ok_or_else(|| malformed(format!("'{lexical}' is not a valid timestamp"))),
    }
}

fn describe(token: &Token) -> String {
    match token {
        Token::AtPrefix => "'@prefix'".into(),
        Token::IriRef(iri) => format!("<{iri}>"),
        Token::PName { prefix, local } => format!("'{prefix}:{local}'"),
        Token::KeywordA => "'a'".into(),
        Token::Boolean(b) => format!("'{b}'"),
        Token::Integer(s) | Token::Decimal(s) => format!("'{s}'"),
        Token::Str(s) => format!("\"{s}\""),
        Token::CaretCaret => "'^^'".into(),
        Token::Dot => "'.'".into(),
        Token::Semicolon => "';'".into(),
        Token::Comma => "','".into(),
        Token::Eof => "end of input".into(),
    }
}

/// Parse turtle-subset text into prefix declarations and triples in file
/// order. Parsing is deterministic: identical input yields identical output.
pub fn parse(text: &str) -> Result<ParsedDocument, TurtleError> {
    Parser::new(text)?.parse_document()
}

/// Parse `text` and assert every triple into `graph`. Declared prefixes are
/// registered on the graph. Returns the number of facts actually added.
pub fn load_str(graph: &mut Graph, text: &str) -> Result<usize, LoadError> {
    let doc = parse(text)?;
    for (prefix, namespace) in doc.prefixes.iter() {
        graph.register_prefix(prefix, namespace);
    }
    let mut added = 0;
    for triple in doc.triples {
        let outcome = graph
            .assert(triple.subject, triple.predicate, triple.object, Origin::Asserted)
            .map_err(|source| LoadError::Assert {
                line: triple.line,
                source,
            })?;
        if outcome == Insertion::Added {
            added += 1;
        }
    }
    Ok(added)
}

/// Serialize the graph back to turtle-subset text, grouped by subject with
/// `;` and `,` continuations. Re-parsing yields the same fact set.
pub fn export(graph: &Graph) -> String {
    let prefixes = graph.prefixes();
    let mut out = String::new();
    for (prefix, namespace) in prefixes.iter() {
        out.push_str(&format!("@prefix {prefix}: <{namespace}> .\n"));
    }

    let mut facts: Vec<_> = graph.facts().to_vec();
    facts.sort_by_key(|f| {
        (
            f.subject.clone(),
            f.predicate.clone(),
            f.object.clone(),
        )
    });

    let mut i = 0;
    while i < facts.len() {
        let subject = facts[i].subject.clone();
        out.push('\n');
        out.push_str(&prefixes.display(&subject));
        let mut first_predicate = true;
        while i < facts.len() && facts[i].subject == subject {
            let predicate = facts[i].predicate.clone();
            if first_predicate {
                out.push(' ');
                first_predicate = false;
            } else {
                out.push_str(" ;\n    ");
            }
            if predicate.as_str() == vocab::RDF_TYPE {
                out.push('a');
            } else {
                out.push_str(&prefixes.display(&predicate));
            }
            let mut first_object = true;
            while i < facts.len() && facts[i].subject == subject && facts[i].predicate == predicate
            {
                if first_object {
                    out.push(' ');
                    first_object = false;
                } else {
                    out.push_str(", ");
                }
                out.push_str(&render_object(&facts[i].object, prefixes));
                i += 1;
            }
        }
        out.push_str(" .\n");
    }
    out
}

fn render_object(value: &Value, prefixes: &PrefixMap) -> String {
    match value {
        Value::Iri(_) => value.display(prefixes),
        Value::Literal(Literal::Timestamp(_)) => {
            let lit = value.as_literal().unwrap();
            format!("\"{}\"^^xsd:dateTime", lit.lexical())
        }
        Value::Literal(_) => value.display(prefixes),
    }
}
