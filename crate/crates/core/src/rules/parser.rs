//! Parser for the rule language (`.rules` files).
//!
//! Grammar, one rule per statement:
//!
//! ```text
//! Name: Atom ^ Atom ^ ... -> Atom
//! ```
//!
//! Atoms are `Class(?x)`, `property(?x, value)`, or `swrlb:builtin(...)`.
//! Bare predicate and individual names resolve against the default `ccpo:`
//! namespace; prefixed names resolve against the registered prefix table.
//! `#` starts a comment. Unsafe rules are rejected at parse time.

use crate::rules::{check_ruleset, Atom, Builtin, Rule, RuleError};
use crate::term::{Iri, Literal, PrefixMap, Term};
use crate::vocab;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    // Bare or prefixed name; may embed ':' and '.', e.g. `recon:Rule2.iv:`.
    Name(String),
    Variable(String),
    Integer(String),
    Decimal(String),
    Str(String),
    Open,
    Close,
    Comma,
    Caret,
    Arrow,
    Eof,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
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

    fn next_token(&mut self) -> Result<(Token, usize, usize), RuleError> {
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
        let (line, col) = (self.line, self.col);
        let syntax = |line, col, message: String| RuleError::Syntax { line, col, message };
        let token = match self.peek() {
            None => Token::Eof,
            Some('(') => {
                self.bump();
                Token::Open
            }
            Some(')') => {
                self.bump();
                Token::Close
            }
            Some(',') => {
                self.bump();
                Token::Comma
            }
            Some('^') => {
                self.bump();
                Token::Caret
            }
            Some('-') => {
                self.bump();
                if self.peek() == Some('>') {
                    self.bump();
                    Token::Arrow
                } else if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    let num = self.take_while(|c| c.is_ascii_digit());
                    self.lex_number(format!("-{num}"))
                } else {
                    return Err(syntax(line, col, "expected '->' or a number".into()));
                }
            }
            Some('"') => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            _ => return Err(syntax(line, col, "invalid escape".into())),
                        },
                        Some(c) if c != '\n' => s.push(c),
                        _ => return Err(syntax(line, col, "unterminated string".into())),
                    }
                }
                Token::Str(s)
            }
            Some('?') => {
                self.bump();
                let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
                if name.is_empty() {
                    return Err(syntax(line, col, "expected variable name after '?'".into()));
                }
                Token::Variable(name)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.take_while(|c| c.is_ascii_digit());
                self.lex_number(num)
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let name =
                    self.take_while(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | ':' | '.'));
                Token::Name(name)
            }
            Some(other) => {
                return Err(syntax(line, col, format!("unexpected character '{other}'")))
            }
        };
        Ok((token, line, col))
    }

    fn lex_number(&mut self, mut num: String) -> Token {
        if self.peek() == Some('.')
            && self
                .chars
                .get(self.pos + 1)
                .is_some_and(|c| c.is_ascii_digit())
        {
            num.push(self.bump().unwrap());
            num.push_str(&self.take_while(|c| c.is_ascii_digit()));
            Token::Decimal(num)
        } else {
            Token::Integer(num)
        }
    }
}

struct RuleParser {
    lexer: Lexer,
    token: Token,
    line: usize,
    col: usize,
    prefixes: PrefixMap,
    default_ns: String,
}

impl RuleParser {
    fn new(text: &str, prefixes: PrefixMap, default_ns: &str) -> Result<Self, RuleError> {
        let mut lexer = Lexer::new(text);
        let (token, line, col) = lexer.next_token()?;
        Ok(RuleParser {
            lexer,
            token,
            line,
            col,
            prefixes,
            default_ns: default_ns.to_string(),
        })
    }

    fn advance(&mut self) -> Result<(), RuleError> {
        let (token, line, col) = self.lexer.next_token()?;
        self.token = token;
        self.line = line;
        self.col = col;
        Ok(())
    }

    fn syntax(&self, message: impl Into<String>) -> RuleError {
        RuleError::Syntax {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    /// Resolve a name token to an IRI. Bare names take the default
    /// namespace; prefixed names go through the prefix table.
    fn resolve(&self, name: &str) -> Result<Iri, RuleError> {
        match name.split_once(':') {
            None => Ok(Iri::new(format!("{}{name}", self.default_ns))),
            Some((prefix, local)) => {
                if prefix == "rdf" && local == "type" {
                    return Ok(Iri::new(vocab::RDF_TYPE));
                }
                self.prefixes
                    .expand(prefix, local)
                    .ok_or(RuleError::UnknownPrefix {
                        line: self.line,
                        col: self.col,
                        prefix: prefix.to_string(),
                    })
            }
        }
    }

    fn parse_all(&mut self) -> Result<Vec<Rule>, RuleError> {
        let mut rules = Vec::new();
        while self.token != Token::Eof {
            rules.push(self.parse_rule()?);
        }
        check_ruleset(&rules)?;
        Ok(rules)
    }

    fn parse_rule(&mut self) -> Result<Rule, RuleError> {
        let name = match &self.token {
            Token::Name(name) if name.ends_with(':') && name.len() > 1 => {
                name[..name.len() - 1].to_string()
            }
            other => {
                return Err(self.syntax(format!(
                    "expected a rule name ending with ':', found {other:?}"
                )))
            }
        };
        self.advance()?;

        let mut body = vec![self.parse_atom()?];
        while self.token == Token::Caret {
            self.advance()?;
            body.push(self.parse_atom()?);
        }
        if self.token != Token::Arrow {
            return Err(self.syntax("expected '^' or '->'"));
        }
        self.advance()?;
        let head = self.parse_atom()?;
        Ok(Rule { name, body, head })
    }

    fn parse_atom(&mut self) -> Result<Atom, RuleError> {
        let (line, col) = (self.line, self.col);
        let name = match &self.token {
            Token::Name(name) if !name.ends_with(':') => name.clone(),
            other => return Err(self.syntax(format!("expected an atom, found {other:?}"))),
        };
        self.advance()?;
        if self.token != Token::Open {
            return Err(self.syntax("expected '(' after predicate name"));
        }
        self.advance()?;
        let mut args = vec![self.parse_term()?];
        while self.token == Token::Comma {
            self.advance()?;
            args.push(self.parse_term()?);
        }
        if self.token != Token::Close {
            return Err(self.syntax("expected ',' or ')'"));
        }
        self.advance()?;

        if let Some(local) = name.strip_prefix("swrlb:") {
            let builtin = Builtin::lookup(local).ok_or(RuleError::UnknownBuiltin {
                line,
                col,
                name: local.to_string(),
            })?;
            if args.len() != builtin.arity() {
                return Err(RuleError::BuiltinArity {
                    line,
                    col,
                    name: local.to_string(),
                    expected: builtin.arity(),
                    actual: args.len(),
                });
            }
            return Ok(Atom::Builtin { builtin, args });
        }

        let iri = self.resolve(&name)?;
        match args.len() {
            1 => Ok(Atom::Class {
                class: iri,
                arg: args.into_iter().next().unwrap(),
            }),
            2 => {
                let mut it = args.into_iter();
                Ok(Atom::Property {
                    predicate: iri,
                    subject: it.next().unwrap(),
                    object: it.next().unwrap(),
                })
            }
            n => Err(RuleError::Syntax {
                line,
                col,
                message: format!(
                    "atom '{name}' has {n} arguments; class atoms take 1, property atoms take 2"
                ),
            }),
        }
    }

    fn parse_term(&mut self) -> Result<Term, RuleError> {
        let term = match self.token.clone() {
            Token::Variable(v) => Term::Variable(v),
            Token::Integer(text) => Term::Literal(Literal::Integer(
                text.parse()
                    .map_err(|_| self.syntax(format!("integer '{text}' out of range")))?,
            )),
            Token::Decimal(text) => {
                let v: f64 = text
                    .parse()
                    .map_err(|_| self.syntax(format!("invalid decimal '{text}'")))?;
                Term::Literal(Literal::decimal(v))
            }
            Token::Str(s) => Term::Literal(Literal::String(s)),
            Token::Name(name) if !name.contains(':') && name == "true" => {
                Term::Literal(Literal::Boolean(true))
            }
            Token::Name(name) if !name.contains(':') && name == "false" => {
                Term::Literal(Literal::Boolean(false))
            }
            Token::Name(name) => Term::Iri(self.resolve(&name)?),
            other => return Err(self.syntax(format!("expected a term, found {other:?}"))),
        };
        self.advance()?;
        Ok(term)
    }
}

/// Parse a ruleset. Rules come back in file order; unsafe rules and
/// non-terminating value generation are rejected.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>, RuleError> {
    parse_rules_with(text, vocab::standard_prefixes(), vocab::CCPO_NS)
}

/// Parse with an explicit prefix table and default namespace for bare names.
pub fn parse_rules_with(
    text: &str,
    prefixes: PrefixMap,
    default_ns: &str,
) -> Result<Vec<Rule>, RuleError> {
    RuleParser::new(text, prefixes, default_ns)?.parse_all()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::iri;

    const RULE1: &str = "Rule1: Product(?p) ^ referenceServiceLife(?p,?r) ^ actualServiceLife(?p,?a) ^ swrlb:subtract(?diff,?r,?a) ^ swrlb:lessThanOrEqual(?diff,1) -> atEoL(?p,true)";

    #[test]
    fn rule1_parses_with_expected_atom_kinds() {
        let rules = parse_rules(RULE1).unwrap();
        assert_eq!(rules.len(), 1);
        let rule = &rules[0];
        assert_eq!(rule.name, "Rule1");
        let class_atoms = rule.body.iter().filter(|a| matches!(a, Atom::Class { .. })).count();
        let property_atoms = rule
            .body
            .iter()
            .filter(|a| matches!(a, Atom::Property { .. }))
            .count();
        let builtin_atoms = rule.body.iter().filter(|a| a.is_builtin()).count();
        assert_eq!((class_atoms, property_atoms, builtin_atoms), (1, 2, 2));
        match &rule.head {
            Atom::Property {
                predicate, object, ..
            } => {
                assert_eq!(predicate, &iri(vocab::AT_EOL));
                assert_eq!(object, &Term::Literal(Literal::Boolean(true)));
            }
            other => panic!("unexpected head {other:?}"),
        }
    }

    #[test]
    fn unbound_head_variable_is_rejected() {
        let err =
            parse_rules("R: Product(?p) -> suggestedEoLRoute(?q, Reuse)").unwrap_err();
        assert_eq!(
            err,
            RuleError::UnsafeHeadVariable {
                rule: "R".into(),
                variable: "q".into()
            }
        );
    }

    #[test]
    fn unbound_builtin_inputs_are_rejected() {
        let err = parse_rules("R: swrlb:subtract(?d,?r,?a) -> atEoL(?p,true)").unwrap_err();
        assert_eq!(
            err,
            RuleError::UnsafeBuiltinInput {
                rule: "R".into(),
                variable: "r".into()
            }
        );
    }

    #[test]
    fn unknown_builtin_and_arity_mismatch() {
        let err = parse_rules("R: Product(?p) ^ swrlb:pow(?p,2) -> atEoL(?p,true)").unwrap_err();
        assert!(matches!(err, RuleError::UnknownBuiltin { name, .. } if name == "pow"));
        let err =
            parse_rules("R: Product(?p) ^ swrlb:subtract(?d,?r) -> atEoL(?p,true)").unwrap_err();
        assert!(
            matches!(err, RuleError::BuiltinArity { name, expected: 3, actual: 2, .. } if name == "subtract")
        );
    }

    #[test]
    fn names_with_recon_prefix_and_dots_parse() {
        let rules = parse_rules(
            "recon:Rule2.iv: Product(?p) ^ atEoL(?p,true) -> suggestedEoLRoute(?p,WeakReuse_ConsiderRefurbishmentSoon)",
        )
        .unwrap();
        assert_eq!(rules[0].name, "recon:Rule2.iv");
    }

    #[test]
    fn multiple_rules_parse_in_file_order_with_comments() {
        let text = "# at end of life\nRule1: Product(?p) ^ atEoL(?p,true) -> suggestedEoLRoute(?p,StrongReuseSuggestion)\n# strategy exists\nRule3.i: Product(?p) ^ hasEoLStrategy(?p,?s) -> eolStrategyExists(?p,true)\n";
        let rules = parse_rules(text).unwrap();
        assert_eq!(rules.len(), 2);
        assert_eq!(rules[0].name, "Rule1");
        assert_eq!(rules[1].name, "Rule3.i");
    }

    #[test]
    fn bare_individuals_resolve_to_default_namespace() {
        let rules =
            parse_rules("R: Product(?p) ^ hasHealthState(?p,green) -> atEoL(?p,false)").unwrap();
        match &rules[0].body[1] {
            Atom::Property { object, .. } => assert_eq!(object, &Term::iri(vocab::GREEN)),
            other => panic!("unexpected atom {other:?}"),
        }
    }

    #[test]
    fn prefixed_predicates_resolve_through_the_table() {
        let rules = parse_rules("R: prov:Activity(?x) -> ccpo:Product(?x)").unwrap();
        match &rules[0].body[0] {
            Atom::Class { class, .. } => assert_eq!(class, &iri(vocab::ACTIVITY)),
            other => panic!("unexpected atom {other:?}"),
        }
        let err = parse_rules("R: nope:Thing(?x) -> Product(?x)").unwrap_err();
        assert!(matches!(err, RuleError::UnknownPrefix { prefix, .. } if prefix == "nope"));
    }

    #[test]
    fn builtin_in_head_is_rejected() {
        let err = parse_rules("R: Product(?p) ^ referenceServiceLife(?p,?r) -> swrlb:lessThan(?r,1)")
            .unwrap_err();
        assert_eq!(err, RuleError::BuiltinHead { rule: "R".into() });
    }

    #[test]
    fn syntax_errors_carry_location() {
        let err = parse_rules("Rule1 Product(?p) -> atEoL(?p,true)").unwrap_err();
        assert!(matches!(err, RuleError::Syntax { line: 1, .. }));
    }
}
