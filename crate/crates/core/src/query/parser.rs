//! Parser for the SPARQL subset: `PREFIX` declarations and
//! `SELECT [DISTINCT] ... WHERE { ... }` with triple patterns, `OPTIONAL`
//! blocks (nesting at most 2 deep), `FILTER` expressions, one level of
//! sub-select, `GROUP BY`, `COUNT`, `ORDER BY`, `LIMIT`, and `OFFSET`.

use thiserror::Error;

use crate::graph::TriplePattern;
use crate::query::ast::*;
use crate::term::{Iri, Literal, PrefixMap, Term, Value};
use crate::vocab;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryParseError {
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
    #[error("projected variable ?{variable} does not appear in the where-clause")]
    ProjectionOfUnusedVariable { variable: String },
    #[error("variable ?{variable} must appear in GROUP BY to be projected alongside aggregates")]
    UngroupedVariable { variable: String },
    #[error("OPTIONAL blocks nest at most {max} deep")]
    OptionalTooDeep { max: usize },
    #[error("sub-selects nest at most {max} deep")]
    SubSelectTooDeep { max: usize },
}

const MAX_OPTIONAL_DEPTH: usize = 2;
const MAX_SUBSELECT_DEPTH: usize = 1;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Word(String),
    Variable(String),
    PName { prefix: String, local: String },
    IriRef(String),
    Integer(String),
    Decimal(String),
    Str(String),
    OpenBrace,
    CloseBrace,
    OpenParen,
    CloseParen,
    Dot,
    Star,
    Bang,
    AndAnd,
    OrOr,
    Cmp(CompareOp),
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

    fn next_token(&mut self) -> Result<(Token, usize, usize), QueryParseError> {
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
        let err = |message: String| QueryParseError::Syntax {
            line,
            col,
            message,
        };
        let token = match self.peek() {
            None => Token::Eof,
            Some('{') => {
                self.bump();
                Token::OpenBrace
            }
            Some('}') => {
                self.bump();
                Token::CloseBrace
            }
            Some('(') => {
                self.bump();
                Token::OpenParen
            }
            Some(')') => {
                self.bump();
                Token::CloseParen
            }
            Some('.') => {
                self.bump();
                Token::Dot
            }
            Some('*') => {
                self.bump();
                Token::Star
            }
            Some('=') => {
                self.bump();
                Token::Cmp(CompareOp::Eq)
            }
            Some('!') => {
                self.bump();
                if self.peek() == Some('=') {
                    self.bump();
                    Token::Cmp(CompareOp::Ne)
                } else {
                    Token::Bang
                }
            }
            Some('<') => {
                // '<' begins an IRI reference only when followed by a letter
                // (e.g. <http://...>); otherwise it is a comparison operator.
                if self.peek_at(1).is_some_and(|c| c.is_ascii_alphabetic()) {
                    self.bump();
                    let iri = self.take_while(|c| c != '>' && c != '\n');
                    if self.peek() != Some('>') {
                        return Err(err("unterminated IRI reference".into()));
                    }
                    self.bump();
                    Token::IriRef(iri)
                } else {
                    self.bump();
                    if self.peek() == Some('=') {
                        self.bump();
                        Token::Cmp(CompareOp::Le)
                    } else {
                        Token::Cmp(CompareOp::Lt)
                    }
                }
            }
            Some('>') => {
                self.bump();
                if self.peek() == Some('=') {
                    self.bump();
                    Token::Cmp(CompareOp::Ge)
                } else {
                    Token::Cmp(CompareOp::Gt)
                }
            }
            Some('&') => {
                self.bump();
                if self.peek() == Some('&') {
                    self.bump();
                    Token::AndAnd
                } else {
                    return Err(err("expected '&&'".into()));
                }
            }
            Some('|') => {
                self.bump();
                if self.peek() == Some('|') {
                    self.bump();
                    Token::OrOr
                } else {
                    return Err(err("expected '||'".into()));
                }
            }
            Some('?') => {
                self.bump();
                let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
                if name.is_empty() {
                    return Err(err("expected variable name after '?'".into()));
                }
                Token::Variable(name)
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
                            _ => return Err(err("invalid escape".into())),
                        },
                        Some(c) if c != '\n' => s.push(c),
                        _ => return Err(err("unterminated string".into())),
                    }
                }
                Token::Str(s)
            }
            Some(c) if c.is_ascii_digit() || c == '-' || c == '+' => {
                let mut num = String::new();
                if c == '-' || c == '+' {
                    num.push(self.bump().unwrap());
                }
                num.push_str(&self.take_while(|c| c.is_ascii_digit()));
                if num.trim_start_matches(['+', '-']).is_empty() {
                    return Err(err("expected digits".into()));
                }
                if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit())
                {
                    num.push(self.bump().unwrap());
                    num.push_str(&self.take_while(|c| c.is_ascii_digit()));
                    Token::Decimal(num)
                } else {
                    Token::Integer(num)
                }
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let word = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
                if self.peek() == Some(':') {
                    self.bump();
                    let local =
                        self.take_while(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
                    Token::PName {
                        prefix: word,
                        local,
                    }
                } else {
                    Token::Word(word)
                }
            }
            Some(other) => return Err(err(format!("unexpected character '{other}'"))),
        };
        Ok((token, line, col))
    }
}

struct Parser {
    lexer: Lexer,
    token: Token,
    line: usize,
    col: usize,
    prefixes: PrefixMap,
}

impl Parser {
    fn new(text: &str) -> Result<Self, QueryParseError> {
        let mut lexer = Lexer::new(text);
        let (token, line, col) = lexer.next_token()?;
        Ok(Parser {
            lexer,
            token,
            line,
            col,
            prefixes: PrefixMap::new(),
        })
    }

    fn advance(&mut self) -> Result<(), QueryParseError> {
        let (token, line, col) = self.lexer.next_token()?;
        self.token = token;
        self.line = line;
        self.col = col;
        Ok(())
    }

    fn syntax(&self, message: impl Into<String>) -> QueryParseError {
        QueryParseError::Syntax {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn keyword(&self) -> Option<String> {
        match &self.token {
            Token::Word(w) => Some(w.to_ascii_uppercase()),
            _ => None,
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> Result<bool, QueryParseError> {
        if self.keyword().as_deref() == Some(kw) {
            self.advance()?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), QueryParseError> {
        if !self.eat_keyword(kw)? {
            return Err(self.syntax(format!("expected '{kw}'")));
        }
        Ok(())
    }

    fn expect(&mut self, token: Token, what: &str) -> Result<(), QueryParseError> {
        if self.token != token {
            return Err(self.syntax(format!("expected {what}")));
        }
        self.advance()
    }

    fn resolve(&self, prefix: &str, local: &str) -> Result<Iri, QueryParseError> {
        self.prefixes
            .expand(prefix, local)
            .ok_or(QueryParseError::UnknownPrefix {
                line: self.line,
                col: self.col,
                prefix: prefix.to_string(),
            })
    }

    fn parse_query(&mut self) -> Result<SelectQuery, QueryParseError> {
        while self.eat_keyword("PREFIX")? {
            let prefix = match &self.token {
                Token::PName { prefix, local } if local.is_empty() => prefix.clone(),
                _ => return Err(self.syntax("expected prefix label like 'ccpo:'")),
            };
            self.advance()?;
            let namespace = match &self.token {
                Token::IriRef(iri) => iri.clone(),
                _ => return Err(self.syntax("expected namespace IRI")),
            };
            self.advance()?;
            self.prefixes.insert(prefix, namespace);
        }
        let query = self.parse_select(0)?;
        if self.token != Token::Eof {
            return Err(self.syntax("unexpected trailing input"));
        }
        validate(&query)?;
        Ok(query)
    }

    fn parse_select(&mut self, subselect_depth: usize) -> Result<SelectQuery, QueryParseError> {
        self.expect_keyword("SELECT")?;
        let distinct = self.eat_keyword("DISTINCT")?;
        let selection = self.parse_selection()?;
        // WHERE is optional in SPARQL; the braces are not.
        let _ = self.eat_keyword("WHERE")?;
        let where_clause = self.parse_group(0, subselect_depth)?;

        let mut group_by = Vec::new();
        if self.keyword().as_deref() == Some("GROUP") {
            self.advance()?;
            self.expect_keyword("BY")?;
            while let Token::Variable(v) = &self.token {
                group_by.push(v.clone());
                self.advance()?;
            }
            if group_by.is_empty() {
                return Err(self.syntax("GROUP BY needs at least one variable"));
            }
        }

        let mut order_by = Vec::new();
        if self.keyword().as_deref() == Some("ORDER") {
            self.advance()?;
            self.expect_keyword("BY")?;
            loop {
                match self.keyword().as_deref() {
                    Some("ASC") | Some("DESC") => {
                        let descending = self.keyword().as_deref() == Some("DESC");
                        self.advance()?;
                        self.expect(Token::OpenParen, "'('")?;
                        let variable = match &self.token {
                            Token::Variable(v) => v.clone(),
                            _ => return Err(self.syntax("expected variable in ORDER BY")),
                        };
                        self.advance()?;
                        self.expect(Token::CloseParen, "')'")?;
                        order_by.push(OrderKey {
                            variable,
                            descending,
                        });
                    }
                    _ => match &self.token {
                        Token::Variable(v) => {
                            order_by.push(OrderKey {
                                variable: v.clone(),
                                descending: false,
                            });
                            self.advance()?;
                        }
                        _ => break,
                    },
                }
            }
            if order_by.is_empty() {
                return Err(self.syntax("ORDER BY needs at least one key"));
            }
        }

        let mut limit = None;
        let mut offset = None;
        loop {
            if self.keyword().as_deref() == Some("LIMIT") {
                self.advance()?;
                limit = Some(self.parse_usize()?);
            } else if self.keyword().as_deref() == Some("OFFSET") {
                self.advance()?;
                offset = Some(self.parse_usize()?);
            } else {
                break;
            }
        }

        Ok(SelectQuery {
            distinct,
            selection,
            where_clause,
            group_by,
            order_by,
            limit,
            offset,
        })
    }

    fn parse_usize(&mut self) -> Result<usize, QueryParseError> {
        match &self.token {
            Token::Integer(text) => {
                let n = text
                    .parse::<usize>()
                    .map_err(|_| self.syntax("expected a non-negative integer"))?;
                self.advance()?;
                Ok(n)
            }
            _ => Err(self.syntax("expected an integer")),
        }
    }

    fn parse_selection(&mut self) -> Result<Selection, QueryParseError> {
        if self.token == Token::Star {
            self.advance()?;
            return Ok(Selection::Star);
        }
        let mut items = Vec::new();
        loop {
            match &self.token {
                Token::Variable(v) => {
                    items.push(SelectItem::Variable(v.clone()));
                    self.advance()?;
                }
                Token::OpenParen => {
                    self.advance()?;
                    self.expect_keyword("COUNT")?;
                    self.expect(Token::OpenParen, "'('")?;
                    let variable = match &self.token {
                        Token::Variable(v) => v.clone(),
                        _ => return Err(self.syntax("expected variable in COUNT")),
                    };
                    self.advance()?;
                    self.expect(Token::CloseParen, "')'")?;
                    self.expect_keyword("AS")?;
                    let alias = match &self.token {
                        Token::Variable(v) => v.clone(),
                        _ => return Err(self.syntax("expected alias variable after AS")),
                    };
                    self.advance()?;
                    self.expect(Token::CloseParen, "')'")?;
                    items.push(SelectItem::Count { variable, alias });
                }
                _ => break,
            }
        }
        if items.is_empty() {
            return Err(self.syntax("expected '*' or at least one projection"));
        }
        Ok(Selection::Items(items))
    }

    fn parse_group(
        &mut self,
        optional_depth: usize,
        subselect_depth: usize,
    ) -> Result<Vec<Element>, QueryParseError> {
        self.expect(Token::OpenBrace, "'{'")?;
        let mut elements = Vec::new();
        loop {
            match &self.token {
                Token::CloseBrace => {
                    self.advance()?;
                    break;
                }
                Token::OpenBrace => {
                    // A nested group here is a sub-select.
                    if subselect_depth + 1 > MAX_SUBSELECT_DEPTH {
                        return Err(QueryParseError::SubSelectTooDeep {
                            max: MAX_SUBSELECT_DEPTH,
                        });
                    }
                    self.advance()?;
                    let inner = self.parse_select(subselect_depth + 1)?;
                    self.expect(Token::CloseBrace, "'}' closing the sub-select")?;
                    elements.push(Element::SubSelect(Box::new(inner)));
                }
                Token::Word(w) if w.eq_ignore_ascii_case("OPTIONAL") => {
                    if optional_depth + 1 > MAX_OPTIONAL_DEPTH {
                        return Err(QueryParseError::OptionalTooDeep {
                            max: MAX_OPTIONAL_DEPTH,
                        });
                    }
                    self.advance()?;
                    let inner = self.parse_group(optional_depth + 1, subselect_depth)?;
                    elements.push(Element::Optional(inner));
                }
                Token::Word(w) if w.eq_ignore_ascii_case("FILTER") => {
                    self.advance()?;
                    self.expect(Token::OpenParen, "'(' after FILTER")?;
                    let expr = self.parse_or_expr()?;
                    self.expect(Token::CloseParen, "')' closing the FILTER")?;
                    elements.push(Element::Filter(expr));
                }
                _ => {
                    let pattern = self.parse_triple_pattern()?;
                    elements.push(Element::Pattern(pattern));
                    if self.token == Token::Dot {
                        self.advance()?;
                    }
                }
            }
        }
        Ok(elements)
    }

    fn parse_triple_pattern(&mut self) -> Result<TriplePattern, QueryParseError> {
        let subject = self.parse_term("subject")?;
        let predicate = self.parse_term("predicate")?;
        let object = self.parse_term("object")?;
        Ok(TriplePattern::new(subject, predicate, object))
    }

    fn parse_term(&mut self, position: &str) -> Result<Term, QueryParseError> {
        let term = match self.token.clone() {
            Token::Variable(v) => Term::Variable(v),
            Token::PName { prefix, local } => Term::Iri(self.resolve(&prefix, &local)?),
            Token::IriRef(iri) => Term::Iri(Iri::new(iri)),
            Token::Word(w) if w == "a" && position == "predicate" => {
                Term::iri(vocab::RDF_TYPE)
            }
            Token::Word(w) if w.eq_ignore_ascii_case("true") => {
                Term::Literal(Literal::Boolean(true))
            }
            Token::Word(w) if w.eq_ignore_ascii_case("false") => {
                Term::Literal(Literal::Boolean(false))
            }
            Token::Integer(text) => Term::Literal(Literal::Integer(
                text.parse()
                    .map_err(|_| self.syntax("integer out of range"))?,
            )),
            Token::Decimal(text) => {
                let v: f64 = text.parse().map_err(|_| self.syntax("invalid decimal"))?;
                Term::Literal(Literal::decimal(v))
            }
            Token::Str(s) => Term::Literal(Literal::String(s)),
            other => {
                return Err(self.syntax(format!("expected {position} term, found {other:?}")))
            }
        };
        self.advance()?;
        Ok(term)
    }

    fn parse_or_expr(&mut self) -> Result<Expr, QueryParseError> {
        let mut left = self.parse_and_expr()?;
        while self.token == Token::OrOr {
            self.advance()?;
            let right = self.parse_and_expr()?;
            left = Expr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_and_expr(&mut self) -> Result<Expr, QueryParseError> {
        let mut left = self.parse_unary_expr()?;
        while self.token == Token::AndAnd {
            self.advance()?;
            let right = self.parse_unary_expr()?;
            left = Expr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_unary_expr(&mut self) -> Result<Expr, QueryParseError> {
        match &self.token {
            Token::Bang => {
                self.advance()?;
                Ok(Expr::Not(Box::new(self.parse_unary_expr()?)))
            }
            Token::OpenParen => {
                self.advance()?;
                let inner = self.parse_or_expr()?;
                self.expect(Token::CloseParen, "')'")?;
                Ok(inner)
            }
            Token::Word(w) if w.eq_ignore_ascii_case("BOUND") => {
                self.advance()?;
                self.expect(Token::OpenParen, "'(' after bound")?;
                let variable = match &self.token {
                    Token::Variable(v) => v.clone(),
                    _ => return Err(self.syntax("expected variable in bound()")),
                };
                self.advance()?;
                self.expect(Token::CloseParen, "')'")?;
                Ok(Expr::Bound(variable))
            }
            _ => {
                let left = self.parse_operand()?;
                let op = match &self.token {
                    Token::Cmp(op) => *op,
                    _ => return Err(self.syntax("expected a comparison operator")),
                };
                self.advance()?;
                let right = self.parse_operand()?;
                Ok(Expr::Comparison { op, left, right })
            }
        }
    }

    fn parse_operand(&mut self) -> Result<Operand, QueryParseError> {
        let operand = match self.token.clone() {
            Token::Variable(v) => Operand::Variable(v),
            Token::PName { prefix, local } => {
                Operand::Constant(Value::Iri(self.resolve(&prefix, &local)?))
            }
            Token::IriRef(iri) => Operand::Constant(Value::iri(iri)),
            Token::Integer(text) => Operand::Constant(Value::Literal(Literal::Integer(
                text.parse()
                    .map_err(|_| self.syntax("integer out of range"))?,
            ))),
            Token::Decimal(text) => {
                let v: f64 = text.parse().map_err(|_| self.syntax("invalid decimal"))?;
                Operand::Constant(Value::Literal(Literal::decimal(v)))
            }
            Token::Str(s) => Operand::Constant(Value::Literal(Literal::String(s))),
            Token::Word(w) if w.eq_ignore_ascii_case("true") => {
                Operand::Constant(Value::Literal(Literal::Boolean(true)))
            }
            Token::Word(w) if w.eq_ignore_ascii_case("false") => {
                Operand::Constant(Value::Literal(Literal::Boolean(false)))
            }
            other => return Err(self.syntax(format!("expected operand, found {other:?}"))),
        };
        self.advance()?;
        Ok(operand)
    }
}

fn validate(query: &SelectQuery) -> Result<(), QueryParseError> {
    let visible = query.where_variables();
    if let Selection::Items(items) = &query.selection {
        for item in items {
            let needed = match item {
                SelectItem::Variable(v) => v,
                SelectItem::Count { variable, .. } => variable,
            };
            if !visible.contains(needed) {
                return Err(QueryParseError::ProjectionOfUnusedVariable {
                    variable: needed.clone(),
                });
            }
        }
        // With aggregation, plain projected variables must be grouped.
        if query.has_aggregates() || !query.group_by.is_empty() {
            for item in items {
                if let SelectItem::Variable(v) = item {
                    if !query.group_by.contains(v) {
                        return Err(QueryParseError::UngroupedVariable { variable: v.clone() });
                    }
                }
            }
        }
    } else if visible.is_empty() {
        // SELECT * over an empty clause projects nothing.
        return Err(QueryParseError::ProjectionOfUnusedVariable {
            variable: "*".into(),
        });
    }
    Ok(())
}

/// Parse a query. Syntax errors carry line and column.
pub fn parse_query(text: &str) -> Result<SelectQuery, QueryParseError> {
    Parser::new(text)?.parse_query()
}

#[cfg(test)]
mod tests {
    use super::*;

    const PROLOGUE: &str = "PREFIX ccpo: <http://www.semanticweb.org/ccpo#>\n";

    #[test]
    fn cq1_shape_one_pattern_two_optionals() {
        let text = format!(
            "{PROLOGUE}SELECT ?component ?virginMat ?nonVirginMat WHERE {{\n  ccpo:iwp1 ccpo:hasComponent ?component .\n  OPTIONAL {{ ?component ccpo:hasVirginMaterial ?virginMat . }}\n  OPTIONAL {{ ?component ccpo:hasNonVirginMaterial ?nonVirginMat . }}\n}}"
        );
        let query = parse_query(&text).unwrap();
        assert_eq!(query.where_clause.len(), 3);
        assert!(matches!(query.where_clause[0], Element::Pattern(_)));
        assert!(matches!(query.where_clause[1], Element::Optional(_)));
        assert!(matches!(query.where_clause[2], Element::Optional(_)));
    }

    #[test]
    fn projection_of_unused_variable_is_rejected() {
        let err = parse_query("SELECT ?x WHERE { }").unwrap_err();
        assert_eq!(
            err,
            QueryParseError::ProjectionOfUnusedVariable {
                variable: "x".into()
            }
        );
    }

    #[test]
    fn filter_comparison_builds_the_expected_node() {
        let text = format!(
            "{PROLOGUE}SELECT ?d WHERE {{ ?p ccpo:propertyValue ?d . FILTER(?d <= 1) }}"
        );
        let query = parse_query(&text).unwrap();
        match &query.where_clause[1] {
            Element::Filter(Expr::Comparison { op, .. }) => assert_eq!(*op, CompareOp::Le),
            other => panic!("expected filter, got {other:?}"),
        }
    }

    #[test]
    fn count_with_group_by_parses() {
        let text = format!(
            "{PROLOGUE}SELECT ?p (COUNT(?c) AS ?n) WHERE {{ ?p ccpo:hasComponent ?c }} GROUP BY ?p ORDER BY DESC(?n) LIMIT 5"
        );
        let query = parse_query(&text).unwrap();
        assert!(query.has_aggregates());
        assert_eq!(query.group_by, vec!["p"]);
        assert!(query.order_by[0].descending);
        assert_eq!(query.limit, Some(5));
    }

    #[test]
    fn ungrouped_projection_with_aggregate_is_rejected() {
        let text = format!(
            "{PROLOGUE}SELECT ?p (COUNT(?c) AS ?n) WHERE {{ ?p ccpo:hasComponent ?c }}"
        );
        let err = parse_query(&text).unwrap_err();
        assert_eq!(err, QueryParseError::UngroupedVariable { variable: "p".into() });
    }

    #[test]
    fn unknown_prefix_is_rejected() {
        let err = parse_query("SELECT ?x WHERE { ?x nope:y ?z }").unwrap_err();
        assert!(matches!(err, QueryParseError::UnknownPrefix { prefix, .. } if prefix == "nope"));
    }

    #[test]
    fn optional_nesting_is_capped_at_two() {
        let text = format!(
            "{PROLOGUE}SELECT ?a WHERE {{ ?a ccpo:hasComponent ?b . OPTIONAL {{ ?b ccpo:hasComponent ?c . OPTIONAL {{ ?c ccpo:hasComponent ?d . OPTIONAL {{ ?d ccpo:hasComponent ?e . }} }} }} }}"
        );
        let err = parse_query(&text).unwrap_err();
        assert_eq!(err, QueryParseError::OptionalTooDeep { max: 2 });
    }

    #[test]
    fn subselect_nesting_is_capped_at_one() {
        let text = format!(
            "{PROLOGUE}SELECT ?a WHERE {{ {{ SELECT ?a WHERE {{ {{ SELECT ?a WHERE {{ ?a ccpo:hasComponent ?b }} }} }} }} }}"
        );
        let err = parse_query(&text).unwrap_err();
        assert_eq!(err, QueryParseError::SubSelectTooDeep { max: 1 });
    }

    #[test]
    fn keywords_are_case_insensitive_and_distinct_flag_sticks() {
        let text = format!(
            "{PROLOGUE}select distinct ?x where {{ ?x a ccpo:Component }} order by ?x offset 1 limit 2"
        );
        let query = parse_query(&text).unwrap();
        assert!(query.distinct);
        assert_eq!(query.offset, Some(1));
        assert_eq!(query.limit, Some(2));
    }

    #[test]
    fn logical_operators_and_bound_parse() {
        let text = format!(
            "{PROLOGUE}SELECT ?x ?v WHERE {{ ?x ccpo:propertyValue ?v . FILTER(!bound(?v) || (?v > 1 && ?v < 10)) }}"
        );
        let query = parse_query(&text).unwrap();
        match &query.where_clause[1] {
            Element::Filter(Expr::Or(left, _)) => {
                assert!(matches!(**left, Expr::Not(_)));
            }
            other => panic!("expected or-filter, got {other:?}"),
        }
    }

    #[test]
    fn syntax_error_carries_location() {
        let err = parse_query("SELECT ?x WHERE { ?x ").unwrap_err();
        assert!(matches!(err, QueryParseError::Syntax { line: 1, .. }));
    }
}
