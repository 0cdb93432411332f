//! Parser for the supported SELECT fragment.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ast::{CompareOp, Constraint, GroupPattern, PatternTerm, Projection, Query, TriplePattern};
use crate::rdf::vocab::{rdf, xsd};
use crate::rdf::{has_scheme, resolve_iri, Literal, Term};

/// Projected variables (None for `*`) and an optional `(COUNT var, alias)`.
type SelectClause = (Option<Vec<String>>, Option<(String, String)>);

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum QueryParseError {
    #[error("query parse error at {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unsupported query feature at {position}: {feature}")]
    UnsupportedFeature { position: usize, feature: String },
}

impl QueryParseError {
    pub fn position(&self) -> usize {
        match self {
            QueryParseError::Syntax { position, .. } | QueryParseError::UnsupportedFeature { position, .. } => {
                *position
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Iri(String),
    PName(String, String),
    Var(String),
    Word(String),
    Str(String),
    LangTag(String),
    Number(String, &'static str),
    Punct(char),
    NotEq,
    DoubleCaret,
    Eof,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
}

impl Lexer {
    fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, QueryParseError> {
        let mut lexer = Lexer {
            chars: text.chars().collect(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            lexer.skip_ws();
            let start = lexer.pos;
            let tok = lexer.next_tok()?;
            let done = tok == Tok::Eof;
            out.push((tok, start));
            if done {
                return Ok(out);
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.pos + n).copied()
    }

    fn err(&self, message: impl Into<String>) -> QueryParseError {
        QueryParseError::Syntax {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += 1;
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    self.pos += 1;
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let start = self.pos;
        while self.peek().is_some_and(&pred) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn next_tok(&mut self) -> Result<Tok, QueryParseError> {
        let Some(c) = self.peek() else {
            return Ok(Tok::Eof);
        };
        match c {
            '<' if self.looks_like_iri() => {
                self.pos += 1;
                let iri = self.take_while(|c| c != '>');
                if self.peek() != Some('>') {
                    return Err(self.err("unterminated IRI"));
                }
                self.pos += 1;
                Ok(Tok::Iri(iri))
            }
            '?' | '$' if self.peek_at(1).is_some_and(is_name_char) => {
                self.pos += 1;
                Ok(Tok::Var(self.take_while(is_name_char)))
            }
            '"' | '\'' => self.string(c),
            '@' => {
                self.pos += 1;
                let tag = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
                if tag.is_empty() {
                    return Err(self.err("empty language tag"));
                }
                Ok(Tok::LangTag(tag.to_ascii_lowercase()))
            }
            '^' if self.peek_at(1) == Some('^') => {
                self.pos += 2;
                Ok(Tok::DoubleCaret)
            }
            '!' if self.peek_at(1) == Some('=') => {
                self.pos += 2;
                Ok(Tok::NotEq)
            }
            c if c.is_ascii_digit()
                || ((c == '+' || c == '-') && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) =>
            {
                Ok(self.number())
            }
            c if is_name_start(c) || c == ':' => {
                let word = self.take_while(|c| is_name_char(c) || c == '.');
                let word = self.give_back_dots(word);
                if self.peek() == Some(':') {
                    self.pos += 1;
                    let local = self.take_while(|c| is_name_char(c) || c == '.' || c == ':');
                    let local = self.give_back_dots(local);
                    Ok(Tok::PName(word, local))
                } else {
                    Ok(Tok::Word(word))
                }
            }
            c => {
                self.pos += 1;
                Ok(Tok::Punct(c))
            }
        }
    }

    fn give_back_dots(&mut self, mut s: String) -> String {
        while s.ends_with('.') {
            s.pop();
            self.pos -= 1;
        }
        s
    }

    fn looks_like_iri(&self) -> bool {
        let mut i = self.pos + 1;
        while let Some(&c) = self.chars.get(i) {
            match c {
                '>' => return true,
                c if c.is_whitespace() || c == '<' || c == '"' => return false,
                _ => i += 1,
            }
        }
        false
    }

    fn string(&mut self, quote: char) -> Result<Tok, QueryParseError> {
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.peek() {
                None | Some('\n') => return Err(self.err("unterminated string")),
                Some(c) if c == quote => {
                    self.pos += 1;
                    return Ok(Tok::Str(out));
                }
                Some('\\') => {
                    self.pos += 1;
                    let e = self.peek().ok_or_else(|| self.err("dangling escape"))?;
                    self.pos += 1;
                    out.push(match e {
                        't' => '\t',
                        'n' => '\n',
                        'r' => '\r',
                        'b' => '\u{8}',
                        'f' => '\u{c}',
                        '"' | '\'' | '\\' => e,
                        _ => return Err(self.err("invalid string escape")),
                    });
                }
                Some(c) => {
                    out.push(c);
                    self.pos += 1;
                }
            }
        }
    }

    fn number(&mut self) -> Tok {
        let mut text = String::new();
        if let Some(s @ ('+' | '-')) = self.peek() {
            text.push(s);
            self.pos += 1;
        }
        text.push_str(&self.take_while(|c| c.is_ascii_digit()));
        let mut datatype = xsd::INTEGER;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
            text.push('.');
            text.push_str(&self.take_while(|c| c.is_ascii_digit()));
            datatype = xsd::DECIMAL;
        }
        Tok::Number(text, datatype)
    }
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

const UNSUPPORTED_GROUP_KEYWORDS: &[&str] = &["OPTIONAL", "MINUS", "BIND", "VALUES", "SERVICE", "GRAPH", "SELECT"];

struct Parser {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    prefixes: HashMap<String, String>,
    base: Option<String>,
}

/// Parse a query in the supported SELECT fragment.
pub fn parse_query(text: &str) -> Result<Query, QueryParseError> {
    let mut parser = Parser {
        toks: Lexer::tokenize(text)?,
        idx: 0,
        prefixes: HashMap::new(),
        base: None,
    };
    parser.query()
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.idx].0
    }

    fn position(&self) -> usize {
        self.toks[self.idx].1
    }

    fn next(&mut self) -> Tok {
        let tok = self.toks[self.idx].0.clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        tok
    }

    fn err(&self, message: impl Into<String>) -> QueryParseError {
        QueryParseError::Syntax {
            position: self.position(),
            message: message.into(),
        }
    }

    fn unsupported(&self, feature: impl Into<String>) -> QueryParseError {
        QueryParseError::UnsupportedFeature {
            position: self.position(),
            feature: feature.into(),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), QueryParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.err(format!("expected {kw}")))
        }
    }

    fn is_punct(&self, c: char) -> bool {
        *self.peek() == Tok::Punct(c)
    }

    fn expect_punct(&mut self, c: char) -> Result<(), QueryParseError> {
        if self.is_punct(c) {
            self.next();
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn expect_var(&mut self) -> Result<String, QueryParseError> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.next();
                Ok(v)
            }
            _ => Err(self.err("expected a variable")),
        }
    }

    fn query(&mut self) -> Result<Query, QueryParseError> {
        self.prologue()?;
        for kw in ["CONSTRUCT", "ASK", "DESCRIBE"] {
            if self.is_keyword(kw) {
                return Err(self.unsupported(format!("{kw} queries")));
            }
        }
        self.expect_keyword("SELECT")?;
        let distinct = self.eat_keyword("DISTINCT");
        if self.is_keyword("REDUCED") {
            return Err(self.unsupported("REDUCED"));
        }
        let select_pos = self.position();
        let (vars, count) = self.select_clause()?;
        self.eat_keyword("WHERE");
        let pattern = self.group()?;
        let group_by = if self.eat_keyword("GROUP") {
            self.expect_keyword("BY")?;
            let v = self.expect_var()?;
            if matches!(self.peek(), Tok::Var(_)) {
                return Err(self.unsupported("GROUP BY over several variables"));
            }
            Some(v)
        } else {
            None
        };
        if self.is_keyword("HAVING") || self.is_keyword("ORDER") || self.is_keyword("OFFSET") {
            let Tok::Word(w) = self.peek().clone() else { unreachable!() };
            return Err(self.unsupported(w.to_ascii_uppercase()));
        }
        let limit = if self.eat_keyword("LIMIT") {
            match self.next() {
                Tok::Number(n, xsd::INTEGER) if !n.starts_with(['-', '+']) => {
                    let n: usize = n.parse().map_err(|_| self.err("LIMIT out of range"))?;
                    if n == 0 {
                        return Err(self.err("LIMIT must be positive"));
                    }
                    Some(n)
                }
                _ => return Err(self.err("expected a positive integer after LIMIT")),
            }
        } else {
            None
        };
        if self.is_keyword("ORDER") || self.is_keyword("OFFSET") {
            return Err(self.unsupported("solution modifiers after LIMIT"));
        }
        if *self.peek() != Tok::Eof {
            return Err(self.err("unexpected trailing input"));
        }

        let projection = build_projection(vars, count, group_by.as_deref())
            .map_err(|message| QueryParseError::Syntax {
                position: select_pos,
                message,
            })?;
        let query = Query {
            projection,
            distinct,
            pattern,
            group_by,
            limit,
        };
        validate_variables(&query).map_err(|message| QueryParseError::Syntax {
            position: select_pos,
            message,
        })?;
        Ok(query)
    }

    fn prologue(&mut self) -> Result<(), QueryParseError> {
        loop {
            if self.eat_keyword("PREFIX") {
                let prefix = match self.next() {
                    Tok::PName(p, l) if l.is_empty() => p,
                    _ => return Err(self.err("expected prefix name ending in ':'")),
                };
                let iri = self.iri_ref()?;
                self.prefixes.insert(prefix, iri);
            } else if self.eat_keyword("BASE") {
                let iri = self.iri_ref()?;
                if !has_scheme(&iri) {
                    return Err(self.err("BASE must be absolute"));
                }
                self.base = Some(iri);
            } else {
                return Ok(());
            }
        }
    }

    fn iri_ref(&mut self) -> Result<String, QueryParseError> {
        match self.peek().clone() {
            Tok::Iri(raw) => {
                let resolved = match &self.base {
                    Some(base) => resolve_iri(base, &raw),
                    None if has_scheme(&raw) => Some(raw.clone()),
                    None => None,
                };
                let iri = resolved.ok_or_else(|| self.err(format!("relative IRI <{raw}> without BASE")))?;
                self.next();
                Ok(iri)
            }
            _ => Err(self.err("expected an IRI")),
        }
    }

    fn select_clause(&mut self) -> Result<SelectClause, QueryParseError> {
        if self.is_punct('*') {
            self.next();
            return Ok((None, None));
        }
        let mut vars = Vec::new();
        let mut count = None;
        loop {
            match self.peek().clone() {
                Tok::Var(v) => {
                    self.next();
                    vars.push(v);
                }
                Tok::Punct('(') => {
                    self.next();
                    if !self.eat_keyword("COUNT") {
                        return Err(self.unsupported("projection expressions other than COUNT"));
                    }
                    self.expect_punct('(')?;
                    if self.is_keyword("DISTINCT") || self.is_punct('*') {
                        return Err(self.unsupported("COUNT(DISTINCT …) and COUNT(*)"));
                    }
                    let counted = self.expect_var()?;
                    self.expect_punct(')')?;
                    self.expect_keyword("AS")?;
                    let alias = self.expect_var()?;
                    self.expect_punct(')')?;
                    if count.replace((counted, alias)).is_some() {
                        return Err(self.unsupported("more than one aggregate"));
                    }
                }
                _ => break,
            }
        }
        if vars.is_empty() && count.is_none() {
            return Err(self.err("expected projection"));
        }
        Ok((Some(vars), count))
    }

    fn group(&mut self) -> Result<GroupPattern, QueryParseError> {
        self.expect_punct('{')?;
        let mut elements: Vec<GroupPattern> = Vec::new();
        let mut bgp: Vec<TriplePattern> = Vec::new();
        let mut filters = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Punct('}') => {
                    self.next();
                    break;
                }
                Tok::Punct('.') => {
                    self.next();
                }
                Tok::Punct('{') => {
                    if !bgp.is_empty() {
                        elements.push(GroupPattern::Bgp(std::mem::take(&mut bgp)));
                    }
                    let mut union = self.group()?;
                    while self.eat_keyword("UNION") {
                        let right = self.group()?;
                        union = GroupPattern::Union(Box::new(union), Box::new(right));
                    }
                    elements.push(union);
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("FILTER") => {
                    self.next();
                    filters.push(self.filter()?);
                }
                Tok::Word(w) if UNSUPPORTED_GROUP_KEYWORDS.iter().any(|k| w.eq_ignore_ascii_case(k)) => {
                    let feature = if w.eq_ignore_ascii_case("SELECT") {
                        "subqueries".to_owned()
                    } else {
                        w.to_ascii_uppercase()
                    };
                    return Err(self.unsupported(feature));
                }
                Tok::Eof => return Err(self.err("unexpected end of query, expected '}'")),
                _ => self.triples_block(&mut bgp)?,
            }
        }
        if !bgp.is_empty() || elements.is_empty() {
            elements.push(GroupPattern::Bgp(bgp));
        }
        let mut pattern = if elements.len() == 1 {
            elements.pop().expect("one element")
        } else {
            GroupPattern::Join(elements)
        };
        for constraint in filters {
            pattern = GroupPattern::Filtered {
                inner: Box::new(pattern),
                constraint,
            };
        }
        Ok(pattern)
    }

    fn filter(&mut self) -> Result<Constraint, QueryParseError> {
        self.expect_punct('(')?;
        let unsupported_filter = |p: &Self| p.unsupported("FILTER expressions other than ?var = / != constant");
        let left = self.filter_operand().map_err(|_| unsupported_filter(self))?;
        let op = match self.peek() {
            Tok::Punct('=') => CompareOp::Eq,
            Tok::NotEq => CompareOp::Ne,
            _ => return Err(unsupported_filter(self)),
        };
        self.next();
        let right = self.filter_operand().map_err(|_| unsupported_filter(self))?;
        self.expect_punct(')').map_err(|_| unsupported_filter(self))?;
        match (left, right) {
            (PatternTerm::Var(variable), PatternTerm::Term(value))
            | (PatternTerm::Term(value), PatternTerm::Var(variable)) => Ok(Constraint { variable, op, value }),
            _ => Err(unsupported_filter(self)),
        }
    }

    fn filter_operand(&mut self) -> Result<PatternTerm, QueryParseError> {
        match self.peek() {
            Tok::Var(_) => Ok(PatternTerm::Var(self.expect_var()?)),
            _ => Ok(PatternTerm::Term(self.constant()?)),
        }
    }

    fn triples_block(&mut self, out: &mut Vec<TriplePattern>) -> Result<(), QueryParseError> {
        let subject = self.node("subject")?;
        loop {
            let predicate = self.verb()?;
            loop {
                let object = self.node("object")?;
                out.push(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                if self.is_punct(',') {
                    self.next();
                } else {
                    break;
                }
            }
            if !self.is_punct(';') {
                return Ok(());
            }
            while self.is_punct(';') {
                self.next();
            }
            if self.is_punct('.') || self.is_punct('}') {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<PatternTerm, QueryParseError> {
        let verb = match self.peek().clone() {
            Tok::Word(w) if w == "a" => {
                self.next();
                PatternTerm::Term(Term::iri(rdf::TYPE))
            }
            Tok::Var(v) => {
                self.next();
                PatternTerm::Var(v)
            }
            Tok::Iri(_) | Tok::PName(..) => PatternTerm::Term(self.constant()?),
            Tok::Punct('^' | '(' | '!') => return Err(self.unsupported("property paths")),
            Tok::Word(w) if UNSUPPORTED_GROUP_KEYWORDS.iter().any(|k| w.eq_ignore_ascii_case(k)) => {
                return Err(self.unsupported(w.to_ascii_uppercase()))
            }
            _ => return Err(self.err("expected a predicate")),
        };
        if matches!(self.peek(), Tok::Punct('/' | '|' | '*' | '+' | '?')) {
            return Err(self.unsupported("property paths"));
        }
        Ok(verb)
    }

    fn node(&mut self, role: &str) -> Result<PatternTerm, QueryParseError> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.next();
                Ok(PatternTerm::Var(v))
            }
            Tok::Punct('[') => Err(self.unsupported("blank node property lists")),
            Tok::Punct('(') => Err(self.unsupported("collections")),
            Tok::Word(w) if w.eq_ignore_ascii_case("OPTIONAL") => Err(self.unsupported("OPTIONAL")),
            Tok::Eof => Err(self.err(format!("unexpected end of query, expected {role}"))),
            _ => self.constant().map(PatternTerm::Term),
        }
    }

    fn constant(&mut self) -> Result<Term, QueryParseError> {
        match self.peek().clone() {
            Tok::Iri(_) => Ok(Term::Iri(self.iri_ref()?)),
            Tok::PName(prefix, local) => {
                let ns = self
                    .prefixes
                    .get(&prefix)
                    .ok_or_else(|| self.err(format!("undeclared prefix '{prefix}:'")))?
                    .clone();
                self.next();
                Ok(Term::Iri(format!("{ns}{local}")))
            }
            Tok::Str(lexical) => {
                self.next();
                match self.peek().clone() {
                    Tok::LangTag(lang) => {
                        self.next();
                        Ok(Term::Literal(Literal::lang(lexical, lang)))
                    }
                    Tok::DoubleCaret => {
                        self.next();
                        let dt = self.constant()?;
                        match dt {
                            Term::Iri(dt) => Ok(Term::Literal(Literal::typed(lexical, dt))),
                            _ => Err(self.err("datatype must be an IRI")),
                        }
                    }
                    _ => Ok(Term::literal(lexical)),
                }
            }
            Tok::Number(n, dt) => {
                self.next();
                Ok(Term::Literal(Literal::typed(n, dt)))
            }
            Tok::Word(w) if w == "true" || w == "false" => {
                self.next();
                Ok(Term::Literal(Literal::typed(w, xsd::BOOLEAN)))
            }
            Tok::Word(w) if w.starts_with('_') => Err(self.unsupported("blank nodes in patterns")),
            Tok::Punct('_') => Err(self.unsupported("blank nodes in patterns")),
            other => Err(self.err(format!("unexpected token {other:?}"))),
        }
    }
}

fn build_projection(
    vars: Option<Vec<String>>,
    count: Option<(String, String)>,
    group_by: Option<&str>,
) -> Result<Projection, String> {
    let Some(vars) = vars else {
        if group_by.is_some() {
            return Err("SELECT * cannot be combined with GROUP BY".into());
        }
        return Ok(Projection::All);
    };
    match (count, group_by) {
        (None, None) => Ok(Projection::Variables(vars)),
        (None, Some(_)) => Err("GROUP BY requires a COUNT projection".into()),
        (Some((counted, alias)), group) => {
            let key = match (vars.as_slice(), group) {
                ([], None) => None,
                ([v], Some(g)) if v == g => Some(v.clone()),
                _ => {
                    return Err("an aggregate query must project exactly the GROUP BY variable and one COUNT".into())
                }
            };
            Ok(Projection::Count { key, counted, alias })
        }
    }
}

fn validate_variables(query: &Query) -> Result<(), String> {
    let in_pattern = query.pattern.variables();
    let check = |v: &String| {
        if in_pattern.contains(v) {
            Ok(())
        } else {
            Err(format!("variable ?{v} does not occur in the WHERE clause"))
        }
    };
    match &query.projection {
        Projection::All => Ok(()),
        Projection::Variables(vars) => vars.iter().try_for_each(check),
        Projection::Count { key, counted, alias } => {
            key.iter().try_for_each(check)?;
            check(counted)?;
            if in_pattern.contains(alias) || key.as_ref() == Some(alias) {
                return Err(format!("aggregate alias ?{alias} clashes with a pattern variable"));
            }
            Ok(())
        }
    }
}
