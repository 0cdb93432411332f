//! Turtle subset parser.
//!
//! Supported: `@prefix`/`@base` and their SPARQL-style forms, the `a`
//! keyword, predicate lists, object lists, labeled and anonymous blank nodes
//! (including `[ p o ]` property lists), single-line string literals with
//! language tags or datatypes, and integer/decimal/double/boolean shorthand.
//! Collections and triple-quoted strings are reported as unsupported.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::term::{has_scheme, Literal, SourcedTriple, Term};
use super::vocab::{rdf, xsd};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum TurtleError {
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported feature at {line}:{column}: {feature}")]
    UnsupportedFeature {
        line: usize,
        column: usize,
        feature: String,
    },
}

/// A dereferenced document: its IRI and the original triples it contains.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Document {
    pub iri: String,
    pub triples: Vec<SourcedTriple>,
}

impl Document {
    pub fn empty(iri: impl Into<String>) -> Self {
        Self {
            iri: iri.into(),
            triples: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }
}

/// Parse `text` as Turtle with `base` as both the initial base IRI and the
/// source tag of every produced triple.
pub fn parse_turtle(text: &str, base: &str) -> Result<Document, TurtleError> {
    let mut parser = Parser::new(text, base);
    if !has_scheme(base) {
        return Err(parser.error(format!("base IRI <{base}> is not absolute")));
    }
    parser.document()?;
    Ok(Document {
        iri: base.to_owned(),
        triples: parser.triples,
    })
}

/// Resolve `reference` against `base`. Absolute references are returned as-is.
pub fn resolve_iri(base: &str, reference: &str) -> Option<String> {
    if has_scheme(reference) {
        return Some(reference.to_owned());
    }
    let base = url::Url::parse(base).ok()?;
    base.join(reference).ok().map(String::from)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    base: String,
    source: &'a str,
    prefixes: HashMap<String, String>,
    anon_counter: usize,
    triples: Vec<SourcedTriple>,
}

impl<'a> Parser<'a> {
    fn new(text: &str, source: &'a str) -> Self {
        Self {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
            base: source.to_owned(),
            source,
            prefixes: HashMap::new(),
            anon_counter: 0,
            triples: Vec::new(),
        }
    }

    fn error(&self, message: impl Into<String>) -> TurtleError {
        TurtleError::Parse {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn unsupported(&self, feature: &str) -> TurtleError {
        TurtleError::UnsupportedFeature {
            line: self.line,
            column: self.column,
            feature: feature.to_owned(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, expected: char) -> Result<(), TurtleError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == expected => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected '{expected}', found '{c}'"))),
            None => Err(self.error(format!("expected '{expected}', found end of input"))),
        }
    }

    fn starts_with_keyword(&self, kw: &str) -> bool {
        let n = kw.chars().count();
        let matches = kw
            .chars()
            .enumerate()
            .all(|(i, k)| self.peek_at(i).is_some_and(|c| c.eq_ignore_ascii_case(&k)));
        matches && !self.peek_at(n).is_some_and(|c| is_name_char(c) || c == ':')
    }

    fn document(&mut self) -> Result<(), TurtleError> {
        loop {
            self.skip_ws();
            let Some(c) = self.peek() else {
                return Ok(());
            };
            if c == '@' {
                self.at_directive()?;
            } else if self.starts_with_keyword("PREFIX") {
                self.advance(6);
                self.prefix_decl()?;
            } else if self.starts_with_keyword("BASE") {
                self.advance(4);
                self.base_decl()?;
            } else {
                self.triples_statement()?;
                self.expect('.')?;
            }
        }
    }

    fn advance(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    fn at_directive(&mut self) -> Result<(), TurtleError> {
        self.bump();
        let name = self.read_while(|c| c.is_ascii_alphabetic());
        match name.as_str() {
            "prefix" => self.prefix_decl()?,
            "base" => self.base_decl()?,
            other => return Err(self.error(format!("unknown directive @{other}"))),
        }
        self.expect('.')
    }

    fn prefix_decl(&mut self) -> Result<(), TurtleError> {
        self.skip_ws();
        let prefix = self.read_while(is_name_char);
        if self.peek() != Some(':') {
            return Err(self.error("expected ':' after prefix name"));
        }
        self.bump();
        self.skip_ws();
        let iri = self.iri_ref()?;
        self.prefixes.insert(prefix, iri);
        Ok(())
    }

    fn base_decl(&mut self) -> Result<(), TurtleError> {
        self.skip_ws();
        self.base = self.iri_ref()?;
        Ok(())
    }

    fn read_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            out.push(c);
            self.bump();
        }
        out
    }

    fn triples_statement(&mut self) -> Result<(), TurtleError> {
        self.skip_ws();
        if self.peek() == Some('[') {
            let subject = self.blank_property_list()?;
            self.skip_ws();
            if self.peek() != Some('.') {
                self.predicate_object_list(&subject)?;
            }
            return Ok(());
        }
        let subject = self.subject()?;
        self.predicate_object_list(&subject)
    }

    fn subject(&mut self) -> Result<Term, TurtleError> {
        self.skip_ws();
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('_') if self.peek_at(1) == Some(':') => self.blank_label(),
            Some('(') => Err(self.unsupported("collections")),
            Some('[') => self.blank_property_list(),
            Some(c) if is_name_start(c) || c == ':' => Ok(Term::Iri(self.prefixed_name()?)),
            Some(c) => Err(self.error(format!("unexpected '{c}' in subject position"))),
            None => Err(self.error("unexpected end of input, expected subject")),
        }
    }

    fn predicate_object_list(&mut self, subject: &Term) -> Result<(), TurtleError> {
        loop {
            let predicate = self.verb()?;
            self.object_list(subject, &predicate)?;
            self.skip_ws();
            if self.peek() != Some(';') {
                return Ok(());
            }
            while self.peek() == Some(';') {
                self.bump();
                self.skip_ws();
            }
            // A trailing ';' may close the list.
            if matches!(self.peek(), Some('.') | Some(']') | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<Term, TurtleError> {
        self.skip_ws();
        match self.peek() {
            Some('a') if !self.peek_at(1).is_some_and(|c| is_name_char(c) || c == ':') => {
                self.bump();
                Ok(Term::iri(rdf::TYPE))
            }
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some(c) if is_name_start(c) || c == ':' => Ok(Term::Iri(self.prefixed_name()?)),
            Some(c) => Err(self.error(format!("unexpected '{c}' in predicate position"))),
            None => Err(self.error("unexpected end of input, expected predicate")),
        }
    }

    fn object_list(&mut self, subject: &Term, predicate: &Term) -> Result<(), TurtleError> {
        loop {
            let object = self.object()?;
            self.triples.push(SourcedTriple::new(
                subject.clone(),
                predicate.clone(),
                object,
                self.source,
            ));
            self.skip_ws();
            if self.peek() == Some(',') {
                self.bump();
            } else {
                return Ok(());
            }
        }
    }

    fn object(&mut self) -> Result<Term, TurtleError> {
        self.skip_ws();
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('_') if self.peek_at(1) == Some(':') => self.blank_label(),
            Some('[') => self.blank_property_list(),
            Some('(') => Err(self.unsupported("collections")),
            Some('"') | Some('\'') => self.rdf_literal(),
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-' | '.') => self.numeric(),
            Some(_) if self.starts_with_keyword("true") => {
                self.advance(4);
                Ok(Term::Literal(Literal::typed("true", xsd::BOOLEAN)))
            }
            Some(_) if self.starts_with_keyword("false") => {
                self.advance(5);
                Ok(Term::Literal(Literal::typed("false", xsd::BOOLEAN)))
            }
            Some(c) if is_name_start(c) || c == ':' => Ok(Term::Iri(self.prefixed_name()?)),
            Some(c) => Err(self.error(format!("unexpected '{c}' in object position"))),
            None => Err(self.error("unexpected end of input, expected object")),
        }
    }

    fn blank_label(&mut self) -> Result<Term, TurtleError> {
        self.advance(2);
        let mut label = self.read_while(|c| is_name_char(c) || c == '.');
        while label.ends_with('.') {
            label.pop();
            self.pos -= 1;
            self.column -= 1;
        }
        if label.is_empty() {
            return Err(self.error("empty blank node label"));
        }
        Ok(Term::BlankNode(label))
    }

    fn blank_property_list(&mut self) -> Result<Term, TurtleError> {
        self.expect('[')?;
        let node = Term::BlankNode(format!("anon{}", self.anon_counter));
        self.anon_counter += 1;
        self.skip_ws();
        if self.peek() != Some(']') {
            self.predicate_object_list(&node)?;
        }
        self.expect(']')?;
        Ok(node)
    }

    fn iri_ref(&mut self) -> Result<String, TurtleError> {
        self.expect('<')?;
        let mut raw = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some('\\') => raw.push(self.unicode_escape()?),
                Some(c) if c == '\n' || c == ' ' || c == '<' || c == '"' => {
                    return Err(self.error(format!("invalid character {c:?} in IRI")))
                }
                Some(c) => raw.push(c),
                None => return Err(self.error("unterminated IRI")),
            }
        }
        resolve_iri(&self.base, &raw)
            .ok_or_else(|| self.error(format!("cannot resolve <{raw}> against <{}>", self.base)))
    }

    fn unicode_escape(&mut self) -> Result<char, TurtleError> {
        let len = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.error("invalid escape in IRI")),
        };
        self.hex_char(len)
    }

    fn hex_char(&mut self, len: usize) -> Result<char, TurtleError> {
        let mut code = 0u32;
        for _ in 0..len {
            let digit = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.error("invalid hex digit in escape"))?;
            code = code * 16 + digit;
        }
        char::from_u32(code).ok_or_else(|| self.error("escape is not a valid code point"))
    }

    fn prefixed_name(&mut self) -> Result<String, TurtleError> {
        let prefix = self.read_while(is_name_char);
        if self.peek() != Some(':') {
            return Err(self.error(format!("expected prefixed name, found '{prefix}'")));
        }
        self.bump();
        let namespace = self
            .prefixes
            .get(&prefix)
            .cloned()
            .ok_or_else(|| self.error(format!("undeclared prefix '{prefix}:'")))?;
        let mut local = String::new();
        while let Some(c) = self.peek() {
            if is_name_char(c) || c == ':' || c == '.' {
                local.push(c);
                self.bump();
            } else if c == '%' {
                local.push(c);
                self.bump();
                for _ in 0..2 {
                    match self.bump() {
                        Some(h) if h.is_ascii_hexdigit() => local.push(h),
                        _ => return Err(self.error("invalid percent escape in local name")),
                    }
                }
            } else if c == '\\' {
                self.bump();
                match self.bump() {
                    Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => local.push(e),
                    _ => return Err(self.error("invalid escape in local name")),
                }
            } else {
                break;
            }
        }
        // The final '.' belongs to the statement terminator.
        while local.ends_with('.') {
            local.pop();
            self.pos -= 1;
            self.column -= 1;
        }
        Ok(format!("{namespace}{local}"))
    }

    fn rdf_literal(&mut self) -> Result<Term, TurtleError> {
        let quote = self.peek().expect("caller checked quote");
        if self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote) {
            return Err(self.unsupported("long (triple-quoted) strings"));
        }
        self.bump();
        let mut lexical = String::new();
        loop {
            match self.bump() {
                Some(c) if c == quote => break,
                Some('\\') => {
                    let escaped = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_char(4)?,
                        Some('U') => self.hex_char(8)?,
                        _ => return Err(self.error("invalid string escape")),
                    };
                    lexical.push(escaped);
                }
                Some('\n') | Some('\r') => return Err(self.error("line break in string literal")),
                Some(c) => lexical.push(c),
                None => return Err(self.error("unterminated string literal")),
            }
        }
        match self.peek() {
            Some('@') => {
                self.bump();
                let lang = self.read_while(|c| c.is_ascii_alphanumeric() || c == '-');
                if lang.is_empty() || !lang.starts_with(|c: char| c.is_ascii_alphabetic()) {
                    return Err(self.error("invalid language tag"));
                }
                Ok(Term::Literal(Literal::lang(lexical, lang)))
            }
            Some('^') if self.peek_at(1) == Some('^') => {
                self.advance(2);
                let datatype = match self.peek() {
                    Some('<') => self.iri_ref()?,
                    _ => self.prefixed_name()?,
                };
                Ok(Term::Literal(Literal::typed(lexical, datatype)))
            }
            _ => Ok(Term::Literal(Literal::simple(lexical))),
        }
    }

    fn numeric(&mut self) -> Result<Term, TurtleError> {
        let mut text = String::new();
        if let Some(sign @ ('+' | '-')) = self.peek() {
            text.push(sign);
            self.bump();
        }
        text.push_str(&self.read_while(|c| c.is_ascii_digit()));
        let mut datatype = xsd::INTEGER;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            text.push('.');
            text.push_str(&self.read_while(|c| c.is_ascii_digit()));
            datatype = xsd::DECIMAL;
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            text.push('e');
            self.bump();
            if let Some(sign @ ('+' | '-')) = self.peek() {
                text.push(sign);
                self.bump();
            }
            let exp = self.read_while(|c| c.is_ascii_digit());
            if exp.is_empty() {
                return Err(self.error("missing exponent digits"));
            }
            text.push_str(&exp);
            datatype = xsd::DOUBLE;
        }
        if !text.chars().any(|c| c.is_ascii_digit()) {
            return Err(self.error(format!("invalid numeric literal '{text}'")));
        }
        Ok(Term::Literal(Literal::typed(text, datatype)))
    }
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '\u{b7}'
}
