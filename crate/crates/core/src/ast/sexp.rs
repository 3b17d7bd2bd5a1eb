//! Text format for trees and templates.
//!
//! ```text
//! node     := "(" kind [label] child* ")"
//! child    := node | hole
//! hole     := "?" digits
//! kind     := atom, optionally "kind:subkind"
//! label    := '"' ( [^"\\] | '\"' | '\\' )* '"'
//! ```
//!
//! `;` starts a comment that runs to the end of the line. The canonical
//! rendering is a single line with one space between items.

use std::fmt::{self, Write as _};

use super::{HoleId, Span, Template, Tree};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at {line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Parse a hole-free tree. Every node gets a [`Span`].
pub fn parse_tree(text: &str) -> Result<Tree, ParseError> {
    let mut p = Parser::new(text);
    let tree = p.tree()?;
    p.finish()?;
    Ok(tree)
}

/// Parse a template; `?N` may appear at any child position or as the whole
/// template.
pub fn parse_template(text: &str) -> Result<Template, ParseError> {
    let mut p = Parser::new(text);
    let template = p.template()?;
    p.finish()?;
    Ok(template)
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text,
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        self.skip_trivia();
        match self.peek() {
            None => Ok(()),
            Some(_) => self.error("unexpected trailing input"),
        }
    }

    fn tree(&mut self) -> Result<Tree, ParseError> {
        self.skip_trivia();
        match self.peek() {
            Some('(') => {}
            Some('?') => return self.error("holes are not allowed in a concrete tree"),
            Some(c) => return self.error(format!("expected '(' but found {c:?}")),
            None => return self.error("unexpected end of input, expected '('"),
        }
        let (start, line, column) = (self.pos, self.line, self.column);
        self.bump();
        let kind = self.kind()?;
        let label = self.label()?;
        let mut children = Vec::new();
        loop {
            self.skip_trivia();
            match self.peek() {
                Some(')') => {
                    self.bump();
                    break;
                }
                None => return self.error("unbalanced parenthesis: missing ')'"),
                Some(_) => {
                    if label.is_some() {
                        return self.error("labels are only allowed on leaf nodes");
                    }
                    children.push(self.tree()?);
                }
            }
        }
        let span = Span {
            start,
            end: self.pos,
            line,
            column,
        };
        Ok(Tree::from_parts(kind, label, children).with_span(span))
    }

    fn template(&mut self) -> Result<Template, ParseError> {
        self.skip_trivia();
        match self.peek() {
            Some('?') => return self.hole().map(Template::Hole),
            Some('(') => {}
            Some(c) => return self.error(format!("expected '(' or hole but found {c:?}")),
            None => return self.error("unexpected end of input, expected '(' or hole"),
        }
        self.bump();
        let kind = self.kind()?;
        let label = self.label()?;
        let mut children = Vec::new();
        loop {
            self.skip_trivia();
            match self.peek() {
                Some(')') => {
                    self.bump();
                    break;
                }
                None => return self.error("unbalanced parenthesis: missing ')'"),
                Some(_) => {
                    if label.is_some() {
                        return self.error("labels are only allowed on leaf nodes");
                    }
                    children.push(self.template()?);
                }
            }
        }
        Ok(Template::Node {
            kind,
            label,
            children,
        })
    }

    fn hole(&mut self) -> Result<HoleId, ParseError> {
        self.bump();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        let digits = &self.text[start..self.pos];
        match digits.parse::<u32>() {
            Ok(n) if n > 0 => Ok(HoleId(n)),
            _ => self.error("expected a positive hole number after '?'"),
        }
    }

    fn kind(&mut self) -> Result<String, ParseError> {
        self.skip_trivia();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if is_atom_char(c)) {
            self.bump();
        }
        let kind = &self.text[start..self.pos];
        if kind.is_empty() {
            return self.error("expected a node kind");
        }
        if kind.starts_with('?') {
            return self.error("node kinds may not start with '?'");
        }
        Ok(kind.to_owned())
    }

    fn label(&mut self) -> Result<Option<String>, ParseError> {
        self.skip_trivia();
        if self.peek() != Some('"') {
            return Ok(None);
        }
        self.bump();
        let mut label = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(Some(label)),
                Some('\\') => match self.bump() {
                    Some(c @ ('"' | '\\')) => label.push(c),
                    Some(c) => return self.error(format!("invalid escape '\\{c}'")),
                    None => return self.error("unterminated label"),
                },
                Some(c) => label.push(c),
                None => return self.error("unterminated label"),
            }
        }
    }
}

fn is_atom_char(c: char) -> bool {
    !(c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';'))
}

fn write_label(f: &mut fmt::Formatter<'_>, label: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in label.chars() {
        if c == '"' || c == '\\' {
            f.write_char('\\')?;
        }
        f.write_char(c)?;
    }
    f.write_char('"')
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.kind())?;
        if let Some(label) = self.label() {
            f.write_char(' ')?;
            write_label(f, label)?;
        }
        for child in self.children() {
            write!(f, " {child}")?;
        }
        f.write_char(')')
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Template::Hole(h) => write!(f, "{h}"),
            Template::Node {
                kind,
                label,
                children,
            } => {
                write!(f, "({kind}")?;
                if let Some(label) = label {
                    f.write_char(' ')?;
                    write_label(f, label)?;
                }
                for child in children {
                    write!(f, " {child}")?;
                }
                f.write_char(')')
            }
        }
    }
}
