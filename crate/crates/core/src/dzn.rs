//! A small subset of the MiniZinc data-file format.
//!
//! ```text
//! file      := (item)*
//! item      := IDENT '=' value ';'
//! value     := INT | 'true' | 'false' | set | list | matrix
//! set       := '{' [INT (',' INT)*] '}'
//! list      := '[' [value (',' value)*] ']'
//! matrix    := '[|' [row ('|' row)*] '|]'
//! row       := [INT (',' INT)*]
//! ```
//!
//! `%` starts a comment running to the end of the line. Trailing commas
//! are accepted inside lists and sets.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Set(Vec<i64>),
    List(Vec<Value>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct DznError {
    pub line: usize,
    pub message: String,
}

impl DznError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        Self { line, message: message.into() }
    }
}

const MAX_DEPTH: usize = 4;

/// Parsed assignments, each with the line it started on.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DznData {
    items: BTreeMap<String, (Value, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Eq,
    Semi,
    Comma,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    MatrixOpen,
    MatrixClose,
    Bar,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(v) => format!("integer {v}"),
        Tok::Eq => "`=`".into(),
        Tok::Semi => "`;`".into(),
        Tok::Comma => "`,`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::MatrixOpen => "`[|`".into(),
        Tok::MatrixClose => "`|]`".into(),
        Tok::Bar => "`|`".into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, DznError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut chars = text.char_indices().peekable();
    while let Some((i, ch)) = chars.next() {
        match ch {
            '\n' => line += 1,
            c if c.is_whitespace() => {}
            '%' => {
                while let Some(&(_, c)) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '=' => out.push((Tok::Eq, line)),
            ';' => out.push((Tok::Semi, line)),
            ',' => out.push((Tok::Comma, line)),
            ']' => out.push((Tok::RBracket, line)),
            '{' => out.push((Tok::LBrace, line)),
            '}' => out.push((Tok::RBrace, line)),
            '[' => {
                if chars.peek().is_some_and(|&(_, c)| c == '|') {
                    chars.next();
                    out.push((Tok::MatrixOpen, line));
                } else {
                    out.push((Tok::LBracket, line));
                }
            }
            '|' => {
                if chars.peek().is_some_and(|&(_, c)| c == ']') {
                    chars.next();
                    out.push((Tok::MatrixClose, line));
                } else {
                    out.push((Tok::Bar, line));
                }
            }
            '-' | '0'..='9' => {
                let mut end = i + ch.len_utf8();
                while let Some(&(j, c)) = chars.peek() {
                    if !c.is_ascii_digit() {
                        break;
                    }
                    end = j + 1;
                    chars.next();
                }
                let lit = &text[i..end];
                let v = lit
                    .parse::<i64>()
                    .map_err(|_| DznError::new(line, format!("invalid integer `{lit}`")))?;
                out.push((Tok::Int(v), line));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut end = i + 1;
                while let Some(&(j, c)) = chars.peek() {
                    if !(c.is_ascii_alphanumeric() || c == '_') {
                        break;
                    }
                    end = j + 1;
                    chars.next();
                }
                out.push((Tok::Ident(text[i..end].to_string()), line));
            }
            other => return Err(DznError::new(line, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    last_line: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).map_or(self.last_line, |t| t.1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t.map(|t| t.0)
    }

    fn expect(&mut self, want: Tok) -> Result<(), DznError> {
        let line = self.line();
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(DznError::new(line, format!("expected {}, found {}", describe(&want), describe(&t)))),
            None => Err(DznError::new(line, format!("expected {}, found end of input", describe(&want)))),
        }
    }

    fn int(&mut self) -> Result<i64, DznError> {
        let line = self.line();
        match self.next() {
            Some(Tok::Int(v)) => Ok(v),
            Some(t) => Err(DznError::new(line, format!("expected integer, found {}", describe(&t)))),
            None => Err(DznError::new(line, "expected integer, found end of input")),
        }
    }

    fn value(&mut self, depth: usize) -> Result<Value, DznError> {
        let line = self.line();
        if depth > MAX_DEPTH {
            return Err(DznError::new(line, "value nested too deeply"));
        }
        match self.next() {
            Some(Tok::Int(v)) => Ok(Value::Int(v)),
            Some(Tok::Ident(s)) if s == "true" => Ok(Value::Bool(true)),
            Some(Tok::Ident(s)) if s == "false" => Ok(Value::Bool(false)),
            Some(Tok::LBrace) => {
                let mut items = Vec::new();
                while self.peek() != Some(&Tok::RBrace) {
                    items.push(self.int()?);
                    if self.peek() == Some(&Tok::Comma) {
                        self.next();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::RBrace)?;
                Ok(Value::Set(items))
            }
            Some(Tok::LBracket) => {
                let mut items = Vec::new();
                while self.peek() != Some(&Tok::RBracket) {
                    items.push(self.value(depth + 1)?);
                    if self.peek() == Some(&Tok::Comma) {
                        self.next();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::RBracket)?;
                Ok(Value::List(items))
            }
            Some(Tok::MatrixOpen) => {
                let mut rows = Vec::new();
                let mut row = Vec::new();
                loop {
                    match self.peek() {
                        Some(Tok::MatrixClose) => {
                            self.next();
                            if !row.is_empty() || !rows.is_empty() {
                                rows.push(Value::List(std::mem::take(&mut row)));
                            }
                            break;
                        }
                        Some(Tok::Bar) => {
                            self.next();
                            rows.push(Value::List(std::mem::take(&mut row)));
                        }
                        Some(Tok::Comma) => {
                            self.next();
                        }
                        _ => row.push(Value::Int(self.int()?)),
                    }
                }
                Ok(Value::List(rows))
            }
            Some(t) => Err(DznError::new(line, format!("expected a value, found {}", describe(&t)))),
            None => Err(DznError::new(line, "expected a value, found end of input")),
        }
    }
}

pub fn parse(text: &str) -> Result<DznData, DznError> {
    let toks = tokenize(text)?;
    let last_line = toks.last().map_or(1, |t| t.1);
    let mut p = Parser { toks, pos: 0, last_line };
    let mut data = DznData::default();
    while p.peek().is_some() {
        let line = p.line();
        let key = match p.next() {
            Some(Tok::Ident(k)) => k,
            Some(t) => return Err(DznError::new(line, format!("expected a name, found {}", describe(&t)))),
            None => unreachable!(),
        };
        p.expect(Tok::Eq)?;
        let value = p.value(0)?;
        p.expect(Tok::Semi)?;
        if data.items.insert(key.clone(), (value, line)).is_some() {
            return Err(DznError::new(line, format!("`{key}` assigned twice")));
        }
    }
    Ok(data)
}

impl DznData {
    pub fn contains(&self, key: &str) -> bool {
        self.items.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.items.keys().map(String::as_str)
    }

    pub fn value(&self, key: &str) -> Option<&Value> {
        self.items.get(key).map(|v| &v.0)
    }

    /// Line of the assignment to `key`, 0 if absent.
    pub fn line(&self, key: &str) -> usize {
        self.items.get(key).map_or(0, |v| v.1)
    }

    fn get(&self, key: &str) -> Result<(&Value, usize), DznError> {
        self.items
            .get(key)
            .map(|(v, l)| (v, *l))
            .ok_or_else(|| DznError::new(0, format!("missing `{key}`")))
    }

    pub fn int(&self, key: &str) -> Result<i64, DznError> {
        match self.get(key)? {
            (Value::Int(v), _) => Ok(*v),
            (_, line) => Err(DznError::new(line, format!("`{key}` must be an integer"))),
        }
    }

    pub fn bool(&self, key: &str) -> Result<bool, DznError> {
        match self.get(key)? {
            (Value::Bool(b), _) => Ok(*b),
            (Value::Int(v @ (0 | 1)), _) => Ok(*v == 1),
            (_, line) => Err(DznError::new(line, format!("`{key}` must be a boolean"))),
        }
    }

    pub fn ints(&self, key: &str) -> Result<Vec<i64>, DznError> {
        let (v, line) = self.get(key)?;
        as_ints(v).ok_or_else(|| DznError::new(line, format!("`{key}` must be an array of integers")))
    }

    /// A 2-D array, as a list of rows or a `[| .. |]` matrix.
    pub fn matrix(&self, key: &str) -> Result<Vec<Vec<i64>>, DznError> {
        let (v, line) = self.get(key)?;
        let err = || DznError::new(line, format!("`{key}` must be a 2-D array of integers"));
        match v {
            Value::List(rows) => rows.iter().map(|r| as_ints(r).ok_or_else(err)).collect(),
            _ => Err(err()),
        }
    }

    /// An array of integer sets; rows written as lists are accepted too.
    pub fn sets(&self, key: &str) -> Result<Vec<Vec<i64>>, DznError> {
        let (v, line) = self.get(key)?;
        let err = || DznError::new(line, format!("`{key}` must be an array of sets"));
        match v {
            Value::List(rows) => rows
                .iter()
                .map(|r| match r {
                    Value::Set(s) => Ok(s.clone()),
                    other => as_ints(other).ok_or_else(err),
                })
                .collect(),
            _ => Err(err()),
        }
    }
}

fn as_ints(v: &Value) -> Option<Vec<i64>> {
    match v {
        Value::List(items) => items
            .iter()
            .map(|x| match x {
                Value::Int(i) => Some(*i),
                _ => None,
            })
            .collect(),
        _ => None,
    }
}

/// Builds data-file text in the same dialect.
#[derive(Debug, Clone, Default)]
pub struct DznWriter {
    out: String,
}

fn join(xs: &[i64]) -> String {
    xs.iter().map(i64::to_string).collect::<Vec<_>>().join(", ")
}

impl DznWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn comment(&mut self, text: &str) -> &mut Self {
        for line in text.lines() {
            let _ = writeln!(self.out, "% {line}");
        }
        self
    }

    pub fn int(&mut self, key: &str, v: i64) -> &mut Self {
        let _ = writeln!(self.out, "{key} = {v};");
        self
    }

    pub fn bool(&mut self, key: &str, v: bool) -> &mut Self {
        let _ = writeln!(self.out, "{key} = {v};");
        self
    }

    pub fn ints(&mut self, key: &str, xs: &[i64]) -> &mut Self {
        let _ = writeln!(self.out, "{key} = [{}];", join(xs));
        self
    }

    pub fn matrix(&mut self, key: &str, rows: &[Vec<i64>]) -> &mut Self {
        if rows.is_empty() {
            let _ = writeln!(self.out, "{key} = [];");
            return self;
        }
        let _ = writeln!(self.out, "{key} = [");
        for r in rows {
            let _ = writeln!(self.out, "  [{}],", join(r));
        }
        let _ = writeln!(self.out, "];");
        self
    }

    pub fn sets(&mut self, key: &str, rows: &[Vec<i64>]) -> &mut Self {
        let body: Vec<String> = rows.iter().map(|r| format!("{{{}}}", join(r))).collect();
        let _ = writeln!(self.out, "{key} = [{}];", body.join(", "));
        self
    }

    pub fn finish(&mut self) -> String {
        std::mem::take(&mut self.out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars_arrays_and_comments() {
        let d = parse("% header\nn = 3; % trailing\nxs = [1, -2, 3,];\nok = true;\n").unwrap();
        assert_eq!(d.int("n").unwrap(), 3);
        assert_eq!(d.ints("xs").unwrap(), vec![1, -2, 3]);
        assert!(d.bool("ok").unwrap());
        assert_eq!(d.line("xs"), 3);
    }

    #[test]
    fn matrices_in_both_spellings() {
        let d = parse("a = [[1, 2], [3, 4]];\nb = [| 1, 2 | 3, 4 |];\nc = [];\n").unwrap();
        assert_eq!(d.matrix("a").unwrap(), vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(d.matrix("b").unwrap(), d.matrix("a").unwrap());
        assert!(d.matrix("c").unwrap().is_empty());
    }

    #[test]
    fn sets_of_successors() {
        let d = parse("suc = [{2, 3}, {}, {3}];").unwrap();
        assert_eq!(d.sets("suc").unwrap(), vec![vec![2, 3], vec![], vec![3]]);
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse("a = 1;\nb = [1, 2;\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse("a = 1;\n\n a = 2;").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse("x = 99999999999999999999;").unwrap_err();
        assert!(e.message.contains("invalid integer"));
        let e = parse("x = 1").unwrap_err();
        assert!(e.message.contains("end of input"));
    }

    #[test]
    fn deep_nesting_rejected() {
        let text = format!("x = {}1{};", "[".repeat(100), "]".repeat(100));
        assert!(parse(&text).is_err());
    }

    #[test]
    fn missing_key_and_wrong_type() {
        let d = parse("n = [1];").unwrap();
        assert!(d.int("n").is_err());
        assert!(d.int("m").unwrap_err().message.contains("missing"));
    }

    #[test]
    fn writer_round_trip() {
        let text = DznWriter::new()
            .comment("generated")
            .int("n", 2)
            .ints("xs", &[1, -1])
            .matrix("m", &[vec![1, 2], vec![3, 4]])
            .sets("s", &[vec![2], vec![]])
            .bool("b", false)
            .finish();
        let d = parse(&text).unwrap();
        assert_eq!(d.int("n").unwrap(), 2);
        assert_eq!(d.ints("xs").unwrap(), vec![1, -1]);
        assert_eq!(d.matrix("m").unwrap(), vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(d.sets("s").unwrap(), vec![vec![2], vec![]]);
        assert!(!d.bool("b").unwrap());
    }
}
