//! Recursive-descent parser for the metric expression language.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' expo)?
//! expo   := '-' expo | power
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```

use thiserror::Error;

use super::ast::{BinaryOp, Expr, UnaryOp};
use super::jet::MAX_DIM;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at offset {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("unknown identifier `{name}`")]
    UnknownIdentifier { name: String },
    #[error("function `{name}` takes 1 argument, got {found}")]
    ArityError { name: String, found: usize },
    #[error("dimension {0} outside 2..={MAX_DIM}")]
    BadDimension(usize),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    tokens: Vec<(Tok, usize)>,
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer {
            src,
            tokens: Vec::new(),
        };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_ascii_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || c == '.' {
                i = lx.number(i)?;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                lx.tokens.push((Tok::Ident(src[start..i].to_string()), start));
            } else if "+-*/^(),".contains(c) {
                lx.tokens.push((Tok::Sym(c), i));
                i += 1;
            } else {
                return Err(ParseError::SyntaxError {
                    position: i,
                    message: format!("unexpected character `{}`", src[i..].chars().next().unwrap()),
                });
            }
        }
        lx.tokens.push((Tok::End, src.len()));
        Ok(lx.tokens)
    }

    fn number(&mut self, start: usize) -> Result<usize, ParseError> {
        let bytes = self.src.as_bytes();
        let mut i = start;
        let digits = |i: &mut usize| {
            let s = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            *i - s
        };
        let mut count = digits(&mut i);
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            count += digits(&mut i);
        }
        if count == 0 {
            return Err(ParseError::SyntaxError {
                position: start,
                message: "malformed number".into(),
            });
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if digits(&mut j) == 0 {
                return Err(ParseError::SyntaxError {
                    position: i,
                    message: "malformed exponent".into(),
                });
            }
            i = j;
        }
        let value: f64 = self.src[start..i].parse().map_err(|_| ParseError::SyntaxError {
            position: start,
            message: "malformed number".into(),
        })?;
        self.tokens.push((Tok::Num(value), start));
        Ok(i)
    }
}

/// Parses expressions for a chart of fixed dimension. Coordinates are
/// `x0..x{n-1}`; optional aliases map extra names onto the same indices.
pub struct Parser<'a> {
    dimension: usize,
    aliases: &'a [String],
}

impl<'a> Parser<'a> {
    pub fn new(dimension: usize, aliases: &'a [String]) -> Result<Self, ParseError> {
        if !(2..=MAX_DIM).contains(&dimension) {
            return Err(ParseError::BadDimension(dimension));
        }
        Ok(Parser { dimension, aliases })
    }

    pub fn parse(&self, src: &str) -> Result<Expr, ParseError> {
        let tokens = Lexer::run(src)?;
        let mut st = State {
            parser: self,
            tokens,
            pos: 0,
        };
        if matches!(st.peek(), Tok::End) {
            return Err(st.error("empty expression"));
        }
        let e = st.expr()?;
        if !matches!(st.peek(), Tok::End) {
            return Err(st.error("unexpected trailing input"));
        }
        Ok(e)
    }

    fn resolve(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.aliases.iter().position(|a| a == name) {
            return Some(i);
        }
        let idx = name.strip_prefix('x')?;
        if idx.is_empty() || (idx.len() > 1 && idx.starts_with('0')) {
            return None;
        }
        idx.parse::<usize>().ok().filter(|&i| i < self.dimension)
    }
}

/// Parses `src` over coordinates `x0..x{dimension-1}`.
pub fn parse_expr(src: &str, dimension: usize) -> Result<Expr, ParseError> {
    Parser::new(dimension, &[])?.parse(src)
}

struct State<'p, 'a> {
    parser: &'p Parser<'a>,
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

impl State<'_, '_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: &str) -> ParseError {
        let message = match self.peek() {
            Tok::End => format!("{message} (end of input)"),
            _ => message.to_string(),
        };
        ParseError::SyntaxError {
            position: self.offset(),
            message,
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == &Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinaryOp::Add,
                Tok::Sym('-') => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('*') => BinaryOp::Mul,
                Tok::Sym('/') => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::binary(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            Ok(Expr::unary(UnaryOp::Neg, self.unary()?))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() != &Tok::Sym('^') {
            return Ok(base);
        }
        let caret = self.offset();
        self.bump();
        let exponent = self.exponent()?;
        if exponent.max_var().is_some() {
            return Err(ParseError::SyntaxError {
                position: caret,
                message: "exponent must be a constant".into(),
            });
        }
        Ok(Expr::binary(BinaryOp::Pow, base, exponent))
    }

    fn exponent(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            Ok(Expr::unary(UnaryOp::Neg, self.exponent()?))
        } else {
            self.power()
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                self.identifier(name)
            }
            _ => Err(self.error("expected a number, identifier or `(`")),
        }
    }

    fn identifier(&mut self, name: String) -> Result<Expr, ParseError> {
        let is_call = self.peek() == &Tok::Sym('(');
        if let Some(op) = UnaryOp::from_name(&name) {
            if !is_call {
                return Err(ParseError::ArityError { name, found: 0 });
            }
            self.bump();
            if self.eat(')') {
                return Err(ParseError::ArityError { name, found: 0 });
            }
            let mut args = vec![self.expr()?];
            while self.eat(',') {
                args.push(self.expr()?);
            }
            if !self.eat(')') {
                return Err(self.error("expected `)`"));
            }
            if args.len() != 1 {
                return Err(ParseError::ArityError {
                    name,
                    found: args.len(),
                });
            }
            return Ok(Expr::unary(op, args.pop().unwrap()));
        }
        if is_call {
            return Err(ParseError::UnknownIdentifier { name });
        }
        if name == "pi" {
            return Ok(Expr::Const(std::f64::consts::PI));
        }
        match self.parser.resolve(&name) {
            Some(i) => Ok(Expr::Var(i)),
            None => Err(ParseError::UnknownIdentifier { name }),
        }
    }
}
