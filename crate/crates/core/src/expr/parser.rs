//! Recursive-descent parser for the function language.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := ('-')? atom
//! atom   := number | ident | ident '(' expr (',' expr)? ')' | '(' expr ')'
//! ```
//!
//! `x` and `t` both name the single free variable; an expression may use
//! one or the other but not both.

use super::{Func, Node};
use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            c if c.is_ascii_digit() || c == '.' => {
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // optional exponent, only when digits follow
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lexeme: String = chars[start..i].iter().collect();
                let value = lexeme
                    .parse::<f64>()
                    .map_err(|_| ParseError::new(start, format!("malformed number '{lexeme}'")))?;
                out.push(Token {
                    tok: Tok::Num(value),
                    pos: start,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    pos: start,
                });
                continue;
            }
            other => {
                return Err(ParseError::new(
                    start,
                    format!("unexpected character '{other}'"),
                ));
            }
        };
        out.push(Token { tok, pos: start });
        i += 1;
    }
    out.push(Token {
        tok: Tok::End,
        pos: chars.len(),
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    var: Option<char>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.idx]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.idx].clone();
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        let t = self.bump();
        if t.tok == want {
            Ok(())
        } else {
            Err(ParseError::new(t.pos, format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            self.reject_juxtaposition()?;
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Node::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn reject_juxtaposition(&self) -> Result<(), ParseError> {
        let t = self.peek();
        match t.tok {
            Tok::Num(_) | Tok::Ident(_) | Tok::LParen => Err(ParseError::new(
                t.pos,
                "implicit multiplication is not allowed; use '*'",
            )),
            _ => Ok(()),
        }
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            let inner = self.atom()?;
            return Ok(match inner {
                Node::Const(c) => Node::Const(-c),
                other => Node::Neg(Box::new(other)),
            });
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Num(v) => Ok(Node::Const(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Ident(name) => self.ident(name, t.pos),
            Tok::End => Err(ParseError::new(t.pos, "unexpected end of input")),
            Tok::RParen => Err(ParseError::new(t.pos, "unbalanced ')'")),
            _ => Err(ParseError::new(
                t.pos,
                "expected a number, identifier or '('",
            )),
        }
    }

    fn ident(&mut self, name: String, pos: usize) -> Result<Node, ParseError> {
        let func = match name.as_str() {
            "x" | "t" => {
                let v = name.chars().next().unwrap();
                match self.var {
                    Some(existing) if existing != v => {
                        return Err(ParseError::new(
                            pos,
                            format!("variable '{v}' mixed with '{existing}'"),
                        ))
                    }
                    _ => self.var = Some(v),
                }
                return Ok(Node::Var);
            }
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "abs" => Some(Func::Abs),
            "pow" => None,
            _ => return Err(ParseError::new(pos, format!("unknown identifier '{name}'"))),
        };
        if self.peek().tok != Tok::LParen {
            return Err(ParseError::new(
                pos,
                format!("'{name}' must be called with '('"),
            ));
        }
        let open = self.bump().pos;
        let (args, close) = self.arguments(open)?;
        let want = if func.is_some() { 1 } else { 2 };
        if args.len() != want {
            return Err(ParseError::new(
                pos,
                format!("'{name}' takes {want} argument(s), got {}", args.len()),
            ));
        }
        let mut args = args.into_iter();
        let first = args.next().unwrap();
        match func {
            Some(f) => Ok(Node::Call(f, Box::new(first))),
            None => {
                let exponent = args.next().unwrap();
                if exponent.has_var() {
                    return Err(ParseError::new(close, "pow exponent must be a constant"));
                }
                let c = exponent.eval_const();
                if !c.is_finite() {
                    return Err(ParseError::new(close, "pow exponent is not finite"));
                }
                Ok(Node::Pow(Box::new(first), c))
            }
        }
    }

    /// Parses `expr (',' expr)? ')'`, returning the arguments and the
    /// position of the closing parenthesis.
    fn arguments(&mut self, open: usize) -> Result<(Vec<Node>, usize), ParseError> {
        let mut args = vec![self.expr()?];
        loop {
            let t = self.bump();
            match t.tok {
                Tok::Comma => args.push(self.expr()?),
                Tok::RParen => return Ok((args, t.pos)),
                Tok::End => return Err(ParseError::new(open, "unbalanced '('")),
                _ => return Err(ParseError::new(t.pos, "expected ',' or ')'")),
            }
        }
    }
}

/// Parses `text`, returning the tree and the variable letter it uses.
pub(super) fn parse(text: &str) -> Result<(Node, char), ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        idx: 0,
        var: None,
    };
    let root = p.expr()?;
    let t = p.peek();
    match t.tok {
        Tok::End => Ok((root, p.var.unwrap_or('x'))),
        Tok::RParen => Err(ParseError::new(t.pos, "unbalanced ')'")),
        _ => Err(ParseError::new(t.pos, "unexpected trailing input")),
    }
}
