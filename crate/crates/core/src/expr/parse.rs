//! Tokenizer and recursive-descent parser for the text grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' int)?          int may carry a sign, optionally in parens
//! atom   := integer | 't' | 'r' | 'x' digits | '(' expr ')'
//! ```
//!
//! `r` is an alias for `t`. The parser is also used for the list forms
//! (`(a, b, c)` points and `span[...]`), which is why it exposes its
//! token-level helpers to the rest of the crate.

use num_bigint::BigInt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ast {
    Int(BigInt),
    Eps,
    /// 1-based variable index.
    Var(usize),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i64),
}

impl Ast {
    /// Largest variable index used, 0 if none.
    pub fn max_var(&self) -> usize {
        match self {
            Ast::Int(_) | Ast::Eps => 0,
            Ast::Var(i) => *i,
            Ast::Neg(a) | Ast::Pow(a, _) => a.max_var(),
            Ast::Add(a, b) | Ast::Sub(a, b) | Ast::Mul(a, b) | Ast::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

pub(crate) struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

fn tokenize(src: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, column);
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
                column += 1;
            }
            out.push(Spanned {
                tok: Tok::Int(s.parse().expect("digits")),
                line: l0,
                column: c0,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_alphanumeric() || **d == '_') {
                s.push(d);
                chars.next();
                column += 1;
            }
            out.push(Spanned {
                tok: Tok::Ident(s),
                line: l0,
                column: c0,
            });
            continue;
        }
        if "+-*/^()[],".contains(c) {
            chars.next();
            column += 1;
            out.push(Spanned {
                tok: Tok::Sym(c),
                line: l0,
                column: c0,
            });
            continue;
        }
        return Err(Error::Parse {
            line: l0,
            column: c0,
            message: format!("unexpected character {c:?}"),
        });
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

impl Parser {
    pub fn new(src: &str) -> Result<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        let s = &self.toks[self.pos];
        Error::Parse {
            line: s.line,
            column: s.column,
            message: message.into(),
        }
    }

    pub fn at_sym(&self, c: char) -> bool {
        *self.peek() == Tok::Sym(c)
    }

    pub fn eat_sym(&mut self, c: char) -> bool {
        if self.at_sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    /// Consume the identifier `name` if it is next.
    pub fn eat_ident(&mut self, name: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(s) if s == name) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_int(&mut self) -> Result<BigInt> {
        match self.bump() {
            Tok::Int(n) => Ok(n),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.error("expected an integer"))
            }
        }
    }

    pub fn expect_end(&self) -> Result<()> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    pub fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_sym('+') {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_sym('-') {
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_sym('*') {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat_sym('/') {
                lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if self.eat_sym('-') {
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        if self.eat_sym('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        if !self.eat_sym('^') {
            return Ok(base);
        }
        let paren = self.eat_sym('(');
        let neg = if self.eat_sym('-') {
            true
        } else {
            self.eat_sym('+');
            false
        };
        let n = self.expect_int()?;
        if paren {
            self.expect_sym(')')?;
        }
        let n: i64 = n
            .try_into()
            .map_err(|_| self.error("exponent out of range"))?;
        Ok(Ast::Pow(Box::new(base), if neg { -n } else { n }))
    }

    fn atom(&mut self) -> Result<Ast> {
        let save = self.pos;
        match self.bump() {
            Tok::Int(n) => Ok(Ast::Int(n)),
            Tok::Ident(s) if s == "t" || s == "r" => Ok(Ast::Eps),
            Tok::Ident(s) if s.len() > 1 && s.starts_with('x') => {
                match s[1..].parse::<usize>() {
                    Ok(i) if i >= 1 && !s[1..].starts_with('0') => Ok(Ast::Var(i)),
                    _ => {
                        self.pos = save;
                        Err(self.error(format!("bad variable name {s:?}")))
                    }
                }
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Ident(s) => {
                self.pos = save;
                Err(self.error(format!("unknown identifier {s:?}")))
            }
            Tok::End => {
                self.pos = save;
                Err(self.error("unexpected end of input"))
            }
            _ => {
                self.pos = save;
                Err(self.error("expected a number, variable or '('"))
            }
        }
    }
}

/// Parse a complete expression.
pub fn parse_ast(src: &str) -> Result<Ast> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}
