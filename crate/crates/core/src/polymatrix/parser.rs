//! Recursive-descent parser for the polynomial input language.
//!
//! ```text
//! expr     := ('+'|'-')? term (('+'|'-') term)*
//! term     := factor ('*' factor)*
//! factor   := base ('^' uint)?
//! base     := rational | 'i' | var | '(' expr ')'
//! var      := 'x' uint | 't'
//! rational := int ('/' uint)?
//! ```
//!
//! Parsing produces an [`Ast`] that is then evaluated into a [`Target`]
//! ring. The system-matrix target accepts exactly the grammar above. Extended
//! targets (output re-parsing, witness latents) may additionally resolve the
//! symbol `pi`, function calls such as `exp(...)`, and general `/`.

use num_bigint::BigInt;

use crate::error::ParseError;
use crate::exactfield::{GaussianRational, Rational};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Decimal,
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut line, mut col) = (1usize, 1usize);
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            k += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            k += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, line: l0, col: c0 });
            k += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let digits: String = chars[start..k].iter().collect();
            let tok = if k < chars.len() && chars[k] == '.' {
                k += 1;
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
                Tok::Decimal
            } else {
                Tok::Int(digits.parse().expect("digits"))
            };
            col += k - start;
            out.push(Token { tok, line: l0, col: c0 });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            col += k - start;
            out.push(Token {
                tok: Tok::Ident(chars[start..k].iter().collect()),
                line: l0,
                col: c0,
            });
            continue;
        }
        return Err(ParseError::new(line, col, format!("unexpected character `{c}`")));
    }
    out.push(Token { tok: Tok::End, line, col });
    Ok(out)
}

/// Syntax tree node with its source position.
#[derive(Clone, Debug)]
pub struct Ast {
    kind: AstKind,
    line: usize,
    col: usize,
}

#[derive(Clone, Debug)]
enum AstKind {
    Num(Rational),
    Imag,
    Sym(String),
    Call(String, Box<Ast>),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, u32),
}

/// A ring into which parsed expressions are evaluated.
pub trait Target {
    type Value: Clone;

    fn constant(&self, c: GaussianRational) -> Self::Value;
    fn symbol(&self, name: &str) -> Result<Self::Value, String>;
    fn add(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn sub(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn mul(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn neg(&self, a: Self::Value) -> Self::Value;

    fn pow(&self, a: Self::Value, k: u32) -> Self::Value {
        let mut acc = self.constant(GaussianRational::one());
        for _ in 0..k {
            acc = self.mul(acc, a.clone());
        }
        acc
    }

    /// Whether `/` between arbitrary factors is part of this target's grammar.
    fn allows_division(&self) -> bool {
        false
    }

    fn div(&self, _a: Self::Value, _b: Self::Value) -> Result<Self::Value, String> {
        Err("division is only allowed inside rational literals".into())
    }

    fn call(&self, name: &str, _arg: Self::Value) -> Result<Self::Value, String> {
        Err(format!("unknown function `{name}`"))
    }
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    allow_div: bool,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, tok: &Token, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::new(tok.line, tok.col, msg))
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token, ParseError> {
        let t = self.bump();
        if t.tok == want {
            Ok(t)
        } else {
            self.err(&t, format!("expected {what}, found {}", describe(&t.tok)))
        }
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let start = self.peek().clone();
        let mut lhs = match start.tok {
            Tok::Minus => {
                self.bump();
                let t = self.term()?;
                node(AstKind::Neg(Box::new(t)), &start)
            }
            Tok::Plus => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            let op = self.peek().clone();
            match op.tok {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = node(AstKind::Add(Box::new(lhs), Box::new(rhs)), &op);
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = node(AstKind::Sub(Box::new(lhs), Box::new(rhs)), &op);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = self.peek().clone();
            match op.tok {
                Tok::Star => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = node(AstKind::Mul(Box::new(lhs), Box::new(rhs)), &op);
                }
                Tok::Slash if self.allow_div => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = node(AstKind::Div(Box::new(lhs), Box::new(rhs)), &op);
                }
                Tok::Slash => {
                    return self.err(&op, "division is only allowed inside rational literals");
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Ast, ParseError> {
        let base = self.base()?;
        let caret = self.peek().clone();
        if caret.tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let e = self.bump();
        let k = match &e.tok {
            Tok::Int(k) => k,
            _ => return self.err(&e, "exponent must be a non-negative integer"),
        };
        if self.peek().tok == Tok::Slash
            && matches!(self.toks.get(self.pos + 1).map(|t| &t.tok), Some(Tok::Int(_)))
        {
            return self.err(&e, "exponent must be a non-negative integer");
        }
        let k: u32 = match k.try_into() {
            Ok(k) => k,
            Err(_) => return self.err(&e, "exponent too large"),
        };
        Ok(node(AstKind::Pow(Box::new(base), k), &caret))
    }

    fn base(&mut self) -> Result<Ast, ParseError> {
        let t = self.bump();
        match &t.tok {
            Tok::Int(n) => {
                let n = n.clone();
                // `int / uint` is a single rational literal in every grammar
                if self.peek().tok == Tok::Slash {
                    if let Some(Tok::Int(d)) = self.toks.get(self.pos + 1).map(|x| &x.tok) {
                        let d = d.clone();
                        let slash = self.bump();
                        self.bump();
                        if d == BigInt::from(0) {
                            return self.err(&slash, "zero denominator in rational literal");
                        }
                        return Ok(node(AstKind::Num(Rational::new(n, d)), &t));
                    }
                }
                Ok(node(AstKind::Num(Rational::from_integer(n)), &t))
            }
            Tok::Decimal => self.err(&t, "decimal literals are not supported; write rationals as a/b"),
            Tok::Ident(name) if name == "i" => Ok(node(AstKind::Imag, &t)),
            Tok::Ident(name) => {
                let name = name.clone();
                if self.peek().tok == Tok::LParen {
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(node(AstKind::Call(name, Box::new(arg)), &t));
                }
                Ok(node(AstKind::Sym(name), &t))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            other => self.err(&t, format!("expected a number, variable or `(`, found {}", describe(other))),
        }
    }
}

fn node(kind: AstKind, at: &Token) -> Ast {
    Ast {
        kind,
        line: at.line,
        col: at.col,
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("number `{n}`"),
        Tok::Decimal => "decimal literal".into(),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBrack => "`[`".into(),
        Tok::RBrack => "`]`".into(),
        Tok::Comma => "`,`".into(),
        Tok::End => "end of input".into(),
    }
}

impl Ast {
    pub fn eval<T: Target>(&self, target: &T) -> Result<T::Value, ParseError> {
        let at = |msg: String| ParseError::new(self.line, self.col, msg);
        Ok(match &self.kind {
            AstKind::Num(r) => target.constant(GaussianRational::from_rational(r.clone())),
            AstKind::Imag => target.constant(GaussianRational::i()),
            AstKind::Sym(s) => target.symbol(s).map_err(at)?,
            AstKind::Call(name, arg) => {
                let a = arg.eval(target)?;
                target.call(name, a).map_err(at)?
            }
            AstKind::Neg(a) => target.neg(a.eval(target)?),
            AstKind::Add(a, b) => target.add(a.eval(target)?, b.eval(target)?),
            AstKind::Sub(a, b) => target.sub(a.eval(target)?, b.eval(target)?),
            AstKind::Mul(a, b) => target.mul(a.eval(target)?, b.eval(target)?),
            AstKind::Div(a, b) => target.div(a.eval(target)?, b.eval(target)?).map_err(at)?,
            AstKind::Pow(a, k) => target.pow(a.eval(target)?, *k),
        })
    }
}

fn finish(p: &Parser<'_>) -> Result<(), ParseError> {
    let t = p.peek();
    if t.tok != Tok::End {
        return p.err(t, format!("unexpected {} after expression", describe(&t.tok)));
    }
    Ok(())
}

/// Parse a single expression into a syntax tree.
pub fn parse_ast(src: &str, allow_division: bool) -> Result<Ast, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        allow_div: allow_division,
    };
    let ast = p.expr()?;
    finish(&p)?;
    Ok(ast)
}

/// Parse and evaluate one expression.
pub fn parse_with<T: Target>(src: &str, target: &T) -> Result<T::Value, ParseError> {
    parse_ast(src, target.allows_division())?.eval(target)
}

/// Parse a bracketed matrix `[[e11, e12], [e21, e22]]` into rows of trees.
pub fn parse_matrix_ast(src: &str, allow_division: bool) -> Result<Vec<Vec<Ast>>, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        allow_div: allow_division,
    };
    p.expect(Tok::LBrack, "`[`")?;
    let mut rows = Vec::new();
    loop {
        let open = p.expect(Tok::LBrack, "`[` opening a row")?;
        let mut row = vec![p.expr()?];
        while p.peek().tok == Tok::Comma {
            p.bump();
            row.push(p.expr()?);
        }
        p.expect(Tok::RBrack, "`]` or `,`")?;
        if let Some(first) = rows.first().map(Vec::len) {
            if row.len() != first {
                return p.err(
                    &open,
                    format!("row has {} entries, expected {first}", row.len()),
                );
            }
        }
        rows.push(row);
        let t = p.bump();
        match &t.tok {
            Tok::Comma => continue,
            Tok::RBrack => break,
            other => return p.err(&t, format!("expected `,` or `]`, found {}", describe(other))),
        }
    }
    finish(&p)?;
    Ok(rows)
}
