//! Closed-form bound expressions over exact rationals, e.g. `2n - 1`,
//! `n/(1 + (n-1)*eps)` or `2*floor(n/m) - 1`.
//!
//! Supports `+ - * /`, integer powers `^`, parentheses, implicit
//! multiplication after a number or `)` (`2n`, `2(n-1)`), and the functions
//! `floor`, `ceil`, `min`, `max`. Identifiers are looked up in the variable
//! map; an uppercase name falls back to its lowercase form, and `ε` is an
//! alias of `eps`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Rational;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational),
    Var(String),
    Neg(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Floor,
    Ceil,
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(i64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let text: String = chars[start..k].iter().collect();
            let v = text
                .parse()
                .map_err(|_| Error::Parse(format!("number {text} too large")))?;
            out.push(Token::Num(v));
        } else if c.is_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].is_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            out.push(Token::Ident(chars[start..k].iter().collect()));
        } else {
            out.push(match c {
                '+' | '-' | '*' | '/' | '^' => Token::Op(c),
                '(' => Token::LParen,
                ')' => Token::RParen,
                ',' => Token::Comma,
                _ => {
                    return Err(Error::Parse(format!(
                        "unexpected character {c:?} in {src:?}"
                    )))
                }
            });
            k += 1;
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Token) -> Result<()> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            other => Err(Error::Parse(format!("expected {want:?}, found {other:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == '+' { Op::Add } else { Op::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Token::Op('*')) => Op::Mul,
                Some(Token::Op('/')) => Op::Div,
                Some(Token::Ident(_)) | Some(Token::LParen) | Some(Token::Num(_)) => {
                    // implicit multiplication: `2n`, `2(n-1)`, `(a+1)a`
                    let rhs = self.unary()?;
                    lhs = Expr::Bin(Op::Mul, Box::new(lhs), Box::new(rhs));
                    continue;
                }
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if let Some(Token::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Expr::Num(Rational::from_integer(v))),
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            Some(Token::Ident(name)) => {
                let func = match name.as_str() {
                    "floor" => Some(Func::Floor),
                    "ceil" => Some(Func::Ceil),
                    "min" => Some(Func::Min),
                    "max" => Some(Func::Max),
                    _ => None,
                };
                match func {
                    Some(f) => {
                        self.expect(Token::LParen)?;
                        let mut args = vec![self.expr()?];
                        while let Some(Token::Comma) = self.peek() {
                            self.pos += 1;
                            args.push(self.expr()?);
                        }
                        self.expect(Token::RParen)?;
                        let arity_ok = match f {
                            Func::Floor | Func::Ceil => args.len() == 1,
                            Func::Min | Func::Max => !args.is_empty(),
                        };
                        if !arity_ok {
                            return Err(Error::Parse(format!("wrong argument count for {name}")));
                        }
                        Ok(Expr::Call(f, args))
                    }
                    None => Ok(Expr::Var(name)),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(src: &str) -> Result<Self> {
        let mut p = Parser {
            tokens: tokenize(src)?,
            pos: 0,
        };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!("trailing input in {src:?}")));
        }
        Ok(e)
    }
}

impl Expr {
    pub fn eval(&self, vars: &BTreeMap<String, Rational>) -> Result<Rational> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Var(name) => lookup(vars, name)?,
            Expr::Neg(e) => -e.eval(vars)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(vars)?, b.eval(vars)?);
                match op {
                    Op::Add => a + b,
                    Op::Sub => a - b,
                    Op::Mul => a * b,
                    Op::Div => {
                        if b.is_zero() {
                            return Err(Error::Parse("division by zero in bound".into()));
                        }
                        a / b
                    }
                    Op::Pow => {
                        let exp = b
                            .is_integer()
                            .then(|| b.to_integer().to_i32())
                            .flatten()
                            .ok_or_else(|| {
                                Error::Parse(format!("exponent {b} is not a small integer"))
                            })?;
                        if a.is_zero() && exp < 0 {
                            return Err(Error::Parse("division by zero in bound".into()));
                        }
                        let mut acc = Rational::one();
                        for _ in 0..exp.abs() {
                            acc *= a;
                        }
                        if exp.is_negative() {
                            acc.recip()
                        } else {
                            acc
                        }
                    }
                }
            }
            Expr::Call(f, args) => {
                let vals = args
                    .iter()
                    .map(|a| a.eval(vars))
                    .collect::<Result<Vec<_>>>()?;
                match f {
                    Func::Floor => vals[0].floor(),
                    Func::Ceil => vals[0].ceil(),
                    Func::Min => vals.into_iter().min().expect("arity checked"),
                    Func::Max => vals.into_iter().max().expect("arity checked"),
                }
            }
        })
    }
}

fn lookup(vars: &BTreeMap<String, Rational>, name: &str) -> Result<Rational> {
    let alias = match name {
        "ε" | "epsilon" => "eps",
        other => other,
    };
    vars.get(alias)
        .or_else(|| vars.get(&alias.to_lowercase()))
        .copied()
        .ok_or_else(|| Error::Parse(format!("unknown variable {name:?} in bound")))
}

/// Parses and evaluates `src` in one step.
pub fn evaluate(src: &str, vars: &BTreeMap<String, Rational>) -> Result<Rational> {
    src.parse::<Expr>()?.eval(vars)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(name) => write!(f, "{name}"),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Bin(op, a, b) => {
                let sym = match op {
                    Op::Add => "+",
                    Op::Sub => "-",
                    Op::Mul => "*",
                    Op::Div => "/",
                    Op::Pow => "^",
                };
                write!(f, "({a} {sym} {b})")
            }
            Expr::Call(func, args) => {
                let name = match func {
                    Func::Floor => "floor",
                    Func::Ceil => "ceil",
                    Func::Min => "min",
                    Func::Max => "max",
                };
                let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                write!(f, "{name}({})", args.join(", "))
            }
        }
    }
}
