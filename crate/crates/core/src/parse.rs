//! Text format for linear systems and for standalone operators.
//!
//! One equation per line, `#` starts a comment, `@key value` (or
//! `@option key value`) sets an option. Coefficients are rational
//! expressions in `x` and `y` built from integers with `+ - * / ^` and
//! parentheses; derivatives of the unknown are written `u_xxy`. Operators
//! use `Dx` and `Dy`, with `*` meaning composition.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::diffop::{coef_times, join_signed, DiffOp, Mono};
use crate::ratfield::{RatFunc, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}, column {col}: term is not linear in the unknown")]
    NonlinearTerm { line: usize, col: usize },
    #[error("line {line}, column {col}: unknown symbol `{name}`")]
    UnknownSymbol { line: usize, col: usize, name: String },
    #[error("line {line}: equation has a term free of the unknown")]
    Inhomogeneous { line: usize },
    #[error("document contains no equations")]
    Empty,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

fn tokenize(s: &str, line: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let txt: String = chars[st..i].iter().collect();
            out.push(Token {
                tok: Tok::Int(txt.parse().unwrap()),
                col,
            });
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[st..i].iter().collect()),
                col,
            });
        } else if "+-*/^()=".contains(c) {
            out.push(Token { tok: Tok::Sym(c), col });
            i += 1;
        } else {
            return Err(ParseError::Syntax {
                line,
                col,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Ast {
    Int(BigInt),
    Var(Var),
    U(Mono),
    D(Var),
    Neg(Box<Ast>),
    Bin(char, Box<Ast>, Box<Ast>, usize),
    Pow(Box<Ast>, u32, usize),
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    unknown: &'a str,
    eol_col: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.eol_col, |t| t.col)
    }

    fn err(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            col: self.col(),
            msg: msg.to_string(),
        }
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Sym(c @ ('+' | '-'))) = self.peek().cloned() {
            let col = self.col();
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Ast::Bin(c, Box::new(lhs), Box::new(rhs), col);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Sym(c @ ('*' | '/'))) = self.peek().cloned() {
            let col = self.col();
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Ast::Bin(c, Box::new(lhs), Box::new(rhs), col);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        match self.peek() {
            Some(Tok::Sym('-')) => {
                self.pos += 1;
                Ok(Ast::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Sym('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Sym('^')) = self.peek() {
            let col = self.col();
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    self.pos += 1;
                    let e: u32 = n.try_into().map_err(|_| self.err("exponent too large"))?;
                    return Ok(Ast::Pow(Box::new(base), e, col));
                }
                Some(Tok::Sym('(')) => {
                    // Allow `^(-2)` for negative powers of functions.
                    self.pos += 1;
                    let neg = matches!(self.peek(), Some(Tok::Sym('-')));
                    if neg {
                        self.pos += 1;
                    }
                    let Some(Tok::Int(n)) = self.peek().cloned() else {
                        return Err(self.err("expected integer exponent"));
                    };
                    self.pos += 1;
                    self.expect(')')?;
                    let e: u32 = n.try_into().map_err(|_| self.err("exponent too large"))?;
                    let p = Ast::Pow(Box::new(base), e, col);
                    return Ok(if neg {
                        Ast::Bin('/', Box::new(Ast::Int(BigInt::from(1))), Box::new(p), col)
                    } else {
                        p
                    });
                }
                _ => return Err(self.err("expected integer exponent")),
            }
        }
        Ok(base)
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Sym(d)) if *d == c => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(&format!("expected `{c}`"))),
        }
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Ast::Int(n))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "x" => Ok(Ast::Var(Var::X)),
                    "y" => Ok(Ast::Var(Var::Y)),
                    "Dx" => Ok(Ast::D(Var::X)),
                    "Dy" => Ok(Ast::D(Var::Y)),
                    _ => self.derivative(&name, col),
                }
            }
            Some(Tok::Sym(c)) => Err(self.err(&format!("unexpected `{c}`"))),
            None => Err(self.err("unexpected end of line")),
        }
    }

    fn derivative(&self, name: &str, col: usize) -> Result<Ast, ParseError> {
        let unknown = || ParseError::UnknownSymbol {
            line: self.line,
            col,
            name: name.to_string(),
        };
        if name == self.unknown {
            return Ok(Ast::U(Mono::ONE));
        }
        let Some(rest) = name.strip_prefix(self.unknown).and_then(|r| r.strip_prefix('_')) else {
            return Err(unknown());
        };
        if rest.is_empty() || !rest.chars().all(|c| c == 'x' || c == 'y') {
            return Err(unknown());
        }
        let dx = rest.chars().filter(|&c| c == 'x').count() as u32;
        Ok(Ast::U(Mono::new(dx, rest.len() as u32 - dx)))
    }
}

/// Value of an equation-side expression: `op[u] + rest`.
#[derive(Clone)]
struct Lin {
    op: DiffOp,
    rest: RatFunc,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Scalar,
    Operator,
    Equation,
}

struct Eval {
    line: usize,
    mode: Mode,
}

impl Eval {
    fn nonlinear(&self, col: usize) -> ParseError {
        ParseError::NonlinearTerm { line: self.line, col }
    }

    fn div_zero(&self, col: usize) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            col,
            msg: "division by zero".into(),
        }
    }

    fn unknown(&self, name: &str) -> ParseError {
        ParseError::UnknownSymbol {
            line: self.line,
            col: 1,
            name: name.into(),
        }
    }

    fn lin(&self, a: &Ast) -> Result<Lin, ParseError> {
        let scalar = |r: RatFunc| Lin {
            op: DiffOp::zero(),
            rest: r,
        };
        Ok(match a {
            Ast::Int(n) => scalar(RatFunc::constant(num_rational::BigRational::from_integer(n.clone()))),
            Ast::Var(v) => scalar(RatFunc::var(*v)),
            Ast::U(m) => {
                if self.mode != Mode::Equation {
                    return Err(self.unknown("u"));
                }
                Lin {
                    op: DiffOp::monomial(*m),
                    rest: RatFunc::zero(),
                }
            }
            Ast::D(v) => {
                if self.mode != Mode::Operator {
                    return Err(self.unknown(if *v == Var::X { "Dx" } else { "Dy" }));
                }
                let m = if *v == Var::X { Mono::new(1, 0) } else { Mono::new(0, 1) };
                Lin {
                    op: DiffOp::monomial(m),
                    rest: RatFunc::zero(),
                }
            }
            Ast::Neg(e) => {
                let v = self.lin(e)?;
                Lin {
                    op: v.op.neg(),
                    rest: -&v.rest,
                }
            }
            Ast::Bin(c, l, r, col) => {
                let a = self.lin(l)?;
                let b = self.lin(r)?;
                match c {
                    '+' => Lin {
                        op: a.op.add(&b.op),
                        rest: &a.rest + &b.rest,
                    },
                    '-' => Lin {
                        op: a.op.sub(&b.op),
                        rest: &a.rest - &b.rest,
                    },
                    '*' => self.mul(a, b, *col)?,
                    '/' => {
                        if !b.op.is_zero() {
                            return Err(self.nonlinear(*col));
                        }
                        let inv = b.rest.inv().map_err(|_| self.div_zero(*col))?;
                        Lin {
                            op: a.op.scale(&inv),
                            rest: &a.rest * &inv,
                        }
                    }
                    _ => unreachable!(),
                }
            }
            Ast::Pow(b, e, col) => {
                let base = self.lin(b)?;
                let mut acc = Lin {
                    op: DiffOp::zero(),
                    rest: RatFunc::one(),
                };
                for _ in 0..*e {
                    acc = self.mul(acc, base.clone(), *col)?;
                }
                acc
            }
        })
    }

    fn mul(&self, a: Lin, b: Lin, col: usize) -> Result<Lin, ParseError> {
        match self.mode {
            Mode::Operator => {
                let fa = a.op.add(&DiffOp::from_fn(a.rest));
                let fb = b.op.add(&DiffOp::from_fn(b.rest));
                let p = fa.mul(&fb);
                let rest = p.coeff(Mono::ONE);
                let mut op = p;
                op.remove(Mono::ONE);
                Ok(Lin { op, rest })
            }
            _ => {
                if !a.op.is_zero() && !b.op.is_zero() {
                    return Err(self.nonlinear(col));
                }
                if a.op.is_zero() {
                    Ok(Lin {
                        op: b.op.scale(&a.rest),
                        rest: &a.rest * &b.rest,
                    })
                } else {
                    Ok(Lin {
                        op: a.op.scale(&b.rest),
                        rest: &a.rest * &b.rest,
                    })
                }
            }
        }
    }
}

fn parse_expr(text: &str, line: usize, unknown: &str, mode: Mode) -> Result<Lin, ParseError> {
    let toks = tokenize(text, line)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        line,
        unknown,
        eol_col: text.chars().count() + 1,
    };
    let ast = p.expr()?;
    if p.pos != toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Eval { line, mode }.lin(&ast)
}

pub fn parse_ratfunc(text: &str) -> Result<RatFunc, ParseError> {
    Ok(parse_expr(text, 1, "u", Mode::Scalar)?.rest)
}

pub fn parse_operator(text: &str) -> Result<DiffOp, ParseError> {
    let v = parse_expr(text, 1, "u", Mode::Operator)?;
    Ok(v.op.add(&DiffOp::from_fn(v.rest)))
}

/// Parsed input file.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct InputDocument {
    pub unknown: String,
    pub equations: Vec<DiffOp>,
    pub options: BTreeMap<String, String>,
}

impl InputDocument {
    pub fn option_usize(&self, key: &str) -> Option<usize> {
        self.options.get(key).and_then(|v| v.parse().ok())
    }
}

pub fn parse_equation(text: &str, line: usize, unknown: &str) -> Result<DiffOp, ParseError> {
    let (l, r) = match text.split_once('=') {
        Some((l, r)) => (l, Some(r)),
        None => (text, None),
    };
    if r.is_some_and(|r| r.contains('=')) {
        let col = text.rfind('=').unwrap() + 1;
        return Err(ParseError::Syntax {
            line,
            col,
            msg: "more than one `=`".into(),
        });
    }
    let lhs = parse_expr(l, line, unknown, Mode::Equation)?;
    let lin = match r {
        Some(r) => {
            let off = l.chars().count() + 1;
            let rhs = parse_expr(r, line, unknown, Mode::Equation).map_err(|e| shift_col(e, off))?;
            Lin {
                op: lhs.op.sub(&rhs.op),
                rest: &lhs.rest - &rhs.rest,
            }
        }
        None => lhs,
    };
    if !lin.rest.is_zero() {
        return Err(ParseError::Inhomogeneous { line });
    }
    Ok(lin.op)
}

fn shift_col(e: ParseError, off: usize) -> ParseError {
    match e {
        ParseError::Syntax { line, col, msg } => ParseError::Syntax {
            line,
            col: col + off,
            msg,
        },
        ParseError::NonlinearTerm { line, col } => ParseError::NonlinearTerm { line, col: col + off },
        ParseError::UnknownSymbol { line, col, name } => ParseError::UnknownSymbol {
            line,
            col: col + off,
            name,
        },
        other => other,
    }
}

pub fn parse(text: &str) -> Result<InputDocument, ParseError> {
    let mut doc = InputDocument {
        unknown: "u".into(),
        ..Default::default()
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let t = body.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(d) = t.strip_prefix('@') {
            let mut words = d.split_whitespace();
            let mut key = words.next().unwrap_or("");
            if key == "option" {
                key = words.next().unwrap_or("");
            }
            let value: Vec<&str> = words.collect();
            if key.is_empty() || value.is_empty() {
                return Err(ParseError::Syntax {
                    line,
                    col: 1,
                    msg: "malformed directive".into(),
                });
            }
            let value = value.join(" ");
            if key == "unknown" {
                doc.unknown = value.clone();
            }
            doc.options.insert(key.to_string(), value);
            continue;
        }
        let lead = body.len() - body.trim_start().len();
        let op = parse_equation(t, line, &doc.unknown).map_err(|e| shift_col(e, lead))?;
        if !op.is_zero() {
            doc.equations.push(op);
        }
    }
    if doc.equations.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok(doc)
}

/// Writes an operator applied to the unknown, e.g. `u_xy - (1/x)*u`.
pub fn format_equation(op: &DiffOp, unknown: &str) -> String {
    if op.is_zero() {
        return "0".into();
    }
    let parts: Vec<String> = op
        .terms()
        .rev()
        .map(|(m, c)| {
            let name = if *m == Mono::ONE {
                unknown.to_string()
            } else {
                format!("{unknown}_{}{}", "x".repeat(m.dx as usize), "y".repeat(m.dy as usize))
            };
            coef_times(c, &name)
        })
        .collect();
    join_signed(&parts)
}

impl fmt::Display for InputDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.options {
            writeln!(f, "@option {k} {v}")?;
        }
        for e in &self.equations {
            writeln!(f, "{} = 0", format_equation(e, &self.unknown))?;
        }
        Ok(())
    }
}

pub fn print(doc: &InputDocument) -> String {
    doc.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_expression() {
        let r = parse_ratfunc("(3*x+6)/x^2").unwrap();
        assert_eq!(r.to_string(), "(3*x + 6)/x^2");
    }

    #[test]
    fn equation_moves_everything_left() {
        let op = parse_equation("u_xx = (x+1)*u_y - 2*u", 1, "u").unwrap();
        assert_eq!(format_equation(&op, "u"), "u_xx - (x + 1)*u_y + 2*u");
    }

    #[test]
    fn rejects_products_of_unknowns() {
        let e = parse_equation("u_x*u_y = 0", 3, "u").unwrap_err();
        assert!(matches!(e, ParseError::NonlinearTerm { line: 3, col: 4 }));
    }

    #[test]
    fn unknown_symbol_has_position() {
        let e = parse("u_xx = z*u\n").unwrap_err();
        assert_eq!(
            e,
            ParseError::UnknownSymbol {
                line: 1,
                col: 8,
                name: "z".into()
            }
        );
    }

    #[test]
    fn syntax_error_position() {
        let e = parse("# c\n  u_xx = (x + u\n").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { line: 2, .. }), "{e:?}");
    }

    #[test]
    fn operator_composition() {
        let a = parse_operator("Dx*x").unwrap();
        assert_eq!(a.to_string(), "x*Dx + 1");
    }

    #[test]
    fn directives() {
        let d = parse("@depth 10\n@option unknown w\nw_xy = 0\n").unwrap();
        assert_eq!(d.option_usize("depth"), Some(10));
        assert_eq!(d.unknown, "w");
        assert_eq!(d.equations.len(), 1);
    }
}
