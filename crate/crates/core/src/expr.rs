//! Closed-form scalar expressions of one variable `x`.
//!
//! Coefficient fields in scenario files are written as expressions such as
//! `(cos(2*pi*x)+2)^2`. The grammar is deliberately small:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | 'x' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func    := cos | sin | exp | ln | sqrt | abs
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-2^2`
//! is `-4`. There is no implicit multiplication.

use std::fmt;

use thiserror::Error;

use crate::grid::{GridSpec, ScalarField};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("domain error: {message} (x = {x})")]
    Domain { x: f64, message: String },
    #[error("domain error at node {node}: {message} (x = {x})")]
    DomainAtNode { node: usize, x: f64, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Cos,
    Sin,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "cos" => Func::Cos,
            "sin" => Func::Sin,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Cos => "cos",
            Func::Sin => "sin",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

/// Abstract syntax tree of a parsed expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Num(f64),
    X,
    Pi,
    Neg(Box<Expression>),
    Binary(BinOp, Box<Expression>, Box<Expression>),
    Call(Func, Box<Expression>),
}

impl Expression {
    pub fn binary(op: BinOp, lhs: Expression, rhs: Expression) -> Self {
        Expression::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(f: Func, arg: Expression) -> Self {
        Expression::Call(f, Box::new(arg))
    }

    /// Evaluates the tree at `x` in IEEE double arithmetic.
    pub fn evaluate(&self, x: f64) -> Result<f64, ExprError> {
        let v = self.eval_inner(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ExprError::Domain {
                x,
                message: "non-finite result".into(),
            })
        }
    }

    fn eval_inner(&self, x: f64) -> Result<f64, ExprError> {
        let domain = |message: &str| ExprError::Domain {
            x,
            message: message.to_string(),
        };
        Ok(match self {
            Expression::Num(v) => *v,
            Expression::X => x,
            Expression::Pi => std::f64::consts::PI,
            Expression::Neg(e) => -e.eval_inner(x)?,
            Expression::Binary(op, a, b) => {
                let a = a.eval_inner(x)?;
                let b = b.eval_inner(x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(domain("division by zero"));
                        }
                        a / b
                    }
                    BinOp::Pow => {
                        if a < 0.0 && b.fract() != 0.0 {
                            return Err(domain("non-integer power of a negative base"));
                        }
                        if a == 0.0 && b < 0.0 {
                            return Err(domain("negative power of zero"));
                        }
                        a.powf(b)
                    }
                }
            }
            Expression::Call(f, arg) => {
                let a = arg.eval_inner(x)?;
                match f {
                    Func::Cos => a.cos(),
                    Func::Sin => a.sin(),
                    Func::Exp => a.exp(),
                    Func::Ln => {
                        if a <= 0.0 {
                            return Err(domain("ln of a non-positive argument"));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(domain("sqrt of a negative argument"));
                        }
                        a.sqrt()
                    }
                    Func::Abs => a.abs(),
                }
            }
        })
    }

    /// Samples the expression at every node of `grid`.
    pub fn sample(&self, grid: &GridSpec) -> Result<ScalarField, ExprError> {
        let values = (0..=grid.n_cells())
            .map(|i| {
                let x = grid.node(i);
                self.evaluate(x).map_err(|e| match e {
                    ExprError::Domain { x, message } => ExprError::DomainAtNode {
                        node: i,
                        x,
                        message,
                    },
                    other => other,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ScalarField::new(*grid, values).expect("one value per node"))
    }
}

/// Prints in fully parenthesised form; the output parses back to an
/// equivalent tree.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Num(v) => write!(f, "{v:?}"),
            Expression::X => f.write_str("x"),
            Expression::Pi => f.write_str("pi"),
            Expression::Neg(e) => write!(f, "(-{e})"),
            Expression::Binary(op, a, b) => write!(f, "({a}{}{b})", op.symbol()),
            Expression::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

impl std::str::FromStr for Expression {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn syntax(position: usize, message: impl Into<String>) -> ExprError {
    ExprError::Syntax {
        position,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if !c.is_ascii() {
            return Err(syntax(i, "non-ASCII character"));
        }
        match c {
            b' ' | b'\t' => i += 1,
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit = &text[start..i];
                let v: f64 = lit
                    .parse()
                    .map_err(|_| syntax(start, format!("malformed number '{lit}'")))?;
                tokens.push((start, Token::Num(v)));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push((start, Token::Ident(text[start..i].to_string())));
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                tokens.push((i, Token::Op(c as char)));
                i += 1;
            }
            b'(' => {
                tokens.push((i, Token::LParen));
                i += 1;
            }
            b')' => {
                tokens.push((i, Token::RParen));
                i += 1;
            }
            _ => return Err(syntax(i, format!("unexpected character '{}'", c as char))),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expression, ExprError> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.bump();
            lhs = Expression::binary(op, lhs, self.term()?);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expression, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(Token::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.bump();
            lhs = Expression::binary(op, lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expression, ExprError> {
        if let Some(Token::Op('-')) = self.peek() {
            self.bump();
            return Ok(Expression::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expression, ExprError> {
        let base = self.primary()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expression::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn expect_rparen(&mut self, open_at: usize) -> Result<(), ExprError> {
        match self.peek() {
            Some(Token::RParen) => {
                self.bump();
                Ok(())
            }
            _ => Err(syntax(
                self.offset(),
                format!("expected ')' to close '(' at offset {open_at}"),
            )),
        }
    }

    fn primary(&mut self) -> Result<Expression, ExprError> {
        let at = self.offset();
        match self.bump() {
            Some(Token::Num(v)) => Ok(Expression::Num(v)),
            Some(Token::Ident(name)) => match name.as_str() {
                "x" => Ok(Expression::X),
                "pi" => Ok(Expression::Pi),
                _ => {
                    let Some(func) = Func::from_name(&name) else {
                        return Err(syntax(at, format!("unknown identifier '{name}'")));
                    };
                    let open_at = self.offset();
                    if self.bump() != Some(Token::LParen) {
                        return Err(syntax(open_at, format!("expected '(' after '{name}'")));
                    }
                    let arg = self.expr()?;
                    self.expect_rparen(open_at)?;
                    Ok(Expression::call(func, arg))
                }
            },
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect_rparen(at)?;
                Ok(inner)
            }
            Some(Token::RParen) => Err(syntax(at, "unbalanced ')'")),
            Some(Token::Op(c)) => Err(syntax(at, format!("unexpected operator '{c}'"))),
            None => Err(syntax(at, "unexpected end of input")),
        }
    }
}

/// Parses `text` into an [`Expression`].
pub fn parse(text: &str) -> Result<Expression, ExprError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.pos < p.tokens.len() {
        let msg = match p.peek() {
            Some(Token::RParen) => "unbalanced ')'".to_string(),
            _ => "unexpected trailing input".to_string(),
        };
        return Err(syntax(p.offset(), msg));
    }
    Ok(e)
}
