use std::fmt;

use crate::error::{Error, Result};

use super::jet::Jet3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Atan,
    /// `flat(t) = exp(-1/t)` for `t > 0`, `0` otherwise. Smooth, with every
    /// derivative vanishing at the origin.
    Flat,
}

impl UnaryOp {
    pub const FUNCTIONS: [UnaryOp; 10] = [
        UnaryOp::Sin,
        UnaryOp::Cos,
        UnaryOp::Sinh,
        UnaryOp::Cosh,
        UnaryOp::Tanh,
        UnaryOp::Exp,
        UnaryOp::Log,
        UnaryOp::Sqrt,
        UnaryOp::Atan,
        UnaryOp::Flat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Sinh => "sinh",
            UnaryOp::Cosh => "cosh",
            UnaryOp::Tanh => "tanh",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Atan => "atan",
            UnaryOp::Flat => "flat",
        }
    }

    pub fn from_name(name: &str) -> Option<UnaryOp> {
        Self::FUNCTIONS.iter().copied().find(|op| op.name() == name)
    }

    /// Scalar evaluation.
    pub fn apply(self, x: f64) -> Result<f64> {
        Ok(match self {
            UnaryOp::Neg => -x,
            UnaryOp::Sin => x.sin(),
            UnaryOp::Cos => x.cos(),
            UnaryOp::Sinh => x.sinh(),
            UnaryOp::Cosh => x.cosh(),
            UnaryOp::Tanh => x.tanh(),
            UnaryOp::Exp => x.exp(),
            UnaryOp::Log => {
                if x <= 0.0 {
                    return Err(Error::Domain(format!("log of non-positive value {x}")));
                }
                x.ln()
            }
            UnaryOp::Sqrt => {
                if x <= 0.0 {
                    return Err(Error::Domain(format!("sqrt of non-positive value {x}")));
                }
                x.sqrt()
            }
            UnaryOp::Atan => x.atan(),
            UnaryOp::Flat => flat(x),
        })
    }
}

pub(crate) fn flat(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
        }
    }
}

/// Scalar expression over chart coordinates `x0..x{n-1}`.
///
/// The exponent of a [`BinaryOp::Pow`] node never contains a variable; the
/// parser rejects such input so jets stay single-valued.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(usize),
    Const(f64),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn unary(op: UnaryOp, arg: Expr) -> Expr {
        Expr::Unary(op, Box::new(arg))
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Var(i) => Some(*i),
            Expr::Const(_) => None,
            Expr::Unary(_, a) => a.max_var(),
            Expr::Binary(_, a, b) => match (a.max_var(), b.max_var()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    /// Value of a variable-free expression.
    pub fn constant_value(&self) -> Option<f64> {
        if self.max_var().is_some() {
            return None;
        }
        self.eval(&[]).ok()
    }

    /// Plain scalar evaluation, no derivatives.
    pub fn eval(&self, p: &[f64]) -> Result<f64> {
        match self {
            Expr::Var(i) => p
                .get(*i)
                .copied()
                .ok_or_else(|| Error::Domain(format!("variable x{i} outside point of length {}", p.len()))),
            Expr::Const(c) => Ok(*c),
            Expr::Unary(op, a) => op.apply(a.eval(p)?),
            Expr::Binary(op, a, b) => {
                let x = a.eval(p)?;
                match op {
                    BinaryOp::Add => Ok(x + b.eval(p)?),
                    BinaryOp::Sub => Ok(x - b.eval(p)?),
                    BinaryOp::Mul => Ok(x * b.eval(p)?),
                    BinaryOp::Div => {
                        let y = b.eval(p)?;
                        if y == 0.0 {
                            return Err(Error::Domain("division by zero".into()));
                        }
                        Ok(x / y)
                    }
                    BinaryOp::Pow => {
                        let c = b.eval(p)?;
                        match integer_exponent(c) {
                            Some(k) => {
                                if k < 0 && x == 0.0 {
                                    return Err(Error::Domain("negative power of zero".into()));
                                }
                                Ok(x.powi(k))
                            }
                            None => {
                                if x <= 0.0 {
                                    return Err(Error::Domain(format!(
                                        "non-integer power of non-positive base {x}"
                                    )));
                                }
                                Ok(x.powf(c))
                            }
                        }
                    }
                }
            }
        }
    }

    /// Value and all partial derivatives up to order three at `p`.
    pub fn eval_jet3(&self, p: &[f64]) -> Result<Jet3> {
        let n = p.len();
        match self {
            Expr::Var(i) => {
                if *i >= n {
                    return Err(Error::Domain(format!("variable x{i} outside point of length {n}")));
                }
                Ok(Jet3::variable(n, *i, p[*i]))
            }
            Expr::Const(c) => Ok(Jet3::constant(n, *c)),
            Expr::Unary(op, a) => a.eval_jet3(p)?.unary(*op),
            Expr::Binary(op, a, b) => {
                let x = a.eval_jet3(p)?;
                match op {
                    BinaryOp::Pow => {
                        let c = b
                            .constant_value()
                            .ok_or_else(|| Error::Domain("exponent is not constant".into()))?;
                        x.pow_const(c)
                    }
                    _ => x.binary(*op, &b.eval_jet3(p)?),
                }
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Var(_) => PREC_ATOM,
            Expr::Const(_) => PREC_ATOM,
            Expr::Unary(UnaryOp::Neg, _) => PREC_UNARY,
            Expr::Unary(_, _) => PREC_ATOM,
            Expr::Binary(BinaryOp::Add | BinaryOp::Sub, _, _) => PREC_SUM,
            Expr::Binary(BinaryOp::Mul | BinaryOp::Div, _, _) => PREC_PRODUCT,
            Expr::Binary(BinaryOp::Pow, _, _) => PREC_POWER,
        }
    }
}

const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POWER: u8 = 4;
const PREC_ATOM: u8 = 5;

pub(crate) fn integer_exponent(c: f64) -> Option<i32> {
    if c.fract() == 0.0 && c.abs() <= 1024.0 {
        Some(c as i32)
    } else {
        None
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Canonical form: minimal parentheses, re-parses to an identical tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Const(c) => {
                if c.is_sign_negative() {
                    // the parser never builds negative literals; keep them atomic
                    write!(f, "(-{})", -c)
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Unary(UnaryOp::Neg, a) => {
                f.write_str("-")?;
                write_child(f, a, PREC_UNARY)
            }
            Expr::Unary(op, a) => write!(f, "{}({a})", op.name()),
            Expr::Binary(op, a, b) => {
                let (lhs_min, rhs_min) = match op {
                    BinaryOp::Add | BinaryOp::Sub => (PREC_SUM, PREC_PRODUCT),
                    BinaryOp::Mul | BinaryOp::Div => (PREC_PRODUCT, PREC_UNARY),
                    // right-associative; the exponent may carry unary minus
                    BinaryOp::Pow => (PREC_ATOM, PREC_UNARY),
                };
                write_child(f, a, lhs_min)?;
                match op {
                    BinaryOp::Pow => f.write_str("^")?,
                    _ => write!(f, " {} ", op.symbol())?,
                }
                write_child(f, b, rhs_min)
            }
        }
    }
}
