//! Arithmetic expressions over the chart coordinates `x1`, `x2`, `x3`.
//!
//! Expressions are used to define custom metrics, field components and
//! domain predicates. They evaluate over plain `f64` and over
//! [`DualScalar`] for exact first derivatives.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := unary ('^' factor)?
//! unary  := '-' unary | atom
//! atom   := number | variable | func '(' expr ')' | '(' expr ')'
//! ```

mod dual;
mod eval;
mod parser;

use std::fmt;

pub use dual::{DualScalar, Real};
pub use eval::{eval_dual, eval_scalar};
pub use parser::parse;

/// One of the three chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X1,
    X2,
    X3,
}

impl Var {
    pub fn index(self) -> usize {
        match self {
            Var::X1 => 0,
            Var::X2 => 1,
            Var::X3 => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X1 => "x1",
            Var::X2 => "x2",
            Var::X3 => "x3",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        match name {
            "x1" => Some(Var::X1),
            "x2" => Some(Var::X2),
            "x3" => Some(Var::X3),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
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

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 10] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Parsed expression tree. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Num(f64),
    Var(Var),
    Neg(Box<ExprAst>),
    Binary(BinOp, Box<ExprAst>, Box<ExprAst>),
    Call(Func, Box<ExprAst>),
}

impl ExprAst {
    pub fn num(v: f64) -> Self {
        ExprAst::Num(v)
    }

    pub fn var(v: Var) -> Self {
        ExprAst::Var(v)
    }

    pub fn neg(e: ExprAst) -> Self {
        ExprAst::Neg(Box::new(e))
    }

    pub fn binary(op: BinOp, lhs: ExprAst, rhs: ExprAst) -> Self {
        ExprAst::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(f: Func, arg: ExprAst) -> Self {
        ExprAst::Call(f, Box::new(arg))
    }

    /// True if the expression mentions any coordinate variable.
    pub fn depends_on_coords(&self) -> bool {
        match self {
            ExprAst::Num(_) => false,
            ExprAst::Var(_) => true,
            ExprAst::Neg(e) | ExprAst::Call(_, e) => e.depends_on_coords(),
            ExprAst::Binary(_, a, b) => a.depends_on_coords() || b.depends_on_coords(),
        }
    }
}

/// Canonical, fully parenthesised form. Re-parsing it yields an equal tree.
impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `{:?}` on f64 is the shortest string that round-trips.
            ExprAst::Num(v) => write!(f, "{v:?}"),
            ExprAst::Var(v) => f.write_str(v.name()),
            ExprAst::Neg(e) => write!(f, "(-{e})"),
            ExprAst::Binary(op, a, b) => write!(f, "({a}{}{b})", op.symbol()),
            ExprAst::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: expected one of [{}], found {found}", expected.join(", "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("domain error in `{subexpr}`: {reason}")]
    Domain { reason: &'static str, subexpr: String },
}
