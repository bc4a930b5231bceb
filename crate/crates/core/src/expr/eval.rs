use super::{BinOp, DualScalar, ExprAst, ExprError, Func, Real};

fn domain(reason: &'static str, node: &ExprAst) -> ExprError {
    ExprError::Domain {
        reason,
        subexpr: node.to_string(),
    }
}

fn integer_exponent(v: f64) -> Option<i32> {
    (v.fract() == 0.0 && v.abs() <= i32::MAX as f64).then_some(v as i32)
}

/// Evaluate over any [`Real`] with coordinates seeded by `seed`.
pub(crate) fn eval_generic<R: Real>(ast: &ExprAst, coords: &[R; 3]) -> Result<R, ExprError> {
    let out = match ast {
        ExprAst::Num(v) => R::constant(*v),
        ExprAst::Var(v) => coords[v.index()],
        ExprAst::Neg(e) => -eval_generic(e, coords)?,
        ExprAst::Binary(op, a, b) => {
            let lhs = eval_generic(a, coords)?;
            let rhs = eval_generic(b, coords)?;
            match op {
                BinOp::Add => lhs + rhs,
                BinOp::Sub => lhs - rhs,
                BinOp::Mul => lhs * rhs,
                BinOp::Div => {
                    if rhs.value() == 0.0 {
                        return Err(domain("division by zero", ast));
                    }
                    lhs / rhs
                }
                BinOp::Pow => power(ast, lhs, rhs)?,
            }
        }
        ExprAst::Call(f, e) => {
            let arg = eval_generic(e, coords)?;
            let v = arg.value();
            match f {
                Func::Sin => arg.sin(),
                Func::Cos => arg.cos(),
                Func::Tan => arg.tan(),
                Func::Sinh => arg.sinh(),
                Func::Cosh => arg.cosh(),
                Func::Tanh => arg.tanh(),
                Func::Exp => arg.exp(),
                Func::Log => {
                    if v <= 0.0 {
                        return Err(domain("log of non-positive value", ast));
                    }
                    arg.ln()
                }
                Func::Sqrt => {
                    if v < 0.0 {
                        return Err(domain("sqrt of negative value", ast));
                    }
                    arg.sqrt()
                }
                Func::Abs => arg.abs(),
            }
        }
    };
    if !out.value().is_finite() {
        return Err(domain("non-finite result", ast));
    }
    Ok(out)
}

fn power<R: Real>(node: &ExprAst, base: R, exponent: R) -> Result<R, ExprError> {
    let b = base.value();
    let e = exponent.value();
    let varying = match node {
        ExprAst::Binary(_, _, rhs) => rhs.depends_on_coords(),
        _ => !exponent.is_constant(),
    };
    if !varying {
        if b == 0.0 && e < 0.0 {
            return Err(domain("zero raised to a negative power", node));
        }
        if let Some(n) = integer_exponent(e) {
            return Ok(base.powi(n));
        }
        if b < 0.0 {
            return Err(domain("non-integer power of negative base", node));
        }
        return Ok(base.powc(e));
    }
    // The exponent varies with the coordinates: a^b = exp(b ln a) needs a > 0.
    if b <= 0.0 {
        return Err(domain("variable exponent requires a positive base", node));
    }
    Ok(base.powf(exponent))
}

/// Evaluate at chart point `p` over plain reals.
pub fn eval_scalar(ast: &ExprAst, p: [f64; 3]) -> Result<f64, ExprError> {
    eval_generic(ast, &p)
}

/// Evaluate at `p` with exact first derivatives in the three coordinates.
pub fn eval_dual(ast: &ExprAst, p: [f64; 3]) -> Result<DualScalar, ExprError> {
    let seeds = [0, 1, 2].map(|i| DualScalar::coordinate(p[i], i));
    eval_generic(ast, &seeds)
}
