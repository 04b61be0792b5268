//! Arithmetic expression trees for user-supplied immersions.
//!
//! The JSON form is a prefix tree: a number is a constant, a string `"u0"`,
//! `"u1"`, … is a parameter coordinate (`"pi"` is also accepted), and an
//! array `[op, arg, …]` applies one of `+ - * / pow sin cos exp sqrt`.
//! `+` and `*` take any number of arguments and `-` with one argument is
//! negation.
//!
//! Evaluation is generic over dual numbers so the same tree yields values,
//! gradients and Hessians.

use num_dual::DualNum;
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Neg(Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
    Sqrt(Box<Expr>),
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Input(format!("expression: {}", msg.into()))
}

impl Expr {
    pub fn parse(v: &Value) -> Result<Expr> {
        match v {
            Value::Number(n) => n.as_f64().map(Expr::Const).ok_or_else(|| bad("number out of range")),
            Value::String(s) if s == "pi" => Ok(Expr::Const(std::f64::consts::PI)),
            Value::String(s) => s
                .strip_prefix('u')
                .and_then(|i| i.parse().ok())
                .map(Expr::Var)
                .ok_or_else(|| bad(format!("unknown symbol {s:?}"))),
            Value::Array(items) => {
                let (op, args) = items.split_first().ok_or_else(|| bad("empty application"))?;
                let op = op.as_str().ok_or_else(|| bad("operator must be a string"))?;
                let args = args.iter().map(Expr::parse).collect::<Result<Vec<_>>>()?;
                Self::apply(op, args)
            }
            other => Err(bad(format!("unexpected value {other}"))),
        }
    }

    fn apply(op: &str, mut args: Vec<Expr>) -> Result<Expr> {
        let arity = |n: usize, args: &Vec<Expr>| {
            if args.len() == n {
                Ok(())
            } else {
                Err(bad(format!("{op} expects {n} argument(s), got {}", args.len())))
            }
        };
        let unary = |args: &mut Vec<Expr>| Box::new(args.pop().unwrap());
        let binary = |args: &mut Vec<Expr>| {
            let b = args.pop().unwrap();
            let a = args.pop().unwrap();
            (Box::new(a), Box::new(b))
        };
        Ok(match op {
            "+" if !args.is_empty() => Expr::Add(args),
            "*" if !args.is_empty() => Expr::Mul(args),
            "-" if args.len() == 1 => Expr::Neg(unary(&mut args)),
            "-" => {
                arity(2, &args)?;
                let (a, b) = binary(&mut args);
                Expr::Sub(a, b)
            }
            "/" => {
                arity(2, &args)?;
                let (a, b) = binary(&mut args);
                Expr::Div(a, b)
            }
            "pow" => {
                arity(2, &args)?;
                let (a, b) = binary(&mut args);
                Expr::Pow(a, b)
            }
            "sin" | "cos" | "exp" | "sqrt" => {
                arity(1, &args)?;
                let a = unary(&mut args);
                match op {
                    "sin" => Expr::Sin(a),
                    "cos" => Expr::Cos(a),
                    "exp" => Expr::Exp(a),
                    _ => Expr::Sqrt(a),
                }
            }
            "+" | "*" => return Err(bad(format!("{op} needs at least one argument"))),
            _ => return Err(bad(format!("unknown operator {op:?}"))),
        })
    }

    /// Number of parameter coordinates the expression refers to.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().map(Expr::arity).max().unwrap_or(0),
            Expr::Neg(a) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) | Expr::Sqrt(a) => a.arity(),
            Expr::Sub(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => a.arity().max(b.arity()),
        }
    }

    pub fn eval<D: DualNum<Primitive = f64>>(&self, u: &[D]) -> D {
        match self {
            Expr::Const(c) => D::from(*c),
            Expr::Var(i) => u[*i].clone(),
            Expr::Add(xs) => xs.iter().map(|x| x.eval(u)).sum(),
            Expr::Mul(xs) => xs.iter().map(|x| x.eval(u)).product(),
            Expr::Neg(a) => -a.eval(u),
            Expr::Sub(a, b) => a.eval(u) - b.eval(u),
            Expr::Div(a, b) => a.eval(u) / b.eval(u),
            Expr::Pow(a, b) => match **b {
                Expr::Const(c) if c.fract() == 0.0 && c.abs() <= i32::MAX as f64 => a.eval(u).powi(c as i32),
                Expr::Const(c) => a.eval(u).powf(c),
                _ => a.eval(u).powd(b.eval(u)),
            },
            Expr::Sin(a) => a.eval(u).sin(),
            Expr::Cos(a) => a.eval(u).cos(),
            Expr::Exp(a) => a.eval(u).exp(),
            Expr::Sqrt(a) => a.eval(u).sqrt(),
        }
    }
}
