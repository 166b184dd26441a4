use super::{Expr, ExprError, Func, Node};
use std::collections::HashMap;

/// Numeric values for symbols.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Bindings(HashMap<String, f64>);

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn set(&mut self, name: &str, value: f64) -> &mut Self {
        self.0.insert(name.to_string(), value);
        self
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn extend(&mut self, other: &Bindings) {
        for (k, v) in &other.0 {
            self.0.insert(k.clone(), *v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl<const N: usize> From<[(&str, f64); N]> for Bindings {
    fn from(pairs: [(&str, f64); N]) -> Self {
        Bindings(pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }
}

impl FromIterator<(String, f64)> for Bindings {
    fn from_iter<I: IntoIterator<Item = (String, f64)>>(iter: I) -> Self {
        Bindings(iter.into_iter().collect())
    }
}

pub(super) fn apply_func(f: Func, x: f64) -> Result<f64, &'static str> {
    let v = match f {
        Func::Exp => x.exp(),
        Func::Ln if x <= 0.0 => return Err("logarithm of a non-positive value"),
        Func::Ln => x.ln(),
        Func::Sqrt if x < 0.0 => return Err("square root of a negative value"),
        Func::Sqrt => x.sqrt(),
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Tan => x.tan(),
        Func::Sinh => x.sinh(),
        Func::Cosh => x.cosh(),
        Func::Abs => x.abs(),
        Func::Sign => {
            if x == 0.0 {
                0.0
            } else {
                x.signum()
            }
        }
    };
    finite(v)
}

pub(super) fn apply_div(a: f64, b: f64) -> Result<f64, &'static str> {
    if b == 0.0 {
        return Err("division by zero");
    }
    finite(a / b)
}

pub(super) fn apply_pow(base: f64, exponent: f64) -> Result<f64, &'static str> {
    if base < 0.0 && exponent.fract() != 0.0 {
        return Err("non-integer power of a negative value");
    }
    if base == 0.0 && exponent < 0.0 {
        return Err("negative power of zero");
    }
    finite(base.powf(exponent))
}

pub(super) fn finite(v: f64) -> Result<f64, &'static str> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err("non-finite result")
    }
}

fn domain(reason: &'static str, e: &Expr) -> ExprError {
    ExprError::Domain {
        reason,
        subexpr: e.to_string(),
    }
}

pub(super) fn eval(e: &Expr, env: &Bindings) -> Result<f64, ExprError> {
    match e.node() {
        Node::Num(n) => Ok(n.to_f64()),
        Node::Sym(s) => env.get(s).ok_or_else(|| ExprError::Unbound(s.to_string())),
        Node::Neg(a) => Ok(-eval(a, env)?),
        Node::Add(terms) => {
            let mut acc = 0.0;
            for t in terms {
                acc += eval(t, env)?;
            }
            finite(acc).map_err(|r| domain(r, e))
        }
        Node::Mul(fs) => {
            let mut acc = 1.0;
            for f in fs {
                acc *= eval(f, env)?;
            }
            finite(acc).map_err(|r| domain(r, e))
        }
        Node::Sub(a, b) => finite(eval(a, env)? - eval(b, env)?).map_err(|r| domain(r, e)),
        Node::Div(a, b) => apply_div(eval(a, env)?, eval(b, env)?).map_err(|r| domain(r, e)),
        Node::Pow(a, b) => apply_pow(eval(a, env)?, eval(b, env)?).map_err(|r| domain(r, e)),
        Node::Call(f, a) => apply_func(*f, eval(a, env)?).map_err(|r| domain(r, e)),
    }
}
