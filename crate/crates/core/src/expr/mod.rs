//! Symbolic expression engine.
//!
//! [`Expr`] is an immutable, reference-counted tree over named symbols. It supports
//! parsing from an infix grammar, exact structural differentiation, substitution,
//! numeric evaluation with domain checking, and a light algebraic simplifier.
//!
//! Grammar accepted by [`Expr::parse`]:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' unary)?              (right associative, binds tighter than unary minus)
//! atom    := number | ident | ident '(' expr ')' | '(' expr ')'
//! number  := digits ('.' digits)? (('e' | 'E') ('+' | '-')? digits)?
//! ident   := (letter | '_') (letter | digit | '_')*
//! ```
//!
//! Functions: `exp ln log sqrt sin cos tan sinh cosh abs sign`; `sec(a)` is read as
//! `1/cos(a)`. Decimal literals are stored as exact rationals.

mod compile;
mod diff;
mod eval;
mod number;
mod parse;
mod print;
mod simplify;

pub use compile::CompiledExpr;
pub use eval::Bindings;
pub use number::Number;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown function `{name}` at position {pos}")]
    UnknownFunction { name: String, pos: usize },
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("domain violation ({reason}) in `{subexpr}`")]
    Domain {
        reason: &'static str,
        subexpr: String,
    },
}

/// Elementary functions of one argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Abs,
    Sign,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Abs => "abs",
            Func::Sign => "sign",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "abs" => Func::Abs,
            "sign" => Func::Sign,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Num(Number),
    Sym(Arc<str>),
    Neg(Expr),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Sub(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, Expr),
    Call(Func, Expr),
}

/// Immutable expression tree. Cloning is cheap.
#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    fn from_node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn parse(text: &str) -> Result<Expr, ExprError> {
        parse::parse(text)
    }

    pub fn num(n: impl Into<Number>) -> Expr {
        Expr::from_node(Node::Num(n.into()))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(Number::int(n))
    }

    pub fn ratio(p: i64, q: i64) -> Expr {
        Expr::num(Number::ratio(p, q))
    }

    pub fn real(v: f64) -> Expr {
        Expr::num(Number::real(v))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(name: &str) -> Expr {
        Expr::from_node(Node::Sym(Arc::from(name)))
    }

    pub fn as_number(&self) -> Option<Number> {
        match self.node() {
            Node::Num(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self.node() {
            Node::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_number().is_some_and(Number::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_number().is_some_and(Number::is_one)
    }

    // ---- folding constructors -------------------------------------------------

    pub fn add_all(terms: impl IntoIterator<Item = Expr>) -> Expr {
        let mut constant = Number::int(0);
        let mut rest = Vec::new();
        for t in terms {
            match t.node() {
                Node::Num(n) => constant = constant.add(*n),
                Node::Add(inner) => {
                    for s in inner {
                        match s.as_number() {
                            Some(n) => constant = constant.add(n),
                            None => rest.push(s.clone()),
                        }
                    }
                }
                _ => rest.push(t),
            }
        }
        if !constant.is_zero() {
            rest.push(Expr::num(constant));
        }
        match rest.len() {
            0 => Expr::zero(),
            1 => rest.pop().unwrap(),
            _ => Expr::from_node(Node::Add(rest)),
        }
    }

    pub fn mul_all(factors: impl IntoIterator<Item = Expr>) -> Expr {
        let mut constant = Number::int(1);
        let mut rest = Vec::new();
        for f in factors {
            match f.node() {
                Node::Num(n) => constant = constant.mul(*n),
                Node::Mul(inner) => {
                    for s in inner {
                        match s.as_number() {
                            Some(n) => constant = constant.mul(n),
                            None => rest.push(s.clone()),
                        }
                    }
                }
                _ => rest.push(f),
            }
        }
        if constant.is_zero() {
            return Expr::zero();
        }
        if !constant.is_one() {
            rest.insert(0, Expr::num(constant));
        }
        match rest.len() {
            0 => Expr::one(),
            1 => rest.pop().unwrap(),
            _ => Expr::from_node(Node::Mul(rest)),
        }
    }

    pub fn neg(&self) -> Expr {
        match self.node() {
            Node::Num(n) => Expr::num(n.neg()),
            Node::Neg(inner) => inner.clone(),
            _ => Expr::from_node(Node::Neg(self.clone())),
        }
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.neg();
        }
        if let (Some(a), Some(b)) = (self.as_number(), other.as_number()) {
            return Expr::num(a.sub(b));
        }
        Expr::from_node(Node::Sub(self.clone(), other.clone()))
    }

    pub fn div(&self, other: &Expr) -> Expr {
        if other.is_one() {
            return self.clone();
        }
        if let (Some(a), Some(b)) = (self.as_number(), other.as_number()) {
            if let Some(q) = a.div(b) {
                return Expr::num(q);
            }
        }
        if self.is_zero() && !other.is_zero() {
            return Expr::zero();
        }
        Expr::from_node(Node::Div(self.clone(), other.clone()))
    }

    pub fn pow(&self, exponent: &Expr) -> Expr {
        if exponent.is_zero() {
            return Expr::one();
        }
        if exponent.is_one() {
            return self.clone();
        }
        if let (Some(a), Some(b)) = (self.as_number(), exponent.as_number()) {
            if let Some(p @ Number::Rational(_)) = a.pow(b) {
                return Expr::num(p);
            }
        }
        Expr::from_node(Node::Pow(self.clone(), exponent.clone()))
    }

    pub fn powi(&self, n: i64) -> Expr {
        self.pow(&Expr::int(n))
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        if let Some(n) = arg.as_number() {
            match (func, n) {
                (Func::Exp, n) if n.is_zero() => return Expr::one(),
                (Func::Ln, n) if n.is_one() => return Expr::zero(),
                (Func::Sin | Func::Tan | Func::Sinh | Func::Sqrt | Func::Abs | Func::Sign, n)
                    if n.is_zero() =>
                {
                    return Expr::zero()
                }
                (Func::Cos | Func::Cosh, n) if n.is_zero() => return Expr::one(),
                (Func::Abs, n) => return Expr::num(if n.is_negative() { n.neg() } else { n }),
                (Func::Sign, n) => return Expr::int(if n.is_negative() { -1 } else { 1 }),
                _ => {}
            }
        }
        Expr::from_node(Node::Call(func, arg))
    }

    pub fn exp(&self) -> Expr {
        Expr::call(Func::Exp, self.clone())
    }
    pub fn ln(&self) -> Expr {
        Expr::call(Func::Ln, self.clone())
    }
    pub fn sqrt(&self) -> Expr {
        Expr::call(Func::Sqrt, self.clone())
    }
    pub fn sin(&self) -> Expr {
        Expr::call(Func::Sin, self.clone())
    }
    pub fn cos(&self) -> Expr {
        Expr::call(Func::Cos, self.clone())
    }
    pub fn abs(&self) -> Expr {
        Expr::call(Func::Abs, self.clone())
    }

    // ---- queries and rewriting -----------------------------------------------

    /// Every symbol name occurring in the tree.
    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        self.visit(&mut |e| {
            if let Node::Sym(s) = e.node() {
                if !out.contains(&**s) {
                    out.insert(s.to_string());
                }
            }
        });
    }

    pub fn depends_on(&self, name: &str) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if let Node::Sym(s) = e.node() {
                found |= &**s == name;
            }
        });
        found
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self.node() {
            Node::Num(_) | Node::Sym(_) => {}
            Node::Neg(a) | Node::Call(_, a) => a.visit(f),
            Node::Add(v) | Node::Mul(v) => v.iter().for_each(|c| c.visit(f)),
            Node::Sub(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    pub fn substitute(&self, target: &str, replacement: &Expr) -> Expr {
        let mut map = HashMap::new();
        map.insert(target.to_string(), replacement.clone());
        self.substitute_all(&map)
    }

    /// Simultaneous substitution of several symbols.
    pub fn substitute_all(&self, map: &HashMap<String, Expr>) -> Expr {
        if map.is_empty() {
            return self.clone();
        }
        self.rebuild(&mut |e| match e.node() {
            Node::Sym(s) => map.get(&**s).cloned(),
            _ => None,
        })
    }

    /// Replaces symbols by numeric values.
    pub fn bind(&self, values: &[(&str, f64)]) -> Expr {
        let map = values
            .iter()
            .map(|(k, v)| (k.to_string(), Expr::real(*v)))
            .collect();
        self.substitute_all(&map)
    }

    /// Renames symbols.
    pub fn rename(&self, pairs: &[(&str, &str)]) -> Expr {
        let map = pairs
            .iter()
            .map(|(from, to)| (from.to_string(), Expr::sym(to)))
            .collect();
        self.substitute_all(&map)
    }

    /// Bottom-up rebuild through the folding constructors. `leaf` may replace a node
    /// outright (its children are then not visited).
    fn rebuild(&self, leaf: &mut impl FnMut(&Expr) -> Option<Expr>) -> Expr {
        if let Some(r) = leaf(self) {
            return r;
        }
        match self.node() {
            Node::Num(_) | Node::Sym(_) => self.clone(),
            Node::Neg(a) => a.rebuild(leaf).neg(),
            Node::Add(v) => Expr::add_all(v.iter().map(|c| c.rebuild(leaf)).collect::<Vec<_>>()),
            Node::Mul(v) => Expr::mul_all(v.iter().map(|c| c.rebuild(leaf)).collect::<Vec<_>>()),
            Node::Sub(a, b) => a.rebuild(leaf).sub(&b.rebuild(leaf)),
            Node::Div(a, b) => a.rebuild(leaf).div(&b.rebuild(leaf)),
            Node::Pow(a, b) => a.rebuild(leaf).pow(&b.rebuild(leaf)),
            Node::Call(f, a) => Expr::call(*f, a.rebuild(leaf)),
        }
    }

    pub fn diff(&self, var: &str) -> Expr {
        diff::diff(self, var)
    }

    pub fn eval(&self, env: &Bindings) -> Result<f64, ExprError> {
        eval::eval(self, env)
    }

    pub fn simplify(&self) -> Expr {
        simplify::simplify(self)
    }

    pub fn compile(&self, slots: &[&str]) -> Result<CompiledExpr, ExprError> {
        CompiledExpr::new(self, slots)
    }

    /// Flattens nested sums into a list of summands, distributing products over
    /// sums while the term count stays below `cap`.
    pub fn summands(&self, cap: usize) -> Vec<Expr> {
        let mut out = Vec::new();
        collect_summands(self, false, cap, &mut out);
        out
    }
}

fn collect_summands(e: &Expr, negate: bool, cap: usize, out: &mut Vec<Expr>) {
    let push = |out: &mut Vec<Expr>, t: Expr| out.push(if negate { t.neg() } else { t });
    match e.node() {
        Node::Add(v) => v.iter().for_each(|c| collect_summands(c, negate, cap, out)),
        Node::Sub(a, b) => {
            collect_summands(a, negate, cap, out);
            collect_summands(b, !negate, cap, out);
        }
        Node::Neg(a) => collect_summands(a, !negate, cap, out),
        Node::Mul(factors) if out.len() < cap => {
            if factors.iter().any(|f| matches!(f.node(), Node::Neg(_))) {
                let mut flip = negate;
                let stripped: Vec<Expr> = factors
                    .iter()
                    .map(|f| match f.node() {
                        Node::Neg(inner) => {
                            flip = !flip;
                            inner.clone()
                        }
                        _ => f.clone(),
                    })
                    .collect();
                collect_summands(&Expr::mul_all(stripped), flip, cap, out);
                return;
            }
            // Distribute over the first factor that is itself a sum.
            let Some(idx) = factors
                .iter()
                .position(|f| matches!(f.node(), Node::Add(_) | Node::Sub(..)))
            else {
                push(out, e.clone());
                return;
            };
            let mut inner = Vec::new();
            collect_summands(&factors[idx], false, cap, &mut inner);
            if out.len() + inner.len() > cap {
                push(out, e.clone());
                return;
            }
            for term in inner {
                let mut fs = factors.clone();
                fs[idx] = term;
                collect_summands(&Expr::mul_all(fs), negate, cap, out);
            }
        }
        _ => push(out, e.clone()),
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl From<f64> for Expr {
    fn from(v: f64) -> Self {
        Expr::real(v)
    }
}

impl From<i64> for Expr {
    fn from(v: i64) -> Self {
        Expr::int(v)
    }
}

impl std::str::FromStr for Expr {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expr::parse(s)
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                ops::$trait::$method(&self, &rhs)
            }
        }
        impl ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                ops::$trait::$method(&self, rhs)
            }
        }
        impl ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                ops::$trait::$method(self, &rhs)
            }
        }
    };
}

impl_binop!(Add, add, |a, b| Expr::add_all([a.clone(), b.clone()]));
impl_binop!(Sub, sub, |a, b| a.sub(b));
impl_binop!(Mul, mul, |a, b| Expr::mul_all([a.clone(), b.clone()]));
impl_binop!(Div, div, |a, b| a.div(b));

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    #[test]
    fn free_symbols_reported() {
        let e = p("x^2 + exp(-u)");
        let syms: Vec<_> = e.free_symbols().into_iter().collect();
        assert_eq!(syms, vec!["u".to_string(), "x".to_string()]);
    }

    #[test]
    fn substitute_replaces_every_occurrence() {
        let e = p("x + u").substitute("u", &p("x^2"));
        let env = Bindings::from([("x", 3.0)]);
        assert_eq!(e.eval(&env).unwrap(), 12.0);
        assert!(!e.depends_on("u"));
    }

    #[test]
    fn folding_constructors() {
        assert!(Expr::mul_all([p("x"), Expr::zero()]).is_zero());
        assert_eq!(Expr::add_all([p("x"), Expr::zero()]), p("x"));
        assert_eq!(p("1/2").as_number(), Some(Number::ratio(1, 2)));
        assert_eq!(p("2^-2").as_number(), Some(Number::ratio(1, 4)));
    }

    #[test]
    fn summands_flatten_and_distribute() {
        let e = p("a - (b + c)*x + -(d)");
        assert_eq!(e.summands(100).len(), 4);
        let env = Bindings::from([("a", 1.0), ("b", 2.0), ("c", 3.0), ("d", 5.0), ("x", 7.0)]);
        let total: f64 = e.summands(100).iter().map(|t| t.eval(&env).unwrap()).sum();
        assert_eq!(total, e.eval(&env).unwrap());
    }
}
