use super::eval::{apply_div, apply_func, apply_pow, finite};
use super::{Expr, ExprError, Func, Node};

#[derive(Clone, Debug)]
enum Op {
    Const(f64),
    Load(usize),
    Neg,
    Add(usize),
    Mul(usize),
    Sub,
    Div,
    Pow,
    PowInt(i32),
    Call(Func),
}

/// Expression flattened to a postfix tape over positional slots, for hot loops.
#[derive(Clone, Debug)]
pub struct CompiledExpr {
    ops: Vec<Op>,
    slots: Vec<String>,
    source: String,
}

impl CompiledExpr {
    pub(super) fn new(e: &Expr, slots: &[&str]) -> Result<Self, ExprError> {
        let mut ops = Vec::new();
        emit(e, slots, &mut ops)?;
        Ok(CompiledExpr {
            ops,
            slots: slots.iter().map(|s| s.to_string()).collect(),
            source: e.to_string(),
        })
    }

    pub fn slots(&self) -> &[String] {
        &self.slots
    }

    /// Evaluates with `args[i]` bound to the `i`-th slot.
    pub fn eval(&self, args: &[f64]) -> Result<f64, ExprError> {
        let mut stack = Vec::with_capacity(16);
        self.eval_with(args, &mut stack)
    }

    /// Like [`eval`](Self::eval) but reuses a caller-owned stack.
    pub fn eval_with(&self, args: &[f64], stack: &mut Vec<f64>) -> Result<f64, ExprError> {
        stack.clear();
        let err = |reason| ExprError::Domain {
            reason,
            subexpr: self.source.clone(),
        };
        for op in &self.ops {
            match *op {
                Op::Const(v) => stack.push(v),
                Op::Load(i) => stack.push(args[i]),
                Op::Neg => {
                    let v = stack.last_mut().unwrap();
                    *v = -*v;
                }
                Op::Add(n) => {
                    let at = stack.len() - n;
                    let s: f64 = stack.drain(at..).sum();
                    stack.push(s);
                }
                Op::Mul(n) => {
                    let at = stack.len() - n;
                    let p: f64 = stack.drain(at..).product();
                    stack.push(p);
                }
                Op::Sub | Op::Div | Op::Pow => {
                    let b = stack.pop().unwrap();
                    let a = stack.pop().unwrap();
                    let r = match op {
                        Op::Sub => Ok(a - b),
                        Op::Div => apply_div(a, b),
                        _ => apply_pow(a, b),
                    };
                    stack.push(r.map_err(err)?);
                }
                Op::PowInt(n) => {
                    let a = stack.pop().unwrap();
                    if a == 0.0 && n < 0 {
                        return Err(err("negative power of zero"));
                    }
                    stack.push(a.powi(n));
                }
                Op::Call(f) => {
                    let a = stack.pop().unwrap();
                    stack.push(apply_func(f, a).map_err(err)?);
                }
            }
        }
        finite(stack.pop().unwrap()).map_err(err)
    }
}

fn emit(e: &Expr, slots: &[&str], ops: &mut Vec<Op>) -> Result<(), ExprError> {
    match e.node() {
        Node::Num(n) => ops.push(Op::Const(n.to_f64())),
        Node::Sym(s) => match slots.iter().position(|slot| *slot == &**s) {
            Some(i) => ops.push(Op::Load(i)),
            None => return Err(ExprError::Unbound(s.to_string())),
        },
        Node::Neg(a) => {
            emit(a, slots, ops)?;
            ops.push(Op::Neg);
        }
        Node::Add(v) | Node::Mul(v) => {
            for c in v {
                emit(c, slots, ops)?;
            }
            ops.push(if matches!(e.node(), Node::Add(_)) {
                Op::Add(v.len())
            } else {
                Op::Mul(v.len())
            });
        }
        Node::Sub(a, b) | Node::Div(a, b) => {
            emit(a, slots, ops)?;
            emit(b, slots, ops)?;
            ops.push(if matches!(e.node(), Node::Sub(..)) {
                Op::Sub
            } else {
                Op::Div
            });
        }
        Node::Pow(a, b) => {
            emit(a, slots, ops)?;
            match b.as_number().and_then(|n| n.as_integer()) {
                Some(n) if n.unsigned_abs() <= 64 => ops.push(Op::PowInt(n as i32)),
                _ => {
                    emit(b, slots, ops)?;
                    ops.push(Op::Pow);
                }
            }
        }
        Node::Call(f, a) => {
            emit(a, slots, ops)?;
            ops.push(Op::Call(*f));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use crate::expr::{Bindings, Expr};

    #[test]
    fn agrees_with_tree_evaluation() {
        let e = Expr::parse("x^2*exp(-y) - 3/(1 + abs(x)) + x^y").unwrap();
        let c = e.compile(&["x", "y"]).unwrap();
        for (x, y) in [(0.5, 1.0), (2.0, -0.3), (1.5, 2.5)] {
            let tree = e.eval(&Bindings::from([("x", x), ("y", y)])).unwrap();
            assert!((c.eval(&[x, y]).unwrap() - tree).abs() < 1e-14);
        }
        assert!(c.eval(&[-1.0, 0.5]).is_err());
        assert!(e.compile(&["x"]).is_err());
    }
}
