use super::{Expr, Func, Node};

/// Structural derivative with respect to the symbol `var`.
///
/// `abs` and `sign` use their almost-everywhere derivatives (`sign` and `0`).
pub(super) fn diff(e: &Expr, var: &str) -> Expr {
    if !e.depends_on(var) {
        return Expr::zero();
    }
    match e.node() {
        Node::Num(_) => Expr::zero(),
        Node::Sym(s) => {
            if &**s == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Neg(a) => diff(a, var).neg(),
        Node::Add(terms) => Expr::add_all(terms.iter().map(|t| diff(t, var)).collect::<Vec<_>>()),
        Node::Sub(a, b) => diff(a, var).sub(&diff(b, var)),
        Node::Mul(fs) => {
            let mut terms = Vec::new();
            for (i, f) in fs.iter().enumerate() {
                let df = diff(f, var);
                if df.is_zero() {
                    continue;
                }
                let mut rest: Vec<Expr> = fs.clone();
                rest[i] = df;
                terms.push(Expr::mul_all(rest));
            }
            Expr::add_all(terms)
        }
        Node::Div(a, b) => {
            let da = diff(a, var);
            let db = diff(b, var);
            if db.is_zero() {
                return da.div(b);
            }
            // a'/b - a*b'/b^2
            let first = da.div(b);
            let second = Expr::mul_all([a.clone(), db]).div(&b.powi(2));
            first.sub(&second)
        }
        Node::Pow(base, exponent) => {
            let db = diff(base, var);
            let de = diff(exponent, var);
            let mut terms = Vec::new();
            if !db.is_zero() {
                // n*b^(n-1)*b'
                let lowered = Expr::add_all([exponent.clone(), Expr::int(-1)]);
                terms.push(Expr::mul_all([exponent.clone(), base.pow(&lowered), db]));
            }
            if !de.is_zero() {
                terms.push(Expr::mul_all([e.clone(), base.ln(), de]));
            }
            Expr::add_all(terms)
        }
        Node::Call(f, a) => {
            let da = diff(a, var);
            let outer = match f {
                Func::Exp => e.clone(),
                Func::Ln => Expr::one().div(a),
                Func::Sqrt => Expr::one().div(&Expr::mul_all([Expr::int(2), e.clone()])),
                Func::Sin => a.cos(),
                Func::Cos => a.sin().neg(),
                Func::Tan => Expr::one().div(&a.cos().powi(2)),
                Func::Sinh => Expr::call(Func::Cosh, a.clone()),
                Func::Cosh => Expr::call(Func::Sinh, a.clone()),
                Func::Abs => Expr::call(Func::Sign, a.clone()),
                Func::Sign => return Expr::zero(),
            };
            Expr::mul_all([outer, da])
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{Bindings, Expr};

    fn central_difference(e: &Expr, var: &str, env: &Bindings) -> f64 {
        let x0 = env.get(var).unwrap();
        let h = 1e-5 * x0.abs().max(1.0);
        let at = |x: f64| {
            let mut b = env.clone();
            b.set(var, x);
            e.eval(&b).unwrap()
        };
        (at(x0 + h) - at(x0 - h)) / (2.0 * h)
    }

    #[test]
    fn matches_finite_differences() {
        let env = Bindings::from([("x", 0.8), ("y", 1.7)]);
        for src in [
            "x^3*y - sin(x*y)",
            "exp(-x^2/2)/(1 + x^2)",
            "x^y",
            "ln(abs(x - y))*sqrt(x)",
            "tan(x)*cosh(x) - sinh(y*x)",
            "abs(x)^(-y)",
            "sec(x)",
        ] {
            let e = Expr::parse(src).unwrap();
            let exact = e.diff("x").eval(&env).unwrap();
            let approx = central_difference(&e, "x", &env);
            assert!(
                (exact - approx).abs() < 1e-7 * exact.abs().max(1.0),
                "{src}: {exact} vs {approx}"
            );
        }
    }

    #[test]
    fn polynomial_derivatives_are_exact() {
        let d = Expr::parse("3*x^4 - x + 7").unwrap().diff("x");
        let env = Bindings::from([("x", 2.0)]);
        assert_eq!(d.eval(&env).unwrap(), 95.0);
        assert!(Expr::parse("y^2").unwrap().diff("x").is_zero());
    }
}
