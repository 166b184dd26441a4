use super::{Expr, Node, Number};
use std::fmt::{self, Write};

// Binding strength; higher binds tighter.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn number_prec(n: Number) -> u8 {
    if n.is_negative() {
        UNARY
    } else if !n.is_integer() && matches!(n, Number::Rational(_)) {
        PRODUCT
    } else {
        ATOM
    }
}

fn prec(e: &Expr) -> u8 {
    match e.node() {
        Node::Num(n) => number_prec(*n),
        Node::Sym(_) | Node::Call(..) => ATOM,
        Node::Neg(_) => UNARY,
        Node::Add(_) | Node::Sub(..) => SUM,
        Node::Mul(_) | Node::Div(..) => PRODUCT,
        Node::Pow(..) => POWER,
    }
}

fn child(out: &mut String, e: &Expr, min: u8) -> fmt::Result {
    if prec(e) < min {
        out.push('(');
        write_expr(out, e)?;
        out.push(')');
        Ok(())
    } else {
        write_expr(out, e)
    }
}

/// Splits off a leading minus sign so sums print as `a - b`.
fn negated(e: &Expr) -> Option<Expr> {
    match e.node() {
        Node::Neg(inner) => Some(inner.clone()),
        Node::Num(n) if n.is_negative() => Some(Expr::num(n.neg())),
        Node::Mul(fs) => {
            let mut rest = fs.clone();
            rest[0] = match fs[0].node() {
                Node::Neg(inner) => inner.clone(),
                _ => Expr::num(fs[0].as_number().filter(|n| n.is_negative())?.neg()),
            };
            Some(Expr::mul_all(rest))
        }
        _ => None,
    }
}

fn write_expr(out: &mut String, e: &Expr) -> fmt::Result {
    match e.node() {
        Node::Num(n) => write!(out, "{n}"),
        Node::Sym(s) => write!(out, "{s}"),
        Node::Call(f, a) => {
            write!(out, "{}(", f.name())?;
            write_expr(out, a)?;
            out.push(')');
            Ok(())
        }
        Node::Neg(a) => {
            out.push('-');
            child(out, a, POWER)
        }
        Node::Add(terms) => {
            for (i, t) in terms.iter().enumerate() {
                if i == 0 {
                    child(out, t, SUM + 1)?;
                    continue;
                }
                match negated(t) {
                    Some(pos) => {
                        out.push_str(" - ");
                        child(out, &pos, SUM + 1)?;
                    }
                    None => {
                        out.push_str(" + ");
                        child(out, t, SUM + 1)?;
                    }
                }
            }
            Ok(())
        }
        Node::Sub(a, b) => {
            child(out, a, SUM)?;
            match negated(b) {
                Some(pos) => {
                    out.push_str(" + ");
                    child(out, &pos, SUM + 1)
                }
                None => {
                    out.push_str(" - ");
                    child(out, b, SUM + 1)
                }
            }
        }
        Node::Mul(fs) => {
            if fs[0].as_number().is_some_and(|n| n.neg().is_one()) {
                let rest = Expr::mul_all(fs[1..].to_vec());
                if let Some(pos) = negated(&rest) {
                    return write_expr(out, &pos);
                }
                out.push('-');
                return child(out, &rest, PRODUCT);
            }
            for (i, f) in fs.iter().enumerate() {
                if i > 0 {
                    out.push('*');
                }
                child(out, f, if i == 0 { PRODUCT } else { POWER })?;
            }
            Ok(())
        }
        Node::Div(a, b) => {
            child(out, a, PRODUCT)?;
            out.push('/');
            child(out, b, POWER)
        }
        Node::Pow(a, b) => {
            child(out, a, ATOM)?;
            out.push('^');
            child(out, b, POWER)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(&mut s, self)?;
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{Bindings, Expr};

    #[test]
    fn prints_minimal_parentheses() {
        let cases = [
            ("a - (b - c)", "a - (b - c)"),
            ("-x^2", "-x^2"),
            ("(-x)^2", "(-x)^2"),
            ("a/(b*c)", "a/(b*c)"),
            ("2^3^x", "2^3^x"),
            ("(2^3)^x", "8^x"),
            ("x^(1/2)", "x^(1/2)"),
            ("exp(-(a+b))", "exp(-(a + b))"),
            ("x - -2", "x + 2"),
            ("4*-a", "4*(-a)"),
        ];
        for (src, want) in cases {
            assert_eq!(Expr::parse(src).unwrap().to_string(), want, "{src}");
        }
    }

    #[test]
    fn print_parse_round_trip() {
        let env = Bindings::from([("a", 0.7), ("b", -1.3), ("c", 2.1), ("x", 0.4)]);
        for src in [
            "a - b*(c - x)/(a + 1)^-2",
            "-(a*c)^x + c/(-x)",
            "a/-b*c",
            "-a - -b",
            "(a - b)^(c*x)",
            "sqrt(abs(a*b))*exp(-x^2/2) - 0.25",
            "x - -2",
            "4*-exp(a)*b",
            "-1*(-exp(a))",
            "-(-1*(-exp(a)*b))*x",
        ] {
            let e = Expr::parse(src).unwrap();
            let back = Expr::parse(&e.to_string()).unwrap();
            let (v0, v1) = (e.eval(&env).unwrap(), back.eval(&env).unwrap());
            assert!((v0 - v1).abs() <= 1e-14 * v0.abs().max(1.0), "{src} -> {e}");
        }
    }
}
