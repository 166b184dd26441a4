use super::{Expr, Func, Node, Number};
use std::collections::BTreeMap;

/// Light canonicalisation: folds constants, collects like terms and like factors,
/// merges products of exponentials and orders operands deterministically.
///
/// It is value-preserving wherever the input is defined, but makes no attempt at
/// full normal forms.
pub(super) fn simplify(e: &Expr) -> Expr {
    match e.node() {
        Node::Num(_) | Node::Sym(_) => e.clone(),
        Node::Neg(a) => product(vec![Expr::int(-1), simplify(a)]),
        Node::Add(v) => sum(v.iter().map(simplify).collect()),
        Node::Sub(a, b) => sum(vec![simplify(a), product(vec![Expr::int(-1), simplify(b)])]),
        Node::Mul(v) => product(v.iter().map(simplify).collect()),
        Node::Div(a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            if let Some(n) = b.as_number() {
                if let Some(inv) = Number::int(1).div(n) {
                    return product(vec![Expr::num(inv), a]);
                }
            }
            if a == b {
                return Expr::one();
            }
            product(vec![a, power(b, Expr::int(-1))])
        }
        Node::Pow(a, b) => power(simplify(a), simplify(b)),
        Node::Call(f, a) => {
            let a = simplify(a);
            match (f, a.node()) {
                (Func::Ln, Node::Call(Func::Exp, inner)) => inner.clone(),
                // exp(c*ln(y)) = y^c wherever ln(y) is defined
                (Func::Exp, Node::Call(Func::Ln, inner)) => inner.clone(),
                (Func::Exp, Node::Mul(fs)) if fs.len() == 2 => {
                    match (fs[0].as_number(), fs[1].node()) {
                        (Some(c), Node::Call(Func::Ln, inner)) => {
                            power(inner.clone(), Expr::num(c))
                        }
                        _ => Expr::call(*f, a),
                    }
                }
                _ => Expr::call(*f, a),
            }
        }
    }
}

fn power(base: Expr, exponent: Expr) -> Expr {
    if let Some(n) = exponent.as_number().filter(|n| n.is_integer()) {
        match base.node() {
            Node::Pow(b, m) => return power(b.clone(), product(vec![m.clone(), Expr::num(n)])),
            Node::Call(Func::Exp, arg) => {
                return Expr::call(Func::Exp, product(vec![Expr::num(n), arg.clone()]))
            }
            Node::Mul(fs) => {
                return product(
                    fs.iter()
                        .map(|f| power(f.clone(), exponent.clone()))
                        .collect(),
                )
            }
            Node::Div(a, b) => {
                return product(vec![
                    power(a.clone(), exponent.clone()),
                    power(b.clone(), Expr::num(n.neg())),
                ])
            }
            Node::Num(_) if n.is_negative() => {
                if let Some(inv) = base.as_number().and_then(|b| Number::int(1).div(b)) {
                    return power(Expr::num(inv), Expr::num(n.neg()));
                }
            }
            _ => {}
        }
    }
    base.pow(&exponent)
}

fn split_coefficient(t: &Expr) -> (Number, Expr) {
    match t.node() {
        Node::Num(n) => (*n, Expr::one()),
        Node::Mul(fs) => match fs[0].as_number() {
            Some(n) => (n, Expr::mul_all(fs[1..].to_vec())),
            None => (Number::int(1), t.clone()),
        },
        Node::Div(num, den) => {
            let (c, rest) = split_coefficient(num);
            (c, rest.div(den))
        }
        _ => (Number::int(1), t.clone()),
    }
}

fn sum(terms: Vec<Expr>) -> Expr {
    let mut flat = Vec::new();
    for t in terms {
        match t.node() {
            Node::Add(inner) => flat.extend(inner.iter().cloned()),
            _ => flat.push(t),
        }
    }
    let mut constant = Number::int(0);
    let mut collected: BTreeMap<String, (Number, Expr)> = BTreeMap::new();
    for t in flat {
        let (c, rest) = split_coefficient(&t);
        if rest.is_one() {
            constant = constant.add(c);
            continue;
        }
        collected
            .entry(rest.to_string())
            .and_modify(|(acc, _)| *acc = acc.add(c))
            .or_insert((c, rest));
    }
    let mut out: Vec<Expr> = collected
        .into_values()
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, rest)| product(vec![Expr::num(c), rest]))
        .collect();
    if !constant.is_zero() {
        out.push(Expr::num(constant));
    }
    Expr::add_all(out)
}

fn flatten_factor(f: Expr, invert: bool, out: &mut Vec<Expr>) {
    match f.node() {
        Node::Mul(inner) => inner
            .iter()
            .for_each(|g| flatten_factor(g.clone(), invert, out)),
        Node::Div(a, b) => {
            flatten_factor(a.clone(), invert, out);
            flatten_factor(b.clone(), !invert, out);
        }
        _ if invert => out.push(power(f, Expr::int(-1))),
        _ => out.push(f),
    }
}

fn product(factors: Vec<Expr>) -> Expr {
    let mut flat = Vec::new();
    for f in factors {
        flatten_factor(f, false, &mut flat);
    }
    let mut constant = Number::int(1);
    let mut exp_args = Vec::new();
    let mut powers: BTreeMap<String, (Expr, Vec<Expr>)> = BTreeMap::new();
    for f in flat {
        match f.node() {
            Node::Num(n) => constant = constant.mul(*n),
            Node::Call(Func::Exp, arg) => exp_args.push(arg.clone()),
            _ => {
                let (base, exponent) = match f.node() {
                    Node::Pow(b, e) => (b.clone(), e.clone()),
                    _ => (f.clone(), Expr::one()),
                };
                powers
                    .entry(base.to_string())
                    .or_insert_with(|| (base, Vec::new()))
                    .1
                    .push(exponent);
            }
        }
    }
    if constant.is_zero() {
        return Expr::zero();
    }
    let mut numer = Vec::new();
    let mut denom = Vec::new();
    for (base, exponents) in powers.into_values() {
        let total = if exponents.len() == 1 {
            exponents[0].clone()
        } else {
            sum(exponents)
        };
        if total.is_zero() {
            continue;
        }
        match total.as_number().filter(|n| n.is_negative()) {
            Some(n) if n.neg().is_one() => denom.push(base),
            Some(n) => denom.push(base.pow(&Expr::num(n.neg()))),
            None => numer.push(base.pow(&total)),
        }
    }
    if !exp_args.is_empty() {
        let arg = if exp_args.len() == 1 {
            exp_args.pop().unwrap()
        } else {
            sum(exp_args)
        };
        if !arg.is_zero() {
            numer.push(Expr::call(Func::Exp, arg));
        }
    }
    // a lone coefficient is pushed into a sum so nested sums can collect
    if denom.is_empty() && numer.len() == 1 && !constant.is_one() {
        if let Node::Add(terms) = numer[0].node() {
            return sum(terms
                .iter()
                .map(|t| product(vec![Expr::num(constant), t.clone()]))
                .collect());
        }
    }
    let mut top = vec![Expr::num(constant)];
    top.extend(numer);
    let top = Expr::mul_all(top);
    if denom.is_empty() {
        top
    } else {
        top.div(&Expr::mul_all(denom))
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{Bindings, Expr};

    fn s(src: &str) -> String {
        Expr::parse(src).unwrap().simplify().to_string()
    }

    #[test]
    fn collects_terms_and_factors() {
        assert_eq!(s("x + x - 2*x"), "0");
        assert_eq!(s("x*x*x"), "x^3");
        assert_eq!(s("exp(a)*exp(-a)"), "1");
        assert_eq!(s("3*y - y + 1 - 1"), "2*y");
        assert_eq!(s("(x^2)^3"), "x^6");
        assert_eq!(s("ln(exp(x + 1))"), "x + 1");
        assert_eq!(s("(x+1)/(x+1)"), "1");
        assert_eq!(s("2*p*exp(-ln(p))"), "2");
        assert_eq!(s("x*1 + 0"), "x");
        assert_eq!(s("2*u*exp(-u)/exp(-u)"), "2*u");
        assert_eq!(s("phi*ln(phi)/phi"), "ln(phi)");
        assert_eq!(s("16*(1/16*(2*(x^2 + 3) - 1) - 3/8)"), "2*x^2 - 1");
    }

    #[test]
    fn preserves_values() {
        let env = Bindings::from([("x", 0.3), ("y", -1.2), ("a", 2.0)]);
        for src in [
            "x*exp(y)*x/exp(a*y) - (x - y)^2*3/4",
            "-(a - x)*(y + x)*x^(-1)",
            "exp(x)^3*y/y - 2*(x + y)",
        ] {
            let e = Expr::parse(src).unwrap();
            let v0 = e.eval(&env).unwrap();
            let v1 = e.simplify().eval(&env).unwrap();
            assert!((v0 - v1).abs() < 1e-13 * v0.abs().max(1.0), "{src}");
        }
    }
}
