use super::{Expr, ExprError, Func, Number};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Number),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, ExprError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (tok, at) = lx.next()?;
            let end = tok == Tok::End;
            out.push((tok, at));
            if end {
                return Ok(out);
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump_while(&mut self, pred: impl Fn(char) -> bool) {
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn next(&mut self) -> Result<(Tok, usize), ExprError> {
        self.bump_while(char::is_whitespace);
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || c == '.' {
            self.bump_while(|c| c.is_ascii_digit());
            if self.peek() == Some('.') {
                self.pos += 1;
                self.bump_while(|c| c.is_ascii_digit());
            }
            if matches!(self.peek(), Some('e' | 'E')) {
                let save = self.pos;
                self.pos += 1;
                if matches!(self.peek(), Some('+' | '-')) {
                    self.pos += 1;
                }
                if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.bump_while(|c| c.is_ascii_digit());
                } else {
                    self.pos = save;
                }
            }
            let text = &self.src[start..self.pos];
            return match Number::parse_decimal(text) {
                Some(n) => Ok((Tok::Num(n), start)),
                None => Err(ExprError::Syntax {
                    pos: start,
                    message: format!("malformed number `{text}`"),
                }),
            };
        }
        if c.is_alphabetic() || c == '_' {
            self.bump_while(|c| c.is_alphanumeric() || c == '_');
            return Ok((Tok::Ident(self.src[start..self.pos].to_string()), start));
        }
        self.pos += c.len_utf8();
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                return Err(ExprError::Syntax {
                    pos: start,
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        Ok((tok, start))
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.advance();
                    lhs = Expr::add_all([lhs, self.term()?]);
                }
                Tok::Op('-') => {
                    self.advance();
                    lhs = lhs.sub(&self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.advance();
                    lhs = Expr::mul_all([lhs, self.unary()?]);
                }
                Tok::Op('/') => {
                    self.advance();
                    lhs = lhs.div(&self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Tok::Op('-') => {
                self.advance();
                Ok(self.unary()?.neg())
            }
            Tok::Op('+') => {
                self.advance();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek() == &Tok::Op('^') {
            self.advance();
            let exponent = self.unary()?;
            return Ok(base.pow(&exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let pos = self.pos();
        match self.advance() {
            Tok::Num(n) => Ok(Expr::num(n)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect_close()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if self.peek() != &Tok::LParen {
                    return Ok(Expr::sym(&name));
                }
                self.advance();
                let arg = self.expr()?;
                self.expect_close()?;
                if name == "sec" {
                    return Ok(Expr::one().div(&arg.cos()));
                }
                match Func::from_name(&name) {
                    Some(f) => Ok(Expr::call(f, arg)),
                    None => Err(ExprError::UnknownFunction { name, pos }),
                }
            }
            Tok::End => Err(ExprError::Syntax {
                pos,
                message: "unexpected end of input".into(),
            }),
            Tok::RParen => Err(ExprError::Syntax {
                pos,
                message: "unexpected `)`".into(),
            }),
            Tok::Op(c) => Err(ExprError::Syntax {
                pos,
                message: format!("unexpected `{c}`"),
            }),
        }
    }

    fn expect_close(&mut self) -> Result<(), ExprError> {
        if self.peek() == &Tok::RParen {
            self.advance();
            Ok(())
        } else {
            self.error("expected `)`")
        }
    }
}

pub(super) fn parse(text: &str) -> Result<Expr, ExprError> {
    let mut p = Parser {
        toks: Lexer::tokens(text)?,
        at: 0,
    };
    let e = p.expr()?;
    if p.peek() != &Tok::End {
        return p.error("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Bindings;

    fn val(s: &str) -> f64 {
        parse(s)
            .unwrap()
            .eval(&Bindings::from([("x", 2.0), ("u_x", 3.0)]))
            .unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(val("-x^2"), -4.0);
        assert_eq!(val("2^3^2"), 512.0);
        assert_eq!(val("2^-1"), 0.5);
        assert_eq!(val("1 - 2 - 3"), -4.0);
        assert_eq!(val("8/2/2"), 2.0);
        assert_eq!(val("x*u_x + 1"), 7.0);
    }

    #[test]
    fn functions_and_aliases() {
        assert!((val("log(exp(x))") - 2.0).abs() < 1e-15);
        assert!((val("sec(0)") - 1.0).abs() < 1e-15);
        assert_eq!(val("abs(-x) + sign(-x)"), 1.0);
    }

    #[test]
    fn errors_carry_positions() {
        match parse("x + foo(1)") {
            Err(ExprError::UnknownFunction { name, pos }) => {
                assert_eq!(name, "foo");
                assert_eq!(pos, 4);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse("(x + 1"),
            Err(ExprError::Syntax { pos: 6, .. })
        ));
        assert!(matches!(
            parse("x $ 1"),
            Err(ExprError::Syntax { pos: 2, .. })
        ));
        assert!(parse("x y").is_err());
    }

    #[test]
    fn scientific_literals() {
        assert_eq!(
            parse("1.5e-3").unwrap().as_number(),
            Some(Number::ratio(3, 2000))
        );
        // `e` not followed by digits belongs to the next token.
        assert!(parse("2e").is_err());
    }
}
