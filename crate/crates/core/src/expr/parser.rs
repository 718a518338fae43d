use std::collections::HashSet;

use super::{Expr, Func};
use crate::error::{Error, Result};

/// Parses `source` into an expression over the declared `variables`.
///
/// Precedence from tightest: `^` (right associative), unary minus, `*` `/`,
/// then `+` `-`. Whitespace is ignored. Any identifier not followed by `(`
/// must be one of `variables`.
pub fn parse_expression<S: AsRef<str>>(source: &str, variables: &[S]) -> Result<Expr> {
    let mut declared = HashSet::new();
    for v in variables {
        if !declared.insert(v.as_ref()) {
            return Err(Error::invalid(format!("variable \"{}\" declared twice", v.as_ref())));
        }
    }
    let tokens = tokenize(source)?;
    if tokens.is_empty() {
        return Err(Error::Syntax { position: 0, message: "empty expression".into() });
    }
    let mut parser = Parser { tokens: &tokens, pos: 0, declared: &declared, end: source.len() };
    let expr = parser.expression()?;
    if let Some(tok) = parser.peek() {
        return Err(Error::Syntax {
            position: tok.offset,
            message: format!("unexpected {}", tok.kind.describe()),
        });
    }
    Ok(expr)
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Number(n) => format!("number {n}"),
            TokenKind::Ident(s) => format!("identifier \"{s}\""),
            TokenKind::Op(c) => format!("'{c}'"),
            TokenKind::LParen => "'('".into(),
            TokenKind::RParen => "')'".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn tokenize(source: &str) -> Result<Vec<Token>> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = match c {
            '+' | '-' | '*' | '/' | '^' => {
                i += 1;
                TokenKind::Op(c)
            }
            '(' => {
                i += 1;
                TokenKind::LParen
            }
            ')' => {
                i += 1;
                TokenKind::RParen
            }
            '0'..='9' | '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent part, only when digits follow
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &source[start..i];
                let value = text.parse::<f64>().map_err(|_| Error::Syntax {
                    position: start,
                    message: format!("malformed number \"{text}\""),
                })?;
                TokenKind::Number(value)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                TokenKind::Ident(source[start..i].to_string())
            }
            _ => {
                let ch = source[start..].chars().next().unwrap_or(c);
                return Err(Error::Syntax {
                    position: start,
                    message: format!("unexpected character '{ch}'"),
                });
            }
        };
        tokens.push(Token { kind, offset: start });
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    declared: &'a HashSet<&'a str>,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek() {
            Some(Token { kind: TokenKind::Op(c), .. }) => Some(*c),
            _ => None,
        }
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn expression(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn expect_rparen(&mut self, opened_at: usize) -> Result<()> {
        match self.peek() {
            Some(Token { kind: TokenKind::RParen, .. }) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(Error::Syntax {
                position: self.offset(),
                message: format!("expected ')' to close '(' at position {opened_at}"),
            }),
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        let Some(tok) = self.peek().cloned() else {
            return Err(Error::Syntax {
                position: self.end,
                message: "unexpected end of expression".into(),
            });
        };
        self.pos += 1;
        match tok.kind {
            TokenKind::Number(value) => Ok(Expr::Const(value)),
            TokenKind::LParen => {
                let inner = self.expression()?;
                self.expect_rparen(tok.offset)?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                if matches!(self.peek(), Some(Token { kind: TokenKind::LParen, .. })) {
                    let open = self.offset();
                    let func = Func::from_name(&name).ok_or_else(|| Error::Syntax {
                        position: tok.offset,
                        message: format!("unknown function \"{name}\""),
                    })?;
                    self.pos += 1;
                    let arg = self.expression()?;
                    self.expect_rparen(open)?;
                    Ok(Expr::Call(func, Box::new(arg)))
                } else if self.declared.contains(name.as_str()) {
                    Ok(Expr::Var(name))
                } else {
                    Err(Error::UnknownIdentifier(name))
                }
            }
            other => Err(Error::Syntax {
                position: tok.offset,
                message: format!("unexpected {}", other.describe()),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TYV: [&str; 3] = ["t", "y", "v"];

    fn boxed(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn parses_power_of_variable() {
        let e = parse_expression("v^2", &TYV).unwrap();
        assert_eq!(e, Expr::Pow(boxed(Expr::var("v")), boxed(Expr::Const(2.0))));
    }

    #[test]
    fn parses_weighted_integrand() {
        let e = parse_expression("t^(1/2)*v", &TYV).unwrap();
        let half = Expr::Div(boxed(Expr::Const(1.0)), boxed(Expr::Const(2.0)));
        let expected = Expr::Mul(
            boxed(Expr::Pow(boxed(Expr::var("t")), boxed(half))),
            boxed(Expr::var("v")),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn whitespace_insensitive() {
        assert_eq!(
            parse_expression(" t ^ ( 1 / 2 ) *  v ", &TYV).unwrap(),
            parse_expression("t^(1/2)*v", &TYV).unwrap()
        );
    }

    #[test]
    fn rejects_unknown_identifier() {
        assert_eq!(
            parse_expression("z1*w", &["z1", "z2"]),
            Err(Error::UnknownIdentifier("w".into()))
        );
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let e = parse_expression("-v^2", &TYV).unwrap();
        assert!(matches!(e, Expr::Neg(ref inner) if matches!(**inner, Expr::Pow(..))));
        let e = parse_expression("2*-v", &TYV).unwrap();
        assert!(matches!(e, Expr::Mul(..)));
    }

    #[test]
    fn power_is_right_associative() {
        let e = parse_expression("t^y^v", &TYV).unwrap();
        match e {
            Expr::Pow(base, exp) => {
                assert_eq!(*base, Expr::var("t"));
                assert!(matches!(*exp, Expr::Pow(..)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn scientific_notation() {
        assert_eq!(parse_expression("1.5e-3", &TYV).unwrap(), Expr::Const(1.5e-3));
        assert_eq!(parse_expression(".5", &TYV).unwrap(), Expr::Const(0.5));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let cases = [("v +", 3), ("(v", 2), ("v $ 2", 2), ("v 2", 2), ("foo(v)", 0), ("", 0), ("1.2.3", 0)];
        for (src, pos) in cases {
            match parse_expression(src, &TYV) {
                Err(Error::Syntax { position, .. }) => assert_eq!(position, pos, "{src}"),
                other => panic!("{src}: expected syntax error, got {other:?}"),
            }
        }
    }

    #[test]
    fn duplicate_variables_rejected() {
        assert!(matches!(parse_expression("t", &["t", "t"]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn function_calls() {
        let e = parse_expression("exp(-t)*sqrt(v)", &TYV).unwrap();
        assert!(matches!(e, Expr::Mul(ref a, _) if matches!(**a, Expr::Call(Func::Exp, _))));
    }
}
