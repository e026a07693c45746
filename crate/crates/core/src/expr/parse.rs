//! Recursive-descent parser for the bracketed expression syntax.
//!
//! ```text
//! sum    := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | string | ident ('[' args? ']')? | '(' sum ')'
//! ```

use super::{Expr, Number};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        Self { offset, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Number),
    Ident(String),
    Str(String),
    Op(char),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number `{n}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Str(_) => "string literal".to_string(),
            Tok::Op(c) => format!("`{c}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next_token(&mut self) -> Result<(usize, Tok), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&b) = bytes.get(self.pos) else {
            return Ok((start, Tok::Eof));
        };
        let tok = match b {
            b'0'..=b'9' => self.number(start)?,
            b'a'..=b'z' | b'A'..=b'Z' => {
                while self.pos < bytes.len() && bytes[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                Tok::Ident(self.src[start..self.pos].to_string())
            }
            b'"' => self.string(start)?,
            b'+' | b'-' | b'*' | b'/' | b'^' | b'(' | b')' | b'[' | b']' | b',' => {
                self.pos += 1;
                Tok::Op(b as char)
            }
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                return Err(ParseError::new(start, format!("unexpected character `{ch}`")));
            }
        };
        Ok((start, tok))
    }

    fn number(&mut self, start: usize) -> Result<Tok, ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let int_end = self.pos;
        let overflow = || ParseError::new(start, "numeric literal out of range");
        if bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let frac = &self.src[int_end + 1..self.pos];
            let digits = format!("{}{}", &self.src[start..int_end], frac);
            let mantissa: i64 = digits.parse().map_err(|_| overflow())?;
            Ok(Tok::Num(Number::Decimal { mantissa, scale: frac.len() as u32 }))
        } else {
            let value: i64 = self.src[start..int_end].parse().map_err(|_| overflow())?;
            Ok(Tok::Num(Number::Integer(value)))
        }
    }

    fn string(&mut self, start: usize) -> Result<Tok, ParseError> {
        let mut out = String::new();
        let mut chars = self.src[start + 1..].char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.pos = start + 1 + i + 1;
                    return Ok(Tok::Str(out));
                }
                '\\' => match chars.next() {
                    Some((_, 'n')) => out.push('\n'),
                    Some((_, 't')) => out.push('\t'),
                    Some((_, other)) => out.push(other),
                    None => break,
                },
                other => out.push(other),
            }
        }
        Err(ParseError::new(start, "unterminated string literal"))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    tok_pos: usize,
}

/// A parsed operand plus whether it was written in parentheses; explicit
/// grouping keeps nested sums and products from being flattened.
struct Operand {
    expr: Expr,
    grouped: bool,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer { src, pos: 0 };
        let (tok_pos, tok) = lexer.next_token()?;
        Ok(Self { lexer, tok, tok_pos })
    }

    fn bump(&mut self) -> Result<Tok, ParseError> {
        let (pos, tok) = self.lexer.next_token()?;
        self.tok_pos = pos;
        Ok(std::mem::replace(&mut self.tok, tok))
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::new(
            self.tok_pos,
            format!("expected {expected}, found {}", self.tok.describe()),
        )
    }

    fn close(&mut self, open: char, open_pos: usize) -> Result<(), ParseError> {
        let close = if open == '(' { ')' } else { ']' };
        match self.tok {
            Tok::Op(c) if c == close => {
                self.bump()?;
                Ok(())
            }
            Tok::Eof => Err(ParseError::new(
                open_pos,
                format!("unbalanced `{open}`: missing `{close}` before end of input"),
            )),
            _ => Err(self.unexpected(&format!("`{close}` to close `{open}` at byte {open_pos}"))),
        }
    }

    fn sum(&mut self) -> Result<Operand, ParseError> {
        let first = self.term()?;
        if !matches!(self.tok, Tok::Op('+' | '-')) {
            return Ok(first);
        }
        let mut terms = Vec::new();
        push_flat(&mut terms, first, "Plus");
        while let Tok::Op(op @ ('+' | '-')) = self.tok {
            self.bump()?;
            let rhs = self.term()?;
            if op == '+' {
                push_flat(&mut terms, rhs, "Plus");
            } else {
                terms.push(rhs.expr.negated());
            }
        }
        Ok(Operand { expr: Expr::call("Plus", terms), grouped: false })
    }

    fn term(&mut self) -> Result<Operand, ParseError> {
        let mut acc = self.unary()?;
        while let Tok::Op(op @ ('*' | '/')) = self.tok {
            self.bump()?;
            let rhs = self.unary()?;
            let expr = if op == '*' {
                let mut factors = Vec::new();
                push_flat(&mut factors, acc, "Times");
                push_flat(&mut factors, rhs, "Times");
                Expr::call("Times", factors)
            } else {
                divide(acc, rhs.expr)
            };
            acc = Operand { expr, grouped: false };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Operand, ParseError> {
        if self.tok == Tok::Op('-') {
            self.bump()?;
            let inner = self.unary()?;
            return Ok(Operand { expr: inner.expr.negated(), grouped: false });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Operand, ParseError> {
        let base = self.atom()?;
        if self.tok != Tok::Op('^') {
            return Ok(base);
        }
        self.bump()?;
        let exponent = self.unary()?;
        Ok(Operand {
            expr: Expr::call("Power", vec![base.expr, exponent.expr]),
            grouped: false,
        })
    }

    fn atom(&mut self) -> Result<Operand, ParseError> {
        let pos = self.tok_pos;
        match self.tok.clone() {
            Tok::Num(n) => {
                self.bump()?;
                Ok(Operand { expr: Expr::Num(n), grouped: false })
            }
            Tok::Str(s) => {
                self.bump()?;
                Ok(Operand { expr: Expr::Str(s), grouped: false })
            }
            Tok::Ident(name) => {
                self.bump()?;
                if self.tok != Tok::Op('[') {
                    return Ok(Operand { expr: Expr::Sym(name), grouped: false });
                }
                let open_pos = self.tok_pos;
                self.bump()?;
                let mut args = Vec::new();
                if self.tok != Tok::Op(']') {
                    loop {
                        args.push(self.sum()?.expr);
                        if self.tok != Tok::Op(',') {
                            break;
                        }
                        self.bump()?;
                    }
                }
                self.close('[', open_pos)?;
                let expr = if name == "HoldForm" {
                    if args.len() != 1 {
                        return Err(ParseError::new(
                            pos,
                            format!("HoldForm takes exactly one argument, got {}", args.len()),
                        ));
                    }
                    Expr::hold(args.pop().unwrap())
                } else {
                    Expr::Call(name, args)
                };
                Ok(Operand { expr, grouped: false })
            }
            Tok::Op('(') => {
                self.bump()?;
                let inner = self.sum()?;
                self.close('(', pos)?;
                Ok(Operand { expr: inner.expr, grouped: true })
            }
            Tok::Op(c @ (')' | ']')) => {
                Err(ParseError::new(pos, format!("unbalanced `{c}` with no matching opener")))
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

fn push_flat(out: &mut Vec<Expr>, operand: Operand, head: &str) {
    match operand.expr {
        Expr::Call(h, args) if h == head && !operand.grouped => out.extend(args),
        other => out.push(other),
    }
}

/// `lhs / rhs`. Division by an integer literal folds into an exact
/// coefficient (`Pi/2` becomes `Times[1/2, Pi]`); anything else is `Divide`.
fn divide(lhs: Operand, rhs: Expr) -> Expr {
    let Expr::Num(Number::Integer(den)) = rhs else {
        return Expr::call("Divide", vec![lhs.expr, rhs]);
    };
    let Some(inv) = Number::rational(1, den) else {
        return Expr::call("Divide", vec![lhs.expr, rhs]);
    };
    match lhs.expr {
        Expr::Num(ref n) if n.is_exact() => match n.exact_mul(&inv) {
            Some(q) => Expr::Num(q),
            None => Expr::call("Divide", vec![lhs.expr, rhs]),
        },
        Expr::Call(ref h, ref args) if h == "Times" && !lhs.grouped => {
            if let Some(Expr::Num(c)) = args.first().filter(|_| args.len() > 1) {
                if let Some(q) = c.exact_mul(&inv) {
                    let mut rest = args[1..].to_vec();
                    if q == Number::Integer(1) {
                        return if rest.len() == 1 { rest.pop().unwrap() } else { Expr::call("Times", rest) };
                    }
                    let mut factors = vec![Expr::Num(q)];
                    factors.append(&mut rest);
                    return Expr::call("Times", factors);
                }
            }
            let mut factors = vec![Expr::Num(inv)];
            factors.extend(args.iter().cloned());
            Expr::call("Times", factors)
        }
        other => Expr::call("Times", vec![Expr::Num(inv), other]),
    }
}

/// Parses one expression from `source`.
pub fn parse_expr(source: &str) -> Result<Expr, ParseError> {
    let mut parser = Parser::new(source)?;
    if parser.tok == Tok::Eof {
        return Err(ParseError::new(0, "expected an expression, found end of input"));
    }
    let expr = parser.sum()?.expr;
    match parser.tok {
        Tok::Eof => Ok(expr),
        Tok::Op(c @ (')' | ']')) => Err(ParseError::new(
            parser.tok_pos,
            format!("unbalanced `{c}` with no matching opener"),
        )),
        _ => Err(parser.unexpected("an operator or end of input")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(i: i64) -> Expr {
        Expr::int(i)
    }

    fn rat(n: i64, d: i64) -> Expr {
        Expr::Num(Number::Rational { num: n, den: d })
    }

    fn call(h: &str, args: Vec<Expr>) -> Expr {
        Expr::call(h, args)
    }

    #[test]
    fn simple_call() {
        assert_eq!(parse_expr("Sin[x]").unwrap(), call("Sin", vec![Expr::sym("x")]));
    }

    #[test]
    fn f2_from_the_automatic_example() {
        let e = parse_expr("3*((Cos[2*Sqrt[x]])^2)^(1/3)").unwrap();
        let inner = call(
            "Cos",
            vec![call("Times", vec![num(2), call("Sqrt", vec![Expr::sym("x")])])],
        );
        let expected = call(
            "Times",
            vec![num(3), call("Power", vec![call("Power", vec![inner, num(2)]), rat(1, 3)])],
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn hold_form_with_subtraction() {
        let e = parse_expr("HoldForm[(3*x - 1)^3]").unwrap();
        let expected = Expr::hold(call(
            "Power",
            vec![
                call("Plus", vec![call("Times", vec![num(3), Expr::sym("x")]), num(-1)]),
                num(3),
            ],
        ));
        assert_eq!(e, expected);
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expr("a+b*c^d^e").unwrap();
        let pow = call(
            "Power",
            vec![Expr::sym("c"), call("Power", vec![Expr::sym("d"), Expr::sym("e")])],
        );
        assert_eq!(
            e,
            call("Plus", vec![Expr::sym("a"), call("Times", vec![Expr::sym("b"), pow])])
        );
        assert_eq!(
            parse_expr("-x^2").unwrap(),
            call("Times", vec![num(-1), call("Power", vec![Expr::sym("x"), num(2)])])
        );
        assert_eq!(parse_expr("a-b").unwrap(), parse_expr("a+-b").unwrap());
        assert_eq!(
            parse_expr("(a+b)+c").unwrap(),
            call("Plus", vec![call("Plus", vec![Expr::sym("a"), Expr::sym("b")]), Expr::sym("c")])
        );
    }

    #[test]
    fn division_folding() {
        assert_eq!(parse_expr("3*Pi/2").unwrap(), call("Times", vec![rat(3, 2), Expr::sym("Pi")]));
        assert_eq!(parse_expr("4/2").unwrap(), num(2));
        assert_eq!(parse_expr("-1/2").unwrap(), rat(-1, 2));
        assert_eq!(
            parse_expr("x/y").unwrap(),
            call("Divide", vec![Expr::sym("x"), Expr::sym("y")])
        );
        assert_eq!(parse_expr("x/0").unwrap(), call("Divide", vec![Expr::sym("x"), num(0)]));
    }

    #[test]
    fn decimals_and_strings() {
        assert_eq!(
            parse_expr("0.50").unwrap(),
            Expr::Num(Number::Decimal { mantissa: 50, scale: 2 })
        );
        assert_eq!(parse_expr("\"a \\\"b\\\"\"").unwrap(), Expr::string("a \"b\""));
    }

    #[test]
    fn errors_carry_offsets() {
        let err = parse_expr("Sin[x").unwrap_err();
        assert_eq!(err.offset, 3);
        assert!(err.message.contains("unbalanced"), "{err}");

        let err = parse_expr("(a+b").unwrap_err();
        assert_eq!(err.offset, 0);
        assert!(err.message.contains("unbalanced"));

        let err = parse_expr("a+b]").unwrap_err();
        assert_eq!(err.offset, 3);
        assert!(err.message.contains("unbalanced"));

        let err = parse_expr("2 x").unwrap_err();
        assert_eq!(err.offset, 2);
        assert!(err.message.contains("expected an operator"));

        assert_eq!(parse_expr("").unwrap_err().offset, 0);
        assert_eq!(parse_expr("a + @").unwrap_err().offset, 4);
        assert!(parse_expr("\"open").is_err());
        assert!(parse_expr("HoldForm[a, b]").is_err());
        assert!(parse_expr("99999999999999999999").is_err());
    }
}
