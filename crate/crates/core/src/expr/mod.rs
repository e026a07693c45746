//! Symbolic expressions used as label contents.
//!
//! The tree mirrors the bracketed `Head[arg, ...]` notation of the source
//! syntax: sums are `Plus`, products `Times`, powers `Power`, and exact
//! fractions are stored as [`Number::Rational`] literals. [`Expr::Hold`]
//! freezes operand order for rendering.

mod hooks;
mod parse;
mod source;
mod tex;

pub use hooks::{HookSet, PreApply};
pub use parse::{parse_expr, ParseError};
pub use source::print_source;
pub use tex::{guess_tex, guess_tex_with, to_tex, TexOutput};

use std::cmp::Ordering;
use std::fmt;

/// Numeric literal with its recorded precision.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Number {
    Integer(i64),
    /// Reduced fraction with `den > 1`.
    Rational { num: i64, den: i64 },
    /// `mantissa / 10^scale`, printed with exactly `scale` fractional digits.
    Decimal { mantissa: i64, scale: u32 },
}

impl Number {
    /// Builds `num/den` in lowest terms; collapses to an integer when possible.
    pub fn rational(num: i64, den: i64) -> Option<Number> {
        if den == 0 {
            return None;
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        let g = if g == 0 { 1 } else { g };
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = n.checked_neg()?;
            d = d.checked_neg()?;
        }
        Some(if d == 1 { Number::Integer(n) } else { Number::Rational { num: n, den: d } })
    }

    pub fn value(&self) -> f64 {
        match *self {
            Number::Integer(i) => i as f64,
            Number::Rational { num, den } => num as f64 / den as f64,
            Number::Decimal { mantissa, scale } => mantissa as f64 / 10f64.powi(scale as i32),
        }
    }

    pub fn is_negative(&self) -> bool {
        match *self {
            Number::Integer(i) => i < 0,
            Number::Rational { num, .. } => num < 0,
            Number::Decimal { mantissa, .. } => mantissa < 0,
        }
    }

    pub fn negate(&self) -> Option<Number> {
        Some(match *self {
            Number::Integer(i) => Number::Integer(i.checked_neg()?),
            Number::Rational { num, den } => Number::Rational { num: num.checked_neg()?, den },
            Number::Decimal { mantissa, scale } => {
                Number::Decimal { mantissa: mantissa.checked_neg()?, scale }
            }
        })
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Number::Decimal { .. })
    }

    /// Exact product; `None` for decimals or on overflow.
    pub fn exact_mul(&self, other: &Number) -> Option<Number> {
        let (n1, d1) = self.as_fraction()?;
        let (n2, d2) = other.as_fraction()?;
        Number::rational(n1.checked_mul(n2)?, d1.checked_mul(d2)?)
    }

    fn as_fraction(&self) -> Option<(i64, i64)> {
        match *self {
            Number::Integer(i) => Some((i, 1)),
            Number::Rational { num, den } => Some((num, den)),
            Number::Decimal { .. } => None,
        }
    }
}

impl fmt::Display for Number {
    /// Plain literal form: `3`, `-1/2`, `0.50`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Number::Integer(i) => write!(f, "{i}"),
            Number::Rational { num, den } => write!(f, "{num}/{den}"),
            Number::Decimal { mantissa, scale } => {
                let sign = if mantissa < 0 { "-" } else { "" };
                let digits = mantissa.unsigned_abs().to_string();
                let scale = scale as usize;
                let padded = if digits.len() <= scale {
                    format!("{}{}", "0".repeat(scale + 1 - digits.len()), digits)
                } else {
                    digits
                };
                let (int, frac) = padded.split_at(padded.len() - scale);
                write!(f, "{sign}{int}.{frac}")
            }
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(Number),
    Sym(String),
    Str(String),
    Call(String, Vec<Expr>),
    Hold(Box<Expr>),
}

/// Heads closed under numeric arguments.
const NUMERIC_HEADS: &[&str] = &[
    "Plus", "Times", "Power", "Sqrt", "Sin", "Cos", "Tan", "Log", "Exp", "Abs", "Rational",
    "Divide",
];

impl Expr {
    pub fn int(i: i64) -> Expr {
        Expr::Num(Number::Integer(i))
    }

    pub fn sym(name: impl Into<String>) -> Expr {
        Expr::Sym(name.into())
    }

    pub fn string(text: impl Into<String>) -> Expr {
        Expr::Str(text.into())
    }

    pub fn call(head: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Call(head.into(), args)
    }

    /// Wraps in `Hold`, collapsing nested holds.
    pub fn hold(inner: Expr) -> Expr {
        match inner {
            Expr::Hold(_) => inner,
            other => Expr::Hold(Box::new(other)),
        }
    }

    /// Strips any `Hold` wrapper.
    pub fn unheld(&self) -> &Expr {
        match self {
            Expr::Hold(inner) => inner.unheld(),
            other => other,
        }
    }

    pub fn head(&self) -> Option<&str> {
        match self {
            Expr::Call(head, _) => Some(head),
            _ => None,
        }
    }

    /// True for numbers, the constants `Pi` and `E`, and closed numeric calls.
    pub fn numeric_q(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Sym(name) => name == "Pi" || name == "E",
            Expr::Str(_) => false,
            Expr::Call(head, args) => {
                NUMERIC_HEADS.contains(&head.as_str()) && args.iter().all(Expr::numeric_q)
            }
            Expr::Hold(inner) => inner.numeric_q(),
        }
    }

    pub fn classify(&self) -> LabelClass {
        match self.unheld() {
            Expr::Str(_) => LabelClass::Text,
            e if e.numeric_q() => LabelClass::Numeric,
            _ => LabelClass::Math,
        }
    }

    /// Floating-point value of a numeric expression.
    pub fn numeric_value(&self) -> Option<f64> {
        let v = match self {
            Expr::Num(n) => n.value(),
            Expr::Sym(name) => match name.as_str() {
                "Pi" => std::f64::consts::PI,
                "E" => std::f64::consts::E,
                _ => return None,
            },
            Expr::Str(_) => return None,
            Expr::Hold(inner) => return inner.numeric_value(),
            Expr::Call(head, args) => {
                let vals = args.iter().map(Expr::numeric_value).collect::<Option<Vec<_>>>()?;
                match (head.as_str(), vals.as_slice()) {
                    ("Plus", vs) => vs.iter().sum(),
                    ("Times", vs) => vs.iter().product(),
                    ("Power", [b, e]) => b.powf(*e),
                    ("Divide", [a, b]) => a / b,
                    ("Rational", [a, b]) => a / b,
                    ("Sqrt", [x]) => x.sqrt(),
                    ("Sin", [x]) => x.sin(),
                    ("Cos", [x]) => x.cos(),
                    ("Tan", [x]) => x.tan(),
                    ("Log", [x]) => x.ln(),
                    ("Exp", [x]) => x.exp(),
                    ("Abs", [x]) => x.abs(),
                    _ => return None,
                }
            }
        };
        v.is_finite().then_some(v)
    }

    /// `-self`, folding the sign into literals and leading coefficients.
    pub fn negated(&self) -> Expr {
        match self {
            Expr::Num(n) => match n.negate() {
                Some(m) => Expr::Num(m),
                None => Expr::call("Times", vec![Expr::int(-1), self.clone()]),
            },
            Expr::Call(head, args) if head == "Times" && !args.is_empty() => {
                if let Expr::Num(n) = &args[0] {
                    if let Some(m) = n.negate() {
                        let mut rest = args.clone();
                        if m == Number::Integer(1) && rest.len() > 1 {
                            rest.remove(0);
                            return if rest.len() == 1 {
                                rest.pop().unwrap()
                            } else {
                                Expr::call("Times", rest)
                            };
                        }
                        rest[0] = Expr::Num(m);
                        return Expr::call("Times", rest);
                    }
                }
                let mut factors = vec![Expr::int(-1)];
                factors.extend(args.iter().cloned());
                Expr::call("Times", factors)
            }
            _ => Expr::call("Times", vec![Expr::int(-1), self.clone()]),
        }
    }

    /// Whether the expression prints with a leading minus sign.
    pub fn is_negative_term(&self) -> bool {
        match self {
            Expr::Num(n) => n.is_negative(),
            Expr::Call(head, args) if head == "Times" => {
                matches!(args.first(), Some(Expr::Num(n)) if n.is_negative())
            }
            _ => false,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_source(self))
    }
}

/// Typesetting class of a label, selecting its style and scale hooks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabelClass {
    Text,
    Math,
    Numeric,
}

impl LabelClass {
    pub const ALL: [LabelClass; 3] = [LabelClass::Text, LabelClass::Math, LabelClass::Numeric];

    pub fn name(self) -> &'static str {
        match self {
            LabelClass::Text => "text",
            LabelClass::Math => "math",
            LabelClass::Numeric => "numeric",
        }
    }
}

pub fn numeric_q(expr: &Expr) -> bool {
    expr.numeric_q()
}

pub fn classify(expr: &Expr) -> LabelClass {
    expr.classify()
}

/// Canonical operand order for `Plus`/`Times`: numbers by value, then
/// symbols by name, then everything else in stored order.
pub(crate) fn canonical_cmp(a: &Expr, b: &Expr) -> Ordering {
    fn rank(e: &Expr) -> u8 {
        match e {
            Expr::Num(_) => 0,
            Expr::Sym(_) => 1,
            _ => 2,
        }
    }
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => x.value().total_cmp(&y.value()),
        (Expr::Sym(x), Expr::Sym(y)) => x.cmp(y),
        _ => rank(a).cmp(&rank(b)),
    }
}
