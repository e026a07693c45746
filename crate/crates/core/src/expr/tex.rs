//! LaTeX rendering of expressions and the styled label wrapper.

use super::{canonical_cmp, Expr, HookSet, LabelClass, Number};

/// Rendered LaTeX plus non-fatal diagnostics (unknown heads and the like).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TexOutput {
    pub text: String,
    pub warnings: Vec<String>,
}

const FUNCTIONS: &[(&str, &str)] = &[
    ("Sin", "\\sin"),
    ("Cos", "\\cos"),
    ("Tan", "\\tan"),
    ("Cot", "\\cot"),
    ("Sec", "\\sec"),
    ("Csc", "\\csc"),
    ("Sinh", "\\sinh"),
    ("Cosh", "\\cosh"),
    ("Tanh", "\\tanh"),
    ("Log", "\\log"),
    ("Exp", "\\exp"),
];

const TRIG: &[&str] = &["Sin", "Cos", "Tan", "Cot", "Sec", "Csc", "Sinh", "Cosh", "Tanh"];

const GREEK: &[&str] = &[
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa",
    "lambda", "mu", "nu", "xi", "rho", "sigma", "tau", "upsilon", "phi", "chi", "psi", "omega",
    "Gamma", "Delta", "Theta", "Lambda", "Xi", "Sigma", "Upsilon", "Phi", "Psi", "Omega",
];

/// Escapes LaTeX text-mode specials.
pub(crate) fn escape_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '#' | '$' | '%' | '&' | '_' | '{' | '}' => {
                out.push('\\');
                out.push(c);
            }
            '~' => out.push_str("\\textasciitilde{}"),
            '^' => out.push_str("\\textasciicircum{}"),
            '\\' => out.push_str("\\textbackslash{}"),
            c => out.push(c),
        }
    }
    out
}

fn symbol(name: &str) -> String {
    match name {
        "Pi" => "\\pi".to_string(),
        "E" => "e".to_string(),
        "Infinity" => "\\infty".to_string(),
        _ if name.chars().count() == 1 => name.to_string(),
        _ if GREEK.contains(&name) => format!("\\{name}"),
        _ => format!("\\text{{{}}}", escape_text(name)),
    }
}

fn superscript(exp: &str) -> String {
    if exp.chars().count() == 1 {
        format!("^{exp}")
    } else {
        format!("^{{{exp}}}")
    }
}

fn is_call(e: &Expr, head: &str) -> bool {
    matches!(e, Expr::Call(h, _) if h == head)
}

struct Renderer {
    hold: bool,
    warnings: Vec<String>,
}

impl Renderer {
    fn render(&mut self, e: &Expr) -> String {
        match e {
            Expr::Num(n) => number(n),
            Expr::Sym(name) => symbol(name),
            Expr::Str(text) => format!("\\text{{{}}}", escape_text(text)),
            Expr::Hold(inner) => {
                let outer = std::mem::replace(&mut self.hold, true);
                let s = self.render(inner);
                self.hold = outer;
                s
            }
            Expr::Call(head, args) => self.call(head, args),
        }
    }

    fn ordered(&self, args: &[Expr]) -> Vec<Expr> {
        let mut v = args.to_vec();
        if !self.hold {
            v.sort_by(canonical_cmp);
        }
        v
    }

    fn paren_if(&mut self, e: &Expr, cond: bool) -> String {
        let s = self.render(e);
        if cond {
            format!("({s})")
        } else {
            s
        }
    }

    fn call(&mut self, head: &str, args: &[Expr]) -> String {
        match (head, args) {
            ("Plus", [_, _, ..]) => self.plus(args),
            ("Times", [_, _, ..]) => self.times(args),
            ("Power", [base, exp]) => self.power(base, exp),
            ("Sqrt", [x]) => format!("\\sqrt{{{}}}", self.render(x)),
            ("Abs", [x]) => format!("\\left|{}\\right|", self.render(x)),
            ("Rational" | "Divide", [p, q]) => {
                format!("\\frac{{{}}}{{{}}}", self.render(p), self.render(q))
            }
            (h, [x]) if FUNCTIONS.iter().any(|(name, _)| *name == h) => {
                let macro_name = FUNCTIONS.iter().find(|(name, _)| *name == h).unwrap().1;
                format!("{macro_name} ({})", self.render(x))
            }
            _ => {
                self.warnings.push(format!(
                    "no LaTeX form for head `{head}` with {} argument(s); rendered as text",
                    args.len()
                ));
                let inner: Vec<String> = args.iter().map(|a| self.render(a)).collect();
                format!("\\text{{{}}}({})", escape_text(head), inner.join(", "))
            }
        }
    }

    fn plus(&mut self, args: &[Expr]) -> String {
        let terms = self.ordered(args);
        let mut out = String::new();
        for (i, term) in terms.iter().enumerate() {
            if i > 0 && term.is_negative_term() {
                out.push('-');
                let pos = term.negated();
                let s = self.paren_if(&pos, is_call(&pos, "Plus"));
                out.push_str(&s);
            } else {
                if i > 0 {
                    out.push('+');
                }
                let s = self.paren_if(term, is_call(term, "Plus"));
                out.push_str(&s);
            }
        }
        out
    }

    fn times(&mut self, args: &[Expr]) -> String {
        let factors = self.ordered(args);
        let mut negative = false;
        let mut numer: Vec<Expr> = Vec::new();
        let mut denom: Vec<Expr> = Vec::new();
        for (i, f) in factors.iter().enumerate() {
            match f {
                Expr::Num(n) if i == 0 && n.is_negative() && n.is_exact() => {
                    negative = true;
                    let abs = n.negate().unwrap_or_else(|| n.clone());
                    split_coefficient(&abs, &mut numer, &mut denom, factors.len() > 1);
                }
                Expr::Num(n @ Number::Rational { num, .. }) if *num > 0 => {
                    split_coefficient(n, &mut numer, &mut denom, factors.len() > 1);
                }
                Expr::Call(h, pa) if h == "Power" && pa.len() == 2 => match &pa[1] {
                    Expr::Num(Number::Integer(k)) if *k < 0 && k.checked_neg().is_some() => {
                        denom.push(if *k == -1 {
                            pa[0].clone()
                        } else {
                            Expr::call("Power", vec![pa[0].clone(), Expr::int(-k)])
                        });
                    }
                    _ => numer.push(f.clone()),
                },
                _ => numer.push(f.clone()),
            }
        }
        let numer_tex = self.product(&numer);
        let body = if denom.is_empty() {
            numer_tex
        } else {
            let denom_tex = self.product(&denom);
            format!("\\frac{{{numer_tex}}}{{{denom_tex}}}")
        };
        if negative {
            format!("-{body}")
        } else {
            body
        }
    }

    fn product(&mut self, factors: &[Expr]) -> String {
        if factors.is_empty() {
            return "1".to_string();
        }
        let many = factors.len() > 1;
        factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let negative_inner = i > 0 && f.is_negative_term();
                self.paren_if(f, (many && is_call(f, "Plus")) || negative_inner)
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn power(&mut self, base: &Expr, exp: &Expr) -> String {
        match exp {
            Expr::Num(Number::Rational { num: 1, den: 2 }) => {
                return format!("\\sqrt{{{}}}", self.render(base));
            }
            Expr::Num(Number::Rational { num: 1, den }) if *den >= 3 => {
                return format!("\\sqrt[{den}]{{{}}}", self.render(base));
            }
            Expr::Num(Number::Integer(k)) if *k > 0 => {
                if let Expr::Call(h, a) = base {
                    if a.len() == 1 && TRIG.contains(&h.as_str()) {
                        let macro_name = FUNCTIONS.iter().find(|(n, _)| n == h).unwrap().1;
                        let arg = self.render(&a[0]);
                        return format!("{macro_name} {}({arg})", superscript(&k.to_string()));
                    }
                }
            }
            Expr::Num(Number::Integer(k)) if *k < 0 && k.checked_neg().is_some() => {
                let denom = if *k == -1 {
                    self.render(base)
                } else {
                    self.power(base, &Expr::int(-k))
                };
                return format!("\\frac{{1}}{{{denom}}}");
            }
            _ => {}
        }
        let base_parens = match base {
            Expr::Num(n) => n.is_negative() || matches!(n, Number::Rational { .. }),
            Expr::Call(h, a) => {
                matches!(h.as_str(), "Plus" | "Times" | "Power" | "Divide" | "Rational")
                    && a.len() >= 2
            }
            _ => false,
        };
        let b = self.paren_if(base, base_parens);
        let e = self.render(exp);
        format!("{b}{}", superscript(&e))
    }
}

fn split_coefficient(n: &Number, numer: &mut Vec<Expr>, denom: &mut Vec<Expr>, has_others: bool) {
    match *n {
        Number::Rational { num, den } => {
            if num != 1 || !has_others {
                numer.push(Expr::int(num));
            }
            denom.push(Expr::int(den));
        }
        Number::Integer(1) if has_others => {}
        _ => numer.push(Expr::Num(n.clone())),
    }
}

fn number(n: &Number) -> String {
    match *n {
        Number::Rational { num, den } if num < 0 => {
            format!("-\\frac{{{}}}{{{den}}}", num.unsigned_abs())
        }
        Number::Rational { num, den } => format!("\\frac{{{num}}}{{{den}}}"),
        _ => n.to_string(),
    }
}

/// Precedence-aware LaTeX math rendering. Outside `Hold`, operands of
/// `Plus` and `Times` are put in canonical order.
pub fn to_tex(expr: &Expr) -> TexOutput {
    let mut r = Renderer { hold: false, warnings: Vec::new() };
    let text = r.render(expr);
    TexOutput { text, warnings: r.warnings }
}

/// Styled label body with the scale hook included (Automatic scaling).
pub fn guess_tex(expr: &Expr, hooks: &HookSet) -> TexOutput {
    guess_tex_with(expr, hooks, true)
}

/// Classifies `expr`, runs that class's pre-apply hooks, renders, wraps the
/// result in the class template and finally applies post-replacements.
pub fn guess_tex_with(expr: &Expr, hooks: &HookSet, scale_hook: bool) -> TexOutput {
    let class = expr.classify();
    let prepared = hooks.run_pre_apply(class, expr);
    let (body, warnings) = match class {
        LabelClass::Text => {
            let plain = match prepared.unheld() {
                Expr::Str(s) => s.clone(),
                other => super::print_source(other),
            };
            (escape_text(&plain), Vec::new())
        }
        _ => {
            let out = to_tex(&prepared);
            (out.text, out.warnings)
        }
    };
    let wrapped = match (class, scale_hook) {
        (LabelClass::Text, true) => format!("\\psfragtextstyle{{\\psfragscaletext {body}}}"),
        (LabelClass::Text, false) => format!("\\psfragtextstyle{{{body}}}"),
        (LabelClass::Math, true) => format!("\\psfragmathstyle{{$\\psfragscalemath {body}$}}"),
        (LabelClass::Math, false) => format!("\\psfragmathstyle{{${body}$}}"),
        (LabelClass::Numeric, true) => {
            format!("\\psfragnumericstyle{{$\\psfragscalenumeric {body}$}}")
        }
        (LabelClass::Numeric, false) => format!("\\psfragnumericstyle{{${body}$}}"),
    };
    TexOutput { text: hooks.run_post_replace(class, wrapped), warnings }
}
