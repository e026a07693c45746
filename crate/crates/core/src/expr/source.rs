use super::{Expr, Number};

const PLUS: u8 = 1;
const TIMES: u8 = 2;
const POWER: u8 = 3;
const ATOM: u8 = 4;

fn is_op(e: &Expr, head: &str, arity_ok: impl Fn(usize) -> bool) -> bool {
    matches!(e, Expr::Call(h, args) if h == head && arity_ok(args.len()))
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Num(Number::Rational { .. }) => TIMES,
        Expr::Num(n) if n.is_negative() => TIMES,
        _ if is_op(e, "Plus", |n| n >= 2) => PLUS,
        _ if is_op(e, "Times", |n| n >= 2) || is_op(e, "Divide", |n| n == 2) => TIMES,
        _ if is_op(e, "Power", |n| n == 2) => POWER,
        _ => ATOM,
    }
}

fn wrapped(e: &Expr, parens: bool) -> String {
    let s = print_source(e);
    if parens {
        format!("({s})")
    } else {
        s
    }
}

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Canonical source form; `parse_expr(&print_source(e)) == e` for trees the
/// parser produces.
pub fn print_source(expr: &Expr) -> String {
    match expr {
        Expr::Num(n) => n.to_string(),
        Expr::Sym(name) => name.clone(),
        Expr::Str(text) => quote(text),
        Expr::Hold(inner) => format!("HoldForm[{}]", print_source(inner)),
        Expr::Call(head, args) => match head.as_str() {
            "Plus" if args.len() >= 2 => {
                let mut out = wrapped(&args[0], precedence(&args[0]) <= PLUS);
                for term in &args[1..] {
                    if term.is_negative_term() {
                        let pos = term.negated();
                        out.push('-');
                        out.push_str(&wrapped(&pos, precedence(&pos) <= PLUS));
                    } else {
                        out.push('+');
                        out.push_str(&wrapped(term, precedence(term) <= PLUS));
                    }
                }
                out
            }
            "Times" if args.len() >= 2 => {
                if args[0] == Expr::int(-1) && !matches!(args[1], Expr::Num(_)) {
                    let rest = if args.len() == 2 {
                        args[1].clone()
                    } else {
                        Expr::call("Times", args[1..].to_vec())
                    };
                    let needs = precedence(&rest) < TIMES;
                    return format!("-{}", wrapped(&rest, needs));
                }
                args.iter()
                    .enumerate()
                    .map(|(i, f)| {
                        let p = precedence(f);
                        let nested_times = is_op(f, "Times", |n| n >= 2);
                        let parens = if i == 0 { p < TIMES || nested_times } else { p <= TIMES };
                        wrapped(f, parens)
                    })
                    .collect::<Vec<_>>()
                    .join("*")
            }
            "Divide" if args.len() == 2 => format!(
                "{}/{}",
                wrapped(&args[0], precedence(&args[0]) < TIMES),
                wrapped(&args[1], precedence(&args[1]) <= TIMES)
            ),
            "Power" if args.len() == 2 => format!(
                "{}^{}",
                wrapped(&args[0], precedence(&args[0]) <= POWER),
                wrapped(&args[1], precedence(&args[1]) < POWER)
            ),
            _ => {
                let inner = args.iter().map(print_source).collect::<Vec<_>>().join(",");
                format!("{head}[{inner}]")
            }
        },
    }
}
