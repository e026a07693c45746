use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::{Expr, LabelClass};

/// Expression transform run before LaTeX conversion.
#[derive(Clone)]
pub enum PreApply {
    /// Wraps the expression in `Hold`, freezing operand order.
    Hold,
    /// Distributes negative numeric coefficients over sums:
    /// `-2 (a + b)` becomes `-2 a - 2 b`.
    ExpandNegations,
    Custom(Arc<dyn Fn(&Expr) -> Expr + Send + Sync>),
}

impl PreApply {
    /// Looks up a built-in transform by its hook-file name.
    pub fn named(name: &str) -> Option<PreApply> {
        match name {
            "hold" => Some(PreApply::Hold),
            "expand_negations" => Some(PreApply::ExpandNegations),
            _ => None,
        }
    }

    pub fn apply(&self, expr: &Expr) -> Expr {
        match self {
            PreApply::Hold => Expr::hold(expr.clone()),
            PreApply::ExpandNegations => expand_negations(expr),
            PreApply::Custom(f) => f(expr),
        }
    }
}

impl fmt::Debug for PreApply {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PreApply::Hold => f.write_str("Hold"),
            PreApply::ExpandNegations => f.write_str("ExpandNegations"),
            PreApply::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

fn expand_negations(expr: &Expr) -> Expr {
    match expr {
        Expr::Hold(inner) => Expr::hold(expand_negations(inner)),
        Expr::Call(head, args) => {
            let args: Vec<Expr> = args.iter().map(expand_negations).collect();
            if head == "Times" && args.len() == 2 {
                if let (Expr::Num(c), Expr::Call(h, terms)) = (&args[0], &args[1]) {
                    if c.is_negative() && h == "Plus" {
                        let distributed = terms
                            .iter()
                            .map(|t| match t {
                                Expr::Num(n) => match n.exact_mul(c) {
                                    Some(m) => Expr::Num(m),
                                    None => Expr::call("Times", vec![args[0].clone(), t.clone()]),
                                },
                                Expr::Call(th, tf) if th == "Times" => {
                                    let mut f = vec![args[0].clone()];
                                    f.extend(tf.iter().cloned());
                                    fold_leading(f)
                                }
                                _ => Expr::call("Times", vec![args[0].clone(), t.clone()]),
                            })
                            .collect();
                        return Expr::call("Plus", distributed);
                    }
                }
            }
            Expr::Call(head.clone(), args)
        }
        other => other.clone(),
    }
}

/// Merges the first two factors when both are exact numbers.
fn fold_leading(mut factors: Vec<Expr>) -> Expr {
    if let [Expr::Num(a), Expr::Num(b), ..] = factors.as_slice() {
        if let Some(m) = a.exact_mul(b) {
            factors.splice(0..2, [Expr::Num(m)]);
        }
    }
    match factors.len() {
        1 => factors.pop().unwrap(),
        _ => Expr::call("Times", factors),
    }
}

/// Per-class pre-conversion transforms and post-conversion literal
/// string replacements. Hooks run in list order.
#[derive(Debug, Clone, Default)]
pub struct HookSet {
    pre_apply: HashMap<LabelClass, Vec<PreApply>>,
    post_replace: HashMap<LabelClass, Vec<(String, String)>>,
}

impl HookSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_pre_apply(mut self, class: LabelClass, hook: PreApply) -> Self {
        self.pre_apply.entry(class).or_default().push(hook);
        self
    }

    pub fn with_post_replace(
        mut self,
        class: LabelClass,
        find: impl Into<String>,
        replace: impl Into<String>,
    ) -> Self {
        self.post_replace
            .entry(class)
            .or_default()
            .push((find.into(), replace.into()));
        self
    }

    pub fn pre_apply(&self, class: LabelClass) -> &[PreApply] {
        self.pre_apply.get(&class).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn post_replace(&self, class: LabelClass) -> &[(String, String)] {
        self.post_replace.get(&class).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn run_pre_apply(&self, class: LabelClass, expr: &Expr) -> Expr {
        self.pre_apply(class)
            .iter()
            .fold(expr.clone(), |acc, hook| hook.apply(&acc))
    }

    pub fn run_post_replace(&self, class: LabelClass, text: String) -> String {
        self.post_replace(class).iter().fold(text, |acc, (find, replace)| {
            if find.is_empty() {
                acc
            } else {
                acc.replace(find.as_str(), replace)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_expr, print_source};
    use super::*;

    #[test]
    fn expand_negations_distributes() {
        let e = parse_expr("-2*(a+3*b+1)").unwrap();
        assert_eq!(print_source(&PreApply::ExpandNegations.apply(&e)), "-2*a-6*b-2");
        let untouched = parse_expr("2*(a+b)").unwrap();
        assert_eq!(PreApply::ExpandNegations.apply(&untouched), untouched);
    }

    #[test]
    fn hooks_run_in_order() {
        let hooks = HookSet::new()
            .with_post_replace(LabelClass::Math, "a", "b")
            .with_post_replace(LabelClass::Math, "b", "c");
        assert_eq!(hooks.run_post_replace(LabelClass::Math, "ab".into()), "cc");
        assert_eq!(hooks.run_post_replace(LabelClass::Text, "ab".into()), "ab");
    }

    #[test]
    fn named_lookup() {
        assert!(matches!(PreApply::named("hold"), Some(PreApply::Hold)));
        assert!(PreApply::named("simplify").is_none());
    }
}
