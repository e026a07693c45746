//! A conservative PostScript-subset interpreter that tracks the CTM, current
//! point and font size well enough to locate every `show`n string.
//!
//! Procedure bodies are never executed. A procedure whose body is a single
//! operator name and is bound with `def` becomes an alias of that operator,
//! which covers the usual `/m {moveto} bind def` prologs. Unknown operators
//! pop their operands according to an arity table; names missing from it pop
//! nothing.

use std::collections::HashMap;
use std::ops::Range;

use super::metrics::string_width;
use super::token::{tokenize, PsToken, TokenKind};
use super::EpsError;
use crate::geom::{normalize_degrees, Affine, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct TagOccurrence {
    /// The shown string, decoded as Latin-1.
    pub tag: String,
    /// Device image of the current point at `show`, in points.
    pub device_position: Point,
    /// Direction of the user-space x axis in device space, degrees in
    /// (−180, 180].
    pub rotation: f64,
    /// Length of the device image of the user-space unit x vector.
    pub scale: f64,
    /// Font size in user space.
    pub font_size: f64,
    /// Bytes of the string literal, without leading whitespace.
    pub byte_span: Range<usize>,
    /// Bytes of the `show` operator (or its alias).
    pub show_span: Range<usize>,
    pub ctm: Affine,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scan {
    pub occurrences: Vec<TagOccurrence>,
    pub warnings: Vec<String>,
}

pub fn scan_tags(bytes: &[u8]) -> Result<Vec<TagOccurrence>, EpsError> {
    scan(bytes).map(|s| s.occurrences)
}

pub fn scan(bytes: &[u8]) -> Result<Scan, EpsError> {
    let tokens = tokenize(bytes)?;
    let mut interp = Interpreter::default();
    interp.run(&tokens)?;
    Ok(Scan { occurrences: interp.occurrences, warnings: interp.warnings })
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Num(f64),
    Str { bytes: Vec<u8>, span: Range<usize> },
    Lit(String),
    Array(Vec<Value>),
    /// A skipped procedure; `Some(op)` when its body is the single name `op`.
    Proc(Option<String>),
    Font(f64),
    Mark,
    Other,
}

impl Value {
    fn num(&self) -> Option<f64> {
        match self {
            Value::Num(v) => Some(*v),
            _ => None,
        }
    }

    fn matrix(&self) -> Option<Affine> {
        let Value::Array(items) = self else { return None };
        if items.len() != 6 {
            return None;
        }
        let mut m = [0.0; 6];
        for (slot, v) in m.iter_mut().zip(items) {
            *slot = v.num()?;
        }
        Some(Affine::from_array(m))
    }
}

fn matrix_value(m: Affine) -> Value {
    Value::Array(m.to_array().into_iter().map(Value::Num).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct GraphicsState {
    ctm: Affine,
    /// Device space.
    current_point: Option<Point>,
    font_size: f64,
}

impl Default for GraphicsState {
    fn default() -> Self {
        Self { ctm: Affine::IDENTITY, current_point: None, font_size: 0.0 }
    }
}

#[derive(Debug, Default)]
struct Interpreter {
    stack: Vec<Value>,
    gs: GraphicsState,
    saved: Vec<GraphicsState>,
    aliases: HashMap<String, String>,
    occurrences: Vec<TagOccurrence>,
    warnings: Vec<String>,
}

/// Operands popped and results pushed by operators we do not model.
fn arity(op: &str) -> Option<(usize, usize)> {
    Some(match op {
        "pop" | "setlinewidth" | "setgray" | "setlinecap" | "setlinejoin" | "setmiterlimit"
        | "setflat" | "setstrokeadjust" | "setoverprint" | "setcolorspace" | "end" | "begin"
        | "cvx" | "cvlit" | "exec" | "closefile" | "setpacking" => (1, 0),
        "dict" | "cvi" | "cvr" | "abs" | "sqrt" | "ceiling" | "floor" | "round"
        | "truncate" | "not" | "length" | "type" | "xcheck" | "rcheck" | "wcheck" | "cvn"
        | "readonly" | "executeonly" | "noaccess" | "sin" | "cos" | "ln" | "log"
        | "array" | "string" => (1, 1),
        "setdash" | "known" | "get" | "eq" | "ne" | "gt"
        | "ge" | "lt" | "le" | "and" | "or" | "xor" | "bitshift" | "exp" | "atan"
        | "idiv" | "mod" | "cvs" => (2, 1),
        "setrgbcolor" | "sethsbcolor" | "put" | "ifelse" => (3, 0),
        "setcmykcolor" => (4, 0),
        "if" | "repeat" | "forall" | "store" => (2, 0),
        "for" => (4, 0),
        "rcurveto" => (6, 0),
        "rectstroke" | "rectfill" | "rectclip" => (4, 0),
        "currentpoint" => (0, 2),
        "currentdict" | "userdict" | "systemdict" | "globaldict" | "statusdict"
        | "currentgray" | "currentlinewidth" | "currentfont" => (0, 1),
        "getinterval" => (3, 1),
        "putinterval" => (3, 0),
        "copypage" | "showpage" | "clip" | "eoclip" | "closepath" | "initgraphics"
        | "erasepage" | "stop" | "exit" | "quit" | "flush" => (0, 0),
        _ => return None,
    })
}

const SHOW_VARIANTS: [(&str, usize); 7] = [
    ("ashow", 3),
    ("widthshow", 4),
    ("awidthshow", 6),
    ("kshow", 2),
    ("xshow", 2),
    ("yshow", 2),
    ("xyshow", 2),
];

impl Interpreter {
    fn run(&mut self, tokens: &[PsToken]) -> Result<(), EpsError> {
        let mut i = 0;
        while i < tokens.len() {
            let tok = &tokens[i];
            match &tok.kind {
                TokenKind::Number(v) => self.stack.push(Value::Num(*v)),
                TokenKind::Str(bytes) => {
                    self.stack.push(Value::Str { bytes: bytes.clone(), span: tok.body.clone() })
                }
                TokenKind::LiteralName(n) => self.stack.push(Value::Lit(n.clone())),
                TokenKind::ImmediateName(n) => self.stack.push(self.lookup_value(n)),
                TokenKind::ArrayOpen | TokenKind::DictOpen => self.stack.push(Value::Mark),
                TokenKind::ArrayClose => {
                    let items = self.pop_to_mark();
                    self.stack.push(Value::Array(items));
                }
                TokenKind::DictClose => {
                    self.pop_to_mark();
                    self.stack.push(Value::Other);
                }
                TokenKind::ProcOpen => {
                    let (value, next) = skip_procedure(tokens, i);
                    self.stack.push(value);
                    i = next;
                    continue;
                }
                // The tokenizer rejects unmatched closers.
                TokenKind::ProcClose => {}
                TokenKind::Comment(_) | TokenKind::Trailing => {}
                TokenKind::Name(name) => {
                    let op = self.resolve(name);
                    self.execute(&op, tok)?;
                }
            }
            i += 1;
        }
        Ok(())
    }

    fn resolve(&self, name: &str) -> String {
        let mut current = name;
        // Alias chains are short; the bound guards against cycles.
        for _ in 0..16 {
            match self.aliases.get(current) {
                Some(target) => current = target,
                None => break,
            }
        }
        current.to_string()
    }

    /// Value of `//name`: the operator it currently resolves to.
    fn lookup_value(&self, name: &str) -> Value {
        Value::Proc(Some(self.resolve(name)))
    }

    fn pop_to_mark(&mut self) -> Vec<Value> {
        match self.stack.iter().rposition(|v| *v == Value::Mark) {
            Some(m) => {
                let items = self.stack.split_off(m + 1);
                self.stack.pop();
                items
            }
            None => std::mem::take(&mut self.stack),
        }
    }

    fn pop(&mut self, op: &str, tok: &PsToken) -> Result<Value, EpsError> {
        self.stack
            .pop()
            .ok_or_else(|| EpsError::new(tok.body.start, format!("stack underflow in `{op}`")))
    }

    fn pop_num(&mut self, op: &str, tok: &PsToken) -> Result<f64, EpsError> {
        match self.pop(op, tok)? {
            Value::Num(v) => Ok(v),
            _ => Err(EpsError::new(tok.body.start, format!("`{op}` expects a number"))),
        }
    }

    fn pop_nums<const N: usize>(&mut self, op: &str, tok: &PsToken) -> Result<[f64; N], EpsError> {
        let mut out = [0.0; N];
        for slot in out.iter_mut().rev() {
            *slot = self.pop_num(op, tok)?;
        }
        Ok(out)
    }

    fn pop_discard(&mut self, n: usize) {
        let keep = self.stack.len().saturating_sub(n);
        self.stack.truncate(keep);
    }

    fn set_ctm(&mut self, m: Affine, tok: &PsToken) -> Result<(), EpsError> {
        if m.inverse().is_none() {
            return Err(EpsError::new(tok.body.start, "singular transformation matrix"));
        }
        self.gs.ctm = m;
        Ok(())
    }

    /// Applies `m` in user space: `m` acts first, then the current CTM.
    fn concat(&mut self, m: Affine, tok: &PsToken) -> Result<(), EpsError> {
        let ctm = self.gs.ctm.then_after(m);
        self.set_ctm(ctm, tok)
    }

    fn current_point(&self, op: &str, tok: &PsToken) -> Result<Point, EpsError> {
        self.gs
            .current_point
            .ok_or_else(|| EpsError::new(tok.body.start, format!("no current point for `{op}`")))
    }

    fn execute(&mut self, op: &str, tok: &PsToken) -> Result<(), EpsError> {
        match op {
            "translate" | "scale" => {
                if matches!(self.stack.last(), Some(Value::Array(_))) {
                    // Matrix-operand form only fills the matrix.
                    let m = self.pop(op, tok)?;
                    self.pop_discard(2);
                    self.stack.push(m);
                    return Ok(());
                }
                let [x, y] = self.pop_nums(op, tok)?;
                let m = if op == "translate" { Affine::translate(x, y) } else { Affine::scale(x, y) };
                self.concat(m, tok)?;
            }
            "rotate" => {
                if matches!(self.stack.last(), Some(Value::Array(_))) {
                    let m = self.pop(op, tok)?;
                    self.pop_discard(1);
                    self.stack.push(m);
                    return Ok(());
                }
                let [angle] = self.pop_nums(op, tok)?;
                self.concat(Affine::rotate(angle), tok)?;
            }
            "concat" => {
                let m = self.pop(op, tok)?;
                let m = m
                    .matrix()
                    .ok_or_else(|| EpsError::new(tok.body.start, "`concat` expects a 6-number matrix"))?;
                self.concat(m, tok)?;
            }
            "setmatrix" => {
                let m = self.pop(op, tok)?;
                let m = m
                    .matrix()
                    .ok_or_else(|| EpsError::new(tok.body.start, "`setmatrix` expects a 6-number matrix"))?;
                self.set_ctm(m, tok)?;
            }
            "matrix" => self.stack.push(matrix_value(Affine::IDENTITY)),
            "currentmatrix" => {
                self.pop(op, tok)?;
                self.stack.push(matrix_value(self.gs.ctm));
            }
            "initmatrix" => self.gs.ctm = Affine::IDENTITY,
            "gsave" => self.saved.push(self.gs),
            "grestore" => {
                self.gs = self
                    .saved
                    .pop()
                    .ok_or_else(|| EpsError::new(tok.body.start, "`grestore` without matching `gsave`"))?;
            }
            "save" => {
                self.saved.push(self.gs);
                self.stack.push(Value::Other);
            }
            "restore" => {
                self.pop(op, tok)?;
                if let Some(gs) = self.saved.pop() {
                    self.gs = gs;
                }
            }
            "newpath" | "stroke" | "fill" | "eofill" => self.gs.current_point = None,
            "moveto" | "lineto" => {
                let [x, y] = self.pop_nums(op, tok)?;
                self.gs.current_point = Some(self.gs.ctm.apply(Point::new(x, y)));
            }
            "rmoveto" | "rlineto" => {
                let [dx, dy] = self.pop_nums(op, tok)?;
                let p = self.current_point(op, tok)?;
                self.gs.current_point = Some(p + self.gs.ctm.apply_vector(Point::new(dx, dy)));
            }
            "curveto" => {
                let [_, _, _, _, x, y] = self.pop_nums(op, tok)?;
                self.gs.current_point = Some(self.gs.ctm.apply(Point::new(x, y)));
            }
            "arc" | "arcn" => {
                let [x, y, r, _, a2] = self.pop_nums(op, tok)?;
                let rad = a2.to_radians();
                let end = Point::new(x + r * rad.cos(), y + r * rad.sin());
                self.gs.current_point = Some(self.gs.ctm.apply(end));
            }
            "findfont" => {
                self.pop(op, tok)?;
                self.stack.push(Value::Font(1.0));
            }
            "scalefont" => {
                let [s] = self.pop_nums(op, tok)?;
                let font = self.pop(op, tok)?;
                let base = if let Value::Font(f) = font { f } else { 1.0 };
                self.stack.push(Value::Font(base * s));
            }
            "makefont" => {
                let m = self.pop(op, tok)?;
                let font = self.pop(op, tok)?;
                let base = if let Value::Font(f) = font { f } else { 1.0 };
                let s = m.matrix().map_or(1.0, |m| m.x_axis_scale());
                self.stack.push(Value::Font(base * s));
            }
            "setfont" => {
                if let Value::Font(size) = self.pop(op, tok)? {
                    self.gs.font_size = size;
                }
            }
            "selectfont" => {
                let size = self.pop(op, tok)?;
                self.pop(op, tok)?;
                self.gs.font_size = match size {
                    Value::Num(s) => s,
                    other => other.matrix().map_or(self.gs.font_size, |m| m.x_axis_scale()),
                };
            }
            "show" => {
                let Value::Str { bytes, span } = self.pop(op, tok)? else {
                    return Err(EpsError::new(tok.body.start, "`show` expects a string"));
                };
                let p = self.current_point(op, tok)?;
                let ctm = self.gs.ctm;
                self.occurrences.push(TagOccurrence {
                    tag: bytes.iter().map(|&b| b as char).collect(),
                    device_position: p,
                    rotation: normalize_degrees(ctm.x_axis_angle()),
                    scale: ctm.x_axis_scale(),
                    font_size: self.gs.font_size,
                    byte_span: span,
                    show_span: tok.body.clone(),
                    ctm,
                });
                let advance = string_width(&bytes, self.gs.font_size);
                self.gs.current_point = Some(p + ctm.apply_vector(Point::new(advance, 0.0)));
            }
            "stringwidth" => {
                let Value::Str { bytes, .. } = self.pop(op, tok)? else {
                    return Err(EpsError::new(tok.body.start, "`stringwidth` expects a string"));
                };
                self.stack.push(Value::Num(string_width(&bytes, self.gs.font_size)));
                self.stack.push(Value::Num(0.0));
            }
            "add" | "sub" | "mul" | "div" => {
                let b = self.pop(op, tok)?;
                let a = self.pop(op, tok)?;
                let result = match (a.num(), b.num()) {
                    (Some(a), Some(b)) => match op {
                        "add" => Value::Num(a + b),
                        "sub" => Value::Num(a - b),
                        "mul" => Value::Num(a * b),
                        _ if b != 0.0 => Value::Num(a / b),
                        _ => Value::Other,
                    },
                    _ => Value::Other,
                };
                self.stack.push(result);
            }
            "neg" => {
                let a = self.pop(op, tok)?;
                self.stack.push(a.num().map_or(Value::Other, |v| Value::Num(-v)));
            }
            "dup" => {
                let top = self.pop(op, tok)?;
                self.stack.push(top.clone());
                self.stack.push(top);
            }
            "exch" => {
                let b = self.pop(op, tok)?;
                let a = self.pop(op, tok)?;
                self.stack.push(b);
                self.stack.push(a);
            }
            "clear" => self.stack.clear(),
            "cleartomark" => {
                self.pop_to_mark();
            }
            "mark" => self.stack.push(Value::Mark),
            "bind" => {}
            "load" => {
                if let Value::Lit(name) = self.pop(op, tok)? {
                    let target = self.resolve(&name);
                    self.stack.push(Value::Proc(Some(target)));
                } else {
                    self.stack.push(Value::Other);
                }
            }
            "def" => {
                let value = self.pop(op, tok)?;
                let key = self.pop(op, tok)?;
                if let Value::Lit(name) = key {
                    match value {
                        Value::Proc(Some(target)) if target != name => {
                            self.aliases.insert(name, target);
                        }
                        _ => {
                            // Redefinition hides any earlier alias.
                            self.aliases.remove(&name);
                        }
                    }
                }
            }
            _ => {
                if let Some(&(_, n)) = SHOW_VARIANTS.iter().find(|(name, _)| *name == op) {
                    self.warnings.push(format!(
                        "byte {}: `{op}` is not tracked; its text is not reported",
                        tok.body.start
                    ));
                    self.pop_discard(n);
                } else if let Some((pops, pushes)) = arity(op) {
                    self.pop_discard(pops);
                    self.stack.extend(std::iter::repeat_n(Value::Other, pushes));
                }
            }
        }
        Ok(())
    }
}

/// Skips the procedure opening at `open`; returns its value and the index
/// after the matching `}`.
fn skip_procedure(tokens: &[PsToken], open: usize) -> (Value, usize) {
    let mut depth = 0usize;
    let mut j = open;
    while j < tokens.len() {
        match tokens[j].kind {
            TokenKind::ProcOpen => depth += 1,
            TokenKind::ProcClose => {
                depth -= 1;
                if depth == 0 {
                    break;
                }
            }
            _ => {}
        }
        j += 1;
    }
    let body: Vec<&TokenKind> = tokens[open + 1..j.min(tokens.len())]
        .iter()
        .map(|t| &t.kind)
        .filter(|k| !matches!(k, TokenKind::Comment(_)))
        .collect();
    let single = match body.as_slice() {
        [TokenKind::Name(n)] => Some(n.clone()),
        _ => None,
    };
    (Value::Proc(single), j + 1)
}
