//! Tags, alignment codes and `\psfrag` entries.

mod export;
mod pos;
mod texfile;

pub use export::{build_export, psfrag_export, write_export, ExportOutput};
pub use export::write_files_atomically;
pub use pos::{pos_from_anchor, Horizontal, PosCode, PosCodeError, Vertical};
pub use texfile::{emit_tex, parse_tex, rewrite_tex_tags, TexParseError, HOOK_MACROS, TEX_HEADER};

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;

use crate::expr::{guess_tex_with, print_source, Expr, HookSet};
use crate::scene::ExportOptions;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scaling {
    /// Scaling left to the LaTeX-side scale hook in the label body.
    Automatic,
    Factor(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsPosition {
    /// Same code as the resolved `position`.
    CopyPosition,
    Code(PosCode),
}

/// Per-label overrides. `None` fields mean Automatic.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelDirective {
    pub expr: Expr,
    pub tex_command: Option<String>,
    pub psfrag_tag: Option<String>,
    pub position: Option<PosCode>,
    pub ps_position: PsPosition,
    /// Degrees relative to the orientation of the PostScript text.
    pub rotation: f64,
    pub scaling: Scaling,
}

impl LabelDirective {
    pub fn new(expr: Expr) -> Self {
        Self {
            expr,
            tex_command: None,
            psfrag_tag: None,
            position: None,
            ps_position: PsPosition::CopyPosition,
            rotation: 0.0,
            scaling: Scaling::Automatic,
        }
    }

    pub fn with_position(mut self, code: PosCode) -> Self {
        self.position = Some(code);
        self
    }

    pub fn with_ps_position(mut self, code: PosCode) -> Self {
        self.ps_position = PsPosition::Code(code);
        self
    }

    pub fn with_tex(mut self, tex: impl Into<String>) -> Self {
        self.tex_command = Some(tex.into());
        self
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.psfrag_tag = Some(tag.into());
        self
    }

    pub fn with_rotation(mut self, degrees: f64) -> Self {
        self.rotation = degrees;
        self
    }

    pub fn with_scaling(mut self, factor: f64) -> Self {
        self.scaling = Scaling::Factor(factor);
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        if let Some(tag) = &self.psfrag_tag {
            if !is_valid_tag(tag) {
                return Err(format!("psfrag tag `{tag}` must be nonempty and alphanumeric"));
            }
        }
        if let Scaling::Factor(s) = self.scaling {
            if !(s > 0.0 && s.is_finite()) {
                return Err(format!("scaling {s} must be a positive number"));
            }
        }
        if !self.rotation.is_finite() {
            return Err("rotation must be finite".to_string());
        }
        Ok(())
    }
}

pub fn is_valid_tag(tag: &str) -> bool {
    !tag.is_empty() && tag.bytes().all(|b| b.is_ascii_alphanumeric())
}

/// One `\psfrag{tag}[posn][psposn][scale][rot]{body}` line.
#[derive(Debug, Clone, PartialEq)]
pub struct PsfragEntry {
    pub tag: String,
    pub posn: PosCode,
    pub psposn: PosCode,
    pub scale: f64,
    pub rot: f64,
    pub body: String,
}

/// Entries keyed by tag, in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TagRegistry {
    entries: IndexMap<String, PsfragEntry>,
    origins: HashMap<String, String>,
}

impl TagRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an entry; `origin` describes the label for error messages.
    pub fn insert(&mut self, entry: PsfragEntry, origin: impl Into<String>) -> Result<(), Error> {
        let origin = origin.into();
        if self.entries.contains_key(&entry.tag) {
            return Err(Error::DuplicateTag {
                tag: entry.tag.clone(),
                first: self.origins.get(&entry.tag).cloned().unwrap_or_default(),
                second: origin,
            });
        }
        self.origins.insert(entry.tag.clone(), origin);
        self.entries.insert(entry.tag.clone(), entry);
        Ok(())
    }

    pub fn from_entries(entries: impl IntoIterator<Item = PsfragEntry>) -> Result<Self, Error> {
        let mut reg = TagRegistry::new();
        for e in entries {
            let origin = format!("tex entry `{}`", e.tag);
            reg.insert(e, origin)?;
        }
        Ok(reg)
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.entries.contains_key(tag)
    }

    pub fn get(&self, tag: &str) -> Option<&PsfragEntry> {
        self.entries.get(tag)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PsfragEntry> {
        self.entries.values()
    }

    pub fn tags(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Tag built from the canonical source form of `expr`, stripped to ASCII
/// alphanumerics and made unique against `taken` with a decimal suffix.
pub fn derive_tag(expr: &Expr, registry: &TagRegistry) -> String {
    derive_tag_avoiding(expr, |t| registry.contains(t))
}

pub(crate) fn derive_tag_avoiding(expr: &Expr, taken: impl Fn(&str) -> bool) -> String {
    let mut base: String = print_source(strip_holds(expr))
        .chars()
        .filter(char::is_ascii_alphanumeric)
        .collect();
    if base.is_empty() {
        base = "tag".to_string();
    }
    if !taken(&base) {
        return base;
    }
    (2u64..)
        .map(|n| format!("{base}{n}"))
        .find(|candidate| !taken(candidate))
        .expect("unbounded suffix search")
}

fn strip_holds(expr: &Expr) -> &Expr {
    expr.unheld()
}

const SHORTLEX_ALPHABET: &[u8; 52] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// The `index`-th (0-based) string of the shortlex enumeration over a…z A…Z.
pub fn shortlex_tag(index: usize) -> String {
    let mut n = index as u128 + 1;
    let mut out = Vec::new();
    while n > 0 {
        n -= 1;
        out.push(SHORTLEX_ALPHABET[(n % 52) as usize]);
        n /= 52;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii alphabet")
}

/// Replaces every tag, in registry order, with its shortlex index. Returns
/// the renamed registry and the old→new map.
pub fn renumber(registry: &TagRegistry) -> (TagRegistry, IndexMap<String, String>) {
    renumber_avoiding(registry, &HashSet::new())
}

/// Like [`renumber`], but skips shortlex strings in `avoid`, such as plain
/// strings shown elsewhere in the same EPS.
pub fn renumber_avoiding(
    registry: &TagRegistry,
    avoid: &HashSet<String>,
) -> (TagRegistry, IndexMap<String, String>) {
    let mut out = TagRegistry::new();
    let mut map = IndexMap::new();
    let mut fresh = (0..).map(shortlex_tag).filter(|t| !avoid.contains(t));
    for entry in registry.iter() {
        let new_tag = fresh.next().expect("unbounded enumeration");
        map.insert(entry.tag.clone(), new_tag.clone());
        let origin = registry.origins.get(&entry.tag).cloned().unwrap_or_default();
        let renamed = PsfragEntry { tag: new_tag, ..entry.clone() };
        out.insert(renamed, origin).expect("shortlex tags are distinct");
    }
    (out, map)
}

/// Renumbers the tags of an EPS and its tex file together. Returns the
/// rewritten EPS, the rewritten tex, and the tags that changed. Every tex tag
/// must be shown in the EPS.
pub fn renumber_pair(
    eps: &[u8],
    tex: &str,
) -> Result<(Vec<u8>, String, IndexMap<String, String>), Error> {
    let registry = TagRegistry::from_entries(parse_tex(tex)?)?;
    let shown: HashSet<String> = crate::eps::scan_tags(eps)?.into_iter().map(|o| o.tag).collect();
    let missing: Vec<String> = registry.tags().filter(|t| !shown.contains(*t)).map(str::to_string).collect();
    if !missing.is_empty() {
        return Err(Error::MissingTags(missing));
    }
    let untagged: HashSet<String> = shown.iter().filter(|t| !registry.contains(t)).cloned().collect();
    let (_, mut map) = renumber_avoiding(&registry, &untagged);
    map.retain(|old, new| old != new);
    let eps = crate::eps::rewrite_tags(eps, &map)?;
    let tex = rewrite_tex_tags(tex, &map)?;
    Ok((eps, tex, map))
}

/// Resolves `(posn, psposn)`: explicit codes win, then the text anchor when
/// automatic positioning is on, then the bottom-center fallback.
pub fn resolve_alignment(
    directive: &LabelDirective,
    anchor: Option<(f64, f64)>,
    auto_position: bool,
) -> (PosCode, PosCode) {
    let posn = match (directive.position, anchor) {
        (Some(code), _) => code,
        (None, Some(a)) if auto_position => pos_from_anchor(a),
        _ => PosCode::FALLBACK,
    };
    let psposn = match directive.ps_position {
        PsPosition::Code(code) => code,
        PsPosition::CopyPosition => posn,
    };
    (posn, psposn)
}

/// Net brace depth of a LaTeX string, ignoring escaped braces.
pub(crate) fn brace_balance(tex: &str) -> i64 {
    let mut depth = 0i64;
    let mut escaped = false;
    for c in tex.chars() {
        match c {
            _ if escaped => escaped = false,
            '\\' => escaped = true,
            '{' => depth += 1,
            '}' => depth -= 1,
            _ => {}
        }
    }
    depth
}

/// Builds the entry for one label. Returns the entry and any warnings.
pub fn build_entry(
    directive: &LabelDirective,
    anchor: Option<(f64, f64)>,
    hooks: &HookSet,
    opts: &ExportOptions,
    registry: &TagRegistry,
) -> Result<(PsfragEntry, Vec<String>), Error> {
    build_entry_reserved(directive, anchor, hooks, opts, registry, &HashSet::new())
}

pub(crate) fn build_entry_reserved(
    directive: &LabelDirective,
    anchor: Option<(f64, f64)>,
    hooks: &HookSet,
    opts: &ExportOptions,
    registry: &TagRegistry,
    reserved: &HashSet<String>,
) -> Result<(PsfragEntry, Vec<String>), Error> {
    directive.validate().map_err(Error::InvalidScene)?;
    let label = print_source(&directive.expr);
    let tag = match &directive.psfrag_tag {
        Some(tag) => {
            if registry.contains(tag) {
                return Err(Error::DuplicateTag {
                    tag: tag.clone(),
                    first: registry.origins.get(tag).cloned().unwrap_or_default(),
                    second: label,
                });
            }
            tag.clone()
        }
        None => derive_tag_avoiding(&directive.expr, |t| registry.contains(t) || reserved.contains(t)),
    };

    let mut warnings = Vec::new();
    let body = match &directive.tex_command {
        Some(tex) => {
            if brace_balance(tex) != 0 {
                warnings.push(format!("tag `{tag}`: TeX command has unbalanced braces: {tex}"));
            }
            if tex.contains(['\n', '\r']) {
                warnings.push(format!("tag `{tag}`: line breaks in TeX command replaced by spaces"));
                tex.replace(['\n', '\r'], " ")
            } else {
                tex.clone()
            }
        }
        None => {
            let scale_hook = directive.scaling == Scaling::Automatic;
            let out = guess_tex_with(&directive.expr, hooks, scale_hook);
            warnings.extend(out.warnings.into_iter().map(|w| format!("tag `{tag}`: {w}")));
            out.text
        }
    };

    let (posn, psposn) = resolve_alignment(directive, anchor, opts.auto_position);
    let scale = match directive.scaling {
        Scaling::Factor(s) => s,
        Scaling::Automatic => 1.0,
    };
    Ok((
        PsfragEntry { tag, posn, psposn, scale, rot: directive.rotation, body },
        warnings,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn code(s: &str) -> PosCode {
        s.parse().unwrap()
    }

    #[test]
    fn derived_tags() {
        let reg = TagRegistry::new();
        assert_eq!(derive_tag(&parse_expr("Sin[x]").unwrap(), &reg), "Sinx");
        assert_eq!(derive_tag(&Expr::string("local maximum"), &reg), "localmaximum");
        assert_eq!(derive_tag(&Expr::string("!?"), &reg), "tag");
        assert_eq!(derive_tag(&parse_expr("HoldForm[(3*x-1)^3]").unwrap(), &reg), "3x13");

        let mut reg = TagRegistry::new();
        let entry = |tag: &str| PsfragEntry {
            tag: tag.into(),
            posn: PosCode::FALLBACK,
            psposn: PosCode::FALLBACK,
            scale: 1.0,
            rot: 0.0,
            body: String::new(),
        };
        reg.insert(entry("x"), "x").unwrap();
        assert_eq!(derive_tag(&Expr::sym("x"), &reg), "x2");
        reg.insert(entry("x2"), "x").unwrap();
        assert_eq!(derive_tag(&Expr::sym("x"), &reg), "x3");
    }

    /// Independent enumerator: all strings of length 1, then 2, ... in
    /// lexicographic order of the alphabet positions.
    fn brute_force_shortlex(count: usize) -> Vec<String> {
        let alphabet: Vec<char> = ('a'..='z').chain('A'..='Z').collect();
        let mut out: Vec<String> = Vec::new();
        let mut layer: Vec<String> = vec![String::new()];
        while out.len() < count {
            let mut next = Vec::new();
            for prefix in &layer {
                for c in &alphabet {
                    next.push(format!("{prefix}{c}"));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out.truncate(count);
        out
    }

    #[test]
    fn shortlex_matches_brute_force() {
        let expected = brute_force_shortlex(52 + 52 * 52 + 10);
        for (i, e) in expected.iter().enumerate() {
            assert_eq!(&shortlex_tag(i), e, "index {i}");
        }
        assert_eq!(shortlex_tag(0), "a");
        assert_eq!(shortlex_tag(51), "Z");
        assert_eq!(shortlex_tag(52), "aa");
        assert_eq!(shortlex_tag(103), "aZ");
        assert_eq!(shortlex_tag(104), "ba");
    }

    #[test]
    fn renumber_empty_and_idempotent() {
        let (r, m) = renumber(&TagRegistry::new());
        assert!(r.is_empty() && m.is_empty());

        let mut reg = TagRegistry::new();
        for t in ["foo", "bar", "baz"] {
            reg.insert(
                PsfragEntry {
                    tag: t.into(),
                    posn: code("tc"),
                    psposn: code("cl"),
                    scale: 2.0,
                    rot: 30.0,
                    body: format!("${t}$"),
                },
                t,
            )
            .unwrap();
        }
        let (once, map) = renumber(&reg);
        assert_eq!(once.tags().collect::<Vec<_>>(), ["a", "b", "c"]);
        assert_eq!(map["bar"], "b");
        assert_eq!(once.get("b").unwrap().body, "$bar$");
        assert_eq!(once.get("b").unwrap().psposn, code("cl"));
        let (twice, _) = renumber(&once);
        assert_eq!(twice, once);
    }

    #[test]
    fn alignment_resolution() {
        let d = LabelDirective::new(Expr::int(0));
        assert_eq!(resolve_alignment(&d, Some((0.0, 1.0)), true), (code("tc"), code("tc")));
        assert_eq!(resolve_alignment(&d, Some((0.0, 1.0)), false), (code("bc"), code("bc")));
        assert_eq!(resolve_alignment(&d, None, true), (code("bc"), code("bc")));
        let br = d.clone().with_position(code("Br"));
        assert_eq!(resolve_alignment(&br, Some((0.0, 1.0)), true), (code("Br"), code("Br")));
        let split = br.with_ps_position(code("tl"));
        assert_eq!(resolve_alignment(&split, None, false), (code("Br"), code("tl")));
    }

    #[test]
    fn entry_for_plain_tick_and_custom_tex() {
        let opts = ExportOptions::default();
        let hooks = HookSet::new();
        let reg = TagRegistry::new();
        let (e, w) =
            build_entry(&LabelDirective::new(Expr::int(0)), Some((0.0, 1.0)), &hooks, &opts, &reg)
                .unwrap();
        assert!(w.is_empty());
        assert_eq!((e.tag.as_str(), e.posn, e.psposn, e.scale, e.rot), ("0", code("tc"), code("tc"), 1.0, 0.0));
        assert_eq!(e.body, "\\psfragnumericstyle{$\\psfragscalenumeric 0$}");

        let texstr = "$3\\left|\\cos \\sqrt{4x}\\right|^\\frac{2}{3}$";
        let d = LabelDirective::new(parse_expr("3*((Cos[2*Sqrt[x]])^2)^(1/3)").unwrap())
            .with_position(code("cr"))
            .with_tex(texstr);
        let (e, _) = build_entry(&d, Some((1.0, 0.0)), &hooks, &opts, &reg).unwrap();
        assert_eq!(e.body, texstr);
        assert_eq!(e.posn, code("cr"));

        let scaled = LabelDirective::new(Expr::sym("x")).with_scaling(1.5).with_rotation(0.0);
        let (e, _) = build_entry(&scaled, None, &hooks, &opts, &reg).unwrap();
        assert_eq!(e.scale, 1.5);
        assert_eq!(e.body, "\\psfragmathstyle{$x$}");
    }

    #[test]
    fn duplicate_explicit_tag_names_both_labels() {
        let opts = ExportOptions::default();
        let mut reg = TagRegistry::new();
        let d1 = LabelDirective::new(Expr::sym("x")).with_tag("t");
        let (e, _) = build_entry(&d1, None, &HookSet::new(), &opts, &reg).unwrap();
        reg.insert(e, "x").unwrap();
        let d2 = LabelDirective::new(Expr::sym("y")).with_tag("t");
        let err = build_entry(&d2, None, &HookSet::new(), &opts, &reg).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("`t`") && msg.contains('x') && msg.contains('y'), "{msg}");
    }

    #[test]
    fn unbalanced_user_tex_warns() {
        let d = LabelDirective::new(Expr::sym("x")).with_tex("$x}$");
        let (e, w) =
            build_entry(&d, None, &HookSet::new(), &ExportOptions::default(), &TagRegistry::new())
                .unwrap();
        assert_eq!(e.body, "$x}$");
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn invalid_directives() {
        assert!(LabelDirective::new(Expr::int(1)).with_tag("a b").validate().is_err());
        assert!(LabelDirective::new(Expr::int(1)).with_tag("").validate().is_err());
        assert!(LabelDirective::new(Expr::int(1)).with_scaling(0.0).validate().is_err());
        assert!(LabelDirective::new(Expr::int(1)).with_tag("gA").validate().is_ok());
    }
}
