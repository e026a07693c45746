//! The emitted `.tex` file: a header comment, default definitions for the
//! style and scale hooks, then one `\psfrag` line per entry.

use indexmap::IndexMap;

use super::{PosCode, PsfragEntry, TagRegistry};

pub const TEX_HEADER: &str = "% labelforge psfrag replacements";

/// Hook macros given empty defaults with `\providecommand`, so bindings made
/// before `\input` take precedence.
pub const HOOK_MACROS: [&str; 6] = [
    "psfragtextstyle",
    "psfragmathstyle",
    "psfragnumericstyle",
    "psfragscaletext",
    "psfragscalemath",
    "psfragscalenumeric",
];

pub(crate) fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    format!("{v}")
}

pub fn emit_tex(registry: &TagRegistry) -> String {
    let mut out = String::new();
    out.push_str(TEX_HEADER);
    out.push('\n');
    for name in HOOK_MACROS {
        out.push_str(&format!("\\providecommand{{\\{name}}}{{}}\n"));
    }
    for e in registry.iter() {
        out.push_str(&format!(
            "\\psfrag{{{}}}[{}][{}][{}][{}]{{{}}}\n",
            e.tag,
            e.posn,
            e.psposn,
            format_number(e.scale),
            format_number(e.rot),
            e.body
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("tex line {line}: {message}")]
pub struct TexParseError {
    pub line: usize,
    pub message: String,
}

const PSFRAG: &str = "\\psfrag";

/// Byte range of the tag inside a `\psfrag{tag}...` line, if it is one.
fn tag_span(line: &str) -> Option<Result<std::ops::Range<usize>, String>> {
    let indent = line.len() - line.trim_start().len();
    let rest = line[indent..].strip_prefix(PSFRAG)?;
    if rest.starts_with('*') {
        return Some(Err("starred \\psfrag* is not supported".to_string()));
    }
    let Some(after) = rest.strip_prefix('{') else {
        // `\psfragfoo` and friends are other macros.
        return if rest.starts_with(|c: char| c.is_ascii_alphabetic()) {
            None
        } else {
            Some(Err("expected `{` after \\psfrag".to_string()))
        };
    };
    let start = indent + PSFRAG.len() + 1;
    match after.find('}') {
        Some(end) => Some(Ok(start..start + end)),
        None => Some(Err("unterminated tag".to_string())),
    }
}

fn parse_line(line: &str, span: std::ops::Range<usize>) -> Result<PsfragEntry, String> {
    let tag = line[span.clone()].to_string();
    if !super::is_valid_tag(&tag) {
        return Err(format!("tag `{tag}` is not alphanumeric"));
    }
    let mut rest = &line[span.end + 1..];
    let mut options: Vec<&str> = Vec::new();
    while let Some(r) = rest.strip_prefix('[') {
        let close = r.find(']').ok_or("unterminated `[` option")?;
        options.push(&r[..close]);
        rest = &r[close + 1..];
    }
    if options.len() > 4 {
        return Err(format!("expected at most 4 options, found {}", options.len()));
    }
    let code = |i: usize| -> Result<Option<PosCode>, String> {
        match options.get(i).copied() {
            None | Some("") => Ok(None),
            Some(s) => s.parse().map(Some).map_err(|e: super::PosCodeError| e.to_string()),
        }
    };
    let number = |i: usize, default: f64| -> Result<f64, String> {
        match options.get(i).copied() {
            None | Some("") => Ok(default),
            Some(s) => s.trim().parse().map_err(|_| format!("invalid number `{s}`")),
        }
    };
    let posn = code(0)?.unwrap_or(PosCode::new(super::Vertical::Bottom, super::Horizontal::Left));
    let psposn = code(1)?.unwrap_or(posn);
    let scale = number(2, 1.0)?;
    let rot = number(3, 0.0)?;
    let rest = rest.trim_end();
    let body = rest
        .strip_prefix('{')
        .and_then(|b| b.strip_suffix('}'))
        .ok_or("expected `{body}` after the options")?;
    Ok(PsfragEntry { tag, posn, psposn, scale, rot, body: body.to_string() })
}

/// Reads back the `\psfrag` lines of a tex file, in file order. Other lines
/// are ignored. Omitted options take psfrag's defaults (`[bl]`, psposn equal
/// to posn, scale 1, rotation 0).
pub fn parse_tex(text: &str) -> Result<Vec<PsfragEntry>, TexParseError> {
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let err = |message: String| TexParseError { line: i + 1, message };
        match tag_span(line) {
            None => continue,
            Some(Err(m)) => return Err(err(m)),
            Some(Ok(span)) => entries.push(parse_line(line, span).map_err(err)?),
        }
    }
    Ok(entries)
}

/// Renames tags in `\psfrag` lines, leaving every other byte unchanged.
pub fn rewrite_tex_tags(text: &str, map: &IndexMap<String, String>) -> Result<String, TexParseError> {
    let mut out = String::with_capacity(text.len());
    for (i, line) in text.split_inclusive('\n').enumerate() {
        match tag_span(line) {
            Some(Ok(span)) => {
                let tag = &line[span.clone()];
                match map.get(tag) {
                    Some(new) => {
                        out.push_str(&line[..span.start]);
                        out.push_str(new);
                        out.push_str(&line[span.end..]);
                    }
                    None => out.push_str(line),
                }
            }
            Some(Err(message)) => return Err(TexParseError { line: i + 1, message }),
            None => out.push_str(line),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(tag: &str, body: &str) -> PsfragEntry {
        PsfragEntry {
            tag: tag.into(),
            posn: "bc".parse().unwrap(),
            psposn: "bc".parse().unwrap(),
            scale: 1.0,
            rot: 0.0,
            body: body.into(),
        }
    }

    #[test]
    fn single_entry_line() {
        let reg = TagRegistry::from_entries([entry("a", "$x$")]).unwrap();
        let tex = emit_tex(&reg);
        assert!(tex.lines().any(|l| l == "\\psfrag{a}[bc][bc][1][0]{$x$}"), "{tex}");
    }

    #[test]
    fn empty_registry_has_header_and_defaults_only() {
        let tex = emit_tex(&TagRegistry::new());
        let lines: Vec<&str> = tex.lines().collect();
        assert_eq!(lines.len(), 7);
        assert_eq!(lines[0], TEX_HEADER);
        assert_eq!(lines[1], "\\providecommand{\\psfragtextstyle}{}");
        assert!(parse_tex(&tex).unwrap().is_empty());
    }

    #[test]
    fn unbalanced_body_passes_through() {
        let reg = TagRegistry::from_entries([entry("a", "$x}$")]).unwrap();
        let tex = emit_tex(&reg);
        assert!(tex.contains("{$x}$}\n"));
        assert_eq!(parse_tex(&tex).unwrap()[0].body, "$x}$");
    }

    #[test]
    fn lines_parse_back() {
        let mut e = entry("gA", "---[tc][cc][0.75][45]---");
        e.posn = "tc".parse().unwrap();
        e.psposn = "cc".parse().unwrap();
        e.scale = 0.75;
        e.rot = -90.0;
        let reg = TagRegistry::from_entries([e.clone(), entry("b", "\\psfragmathstyle{$x$}")]).unwrap();
        let back = parse_tex(&emit_tex(&reg)).unwrap();
        assert_eq!(back, reg.iter().cloned().collect::<Vec<_>>());
    }

    #[test]
    fn defaults_and_errors() {
        let e = &parse_tex("\\psfrag{t}[tr]{x}").unwrap()[0];
        assert_eq!(e.psposn.to_string(), "tr");
        assert_eq!(e.scale, 1.0);
        let e = &parse_tex("  \\psfrag{t}{x}").unwrap()[0];
        assert_eq!(e.posn.to_string(), "bl");
        assert!(parse_tex("\\psfragdebugon").unwrap().is_empty());
        assert_eq!(parse_tex("x\n\\psfrag*{t}{x}").unwrap_err().line, 2);
        assert!(parse_tex("\\psfrag{t}[zz]{x}").is_err());
        assert!(parse_tex("\\psfrag{t}[tc]").is_err());
        assert!(parse_tex("\\psfrag{a-b}{x}").is_err());
    }

    #[test]
    fn rewrite_touches_only_tags() {
        let text = "% c\n\\psfrag{old}[bc][bc][1][0]{old}\n\\psfrag{keep}[bc][bc][1][0]{x}";
        let mut map = IndexMap::new();
        map.insert("old".to_string(), "a".to_string());
        assert_eq!(
            rewrite_tex_tags(text, &map).unwrap(),
            "% c\n\\psfrag{a}[bc][bc][1][0]{old}\n\\psfrag{keep}[bc][bc][1][0]{x}"
        );
    }
}
