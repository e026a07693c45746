//! Lossless PostScript tokenizer. Every token owns the whitespace before it,
//! so concatenating the `span`s of all tokens reproduces the input.

use std::ops::Range;

use super::EpsError;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Number(f64),
    /// Executable name such as `show`.
    Name(String),
    /// `/name`, stored without the slash.
    LiteralName(String),
    /// `//name`.
    ImmediateName(String),
    /// Decoded bytes of a `(...)` or `<...>` string.
    Str(Vec<u8>),
    ArrayOpen,
    ArrayClose,
    ProcOpen,
    ProcClose,
    DictOpen,
    DictClose,
    /// Comment text including the leading `%`, without the line break.
    Comment(String),
    /// Whitespace after the last token.
    Trailing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsToken {
    pub kind: TokenKind,
    /// Raw bytes of the token including the whitespace before it.
    pub span: Range<usize>,
    /// Raw bytes of the token proper.
    pub body: Range<usize>,
}

fn is_whitespace(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\r' | b'\n' | b'\x0c' | b'\0')
}

fn is_delimiter(b: u8) -> bool {
    matches!(b, b'(' | b')' | b'<' | b'>' | b'[' | b']' | b'{' | b'}' | b'/' | b'%')
}

fn is_regular(b: u8) -> bool {
    !is_whitespace(b) && !is_delimiter(b)
}

pub fn tokenize(input: &[u8]) -> Result<Vec<PsToken>, EpsError> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    let mut proc_opens: Vec<usize> = Vec::new();
    while pos < input.len() {
        let start = pos;
        while pos < input.len() && is_whitespace(input[pos]) {
            pos += 1;
        }
        if pos == input.len() {
            tokens.push(PsToken { kind: TokenKind::Trailing, span: start..pos, body: pos..pos });
            break;
        }
        let body_start = pos;
        let (kind, end) = lex_one(input, pos)?;
        match kind {
            TokenKind::ProcOpen => proc_opens.push(body_start),
            TokenKind::ProcClose => {
                if proc_opens.pop().is_none() {
                    return Err(EpsError::new(body_start, "unmatched `}`"));
                }
            }
            _ => {}
        }
        pos = end;
        tokens.push(PsToken { kind, span: start..end, body: body_start..end });
    }
    if let Some(&open) = proc_opens.last() {
        return Err(EpsError::new(open, "unterminated procedure"));
    }
    Ok(tokens)
}

fn lex_one(input: &[u8], pos: usize) -> Result<(TokenKind, usize), EpsError> {
    let b = input[pos];
    match b {
        b'%' => {
            let end = input[pos..]
                .iter()
                .position(|&c| c == b'\n' || c == b'\r')
                .map_or(input.len(), |i| pos + i);
            let text = String::from_utf8_lossy(&input[pos..end]).into_owned();
            Ok((TokenKind::Comment(text), end))
        }
        b'(' => lex_string(input, pos),
        b')' => Err(EpsError::new(pos, "unmatched `)`")),
        b'<' => {
            if input.get(pos + 1) == Some(&b'<') {
                Ok((TokenKind::DictOpen, pos + 2))
            } else if input.get(pos + 1) == Some(&b'~') {
                Err(EpsError::new(pos, "ASCII85 strings are not supported"))
            } else {
                lex_hex(input, pos)
            }
        }
        b'>' => {
            if input.get(pos + 1) == Some(&b'>') {
                Ok((TokenKind::DictClose, pos + 2))
            } else {
                Err(EpsError::new(pos, "unmatched `>`"))
            }
        }
        b'[' => Ok((TokenKind::ArrayOpen, pos + 1)),
        b']' => Ok((TokenKind::ArrayClose, pos + 1)),
        b'{' => Ok((TokenKind::ProcOpen, pos + 1)),
        b'}' => Ok((TokenKind::ProcClose, pos + 1)),
        b'/' => {
            let immediate = input.get(pos + 1) == Some(&b'/');
            let name_start = pos + if immediate { 2 } else { 1 };
            let end = regular_run(input, name_start);
            let name = String::from_utf8_lossy(&input[name_start..end]).into_owned();
            if immediate {
                Ok((TokenKind::ImmediateName(name), end))
            } else {
                Ok((TokenKind::LiteralName(name), end))
            }
        }
        _ => {
            let end = regular_run(input, pos);
            let text = String::from_utf8_lossy(&input[pos..end]).into_owned();
            match parse_number(&text) {
                Some(v) => Ok((TokenKind::Number(v), end)),
                None => Ok((TokenKind::Name(text), end)),
            }
        }
    }
}

fn regular_run(input: &[u8], start: usize) -> usize {
    input[start..]
        .iter()
        .position(|&c| !is_regular(c))
        .map_or(input.len(), |i| start + i)
}

/// Integer, real (with optional exponent) or `base#digits` radix number.
pub(crate) fn parse_number(text: &str) -> Option<f64> {
    let bytes = text.as_bytes();
    let first = *bytes.first()?;
    if !(first.is_ascii_digit() || matches!(first, b'+' | b'-' | b'.')) {
        return None;
    }
    if let Some((base, digits)) = text.split_once('#') {
        let base: u32 = base.parse().ok()?;
        if !(2..=36).contains(&base) || digits.is_empty() {
            return None;
        }
        return u64::from_str_radix(digits, base).ok().map(|v| v as f64);
    }
    // Rust's float grammar also accepts `inf`, `nan` and `1e5.`-free forms we
    // must reject, so check the characters first.
    let mut digits = 0;
    for (i, &c) in bytes.iter().enumerate() {
        match c {
            b'0'..=b'9' => digits += 1,
            b'+' | b'-' if i == 0 || matches!(bytes[i - 1], b'e' | b'E') => {}
            b'.' | b'e' | b'E' => {}
            _ => return None,
        }
    }
    if digits == 0 {
        return None;
    }
    text.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn lex_string(input: &[u8], open: usize) -> Result<(TokenKind, usize), EpsError> {
    let mut out = Vec::new();
    let mut depth = 1usize;
    let mut i = open + 1;
    while i < input.len() {
        let c = input[i];
        match c {
            b'(' => {
                depth += 1;
                out.push(c);
            }
            b')' => {
                depth -= 1;
                if depth == 0 {
                    return Ok((TokenKind::Str(out), i + 1));
                }
                out.push(c);
            }
            b'\\' => {
                i += 1;
                let Some(&e) = input.get(i) else { break };
                match e {
                    b'n' => out.push(b'\n'),
                    b'r' => out.push(b'\r'),
                    b't' => out.push(b'\t'),
                    b'b' => out.push(b'\x08'),
                    b'f' => out.push(b'\x0c'),
                    b'0'..=b'7' => {
                        let mut v: u32 = 0;
                        let mut n = 0;
                        while n < 3 && i < input.len() && (b'0'..=b'7').contains(&input[i]) {
                            v = v * 8 + (input[i] - b'0') as u32;
                            i += 1;
                            n += 1;
                        }
                        out.push((v & 0xff) as u8);
                        continue;
                    }
                    b'\r' => {
                        if input.get(i + 1) == Some(&b'\n') {
                            i += 1;
                        }
                    }
                    b'\n' => {}
                    // `\\`, `\(`, `\)` and unknown escapes keep the character.
                    other => out.push(other),
                }
            }
            _ => out.push(c),
        }
        i += 1;
    }
    Err(EpsError::new(open, "unterminated string"))
}

fn lex_hex(input: &[u8], open: usize) -> Result<(TokenKind, usize), EpsError> {
    let mut nibbles = Vec::new();
    for (i, &c) in input.iter().enumerate().skip(open + 1) {
        match c {
            b'>' => {
                if nibbles.len() % 2 == 1 {
                    nibbles.push(0);
                }
                let bytes = nibbles.chunks(2).map(|p| p[0] << 4 | p[1]).collect();
                return Ok((TokenKind::Str(bytes), i + 1));
            }
            _ if is_whitespace(c) => {}
            _ => match (c as char).to_digit(16) {
                Some(d) => nibbles.push(d as u8),
                None => return Err(EpsError::new(i, "invalid character in hex string")),
            },
        }
    }
    Err(EpsError::new(open, "unterminated hex string"))
}

/// Writes `bytes` as a PostScript string literal, escaping parentheses,
/// backslashes and non-printable bytes.
pub fn escape_string(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() + 2);
    out.push('(');
    for &b in bytes {
        match b {
            b'(' | b')' | b'\\' => {
                out.push('\\');
                out.push(b as char);
            }
            0x20..=0x7e => out.push(b as char),
            _ => out.push_str(&format!("\\{b:03o}")),
        }
    }
    out.push(')');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src.as_bytes()).unwrap().into_iter().map(|t| t.kind).collect()
    }

    fn rejoin(src: &[u8]) -> Vec<u8> {
        tokenize(src).unwrap().iter().flat_map(|t| src[t.span.clone()].to_vec()).collect()
    }

    #[test]
    fn escaped_paren_string_then_name() {
        assert_eq!(
            kinds("(a\\)b) show"),
            [TokenKind::Str(b"a)b".to_vec()), TokenKind::Name("show".into())]
        );
    }

    #[test]
    fn dsc_comment_token() {
        let toks = tokenize(b"%%BoundingBox: 0 0 360 223\n").unwrap();
        assert_eq!(toks[0].kind, TokenKind::Comment("%%BoundingBox: 0 0 360 223".into()));
        assert_eq!(toks[1].kind, TokenKind::Trailing);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize(b"").unwrap().is_empty());
    }

    #[test]
    fn numbers_and_names() {
        assert_eq!(
            kinds("1 -2.5 .5 1e3 16#ff 1.2.3 - e5 /lit //imm"),
            [
                TokenKind::Number(1.0),
                TokenKind::Number(-2.5),
                TokenKind::Number(0.5),
                TokenKind::Number(1000.0),
                TokenKind::Number(255.0),
                TokenKind::Name("1.2.3".into()),
                TokenKind::Name("-".into()),
                TokenKind::Name("e5".into()),
                TokenKind::LiteralName("lit".into()),
                TokenKind::ImmediateName("imm".into()),
            ]
        );
    }

    #[test]
    fn string_escapes_and_nesting() {
        assert_eq!(kinds("(a(b)c)"), [TokenKind::Str(b"a(b)c".to_vec())]);
        assert_eq!(kinds("(\\101\\n\\\\x)"), [TokenKind::Str(b"A\n\\x".to_vec())]);
        assert_eq!(kinds("(a\\\nb)"), [TokenKind::Str(b"ab".to_vec())]);
        assert_eq!(kinds("<41 42 4>"), [TokenKind::Str(b"AB@".to_vec())]);
    }

    #[test]
    fn delimiters() {
        assert_eq!(
            kinds("[1]{x}<<>>"),
            [
                TokenKind::ArrayOpen,
                TokenKind::Number(1.0),
                TokenKind::ArrayClose,
                TokenKind::ProcOpen,
                TokenKind::Name("x".into()),
                TokenKind::ProcClose,
                TokenKind::DictOpen,
                TokenKind::DictClose,
            ]
        );
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(tokenize(b"1 (abc").unwrap_err().offset, 2);
        assert_eq!(tokenize(b"  {x").unwrap_err().offset, 2);
        assert_eq!(tokenize(b"x )").unwrap_err().offset, 2);
        assert_eq!(tokenize(b"}").unwrap_err().offset, 0);
        assert!(tokenize(b"<4g>").is_err());
    }

    #[test]
    fn spans_are_lossless() {
        let src = b"%!PS\n  /m {moveto} bind def\r\n(x\\)) show  \n\n";
        assert_eq!(rejoin(src), src);
    }

    #[test]
    fn escape_round_trips() {
        let raw = b"a(b)\\c\n\xff";
        let lit = escape_string(raw);
        assert_eq!(kinds(&lit), [TokenKind::Str(raw.to_vec())]);
    }
}
