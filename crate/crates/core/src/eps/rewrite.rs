use indexmap::IndexMap;

use super::interp::scan;
use super::token::escape_string;
use crate::Error;

/// Latin-1 bytes of a tag; characters above U+00FF become `?`.
pub fn tag_bytes(tag: &str) -> Vec<u8> {
    tag.chars().map(|c| u8::try_from(c as u32).unwrap_or(b'?')).collect()
}

/// Replaces every shown string literal equal to a key of `map` with the
/// mapped tag. All other bytes are copied unchanged.
pub fn rewrite_tags(bytes: &[u8], map: &IndexMap<String, String>) -> Result<Vec<u8>, Error> {
    if map.is_empty() {
        return Ok(bytes.to_vec());
    }
    let occurrences = scan(bytes)?.occurrences;
    let missing: Vec<String> = map
        .keys()
        .filter(|old| !occurrences.iter().any(|o| &o.tag == *old))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingTags(missing));
    }
    let mut out = Vec::with_capacity(bytes.len());
    let mut copied = 0;
    for occ in &occurrences {
        let Some(new) = map.get(&occ.tag) else { continue };
        out.extend_from_slice(&bytes[copied..occ.byte_span.start]);
        out.extend_from_slice(escape_string(&tag_bytes(new)).as_bytes());
        copied = occ.byte_span.end;
    }
    out.extend_from_slice(&bytes[copied..]);
    Ok(out)
}
