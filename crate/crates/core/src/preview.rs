//! Placement geometry of `\psfrag` replacements, and a preview that draws
//! each placed replacement as a box in place of its tag.

use std::fmt::Write as _;

use crate::eps::metrics::{string_width, ASCENT, DESCENT};
use crate::eps::{escape_string, scan, tag_bytes, TagOccurrence, TEXT_FONT, TEXT_FONT_SIZE};
use crate::geom::{Affine, Point};
use crate::labeling::{Horizontal, PosCode, PsfragEntry, TagRegistry, Vertical};
use crate::Error;

/// Extent of a typeset box. The origin is its bottom-left corner and the
/// baseline sits at `y = depth`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelBox {
    pub width: f64,
    /// Total height above the box bottom.
    pub height: f64,
    /// Height of the baseline above the box bottom.
    pub depth: f64,
}

impl LabelBox {
    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(0.0, 0.0),
            Point::new(self.width, 0.0),
            Point::new(self.width, self.height),
            Point::new(0.0, self.height),
        ]
    }
}

pub fn reference_point(b: &LabelBox, code: PosCode) -> Point {
    let x = match code.horizontal {
        Horizontal::Left => 0.0,
        Horizontal::Center => b.width / 2.0,
        Horizontal::Right => b.width,
    };
    let y = match code.vertical {
        Vertical::Bottom => 0.0,
        Vertical::Baseline => b.depth,
        Vertical::Center => b.height / 2.0,
        Vertical::Top => b.height,
    };
    Point::new(x, y)
}

/// Box of a shown tag string in device units, estimated from Times-Roman
/// metrics.
pub fn tag_box(occ: &TagOccurrence) -> LabelBox {
    let size = if occ.font_size > 0.0 { occ.font_size } else { TEXT_FONT_SIZE };
    let k = size * occ.scale;
    LabelBox {
        width: (string_width(&tag_bytes(&occ.tag), size) * occ.scale).max(1e-3),
        height: (ASCENT + DESCENT) * k,
        depth: DESCENT * k,
    }
}

/// Maps the tag box frame (origin bottom-left, unrotated) to device space.
fn tag_frame(occ: &TagOccurrence, tag_box: &LabelBox) -> Affine {
    Affine::translate(occ.device_position.x, occ.device_position.y)
        .then_after(Affine::rotate(occ.rotation))
        .then_after(Affine::translate(0.0, -tag_box.depth))
}

/// Device position of the tag box point selected by `code`.
pub fn tag_reference_point(occ: &TagOccurrence, tag_box: &LabelBox, code: PosCode) -> Point {
    tag_frame(occ, tag_box).apply(reference_point(tag_box, code))
}

/// Transform from the replacement box frame to device space: the `posn`
/// point of the replacement lands on the `psposn` point of the tag box, then
/// the replacement is scaled by `entry.scale` and rotated by `entry.rot`
/// relative to the tag's orientation about that point.
pub fn place(
    replacement: &LabelBox,
    entry: &PsfragEntry,
    occ: &TagOccurrence,
    tag_box: &LabelBox,
) -> Result<Affine, Error> {
    if !(entry.scale > 0.0 && entry.scale.is_finite()) {
        return Err(Error::InvalidScene(format!(
            "tag `{}`: scale {} must be positive",
            entry.tag, entry.scale
        )));
    }
    let p = tag_reference_point(occ, tag_box, entry.psposn);
    let r = reference_point(replacement, entry.posn);
    Ok(Affine::translate(p.x, p.y)
        .then_after(Affine::rotate(occ.rotation + entry.rot))
        .then_after(Affine::scale(entry.scale, entry.scale))
        .then_after(Affine::translate(-r.x, -r.y)))
}

/// Character-count estimate: half the font size per visible character,
/// height equal to the font size, depth a fifth of it.
pub fn default_measure(body: &str) -> LabelBox {
    let size = TEXT_FONT_SIZE;
    LabelBox {
        width: 0.5 * size * visible_chars(body).max(1) as f64,
        height: size,
        depth: 0.2 * size,
    }
}

/// Characters of a LaTeX body left after dropping control words and
/// grouping or math-shift characters.
fn visible_chars(body: &str) -> usize {
    let mut count = 0;
    let mut chars = body.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                if chars.peek().is_some_and(|n| n.is_ascii_alphabetic()) {
                    while chars.peek().is_some_and(|n| n.is_ascii_alphabetic()) {
                        chars.next();
                    }
                } else if chars.next().is_some() {
                    count += 1;
                }
            }
            '{' | '}' | '$' | '^' | '_' => {}
            c if c.is_whitespace() => {}
            _ => count += 1,
        }
    }
    count
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacedBox {
    pub tag: String,
    pub replacement: LabelBox,
    pub transform: Affine,
    /// Device image of the replacement's `posn` point.
    pub pinned: Point,
    /// Device images of the replacement box corners, counter-clockwise from
    /// the bottom-left.
    pub corners: [Point; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preview {
    pub bytes: Vec<u8>,
    pub placed: Vec<PlacedBox>,
    /// One per shown string without a registry entry.
    pub warnings: Vec<String>,
}

pub const PREVIEW_BANNER: &str = "%%Creator: labelforge-preview";

fn fmt6(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_string() } else { s.to_string() }
}

/// Replaces each `show` of a registered tag with a stroked replacement box,
/// its baseline, and the tag name in 4 pt type, all drawn under the
/// placement transform. Other bytes are copied; a banner comment is added
/// after the first line.
pub fn substitute_preview(
    eps: &[u8],
    registry: &TagRegistry,
    measure: impl Fn(&str) -> LabelBox,
) -> Result<Preview, Error> {
    let scanned = scan(eps)?;
    let mut warnings = scanned.warnings;
    let mut placed = Vec::new();
    let mut edits: Vec<(std::ops::Range<usize>, String)> = Vec::new();
    for occ in &scanned.occurrences {
        let Some(entry) = registry.get(&occ.tag) else {
            warnings.push(format!("byte {}: `{}` has no \\psfrag entry", occ.byte_span.start, occ.tag));
            continue;
        };
        let tbox = tag_box(occ);
        let replacement = measure(&entry.body);
        let t = place(&replacement, entry, occ, &tbox)?;
        let local = occ
            .ctm
            .inverse()
            .expect("scanner keeps the CTM invertible")
            .then_after(t);
        let m: Vec<String> = local.to_array().iter().map(|v| fmt6(*v)).collect();
        let LabelBox { width: w, height: h, depth: d } = replacement;
        let mut ps = String::new();
        let _ = write!(
            ps,
            "pop gsave [{}] concat 0.3 setlinewidth newpath 0 0 moveto {w} 0 lineto {w} {h} lineto 0 {h} lineto closepath stroke \
             newpath 0 {d} moveto {w} {d} lineto stroke /{TEXT_FONT} 4 selectfont 0.5 {} moveto {} show grestore",
            m.join(" "),
            fmt6(d + 0.5),
            escape_string(&tag_bytes(&occ.tag)),
            w = fmt6(w),
            h = fmt6(h),
            d = fmt6(d),
        );
        edits.push((occ.show_span.clone(), ps));
        let r = reference_point(&replacement, entry.posn);
        let corners = replacement.corners().map(|c| t.apply(c));
        placed.push(PlacedBox { tag: occ.tag.clone(), replacement, transform: t, pinned: t.apply(r), corners });
    }

    // The banner goes after the first line; a one-line file gets a newline.
    let banner = match eps.iter().position(|&b| b == b'\n') {
        Some(i) => (i + 1, format!("{PREVIEW_BANNER}\n")),
        None => (eps.len(), format!("\n{PREVIEW_BANNER}\n")),
    };
    edits.push((banner.0..banner.0, banner.1));
    // Insertions sort before a replacement starting at the same byte.
    edits.sort_by_key(|(span, _)| (span.start, span.end));
    let mut out = Vec::with_capacity(eps.len() + edits.iter().map(|e| e.1.len()).sum::<usize>());
    let mut copied = 0;
    for (span, text) in edits {
        out.extend_from_slice(&eps[copied..span.start]);
        out.extend_from_slice(text.as_bytes());
        copied = span.end;
    }
    out.extend_from_slice(&eps[copied..]);
    Ok(Preview { bytes: out, placed, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(s: &str) -> PosCode {
        s.parse().unwrap()
    }

    #[test]
    fn reference_points() {
        let b = LabelBox { width: 10.0, height: 8.0, depth: 2.0 };
        assert_eq!(reference_point(&b, code("bl")), Point::new(0.0, 0.0));
        assert_eq!(reference_point(&b, code("Bc")), Point::new(5.0, 2.0));
        assert_eq!(reference_point(&b, code("tr")), Point::new(10.0, 8.0));
        assert_eq!(reference_point(&b, code("cc")), Point::new(5.0, 4.0));
    }

    #[test]
    fn measure_counts_visible_characters() {
        assert_eq!(visible_chars("\\psfragmathstyle{$\\psfragscalemath x+1$}"), 3);
        assert_eq!(visible_chars("a\\%b"), 3);
        assert_eq!(default_measure("").width, 5.0);
    }

    #[test]
    fn empty_registry_adds_only_the_banner() {
        let eps = b"%!PS-Adobe-3.0 EPSF-3.0\n0 0 moveto (a) show\n";
        let p = substitute_preview(eps, &TagRegistry::new(), default_measure).unwrap();
        let mut expected = b"%!PS-Adobe-3.0 EPSF-3.0\n".to_vec();
        expected.extend_from_slice(PREVIEW_BANNER.as_bytes());
        expected.extend_from_slice(b"\n0 0 moveto (a) show\n");
        assert_eq!(p.bytes, expected);
        assert_eq!(p.warnings.len(), 1);
        assert!(p.placed.is_empty());
    }

    #[test]
    fn substituted_file_still_scans() {
        let eps = b"%!PS\n/Times-Roman 10 selectfont gsave 50 50 translate 30 rotate 0 0 moveto (a) show grestore\n";
        let reg = TagRegistry::from_entries([PsfragEntry {
            tag: "a".into(),
            posn: code("cc"),
            psposn: code("cc"),
            scale: 1.0,
            rot: 0.0,
            body: "$x$".into(),
        }])
        .unwrap();
        let p = substitute_preview(eps, &reg, default_measure).unwrap();
        assert_eq!(p.placed.len(), 1);
        let again = crate::eps::scan_tags(&p.bytes).unwrap();
        // The tag name drawn inside the box, in the box's orientation.
        assert_eq!(again.len(), 1);
        assert!((again[0].rotation - 30.0).abs() < 1e-4);
        assert!((again[0].font_size - 4.0).abs() < 1e-12);
    }
}
