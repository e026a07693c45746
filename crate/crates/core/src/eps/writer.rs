//! Deterministic EPS output for an expanded scene.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::metrics::{string_width, ASCENT, DESCENT};
use super::rewrite::tag_bytes;
use super::token::escape_string;
use crate::expr::{print_source, Expr};
use crate::geom::{Affine, Point};
use crate::scene::{Color, Primitive, Scene, StrokeStyle, TextPrimitive};
use crate::Error;

pub const TEXT_FONT: &str = "Times-Roman";
pub const TEXT_FONT_SIZE: f64 = 10.0;

const ARROW_HEAD_LENGTH: f64 = 8.0;
const ARROW_HEAD_HALF_ANGLE: f64 = 25.0;
const ARC_SEGMENTS_PER_TURN: f64 = 64.0;

const PROLOG: &str = "\
%%BeginProlog
/m {moveto} bind def
/l {lineto} bind def
/s {stroke} bind def
/np {newpath} bind def
/w {setlinewidth} bind def
/g {setgray} bind def
/d {setdash} bind def
/gs {gsave} bind def
/gr {grestore} bind def
%%EndProlog
";

/// Where the writer put one text primitive.
#[derive(Debug, Clone, PartialEq)]
pub struct TextPlacement {
    /// Index into the scene's primitives.
    pub primitive: usize,
    pub text: String,
    pub tagged: bool,
    /// Device image of the primitive's position.
    pub anchor_point: Point,
    /// Device position of the baseline start, where `show` begins.
    pub origin: Point,
    /// Degrees counter-clockwise from the device x axis.
    pub rotation: f64,
    pub font_size: f64,
}

/// Formats a coordinate with at most three decimals.
pub fn format_num(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn plain_text(expr: &Expr) -> String {
    match expr.unheld() {
        Expr::Str(s) => s.clone(),
        other => print_source(other),
    }
}

/// Writes `scene` (decorations already expanded) as EPS. Text primitives
/// listed in `tag_text` show that string; the rest show a plain rendering
/// of their expression.
pub fn write_eps(
    scene: &Scene,
    tag_text: &HashMap<usize, String>,
) -> Result<(Vec<u8>, Vec<TextPlacement>), Error> {
    let (w, h) = scene.size;
    let to_device = scene.device_transform();
    let mut out = String::new();
    out.push_str("%!PS-Adobe-3.0 EPSF-3.0\n");
    let _ = writeln!(out, "%%BoundingBox: 0 0 {} {}", w.ceil() as i64, h.ceil() as i64);
    out.push_str("%%Creator: labelforge\n");
    let _ = writeln!(out, "%%DocumentNeededResources: font {TEXT_FONT}");
    out.push_str("%%EndComments\n");
    out.push_str(PROLOG);
    let _ = writeln!(out, "/{TEXT_FONT} {} selectfont", format_num(TEXT_FONT_SIZE));

    let mut placements = Vec::new();
    for (i, prim) in scene.primitives.iter().enumerate() {
        let fail = |what: &str| Error::InvalidScene(format!("primitive {i}: non-finite {what}"));
        match prim {
            Primitive::Polyline { points, style } => {
                let pts: Vec<Point> = points.iter().map(|p| to_device.apply(*p)).collect();
                if !pts.iter().all(|p| p.is_finite()) {
                    return Err(fail("polyline"));
                }
                stroke_paths(&mut out, style, &[pts]);
            }
            Primitive::Circle { center, radius, arc, style } => {
                let pts = arc_points(*center, *radius, *arc, &to_device);
                if !pts.iter().all(|p| p.is_finite()) {
                    return Err(fail("circle"));
                }
                stroke_paths(&mut out, style, &[pts]);
            }
            Primitive::Arrow { from, to, style } => {
                let (a, b) = (to_device.apply(*from), to_device.apply(*to));
                if !a.is_finite() || !b.is_finite() {
                    return Err(fail("arrow"));
                }
                stroke_paths(&mut out, style, &arrow_paths(a, b));
            }
            Primitive::Text(t) => {
                let tagged = tag_text.get(&i);
                let text = match tagged {
                    Some(tag) => tag.clone(),
                    None => plain_text(t.content.expr()),
                };
                let placement = write_text(&mut out, i, t, text, tagged.is_some(), &to_device);
                if !placement.origin.is_finite() {
                    return Err(fail("text position"));
                }
                placements.push(placement);
            }
        }
    }
    out.push_str("showpage\n%%EOF\n");
    Ok((out.into_bytes(), placements))
}

fn write_style(out: &mut String, style: &StrokeStyle) {
    let _ = write!(out, "gs {} w ", format_num(style.width));
    match style.color {
        Color::Gray(v) => {
            let _ = write!(out, "{} g ", format_num(v));
        }
        Color::Hue(hue) => {
            let _ = write!(out, "{} 1 1 sethsbcolor ", format_num(hue));
        }
    }
    let dash: Vec<String> = style.dash.iter().map(|d| format_num(*d)).collect();
    let _ = writeln!(out, "[{}] 0 d", dash.join(" "));
}

fn stroke_paths(out: &mut String, style: &StrokeStyle, paths: &[Vec<Point>]) {
    write_style(out, style);
    for path in paths {
        out.push_str("np");
        for (k, p) in path.iter().enumerate() {
            let op = if k == 0 { "m" } else { "l" };
            let _ = write!(out, " {} {} {op}", format_num(p.x), format_num(p.y));
        }
        out.push_str(" s\n");
    }
    out.push_str("gr\n");
}

fn arc_points(center: Point, radius: f64, arc: (f64, f64), to_device: &Affine) -> Vec<Point> {
    let sweep = arc.1 - arc.0;
    let n = ((sweep.abs() / 360.0 * ARC_SEGMENTS_PER_TURN).ceil() as usize).max(8);
    (0..=n)
        .map(|k| {
            let a = (arc.0 + sweep * k as f64 / n as f64).to_radians();
            to_device.apply(center + Point::new(a.cos(), a.sin()) * radius)
        })
        .collect()
}

fn arrow_paths(from: Point, to: Point) -> Vec<Vec<Point>> {
    let mut paths = vec![vec![from, to]];
    let back = from - to;
    let len = back.norm();
    if len > 0.0 {
        let unit = back * (1.0 / len);
        for sign in [1.0, -1.0] {
            let head = Affine::rotate(sign * ARROW_HEAD_HALF_ANGLE).apply_vector(unit);
            paths.push(vec![to + head * ARROW_HEAD_LENGTH, to]);
        }
    }
    paths
}

fn write_text(
    out: &mut String,
    index: usize,
    t: &TextPrimitive,
    text: String,
    tagged: bool,
    to_device: &Affine,
) -> TextPlacement {
    let bytes = tag_bytes(&text);
    let anchor_point = to_device.apply(t.position);
    let rotation = t.direction.1.atan2(t.direction.0).to_degrees();
    let size = TEXT_FONT_SIZE;
    let width = string_width(&bytes, size);
    // Box point selected by the anchor, relative to the baseline start.
    let (ax, ay) = t.anchor;
    let px = (ax + 1.0) / 2.0 * width;
    let py = -DESCENT * size + (ay + 1.0) / 2.0 * (ASCENT + DESCENT) * size;
    let (x, y, r, dx, dy) = (
        format_num(anchor_point.x),
        format_num(anchor_point.y),
        format_num(rotation),
        format_num(-px),
        format_num(-py),
    );
    let _ = writeln!(
        out,
        "gsave {x} {y} translate {r} rotate {dx} {dy} moveto {} show grestore",
        escape_string(&bytes)
    );
    let origin = anchor_point + Affine::rotate(rotation).apply_vector(Point::new(-px, -py));
    TextPlacement { primitive: index, text, tagged, anchor_point, origin, rotation, font_size: size }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eps::scan_tags;
    use crate::scene::PlotRange;

    fn scene() -> Scene {
        Scene::new(PlotRange { x: (0.0, 1.0), y: (0.0, 1.0) }, (360.0, 223.0))
    }

    #[test]
    fn empty_scene() {
        let (bytes, placements) = write_eps(&scene(), &HashMap::new()).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with("%!PS-Adobe-3.0 EPSF-3.0\n%%BoundingBox: 0 0 360 223\n"));
        assert!(placements.is_empty());
        assert!(scan_tags(&bytes).unwrap().is_empty());
    }

    #[test]
    fn numbers_are_trimmed() {
        assert_eq!(format_num(1.0), "1");
        assert_eq!(format_num(-0.0001), "0");
        assert_eq!(format_num(2.50049), "2.5");
        assert_eq!(format_num(-12.3456), "-12.346");
    }

    #[test]
    fn text_round_trips_through_scanner() {
        let mut s = scene();
        s.push(Primitive::Text(
            TextPrimitive::new(Expr::sym("x"), Point::new(0.5, 0.5), (1.0, -1.0))
                .with_direction((0.0, 1.0)),
        ));
        s.push(Primitive::Text(TextPrimitive::new(
            Expr::string("a(b"),
            Point::new(0.2, 0.3),
            (0.0, 0.0),
        )));
        let tags = HashMap::from([(0, "gA".to_string())]);
        let (bytes, placements) = write_eps(&s, &tags).unwrap();
        let occ = scan_tags(&bytes).unwrap();
        assert_eq!(occ.len(), 2);
        assert_eq!(occ[0].tag, "gA");
        assert_eq!(occ[1].tag, "a(b");
        for (o, p) in occ.iter().zip(&placements) {
            assert!(o.device_position.distance(p.origin) < 0.01);
            assert!((o.rotation - p.rotation).abs() < 1e-6);
        }
        assert!(placements[0].tagged && !placements[1].tagged);
    }

    #[test]
    fn deterministic() {
        let mut s = scene();
        s.push(Primitive::Arrow { from: Point::new(0.1, 0.1), to: Point::new(0.9, 0.9), style: StrokeStyle::default() });
        s.push(Primitive::Circle {
            center: Point::new(0.5, 0.5),
            radius: 0.2,
            arc: (0.0, 360.0),
            style: StrokeStyle { color: Color::Hue(0.6), ..StrokeStyle::default() },
        });
        let a = write_eps(&s, &HashMap::new()).unwrap();
        assert_eq!(a, write_eps(&s, &HashMap::new()).unwrap());
        assert!(scan_tags(&a.0).unwrap().is_empty());
    }
}
