//! JSON scene and hook documents.
//!
//! A scene document looks like
//!
//! ```json
//! {"version": 1, "plot_range": [[0, 6.3], [-1.2, 3.2]], "size": [360, 223],
//!  "primitives": [
//!    {"type": "polyline", "points": [[0, 0], [1, 1]], "style": {"width": 0.5, "hue": 0.6}},
//!    {"type": "text", "expr": "Sin[x]", "pos": [1, 2], "anchor": [0, 1],
//!     "psfrag": {"position": "tc", "tex": "$\\sin x$"}}],
//!  "decorations": {"frame_ticks": {"bottom": ["0", "Pi/2"], "left": {"linear": [-1, 3, 1]}}}}
//! ```
//!
//! Expressions are strings in the source syntax; `"text"` is shorthand for a
//! string expression. A `psfrag` object, even an empty one, turns the label
//! into a label directive.

use serde::Deserialize;

use crate::expr::{parse_expr, Expr, HookSet, LabelClass, PreApply};
use crate::geom::Point;
use crate::labeling::{LabelDirective, PosCode, PsPosition, Scaling};
use crate::scene::{
    linear_ticks, Color, DecorationSpec, FrameTicks, Gridlines, PlotRange, Primitive, Scene,
    StrokeStyle, TextContent, TextPrimitive, Tick,
};
use crate::Error;

pub const SCENE_VERSION: u32 = 1;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneDoc {
    version: u32,
    plot_range: [[f64; 2]; 2],
    size: [f64; 2],
    #[serde(default)]
    primitives: Vec<PrimitiveDoc>,
    #[serde(default)]
    decorations: DecorationsDoc,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct StyleDoc {
    width: Option<f64>,
    dash: Option<Vec<f64>>,
    gray: Option<f64>,
    hue: Option<f64>,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum PrimitiveDoc {
    Polyline {
        points: Vec<[f64; 2]>,
        #[serde(default)]
        style: StyleDoc,
    },
    Circle {
        center: [f64; 2],
        radius: f64,
        arc: Option<[f64; 2]>,
        #[serde(default)]
        style: StyleDoc,
    },
    Arrow {
        from: [f64; 2],
        to: [f64; 2],
        #[serde(default)]
        style: StyleDoc,
    },
    Text {
        expr: Option<String>,
        text: Option<String>,
        pos: [f64; 2],
        anchor: Option<[f64; 2]>,
        dir: Option<[f64; 2]>,
        psfrag: Option<PsfragDoc>,
    },
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct PsfragDoc {
    position: Option<String>,
    ps_position: Option<String>,
    tex: Option<String>,
    tag: Option<String>,
    rotation: Option<f64>,
    scaling: Option<ScalingDoc>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalingDoc {
    Factor(f64),
    Keyword(String),
}

/// A label: an expression string, or an object.
#[derive(Deserialize)]
#[serde(untagged)]
enum LabelDoc {
    Source(String),
    Full(LabelObject),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelObject {
    expr: Option<String>,
    text: Option<String>,
    psfrag: Option<PsfragDoc>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TickDoc {
    Source(String),
    Full(TickObject),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TickObject {
    value: Option<f64>,
    expr: Option<String>,
    text: Option<String>,
    psfrag: Option<PsfragDoc>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EdgeDoc {
    List(Vec<TickDoc>),
    Linear(LinearDoc),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LinearDoc {
    linear: [f64; 3],
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct DecorationsDoc {
    plot_label: Option<LabelDoc>,
    axes_labels: Option<[LabelDoc; 2]>,
    #[serde(default)]
    frame_ticks: FrameTicksDoc,
    gridlines: Option<GridlinesDoc>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FrameTicksDoc {
    bottom: Option<EdgeDoc>,
    left: Option<EdgeDoc>,
    top: Option<EdgeDoc>,
    right: Option<EdgeDoc>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct GridlinesDoc {
    #[serde(default)]
    x: Vec<f64>,
    #[serde(default)]
    y: Vec<f64>,
}

fn json_error(src: &str, e: &serde_json::Error) -> Error {
    // serde_json reports 1-based line and column; turn them into a byte
    // offset.
    let line_start: usize = src.split_inclusive('\n').take(e.line().saturating_sub(1)).map(str::len).sum();
    let offset = (line_start + e.column().saturating_sub(1)).min(src.len());
    let message = e.to_string();
    let message = message.split(" at line ").next().unwrap_or(&message);
    Error::Document(format!("JSON error at byte {offset}: {message}"))
}

fn doc_err(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Document(format!("{path}: {msg}"))
}

fn parse_source(path: &str, src: &str) -> Result<Expr, Error> {
    parse_expr(src).map_err(|e| doc_err(path, format_args!("in expression {src:?}: {e}")))
}

fn label_expr(path: &str, expr: Option<String>, text: Option<String>) -> Result<Expr, Error> {
    match (expr, text) {
        (Some(e), None) => parse_source(&format!("{path}.expr"), &e),
        (None, Some(t)) => Ok(Expr::string(t)),
        (Some(_), Some(_)) => Err(doc_err(path, "give either `expr` or `text`, not both")),
        (None, None) => Err(doc_err(path, "missing `expr` or `text`")),
    }
}

fn pos_code(path: &str, s: &str) -> Result<PosCode, Error> {
    s.parse().map_err(|e| doc_err(path, e))
}

fn directive(path: &str, expr: Expr, doc: PsfragDoc) -> Result<LabelDirective, Error> {
    let mut d = LabelDirective::new(expr);
    if let Some(p) = doc.position.filter(|p| p != "auto") {
        d.position = Some(pos_code(&format!("{path}.position"), &p)?);
    }
    if let Some(p) = doc.ps_position.filter(|p| p != "copy") {
        d.ps_position = PsPosition::Code(pos_code(&format!("{path}.ps_position"), &p)?);
    }
    d.tex_command = doc.tex;
    d.psfrag_tag = doc.tag;
    d.rotation = doc.rotation.unwrap_or(0.0);
    d.scaling = match doc.scaling {
        None => Scaling::Automatic,
        Some(ScalingDoc::Keyword(k)) if k == "auto" => Scaling::Automatic,
        Some(ScalingDoc::Keyword(k)) => {
            return Err(doc_err(&format!("{path}.scaling"), format_args!("expected a number or \"auto\", got {k:?}")))
        }
        Some(ScalingDoc::Factor(f)) => Scaling::Factor(f),
    };
    d.validate().map_err(|m| doc_err(path, m))?;
    Ok(d)
}

fn content(path: &str, expr: Expr, psfrag: Option<PsfragDoc>) -> Result<TextContent, Error> {
    Ok(match psfrag {
        Some(doc) => TextContent::Directive(directive(&format!("{path}.psfrag"), expr, doc)?),
        None => TextContent::Bare(expr),
    })
}

fn label(path: &str, doc: LabelDoc) -> Result<TextContent, Error> {
    match doc {
        LabelDoc::Source(src) => Ok(TextContent::Bare(parse_source(path, &src)?)),
        LabelDoc::Full(o) => {
            let expr = label_expr(path, o.expr, o.text)?;
            content(path, expr, o.psfrag)
        }
    }
}

fn tick(path: &str, doc: TickDoc) -> Result<Tick, Error> {
    let (expr, value, psfrag) = match doc {
        TickDoc::Source(src) => (parse_source(path, &src)?, None, None),
        TickDoc::Full(o) => (label_expr(path, o.expr, o.text)?, o.value, o.psfrag),
    };
    let value = match value.or_else(|| expr.numeric_value()) {
        Some(v) => v,
        None => return Err(doc_err(path, "tick label is not numeric; give an explicit `value`")),
    };
    Ok(Tick { value, label: content(path, expr, psfrag)? })
}

fn edge(path: &str, doc: Option<EdgeDoc>) -> Result<Option<Vec<Tick>>, Error> {
    match doc {
        None => Ok(None),
        Some(EdgeDoc::Linear(l)) => {
            let [start, stop, step] = l.linear;
            if !(step > 0.0) {
                return Err(doc_err(path, "linear tick step must be positive"));
            }
            Ok(Some(linear_ticks(start, stop, step)))
        }
        Some(EdgeDoc::List(items)) => items
            .into_iter()
            .enumerate()
            .map(|(i, t)| tick(&format!("{path}[{i}]"), t))
            .collect::<Result<Vec<_>, _>>()
            .map(Some),
    }
}

fn style(path: &str, doc: StyleDoc) -> Result<StrokeStyle, Error> {
    let mut s = StrokeStyle::default();
    if let Some(w) = doc.width {
        s.width = w;
    }
    if let Some(d) = doc.dash {
        s.dash = d;
    }
    s.color = match (doc.gray, doc.hue) {
        (Some(_), Some(_)) => return Err(doc_err(path, "give either `gray` or `hue`, not both")),
        (Some(g), None) => Color::Gray(g),
        (None, Some(h)) => Color::Hue(h),
        (None, None) => s.color,
    };
    Ok(s)
}

fn point(p: [f64; 2]) -> Point {
    Point::new(p[0], p[1])
}

/// Parses and validates a scene document.
pub fn parse_scene(src: &str) -> Result<Scene, Error> {
    let doc: SceneDoc = serde_json::from_str(src).map_err(|e| json_error(src, &e))?;
    if doc.version != SCENE_VERSION {
        return Err(Error::Document(format!(
            "unsupported scene version {} (expected {SCENE_VERSION})",
            doc.version
        )));
    }
    let [[x0, x1], [y0, y1]] = doc.plot_range;
    let mut scene = Scene::new(PlotRange { x: (x0, x1), y: (y0, y1) }, (doc.size[0], doc.size[1]));
    for (i, p) in doc.primitives.into_iter().enumerate() {
        let path = format!("primitives[{i}]");
        let prim = match p {
            PrimitiveDoc::Polyline { points, style: s } => Primitive::Polyline {
                points: points.into_iter().map(point).collect(),
                style: style(&path, s)?,
            },
            PrimitiveDoc::Circle { center, radius, arc, style: s } => Primitive::Circle {
                center: point(center),
                radius,
                arc: arc.map_or((0.0, 360.0), |a| (a[0], a[1])),
                style: style(&path, s)?,
            },
            PrimitiveDoc::Arrow { from, to, style: s } => {
                Primitive::Arrow { from: point(from), to: point(to), style: style(&path, s)? }
            }
            PrimitiveDoc::Text { expr, text, pos, anchor, dir, psfrag } => {
                let e = label_expr(&path, expr, text)?;
                let anchor = anchor.map_or((0.0, 0.0), |a| (a[0], a[1]));
                let dir = dir.map_or((1.0, 0.0), |d| (d[0], d[1]));
                Primitive::Text(
                    TextPrimitive::new(content(&path, e, psfrag)?, point(pos), anchor).with_direction(dir),
                )
            }
        };
        scene.push(prim);
    }
    let d = doc.decorations;
    scene.decorations = DecorationSpec {
        plot_label: d.plot_label.map(|l| label("decorations.plot_label", l)).transpose()?,
        axes_labels: match d.axes_labels {
            Some([x, y]) => Some((
                label("decorations.axes_labels[0]", x)?,
                label("decorations.axes_labels[1]", y)?,
            )),
            None => None,
        },
        frame_ticks: FrameTicks {
            bottom: edge("decorations.frame_ticks.bottom", d.frame_ticks.bottom)?,
            left: edge("decorations.frame_ticks.left", d.frame_ticks.left)?,
            top: edge("decorations.frame_ticks.top", d.frame_ticks.top)?,
            right: edge("decorations.frame_ticks.right", d.frame_ticks.right)?,
        },
        gridlines: d.gridlines.map(|g| Gridlines { x: g.x, y: g.y }),
    };
    scene.validate()?;
    Ok(scene)
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct HookClassDoc {
    #[serde(default)]
    pre_apply: Vec<String>,
    #[serde(default)]
    post_replace: Vec<[String; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HooksDoc {
    version: u32,
    #[serde(default)]
    text: HookClassDoc,
    #[serde(default)]
    math: HookClassDoc,
    #[serde(default)]
    numeric: HookClassDoc,
}

/// Parses a hook document:
/// `{"version": 1, "math": {"pre_apply": ["hold"], "post_replace": [["\\sqrt", "\\surd"]]}}`.
pub fn parse_hooks(src: &str) -> Result<HookSet, Error> {
    let doc: HooksDoc = serde_json::from_str(src).map_err(|e| json_error(src, &e))?;
    if doc.version != SCENE_VERSION {
        return Err(Error::Document(format!(
            "unsupported hooks version {} (expected {SCENE_VERSION})",
            doc.version
        )));
    }
    let mut hooks = HookSet::new();
    for (class, c) in [
        (LabelClass::Text, doc.text),
        (LabelClass::Math, doc.math),
        (LabelClass::Numeric, doc.numeric),
    ] {
        for name in c.pre_apply {
            let hook = PreApply::named(&name).ok_or_else(|| {
                doc_err(
                    &format!("{}.pre_apply", class.name()),
                    format_args!("unknown transform {name:?} (known: hold, expand_negations)"),
                )
            })?;
            hooks = hooks.with_pre_apply(class, hook);
        }
        for [find, replace] in c.post_replace {
            hooks = hooks.with_post_replace(class, find, replace);
        }
    }
    Ok(hooks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::guess_tex;

    const SMALL: &str = r#"{
        "version": 1,
        "plot_range": [[0, 2], [-1, 1]],
        "size": [200, 100],
        "primitives": [
            {"type": "polyline", "points": [[0, 0], [1, 1]], "style": {"hue": 0.5}},
            {"type": "circle", "center": [1, 0], "radius": 0.5},
            {"type": "arrow", "from": [0, 0], "to": [1, 0]},
            {"type": "text", "text": "local maximum", "pos": [1, 1], "anchor": [0, 1]},
            {"type": "text", "expr": "Sin[x]", "pos": [0, 0], "dir": [0, 1],
             "psfrag": {"position": "Br", "tag": "s", "scaling": 1.5}}
        ],
        "decorations": {
            "axes_labels": ["x", {"text": "y axis"}],
            "frame_ticks": {"bottom": ["0", "Pi/2", {"value": 1.9, "text": "end"}],
                            "left": {"linear": [-1, 1, 0.5]}},
            "gridlines": {"x": [1]}
        }
    }"#;

    #[test]
    fn full_document() {
        let s = parse_scene(SMALL).unwrap();
        assert_eq!(s.primitives.len(), 5);
        let t = s.primitives[4].as_text().unwrap();
        let TextContent::Directive(d) = &t.content else { panic!() };
        assert_eq!(d.position, Some("Br".parse().unwrap()));
        assert_eq!(d.scaling, Scaling::Factor(1.5));
        assert_eq!(t.direction, (0.0, 1.0));
        let bottom = s.decorations.frame_ticks.bottom.as_ref().unwrap();
        assert!((bottom[1].value - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(bottom[2].value, 1.9);
        assert_eq!(s.decorations.frame_ticks.left.as_ref().unwrap().len(), 5);
    }

    #[test]
    fn rejects_unknown_keys_and_versions() {
        let bad = SMALL.replacen("\"size\"", "\"sise\"", 1);
        assert!(matches!(parse_scene(&bad), Err(Error::Document(_))));
        let bad = SMALL.replacen("\"version\": 1", "\"version\": 2", 1);
        assert!(parse_scene(&bad).unwrap_err().to_string().contains("version 2"));
        let bad = SMALL.replacen("\"Sin[x]\"", "\"Sin[x\"", 1);
        let msg = parse_scene(&bad).unwrap_err().to_string();
        assert!(msg.contains("primitives[4].expr") && msg.contains("byte"), "{msg}");
    }

    #[test]
    fn json_errors_report_byte_offsets() {
        let err = parse_scene("{\"version\": 1,\n  oops}").unwrap_err();
        assert!(err.to_string().starts_with("JSON error at byte 17"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn semantic_errors_are_not_parse_errors() {
        let bad = SMALL.replacen("[[0, 2], [-1, 1]]", "[[2, 0], [-1, 1]]", 1);
        assert_eq!(parse_scene(&bad).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn hooks_document() {
        let hooks = parse_hooks(
            r#"{"version": 1, "math": {"pre_apply": ["hold"], "post_replace": [["\\sqrt", "\\surd"]]}}"#,
        )
        .unwrap();
        let out = guess_tex(&parse_expr("Sqrt[x]").unwrap(), &hooks);
        assert!(out.text.contains("\\surd") && !out.text.contains("\\sqrt"));
        assert!(parse_hooks(r#"{"version": 1, "math": {"pre_apply": ["simplify"]}}"#).is_err());
    }
}
