//! Neutral plot-scene model, export options and decoration expansion.

use crate::expr::Expr;
use crate::geom::{Affine, Point};
use crate::labeling::LabelDirective;
use crate::Error;

/// Fraction of the target size left blank on each side of the plot range.
pub const MARGIN: f64 = 0.05;
/// Tick-mark length as a fraction of the shorter plot-range extent.
pub const TICK_LENGTH: f64 = 0.02;
/// Nominal label font size used to estimate label extents, in points.
pub const LABEL_FONT_SIZE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotRange {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl PlotRange {
    pub fn width(&self) -> f64 {
        self.x.1 - self.x.0
    }

    pub fn height(&self) -> f64 {
        self.y.1 - self.y.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Color {
    Gray(f64),
    /// Fully saturated, full-brightness hue in [0, 1].
    Hue(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrokeStyle {
    pub width: f64,
    pub dash: Vec<f64>,
    pub color: Color,
}

impl Default for StrokeStyle {
    fn default() -> Self {
        Self { width: 0.5, dash: Vec::new(), color: Color::Gray(0.0) }
    }
}

impl StrokeStyle {
    fn gridline() -> Self {
        Self { width: 0.25, dash: vec![0.1, 1.0], color: Color::Gray(0.5) }
    }
}

/// What a text primitive shows: a bare expression, or one wrapped in a
/// label directive and therefore tagged for replacement.
#[derive(Debug, Clone, PartialEq)]
pub enum TextContent {
    Bare(Expr),
    Directive(LabelDirective),
}

impl TextContent {
    pub fn expr(&self) -> &Expr {
        match self {
            TextContent::Bare(e) => e,
            TextContent::Directive(d) => &d.expr,
        }
    }
}

impl From<Expr> for TextContent {
    fn from(e: Expr) -> Self {
        TextContent::Bare(e)
    }
}

impl From<LabelDirective> for TextContent {
    fn from(d: LabelDirective) -> Self {
        TextContent::Directive(d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TextPrimitive {
    pub content: TextContent,
    /// Plot units.
    pub position: Point,
    /// Point of the label box placed at `position`: −1 left/bottom edge,
    /// +1 right/top edge, 0 center.
    pub anchor: (f64, f64),
    /// Unit baseline direction in device space.
    pub direction: (f64, f64),
}

impl TextPrimitive {
    pub fn new(content: impl Into<TextContent>, position: Point, anchor: (f64, f64)) -> Self {
        Self { content: content.into(), position, anchor, direction: (1.0, 0.0) }
    }

    pub fn with_direction(mut self, direction: (f64, f64)) -> Self {
        self.direction = direction;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    Polyline { points: Vec<Point>, style: StrokeStyle },
    /// Arc from `arc.0` to `arc.1` degrees, counter-clockwise.
    Circle { center: Point, radius: f64, arc: (f64, f64), style: StrokeStyle },
    Arrow { from: Point, to: Point, style: StrokeStyle },
    Text(TextPrimitive),
}

impl Primitive {
    pub fn as_text(&self) -> Option<&TextPrimitive> {
        match self {
            Primitive::Text(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tick {
    pub value: f64,
    pub label: TextContent,
}

impl Tick {
    /// Tick at the numeric value of `label`.
    pub fn at(label: Expr) -> Option<Tick> {
        let value = label.numeric_value()?;
        Some(Tick { value, label: TextContent::Bare(label) })
    }
}

/// Evenly spaced ticks from `start` to `stop` (inclusive, within half a
/// step), labelled with decimals of the step's precision.
pub fn linear_ticks(start: f64, stop: f64, step: f64) -> Vec<Tick> {
    use crate::expr::Number;
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
        return Vec::new();
    }
    let mut decimals = 0u32;
    while decimals < 6 && ((step * 10f64.powi(decimals as i32)).round() - step * 10f64.powi(decimals as i32)).abs() > 1e-9 {
        decimals += 1;
    }
    let count = ((stop - start) / step + 1e-9).floor() as i64;
    (0..=count)
        .map(|i| {
            let value = start + i as f64 * step;
            let scaled = (value * 10f64.powi(decimals as i32)).round() as i64;
            let number = if decimals == 0 {
                Number::Integer(scaled)
            } else {
                Number::Decimal { mantissa: scaled, scale: decimals }
            };
            Tick { value, label: TextContent::Bare(Expr::Num(number)) }
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameTicks {
    pub bottom: Option<Vec<Tick>>,
    pub left: Option<Vec<Tick>>,
    pub top: Option<Vec<Tick>>,
    pub right: Option<Vec<Tick>>,
}

impl FrameTicks {
    fn edges(&self) -> [(Edge, Option<&Vec<Tick>>); 4] {
        [
            (Edge::Bottom, self.bottom.as_ref()),
            (Edge::Left, self.left.as_ref()),
            (Edge::Top, self.top.as_ref()),
            (Edge::Right, self.right.as_ref()),
        ]
    }

    fn any(&self) -> bool {
        self.edges().iter().any(|(_, t)| t.is_some())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Bottom,
    Left,
    Top,
    Right,
}

impl Edge {
    /// Anchor of a tick label on this edge: the label sits outside the frame.
    pub fn label_anchor(self) -> (f64, f64) {
        match self {
            Edge::Bottom => (0.0, 1.0),
            Edge::Left => (1.0, 0.0),
            Edge::Top => (0.0, -1.0),
            Edge::Right => (-1.0, 0.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Edge::Bottom => "bottom",
            Edge::Left => "left",
            Edge::Top => "top",
            Edge::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Gridlines {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Text-generating plot options, turned into primitives by
/// [`expand_decorations`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DecorationSpec {
    pub plot_label: Option<TextContent>,
    pub axes_labels: Option<(TextContent, TextContent)>,
    pub frame_ticks: FrameTicks,
    pub gridlines: Option<Gridlines>,
}

impl DecorationSpec {
    pub fn is_empty(&self) -> bool {
        self.plot_label.is_none()
            && self.axes_labels.is_none()
            && !self.frame_ticks.any()
            && self.gridlines.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub plot_range: PlotRange,
    /// Width and height in PostScript points.
    pub size: (f64, f64),
    pub primitives: Vec<Primitive>,
    pub decorations: DecorationSpec,
}

impl Scene {
    pub fn new(plot_range: PlotRange, size: (f64, f64)) -> Self {
        Self { plot_range, size, primitives: Vec::new(), decorations: DecorationSpec::default() }
    }

    pub fn push(&mut self, primitive: Primitive) -> &mut Self {
        self.primitives.push(primitive);
        self
    }

    pub fn texts(&self) -> impl Iterator<Item = (usize, &TextPrimitive)> {
        self.primitives
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.as_text().map(|t| (i, t)))
    }

    /// Checks the structural invariants of the scene.
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |msg: String| Err(Error::InvalidScene(msg));
        let PlotRange { x, y } = self.plot_range;
        if !(x.0.is_finite() && x.1.is_finite() && x.0 < x.1) {
            return bad(format!("x range [{}, {}] must satisfy min < max", x.0, x.1));
        }
        if !(y.0.is_finite() && y.1.is_finite() && y.0 < y.1) {
            return bad(format!("y range [{}, {}] must satisfy min < max", y.0, y.1));
        }
        if !(self.size.0 > 0.0 && self.size.1 > 0.0 && self.size.0.is_finite() && self.size.1.is_finite()) {
            return bad(format!("size {:?} must be positive", self.size));
        }
        for (i, p) in self.primitives.iter().enumerate() {
            match p {
                Primitive::Polyline { points, .. } => {
                    if points.len() < 2 {
                        return bad(format!("primitive {i}: polyline needs at least 2 points"));
                    }
                    if !points.iter().all(|p| p.is_finite()) {
                        return bad(format!("primitive {i}: non-finite polyline point"));
                    }
                }
                Primitive::Circle { center, radius, arc, .. } => {
                    if !(*radius > 0.0 && radius.is_finite()) {
                        return bad(format!("primitive {i}: circle radius must be positive"));
                    }
                    if !center.is_finite() || !arc.0.is_finite() || !arc.1.is_finite() {
                        return bad(format!("primitive {i}: non-finite circle"));
                    }
                }
                Primitive::Arrow { from, to, .. } => {
                    if !from.is_finite() || !to.is_finite() {
                        return bad(format!("primitive {i}: non-finite arrow"));
                    }
                }
                Primitive::Text(t) => validate_text(i, t)?,
            }
        }
        for (edge, ticks) in self.decorations.frame_ticks.edges() {
            let Some(ticks) = ticks else { continue };
            if !ticks.iter().all(|t| t.value.is_finite()) {
                return bad(format!("{} ticks: non-finite value", edge.name()));
            }
            if ticks.windows(2).any(|w| w[0].value >= w[1].value) {
                return bad(format!("{} ticks must be strictly increasing", edge.name()));
            }
        }
        Ok(())
    }

    /// Maps plot coordinates onto the page, leaving a [`MARGIN`] on each side.
    pub fn device_transform(&self) -> Affine {
        let (w, h) = self.size;
        let sx = (1.0 - 2.0 * MARGIN) * w / self.plot_range.width();
        let sy = (1.0 - 2.0 * MARGIN) * h / self.plot_range.height();
        Affine::new(
            sx,
            0.0,
            0.0,
            sy,
            MARGIN * w - sx * self.plot_range.x.0,
            MARGIN * h - sy * self.plot_range.y.0,
        )
    }
}

fn validate_text(i: usize, t: &TextPrimitive) -> Result<(), Error> {
    let bad = |msg: String| Err(Error::InvalidScene(format!("primitive {i}: {msg}")));
    if !t.position.is_finite() {
        return bad("text position must be finite".into());
    }
    let (ax, ay) = t.anchor;
    if !(-1.0..=1.0).contains(&ax) || !(-1.0..=1.0).contains(&ay) {
        return bad(format!("anchor ({ax}, {ay}) outside [-1, 1]"));
    }
    let (dx, dy) = t.direction;
    if !((dx.hypot(dy) - 1.0).abs() <= 1e-9) {
        return bad(format!("direction ({dx}, {dy}) is not a unit vector"));
    }
    if let TextContent::Directive(d) = &t.content {
        d.validate().map_err(|m| Error::InvalidScene(format!("primitive {i}: {m}")))?;
    }
    Ok(())
}

/// Options of a full export run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportOptions {
    pub tex_suffix: String,
    pub eps_suffix: String,
    pub renumber_tags: bool,
    pub auto_convert_text: bool,
    pub auto_position: bool,
}

impl Default for ExportOptions {
    fn default() -> Self {
        Self {
            tex_suffix: "-psfrag.tex".to_string(),
            eps_suffix: "-psfrag.eps".to_string(),
            renumber_tags: false,
            auto_convert_text: true,
            auto_position: true,
        }
    }
}

impl ExportOptions {
    /// Automatic conversion needs automatic positioning.
    pub fn effective_auto_convert(&self) -> bool {
        self.auto_position && self.auto_convert_text
    }
}

/// Turns tick, axis-label, plot-label and gridline specifications into
/// explicit primitives appended after the existing ones, and clears the
/// decorations. Gridlines come first so they are drawn underneath.
pub fn expand_decorations(scene: &Scene) -> Scene {
    let mut out = scene.clone();
    if scene.decorations.is_empty() {
        return out;
    }
    let deco = std::mem::take(&mut out.decorations);
    let PlotRange { x: (x0, x1), y: (y0, y1) } = scene.plot_range;
    let tick_len = TICK_LENGTH * scene.plot_range.width().min(scene.plot_range.height());

    // One label height in plot units along each axis.
    let to_device = scene.device_transform();
    let label_w = LABEL_FONT_SIZE / to_device.a;
    let label_h = LABEL_FONT_SIZE / to_device.d;

    if let Some(grid) = &deco.gridlines {
        for &gx in &grid.x {
            out.primitives.push(Primitive::Polyline {
                points: vec![Point::new(gx, y0), Point::new(gx, y1)],
                style: StrokeStyle::gridline(),
            });
        }
        for &gy in &grid.y {
            out.primitives.push(Primitive::Polyline {
                points: vec![Point::new(x0, gy), Point::new(x1, gy)],
                style: StrokeStyle::gridline(),
            });
        }
    }

    if deco.frame_ticks.any() {
        out.primitives.push(Primitive::Polyline {
            points: vec![
                Point::new(x0, y0),
                Point::new(x1, y0),
                Point::new(x1, y1),
                Point::new(x0, y1),
                Point::new(x0, y0),
            ],
            style: StrokeStyle::default(),
        });
    }

    let mut labels = Vec::new();
    for (edge, ticks) in deco.frame_ticks.edges() {
        let Some(ticks) = ticks else { continue };
        for tick in ticks {
            let v = tick.value;
            let (base, inward) = match edge {
                Edge::Bottom => (Point::new(v, y0), Point::new(0.0, tick_len)),
                Edge::Left => (Point::new(x0, v), Point::new(tick_len, 0.0)),
                Edge::Top => (Point::new(v, y1), Point::new(0.0, -tick_len)),
                Edge::Right => (Point::new(x1, v), Point::new(-tick_len, 0.0)),
            };
            out.primitives.push(Primitive::Polyline {
                points: vec![base, base + inward],
                style: StrokeStyle::default(),
            });
            labels.push(Primitive::Text(TextPrimitive::new(
                tick.label.clone(),
                base,
                edge.label_anchor(),
            )));
        }
    }
    out.primitives.extend(labels);

    let xmid = 0.5 * (x0 + x1);
    let ymid = 0.5 * (y0 + y1);
    if let Some((xlabel, ylabel)) = deco.axes_labels {
        // Outside the tick labels by one label-height estimate.
        out.primitives.push(Primitive::Text(TextPrimitive::new(
            xlabel,
            Point::new(xmid, y0 - 2.0 * label_h),
            (0.0, 1.0),
        )));
        out.primitives.push(Primitive::Text(
            TextPrimitive::new(ylabel, Point::new(x0 - 3.0 * label_w, ymid), (0.0, -1.0))
                .with_direction((0.0, 1.0)),
        ));
    }
    if let Some(title) = deco.plot_label {
        out.primitives.push(Primitive::Text(TextPrimitive::new(
            title,
            Point::new(xmid, y1 + 0.5 * label_h),
            (0.0, -1.0),
        )));
    }
    out
}

/// Wraps every bare text expression in an all-Automatic label directive.
pub fn auto_wrap(scene: &Scene) -> Scene {
    let mut out = scene.clone();
    for p in &mut out.primitives {
        if let Primitive::Text(t) = p {
            if let TextContent::Bare(e) = &t.content {
                t.content = TextContent::Directive(LabelDirective::new(e.clone()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn range() -> PlotRange {
        PlotRange { x: (0.0, 2.0 * std::f64::consts::PI), y: (-1.2, 3.2) }
    }

    fn ticks(srcs: &[&str]) -> Option<Vec<Tick>> {
        Some(srcs.iter().map(|s| Tick::at(parse_expr(s).unwrap()).unwrap()).collect())
    }

    #[test]
    fn empty_decorations_are_identity() {
        let mut s = Scene::new(range(), (360.0, 223.0));
        s.push(Primitive::Text(TextPrimitive::new(Expr::string("a"), Point::new(1.0, 1.0), (0.0, 0.0))));
        assert_eq!(expand_decorations(&s), s);
    }

    #[test]
    fn tick_labels_take_edge_anchors() {
        let mut s = Scene::new(range(), (360.0, 223.0));
        s.decorations.frame_ticks.bottom = ticks(&["0", "Pi/2"]);
        s.decorations.frame_ticks.left = ticks(&["1"]);
        s.decorations.frame_ticks.top = ticks(&["1"]);
        s.decorations.frame_ticks.right = ticks(&["2"]);
        let e = expand_decorations(&s);
        let texts: Vec<_> = e.texts().map(|(_, t)| t.clone()).collect();
        assert_eq!(texts.len(), 5);
        assert_eq!(texts[1].content, TextContent::Bare(parse_expr("Pi/2").unwrap()));
        assert_eq!(texts[1].position, Point::new(std::f64::consts::FRAC_PI_2, -1.2));
        assert_eq!(texts[1].anchor, (0.0, 1.0));
        assert_eq!(texts[2].anchor, (1.0, 0.0));
        assert_eq!(texts[3].anchor, (0.0, -1.0));
        assert_eq!(texts[4].anchor, (-1.0, 0.0));
        assert!(e.decorations.is_empty());
    }

    #[test]
    fn expansion_is_idempotent_and_preserves_prefix() {
        let mut s = Scene::new(range(), (360.0, 223.0));
        s.push(Primitive::Arrow { from: Point::new(1.0, 1.0), to: Point::new(2.0, 2.0), style: StrokeStyle::default() });
        s.decorations.frame_ticks.bottom = ticks(&["0", "1"]);
        s.decorations.axes_labels = Some((Expr::sym("x").into(), Expr::sym("y").into()));
        s.decorations.plot_label = Some(Expr::string("title").into());
        s.decorations.gridlines = Some(Gridlines { x: vec![1.0], y: vec![0.0, 1.0] });
        let once = expand_decorations(&s);
        assert_eq!(expand_decorations(&once), once);
        assert_eq!(once.primitives[0], s.primitives[0]);
        let texts: Vec<_> = once.texts().map(|(_, t)| t.clone()).collect();
        assert_eq!(texts.len(), 5);
        assert_eq!(texts[3].direction, (0.0, 1.0));
        assert_eq!(texts[3].anchor, (0.0, -1.0));
        assert_eq!(texts[4].anchor, (0.0, -1.0));
    }

    #[test]
    fn auto_wrap_leaves_directives() {
        let mut s = Scene::new(range(), (100.0, 100.0));
        let d = LabelDirective::new(Expr::int(1)).with_position("Br".parse().unwrap());
        s.push(Primitive::Text(TextPrimitive::new(d.clone(), Point::new(0.0, 0.0), (0.0, 0.0))));
        s.push(Primitive::Text(TextPrimitive::new(Expr::string("local maximum"), Point::new(0.0, 0.0), (0.0, 1.0))));
        let w = auto_wrap(&s);
        assert_eq!(w.primitives[0], s.primitives[0]);
        assert_eq!(
            w.primitives[1].as_text().unwrap().content,
            TextContent::Directive(LabelDirective::new(Expr::string("local maximum")))
        );
        assert_eq!(auto_wrap(&w), w);
        let empty = Scene::new(range(), (100.0, 100.0));
        assert_eq!(auto_wrap(&empty), empty);
    }

    #[test]
    fn validation_rejects_bad_scenes() {
        let mut s = Scene::new(PlotRange { x: (1.0, 1.0), y: (0.0, 1.0) }, (10.0, 10.0));
        assert!(s.validate().is_err());
        s.plot_range.x = (0.0, 1.0);
        assert!(s.validate().is_ok());
        s.decorations.frame_ticks.left = ticks(&["1", "0"]);
        assert!(s.validate().is_err());
        s.decorations.frame_ticks.left = None;
        s.push(Primitive::Text(TextPrimitive::new(Expr::int(1), Point::new(0.0, 0.0), (0.0, 0.0)).with_direction((1.0, 1.0))));
        assert!(s.validate().is_err());
    }

    #[test]
    fn linear_tick_labels_keep_step_precision() {
        let t = linear_ticks(-0.5, 1.0, 0.5);
        let labels: Vec<String> = t.iter().map(|t| t.label.expr().to_string()).collect();
        assert_eq!(labels, ["-0.5", "0.0", "0.5", "1.0"]);
        assert_eq!(linear_ticks(0.0, 2.0, 1.0).len(), 3);
    }
}
