//! Minimal SVG line charts on `[-1, 1]`.
//!
//! Coordinates are written with three decimals and data ranges with
//! [`real17`], so the plotted samples can be recovered from the file.

use std::fmt::Write;

use cms_core::fmt::real17;

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 400.0;
pub const LEFT: f64 = 64.0;
pub const RIGHT: f64 = 24.0;
pub const TOP: f64 = 36.0;
pub const BOTTOM: f64 = 48.0;
const MARKER: f64 = 4.0;
const COLORS: [&str; 4] = ["#1f4e9c", "#c0392b", "#2e7d32", "#6a1b9a"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Circle,
    Square,
    Triangle,
}

impl Shape {
    fn class(self) -> &'static str {
        match self {
            Shape::Circle => "gauss",
            Shape::Square => "lobatto",
            Shape::Triangle => "sigma",
        }
    }
}

/// A curve drawn as one polyline per segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub segments: Vec<Vec<(f64, f64)>>,
}

impl Curve {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            segments: vec![points],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub title: String,
    pub y_label: String,
    pub curves: Vec<Curve>,
    /// Marker abscissas placed on the horizontal axis.
    pub markers: Vec<(Shape, Vec<f64>)>,
}

/// Data-to-pixel map of a figure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub y_min: f64,
    pub y_max: f64,
}

impl Frame {
    pub fn px(&self, x: f64) -> f64 {
        LEFT + (x + 1.0) / 2.0 * (WIDTH - LEFT - RIGHT)
    }

    pub fn py(&self, y: f64) -> f64 {
        TOP + (self.y_max - y) / (self.y_max - self.y_min) * (HEIGHT - TOP - BOTTOM)
    }

    pub fn data_x(&self, px: f64) -> f64 {
        (px - LEFT) / (WIDTH - LEFT - RIGHT) * 2.0 - 1.0
    }

    pub fn data_y(&self, py: f64) -> f64 {
        self.y_max - (py - TOP) / (HEIGHT - TOP - BOTTOM) * (self.y_max - self.y_min)
    }

    /// Height of the pixel rows at which markers sit: `y = 0` when visible,
    /// else the bottom edge.
    fn axis(&self) -> f64 {
        if self.y_min <= 0.0 && 0.0 <= self.y_max {
            self.py(0.0)
        } else {
            self.py(self.y_min)
        }
    }
}

/// Step of about five ticks: 1, 2 or 5 times a power of ten.
fn tick_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag)
}

impl Figure {
    pub fn frame(&self) -> Frame {
        let ys = self
            .curves
            .iter()
            .flat_map(|c| c.segments.iter().flatten())
            .map(|p| p.1)
            .filter(|y| y.is_finite());
        let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y), hi.max(y)));
        let (lo, hi) = if lo > hi {
            (0.0, 1.0)
        } else {
            (lo.min(0.0), hi.max(0.0))
        };
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 1.0 };
        Frame {
            y_min: lo - pad,
            y_max: hi + pad,
        }
    }

    pub fn render(&self) -> String {
        let f = self.frame();
        let mut s = String::new();
        let _ = self.write(&mut s, &f);
        s
    }

    fn write(&self, s: &mut String, f: &Frame) -> std::fmt::Result {
        let (x0, x1) = (f.px(-1.0), f.px(1.0));
        let (y0, y1) = (f.py(f.y_max), f.py(f.y_min));
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        )?;
        writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#)?;
        writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            c(WIDTH / 2.0),
            escape(&self.title)
        )?;
        writeln!(
            s,
            r#"<g class="plot" data-x-range="{} {}" data-y-range="{} {}">"#,
            real17(-1.0),
            real17(1.0),
            real17(f.y_min),
            real17(f.y_max)
        )?;
        writeln!(
            s,
            r#"<rect class="frame" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            c(x0),
            c(y0),
            c(x1 - x0),
            c(y1 - y0)
        )?;
        if f.y_min < 0.0 && 0.0 < f.y_max {
            let z = f.py(0.0);
            writeln!(
                s,
                r##"<line class="zero" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#888"/>"##,
                c(x0),
                c(z),
                c(x1),
                c(z)
            )?;
        }
        for k in 0..=4 {
            let t = -1.0 + 0.5 * k as f64;
            let x = f.px(t);
            writeln!(
                s,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/><text x="{}" y="{}" text-anchor="middle">{}</text>"#,
                c(x),
                c(y1),
                c(x),
                c(y1 + 5.0),
                c(x),
                c(y1 + 18.0),
                label(t)
            )?;
        }
        let step = tick_step(f.y_max - f.y_min);
        let mut k = (f.y_min / step).ceil() as i64;
        while (k as f64) * step <= f.y_max {
            let t = k as f64 * step;
            let y = f.py(t);
            writeln!(
                s,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/><text x="{}" y="{}" text-anchor="end">{}</text>"#,
                c(x0 - 5.0),
                c(y),
                c(x0),
                c(y),
                c(x0 - 8.0),
                c(y + 4.0),
                label(t)
            )?;
            k += 1;
        }
        writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">t</text>"#,
            c((x0 + x1) / 2.0),
            c(HEIGHT - 10.0)
        )?;
        writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            c((y0 + y1) / 2.0),
            c((y0 + y1) / 2.0),
            escape(&self.y_label)
        )?;
        for (i, curve) in self.curves.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            writeln!(
                s,
                r#"<g class="curve" data-label="{}" fill="none" stroke="{color}" stroke-width="1.5">"#,
                escape(&curve.label)
            )?;
            for seg in curve.segments.iter().filter(|seg| !seg.is_empty()) {
                let pts: Vec<String> = seg
                    .iter()
                    .map(|&(x, y)| format!("{},{}", c(f.px(x)), c(f.py(y))))
                    .collect();
                writeln!(s, r#"<polyline points="{}"/>"#, pts.join(" "))?;
            }
            writeln!(s, "</g>")?;
            let ly = y0 + 16.0 + 16.0 * i as f64;
            writeln!(
                s,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="1.5"/><text x="{}" y="{}">{}</text>"#,
                c(x0 + 10.0),
                c(ly),
                c(x0 + 30.0),
                c(ly),
                c(x0 + 36.0),
                c(ly + 4.0),
                escape(&curve.label)
            )?;
        }
        let axis = f.axis();
        for (shape, xs) in &self.markers {
            writeln!(s, r#"<g class="{}" fill="white" stroke="black">"#, shape.class())?;
            for &x in xs {
                let px = f.px(x);
                match shape {
                    Shape::Circle => writeln!(s, r#"<circle cx="{}" cy="{}" r="{MARKER}"/>"#, c(px), c(axis))?,
                    Shape::Square => writeln!(
                        s,
                        r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#,
                        c(px - MARKER),
                        c(axis - MARKER),
                        c(2.0 * MARKER),
                        c(2.0 * MARKER)
                    )?,
                    Shape::Triangle => writeln!(
                        s,
                        r#"<polygon points="{},{} {},{} {},{}"/>"#,
                        c(px),
                        c(axis - MARKER - 1.0),
                        c(px - MARKER),
                        c(axis + MARKER - 1.0),
                        c(px + MARKER),
                        c(axis + MARKER - 1.0)
                    )?,
                }
            }
            writeln!(s, "</g>")?;
        }
        writeln!(s, "</g>")?;
        writeln!(s, "</svg>")
    }
}

/// Pixel coordinate with three decimals; never `-0.000`.
pub fn c(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn label(t: f64) -> String {
    let t = if t.abs() < 1e-12 { 0.0 } else { t };
    let s = format!("{t:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn figure() -> Figure {
        Figure {
            title: "a < b".into(),
            y_label: "y".into(),
            curves: vec![Curve::new("c", vec![(-1.0, 0.0), (0.0, 2.0), (1.0, 1.0)])],
            markers: vec![(Shape::Circle, vec![0.5]), (Shape::Triangle, vec![-0.5])],
        }
    }

    #[test]
    fn frame_round_trips() {
        let f = figure().frame();
        for v in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert!((f.data_x(f.px(v)) - v).abs() < 1e-12);
            assert!((f.data_y(f.py(v)) - v).abs() < 1e-12);
        }
        assert!(f.y_min < 0.0 && f.y_max > 2.0);
    }

    #[test]
    fn ticks_are_round() {
        assert_eq!(tick_step(1.0), 0.2);
        assert_eq!(tick_step(7.0), 2.0);
        assert_eq!(tick_step(0.03), 0.01);
        assert_eq!(label(0.30000000000000004), "0.3");
        assert_eq!(label(-1e-17), "0");
        assert_eq!(c(-0.0001), "0.000");
    }

    #[test]
    fn render_is_well_formed() {
        let svg = figure().render();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg.matches("<circle").count(), 1);
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg, figure().render());
    }

    #[test]
    fn empty_segments_are_skipped() {
        let mut fig = figure();
        fig.curves[0].segments.push(Vec::new());
        assert_eq!(fig.render().matches("<polyline").count(), 1);
    }
}
