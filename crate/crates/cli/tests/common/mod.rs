#![allow(dead_code)]

use std::path::{Path, PathBuf};

use cms_cli::{build_figure, Command, PlotKind, RunConfig};
use regex::Regex;

pub const GOLDEN_N: usize = 5;
pub const GOLDEN_GRID: usize = 400;
pub const GOLDEN_X0: f64 = 0.2;
/// Pixel tolerance of the golden comparison.
pub const PIXEL_TOL: f64 = 0.01;

/// `(file stem, weight, kind)` of every golden figure.
pub const FIGURES: [(&str, &str, PlotKind); 8] = [
    ("ramp-pi-family", "ramp", PlotKind::PiFamily),
    ("ramp-lambda", "ramp", PlotKind::Lambda),
    ("ramp-pi-prime-minus-w", "ramp", PlotKind::PiPrimeMinusW),
    ("ramp-phi-psi", "ramp", PlotKind::PhiPsi),
    ("ramp-qx", "ramp", PlotKind::Qx),
    ("step-pi-family", "step", PlotKind::PiFamily),
    ("step-pi-prime-minus-w", "step", PlotKind::PiPrimeMinusW),
    ("step-lambda", "step", PlotKind::Lambda),
];

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn weight_file(name: &str) -> String {
    workspace_root()
        .join("weights")
        .join(format!("{name}.json"))
        .display()
        .to_string()
}

pub fn golden_path(stem: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{stem}.svg"))
}

pub fn plot_config(weight: &str, kind: PlotKind, profile: Option<PathBuf>) -> RunConfig {
    RunConfig {
        weight: weight_file(weight),
        n: GOLDEN_N,
        grid: GOLDEN_GRID,
        out: None,
        command: Command::Plot {
            kind,
            x0: GOLDEN_X0,
            profile,
        },
    }
}

pub fn render(weight: &str, kind: PlotKind) -> String {
    build_figure(&plot_config(weight, kind, None)).unwrap().render()
}

/// Splits an SVG into its non-numeric skeleton and its numbers.
fn tokens(svg: &str) -> (String, Vec<f64>) {
    let re = Regex::new(r"-?\d+(\.\d+)?(e[-+]?\d+)?").unwrap();
    let skeleton = re.replace_all(svg, "#").into_owned();
    let numbers = re.find_iter(svg).map(|m| m.as_str().parse().unwrap()).collect();
    (skeleton, numbers)
}

/// Compares two SVGs after canonical rounding: identical structure, and
/// numbers equal to [`PIXEL_TOL`] (relative for the embedded data ranges).
pub fn same_svg(a: &str, b: &str) -> Result<(), String> {
    let (sa, na) = tokens(a);
    let (sb, nb) = tokens(b);
    if sa != sb {
        let line = sa.lines().zip(sb.lines()).position(|(x, y)| x != y).unwrap_or(0);
        return Err(format!("structure differs at line {}", line + 1));
    }
    if na.len() != nb.len() {
        return Err("number count differs".into());
    }
    for (k, (x, y)) in na.iter().zip(&nb).enumerate() {
        let tol = PIXEL_TOL.max(1e-9 * x.abs().max(y.abs()));
        if (x - y).abs() > tol {
            return Err(format!("number #{k} differs: {x} vs {y}"));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct PlotRange {
    pub y_min: f64,
    pub y_max: f64,
}

impl PlotRange {
    pub fn frame(&self) -> cms_cli::svg::Frame {
        cms_cli::svg::Frame {
            y_min: self.y_min,
            y_max: self.y_max,
        }
    }
}

pub fn plot_range(svg: &str) -> PlotRange {
    let re = Regex::new(r#"data-y-range="(\S+) (\S+)""#).unwrap();
    let c = re.captures(svg).expect("plot group");
    PlotRange {
        y_min: c[1].parse().unwrap(),
        y_max: c[2].parse().unwrap(),
    }
}

/// Data points of each curve, by label, one vector per polyline.
pub fn curves(svg: &str) -> Vec<(String, Vec<Vec<(f64, f64)>>)> {
    let frame = plot_range(svg).frame();
    let group = Regex::new(r#"(?s)<g class="curve" data-label="([^"]*)"[^>]*>(.*?)</g>"#).unwrap();
    let poly = Regex::new(r#"<polyline points="([^"]*)"/>"#).unwrap();
    group
        .captures_iter(svg)
        .map(|g| {
            let segs = poly
                .captures_iter(&g[2])
                .map(|p| {
                    p[1].split(' ')
                        .map(|xy| {
                            let (x, y) = xy.split_once(',').unwrap();
                            (frame.data_x(x.parse().unwrap()), frame.data_y(y.parse().unwrap()))
                        })
                        .collect()
                })
                .collect();
            (g[1].to_string(), segs)
        })
        .collect()
}

/// Data abscissas of the markers of one class (`gauss`, `lobatto`, `sigma`).
pub fn markers(svg: &str, class: &str) -> Vec<f64> {
    let frame = plot_range(svg).frame();
    let group = Regex::new(&format!(r#"(?s)<g class="{class}"[^>]*>(.*?)</g>"#)).unwrap();
    let Some(g) = group.captures(svg) else {
        return Vec::new();
    };
    let circle = Regex::new(r#"<circle cx="([^"]+)""#).unwrap();
    let rect = Regex::new(r#"<rect x="([^"]+)" y="[^"]+" width="([^"]+)""#).unwrap();
    let tri = Regex::new(r#"<polygon points="([^,]+),"#).unwrap();
    let mut xs: Vec<f64> = circle
        .captures_iter(&g[1])
        .map(|c| c[1].parse::<f64>().unwrap())
        .collect();
    xs.extend(
        rect.captures_iter(&g[1])
            .map(|c| c[1].parse::<f64>().unwrap() + c[2].parse::<f64>().unwrap() / 2.0),
    );
    xs.extend(tri.captures_iter(&g[1]).map(|c| c[1].parse::<f64>().unwrap()));
    xs.into_iter().map(|px| frame.data_x(px)).collect()
}

/// Data-space error of a coordinate written with three decimals, in `x` and in `y`.
pub fn coordinate_rounding(svg: &str) -> (f64, f64) {
    let frame = plot_range(svg).frame();
    let dx = (frame.data_x(1.0) - frame.data_x(0.0)).abs();
    let dy = (frame.data_y(0.0) - frame.data_y(1.0)).abs();
    (0.5e-3 * dx * (1.0 + 1e-6), 0.5e-3 * dy * (1.0 + 1e-6))
}
