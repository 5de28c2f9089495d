//! Figures built from profile samples and from a canonical system.

use std::fmt;
use std::str::FromStr;

use cms_core::canonical::CanonicalSystem;
use cms_core::extremal::{build_qx, grid_points, ExtremalSample};
use cms_core::{Error, Result};

use crate::svg::{Curve, Figure, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    PiFamily,
    Lambda,
    PiPrimeMinusW,
    PhiPsi,
    Qx,
}

pub const PLOT_NAMES: [&str; 5] = ["pi-family", "lambda", "pi-prime-minus-w", "phi-psi", "qx"];
const KINDS: [PlotKind; 5] = [
    PlotKind::PiFamily,
    PlotKind::Lambda,
    PlotKind::PiPrimeMinusW,
    PlotKind::PhiPsi,
    PlotKind::Qx,
];

impl PlotKind {
    pub fn all() -> &'static [PlotKind] {
        &KINDS
    }

    pub fn name(&self) -> &'static str {
        PLOT_NAMES[KINDS.iter().position(|k| k == self).expect("every kind is listed")]
    }

    /// Whether the figure shows profile samples (and so can come from a CSV).
    pub fn uses_profile(&self) -> bool {
        matches!(self, PlotKind::PiFamily | PlotKind::Lambda | PlotKind::PiPrimeMinusW)
    }
}

impl fmt::Display for PlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlotKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = if s == "q_x" { "qx" } else { s };
        PLOT_NAMES
            .iter()
            .position(|&name| name == s)
            .map(|k| KINDS[k])
            .ok_or_else(|| Error::Misuse(format!("unknown plot '{s}'; known: {}", PLOT_NAMES.join(", "))))
    }
}

fn node_markers(system: &CanonicalSystem) -> Vec<(Shape, Vec<f64>)> {
    vec![
        (Shape::Circle, system.gaussian_nodes()),
        (Shape::Square, system.eta().to_vec()),
    ]
}

fn title(kind: &str, system: &CanonicalSystem, extra: &str) -> String {
    format!("{kind}, n = {}{extra}", system.n())
}

/// `π`, `∫_{-1}^x w` and `π̲` from top to bottom.
pub fn pi_family(system: &CanonicalSystem, samples: &[ExtremalSample]) -> Result<Figure> {
    let weight = system.weight();
    let integral = samples
        .iter()
        .map(|s| Ok((s.x, weight.cumulative(s.x)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Figure {
        title: title("pi, integral of w, lower pi", system, ""),
        y_label: "mass".into(),
        curves: vec![
            Curve::new("pi", samples.iter().map(|s| (s.x, s.pi)).collect()),
            Curve::new("integral of w", integral),
            Curve::new("lower pi", samples.iter().map(|s| (s.x, s.pi_lower)).collect()),
        ],
        markers: node_markers(system),
    })
}

pub fn lambda(system: &CanonicalSystem, samples: &[ExtremalSample]) -> Figure {
    Figure {
        title: title("lambda", system, ""),
        y_label: "lambda".into(),
        curves: vec![Curve::new("lambda", samples.iter().map(|s| (s.x, s.lambda)).collect())],
        markers: node_markers(system),
    }
}

/// `π' - w`, broken at samples without `π'` and across jumps of `w`.
pub fn pi_prime_minus_w(system: &CanonicalSystem, samples: &[ExtremalSample]) -> Figure {
    let jumps: Vec<f64> = system.weight().jumps().iter().map(|j| j.at).collect();
    let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
    let mut last_x: Option<f64> = None;
    for s in samples {
        let Some(pp) = s.pi_prime else {
            segments.push(Vec::new());
            last_x = None;
            continue;
        };
        if let Some(lx) = last_x {
            if jumps.iter().any(|&j| lx < j && j <= s.x) {
                segments.push(Vec::new());
            }
        }
        segments.last_mut().expect("never empty").push((s.x, pp - s.w));
        last_x = Some(s.x);
    }
    segments.retain(|seg| !seg.is_empty());
    Figure {
        title: title("pi' - w", system, ""),
        y_label: "pi' - w".into(),
        curves: vec![Curve {
            label: "pi' - w".into(),
            segments,
        }],
        markers: node_markers(system),
    }
}

pub fn phi_psi(system: &CanonicalSystem, grid: usize) -> Figure {
    let xs = grid_points(grid);
    let pair = system.pair();
    Figure {
        title: title("phi and psi", system, ""),
        y_label: "value".into(),
        curves: vec![
            Curve::new("phi", xs.iter().map(|&x| (x, pair.phi(x).value)).collect()),
            Curve::new("psi", xs.iter().map(|&x| (x, pair.psi(x).value)).collect()),
        ],
        markers: node_markers(system),
    }
}

/// `q_{x0}` with the nodes of `Σ_{x0}` as triangles.
pub fn qx(system: &CanonicalSystem, grid: usize, x0: f64) -> Result<Figure> {
    if !(x0 > -1.0 && x0 < 1.0) {
        return Err(Error::Domain {
            what: "x0",
            value: x0,
            domain: "(-1, 1)",
        });
    }
    let rep = system.rep_of_x(x0)?;
    let q = build_qx(system, &rep)?;
    let mut xs = vec![-1.0];
    xs.extend(grid_points(grid));
    xs.push(1.0);
    let mut markers = node_markers(system);
    markers.push((Shape::Triangle, rep.positions()));
    Ok(Figure {
        title: title("q_x", system, &format!(", x = {x0}")),
        y_label: "q_x".into(),
        curves: vec![Curve::new("q_x", xs.iter().map(|&t| (t, q.value(t))).collect())],
        markers,
    })
}
