use std::fmt;
use std::io::Write;

use super::quantity::Quantity;
use crate::fmt::real17;
use crate::Result;

/// One measured constant at one degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Constant {
    pub name: String,
    pub n: usize,
    pub value: f64,
}

/// The point at which a check is tightest: re-evaluating `quantity` at
/// `(n, x, aux)` gives `value`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub quantity: Quantity,
    pub n: usize,
    pub x: f64,
    /// Second coordinate where the quantity needs one (`t`, a node index, ...).
    pub aux: f64,
    pub value: f64,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at n={} x={} aux={} -> {}",
            self.quantity,
            self.n,
            real17(self.x),
            real17(self.aux),
            real17(self.value)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub constants: Vec<Constant>,
    pub witness: Option<Witness>,
    pub pass: bool,
    pub tolerance: String,
    /// Report-only checks never affect the exit status.
    pub gating: bool,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn constant(&self, name: &str, n: usize) -> Option<f64> {
        self.constants
            .iter()
            .find(|c| c.name == name && c.n == n)
            .map(|c| c.value)
    }

    pub fn failed_gate(&self) -> bool {
        self.gating && !self.pass
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "check: {}", self.name)?;
        writeln!(f, "  tolerance: {}", self.tolerance)?;
        for c in &self.constants {
            writeln!(f, "  n={:<3} {} = {}", c.n, c.name, real17(c.value))?;
        }
        match &self.witness {
            Some(w) => writeln!(f, "  witness: {w}")?,
            None => writeln!(f, "  witness: none")?,
        }
        for note in &self.notes {
            writeln!(f, "  note: {note}")?;
        }
        let verdict = match (self.pass, self.gating) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (report only)",
        };
        writeln!(f, "  result: {verdict}")
    }
}

pub fn write_reports_text<W: Write>(reports: &[CheckReport], mut out: W) -> Result<()> {
    for (k, r) in reports.iter().enumerate() {
        if k > 0 {
            writeln!(out)?;
        }
        write!(out, "{r}")?;
    }
    Ok(())
}

/// Columns `check,kind,n,name,value`; `kind` is `constant`, `witness` or `result`.
pub fn write_reports_csv<W: Write>(reports: &[CheckReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["check", "kind", "n", "name", "value"])?;
    for r in reports {
        for c in &r.constants {
            w.write_record([r.name.as_str(), "constant", &c.n.to_string(), &c.name, &real17(c.value)])?;
        }
        if let Some(wit) = &r.witness {
            w.write_record([
                r.name.as_str(),
                "witness",
                &wit.n.to_string(),
                &wit.quantity.to_string(),
                &real17(wit.value),
            ])?;
            w.write_record([r.name.as_str(), "witness", &wit.n.to_string(), "x", &real17(wit.x)])?;
            w.write_record([r.name.as_str(), "witness", &wit.n.to_string(), "aux", &real17(wit.aux)])?;
        }
        let verdict = if r.pass { "1" } else { "0" };
        w.write_record([
            r.name.as_str(),
            "result",
            "",
            if r.gating { "pass" } else { "pass-report-only" },
            verdict,
        ])?;
    }
    w.flush()?;
    Ok(())
}
