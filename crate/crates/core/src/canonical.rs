//! Canonical representations: positive quadratures of degree `2n - 1`
//! and index at most `2n + 1`.
//!
//! Every `x ∈ (-1, 1)` is a node of exactly one of them, `Σ_x`:
//! the Gaussian rule (`a = 0`), the Lobatto rule (`a = ±∞`), or the rule on
//! the roots `ξ_i(a)` of `P_a` together with `-1` (`a > 0`) or `1` (`a < 0`).

use std::io::Write;
use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::fmt::real17;
use crate::orthopoly::{OrthoPair, RecurrenceTable, Which};
use crate::weightfn::{compensated_sum, DiscreteMeasure, Weight};
use crate::{Error, Result};

/// Identifies `Σ_x` by the index `r` of `x` among the interior nodes and
/// the pencil parameter `a ∈ [-∞, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalParam {
    pub r: usize,
    pub a: f64,
}

impl CanonicalParam {
    pub fn is_gaussian(&self) -> bool {
        self.a == 0.0
    }

    pub fn is_lobatto(&self) -> bool {
        self.a.is_infinite()
    }

    /// `(sgn a, 1/|a|)`, finite for every `a` including `±∞`;
    /// the second entry is 0 when `a = 0`.
    pub fn encoded(&self) -> (i8, f64) {
        if self.a == 0.0 {
            (0, 0.0)
        } else {
            (if self.a > 0.0 { 1 } else { -1 }, 1.0 / self.a.abs())
        }
    }

    pub fn decode(r: usize, sign: i8, inverse: f64) -> Self {
        let a = match sign {
            0 => 0.0,
            s => f64::from(s) / inverse,
        };
        Self { r, a }
    }
}

/// A node of a canonical representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeEntry {
    pub position: f64,
    pub weight: f64,
    /// 1 at `±1`, 2 inside.
    pub index: u8,
}

impl NodeEntry {
    fn new(position: f64) -> Self {
        Self {
            position,
            weight: 0.0,
            index: if position == -1.0 || position == 1.0 { 1 } else { 2 },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalRep {
    pub n: usize,
    /// `None` for the principal representations built without reference to a point.
    pub param: Option<CanonicalParam>,
    pub nodes: Vec<NodeEntry>,
    /// Position in `nodes` of the point the representation was built for.
    pub anchor: Option<usize>,
}

impl CanonicalRep {
    pub fn positions(&self) -> Vec<f64> {
        self.nodes.iter().map(|e| e.position).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.nodes.iter().map(|e| e.weight).collect()
    }

    pub fn index_sum(&self) -> usize {
        self.nodes.iter().map(|e| usize::from(e.index)).sum()
    }

    pub fn degree_of_exactness(&self) -> usize {
        2 * self.n - 1
    }

    /// The anchored point `x`.
    pub fn x(&self) -> Option<f64> {
        self.anchor.map(|k| self.nodes[k].position)
    }

    /// `λ(x)`, the weight of the anchored point.
    pub fn lambda(&self) -> Option<f64> {
        self.anchor.map(|k| self.nodes[k].weight)
    }

    /// Interior positions other than the anchor.
    pub fn interior_positions(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().filter(|e| e.index == 2).map(|e| e.position)
    }

    /// Weight of the node at `u`, 0 if `u` is not a node.
    pub fn weight_at(&self, u: f64) -> f64 {
        self.nodes.iter().find(|e| e.position == u).map_or(0.0, |e| e.weight)
    }

    /// Writes a `# n=…,r=…,a_sign=…,a_inv=…` line, then `u,weight,index` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        match self.param {
            Some(p) => {
                let (s, inv) = p.encoded();
                writeln!(out, "# n={},r={},a_sign={s},a_inv={}", self.n, p.r, real17(inv))?;
            }
            None => writeln!(out, "# n={}", self.n)?,
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["u", "weight", "index"])?;
        for e in &self.nodes {
            w.write_record([real17(e.position), real17(e.weight), e.index.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Relative threshold on `|ψ(x)|` for classifying `x` as a Lobatto node.
pub const LOBATTO_BAND: f64 = 1e-9;
/// Relative threshold on `|φ(x)|` for classifying `x` as a Gaussian node.
pub const GAUSS_BAND: f64 = 1e-12;

/// Everything needed to build canonical representations of degree `2n - 1`
/// for one weight.
#[derive(Debug)]
pub struct CanonicalSystem {
    weight: Weight,
    n: usize,
    mass: f64,
    measure: DiscreteMeasure,
    pair: OrthoPair,
    gauss: CanonicalRep,
    lobatto: CanonicalRep,
    /// `η_0 = -1 < η_1 < … < η_n = 1`.
    eta: Vec<f64>,
    extended: OnceLock<std::result::Result<RecurrenceTable, Error>>,
}

impl CanonicalSystem {
    pub fn new(weight: Weight, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Misuse("degree n must be at least 1".into()));
        }
        let pair = OrthoPair::compute(&weight, n)?;
        let measure = weight.discretize(4 * n + 8);
        let mass = weight.total_mass()?;

        let xi0 = tridiagonal_eigen(&pair.plain, n)?;
        let xi0: Vec<f64> = xi0.into_iter().map(|x| polish(x, |t| pair.phi(t))).collect();
        let gauss_weights = {
            let m = jacobi_matrix(&pair.plain, n);
            let eig = SymmetricEigen::try_new(m, f64::EPSILON, 0)
                .ok_or_else(|| Error::Eigen("symmetric QR did not converge".into()))?;
            let mut pairs: Vec<(f64, f64)> = eig
                .eigenvalues
                .iter()
                .enumerate()
                .map(|(j, &v)| (v, eig.eigenvectors[(0, j)].powi(2) * pair.plain.beta[0]))
                .collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            pairs.into_iter().map(|p| p.1).collect::<Vec<_>>()
        };
        let gauss = CanonicalRep {
            n,
            param: None,
            nodes: xi0
                .iter()
                .zip(&gauss_weights)
                .map(|(&position, &weight)| NodeEntry {
                    position,
                    weight,
                    index: 2,
                })
                .collect(),
            anchor: None,
        };

        let interior = if n > 1 {
            tridiagonal_eigen(&pair.modified, n - 1)?
                .into_iter()
                .map(|x| polish(x, |t| pair.psi(t)))
                .collect()
        } else {
            Vec::new()
        };
        let mut eta = vec![-1.0];
        eta.extend(&interior);
        eta.push(1.0);

        let mut system = Self {
            weight,
            n,
            mass,
            measure,
            pair,
            gauss,
            lobatto: CanonicalRep {
                n,
                param: None,
                nodes: Vec::new(),
                anchor: None,
            },
            eta,
            extended: OnceLock::new(),
        };
        let mut lob: Vec<NodeEntry> = system.eta.iter().map(|&u| NodeEntry::new(u)).collect();
        system.hermite_weights(&mut lob)?;
        system.lobatto.nodes = lob;
        check_interlacing(&system.gauss.positions(), &system.eta)?;
        Ok(system)
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn pair(&self) -> &OrthoPair {
        &self.pair
    }

    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    /// Lower principal representation, nodes `ξ_i(0)`.
    pub fn gaussian_rep(&self) -> &CanonicalRep {
        &self.gauss
    }

    /// Upper principal representation, nodes `η_0, …, η_n`.
    pub fn lobatto_rep(&self) -> &CanonicalRep {
        &self.lobatto
    }

    /// `ξ_1(0) < … < ξ_n(0)`.
    pub fn gaussian_nodes(&self) -> Vec<f64> {
        self.gauss.positions()
    }

    /// `η_0, …, η_n` including the endpoints.
    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    /// `∫ f w`, exact for polynomials of degree up to `4n + 8`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.measure.integrate(f)
    }

    /// The root of `P_a` in `(η_{i-1}, η_i)`, for `1 <= i <= n` and finite `a`.
    pub fn xi_of_a(&self, i: usize, a: f64) -> Result<f64> {
        if i == 0 || i > self.n {
            return Err(Error::Domain {
                what: "node index i",
                value: i as f64,
                domain: "1..=n",
            });
        }
        if !a.is_finite() {
            return Err(Error::Misuse(
                "xi_of_a needs a finite a; infinite a selects a Lobatto node".into(),
            ));
        }
        let xi0 = self.gauss.nodes[i - 1].position;
        if a == 0.0 {
            return Ok(xi0);
        }
        let (lo, hi) = (self.eta[i - 1], self.eta[i]);
        let tight = if a > 0.0 { (xi0, hi) } else { (lo, xi0) };
        let f = |t: f64| {
            let p = self.pair.p_unchecked(a, t);
            let phi = self.pair.phi(t).value;
            let scale = phi.abs() + (p.value - phi).abs();
            (p.value, p.derivative, scale)
        };
        if let Some(x) = safeguarded_newton(&f, tight.0, tight.1) {
            return Ok(x);
        }
        safeguarded_newton(&f, lo, hi).ok_or(Error::NotBracketed { index: i, a, lo, hi })
    }

    fn local_max<F: Fn(f64) -> f64>(&self, x: f64, f: F) -> f64 {
        let nf = self.n as f64;
        let delta = (1.0 - x * x).sqrt().max(1.0 / nf) / nf;
        (0..=8)
            .map(|k| (x - delta + 2.0 * delta * k as f64 / 8.0).clamp(-1.0, 1.0))
            .map(|t| f(t).abs())
            .fold(0.0, f64::max)
    }

    /// The parameter `(r, a)` of `Σ_x` for `x ∈ (-1, 1)`.
    pub fn param_of_x(&self, x: f64) -> Result<CanonicalParam> {
        if !(x > -1.0 && x < 1.0) {
            return Err(Error::Domain {
                what: "x",
                value: x,
                domain: "(-1, 1)",
            });
        }
        let psi = self.pair.psi(x).value;
        if self.n > 1 {
            let scale = self.local_max(x, |t| self.pair.psi(t).value);
            if psi.abs() <= LOBATTO_BAND * scale {
                let r = nearest(&self.eta[1..self.n], x) + 1;
                return Ok(CanonicalParam { r, a: f64::INFINITY });
            }
        }
        let phi = self.pair.phi(x).value;
        let scale = self.local_max(x, |t| self.pair.phi(t).value);
        if phi.abs() <= GAUSS_BAND * scale {
            let r = nearest(&self.gaussian_nodes(), x) + 1;
            return Ok(CanonicalParam { r, a: 0.0 });
        }
        let r = 1 + self.eta[1..self.n].iter().filter(|&&e| e < x).count();
        let a_plus = phi / ((1.0 - x) * psi);
        let a_minus = phi / ((1.0 + x) * psi);
        match (a_plus > 0.0, a_minus < 0.0) {
            (true, false) => Ok(CanonicalParam { r, a: a_plus }),
            (false, true) => Ok(CanonicalParam { r, a: a_minus }),
            _ => Err(Error::Classification { x, a_plus, a_minus }),
        }
    }

    /// `Σ_x` with `x` as an exact node, anchored at `x`.
    pub fn rep_of_x(&self, x: f64) -> Result<CanonicalRep> {
        let param = self.param_of_x(x)?;
        let r = param.r;
        let mut nodes: Vec<NodeEntry>;
        let anchor;
        if param.is_lobatto() {
            nodes = self.lobatto.nodes.clone();
            anchor = r;
        } else if param.is_gaussian() {
            nodes = self.gauss.nodes.clone();
            anchor = r - 1;
        } else {
            let mut interior = Vec::with_capacity(self.n);
            for i in 1..=self.n {
                interior.push(if i == r { x } else { self.xi_of_a(i, param.a)? });
            }
            nodes = Vec::with_capacity(self.n + 1);
            if param.a > 0.0 {
                nodes.push(NodeEntry::new(-1.0));
            }
            nodes.extend(interior.into_iter().map(NodeEntry::new));
            if param.a < 0.0 {
                nodes.push(NodeEntry::new(1.0));
            }
            anchor = if param.a > 0.0 { r } else { r - 1 };
        }
        nodes[anchor].position = x;
        let positions: Vec<f64> = nodes.iter().map(|e| e.position).collect();
        if positions.windows(2).any(|p| !(p[0] < p[1])) {
            return Err(Error::Inconsistency(format!(
                "nodes of the representation for x = {x} are not strictly increasing"
            )));
        }
        self.hermite_weights(&mut nodes)?;
        Ok(CanonicalRep {
            n: self.n,
            param: Some(param),
            nodes,
            anchor: Some(anchor),
        })
    }

    /// Fills in the weight of every node: `∫ ℓ_u w` with `ℓ_u` the
    /// nonnegative Hermite basis polynomial of `u` (1 at `u`, 0 at the other
    /// nodes, flat at the other interior nodes). With a single endpoint node,
    /// its weight is the mass left over by the interior weights.
    pub fn hermite_weights(&self, nodes: &mut [NodeEntry]) -> Result<()> {
        let interior: Vec<f64> = nodes.iter().filter(|e| e.index == 2).map(|e| e.position).collect();
        let has_lo = nodes.iter().any(|e| e.position == -1.0);
        let has_hi = nodes.iter().any(|e| e.position == 1.0);
        for e in nodes.iter_mut().filter(|e| e.index == 2) {
            let u = e.position;
            e.weight = self.integrate(|t| {
                let mut q = 1.0;
                for &v in &interior {
                    if v != u {
                        let f = (t - v) / (u - v);
                        q *= f * f;
                    }
                }
                if has_lo {
                    q *= (t + 1.0) / (u + 1.0);
                }
                if has_hi {
                    q *= (1.0 - t) / (1.0 - u);
                }
                q
            });
        }
        let interior_mass = compensated_sum(nodes.iter().filter(|e| e.index == 2).map(|e| e.weight));
        let endpoint_basis = |end: f64| {
            let interior = &interior;
            move |t: f64| {
                let mut q = 0.5 * (1.0 + end * t);
                for &v in interior {
                    let f = (t - v) / (end - v);
                    q *= f * f;
                }
                q
            }
        };
        for e in nodes.iter_mut().filter(|e| e.index == 1) {
            e.weight = if has_lo && has_hi {
                self.integrate(endpoint_basis(e.position))
            } else {
                self.mass - interior_mass
            };
        }
        if let Some(bad) = nodes.iter().find(|e| !(e.weight > 0.0)) {
            return Err(Error::Degeneracy {
                position: bad.position,
                weight: bad.weight,
            });
        }
        Ok(())
    }

    fn extended_table(&self) -> Result<&RecurrenceTable> {
        self.extended
            .get_or_init(|| RecurrenceTable::compute(&self.weight, 2 * self.n - 1, Which::Plain))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `max_k |Σ w_i φ_k(t_i) - ∫ φ_k w| / √mass` over orthonormal
    /// `φ_k`, `k <= 2n - 1`.
    pub fn exactness_residual(&self, rep: &CanonicalRep) -> Result<f64> {
        let table = self.extended_table()?;
        let k_max = 2 * self.n - 1;
        let root_mass = table.beta[0].sqrt();
        let mut sums = vec![crate::weightfn::CompensatedSum::default(); k_max + 1];
        for e in &rep.nodes {
            for (s, v) in sums.iter_mut().zip(table.eval_all(k_max, e.position)) {
                s.add(e.weight * v);
            }
        }
        Ok(sums
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let exact = if k == 0 { root_mass } else { 0.0 };
                (s.value() - exact).abs() / root_mass
            })
            .fold(0.0, f64::max))
    }
}

fn nearest(nodes: &[f64], x: f64) -> usize {
    nodes
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - x).abs().total_cmp(&(b.1 - x).abs()))
        .map_or(0, |p| p.0)
}

fn jacobi_matrix(table: &RecurrenceTable, size: usize) -> DMatrix<f64> {
    DMatrix::from_fn(size, size, |i, j| {
        if i == j {
            table.alpha[i]
        } else if i + 1 == j {
            table.beta[j].sqrt()
        } else if j + 1 == i {
            table.beta[i].sqrt()
        } else {
            0.0
        }
    })
}

/// Sorted eigenvalues of the leading `size × size` Jacobi matrix.
fn tridiagonal_eigen(table: &RecurrenceTable, size: usize) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::try_new(jacobi_matrix(table, size), f64::EPSILON, 0)
        .ok_or_else(|| Error::Eigen("symmetric QR did not converge".into()))?;
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// One Newton step on a simple root, kept only if it is tiny and improves the residual.
fn polish<F: Fn(f64) -> crate::orthopoly::PolyEval>(x: f64, f: F) -> f64 {
    let p = f(x);
    if p.derivative == 0.0 {
        return x;
    }
    let y = x - p.value / p.derivative;
    if (y - x).abs() < 1e-8 && f(y).value.abs() <= p.value.abs() {
        y
    } else {
        x
    }
}

fn check_interlacing(xi: &[f64], eta: &[f64]) -> Result<()> {
    for (i, &x) in xi.iter().enumerate() {
        if !(eta[i] < x && x < eta[i + 1]) {
            return Err(Error::Inconsistency(format!(
                "Gaussian node {x} escapes ({}, {})",
                eta[i],
                eta[i + 1]
            )));
        }
    }
    Ok(())
}

/// Bisection-safeguarded Newton for a sign change on `[lo, hi]`.
/// `f` returns value, derivative and the magnitude of the cancelling terms.
fn safeguarded_newton<F: Fn(f64) -> (f64, f64, f64)>(f: &F, lo: f64, hi: f64) -> Option<f64> {
    let (mut a, mut b) = (lo, hi);
    let (fa, _, _) = f(a);
    let (fb, _, _) = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let neg_at_a = fa < 0.0;
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let (v, d, scale) = f(x);
        if v == 0.0 {
            return Some(x);
        }
        if (v < 0.0) == neg_at_a {
            a = x;
        } else {
            b = x;
        }
        let newton = x - v / d;
        let inside = d != 0.0 && newton >= a && newton <= b;
        if inside && v.abs() <= 1e-13 * scale {
            return Some(newton);
        }
        if b - a <= 1e-14 * x.abs().max(1.0) {
            return Some(x);
        }
        x = if inside && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
    }
    Some(x)
}
