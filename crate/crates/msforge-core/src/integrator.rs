//! Branch tracking of `w` along paths in the `z`-plane, path integrals of
//! monomial expressions, residues at punctures, and the immersion
//! `f = Re ∫ Φ`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::curve::{CurvePoint, Expr, Ext, Monomial, SuperellipticCurve};
use crate::error::{Error, Result};
use crate::quad::gl16;

/// Largest change of argument allowed for any factor `(z - r)` in a single
/// continuation step.
const MAX_STEP_ARG: f64 = 0.5;
const MAX_SPLIT_DEPTH: u32 = 40;

/// `z -> (a z + b) / (c z + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mobius {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Mobius {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    pub fn scale(k: Complex64) -> Self {
        Mobius {
            a: k,
            ..Mobius::identity()
        }
    }

    /// `z -> k / z`.
    pub fn inversion(k: Complex64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Mobius {
            a: zero,
            b: k,
            c: Complex64::new(1.0, 0.0),
            d: zero,
        }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn apply_ext(&self, z: Ext) -> Ext {
        match z {
            Ext::Infinity => {
                if self.c.norm() == 0.0 {
                    Ext::Infinity
                } else {
                    Ext::Finite(self.a / self.c)
                }
            }
            Ext::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm() == 0.0 {
                    Ext::Infinity
                } else {
                    Ext::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = self.c * z + self.d;
        (self.a * self.d - self.b * self.c) / (den * den)
    }

    /// `self ∘ other`.
    pub fn compose(&self, o: &Mobius) -> Mobius {
        Mobius {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// Coefficient-wise conjugate, so that `conj(M(z)) = M̄(conj z)`.
    pub fn conj(&self) -> Mobius {
        Mobius {
            a: self.a.conj(),
            b: self.b.conj(),
            c: self.c.conj(),
            d: self.d.conj(),
        }
    }
}

/// A parametrized arc `s in [0, 1] -> z(s)` in the `z`-plane.
#[derive(Debug, Clone, PartialEq)]
pub enum ZPath {
    Line {
        from: Complex64,
        to: Complex64,
    },
    /// `center + radius * exp(i (start + sweep s))`; `sweep` may exceed 2π.
    Arc {
        center: Complex64,
        radius: f64,
        start: f64,
        sweep: f64,
    },
    /// From `from` into `to` with `z = to + (from - to) (1 - s)^power`, used
    /// to run into an algebraic singularity at `to`.
    Graded {
        from: Complex64,
        to: Complex64,
        power: f64,
    },
    /// Image of another path under a Möbius map, optionally after conjugation.
    Mapped {
        inner: Box<ZPath>,
        map: Mobius,
        conj: bool,
    },
}

impl ZPath {
    pub fn line(from: Complex64, to: Complex64) -> Self {
        ZPath::Line { from, to }
    }

    pub fn circle(center: Complex64, radius: f64, start: f64, turns: f64) -> Self {
        ZPath::Arc {
            center,
            radius,
            start,
            sweep: 2.0 * PI * turns,
        }
    }

    /// Point and derivative `dz/ds`.
    pub fn at(&self, s: f64) -> (Complex64, Complex64) {
        match self {
            ZPath::Line { from, to } => (from + (to - from) * s, to - from),
            ZPath::Arc {
                center,
                radius,
                start,
                sweep,
            } => {
                let e = Complex64::from_polar(*radius, start + sweep * s);
                (center + e, e * Complex64::new(0.0, *sweep))
            }
            ZPath::Graded { from, to, power } => {
                let r = (1.0 - s).max(0.0);
                let z = to + (from - to) * r.powf(*power);
                (z, -(from - to) * *power * r.powf(power - 1.0))
            }
            ZPath::Mapped { inner, map, conj } => {
                let (z, dz) = inner.at(s);
                let (z, dz) = if *conj {
                    (z.conj(), dz.conj())
                } else {
                    (z, dz)
                };
                (map.apply(z), map.derivative(z) * dz)
            }
        }
    }

    pub fn start(&self) -> Complex64 {
        self.at(0.0).0
    }

    pub fn end(&self) -> Complex64 {
        self.at(1.0).0
    }

    pub fn mapped(self, map: Mobius, conj: bool) -> ZPath {
        ZPath::Mapped {
            inner: Box::new(self),
            map,
            conj,
        }
    }

    pub fn reversed(&self) -> ZPath {
        match self {
            ZPath::Line { from, to } => ZPath::Line {
                from: *to,
                to: *from,
            },
            ZPath::Arc {
                center,
                radius,
                start,
                sweep,
            } => ZPath::Arc {
                center: *center,
                radius: *radius,
                start: start + sweep,
                sweep: -sweep,
            },
            ZPath::Graded { .. } => {
                panic!("graded paths end on a singular point and cannot be reversed")
            }
            ZPath::Mapped { inner, map, conj } => ZPath::Mapped {
                inner: Box::new(inner.reversed()),
                map: *map,
                conj: *conj,
            },
        }
    }
}

/// A chain of `z`-paths with the branch of `w` fixed at the start.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub pieces: Vec<ZPath>,
    pub start_w: Complex64,
}

impl Path {
    pub fn new(pieces: Vec<ZPath>, start_w: Complex64) -> Self {
        Path { pieces, start_w }
    }

    pub fn start_z(&self) -> Complex64 {
        self.pieces
            .first()
            .map_or(Complex64::new(0.0, 0.0), |p| p.start())
    }

    pub fn end_z(&self) -> Complex64 {
        self.pieces
            .last()
            .map_or(Complex64::new(0.0, 0.0), |p| p.end())
    }

    /// Image under `(z, w) -> (M(z*), lambda * (w*)^p)` where `*` is complex
    /// conjugation when `conj` is set.
    pub fn mapped(&self, map: Mobius, conj: bool, w_coeff: Complex64, w_pow: i32) -> Path {
        let w = if conj {
            self.start_w.conj()
        } else {
            self.start_w
        };
        Path {
            pieces: self
                .pieces
                .iter()
                .map(|p| p.clone().mapped(map, conj))
                .collect(),
            start_w: w_coeff * w.powi(w_pow),
        }
    }

    /// Loop based at `base`: out to `center` along a straight spoke, `turns`
    /// times around it at `radius` (negative turns run clockwise), and back.
    pub fn lollipop(base: Complex64, center: Complex64, radius: f64, turns: f64) -> Vec<ZPath> {
        let dir = (base - center) / (base - center).norm();
        let touch = center + dir * radius;
        vec![
            ZPath::line(base, touch),
            ZPath::circle(center, radius, dir.arg(), turns),
            ZPath::line(touch, base),
        ]
    }
}

/// Continue `w` from `(z0, w0)` to `z1`, assuming the straight chord stays
/// well away from every root. Fails if any factor turns too far.
fn step_w(
    curve: &SuperellipticCurve,
    z0: Complex64,
    w0: Complex64,
    z1: Complex64,
) -> Option<Complex64> {
    let n = curve.sheets() as f64;
    let mut log = Complex64::new(0.0, 0.0);
    for f in curve.factors() {
        let ratio = (z1 - f.root) / (z0 - f.root);
        if ratio.norm() == 0.0 || !ratio.re.is_finite() {
            return None;
        }
        let l = ratio.ln();
        if l.im.abs() > MAX_STEP_ARG || l.re.abs() > 2.0 {
            return None;
        }
        log += l * f.exp as f64;
    }
    let w = w0 * (log / n).exp();
    Some(curve.polish_w(z1, w))
}

fn advance(
    curve: &SuperellipticCurve,
    path: &ZPath,
    s0: f64,
    z0: Complex64,
    w0: Complex64,
    s1: f64,
    depth: u32,
) -> Result<Complex64> {
    let (z1, _) = path.at(s1);
    if let Some(w) = step_w(curve, z0, w0, z1) {
        return Ok(w);
    }
    if depth >= MAX_SPLIT_DEPTH {
        return Err(Error::Branch(format!(
            "cannot continue w from z = {z0} to {z1}"
        )));
    }
    let sm = 0.5 * (s0 + s1);
    let (zm, _) = path.at(sm);
    let wm = advance(curve, path, s0, z0, w0, sm, depth + 1)?;
    advance(curve, path, sm, zm, wm, s1, depth + 1)
}

/// Continue `w` along a whole path segment.
pub fn continue_w(
    curve: &SuperellipticCurve,
    path: &ZPath,
    start_w: Complex64,
) -> Result<Complex64> {
    let steps = 64;
    let (mut z, _) = path.at(0.0);
    let mut w = start_w;
    for k in 1..=steps {
        let s = k as f64 / steps as f64;
        w = advance(curve, path, (k - 1) as f64 / steps as f64, z, w, s, 0)?;
        z = path.at(s).0;
    }
    Ok(w)
}

/// Continue `w` along every piece of a chain.
pub fn continue_path(curve: &SuperellipticCurve, path: &Path) -> Result<Complex64> {
    let mut w = path.start_w;
    for p in &path.pieces {
        w = continue_w(curve, p, w)?;
    }
    Ok(w)
}

/// Options for path integration.
#[derive(Debug, Clone, Copy)]
pub struct IntegrationOptions {
    pub tol: f64,
    pub min_panels: usize,
    pub max_panels: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            tol: 1e-13,
            min_panels: 8,
            max_panels: 8192,
        }
    }
}

/// Composite 16-point Gauss-Legendre over `panels` equal panels. Returns
/// the integrals and `w` at the last node.
fn gl_pass(
    curve: &SuperellipticCurve,
    exprs: &[Expr],
    path: &ZPath,
    start_w: Complex64,
    panels: usize,
) -> Result<(Vec<Complex64>, Complex64, f64)> {
    let (x, wt) = gl16();
    let mut acc = vec![Complex64::new(0.0, 0.0); exprs.len()];
    let (mut z_prev, _) = path.at(0.0);
    let mut s_prev = 0.0;
    let mut w = start_w;
    let h = 1.0 / panels as f64;
    for p in 0..panels {
        let a = p as f64 * h;
        for (xi, wi) in x.iter().zip(wt) {
            let s = a + xi * h;
            w = advance(curve, path, s_prev, z_prev, w, s, 0)?;
            let (z, dz) = path.at(s);
            for (k, e) in exprs.iter().enumerate() {
                acc[k] += e.eval(z, w) * dz * (wi * h);
            }
            z_prev = z;
            s_prev = s;
        }
    }
    Ok((acc, w, s_prev))
}

/// Integrate several differentials along one path piece. Returns the
/// integrals and `w` continued to the end of the piece (`None` when the
/// piece ends on a special value).
pub fn integrate_piece(
    curve: &SuperellipticCurve,
    exprs: &[Expr],
    path: &ZPath,
    start_w: Complex64,
    opts: &IntegrationOptions,
) -> Result<(Vec<Complex64>, Option<Complex64>)> {
    for e in exprs {
        if !e.is_differential() && !e.terms.is_empty() {
            return Err(Error::Invalid("path integrals need differentials".into()));
        }
    }
    let mut panels = opts.min_panels.max(1);
    let (mut prev, _, _) = gl_pass(curve, exprs, path, start_w, panels)?;
    let (w_last, s_last) = loop {
        panels *= 2;
        let (cur, w, s) = gl_pass(curve, exprs, path, start_w, panels)?;
        let diff = cur
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let size = cur.iter().map(|a| a.norm()).fold(0.0, f64::max);
        prev = cur;
        if diff <= opts.tol * (1.0 + size) {
            break (w, s);
        }
        if panels >= opts.max_panels {
            return Err(Error::NoConvergence(format!(
                "path integral did not settle, last change {diff:.3e}"
            )));
        }
    };
    let end = path.end();
    let ends_special = curve
        .factors()
        .iter()
        .any(|f| (f.root - end).norm() < 1e-14 * (1.0 + end.norm()));
    let w_end = if ends_special {
        None
    } else {
        let z_last = path.at(s_last).0;
        Some(advance(curve, path, s_last, z_last, w_last, 1.0, 0)?)
    };
    Ok((prev, w_end))
}

/// Integrate differentials along a chain.
pub fn integrate_many(
    curve: &SuperellipticCurve,
    exprs: &[Expr],
    path: &Path,
    opts: &IntegrationOptions,
) -> Result<(Vec<Complex64>, Option<Complex64>)> {
    let mut total = vec![Complex64::new(0.0, 0.0); exprs.len()];
    let mut w = Some(path.start_w);
    for (i, p) in path.pieces.iter().enumerate() {
        let w0 =
            w.ok_or_else(|| Error::Invalid(format!("piece {i} starts on a singular point")))?;
        let (vals, w_end) = integrate_piece(curve, exprs, p, w0, opts)?;
        for (t, v) in total.iter_mut().zip(vals) {
            *t += v;
        }
        w = w_end;
    }
    Ok((total, w))
}

/// `∫_path expr`.
pub fn integrate_over(curve: &SuperellipticCurve, expr: &Expr, path: &Path) -> Result<Complex64> {
    Ok(integrate_many(
        curve,
        std::slice::from_ref(expr),
        path,
        &IntegrationOptions::default(),
    )?
    .0[0])
}

/// Reject paths that pass closer than `clearance` to a finite special value,
/// checked on a dense sample of each piece.
pub fn check_clearance(curve: &SuperellipticCurve, path: &Path, clearance: f64) -> Result<()> {
    for piece in &path.pieces {
        if matches!(piece, ZPath::Graded { .. }) {
            continue;
        }
        for k in 0..=256 {
            let z = piece.at(k as f64 / 256.0).0;
            for f in curve.factors() {
                if (z - f.root).norm() < clearance {
                    return Err(Error::Clearance {
                        point: format!("{}", f.root),
                        clearance,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Default clearance: `1e-3` times the smallest distance between special values.
pub fn default_clearance(curve: &SuperellipticCurve) -> f64 {
    1e-3 * curve.min_special_distance()
}

/// Weierstrass data `(g, eta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassData {
    pub g: Expr,
    pub eta: Expr,
}

impl WeierstrassData {
    pub fn g_eta(&self) -> Result<Expr> {
        self.g.mul(&self.eta)
    }

    pub fn g2_eta(&self) -> Result<Expr> {
        self.g.mul(&self.g)?.mul(&self.eta)
    }

    pub fn g_at(&self, z: Complex64, w: Complex64) -> Complex64 {
        self.g.eval(z, w)
    }

    pub fn eta_at(&self, z: Complex64, w: Complex64) -> Complex64 {
        self.eta.eval(z, w)
    }
}

/// `Φ = ((1 - g²) η, i (1 + g²) η, 2 g η)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiTriple(pub [Expr; 3]);

pub fn phi_from_data(data: &WeierstrassData) -> Result<PhiTriple> {
    let i = Complex64::new(0.0, 1.0);
    let g2eta = data.g2_eta()?;
    let phi1 = data.eta.add(&g2eta.scale(Complex64::new(-1.0, 0.0)));
    let phi2 = data.eta.add(&g2eta).scale(i);
    let phi3 = data.g_eta()?.scale(Complex64::new(2.0, 0.0));
    Ok(PhiTriple([phi1, phi2, phi3]))
}

impl PhiTriple {
    pub fn eval(&self, z: Complex64, w: Complex64) -> [Complex64; 3] {
        [
            self.0[0].eval(z, w),
            self.0[1].eval(z, w),
            self.0[2].eval(z, w),
        ]
    }
}

/// Residue of a differential at a point of the curve, by the trapezoid rule
/// (64 nodes per turn) on a loop that closes on the curve.
pub fn residue_at(curve: &SuperellipticCurve, expr: &Expr, p: &CurvePoint) -> Result<Complex64> {
    Ok(residues_at(curve, std::slice::from_ref(expr), p, None)?[0])
}

/// Radius used around `p`: half the distance to the nearest other special value.
pub fn residue_radius(curve: &SuperellipticCurve, p: &CurvePoint) -> f64 {
    let roots: Vec<Complex64> = curve.factors().iter().map(|f| f.root).collect();
    match p.z {
        Ext::Finite(z0) => {
            let d = roots
                .iter()
                .map(|r| (r - z0).norm())
                .filter(|&d| d > 1e-12)
                .fold(f64::INFINITY, f64::min);
            if d.is_finite() {
                0.5 * d
            } else {
                0.5
            }
        }
        Ext::Infinity => {
            let r = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
            2.0 * r.max(1.0)
        }
    }
}

/// Residues of several differentials at one point. `radius` defaults to
/// [`residue_radius`].
pub fn residues_at(
    curve: &SuperellipticCurve,
    exprs: &[Expr],
    p: &CurvePoint,
    radius: Option<f64>,
) -> Result<Vec<Complex64>> {
    let rho = radius.unwrap_or_else(|| residue_radius(curve, p));
    let m = curve.multiplicity(p);
    // pick the start value of w from the local expansion of w itself
    let w_expr = Expr::from(Monomial::real(1.0).w(1));
    let series = curve.puncture_series(&w_expr, p, 12)?;
    let (z_start, t) = match p.z {
        Ext::Finite(z0) => (z0 + rho, rho.powf(1.0 / m as f64)),
        Ext::Infinity => (Complex64::new(rho, 0.0), rho.powf(-1.0 / m as f64)),
    };
    let mut guess = Complex64::new(0.0, 0.0);
    for (k, c) in series.coeffs.iter().enumerate() {
        guess += c * t.powi((series.val + k as i64) as i32);
    }
    let candidates = curve.w_values(z_start);
    let start_w = *candidates
        .iter()
        .min_by(|a, b| (*a - guess).norm().total_cmp(&(*b - guess).norm()))
        .expect("sheets");
    let nodes = 64 * m as usize;
    let sign = if p.z == Ext::Infinity { -1.0 } else { 1.0 };
    let center = match p.z {
        Ext::Finite(z0) => z0,
        Ext::Infinity => Complex64::new(0.0, 0.0),
    };
    let path = ZPath::Arc {
        center,
        radius: rho,
        start: 0.0,
        sweep: sign * 2.0 * PI * m as f64,
    };
    let mut acc = vec![Complex64::new(0.0, 0.0); exprs.len()];
    let mut w = start_w;
    let mut z_prev = z_start;
    for k in 0..nodes {
        let s = k as f64 / nodes as f64;
        if k > 0 {
            w = advance(curve, &path, (k - 1) as f64 / nodes as f64, z_prev, w, s, 0)?;
        }
        let (z, dz) = path.at(s);
        for (i, e) in exprs.iter().enumerate() {
            acc[i] += e.eval(z, w) * dz;
        }
        z_prev = z;
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    Ok(acc
        .into_iter()
        .map(|a| a / nodes as f64 / two_pi_i)
        .collect())
}

/// Residuals of both period conditions on one cycle.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CycleResidual {
    pub name: String,
    pub eta: [f64; 2],
    pub g2_eta: [f64; 2],
    pub g_eta: [f64; 2],
    /// `|∮η - conj ∮g²η|`
    pub period1: f64,
    /// `|Re ∮gη|`
    pub period2: f64,
    /// `Re ∮Φ`
    pub re_phi: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ResidueCheck {
    pub point: String,
    pub eta: [f64; 2],
    pub g2_eta: [f64; 2],
    /// `residue(Φ, p)`, real and imaginary parts per component
    pub phi: [[f64; 2]; 3],
    pub max_imag: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PeriodReport {
    pub cycles: Vec<CycleResidual>,
    pub residues: Vec<ResidueCheck>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Check both period conditions on the given cycles and the reality of the
/// residues of `Φ` at every puncture.
pub fn verify_periods(
    curve: &SuperellipticCurve,
    data: &WeierstrassData,
    generators: &[(String, Path)],
    tol: f64,
) -> Result<PeriodReport> {
    let exprs = [data.eta.clone(), data.g2_eta()?, data.g_eta()?];
    let mut cycles = vec![];
    let mut worst: f64 = 0.0;
    for (name, path) in generators {
        let (v, _) = integrate_many(curve, &exprs, path, &IntegrationOptions::default())?;
        let (eta, g2, g1) = (v[0], v[1], v[2]);
        let period1 = (eta - g2.conj()).norm();
        let period2 = g1.re.abs();
        let phi = [eta - g2, Complex64::new(0.0, 1.0) * (eta + g2), g1 * 2.0];
        worst = worst.max(period1).max(period2);
        cycles.push(CycleResidual {
            name: name.clone(),
            eta: pair(eta),
            g2_eta: pair(g2),
            g_eta: pair(g1),
            period1,
            period2,
            re_phi: [phi[0].re, phi[1].re, phi[2].re],
        });
    }
    let mut residues = vec![];
    for p in curve.punctures() {
        let r = residues_at(curve, &exprs, p, None)?;
        let phi = [
            r[0] - r[1],
            Complex64::new(0.0, 1.0) * (r[0] + r[1]),
            r[2] * 2.0,
        ];
        let max_imag = phi.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        worst = worst.max(max_imag);
        residues.push(ResidueCheck {
            point: format!("({}, branch {})", p.z, p.branch),
            eta: pair(r[0]),
            g2_eta: pair(r[1]),
            phi: [pair(phi[0]), pair(phi[1]), pair(phi[2])],
            max_imag,
        });
    }
    Ok(PeriodReport {
        cycles,
        residues,
        max_residual: worst,
        tol,
        pass: worst < tol,
    })
}

/// `f(end) = Re ∫ Φ` along `path`, measured from its start.
pub fn evaluate_f(curve: &SuperellipticCurve, phi: &PhiTriple, path: &Path) -> Result<[f64; 3]> {
    let (v, _) = integrate_many(curve, &phi.0, path, &IntegrationOptions::default())?;
    Ok([v[0].re, v[1].re, v[2].re])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Factor;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mobius_composition() {
        let m = Mobius::inversion(c(3.0, 0.0));
        let id = m.compose(&m);
        let z = c(0.3, 0.7);
        assert!((id.apply(z) - z).norm() < 1e-14);
    }

    #[test]
    fn double_loop_returns_to_start() {
        let cv = SuperellipticCurve::new(
            2,
            vec![Factor {
                root: c(0.0, 0.0),
                exp: 1,
            }],
        )
        .unwrap();
        let w0 = cv.principal_w(c(1.0, 0.0));
        let once = continue_w(&cv, &ZPath::circle(c(0.0, 0.0), 1.0, 0.0, 1.0), w0).unwrap();
        assert!((once + w0).norm() < 1e-12);
        let twice = continue_w(&cv, &ZPath::circle(c(0.0, 0.0), 1.0, 0.0, 2.0), w0).unwrap();
        assert!((twice - w0).norm() < 1e-12);
    }

    #[test]
    fn loop_avoiding_branch_points_is_trivial() {
        let cv = SuperellipticCurve::new(
            2,
            vec![
                Factor {
                    root: c(0.0, 0.0),
                    exp: 1,
                },
                Factor {
                    root: c(1.0, 0.0),
                    exp: 1,
                },
                Factor {
                    root: c(-1.0, 0.0),
                    exp: 1,
                },
            ],
        )
        .unwrap();
        let w0 = cv.principal_w(c(0.0, 2.0));
        let back = continue_w(&cv, &ZPath::circle(c(0.0, 2.5), 0.5, -PI / 2.0, 1.0), w0).unwrap();
        assert!((back - w0).norm() < 1e-12);
    }

    #[test]
    fn dz_over_z_around_origin() {
        let cv = SuperellipticCurve::new(1, vec![]).unwrap();
        let e = Expr::from(Monomial::real(1.0).z(0.0, -1).dz());
        let path = Path::new(vec![ZPath::circle(c(0.0, 0.0), 0.7, 0.0, 1.0)], c(1.0, 0.0));
        let v = integrate_over(&cv, &e, &path).unwrap();
        assert!((v - c(0.0, 2.0 * PI)).norm() < 1e-12);
    }
}
