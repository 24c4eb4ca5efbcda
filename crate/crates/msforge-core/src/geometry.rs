//! Curvature, ends, symmetries, the planar geodesic of the even family and
//! triangle meshes of the immersion `f = Re ∫ Φ`.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{CurvePoint, Expr, Ext, SuperellipticCurve};
use crate::error::{Error, Result};
use crate::families::{FamilyId, Surface};
use crate::integrator::{
    continue_w, integrate_piece, phi_from_data, IntegrationOptions, Mobius, Path, PhiTriple,
    WeierstrassData, ZPath,
};
use crate::periods::closure_residual;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Unit normal from the value of `g` by inverse stereographic projection.
pub fn gauss_normal(g: Complex64) -> [f64; 3] {
    if !g.is_finite() {
        return [0.0, 0.0, 1.0];
    }
    let n2 = g.norm_sqr();
    let d = n2 + 1.0;
    [2.0 * g.re / d, 2.0 * g.im / d, (n2 - 1.0) / d]
}

/// `(1 + |g|²) |η / dz|`, so that `ds = λ |dz|`.
pub fn conformal_factor(data: &WeierstrassData, z: Complex64, w: Complex64) -> f64 {
    (1.0 + data.g_at(z, w).norm_sqr()) * data.eta_at(z, w).norm()
}

/// Gauss curvature `K = -(2 |g'| / ((1 + |g|²)² |η/dz|))²` at a point of the
/// curve that is not a zero or pole of the metric.
pub fn gauss_curvature(
    data: &WeierstrassData,
    curve: &SuperellipticCurve,
    z: Complex64,
    w: Complex64,
) -> Result<f64> {
    let dg = data.g.d(curve)?;
    gauss_curvature_with(data, &dg, z, w)
}

fn gauss_curvature_with(
    data: &WeierstrassData,
    dg: &Expr,
    z: Complex64,
    w: Complex64,
) -> Result<f64> {
    let g = data.g_at(z, w);
    let eta = data.eta_at(z, w).norm();
    let gp = dg.eval(z, w).norm();
    let den = (1.0 + g.norm_sqr()).powi(2) * eta;
    if !(den.is_finite() && den > 0.0) || !gp.is_finite() {
        return Err(Error::Invalid(format!("metric degenerates at z = {z}")));
    }
    let k = 2.0 * gp / den;
    Ok(-k * k)
}

/// Numerical total curvature.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TotalCurvature {
    /// Midpoint sums on successively halved grids.
    pub estimates: Vec<f64>,
    pub extrapolated: f64,
    pub deg_g: u32,
    /// `4π deg g`.
    pub expected: f64,
    pub rel_error: f64,
}

/// `∫ |K| dA = ∫ 4 |g'|² / (1 + |g|²)² dA_z` summed over the sheets, by the
/// midpoint rule on a graded log-polar grid, over `levels` successively halved
/// grids, followed by Richardson extrapolation of the last two.
pub fn total_curvature(
    data: &WeierstrassData,
    curve: &SuperellipticCurve,
    levels: usize,
) -> Result<TotalCurvature> {
    if data.g.is_differential() || !data.eta.is_differential() {
        return Err(Error::Invalid(
            "g must be a function and eta a differential".into(),
        ));
    }
    let deg_g = curve.degree(&data.g)?;
    let dg = data.g.d(curve)?;
    let scale = curve
        .factors()
        .iter()
        .map(|f| f.root.norm())
        .filter(|&r| r > 0.0)
        .fold(1.0, |acc: f64, r| acc.max(r).max(1.0 / r));
    // u = log|z| = L sinh(v) with v uniform: fine near the special values,
    // coarse toward the ends where the integrand decays exponentially in u
    let half_width = 40.0 + scale.ln().abs();
    let l = 0.5;
    let vmax = (half_width / l).asinh();
    let mut estimates = vec![];
    for level in 0..levels.max(2) {
        let nv = 256usize << level;
        let nt = 256usize << level;
        let hv = 2.0 * vmax / nv as f64;
        let ht = 2.0 * PI / nt as f64;
        let sum: f64 = (0..nv)
            .into_par_iter()
            .map(|i| {
                let v = -vmax + (i as f64 + 0.5) * hv;
                let r = (l * v.sinh()).exp();
                let jac = l * v.cosh();
                let mut row = 0.0;
                for j in 0..nt {
                    let z = Complex64::from_polar(r, (j as f64 + 0.5) * ht);
                    for w in curve.w_values(z) {
                        let g = data.g_at(z, w);
                        let gp = dg.eval(z, w);
                        let v = 4.0 * gp.norm_sqr() * r * r / (1.0 + g.norm_sqr()).powi(2);
                        if v.is_finite() {
                            row += v;
                        }
                    }
                }
                row * jac
            })
            .sum();
        estimates.push(sum * hv * ht);
    }
    let n = estimates.len();
    let extrapolated = (4.0 * estimates[n - 1] - estimates[n - 2]) / 3.0;
    let expected = 4.0 * PI * deg_g as f64;
    let rel_error = (extrapolated - expected).abs() / expected.max(1e-300);
    let change = (estimates[n - 1] - estimates[n - 2]).abs() / expected.max(1e-300);
    if !extrapolated.is_finite() || change > 0.05 {
        return Err(Error::NoConvergence(format!(
            "total curvature changes by {change:.2e} between refinements"
        )));
    }
    Ok(TotalCurvature {
        estimates,
        extrapolated,
        deg_g,
        expected,
        rel_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndKind {
    EmbeddedPlanar,
    EmbeddedCatenoidal,
    Higher,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EndInfo {
    pub point: String,
    /// Pole order of `Φ` minus one.
    pub d: u32,
    pub kind: EndKind,
    /// Limit of the unit normal at the end.
    pub normal: [f64; 3],
    /// Residues of the three components of `Φ`.
    pub residues: [[f64; 2]; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EndReport {
    pub ends: Vec<EndInfo>,
}

impl EndReport {
    pub fn d_profile(&self) -> Vec<u32> {
        self.ends.iter().map(|e| e.d).collect()
    }
}

fn point_label(p: &CurvePoint) -> String {
    format!("z={} branch {}", p.z, p.branch)
}

/// Multiplicities `d_i` of the ends at the marked punctures, from the exact
/// pole orders of `Φ`.
pub fn end_orders(data: &WeierstrassData, curve: &SuperellipticCurve) -> Result<EndReport> {
    let phi = phi_from_data(data)?;
    let mut ends = vec![];
    for p in curve.punctures() {
        let mut pole = i64::MIN;
        let mut residues = [[0.0; 2]; 3];
        for (j, e) in phi.0.iter().enumerate() {
            if e.terms.is_empty() {
                continue;
            }
            pole = pole.max(-curve.local_order(e, p)?);
            let r = curve.puncture_series(e, p, 64)?.residue();
            residues[j] = [r.re, r.im];
        }
        if pole < 2 {
            return Err(Error::Invalid(format!(
                "Φ has no pole of order two or more at {}",
                point_label(p)
            )));
        }
        let d = (pole - 1) as u32;
        let flux = residues
            .iter()
            .map(|r| r[0].hypot(r[1]))
            .fold(0.0, f64::max);
        let kind = match (d, flux > 1e-9) {
            (1, false) => EndKind::EmbeddedPlanar,
            (1, true) => EndKind::EmbeddedCatenoidal,
            _ => EndKind::Higher,
        };
        let ord_g = curve.local_order(&data.g, p)?;
        let normal = match ord_g.signum() {
            1 => [0.0, 0.0, -1.0],
            -1 => [0.0, 0.0, 1.0],
            _ => gauss_normal(curve.puncture_series(&data.g, p, 1)?.coeff(0)),
        };
        ends.push(EndInfo {
            point: point_label(p),
            d,
            kind,
            normal,
            residues,
        });
    }
    Ok(EndReport { ends })
}

/// Both sides of `χ - Σ (d_i + 1) = -2 deg g` and the bound `≤ χ - 2n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JorgeMeeks {
    pub euler: i64,
    pub lhs: i64,
    pub rhs: i64,
    pub bound: i64,
    pub identity_holds: bool,
    pub all_embedded: bool,
    pub equality: bool,
    pub consistent: bool,
}

pub fn jorge_meeks_check(genus: u32, d: &[u32], deg_g: u32) -> JorgeMeeks {
    let euler = 2 - 2 * genus as i64;
    let lhs = euler - d.iter().map(|&x| x as i64 + 1).sum::<i64>();
    let rhs = -2 * deg_g as i64;
    let bound = euler - 2 * d.len() as i64;
    let all_embedded = d.iter().all(|&x| x == 1);
    let equality = lhs == bound;
    JorgeMeeks {
        euler,
        lhs,
        rhs,
        bound,
        identity_holds: lhs == rhs,
        all_embedded,
        equality,
        consistent: lhs == rhs && lhs <= bound && equality == all_embedded,
    }
}

/// The immersion of a surface, evaluated along canonical paths: an arc of
/// the circle through the base point followed by a radial segment.
#[derive(Debug, Clone)]
pub struct Immersion {
    pub surface: Surface,
    pub phi: PhiTriple,
    z0: Complex64,
    w0: Complex64,
    rho: f64,
    opts: IntegrationOptions,
}

impl Immersion {
    pub fn new(surface: &Surface) -> Result<Immersion> {
        let (z0, w0) = surface.basepoint();
        if z0.im != 0.0 || z0.re <= 0.0 {
            return Err(Error::Invalid(
                "base point must lie on the positive real axis".into(),
            ));
        }
        Ok(Immersion {
            surface: surface.clone(),
            phi: phi_from_data(&surface.data)?,
            z0,
            w0,
            rho: z0.re,
            opts: IntegrationOptions {
                tol: 1e-12,
                min_panels: 2,
                max_panels: 8192,
            },
        })
    }

    pub fn basepoint(&self) -> (Complex64, Complex64) {
        (self.z0, self.w0)
    }

    pub fn curve(&self) -> &SuperellipticCurve {
        &self.surface.curve
    }

    fn pieces(&self, z: Complex64, turns: i64) -> Vec<ZPath> {
        let theta = z.arg();
        let mut v = vec![];
        let sweep = theta + 2.0 * PI * turns as f64;
        if sweep != 0.0 {
            v.push(ZPath::Arc {
                center: c64(0.0, 0.0),
                radius: self.rho,
                start: 0.0,
                sweep,
            });
        }
        let mid = Complex64::from_polar(self.rho, theta);
        if (z - mid).norm() > 1e-15 * self.rho {
            v.push(ZPath::line(mid, z));
        }
        v
    }

    /// Canonical path from the base point to `(z, w)`.
    pub fn path_to(&self, z: Complex64, w: Complex64) -> Result<Path> {
        if z.norm() == 0.0 || !z.is_finite() {
            return Err(Error::Invalid(
                "the canonical path needs 0 < |z| < ∞".into(),
            ));
        }
        let n = self.surface.curve.sheets() as i64;
        let mut best: Option<(f64, i64)> = None;
        for k in 0..n {
            let mut wk = self.w0;
            for p in self.pieces(z, k) {
                wk = continue_w(&self.surface.curve, &p, wk)?;
            }
            let d = (wk - w).norm();
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, k));
            }
        }
        let (d, k) = best.expect("at least one sheet");
        if d > 1e-6 * (1.0 + w.norm()) {
            return Err(Error::Branch(format!(
                "no sheet over z = {z} carries w = {w}"
            )));
        }
        Ok(Path::new(self.pieces(z, k), self.w0))
    }

    /// `f(z, w)`, with `f` vanishing at the base point.
    pub fn f(&self, z: Complex64, w: Complex64) -> Result<[f64; 3]> {
        let path = self.path_to(z, w)?;
        let mut acc = [0.0; 3];
        let mut wc = path.start_w;
        for p in &path.pieces {
            let (v, we) = integrate_piece(&self.surface.curve, &self.phi.0, p, wc, &self.opts)?;
            for (a, x) in acc.iter_mut().zip(&v) {
                *a += x.re;
            }
            wc =
                we.ok_or_else(|| Error::Invalid("canonical path ends on a branch point".into()))?;
        }
        Ok(acc)
    }
}

/// A symmetry `(z, w) -> (M(z), λ w^p)` (after conjugating `z, w` when
/// antiholomorphic) together with the ambient isometry `x -> O x + v`.
#[derive(Debug, Clone)]
pub struct SymmetryOp {
    pub name: String,
    pub map: Mobius,
    pub conj: bool,
    pub w_coeff: Complex64,
    pub w_pow: i32,
    pub o: Matrix3<f64>,
    pub v: Vector3<f64>,
}

impl SymmetryOp {
    pub fn identity() -> SymmetryOp {
        SymmetryOp {
            name: "id".into(),
            map: Mobius::identity(),
            conj: false,
            w_coeff: c64(1.0, 0.0),
            w_pow: 1,
            o: Matrix3::identity(),
            v: Vector3::zeros(),
        }
    }

    pub fn apply(&self, z: Complex64, w: Complex64) -> (Complex64, Complex64) {
        let (z, w) = if self.conj {
            (z.conj(), w.conj())
        } else {
            (z, w)
        };
        (self.map.apply(z), self.w_coeff * w.powi(self.w_pow))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SymmetryOp) -> SymmetryOp {
        let inner = if self.conj {
            other.map.conj()
        } else {
            other.map
        };
        let lambda = if self.conj {
            other.w_coeff.conj()
        } else {
            other.w_coeff
        };
        SymmetryOp {
            name: format!("{}·{}", self.name, other.name),
            map: self.map.compose(&inner),
            conj: self.conj ^ other.conj,
            w_coeff: self.w_coeff * lambda.powi(self.w_pow),
            w_pow: self.w_pow * other.w_pow,
            o: self.o * other.o,
            v: self.o * other.v + self.v,
        }
    }

    pub fn orthogonality_defect(&self) -> f64 {
        (self.o.transpose() * self.o - Matrix3::identity())
            .abs()
            .max()
    }

    /// Check numerically that the domain map preserves the curve equation.
    pub fn check_automorphism(&self, curve: &SuperellipticCurve) -> Result<()> {
        if self.orthogonality_defect() > 1e-12 {
            return Err(Error::Invalid(format!(
                "{}: ambient matrix is not orthogonal",
                self.name
            )));
        }
        let mut rng = StdRng::seed_from_u64(7);
        let n = curve.sheets() as i32;
        for _ in 0..8 {
            let z = Complex64::from_polar(rng.random_range(0.3..3.0), rng.random_range(0.1..3.0));
            let w = curve.principal_w(z);
            let (z1, w1) = self.apply(z, w);
            let lhs = w1.powi(n);
            let rhs = curve.rhs(z1);
            if (lhs - rhs).norm() > 1e-9 * (lhs.norm() + rhs.norm()) {
                return Err(Error::Invalid(format!(
                    "{} is not an automorphism of the curve",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

fn diag(a: f64, b: f64, c: f64) -> Matrix3<f64> {
    Matrix3::from_diagonal(&Vector3::new(a, b, c))
}

/// Generators of the symmetry group of a family member, with translations
/// left at zero (see [`calibrate`]).
pub fn family_symmetries(s: &Surface) -> Vec<SymmetryOp> {
    let conj = SymmetryOp {
        name: "k1".into(),
        conj: true,
        ..SymmetryOp::identity()
    };
    match s.family {
        FamilyId::GenusFamily => {
            let t = PI / (s.param as f64 + 1.0);
            let (c, si) = (t.cos(), t.sin());
            vec![
                SymmetryOp {
                    o: diag(-1.0, 1.0, -1.0),
                    ..conj
                },
                SymmetryOp {
                    name: "k2".into(),
                    map: Mobius::scale(c64(-1.0, 0.0)),
                    w_coeff: Complex64::from_polar(1.0, t),
                    o: Matrix3::new(-c, si, 0.0, -si, -c, 0.0, 0.0, 0.0, -1.0),
                    ..SymmetryOp::identity()
                },
            ]
        }
        FamilyId::EvenFamily => {
            let t = 2.0 * PI / (s.param as f64 + 1.0);
            let (c, si) = (t.cos(), t.sin());
            vec![
                SymmetryOp {
                    o: diag(1.0, -1.0, 1.0),
                    ..conj
                },
                SymmetryOp {
                    name: "k2".into(),
                    w_coeff: Complex64::from_polar(1.0, t),
                    o: Matrix3::new(c, -si, 0.0, si, c, 0.0, 0.0, 0.0, 1.0),
                    ..SymmetryOp::identity()
                },
                SymmetryOp {
                    name: "k3".into(),
                    map: Mobius::inversion(c64(s.a[0], 0.0)),
                    w_coeff: c64(1.0 / (s.c * s.c), 0.0),
                    w_pow: -1,
                    o: diag(1.0, -1.0, -1.0),
                    ..SymmetryOp::identity()
                },
            ]
        }
        FamilyId::WeberFamily => vec![SymmetryOp {
            o: diag(1.0, -1.0, 1.0),
            ..conj
        }],
        FamilyId::Catenoid => vec![SymmetryOp {
            o: diag(1.0, -1.0, 1.0),
            ..conj
        }],
    }
}

/// Set the translation of `op` so that it maps the base point correctly.
pub fn calibrate(imm: &Immersion, op: &SymmetryOp) -> Result<SymmetryOp> {
    let (z0, w0) = imm.basepoint();
    let (z1, w1) = op.apply(z0, w0);
    let f1 = imm.f(z1, w1)?;
    Ok(SymmetryOp {
        v: Vector3::new(f1[0], f1[1], f1[2]),
        ..op.clone()
    })
}

/// Close a set of generators under composition. Elements are identified by
/// their ambient matrix and conjugation parity.
pub fn symmetry_group(generators: &[SymmetryOp]) -> Result<Vec<SymmetryOp>> {
    const BUDGET: usize = 10_000;
    let key = |op: &SymmetryOp| -> (bool, [i64; 9]) {
        let mut k = [0i64; 9];
        for (i, x) in op.o.iter().enumerate() {
            k[i] = (x * 1e6).round() as i64;
        }
        (op.conj, k)
    };
    let mut seen = HashMap::new();
    let mut out = vec![SymmetryOp::identity()];
    seen.insert(key(&out[0]), 0usize);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in generators {
            let h = g.compose(&out[i]);
            let k = key(&h);
            if seen.contains_key(&k) {
                continue;
            }
            if out.len() >= BUDGET {
                return Err(Error::NoConvergence(
                    "symmetry group does not close within budget".into(),
                ));
            }
            seen.insert(k, out.len());
            queue.push_back(out.len());
            out.push(h);
        }
    }
    Ok(out)
}

pub fn symmetry_group_order(generators: &[SymmetryOp]) -> Result<usize> {
    Ok(symmetry_group(generators)?.len())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub name: String,
    /// Largest `|f(κ p) - (O f(p) + v)|` over the samples.
    pub max_deviation: f64,
    /// Largest defect of the pullback identity `κ*Φ = O Φ` (or `O conj Φ`).
    pub max_pullback_defect: f64,
    pub samples: usize,
}

/// Sample points off the real axis and away from the special values, at
/// radii within a factor 4 of the base point, on random sheets.
pub fn sample_points(imm: &Immersion, samples: usize, seed: u64) -> Vec<(Complex64, Complex64)> {
    let mut rng = StdRng::seed_from_u64(seed);
    let curve = imm.curve();
    let rho = imm.rho;
    let sep = 0.05 * curve.min_special_distance().min(1.0);
    let mut out = Vec::with_capacity(samples);
    while out.len() < samples {
        let r = rho * (rng.random_range(-1.0..1.0) * 4f64.ln()).exp();
        let t: f64 = rng.random_range(-PI..PI);
        if t.sin().abs() < 0.05 {
            continue;
        }
        let z = Complex64::from_polar(r, t);
        if curve.factors().iter().any(|f| (f.root - z).norm() < sep) {
            continue;
        }
        let ws = curve.w_values(z);
        let w = ws[rng.random_range(0..ws.len())];
        out.push((z, w));
    }
    out
}

/// Check several (calibrated) symmetries on a shared set of sample points.
pub fn symmetry_check_many(
    imm: &Immersion,
    ops: &[SymmetryOp],
    samples: usize,
    seed: u64,
) -> Result<Vec<SymmetryReport>> {
    for op in ops {
        op.check_automorphism(imm.curve())?;
    }
    let pts = sample_points(imm, samples, seed);
    let base: Vec<[f64; 3]> = pts
        .par_iter()
        .map(|&(z, w)| imm.f(z, w))
        .collect::<Result<_>>()?;
    ops.iter()
        .map(|op| {
            let per: Vec<(f64, f64)> = pts
                .par_iter()
                .zip(&base)
                .map(|(&(z, w), fp)| {
                    let (z1, w1) = op.apply(z, w);
                    let fq = imm.f(z1, w1)?;
                    let expect = op.o * Vector3::new(fp[0], fp[1], fp[2]) + op.v;
                    let dev = (Vector3::new(fq[0], fq[1], fq[2]) - expect).norm();
                    let phi_p = imm.phi.eval(z, w);
                    let phi_q = imm.phi.eval(z1, w1);
                    let zz = if op.conj { z.conj() } else { z };
                    let m = op.map.derivative(zz);
                    let mut pull = 0.0f64;
                    let mut scale = 0.0f64;
                    for r in 0..3 {
                        let mut rhs = c64(0.0, 0.0);
                        for cidx in 0..3 {
                            let p = if op.conj {
                                phi_p[cidx].conj()
                            } else {
                                phi_p[cidx]
                            };
                            rhs += op.o[(r, cidx)] * p;
                        }
                        pull = pull.max((phi_q[r] * m - rhs).norm());
                        scale = scale.max(rhs.norm());
                    }
                    Ok((dev, pull / (1.0 + scale)))
                })
                .collect::<Result<_>>()?;
            Ok(SymmetryReport {
                name: op.name.clone(),
                max_deviation: per.iter().map(|p| p.0).fold(0.0, f64::max),
                max_pullback_defect: per.iter().map(|p| p.1).fold(0.0, f64::max),
                samples,
            })
        })
        .collect()
}

pub fn symmetry_check(
    imm: &Immersion,
    op: &SymmetryOp,
    samples: usize,
    seed: u64,
) -> Result<SymmetryReport> {
    Ok(symmetry_check_many(imm, std::slice::from_ref(op), samples, seed)?.remove(0))
}

/// Trace of the image of `|z| = √a` for the even family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BjorlingReport {
    pub k: u32,
    pub a: f64,
    /// Largest `|x₃ - mean x₃|` along the traced curve.
    pub max_x3_deviation: f64,
    /// `|f(end) - f(start)|` after `k + 1` turns.
    pub closure_gap: f64,
    /// Largest `| c|w| - 1 |` along the curve.
    pub max_modulus_defect: f64,
    pub points: Vec<[f64; 3]>,
}

pub fn bjorling_geodesic_check(s: &Surface, samples: usize) -> Result<BjorlingReport> {
    if s.family != FamilyId::EvenFamily || s.a.is_empty() {
        return Err(Error::Invalid(
            "the planar geodesic check needs an even family surface".into(),
        ));
    }
    let k = s.param;
    let a = s.a[0];
    let rho = a.sqrt();
    let phi = phi_from_data(&s.data)?;
    let opts = IntegrationOptions {
        tol: 1e-13,
        min_panels: 2,
        max_panels: 8192,
    };
    let n = samples.max(8);
    let turns = (k + 1) as f64;
    let step = 2.0 * PI * turns / n as f64;
    let mut w = c64(
        s.curve
            .rhs(c64(rho, 0.0))
            .norm()
            .powf(1.0 / s.curve.sheets() as f64),
        0.0,
    );
    let mut x = [0.0; 3];
    let mut points = vec![x];
    let mut modulus: f64 = (s.c * w.norm() - 1.0).abs();
    for i in 0..n {
        let piece = ZPath::Arc {
            center: c64(0.0, 0.0),
            radius: rho,
            start: i as f64 * step,
            sweep: step,
        };
        let (v, we) = integrate_piece(&s.curve, &phi.0, &piece, w, &opts)?;
        for (xi, vi) in x.iter_mut().zip(&v) {
            *xi += vi.re;
        }
        w = we.ok_or_else(|| Error::Invalid("geodesic passes through a branch point".into()))?;
        modulus = modulus.max((s.c * w.norm() - 1.0).abs());
        points.push(x);
    }
    let mean = points.iter().map(|p| p[2]).sum::<f64>() / points.len() as f64;
    let dev = points
        .iter()
        .map(|p| (p[2] - mean).abs())
        .fold(0.0, f64::max);
    let end = points.last().expect("nonempty");
    let gap = (end[0].powi(2) + end[1].powi(2) + end[2].powi(2)).sqrt();
    Ok(BjorlingReport {
        k,
        a,
        max_x3_deviation: dev,
        closure_gap: gap,
        max_modulus_defect: modulus,
        points,
    })
}

/// Where a mesh vertex sits on the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainTag {
    pub z: [f64; 2],
    /// `w` at the vertex; `0` or `∞` at a branch point.
    pub w: [f64; 2],
    pub sheet: u32,
    /// Set for the vertices placed at branch points.
    pub branch_point: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    pub gauss_map: Vec<[f64; 3]>,
    pub conformal_factor: Vec<f64>,
    pub domain_tag: Vec<DomainTag>,
}

impl SurfaceMesh {
    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn max_edge_length(&self) -> f64 {
        let mut m: f64 = 0.0;
        for f in &self.faces {
            for e in 0..3 {
                m = m.max(dist(&self.vertices[f[e]], &self.vertices[f[(e + 1) % 3]]));
            }
        }
        m
    }

    /// Area of each face; zero marks a degenerate face.
    pub fn face_areas(&self) -> Vec<f64> {
        self.faces
            .iter()
            .map(|f| {
                let p = Vector3::from(self.vertices[f[0]]);
                let q = Vector3::from(self.vertices[f[1]]);
                let r = Vector3::from(self.vertices[f[2]]);
                0.5 * (q - p).cross(&(r - p)).norm()
            })
            .collect()
    }
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshOptions {
    /// Number of circles `|z| = const`.
    pub radial: usize,
    /// Number of rays `arg z = const`; rounded up to an even number.
    pub angular: usize,
    /// Inner and outer radius; by default `e^(∓4)` in the local coordinate
    /// at the ends over `0` and `∞`, scaled by the base point radius.
    pub range: Option<(f64, f64)>,
    /// Largest period residual accepted before meshing.
    pub closure_tol: f64,
    /// Mesh even when the periods do not close.
    pub force: bool,
}

impl Default for MeshOptions {
    fn default() -> Self {
        MeshOptions {
            radial: 64,
            angular: 64,
            range: None,
            closure_tol: 1e-8,
            force: false,
        }
    }
}

/// Default radial range of the mesh.
pub fn default_range(s: &Surface) -> Result<(f64, f64)> {
    let (z0, _) = s.basepoint();
    let m0 = s
        .curve
        .multiplicity(&s.curve.point(Ext::Finite(c64(0.0, 0.0)), 0)?) as f64;
    let mi = s.curve.multiplicity(&s.curve.point(Ext::Infinity, 0)?) as f64;
    Ok((z0.re * (-4.0 * m0).exp(), z0.re * (4.0 * mi).exp()))
}

struct RingVertex {
    f: [f64; 3],
    w: Complex64,
}

/// Triangulate `f` over the `N`-sheeted annulus between the two radii.
/// Vertex positions accumulate path integrals along a spanning tree: the
/// circle through the base point, then radial rays. Grid cells around a
/// branch point are fanned to the image of the branch point so the mesh has
/// no seams along the cuts.
pub fn build_mesh(s: &Surface, opts: &MeshOptions) -> Result<SurfaceMesh> {
    if opts.radial < 2 || opts.angular < 2 {
        return Ok(SurfaceMesh::default());
    }
    if !opts.force {
        let r = closure_residual(s)?;
        if !(r <= opts.closure_tol) {
            return Err(Error::Invalid(format!(
                "period residual {r:.3e} exceeds {:.1e}; the mesh would be torn",
                opts.closure_tol
            )));
        }
    }
    let imm = Immersion::new(s)?;
    let curve = &s.curve;
    let n = curve.sheets() as usize;
    let m = opts.angular + opts.angular % 2;
    let (r_lo, r_hi) = match opts.range {
        Some(r) => r,
        None => default_range(s)?,
    };
    if !(r_lo > 0.0 && r_hi > r_lo && r_hi.is_finite()) {
        return Err(Error::Invalid(format!("bad radial range [{r_lo}, {r_hi}]")));
    }
    let nr = opts.radial;
    let (ulo, uhi) = (r_lo.ln(), r_hi.ln());
    let h = (uhi - ulo) / (nr - 1) as f64;
    // keep every circle of the grid off the special values
    let mut shift = 0.0;
    for f in curve.factors() {
        let r = f.root.norm();
        if r == 0.0 {
            continue;
        }
        let t = (r.ln() - ulo) / h;
        if (t - t.round()).abs() < 1e-3 && t.round() >= 0.0 && t.round() <= (nr - 1) as f64 {
            shift = 0.01 * h;
        }
    }
    let us: Vec<f64> = (0..nr)
        .map(|i| {
            // the outermost circle moves inwards so the range is respected
            let u = ulo + i as f64 * h;
            if i == nr - 1 {
                u - shift
            } else {
                u + shift
            }
        })
        .collect();
    let radii: Vec<f64> = us.iter().map(|u| u.exp()).collect();
    let dtheta = 2.0 * PI / m as f64;
    let theta = |j: usize| (j as f64 + 0.5) * dtheta;
    let seg_opts = IntegrationOptions {
        tol: 1e-12,
        min_panels: 1,
        max_panels: 8192,
    };

    // f and w along the circle through the base point, at θ_j + 2πk
    let (z0, w0) = imm.basepoint();
    let rho = z0.re;
    let mut refs: Vec<RingVertex> = Vec::with_capacity(n * m);
    let mut x = [0.0; 3];
    let mut w = w0;
    let mut start = 0.0;
    for idx in 0..n * m {
        let target = theta(idx % m) + 2.0 * PI * (idx / m) as f64;
        let piece = ZPath::Arc {
            center: c64(0.0, 0.0),
            radius: rho,
            start,
            sweep: target - start,
        };
        let (v, we) = integrate_piece(curve, &imm.phi.0, &piece, w, &seg_opts)?;
        for (a, b) in x.iter_mut().zip(&v) {
            *a += b.re;
        }
        w = we.ok_or_else(|| Error::Branch("reference circle meets a branch point".into()))?;
        refs.push(RingVertex { f: x, w });
        start = target;
    }
    for j in [0, m / 2] {
        for k1 in 0..n {
            for k2 in 0..k1 {
                if (refs[k1 * m + j].w - refs[k2 * m + j].w).norm()
                    < 1e-8 * (1.0 + refs[k1 * m + j].w.norm())
                {
                    return Err(Error::Branch(
                        "the circle through the base point does not reach every sheet".into(),
                    ));
                }
            }
        }
    }

    // radial rays from the reference circle, one per (sheet, angle)
    let rays: Vec<Vec<RingVertex>> = (0..n * m)
        .into_par_iter()
        .map(|idx| {
            let e = Complex64::from_polar(1.0, theta(idx % m));
            let mut out: Vec<Option<RingVertex>> = (0..nr).map(|_| None).collect();
            for dir in [1i64, -1] {
                let mut x = refs[idx].f;
                let mut w = refs[idx].w;
                let mut zc = e * rho;
                let order: Vec<usize> = if dir == 1 {
                    (0..nr).filter(|&i| radii[i] >= rho).collect()
                } else {
                    (0..nr).rev().filter(|&i| radii[i] < rho).collect()
                };
                for i in order {
                    let zn = e * radii[i];
                    let (v, we) =
                        integrate_piece(curve, &imm.phi.0, &ZPath::line(zc, zn), w, &seg_opts)?;
                    for (a, b) in x.iter_mut().zip(&v) {
                        *a += b.re;
                    }
                    w = we.ok_or_else(|| Error::Branch("ray meets a branch point".into()))?;
                    zc = zn;
                    out[i] = Some(RingVertex { f: x, w });
                }
            }
            Ok(out
                .into_iter()
                .map(|v| v.expect("every ring reached"))
                .collect())
        })
        .collect::<Result<_>>()?;

    let vid = |i: usize, j: usize, k: usize| (k * nr + i) * m + j;
    let total = n * nr * m;
    let mut mesh = SurfaceMesh {
        vertices: vec![[0.0; 3]; total],
        faces: vec![],
        gauss_map: vec![[0.0; 3]; total],
        conformal_factor: vec![0.0; total],
        domain_tag: vec![
            DomainTag {
                z: [0.0; 2],
                w: [0.0; 2],
                sheet: 0,
                branch_point: false
            };
            total
        ],
    };
    let mut wv = vec![c64(0.0, 0.0); total];
    for k in 0..n {
        for j in 0..m {
            for i in 0..nr {
                let rv = &rays[k * m + j][i];
                let z = Complex64::from_polar(radii[i], theta(j));
                let id = vid(i, j, k);
                mesh.vertices[id] = rv.f;
                mesh.gauss_map[id] = gauss_normal(s.data.g_at(z, rv.w));
                mesh.conformal_factor[id] = conformal_factor(&s.data, z, rv.w);
                mesh.domain_tag[id] = DomainTag {
                    z: [z.re, z.im],
                    w: [rv.w.re, rv.w.im],
                    sheet: k as u32,
                    branch_point: false,
                };
                wv[id] = rv.w;
            }
        }
    }

    // sheet reached by continuing each vertex one step counterclockwise
    let next: Vec<Vec<usize>> = (0..nr * m)
        .into_par_iter()
        .map(|ij| {
            let (i, j) = (ij / m, ij % m);
            let j1 = (j + 1) % m;
            let piece = ZPath::Arc {
                center: c64(0.0, 0.0),
                radius: radii[i],
                start: theta(j),
                sweep: dtheta,
            };
            (0..n)
                .map(|k| {
                    let wn = continue_w(curve, &piece, wv[vid(i, j, k)])?;
                    let (best, d) = (0..n)
                        .map(|k2| (k2, (wv[vid(i, j1, k2)] - wn).norm()))
                        .fold(
                            (0, f64::INFINITY),
                            |acc, x| if x.1 < acc.1 { x } else { acc },
                        );
                    if d > 1e-6 * (1.0 + wn.norm()) {
                        return Err(Error::Branch(format!(
                            "lost the sheet between rays {j} and {j1}"
                        )));
                    }
                    Ok(best)
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    for i in 0..nr - 1 {
        for j in 0..m {
            let j1 = (j + 1) % m;
            let bottom = &next[i * m + j];
            let top = &next[(i + 1) * m + j];
            if bottom == top {
                for k in 0..n {
                    let k1 = bottom[k];
                    mesh.faces
                        .push([vid(i, j, k), vid(i, j1, k1), vid(i + 1, j1, k1)]);
                    mesh.faces
                        .push([vid(i, j, k), vid(i + 1, j1, k1), vid(i + 1, j, k)]);
                }
                continue;
            }
            // the cell contains a branch point: walk the boundary around it
            let mut top_inv = vec![0; n];
            for (k, &t) in top.iter().enumerate() {
                top_inv[t] = k;
            }
            let inside = |r: &Complex64| {
                let t = (r.arg() - theta(j)).rem_euclid(2.0 * PI);
                r.norm() > radii[i] && r.norm() < radii[i + 1] && t < dtheta
            };
            let root = curve
                .factors()
                .iter()
                .map(|f| f.root)
                .find(inside)
                .ok_or_else(|| {
                    Error::Branch(format!(
                        "monodromy around cell ({i}, {j}) without a branch point"
                    ))
                })?;
            let mut done = vec![false; n];
            for k_start in 0..n {
                if done[k_start] {
                    continue;
                }
                let mut cycle = vec![];
                let mut k = k_start;
                while !done[k] {
                    done[k] = true;
                    cycle.push(k);
                    k = top_inv[bottom[k]];
                }
                let mut boundary = vec![];
                for &k in &cycle {
                    let k1 = bottom[k];
                    let k3 = top_inv[k1];
                    boundary.push((vid(i, j, k), vid(i, j1, k1)));
                    boundary.push((vid(i, j1, k1), vid(i + 1, j1, k1)));
                    boundary.push((vid(i + 1, j1, k1), vid(i + 1, j, k3)));
                    boundary.push((vid(i + 1, j, k3), vid(i, j, k3)));
                }
                if cycle.len() == 1 {
                    let k = cycle[0];
                    let k1 = bottom[k];
                    mesh.faces
                        .push([vid(i, j, k), vid(i, j1, k1), vid(i + 1, j1, k1)]);
                    mesh.faces
                        .push([vid(i, j, k), vid(i + 1, j1, k1), vid(i + 1, j, k)]);
                    continue;
                }
                let from = vid(i, j, cycle[0]);
                let zf = Complex64::from_polar(radii[i], theta(j));
                let graded = ZPath::Graded {
                    from: zf,
                    to: root,
                    power: n as f64,
                };
                // z - root loses digits near the end of the graded path
                let near_opts = IntegrationOptions {
                    tol: 1e-9,
                    min_panels: 2,
                    max_panels: 512,
                };
                let (v, _) = integrate_piece(curve, &imm.phi.0, &graded, wv[from], &near_opts)?;
                let fv = mesh.vertices[from];
                let center = [fv[0] + v[0].re, fv[1] + v[1].re, fv[2] + v[2].re];
                let z_near = root + (zf - root) * 1e-6;
                let w_near = continue_w(curve, &ZPath::line(zf, z_near), wv[from])?;
                let cf = boundary
                    .iter()
                    .map(|e| mesh.conformal_factor[e.0])
                    .sum::<f64>()
                    / boundary.len() as f64;
                let id = mesh.vertices.len();
                mesh.vertices.push(center);
                mesh.gauss_map
                    .push(gauss_normal(s.data.g_at(z_near, w_near)));
                mesh.conformal_factor.push(cf);
                let w_root = if w_near.norm() < 1.0 {
                    [0.0; 2]
                } else {
                    [f64::INFINITY; 2]
                };
                mesh.domain_tag.push(DomainTag {
                    z: [root.re, root.im],
                    w: w_root,
                    sheet: cycle[0] as u32,
                    branch_point: true,
                });
                for (a, b) in boundary {
                    mesh.faces.push([a, b, id]);
                }
            }
        }
    }
    Ok(mesh)
}

/// Wavefront OBJ: `v`, then `vn` from the Gauss map, then `f` (1-based).
pub fn write_obj<W: Write>(mesh: &SurfaceMesh, mut out: W) -> Result<()> {
    writeln!(
        out,
        "# msforge mesh: {} vertices, {} faces",
        mesh.vertices.len(),
        mesh.faces.len()
    )?;
    for v in &mesh.vertices {
        writeln!(out, "v {:.12e} {:.12e} {:.12e}", v[0], v[1], v[2])?;
    }
    for n in &mesh.gauss_map {
        writeln!(out, "vn {:.12e} {:.12e} {:.12e}", n[0], n[1], n[2])?;
    }
    for f in &mesh.faces {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    Ok(())
}

pub fn export_obj(mesh: &SurfaceMesh, path: &std::path::Path) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_obj(mesh, file)
}

/// Vertices and 0-based faces read from an OBJ file.
pub type ObjData = (Vec<[f64; 3]>, Vec<[usize; 3]>);

/// Read back the `v` and `f` records of an OBJ file.
pub fn read_obj(text: &str) -> Result<ObjData> {
    let mut vs = vec![];
    let mut fs = vec![];
    for (ln, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        let bad = || Error::Invalid(format!("OBJ line {}: {line}", ln + 1));
        match it.next() {
            Some("v") => {
                let p: Vec<f64> = it
                    .map(|t| t.parse().map_err(|_| bad()))
                    .collect::<Result<_>>()?;
                vs.push([
                    *p.first().ok_or_else(bad)?,
                    *p.get(1).ok_or_else(bad)?,
                    *p.get(2).ok_or_else(bad)?,
                ]);
            }
            Some("f") => {
                let p: Vec<usize> = it
                    .map(|t| {
                        t.split('/')
                            .next()
                            .unwrap_or("")
                            .parse::<usize>()
                            .map_err(|_| bad())
                    })
                    .collect::<Result<_>>()?;
                if p.len() != 3 || p.iter().any(|&i| i == 0 || i > vs.len()) {
                    return Err(bad());
                }
                fs.push([p[0] - 1, p[1] - 1, p[2] - 1]);
            }
            _ => {}
        }
    }
    Ok((vs, fs))
}

/// Binary little-endian PLY with positions and normals.
pub fn write_ply<W: Write>(mesh: &SurfaceMesh, mut out: W) -> Result<()> {
    write!(
        out,
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\n\
         property float x\nproperty float y\nproperty float z\n\
         property float nx\nproperty float ny\nproperty float nz\n\
         element face {}\nproperty list uchar int vertex_indices\nend_header\n",
        mesh.vertices.len(),
        mesh.faces.len()
    )?;
    for (v, n) in mesh.vertices.iter().zip(&mesh.gauss_map) {
        for x in v.iter().chain(n) {
            out.write_all(&(*x as f32).to_le_bytes())?;
        }
    }
    for f in &mesh.faces {
        out.write_all(&[3u8])?;
        for &i in f {
            out.write_all(&(i as i32).to_le_bytes())?;
        }
    }
    Ok(())
}

/// Metadata written next to an exported mesh.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshMetadata {
    pub family: FamilyId,
    pub param: u32,
    pub c: f64,
    pub a: Vec<f64>,
    pub closure_residual: f64,
    pub deg_g: u32,
    pub tau_over_4pi: Option<f64>,
    pub vertices: usize,
    pub faces: usize,
    pub options: MeshOptions,
}

/// Discrete mean curvature `|Δx| / (2 A)` at interior vertices (cotangent
/// Laplacian, barycentric area); `None` on the boundary.
pub fn discrete_mean_curvature(mesh: &SurfaceMesh) -> Vec<Option<f64>> {
    let nv = mesh.vertices.len();
    let mut lap = vec![Vector3::<f64>::zeros(); nv];
    let mut area = vec![0.0; nv];
    let mut edge_faces: HashMap<(usize, usize), u32> = HashMap::new();
    for f in &mesh.faces {
        let p: Vec<Vector3<f64>> = f.iter().map(|&i| Vector3::from(mesh.vertices[i])).collect();
        let a2 = (p[1] - p[0]).cross(&(p[2] - p[0])).norm();
        for e in 0..3 {
            let (i, j, o) = (f[e], f[(e + 1) % 3], f[(e + 2) % 3]);
            let (pi, pj, po) = (
                Vector3::from(mesh.vertices[i]),
                Vector3::from(mesh.vertices[j]),
                Vector3::from(mesh.vertices[o]),
            );
            let u = pi - po;
            let v = pj - po;
            let cot = u.dot(&v) / u.cross(&v).norm().max(1e-300);
            lap[i] += 0.5 * cot * (pj - pi);
            lap[j] += 0.5 * cot * (pi - pj);
            area[f[e]] += a2 / 6.0;
            *edge_faces.entry((i.min(j), i.max(j))).or_default() += 1;
        }
    }
    let mut boundary = vec![false; nv];
    for ((i, j), c) in edge_faces {
        if c != 2 {
            boundary[i] = true;
            boundary[j] = true;
        }
    }
    (0..nv)
        .map(|v| {
            if boundary[v] || area[v] == 0.0 {
                None
            } else {
                Some(lap[v].norm() / (2.0 * area[v]))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catenoid_curvature_on_unit_circle() {
        let s = Surface::catenoid();
        for t in [0.1, 1.0, 2.5] {
            let z = Complex64::from_polar(1.0, t);
            let k = gauss_curvature(&s.data, &s.curve, z, c64(1.0, 0.0)).unwrap();
            assert!((k + 0.25).abs() < 1e-14, "{k}");
        }
    }

    #[test]
    fn jorge_meeks_examples() {
        let r = jorge_meeks_check(1, &[1, 3], 3);
        assert!(r.identity_holds && r.consistent && !r.equality);
        assert_eq!(r.lhs, -6);
        let r = jorge_meeks_check(0, &[1, 1], 1);
        assert!(r.identity_holds && r.equality && r.all_embedded);
        assert_eq!(jorge_meeks_check(2, &[2, 2], 4).lhs, -8);
    }

    #[test]
    fn single_involution_has_order_two() {
        let op = SymmetryOp {
            conj: true,
            o: diag(1.0, -1.0, 1.0),
            ..SymmetryOp::identity()
        };
        assert_eq!(symmetry_group_order(&[op]).unwrap(), 2);
    }

    #[test]
    fn degenerate_grid_gives_empty_mesh() {
        let opts = MeshOptions {
            radial: 1,
            ..MeshOptions::default()
        };
        assert!(build_mesh(&Surface::catenoid(), &opts).unwrap().is_empty());
    }
}
