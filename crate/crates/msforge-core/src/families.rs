//! The concrete surfaces: curve, Weierstrass data and a generating set of
//! cycles for each family, plus the catenoid used as a reference.
//!
//! Branch conventions: every cycle starts on the real axis at a point where
//! the right hand side of the curve equation is a positive real for the
//! sheet with `w` on the principal branch; the start value of `w` is that
//! principal root times a fixed phase, listed per family below.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::{CurvePoint, Ext, Factor, Monomial, SuperellipticCurve};
use crate::error::{Error, Result};
use crate::integrator::{Path, WeierstrassData, ZPath};

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyId {
    /// `w^(γ+1) = z (z² - 1)^γ`, `g = c w`, `η = i dz / (z² w)`
    GenusFamily,
    /// `w^(k+1) = z² ((z - 1)/(z - a))^k`, `g = c w`, `η = dz / (z w)`
    EvenFamily,
    /// `w² = z F₁ / F₂`, `g = c w / (z + 1)`, `η = (z + 1)² dz / (z w)`
    WeberFamily,
    Catenoid,
}

impl FamilyId {
    pub fn name(self) -> &'static str {
        match self {
            FamilyId::GenusFamily => "genus_family",
            FamilyId::EvenFamily => "even_family",
            FamilyId::WeberFamily => "weber_family",
            FamilyId::Catenoid => "catenoid",
        }
    }
}

/// A surface together with its domain and the cycles on which periods must close.
#[derive(Debug, Clone)]
pub struct Surface {
    pub family: FamilyId,
    /// γ for the genus and Weber families, k for the even family, 0 for the catenoid.
    pub param: u32,
    pub c: f64,
    /// `a` for the even family, `(a₂, …, a_{2γ})` for the Weber family.
    pub a: Vec<f64>,
    pub curve: SuperellipticCurve,
    pub data: WeierstrassData,
}

impl Surface {
    pub fn genus_family(gamma: u32, c: f64) -> Result<Surface> {
        Ok(Surface {
            family: FamilyId::GenusFamily,
            param: gamma,
            c,
            a: vec![],
            curve: genus_curve(gamma)?,
            data: genus_data(c),
        })
    }

    pub fn even_family(k: u32, a: f64) -> Result<Surface> {
        let c = even_c(k, a);
        Ok(Surface {
            family: FamilyId::EvenFamily,
            param: k,
            c,
            a: vec![a],
            curve: even_curve(k, a)?,
            data: even_data(c),
        })
    }

    /// Even family with `c` decoupled from `a`, for control experiments.
    pub fn even_family_with_c(k: u32, a: f64, c: f64) -> Result<Surface> {
        let mut s = Surface::even_family(k, a)?;
        s.c = c;
        s.data = even_data(c);
        Ok(s)
    }

    pub fn weber_family(gamma: u32, c: f64, a: &[f64]) -> Result<Surface> {
        Ok(Surface {
            family: FamilyId::WeberFamily,
            param: gamma,
            c,
            a: a.to_vec(),
            curve: weber_curve(gamma, a)?,
            data: weber_data(c),
        })
    }

    pub fn catenoid() -> Surface {
        let curve = SuperellipticCurve::new(1, vec![])
            .expect("sphere")
            .with_punctures(vec![
                CurvePoint {
                    z: Ext::Finite(c64(0.0, 0.0)),
                    branch: 0,
                    w: Ext::Finite(c64(1.0, 0.0)),
                    is_puncture: true,
                },
                CurvePoint {
                    z: Ext::Infinity,
                    branch: 0,
                    w: Ext::Finite(c64(1.0, 0.0)),
                    is_puncture: true,
                },
            ]);
        Surface {
            family: FamilyId::Catenoid,
            param: 0,
            c: 1.0,
            a: vec![],
            curve,
            data: WeierstrassData {
                g: Monomial::real(1.0).z(0.0, 1).into(),
                eta: Monomial::real(1.0).z(0.0, -2).dz().into(),
            },
        }
    }

    /// Genus of the compactified domain.
    pub fn genus(&self) -> u32 {
        self.curve.genus()
    }

    /// A set of cycles generating the first homology of the punctured domain,
    /// each tagged with a name.
    pub fn generators(&self) -> Result<Vec<(String, Path)>> {
        match self.family {
            FamilyId::GenusFamily => Ok(genus_generators(&self.curve, self.param)),
            FamilyId::EvenFamily => Ok(even_generators(&self.curve, self.param, self.a[0], self.c)),
            FamilyId::WeberFamily => Ok(weber_generators(&self.curve)),
            FamilyId::Catenoid => Ok(vec![(
                "around 0".to_string(),
                Path::new(
                    vec![ZPath::circle(c64(0.0, 0.0), 1.0, 0.0, 1.0)],
                    c64(1.0, 0.0),
                ),
            )]),
        }
    }

    /// Base point of the immersion and `w` there.
    pub fn basepoint(&self) -> (Complex64, Complex64) {
        match self.family {
            FamilyId::GenusFamily => {
                let z = c64(0.5, 0.0);
                let n = self.param as f64 + 1.0;
                (
                    z,
                    real_root(&self.curve, 0.5)
                        * Complex64::from_polar(1.0, self.param as f64 * PI / n),
                )
            }
            FamilyId::EvenFamily => {
                let x = self.a[0].sqrt();
                (c64(x, 0.0), c64(real_root(&self.curve, x), 0.0))
            }
            FamilyId::WeberFamily => {
                let z = c64(0.5, 0.0);
                (z, self.curve.principal_w(z))
            }
            FamilyId::Catenoid => (c64(1.0, 0.0), c64(1.0, 0.0)),
        }
    }
}

fn mark_ends(curve: SuperellipticCurve) -> Result<SuperellipticCurve> {
    let p0 = curve.point(Ext::Finite(c64(0.0, 0.0)), 0)?;
    let pinf = curve.point(Ext::Infinity, 0)?;
    let ends = [p0, pinf]
        .into_iter()
        .map(|p| CurvePoint {
            is_puncture: true,
            ..p
        })
        .collect();
    Ok(curve.with_punctures(ends))
}

/// `w^(γ+1) = z (z² - 1)^γ` with ends over `0` and `∞`.
pub fn genus_curve(gamma: u32) -> Result<SuperellipticCurve> {
    if gamma == 0 {
        return Err(Error::Invalid("gamma must be at least 1".into()));
    }
    let g = gamma as i64;
    let curve = SuperellipticCurve::new(
        gamma + 1,
        vec![
            Factor {
                root: c64(0.0, 0.0),
                exp: 1,
            },
            Factor {
                root: c64(1.0, 0.0),
                exp: g,
            },
            Factor {
                root: c64(-1.0, 0.0),
                exp: g,
            },
        ],
    )?;
    mark_ends(curve)
}

/// `g = c w`, `η = i dz / (z² w)`.
pub fn genus_data(c: f64) -> WeierstrassData {
    WeierstrassData {
        g: Monomial::real(c).w(1).into(),
        eta: Monomial::new(c64(0.0, 1.0)).z(0.0, -2).w(-1).dz().into(),
    }
}

/// Radius of a lollipop around `center` reached from `base`.
fn loop_radius(curve: &SuperellipticCurve, center: Complex64, base: Complex64) -> f64 {
    let nearest = curve
        .factors()
        .iter()
        .map(|f| (f.root - center).norm())
        .filter(|&d| d > 1e-12)
        .fold(f64::INFINITY, f64::min);
    0.5 * (base - center).norm().min(0.5 * nearest)
}

fn lollipop(
    curve: &SuperellipticCurve,
    base: Complex64,
    center: Complex64,
    turns: f64,
) -> Vec<ZPath> {
    Path::lollipop(base, center, loop_radius(curve, center, base), turns)
}

/// Loop around the end over `z = 0`, once in the local coordinate.
fn end_loop(curve: &SuperellipticCurve, base: Complex64, w0: Complex64) -> Path {
    let m = curve.sheets() as f64
        / num_gcd(
            curve.sheets() as i64,
            curve.exp_at(Ext::Finite(c64(0.0, 0.0))),
        ) as f64;
    Path::new(lollipop(curve, base, c64(0.0, 0.0), m), w0)
}

fn num_gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `|rhs(x)|^(1/N)` at a real `x`, the reference root the phases are measured from.
fn real_root(curve: &SuperellipticCurve, x: f64) -> f64 {
    curve
        .rhs(c64(x, 0.0))
        .norm()
        .powf(1.0 / curve.sheets() as f64)
}

fn root_of_unity(j: u32, n: u32) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)
}

/// The loop winding once counterclockwise around `[0, 1]`, lifted to every
/// sheet, its images under `z -> -z`, and the loop around the end at 0.
/// Starts at `z = 1/2` with `w` on the principal branch times `e^(iγπ/(γ+1))`.
pub fn genus_generators(curve: &SuperellipticCurve, gamma: u32) -> Vec<(String, Path)> {
    let n = gamma + 1;
    let b = c64(0.5, 0.0);
    let w0 = real_root(curve, 0.5) * Complex64::from_polar(1.0, gamma as f64 * PI / n as f64);
    let mut pieces = lollipop(curve, b, c64(0.0, 0.0), 1.0);
    pieces.extend(lollipop(curve, b, c64(1.0, 0.0), 1.0));
    let flip = crate::integrator::Mobius::scale(c64(-1.0, 0.0));
    let half = Complex64::from_polar(1.0, PI / n as f64);
    let mut out = vec![];
    for j in 0..n {
        let p = Path::new(pieces.clone(), w0 * root_of_unity(j, n));
        out.push((format!("around [0,1], sheet {j}"), p.clone()));
        out.push((
            format!("around [-1,0], sheet {j}"),
            p.mapped(flip, false, half, 1),
        ));
    }
    out.push(("end at 0".to_string(), end_loop(curve, b, w0)));
    out
}

/// `c = a^((k-2)/(2k+2))`.
pub fn even_c(k: u32, a: f64) -> f64 {
    a.powf((k as f64 - 2.0) / (2.0 * k as f64 + 2.0))
}

/// `w^(k+1) = z² ((z - 1)/(z - a))^k` with ends over `0` and `∞`.
pub fn even_curve(k: u32, a: f64) -> Result<SuperellipticCurve> {
    if k < 2 || !k.is_multiple_of(2) {
        return Err(Error::Invalid(format!(
            "k must be even and at least 2, got {k}"
        )));
    }
    if !(a > 1.0) {
        return Err(Error::Invalid(format!("a must exceed 1, got {a}")));
    }
    let k = k as i64;
    let curve = SuperellipticCurve::new(
        k as u32 + 1,
        vec![
            Factor {
                root: c64(0.0, 0.0),
                exp: 2,
            },
            Factor {
                root: c64(1.0, 0.0),
                exp: k,
            },
            Factor {
                root: c64(a, 0.0),
                exp: -k,
            },
        ],
    )?;
    mark_ends(curve)
}

/// `g = c w`, `η = dz / (z w)`.
pub fn even_data(c: f64) -> WeierstrassData {
    WeierstrassData {
        g: Monomial::real(c).w(1).into(),
        eta: Monomial::real(1.0).z(0.0, -1).w(-1).dz().into(),
    }
}

/// The loop `ℓ₁'` (k/2 clockwise turns around 0, then once around 1,
/// from `z = 1/2` on the principal branch) and the loop `ℓ₂` around
/// `[1, a]` (clockwise, from the midpoint with phase `e^(ikπ/(k+1))`),
/// on every sheet and under `z -> a/z`, plus the loop around the end at 0.
pub fn even_generators(curve: &SuperellipticCurve, k: u32, a: f64, c: f64) -> Vec<(String, Path)> {
    let n = k + 1;
    let b1 = c64(0.5, 0.0);
    let w1 = c64(real_root(curve, 0.5), 0.0);
    let mut l1 = lollipop(curve, b1, c64(0.0, 0.0), -(k as f64) / 2.0);
    l1.extend(lollipop(curve, b1, c64(1.0, 0.0), 1.0));
    let b2 = c64(0.5 * (1.0 + a), 0.0);
    let w2 = real_root(curve, b2.re) * Complex64::from_polar(1.0, k as f64 * PI / n as f64);
    let mut l2 = lollipop(curve, b2, c64(1.0, 0.0), -1.0);
    l2.extend(lollipop(curve, b2, c64(a, 0.0), -1.0));
    let inv = crate::integrator::Mobius::inversion(c64(a, 0.0));
    let w_coeff = c64(1.0 / (c * c), 0.0);
    let mut out = vec![];
    for j in 0..n {
        let z = root_of_unity(j, n);
        let p1 = Path::new(l1.clone(), w1 * z);
        let p2 = Path::new(l2.clone(), w2 * z);
        out.push((format!("l1', sheet {j}"), p1.clone()));
        out.push((format!("l2, sheet {j}"), p2));
        out.push((
            format!("l1' under z -> a/z, sheet {j}"),
            p1.mapped(inv, false, w_coeff, -1),
        ));
    }
    out.push(("end at 0".to_string(), end_loop(curve, b1, w1)));
    out
}

/// The `ℓ₁'` loop alone, on the principal sheet.
pub fn even_l1(curve: &SuperellipticCurve, k: u32) -> Path {
    let b1 = c64(0.5, 0.0);
    let mut l1 = lollipop(curve, b1, c64(0.0, 0.0), -(k as f64) / 2.0);
    l1.extend(lollipop(curve, b1, c64(1.0, 0.0), 1.0));
    Path::new(l1, c64(real_root(curve, 0.5), 0.0))
}

/// The `ℓ₂` loop alone.
pub fn even_l2(curve: &SuperellipticCurve, k: u32, a: f64) -> Path {
    let n = (k + 1) as f64;
    let b2 = c64(0.5 * (1.0 + a), 0.0);
    let mut l2 = lollipop(curve, b2, c64(1.0, 0.0), -1.0);
    l2.extend(lollipop(curve, b2, c64(a, 0.0), -1.0));
    Path::new(
        l2,
        real_root(curve, b2.re) * Complex64::from_polar(1.0, k as f64 * PI / n),
    )
}

/// The `ℓ'` loop of the genus family on the sheet used by the closed forms.
pub fn genus_l(curve: &SuperellipticCurve, gamma: u32) -> Path {
    genus_generators(curve, gamma).swap_remove(0).1
}

/// `w² = z F₁(z) / F₂(z)` with `F₁ = Π (z - a_odd)`, `F₂ = Π (z - a_even)`,
/// `a₁ = 1` and `a = (a₂, …, a_{2γ})` strictly increasing.
pub fn weber_curve(gamma: u32, a: &[f64]) -> Result<SuperellipticCurve> {
    if gamma == 0 {
        return Err(Error::Invalid("gamma must be at least 1".into()));
    }
    if a.len() != 2 * gamma as usize - 1 {
        return Err(Error::Invalid(format!(
            "expected {} values a_2.., got {}",
            2 * gamma - 1,
            a.len()
        )));
    }
    let mut all = vec![1.0];
    all.extend_from_slice(a);
    if all.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::Invalid(format!(
            "a_i must increase from a_1 = 1, got {all:?}"
        )));
    }
    let mut factors = vec![Factor {
        root: c64(0.0, 0.0),
        exp: 1,
    }];
    for (i, &r) in all.iter().enumerate() {
        factors.push(Factor {
            root: c64(r, 0.0),
            exp: if i % 2 == 0 { 1 } else { -1 },
        });
    }
    mark_ends(SuperellipticCurve::new(2, factors)?)
}

/// `g = c w / (z + 1)`, `η = (z + 1)² dz / (z w)`.
pub fn weber_data(c: f64) -> WeierstrassData {
    WeierstrassData {
        g: Monomial::real(c).w(1).z(-1.0, -1).into(),
        eta: Monomial::real(1.0).z(-1.0, 2).z(0.0, -1).w(-1).dz().into(),
    }
}

/// One loop around each gap `[0, a₁]`, `[a₁, a₂]`, … between consecutive
/// branch points, starting at the midpoint on the principal branch.
pub fn weber_generators(curve: &SuperellipticCurve) -> Vec<(String, Path)> {
    let roots: Vec<f64> = curve.factors().iter().map(|f| f.root.re).collect();
    let mut out = vec![];
    for pair in roots.windows(2) {
        let (l, r) = (pair[0], pair[1]);
        let b = c64(0.5 * (l + r), 0.0);
        let mut pieces = lollipop(curve, b, c64(l, 0.0), 1.0);
        pieces.extend(lollipop(curve, b, c64(r, 0.0), 1.0));
        out.push((
            format!("around [{l}, {r}]"),
            Path::new(pieces, curve.principal_w(b)),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genera() {
        for g in 1..=5 {
            assert_eq!(genus_curve(g).unwrap().genus(), g);
        }
        assert_eq!(even_curve(2, 3.0).unwrap().genus(), 2);
        assert_eq!(even_curve(4, 3.0).unwrap().genus(), 4);
        assert_eq!(weber_curve(1, &[2.0]).unwrap().genus(), 1);
        assert_eq!(weber_curve(2, &[2.0, 3.0, 4.0]).unwrap().genus(), 2);
        assert_eq!(Surface::catenoid().genus(), 0);
    }

    #[test]
    fn generators_close_on_the_curve() {
        let s = Surface::genus_family(2, 0.7).unwrap();
        for (name, p) in s.generators().unwrap() {
            let w = crate::integrator::continue_path(&s.curve, &p).unwrap();
            assert!((w - p.start_w).norm() < 1e-10, "{name} does not close");
        }
        let s = Surface::even_family(2, 3.0).unwrap();
        for (name, p) in s.generators().unwrap() {
            let w = crate::integrator::continue_path(&s.curve, &p).unwrap();
            assert!((w - p.start_w).norm() < 1e-10, "{name} does not close");
        }
    }
}
