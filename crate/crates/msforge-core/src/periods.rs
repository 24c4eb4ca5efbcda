//! Period integrals of the two families as real quadratures, the solvers for
//! their free constants, the sign certificates for the excluded candidates,
//! and a least-squares solver for the Weber family.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{self, FamilyId, Surface};
use crate::integrator::{integrate_many, IntegrationOptions};
use crate::quad::{beta, integrate, period_defect_bounds, AlgebraicIntegrand, Estimate};

/// Named real integrals with error estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodIntegrals {
    pub names: Vec<&'static str>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
}

impl PeriodIntegrals {
    fn from(names: Vec<&'static str>, est: Vec<Estimate>) -> Self {
        PeriodIntegrals {
            names,
            values: est.iter().map(|e| e.value).collect(),
            errors: est.iter().map(|e| e.error).collect(),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| *n == name)
            .map(|i| self.values[i])
    }
}

fn check_gamma(gamma: u32) -> Result<()> {
    if gamma == 0 {
        return Err(Error::Invalid("gamma must be at least 1".into()));
    }
    Ok(())
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 || !k.is_multiple_of(2) {
        return Err(Error::Invalid(format!(
            "k must be even and at least 2, got {k}"
        )));
    }
    Ok(())
}

/// `A_γ` and `B_γ`.
pub fn genus_family_integrals(gamma: u32) -> Result<PeriodIntegrals> {
    check_gamma(gamma)?;
    let g = gamma as f64;
    let n = g + 1.0;
    let a = integrate(&AlgebraicIntegrand::new(
        -1.0 / n,
        -g / n,
        0.0,
        1.0,
        move |t| (1.0 + t).powf(-g / n),
    ))?;
    let b = integrate(&AlgebraicIntegrand::new(
        1.0 / n,
        -1.0 / n,
        0.0,
        1.0,
        move |t| (1.0 + t).powf(-1.0 / n),
    ))?;
    let sa = g / (g + 2.0);
    let a = Estimate {
        value: sa * a.value,
        error: sa * a.error,
        ..a
    };
    let b = Estimate {
        value: 2.0 * b.value,
        error: 2.0 * b.error,
        ..b
    };
    Ok(PeriodIntegrals::from(
        vec!["A_gamma", "B_gamma"],
        vec![a, b],
    ))
}

/// `c = √(A_γ / B_γ)`.
pub fn solve_c(gamma: u32) -> Result<f64> {
    let p = genus_family_integrals(gamma)?;
    Ok((p.values[0] / p.values[1]).sqrt())
}

/// `∮η` and `∮g²η` over the loop around `[0, 1]` for given `c`, from the
/// real integrals: `-2 sin(γπ/(γ+1)) A_γ` and `-2 c² sin(γπ/(γ+1)) B_γ`.
pub fn genus_closed_form_periods(gamma: u32, c: f64) -> Result<(f64, f64)> {
    let p = genus_family_integrals(gamma)?;
    let s = (gamma as f64 * PI / (gamma as f64 + 1.0)).sin();
    Ok((-2.0 * s * p.values[0], -2.0 * c * c * s * p.values[1]))
}

/// `A₁`, `A₂`, `A₃` of the even family.
pub fn even_family_integrals(k: u32, a: f64) -> Result<PeriodIntegrals> {
    check_k(k)?;
    if !(a > 1.0) {
        return Err(Error::Invalid(format!("a must exceed 1, got {a}")));
    }
    let kf = k as f64;
    let n = kf + 1.0;
    let a1 = integrate(&AlgebraicIntegrand::new(
        -2.0 / n,
        1.0 / n,
        0.0,
        1.0,
        move |t| (a - t).powf(-1.0 / n),
    ))?;
    let a2 = integrate(&AlgebraicIntegrand::new(
        -2.0 / n,
        -kf / n,
        0.0,
        1.0,
        move |t| (a - t).powf(kf / n),
    ))?;
    let a3 = integrate(&AlgebraicIntegrand::new(
        -(kf - 1.0) / n,
        kf / n,
        0.0,
        1.0,
        move |t| (a - t).powf(-kf / n),
    ))?;
    Ok(PeriodIntegrals::from(
        vec!["A1", "A2", "A3"],
        vec![a1, a2, a3],
    ))
}

/// `F(a) = k A₁ + 2 a^((k-2)/(k+1)) A₃ - A₂`.
pub fn even_family_defect(k: u32, a: f64) -> Result<f64> {
    let p = even_family_integrals(k, a)?;
    let kf = k as f64;
    Ok(kf * p.values[0] + 2.0 * a.powf((kf - 2.0) / (kf + 1.0)) * p.values[2] - p.values[1])
}

/// Solution of `F(a) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvenSolution {
    pub k: u32,
    pub a: f64,
    pub c: f64,
    pub defect: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Bracket the root with certified bound signs, then bisect until `|F| < tol`.
pub fn solve_a(k: u32, tol: f64) -> Result<EvenSolution> {
    check_k(k)?;
    let lo = 1.0 + 1e-3;
    if period_defect_bounds(k, lo)?.0 <= 0.0 {
        return Err(Error::NoConvergence(format!(
            "lower bound not positive at a = {lo}"
        )));
    }
    let mut hi = 10.0;
    while period_defect_bounds(k, hi)?.1 >= 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NoConvergence(
                "no sign change of the defect below a = 1e12".into(),
            ));
        }
    }
    let bracket = (lo, hi);
    let (mut l, mut h) = bracket;
    let mut iterations = 0;
    loop {
        let m = 0.5 * (l + h);
        let f = even_family_defect(k, m)?;
        iterations += 1;
        if f.abs() < tol || h - l < 4.0 * f64::EPSILON * m {
            if f.abs() >= tol {
                return Err(Error::NoConvergence(format!(
                    "bisection stalled at a = {m} with F = {f:e}"
                )));
            }
            return Ok(EvenSolution {
                k,
                a: m,
                c: families::even_c(k, m),
                defect: f,
                bracket,
                iterations,
            });
        }
        if f > 0.0 {
            l = m;
        } else {
            h = m;
        }
        if iterations > 400 {
            return Err(Error::NoConvergence("bisection budget exhausted".into()));
        }
    }
}

/// The two real integrals over `[1, a]` behind `∮_{ℓ₂}η` and `∮_{ℓ₂}g²η`
/// (the latter without the factor `c²`).
pub fn ell2_integrals(k: u32, a: f64) -> Result<(f64, f64)> {
    check_k(k)?;
    if !(a > 1.0) {
        return Err(Error::Invalid(format!("a must exceed 1, got {a}")));
    }
    let kf = k as f64;
    let n = kf + 1.0;
    let i = integrate(&AlgebraicIntegrand::new(
        -kf / n,
        kf / n,
        1.0,
        a,
        move |t| t.powf(-(kf + 3.0) / n),
    ))?;
    let j = integrate(&AlgebraicIntegrand::new(
        kf / n,
        -kf / n,
        1.0,
        a,
        move |t| t.powf(-(kf - 1.0) / n),
    ))?;
    Ok((i.value, j.value))
}

/// `|∮_{ℓ₂}η - conj ∮_{ℓ₂}g²η| = 2 sin(kπ/(k+1)) |I - c² J|` with
/// `c = a^((k-2)/(2k+2))`; vanishes for every `a > 1`.
pub fn ell2_closure_check(k: u32, a: f64) -> Result<f64> {
    let (i, j) = ell2_integrals(k, a)?;
    let c = families::even_c(k, a);
    let s = (k as f64 * PI / (k as f64 + 1.0)).sin();
    Ok(2.0 * s * (i - c * c * j).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonexistenceCase {
    /// `γ = 1`, `η = dz/(zw)`, parameter `c > 0`
    Genus1Alt,
    /// `w³ = (z-1)²(z-a)²/z²`, `a > 1`
    EvenAltAGt1,
    /// same curve, `0 < a < 1`
    EvenAlt0LtALt1,
    /// same curve, `a < 0`
    EvenAltANeg,
}

impl NonexistenceCase {
    pub const ALL: [NonexistenceCase; 4] = [
        NonexistenceCase::Genus1Alt,
        NonexistenceCase::EvenAltAGt1,
        NonexistenceCase::EvenAlt0LtALt1,
        NonexistenceCase::EvenAltANeg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NonexistenceCase::Genus1Alt => "genus1_alt",
            NonexistenceCase::EvenAltAGt1 => "even_alt_a_gt_1",
            NonexistenceCase::EvenAlt0LtALt1 => "even_alt_0_lt_a_lt_1",
            NonexistenceCase::EvenAltANeg => "even_alt_a_neg",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        NonexistenceCase::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown case {s}")))
    }

    /// Default 64-point log-spaced grid of the case parameter.
    pub fn default_grid(self) -> Vec<f64> {
        match self {
            NonexistenceCase::Genus1Alt => log_grid(1e-3, 1e3, 64),
            NonexistenceCase::EvenAltAGt1 => log_grid(1e-3, 1e3, 64)
                .into_iter()
                .map(|x| 1.0 + x)
                .collect(),
            NonexistenceCase::EvenAlt0LtALt1 => log_grid(1e-3, 1.0 - 1e-3, 64),
            NonexistenceCase::EvenAltANeg => {
                log_grid(1e-3, 1e3, 64).into_iter().map(|x| -x).collect()
            }
        }
    }

    fn admits(self, p: f64) -> bool {
        match self {
            NonexistenceCase::Genus1Alt => p > 0.0,
            NonexistenceCase::EvenAltAGt1 => p > 1.0,
            NonexistenceCase::EvenAlt0LtALt1 => p > 0.0 && p < 1.0,
            NonexistenceCase::EvenAltANeg => p < 0.0,
        }
    }
}

/// `n` points from `lo` to `hi`, evenly spaced in `log`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (l, h) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (l + (h - l) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// One side-by-side evaluation of an obstructed period identity `L = c² R`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentitySample {
    /// The loop whose identity is evaluated.
    pub identity: &'static str,
    pub lhs: f64,
    /// Coefficient of `c²` on the right hand side.
    pub rhs: f64,
    /// Beta-function upper bound for `lhs`, where one applies.
    pub bound: Option<f64>,
    pub obstructed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstructionSample {
    pub parameter: f64,
    pub identities: Vec<IdentitySample>,
    pub obstructed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstructionReport {
    pub case: NonexistenceCase,
    pub samples: Vec<ObstructionSample>,
    /// For `a < 0`: the intervals where each beta bound is nonpositive and their overlap.
    pub coverage: Option<Coverage>,
    pub obstructed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coverage {
    /// `-(2a/3 + 1) B(1/3, 2/3) ≤ 0` on `[claim1_from, 0)`
    pub claim1_from: f64,
    /// `(-a)^(-1/3) (a + 2/3) B(1/3, 2/3) ≤ 0` on `(-∞, claim2_to]`
    pub claim2_to: f64,
    pub overlap: (f64, f64),
    pub covers_negative_axis: bool,
}

fn q(alpha: f64, beta_exp: f64, h: impl Fn(f64) -> f64 + Send + Sync) -> Result<f64> {
    Ok(integrate(&AlgebraicIntegrand::new(alpha, beta_exp, 0.0, 1.0, h))?.value)
}

fn third() -> f64 {
    1.0 / 3.0
}

/// The loop-`ℓ` identity for `0 < a < 1` and `a < 0`:
/// `-∫ [a ((1-t)²/(t²(1-at)))^⅓ + ((1-at)²/(t²(1-t)))^⅓] = c² ∫ (t(1-t)²(1-at)²)^-⅓`.
fn identity_small_a(a: f64) -> Result<(f64, f64)> {
    let t3 = third();
    let l1 = q(-2.0 * t3, 2.0 * t3, |t| (1.0 - a * t).powf(-t3))?;
    let l2 = q(-2.0 * t3, -t3, |t| (1.0 - a * t).powf(2.0 * t3))?;
    let r = q(-t3, -2.0 * t3, |t| (1.0 - a * t).powf(-2.0 * t3))?;
    Ok((-(a * l1 + l2), r))
}

/// The loop-`ℓ'` identity for `a < 0`:
/// `-∫ [((t-a)²/(t²(1-t)))^⅓ - ((1-t)²/(t²(t-a)))^⅓] = c² ∫ (t(1-t)²(t-a)²)^-⅓`.
fn identity_negative_a_second(a: f64) -> Result<(f64, f64)> {
    let t3 = third();
    let l1 = q(-2.0 * t3, -t3, |t| (t - a).powf(2.0 * t3))?;
    let l2 = q(-2.0 * t3, 2.0 * t3, |t| (t - a).powf(-t3))?;
    let r = q(-t3, -2.0 * t3, |t| (t - a).powf(-2.0 * t3))?;
    Ok((-(l1 - l2), r))
}

fn sample(identity: &'static str, (lhs, rhs): (f64, f64), bound: Option<f64>) -> IdentitySample {
    let bound_ok = bound.is_none_or(|b| b <= 0.0 && lhs <= b * (1.0 - 1e-12));
    IdentitySample {
        identity,
        lhs,
        rhs,
        bound,
        obstructed: lhs < 0.0 && rhs > 0.0 && bound_ok,
    }
}

/// Evaluate the obstructed identity (or identities) at each grid parameter.
pub fn nonexistence_report(case: NonexistenceCase, grid: &[f64]) -> Result<ObstructionReport> {
    if let Some(bad) = grid.iter().find(|&&p| !case.admits(p)) {
        return Err(Error::Invalid(format!(
            "{bad} lies outside the range of {}",
            case.name()
        )));
    }
    let b = beta(third(), 2.0 * third())?;
    let samples: Result<Vec<ObstructionSample>> = grid
        .par_iter()
        .map(|&p| {
            let identities = match case {
                NonexistenceCase::Genus1Alt => {
                    let lhs = -q(0.5, -0.5, |t| (1.0 + t).powf(-0.5))?;
                    let rhs = q(-0.5, 0.5, |t| (1.0 + t).sqrt())?;
                    // p is c here, the right hand side is c² times rhs
                    vec![sample("l'", (lhs, p * p * rhs), None)]
                }
                NonexistenceCase::EvenAltAGt1 => {
                    let t3 = third();
                    let l1 = q(-2.0 * t3, -t3, |t| (p - t).powf(2.0 * t3))?;
                    let l2 = q(-2.0 * t3, 2.0 * t3, |t| (p - t).powf(-t3))?;
                    let r = q(-t3, -2.0 * t3, |t| (p - t).powf(-2.0 * t3))?;
                    vec![sample("l", (-(l1 + l2), r), None)]
                }
                NonexistenceCase::EvenAlt0LtALt1 => vec![sample("l", identity_small_a(p)?, None)],
                NonexistenceCase::EvenAltANeg => {
                    let mut v = vec![];
                    if p >= -1.5 {
                        v.push(sample(
                            "l",
                            identity_small_a(p)?,
                            Some(-(2.0 * p / 3.0 + 1.0) * b),
                        ));
                    }
                    if p <= -2.0 / 3.0 {
                        let bound = (-p).powf(-third()) * (p + 2.0 / 3.0) * b;
                        v.push(sample("l'", identity_negative_a_second(p)?, Some(bound)));
                    }
                    v
                }
            };
            let obstructed = identities.iter().any(|s| s.obstructed);
            Ok(ObstructionSample {
                parameter: p,
                identities,
                obstructed,
            })
        })
        .collect();
    let samples = samples?;
    let coverage = (case == NonexistenceCase::EvenAltANeg).then(|| {
        let (from, to) = (-1.5, -2.0 / 3.0);
        Coverage {
            claim1_from: from,
            claim2_to: to,
            overlap: (from, to),
            covers_negative_axis: from <= to,
        }
    });
    let obstructed = !samples.is_empty()
        && samples.iter().all(|s| s.obstructed)
        && coverage.is_none_or(|c| c.covers_negative_axis);
    Ok(ObstructionReport {
        case,
        samples,
        coverage,
        obstructed,
    })
}

/// Parameters written by `solve` and read back by `verify` and `mesh`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvedParams {
    pub family: FamilyId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// `(a₂, …, a_{2γ})` for the Weber family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_values: Option<Vec<f64>>,
    pub residual: f64,
}

impl SolvedParams {
    pub fn surface(&self) -> Result<Surface> {
        let missing =
            |what: &str| Error::Invalid(format!("{} parameters lack {what}", self.family.name()));
        match self.family {
            FamilyId::GenusFamily => {
                Surface::genus_family(self.gamma.ok_or_else(|| missing("gamma"))?, self.c)
            }
            FamilyId::EvenFamily => {
                let k = self.k.ok_or_else(|| missing("k"))?;
                let a = self.a.ok_or_else(|| missing("a"))?;
                Surface::even_family_with_c(k, a, self.c)
            }
            FamilyId::WeberFamily => Surface::weber_family(
                self.gamma.ok_or_else(|| missing("gamma"))?,
                self.c,
                self.a_values
                    .as_deref()
                    .ok_or_else(|| missing("a_values"))?,
            ),
            FamilyId::Catenoid => Ok(Surface::catenoid()),
        }
    }

    pub fn from_surface(s: &Surface, residual: f64) -> SolvedParams {
        let (gamma, k, a, a_values) = match s.family {
            FamilyId::GenusFamily => (Some(s.param), None, None, None),
            FamilyId::EvenFamily => (None, Some(s.param), s.a.first().copied(), None),
            FamilyId::WeberFamily => (Some(s.param), None, None, Some(s.a.clone())),
            FamilyId::Catenoid => (None, None, None, None),
        };
        SolvedParams {
            family: s.family,
            gamma,
            k,
            c: s.c,
            a,
            a_values,
            residual,
        }
    }
}

/// Largest period residual of the surface over its generators, computed by
/// contour integration.
pub fn closure_residual(s: &Surface) -> Result<f64> {
    let exprs = [s.data.eta.clone(), s.data.g2_eta()?, s.data.g_eta()?];
    let opts = IntegrationOptions::default();
    let mut worst: f64 = 0.0;
    for (_, p) in s.generators()? {
        let (v, _) = integrate_many(&s.curve, &exprs, &p, &opts)?;
        worst = worst.max((v[0] - v[1].conj()).norm()).max(v[2].re.abs());
    }
    Ok(worst)
}

/// Solve the genus family and attach the contour-integral residual.
pub fn solve_genus_family(gamma: u32) -> Result<(Surface, f64)> {
    let s = Surface::genus_family(gamma, solve_c(gamma)?)?;
    let r = closure_residual(&s)?;
    Ok((s, r))
}

/// Result of the Weber solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeberSolution {
    pub gamma: u32,
    pub c: f64,
    /// `(a₂, …, a_{2γ})`
    pub a: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Unknowns `(ln c, ln(a₂ - a₁), …)` keep `c > 0` and the `a_i` increasing.
fn weber_unpack(x: &[f64]) -> (f64, Vec<f64>) {
    let c = x[0].exp();
    let mut a = vec![];
    let mut prev = 1.0;
    for u in &x[1..] {
        prev += u.exp();
        a.push(prev);
    }
    (c, a)
}

fn weber_pack(c: f64, a: &[f64]) -> Vec<f64> {
    let mut x = vec![c.ln()];
    let mut prev = 1.0;
    for &v in a {
        x.push((v - prev).ln());
        prev = v;
    }
    x
}

/// Real and imaginary parts of `∮η - conj ∮g²η` on every generator.
fn weber_residuals(gamma: u32, x: &[f64]) -> Result<Vec<f64>> {
    let (c, a) = weber_unpack(x);
    let s = Surface::weber_family(gamma, c, &a)?;
    let exprs = [s.data.eta.clone(), s.data.g2_eta()?];
    let opts = IntegrationOptions {
        tol: 1e-12,
        ..Default::default()
    };
    let mut out = vec![];
    for (_, p) in s.generators()? {
        let (v, _) = integrate_many(&s.curve, &exprs, &p, &opts)?;
        let r = v[0] - v[1].conj();
        out.push(r.re);
        out.push(r.im);
    }
    Ok(out)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Default starting point of the Weber solve.
pub fn weber_initial_guess(gamma: u32) -> (f64, Vec<f64>) {
    (1.0, (2..=2 * gamma).map(|i| i as f64).collect())
}

/// Damped Gauss-Newton (Levenberg-Marquardt) on the period residuals, with
/// a forward-difference Jacobian.
pub fn weber_solve(gamma: u32, tol: f64, start: Option<(f64, Vec<f64>)>) -> Result<WeberSolution> {
    check_gamma(gamma)?;
    let (c0, a0) = start.unwrap_or_else(|| weber_initial_guess(gamma));
    if a0.len() != 2 * gamma as usize - 1 {
        return Err(Error::Invalid(format!(
            "expected {} starting values a_2..",
            2 * gamma - 1
        )));
    }
    let mut x = weber_pack(c0, &a0);
    let mut r = weber_residuals(gamma, &x)?;
    let mut lambda = 1e-3;
    let n = x.len();
    for it in 0..200 {
        if inf_norm(&r) < tol {
            let (c, a) = weber_unpack(&x);
            return Ok(WeberSolution {
                gamma,
                c,
                a,
                residual: inf_norm(&r),
                iterations: it,
            });
        }
        let cols: Result<Vec<Vec<f64>>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let h = 1e-7 * (1.0 + x[j].abs());
                let mut xp = x.clone();
                xp[j] += h;
                let rp = weber_residuals(gamma, &xp)?;
                Ok(rp.iter().zip(&r).map(|(p, q)| (p - q) / h).collect())
            })
            .collect();
        let cols = cols?;
        let jac = DMatrix::from_fn(r.len(), n, |i, j| cols[j][i]);
        let rv = DVector::from_vec(r.clone());
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &rv;
        let mut improved = false;
        for _ in 0..30 {
            let mut m = jtj.clone();
            for d in 0..n {
                m[(d, d)] += lambda * (1.0 + jtj[(d, d)]);
            }
            let Some(step) = m.lu().solve(&(-&jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let xn: Vec<f64> = x
                .iter()
                .zip(step.iter())
                .map(|(a, b)| a + b.clamp(-1.0, 1.0))
                .collect();
            if let Ok(rn) = weber_residuals(gamma, &xn) {
                let old: f64 = r.iter().map(|v| v * v).sum();
                let new: f64 = rn.iter().map(|v| v * v).sum();
                if new < old {
                    x = xn;
                    r = rn;
                    lambda = (lambda / 3.0).max(1e-12);
                    improved = true;
                    break;
                }
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    Err(Error::NoConvergence(format!(
        "Weber solve for gamma = {gamma} stopped with residual {:.3e}",
        inf_norm(&r)
    )))
}
