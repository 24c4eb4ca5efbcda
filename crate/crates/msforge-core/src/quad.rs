//! Quadrature on real intervals for integrands with algebraic endpoint
//! singularities `(t - lo)^alpha (hi - t)^beta h(t)`.
//!
//! The main scheme is tanh-sinh. The integrand is always handed the distance
//! to both endpoints separately so that `(1 - u)` never loses digits near the
//! right end. A Gauss-Jacobi rule is provided as an independent cross-check.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_LEVELS: usize = 12;

/// Half width of the tanh-sinh window in the `s` variable. Past this the
/// nodes sit closer than ~1e-270 to the endpoints.
const S_MAX: f64 = 6.0;

/// Result of a quadrature together with an a-posteriori error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// `∫_lo^hi (t-lo)^alpha (hi-t)^beta h(t) dt`.
pub struct AlgebraicIntegrand<'a> {
    pub alpha: f64,
    pub beta: f64,
    pub lo: f64,
    pub hi: f64,
    pub smooth: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
}

impl<'a> AlgebraicIntegrand<'a> {
    pub fn new(
        alpha: f64,
        beta: f64,
        lo: f64,
        hi: f64,
        smooth: impl Fn(f64) -> f64 + Send + Sync + 'a,
    ) -> Self {
        AlgebraicIntegrand {
            alpha,
            beta,
            lo,
            hi,
            smooth: Box::new(smooth),
        }
    }

    /// Pure power weight on `(0, 1)`, i.e. the beta integrand.
    pub fn beta_weight(alpha: f64, beta: f64) -> Self {
        AlgebraicIntegrand::new(alpha, beta, 0.0, 1.0, |_| 1.0)
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > -1.0) || !(self.beta > -1.0) {
            return Err(Error::Invalid(format!(
                "endpoint exponents must exceed -1, got ({}, {})",
                self.alpha, self.beta
            )));
        }
        if !(self.hi > self.lo) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::Invalid(format!(
                "bad interval ({}, {})",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

/// Integrate with the default tolerance and level budget.
pub fn integrate(f: &AlgebraicIntegrand<'_>) -> Result<Estimate> {
    integrate_tol(f, DEFAULT_TOL)
}

pub fn integrate_tol(f: &AlgebraicIntegrand<'_>, tol: f64) -> Result<Estimate> {
    f.validate()?;
    let len = f.hi - f.lo;
    let scale = len.powf(1.0 + f.alpha + f.beta);
    let est = tanh_sinh(
        |u, v| {
            let t = if u < 0.5 {
                f.lo + len * u
            } else {
                f.hi - len * v
            };
            u.powf(f.alpha) * v.powf(f.beta) * (f.smooth)(t)
        },
        tol,
        DEFAULT_MAX_LEVELS,
    )?;
    Ok(Estimate {
        value: est.value * scale,
        error: est.error * scale.abs(),
        ..est
    })
}

/// Tanh-sinh on `(0, 1)`. The closure receives `(u, 1 - u)`, both computed
/// without cancellation.
pub fn tanh_sinh<F: Fn(f64, f64) -> f64>(f: F, tol: f64, max_levels: usize) -> Result<Estimate> {
    let node = |s: f64| -> Option<f64> {
        let q = PI * s.sinh();
        // u = 1/(1+e^-q), v = 1 - u = 1/(1+e^q)
        let (u, v) = if q >= 0.0 {
            let e = (-q).exp();
            (1.0 / (1.0 + e), e / (1.0 + e))
        } else {
            let e = q.exp();
            (e / (1.0 + e), 1.0 / (1.0 + e))
        };
        if u == 0.0 || v == 0.0 {
            return None;
        }
        let weight = PI * s.cosh() * u * v;
        let y = f(u, v) * weight;
        if y.is_finite() {
            Some(y)
        } else {
            None
        }
    };

    let mut h = 1.0;
    let mut evaluations = 0usize;
    let mut sum = 0.0;
    let n0 = (S_MAX / h) as i64;
    for k in -n0..=n0 {
        if let Some(y) = node(k as f64 * h) {
            sum += y;
        }
        evaluations += 1;
    }
    let mut prev = sum * h;
    let mut err = f64::INFINITY;
    for level in 1..=max_levels {
        h *= 0.5;
        let n = (S_MAX / h) as i64;
        let mut k = -n + if n % 2 == 0 { 1 } else { 0 };
        while k <= n {
            if let Some(y) = node(k as f64 * h) {
                sum += y;
            }
            evaluations += 1;
            k += 2;
        }
        let cur = sum * h;
        err = (cur - prev).abs();
        prev = cur;
        if level >= 3 && err <= tol * (1.0 + cur.abs()) {
            return Ok(Estimate {
                value: cur,
                error: err,
                evaluations,
            });
        }
    }
    if err <= 1e3 * tol * (1.0 + prev.abs()) {
        // close enough to report, flag through the estimate
        return Ok(Estimate {
            value: prev,
            error: err,
            evaluations,
        });
    }
    Err(Error::NoConvergence(format!(
        "tanh-sinh stalled after {max_levels} levels, last difference {err:.3e}"
    )))
}

/// `ln B(x, y)`.
pub fn ln_beta(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0) || !(y > 0.0) {
        return Err(Error::Invalid(format!(
            "beta needs positive arguments, got ({x}, {y})"
        )));
    }
    Ok(ln_gamma(x) + ln_gamma(y) - ln_gamma(x + y))
}

/// The Euler beta function.
pub fn beta(x: f64, y: f64) -> Result<f64> {
    ln_beta(x, y).map(f64::exp)
}

/// Gauss-Jacobi rule for the weight `u^alpha (1-u)^beta` on `(0, 1)`,
/// via Golub-Welsch.
pub fn gauss_jacobi(n: usize, alpha: f64, beta_exp: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Ok((vec![], vec![]));
    }
    if !(alpha > -1.0) || !(beta_exp > -1.0) {
        return Err(Error::Invalid("Jacobi exponents must exceed -1".into()));
    }
    // On [-1, 1] with x = 2u - 1 the weight is (1-x)^a (1+x)^b, a = beta, b = alpha.
    let (a, b) = (beta_exp, alpha);
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let k = i as f64;
        let s = 2.0 * k + a + b;
        let diag = if i == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        jm[(i, i)] = diag;
        if i + 1 < n {
            let m = k + 1.0;
            let s = 2.0 * m + a + b;
            let off2 = if i == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
            } else {
                4.0 * m * (m + a) * (m + b) * (m + a + b) / (s * s * (s + 1.0) * (s - 1.0))
            };
            let off = off2.sqrt();
            jm[(i, i + 1)] = off;
            jm[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(jm);
    let mu0 = beta(alpha + 1.0, beta_exp + 1.0)?;
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (0.5 * (1.0 + eig.eigenvalues[i]), mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(pairs.into_iter().unzip())
}

/// Gauss-Legendre nodes and weights on `(0, 1)`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 16 {
        return gl16().clone();
    }
    gauss_jacobi(n, 0.0, 0.0).expect("legendre")
}

/// Borrowed 16-point Gauss-Legendre rule on `(0, 1)`.
pub fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static GL16: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    GL16.get_or_init(|| gauss_jacobi(16, 0.0, 0.0).expect("legendre"))
}

/// Integrate with an `n`-point Gauss-Jacobi rule.
pub fn integrate_jacobi(f: &AlgebraicIntegrand<'_>, n: usize) -> Result<f64> {
    f.validate()?;
    let (x, w) = gauss_jacobi(n, f.alpha, f.beta)?;
    let len = f.hi - f.lo;
    let s: f64 = x
        .iter()
        .zip(&w)
        .map(|(u, wi)| wi * (f.smooth)(f.lo + len * u))
        .sum();
    Ok(s * len.powf(1.0 + f.alpha + f.beta))
}

/// Sandwich bounds on the even family's period defect
/// `k A1 + 2 a^((k-2)/(k+1)) A3 - A2`, obtained by freezing the `(a - t)`
/// factors at `a` and `a - 1`.
pub fn period_defect_bounds(k: u32, a: f64) -> Result<(f64, f64)> {
    if k < 2 || !k.is_multiple_of(2) {
        return Err(Error::Invalid(format!(
            "k must be even and at least 2, got {k}"
        )));
    }
    if !(a > 1.0) {
        return Err(Error::Invalid(format!("a must exceed 1, got {a}")));
    }
    let kf = k as f64;
    let n = kf + 1.0;
    let b1 = beta((kf - 1.0) / n, (kf + 2.0) / n)?;
    let b2 = beta((kf - 1.0) / n, 1.0 / n)?;
    let b3 = beta(2.0 / n, (2.0 * kf + 1.0) / n)?;
    let p = a.powf((kf - 2.0) / n);
    let am = a - 1.0;
    let lower = kf * a.powf(-1.0 / n) * b1 + 2.0 * p * a.powf(-kf / n) * b3 - a.powf(kf / n) * b2;
    let upper =
        kf * am.powf(-1.0 / n) * b1 + 2.0 * p * am.powf(-kf / n) * b3 - am.powf(kf / n) * b2;
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_known_values() {
        assert!((beta(1.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((beta(0.5, 0.5).unwrap() - PI).abs() < 1e-13);
        let (x, y) = (1.0 / 3.0, 2.0 / 3.0);
        let lhs = beta(x, y + 1.0).unwrap();
        let rhs = y / (x + y) * beta(x, y).unwrap();
        assert!((lhs - rhs).abs() < 1e-13 * rhs);
        assert!(beta(0.0, 1.0).is_err());
    }

    #[test]
    fn arcsine_weight_gives_pi() {
        let e = integrate(&AlgebraicIntegrand::beta_weight(-0.5, -0.5)).unwrap();
        assert!((e.value - PI).abs() < 1e-12, "{e:?}");
        let one = integrate(&AlgebraicIntegrand::beta_weight(0.0, 0.0)).unwrap();
        assert!((one.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_integrable_exponent() {
        assert!(integrate(&AlgebraicIntegrand::beta_weight(-1.0, 0.0)).is_err());
    }

    #[test]
    fn jacobi_matches_beta() {
        for &(a, b) in &[(-0.5, -0.5), (-0.75, 0.2), (1.5, -0.9), (0.0, 0.0)] {
            let (_, w) = gauss_jacobi(20, a, b).unwrap();
            let s: f64 = w.iter().sum();
            let exact = beta(a + 1.0, b + 1.0).unwrap();
            assert!((s - exact).abs() < 1e-12 * exact, "{a} {b}");
        }
        // exactness on a polynomial: ∫ u^a (1-u)^b u^3 = B(a+4, b+1)
        let f = AlgebraicIntegrand::new(-0.3, 0.4, 0.0, 1.0, |t| t * t * t);
        let v = integrate_jacobi(&f, 8).unwrap();
        assert!((v - beta(3.7, 1.4).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn defect_bounds_limits() {
        let (lo, _) = period_defect_bounds(2, 1.0 + 1e-9).unwrap();
        let target = 2.0 * beta(2.0 / 3.0, 5.0 / 3.0).unwrap();
        assert!((lo - target).abs() < 1e-4, "{lo} vs {target}");
        let (_, hi) = period_defect_bounds(2, 1e6).unwrap();
        assert!(hi < 0.0);
        assert!(period_defect_bounds(3, 2.0).is_err());
        assert!(period_defect_bounds(2, 1.0).is_err());
    }
}
