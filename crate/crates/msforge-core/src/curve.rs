//! Superelliptic curves `w^N = prod (z - r_i)^e_i`, their points, and
//! local orders and Laurent expansions of monomial expressions in `(z, w)`.
//!
//! Points over `z = inf` are handled through `z = 1/zeta`, which turns the
//! defining equation into one of the same shape with exponent `-sum e_i`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Roots closer than this are treated as equal.
pub const ROOT_EPS: f64 = 1e-12;
/// Default relative tolerance for the on-curve test.
pub const ON_CURVE_TOL: f64 = 1e-10;

/// A point of the extended complex line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ext {
    Finite(Complex64),
    Infinity,
}

impl Ext {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            Ext::Finite(z) => Some(z),
            Ext::Infinity => None,
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Finite(z) if z.im == 0.0 => write!(f, "{}", z.re),
            Ext::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            Ext::Infinity => write!(f, "inf"),
        }
    }
}

pub(crate) fn same_root(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= ROOT_EPS * (1.0 + a.norm().max(b.norm()))
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factor {
    pub root: Complex64,
    pub exp: i64,
}

/// A point of the compact curve. Over a special value of `z` the points are
/// numbered `0..gcd(N, e)`; over an ordinary value they are the `N` sheets,
/// numbered by `w = w0 * exp(2 pi i j / N)` with `w0` the principal root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub z: Ext,
    pub branch: usize,
    /// `Finite(0)` or `Infinity` at branch points, the actual value elsewhere.
    pub w: Ext,
    pub is_puncture: bool,
}

/// Ramification data over a special value of `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub z: Ext,
    pub exp: i64,
    /// Number of curve points over `z`.
    pub points: usize,
    /// Ramification multiplicity of each of them.
    pub multiplicity: u32,
}

/// Local structure at one point: `z - z0 = t^m` (or `z = t^-m` at infinity)
/// and `w = t^ord_w * lead * (1 + ...)`.
#[derive(Debug, Clone, Copy)]
struct LocalChart {
    z: Ext,
    m: u32,
    ord_w: i64,
    lead: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuperellipticCurve {
    sheets: u32,
    factors: Vec<Factor>,
    punctures: Vec<CurvePoint>,
}

impl SuperellipticCurve {
    /// Build a curve. Rejects repeated roots, zero exponents, reducible
    /// equations (all exponents sharing a factor with `N`) and non-integral
    /// genus. `sheets = 1` is allowed and gives the Riemann sphere.
    pub fn new(sheets: u32, factors: Vec<Factor>) -> Result<Self> {
        if sheets == 0 {
            return Err(Error::MalformedCurve("sheet count must be positive".into()));
        }
        for (i, f) in factors.iter().enumerate() {
            if f.exp == 0 {
                return Err(Error::MalformedCurve(format!("factor {i} has exponent 0")));
            }
            if !f.root.re.is_finite() || !f.root.im.is_finite() {
                return Err(Error::MalformedCurve(format!(
                    "factor {i} has a non-finite root"
                )));
            }
            for g in &factors[..i] {
                if same_root(f.root, g.root) {
                    return Err(Error::MalformedCurve(format!("repeated root {}", f.root)));
                }
            }
        }
        let n = sheets as i64;
        let mut common = n;
        for f in &factors {
            common = gcd(common, f.exp);
        }
        if sheets > 1 && common != 1 {
            return Err(Error::MalformedCurve(format!(
                "exponents and sheet count share the factor {common}; the curve is reducible"
            )));
        }
        let curve = SuperellipticCurve {
            sheets,
            factors,
            punctures: vec![],
        };
        curve.genus_checked()?;
        Ok(curve)
    }

    pub fn with_punctures(mut self, punctures: Vec<CurvePoint>) -> Self {
        self.punctures = punctures
            .into_iter()
            .map(|p| CurvePoint {
                is_puncture: true,
                ..p
            })
            .collect();
        self
    }

    pub fn sheets(&self) -> u32 {
        self.sheets
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn punctures(&self) -> &[CurvePoint] {
        &self.punctures
    }

    /// Exponent seen at `z = inf` in the coordinate `1/z`.
    pub fn exp_at_infinity(&self) -> i64 {
        -self.factors.iter().map(|f| f.exp).sum::<i64>()
    }

    /// Exponent of `(z - z0)` in the right hand side; zero for ordinary values.
    pub fn exp_at(&self, z: Ext) -> i64 {
        match z {
            Ext::Infinity => self.exp_at_infinity(),
            Ext::Finite(z0) => self
                .factors
                .iter()
                .find(|f| same_root(f.root, z0))
                .map_or(0, |f| f.exp),
        }
    }

    /// All values of `z` over which the cover may ramify, with their data.
    /// Includes roots whose exponent is a multiple of `N` (unramified).
    pub fn special_values(&self) -> Vec<BranchPoint> {
        let n = self.sheets as i64;
        let mut out: Vec<BranchPoint> = self
            .factors
            .iter()
            .map(|f| {
                let d = gcd(n, f.exp);
                BranchPoint {
                    z: Ext::Finite(f.root),
                    exp: f.exp,
                    points: d as usize,
                    multiplicity: (n / d) as u32,
                }
            })
            .collect();
        let e = self.exp_at_infinity();
        let d = gcd(n, e);
        out.push(BranchPoint {
            z: Ext::Infinity,
            exp: e,
            points: d as usize,
            multiplicity: (n / d) as u32,
        });
        out
    }

    /// Special values where the cover actually ramifies.
    pub fn branch_points(&self) -> Vec<BranchPoint> {
        self.special_values()
            .into_iter()
            .filter(|b| b.multiplicity > 1)
            .collect()
    }

    fn genus_checked(&self) -> Result<u32> {
        let n = self.sheets as i64;
        let ram: i64 = self
            .special_values()
            .iter()
            .map(|b| (b.multiplicity as i64 - 1) * b.points as i64)
            .sum();
        // 2 - 2g = 2N - ram
        let twice = ram - 2 * n + 2;
        if twice < 0 || twice % 2 != 0 {
            return Err(Error::MalformedCurve(format!(
                "Riemann-Hurwitz gives non-integral or negative genus ({twice}/2)"
            )));
        }
        Ok((twice / 2) as u32)
    }

    /// Genus of the smooth compactification.
    pub fn genus(&self) -> u32 {
        self.genus_checked().expect("validated at construction")
    }

    /// Euler characteristic of the compact curve.
    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus() as i64
    }

    /// `prod (z - r_i)^e_i`.
    pub fn rhs(&self, z: Complex64) -> Complex64 {
        self.factors
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, f| {
                acc * (z - f.root).powi(f.exp as i32)
            })
    }

    /// Principal `N`-th root of the right hand side, built factor by factor
    /// from principal logarithms.
    pub fn principal_w(&self, z: Complex64) -> Complex64 {
        let n = self.sheets as f64;
        let log: Complex64 = self
            .factors
            .iter()
            .map(|f| (z - f.root).ln() * f.exp as f64)
            .sum();
        (log / n).exp()
    }

    /// The `N` values of `w` over an ordinary `z`, ordered by sheet index.
    pub fn w_values(&self, z: Complex64) -> Vec<Complex64> {
        let w0 = self.principal_w(z);
        (0..self.sheets)
            .map(|j| w0 * root_of_unity(j as i64, self.sheets as i64))
            .collect()
    }

    /// Relative defect of the defining equation at `(z, w)`.
    pub fn equation_defect(&self, z: Complex64, w: Complex64) -> f64 {
        let lhs = w.powi(self.sheets as i32);
        let rhs = self.rhs(z);
        (lhs - rhs).norm() / (1.0 + lhs.norm().max(rhs.norm()))
    }

    pub fn is_on_curve(&self, z: Complex64, w: Complex64) -> bool {
        self.equation_defect(z, w) <= ON_CURVE_TOL
    }

    /// Newton polish of `w` onto the curve at fixed `z`.
    pub fn polish_w(&self, z: Complex64, w: Complex64) -> Complex64 {
        let n = self.sheets as i32;
        let rhs = self.rhs(z);
        let mut w = w;
        for _ in 0..2 {
            let wn1 = w.powi(n - 1);
            let step = (wn1 * w - rhs) / (wn1 * n as f64);
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            w -= step;
        }
        w
    }

    /// Minimum pairwise distance between finite special values, at least 1
    /// when there are fewer than two of them.
    pub fn min_special_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.factors.iter().enumerate() {
            for b in &self.factors[..i] {
                best = best.min((a.root - b.root).norm());
            }
        }
        if best.is_finite() {
            best
        } else {
            1.0
        }
    }

    /// The curve points lying over `z`.
    pub fn points_over(&self, z: Ext) -> Vec<CurvePoint> {
        let count = gcd(self.sheets as i64, self.exp_at(z));
        (0..count as usize)
            .map(|b| self.point(z, b).expect("valid branch"))
            .collect()
    }

    /// Point number `branch` over `z`.
    pub fn point(&self, z: Ext, branch: usize) -> Result<CurvePoint> {
        let chart = self.chart(z, branch)?;
        let w = if chart.ord_w > 0 {
            Ext::Finite(Complex64::new(0.0, 0.0))
        } else if chart.ord_w < 0 {
            Ext::Infinity
        } else {
            Ext::Finite(chart.lead)
        };
        Ok(CurvePoint {
            z,
            branch,
            w,
            is_puncture: self.is_puncture_at(z, branch),
        })
    }

    /// The point over an ordinary `z` whose `w` value is closest to `w`.
    pub fn point_at(&self, z: Complex64, w: Complex64) -> Result<CurvePoint> {
        if self.exp_at(Ext::Finite(z)) != 0 {
            return Err(Error::Invalid(format!(
                "z = {z} is a special value; use point()"
            )));
        }
        let vals = self.w_values(z);
        let (branch, _) = vals
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - w).norm().total_cmp(&(b.1 - w).norm()))
            .expect("at least one sheet");
        self.point(Ext::Finite(z), branch)
    }

    fn is_puncture_at(&self, z: Ext, branch: usize) -> bool {
        self.punctures.iter().any(|p| {
            p.branch == branch
                && match (p.z, z) {
                    (Ext::Infinity, Ext::Infinity) => true,
                    (Ext::Finite(a), Ext::Finite(b)) => same_root(a, b),
                    _ => false,
                }
        })
    }

    fn chart(&self, z: Ext, branch: usize) -> Result<LocalChart> {
        let n = self.sheets as i64;
        let e = self.exp_at(z);
        match z {
            Ext::Finite(z0) if e == 0 => {
                if branch >= n as usize {
                    return Err(Error::Invalid(format!("sheet {branch} out of range")));
                }
                let lead = self.principal_w(z0) * root_of_unity(branch as i64, n);
                Ok(LocalChart {
                    z,
                    m: 1,
                    ord_w: 0,
                    lead,
                })
            }
            _ => {
                let d = gcd(n, e);
                if branch >= d as usize {
                    return Err(Error::Invalid(format!(
                        "branch {branch} out of range over {z}"
                    )));
                }
                let m = (n / d) as u32;
                let lead_log: Complex64 = match z {
                    Ext::Finite(r) => self
                        .factors
                        .iter()
                        .filter(|f| !same_root(f.root, r))
                        .map(|f| (r - f.root).ln() * f.exp as f64)
                        .sum(),
                    Ext::Infinity => Complex64::new(0.0, 0.0),
                };
                let lead = (lead_log / n as f64).exp() * root_of_unity(branch as i64, n);
                Ok(LocalChart {
                    z,
                    m,
                    ord_w: e / d,
                    lead,
                })
            }
        }
    }

    /// Ramification multiplicity at a point (1 at ordinary points).
    pub fn multiplicity(&self, p: &CurvePoint) -> u32 {
        self.chart(p.z, p.branch).map_or(1, |c| c.m)
    }

    /// Order of `(z - sigma)` in the local coordinate at `p`.
    fn ord_linear(&self, chart: &LocalChart, sigma: Complex64) -> i64 {
        match chart.z {
            Ext::Infinity => -(chart.m as i64),
            Ext::Finite(z0) if same_root(z0, sigma) => chart.m as i64,
            Ext::Finite(_) => 0,
        }
    }

    fn ord_dz(chart: &LocalChart) -> i64 {
        match chart.z {
            Ext::Infinity => -(chart.m as i64) - 1,
            Ext::Finite(_) => chart.m as i64 - 1,
        }
    }

    /// Order of a single monomial at `p`, exact.
    pub fn monomial_order(&self, mono: &Monomial, p: &CurvePoint) -> Result<i64> {
        let chart = self.chart(p.z, p.branch)?;
        Ok(self.monomial_order_chart(mono, &chart))
    }

    fn monomial_order_chart(&self, mono: &Monomial, chart: &LocalChart) -> i64 {
        let mut ord = mono.w_power as i64 * chart.ord_w;
        for &(s, f) in &mono.z_factors {
            ord += f as i64 * self.ord_linear(chart, s);
        }
        if mono.differential {
            ord += Self::ord_dz(chart);
        }
        ord
    }

    /// Order of vanishing of `expr` at `p` (negative for poles), in the local
    /// uniformizing coordinate. Cancellation between terms is detected from
    /// the Laurent expansion.
    pub fn local_order(&self, expr: &Expr, p: &CurvePoint) -> Result<i64> {
        expr.check_homogeneous()?;
        if expr.terms.is_empty() {
            return Err(Error::Invalid(
                "order of the zero expression is undefined".into(),
            ));
        }
        let chart = self.chart(p.z, p.branch)?;
        let orders: Vec<i64> = expr
            .terms
            .iter()
            .map(|m| self.monomial_order_chart(m, &chart))
            .collect();
        let lo = *orders.iter().min().expect("nonempty");
        if orders.iter().filter(|&&o| o == lo).count() == 1 {
            return Ok(lo);
        }
        // Possible cancellation: expand far enough to see past it.
        let span = (orders.iter().max().unwrap() - lo) as usize;
        let terms = span + 4 * chart.m as usize + 8;
        let series = self.series_chart(expr, &chart, terms);
        let scale = series.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        match series
            .coeffs
            .iter()
            .position(|c| c.norm() > 1e-9 * scale.max(1e-300))
        {
            Some(k) if scale > 0.0 => Ok(series.val + k as i64),
            _ => Err(Error::Invalid(
                "expression vanishes to the computed order".into(),
            )),
        }
    }

    /// Truncated Laurent series of `expr` (a function, or a differential
    /// written against `dt`) in the local coordinate at `p`.
    pub fn puncture_series(&self, expr: &Expr, p: &CurvePoint, terms: usize) -> Result<Laurent> {
        expr.check_homogeneous()?;
        let chart = self.chart(p.z, p.branch)?;
        Ok(self.series_chart(expr, &chart, terms.max(1)))
    }

    fn series_chart(&self, expr: &Expr, chart: &LocalChart, terms: usize) -> Laurent {
        let mut total: Option<Laurent> = None;
        let lo = expr
            .terms
            .iter()
            .map(|m| self.monomial_order_chart(m, chart))
            .min()
            .unwrap_or(0);
        for mono in &expr.terms {
            let ord = self.monomial_order_chart(mono, chart);
            let need = terms.saturating_sub((ord - lo) as usize);
            if need == 0 {
                continue;
            }
            let s = self.monomial_series(mono, chart, need);
            total = Some(match total {
                None => s.extend_down(lo, terms),
                Some(t) => t.add(&s, terms),
            });
        }
        total.unwrap_or(Laurent {
            val: lo,
            coeffs: vec![Complex64::new(0.0, 0.0); terms],
        })
    }

    fn linear_series(&self, chart: &LocalChart, sigma: Complex64, terms: usize) -> Laurent {
        let m = chart.m as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); terms];
        match chart.z {
            Ext::Infinity => {
                coeffs[0] = Complex64::new(1.0, 0.0);
                if m < terms {
                    coeffs[m] = -sigma;
                }
                Laurent {
                    val: -(m as i64),
                    coeffs,
                }
            }
            Ext::Finite(z0) if same_root(z0, sigma) => {
                coeffs[0] = Complex64::new(1.0, 0.0);
                Laurent {
                    val: m as i64,
                    coeffs,
                }
            }
            Ext::Finite(z0) => {
                coeffs[0] = z0 - sigma;
                if m < terms {
                    coeffs[m] = Complex64::new(1.0, 0.0);
                }
                Laurent { val: 0, coeffs }
            }
        }
    }

    fn w_series(&self, chart: &LocalChart, terms: usize) -> Laurent {
        let n = self.sheets as f64;
        let m = chart.m as usize;
        let mut acc = vec![Complex64::new(0.0, 0.0); terms];
        acc[0] = chart.lead;
        for f in &self.factors {
            // each remaining factor contributes (1 + x t^m)^(e/N)
            let x = match chart.z {
                Ext::Infinity => -f.root,
                Ext::Finite(z0) if same_root(z0, f.root) => continue,
                Ext::Finite(z0) => Complex64::new(1.0, 0.0) / (z0 - f.root),
            };
            let mut base = vec![Complex64::new(0.0, 0.0); terms];
            base[0] = Complex64::new(1.0, 0.0);
            if m < terms {
                base[m] = x;
            }
            let p = unit_power(&base, f.exp as f64 / n);
            acc = convolve(&acc, &p, terms);
        }
        Laurent {
            val: chart.ord_w,
            coeffs: acc,
        }
    }

    fn monomial_series(&self, mono: &Monomial, chart: &LocalChart, terms: usize) -> Laurent {
        let mut s = Laurent::constant(mono.coeff, terms);
        for &(sigma, f) in &mono.z_factors {
            s = s.mul(&self.linear_series(chart, sigma, terms).powi(f), terms);
        }
        if mono.w_power != 0 {
            s = s.mul(&self.w_series(chart, terms).powi(mono.w_power), terms);
        }
        if mono.differential {
            let m = chart.m as f64;
            let dz = match chart.z {
                Ext::Infinity => {
                    Laurent::monomial(Complex64::new(-m, 0.0), -(chart.m as i64) - 1, terms)
                }
                Ext::Finite(_) => {
                    Laurent::monomial(Complex64::new(m, 0.0), chart.m as i64 - 1, terms)
                }
            };
            s = s.mul(&dz, terms);
        }
        s
    }

    /// Divisor of `expr`: every point where its order is nonzero, scanning
    /// the special values of the curve and the roots of the expression.
    pub fn divisor(&self, expr: &Expr) -> Result<Vec<(CurvePoint, i64)>> {
        let mut zs: Vec<Ext> = self.special_values().iter().map(|b| b.z).collect();
        for mono in &expr.terms {
            for &(s, _) in &mono.z_factors {
                let z = Ext::Finite(s);
                if !zs
                    .iter()
                    .any(|&q| matches!(q, Ext::Finite(a) if same_root(a, s)))
                {
                    zs.push(z);
                }
            }
        }
        if expr.terms.len() > 1 {
            return Err(Error::Invalid(
                "divisor is only computed for monomials".into(),
            ));
        }
        let mut out = vec![];
        for z in zs {
            for p in self.points_over(z) {
                let o = self.local_order(expr, &p)?;
                if o != 0 {
                    out.push((p, o));
                }
            }
        }
        Ok(out)
    }

    /// Degree of a meromorphic function: the sum of its pole orders.
    pub fn degree(&self, f: &Expr) -> Result<u32> {
        if f.is_differential() {
            return Err(Error::Invalid("degree is defined for functions".into()));
        }
        Ok(self
            .divisor(f)?
            .iter()
            .filter(|(_, o)| *o < 0)
            .map(|(_, o)| (-o) as u32)
            .sum())
    }

    /// `d log w / dz = (1/N) sum e_i / (z - r_i)`.
    pub fn dlog_w(&self, z: Complex64) -> Complex64 {
        let n = self.sheets as f64;
        self.factors
            .iter()
            .map(|f| f.exp as f64 / (z - f.root))
            .sum::<Complex64>()
            / n
    }
}

pub(crate) fn root_of_unity(j: i64, n: i64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (j.rem_euclid(n)) as f64 / n as f64)
}

fn convolve(a: &[Complex64], b: &[Complex64], terms: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); terms];
    for (i, x) in a.iter().enumerate().take(terms) {
        if *x == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(terms - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `(sum a_k t^k)^alpha` for `a_0 = 1`, by the J.C.P. Miller recurrence.
fn unit_power(a: &[Complex64], alpha: f64) -> Vec<Complex64> {
    let n = a.len();
    let mut g = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return g;
    }
    g[0] = Complex64::new(1.0, 0.0);
    for k in 1..n {
        let mut s = Complex64::new(0.0, 0.0);
        for j in 1..=k {
            s += a[j] * g[k - j] * ((alpha + 1.0) * j as f64 - k as f64);
        }
        g[k] = s / k as f64;
    }
    g
}

/// Truncated Laurent series `sum_k coeffs[k] t^(val + k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Laurent {
    pub val: i64,
    pub coeffs: Vec<Complex64>,
}

impl Laurent {
    pub fn constant(c: Complex64, terms: usize) -> Self {
        Laurent::monomial(c, 0, terms)
    }

    pub fn monomial(c: Complex64, power: i64, terms: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); terms.max(1)];
        coeffs[0] = c;
        Laurent { val: power, coeffs }
    }

    /// Coefficient of `t^power`, zero outside the stored window.
    pub fn coeff(&self, power: i64) -> Complex64 {
        let k = power - self.val;
        if k < 0 || k as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[k as usize]
        }
    }

    /// Coefficient of `t^-1`; the residue when the series is a differential.
    pub fn residue(&self) -> Complex64 {
        self.coeff(-1)
    }

    /// Leading power with a coefficient above `tol` relative to the largest.
    pub fn leading_power(&self, tol: f64) -> Option<i64> {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        self.coeffs
            .iter()
            .position(|c| c.norm() > tol * scale)
            .map(|k| self.val + k as i64)
    }

    fn mul(&self, other: &Laurent, terms: usize) -> Laurent {
        Laurent {
            val: self.val + other.val,
            coeffs: convolve(&self.coeffs, &other.coeffs, terms),
        }
    }

    fn powi(&self, p: i32) -> Laurent {
        let c0 = self.coeffs[0];
        let normalized: Vec<Complex64> = self.coeffs.iter().map(|c| c / c0).collect();
        let g = unit_power(&normalized, p as f64);
        let cp = c0.powi(p);
        Laurent {
            val: self.val * p as i64,
            coeffs: g.into_iter().map(|c| c * cp).collect(),
        }
    }

    fn extend_down(self, val: i64, terms: usize) -> Laurent {
        let shift = (self.val - val) as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); terms];
        for (k, c) in self.coeffs.into_iter().enumerate() {
            if k + shift < terms {
                coeffs[k + shift] = c;
            }
        }
        Laurent { val, coeffs }
    }

    fn add(mut self, other: &Laurent, terms: usize) -> Laurent {
        debug_assert!(other.val >= self.val);
        let shift = (other.val - self.val) as usize;
        for (k, c) in other.coeffs.iter().enumerate() {
            if k + shift < terms {
                self.coeffs[k + shift] += c;
            }
        }
        self
    }
}

/// `coeff * prod (z - sigma)^f * w^p`, times `dz` when `differential`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: Complex64,
    pub z_factors: Vec<(Complex64, i32)>,
    pub w_power: i32,
    pub differential: bool,
}

impl Monomial {
    pub fn new(coeff: Complex64) -> Self {
        Monomial {
            coeff,
            z_factors: vec![],
            w_power: 0,
            differential: false,
        }
    }

    pub fn real(c: f64) -> Self {
        Monomial::new(Complex64::new(c, 0.0))
    }

    /// Multiply by `(z - sigma)^f`.
    pub fn z(mut self, sigma: f64, f: i32) -> Self {
        self.push_factor(Complex64::new(sigma, 0.0), f);
        self
    }

    pub fn zc(mut self, sigma: Complex64, f: i32) -> Self {
        self.push_factor(sigma, f);
        self
    }

    pub fn w(mut self, p: i32) -> Self {
        self.w_power += p;
        self
    }

    pub fn dz(mut self) -> Self {
        self.differential = true;
        self
    }

    fn push_factor(&mut self, sigma: Complex64, f: i32) {
        if let Some(e) = self.z_factors.iter_mut().find(|e| same_root(e.0, sigma)) {
            e.1 += f;
        } else {
            self.z_factors.push((sigma, f));
        }
        self.z_factors.retain(|e| e.1 != 0);
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial> {
        if self.differential && other.differential {
            return Err(Error::Invalid("product of two differentials".into()));
        }
        let mut out = self.clone();
        out.coeff *= other.coeff;
        for &(s, f) in &other.z_factors {
            out.push_factor(s, f);
        }
        out.w_power += other.w_power;
        out.differential |= other.differential;
        Ok(out)
    }

    /// Value at `(z, w)`; for a differential, the coefficient of `dz`.
    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        let mut v = self.coeff;
        for &(s, f) in &self.z_factors {
            v *= (z - s).powi(f);
        }
        if self.w_power != 0 {
            v *= w.powi(self.w_power);
        }
        v
    }
}

/// A finite sum of monomials, all functions or all differentials.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Expr {
    pub terms: Vec<Monomial>,
}

impl From<Monomial> for Expr {
    fn from(m: Monomial) -> Self {
        Expr { terms: vec![m] }
    }
}

impl Expr {
    pub fn one() -> Expr {
        Monomial::real(1.0).into()
    }

    pub fn is_differential(&self) -> bool {
        self.terms.first().is_some_and(|m| m.differential)
    }

    fn check_homogeneous(&self) -> Result<()> {
        let d = self.is_differential();
        if self.terms.iter().any(|m| m.differential != d) {
            return Err(Error::Invalid("mixing functions and differentials".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Expr) -> Expr {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Expr { terms }
    }

    pub fn scale(&self, c: Complex64) -> Expr {
        Expr {
            terms: self
                .terms
                .iter()
                .map(|m| Monomial {
                    coeff: m.coeff * c,
                    ..m.clone()
                })
                .collect(),
        }
    }

    pub fn mul(&self, other: &Expr) -> Result<Expr> {
        let mut terms = vec![];
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.mul(b)?);
            }
        }
        Ok(Expr { terms })
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        self.terms.iter().map(|m| m.eval(z, w)).sum()
    }

    /// Exterior derivative of a function on the curve.
    pub fn d(&self, curve: &SuperellipticCurve) -> Result<Expr> {
        if self.is_differential() {
            return Err(Error::Invalid("d of a differential".into()));
        }
        let n = curve.sheets() as f64;
        let mut terms = vec![];
        for m in &self.terms {
            for &(s, f) in &m.z_factors {
                let mut t = m.clone().zc(s, -1).dz();
                t.coeff *= f as f64;
                terms.push(t);
            }
            if m.w_power != 0 {
                for fac in curve.factors() {
                    let mut t = m.clone().zc(fac.root, -1).dz();
                    t.coeff *= m.w_power as f64 * fac.exp as f64 / n;
                    terms.push(t);
                }
            }
        }
        Ok(Expr { terms })
    }
}

/// JSON form of a curve.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CurveSpec {
    pub sheets: u32,
    pub factors: Vec<FactorSpec>,
    #[serde(default)]
    pub punctures: Vec<PointSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FactorSpec {
    pub root: RootSpec,
    pub exp: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PointSpec {
    pub z: RootSpec,
    #[serde(default)]
    pub branch: usize,
}

/// `[re, im]` or the string `"inf"`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum RootSpec {
    Finite([f64; 2]),
    Named(String),
}

impl RootSpec {
    fn to_ext(&self) -> Result<Ext> {
        match self {
            RootSpec::Finite([re, im]) => Ok(Ext::Finite(Complex64::new(*re, *im))),
            RootSpec::Named(s) if s == "inf" => Ok(Ext::Infinity),
            RootSpec::Named(s) => Err(Error::MalformedCurve(format!("unknown root {s:?}"))),
        }
    }

    fn from_ext(z: Ext) -> RootSpec {
        match z {
            Ext::Finite(c) => RootSpec::Finite([c.re, c.im]),
            Ext::Infinity => RootSpec::Named("inf".into()),
        }
    }
}

impl CurveSpec {
    /// Validate and build. An explicit `"inf"` factor must carry the
    /// exponent implied by the finite ones.
    pub fn build(&self) -> Result<SuperellipticCurve> {
        let mut factors = vec![];
        let mut at_inf = None;
        for f in &self.factors {
            match f.root.to_ext()? {
                Ext::Finite(r) => factors.push(Factor {
                    root: r,
                    exp: f.exp,
                }),
                Ext::Infinity => at_inf = Some(f.exp),
            }
        }
        let curve = SuperellipticCurve::new(self.sheets, factors)?;
        if let Some(e) = at_inf {
            if e != curve.exp_at_infinity() {
                return Err(Error::MalformedCurve(format!(
                    "exponent {e} at infinity disagrees with the finite factors ({})",
                    curve.exp_at_infinity()
                )));
            }
        }
        let mut punctures = vec![];
        for p in &self.punctures {
            punctures.push(curve.point(p.z.to_ext()?, p.branch)?);
        }
        Ok(curve.with_punctures(punctures))
    }

    pub fn from_curve(curve: &SuperellipticCurve) -> CurveSpec {
        CurveSpec {
            sheets: curve.sheets(),
            factors: curve
                .factors()
                .iter()
                .map(|f| FactorSpec {
                    root: RootSpec::from_ext(Ext::Finite(f.root)),
                    exp: f.exp,
                })
                .collect(),
            punctures: curve
                .punctures()
                .iter()
                .map(|p| PointSpec {
                    z: RootSpec::from_ext(p.z),
                    branch: p.branch,
                })
                .collect(),
        }
    }
}
