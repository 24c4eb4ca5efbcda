//! Independent oracle for the real period integrals: endpoint substitutions
//! that remove the algebraic singularities, followed by the composite
//! Simpson rule on a million panels.
#![allow(dead_code)]

const PANELS: usize = 1_000_000;

fn simpson<F: Fn(f64) -> f64>(f: F, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let val = |u: f64| {
        let v = f(u);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut s = val(0.0) + val(1.0);
    for i in 1..n {
        s += val(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `∫_lo^hi f` for `f(t, t - lo, hi - t)` behaving like `(t - lo)^alpha` and
/// `(hi - t)^beta` at the ends. Each half is mapped with `t - end ∝ u^p`,
/// `p = 4 / (1 + exponent)`, which turns the integrand into `u³ × smooth`;
/// the distances to the ends are passed exactly.
pub fn oracle<F: Fn(f64, f64, f64) -> f64 + Copy>(
    f: F,
    lo: f64,
    hi: f64,
    alpha: f64,
    beta: f64,
) -> f64 {
    let (len, half) = (hi - lo, 0.5 * (hi - lo));
    let p = 4.0 / (1.0 + alpha);
    let q = 4.0 / (1.0 + beta);
    let left = simpson(
        |u| {
            let d = half * u.powf(p);
            f(lo + d, d, len - d) * half * p * u.powf(p - 1.0)
        },
        PANELS,
    );
    let right = simpson(
        |u| {
            let d = half * u.powf(q);
            f(hi - d, len - d, d) * half * q * u.powf(q - 1.0)
        },
        PANELS,
    );
    left + right
}

pub fn relative(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

/// `(A, B)` of the genus family.
pub fn genus_oracle(gamma: u32) -> (f64, f64) {
    let g = gamma as f64;
    let n = g + 1.0;
    let a = g / (g + 2.0)
        * oracle(
            |t, _, s| (t * (s * (1.0 + t)).powf(g)).powf(-1.0 / n),
            0.0,
            1.0,
            -1.0 / n,
            -g / n,
        );
    let b = 2.0
        * oracle(
            |t, _, s| (t / (s * (1.0 + t))).powf(1.0 / n),
            0.0,
            1.0,
            1.0 / n,
            -1.0 / n,
        );
    (a, b)
}

/// `(A1, A2, A3)` of the even family.
pub fn even_oracle(k: u32, a: f64) -> [f64; 3] {
    let kf = k as f64;
    let n = kf + 1.0;
    let a1 = oracle(
        |t, _, s| s.powf(1.0 / n) / (t.powf(2.0 / n) * (a - t).powf(1.0 / n)),
        0.0,
        1.0,
        -2.0 / n,
        1.0 / n,
    );
    let a2 = oracle(
        |t, _, s| (a - t).powf(kf / n) / (t.powf(2.0 / n) * s.powf(kf / n)),
        0.0,
        1.0,
        -2.0 / n,
        -kf / n,
    );
    let a3 = oracle(
        |t, _, s| s.powf(kf / n) / (t.powf((kf - 1.0) / n) * (a - t).powf(kf / n)),
        0.0,
        1.0,
        -(kf - 1.0) / n,
        kf / n,
    );
    [a1, a2, a3]
}

/// `(I, J)` over `[1, a]` for the second loop of the even family.
pub fn ell2_oracle(k: u32, a: f64) -> (f64, f64) {
    let kf = k as f64;
    let n = kf + 1.0;
    let i = oracle(
        |t, l, h| l.powf(-kf / n) * h.powf(kf / n) * t.powf(-(kf + 3.0) / n),
        1.0,
        a,
        -kf / n,
        kf / n,
    );
    let j = oracle(
        |t, l, h| l.powf(kf / n) * h.powf(-kf / n) * t.powf(-(kf - 1.0) / n),
        1.0,
        a,
        kf / n,
        -kf / n,
    );
    (i, j)
}
