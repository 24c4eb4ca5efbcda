use msforge_core::curve::{Expr, Monomial, SuperellipticCurve};
use msforge_core::families::{even_curve, genus_curve, Surface};
use msforge_core::geometry::{conformal_factor, gauss_curvature, gauss_normal};
use msforge_core::integrator::phi_from_data;
use msforge_core::quad::{beta, integrate, AlgebraicIntegrand};
use msforge_core::Complex64;
use proptest::prelude::*;

fn curve_for(which: u32) -> SuperellipticCurve {
    match which {
        0 => genus_curve(1).unwrap(),
        1 => genus_curve(2).unwrap(),
        2 => genus_curve(3).unwrap(),
        _ => even_curve(2, 2.0).unwrap(),
    }
}

fn monomial(curve: &SuperellipticCurve, zp: &[i32], wp: i32, differential: bool) -> Monomial {
    let mut m = Monomial::real(1.0).w(wp);
    for (f, p) in curve.factors().iter().zip(zp) {
        m = m.zc(f.root, *p);
    }
    if differential {
        m = m.dz();
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn integrate_matches_beta(alpha in -0.95f64..2.0, b in -0.95f64..2.0) {
        let est = integrate(&AlgebraicIntegrand::beta_weight(alpha, b)).unwrap();
        let exact = beta(alpha + 1.0, b + 1.0).unwrap();
        prop_assert!((est.value - exact).abs() <= 1e-10 * exact, "{} vs {}", est.value, exact);
        // the error estimate does not undersell the true error; the reference
        // comes from a Lanczos log-gamma and is itself good to about 1e-14
        prop_assert!((est.value - exact).abs() <= est.error + 1e-13 * exact);
    }

    #[test]
    fn integrate_is_affine_invariant(
        alpha in -0.9f64..1.5,
        b in -0.9f64..1.5,
        lo in -3.0f64..3.0,
        len in 0.1f64..5.0,
    ) {
        let hi = lo + len;
        let shifted = integrate(&AlgebraicIntegrand::new(alpha, b, lo, hi, |t| 1.0 / (10.0 + t))).unwrap();
        let unit = integrate(&AlgebraicIntegrand::new(alpha, b, 0.0, 1.0, move |s| 1.0 / (10.0 + lo + len * s)))
            .unwrap();
        let scaled = len.powf(1.0 + alpha + b) * unit.value;
        prop_assert!((shifted.value - scaled).abs() <= 1e-11 * scaled.abs());
    }

    #[test]
    fn local_order_is_additive(
        which in 0u32..4,
        zp1 in proptest::collection::vec(-3i32..4, 3),
        zp2 in proptest::collection::vec(-3i32..4, 3),
        wp1 in -3i32..4,
        wp2 in -3i32..4,
        differential in any::<bool>(),
    ) {
        let curve = curve_for(which);
        let m1 = monomial(&curve, &zp1, wp1, false);
        let m2 = monomial(&curve, &zp2, wp2, differential);
        let prod = Expr::from(m1.clone()).mul(&Expr::from(m2.clone())).unwrap();
        for b in curve.special_values() {
            for p in curve.points_over(b.z) {
                let o1 = curve.local_order(&m1.clone().into(), &p).unwrap();
                let o2 = curve.local_order(&m2.clone().into(), &p).unwrap();
                prop_assert_eq!(curve.local_order(&prod, &p).unwrap(), o1 + o2);
            }
        }
    }

    #[test]
    fn divisor_degree(
        which in 0u32..4,
        zp in proptest::collection::vec(-3i32..4, 3),
        wp in -3i32..4,
        differential in any::<bool>(),
    ) {
        let curve = curve_for(which);
        let e: Expr = monomial(&curve, &zp, wp, differential).into();
        let total: i64 = curve.divisor(&e).unwrap().iter().map(|(_, o)| o).sum();
        let expected = if differential { 2 * curve.genus() as i64 - 2 } else { 0 };
        prop_assert_eq!(total, expected);
    }

    #[test]
    fn immersion_is_conformal(
        which in 0u32..3,
        r in 0.2f64..5.0,
        t in 0.05f64..3.09,
        flip in any::<bool>(),
        sheet in 0usize..8,
    ) {
        let s = match which {
            0 => Surface::catenoid(),
            1 => Surface::genus_family(1, 0.6).unwrap(),
            _ => Surface::even_family(2, 1.8).unwrap(),
        };
        let z = Complex64::from_polar(r, if flip { -t } else { t });
        let ws = s.curve.w_values(z);
        let w = ws[sheet % ws.len()];
        let phi = phi_from_data(&s.data).unwrap().eval(z, w);
        let lambda = conformal_factor(&s.data, z, w);
        let iso: Complex64 = phi.iter().map(|p| p * p).sum();
        let norm2: f64 = phi.iter().map(|p| p.norm_sqr()).sum();
        // f_x = Re Φ and f_y = -Im Φ are orthogonal, of equal length λ
        prop_assert!(iso.norm() <= 1e-12 * norm2);
        prop_assert!((0.5 * norm2 - lambda * lambda).abs() <= 1e-12 * norm2);
        let n = gauss_normal(s.data.g_at(z, w));
        let unit = n.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((unit - 1.0).abs() < 1e-12);
        let dot_re: f64 = n.iter().zip(&phi).map(|(a, p)| a * p.re).sum();
        let dot_im: f64 = n.iter().zip(&phi).map(|(a, p)| a * p.im).sum();
        prop_assert!(dot_re.abs() <= 1e-12 * lambda && dot_im.abs() <= 1e-12 * lambda);
        prop_assert!(gauss_curvature(&s.data, &s.curve, z, w).unwrap() <= 0.0);
    }
}

#[test]
fn constant_gauss_map_is_flat() {
    let curve = SuperellipticCurve::new(1, vec![]).unwrap();
    let data = msforge_core::integrator::WeierstrassData {
        g: Monomial::real(0.5).into(),
        eta: Monomial::real(1.0).dz().into(),
    };
    for z in [Complex64::new(0.3, 0.2), Complex64::new(-2.0, 1.0)] {
        assert_eq!(
            gauss_curvature(&data, &curve, z, Complex64::new(1.0, 0.0)).unwrap(),
            0.0
        );
    }
}
