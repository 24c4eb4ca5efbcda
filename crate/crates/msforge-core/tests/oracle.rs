//! The real period integrals against the Simpson oracle in `common`.

mod common;

use common::{ell2_oracle, even_oracle, genus_oracle, relative};
use msforge_core::periods::{
    ell2_integrals, even_family_integrals, genus_family_integrals, solve_a,
};

fn assert_close(name: &str, got: f64, want: f64) {
    let rel = relative(got, want);
    assert!(
        rel < 1e-9,
        "{name}: library {got:.15e}, oracle {want:.15e}, relative {rel:.2e}"
    );
}

#[test]
fn genus_family_integrals_match_oracle() {
    for gamma in 1..=4u32 {
        let p = genus_family_integrals(gamma).unwrap();
        let (a, b) = genus_oracle(gamma);
        assert_close(&format!("A, gamma {gamma}"), p.get("A_gamma").unwrap(), a);
        assert_close(&format!("B, gamma {gamma}"), p.get("B_gamma").unwrap(), b);
    }
}

#[test]
fn even_family_integrals_match_oracle() {
    for k in [2u32, 4] {
        let solved = solve_a(k, 1e-12).unwrap().a;
        for a in [1.2, 1.5, solved, 3.0, 7.5] {
            let p = even_family_integrals(k, a).unwrap();
            let want = even_oracle(k, a);
            for (i, name) in ["A1", "A2", "A3"].iter().enumerate() {
                assert_close(
                    &format!("{name}, k {k}, a {a}"),
                    p.get(name).unwrap(),
                    want[i],
                );
            }
        }
    }
}

#[test]
fn ell2_integrals_match_oracle() {
    for k in [2u32, 4] {
        for a in [1.3, 2.0, 5.0] {
            let (i, j) = ell2_integrals(k, a).unwrap();
            let (io, jo) = ell2_oracle(k, a);
            assert_close(&format!("I, k {k}, a {a}"), i, io);
            assert_close(&format!("J, k {k}, a {a}"), j, jo);
        }
    }
}
