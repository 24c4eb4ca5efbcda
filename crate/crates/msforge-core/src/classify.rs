//! Ramification data of a two-ended surface with a large symmetry group.
//!
//! A cyclic group `R` of order `n` acting with quotient the sphere gives
//! `2γ = n Σ (1 - 1/m_i)` over the extra branch values; the full group
//! `Δ₀` of order `2(γ+1)` gives `4γ + 2 = 2(γ+1) Σ (1 - 1/m_i)` when it swaps
//! the two ends and `2γ = 2(γ+1) Σ (1 - 1/m_i)` when it does not. The
//! enumeration below solves these exactly over all admissible multiplicity
//! tuples.

use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::periods::NonexistenceCase;

type Q = Ratio<i64>;

/// Which identity a case solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    /// `2γ = |R| Σ (1 - 1/m_i)`
    Cyclic,
    /// `4γ + 2 = |Δ₀| Σ (1 - 1/m_i)`, ends exchanged
    Swap,
    /// `2γ = |Δ₀| Σ (1 - 1/m_i)`, ends fixed
    NoSwap,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RamificationCase {
    pub kind: CaseKind,
    pub gamma: u32,
    /// `|R|` or `|Δ₀|`
    pub order: u32,
    /// Multiplicities, sorted ascending; their count is `t` (or `s`).
    pub m: Vec<u32>,
}

impl RamificationCase {
    pub fn count(&self) -> usize {
        self.m.len()
    }

    /// Left and right hand sides of the defining identity, exactly.
    pub fn sides(&self) -> (Q, Q) {
        let g = self.gamma as i64;
        let lhs = match self.kind {
            CaseKind::Cyclic | CaseKind::NoSwap => Q::from_integer(2 * g),
            CaseKind::Swap => Q::from_integer(4 * g + 2),
        };
        let sum: Q = self
            .m
            .iter()
            .map(|&m| Q::from_integer(1) - Q::new(1, m as i64))
            .sum();
        (lhs, sum * Q::from_integer(self.order as i64))
    }

    pub fn holds(&self) -> bool {
        let (l, r) = self.sides();
        l == r
    }
}

fn target(kind: CaseKind, gamma: u32, order: u32) -> Q {
    let g = gamma as i64;
    let lhs = match kind {
        CaseKind::Cyclic | CaseKind::NoSwap => 2 * g,
        CaseKind::Swap => 4 * g + 2,
    };
    Q::new(lhs, order as i64)
}

/// All sorted tuples `2 ≤ m₁ ≤ … ≤ m_t ≤ max` with `Σ (1 - 1/m_i) = want`.
/// The last entry is solved for rather than searched.
fn tuples(t: usize, max: u32, want: Q) -> Vec<Vec<u32>> {
    fn rec(t: usize, lo: u32, max: u32, want: Q, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let one = Q::from_integer(1);
        if t == 1 {
            // 1 - 1/m = want  =>  m = 1 / (1 - want)
            let rest = one - want;
            if rest > Q::from_integer(0) && rest.numer() == &1 {
                let m = *rest.denom();
                if m >= lo as i64 && m <= max as i64 {
                    let mut v = prefix.clone();
                    v.push(m as u32);
                    out.push(v);
                }
            }
            return;
        }
        for m in lo..=max {
            let part = one - Q::new(1, m as i64);
            // the remaining t-1 entries each contribute at least `part`
            if part * Q::from_integer(t as i64) > want {
                break;
            }
            prefix.push(m);
            rec(t - 1, m, max, want - part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = vec![];
    rec(t, 2, max, want, &mut vec![], &mut out);
    out
}

/// Every cyclic case for `γ`, brute forced over `t ≤ 4` and the three
/// possible orders; solutions exist only for `t ≤ 3`.
pub fn enumerate_r_cases(gamma: u32) -> Result<Vec<RamificationCase>> {
    if gamma == 0 {
        return Err(Error::Invalid("gamma must be at least 1".into()));
    }
    let mut out = vec![];
    for order in [gamma + 1, 2 * (gamma + 1), 4 * (gamma + 1)] {
        for t in 1..=4 {
            for m in tuples(t, order, target(CaseKind::Cyclic, gamma, order)) {
                out.push(RamificationCase {
                    kind: CaseKind::Cyclic,
                    gamma,
                    order,
                    m,
                });
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Cases for the full group of order `2(γ+1)`: with `swap` the ends are
/// exchanged, otherwise fixed.
pub fn enumerate_delta0_cases(gamma: u32, swap: bool) -> Result<Vec<RamificationCase>> {
    if gamma == 0 {
        return Err(Error::Invalid("gamma must be at least 1".into()));
    }
    let kind = if swap {
        CaseKind::Swap
    } else {
        CaseKind::NoSwap
    };
    let order = 2 * (gamma + 1);
    let mut out = vec![];
    for s in 1..=4 {
        for m in tuples(s, order, target(kind, gamma, order)) {
            out.push(RamificationCase {
                kind,
                gamma,
                order,
                m,
            });
        }
    }
    out.sort();
    Ok(out)
}

/// Cases compatible with a cyclic cover of order `γ+1` written with
/// exponents prime to `γ+1`, i.e. fully ramified at every branch value.
/// Cases of other kinds or orders pass through unchanged.
pub fn coprime_view(cases: &[RamificationCase]) -> Vec<RamificationCase> {
    cases
        .iter()
        .filter(|c| {
            c.kind != CaseKind::Cyclic
                || c.order != c.gamma + 1
                || c.m.iter().all(|&m| m == c.order)
        })
        .cloned()
        .collect()
}

/// One table: its number and rows over a range of `γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub table: u32,
    pub title: String,
    pub rows: Vec<RamificationCase>,
}

/// Tables 4 to 8 (cyclic `t = 1, 2, 3`; swap; no swap) for `γ` in `1..=max_gamma`.
pub fn tables(max_gamma: u32) -> Result<Vec<Table>> {
    let mut t: Vec<Table> = [
        (4, "cyclic, t = 1"),
        (5, "cyclic, t = 2"),
        (6, "cyclic, t = 3"),
        (7, "full group, ends exchanged"),
        (8, "full group, ends fixed"),
    ]
    .into_iter()
    .map(|(n, title)| Table {
        table: n,
        title: title.to_string(),
        rows: vec![],
    })
    .collect();
    for g in 1..=max_gamma {
        for c in enumerate_r_cases(g)? {
            let idx = match c.count() {
                1 => 0,
                2 => 1,
                3 => 2,
                n => {
                    return Err(Error::Invalid(format!(
                        "unexpected cyclic case with {n} branch values"
                    )))
                }
            };
            t[idx].rows.push(c);
        }
        t[3].rows.extend(enumerate_delta0_cases(g, true)?);
        t[4].rows.extend(enumerate_delta0_cases(g, false)?);
    }
    Ok(t)
}

/// Aligned text rendering of a table.
pub fn render_table(t: &Table) -> String {
    let mut s = format!("Table {}: {}\n", t.table, t.title);
    let _ = writeln!(s, "{:>6} {:>6}  m", "gamma", "order");
    for r in &t.rows {
        let m: Vec<String> = r.m.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{:>6} {:>6}  ({})", r.gamma, r.order, m.join(", "));
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateStatus {
    Constructed,
    ExcludedByPeriod,
    ExcludedByGenus,
    ExcludedBySymmetry,
}

/// A terminal candidate of the divisor analysis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateData {
    pub curve: String,
    pub g: String,
    pub eta: String,
    pub transformations: Vec<String>,
    pub status: CandidateStatus,
    /// Short machine tag for the reason.
    pub reason: String,
    /// For `excluded-by-period`: the sign computations that rule it out.
    pub period_cases: Vec<NonexistenceCase>,
}

fn cand(
    curve: &str,
    g: &str,
    eta: &str,
    transformations: &[&str],
    status: CandidateStatus,
    reason: &str,
    period_cases: &[NonexistenceCase],
) -> CandidateData {
    CandidateData {
        curve: curve.into(),
        g: g.into(),
        eta: eta.into(),
        transformations: transformations.iter().map(|s| s.to_string()).collect(),
        status,
        reason: reason.into(),
        period_cases: period_cases.to_vec(),
    }
}

/// Terminal candidates for genus `γ` with end profile `d`: `(1, (1, 3))` or
/// an even `γ` with `(2, 2)`.
pub fn candidate_catalog(gamma: u32, d: (u32, u32)) -> Result<Vec<CandidateData>> {
    use CandidateStatus::*;
    use NonexistenceCase::*;
    match (gamma, d) {
        (1, (1, 3)) => Ok(vec![
            cand(
                "w^2 = z(z^2-1)",
                "c w",
                "c' dz/(z^2 w)",
                &["R(z,w) = (-z, i w)"],
                Constructed,
                "constructed:genus_family",
                &[],
            ),
            cand(
                "w^2 = z(z^2-1)",
                "c w",
                "c' dz/(z w)",
                &["R(z,w) = (-z, i w)"],
                ExcludedByPeriod,
                "period:negative_c_squared",
                &[Genus1Alt],
            ),
        ]),
        (g, (2, 2)) if g % 2 == 0 && g >= 2 => {
            let n = g + 1;
            let mut v = vec![
                cand(
                    &format!("w^{n} = z^2((z-1)/(z-a))^{g}"),
                    "c w",
                    "c' dz/(z w)",
                    &[
                        &format!("R(z,w) = (z, e^(2 pi i/{n}) w)"),
                        &format!("sigma(z,w) = (a/z, a^({}/{n})/w)", g + 2),
                    ],
                    Constructed,
                    "constructed:even_family",
                    &[],
                ),
                cand(
                    &format!("w^{n} = z^2(z^2-1)^{}", g / 2),
                    "c w",
                    &format!("eta^{n} = c'' dz^{n}/(z^{} g^{})", g - 1, 2 * n),
                    &[
                        &format!("R(z,w) = (z, e^(2 pi i/{n}) w)"),
                        "tau(z,w) = (-z, w)",
                    ],
                    ExcludedByGenus,
                    "genus:normalization_exceeds_gamma",
                    &[],
                ),
                cand(
                    &format!("w^{n} = (z^2-1)^{}/z^{g}", (g + 2) / 2),
                    "c/w",
                    &format!("eta^{n} = c' (z^2-1)^2 dz^{n}/z^{}", g + 3),
                    &[
                        &format!("R(z,w) = (z, e^(2 pi i/{n}) w)"),
                        "tau(z,w) = (-z, w)",
                    ],
                    if g == 2 {
                        ExcludedBySymmetry
                    } else {
                        ExcludedByGenus
                    },
                    if g == 2 {
                        "symmetry:ends_exchanged_by_1/z"
                    } else {
                        "genus:normalization_exceeds_gamma"
                    },
                    &[],
                ),
                cand(
                    &format!("w^{n} = z^2((z-1)/(z+1))^{g}"),
                    "c w",
                    &format!("eta^{n} = c' (z+1)^{} dz^{n}/(z^{}(z-1)^{g})", g + 4, g + 3),
                    &[
                        &format!("R(z,w) = (z, e^(2 pi i/{n}) w)"),
                        "sigma(z,w) = (1/z, w)",
                    ],
                    ExcludedByGenus,
                    "genus:as_preceding_case",
                    &[],
                ),
            ];
            if g == 2 {
                v.push(cand(
                    "w^3 = (z-1)^2(z+1)^2/z^2",
                    "c/w",
                    "c' w dz/z",
                    &["R(z,w) = (z, e^(2 pi i/3) w)", "sigma(z,w) = (1/z, w)"],
                    ExcludedByPeriod,
                    "period:a_equals_-1",
                    &[EvenAltANeg],
                ));
                v.push(cand(
                    "w^3 = (z-1)^2(z-a)^2/z^2",
                    "c/w",
                    "c' w dz/z",
                    &["R(z,w) = (z, e^(2 pi i/3) w)", "sigma(z,w) = (a/z, w)"],
                    ExcludedByPeriod,
                    "period:sign_definite_for_all_real_a",
                    &[EvenAltAGt1, EvenAlt0LtALt1, EvenAltANeg],
                ));
            }
            Ok(v)
        }
        _ => Err(Error::Invalid(format!(
            "no catalog for gamma = {gamma} with end orders {d:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(cases: &[RamificationCase], count: usize) -> Vec<(u32, Vec<u32>)> {
        cases
            .iter()
            .filter(|c| c.count() == count)
            .map(|c| (c.order, c.m.clone()))
            .collect()
    }

    #[test]
    fn cyclic_gamma_two() {
        let c = enumerate_r_cases(2).unwrap();
        assert_eq!(ms(&c, 1), vec![(6, vec![3])]);
        assert_eq!(ms(&c, 2), vec![(3, vec![3, 3])]);
        assert!(ms(&c, 3).is_empty());
    }

    #[test]
    fn sporadic_rows() {
        assert!(ms(&enumerate_r_cases(11).unwrap(), 3).contains(&(12, vec![2, 3, 3])));
        assert!(ms(&enumerate_r_cases(59).unwrap(), 3).contains(&(60, vec![2, 3, 5])));
        let d = enumerate_delta0_cases(4, true).unwrap();
        assert_eq!(ms(&d, 2), vec![(10, vec![10, 10])]);
        assert_eq!(ms(&d, 3), vec![(10, vec![2, 2, 5])]);
        assert!(ms(&enumerate_delta0_cases(5, true).unwrap(), 3).contains(&(12, vec![2, 3, 3])));
        assert_eq!(
            ms(&enumerate_delta0_cases(7, false).unwrap(), 1),
            vec![(16, vec![8])]
        );
    }

    #[test]
    fn gamma_three_sorted() {
        let c = enumerate_r_cases(3).unwrap();
        assert_eq!(ms(&c, 3), vec![(4, vec![2, 2, 2])]);
    }

    #[test]
    fn catalog_shapes() {
        let c = candidate_catalog(1, (1, 3)).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].status, CandidateStatus::Constructed);
        assert_eq!(c[1].status, CandidateStatus::ExcludedByPeriod);
        let c = candidate_catalog(2, (2, 2)).unwrap();
        assert!(c
            .iter()
            .any(|x| x.curve == "w^3 = (z-1)^2(z-a)^2/z^2" && x.g == "c/w"));
        assert!(candidate_catalog(3, (2, 2)).is_err());
    }
}
