//! Brute-force oracle: list every monic polynomial, factor it by trial
//! division, tally `Ω`.
//!
//! Degrees are processed in increasing order. A polynomial of degree `m` with
//! no monic irreducible factor of degree `≤ m/2` is irreducible and joins the
//! list; otherwise its smallest factor `P` is divided out and
//! `Ω(f) = 1 + Ω(f/P)` is read back from the already finished lower degree.

use num_bigint::BigUint;
use num_traits::Zero;

use super::field::{FiniteField, MAX_COEFFS};
use super::OmegaCountTable;
use crate::{Error, Result};

/// Largest number of polynomials per degree for [`enumerate_irreducibles`].
pub const ENUMERATION_BUDGET: u64 = 1_000_000;
/// Largest `q^n` for [`brute_force_omega`].
pub const BRUTE_FORCE_BUDGET: u64 = 2_000_000;

/// Monic irreducible polynomials over `F_q` grouped by degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrreduciblesList {
    q: u64,
    by_degree: Vec<Vec<Vec<u8>>>,
}

impl IrreduciblesList {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn d_max(&self) -> usize {
        self.by_degree.len() - 1
    }

    /// Irreducibles of degree `d`, coefficients little-endian with the leading 1.
    pub fn of_degree(&self, d: usize) -> &[Vec<u8>] {
        &self.by_degree[d]
    }

    pub fn count(&self, d: usize) -> usize {
        self.by_degree[d].len()
    }
}

struct Sieve {
    field: FiniteField,
    irreducibles: Vec<Vec<Vec<u8>>>,
    /// `omega[m][idx]` for the monic polynomial of degree `m` with index `idx`.
    omega: Vec<Vec<u8>>,
}

impl Sieve {
    fn new(field: FiniteField) -> Self {
        Sieve {
            field,
            irreducibles: vec![Vec::new()],
            omega: vec![vec![0]],
        }
    }

    fn extend_to(&mut self, deg: usize) {
        let q = self.field.order();
        for m in self.omega.len()..=deg {
            let total = q.pow(m as u32);
            let mut table = vec![0u8; total];
            let mut found = Vec::new();
            let mut f = [0u8; MAX_COEFFS];
            f[m] = 1;
            let mut quot = [0u8; MAX_COEFFS];
            for slot in table.iter_mut() {
                *slot = self.omega_of(&f[..=m], &mut quot);
                if *slot == 1 {
                    found.push(f[..=m].to_vec());
                }
                // odometer increment of the lower coefficients
                for c in f.iter_mut().take(m) {
                    *c += 1;
                    if (*c as usize) < q {
                        break;
                    }
                    *c = 0;
                }
            }
            self.omega.push(table);
            self.irreducibles.push(found);
        }
    }

    fn omega_of(&self, f: &[u8], quot: &mut [u8]) -> u8 {
        let m = f.len() - 1;
        for d in 1..=m / 2 {
            for p in &self.irreducibles[d] {
                if self.field.divide_monic(f, p, quot) {
                    let cof = &quot[..=m - d];
                    return 1 + self.omega[m - d][self.field.index_of_monic(cof)];
                }
            }
        }
        1
    }
}

fn check_degree(n: usize) -> Result<()> {
    if n + 1 > MAX_COEFFS {
        return Err(Error::Resource(format!("degree {n} is beyond the oracle's limit")));
    }
    Ok(())
}

/// Lists the monic irreducibles of every degree `≤ d_max` by sieving.
pub fn enumerate_irreducibles(q: u64, d_max: usize) -> Result<IrreduciblesList> {
    let field = FiniteField::new(q)?;
    check_degree(d_max)?;
    if (q as f64).powi(d_max as i32) > ENUMERATION_BUDGET as f64 {
        return Err(Error::Resource(format!(
            "q^d_max = {q}^{d_max} exceeds the enumeration budget {ENUMERATION_BUDGET}"
        )));
    }
    let mut sieve = Sieve::new(field);
    sieve.extend_to(d_max);
    Ok(IrreduciblesList { q, by_degree: sieve.irreducibles })
}

/// `N_q(m, k)` for all `m ≤ n` by factoring every monic polynomial.
pub fn brute_force_omega(q: u64, n: usize) -> Result<OmegaCountTable> {
    let field = FiniteField::new(q)?;
    check_degree(n)?;
    if (q as f64).powi(n as i32) > BRUTE_FORCE_BUDGET as f64 {
        return Err(Error::Resource(format!(
            "q^n = {q}^{n} exceeds the brute-force budget {BRUTE_FORCE_BUDGET}"
        )));
    }
    let mut sieve = Sieve::new(field);
    sieve.extend_to(n);
    let rows = sieve
        .omega
        .iter()
        .enumerate()
        .map(|(m, table)| {
            let mut tally = vec![0u64; m + 1];
            if m == 0 {
                tally[0] = 1;
            } else {
                for &w in table {
                    tally[w as usize] += 1;
                }
            }
            tally.into_iter().map(BigUint::from).collect::<Vec<_>>()
        })
        .collect();
    let table = OmegaCountTable::from_rows(q, rows);
    debug_assert!(table.row(0).iter().any(|c| !c.is_zero()));
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prime_tab::prime_counts;
    use num_traits::ToPrimitive;

    #[test]
    fn small_irreducible_lists() {
        let l = enumerate_irreducibles(2, 2).unwrap();
        assert_eq!(l.of_degree(1), &[vec![0, 1], vec![1, 1]]);
        assert_eq!(l.of_degree(2), &[vec![1, 1, 1]]);
        assert_eq!(enumerate_irreducibles(3, 1).unwrap().count(1), 3);
    }

    #[test]
    fn counts_agree_with_mobius_formula() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let mut d_max = 1;
            while d_max < 8 && (q as f64).powi(d_max as i32 + 1) <= 1e6 {
                d_max += 1;
            }
            let list = enumerate_irreducibles(q, d_max).unwrap();
            let table = prime_counts(q, d_max).unwrap();
            for d in 1..=d_max {
                assert_eq!(list.count(d) as u64, table.count(d).to_u64().unwrap(), "q={q} d={d}");
            }
        }
    }

    #[test]
    fn listed_polynomials_have_no_listed_factor() {
        let l = enumerate_irreducibles(3, 5).unwrap();
        let field = FiniteField::new(3).unwrap();
        let mut quot = [0u8; MAX_COEFFS];
        for d in 2..=5 {
            for f in l.of_degree(d) {
                for e in 1..=d / 2 {
                    for g in l.of_degree(e) {
                        assert!(!field.divide_monic(f, g, &mut quot));
                    }
                }
            }
        }
    }

    #[test]
    fn brute_force_small_rows() {
        let t = brute_force_omega(2, 3).unwrap();
        let r: Vec<u64> = t.row(3).iter().map(|c| c.to_u64().unwrap()).collect();
        assert_eq!(r, vec![0, 2, 2, 4]);
        let r1: Vec<u64> = t.row(1).iter().map(|c| c.to_u64().unwrap()).collect();
        assert_eq!(r1, vec![0, 2]);
        let t3 = brute_force_omega(3, 2).unwrap();
        let r: Vec<u64> = t3.row(2).iter().map(|c| c.to_u64().unwrap()).collect();
        assert_eq!(r, vec![0, 3, 6]);
    }

    #[test]
    fn budgets_are_enforced() {
        assert!(matches!(brute_force_omega(2, 21), Err(Error::Resource(_))));
        assert!(matches!(enumerate_irreducibles(2, 20), Err(Error::Resource(_))));
        assert!(matches!(brute_force_omega(12, 2), Err(Error::Validation(_))));
    }
}
