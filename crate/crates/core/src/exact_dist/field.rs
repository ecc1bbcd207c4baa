//! Table-driven arithmetic in `F_q`, `q = p^e ≤ 256`, and division of
//! polynomials over it by monic divisors.
//!
//! An element is an integer in `[0, q)` whose base-`p` digits are the
//! coefficients of a polynomial in `F_p[x]/(g)`, where `g` is the monic
//! irreducible of degree `e` with the smallest such integer encoding.

use crate::prime_tab::check_prime_power;
use crate::{Error, Result};

/// Longest coefficient vector handled by the oracle routines.
pub(crate) const MAX_COEFFS: usize = 64;

#[derive(Debug, Clone)]
pub struct FiniteField {
    q: usize,
    p: usize,
    e: u32,
    modulus: Vec<u8>,
    add: Vec<u8>,
    sub: Vec<u8>,
    mul: Vec<u8>,
}

impl FiniteField {
    pub fn new(q: u64) -> Result<Self> {
        let (p, e) = check_prime_power(q)?;
        if q > 256 {
            return Err(Error::Resource(format!(
                "field arithmetic is table-driven and limited to q <= 256 (got {q})"
            )));
        }
        let prime = Self::prime_field(p as usize);
        if e == 1 {
            return Ok(prime);
        }
        let modulus = prime.smallest_irreducible(e as usize);
        let (q, p) = (q as usize, p as usize);
        let digits = |a: usize| -> Vec<usize> {
            let mut a = a;
            (0..e).map(|_| {
                let d = a % p;
                a /= p;
                d
            })
            .collect()
        };
        let undigits = |v: &[usize]| v.iter().rev().fold(0usize, |acc, &d| acc * p + d);
        let mut add = vec![0u8; q * q];
        let mut sub = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let s: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                let t: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + p - y) % p).collect();
                // schoolbook product, then reduce by the monic modulus
                let mut prod = vec![0usize; 2 * e as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for i in (e as usize..prod.len()).rev() {
                    let c = prod[i];
                    if c != 0 {
                        for (j, &g) in modulus.iter().enumerate() {
                            let idx = i - e as usize + j;
                            prod[idx] = (prod[idx] + p * p - c * g as usize) % p;
                        }
                    }
                }
                add[a * q + b] = undigits(&s) as u8;
                sub[a * q + b] = undigits(&t) as u8;
                mul[a * q + b] = undigits(&prod[..e as usize]) as u8;
            }
        }
        Ok(FiniteField { q, p, e, modulus, add, sub, mul })
    }

    fn prime_field(p: usize) -> Self {
        let mut add = vec![0u8; p * p];
        let mut sub = vec![0u8; p * p];
        let mut mul = vec![0u8; p * p];
        for a in 0..p {
            for b in 0..p {
                add[a * p + b] = ((a + b) % p) as u8;
                sub[a * p + b] = ((a + p - b) % p) as u8;
                mul[a * p + b] = ((a * b) % p) as u8;
            }
        }
        FiniteField { q: p, p, e: 1, modulus: vec![0, 1], add, sub, mul }
    }

    /// Monic irreducible of degree `deg` over this field with the smallest
    /// index (coefficients below the leading one read as base-`q` digits).
    fn smallest_irreducible(&self, deg: usize) -> Vec<u8> {
        let count = self.q.pow(deg as u32);
        (0..count)
            .map(|idx| self.monic_from_index(idx, deg))
            .find(|f| self.is_irreducible_brute(f))
            .expect("irreducibles exist in every degree")
    }

    /// Irreducibility by trying every monic divisor of degree `1..=deg/2`.
    fn is_irreducible_brute(&self, f: &[u8]) -> bool {
        let deg = f.len() - 1;
        let mut quot = [0u8; MAX_COEFFS];
        for dg in 1..=deg / 2 {
            for idx in 0..self.q.pow(dg as u32) {
                let g = self.monic_from_index(idx, dg);
                if self.divide_monic(f, &g, &mut quot) {
                    return false;
                }
            }
        }
        true
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    /// Defining polynomial over `F_p` (little-endian, monic).
    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.sub[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    /// The monic polynomial of degree `deg` whose lower coefficients are the
    /// base-`q` digits of `idx` (little-endian, leading 1 included).
    pub fn monic_from_index(&self, idx: usize, deg: usize) -> Vec<u8> {
        let mut f = vec![0u8; deg + 1];
        let mut rest = idx;
        for c in f.iter_mut().take(deg) {
            *c = (rest % self.q) as u8;
            rest /= self.q;
        }
        f[deg] = 1;
        f
    }

    /// Index of a monic polynomial, inverse of [`Self::monic_from_index`].
    pub fn index_of_monic(&self, f: &[u8]) -> usize {
        f[..f.len() - 1]
            .iter()
            .rev()
            .fold(0usize, |acc, &c| acc * self.q + c as usize)
    }

    /// Product of two polynomials (little-endian coefficient vectors).
    pub fn poly_mul(&self, a: &[u8], b: &[u8]) -> Vec<u8> {
        let mut out = vec![0u8; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        out
    }

    /// Divides `f` by the monic `g`. On exact division writes the quotient's
    /// `deg f − deg g + 1` coefficients into `quot` and returns `true`.
    pub fn divide_monic(&self, f: &[u8], g: &[u8], quot: &mut [u8]) -> bool {
        let (df, dg) = (f.len() - 1, g.len() - 1);
        debug_assert_eq!(g[dg], 1);
        if dg > df {
            return false;
        }
        let mut rem = [0u8; MAX_COEFFS];
        rem[..=df].copy_from_slice(f);
        for i in (dg..=df).rev() {
            let c = rem[i];
            quot[i - dg] = c;
            if c != 0 {
                let row = &self.mul[c as usize * self.q..(c as usize + 1) * self.q];
                let base = i - dg;
                for (j, &gj) in g[..dg].iter().enumerate() {
                    let cur = rem[base + j];
                    rem[base + j] = self.sub[cur as usize * self.q + row[gj as usize] as usize];
                }
                rem[i] = 0;
            }
        }
        rem[..dg].iter().all(|&c| c == 0)
    }
}
