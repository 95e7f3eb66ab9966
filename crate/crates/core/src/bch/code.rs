//! Narrow-sense binary BCH codes: construction, systematic encoding and
//! syndrome / Berlekamp-Massey / Chien decoding.
//!
//! Bit vectors are `u8` per coefficient, index `i` holding the coefficient of `x^i`.

use super::gf::GfContext;
use crate::{Error, Result};

/// `x^7 + x^3 + 1`, the field polynomial pinned for the `m = 7` code.
pub const DEFAULT_PRIMITIVE_POLY_M7: u32 = 0b1000_1001;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BchCode {
    gf: GfContext,
    n: usize,
    k: usize,
    t: usize,
    g: Vec<u8>,
}

/// Product of two GF(2) polynomials.
pub fn gf2_mul(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x & 1 == 1 {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] ^= y & 1;
            }
        }
    }
    out
}

/// Remainder of `a` modulo the monic-over-GF(2) polynomial `g`.
pub fn gf2_rem(a: &[u8], g: &[u8]) -> Vec<u8> {
    let dg = g.iter().rposition(|&c| c == 1).expect("nonzero divisor");
    let mut r = a.to_vec();
    for i in (dg..r.len()).rev() {
        if r[i] == 1 {
            for (j, &c) in g[..=dg].iter().enumerate() {
                r[i - dg + j] ^= c;
            }
        }
    }
    r.truncate(dg.max(1));
    r.resize(dg, 0);
    r
}

/// Minimal polynomial over GF(2) of `alpha^i`, from its cyclotomic coset.
fn minimal_polynomial(gf: &GfContext, i: usize) -> Vec<u8> {
    let n = gf.order();
    let mut coset = vec![i % n];
    let mut c = (2 * i) % n;
    while c != i % n {
        coset.push(c);
        c = (2 * c) % n;
    }
    // prod (x - alpha^c), coefficients in GF(2^m)
    let mut poly: Vec<u16> = vec![1];
    for &e in &coset {
        let root = gf.alpha_pow(e as i64);
        let mut next = vec![0u16; poly.len() + 1];
        for (j, &p) in poly.iter().enumerate() {
            next[j + 1] ^= p;
            next[j] ^= gf.mul(p, root);
        }
        poly = next;
    }
    poly.into_iter()
        .map(|c| {
            debug_assert!(c <= 1, "conjugate products lie in GF(2)");
            c as u8
        })
        .collect()
}

impl BchCode {
    /// Generator `lcm(M_1, ..., M_2t)` over GF(2^m) defined by `primitive_poly`.
    pub fn build(m: u32, t: usize, primitive_poly: u32) -> Result<Self> {
        let gf = GfContext::new(m, primitive_poly)?;
        let n = gf.order();
        if 2 * t >= n {
            return Err(Error::Param(format!("2t = {} must be below n = {n}", 2 * t)));
        }
        let mut g = vec![1u8];
        let mut covered = vec![false; n];
        for i in 1..=2 * t {
            if covered[i % n] {
                continue;
            }
            let mut c = i % n;
            loop {
                covered[c] = true;
                c = (2 * c) % n;
                if c == i % n {
                    break;
                }
            }
            g = gf2_mul(&g, &minimal_polynomial(&gf, i));
        }
        let k = n - (g.len() - 1);
        Ok(Self { gf, n, k, t, g })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn generator(&self) -> &[u8] {
        &self.g
    }

    pub fn field(&self) -> &GfContext {
        &self.gf
    }

    /// Exponents of the generator's nonzero terms, highest first.
    pub fn generator_support(&self) -> Vec<usize> {
        (0..self.g.len()).rev().filter(|&i| self.g[i] == 1).collect()
    }

    /// `u x^(n-k) + (u x^(n-k) mod g)`; the message occupies the top `k` bits.
    pub fn encode(&self, u: &[u8]) -> Result<Vec<u8>> {
        if u.len() != self.k {
            return Err(Error::Dimension { expected: self.k, got: u.len() });
        }
        let parity_len = self.n - self.k;
        let mut c = vec![0u8; self.n];
        for (i, &b) in u.iter().enumerate() {
            c[parity_len + i] = b & 1;
        }
        if parity_len > 0 {
            let rem = gf2_rem(&c, &self.g);
            for (i, &b) in rem.iter().enumerate() {
                c[i] ^= b;
            }
        }
        Ok(c)
    }

    /// `r(alpha^i)` for `i = 1..=2t`.
    pub fn syndromes(&self, r: &[u8]) -> Vec<u16> {
        (1..=2 * self.t)
            .map(|i| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &b)| b & 1 == 1)
                    .fold(0u16, |acc, (j, _)| acc ^ self.gf.alpha_pow((i * j) as i64))
            })
            .collect()
    }

    /// Error locator from the syndromes.
    fn berlekamp_massey(&self, s: &[u16]) -> Vec<u16> {
        let gf = &self.gf;
        let mut lambda = vec![1u16];
        let mut prev = vec![1u16];
        let mut l = 0usize;
        let mut shift = 1usize;
        let mut prev_disc = 1u16;
        for r in 0..s.len() {
            let mut d = s[r];
            for i in 1..=l.min(lambda.len() - 1) {
                d ^= gf.mul(lambda[i], s[r - i]);
            }
            if d == 0 {
                shift += 1;
                continue;
            }
            let coef = gf.div(d, prev_disc).expect("nonzero");
            let mut next = lambda.clone();
            if next.len() < prev.len() + shift {
                next.resize(prev.len() + shift, 0);
            }
            for (i, &p) in prev.iter().enumerate() {
                next[i + shift] ^= gf.mul(coef, p);
            }
            if 2 * l <= r {
                l = r + 1 - l;
                prev = lambda;
                prev_disc = d;
                shift = 1;
            } else {
                shift += 1;
            }
            lambda = next;
        }
        while lambda.len() > 1 && *lambda.last().unwrap() == 0 {
            lambda.pop();
        }
        lambda
    }

    /// Correct up to `t` flips. Returns the message and the number corrected.
    pub fn decode(&self, r: &[u8]) -> Result<(Vec<u8>, usize)> {
        if r.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: r.len() });
        }
        let s = self.syndromes(r);
        let parity_len = self.n - self.k;
        if s.iter().all(|&x| x == 0) {
            return Ok((r[parity_len..].to_vec(), 0));
        }
        let lambda = self.berlekamp_massey(&s);
        let degree = lambda.len() - 1;
        if degree > self.t {
            return Err(Error::DecodeFailure { block: 0 });
        }
        // Chien search: position p is in error iff lambda(alpha^-p) = 0
        let mut fixed = r.to_vec();
        let mut found = 0;
        for p in 0..self.n {
            let x = self.gf.alpha_pow(-(p as i64));
            let mut acc = 0u16;
            let mut xp = 1u16;
            for &c in &lambda {
                acc ^= self.gf.mul(c, xp);
                xp = self.gf.mul(xp, x);
            }
            if acc == 0 {
                fixed[p] ^= 1;
                found += 1;
            }
        }
        if found != degree {
            return Err(Error::DecodeFailure { block: 0 });
        }
        Ok((fixed[parity_len..].to_vec(), found))
    }
}
