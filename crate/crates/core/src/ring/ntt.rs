//! Negacyclic number-theoretic transform over word-size primes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Every prime produced here is `1 mod 2^21`, enough for negacyclic
/// transforms up to length `2^20`.
pub const MAX_LOG_LEN: u32 = 20;

#[inline]
pub fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

#[inline]
fn add_mod(a: u64, b: u64, q: u64) -> u64 {
    let s = a + b;
    if s >= q {
        s - q
    } else {
        s
    }
}

#[inline]
fn sub_mod(a: u64, b: u64, q: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + q - b
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1u64 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes `q < 2^62` with `q = 1 mod 2^21`, largest first.
pub fn exact_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let step = 1u64 << (MAX_LOG_LEN + 1);
        let mut c = ((1u64 << 62) / step) * step + 1;
        let mut out = Vec::with_capacity(48);
        while out.len() < 48 {
            c -= step;
            if is_prime(c) {
                out.push(c);
            }
        }
        out
    })
}

/// Largest prime below `2^62` usable for a negacyclic NTT of any supported length.
pub fn default_modulus() -> u64 {
    exact_primes()[0]
}

fn find_psi(q: u64, n: usize) -> Option<u64> {
    let two_n = 2 * n as u64;
    if (q - 1) % two_n != 0 {
        return None;
    }
    let cofactor = (q - 1) / two_n;
    for g in 2..q.min(10_000) {
        let psi = pow_mod(g, cofactor, q);
        // psi has order exactly 2n iff psi^n = -1.
        if pow_mod(psi, n as u64, q) == q - 1 {
            return Some(psi);
        }
    }
    None
}

fn bit_reverse(mut x: usize, bits: u32) -> usize {
    let mut r = 0;
    for _ in 0..bits {
        r = (r << 1) | (x & 1);
        x >>= 1;
    }
    r
}

#[derive(Debug)]
pub struct NttTable {
    pub q: u64,
    pub n: usize,
    psi_rev: Vec<u64>,
    psi_inv_rev: Vec<u64>,
    n_inv: u64,
}

impl NttTable {
    pub fn new(q: u64, n: usize) -> Option<Self> {
        if !n.is_power_of_two() || n < 2 || q >= 1 << 63 {
            return None;
        }
        let psi = find_psi(q, n)?;
        let psi_inv = pow_mod(psi, q - 2, q);
        let bits = n.trailing_zeros();
        let mut psi_rev = vec![0u64; n];
        let mut psi_inv_rev = vec![0u64; n];
        let (mut p, mut pi) = (1u64, 1u64);
        for i in 0..n {
            let r = bit_reverse(i, bits);
            psi_rev[r] = p;
            psi_inv_rev[r] = pi;
            p = mul_mod(p, psi, q);
            pi = mul_mod(pi, psi_inv, q);
        }
        Some(Self {
            q,
            n,
            psi_rev,
            psi_inv_rev,
            n_inv: pow_mod(n as u64, q - 2, q),
        })
    }

    pub fn forward(&self, a: &mut [u64]) {
        let q = self.q;
        let n = self.n;
        let mut t = n;
        let mut m = 1;
        while m < n {
            t /= 2;
            for i in 0..m {
                let j1 = 2 * i * t;
                let s = self.psi_rev[m + i];
                for j in j1..j1 + t {
                    let u = a[j];
                    let v = mul_mod(a[j + t], s, q);
                    a[j] = add_mod(u, v, q);
                    a[j + t] = sub_mod(u, v, q);
                }
            }
            m *= 2;
        }
    }

    pub fn inverse(&self, a: &mut [u64]) {
        let q = self.q;
        let mut t = 1;
        let mut m = self.n;
        while m > 1 {
            let h = m / 2;
            let mut j1 = 0;
            for i in 0..h {
                let s = self.psi_inv_rev[h + i];
                for j in j1..j1 + t {
                    let u = a[j];
                    let v = a[j + t];
                    a[j] = add_mod(u, v, q);
                    a[j + t] = mul_mod(sub_mod(u, v, q), s, q);
                }
                j1 += 2 * t;
            }
            t *= 2;
            m = h;
        }
        for x in a.iter_mut() {
            *x = mul_mod(*x, self.n_inv, q);
        }
    }

    /// Negacyclic product of two residue vectors.
    pub fn multiply(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut fa = a.to_vec();
        let mut fb = b.to_vec();
        self.forward(&mut fa);
        self.forward(&mut fb);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x = mul_mod(*x, *y, self.q);
        }
        self.inverse(&mut fa);
        fa
    }
}

/// Shared table cache keyed by `(q, n)`.
pub fn table(q: u64, n: usize) -> Option<Arc<NttTable>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<NttTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().get(&(q, n)) {
        return Some(t.clone());
    }
    let t = Arc::new(NttTable::new(q, n)?);
    cache.lock().unwrap().insert((q, n), t.clone());
    Some(t)
}
