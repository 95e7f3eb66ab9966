//! The base ring `R = Z[X]/(X^N + 1)` and the binary-coefficient ring
//! `BP = Z[x]/(x^K + 1)`, `K = N * lambda_B`.
//!
//! `BP` coefficients are either exact integers or centered residues modulo a
//! single NTT prime. In both domains multiplication goes through negacyclic
//! NTTs; exact products use as many 61-bit primes as the operand sizes require
//! and reconstruct by CRT.

pub mod embed;
pub mod ntt;

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub use embed::{embed_all, embed_slots, inverse_embed_slots};
pub use ntt::default_modulus;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoeffDomain {
    Exact,
    Modular(u64),
}

impl fmt::Display for CoeffDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffDomain::Exact => write!(f, "exact"),
            CoeffDomain::Modular(q) => write!(f, "modular({q})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RingParams {
    n: usize,
    lambda_b: u32,
    domain: CoeffDomain,
}

impl RingParams {
    pub fn new(n: usize, lambda_b: u32, domain: CoeffDomain) -> Result<Self> {
        if !n.is_power_of_two() || n < 8 {
            return Err(Error::Param(format!("N = {n} must be a power of two >= 8")));
        }
        if ![2, 4, 8, 16, 32].contains(&lambda_b) {
            return Err(Error::Param(format!(
                "lambda_B = {lambda_b} must be one of 2, 4, 8, 16, 32"
            )));
        }
        let k = n * lambda_b as usize;
        if k > 1 << ntt::MAX_LOG_LEN {
            return Err(Error::Param(format!("K = {k} exceeds 2^{}", ntt::MAX_LOG_LEN)));
        }
        if let CoeffDomain::Modular(q) = domain {
            if q % 2 == 0 || q >= 1 << 62 || q < 3 {
                return Err(Error::Param(format!("modulus {q} must be odd and below 2^62")));
            }
            if (q - 1) % (2 * k as u64) != 0 || ntt::table(q, k).is_none() {
                return Err(Error::Param(format!("modulus {q} is not NTT-friendly for K = {k}")));
            }
        }
        Ok(Self { n, lambda_b, domain })
    }

    /// Dimension of `R`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda_b(&self) -> u32 {
        self.lambda_b
    }

    /// Dimension of `BP`.
    pub fn k(&self) -> usize {
        self.n * self.lambda_b as usize
    }

    /// Cyclotomic index `M = 2N`.
    pub fn m(&self) -> usize {
        2 * self.n
    }

    pub fn domain(&self) -> CoeffDomain {
        self.domain
    }

    pub fn slots(&self) -> usize {
        self.n / 2
    }

    /// The coefficient bound `B = 2^lambda_B`.
    pub fn coeff_bound(&self) -> f64 {
        2f64.powi(self.lambda_b as i32)
    }

    pub fn with_domain(&self, domain: CoeffDomain) -> Result<Self> {
        Self::new(self.n, self.lambda_b, domain)
    }

    /// SHA-256 over a canonical description; stamped into serialized artifacts.
    pub fn digest(&self) -> [u8; 32] {
        let desc = format!("bckks-ring-v1|{}|{}|{}", self.n, self.lambda_b, self.domain);
        Sha256::digest(desc.as_bytes()).into()
    }

    pub fn zero_bp(&self) -> BPoly {
        BPoly::zero(self.k(), self.domain)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Coeffs {
    Exact(Vec<BigInt>),
    Modular { q: u64, residues: Vec<u64> },
}

/// Element of `BP`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BPoly {
    coeffs: Coeffs,
}

#[inline]
fn reduce_i128(x: i128, q: u64) -> u64 {
    x.rem_euclid(q as i128) as u64
}

#[inline]
fn center(r: u64, q: u64) -> i64 {
    // (-q/2, q/2]
    if r > q / 2 {
        r as i64 - q as i64
    } else {
        r as i64
    }
}

fn bigint_mod(x: &BigInt, p: u64) -> u64 {
    let (sign, digits) = x.to_u64_digits();
    let mut r: u128 = 0;
    for &d in digits.iter().rev() {
        r = ((r << 64) | d as u128) % p as u128;
    }
    let r = r as u64;
    if sign == Sign::Minus && r != 0 {
        p - r
    } else {
        r
    }
}

fn max_bits(v: &[BigInt]) -> u64 {
    v.iter().map(|x| x.bits()).max().unwrap_or(0)
}

impl BPoly {
    pub fn zero(k: usize, domain: CoeffDomain) -> Self {
        let coeffs = match domain {
            CoeffDomain::Exact => Coeffs::Exact(vec![BigInt::zero(); k]),
            CoeffDomain::Modular(q) => Coeffs::Modular { q, residues: vec![0; k] },
        };
        Self { coeffs }
    }

    pub fn from_i64(values: &[i64], domain: CoeffDomain) -> Self {
        let coeffs = match domain {
            CoeffDomain::Exact => Coeffs::Exact(values.iter().map(|&v| BigInt::from(v)).collect()),
            CoeffDomain::Modular(q) => Coeffs::Modular {
                q,
                residues: values.iter().map(|&v| reduce_i128(v as i128, q)).collect(),
            },
        };
        Self { coeffs }
    }

    pub fn from_bigints(values: Vec<BigInt>, domain: CoeffDomain) -> Self {
        let coeffs = match domain {
            CoeffDomain::Exact => Coeffs::Exact(values),
            CoeffDomain::Modular(q) => Coeffs::Modular {
                q,
                residues: values.iter().map(|v| bigint_mod(v, q)).collect(),
            },
        };
        Self { coeffs }
    }

    /// Residues in `[0, q)`; the caller vouches for the range.
    pub(crate) fn from_residues(residues: Vec<u64>, q: u64) -> Self {
        Self { coeffs: Coeffs::Modular { q, residues } }
    }

    /// `c * x^0`.
    pub fn constant(c: &BigInt, k: usize, domain: CoeffDomain) -> Self {
        let mut p = Self::zero(k, domain);
        p.set(0, c);
        p
    }

    /// `sign * x^i`.
    pub fn monomial(i: usize, negative: bool, k: usize, domain: CoeffDomain) -> Self {
        let mut p = Self::zero(k, domain);
        p.set(i, &BigInt::from(if negative { -1 } else { 1 }));
        p
    }

    pub fn len(&self) -> usize {
        match &self.coeffs {
            Coeffs::Exact(v) => v.len(),
            Coeffs::Modular { residues, .. } => residues.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn domain(&self) -> CoeffDomain {
        match &self.coeffs {
            Coeffs::Exact(_) => CoeffDomain::Exact,
            Coeffs::Modular { q, .. } => CoeffDomain::Modular(*q),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.coeffs {
            Coeffs::Exact(v) => v.iter().all(Zero::is_zero),
            Coeffs::Modular { residues, .. } => residues.iter().all(|&r| r == 0),
        }
    }

    /// Coefficient `i`, centered when modular.
    pub fn coeff(&self, i: usize) -> BigInt {
        match &self.coeffs {
            Coeffs::Exact(v) => v[i].clone(),
            Coeffs::Modular { q, residues } => BigInt::from(center(residues[i], *q)),
        }
    }

    pub fn set(&mut self, i: usize, value: &BigInt) {
        match &mut self.coeffs {
            Coeffs::Exact(v) => v[i] = value.clone(),
            Coeffs::Modular { q, residues } => residues[i] = bigint_mod(value, *q),
        }
    }

    pub fn to_bigints(&self) -> Vec<BigInt> {
        (0..self.len()).map(|i| self.coeff(i)).collect()
    }

    /// Centered coefficients when every one fits in `i64`.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        match &self.coeffs {
            Coeffs::Exact(v) => v.iter().map(ToPrimitive::to_i64).collect(),
            Coeffs::Modular { q, residues } => Some(residues.iter().map(|&r| center(r, *q)).collect()),
        }
    }

    pub(crate) fn residues(&self) -> Option<(u64, &[u64])> {
        match &self.coeffs {
            Coeffs::Modular { q, residues } => Some((*q, residues)),
            Coeffs::Exact(_) => None,
        }
    }

    pub(crate) fn exact_coeffs(&self) -> Option<&[BigInt]> {
        match &self.coeffs {
            Coeffs::Exact(v) => Some(v),
            Coeffs::Modular { .. } => None,
        }
    }

    /// Largest absolute coefficient, as `f64`.
    pub fn max_abs(&self) -> f64 {
        (0..self.len())
            .map(|i| self.coeff(i).abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }

    pub fn neg(&self) -> Self {
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => Coeffs::Exact(v.iter().map(|x| -x).collect()),
            Coeffs::Modular { q, residues } => Coeffs::Modular {
                q: *q,
                residues: residues.iter().map(|&r| if r == 0 { 0 } else { q - r }).collect(),
            },
        };
        Self { coeffs }
    }

    pub fn scalar_mul(&self, c: &BigInt) -> Self {
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => Coeffs::Exact(v.iter().map(|x| x * c).collect()),
            Coeffs::Modular { q, residues } => {
                let cm = bigint_mod(c, *q);
                Coeffs::Modular {
                    q: *q,
                    residues: residues.iter().map(|&r| ntt::mul_mod(r, cm, *q)).collect(),
                }
            }
        };
        Self { coeffs }
    }
}

fn check_pair(a: &BPoly, b: &BPoly) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Dimension { expected: a.len(), got: b.len() });
    }
    if a.domain() != b.domain() {
        return Err(Error::DomainMismatch);
    }
    Ok(())
}

pub fn bp_add(a: &BPoly, b: &BPoly) -> Result<BPoly> {
    check_pair(a, b)?;
    let coeffs = match (&a.coeffs, &b.coeffs) {
        (Coeffs::Exact(x), Coeffs::Exact(y)) => {
            Coeffs::Exact(x.iter().zip(y).map(|(u, v)| u + v).collect())
        }
        (Coeffs::Modular { q, residues: x }, Coeffs::Modular { residues: y, .. }) => {
            Coeffs::Modular {
                q: *q,
                residues: x
                    .iter()
                    .zip(y)
                    .map(|(&u, &v)| {
                        let s = u + v;
                        if s >= *q {
                            s - q
                        } else {
                            s
                        }
                    })
                    .collect(),
            }
        }
        _ => unreachable!(),
    };
    Ok(BPoly { coeffs })
}

pub fn bp_sub(a: &BPoly, b: &BPoly) -> Result<BPoly> {
    bp_add(a, &b.neg())
}

/// Negacyclic product via NTT.
pub fn bp_mul(a: &BPoly, b: &BPoly) -> Result<BPoly> {
    check_pair(a, b)?;
    let k = a.len();
    if !k.is_power_of_two() {
        return Err(Error::Param(format!("length {k} is not a power of two")));
    }
    match (&a.coeffs, &b.coeffs) {
        (Coeffs::Modular { q, residues: x }, Coeffs::Modular { residues: y, .. }) => {
            let t = ntt::table(*q, k)
                .ok_or_else(|| Error::Param(format!("modulus {q} is not NTT-friendly for K = {k}")))?;
            Ok(BPoly::from_residues(t.multiply(x, y), *q))
        }
        (Coeffs::Exact(x), Coeffs::Exact(y)) => Ok(BPoly {
            coeffs: Coeffs::Exact(exact_mul(x, y)?),
        }),
        _ => unreachable!(),
    }
}

fn exact_mul(x: &[BigInt], y: &[BigInt]) -> Result<Vec<BigInt>> {
    let k = x.len();
    let (bx, by) = (max_bits(x), max_bits(y));
    if bx == 0 || by == 0 {
        return Ok(vec![BigInt::zero(); k]);
    }
    // |c_m| <= K * max|x| * max|y|; the CRT range must cover twice that.
    let bound_bits = bx + by + (k.trailing_zeros() as u64) + 2;
    let primes = ntt::exact_primes();
    let count = bound_bits.div_ceil(61) as usize;
    if count > primes.len() {
        return Err(Error::Param(format!(
            "exact product needs {bound_bits} bits, beyond the supported CRT range"
        )));
    }
    let primes = &primes[..count];
    let residues: Vec<Vec<u64>> = primes
        .iter()
        .map(|&p| {
            let t = ntt::table(p, k).expect("exact primes support all lengths");
            let xr: Vec<u64> = x.iter().map(|v| bigint_mod(v, p)).collect();
            let yr: Vec<u64> = y.iter().map(|v| bigint_mod(v, p)).collect();
            t.multiply(&xr, &yr)
        })
        .collect();
    Ok(crt_centered(primes, &residues))
}

/// Garner reconstruction into the centered range of `prod(primes)`.
fn crt_centered(primes: &[u64], residues: &[Vec<u64>]) -> Vec<BigInt> {
    let k = residues[0].len();
    match primes.len() {
        1 => {
            let q = primes[0];
            residues[0].iter().map(|&r| BigInt::from(center(r, q))).collect()
        }
        2 => {
            let (p0, p1) = (primes[0], primes[1]);
            let inv = ntt::pow_mod(p0 % p1, p1 - 2, p1);
            let modulus = p0 as i128 * p1 as i128;
            (0..k)
                .map(|i| {
                    let r0 = residues[0][i];
                    let r1 = residues[1][i];
                    let t = ntt::mul_mod((r1 + p1 - r0 % p1) % p1, inv, p1);
                    let mut v = r0 as i128 + p0 as i128 * t as i128;
                    if v > modulus / 2 {
                        v -= modulus;
                    }
                    BigInt::from(v)
                })
                .collect()
        }
        n => {
            // inv[j][i] = p_j^{-1} mod p_i for j < i
            let mut inv = vec![vec![0u64; n]; n];
            for i in 0..n {
                for j in 0..i {
                    inv[j][i] = ntt::pow_mod(primes[j] % primes[i], primes[i] - 2, primes[i]);
                }
            }
            let modulus: BigInt = primes.iter().fold(BigInt::one(), |acc, &p| acc * p);
            let half = &modulus >> 1;
            let mut digits = vec![0u64; n];
            (0..k)
                .map(|c| {
                    for i in 0..n {
                        let pi = primes[i];
                        let mut t = residues[i][c];
                        for j in 0..i {
                            let d = digits[j] % pi;
                            t = ntt::mul_mod((t + pi - d) % pi, inv[j][i], pi);
                        }
                        digits[i] = t;
                    }
                    let mut v = BigInt::from(digits[n - 1]);
                    for i in (0..n - 1).rev() {
                        v = v * primes[i] + digits[i];
                    }
                    if v > half {
                        v -= &modulus;
                    }
                    v
                })
                .collect()
        }
    }
}

/// Quadratic-time negacyclic product; the reference for [`bp_mul`].
pub fn bp_mul_schoolbook(a: &BPoly, b: &BPoly) -> Result<BPoly> {
    check_pair(a, b)?;
    let k = a.len();
    match (&a.coeffs, &b.coeffs) {
        (Coeffs::Modular { q, residues: x }, Coeffs::Modular { residues: y, .. }) => {
            let q = *q;
            let mut out = vec![0u64; k];
            for i in 0..k {
                if x[i] == 0 {
                    continue;
                }
                for j in 0..k {
                    let p = ntt::mul_mod(x[i], y[j], q);
                    let m = i + j;
                    if m < k {
                        out[m] = (out[m] + p) % q;
                    } else {
                        out[m - k] = (out[m - k] + q - p) % q;
                    }
                }
            }
            Ok(BPoly::from_residues(out, q))
        }
        (Coeffs::Exact(x), Coeffs::Exact(y)) => {
            let small = max_bits(x) + max_bits(y) + k.trailing_zeros() as u64 + 1 < 126;
            let out = if small {
                let xs: Vec<i128> = x.iter().map(|v| v.to_i128().unwrap()).collect();
                let ys: Vec<i128> = y.iter().map(|v| v.to_i128().unwrap()).collect();
                let mut acc = vec![0i128; k];
                for i in 0..k {
                    if xs[i] == 0 {
                        continue;
                    }
                    for j in 0..k {
                        let p = xs[i] * ys[j];
                        let m = i + j;
                        if m < k {
                            acc[m] += p;
                        } else {
                            acc[m - k] -= p;
                        }
                    }
                }
                acc.into_iter().map(BigInt::from).collect()
            } else {
                let mut acc = vec![BigInt::zero(); k];
                for i in 0..k {
                    if x[i].is_zero() {
                        continue;
                    }
                    for j in 0..k {
                        let p = &x[i] * &y[j];
                        let m = i + j;
                        if m < k {
                            acc[m] += p;
                        } else {
                            acc[m - k] -= p;
                        }
                    }
                }
                acc
            };
            Ok(BPoly { coeffs: Coeffs::Exact(out) })
        }
        _ => unreachable!(),
    }
}

/// `a * x^i`: rotate up by `i`, negating what wraps past `x^K`.
pub fn monomial_shift(a: &BPoly, i: usize) -> Result<BPoly> {
    let k = a.len();
    if i >= k {
        return Err(Error::IndexOutOfRange { index: i, len: k });
    }
    let coeffs = match &a.coeffs {
        Coeffs::Exact(v) => {
            let mut out = vec![BigInt::zero(); k];
            for (j, c) in v.iter().enumerate() {
                let m = j + i;
                if m < k {
                    out[m] = c.clone();
                } else {
                    out[m - k] = -c;
                }
            }
            Coeffs::Exact(out)
        }
        Coeffs::Modular { q, residues } => {
            let mut out = vec![0u64; k];
            for (j, &c) in residues.iter().enumerate() {
                let m = j + i;
                if m < k {
                    out[m] = c;
                } else {
                    out[m - k] = if c == 0 { 0 } else { q - c };
                }
            }
            Coeffs::Modular { q: *q, residues: out }
        }
    };
    Ok(BPoly { coeffs })
}

/// Element of `R`, coefficients as exact integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RPoly {
    pub coeffs: Vec<BigInt>,
}

impl RPoly {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        Self { coeffs }
    }

    pub fn from_i64(values: &[i64]) -> Self {
        Self { coeffs: values.iter().map(|&v| BigInt::from(v)).collect() }
    }

    pub fn zero(n: usize) -> Self {
        Self { coeffs: vec![BigInt::zero(); n] }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn one_norm(&self) -> f64 {
        self.to_f64().iter().map(|c| c.abs()).sum()
    }

    pub fn inf_norm(&self) -> f64 {
        self.to_f64().iter().map(|c| c.abs()).fold(0.0, f64::max)
    }
}

/// Signed bit decomposition: coefficient `i*lambda + j` receives
/// `sign(v_i) * bit_j(|v_i|)`.
pub(crate) fn expand_digits(values: &[BigInt], params: &RingParams) -> Result<BPoly> {
    if values.len() != params.n() {
        return Err(Error::Dimension { expected: params.n(), got: values.len() });
    }
    let lambda = params.lambda_b();
    let mut out = vec![0i64; params.k()];
    for (i, v) in values.iter().enumerate() {
        let mag = v.abs();
        if mag.bits() > lambda as u64 {
            return Err(Error::CoefficientOverflow { index: i, bits: lambda, value: v.to_string() });
        }
        let mag = mag.to_u64().expect("at most 32 bits");
        let sign = if v.is_negative() { -1 } else { 1 };
        for j in 0..lambda as usize {
            if (mag >> j) & 1 == 1 {
                out[i * lambda as usize + j] = sign;
            }
        }
    }
    Ok(BPoly::from_i64(&out, params.domain()))
}

/// The contraction `p`: `a_i = sum_j 2^j * m_{i*lambda + j}`.
pub(crate) fn contract_digits(m: &BPoly, params: &RingParams) -> Result<RPoly> {
    if m.len() != params.k() {
        return Err(Error::Dimension { expected: params.k(), got: m.len() });
    }
    let lambda = params.lambda_b() as usize;
    let n = params.n();
    let coeffs = match &m.coeffs {
        Coeffs::Modular { q, residues } => (0..n)
            .map(|i| {
                let acc: i128 = (0..lambda)
                    .map(|j| (center(residues[i * lambda + j], *q) as i128) << j)
                    .sum();
                BigInt::from(acc)
            })
            .collect(),
        Coeffs::Exact(v) => (0..n)
            .map(|i| {
                (0..lambda).fold(BigInt::zero(), |acc, j| acc + (&v[i * lambda + j] << j))
            })
            .collect(),
    };
    Ok(RPoly { coeffs })
}

/// `max_j |a(zeta^j)|` over all primitive `2N`-th roots.
pub fn canonical_norm(a: &RPoly) -> f64 {
    embed_all(&a.to_f64()).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// `||m||_R = ||p(m)||_can`.
pub fn r_norm(m: &BPoly, params: &RingParams) -> Result<f64> {
    Ok(canonical_norm(&contract_digits(m, params)?))
}
