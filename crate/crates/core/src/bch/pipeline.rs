//! Block coding of a long bit message into one `BP` plaintext and back.
//!
//! The message is cut into `blocks` words of `block_k` bits, each zero-padded
//! to the code dimension and encoded; the concatenated codewords are permuted
//! and written one bit per coefficient.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;

use super::code::BchCode;
use super::perm::Permutation;
use crate::ring::BPoly;
use crate::sampling::RngHandle;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineParams {
    pub m_bits: usize,
    /// Data bits per block; at most the code dimension.
    pub block_k: usize,
    pub blocks: usize,
}

impl PipelineParams {
    pub fn new(m_bits: usize, block_k: usize, code: &BchCode) -> Result<Self> {
        if m_bits == 0 || block_k == 0 || block_k > code.k() {
            return Err(Error::Param(format!(
                "block size {block_k} must be in 1..={} and the message nonempty",
                code.k()
            )));
        }
        Ok(Self { m_bits, block_k, blocks: m_bits.div_ceil(block_k) })
    }

    /// Total codeword bits `n * blocks`.
    pub fn coded_bits(&self, code: &BchCode) -> usize {
        code.n() * self.blocks
    }
}

/// Encode, permute and pack `bits` into a `k`-coefficient polynomial.
pub fn pre_encode(
    bits: &[u8],
    code: &BchCode,
    perm: &Permutation,
    params: &PipelineParams,
    k: usize,
    domain: crate::ring::CoeffDomain,
) -> Result<BPoly> {
    if bits.len() != params.m_bits {
        return Err(Error::Dimension { expected: params.m_bits, got: bits.len() });
    }
    let nh = params.coded_bits(code);
    if nh > k {
        return Err(Error::Capacity { need: nh, have: k });
    }
    if perm.len() != nh {
        return Err(Error::Dimension { expected: nh, got: perm.len() });
    }
    let mut coded = Vec::with_capacity(nh);
    for b in 0..params.blocks {
        let mut u = vec![0u8; code.k()];
        for i in 0..params.block_k {
            if let Some(&bit) = bits.get(b * params.block_k + i) {
                u[i] = bit & 1;
            }
        }
        coded.extend(code.encode(&u)?);
    }
    let mut coeffs: Vec<i64> = perm.apply(&coded).into_iter().map(i64::from).collect();
    coeffs.resize(k, 0);
    Ok(BPoly::from_i64(&coeffs, domain))
}

/// Nearest of `{0, 1}`, ties to 0.
fn extract_bit(c: &BigInt) -> u8 {
    match c.to_i64() {
        Some(v) => (v >= 1) as u8,
        None => (c.sign() == num_bigint::Sign::Plus) as u8,
    }
}

/// Result of [`post_decode_detailed`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeReport {
    pub bits: Vec<u8>,
    /// Flips corrected per block.
    pub corrected: Vec<usize>,
}

pub fn post_decode(m: &BPoly, code: &BchCode, perm: &Permutation, params: &PipelineParams) -> Result<Vec<u8>> {
    Ok(post_decode_detailed(m, code, perm, params)?.bits)
}

/// Extract, un-permute and decode every block. Any nonzero padding after
/// decoding is treated as a failure of that block.
pub fn post_decode_detailed(
    m: &BPoly,
    code: &BchCode,
    perm: &Permutation,
    params: &PipelineParams,
) -> Result<DecodeReport> {
    let nh = params.coded_bits(code);
    if m.len() < nh {
        return Err(Error::Capacity { need: nh, have: m.len() });
    }
    if perm.len() != nh {
        return Err(Error::Dimension { expected: nh, got: perm.len() });
    }
    let extracted: Vec<u8> = (0..nh).map(|j| extract_bit(&m.coeff(j))).collect();
    let coded = perm.unapply(&extracted);
    let mut bits = Vec::with_capacity(params.blocks * params.block_k);
    let mut corrected = Vec::with_capacity(params.blocks);
    for (b, word) in coded.chunks(code.n()).enumerate() {
        let (u, fixed) = code.decode(word).map_err(|e| match e {
            Error::DecodeFailure { .. } => Error::DecodeFailure { block: b },
            other => other,
        })?;
        let used = params.block_k.min(params.m_bits.saturating_sub(b * params.block_k));
        if u[used..].iter().any(|&x| x != 0) {
            return Err(Error::DecodeFailure { block: b });
        }
        bits.extend_from_slice(&u[..used]);
        corrected.push(fixed);
    }
    Ok(DecodeReport { bits, corrected })
}

#[derive(Clone, Debug, PartialEq)]
pub enum FlipPattern {
    Indices(Vec<usize>),
    /// Each of the first `span` coefficients flips independently with `rate`.
    Rate { rate: f64, span: usize },
}

/// Replace each selected coefficient `c` by `1 - c`. Returns the flipped indices.
pub fn inject_flips(m: &BPoly, pattern: &FlipPattern, rng: &mut RngHandle) -> Result<(BPoly, Vec<usize>)> {
    let indices = match pattern {
        FlipPattern::Indices(v) => {
            if let Some(&bad) = v.iter().find(|&&i| i >= m.len()) {
                return Err(Error::IndexOutOfRange { index: bad, len: m.len() });
            }
            v.clone()
        }
        FlipPattern::Rate { rate, span } => {
            if *span > m.len() {
                return Err(Error::IndexOutOfRange { index: *span, len: m.len() });
            }
            if !(0.0..=1.0).contains(rate) {
                return Err(Error::Param(format!("flip rate {rate} outside [0, 1]")));
            }
            (0..*span).filter(|_| rng.rng().random::<f64>() < *rate).collect()
        }
    };
    let mut out = m.clone();
    let one = BigInt::from(1);
    for &i in &indices {
        out.set(i, &(&one - m.coeff(i)));
    }
    Ok((out, indices))
}

/// Poisson block-failure model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FailureModel {
    pub p_bit: f64,
    /// Expected flips per block.
    pub lambda: f64,
    /// `Pr[X >= t + 1]`, summed exactly.
    pub block_failure: f64,
    /// Leading term `lambda^(t+1) / (t+1)!`.
    pub leading_term: f64,
    /// `(1 - block_failure)^blocks`.
    pub success: f64,
}

pub fn failure_prob(p_coef: f64, lambda_b: u32, n: usize, t: usize, blocks: usize) -> FailureModel {
    let p_bit = lambda_b as f64 * p_coef;
    let lambda = n as f64 * p_bit;
    let mut term = (-lambda).exp();
    for k in 1..=t + 1 {
        term *= lambda / k as f64;
    }
    let leading_term = lambda.powi(t as i32 + 1) / (1..=t + 1).map(|k| k as f64).product::<f64>();
    let mut tail = 0.0;
    let mut k = t + 1;
    while term > 0.0 && term > tail * 1e-18 && k < t + 400 {
        tail += term;
        k += 1;
        term *= lambda / k as f64;
    }
    let success = (blocks as f64 * (-tail).ln_1p()).exp();
    FailureModel { p_bit, lambda, block_failure: tail, leading_term, success }
}
