//! Closed-form noise bounds and the standard-CKKS comparator.
//!
//! Bounds are in the `||.||_R` norm (canonical norm after contraction).
//! Formulas that can exceed the `f64` range have `log2` twins.

use std::f64::consts::SQRT_2;

/// Inputs shared by every bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams {
    pub sigma: f64,
    pub h: usize,
    pub n: usize,
    pub delta: f64,
    /// Plaintext coefficient bound `B`, normally `2^lambda_B`.
    pub coeff_bound: f64,
    /// Refresh threshold.
    pub b_star: f64,
    pub b_max: f64,
    /// Comparator rescale modulus, as `log2 P`.
    pub log2_p: f64,
    /// Comparator level modulus, as `log2 q_l`.
    pub log2_q: f64,
}

impl NoiseParams {
    /// The comparison setting `N = 8192`, `Delta = B = 2^40`, `h = 192`,
    /// `q_l = 2^200`, `P = 2^60`.
    pub fn seal_like() -> Self {
        let delta = 2f64.powi(40);
        Self {
            sigma: 3.19,
            h: 192,
            n: 8192,
            delta,
            coeff_bound: delta,
            b_star: delta / 2.0,
            b_max: delta / 2.0,
            log2_p: 60.0,
            log2_q: 200.0,
        }
    }
}

pub fn b_enc_raw(sigma: f64, n: usize, h: usize) -> f64 {
    let n = n as f64;
    8.0 * SQRT_2 * sigma * n + 6.0 * sigma * n.sqrt() + 16.0 * sigma * (h as f64 * n).sqrt()
}

/// Fresh-encryption bound.
pub fn b_enc(p: &NoiseParams) -> f64 {
    b_enc_raw(p.sigma, p.n, p.h)
}

/// Encoding rounding bound `sqrt(N) / (2 Delta)`.
pub fn b_ecd(p: &NoiseParams) -> f64 {
    (p.n as f64).sqrt() / (2.0 * p.delta)
}

/// Relinearized product bound, with `dim` in the `6 sigma dim` term.
pub fn b_mult_bin_dim(b1: f64, b2: f64, p: &NoiseParams, dim: usize) -> f64 {
    let h = p.h as f64;
    b1 * b2
        + (b1 + b2) * (p.coeff_bound + h)
        + h * b1 * b2
        + h * (b1 + b2)
        + 6.0 * p.sigma * dim as f64
}

pub fn b_mult_bin(b1: f64, b2: f64, p: &NoiseParams) -> f64 {
    b_mult_bin_dim(b1, b2, p, p.n)
}

fn log2_sum(terms: &[f64]) -> f64 {
    let finite: Vec<f64> = terms.iter().copied().filter(|t| t.is_finite()).collect();
    let max = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + finite.iter().map(|t| (t - max).exp2()).sum::<f64>().log2()
}

fn lg(x: f64) -> f64 {
    if x > 0.0 {
        x.log2()
    } else {
        f64::NEG_INFINITY
    }
}

/// `log2` of the standard-CKKS product bound
/// `nu1 B2 + nu2 B1 + B1 B2 + q_l/P * 8 sigma N / sqrt(3) + N + 8/3 sqrt(h)`.
pub fn b_mult_std_log2(nu1: f64, nu2: f64, b1: f64, b2: f64, p: &NoiseParams) -> f64 {
    let rescale = p.log2_q - p.log2_p + lg(8.0 * p.sigma * p.n as f64 / 3f64.sqrt());
    log2_sum(&[
        lg(nu1) + lg(b2),
        lg(nu2) + lg(b1),
        lg(b1) + lg(b2),
        rescale,
        lg(p.n as f64 + 8.0 / 3.0 * (p.h as f64).sqrt()),
    ])
}

pub fn b_mult_std(nu1: f64, nu2: f64, b1: f64, b2: f64, p: &NoiseParams) -> f64 {
    b_mult_std_log2(nu1, nu2, b1, b2, p).exp2()
}

/// Lower bound on `Delta` beyond which the binary product bound wins, at `b_enc`.
pub fn prop1_threshold_at(p: &NoiseParams, b_enc: f64) -> f64 {
    let h = p.h as f64;
    let tail = 6.0 * p.sigma * p.n as f64;
    4.0 * h + h * b_enc + if tail == 0.0 { 0.0 } else { tail / b_enc }
}

pub fn prop1_threshold(p: &NoiseParams) -> f64 {
    prop1_threshold_at(p, b_enc(p))
}

pub fn prop1_holds(p: &NoiseParams) -> bool {
    p.delta > prop1_threshold(p)
}

/// One squaring step `(2B + 4h) B_prev + (1 + h) B_prev^2 + 6 sigma N`.
pub fn phi_square_update(b_prev: f64, p: &NoiseParams) -> f64 {
    let h = p.h as f64;
    (2.0 * p.coeff_bound + 4.0 * h) * b_prev + (1.0 + h) * b_prev * b_prev + 6.0 * p.sigma * p.n as f64
}

pub fn relative_error(bound: f64, delta: f64) -> f64 {
    bound / delta
}

/// Ciphertext and evaluation-key sizes in bytes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MemoryModel {
    pub ct_ckks: u64,
    pub ct_bin: u64,
    pub evk_ckks: u64,
    pub evk_bin: u64,
}

/// `2N*30`, `2K*8`, `4N*30`, `4K*8` bytes with `K = N * lambda_B`.
pub fn memory_model(n: usize, lambda_b: u32) -> Option<MemoryModel> {
    if n == 0 || lambda_b == 0 {
        return None;
    }
    let n = n as u64;
    let k = n * lambda_b as u64;
    Some(MemoryModel {
        ct_ckks: 2 * n * 30,
        ct_bin: 2 * k * 8,
        evk_ckks: 4 * n * 30,
        evk_bin: 4 * k * 8,
    })
}
