//! Slot encoding: complex vectors to `BP` and back.
//!
//! `encode` scales by `delta`, inverts the slot embedding, rounds each real
//! coefficient half-up and bit-expands the result. `decode` contracts, evaluates
//! at the slot roots and divides by the scale.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rustfft::num_complex::Complex64;

use crate::ring::{contract_digits, embed_slots, expand_digits, inverse_embed_slots};
use crate::ring::{BPoly, RPoly, RingParams};
use crate::{Error, Result};

/// `N/2` complex slots.
#[derive(Clone, Debug, PartialEq)]
pub struct PlainVec {
    pub slots: Vec<Complex64>,
}

impl PlainVec {
    pub fn new(slots: Vec<Complex64>) -> Self {
        Self { slots }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self { slots: values.iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    pub fn zeros(len: usize) -> Self {
        Self { slots: vec![Complex64::new(0.0, 0.0); len] }
    }

    pub fn constant(value: Complex64, len: usize) -> Self {
        Self { slots: vec![value; len] }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Largest slot-wise distance.
    pub fn max_distance(&self, other: &PlainVec) -> f64 {
        self.slots
            .iter()
            .zip(&other.slots)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Scaling factor `delta >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Scale(f64);

impl Scale {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta >= 1.0) || !delta.is_finite() {
            return Err(Error::Param(format!("scale {delta} must be finite and >= 1")));
        }
        Ok(Self(delta))
    }

    pub fn pow2(bits: u32) -> Self {
        Self(2f64.powi(bits as i32))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Whether a fresh ciphertext with noise `b_enc` still decodes exactly.
    pub fn supports_exact_recovery(self, n: usize, b_enc: f64) -> bool {
        self.0 > n as f64 + 2.0 * b_enc
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeMode {
    /// Round every slot to the nearest Gaussian integer.
    Exact,
    Approximate,
}

fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// The rounded, scaled inverse embedding, before bit expansion.
pub fn encode_to_r(z: &PlainVec, delta: Scale, params: &RingParams) -> Result<RPoly> {
    if z.len() != params.slots() {
        return Err(Error::Dimension { expected: params.slots(), got: z.len() });
    }
    let scaled: Vec<Complex64> = z.slots.iter().map(|v| v * delta.value()).collect();
    let coeffs = inverse_embed_slots(&scaled);
    let mut out = Vec::with_capacity(coeffs.len());
    for (i, c) in coeffs.into_iter().enumerate() {
        let r = round_half_up(c);
        let bits = params.lambda_b();
        if !r.is_finite() || r.abs() >= 2f64.powi(bits as i32) {
            return Err(Error::CoefficientOverflow { index: i, bits, value: format!("{r}") });
        }
        out.push(BigInt::from(r as i64));
    }
    Ok(RPoly::new(out))
}

pub fn encode(z: &PlainVec, delta: Scale, params: &RingParams) -> Result<BPoly> {
    bin_expand(&encode_to_r(z, delta, params)?, params)
}

pub fn decode(m: &BPoly, delta: Scale, params: &RingParams, mode: DecodeMode) -> Result<PlainVec> {
    let a = bin_contract(m, params)?;
    Ok(decode_r(&a, delta, mode))
}

/// Evaluate an `R` element at the slot roots and unscale.
pub fn decode_r(a: &RPoly, delta: Scale, mode: DecodeMode) -> PlainVec {
    let coeffs: Vec<f64> = a.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
    let slots = embed_slots(&coeffs)
        .into_iter()
        .map(|v| {
            let v = v / delta.value();
            match mode {
                DecodeMode::Exact => Complex64::new(round_half_up(v.re), round_half_up(v.im)),
                DecodeMode::Approximate => v,
            }
        })
        .collect();
    PlainVec { slots }
}

/// `p^-1`: signed bit expansion of every coefficient.
pub fn bin_expand(a: &RPoly, params: &RingParams) -> Result<BPoly> {
    expand_digits(&a.coeffs, params)
}

/// `p`: recombine each block of `lambda_B` digits.
pub fn bin_contract(m: &BPoly, params: &RingParams) -> Result<RPoly> {
    contract_digits(m, params)
}

/// Encode a real scalar as the constant polynomial `round(value * delta)`.
pub fn encode_scalar(value: f64, delta: Scale, params: &RingParams) -> Result<BPoly> {
    let mut coeffs = vec![BigInt::from(0); params.n()];
    coeffs[0] = BigInt::from(round_half_up(value * delta.value()) as i64);
    bin_expand(&RPoly::new(coeffs), params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{bp_add, r_norm, CoeffDomain};
    use crate::sampling::RngHandle;
    use proptest::prelude::*;
    use rand::Rng;

    fn params(n: usize) -> RingParams {
        RingParams::new(n, 32, CoeffDomain::Exact).unwrap()
    }

    fn gaussian_ints(len: usize, bound: i64, rng: &mut RngHandle) -> PlainVec {
        PlainVec::new(
            (0..len)
                .map(|_| {
                    let re = rng.rng().random_range(-bound..=bound) as f64;
                    let im = rng.rng().random_range(-bound..=bound) as f64;
                    Complex64::new(re, im)
                })
                .collect(),
        )
    }

    #[test]
    fn zero_and_constant() {
        let p = params(8);
        let d = Scale::pow2(6);
        assert!(encode(&PlainVec::zeros(4), d, &p).unwrap().is_zero());
        let z = PlainVec::constant(Complex64::new(3.0, 0.0), 4);
        let r = encode_to_r(&z, d, &p).unwrap();
        assert_eq!(r, RPoly::from_i64(&[192, 0, 0, 0, 0, 0, 0, 0]));
        let back = decode(&p.zero_bp(), d, &p, DecodeMode::Exact).unwrap();
        assert_eq!(back, PlainVec::zeros(4));
    }

    #[test]
    fn spec_polynomial_expansion() {
        // A(X) = X^24 + 10X^22 + 8X^17 + 5X^10 + 15X + 1 at lambda_B = 4
        let p = RingParams::new(32, 4, CoeffDomain::Exact).unwrap();
        let mut a = vec![0i64; 32];
        a[24] = 1;
        a[22] = 10;
        a[17] = 8;
        a[10] = 5;
        a[1] = 15;
        a[0] = 1;
        let m = bin_expand(&RPoly::from_i64(&a), &p).unwrap();
        // oracle: direct bit walk
        let mut expect = vec![0i64; 128];
        for (i, &c) in a.iter().enumerate() {
            for j in 0..4 {
                if (c >> j) & 1 == 1 {
                    expect[4 * i + j] = 1;
                }
            }
        }
        assert_eq!(m.to_i64().unwrap(), expect);
        let support: Vec<usize> = (0..128).rev().filter(|&i| expect[i] != 0).collect();
        assert_eq!(support, vec![96, 91, 89, 71, 42, 40, 7, 6, 5, 4, 0]);
        assert_eq!(bin_contract(&m, &p).unwrap(), RPoly::from_i64(&a));
    }

    #[test]
    fn overflow_reports_index() {
        let p = RingParams::new(8, 4, CoeffDomain::Exact).unwrap();
        let z = PlainVec::constant(Complex64::new(1.0, 0.0), 4);
        let err = encode(&z, Scale::pow2(4), &p).unwrap_err();
        assert!(matches!(err, Error::CoefficientOverflow { index: 0, bits: 4, .. }));
        assert!(encode(&PlainVec::zeros(3), Scale::pow2(4), &p).is_err());
        assert!(Scale::new(0.5).is_err());
    }

    #[test]
    fn exact_roundtrip_many_sizes() {
        let mut rng = RngHandle::from_u64(11);
        for n in [32, 64, 256, 1024] {
            let p = params(n);
            for _ in 0..20 {
                let z = gaussian_ints(n / 2, 100, &mut rng);
                let m = encode(&z, Scale::pow2(20), &p).unwrap();
                assert_eq!(decode(&m, Scale::pow2(20), &p, DecodeMode::Exact).unwrap(), z);
            }
        }
    }

    #[test]
    fn encoding_error_within_rounding_bound() {
        let mut rng = RngHandle::from_u64(12);
        let n = 128;
        let p = params(n);
        let d = Scale::pow2(20);
        for _ in 0..50 {
            let z = PlainVec::new(
                (0..n / 2)
                    .map(|_| Complex64::new(rng.rng().random_range(-1.0..1.0), rng.rng().random_range(-1.0..1.0)))
                    .collect(),
            );
            let m = encode(&z, d, &p).unwrap();
            let got = decode(&m, d, &p, DecodeMode::Approximate).unwrap();
            // rounding moves each coefficient by at most 1/2; its embedding by at most N/2
            assert!(got.max_distance(&z) <= (n as f64).sqrt() / (2.0 * d.value()) * (n as f64).sqrt());
        }
    }

    #[test]
    fn approximate_decode_perturbation() {
        let mut rng = RngHandle::from_u64(13);
        let p = params(64);
        let d = Scale::pow2(20);
        let z = gaussian_ints(32, 50, &mut rng);
        let m = encode(&z, d, &p).unwrap();
        let e = crate::sampling::binarize(&crate::sampling::sample_dg(3.19, 64, &mut rng).unwrap(), &p).unwrap();
        let noisy = bp_add(&m, &e).unwrap();
        let a = decode(&m, d, &p, DecodeMode::Approximate).unwrap();
        let b = decode(&noisy, d, &p, DecodeMode::Approximate).unwrap();
        assert!(a.max_distance(&b) <= r_norm(&e, &p).unwrap() / d.value() + 1e-12);
    }

    #[test]
    fn real_coefficients_embed_conjugate_symmetric() {
        let coeffs: Vec<f64> = (0..16).map(|i| (i as f64 * 0.7).sin() * 100.0).collect();
        let all = crate::ring::embed_all(&coeffs);
        for t in 0..16 {
            assert!((all[t] - all[15 - t].conj()).norm() < 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn decode_is_linear(a in proptest::collection::vec(-1000i64..1000, 32),
                            b in proptest::collection::vec(-1000i64..1000, 32)) {
            let p = params(32);
            let d = Scale::pow2(10);
            let to_bp = |v: &[i64]| bin_expand(&RPoly::from_i64(v), &p).unwrap();
            let (ma, mb) = (to_bp(&a), to_bp(&b));
            let sum = bp_add(&ma, &mb).unwrap();
            let lhs = decode(&sum, d, &p, DecodeMode::Approximate).unwrap();
            let da = decode(&ma, d, &p, DecodeMode::Approximate).unwrap();
            let db = decode(&mb, d, &p, DecodeMode::Approximate).unwrap();
            for i in 0..16 {
                let rhs = da.slots[i] + db.slots[i];
                prop_assert!((lhs.slots[i] - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
            }
        }

        #[test]
        fn expand_contract_roundtrip(v in proptest::collection::vec(i32::MIN as i64 + 1..=i32::MAX as i64, 8)) {
            let p = RingParams::new(8, 32, CoeffDomain::Exact).unwrap();
            let a = RPoly::from_i64(&v);
            prop_assert_eq!(bin_contract(&bin_expand(&a, &p).unwrap(), &p).unwrap(), a);
        }
    }
}
