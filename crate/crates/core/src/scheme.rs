//! Key generation, encryption and homomorphic operations.
//!
//! A ciphertext `(c0, c1)` decrypts to `c0 + c1 * s` in `BP`. Every ciphertext
//! carries an analytic bound on `||Dec(c) - m||_R` and the scale of its message.
//! There is no modulus chain: products keep their full scale.

use num_bigint::BigInt;

use crate::encoding::{decode, DecodeMode, PlainVec, Scale};
use crate::noise::{self, NoiseParams};
use crate::ring::{bp_add, bp_mul, bp_sub, monomial_shift, r_norm, BPoly, RingParams};
use crate::sampling::{binarize, sample_binary, sample_dg, sample_hwt, sample_zo, RngHandle, TAIL_CUT};
use crate::{Error, Result};

/// Probability of a nonzero entry in encryption masks.
pub const MASK_DENSITY: f64 = 0.5;

/// Everything key generation and noise tracking need besides the ring.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeParams {
    pub ring: RingParams,
    pub sigma: f64,
    pub h: usize,
    pub delta: f64,
    pub kappa: u32,
    pub b_max: f64,
    pub b_star: f64,
}

impl SchemeParams {
    /// `B_max = Delta / 2`; the refresh threshold defaults to the same value.
    pub fn new(ring: RingParams, sigma: f64, h: usize, delta: f64, kappa: u32) -> Result<Self> {
        if h == 0 || h > ring.n() {
            return Err(Error::Param(format!("h = {h} outside 1..={}", ring.n())));
        }
        if !(sigma >= 0.0) {
            return Err(Error::Param(format!("sigma = {sigma}")));
        }
        Scale::new(delta)?;
        Ok(Self { ring, sigma, h, delta, kappa, b_max: delta / 2.0, b_star: delta / 2.0 })
    }

    pub fn scale(&self) -> Scale {
        Scale::new(self.delta).expect("validated")
    }

    pub fn noise(&self) -> NoiseParams {
        NoiseParams {
            sigma: self.sigma,
            h: self.h,
            n: self.ring.n(),
            delta: self.delta,
            coeff_bound: self.ring.coeff_bound(),
            b_star: self.b_star,
            b_max: self.b_max,
            log2_p: 60.0,
            log2_q: 200.0,
        }
    }

    pub fn b_enc(&self) -> f64 {
        noise::b_enc(&self.noise())
    }

    /// Flooding width `2^kappa * B_max`.
    pub fn tau(&self) -> f64 {
        2f64.powi(self.kappa as i32) * self.b_max
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecretKey {
    pub s: BPoly,
    pub h: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PublicKey {
    pub b: BPoly,
    pub a: BPoly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalKey {
    pub b0: BPoly,
    pub a0: BPoly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefreshKeyMode {
    /// Encryptions of every coefficient of `s` under `pk`, with flooding.
    Production,
    /// Trivial encryptions `(s_i, 0)` and no flooding.
    Noiseless,
    Omit,
}

/// Refresh key, kept as `sum_i x^i * rk[i]` where `rk[i]` encrypts the `i`-th
/// coefficient of the secret. Refresh only ever needs this sum.
#[derive(Clone, Debug, PartialEq)]
pub struct RefreshKey {
    pub r0: BPoly,
    pub r1: BPoly,
    /// Noise bound of each entry `rk[i]`.
    pub entry_bound: f64,
    pub tau: f64,
    pub kappa: u32,
}

impl RefreshKey {
    /// Aggregate explicit entries; `entries.len()` must equal `K`.
    pub fn from_entries(entries: &[Ciphertext], k: usize, tau: f64, kappa: u32) -> Result<Self> {
        if entries.len() != k {
            return Err(Error::Key(format!("refresh key has {} entries, need {k}", entries.len())));
        }
        let mut r0 = entries[0].c0.clone();
        let mut r1 = entries[0].c1.clone();
        let mut entry_bound: f64 = entries[0].noise_bound;
        for (i, e) in entries.iter().enumerate().skip(1) {
            r0 = bp_add(&r0, &monomial_shift(&e.c0, i)?)?;
            r1 = bp_add(&r1, &monomial_shift(&e.c1, i)?)?;
            entry_bound = entry_bound.max(e.noise_bound);
        }
        Ok(Self { r0, r1, entry_bound, tau, kappa })
    }

    pub fn is_noiseless(&self) -> bool {
        self.entry_bound == 0.0 && self.r1.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ciphertext {
    pub c0: BPoly,
    pub c1: BPoly,
    pub noise_bound: f64,
    pub scale: f64,
}

impl Ciphertext {
    /// `(m, 0)`: decrypts to `m` with no noise.
    pub fn trivial(m: BPoly, scale: f64) -> Self {
        let c1 = BPoly::zero(m.len(), m.domain());
        Self { c0: m, c1, noise_bound: 0.0, scale }
    }
}

#[derive(Clone, Debug)]
pub struct KeySet {
    pub params: SchemeParams,
    pub sk: SecretKey,
    pub pk: PublicKey,
    pub evk: EvalKey,
    pub rk: Option<RefreshKey>,
}

fn binarized_dg(sigma: f64, params: &RingParams, rng: &mut RngHandle) -> Result<BPoly> {
    binarize(&sample_dg(sigma, params.n(), rng)?, params)
}

fn uniform_bp(params: &RingParams, rng: &mut RngHandle) -> BPoly {
    BPoly::from_i64(&sample_binary(params.k(), rng), params.domain())
}

pub fn keygen(params: &SchemeParams, rk_mode: RefreshKeyMode, rng: &mut RngHandle) -> Result<KeySet> {
    let ring = &params.ring;
    let s = binarize(&sample_hwt(params.h, ring.n(), rng)?, ring)?;
    let a = uniform_bp(ring, rng);
    let e = binarized_dg(params.sigma, ring, rng)?;
    let b = bp_add(&bp_mul(&a, &s)?.neg(), &e)?;

    let a0 = uniform_bp(ring, rng);
    let e0 = binarized_dg(params.sigma, ring, rng)?;
    let s2 = bp_mul(&s, &s)?;
    let b0 = bp_add(&bp_add(&bp_mul(&a0, &s)?.neg(), &e0)?, &s2)?;

    let sk = SecretKey { s, h: params.h };
    let pk = PublicKey { b, a };
    let rk = match rk_mode {
        RefreshKeyMode::Omit => None,
        RefreshKeyMode::Noiseless => Some(RefreshKey {
            r0: sk.s.clone(),
            r1: ring.zero_bp(),
            entry_bound: 0.0,
            tau: 0.0,
            kappa: params.kappa,
        }),
        RefreshKeyMode::Production => Some(aggregate_refresh_key(params, &sk, &pk, rng)?),
    };
    Ok(KeySet { params: *params, sk, pk, evk: EvalKey { b0, a0 }, rk })
}

/// Add `sign * x^shift * v` into `acc`, for a vector `v` given by its nonzeros.
fn accumulate_shifted(acc: &mut [i64], nonzeros: &[(usize, i64)], shift: usize) {
    let k = acc.len();
    for &(pos, val) in nonzeros {
        let m = pos + shift;
        if m < k {
            acc[m] += val;
        } else {
            acc[m - k] -= val;
        }
    }
}

/// Nonzero digits of the signed binary expansion of a small vector.
fn digit_nonzeros(v: &[i64], lambda: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    for (i, &x) in v.iter().enumerate() {
        let mag = x.unsigned_abs();
        for j in 0..lambda.min(64) {
            if (mag >> j) & 1 == 1 {
                out.push((i * lambda + j, x.signum()));
            }
        }
    }
    out
}

/// Same randomness, in the same order, as `K` calls to [`encrypt`] of the
/// constants `s_i`, but summed directly as `(V*b + s + E0, V*a + E1)`.
fn aggregate_refresh_key(
    params: &SchemeParams,
    sk: &SecretKey,
    pk: &PublicKey,
    rng: &mut RngHandle,
) -> Result<RefreshKey> {
    let ring = &params.ring;
    let k = ring.k();
    let lambda = ring.lambda_b() as usize;
    let mut v_acc = vec![0i64; k];
    let mut e0_acc = vec![0i64; k];
    let mut e1_acc = vec![0i64; k];
    for i in 0..k {
        let v = sample_zo(MASK_DENSITY, ring.n(), rng)?;
        let e0 = sample_dg(params.sigma, ring.n(), rng)?;
        let e1 = sample_dg(params.sigma, ring.n(), rng)?;
        accumulate_shifted(&mut v_acc, &digit_nonzeros(&v, lambda), i);
        accumulate_shifted(&mut e0_acc, &digit_nonzeros(&e0, lambda), i);
        accumulate_shifted(&mut e1_acc, &digit_nonzeros(&e1, lambda), i);
    }
    let d = ring.domain();
    let v = BPoly::from_i64(&v_acc, d);
    let r0 = bp_add(&bp_add(&bp_mul(&v, &pk.b)?, &sk.s)?, &BPoly::from_i64(&e0_acc, d))?;
    let r1 = bp_add(&bp_mul(&v, &pk.a)?, &BPoly::from_i64(&e1_acc, d))?;
    Ok(RefreshKey { r0, r1, entry_bound: params.b_enc(), tau: params.tau(), kappa: params.kappa })
}

/// Explicit per-coefficient refresh key entries. Quadratic in `K`.
pub fn refresh_key_entries(
    params: &SchemeParams,
    sk: &SecretKey,
    pk: &PublicKey,
    rng: &mut RngHandle,
) -> Result<Vec<Ciphertext>> {
    let ring = &params.ring;
    (0..ring.k())
        .map(|i| {
            let m = BPoly::constant(&sk.s.coeff(i), ring.k(), ring.domain());
            encrypt(pk, &m, 1.0, params, rng)
        })
        .collect()
}

/// `v * pk + (m + e0, e1)` with `v` ternary and `e0, e1` Gaussian.
pub fn encrypt(pk: &PublicKey, m: &BPoly, scale: f64, params: &SchemeParams, rng: &mut RngHandle) -> Result<Ciphertext> {
    let ring = &params.ring;
    let v = binarize(&sample_zo(MASK_DENSITY, ring.n(), rng)?, ring)?;
    let e0 = binarized_dg(params.sigma, ring, rng)?;
    let e1 = binarized_dg(params.sigma, ring, rng)?;
    let c0 = bp_add(&bp_add(&bp_mul(&v, &pk.b)?, m)?, &e0)?;
    let c1 = bp_add(&bp_mul(&v, &pk.a)?, &e1)?;
    Ok(Ciphertext { c0, c1, noise_bound: params.b_enc(), scale })
}

pub fn encrypt_slots(pk: &PublicKey, z: &PlainVec, params: &SchemeParams, rng: &mut RngHandle) -> Result<Ciphertext> {
    let m = crate::encoding::encode(z, params.scale(), &params.ring)?;
    encrypt(pk, &m, params.delta, params, rng)
}

/// `c0 + c1 * s`, no rounding.
pub fn decrypt_raw(sk: &SecretKey, c: &Ciphertext) -> Result<BPoly> {
    bp_add(&c.c0, &bp_mul(&c.c1, &sk.s)?)
}

pub fn decrypt(sk: &SecretKey, c: &Ciphertext, ring: &RingParams, mode: DecodeMode) -> Result<PlainVec> {
    let m = decrypt_raw(sk, c)?;
    decode(&m, Scale::new(c.scale.max(1.0))?, ring, mode)
}

fn check_scales(a: f64, b: f64) -> Result<()> {
    if (a - b).abs() > 1e-9 * a.abs().max(b.abs()) {
        return Err(Error::ScaleMismatch { left: a, right: b });
    }
    Ok(())
}

pub fn add(c1: &Ciphertext, c2: &Ciphertext) -> Result<Ciphertext> {
    check_scales(c1.scale, c2.scale)?;
    Ok(Ciphertext {
        c0: bp_add(&c1.c0, &c2.c0)?,
        c1: bp_add(&c1.c1, &c2.c1)?,
        noise_bound: c1.noise_bound + c2.noise_bound,
        scale: c1.scale,
    })
}

pub fn sub(c1: &Ciphertext, c2: &Ciphertext) -> Result<Ciphertext> {
    check_scales(c1.scale, c2.scale)?;
    Ok(Ciphertext {
        c0: bp_sub(&c1.c0, &c2.c0)?,
        c1: bp_sub(&c1.c1, &c2.c1)?,
        noise_bound: c1.noise_bound + c2.noise_bound,
        scale: c1.scale,
    })
}

/// The three tensor components `(b1 b2, a1 b2 + a2 b1, a1 a2)`.
pub fn tensor(c1: &Ciphertext, c2: &Ciphertext) -> Result<(BPoly, BPoly, BPoly)> {
    let d0 = bp_mul(&c1.c0, &c2.c0)?;
    let d1 = bp_add(&bp_mul(&c1.c1, &c2.c0)?, &bp_mul(&c2.c1, &c1.c0)?)?;
    let d2 = bp_mul(&c1.c1, &c2.c1)?;
    Ok((d0, d1, d2))
}

/// Tensor and relinearize. The output scale is the product of the inputs'.
pub fn mult(evk: &EvalKey, c1: &Ciphertext, c2: &Ciphertext, params: &SchemeParams) -> Result<Ciphertext> {
    let (d0, d1, d2) = tensor(c1, c2)?;
    Ok(Ciphertext {
        c0: bp_add(&d0, &bp_mul(&d2, &evk.b0)?)?,
        c1: bp_add(&d1, &bp_mul(&d2, &evk.a0)?)?,
        noise_bound: noise::b_mult_bin(c1.noise_bound, c2.noise_bound, &params.noise()),
        scale: c1.scale * c2.scale,
    })
}

/// `(c0 + a, c1)`; `a` must already be at the ciphertext's scale.
pub fn add_const(c: &Ciphertext, a: &BPoly) -> Result<Ciphertext> {
    Ok(Ciphertext { c0: bp_add(&c.c0, a)?, c1: c.c1.clone(), noise_bound: c.noise_bound, scale: c.scale })
}

/// `(a c0, a c1)` for a constant at scale 1; the scale is unchanged.
pub fn mul_const(c: &Ciphertext, a: &BPoly, ring: &RingParams) -> Result<Ciphertext> {
    mul_const_scaled(c, a, 1.0, ring)
}

/// `mul_const` for a constant encoded at `const_scale`.
pub fn mul_const_scaled(c: &Ciphertext, a: &BPoly, const_scale: f64, ring: &RingParams) -> Result<Ciphertext> {
    Ok(Ciphertext {
        c0: bp_mul(a, &c.c0)?,
        c1: bp_mul(a, &c.c1)?,
        noise_bound: r_norm(a, ring)? * c.noise_bound,
        scale: c.scale * const_scale,
    })
}

/// Multiply by an integer scalar.
pub fn mul_scalar(c: &Ciphertext, k: &BigInt) -> Ciphertext {
    let mag = num_traits::Signed::abs(k);
    let factor = num_traits::ToPrimitive::to_f64(&mag).unwrap_or(f64::INFINITY);
    Ciphertext {
        c0: c.c0.scalar_mul(k),
        c1: c.c1.scalar_mul(k),
        noise_bound: c.noise_bound * factor,
        scale: c.scale,
    }
}

/// Strictly above the threshold.
pub fn thresh(b_max: f64, b0: f64) -> bool {
    b0 > b_max
}

/// Re-encrypt homomorphically: `t = (c0, 0) + sum_i mul_const(rk[i], c1 x^i)`,
/// then flood with `DG(tau^2)` and a fresh public-key mask.
///
/// With a noiseless key and `tau = 0` this is the identity on `Dec_raw`.
pub fn refresh(c: &Ciphertext, rk: &RefreshKey, pk: &PublicKey, params: &SchemeParams, rng: &mut RngHandle) -> Result<Ciphertext> {
    let ring = &params.ring;
    let t0 = bp_add(&c.c0, &bp_mul(&c.c1, &rk.r0)?)?;
    let t1 = bp_mul(&c.c1, &rk.r1)?;

    let mut bound = c.noise_bound;
    if rk.entry_bound > 0.0 {
        // ||c1 x^i||_R depends only on i mod lambda_B
        let mut per_block = 0.0;
        for r in 0..ring.lambda_b() as usize {
            per_block += r_norm(&monomial_shift(&c.c1, r)?, ring)?;
        }
        bound += ring.n() as f64 * per_block * rk.entry_bound;
    }
    if rk.tau == 0.0 {
        return Ok(Ciphertext { c0: t0, c1: t1, noise_bound: bound, scale: c.scale });
    }
    if TAIL_CUT * rk.tau >= ring.coeff_bound() {
        return Err(Error::Param(format!(
            "flooding width 2^{:.1} does not fit {}-bit coefficients",
            rk.tau.log2(),
            ring.lambda_b()
        )));
    }
    let v = binarize(&sample_zo(MASK_DENSITY, ring.n(), rng)?, ring)?;
    let f0 = binarized_dg(rk.tau, ring, rng)?;
    let f1 = binarized_dg(rk.tau, ring, rng)?;
    let c0 = bp_add(&bp_add(&t0, &f0)?, &bp_mul(&v, &pk.b)?)?;
    let c1 = bp_add(&bp_add(&t1, &f1)?, &bp_mul(&v, &pk.a)?)?;
    bound += noise::b_enc_raw(rk.tau, ring.n(), params.h);
    Ok(Ciphertext { c0, c1, noise_bound: bound, scale: c.scale })
}
