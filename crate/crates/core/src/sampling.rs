//! Seeded samplers for keys, errors and encryption masks.

use num_bigint::BigInt;
use rand::seq::index;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use crate::ring::{expand_digits, BPoly, RingParams};
use crate::{Error, Result};

/// Default error width.
pub const DEFAULT_SIGMA: f64 = 3.19;

/// Gaussian samples are rejected beyond this many standard deviations.
pub const TAIL_CUT: f64 = 6.0;

/// A reproducible ChaCha20 stream identified by `(seed, stream_id)`.
#[derive(Clone, Debug)]
pub struct RngHandle {
    seed: [u8; 32],
    stream_id: u64,
    rng: ChaCha20Rng,
}

impl RngHandle {
    pub fn new(seed: [u8; 32], stream_id: u64) -> Self {
        let mut rng = ChaCha20Rng::from_seed(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn from_u64(seed: u64) -> Self {
        let mut bytes = [0u8; 32];
        bytes[..8].copy_from_slice(&seed.to_le_bytes());
        Self::new(bytes, 0)
    }

    /// Up to 64 hex digits; shorter seeds are zero-padded on the right.
    pub fn from_hex(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches("0x");
        let s = if s.len() % 2 == 1 { format!("0{s}") } else { s.to_string() };
        let bytes = hex::decode(&s).map_err(|e| Error::Param(format!("seed: {e}")))?;
        if bytes.len() > 32 {
            return Err(Error::Param("seed longer than 32 bytes".into()));
        }
        let mut seed = [0u8; 32];
        seed[..bytes.len()].copy_from_slice(&bytes);
        Ok(Self::new(seed, 0))
    }

    pub fn seed(&self) -> [u8; 32] {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A fresh handle on another stream of the same seed.
    pub fn substream(&self, stream_id: u64) -> Self {
        Self::new(self.seed, stream_id)
    }

    pub fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }
}

impl RngCore for RngHandle {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Exactly `h` entries set to a uniform sign, at uniformly chosen positions.
pub fn sample_hwt(h: usize, dim: usize, rng: &mut RngHandle) -> Result<Vec<i64>> {
    if h == 0 || h > dim {
        return Err(Error::Param(format!("Hamming weight {h} outside 1..={dim}")));
    }
    let mut out = vec![0i64; dim];
    for pos in index::sample(rng.rng(), dim, h) {
        out[pos] = if rng.rng().random::<bool>() { 1 } else { -1 };
    }
    Ok(out)
}

/// Rounded Gaussian with standard deviation `sigma`, cut at `TAIL_CUT * sigma`.
pub fn sample_dg(sigma: f64, dim: usize, rng: &mut RngHandle) -> Result<Vec<i64>> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Param(format!("sigma = {sigma} must be finite and nonnegative")));
    }
    if sigma == 0.0 {
        return Ok(vec![0; dim]);
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Param(e.to_string()))?;
    let cut = TAIL_CUT * sigma;
    Ok((0..dim)
        .map(|_| loop {
            let x: f64 = normal.sample(rng.rng());
            if x.abs() <= cut {
                break x.round() as i64;
            }
        })
        .collect())
}

/// Zero with probability `1 - rho`, otherwise a uniform sign.
pub fn sample_zo(rho: f64, dim: usize, rng: &mut RngHandle) -> Result<Vec<i64>> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::Param(format!("rho = {rho} outside (0, 1]")));
    }
    Ok((0..dim)
        .map(|_| {
            let u: f64 = rng.rng().random();
            if u < rho / 2.0 {
                -1
            } else if u < rho {
                1
            } else {
                0
            }
        })
        .collect())
}

/// Uniform `{0, 1}` coefficients.
pub fn sample_binary(dim: usize, rng: &mut RngHandle) -> Vec<i64> {
    (0..dim).map(|_| (rng.rng().next_u32() & 1) as i64).collect()
}

/// Signed bit decomposition of an `R`-layout vector into `BP`.
pub fn binarize(v: &[i64], params: &RingParams) -> Result<BPoly> {
    let big: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
    expand_digits(&big, params)
}
