//! Powers, polynomials and truncated power series over ciphertexts, with
//! refresh whenever the predicted bound reaches the threshold `b_star`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Zero};

use crate::noise::{b_mult_bin, phi_square_update, NoiseParams};
use crate::ring::BPoly;
use crate::sampling::RngHandle;
use crate::scheme::{add, add_const, mul_scalar, mult, refresh, Ciphertext, KeySet};
use crate::{Error, Result};

/// Hard limit on series length for [`truncation_degree`].
pub const SERIES_CAP: usize = 128;

pub struct EvalContext<'k> {
    pub keys: &'k KeySet,
    pub b_star: f64,
    pub refresh_count: usize,
    rng: RngHandle,
    /// Exponents whose node was refreshed, in evaluation order.
    pub refreshed: Vec<usize>,
}

impl<'k> EvalContext<'k> {
    pub fn new(keys: &'k KeySet, b_star: f64, rng: RngHandle) -> Result<Self> {
        let b_enc = keys.params.b_enc();
        if !(b_star > b_enc) {
            return Err(Error::Param(format!("refresh threshold {b_star:.3e} must exceed B_enc = {b_enc:.3e}")));
        }
        Ok(Self { keys, b_star, refresh_count: 0, rng, refreshed: Vec::new() })
    }

    pub fn noise(&self) -> NoiseParams {
        let mut p = self.keys.params.noise();
        p.b_star = self.b_star;
        p
    }

    /// Attach `candidate` as the bound, or refresh and restart from `B_enc`.
    fn settle(&mut self, mut c: Ciphertext, candidate: f64, exponent: usize) -> Result<Ciphertext> {
        if candidate < self.b_star {
            c.noise_bound = candidate;
            return Ok(c);
        }
        let rk = self.keys.rk.as_ref().ok_or_else(|| Error::Key("refresh needed but no refresh key".into()))?;
        let mut fresh = refresh(&c, rk, &self.keys.pk, &self.keys.params, &mut self.rng)?;
        fresh.noise_bound = self.keys.params.b_enc();
        self.refresh_count += 1;
        self.refreshed.push(exponent);
        Ok(fresh)
    }

    fn square(&mut self, c: &Ciphertext, exponent: usize) -> Result<Ciphertext> {
        let sq = mult(&self.keys.evk, c, c, &self.keys.params)?;
        let candidate = phi_square_update(c.noise_bound, &self.noise());
        self.settle(sq, candidate, exponent)
    }

    fn product(&mut self, a: &Ciphertext, b: &Ciphertext, exponent: usize) -> Result<Ciphertext> {
        let p = mult(&self.keys.evk, a, b, &self.keys.params)?;
        let candidate = b_mult_bin(a.noise_bound, b.noise_bound, &self.noise());
        self.settle(p, candidate, exponent)
    }
}

/// `c^d` for `d = 2^r` by `r` squarings.
pub fn power(c: &Ciphertext, d: usize, ctx: &mut EvalContext) -> Result<Ciphertext> {
    if !d.is_power_of_two() {
        return Err(Error::Param(format!("power exponent {d} is not a power of two")));
    }
    let mut cur = c.clone();
    let mut e = 1;
    while e < d {
        e *= 2;
        cur = ctx.square(&cur, e)?;
    }
    Ok(cur)
}

/// Refresh decisions of `r` squarings starting from bound `b0`, without
/// touching ciphertexts.
pub fn refresh_schedule(b0: f64, r: usize, b_enc: f64, p: &NoiseParams) -> Vec<bool> {
    let mut b = b0;
    (0..r)
        .map(|_| {
            let cand = phi_square_update(b, p);
            if cand < p.b_star {
                b = cand;
                false
            } else {
                b = b_enc;
                true
            }
        })
        .collect()
}

/// Summary of one polynomial evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyEvalReport {
    pub degree: usize,
    pub refreshes: usize,
    /// `sum_j |a_j| * B(x^j)`, each power measured at its own scale.
    pub term_bound: f64,
    /// `min(sum_j |a_j| * B_enc, B*)`.
    pub min_formula: f64,
    /// Output bound relative to the output scale.
    pub relative_bound: f64,
}

struct PowerCache {
    nodes: HashMap<usize, Ciphertext>,
}

impl PowerCache {
    fn get(&mut self, j: usize, ctx: &mut EvalContext) -> Result<Ciphertext> {
        if let Some(c) = self.nodes.get(&j) {
            return Ok(c.clone());
        }
        let c = if j.is_power_of_two() {
            let half = self.get(j / 2, ctx)?;
            ctx.square(&half, j)?
        } else {
            let hi = 1usize << (usize::BITS - 1 - j.leading_zeros());
            let a = self.get(hi, ctx)?;
            let b = self.get(j - hi, ctx)?;
            ctx.product(&a, &b, j)?
        };
        self.nodes.insert(j, c.clone());
        Ok(c)
    }
}

/// `sum_j a_j x^j`. Term `j` sits at scale `Delta^j`; it is lifted to the
/// common output scale `Delta^(d+1)` by the integer `round(a_j Delta^(d+1-j))`.
pub fn poly_eval(c: &Ciphertext, coeffs: &[f64], ctx: &mut EvalContext) -> Result<(Ciphertext, PolyEvalReport)> {
    if coeffs.is_empty() || coeffs.iter().any(|a| !a.is_finite()) {
        return Err(Error::Param("polynomial coefficients must be finite and nonempty".into()));
    }
    let degree = coeffs.len() - 1;
    let base = c.scale;
    let out_scale = base.powi(degree as i32 + 1);
    let ring = ctx.keys.params.ring;
    let start = ctx.refresh_count;

    let mut cache = PowerCache { nodes: HashMap::from([(1, c.clone())]) };
    let mut acc: Option<Ciphertext> = None;
    let mut term_bound = 0.0;
    for (j, &a) in coeffs.iter().enumerate().skip(1) {
        if a == 0.0 {
            continue;
        }
        let xj = cache.get(j, ctx)?;
        term_bound += a.abs() * xj.noise_bound;
        let k = BigInt::from_f64((a * base.powi((degree + 1 - j) as i32)).round())
            .ok_or_else(|| Error::Param(format!("coefficient {a} does not scale")))?;
        if k.is_zero() {
            continue;
        }
        let mut term = mul_scalar(&xj, &k);
        term.scale = out_scale;
        acc = Some(match acc {
            Some(s) => add(&s, &term)?,
            None => term,
        });
    }
    let mut out = acc.unwrap_or_else(|| Ciphertext::trivial(ring.zero_bp(), out_scale));
    if coeffs[0] != 0.0 {
        let k0 = BigInt::from_f64((coeffs[0] * out_scale).round())
            .ok_or_else(|| Error::Param("constant term does not scale".into()))?;
        out = add_const(&out, &BPoly::constant(&k0, ring.k(), ring.domain()))?;
    }

    let b_enc = ctx.keys.params.b_enc();
    let sum_abs: f64 = coeffs.iter().skip(1).map(|a| a.abs()).sum();
    let report = PolyEvalReport {
        degree,
        refreshes: ctx.refresh_count - start,
        term_bound,
        min_formula: (sum_abs * b_enc).min(ctx.b_star),
        relative_bound: out.noise_bound / out_scale,
    };
    Ok((out, report))
}

/// A power series `sum_j a_j x^j` on `|x| <= domain_bound`.
pub struct SeriesSpec {
    coeff: Box<dyn Fn(usize) -> f64 + Send + Sync>,
    pub domain_bound: f64,
    pub epsilon: f64,
}

impl SeriesSpec {
    pub fn new(coeff: impl Fn(usize) -> f64 + Send + Sync + 'static, domain_bound: f64, epsilon: f64) -> Self {
        Self { coeff: Box::new(coeff), domain_bound, epsilon }
    }

    pub fn exp(domain_bound: f64, epsilon: f64) -> Self {
        Self::new(|j| 1.0 / (1..=j).map(|i| i as f64).product::<f64>(), domain_bound, epsilon)
    }

    pub fn identity(domain_bound: f64, epsilon: f64) -> Self {
        Self::new(|j| if j == 1 { 1.0 } else { 0.0 }, domain_bound, epsilon)
    }

    pub fn coeff(&self, j: usize) -> f64 {
        (self.coeff)(j)
    }

    pub fn coefficients(&self, degree: usize) -> Vec<f64> {
        (0..=degree).map(|j| self.coeff(j)).collect()
    }

    /// Partial sum through `degree` at a plaintext point.
    pub fn eval(&self, x: f64, degree: usize) -> f64 {
        self.coefficients(degree).iter().rev().fold(0.0, |acc, a| acc * x + a)
    }
}

/// Smallest `D` with `sum_{j > D} |a_j| Q^j <= epsilon`, summing explicitly up
/// to [`SERIES_CAP`] and bounding the rest by a geometric majorant.
pub fn truncation_degree(s: &SeriesSpec) -> Result<usize> {
    let q = s.domain_bound;
    let terms: Vec<f64> = (0..=SERIES_CAP).map(|j| s.coeff(j).abs() * q.powi(j as i32)).collect();
    let last = terms[SERIES_CAP];
    let beyond = if last == 0.0 {
        0.0
    } else {
        let prev = terms[SERIES_CAP - 1];
        let r = if prev > 0.0 { last / prev } else { f64::INFINITY };
        if r < 1.0 {
            last * r / (1.0 - r)
        } else {
            f64::INFINITY
        }
    };
    let mut tail = beyond;
    let mut best = None;
    for d in (0..SERIES_CAP).rev() {
        tail += terms[d + 1];
        if tail <= s.epsilon {
            best = Some(d);
        } else {
            break;
        }
    }
    best.ok_or(Error::Convergence { cap: SERIES_CAP })
}

/// Evaluate the series truncated at [`truncation_degree`].
pub fn analytic_eval(c: &Ciphertext, s: &SeriesSpec, ctx: &mut EvalContext) -> Result<(Ciphertext, PolyEvalReport)> {
    let d = truncation_degree(s)?;
    poly_eval(c, &s.coefficients(d), ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::b_enc;

    #[test]
    fn exp_truncation_degree() {
        // oracle: direct tail sums of 1/j!
        let fact = |j: usize| (1..=j).map(|i| i as f64).product::<f64>();
        let tail = |d: usize| (d + 1..60).map(|j| 1.0 / fact(j)).sum::<f64>();
        assert!(tail(9) < 1e-6 && tail(8) > 1e-6);
        assert_eq!(truncation_degree(&SeriesSpec::exp(1.0, 1e-6)).unwrap(), 9);
        assert!(tail(7) < 1e-4 && tail(6) > 1e-4);
        assert_eq!(truncation_degree(&SeriesSpec::exp(1.0, 1e-4)).unwrap(), 7);
    }

    #[test]
    fn degenerate_series() {
        assert_eq!(truncation_degree(&SeriesSpec::new(|_| 0.0, 1.0, 1e-9)).unwrap(), 0);
        assert_eq!(truncation_degree(&SeriesSpec::exp(1.0, 10.0)).unwrap(), 0);
        // geometric series at the edge of convergence
        let err = truncation_degree(&SeriesSpec::new(|_| 1.0, 1.0, 1e-3)).unwrap_err();
        assert!(matches!(err, Error::Convergence { cap: SERIES_CAP }));
    }

    #[test]
    fn partial_sums() {
        let s = SeriesSpec::exp(1.0, 1e-6);
        assert!((s.eval(0.5, 12) - 0.5f64.exp()).abs() < 1e-12);
        assert_eq!(SeriesSpec::identity(1.0, 0.0).eval(0.3, 4), 0.3);
    }

    #[test]
    fn squarings_all_refresh_at_large_scale() {
        let mut p = NoiseParams::seal_like();
        p.b_star = 2f64.powi(39);
        let be = b_enc(&p);
        assert!((be - 3.3e5).abs() / 3.3e5 < 0.15);
        assert!(refresh_schedule(be, 5, be, &p).iter().all(|&r| r));
    }

    #[test]
    fn schedule_without_refresh_below_threshold() {
        let mut p = NoiseParams::seal_like();
        p.b_star = f64::INFINITY;
        assert!(refresh_schedule(1.0, 3, 1.0, &p).iter().all(|&r| !r));
    }
}
