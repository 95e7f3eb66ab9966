//! Canonical embedding for power-of-two cyclotomics `X^N + 1`.
//!
//! With `zeta = exp(-2*pi*i / 2N)`, the full embedding evaluates a polynomial at
//! `zeta^j` for odd `j`, ordered `j = 1, 3, 5, ...`. The slot set `T` is
//! `{ j = 1 mod 4 }`, ordered `j = 4t + 1`; its negatives cover the rest.

use std::cell::RefCell;
use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft(buf: &mut [Complex64], inverse: bool) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        let plan = if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        };
        plan.process(buf);
    });
}

fn zeta_pow(k: usize, n: usize) -> Complex64 {
    let angle = -PI * k as f64 / n as f64;
    Complex64::new(angle.cos(), angle.sin())
}

/// Values at every primitive `2N`-th root, `j = 2t + 1`.
pub fn embed_all(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let mut buf: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(k, &a)| zeta_pow(k, n) * a)
        .collect();
    fft(&mut buf, false);
    buf
}

/// Values at the slot roots `j = 4t + 1`, `t < N/2`.
pub fn embed_slots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let half = n / 2;
    let mut buf: Vec<Complex64> = (0..half)
        .map(|r| zeta_pow(r, n) * coeffs[r] + zeta_pow(r + half, n) * coeffs[r + half])
        .collect();
    fft(&mut buf, false);
    buf
}

/// Real coefficients of the unique polynomial whose slot values are `z`
/// (and conjugates on the mirrored roots).
pub fn inverse_embed_slots(z: &[Complex64]) -> Vec<f64> {
    let half = z.len();
    let n = 2 * half;
    let mut buf = z.to_vec();
    fft(&mut buf, true);
    (0..n)
        .map(|k| {
            let v = zeta_pow(k, n).conj() * buf[k % half];
            2.0 * v.re / n as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_eval(coeffs: &[f64], j: usize) -> Complex64 {
        let n = coeffs.len();
        coeffs
            .iter()
            .enumerate()
            .map(|(k, &a)| zeta_pow((j * k) % (2 * n), n) * a)
            .sum()
    }

    #[test]
    fn fft_matches_naive_evaluation() {
        let coeffs: Vec<f64> = (0..16).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let all = embed_all(&coeffs);
        for (t, v) in all.iter().enumerate() {
            assert!((v - naive_eval(&coeffs, 2 * t + 1)).norm() < 1e-9);
        }
        let slots = embed_slots(&coeffs);
        for (t, v) in slots.iter().enumerate() {
            assert!((v - naive_eval(&coeffs, 4 * t + 1)).norm() < 1e-9);
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let z: Vec<Complex64> = (0..8)
            .map(|i| Complex64::new(i as f64 - 3.0, (i * i) as f64 * 0.5))
            .collect();
        let coeffs = inverse_embed_slots(&z);
        let back = embed_slots(&coeffs);
        for (a, b) in z.iter().zip(&back) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn mirrored_roots_are_conjugates() {
        let coeffs: Vec<f64> = (0..8).map(|i| i as f64 * 1.5 - 2.0).collect();
        let all = embed_all(&coeffs);
        let n = coeffs.len();
        // j and 2N - j are conjugate roots; index of j = 2t+1 is t.
        for t in 0..n {
            let mirror = (2 * n - (2 * t + 1) - 1) / 2;
            assert!((all[t] - all[mirror].conj()).norm() < 1e-9);
        }
    }
}
