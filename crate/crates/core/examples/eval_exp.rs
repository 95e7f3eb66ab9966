//! Evaluate exp on encrypted slots through its truncated Taylor series.

use std::time::Instant;

use bckks::encoding::{DecodeMode, PlainVec};
use bckks::eval::{analytic_eval, truncation_degree, EvalContext, SeriesSpec};
use bckks::ring::{CoeffDomain, RingParams};
use bckks::sampling::RngHandle;
use bckks::scheme::{decrypt, encrypt_slots, keygen, RefreshKeyMode, SchemeParams};
use rand::Rng;

fn main() -> bckks::Result<()> {
    let ring = RingParams::new(256, 32, CoeffDomain::Exact)?;
    let params = SchemeParams::new(ring, 3.19, 64, 2f64.powi(20), 8)?;
    let mut rng = RngHandle::from_u64(5);
    let keys = keygen(&params, RefreshKeyMode::Noiseless, &mut rng)?;

    let x: Vec<f64> = (0..64).map(|_| rng.rng().random_range(-1.0..=1.0)).collect();
    let mut padded = x.clone();
    padded.resize(ring.slots(), 0.0);
    let ct = encrypt_slots(&keys.pk, &PlainVec::from_real(&padded), &params, &mut rng)?;

    let series = SeriesSpec::exp(1.0, 1e-4);
    println!("truncation degree {}", truncation_degree(&series)?);
    let mut ctx = EvalContext::new(&keys, params.b_star, rng.substream(1))?;
    let t = Instant::now();
    let (out, report) = analytic_eval(&ct, &series, &mut ctx)?;
    let got = decrypt(&keys.sk, &out, &ring, DecodeMode::Approximate)?;
    let err = x.iter().zip(&got.slots).map(|(a, b)| (a.exp() - b.re).abs()).fold(0.0, f64::max);
    println!("{report:?}");
    println!("max slot error {err:.3e}, allowed {:.3e}, {:?}", 1e-4 + report.relative_bound, t.elapsed());
    Ok(())
}
