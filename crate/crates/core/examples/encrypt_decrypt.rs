//! Encrypt a vector of Gaussian integers and recover it exactly.

use bckks::cli::ParamPreset;
use bckks::encoding::{DecodeMode, PlainVec};
use bckks::sampling::RngHandle;
use bckks::scheme::{decrypt, encrypt_slots, keygen, RefreshKeyMode};
use rustfft::num_complex::Complex64;

fn main() -> bckks::Result<()> {
    let params = ParamPreset::by_name("desk-256")?.params(None)?;
    let mut rng = RngHandle::from_u64(2024);
    let keys = keygen(&params, RefreshKeyMode::Omit, &mut rng)?;

    let z = PlainVec::new((0..params.ring.slots()).map(|j| Complex64::new(j as f64 - 50.0, (j % 7) as f64)).collect());
    let ct = encrypt_slots(&keys.pk, &z, &params, &mut rng)?;
    let back = decrypt(&keys.sk, &ct, &params.ring, DecodeMode::Exact)?;

    println!("N = {}, K = {}, slots = {}", params.ring.n(), params.ring.k(), z.len());
    println!("noise bound {:.3e} against scale {:.3e}", ct.noise_bound, ct.scale);
    println!("first slots: {:?}", &back.slots[..4]);
    println!("exact: {}", back == z);
    Ok(())
}
