//! Refresh with a noiseless test key (an exact identity) and with a
//! production key (flooded, with its tracked bound).

use bckks::encoding::{encode, DecodeMode, PlainVec};
use bckks::ring::{CoeffDomain, RingParams};
use bckks::sampling::RngHandle;
use bckks::scheme::{decrypt, decrypt_raw, encrypt, keygen, refresh, thresh, RefreshKeyMode, SchemeParams};

fn main() -> bckks::Result<()> {
    let ring = RingParams::new(64, 32, CoeffDomain::Exact)?;
    let params = SchemeParams::new(ring, 3.19, 16, 2f64.powi(20), 8)?;
    let z = PlainVec::from_real(&(0..32).map(|j| j as f64 - 16.0).collect::<Vec<_>>());
    let m = encode(&z, params.scale(), &ring)?;

    let mut rng = RngHandle::from_u64(11);
    let test_keys = keygen(&params, RefreshKeyMode::Noiseless, &mut rng)?;
    let c = encrypt(&test_keys.pk, &m, params.delta, &params, &mut rng)?;
    let r = refresh(&c, test_keys.rk.as_ref().unwrap(), &test_keys.pk, &params, &mut rng)?;
    println!("noiseless: Dec_raw(Refresh(c)) == Dec_raw(c): {}", decrypt_raw(&test_keys.sk, &r)? == decrypt_raw(&test_keys.sk, &c)?);
    println!("noiseless: decodes exactly: {}", decrypt(&test_keys.sk, &r, &ring, DecodeMode::Exact)? == z);

    let keys = keygen(&params, RefreshKeyMode::Production, &mut rng)?;
    let c = encrypt(&keys.pk, &m, params.delta, &params, &mut rng)?;
    println!("thresh(B_max, fresh bound) = {}", thresh(params.b_max, c.noise_bound));
    let r = refresh(&c, keys.rk.as_ref().unwrap(), &keys.pk, &params, &mut rng)?;
    println!(
        "production: tau = 2^{:.0}, bound before {:.3e}, after {:.3e}",
        params.tau().log2(),
        c.noise_bound,
        r.noise_bound
    );
    Ok(())
}
