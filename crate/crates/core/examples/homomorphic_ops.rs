//! Addition and multiplication, checked against the decryption identities.

use bckks::encoding::{encode, DecodeMode, PlainVec};
use bckks::ring::{bp_add, bp_mul, bp_sub, r_norm, CoeffDomain, RingParams};
use bckks::sampling::RngHandle;
use bckks::scheme::{add, decrypt, decrypt_raw, encrypt, keygen, mult, tensor, RefreshKeyMode, SchemeParams};

fn main() -> bckks::Result<()> {
    let ring = RingParams::new(64, 32, CoeffDomain::Exact)?;
    let params = SchemeParams::new(ring, 3.19, 16, 2f64.powi(20), 8)?;
    let mut rng = RngHandle::from_u64(7);
    let keys = keygen(&params, RefreshKeyMode::Omit, &mut rng)?;

    let z1 = PlainVec::from_real(&(0..32).map(|j| (j % 5) as f64).collect::<Vec<_>>());
    let z2 = PlainVec::from_real(&(0..32).map(|j| 3.0 - (j % 3) as f64).collect::<Vec<_>>());
    let (m1, m2) = (encode(&z1, params.scale(), &ring)?, encode(&z2, params.scale(), &ring)?);
    let c1 = encrypt(&keys.pk, &m1, params.delta, &params, &mut rng)?;
    let c2 = encrypt(&keys.pk, &m2, params.delta, &params, &mut rng)?;

    let sum = add(&c1, &c2)?;
    let lhs = decrypt_raw(&keys.sk, &sum)?;
    let rhs = bp_add(&decrypt_raw(&keys.sk, &c1)?, &decrypt_raw(&keys.sk, &c2)?)?;
    println!("Dec(c1 + c2) == Dec(c1) + Dec(c2): {}", lhs == rhs);
    let z = decrypt(&keys.sk, &sum, &ring, DecodeMode::Exact)?;
    println!("sum slots: {:?}", z.slots[..5].iter().map(|c| c.re).collect::<Vec<_>>());

    // Dec(Mult) = Dec(c1) Dec(c2) + d2 e0, where evk = (-a0 s + e0 + s^2, a0)
    let prod = mult(&keys.evk, &c1, &c2, &params)?;
    let (_, _, d2) = tensor(&c1, &c2)?;
    let e0 = bp_sub(
        &bp_add(&keys.evk.b0, &bp_mul(&keys.evk.a0, &keys.sk.s)?)?,
        &bp_mul(&keys.sk.s, &keys.sk.s)?,
    )?;
    let expect = bp_add(&bp_mul(&decrypt_raw(&keys.sk, &c1)?, &decrypt_raw(&keys.sk, &c2)?)?, &bp_mul(&d2, &e0)?)?;
    println!("Dec(Mult) == Dec(c1) Dec(c2) + d2 e0: {}", decrypt_raw(&keys.sk, &prod)? == expect);

    let err = r_norm(&bp_sub(&decrypt_raw(&keys.sk, &prod)?, &bp_mul(&m1, &m2)?)?, &ring)?;
    println!("product error {err:.3e}, tracked bound {:.3e}", prod.noise_bound);
    Ok(())
}
