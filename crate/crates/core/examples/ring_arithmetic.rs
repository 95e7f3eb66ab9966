//! Ring arithmetic in BP: NTT products against the schoolbook oracle, the
//! binary expansion and the norms.

use bckks::encoding::{bin_contract, bin_expand};
use bckks::ring::{bp_mul, bp_mul_schoolbook, canonical_norm, monomial_shift, r_norm, BPoly, CoeffDomain, RPoly, RingParams};

fn main() -> bckks::Result<()> {
    let k = 256;
    let a = BPoly::from_i64(&(0..k as i64).map(|i| (i * 7919) % 13 - 6).collect::<Vec<_>>(), CoeffDomain::Exact);
    let b = BPoly::from_i64(&(0..k as i64).map(|i| (i * 104729) % 5 - 2).collect::<Vec<_>>(), CoeffDomain::Exact);
    println!("NTT == schoolbook: {}", bp_mul(&a, &b)? == bp_mul_schoolbook(&a, &b)?);
    println!("a * x^K == -a: {}", monomial_shift(&monomial_shift(&a, 200)?, 56)? == a.neg());

    let params = RingParams::new(8, 4, CoeffDomain::Exact)?;
    let r = RPoly::from_i64(&[5, -3, 0, 15, -15, 1, 2, 7]);
    let m = bin_expand(&r, &params)?;
    println!("p^-1(r) = {:?}", m.to_i64().unwrap());
    println!("p(p^-1(r)) == r: {}", bin_contract(&m, &params)? == r);
    println!("||r||_can = {:.4}, ||m||_R = {:.4}", canonical_norm(&r), r_norm(&m, &params)?);
    Ok(())
}
