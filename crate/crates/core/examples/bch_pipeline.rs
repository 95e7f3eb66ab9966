//! Protect an 8192-bit message with BCH(127, k, 3), flip some coefficients
//! and recover it.

use bckks::bch::{
    failure_prob, inject_flips, post_decode, post_decode_detailed, pre_encode, BchCode, FlipPattern, Permutation,
    PipelineParams, DEFAULT_PRIMITIVE_POLY_M7,
};
use bckks::ring::CoeffDomain;
use bckks::sampling::RngHandle;
use rand::Rng;

fn main() -> bckks::Result<()> {
    let code = BchCode::build(7, 3, DEFAULT_PRIMITIVE_POLY_M7)?;
    println!("BCH({}, {}, {}), g support {:?}", code.n(), code.k(), code.t(), code.generator_support());

    let params = PipelineParams::new(8192, 101, &code)?;
    let perm = Permutation::new(params.coded_bits(&code), [42; 32])?;
    println!("M = {}, blocks = {}, coded bits = {}", params.m_bits, params.blocks, params.coded_bits(&code));

    let mut rng = RngHandle::from_u64(3);
    let bits: Vec<u8> = (0..params.m_bits).map(|_| rng.rng().random::<bool>() as u8).collect();
    let m = pre_encode(&bits, &code, &perm, &params, 16384, CoeffDomain::Exact)?;

    let (noisy, flipped) = inject_flips(&m, &FlipPattern::Rate { rate: 2e-3, span: params.coded_bits(&code) }, &mut rng)?;
    match post_decode_detailed(&noisy, &code, &perm, &params) {
        Ok(r) => println!(
            "{} flips injected, {} corrected, exact: {}",
            flipped.len(),
            r.corrected.iter().sum::<usize>(),
            r.bits == bits
        ),
        Err(e) => println!("{} flips injected: {e}", flipped.len()),
    }

    let heavy: Vec<usize> = (0..4).map(|i| perm.inverse()[i * 30]).collect();
    let (bad, _) = inject_flips(&m, &FlipPattern::Indices(heavy), &mut rng)?;
    println!("four flips in block 0: {:?}", post_decode(&bad, &code, &perm, &params).err());

    let f = failure_prob(3e-7, 4, 127, 3, 257);
    println!(
        "Poisson model: lambda = {:.3e}, Pr[X >= 4] = {:.3e}, 257-block success = {}",
        f.lambda, f.block_failure, f.success
    );
    Ok(())
}
