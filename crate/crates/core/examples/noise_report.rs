//! Print the analytic bounds, the memory model and a small empirical check.

use bckks::cli::{cmd_noise_report, ParamPreset};
use bckks::noise::{b_enc_raw, b_mult_bin, b_mult_std_log2, prop1_holds, NoiseParams};
use bckks::sampling::RngHandle;

fn main() -> bckks::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "desk-64".into());
    let preset = ParamPreset::by_name(&name)?;
    print!("{}", cmd_noise_report(&preset, None, 5, &RngHandle::from_u64(1))?.to_text());

    let p = NoiseParams::seal_like();
    println!();
    println!("B_enc(3.19, 8192, 192) = {:.4e}", b_enc_raw(3.19, 8192, 192));
    println!("log2 B_mult_bin = {:.2}", b_mult_bin(p.delta, p.delta, &p).log2());
    println!("log2 B_mult_std = {:.2}", b_mult_std_log2(p.delta, p.delta, p.delta, p.delta, &p));
    let mut small = p;
    small.delta = 2f64.powi(10);
    println!("prop1 at 2^40: {}, at 2^10: {}", prop1_holds(&p), prop1_holds(&small));
    Ok(())
}
