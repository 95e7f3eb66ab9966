//! Median and mean timings per operation, plus the BCH stage table.
//!
//! `cargo run --release --example benchmark -- desk-256 20`

use bckks::cli::{cmd_bench, BenchOp, ParamPreset};
use bckks::sampling::RngHandle;

fn main() -> bckks::Result<()> {
    let mut args = std::env::args().skip(1);
    let preset = ParamPreset::by_name(&args.next().unwrap_or_else(|| "desk-64".into()))?;
    let trials = args.next().and_then(|t| t.parse().ok()).unwrap_or(20);
    let report = cmd_bench(&preset, None, &BenchOp::ALL, trials, true, &RngHandle::from_u64(0))?;
    print!("{}", report.to_text());
    println!();
    print!("{}", report.to_csv());
    Ok(())
}
