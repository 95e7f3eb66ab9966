//! Analytic bounds for a preset, with a small empirical check.

use std::fmt::Write as _;

use rand::Rng;

use super::preset::ParamPreset;
use crate::encoding::{encode, PlainVec};
use crate::noise::{self, MemoryModel, NoiseParams};
use crate::ring::{bp_add, bp_mul, bp_sub, r_norm, BPoly, CoeffDomain};
use crate::sampling::RngHandle;
use crate::scheme::{self, Ciphertext, RefreshKeyMode};
use crate::Result;

/// Largest ring degree for which the empirical rows are computed.
pub const EMPIRICAL_MAX_N: usize = 1024;

#[derive(Clone, Debug, PartialEq)]
pub struct MemoryRow {
    pub n: usize,
    pub lambda_b: u32,
    pub model: MemoryModel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalRow {
    pub op: &'static str,
    pub trials: usize,
    pub max_measured: f64,
    pub bound: f64,
    pub within: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseReport {
    pub preset: String,
    pub bounds: Vec<(&'static str, f64)>,
    pub prop1_holds: bool,
    pub seal_log2_bin: f64,
    pub seal_log2_std: f64,
    pub memory: Vec<MemoryRow>,
    pub empirical: Vec<EmpiricalRow>,
}

fn mb(bytes: u64) -> f64 {
    bytes as f64 / 1e6
}

impl NoiseReport {
    pub fn bound(&self, name: &str) -> Option<f64> {
        self.bounds.iter().find(|(n, _)| *n == name).map(|b| b.1)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("noise report for {}\n\n", self.preset);
        let _ = writeln!(s, "{:<22} {:>14} {:>9}", "bound", "value", "log2");
        for (name, v) in &self.bounds {
            let _ = writeln!(s, "{name:<22} {v:>14.4e} {:>9.2}", v.log2());
        }
        let _ = writeln!(s, "{:<22} {:>14}", "prop1 holds", self.prop1_holds);
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "SEAL-like product bound: binary 2^{:.1}, standard 2^{:.1}, gap 2^{:.1}",
            self.seal_log2_bin,
            self.seal_log2_std,
            self.seal_log2_std - self.seal_log2_bin
        );
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:>6} {:>4} {:>9} {:>9} {:>9} {:>9} {:>9}",
            "N", "lB", "M", "CT CKKS", "CT Bin", "EVK CKKS", "EVK Bin"
        );
        for r in &self.memory {
            let m = &r.model;
            let _ = writeln!(
                s,
                "{:>6} {:>4} {:>9} {:>9.2} {:>9.2} {:>9.2} {:>9.2}",
                r.n,
                r.lambda_b,
                r.n * r.lambda_b as usize,
                mb(m.ct_ckks),
                mb(m.ct_bin),
                mb(m.evk_ckks),
                mb(m.evk_bin)
            );
        }
        let _ = writeln!(s, "(MB)");
        if !self.empirical.is_empty() {
            let _ = writeln!(s);
            let _ = writeln!(s, "{:<8} {:>7} {:>14} {:>14} {:>8}", "op", "trials", "max measured", "bound", "within");
            for e in &self.empirical {
                let _ = writeln!(
                    s,
                    "{:<8} {:>7} {:>14.4e} {:>14.4e} {:>8}",
                    e.op, e.trials, e.max_measured, e.bound, e.within
                );
            }
        }
        s
    }

    /// Long format: `section,name,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("section,name,value\n");
        for (name, v) in &self.bounds {
            let _ = writeln!(s, "bound,{name},{v:e}");
        }
        let _ = writeln!(s, "bound,prop1_holds,{}", self.prop1_holds);
        let _ = writeln!(s, "seal,log2_mult_bin,{}", self.seal_log2_bin);
        let _ = writeln!(s, "seal,log2_mult_std,{}", self.seal_log2_std);
        for r in &self.memory {
            let m = &r.model;
            for (k, v) in [("ct_ckks", m.ct_ckks), ("ct_bin", m.ct_bin), ("evk_ckks", m.evk_ckks), ("evk_bin", m.evk_bin)] {
                let _ = writeln!(s, "memory,{}_{}_{k},{v}", r.n, r.lambda_b);
            }
        }
        for e in &self.empirical {
            let _ = writeln!(s, "empirical,{}_max,{:e}", e.op, e.max_measured);
            let _ = writeln!(s, "empirical,{}_bound,{:e}", e.op, e.bound);
            let _ = writeln!(s, "empirical,{}_within,{}/{}", e.op, e.within, e.trials);
        }
        s
    }
}

/// Bounds, memory table and, for `N <= EMPIRICAL_MAX_N`, measured errors of
/// fresh, added and multiplied ciphertexts over `trials` runs.
pub fn cmd_noise_report(
    preset: &ParamPreset,
    domain: Option<CoeffDomain>,
    trials: usize,
    rng: &RngHandle,
) -> Result<NoiseReport> {
    let params = preset.params(domain)?;
    let p = params.noise();
    let b_enc = noise::b_enc(&p);
    let bounds = vec![
        ("B_enc", b_enc),
        ("B_ecd", noise::b_ecd(&p)),
        ("B_mult_bin(B_enc)", noise::b_mult_bin(b_enc, b_enc, &p)),
        ("B_max", params.b_max),
        ("tau", params.tau()),
        ("relative fresh error", noise::relative_error(b_enc, params.delta)),
        ("prop1 threshold", noise::prop1_threshold(&p)),
    ];
    let seal = NoiseParams::seal_like();
    let b = seal.delta;
    let memory = [(1024, 16), (2048, 16), (4096, 32), (8192, 32)]
        .into_iter()
        .map(|(n, l)| MemoryRow { n, lambda_b: l, model: noise::memory_model(n, l).expect("nonzero") })
        .collect();

    let mut empirical = Vec::new();
    if preset.n <= EMPIRICAL_MAX_N && trials > 0 {
        let ring = params.ring;
        let mut r = rng.substream(7);
        let keys = scheme::keygen(&params, RefreshKeyMode::Omit, &mut r)?;
        let mut rows = [("fresh", 0.0, 0.0, 0), ("add", 0.0, 0.0, 0), ("mult", 0.0, 0.0, 0)];
        let mut record = |i: usize, ct: &Ciphertext, want: &BPoly| -> Result<()> {
            let err = r_norm(&bp_sub(&scheme::decrypt_raw(&keys.sk, ct)?, want)?, &ring)?;
            let row = &mut rows[i];
            row.1 = f64::max(row.1, err);
            row.2 = f64::max(row.2, ct.noise_bound);
            row.3 += (err <= ct.noise_bound) as usize;
            Ok(())
        };
        for _ in 0..trials {
            let mut slots = || PlainVec::from_real(&(0..ring.slots()).map(|_| r.rng().random_range(-4..=4) as f64).collect::<Vec<_>>());
            let (z1, z2) = (slots(), slots());
            let m1 = encode(&z1, params.scale(), &ring)?;
            let m2 = encode(&z2, params.scale(), &ring)?;
            let c1 = scheme::encrypt(&keys.pk, &m1, params.delta, &params, &mut r)?;
            let c2 = scheme::encrypt(&keys.pk, &m2, params.delta, &params, &mut r)?;
            record(0, &c1, &m1)?;
            record(1, &scheme::add(&c1, &c2)?, &bp_add(&m1, &m2)?)?;
            record(2, &scheme::mult(&keys.evk, &c1, &c2, &params)?, &bp_mul(&m1, &m2)?)?;
        }
        empirical = rows
            .into_iter()
            .map(|(op, max_measured, bound, within)| EmpiricalRow { op, trials, max_measured, bound, within })
            .collect();
    }

    Ok(NoiseReport {
        preset: preset.name.into(),
        bounds,
        prop1_holds: noise::prop1_holds(&p),
        seal_log2_bin: noise::b_mult_bin(b, b, &seal).log2(),
        seal_log2_std: noise::b_mult_std_log2(b, b, b, b, &seal),
        memory,
        empirical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_64_report() {
        let preset = ParamPreset::by_name("desk-64").unwrap();
        let t = std::time::Instant::now();
        let rep = cmd_noise_report(&preset, None, 3, &RngHandle::from_u64(3)).unwrap();
        assert!(t.elapsed().as_secs_f64() < 5.0);
        assert_eq!(rep.empirical.len(), 3);
        assert_eq!(rep.empirical[0].within, 3);
        assert_eq!(rep.empirical[1].within, 3);
        let b_enc = rep.bound("B_enc").unwrap();
        assert!((b_enc - noise::b_enc_raw(3.19, 64, 16)).abs() < 1e-6);
        let text = rep.to_text();
        assert!(text.contains("prop1 holds") && text.contains("EVK Bin"));
        assert_eq!(rep.to_csv().lines().next(), Some("section,name,value"));
        let row = &rep.memory[0];
        assert_eq!((row.n, format!("{:.2}", mb(row.model.ct_ckks))), (1024, "0.06".to_string()));
        assert!((rep.seal_log2_bin - 88.0).abs() <= 2.0);
    }

    #[test]
    fn large_presets_skip_measurement() {
        let preset = ParamPreset::by_name("paper-8192").unwrap();
        let rep = cmd_noise_report(&preset, None, 5, &RngHandle::from_u64(4)).unwrap();
        assert!(rep.empirical.is_empty());
        assert!(rep.prop1_holds == (preset.delta() > rep.bound("prop1 threshold").unwrap()));
    }
}
