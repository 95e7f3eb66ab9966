//! Wall-clock benchmark harness.

use std::fmt::Write as _;
use std::time::Instant;

use rand::Rng;

use super::preset::ParamPreset;
use crate::bch::{BchCode, Permutation, DEFAULT_PRIMITIVE_POLY_M7};
use crate::encoding::{encode, DecodeMode, PlainVec};
use crate::ring::CoeffDomain;
use crate::sampling::RngHandle;
use crate::scheme::{self, RefreshKeyMode};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "preset,n,lambda_b,op,trials,median_ms,mean_ms";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchOp {
    KeyGen,
    Encrypt,
    Decrypt,
    Add,
    Multiply,
    Refresh,
}

impl BenchOp {
    pub const ALL: [BenchOp; 6] =
        [BenchOp::KeyGen, BenchOp::Encrypt, BenchOp::Decrypt, BenchOp::Add, BenchOp::Multiply, BenchOp::Refresh];

    pub fn name(self) -> &'static str {
        match self {
            BenchOp::KeyGen => "KeyGen",
            BenchOp::Encrypt => "Encrypt",
            BenchOp::Decrypt => "Decrypt",
            BenchOp::Add => "Add",
            BenchOp::Multiply => "Multiply",
            BenchOp::Refresh => "Refresh",
        }
    }

    pub fn parse_list(s: &str) -> Result<Vec<BenchOp>> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| match t.to_ascii_lowercase().as_str() {
                "keygen" => Ok(BenchOp::KeyGen),
                "encrypt" => Ok(BenchOp::Encrypt),
                "decrypt" => Ok(BenchOp::Decrypt),
                "add" => Ok(BenchOp::Add),
                "mult" | "mul" | "multiply" => Ok(BenchOp::Multiply),
                "refresh" => Ok(BenchOp::Refresh),
                other => Err(Error::Param(format!("unknown bench op {other:?}"))),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Timing {
    pub op: String,
    pub trials: usize,
    pub median_ms: f64,
    pub mean_ms: f64,
}

impl Timing {
    fn from_samples(op: &str, mut ms: Vec<f64>) -> Self {
        ms.sort_by(f64::total_cmp);
        let n = ms.len();
        let median = if n % 2 == 1 { ms[n / 2] } else { (ms[n / 2 - 1] + ms[n / 2]) / 2.0 };
        Self { op: op.into(), trials: n, median_ms: median, mean_ms: ms.iter().sum::<f64>() / n as f64 }
    }
}

/// Median per-stage BCH times in microseconds for an `M = 8N` bit message.
#[derive(Clone, Debug, PartialEq)]
pub struct BchStages {
    pub n: usize,
    pub m_bits: usize,
    pub blocks: usize,
    pub enc_us: f64,
    pub perm_us: f64,
    pub inv_perm_us: f64,
    pub dec_us: f64,
}

impl BchStages {
    pub fn total_us(&self) -> f64 {
        self.enc_us + self.perm_us + self.inv_perm_us + self.dec_us
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub preset: String,
    pub n: usize,
    pub lambda_b: u32,
    pub rows: Vec<Timing>,
    pub bch: Option<BchStages>,
}

impl BenchReport {
    pub fn timing(&self, op: BenchOp) -> Option<&Timing> {
        self.rows.iter().find(|t| t.op == op.name())
    }

    /// One row per operation; BCH stages appear as `bch-*` rows.
    pub fn to_csv(&self) -> String {
        let mut s = format!("{CSV_HEADER}\n");
        let mut row = |op: &str, trials: usize, med: f64, mean: f64| {
            let _ = writeln!(s, "{},{},{},{op},{trials},{med:.6},{mean:.6}", self.preset, self.n, self.lambda_b);
        };
        for t in &self.rows {
            row(&t.op, t.trials, t.median_ms, t.mean_ms);
        }
        if let Some(b) = &self.bch {
            let trials = self.rows.first().map_or(0, |t| t.trials);
            for (op, us) in [
                ("bch-enc", b.enc_us),
                ("bch-perm", b.perm_us),
                ("bch-inv-perm", b.inv_perm_us),
                ("bch-dec", b.dec_us),
                ("bch-total", b.total_us()),
            ] {
                row(op, trials, us / 1e3, us / 1e3);
            }
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<10} {:<10} {:>14} {:>14}", "Ring dim", "Operation", "median (ms)", "mean (ms)");
        for t in &self.rows {
            let _ = writeln!(s, "{:<10} {:<10} {:>14.3} {:>14.3}", self.n, t.op, t.median_ms, t.mean_ms);
        }
        if let Some(b) = &self.bch {
            let _ = writeln!(s);
            let _ = writeln!(
                s,
                "{:>6} {:>7} {:>5} {:>9} {:>9} {:>9} {:>9} {:>9}",
                "N", "M", "h", "enc", "perm", "inv-perm", "dec", "total"
            );
            let _ = writeln!(
                s,
                "{:>6} {:>7} {:>5} {:>9.0} {:>9.0} {:>9.0} {:>9.0} {:>9.0}",
                b.n,
                b.m_bits,
                b.blocks,
                b.enc_us,
                b.perm_us,
                b.inv_perm_us,
                b.dec_us,
                b.total_us()
            );
            let _ = writeln!(s, "(microseconds, median)");
        }
        s
    }
}

fn time_ms<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let t = Instant::now();
    let out = f()?;
    Ok((out, t.elapsed().as_secs_f64() * 1e3))
}

fn random_slots(n: usize, rng: &mut RngHandle) -> PlainVec {
    PlainVec::from_real(&(0..n).map(|_| rng.rng().random_range(-8..=8) as f64).collect::<Vec<_>>())
}

/// Time each operation `trials` times. Trial `i` draws from its own RNG stream.
pub fn cmd_bench(
    preset: &ParamPreset,
    domain: Option<CoeffDomain>,
    ops: &[BenchOp],
    trials: usize,
    with_bch: bool,
    rng: &RngHandle,
) -> Result<BenchReport> {
    if trials == 0 {
        return Err(Error::Param("trials must be at least 1".into()));
    }
    let params = preset.params(domain)?;
    let ring = params.ring;
    let mut setup = rng.substream(0);
    // the production refresh key costs K encryptions; build it only when timed
    let mode = if ops.contains(&BenchOp::Refresh) { RefreshKeyMode::Production } else { RefreshKeyMode::Omit };
    let keys = scheme::keygen(&params, mode, &mut setup)?;
    let z = random_slots(ring.slots(), &mut setup);
    let m = encode(&z, params.scale(), &ring)?;
    let c1 = scheme::encrypt(&keys.pk, &m, params.delta, &params, &mut setup)?;
    let c2 = scheme::encrypt(&keys.pk, &m, params.delta, &params, &mut setup)?;

    let mut rows = Vec::new();
    for (k, &op) in ops.iter().enumerate() {
        let mut samples = Vec::with_capacity(trials);
        for i in 0..trials {
            let mut r = rng.substream(1 + (k * trials + i) as u64);
            let ms = match op {
                BenchOp::KeyGen => time_ms(|| scheme::keygen(&params, RefreshKeyMode::Production, &mut r))?.1,
                BenchOp::Encrypt => time_ms(|| scheme::encrypt(&keys.pk, &m, params.delta, &params, &mut r))?.1,
                BenchOp::Decrypt => {
                    time_ms(|| scheme::decrypt(&keys.sk, &c1, &ring, DecodeMode::Approximate))?.1
                }
                BenchOp::Add => time_ms(|| scheme::add(&c1, &c2))?.1,
                BenchOp::Multiply => time_ms(|| scheme::mult(&keys.evk, &c1, &c2, &params))?.1,
                BenchOp::Refresh => {
                    let rk = keys.rk.as_ref().expect("built above when refresh is requested");
                    time_ms(|| scheme::refresh(&c1, rk, &keys.pk, &params, &mut r))?.1
                }
            };
            samples.push(ms);
        }
        rows.push(Timing::from_samples(op.name(), samples));
    }
    let bch = if with_bch { Some(bench_bch(preset.n, trials, rng)?) } else { None };
    Ok(BenchReport { preset: preset.name.into(), n: preset.n, lambda_b: ring.lambda_b(), rows, bch })
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Stage times for `M = 8N` message bits in blocks of 101.
pub fn bench_bch(n: usize, trials: usize, rng: &RngHandle) -> Result<BchStages> {
    if trials == 0 {
        return Err(Error::Param("trials must be at least 1".into()));
    }
    let code = BchCode::build(7, 3, DEFAULT_PRIMITIVE_POLY_M7)?;
    let block_k = 101;
    let m_bits = 8 * n;
    let blocks = m_bits.div_ceil(block_k);
    let mut r = rng.substream(u64::MAX);
    let mut seed = [0u8; 32];
    r.rng().fill(&mut seed);
    let perm = Permutation::new(blocks * code.n(), seed)?;
    let msg: Vec<u8> = (0..m_bits).map(|_| r.rng().random::<bool>() as u8).collect();

    let (mut enc, mut fwd, mut inv, mut dec) = (vec![], vec![], vec![], vec![]);
    for _ in 0..trials {
        let t = Instant::now();
        let mut coded = Vec::with_capacity(blocks * code.n());
        for b in 0..blocks {
            let mut u = vec![0u8; code.k()];
            let lo = b * block_k;
            let hi = (lo + block_k).min(m_bits);
            u[..hi - lo].copy_from_slice(&msg[lo..hi]);
            coded.extend(code.encode(&u)?);
        }
        enc.push(t.elapsed().as_secs_f64() * 1e6);

        let t = Instant::now();
        let permuted = perm.apply(&coded);
        fwd.push(t.elapsed().as_secs_f64() * 1e6);

        let t = Instant::now();
        let back = perm.unapply(&permuted);
        inv.push(t.elapsed().as_secs_f64() * 1e6);

        let t = Instant::now();
        let mut out = Vec::with_capacity(m_bits);
        for (b, word) in back.chunks(code.n()).enumerate() {
            let (u, _) = code.decode(word).map_err(|_| Error::DecodeFailure { block: b })?;
            out.extend_from_slice(&u[..block_k]);
        }
        dec.push(t.elapsed().as_secs_f64() * 1e6);
        if out[..m_bits] != msg[..] {
            return Err(Error::DecodeFailure { block: 0 });
        }
    }
    Ok(BchStages {
        n,
        m_bits,
        blocks,
        enc_us: median(enc),
        perm_us: median(fwd),
        inv_perm_us: median(inv),
        dec_us: median(dec),
    })
}
