//! Command-line front end: argument types, artifact files, presets, the
//! benchmark harness and the noise report.
//!
//! Every command returns the text it would print, so tests can drive it
//! without spawning a process.

pub mod artifact;
pub mod bench;
pub mod preset;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rustfft::num_complex::Complex64;
use rand::RngCore;

use crate::bch::{post_decode_detailed, pre_encode, BchCode, PipelineParams, DEFAULT_PRIMITIVE_POLY_M7};
use crate::encoding::{DecodeMode, PlainVec};
use crate::eval::{analytic_eval, poly_eval, EvalContext, PolyEvalReport, SeriesSpec};
use crate::ring::{BPoly, CoeffDomain};
use crate::sampling::RngHandle;
use crate::scheme::{self, Ciphertext, KeySet, RefreshKeyMode, SchemeParams};
use crate::{Error, Result};

pub use artifact::{scheme_digest, Artifact, CodeDescriptor};
pub use bench::{cmd_bench, BenchOp, BenchReport};
pub use preset::{ParamPreset, PRESETS};
pub use report::{cmd_noise_report, NoiseReport};

#[derive(Debug, Parser)]
#[command(name = "bckks", version, about = "Binary CKKS toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, global = true, default_value = "desk-256")]
    pub preset: String,
    /// Hex seed, up to 32 bytes.
    #[arg(long, global = true, default_value = "00")]
    pub seed: String,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Exact integer coefficients.
    #[arg(long, global = true, conflicts_with = "modular")]
    pub exact: bool,
    /// Coefficients modulo an NTT-friendly prime `q`.
    #[arg(long, global = true, value_name = "Q")]
    pub modular: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RkMode {
    Production,
    Noiseless,
    Omit,
}

impl From<RkMode> for RefreshKeyMode {
    fn from(m: RkMode) -> Self {
        match m {
            RkMode::Production => RefreshKeyMode::Production,
            RkMode::Noiseless => RefreshKeyMode::Noiseless,
            RkMode::Omit => RefreshKeyMode::Omit,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write sk.bin, pk.bin, evk.bin and rk.bin into the --out directory.
    Keygen {
        #[arg(long, value_enum, default_value = "production")]
        rk_mode: RkMode,
    },
    /// Encode and encrypt slot values.
    Encrypt {
        #[arg(long)]
        pk: PathBuf,
        /// Comma-separated slots, each `re` or `re im`.
        #[arg(long, conflicts_with = "input")]
        values: Option<String>,
        /// File with one slot per line.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    Decrypt {
        #[arg(long)]
        sk: PathBuf,
        ct: PathBuf,
        /// Round slots to Gaussian integers.
        #[arg(long)]
        round: bool,
    },
    Add {
        a: PathBuf,
        b: PathBuf,
    },
    Mul {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        evk: PathBuf,
    },
    Refresh {
        ct: PathBuf,
        #[arg(long)]
        rk: PathBuf,
        #[arg(long)]
        pk: PathBuf,
    },
    /// Evaluate `sum_j a_j x^j` slot-wise.
    EvalPoly {
        ct: PathBuf,
        /// Key directory written by `keygen`.
        #[arg(long)]
        keys: PathBuf,
        /// Comma-separated `a_0, a_1, ...`.
        #[arg(long)]
        coeffs: String,
    },
    /// Evaluate `exp` through its truncated Taylor series.
    EvalExp {
        ct: PathBuf,
        #[arg(long)]
        keys: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        epsilon: f64,
        /// Bound on `|x|` over the inputs.
        #[arg(long, default_value_t = 1.0)]
        bound: f64,
    },
    /// Protect a raw byte file; writes the coded bits to --out.
    BchEncode {
        #[arg(long)]
        input: PathBuf,
        /// Code descriptor to write.
        #[arg(long)]
        code: PathBuf,
        #[arg(long, default_value_t = 101)]
        block_k: usize,
    },
    BchDecode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        code: PathBuf,
    },
    Bench {
        /// Comma-separated subset of keygen, encrypt, decrypt, add, mult, refresh.
        #[arg(long, default_value = "keygen,encrypt,decrypt,add,mult,refresh")]
        ops: String,
        /// Also time the BCH stages at `M = 8N`.
        #[arg(long)]
        bch: bool,
    },
    NoiseReport,
}

fn domain_override(c: &Common) -> Option<CoeffDomain> {
    match (c.exact, c.modular) {
        (true, _) => Some(CoeffDomain::Exact),
        (false, Some(q)) => Some(CoeffDomain::Modular(q)),
        (false, None) => None,
    }
}

fn scheme_params(c: &Common) -> Result<SchemeParams> {
    ParamPreset::by_name(&c.preset)?.params(domain_override(c))
}

fn out_path(c: &Common) -> Result<&Path> {
    c.out.as_deref().ok_or_else(|| Error::Param("--out is required".into()))
}

/// Slots from `"1 2, 3, -0.5 4"`; newlines also separate slots.
pub fn parse_slots(text: &str) -> Result<PlainVec> {
    let mut slots = Vec::new();
    for entry in text.split([',', '\n']).map(str::trim).filter(|e| !e.is_empty()) {
        let nums: Vec<f64> = entry
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| Error::Param(format!("bad number {t:?}"))))
            .collect::<Result<_>>()?;
        match nums.as_slice() {
            [re] => slots.push(Complex64::new(*re, 0.0)),
            [re, im] => slots.push(Complex64::new(*re, *im)),
            _ => return Err(Error::Param(format!("slot {entry:?} needs one or two numbers"))),
        }
    }
    Ok(PlainVec::new(slots))
}

fn parse_coeffs(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Param(format!("bad coefficient {t:?}"))))
        .collect()
}

pub fn format_slots(z: &PlainVec, round: bool) -> String {
    z.slots
        .iter()
        .map(|c| if round { format!("{} {}\n", c.re, c.im) } else { format!("{:.6} {:.6}\n", c.re, c.im) })
        .collect()
}

fn load_ct(path: &Path, d: &[u8; 32]) -> Result<Ciphertext> {
    artifact::load(path, Some(d))?.into_ciphertext()
}

fn save_ct(c: &Common, ct: Ciphertext, d: &[u8; 32]) -> Result<String> {
    let path = out_path(c)?;
    let summary = format!("wrote {} (scale {:.3e}, bound {:.3e})\n", path.display(), ct.scale, ct.noise_bound);
    artifact::save(path, &Artifact::Ciphertext(ct), d)?;
    Ok(summary)
}

/// Load the four key files written by `keygen`; `rk.bin` may be absent.
pub fn load_keys(dir: &Path, params: &SchemeParams) -> Result<KeySet> {
    let d = scheme_digest(params);
    let rk_path = dir.join("rk.bin");
    Ok(KeySet {
        params: *params,
        sk: artifact::load(&dir.join("sk.bin"), Some(&d))?.into_secret_key()?,
        pk: artifact::load(&dir.join("pk.bin"), Some(&d))?.into_public_key()?,
        evk: artifact::load(&dir.join("evk.bin"), Some(&d))?.into_eval_key()?,
        rk: if rk_path.exists() { Some(artifact::load(&rk_path, Some(&d))?.into_refresh_key()?) } else { None },
    })
}

fn bytes_to_bits(bytes: &[u8]) -> Vec<u8> {
    bytes.iter().flat_map(|b| (0..8).map(move |i| (b >> i) & 1)).collect()
}

fn bits_to_bytes(bits: &[u8]) -> Vec<u8> {
    bits.chunks(8).map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (b << i))).collect()
}

fn eval_summary(r: &PolyEvalReport) -> String {
    format!(
        "degree {} refreshes {} term_bound {:.3e} min_formula {:.3e} relative_bound {:.3e}\n",
        r.degree, r.refreshes, r.term_bound, r.min_formula, r.relative_bound
    )
}

pub fn run(cli: &Cli) -> Result<String> {
    let c = &cli.common;
    let mut rng = RngHandle::from_hex(&c.seed)?;
    match &cli.command {
        Command::Keygen { rk_mode } => {
            let params = scheme_params(c)?;
            let d = scheme_digest(&params);
            let dir = out_path(c)?;
            fs::create_dir_all(dir)?;
            let keys = scheme::keygen(&params, (*rk_mode).into(), &mut rng)?;
            artifact::save(&dir.join("sk.bin"), &Artifact::SecretKey(keys.sk), &d)?;
            artifact::save(&dir.join("pk.bin"), &Artifact::PublicKey(keys.pk), &d)?;
            artifact::save(&dir.join("evk.bin"), &Artifact::EvalKey(keys.evk), &d)?;
            if let Some(rk) = keys.rk {
                artifact::save(&dir.join("rk.bin"), &Artifact::RefreshKey(rk), &d)?;
            }
            Ok(format!("keys for {} (K = {}) in {}\n", c.preset, params.ring.k(), dir.display()))
        }
        Command::Encrypt { pk, values, input } => {
            let params = scheme_params(c)?;
            let d = scheme_digest(&params);
            let text = match (values, input) {
                (Some(v), _) => v.clone(),
                (None, Some(p)) => fs::read_to_string(p)?,
                (None, None) => return Err(Error::Param("give --values or --input".into())),
            };
            let mut z = parse_slots(&text)?;
            let slots = params.ring.slots();
            if z.len() > slots {
                return Err(Error::Dimension { expected: slots, got: z.len() });
            }
            z.slots.resize(slots, Complex64::new(0.0, 0.0));
            let pk = artifact::load(pk, Some(&d))?.into_public_key()?;
            let ct = scheme::encrypt_slots(&pk, &z, &params, &mut rng)?;
            save_ct(c, ct, &d)
        }
        Command::Decrypt { sk, ct, round } => {
            let params = scheme_params(c)?;
            let d = scheme_digest(&params);
            let sk = artifact::load(sk, Some(&d))?.into_secret_key()?;
            let ct = load_ct(ct, &d)?;
            let mode = if *round { DecodeMode::Exact } else { DecodeMode::Approximate };
            let z = scheme::decrypt(&sk, &ct, &params.ring, mode)?;
            let text = format_slots(&z, *round);
            match &c.out {
                Some(p) => {
                    artifact::write_atomic(p, text.as_bytes())?;
                    Ok(format!("wrote {}\n", p.display()))
                }
                None => Ok(text),
            }
        }
        Command::Add { a, b } => {
            let d = scheme_digest(&scheme_params(c)?);
            let sum = scheme::add(&load_ct(a, &d)?, &load_ct(b, &d)?)?;
            save_ct(c, sum, &d)
        }
        Command::Mul { a, b, evk } => {
            let params = scheme_params(c)?;
            let d = scheme_digest(&params);
            let evk = artifact::load(evk, Some(&d))?.into_eval_key()?;
            let prod = scheme::mult(&evk, &load_ct(a, &d)?, &load_ct(b, &d)?, &params)?;
            save_ct(c, prod, &d)
        }
        Command::Refresh { ct, rk, pk } => {
            let params = scheme_params(c)?;
            let d = scheme_digest(&params);
            let rk = artifact::load(rk, Some(&d))?.into_refresh_key()?;
            let pk = artifact::load(pk, Some(&d))?.into_public_key()?;
            let fresh = scheme::refresh(&load_ct(ct, &d)?, &rk, &pk, &params, &mut rng)?;
            save_ct(c, fresh, &d)
        }
        Command::EvalPoly { ct, keys, coeffs } => {
            let params = scheme_params(c)?;
            let d = scheme_digest(&params);
            let keys = load_keys(keys, &params)?;
            let mut ctx = EvalContext::new(&keys, params.b_star, rng)?;
            let (out, rep) = poly_eval(&load_ct(ct, &d)?, &parse_coeffs(coeffs)?, &mut ctx)?;
            Ok(eval_summary(&rep) + &save_ct(c, out, &d)?)
        }
        Command::EvalExp { ct, keys, epsilon, bound } => {
            let params = scheme_params(c)?;
            let d = scheme_digest(&params);
            let keys = load_keys(keys, &params)?;
            let mut ctx = EvalContext::new(&keys, params.b_star, rng)?;
            let (out, rep) = analytic_eval(&load_ct(ct, &d)?, &SeriesSpec::exp(*bound, *epsilon), &mut ctx)?;
            Ok(eval_summary(&rep) + &save_ct(c, out, &d)?)
        }
        Command::BchEncode { input, code, block_k } => {
            let bits = bytes_to_bits(&fs::read(input)?);
            let bch = BchCode::build(7, 3, DEFAULT_PRIMITIVE_POLY_M7)?;
            let pp = PipelineParams::new(bits.len(), *block_k, &bch)?;
            let mut seed = [0u8; 32];
            rng.substream(1).fill_bytes(&mut seed);
            let desc = CodeDescriptor::new(&bch, seed, *block_k, bits.len());
            let (bch, perm, pp2) = desc.build()?;
            debug_assert_eq!(pp, pp2);
            let nh = pp.coded_bits(&bch);
            let m = pre_encode(&bits, &bch, &perm, &pp, nh, CoeffDomain::Exact)?;
            let coded: Vec<u8> = m.to_i64().expect("bits").into_iter().map(|b| b as u8).collect();
            artifact::save(code, &Artifact::Code(desc.clone()), &desc.digest())?;
            let out = out_path(c)?;
            artifact::write_atomic(out, &bits_to_bytes(&coded))?;
            Ok(format!("{} bits in {} blocks -> {nh} coded bits in {}\n", bits.len(), pp.blocks, out.display()))
        }
        Command::BchDecode { input, code } => {
            let desc = artifact::load(code, None)?.into_code()?;
            let (bch, perm, pp) = desc.build()?;
            let nh = pp.coded_bits(&bch);
            let raw = fs::read(input)?;
            if raw.len() != nh.div_ceil(8) {
                return Err(Error::Format(format!("expected {} coded bytes, got {}", nh.div_ceil(8), raw.len())));
            }
            let coded: Vec<i64> = bytes_to_bits(&raw)[..nh].iter().map(|&b| b as i64).collect();
            let report = post_decode_detailed(&BPoly::from_i64(&coded, CoeffDomain::Exact), &bch, &perm, &pp)?;
            let out = out_path(c)?;
            artifact::write_atomic(out, &bits_to_bytes(&report.bits))?;
            let fixed: usize = report.corrected.iter().sum();
            Ok(format!("decoded {} bits, corrected {fixed} flips, wrote {}\n", report.bits.len(), out.display()))
        }
        Command::Bench { ops, bch } => {
            let preset = ParamPreset::by_name(&c.preset)?;
            let ops = BenchOp::parse_list(ops)?;
            let report = cmd_bench(&preset, domain_override(c), &ops, c.trials.unwrap_or(20), *bch, &rng)?;
            if let Some(p) = &c.out {
                artifact::write_atomic(p, report.to_csv().as_bytes())?;
            }
            Ok(report.to_text())
        }
        Command::NoiseReport => {
            let preset = ParamPreset::by_name(&c.preset)?;
            let report = cmd_noise_report(&preset, domain_override(c), c.trials.unwrap_or(5), &rng)?;
            if let Some(p) = &c.out {
                artifact::write_atomic(p, report.to_csv().as_bytes())?;
            }
            Ok(report.to_text())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_parsing() {
        let z = parse_slots("1, 2 -3\n\n-0.5").unwrap();
        assert_eq!(z.slots, vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, -3.0), Complex64::new(-0.5, 0.0)]);
        assert!(parse_slots("1 2 3").is_err());
        assert!(parse_slots("x").is_err());
        assert_eq!(parse_coeffs("1, 0.5,0").unwrap(), vec![1.0, 0.5, 0.0]);
    }

    #[test]
    fn bit_packing() {
        let bytes = vec![0b1010_0001, 0xff, 0];
        let bits = bytes_to_bits(&bytes);
        assert_eq!(&bits[..8], &[1, 0, 0, 0, 0, 1, 0, 1]);
        assert_eq!(bits_to_bytes(&bits), bytes);
        assert_eq!(bits_to_bytes(&[1, 1, 0]), vec![3]);
    }

    #[test]
    fn domain_flags() {
        let cli = Cli::try_parse_from(["bckks", "noise-report", "--modular", "97"]).unwrap();
        assert_eq!(domain_override(&cli.common), Some(CoeffDomain::Modular(97)));
        assert!(Cli::try_parse_from(["bckks", "noise-report", "--exact", "--modular", "97"]).is_err());
    }
}
