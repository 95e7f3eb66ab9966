//! Binary artifact files.
//!
//! Layout: `"BCKS"`, `u32` version, `u8` kind tag, 32-byte parameter digest,
//! then the payload. All integers are little-endian and every length is a `u64`.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_bigint::{BigInt, Sign};
use sha2::{Digest, Sha256};

use crate::bch::{BchCode, Permutation};
use crate::ring::{BPoly, CoeffDomain};
use crate::scheme::{Ciphertext, EvalKey, PublicKey, RefreshKey, SchemeParams, SecretKey};
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"BCKS";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    SecretKey = 1,
    PublicKey = 2,
    EvalKey = 3,
    RefreshKey = 4,
    Ciphertext = 5,
    Code = 6,
}

impl Kind {
    fn from_tag(t: u8) -> Result<Self> {
        Ok(match t {
            1 => Kind::SecretKey,
            2 => Kind::PublicKey,
            3 => Kind::EvalKey,
            4 => Kind::RefreshKey,
            5 => Kind::Ciphertext,
            6 => Kind::Code,
            _ => return Err(Error::Format(format!("unknown kind tag {t}"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::SecretKey => "sk",
            Kind::PublicKey => "pk",
            Kind::EvalKey => "evk",
            Kind::RefreshKey => "rk",
            Kind::Ciphertext => "ct",
            Kind::Code => "code",
        }
    }
}

/// Everything needed to rebuild a BCH pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeDescriptor {
    pub m: u32,
    pub primitive_poly: u32,
    pub t: usize,
    /// Generator coefficients, lowest degree first.
    pub generator: Vec<u8>,
    pub perm_seed: [u8; 32],
    pub block_k: usize,
    pub m_bits: usize,
}

impl CodeDescriptor {
    pub fn new(code: &BchCode, perm_seed: [u8; 32], block_k: usize, m_bits: usize) -> Self {
        Self {
            m: code.field().m(),
            primitive_poly: code.field().primitive_poly(),
            t: code.t(),
            generator: code.generator().to_vec(),
            perm_seed,
            block_k,
            m_bits,
        }
    }

    /// Rebuild the code and check the stored generator against it.
    pub fn build(&self) -> Result<(BchCode, Permutation, crate::bch::PipelineParams)> {
        let code = BchCode::build(self.m, self.t, self.primitive_poly)?;
        if code.generator() != self.generator.as_slice() {
            return Err(Error::Format("stored generator does not match the rebuilt code".into()));
        }
        let params = crate::bch::PipelineParams::new(self.m_bits, self.block_k, &code)?;
        let perm = Permutation::new(params.coded_bits(&code), self.perm_seed)?;
        Ok((code, perm, params))
    }

    pub fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"bckks-code-v1");
        h.update(self.m.to_le_bytes());
        h.update(self.primitive_poly.to_le_bytes());
        h.update((self.t as u64).to_le_bytes());
        h.update(&self.generator);
        h.update(self.perm_seed);
        h.update((self.block_k as u64).to_le_bytes());
        h.update((self.m_bits as u64).to_le_bytes());
        h.finalize().into()
    }
}

/// Digest binding an artifact to one parameter set.
pub fn scheme_digest(p: &SchemeParams) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"bckks-scheme-v1");
    h.update(p.ring.digest());
    h.update(p.sigma.to_bits().to_le_bytes());
    h.update((p.h as u64).to_le_bytes());
    h.update(p.delta.to_bits().to_le_bytes());
    h.update(p.kappa.to_le_bytes());
    h.update(p.b_max.to_bits().to_le_bytes());
    h.update(p.b_star.to_bits().to_le_bytes());
    h.finalize().into()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Artifact {
    SecretKey(SecretKey),
    PublicKey(PublicKey),
    EvalKey(EvalKey),
    RefreshKey(RefreshKey),
    Ciphertext(Ciphertext),
    Code(CodeDescriptor),
}

impl Artifact {
    pub fn kind(&self) -> Kind {
        match self {
            Artifact::SecretKey(_) => Kind::SecretKey,
            Artifact::PublicKey(_) => Kind::PublicKey,
            Artifact::EvalKey(_) => Kind::EvalKey,
            Artifact::RefreshKey(_) => Kind::RefreshKey,
            Artifact::Ciphertext(_) => Kind::Ciphertext,
            Artifact::Code(_) => Kind::Code,
        }
    }
}

fn wrong_kind(want: Kind, got: Kind) -> Error {
    Error::Format(format!("expected a {} artifact, found {}", want.name(), got.name()))
}

macro_rules! into_kind {
    ($fn:ident, $variant:ident, $ty:ty) => {
        impl Artifact {
            pub fn $fn(self) -> Result<$ty> {
                match self {
                    Artifact::$variant(x) => Ok(x),
                    other => Err(wrong_kind(Kind::$variant, other.kind())),
                }
            }
        }
    };
}

into_kind!(into_secret_key, SecretKey, SecretKey);
into_kind!(into_public_key, PublicKey, PublicKey);
into_kind!(into_eval_key, EvalKey, EvalKey);
into_kind!(into_refresh_key, RefreshKey, RefreshKey);
into_kind!(into_ciphertext, Ciphertext, Ciphertext);
into_kind!(into_code, Code, CodeDescriptor);

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, x: u8) {
        self.0.push(x);
    }
    fn u32(&mut self, x: u32) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
    fn u64(&mut self, x: u64) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
    fn f64(&mut self, x: f64) {
        self.u64(x.to_bits());
    }
    fn bytes(&mut self, b: &[u8]) {
        self.u64(b.len() as u64);
        self.0.extend_from_slice(b);
    }
    fn poly(&mut self, p: &BPoly) {
        match p.domain() {
            CoeffDomain::Exact => {
                self.u8(0);
                self.u64(0);
                self.u64(p.len() as u64);
                for c in p.exact_coeffs().expect("exact") {
                    let (sign, mag) = c.to_bytes_le();
                    self.u8((sign == Sign::Minus) as u8);
                    self.bytes(&mag);
                }
            }
            CoeffDomain::Modular(q) => {
                self.u8(1);
                self.u64(q);
                let (_, res) = p.residues().expect("modular");
                self.u64(res.len() as u64);
                for &r in res {
                    self.u64(r);
                }
            }
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::Format("truncated artifact".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn len(&mut self) -> Result<usize> {
        let n = self.u64()?;
        if n > (self.buf.len() - self.pos) as u64 * 8 + 64 {
            return Err(Error::Format(format!("length {n} exceeds the file")));
        }
        Ok(n as usize)
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }
    fn bytes(&mut self) -> Result<&'a [u8]> {
        let n = self.len()?;
        self.take(n)
    }
    fn poly(&mut self) -> Result<BPoly> {
        let tag = self.u8()?;
        let q = self.u64()?;
        let n = self.len()?;
        match tag {
            0 => {
                let mut v = Vec::with_capacity(n);
                for _ in 0..n {
                    let neg = self.u8()? != 0;
                    let mag = BigInt::from_bytes_le(Sign::Plus, self.bytes()?);
                    v.push(if neg { -mag } else { mag });
                }
                Ok(BPoly::from_bigints(v, CoeffDomain::Exact))
            }
            1 => {
                if q < 2 {
                    return Err(Error::Format(format!("modulus {q}")));
                }
                let mut v = Vec::with_capacity(n);
                for _ in 0..n {
                    let r = self.u64()?;
                    if r >= q {
                        return Err(Error::Format(format!("residue {r} not below {q}")));
                    }
                    v.push(r);
                }
                Ok(BPoly::from_residues(v, q))
            }
            t => Err(Error::Format(format!("unknown domain tag {t}"))),
        }
    }
}

pub fn to_bytes(a: &Artifact, digest: &[u8; 32]) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.u32(FORMAT_VERSION);
    w.u8(a.kind() as u8);
    w.0.extend_from_slice(digest);
    match a {
        Artifact::SecretKey(sk) => {
            w.u64(sk.h as u64);
            w.poly(&sk.s);
        }
        Artifact::PublicKey(pk) => {
            w.poly(&pk.b);
            w.poly(&pk.a);
        }
        Artifact::EvalKey(evk) => {
            w.poly(&evk.b0);
            w.poly(&evk.a0);
        }
        Artifact::RefreshKey(rk) => {
            w.f64(rk.entry_bound);
            w.f64(rk.tau);
            w.u32(rk.kappa);
            w.poly(&rk.r0);
            w.poly(&rk.r1);
        }
        Artifact::Ciphertext(ct) => {
            w.f64(ct.noise_bound);
            w.f64(ct.scale);
            w.poly(&ct.c0);
            w.poly(&ct.c1);
        }
        Artifact::Code(d) => {
            w.u32(d.m);
            w.u32(d.primitive_poly);
            w.u64(d.t as u64);
            w.bytes(&d.generator);
            w.0.extend_from_slice(&d.perm_seed);
            w.u64(d.block_k as u64);
            w.u64(d.m_bits as u64);
        }
    }
    w.0
}

/// Parse an artifact. With `expected` set, a different digest is rejected.
pub fn from_bytes(buf: &[u8], expected: Option<&[u8; 32]>) -> Result<(Artifact, [u8; 32])> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format version {version}")));
    }
    let kind = Kind::from_tag(r.u8()?)?;
    let digest: [u8; 32] = r.take(32)?.try_into().unwrap();
    if expected.is_some_and(|e| *e != digest) {
        return Err(Error::DigestMismatch);
    }
    let a = match kind {
        Kind::SecretKey => {
            let h = r.u64()? as usize;
            Artifact::SecretKey(SecretKey { s: r.poly()?, h })
        }
        Kind::PublicKey => Artifact::PublicKey(PublicKey { b: r.poly()?, a: r.poly()? }),
        Kind::EvalKey => Artifact::EvalKey(EvalKey { b0: r.poly()?, a0: r.poly()? }),
        Kind::RefreshKey => {
            let entry_bound = r.f64()?;
            let tau = r.f64()?;
            let kappa = r.u32()?;
            Artifact::RefreshKey(RefreshKey { r0: r.poly()?, r1: r.poly()?, entry_bound, tau, kappa })
        }
        Kind::Ciphertext => {
            let noise_bound = r.f64()?;
            let scale = r.f64()?;
            Artifact::Ciphertext(Ciphertext { c0: r.poly()?, c1: r.poly()?, noise_bound, scale })
        }
        Kind::Code => {
            let m = r.u32()?;
            let primitive_poly = r.u32()?;
            let t = r.u64()? as usize;
            let generator = r.bytes()?.to_vec();
            let perm_seed = r.take(32)?.try_into().unwrap();
            let block_k = r.u64()? as usize;
            let m_bits = r.u64()? as usize;
            let d = CodeDescriptor { m, primitive_poly, t, generator, perm_seed, block_k, m_bits };
            if d.digest() != digest {
                return Err(Error::DigestMismatch);
            }
            Artifact::Code(d)
        }
    };
    if r.pos != buf.len() {
        return Err(Error::Format(format!("{} trailing bytes", buf.len() - r.pos)));
    }
    Ok((a, digest))
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::Param(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn save(path: &Path, a: &Artifact, digest: &[u8; 32]) -> Result<()> {
    write_atomic(path, &to_bytes(a, digest))
}

pub fn load(path: &Path, expected: Option<&[u8; 32]>) -> Result<Artifact> {
    let buf = fs::read(path)?;
    Ok(from_bytes(&buf, expected)?.0)
}
