//! Named parameter sets.

use crate::ring::{default_modulus, CoeffDomain, RingParams};
use crate::sampling::DEFAULT_SIGMA;
use crate::scheme::SchemeParams;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamPreset {
    pub name: &'static str,
    pub n: usize,
    pub lambda_b: u32,
    pub sigma: f64,
    pub h: usize,
    pub log2_delta: u32,
    pub kappa: u32,
    /// Exact integers; otherwise residues modulo the default NTT prime.
    pub exact: bool,
}

const fn desk(name: &'static str, n: usize, h: usize) -> ParamPreset {
    ParamPreset { name, n, lambda_b: 32, sigma: DEFAULT_SIGMA, h, log2_delta: 20, kappa: 8, exact: true }
}

const fn paper(name: &'static str, n: usize, lambda_b: u32, log2_delta: u32, kappa: u32) -> ParamPreset {
    ParamPreset { name, n, lambda_b, sigma: DEFAULT_SIGMA, h: 192, log2_delta, kappa, exact: false }
}

pub const PRESETS: &[ParamPreset] = &[
    desk("desk-64", 64, 16),
    desk("desk-256", 256, 64),
    desk("desk-1024", 1024, 128),
    paper("paper-1024", 1024, 16, 10, 4),
    paper("paper-2048", 2048, 16, 10, 4),
    paper("paper-4096", 4096, 32, 20, 8),
    paper("paper-8192", 8192, 32, 20, 8),
];

impl ParamPreset {
    pub fn by_name(name: &str) -> Result<Self> {
        PRESETS.iter().find(|p| p.name == name).copied().ok_or_else(|| {
            let names: Vec<_> = PRESETS.iter().map(|p| p.name).collect();
            Error::Param(format!("unknown preset {name:?}; known: {}", names.join(", ")))
        })
    }

    pub fn domain(&self) -> CoeffDomain {
        if self.exact {
            CoeffDomain::Exact
        } else {
            CoeffDomain::Modular(default_modulus())
        }
    }

    pub fn delta(&self) -> f64 {
        2f64.powi(self.log2_delta as i32)
    }

    /// Scheme parameters, optionally with the coefficient domain replaced.
    pub fn params(&self, domain: Option<CoeffDomain>) -> Result<SchemeParams> {
        let ring = RingParams::new(self.n, self.lambda_b, domain.unwrap_or_else(|| self.domain()))?;
        SchemeParams::new(ring, self.sigma, self.h, self.delta(), self.kappa)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for p in PRESETS {
            let params = p.params(None).unwrap();
            // flooding must fit the coefficient range
            assert!(6.0 * params.tau() < params.ring.coeff_bound(), "{}", p.name);
            assert!(params.b_star > 0.0 && params.b_max == params.delta / 2.0);
            assert_eq!(ParamPreset::by_name(p.name).unwrap(), *p);
        }
        assert!(ParamPreset::by_name("desk-65").is_err());
        let d = ParamPreset::by_name("desk-256").unwrap();
        let q = default_modulus();
        assert_eq!(d.params(Some(CoeffDomain::Modular(q))).unwrap().ring.domain(), CoeffDomain::Modular(q));
    }

    #[test]
    fn desk_presets_decrypt_exactly() {
        for p in PRESETS.iter().filter(|p| p.exact) {
            let params = p.params(None).unwrap();
            assert!(params.scale().supports_exact_recovery(p.n, params.b_enc()), "{}", p.name);
        }
    }
}
