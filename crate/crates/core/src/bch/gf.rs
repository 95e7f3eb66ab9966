//! Arithmetic in GF(2^m) through log/antilog tables.

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GfContext {
    m: u32,
    primitive_poly: u32,
    /// `exp[i] = alpha^i`, doubled so sums of two logs index directly.
    exp: Vec<u16>,
    /// `log[x]` for `x != 0`; `log[0]` is unused.
    log: Vec<u32>,
}

impl GfContext {
    /// `primitive_poly` includes the `x^m` bit, e.g. `0b1000_1001` for `x^7 + x^3 + 1`.
    pub fn new(m: u32, primitive_poly: u32) -> Result<Self> {
        if !(2..=16).contains(&m) {
            return Err(Error::Param(format!("field degree m = {m} outside 2..=16")));
        }
        if primitive_poly >> m != 1 {
            return Err(Error::Param(format!("polynomial {primitive_poly:#b} does not have degree {m}")));
        }
        let order = (1usize << m) - 1;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u32; order + 1];
        let mut x: u32 = 1;
        for i in 0..order {
            if i > 0 && x == 1 {
                return Err(Error::Param(format!("{primitive_poly:#b} is not primitive")));
            }
            exp[i] = x as u16;
            log[x as usize] = i as u32;
            x <<= 1;
            if x >> m == 1 {
                x ^= primitive_poly;
            }
        }
        if x != 1 {
            return Err(Error::Param(format!("{primitive_poly:#b} is not primitive")));
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(Self { m, primitive_poly, exp, log })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn primitive_poly(&self) -> u32 {
        self.primitive_poly
    }

    /// Size of the multiplicative group, `2^m - 1`.
    pub fn order(&self) -> usize {
        (1 << self.m) - 1
    }

    /// `alpha^i` for any integer exponent.
    pub fn alpha_pow(&self, i: i64) -> u16 {
        self.exp[i.rem_euclid(self.order() as i64) as usize]
    }

    pub fn log(&self, x: u16) -> Option<u32> {
        (x != 0).then(|| self.log[x as usize])
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: u16) -> Option<u16> {
        (a != 0).then(|| self.exp[(self.order() - self.log[a as usize] as usize) % self.order()])
    }

    pub fn div(&self, a: u16, b: u16) -> Option<u16> {
        Some(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u16, e: u64) -> u16 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = self.log[a as usize] as u64 * (e % self.order() as u64);
        self.exp[(l % self.order() as u64) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_roundtrip() {
        let gf = GfContext::new(7, 0b1000_1001).unwrap();
        for x in 1..128u16 {
            assert_eq!(gf.alpha_pow(gf.log(x).unwrap() as i64), x);
            assert_eq!(gf.mul(x, gf.inv(x).unwrap()), 1);
        }
        assert_eq!(gf.log(0), None);
        assert_eq!(gf.alpha_pow(127), 1);
        assert_eq!(gf.alpha_pow(-1), gf.inv(2).unwrap());
    }

    #[test]
    fn multiplication_matches_carryless_reduction() {
        let poly = 0b1_0001_1101u32; // x^8 + x^4 + x^3 + x^2 + 1
        let gf = GfContext::new(8, poly).unwrap();
        let slow = |a: u32, b: u32| {
            let mut r = 0u32;
            for i in 0..8 {
                if (b >> i) & 1 == 1 {
                    r ^= a << i;
                }
            }
            for bit in (8..16).rev() {
                if (r >> bit) & 1 == 1 {
                    r ^= poly << (bit - 8);
                }
            }
            r
        };
        for a in 0..256u32 {
            for b in (0..256u32).step_by(7) {
                assert_eq!(gf.mul(a as u16, b as u16) as u32, slow(a, b));
            }
        }
        assert_eq!(gf.pow(3, 255), 1);
        assert_eq!(gf.div(gf.mul(7, 9), 9), Some(7));
    }

    #[test]
    fn rejects_non_primitive() {
        // x^4 + x^3 + x^2 + x + 1 is irreducible but has order 5
        assert!(GfContext::new(4, 0b11111).is_err());
        assert!(GfContext::new(4, 0b10011).is_ok());
        assert!(GfContext::new(4, 0b1011).is_err());
    }
}
