use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::{Error, Result};

/// A public bit permutation drawn by Fisher-Yates from a ChaCha20 stream.
/// Position `j` of the permuted word holds bit `forward[j]` of the original.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    seed: [u8; 32],
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    pub fn new(size: usize, seed: [u8; 32]) -> Result<Self> {
        if size == 0 {
            return Err(Error::Param("permutation size must be positive".into()));
        }
        let mut forward: Vec<usize> = (0..size).collect();
        forward.shuffle(&mut ChaCha20Rng::from_seed(seed));
        let mut inverse = vec![0; size];
        for (j, &i) in forward.iter().enumerate() {
            inverse[i] = j;
        }
        Ok(Self { seed, forward, inverse })
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn seed(&self) -> [u8; 32] {
        self.seed
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }

    pub fn apply<T: Copy>(&self, bits: &[T]) -> Vec<T> {
        self.forward.iter().map(|&i| bits[i]).collect()
    }

    pub fn unapply<T: Copy>(&self, bits: &[T]) -> Vec<T> {
        self.inverse.iter().map(|&j| bits[j]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_one_is_identity() {
        let p = Permutation::new(1, [7; 32]).unwrap();
        assert_eq!(p.forward(), &[0]);
        assert!(Permutation::new(0, [0; 32]).is_err());
    }

    #[test]
    fn bijection_and_inverse() {
        let p = Permutation::new(1016, [3; 32]).unwrap();
        let mut seen = vec![false; 1016];
        for &i in p.forward() {
            assert!(!seen[i]);
            seen[i] = true;
        }
        for j in 0..1016 {
            assert_eq!(p.inverse()[p.forward()[j]], j);
            assert_eq!(p.forward()[p.inverse()[j]], j);
        }
        let data: Vec<usize> = (0..1016).map(|x| x * 3).collect();
        assert_eq!(p.unapply(&p.apply(&data)), data);
        assert_ne!(p.apply(&data), data);
    }

    #[test]
    fn deterministic_in_seed() {
        assert_eq!(Permutation::new(500, [9; 32]).unwrap(), Permutation::new(500, [9; 32]).unwrap());
        assert_ne!(Permutation::new(500, [9; 32]).unwrap(), Permutation::new(500, [8; 32]).unwrap());
    }
}
