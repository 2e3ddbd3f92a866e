//! Permutations of basis-state indices.

use crate::error::{Error, Result};

/// A bijection on `{0, .., len-1}`. Applied to a state, it moves the
/// population at index `i` to index `map[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let len = map.len();
        let mut hit = vec![false; len];
        for &v in &map {
            if v >= len {
                return Err(Error::InvalidPermutation(format!(
                    "entry {v} out of range for length {len}"
                )));
            }
            if hit[v] {
                return Err(Error::InvalidPermutation(format!("entry {v} appears twice")));
            }
            hit[v] = true;
        }
        Ok(Permutation { map })
    }

    pub fn identity(len: usize) -> Self {
        Permutation { map: (0..len).collect() }
    }

    /// The transposition exchanging indices `a` and `b`.
    pub fn transposition(len: usize, a: usize, b: usize) -> Result<Self> {
        if a >= len || b >= len {
            return Err(Error::InvalidPermutation(format!(
                "transposition ({a} {b}) out of range for length {len}"
            )));
        }
        let mut map: Vec<usize> = (0..len).collect();
        map.swap(a, b);
        Ok(Permutation { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Where index `i` is sent.
    pub fn target_of(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { map: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }
}
