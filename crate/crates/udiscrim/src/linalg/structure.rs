//! Party structure bookkeeping: which tensor factors make up a gate or state.

use crate::error::{Error, Result};

/// Ordered list of local dimensions, one per party.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartyStructure {
    dims: Vec<usize>,
}

impl PartyStructure {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidParties("empty party list".into()));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidParties("zero local dimension".into()));
        }
        Ok(PartyStructure { dims })
    }

    pub fn single(dim: usize) -> Self {
        PartyStructure { dims: vec![dim] }
    }

    pub fn qubits(n: usize) -> Self {
        PartyStructure { dims: vec![2; n] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Structure of `n` side-by-side copies of this system.
    pub fn repeated(&self, n: usize) -> Self {
        let mut dims = Vec::with_capacity(self.dims.len() * n);
        for _ in 0..n {
            dims.extend_from_slice(&self.dims);
        }
        PartyStructure { dims }
    }

    /// Structure of this system followed by another.
    pub fn concat(&self, other: &PartyStructure) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PartyStructure { dims }
    }

    pub fn subset_dims(&self, parties: &[usize]) -> Vec<usize> {
        parties.iter().map(|&p| self.dims[p]).collect()
    }

    /// Validates a party subset: in range, no duplicates.
    pub fn check_subset(&self, parties: &[usize]) -> Result<()> {
        if parties.is_empty() {
            return Err(Error::InvalidParties("empty subset".into()));
        }
        let mut seen = vec![false; self.dims.len()];
        for &p in parties {
            if p >= self.dims.len() {
                return Err(Error::InvalidParties(format!(
                    "party {} out of range (have {})",
                    p,
                    self.dims.len()
                )));
            }
            if seen[p] {
                return Err(Error::InvalidParties(format!("duplicate party {}", p)));
            }
            seen[p] = true;
        }
        Ok(())
    }
}

/// Decomposes a flat index into per-party digits (most significant first).
pub fn unravel(dims: &[usize], mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for p in (0..dims.len()).rev() {
        out[p] = idx % dims[p];
        idx /= dims[p];
    }
    out
}

/// Recomposes per-party digits into a flat index.
pub fn ravel(dims: &[usize], digits: &[usize]) -> usize {
    debug_assert_eq!(dims.len(), digits.len());
    let mut idx = 0;
    for (d, &x) in dims.iter().zip(digits.iter()) {
        debug_assert!(x < *d);
        idx = idx * d + x;
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ravel_roundtrip() {
        let dims = [2usize, 3, 2];
        for idx in 0..12 {
            let digits = unravel(&dims, idx);
            assert_eq!(ravel(&dims, &digits), idx);
        }
        assert_eq!(unravel(&dims, 7), vec![1, 0, 1]);
    }

    #[test]
    fn subset_validation() {
        let s = PartyStructure::new(vec![2, 2, 3]).unwrap();
        assert!(s.check_subset(&[0, 2]).is_ok());
        assert!(s.check_subset(&[3]).is_err());
        assert!(s.check_subset(&[1, 1]).is_err());
        assert!(s.check_subset(&[]).is_err());
        assert_eq!(s.total_dim(), 12);
        assert_eq!(s.repeated(2).dims(), &[2, 2, 3, 2, 2, 3]);
    }
}
