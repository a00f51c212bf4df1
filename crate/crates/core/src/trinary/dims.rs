use serde::{Deserialize, Serialize};

use crate::error::{IcqtError, Result};

/// Dimensions of the system, apparatus and programming registers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrinaryDims {
    pub system: usize,
    pub apparatus: usize,
    pub programming: usize,
}

impl TrinaryDims {
    pub fn new(system: usize, apparatus: usize, programming: usize) -> Result<Self> {
        if system == 0 || apparatus == 0 || programming == 0 {
            return Err(IcqtError::ZeroDimension);
        }
        Ok(Self {
            system,
            apparatus,
            programming,
        })
    }

    /// Dimension of the joint system-apparatus space.
    pub fn sa(&self) -> usize {
        self.system * self.apparatus
    }

    pub fn total(&self) -> usize {
        self.programming * self.sa()
    }

    /// `D_A = D_S` and `D_P = D_S * D_A`.
    pub fn is_measurability_valid(&self) -> bool {
        self.apparatus == self.system && self.programming == self.system * self.apparatus
    }

    /// `D_P >= d^2`, enough programs for a tomographically complete set.
    pub fn is_minimal_complete(&self) -> bool {
        self.programming >= self.system * self.system
    }

    pub(crate) fn ensure_matches(&self, other: &TrinaryDims) -> Result<()> {
        if self != other {
            return Err(IcqtError::InvalidInput(format!(
                "trinary dims {:?} do not match {:?}",
                self, other
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicates() {
        let ok = TrinaryDims::new(2, 2, 4).unwrap();
        assert!(ok.is_measurability_valid() && ok.is_minimal_complete());
        let short = TrinaryDims::new(2, 2, 3).unwrap();
        assert!(!short.is_measurability_valid() && !short.is_minimal_complete());
        // large enough for tomography but not D_P = D_S * D_A
        let wide = TrinaryDims::new(2, 3, 4).unwrap();
        assert!(!wide.is_measurability_valid() && wide.is_minimal_complete());
        assert_eq!(wide.total(), 24);
        assert!(TrinaryDims::new(0, 1, 1).is_err());
    }
}
