//! Dense complex statevector over m qubit sites.
//!
//! Basis indexing is fixed once for the whole crate: site k (1-based)
//! occupies bit position m-k of the basis index, so site 1 is the most
//! significant bit and the printed bitstring of an index reads site 1
//! leftmost. `format!("{:0m$b}", index)` therefore prints outcomes in the
//! same order the sites are labeled.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sites::MAX_SITES;

/// Tolerance used when a state is flagged as normalized.
pub const NORM_TOL: f64 = 1e-12;

/// A pure state of `num_sites` qubits as 2^m complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    num_sites: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// The computational basis state |0...0⟩.
    pub fn zero_state(num_sites: usize) -> Result<Self> {
        if num_sites == 0 || num_sites > MAX_SITES {
            return Err(Error::TooManySites {
                requested: num_sites,
                max: MAX_SITES,
            });
        }
        let mut amps = vec![Complex64::ZERO; 1 << num_sites];
        amps[0] = Complex64::ONE;
        Ok(Statevector { num_sites, amps })
    }

    /// Wraps an amplitude array; the length must be exactly 2^num_sites.
    pub fn from_amplitudes(num_sites: usize, amps: Vec<Complex64>) -> Result<Self> {
        if num_sites == 0 || num_sites > MAX_SITES {
            return Err(Error::TooManySites {
                requested: num_sites,
                max: MAX_SITES,
            });
        }
        if amps.len() != 1 << num_sites {
            return Err(Error::DimensionMismatch {
                len: amps.len(),
                num_sites,
            });
        }
        if !amps.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::NonFiniteAmplitude);
        }
        Ok(Statevector { num_sites, amps })
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn dimension(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    /// Amplitude of the basis state written as a bitstring, site 1 leftmost.
    pub fn amplitude_of(&self, bitstring: &str) -> Result<Complex64> {
        Ok(self.amps[self.index_of(bitstring)?])
    }

    /// Basis index of a bitstring outcome.
    pub fn index_of(&self, bitstring: &str) -> Result<usize> {
        index_of_bitstring(bitstring, self.num_sites)
    }

    pub fn squared_norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.squared_norm() - 1.0).abs() <= tol
    }

    /// Rescales to unit norm.
    pub fn normalized(mut self) -> Self {
        let n = self.squared_norm().sqrt();
        if n > 0.0 {
            let inv = 1.0 / n;
            for a in &mut self.amps {
                *a *= inv;
            }
        }
        self
    }

    /// Outcome probabilities |amplitude|^2 in basis-index order.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Value of site k's bit within a basis index.
    pub fn site_bit(&self, index: usize, site: usize) -> u8 {
        ((index >> (self.num_sites - site)) & 1) as u8
    }

    /// Printed form of a basis index, site 1 leftmost.
    pub fn bitstring(&self, index: usize) -> String {
        bitstring_of_index(index, self.num_sites)
    }
}

/// Basis index of a bitstring over `num_sites` sites, site 1 leftmost.
pub fn index_of_bitstring(bitstring: &str, num_sites: usize) -> Result<usize> {
    if bitstring.len() != num_sites || !bitstring.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::DimensionMismatch {
            len: bitstring.len(),
            num_sites,
        });
    }
    Ok(bitstring
        .bytes()
        .fold(0usize, |acc, b| (acc << 1) | usize::from(b == b'1')))
}

/// Printed form of a basis index over `num_sites` sites.
pub fn bitstring_of_index(index: usize, num_sites: usize) -> String {
    format!("{index:0num_sites$b}")
}
