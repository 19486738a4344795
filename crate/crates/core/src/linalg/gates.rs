//! Single-qubit gates and the multi-controlled X.
//!
//! Gate application is a pure function: it takes a state by reference and
//! returns the evolved state. Unitarity is checked once at gate
//! construction so usage errors surface before any amplitude is touched.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::state::Statevector;
use crate::sites::SiteSet;

/// A 2×2 unitary, row-major, acting on the (|0⟩, |1⟩) coordinates of a site.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate2 {
    m: [[Complex64; 2]; 2],
}

impl Gate2 {
    /// Unitarity tolerance enforced at construction.
    pub const UNITARITY_TOL: f64 = 1e-12;

    /// Wraps a matrix, rejecting anything that is not unitary within 1e-12.
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        // max entry deviation of G G† from the identity
        let mut deviation: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let entry = m[r][0] * m[c][0].conj() + m[r][1] * m[c][1].conj();
                let expected = if r == c {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                deviation = deviation.max((entry - expected).norm());
            }
        }
        if deviation > Self::UNITARITY_TOL {
            return Err(Error::NonUnitaryGate { deviation });
        }
        Ok(Gate2 { m })
    }

    pub fn identity() -> Self {
        Gate2 {
            m: [
                [Complex64::ONE, Complex64::ZERO],
                [Complex64::ZERO, Complex64::ONE],
            ],
        }
    }

    /// Rotation about Y: [[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]].
    pub fn ry(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Gate2 {
            m: [
                [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
            ],
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Gate2 {
            m: [
                [self.m[0][0].conj(), self.m[1][0].conj()],
                [self.m[0][1].conj(), self.m[1][1].conj()],
            ],
        }
    }

    /// Matrix product self · other.
    pub fn compose(&self, other: &Gate2) -> Self {
        let mut m = [[Complex64::ZERO; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] = self.m[r][0] * other.m[0][c] + self.m[r][1] * other.m[1][c];
            }
        }
        Gate2 { m }
    }

    /// Max entry deviation from another gate.
    pub fn distance(&self, other: &Gate2) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                d = d.max((self.m[r][c] - other.m[r][c]).norm());
            }
        }
        d
    }
}

fn check_site(site: usize, num_sites: usize) -> Result<()> {
    if site == 0 || site > num_sites {
        return Err(Error::SiteOutOfRange { site, num_sites });
    }
    Ok(())
}

/// Applies a single-qubit gate on the given site (1-based).
///
/// Norm is preserved within 1e-12 by unitarity of the gate.
pub fn apply_single_qubit_gate(
    state: &Statevector,
    site: usize,
    gate: &Gate2,
) -> Result<Statevector> {
    let m = state.num_sites();
    check_site(site, m)?;
    let mut out = state.clone();
    apply_single_qubit_gate_in_place(&mut out, site, gate);
    Ok(out)
}

pub(crate) fn apply_single_qubit_gate_in_place(state: &mut Statevector, site: usize, gate: &Gate2) {
    let m = state.num_sites();
    let bit = 1usize << (m - site);
    let dim = state.dimension();
    let g = [
        [gate.entry(0, 0), gate.entry(0, 1)],
        [gate.entry(1, 0), gate.entry(1, 1)],
    ];
    let amps = state.amplitudes_mut();
    let mut base = 0usize;
    while base < dim {
        for low in base..base + bit {
            let a0 = amps[low];
            let a1 = amps[low | bit];
            amps[low] = g[0][0] * a0 + g[0][1] * a1;
            amps[low | bit] = g[1][0] * a0 + g[1][1] * a1;
        }
        base += bit << 1;
    }
}

/// Flips the target site wherever every control site's bit is 1.
///
/// This is a permutation of amplitudes, so the norm is preserved exactly
/// and applying it twice restores the original state bit for bit.
pub fn apply_multi_controlled_x(
    state: &Statevector,
    controls: &SiteSet,
    target: usize,
) -> Result<Statevector> {
    let m = state.num_sites();
    check_site(target, m)?;
    controls.validate(m)?;
    if controls.contains(target) {
        return Err(Error::ControlTargetOverlap { site: target });
    }
    let control_mask: usize = controls.sites().map(|k| 1usize << (m - k)).sum();
    let target_bit = 1usize << (m - target);
    let mut out = state.clone();
    let amps = out.amplitudes_mut();
    for i in 0..amps.len() {
        if i & control_mask == control_mask && i & target_bit == 0 {
            amps.swap(i, i | target_bit);
        }
    }
    Ok(out)
}
