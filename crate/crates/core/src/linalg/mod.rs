//! Minimal dense complex linear algebra for qubit statevectors: gate
//! application, reduced-state spectra via the reshaped amplitude matrix,
//! entropy and negativity. Everything here is a pure function on immutable
//! inputs.

pub mod gates;
pub mod spectrum;
pub mod state;

pub use gates::{apply_multi_controlled_x, apply_single_qubit_gate, Gate2};
pub use spectrum::{
    negativity, schmidt_spectrum, von_neumann_entropy, ReducedSpectrum, SPECTRUM_CLIP,
};
pub use state::{bitstring_of_index, index_of_bitstring, Statevector, NORM_TOL};
