//! Analytic construction of the n-particle Hardy state and its expansions.
//!
//! Each site k carries two orthonormal bases {|u⟩, |v⟩} and {|c⟩, |d⟩}
//! related by
//!
//! ```text
//!   |c_k⟩ =  A_k |u_k⟩ + B_k |v_k⟩
//!   |d_k⟩ = −B_k*|u_k⟩ + A_k*|v_k⟩        |A_k|² + |B_k|² = 1
//! ```
//!
//! The state of interest is the c-basis product with its all-u component
//! removed,
//!
//! ```text
//!   |Ψₙ⟩ = N (|c₁…cₙ⟩ − 𝒜_Ω |u₁…uₙ⟩),   N = (1 − |𝒜_Ω|²)^(−1/2),
//! ```
//!
//! where 𝒜_α = Π_{k∈α} A_k and ℬ_α = Π_{k∈α} B_k over site subsets α.
//! This module expands |Ψₙ⟩ exactly in three frames:
//!
//! * the u/v product basis on every site (`uv_amplitudes`),
//! * a mixed frame with one site in c/d and the rest in u/v
//!   (`mixed_amplitudes`),
//! * the c/d product basis on every site (`cd_amplitudes`).
//!
//! Bit convention in every frame: a set bit means u (or d on a
//! c/d-measured site), a cleared bit means v (or c), with site 1 as the
//! leftmost character of the printed bitstring.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Statevector;
use crate::sites::SiteSet;

/// Per-site basis-change coefficients (A_k, B_k) for sites 1..=n.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformCoefficients {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

impl TransformCoefficients {
    /// Normalization tolerance on |A_k|² + |B_k|².
    pub const COEFF_TOL: f64 = 1e-12;

    /// Builds coefficients from explicit per-site (A_k, B_k) pairs.
    pub fn new(a: Vec<Complex64>, b: Vec<Complex64>) -> Result<Self> {
        if a.len() < 2 || a.len() != b.len() {
            return Err(Error::EnsembleTooSmall(a.len().min(b.len())));
        }
        if a.len() > crate::sites::MAX_SITES {
            return Err(Error::TooManySites {
                requested: a.len(),
                max: crate::sites::MAX_SITES,
            });
        }
        for (i, (ak, bk)) in a.iter().zip(&b).enumerate() {
            let norm_sq = ak.norm_sqr() + bk.norm_sqr();
            if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > Self::COEFF_TOL {
                return Err(Error::UnnormalizedCoefficients {
                    site: i + 1,
                    norm_sq,
                });
            }
        }
        Ok(TransformCoefficients { a, b })
    }

    /// Real coefficients A_k given per site, with B_k = √(1 − A_k²) ≥ 0.
    pub fn from_a_values(a_values: &[f64]) -> Result<Self> {
        for &ak in a_values {
            if !(0.0..=1.0).contains(&ak) {
                return Err(Error::ParameterOutOfRange {
                    name: "A",
                    value: ak,
                    range: "[0, 1]",
                });
            }
        }
        let a: Vec<Complex64> = a_values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let b: Vec<Complex64> = a_values
            .iter()
            .map(|&x| Complex64::new((1.0 - x * x).max(0.0).sqrt(), 0.0))
            .collect();
        TransformCoefficients::new(a, b)
    }

    /// The equal-coefficient case A_k = A for all k, where the nonlocal
    /// probability takes its maximum.
    pub fn equal_real(n: usize, a: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::EnsembleTooSmall(n));
        }
        TransformCoefficients::from_a_values(&vec![a; n])
    }

    pub fn num_sites(&self) -> usize {
        self.a.len()
    }

    /// A_k, 1-based.
    pub fn a(&self, k: usize) -> Complex64 {
        self.a[k - 1]
    }

    /// B_k, 1-based.
    pub fn b(&self, k: usize) -> Complex64 {
        self.b[k - 1]
    }

    /// |A_k| per site, for report summaries.
    pub fn a_magnitudes(&self) -> Vec<f64> {
        self.a.iter().map(|x| x.norm()).collect()
    }

    /// True when every A_k is real and nonnegative (circuit-representable).
    pub fn is_real(&self) -> bool {
        self.a.iter().all(|x| x.im == 0.0 && x.re >= 0.0)
            && self.b.iter().all(|x| x.im == 0.0 && x.re >= 0.0)
    }

    /// 𝒜_α = Π_{k∈α} A_k.
    pub fn a_product(&self, set: &SiteSet) -> Complex64 {
        set.sites().map(|k| self.a(k)).product()
    }

    /// ℬ_α = Π_{k∈α} B_k.
    pub fn b_product(&self, set: &SiteSet) -> Complex64 {
        set.sites().map(|k| self.b(k)).product()
    }

    /// 𝒜_Ω over all sites.
    pub fn a_omega(&self) -> Complex64 {
        self.a.iter().product()
    }

    /// N = (1 − |𝒜_Ω|²)^(−1/2). Requires a non-degenerate transform.
    pub fn normalization(&self) -> Result<f64> {
        self.reject_degenerate()?;
        Ok(1.0 / (1.0 - self.a_omega().norm_sqr()).sqrt())
    }

    /// Errors if any |A_k| sits on the boundary of (0, 1), where N diverges
    /// or the state factorizes into a product.
    pub fn reject_degenerate(&self) -> Result<()> {
        for (i, ak) in self.a.iter().enumerate() {
            let magnitude = ak.norm();
            if magnitude <= 0.0 || magnitude >= 1.0 {
                return Err(Error::DegenerateTransform {
                    site: i + 1,
                    magnitude,
                });
            }
        }
        Ok(())
    }
}

/// Basis frame in which the amplitudes of a [`HardyState`] are expressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    /// Every site in {|u⟩, |v⟩}; bit 1 = u.
    Uv,
    /// Site k in {|c⟩, |d⟩} (bit 1 = d), the rest in {|u⟩, |v⟩}.
    Mixed(usize),
    /// Every site in {|c⟩, |d⟩}; bit 1 = d.
    Cd,
}

impl std::fmt::Display for Frame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Frame::Uv => write!(f, "u/v"),
            Frame::Mixed(k) => write!(f, "mixed(site {k})"),
            Frame::Cd => write!(f, "c/d"),
        }
    }
}

/// |Ψₙ⟩ expanded in one frame, with its coefficients and normalization.
#[derive(Clone, Debug)]
pub struct HardyState {
    coeffs: TransformCoefficients,
    frame: Frame,
    normalization: f64,
    vector: Statevector,
}

impl HardyState {
    pub fn coefficients(&self) -> &TransformCoefficients {
        &self.coeffs
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn num_sites(&self) -> usize {
        self.coeffs.num_sites()
    }

    /// N = (1 − |𝒜_Ω|²)^(−1/2).
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn vector(&self) -> &Statevector {
        &self.vector
    }

    /// Probability of the outcome printed as `bitstring`.
    pub fn probability_of(&self, bitstring: &str) -> Result<f64> {
        Ok(self.vector.amplitude_of(bitstring)?.norm_sqr())
    }

    /// Outcome probabilities in basis-index order.
    pub fn probabilities(&self) -> Vec<f64> {
        self.vector.probabilities()
    }
}

/// The pair of on-site basis-change matrices for site k.
///
/// Both act on (|0⟩, |1⟩) coordinate pairs with the crate's bit meaning:
/// in the u/v frame bit 1 is u, in the c/d frame bit 1 is d. `to_uv` sends
/// c/d coordinates to u/v coordinates (first column is |c⟩, second is |d⟩)
/// and `to_cd` is its inverse. For real A the `to_uv` matrix equals
/// RY(2 arcsin A) up to the sign of the d column.
pub fn transform_matrices(
    coeffs: &TransformCoefficients,
    k: usize,
) -> Result<(crate::linalg::Gate2, crate::linalg::Gate2)> {
    if k == 0 || k > coeffs.num_sites() {
        return Err(Error::SiteOutOfRange {
            site: k,
            num_sites: coeffs.num_sites(),
        });
    }
    let a = coeffs.a(k);
    let b = coeffs.b(k);
    // |c⟩ = A|u⟩ + B|v⟩ → column (B, A) in (v=0, u=1) coordinates;
    // |d⟩ = −B*|u⟩ + A*|v⟩ → column (A*, −B*).
    let to_uv = crate::linalg::Gate2::new([[b, a.conj()], [a, -b.conj()]])?;
    let to_cd = to_uv.dagger();
    Ok((to_uv, to_cd))
}

/// |Ψₙ⟩ in the u/v product frame.
///
/// The amplitude on the outcome with u on the subset α and v elsewhere is
/// N·𝒜_α·ℬ_ᾱ for every proper subset α ⊊ Ω; the all-u amplitude is zero
/// by construction.
pub fn uv_amplitudes(coeffs: &TransformCoefficients) -> Result<HardyState> {
    coeffs.reject_degenerate()?;
    let n = coeffs.num_sites();
    let normalization = coeffs.normalization()?;

    // Tensor expansion of ⊗ₖ (B_k|v⟩ + A_k|u⟩), site 1 ending up as the
    // most significant bit, then removal of the all-u component.
    let mut amps = product_expansion(coeffs);
    let dim = amps.len();
    amps[dim - 1] = Complex64::ZERO;
    for amp in &mut amps {
        *amp *= normalization;
    }

    Ok(HardyState {
        coeffs: coeffs.clone(),
        frame: Frame::Uv,
        normalization,
        vector: Statevector::from_amplitudes(n, amps)?,
    })
}

/// The separable c-basis product |c₁…cₙ⟩ expanded in the u/v frame.
///
/// This is the non-paradox companion of [`uv_amplitudes`]: it accepts
/// degenerate coefficients and keeps the all-u component, so it describes
/// the state before the all-u removal.
pub fn uv_product_amplitudes(coeffs: &TransformCoefficients) -> Result<Statevector> {
    Statevector::from_amplitudes(coeffs.num_sites(), product_expansion(coeffs))
}

fn product_expansion(coeffs: &TransformCoefficients) -> Vec<Complex64> {
    let n = coeffs.num_sites();
    let mut amps = vec![Complex64::ONE];
    for k in 1..=n {
        let mut next = Vec::with_capacity(amps.len() * 2);
        for &prefix in &amps {
            next.push(prefix * coeffs.b(k)); // bit 0: v
            next.push(prefix * coeffs.a(k)); // bit 1: u
        }
        amps = next;
    }
    amps
}

/// |Ψₙ⟩ with site k in the c/d basis and every other site in u/v.
///
/// The expansion has exactly one d_k term, the one with u everywhere
/// else, carrying coefficient N·B_k·𝒜_Ω. That single term is what ties a
/// D_k outcome to an all-u outcome on the remaining sites. The c_k terms
/// carry N·|B_k|²·𝒜_κ̄ on the all-u-elsewhere outcome and N·𝒜_α·ℬ_{κ̄∖α}
/// on the rest.
pub fn mixed_amplitudes(coeffs: &TransformCoefficients, k: usize) -> Result<HardyState> {
    coeffs.reject_degenerate()?;
    let n = coeffs.num_sites();
    if k == 0 || k > n {
        return Err(Error::SiteOutOfRange {
            site: k,
            num_sites: n,
        });
    }
    let normalization = coeffs.normalization()?;
    let rest = SiteSet::singleton(k).complement(n);
    let rest_index = rest.basis_index(n);
    let k_bit = 1usize << (n - k);

    let mut amps = vec![Complex64::ZERO; 1 << n];
    // c_k terms: every subset α of the remaining sites carries u on α.
    for alpha in SiteSet::all_subsets(n) {
        if !alpha.is_subset_of(&rest) {
            continue;
        }
        let index = alpha.basis_index(n);
        if index == rest_index {
            // all-u elsewhere: the u_k and c_k routes interfere down to |B_k|².
            amps[index] = coeffs.b(k).norm_sqr() * coeffs.a_product(&rest);
        } else {
            let v_sites = rest.difference(&alpha);
            amps[index] = coeffs.a_product(&alpha) * coeffs.b_product(&v_sites);
        }
    }
    // The single d_k term, with u on every other site.
    amps[rest_index | k_bit] = coeffs.b(k) * coeffs.a_omega();
    for amp in &mut amps {
        *amp *= normalization;
    }

    Ok(HardyState {
        coeffs: coeffs.clone(),
        frame: Frame::Mixed(k),
        normalization,
        vector: Statevector::from_amplitudes(n, amps)?,
    })
}

/// |Ψₙ⟩ in the c/d product frame.
///
/// The amplitude with d on the subset β and c elsewhere is
/// N·(1 − |𝒜_Ω|²) for β = ∅ and (−1)^(|β|+1)·N·𝒜_Ω·𝒜*_β̄·ℬ_β otherwise,
/// following the literal binomial expansion of the all-u component in the
/// c/d basis. Signs are an internal convention; probabilities are the
/// contract.
pub fn cd_amplitudes(coeffs: &TransformCoefficients) -> Result<HardyState> {
    coeffs.reject_degenerate()?;
    let n = coeffs.num_sites();
    let normalization = coeffs.normalization()?;
    let a_omega = coeffs.a_omega();

    let mut amps = vec![Complex64::ZERO; 1 << n];
    for beta in SiteSet::all_subsets(n) {
        let index = beta.basis_index(n);
        // ⊗ₖ(A_k*|c⟩ − B_k|d⟩) contributes (−1)^|β| 𝒜*_β̄ ℬ_β on (d on β).
        let complement = beta.complement(n);
        let term = coeffs.a_product(&complement).conj() * coeffs.b_product(&beta);
        let sign = if beta.len() % 2 == 0 { 1.0 } else { -1.0 };
        amps[index] = -a_omega * sign * term;
    }
    amps[0] += Complex64::ONE; // the |c…c⟩ term
    for amp in &mut amps {
        *amp *= normalization;
    }

    Ok(HardyState {
        coeffs: coeffs.clone(),
        frame: Frame::Cd,
        normalization,
        vector: Statevector::from_amplitudes(n, amps)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn coeffs_09(n: usize) -> TransformCoefficients {
        TransformCoefficients::equal_real(n, 0.9).unwrap()
    }

    #[test]
    fn coefficient_validation() {
        assert!(TransformCoefficients::equal_real(1, 0.5).is_err());
        assert!(TransformCoefficients::from_a_values(&[0.5, 1.2]).is_err());
        let unnormalized = TransformCoefficients::new(
            vec![Complex64::new(0.9, 0.0); 2],
            vec![Complex64::new(0.9, 0.0); 2],
        );
        assert!(matches!(
            unnormalized,
            Err(Error::UnnormalizedCoefficients { .. })
        ));
    }

    #[test]
    fn normalization_constant_n3_a09() {
        // N = (1 − 0.9⁶)^(−1/2)
        let n = coeffs_09(3).normalization().unwrap();
        assert_abs_diff_eq!(n, 1.4608911492288936, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_values_are_rejected_for_state_construction() {
        let c = TransformCoefficients::from_a_values(&[1.0, 0.5]).unwrap();
        assert!(matches!(
            uv_amplitudes(&c),
            Err(Error::DegenerateTransform { site: 1, .. })
        ));
        let c = TransformCoefficients::from_a_values(&[0.5, 0.0]).unwrap();
        assert!(matches!(
            cd_amplitudes(&c),
            Err(Error::DegenerateTransform { site: 2, .. })
        ));
    }

    #[test]
    fn product_path_accepts_degenerate_coefficients() {
        // A₁ = 1 factorizes the state; the product expansion is still defined.
        let c = TransformCoefficients::from_a_values(&[1.0, 0.6]).unwrap();
        let v = uv_product_amplitudes(&c).unwrap();
        assert_abs_diff_eq!(v.squared_norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.amplitude_of("10").unwrap().re, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(v.amplitude_of("11").unwrap().re, 0.6, epsilon = 1e-12);
    }

    #[test]
    fn transform_matrix_degenerate_is_identity_like() {
        use crate::linalg::Gate2;
        let c = TransformCoefficients::from_a_values(&[1.0, 0.5]).unwrap();
        let (to_uv, to_cd) = transform_matrices(&c, 1).unwrap();
        // A=1, B=0: |c⟩ ↦ |u⟩ (bit 1), |d⟩ ↦ −|v⟩ up to the sign convention.
        assert_abs_diff_eq!(to_uv.entry(1, 0).re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(to_uv.entry(0, 1).re, 1.0, epsilon = 1e-12);
        let product = to_cd.compose(&to_uv);
        assert!(product.distance(&Gate2::identity()) < 1e-12);
    }

    #[test]
    fn transform_matrix_balanced_case() {
        let c = TransformCoefficients::equal_real(2, FRAC_1_SQRT_2).unwrap();
        let (to_uv, _) = transform_matrices(&c, 1).unwrap();
        for r in 0..2 {
            for col in 0..2 {
                assert_abs_diff_eq!(to_uv.entry(r, col).norm(), FRAC_1_SQRT_2, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn transform_matrix_is_ry_up_to_d_column_sign() {
        use crate::linalg::Gate2;
        let c = coeffs_09(2);
        let (to_uv, to_cd) = transform_matrices(&c, 1).unwrap();
        let theta = 2.0 * 0.9f64.asin();
        let ry = Gate2::ry(theta);
        // c column matches RY directly; d column differs by a sign.
        assert_abs_diff_eq!(to_uv.entry(0, 0).re, ry.entry(0, 0).re, epsilon = 1e-12);
        assert_abs_diff_eq!(to_uv.entry(1, 0).re, ry.entry(1, 0).re, epsilon = 1e-12);
        assert_abs_diff_eq!(to_uv.entry(0, 1).re, -ry.entry(0, 1).re, epsilon = 1e-12);
        assert_abs_diff_eq!(to_uv.entry(1, 1).re, -ry.entry(1, 1).re, epsilon = 1e-12);
        let product = to_cd.compose(&to_uv);
        assert!(product.distance(&Gate2::identity()) < 1e-12);
    }

    #[test]
    fn uv_all_u_amplitude_is_exactly_zero() {
        for n in 2..=6 {
            let st = uv_amplitudes(&coeffs_09(n)).unwrap();
            let all_u = st.vector().amplitude((1 << n) - 1);
            assert_eq!(all_u, Complex64::ZERO);
        }
    }

    #[test]
    fn uv_amplitudes_n3_a09_match_direct_products() {
        // Oracle: N·𝒜_α·ℬ_ᾱ evaluated by hand for two outcomes, checked
        // against the square-sum normalization.
        let st = uv_amplitudes(&coeffs_09(3)).unwrap();
        // amplitude(v₁v₂v₃) = N·B³
        assert_abs_diff_eq!(
            st.vector().amplitude_of("000").unwrap().re,
            0.1209896608530331,
            epsilon = 1e-12
        );
        // amplitude(u₁u₂v₃) = N·A²·B
        assert_abs_diff_eq!(
            st.vector().amplitude_of("110").unwrap().re,
            0.5157980278471413,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(st.vector().squared_norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mixed_frame_n3_a09_anchor_values() {
        let st = mixed_amplitudes(&coeffs_09(3), 2).unwrap();
        // P(u₁ d₂ u₃) = N²B²A⁶
        assert_abs_diff_eq!(
            st.probability_of("111").unwrap(),
            0.21549856048011032,
            epsilon = 1e-12
        );
        // d₂ together with any v elsewhere never occurs
        assert_eq!(st.probability_of("011").unwrap(), 0.0);
        assert_eq!(st.probability_of("110").unwrap(), 0.0);
        assert_eq!(st.probability_of("010").unwrap(), 0.0);
        assert_abs_diff_eq!(st.vector().squared_norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mixed_frame_d_terms_vanish_with_any_v() {
        let c = TransformCoefficients::from_a_values(&[0.3, 0.55, 0.8, 0.62]).unwrap();
        for k in 1..=4 {
            let st = mixed_amplitudes(&c, k).unwrap();
            let v = st.vector();
            for index in 0..v.dimension() {
                let d_set = v.site_bit(index, k) == 1;
                let any_v_elsewhere = (1..=4).any(|j| j != k && v.site_bit(index, j) == 0);
                if d_set && any_v_elsewhere {
                    assert_eq!(v.amplitude(index), Complex64::ZERO);
                }
            }
            // P(d_k) = N²|B_k|²|𝒜_Ω|²
            let n2 = st.normalization().powi(2);
            let expected = n2 * c.b(k).norm_sqr() * c.a_omega().norm_sqr();
            let p_d: f64 = (0..v.dimension())
                .filter(|&i| v.site_bit(i, k) == 1)
                .map(|i| v.amplitude(i).norm_sqr())
                .sum();
            assert_abs_diff_eq!(p_d, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn cd_frame_n3_a09_values() {
        let st = cd_amplitudes(&coeffs_09(3)).unwrap();
        // P(c₁c₂c₃) = N²(1 − A⁶)² = 1 − A⁶
        assert_abs_diff_eq!(
            st.probability_of("000").unwrap(),
            0.46855899999999995,
            epsilon = 1e-12
        );
        let v = st.vector();
        let nonlocal: f64 = (0..v.dimension())
            .filter(|i| i.count_ones() >= 2)
            .map(|i| v.amplitude(i).norm_sqr())
            .sum();
        assert_abs_diff_eq!(nonlocal, 0.107, epsilon = 5e-4); // three-digit anchor
        assert_abs_diff_eq!(nonlocal, 0.10727518340699888, epsilon = 1e-12);
        assert_abs_diff_eq!(v.squared_norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn cd_frame_separable_limit() {
        let c = TransformCoefficients::equal_real(3, 1e-6).unwrap();
        let st = cd_amplitudes(&c).unwrap();
        assert!((st.probability_of("000").unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn nonzero_cd_outcomes_count_is_2n_minus_n_minus_1() {
        for n in 2..=10 {
            let c = TransformCoefficients::equal_real(n, 0.7).unwrap();
            let st = cd_amplitudes(&c).unwrap();
            let v = st.vector();
            let count = (0..v.dimension())
                .filter(|i| i.count_ones() >= 2 && v.amplitude(*i).norm_sqr() > 1e-30)
                .count();
            assert_eq!(count, (1 << n) - n - 1);
        }
    }
}
