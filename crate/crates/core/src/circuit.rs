//! Quantum circuits that prepare and probe the state on a statevector
//! engine, with exact histograms and seeded shot sampling.
//!
//! All three circuits start from |0…0⟩ with one ancilla after the data
//! sites. RY(θ_k) on each data site takes |0⟩ ≡ |c_k⟩ into the u/v frame
//! (bit 1 = u after the rotation, with A_k = sin(θ_k/2)), then an X on the
//! ancilla controlled by every data site marks the all-u component, and
//! post-selecting the ancilla on 0 removes it. The probe circuits append
//! RY(−θ_k) on one site (mixed frame, bit 1 = d there) or on all sites
//! (full c/d frame). RY(−θ) sends |d⟩ to −|1⟩; the sign never reaches a
//! probability.
//!
//! Histograms over the data-site outcomes are exact by default; sampled
//! histograms draw a seeded multinomial from the exact post-selected
//! distribution, one RNG stream per (seed, execution index) so batch
//! averages reproduce exactly.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::TransformCoefficients;
use crate::linalg::gates::apply_single_qubit_gate_in_place;
use crate::linalg::{apply_multi_controlled_x, Gate2, Statevector};
use crate::sites::SiteSet;

/// One gate in a circuit, over 1-based sites.
#[derive(Clone, Debug, PartialEq)]
pub enum GateOp {
    Ry { site: usize, theta: f64 },
    Mcx { controls: SiteSet, target: usize },
}

/// Which probe the circuit realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CircuitMode {
    /// State preparation only; outcomes are read in the u/v frame.
    Prepare,
    /// Preparation followed by RY(−θ_k) on site k (c/d there, u/v elsewhere).
    Mixed(usize),
    /// Preparation followed by RY(−θ_k) on every site (full c/d frame).
    FullCd,
}

impl std::fmt::Display for CircuitMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CircuitMode::Prepare => write!(f, "prepare"),
            CircuitMode::Mixed(k) => write!(f, "mixed:{k}"),
            CircuitMode::FullCd => write!(f, "full-cd"),
        }
    }
}

/// An ordered gate list with an optional ancilla post-selection rule.
#[derive(Clone, Debug)]
pub struct CircuitSpec {
    num_data_sites: usize,
    has_ancilla: bool,
    gates: Vec<GateOp>,
    /// (site, required bit); the site must be the ancilla.
    postselect: Option<(usize, u8)>,
}

impl CircuitSpec {
    pub fn num_data_sites(&self) -> usize {
        self.num_data_sites
    }

    /// Total simulated sites including the ancilla.
    pub fn num_sites(&self) -> usize {
        self.num_data_sites + usize::from(self.has_ancilla)
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn postselect(&self) -> Option<(usize, u8)> {
        self.postselect
    }
}

/// The rotation angle realizing a transform coefficient: θ = 2·arcsin(A).
pub fn theta_of_a(a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::ParameterOutOfRange {
            name: "A",
            value: a,
            range: "(0, 1)",
        });
    }
    Ok(2.0 * a.asin())
}

/// Per-site angles for real coefficients.
pub fn thetas_of(coeffs: &TransformCoefficients) -> Result<Vec<f64>> {
    (1..=coeffs.num_sites())
        .map(|k| {
            let a = coeffs.a(k);
            if a.im != 0.0 {
                return Err(Error::ComplexCoefficients { site: k });
            }
            theta_of_a(a.re)
        })
        .collect()
}

/// Builds one of the three probe circuits for n data sites.
pub fn build_circuit(n: usize, thetas: &[f64], mode: CircuitMode) -> Result<CircuitSpec> {
    if n < 2 {
        return Err(Error::EnsembleTooSmall(n));
    }
    if thetas.len() != n {
        return Err(Error::DimensionMismatch {
            len: thetas.len(),
            num_sites: n,
        });
    }
    for &theta in thetas {
        if !(theta > 0.0 && theta < std::f64::consts::PI) {
            return Err(Error::ParameterOutOfRange {
                name: "theta",
                value: theta,
                range: "(0, pi)",
            });
        }
    }
    if let CircuitMode::Mixed(k) = mode {
        if k == 0 || k > n {
            return Err(Error::SiteOutOfRange {
                site: k,
                num_sites: n,
            });
        }
    }

    let ancilla = n + 1;
    let mut gates: Vec<GateOp> = (1..=n)
        .map(|site| GateOp::Ry {
            site,
            theta: thetas[site - 1],
        })
        .collect();
    gates.push(GateOp::Mcx {
        controls: SiteSet::full(n),
        target: ancilla,
    });
    match mode {
        CircuitMode::Prepare => {}
        CircuitMode::Mixed(k) => gates.push(GateOp::Ry {
            site: k,
            theta: -thetas[k - 1],
        }),
        CircuitMode::FullCd => {
            for site in 1..=n {
                gates.push(GateOp::Ry {
                    site,
                    theta: -thetas[site - 1],
                });
            }
        }
    }

    Ok(CircuitSpec {
        num_data_sites: n,
        has_ancilla: true,
        gates,
        postselect: Some((ancilla, 0)),
    })
}

/// Exact post-selected outcome distribution over the data sites.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExactHistogram {
    pub num_sites: usize,
    /// bitstring (site 1 leftmost) → probability; sums to 1 after
    /// post-selection renormalization.
    pub probabilities: BTreeMap<String, f64>,
    /// Probability that the run survives post-selection.
    pub postselect_success: f64,
}

impl ExactHistogram {
    pub fn probability(&self, outcome: &str) -> f64 {
        self.probabilities.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probabilities.values().sum()
    }
}

/// Counts from a seeded multinomial draw of an exact histogram.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampledHistogram {
    pub num_sites: usize,
    /// bitstring → count; counts sum to `shots`.
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
    pub seed: u64,
    /// RNG stream index, for batch executions under one seed.
    pub stream: u64,
    pub postselect_success: f64,
}

impl SampledHistogram {
    pub fn count(&self, outcome: &str) -> u64 {
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    pub fn frequency(&self, outcome: &str) -> f64 {
        self.count(outcome) as f64 / self.shots as f64
    }
}

/// Runs the circuit from |0…0⟩, applies the post-selection rule and returns
/// the exact renormalized data-site distribution.
pub fn run_exact(circuit: &CircuitSpec) -> Result<ExactHistogram> {
    let m = circuit.num_sites();
    let mut state = Statevector::zero_state(m)?;
    for gate in &circuit.gates {
        match gate {
            GateOp::Ry { site, theta } => {
                if *site == 0 || *site > m {
                    return Err(Error::SiteOutOfRange {
                        site: *site,
                        num_sites: m,
                    });
                }
                apply_single_qubit_gate_in_place(&mut state, *site, &Gate2::ry(*theta));
            }
            GateOp::Mcx { controls, target } => {
                state = apply_multi_controlled_x(&state, controls, *target)?;
            }
        }
    }

    let n = circuit.num_data_sites;
    let mut data_probs = vec![0.0f64; 1 << n];
    let mut success = 1.0;
    match circuit.postselect {
        Some((site, bit)) => {
            // the ancilla is the trailing site, so the data index is the
            // basis index with its last bit stripped
            if !circuit.has_ancilla || site != m {
                return Err(Error::MissingAncilla);
            }
            let mut kept = 0.0f64;
            for (index, amp) in state.amplitudes().iter().enumerate() {
                if (index & 1) as u8 == bit {
                    let p = amp.norm_sqr();
                    kept += p;
                    data_probs[index >> 1] += p;
                }
            }
            if kept < 1e-12 {
                return Err(Error::PostSelectionAnnihilated { rate: kept });
            }
            success = kept;
            for p in &mut data_probs {
                *p /= kept;
            }
        }
        None => {
            // no rule: marginalize over any trailing ancilla
            let shift = m - n;
            for (index, amp) in state.amplitudes().iter().enumerate() {
                data_probs[index >> shift] += amp.norm_sqr();
            }
        }
    }

    let probabilities = data_probs
        .iter()
        .enumerate()
        .map(|(index, &p)| (crate::linalg::bitstring_of_index(index, n), p))
        .collect();
    Ok(ExactHistogram {
        num_sites: n,
        probabilities,
        postselect_success: success,
    })
}

/// Multinomial draw from an exact distribution; deterministic per
/// (seed, stream). `sample_shots` uses stream 0.
pub fn sample_shots(hist: &ExactHistogram, shots: u64, seed: u64) -> Result<SampledHistogram> {
    sample_shots_stream(hist, shots, seed, 0)
}

/// As [`sample_shots`], on an explicit RNG stream index.
pub fn sample_shots_stream(
    hist: &ExactHistogram,
    shots: u64,
    seed: u64,
    stream: u64,
) -> Result<SampledHistogram> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);

    // cumulative distribution in the histogram's (lexicographic) key order
    let outcomes: Vec<&String> = hist.probabilities.keys().collect();
    let mut cumulative = Vec::with_capacity(outcomes.len());
    let mut acc = 0.0f64;
    for key in &outcomes {
        acc += hist.probabilities[*key];
        cumulative.push(acc);
    }
    let total = acc;

    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for _ in 0..shots {
        let x: f64 = rng.random::<f64>() * total;
        let idx = cumulative
            .partition_point(|&c| c < x)
            .min(outcomes.len() - 1);
        *counts.entry(outcomes[idx].clone()).or_insert(0) += 1;
    }

    Ok(SampledHistogram {
        num_sites: hist.num_sites,
        counts,
        shots,
        seed,
        stream,
        postselect_success: hist.postselect_success,
    })
}

/// Repeated sampled executions of one distribution: execution i draws on
/// RNG stream i of the given seed.
pub fn sample_executions(
    hist: &ExactHistogram,
    shots: u64,
    seed: u64,
    executions: u64,
) -> Result<Vec<SampledHistogram>> {
    (0..executions)
        .map(|stream| sample_shots_stream(hist, shots, seed, stream))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::{cd_amplitudes, uv_amplitudes};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn theta_of_a_anchor_values() {
        // A = 0.9 ↔ θ ≈ 0.713π
        let theta = theta_of_a(0.9).unwrap();
        assert_abs_diff_eq!(theta, 0.713 * PI, epsilon = 1e-3 * PI);
        assert_abs_diff_eq!(theta, 2.2395390299972684, epsilon = 1e-12);
        // balanced case: exactly π/2
        assert_abs_diff_eq!(
            theta_of_a(std::f64::consts::FRAC_1_SQRT_2).unwrap(),
            PI / 2.0,
            epsilon = 1e-15
        );
        // boundary trend: θ → π as A → 1
        assert!(theta_of_a(1.0 - 1e-12).unwrap() > PI - 1e-4);
        assert!(theta_of_a(0.0).is_err());
        assert!(theta_of_a(1.0).is_err());
    }

    #[test]
    fn circuit_structure_per_mode() {
        let thetas = vec![theta_of_a(0.9).unwrap(); 3];
        let prepare = build_circuit(3, &thetas, CircuitMode::Prepare).unwrap();
        assert_eq!(prepare.gates().len(), 4); // 3 RY + 1 MCX
        assert_eq!(prepare.postselect(), Some((4, 0)));
        assert_eq!(prepare.num_sites(), 4);

        let mixed = build_circuit(3, &thetas, CircuitMode::Mixed(2)).unwrap();
        assert_eq!(mixed.gates().len(), 5);
        match mixed.gates().last().unwrap() {
            GateOp::Ry { site, theta } => {
                assert_eq!(*site, 2);
                assert!(*theta < 0.0);
            }
            other => panic!("unexpected final gate {other:?}"),
        }

        let thetas2 = vec![theta_of_a(0.8).unwrap(); 2];
        let full = build_circuit(2, &thetas2, CircuitMode::FullCd).unwrap();
        assert_eq!(full.gates().len(), 5); // 2 forward RY + MCX + 2 backward RY
    }

    #[test]
    fn build_rejects_bad_parameters() {
        let thetas = vec![1.0; 3];
        assert!(build_circuit(1, &[1.0], CircuitMode::Prepare).is_err());
        assert!(build_circuit(3, &[1.0, 1.0], CircuitMode::Prepare).is_err());
        assert!(build_circuit(3, &thetas, CircuitMode::Mixed(4)).is_err());
        assert!(build_circuit(3, &[1.0, PI, 1.0], CircuitMode::Prepare).is_err());
    }

    #[test]
    fn post_selection_annihilation_is_reported() {
        // θ just below π puts nearly all weight on the discarded branch
        let thetas = vec![PI - 1e-9; 3];
        let err = run_exact(&build_circuit(3, &thetas, CircuitMode::Prepare).unwrap()).unwrap_err();
        assert!(matches!(err, Error::PostSelectionAnnihilated { .. }));
    }

    fn exact_for(n: usize, a: f64, mode: CircuitMode) -> ExactHistogram {
        let thetas = vec![theta_of_a(a).unwrap(); n];
        run_exact(&build_circuit(n, &thetas, mode).unwrap()).unwrap()
    }

    #[test]
    fn prepare_quenches_the_all_u_outcome() {
        let hist = exact_for(3, 0.9, CircuitMode::Prepare);
        assert!(hist.probability("111") <= 1e-12);
        // post-selection succeeds with probability 1 − A⁶
        assert_abs_diff_eq!(
            hist.postselect_success,
            1.0 - 0.9f64.powi(6),
            epsilon = 1e-12
        );
        // discarded ancilla branch carries |𝒜_Ω|²
        assert_abs_diff_eq!(
            1.0 - hist.postselect_success,
            0.9f64.powi(6),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(hist.total(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn prepare_success_rate_matches_state_normalization() {
        let coeffs = TransformCoefficients::equal_real(3, 0.9).unwrap();
        let hist = exact_for(3, 0.9, CircuitMode::Prepare);
        let n = coeffs.normalization().unwrap();
        assert_abs_diff_eq!(hist.postselect_success, 1.0 / (n * n), epsilon = 1e-12);
    }

    #[test]
    fn full_cd_reproduces_combined_nonlocal_probability() {
        let hist = exact_for(3, 0.9, CircuitMode::FullCd);
        let nonlocal = hist.probability("110")
            + hist.probability("101")
            + hist.probability("011")
            + hist.probability("111");
        assert_abs_diff_eq!(nonlocal, 0.107, epsilon = 1e-3); // three-digit anchor
    }

    #[test]
    fn circuit_distributions_match_analytic_frames() {
        use crate::hardy::mixed_amplitudes;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for n in 2..=12 {
            for _ in 0..20 {
                let a_values: Vec<f64> = (0..n).map(|_| 0.05 + 0.9 * rng.random::<f64>()).collect();
                let coeffs = TransformCoefficients::from_a_values(&a_values).unwrap();
                let thetas = thetas_of(&coeffs).unwrap();

                let hist =
                    run_exact(&build_circuit(n, &thetas, CircuitMode::Prepare).unwrap()).unwrap();
                let analytic = uv_amplitudes(&coeffs).unwrap();
                assert_max_deviation(&hist, &analytic.probabilities(), 1e-10);

                let k = 1 + rng.random_range(0..n);
                let hist =
                    run_exact(&build_circuit(n, &thetas, CircuitMode::Mixed(k)).unwrap()).unwrap();
                let analytic = mixed_amplitudes(&coeffs, k).unwrap();
                assert_max_deviation(&hist, &analytic.probabilities(), 1e-10);

                let hist =
                    run_exact(&build_circuit(n, &thetas, CircuitMode::FullCd).unwrap()).unwrap();
                let analytic = cd_amplitudes(&coeffs).unwrap();
                assert_max_deviation(&hist, &analytic.probabilities(), 1e-10);
            }
        }
    }

    fn assert_max_deviation(hist: &ExactHistogram, expected: &[f64], tol: f64) {
        for (index, &p) in expected.iter().enumerate() {
            let key = crate::linalg::bitstring_of_index(index, hist.num_sites);
            assert!(
                (hist.probability(&key) - p).abs() <= tol,
                "outcome {key}: circuit {} vs analytic {p}",
                hist.probability(&key)
            );
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let hist = exact_for(3, 0.9, CircuitMode::FullCd);
        let s1 = sample_shots(&hist, 20000, 42).unwrap();
        let s2 = sample_shots(&hist, 20000, 42).unwrap();
        assert_eq!(s1.counts, s2.counts);
        assert_eq!(s1.counts.values().sum::<u64>(), 20000);
        let s3 = sample_shots(&hist, 20000, 43).unwrap();
        assert_ne!(s1.counts, s3.counts);
    }

    #[test]
    fn sampling_degenerate_distribution() {
        let mut probabilities = BTreeMap::new();
        probabilities.insert("00".to_string(), 0.0);
        probabilities.insert("01".to_string(), 1.0);
        probabilities.insert("10".to_string(), 0.0);
        probabilities.insert("11".to_string(), 0.0);
        let hist = ExactHistogram {
            num_sites: 2,
            probabilities,
            postselect_success: 1.0,
        };
        let s = sample_shots(&hist, 100, 7).unwrap();
        assert_eq!(s.count("01"), 100);
        assert!(sample_shots(&hist, 0, 7).is_err());
    }

    #[test]
    fn two_million_shots_hit_nonlocal_sum_within_3_sigma() {
        let hist = exact_for(3, 0.9, CircuitMode::FullCd);
        let shots = 2_000_000u64;
        let s = sample_shots(&hist, shots, 42).unwrap();
        let estimate = ["110", "101", "011", "111"]
            .iter()
            .map(|o| s.frequency(o))
            .sum::<f64>();
        let p = 0.10727518340699888;
        let sigma = (p * (1.0 - p) / shots as f64).sqrt();
        assert!(
            (estimate - p).abs() <= 3.0 * sigma,
            "estimate {estimate} vs {p} (3σ = {})",
            3.0 * sigma
        );
    }

    #[test]
    fn sampled_frequencies_converge_within_five_sigma() {
        // million-shot draws across a 100-seed suite stay within 5σ of the
        // exact distribution on every outcome
        let hist = exact_for(3, 0.9, CircuitMode::FullCd);
        let shots = 1_000_000u64;
        for seed in 0..100u64 {
            let run = sample_shots(&hist, shots, seed).unwrap();
            for (outcome, &p) in &hist.probabilities {
                let sigma = (p * (1.0 - p) / shots as f64).sqrt();
                let deviation = (run.frequency(outcome) - p).abs();
                assert!(
                    deviation <= 5.0 * sigma,
                    "seed {seed}, outcome {outcome}: deviation {deviation:.2e} > 5σ"
                );
            }
        }
    }

    #[test]
    fn execution_streams_differ_but_reproduce() {
        let hist = exact_for(3, 0.9, CircuitMode::FullCd);
        let runs = sample_executions(&hist, 1000, 42, 3).unwrap();
        assert_eq!(runs.len(), 3);
        assert_ne!(runs[0].counts, runs[1].counts);
        let again = sample_executions(&hist, 1000, 42, 3).unwrap();
        for (a, b) in runs.iter().zip(&again) {
            assert_eq!(a.counts, b.counts);
        }
    }
}
