//! The paradox certifier: checks the three nonlocal condition sets against
//! analytic and circuit-produced distributions and reports violation
//! margins.
//!
//! The three sets are
//!
//! 1. the all-u outcome never occurs: P(𝒰_Ω) = 0;
//! 2. a D_k result forces u everywhere else: P(𝒰_κ̄ | D_k) = 1 for every k;
//! 3. outcomes with two or more D results still occur: P(𝒟_β) > 0 for
//!    every β with |β| ≥ 2.
//!
//! Under a local hidden variable assignment, 1 and 2 force every pairwise
//! probability P(D_k D_l) to vanish; set 3 exhibits them strictly positive,
//! so each margin P(D_k D_l) − P(𝒰_Ω) > 0 quantifies the contradiction.

use serde::{Deserialize, Serialize};

use crate::analytics::p_nonlocal_general;
use crate::circuit::{build_circuit, run_exact, thetas_of, CircuitMode, ExactHistogram};
use crate::error::{Error, Result};
use crate::hardy::{
    cd_amplitudes, mixed_amplitudes, uv_amplitudes, Frame, HardyState, TransformCoefficients,
};
use crate::sites::SiteSet;

/// Default tolerance for analytic-path checks.
pub const ANALYTIC_TOL: f64 = 1e-10;
/// Default tolerance for circuit-path checks (accumulated gate rounding).
pub const CIRCUIT_TOL: f64 = 1e-9;

/// Outcome of the first condition: the all-u probability and its bound.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Condition1Record {
    pub p_all_u: f64,
    pub pass: bool,
}

/// Outcome of one second-set condition at site k.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Condition2Record {
    pub site: usize,
    /// P(D_k), measured from the mixed-frame distribution.
    pub p_d: f64,
    /// N²|B_k|²|𝒜_Ω|², the closed-form value P(D_k) must match.
    pub p_d_expected: f64,
    /// P(all-u elsewhere | D_k).
    pub conditional: f64,
    pub pass: bool,
}

/// One nonlocal outcome record: d on `d_sites`, c elsewhere.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Condition3Record {
    pub d_sites: Vec<usize>,
    pub probability: f64,
}

/// P(D_k D_l) for one site pair; positive while P(𝒰_Ω) = 0.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LhvMargin {
    pub site_k: usize,
    pub site_l: usize,
    pub margin: f64,
}

/// Full certificate for one coefficient choice.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParadoxReport {
    pub n: usize,
    /// |A_k| per site.
    pub a_magnitudes: Vec<f64>,
    pub condition1: Condition1Record,
    pub condition2: Vec<Condition2Record>,
    pub condition3: Vec<Condition3Record>,
    /// Σ of the condition-3 records; the combined nonlocal probability.
    pub condition3_total: f64,
    pub lhv_margins: Vec<LhvMargin>,
    pub tolerance: f64,
}

impl ParadoxReport {
    /// True when every condition holds: the paradox is certified.
    pub fn pass(&self) -> bool {
        self.condition1.pass
            && self.condition2.iter().all(|r| r.pass)
            && self.condition3_total > 0.0
            && self.lhv_margins.iter().all(|m| m.margin > 0.0)
    }
}

/// First condition on an analytic u/v-frame state: P(all-u) ≤ tol.
pub fn check_condition1(state: &HardyState, tol: f64) -> Result<Condition1Record> {
    if state.frame() != Frame::Uv {
        return Err(Error::WrongFrame {
            expected: "u/v",
            actual: state.frame().to_string(),
        });
    }
    let n = state.num_sites();
    let p_all_u = state.vector().amplitude((1 << n) - 1).norm_sqr();
    Ok(Condition1Record {
        p_all_u,
        pass: p_all_u <= tol,
    })
}

/// First condition on a measured distribution (e.g. a circuit run in the
/// preparation mode): P(all-u outcome) ≤ tol.
pub fn check_condition1_histogram(hist: &ExactHistogram, tol: f64) -> Condition1Record {
    let all_u = "1".repeat(hist.num_sites);
    let p_all_u = hist.probability(&all_u);
    Condition1Record {
        p_all_u,
        pass: p_all_u <= tol,
    }
}

/// Second condition at site k, from the analytic mixed-frame expansion.
pub fn check_condition2(
    coeffs: &TransformCoefficients,
    k: usize,
    tol: f64,
) -> Result<Condition2Record> {
    let state = mixed_amplitudes(coeffs, k)?;
    let n = coeffs.num_sites();
    let n2 = state.normalization().powi(2);
    let expected = n2 * coeffs.b(k).norm_sqr() * coeffs.a_omega().norm_sqr();
    let record = condition2_from_probabilities(&state.probabilities(), n, k, expected, tol);
    Ok(record)
}

/// Second condition evaluated on a measured mixed-frame distribution.
pub fn check_condition2_histogram(
    hist: &ExactHistogram,
    k: usize,
    p_d_expected: f64,
    tol: f64,
) -> Result<Condition2Record> {
    let n = hist.num_sites;
    if k == 0 || k > n {
        return Err(Error::SiteOutOfRange {
            site: k,
            num_sites: n,
        });
    }
    let mut probs = vec![0.0; 1 << n];
    for (outcome, &p) in &hist.probabilities {
        probs[crate::linalg::index_of_bitstring(outcome, n)?] = p;
    }
    Ok(condition2_from_probabilities(
        &probs,
        n,
        k,
        p_d_expected,
        tol,
    ))
}

fn condition2_from_probabilities(
    probs: &[f64],
    n: usize,
    k: usize,
    p_d_expected: f64,
    tol: f64,
) -> Condition2Record {
    let k_bit = 1usize << (n - k);
    let all_u_elsewhere = SiteSet::singleton(k).complement(n).basis_index(n) | k_bit;
    let p_d: f64 = (0..probs.len())
        .filter(|i| i & k_bit != 0)
        .map(|i| probs[i])
        .sum();
    let conditional = if p_d > 0.0 {
        probs[all_u_elsewhere] / p_d
    } else {
        0.0
    };
    let pass = conditional >= 1.0 - tol && (p_d - p_d_expected).abs() <= tol;
    Condition2Record {
        site: k,
        p_d,
        p_d_expected,
        conditional,
        pass,
    }
}

/// Third condition: enumerates every β with |β| ≥ 2, asserting positive
/// probability, the 2ⁿ − n − 1 count and agreement of the total with the
/// closed form; also returns the pairwise LHV margins P(D_k D_l).
pub fn check_condition3(
    coeffs: &TransformCoefficients,
) -> Result<(Vec<Condition3Record>, Vec<LhvMargin>, f64)> {
    let state = cd_amplitudes(coeffs)?;
    let n = coeffs.num_sites();
    let v = state.vector();

    let mut records = Vec::new();
    let mut total = 0.0;
    for index in 0..v.dimension() {
        if index.count_ones() >= 2 {
            let probability = v.amplitude(index).norm_sqr();
            total += probability;
            records.push(Condition3Record {
                d_sites: SiteSet::from_basis_index(index, n).sites().collect(),
                probability,
            });
        }
    }

    let mut margins = Vec::new();
    for k in 1..=n {
        for l in (k + 1)..=n {
            let k_bit = 1usize << (n - k);
            let l_bit = 1usize << (n - l);
            let p_kl: f64 = (0..v.dimension())
                .filter(|i| i & k_bit != 0 && i & l_bit != 0)
                .map(|i| v.amplitude(i).norm_sqr())
                .sum();
            margins.push(LhvMargin {
                site_k: k,
                site_l: l,
                margin: p_kl,
            });
        }
    }

    Ok((records, margins, total))
}

/// Assembles the full paradox certificate for one coefficient choice.
pub fn certify(coeffs: &TransformCoefficients, tol: f64) -> Result<ParadoxReport> {
    let n = coeffs.num_sites();
    let uv = uv_amplitudes(coeffs)?;
    let condition1 = check_condition1(&uv, tol)?;
    let condition2: Vec<Condition2Record> = (1..=n)
        .map(|k| check_condition2(coeffs, k, tol))
        .collect::<Result<_>>()?;
    let (condition3, lhv_margins, condition3_total) = check_condition3(coeffs)?;

    // internal consistency: the record total is the closed-form value
    let closed_form = p_nonlocal_general(coeffs)?;
    if (condition3_total - closed_form).abs() > 1e-10 {
        return Err(Error::ParameterOutOfRange {
            name: "condition3_total",
            value: condition3_total - closed_form,
            range: "|Σ records − closed form| ≤ 1e-10",
        });
    }

    Ok(ParadoxReport {
        n,
        a_magnitudes: coeffs.a_magnitudes(),
        condition1,
        condition2,
        condition3,
        condition3_total,
        lhv_margins,
        tolerance: tol,
    })
}

/// Result of comparing all three circuit modes against the analytic frames.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossValidation {
    pub n: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Runs the three circuits and compares each outcome probability against
/// the matching analytic frame, reporting the worst deviation.
pub fn cross_validate(coeffs: &TransformCoefficients, tol: f64) -> Result<CrossValidation> {
    let n = coeffs.num_sites();
    let thetas = thetas_of(coeffs)?;

    let mut max_deviation = 0.0f64;
    let mut compare = |hist: &ExactHistogram, analytic: &[f64]| {
        for (index, &p) in analytic.iter().enumerate() {
            let key = crate::linalg::bitstring_of_index(index, n);
            max_deviation = max_deviation.max((hist.probability(&key) - p).abs());
        }
    };

    let hist = run_exact(&build_circuit(n, &thetas, CircuitMode::Prepare)?)?;
    compare(&hist, &uv_amplitudes(coeffs)?.probabilities());
    for k in 1..=n {
        let hist = run_exact(&build_circuit(n, &thetas, CircuitMode::Mixed(k))?)?;
        compare(&hist, &mixed_amplitudes(coeffs, k)?.probabilities());
    }
    let hist = run_exact(&build_circuit(n, &thetas, CircuitMode::FullCd)?)?;
    compare(&hist, &cd_amplitudes(coeffs)?.probabilities());

    Ok(CrossValidation {
        n,
        max_deviation,
        tolerance: tol,
        pass: max_deviation <= tol,
    })
}
