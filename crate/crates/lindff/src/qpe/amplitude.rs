//! Deciding `W = 0` versus `W ≥ 1` for an oracle `f: {0,1}^n → {0,1}` with
//! `W` marked inputs, by phase estimation on a Grover-type walk.
//!
//! `|Φ⟩ = 2^{−n/2} Σ_x |x⟩|f(x)⟩` and `Q = (2|Φ⟩⟨Φ| − I)(I ⊗ Z)`. On the span
//! of the marked and unmarked parts `Q` rotates by `2θ` with
//! `sin θ = A = 2^{−n/2}√W`, so `|Φ⟩` has eigenphases `±2θ`, and for `W = 0`
//! it is a `+1` eigenvector. The sign of the reflection is chosen so that
//! `W = 0` gives phase 0 rather than π, which the Lindbladian route (whose
//! estimator returns `|h|`) can distinguish from small nonzero phases.
//!
//! The jump is `H_ae` with `e^{−iH_ae} = Q`, from the principal logarithm
//! (phase π taken as +π), scaled by `1/π` to meet `‖H‖ ≤ 1`.

use super::{fast_qpe, sample_index, slow_estimator, Mode};
use crate::fastforward::FfPlan;
use crate::model::{decompose_state, Hamiltonian, SpectrumMap};
use crate::numkernel::{c, unitary_eig, CMatrix, CVector, StateVector};
use crate::{CostReport, Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// Largest oracle register.
pub const AE_MAX_BITS: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AeSettings {
    pub t: f64,
    pub n_steps: u64,
    pub eps: f64,
}

impl Default for AeSettings {
    fn default() -> Self {
        AeSettings { t: 256.0, n_steps: 4096, eps: 1e-4 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AeDecision {
    /// Decided `W = 0`.
    pub zero: bool,
    /// Estimated `|phase|` in radians.
    pub estimate: f64,
    pub outcome: u64,
    /// Probability that a fresh run reaches the same decision.
    pub confidence: f64,
}

/// Oracle, walk and exact outcome distribution, computed once.
#[derive(Clone, Debug)]
pub struct AeDemo {
    pub n_bits: u32,
    pub marked: usize,
    /// `2^{−n/2} √W`.
    pub amplitude: f64,
    /// `arcsin 2^{−n/2}`, half the smallest nonzero-`W` phase.
    pub threshold: f64,
    pub cost: CostReport,
    plan: FfPlan,
    distribution: Vec<f64>,
    zero_mass: f64,
}

/// `Q` and `|Φ⟩`, with the oracle ancilla as the low-order factor.
pub fn walk_operator(oracle: &[bool]) -> Result<(CMatrix, CVector)> {
    let size = oracle.len();
    if size < 2 || !size.is_power_of_two() || size.trailing_zeros() > AE_MAX_BITS {
        return Err(Error::InvalidParameter(format!(
            "oracle length {size} must be 2^n with 1 ≤ n ≤ {AE_MAX_BITS}"
        )));
    }
    let dim = 2 * size;
    let amp = 1.0 / (size as f64).sqrt();
    let mut phi = CVector::zeros(dim);
    for (x, &f) in oracle.iter().enumerate() {
        phi[2 * x + f as usize] = c(amp);
    }
    let refl = &phi * phi.adjoint() * c(2.0) - CMatrix::identity(dim, dim);
    let z = CMatrix::from_diagonal(&CVector::from_fn(dim, |i, _| c(if i % 2 == 0 { 1.0 } else { -1.0 })));
    Ok((refl * z, phi))
}

impl AeDemo {
    pub fn prepare(oracle: &[bool], settings: &AeSettings) -> Result<Self> {
        let (q, phi) = walk_operator(oracle)?;
        let (phases, vecs) = unitary_eig(&q)?;
        let dim = q.nrows();
        let mut h = CMatrix::zeros(dim, dim);
        for (k, p) in phases.iter().enumerate() {
            let v = vecs.column(k);
            h -= &v * v.adjoint() * c(p / PI);
        }
        let ham = Hamiltonian::with_map(&h, SpectrumMap { scale: PI, shift: 0.0 })?;
        let state = decompose_state(&ham, &StateVector::normalized(phi)?)?;
        let plan = FfPlan::with_steps(settings.t, settings.eps, settings.n_steps)?;
        let run = fast_qpe(&ham, &state, &plan, Mode::Exact)?;
        let distribution = run.distribution.expect("exact mode keeps the distribution");

        let n_bits = oracle.len().trailing_zeros();
        let marked = oracle.iter().filter(|&&f| f).count();
        let threshold = (2f64.powf(-(n_bits as f64) / 2.0)).asin();
        let mut demo = AeDemo {
            n_bits,
            marked,
            amplitude: (marked as f64 / oracle.len() as f64).sqrt(),
            threshold,
            cost: run.cost,
            plan,
            distribution,
            zero_mass: 0.0,
        };
        demo.zero_mass = (0..demo.distribution.len())
            .filter(|&m| demo.phase_of(m as u64) < threshold)
            .map(|m| demo.distribution[m])
            .sum();
        Ok(demo)
    }

    fn phase_of(&self, m: u64) -> f64 {
        PI * slow_estimator(m, self.plan.n, self.plan.t).0
    }

    pub fn distribution(&self) -> &[f64] {
        &self.distribution
    }

    /// Most likely outcome in exact mode, a seeded draw otherwise.
    pub fn decide(&self, mode: Mode) -> AeDecision {
        let outcome = match mode {
            Mode::Exact => super::argmax(&self.distribution),
            Mode::Sample(seed) => sample_index(&self.distribution, &mut ChaCha8Rng::seed_from_u64(seed)),
        };
        let estimate = self.phase_of(outcome);
        let zero = estimate < self.threshold;
        AeDecision { zero, estimate, outcome, confidence: if zero { self.zero_mass } else { 1.0 - self.zero_mass } }
    }
}

pub fn amplitude_decision_demo(oracle: &[bool], settings: &AeSettings, mode: Mode) -> Result<AeDecision> {
    Ok(AeDemo::prepare(oracle, settings)?.decide(mode))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle(n: u32, w: usize) -> Vec<bool> {
        (0..1usize << n).map(|x| x < w).collect()
    }

    #[test]
    fn amplitude_worked_value() {
        let demo = AeDemo::prepare(&oracle(3, 2), &AeSettings::default()).unwrap();
        assert!((demo.amplitude - 0.5).abs() < 1e-15);
    }

    #[test]
    fn walk_phases_are_twice_the_amplitude_angle() {
        for w in 0..=3 {
            let (q, phi) = walk_operator(&oracle(3, w)).unwrap();
            let (phases, vecs) = unitary_eig(&q).unwrap();
            let theta = (w as f64 / 8.0).sqrt().asin();
            for (k, p) in phases.iter().enumerate() {
                let weight = (vecs.column(k).adjoint() * &phi)[(0, 0)].norm_sqr();
                if weight > 1e-9 {
                    assert!((p.abs() - 2.0 * theta).abs() < 1e-9, "W = {w}: phase {p}");
                }
            }
        }
    }

    #[test]
    fn zero_marked_is_certain_in_exact_mode() {
        let d = amplitude_decision_demo(&oracle(4, 0), &AeSettings::default(), Mode::Exact).unwrap();
        assert!(d.zero);
        assert!(d.confidence > 1.0 - 1e-6);
    }

    #[test]
    fn seeded_decisions_are_mostly_right() {
        for w in [0usize, 1, 4] {
            let demo = AeDemo::prepare(&oracle(4, w), &AeSettings::default()).unwrap();
            let right = (0..100u64).filter(|&s| demo.decide(Mode::Sample(s)).zero == (w == 0)).count();
            assert!(right >= 95, "W = {w}: {right}/100");
        }
    }

    #[test]
    fn rejects_bad_oracles() {
        assert!(walk_operator(&[true, false, true]).is_err());
        assert!(walk_operator(&vec![false; 256]).is_err());
    }
}
