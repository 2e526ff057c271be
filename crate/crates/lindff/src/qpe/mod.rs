//! Phase estimation through three routes.
//!
//! - Standard: `d` ancillas, controlled `e^{−i2πH2^j}`, inverse QFT.
//! - Slow: `N` dilated Lindblad steps of length `t/N`, each leaving its ancilla
//!   in `|1⟩` with probability `sin²(√(t/N) h)`; the count `m` is binomial.
//! - Fast: the same register prepared through the fast-forwarding construction
//!   and read out in the Dicke count basis through the Kravchuk transform.
//!
//! Distributions are computed per eigencomponent and never from a joint
//! register state. Estimates are reported in the units of the input matrix
//! through the Hamiltonian's spectrum map.

pub mod amplitude;
pub mod kravchuk;

pub use amplitude::{amplitude_decision_demo, AeDecision, AeDemo, AeSettings};
pub use kravchuk::{kravchuk_row, kravchuk_unitary, kravchuk_unitary_with_cap, KRAVCHUK_CAP};

use crate::concentration::binomial_pmf;
use crate::fastforward::{ff_evolve_pure, FfPlan};
use crate::model::{Hamiltonian, SpectralState};
use crate::numkernel::{c, CMatrix, CVector, StateVector, C64};
use crate::stateprep::binomial_amplitudes;
use crate::{CostReport, Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// Largest register size of the standard route.
pub const STANDARD_MAX_BITS: u32 = 24;

/// Largest `N` of the slow route.
pub const SLOW_MAX_STEPS: u64 = 10_000_000;

/// How the measured outcome is produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Keep the full distribution and report its most likely outcome.
    Exact,
    /// Draw one outcome with a generator seeded from the value.
    Sample(u64),
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimationResult {
    /// `ĥ` in the units of the input matrix.
    pub estimate: f64,
    /// Measured `y` or `m` (the mode of the distribution in exact mode).
    pub outcome: u64,
    /// Outcome probabilities, present in exact mode.
    pub distribution: Option<Vec<f64>>,
    /// `m = N` was observed, so the arcsin estimator sits on its branch edge.
    pub saturated: bool,
    pub cost: CostReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct PreparationResult {
    /// Post-selection probability of the zero outcome.
    pub p0: f64,
    /// `|⟨ψ_β|φ_0⟩|²` summed over the target eigenspace.
    pub overlap: f64,
    #[serde(skip)]
    pub state: StateVector,
    /// `1/p0`.
    pub expected_repeats: f64,
    /// `1/|c_β|`, the query count ideal amplification would need.
    pub amplification_queries: f64,
    /// The analytic lower bound on `overlap` for this route.
    pub overlap_bound: f64,
    /// `overlap` meets `overlap_bound` within the route's stated slack, and
    /// for the fast route `√p0 ≥ |c_β| − √ε′` also holds.
    pub bound_holds: bool,
    pub cost: CostReport,
}

fn finish(dist: Vec<f64>, mode: Mode, estimator: impl Fn(u64) -> (f64, bool), cost: CostReport) -> EstimationResult {
    let (outcome, keep) = match mode {
        Mode::Exact => (argmax(&dist), true),
        Mode::Sample(seed) => (sample_index(&dist, &mut ChaCha8Rng::seed_from_u64(seed)), false),
    };
    let (estimate, saturated) = estimator(outcome);
    EstimationResult { estimate, outcome, distribution: keep.then_some(dist), saturated, cost }
}

fn argmax(p: &[f64]) -> u64 {
    p.iter().enumerate().fold((0, f64::NEG_INFINITY), |best, (i, &x)| if x > best.1 { (i, x) } else { best }).0 as u64
}

/// Inverse-CDF draw from a distribution that sums to one up to rounding.
pub fn sample_index(p: &[f64], rng: &mut impl Rng) -> u64 {
    let total: f64 = p.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, x) in p.iter().enumerate() {
        acc += x;
        if u < acc {
            return i as u64;
        }
    }
    p.iter().rposition(|&x| x > 0.0).unwrap_or(0) as u64
}

/// `sqrt(Σ_k p_k (est(k) − truth)²)`.
pub fn rms_error(p: &[f64], estimator: impl Fn(u64) -> f64, truth: f64) -> f64 {
    p.iter().enumerate().map(|(k, w)| w * (estimator(k as u64) - truth).powi(2)).sum::<f64>().sqrt()
}

fn check_state(h: &Hamiltonian, psi: &SpectralState) -> Result<()> {
    if psi.amplitudes().len() != h.eigenvalues().len() || psi.vector().len() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: psi.vector().len() });
    }
    Ok(())
}

fn check_target(h: &Hamiltonian, psi: &SpectralState, beta: usize) -> Result<()> {
    check_state(h, psi)?;
    let hb = *h
        .eigenvalues()
        .get(beta)
        .ok_or_else(|| Error::InvalidParameter(format!("eigenspace {beta} out of range")))?;
    if hb.abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "target eigenvalue is {hb}, not 0; shift the spectrum with model::shift_to_zero first"
        )));
    }
    if psi.amplitudes()[beta] == 0.0 {
        return Err(Error::InvalidParameter("input has no weight on the target eigenspace".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------- standard

/// `(1/M) Σ_{k<M} e^{−2πikδ}` for `M = 2^d`.
fn standard_amplitude(delta: f64, d: u32) -> C64 {
    let m = (1u64 << d) as f64;
    let r = delta - delta.round();
    if r == 0.0 {
        return c(1.0);
    }
    let mag = (PI * r * m).sin() / (m * (PI * r).sin());
    C64::from_polar(mag, -PI * r * (m - 1.0))
}

/// `y / 2^d`.
pub fn standard_estimator(y: u64, d: u32) -> f64 {
    y as f64 / (1u64 << d) as f64
}

pub fn standard_qpe(h: &Hamiltonian, psi: &SpectralState, d: u32, mode: Mode) -> Result<EstimationResult> {
    check_state(h, psi)?;
    if d == 0 || d > STANDARD_MAX_BITS {
        return Err(Error::InvalidParameter(format!("d = {d} outside [1, {STANDARD_MAX_BITS}]")));
    }
    let m = 1u64 << d;
    let w = psi.weights();
    let dist: Vec<f64> = (0..m)
        .map(|y| {
            let phase = standard_estimator(y, d);
            h.eigenvalues()
                .iter()
                .zip(&w)
                .map(|(ha, wa)| wa * standard_amplitude(ha - phase, d).norm_sqr())
                .sum()
        })
        .collect();
    let cost = CostReport { hamiltonian_time: (m - 1) as f64, step_count: None, ancilla_count: d as u64 };
    let map = h.spectrum_map();
    Ok(finish(dist, mode, |y| (map.to_original(standard_estimator(y, d)), false), cost))
}

/// Distance on the unit circle, `min_k |x − k|`.
fn circular(x: f64) -> f64 {
    (x - x.round()).abs()
}

pub fn standard_qpe_eigenstate(h: &Hamiltonian, psi: &SpectralState, beta: usize, d: u32) -> Result<PreparationResult> {
    check_target(h, psi, beta)?;
    if d == 0 || d > STANDARD_MAX_BITS {
        return Err(Error::InvalidParameter(format!("d = {d} outside [1, {STANDARD_MAX_BITS}]")));
    }
    let coeffs: Vec<C64> = h.eigenvalues().iter().map(|&ha| standard_amplitude(ha, d)).collect();
    let prep = post_select(psi, &coeffs, beta)?;
    let wb = psi.weights()[beta];
    let gap = h
        .eigenvalues()
        .iter()
        .enumerate()
        .filter(|(a, _)| *a != beta)
        .map(|(_, x)| circular(*x))
        .fold(f64::INFINITY, f64::min);
    let bound = if gap.is_finite() && gap > 0.0 {
        let mg = (1u64 << d) as f64 * gap;
        wb / (wb + (1.0 - wb) / (4.0 * mg * mg))
    } else {
        wb
    };
    let cost = CostReport { hamiltonian_time: ((1u64 << d) - 1) as f64, step_count: None, ancilla_count: d as u64 };
    Ok(prep.into_result(wb, bound, bound - 1e-12, true, cost))
}

struct PostSelected {
    p0: f64,
    overlap: f64,
    state: StateVector,
}

impl PostSelected {
    fn into_result(self, wb: f64, bound: f64, threshold: f64, extra: bool, cost: CostReport) -> PreparationResult {
        PreparationResult {
            p0: self.p0,
            overlap: self.overlap,
            state: self.state,
            expected_repeats: 1.0 / self.p0,
            amplification_queries: 1.0 / wb.sqrt(),
            overlap_bound: bound,
            bound_holds: extra && self.overlap >= threshold,
            cost,
        }
    }
}

/// Applies a per-eigenspace factor to the components and renormalizes.
fn post_select(psi: &SpectralState, coeffs: &[C64], beta: usize) -> Result<PostSelected> {
    let mut v = CVector::zeros(psi.vector().len());
    let mut p0 = 0.0;
    let mut target = 0.0;
    for ((a, comp), k) in psi.amplitudes().iter().zip(psi.components()).zip(coeffs) {
        v += comp * (*k * *a);
        p0 += a * a * k.norm_sqr();
    }
    if let Some((a, k)) = psi.amplitudes().get(beta).zip(coeffs.get(beta)) {
        target = a * a * k.norm_sqr();
    }
    if p0 <= 0.0 {
        return Err(Error::NumericalGuard("zero post-selection probability".into()));
    }
    let state = StateVector::normalized(v)?;
    Ok(PostSelected { p0, overlap: (target / p0).min(1.0), state })
}

// ---------------------------------------------------------------- slow

/// `√(N/t) arcsin √(m/N)` with `m/N` clamped into `[0, 1]`, and whether the
/// estimate sits on the branch edge `m = N`.
pub fn slow_estimator(m: u64, n: u64, t: f64) -> (f64, bool) {
    let r = (m as f64 / n as f64).clamp(0.0, 1.0);
    ((n as f64 / t).sqrt() * r.sqrt().asin(), m >= n)
}

/// `sin²(√(t/N) h)`.
pub fn slow_q(h: f64, t: f64, n: u64) -> f64 {
    ((t / n as f64).sqrt() * h).sin().powi(2)
}

fn check_slow(t: f64, n: u64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    if n == 0 || n > SLOW_MAX_STEPS {
        return Err(Error::InvalidParameter(format!("N = {n} outside [1, {SLOW_MAX_STEPS}]")));
    }
    Ok(())
}

/// `Σ_α |c_α|² Binomial(N, q_α)` evaluated at every `m`.
pub fn slow_distribution(h: &Hamiltonian, psi: &SpectralState, t: f64, n: u64) -> Result<Vec<f64>> {
    check_state(h, psi)?;
    check_slow(t, n)?;
    let qs: Vec<(f64, f64)> = h
        .eigenvalues()
        .iter()
        .zip(psi.weights())
        .filter(|(_, w)| *w > 0.0)
        .map(|(ha, w)| (slow_q(*ha, t, n), w))
        .collect();
    Ok((0..=n).map(|m| qs.iter().map(|(q, w)| w * binomial_pmf(n, m, *q)).sum()).collect())
}

fn slow_cost(t: f64, n: u64) -> CostReport {
    CostReport { hamiltonian_time: (n as f64 * t).sqrt(), step_count: Some(n), ancilla_count: n }
}

pub fn slow_qpe(h: &Hamiltonian, psi: &SpectralState, t: f64, n: u64, mode: Mode) -> Result<EstimationResult> {
    let dist = slow_distribution(h, psi, t, n)?;
    let map = h.spectrum_map();
    Ok(finish(
        dist,
        mode,
        |m| {
            let (e, s) = slow_estimator(m, n, t);
            (map.to_original(e), s)
        },
        slow_cost(t, n),
    ))
}

/// `|c_β|² / (|c_β|² + (1 − |c_β|²) e^{−tΔ²})` with the linear gap `Δ`.
pub fn slow_overlap_bound(h: &Hamiltonian, psi: &SpectralState, beta: usize, t: f64) -> f64 {
    let wb = psi.weights()[beta];
    let gap = h
        .eigenvalues()
        .iter()
        .enumerate()
        .filter(|(a, _)| *a != beta)
        .map(|(_, x)| x.abs())
        .fold(f64::INFINITY, f64::min);
    if !gap.is_finite() {
        return 1.0;
    }
    wb / (wb + (1.0 - wb) * (-t * gap * gap).exp())
}

pub fn slow_qpe_eigenstate(h: &Hamiltonian, psi: &SpectralState, beta: usize, t: f64, n: u64) -> Result<PreparationResult> {
    check_target(h, psi, beta)?;
    check_slow(t, n)?;
    let st = (t / n as f64).sqrt();
    let coeffs: Vec<C64> = h.eigenvalues().iter().map(|&ha| c((st * ha).cos().powi(n as i32))).collect();
    let prep = post_select(psi, &coeffs, beta)?;
    let wb = psi.weights()[beta];
    let bound = slow_overlap_bound(h, psi, beta, t);
    Ok(prep.into_result(wb, bound, bound - 1.0 / n as f64, true, slow_cost(t, n)))
}

// ---------------------------------------------------------------- fast

/// Dicke-basis amplitudes of the fast-forwarded register, `(N+1) × dim`,
/// with the run's cost.
fn fast_amplitudes(h: &Hamiltonian, psi: &SpectralState, plan: &FfPlan) -> Result<(CMatrix, CostReport)> {
    check_state(h, psi)?;
    kravchuk::check_kravchuk_cap(plan.n)?;
    let run = ff_evolve_pure(h, &StateVector::normalized(psi.vector().clone())?, plan)?;
    let states = run.ledger.states();
    let r_count = states.len();
    let dim = h.dim();
    let mut chi = CMatrix::zeros(r_count, dim);
    for (r, v) in states.iter().enumerate() {
        chi.set_row(r, &v.transpose());
    }
    let a = binomial_amplitudes(plan.n);
    let residues: Vec<usize> = (0..=plan.n).map(|m| plan.residue(m)).collect();
    let size = plan.n as usize + 1;
    let mut b = CMatrix::zeros(size, r_count);
    for m in 0..=plan.n {
        let row = kravchuk_row(plan.n, m);
        for (k, u) in row.iter().enumerate() {
            b[(m as usize, residues[k])] += c(u * a[k]);
        }
    }
    Ok((b * chi, run.cost))
}

pub fn fast_qpe(h: &Hamiltonian, psi: &SpectralState, plan: &FfPlan, mode: Mode) -> Result<EstimationResult> {
    let (amps, cost) = fast_amplitudes(h, psi, plan)?;
    let dist: Vec<f64> = amps.row_iter().map(|r| r.norm_squared()).collect();
    let map = h.spectrum_map();
    let (n, t) = (plan.n, plan.t);
    Ok(finish(
        dist,
        mode,
        |m| {
            let (e, s) = slow_estimator(m, n, t);
            (map.to_original(e), s)
        },
        cost,
    ))
}

pub fn fast_qpe_eigenstate(h: &Hamiltonian, psi: &SpectralState, beta: usize, plan: &FfPlan) -> Result<PreparationResult> {
    check_target(h, psi, beta)?;
    let (amps, cost) = fast_amplitudes(h, psi, plan)?;
    let v0: CVector = amps.row(0).transpose();
    let p0 = v0.norm_squared();
    if p0 <= 0.0 {
        return Err(Error::NumericalGuard("zero post-selection probability".into()));
    }
    let proj = &h.projectors()[beta];
    let overlap = ((proj * &v0).norm_squared() / p0).min(1.0);
    let state = StateVector::normalized(v0)?;

    let wb = psi.weights()[beta];
    let cb = wb.sqrt();
    let root_eps = plan.window_bound().sqrt();
    let zeta = root_eps / cb;
    let slow = slow_qpe_eigenstate(h, psi, beta, plan.t, plan.n)?;
    let chain = ((slow.overlap.sqrt() - zeta) / (1.0 + zeta)).max(0.0);
    let bound = chain * chain;
    let amplitude_ok = p0.sqrt() >= cb - root_eps - 1e-12;
    Ok(PostSelected { p0, overlap, state }.into_result(wb, bound, bound - 1e-12, amplitude_ok, cost))
}
