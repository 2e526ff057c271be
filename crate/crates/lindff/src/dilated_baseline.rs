//! Step-by-step simulation through the dilated jump Hamiltonian.
//!
//! One step couples a fresh ancilla in `|0⟩` through `e^{−iF̃√τ}` with
//! `F̃ = [[0, F†], [F, 0]]` and traces it out. This is first order in `τ`,
//! so reaching error ε at time t needs `⌈t³/ε²⌉` steps and Hamiltonian time
//! `√(steps · t)`.

use crate::model::dilate;
use crate::numkernel::{herm_eig, kron, partial_trace, CMatrix, DensityMatrix, C64};
use crate::{CostReport, Error, Result};

/// Step counts above this need an explicit override.
pub const STEP_LIMIT: u64 = 10_000_000;

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter(format!("step length must be non-negative, got {tau}")));
    }
    Ok(())
}

/// `Tr_a(e^{−iF̃√τ}(|0⟩⟨0| ⊗ ρ)e^{iF̃√τ})`, built literally.
pub fn dilated_step(f: &CMatrix, rho: &DensityMatrix, tau: f64) -> Result<DensityMatrix> {
    check_tau(tau)?;
    let d = f.nrows();
    if rho.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: rho.dim() });
    }
    let u = herm_eig(&dilate(f)?)?.propagator(tau.sqrt());
    let mut anc = CMatrix::zeros(2, 2);
    anc[(0, 0)] = C64::new(1.0, 0.0);
    let joint = &u * kron(&anc, rho.as_matrix()) * u.adjoint();
    Ok(DensityMatrix::from_channel_output(partial_trace(&joint, &[2, d], &[1])?))
}

/// Kraus pair `K0 = ⟨0|U|0⟩`, `K1 = ⟨1|U|0⟩` of one dilated step.
#[derive(Clone, Debug)]
pub struct DilatedChannel {
    k0: CMatrix,
    k1: CMatrix,
}

impl DilatedChannel {
    pub fn new(f: &CMatrix, tau: f64) -> Result<Self> {
        check_tau(tau)?;
        let d = f.nrows();
        let u = herm_eig(&dilate(f)?)?.propagator(tau.sqrt());
        Ok(DilatedChannel {
            k0: u.view((0, 0), (d, d)).into_owned(),
            k1: u.view((d, 0), (d, d)).into_owned(),
        })
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        &self.k0 * rho * self.k0.adjoint() + &self.k1 * rho * self.k1.adjoint()
    }
}

/// `⌈t³/ε²⌉`, guarding against rounding just above an integer.
pub fn default_steps(t: f64, eps: f64) -> Result<u64> {
    if !(t > 0.0 && eps > 0.0 && t.is_finite() && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("need t > 0 and eps > 0, got t = {t}, eps = {eps}")));
    }
    Ok(ceil_guarded(t.powi(3) / (eps * eps)).max(1))
}

pub(crate) fn ceil_guarded(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

/// Closed-form cost of `steps` steps covering time `t`.
pub fn dilated_cost(t: f64, steps: u64) -> CostReport {
    let tau = t / steps as f64;
    CostReport { hamiltonian_time: steps as f64 * tau.sqrt(), step_count: Some(steps), ancilla_count: steps }
}

pub fn dilated_evolve(f: &CMatrix, rho0: &DensityMatrix, t: f64, steps: u64) -> Result<(DensityMatrix, CostReport)> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be positive".into()));
    }
    if rho0.dim() != f.nrows() {
        return Err(Error::DimensionMismatch { expected: f.nrows(), found: rho0.dim() });
    }
    let tau = t / steps as f64;
    let ch = DilatedChannel::new(f, tau)?;
    let mut rho = rho0.as_matrix().clone();
    for _ in 0..steps {
        rho = ch.apply(&rho);
    }
    Ok((DensityMatrix::from_channel_output(rho), dilated_cost(t, steps)))
}

/// [`dilated_evolve`] with the default step count; counts above
/// [`STEP_LIMIT`] are refused unless `allow_large` is set.
pub fn dilated_evolve_to_accuracy(
    f: &CMatrix,
    rho0: &DensityMatrix,
    t: f64,
    eps: f64,
    allow_large: bool,
) -> Result<(DensityMatrix, CostReport)> {
    let steps = default_steps(t, eps)?;
    if steps > STEP_LIMIT && !allow_large {
        return Err(Error::StepOverride { steps });
    }
    dilated_evolve(f, rho0, t, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_oracle::lindblad_exact_hermitian;
    use crate::model::{diag, Hamiltonian};
    use crate::numkernel::{trace_distance, StateVector};
    use lindff_check as check;

    fn plus() -> DensityMatrix {
        DensityMatrix::from_pure(&StateVector::uniform(2))
    }

    #[test]
    fn one_step_scales_coherence_by_cosine() {
        let out = dilated_step(&diag(&[0.0, 1.0]), &plus(), 0.01).unwrap();
        assert!((out.as_matrix()[(0, 1)].re - 0.5 * 0.1f64.cos()).abs() < 1e-15);
        assert!((out.as_matrix()[(0, 1)].re - 0.5 * 0.995004).abs() < 1e-6);
    }

    #[test]
    fn kraus_form_equals_literal_step() {
        let f = CMatrix::from_fn(3, 3, |i, j| C64::new(0.1 * (i + 2 * j) as f64, 0.05 * i as f64 - 0.03 * j as f64));
        let rho = DensityMatrix::maximally_mixed(3);
        let lit = dilated_step(&f, &rho, 0.2).unwrap();
        let kr = DilatedChannel::new(&f, 0.2).unwrap().apply(rho.as_matrix());
        assert!((lit.as_matrix() - kr).norm() < 1e-14);
    }

    #[test]
    fn hundred_steps_worked_value() {
        let (out, cost) = dilated_evolve(&diag(&[0.0, 1.0]), &plus(), 1.0, 100).unwrap();
        let target = 0.5 * (-0.5f64).exp();
        assert!((out.as_matrix()[(0, 1)].re - target).abs() < 0.01);
        assert!((cost.hamiltonian_time - 10.0).abs() < 1e-12);
        assert_eq!(cost.step_count, Some(100));
    }

    #[test]
    fn zero_time_and_zero_jump_are_identity() {
        let rho = plus();
        let (a, _) = dilated_evolve(&diag(&[0.0, 1.0]), &rho, 0.0, 5).unwrap();
        assert!((a.as_matrix() - rho.as_matrix()).norm() < 1e-14);
        let (b, _) = dilated_evolve(&CMatrix::zeros(2, 2), &rho, 3.0, 5).unwrap();
        assert!((b.as_matrix() - rho.as_matrix()).norm() < 1e-14);
    }

    #[test]
    fn non_hermitian_jump_converges_to_rk4() {
        let f = CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(0.6, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);
        let rho = plus();
        let rk = check::rk4_lindblad(&[f.clone()], rho.as_matrix(), 1.0, 1e-12);
        let (coarse, _) = dilated_evolve(&f, &rho, 1.0, 200).unwrap();
        let (fine, _) = dilated_evolve(&f, &rho, 1.0, 800).unwrap();
        let e1 = check::trace_distance_svd(coarse.as_matrix(), &rk);
        let e2 = check::trace_distance_svd(fine.as_matrix(), &rk);
        assert!(e2 < e1 / 3.0);
    }

    #[test]
    fn default_steps_and_override() {
        assert_eq!(default_steps(8.0, 0.1).unwrap(), 51_200);
        assert_eq!(dilated_cost(8.0, 51_200).hamiltonian_time, 640.0);
        let err = dilated_evolve_to_accuracy(&diag(&[0.0, 1.0]), &plus(), 100.0, 0.01, false);
        assert!(matches!(err, Err(Error::StepOverride { steps: 10_000_000_000 })));
    }

    #[test]
    fn first_order_convergence() {
        let h = Hamiltonian::spectral(&diag(&[0.0, 1.0])).unwrap();
        let rho = plus();
        let exact = lindblad_exact_hermitian(&h, &rho, 1.0).unwrap();
        let steps = [50u64, 100, 200, 400];
        let errs: Vec<f64> = steps
            .iter()
            .map(|&s| {
                let (out, _) = dilated_evolve(h.matrix(), &rho, 1.0, s).unwrap();
                trace_distance(out.as_matrix(), exact.as_matrix()).unwrap()
            })
            .collect();
        let xs: Vec<f64> = steps.iter().map(|&s| s as f64).collect();
        let slope = crate::fit::loglog_slope(&xs, &errs);
        assert!((slope + 1.0).abs() <= 0.15, "slope {slope}");
    }
}
