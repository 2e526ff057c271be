//! Gibbs states `e^{−βH_P}/Z` through one fast-forwarded PSD jump.
//!
//! The jump `F = |0⟩⟨0| ⊗ √H_P ⊗ I` acts on ancilla ⊗ system ⊗ copy. The
//! ancilla 0–1 coherence block of `|+⟩⟨+| ⊗ |Ω⟩⟨Ω|` obeys `Ḃ = −½(H_P ⊗ I)B`,
//! so after time `β` it is `½ e^{−βH_P/2} ⊗ I |Ω⟩⟨Ω|` and `B|Ω⟩` is, up to
//! normalization, the purification `|ρ_β⟩ ∝ (e^{−βH_P/2} ⊗ I)|Ω⟩`. Its norm
//! `½√(Z/2ⁿ)` gives the partition function.

use crate::fastforward::{ff_evolve_pure, FfPlan};
use crate::model::{Hamiltonian, LindbladSpec};
use crate::numkernel::{c, herm_eig, kron, kron_vec, partial_trace, CMatrix, CVector, DensityMatrix, StateVector};
use crate::{CostReport, Error, Result};

/// Largest system dimension (`n ≤ 3`).
pub const GIBBS_MAX_DIM: usize = 8;

const PSD_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct GibbsResult {
    /// `|ρ_β⟩` on system ⊗ copy.
    pub purification: StateVector,
    /// Copy register traced out.
    pub reduced: DensityMatrix,
    pub partition_estimate: f64,
    pub partition_exact: f64,
    /// `|⟨ρ_β^exact|ρ_β⟩|²`, a lower bound on the fidelity of the reduced
    /// states.
    pub fidelity: f64,
    pub cost: CostReport,
    /// `√(2ⁿ/Ẑ)`, what amplitude amplification of the block would query.
    pub amplification_queries: f64,
}

fn check_psd(hp: &CMatrix) -> Result<Vec<f64>> {
    let e = herm_eig(hp)?;
    if let Some(&lo) = e.values.first() {
        if lo < -PSD_TOL {
            return Err(Error::InvalidParameter(format!("H_P has eigenvalue {lo} below zero")));
        }
    }
    if let Some(&hi) = e.values.last() {
        if hi > 1.0 + PSD_TOL {
            return Err(Error::JumpNorm(hi));
        }
    }
    Ok(e.values)
}

/// `|0⟩⟨0| ⊗ √H_P ⊗ I`.
pub fn gibbs_jump(hp: &CMatrix) -> Result<LindbladSpec> {
    check_psd(hp)?;
    let n = hp.nrows();
    let root = herm_eig(hp)?.map(|x| c(x.max(0.0).sqrt()));
    let mut anc = CMatrix::zeros(2, 2);
    anc[(0, 0)] = c(1.0);
    LindbladSpec::new(vec![kron(&anc, &kron(&root, &CMatrix::identity(n, n)))])
}

/// `e^{−βH_P}/Z` and `Z`.
pub fn exact_gibbs(hp: &CMatrix, beta: f64) -> Result<(DensityMatrix, f64)> {
    let e = herm_eig(hp)?;
    let lo = e.values.first().copied().unwrap_or(0.0);
    // Shift by the ground energy so that large β stays finite.
    let shifted = e.map(|x| c((-beta * (x - lo)).exp()));
    let z_shifted = shifted.trace().re;
    let rho = DensityMatrix::from_channel_output(shifted / c(z_shifted));
    Ok((rho, z_shifted * (-beta * lo).exp()))
}

/// `Σ_i |i⟩|i⟩ / √dim`.
fn omega(dim: usize) -> CVector {
    let mut v = CVector::zeros(dim * dim);
    for i in 0..dim {
        v[i * dim + i] = c(1.0 / (dim as f64).sqrt());
    }
    v
}

pub fn gibbs_prepare(hp: &CMatrix, beta: f64, eps: f64) -> Result<GibbsResult> {
    check_psd(hp)?;
    let dim = hp.nrows();
    if dim > GIBBS_MAX_DIM {
        return Err(Error::Cap { what: "Gibbs system dimension", size: dim, cap: GIBBS_MAX_DIM });
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta must be non-negative, got {beta}")));
    }
    let om = omega(dim);
    let (gibbs, z) = exact_gibbs(hp, beta)?;
    let exact_purification = {
        let half = herm_eig(hp)?.map(|x| c((-beta * x / 2.0).exp()));
        StateVector::normalized(kron(&half, &CMatrix::identity(dim, dim)) * &om)?
    };

    if beta == 0.0 {
        let purification = StateVector::normalized(om)?;
        return Ok(GibbsResult {
            reduced: gibbs,
            purification,
            partition_estimate: dim as f64,
            partition_exact: z,
            fidelity: 1.0,
            cost: CostReport::zero(),
            amplification_queries: 1.0,
        });
    }

    let spec = gibbs_jump(hp)?;
    let jump = Hamiltonian::spectral(&spec.jumps()[0])?;
    let plus = CVector::from_element(2, c(0.5f64.sqrt()));
    let input = StateVector::normalized(kron_vec(&plus, &om))?;
    let plan = FfPlan::new(beta, eps)?;
    let run = ff_evolve_pure(&jump, &input, &plan)?;

    let d2 = dim * dim;
    let block = run.rho.as_matrix().view((0, d2), (d2, d2)).into_owned();
    let v = block * &om;
    let b = v.norm();
    if b < 1e-12 {
        return Err(Error::NumericalGuard(format!("coherence block norm {b:e} too small at beta = {beta}")));
    }
    let purification = StateVector::normalized(v)?;
    let pure = purification.as_vector() * purification.as_vector().adjoint();
    let reduced = DensityMatrix::from_channel_output(partial_trace(&pure, &[dim, dim], &[0])?);
    let z_hat = dim as f64 * (2.0 * b).powi(2);
    let fidelity = (exact_purification.as_vector().adjoint() * purification.as_vector())[(0, 0)].norm_sqr();
    Ok(GibbsResult {
        purification,
        reduced,
        partition_estimate: z_hat,
        partition_exact: z,
        fidelity: fidelity.min(1.0),
        cost: run.cost,
        amplification_queries: (dim as f64 / z_hat).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::loglog_slope;
    use crate::model::diag;
    use crate::numkernel::hermitian_part;
    use crate::C64;
    use lindff_check as check;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_psd(rng: &mut impl Rng, n: usize) -> CMatrix {
        let a = CMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let h = hermitian_part(&a);
        let e = herm_eig(&h).unwrap();
        let (lo, hi) = (e.values[0], e.values[n - 1]);
        (h - CMatrix::identity(n, n) * c(lo)) / c(hi - lo)
    }

    #[test]
    fn jump_worked_values() {
        let f = gibbs_jump(&diag(&[0.0, 1.0])).unwrap();
        let want = diag(&[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!((&f.jumps()[0] - want).norm() < 1e-14);
        let g = gibbs_jump(&CMatrix::identity(2, 2)).unwrap();
        let mut anc = CMatrix::zeros(2, 2);
        anc[(0, 0)] = c(1.0);
        assert!((&g.jumps()[0] - kron(&anc, &CMatrix::identity(4, 4))).norm() < 1e-14);
        assert!(gibbs_jump(&diag(&[-0.1, 0.5])).is_err());
        assert!(gibbs_jump(&diag(&[0.0, 1.5])).is_err());
    }

    #[test]
    fn jump_norm_is_root_of_hp_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let hp = random_psd(&mut rng, 2) * c(0.64);
        let f = gibbs_jump(&hp).unwrap();
        let norm = herm_eig(&f.jumps()[0]).unwrap().values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((norm - 0.8).abs() < 1e-12);
    }

    #[test]
    fn exact_gibbs_worked_values() {
        let (rho, z) = exact_gibbs(&diag(&[0.0, 1.0]), 2.0).unwrap();
        assert!((z - 1.13534).abs() < 5e-6);
        assert!((rho.as_matrix()[(0, 0)].re - 0.88080).abs() < 5e-6);
        assert!((rho.as_matrix()[(1, 1)].re - 0.11920).abs() < 5e-6);
        let (mixed, z0) = exact_gibbs(&diag(&[0.2, 0.7, 0.9]), 0.0).unwrap();
        assert_eq!(z0, 3.0);
        assert!((mixed.as_matrix() - CMatrix::identity(3, 3) * c(1.0 / 3.0)).norm() < 1e-15);
        let (cold, _) = exact_gibbs(&diag(&[0.0, 0.0, 1.0]), 1e4).unwrap();
        assert!((cold.as_matrix() - diag(&[0.5, 0.5, 0.0])).norm() < 1e-15);
        let oracle = check::expm(&(diag(&[0.0, 1.0]) * c(-2.0)));
        assert!((oracle.trace().re - 1.13534).abs() < 5e-6);
    }

    #[test]
    fn two_level_preparation() {
        let r = gibbs_prepare(&diag(&[0.0, 1.0]), 2.0, 0.05).unwrap();
        assert!(r.fidelity >= 0.9);
        assert!((r.partition_estimate - 1.13534).abs() / 1.13534 <= 0.05);
        assert!((r.reduced.as_matrix()[(0, 0)].re - 0.88080).abs() < 0.05);
        assert!((r.amplification_queries - (2.0 / r.partition_estimate).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ideal_block_norm_inverts_to_partition() {
        let z = 1.0 + (-2.0f64).exp();
        let b = 0.5 * (z / 2.0).sqrt();
        assert!((b - 0.37672).abs() < 5e-6);
        assert!((2.0 * (2.0 * b).powi(2) - 1.13534).abs() < 5e-6);
    }

    #[test]
    fn infinite_temperature() {
        let r = gibbs_prepare(&diag(&[0.0, 0.3, 0.6, 1.0]), 0.0, 0.05).unwrap();
        assert_eq!(r.partition_estimate, 4.0);
        assert!((r.reduced.as_matrix() - CMatrix::identity(4, 4) * c(0.25)).norm() < 1e-15);
    }

    #[test]
    fn random_two_qubit_accuracy() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let eps = 0.05;
        for beta in [1.0, 2.0, 4.0] {
            let hp = random_psd(&mut rng, 4);
            let r = gibbs_prepare(&hp, beta, eps).unwrap();
            assert!(r.fidelity >= 1.0 - 2.0 * eps, "beta {beta}: {}", r.fidelity);
            let rel = (r.partition_estimate - r.partition_exact).abs() / r.partition_exact;
            assert!(rel <= 0.05, "beta {beta}: {rel}");
        }
    }

    #[test]
    fn cost_grows_as_root_beta() {
        let betas = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0];
        let costs: Vec<f64> = betas
            .iter()
            .map(|&b| gibbs_prepare(&diag(&[0.0, 1.0]), b, 0.05).unwrap().cost.hamiltonian_time)
            .collect();
        let slope = loglog_slope(&betas, &costs);
        assert!((slope - 0.5).abs() <= 0.1, "{slope}");
    }
}
