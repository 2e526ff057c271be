//! Closed-form evolution under dephasing Lindbladians.
//!
//! For a single Hermitian jump the eigenbasis coherences decay as
//! `exp(−(h_α − h_β)² t / 2)`. For several jumps the generator is built in
//! the vectorized picture, which is Hermitian and negative semidefinite
//! when every jump is Hermitian, so `exp(L t)` comes from one eigensolve.

use crate::choi::choi_generator;
use crate::model::{Hamiltonian, LindbladSpec};
use crate::numkernel::{c, herm_eig, CMatrix, CVector, DensityMatrix};
use crate::{Error, Result};

/// Largest `dim²` accepted by [`lindblad_exact_general`].
pub const GENERAL_CAP: usize = 4096;

/// `|ρ⟩⟩ = Σ ρ_ij |i⟩|j⟩`.
pub fn vectorize(rho: &CMatrix) -> CVector {
    let n = rho.nrows();
    CVector::from_fn(n * n, |k, _| rho[(k / n, k % n)])
}

pub fn unvectorize(v: &CVector) -> CMatrix {
    let n = (v.len() as f64).sqrt().round() as usize;
    CMatrix::from_fn(n, n, |i, j| v[i * n + j])
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("evolution time must be finite and non-negative, got {t}")));
    }
    Ok(())
}

/// `ρ(t) = Σ_{αβ} exp((h_α h_β − (h_α² + h_β²)/2) t) Π_α ρ0 Π_β` for the
/// jump `H.matrix()`.
pub fn lindblad_exact_hermitian(h: &Hamiltonian, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    check_time(t)?;
    if rho0.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: rho0.dim() });
    }
    let e = h.eigh();
    let v = &e.vectors;
    let mut r = v.adjoint() * rho0.as_matrix() * v;
    for i in 0..r.nrows() {
        for j in 0..r.ncols() {
            let d = e.values[i] - e.values[j];
            r[(i, j)] *= c((-0.5 * d * d * t).exp());
        }
    }
    Ok(DensityMatrix::from_channel_output(v * r * v.adjoint()))
}

/// `exp(L t)` applied to `|ρ0⟩⟩` with `L = Σ_i (H_i⊗H_i* − ½H_i²⊗I − ½I⊗H_i*²)`.
pub fn lindblad_exact_general(spec: &LindbladSpec, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    check_time(t)?;
    let d = spec.dim();
    if rho0.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: rho0.dim() });
    }
    if d * d > GENERAL_CAP {
        return Err(Error::Cap { what: "vectorized dimension", size: d * d, cap: GENERAL_CAP });
    }
    let mut gen = CMatrix::zeros(d * d, d * d);
    for j in spec.jumps() {
        gen += choi_generator(j);
    }
    let e = herm_eig(&crate::numkernel::hermitian_part(&gen))?;
    let prop = e.map(|lam| c((lam * t).exp()));
    let out = prop * vectorize(rho0.as_matrix());
    Ok(DensityMatrix::from_channel_output(unvectorize(&out)))
}

/// `Σ_α Π_α ρ0 Π_α`, the `t → ∞` limit.
pub fn steady_state(h: &Hamiltonian, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    if rho0.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: rho0.dim() });
    }
    let mut out = CMatrix::zeros(h.dim(), h.dim());
    for p in h.projectors() {
        out += p * rho0.as_matrix() * p;
    }
    Ok(DensityMatrix::from_channel_output(out))
}
