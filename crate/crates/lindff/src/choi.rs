//! Multi-jump Lindbladians whose per-jump vectorized generators commute.
//!
//! With `G_i = H_i⊗H_i* − ½H_i²⊗I − ½I⊗H_i*²`, pairwise `[G_i, G_j] = 0`
//! makes `e^{Σ G_i t} = Π e^{G_i t}`, so the evolution is a sequence of
//! single-jump dephasing channels, each fast-forwardable. Commuting or
//! anticommuting jumps (every Pauli set) satisfy the condition.

use crate::fastforward::{ff_evolve, FfPlan};
use crate::model::{pauli_string, Hamiltonian, LindbladSpec};
use crate::numkernel::{c, kron, CMatrix, DensityMatrix};
use crate::{CostReport, Error, Result};

/// Default relative tolerance of [`is_choi_commuting`].
pub const COMMUTE_TOL: f64 = 1e-9;

fn max_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `H⊗H* − ½H²⊗I − ½I⊗H*²` in the row-major vectorization.
pub fn choi_generator(h: &CMatrix) -> CMatrix {
    let n = h.nrows();
    let id = CMatrix::identity(n, n);
    let hc = h.conjugate();
    let h2 = h * h;
    let hc2 = &hc * &hc;
    kron(h, &hc) - kron(&h2, &id) * c(0.5) - kron(&id, &hc2) * c(0.5)
}

/// Alias of [`choi_generator`] naming a single term of the sum.
pub fn choi_generator_term(h: &CMatrix) -> CMatrix {
    choi_generator(h)
}

/// `[G_a, G_b]` assembled from the commutators of `a`, `b` and their
/// squares, term by term.
pub fn commutator_expansion(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let id = CMatrix::identity(n, n);
    let comm = |x: &CMatrix, y: &CMatrix| x * y - y * x;
    let (a2, b2) = (a * a, b * b);
    let (ac, bc) = (a.conjugate(), b.conjugate());
    let aa = kron(a, &ac);
    let bb = kron(b, &bc);
    let a_b2 = comm(a, &b2);
    let a2_b = comm(&a2, b);
    let a2_b2 = comm(&a2, &b2);
    comm(&aa, &bb) - kron(&a_b2, &ac) * c(0.5) - kron(a, &a_b2.conjugate()) * c(0.5) - kron(&a2_b, &bc) * c(0.5)
        - kron(b, &a2_b.conjugate()) * c(0.5)
        + kron(&a2_b2, &id) * c(0.25)
        + kron(&id, &a2_b2.conjugate()) * c(0.25)
}

/// Outcome of the pairwise generator check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutationCheck {
    pub commuting: bool,
    /// Largest `max|[G_i, G_j]|` over pairs, relative to the larger term's
    /// max entry.
    pub max_commutator: f64,
}

pub fn is_choi_commuting(spec: &LindbladSpec, tol: f64) -> CommutationCheck {
    let gens: Vec<CMatrix> = spec.jumps().iter().map(choi_generator).collect();
    let mut worst = 0.0f64;
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let scale = max_entry(&gens[i]).max(max_entry(&gens[j]));
            if scale == 0.0 {
                continue;
            }
            let comm = &gens[i] * &gens[j] - &gens[j] * &gens[i];
            worst = worst.max(max_entry(&comm) / scale);
        }
    }
    CommutationCheck { commuting: worst <= tol, max_commutator: worst }
}

/// Fast-forwards each jump in input order with budget `ε_total/K` per factor.
///
/// Hamiltonian time adds across factors; ancilla registers are reused, so
/// the ancilla count is the largest single register.
pub fn choi_ff_evolve(
    spec: &LindbladSpec,
    rho0: &DensityMatrix,
    t: f64,
    eps_total: f64,
    allow_non_commuting: bool,
) -> Result<(DensityMatrix, CostReport)> {
    if rho0.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: rho0.dim() });
    }
    if !allow_non_commuting {
        let check = is_choi_commuting(spec, COMMUTE_TOL);
        if !check.commuting {
            return Err(Error::NonCommuting(check.max_commutator));
        }
    }
    let k = spec.jumps().len();
    let plan = FfPlan::new(t, eps_total / k as f64)?;
    let mut rho = rho0.clone();
    let mut cost = CostReport::zero();
    for jump in spec.jumps() {
        let h = Hamiltonian::spectral(jump)?;
        let (next, c) = ff_evolve(&h, &rho, &plan)?;
        rho = next;
        cost.hamiltonian_time += c.hamiltonian_time;
        cost.ancilla_count = cost.ancilla_count.max(c.ancilla_count);
    }
    Ok((rho, cost))
}

/// Jumps `√λ_i P_i` for Pauli strings `P_i` (first letter most significant).
pub fn pauli_noise_spec(terms: &[(&str, f64)]) -> Result<LindbladSpec> {
    if terms.is_empty() {
        return Err(Error::InvalidParameter("no Pauli terms given".into()));
    }
    let jumps = terms
        .iter()
        .map(|(p, rate)| {
            if !(*rate > 0.0 && *rate <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "rate {rate} for {p} outside (0, 1]; rescale time instead, since L_(cH) = c² L_H"
                )));
            }
            let m = pauli_string(p).ok_or_else(|| Error::InvalidParameter(format!("not a Pauli string: {p}")))?;
            Ok(m * c(rate.sqrt()))
        })
        .collect::<Result<Vec<_>>>()?;
    LindbladSpec::new(jumps)
}
