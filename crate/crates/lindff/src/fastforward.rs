//! Fast-forwarded evolution under a single Hermitian jump.
//!
//! `N` dilated steps of length `τ = t/N` are equivalent to one binomially
//! weighted register `Σ_m a_m |m⟩` controlling `e^{−iH√τ(2m−N)}`. Only the
//! window `|m − N/2| < 2^{d′−1}` matters up to `2e^{−2c²N}`, and inside the
//! window the shift `2m − N` equals `2r − 2^{d′}` for the residue
//! `r = (m − N/2 + 2^{d′−1}) mod 2^{d′}`. The register therefore needs only
//! `d′` controlled powers of `e^{iH√τ}`, for total evolution time `2^{d′}√τ`.
//!
//! The structured simulation keeps one system vector per residue (the
//! [`GoalLedger`]) instead of the `2^d`-dimensional register.

use crate::concentration::binomial_pmf;
use crate::dilated_baseline::ceil_guarded;
use crate::model::Hamiltonian;
use crate::numkernel::{c, kron, partial_trace, CMatrix, CVector, DensityMatrix, StateVector, Tolerances, C64};
use crate::stateprep::binomial_amplitudes;
use crate::{CostReport, Error, Result};
use serde::{Deserialize, Serialize};

/// Largest `2^d · dim` accepted by [`dense_circuit_reference`].
pub const DENSE_REFERENCE_CAP: usize = 1 << 14;

/// Register and window parameters for one `(t, ε)` target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FfPlan {
    pub t: f64,
    pub eps: f64,
    /// Budget for the window truncation alone; `c` is derived from it.
    pub eps_window: f64,
    pub n: u64,
    pub tau: f64,
    pub c: f64,
    pub d: u32,
    pub d_prime: u32,
    /// Inclusive in-window range of `m`, clipped to `[0, N]`.
    pub window: (u64, u64),
    /// The requested `N` was odd and was raised by one.
    pub rounded_to_even: bool,
    /// The window formula reached past `[0, N]`, so the register covers
    /// every `m` and the truncation error is zero.
    pub full_window: bool,
}

impl FfPlan {
    /// `N = ⌈t³/ε²⌉` (made even) and `ε′ = ε`.
    pub fn new(t: f64, eps: f64) -> Result<Self> {
        Self::build(t, eps, eps, None)
    }

    /// Explicit step count `N`.
    pub fn with_steps(t: f64, eps: f64, n: u64) -> Result<Self> {
        Self::build(t, eps, eps, Some(n))
    }

    pub fn build(t: f64, eps: f64, eps_window: f64, n: Option<u64>) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
        }
        for (name, e) in [("eps", eps), ("eps_window", eps_window)] {
            if !(e > 0.0 && e < 2.0) {
                return Err(Error::InvalidParameter(format!("{name} must lie in (0, 2), got {e}")));
            }
        }
        let requested = match n {
            Some(n) => n,
            None => ceil_guarded(t.powi(3) / (eps * eps)),
        };
        if requested < 2 {
            return Err(Error::InvalidParameter(format!("N = {requested} is below 2")));
        }
        let rounded_to_even = requested % 2 == 1;
        let n = requested + requested % 2;
        let nf = n as f64;
        let cwin = ((2.0 / eps_window).ln() / 2.0).sqrt() / nf.sqrt();
        let cn = cwin * nf;
        if cn < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "window half-width cN = {cn:.4} is below one register state; increase N or lower eps_window"
            )));
        }
        let d = 64 - n.leading_zeros();
        let mut k = 0u32;
        while ((1u64 << k) as f64) < cn {
            k += 1;
        }
        let mut d_prime = k + 1;
        let mut full_window = false;
        if (1u64 << (d_prime - 1)) > n / 2 {
            d_prime = d;
            full_window = true;
        }
        let hw = 1u64 << (d_prime - 1);
        let window = (n / 2 - hw.min(n / 2), (n / 2 + hw - 1).min(n));
        Ok(FfPlan {
            t,
            eps,
            eps_window,
            n,
            tau: t / nf,
            c: cwin,
            d,
            d_prime,
            window,
            rounded_to_even,
            full_window,
        })
    }

    fn half_width(&self) -> i64 {
        1i64 << (self.d_prime - 1)
    }

    /// `(m − N/2 + 2^{d′−1}) mod 2^{d′}`.
    pub fn residue(&self, m: u64) -> usize {
        (m as i64 - (self.n / 2) as i64 + self.half_width()).rem_euclid(1i64 << self.d_prime) as usize
    }

    /// `2r − 2^{d′}`, the evolution multiple applied for residue `r`.
    pub fn shift(&self, r: usize) -> i64 {
        2 * r as i64 - (1i64 << self.d_prime)
    }

    pub fn in_window(&self, m: u64) -> bool {
        m >= self.window.0 && m <= self.window.1
    }

    pub fn residue_count(&self) -> usize {
        1 << self.d_prime
    }

    /// `2e^{−2c²N}`.
    pub fn window_bound(&self) -> f64 {
        if self.full_window {
            return 0.0;
        }
        2.0 * (-2.0 * self.c * self.c * self.n as f64).exp()
    }

    /// `2^{d′} √τ`, the evolution time of the `d′` controlled powers plus
    /// the uncontrolled `e^{iH√τ}`.
    pub fn hamiltonian_time(&self) -> f64 {
        (1u64 << self.d_prime) as f64 * self.tau.sqrt()
    }

    pub fn cost(&self) -> CostReport {
        CostReport { hamiltonian_time: self.hamiltonian_time(), step_count: None, ancilla_count: self.d as u64 }
    }
}

/// `m ↦ (m + N/2 − 2^{d′−1}) mod 2^d` on the full register.
pub fn u_add_map(plan: &FfPlan, m: u64) -> Result<u64> {
    check_register_index(plan, m)?;
    let modulus = 1i64 << plan.d;
    Ok((m as i64 + (plan.n / 2) as i64 - plan.half_width()).rem_euclid(modulus) as u64)
}

/// Inverse of [`u_add_map`].
pub fn u_add_inverse(plan: &FfPlan, m: u64) -> Result<u64> {
    check_register_index(plan, m)?;
    let modulus = 1i64 << plan.d;
    Ok((m as i64 - (plan.n / 2) as i64 + plan.half_width()).rem_euclid(modulus) as u64)
}

fn check_register_index(plan: &FfPlan, m: u64) -> Result<()> {
    if m >= 1u64 << plan.d {
        return Err(Error::InvalidParameter(format!("register index {m} outside [0, 2^{})", plan.d)));
    }
    Ok(())
}

/// Cached `e^{+iH√τ2^j}` for `j < d′` and `e^{+iH√τ}`, with the total
/// evolution time spent building them.
struct PowerCache {
    powers: Vec<CMatrix>,
    base: CMatrix,
    spent: f64,
}

impl PowerCache {
    fn new(h: &Hamiltonian, plan: &FfPlan) -> Self {
        let st = plan.tau.sqrt();
        let mut spent = 0.0;
        let powers = (0..plan.d_prime)
            .map(|j| {
                let s = st * (1u64 << j) as f64;
                spent += s;
                h.propagator(-s)
            })
            .collect();
        spent += st;
        PowerCache { powers, base: h.propagator(-st), spent }
    }

    /// `e^{iH√τ} Π_j (bit_j(r) = 0 ? e^{iH√τ2^j} : e^{−iH√τ2^j}) v`.
    fn apply(&self, r: usize, v: &CVector) -> CVector {
        let mut out = v.clone();
        for (j, p) in self.powers.iter().enumerate() {
            out = if (r >> j) & 1 == 0 { p * out } else { p.adjoint() * out };
        }
        &self.base * out
    }

    fn unitary(&self, r: usize) -> CMatrix {
        let mut u = self.base.clone();
        for (j, p) in self.powers.iter().enumerate() {
            u = if (r >> j) & 1 == 0 { p * u } else { p.adjoint() * u };
        }
        u
    }
}

fn check_jump(h: &Hamiltonian, dim: usize) -> Result<()> {
    if dim != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: dim });
    }
    let norm = h.norm();
    if norm > 1.0 + Tolerances::DEFAULT.jump_norm {
        return Err(Error::JumpNorm(norm));
    }
    Ok(())
}

/// Circuit-level action of `V_H` on the basis input `|m⟩|ψ⟩`: `U_add†`, the
/// `d′` controlled powers on the low register bits, `e^{iH√τ}`, `U_add`.
/// The register returns to `|m⟩`, so only the system vector is returned.
pub fn apply_vh(plan: &FfPlan, h: &Hamiltonian, m: u64, psi: &CVector) -> Result<CVector> {
    check_jump(h, psi.len())?;
    let inner = u_add_inverse(plan, m)?;
    let cache = PowerCache::new(h, plan);
    let low = (inner & ((1u64 << plan.d_prime) - 1)) as usize;
    Ok(cache.apply(low, psi))
}

/// Residue-indexed weights `w_r = Σ_{r(m) = r} a_m²` and system vectors
/// `|χ_r⟩ = e^{−iH√τ(2r − 2^{d′})}|ψ⟩`.
#[derive(Clone, Debug)]
pub struct GoalLedger {
    plan: FfPlan,
    weights: Vec<f64>,
    states: Vec<CVector>,
}

impl GoalLedger {
    pub fn plan(&self) -> &FfPlan {
        &self.plan
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[CVector] {
        &self.states
    }

    /// `Σ_r w_r |χ_r⟩⟨χ_r|`.
    pub fn reduced_state(&self) -> CMatrix {
        let dim = self.states[0].len();
        let mut rho = CMatrix::zeros(dim, dim);
        for (w, v) in self.weights.iter().zip(&self.states) {
            if *w > 0.0 {
                rho += v * v.adjoint() * c(*w);
            }
        }
        rho
    }
}

fn residue_weights(plan: &FfPlan) -> Vec<f64> {
    let mut w = vec![0.0; plan.residue_count()];
    for m in 0..=plan.n {
        w[plan.residue(m)] += binomial_pmf(plan.n, m, 0.5);
    }
    w
}

#[derive(Clone, Debug)]
pub struct FfRun {
    pub rho: DensityMatrix,
    pub ledger: GoalLedger,
    pub cost: CostReport,
}

/// Structured fast-forward of a pure input.
pub fn ff_evolve_pure(h: &Hamiltonian, psi: &StateVector, plan: &FfPlan) -> Result<FfRun> {
    check_jump(h, psi.dim())?;
    let cache = PowerCache::new(h, plan);
    let weights = residue_weights(plan);
    let states: Vec<CVector> = (0..plan.residue_count()).map(|r| cache.apply(r, psi.as_vector())).collect();
    let ledger = GoalLedger { plan: plan.clone(), weights, states };
    let rho = DensityMatrix::from_channel_output(ledger.reduced_state());
    let cost = CostReport { hamiltonian_time: cache.spent, step_count: None, ancilla_count: plan.d as u64 };
    Ok(FfRun { rho, ledger, cost })
}

/// Structured fast-forward of a mixed input, `Σ_r w_r U_r ρ0 U_r†`, the
/// linear extension of the pure-state map over the eigen-mixture of `ρ0`.
pub fn ff_evolve(h: &Hamiltonian, rho0: &DensityMatrix, plan: &FfPlan) -> Result<(DensityMatrix, CostReport)> {
    check_jump(h, rho0.dim())?;
    let cache = PowerCache::new(h, plan);
    let weights = residue_weights(plan);
    let mut out = CMatrix::zeros(rho0.dim(), rho0.dim());
    for (r, w) in weights.iter().enumerate() {
        if *w > 0.0 {
            let u = cache.unitary(r);
            out += &u * rho0.as_matrix() * u.adjoint() * c(*w);
        }
    }
    let cost = CostReport { hamiltonian_time: cache.spent, step_count: None, ancilla_count: plan.d as u64 };
    Ok((DensityMatrix::from_channel_output(out), cost))
}

/// `Σ_{m=0}^{N} 2^{−N} C(N,m) U(2m−N) ρ0 U(2m−N)†` with `U(k) = e^{−iH√τk}`,
/// summed over every `m` in the eigenbasis of `H`.
pub fn binomial_mixture(h: &Hamiltonian, rho0: &DensityMatrix, plan: &FfPlan) -> Result<DensityMatrix> {
    check_jump(h, rho0.dim())?;
    let e = h.eigh();
    let v = &e.vectors;
    let mut r = v.adjoint() * rho0.as_matrix() * v;
    let st = plan.tau.sqrt();
    let pmf: Vec<f64> = (0..=plan.n).map(|m| binomial_pmf(plan.n, m, 0.5)).collect();
    let n = r.nrows();
    for i in 0..n {
        for j in 0..n {
            let dl = e.values[i] - e.values[j];
            let mut s = C64::new(0.0, 0.0);
            for (m, p) in pmf.iter().enumerate() {
                if *p > 0.0 {
                    s += C64::from_polar(*p, -st * (2.0 * m as f64 - plan.n as f64) * dl);
                }
            }
            r[(i, j)] *= s;
        }
    }
    Ok(DensityMatrix::from_channel_output(v * r * v.adjoint()))
}

/// The full register circuit with every gate as a dense matrix, reduced to
/// the system. Register is the high-order factor; register bit `j` is bit
/// `j` of the basis index.
pub fn dense_circuit_reference(h: &Hamiltonian, psi: &StateVector, plan: &FfPlan) -> Result<DensityMatrix> {
    check_jump(h, psi.dim())?;
    let reg = 1usize << plan.d;
    let dim = psi.dim();
    let total = reg * dim;
    if total > DENSE_REFERENCE_CAP {
        return Err(Error::Cap { what: "dense register-system dimension", size: total, cap: DENSE_REFERENCE_CAP });
    }
    let amps = binomial_amplitudes(plan.n);
    let mut a = CVector::zeros(reg);
    for (m, x) in amps.iter().enumerate() {
        a[m] = c(*x);
    }
    let mut state = kron_vec(&a, psi.as_vector());

    let perm = |f: &dyn Fn(u64) -> u64| -> CMatrix {
        let mut p = CMatrix::zeros(reg, reg);
        for m in 0..reg as u64 {
            p[(f(m) as usize, m as usize)] = c(1.0);
        }
        p
    };
    let u_add = perm(&|m| u_add_map(plan, m).expect("index in range"));
    let u_add_dag = perm(&|m| u_add_inverse(plan, m).expect("index in range"));
    let id_sys = CMatrix::identity(dim, dim);
    let id_reg = CMatrix::identity(reg, reg);

    state = kron(&u_add_dag, &id_sys) * state;
    let st = plan.tau.sqrt();
    for j in 0..plan.d_prime {
        let s = st * (1u64 << j) as f64;
        let plus = h.propagator(-s);
        let minus = h.propagator(s);
        let mut gate = CMatrix::zeros(total, total);
        for m in 0..reg {
            let block = if (m >> j) & 1 == 0 { &plus } else { &minus };
            gate.view_mut((m * dim, m * dim), (dim, dim)).copy_from(block);
        }
        state = gate * state;
    }
    state = kron(&id_reg, &h.propagator(-st)) * state;
    state = kron(&u_add, &id_sys) * state;

    let joint = &state * state.adjoint();
    Ok(DensityMatrix::from_channel_output(partial_trace(&joint, &[reg, dim], &[1])?))
}

fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    crate::numkernel::kron_vec(a, b)
}
