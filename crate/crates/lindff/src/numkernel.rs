//! Dense complex linear algebra: Hermitian eigensolves, propagators,
//! tensor products, partial traces and state distances.
//!
//! Eigendecompositions are delegated to nalgebra's symmetric (Hermitian)
//! eigensolver; this module adds validation, ascending ordering and the
//! quantum-specific helpers.

use crate::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Numeric tolerances used for validation across the crate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Largest entry of `|A − A†|` accepted as Hermitian. Smaller
    /// asymmetries are removed by symmetrizing.
    pub hermitian: f64,
    /// Deviation of `‖v‖` or `Tr ρ` from 1.
    pub normalization: f64,
    /// Most negative eigenvalue accepted as positive semidefinite.
    pub psd: f64,
    /// Eigenvalues closer than `cluster · ‖H‖` share an eigenspace.
    pub cluster: f64,
    /// Slack on `‖F‖ ≤ 1` for jump operators.
    pub jump_norm: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-10,
        normalization: 1e-10,
        psd: 1e-10,
        cluster: 1e-9,
        jump_norm: 1e-9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// A unit vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(CVector);

impl StateVector {
    pub fn new(v: CVector) -> Result<Self> {
        let n = v.norm();
        if (n - 1.0).abs() > Tolerances::DEFAULT.normalization.max(1e-9) {
            return Err(Error::NotNormalized(n));
        }
        Ok(StateVector(v))
    }

    /// Rescales `v` to unit norm.
    pub fn normalized(v: CVector) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        Ok(StateVector(v / c(n)))
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[k] = c(1.0);
        StateVector(v)
    }

    /// `|+⟩^{⊗n}`-style uniform superposition over `dim` basis states.
    pub fn uniform(dim: usize) -> Self {
        StateVector(CVector::from_element(dim, c(1.0 / (dim as f64).sqrt())))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &CVector {
        &self.0
    }

    pub fn into_vector(self) -> CVector {
        self.0
    }
}

/// Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::new_with(m, &Tolerances::DEFAULT)
    }

    pub fn new_with(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        let eig = herm_eig_with(&m, tol)?;
        let tr: f64 = eig.values.iter().sum();
        if (tr - 1.0).abs() > tol.normalization.max(1e-9) {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        if let Some(&lo) = eig.values.first() {
            if lo < -tol.psd.max(1e-9) {
                return Err(Error::InvalidDensity(format!("negative eigenvalue {lo:e}")));
            }
        }
        Ok(DensityMatrix(hermitian_part(&m)))
    }

    pub fn from_pure(v: &StateVector) -> Self {
        DensityMatrix(v.0.clone() * v.0.adjoint())
    }

    /// Wraps a matrix produced by a trace-preserving map, symmetrizing away
    /// rounding asymmetry.
    pub(crate) fn from_channel_output(m: CMatrix) -> Self {
        DensityMatrix(hermitian_part(&m))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix(CMatrix::identity(dim, dim) / c(dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    /// Eigen-mixture `ρ = Σ p_k |v_k⟩⟨v_k|`, dropping weights below `floor`.
    pub fn mixture(&self, floor: f64) -> Vec<(f64, CVector)> {
        let eig = herm_eig(&self.0).expect("density matrices are Hermitian");
        eig.values
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > floor)
            .map(|(k, &p)| (p, eig.vectors.column(k).into_owned()))
            .collect()
    }
}

/// Ascending eigenvalues with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigh {
    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            for z in scaled.column_mut(k).iter_mut() {
                *z *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// `e^{−iHs} v`.
    pub fn evolve(&self, s: f64, v: &CVector) -> CVector {
        let mut coeff = self.vectors.adjoint() * v;
        for (k, &lam) in self.values.iter().enumerate() {
            coeff[k] *= C64::from_polar(1.0, -lam * s);
        }
        &self.vectors * coeff
    }

    /// `e^{−iHs}` as a matrix.
    pub fn propagator(&self, s: f64) -> CMatrix {
        self.map(|lam| C64::from_polar(1.0, -lam * s))
    }
}

pub fn max_asymmetry(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * c(0.5)
}

fn check_square(a: &CMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    Ok(())
}

pub fn herm_eig(a: &CMatrix) -> Result<Eigh> {
    herm_eig_with(a, &Tolerances::DEFAULT)
}

pub fn herm_eig_with(a: &CMatrix, tol: &Tolerances) -> Result<Eigh> {
    check_square(a)?;
    let asym = max_asymmetry(a);
    if asym > tol.hermitian {
        return Err(Error::NotHermitian(asym));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(Eigh { values: vec![], vectors: CMatrix::zeros(0, 0) });
    }
    let se = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| se.eigenvectors[(r, order[k])]);
    Ok(Eigh { values, vectors })
}

/// `e^{−iHs} v`.
pub fn evolve(h: &CMatrix, s: f64, v: &CVector) -> Result<CVector> {
    if h.nrows() != v.len() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), found: v.len() });
    }
    Ok(herm_eig(h)?.evolve(s, v))
}

/// Largest `|λ|` of a Hermitian matrix.
pub fn hermitian_norm(a: &CMatrix) -> Result<f64> {
    let e = herm_eig(a)?;
    Ok(e.values.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// `A ⊗ B` with `A` as the high-order factor.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

/// Traces out every subsystem not listed in `keep`. Subsystem 0 is the
/// most significant factor of the index.
pub fn partial_trace(rho: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    check_square(rho)?;
    let total: usize = dims.iter().product();
    if total != rho.nrows() {
        return Err(Error::DimensionMismatch { expected: total, found: rho.nrows() });
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidParameter(format!("subsystem index out of range in {keep:?}")));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep_sorted.contains(i)).collect();
    let kd: Vec<usize> = keep_sorted.iter().map(|&i| dims[i]).collect();
    let td: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let kdim: usize = kd.iter().product();
    let tdim: usize = td.iter().product();

    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let offset = |idx: usize, which: &[usize], sizes: &[usize]| -> usize {
        let mut rem = idx;
        let mut off = 0;
        for (pos, &sys) in which.iter().enumerate().rev() {
            off += (rem % sizes[pos]) * strides[sys];
            rem /= sizes[pos];
        }
        off
    };
    let koff: Vec<usize> = (0..kdim).map(|a| offset(a, &keep_sorted, &kd)).collect();
    let toff: Vec<usize> = (0..tdim).map(|t| offset(t, &traced, &td)).collect();

    let mut out = CMatrix::zeros(kdim, kdim);
    for a in 0..kdim {
        for b in 0..kdim {
            let mut s = c(0.0);
            for &t in &toff {
                s += rho[(koff[a] + t, koff[b] + t)];
            }
            out[(a, b)] = s;
        }
    }
    Ok(out)
}

/// `½ Σ |eig(ρ − σ)|`.
pub fn trace_distance(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(Error::DimensionMismatch { expected: rho.nrows(), found: sigma.nrows() });
    }
    let diff = hermitian_part(&(rho - sigma));
    Ok(0.5 * herm_eig(&diff)?.values.iter().map(|v| v.abs()).sum::<f64>())
}

/// `⟨v|ρ|v⟩`.
pub fn fidelity_pure(v: &CVector, rho: &CMatrix) -> f64 {
    (v.adjoint() * rho * v)[(0, 0)].re
}

/// Eigen-decomposition of a unitary: phases in `(−π, π]` and eigenvectors.
///
/// Works on the commuting Hermitian pair `(U+U†)/2`, `(U−U†)/2i`: the first
/// fixes `cos φ`, the second splits each `cos φ` cluster by `sin φ`.
pub fn unitary_eig(u: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    check_square(u)?;
    let n = u.nrows();
    let defect = (u.adjoint() * u - CMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if defect > 1e-9 {
        return Err(Error::InvalidParameter(format!("matrix is not unitary (defect {defect:e})")));
    }
    let a = (u + u.adjoint()) * c(0.5);
    let b = (u - u.adjoint()) * C64::new(0.0, -0.5);
    let ea = herm_eig(&hermitian_part(&a))?;
    let mut phases = Vec::with_capacity(n);
    let mut vectors = CMatrix::zeros(n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && ea.values[end] - ea.values[end - 1] < 1e-8 {
            end += 1;
        }
        let q = ea.vectors.columns(start, end - start).into_owned();
        let bq = q.adjoint() * &b * &q;
        let eb = herm_eig(&hermitian_part(&bq))?;
        let cos_mean = ea.values[start..end].iter().sum::<f64>() / (end - start) as f64;
        for k in 0..end - start {
            let mut phi = eb.values[k].atan2(cos_mean);
            if phi <= -std::f64::consts::PI + 1e-12 {
                phi = std::f64::consts::PI;
            }
            phases.push(phi);
            vectors.set_column(start + k, &(&q * eb.vectors.column(k)));
        }
        start = end;
    }
    Ok((phases, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use lindff_check as check;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
        let a = CMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        hermitian_part(&a)
    }

    fn random_unit(rng: &mut impl Rng, n: usize) -> CVector {
        let v = CVector::from_fn(n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let nv = v.norm();
        v / c(nv)
    }

    fn pauli_x() -> CMatrix {
        check::pauli('X')
    }

    #[test]
    fn eigenvalues_ascending_and_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1, 2, 3, 5, 8, 16] {
            let h = random_hermitian(&mut rng, n);
            let e = herm_eig(&h).unwrap();
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            let back = e.map(c);
            assert!((back - &h).iter().all(|z| z.norm() < 1e-9));
        }
    }

    #[test]
    fn non_square_and_non_hermitian_rejected() {
        let a = CMatrix::zeros(2, 3);
        assert!(matches!(herm_eig(&a), Err(Error::NotSquare { .. })));
        let mut b = CMatrix::zeros(2, 2);
        b[(0, 1)] = c(1.0);
        match herm_eig(&b) {
            Err(Error::NotHermitian(x)) => assert!((x - 1.0).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tiny_asymmetry_is_symmetrized() {
        let mut a = check::pauli('Z');
        a[(0, 1)] = C64::new(1e-12, 0.0);
        let e = herm_eig(&a).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-10);
    }

    #[test]
    fn evolve_worked_values() {
        let v0 = StateVector::basis(2, 0).into_vector();
        let out = evolve(&pauli_x(), std::f64::consts::FRAC_PI_2, &v0).unwrap();
        assert!(out[0].norm() < 1e-14);
        assert!((out[1] - C64::new(0.0, -1.0)).norm() < 1e-14);

        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.0), c(1.0)]));
        let v1 = StateVector::basis(2, 1).into_vector();
        let out = evolve(&d, std::f64::consts::PI, &v1).unwrap();
        assert!((out[1] + c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn evolve_matches_taylor_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 4, 8] {
            let h = random_hermitian(&mut rng, n);
            let v = random_unit(&mut rng, n);
            let s = rng.random_range(-3.0..3.0);
            let direct = check::expm(&(&h * C64::new(0.0, -s))) * &v;
            let ours = evolve(&h, s, &v).unwrap();
            assert!((direct - ours).norm() < 1e-11);
        }
    }

    #[test]
    fn evolve_is_isometric_on_many_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst = 0.0f64;
        for case in 0..10_000 {
            let n = 1 + case % 4;
            let h = random_hermitian(&mut rng, n);
            let v = random_unit(&mut rng, n);
            let s = rng.random_range(-10.0..10.0);
            let out = evolve(&h, s, &v).unwrap();
            worst = worst.max((out.norm() - 1.0).abs());
        }
        assert!(worst < 1e-12, "worst isometry defect {worst:e}");
    }

    #[test]
    fn kron_order_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_hermitian(&mut rng, 2);
        let b = random_hermitian(&mut rng, 3);
        assert_eq!(kron(&a, &b), check::kron_naive(&a, &b));
    }

    #[test]
    fn partial_trace_of_product_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_unit(&mut rng, 2);
        let b = random_unit(&mut rng, 3);
        let ra = &a * a.adjoint();
        let rb = &b * b.adjoint();
        let joint = kron(&ra, &rb);
        let keep0 = partial_trace(&joint, &[2, 3], &[0]).unwrap();
        let keep1 = partial_trace(&joint, &[2, 3], &[1]).unwrap();
        assert!((keep0 - ra).norm() < 1e-14);
        assert!((keep1 - rb).norm() < 1e-14);
    }

    #[test]
    fn partial_trace_three_parties_middle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let vs: Vec<CVector> = [2, 3, 2].iter().map(|&n| random_unit(&mut rng, n)).collect();
        let rs: Vec<CMatrix> = vs.iter().map(|v| v * v.adjoint()).collect();
        let joint = kron(&kron(&rs[0], &rs[1]), &rs[2]);
        let outer = partial_trace(&joint, &[2, 3, 2], &[0, 2]).unwrap();
        assert!((outer - kron(&rs[0], &rs[2])).norm() < 1e-14);
    }

    #[test]
    fn trace_distance_worked_value() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.75), c(0.25)]));
        let b = DensityMatrix::maximally_mixed(2).into_matrix();
        assert!((trace_distance(&a, &b).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn fidelity_of_own_state_is_one() {
        let v = StateVector::uniform(4);
        let rho = DensityMatrix::from_pure(&v);
        assert!((fidelity_pure(v.as_vector(), rho.as_matrix()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_validation() {
        let bad = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.2), c(-0.2)]));
        assert!(DensityMatrix::new(bad).is_err());
        let bad_trace = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(bad_trace).is_err());
    }

    #[test]
    fn unitary_eig_recovers_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let h = random_hermitian(&mut rng, 6);
        let e = herm_eig(&h).unwrap();
        let u = e.propagator(-1.0);
        let (phases, vecs) = unitary_eig(&u).unwrap();
        let rebuilt = CMatrix::from_fn(6, 6, |i, j| {
            (0..6).map(|k| vecs[(i, k)] * C64::from_polar(1.0, phases[k]) * vecs[(j, k)].conj()).sum()
        });
        assert!((rebuilt - u).norm() < 1e-9);
    }

    proptest! {
        #[test]
        fn group_property(seed in any::<u64>(), s1 in -5.0f64..5.0, s2 in -5.0f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_hermitian(&mut rng, 3);
            let v = random_unit(&mut rng, 3);
            let two = evolve(&h, s2, &evolve(&h, s1, &v).unwrap()).unwrap();
            let one = evolve(&h, s1 + s2, &v).unwrap();
            prop_assert!((two - one).norm() < 1e-10);
        }

        #[test]
        fn trace_distance_is_a_metric(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let states: Vec<CMatrix> = (0..3).map(|_| {
                let v = random_unit(&mut rng, 3);
                &v * v.adjoint()
            }).collect();
            let d01 = trace_distance(&states[0], &states[1]).unwrap();
            let d12 = trace_distance(&states[1], &states[2]).unwrap();
            let d02 = trace_distance(&states[0], &states[2]).unwrap();
            prop_assert!(d02 <= d01 + d12 + 1e-12);
            prop_assert!((d01 - check::trace_distance_svd(&states[0], &states[1])).abs() < 1e-10);
        }
    }
}
