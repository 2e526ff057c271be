//! Hamiltonians with spectral bookkeeping, input parsing and Lindblad specs.
//!
//! A [`Hamiltonian`] stores its distinct eigenvalues `h_α` (clustered within
//! `Tolerances::cluster · ‖H‖`), an orthonormal basis and projector for each
//! eigenspace, and the affine [`SpectrumMap`] back to the units of the input
//! matrix. The stored matrix is exactly `Σ h_α Π_α`.

use crate::numkernel::{self, c, herm_eig_with, CMatrix, CVector, Eigh, StateVector, Tolerances, C64};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// `original = scale · h + shift`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMap {
    pub scale: f64,
    pub shift: f64,
}

impl SpectrumMap {
    pub const IDENTITY: SpectrumMap = SpectrumMap { scale: 1.0, shift: 0.0 };

    pub fn to_original(&self, h: f64) -> f64 {
        self.scale * h + self.shift
    }

    pub fn to_normalized(&self, x: f64) -> f64 {
        (x - self.shift) / self.scale
    }

    /// The map `x ↦ self(inner(x))`.
    pub fn compose(&self, inner: &SpectrumMap) -> SpectrumMap {
        SpectrumMap { scale: self.scale * inner.scale, shift: self.scale * inner.shift + self.shift }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFlags {
    /// Some eigenspace merged numerically distinct eigenvalues.
    pub clustered: bool,
    /// The input had zero spectral width and was mapped to the zero spectrum.
    pub constant: bool,
}

#[derive(Clone, Debug)]
pub struct Hamiltonian {
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
    bases: Vec<CMatrix>,
    projectors: Vec<CMatrix>,
    map: SpectrumMap,
    flags: SpectrumFlags,
}

impl Hamiltonian {
    /// Spectral bookkeeping without rescaling; eigenvalues keep the units
    /// of `m`.
    pub fn spectral(m: &CMatrix) -> Result<Self> {
        let eig = herm_eig_with(m, &Tolerances::DEFAULT)?;
        let tol = cluster_tolerance(&eig, &Tolerances::DEFAULT);
        Ok(Self::from_eigh(&eig, SpectrumMap::IDENTITY, tol, false))
    }

    /// `m` is already in the working frame; `map` records how to return to
    /// the caller's units.
    pub fn with_map(m: &CMatrix, map: SpectrumMap) -> Result<Self> {
        let mut h = Self::spectral(m)?;
        h.map = map;
        Ok(h)
    }

    fn from_eigh(eig: &Eigh, map: SpectrumMap, tol_normalized: f64, clamp_unit: bool) -> Self {
        let n = eig.values.len();
        let hs: Vec<f64> = eig.values.iter().map(|&l| map.to_normalized(l)).collect();
        let mut eigenvalues = Vec::new();
        let mut bases = Vec::new();
        let mut projectors = Vec::new();
        let mut clustered = false;
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && hs[end] - hs[end - 1] <= tol_normalized {
                end += 1;
            }
            if end - start > 1 {
                clustered = true;
            }
            let mut value = hs[start..end].iter().sum::<f64>() / (end - start) as f64;
            if clamp_unit {
                value = value.clamp(0.0, 1.0);
            }
            let basis = eig.vectors.columns(start, end - start).into_owned();
            projectors.push(&basis * basis.adjoint());
            bases.push(basis);
            eigenvalues.push(value);
            start = end;
        }
        let mut matrix = CMatrix::zeros(n, n);
        for (h, p) in eigenvalues.iter().zip(&projectors) {
            matrix += p * c(*h);
        }
        Hamiltonian {
            matrix,
            eigenvalues,
            bases,
            projectors,
            map,
            flags: SpectrumFlags { clustered, constant: false },
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `Σ h_α Π_α` in the working frame.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Distinct eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    /// Orthonormal columns spanning each eigenspace.
    pub fn bases(&self) -> &[CMatrix] {
        &self.bases
    }

    pub fn spectrum_map(&self) -> SpectrumMap {
        self.map
    }

    pub fn flags(&self) -> SpectrumFlags {
        self.flags
    }

    /// `max |h_α|`.
    pub fn norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, h| m.max(h.abs()))
    }

    /// Every eigenvector with its (clustered) eigenvalue.
    pub fn eigh(&self) -> Eigh {
        let n = self.dim();
        let mut values = Vec::with_capacity(n);
        let mut vectors = CMatrix::zeros(n, n);
        let mut col = 0;
        for (h, b) in self.eigenvalues.iter().zip(&self.bases) {
            for k in 0..b.ncols() {
                vectors.set_column(col, &b.column(k));
                values.push(*h);
                col += 1;
            }
        }
        Eigh { values, vectors }
    }

    /// `e^{−iHs}`.
    pub fn propagator(&self, s: f64) -> CMatrix {
        let mut u = CMatrix::zeros(self.dim(), self.dim());
        for (h, p) in self.eigenvalues.iter().zip(&self.projectors) {
            u += p * C64::from_polar(1.0, -h * s);
        }
        u
    }

    /// `e^{−iHs} v`.
    pub fn evolve(&self, s: f64, v: &CVector) -> CVector {
        let mut out = CVector::zeros(v.len());
        for (h, b) in self.eigenvalues.iter().zip(&self.bases) {
            let coeff = b.adjoint() * v;
            out += b * coeff * C64::from_polar(1.0, -h * s);
        }
        out
    }
}

fn cluster_tolerance(eig: &Eigh, tol: &Tolerances) -> f64 {
    let norm = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    tol.cluster * norm.max(f64::MIN_POSITIVE)
}

/// Affine map of the spectrum into `[0, 1]`, applied only when the spectrum
/// leaves that interval.
pub fn normalize_spectrum(m: &CMatrix) -> Result<Hamiltonian> {
    normalize_spectrum_with(m, &Tolerances::DEFAULT)
}

pub fn normalize_spectrum_with(m: &CMatrix, tol: &Tolerances) -> Result<Hamiltonian> {
    let eig = herm_eig_with(m, tol)?;
    if eig.values.is_empty() {
        return Err(Error::InvalidParameter("empty Hamiltonian".into()));
    }
    let ctol = cluster_tolerance(&eig, tol);
    let lo = eig.values[0];
    let hi = *eig.values.last().unwrap();
    let slack = 1e-12;
    if lo >= -slack && hi <= 1.0 + slack {
        return Ok(Hamiltonian::from_eigh(&eig, SpectrumMap::IDENTITY, ctol, true));
    }
    if hi - lo <= ctol {
        let mean = eig.values.iter().sum::<f64>() / eig.values.len() as f64;
        let map = SpectrumMap { scale: 1.0, shift: mean };
        let mut h = Hamiltonian::from_eigh(&eig, map, f64::INFINITY, false);
        h.eigenvalues = vec![0.0];
        h.matrix = CMatrix::zeros(h.dim(), h.dim());
        h.flags.constant = true;
        return Ok(h);
    }
    let map = SpectrumMap { scale: hi - lo, shift: lo };
    Ok(Hamiltonian::from_eigh(&eig, map, ctol / (hi - lo), true))
}

/// `min_{α≠β} |h_α − h_β|`.
pub fn spectral_gap(h: &Hamiltonian, beta: usize) -> Result<f64> {
    let ev = h.eigenvalues();
    if ev.len() < 2 {
        return Err(Error::UndefinedGap);
    }
    let hb = *ev.get(beta).ok_or_else(|| Error::InvalidParameter(format!("eigenspace {beta} out of range")))?;
    Ok(ev
        .iter()
        .enumerate()
        .filter(|(a, _)| *a != beta)
        .map(|(_, h)| (h - hb).abs())
        .fold(f64::INFINITY, f64::min))
}

/// Moves `h_β` to 0 and rescales so that `max |h_α| = 1`.
///
/// When `β` is the lowest eigenvalue the result lies in `[0, 1]`; otherwise
/// it lies in `[−1, 1]`.
pub fn shift_to_zero(h: &Hamiltonian, beta: usize) -> Result<Hamiltonian> {
    let ev = h.eigenvalues();
    if ev.len() < 2 {
        return Err(Error::UndefinedGap);
    }
    let hb = *ev.get(beta).ok_or_else(|| Error::InvalidParameter(format!("eigenspace {beta} out of range")))?;
    let span = ev.iter().fold(0.0f64, |m, x| m.max((x - hb).abs()));
    let inner = SpectrumMap { scale: span, shift: hb };
    let mut out = h.clone();
    out.eigenvalues = ev.iter().map(|x| inner.to_normalized(*x)).collect();
    out.eigenvalues[beta] = 0.0;
    out.map = h.map.compose(&inner);
    let n = h.dim();
    out.matrix = CMatrix::zeros(n, n);
    for (x, p) in out.eigenvalues.iter().zip(&out.projectors) {
        out.matrix += p * c(*x);
    }
    Ok(out)
}

/// `[[0, F†], [F, 0]]`.
pub fn dilate(f: &CMatrix) -> Result<CMatrix> {
    if f.nrows() != f.ncols() {
        return Err(Error::NotSquare { rows: f.nrows(), cols: f.ncols() });
    }
    let d = f.nrows();
    let mut out = CMatrix::zeros(2 * d, 2 * d);
    out.view_mut((0, d), (d, d)).copy_from(&f.adjoint());
    out.view_mut((d, 0), (d, d)).copy_from(f);
    Ok(out)
}

/// A state written as `Σ_α c_α |ψ_α⟩` over the eigenspaces of a Hamiltonian.
#[derive(Clone, Debug)]
pub struct SpectralState {
    amplitudes: Vec<f64>,
    components: Vec<CVector>,
    vector: CVector,
}

impl SpectralState {
    /// `|c_α|`, with any phase carried by the component vector.
    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn weights(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a * a).collect()
    }

    /// Normalized `|ψ_α⟩`; zero when `c_α = 0`.
    pub fn components(&self) -> &[CVector] {
        &self.components
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    /// Builds `Σ c_α |b_α⟩` from the first basis vector `|b_α⟩` of each
    /// eigenspace.
    pub fn from_amplitudes(h: &Hamiltonian, coeffs: &[C64]) -> Result<Self> {
        if coeffs.len() != h.eigenvalues().len() {
            return Err(Error::DimensionMismatch { expected: h.eigenvalues().len(), found: coeffs.len() });
        }
        let mut v = CVector::zeros(h.dim());
        for (cf, b) in coeffs.iter().zip(h.bases()) {
            v += b.column(0) * *cf;
        }
        decompose_state(h, &StateVector::new(v)?)
    }
}

pub fn decompose_state(h: &Hamiltonian, v: &StateVector) -> Result<SpectralState> {
    let v = v.as_vector();
    if v.len() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: v.len() });
    }
    let mut amplitudes = Vec::new();
    let mut components = Vec::new();
    for b in h.bases() {
        let part = b * (b.adjoint() * v);
        let a = part.norm();
        amplitudes.push(a);
        components.push(if a > 0.0 { part / c(a) } else { part });
    }
    Ok(SpectralState { amplitudes, components, vector: v.clone() })
}

/// Hermitian jump operators, each with `‖H_i‖ ≤ 1`.
#[derive(Clone, Debug)]
pub struct LindbladSpec {
    jumps: Vec<CMatrix>,
}

impl LindbladSpec {
    pub fn new(jumps: Vec<CMatrix>) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        let first = jumps.first().ok_or_else(|| Error::InvalidParameter("no jump operators".into()))?;
        let dim = first.nrows();
        for j in &jumps {
            if j.nrows() != j.ncols() {
                return Err(Error::NotSquare { rows: j.nrows(), cols: j.ncols() });
            }
            if j.nrows() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: j.nrows() });
            }
            let norm = numkernel::hermitian_norm(j)?;
            if norm > 1.0 + tol.jump_norm {
                return Err(Error::JumpNorm(norm));
            }
        }
        Ok(LindbladSpec { jumps: jumps.iter().map(numkernel::hermitian_part).collect() })
    }

    pub fn jumps(&self) -> &[CMatrix] {
        &self.jumps
    }

    pub fn dim(&self) -> usize {
        self.jumps[0].nrows()
    }
}

/// Splits `F` into `F/‖F‖` and the time factor `‖F‖²`, using
/// `L_{cF} = c² L_F`.
pub fn normalize_jump(f: &CMatrix) -> Result<(CMatrix, f64)> {
    let norm = numkernel::hermitian_norm(f)?;
    if norm == 0.0 {
        return Ok((f.clone(), 1.0));
    }
    Ok((f / c(norm), norm * norm))
}

pub fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(values.len(), values.iter().map(|&v| c(v))))
}

/// Single-qubit Pauli matrix for `I`, `X`, `Y` or `Z`.
pub fn pauli(label: char) -> Option<CMatrix> {
    let o = c(0.0);
    let l = c(1.0);
    let i = C64::new(0.0, 1.0);
    Some(match label {
        'I' => CMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        'X' => CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        'Y' => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        'Z' => CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        _ => return None,
    })
}

/// Tensor product of Paulis; the first letter is the most significant qubit.
pub fn pauli_string(s: &str) -> Option<CMatrix> {
    let mut out = CMatrix::identity(1, 1);
    for ch in s.chars() {
        out = numkernel::kron(&out, &pauli(ch)?);
    }
    Some(out)
}

/// Parses lines of `coefficient PauliString`; `#` starts a comment.
pub fn from_pauli_sum(text: &str) -> Result<CMatrix> {
    let mut acc: Option<CMatrix> = None;
    let mut width = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let parts: Vec<&str> = body.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(Error::Parse { line, msg: format!("expected `coefficient PauliString`, got {body:?}") });
        }
        let coef: f64 = match parts[0].parse() {
            Ok(x) => x,
            Err(_) if looks_complex(parts[0]) => {
                return Err(Error::Parse { line, msg: format!("non-real coefficient {:?}", parts[0]) })
            }
            Err(_) => return Err(Error::Parse { line, msg: format!("malformed coefficient {:?}", parts[0]) }),
        };
        let label = parts[1];
        let term = pauli_string(label)
            .ok_or_else(|| Error::Parse { line, msg: format!("unknown Pauli label in {label:?}") })?;
        if acc.is_none() {
            width = label.len();
        } else if label.len() != width {
            return Err(Error::Parse { line, msg: format!("expected {width} qubits, got {}", label.len()) });
        }
        let scaled = term * c(coef);
        acc = Some(match acc {
            Some(a) => a + scaled,
            None => scaled,
        });
    }
    acc.ok_or(Error::Parse { line: 0, msg: "no terms".into() })
}

fn looks_complex(tok: &str) -> bool {
    let t = tok.trim_end_matches(['i', 'j']);
    t.len() < tok.len() && (t.is_empty() || t.parse::<f64>().is_ok() || t.contains(['+', '-']))
}

/// Parses one matrix row per line, entries written as `re,im`.
pub fn from_dense_text(text: &str) -> Result<CMatrix> {
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for tok in body.split_whitespace() {
            let (re, im) = tok
                .split_once(',')
                .ok_or_else(|| Error::Parse { line, msg: format!("entry {tok:?} is not `re,im`") })?;
            let re: f64 = re.parse().map_err(|_| Error::Parse { line, msg: format!("bad real part {re:?}") })?;
            let im: f64 = im.parse().map_err(|_| Error::Parse { line, msg: format!("bad imaginary part {im:?}") })?;
            row.push(C64::new(re, im));
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse { line, msg: format!("row has {} entries, expected {}", row.len(), first.len()) });
            }
        }
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse { line: 0, msg: "no rows".into() });
    }
    if rows[0].len() != n {
        return Err(Error::NotSquare { rows: n, cols: rows[0].len() });
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn to_dense_text(m: &CMatrix) -> String {
    let mut s = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{},{}", m[(i, j)].re, m[(i, j)].im)).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(seed: u64, n: usize, scale: f64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
        });
        numkernel::hermitian_part(&a)
    }

    #[test]
    fn pauli_sum_two_qubits() {
        let m = from_pauli_sum("0.5 XX\n0.5 ZZ").unwrap();
        assert_eq!(m.nrows(), 4);
        for i in 0..4 {
            for j in 0..4 {
                let v = m[(i, j)];
                assert!(v.im == 0.0);
                assert!(v.re == 0.0 || (v.re.abs() - 0.5).abs() < 1e-15);
            }
        }
        assert_eq!(m[(0, 0)].re, 0.5);
        assert_eq!(m[(1, 1)].re, -0.5);
        assert_eq!(m[(0, 3)].re, 0.5);
    }

    #[test]
    fn pauli_sum_errors_name_the_line() {
        assert_eq!(
            from_pauli_sum("1.0 Q"),
            Err(Error::Parse { line: 1, msg: "unknown Pauli label in \"Q\"".into() })
        );
        match from_pauli_sum("# header\n0.5 Z\n1+2i X") {
            Err(Error::Parse { line: 3, msg }) => assert!(msg.contains("non-real")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(from_pauli_sum("0.5 Z\n0.5 ZZ"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(from_pauli_sum("abc X"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn dense_text_round_trip() {
        let m = random_hermitian(2, 3, 1.0);
        let back = from_dense_text(&to_dense_text(&m)).unwrap();
        assert_eq!(m, back);
        assert!(matches!(from_dense_text("1,0 0,0\n0,0"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn normalize_pm_two() {
        let h = normalize_spectrum(&diag(&[-2.0, 2.0])).unwrap();
        assert_eq!(h.eigenvalues(), &[0.0, 1.0]);
        assert_eq!(h.spectrum_map(), SpectrumMap { scale: 4.0, shift: -2.0 });
    }

    #[test]
    fn normalize_leaves_unit_interval_alone() {
        let h = normalize_spectrum(&diag(&[0.0, 0.25, 1.0])).unwrap();
        assert_eq!(h.spectrum_map(), SpectrumMap::IDENTITY);
        assert_eq!(h.eigenvalues(), &[0.0, 0.25, 1.0]);
    }

    #[test]
    fn constant_hamiltonian_maps_to_zero_spectrum() {
        let h = normalize_spectrum(&diag(&[3.0, 3.0])).unwrap();
        assert_eq!(h.eigenvalues(), &[0.0]);
        assert!(h.flags().constant);
        assert_eq!(h.spectrum_map().to_original(0.0), 3.0);
    }

    #[test]
    fn near_degenerate_eigenvalues_cluster() {
        let h = normalize_spectrum(&diag(&[0.0, 0.5, 0.5 + 1e-12, 1.0])).unwrap();
        assert_eq!(h.eigenvalues().len(), 3);
        assert!(h.flags().clustered);
        assert_eq!(h.bases()[1].ncols(), 2);
    }

    #[test]
    fn gap_and_shift() {
        let h = Hamiltonian::spectral(&diag(&[0.3, 0.6])).unwrap();
        assert!((spectral_gap(&h, 0).unwrap() - 0.3).abs() < 1e-15);
        let s = shift_to_zero(&h, 0).unwrap();
        assert_eq!(s.eigenvalues(), &[0.0, 1.0]);
        assert!((s.spectrum_map().to_original(1.0) - 0.6).abs() < 1e-15);

        let unit = Hamiltonian::spectral(&diag(&[0.0, 0.3, 1.0])).unwrap();
        assert_eq!(shift_to_zero(&unit, 0).unwrap().eigenvalues(), unit.eigenvalues());

        let single = Hamiltonian::spectral(&diag(&[0.5, 0.5])).unwrap();
        assert_eq!(spectral_gap(&single, 0), Err(Error::UndefinedGap));
        assert!(matches!(shift_to_zero(&single, 0), Err(Error::UndefinedGap)));
    }

    #[test]
    fn decomposition_reassembles() {
        let m = random_hermitian(4, 4, 1.0);
        let h = normalize_spectrum(&m).unwrap();
        let v = StateVector::uniform(4);
        let s = decompose_state(&h, &v).unwrap();
        let mut back = CVector::zeros(4);
        for (a, comp) in s.amplitudes().iter().zip(s.components()) {
            back += comp * c(*a);
        }
        assert!((back - v.as_vector()).norm() < 1e-12);
        assert!((s.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jump_norm_is_enforced() {
        assert!(matches!(LindbladSpec::new(vec![diag(&[0.0, 1.5])]), Err(Error::JumpNorm(_))));
        assert!(LindbladSpec::new(vec![diag(&[0.0, 1.0 + 1e-12])]).is_ok());
        let (f, k) = normalize_jump(&diag(&[0.0, 2.0])).unwrap();
        assert_eq!(k, 4.0);
        assert_eq!(f, diag(&[0.0, 1.0]));
    }

    proptest! {
        #[test]
        fn reconstruction_and_range(seed in any::<u64>(), n in 1usize..6, scale in 0.1f64..5.0) {
            let m = random_hermitian(seed, n, scale);
            let h = normalize_spectrum(&m).unwrap();
            prop_assert!(h.eigenvalues().iter().all(|x| (0.0..=1.0).contains(x)));
            let p_sum = h.projectors().iter().fold(CMatrix::zeros(n, n), |a, p| a + p);
            prop_assert!((p_sum - CMatrix::identity(n, n)).norm() < 1e-9);
            let map = h.spectrum_map();
            let back = h.matrix() * c(map.scale) + CMatrix::identity(n, n) * c(map.shift);
            let norm = numkernel::hermitian_norm(&m).unwrap().max(1e-300);
            prop_assert!((back - &m).norm() <= 1e-9 * norm.max(1.0));
        }

        #[test]
        fn map_round_trip(scale in 0.1f64..10.0, shift in -5.0f64..5.0, x in -3.0f64..3.0) {
            let map = SpectrumMap { scale, shift };
            prop_assert!((map.to_original(map.to_normalized(x)) - x).abs() < 1e-12);
        }

        #[test]
        fn dilation_squares_to_block_diagonal(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = CMatrix::from_fn(3, 3, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let d = dilate(&f).unwrap();
            let sq = &d * &d;
            let fd = f.adjoint();
            prop_assert!((sq.view((0, 0), (3, 3)) - &fd * &f).norm() < 1e-12);
            prop_assert!((sq.view((3, 3), (3, 3)) - &f * &fd).norm() < 1e-12);
            prop_assert!(sq.view((0, 3), (3, 3)).norm() < 1e-12);
        }
    }
}
