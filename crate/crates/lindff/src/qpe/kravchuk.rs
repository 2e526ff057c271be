//! The N-fold Hadamard restricted to the symmetric sector, in the Dicke count
//! basis.
//!
//! `U_D[m, k] = ⟨m̄|H^{⊗N}|k̄⟩`. Row `m` is the X-basis Dicke state with `m`
//! minus signs written in the Z-basis Dicke states, i.e. the eigenvector of
//! the collective operator `Σ X_i` (tridiagonal, off-diagonal
//! `√((k+1)(N−k))`) with eigenvalue `N − 2m`. Its end entries are known in
//! closed form, `U_D[m, 0] = 2^{−N/2}√C(N,m)` and `U_D[m, N] = (−1)^m U_D[m, 0]`,
//! so each row follows from the three-term recurrence run inward from both
//! ends. Inward runs move from the decaying edge regions toward the
//! oscillatory middle and are stable; scaling is carried in the log domain.

use crate::concentration::ln_choose;
use crate::{Error, Result};
use nalgebra::DMatrix;

/// Largest `N` accepted by default.
pub const KRAVCHUK_CAP: u64 = 4096;

fn check_cap(n: u64, cap: u64) -> Result<()> {
    if n > cap {
        return Err(Error::Cap { what: "Kravchuk transform size N", size: n as usize, cap: cap as usize });
    }
    Ok(())
}

/// Runs `φ_{k+1} = (Eφ_k − b_k φ_{k−1}) / b_{k+1}` from `φ_start = 1`,
/// writing `ln|φ|`-scaled values into `out` and returning them relative to
/// the starting entry. `b(k) = √(k(N−k+1))` couples `k−1` and `k`.
fn run(n: u64, e: f64, ks: impl Iterator<Item = u64>, forward: bool, out: &mut [f64], log_scale: f64) {
    let b = |k: u64| ((k * (n + 1 - k)) as f64).sqrt();
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut ln_s = log_scale;
    let mut first = true;
    let mut last_k = 0u64;
    for k in ks {
        if first {
            out[k as usize] = ln_s.exp();
            first = false;
            last_k = k;
            continue;
        }
        // Step from last_k to k.
        let next = if forward {
            (e * cur - b(last_k) * prev) / b(last_k + 1)
        } else {
            (e * cur - b(last_k + 1) * prev) / b(last_k)
        };
        prev = cur;
        cur = next;
        let mag = cur.abs();
        if mag > 1e100 || (mag < 1e-100 && mag > 0.0) {
            let l = mag.ln();
            ln_s += l;
            prev /= mag;
            cur /= mag;
        }
        out[k as usize] = cur * ln_s.exp();
        last_k = k;
    }
}

/// Row `m` of `U_D`.
pub fn kravchuk_row(n: u64, m: u64) -> Vec<f64> {
    assert!(m <= n);
    let mut row = vec![0.0; n as usize + 1];
    let e = n as f64 - 2.0 * m as f64;
    let ln_end = 0.5 * (ln_choose(n, m) - n as f64 * std::f64::consts::LN_2);
    let half = n / 2;
    run(n, e, 0..=half, true, &mut row, ln_end);
    let mut tail = vec![0.0; n as usize + 1];
    run(n, e, (half + 1..=n).rev(), false, &mut tail, ln_end);
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    for k in half + 1..=n {
        row[k as usize] = sign * tail[k as usize];
    }
    row
}

/// Dense `U_D` for `N ≤ KRAVCHUK_CAP`.
pub fn kravchuk_unitary(n: u64) -> Result<DMatrix<f64>> {
    kravchuk_unitary_with_cap(n, KRAVCHUK_CAP)
}

pub fn kravchuk_unitary_with_cap(n: u64, cap: u64) -> Result<DMatrix<f64>> {
    check_cap(n, cap)?;
    let size = n as usize + 1;
    let mut u = DMatrix::zeros(size, size);
    for m in 0..=n {
        for (k, v) in kravchuk_row(n, m).into_iter().enumerate() {
            u[(m as usize, k)] = v;
        }
    }
    Ok(u)
}

pub(crate) fn check_kravchuk_cap(n: u64) -> Result<()> {
    check_cap(n, KRAVCHUK_CAP).map_err(|_| {
        Error::InvalidParameter(format!(
            "N = {n} exceeds the Kravchuk cap {KRAVCHUK_CAP}; use slow_qpe for the exact distribution at this N"
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use lindff_check as check;

    fn unitarity_defect(u: &DMatrix<f64>) -> f64 {
        let p = u.transpose() * u;
        (p - DMatrix::identity(u.nrows(), u.nrows())).abs().max()
    }

    #[test]
    fn small_cases() {
        let s = 0.5f64.sqrt();
        let u1 = kravchuk_unitary(1).unwrap();
        assert!((u1 - DMatrix::from_row_slice(2, 2, &[s, s, s, -s])).abs().max() < 1e-15);
        let u2 = kravchuk_unitary(2).unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[0.5, s, 0.5, s, 0.0, -s, 0.5, -s, 0.5]);
        assert!((u2 - want).abs().max() < 1e-15);
    }

    #[test]
    fn matches_dense_dicke_contraction() {
        for n in 1..=12u32 {
            let ours = kravchuk_unitary(n as u64).unwrap();
            let dense = check::dicke_hadamard(n);
            assert!((ours - dense).abs().max() < 1e-9, "N = {n}");
        }
    }

    #[test]
    fn symmetric_and_orthogonal_across_sizes() {
        for n in [13u64, 64, 257, 1000, 2048] {
            let u = kravchuk_unitary(n).unwrap();
            assert!((&u - u.transpose()).abs().max() < 1e-8, "N = {n}");
            assert!(unitarity_defect(&u) < 1e-8, "N = {n}");
        }
    }

    #[test]
    fn largest_size_is_orthogonal() {
        let u = kravchuk_unitary(KRAVCHUK_CAP).unwrap();
        assert!(unitarity_defect(&u) < 1e-8);
        assert!((&u - u.transpose()).abs().max() < 1e-8);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(kravchuk_unitary(KRAVCHUK_CAP + 1), Err(Error::Cap { .. })));
        assert!(kravchuk_unitary_with_cap(20, 10).is_err());
    }
}
