//! Register states: binomial amplitudes, periodic discrete Gaussians and the
//! recursive (Kitaev–Webb) angle schedule that synthesizes the latter.
//!
//! The periodic discrete Gaussian on `N` points is
//! `ξ²(m) = Σ_l exp(−(m + lN − μ)²/(2σ²)) / f(μ, σ)` with the normalizer
//! `f(μ, σ) = Σ_k exp(−(k − μ)²/(2σ²))`.

use crate::concentration::ln_binomial_pmf;
use crate::{Error, Result};
use std::f64::consts::PI;

/// Below this width `f` is summed on the lattice; at and above it the
/// Poisson-resummed theta series is used.
pub const THETA_MIN_SIGMA: f64 = 0.1;

/// Largest register accepted by [`kw_angle_schedule`].
pub const KW_CAP: usize = 1 << 16;

/// `a_m = √(C(N,m)) / 2^{N/2}` for `m = 0..=N`.
pub fn binomial_amplitudes(n: u64) -> Vec<f64> {
    (0..=n).map(|m| (0.5 * ln_binomial_pmf(n, m, 0.5)).exp()).collect()
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    Ok(())
}

/// `f(μ, σ) = √(2πσ²) (1 + 2 Σ_{l≥1} cos(2πlμ) e^{−2π²l²σ²})`.
pub fn f_mu_sigma(mu: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if sigma < THETA_MIN_SIGMA {
        return Ok(lattice_sum(mu, sigma));
    }
    let mut s = 1.0;
    for l in 1.. {
        let env = (-2.0 * PI * PI * (l * l) as f64 * sigma * sigma).exp();
        if env < 1e-16 {
            break;
        }
        s += 2.0 * (2.0 * PI * l as f64 * mu).cos() * env;
    }
    Ok((2.0 * PI * sigma * sigma).sqrt() * s)
}

fn lattice_sum(mu: f64, sigma: f64) -> f64 {
    ln_lattice_sum(mu, sigma).exp()
}

/// `ln f` on the lattice, relative to the nearest term so that narrow
/// Gaussians centred between lattice points do not underflow.
fn ln_lattice_sum(mu: f64, sigma: f64) -> f64 {
    let k0 = mu.round();
    let e0 = (k0 - mu).powi(2) / (2.0 * sigma * sigma);
    let rel = |k: f64| (e0 - (k - mu).powi(2) / (2.0 * sigma * sigma)).exp();
    let mut s = 1.0;
    for j in 1.. {
        let a = rel(k0 + j as f64);
        let b = rel(k0 - j as f64);
        s += a + b;
        if a + b <= 1e-18 * s {
            break;
        }
    }
    s.ln() - e0
}

fn ln_f_mu_sigma(mu: f64, sigma: f64) -> Result<f64> {
    if sigma < THETA_MIN_SIGMA {
        check_sigma(sigma)?;
        return Ok(ln_lattice_sum(mu, sigma));
    }
    Ok(f_mu_sigma(mu, sigma)?.ln())
}

/// `ξ(m)` for `m = 0..N`.
pub fn discrete_gaussian_amplitudes(n: usize, mu: f64, sigma: f64) -> Result<Vec<f64>> {
    check_sigma(sigma)?;
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    // Each term is divided by f inside the exponent so that narrow Gaussians
    // centred between lattice points stay finite.
    let ln_f = ln_f_mu_sigma(mu, sigma)?;
    let nf = n as f64;
    let term = |m: f64, l: f64| (-(m + l * nf - mu).powi(2) / (2.0 * sigma * sigma) - ln_f).exp();
    Ok((0..n)
        .map(|m| {
            let m = m as f64;
            let l0 = ((mu - m) / nf).round();
            let mut s = term(m, l0);
            for j in 1.. {
                let a = term(m, l0 + j as f64);
                let b = term(m, l0 - j as f64);
                s += a + b;
                if a + b <= 1e-18 * s || (s == 0.0 && j > 4) {
                    break;
                }
            }
            s.sqrt()
        })
        .collect())
}

/// Rotation angles of the recursive preparation of `ξ_{σ,μ,N}`, `N = 2^d`.
///
/// Level `j` decides bit `j` of `m` (bit 0 is the least significant and is
/// decided first). Node `k` of level `j` is reached by the lower bits
/// `k = m mod 2^j`, and its angle is `arccos √(f(μ′/2, σ′/2)/f(μ′, σ′))` for
/// the parameters `μ′ = (μ′_parent − b)/2`, `σ′ = σ/2^j` reached on that path.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleSchedule {
    levels: Vec<Vec<f64>>,
}

impl AngleSchedule {
    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    pub fn root(&self) -> f64 {
        self.levels[0][0]
    }

    /// Amplitudes produced by replaying the schedule.
    pub fn synthesize(&self) -> Vec<f64> {
        let d = self.levels.len();
        (0..1usize << d)
            .map(|m| {
                (0..d)
                    .map(|j| {
                        let alpha = self.levels[j][m & ((1 << j) - 1)];
                        if (m >> j) & 1 == 0 {
                            alpha.cos()
                        } else {
                            alpha.sin()
                        }
                    })
                    .product()
            })
            .collect()
    }
}

pub fn kw_angle_schedule(n: usize, mu: f64, sigma: f64) -> Result<AngleSchedule> {
    check_sigma(sigma)?;
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("N = {n} must be a power of two, at least 2")));
    }
    if n > KW_CAP {
        return Err(Error::Cap { what: "angle schedule register", size: n, cap: KW_CAP });
    }
    let d = n.trailing_zeros() as usize;
    let mut levels = Vec::with_capacity(d);
    let mut mus = vec![mu];
    let mut s = sigma;
    for _ in 0..d {
        let mut angles = Vec::with_capacity(mus.len());
        for &m in &mus {
            let ratio = (ln_f_mu_sigma(m / 2.0, s / 2.0)? - ln_f_mu_sigma(m, s)?).exp();
            if !(-1e-12..=1.0 + 1e-12).contains(&ratio) {
                return Err(Error::NumericalGuard(format!(
                    "normalizer ratio {ratio} outside [0, 1] at mu = {m}, sigma = {s}"
                )));
            }
            angles.push(ratio.clamp(0.0, 1.0).sqrt().acos());
        }
        levels.push(angles);
        // Children of node k: bit 0 → index k, bit 1 → index k + 2^j.
        let next: Vec<f64> = mus.iter().map(|m| m / 2.0).chain(mus.iter().map(|m| (m - 1.0) / 2.0)).collect();
        mus = next;
        s /= 2.0;
    }
    Ok(AngleSchedule { levels })
}

/// `‖a − ξ‖₂` over `m ∈ [0, N−1]` between the binomial amplitudes and the
/// discrete Gaussian with `μ = N/2`, `σ = √N/2`.
pub fn binomial_gaussian_distance(n: u64) -> Result<f64> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!("N = {n} must be even and at least 2")));
    }
    let a = binomial_amplitudes(n);
    let xi = discrete_gaussian_amplitudes(n as usize, n as f64 / 2.0, (n as f64).sqrt() / 2.0)?;
    Ok(xi.iter().zip(&a).map(|(x, b)| (x - b).powi(2)).sum::<f64>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use lindff_check as check;
    use proptest::prelude::*;

    #[test]
    fn binomial_amplitudes_are_normalized() {
        let a = binomial_amplitudes(1000);
        assert!((a.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        let small = binomial_amplitudes(2);
        assert!((small[1] - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn normalizer_worked_value() {
        let f = f_mu_sigma(8.0, 2.0).unwrap();
        assert!((f - 5.01326).abs() < 5e-6);
        assert!((f - (8.0 * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn normalizer_matches_lattice_sum() {
        for &(mu, sigma) in &[(0.0, 0.1), (0.5, 0.1), (0.3, 0.25), (3.7, 1.3), (0.5, 0.05), (0.25, 0.02)] {
            let ours = f_mu_sigma(mu, sigma).unwrap();
            let direct = check::lattice_f(mu, sigma);
            assert!((ours - direct).abs() <= 1e-11 * direct, "{mu} {sigma}: {ours} vs {direct}");
        }
    }

    #[test]
    fn peak_amplitude() {
        let xi = discrete_gaussian_amplitudes(16, 8.0, 2.0).unwrap();
        let want = (1.0 / f_mu_sigma(8.0, 2.0).unwrap()).sqrt();
        assert!((xi[8] - want).abs() < 1e-12);
        assert!((xi[8] - 0.446622).abs() < 1e-6);
    }

    #[test]
    fn root_angle_is_quarter_turn() {
        let s = kw_angle_schedule(16, 8.0, 2.0).unwrap();
        assert!((s.root() - PI / 4.0).abs() < 1e-6);
    }

    #[test]
    fn schedule_replays_direct_amplitudes() {
        for &(n, mu, sigma) in &[(2usize, 1.0, 0.7), (8, 4.0, 1.0), (16, 8.0, 2.0), (32, 13.3, 3.1), (64, 32.0, 4.0)] {
            let s = kw_angle_schedule(n, mu, sigma).unwrap();
            let synth = s.synthesize();
            let direct = discrete_gaussian_amplitudes(n, mu, sigma).unwrap();
            let gap = synth.iter().zip(&direct).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            assert!(gap < 1e-8, "N = {n}: {gap:e}");
        }
    }

    #[test]
    fn narrow_off_lattice_gaussian_stays_finite() {
        // σ/2^j underflows the plain lattice sum long before the last level.
        let s = kw_angle_schedule(64, 0.0, 0.3).unwrap();
        assert!(s.levels().iter().flatten().all(|a| a.is_finite()));
        let direct = discrete_gaussian_amplitudes(64, 0.0, 0.3).unwrap();
        let gap = s.synthesize().iter().zip(&direct).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(gap < 1e-8, "{gap:e}");
        let xi = discrete_gaussian_amplitudes(4, 1.5, 0.01).unwrap();
        assert!((xi.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((xi[1] - xi[2]).abs() < 1e-12);
    }

    #[test]
    fn distance_rejects_odd_n() {
        assert!(binomial_gaussian_distance(63).is_err());
        assert!(binomial_gaussian_distance(64).unwrap() < 0.01);
    }

    proptest! {
        #[test]
        fn gaussian_is_normalized(n in 1usize..200, mu in -5.0f64..205.0, sigma in 0.05f64..40.0) {
            let xi = discrete_gaussian_amplitudes(n, mu, sigma).unwrap();
            prop_assert!((xi.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }
}
