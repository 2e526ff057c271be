//! Binomial tails and the concentration bounds used by the analysis.
//!
//! Binomial probabilities are evaluated in the log domain with Loader's
//! saddle-point decomposition (Stirling remainders plus the deviance
//! `bd0`), which stays accurate far into the tails and for `N` in the
//! millions.

use crate::{Error, Result};
use std::f64::consts::PI;

/// `ln n! − [(n+½) ln n − n + ½ ln 2π]`.
fn stirlerr(n: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15.0 {
        let k = n as u64;
        let ln_fact: f64 = (2..=k).map(|i| (i as f64).ln()).sum();
        return ln_fact - ((n + 0.5) * n.ln() - n + 0.5 * (2.0 * PI).ln());
    }
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// `x ln(x/np) + np − x`, evaluated without cancellation near `x = np`.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / np).ln() + np - x
    }
}

/// `ln [C(n,k) p^k (1−p)^{n−k}]`; `−∞` for impossible outcomes.
pub fn ln_binomial_pmf(n: u64, k: u64, p: f64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let q = 1.0 - p;
    if p == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let (nf, kf) = (n as f64, k as f64);
    if k == 0 {
        if n == 0 {
            return 0.0;
        }
        return if p < 0.1 { -bd0(nf, nf * q) - nf * p } else { nf * q.ln() };
    }
    if k == n {
        return if q < 0.1 { -bd0(nf, nf * p) - nf * q } else { nf * p.ln() };
    }
    let lc = stirlerr(nf) - stirlerr(kf) - stirlerr(nf - kf) - bd0(kf, nf * p) - bd0(nf - kf, nf * q);
    let lf = (2.0 * PI).ln() + kf.ln() + (-kf / nf).ln_1p();
    lc - 0.5 * lf
}

pub fn binomial_pmf(n: u64, k: u64, p: f64) -> f64 {
    ln_binomial_pmf(n, k, p).exp()
}

/// `ln C(n, k)`.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    ln_binomial_pmf(n, k, 0.5) + n as f64 * std::f64::consts::LN_2
}

fn check_args(n: u64, p: f64, c: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("c = {c} must be non-negative")));
    }
    Ok(())
}

/// `Σ_{|m − Np| ≥ cN} C(N,m) p^m (1−p)^{N−m}`.
///
/// The boundary comparison carries a relative slack of 1e−12 so that
/// deviations equal to `cN` in exact arithmetic are counted.
pub fn binomial_tail(n: u64, p: f64, c: f64) -> Result<f64> {
    check_args(n, p, c)?;
    let nf = n as f64;
    let cut = c * nf * (1.0 - 1e-12) - 1e-12;
    let mut s = 0.0;
    for m in 0..=n {
        if (m as f64 - nf * p).abs() >= cut {
            s += binomial_pmf(n, m, p);
        }
    }
    Ok(s.min(1.0))
}

/// `2 exp(−N c² / (½ p(1−p) + 2c/3))`, the variance convention as stated
/// by the source lemma.
pub fn bernstein_bound(n: u64, p: f64, c: f64) -> Result<f64> {
    check_args(n, p, c)?;
    Ok(2.0 * (-(n as f64) * c * c / (0.5 * p * (1.0 - p) + 2.0 * c / 3.0)).exp())
}

/// `2 exp(−N c² / (2 p(1−p) + 2c/3))`, Bernstein's inequality with the
/// Bernoulli variance `p(1−p)` and range 1.
pub fn bernstein_bound_textbook(n: u64, p: f64, c: f64) -> Result<f64> {
    check_args(n, p, c)?;
    Ok(2.0 * (-(n as f64) * c * c / (2.0 * p * (1.0 - p) + 2.0 * c / 3.0)).exp())
}

/// `2 exp(−2c²N)`.
pub fn hoeffding_bound(n: u64, c: f64) -> Result<f64> {
    check_args(n, 0.5, c)?;
    Ok(2.0 * (-2.0 * c * c * n as f64).exp())
}

/// Largest pointwise gap between the `Binomial(N, ½)` pmf and the normal
/// density with matching mean and variance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DmlGap {
    pub gap: f64,
    pub argmax: u64,
}

pub fn dml_gap(n: u64) -> Result<DmlGap> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    let nf = n as f64;
    let var = nf / 4.0;
    let mut best = DmlGap { gap: 0.0, argmax: 0 };
    for m in 0..=n {
        let phi = (-(m as f64 - nf / 2.0).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
        let g = (binomial_pmf(n, m, 0.5) - phi).abs();
        if g > best.gap {
            best = DmlGap { gap: g, argmax: m };
        }
    }
    Ok(best)
}
