//! Brute-force reference computations.
//!
//! Everything here is deliberately naive and shares no code with `lindff`:
//! adaptive RK4 on the master equation, Taylor-series matrix exponentials,
//! explicit bitstring sums and direct lattice sums. Tests compare the
//! production routes against these.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

/// Right-hand side of the master equation with general jumps:
/// `Σ FρF† − ½{F†F, ρ}`.
pub fn lindblad_rhs(jumps: &[CMat], rho: &CMat) -> CMat {
    let mut out = CMat::zeros(rho.nrows(), rho.ncols());
    for f in jumps {
        let fd = f.adjoint();
        let ff = &fd * f;
        out += f * rho * &fd;
        out -= (&ff * rho + rho * &ff) * C64::new(0.5, 0.0);
    }
    out
}

fn rk4_step(jumps: &[CMat], rho: &CMat, h: f64) -> CMat {
    let hc = C64::new(h, 0.0);
    let k1 = lindblad_rhs(jumps, rho);
    let k2 = lindblad_rhs(jumps, &(rho + &k1 * (hc * 0.5)));
    let k3 = lindblad_rhs(jumps, &(rho + &k2 * (hc * 0.5)));
    let k4 = lindblad_rhs(jumps, &(rho + &k3 * hc));
    rho + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * (hc / 6.0)
}

/// Adaptive RK4 with step doubling; `tol` bounds the local error per step.
pub fn rk4_lindblad(jumps: &[CMat], rho0: &CMat, t: f64, tol: f64) -> CMat {
    let mut rho = rho0.clone();
    let mut elapsed = 0.0;
    let mut h = (t / 64.0).max(1e-6);
    while elapsed < t {
        if elapsed + h > t {
            h = t - elapsed;
        }
        let full = rk4_step(jumps, &rho, h);
        let half = rk4_step(jumps, &rk4_step(jumps, &rho, h / 2.0), h / 2.0);
        let err = (&full - &half).iter().map(|z| z.norm()).fold(0.0, f64::max) / 15.0;
        if err <= tol || h < 1e-9 {
            // Richardson-corrected fifth-order update.
            rho = &half + (&half - &full) / C64::new(15.0, 0.0);
            elapsed += h;
            let grow = if err > 0.0 { 0.9 * (tol / err).powf(0.2) } else { 2.0 };
            h *= grow.clamp(0.2, 2.0);
        } else {
            h *= (0.9 * (tol / err).powf(0.2)).clamp(0.1, 0.5);
        }
    }
    rho
}

/// `exp(A)` by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &CMat) -> CMat {
    let norm: f64 = a.iter().map(|z| z.norm()).sum();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a * C64::new(scale, 0.0);
    let n = a.nrows();
    let mut term = CMat::identity(n, n);
    let mut sum = CMat::identity(n, n);
    for k in 1..30 {
        term = &term * &x / C64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `⟨m̄|H^{⊗N}|m̄′⟩` by summing over all bitstring pairs; N ≤ 12.
pub fn dicke_hadamard(n: u32) -> DMatrix<f64> {
    assert!(n <= 12, "bitstring enumeration is exponential");
    let dim = 1usize << n;
    let mut acc = DMatrix::<f64>::zeros(n as usize + 1, n as usize + 1);
    for x in 0..dim {
        let wx = x.count_ones() as usize;
        for y in 0..dim {
            let wy = y.count_ones() as usize;
            let sign = if (x & y).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc[(wx, wy)] += sign;
        }
    }
    let choose = |k: usize| -> f64 {
        (0..k).fold(1.0, |c, i| c * (n as f64 - i as f64) / (i as f64 + 1.0))
    };
    let norm = 2f64.powf(-(n as f64) / 2.0);
    DMatrix::from_fn(n as usize + 1, n as usize + 1, |m, mp| {
        acc[(m, mp)] * norm / (choose(m) * choose(mp)).sqrt()
    })
}

/// `Σ_k exp(−(k−μ)²/(2σ²))` summed directly over integers.
pub fn lattice_f(mu: f64, sigma: f64) -> f64 {
    let centre = mu.round() as i64;
    let reach = (40.0 * sigma).ceil() as i64 + 2;
    (centre - reach..=centre + reach)
        .map(|k| (-(k as f64 - mu).powi(2) / (2.0 * sigma * sigma)).exp())
        .sum()
}

/// `C(N,m) q^m (1−q)^{N−m}` through `lgamma`.
pub fn binomial_pmf_lgamma(n: u64, m: u64, q: f64) -> f64 {
    let ln_c = libm::lgamma(n as f64 + 1.0)
        - libm::lgamma(m as f64 + 1.0)
        - libm::lgamma((n - m) as f64 + 1.0);
    let mut ln = ln_c;
    if m > 0 {
        ln += m as f64 * q.ln();
    }
    if n > m {
        ln += (n - m) as f64 * (1.0 - q).ln();
    }
    ln.exp()
}

/// Binomial pmf with the coefficient built by the multiplicative formula.
pub fn binomial_pmf_product(n: u64, m: u64, p: f64) -> f64 {
    let k = m.min(n - m);
    let c = (0..k).fold(1.0, |c, i| c * (n - i) as f64 / (i + 1) as f64);
    c * p.powi(m as i32) * (1.0 - p).powi((n - m) as i32)
}

/// Standard-QPE outcome probability from the explicit register sum.
pub fn qpe_kernel_direct(h: f64, y: u64, d: u32) -> f64 {
    let n = 1u64 << d;
    let delta = h - y as f64 / n as f64;
    let mut s = C64::new(0.0, 0.0);
    for x in 0..n {
        s += C64::from_polar(1.0, -2.0 * std::f64::consts::PI * delta * x as f64);
    }
    s.norm_sqr() / (n as f64 * n as f64)
}

/// Trace norm distance `½‖A−B‖₁` through the singular values.
pub fn trace_distance_svd(a: &CMat, b: &CMat) -> f64 {
    let diff = a - b;
    0.5 * diff.singular_values().iter().sum::<f64>()
}

pub fn pauli(c: char) -> CMat {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match c {
        'I' => CMat::from_row_slice(2, 2, &[l, o, o, l]),
        'X' => CMat::from_row_slice(2, 2, &[o, l, l, o]),
        'Y' => CMat::from_row_slice(2, 2, &[o, -i, i, o]),
        'Z' => CMat::from_row_slice(2, 2, &[l, o, o, -l]),
        _ => panic!("not a Pauli label: {c}"),
    }
}

/// Tensor product with the first factor as the high-order index.
pub fn kron_naive(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}
