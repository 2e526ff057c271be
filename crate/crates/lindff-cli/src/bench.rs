//! Scaling suites. Cells run in parallel; rows and records come out in cell
//! order. A cell that cannot run is kept as a row with a `skipped` reason
//! and left out of the fits.

use crate::args::{BenchCommand, FfBenchArgs, QpeBenchArgs};
use crate::commands::{fitted_slope, to_csv, to_value, verdict};
use crate::seed::cell_seed;
use crate::{CliError, Ctx, Emitted};
use lindff::dilated_baseline::{default_steps, dilated_cost, dilated_evolve, STEP_LIMIT};
use lindff::exact_oracle::lindblad_exact_hermitian;
use lindff::fastforward::{ff_evolve, FfPlan};
use lindff::model::{diag, normalize_jump, Hamiltonian, SpectralState};
use lindff::numkernel::{c, hermitian_part, trace_distance};
use lindff::qpe::{fast_qpe, rms_error, slow_estimator, slow_qpe, Mode, KRAVCHUK_CAP};
use lindff::{CMatrix, DensityMatrix, StateVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

pub(crate) fn run(cmd: &BenchCommand, ctx: &Ctx) -> Result<Emitted, CliError> {
    match cmd {
        BenchCommand::FfVsDilated(a) => ff_vs_dilated(a, ctx),
        BenchCommand::QpeScaling(a) => qpe_scaling(a, ctx),
    }
}

#[derive(Clone, Debug, Default, Serialize)]
struct FfRow {
    t: f64,
    eps: f64,
    ff_steps: Option<u64>,
    ff_d_prime: Option<u32>,
    ff_ancillas: Option<u64>,
    ff_time: Option<f64>,
    dilated_steps: Option<u64>,
    dilated_time: Option<f64>,
    ff_trace_distance: Option<f64>,
    dilated_trace_distance: Option<f64>,
    skipped: Option<String>,
}

/// Random Hermitian 2×2 jump scaled to unit norm.
fn random_jump(seed: u64) -> Result<CMatrix, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = CMatrix::from_fn(2, 2, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    Ok(normalize_jump(&hermitian_part(&a))?.0)
}

fn ff_cell(t: f64, eps: f64, simulate: Option<u64>) -> FfRow {
    let mut row = FfRow { t, eps, ..FfRow::default() };
    let plan = match FfPlan::new(t, eps) {
        Ok(p) => p,
        Err(e) => {
            row.skipped = Some(format!("plan: {e}"));
            return row;
        }
    };
    let ff = plan.cost();
    row.ff_steps = Some(plan.n);
    row.ff_d_prime = Some(plan.d_prime);
    row.ff_ancillas = Some(ff.ancilla_count);
    row.ff_time = Some(ff.hamiltonian_time);
    match default_steps(t, eps) {
        Ok(n) => {
            row.dilated_steps = Some(n);
            row.dilated_time = Some(dilated_cost(t, n).hamiltonian_time);
        }
        Err(e) => row.skipped = Some(format!("dilated: {e}")),
    }
    if let Some(seed) = simulate {
        if let Err(e) = simulate_cell(&mut row, &plan, seed) {
            row.skipped = Some(format!("simulation: {e}"));
        }
    }
    row
}

fn simulate_cell(row: &mut FfRow, plan: &FfPlan, seed: u64) -> Result<(), CliError> {
    let f = random_jump(seed)?;
    let h = Hamiltonian::spectral(&f)?;
    let rho0 = DensityMatrix::from_pure(&StateVector::uniform(2));
    let exact = lindblad_exact_hermitian(&h, &rho0, plan.t)?;
    let (rho, _) = ff_evolve(&h, &rho0, plan)?;
    row.ff_trace_distance = Some(trace_distance(rho.as_matrix(), exact.as_matrix())?);
    match row.dilated_steps {
        Some(n) if n <= STEP_LIMIT => {
            let (rho, _) = dilated_evolve(&f, &rho0, plan.t, n)?;
            row.dilated_trace_distance = Some(trace_distance(rho.as_matrix(), exact.as_matrix())?);
        }
        Some(n) => row.skipped = Some(format!("dilated simulation: {n} steps exceed {STEP_LIMIT}")),
        None => {}
    }
    Ok(())
}

fn ff_vs_dilated(a: &FfBenchArgs, ctx: &Ctx) -> Result<Emitted, CliError> {
    let rows: Vec<FfRow> = a
        .t
        .par_iter()
        .enumerate()
        .map(|(i, &t)| ff_cell(t, a.eps, a.simulate.then(|| cell_seed(ctx.seed, i as u64))))
        .collect();
    let pick = |f: fn(&FfRow) -> Option<f64>| -> (Vec<f64>, Vec<f64>) {
        rows.iter().filter_map(|r| f(r).map(|y| (r.t, y))).unzip()
    };
    let (ft, fc) = pick(|r| r.ff_time);
    let (dt, dc) = pick(|r| r.dilated_time);
    let mut records: Vec<_> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut out = to_value(r);
            out["cell"] = json!(i);
            ctx.record("bench.ff-vs-dilated.cell", None, out, None)
        })
        .collect();
    let summary = json!({
        "eps": a.eps,
        "ff_time_vs_t": verdict(fitted_slope(&ft, &fc), 0.5, 0.1),
        "dilated_time_vs_t": verdict(fitted_slope(&dt, &dc), 2.0, 0.1),
    });
    records.push(ctx.record("bench.ff-vs-dilated.summary", None, summary, None));
    Ok(Emitted { records, table: Some(to_csv(&rows)?) })
}

#[derive(Clone, Debug, Default, Serialize)]
struct QpeRow {
    t: f64,
    n: u64,
    slow_rms: Option<f64>,
    slow_time: Option<f64>,
    fast_rms: Option<f64>,
    fast_time: Option<f64>,
    skipped: Option<String>,
}

fn qpe_cell(t: f64, n: u64, h: f64, eps: f64) -> QpeRow {
    let mut row = QpeRow { t, n, ..QpeRow::default() };
    if let Err(e) = qpe_cell_inner(&mut row, h, eps) {
        row.skipped = Some(e.to_string());
    }
    row
}

fn qpe_cell_inner(row: &mut QpeRow, h: f64, eps: f64) -> Result<(), CliError> {
    let (t, n) = (row.t, row.n);
    let ham = Hamiltonian::spectral(&diag(&[h]))?;
    let psi = SpectralState::from_amplitudes(&ham, &[c(1.0)])?;
    let est = |m: u64| slow_estimator(m, n, t).0;
    let slow = slow_qpe(&ham, &psi, t, n, Mode::Exact)?;
    row.slow_rms = slow.distribution.as_ref().map(|p| rms_error(p, est, h));
    row.slow_time = Some(slow.cost.hamiltonian_time);
    if n > KRAVCHUK_CAP {
        return Err(CliError::Validation(format!("fast route: N = {n} exceeds the Kravchuk cap {KRAVCHUK_CAP}")));
    }
    let plan = FfPlan::with_steps(t, eps, n)?;
    let fast = fast_qpe(&ham, &psi, &plan, Mode::Exact)?;
    row.fast_rms = fast.distribution.as_ref().map(|p| rms_error(p, est, h));
    row.fast_time = Some(fast.cost.hamiltonian_time);
    Ok(())
}

fn qpe_scaling(a: &QpeBenchArgs, ctx: &Ctx) -> Result<Emitted, CliError> {
    let rows: Vec<QpeRow> = a.t.par_iter().map(|&t| qpe_cell(t, a.n, a.h, a.eps)).collect();
    let pairs = |x: fn(&QpeRow) -> Option<f64>, y: fn(&QpeRow) -> Option<f64>| -> (Vec<f64>, Vec<f64>) {
        rows.iter().filter_map(|r| Some((x(r)?, y(r)?))).unzip()
    };
    let (st, se) = pairs(|r| Some(r.t), |r| r.slow_rms);
    let (fc, fe) = pairs(|r| r.fast_time, |r| r.fast_rms);
    let mut records: Vec<_> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut out = to_value(r);
            out["cell"] = json!(i);
            ctx.record("bench.qpe-scaling.cell", None, out, None)
        })
        .collect();
    let summary = json!({
        "h": a.h,
        "eps": a.eps,
        "slow_rms_vs_t": verdict(fitted_slope(&st, &se), -0.5, 0.1),
        "fast_rms_vs_time": verdict(fitted_slope(&fc, &fe), -1.0, 0.15),
    });
    records.push(ctx.record("bench.qpe-scaling.summary", None, summary, None));
    Ok(Emitted { records, table: Some(to_csv(&rows)?) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_cost_pair() {
        let row = ff_cell(8.0, 0.1, None);
        assert_eq!(row.ff_time, Some(12.8));
        assert_eq!(row.dilated_time, Some(640.0));
        assert_eq!(row.dilated_steps, Some(51_200));
    }

    #[test]
    fn oversize_fast_cell_is_skipped_with_reason() {
        let row = qpe_cell(16.0, KRAVCHUK_CAP + 2, 0.5, 1e-3);
        assert!(row.slow_rms.is_some());
        assert!(row.fast_rms.is_none());
        assert!(row.skipped.unwrap().contains("Kravchuk"));
    }

    #[test]
    fn simulated_cells_stay_within_budget() {
        let row = ff_cell(2.0, 0.1, Some(3));
        assert!(row.ff_trace_distance.unwrap() <= 0.2);
        assert!(row.dilated_trace_distance.unwrap() <= 0.2);
        let big = ff_cell(64.0, 0.1, Some(3));
        assert!(big.skipped.unwrap().contains("exceed"));
        assert!(big.ff_trace_distance.is_some());
    }
}
