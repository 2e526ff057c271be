use crate::args::{
    AeArgs, BoundsArgs, Command, DistanceArgs, EvolveArgs, GibbsArgs, HamArgs, Method, QpeArgs, Route,
    ScheduleArgs, StateprepCommand,
};
use crate::input::{load_hamiltonian, matrix_json, StateSpec};
use crate::record::HamiltonianInput;
use crate::seed::cell_seed;
use crate::{bench, CliError, Ctx, Emitted};
use lindff::choi::{choi_ff_evolve, is_choi_commuting, pauli_noise_spec, COMMUTE_TOL};
use lindff::concentration::{bernstein_bound, bernstein_bound_textbook, binomial_tail, dml_gap, hoeffding_bound};
use lindff::dilated_baseline::{dilated_evolve, dilated_evolve_to_accuracy};
use lindff::exact_oracle::{lindblad_exact_general, lindblad_exact_hermitian};
use lindff::fastforward::{ff_evolve, FfPlan};
use lindff::fit::loglog_slope;
use lindff::gibbs::gibbs_prepare;
use lindff::model::{decompose_state, normalize_jump, normalize_spectrum, shift_to_zero, Hamiltonian};
use lindff::numkernel::trace_distance;
use lindff::qpe::{
    fast_qpe, fast_qpe_eigenstate, slow_qpe, slow_qpe_eigenstate, standard_qpe, standard_qpe_eigenstate, AeDemo,
    AeSettings, Mode,
};
use lindff::qpe::amplitude::AE_MAX_BITS;
use lindff::stateprep::{binomial_gaussian_distance, discrete_gaussian_amplitudes, kw_angle_schedule};
use lindff::{CMatrix, CostReport, DensityMatrix};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

pub(crate) fn dispatch(cmd: &Command, ctx: &Ctx) -> Result<Emitted, CliError> {
    match cmd {
        Command::Evolve(a) if a.method == Method::ChoiFf => evolve_choi(a, ctx),
        Command::Evolve(a) => evolve(a, ctx),
        Command::Qpe(a) => qpe(a, ctx),
        Command::Gibbs(a) => gibbs(a, ctx),
        Command::AeDemo(a) => ae_demo(a, ctx),
        Command::Stateprep(StateprepCommand::Distance(a)) => stateprep_distance(a, ctx),
        Command::Stateprep(StateprepCommand::Schedule(a)) => stateprep_schedule(a, ctx),
        Command::Bounds(a) => bounds(a, ctx),
        Command::Bench(b) => bench::run(b, ctx),
    }
}

fn required_ham(h: &HamArgs, command: &str) -> Result<(CMatrix, HamiltonianInput), CliError> {
    let path = h.ham.as_ref().ok_or_else(|| CliError::Validation(format!("{command} needs --ham")))?;
    load_hamiltonian(path, h.format)
}

pub(crate) fn to_value(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("output structs serialize")
}

pub(crate) fn to_csv<R: Serialize>(rows: &[R]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Internal(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(format!("csv: {e}")))
}

/// Log-log slope over the finite positive pairs, `None` with fewer than two.
pub(crate) fn fitted_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0 && y.is_finite()).map(|(x, y)| (*x, *y)).unzip();
    let distinct = x.iter().any(|v| *v != x[0]);
    (x.len() >= 2 && distinct).then(|| loglog_slope(&x, &y))
}

pub(crate) fn verdict(slope: Option<f64>, expected: f64, tolerance: f64) -> Value {
    json!({
        "slope": slope,
        "expected": expected,
        "tolerance": tolerance,
        "within": slope.map(|s| (s - expected).abs() <= tolerance),
    })
}

fn evolve(a: &EvolveArgs, ctx: &Ctx) -> Result<Emitted, CliError> {
    let (m, input) = required_ham(&a.ham, "evolve")?;
    let (jump, t) = if a.rescale {
        let (f, factor) = normalize_jump(&m)?;
        (f, a.t * factor)
    } else {
        (m, a.t)
    };
    let h = Hamiltonian::spectral(&jump)?;
    let rho0 = DensityMatrix::from_pure(&a.state.build(h.dim(), Some(&h), ctx.seed)?);
    let mut out = json!({ "t_effective": t });
    let (rho, cost) = match a.method {
        Method::Ff => {
            let plan = match a.steps {
                Some(n) => FfPlan::with_steps(t, a.eps, n)?,
                None => FfPlan::new(t, a.eps)?,
            };
            out["plan"] = to_value(&plan);
            ff_evolve(&h, &rho0, &plan)?
        }
        Method::Dilated => match a.steps {
            Some(n) => dilated_evolve(&jump, &rho0, t, n)?,
            None => dilated_evolve_to_accuracy(&jump, &rho0, t, a.eps, a.allow_large)?,
        },
        Method::Exact => (lindblad_exact_hermitian(&h, &rho0, t)?, CostReport::zero()),
        Method::ChoiFf => unreachable!("dispatched to evolve_choi"),
    };
    if a.compare {
        let exact = lindblad_exact_hermitian(&h, &rho0, t)?;
        out["trace_distance_to_exact"] = json!(trace_distance(rho.as_matrix(), exact.as_matrix())?);
    }
    out["rho_out"] = matrix_json(rho.as_matrix());
    Ok(Emitted { records: vec![ctx.record("evolve", Some(&input), out, Some(cost))], table: None })
}

fn parse_noise(s: &str) -> Result<Vec<(String, f64)>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (label, rate) =
                p.split_once(':').ok_or_else(|| CliError::Validation(format!("noise term {p:?} is not LABEL:RATE")))?;
            let rate: f64 = rate.parse().map_err(|_| CliError::Validation(format!("bad rate in {p:?}")))?;
            Ok((label.to_string(), rate))
        })
        .collect()
}

fn evolve_choi(a: &EvolveArgs, ctx: &Ctx) -> Result<Emitted, CliError> {
    let noise = a.noise.as_deref().ok_or_else(|| CliError::Validation("choi-ff needs --noise".into()))?;
    let terms = parse_noise(noise)?;
    let borrowed: Vec<(&str, f64)> = terms.iter().map(|(l, r)| (l.as_str(), *r)).collect();
    let spec = pauli_noise_spec(&borrowed)?;
    let rho0 = DensityMatrix::from_pure(&a.state.build(spec.dim(), None, ctx.seed)?);
    let check = is_choi_commuting(&spec, COMMUTE_TOL);
    let (rho, cost) = choi_ff_evolve(&spec, &rho0, a.t, a.eps, a.allow_non_commuting)?;
    let mut out = json!({
        "commuting": check.commuting,
        "max_commutator": check.max_commutator,
        "jumps": spec.jumps().len(),
        "eps_per_factor": a.eps / spec.jumps().len() as f64,
    });
    if a.compare {
        let exact = lindblad_exact_general(&spec, &rho0, a.t)?;
        out["trace_distance_to_exact"] = json!(trace_distance(rho.as_matrix(), exact.as_matrix())?);
    }
    out["rho_out"] = matrix_json(rho.as_matrix());
    Ok(Emitted { records: vec![ctx.record("evolve", None, out, Some(cost))], table: None })
}

fn qpe(a: &QpeArgs, ctx: &Ctx) -> Result<Emitted, CliError> {
    let (m, input) = required_ham(&a.ham, "qpe")?;
    let h = normalize_spectrum(&m)?;
    let spec = a.eigen.map(StateSpec::Eigen).unwrap_or(a.state);
    let psi_vec = spec.build(h.dim(), Some(&h), ctx.seed)?;
    let need_t = || a.t.ok_or_else(|| CliError::Validation("this route needs --t".into()));
    let need_n = || a.n.ok_or_else(|| CliError::Validation("this route needs --N".into()));
    let plan = || -> Result<FfPlan, CliError> {
        let t = need_t()?;
        Ok(match a.n {
            Some(n) => FfPlan::with_steps(t, a.eps, n)?,
            None => FfPlan::new(t, a.eps)?,
        })
    };
    let map = h.spectrum_map();
    let eigenvalues: Vec<f64> = h.eigenvalues().iter().map(|x| map.to_original(*x)).collect();

    let (mut out, cost) = if let Some(beta) = a.prepare {
        let hz = shift_to_zero(&h, beta)?;
        let psi = decompose_state(&hz, &psi_vec)?;
        let r = match a.route {
            Route::Standard => standard_qpe_eigenstate(&hz, &psi, beta, a.d)?,
            Route::Slow => slow_qpe_eigenstate(&hz, &psi, beta, need_t()?, need_n()?)?,
            Route::Fast => fast_qpe_eigenstate(&hz, &psi, beta, &plan()?)?,
        };
        let mut out = to_value(&r);
        out["target"] = json!(beta);
        (out, r.cost)
    } else {
        let psi = decompose_state(&h, &psi_vec)?;
        let mode = if a.sample { Mode::Sample(ctx.seed) } else { Mode::Exact };
        let mut r = match a.route {
            Route::Standard => standard_qpe(&h, &psi, a.d, mode)?,
            Route::Slow => slow_qpe(&h, &psi, need_t()?, need_n()?, mode)?,
            Route::Fast => fast_qpe(&h, &psi, &plan()?, mode)?,
        };
        if !a.distribution {
            r.distribution = None;
        }
        (to_value(&r), r.cost)
    };
    if let Some(obj) = out.as_object_mut() {
        obj.remove("cost");
    }
    out["eigenvalues"] = json!(eigenvalues);
    out["weights"] = json!(decompose_state(&h, &psi_vec)?.weights());
    Ok(Emitted { records: vec![ctx.record("qpe", Some(&input), out, Some(cost))], table: None })
}

#[derive(Serialize)]
struct GibbsRow {
    beta: f64,
    fidelity: f64,
    partition_estimate: f64,
    partition_exact: f64,
    relative_error: f64,
    amplification_queries: f64,
    hamiltonian_time: f64,
}

fn gibbs(a: &GibbsArgs, ctx: &Ctx) -> Result<Emitted, CliError> {
    let (m, input) = required_ham(&a.ham, "gibbs")?;
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for &beta in &a.beta {
        let r = gibbs_prepare(&m, beta, a.eps)?;
        let row = GibbsRow {
            beta,
            fidelity: r.fidelity,
            partition_estimate: r.partition_estimate,
            partition_exact: r.partition_exact,
            relative_error: (r.partition_estimate - r.partition_exact).abs() / r.partition_exact,
            amplification_queries: r.amplification_queries,
            hamiltonian_time: r.cost.hamiltonian_time,
        };
        let mut out = to_value(&row);
        out["reduced"] = matrix_json(r.reduced.as_matrix());
        records.push(ctx.record("gibbs.cell", Some(&input), out, Some(r.cost)));
        rows.push(row);
    }
    let betas: Vec<f64> = rows.iter().map(|r| r.beta).collect();
    let costs: Vec<f64> = rows.iter().map(|r| r.hamiltonian_time).collect();
    let summary = json!({
        "eps": a.eps,
        "cost_vs_beta": verdict(fitted_slope(&betas, &costs), 0.5, 0.1),
        "fidelity_failures": rows.iter().filter(|r| r.fidelity < 1.0 - 2.0 * a.eps).count(),
        "partition_failures": rows.iter().filter(|r| r.relative_error > 0.05).count(),
    });
    records.push(ctx.record("gibbs.summary", Some(&input), summary, None));
    Ok(Emitted { records, table: Some(to_csv(&rows)?) })
}

fn ae_demo(a: &AeArgs, ctx: &Ctx) -> Result<Emitted, CliError> {
    let oracle: Vec<bool> = match &a.oracle {
        Some(bits) => bits
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(CliError::Validation(format!("oracle digit {ch:?} is not 0 or 1"))),
            })
            .collect::<Result<_, _>>()?,
        None => {
            if a.n_bits == 0 || a.n_bits > AE_MAX_BITS {
                return Err(CliError::Validation(format!("--n-bits must be in 1..={AE_MAX_BITS}")));
            }
            let size = 1usize << a.n_bits;
            if a.marked > size {
                return Err(CliError::Validation(format!("--marked {} exceeds 2^{} inputs", a.marked, a.n_bits)));
            }
            (0..size).map(|x| x < a.marked).collect()
        }
    };
    let demo = AeDemo::prepare(&oracle, &AeSettings { t: a.t, n_steps: a.n, eps: a.eps })?;
    let truth = demo.marked == 0;
    let decisions: Vec<bool> = (0..a.runs).map(|i| demo.decide(Mode::Sample(cell_seed(ctx.seed, i))).zero).collect();
    let decided_zero = decisions.iter().filter(|z| **z).count();
    let correct = decisions.iter().filter(|z| **z == truth).count();
    let out = json!({
        "n_bits": demo.n_bits,
        "marked": demo.marked,
        "amplitude": demo.amplitude,
        "threshold": demo.threshold,
        "runs": a.runs,
        "decided_zero": decided_zero,
        "correct": correct,
        "exact_decision": to_value(&demo.decide(Mode::Exact)),
    });
    Ok(Emitted { records: vec![ctx.record("ae-demo", None, out, Some(demo.cost))], table: None })
}

#[derive(Serialize)]
struct DistanceRow {
    n: u64,
    l2_distance: Option<f64>,
    skipped: Option<String>,
}

fn stateprep_distance(a: &DistanceArgs, ctx: &Ctx) -> Result<Emitted, CliError> {
    let rows: Vec<DistanceRow> = a
        .n
        .par_iter()
        .map(|&n| match binomial_gaussian_distance(n) {
            Ok(d) => DistanceRow { n, l2_distance: Some(d), skipped: None },
            Err(e) => DistanceRow { n, l2_distance: None, skipped: Some(e.to_string()) },
        })
        .collect();
    let (ns, ds): (Vec<f64>, Vec<f64>) =
        rows.iter().filter_map(|r| r.l2_distance.map(|d| (r.n as f64, d))).unzip();
    let mut records: Vec<_> = rows.iter().map(|r| ctx.record("stateprep.distance.cell", None, to_value(r), None)).collect();
    records.push(ctx.record(
        "stateprep.distance.summary",
        None,
        json!({ "distance_vs_n": verdict(fitted_slope(&ns, &ds), -0.5, 0.15) }),
        None,
    ));
    Ok(Emitted { records, table: Some(to_csv(&rows)?) })
}

fn stateprep_schedule(a: &ScheduleArgs, ctx: &Ctx) -> Result<Emitted, CliError> {
    let sched = kw_angle_schedule(a.n, a.mu, a.sigma)?;
    let direct = discrete_gaussian_amplitudes(a.n, a.mu, a.sigma)?;
    let replay = sched.synthesize();
    let err = replay.iter().zip(&direct).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let mut out = json!({
        "root_angle": sched.root(),
        "levels": sched.levels().len(),
        "replay_error": err,
        "amplitudes": direct,
    });
    if a.angles {
        out["angles"] = json!(sched.levels());
    }
    Ok(Emitted { records: vec![ctx.record("stateprep.schedule", None, out, None)], table: None })
}

#[derive(Serialize)]
struct BoundsRow {
    n: u64,
    p: f64,
    c: f64,
    tail: f64,
    bernstein: f64,
    bernstein_textbook: f64,
    hoeffding: f64,
}

fn bounds(a: &BoundsArgs, ctx: &Ctx) -> Result<Emitted, CliError> {
    let cells: Vec<(u64, f64, f64)> =
        a.n.iter().flat_map(|&n| a.p.iter().flat_map(move |&p| a.c.iter().map(move |&c| (n, p, c)))).collect();
    let rows: Vec<BoundsRow> = cells
        .par_iter()
        .map(|&(n, p, c)| -> Result<BoundsRow, CliError> {
            Ok(BoundsRow {
                n,
                p,
                c,
                tail: binomial_tail(n, p, c)?,
                bernstein: bernstein_bound(n, p, c)?,
                bernstein_textbook: bernstein_bound_textbook(n, p, c)?,
                hoeffding: hoeffding_bound(n, c)?,
            })
        })
        .collect::<Result<_, _>>()?;
    let count = |f: &dyn Fn(&BoundsRow) -> bool| rows.iter().filter(|r| f(r)).count();
    let worst = rows
        .iter()
        .max_by(|x, y| (x.tail / x.bernstein).total_cmp(&(y.tail / y.bernstein)))
        .map(|r| json!({ "n": r.n, "p": r.p, "c": r.c, "tail": r.tail, "bernstein": r.bernstein }));
    let gaps: Vec<Value> = a
        .gap_n
        .iter()
        .map(|&n| {
            let g = dml_gap(n)?;
            Ok(json!({ "n": n, "gap": g.gap, "argmax": g.argmax, "gap_times_n": g.gap * n as f64 }))
        })
        .collect::<Result<_, CliError>>()?;
    let out = json!({
        "cells": rows.len(),
        "bernstein_violations": count(&|r| r.tail > r.bernstein),
        "bernstein_textbook_violations": count(&|r| r.tail > r.bernstein_textbook),
        "hoeffding_violations": count(&|r| r.tail > r.hoeffding),
        "hoeffding_violations_at_half": count(&|r| r.p == 0.5 && r.tail > r.hoeffding),
        "worst_bernstein_ratio": worst,
        "gaps": gaps,
    });
    Ok(Emitted { records: vec![ctx.record("bounds.summary", None, out, None)], table: Some(to_csv(&rows)?) })
}
