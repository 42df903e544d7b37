//! Stage solver and the orbital-expansion driver.

use std::time::Instant;

use super::bfgs::bfgs_minimize;
use super::pool::{build_pool, incremental_pool_between};
use super::{
    measurement_accounting, Direction, OperatorRecord, RunReport, SolverConfig, StageRecord,
    StopReason, SCHEMA_VERSION,
};
use crate::embedding::{build_bath, EmbeddingBasis, FragmentSpec};
use crate::error::{Error, Result};
use crate::fermisim::{
    energy_and_gradient, extend_register, jw_encode, pool_gradients, reference_state,
    CompiledHamiltonian, ExcitationOp, SectorAnsatz, Statevector,
};
use crate::integrals::IntegralSet;
use crate::projection::SubspaceHamiltonian;
use crate::ranking::{rank_environment, stage_hamiltonian, RankedBasis};
use crate::scf::{run_rhf_with, RhfSolution, ScfOptions};

/// Line-search failures are tolerated when the best point is this flat.
const ACCEPTABLE_GRAD: f64 = 1e-5;

/// Which ansatz grows inside each stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ansatz {
    Adapt,
    Uccsd,
}

/// Per-stage limits for [`adapt_stage_with`].
#[derive(Clone, Copy, Debug)]
pub struct StageContext {
    pub stage: usize,
    pub threshold: f64,
    pub max_new_ops: usize,
}

#[derive(Clone, Debug)]
pub struct StageOutcome {
    pub direction: Direction,
    pub e_sub: f64,
    pub selected_gradients: Vec<f64>,
    /// `E_sub` after each append.
    pub energies: Vec<f64>,
    pub final_max_gradient: f64,
    pub stop: StopReason,
}

fn optimize(
    direction: &mut Direction,
    psi0: &Statevector,
    ham: &CompiledHamiltonian,
    cfg: &SolverConfig,
    all: bool,
) -> Result<f64> {
    let ops: Vec<ExcitationOp> = direction.ops().into_iter().cloned().collect();
    let refs: Vec<&ExcitationOp> = ops.iter().collect();
    let mut thetas = direction.thetas();
    let n = thetas.len();
    if n == 0 {
        return Ok(ham.expectation(psi0));
    }
    let sector = SectorAnsatz::new(ham, &refs).and_then(|sa| sa.restrict(psi0).map(|v| (sa, v)));
    let mut eval = |t: &[f64]| -> (f64, Vec<f64>) {
        match &sector {
            Some((sa, v0)) => sa.energy_and_gradient(t, v0).expect("consistent ansatz"),
            None => {
                let (e, g, _) = energy_and_gradient(&refs, t, psi0, ham).expect("consistent ansatz");
                (e, g)
            }
        }
    };
    let fixed = thetas.clone();
    let result = if all {
        bfgs_minimize(&mut eval, &thetas, cfg.bfgs_tol, cfg.bfgs_max_iter)
    } else {
        bfgs_minimize(
            |x| {
                let mut t = fixed.clone();
                t[n - 1] = x[0];
                let (e, g) = eval(&t);
                (e, vec![g[n - 1]])
            },
            &thetas[n - 1..],
            cfg.bfgs_tol,
            cfg.bfgs_max_iter,
        )
    };
    let (x, f) = match result {
        Ok(r) => (r.x, r.f),
        Err(Error::LineSearch {
            best_point,
            best_value,
            best_grad_norm,
            ..
        }) if best_grad_norm <= ACCEPTABLE_GRAD => {
            log::debug!("line search stalled at |g| = {best_grad_norm:.2e}; accepting best point");
            (best_point, best_value)
        }
        Err(e) => return Err(e),
    };
    if all {
        thetas = x;
    } else {
        thetas[n - 1] = x[0];
    }
    direction.set_thetas(&thetas)?;
    Ok(f)
}

/// Grow `warm` by gradient screening over `pool` until the largest gradient
/// falls to `ctx.threshold` or `ctx.max_new_ops` operators were added.
pub fn adapt_stage_with(
    h: &SubspaceHamiltonian,
    warm: Direction,
    pool: &[ExcitationOp],
    cfg: &SolverConfig,
    ctx: &StageContext,
) -> Result<StageOutcome> {
    let psi0 = reference_state(h.k, h.n_imp_occ, &h.occ_pattern)?;
    if let Some(r) = warm.records().iter().find(|r| r.op.register_size() > psi0.n_qubits()) {
        return Err(Error::Dimension(format!("warm operator {} outside the register", r.op)));
    }
    let ham = CompiledHamiltonian::for_state(h, &psi0)?;
    let mut direction = warm;
    let mut psi = direction.prepare(&psi0);
    let mut e_sub = ham.expectation(&psi);
    let mut selected = Vec::new();
    let mut energies = Vec::new();
    let mut appended = 0;
    loop {
        let hpsi = ham.apply(psi.amps());
        let grads = pool_gradients(&psi, &hpsi, pool);
        let mut best: Option<(usize, f64)> = None;
        for (i, g) in grads.iter().enumerate() {
            if best.is_none_or(|(_, b)| g.abs() > b) {
                best = Some((i, g.abs()));
            }
        }
        let max_grad = best.map_or(0.0, |b| b.1);
        let stop = if max_grad <= ctx.threshold {
            Some(StopReason::Converged)
        } else if appended >= ctx.max_new_ops {
            Some(StopReason::StageBudget)
        } else {
            None
        };
        if let Some(stop) = stop {
            return Ok(StageOutcome {
                direction,
                e_sub,
                selected_gradients: selected,
                energies,
                final_max_gradient: max_grad,
                stop,
            });
        }
        let (idx, g) = best.unwrap();
        log::debug!("stage {}: append {} (|g| = {g:.3e})", ctx.stage, pool[idx]);
        direction.push(pool[idx].clone(), ctx.stage);
        appended += 1;
        selected.push(g);
        e_sub = optimize(&mut direction, &psi0, &ham, cfg, cfg.reopt_all)?;
        energies.push(e_sub);
        psi = direction.prepare(&psi0);
    }
}

/// [`adapt_stage_with`] using the configured threshold and total budget.
pub fn adapt_stage(
    h: &SubspaceHamiltonian,
    warm: Direction,
    pool: &[ExcitationOp],
    cfg: &SolverConfig,
) -> Result<StageOutcome> {
    let budget = cfg
        .max_ops_total
        .saturating_sub(warm.len())
        .min(cfg.max_ops_per_stage.unwrap_or(usize::MAX));
    let stage = warm.records().last().map_or(0, |r| r.stage);
    adapt_stage_with(
        h,
        warm,
        pool,
        cfg,
        &StageContext {
            stage,
            threshold: cfg.grad_threshold,
            max_new_ops: budget,
        },
    )
}

/// All occupied → unoccupied singles and doubles of the stage register.
pub fn uccsd_operators(h: &SubspaceHamiltonian) -> Vec<ExcitationOp> {
    let n = 2 * h.k;
    let occ_orb = h.reference_occupied();
    let occ: Vec<usize> = occ_orb.iter().flat_map(|&i| [2 * i, 2 * i + 1]).collect();
    let vir: Vec<usize> = (0..n).filter(|q| !occ.contains(q)).collect();
    let mut out = Vec::new();
    for &i in &occ {
        for &a in &vir {
            if i % 2 == a % 2 {
                out.push(jw_encode(&[i, a], n).expect("valid single"));
            }
        }
    }
    for (x, &i) in occ.iter().enumerate() {
        for &j in &occ[x + 1..] {
            for (y, &a) in vir.iter().enumerate() {
                for &b in &vir[y + 1..] {
                    if i % 2 + j % 2 == a % 2 + b % 2 {
                        out.push(jw_encode(&[a, b, i, j], n).expect("valid double"));
                    }
                }
            }
        }
    }
    out
}

/// Append every stage UCCSD generator not already in `warm` at zero angle and
/// optimize all parameters jointly.
pub fn uccsd_stage(
    h: &SubspaceHamiltonian,
    warm: Direction,
    cfg: &SolverConfig,
    stage: usize,
) -> Result<StageOutcome> {
    let psi0 = reference_state(h.k, h.n_imp_occ, &h.occ_pattern)?;
    let ham = CompiledHamiltonian::for_state(h, &psi0)?;
    let mut direction = warm;
    for op in uccsd_operators(h) {
        if !direction.contains(&op) {
            direction.push(op, stage);
        }
    }
    let e_sub = optimize(&mut direction, &psi0, &ham, cfg, true)?;
    Ok(StageOutcome {
        direction,
        e_sub,
        selected_gradients: Vec::new(),
        energies: vec![e_sub],
        final_max_gradient: 0.0,
        stop: StopReason::FixedAnsatz,
    })
}

/// Mean-field, embedding and ranking results shared by every stage.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub scf: RhfSolution,
    pub basis: EmbeddingBasis,
    pub ranked: RankedBasis,
}

impl Pipeline {
    pub fn new(ints: &IntegralSet, frag: &FragmentSpec, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let scf = run_rhf_with(
            ints,
            &ScfOptions {
                max_iter: cfg.scf_max_iter,
                conv_tol: cfg.scf_tol,
                ..Default::default()
            },
        )?;
        let basis = build_bath(&scf.density, frag, cfg.delta)?;
        let ranked = rank_environment(ints, &basis)?;
        Ok(Self { scf, basis, ranked })
    }

    pub fn n_env(&self) -> usize {
        self.ranked.n_env()
    }

    pub fn schedule(&self, cfg: &SolverConfig) -> Result<Vec<usize>> {
        let n = self.n_env();
        let s = cfg.stage_schedule.clone().unwrap_or_else(|| (0..=n).collect());
        if let Some(bad) = s.iter().find(|&&x| x > n) {
            return Err(Error::InvalidInput(format!(
                "scheduled stage {bad} exceeds the {n} environment orbitals"
            )));
        }
        Ok(s)
    }

    pub fn stage_hamiltonian(&self, ints: &IntegralSet, n_s: usize) -> Result<SubspaceHamiltonian> {
        stage_hamiltonian(ints, &self.ranked, n_s)
    }
}

/// Walk the stage schedule, carrying the ansatz forward.
pub fn run_expansion(
    ints: &IntegralSet,
    pipe: &Pipeline,
    cfg: &SolverConfig,
    ansatz: Ansatz,
    mode: &str,
) -> Result<RunReport> {
    cfg.validate()?;
    let schedule = pipe.schedule(cfg)?;
    let mut report = RunReport {
        schema_version: SCHEMA_VERSION,
        mode: mode.to_string(),
        label: ints.label.clone(),
        n_orb: ints.n_orb,
        n_elec: ints.n_elec,
        fragment: pipe.basis.fragment.indices().to_vec(),
        n_frag: pipe.basis.n_frag(),
        n_bath: pipe.basis.n_bath(),
        n_core: pipe.basis.n_core(),
        n_vir: pipe.basis.n_vir(),
        e_hf: pipe.scf.energy,
        e_nuc: ints.e_nuc,
        delta_lambda: pipe.ranked.delta_lambda.clone(),
        stages: Vec::new(),
        operators: Vec::new(),
        total_ops: 0,
        final_e_g: pipe.scf.energy,
        e_fci: None,
        error: None,
        measurement: None,
        baseline: None,
        config: cfg.clone(),
    };
    let mut direction = Direction::new();
    let mut state: Option<Statevector> = None;
    let mut prev_k: Option<usize> = None;
    let mut prev_pattern_len = 0;

    for (si, &n_s) in schedule.iter().enumerate() {
        let t0 = Instant::now();
        let h = pipe.stage_hamiltonian(ints, n_s)?;
        let psi0 = reference_state(h.k, h.n_imp_occ, &h.occ_pattern)?;
        let constants = h.e_core + h.e_nuc;
        let ham = CompiledHamiltonian::for_state(&h, &psi0)?;
        let e_reference = ham.expectation(&psi0) + constants;
        let warm_state = match &state {
            Some(prev) => extend_register(prev, &h.occ_pattern[prev_pattern_len..])?,
            None => psi0.clone(),
        };
        let e_warm_start = ham.expectation(&warm_state) + constants;
        let pool = match prev_k {
            None => build_pool(h.k),
            Some(kp) => incremental_pool_between(kp, h.k),
        };
        let before = direction.len();
        let threshold = cfg.threshold_for(si);
        let outcome = match ansatz {
            Ansatz::Adapt => {
                let budget = cfg
                    .max_ops_total
                    .saturating_sub(direction.len())
                    .min(cfg.max_ops_per_stage.unwrap_or(usize::MAX));
                let ctx = StageContext {
                    stage: n_s,
                    threshold,
                    max_new_ops: budget,
                };
                adapt_stage_with(&h, direction.clone(), &pool, cfg, &ctx)
            }
            Ansatz::Uccsd => uccsd_stage(&h, direction.clone(), cfg, n_s),
        }
        .map_err(|e| Error::Stage {
            stage: n_s,
            source: Box::new(e),
        })?;
        direction = outcome.direction;
        let e_g = crate::projection::assemble_energy(outcome.e_sub, h.e_core, h.e_nuc);
        let mut stop = outcome.stop;
        if stop == StopReason::StageBudget && direction.len() >= cfg.max_ops_total {
            stop = StopReason::TotalBudget;
        }
        report.stages.push(StageRecord {
            n_s,
            k: h.k,
            n_qubits: 2 * h.k,
            n_elec_sub: h.n_elec_sub,
            pool_size: pool.len(),
            ops_appended: direction.len() - before,
            threshold,
            e_sub: outcome.e_sub,
            e_core: h.e_core,
            e_nuc: h.e_nuc,
            e_g,
            e_reference,
            e_warm_start,
            selected_gradients: outcome.selected_gradients,
            final_max_gradient: outcome.final_max_gradient,
            energies: outcome.energies.iter().map(|e| e + constants).collect(),
            stop,
            wall_time_s: t0.elapsed().as_secs_f64(),
        });
        log::info!(
            "stage {n_s}: k={} ops={} E_g={e_g:.12}",
            h.k,
            direction.len()
        );
        report.final_e_g = e_g;
        state = Some(direction.prepare(&psi0));
        prev_k = Some(h.k);
        prev_pattern_len = h.occ_pattern.len();
    }

    let mut grads = report
        .stages
        .iter()
        .flat_map(|s| s.selected_gradients.iter().copied())
        .collect::<Vec<_>>()
        .into_iter();
    report.operators = direction
        .records()
        .iter()
        .map(|r| OperatorRecord {
            stage: r.stage,
            label: r.op.to_string(),
            op: r.op.clone(),
            theta: r.theta,
            gradient: if ansatz == Ansatz::Adapt {
                grads.next().unwrap_or(0.0)
            } else {
                0.0
            },
        })
        .collect();
    report.total_ops = direction.len();
    report.measurement = Some(measurement_accounting(&report, cfg, None));
    Ok(report)
}

/// Orbital-expansion ADAPT-VQE.
pub fn oe_run(ints: &IntegralSet, frag: &FragmentSpec, cfg: &SolverConfig) -> Result<RunReport> {
    let pipe = Pipeline::new(ints, frag, cfg)?;
    run_expansion(ints, &pipe, cfg, Ansatz::Adapt, "oe-adapt")
}

/// Orbital-expansion with a fixed UCCSD block per stage.
pub fn oe_uccsd(ints: &IntegralSet, frag: &FragmentSpec, cfg: &SolverConfig) -> Result<RunReport> {
    let pipe = Pipeline::new(ints, frag, cfg)?;
    run_expansion(ints, &pipe, cfg, Ansatz::Uccsd, "oe-uccsd")
}

/// Plain ADAPT-VQE on the full space: the whole system is the fragment, so
/// the basis is the canonical RHF orbitals and there is a single stage.
pub fn adapt_run(ints: &IntegralSet, cfg: &SolverConfig) -> Result<RunReport> {
    let cfg = SolverConfig {
        stage_schedule: Some(vec![0]),
        ..cfg.clone()
    };
    let pipe = Pipeline::new(ints, &FragmentSpec::all(ints.n_orb), &cfg)?;
    run_expansion(ints, &pipe, &cfg, Ansatz::Adapt, "adapt")
}
