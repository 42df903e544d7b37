//! ADAPT-VQE with stage-wise orbital expansion.
//!
//! A run walks a schedule of stages. Stage `N_s` works in the impurity plus
//! the `N_s` best-ranked environment orbitals. The ansatz from the previous
//! stage is carried over unchanged (new orbitals sit on higher qubits), and
//! new operators are screened from the part of the pool that touches the
//! newly added orbitals.

mod adapt;
mod bfgs;
mod measure;
mod pool;

pub use adapt::{
    adapt_run, adapt_stage, adapt_stage_with, oe_run, oe_uccsd, run_expansion, uccsd_operators,
    uccsd_stage, Ansatz, Pipeline, StageContext, StageOutcome,
};
pub use bfgs::{bfgs_minimize, BfgsResult};
pub use measure::{measurement_accounting, MeasurementSummary, StageMeasurement};
pub use pool::{build_pool, incremental_pool, incremental_pool_between, pool_size};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermisim::{apply_excitation_in_place, ExcitationOp, Statevector};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Gradient threshold `ε_g` for stopping a stage.
    pub grad_threshold: f64,
    /// Optional per-stage thresholds, matched to `stage_schedule` by position.
    pub stage_thresholds: Vec<f64>,
    pub max_ops_total: usize,
    pub max_ops_per_stage: Option<usize>,
    /// `‖∇E‖_∞` at which BFGS stops.
    pub bfgs_tol: f64,
    pub bfgs_max_iter: usize,
    /// Re-optimize every parameter after each append, or only the newest.
    pub reopt_all: bool,
    /// Stages to visit; `None` means `0..=N`.
    pub stage_schedule: Option<Vec<usize>>,
    /// Target precision `ε` for shot accounting.
    pub measurement_epsilon: f64,
    /// Occupation threshold separating bath from core/virtual.
    pub delta: f64,
    pub scf_max_iter: usize,
    pub scf_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grad_threshold: 1e-3,
            stage_thresholds: Vec::new(),
            max_ops_total: 100,
            max_ops_per_stage: None,
            bfgs_tol: 1e-9,
            bfgs_max_iter: 500,
            reopt_all: true,
            stage_schedule: None,
            measurement_epsilon: 1e-3,
            delta: crate::embedding::DEFAULT_DELTA,
            scf_max_iter: 500,
            scf_tol: 1e-10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("grad_threshold", self.grad_threshold),
            ("bfgs_tol", self.bfgs_tol),
            ("measurement_epsilon", self.measurement_epsilon),
            ("delta", self.delta),
            ("scf_tol", self.scf_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(t) = self.stage_thresholds.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(Error::InvalidInput(format!("stage threshold must be positive, got {t}")));
        }
        if let Some(s) = &self.stage_schedule {
            if s.is_empty() {
                return Err(Error::InvalidInput("stage schedule is empty".into()));
            }
            if s.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidInput("stage schedule must be strictly increasing".into()));
            }
        }
        Ok(())
    }

    /// Gradient threshold for the `i`-th scheduled stage.
    pub fn threshold_for(&self, i: usize) -> f64 {
        self.stage_thresholds.get(i).copied().unwrap_or(self.grad_threshold)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectionRecord {
    pub op: ExcitationOp,
    pub theta: f64,
    /// Stage at which the operator was appended.
    pub stage: usize,
}

/// The ordered product of excitation exponentials built so far.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Direction {
    records: Vec<DirectionRecord>,
}

impl Direction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[DirectionRecord] {
        &self.records
    }

    pub fn push(&mut self, op: ExcitationOp, stage: usize) {
        self.records.push(DirectionRecord {
            op,
            theta: 0.0,
            stage,
        });
    }

    pub fn ops(&self) -> Vec<&ExcitationOp> {
        self.records.iter().map(|r| &r.op).collect()
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.theta).collect()
    }

    pub fn set_thetas(&mut self, thetas: &[f64]) -> Result<()> {
        if thetas.len() != self.records.len() {
            return Err(Error::Dimension(format!(
                "{} angles for {} operators",
                thetas.len(),
                self.records.len()
            )));
        }
        if let Some(t) = thetas.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite angle {t}")));
        }
        for (r, t) in self.records.iter_mut().zip(thetas) {
            r.theta = *t;
        }
        Ok(())
    }

    pub fn contains(&self, op: &ExcitationOp) -> bool {
        self.records
            .iter()
            .any(|r| r.op.create == op.create && r.op.annihilate == op.annihilate)
    }

    /// `Π e^{θ_i τ_i} |ψ0⟩`, first record applied first.
    pub fn prepare(&self, psi0: &Statevector) -> Statevector {
        let mut psi = psi0.clone();
        for r in &self.records {
            apply_excitation_in_place(&mut psi, &r.op, r.theta);
        }
        psi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    StageBudget,
    TotalBudget,
    FixedAnsatz,
}

#[derive(Clone, Debug, Serialize)]
pub struct OperatorRecord {
    pub stage: usize,
    pub label: String,
    pub op: ExcitationOp,
    pub theta: f64,
    /// `|∂E/∂θ|` when the operator was selected (0 for fixed ansätze).
    pub gradient: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageRecord {
    pub n_s: usize,
    pub k: usize,
    pub n_qubits: usize,
    pub n_elec_sub: usize,
    pub pool_size: usize,
    pub ops_appended: usize,
    pub threshold: f64,
    pub e_sub: f64,
    pub e_core: f64,
    pub e_nuc: f64,
    pub e_g: f64,
    /// `E_g` of the reference determinant of this stage.
    pub e_reference: f64,
    /// `E_g` of the carried-over state before any new operator.
    pub e_warm_start: f64,
    /// Largest screened gradient before each append.
    pub selected_gradients: Vec<f64>,
    pub final_max_gradient: f64,
    /// `E_g` after each append and re-optimization.
    pub energies: Vec<f64>,
    pub stop: StopReason,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BaselineComparison {
    pub mode: String,
    pub final_e_g: f64,
    pub total_ops: usize,
    pub error: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub mode: String,
    pub label: String,
    pub n_orb: usize,
    pub n_elec: usize,
    pub fragment: Vec<usize>,
    pub n_frag: usize,
    pub n_bath: usize,
    pub n_core: usize,
    pub n_vir: usize,
    pub e_hf: f64,
    pub e_nuc: f64,
    pub delta_lambda: Vec<f64>,
    pub stages: Vec<StageRecord>,
    pub operators: Vec<OperatorRecord>,
    pub total_ops: usize,
    pub final_e_g: f64,
    pub e_fci: Option<f64>,
    pub error: Option<f64>,
    pub measurement: Option<MeasurementSummary>,
    pub baseline: Option<BaselineComparison>,
    pub config: SolverConfig,
}

pub const SCHEMA_VERSION: u32 = 1;

impl RunReport {
    /// Attach an exact reference energy.
    pub fn set_reference(&mut self, e_fci: f64) {
        self.e_fci = Some(e_fci);
        self.error = Some((self.final_e_g - e_fci).abs());
    }

    /// Attach a baseline run and recompute shot accounting against it.
    pub fn set_baseline(&mut self, baseline: &RunReport) {
        self.baseline = Some(BaselineComparison {
            mode: baseline.mode.clone(),
            final_e_g: baseline.final_e_g,
            total_ops: baseline.total_ops,
            error: self.e_fci.map(|e| (baseline.final_e_g - e).abs()),
        });
        self.measurement = Some(measurement_accounting(self, &self.config, Some(baseline)));
    }
}
