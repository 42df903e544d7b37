//! Analytic shot accounting.
//!
//! Each appended operator costs one gradient screen of the stage pool, and
//! each pool gradient costs `ε⁻²` shots.

use serde::Serialize;

use super::pool::pool_size;
use super::{RunReport, SolverConfig};

#[derive(Clone, Debug, Serialize)]
pub struct StageMeasurement {
    pub n_s: usize,
    pub k: usize,
    pub ops: usize,
    pub pool_size: usize,
    pub shots: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasurementSummary {
    pub epsilon: f64,
    pub stages: Vec<StageMeasurement>,
    pub m_total: u64,
    /// `n_ops · ‖P(L)‖ · ε⁻²` for the full-space solver.
    pub m_base: u64,
    pub base_ops: usize,
    pub base_pool_size: usize,
    pub ratio: f64,
    /// `1 / ((L − L_A − L_B) ln 4)`, or `None` when there are no environment orbitals.
    pub ratio_bound: Option<f64>,
    pub ratio_bound_met: Option<bool>,
}

fn inverse_square(eps: f64) -> u64 {
    (1.0 / (eps * eps)).round() as u64
}

/// Shot counts for `report`. Without a baseline the full-space cost assumes
/// the same number of operators as `report`.
pub fn measurement_accounting(
    report: &RunReport,
    cfg: &SolverConfig,
    baseline: Option<&RunReport>,
) -> MeasurementSummary {
    let per = inverse_square(cfg.measurement_epsilon);
    let stages: Vec<StageMeasurement> = report
        .stages
        .iter()
        .map(|s| {
            let p = pool_size(s.k);
            StageMeasurement {
                n_s: s.n_s,
                k: s.k,
                ops: s.ops_appended,
                pool_size: p,
                shots: s.ops_appended as u64 * p as u64 * per,
            }
        })
        .collect();
    let m_total = stages.iter().map(|s| s.shots).sum();
    let base_ops = baseline.map_or(report.total_ops, |b| b.total_ops);
    let base_pool_size = pool_size(report.n_orb);
    let m_base = base_ops as u64 * base_pool_size as u64 * per;
    let ratio = if m_base > 0 {
        m_total as f64 / m_base as f64
    } else {
        f64::NAN
    };
    let n_env = report.n_orb - report.n_frag - report.n_bath;
    let ratio_bound = (n_env > 0).then(|| 1.0 / (n_env as f64 * 4f64.ln()));
    let ratio_bound_met = ratio_bound
        .filter(|_| ratio.is_finite())
        .map(|b| ratio <= b);
    MeasurementSummary {
        epsilon: cfg.measurement_epsilon,
        stages,
        m_total,
        m_base,
        base_ops,
        base_pool_size,
        ratio,
        ratio_bound,
        ratio_bound_met,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_square_is_exact_for_round_epsilons() {
        assert_eq!(inverse_square(1e-3), 1_000_000);
        assert_eq!(inverse_square(1e-2), 10_000);
    }
}
