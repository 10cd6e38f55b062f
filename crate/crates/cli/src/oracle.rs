//! Picard against exponential Euler on a common fine path.

use stochvort::noise::{sample_seed, BrownianPaths};
use stochvort::solver::smallness::report_for_norm;
use stochvort::solver::{picard_solve, Gate};
use stochvort::verify::{exponential_euler, sup_relative_gap};
use stochvort::field::{lp_norm, to_physical};
use stochvort::verify::estimates::fit_slope;

use crate::error::{CliError, Result};
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleStudy {
    /// Exponential-Euler steps, coarsest first.
    pub steps: Vec<f64>,
    /// Sup-over-nodes relative L² gap to the Picard solution per step.
    pub gaps: Vec<f64>,
    /// Least-squares slope of `log gap` against `log Δt`.
    pub order: f64,
    /// Uniform step of the Picard reference grid.
    pub picard_step: f64,
    pub picard_iterations: usize,
}

/// Solves the scenario by Picard on a uniform grid `refine` times finer than
/// the smallest Euler step, then runs exponential Euler with each step in
/// `steps` on the same Brownian path and compares at the nodes of the
/// coarsest step.
pub fn oracle_study(scn: &Scenario, seed: u64, steps: &[f64], refine: usize) -> Result<OracleStudy> {
    if steps.is_empty() || refine == 0 {
        return Err(CliError::Usage("oracle study needs steps and a refinement factor".into()));
    }
    let t_end = scn.solver.horizon;
    let fine = steps[steps.len() - 1] / refine as f64;
    let intervals = (t_end / fine).round() as usize;
    let stride = |dt: f64| -> Result<usize> {
        let s = (dt / fine).round() as usize;
        if s == 0 || ((s as f64) * fine - dt).abs() > 1e-9 * dt || !intervals.is_multiple_of(s) {
            return Err(CliError::Usage(format!("step {dt} does not divide the horizon {t_end} on the fine grid")));
        }
        Ok(s)
    };
    let coarse = stride(steps[0])?;
    let times: Vec<f64> = (0..=intervals).map(|j| t_end * j as f64 / intervals as f64).collect();
    let paths = BrownianPaths::sample(sample_seed(seed, 0), &times, scn.model.len())?;
    let diag = scn.diagnostics(&paths)?;
    let u0 = scn.initial_data(&diag);
    let constants = scn.solver.constants.expect("constants set");
    let report = report_for_norm(lp_norm(&to_physical(&u0), 1.5)?, &diag, &scn.solver, constants);
    let mut cfg = scn.solver.clone();
    cfg.tol = cfg.tol.min(1e-12);
    cfg.probe = false;
    let rec = picard_solve(&u0, &scn.model, &paths, &cfg, Gate::Checked(&report))?;
    let reference: Vec<_> = (0..=intervals).step_by(coarse).map(|m| &rec.y[m]).collect();

    let mut gaps = Vec::with_capacity(steps.len());
    for &dt in steps {
        let s = stride(dt)?;
        let idx: Vec<usize> = (0..=intervals).step_by(s).collect();
        let sub = paths.restrict(&idx)?;
        let ee = exponential_euler(&u0, &scn.model, &sub, cfg.nonlinear, coarse / s)?;
        let ee_refs: Vec<_> = ee.iter().map(|(_, f)| f).collect();
        gaps.push(sup_relative_gap(&ee_refs, &reference)?);
    }
    let lx: Vec<f64> = steps.iter().map(|s| s.ln()).collect();
    let ly: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
    Ok(OracleStudy {
        steps: steps.to_vec(),
        order: if steps.len() > 1 { fit_slope(&lx, &ly) } else { f64::NAN },
        gaps,
        picard_step: fine,
        picard_iterations: rec.iterations,
    })
}
