//! Picard iteration `y^{k+1} = G(y^k)` for the mild equation
//! `y(t) = e^{tΔ}U₀ + F(y)(t)`.

use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::field::{GridSpec, SpectralVectorField};
use crate::noise::{fmt17, BrownianPaths, GammaMultiplier};
use crate::operators::{biot_savart, heat_semigroup, NoiseModel};
use crate::solver::duhamel::{DuhamelSweep, Integrand};
use crate::solver::kato::{KatoPoint, KatoTrajectory};
use crate::solver::smallness::SmallnessReport;
use crate::solver::SolverConfig;

/// Nodes whose integrand values are evaluated together.
const BLOCK: usize = 16;

/// Admission of a run: a passing smallness report or an explicit override.
#[derive(Debug, Clone, Copy)]
pub enum Gate<'r> {
    Checked(&'r SmallnessReport),
    Override,
}

/// Outcome of the resolution-doubling probe after a failed iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeVerdict {
    /// The same data and path converge at doubled resolution.
    ResolutionLimited,
    /// Doubling the resolution does not help: the data are too large.
    DataTooLarge,
    NotRun,
}

#[derive(Debug, Clone)]
pub struct NonConvergence {
    pub iterations: usize,
    /// `‖y^{k+1} − y^k‖_{p,∞}`.
    pub differences: Vec<f64>,
    pub ratios: Vec<f64>,
    pub verdict: ProbeVerdict,
}

impl fmt::Display for NonConvergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cause = match self.verdict {
            ProbeVerdict::ResolutionLimited => "quadrature too coarse (converges at doubled resolution)",
            ProbeVerdict::DataTooLarge => "data too large (fails at doubled resolution too)",
            ProbeVerdict::NotRun => "resolution probe not run",
        };
        write!(f, "Picard iteration did not converge in {} iterations; {cause}; ratios:", self.iterations)?;
        for r in &self.ratios {
            write!(f, " {r:.4e}")?;
        }
        Ok(())
    }
}

/// Converged solution and its monitors.
#[derive(Debug, Clone)]
pub struct SolutionRecord {
    pub times: Vec<f64>,
    /// `y(t_m)`.
    pub y: Vec<SpectralVectorField>,
    pub kato: KatoTrajectory,
    pub iterations: usize,
    pub differences: Vec<f64>,
    /// `d_k / d_{k−1}`, from the second iteration on.
    pub ratios: Vec<f64>,
    /// `‖y − G(y)‖_{p,∞}`.
    pub mild_residual: f64,
    /// `max_m |R(t_m)|₂ / max_m |U(t_m)|₂` for the vorticity-form residual
    /// `R = U − e^{tΔ}Γ(t)U₀ − ∫ e^{(t−s)Δ}Γ(t)Γ⁻¹(s)M(U(s))ds`.
    pub vorticity_residual: f64,
    model: NoiseModel,
    paths: BrownianPaths,
}

impl SolutionRecord {
    pub fn grid(&self) -> &GridSpec {
        self.y[0].grid()
    }

    pub fn model(&self) -> &NoiseModel {
        &self.model
    }

    pub fn paths(&self) -> &BrownianPaths {
        &self.paths
    }

    /// `U(t_m) = Γ(t_m) y(t_m)`.
    pub fn vorticity(&self, m: usize) -> SpectralVectorField {
        if self.model.is_empty() {
            return self.y[m].clone();
        }
        let g = GammaMultiplier::new(&self.model, &self.paths).expect("checked at solve time");
        let mut u = self.y[m].clone();
        u.apply_symbol_slice(&g.symbol_at(m, false));
        u
    }

    /// `X(t_m) = K(U(t_m))`.
    pub fn velocity(&self, m: usize) -> SpectralVectorField {
        biot_savart(&self.vorticity(m))
    }

    /// CSV with columns `iteration, difference, ratio`.
    pub fn write_contraction_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "iteration,difference,ratio")?;
        for (k, d) in self.differences.iter().enumerate() {
            let r = if k == 0 { String::new() } else { fmt17(self.ratios[k - 1]) };
            writeln!(w, "{},{},{}", k + 1, fmt17(*d), r)?;
        }
        Ok(())
    }
}

fn check_inputs(u0: &SpectralVectorField, model: &NoiseModel, paths: &BrownianPaths) -> Result<()> {
    if u0.grid() != model.grid() {
        return Err(Error::GridMismatch("initial data and noise model grids differ".into()));
    }
    let t = paths.times();
    if t.len() < 2 || t[0] != 0.0 {
        return Err(Error::InvalidTimeGrid("solver grid needs t₀ = 0 and at least one interval".into()));
    }
    Ok(())
}

/// One application of `G` in place: `y ← e^{tΔ}U₀ + F(y)`. Returns
/// `‖G(y) − y‖_{p,∞}` and `‖y‖_{p,∞}` (norms of the input `y`).
fn picard_sweep(
    y: &mut [SpectralVectorField],
    u0: &SpectralVectorField,
    times: &[f64],
    integrand: &Integrand<'_>,
    cfg: &SolverConfig,
) -> Result<(f64, f64)> {
    let e = &cfg.exponents;
    let mut sweep = DuhamelSweep::new(*u0.grid());
    let mut diff_pts = Vec::with_capacity(times.len());
    let mut norm_pts = Vec::with_capacity(times.len());
    let mut start = 0;
    while start < times.len() {
        let end = (start + BLOCK).min(times.len());
        let nvals = crate::par::map_range(end - start, |j| integrand.eval(start + j, &y[start + j]));
        for (j, n) in nvals.into_iter().enumerate() {
            let m = start + j;
            let f = sweep.push(times[m], n)?;
            let mut next = heat_semigroup(u0, times[m])?;
            next.axpy(1.0, f);
            let delta = next.sub(&y[m])?;
            let old = std::mem::replace(&mut y[m], next);
            let (dp, np) = crate::par::join(
                || KatoPoint::evaluate(&delta, times[m], e),
                || KatoPoint::evaluate(&old, times[m], e),
            );
            diff_pts.push(dp?);
            norm_pts.push(np?);
        }
        start = end;
    }
    Ok((
        crate::solver::kato::znorm_of(&diff_pts),
        crate::solver::kato::znorm_of(&norm_pts),
    ))
}

enum Iterated {
    Converged { iterations: usize, differences: Vec<f64>, ratios: Vec<f64> },
    Failed { iterations: usize, differences: Vec<f64>, ratios: Vec<f64> },
}

fn iterate(
    y: &mut [SpectralVectorField],
    u0: &SpectralVectorField,
    times: &[f64],
    integrand: &Integrand<'_>,
    cfg: &SolverConfig,
) -> Result<Iterated> {
    let mut differences = Vec::new();
    let mut ratios = Vec::new();
    for k in 1..=cfg.max_iter {
        let (d, n) = picard_sweep(y, u0, times, integrand, cfg)?;
        if let Some(&prev) = differences.last() {
            ratios.push(if prev > 0.0 { d / prev } else { 0.0 });
        }
        differences.push(d);
        log::debug!("Picard iteration {k}: difference {d:.3e}, norm {n:.3e}");
        if !d.is_finite() {
            return Ok(Iterated::Failed { iterations: k, differences, ratios });
        }
        if d <= cfg.tol * n {
            return Ok(Iterated::Converged { iterations: k, differences, ratios });
        }
    }
    Ok(Iterated::Failed { iterations: cfg.max_iter, differences, ratios })
}

/// Residual pass: `‖y − G(y)‖_{p,∞}` and the relative vorticity-form residual.
fn residuals(
    y: &[SpectralVectorField],
    u0: &SpectralVectorField,
    times: &[f64],
    gamma: Option<&GammaMultiplier<'_>>,
    cfg: &SolverConfig,
) -> Result<(f64, f64)> {
    let e = &cfg.exponents;
    let grid = *u0.grid();
    let plain = Integrand::new(gamma.copied(), cfg.nonlinear);
    let mut mild = DuhamelSweep::new(grid);
    let mut vort = DuhamelSweep::new(grid);
    let mut pts = Vec::with_capacity(times.len());
    let (mut r_max, mut u_max) = (0.0f64, 0.0f64);
    let mut start = 0;
    while start < times.len() {
        let end = (start + BLOCK).min(times.len());
        let block = crate::par::map_range(end - start, |j| {
            let m = start + j;
            let n_mild = plain.eval(m, &y[m]);
            // Vorticity form: U = Γ y, integrand Γ⁻¹(s) M(U(s)).
            let (u, n_vort) = match gamma {
                None => {
                    let u = y[m].clone();
                    let n = if cfg.nonlinear {
                        crate::operators::nonlinearity_m(&u)
                    } else {
                        SpectralVectorField::zeros(grid)
                    };
                    (u, n)
                }
                Some(g) => {
                    let mut u = y[m].clone();
                    u.apply_symbol_slice(&g.symbol_at(m, false));
                    let mut n = if cfg.nonlinear {
                        crate::operators::nonlinearity_m(&u)
                    } else {
                        SpectralVectorField::zeros(grid)
                    };
                    n.apply_symbol_slice(&g.symbol_at(m, true));
                    (u, n)
                }
            };
            (n_mild, u, n_vort)
        });
        for (j, (n_mild, u, n_vort)) in block.into_iter().enumerate() {
            let m = start + j;
            let t = times[m];
            let heat = heat_semigroup(u0, t)?;
            let mut g_y = heat.clone();
            g_y.axpy(1.0, mild.push(t, n_mild)?);
            pts.push(KatoPoint::evaluate(&y[m].sub(&g_y)?, t, e)?);

            let mut rhs = heat;
            rhs.axpy(1.0, vort.push(t, n_vort)?);
            if let Some(g) = gamma {
                rhs.apply_symbol_slice(&g.symbol_at(m, false));
            }
            r_max = r_max.max(u.sub(&rhs)?.l2_norm());
            u_max = u_max.max(u.l2_norm());
        }
        start = end;
    }
    let rel = if u_max > 0.0 { r_max / u_max } else { r_max };
    Ok((crate::solver::kato::znorm_of(&pts), rel))
}

/// Solves `y = e^{tΔ}U₀ + F(y)` on the node set of `paths`.
pub fn picard_solve(
    u0: &SpectralVectorField,
    model: &NoiseModel,
    paths: &BrownianPaths,
    cfg: &SolverConfig,
    gate: Gate<'_>,
) -> Result<SolutionRecord> {
    cfg.validate()?;
    check_inputs(u0, model, paths)?;
    if let Gate::Checked(report) = gate {
        if !report.admits() {
            return Err(Error::SmallnessRefused(report.summary()));
        }
    }
    let gamma = if model.is_empty() {
        None
    } else {
        Some(GammaMultiplier::new(model, paths)?)
    };
    let times = paths.times().to_vec();
    let integrand = Integrand::new(gamma, cfg.nonlinear);
    let mut y: Vec<SpectralVectorField> = times
        .iter()
        .map(|&t| heat_semigroup(u0, t))
        .collect::<Result<_>>()?;

    match iterate(&mut y, u0, &times, &integrand, cfg)? {
        Iterated::Converged { iterations, differences, ratios } => {
            let (mild_residual, vorticity_residual) = residuals(&y, u0, &times, gamma.as_ref(), cfg)?;
            let kato = KatoTrajectory::evaluate(&y, &times, &cfg.exponents)?;
            Ok(SolutionRecord {
                times,
                y,
                kato,
                iterations,
                differences,
                ratios,
                mild_residual,
                vorticity_residual,
                model: model.clone(),
                paths: paths.clone(),
            })
        }
        Iterated::Failed { iterations, differences, ratios } => {
            drop(y);
            let verdict = if cfg.probe {
                probe(u0, model, paths, cfg)?
            } else {
                ProbeVerdict::NotRun
            };
            Err(Error::NonConvergence(Box::new(NonConvergence {
                iterations,
                differences,
                ratios,
                verdict,
            })))
        }
    }
}

/// Reruns the iteration at doubled spatial resolution on the same path.
fn probe(
    u0: &SpectralVectorField,
    model: &NoiseModel,
    paths: &BrownianPaths,
    cfg: &SolverConfig,
) -> Result<ProbeVerdict> {
    let g = u0.grid();
    let fine = GridSpec::new(2 * g.n(), g.length())?;
    let u0f = u0.resample(fine)?;
    let modelf = model.on_grid(fine)?;
    let gamma = if modelf.is_empty() {
        None
    } else {
        Some(GammaMultiplier::new(&modelf, paths)?)
    };
    let times = paths.times();
    let integrand = Integrand::new(gamma, cfg.nonlinear);
    let mut y: Vec<SpectralVectorField> = times
        .iter()
        .map(|&t| heat_semigroup(&u0f, t))
        .collect::<Result<_>>()?;
    Ok(match iterate(&mut y, &u0f, times, &integrand, cfg)? {
        Iterated::Converged { .. } => ProbeVerdict::ResolutionLimited,
        Iterated::Failed { .. } => ProbeVerdict::DataTooLarge,
    })
}

/// `F(z)` at every node of `times` for a trajectory `z`, as used by the
/// calibration and by tests.
pub fn mild_map(
    u0: &SpectralVectorField,
    z: &[SpectralVectorField],
    times: &[f64],
    integrand: &Integrand<'_>,
) -> Result<Vec<SpectralVectorField>> {
    let f = crate::solver::duhamel::duhamel_all(z, times, integrand)?;
    f.into_iter()
        .zip(times)
        .map(|(mut fm, &t)| {
            fm.axpy(1.0, &heat_semigroup(u0, t)?);
            Ok(fm)
        })
        .collect()
}
