//! A scenario assembled from its configuration: grid, noise model, solver
//! settings and initial-data shape.

use stochvort::field::{lp_norm, to_physical, GridSpec, SpectralVectorField};
use stochvort::noise::{sample_seed, BrownianPaths, GammaMultiplier, NoiseDiagnostics};
use stochvort::operators::NoiseModel;
use stochvort::presets::{preset_shape, rescale_norm32, InitialPreset};
use stochvort::solver::smallness::report_for_norm;
use stochvort::solver::{calibrate, picard_solve, Calibration, Gate, SmallnessReport, SolutionRecord, SolverConfig};

use crate::config::{ScenarioConfig, U0Scale};
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub grid: GridSpec,
    pub model: NoiseModel,
    pub solver: SolverConfig,
    /// Preset shape with `|·|_{3/2} = 1` (zero for the zero preset).
    pub shape: SpectralVectorField,
}

/// Everything produced for one path.
#[derive(Debug)]
pub struct PathRun {
    pub paths: BrownianPaths,
    pub diagnostics: NoiseDiagnostics,
    pub u0: SpectralVectorField,
    pub smallness: SmallnessReport,
    pub record: stochvort::Result<SolutionRecord>,
}

impl Scenario {
    pub fn build(config: ScenarioConfig) -> Result<Self> {
        let grid = GridSpec::new(config.n, config.length)?;
        let spec: Vec<_> = config.lambdas.iter().map(|&l| (config.kernel, l)).collect();
        let model = NoiseModel::new(grid, &spec)?;
        let mut solver = SolverConfig::new(config.p, config.horizon, config.intervals)?;
        solver.grading = config.grading;
        solver.tol = config.tol;
        solver.max_iter = config.max_iter;
        solver.constants = config.constants;
        solver.nonlinear = config.nonlinear;
        solver.probe = config.probe;
        solver.validate()?;
        let shape = rescale_norm32(&preset_shape(grid, config.u0_preset, config.u0_seed), 1.0)?;
        Ok(Self {
            config,
            grid,
            model,
            solver,
            shape,
        })
    }

    /// Calibrates the constants when the configuration has none; the result
    /// is stored in both the solver settings and the configuration.
    pub fn ensure_constants(&mut self) -> Result<Option<Calibration>> {
        if self.solver.constants.is_some() {
            return Ok(None);
        }
        let cal = self.run_calibration()?;
        self.solver.constants = Some(cal.constants);
        self.config.constants = Some(cal.constants);
        Ok(Some(cal))
    }

    /// Deterministic calibration on the preset shape (Taylor–Green when the
    /// preset is zero) with a random perturbation direction.
    pub fn run_calibration(&self) -> Result<Calibration> {
        let shape = if self.shape.is_zero() {
            preset_shape(self.grid, InitialPreset::TaylorGreen, 0)
        } else {
            self.shape.clone()
        };
        let direction = preset_shape(self.grid, InitialPreset::Random, self.config.calibration_seed);
        let mut cfg = self.solver.clone();
        cfg.constants = None;
        Ok(calibrate(&shape, &direction, &cfg)?)
    }

    /// Paths of sample `index` under the splitting rule `seed ⊕ index`.
    pub fn paths(&self, seed: u64, index: u64) -> Result<BrownianPaths> {
        Ok(BrownianPaths::sample(
            sample_seed(seed, index),
            &self.solver.time_grid(),
            self.model.len(),
        )?)
    }

    pub fn diagnostics(&self, paths: &BrownianPaths) -> Result<NoiseDiagnostics> {
        let g = GammaMultiplier::new(&self.model, paths)?;
        Ok(NoiseDiagnostics::compute(&g))
    }

    /// `|U₀|_{3/2}` selected by the configured rule for a path.
    pub fn target_norm(&self, diag: &NoiseDiagnostics) -> f64 {
        match self.config.u0_scale {
            U0Scale::Absolute(v) => v,
            U0Scale::RelativeToThreshold(f) => {
                let c_star = self.solver.constants.expect("constants set").c_star;
                f * c_star / diag.eta_inf_analytic
            }
        }
    }

    pub fn initial_data(&self, diag: &NoiseDiagnostics) -> SpectralVectorField {
        self.shape.scale(self.target_norm(diag))
    }

    /// Samples path `index`, checks smallness and solves. Needs constants.
    pub fn run_path(&self, seed: u64, index: u64, override_smallness: bool) -> Result<PathRun> {
        let paths = self.paths(seed, index)?;
        self.run_on_paths(paths, override_smallness)
    }

    pub fn run_on_paths(&self, paths: BrownianPaths, override_smallness: bool) -> Result<PathRun> {
        let constants = self.solver.constants.expect("constants set");
        let diagnostics = self.diagnostics(&paths)?;
        let u0 = self.initial_data(&diagnostics);
        let norm = lp_norm(&to_physical(&u0), 1.5)?;
        let smallness = report_for_norm(norm, &diagnostics, &self.solver, constants);
        let gate = if override_smallness {
            Gate::Override
        } else {
            Gate::Checked(&smallness)
        };
        let record = picard_solve(&u0, &self.model, &paths, &self.solver, gate);
        Ok(PathRun {
            paths,
            diagnostics,
            u0,
            smallness,
            record,
        })
    }
}
