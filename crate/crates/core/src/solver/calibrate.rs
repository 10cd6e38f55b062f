//! Empirical constants `C₁`, `C₂` and `C* = (2C₁C₂)⁻¹` from deterministic
//! (`Γ ≡ I`) runs of the mild map.

use crate::error::{Error, Result};
use crate::field::{lp_norm, to_physical, SpectralVectorField};
use crate::operators::heat_semigroup;
use crate::solver::duhamel::Integrand;
use crate::solver::kato::KatoTrajectory;
use crate::solver::picard::mild_map;
use crate::solver::{Constants, SolverConfig};

/// Relative size of the perturbation used for the Lipschitz sweep.
const PERTURBATION: f64 = 0.1;

/// Sweep sizes relative to `1/(4 C_lin²)`.
const SWEEP: [f64; 4] = [0.125, 0.25, 0.5, 1.0];

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub constants: Constants,
    /// `‖e^{tΔ}U₀‖_{p,∞} / |U₀|_{3/2}`.
    pub linear_ratio: f64,
    /// `(|U₀|_{3/2}, ‖G(z)‖ / (|U₀|_{3/2} + ‖z‖²))` over the sweep.
    pub growth: Vec<(f64, f64)>,
    /// `(|U₀|_{3/2}, ‖G(z) − G(z̄)‖ / (|U₀|_{3/2} ‖z − z̄‖))` over the sweep.
    pub lipschitz: Vec<(f64, f64)>,
}

fn unit(f: &SpectralVectorField) -> Result<SpectralVectorField> {
    let n = lp_norm(&to_physical(f), 1.5)?;
    if !(n > 0.0) {
        return Err(Error::InvalidArgument("calibration needs nonzero fields".into()));
    }
    Ok(f.scale(1.0 / n))
}

/// Calibrates on the data shape `shape` with perturbation direction `direction`.
pub fn calibrate(
    shape: &SpectralVectorField,
    direction: &SpectralVectorField,
    cfg: &SolverConfig,
) -> Result<Calibration> {
    cfg.validate()?;
    let e = &cfg.exponents;
    let times = cfg.time_grid();
    let shape = unit(shape)?;
    let direction = unit(direction)?;
    let heat = |f: &SpectralVectorField| -> Result<Vec<SpectralVectorField>> {
        times.iter().map(|&t| heat_semigroup(f, t)).collect()
    };
    let z1 = heat(&shape)?;
    let w1 = heat(&direction)?;
    let linear_ratio = KatoTrajectory::evaluate(&z1, &times, e)?.znorm;
    let s_ref = 1.0 / (4.0 * linear_ratio * linear_ratio);
    let integrand = Integrand::new(None, true);

    let mut growth = Vec::new();
    let mut lipschitz = Vec::new();
    for factor in SWEEP {
        let s = s_ref * factor;
        let u0 = shape.scale(s);
        let z: Vec<_> = z1.iter().map(|f| f.scale(s)).collect();
        let zb: Vec<_> = z
            .iter()
            .zip(&w1)
            .map(|(a, w)| {
                let mut b = a.clone();
                b.axpy(PERTURBATION * s, w);
                b
            })
            .collect();
        let gz = mild_map(&u0, &z, &times, &integrand)?;
        let gzb = mild_map(&u0, &zb, &times, &integrand)?;
        let zn = KatoTrajectory::evaluate(&z, &times, e)?.znorm;
        let gn = KatoTrajectory::evaluate(&gz, &times, e)?.znorm;
        growth.push((s, gn / (s + zn * zn)));
        let dg = crate::solver::diagnostics::trajectory_distance(&gz, &gzb, &times, e)?;
        let dz = crate::solver::diagnostics::trajectory_distance(&z, &zb, &times, e)?;
        lipschitz.push((s, dg / (s * dz)));
    }
    let c1 = growth.iter().map(|g| g.1).fold(linear_ratio, f64::max);
    let c2 = lipschitz.iter().map(|l| l.1).fold(0.0, f64::max) / (2.0 * c1);
    if !(c2 > 0.0 && c2.is_finite()) {
        return Err(Error::InvalidArgument("calibration found no nonlinear response".into()));
    }
    Ok(Calibration {
        constants: Constants::from_c1_c2(c1, c2),
        linear_ratio,
        growth,
        lipschitz,
    })
}
