//! Exponential-Euler time stepper for the random PDE, an independent check
//! on the Picard solution:
//! `y_{m+1} = e^{ΔtΔ}(y_m + Δt Γ⁻¹(t_m) M(Γ(t_m) y_m))`.

use crate::error::{Error, Result};
use crate::field::SpectralVectorField;
use crate::noise::{BrownianPaths, GammaMultiplier};
use crate::operators::{heat_semigroup, NoiseModel};
use crate::solver::duhamel::Integrand;

/// Growth of `|y|₂` over `|y₀|₂` that aborts the run.
pub const BLOW_UP: f64 = 1e6;

/// Steps over the nodes of `paths` (which need not be uniform) and returns
/// `y` at the nodes whose index is a multiple of `keep_every`.
pub fn exponential_euler(
    u0: &SpectralVectorField,
    model: &NoiseModel,
    paths: &BrownianPaths,
    nonlinear: bool,
    keep_every: usize,
) -> Result<Vec<(usize, SpectralVectorField)>> {
    if keep_every == 0 {
        return Err(Error::InvalidArgument("keep_every must be positive".into()));
    }
    let gamma = if model.is_empty() {
        None
    } else {
        Some(GammaMultiplier::new(model, paths)?)
    };
    let integrand = Integrand::new(gamma, nonlinear);
    let times = paths.times();
    let y0 = u0.l2_norm();
    let mut y = u0.clone();
    let mut out = vec![(0, y.clone())];
    for m in 0..times.len() - 1 {
        let dt = times[m + 1] - times[m];
        let n = integrand.eval(m, &y);
        y.axpy(dt, &n);
        y = heat_semigroup(&y, dt)?;
        let norm = y.l2_norm();
        if !norm.is_finite() || (y0 > 0.0 && norm > BLOW_UP * y0) {
            return Err(Error::BlowUp {
                step: m + 1,
                growth: if y0 > 0.0 { norm / y0 } else { f64::INFINITY },
            });
        }
        if (m + 1) % keep_every == 0 {
            out.push((m + 1, y.clone()));
        }
    }
    Ok(out)
}

/// `max_m |a_m − b_m|₂ / max_m |b_m|₂`.
pub fn sup_relative_gap(a: &[&SpectralVectorField], b: &[&SpectralVectorField]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument("trajectories differ in length".into()));
    }
    let mut gap = 0.0f64;
    let mut scale = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        gap = gap.max(x.sub(y)?.l2_norm());
        scale = scale.max(y.l2_norm());
    }
    Ok(if scale > 0.0 { gap / scale } else { gap })
}
