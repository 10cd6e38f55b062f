//! Initial vorticity presets, rescaled to a target `|U₀|_{3/2}`.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ensemble::band_limited;
use crate::error::{Error, Result};
use crate::field::{curl, lp_norm, to_physical, to_spectral, GridSpec, PhysicalVectorField, SpectralVectorField};

/// Highest mode index kept by the random preset.
pub const RANDOM_KMAX: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialPreset {
    /// Band-limited divergence-free random field.
    Random,
    /// `(0, sin ξ₁, 0)` in box units.
    Shear,
    /// Curl of the Taylor–Green velocity `(sin ξ₁ cos ξ₂ cos ξ₃, −cos ξ₁ sin ξ₂ cos ξ₃, 0)`.
    TaylorGreen,
    Zero,
}

impl fmt::Display for InitialPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Random => "random",
            Self::Shear => "shear",
            Self::TaylorGreen => "taylor_green",
            Self::Zero => "zero",
        })
    }
}

impl FromStr for InitialPreset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "random" => Ok(Self::Random),
            "shear" => Ok(Self::Shear),
            "taylor_green" => Ok(Self::TaylorGreen),
            "zero" => Ok(Self::Zero),
            other => Err(format!("unknown initial preset '{other}' (random, shear, taylor_green, zero)")),
        }
    }
}

/// Unscaled preset field. `seed` is used by the random preset only.
pub fn preset_shape(grid: GridSpec, preset: InitialPreset, seed: u64) -> SpectralVectorField {
    let k = grid.k_unit();
    match preset {
        InitialPreset::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            band_limited(grid, RANDOM_KMAX, true, &mut rng)
        }
        InitialPreset::Shear => {
            let f = PhysicalVectorField::from_fn(grid, |x| [0.0, (k * x[0]).sin(), 0.0]);
            to_spectral(&f).expect("finite")
        }
        InitialPreset::TaylorGreen => {
            let v = PhysicalVectorField::from_fn(grid, |x| {
                let (a, b, c) = (k * x[0], k * x[1], k * x[2]);
                [a.sin() * b.cos() * c.cos(), -a.cos() * b.sin() * c.cos(), 0.0]
            });
            curl(&to_spectral(&v).expect("finite"))
        }
        InitialPreset::Zero => SpectralVectorField::zeros(grid),
    }
}

/// `f` rescaled so that `|f|_{3/2} = target`. Zero stays zero.
pub fn rescale_norm32(f: &SpectralVectorField, target: f64) -> Result<SpectralVectorField> {
    if !(target >= 0.0 && target.is_finite()) {
        return Err(Error::InvalidArgument(format!("target norm {target} must be finite and non-negative")));
    }
    let n = lp_norm(&to_physical(f), 1.5)?;
    if n == 0.0 {
        return Ok(f.clone());
    }
    Ok(f.scale(target / n))
}
