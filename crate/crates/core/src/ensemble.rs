//! Random test fields: white noise, band-limited ensembles and Gaussian bumps.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::field::{to_spectral, GridSpec, PhysicalVectorField, SpectralVectorField};

/// Independent standard normal values at every grid point and component.
pub fn white_noise<R: Rng + ?Sized>(grid: GridSpec, rng: &mut R) -> PhysicalVectorField {
    let s = grid.size();
    let mut comp = || -> Vec<f64> { (0..s).map(|_| rng.sample(StandardNormal)).collect() };
    let c = [comp(), comp(), comp()];
    PhysicalVectorField::from_components(grid, c).expect("sizes match")
}

/// Leray projection onto divergence-free fields, `F̂ − k (k·F̂)/|k|²`.
pub fn project_divergence_free(f: &SpectralVectorField) -> SpectralVectorField {
    let g = *f.grid();
    let mut out = f.clone();
    for idx in 0..g.size() {
        let k = g.kd_vec(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            continue;
        }
        let dot = f.component(0)[idx] * k[0] + f.component(1)[idx] * k[1] + f.component(2)[idx] * k[2];
        for c in 0..3 {
            out.component_mut(c)[idx] -= dot * (k[c] / k2);
        }
    }
    out
}

/// Mean-zero white noise keeping only modes with every `|mode index| ≤ kmax`,
/// optionally projected onto divergence-free fields.
pub fn band_limited<R: Rng + ?Sized>(
    grid: GridSpec,
    kmax: usize,
    divergence_free: bool,
    rng: &mut R,
) -> SpectralVectorField {
    let noise = white_noise(grid, rng);
    let mut f = to_spectral(&noise).expect("white noise is finite");
    let cut = kmax as i64;
    for idx in 0..grid.size() {
        let (i, j, l) = grid.unflatten(idx);
        let keep = idx != 0
            && grid.mode(i).abs() <= cut
            && grid.mode(j).abs() <= cut
            && grid.mode(l).abs() <= cut
            && [i, j, l].iter().all(|&m| m != grid.n() / 2);
        if !keep {
            for c in 0..3 {
                f.component_mut(c)[idx] = Complex64::new(0.0, 0.0);
            }
        }
    }
    if divergence_free {
        f = project_divergence_free(&f);
    }
    f
}

/// Periodized Gaussian bump `exp(−|ξ − centre|²/(2σ²))` in component 0.
pub fn gaussian_bump(grid: GridSpec, sigma: f64, centre: [f64; 3]) -> PhysicalVectorField {
    let len = grid.length();
    PhysicalVectorField::from_fn(grid, |x| {
        let mut r2 = 0.0;
        for a in 0..3 {
            let mut d = (x[a] - centre[a]).rem_euclid(len);
            if d > 0.5 * len {
                d -= len;
            }
            r2 += d * d;
        }
        [(-r2 / (2.0 * sigma * sigma)).exp(), 0.0, 0.0]
    })
}
