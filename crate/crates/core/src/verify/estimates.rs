//! Empirical checks of the functional inequalities behind the fixed-point
//! argument. "A constant exists" is tested as resolution independence of
//! the worst ratio over a random ensemble.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ensemble::{band_limited, gaussian_bump};
use crate::error::{Error, Result};
use crate::field::{forward_batch, inverse_batch, lp_norm, to_physical, GridSpec, SpectralVectorField};
use crate::noise::{sample_seed, BrownianPaths, GammaMultiplier};
use crate::operators::{convolution_noise, nonlinearity_m, NoiseModel};
use crate::solver::kato::field_norms;
use crate::solver::Exponents;

/// Allowed growth of the worst ratio per resolution doubling.
pub const DOUBLING_GROWTH: f64 = 1.25;

/// Worst-case ratio statistics of one inequality over a resolution sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub name: String,
    /// Exponent pair `(source, target)` of the inequality.
    pub exponents: (f64, f64),
    /// `(n, max ratio, median ratio)` per resolution.
    pub sweep: Vec<(usize, f64, f64)>,
    pub pass: bool,
}

impl EstimateReport {
    /// Builds the report from the raw ratios at each resolution. Undefined
    /// ratios (zero denominators) must already be removed.
    pub fn from_ratios(name: &str, exponents: (f64, f64), ratios: Vec<(usize, Vec<f64>)>) -> Self {
        let sweep: Vec<(usize, f64, f64)> = ratios
            .into_iter()
            .map(|(n, mut r)| {
                r.sort_by(|a, b| a.partial_cmp(b).expect("finite ratios"));
                let max = r.last().copied().unwrap_or(f64::NAN);
                let med = if r.is_empty() { f64::NAN } else { r[r.len() / 2] };
                (n, max, med)
            })
            .collect();
        let pass = sweep.iter().all(|s| s.1.is_finite())
            && sweep.windows(2).all(|w| w[1].1 < DOUBLING_GROWTH * w[0].1);
        Self {
            name: name.to_string(),
            exponents,
            sweep,
            pass,
        }
    }

    pub fn max_ratio(&self) -> f64 {
        self.sweep.iter().map(|s| s.1).fold(0.0, f64::max)
    }
}

fn scalar_lp(v: &[f64], p: f64, dv: f64) -> f64 {
    (v.iter().map(|x| x.abs().powf(p)).sum::<f64>() * dv).powf(1.0 / p)
}

/// Setup of the heat-smoothing slope fit.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatSmoothingSetup {
    pub n: usize,
    pub length: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub times: usize,
    /// Widths of the Gaussian scale family.
    pub widths: Vec<f64>,
    /// Extra band-limited white-noise members.
    pub rough_members: usize,
    pub seed: u64,
}

impl Default for HeatSmoothingSetup {
    fn default() -> Self {
        let widths = (0..20)
            .map(|j| 0.008 * (0.3f64 / 0.008).powf(j as f64 / 19.0))
            .collect();
        Self {
            n: 64,
            length: 1.0,
            t_min: 1e-4,
            t_max: 1e-2,
            times: 9,
            widths,
            rough_members: 2,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatSmoothingReport {
    pub q: f64,
    pub p: f64,
    pub derivative: bool,
    pub predicted_slope: f64,
    pub fitted_slope: f64,
    /// `(t, sup_u |e^{tΔ}u|_p / |u|_q)`.
    pub points: Vec<(f64, f64)>,
    pub pass: bool,
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Fits the decay exponent of `sup_u |e^{tΔ}u|_p / |u|_q` (or of
/// `|D₁ e^{tΔ}u|_p / |u|_q`) over log-spaced `t`. The supremum runs over a
/// scale family of Gaussian bumps and a few rough members; the fitted slope
/// must be within 0.1 of `−(3/2)(1/q − 1/p)` (minus 1/2 with a derivative).
pub fn check_heat_smoothing(q: f64, p: f64, derivative: bool, setup: &HeatSmoothingSetup) -> Result<HeatSmoothingReport> {
    if !(q > 1.0) || q > p {
        return Err(Error::InvalidArgument(format!("need 1 < q ≤ p, got q = {q}, p = {p}")));
    }
    let grid = GridSpec::new(setup.n, setup.length)?;
    let dv = grid.cell_volume();
    let centre = [0.5 * setup.length; 3];
    let mut members: Vec<Vec<f64>> = setup
        .widths
        .iter()
        .map(|&s| gaussian_bump(grid, s, centre).into_components()[0].clone())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(setup.seed);
    for _ in 0..setup.rough_members {
        let f = band_limited(grid, setup.n / 2 - 1, false, &mut rng);
        members.push(to_physical(&f).into_components()[0].clone());
    }
    let refs: Vec<&[f64]> = members.iter().map(|v| v.as_slice()).collect();
    let spectral = forward_batch(&grid, &refs);
    let q_norms: Vec<f64> = members.iter().map(|m| scalar_lp(m, q, dv)).collect();

    let times: Vec<f64> = (0..setup.times)
        .map(|i| setup.t_min * (setup.t_max / setup.t_min).powf(i as f64 / (setup.times - 1) as f64))
        .collect();
    let points: Vec<(f64, f64)> = crate::par::map_slice(&times, |&t| {
        let evolved: Vec<Vec<Complex64>> = spectral
            .iter()
            .map(|s| {
                (0..grid.size())
                    .map(|idx| {
                        let mut v = s[idx] * (-grid.k_squared(idx) * t).exp();
                        if derivative {
                            v *= Complex64::new(0.0, grid.kd_vec(idx)[0]);
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        let refs: Vec<&[Complex64]> = evolved.iter().map(|v| v.as_slice()).collect();
        let phys = inverse_batch(&grid, &refs);
        let best = phys
            .iter()
            .zip(&q_norms)
            .map(|(v, qn)| scalar_lp(v, p, dv) / qn)
            .fold(0.0, f64::max);
        (t, best)
    });
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let fitted = fit_slope(&lx, &ly);
    let predicted = -1.5 * (1.0 / q - 1.0 / p) - if derivative { 0.5 } else { 0.0 };
    Ok(HeatSmoothingReport {
        q,
        p,
        derivative,
        predicted_slope: predicted,
        fitted_slope: fitted,
        points,
        pass: (fitted - predicted).abs() <= 0.1,
    })
}

/// Random divergence-free ensemble with band limit proportional to `n`.
pub fn rough_ensemble(grid: GridSpec, size: usize, seed: u64) -> Vec<SpectralVectorField> {
    (0..size)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(seed, i as u64));
            band_limited(grid, (grid.n() / 4).max(1), true, &mut rng)
        })
        .collect()
}

/// `|M(z)|_q / (|z|_p |∇z|_p)` with `1/q = 2/p − 1/3`, over rough ensembles
/// at each resolution.
pub fn check_m_estimate(p: f64, resolutions: &[usize], ensemble: usize, seed: u64) -> Result<EstimateReport> {
    let e = crate::solver::Exponents::new(p)?;
    let mut ratios = Vec::new();
    for &n in resolutions {
        let grid = GridSpec::new(n, 2.0 * std::f64::consts::PI)?;
        let fields = rough_ensemble(grid, ensemble, seed);
        let r: Vec<Result<Option<f64>>> = crate::par::map_slice(&fields, |z| {
            let (zp, dz) = field_norms(z, p)?;
            let grad = (dz[0] * dz[0] + dz[1] * dz[1] + dz[2] * dz[2]).sqrt();
            if zp * grad == 0.0 {
                return Ok(None);
            }
            let m = lp_norm(&to_physical(&nonlinearity_m(z)), e.q)?;
            Ok(Some(m / (zp * grad)))
        });
        let r: Vec<f64> = r.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
        ratios.push((n, r));
    }
    Ok(EstimateReport::from_ratios("nonlinearity", (p, e.q), ratios))
}

/// `|z|_{r₁} / |∇z|_p` with `r₁ = 3p/(3−p)`, on mean-zero fields only
/// (constants violate it on the torus).
pub fn check_sobolev(p: f64, resolutions: &[usize], ensemble: usize, seed: u64) -> Result<EstimateReport> {
    if !(p > 1.0 && p < 3.0) {
        return Err(Error::InvalidExponent(p));
    }
    let r1 = 3.0 * p / (3.0 - p);
    let mut ratios = Vec::new();
    for &n in resolutions {
        let grid = GridSpec::new(n, 2.0 * std::f64::consts::PI)?;
        let fields = rough_ensemble(grid, ensemble, seed);
        let r: Vec<Result<f64>> = crate::par::map_slice(&fields, |z| {
            let (_, dz) = field_norms(z, p)?;
            let grad = (dz[0] * dz[0] + dz[1] * dz[1] + dz[2] * dz[2]).sqrt();
            Ok(lp_norm(&to_physical(z), r1)? / grad)
        });
        ratios.push((n, r.into_iter().collect::<Result<Vec<_>>>()?));
    }
    Ok(EstimateReport::from_ratios("sobolev", (p, r1), ratios))
}

/// `max_{i,j} |D_i D_j K(U)|_p / max_i |D_i U|_p`, the second-derivative
/// bound on the velocity, for `p ∈ (1, ∞)`.
pub fn check_calderon_zygmund(p: f64, resolutions: &[usize], ensemble: usize, seed: u64) -> Result<EstimateReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    let mut ratios = Vec::new();
    for &n in resolutions {
        let grid = GridSpec::new(n, 2.0 * std::f64::consts::PI)?;
        let fields = rough_ensemble(grid, ensemble, seed);
        let e = crate::solver::Exponents::new(1.8)?;
        let r: Vec<f64> = crate::par::map_slice(&fields, |u| {
            let pt = crate::solver::diagnostics::velocity_point(u, 0.0, &Exponents { p, ..e });
            pt.ddx_ratio.unwrap_or(0.0)
        });
        ratios.push((n, r));
    }
    Ok(EstimateReport::from_ratios("calderon_zygmund", (p, p), ratios))
}

/// Results of the noise-operator bounds on one path.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierReport {
    /// `max |B_i z|_q / (|h_i|₁ |z|_q)` over channels, fields and `q`.
    pub convolution_ratio: f64,
    /// `max (|Γ z|_q + |Γ⁻¹ z|_q) / (C_t |z|_q)`.
    pub gamma_ratio: f64,
    /// `max |Γ z|₂ / (sup|γ| |z|₂)`.
    pub l2_ratio: f64,
    pub pass: bool,
}

/// Checks the convolution bound `|B_i z|_q ≤ |h_i|₁ |z|_q`, the bound
/// `|Γ(t)z|_q + |Γ⁻¹(t)z|_q ≤ C_t |z|_q` with
/// `C_t = 2 Π exp(|β_i(t)| b_i + t b_i²/2)`, `b_i = |h_i|₁ + |λ_i|`, and the
/// L² multiplier bound, on random fields at a few path nodes.
pub fn check_multiplier_bounds(
    model: &NoiseModel,
    paths: &BrownianPaths,
    exponents: &[f64],
    ensemble: usize,
    seed: u64,
) -> Result<MultiplierReport> {
    let g = GammaMultiplier::new(model, paths)?;
    let grid = *model.grid();
    let fields = rough_ensemble(grid, ensemble, seed);
    let nodes: Vec<usize> = {
        let last = paths.times().len() - 1;
        let mut v = vec![0, last / 4, last / 2, last];
        v.dedup();
        v
    };
    let (mut conv, mut gam, mut l2) = (0.0f64, 0.0f64, 0.0f64);
    for &m in &nodes {
        let t = paths.times()[m];
        let fwd = g.symbol_at(m, false);
        let inv = g.symbol_at(m, true);
        let sup = fwd.iter().cloned().fold(0.0, f64::max);
        let c_t: f64 = 2.0
            * model
                .channels()
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let b = c.operator_bound();
                    (paths.value(i, m).abs() * b + 0.5 * t * b * b).exp()
                })
                .product::<f64>();
        for z in &fields {
            let mut gz = z.clone();
            gz.apply_symbol_slice(&fwd);
            let mut giz = z.clone();
            giz.apply_symbol_slice(&inv);
            l2 = l2.max(gz.l2_norm() / (sup * z.l2_norm()));
            let (zp, gp, gip) = (to_physical(z), to_physical(&gz), to_physical(&giz));
            for &q in exponents {
                let zq = lp_norm(&zp, q)?;
                gam = gam.max((lp_norm(&gp, q)? + lp_norm(&gip, q)?) / (c_t * zq));
                if m == 0 {
                    for (i, ch) in model.channels().iter().enumerate() {
                        if ch.l1_norm() > 0.0 {
                            let b = to_physical(&convolution_noise(z, model, i)?);
                            conv = conv.max(lp_norm(&b, q)? / (ch.l1_norm() * zq));
                        }
                    }
                }
            }
        }
    }
    Ok(MultiplierReport {
        convolution_ratio: conv,
        gamma_ratio: gam,
        l2_ratio: l2,
        pass: conv <= 1.0 + 1e-6 && gam <= 1.0 && l2 <= 1.0 + 1e-10,
    })
}
