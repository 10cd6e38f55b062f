//! Brownian paths, the random transform `Γ(t)` as a wavenumber multiplier,
//! the `η(t)` diagnostics and the tail bounds for `sup η`.
//!
//! All kernels are real and even, so the convolution symbols are real and
//! so is the symbol of `Γ(t)`:
//!
//! ```text
//! γ(t, k) = Π_i exp(β_i(t) a_i(k) − (t/2) a_i(k)²),   a_i(k) = ĥ_i(k) + λ_i
//! ```

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::field::SpectralVectorField;
use crate::operators::NoiseModel;
use crate::par;

/// Seed of Monte-Carlo sample `index`: `seed ⊕ index`. Together with
/// ChaCha8 keyed by `seed_from_u64` this gives every sample its own
/// reproducible stream, independent of the worker count.
pub fn sample_seed(seed: u64, index: u64) -> u64 {
    seed ^ index
}

/// Sampled Brownian motions `β_i(t_m)` on a time grid starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPaths {
    seed: u64,
    times: Vec<f64>,
    /// `values[i][m] = β_i(t_m)`.
    values: Vec<Vec<f64>>,
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.first() != Some(&0.0) {
        return Err(Error::InvalidTimeGrid("first node must be 0".into()));
    }
    if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
        return Err(Error::InvalidTimeGrid(format!(
            "nodes {} and {} are not increasing",
            w[0], w[1]
        )));
    }
    Ok(())
}

impl BrownianPaths {
    /// Samples `channels` independent paths. Channel `i` draws its standard
    /// normal increments from ChaCha8 keyed by `seed` on stream `i`.
    pub fn sample(seed: u64, times: &[f64], channels: usize) -> Result<Self> {
        check_grid(times)?;
        let values = (0..channels)
            .map(|ch| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(ch as u64);
                let mut out = Vec::with_capacity(times.len());
                let mut b = 0.0;
                out.push(0.0);
                for w in times.windows(2) {
                    let z: f64 = rng.sample(StandardNormal);
                    b += (w[1] - w[0]).sqrt() * z;
                    out.push(b);
                }
                out
            })
            .collect();
        Ok(Self {
            seed,
            times: times.to_vec(),
            values,
        })
    }

    /// Paths with prescribed values, for tests and replay.
    pub fn from_values(times: &[f64], values: Vec<Vec<f64>>) -> Result<Self> {
        check_grid(times)?;
        for v in &values {
            if v.len() != times.len() {
                return Err(Error::InvalidArgument("path length differs from grid".into()));
            }
            if v[0] != 0.0 {
                return Err(Error::InvalidArgument("β(0) must be 0".into()));
            }
        }
        Ok(Self {
            seed: 0,
            times: times.to_vec(),
            values,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn channels(&self) -> usize {
        self.values.len()
    }

    /// `β_i(t_m)`.
    pub fn value(&self, channel: usize, m: usize) -> f64 {
        self.values[channel][m]
    }

    pub fn path(&self, channel: usize) -> &[f64] {
        &self.values[channel]
    }

    /// Index of grid time `t`; times must match a node to 1e-12 relative.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let tol = 1e-12 * t.abs().max(1e-300);
        let pos = self.times.partition_point(|&s| s < t - tol);
        match self.times.get(pos) {
            Some(&s) if (s - t).abs() <= tol => Ok(pos),
            _ => Err(Error::OffGrid(t)),
        }
    }

    /// Paths restricted to a subset of node indices (must include 0).
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        let times: Vec<f64> = indices.iter().map(|&i| self.times[i]).collect();
        check_grid(&times)?;
        Ok(Self {
            seed: self.seed,
            times,
            values: self
                .values
                .iter()
                .map(|v| indices.iter().map(|&i| v[i]).collect())
                .collect(),
        })
    }
}

/// Symbol of `Γ(t)` built from a noise model and one set of paths.
#[derive(Debug, Clone, Copy)]
pub struct GammaMultiplier<'a> {
    model: &'a NoiseModel,
    paths: &'a BrownianPaths,
}

/// Distinct `(a_1(k), …, a_N(k))` tuples over the grid; the sup/inf of the
/// symbol over k only depends on these.
fn distinct_shifts(model: &NoiseModel) -> Vec<Vec<f64>> {
    let size = model.grid().size();
    let n_ch = model.len();
    let mut tuples: Vec<Vec<f64>> = (0..size)
        .map(|idx| {
            model
                .channels()
                .iter()
                .map(|c| c.symbol()[idx] + c.lambda())
                .collect()
        })
        .collect();
    tuples.sort_by(|a, b| a.partial_cmp(b).expect("finite symbols"));
    tuples.dedup_by(|a, b| {
        (0..n_ch).all(|i| (a[i] - b[i]).abs() <= 1e-13 * (1.0 + b[i].abs()))
    });
    tuples
}

impl<'a> GammaMultiplier<'a> {
    pub fn new(model: &'a NoiseModel, paths: &'a BrownianPaths) -> Result<Self> {
        if paths.channels() != model.len() {
            return Err(Error::InvalidArgument(format!(
                "{} paths for {} noise channels",
                paths.channels(),
                model.len()
            )));
        }
        Ok(Self { model, paths })
    }

    pub fn model(&self) -> &NoiseModel {
        self.model
    }

    pub fn paths(&self) -> &BrownianPaths {
        self.paths
    }

    /// Log-symbol `log γ(t_m, k)` at every wavenumber.
    pub fn log_symbol_at(&self, m: usize) -> Vec<f64> {
        let t = self.paths.times[m];
        let size = self.model.grid().size();
        let mut out = vec![0.0; size];
        for (i, ch) in self.model.channels().iter().enumerate() {
            let b = self.paths.value(i, m);
            let lam = ch.lambda();
            for (o, h) in out.iter_mut().zip(ch.symbol()) {
                let a = h + lam;
                *o += b * a - 0.5 * t * a * a;
            }
        }
        out
    }

    /// `γ(t, k)` (or `1/γ` when `inverse`), at grid time `t`.
    pub fn symbol(&self, t: f64, inverse: bool) -> Result<Vec<f64>> {
        let m = self.paths.index_of(t)?;
        Ok(self.symbol_at(m, inverse))
    }

    pub fn symbol_at(&self, m: usize, inverse: bool) -> Vec<f64> {
        let sign = if inverse { -1.0 } else { 1.0 };
        self.log_symbol_at(m)
            .into_iter()
            .map(|l| (sign * l).exp())
            .collect()
    }

    /// `Γ(t)F` or `Γ⁻¹(t)F`.
    pub fn apply(&self, t: f64, f: &SpectralVectorField, inverse: bool) -> Result<SpectralVectorField> {
        let s = self.symbol(t, inverse)?;
        let mut out = f.clone();
        out.apply_symbol_slice(&s);
        Ok(out)
    }

    /// The `η(t)` pair at node `m`.
    fn eta_at_with(&self, m: usize, shifts: &[Vec<f64>]) -> EtaValues {
        let t = self.paths.times[m];
        let betas: Vec<f64> = (0..self.model.len()).map(|i| self.paths.value(i, m)).collect();
        let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
        for a in shifts {
            let f: f64 = a
                .iter()
                .zip(&betas)
                .map(|(a, b)| b * a - 0.5 * t * a * a)
                .sum();
            hi = hi.max(f);
            lo = lo.min(f);
        }
        if shifts.is_empty() || self.model.is_empty() {
            hi = 0.0;
            lo = 0.0;
        }
        let log_analytic: f64 = self
            .model
            .channels()
            .iter()
            .zip(&betas)
            .map(|(c, b)| 3.0 * b.abs() * c.operator_bound() - t * c.alpha())
            .sum();
        EtaValues {
            exact_l2: (2.0 * hi - lo).exp(),
            analytic_bound: log_analytic.exp(),
            sup_symbol: hi.exp(),
            sup_inverse_symbol: (-lo).exp(),
        }
    }
}

/// Both evaluations of `η(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaValues {
    /// `sup|γ| · sup|γ| · sup|1/γ|`, the L² multiplier-norm surrogate.
    pub exact_l2: f64,
    /// `Π exp(3|β_i|(|h_i|₁ + |λ_i|) − t α_i)`.
    pub analytic_bound: f64,
    pub sup_symbol: f64,
    pub sup_inverse_symbol: f64,
}

/// `η(t)` for `p ∈ (3/2, 2)` at grid time `t`. Both evaluations use
/// quantities that do not depend on p; the exponent is validated only.
pub fn eta(g: &GammaMultiplier<'_>, t: f64, p: f64) -> Result<EtaValues> {
    if !(p > 1.5 && p < 2.0) {
        return Err(Error::InvalidExponent(p));
    }
    let m = g.paths.index_of(t)?;
    Ok(g.eta_at_with(m, &distinct_shifts(g.model)))
}

/// Per-time `η` diagnostics of one path sample.
#[derive(Debug, Clone)]
pub struct NoiseDiagnostics {
    pub times: Vec<f64>,
    pub eta: Vec<EtaValues>,
    pub betas: Vec<Vec<f64>>,
    pub alphas: Vec<f64>,
    pub gamma_constant: f64,
    /// `sup` over the grid of the L² surrogate.
    pub eta_inf_exact: f64,
    /// `sup` over the grid of the analytic bound.
    pub eta_inf_analytic: f64,
}

impl NoiseDiagnostics {
    pub fn compute(g: &GammaMultiplier<'_>) -> Self {
        let shifts = distinct_shifts(g.model);
        let eta: Vec<EtaValues> = (0..g.paths.times.len())
            .map(|m| g.eta_at_with(m, &shifts))
            .collect();
        let eta_inf_exact = eta.iter().map(|e| e.exact_l2).fold(0.0, f64::max);
        let eta_inf_analytic = eta.iter().map(|e| e.analytic_bound).fold(0.0, f64::max);
        Self {
            times: g.paths.times.clone(),
            betas: g.paths.values.clone(),
            alphas: g.model.channels().iter().map(|c| c.alpha()).collect(),
            gamma_constant: g.model.gamma_constant(),
            eta,
            eta_inf_exact,
            eta_inf_analytic,
        }
    }

    /// CSV with columns `t, eta_exact_l2, eta_analytic, beta_1..beta_N`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "t,eta_exact_l2,eta_analytic")?;
        for i in 0..self.betas.len() {
            write!(w, ",beta_{}", i + 1)?;
        }
        writeln!(w)?;
        for (m, t) in self.times.iter().enumerate() {
            write!(
                w,
                "{},{},{}",
                fmt17(*t),
                fmt17(self.eta[m].exact_l2),
                fmt17(self.eta[m].analytic_bound)
            )?;
            for b in &self.betas {
                write!(w, ",{}", fmt17(b[m]))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Fixed 17-significant-digit float formatting for byte-reproducible output.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// `P(sup η > r) ≤ 2N r^{−Nα/γ²}` with `α = min α_i`, `γ = 3 max(|h_i|₁+|λ_i|)`.
pub fn tail_probability_bound(r: f64, model: &NoiseModel) -> Result<f64> {
    if !(r > 1.0) {
        return Err(Error::InvalidArgument(format!("tail bound needs r > 1, got {r}")));
    }
    if model.is_empty() {
        return Ok(0.0);
    }
    let n = model.len() as f64;
    let gamma = model.gamma_constant();
    Ok(2.0 * n * r.powf(-n * model.alpha_min() / (gamma * gamma)))
}

/// Monte-Carlo estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl McEstimate {
    pub fn from_hits(hits: usize, samples: usize) -> Self {
        let p = hits as f64 / samples as f64;
        Self {
            estimate: p,
            stderr: (p * (1.0 - p) / samples as f64).sqrt(),
            samples,
        }
    }
}

/// Estimates `P[sup_{0≤t≤T} exp(β(t) − νt) ≥ r]` by monitoring `n_paths`
/// paths at `steps` uniform times. Discrete monitoring misses crossings
/// between nodes, so the estimate is biased low; it approaches `r^{−2ν}` as
/// `T` grows and the step shrinks.
pub fn hitting_law_mc(
    nu: f64,
    r: f64,
    t_max: f64,
    steps: usize,
    n_paths: usize,
    seed: u64,
) -> Result<McEstimate> {
    if !(nu > 0.0) {
        return Err(Error::InvalidArgument(format!("hitting law needs ν > 0, got {nu}")));
    }
    if !(r > 1.0) {
        return Err(Error::InvalidArgument(format!("hitting law needs r > 1, got {r}")));
    }
    if !(t_max > 0.0) || steps == 0 || n_paths == 0 {
        return Err(Error::InvalidArgument("empty Monte-Carlo run".into()));
    }
    let dt = t_max / steps as f64;
    let sd = dt.sqrt();
    let level = r.ln();
    let drift = nu * dt;
    const BATCH: usize = 64;
    let batches = n_paths.div_ceil(BATCH);
    let hits: usize = par::map_range(batches, |b| {
        let mut count = 0;
        for path in b * BATCH..((b + 1) * BATCH).min(n_paths) {
            let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(seed, path as u64));
            let mut x = 0.0;
            for _ in 0..steps {
                let z: f64 = rng.sample(StandardNormal);
                x += sd * z - drift;
                if x >= level {
                    count += 1;
                    break;
                }
            }
        }
        count
    })
    .into_iter()
    .sum();
    Ok(McEstimate::from_hits(hits, n_paths))
}

/// `r^{−2ν}`.
pub fn hitting_law_exact(nu: f64, r: f64) -> f64 {
    r.powf(-2.0 * nu)
}
