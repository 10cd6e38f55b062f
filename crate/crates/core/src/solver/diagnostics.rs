//! Run diagnostics: weak pairings, velocity norms, divergence and data
//! dependence.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{derivative_array, inverse_batch, GridSpec, PhysicalVectorField, SpectralVectorField, to_spectral};
use crate::noise::fmt17;
use crate::solver::kato::KatoTrajectory;
use crate::solver::picard::SolutionRecord;
use crate::solver::Exponents;

/// `∫ y(t_m, ξ)·φ(ξ) dξ` at every node.
pub fn weak_pairing(y: &[SpectralVectorField], phi: &SpectralVectorField) -> Vec<f64> {
    y.iter().map(|f| f.inner(phi)).collect()
}

/// Test function `cos(k·ξ) e_c` for an integer mode vector.
pub fn cosine_mode(grid: GridSpec, mode: [i64; 3], component: usize) -> Result<SpectralVectorField> {
    if component > 2 {
        return Err(Error::InvalidArgument(format!("component {component} out of range")));
    }
    let ku = grid.k_unit();
    let f = PhysicalVectorField::from_fn(grid, |x| {
        let phase = ku * (mode[0] as f64 * x[0] + mode[1] as f64 * x[1] + mode[2] as f64 * x[2]);
        let mut v = [0.0; 3];
        v[component] = phase.cos();
        v
    });
    to_spectral(&f)
}

/// CSV with columns `t, pair_1..pair_K`.
pub fn write_pairings_csv<W: Write>(times: &[f64], pairings: &[Vec<f64>], mut w: W) -> std::io::Result<()> {
    write!(w, "t")?;
    for k in 0..pairings.len() {
        write!(w, ",pair_{}", k + 1)?;
    }
    writeln!(w)?;
    for (m, t) in times.iter().enumerate() {
        write!(w, "{}", fmt17(*t))?;
        for p in pairings {
            write!(w, ",{}", fmt17(p[m]))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// `|k·F̂|₂ / |k ⊗ F̂|₂`, zero for constant fields.
pub fn relative_divergence(f: &SpectralVectorField) -> f64 {
    let g = f.grid();
    let (mut num, mut den) = (0.0, 0.0);
    for idx in 0..g.size() {
        let k = g.kd_vec(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let mut d = Complex64::new(0.0, 0.0);
        for c in 0..3 {
            let v = f.component(c)[idx];
            d += v * k[c];
            den += k2 * v.norm_sqr();
        }
        num += d.norm_sqr();
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// Largest relative divergence of `y`, `U` and `X` over a run.
pub fn max_relative_divergence(rec: &SolutionRecord) -> [f64; 3] {
    let per = crate::par::map_range(rec.times.len(), |m| {
        let u = rec.vorticity(m);
        let x = crate::operators::biot_savart(&u);
        [relative_divergence(&rec.y[m]), relative_divergence(&u), relative_divergence(&x)]
    });
    per.into_iter().fold([0.0; 3], |a, b| [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2])])
}

/// `‖a − b‖_{p,∞}` for trajectories on the same nodes.
pub fn trajectory_distance(
    a: &[SpectralVectorField],
    b: &[SpectralVectorField],
    times: &[f64],
    e: &Exponents,
) -> Result<f64> {
    if a.len() != b.len() || a.len() != times.len() {
        return Err(Error::InvalidArgument("trajectories differ in length".into()));
    }
    let diff: Vec<SpectralVectorField> = a.iter().zip(b).map(|(x, y)| x.sub(y)).collect::<Result<_>>()?;
    Ok(KatoTrajectory::evaluate(&diff, times, e)?.znorm)
}

/// Velocity-to-vorticity norm ratios at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityPoint {
    pub t: f64,
    /// `|X|_{r₁} / |U|_p`.
    pub x_ratio: Option<f64>,
    /// `max_i |D_i X|_p / |U|_p`.
    pub dx_ratio: Option<f64>,
    /// `max_{i,j} |D_i D_j X|_p / max_i |D_i U|_p`.
    pub ddx_ratio: Option<f64>,
    /// `t^{1−3/(2p)} |X|_{r₁}`.
    pub weighted_x: f64,
    /// `max_i t^{(3/2)(1−1/p)} |D_i X|_p`.
    pub weighted_dx: f64,
}

fn magnitude_norm(c: &[Vec<f64>], p: f64, dv: f64) -> f64 {
    let s: f64 = (0..c[0].len())
        .map(|i| (c[0][i] * c[0][i] + c[1][i] * c[1][i] + c[2][i] * c[2][i]).sqrt().powf(p))
        .sum();
    (s * dv).powf(1.0 / p)
}

fn derivative(f: &[Complex64], g: &GridSpec, axes: &[usize]) -> Vec<Complex64> {
    axes.iter().fold(f.to_vec(), |v, &a| derivative_array(g, &v, a))
}

/// Norm ratios for a vorticity `U` at time `t`.
pub fn velocity_point(u: &SpectralVectorField, t: f64, e: &Exponents) -> VelocityPoint {
    let g = *u.grid();
    let x = crate::operators::biot_savart(u);
    let mut arrays: Vec<Vec<Complex64>> = Vec::with_capacity(42);
    for c in 0..3 {
        arrays.push(u.component(c).to_vec());
    }
    for c in 0..3 {
        arrays.push(x.component(c).to_vec());
    }
    for i in 0..3 {
        for c in 0..3 {
            arrays.push(derivative(u.component(c), &g, &[i]));
        }
        for c in 0..3 {
            arrays.push(derivative(x.component(c), &g, &[i]));
        }
    }
    for i in 0..3 {
        for j in i..3 {
            for c in 0..3 {
                arrays.push(derivative(x.component(c), &g, &[i, j]));
            }
        }
    }
    let refs: Vec<&[Complex64]> = arrays.iter().map(|v| v.as_slice()).collect();
    let phys = inverse_batch(&g, &refs);
    let dv = g.cell_volume();
    let p = e.p;
    let u_p = magnitude_norm(&phys[0..3], p, dv);
    let x_r1 = magnitude_norm(&phys[3..6], e.r1, dv);
    let (mut du, mut dx) = (0.0f64, 0.0f64);
    for i in 0..3 {
        let base = 6 + 6 * i;
        du = du.max(magnitude_norm(&phys[base..base + 3], p, dv));
        dx = dx.max(magnitude_norm(&phys[base + 3..base + 6], p, dv));
    }
    let mut ddx = 0.0f64;
    for pair in 0..6 {
        let base = 24 + 3 * pair;
        ddx = ddx.max(magnitude_norm(&phys[base..base + 3], p, dv));
    }
    let ratio = |a: f64, b: f64| if b > 0.0 { Some(a / b) } else { None };
    VelocityPoint {
        t,
        x_ratio: ratio(x_r1, u_p),
        dx_ratio: ratio(dx, u_p),
        ddx_ratio: ratio(ddx, du),
        weighted_x: if t > 0.0 { e.value_weight(t) * x_r1 } else { 0.0 },
        weighted_dx: if t > 0.0 { e.gradient_weight(t) * dx } else { 0.0 },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityReport {
    pub points: Vec<VelocityPoint>,
}

impl VelocityReport {
    /// Largest of each ratio over the run, `None` when never defined.
    pub fn max_ratios(&self) -> [Option<f64>; 3] {
        let fold = |get: fn(&VelocityPoint) -> Option<f64>| {
            self.points.iter().filter_map(get).fold(None, |a: Option<f64>, b| Some(a.map_or(b, |a| a.max(b))))
        };
        [fold(|p| p.x_ratio), fold(|p| p.dx_ratio), fold(|p| p.ddx_ratio)]
    }

    /// CSV with columns `t, x_ratio, dx_ratio, ddx_ratio, weighted_x, weighted_dx`;
    /// undefined ratios are left empty.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,x_ratio,dx_ratio,ddx_ratio,weighted_x,weighted_dx")?;
        let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fmt17(p.t),
                opt(p.x_ratio),
                opt(p.dx_ratio),
                opt(p.ddx_ratio),
                fmt17(p.weighted_x),
                fmt17(p.weighted_dx)
            )?;
        }
        Ok(())
    }
}

pub fn velocity_diagnostics(rec: &SolutionRecord, e: &Exponents) -> VelocityReport {
    let points = crate::par::map_range(rec.times.len(), |m| velocity_point(&rec.vorticity(m), rec.times[m], e));
    VelocityReport { points }
}
