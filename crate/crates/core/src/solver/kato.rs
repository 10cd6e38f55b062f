//! Weighted norms of the Kato space `Z_p`.

use std::io::Write;

use num_complex::Complex64;

use crate::error::Result;
use crate::field::{derivative_array, inverse_batch, SpectralVectorField};
use crate::noise::fmt17;
use crate::solver::Exponents;

/// `|f|_p` and `|D_i f|_p`, i = 1, 2, 3.
pub fn field_norms(f: &SpectralVectorField, p: f64) -> Result<(f64, [f64; 3])> {
    let g = *f.grid();
    if f.is_zero() {
        return Ok((0.0, [0.0; 3]));
    }
    let mut arrays: Vec<Vec<Complex64>> = Vec::with_capacity(12);
    for c in 0..3 {
        arrays.push(f.component(c).to_vec());
    }
    for axis in 0..3 {
        for c in 0..3 {
            let comp = f.component(c);
            arrays.push(derivative_array(&g, comp, axis));
        }
    }
    let refs: Vec<&[Complex64]> = arrays.iter().map(|v| v.as_slice()).collect();
    let phys = inverse_batch(&g, &refs);
    let dv = g.cell_volume();
    let norm = |c: &[Vec<f64>]| -> f64 {
        let s: f64 = (0..g.size())
            .map(|i| {
                let m = (c[0][i] * c[0][i] + c[1][i] * c[1][i] + c[2][i] * c[2][i]).sqrt();
                m.powf(p)
            })
            .sum();
        (s * dv).powf(1.0 / p)
    };
    Ok((
        norm(&phys[0..3]),
        [norm(&phys[3..6]), norm(&phys[6..9]), norm(&phys[9..12])],
    ))
}

/// Weighted norms at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KatoPoint {
    pub t: f64,
    /// `t^{1−3/(2p)} |y(t)|_p`.
    pub w0: f64,
    /// `t^{(3/2)(1−1/p)} |D_i y(t)|_p`.
    pub w: [f64; 3],
}

impl KatoPoint {
    pub fn evaluate(f: &SpectralVectorField, t: f64, e: &Exponents) -> Result<Self> {
        if t == 0.0 {
            return Ok(Self { t, w0: 0.0, w: [0.0; 3] });
        }
        let (n0, d) = field_norms(f, e.p)?;
        let gw = e.gradient_weight(t);
        Ok(Self {
            t,
            w0: e.value_weight(t) * n0,
            w: [gw * d[0], gw * d[1], gw * d[2]],
        })
    }

    /// `max_i (w₀ + w_i)`.
    pub fn combined(&self) -> f64 {
        self.w0 + self.w.iter().cloned().fold(0.0, f64::max)
    }
}

/// Time series of weighted norms and the `‖·‖_{p,∞}` norm over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KatoTrajectory {
    pub points: Vec<KatoPoint>,
    pub znorm: f64,
}

impl KatoTrajectory {
    pub fn from_points(points: Vec<KatoPoint>) -> Self {
        let znorm = znorm_of(&points);
        Self { points, znorm }
    }

    pub fn evaluate(traj: &[SpectralVectorField], times: &[f64], e: &Exponents) -> Result<Self> {
        let pts = crate::par::map_range(traj.len(), |m| KatoPoint::evaluate(&traj[m], times[m], e));
        Ok(Self::from_points(pts.into_iter().collect::<Result<Vec<_>>>()?))
    }

    /// CSV with columns `t, w0, w1, w2, w3`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,w0,w1,w2,w3")?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{},{}",
                fmt17(p.t),
                fmt17(p.w0),
                fmt17(p.w[0]),
                fmt17(p.w[1]),
                fmt17(p.w[2])
            )?;
        }
        Ok(())
    }
}

/// `sup_t max_i (t^{1−3/(2p)}|y|_p + t^{(3/2)(1−1/p)}|D_i y|_p)`.
pub fn znorm_of(points: &[KatoPoint]) -> f64 {
    points.iter().map(KatoPoint::combined).fold(0.0, f64::max)
}
