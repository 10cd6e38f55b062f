//! The Duhamel term `F(z)(t) = ∫₀ᵗ e^{(t−s)Δ} Γ⁻¹(s) M(Γ(s) z(s)) ds` by
//! product integration.
//!
//! On each interval the integrand is interpolated linearly between its
//! nodal values and the heat factor `exp(−|k|²(t−s))` is integrated exactly
//! mode by mode. The semigroup property turns the integral into a one-pass
//! recursion over the nodes:
//!
//! ```text
//! F(t_{m+1}) = e^{hΔ} F(t_m) + h ψ(|k|²h) N_m + h (φ₁ − ψ)(|k|²h) N_{m+1}
//! ```
//!
//! with `φ₁(x) = ∫₀¹ e^{−xu} du` and `ψ(x) = ∫₀¹ u e^{−xu} du`.

use crate::error::{Error, Result};
use crate::field::{GridSpec, SpectralVectorField};
use crate::noise::GammaMultiplier;
use crate::operators::nonlinearity_m;

/// `(φ₁(x), ψ(x))`.
pub(crate) fn phi_psi(x: f64) -> (f64, f64) {
    if x < 0.05 {
        // Alternating series; 12 terms leave a remainder below 1e-20.
        let (mut phi, mut psi) = (0.0, 0.0);
        let mut term = 1.0; // (−x)^j / j!
        for j in 0..12 {
            phi += term / (j + 1) as f64;
            psi += term / (j + 2) as f64;
            term *= -x / (j + 1) as f64;
        }
        (phi, psi)
    } else {
        let em1 = -(-x).exp_m1();
        (em1 / x, (em1 - x * (-x).exp()) / (x * x))
    }
}

/// Integrand `N(s) = Γ⁻¹(s) M(Γ(s) z)` at the path nodes.
#[derive(Debug, Clone, Copy)]
pub struct Integrand<'a> {
    gamma: Option<GammaMultiplier<'a>>,
    nonlinear: bool,
}

impl<'a> Integrand<'a> {
    /// `gamma = None` means `Γ ≡ I`.
    pub fn new(gamma: Option<GammaMultiplier<'a>>, nonlinear: bool) -> Self {
        let gamma = gamma.filter(|g| !g.model().is_empty());
        Self { gamma, nonlinear }
    }

    pub fn gamma(&self) -> Option<&GammaMultiplier<'a>> {
        self.gamma.as_ref()
    }

    /// `N` at path node `m`.
    pub fn eval(&self, m: usize, z: &SpectralVectorField) -> SpectralVectorField {
        if !self.nonlinear {
            return SpectralVectorField::zeros(*z.grid());
        }
        match &self.gamma {
            None => nonlinearity_m(z),
            Some(g) => {
                let log = g.log_symbol_at(m);
                let fwd: Vec<f64> = log.iter().map(|l| l.exp()).collect();
                let mut u = z.clone();
                u.apply_symbol_slice(&fwd);
                let mut out = nonlinearity_m(&u);
                let inv: Vec<f64> = log.iter().map(|l| (-l).exp()).collect();
                out.apply_symbol_slice(&inv);
                out
            }
        }
    }
}

/// Streaming product-integration of the Duhamel term.
#[derive(Debug, Clone)]
pub struct DuhamelSweep {
    /// Integer `|mode|²` class of each flat index.
    class: Vec<u32>,
    k_unit2: f64,
    current: SpectralVectorField,
    last: Option<(f64, SpectralVectorField)>,
}

impl DuhamelSweep {
    pub fn new(grid: GridSpec) -> Self {
        let class = (0..grid.size())
            .map(|idx| {
                let (i, j, l) = grid.unflatten(idx);
                let m = [grid.mode(i), grid.mode(j), grid.mode(l)];
                (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as u32
            })
            .collect();
        Self {
            class,
            k_unit2: grid.k_unit() * grid.k_unit(),
            current: SpectralVectorField::zeros(grid),
            last: None,
        }
    }

    /// Feeds the integrand at the next node and returns `F(t)`. The first
    /// node must be `t = 0`.
    pub fn push(&mut self, t: f64, n_t: SpectralVectorField) -> Result<&SpectralVectorField> {
        match self.last.take() {
            None => {
                if t != 0.0 {
                    return Err(Error::InvalidTimeGrid("Duhamel sweep must start at t = 0".into()));
                }
            }
            Some((t0, n0)) => {
                let h = t - t0;
                if !(h > 0.0) {
                    return Err(Error::InvalidTimeGrid(format!("nodes {t0} and {t} not increasing")));
                }
                let classes = self.class.iter().copied().max().unwrap_or(0) as usize + 1;
                let table: Vec<[f64; 3]> = (0..classes)
                    .map(|c| {
                        let x = c as f64 * self.k_unit2 * h;
                        let (phi, psi) = phi_psi(x);
                        [(-x).exp(), h * psi, h * (phi - psi)]
                    })
                    .collect();
                for c in 0..3 {
                    let f = self.current.component_mut(c);
                    let a = n0.component(c);
                    let b = n_t.component(c);
                    for (idx, v) in f.iter_mut().enumerate() {
                        let [e, wl, wr] = table[self.class[idx] as usize];
                        *v = *v * e + a[idx] * wl + b[idx] * wr;
                    }
                }
            }
        }
        self.last = Some((t, n_t));
        Ok(&self.current)
    }

    pub fn current(&self) -> &SpectralVectorField {
        &self.current
    }
}

/// `F(z)(t)` for a trajectory `z` given at every node up to `t`.
pub fn duhamel_f(
    z: &[SpectralVectorField],
    times: &[f64],
    integrand: &Integrand<'_>,
    t: f64,
) -> Result<SpectralVectorField> {
    let tol = 1e-12 * t.abs().max(1e-300);
    let end = times
        .iter()
        .position(|&s| (s - t).abs() <= tol)
        .ok_or(Error::OffGrid(t))?;
    if z.len() <= end {
        return Err(Error::InvalidArgument("trajectory shorter than requested time".into()));
    }
    let grid = *z[0].grid();
    let mut sweep = DuhamelSweep::new(grid);
    for m in 0..=end {
        sweep.push(times[m], integrand.eval(m, &z[m]))?;
    }
    Ok(sweep.current().clone())
}

/// `F(z)(t_m)` at every node.
pub fn duhamel_all(
    z: &[SpectralVectorField],
    times: &[f64],
    integrand: &Integrand<'_>,
) -> Result<Vec<SpectralVectorField>> {
    let grid = *z[0].grid();
    let nvals = crate::par::map_range(times.len(), |m| integrand.eval(m, &z[m]));
    let mut sweep = DuhamelSweep::new(grid);
    let mut out = Vec::with_capacity(times.len());
    for (m, n) in nvals.into_iter().enumerate() {
        out.push(sweep.push(times[m], n)?.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_psi_branches_agree() {
        for &x in &[0.049999, 0.05, 0.0500001] {
            let (a, b) = phi_psi(x);
            let (c, d) = phi_psi(x * (1.0 + 1e-12));
            assert!((a - c).abs() < 1e-13 && (b - d).abs() < 1e-13);
        }
        let (phi, psi) = phi_psi(0.0);
        assert_eq!((phi, psi), (1.0, 0.5));
        // Quadrature check at a moderate argument.
        let x = 3.7;
        let n = 200_000;
        let (mut p, mut q) = (0.0, 0.0);
        for i in 0..n {
            let u = (i as f64 + 0.5) / n as f64;
            p += (-x * u).exp() / n as f64;
            q += u * (-x * u).exp() / n as f64;
        }
        let (a, b) = phi_psi(x);
        assert!((a - p).abs() < 1e-10 && (b - q).abs() < 1e-10);
    }
}
