//! Heat semigroup, Biot–Savart operator, convolution noise operators and the
//! vorticity nonlinearity `M`, all as Fourier multipliers or pseudo-spectral
//! products on the periodic grid.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{
    derivative_array,
    forward_batch, inverse_batch, scalar_to_spectral, GridSpec, SpectralVectorField,
};

/// `e^{tΔ}F`, multiplier `exp(−|k|² t)`.
pub fn heat_semigroup(f: &SpectralVectorField, t: f64) -> Result<SpectralVectorField> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite time {t}")));
    }
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let g = *f.grid();
    Ok(f.map_real_symbol(|idx| (-g.k_squared(idx) * t).exp()))
}

/// Heat multiplier `exp(−|k|² t)` as an array, for repeated use.
pub fn heat_symbol(grid: &GridSpec, t: f64) -> Vec<f64> {
    (0..grid.size())
        .map(|idx| (-grid.k_squared(idx) * t).exp())
        .collect()
}

/// Biot–Savart operator `K(U) = curl (−Δ)⁻¹ U`, multiplier `i k × Û / |k|²`
/// with the mean mode set to zero.
pub fn biot_savart(u: &SpectralVectorField) -> SpectralVectorField {
    let g = *u.grid();
    let mut out = SpectralVectorField::zeros(g);
    let i = Complex64::new(0.0, 1.0);
    for idx in 0..g.size() {
        let k = g.kd_vec(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            continue;
        }
        let (a, b, c) = (u.component(0)[idx], u.component(1)[idx], u.component(2)[idx]);
        let s = i / k2;
        out.component_mut(0)[idx] = s * (k[1] * c - k[2] * b);
        out.component_mut(1)[idx] = s * (k[2] * a - k[0] * c);
        out.component_mut(2)[idx] = s * (k[0] * b - k[1] * a);
    }
    out
}

/// Kernel presets for the convolution noise channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `h(ξ) = m (2πε²)^{−3/2} exp(−|ξ|²/(2ε²))`, total mass `m`.
    Gaussian { eps: f64, mass: f64 },
    /// `h(ξ) = ε⁻³ ρ(ξ/ε)` with the unit-mass bump `ρ(x) ∝ exp(−1/(1−|x|²))`.
    MollifiedDirac { eps: f64 },
    /// `h ≡ 0`.
    Zero,
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Gaussian { eps, mass } => write!(f, "gaussian{{eps={eps},mass={mass}}}"),
            Kernel::MollifiedDirac { eps } => write!(f, "mollified_dirac{{eps={eps}}}"),
            Kernel::Zero => write!(f, "zero"),
        }
    }
}

/// `∫_{|x|<1} exp(−1/(1−|x|²)) dx`, by composite Simpson in the radius.
fn bump_mass() -> f64 {
    let m = 20_000;
    let h = 1.0 / m as f64;
    let f = |r: f64| {
        if r >= 1.0 {
            0.0
        } else {
            r * r * (-1.0 / (1.0 - r * r)).exp()
        }
    };
    let mut s = f(0.0) + f(1.0);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(i as f64 * h);
    }
    4.0 * PI * s * h / 3.0
}

impl Kernel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Gaussian { eps, mass } if !(eps > 0.0 && eps.is_finite() && mass.is_finite()) => {
                Err(Error::InvalidArgument(format!("bad gaussian kernel {self}")))
            }
            Kernel::MollifiedDirac { eps } if !(eps > 0.0 && eps.is_finite()) => {
                Err(Error::InvalidArgument(format!("bad mollified_dirac kernel {self}")))
            }
            _ => Ok(()),
        }
    }

    /// Radial profile `h(r)`.
    pub fn profile(&self) -> Box<dyn Fn(f64) -> f64> {
        match *self {
            Kernel::Gaussian { eps, mass } => {
                let c = mass * (2.0 * PI * eps * eps).powf(-1.5);
                Box::new(move |r| c * (-r * r / (2.0 * eps * eps)).exp())
            }
            Kernel::MollifiedDirac { eps } => {
                let c = 1.0 / (bump_mass() * eps.powi(3));
                Box::new(move |r| {
                    let x = r / eps;
                    if x >= 1.0 {
                        0.0
                    } else {
                        c * (-1.0 / (1.0 - x * x)).exp()
                    }
                })
            }
            Kernel::Zero => Box::new(|_| 0.0),
        }
    }

    /// Samples the periodized kernel `Σ_j h(ξ + jL)` on the grid, summing
    /// the nearest 27 images.
    pub fn sample(&self, grid: &GridSpec) -> Vec<f64> {
        let h = self.profile();
        let len = grid.length();
        (0..grid.size())
            .map(|idx| {
                let x = grid.point(idx);
                let d: Vec<f64> = x.iter().map(|&c| if c > 0.5 * len { c - len } else { c }).collect();
                let mut s = 0.0;
                for a in -1..=1 {
                    for b in -1..=1 {
                        for c in -1..=1 {
                            let y = [d[0] + a as f64 * len, d[1] + b as f64 * len, d[2] + c as f64 * len];
                            s += h((y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt());
                        }
                    }
                }
                s
            })
            .collect()
    }
}

/// One noise channel `B̃_i = B_i + λ_i I` with `B_i u = h_i * u`.
#[derive(Debug, Clone)]
pub struct NoiseChannel {
    kernel: Kernel,
    lambda: f64,
    l1_norm: f64,
    symbol: Vec<f64>,
}

impl NoiseChannel {
    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `|h_i|₁` by grid quadrature.
    pub fn l1_norm(&self) -> f64 {
        self.l1_norm
    }

    /// Convolution symbol `ĥ_i(k) = Σ_ξ h_i(ξ) e^{−ik·ξ} (L/n)³` (real: the
    /// kernels are even).
    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    /// `|λ_i| > (√12 + 3)|h_i|₁`.
    pub fn admissible(&self) -> bool {
        self.lambda.abs() > (12f64.sqrt() + 3.0) * self.l1_norm
    }

    /// `α_i = λ_i²/2 − (3/2)(|h_i|₁² + 2|λ_i||h_i|₁)`.
    pub fn alpha(&self) -> f64 {
        let (l, h) = (self.lambda.abs(), self.l1_norm);
        0.5 * l * l - 1.5 * (h * h + 2.0 * l * h)
    }

    /// `|h_i|₁ + |λ_i|`, the Young bound on `‖B̃_i‖`.
    pub fn operator_bound(&self) -> f64 {
        self.l1_norm + self.lambda.abs()
    }
}

/// The convolution noise model: kernels, amplitudes and their symbols.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    grid: GridSpec,
    channels: Vec<NoiseChannel>,
}

impl NoiseModel {
    pub fn new(grid: GridSpec, spec: &[(Kernel, f64)]) -> Result<Self> {
        let mut channels = Vec::with_capacity(spec.len());
        for &(kernel, lambda) in spec {
            kernel.validate()?;
            if !lambda.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite lambda {lambda}")));
            }
            let samples = kernel.sample(&grid);
            let dv = grid.cell_volume();
            let l1_norm = samples.iter().map(|v| v.abs()).sum::<f64>() * dv;
            let sym = scalar_to_spectral(&grid, &samples)?;
            let vol = grid.volume();
            let symbol = sym.data().iter().map(|c| c.re * vol).collect();
            channels.push(NoiseChannel {
                kernel,
                lambda,
                l1_norm,
                symbol,
            });
        }
        Ok(Self { grid, channels })
    }

    /// Same kernels and amplitudes rebuilt on another grid.
    pub fn on_grid(&self, grid: GridSpec) -> Result<Self> {
        let spec: Vec<(Kernel, f64)> = self.channels.iter().map(|c| (c.kernel, c.lambda)).collect();
        Self::new(grid, &spec)
    }

    /// Model without noise channels (`Γ ≡ I`).
    pub fn none(grid: GridSpec) -> Self {
        Self {
            grid,
            channels: Vec::new(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn channels(&self) -> &[NoiseChannel] {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn channel(&self, i: usize) -> Result<&NoiseChannel> {
        self.channels.get(i).ok_or(Error::ChannelOutOfRange {
            channel: i,
            count: self.channels.len(),
        })
    }

    pub fn all_admissible(&self) -> bool {
        self.channels.iter().all(NoiseChannel::admissible)
    }

    /// `α = min_i α_i`.
    pub fn alpha_min(&self) -> f64 {
        self.channels
            .iter()
            .map(NoiseChannel::alpha)
            .fold(f64::INFINITY, f64::min)
    }

    /// `γ = 3 max_i (|h_i|₁ + |λ_i|)`.
    pub fn gamma_constant(&self) -> f64 {
        3.0 * self
            .channels
            .iter()
            .map(NoiseChannel::operator_bound)
            .fold(0.0, f64::max)
    }
}

/// `B_i F = h_i * F`, channel index from 0.
pub fn convolution_noise(
    f: &SpectralVectorField,
    model: &NoiseModel,
    channel: usize,
) -> Result<SpectralVectorField> {
    let ch = model.channel(channel)?;
    if f.grid() != model.grid() {
        return Err(Error::GridMismatch("field and noise model grids differ".into()));
    }
    let mut out = f.clone();
    out.apply_symbol_slice(ch.symbol());
    Ok(out)
}

/// Vorticity nonlinearity `M(U) = −[(K(U)·∇)U − (U·∇)K(U)]`.
///
/// Products are formed in physical space from 2/3-dealiased inputs and the
/// result is dealiased again, so the retained modes carry no aliasing error.
pub fn nonlinearity_m(u: &SpectralVectorField) -> SpectralVectorField {
    let g = *u.grid();
    if u.is_zero() {
        return SpectralVectorField::zeros(g);
    }
    let mut ud = u.clone();
    ud.dealias();
    let x = biot_savart(&ud);

    // Spectral arrays: U_j, X_j, D_i U_j, D_i X_j.
    let mut spectral: Vec<Vec<Complex64>> = Vec::with_capacity(24);
    for f in [&ud, &x] {
        for c in 0..3 {
            spectral.push(f.component(c).to_vec());
        }
    }
    for f in [&ud, &x] {
        for axis in 0..3 {
            for c in 0..3 {
                let comp = f.component(c);
                spectral.push(derivative_array(&g, comp, axis));
            }
        }
    }
    let refs: Vec<&[Complex64]> = spectral.iter().map(|v| v.as_slice()).collect();
    let phys = inverse_batch(&g, &refs);
    drop(spectral);

    let uu = &phys[0..3];
    let xx = &phys[3..6];
    let du = |axis: usize, c: usize| &phys[6 + axis * 3 + c];
    let dx = |axis: usize, c: usize| &phys[15 + axis * 3 + c];

    let size = g.size();
    let mut m: [Vec<f64>; 3] = [vec![0.0; size], vec![0.0; size], vec![0.0; size]];
    for (c, mc) in m.iter_mut().enumerate() {
        for axis in 0..3 {
            let (xa, ua) = (&xx[axis], &uu[axis]);
            let (duc, dxc) = (du(axis, c), dx(axis, c));
            for p in 0..size {
                mc[p] -= xa[p] * duc[p] - ua[p] * dxc[p];
            }
        }
    }
    let mut out = forward_batch(&g, &[&m[0], &m[1], &m[2]]).into_iter();
    let mut res = SpectralVectorField::from_components(
        g,
        [out.next().unwrap(), out.next().unwrap(), out.next().unwrap()],
    )
    .expect("sizes match");
    res.dealias();
    res
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble;
    use crate::field::{curl, divergence, lp_norm, to_physical, to_spectral, PhysicalVectorField};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n, 2.0 * PI).unwrap()
    }

    #[test]
    fn heat_identity_and_decay() {
        let g = grid(16);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = ensemble::band_limited(g, 5, false, &mut rng);
        assert_eq!(heat_semigroup(&f, 0.0).unwrap(), f);
        let s = to_spectral(&PhysicalVectorField::from_fn(g, |x| [0.0, x[0].sin(), 0.0])).unwrap();
        let h = to_physical(&heat_semigroup(&s, 1.0).unwrap());
        let expect = PhysicalVectorField::from_fn(g, |x| [0.0, (-1.0f64).exp() * x[0].sin(), 0.0]);
        assert!(h.sub(&expect).unwrap().max_abs() < 1e-14);
        assert!((expect.component(1)[g.flatten(4, 0, 0)] - 0.367879 * (PI / 2.0).sin()).abs() < 1e-6);
        assert!(matches!(heat_semigroup(&f, -1.0), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn heat_semigroup_law() {
        let g = grid(16);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = ensemble::band_limited(g, 7, false, &mut rng);
        let a = heat_semigroup(&heat_semigroup(&f, 0.03).unwrap(), 0.05).unwrap();
        let b = heat_semigroup(&f, 0.08).unwrap();
        assert!(a.sub(&b).unwrap().l2_norm() <= 1e-12 * b.l2_norm());
    }

    #[test]
    fn biot_savart_shear() {
        let g = grid(16);
        let u = to_spectral(&PhysicalVectorField::from_fn(g, |x| [0.0, x[0].sin(), 0.0])).unwrap();
        let k = to_physical(&biot_savart(&u));
        let expect = PhysicalVectorField::from_fn(g, |x| [0.0, 0.0, x[0].cos()]);
        assert!(k.sub(&expect).unwrap().max_abs() < 1e-14);
        assert!(biot_savart(&SpectralVectorField::zeros(g)).is_zero());
    }

    #[test]
    fn biot_savart_inverts_curl() {
        let g = grid(16);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let u = ensemble::band_limited(g, 8, true, &mut rng);
            let x = biot_savart(&u);
            assert!(divergence(&x).max_abs() <= 1e-13 * x.max_abs());
            let back = curl(&x);
            assert!(back.sub(&u).unwrap().l2_norm() <= 1e-12 * u.l2_norm());
        }
    }

    #[test]
    fn kernel_masses() {
        let g = grid(32);
        let m = NoiseModel::new(
            g,
            &[
                (Kernel::Gaussian { eps: 0.4, mass: 1.0 }, 7.0),
                (Kernel::MollifiedDirac { eps: 1.0 }, 7.0),
                (Kernel::Zero, 7.0),
            ],
        )
        .unwrap();
        assert!((m.channels()[0].l1_norm() - 1.0).abs() < 1e-12);
        // The bump is only resolved to a few grid cells; its quadrature mass
        // is close to but not exactly one.
        assert!((m.channels()[1].l1_norm() - 1.0).abs() < 1e-3);
        assert_eq!(m.channels()[2].l1_norm(), 0.0);
        for ch in m.channels() {
            let max = ch.symbol().iter().map(|v| v.abs()).fold(0.0, f64::max);
            assert!(max <= ch.l1_norm() * (1.0 + 1e-12));
            // Mass equals the k = 0 symbol.
            assert!((ch.symbol()[0] - ch.l1_norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn admissibility_and_alpha() {
        let g = grid(16);
        let m = NoiseModel::new(g, &[(Kernel::Gaussian { eps: 0.5, mass: 1.0 }, 7.0)]).unwrap();
        let ch = &m.channels()[0];
        assert!(ch.admissible());
        assert!((ch.alpha() - 2.0).abs() < 1e-10);
        assert!((m.gamma_constant() - 24.0).abs() < 1e-10);
        let m6 = NoiseModel::new(g, &[(Kernel::Gaussian { eps: 0.5, mass: 1.0 }, 6.0)]).unwrap();
        assert!(!m6.channels()[0].admissible());
    }

    #[test]
    fn convolution_of_constant_is_mass() {
        let g = grid(16);
        let m = NoiseModel::new(g, &[(Kernel::Gaussian { eps: 0.5, mass: 1.0 }, 7.0)]).unwrap();
        let f = to_spectral(&PhysicalVectorField::from_fn(g, |_| [1.0, -2.0, 0.5])).unwrap();
        let b = to_physical(&convolution_noise(&f, &m, 0).unwrap());
        assert!(b.sub(&to_physical(&f)).unwrap().max_abs() < 1e-12);
        assert!(convolution_noise(&SpectralVectorField::zeros(g), &m, 0).unwrap().is_zero());
        assert!(matches!(
            convolution_noise(&f, &m, 1),
            Err(Error::ChannelOutOfRange { channel: 1, count: 1 })
        ));
    }

    #[test]
    fn convolution_young_bound_and_commutation() {
        let g = grid(16);
        let m = NoiseModel::new(
            g,
            &[
                (Kernel::Gaussian { eps: 0.3, mass: 0.8 }, 7.0),
                (Kernel::MollifiedDirac { eps: 0.9 }, 7.0),
            ],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = ensemble::band_limited(g, 7, false, &mut rng);
        let ab = convolution_noise(&convolution_noise(&f, &m, 0).unwrap(), &m, 1).unwrap();
        let ba = convolution_noise(&convolution_noise(&f, &m, 1).unwrap(), &m, 0).unwrap();
        assert!(ab.sub(&ba).unwrap().max_abs() <= 1e-15 * ab.max_abs().max(1.0));
        let fp = to_physical(&f);
        for (i, ch) in m.channels().iter().enumerate() {
            let b = to_physical(&convolution_noise(&f, &m, i).unwrap());
            for &q in &[1.5, 2.0, 3.0] {
                assert!(lp_norm(&b, q).unwrap() <= ch.l1_norm() * lp_norm(&fp, q).unwrap() * (1.0 + 1e-6));
            }
        }
    }

    #[test]
    fn nonlinearity_trivial_cases() {
        let g = grid(16);
        assert!(nonlinearity_m(&SpectralVectorField::zeros(g)).is_zero());
        let c = to_spectral(&PhysicalVectorField::from_fn(g, |_| [1.0, 2.0, 3.0])).unwrap();
        assert!(nonlinearity_m(&c).max_abs() < 1e-15);
        // A shear flow is a steady Euler solution.
        let s = to_spectral(&PhysicalVectorField::from_fn(g, |x| [0.0, x[0].sin(), 0.0])).unwrap();
        assert!(nonlinearity_m(&s).max_abs() < 1e-14);
    }

    #[test]
    fn nonlinearity_is_quadratic_and_solenoidal() {
        let g = grid(16);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = ensemble::band_limited(g, 5, true, &mut rng);
        let m1 = nonlinearity_m(&u);
        let m3 = nonlinearity_m(&u.scale(3.0));
        assert!(m3.sub(&m1.scale(9.0)).unwrap().l2_norm() <= 1e-12 * m3.l2_norm());
        assert!(divergence(&m1).max_abs() <= 1e-12 * m1.max_abs());
        assert!(m1.hermitian_defect() < 1e-12);
    }
}
